use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use coefdesign_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match run(cli, &mut out) {
        Ok(exit) => exit as u8,
        Err(f) => {
            let _ = out.flush();
            eprintln!("error: {f}");
            f.exit as u8
        }
    };
    let _ = out.flush();
    ExitCode::from(code)
}
