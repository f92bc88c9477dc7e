//! Command-line front end for `coefdesign`.

pub mod app;
pub mod document;
pub mod examples;

pub use app::{run, run_examples_with, Cli, Exit, Failure, Format};
pub use document::{parse_design_file, DesignDocument, DesignEntry};
