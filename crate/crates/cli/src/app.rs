//! Argument parsing and command dispatch.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use coefdesign::{
    certificate_for, elfving, oracle, solve, verify_with, CriterionValue, DesignError,
    DesignProblem, ElfvingReport, OptimalResult, VerifyOptions,
};

use crate::document::{parse_design_file, DesignDocument, FileError};
use crate::examples::{compare, Comparison, EXAMPLE_TOL};

pub const MAX_DEGREE: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Rejected = 1,
    Usage = 2,
    Numerical = 3,
}

#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            exit: Exit::Usage,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<DesignError> for Failure {
    fn from(e: DesignError) -> Self {
        let exit = match e {
            DesignError::InvalidNodes(_)
            | DesignError::InvalidOrder(_)
            | DesignError::InvalidDegree(_)
            | DesignError::InvalidProblem { .. }
            | DesignError::InvalidArgument(_)
            | DesignError::InvalidDesign(_)
            | DesignError::DimensionMismatch { .. }
            | DesignError::InvalidCertificate(_) => Exit::Usage,
            DesignError::DegenerateCoefficient { .. }
            | DesignError::NumericalDegeneracy(_)
            | DesignError::UnverifiedDesign(_)
            | DesignError::OracleFailure(_) => Exit::Numerical,
        };
        Self {
            exit,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::usage(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Optimal designs for single coefficients of polynomial regression
/// without intercept on [-1, 1].
#[derive(Debug, Parser)]
#[command(name = "coefdesign", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the optimal design(s) for one coefficient.
    Compute {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=MAX_DEGREE as u64))]
        degree: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        coef: u64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Check a design file against Elfving's conditions.
    Verify {
        #[arg(long)]
        file: PathBuf,
        /// Required when the file holds only support and weights.
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        coef: Option<usize>,
        #[arg(long, default_value_t = elfving::DEFAULT_GRID_SIZE)]
        grid: usize,
        /// Rescale the certificate so its largest value on the grid is 1.
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value_t = elfving::CONDITION_TOL)]
        condition_tol: f64,
        #[arg(long, default_value_t = elfving::VARIANCE_REL_TOL)]
        variance_tol: f64,
    },
    /// Solve the design problem as a linear program over a grid.
    Oracle {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=MAX_DEGREE as u64))]
        degree: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        coef: u64,
        #[arg(long, default_value_t = oracle::ACCEPTANCE_GRID_SIZE)]
        grid: usize,
        /// Add the closed-form support points to the grid.
        #[arg(long)]
        include_support: bool,
    },
    /// Recompute the published n = 3 and n = 4 tables.
    Examples {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

fn problem(degree: u64, coef: u64) -> Result<DesignProblem, Failure> {
    if coef > degree {
        return Err(Failure::usage(format!(
            "--coef {coef} exceeds --degree {degree}"
        )));
    }
    Ok(DesignProblem::new(degree as usize, coef as usize)?)
}

/// Runs one command, writing its report to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Exit, Failure> {
    match cli.command {
        Command::Compute {
            degree,
            coef,
            format,
        } => {
            let result = solve(&problem(degree, coef)?)?;
            render_result(&result, format, out)?;
            Ok(Exit::Success)
        }
        Command::Verify {
            file,
            degree,
            coef,
            grid,
            normalize,
            condition_tol,
            variance_tol,
        } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", file.display())))?;
            let parsed = parse_design_file(&text).map_err(|e| match e {
                FileError::Parse(_) => Failure::usage(e.to_string()),
                FileError::Design(d) => Failure::from(d),
            })?;
            let (n, p) = match (parsed.problem, degree, coef) {
                (Some(np), None, None) => np,
                (Some(np), Some(n), Some(p)) if np == (n, p) => np,
                (Some((fn_, fp)), Some(n), Some(p)) => {
                    return Err(Failure::usage(format!(
                        "file is for degree {fn_}, coef {fp} but flags give {n}, {p}"
                    )))
                }
                (None, Some(n), Some(p)) => (n, p),
                _ => return Err(Failure::usage("both --degree and --coef are required")),
            };
            if n > MAX_DEGREE {
                return Err(Failure::usage(format!("degree {n} above {MAX_DEGREE}")));
            }
            let problem = DesignProblem::new(n, p)?;
            let opts = VerifyOptions {
                grid_size: grid,
                normalize,
                condition_tol,
                variance_rel_tol: variance_tol,
            };
            let cert = certificate_for(&problem);
            let mut all_ok = true;
            for (i, d) in parsed.designs.iter().enumerate() {
                let report = verify_with(d, &problem, &cert, &opts)?;
                render_report(i + 1, &report, out)?;
                all_ok &= report.verdict;
            }
            Ok(if all_ok {
                Exit::Success
            } else {
                Exit::Rejected
            })
        }
        Command::Oracle {
            degree,
            coef,
            grid,
            include_support,
        } => {
            let problem = problem(degree, coef)?;
            let lp = oracle::oracle(&problem, grid, include_support)?;
            let solved = solve(&problem)?;
            let gap = lp.variance - solved.variance;
            writeln!(out, "degree             {}", problem.n())?;
            writeln!(out, "coef               {}", problem.p())?;
            writeln!(out, "grid points        {}", lp.grid_size)?;
            writeln!(out, "oracle variance    {:.16e}", lp.variance)?;
            writeln!(out, "solver variance    {:.16e}", solved.variance)?;
            writeln!(out, "absolute gap       {gap:.6e}")?;
            writeln!(out, "relative gap       {:.6e}", gap / solved.variance)?;
            writeln!(out, "oracle support")?;
            for (x, w) in lp.design.points() {
                writeln!(out, "  {x:>24.16e}  {w:>24.16e}")?;
            }
            Ok(Exit::Success)
        }
        Command::Examples { format } => run_examples_with(solve, format, out),
    }
}

/// The `examples` command with a caller-supplied solver.
pub fn run_examples_with<F>(solver: F, format: Format, out: &mut dyn Write) -> Result<Exit, Failure>
where
    F: Fn(&DesignProblem) -> coefdesign::Result<OptimalResult>,
{
    let comparison = compare(solver)?;
    render_comparison(&comparison, format, out)?;
    Ok(if comparison.passed() {
        Exit::Success
    } else {
        Exit::Rejected
    })
}

pub fn render_result(
    result: &OptimalResult,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    match format {
        Format::Json => out.write_all(DesignDocument::from_result(result).to_json().as_bytes())?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["degree", "coef", "design", "point", "support", "weight"])?;
            for (di, d) in result.designs.iter().enumerate() {
                for (pi, (x, wt)) in d.points().enumerate() {
                    w.write_record([
                        result.problem.n().to_string(),
                        result.problem.p().to_string(),
                        (di + 1).to_string(),
                        (pi + 1).to_string(),
                        format!("{x:.16e}"),
                        format!("{wt:.16e}"),
                    ])?;
                }
            }
            w.flush()?;
        }
        Format::Table => {
            writeln!(
                out,
                "degree {}, coef {}: case {}, k = {}",
                result.problem.n(),
                result.problem.p(),
                result.case,
                result.k
            )?;
            for (di, d) in result.designs.iter().enumerate() {
                writeln!(out)?;
                writeln!(out, "design {}", di + 1)?;
                writeln!(out, "  {:>20}  {:>20}", "support", "weight")?;
                for (x, w) in d.points() {
                    writeln!(out, "  {x:>20.15}  {w:>20.15}")?;
                }
            }
            writeln!(out)?;
            writeln!(out, "h         {:.15}", result.h)?;
            writeln!(out, "variance  {:.15}", result.variance)?;
            if let coefdesign::SupportRule::AlternateDeletion { dropped } = result.rule {
                writeln!(
                    out,
                    "note: supports drop x_{} and x_{} of the T_{} extrema",
                    dropped[0],
                    dropped[1],
                    2 * result.k + 1
                )?;
            }
        }
    }
    Ok(())
}

fn criterion(v: CriterionValue) -> String {
    match v {
        CriterionValue::Finite(x) => format!("{x:.16e}"),
        CriterionValue::Infinite => "infinite".to_string(),
    }
}

fn yes_no(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

pub fn render_report(index: usize, r: &ElfvingReport, out: &mut dyn Write) -> Result<(), Failure> {
    writeln!(out, "design {index}")?;
    writeln!(
        out,
        "  condition 1 (|u| <= 1 on grid)     {:<6}  max |u| = {:.16e}",
        yes_no(r.condition1_ok),
        r.condition1_max
    )?;
    writeln!(
        out,
        "  condition 2 (|u| = 1 on support)   {:<6}  max deviation = {:.3e}",
        yes_no(r.condition2_ok),
        r.condition2_max_deviation
    )?;
    writeln!(
        out,
        "  condition 3 (moment identity)      {:<6}  residual = {:.3e} (tol {:.3e})",
        yes_no(r.condition3_residual <= r.condition3_tol),
        r.condition3_residual,
        r.condition3_tol
    )?;
    writeln!(
        out,
        "  certificate scale                  {:.16e}",
        r.certificate_scale
    )?;
    writeln!(out, "  h                                  {:.16e}", r.h)?;
    writeln!(
        out,
        "  variance (h^2)                     {:.16e}",
        r.variance_formula
    )?;
    writeln!(
        out,
        "  variance (information matrix)      {}",
        criterion(r.variance_matrix)
    )?;
    writeln!(
        out,
        "  verdict                            {}",
        if r.verdict { "optimal" } else { "not optimal" }
    )?;
    Ok(())
}

pub fn render_comparison(
    c: &Comparison,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "degree",
                "coef",
                "design",
                "point",
                "published_support",
                "computed_support",
                "published_weight",
                "computed_weight",
                "deviation",
            ])?;
            for r in &c.rows {
                w.write_record([
                    r.n.to_string(),
                    r.p.to_string(),
                    r.design.to_string(),
                    r.point.to_string(),
                    format!("{:.16e}", r.published_support),
                    format!("{:.16e}", r.computed_support),
                    format!("{:.16e}", r.published_weight),
                    format!("{:.16e}", r.computed_weight),
                    format!("{:.3e}", r.deviation()),
                ])?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<_> = c
                .rows
                .iter()
                .map(|r| ExampleRow {
                    degree: r.n,
                    coef: r.p,
                    design: r.design,
                    point: r.point,
                    published_support: r.published_support,
                    computed_support: r.computed_support,
                    published_weight: r.published_weight,
                    computed_weight: r.computed_weight,
                })
                .collect();
            let doc = ExamplesDocument {
                rows,
                shape_mismatches: c.shape_mismatches.clone(),
                max_deviation: c.max_deviation(),
                tolerance: EXAMPLE_TOL,
            };
            out.write_all(crate::document::to_json(&doc).as_bytes())?;
        }
        Format::Table => {
            writeln!(
                out,
                "{:>2} {:>2} {:>2} {:>2}  {:>20} {:>20}  {:>20} {:>20}  {:>9}",
                "n",
                "p",
                "d",
                "i",
                "support (table)",
                "support (computed)",
                "weight (table)",
                "weight (computed)",
                "deviation"
            )?;
            for r in &c.rows {
                writeln!(
                    out,
                    "{:>2} {:>2} {:>2} {:>2}  {:>20.15} {:>20.15}  {:>20.15} {:>20.15}  {:>9.2e}",
                    r.n,
                    r.p,
                    r.design,
                    r.point,
                    r.published_support,
                    r.computed_support,
                    r.published_weight,
                    r.computed_weight,
                    r.deviation()
                )?;
            }
            for m in &c.shape_mismatches {
                writeln!(out, "mismatch: {m}")?;
            }
            writeln!(out)?;
            writeln!(
                out,
                "max deviation {:.3e} (tolerance {:.0e}): {}",
                c.max_deviation(),
                EXAMPLE_TOL,
                if c.passed() {
                    "all tables reproduced"
                } else {
                    "MISMATCH"
                }
            )?;
        }
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct ExampleRow {
    degree: usize,
    coef: usize,
    design: usize,
    point: usize,
    published_support: f64,
    computed_support: f64,
    published_weight: f64,
    computed_weight: f64,
}

#[derive(serde::Serialize)]
struct ExamplesDocument {
    rows: Vec<ExampleRow>,
    shape_mismatches: Vec<String>,
    max_deviation: f64,
    tolerance: f64,
}
