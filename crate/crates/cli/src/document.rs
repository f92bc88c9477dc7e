//! Serialized form of computed designs.

use std::collections::BTreeMap;
use std::io;

use coefdesign::{
    design, elfving, oracle, solver, Design, DesignError, OptimalResult, SupportRule,
};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, Serializer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignEntry {
    pub support: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub support_rule: String,
    pub tolerances: BTreeMap<String, f64>,
    pub grid_sizes: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignDocument {
    pub degree: usize,
    pub coef: usize,
    pub case_tag: String,
    pub designs: Vec<DesignEntry>,
    pub variance: f64,
    pub h: f64,
    pub certificate_coeffs: Vec<f64>,
    pub metadata: Metadata,
}

impl DesignDocument {
    pub fn from_result(result: &OptimalResult) -> Self {
        let designs = result
            .designs
            .iter()
            .map(|d| DesignEntry {
                support: d.support().to_vec(),
                weights: d.weights().to_vec(),
            })
            .collect();
        let support_rule = match result.rule {
            SupportRule::Standard => "standard".to_string(),
            SupportRule::AlternateDeletion { dropped } => {
                format!(
                    "alternate deletion of x_{} and x_{}",
                    dropped[0], dropped[1]
                )
            }
        };
        let tolerances = BTreeMap::from([
            ("rank".to_string(), design::RANK_TOL),
            ("weight_sum".to_string(), design::WEIGHT_SUM_TOL),
            (
                "degenerate_coefficient".to_string(),
                solver::DEGENERATE_COEFF_TOL,
            ),
            ("self_check".to_string(), solver::SELF_CHECK_TOL),
            ("elfving_condition".to_string(), elfving::CONDITION_TOL),
            (
                "elfving_variance_relative".to_string(),
                elfving::VARIANCE_REL_TOL,
            ),
        ]);
        let grid_sizes = BTreeMap::from([
            ("verify_default".to_string(), elfving::DEFAULT_GRID_SIZE),
            ("oracle_default".to_string(), oracle::ACCEPTANCE_GRID_SIZE),
        ]);
        Self {
            degree: result.problem.n(),
            coef: result.problem.p(),
            case_tag: result.case.to_string(),
            designs,
            variance: result.variance,
            h: result.h,
            certificate_coeffs: result.certificate.coeffs().to_vec(),
            metadata: Metadata {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                support_rule,
                tolerances,
                grid_sizes,
            },
        }
    }

    /// Pretty JSON with every number written to 17 significant digits.
    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Writes floats as `{:.16e}` so they survive a parse unchanged.
#[derive(Debug, Clone, Default)]
pub struct SeventeenDigits {
    indent: usize,
    has_value: bool,
}

impl SeventeenDigits {
    fn newline<W: ?Sized + io::Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.indent {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SeventeenDigits::default());
    value
        .serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Contents of a design file: a full document or just `{support, weights}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum DesignFile {
    Document(Box<DesignDocument>),
    Minimal(DesignEntry),
}

#[derive(Debug)]
pub struct ParsedDesigns {
    pub problem: Option<(usize, usize)>,
    pub designs: Vec<Design>,
}

#[derive(Debug)]
pub enum FileError {
    Parse(serde_json::Error),
    Design(DesignError),
}

impl std::error::Error for FileError {}

impl std::fmt::Display for FileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FileError::Parse(e) => write!(f, "cannot parse design file: {e}"),
            FileError::Design(e) => write!(f, "invalid design: {e}"),
        }
    }
}

pub fn parse_design_file(text: &str) -> Result<ParsedDesigns, FileError> {
    let file: DesignFile = serde_json::from_str(text).map_err(FileError::Parse)?;
    let (problem, entries) = match file {
        DesignFile::Document(doc) => (Some((doc.degree, doc.coef)), doc.designs),
        DesignFile::Minimal(entry) => (None, vec![entry]),
    };
    let designs = entries
        .into_iter()
        .map(|e| Design::new(e.support, e.weights))
        .collect::<Result<Vec<_>, _>>()
        .map_err(FileError::Design)?;
    Ok(ParsedDesigns { problem, designs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use coefdesign::{solve, DesignProblem};

    #[test]
    fn round_trip_is_lossless() {
        for problem in DesignProblem::all_up_to(12) {
            let doc = DesignDocument::from_result(&solve(&problem).unwrap());
            let text = doc.to_json();
            let back: DesignDocument = serde_json::from_str(&text).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn numbers_have_seventeen_digits() {
        let text = to_json(&vec![1.0 / 3.0, -0.5, 16.0]);
        assert!(text.contains("3.3333333333333331e-1"), "{text}");
        assert!(text.contains("-5.0000000000000000e-1"), "{text}");
        assert!(text.contains("1.6000000000000000e1"), "{text}");
    }

    #[test]
    fn minimal_form_is_accepted() {
        let parsed = parse_design_file(r#"{"support": [-1, 1], "weights": [0.5, 0.5]}"#).unwrap();
        assert_eq!(parsed.problem, None);
        assert_eq!(parsed.designs.len(), 1);
    }

    #[test]
    fn bad_weights_are_design_errors() {
        let err = parse_design_file(r#"{"support": [-1, 1], "weights": [0.5, 0.4]}"#).unwrap_err();
        assert!(matches!(err, FileError::Design(_)));
        let err = parse_design_file("{support: }").unwrap_err();
        assert!(matches!(err, FileError::Parse(_)));
    }
}
