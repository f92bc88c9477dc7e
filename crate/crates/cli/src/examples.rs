//! The seven published design tables for `n = 3` and `n = 4`, and a
//! comparison of them against computed designs.

use coefdesign::{DesignProblem, OptimalResult, Result};

/// Largest deviation accepted between a published and a computed value.
pub const EXAMPLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct PublishedDesign {
    pub support: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PublishedExample {
    pub n: usize,
    pub p: usize,
    pub designs: Vec<PublishedDesign>,
}

fn published(support: &[f64], weights: &[f64]) -> PublishedDesign {
    PublishedDesign {
        support: support.to_vec(),
        weights: weights.to_vec(),
    }
}

pub fn published_examples() -> Vec<PublishedExample> {
    let s2 = 2f64.sqrt();
    let r = (s2 - 1.0).sqrt();
    let half = [-1.0, -0.5, 0.5, 1.0];
    let radical = [-1.0, -r, r, 1.0];
    let a1 = [s2, 3.0 * s2 + 4.0, 3.0 * s2 + 4.0, s2].map(|v| v / (8.0 * s2 + 8.0));
    let a2 = [s2, s2 + 2.0, s2 + 2.0, s2].map(|v| v / (4.0 * s2 + 4.0));
    let ex = |n, p, designs| PublishedExample { n, p, designs };
    vec![
        ex(
            3,
            1,
            vec![
                published(&[-1.0, -0.5, 0.5], &[1.0 / 9.0, 2.0 / 3.0, 2.0 / 9.0]),
                published(&[-0.5, 0.5, 1.0], &[2.0 / 9.0, 2.0 / 3.0, 1.0 / 9.0]),
            ],
        ),
        ex(3, 2, vec![published(&[-1.0, 1.0], &[0.5, 0.5])]),
        ex(
            3,
            3,
            vec![
                published(&[-1.0, 0.5, 1.0], &[1.0 / 12.0, 2.0 / 3.0, 0.25]),
                published(&[-1.0, -0.5, 1.0], &[0.25, 2.0 / 3.0, 1.0 / 12.0]),
            ],
        ),
        ex(
            4,
            1,
            vec![published(
                &half,
                &[1.0 / 18.0, 4.0 / 9.0, 4.0 / 9.0, 1.0 / 18.0],
            )],
        ),
        ex(4, 2, vec![published(&radical, &a1)]),
        ex(
            4,
            3,
            vec![published(
                &half,
                &[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            )],
        ),
        ex(4, 4, vec![published(&radical, &a2)]),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub n: usize,
    pub p: usize,
    /// 1-based design index within the problem.
    pub design: usize,
    /// 1-based point index within the design.
    pub point: usize,
    pub published_support: f64,
    pub computed_support: f64,
    pub published_weight: f64,
    pub computed_weight: f64,
}

impl ComparisonRow {
    pub fn deviation(&self) -> f64 {
        let d = (self.published_support - self.computed_support)
            .abs()
            .max((self.published_weight - self.computed_weight).abs());
        if d.is_nan() {
            f64::INFINITY
        } else {
            d
        }
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    /// Problems whose design count or support sizes differ from the tables.
    pub shape_mismatches: Vec<String>,
}

impl Comparison {
    pub fn max_deviation(&self) -> f64 {
        if !self.shape_mismatches.is_empty() {
            return f64::INFINITY;
        }
        self.rows
            .iter()
            .map(ComparisonRow::deviation)
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_deviation() <= EXAMPLE_TOL
    }
}

/// Compares `solver` against every published table.
pub fn compare<F>(solver: F) -> Result<Comparison>
where
    F: Fn(&DesignProblem) -> Result<OptimalResult>,
{
    let mut rows = Vec::new();
    let mut shape_mismatches = Vec::new();
    for ex in published_examples() {
        let result = solver(&DesignProblem::new(ex.n, ex.p)?)?;
        if result.designs.len() != ex.designs.len() {
            shape_mismatches.push(format!(
                "({}, {}): {} designs, expected {}",
                ex.n,
                ex.p,
                result.designs.len(),
                ex.designs.len()
            ));
        }
        for (di, (pub_d, got)) in ex.designs.iter().zip(&result.designs).enumerate() {
            if got.len() != pub_d.support.len() {
                shape_mismatches.push(format!(
                    "({}, {}) design {}: {} points, expected {}",
                    ex.n,
                    ex.p,
                    di + 1,
                    got.len(),
                    pub_d.support.len()
                ));
            }
            for (pi, ((&ps, &pw), (cs, cw))) in pub_d
                .support
                .iter()
                .zip(&pub_d.weights)
                .zip(got.points())
                .enumerate()
            {
                rows.push(ComparisonRow {
                    n: ex.n,
                    p: ex.p,
                    design: di + 1,
                    point: pi + 1,
                    published_support: ps,
                    computed_support: cs,
                    published_weight: pw,
                    computed_weight: cw,
                });
            }
        }
    }
    Ok(Comparison {
        rows,
        shape_mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use coefdesign::solve;

    #[test]
    fn published_weights_sum_to_one() {
        for ex in published_examples() {
            for d in &ex.designs {
                let s: f64 = d.weights.iter().sum();
                assert!((s - 1.0).abs() < 1e-15, "({}, {})", ex.n, ex.p);
            }
        }
    }

    #[test]
    fn solver_matches_tables() {
        let c = compare(solve).unwrap();
        assert_eq!(c.rows.len(), 3 + 3 + 2 + 3 + 3 + 4 * 4);
        assert!(c.passed(), "max deviation {}", c.max_deviation());
    }

    #[test]
    fn missing_design_is_a_mismatch() {
        let c = compare(|p| {
            let mut r = solve(p)?;
            r.designs.truncate(1);
            Ok(r)
        })
        .unwrap();
        assert!(!c.passed());
        assert_eq!(c.shape_mismatches.len(), 2);
    }
}
