//! Dense two-phase revised simplex for `max cᵀx  s.t.  Ax = b, x >= 0`.
//!
//! Tuned for the oracle's shape: a handful of rows and many columns. The
//! basis is refactorized from scratch at every iteration, which at this size
//! costs less than pricing and keeps the basic solution accurate. Pivoting is
//! Dantzig's rule with lowest-index tie-breaking, switching to Bland's rule
//! during long degenerate stretches.

use nalgebra::{DMatrix, DVector};

const PRICE_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-9;
const RATIO_TIE_TOL: f64 = 1e-12;
const FEASIBILITY_TOL: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 50;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpError {
    Infeasible(f64),
    Unbounded(usize),
    SingularBasis,
    IterationLimit,
}

impl std::fmt::Display for LpError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LpError::Infeasible(r) => write!(f, "infeasible (phase-one residual {r:e})"),
            LpError::Unbounded(j) => write!(f, "unbounded along column {j}"),
            LpError::SingularBasis => f.write_str("singular basis"),
            LpError::IterationLimit => f.write_str("iteration limit reached"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    /// Row multipliers `y` with `Aᵀy >= c` at optimality.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

pub(crate) struct Problem {
    /// Column-major constraint matrix, one `Vec` of length `rows` per variable.
    pub columns: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

struct Tableau {
    rows: usize,
    columns: Vec<Vec<f64>>,
    b: DVector<f64>,
    basis: Vec<usize>,
    iterations: usize,
}

struct PhaseResult {
    xb: DVector<f64>,
    y: DVector<f64>,
}

impl Tableau {
    fn basis_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.rows, |i, r| self.columns[self.basis[r]][i])
    }

    fn dot(y: &DVector<f64>, col: &[f64]) -> f64 {
        y.iter().zip(col).map(|(a, b)| a * b).sum()
    }

    fn run(
        &mut self,
        cost: &[f64],
        eligible: impl Fn(usize) -> bool,
    ) -> Result<PhaseResult, LpError> {
        let m = self.rows;
        let mut streak = 0usize;
        let mut in_basis = vec![false; self.columns.len()];
        loop {
            if self.iterations > MAX_ITERATIONS {
                return Err(LpError::IterationLimit);
            }
            in_basis.iter_mut().for_each(|f| *f = false);
            for &j in &self.basis {
                in_basis[j] = true;
            }
            let bmat = self.basis_matrix();
            let lu = bmat.clone().lu();
            let xb = lu.solve(&self.b).ok_or(LpError::SingularBasis)?;
            let cb = DVector::from_iterator(m, self.basis.iter().map(|&j| cost[j]));
            let y = bmat
                .transpose()
                .lu()
                .solve(&cb)
                .ok_or(LpError::SingularBasis)?;

            let bland = streak > DEGENERATE_STREAK;
            let mut entering = None;
            let mut best = PRICE_TOL;
            for (j, col) in self.columns.iter().enumerate() {
                if in_basis[j] || !eligible(j) {
                    continue;
                }
                let d = cost[j] - Self::dot(&y, col);
                if d > best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(entering) = entering else {
                return Ok(PhaseResult { xb, y });
            };

            let direction = lu
                .solve(&DVector::from_column_slice(&self.columns[entering]))
                .ok_or(LpError::SingularBasis)?;
            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..m {
                if direction[r] <= PIVOT_TOL {
                    continue;
                }
                let ratio = xb[r].max(0.0) / direction[r];
                leaving = match leaving {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - RATIO_TIE_TOL
                            || (ratio <= lratio + RATIO_TIE_TOL && self.basis[r] < self.basis[lr])
                        {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
            let Some((row, step)) = leaving else {
                return Err(LpError::Unbounded(entering));
            };
            if step <= RATIO_TIE_TOL {
                streak += 1;
            } else {
                streak = 0;
            }
            self.basis[row] = entering;
            self.iterations += 1;
        }
    }

    /// Replaces basic artificials (at level zero after phase one) by structural columns.
    fn drive_out_artificials(&mut self, structural: usize) -> Result<(), LpError> {
        for r in 0..self.rows {
            if self.basis[r] < structural {
                continue;
            }
            let bt = self.basis_matrix().transpose();
            let mut unit = DVector::zeros(self.rows);
            unit[r] = 1.0;
            let z = bt.lu().solve(&unit).ok_or(LpError::SingularBasis)?;
            let mut best: Option<(usize, f64)> = None;
            for j in 0..structural {
                if self.basis.contains(&j) {
                    continue;
                }
                let v = Self::dot(&z, &self.columns[j]).abs();
                if v > PIVOT_TOL && best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                self.basis[r] = j;
            }
        }
        Ok(())
    }
}

pub(crate) fn maximize(problem: Problem) -> Result<LpSolution, LpError> {
    let Problem { mut columns, b, c } = problem;
    let m = b.len();
    let structural = columns.len();

    // Make b >= 0 by flipping rows; remember the flips for the duals.
    let row_sign: Vec<f64> = b
        .iter()
        .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
        .collect();
    for col in columns.iter_mut() {
        for (v, s) in col.iter_mut().zip(&row_sign) {
            *v *= s;
        }
    }
    let b: Vec<f64> = b.iter().zip(&row_sign).map(|(v, s)| v * s).collect();

    for r in 0..m {
        let mut e = vec![0.0; m];
        e[r] = 1.0;
        columns.push(e);
    }
    let total = columns.len();
    let mut tab = Tableau {
        rows: m,
        columns,
        b: DVector::from_vec(b.clone()),
        basis: (structural..total).collect(),
        iterations: 0,
    };

    let phase1_cost: Vec<f64> = (0..total)
        .map(|j| if j < structural { 0.0 } else { -1.0 })
        .collect();
    let p1 = tab.run(&phase1_cost, |_| true)?;
    let infeasibility: f64 = tab
        .basis
        .iter()
        .zip(p1.xb.iter())
        .filter(|(&j, _)| j >= structural)
        .map(|(_, &v)| v.abs())
        .sum();
    let b_scale = b.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    if infeasibility > FEASIBILITY_TOL * b_scale {
        return Err(LpError::Infeasible(infeasibility));
    }
    tab.drive_out_artificials(structural)?;

    let phase2_cost: Vec<f64> = (0..total)
        .map(|j| if j < structural { c[j] } else { 0.0 })
        .collect();
    let p2 = tab.run(&phase2_cost, |j| j < structural)?;

    let mut x = vec![0.0; structural];
    for (&j, &v) in tab.basis.iter().zip(p2.xb.iter()) {
        if j < structural {
            x[j] = v.max(0.0);
        }
    }
    let objective = x.iter().zip(&c).map(|(a, b)| a * b).sum();
    let duals = p2.y.iter().zip(&row_sign).map(|(y, s)| y * s).collect();
    Ok(LpSolution {
        x,
        duals,
        objective,
        iterations: tab.iterations,
    })
}
