//! Grid-restricted optimum through the linear-programming form of Elfving's theorem.
//!
//! Over grid points `x_j`, with `λ⁺_j, λ⁻_j >= 0` and a scale `t`:
//!
//! ```text
//! maximize t   subject to   Σ_j (λ⁺_j − λ⁻_j) f(x_j) = t e_p,   Σ_j (λ⁺_j + λ⁻_j) = 1.
//! ```
//!
//! `t e_p` is then the furthest point of the ray through `e_p` inside the
//! convex hull of `{±f(x_j)}`, the minimum variance over designs supported on
//! the grid is `1/t²`, and `w_j = λ⁺_j + λ⁻_j` is an optimal design. The row
//! multipliers give the certificate `u` with `|uᵀf(x_j)| <= 1` and `u_p t = 1`.

use crate::design::{powers, uniform_grid, Design, DesignProblem};
use crate::error::{DesignError, Result};
use crate::polynomial::Polynomial;
use crate::simplex::{maximize, Problem};
use crate::solver::solve;

/// Grid size for quick checks.
pub const FAST_GRID_SIZE: usize = 2001;
/// Grid size for acceptance runs.
pub const ACCEPTANCE_GRID_SIZE: usize = 10001;
/// Grid points closer than this are merged.
pub const GRID_MERGE_TOL: f64 = 1e-12;
/// Atoms lighter than this are dropped from the returned design.
pub const WEIGHT_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub variance: f64,
    pub design: Design,
    /// Optimal `t`; `variance = 1/t²`.
    pub scale_t: f64,
    /// Number of distinct grid points used.
    pub grid_size: usize,
    /// `uᵀf` recovered from the LP dual.
    pub dual_certificate: Polynomial,
    pub iterations: usize,
}

fn prepare_grid(problem: &DesignProblem, grid: &[f64]) -> Result<Vec<f64>> {
    if let Some(&x) = grid
        .iter()
        .find(|x| !(x.is_finite() && (-1.0..=1.0).contains(*x)))
    {
        return Err(DesignError::InvalidArgument(format!(
            "grid point {x} outside [-1, 1]"
        )));
    }
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup_by(|a, b| (*a - *b).abs() <= GRID_MERGE_TOL);
    // n distinct nonzero points make {f(x_j)} span R^n, so the LP is feasible.
    let nonzero = g.iter().filter(|&&x| x != 0.0).count();
    if nonzero < problem.n() {
        return Err(DesignError::InvalidArgument(format!(
            "grid has {nonzero} distinct nonzero points, need at least n = {}",
            problem.n()
        )));
    }
    if !(g[0] < 0.0 && g[g.len() - 1] > 0.0) {
        return Err(DesignError::InvalidArgument(
            "grid needs a negative and a positive point".into(),
        ));
    }
    Ok(g)
}

/// Solves the Elfving LP for `e_p` over `grid` (sorted and de-duplicated first).
pub fn elfving_lp(problem: &DesignProblem, grid: &[f64]) -> Result<OracleResult> {
    let (n, p) = (problem.n(), problem.p());
    let grid = prepare_grid(problem, grid)?;

    // Columns: λ⁺_j, λ⁻_j interleaved, then t. Rows: n moment rows, then the mass row.
    let mut columns = Vec::with_capacity(2 * grid.len() + 1);
    for &x in &grid {
        let f = powers(x, n);
        let mut plus = f.clone();
        plus.push(1.0);
        let mut minus: Vec<f64> = f.iter().map(|v| -v).collect();
        minus.push(1.0);
        columns.push(plus);
        columns.push(minus);
    }
    let mut t_col = vec![0.0; n + 1];
    t_col[p - 1] = -1.0;
    columns.push(t_col);
    let t_index = columns.len() - 1;
    let mut c = vec![0.0; columns.len()];
    c[t_index] = 1.0;
    let mut b = vec![0.0; n + 1];
    b[n] = 1.0;

    let sol = maximize(Problem { columns, b, c })
        .map_err(|e| DesignError::OracleFailure(e.to_string()))?;
    let t = sol.objective;
    if !(t > 0.0 && t.is_finite()) {
        return Err(DesignError::OracleFailure(format!(
            "non-positive scale t = {t}"
        )));
    }

    let (support, weights): (Vec<f64>, Vec<f64>) = grid
        .iter()
        .enumerate()
        .map(|(j, &x)| (x, sol.x[2 * j] + sol.x[2 * j + 1]))
        .filter(|&(_, w)| w > WEIGHT_CUTOFF)
        .unzip();
    let design = Design::normalized(support, weights)
        .map_err(|e| DesignError::OracleFailure(format!("LP design: {e}")))?;

    let mass_dual = sol.duals[n];
    if mass_dual == 0.0 {
        return Err(DesignError::OracleFailure(
            "zero dual on the mass row".into(),
        ));
    }
    let mut u = vec![0.0];
    u.extend(sol.duals[..n].iter().map(|y| -y / mass_dual));

    Ok(OracleResult {
        variance: 1.0 / (t * t),
        design,
        scale_t: t,
        grid_size: grid.len(),
        dual_certificate: Polynomial::new(u),
        iterations: sol.iterations,
    })
}

/// Runs [`elfving_lp`] on a uniform grid, optionally adding the closed-form supports.
pub fn oracle(
    problem: &DesignProblem,
    grid_size: usize,
    include_solver_support: bool,
) -> Result<OracleResult> {
    if grid_size < problem.n() + 1 {
        return Err(DesignError::InvalidArgument(format!(
            "grid size {grid_size} below n + 1 = {}",
            problem.n() + 1
        )));
    }
    let mut grid = uniform_grid(grid_size);
    if include_solver_support {
        for d in solve(problem)?.designs {
            grid.extend_from_slice(d.support());
        }
    }
    elfving_lp(problem, &grid)
}

/// Minimum variance of `θ_p` over designs on a uniform grid of `grid_size` points.
pub fn oracle_variance(
    problem: &DesignProblem,
    grid_size: usize,
    include_solver_support: bool,
) -> Result<f64> {
    oracle(problem, grid_size, include_solver_support).map(|r| r.variance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn problem(n: usize, p: usize) -> DesignProblem {
        DesignProblem::new(n, p).unwrap()
    }

    #[test]
    fn degree_one_on_three_points() {
        let r = elfving_lp(&problem(1, 1), &[-1.0, 0.0, 1.0]).unwrap();
        assert_relative_eq!(r.variance, 1.0, max_relative = 1e-14);
        assert_eq!(r.design.len(), 1);
        assert_eq!(r.design.support()[0].abs(), 1.0);
        assert_eq!(r.design.weights(), &[1.0]);
    }

    #[test]
    fn degree_two_slope_on_three_points() {
        let v = oracle_variance(&problem(2, 1), 3, false).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn recovers_example_one_c() {
        let mut grid = uniform_grid(FAST_GRID_SIZE);
        grid.extend([-1.0, -0.5, 0.5, 1.0]);
        let r = elfving_lp(&problem(3, 3), &grid).unwrap();
        assert_relative_eq!(r.variance, 16.0, max_relative = 1e-8);
        for &x in r.design.support() {
            assert!([-1.0, -0.5, 0.5, 1.0].iter().any(|s| (s - x).abs() < 1e-12));
        }
    }

    #[test]
    fn recovers_example_two_a1() {
        let v = oracle_variance(&problem(4, 2), FAST_GRID_SIZE, true).unwrap();
        assert_relative_eq!(v, 12.0 + 8.0 * 2f64.sqrt(), max_relative = 1e-8);
    }

    #[test]
    fn dual_is_an_elfving_certificate() {
        let pr = problem(4, 3);
        let grid = uniform_grid(FAST_GRID_SIZE);
        let r = elfving_lp(&pr, &grid).unwrap();
        let u = &r.dual_certificate;
        assert_eq!(u.coefficient(0), 0.0);
        assert!(u.max_abs_on(&grid) <= 1.0 + 1e-8);
        assert_relative_eq!(u.coefficient(3) * r.scale_t, 1.0, max_relative = 1e-9);
        for &x in r.design.support() {
            assert_relative_eq!(u.eval(x).abs(), 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let pr = problem(3, 1);
        assert!(elfving_lp(&pr, &[0.1, 0.2, 0.3, 0.4, 0.5]).is_err());
        assert!(elfving_lp(&pr, &[-1.0, 1.0]).is_err());
        assert!(elfving_lp(&pr, &[-1.0, -0.5, 0.5, 1.0, 2.0]).is_err());
        assert!(oracle_variance(&pr, 3, false).is_err());
    }
}
