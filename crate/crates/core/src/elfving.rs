//! Optimality certification through Elfving's theorem.
//!
//! A design `ξ` with support `x_1..x_m` and weights `w_i` is `e_p`-optimal
//! iff some `u` satisfies
//!
//! 1. `|uᵀf(x)| <= 1` on `[-1, 1]`,
//! 2. `|uᵀf(x_i)| = 1` at every support point,
//! 3. `e_p = h Σ f(x_i) w_i uᵀf(x_i)` for a constant `h`,
//!
//! and then `Φ_{e_p}(ξ) = h²`. The certificate `uᵀf` is passed around as an
//! intercept-free [`Polynomial`].

use crate::chebyshev_points::FamilyKind;
use crate::design::{phi_c, powers, uniform_grid, CriterionValue, Design, DesignProblem};
use crate::error::{DesignError, Result};
use crate::polynomial::{chebyshev_t, e_polynomial, Polynomial};
use crate::solver::{classify, CaseTag};

pub const DEFAULT_GRID_SIZE: usize = 10001;
pub const MIN_GRID_SIZE: usize = 101;
/// Slack for conditions (1)–(3).
pub const CONDITION_TOL: f64 = 1e-9;
/// Relative tolerance between `h²` and `Φ_{e_p}`.
pub const VARIANCE_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub grid_size: usize,
    /// Rescale the certificate to unit sup-norm on the grid before checking.
    pub normalize: bool,
    pub condition_tol: f64,
    pub variance_rel_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            grid_size: DEFAULT_GRID_SIZE,
            normalize: false,
            condition_tol: CONDITION_TOL,
            variance_rel_tol: VARIANCE_REL_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElfvingReport {
    pub condition1_ok: bool,
    /// `max |uᵀf|` over the grid and the support.
    pub condition1_max: f64,
    pub condition2_ok: bool,
    /// `max_i ||uᵀf(x_i)| - 1|`.
    pub condition2_max_deviation: f64,
    /// `‖e_p - h Σ f w uᵀf‖_∞`.
    pub condition3_residual: f64,
    pub condition3_tol: f64,
    pub h: f64,
    pub variance_formula: f64,
    pub variance_matrix: CriterionValue,
    /// Factor applied to the certificate (1 unless normalizing).
    pub certificate_scale: f64,
    /// `±1`: the orientation of `u` for which `h` comes out positive.
    pub certificate_sign: f64,
    pub verdict: bool,
}

/// `Σ_i f(x_i) w_i P(x_i)` in `R^n`.
pub fn elfving_sum(design: &Design, n: usize, certificate: &Polynomial) -> Vec<f64> {
    elfving_sum_with(design, n, |x| certificate.eval(x))
}

/// [`elfving_sum`] with the certificate given as a function.
pub fn elfving_sum_with(design: &Design, n: usize, certificate: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut acc = vec![0.0; n];
    for (x, w) in design.points() {
        let scale = w * certificate(x);
        for (a, f) in acc.iter_mut().zip(powers(x, n)) {
            *a += scale * f;
        }
    }
    acc
}

/// The extremal polynomial used for each case: `E_{2k}`, `T_{2k-1}` or `T_{2k+1}`.
pub fn certificate_for(problem: &DesignProblem) -> Polynomial {
    let cls = classify(problem);
    match cls.case {
        CaseTag::A => e_polynomial(cls.k).expect("case A has k >= 1"),
        CaseTag::B => chebyshev_t(2 * cls.k - 1),
        CaseTag::C => chebyshev_t(2 * cls.k + 1),
    }
}

/// Which extremal-point family the certificate of `problem` lives on.
pub fn certificate_family(problem: &DesignProblem) -> FamilyKind {
    match classify(problem).case {
        CaseTag::A => FamilyKind::T,
        CaseTag::B => FamilyKind::S,
        CaseTag::C => FamilyKind::X,
    }
}

pub fn verify(
    design: &Design,
    problem: &DesignProblem,
    certificate: &Polynomial,
    grid_size: usize,
) -> Result<ElfvingReport> {
    verify_with(
        design,
        problem,
        certificate,
        &VerifyOptions {
            grid_size,
            ..VerifyOptions::default()
        },
    )
}

pub fn verify_with(
    design: &Design,
    problem: &DesignProblem,
    certificate: &Polynomial,
    opts: &VerifyOptions,
) -> Result<ElfvingReport> {
    let n = problem.n();
    let p = problem.p();
    if certificate.coefficient(0) != 0.0 {
        return Err(DesignError::InvalidCertificate(format!(
            "nonzero intercept {}",
            certificate.coefficient(0)
        )));
    }
    if certificate.degree() > n {
        return Err(DesignError::InvalidCertificate(format!(
            "degree {} exceeds model degree {n}",
            certificate.degree()
        )));
    }
    if certificate.is_zero() {
        return Err(DesignError::InvalidCertificate("zero polynomial".into()));
    }
    if opts.grid_size < MIN_GRID_SIZE {
        return Err(DesignError::InvalidArgument(format!(
            "grid size {} below {MIN_GRID_SIZE}",
            opts.grid_size
        )));
    }

    let mut grid = uniform_grid(opts.grid_size);
    grid.extend_from_slice(design.support());

    let raw_max = certificate.max_abs_on(&grid);
    let certificate_scale = if opts.normalize { 1.0 / raw_max } else { 1.0 };
    let u = certificate.scale(certificate_scale);
    let tol = opts.condition_tol + u.eval_error_bound(1.0);

    let condition1_max = u.max_abs_on(&grid);
    let condition1_ok = condition1_max <= 1.0 + tol;

    let condition2_max_deviation = design
        .support()
        .iter()
        .map(|&x| (u.eval(x).abs() - 1.0).abs())
        .fold(0.0, f64::max);
    let condition2_ok = condition2_max_deviation <= tol;

    // h from coordinate p alone; the other coordinates make up the residual.
    let sum = elfving_sum(design, n, &u);
    let gp = sum[p - 1];
    let (h, certificate_sign, condition3_residual) = if gp != 0.0 && gp.is_finite() {
        let sign = gp.signum();
        let h = 1.0 / gp.abs();
        let residual = sum
            .iter()
            .enumerate()
            .map(|(q, &g)| {
                let target = if q + 1 == p { 1.0 } else { 0.0 };
                (target - h * sign * g).abs()
            })
            .fold(0.0, f64::max);
        (h, sign, residual)
    } else {
        (f64::INFINITY, 1.0, f64::INFINITY)
    };
    let condition3_tol = opts.condition_tol * h.max(1.0);

    let variance_formula = h * h;
    let variance_matrix = phi_c(design, &problem.target(), n)?;
    let variances_agree = match variance_matrix {
        CriterionValue::Finite(v) => {
            (variance_formula - v).abs() <= opts.variance_rel_tol * v.abs()
        }
        CriterionValue::Infinite => false,
    };

    let verdict =
        condition1_ok && condition2_ok && condition3_residual <= condition3_tol && variances_agree;

    Ok(ElfvingReport {
        condition1_ok,
        condition1_max,
        condition2_ok,
        condition2_max_deviation,
        condition3_residual,
        condition3_tol,
        h,
        variance_formula,
        variance_matrix,
        certificate_scale,
        certificate_sign,
        verdict,
    })
}
