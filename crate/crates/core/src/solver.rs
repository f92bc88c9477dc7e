//! Closed-form `e_p`-optimal designs for polynomial regression without intercept.
//!
//! With `k = ⌊n/2⌋` there are three cases:
//!
//! * **A** (`p` even): one design on the `2k` extrema of `E_{2k}`.
//! * **B** (`n` even, `p` odd): one design on the `2k` extrema of `T_{2k-1}`.
//! * **C** (`n` odd, `p` odd): two mirror-image designs, each on `2k + 1` of
//!   the `2k + 2` extrema of `T_{2k+1}`. For `p = 1` an endpoint is dropped,
//!   for `p > 1` one of the two points nearest the origin.
//!
//! The weights come from the `x^p` coefficients `a_{i,p}` of the
//! intercept-free Lagrange basis on the support:
//! `w_i = |a_{i,p}| / Σ_j |a_{j,p}|`, and `h = Σ_j |a_{j,p}|` so that the
//! optimal variance is `h²`.
//!
//! The case-C deletion rule for odd `p > 1` does not always satisfy the sign
//! condition (the first failure is `n = 9, p = 3`). When the prescribed pair
//! fails its Elfving check, the other symmetric single-deletion pairs of the
//! `T_{2k+1}` extrema are tried in turn and the first certified pair is
//! returned, tagged [`SupportRule::AlternateDeletion`].

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::chebyshev_points::{s_points, t_points, x_points};
use crate::design::{Design, DesignProblem};
use crate::elfving::{certificate_for, elfving_sum_with};
use crate::error::{DesignError, Result};
use crate::polynomial::{e_polynomial_value, lagrange_no_intercept, Polynomial};

/// Coefficients below this fraction of the largest are treated as zero.
pub const DEGENERATE_COEFF_TOL: f64 = 1e-12;
/// Slack for the solver's own Elfving check, scaled by `max(1, h)`.
pub const SELF_CHECK_TOL: f64 = 1e-9;
/// Agreement required between the `h` of the two case-C designs.
pub const H_AGREEMENT_TOL: f64 = 1e-10;
/// Agreement required by [`symmetric_system_check`].
pub const SYSTEM_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    A,
    B,
    C,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::A => "A",
            CaseTag::B => "B",
            CaseTag::C => "C",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub case: CaseTag,
    pub k: usize,
}

pub fn classify(problem: &DesignProblem) -> Classification {
    let (n, p) = (problem.n(), problem.p());
    let case = if p % 2 == 0 {
        CaseTag::A
    } else if n % 2 == 0 {
        CaseTag::B
    } else {
        CaseTag::C
    };
    Classification { case, k: n / 2 }
}

/// How the case-C supports were picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportRule {
    /// The supports given by the closed-form case analysis.
    Standard,
    /// A different symmetric pair of deleted extrema (1-based indices into
    /// `x_1..x_{2k+2}`, in the order the two designs are returned).
    AlternateDeletion { dropped: [usize; 2] },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalResult {
    pub problem: DesignProblem,
    pub case: CaseTag,
    pub k: usize,
    pub designs: Vec<Design>,
    pub h: f64,
    pub variance: f64,
    /// Extremal polynomial, oriented so that Elfving's condition (3) holds with `h > 0`.
    pub certificate: Polynomial,
    pub rule: SupportRule,
}

fn without(points: &[f64], index: usize) -> Vec<f64> {
    points
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != index)
        .map(|(_, &x)| x)
        .collect()
}

/// Deletion pairs (1-based) to try for case C, the prescribed pair first.
fn deletion_pairs(p: usize, k: usize) -> Vec<[usize; 2]> {
    let prescribed = if p == 1 {
        [2 * k + 2, 1]
    } else {
        [k + 1, k + 2]
    };
    let mut pairs = vec![prescribed];
    for d in 1..=k + 1 {
        let pair = [2 * k + 3 - d, d];
        let same = pair.iter().all(|i| prescribed.contains(i));
        if !same {
            pairs.push(pair);
        }
    }
    pairs
}

fn case_c_supports(k: usize, dropped: [usize; 2]) -> Vec<Vec<f64>> {
    let x = x_points(k).points;
    dropped.iter().map(|&d| without(&x, d - 1)).collect()
}

/// Candidate supports given by the case analysis, sorted ascending.
pub fn optimal_supports(problem: &DesignProblem) -> Vec<Vec<f64>> {
    let Classification { case, k } = classify(problem);
    match case {
        CaseTag::A => vec![t_points(k).expect("k >= 1 for even p").points],
        CaseTag::B => vec![s_points(k).expect("k >= 1 for even n").points],
        CaseTag::C => case_c_supports(k, deletion_pairs(problem.p(), k)[0]),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeWeights {
    /// `a_{i,p}`, the `x^p` coefficient of the i-th intercept-free Lagrange basis polynomial.
    pub coefficients: Vec<f64>,
    pub weights: Vec<f64>,
    pub h: f64,
    /// `sign(a_{i,p})` as `±1.0`.
    pub signs: Vec<f64>,
}

/// Weights `|a_{i,p}| / Σ|a_{j,p}|` and scale `h = Σ|a_{j,p}|` for a support.
pub fn weights_from_lagrange(support: &[f64], p: usize) -> Result<LagrangeWeights> {
    if p == 0 || p > support.len() {
        return Err(DesignError::InvalidArgument(format!(
            "coefficient index {p} needs 1 <= p <= {}",
            support.len()
        )));
    }
    if let Some(&x) = support.iter().find(|x| !(-1.0..=1.0).contains(*x)) {
        return Err(DesignError::InvalidNodes(format!("{x} outside [-1, 1]")));
    }
    let coefficients = (0..support.len())
        .map(|i| lagrange_no_intercept(support, i).map(|l| l.coefficient(p)))
        .collect::<Result<Vec<f64>>>()?;
    let largest = coefficients.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    for (index, &a) in coefficients.iter().enumerate() {
        if a.abs() <= DEGENERATE_COEFF_TOL * largest || largest == 0.0 {
            return Err(DesignError::DegenerateCoefficient { index, value: a });
        }
    }
    let h: f64 = coefficients.iter().map(|a| a.abs()).sum();
    Ok(LagrangeWeights {
        weights: coefficients.iter().map(|a| a.abs() / h).collect(),
        signs: coefficients.iter().map(|a| a.signum()).collect(),
        coefficients,
        h,
    })
}

struct Certified {
    designs: Vec<Design>,
    h: f64,
    certificate: Polynomial,
}

/// Builds the designs on `supports` and checks Elfving's conditions (2) and (3)
/// against `canonical` (condition (1) holds for the Chebyshev-type certificates).
/// `value` evaluates `canonical`.
fn certify(
    problem: &DesignProblem,
    supports: Vec<Vec<f64>>,
    canonical: &Polynomial,
    value: &dyn Fn(f64) -> f64,
) -> Result<Certified> {
    let (n, p) = (problem.n(), problem.p());
    let mut designs = Vec::with_capacity(supports.len());
    let mut hs = Vec::with_capacity(supports.len());
    let mut orientation = None;
    for support in supports {
        let lw = weights_from_lagrange(&support, p)?;
        let mut sign = None;
        for (i, &x) in support.iter().enumerate() {
            let u = value(x);
            if (u.abs() - 1.0).abs() > SELF_CHECK_TOL {
                return Err(DesignError::UnverifiedDesign(format!(
                    "certificate has |u(x)| = {} at support point {x}",
                    u.abs()
                )));
            }
            let s = lw.signs[i] * u.signum();
            match sign {
                None => sign = Some(s),
                Some(prev) if prev != s => {
                    return Err(DesignError::UnverifiedDesign(format!(
                        "a_(i,p) * u(x_i) changes sign on support {support:?}"
                    )))
                }
                _ => {}
            }
        }
        let sign = sign.expect("support is non-empty");
        if orientation.is_some_and(|o| o != sign) {
            return Err(DesignError::UnverifiedDesign(
                "designs need opposite certificate orientations".into(),
            ));
        }
        orientation = Some(sign);

        let design = Design::new(support, lw.weights)?;
        let sum = elfving_sum_with(&design, n, |x| sign * value(x));
        let residual = sum
            .iter()
            .enumerate()
            .map(|(q, &g)| ((if q + 1 == p { 1.0 } else { 0.0 }) - lw.h * g).abs())
            .fold(0.0, f64::max);
        if residual > SELF_CHECK_TOL * lw.h.max(1.0) {
            return Err(DesignError::UnverifiedDesign(format!(
                "condition (3) residual {residual:e} for (n, p) = ({n}, {p})"
            )));
        }
        designs.push(design);
        hs.push(lw.h);
    }
    let h = hs[0];
    if hs
        .iter()
        .any(|&other| (other - h).abs() > H_AGREEMENT_TOL * h)
    {
        return Err(DesignError::UnverifiedDesign(format!(
            "designs disagree on h: {hs:?}"
        )));
    }
    Ok(Certified {
        designs,
        h,
        certificate: canonical.scale(orientation.expect("at least one design")),
    })
}

/// Computes the `e_p`-optimal design(s) and their variance `h²`.
///
/// Every returned design has passed Elfving's conditions (2) and (3);
/// anything that fails is reported as [`DesignError::UnverifiedDesign`].
pub fn solve(problem: &DesignProblem) -> Result<OptimalResult> {
    let Classification { case, k } = classify(problem);
    let canonical = certificate_for(problem);
    // T_m has integer coefficients, so only E_{2k} needs the composed form.
    let value = |x: f64| match case {
        CaseTag::A => e_polynomial_value(k, x).expect("case A has k >= 1"),
        _ => canonical.eval(x),
    };
    let (certified, rule) = match case {
        CaseTag::A | CaseTag::B => (
            certify(problem, optimal_supports(problem), &canonical, &value)?,
            SupportRule::Standard,
        ),
        CaseTag::C => {
            let mut first_error = None;
            let mut found = None;
            for (attempt, dropped) in deletion_pairs(problem.p(), k).into_iter().enumerate() {
                match certify(problem, case_c_supports(k, dropped), &canonical, &value) {
                    Ok(c) => {
                        let rule = if attempt == 0 {
                            SupportRule::Standard
                        } else {
                            SupportRule::AlternateDeletion { dropped }
                        };
                        found = Some((c, rule));
                        break;
                    }
                    Err(e) => {
                        first_error.get_or_insert(e);
                    }
                }
            }
            match found {
                Some(f) => f,
                None => return Err(first_error.expect("at least one pair tried")),
            }
        }
    };
    Ok(OptimalResult {
        problem: *problem,
        case,
        k,
        variance: certified.h * certified.h,
        h: certified.h,
        designs: certified.designs,
        certificate: certified.certificate,
        rule,
    })
}

/// Weights re-derived from the half-size linear system of the symmetric ansatz.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSystemSolution {
    /// Solution of `F β = ẽ`, one entry per negative-half support point.
    pub beta: Vec<f64>,
    /// Full weight vector (negative half mirrored).
    pub weights: Vec<f64>,
    pub h: f64,
    pub alternating: bool,
}

/// Solves `F β = ẽ` on the negative half of a case-A or case-B design.
///
/// Case A uses `F = (t_i^{2q})` with `1/2` at position `p/2`; case B uses
/// `F = (s_i^{2q-1})` with `1/2` at position `(p+1)/2`, for `q, i = 1..k`.
/// With `β_i = h w_i P(t_i)` and symmetric weights summing to one this fixes
/// both `h` and the weights.
pub fn symmetric_system_solution(
    problem: &DesignProblem,
    design: &Design,
) -> Result<SymmetricSystemSolution> {
    let Classification { case, k } = classify(problem);
    let p = problem.p();
    let row_exponent = match case {
        CaseTag::A => |q: usize| 2 * q,
        CaseTag::B => |q: usize| 2 * q - 1,
        CaseTag::C => {
            return Err(DesignError::InvalidArgument(
                "the symmetric system applies to cases A and B only".into(),
            ))
        }
    };
    if design.len() != 2 * k {
        return Err(DesignError::InvalidDesign(format!(
            "expected {} support points, got {}",
            2 * k,
            design.len()
        )));
    }
    let half = &design.support()[..k];
    let f = DMatrix::from_fn(k, k, |q, i| half[i].powi(row_exponent(q + 1) as i32));
    let mut rhs = DVector::zeros(k);
    let position = match case {
        CaseTag::A => p / 2,
        _ => p.div_ceil(2),
    };
    rhs[position - 1] = 0.5;
    let beta = f
        .lu()
        .solve(&rhs)
        .filter(|b| b.iter().all(|v| v.is_finite()))
        .ok_or_else(|| DesignError::NumericalDegeneracy("singular F matrix".into()))?;

    let certificate = certificate_for(problem);
    let ratios: Vec<f64> = half
        .iter()
        .zip(beta.iter())
        .map(|(&t, &b)| b / certificate.eval(t))
        .collect();
    let total: f64 = ratios.iter().sum();
    if total == 0.0 || !total.is_finite() {
        return Err(DesignError::NumericalDegeneracy(
            "weights from the symmetric system do not normalize".into(),
        ));
    }
    let half_weights: Vec<f64> = ratios.iter().map(|r| r / (2.0 * total)).collect();
    let mut weights = half_weights.clone();
    weights.extend(half_weights.iter().rev());
    let alternating = beta.as_slice().windows(2).all(|w| w[0] * w[1] < 0.0);
    Ok(SymmetricSystemSolution {
        beta: beta.iter().copied().collect(),
        weights,
        h: 2.0 * total.abs(),
        alternating,
    })
}

/// Whether the symmetric-system weights agree with the design's weights
/// (within 1e-8), are positive, and come from an alternating `β`.
pub fn symmetric_system_check(problem: &DesignProblem, design: &Design) -> Result<bool> {
    let sol = symmetric_system_solution(problem, design)?;
    let positive = sol.weights.iter().all(|&w| w > 0.0);
    let matches = sol
        .weights
        .iter()
        .zip(design.weights())
        .all(|(a, b)| (a - b).abs() <= SYSTEM_CHECK_TOL);
    Ok(positive && matches && sol.alternating)
}
