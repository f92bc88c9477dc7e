//! Dense univariate polynomials over the monomial basis.
//!
//! Coefficient `j` multiplies `x^j`. Everything here is plain `f64`
//! arithmetic; the polynomials involved (Chebyshev, the composed `E_{2k}`,
//! intercept-free Lagrange bases) are small enough that straightforward
//! convolution is accurate to a few ulps per coefficient.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{DesignError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from monomial coefficients, lowest degree first.
    /// Trailing zeros are dropped; an empty input becomes the zero polynomial.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x^degree`.
    pub fn monomial(degree: usize) -> Self {
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[degree] = 1.0;
        Self { coeffs }
    }

    /// The linear factor `x - root`.
    pub fn linear_factor(root: f64) -> Self {
        Self::new(vec![-root, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Compensated Horner evaluation.
    ///
    /// The rounding errors of each multiply-add are carried in a second
    /// accumulator, so the result is as accurate as plain Horner in twice the
    /// working precision. Chebyshev polynomials of degree ~20 need this: their
    /// coefficients reach 2^19 and plain Horner loses about 1e-9 near ±1.
    pub fn eval(&self, x: f64) -> f64 {
        let mut iter = self.coeffs.iter().rev();
        let mut s = *iter.next().expect("coefficients are non-empty");
        let mut err = 0.0;
        for &c in iter {
            let (prod, prod_err) = two_prod(s, x);
            let (sum, sum_err) = two_sum(prod, c);
            s = sum;
            err = err * x + (prod_err + sum_err);
        }
        s + err
    }

    /// Bound on the error of [`Polynomial::eval`] at `x` when every coefficient
    /// carries a relative rounding error of a few ulps: `8ε Σ|c_j||x|^j`.
    pub fn eval_error_bound(&self, x: f64) -> f64 {
        let ax = x.abs();
        let magnitude = self
            .coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * ax + c.abs());
        8.0 * f64::EPSILON * magnitude
    }

    /// Plain Horner evaluation.
    pub fn eval_horner(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Coefficient of `x^p`, zero beyond the degree.
    pub fn coefficient(&self, p: usize) -> f64 {
        self.coeffs.get(p).copied().unwrap_or(0.0)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| j as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * factor).collect())
    }

    /// Coefficients zero-padded (or truncated) to exactly `len` entries.
    pub fn padded(&self, len: usize) -> Vec<f64> {
        let mut out = self.coeffs.clone();
        out.resize(len, 0.0);
        out
    }

    /// `self(inner(x))`, evaluated by Horner's scheme over polynomials.
    pub fn compose(&self, inner: &Polynomial) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, &c| &(&acc * inner) + &Self::constant(c))
    }

    /// Maximum of `|p(x)|` over the given points.
    pub fn max_abs_on(&self, points: &[f64]) -> f64 {
        points
            .iter()
            .map(|&x| self.eval(x).abs())
            .fold(0.0, f64::max)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..len)
                .map(|j| self.coefficient(j) + rhs.coefficient(j))
                .collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn renormalized(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Self {
            hi: s,
            lo: lo - (s - hi),
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        Self::renormalized(s, e + self.lo + rhs.lo)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        Self::renormalized(p, e + self.hi * rhs.lo + self.lo * rhs.hi)
    }
}

/// Chebyshev polynomial of the first kind `T_s`, from the three-term recurrence.
pub fn chebyshev_t(s: usize) -> Polynomial {
    let mut prev = Polynomial::constant(1.0);
    if s == 0 {
        return prev;
    }
    let mut cur = Polynomial::monomial(1);
    let two_x = Polynomial::new(vec![0.0, 2.0]);
    for _ in 1..s {
        let next = &(&two_x * &cur) - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `T_s(y)` by the three-term recurrence.
pub fn chebyshev_t_value(s: usize, y: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, y);
    if s == 0 {
        return prev;
    }
    for _ in 1..s {
        let next = (2.0 * y).mul_add(cur, -prev);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `E_{2k}(x)` evaluated through the composition rather than the expanded
/// coefficients, which lose accuracy once `k` passes about 12.
pub fn e_polynomial_value(k: usize, x: f64) -> Result<f64> {
    if k == 0 {
        return Err(DesignError::InvalidOrder(k));
    }
    let c = (std::f64::consts::PI / (2 * k) as f64).cos();
    Ok(chebyshev_t_value(k, (x * x).mul_add(1.0 + c, -c)))
}

/// The even extremal polynomial `E_{2k}(x) = T_k(x²(1 + cos(π/2k)) − cos(π/2k))`.
///
/// It equioscillates between ±1 at `2k` points of `[-1, 1]` and vanishes at 0.
pub fn e_polynomial(k: usize) -> Result<Polynomial> {
    if k == 0 {
        return Err(DesignError::InvalidOrder(k));
    }
    let c = (std::f64::consts::PI / (2 * k) as f64).cos();
    // The low-order coefficients come out of heavy cancellation, so the
    // composition runs in double-double and is rounded once at the end.
    let inner = [
        DoubleDouble::from(-c),
        DoubleDouble::from(0.0),
        DoubleDouble::from(1.0) + DoubleDouble::from(c),
    ];
    let mut acc = vec![DoubleDouble::from(0.0)];
    for &t in chebyshev_t(k).coeffs().iter().rev() {
        let mut next = vec![DoubleDouble::from(0.0); acc.len() + inner.len() - 1];
        for (i, &a) in acc.iter().enumerate() {
            for (j, &b) in inner.iter().enumerate() {
                next[i + j] = next[i + j] + a * b;
            }
        }
        next[0] = next[0] + DoubleDouble::from(t);
        acc = next;
    }
    let mut e = Polynomial::new(acc.into_iter().map(|d| d.hi).collect());
    // y(0) = -cos(π/2k) is a root of T_k; remove the rounding residue so
    // the polynomial is intercept-free exactly.
    e.coeffs[0] = 0.0;
    Ok(e)
}

/// Intercept-free Lagrange basis polynomial for `nodes` (0-based index `i`):
///
/// `L̄_i(x) = x·Π_{j≠i}(x − t_j) / (t_i·Π_{j≠i}(t_i − t_j))`.
///
/// It has degree `nodes.len()`, vanishes at 0 and satisfies `L̄_i(t_j) = δ_ij`.
pub fn lagrange_no_intercept(nodes: &[f64], i: usize) -> Result<Polynomial> {
    validate_nodes(nodes)?;
    if i >= nodes.len() {
        return Err(DesignError::InvalidNodes(format!(
            "basis index {i} out of range for {} nodes",
            nodes.len()
        )));
    }
    let ti = nodes[i];
    let mut numerator = Polynomial::monomial(1);
    let mut denominator = ti;
    for (j, &tj) in nodes.iter().enumerate() {
        if j == i {
            continue;
        }
        numerator = &numerator * &Polynomial::linear_factor(tj);
        denominator *= ti - tj;
    }
    let mut basis = numerator.scale(1.0 / denominator);
    basis.coeffs[0] = 0.0;
    Ok(basis)
}

fn validate_nodes(nodes: &[f64]) -> Result<()> {
    if nodes.is_empty() {
        return Err(DesignError::InvalidNodes("empty node set".into()));
    }
    for (j, &t) in nodes.iter().enumerate() {
        if !t.is_finite() {
            return Err(DesignError::InvalidNodes(format!("node {j} is not finite")));
        }
        if t == 0.0 {
            return Err(DesignError::InvalidNodes(format!("node {j} is zero")));
        }
        if nodes[..j].contains(&t) {
            return Err(DesignError::InvalidNodes(format!("node {t} is repeated")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn assert_coeffs(p: &Polynomial, expected: &[f64], tol: f64) {
        let got = p.padded(expected.len().max(p.coeffs().len()));
        for (j, (&g, &e)) in got
            .iter()
            .zip(expected.iter().chain(std::iter::repeat(&0.0)))
            .enumerate()
        {
            assert!((g - e).abs() <= tol, "coeff {j}: got {g}, expected {e}");
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Polynomial::new(vec![0.0, 0.0, 0.0, 1.0]).eval(0.5), 0.125);
        assert_eq!(Polynomial::new(vec![0.0, -3.0, 0.0, 4.0]).eval(1.0), 1.0);
        assert_eq!(Polynomial::new(vec![0.0, -0.75, 0.0, 1.0]).eval(0.5), -0.25);
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(Polynomial::new(vec![]).coeffs(), &[0.0]);
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(chebyshev_t(0).coeffs(), &[1.0]);
        assert_eq!(chebyshev_t(1).coeffs(), &[0.0, 1.0]);
        assert_eq!(chebyshev_t(2).coeffs(), &[-1.0, 0.0, 2.0]);
        assert_eq!(chebyshev_t(3).coeffs(), &[0.0, -3.0, 0.0, 4.0]);
        assert_eq!(chebyshev_t(5).coeffs(), &[0.0, 5.0, 0.0, -20.0, 0.0, 16.0]);
    }

    #[test]
    fn chebyshev_matches_cosine_form() {
        for s in 0..=20 {
            let t = chebyshev_t(s);
            for g in 0..200 {
                let theta = PI * g as f64 / 199.0;
                let err = (t.eval(theta.cos()) - (s as f64 * theta).cos()).abs();
                assert!(err <= 1e-10, "s={s} theta={theta} err={err}");
            }
        }
    }

    #[test]
    fn e_polynomial_low_orders() {
        assert_coeffs(&e_polynomial(1).unwrap(), &[0.0, 0.0, 1.0], 1e-15);

        // E_4 = 2y² − 1 with y = x²(1+c) − c, c = √2/2.
        let c = 0.5 * 2f64.sqrt();
        let expected = [0.0, 0.0, -4.0 * c * (1.0 + c), 0.0, 2.0 * (1.0 + c).powi(2)];
        let e4 = e_polynomial(2).unwrap();
        assert_coeffs(&e4, &expected, 1e-14);
        let r = (2f64.sqrt() - 1.0).sqrt();
        for x in [-1.0, 1.0] {
            assert_abs_diff_eq!(e4.eval(x), 1.0, epsilon = 1e-14);
        }
        for x in [-r, r] {
            assert_abs_diff_eq!(e4.eval(x), -1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn composed_values_match_expansion() {
        for k in 1..=10 {
            let e = e_polynomial(k).unwrap();
            for g in 0..=200 {
                let x = -1.0 + g as f64 / 100.0;
                let tol = 1e-12_f64.max(e.eval_error_bound(x));
                assert_abs_diff_eq!(e_polynomial_value(k, x).unwrap(), e.eval(x), epsilon = tol);
            }
        }
        for s in 0..=30 {
            let t = chebyshev_t(s);
            for g in 0..=20 {
                let y = -1.0 + g as f64 / 10.0;
                assert_abs_diff_eq!(chebyshev_t_value(s, y), t.eval(y), epsilon = 1e-12);
            }
        }
        assert!(e_polynomial_value(0, 0.5).is_err());
    }

    #[test]
    fn composed_values_equioscillate_for_large_k() {
        for k in [13, 20, 30] {
            let pts = crate::chebyshev_points::t_points(k).unwrap().points;
            for (i, &t) in pts.iter().enumerate() {
                let v = e_polynomial_value(k, t).unwrap();
                assert!((v.abs() - 1.0).abs() < 1e-11, "k={k} i={i} v={v}");
            }
            assert!(e_polynomial_value(k, 0.0).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn e_polynomial_rejects_zero_order() {
        assert_eq!(e_polynomial(0), Err(DesignError::InvalidOrder(0)));
    }

    #[test]
    fn e_polynomial_is_even_and_bounded() {
        for k in 1..=10 {
            let e = e_polynomial(k).unwrap();
            assert_eq!(e.degree(), 2 * k);
            let tol = 1e-10_f64.max(e.eval_error_bound(1.0));
            for (j, &c) in e.coeffs().iter().enumerate() {
                if j % 2 == 1 {
                    assert_eq!(c, 0.0, "k={k} odd coefficient {j}");
                }
            }
            assert_abs_diff_eq!(e.eval(1.0), 1.0, epsilon = tol);
            assert_eq!(e.eval(0.0), 0.0);
            let sup = (0..10001)
                .map(|g| e.eval(-1.0 + 2.0 * g as f64 / 10000.0).abs())
                .fold(0.0, f64::max);
            assert!(sup <= 1.0 + tol, "k={k} sup={sup}");
        }
    }

    #[test]
    fn error_bound_covers_e_polynomial_rounding() {
        for k in 1..=9 {
            assert!(
                (e_polynomial(k).unwrap().eval(1.0) - 1.0).abs() <= 1e-10,
                "k={k}"
            );
        }
        for k in 1..=14 {
            let e = e_polynomial(k).unwrap();
            assert!(
                (e.eval(1.0) - 1.0).abs() <= e.eval_error_bound(1.0),
                "k={k}"
            );
        }
        // integer coefficients: compensated evaluation is essentially exact
        let t = chebyshev_t(25);
        assert!((t.eval(1.0) - 1.0).abs() <= 1e-14);
        assert!(t.eval_error_bound(1.0) > 0.0);
    }

    #[test]
    fn lagrange_examples() {
        let l = lagrange_no_intercept(&[-1.0, 1.0], 0).unwrap();
        assert_coeffs(&l, &[0.0, -0.5, 0.5], 1e-15);

        let l = lagrange_no_intercept(&[-1.0, 0.5, 1.0], 1).unwrap();
        assert_abs_diff_eq!(l.coefficient(3), -8.0 / 3.0, epsilon = 1e-14);

        let l = lagrange_no_intercept(&[-1.0, 0.5, 1.0], 0).unwrap();
        assert_abs_diff_eq!(l.coefficient(3), -1.0 / 3.0, epsilon = 1e-15);

        for i in 0..3 {
            let l = lagrange_no_intercept(&[-1.0, -0.5, 0.5], i).unwrap();
            assert_eq!(l.eval(0.0), 0.0);
        }
    }

    #[test]
    fn lagrange_rejects_bad_nodes() {
        assert!(matches!(
            lagrange_no_intercept(&[-1.0, 0.0, 1.0], 0),
            Err(DesignError::InvalidNodes(_))
        ));
        assert!(matches!(
            lagrange_no_intercept(&[0.5, 0.5], 0),
            Err(DesignError::InvalidNodes(_))
        ));
        assert!(matches!(
            lagrange_no_intercept(&[0.5, 0.7], 2),
            Err(DesignError::InvalidNodes(_))
        ));
    }

    #[test]
    fn coefficient_beyond_degree_is_zero() {
        assert_eq!(chebyshev_t(3).coefficient(3), 4.0);
        assert_eq!(chebyshev_t(3).coefficient(7), 0.0);
        assert_eq!(
            Polynomial::new(vec![0.0, -0.75, 0.0, 1.0]).coefficient(0),
            0.0
        );
    }

    #[test]
    fn derivative_and_compose() {
        let t3 = chebyshev_t(3);
        assert_eq!(t3.derivative().coeffs(), &[-3.0, 0.0, 12.0]);
        // T_2(T_3) = T_6
        assert_coeffs(&chebyshev_t(2).compose(&t3), chebyshev_t(6).coeffs(), 1e-12);
    }

    fn node_set() -> impl Strategy<Value = Vec<f64>> {
        // Distinct, well-separated nonzero nodes in [-1, 1].
        (1usize..=7, any::<u64>()).prop_map(|(m, seed)| {
            let mut slots: Vec<i32> = (-10..=10).filter(|&s| s != 0).collect();
            let mut state = seed;
            let mut nodes = Vec::with_capacity(m);
            for _ in 0..m {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let idx = (state >> 33) as usize % slots.len();
                nodes.push(slots.remove(idx) as f64 / 10.0);
            }
            nodes
        })
    }

    proptest! {
        #[test]
        fn lagrange_basis_is_dual_to_nodes(nodes in node_set()) {
            for i in 0..nodes.len() {
                let l = lagrange_no_intercept(&nodes, i).unwrap();
                prop_assert_eq!(l.coefficient(0), 0.0);
                prop_assert_eq!(l.degree(), nodes.len());
                for (j, &t) in nodes.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((l.eval(t) - expected).abs() <= 1e-10);
                }
            }
        }

        #[test]
        fn combination_is_unique_intercept_free_interpolant(
            nodes in node_set(),
            seed in any::<u64>(),
        ) {
            let m = nodes.len();
            let values: Vec<f64> = (0..m)
                .map(|i| ((seed.rotate_left(7 * i as u32) % 2001) as f64 - 1000.0) / 500.0)
                .collect();
            let mut interp = Polynomial::zero();
            for (i, &v) in values.iter().enumerate() {
                interp = &interp + &lagrange_no_intercept(&nodes, i).unwrap().scale(v);
            }
            prop_assert!(interp.degree() <= m);
            prop_assert_eq!(interp.coefficient(0), 0.0);
            for (&t, &v) in nodes.iter().zip(&values) {
                prop_assert!((interp.eval(t) - v).abs() <= 1e-9);
            }
            // Uniqueness: solve the m×m system Σ b_l t_i^l = v_i directly.
            let vander = nalgebra::DMatrix::from_fn(m, m, |i, l| nodes[i].powi(l as i32 + 1));
            let rhs = nalgebra::DVector::from_column_slice(&values);
            let direct = vander.lu().solve(&rhs).unwrap();
            for l in 0..m {
                prop_assert!((direct[l] - interp.coefficient(l + 1)).abs() <= 1e-7 * (1.0 + direct[l].abs()));
            }
        }
    }
}
