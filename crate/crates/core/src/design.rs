//! Approximate designs, information matrices and the `Φ_c` criterion.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{DesignError, Result};

/// Relative eigenvalue cutoff used by [`pseudo_inverse`].
pub const RANK_TOL: f64 = 1e-10;
/// Tolerance on `Σ w_i = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Relative tolerance of the range test in [`is_admissible`].
pub const ADMISSIBILITY_TOL: f64 = 1e-8;

/// A probability measure with finite support in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    support: Vec<f64>,
    weights: Vec<f64>,
}

impl Design {
    pub fn new(support: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(DesignError::InvalidDesign("empty support".into()));
        }
        if support.len() != weights.len() {
            return Err(DesignError::InvalidDesign(format!(
                "{} support points but {} weights",
                support.len(),
                weights.len()
            )));
        }
        for &x in &support {
            if !x.is_finite() || !(-1.0..=1.0).contains(&x) {
                return Err(DesignError::InvalidDesign(format!(
                    "support point {x} outside [-1, 1]"
                )));
            }
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DesignError::InvalidDesign(
                "support must be strictly increasing".into(),
            ));
        }
        for &w in &weights {
            if !w.is_finite() || w <= 0.0 {
                return Err(DesignError::InvalidDesign(format!(
                    "weight {w} is not positive"
                )));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(DesignError::InvalidDesign(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { support, weights })
    }

    /// Like [`Design::new`] but rescales positive weights to sum to one first.
    pub fn normalized(support: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(DesignError::InvalidDesign(format!(
                "cannot normalize weights with sum {total}"
            )));
        }
        Self::new(support, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }

    /// The image under `x -> -x`.
    pub fn mirrored(&self) -> Self {
        Self {
            support: self.support.iter().rev().map(|&x| -x).collect(),
            weights: self.weights.iter().rev().copied().collect(),
        }
    }
}

/// Degree `n` of the model and index `p` of the coefficient `θ_p` to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DesignProblem {
    n: usize,
    p: usize,
}

impl DesignProblem {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if n == 0 {
            return Err(DesignError::InvalidDegree(n));
        }
        if p == 0 || p > n {
            return Err(DesignError::InvalidProblem { n, p });
        }
        Ok(Self { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// `e_p` in `R^n`.
    pub fn target(&self) -> Vec<f64> {
        unit_vector(self.n, self.p)
    }

    /// Every problem with `1 <= p <= n <= max_degree`, ordered by `(n, p)`.
    pub fn all_up_to(max_degree: usize) -> impl Iterator<Item = DesignProblem> {
        (1..=max_degree).flat_map(|n| (1..=n).map(move |p| DesignProblem { n, p }))
    }
}

/// The `p`-th unit vector of `R^n` (1-based `p`).
pub fn unit_vector(n: usize, p: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[p - 1] = 1.0;
    e
}

/// `size` equally spaced points from -1 to 1, exactly symmetric about 0.
pub fn uniform_grid(size: usize) -> Vec<f64> {
    match size {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let last = (size - 1) as f64;
            (0..size).map(|j| (2.0 * j as f64 - last) / last).collect()
        }
    }
}

/// `f(x) = (x, x², …, xⁿ)`; there is no intercept term.
pub fn regression_vector(x: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(DesignError::InvalidDegree(n));
    }
    Ok(powers(x, n))
}

pub(crate) fn powers(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut acc = 1.0;
    for _ in 0..n {
        acc *= x;
        out.push(acc);
    }
    out
}

/// Dense symmetric matrix, indexed from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    /// Wraps `m`, symmetrizing it as `(m + mᵀ)/2`.
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "symmetric matrix must be square");
        let sym = (&m + m.transpose()) * 0.5;
        Self(sym)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (&self.0 * DVector::from_column_slice(v))
            .iter()
            .copied()
            .collect()
    }

    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mv = self.mul_vec(v);
        mv.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// `M(ξ) = Σ w_i f(x_i) f(x_i)ᵀ`.
pub fn information_matrix(design: &Design, n: usize) -> SymmetricMatrix {
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (x, w) in design.points() {
        let f = DVector::from_vec(powers(x, n));
        m.ger(w, &f, &f, 1.0);
    }
    SymmetricMatrix::from_matrix(m)
}

/// Moore–Penrose inverse through a symmetric eigendecomposition.
///
/// Eigenvalues with `|λ| <= RANK_TOL · max|λ|` are treated as zero. Returns
/// the inverse together with the numerical rank.
pub fn pseudo_inverse(m: &SymmetricMatrix) -> (SymmetricMatrix, usize) {
    let n = m.order();
    let eig = SymmetricEigen::new(m.0.clone());
    let scale = eig.eigenvalues.iter().fold(0.0_f64, |a, &l| a.max(l.abs()));
    let mut inv = DMatrix::<f64>::zeros(n, n);
    let mut rank = 0;
    if scale > 0.0 {
        for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda.abs() <= RANK_TOL * scale {
                continue;
            }
            rank += 1;
            let v = eig.eigenvectors.column(j);
            inv.ger(1.0 / lambda, &v, &v, 1.0);
        }
    }
    (SymmetricMatrix::from_matrix(inv), rank)
}

fn check_len(c: &[f64], n: usize) -> Result<()> {
    if c.len() != n {
        return Err(DesignError::DimensionMismatch {
            expected: n,
            got: c.len(),
        });
    }
    Ok(())
}

fn in_range(m: &SymmetricMatrix, m_pinv: &SymmetricMatrix, c: &[f64]) -> bool {
    let projected = m.mul_vec(&m_pinv.mul_vec(c));
    let c_norm = c.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    let residual = projected
        .iter()
        .zip(c)
        .fold(0.0_f64, |a, (p, x)| a.max((p - x).abs()));
    residual <= ADMISSIBILITY_TOL * c_norm.max(1.0)
}

/// Whether `c` lies in the range of `M(ξ)`, i.e. `cᵀθ` is estimable under `design`.
pub fn is_admissible(design: &Design, c: &[f64], n: usize) -> Result<bool> {
    check_len(c, n)?;
    let m = information_matrix(design, n);
    let (pinv, _) = pseudo_inverse(&m);
    Ok(in_range(&m, &pinv, c))
}

/// Value of `Φ_c`: finite for admissible designs, infinite otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriterionValue {
    Finite(f64),
    Infinite,
}

impl CriterionValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, CriterionValue::Finite(_))
    }

    /// The value as an extended real (`f64::INFINITY` for the sentinel).
    pub fn value(&self) -> f64 {
        match *self {
            CriterionValue::Finite(v) => v,
            CriterionValue::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            CriterionValue::Finite(v) => Some(v),
            CriterionValue::Infinite => None,
        }
    }
}

/// `Φ_c(ξ) = cᵀ M⁺(ξ) c` when `ξ` is admissible for `c`, infinite otherwise.
pub fn phi_c(design: &Design, c: &[f64], n: usize) -> Result<CriterionValue> {
    check_len(c, n)?;
    let m = information_matrix(design, n);
    let (pinv, _) = pseudo_inverse(&m);
    if !in_range(&m, &pinv, c) {
        return Ok(CriterionValue::Infinite);
    }
    Ok(CriterionValue::Finite(pinv.quadratic_form(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn two_point() -> Design {
        Design::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap()
    }

    fn one_point() -> Design {
        Design::new(vec![1.0], vec![1.0]).unwrap()
    }

    fn assert_matrix(m: &SymmetricMatrix, expected: &[&[f64]], tol: f64) {
        assert_eq!(m.order(), expected.len());
        for (i, row) in expected.iter().enumerate() {
            for (j, &want) in row.iter().enumerate() {
                assert!(
                    (m.get(i, j) - want).abs() <= tol,
                    "({i},{j}): got {}, expected {want}",
                    m.get(i, j)
                );
            }
        }
    }

    #[test]
    fn design_validation() {
        assert!(Design::new(vec![-1.0, 1.0], vec![0.5, 0.4]).is_err());
        assert!(Design::new(vec![1.0, -1.0], vec![0.5, 0.5]).is_err());
        assert!(Design::new(vec![-1.0, 1.5], vec![0.5, 0.5]).is_err());
        assert!(Design::new(vec![-1.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(Design::new(vec![-1.0], vec![0.5, 0.5]).is_err());
        assert!(Design::new(vec![], vec![]).is_err());
        assert!(Design::normalized(vec![-1.0, 1.0], vec![2.0, 2.0]).is_ok());
    }

    #[test]
    fn problem_validation() {
        assert!(DesignProblem::new(3, 3).is_ok());
        assert_eq!(
            DesignProblem::new(3, 4),
            Err(DesignError::InvalidProblem { n: 3, p: 4 })
        );
        assert_eq!(
            DesignProblem::new(3, 0),
            Err(DesignError::InvalidProblem { n: 3, p: 0 })
        );
        assert_eq!(DesignProblem::new(0, 0), Err(DesignError::InvalidDegree(0)));
        assert_eq!(DesignProblem::all_up_to(4).count(), 10);
    }

    #[test]
    fn uniform_grid_is_symmetric() {
        let g = uniform_grid(2001);
        assert_eq!(g[0], -1.0);
        assert_eq!(g[2000], 1.0);
        assert_eq!(g[1000], 0.0);
        assert_eq!(g[1500], 0.5);
        for i in 0..2001 {
            assert_eq!(g[i], -g[2000 - i]);
        }
        assert_eq!(uniform_grid(3), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn regression_vector_examples() {
        assert_eq!(regression_vector(1.0, 3).unwrap(), vec![1.0, 1.0, 1.0]);
        assert_eq!(regression_vector(-1.0, 3).unwrap(), vec![-1.0, 1.0, -1.0]);
        assert_eq!(
            regression_vector(0.5, 4).unwrap(),
            vec![0.5, 0.25, 0.125, 0.0625]
        );
        assert_eq!(
            regression_vector(0.5, 0),
            Err(DesignError::InvalidDegree(0))
        );
    }

    #[test]
    fn information_matrix_examples() {
        let m = information_matrix(&two_point(), 3);
        assert_matrix(
            &m,
            &[&[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0]],
            0.0,
        );
        let m = information_matrix(&one_point(), 2);
        assert_matrix(&m, &[&[1.0, 1.0], &[1.0, 1.0]], 0.0);
    }

    #[test]
    fn symmetric_design_has_no_odd_moments() {
        let d = Design::new(vec![-0.9, -0.3, 0.3, 0.9], vec![0.1, 0.4, 0.4, 0.1]).unwrap();
        let m = information_matrix(&d, 6);
        for q in 0..6 {
            for r in 0..6 {
                if (q + r) % 2 == 1 {
                    assert_eq!(m.get(q, r), 0.0);
                }
            }
        }
    }

    #[test]
    fn pseudo_inverse_examples() {
        let (inv, rank) = pseudo_inverse(&SymmetricMatrix::identity(3));
        assert_eq!(rank, 3);
        assert_matrix(
            &inv,
            &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]],
            1e-15,
        );

        let (inv, rank) = pseudo_inverse(&SymmetricMatrix::from_rows(&[
            vec![1.0, 1.0],
            vec![1.0, 1.0],
        ]));
        assert_eq!(rank, 1);
        assert_matrix(&inv, &[&[0.25, 0.25], &[0.25, 0.25]], 1e-15);

        let (inv, rank) = pseudo_inverse(&information_matrix(&two_point(), 3));
        assert_eq!(rank, 2);
        assert_abs_diff_eq!(inv.get(1, 1), 1.0, epsilon = 1e-15);
        assert_matrix(
            &inv,
            &[&[0.25, 0.0, 0.25], &[0.0, 1.0, 0.0], &[0.25, 0.0, 0.25]],
            1e-15,
        );

        let (inv, rank) = pseudo_inverse(&SymmetricMatrix::from_rows(&[
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        ]));
        assert_eq!(rank, 0);
        assert_matrix(&inv, &[&[0.0, 0.0], &[0.0, 0.0]], 0.0);
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&two_point(), &unit_vector(3, 2), 3).unwrap());
        assert!(!is_admissible(&one_point(), &unit_vector(2, 1), 2).unwrap());
        let full = Design::new(vec![-1.0, -0.5, 0.5, 1.0], vec![0.25; 4]).unwrap();
        assert!(is_admissible(&full, &[0.3, -2.0, 5.0, 1.0], 4).unwrap());
        assert!(matches!(
            is_admissible(&full, &[1.0], 4),
            Err(DesignError::DimensionMismatch {
                expected: 4,
                got: 1
            })
        ));
    }

    #[test]
    fn phi_c_examples() {
        let v = phi_c(&two_point(), &unit_vector(3, 2), 3).unwrap();
        assert_abs_diff_eq!(v.value(), 1.0, epsilon = 1e-14);
        assert_eq!(
            phi_c(&one_point(), &unit_vector(2, 1), 2).unwrap(),
            CriterionValue::Infinite
        );
        assert_eq!(
            phi_c(&one_point(), &unit_vector(2, 1), 2).unwrap().value(),
            f64::INFINITY
        );
        let v = phi_c(&two_point(), &unit_vector(1, 1), 1).unwrap();
        assert_abs_diff_eq!(v.value(), 1.0, epsilon = 1e-15);
    }

    fn random_design() -> impl Strategy<Value = Design> {
        // support drawn from multiples of 0.1 so the conditioning stays moderate
        prop::collection::btree_map(-10i32..=10, 0.05f64..1.0, 1..8).prop_map(|pts| {
            let (s, w): (Vec<f64>, Vec<f64>) =
                pts.into_iter().map(|(i, w)| (i as f64 / 10.0, w)).unzip();
            Design::normalized(s, w).unwrap()
        })
    }

    proptest! {
        #[test]
        fn information_matrix_is_psd(d in random_design(), n in 1usize..8) {
            let m = information_matrix(&d, n);
            let ev = m.eigenvalues();
            prop_assert!(ev[0] >= -1e-10);
        }

        #[test]
        fn pseudo_inverse_reproduces_matrix(d in random_design(), n in 1usize..6) {
            let m = information_matrix(&d, n);
            let (pinv, rank) = pseudo_inverse(&m);
            prop_assert!(rank <= d.len().min(n));
            let mpm = m.as_matrix() * pinv.as_matrix() * m.as_matrix();
            for (a, b) in mpm.iter().zip(m.as_matrix().iter()) {
                prop_assert!((a - b).abs() <= 1e-8);
            }
        }

        #[test]
        fn criterion_independent_of_generalized_inverse(d in random_design(), n in 1usize..6, p in 1usize..6) {
            prop_assume!(p <= n);
            let c = unit_vector(n, p);
            if let CriterionValue::Finite(v) = phi_c(&d, &c, n).unwrap() {
                // any solution of M v = c gives the same c^T v; take the SVD least-squares one
                let m = information_matrix(&d, n);
                let svd = m.as_matrix().clone().svd(true, true);
                let cutoff = 1e-10 * svd.singular_values.max();
                let sol = svd.solve(&DVector::from_column_slice(&c), cutoff).unwrap();
                let alt: f64 = sol.iter().zip(&c).map(|(a, b)| a * b).sum();
                prop_assert!((v - alt).abs() <= 1e-8 * v.abs().max(1.0), "{} vs {}", v, alt);
            }
        }
    }
}
