//! Optimal designs for estimating individual coefficients of a polynomial
//! regression model without intercept on `[-1, 1]`.
//!
//! The model is `y = θ_1 x + θ_2 x² + … + θ_n xⁿ + ε`. For each coefficient
//! `θ_p` the [`solver`] returns the design minimizing the variance of its
//! least-squares estimate, in closed form. [`elfving`] certifies any
//! candidate design independently, and [`oracle`] recomputes the optimum as a
//! linear program over a grid.
//!
//! ```
//! use coefdesign::{solve, DesignProblem};
//!
//! let result = solve(&DesignProblem::new(3, 3).unwrap()).unwrap();
//! assert_eq!(result.designs.len(), 2);
//! assert!((result.variance - 16.0).abs() < 1e-12);
//! ```

pub mod chebyshev_points;
pub mod design;
pub mod elfving;
pub mod error;
pub mod oracle;
pub mod polynomial;
mod simplex;
pub mod solver;

pub use chebyshev_points::{s_points, t_points, x_points, FamilyKind, SupportFamily};
pub use design::{
    information_matrix, is_admissible, phi_c, pseudo_inverse, regression_vector, uniform_grid,
    unit_vector, CriterionValue, Design, DesignProblem, SymmetricMatrix,
};
pub use elfving::{certificate_for, verify, verify_with, ElfvingReport, VerifyOptions};
pub use error::{DesignError, Result};
pub use oracle::{elfving_lp, oracle_variance, OracleResult};
pub use polynomial::{
    chebyshev_t, chebyshev_t_value, e_polynomial, e_polynomial_value, lagrange_no_intercept,
    Polynomial,
};
pub use solver::{
    classify, optimal_supports, solve, symmetric_system_check, weights_from_lagrange, CaseTag,
    Classification, OptimalResult, SupportRule,
};
