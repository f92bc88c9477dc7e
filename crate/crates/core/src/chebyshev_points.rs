//! Closed-form extremal points of `T_{2k-1}`, `T_{2k+1}` and `E_{2k}` on `[-1, 1]`.
//!
//! Each family is built from its negative half and mirrored, so
//! `points[i] == -points[m - 1 - i]` holds bit for bit.

use std::f64::consts::PI;

use crate::error::{DesignError, Result};
use crate::polynomial::{chebyshev_t, e_polynomial, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// Extrema of `T_{2k-1}` (`2k` points).
    S,
    /// Extrema of `T_{2k+1}` (`2k + 2` points).
    X,
    /// Extrema of `E_{2k}` (`2k` points).
    T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportFamily {
    pub kind: FamilyKind,
    pub k: usize,
    pub points: Vec<f64>,
}

impl SupportFamily {
    /// The polynomial whose extrema the family lists.
    pub fn generating_polynomial(&self) -> Polynomial {
        match self.kind {
            FamilyKind::S => chebyshev_t(2 * self.k - 1),
            FamilyKind::X => chebyshev_t(2 * self.k + 1),
            FamilyKind::T => e_polynomial(self.k).expect("family built with k >= 1"),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn mirrored(negative_half: Vec<f64>) -> Vec<f64> {
    let mut points = negative_half.clone();
    points.extend(negative_half.iter().rev().map(|&x| -x));
    points
}

/// The `2k` extrema of `T_{2k-1}`: `s_i = cos((2k - i)π / (2k - 1))`, `i = 1..2k`.
pub fn s_points(k: usize) -> Result<SupportFamily> {
    if k == 0 {
        return Err(DesignError::InvalidOrder(k));
    }
    let denom = (2 * k - 1) as f64;
    let half = (1..=k)
        .map(|i| ((2 * k - i) as f64 * PI / denom).cos())
        .collect();
    Ok(SupportFamily {
        kind: FamilyKind::S,
        k,
        points: mirrored(half),
    })
}

/// The `2k + 2` extrema of `T_{2k+1}`: `x_i = cos((2k + 2 - i)π / (2k + 1))`.
///
/// `k = 0` is allowed and gives the endpoints of `T_1 = x`.
pub fn x_points(k: usize) -> SupportFamily {
    let denom = (2 * k + 1) as f64;
    let half = (1..=k + 1)
        .map(|i| ((2 * k + 2 - i) as f64 * PI / denom).cos())
        .collect();
    SupportFamily {
        kind: FamilyKind::X,
        k,
        points: mirrored(half),
    }
}

/// The `2k` extrema of `E_{2k}`:
/// `t_i = -sqrt((cos((i-1)π/k) + cos(π/2k)) / (1 + cos(π/2k)))` for `i = 1..k`, mirrored.
pub fn t_points(k: usize) -> Result<SupportFamily> {
    if k == 0 {
        return Err(DesignError::InvalidOrder(k));
    }
    let c = (PI / (2 * k) as f64).cos();
    let half = (1..=k)
        .map(|i| -((((i - 1) as f64 * PI / k as f64).cos() + c) / (1.0 + c)).sqrt())
        .collect();
    Ok(SupportFamily {
        kind: FamilyKind::T,
        k,
        points: mirrored(half),
    })
}
