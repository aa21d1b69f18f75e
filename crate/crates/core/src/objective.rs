//! Shift matrices and the matched-filter SINR criterion
//! `f(s) = |sᴴ y|² / Σ_{k≠0} |sᴴ J_k y|²`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{outer, quadratic_form, CMatrix, CVector, ZERO};
use crate::signal_model::UnimodularCode;

/// Below this clutter energy the criterion is treated as undefined.
pub const DENOMINATOR_FLOOR: f64 = 1e-30;

/// `[J_k]_{l,m} = δ(m - l - k)`.
pub fn shift_matrix(n: usize, k: isize) -> Result<DMatrix<f64>> {
    if k.unsigned_abs() >= n {
        return Err(Error::InvalidOffset { n, offset: k });
    }
    Ok(DMatrix::from_fn(n, n, |l, m| {
        if m as isize - l as isize == k { 1.0 } else { 0.0 }
    }))
}

/// `J_k y`, i.e. `(J_k y)_l = y_{l+k}` with zero fill.
pub fn shift(y: &CVector, k: isize) -> CVector {
    let n = y.len() as isize;
    CVector::from_fn(y.len(), |l, _| {
        let src = l as isize + k;
        if (0..n).contains(&src) { y[src as usize] } else { ZERO }
    })
}

/// `A = y yᴴ` and `B = Σ_{0<|k|<N} J_k A J_kᴴ`.
#[derive(Debug, Clone)]
pub struct QuadraticPair {
    pub a: CMatrix,
    pub b: CMatrix,
}

impl QuadraticPair {
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn numerator(&self, s: &UnimodularCode) -> f64 {
        quadratic_form(&self.a, s.as_vector())
    }

    pub fn denominator(&self, s: &UnimodularCode) -> f64 {
        quadratic_form(&self.b, s.as_vector())
    }

    /// `sᴴ A s / sᴴ B s`.
    pub fn ratio(&self, s: &UnimodularCode) -> Result<f64> {
        ratio(self.numerator(s), self.denominator(s))
    }
}

/// Builds `B` from outer products of shifted copies of `y`.
pub fn build_quadratic_pair(y: &CVector) -> Result<QuadraticPair> {
    let n = y.len();
    if n < 2 {
        return Err(Error::domain(format!("echo length must be >= 2, got {n}")));
    }
    let a = outer(y, y);
    let mut b = CMatrix::zeros(n, n);
    for k in 1..n as isize {
        for shifted in [shift(y, k), shift(y, -k)] {
            b += outer(&shifted, &shifted);
        }
    }
    Ok(QuadraticPair { a, b })
}

fn ratio(numerator: f64, denominator: f64) -> Result<f64> {
    if !(denominator > DENOMINATOR_FLOOR) {
        return Err(Error::DegenerateDenominator {
            denominator,
            floor: DENOMINATOR_FLOOR,
        });
    }
    Ok(numerator / denominator)
}

/// Numerator `|sᴴ y|²` and denominator `Σ_{k≠0} |sᴴ J_k y|²`, computed as
/// cross-correlations in `O(N²)`.
pub fn sinr_parts(s: &UnimodularCode, y: &CVector) -> Result<(f64, f64)> {
    let n = s.len();
    if y.len() != n {
        return Err(Error::domain(format!(
            "echo length {} does not match code length {n}",
            y.len()
        )));
    }
    let s = s.as_vector();
    let lag = |k: isize| {
        let mut acc = ZERO;
        for l in 0..n {
            let src = l as isize + k;
            if (0..n as isize).contains(&src) {
                acc += s[l].conj() * y[src as usize];
            }
        }
        acc.norm_sqr()
    };
    let numerator = lag(0);
    let denominator = (1..n as isize).map(|k| lag(k) + lag(-k)).sum();
    Ok((numerator, denominator))
}

/// The SINR criterion of a code against an observed echo.
pub fn sinr_objective(s: &UnimodularCode, y: &CVector) -> Result<f64> {
    let (num, den) = sinr_parts(s, y)?;
    ratio(num, den)
}
