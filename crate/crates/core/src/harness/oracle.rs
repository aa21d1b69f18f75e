//! Exhaustive search of the SINR criterion over a quantised phase grid.
//!
//! The first phase is pinned to zero (the criterion ignores a global phase), so
//! a length-`n`, `q`-level grid has `q^(n-1)` points.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::objective::sinr_objective;
use crate::signal_model::UnimodularCode;

pub const MAX_ORACLE_LENGTH: usize = 5;
pub const MAX_GRID_LEVELS: usize = 16;
pub const MAX_GRID_POINTS: usize = 10_000_000;

#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub best_code: UnimodularCode,
    pub best_value: f64,
    pub grid_levels: usize,
    /// Phase level of each entry of `best_code` (entry 0 is always level 0).
    pub best_levels: Vec<usize>,
    /// Criterion at every grid point, indexed as in [`grid_levels`];
    /// `-inf` where the denominator is degenerate.
    pub values: Vec<f64>,
}

/// Phase levels of grid point `index` (first entry fixed at level 0, entry
/// `k ≥ 1` is digit `k - 1` of `index` in base `q`).
pub fn grid_levels(index: usize, n: usize, q: usize) -> Vec<usize> {
    let mut levels = vec![0; n];
    let mut rest = index;
    for level in levels.iter_mut().skip(1) {
        *level = rest % q;
        rest /= q;
    }
    levels
}

/// The unimodular code with phases `2π·level/q`.
pub fn grid_code(levels: &[usize], q: usize) -> Result<UnimodularCode> {
    let step = std::f64::consts::TAU / q as f64;
    UnimodularCode::new(DVector::from_iterator(
        levels.len(),
        levels.iter().map(|&l| Complex64::from_polar(1.0, step * l as f64)),
    ))
}

pub fn run_bruteforce_oracle(n: usize, q: usize, y: &CVector) -> Result<BruteForceResult> {
    if !(2..=MAX_ORACLE_LENGTH).contains(&n) {
        return Err(Error::domain(format!(
            "oracle code length must lie in 2..={MAX_ORACLE_LENGTH}, got {n}"
        )));
    }
    if !(1..=MAX_GRID_LEVELS).contains(&q) {
        return Err(Error::domain(format!(
            "grid levels must lie in 1..={MAX_GRID_LEVELS}, got {q}"
        )));
    }
    if y.len() != n {
        return Err(Error::domain(format!("echo length {} does not match n = {n}", y.len())));
    }
    let points = q.checked_pow(n as u32 - 1).filter(|&p| p <= MAX_GRID_POINTS).ok_or_else(|| {
        Error::domain(format!("grid of {q}^{} points is too large", n - 1))
    })?;
    let mut values = Vec::with_capacity(points);
    let mut best: Option<(usize, f64)> = None;
    for index in 0..points {
        let code = grid_code(&grid_levels(index, n, q), q)?;
        let value = match sinr_objective(&code, y) {
            Ok(v) => v,
            Err(Error::DegenerateDenominator { .. }) => f64::NEG_INFINITY,
            Err(e) => return Err(e),
        };
        values.push(value);
        if best.is_none_or(|(_, b)| value > b) {
            best = Some((index, value));
        }
    }
    let (index, best_value) = best.expect("grid is never empty");
    let best_levels = grid_levels(index, n, q);
    Ok(BruteForceResult {
        best_code: grid_code(&best_levels, q)?,
        best_value,
        grid_levels: q,
        best_levels,
        values,
    })
}
