//! Matched-filter recovery of the cell-under-test reflectivity and MSE scoring.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::signal_model::UnimodularCode;

/// `sᴴ y / N`, the matched-filter output normalised by `sᴴ s = N`.
pub fn matched_filter_estimate(s: &UnimodularCode, y: &CVector) -> Result<Complex64> {
    if y.len() != s.len() {
        return Err(Error::domain(format!(
            "echo length {} does not match code length {}",
            y.len(),
            s.len()
        )));
    }
    Ok(s.as_vector().dotc(y) / s.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationRecord {
    pub estimate: Complex64,
    pub truth: Complex64,
    pub squared_error: f64,
}

impl EstimationRecord {
    pub fn new(estimate: Complex64, truth: Complex64) -> Self {
        Self {
            estimate,
            truth,
            squared_error: (estimate - truth).norm_sqr(),
        }
    }
}

/// Mean squared error over a non-empty set of records.
pub fn mse(records: &[EstimationRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::domain("mse of an empty record set"));
    }
    Ok(records.iter().map(|r| r.squared_error).sum::<f64>() / records.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_normal, rng_from_seed};
    use crate::signal_model::{observe, EnvironmentConfig};

    #[test]
    fn clean_channel_examples() {
        let s = UnimodularCode::random(8, &mut rng_from_seed(1)).unwrap();
        let est = matched_filter_estimate(&s, s.as_vector()).unwrap();
        assert!((est - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let a = Complex64::new(2.0, 1.0);
        let est = matched_filter_estimate(&s, &(s.as_vector() * a)).unwrap();
        assert!((est - a).norm() < 1e-14);
        assert!(matched_filter_estimate(&s, &CVector::zeros(3)).is_err());
    }

    #[test]
    fn mse_examples() {
        let z = Complex64::new(0.5, -0.5);
        assert_eq!(mse(&[EstimationRecord::new(z, z)]).unwrap(), 0.0);
        let recs = [
            EstimationRecord::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            EstimationRecord::new(Complex64::new(3f64.sqrt(), 0.0), Complex64::new(0.0, 0.0)),
        ];
        assert!((mse(&recs).unwrap() - 2.0).abs() < 1e-15);
        assert!(mse(&[]).is_err());
    }

    #[test]
    fn scale_and_phase_equivariance() {
        let mut rng = rng_from_seed(2);
        let s = UnimodularCode::random(6, &mut rng).unwrap();
        let y = CVector::from_fn(6, |_, _| complex_normal(&mut rng, 1.0));
        let c = Complex64::new(-0.3, 1.7);
        let base = matched_filter_estimate(&s, &y).unwrap();
        assert!((matched_filter_estimate(&s, &(&y * c)).unwrap() - base * c).norm() < 1e-14);
        let theta = 0.9;
        let rotated = matched_filter_estimate(&s.rotated(theta), &y).unwrap();
        assert!((rotated - base * Complex64::from_polar(1.0, -theta)).norm() < 1e-14);
    }

    #[test]
    fn estimator_is_unbiased_in_clutter() {
        let n = 20;
        let env = EnvironmentConfig::standard(n, 0).unwrap();
        let mut rng = rng_from_seed(3);
        let s = UnimodularCode::random(n, &mut rng).unwrap();
        let trials = 5000;
        let errs: Vec<Complex64> = (0..trials)
            .map(|_| {
                let rx = observe(&s, &env, &mut rng).unwrap();
                matched_filter_estimate(&s, &rx.y).unwrap() - rx.truth.target()
            })
            .collect();
        let mean = errs.iter().sum::<Complex64>() / trials as f64;
        let var = errs.iter().map(|e| (e - mean).norm_sqr()).sum::<f64>() / (trials - 1) as f64;
        assert!(mean.norm() <= 3.0 * (var / trials as f64).sqrt());
    }
}
