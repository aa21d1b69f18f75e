//! Simulated range-cell echo environment.
//!
//! A unimodular code `s` of length `N` illuminates `2N - 1` range cells with
//! reflectivities ordered `[α₀, α₁, …, α_{N-1}, α_{-N+1}, …, α_{-1}]`. The
//! aligned echo is `y = Aᴴ α + ε`, where column `k` of `Aᴴ` is the code delayed
//! by `k` samples (`k ≥ 0`) or advanced by `|k|` samples (`k < 0`), with zero
//! fill, and `ε ~ CN(0, Γ)`.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, CMatrix, CVector, ONE, ZERO};
use crate::rng::{complex_normal, random_phase};

/// Tolerance on `|s_k| = 1` accepted at construction.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

/// Transmit sequence with unit-modulus entries, `N ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnimodularCode(CVector);

impl UnimodularCode {
    pub fn new(entries: CVector) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::domain(format!(
                "unimodular code needs length >= 2, got {}",
                entries.len()
            )));
        }
        if let Some((k, z)) = entries
            .iter()
            .enumerate()
            .find(|(_, z)| !((z.norm() - 1.0).abs() <= UNIT_MODULUS_TOL))
        {
            return Err(Error::domain(format!(
                "entry {k} has modulus {} (expected 1)",
                z.norm()
            )));
        }
        Ok(Self(entries))
    }

    pub fn from_slice(entries: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(entries))
    }

    pub fn from_phases(phases: &[f64]) -> Result<Self> {
        Self::new(CVector::from_iterator(
            phases.len(),
            phases.iter().map(|&p| Complex64::from_polar(1.0, p)),
        ))
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::new(CVector::from_element(n, ONE))
    }

    /// Independent uniform phases.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::new(CVector::from_fn(n, |_, _| random_phase(rng)))
    }

    /// Wraps a vector already produced by unit-modulus projection.
    pub(crate) fn from_projection(entries: CVector) -> Self {
        debug_assert!(entries
            .iter()
            .all(|z| (z.norm() - 1.0).abs() <= UNIT_MODULUS_TOL));
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }

    pub fn phases(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.arg()).collect()
    }

    /// `e^{iθ} s`.
    pub fn rotated(&self, theta: f64) -> Self {
        let w = Complex64::from_polar(1.0, theta);
        Self(self.0.map(|z| w * z))
    }
}

/// Reflectivities of the cell under test and its `2N - 2` neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringProfile {
    alpha: CVector,
}

impl ScatteringProfile {
    pub fn new(n: usize, alpha: CVector) -> Result<Self> {
        if n < 2 || alpha.len() != 2 * n - 1 {
            return Err(Error::domain(format!(
                "scattering profile for N = {n} needs {} entries, got {}",
                (2 * n).saturating_sub(1),
                alpha.len()
            )));
        }
        Ok(Self { alpha })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, CVector::zeros((2 * n).saturating_sub(1)))
    }

    /// Code length this profile belongs to.
    pub fn n(&self) -> usize {
        self.alpha.len().div_ceil(2)
    }

    pub fn alpha(&self) -> &CVector {
        &self.alpha
    }

    /// `α₀`, the cell under test.
    pub fn target(&self) -> Complex64 {
        self.alpha[0]
    }

    /// `α_k` for `|k| ≤ N - 1`.
    pub fn coefficient(&self, k: isize) -> Complex64 {
        self.alpha[alpha_index(self.n(), k)]
    }
}

/// Position of `α_k` inside the ordered profile vector.
fn alpha_index(n: usize, k: isize) -> usize {
    assert!(k.unsigned_abs() < n, "cell offset {k} out of range for N = {n}");
    if k >= 0 {
        k as usize
    } else {
        (2 * n - 1) - k.unsigned_abs()
    }
}

#[derive(Debug, Clone)]
enum NoiseFactor {
    /// Square roots of a diagonal covariance.
    Diagonal(Vec<f64>),
    /// `F` with `F Fᴴ = Γ`.
    Full(CMatrix),
}

/// Clutter, target and noise statistics of the simulated environment.
#[derive(Debug, Clone)]
pub struct EnvironmentConfig {
    n: usize,
    clutter_power: f64,
    target_power: f64,
    noise_covariance: CMatrix,
    seed: u64,
    noise_factor: NoiseFactor,
}

impl EnvironmentConfig {
    pub fn new(
        n: usize,
        clutter_power: f64,
        target_power: f64,
        noise_covariance: CMatrix,
        seed: u64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("code length must be >= 2, got {n}")));
        }
        if !(clutter_power >= 0.0 && clutter_power.is_finite()) {
            return Err(Error::domain(format!(
                "clutter_power must be a finite value >= 0, got {clutter_power}"
            )));
        }
        if !(target_power >= 0.0 && target_power.is_finite()) {
            return Err(Error::domain(format!(
                "target_power must be a finite value >= 0, got {target_power}"
            )));
        }
        if noise_covariance.shape() != (n, n) {
            return Err(Error::domain(format!(
                "noise covariance must be {n}x{n}, got {:?}",
                noise_covariance.shape()
            )));
        }
        match hermitian_deviation(&noise_covariance) {
            Some(d) if d <= 1e-12 => {}
            _ => return Err(Error::domain("noise covariance is not Hermitian")),
        }
        let noise_factor = noise_factor(&noise_covariance)?;
        Ok(Self {
            n,
            clutter_power,
            target_power,
            noise_covariance,
            seed,
            noise_factor,
        })
    }

    /// `β` clutter, unit target power and `Γ = σ² I`.
    pub fn scaled_identity(n: usize, clutter_power: f64, noise_variance: f64, seed: u64) -> Result<Self> {
        let gamma = CMatrix::identity(n, n) * Complex64::new(noise_variance, 0.0);
        Self::new(n, clutter_power, 1.0, gamma, seed)
    }

    /// `β = 1`, unit target power, `Γ = I`.
    pub fn standard(n: usize, seed: u64) -> Result<Self> {
        Self::scaled_identity(n, 1.0, 1.0, seed)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clutter_power(&self) -> f64 {
        self.clutter_power
    }

    pub fn target_power(&self) -> f64 {
        self.target_power
    }

    pub fn noise_covariance(&self) -> &CMatrix {
        &self.noise_covariance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    fn noise<R: Rng + ?Sized>(&self, rng: &mut R) -> CVector {
        let w = CVector::from_fn(self.n, |_, _| complex_normal(rng, 1.0));
        match &self.noise_factor {
            NoiseFactor::Diagonal(d) => CVector::from_fn(self.n, |i, _| w[i] * d[i]),
            NoiseFactor::Full(f) => f * w,
        }
    }
}

fn noise_factor(gamma: &CMatrix) -> Result<NoiseFactor> {
    let n = gamma.nrows();
    let diagonal = (0..n).all(|j| (0..n).all(|i| i == j || gamma[(i, j)] == ZERO));
    if diagonal {
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            let v = gamma[(i, i)].re;
            if v < -1e-10 {
                return Err(Error::domain("noise covariance is not positive semidefinite"));
            }
            d.push(v.max(0.0).sqrt());
        }
        return Ok(NoiseFactor::Diagonal(d));
    }
    let eig = SymmetricEigen::new(gamma.clone());
    if eig.eigenvalues.min() < -1e-10 {
        return Err(Error::domain("noise covariance is not positive semidefinite"));
    }
    let mut f = eig.eigenvectors;
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let r = lambda.max(0.0).sqrt();
        f.column_mut(j).scale_mut(r);
    }
    Ok(NoiseFactor::Full(f))
}

/// An echo together with the reflectivities that produced it.
#[derive(Debug, Clone)]
pub struct ReceivedSignal {
    pub y: CVector,
    pub truth: ScatteringProfile,
}

/// The `N × (2N - 1)` code matrix `Aᴴ`.
pub fn build_code_matrix(s: &UnimodularCode) -> CMatrix {
    let n = s.len();
    let s = s.as_vector();
    let mut m = CMatrix::zeros(n, 2 * n - 1);
    for k in 0..n {
        // α_k: code delayed by k
        for r in k..n {
            m[(r, k)] = s[r - k];
        }
    }
    for k in 1..n {
        // α_{-k}: code advanced by k
        let col = 2 * n - 1 - k;
        for r in 0..n - k {
            m[(r, col)] = s[r + k];
        }
    }
    m
}

/// `Aᴴ α` without materialising `Aᴴ`.
pub fn apply_code_matrix(s: &UnimodularCode, alpha: &CVector) -> Result<CVector> {
    let n = s.len();
    if alpha.len() != 2 * n - 1 {
        return Err(Error::domain(format!(
            "profile length {} does not match code length {n}",
            alpha.len()
        )));
    }
    let s = s.as_vector();
    let mut y = CVector::zeros(n);
    for k in 0..n {
        let a = alpha[k];
        for r in k..n {
            y[r] += s[r - k] * a;
        }
    }
    for k in 1..n {
        let a = alpha[2 * n - 1 - k];
        for r in 0..n - k {
            y[r] += s[r + k] * a;
        }
    }
    Ok(y)
}

/// Draws `α₀ ~ CN(0, target_power)` followed by `α_k ~ CN(0, clutter_power)`
/// in profile order.
pub fn sample_profile<R: Rng + ?Sized>(cfg: &EnvironmentConfig, rng: &mut R) -> ScatteringProfile {
    let n = cfg.n;
    let alpha = CVector::from_fn(2 * n - 1, |i, _| {
        let v = if i == 0 { cfg.target_power } else { cfg.clutter_power };
        complex_normal(rng, v)
    });
    ScatteringProfile { alpha }
}

/// `y = Aᴴ α + ε` with `ε ~ CN(0, Γ)`.
pub fn receive<R: Rng + ?Sized>(
    s: &UnimodularCode,
    profile: &ScatteringProfile,
    cfg: &EnvironmentConfig,
    rng: &mut R,
) -> Result<ReceivedSignal> {
    if s.len() != cfg.n {
        return Err(Error::domain(format!(
            "code length {} does not match environment length {}",
            s.len(),
            cfg.n
        )));
    }
    let mut y = apply_code_matrix(s, &profile.alpha)?;
    y += cfg.noise(rng);
    Ok(ReceivedSignal {
        y,
        truth: profile.clone(),
    })
}

/// Profile and noise from one generator: the full environment draw for one
/// transmission.
pub fn observe<R: Rng + ?Sized>(
    s: &UnimodularCode,
    cfg: &EnvironmentConfig,
    rng: &mut R,
) -> Result<ReceivedSignal> {
    let profile = sample_profile(cfg, rng);
    receive(s, &profile, cfg, rng)
}
