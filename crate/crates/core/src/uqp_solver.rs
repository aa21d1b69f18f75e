//! Model-based waveform designer.
//!
//! The fractional program `max sᴴAs / sᴴBs` over unimodular `s` is attacked with
//! Dinkelbach steps: for the current code `s⋆` with ratio `f⋆`, any code that
//! does not decrease `sᴴ(A - f⋆B)s` does not decrease the ratio. Each step is a
//! unimodular quadratic program on the diagonally loaded matrix
//! `χ = A - f⋆B + λI`, improved by power-method-like iterations
//! `s ← exp(j·arg(χ s))`.

use crate::decor::activation;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{frobenius_norm, hermitian_deviation, quadratic_form, CMatrix, CVector};
use crate::objective::{build_quadratic_pair, sinr_objective, QuadraticPair};
use crate::signal_model::UnimodularCode;
use num_complex::Complex64;

/// Symmetry tolerance accepted by [`min_eigenvalue`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Relative padding added on top of the loading that makes `χ` PSD.
pub const LOADING_PAD: f64 = 1e-8;
pub const DEFAULT_INNER_ITERS: usize = 30;
pub const DEFAULT_OUTER_ITERS: usize = 20;
pub const DEFAULT_TOL: f64 = 1e-8;

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &CMatrix) -> Result<f64> {
    match hermitian_deviation(h) {
        None => return Err(Error::domain("min_eigenvalue needs a square matrix")),
        Some(d) if !(d <= HERMITIAN_TOL) => {
            return Err(Error::domain(format!(
                "matrix is not Hermitian (deviation {d:e})"
            )))
        }
        _ => {}
    }
    if h.nrows() == 0 {
        return Err(Error::domain("min_eigenvalue of an empty matrix"));
    }
    Ok(h.clone().symmetric_eigenvalues().min())
}

/// A diagonally loaded UQP matrix `χ = χ̃ + λI`.
#[derive(Debug, Clone)]
pub struct UqpMatrix {
    chi: CMatrix,
    loading: f64,
}

impl UqpMatrix {
    /// Wraps a Hermitian PSD matrix without loading.
    pub fn new(chi: CMatrix) -> Result<Self> {
        let lambda = min_eigenvalue(&chi)?;
        if lambda < -1e-8 {
            return Err(Error::domain(format!(
                "UQP matrix must be positive semidefinite (min eigenvalue {lambda:e})"
            )));
        }
        Ok(Self { chi, loading: 0.0 })
    }

    pub fn chi(&self) -> &CMatrix {
        &self.chi
    }

    /// `λ` added to the diagonal.
    pub fn loading(&self) -> f64 {
        self.loading
    }

    pub fn n(&self) -> usize {
        self.chi.nrows()
    }

    /// `sᴴ χ s`.
    pub fn value(&self, s: &UnimodularCode) -> f64 {
        quadratic_form(&self.chi, s.as_vector())
    }
}

/// `χ = A - f⋆B + λI` with `λ = max(0, -λ_min(A - f⋆B)) + 1e-8·max(1, ‖A - f⋆B‖_F)`.
pub fn build_chi(pair: &QuadraticPair, f_star: f64) -> Result<UqpMatrix> {
    if !(f_star >= 0.0 && f_star.is_finite()) {
        return Err(Error::domain(format!("f_star must be finite and >= 0, got {f_star}")));
    }
    let mut chi = &pair.a - &pair.b * Complex64::new(f_star, 0.0);
    // enforce exact Hermitian symmetry before the eigen solve
    let n = chi.nrows();
    for i in 0..n {
        chi[(i, i)].im = 0.0;
        for j in i + 1..n {
            let avg = (chi[(i, j)] + chi[(j, i)].conj()) * 0.5;
            chi[(i, j)] = avg;
            chi[(j, i)] = avg.conj();
        }
    }
    let pad = LOADING_PAD * frobenius_norm(&chi).max(1.0);
    let loading = (-min_eigenvalue(&chi)?).max(0.0) + pad;
    for i in 0..n {
        chi[(i, i)].re += loading;
    }
    Ok(UqpMatrix { chi, loading })
}

/// One layer of the iteration: `exp(j·arg(M s))`. Shared by [`pmli_step`] and
/// the unfolded network so the two agree bit for bit.
pub(crate) fn project_product(m: &CMatrix, s: &CVector) -> CVector {
    activation(&(m * s))
}

/// Solution of the nearest-unimodular-vector problem for `χ s`.
pub fn pmli_step(chi: &UqpMatrix, s: &UnimodularCode) -> UnimodularCode {
    assert_eq!(chi.n(), s.len(), "pmli_step dimension mismatch");
    UnimodularCode::from_projection(project_product(&chi.chi, s.as_vector()))
}

#[derive(Debug, Clone)]
pub struct PmliOutcome {
    pub code: UnimodularCode,
    pub iterations: usize,
    /// `sᴴ χ s` after each step.
    pub trace: Vec<f64>,
}

/// Iterates [`pmli_step`] until the relative change of `sᴴ χ s` drops below
/// `tol` or `max_iters` steps have run.
pub fn pmli_solve(chi: &UqpMatrix, s0: &UnimodularCode, max_iters: usize, tol: f64) -> Result<PmliOutcome> {
    if max_iters == 0 {
        return Err(Error::domain("pmli_solve needs max_iters >= 1"));
    }
    if chi.n() != s0.len() {
        return Err(Error::domain(format!(
            "UQP matrix is {0}x{0} but code has length {1}",
            chi.n(),
            s0.len()
        )));
    }
    let mut code = s0.clone();
    let mut prev = chi.value(&code);
    let mut trace = Vec::with_capacity(max_iters);
    for _ in 0..max_iters {
        code = pmli_step(chi, &code);
        let value = chi.value(&code);
        trace.push(value);
        let change = (value - prev).abs() / prev.abs().max(f64::MIN_POSITIVE);
        prev = value;
        if change < tol {
            break;
        }
    }
    Ok(PmliOutcome {
        iterations: trace.len(),
        code,
        trace,
    })
}

#[derive(Debug, Clone)]
pub struct DinkelbachOutcome {
    pub code: UnimodularCode,
    /// `f` of the start code followed by `f` after every outer step.
    pub f_trace: Vec<f64>,
}

impl DinkelbachOutcome {
    pub fn value(&self) -> f64 {
        *self.f_trace.last().expect("trace is never empty")
    }
}

/// Dinkelbach outer loop around PMLI inner solves for a fixed echo `y`.
pub fn dinkelbach_design(
    y: &CVector,
    s0: &UnimodularCode,
    outer_iters: usize,
    inner_iters: usize,
) -> Result<DinkelbachOutcome> {
    let pair = build_quadratic_pair(y)?;
    let mut code = s0.clone();
    let mut f_star = sinr_objective(&code, y)?;
    let mut f_trace = Vec::with_capacity(outer_iters + 1);
    f_trace.push(f_star);
    for _ in 0..outer_iters {
        let chi = build_chi(&pair, f_star)?;
        code = pmli_solve(&chi, &code, inner_iters.max(1), DEFAULT_TOL)?.code;
        f_star = sinr_objective(&code, y)?;
        f_trace.push(f_star);
    }
    Ok(DinkelbachOutcome { code, f_trace })
}

/// Runs [`dinkelbach_design`] from each start and keeps the best final ratio
/// (earliest start wins ties).
pub fn dinkelbach_best_of(
    y: &CVector,
    starts: &[UnimodularCode],
    outer_iters: usize,
    inner_iters: usize,
    exec: Execution,
) -> Result<DinkelbachOutcome> {
    if starts.is_empty() {
        return Err(Error::domain("dinkelbach_best_of needs at least one start"));
    }
    let runs = exec.map_indexed(starts.len(), |i| {
        dinkelbach_design(y, &starts[i], outer_iters, inner_iters)
    });
    let mut best: Option<DinkelbachOutcome> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.value() > b.value()) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one start"))
}
