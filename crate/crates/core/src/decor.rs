//! The unfolded network: `L` layers `z ↦ exp(j·arg(χ_i z))`, each with its own
//! Hermitian positive-definite weight matrix.
//!
//! With all weights tied to one `χ` the forward pass is exactly `L` PMLI steps.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, hermitian_deviation, CMatrix, CVector, ONE};
use crate::signal_model::UnimodularCode;
use crate::uqp_solver::{min_eigenvalue, project_product};

pub const DEFAULT_DEPTH: usize = 30;
/// Entries with modulus at or below this map to phase zero.
pub const ARG_ZERO_FLOOR: f64 = 1e-300;
pub const CHECKPOINT_MAGIC: &str = "decor-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Entrywise unit-modulus projection `S(x) = exp(j·arg(x))`.
pub fn activation(u: &CVector) -> CVector {
    u.map(|z| {
        let r = z.norm();
        if r <= ARG_ZERO_FLOOR { ONE } else { z / r }
    })
}

/// Per-layer weights `Ω = {χ_0, …, χ_{L-1}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecorParams {
    n: usize,
    layers: Vec<CMatrix>,
}

impl DecorParams {
    /// Validates that every layer is `n × n`, Hermitian and positive definite.
    pub fn new(layers: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = layers.first() else {
            return Err(Error::domain("network depth must be >= 1"));
        };
        let n = first.nrows();
        for (i, layer) in layers.iter().enumerate() {
            if layer.shape() != (n, n) {
                return Err(Error::domain(format!(
                    "layer {i} has shape {:?}, expected {n}x{n}",
                    layer.shape()
                )));
            }
            match hermitian_deviation(layer) {
                Some(d) if d <= 1e-12 => {}
                _ => return Err(Error::domain(format!("layer {i} is not Hermitian"))),
            }
            let lambda = min_eigenvalue(layer)?;
            if !(lambda > 0.0 && lambda >= 1e-12 * frobenius_norm(layer)) {
                return Err(Error::domain(format!(
                    "layer {i} is not positive definite (min eigenvalue {lambda:e})"
                )));
            }
        }
        Ok(Self { n, layers })
    }

    /// `depth` identity layers.
    pub fn identity(n: usize, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::domain("network depth must be >= 1"));
        }
        if n == 0 {
            return Err(Error::domain("code length must be >= 1"));
        }
        Ok(Self {
            n,
            layers: vec![CMatrix::identity(n, n); depth],
        })
    }

    /// Adds one PSD increment per layer. PD plus PSD stays PD, so no
    /// re-validation happens here.
    pub(crate) fn perturbed(&self, increments: &[CMatrix]) -> Self {
        debug_assert_eq!(increments.len(), self.layers.len());
        Self {
            n: self.n,
            layers: self
                .layers
                .iter()
                .zip(increments)
                .map(|(l, d)| l + d)
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[CMatrix] {
        &self.layers
    }

    /// `s_L = g_{L-1} ∘ … ∘ g_0 (s_0)`.
    pub fn forward(&self, s0: &UnimodularCode) -> Result<UnimodularCode> {
        self.check_input(s0)?;
        let mut z = s0.as_vector().clone();
        for layer in &self.layers {
            z = project_product(layer, &z);
        }
        Ok(UnimodularCode::from_projection(z))
    }

    /// Outputs of every layer, in order.
    pub fn forward_layers(&self, s0: &UnimodularCode) -> Result<Vec<UnimodularCode>> {
        self.check_input(s0)?;
        let mut z = s0.as_vector().clone();
        let mut outputs = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            z = project_product(layer, &z);
            outputs.push(UnimodularCode::from_projection(z.clone()));
        }
        Ok(outputs)
    }

    fn check_input(&self, s0: &UnimodularCode) -> Result<()> {
        if s0.len() != self.n {
            return Err(Error::domain(format!(
                "network expects codes of length {}, got {}",
                self.n,
                s0.len()
            )));
        }
        Ok(())
    }

    /// Text checkpoint: a four-line header (magic, `version`, `n`, `depth`)
    /// followed by, for each layer, a `layer i` line and `n` rows of
    /// space-separated `re im` pairs.
    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CHECKPOINT_MAGIC}")?;
        writeln!(w, "version {CHECKPOINT_VERSION}")?;
        writeln!(w, "n {}", self.n)?;
        writeln!(w, "depth {}", self.layers.len())?;
        for (i, layer) in self.layers.iter().enumerate() {
            writeln!(w, "layer {i}")?;
            for r in 0..self.n {
                let row: Vec<String> = (0..self.n)
                    .map(|c| {
                        let z = layer[(r, c)];
                        format!("{:?} {:?}", z.re, z.im)
                    })
                    .collect();
                writeln!(w, "{}", row.join(" "))?;
            }
        }
        Ok(())
    }

    pub fn read_checkpoint<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, Ok(l))) => Ok((i + 1, l)),
                Some((i, Err(e))) => Err(Error::Checkpoint(format!("line {}: {e}", i + 1))),
                None => Err(Error::Checkpoint(format!("unexpected end of file, expected {what}"))),
            }
        };
        let (ln, magic) = next("header")?;
        if magic.trim() != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint(format!("line {ln}: not a checkpoint file")));
        }
        let header = |line: (usize, String), key: &str| -> Result<usize> {
            let (ln, text) = line;
            let mut parts = text.split_whitespace();
            match (parts.next(), parts.next().and_then(|v| v.parse().ok()), parts.next()) {
                (Some(k), Some(v), None) if k == key => Ok(v),
                _ => Err(Error::Checkpoint(format!("line {ln}: expected `{key} <integer>`"))),
            }
        };
        let version = header(next("version")?, "version")?;
        if version != CHECKPOINT_VERSION as usize {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let n = header(next("n")?, "n")?;
        let depth = header(next("depth")?, "depth")?;
        let mut layers = Vec::with_capacity(depth);
        for i in 0..depth {
            let idx = header(next("layer marker")?, "layer")?;
            if idx != i {
                return Err(Error::Checkpoint(format!("expected layer {i}, found layer {idx}")));
            }
            let mut m = CMatrix::zeros(n, n);
            for row in 0..n {
                let (ln, text) = next("matrix row")?;
                let values: Vec<f64> = text
                    .split_whitespace()
                    .map(|v| v.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Checkpoint(format!("line {ln}: {e}")))?;
                if values.len() != 2 * n {
                    return Err(Error::Checkpoint(format!(
                        "line {ln}: expected {} numbers, found {}",
                        2 * n,
                        values.len()
                    )));
                }
                for col in 0..n {
                    m[(row, col)] = Complex64::new(values[2 * col], values[2 * col + 1]);
                }
            }
            layers.push(m);
        }
        Self::new(layers)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_checkpoint(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_checkpoint(BufReader::new(file))
    }
}
