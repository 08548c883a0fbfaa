//! Density matrices: mixtures, partial trace, purity, mixedness checks.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::state::{StateVector, ALGEBRA_TOL, MAX_QUBITS};

/// Dense `2^n x 2^n` Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Vec<Complex64>, // row-major
    n: usize,
}

impl DensityMatrix {
    /// Builds from raw row-major entries, validating all invariants:
    /// Hermitian and unit trace within `1e-10`, eigenvalues >= `-1e-10`.
    pub fn new(entries: Vec<Complex64>, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let dim = 1usize << n;
        if entries.len() != dim * dim {
            return Err(Error::InvalidDensity(format!(
                "expected {} entries for {} qubits, got {}",
                dim * dim,
                n,
                entries.len()
            )));
        }
        let rho = Self { entries, n };
        rho.validate()?;
        Ok(rho)
    }

    /// `|psi><psi|`.
    pub fn from_pure(state: &StateVector) -> Self {
        let dim = state.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for col in 0..dim {
                entries.push(state.amplitude(r) * state.amplitude(col).conj());
            }
        }
        Self {
            entries,
            n: state.n_qubits(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// `tr(rho^2)`; for Hermitian matrices this is the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(Complex64::norm_sqr).sum()
    }

    /// Max-norm distance from `I / 2^n`.
    pub fn distance_from_maximally_mixed(&self) -> f64 {
        let uniform = 1.0 / self.dim() as f64;
        let mut worst = 0.0f64;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                let target = if r == c { uniform } else { 0.0 };
                worst = worst.max((self.entry(r, c) - target).norm());
            }
        }
        worst
    }

    pub fn is_maximally_mixed(&self, tol: f64) -> bool {
        self.distance_from_maximally_mixed() <= tol
    }

    /// Reduced matrix on `keep` (deduplicated, result qubits ordered by
    /// original index). Errors on an empty or out-of-range keep set.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.is_empty() || kept.len() != keep.len() || *kept.last().unwrap() >= self.n {
            return Err(Error::InvalidKeepSet);
        }
        let traced: Vec<usize> = (0..self.n).filter(|q| !kept.contains(q)).collect();

        let k = kept.len();
        let kdim = 1usize << k;
        let tdim = 1usize << traced.len();
        // Scatter sub-index bits back to their original (big-endian) positions.
        let expand = |positions: &[usize], sub: usize| -> usize {
            let mut full = 0usize;
            for (rank, &q) in positions.iter().enumerate() {
                let bit = (sub >> (positions.len() - 1 - rank)) & 1;
                full |= bit << (self.n - 1 - q);
            }
            full
        };

        let mut entries = vec![Complex64::ZERO; kdim * kdim];
        for row in 0..kdim {
            for col in 0..kdim {
                let mut sum = Complex64::ZERO;
                for z in 0..tdim {
                    let zfull = expand(&traced, z);
                    sum += self.entry(expand(&kept, row) | zfull, expand(&kept, col) | zfull);
                }
                entries[row * kdim + col] = sum;
            }
        }
        Ok(DensityMatrix { entries, n: k })
    }

    /// Checks the type invariants: Hermiticity and unit trace within
    /// [`ALGEBRA_TOL`], smallest eigenvalue >= `-ALGEBRA_TOL`.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        for r in 0..dim {
            for c in 0..dim {
                if (self.entry(r, c) - self.entry(c, r).conj()).norm() > ALGEBRA_TOL {
                    return Err(Error::InvalidDensity(format!(
                        "not Hermitian at ({r}, {c})"
                    )));
                }
            }
        }
        let trace = self.trace();
        if (trace.re - 1.0).abs() > ALGEBRA_TOL || trace.im.abs() > ALGEBRA_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        let min = self.min_eigenvalue();
        if min < -ALGEBRA_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// Smallest eigenvalue, via the real-symmetric embedding
    /// `H = A + iB  ->  [[A, -B], [B, A]]` (each eigenvalue of `H` appears
    /// twice in the embedding).
    pub fn min_eigenvalue(&self) -> f64 {
        let dim = self.dim();
        let embedded = nalgebra::DMatrix::from_fn(2 * dim, 2 * dim, |r, c| {
            let (block_r, block_c) = (r / dim, c / dim);
            let e = self.entry(r % dim, c % dim);
            match (block_r, block_c) {
                (0, 0) | (1, 1) => e.re,
                (0, 1) => -e.im,
                _ => e.im,
            }
        });
        embedded
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// `rho = sum_i w_i |psi_i><psi_i|`.
///
/// Weights must be non-negative and sum to 1 within `1e-10`; all states must
/// share a qubit count.
pub fn density_from_mixture(components: &[(f64, StateVector)]) -> Result<DensityMatrix> {
    let total: f64 = components.iter().map(|(w, _)| *w).sum();
    if components.is_empty()
        || components.iter().any(|(w, _)| *w < 0.0)
        || (total - 1.0).abs() > ALGEBRA_TOL
    {
        return Err(Error::InvalidMixture(total));
    }
    let n = components[0].1.n_qubits();
    if components.iter().any(|(_, s)| s.n_qubits() != n) {
        return Err(Error::InvalidDensity(
            "mixture components differ in qubit count".into(),
        ));
    }
    let dim = 1usize << n;
    let mut entries = vec![Complex64::ZERO; dim * dim];
    for (w, state) in components {
        for r in 0..dim {
            for c in 0..dim {
                entries[r * dim + c] += *w * state.amplitude(r) * state.amplitude(c).conj();
            }
        }
    }
    Ok(DensityMatrix { entries, n })
}

/// `I / 2^n`.
pub fn maximally_mixed(n: usize) -> Result<DensityMatrix> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    let dim = 1usize << n;
    let mut entries = vec![Complex64::ZERO; dim * dim];
    for i in 0..dim {
        entries[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
    }
    Ok(DensityMatrix { entries, n })
}
