//! Dense state vectors for up to [`MAX_QUBITS`] qubits.
//!
//! Qubit ordering is big-endian: qubit 0 selects the most significant bit of
//! the amplitude index, so `|q0 q1 ... q(n-1)>` lives at index
//! `q0*2^(n-1) + ... + q(n-1)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest system handled by the dense kernel.
pub const MAX_QUBITS: usize = 4;

/// Tolerance for algebraic identities (normalization, Hermiticity, trace).
pub const ALGEBRA_TOL: f64 = 1e-10;

/// Normalized pure state on `n` qubits, `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    n: usize,
}

/// Bit mask selecting `qubit` within an amplitude index (big-endian).
#[inline]
pub(crate) fn qubit_mask(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

pub(crate) fn norm_sqr_of(amps: &[Complex64]) -> f64 {
    amps.iter().map(Complex64::norm_sqr).sum()
}

fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    Ok(n)
}

impl StateVector {
    /// Validates length, qubit limit, and normalization.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let n = qubit_count(amps.len())?;
        let norm_sqr = norm_sqr_of(&amps);
        if (norm_sqr - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self { amps, n })
    }

    /// Computational basis state `|index>` on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let dim = 1 << n;
        if index >= dim {
            return Err(Error::QubitOutOfRange { qubit: index, n });
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index] = Complex64::ONE;
        Ok(Self { amps, n })
    }

    /// Single qubit `alpha|0> + beta|1>`.
    pub fn qubit(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::new(vec![alpha, beta])
    }

    /// Renormalizes raw amplitudes; weight is the squared norm before
    /// renormalization. Callers guard against vanishing weight.
    pub(crate) fn renormalized(mut amps: Vec<Complex64>, n: usize) -> Self {
        let norm = norm_sqr_of(&amps).sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Self { amps, n }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr_of(&self.amps)
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Kronecker product; `self` occupies the more significant qubits.
    pub fn tensor(&self, right: &Self) -> Result<Self> {
        let n = self.n + right.n;
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let mut amps = Vec::with_capacity(self.dim() * right.dim());
        for a in &self.amps {
            for b in &right.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { amps, n })
    }

    /// Applies a 2x2 unitary to one qubit.
    pub fn apply_one_qubit(&self, qubit: usize, u: &[[Complex64; 2]; 2]) -> Result<Self> {
        if qubit >= self.n {
            return Err(Error::QubitOutOfRange { qubit, n: self.n });
        }
        let mask = qubit_mask(self.n, qubit);
        let mut amps = self.amps.clone();
        for i in 0..self.dim() {
            if i & mask == 0 {
                let j = i | mask;
                let (a0, a1) = (self.amps[i], self.amps[j]);
                amps[i] = u[0][0] * a0 + u[0][1] * a1;
                amps[j] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        Ok(Self { amps, n: self.n })
    }
}
