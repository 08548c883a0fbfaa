//! Projective measurement in a rotated real-plane basis.
//!
//! A setting angle θ fixes the orthonormal basis
//! `e0 = cosθ|0> + sinθ|1>`, `e1 = -sinθ|0> + cosθ|1>`; outcome `k`
//! projects onto `e_k`. θ and θ+π give the same projectors, so angles are
//! canonicalized into `[0, π)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::TrialRng;

use super::state::{norm_sqr_of, qubit_mask, StateVector};

/// Projection weights below this floor mark an outcome as impossible;
/// asking for its post-state signals a logic error upstream.
pub const PROJECTION_FLOOR: f64 = 1e-14;

/// One-angle measurement basis in the real plane of the computational basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    angle: f64,
}

impl MeasurementSetting {
    pub fn new(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::NonFiniteAngle);
        }
        Ok(Self {
            angle: angle.rem_euclid(std::f64::consts::PI),
        })
    }

    /// Canonical angle in `[0, π)`.
    pub fn angle(self) -> f64 {
        self.angle
    }

    /// Basis vector for `outcome` as `(|0> component, |1> component)`.
    pub fn basis_vector(self, outcome: u8) -> [f64; 2] {
        let (sin, cos) = self.angle.sin_cos();
        match outcome {
            0 => [cos, sin],
            _ => [-sin, cos],
        }
    }
}

/// Unnormalized projection of `qubit` onto the real two-vector `e`.
pub(crate) fn project_qubit_raw(
    amps: &[Complex64],
    n: usize,
    qubit: usize,
    e: [f64; 2],
) -> Vec<Complex64> {
    let mask = qubit_mask(n, qubit);
    let mut out = vec![Complex64::ZERO; amps.len()];
    for i in 0..amps.len() {
        if i & mask == 0 {
            let j = i | mask;
            let overlap = amps[i] * e[0] + amps[j] * e[1];
            out[i] = overlap * e[0];
            out[j] = overlap * e[1];
        }
    }
    out
}

/// Probability of `outcome` and the renormalized post-measurement state.
///
/// Errors with [`Error::ImpossibleOutcome`] when the projection weight is
/// below [`PROJECTION_FLOOR`].
pub fn collapse_angle(
    state: &StateVector,
    qubit: usize,
    setting: MeasurementSetting,
    outcome: u8,
) -> Result<(f64, StateVector)> {
    if qubit >= state.n_qubits() {
        return Err(Error::QubitOutOfRange {
            qubit,
            n: state.n_qubits(),
        });
    }
    let projected = project_qubit_raw(
        state.amplitudes(),
        state.n_qubits(),
        qubit,
        setting.basis_vector(outcome),
    );
    let weight = norm_sqr_of(&projected);
    if weight < PROJECTION_FLOOR {
        return Err(Error::ImpossibleOutcome(weight));
    }
    Ok((weight, StateVector::renormalized(projected, state.n_qubits())))
}

/// Probability that measuring `qubit` at `setting` yields `outcome`.
pub fn outcome_probability(
    state: &StateVector,
    qubit: usize,
    setting: MeasurementSetting,
    outcome: u8,
) -> Result<f64> {
    if qubit >= state.n_qubits() {
        return Err(Error::QubitOutOfRange {
            qubit,
            n: state.n_qubits(),
        });
    }
    let projected = project_qubit_raw(
        state.amplitudes(),
        state.n_qubits(),
        qubit,
        setting.basis_vector(outcome),
    );
    Ok(norm_sqr_of(&projected))
}

/// Born-rule measurement of one qubit in the rotated basis.
pub fn measure_angle(
    state: &StateVector,
    qubit: usize,
    setting: MeasurementSetting,
    rng: &mut TrialRng,
) -> Result<(u8, StateVector)> {
    let p0 = outcome_probability(state, qubit, setting, 0)?;
    let outcome = u8::from(!rng.bernoulli(p0));
    let (_, post) = collapse_angle(state, qubit, setting, outcome)?;
    Ok((outcome, post))
}
