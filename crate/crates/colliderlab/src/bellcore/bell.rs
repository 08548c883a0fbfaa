//! The Bell basis: states, joint projective measurement, Pauli frame.
//!
//! Index convention, fixed once for the whole crate:
//!
//! ```text
//! 0 -> (|00> + |11>)/sqrt(2)      1 -> (|00> - |11>)/sqrt(2)
//! 2 -> (|01> + |10>)/sqrt(2)      3 -> (|01> - |10>)/sqrt(2)
//! ```

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{norm_sqr_of, qubit_mask, StateVector, PROJECTION_FLOOR};
use crate::rng::TrialRng;

/// Label in `{0,1,2,3}`: a Bell-measurement outcome or a preparation choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct BellIndex(u8);

impl BellIndex {
    pub const ALL: [BellIndex; 4] = [BellIndex(0), BellIndex(1), BellIndex(2), BellIndex(3)];

    pub fn new(value: u8) -> Result<Self> {
        if value > 3 {
            return Err(Error::BellIndexOutOfRange(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        usize::from(self.0)
    }
}

impl std::fmt::Display for BellIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Coefficient of `|kl>` in Bell state `m`, as `coeffs[k][l]`.
pub(crate) fn bell_coeffs(m: BellIndex) -> [[f64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match m.value() {
        0 => [[h, 0.0], [0.0, h]],
        1 => [[h, 0.0], [0.0, -h]],
        2 => [[0.0, h], [h, 0.0]],
        _ => [[0.0, h], [-h, 0.0]],
    }
}

/// Two-qubit Bell state for `index`.
pub fn bell_state(index: BellIndex) -> StateVector {
    let c = bell_coeffs(index);
    let amps = vec![
        Complex64::new(c[0][0], 0.0),
        Complex64::new(c[0][1], 0.0),
        Complex64::new(c[1][0], 0.0),
        Complex64::new(c[1][1], 0.0),
    ];
    StateVector::new(amps).expect("Bell states are normalized by construction")
}

/// Pauli frame `U_m` with `(I ⊗ U_m)|Bell_0> = |Bell_m>`.
///
/// The same frame describes constrained teleportation: with the joint
/// outcome locked to `m`, the output qubit carries `U_m|psi>`, so the
/// correction undoing it is `U_m` transposed-conjugated.
pub fn bell_correction(m: BellIndex) -> [[Complex64; 2]; 2] {
    let o = Complex64::ZERO;
    let l = Complex64::ONE;
    match m.value() {
        0 => [[l, o], [o, l]],
        1 => [[l, o], [o, -l]],
        2 => [[o, l], [l, o]],
        _ => [[o, -l], [l, o]], // X·Z
    }
}

fn check_pair(state: &StateVector, qubits: (usize, usize)) -> Result<()> {
    let n = state.n_qubits();
    if qubits.0 >= n {
        return Err(Error::QubitOutOfRange { qubit: qubits.0, n });
    }
    if qubits.1 >= n || qubits.0 == qubits.1 {
        return Err(Error::QubitOutOfRange { qubit: qubits.1, n });
    }
    Ok(())
}

/// Unnormalized projection of the pair `qubits` onto Bell state `m`.
pub(crate) fn project_bell_raw(
    amps: &[Complex64],
    n: usize,
    qubits: (usize, usize),
    m: BellIndex,
) -> Vec<Complex64> {
    let coeffs = bell_coeffs(m);
    let mask_i = qubit_mask(n, qubits.0);
    let mask_j = qubit_mask(n, qubits.1);
    let mut out = vec![Complex64::ZERO; amps.len()];
    for base in 0..amps.len() {
        if base & (mask_i | mask_j) != 0 {
            continue;
        }
        let mut overlap = Complex64::ZERO;
        for k in 0..2 {
            for l in 0..2 {
                let idx = base | (k * mask_i) | (l * mask_j);
                overlap += coeffs[k][l] * amps[idx];
            }
        }
        for k in 0..2 {
            for l in 0..2 {
                let idx = base | (k * mask_i) | (l * mask_j);
                out[idx] = coeffs[k][l] * overlap;
            }
        }
    }
    out
}

/// Probability that a Bell measurement of `qubits` yields `m`.
pub fn bell_outcome_probability(
    state: &StateVector,
    qubits: (usize, usize),
    m: BellIndex,
) -> Result<f64> {
    check_pair(state, qubits)?;
    Ok(norm_sqr_of(&project_bell_raw(
        state.amplitudes(),
        state.n_qubits(),
        qubits,
        m,
    )))
}

/// Probability of `m` and the renormalized post-measurement state.
pub fn collapse_bell(
    state: &StateVector,
    qubits: (usize, usize),
    m: BellIndex,
) -> Result<(f64, StateVector)> {
    check_pair(state, qubits)?;
    let projected = project_bell_raw(state.amplitudes(), state.n_qubits(), qubits, m);
    let weight = norm_sqr_of(&projected);
    if weight < PROJECTION_FLOOR {
        return Err(Error::ImpossibleOutcome(weight));
    }
    Ok((
        weight,
        StateVector::renormalized(projected, state.n_qubits()),
    ))
}

/// Born-rule joint measurement of `qubits` in the Bell basis.
pub fn bell_measure(
    state: &StateVector,
    qubits: (usize, usize),
    rng: &mut TrialRng,
) -> Result<(BellIndex, StateVector)> {
    check_pair(state, qubits)?;
    let weights: Vec<f64> = BellIndex::ALL
        .iter()
        .map(|&m| bell_outcome_probability(state, qubits, m))
        .collect::<Result<_>>()?;
    let m = BellIndex::ALL[rng.choose_weighted(&weights)];
    let (_, post) = collapse_bell(state, qubits, m)?;
    Ok((m, post))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;

    #[test]
    fn index_zero_amplitudes() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = bell_state(BellIndex::new(0).unwrap());
        let expect = [h, 0.0, 0.0, h];
        for (a, e) in amps.amplitudes().iter().zip(expect) {
            assert!((a.re - e).abs() < 1e-15 && a.im == 0.0);
        }
        assert!(BellIndex::new(4).is_err());
    }

    #[test]
    fn bell_states_are_orthonormal() {
        for &m in &BellIndex::ALL {
            for &k in &BellIndex::ALL {
                let overlap = bell_state(m).inner(&bell_state(k)).norm();
                let expect = if m == k { 1.0 } else { 0.0 };
                assert!((overlap - expect).abs() < 1e-14, "{m} vs {k}");
            }
        }
    }

    #[test]
    fn bell_projectors_are_complete() {
        // sum_m |Bell_m><Bell_m| = I_4: projecting any basis state onto all
        // four outcomes recovers unit total weight.
        for basis in 0..4 {
            let state = StateVector::basis(2, basis).unwrap();
            let total: f64 = BellIndex::ALL
                .iter()
                .map(|&m| bell_outcome_probability(&state, (0, 1), m).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenstate_measurement_is_certain() {
        let psi_plus = bell_state(BellIndex::new(2).unwrap());
        let stream = RandomStream::from_seed(31);
        for t in 0..64 {
            let mut rng = stream.trial(t);
            let (m, _) = bell_measure(&psi_plus, (0, 1), &mut rng).unwrap();
            assert_eq!(m.value(), 2);
        }
    }

    #[test]
    fn swap_input_outcomes_are_uniform() {
        // Oracle: amplitude arithmetic gives p(m) = 1/4 for the middle pair
        // of |Bell_0> ⊗ |Bell_0>.
        let zero = BellIndex::new(0).unwrap();
        let w = bell_state(zero).tensor(&bell_state(zero)).unwrap();
        for &m in &BellIndex::ALL {
            let p = bell_outcome_probability(&w, (1, 2), m).unwrap();
            assert!((p - 0.25).abs() < 1e-14, "m = {m}");
        }
    }

    #[test]
    fn swapping_identity_exact() {
        // Projecting the middle pair of |Bell_0> ⊗ |Bell_0> onto Bell_m
        // collapses the outer pair onto Bell_m itself: entanglement swapping
        // with an identity correction frame under this index convention.
        let zero = BellIndex::new(0).unwrap();
        let w = bell_state(zero).tensor(&bell_state(zero)).unwrap();
        for &m in &BellIndex::ALL {
            let (_, post) = collapse_bell(&w, (1, 2), m).unwrap();
            let outer = bell_state(m);
            let fidelity = {
                // Project outer-pair amplitudes: post has middles in Bell_m,
                // so overlap with bell_m ⊗ ... check via full inner product
                // against bell_m(outer) ⊗ bell_m(middle) rearranged by qubit
                // position (0,3 outer / 1,2 middle).
                let mut overlap = Complex64::ZERO;
                let coeffs = bell_coeffs(m);
                for outer_idx in 0..4 {
                    let (o0, o3) = (outer_idx >> 1, outer_idx & 1);
                    for mid_idx in 0..4 {
                        let (m1, m2) = (mid_idx >> 1, mid_idx & 1);
                        let full = (o0 << 3) | (m1 << 2) | (m2 << 1) | o3;
                        let amp = outer.amplitude(outer_idx) * coeffs[m1][m2];
                        overlap += amp.conj() * post.amplitude(full);
                    }
                }
                overlap.norm()
            };
            assert!((fidelity - 1.0).abs() < 1e-10, "m = {m}");
        }
    }

    #[test]
    fn correction_frame_maps_bell_zero_to_each_state() {
        let zero = BellIndex::new(0).unwrap();
        for &m in &BellIndex::ALL {
            let rotated = bell_state(zero)
                .apply_one_qubit(1, &bell_correction(m))
                .unwrap();
            assert!((rotated.fidelity(&bell_state(m)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_checks_reject_bad_qubits() {
        let state = bell_state(BellIndex::new(0).unwrap());
        assert!(bell_outcome_probability(&state, (0, 0), BellIndex::ALL[0]).is_err());
        assert!(bell_outcome_probability(&state, (0, 2), BellIndex::ALL[0]).is_err());
    }
}
