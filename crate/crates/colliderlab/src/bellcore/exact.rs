//! Exact outcome distributions computed from amplitudes.
//!
//! These tables drive constrained sampling, the classical toy model's bin
//! weights, and the oracle side of many statistical checks. Everything here
//! is projection arithmetic on state vectors; no sampling.

use crate::error::{Error, Result};
use crate::qcore::{norm_sqr_of, project_qubit_raw, StateVector};

use super::bell::{bell_state, project_bell_raw, BellIndex};
use super::settings::SettingsMap;

/// `p(A, B | a, b)` indexed as `[a][b][A][B]`.
pub type PairConditional = [[[[f64; 2]; 2]; 2]; 2];

/// `p(m, A, B | a, b)` indexed as `[a][b][m][A][B]`.
pub type SwapJoint = [[[[[f64; 2]; 2]; 4]; 2]; 2];

/// `q(m | a, b, A, B)` indexed as `[a][b][A][B][m]`.
pub type BinWeights = [[[[[f64; 4]; 2]; 2]; 2]; 2];

/// Exact wing-outcome conditionals for a two-qubit state measured at the
/// mapped angles (qubit 0 by Alice, qubit 1 by Bob).
pub fn pair_conditionals(state: &StateVector, settings: &SettingsMap) -> Result<PairConditional> {
    if state.n_qubits() != 2 {
        return Err(Error::QubitOutOfRange {
            qubit: 2,
            n: state.n_qubits(),
        });
    }
    let mut table = [[[[0.0; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for outcome_a in 0..2u8 {
                let after_a = project_qubit_raw(
                    state.amplitudes(),
                    2,
                    0,
                    settings.alice_setting(a as u8).basis_vector(outcome_a),
                );
                for outcome_b in 0..2u8 {
                    let after_b = project_qubit_raw(
                        &after_a,
                        2,
                        1,
                        settings.bob_setting(b as u8).basis_vector(outcome_b),
                    );
                    table[a][b][outcome_a as usize][outcome_b as usize] = norm_sqr_of(&after_b);
                }
            }
        }
    }
    Ok(table)
}

/// Conditionals for preparation `c`: `p(A, B | a, b)` on `bell_state(c)`.
pub fn preparation_conditionals(c: BellIndex, settings: &SettingsMap) -> PairConditional {
    pair_conditionals(&bell_state(c), settings).expect("Bell states have two qubits")
}

/// The four-qubit swap experiment Bell_0 ⊗ Bell_0 with qubit roles
/// (0: Alice wing, 1 and 2: joint measurement, 3: Bob wing).
pub fn swap_source() -> StateVector {
    let zero = BellIndex::ALL[0];
    bell_state(zero)
        .tensor(&bell_state(zero))
        .expect("four qubits within limit")
}

/// Exact joint distribution `p(m, A, B | a, b)` of the swap experiment.
pub fn swap_joint(settings: &SettingsMap) -> SwapJoint {
    let source = swap_source();
    let mut table = [[[[[0.0; 2]; 2]; 4]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for outcome_a in 0..2u8 {
                let after_a = project_qubit_raw(
                    source.amplitudes(),
                    4,
                    0,
                    settings.alice_setting(a as u8).basis_vector(outcome_a),
                );
                for outcome_b in 0..2u8 {
                    let after_b = project_qubit_raw(
                        &after_a,
                        4,
                        3,
                        settings.bob_setting(b as u8).basis_vector(outcome_b),
                    );
                    for &m in &BellIndex::ALL {
                        let projected = project_bell_raw(&after_b, 4, (1, 2), m);
                        table[a][b][m.index()][outcome_a as usize][outcome_b as usize] =
                            norm_sqr_of(&projected);
                    }
                }
            }
        }
    }
    table
}

/// `p(A, B | a, b, M = m)` in the swap experiment.
pub fn swap_conditionals(m: BellIndex, settings: &SettingsMap) -> PairConditional {
    let joint = swap_joint(settings);
    let mut table = [[[[0.0; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let p_m: f64 = (0..2)
                .flat_map(|x| (0..2).map(move |y| (x, y)))
                .map(|(x, y)| joint[a][b][m.index()][x][y])
                .sum();
            for x in 0..2 {
                for y in 0..2 {
                    table[a][b][x][y] = joint[a][b][m.index()][x][y] / p_m;
                }
            }
        }
    }
    table
}

/// Bayes weights `q(m | a, b, A, B)` for sorting wing records into bins.
pub fn bin_weights(settings: &SettingsMap) -> BinWeights {
    let joint = swap_joint(settings);
    let mut table = [[[[[0.0; 4]; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    let p_xy: f64 = (0..4).map(|m| joint[a][b][m][x][y]).sum();
                    for m in 0..4 {
                        table[a][b][x][y][m] = joint[a][b][m][x][y] / p_xy;
                    }
                }
            }
        }
    }
    table
}
