//! The experiments: V-shaped preparation runs, W-shaped delayed-choice
//! entanglement swapping, and constrained teleportation.
//!
//! Trial loops are embarrassingly parallel: they run over a partition plan
//! with one substream per partition (see [`crate::rng`]), so a fixed
//! `(seed, plan)` reproduces every record bit for bit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{measure_angle, StateVector};
use crate::rng::{run_partitioned, run_partitioned_filtered, RandomStream, TrialRng};

use super::bell::{bell_correction, bell_measure, bell_state, BellIndex};
use super::ensemble::{Ensemble, RunRecord, Selection};
use super::exact::{swap_conditionals, swap_source};
use super::settings::SettingsMap;

/// Handling of the joint measurement in the W-shaped experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WMode {
    /// Keep every run and record the outcome.
    Unselected,
    /// Keep only runs whose outcome equals the target; the trial count is
    /// the number of *kept* runs.
    Postselect(BellIndex),
    /// Lock the outcome: draw directly from the conditional distribution,
    /// so discarded runs never exist.
    Constrained(BellIndex),
}

fn require_trials(n_trials: u64) -> Result<()> {
    if n_trials == 0 {
        return Err(Error::NoTrials);
    }
    Ok(())
}

/// One W trial: wings measured first (the delayed-choice order), then the
/// joint Bell measurement of the middle pair.
fn w_trial(settings: &SettingsMap, rng: &mut TrialRng) -> RunRecord {
    let source = swap_source();
    let a = rng.bit();
    let b = rng.bit();
    let (outcome_a, state) =
        measure_angle(&source, 0, settings.alice_setting(a), rng).expect("valid wing measurement");
    let (outcome_b, state) =
        measure_angle(&state, 3, settings.bob_setting(b), rng).expect("valid wing measurement");
    let (m, _) = bell_measure(&state, (1, 2), rng).expect("valid joint measurement");
    RunRecord {
        setting_a: a,
        setting_b: b,
        outcome_a,
        outcome_b,
        collider: Some(m),
    }
}

/// Runs the W-shaped delayed-choice swap experiment.
pub fn run_w(
    mode: WMode,
    n_trials: u64,
    settings: &SettingsMap,
    stream: &RandomStream,
    partitions: u32,
) -> Result<Ensemble> {
    require_trials(n_trials)?;
    let (runs, selection) = match mode {
        WMode::Unselected => (
            run_partitioned(stream, n_trials, partitions, |rng| w_trial(settings, rng)),
            Selection::Unselected,
        ),
        WMode::Postselect(m) => (
            run_partitioned_filtered(stream, n_trials, partitions, |rng| {
                let record = w_trial(settings, rng);
                (record.collider == Some(m)).then_some(record)
            }),
            Selection::Postselected(m),
        ),
        WMode::Constrained(m) => {
            // The boundary-constrained collider: sample (A, B) from the exact
            // conditional given M = m, computed from amplitudes. No rejected
            // runs are drawn because none exist under the constraint.
            let conditional = swap_conditionals(m, settings);
            let runs = run_partitioned(stream, n_trials, partitions, |rng| {
                let a = rng.bit();
                let b = rng.bit();
                let cells = &conditional[usize::from(a)][usize::from(b)];
                let flat = [cells[0][0], cells[0][1], cells[1][0], cells[1][1]];
                let pick = rng.choose_weighted(&flat);
                RunRecord {
                    setting_a: a,
                    setting_b: b,
                    outcome_a: (pick >> 1) as u8,
                    outcome_b: (pick & 1) as u8,
                    collider: Some(m),
                }
            });
            (runs, Selection::Constrained(m))
        }
    };
    Ensemble::new(runs, selection, *settings)
}

fn v_trial(c: BellIndex, settings: &SettingsMap, rng: &mut TrialRng) -> RunRecord {
    let state = bell_state(c);
    let a = rng.bit();
    let b = rng.bit();
    let (outcome_a, state) =
        measure_angle(&state, 0, settings.alice_setting(a), rng).expect("valid wing measurement");
    let (outcome_b, _) =
        measure_angle(&state, 1, settings.bob_setting(b), rng).expect("valid wing measurement");
    RunRecord {
        setting_a: a,
        setting_b: b,
        outcome_a,
        outcome_b,
        collider: Some(c),
    }
}

/// V-shaped experiment with the preparation held fixed at `c`.
pub fn run_v_fixed(
    c: BellIndex,
    n_trials: u64,
    settings: &SettingsMap,
    stream: &RandomStream,
    partitions: u32,
) -> Result<Ensemble> {
    require_trials(n_trials)?;
    let runs = run_partitioned(stream, n_trials, partitions, |rng| v_trial(c, settings, rng));
    Ensemble::new(runs, Selection::Preselected(c), *settings)
}

/// Output of the randomized-preparation V experiment.
#[derive(Debug, Clone)]
pub struct UniformVRun {
    /// All runs, preparation recorded but not selected on.
    pub unselected: Ensemble,
    /// The four postselections of the same run stream, by preparation.
    pub selected: [Ensemble; 4],
}

/// V-shaped experiment with the preparation drawn uniformly per trial and
/// recorded, as with a register read out only after the wing measurements.
pub fn run_v_uniform(
    n_trials: u64,
    settings: &SettingsMap,
    stream: &RandomStream,
    partitions: u32,
) -> Result<UniformVRun> {
    require_trials(n_trials)?;
    let runs = run_partitioned(stream, n_trials, partitions, |rng| {
        let c = BellIndex::ALL[(rng.next_u64() % 4) as usize];
        v_trial(c, settings, rng)
    });
    let unselected = Ensemble::new(runs, Selection::Unselected, *settings)?;
    let selected = BellIndex::ALL.map(|m| unselected.postselect(m));
    Ok(UniformVRun {
        unselected,
        selected,
    })
}

/// Teleportation under a locked joint outcome.
///
/// Prepares `input ⊗ Bell_0` (input on qubit 0), projects qubits (0, 1)
/// onto Bell state `locked_m`, and returns the state of qubit 2. With
/// `locked_m = 0` the required correction is the identity, so the output
/// reproduces the input exactly with no classical signal. For other locked
/// values the output is `U_m |input>`; pass `apply_correction` to undo the
/// frame, otherwise the fidelity falls below 1 for generic inputs.
pub fn teleport_constrained(
    input: &StateVector,
    locked_m: BellIndex,
    apply_correction: bool,
) -> Result<StateVector> {
    if input.n_qubits() != 1 {
        return Err(Error::QubitOutOfRange {
            qubit: 1,
            n: input.n_qubits(),
        });
    }
    let joint = input.tensor(&bell_state(BellIndex::ALL[0]))?;
    let projected = super::bell::collapse_bell(&joint, (0, 1), locked_m)?.1;
    // Qubit 2 is pure after the projection; read it off the branch with
    // qubits (0, 1) in their leading nonzero component.
    let out = extract_last_qubit(&projected)?;
    if apply_correction {
        let u = bell_correction(locked_m);
        let correction = [
            [u[0][0].conj(), u[1][0].conj()],
            [u[0][1].conj(), u[1][1].conj()],
        ];
        out.apply_one_qubit(0, &correction)
    } else {
        Ok(out)
    }
}

/// Reads the state of the final qubit from a 3-qubit vector that is a
/// product of a two-qubit state on (0, 1) and a pure state on qubit 2.
fn extract_last_qubit(state: &StateVector) -> Result<StateVector> {
    let amps = state.amplitudes();
    let mut best = 0;
    let mut best_weight = 0.0;
    for pair in 0..(state.dim() / 2) {
        let weight = amps[2 * pair].norm_sqr() + amps[2 * pair + 1].norm_sqr();
        if weight > best_weight {
            best_weight = weight;
            best = pair;
        }
    }
    let norm = best_weight.sqrt();
    StateVector::new(vec![amps[2 * best] / norm, amps[2 * best + 1] / norm])
}

/// Fidelity of constrained teleportation for a given input.
pub fn teleport_fidelity(
    input: &StateVector,
    locked_m: BellIndex,
    apply_correction: bool,
) -> Result<f64> {
    Ok(teleport_constrained(input, locked_m, apply_correction)?.fidelity(input))
}

/// A random pure qubit `cos(t/2)|0> + e^{i phi} sin(t/2)|1>`.
pub fn random_qubit(rng: &mut TrialRng) -> StateVector {
    let cos_theta = 2.0 * rng.next_f64() - 1.0;
    let half = (cos_theta.acos()) / 2.0;
    let phi = rng.next_f64() * std::f64::consts::TAU;
    StateVector::qubit(
        Complex64::new(half.cos(), 0.0),
        Complex64::from_polar(half.sin(), phi),
    )
    .expect("unit norm by construction")
}
