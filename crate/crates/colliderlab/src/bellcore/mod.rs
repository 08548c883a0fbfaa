//! Bell-type experiments on the dense simulator.
//!
//! Builds and runs the V-shaped preparation experiment (fixed or uniformly
//! random initial state), the W-shaped delayed-choice entanglement-swapping
//! experiment (unselected, postselected, or constrained joint outcome), and
//! teleportation under a locked joint outcome, producing [`Ensemble`]s for
//! the statistics layer.

mod bell;
mod ensemble;
mod exact;
mod experiments;
mod settings;

pub use bell::{
    bell_correction, bell_measure, bell_outcome_probability, bell_state, collapse_bell, BellIndex,
};
pub use ensemble::{no_signalling, Ensemble, NoSignallingReport, RunRecord, Selection};
pub use exact::{
    bin_weights, pair_conditionals, preparation_conditionals, swap_conditionals, swap_joint,
    swap_source, BinWeights, PairConditional, SwapJoint,
};
pub use experiments::{
    random_qubit, run_v_fixed, run_v_uniform, run_w, teleport_constrained, teleport_fidelity,
    UniformVRun, WMode,
};
pub use settings::SettingsMap;
