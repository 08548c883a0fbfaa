//! A desk-scale laboratory for selection effects in quantum and classical
//! experiments.
//!
//! The crate pairs two engines behind a shared statistics layer:
//!
//! * [`qcore`] / [`bellcore`] — a dense few-qubit simulator and the Bell-type
//!   experiments built on it: V-shaped runs with fixed or randomized
//!   preparation, W-shaped delayed-choice entanglement swapping with
//!   unselected, postselected, or boundary-constrained joint outcomes, and
//!   constrained teleportation.
//! * [`scm`] — finite structural causal models with colliders, conditioning,
//!   locked variables, and two counterfactual semantics, plus builders for
//!   the matching classical models.
//! * [`stats`] — frequency tables, correlators, CHSH values, chi-square and
//!   independence tests shared by both sides.
//! * [`rng`] — deterministic counter-based random streams keyed by
//!   `(seed, partition, trial)`, so every experiment is reproducible bit for
//!   bit under any degree of parallelism.

pub mod bellcore;
pub mod error;
pub mod qcore;
pub mod rng;
pub mod scm;
pub mod stats;

pub use error::{Error, Result};
