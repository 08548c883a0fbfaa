//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("state on {0} qubits exceeds the {max}-qubit limit", max = crate::qcore::MAX_QUBITS)]
    TooManyQubits(usize),
    #[error("squared norm {0} deviates from 1 beyond tolerance")]
    NotNormalized(f64),
    #[error("qubit index {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("projection weight {0:.3e} below floor; outcome should be impossible")]
    ImpossibleOutcome(f64),
    #[error("mixture weights must be non-negative and sum to 1 (got sum {0})")]
    InvalidMixture(f64),
    #[error("not a valid density matrix: {0}")]
    InvalidDensity(String),
    #[error("keep set must be a non-empty subset of the qubit indices")]
    InvalidKeepSet,
    #[error("measurement angle must be finite")]
    NonFiniteAngle,
    #[error("Bell index {0} out of range 0..=3")]
    BellIndexOutOfRange(u8),
    #[error("trial count must be at least 1")]
    NoTrials,

    #[error("sampling requires an unconstrained model; call sample_constrained instead")]
    ConstraintPresent,
    #[error("operation requires a model with a locked variable")]
    ConstraintMissing,
    #[error("selection predicate matched no rows")]
    EmptySelection,
    #[error("constraint (or constraint plus intervention) has zero probability")]
    InfeasibleConstraint,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("intervention target `{0}` is not an exogenous choice variable")]
    InvalidIntervention(String),
    #[error("value {value} out of domain for variable `{variable}`")]
    ValueOutOfDomain { variable: String, value: usize },
    #[error("row does not satisfy the model's locked constraint")]
    RowViolatesConstraint,
    #[error("variable graph contains a cycle or a forward reference")]
    CyclicGraph,
    #[error("probability parameter {name} = {value} outside (0, 1)")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("no runs recorded for settings stratum (a={a}, b={b})")]
    EmptyStratum { a: u8, b: u8 },
    #[error("dataset lacks required column `{0}`")]
    MissingColumn(String),
    #[error("target probabilities sum to {0}, expected 1")]
    InvalidTarget(f64),
    #[error("ensemble contains no runs")]
    EmptyEnsemble,
    #[error("collider value {found:?} conflicts with selection {expected}")]
    SelectionMismatch { expected: u8, found: Option<u8> },
}
