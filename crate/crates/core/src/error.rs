use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed fan: {0}")]
    MalformedFan(String),

    #[error("fan is not complete: no maximal cone contains {0:?}")]
    NotComplete(Vec<String>),

    #[error("galois group exceeds {cap} elements; the action is not finite or is pathological")]
    GroupTooLarge { cap: usize },

    #[error("galois action is not compatible with the fan: {0}")]
    IncompatibleAction(String),

    #[error("cohomology is only implemented for cyclic groups (group of order {order} is not cyclic)")]
    NonCyclicGroup { order: usize },

    #[error("operation requires a split fan (no galois action)")]
    NonSplit,

    #[error("lattice computation failed: {0}")]
    Lattice(String),

    #[error("cone is not full-dimensional (rank {rank} < {dim})")]
    NotFullDimensional { rank: usize, dim: usize },

    #[error("cone is not pointed")]
    NotPointed,

    #[error("anticanonical class is not in the interior of the effective cone")]
    AnticanonicalNotInterior,

    #[error("evaluation point is a pole: {0}")]
    Pole(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge (partial value {partial}, estimated error {error:e})")]
    Quadrature { partial: f64, error: f64 },

    #[error("zero coordinate in torus point")]
    ZeroCoordinate,

    #[error("prime cutoff {cutoff} is too small: {reason}")]
    CutoffTooSmall { cutoff: u64, reason: String },

    #[error("search space estimate {estimate:e} exceeds budget {budget:e}")]
    BudgetExceeded { estimate: f64, budget: f64 },

    #[error("no specialized enumerator registered for this fan")]
    UnregisteredFan,

    #[error("insufficient schedule: {0}")]
    InsufficientSchedule(String),
}
