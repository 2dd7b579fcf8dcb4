//! Crate-wide error type.

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop ({0}, {0}) is not allowed in a simple graph")]
    SelfLoop(usize),

    #[error("node id {id} out of range (graph has {n} nodes)")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("attribute matrix has {got} rows, expected {expected}")]
    AttrRowCount { got: usize, expected: usize },

    #[error("attribute row {row} has width {got}, expected {expected}")]
    AttrWidth {
        row: usize,
        got: usize,
        expected: usize,
    },

    #[error("BFS source {0} is not a member of the restriction set")]
    SourceOutsideRestriction(usize),

    #[error("train fraction {0} must lie strictly between 0 and 1")]
    BadFraction(f64),

    #[error("graph has {m} edges, need at least {min} to split")]
    TooFewEdges { m: usize, min: usize },

    #[error("rounded split would leave an empty side (train {train} of {m} edges)")]
    DegenerateSplit { train: usize, m: usize },

    #[error("cannot sample {requested} negatives: only {available} non-edges exist")]
    NegativesExhausted { requested: usize, available: usize },

    #[error("graph density {0:.3} exceeds 0.5; uniform negative rejection sampling refused")]
    TooDense(f64),

    #[error("fraction list is empty")]
    EmptyFractions,

    #[error("target endpoints must differ (both are {0})")]
    IdenticalEndpoints(usize),

    #[error("node label {label} is outside the label cap {cap}")]
    LabelOutOfRange { label: u32, cap: u32 },

    #[error("subgraph has no labels; run DRNL labeling before transforming")]
    UnlabeledSubgraph,

    #[error("shape mismatch in {op}: {lhs} vs {rhs}")]
    ShapeMismatch {
        op: &'static str,
        lhs: String,
        rhs: String,
    },

    #[error("non-finite value rejected in {0}")]
    NonFinite(&'static str),

    #[error("empty batch")]
    EmptyBatch,

    #[error("backward called on an empty tape; record a forward pass first")]
    BackwardWithoutForward,

    #[error("learning rate must be positive (got {0})")]
    BadLearningRate(f64),

    #[error("input width {got} does not match model input width {expected}")]
    WidthMismatch { got: usize, expected: usize },

    #[error("training set contains a single class; need both positives and negatives")]
    SingleClass,

    #[error("one side of the ranking is empty (pos {n_pos}, neg {n_neg})")]
    EmptyRankingSide { n_pos: usize, n_neg: usize },

    #[error("no positive labels in the ranking")]
    NoPositives,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error in {path}: {msg}")]
    Data { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Convenience constructor for configuration errors.
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for errors caused by unreadable or malformed input data, as
    /// opposed to an invalid configuration.
    pub fn is_data_error(&self) -> bool {
        matches!(self, Error::Data { .. } | Error::Io(_) | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
