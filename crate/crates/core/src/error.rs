use thiserror::Error;

/// Errors produced anywhere in the estimation and bounding pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on node `{label}`")]
    SelfLoop { line: usize, label: String },

    #[error("line {line}: duplicate edge `{u}`-`{v}`")]
    DuplicateEdge { line: usize, u: String, v: String },

    #[error("node `{0}` has no incident edges")]
    IsolatedNode(String),

    #[error("edge `{u}`-`{v}` has non-positive weight {weight}")]
    NonPositiveWeight { u: String, v: String, weight: f64 },

    #[error("could not generate a graph without isolated nodes after {0} attempts")]
    DegenerateGraph(usize),

    #[error("node index {index} out of range for graph with {n} nodes")]
    Index { index: usize, n: usize },

    #[error("member {0} of the egonet has non-positive degree")]
    DegenerateDegree(usize),

    #[error("moment order {k} exceeds 2r+1 = {max} for radius {radius}")]
    OrderOutOfRange { k: usize, radius: usize, max: usize },

    #[error("cannot draw {count} distinct nodes from a graph with {n} nodes")]
    SampleTooLarge { count: usize, n: usize },

    #[error("confidence must lie strictly between 0 and 1, got {0}")]
    ConfidenceRange(f64),

    #[error("{0}")]
    Range(String),

    #[error("eigensolver did not converge within {0} sweeps")]
    Convergence(usize),

    #[error("matrix has no numerically nonzero eigenvalues")]
    Rank,

    #[error("moment matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    InfeasibleMoments { min_eigenvalue: f64 },

    #[error("upper-bound program has no feasible point in [{lower}, {upper}]")]
    NoFeasiblePoint { lower: f64, upper: f64 },

    #[error("every point of the moment box is moment-infeasible")]
    EmptyBox,

    #[error("problem size {n} exceeds the oracle cap of {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
