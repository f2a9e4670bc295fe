use thiserror::Error;

/// Everything that can go wrong between reading a benchmark and writing a report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid DP-curve: {0}")]
    InvalidCurve(String),

    #[error("curve length mismatch: module curve has {curve} points, level-shifter curve has {ls}")]
    CurveLengthMismatch { curve: usize, ls: usize },

    #[error("netlist is not acyclic (cycle through module {0})")]
    Cycle(String),

    #[error("unknown module `{0}`")]
    UnknownModule(String),

    #[error("invalid module `{id}`: {reason}")]
    InvalidModule { id: String, reason: String },

    #[error("invalid corner block list: {0}")]
    InvalidCbl(String),

    #[error("timing constraint cannot be met: {0}")]
    TimingInfeasible(String),

    #[error("flow network is infeasible")]
    FlowInfeasible,

    #[error("residual network contains a negative cycle")]
    NegativeCycle,

    #[error("integer scale overflow while building flow network")]
    ScaleOverflow,

    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no timing-feasible floorplan found in {0} evaluations")]
    NoFeasibleFloorplan(usize),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
