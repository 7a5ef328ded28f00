use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ordering contains a cycle through task `{0}`")]
    CycleDetected(String),

    #[error("precondition unsatisfied{}: missing {missing:?}", at_index(*index))]
    PreconditionUnsatisfied {
        index: Option<usize>,
        missing: Vec<String>,
    },

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },

    #[error("invalid instance: {0}")]
    Invalid(String),

    #[error("state transition graph exceeds the cap of {cap} states")]
    StateSpaceExceeded { cap: usize },

    #[error("search budget exhausted in {0}")]
    BudgetExceeded(&'static str),

    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    #[error("decomposition depth is infinite (cyclic methods)")]
    InfiniteDepth,

    #[error("task `{0}` is not compound")]
    NotCompound(String),

    #[error("method for `{method}` does not apply to a task labeled `{task}`")]
    MethodMismatch { task: String, method: String },

    #[error("improper coloring: {0}")]
    ImproperColoring(String),

    #[error("integer program variable {0} has no finite upper bound")]
    Unbounded(usize),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

fn at_index(index: Option<usize>) -> String {
    match index {
        Some(i) => format!(" at plan index {i}"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
