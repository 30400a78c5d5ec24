use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("predicate {predicate} used with arity {found}, previously {expected}")]
    Arity {
        predicate: String,
        expected: usize,
        found: usize,
    },

    #[error("predicate {0} is defined both by rules and by database facts")]
    RuleFactOverlap(String),

    #[error("facts line {line}: {message}")]
    Facts { line: usize, message: String },

    #[error("unknown predicate {0}")]
    UnknownPredicate(String),

    #[error("clause {clause}: feature {feature} is not ground after unification")]
    NonGroundFeature { clause: String, feature: String },

    #[error("edge weight {0} is not positive and finite")]
    BadEdgeWeight(f64),

    #[error("restart probability {found} at node {node} is below the lower bound {bound}")]
    RestartBelowBound { node: usize, found: f64, bound: f64 },

    #[error("node budget of {0} exceeded during grounding")]
    NodeBudget(usize),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("weights diverged: |w[{feature}]| = {value}")]
    Divergence { feature: String, value: f64 },

    #[error("no usable training examples")]
    NoUsableExamples,

    #[error("{what} line {line}: {message}")]
    Format {
        what: &'static str,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable identifier, used for machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::Arity { .. } => "arity",
            Error::RuleFactOverlap(_) => "overlap",
            Error::Facts { .. } => "facts",
            Error::UnknownPredicate(_) => "unknown_predicate",
            Error::NonGroundFeature { .. } => "non_ground_feature",
            Error::BadEdgeWeight(_) => "bad_edge_weight",
            Error::RestartBelowBound { .. } => "restart_bound",
            Error::NodeBudget(_) => "node_budget",
            Error::InvalidParams(_) => "invalid_params",
            Error::Divergence { .. } => "divergence",
            Error::NoUsableExamples => "no_examples",
            Error::Format { .. } => "format",
            Error::File { .. } | Error::Io(_) => "io",
        }
    }
}
