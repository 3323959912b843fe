use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("malformed snapshot at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("channel {0} connects a node to itself")]
    SelfLoop(String),
    #[error("channel {0} has zero capacity")]
    ZeroCapacity(String),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("invalid game parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("attacker {0} already exists in the graph")]
    AttackerExists(String),
    #[error("node index {0} is out of range")]
    PairOutOfRange(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

#[derive(Debug, Error, PartialEq)]
pub enum RoutingError {
    #[error("source and target are the same node")]
    SameEndpoints,
    #[error("payment amount must be positive")]
    ZeroAmount,
    #[error("node index {0} is out of range")]
    UnknownNode(usize),
    #[error("k must be at least 1")]
    ZeroK,
}

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("target set is empty")]
    EmptyTargetSet,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("trial count must be at least 1")]
    ZeroTrials,
    #[error(transparent)]
    Routing(#[from] RoutingError),
}
