use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("invalid rational `{0}`")]
    Rational(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("invalid partition `{0}`")]
    Partition(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    // graph structure
    #[error("unknown edge id {0}")]
    UnknownEdge(u64),
    #[error("duplicate edge id {0}")]
    DuplicateEdgeId(u64),
    #[error("edge {edge} has endpoint `{node}` which is not a node of the graph")]
    DanglingEndpoint { edge: u64, node: String },
    #[error("terminal `{0}` is not a node of the graph")]
    UnknownTerminal(String),
    #[error("node `{0}` is not a node of the graph")]
    UnknownNode(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("edge {edge} probability {prob} is outside [0, 1]")]
    BadProbability { edge: u64, prob: String },
    #[error("edge state does not cover exactly the edge set of the graph")]
    StateDomainMismatch,

    // decomposition hypotheses
    #[error("Hypothesis 1 violated: edge {0} belongs to both sides")]
    SharedEdge(u64),
    #[error("Hypothesis 1 violated: node `{0}` is shared by both sides but is not a boundary node")]
    SharedNonBoundaryNode(String),
    #[error("Hypothesis 1 violated: boundary node `{node}` is missing from the terminals of {side}")]
    BoundaryNotTerminal { side: &'static str, node: String },
    #[error("Hypothesis 1 violated: boundary node `{node}` is not a node of {side}")]
    BoundaryNotInSide { side: &'static str, node: String },
    #[error("Hypothesis 2 violated: terminal `{0}` reaches no boundary node")]
    UnreachableTerminal(String),
    #[error("decomposition has an empty boundary")]
    EmptyBoundary,

    // partitions
    #[error("partition size {0} is outside the supported range 1..={1}")]
    PartitionSizeOutOfBounds(usize, usize),
    #[error("partitions are over different ground sets ({0} vs {1})")]
    GroundSetMismatch(usize, usize),
    #[error("not a permutation of 1..={0}")]
    NotPermutation(usize),

    // linear algebra
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("connectivity number of `{0}` is zero")]
    ZeroConnectivityNumber(String),

    // reliability
    #[error("graph has {edges} edges, more than the enumeration bound {bound}; use the factoring route")]
    EnumerationBound { edges: usize, bound: usize },
    #[error("state distributions are over boundaries of different sizes ({0} vs {1})")]
    BoundarySizeMismatch(usize, usize),
    #[error("closed form requires a boundary of exactly 2 nodes, got {0}")]
    NotTwoBoundary(usize),

    // random cluster
    #[error("underlying graph is disconnected")]
    DisconnectedGraph,
    #[error("node `{0}` is not a terminal; the identity needs every node to be a terminal")]
    NotAllTerminal(String),
}
