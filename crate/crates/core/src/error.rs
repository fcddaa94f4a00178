use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // parameters
    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("alpha must be nonnegative, got {0}")]
    NegativeAlpha(f64),
    #[error("rates must be finite")]
    NonFinite,
    #[error("operation requires alpha > 0")]
    AlphaZero,
    #[error("parameter ordering violated: {0}")]
    BadOrder(String),

    // graphs
    #[error("graph must have at least one vertex")]
    ZeroVertices,
    #[error("graph would have {requested} vertices, cap is {cap}")]
    SizeCapExceeded { requested: usize, cap: usize },
    #[error("lattice side length must be at least 3, got {0}")]
    TooSmall(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("edge {0}-{1} is not symmetric")]
    AsymmetricEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph is not a tree")]
    NotATree,
    #[error("band initial configuration needs a graph with row structure")]
    BandOnNonTorus,

    // process
    #[error("no active events: total rate is zero")]
    NoActiveEvents,

    // reductions
    #[error("jump chain height must be at least 1")]
    ZeroHeight,

    // bounds
    #[error("maximum degree must be at least 3, got {0}")]
    BadDegree(usize),
    #[error("invalid bound inputs: {0}")]
    BadInputs(String),

    // harness
    #[error("empty input")]
    EmptyInput,
    #[error("samples share a single value; chi-squared is undefined")]
    DegenerateSupport,
    #[error("curves for L={0} and L={1} do not cross on the grid")]
    NoCrossing(usize, usize),
    #[error("curves for L={0} and L={1} cross more than once on the grid")]
    MultipleCrossings(usize, usize),
    #[error("invalid sweep: {0}")]
    BadSweep(String),
}
