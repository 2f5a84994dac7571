use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has {0} vertices, supported range is 1..=64")]
    VertexCount(usize),

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("DIMACS parse error on line {line}: {msg}")]
    Dimacs { line: usize, msg: String },

    #[error("empty vertex set where a non-empty one is required")]
    EmptyVertexSet,

    #[error("could not place {n} points with spacing {spacing} um in a {side} um box after {attempts} attempts")]
    PlacementInfeasible {
        n: usize,
        spacing: f64,
        side: f64,
        attempts: usize,
    },

    #[error("embedding violates hardware constraints after projection: {0}")]
    EmbeddingInfeasible(String),

    #[error("register has {got} positions, graph has {expected} vertices")]
    RegisterSize { expected: usize, got: usize },

    #[error("invalid pulse schedule: {0}")]
    InvalidPulse(String),

    #[error("invalid emulator configuration: {0}")]
    InvalidConfig(String),

    #[error("register of {n} atoms exceeds the emulation cap of {cap}")]
    TooManyAtoms { n: usize, cap: usize },

    #[error("column {0:?} is not an independent set of the model graph")]
    DependentColumn(Vec<usize>),

    #[error("vertex {0} is not covered by any column")]
    UncoveredVertex(usize),

    #[error("simplex numerical failure: {0}")]
    Numerical(String),

    #[error("CSV error: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
