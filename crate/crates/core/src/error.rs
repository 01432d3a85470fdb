use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported Cartan type {0:?}")]
    UnsupportedType(String),
    #[error("Cartan matrix is not of finite type: {0}")]
    NotFiniteType(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid reduced word {0:?}: {1}")]
    InvalidWord(String, String),
    #[error("polynomial rank mismatch: {0} vs {1} variables")]
    RankMismatch(usize, usize),
    #[error("degree {0} is odd")]
    OddDegree(u32),
    #[error("linear form vanishes over the coefficient field")]
    VanishingLinearForm,
    #[error("matrix is singular over the coefficient field")]
    SingularMatrix,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("ambiguous parabolic edge label between {0} and {1}")]
    AmbiguousEdgeLabel(String, String),
    #[error("invalid moment graph: {0}")]
    InvalidGraph(String),
    #[error("invalid sheaf: {0}")]
    InvalidSheaf(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("moment graph has {0} maximal vertices, expected exactly one")]
    NonUniqueMaximum(usize),
    #[error("edge label {0} vanishes over the coefficient field")]
    VanishingLabel(String),
    #[error("structure algebra membership fails on edge {0}")]
    NotStructureElement(usize),
    #[error("GKM hypothesis fails: {0}")]
    NotGkm(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
