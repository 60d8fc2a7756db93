use thiserror::Error;

use crate::dsl::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),

    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },

    #[error("cannot compose: first path ends at `{left}` but second starts at `{right}`")]
    Composition { left: String, right: String },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("unknown row `{row}` in table `{vertex}`")]
    UnknownRow { vertex: String, row: String },

    #[error("malformed instance: {0}")]
    MalformedInstance(String),

    #[error("malformed morphism: {0}")]
    MalformedMorphism(String),

    #[error("morphism is not natural: {0}")]
    NotNatural(String),

    #[error("malformed translation: {0}")]
    MalformedTranslation(String),

    #[error("schema mismatch: expected `{expected}`, found `{found}`")]
    SchemaMismatch { expected: String, found: String },

    #[error("instance mismatch: {0}")]
    InstanceMismatch(String),

    #[error(
        "saturation bound {bound} exceeded: elements keep growing at vertex `{vertex}` \
         ({elements} elements after {rounds} rounds)"
    )]
    SaturationBound {
        vertex: String,
        bound: usize,
        elements: usize,
        rounds: usize,
    },

    #[error(
        "bound instability at vertex `{vertex}`: paths out of it are not exhausted at \
         path bound {bound}; raise the bound or the result is infinite"
    )]
    BoundInstability { vertex: String, bound: usize },

    #[error("enumeration cap {cap} exceeded")]
    EnumerationCap { cap: usize },

    #[error("missing triple: node `{node}` has no `{arrow}` triple")]
    MissingTriple { node: String, arrow: String },

    #[error("duplicate predicate: node `{node}` has more than one `{arrow}` triple")]
    DuplicatePredicate { node: String, arrow: String },

    #[error("ill-typed triple store: {0}")]
    IllTypedTriple(String),

    #[error("pipeline step {step}: {message}")]
    Pipeline { step: usize, message: String },

    #[error("inconsistent typed input: {0}")]
    InconsistentTyping(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}
