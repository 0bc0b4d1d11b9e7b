use thiserror::Error;

/// Errors shared across the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },

    #[error("scalar tuple is linearly dependent over the fraction field: {0}")]
    DependentTuple(String),

    #[error("basis passed to coordinate solver is not independent")]
    NotIndependentBasis,

    #[error("formula contains a quantifier where a quantifier-free one is required")]
    QuantifierPresent,

    #[error("matrix dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("coset rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("pp constraint arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("pp constraint has more than one free variable slot")]
    MultiVariable,

    #[error("pp sentence is not closed")]
    NotClosed,

    #[error("variable {0} is not classified as a G-element")]
    NotGClassified(String),

    #[error("unsupported atom in base theory: {0}")]
    UnsupportedBaseAtom(String),

    #[error("unbound variable {0}")]
    UnboundVariable(String),

    #[error("unbound constant {0}")]
    UnboundConstant(String),

    #[error("the parameter set C is not closed and G-independent")]
    CNotIndependent,

    #[error("set is not closed under the decomposition functions")]
    NotClosed2,

    #[error("no witness: the sentence was decided false")]
    NoWitness,

    #[error("order atoms require an ordered configuration")]
    Unordered,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("model error: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;
