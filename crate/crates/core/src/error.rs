use thiserror::Error;

/// Errors reported by the library.
///
/// Every fallible operation distinguishes between *usage* errors (bad arity,
/// unknown symbol, malformed table) and *verdict-like* conditions that are
/// part of an operation's contract (a cap too small to decide a question, a
/// section that is not closed, a structure that fails a required identity).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("operation table has {got} entries, expected {expected}")]
    TableSize { expected: usize, got: usize },

    #[error("table entry {entry} out of range for universe of size {size}")]
    ElementOutOfRange { entry: usize, size: usize },

    #[error("unknown element symbol {0:?}")]
    UnknownElement(String),

    #[error("unknown operation {0:?}")]
    UnknownOperation(String),

    #[error("duplicate operation name {0:?}")]
    DuplicateOperation(String),

    #[error("operations must share one universe")]
    UniverseMismatch,

    #[error("universe must have at least one element")]
    EmptyUniverse,

    #[error("argument index {index} out of range 1..={arity}")]
    ArgIndexOutOfRange { index: usize, arity: usize },

    #[error("arity cap {cap} is too small: {what} needs arity {needed}")]
    CapExceeded {
        cap: usize,
        needed: usize,
        what: String,
    },

    #[error("membership undecided at cap {cap}: canonical arity {arity} exceeds the cap")]
    UndecidedAtCap { cap: usize, arity: usize },

    #[error("variable v{index} exceeds the declared arity {k}")]
    VariableAboveArity { index: usize, k: usize },

    #[error("element of dimension {dim} cannot present an operation of arity {arity}")]
    DimensionExceedsArity { dim: usize, arity: usize },

    #[error("term parse error: {0}")]
    TermParse(String),

    #[error("algebra file is invalid: {0}")]
    InvalidAlgebraFile(String),

    #[error("handle is pure: it has no basic operation {0:?}")]
    PureHandle(String),

    #[error("section is not closed: {0}")]
    SectionNotClosed(String),

    #[error("section of size {size} exceeds the guard {guard}; raise the guard to proceed")]
    SizeGuard { size: usize, guard: usize },

    #[error("congruence lattice exceeds {guard} members; the structure is too unconstrained")]
    LatticeGuard { guard: usize },

    #[error("structure is not an n-indexed selection algebra at n={n}: {witness}")]
    MalformedSelection { n: usize, witness: String },

    #[error("element is not {n}-central: {witness}")]
    NotCentral { n: usize, witness: String },

    #[error("homomorphism data is incomplete or invalid: {0}")]
    InvalidHom(String),

    #[error("interpretation is invalid: {0}")]
    InvalidInterpretation(String),

    #[error("signatures differ: {0}")]
    SignatureMismatch(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
