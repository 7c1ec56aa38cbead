//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by pattern parsing, automaton construction and the
/// exact computations built on top of them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("character {0:?} is not in the alphabet")]
    UnknownChar(char),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid correlation rule: {0}")]
    InvalidRule(String),

    #[error("correlation id {id} referenced at position {pos} has no earlier unprimed occurrence")]
    UnboundCorrelation { id: u8, pos: usize },

    #[error("no correlation rule for id {0}")]
    MissingRule(u8),

    #[error("no admissible assignment for correlation id {0}")]
    EmptyAssignment(u8),

    #[error("pattern denotes an infinite set of words (unbounded gap present)")]
    UnboundedPattern,

    #[error("expansion would produce {would} words, exceeding the cap of {cap}")]
    ExpansionTooLarge { would: u128, cap: u128 },

    #[error("invalid keyword set: {0}")]
    InvalidKeywords(String),

    #[error("unknown terminal class {0:?}")]
    UnknownClass(String),

    #[error("alphabet mismatch between automata")]
    AlphabetMismatch,

    #[error("automaton has {found} states, exceeding the cap of {cap}")]
    StateCapExceeded { found: usize, cap: usize },

    #[error("enumeration of {would} texts exceeds the budget of {cap}")]
    TextBudgetExceeded { would: u128, cap: u128 },

    #[error("automaton is not accessible-pruned: state {0} is unreachable")]
    NotPruned(usize),

    #[error("(I - Q) is singular: the stop set is not almost-surely absorbing")]
    NonAbsorbing,

    #[error("conditioning event has probability zero")]
    ZeroProbabilityCondition,

    #[error("denominator vanishes at 0; no power series at the origin")]
    DenominatorVanishesAtZero,

    #[error("could not isolate denominator roots at working precision")]
    RootIsolation,

    #[error("dominant poles tie at equal modulus with different locations; no single asymptotic form")]
    AmbiguousDominantPole,

    #[error("chain is not irreducible and aperiodic: {0}")]
    NotErgodic(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid rational literal {0:?} (expected \"a/b\" or an integer)")]
    BadRational(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
