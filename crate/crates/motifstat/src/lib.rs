//! Exact occurrence statistics of patterns in random texts.
//!
//! This crate compiles regular, compound, correlated and modular patterns
//! into finite automata, embeds memoryless random texts as Markov chains on
//! those automata, and computes exact and asymptotic occurrence statistics:
//! sooner-time distributions, which-pattern-first probabilities, joint count
//! distributions, transfer-matrix generating functions, dominant-pole
//! asymptotics and central-limit parameters. Everything is computed in exact
//! rational arithmetic and is cross-checkable against a brute-force oracle.
//!
//! The `examples/` directory has one runnable program per capability; the
//! `motifstat` binary exposes the same machinery as batch subcommands.

pub mod alphabet;
pub mod automata;
pub mod cli;
pub mod compile;
pub mod distributions;
pub mod embedding;
pub mod error;
pub mod genfunc;
pub mod linalg;
pub mod oracle;
pub mod pattern;
pub mod poly;
pub mod rat;

pub use alphabet::{Alphabet, CorrelationRule, RuleSet};
pub use automata::{aho_corasick, concat_modular, product, Dfa, StateId, MATCH_CLASS};
pub use embedding::{char_incidence, embed, MarkovEmbedding};
pub use error::{Error, Result};
pub use pattern::{expand_correlations, expand_to_keywords, parse_pattern, KeywordSet, PatternExpr};
pub use rat::Rat;
