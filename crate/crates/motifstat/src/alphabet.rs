//! Alphabets with exact character probabilities, and correlation rules.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{rat, Rat};

/// An ordered character set together with a memoryless source: each
/// character carries an exact positive probability and the probabilities
/// sum to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    prob: Vec<Rat>,
}

impl Alphabet {
    pub fn new(symbols: Vec<char>, prob: Vec<Rat>) -> Result<Self> {
        if symbols.len() < 2 {
            return Err(Error::InvalidAlphabet(
                "need at least 2 symbols".to_string(),
            ));
        }
        if symbols.len() != prob.len() {
            return Err(Error::InvalidAlphabet(format!(
                "{} symbols but {} probabilities",
                symbols.len(),
                prob.len()
            )));
        }
        let distinct: BTreeSet<char> = symbols.iter().copied().collect();
        if distinct.len() != symbols.len() {
            return Err(Error::InvalidAlphabet("repeated symbol".to_string()));
        }
        for p in &prob {
            if *p <= Rat::zero() {
                return Err(Error::InvalidAlphabet(
                    "all probabilities must be strictly positive".to_string(),
                ));
            }
        }
        let total: Rat = prob.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidAlphabet(format!(
                "probabilities sum to {}, not 1",
                total
            )));
        }
        Ok(Alphabet { symbols, prob })
    }

    /// Uniform source over the given symbols.
    pub fn uniform(symbols: &str) -> Result<Self> {
        let symbols: Vec<char> = symbols.chars().collect();
        let n = symbols.len() as i64;
        if n == 0 {
            return Err(Error::InvalidAlphabet("empty".to_string()));
        }
        let prob = vec![rat(1, n); symbols.len()];
        Alphabet::new(symbols, prob)
    }

    /// Binary alphabet {a, b} with P(a) = p, P(b) = 1 - p.
    pub fn binary(p: Rat) -> Result<Self> {
        let q = Rat::one() - p.clone();
        Alphabet::new(vec!['a', 'b'], vec![p, q])
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least 2 symbols by construction
    }

    pub fn index_of(&self, c: char) -> Result<usize> {
        self.symbols
            .iter()
            .position(|&s| s == c)
            .ok_or(Error::UnknownChar(c))
    }

    pub fn contains(&self, c: char) -> bool {
        self.symbols.contains(&c)
    }

    pub fn prob(&self, c: char) -> Result<&Rat> {
        Ok(&self.prob[self.index_of(c)?])
    }

    pub fn prob_by_index(&self, i: usize) -> &Rat {
        &self.prob[i]
    }

    /// Exact probability of a string under the memoryless source.
    pub fn text_weight(&self, text: &str) -> Result<Rat> {
        let mut w = Rat::one();
        for c in text.chars() {
            w *= self.prob(c)?.clone();
        }
        Ok(w)
    }
}

/// Which characters may appear at a primed (repeated) position, given the
/// character bound at the unprimed position of the same id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationRule {
    pub id: u8,
    allowed: BTreeMap<char, BTreeSet<char>>,
}

impl CorrelationRule {
    pub fn new(id: u8, allowed: BTreeMap<char, BTreeSet<char>>) -> Result<Self> {
        for (c, set) in &allowed {
            if set.is_empty() {
                return Err(Error::InvalidRule(format!(
                    "rule {id} maps {c:?} to an empty set"
                )));
            }
        }
        Ok(CorrelationRule { id, allowed })
    }

    /// Same character at both positions.
    pub fn identity(id: u8, alphabet: &Alphabet) -> Self {
        let allowed = alphabet
            .symbols()
            .iter()
            .map(|&c| (c, BTreeSet::from([c])))
            .collect();
        CorrelationRule { id, allowed }
    }

    /// Watson-Crick DNA complement: A-T, C-G.
    pub fn dna_complement(id: u8) -> Self {
        let pairs = [('A', "T"), ('T', "A"), ('C', "G"), ('G', "C")];
        CorrelationRule {
            id,
            allowed: pairs
                .iter()
                .map(|&(c, s)| (c, s.chars().collect()))
                .collect(),
        }
    }

    /// RNA base pairing including the G-U wobble: A'=U, C'=G, G'={C,U},
    /// U'={A,G}.
    pub fn rna_wobble(id: u8) -> Self {
        let pairs = [('A', "U"), ('C', "G"), ('G', "CU"), ('U', "AG")];
        CorrelationRule {
            id,
            allowed: pairs
                .iter()
                .map(|&(c, s)| (c, s.chars().collect()))
                .collect(),
        }
    }

    /// Characters admissible as the binder (unprimed occurrence) of this id.
    pub fn binders(&self) -> impl Iterator<Item = char> + '_ {
        self.allowed.keys().copied()
    }

    pub fn allowed_for(&self, binder: char) -> Option<&BTreeSet<char>> {
        self.allowed.get(&binder)
    }
}

/// A named set of correlation rules, one per id in use.
#[derive(Debug, Clone, Default)]
pub struct RuleSet {
    rules: BTreeMap<u8, CorrelationRule>,
}

impl RuleSet {
    pub fn new(rules: Vec<CorrelationRule>) -> Self {
        RuleSet {
            rules: rules.into_iter().map(|r| (r.id, r)).collect(),
        }
    }

    /// The identity rule for every id 1..=9.
    pub fn identity(alphabet: &Alphabet) -> Self {
        RuleSet::new((1..=9).map(|id| CorrelationRule::identity(id, alphabet)).collect())
    }

    pub fn dna_complement() -> Self {
        RuleSet::new((1..=9).map(CorrelationRule::dna_complement).collect())
    }

    pub fn rna_wobble() -> Self {
        RuleSet::new((1..=9).map(CorrelationRule::rna_wobble).collect())
    }

    pub fn get(&self, id: u8) -> Result<&CorrelationRule> {
        self.rules.get(&id).ok_or(Error::MissingRule(id))
    }
}
