//! The pattern language: parsing, correlation expansion, keyword expansion.
//!
//! Surface syntax:
//!
//! * plain characters are literals;
//! * `{x,y}` is a character class;
//! * digits `1`..`9` are correlation ids — the first occurrence of an id
//!   binds a character, later occurrences (optionally written with a
//!   trailing `'`) repeat it through the id's correlation rule;
//! * `#` is a gap of exactly one character, `#_k` a gap of exactly `k`,
//!   `#_k...` a gap of at least `k` (`#...` is short for `#_1...`);
//! * `|` separates top-level union branches.
//!
//! Gaps written next to each other merge: `##...` is a gap of at least 2.

use std::collections::BTreeSet;

use crate::alphabet::{Alphabet, RuleSet};
use crate::error::{Error, Result};

pub const DEFAULT_EXPANSION_CAP: u128 = 100_000;

const RESERVED: &[char] = &[
    '#', '{', '}', ',', '|', '\'', '_', '.', '1', '2', '3', '4', '5', '6', '7', '8', '9',
];

/// A parsed pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternExpr {
    Literal(String),
    CharClass(BTreeSet<char>),
    CorrelRef { id: u8, primed: bool },
    GapExact(u32),
    GapAtLeast(u32),
    Seq(Vec<PatternExpr>),
    Union(Vec<PatternExpr>),
}

impl PatternExpr {
    /// True when no gap of unbounded length appears anywhere.
    pub fn is_bounded(&self) -> bool {
        match self {
            PatternExpr::GapAtLeast(_) => false,
            PatternExpr::Seq(xs) | PatternExpr::Union(xs) => xs.iter().all(|x| x.is_bounded()),
            _ => true,
        }
    }

    pub fn has_correlations(&self) -> bool {
        match self {
            PatternExpr::CorrelRef { .. } => true,
            PatternExpr::Seq(xs) | PatternExpr::Union(xs) => {
                xs.iter().any(|x| x.has_correlations())
            }
            _ => false,
        }
    }

    /// Canonical rendering; `parse_pattern` of the result reproduces the tree.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out);
        out
    }

    fn render_into(&self, out: &mut String) {
        match self {
            PatternExpr::Literal(s) => out.push_str(s),
            PatternExpr::CharClass(set) => {
                out.push('{');
                for (i, c) in set.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push(*c);
                }
                out.push('}');
            }
            PatternExpr::CorrelRef { id, primed } => {
                out.push((b'0' + id) as char);
                if *primed {
                    out.push('\'');
                }
            }
            PatternExpr::GapExact(1) => out.push('#'),
            PatternExpr::GapExact(k) => out.push_str(&format!("#_{k}")),
            PatternExpr::GapAtLeast(k) => {
                if *k == 1 {
                    out.push_str("#...");
                } else {
                    out.push_str(&format!("#_{k}..."));
                }
            }
            PatternExpr::Seq(xs) => {
                for x in xs {
                    x.render_into(out);
                }
            }
            PatternExpr::Union(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        out.push('|');
                    }
                    x.render_into(out);
                }
            }
        }
    }

    /// Branches of the top-level union (a single branch when there is none).
    pub fn branches(&self) -> Vec<&PatternExpr> {
        match self {
            PatternExpr::Union(xs) => xs.iter().collect(),
            other => vec![other],
        }
    }

    /// Splits a correlation-free branch into gap-separated modules.
    ///
    /// Returns the module subtrees and the minimum lengths of the unbounded
    /// gaps between them; a branch without unbounded gaps is one module.
    pub fn split_modules(&self) -> Result<(Vec<PatternExpr>, Vec<u32>)> {
        let elems: Vec<&PatternExpr> = match self {
            PatternExpr::Seq(xs) => xs.iter().collect(),
            PatternExpr::Union(_) => {
                return Err(Error::Unsupported(
                    "cannot split a union into modules; split per branch".to_string(),
                ))
            }
            other => vec![other],
        };
        let mut modules = Vec::new();
        let mut gaps = Vec::new();
        let mut current: Vec<PatternExpr> = Vec::new();
        for e in elems {
            match e {
                PatternExpr::GapAtLeast(k) => {
                    if current.is_empty() {
                        return Err(Error::Unsupported(
                            "unbounded gap at the start of a pattern".to_string(),
                        ));
                    }
                    modules.push(seq_of(std::mem::take(&mut current)));
                    gaps.push(*k);
                }
                other => current.push(other.clone()),
            }
        }
        if current.is_empty() && !gaps.is_empty() {
            return Err(Error::Unsupported(
                "unbounded gap at the end of a pattern".to_string(),
            ));
        }
        modules.push(seq_of(current));
        Ok((modules, gaps))
    }
}

fn seq_of(mut xs: Vec<PatternExpr>) -> PatternExpr {
    if xs.len() == 1 {
        xs.pop().unwrap()
    } else {
        PatternExpr::Seq(xs)
    }
}

/// Parses the pattern DSL over the given alphabet.
///
/// Every correlation id used must have a rule in `rules`.
pub fn parse_pattern(text: &str, alphabet: &Alphabet, rules: &RuleSet) -> Result<PatternExpr> {
    if text.trim().is_empty() {
        return Err(Error::Syntax {
            pos: 0,
            msg: "empty pattern".to_string(),
        });
    }
    for &c in alphabet.symbols() {
        if RESERVED.contains(&c) {
            return Err(Error::InvalidAlphabet(format!(
                "symbol {c:?} collides with pattern syntax"
            )));
        }
    }
    let chars: Vec<char> = text.chars().collect();
    let mut p = Parser {
        chars: &chars,
        pos: 0,
        alphabet,
    };
    let expr = p.union()?;
    if p.pos != chars.len() {
        return Err(Error::Syntax {
            pos: p.pos,
            msg: format!("unexpected character {:?}", chars[p.pos]),
        });
    }
    check_correlations(&expr, rules)?;
    check_gap_edges(&expr)?;
    Ok(expr)
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
    alphabet: &'a Alphabet,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn union(&mut self) -> Result<PatternExpr> {
        let mut branches = vec![self.branch()?];
        loop {
            self.skip_ws();
            if self.peek() == Some('|') {
                self.bump();
                branches.push(self.branch()?);
            } else {
                break;
            }
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            PatternExpr::Union(branches)
        })
    }

    fn branch(&mut self) -> Result<PatternExpr> {
        let mut elems: Vec<PatternExpr> = Vec::new();
        let mut seen_ids: Vec<u8> = Vec::new();
        loop {
            self.skip_ws();
            let Some(c) = self.peek() else { break };
            match c {
                '|' => break,
                '#' => {
                    let gap = self.gap()?;
                    push_gap(&mut elems, gap);
                }
                '{' => {
                    let class = self.char_class()?;
                    elems.push(class);
                }
                '1'..='9' => {
                    let start = self.pos;
                    self.bump();
                    let id = (c as u8) - b'0';
                    let mut primed = self.peek() == Some('\'');
                    if primed {
                        self.bump();
                    }
                    let bound_before = seen_ids.contains(&id);
                    if primed && !bound_before {
                        return Err(Error::UnboundCorrelation { id, pos: start });
                    }
                    if bound_before {
                        primed = true; // repeated occurrence is the primed one
                    } else {
                        seen_ids.push(id);
                    }
                    elems.push(PatternExpr::CorrelRef { id, primed });
                }
                c if self.alphabet.contains(c) => {
                    self.bump();
                    if let Some(PatternExpr::Literal(s)) = elems.last_mut() {
                        s.push(c);
                    } else {
                        elems.push(PatternExpr::Literal(String::from(c)));
                    }
                }
                other => {
                    return Err(Error::Syntax {
                        pos: self.pos,
                        msg: format!("unexpected character {other:?}"),
                    })
                }
            }
        }
        if elems.is_empty() {
            return Err(Error::Syntax {
                pos: self.pos,
                msg: "empty branch".to_string(),
            });
        }
        Ok(seq_of(elems))
    }

    fn gap(&mut self) -> Result<PatternExpr> {
        debug_assert_eq!(self.peek(), Some('#'));
        self.bump();
        let mut k: u32 = 1;
        if self.peek() == Some('_') {
            self.bump();
            let start = self.pos;
            let mut digits = String::new();
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                digits.push(self.bump().unwrap());
            }
            k = digits.parse().map_err(|_| Error::Syntax {
                pos: start,
                msg: "expected a gap length after '#_'".to_string(),
            })?;
            if k == 0 {
                return Err(Error::Syntax {
                    pos: start,
                    msg: "gap length must be at least 1".to_string(),
                });
            }
        }
        if self.chars[self.pos..].starts_with(&['.', '.', '.']) {
            self.pos += 3;
            Ok(PatternExpr::GapAtLeast(k))
        } else {
            Ok(PatternExpr::GapExact(k))
        }
    }

    fn char_class(&mut self) -> Result<PatternExpr> {
        let open = self.pos;
        self.bump(); // '{'
        let mut set = BTreeSet::new();
        loop {
            self.skip_ws();
            match self.bump() {
                Some('}') => break,
                Some(',') => continue,
                Some(c) if self.alphabet.contains(c) => {
                    set.insert(c);
                }
                Some(other) => {
                    return Err(Error::Syntax {
                        pos: self.pos - 1,
                        msg: format!("unexpected {other:?} in character class"),
                    })
                }
                None => {
                    return Err(Error::Syntax {
                        pos: open,
                        msg: "unterminated character class".to_string(),
                    })
                }
            }
        }
        if set.is_empty() {
            return Err(Error::Syntax {
                pos: open,
                msg: "empty character class".to_string(),
            });
        }
        Ok(PatternExpr::CharClass(set))
    }
}

/// Adjacent gaps merge; an exact gap followed by an at-least gap (in either
/// order) is an at-least gap of the summed length.
fn push_gap(elems: &mut Vec<PatternExpr>, gap: PatternExpr) {
    use PatternExpr::{GapAtLeast, GapExact};
    if let Some(last) = elems.last_mut() {
        let merged = match (&last, &gap) {
            (GapExact(a), GapExact(b)) => Some(GapExact(a + b)),
            (GapExact(a), GapAtLeast(b)) | (GapAtLeast(a), GapExact(b)) => {
                Some(GapAtLeast(a + b))
            }
            (GapAtLeast(a), GapAtLeast(b)) => Some(GapAtLeast(a + b)),
            _ => None,
        };
        if let Some(m) = merged {
            *last = m;
            return;
        }
    }
    elems.push(gap);
}

fn check_correlations(expr: &PatternExpr, rules: &RuleSet) -> Result<()> {
    for branch in expr.branches() {
        let mut ids = Vec::new();
        collect_ids(branch, &mut ids);
        for &(id, _) in &ids {
            rules.get(id)?;
        }
    }
    Ok(())
}

fn collect_ids(expr: &PatternExpr, out: &mut Vec<(u8, bool)>) {
    match expr {
        PatternExpr::CorrelRef { id, primed } => out.push((*id, *primed)),
        PatternExpr::Seq(xs) | PatternExpr::Union(xs) => {
            for x in xs {
                collect_ids(x, out);
            }
        }
        _ => {}
    }
}

fn check_gap_edges(expr: &PatternExpr) -> Result<()> {
    for branch in expr.branches() {
        let elems: Vec<&PatternExpr> = match branch {
            PatternExpr::Seq(xs) => xs.iter().collect(),
            other => vec![other],
        };
        let edge_gap = matches!(elems.first(), Some(PatternExpr::GapAtLeast(_)))
            || matches!(elems.last(), Some(PatternExpr::GapAtLeast(_)));
        if edge_gap {
            return Err(Error::Unsupported(
                "an unbounded gap may not start or end a pattern".to_string(),
            ));
        }
    }
    Ok(())
}

/// Expands correlation references: one correlation-free tree per admissible
/// assignment of characters, in lexicographic assignment order (ids
/// ascending, characters in alphabet order).
pub fn expand_correlations(
    expr: &PatternExpr,
    alphabet: &Alphabet,
    rules: &RuleSet,
) -> Result<Vec<PatternExpr>> {
    if !expr.has_correlations() {
        return Ok(vec![expr.clone()]);
    }
    let mut out = Vec::new();
    for branch in expr.branches() {
        let mut ids = Vec::new();
        collect_ids(branch, &mut ids);
        let mut unprimed: Vec<u8> = ids.iter().filter(|(_, p)| !p).map(|(i, _)| *i).collect();
        unprimed.sort_unstable();
        unprimed.dedup();

        let mut trees = Vec::new();
        assign(branch, alphabet, rules, &unprimed, &mut Vec::new(), &mut trees)?;
        if trees.is_empty() {
            let id = unprimed.first().copied().unwrap_or(0);
            return Err(Error::EmptyAssignment(id));
        }
        out.extend(trees);
    }
    Ok(out)
}

fn assign(
    branch: &PatternExpr,
    alphabet: &Alphabet,
    rules: &RuleSet,
    ids: &[u8],
    binders: &mut Vec<(u8, char)>,
    out: &mut Vec<PatternExpr>,
) -> Result<()> {
    match ids.split_first() {
        None => {
            // All binders fixed; enumerate primed choices left to right.
            substitute(branch, rules, binders, out)?;
            Ok(())
        }
        Some((&id, rest)) => {
            let rule = rules.get(id)?;
            for c in alphabet.symbols() {
                if rule.allowed_for(*c).is_none() {
                    continue; // character not admissible as a binder
                }
                binders.push((id, *c));
                assign(branch, alphabet, rules, rest, binders, out)?;
                binders.pop();
            }
            Ok(())
        }
    }
}

/// Substitutes `CorrelRef` nodes under fixed binders, forking over the
/// characters each primed occurrence's rule allows.
fn substitute(
    branch: &PatternExpr,
    rules: &RuleSet,
    binders: &[(u8, char)],
    out: &mut Vec<PatternExpr>,
) -> Result<()> {
    // Allowed characters per primed occurrence, in left-to-right order.
    fn collect_primed(
        expr: &PatternExpr,
        rules: &RuleSet,
        binders: &[(u8, char)],
        sets: &mut Vec<Vec<char>>,
    ) -> Result<()> {
        match expr {
            PatternExpr::CorrelRef { id, primed } if *primed => {
                let binder = binders
                    .iter()
                    .find(|(i, _)| i == id)
                    .map(|(_, c)| *c)
                    .expect("binder fixed before substitution");
                let allowed = rules
                    .get(*id)?
                    .allowed_for(binder)
                    .ok_or(Error::EmptyAssignment(*id))?;
                sets.push(allowed.iter().copied().collect());
            }
            PatternExpr::Seq(xs) | PatternExpr::Union(xs) => {
                for x in xs {
                    collect_primed(x, rules, binders, sets)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn rewrite(
        expr: &PatternExpr,
        binders: &[(u8, char)],
        choices: &[char],
        cursor: &mut usize,
    ) -> PatternExpr {
        match expr {
            PatternExpr::CorrelRef { id, primed } => {
                let c = if *primed {
                    let c = choices[*cursor];
                    *cursor += 1;
                    c
                } else {
                    binders.iter().find(|(i, _)| i == id).map(|(_, c)| *c).unwrap()
                };
                PatternExpr::Literal(c.to_string())
            }
            PatternExpr::Seq(xs) => PatternExpr::Seq(
                xs.iter().map(|x| rewrite(x, binders, choices, cursor)).collect(),
            ),
            PatternExpr::Union(xs) => PatternExpr::Union(
                xs.iter().map(|x| rewrite(x, binders, choices, cursor)).collect(),
            ),
            other => other.clone(),
        }
    }

    let mut sets = Vec::new();
    collect_primed(branch, rules, binders, &mut sets)?;
    let mut idx = vec![0usize; sets.len()];
    loop {
        let choices: Vec<char> = idx.iter().zip(&sets).map(|(&i, s)| s[i]).collect();
        let mut cursor = 0;
        out.push(normalize(rewrite(branch, binders, &choices, &mut cursor)));
        // Odometer: rightmost position advances first.
        let mut pos = sets.len();
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < sets[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}


/// Re-merges adjacent literals after substitution.
fn normalize(expr: PatternExpr) -> PatternExpr {
    match expr {
        PatternExpr::Seq(xs) => {
            let mut out: Vec<PatternExpr> = Vec::new();
            for x in xs {
                let x = normalize(x);
                match (out.last_mut(), x) {
                    (Some(PatternExpr::Literal(a)), PatternExpr::Literal(b)) => a.push_str(&b),
                    (_, x) => out.push(x),
                }
            }
            seq_of(out)
        }
        PatternExpr::Union(xs) => PatternExpr::Union(xs.into_iter().map(normalize).collect()),
        other => other,
    }
}

/// A finite set of keywords with its substring/suffix redundancy flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordSet {
    words: Vec<String>,
    pub reduced: bool,
    pub suffix_reduced: bool,
}

impl KeywordSet {
    pub fn new(words: Vec<String>, alphabet: &Alphabet) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::InvalidKeywords("empty keyword set".to_string()));
        }
        let mut sorted: Vec<String> = words;
        sorted.sort();
        sorted.dedup();
        for w in &sorted {
            if w.is_empty() {
                return Err(Error::InvalidKeywords("empty keyword".to_string()));
            }
            for c in w.chars() {
                if !alphabet.contains(c) {
                    return Err(Error::UnknownChar(c));
                }
            }
        }
        let reduced = sorted.iter().all(|w| {
            sorted
                .iter()
                .filter(|v| v.as_str() != w.as_str())
                .all(|v| !v.contains(w.as_str()))
        });
        let suffix_reduced = sorted.iter().all(|w| {
            sorted
                .iter()
                .filter(|v| v.as_str() != w.as_str())
                .all(|v| !v.ends_with(w.as_str()))
        });
        Ok(KeywordSet {
            words: sorted,
            reduced,
            suffix_reduced,
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }
}

/// Expands a correlation-free, bounded pattern into its exact keyword set.
///
/// Exact gaps expand over all alphabet fillers. Unbounded gaps are a
/// structural feature handled by the modular automaton construction and
/// reject here with `UnboundedPattern`.
pub fn expand_to_keywords(
    expr: &PatternExpr,
    alphabet: &Alphabet,
    cap: u128,
) -> Result<KeywordSet> {
    if expr.has_correlations() {
        return Err(Error::Unsupported(
            "expand correlations before expanding to keywords".to_string(),
        ));
    }
    if !expr.is_bounded() {
        return Err(Error::UnboundedPattern);
    }
    let predicted = predicted_count(expr, alphabet.len() as u128);
    if predicted > cap {
        return Err(Error::ExpansionTooLarge {
            would: predicted,
            cap,
        });
    }
    let words = expand_words(expr, alphabet);
    KeywordSet::new(words, alphabet)
}

fn predicted_count(expr: &PatternExpr, s: u128) -> u128 {
    match expr {
        PatternExpr::Literal(_) => 1,
        PatternExpr::CharClass(set) => set.len() as u128,
        PatternExpr::GapExact(k) => s.saturating_pow(*k),
        PatternExpr::Seq(xs) => xs
            .iter()
            .map(|x| predicted_count(x, s))
            .fold(1u128, |a, b| a.saturating_mul(b)),
        PatternExpr::Union(xs) => xs
            .iter()
            .map(|x| predicted_count(x, s))
            .fold(0u128, |a, b| a.saturating_add(b)),
        PatternExpr::CorrelRef { .. } | PatternExpr::GapAtLeast(_) => 0,
    }
}

fn expand_words(expr: &PatternExpr, alphabet: &Alphabet) -> Vec<String> {
    match expr {
        PatternExpr::Literal(s) => vec![s.clone()],
        PatternExpr::CharClass(set) => set.iter().map(|c| c.to_string()).collect(),
        PatternExpr::GapExact(k) => {
            let mut words = vec![String::new()];
            for _ in 0..*k {
                words = words
                    .iter()
                    .flat_map(|w| {
                        alphabet.symbols().iter().map(move |c| {
                            let mut w = w.clone();
                            w.push(*c);
                            w
                        })
                    })
                    .collect();
            }
            words
        }
        PatternExpr::Seq(xs) => {
            let mut words = vec![String::new()];
            for x in xs {
                let parts = expand_words(x, alphabet);
                words = words
                    .iter()
                    .flat_map(|w| {
                        parts.iter().map(move |p| {
                            let mut w = w.clone();
                            w.push_str(p);
                            w
                        })
                    })
                    .collect();
            }
            words
        }
        PatternExpr::Union(xs) => xs.iter().flat_map(|x| expand_words(x, alphabet)).collect(),
        PatternExpr::CorrelRef { .. } | PatternExpr::GapAtLeast(_) => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn ab() -> Alphabet {
        Alphabet::binary(rat(1, 2)).unwrap()
    }

    fn acgu() -> Alphabet {
        Alphabet::uniform("ACGU").unwrap()
    }

    #[test]
    fn parses_plain_literal() {
        let a = ab();
        let expr = parse_pattern("abba", &a, &RuleSet::identity(&a)).unwrap();
        assert_eq!(expr, PatternExpr::Literal("abba".to_string()));
    }

    #[test]
    fn parses_correlated_pattern() {
        let a = ab();
        let expr = parse_pattern("1a2a2b1", &a, &RuleSet::identity(&a)).unwrap();
        use PatternExpr::*;
        assert_eq!(
            expr,
            Seq(vec![
                CorrelRef { id: 1, primed: false },
                Literal("a".to_string()),
                CorrelRef { id: 2, primed: false },
                Literal("a".to_string()),
                CorrelRef { id: 2, primed: true },
                Literal("b".to_string()),
                CorrelRef { id: 1, primed: true },
            ])
        );
    }

    #[test]
    fn parses_unbounded_gap() {
        let a = ab();
        let expr = parse_pattern("aa#...ba", &a, &RuleSet::identity(&a)).unwrap();
        use PatternExpr::*;
        assert_eq!(
            expr,
            Seq(vec![
                Literal("aa".to_string()),
                GapAtLeast(1),
                Literal("ba".to_string()),
            ])
        );
    }

    #[test]
    fn merges_adjacent_gaps() {
        let a = ab();
        let expr = parse_pattern("a##...b", &a, &RuleSet::identity(&a)).unwrap();
        use PatternExpr::*;
        assert_eq!(
            expr,
            Seq(vec![
                Literal("a".to_string()),
                GapAtLeast(2),
                Literal("b".to_string()),
            ])
        );
    }

    #[test]
    fn rejects_bad_input() {
        let a = ab();
        let rules = RuleSet::identity(&a);
        assert!(matches!(
            parse_pattern("abx", &a, &rules),
            Err(Error::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse_pattern("1'ab", &a, &rules),
            Err(Error::UnboundCorrelation { id: 1, pos: 0 })
        ));
        assert!(parse_pattern("#...ab", &a, &rules).is_err());
        assert!(parse_pattern("ab#...", &a, &rules).is_err());
        assert!(parse_pattern("", &a, &rules).is_err());
    }

    #[test]
    fn render_parse_roundtrip() {
        let a = ab();
        let rules = RuleSet::identity(&a);
        for src in ["abba", "1a2a2b1'", "aa#...ba", "a#_2b", "ba|abba", "{a,b}ab"] {
            let expr = parse_pattern(src, &a, &rules).unwrap();
            let rendered = expr.render();
            let reparsed = parse_pattern(&rendered, &a, &rules).unwrap();
            assert_eq!(expr, reparsed, "roundtrip failed for {src}");
        }
    }

    #[test]
    fn expands_identity_correlation_over_gap() {
        let a = ab();
        let rules = RuleSet::identity(&a);
        let expr = parse_pattern("1a#...b1", &a, &rules).unwrap();
        let trees = expand_correlations(&expr, &a, &rules).unwrap();
        let rendered: Vec<String> = trees.iter().map(|t| t.render()).collect();
        assert_eq!(rendered, vec!["aa#...ba", "ba#...bb"]);
    }

    #[test]
    fn expands_wobble_rule_to_six_keywords() {
        let a = acgu();
        let rules = RuleSet::rna_wobble();
        let expr = parse_pattern("1GAAA1'", &a, &rules).unwrap();
        let trees = expand_correlations(&expr, &a, &rules).unwrap();
        let words: Vec<String> = trees.iter().map(|t| t.render()).collect();
        assert_eq!(
            words,
            vec!["AGAAAU", "CGAAAG", "GGAAAC", "GGAAAU", "UGAAAA", "UGAAAG"]
        );
    }

    #[test]
    fn correlation_free_expansion_is_identity() {
        let a = ab();
        let rules = RuleSet::identity(&a);
        let expr = parse_pattern("ab#ba", &a, &rules).unwrap();
        let trees = expand_correlations(&expr, &a, &rules).unwrap();
        assert_eq!(trees, vec![expr]);
    }

    #[test]
    fn expands_exact_gap_pattern() {
        let a = ab();
        let rules = RuleSet::identity(&a);
        let expr = parse_pattern("1a#_2b1", &a, &rules).unwrap();
        let trees = expand_correlations(&expr, &a, &rules).unwrap();
        let mut words = Vec::new();
        for t in &trees {
            words.extend(
                expand_to_keywords(t, &a, DEFAULT_EXPANSION_CAP)
                    .unwrap()
                    .words()
                    .to_vec(),
            );
        }
        words.sort();
        assert_eq!(
            words,
            vec!["aaaaba", "aaabba", "aababa", "aabbba", "baaabb", "baabbb", "bababb", "babbbb"]
        );
    }

    #[test]
    fn union_flags() {
        let a = ab();
        let rules = RuleSet::identity(&a);
        let expr = parse_pattern("ba|abba", &a, &rules).unwrap();
        let ks = expand_to_keywords(&expr, &a, DEFAULT_EXPANSION_CAP).unwrap();
        assert_eq!(ks.words(), ["abba", "ba"]);
        assert!(!ks.suffix_reduced, "ba is a suffix of abba");
        assert!(!ks.reduced);
    }

    #[test]
    fn unbounded_patterns_do_not_expand() {
        let a = ab();
        let rules = RuleSet::identity(&a);
        let expr = parse_pattern("aa#...ba", &a, &rules).unwrap();
        assert!(matches!(
            expand_to_keywords(&expr, &a, DEFAULT_EXPANSION_CAP),
            Err(Error::UnboundedPattern)
        ));
    }

    #[test]
    fn expansion_cap_is_enforced() {
        let a = ab();
        let rules = RuleSet::identity(&a);
        let expr = parse_pattern("a#_10b", &a, &rules).unwrap();
        assert!(matches!(
            expand_to_keywords(&expr, &a, 100),
            Err(Error::ExpansionTooLarge { would: 1024, cap: 100 })
        ));
    }

    #[test]
    fn modules_split_at_unbounded_gaps() {
        let a = ab();
        let rules = RuleSet::identity(&a);
        let expr = parse_pattern("ab#...baa#_2...bb", &a, &rules).unwrap();
        let (modules, gaps) = expr.split_modules().unwrap();
        let rendered: Vec<String> = modules.iter().map(|m| m.render()).collect();
        assert_eq!(rendered, vec!["ab", "baa", "bb"]);
        assert_eq!(gaps, vec![1, 2]);
    }

    #[test]
    fn reduced_and_suffix_reduced_are_independent() {
        let a = ab();
        // ab is a substring (but not suffix) of abb: not reduced, suffix-reduced.
        let ks = KeywordSet::new(vec!["ab".into(), "abb".into()], &a).unwrap();
        assert!(!ks.reduced);
        assert!(ks.suffix_reduced);
        // ba is a suffix of abba: neither.
        let ks = KeywordSet::new(vec!["ba".into(), "abba".into()], &a).unwrap();
        assert!(!ks.reduced);
        assert!(!ks.suffix_reduced);
        // Disjoint words: both.
        let ks = KeywordSet::new(vec!["aa".into(), "bb".into()], &a).unwrap();
        assert!(ks.reduced);
        assert!(ks.suffix_reduced);
    }
}
