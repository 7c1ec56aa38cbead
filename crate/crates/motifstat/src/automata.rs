//! Deterministic finite automata: Aho-Corasick construction with terminal
//! classes, synchronized products, modular concatenation, absorbing and
//! renewal transforms, accessibility pruning, isomorphism, DOT export.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::pattern::KeywordSet;

/// Dense index of an automaton state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

impl std::fmt::Display for StateId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Label of the terminal class marking detection of the whole pattern.
pub const MATCH_CLASS: &str = "match";

/// Label of the class T(w) of end states for keyword `w`.
pub fn keyword_class(word: &str) -> String {
    format!("w:{word}")
}

/// A deterministic finite automaton over an explicit symbol list.
///
/// The transition table is total: every (state, symbol) pair has exactly one
/// successor. Terminal states are organized into named classes; a state may
/// belong to several classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    symbols: Vec<char>,
    labels: Vec<String>,
    initial: StateId,
    delta: Vec<Vec<usize>>,
    classes: BTreeMap<String, BTreeSet<usize>>,
}

impl Dfa {
    pub fn new(
        symbols: Vec<char>,
        labels: Vec<String>,
        initial: StateId,
        delta: Vec<Vec<usize>>,
        classes: BTreeMap<String, BTreeSet<usize>>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 || initial.0 >= n {
            return Err(Error::InvalidKeywords("bad automaton shape".to_string()));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != n {
            return Err(Error::InvalidKeywords("duplicate state labels".to_string()));
        }
        if delta.len() != n || delta.iter().any(|row| row.len() != symbols.len()) {
            return Err(Error::InvalidKeywords("transition table not total".to_string()));
        }
        if delta.iter().flatten().any(|&t| t >= n) {
            return Err(Error::InvalidKeywords("transition out of range".to_string()));
        }
        if classes.values().flatten().any(|&s| s >= n) {
            return Err(Error::InvalidKeywords("class state out of range".to_string()));
        }
        Ok(Dfa {
            symbols,
            labels,
            initial,
            delta,
            classes,
        })
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn state_count(&self) -> usize {
        self.labels.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn label(&self, s: StateId) -> &str {
        &self.labels[s.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.labels.len()).map(StateId)
    }

    pub fn classes(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.classes
    }

    pub fn class(&self, label: &str) -> Result<&BTreeSet<usize>> {
        self.classes
            .get(label)
            .ok_or_else(|| Error::UnknownClass(label.to_string()))
    }

    /// Adds or replaces a named terminal class.
    pub fn with_class(mut self, label: &str, states: BTreeSet<usize>) -> Result<Self> {
        if states.iter().any(|&s| s >= self.state_count()) {
            return Err(Error::InvalidKeywords("class state out of range".to_string()));
        }
        self.classes.insert(label.to_string(), states);
        Ok(self)
    }

    pub fn step(&self, from: StateId, c: char) -> Result<StateId> {
        let i = self
            .symbols
            .iter()
            .position(|&s| s == c)
            .ok_or(Error::UnknownChar(c))?;
        Ok(StateId(self.delta[from.0][i]))
    }

    pub fn step_by_index(&self, from: usize, sym: usize) -> usize {
        self.delta[from][sym]
    }

    /// Extended transition: folds the table over `x`, so that
    /// `delta_star(u, "") == u` and paths compose by concatenation.
    pub fn delta_star(&self, from: StateId, x: &str) -> Result<StateId> {
        let mut u = from;
        for c in x.chars() {
            u = self.step(u, c)?;
        }
        Ok(u)
    }

    /// States reachable from the initial state (including it), in BFS order
    /// with symbols tried in table order.
    fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.state_count()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.initial.0]);
        seen[self.initial.0] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for sym in 0..self.symbols.len() {
                let v = self.delta[u][sym];
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        order
    }

    pub fn is_accessible(&self) -> bool {
        self.reachable().len() == self.state_count()
    }

    /// Keeps only states reachable from the initial state, renumbered densely
    /// in BFS order (fixed symbol order); classes are restricted.
    pub fn prune_accessible(&self) -> Dfa {
        let order = self.reachable();
        let mut rename = vec![usize::MAX; self.state_count()];
        for (new, &old) in order.iter().enumerate() {
            rename[old] = new;
        }
        let labels = order.iter().map(|&s| self.labels[s].clone()).collect();
        let delta = order
            .iter()
            .map(|&s| self.delta[s].iter().map(|&t| rename[t]).collect())
            .collect();
        let classes = self
            .classes
            .iter()
            .map(|(k, set)| {
                let set = set
                    .iter()
                    .filter(|&&s| rename[s] != usize::MAX)
                    .map(|&s| rename[s])
                    .collect();
                (k.clone(), set)
            })
            .collect();
        Dfa {
            symbols: self.symbols.clone(),
            labels,
            initial: StateId(0),
            delta,
            classes,
        }
    }

    /// Absorbing transform: every state in the class becomes a sink.
    pub fn make_absorbing(&self, class: &str) -> Result<Dfa> {
        let set = self.class(class)?.clone();
        let mut out = self.clone();
        for &t in &set {
            for sym in 0..out.symbols.len() {
                out.delta[t][sym] = t;
            }
        }
        Ok(out)
    }

    /// Renewal transform: every state in the class copies the initial
    /// state's outgoing transitions, so counting restarts after each match.
    pub fn make_renewal(&self, class: &str) -> Result<Dfa> {
        let set = self.class(class)?.clone();
        let mut out = self.clone();
        let initial_row = out.delta[out.initial.0].clone();
        for &t in &set {
            out.delta[t] = initial_row.clone();
        }
        Ok(out)
    }

    /// Structural equality under relabeling: a bijection preserving the
    /// initial state, every named class, and all labeled edges. Decided by
    /// comparing canonical BFS renumberings of the accessible parts.
    pub fn isomorphic(&self, other: &Dfa) -> bool {
        let a = self.prune_accessible();
        let b = other.prune_accessible();
        a.symbols == b.symbols
            && a.delta == b.delta
            && a.initial == b.initial
            && a.classes == b.classes
    }

    /// GraphViz rendering with one edge per (state, symbol) and terminal
    /// classes listed in node annotations.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n");
        for s in 0..self.state_count() {
            let mut tags: Vec<&str> = self
                .classes
                .iter()
                .filter(|(_, set)| set.contains(&s))
                .map(|(k, _)| k.as_str())
                .collect();
            tags.sort_unstable();
            let label = if tags.is_empty() {
                self.labels[s].clone()
            } else {
                format!("{}\\n[{}]", self.labels[s], tags.join(","))
            };
            let shape = if tags.is_empty() { "circle" } else { "doublecircle" };
            let _ = writeln!(out, "  s{s} [label=\"{label}\", shape={shape}];");
        }
        let _ = writeln!(out, "  start [shape=point];");
        let _ = writeln!(out, "  start -> s{};", self.initial.0);
        for s in 0..self.state_count() {
            for (sym, &t) in self.delta[s].iter().enumerate() {
                let _ = writeln!(out, "  s{s} -> s{t} [label=\"{}\"];", self.symbols[sym]);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the Aho-Corasick automaton of a keyword set.
///
/// States are the empty string and all prefixes of keywords; the transition
/// out of `u` on `c` goes to the longest state that is a suffix of `uc`.
/// Classes: `w:{w}` holds T(w) = keywords ending with `w`, and `match` holds
/// all keyword states.
pub fn aho_corasick(words: &KeywordSet, alphabet: &Alphabet) -> Result<Dfa> {
    let mut prefixes: BTreeSet<String> = BTreeSet::from([String::new()]);
    for w in words.words() {
        let chars: Vec<char> = w.chars().collect();
        for i in 1..=chars.len() {
            prefixes.insert(chars[..i].iter().collect());
        }
    }
    // Construction order: (length, lexicographic). The BFS canonicalization
    // below fixes the final numbering.
    let mut labels: Vec<String> = prefixes.into_iter().collect();
    labels.sort_by_key(|s| (s.chars().count(), s.clone()));
    let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();

    let mut delta = vec![vec![0usize; alphabet.len()]; labels.len()];
    for (u, prefix) in labels.iter().enumerate() {
        for (sym, &c) in alphabet.symbols().iter().enumerate() {
            let mut extended = prefix.clone();
            extended.push(c);
            delta[u][sym] = index[longest_suffix_in(&extended, &index).as_str()];
        }
    }

    let mut classes: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut match_class = BTreeSet::new();
    for w in words.words() {
        let t: BTreeSet<usize> = words
            .words()
            .iter()
            .filter(|u| u.ends_with(w.as_str()))
            .map(|u| index[u.as_str()])
            .collect();
        classes.insert(keyword_class(w), t);
        match_class.insert(index[w.as_str()]);
    }
    classes.insert(MATCH_CLASS.to_string(), match_class);

    let dfa = Dfa::new(
        alphabet.symbols().to_vec(),
        labels,
        StateId(0),
        delta,
        classes,
    )?;
    // Renumber to BFS order so state indices match the usual presentation.
    Ok(relabel_empty(dfa.prune_accessible()))
}

fn longest_suffix_in(s: &str, index: &BTreeMap<&str, usize>) -> String {
    let chars: Vec<char> = s.chars().collect();
    for start in 0..chars.len() {
        let candidate: String = chars[start..].iter().collect();
        if index.contains_key(candidate.as_str()) {
            return candidate;
        }
    }
    String::new()
}

/// The empty-string state displays as a proper label.
fn relabel_empty(mut dfa: Dfa) -> Dfa {
    for l in &mut dfa.labels {
        if l.is_empty() {
            *l = "eps".to_string();
        }
    }
    dfa
}

/// Synchronized (product) automaton: the state set is the full Cartesian
/// product, transitions run all factors on the same character.
///
/// Factor classes lift componentwise as `i:{label}`; the `match` class is
/// the union of the factors' lifted `match` classes (detection by at least
/// one factor). A single-factor product is the factor itself.
pub fn product(factors: &[Dfa]) -> Result<Dfa> {
    let Some(first) = factors.first() else {
        return Err(Error::InvalidKeywords("empty factor list".to_string()));
    };
    if factors.len() == 1 {
        return Ok(first.clone());
    }
    if factors.iter().any(|g| g.symbols != first.symbols) {
        return Err(Error::AlphabetMismatch);
    }
    let sizes: Vec<usize> = factors.iter().map(|g| g.state_count()).collect();
    let total: usize = sizes.iter().product();

    // Row-major tuple index: the last factor varies fastest.
    let unrank = |mut ix: usize| -> Vec<usize> {
        let mut tuple = vec![0usize; sizes.len()];
        for i in (0..sizes.len()).rev() {
            tuple[i] = ix % sizes[i];
            ix /= sizes[i];
        }
        tuple
    };
    let rank = |tuple: &[usize]| -> usize {
        tuple
            .iter()
            .zip(&sizes)
            .fold(0usize, |acc, (&t, &s)| acc * s + t)
    };

    let mut labels = Vec::with_capacity(total);
    let mut delta = vec![vec![0usize; first.symbols.len()]; total];
    for ix in 0..total {
        let tuple = unrank(ix);
        let parts: Vec<&str> = tuple
            .iter()
            .enumerate()
            .map(|(i, &s)| factors[i].label(StateId(s)))
            .collect();
        labels.push(format!("({})", parts.join(",")));
        for sym in 0..first.symbols.len() {
            let next: Vec<usize> = tuple
                .iter()
                .enumerate()
                .map(|(i, &s)| factors[i].step_by_index(s, sym))
                .collect();
            delta[ix][sym] = rank(&next);
        }
    }

    let mut classes: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut match_class = BTreeSet::new();
    for ix in 0..total {
        let tuple = unrank(ix);
        for (i, g) in factors.iter().enumerate() {
            for (label, set) in &g.classes {
                if set.contains(&tuple[i]) {
                    classes
                        .entry(format!("{i}:{label}"))
                        .or_default()
                        .insert(ix);
                    if label == MATCH_CLASS {
                        match_class.insert(ix);
                    }
                }
            }
        }
    }
    // Classes that lift to nothing still exist, restricted to the empty set.
    for (i, g) in factors.iter().enumerate() {
        for label in g.classes.keys() {
            classes.entry(format!("{i}:{label}")).or_default();
        }
    }
    classes.insert(MATCH_CLASS.to_string(), match_class);

    Dfa::new(
        first.symbols.clone(),
        labels,
        StateId(0),
        delta,
        classes,
    )
}

/// Chains the Aho-Corasick automata of consecutive modules through forced
/// gap states, recognizing `A* M1 A^{k1} A* M2 ...`.
///
/// From each terminal state of module `i`, `k-1` forced-gap states lead to
/// an all-characters edge into module `i+1`'s initial state. The final
/// module's keyword classes mark detection; `match` is its `match` class.
pub fn concat_modular(
    modules: &[KeywordSet],
    gaps: &[u32],
    alphabet: &Alphabet,
) -> Result<Dfa> {
    if modules.is_empty() {
        return Err(Error::InvalidKeywords("empty module list".to_string()));
    }
    if gaps.len() + 1 != modules.len() {
        return Err(Error::InvalidKeywords(format!(
            "{} modules need {} gaps, got {}",
            modules.len(),
            modules.len() - 1,
            gaps.len()
        )));
    }
    if gaps.iter().any(|&k| k == 0) {
        return Err(Error::InvalidKeywords("gaps must have k >= 1".to_string()));
    }
    let acs: Vec<Dfa> = modules
        .iter()
        .map(|m| aho_corasick(m, alphabet))
        .collect::<Result<_>>()?;
    if acs.len() == 1 {
        return Ok(acs.into_iter().next().unwrap());
    }

    let mut labels: Vec<String> = Vec::new();
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut offsets = Vec::new();
    let mut gap_heads: Vec<usize> = Vec::new(); // first gap state after module i

    for (i, ac) in acs.iter().enumerate() {
        offsets.push(labels.len());
        let offset = labels.len();
        for s in 0..ac.state_count() {
            let base = ac.label(StateId(s));
            let label = if base == "eps" {
                format!("eps{}", i + 1)
            } else {
                base.to_string()
            };
            labels.push(label);
            delta.push(ac.delta[s].iter().map(|&t| t + offset).collect());
        }
        if i + 1 < acs.len() {
            // k-1 intermediate gap states; the last gap edge lands on the
            // next module's initial state, patched once offsets are known.
            let k = gaps[i];
            let mut head = usize::MAX;
            for j in 0..k.saturating_sub(1) {
                let g = labels.len();
                if j == 0 {
                    head = g;
                }
                labels.push(format!("gap{}.{}", i + 1, j + 1));
                delta.push(vec![g + 1; alphabet.len()]);
            }
            if k == 1 {
                head = labels.len(); // no gap state: edge goes straight on
            }
            gap_heads.push(head);
        }
    }

    // Disambiguate duplicate labels across modules.
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for l in &mut labels {
        match seen.entry(l.clone()) {
            Entry::Vacant(e) => {
                e.insert(1);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += 1;
                *l = format!("{l}@{}", e.get());
            }
        }
    }

    // Patch terminal rows of non-final modules to enter the gap run, and the
    // last gap state (or the terminal itself for k=1) to enter module i+1.
    for i in 0..acs.len() - 1 {
        let next_initial = offsets[i + 1];
        let k = gaps[i] as usize;
        let head = gap_heads[i];
        for &t in acs[i].class(MATCH_CLASS)? {
            let row = &mut delta[offsets[i] + t];
            let target = if k == 1 { next_initial } else { head };
            row.iter_mut().for_each(|e| *e = target);
        }
        if k >= 2 {
            delta[head + k - 2] = vec![next_initial; alphabet.len()];
        }
    }

    // Detection classes come from the final module only.
    let last = acs.len() - 1;
    let last_offset = offsets[last];
    let mut classes: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for (label, set) in &acs[last].classes {
        classes.insert(
            label.clone(),
            set.iter().map(|&s| s + last_offset).collect(),
        );
    }

    Dfa::new(
        alphabet.symbols().to_vec(),
        labels,
        StateId(0),
        delta,
        classes,
    )
}
