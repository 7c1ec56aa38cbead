//! Markov chain embedding of a random text in an automaton.
//!
//! The chain's state space is the set of states reachable by a non-empty
//! string; the initial state drops out when nothing transitions back into
//! it. The initial distribution puts mass Prob(c) on the state reached from
//! the initial state by `c`, and the transition matrix superposes the
//! per-character incidence matrices weighted by their probabilities.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::alphabet::Alphabet;
use crate::automata::{Dfa, StateId};
use crate::error::{Error, Result};
use crate::linalg::RatMat;
use crate::rat::{rat_str, Rat};

/// The first-order homogeneous Markov chain induced by running a random
/// text through a DFA: exact initial distribution, exact transition matrix,
/// and the automaton's terminal classes reindexed over chain states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovEmbedding {
    state_labels: Vec<String>,
    mu: Vec<Rat>,
    p: RatMat,
    classes: BTreeMap<String, BTreeSet<usize>>,
}

impl MarkovEmbedding {
    pub fn state_labels(&self) -> &[String] {
        &self.state_labels
    }

    pub fn len(&self) -> usize {
        self.state_labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state_labels.is_empty()
    }

    pub fn mu(&self) -> &[Rat] {
        &self.mu
    }

    pub fn p(&self) -> &RatMat {
        &self.p
    }

    pub fn classes(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.classes
    }

    pub fn class(&self, label: &str) -> Result<&BTreeSet<usize>> {
        self.classes
            .get(label)
            .ok_or_else(|| Error::UnknownClass(label.to_string()))
    }

    /// Union of the given classes as chain-state indices.
    pub fn class_union(&self, labels: &[&str]) -> Result<BTreeSet<usize>> {
        let mut set = BTreeSet::new();
        for l in labels {
            set.extend(self.class(l)?.iter().copied());
        }
        Ok(set)
    }

    /// Adds a derived class (for custom partitions of stop states).
    pub fn with_class(mut self, label: &str, states: BTreeSet<usize>) -> Result<Self> {
        if states.iter().any(|&s| s >= self.len()) {
            return Err(Error::UnknownClass(format!("{label}: state out of range")));
        }
        self.classes.insert(label.to_string(), states);
        Ok(self)
    }

    /// Matrix dump with exact `num/den` entries, one row per line.
    pub fn dump_p(&self) -> String {
        self.p
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(rat_str)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn dump_mu(&self) -> String {
        self.mu.iter().map(rat_str).collect::<Vec<_>>().join(" ")
    }
}

/// The 0/1 incidence matrix of edges labeled `c`, over all automaton states.
pub fn char_incidence(dfa: &Dfa, c: char) -> Result<Vec<Vec<u8>>> {
    let n = dfa.state_count();
    let mut m = vec![vec![0u8; n]; n];
    for u in 0..n {
        let v = dfa.step(StateId(u), c)?;
        m[u][v.0] = 1;
    }
    Ok(m)
}

/// Embeds a random text from `alphabet` into `dfa`.
///
/// The automaton must be accessible-pruned and defined over exactly the
/// alphabet's symbols.
pub fn embed(dfa: &Dfa, alphabet: &Alphabet) -> Result<MarkovEmbedding> {
    if dfa.symbols() != alphabet.symbols() {
        return Err(Error::AlphabetMismatch);
    }
    if !dfa.is_accessible() {
        let n = dfa.prune_accessible().state_count();
        return Err(Error::NotPruned(n));
    }

    // Chain states: everything reachable by a non-empty string. Since the
    // automaton is accessible, that is every transition target; the initial
    // state is kept only if some edge comes back into it.
    let n = dfa.state_count();
    let mut has_incoming = vec![false; n];
    for u in 0..n {
        for sym in 0..alphabet.len() {
            has_incoming[dfa.step_by_index(u, sym)] = true;
        }
    }
    let chain_states: Vec<usize> = (0..n).filter(|&s| has_incoming[s]).collect();
    let chain_index: BTreeMap<usize, usize> = chain_states
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i))
        .collect();

    let m = chain_states.len();
    let mut mu = vec![Rat::zero(); m];
    for (sym, &c) in alphabet.symbols().iter().enumerate() {
        let v = dfa.step_by_index(dfa.initial().0, sym);
        mu[chain_index[&v]] += alphabet.prob(c)?.clone();
    }

    let mut p = RatMat::zero(m, m);
    for (i, &u) in chain_states.iter().enumerate() {
        for (sym, &c) in alphabet.symbols().iter().enumerate() {
            let v = dfa.step_by_index(u, sym);
            p.rows[i][chain_index[&v]] += alphabet.prob(c)?.clone();
        }
    }

    let classes = dfa
        .classes()
        .iter()
        .map(|(label, set)| {
            let set = set
                .iter()
                .filter_map(|s| chain_index.get(s).copied())
                .collect();
            (label.clone(), set)
        })
        .collect();

    let state_labels = chain_states
        .iter()
        .map(|&s| dfa.label(StateId(s)).to_string())
        .collect();

    Ok(MarkovEmbedding {
        state_labels,
        mu,
        p,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{aho_corasick, concat_modular, MATCH_CLASS};
    use crate::pattern::KeywordSet;
    use crate::rat::rat;
    use num_traits::One;

    fn binary(p: Rat) -> Alphabet {
        Alphabet::binary(p).unwrap()
    }

    fn ks(alphabet: &Alphabet, words: &[&str]) -> KeywordSet {
        KeywordSet::new(words.iter().map(|s| s.to_string()).collect(), alphabet).unwrap()
    }

    /// Builds the displayed 6x6 transition matrix for AC({ba, abba}).
    fn expected_p_baabba(p: Rat) -> Vec<Vec<Rat>> {
        let q = Rat::one() - p.clone();
        let z = Rat::zero();
        let pc = |v: &Rat| v.clone();
        vec![
            vec![pc(&p), z.clone(), pc(&q), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), pc(&q), z.clone(), pc(&p), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), pc(&p), pc(&q), z.clone()],
            vec![pc(&p), z.clone(), pc(&q), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), pc(&q), z.clone(), z.clone(), z.clone(), pc(&p)],
            vec![pc(&p), z.clone(), pc(&q), z.clone(), z.clone(), z.clone()],
        ]
    }

    #[test]
    fn embedding_of_baabba_matches_displayed_matrices() {
        for p in [rat(1, 2), rat(1, 3), rat(2, 7)] {
            let alphabet = binary(p.clone());
            let dfa = aho_corasick(&ks(&alphabet, &["ba", "abba"]), &alphabet).unwrap();
            let emb = embed(&dfa, &alphabet).unwrap();
            // The empty-string state is unreachable by a non-empty string.
            assert_eq!(
                emb.state_labels(),
                &["a", "b", "ab", "ba", "abb", "abba"]
            );
            let q = Rat::one() - p.clone();
            assert_eq!(
                emb.mu(),
                &[p.clone(), q, Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()]
            );
            assert_eq!(emb.p().rows, expected_p_baabba(p));
            assert!(emb.p().is_row_stochastic());
            // ba occurrences are visits to states ba and abba.
            assert_eq!(emb.class("w:ba").unwrap(), &BTreeSet::from([3, 5]));
            assert_eq!(emb.class("w:abba").unwrap(), &BTreeSet::from([5]));
        }
    }

    #[test]
    fn embedding_of_nc_modular_chain_matches_displayed_matrices() {
        let p = rat(1, 3);
        let q = rat(2, 3);
        let alphabet = binary(p.clone());
        let chain = concat_modular(
            &[ks(&alphabet, &["aa"]), ks(&alphabet, &["ba"])],
            &[1],
            &alphabet,
        )
        .unwrap();
        let nc = chain.make_renewal(MATCH_CLASS).unwrap();
        let emb = embed(&nc, &alphabet).unwrap();
        assert_eq!(
            emb.state_labels(),
            &["eps1", "a", "aa", "eps2", "b", "ba"]
        );
        let z = Rat::zero();
        let one = Rat::one();
        assert_eq!(
            emb.mu(),
            &[q.clone(), p.clone(), z.clone(), z.clone(), z.clone(), z.clone()]
        );
        let expected = vec![
            vec![q.clone(), p.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
            vec![q.clone(), z.clone(), p.clone(), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), one.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), p.clone(), q.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), z.clone(), q.clone(), p.clone()],
            vec![q.clone(), p.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
        ];
        assert_eq!(emb.p().rows, expected);
    }

    #[test]
    fn incidence_matrices_partition_the_table() {
        let alphabet = binary(rat(1, 2));
        let dfa = aho_corasick(&ks(&alphabet, &["abba"]), &alphabet).unwrap();
        let ga = char_incidence(&dfa, 'a').unwrap();
        let gb = char_incidence(&dfa, 'b').unwrap();
        for u in 0..dfa.state_count() {
            assert_eq!(ga[u].iter().map(|&x| x as u32).sum::<u32>(), 1);
            assert_eq!(gb[u].iter().map(|&x| x as u32).sum::<u32>(), 1);
        }
        // Every row of the summed incidence matrices sums to |A|.
        for u in 0..dfa.state_count() {
            let total: u32 = ga[u]
                .iter()
                .zip(&gb[u])
                .map(|(&x, &y)| (x + y) as u32)
                .sum();
            assert_eq!(total, 2);
        }
    }

    #[test]
    fn incidence_of_single_letter_automaton() {
        let alphabet = binary(rat(1, 2));
        let dfa = aho_corasick(&ks(&alphabet, &["a"]), &alphabet).unwrap();
        let gb = char_incidence(&dfa, 'b').unwrap();
        // Both states fall back to the empty-string state on b.
        let eps = dfa.labels().iter().position(|l| l == "eps").unwrap();
        for u in 0..2 {
            assert_eq!(gb[u][eps], 1);
        }
    }

    #[test]
    fn exact_prefix_distribution_matches_chain_marginals() {
        // The distribution of f(q, X_1..X_n), enumerated exactly, equals
        // mu * P^{n-1} for every n: the embedded process is the chain.
        let p = rat(1, 3);
        let alphabet = binary(p);
        let dfa = aho_corasick(&ks(&alphabet, &["ba", "abba"]), &alphabet).unwrap();
        let emb = embed(&dfa, &alphabet).unwrap();

        let mut marginal = emb.mu().to_vec();
        for n in 1..=8usize {
            // Enumerate all texts of length n with their weights.
            let mut by_state = vec![Rat::zero(); emb.len()];
            let symbols = alphabet.symbols().to_vec();
            let mut stack: Vec<(StateId, usize, Rat)> = vec![(dfa.initial(), 0, Rat::one())];
            while let Some((state, depth, w)) = stack.pop() {
                if depth == n {
                    let label = dfa.label(state).to_string();
                    let ci = emb
                        .state_labels()
                        .iter()
                        .position(|l| *l == label)
                        .unwrap();
                    by_state[ci] += w;
                    continue;
                }
                for &c in &symbols {
                    let next = dfa.step(state, c).unwrap();
                    stack.push((next, depth + 1, w.clone() * alphabet.prob(c).unwrap().clone()));
                }
            }
            assert_eq!(by_state, marginal, "marginal mismatch at n={n}");
            marginal = crate::linalg::vec_mat(&marginal, emb.p());
        }
    }
}
