//! Independent ground truth: naive scanners, exhaustive enumeration with
//! exact probability weights, and a seeded sampler.
//!
//! Nothing here touches the automata or matrix machinery; agreement between
//! this module and the engine is the backbone of the test suite.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Alphabet;
use crate::distributions::{JointPmf, Pmf};
use crate::error::{Error, Result};
use crate::pattern::KeywordSet;
use crate::rat::{rat_f64, Rat};

pub const DEFAULT_TEXT_BUDGET: u128 = 1 << 24;

/// How repeated occurrences are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    /// Every end position of every keyword counts.
    Overlap,
    /// Left-to-right scan; each match discards the matched word and
    /// everything to its left before counting continues.
    Renewal,
}

/// A sampled text with its exact probability under the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextSample {
    pub text: String,
    pub weight: Rat,
}

/// Per-keyword occurrence counts in a fixed text (keyword order follows the
/// set's sorted word list).
///
/// Overlap counts end positions of each keyword independently. Renewal
/// scans left to right over the whole set: at the earliest-ending match the
/// count of the matched keyword increments (ties go to the shorter
/// keyword) and the scan resumes just past that match.
pub fn scan_text(text: &str, keywords: &KeywordSet, mode: CountMode) -> Vec<usize> {
    let chars: Vec<char> = text.chars().collect();
    match mode {
        CountMode::Overlap => keywords
            .words()
            .iter()
            .map(|w| overlap_count(&chars, w))
            .collect(),
        CountMode::Renewal => renewal_counts(&chars, keywords),
    }
}

fn overlap_count(chars: &[char], word: &str) -> usize {
    let w: Vec<char> = word.chars().collect();
    if w.len() > chars.len() {
        return 0;
    }
    (0..=chars.len() - w.len())
        .filter(|&i| chars[i..i + w.len()] == w[..])
        .count()
}

fn renewal_counts(chars: &[char], keywords: &KeywordSet) -> Vec<usize> {
    let words: Vec<Vec<char>> = keywords
        .words()
        .iter()
        .map(|w| w.chars().collect())
        .collect();
    let mut counts = vec![0usize; words.len()];
    let mut start = 0usize; // matches must lie entirely in chars[start..]
    for end in 0..chars.len() {
        let mut best: Option<usize> = None;
        for (k, w) in words.iter().enumerate() {
            if w.len() > end + 1 - start {
                continue;
            }
            if chars[end + 1 - w.len()..=end] == w[..] {
                best = match best {
                    Some(b) if words[b].len() <= w.len() => Some(b),
                    _ => Some(k),
                };
            }
        }
        if let Some(k) = best {
            counts[k] += 1;
            start = end + 1;
        }
    }
    counts
}

/// Total renewal count of a modular pattern (keyword-set modules separated
/// by minimum-length gaps) by direct scanning.
pub fn modular_renewal_count(text: &str, modules: &[KeywordSet], gaps: &[u32]) -> usize {
    let chars: Vec<char> = text.chars().collect();
    let mut count = 0usize;
    let mut start = 0usize;
    while let Some(end) = earliest_modular_end(&chars, start, modules, gaps) {
        count += 1;
        start = end + 1;
    }
    count
}

/// Leftmost end position (0-based, inclusive) of a full modular match lying
/// inside `chars[start..]`.
fn earliest_modular_end(
    chars: &[char],
    start: usize,
    modules: &[KeywordSet],
    gaps: &[u32],
) -> Option<usize> {
    // Stage i collects the end positions where modules 0..=i can all have
    // completed, in order and honoring the minimum gaps.
    let mut prev_ends: Vec<usize> = Vec::new();
    for (i, module) in modules.iter().enumerate() {
        let mut ends = Vec::new();
        for end in start..chars.len() {
            let mut hit = false;
            for w in module.words() {
                let wl = w.chars().count();
                if end + 1 < start + wl {
                    continue;
                }
                let begin = end + 1 - wl;
                if begin < start {
                    continue;
                }
                if chars[begin..=end].iter().collect::<String>() != *w {
                    continue;
                }
                let ok = if i == 0 {
                    true
                } else {
                    // Previous stage must end at least gap+1 before this
                    // word's first character.
                    let gap = gaps[i - 1] as usize;
                    prev_ends.iter().any(|&e| e + gap + 1 <= begin)
                };
                if ok {
                    hit = true;
                    break;
                }
            }
            if hit {
                ends.push(end);
            }
        }
        if ends.is_empty() {
            return None;
        }
        prev_ends = ends;
    }
    prev_ends.first().copied()
}

/// True when some full modular match ends exactly at the last character.
pub fn modular_match_ending_here(chars: &[char], modules: &[KeywordSet], gaps: &[u32]) -> bool {
    let Some((last_module, rest)) = modules.split_last() else {
        return false;
    };
    if chars.is_empty() {
        return false;
    }
    let at = chars.len() - 1;
    for w in last_module.words() {
        let wl = w.chars().count();
        if wl > at + 1 {
            continue;
        }
        let begin = at + 1 - wl;
        if chars[begin..=at].iter().collect::<String>() != *w {
            continue;
        }
        if rest.is_empty() {
            return true;
        }
        let gap = gaps[gaps.len() - 1] as usize;
        if begin >= gap + 1
            && stage_completes_by(chars, rest, &gaps[..gaps.len() - 1], begin - gap - 1)
        {
            return true;
        }
    }
    false
}

/// Whether modules can all complete, in order with their gaps, by position
/// `by` (inclusive).
fn stage_completes_by(chars: &[char], modules: &[KeywordSet], gaps: &[u32], by: usize) -> bool {
    let Some((last, rest)) = modules.split_last() else {
        return true;
    };
    for end in 0..=by {
        for w in last.words() {
            let wl = w.chars().count();
            if wl > end + 1 {
                continue;
            }
            let begin = end + 1 - wl;
            if chars[begin..=end].iter().collect::<String>() != *w {
                continue;
            }
            if rest.is_empty() {
                return true;
            }
            let gap = gaps[gaps.len() - 1] as usize;
            if begin >= gap + 1
                && stage_completes_by(chars, rest, &gaps[..gaps.len() - 1], begin - gap - 1)
            {
                return true;
            }
        }
    }
    false
}

/// What the enumerating oracle counts.
pub enum CountTarget<'a> {
    /// Per-keyword counts under the given mode.
    Keywords(&'a KeywordSet, CountMode),
    /// Total renewal count of a modular pattern.
    Modular(&'a [KeywordSet], &'a [u32]),
}

/// Exact joint count distribution over all length-`n` texts.
pub fn enumerate_count_pmf(
    alphabet: &Alphabet,
    target: &CountTarget,
    n: usize,
    budget: u128,
) -> Result<JointPmf> {
    check_budget(alphabet, n, budget)?;
    let mark_labels: Vec<String> = match target {
        CountTarget::Keywords(ks, _) => ks.words().to_vec(),
        CountTarget::Modular(..) => vec!["match".to_string()],
    };
    let mut entries: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
    for_all_texts(alphabet, n, &mut |text, weight| {
        let counts: Vec<u32> = match target {
            CountTarget::Keywords(ks, mode) => scan_text(text, ks, *mode)
                .into_iter()
                .map(|c| c as u32)
                .collect(),
            CountTarget::Modular(modules, gaps) => {
                vec![modular_renewal_count(text, modules, gaps) as u32]
            }
        };
        *entries.entry(counts).or_insert_with(Rat::zero) += weight.clone();
    });
    JointPmf::new(entries, n as u64, mark_labels)
}

/// What stops the sooner-time scan.
pub enum StopCondition<'a> {
    /// Some keyword is a suffix of the scanned prefix.
    Keywords(&'a KeywordSet),
    /// Any of the given modular patterns completes at the current position.
    AnyModular(&'a [(Vec<KeywordSet>, Vec<u32>)]),
}

impl StopCondition<'_> {
    fn stopped(&self, prefix: &[char]) -> bool {
        match self {
            StopCondition::Keywords(ks) => {
                let text: String = prefix.iter().collect();
                ks.words().iter().any(|w| text.ends_with(w.as_str()))
            }
            StopCondition::AnyModular(pats) => pats
                .iter()
                .any(|(m, g)| modular_match_ending_here(prefix, m, g)),
        }
    }
}

/// Exact sooner-time distribution by walking the prefix tree, pruning
/// completed branches.
pub fn enumerate_sooner_pmf(
    alphabet: &Alphabet,
    stop: &StopCondition,
    n_max: usize,
    budget: u128,
) -> Result<Pmf> {
    check_budget(alphabet, n_max, budget)?;
    let mut probs = vec![Rat::zero(); n_max + 1];
    let mut prefix: Vec<char> = Vec::new();
    walk_sooner(alphabet, stop, n_max, &mut prefix, Rat::one(), &mut probs);
    let support: Vec<(u64, Rat)> = (1..=n_max as u64)
        .map(|n| (n, probs[n as usize].clone()))
        .collect();
    Pmf::new(support)
}

fn walk_sooner(
    alphabet: &Alphabet,
    stop: &StopCondition,
    n_max: usize,
    prefix: &mut Vec<char>,
    weight: Rat,
    probs: &mut [Rat],
) {
    let depth = prefix.len();
    if depth > 0 && stop.stopped(prefix) {
        probs[depth] += weight;
        return;
    }
    if depth == n_max {
        return;
    }
    for &c in alphabet.symbols() {
        prefix.push(c);
        let w = weight.clone() * alphabet.prob(c).unwrap().clone();
        walk_sooner(alphabet, stop, n_max, prefix, w, probs);
        prefix.pop();
    }
}

/// Applies `f` to every text of length `n` with its exact weight.
pub fn for_all_texts(alphabet: &Alphabet, n: usize, f: &mut dyn FnMut(&str, &Rat)) {
    let mut prefix = String::new();
    let mut weights = vec![Rat::one()];
    walk_texts(alphabet, n, &mut prefix, &mut weights, f);
}

fn walk_texts(
    alphabet: &Alphabet,
    n: usize,
    prefix: &mut String,
    weights: &mut Vec<Rat>,
    f: &mut dyn FnMut(&str, &Rat),
) {
    if prefix.chars().count() == n {
        f(prefix, weights.last().unwrap());
        return;
    }
    for &c in alphabet.symbols() {
        prefix.push(c);
        let w = weights.last().unwrap().clone() * alphabet.prob(c).unwrap().clone();
        weights.push(w);
        walk_texts(alphabet, n, prefix, weights, f);
        weights.pop();
        prefix.pop();
    }
}

fn check_budget(alphabet: &Alphabet, n: usize, budget: u128) -> Result<()> {
    let would = (alphabet.len() as u128).saturating_pow(n as u32);
    if would > budget {
        return Err(Error::TextBudgetExceeded { would, cap: budget });
    }
    Ok(())
}

/// Draws a length-`n` text; deterministic for a fixed seed.
pub fn sample_text(alphabet: &Alphabet, n: usize, seed: u64) -> TextSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cutoffs: Vec<f64> = alphabet
        .symbols()
        .iter()
        .scan(0.0, |acc, &c| {
            *acc += rat_f64(alphabet.prob(c).unwrap());
            Some(*acc)
        })
        .collect();
    let mut text = String::with_capacity(n);
    let mut weight = Rat::one();
    for _ in 0..n {
        let u: f64 = rng.gen();
        let idx = cutoffs
            .iter()
            .position(|&c| u < c)
            .unwrap_or(alphabet.len() - 1);
        let c = alphabet.symbols()[idx];
        text.push(c);
        weight *= alphabet.prob(c).unwrap().clone();
    }
    TextSample { text, weight }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn at_alphabet() -> Alphabet {
        Alphabet::uniform("AT").unwrap()
    }

    fn ks(alphabet: &Alphabet, words: &[&str]) -> KeywordSet {
        KeywordSet::new(words.iter().map(|s| s.to_string()).collect(), alphabet).unwrap()
    }

    #[test]
    fn overlap_counts_match_worked_example() {
        let a = at_alphabet();
        let set = ks(&a, &["ATA", "TATA"]);
        // Words are stored sorted: ATA then TATA.
        let counts = scan_text("ATATATATATA", &set, CountMode::Overlap);
        assert_eq!(counts, vec![5, 4]);
        assert_eq!(scan_text("", &set, CountMode::Overlap), vec![0, 0]);
    }

    #[test]
    fn renewal_counts_match_worked_example() {
        let a = at_alphabet();
        assert_eq!(
            scan_text("ATATATATATA", &ks(&a, &["TATA"]), CountMode::Renewal),
            vec![2]
        );
        assert_eq!(
            scan_text("ATATATATATA", &ks(&a, &["ATA"]), CountMode::Renewal),
            vec![3]
        );
    }

    #[test]
    fn modular_renewal_matches_worked_example() {
        let a = at_alphabet();
        let modules = vec![ks(&a, &["TA"]), ks(&a, &["TATA"])];
        assert_eq!(modular_renewal_count("ATATATATATA", &modules, &[1]), 1);
    }

    #[test]
    fn renewal_never_exceeds_overlap() {
        let a = Alphabet::binary(rat(1, 2)).unwrap();
        let set = ks(&a, &["aa", "ab"]);
        for_all_texts(&a, 7, &mut |text, _| {
            let overlap: usize = scan_text(text, &set, CountMode::Overlap).iter().sum();
            let renewal: usize = scan_text(text, &set, CountMode::Renewal).iter().sum();
            assert!(renewal <= overlap, "text {text}");
        });
    }

    #[test]
    fn enumeration_weights_sum_to_one() {
        let a = Alphabet::binary(rat(1, 3)).unwrap();
        let mut total = Rat::zero();
        for_all_texts(&a, 9, &mut |_, w| total += w.clone());
        assert_eq!(total, Rat::one());
    }

    #[test]
    fn sooner_enumeration_matches_closed_form() {
        // First occurrence of ba or abba at p = 1/2 has mass (n-1)/2^n.
        let a = Alphabet::binary(rat(1, 2)).unwrap();
        let set = ks(&a, &["ba", "abba"]);
        let pmf =
            enumerate_sooner_pmf(&a, &StopCondition::Keywords(&set), 14, 1 << 20).unwrap();
        for n in 2..=14u64 {
            assert_eq!(
                pmf.prob_at(n),
                rat((n - 1) as i64, 1) / rat(2, 1).pow(n as i32),
                "n = {n}"
            );
        }
    }

    #[test]
    fn stop_on_first_char_gives_point_mass() {
        let a = Alphabet::binary(rat(1, 4)).unwrap();
        let set = ks(&a, &["a", "b"]);
        let pmf =
            enumerate_sooner_pmf(&a, &StopCondition::Keywords(&set), 5, 1 << 20).unwrap();
        assert_eq!(pmf.prob_at(1), Rat::one());
        assert_eq!(pmf.tail_mass(), &Rat::zero());
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = Alphabet::binary(rat(1, 3)).unwrap();
        let s1 = sample_text(&a, 50, 42);
        let s2 = sample_text(&a, 50, 42);
        assert_eq!(s1, s2);
        assert_eq!(s1.weight, a.text_weight(&s1.text).unwrap());
        let s3 = sample_text(&a, 0, 7);
        assert_eq!(s3.text, "");
        assert_eq!(s3.weight, Rat::one());
    }

    #[test]
    fn budget_is_enforced() {
        let a = Alphabet::binary(rat(1, 2)).unwrap();
        let set = ks(&a, &["ab"]);
        let err = enumerate_count_pmf(
            &a,
            &CountTarget::Keywords(&set, CountMode::Overlap),
            30,
            1 << 10,
        );
        assert!(matches!(err, Err(Error::TextBudgetExceeded { .. })));
    }
}
