//! Exact finite-n distributions by matrix iteration: sooner-time PMFs,
//! which-pattern-first probabilities, joint count PMFs via mark-variable
//! transfer matrices, conditionals and moments.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::embedding::MarkovEmbedding;
use crate::error::{Error, Result};
use crate::linalg::{dot, solve, vec_mat, RatMat};
use crate::poly::Polynomial;
use crate::rat::Rat;

/// A probability table over integers with an explicit unaccounted tail, so
/// that listed mass plus tail is exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pmf {
    support: Vec<(u64, Rat)>,
    tail_mass: Rat,
}

impl Pmf {
    pub fn new(support: Vec<(u64, Rat)>) -> Result<Self> {
        let mut total = Rat::zero();
        for (_, p) in &support {
            if *p < Rat::zero() {
                return Err(Error::Config("negative probability".to_string()));
            }
            total += p.clone();
        }
        if total > Rat::one() {
            return Err(Error::Config(format!("probabilities sum to {total} > 1")));
        }
        Ok(Pmf {
            support,
            tail_mass: Rat::one() - total,
        })
    }

    pub fn support(&self) -> &[(u64, Rat)] {
        &self.support
    }

    pub fn prob_at(&self, n: u64) -> Rat {
        self.support
            .iter()
            .find(|(k, _)| *k == n)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn tail_mass(&self) -> &Rat {
        &self.tail_mass
    }

    pub fn mean_over_support(&self) -> Rat {
        self.support
            .iter()
            .map(|(n, p)| Rat::from_integer((*n).into()) * p.clone())
            .sum()
    }
}

/// An exact joint distribution of count vectors at a fixed text length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointPmf {
    entries: BTreeMap<Vec<u32>, Rat>,
    n: u64,
    mark_labels: Vec<String>,
}

impl JointPmf {
    pub fn new(entries: BTreeMap<Vec<u32>, Rat>, n: u64, mark_labels: Vec<String>) -> Result<Self> {
        let dim = mark_labels.len();
        let mut total = Rat::zero();
        for (counts, p) in &entries {
            if counts.len() != dim {
                return Err(Error::Config("count vector dimension mismatch".to_string()));
            }
            if counts.iter().any(|&c| c as u64 > n) {
                return Err(Error::Config("count exceeds text length".to_string()));
            }
            if *p < Rat::zero() {
                return Err(Error::Config("negative probability".to_string()));
            }
            total += p.clone();
        }
        if !total.is_one() {
            return Err(Error::Config(format!(
                "joint probabilities sum to {total}, not 1"
            )));
        }
        Ok(JointPmf {
            entries,
            n,
            mark_labels,
        })
    }

    pub fn entries(&self) -> &BTreeMap<Vec<u32>, Rat> {
        &self.entries
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mark_labels(&self) -> &[String] {
        &self.mark_labels
    }

    pub fn dim(&self) -> usize {
        self.mark_labels.len()
    }

    pub fn prob_at(&self, counts: &[u32]) -> Rat {
        self.entries.get(counts).cloned().unwrap_or_else(Rat::zero)
    }

    /// Exact mean vector and covariance matrix of the count vector.
    pub fn exact_moments(&self) -> (Vec<Rat>, RatMat) {
        let d = self.dim();
        let mut mean = vec![Rat::zero(); d];
        let mut second = RatMat::zero(d, d);
        for (counts, p) in &self.entries {
            for i in 0..d {
                let ci = Rat::from_integer(counts[i].into());
                mean[i] += ci.clone() * p.clone();
                for j in 0..d {
                    let cj = Rat::from_integer(counts[j].into());
                    second.rows[i][j] += ci.clone() * cj * p.clone();
                }
            }
        }
        let mut cov = second;
        for i in 0..d {
            for j in 0..d {
                let m = mean[i].clone() * mean[j].clone();
                cov.rows[i][j] -= m;
            }
        }
        (mean, cov)
    }
}

/// Internal view of a stop set: the complementary indices and the matrix
/// blocks of the absorbed walk.
struct StopDecomposition {
    keep: Vec<usize>,
    nu: Vec<Rat>,
    q: RatMat,
    /// Probability of entering the stop set in one step, per kept state.
    into_stop: Vec<Rat>,
    /// Initial mass already inside the stop set (sooner-time 1).
    initial_stop_mass: Rat,
    stop: BTreeSet<usize>,
}

fn decompose(emb: &MarkovEmbedding, stop_classes: &[&str]) -> Result<StopDecomposition> {
    let stop = emb.class_union(stop_classes)?;
    if stop.is_empty() {
        return Err(Error::UnknownClass("empty stop set".to_string()));
    }
    let keep: Vec<usize> = (0..emb.len()).filter(|s| !stop.contains(s)).collect();
    let nu: Vec<Rat> = keep.iter().map(|&s| emb.mu()[s].clone()).collect();
    let q = emb.p().submatrix(&keep, &keep);
    let into_stop: Vec<Rat> = keep
        .iter()
        .map(|&r| stop.iter().map(|&c| emb.p().rows[r][c].clone()).sum())
        .collect();
    let initial_stop_mass: Rat = stop.iter().map(|&s| emb.mu()[s].clone()).sum();
    Ok(StopDecomposition {
        keep,
        nu,
        q,
        into_stop,
        initial_stop_mass,
        stop,
    })
}

/// Distribution of the first time the chain enters any of the stop classes.
///
/// The mass at 1 comes straight from the initial distribution; for n >= 2
/// the walk stays outside the stop set for n-1 steps and enters at step n.
pub fn sooner_time_pmf(
    emb: &MarkovEmbedding,
    stop_classes: &[&str],
    n_max: u64,
) -> Result<Pmf> {
    if n_max < 1 {
        return Err(Error::Config("n_max must be at least 1".to_string()));
    }
    let dec = decompose(emb, stop_classes)?;
    let mut support = Vec::with_capacity(n_max as usize);
    support.push((1, dec.initial_stop_mass.clone()));
    let mut front = dec.nu.clone();
    for n in 2..=n_max {
        support.push((n, dot(&front, &dec.into_stop)));
        if n < n_max {
            front = vec_mat(&front, &dec.q);
        }
    }
    Pmf::new(support)
}

/// Splits the absorption event by which stop classes the absorbing state
/// belongs to.
///
/// Every stop state is keyed by the exact set of given classes containing
/// it (joined with `+` in the order supplied); the returned map sends each
/// realized outcome to its total absorption probability. Outcomes partition
/// the stop set, so the probabilities sum to one when absorption is
/// certain. Overlapping classes are how simultaneous completions surface:
/// a state in both classes is its own `a+b` outcome.
pub fn first_pattern_split(
    emb: &MarkovEmbedding,
    classes: &[&str],
) -> Result<BTreeMap<String, Rat>> {
    let dec = decompose(emb, classes)?;
    // Absorption mass per stop state: nu . (I - Q)^{-1} column + direct mu.
    // Solve y (I - Q) = nu, i.e. (I - Q)^T y^T = nu^T.
    let k = dec.keep.len();
    let mut it_q = RatMat::identity(k);
    for i in 0..k {
        for j in 0..k {
            let v = dec.q.rows[j][i].clone(); // transpose
            it_q.rows[i][j] -= v;
        }
    }
    let y = solve(&it_q, &dec.nu)?;

    let mut outcome_of_state: BTreeMap<usize, String> = BTreeMap::new();
    for &s in &dec.stop {
        let members: Vec<&str> = classes
            .iter()
            .filter(|c| emb.class(c).map(|set| set.contains(&s)).unwrap_or(false))
            .copied()
            .collect();
        outcome_of_state.insert(s, members.join("+"));
    }

    let mut out: BTreeMap<String, Rat> = BTreeMap::new();
    for &s in &dec.stop {
        let direct = emb.mu()[s].clone();
        let via_walk: Rat = dec
            .keep
            .iter()
            .enumerate()
            .map(|(i, &r)| y[i].clone() * emb.p().rows[r][s].clone())
            .sum();
        *out.entry(outcome_of_state[&s].clone())
            .or_insert_with(Rat::zero) += direct + via_walk;
    }
    Ok(out)
}

/// Joint distribution of visit counts to the marked classes over the first
/// `n` chain steps, via a polynomial transfer matrix.
///
/// A state inside several marked classes multiplies all their marks; the
/// initial step is marked too, so single-character completions count.
pub fn count_joint_pmf(
    emb: &MarkovEmbedding,
    marked: &[&str],
    n: u64,
) -> Result<JointPmf> {
    if n < 1 {
        return Err(Error::Config("n must be at least 1".to_string()));
    }
    let k = marked.len();
    let mark_sets: Vec<&BTreeSet<usize>> =
        marked.iter().map(|c| emb.class(c)).collect::<Result<_>>()?;

    // marks[s] = monomial of the marks carried by entering state s.
    let nvars = k;
    let state_mark = |s: usize| -> Polynomial {
        let mut exps = vec![0u32; nvars];
        for (j, set) in mark_sets.iter().enumerate() {
            if set.contains(&s) {
                exps[j] = 1;
            }
        }
        Polynomial::monomial(nvars, exps, Rat::one())
    };

    let m = emb.len();
    let mut front: Vec<Polynomial> = (0..m)
        .map(|s| state_mark(s).scale(&emb.mu()[s]))
        .collect();
    for _ in 1..n {
        let mut next = vec![Polynomial::zero(nvars); m];
        for (s, poly) in front.iter().enumerate() {
            if poly.is_zero() {
                continue;
            }
            for t in 0..m {
                let p_st = &emb.p().rows[s][t];
                if p_st.is_zero() {
                    continue;
                }
                let contrib = poly.mul(&state_mark(t)).scale(p_st);
                next[t] = next[t].add(&contrib);
            }
        }
        front = next;
    }

    let mut total = Polynomial::zero(nvars);
    for poly in &front {
        total = total.add(poly);
    }
    let entries: BTreeMap<Vec<u32>, Rat> = total
        .terms()
        .map(|(exps, coeff)| (exps.to_vec(), coeff.clone()))
        .collect();
    JointPmf::new(
        entries,
        n,
        marked.iter().map(|s| s.to_string()).collect(),
    )
}

/// Restricts a joint distribution to the entries matching the fixed
/// coordinates and renormalizes; the remaining free coordinate becomes the
/// support of the returned one-dimensional table.
pub fn conditional_pmf(joint: &JointPmf, fix: &[(usize, u32)]) -> Result<Pmf> {
    let d = joint.dim();
    let mut fixed = vec![None; d];
    for &(i, v) in fix {
        if i >= d {
            return Err(Error::Config(format!("mark index {i} out of range")));
        }
        fixed[i] = Some(v);
    }
    let free: Vec<usize> = (0..d).filter(|&i| fixed[i].is_none()).collect();
    if free.len() != 1 {
        return Err(Error::Config(format!(
            "conditioning must leave exactly one free coordinate, left {}",
            free.len()
        )));
    }
    let free = free[0];

    let mut mass = Rat::zero();
    let mut table: BTreeMap<u64, Rat> = BTreeMap::new();
    for (counts, p) in joint.entries() {
        let matches = fixed
            .iter()
            .enumerate()
            .all(|(i, f)| f.map_or(true, |v| counts[i] == v));
        if matches {
            mass += p.clone();
            *table.entry(counts[free] as u64).or_insert_with(Rat::zero) += p.clone();
        }
    }
    if mass.is_zero() {
        return Err(Error::ZeroProbabilityCondition);
    }
    let support = table
        .into_iter()
        .map(|(c, p)| (c, p / mass.clone()))
        .collect();
    Pmf::new(support)
}
