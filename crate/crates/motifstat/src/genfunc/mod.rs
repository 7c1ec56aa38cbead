//! Exact generating functions from embeddings: transfer-matrix resolvents,
//! sooner-time generating functions, series extraction, partial fractions,
//! dominant-pole asymptotics, central-limit parameters, autocorrelation
//! polynomials and the avoidance generating function.

mod asymptotics;
mod autocorr;
mod clt;
mod partial_fractions;

pub use asymptotics::{coeff_asymptotics, AsymptoticForm};
pub use autocorr::{autocorrelation, avoidance_gf};
pub use clt::{clt_params, CltParams};
pub use partial_fractions::{partial_fractions, PartialFractions, PoleTerm, Scalar};

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::embedding::MarkovEmbedding;
use crate::error::{Error, Result};
use crate::poly::{bareiss_det, Polynomial, UniPoly};
use crate::rat::Rat;

/// Default cap on the chain size a symbolic solve will attempt.
pub const DEFAULT_STATE_CAP: usize = 64;

/// An exact rational function; the numerator and denominator share a fixed
/// variable set (variable 0 is the series variable, the rest are marks).
#[derive(Debug, Clone)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Config("zero denominator".to_string()));
        }
        assert_eq!(num.nvars(), den.nvars());
        Ok(RationalFunction { num, den })
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        let nvars = p.nvars();
        RationalFunction {
            num: p,
            den: Polynomial::one(nvars),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    /// Equality by cross-multiplication; no normalization required.
    pub fn equivalent(&self, other: &RationalFunction) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    /// Substitutes 1 for every mark variable, keeping the series variable.
    pub fn at_marks_one(&self) -> RationalFunction {
        let vars: Vec<usize> = (1..self.nvars()).collect();
        RationalFunction {
            num: self.num.substitute_one(&vars),
            den: self.den.substitute_one(&vars),
        }
    }

    /// Partial derivative (quotient rule).
    pub fn derivative(&self, var: usize) -> RationalFunction {
        let num = self
            .num
            .derivative(var)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(var)));
        RationalFunction {
            num,
            den: self.den.mul(&self.den),
        }
    }

    pub fn eval(&self, point: &[Rat]) -> Result<Rat> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::Config("evaluation at a pole".to_string()));
        }
        Ok(self.num.eval(point) / d)
    }

    /// Univariate view (numerator, denominator); errors when marks remain.
    pub fn to_univariate(&self) -> Result<(UniPoly, UniPoly)> {
        Ok((self.num.to_univariate(0)?, self.den.to_univariate(0)?))
    }

    /// Reduces a univariate function by the polynomial gcd and makes the
    /// denominator's leading coefficient positive.
    pub fn normalized(&self) -> Result<RationalFunction> {
        let (num, den) = self.to_univariate()?;
        let (num, den) = normalize_pair(num, den);
        Ok(RationalFunction {
            num: num.to_multivariate(self.nvars(), 0),
            den: den.to_multivariate(self.nvars(), 0),
        })
    }

    /// Taylor coefficients `[x^0..x^n_max]` of a univariate function via the
    /// linear recurrence induced by the denominator.
    pub fn series_coeffs(&self, n_max: usize) -> Result<Vec<Rat>> {
        let (num, den) = self.to_univariate()?;
        series_from_pair(&num, &den, n_max)
    }

    /// Sum of rational functions (used to reconstruct decompositions).
    pub fn add_rf(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: self
                .num
                .mul(&other.den)
                .add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
    }

    pub fn display(&self, names: &[&str]) -> String {
        format!(
            "({}) / ({})",
            self.num.display(names),
            self.den.display(names)
        )
    }
}

pub(crate) fn normalize_pair(num: UniPoly, den: UniPoly) -> (UniPoly, UniPoly) {
    if num.is_zero() {
        return (UniPoly::zero(), UniPoly::constant(Rat::one()));
    }
    let g = num.gcd(&den);
    let (mut num, r1) = num.div_rem(&g);
    debug_assert!(r1.is_zero());
    let (mut den, r2) = den.div_rem(&g);
    debug_assert!(r2.is_zero());
    if den.leading().is_negative() {
        num = num.scale(&-Rat::one());
        den = den.scale(&-Rat::one());
    }
    (num, den)
}

pub(crate) fn series_from_pair(num: &UniPoly, den: &UniPoly, n_max: usize) -> Result<Vec<Rat>> {
    let d0 = den.coeff(0);
    if d0.is_zero() {
        return Err(Error::DenominatorVanishesAtZero);
    }
    let mut coeffs: Vec<Rat> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut c = num.coeff(n);
        for j in 1..=n.min(den.degree()) {
            let dj = den.coeff(j);
            if !dj.is_zero() {
                c -= dj * coeffs[n - j].clone();
            }
        }
        coeffs.push(c / d0.clone());
    }
    Ok(coeffs)
}

/// Mark monomial carried by a chain state: the product of the marks of
/// every marked class containing it.
fn state_mark(nvars: usize, mark_sets: &[&BTreeSet<usize>], s: usize) -> Polynomial {
    let mut exps = vec![0u32; nvars];
    for (j, set) in mark_sets.iter().enumerate() {
        if set.contains(&s) {
            exps[j + 1] = 1;
        }
    }
    Polynomial::monomial(nvars, exps, Rat::one())
}

/// Count-resolvent generating function
/// `F(x, y) = x * mu_y * (I - x P_y)^{-1} * 1`
/// where `P_y` multiplies entries into a marked class by that class's mark
/// (a column in several classes gets the product) and `mu_y` marks the
/// first step the same way.
///
/// The coefficient of `x^n y1^{m1} ... yk^{mk}` is the probability that the
/// counts after `n` characters equal `(m1, ..., mk)`.
pub fn resolvent_gf(emb: &MarkovEmbedding, marked: &[&str]) -> Result<RationalFunction> {
    resolvent_gf_capped(emb, marked, DEFAULT_STATE_CAP)
}

pub fn resolvent_gf_capped(
    emb: &MarkovEmbedding,
    marked: &[&str],
    cap: usize,
) -> Result<RationalFunction> {
    let m = emb.len();
    if m > cap {
        return Err(Error::StateCapExceeded { found: m, cap });
    }
    let mark_sets: Vec<&BTreeSet<usize>> =
        marked.iter().map(|c| emb.class(c)).collect::<Result<_>>()?;
    let nvars = 1 + marked.len();
    let x = Polynomial::var(nvars, 0);

    // A = I - x P_y.
    let mut a = vec![vec![Polynomial::zero(nvars); m]; m];
    for i in 0..m {
        for j in 0..m {
            let p_ij = &emb.p().rows[i][j];
            let mut entry = Polynomial::zero(nvars);
            if i == j {
                entry = entry.add(&Polynomial::one(nvars));
            }
            if !p_ij.is_zero() {
                let marked_step = state_mark(nvars, &mark_sets, j).scale(p_ij);
                entry = entry.sub(&x.mul(&marked_step));
            }
            a[i][j] = entry;
        }
    }

    let det = bareiss_det(&a)?;
    if det.is_zero() {
        return Err(Error::Config("singular transfer matrix".to_string()));
    }
    // Cramer: w_j = det(A with column j replaced by ones) / det(A);
    // F = x * sum_j mu_y(j) w_j.
    let mut acc = Polynomial::zero(nvars);
    for j in 0..m {
        let mu_j = &emb.mu()[j];
        if mu_j.is_zero() {
            continue;
        }
        let mut aj = a.clone();
        for (row, aj_row) in aj.iter_mut().enumerate() {
            let _ = row;
            aj_row[j] = Polynomial::one(nvars);
        }
        let det_j = bareiss_det(&aj)?;
        let mu_y = state_mark(nvars, &mark_sets, j).scale(mu_j);
        acc = acc.add(&mu_y.mul(&det_j));
    }
    RationalFunction::new(x.mul(&acc), det)
}

/// Sooner-time generating function `sum_n Prob[T = n] x^n` for entry into
/// the union of the stop classes: mass at 1 from the initial distribution,
/// and `x^2 nu (I - x Q)^{-1} (u + v)` for later entries.
pub fn sooner_gf(emb: &MarkovEmbedding, stop_classes: &[&str]) -> Result<RationalFunction> {
    sooner_gf_capped(emb, stop_classes, DEFAULT_STATE_CAP)
}

pub fn sooner_gf_capped(
    emb: &MarkovEmbedding,
    stop_classes: &[&str],
    cap: usize,
) -> Result<RationalFunction> {
    if emb.len() > cap {
        return Err(Error::StateCapExceeded {
            found: emb.len(),
            cap,
        });
    }
    let stop = emb.class_union(stop_classes)?;
    if stop.is_empty() {
        return Err(Error::UnknownClass("empty stop set".to_string()));
    }
    let keep: Vec<usize> = (0..emb.len()).filter(|s| !stop.contains(s)).collect();
    let initial_mass: Rat = stop.iter().map(|&s| emb.mu()[s].clone()).sum();

    let nvars = 1;
    let x = Polynomial::var(nvars, 0);
    let first = x.scale(&initial_mass);

    if keep.is_empty() {
        return Ok(RationalFunction::from_polynomial(first));
    }

    let k = keep.len();
    let mut a = vec![vec![Polynomial::zero(nvars); k]; k];
    for (i, &r) in keep.iter().enumerate() {
        for (j, &c) in keep.iter().enumerate() {
            let mut entry = Polynomial::zero(nvars);
            if i == j {
                entry = entry.add(&Polynomial::one(nvars));
            }
            let q_ij = &emb.p().rows[r][c];
            if !q_ij.is_zero() {
                entry = entry.sub(&x.scale(q_ij));
            }
            a[i][j] = entry;
        }
    }
    let into_stop: Vec<Rat> = keep
        .iter()
        .map(|&r| stop.iter().map(|&c| emb.p().rows[r][c].clone()).sum())
        .collect();

    let det = bareiss_det(&a)?;
    let mut acc = Polynomial::zero(nvars);
    for (j, &s) in keep.iter().enumerate() {
        let nu_j = emb.mu()[s].clone();
        if nu_j.is_zero() {
            continue;
        }
        let mut aj = a.clone();
        for (row, aj_row) in aj.iter_mut().enumerate() {
            aj_row[j] = Polynomial::constant(nvars, into_stop[row].clone());
        }
        let det_j = bareiss_det(&aj)?;
        acc = acc.add(&det_j.scale(&nu_j));
    }
    let x2 = x.mul(&x);
    let num = first.mul(&det).add(&x2.mul(&acc));
    RationalFunction::new(num, det)
}

/// Builds a rational function from string exponent/coefficient data; test
/// and report helper for pinning displayed formulas.
pub fn rf_from_unipolys(num: UniPoly, den: UniPoly) -> RationalFunction {
    RationalFunction {
        num: num.to_multivariate(1, 0),
        den: den.to_multivariate(1, 0),
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.equivalent(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::automata::{aho_corasick, concat_modular, MATCH_CLASS};
    use crate::distributions::{count_joint_pmf, sooner_time_pmf};
    use crate::embedding::embed;
    use crate::pattern::KeywordSet;
    use crate::rat::{rat, rat_int};

    fn baabba(p: Rat) -> (Alphabet, MarkovEmbedding) {
        let alphabet = Alphabet::binary(p).unwrap();
        let ks = KeywordSet::new(vec!["ba".into(), "abba".into()], &alphabet).unwrap();
        let dfa = aho_corasick(&ks, &alphabet).unwrap();
        let emb = embed(&dfa, &alphabet).unwrap();
        (alphabet, emb)
    }

    /// poly builder over (x, y1, y2): terms of (exps, coeff).
    fn poly3(terms: &[([u32; 3], Rat)]) -> Polynomial {
        let mut p = Polynomial::zero(3);
        for (e, c) in terms {
            p = p.add(&Polynomial::monomial(3, e.to_vec(), c.clone()));
        }
        p
    }

    #[test]
    fn resolvent_matches_displayed_two_mark_formula() {
        // F(x,y1,y2) for the {ba, abba} counts:
        //   num = p q^3 y1 (1-y2) x^4 + p q (y1 - 1) x^2 + x
        //   den = p q^3 y1 (y2-1) x^4 + p q^2 y1 (1-y2) x^3 + p q (1-y1) x^2 - x + 1
        for p in [rat(1, 2), rat(1, 3), rat(3, 5)] {
            let q = Rat::one() - p.clone();
            let (_, emb) = baabba(p.clone());
            let f = resolvent_gf(&emb, &["w:ba", "w:abba"]).unwrap();

            let pq3 = p.clone() * q.pow(3);
            let pq2 = p.clone() * q.pow(2);
            let pq = p.clone() * q.clone();
            let num = poly3(&[
                ([4, 1, 0], pq3.clone()),
                ([4, 1, 1], -pq3.clone()),
                ([2, 1, 0], pq.clone()),
                ([2, 0, 0], -pq.clone()),
                ([1, 0, 0], Rat::one()),
            ]);
            let den = poly3(&[
                ([4, 1, 1], pq3.clone()),
                ([4, 1, 0], -pq3.clone()),
                ([3, 1, 0], pq2.clone()),
                ([3, 1, 1], -pq2.clone()),
                ([2, 0, 0], pq.clone()),
                ([2, 1, 0], -pq.clone()),
                ([1, 0, 0], -Rat::one()),
                ([0, 0, 0], Rat::one()),
            ]);
            let expected = RationalFunction::new(num, den).unwrap();
            assert!(f.equivalent(&expected), "p = {p}");
        }
    }

    #[test]
    fn resolvent_at_marks_one_is_total_probability() {
        let (_, emb) = baabba(rat(1, 3));
        let f = resolvent_gf(&emb, &["w:ba", "w:abba"]).unwrap();
        let total = f.at_marks_one().normalized().unwrap();
        // x / (1 - x).
        let expected = rf_from_unipolys(
            UniPoly::new(vec![Rat::zero(), Rat::one()]),
            UniPoly::new(vec![Rat::one(), -Rat::one()]),
        );
        assert!(total.equivalent(&expected));
    }

    #[test]
    fn resolvent_matches_displayed_renewal_formula() {
        // NC chain for aa, one-gap, ba. F(x,y) =
        //   x (p^3 q y x^4 + p^2 q x^3 - q x + 1)
        //   / (1 - (p+2q) x + q x^2 + p^2 q x^3 - p^2 q^2 x^4 - p^3 q y x^5)
        for p in [rat(1, 2), rat(1, 3), rat(2, 7)] {
            let q = Rat::one() - p.clone();
            let alphabet = Alphabet::binary(p.clone()).unwrap();
            let m1 = KeywordSet::new(vec!["aa".into()], &alphabet).unwrap();
            let m2 = KeywordSet::new(vec!["ba".into()], &alphabet).unwrap();
            let chain = concat_modular(&[m1, m2], &[1], &alphabet).unwrap();
            let nc = chain.make_renewal(MATCH_CLASS).unwrap();
            let emb = embed(&nc, &alphabet).unwrap();
            let f = resolvent_gf(&emb, &[MATCH_CLASS]).unwrap();

            let poly2 = |terms: &[([u32; 2], Rat)]| {
                let mut p = Polynomial::zero(2);
                for (e, c) in terms {
                    p = p.add(&Polynomial::monomial(2, e.to_vec(), c.clone()));
                }
                p
            };
            let p2q = p.pow(2) * q.clone();
            let p3q = p.pow(3) * q.clone();
            let p2q2 = p.pow(2) * q.pow(2);
            let num = poly2(&[
                ([5, 1], p3q.clone()),
                ([4, 0], p2q.clone()),
                ([2, 0], -q.clone()),
                ([1, 0], Rat::one()),
            ]);
            let den = poly2(&[
                ([0, 0], Rat::one()),
                ([1, 0], -(p.clone() + q.clone() + q.clone())),
                ([2, 0], q.clone()),
                ([3, 0], p2q.clone()),
                ([4, 0], -p2q2.clone()),
                ([5, 1], -p3q.clone()),
            ]);
            let expected = RationalFunction::new(num, den).unwrap();
            assert!(f.equivalent(&expected), "p = {p}");
        }
    }

    #[test]
    fn sooner_gf_matches_displayed_formula() {
        // pq z^2 / ((1 - pz)(1 - qz)).
        for p in [rat(1, 2), rat(1, 3), rat(4, 7)] {
            let q = Rat::one() - p.clone();
            let (_, emb) = baabba(p.clone());
            let f = sooner_gf(&emb, &[MATCH_CLASS]).unwrap();
            let num = UniPoly::new(vec![Rat::zero(), Rat::zero(), p.clone() * q.clone()]);
            let den = UniPoly::new(vec![
                Rat::one(),
                -(p.clone() + q.clone()),
                p.clone() * q.clone(),
            ]);
            let expected = rf_from_unipolys(num, den);
            assert!(f.equivalent(&expected), "p = {p}");
            assert_eq!(f.eval(&[Rat::one()]).unwrap(), Rat::one());
        }
    }

    #[test]
    fn series_matches_matrix_iteration() {
        let (_, emb) = baabba(rat(1, 3));
        let f = sooner_gf(&emb, &[MATCH_CLASS]).unwrap();
        let series = f.series_coeffs(20).unwrap();
        let pmf = sooner_time_pmf(&emb, &[MATCH_CLASS], 20).unwrap();
        for n in 1..=20u64 {
            assert_eq!(series[n as usize], pmf.prob_at(n), "n = {n}");
        }
        assert!(series[0].is_zero());
    }

    #[test]
    fn resolvent_series_matches_count_marginals() {
        let (_, emb) = baabba(rat(1, 2));
        let f = resolvent_gf(&emb, &["w:ba", "w:abba"]).unwrap();
        // Set both marks to 0 to extract Prob[counts = (0,0)] as a series.
        // Substituting 0 for a mark keeps only terms with exponent 0.
        let nvars = f.nvars();
        let zero_marks = |p: &Polynomial| -> Polynomial {
            let mut out = Polynomial::zero(1);
            for (e, c) in p.terms() {
                if e[1] == 0 && e[2] == 0 {
                    out = out.add(&Polynomial::monomial(1, vec![e[0]], c.clone()));
                }
            }
            out
        };
        assert_eq!(nvars, 3);
        let f00 = RationalFunction::new(zero_marks(f.num()), zero_marks(f.den())).unwrap();
        let series = f00.series_coeffs(10).unwrap();
        for n in 1..=10u64 {
            let joint = count_joint_pmf(&emb, &["w:ba", "w:abba"], n).unwrap();
            assert_eq!(series[n as usize], joint.prob_at(&[0, 0]), "n = {n}");
        }
    }

    #[test]
    fn known_series_coefficients() {
        // [z^n] 1/(1-z)^2 = n + 1.
        let f = rf_from_unipolys(
            UniPoly::constant(Rat::one()),
            UniPoly::new(vec![rat_int(1), rat_int(-2), rat_int(1)]),
        );
        let series = f.series_coeffs(10).unwrap();
        for (n, c) in series.iter().enumerate() {
            assert_eq!(*c, rat_int(n as i64 + 1));
        }

        // [x^n] pq x^2/(1-x)^2 = (n-1) pq.
        let p = rat(1, 3);
        let q = rat(2, 3);
        let pq = p * q;
        let f = rf_from_unipolys(
            UniPoly::new(vec![Rat::zero(), Rat::zero(), pq.clone()]),
            UniPoly::new(vec![rat_int(1), rat_int(-2), rat_int(1)]),
        );
        let series = f.series_coeffs(12).unwrap();
        for n in 2..=12 {
            assert_eq!(series[n], rat_int(n as i64 - 1) * pq.clone());
        }

        // Denominator vanishing at zero is rejected.
        let bad = rf_from_unipolys(
            UniPoly::constant(Rat::one()),
            UniPoly::new(vec![Rat::zero(), Rat::one()]),
        );
        assert!(matches!(
            bad.series_coeffs(3),
            Err(Error::DenominatorVanishesAtZero)
        ));
    }

    #[test]
    fn state_cap_is_enforced() {
        let (_, emb) = baabba(rat(1, 2));
        assert!(matches!(
            resolvent_gf_capped(&emb, &[MATCH_CLASS], 3),
            Err(Error::StateCapExceeded { found: 6, cap: 3 })
        ));
    }
}
