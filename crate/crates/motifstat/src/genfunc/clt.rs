//! Central-limit parameters for count statistics: per-step mean and
//! covariance rates extracted from the resolvent's mark derivatives at the
//! pole x = 1.

use num_traits::{One, Zero};

use crate::embedding::MarkovEmbedding;
use crate::error::{Error, Result};
use crate::linalg::RatMat;
use crate::poly::UniPoly;
use crate::rat::Rat;

use super::{resolvent_gf_capped, normalize_pair, RationalFunction, DEFAULT_STATE_CAP};

/// Limits of E(S_n)/n and Cov(S_n)/n for the marked count vector: the
/// centered counts over sqrt(n) converge to a normal with these parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CltParams {
    pub mean_rate: Vec<Rat>,
    pub cov_rate: RatMat,
    pub det_sigma: Rat,
}

/// Computes mean and covariance rates for the marked classes.
///
/// The chain must have a single closed communicating class and be aperiodic
/// on it, so that x = 1 is the unique dominant pole and all corrections are
/// geometric.
pub fn clt_params(emb: &MarkovEmbedding, marked: &[&str]) -> Result<CltParams> {
    clt_params_capped(emb, marked, DEFAULT_STATE_CAP)
}

pub fn clt_params_capped(
    emb: &MarkovEmbedding,
    marked: &[&str],
    cap: usize,
) -> Result<CltParams> {
    if marked.is_empty() {
        return Err(Error::Config("need at least one marked class".to_string()));
    }
    check_ergodic(emb)?;
    let f = resolvent_gf_capped(emb, marked, cap)?;
    let d = marked.len();

    // First derivatives at marks = 1: E(S_n^i) = a_i n + (a_i + b_i) + o(1).
    let mut a = Vec::with_capacity(d);
    let mut b = Vec::with_capacity(d);
    for i in 0..d {
        let gf = f.derivative(1 + i).at_marks_one();
        let (g2, g1) = laurent_rates(&gf, 2)?;
        a.push(g2);
        b.push(g1);
    }

    // Second derivatives: diagonal entries are factorial moments
    // E(S(S-1)), off-diagonal are product moments E(S_i S_j).
    let mut cov = RatMat::zero(d, d);
    for i in 0..d {
        for j in i..d {
            let gf = f.derivative(1 + i).derivative(1 + j).at_marks_one();
            let (c, dd) = laurent_rates(&gf, 3)?;
            // The quadratic growth must cancel against the squared mean.
            let expected_c = Rat::from_integer(2.into()) * a[i].clone() * a[j].clone();
            if c != expected_c {
                return Err(Error::NotErgodic(format!(
                    "quadratic term mismatch for marks {i},{j}: variance rate diverges"
                )));
            }
            let rate = if i == j {
                // Var = E(S(S-1)) - E(S)(E(S) - 1).
                a[i].clone() * a[i].clone() + a[i].clone() + dd
                    - Rat::from_integer(2.into()) * a[i].clone() * b[i].clone()
            } else {
                // Cov = E(S_i S_j) - E(S_i) E(S_j).
                a[i].clone() * a[j].clone() + dd
                    - a[i].clone() * b[j].clone()
                    - a[j].clone() * b[i].clone()
            };
            cov.rows[i][j] = rate.clone();
            cov.rows[j][i] = rate;
        }
    }

    let det_sigma = det(&cov);
    check_psd(&cov)?;
    Ok(CltParams {
        mean_rate: a,
        cov_rate: cov,
        det_sigma,
    })
}

/// Coefficients of 1/(1-x)^{order} and 1/(1-x)^{order-1} in the Laurent
/// expansion of a univariate rational function at x = 1.
///
/// The function must have a pole of order at most `order` at 1 and no other
/// pole of modulus <= 1 (guaranteed by ergodicity for the GFs used here).
fn laurent_rates(gf: &RationalFunction, order: u32) -> Result<(Rat, Rat)> {
    let (num_raw, den_raw) = gf.to_univariate()?;
    if num_raw.is_zero() {
        return Ok((Rat::zero(), Rat::zero()));
    }
    let (num, den) = normalize_pair(num_raw, den_raw);
    // den = (x-1)^m * rest with rest(1) != 0.
    let linear = UniPoly::new(vec![-Rat::one(), Rat::one()]);
    let mut rest = den;
    let mut m = 0u32;
    loop {
        let (q, r) = rest.div_rem(&linear);
        if r.is_zero() {
            rest = q;
            m += 1;
        } else {
            break;
        }
    }
    if m > order {
        return Err(Error::NotErgodic(format!(
            "pole of order {m} at x=1 exceeds the expected {order}"
        )));
    }
    // G = (-1)^m num / ((1-x)^m rest); expand g(t) = (-1)^m num(1-t)/rest(1-t)
    // so that G = sum_i g_i / (1-x)^{m-i}.
    let flip = |p: &UniPoly| -> UniPoly {
        // p(1 - t) = shift to 1 then negate odd powers.
        let s = p.shift(&Rat::one());
        UniPoly::new(
            s.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    };
    let sign = if m % 2 == 0 { Rat::one() } else { -Rat::one() };
    let num_t = flip(&num).scale(&sign);
    let rest_t = flip(&rest);
    // Need coefficients of 1/(1-x)^order and 1/(1-x)^{order-1}: Laurent
    // indices m - i = order and order - 1, i.e. i = m - order (may be
    // negative: coefficient 0) and m - order + 1.
    let g = series_prefix(&num_t, &rest_t, m as usize);
    let pick = |target: i64| -> Rat {
        if target < 0 {
            Rat::zero()
        } else {
            g.get(target as usize).cloned().unwrap_or_else(Rat::zero)
        }
    };
    Ok((
        pick(m as i64 - order as i64),
        pick(m as i64 - order as i64 + 1),
    ))
}

fn series_prefix(num: &UniPoly, den: &UniPoly, order: usize) -> Vec<Rat> {
    let d0 = den.coeff(0);
    debug_assert!(!d0.is_zero());
    let mut out: Vec<Rat> = Vec::with_capacity(order);
    for i in 0..order {
        let mut c = num.coeff(i);
        for j in 1..=i {
            let dj = den.coeff(j);
            if !dj.is_zero() {
                c -= dj * out[i - j].clone();
            }
        }
        out.push(c / d0.clone());
    }
    out
}

/// Exact determinant by Gaussian elimination.
pub(crate) fn det(m: &RatMat) -> Rat {
    let n = m.nrows();
    let mut a: Vec<Vec<Rat>> = m.rows.clone();
    let mut det = Rat::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rat::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= a[col][col].clone();
        let inv = a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / inv.clone();
            for c in col..n {
                let v = a[r][c].clone() - f.clone() * a[col][c].clone();
                a[r][c] = v;
            }
        }
    }
    det
}

/// Positive semidefiniteness via principal minors (all subsets; the
/// dimension here is small).
fn check_psd(m: &RatMat) -> Result<()> {
    let n = m.nrows();
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub = m.submatrix(&idx, &idx);
        if det(&sub) < Rat::zero() {
            return Err(Error::NotErgodic(
                "covariance rate matrix has a negative principal minor".to_string(),
            ));
        }
    }
    Ok(())
}

/// Single closed communicating class, aperiodic.
fn check_ergodic(emb: &MarkovEmbedding) -> Result<()> {
    let n = emb.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| !emb.p().rows[i][j].is_zero())
                .collect()
        })
        .collect();
    let comp = scc(&adj);
    let ncomp = comp.iter().max().map_or(0, |&c| c + 1);
    // Closed components: no edge leaves them.
    let mut closed = vec![true; ncomp];
    for (u, next) in adj.iter().enumerate() {
        for &v in next {
            if comp[u] != comp[v] {
                closed[comp[u]] = false;
            }
        }
    }
    let closed_ids: Vec<usize> = (0..ncomp).filter(|&c| closed[c]).collect();
    if closed_ids.len() != 1 {
        return Err(Error::NotErgodic(format!(
            "{} closed communicating classes",
            closed_ids.len()
        )));
    }
    let class = closed_ids[0];
    let members: Vec<usize> = (0..n).filter(|&s| comp[s] == class).collect();
    if period_of(&adj, &members) != 1 {
        return Err(Error::NotErgodic("recurrent class is periodic".to_string()));
    }
    Ok(())
}

/// Kosaraju strongly connected components; returns a component id per node.
fn scc(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        if visited[start] {
            continue;
        }
        // Iterative post-order.
        let mut stack = vec![(start, 0usize)];
        visited[start] = true;
        while let Some(&mut (u, ref mut i)) = stack.last_mut() {
            if *i < adj[u].len() {
                let v = adj[u][*i];
                *i += 1;
                if !visited[v] {
                    visited[v] = true;
                    stack.push((v, 0));
                }
            } else {
                order.push(u);
                stack.pop();
            }
        }
    }
    let mut radj = vec![Vec::new(); n];
    for (u, next) in adj.iter().enumerate() {
        for &v in next {
            radj[v].push(u);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &u in order.iter().rev() {
        if comp[u] != usize::MAX {
            continue;
        }
        let mut stack = vec![u];
        comp[u] = c;
        while let Some(v) = stack.pop() {
            for &w in &radj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
        c += 1;
    }
    comp
}

/// Period of a strongly connected node set: gcd of level differences.
fn period_of(adj: &[Vec<usize>], members: &[usize]) -> u64 {
    use std::collections::VecDeque;
    let inside: std::collections::BTreeSet<usize> = members.iter().copied().collect();
    let root = members[0];
    let mut level: std::collections::BTreeMap<usize, u64> = [(root, 0)].into();
    let mut queue = VecDeque::from([root]);
    let mut g: u64 = 0;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !inside.contains(&v) {
                continue;
            }
            match level.get(&v) {
                None => {
                    level.insert(v, level[&u] + 1);
                    queue.push_back(v);
                }
                Some(&lv) => {
                    let diff = (level[&u] + 1).abs_diff(lv);
                    g = gcd(g, diff);
                }
            }
        }
    }
    if g == 0 {
        0
    } else {
        g
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::automata::aho_corasick;
    use crate::embedding::embed;
    use crate::pattern::KeywordSet;
    use crate::rat::rat;

    fn baabba(p: Rat) -> MarkovEmbedding {
        let alphabet = Alphabet::binary(p).unwrap();
        let ks = KeywordSet::new(vec!["ba".into(), "abba".into()], &alphabet).unwrap();
        let dfa = aho_corasick(&ks, &alphabet).unwrap();
        embed(&dfa, &alphabet).unwrap()
    }

    #[test]
    fn rates_match_closed_forms() {
        for p in [rat(1, 2), rat(1, 3), rat(2, 7)] {
            let q = Rat::one() - p.clone();
            let emb = baabba(p.clone());
            let params = clt_params(&emb, &["w:ba", "w:abba"]).unwrap();
            let pq = p.clone() * q.clone();
            assert_eq!(params.mean_rate[0], pq);
            assert_eq!(params.mean_rate[1], pq.clone() * pq.clone());
            // Var(S^1)/n -> pq (1 - 3pq).
            assert_eq!(
                params.cov_rate.rows[0][0],
                pq.clone() * (Rat::one() - rat(3, 1) * pq.clone())
            );
            // Var(S^2)/n -> p^2 q^2 (1 - 11 p q^2 + 13 p q^3 + 6 p^2 q^2).
            let p2q2 = pq.clone() * pq.clone();
            let expected_var2 = p2q2.clone()
                * (Rat::one() - rat(11, 1) * p.clone() * q.pow(2)
                    + rat(13, 1) * p.clone() * q.pow(3)
                    + rat(6, 1) * p2q2.clone());
            assert_eq!(params.cov_rate.rows[1][1], expected_var2);
            // Cov/n -> (p^2 q^2 / 2)(7p - pq - 5 + 9q^2).
            let expected_cov = p2q2.clone() / rat(2, 1)
                * (rat(7, 1) * p.clone() - pq.clone() - rat(5, 1) + rat(9, 1) * q.pow(2));
            assert_eq!(params.cov_rate.rows[0][1], expected_cov);
            // det Sigma = p^3 q^3 (1 - 5p + 14p^2 - 25p^3 + 28p^4 - 16p^5 + 4p^6).
            let poly = Rat::one() - rat(5, 1) * p.clone() + rat(14, 1) * p.pow(2)
                - rat(25, 1) * p.pow(3)
                + rat(28, 1) * p.pow(4)
                - rat(16, 1) * p.pow(5)
                + rat(4, 1) * p.pow(6);
            assert_eq!(params.det_sigma, p.pow(3) * q.pow(3) * poly);
        }
    }

    #[test]
    fn uniform_case_matches_numeric_table() {
        let emb = baabba(rat(1, 2));
        let params = clt_params(&emb, &["w:ba", "w:abba"]).unwrap();
        assert_eq!(params.mean_rate, vec![rat(1, 4), rat(1, 16)]);
        assert_eq!(params.cov_rate.rows[0], vec![rat(1, 16), rat(1, 64)]);
        assert_eq!(params.cov_rate.rows[1], vec![rat(1, 64), rat(13, 256)]);
        assert_eq!(params.det_sigma, rat(3, 1024));
    }

    #[test]
    fn absorbing_chain_is_rejected() {
        let alphabet = Alphabet::binary(rat(1, 2)).unwrap();
        let ks = KeywordSet::new(vec!["ab".into()], &alphabet).unwrap();
        let dfa = aho_corasick(&ks, &alphabet).unwrap();
        let st = dfa.make_absorbing("match").unwrap();
        let emb = embed(&st, &alphabet).unwrap();
        assert!(matches!(
            clt_params(&emb, &["match"]),
            Err(Error::NotErgodic(_))
        ));
    }
}
