//! Sparse multivariate and dense univariate polynomials over the exact
//! rationals, plus the fraction-free determinant used for transfer-matrix
//! solves.
//!
//! Multivariate polynomials carry a fixed variable count; by convention
//! variable 0 is the series variable (`x` or `z`) and variables 1.. are
//! mark variables (`y1`, `y2`, ...).

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{rat_str, Rat};

/// A sparse polynomial: exponent vector -> nonzero rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Polynomial::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Polynomial::constant(nvars, Rat::one())
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, coeff: Rat) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Polynomial::zero(nvars);
        if !coeff.is_zero() {
            p.terms.insert(exps, coeff);
        }
        p
    }

    /// The polynomial `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Polynomial::monomial(nvars, exps, Rat::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rat)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn constant_term(&self) -> Rat {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(Rat::zero);
            *entry += c.clone();
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Polynomial {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.clone(), k.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let entry = terms.entry(e).or_insert_with(Rat::zero);
                *entry += ca.clone() * cb.clone();
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Polynomial {
            nvars: self.nvars,
            terms,
        }
    }

    /// Exact division; errors when `other` does not divide `self`.
    ///
    /// Repeated leading-term cancellation under the exponent order. When a
    /// quotient exists the leading term of the running remainder is always
    /// divisible by the divisor's leading term, so the loop terminates.
    pub fn div_exact(&self, other: &Polynomial) -> Result<Polynomial> {
        assert_eq!(self.nvars, other.nvars);
        if other.is_zero() {
            return Err(Error::Config("division by zero polynomial".to_string()));
        }
        let (lead_e, lead_c) = other.terms.iter().next_back().unwrap();
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.nvars);
        while !rem.is_zero() {
            let (re, rc) = rem.terms.iter().next_back().unwrap();
            let qe: Option<Vec<u32>> = re
                .iter()
                .zip(lead_e)
                .map(|(a, b)| a.checked_sub(*b))
                .collect();
            let Some(qe) = qe else {
                return Err(Error::Config("inexact polynomial division".to_string()));
            };
            let qc = rc.clone() / lead_c.clone();
            let t = Polynomial::monomial(self.nvars, qe, qc);
            rem = rem.sub(&t.mul(other));
            quot = quot.add(&t);
        }
        Ok(quot)
    }

    /// Narrows to the first `nvars` variables; all dropped exponents must
    /// be zero.
    pub fn restrict_vars(&self, nvars: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                debug_assert!(e[nvars..].iter().all(|&x| x == 0));
                (e[..nvars].to_vec(), c.clone())
            })
            .collect();
        Polynomial { nvars, terms }
    }

    /// Substitutes 1 for each of the given variables.
    pub fn substitute_one(&self, vars: &[usize]) -> Polynomial {
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e = e.clone();
            for &v in vars {
                e[v] = 0;
            }
            let entry = terms.entry(e).or_insert_with(Rat::zero);
            *entry += c.clone();
        }
        terms.retain(|_, c| !c.is_zero());
        Polynomial {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            let k = Rat::from_integer(e[var].into()) * c.clone();
            let entry = terms.entry(e2).or_insert_with(Rat::zero);
            *entry += k;
        }
        terms.retain(|_, c| !c.is_zero());
        Polynomial {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars);
        let mut total = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    t *= point[v].pow(exp as i32);
                }
            }
            total += t;
        }
        total
    }

    /// Dense coefficients in the single remaining variable.
    pub fn to_univariate(&self, var: usize) -> Result<UniPoly> {
        let mut coeffs = vec![Rat::zero(); self.degree_in(var) as usize + 1];
        for (e, c) in &self.terms {
            let other_vars = e
                .iter()
                .enumerate()
                .any(|(v, &exp)| v != var && exp > 0);
            if other_vars {
                return Err(Error::Config(
                    "polynomial is not univariate".to_string(),
                ));
            }
            coeffs[e[var] as usize] += c.clone();
        }
        Ok(UniPoly::new(coeffs))
    }

    /// Renders with the given variable names.
    pub fn display(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            let abs = c.abs();
            if !abs.is_one() || e.iter().all(|&x| x == 0) {
                factors.push(rat_str(&abs));
            }
            for (v, &exp) in e.iter().enumerate() {
                match exp {
                    0 => {}
                    1 => factors.push(names[v].to_string()),
                    _ => factors.push(format!("{}^{}", names[v], exp)),
                }
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            parts.push((sign, factors.join("*")));
        }
        let mut out = String::new();
        for (i, (sign, term)) in parts.iter().enumerate() {
            if i == 0 {
                if *sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(if *sign == "-" { " - " } else { " + " });
            }
            out.push_str(term);
        }
        out
    }
}

/// Determinant of a square polynomial matrix by fraction-free (Bareiss)
/// elimination; every intermediate division is exact.
pub fn bareiss_det(matrix: &[Vec<Polynomial>]) -> Result<Polynomial> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::Config("empty matrix".to_string()));
    }
    let nvars = matrix[0][0].nvars();
    let mut m: Vec<Vec<Polynomial>> = matrix.to_vec();
    let mut sign = 1i32;
    let mut prev = Polynomial::one(nvars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !m[r][k].is_zero());
            match swap {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(Polynomial::zero(nvars)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.div_exact(&prev)?;
            }
            m[i][k] = Polynomial::zero(nvars);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if sign < 0 { det.neg() } else { det })
}

/// Dense univariate polynomial; index = exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rat::zero());
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly::new(vec![])
    }

    pub fn constant(c: Rat) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &Rat {
        self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        UniPoly::new(coeffs)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        UniPoly::new(coeffs)
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a.clone() * b.clone();
            }
        }
        UniPoly::new(coeffs)
    }

    pub fn scale(&self, c: &Rat) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|k| k.clone() * c.clone()).collect())
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, den: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!den.is_zero());
        let mut rem = self.clone();
        let dd = den.degree();
        if rem.is_zero() || rem.degree() < dd {
            return (UniPoly::zero(), rem);
        }
        let mut quot = vec![Rat::zero(); rem.degree() - dd + 1];
        while !rem.is_zero() && rem.degree() >= dd {
            let shift = rem.degree() - dd;
            let factor = rem.leading().clone() / den.leading().clone();
            quot[shift] = factor.clone();
            let mut coeffs = rem.coeffs.clone();
            for (i, c) in den.coeffs.iter().enumerate() {
                coeffs[i + shift] -= factor.clone() * c.clone();
            }
            // Force the leading coefficient to cancel exactly.
            coeffs.pop();
            rem = UniPoly::new(coeffs);
        }
        (UniPoly::new(quot), rem)
    }

    /// Monic greatest common divisor by Euclid's algorithm.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let lead = a.leading().clone();
            a.scale(&(Rat::one() / lead))
        }
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| Rat::from_integer(i.into()) * c.clone())
            .collect();
        UniPoly::new(coeffs)
    }

    /// Coefficients of p(a + t) as a polynomial in t.
    pub fn shift(&self, a: &Rat) -> UniPoly {
        // Horner in (a + t): acc = acc * (a + t) + c.
        let t = UniPoly::new(vec![a.clone(), Rat::one()]);
        let mut acc = UniPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&t).add(&UniPoly::constant(c.clone()));
        }
        acc
    }

    /// Lifts into the multivariate representation on variable `var`.
    pub fn to_multivariate(&self, nvars: usize, var: usize) -> Polynomial {
        let mut p = Polynomial::zero(nvars);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut e = vec![0u32; nvars];
            e[var] = k as u32;
            p = p.add(&Polynomial::monomial(nvars, e, c.clone()));
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn x() -> Polynomial {
        Polynomial::var(2, 0)
    }

    fn y() -> Polynomial {
        Polynomial::var(2, 1)
    }

    #[test]
    fn arithmetic_and_display() {
        let p = x().mul(&y()).add(&Polynomial::constant(2, rat(1, 2)));
        assert_eq!(p.display(&["x", "y"]), "x*y + 1/2");
        let q = p.sub(&p);
        assert!(q.is_zero());
        assert_eq!(p.eval(&[rat(2, 1), rat(3, 1)]), rat(13, 2));
    }

    #[test]
    fn exact_division_inverts_multiplication() {
        let a = x().add(&y()).mul(&x().sub(&Polynomial::one(2)));
        let b = x().add(&y());
        let q = a.div_exact(&b).unwrap();
        assert_eq!(q, x().sub(&Polynomial::one(2)));
        assert!(x().div_exact(&y()).is_err());
    }

    #[test]
    fn bareiss_matches_cofactor_on_small_matrices() {
        // det [[x, 1], [y, x]] = x^2 - y.
        let m = vec![
            vec![x(), Polynomial::one(2)],
            vec![y(), x()],
        ];
        let det = bareiss_det(&m).unwrap();
        assert_eq!(det, x().mul(&x()).sub(&y()));

        // A singular matrix has determinant zero.
        let m = vec![
            vec![x(), x()],
            vec![y(), y()],
        ];
        assert!(bareiss_det(&m).unwrap().is_zero());
    }

    #[test]
    fn bareiss_3x3_integer_check() {
        let c = |v: i64| Polynomial::constant(1, rat_int(v));
        let m = vec![
            vec![c(2), c(0), c(1)],
            vec![c(1), c(3), c(2)],
            vec![c(0), c(1), c(4)],
        ];
        let det = bareiss_det(&m).unwrap();
        assert_eq!(det.constant_term(), rat_int(2 * (12 - 2) + (1 - 0)));
    }

    #[test]
    fn unipoly_division_and_gcd() {
        // (x^2 - 1) / (x - 1) = x + 1.
        let num = UniPoly::new(vec![rat_int(-1), rat_int(0), rat_int(1)]);
        let den = UniPoly::new(vec![rat_int(-1), rat_int(1)]);
        let (q, r) = num.div_rem(&den);
        assert!(r.is_zero());
        assert_eq!(q, UniPoly::new(vec![rat_int(1), rat_int(1)]));

        let g = num.gcd(&den);
        assert_eq!(g, UniPoly::new(vec![rat_int(-1), rat_int(1)]));
    }

    #[test]
    fn shift_is_taylor_expansion() {
        // p(x) = x^2, p(1 + t) = 1 + 2t + t^2.
        let p = UniPoly::new(vec![rat_int(0), rat_int(0), rat_int(1)]);
        let shifted = p.shift(&rat_int(1));
        assert_eq!(
            shifted,
            UniPoly::new(vec![rat_int(1), rat_int(2), rat_int(1)])
        );
    }
}
