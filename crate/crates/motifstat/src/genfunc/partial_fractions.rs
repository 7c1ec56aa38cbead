//! Partial fraction decomposition of univariate rational functions.
//!
//! Rational poles are found exactly (squarefree decomposition, then root
//! reconstruction verified by exact evaluation); anything left over is
//! isolated numerically and labeled as such.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::UniPoly;
use crate::rat::{rat_f64, rat_str, Rat};

use super::{normalize_pair, RationalFunction};

const NUMERIC_TOL: f64 = 1e-12;

/// An exact rational or numeric complex value.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(Rat),
    Numeric(Complex64),
}

impl Scalar {
    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(r) => Complex64::new(rat_f64(r), 0.0),
            Scalar::Numeric(z) => *z,
        }
    }

    pub fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }

    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Numeric(_) => None,
        }
    }

    pub fn display(&self) -> String {
        match self {
            Scalar::Exact(r) => rat_str(r),
            Scalar::Numeric(z) => format!("{}+{}i", z.re, z.im),
        }
    }
}

/// One term `coefficient / (x - location)^multiplicity`.
#[derive(Debug, Clone)]
pub struct PoleTerm {
    pub location: Scalar,
    pub multiplicity: u32,
    pub coefficient: Scalar,
}

/// A decomposition `f = polynomial_part + sum of pole terms`.
#[derive(Debug, Clone)]
pub struct PartialFractions {
    pub polynomial_part: UniPoly,
    pub terms: Vec<PoleTerm>,
}

impl PartialFractions {
    /// Rebuilds the sum as a rational function; only possible when every
    /// term is exact.
    pub fn reconstruct_exact(&self) -> Option<RationalFunction> {
        let mut acc = RationalFunction::from_polynomial(
            self.polynomial_part.to_multivariate(1, 0),
        );
        for term in &self.terms {
            let r = term.location.as_exact()?;
            let c = term.coefficient.as_exact()?;
            // (x - r)^multiplicity
            let linear = UniPoly::new(vec![-r.clone(), Rat::one()]);
            let mut den = UniPoly::constant(Rat::one());
            for _ in 0..term.multiplicity {
                den = den.mul(&linear);
            }
            let rf = super::rf_from_unipolys(UniPoly::constant(c.clone()), den);
            acc = acc.add_rf(&rf);
        }
        Some(acc)
    }

    /// Numeric value of the decomposition at a real point.
    pub fn eval_f64(&self, x: f64) -> Complex64 {
        let mut total = Complex64::new(
            self.polynomial_part
                .coeffs()
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * x + rat_f64(c)),
            0.0,
        );
        for t in &self.terms {
            let base = Complex64::new(x, 0.0) - t.location.to_c64();
            total += t.coefficient.to_c64() / base.powu(t.multiplicity);
        }
        total
    }
}

/// Decomposes a univariate rational function into a polynomial part plus
/// pole terms. Terms with zero coefficient are dropped.
pub fn partial_fractions(rf: &RationalFunction) -> Result<PartialFractions> {
    let (num_raw, den_raw) = rf.to_univariate()?;
    if den_raw.is_zero() {
        return Err(Error::Config("zero denominator".to_string()));
    }
    let (num, den) = normalize_pair(num_raw, den_raw);
    let (poly_part, rem) = num.div_rem(&den);
    if rem.is_zero() {
        return Ok(PartialFractions {
            polynomial_part: poly_part,
            terms: Vec::new(),
        });
    }

    let mut terms = Vec::new();
    for root in isolate_roots(&den)? {
        match root {
            (Scalar::Exact(r), m) => {
                terms.extend(exact_pole_terms(&rem, &den, &r, m));
            }
            (Scalar::Numeric(z), m) => {
                terms.extend(numeric_pole_terms(&rem, &den, z, m));
            }
        }
    }
    Ok(PartialFractions {
        polynomial_part: poly_part,
        terms,
    })
}

/// All roots of `p` with multiplicities; exact rationals where possible.
pub(crate) fn isolate_roots(p: &UniPoly) -> Result<Vec<(Scalar, u32)>> {
    let mut out = Vec::new();
    for (factor, mult) in squarefree_decomposition(p) {
        if factor.degree() == 0 {
            continue;
        }
        let mut remaining = factor;
        // Peel off exact rational roots first.
        loop {
            if remaining.degree() == 0 {
                break;
            }
            let guesses = durand_kerner(&remaining)?;
            let mut found_exact = false;
            for z in &guesses {
                if z.im.abs() > 1e-7 {
                    continue;
                }
                if let Some(r) = reconstruct_rational(z.re) {
                    if remaining.eval(&r).is_zero() {
                        out.push((Scalar::Exact(r.clone()), mult));
                        let linear = UniPoly::new(vec![-r, Rat::one()]);
                        let (q, rem) = remaining.div_rem(&linear);
                        debug_assert!(rem.is_zero());
                        remaining = q;
                        found_exact = true;
                        break;
                    }
                }
            }
            if !found_exact {
                // Everything left is irrational; report the numeric roots.
                for z in durand_kerner(&remaining)? {
                    out.push((Scalar::Numeric(z), mult));
                }
                break;
            }
        }
    }
    Ok(out)
}

/// Yun's squarefree decomposition: factors paired with multiplicities.
fn squarefree_decomposition(p: &UniPoly) -> Vec<(UniPoly, u32)> {
    if p.degree() == 0 {
        return vec![];
    }
    let dp = p.derivative();
    let g = p.gcd(&dp);
    let (mut c, _) = p.div_rem(&g);
    let (gp, _) = dp.div_rem(&g);
    let mut d = gp.sub(&c.derivative());
    let mut out = Vec::new();
    let mut i = 1u32;
    while c.degree() > 0 {
        let a = c.gcd(&d);
        if a.degree() > 0 {
            out.push((a.clone(), i));
        }
        let (c_next, _) = c.div_rem(&a);
        let (dq, _) = d.div_rem(&a);
        d = dq.sub(&c_next.derivative());
        c = c_next;
        i += 1;
    }
    out
}

/// Durand-Kerner iteration on a squarefree polynomial.
fn durand_kerner(p: &UniPoly) -> Result<Vec<Complex64>> {
    let deg = p.degree();
    if deg == 0 {
        return Ok(vec![]);
    }
    let lead = rat_f64(p.leading());
    let coeffs: Vec<Complex64> = p
        .coeffs()
        .iter()
        .map(|c| Complex64::new(rat_f64(c) / lead, 0.0))
        .collect();
    let eval = |z: Complex64| -> Complex64 {
        coeffs.iter().rev().fold(Complex64::ZERO, |acc, c| acc * z + c)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|i| seed.powu(i as u32 + 1)).collect();
    for _ in 0..600 {
        let mut delta_max = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::ONE;
            for j in 0..deg {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                denom = Complex64::new(1e-300, 0.0);
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta_max = delta_max.max(step.norm());
        }
        if delta_max < 1e-15 {
            break;
        }
    }
    for &z in &roots {
        let scale = 1.0 + z.norm().powi(deg as i32);
        if eval(z).norm() > NUMERIC_TOL * scale {
            return Err(Error::RootIsolation);
        }
    }
    roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(roots)
}

/// Continued-fraction reconstruction of a nearby rational, verified later
/// by exact evaluation.
fn reconstruct_rational(x: f64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0) = (num_bigint::BigInt::from(1), num_bigint::BigInt::from(0));
    let (mut p1, mut q1) = (
        num_bigint::BigInt::from(x.floor() as i64),
        num_bigint::BigInt::from(1),
    );
    let mut frac = x - x.floor();
    for _ in 0..40 {
        let approx = Rat::new(p1.clone(), q1.clone());
        if (rat_f64(&approx) - x).abs() < 1e-11 * (1.0 + x.abs()) {
            return Some(approx);
        }
        if frac.abs() < 1e-13 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if !a.is_finite() || a.abs() > 1e15 {
            break;
        }
        frac = inv - a;
        let ai = num_bigint::BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if q1 > num_bigint::BigInt::from(1_000_000_000_000i64) {
            break;
        }
    }
    let approx = Rat::new(p1, q1);
    ((rat_f64(&approx) - x).abs() < 1e-11 * (1.0 + x.abs())).then_some(approx)
}

/// Terms for an exact pole: Taylor coefficients of num/R at the root,
/// where R is the denominator with the pole's factor divided out.
fn exact_pole_terms(num: &UniPoly, den: &UniPoly, r: &Rat, m: u32) -> Vec<PoleTerm> {
    let linear = UniPoly::new(vec![-r.clone(), Rat::one()]);
    let mut rest = den.clone();
    for _ in 0..m {
        let (q, rem) = rest.div_rem(&linear);
        debug_assert!(rem.is_zero());
        rest = q;
    }
    // g(t) = num(r+t) / rest(r+t) mod t^m; coefficient g_i multiplies
    // 1/(x-r)^{m-i}.
    let num_t = num.shift(r);
    let rest_t = rest.shift(r);
    let g = series_divide(&num_t, &rest_t, m as usize);
    g.into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| PoleTerm {
            location: Scalar::Exact(r.clone()),
            multiplicity: m - i as u32,
            coefficient: Scalar::Exact(c),
        })
        .collect()
}

fn series_divide(num: &UniPoly, den: &UniPoly, order: usize) -> Vec<Rat> {
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

/// Same computation with complex arithmetic for numeric poles.
fn numeric_pole_terms(num: &UniPoly, den: &UniPoly, z: Complex64, m: u32) -> Vec<PoleTerm> {
    let to_c = |p: &UniPoly| -> Vec<Complex64> {
        p.coeffs()
            .iter()
            .map(|c| Complex64::new(rat_f64(c), 0.0))
            .collect()
    };
    // Synthetic division by (x - z), m times.
    let mut rest = to_c(den);
    for _ in 0..m {
        rest = synthetic_divide(&rest, z);
    }
    let num_t = complex_shift(&to_c(num), z);
    let rest_t = complex_shift(&rest, z);
    let mut g = Vec::with_capacity(m as usize);
    for i in 0..m as usize {
        let mut c = *num_t.get(i).unwrap_or(&Complex64::ZERO);
        for j in 1..=i {
            c -= rest_t.get(j).copied().unwrap_or(Complex64::ZERO) * g[i - j];
        }
        g.push(c / rest_t[0]);
    }
    g.into_iter()
        .enumerate()
        .filter(|(_, c): &(usize, Complex64)| c.norm() > 1e-13)
        .map(|(i, c)| PoleTerm {
            location: Scalar::Numeric(z),
            multiplicity: m - i as u32,
            coefficient: Scalar::Numeric(c),
        })
        .collect()
}

fn synthetic_divide(coeffs: &[Complex64], z: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; coeffs.len().saturating_sub(1)];
    let mut carry = Complex64::ZERO;
    for i in (0..coeffs.len()).rev() {
        let v = coeffs[i] + carry;
        if i == 0 {
            break; // remainder, expected ~0
        }
        out[i - 1] = v;
        carry = v * z;
    }
    out
}

fn complex_shift(coeffs: &[Complex64], z: Complex64) -> Vec<Complex64> {
    // Repeated synthetic division gives the Taylor coefficients at z.
    let mut work = coeffs.to_vec();
    let mut out = Vec::with_capacity(coeffs.len());
    for _ in 0..coeffs.len() {
        // Divide by (x - z): remainder is the next Taylor coefficient.
        let mut carry = Complex64::ZERO;
        let mut quotient = vec![Complex64::ZERO; work.len().saturating_sub(1)];
        for i in (0..work.len()).rev() {
            let v = work[i] + carry;
            if i == 0 {
                out.push(v);
            } else {
                quotient[i - 1] = v;
                carry = v * z;
            }
        }
        if quotient.is_empty() {
            break;
        }
        work = quotient;
    }
    out
}

/// Numeric check that a decomposition reproduces the function: max residual
/// over sample points away from poles.
pub fn decomposition_residual(rf: &RationalFunction, pf: &PartialFractions) -> Result<f64> {
    let (num, den) = rf.to_univariate()?;
    let mut worst = 0.0f64;
    for k in 0..24 {
        let x = -1.37 + 0.11 * k as f64;
        let d: f64 = den
            .coeffs()
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rat_f64(c));
        if d.abs() < 1e-6 {
            continue;
        }
        let n: f64 = num
            .coeffs()
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rat_f64(c));
        let direct = n / d;
        let via = pf.eval_f64(x);
        let scale = 1.0 + direct.abs();
        worst = worst.max((via - Complex64::new(direct, 0.0)).norm() / scale);
    }
    Ok(worst)
}
