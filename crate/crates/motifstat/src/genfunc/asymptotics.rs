//! Dominant-pole coefficient asymptotics.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{rat_f64, Rat};

use super::partial_fractions::{partial_fractions, PoleTerm, Scalar};
use super::RationalFunction;

/// Leading asymptotic form `[x^n] f ~ constant * n^power * pole^{-n}`.
#[derive(Debug, Clone)]
pub struct AsymptoticForm {
    pub pole: Scalar,
    pub power: u32,
    pub constant: Scalar,
}

impl AsymptoticForm {
    pub fn estimate(&self, n: u64) -> f64 {
        let c = self.constant.to_c64().re;
        let rho = self.pole.to_c64().norm();
        c * (n as f64).powi(self.power as i32) * rho.powi(-(n as i32))
    }

    /// Exact estimate when the pole and constant are rational.
    pub fn estimate_exact(&self, n: u64) -> Option<Rat> {
        let c = self.constant.as_exact()?;
        let rho = self.pole.as_exact()?;
        let n_pow = Rat::from_integer(n.into()).pow(self.power as i32);
        Some(c.clone() * n_pow * rho.pow(-(n as i32)))
    }
}

/// Extracts the dominant-pole expansion of a univariate rational function.
///
/// The pole closest to the origin wins; among its terms the highest
/// multiplicity m gives `c n^{m-1} rho^{-n}`. Distinct poles tying at the
/// same modulus are refused (no single real asymptotic form exists).
pub fn coeff_asymptotics(rf: &RationalFunction) -> Result<AsymptoticForm> {
    let pf = partial_fractions(rf)?;
    if pf.terms.is_empty() {
        return Err(Error::Unsupported(
            "no poles: coefficients are eventually zero".to_string(),
        ));
    }
    let min_mod = pf
        .terms
        .iter()
        .map(|t| t.location.modulus())
        .fold(f64::INFINITY, f64::min);
    let dominant: Vec<&PoleTerm> = pf
        .terms
        .iter()
        .filter(|t| t.location.modulus() <= min_mod * (1.0 + 1e-9))
        .collect();
    let first_loc = &dominant[0].location;
    let all_same = dominant
        .iter()
        .all(|t| (t.location.to_c64() - first_loc.to_c64()).norm() < 1e-9 * (1.0 + min_mod));
    if !all_same {
        return Err(Error::AmbiguousDominantPole);
    }

    let lead = dominant
        .iter()
        .max_by_key(|t| t.multiplicity)
        .expect("nonempty");
    let m = lead.multiplicity;

    // c/(x-r)^m has [x^n] = c (-1)^m binom(n+m-1, m-1) r^{-(n+m)};
    // the leading constant of c n^{m-1} rho^{-n} is c (-1)^m / ((m-1)! r^m).
    let constant = match (&lead.coefficient, &lead.location) {
        (Scalar::Exact(c), Scalar::Exact(r)) => {
            let sign = if m % 2 == 0 { Rat::one() } else { -Rat::one() };
            let mut fact = Rat::one();
            for k in 1..m as i64 {
                fact *= Rat::from_integer(k.into());
            }
            Scalar::Exact(c.clone() * sign / (fact * r.pow(m as i32)))
        }
        _ => {
            let c = lead.coefficient.to_c64();
            let r = lead.location.to_c64();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let fact: f64 = (1..m as u64).map(|k| k as f64).product();
            Scalar::Numeric(c * sign / (fact * r.powu(m)))
        }
    };

    Ok(AsymptoticForm {
        pole: lead.location.clone(),
        power: m - 1,
        constant,
    })
}

/// Relative error of the leading asymptotic form against the exact
/// coefficient at n.
pub fn asymptotic_relative_error(
    rf: &RationalFunction,
    form: &AsymptoticForm,
    n: u64,
) -> Result<f64> {
    let coeffs = rf.series_coeffs(n as usize)?;
    let exact = rat_f64(&coeffs[n as usize]);
    if exact == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(((form.estimate(n) - exact) / exact).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfunc::rf_from_unipolys;
    use crate::poly::UniPoly;
    use crate::rat::{rat, rat_int};

    #[test]
    fn geometric_series_has_constant_form() {
        // 1/(1-x): [x^n] = 1 = 1 * n^0 * 1^{-n}.
        let rf = rf_from_unipolys(
            UniPoly::constant(Rat::one()),
            UniPoly::new(vec![rat_int(1), rat_int(-1)]),
        );
        let form = coeff_asymptotics(&rf).unwrap();
        assert_eq!(form.power, 0);
        assert_eq!(form.pole.as_exact().unwrap(), &rat_int(1));
        assert_eq!(form.constant.as_exact().unwrap(), &rat_int(1));
    }

    #[test]
    fn sooner_tail_rate_for_biased_source() {
        // p = 2/3: dominant pole at 1/p = 3/2, constant q/(p-q) = 1.
        let p = rat(2, 3);
        let q = rat(1, 3);
        let rf = rf_from_unipolys(
            UniPoly::new(vec![Rat::zero(), Rat::zero(), p.clone() * q.clone()]),
            UniPoly::new(vec![Rat::one(), -(p.clone() + q.clone()), p * q]),
        );
        let form = coeff_asymptotics(&rf).unwrap();
        assert_eq!(form.power, 0);
        assert_eq!(form.pole.as_exact().unwrap(), &rat(3, 2));
        assert_eq!(form.constant.as_exact().unwrap(), &rat_int(1));
        // Error shrinks with n.
        let e50 = asymptotic_relative_error(&rf, &form, 50).unwrap();
        let e100 = asymptotic_relative_error(&rf, &form, 100).unwrap();
        assert!(e100 < e50);
    }

    #[test]
    fn tied_distinct_poles_are_refused() {
        // 1/(1-x^2) has poles at +1 and -1, both modulus 1.
        let rf = rf_from_unipolys(
            UniPoly::constant(Rat::one()),
            UniPoly::new(vec![rat_int(1), rat_int(0), rat_int(-1)]),
        );
        assert!(matches!(
            coeff_asymptotics(&rf),
            Err(Error::AmbiguousDominantPole)
        ));
    }
}
