//! Autocorrelation polynomials and word-avoidance counting.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::UniPoly;
use crate::rat::Rat;

use super::{rf_from_unipolys, series_from_pair, RationalFunction};

/// Self-overlap structure of a word: bit n is 1 when the length-n prefix is
/// also a suffix, and the polynomial collects z^{n-1} over the set bits.
pub fn autocorrelation(word: &str) -> Result<(String, UniPoly)> {
    let chars: Vec<char> = word.chars().collect();
    if chars.is_empty() {
        return Err(Error::InvalidKeywords("empty word".to_string()));
    }
    let len = chars.len();
    let mut bits = String::with_capacity(len);
    let mut coeffs = vec![Rat::zero(); len];
    for n in 1..=len {
        let overlap = chars[..n] == chars[len - n..];
        bits.push(if overlap { '1' } else { '0' });
        if overlap {
            coeffs[n - 1] = Rat::one();
        }
    }
    Ok((bits, UniPoly::new(coeffs)))
}

/// Counts of strings avoiding a word, with the generating function
/// `sum f(n)/z^n = z Aut[x;z] / (1 + (z - s) Aut[x;z])` over an alphabet of
/// size `s`.
///
/// Returns the rational function in z and the counts f(0)..f(n_max),
/// extracted by rewriting the series in w = 1/z.
pub fn avoidance_gf(word: &str, s: u32, n_max: usize) -> Result<(RationalFunction, Vec<Rat>)> {
    if s < 2 {
        return Err(Error::InvalidAlphabet(
            "avoidance counting needs an alphabet of size at least 2".to_string(),
        ));
    }
    let (_, aut) = autocorrelation(word)?;
    // num = z * Aut[x;z]; den = 1 + (z - s) * Aut[x;z].
    let z = UniPoly::new(vec![Rat::zero(), Rat::one()]);
    let num = z.mul(&aut);
    let den = UniPoly::constant(Rat::one()).add(
        &z.sub(&UniPoly::constant(Rat::from_integer(s.into()))).mul(&aut),
    );
    let gf = rf_from_unipolys(num.clone(), den.clone());

    // In w = 1/z the series is (w^d num)(1/w) / (w^d den)(1/w) with
    // d = max degree; reversing coefficient order realizes the substitution.
    let d = num.degree().max(den.degree());
    let rev = |p: &UniPoly| -> UniPoly {
        let mut coeffs = vec![Rat::zero(); d + 1];
        for (k, c) in p.coeffs().iter().enumerate() {
            coeffs[d - k] = c.clone();
        }
        UniPoly::new(coeffs)
    };
    let counts = series_from_pair(&rev(&num), &rev(&den), n_max)?;
    Ok((gf, counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    #[test]
    fn worked_autocorrelations() {
        let (bits, poly) = autocorrelation("abbab").unwrap();
        assert_eq!(bits, "01001");
        // z + z^4.
        assert_eq!(
            poly,
            UniPoly::new(vec![
                rat_int(0),
                rat_int(1),
                rat_int(0),
                rat_int(0),
                rat_int(1)
            ])
        );

        let (bits, poly) = autocorrelation("aaa").unwrap();
        assert_eq!(bits, "111");
        assert_eq!(poly, UniPoly::new(vec![rat_int(1), rat_int(1), rat_int(1)]));

        let (bits, poly) = autocorrelation("x").unwrap();
        assert_eq!(bits, "1");
        assert_eq!(poly, UniPoly::constant(Rat::one()));
    }

    #[test]
    fn avoiding_aa_counts_like_fibonacci() {
        let (gf, counts) = avoidance_gf("aa", 2, 10).unwrap();
        // z(1+z) / (z^2 - z - 1).
        let expected = rf_from_unipolys(
            UniPoly::new(vec![rat_int(0), rat_int(1), rat_int(1)]),
            UniPoly::new(vec![rat_int(-1), rat_int(-1), rat_int(1)]),
        );
        assert!(gf.equivalent(&expected));
        let expected_counts: Vec<i64> = vec![1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144];
        for (n, c) in expected_counts.iter().enumerate() {
            assert_eq!(counts[n], rat_int(*c), "n = {n}");
        }
    }

    #[test]
    fn short_strings_avoid_trivially() {
        // f(n) = s^n for n < |word|.
        let (_, counts) = avoidance_gf("abab", 3, 3).unwrap();
        assert_eq!(counts[0], rat_int(1));
        assert_eq!(counts[1], rat_int(3));
        assert_eq!(counts[2], rat_int(9));
        assert_eq!(counts[3], rat_int(27));
    }

    #[test]
    fn avoidance_matches_brute_force() {
        // Binary alphabet, words aa and ab, n <= 12.
        for word in ["aa", "ab"] {
            let (_, counts) = avoidance_gf(word, 2, 12).unwrap();
            for n in 0..=12usize {
                let mut avoid = 0u64;
                for mask in 0..(1u64 << n) {
                    let text: String = (0..n)
                        .map(|i| if mask >> i & 1 == 0 { 'a' } else { 'b' })
                        .collect();
                    if !text.contains(word) {
                        avoid += 1;
                    }
                }
                assert_eq!(counts[n], rat_int(avoid as i64), "word {word}, n {n}");
            }
        }
    }
}
