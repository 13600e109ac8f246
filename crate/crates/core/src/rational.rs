//! Exact rational scalars and their string form.
//!
//! Rationals travel through JSON and the command line as `"p/q"` in lowest
//! terms, or `"p"` when the denominator is one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `p` or `p/q` with an optional leading sign. Surrounding whitespace is ignored.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::InvalidRational(text.to_string());
    let s = text.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = match den {
        Some(d) => {
            if d.starts_with(['+', '-']) {
                return Err(bad());
            }
            d.parse().map_err(|_| bad())?
        }
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Canonical string form, always in lowest terms.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // ratios of huge integers: scale down before converting
        let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
        let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// from the continued fraction expansion.
pub fn approximate(x: f64, max_den: i64) -> Rational {
    let exact = from_f64(x).expect("finite value");
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = exact.clone();
    loop {
        let a = rest.floor().to_integer();
        let k2 = &a * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            return Rational::new(h1, k1);
        }
        let h2 = &a * &h1 + &h0;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            return Rational::new(h1, k1);
        }
        rest = frac.recip();
    }
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Serde adapter storing a rational as its canonical string.
pub mod serde_string {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }
}

/// Serde adapter for a list of rationals stored as strings.
pub mod serde_string_vec {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&format_rational(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(D::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational(" 0/7 ").unwrap(), int(0));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "1/0", "a", "1/-2", "1.5", "1//2"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(format_rational(&ratio(6, -4)), "-3/2");
        assert_eq!(format_rational(&ratio(8, 4)), "2");
    }

    #[test]
    fn float_round_trip_is_exact() {
        let q = from_f64(0.1).unwrap();
        assert_eq!(to_f64(&q), 0.1);
    }

    #[test]
    fn continued_fraction_approximation() {
        assert_eq!(approximate(std::f64::consts::PI, 1000), ratio(355, 113));
        assert_eq!(approximate(-0.75, 1 << 20), ratio(-3, 4));
        assert_eq!(approximate(2.0, 10), int(2));
    }
}
