//! Big rationals and the `"p/q"` string form they travel in.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number. Always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Integer as a rational.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` in lowest terms. Panics on `d == 0`.
pub fn qf(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qbig(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Canonical text form: `"p/q"`, or `"p"` when `q == 1`.
pub fn to_text(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Inverse of [`to_text`]; accepts any sign placement `num-rational` accepts.
pub fn from_text(s: &str) -> Result<Rational> {
    let t = s.trim();
    let parsed = match t.split_once('/') {
        None => t.parse::<BigInt>().map(Rational::from_integer).ok(),
        Some((n, d)) => match (n.trim().parse::<BigInt>(), d.trim().parse::<BigInt>()) {
            (Ok(n), Ok(d)) if !d.is_zero() => Some(Rational::new(n, d)),
            _ => None,
        },
    };
    parsed.ok_or_else(|| Error::Invalid(format!("not a rational: {s:?}")))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn factorial_q(n: u64) -> Rational {
    qbig(factorial(n))
}

/// Binomial coefficient `C(n, k)` for integer `n` of either sign; zero for `k < 0`.
pub fn binomial(n: i64, k: i64) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc * q(n - i) / q(i + 1);
    }
    acc
}

/// Harmonic number `1 + 1/2 + ... + 1/k`.
pub fn harmonic(k: u64) -> Rational {
    (1..=k as i64).map(|i| qf(1, i)).sum()
}

/// `num^e` for a possibly negative exponent.
pub fn powi(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Serde adapter for a single rational stored as its text form.
pub mod text {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&to_text(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        from_text(&s).map_err(de::Error::custom)
    }
}

/// Serde adapter for a list of rationals.
pub mod text_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&to_text(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| from_text(s).map_err(de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_is_lowest_terms() {
        assert_eq!(to_text(&qf(6, -4)), "-3/2");
        assert_eq!(to_text(&qf(8, 4)), "2");
        assert_eq!(to_text(&q(0)), "0");
    }

    #[test]
    fn text_round_trip() {
        for r in [qf(-7, 3), q(5), qf(1, 1_000_000_007)] {
            assert_eq!(from_text(&to_text(&r)).unwrap(), r);
        }
        assert!(from_text("1/0").is_err());
        assert!(from_text("abc").is_err());
    }

    #[test]
    fn binomials_with_negative_top() {
        assert_eq!(binomial(5, 2), q(10));
        assert_eq!(binomial(-2, 3), q(-4));
        assert_eq!(binomial(3, 5), q(0));
    }

    #[test]
    fn harmonic_numbers() {
        assert_eq!(harmonic(0), q(0));
        assert_eq!(harmonic(3), qf(11, 6));
    }
}
