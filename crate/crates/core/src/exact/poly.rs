//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{self, q, Rational};
use crate::error::{Error, Result};

/// Ascending coefficient list with no trailing zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    #[serde(with = "rational::text_vec")]
    c: Vec<Rational>,
}

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(a: Rational) -> Self {
        Poly::new(vec![a])
    }

    /// The variable itself.
    pub fn x() -> Self {
        Poly::from_ints(&[0, 1])
    }

    /// `x + a`.
    pub fn linear(a: Rational) -> Self {
        Poly::new(vec![a, Rational::one()])
    }

    pub fn monomial(a: Rational, e: usize) -> Self {
        let mut c = vec![Rational::zero(); e + 1];
        c[e] = a;
        Poly::new(c)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.c.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.c.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, a: &Rational) -> Poly {
        Poly::new(self.c.iter().map(|x| x * a).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.c
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, a| acc * x + a)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * q(i as i64))
                .collect(),
        )
    }

    /// `p(x + a)`.
    pub fn shift(&self, a: &Rational) -> Poly {
        let lin = Poly::linear(a.clone());
        self.compose(&lin)
    }

    /// `p(other(x))`.
    pub fn compose(&self, other: &Poly) -> Poly {
        self.c
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, a| &(&acc * other) + &Poly::constant(a.clone()))
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let mut r = self.c.clone();
        let lead_inv = d.lead().recip();
        if r.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); r.len() - dd];
        for i in (0..quot.len()).rev() {
            let f = &r[i + dd] * &lead_inv;
            if f.is_zero() {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                r[i + j] -= &f * b;
            }
            quot[i] = f;
        }
        r.truncate(dd);
        Ok((Poly::new(quot), Poly::new(r)))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.monic(), b.monic());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y).expect("nonzero divisor");
            x = y;
            y = r.monic();
        }
        x.monic()
    }

    /// Reversed coefficient list padded to `deg`: `x^deg p(1/x)`.
    pub fn reversed(&self, deg: usize) -> Poly {
        let mut c = self.c.clone();
        c.resize(deg + 1, Rational::zero());
        c.reverse();
        Poly::new(c)
    }

    /// Product of the factors `(x + a_i)`.
    pub fn from_shifts(shifts: impl IntoIterator<Item = Rational>) -> Poly {
        shifts
            .into_iter()
            .fold(Poly::one(), |acc, a| &acc * &Poly::linear(a))
    }

    pub fn to_text(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let coef = rational::to_text(a);
            parts.push(match (i, coef.as_str()) {
                (0, _) => coef,
                (_, "1") => mono,
                (_, "-1") => format!("-{mono}"),
                _ => format!("{coef}*{mono}"),
            });
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text("x"))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.c.iter().map(|a| -a).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident, $t:ty) => {
        impl $tr for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t {
                (&self).$m(&o)
            }
        }
    };
}
pub(crate) use forward_owned;

forward_owned!(Add, add, Poly);
forward_owned!(Sub, sub, Poly);
forward_owned!(Mul, mul, Poly);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::qf;

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = Poly::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Poly::from_ints(&[0, 0]).degree(), None);
    }

    #[test]
    fn division_reassembles() {
        let a = Poly::from_ints(&[3, -1, 4, 1, 5]);
        let d = Poly::from_ints(&[2, 0, 7]);
        let (qt, r) = a.div_rem(&d).unwrap();
        assert_eq!(&(&qt * &d) + &r, a);
        assert!(r.degree() < d.degree());
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = Poly::from_ints(&[1, 1]);
        let a = &f * &Poly::from_ints(&[-2, 1]);
        let b = &f * &Poly::from_ints(&[5, 0, 1]);
        assert_eq!(Poly::gcd(&a, &b), f);
    }

    #[test]
    fn shift_and_eval_agree() {
        let p = Poly::from_ints(&[1, -3, 0, 2]);
        let s = p.shift(&qf(1, 2));
        assert_eq!(s.eval(&q(3)), p.eval(&qf(7, 2)));
    }

    #[test]
    fn serializes_as_text_array() {
        let p = Poly::new(vec![qf(1, 2), q(-3)]);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"["1/2","-3"]"#);
        let back: Poly = serde_json::from_str(r#"["1/2","-3"]"#).unwrap();
        assert_eq!(back, p);
    }
}
