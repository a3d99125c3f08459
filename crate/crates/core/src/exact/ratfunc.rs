//! Reduced quotients of polynomials.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{forward_owned, Poly};
use super::rational::Rational;
use super::series::Series;
use crate::error::{Error, Result};

/// `num / den` with `den` monic and coprime to `num`. The zero function has
/// denominator 1, so structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRatFunc")]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

#[derive(Deserialize)]
struct RawRatFunc {
    num: Poly,
    den: Poly,
}

impl TryFrom<RawRatFunc> for RatFunc {
    type Error = Error;
    fn try_from(r: RawRatFunc) -> Result<RatFunc> {
        RatFunc::new(r.num, r.den)
    }
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        let g = Poly::gcd(&num, &den);
        let (n, _) = num.div_rem(&g)?;
        let (d, _) = den.div_rem(&g)?;
        let lead = d.lead().recip();
        Ok(RatFunc {
            num: n.scale(&lead),
            den: d.scale(&lead),
        })
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: Rational) -> RatFunc {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn zero() -> RatFunc {
        RatFunc::from_poly(Poly::zero())
    }

    pub fn one() -> RatFunc {
        RatFunc::from_poly(Poly::one())
    }

    pub fn x() -> RatFunc {
        RatFunc::from_poly(Poly::x())
    }

    /// `1 / (x + a)^k`.
    pub fn pole(a: Rational, k: usize) -> RatFunc {
        RatFunc {
            num: Poly::one(),
            den: Poly::linear(a).pow(k),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn scale(&self, a: &Rational) -> RatFunc {
        if a.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(a),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<RatFunc> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let n = e.unsigned_abs() as usize;
        Ok(RatFunc {
            num: base.num.pow(n),
            den: base.den.pow(n),
        })
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn derivative(&self) -> RatFunc {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den).expect("nonzero denominator")
    }

    /// `f(x + a)`.
    pub fn shift(&self, a: &Rational) -> RatFunc {
        RatFunc {
            num: self.num.shift(a),
            den: self.den.shift(a),
        }
    }

    /// `f(1/x)`.
    pub fn invert_var(&self) -> RatFunc {
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        let (mut n, mut d) = (self.num.reversed(dn), self.den.reversed(dd));
        if dd > dn {
            n = &n * &Poly::monomial(Rational::one(), dd - dn);
        } else {
            d = &d * &Poly::monomial(Rational::one(), dn - dd);
        }
        RatFunc::new(n, d).expect("nonzero denominator")
    }

    /// `f(g(x))`.
    pub fn compose(&self, g: &RatFunc) -> Result<RatFunc> {
        let horner = |p: &Poly| -> RatFunc {
            p.coeffs()
                .iter()
                .rev()
                .fold(RatFunc::zero(), |acc, c| &(&acc * g) + &RatFunc::constant(c.clone()))
        };
        &horner(&self.num) / &horner(&self.den)
    }

    /// Laurent expansion in `t = x - center`, known through `t^order`.
    pub fn laurent_at(&self, center: &Rational, var: &str, order: i64) -> Series {
        let n = self.num.shift(center);
        let d = self.den.shift(center);
        if n.is_zero() {
            return Series::zero(var, order);
        }
        let v = leading_exp(&d);
        let w = leading_exp(&n);
        let ns = Series::from_poly(var, &n, order + v);
        let ds = Series::from_poly(var, &d, (order + 2 * v - w).max(v));
        ns.div(&ds).expect("denominator is a nonzero polynomial").truncate(order)
    }

    /// Expansion in `w = 1/x` around `x = infinity`, known through `w^order`.
    pub fn expand_at_infinity(&self, var: &str, order: i64) -> Series {
        self.invert_var().laurent_at(&Rational::zero(), var, order)
    }

    /// Substitutes a series for the variable. The result is the quotient of
    /// the two polynomial images, so `s` may have any valuation as long as the
    /// image of the denominator is invertible.
    pub fn compose_series(&self, s: &Series) -> Result<Series> {
        let n = poly_at_series(&self.num, s);
        let d = poly_at_series(&self.den, s);
        n.div(&d)
    }

    pub fn to_text(&self, var: &str) -> String {
        if self.is_polynomial() {
            return self.num.to_text(var);
        }
        format!("({})/({})", self.num.to_text(var), self.den.to_text(var))
    }
}

/// Lowest exponent with a nonzero coefficient.
fn leading_exp(p: &Poly) -> i64 {
    p.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(0) as i64
}

/// `p(s)` to the order the powers of `s` support; constants are exact and
/// keep the order of `s`.
pub fn poly_at_series(p: &Poly, s: &Series) -> Series {
    let Some(deg) = p.degree() else {
        return Series::zero(s.var(), s.order());
    };
    let mut terms = Vec::with_capacity(deg + 1);
    let mut pw: Option<Series> = None;
    for k in 1..=deg {
        pw = Some(match pw {
            None => s.clone(),
            Some(prev) => prev.mul(s),
        });
        let c = p.coeff(k);
        if !c.is_zero() {
            terms.push(pw.as_ref().expect("set above").scale(&c));
        }
    }
    let order = terms
        .iter()
        .map(Series::order)
        .min()
        .unwrap_or(s.order());
    let mut acc = Series::constant(s.var(), p.coeff(0), order);
    for t in &terms {
        acc = acc.add(t);
    }
    acc
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text("x"))
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone()).expect("nonzero");
        }
        let n = &(&self.num * &o.den) + &(&o.num * &self.den);
        RatFunc::new(n, &self.den * &o.den).expect("nonzero")
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den).expect("nonzero")
    }
}

impl Div for &RatFunc {
    type Output = Result<RatFunc>;
    fn div(self, o: &RatFunc) -> Result<RatFunc> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFunc::new(&self.num * &o.den, &self.den * &o.num)
    }
}

forward_owned!(Add, add, RatFunc);
forward_owned!(Sub, sub, RatFunc);
forward_owned!(Mul, mul, RatFunc);

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> RatFunc {
        RatFunc::from_poly(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{q, qf};

    fn u() -> RatFunc {
        RatFunc::x()
    }

    #[test]
    fn canonical_form() {
        let f = RatFunc::new(Poly::from_ints(&[2, 2]), Poly::from_ints(&[4, 8, 4])).unwrap();
        assert_eq!(f.num(), &Poly::constant(qf(1, 2)));
        assert_eq!(f.den(), &Poly::from_ints(&[1, 1]));
        assert!(RatFunc::new(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn arithmetic_cancels() {
        let a = RatFunc::pole(q(0), 1);
        let b = RatFunc::pole(q(1), 1);
        // 1/u - 1/(u+1) = 1/(u(u+1))
        let want = RatFunc::new(Poly::one(), Poly::from_ints(&[0, 1, 1])).unwrap();
        assert_eq!(&a - &b, want);
        assert_eq!((&(&a * &b) / &a).unwrap(), b);
    }

    #[test]
    fn shift_by_one() {
        let f = (&u() / &(&u() + &RatFunc::one())).unwrap();
        let g = f.shift(&q(-1));
        assert_eq!(g, (&(&u() - &RatFunc::one()) / &u()).unwrap());
    }

    #[test]
    fn inversion_of_the_variable() {
        let f = (&u() / &(&u() + &RatFunc::one())).unwrap();
        // u/(u+1) at 1/u is 1/(1+u)
        assert_eq!(f.invert_var(), RatFunc::pole(q(1), 1));
        assert_eq!(f.invert_var().invert_var(), f);
    }

    #[test]
    fn expansion_at_infinity() {
        let f = (&u() / &(&u() + &RatFunc::one())).unwrap();
        let s = f.expand_at_infinity("w", 4);
        for k in 0..=4 {
            assert_eq!(s.coeff(k).unwrap(), q(if k % 2 == 0 { 1 } else { -1 }));
        }
    }

    #[test]
    fn laurent_at_a_pole() {
        // 1/(x(x-1)) at x = 1: 1/t - 1 + t - ...
        let f = RatFunc::new(Poly::one(), Poly::from_ints(&[0, -1, 1])).unwrap();
        let s = f.laurent_at(&q(1), "t", 3);
        assert_eq!(s.coeff(-1).unwrap(), q(1));
        assert_eq!(s.coeff(0).unwrap(), q(-1));
        assert_eq!(s.coeff(3).unwrap(), q(1));
        assert!(s.coeff(4).is_err());
    }

    #[test]
    fn json_schema() {
        let f = (&u() / &(&u() + &RatFunc::one())).unwrap();
        let j = serde_json::to_string(&f).unwrap();
        assert_eq!(j, r#"{"num":["0","1"],"den":["1","1"]}"#);
        let back: RatFunc = serde_json::from_str(&j).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<RatFunc>(r#"{"num":["1"],"den":[]}"#).is_err());
    }
}
