//! Truncated Laurent series in one variable.
//!
//! A series knows its coefficients for exponents `min_exp..=order` and nothing
//! beyond. Every operation returns the largest order it can guarantee, and
//! reading past that order is an error instead of a silent zero.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::rational::{self, q, Rational};
use crate::error::{Error, Result};

/// Equality compares the variable, the order and every known coefficient, so
/// explicit leading zeros do not matter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Series {
    var: String,
    min_exp: i64,
    order: i64,
    #[serde(with = "rational::text_vec")]
    coeffs: Vec<Rational>,
}

impl Series {
    /// Coefficients for exponents `min_exp, min_exp + 1, ..., order`.
    pub fn new(var: &str, min_exp: i64, order: i64, coeffs: Vec<Rational>) -> Result<Series> {
        let want = (order - min_exp + 1).max(0) as usize;
        if coeffs.len() != want {
            return Err(Error::Invalid(format!(
                "{} coefficients given for exponents {min_exp}..={order}",
                coeffs.len()
            )));
        }
        Ok(Series {
            var: var.to_string(),
            min_exp,
            order,
            coeffs,
        })
    }

    pub fn from_fn(var: &str, min_exp: i64, order: i64, f: impl Fn(i64) -> Rational) -> Series {
        let coeffs = (min_exp..=order).map(f).collect();
        Series {
            var: var.to_string(),
            min_exp,
            order,
            coeffs,
        }
    }

    pub fn zero(var: &str, order: i64) -> Series {
        Series::from_fn(var, 0, order, |_| Rational::zero())
    }

    pub fn constant(var: &str, c: Rational, order: i64) -> Series {
        Series::monomial(var, c, 0, order)
    }

    pub fn one(var: &str, order: i64) -> Series {
        Series::constant(var, Rational::one(), order)
    }

    /// `c * var^e`, known through `order`.
    pub fn monomial(var: &str, c: Rational, e: i64, order: i64) -> Series {
        let lo = e.min(order + 1);
        Series::from_fn(var, lo, order, |k| if k == e { c.clone() } else { Rational::zero() })
    }

    /// The variable itself.
    pub fn var_series(var: &str, order: i64) -> Series {
        Series::monomial(var, Rational::one(), 1, order)
    }

    pub fn from_poly(var: &str, p: &Poly, order: i64) -> Series {
        Series::from_fn(var, 0, order, |k| p.coeff(k as usize))
    }

    /// `exp(c * var)` through `order`.
    pub fn exp_linear(var: &str, c: &Rational, order: i64) -> Series {
        let mut term = Rational::one();
        let mut coeffs = Vec::new();
        for k in 0..=order {
            coeffs.push(term.clone());
            term = term * c / q(k + 1);
        }
        Series::new(var, 0, order, coeffs).expect("length matches")
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn renamed(mut self, var: &str) -> Series {
        self.var = var.to_string();
        self
    }

    pub fn coeff(&self, e: i64) -> Result<Rational> {
        if e > self.order {
            return Err(Error::BeyondOrder {
                var: self.var.clone(),
                exp: e,
                order: self.order,
            });
        }
        Ok(self.coeff_or_zero(e))
    }

    /// Coefficient inside the known range, zero below `min_exp`.
    fn coeff_or_zero(&self, e: i64) -> Rational {
        if e < self.min_exp || e > self.order {
            Rational::zero()
        } else {
            self.coeffs[(e - self.min_exp) as usize].clone()
        }
    }

    fn at(&self, e: i64) -> &Rational {
        &self.coeffs[(e - self.min_exp) as usize]
    }

    /// Exponent of the first nonzero coefficient; `order + 1` when none is known.
    pub fn valuation(&self) -> i64 {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.min_exp + i as i64)
            .unwrap_or(self.order + 1)
    }

    /// Known to be zero through its order.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Drops leading zero coefficients.
    pub fn normalized(&self) -> Series {
        let v = self.valuation().min(self.order + 1);
        if v <= self.min_exp {
            return self.clone();
        }
        Series::from_fn(&self.var, v, self.order, |k| self.coeff_or_zero(k))
    }

    /// Same series with `min_exp` lowered to `lo` by explicit zeros.
    pub fn widened(&self, lo: i64) -> Series {
        if lo >= self.min_exp {
            return self.clone();
        }
        Series::from_fn(&self.var, lo, self.order, |k| self.coeff_or_zero(k))
    }

    /// Forgets everything above `order`.
    pub fn truncate(&self, order: i64) -> Series {
        let o = order.min(self.order);
        let lo = self.min_exp.min(o + 1);
        Series::from_fn(&self.var, lo, o, |k| self.coeff_or_zero(k))
    }

    fn check_var(&self, o: &Series) {
        assert_eq!(self.var, o.var, "series in different variables");
    }

    pub fn add(&self, o: &Series) -> Series {
        self.check_var(o);
        let order = self.order.min(o.order);
        let lo = self.min_exp.min(o.min_exp).min(order + 1);
        Series::from_fn(&self.var, lo, order, |k| {
            self.coeff_or_zero(k) + o.coeff_or_zero(k)
        })
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Series {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, a: &Rational) -> Series {
        Series {
            var: self.var.clone(),
            min_exp: self.min_exp,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// Multiplies by `var^e`.
    pub fn shift_exp(&self, e: i64) -> Series {
        Series {
            var: self.var.clone(),
            min_exp: self.min_exp + e,
            order: self.order + e,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn mul(&self, o: &Series) -> Series {
        self.check_var(o);
        let (a, b) = (self.normalized(), o.normalized());
        let (va, vb) = (a.valuation(), b.valuation());
        let order = (a.order + vb).min(b.order + va);
        let lo = (va + vb).min(order + 1);
        let mut coeffs = vec![Rational::zero(); (order - lo + 1).max(0) as usize];
        for i in va..=a.order {
            let x = a.at(i);
            if x.is_zero() {
                continue;
            }
            for j in vb..=b.order {
                let k = i + j;
                if k > order {
                    break;
                }
                coeffs[(k - lo) as usize] += x * b.at(j);
            }
        }
        Series {
            var: self.var.clone(),
            min_exp: lo,
            order,
            coeffs,
        }
    }

    pub fn pow(&self, e: i64) -> Result<Series> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        if e == 0 {
            // x^0 is exactly 1 but can only be vouched for to the relative order of x.
            let v = self.valuation();
            return Ok(Series::one(&self.var, (self.order - v).max(0)));
        }
        let mut acc: Option<Series> = None;
        let mut base = self.clone();
        let mut n = e;
        while n > 0 {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc.expect("e > 0"))
    }

    pub fn inv(&self) -> Result<Series> {
        let a = self.normalized();
        let v = a.valuation();
        if v > a.order {
            return Err(Error::NotInvertible(format!(
                "no nonzero coefficient of {} through order {}",
                self.var, self.order
            )));
        }
        let rel = a.order - v;
        let a0_inv = a.at(v).recip();
        let mut b: Vec<Rational> = Vec::with_capacity(rel as usize + 1);
        for n in 0..=rel {
            if n == 0 {
                b.push(a0_inv.clone());
                continue;
            }
            let mut s = Rational::zero();
            for k in 1..=n {
                let ak = a.at(v + k);
                if !ak.is_zero() {
                    s += ak * &b[(n - k) as usize];
                }
            }
            b.push(-s * &a0_inv);
        }
        Series::new(&self.var, -v, rel - v, b)
    }

    pub fn div(&self, o: &Series) -> Result<Series> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn derivative(&self) -> Series {
        Series::from_fn(&self.var, self.min_exp - 1, self.order - 1, |k| {
            self.coeff_or_zero(k + 1) * q(k + 1)
        })
    }

    /// Termwise antiderivative with zero constant; fails on a `var^-1` term.
    pub fn integrate(&self) -> Result<Series> {
        let r = self.coeff_or_zero(-1);
        if !r.is_zero() && self.order >= -1 {
            return Err(Error::NotExpandable(format!(
                "antiderivative of a series with residue {}",
                rational::to_text(&r)
            )));
        }
        Ok(Series::from_fn(
            &self.var,
            (self.min_exp + 1).min(0).min(self.order + 2),
            self.order + 1,
            |k| {
                if k == 0 {
                    Rational::zero()
                } else {
                    self.coeff_or_zero(k - 1) / q(k)
                }
            },
        ))
    }

    /// Coefficient of `var^-1`.
    pub fn residue(&self) -> Result<Rational> {
        self.coeff(-1)
    }

    /// `exp(self)`; the series must vanish at the origin.
    pub fn exp(&self) -> Result<Series> {
        let s = self.normalized();
        let v = s.valuation();
        if v < 0 {
            return Err(Error::NotExpandable(format!("exp of a series with a pole in {}", self.var)));
        }
        if v == 0 {
            return Err(Error::NonzeroConstant(rational::to_text(s.at(0))));
        }
        let n = s.order;
        let mut e = vec![Rational::one()];
        for m in 1..=n {
            let mut acc = Rational::zero();
            for k in v..=m {
                let sk = s.at(k);
                if !sk.is_zero() {
                    acc += q(k) * sk * &e[(m - k) as usize];
                }
            }
            e.push(acc / q(m));
        }
        if n < 0 {
            e.clear();
        }
        Series::new(&self.var, 0, n.max(-1), e)
    }

    /// `log(self)`; the constant term must be exactly 1.
    pub fn log(&self) -> Result<Series> {
        let s = self.normalized();
        if s.valuation() < 0 {
            return Err(Error::NotExpandable(format!("log of a series with a pole in {}", self.var)));
        }
        let c0 = s.coeff_or_zero(0);
        if !c0.is_one() {
            return Err(Error::ConstantNotOne(rational::to_text(&c0)));
        }
        let n = s.order;
        let s = s.widened(0);
        // L' = s'/s with s_0 = 1.
        let mut l = vec![Rational::zero(); (n + 1).max(0) as usize];
        for m in 1..=n {
            let mut acc = q(m) * s.at(m);
            for k in 1..m {
                let lk = &l[k as usize];
                if !lk.is_zero() {
                    acc -= q(k) * lk * s.at(m - k);
                }
            }
            l[m as usize] = acc / q(m);
        }
        Series::new(&self.var, 0, n.max(-1), l)
    }

    /// `self(inner)`; `inner` must vanish at the origin and share no variable
    /// constraint with `self` (the result is in the variable of `inner`).
    pub fn compose(&self, inner: &Series) -> Result<Series> {
        let inner = inner.normalized();
        let v = inner.valuation();
        if v < 1 || v > inner.order {
            return Err(Error::NotExpandable(format!(
                "composition needs an inner series vanishing at the origin (valuation {v})"
            )));
        }
        let outer = self.normalized();
        let lo = outer.valuation();
        // Missing outer terms start at var^(order + 1), i.e. inner-degree v*(order + 1).
        let mut order = v * (outer.order + 1) - 1;
        let mut terms: Vec<Series> = Vec::new();
        if lo <= outer.order {
            let mut p = inner.pow(lo)?;
            for j in lo..=outer.order {
                if j > lo {
                    p = p.mul(&inner);
                }
                let a = outer.at(j);
                if !a.is_zero() {
                    order = order.min(p.order);
                    terms.push(p.scale(a));
                }
            }
        }
        let mut acc = Series::zero(inner.var(), order).widened(lo.min(0) * v);
        for t in &terms {
            acc = acc.add(&t.truncate(order));
        }
        Ok(acc.truncate(order))
    }

    pub fn to_text(&self) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.min_exp + i as i64;
            let mono = match e {
                0 => String::new(),
                1 => self.var.clone(),
                _ => format!("{}^{}", self.var, e),
            };
            let ct = rational::to_text(c);
            parts.push(match (e, ct.as_str()) {
                (0, _) => ct,
                (_, "1") => mono,
                (_, "-1") => format!("-{mono}"),
                _ => format!("{ct}*{mono}"),
            });
        }
        parts.push(format!("O({}^{})", self.var, self.order + 1));
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl PartialEq for Series {
    fn eq(&self, o: &Series) -> bool {
        self.var == o.var
            && self.order == o.order
            && (self.min_exp.min(o.min_exp)..=self.order).all(|k| self.coeff_or_zero(k) == o.coeff_or_zero(k))
    }
}

impl Eq for Series {}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
