//! Local expansions of expressions built from rational functions and `log`.
//!
//! Near a point where the argument of a logarithm equals `-1`, the constant
//! `log(-1)` is kept as a formal symbol `L`; an expansion is a polynomial in
//! `L` with series coefficients. Anything that is reported as a plain series
//! or residue must be free of `L`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::ratfunc::RatFunc;
use super::rational::{self, Rational};
use super::series::Series;
use crate::error::{Error, Result};

/// Largest padding tried beyond the requested order before giving up.
pub const EXPANSION_BUDGET: i64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZExpr {
    Rat(RatFunc),
    /// Principal logarithm of a rational function.
    Log(RatFunc),
    Add(Box<ZExpr>, Box<ZExpr>),
    Sub(Box<ZExpr>, Box<ZExpr>),
    Mul(Box<ZExpr>, Box<ZExpr>),
    Div(Box<ZExpr>, Box<ZExpr>),
    Neg(Box<ZExpr>),
}

impl ZExpr {
    pub fn rat(f: RatFunc) -> ZExpr {
        ZExpr::Rat(f)
    }

    /// `log z`.
    pub fn log_z() -> ZExpr {
        ZExpr::Log(RatFunc::x())
    }

    pub fn log(f: RatFunc) -> ZExpr {
        ZExpr::Log(f)
    }

    pub fn constant(c: Rational) -> ZExpr {
        ZExpr::Rat(RatFunc::constant(c))
    }
}

macro_rules! zexpr_op {
    ($tr:ident, $m:ident, $v:ident) => {
        impl $tr for ZExpr {
            type Output = ZExpr;
            fn $m(self, o: ZExpr) -> ZExpr {
                ZExpr::$v(Box::new(self), Box::new(o))
            }
        }
    };
}
zexpr_op!(Add, add, Add);
zexpr_op!(Sub, sub, Sub);
zexpr_op!(Mul, mul, Mul);
zexpr_op!(Div, div, Div);

impl Neg for ZExpr {
    type Output = ZExpr;
    fn neg(self) -> ZExpr {
        ZExpr::Neg(Box::new(self))
    }
}

/// `sum_k L^k * parts[k]`, all parts in the same local variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogSeries {
    parts: Vec<Series>,
}

impl LogSeries {
    fn plain(s: Series) -> LogSeries {
        LogSeries { parts: vec![s] }
    }

    pub fn parts(&self) -> &[Series] {
        &self.parts
    }

    pub fn order(&self) -> i64 {
        self.parts.iter().map(Series::order).min().expect("at least one part")
    }

    fn map(&self, f: impl Fn(&Series) -> Series) -> LogSeries {
        LogSeries {
            parts: self.parts.iter().map(f).collect(),
        }
    }

    fn add(&self, o: &LogSeries) -> LogSeries {
        let n = self.parts.len().max(o.parts.len());
        let var = self.parts[0].var().to_string();
        let order = self.order().min(o.order());
        let zero = Series::zero(&var, order);
        let parts = (0..n)
            .map(|k| {
                let a = self.parts.get(k).unwrap_or(&zero);
                let b = o.parts.get(k).unwrap_or(&zero);
                a.add(b).truncate(order)
            })
            .collect();
        LogSeries { parts }
    }

    fn mul(&self, o: &LogSeries) -> LogSeries {
        let mut out: Vec<Option<Series>> = vec![None; self.parts.len() + o.parts.len() - 1];
        for (i, a) in self.parts.iter().enumerate() {
            for (j, b) in o.parts.iter().enumerate() {
                let p = a.mul(b);
                out[i + j] = Some(match out[i + j].take() {
                    None => p,
                    Some(acc) => acc.add(&p),
                });
            }
        }
        let parts: Vec<Series> = out.into_iter().map(|s| s.expect("filled")).collect();
        let order = parts.iter().map(Series::order).min().expect("nonempty");
        LogSeries {
            parts: parts.iter().map(|s| s.truncate(order)).collect(),
        }
    }

    /// True when every `L`-dependent part vanishes through its order.
    pub fn is_log_free(&self) -> bool {
        self.parts[1..].iter().all(Series::is_zero)
    }

    fn div(&self, o: &LogSeries) -> Result<LogSeries> {
        if !o.is_log_free() {
            return Err(Error::NotExpandable(
                "division by an expression containing log(-1)".into(),
            ));
        }
        let inv = o.parts[0].inv()?;
        Ok(self.mul(&LogSeries::plain(inv)))
    }

    /// The `L^0` part, provided the rest vanishes.
    pub fn into_series(self) -> Result<Series> {
        if let Some((k, s)) = self.parts.iter().enumerate().skip(1).find(|(_, s)| !s.is_zero()) {
            return Err(Error::LogDoesNotCancel(format!("L^{k} * ({s})")));
        }
        Ok(self.parts.into_iter().next().expect("nonempty"))
    }
}

fn local_var(center: &Rational) -> &'static str {
    if center.is_zero() {
        "z"
    } else {
        "t"
    }
}

fn expand_log(f: &RatFunc, center: &Rational, order: i64) -> Result<LogSeries> {
    let var = local_var(center);
    let order = order.max(0);
    let s = f.laurent_at(center, var, order).normalized();
    if s.valuation() != 0 {
        return Err(Error::NotExpandable(format!(
            "log({}) at {}",
            f.to_text("z"),
            rational::to_text(center)
        )));
    }
    let a0 = s.coeff(0)?;
    let minus_one = -Rational::one();
    if !a0.is_one() && a0 != minus_one {
        return Err(Error::NotExpandable(format!(
            "log({}) at {}: value {} is not 1 or -1",
            f.to_text("z"),
            rational::to_text(center),
            rational::to_text(&a0)
        )));
    }
    let regular = s.scale(&a0.recip()).log()?;
    let mut parts = vec![regular];
    if a0 == minus_one {
        parts.push(Series::one(var, order));
    }
    Ok(LogSeries { parts })
}

fn expand_at(e: &ZExpr, center: &Rational, work: i64) -> Result<LogSeries> {
    Ok(match e {
        ZExpr::Rat(f) => LogSeries::plain(f.laurent_at(center, local_var(center), work)),
        ZExpr::Log(f) => expand_log(f, center, work)?,
        ZExpr::Add(a, b) => expand_at(a, center, work)?.add(&expand_at(b, center, work)?),
        ZExpr::Sub(a, b) => {
            let nb = expand_at(b, center, work)?.map(Series::neg);
            expand_at(a, center, work)?.add(&nb)
        }
        ZExpr::Mul(a, b) => expand_at(a, center, work)?.mul(&expand_at(b, center, work)?),
        ZExpr::Div(a, b) => expand_at(a, center, work)?.div(&expand_at(b, center, work)?)?,
        ZExpr::Neg(a) => expand_at(a, center, work)?.map(Series::neg),
    })
}

/// Expansion in `t = z - center` (in `z` itself at the origin), possibly
/// containing the formal `log(-1)`, known through `order`.
pub fn local_laurent_log(e: &ZExpr, center: &Rational, order: i64) -> Result<LogSeries> {
    let mut pad = 0;
    loop {
        // A divisor known only to an order where it still looks like zero
        // is not an error yet; it needs more terms.
        let short = match expand_at(e, center, order + pad) {
            Ok(s) if s.order() >= order => return Ok(s.map(|p| p.truncate(order))),
            Ok(s) => order - s.order(),
            Err(Error::NotInvertible(_)) => 1,
            Err(err) => return Err(err),
        };
        pad += short.max(2);
        if pad > EXPANSION_BUDGET {
            return Err(Error::Budget {
                what: format!("local expansion at {}", rational::to_text(center)),
                required: order + pad,
                budget: order + EXPANSION_BUDGET,
            });
        }
    }
}

/// Local Laurent expansion; `log(-1)` must cancel in the whole result.
pub fn local_laurent(e: &ZExpr, center: &Rational, order: i64) -> Result<Series> {
    local_laurent_log(e, center, order)?.into_series()
}

/// Coefficient of `1/t` in the local expansion; `log(-1)` must cancel in it.
pub fn residue(e: &ZExpr, center: &Rational) -> Result<Rational> {
    let s = local_laurent_log(e, center, -1)?;
    for (k, p) in s.parts.iter().enumerate().skip(1) {
        let c = p.coeff(-1)?;
        if !c.is_zero() {
            return Err(Error::LogDoesNotCancel(format!("L^{k} * {}", rational::to_text(&c))));
        }
    }
    s.parts[0].coeff(-1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::Poly;
    use crate::exact::rational::{q, qf};

    fn z_minus(a: i64) -> RatFunc {
        RatFunc::from_poly(Poly::from_ints(&[-a, 1]))
    }

    #[test]
    fn simple_pole() {
        let e = ZExpr::rat(RatFunc::pole(q(-1), 1));
        let s = local_laurent(&e, &q(1), 2).unwrap();
        assert_eq!(s.coeff(-1).unwrap(), q(1));
        assert!((0..=2).all(|k| s.coeff(k).unwrap().is_zero()));
    }

    #[test]
    fn log_at_one() {
        let s = local_laurent(&ZExpr::log_z(), &q(1), 3).unwrap();
        assert_eq!(s.coeff(1).unwrap(), q(1));
        assert_eq!(s.coeff(2).unwrap(), qf(-1, 2));
        assert_eq!(s.coeff(3).unwrap(), qf(1, 3));
    }

    #[test]
    fn residue_of_inverse_log() {
        // log z = t - t^2/2 + ..., so 1/((z-1) log z) = t^-2 (1 + t/2 + ...).
        let e = ZExpr::constant(q(1)) / (ZExpr::rat(z_minus(1)) * ZExpr::log_z());
        assert_eq!(residue(&e, &q(1)).unwrap(), qf(1, 2));
    }

    #[test]
    fn formal_log_cancels_in_differences() {
        // log(1/z) - log(z) at z = -1 is -2 log(-(1 + ...)) without L.
        let d = ZExpr::log(RatFunc::x().inv().unwrap()) - ZExpr::log_z();
        let s = local_laurent(&d, &q(-1), 3).unwrap();
        assert_eq!(s.coeff(0).unwrap(), q(0));
        assert_eq!(s.coeff(1).unwrap(), q(2));
    }

    #[test]
    fn surviving_log_is_rejected() {
        let e = ZExpr::log_z() / ZExpr::rat(z_minus(-1));
        assert!(matches!(residue(&e, &q(-1)), Err(Error::LogDoesNotCancel(_))));
        assert!(matches!(local_laurent(&ZExpr::log_z(), &q(-1), 2), Err(Error::LogDoesNotCancel(_))));
    }

    #[test]
    fn log_at_the_origin_is_not_expandable() {
        assert!(matches!(
            local_laurent(&ZExpr::log_z(), &q(0), 2),
            Err(Error::NotExpandable(_))
        ));
    }

    #[test]
    fn residues_at_the_origin() {
        let zpow = |k: usize| RatFunc::new(Poly::one(), Poly::monomial(q(1), k)).unwrap();
        let one_plus_z2 = RatFunc::from_poly(Poly::from_ints(&[1, 0, 1]));
        let r = |k: usize, p: i64| {
            let f = &zpow(k) * &one_plus_z2.pow(p).unwrap();
            residue(&ZExpr::rat(f), &q(0)).unwrap()
        };
        assert_eq!(r(2, 0), q(0));
        assert_eq!(r(3, 2), q(2));
        assert_eq!(r(2, 1), q(0));
    }
}
