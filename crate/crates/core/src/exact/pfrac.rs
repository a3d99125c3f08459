//! Partial fraction decomposition over rational poles.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::rational::{self, q, Rational};
use crate::error::{Error, Result};

/// `coeff / (x - pole)^order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleTerm {
    #[serde(with = "rational::text")]
    pub pole: Rational,
    pub order: usize,
    #[serde(with = "rational::text")]
    pub coeff: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialFractions {
    pub polynomial: Poly,
    /// Sorted by pole, then by order; zero coefficients are omitted.
    pub terms: Vec<PoleTerm>,
}

impl PartialFractions {
    pub fn reassemble(&self) -> RatFunc {
        self.terms.iter().fold(RatFunc::from_poly(self.polynomial.clone()), |acc, t| {
            &acc + &RatFunc::pole(-t.pole.clone(), t.order).scale(&t.coeff)
        })
    }

    /// Highest pole order that actually occurs.
    pub fn max_order(&self) -> usize {
        self.terms.iter().map(|t| t.order).max().unwrap_or(0)
    }
}

/// Roots of `p` with multiplicities. Fails if a factor of degree above one
/// has no rational root.
pub fn rational_roots(p: &Poly) -> Result<Vec<(Rational, usize)>> {
    let mut rest = p.monic();
    let mut roots: Vec<(Rational, usize)> = Vec::new();
    let mut take = |rest: &mut Poly, r: Rational| {
        let lin = Poly::linear(-r.clone());
        let mut m = 0;
        while rest.degree().unwrap_or(0) > 0 && rest.eval(&r).is_zero() {
            *rest = rest.div_rem(&lin).expect("nonzero").0;
            m += 1;
        }
        if m > 0 {
            roots.push((r, m));
        }
    };
    // The denominators met in practice are products of (x + i) for small i.
    for i in 0..=64i64 {
        take(&mut rest, q(i));
        take(&mut rest, q(-i));
    }
    while let Some(deg) = rest.degree().filter(|&d| d > 0) {
        if deg == 1 {
            let r = -rest.coeff(0) / rest.coeff(1);
            take(&mut rest, r);
            continue;
        }
        let Some(r) = find_rational_root(&rest) else {
            return Err(Error::NonLinearFactor(rest.to_text("x")));
        };
        take(&mut rest, r);
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(roots)
}

/// Rational root theorem on the integer multiple of `p`.
fn find_rational_root(p: &Poly) -> Option<Rational> {
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coeffs().iter().map(|c| (c * &lcm).to_integer()).collect();
    let low = ints.iter().position(|c| !c.is_zero())?;
    if low > 0 {
        return Some(Rational::zero());
    }
    let a0 = divisors(&ints[0])?;
    let an = divisors(ints.last()?)?;
    for num in &a0 {
        for den in &an {
            for s in [1i64, -1] {
                let r = Rational::new(BigInt::from(*num) * s, BigInt::from(*den));
                if p.eval(&r).is_zero() {
                    return Some(r);
                }
            }
        }
    }
    None
}

/// Positive divisors, or `None` when the number is too large to factor by trial division.
fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64()?;
    if n > 1 << 40 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    Some(out)
}

pub fn partial_fractions(f: &RatFunc) -> Result<PartialFractions> {
    let (polynomial, rem) = f.num().div_rem(f.den())?;
    let proper = RatFunc::new(rem, f.den().clone())?;
    let mut terms = Vec::new();
    for (r, m) in rational_roots(f.den())? {
        let local = proper.laurent_at(&r, "t", -1);
        for k in 1..=m {
            let c = local.coeff(-(k as i64))?;
            if !c.is_zero() {
                terms.push(PoleTerm {
                    pole: r.clone(),
                    order: k,
                    coeff: c,
                });
            }
        }
    }
    Ok(PartialFractions { polynomial, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::qf;

    fn rf(num: &[i64], den: &[i64]) -> RatFunc {
        RatFunc::new(Poly::from_ints(num), Poly::from_ints(den)).unwrap()
    }

    #[test]
    fn two_simple_poles() {
        let pf = partial_fractions(&rf(&[1], &[0, 1, 1])).unwrap();
        assert!(pf.polynomial.is_zero());
        assert_eq!(
            pf.terms,
            vec![
                PoleTerm { pole: q(-1), order: 1, coeff: q(-1) },
                PoleTerm { pole: q(0), order: 1, coeff: q(1) },
            ]
        );
    }

    #[test]
    fn polynomial_part_and_poles() {
        // (u^2 + u - 1)/((u+1)(u+2)) = 1 - 1/(u+1) - 1/(u+2)
        let f = rf(&[-1, 1, 1], &[2, 3, 1]);
        let pf = partial_fractions(&f).unwrap();
        assert_eq!(pf.polynomial, Poly::one());
        assert_eq!(pf.terms[0], PoleTerm { pole: q(-2), order: 1, coeff: q(-1) });
        assert_eq!(pf.terms[1], PoleTerm { pole: q(-1), order: 1, coeff: q(-1) });
        assert_eq!(pf.reassemble(), f);
    }

    #[test]
    fn polynomial_input() {
        let f = rf(&[3, 0, 1], &[1]);
        let pf = partial_fractions(&f).unwrap();
        assert_eq!(pf.polynomial, Poly::from_ints(&[3, 0, 1]));
        assert!(pf.terms.is_empty());
    }

    #[test]
    fn repeated_and_fractional_poles() {
        // 1/((2x - 1)^2 (x + 3))
        let den = &Poly::from_ints(&[-1, 2]).pow(2) * &Poly::from_ints(&[3, 1]);
        let f = RatFunc::new(Poly::one(), den).unwrap();
        let pf = partial_fractions(&f).unwrap();
        assert_eq!(pf.max_order(), 2);
        assert!(pf.terms.iter().any(|t| t.pole == qf(1, 2) && t.order == 2));
        assert_eq!(pf.reassemble(), f);
    }

    #[test]
    fn irreducible_quadratic_is_reported() {
        let err = partial_fractions(&rf(&[1], &[1, 0, 1])).unwrap_err();
        assert!(matches!(err, Error::NonLinearFactor(s) if s == "x^2 + 1"));
    }
}
