//! Skew primitives `θ^i_d` of the one-forms `W^i_d`, their rational
//! `η`-basis, and the `S`-matrix governing their expansions at `x = ∞`.
//!
//! `θ^2_d` is `i` times a rational function; only that rational part is
//! stored. With `θ^2_d = i r_d` the basis is
//! `η^1_d = (θ^1_d - r_d) / 2^{d+1}` and `η^2_d = (θ^1_d + r_d) / 2^{d+1}`,
//! so every computation stays over the rationals.

use num_traits::Zero;
use serde::Serialize;

use super::curve::{catalan_inverse, d_dx};
use crate::error::{Error, Result};
use crate::exact::rational::{factorial_q, harmonic, q, qf, Rational};
use crate::exact::{Poly, RatFunc};

/// `(S_k)^μ_ν` stored as `m[μ-1][ν-1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SMatrix {
    pub k: usize,
    #[serde(with = "matrix_text")]
    pub m: [[Rational; 2]; 2],
}

mod matrix_text {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(m: &[[Rational; 2]; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Vec<String>> = m
            .iter()
            .map(|r| r.iter().map(crate::exact::rational::to_text).collect())
            .collect();
        v.serialize(s)
    }
}

impl SMatrix {
    pub fn entry(&self, mu: usize, nu: usize) -> &Rational {
        &self.m[mu - 1][nu - 1]
    }
}

pub fn s_matrix(k: usize) -> SMatrix {
    let z = Rational::zero;
    let m = if k == 0 {
        [[q(1), z()], [z(), q(1)]]
    } else if k == 1 {
        [[z(), z()], [q(1), z()]]
    } else if k.is_multiple_of(2) {
        let h = k / 2;
        let f = factorial_q(h as u64);
        let f2 = &f * &f;
        [
            [(q(1) - q(2 * h as i64) * harmonic(h as u64)) / &f2, z()],
            [z(), f2.recip()],
        ]
    } else {
        let h = (k - 1) / 2;
        let f = factorial_q(h as u64);
        let f2 = &f * &f;
        [
            [z(), q(-2) * harmonic(h as u64) / &f2],
            [(q(h as i64 + 1) * &f2).recip(), z()],
        ]
    };
    SMatrix { k, m }
}

/// `η_0 = (1/(1-z^2) - 1/2, z/(1-z^2))`.
fn eta0(mu: usize) -> RatFunc {
    let den = Poly::from_ints(&[1, 0, -1]);
    match mu {
        1 => &RatFunc::new(Poly::one(), den).expect("nonzero") - &RatFunc::constant(qf(1, 2)),
        2 => RatFunc::new(Poly::x(), den).expect("nonzero"),
        _ => unreachable!("index is 1 or 2"),
    }
}

fn check_index(mu: usize) -> Result<()> {
    if mu == 1 || mu == 2 {
        Ok(())
    } else {
        Err(Error::Invalid(format!("basis index {mu} is not 1 or 2")))
    }
}

/// `η^μ_d = (-d/dx)^d η^μ_0`.
pub fn eta(mu: usize, d: usize) -> Result<RatFunc> {
    check_index(mu)?;
    let mut f = eta0(mu);
    for _ in 0..d {
        f = d_dx(&f).scale(&q(-1));
    }
    Ok(f)
}

/// `θ^i_d`; for `i = 2` the value is the rational part `r` of `θ = i r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaPrimitive {
    pub index: usize,
    pub d: usize,
    /// `θ^2` carries a factor of the imaginary unit not stored in `value`.
    pub imaginary: bool,
    pub value: RatFunc,
}

pub fn theta(i: usize, d: usize) -> Result<ThetaPrimitive> {
    check_index(i)?;
    let p = q(2).pow(d as i32);
    let (e1, e2) = (eta(1, d)?, eta(2, d)?);
    let value = if i == 1 { &e1 + &e2 } else { &e2 - &e1 }.scale(&p);
    Ok(ThetaPrimitive {
        index: i,
        d,
        imaginary: i == 2,
        value,
    })
}

/// `θ^i_0` written out directly, used as an independent starting point.
pub fn theta0_direct(i: usize) -> Result<RatFunc> {
    check_index(i)?;
    Ok(if i == 1 {
        // 1/(1-z) - 1/2
        &RatFunc::new(Poly::one(), Poly::from_ints(&[1, -1]))? - &RatFunc::constant(qf(1, 2))
    } else {
        // θ^2_0 / i = -1/(1+z) + 1/2
        &RatFunc::constant(qf(1, 2)) - &RatFunc::new(Poly::one(), Poly::from_ints(&[1, 1]))?
    })
}

/// `(-2 d/dx)^d θ^i_0` and `θ(1/z) = -θ(z)`, both exactly.
pub fn theta_conditions(i: usize, d: usize) -> Result<bool> {
    let t = theta(i, d)?.value;
    let mut direct = theta0_direct(i)?;
    for _ in 0..d {
        direct = d_dx(&direct).scale(&q(-2));
    }
    let skew = t.invert_var() == t.scale(&q(-1));
    Ok(direct == t && skew)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaReport {
    pub mu: usize,
    pub d: usize,
    pub order: i64,
    pub pass: bool,
    /// `(exponent of 1/x, expected, found)` at the first disagreement.
    pub first_mismatch: Option<(i64, String, String)>,
}

/// Expected coefficient of `x^{-e}` in `η^μ_d(z(x))`:
/// `sum_{m >= d} (S_{m-d})^μ_ν (-δ^ν_1 δ^m_0 / 2 - δ^ν_2 m! / x^{m+1})`,
/// where the contraction runs over the row index of the stored matrix.
pub fn eta_expected(mu: usize, d: usize, e: i64) -> Rational {
    if e == 0 {
        return if d == 0 && mu == 1 { qf(-1, 2) } else { Rational::zero() };
    }
    let m = e - 1;
    if m < d as i64 {
        return Rational::zero();
    }
    -factorial_q(m as u64) * s_matrix((m - d as i64) as usize).entry(2, mu)
}

/// Compares the expansion of `η^μ_d` at `x = ∞` with the `S`-matrix formula
/// through `x^{-order}`.
///
/// The expansion is the negative of [`eta_expected`]: already
/// `η^1_0(0) = 1/2`, and `[x^{-j}] f = -Res_{z=0} x^{j-1} f dx` carries the
/// orientation sign of the residue at `x = ∞`.
pub fn theta_expansion_check(mu: usize, d: usize, order: i64) -> Result<ThetaReport> {
    let f = eta(mu, d)?;
    let s = f.compose_series(&catalan_inverse(order))?;
    for e in 0..=order {
        let found = s.coeff(e)?;
        let expected = -eta_expected(mu, d, e);
        if found != expected {
            return Ok(ThetaReport {
                mu,
                d,
                order,
                pass: false,
                first_mismatch: Some((
                    e,
                    crate::exact::rational::to_text(&expected),
                    crate::exact::rational::to_text(&found),
                )),
            });
        }
    }
    Ok(ThetaReport {
        mu,
        d,
        order,
        pass: true,
        first_mismatch: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::binomial;

    #[test]
    fn s_matrix_entries() {
        assert_eq!(s_matrix(0).m, [[q(1), q(0)], [q(0), q(1)]]);
        assert_eq!(*s_matrix(1).entry(2, 1), q(1));
        assert_eq!(*s_matrix(2).entry(1, 1), q(-1));
        assert_eq!(*s_matrix(3).entry(2, 1), qf(1, 2));
        assert_eq!(*s_matrix(3).entry(1, 2), q(-2));
        assert_eq!(*s_matrix(4).entry(1, 1), (q(1) - q(4) * qf(3, 2)) / q(4));
    }

    #[test]
    fn theta_zero_matches_closed_form() {
        assert_eq!(theta(1, 0).unwrap().value, theta0_direct(1).unwrap());
        assert_eq!(theta(2, 0).unwrap().value, theta0_direct(2).unwrap());
        let t = theta0_direct(1).unwrap();
        assert!((&t.invert_var() + &t).is_zero());
    }

    #[test]
    fn conditions_hold() {
        for i in 1..=2 {
            for d in 0..=6 {
                assert!(theta_conditions(i, d).unwrap(), "i = {i}, d = {d}");
            }
        }
    }

    #[test]
    fn coefficients_from_residues() {
        // The S-matrix side: -(2k-2)!/((k-1)!)^2 at x^{-(2k-1)} for μ = 2,
        // zero for μ = 1, and -1/2 as the constant of μ = 1.
        for k in 1..=3i64 {
            assert_eq!(eta_expected(2, 0, 2 * k - 1), -binomial(2 * k - 2, k - 1));
            assert_eq!(eta_expected(1, 0, 2 * k - 1), q(0));
            let k1 = factorial_q(k as u64) * factorial_q(k as u64 - 1);
            assert_eq!(eta_expected(1, 0, 2 * k), -factorial_q(2 * k as u64 - 1) / k1);
        }
        assert_eq!(eta_expected(1, 0, 0), qf(-1, 2));
        // The functions themselves, expanded by brute force, carry the
        // opposite sign.
        let s2 = eta(2, 0).unwrap().compose_series(&catalan_inverse(7)).unwrap();
        let s1 = eta(1, 0).unwrap().compose_series(&catalan_inverse(7)).unwrap();
        for k in 1..=3i64 {
            assert_eq!(s2.coeff(2 * k - 1).unwrap(), binomial(2 * k - 2, k - 1));
        }
        assert_eq!(s1.coeff(0).unwrap(), qf(1, 2));
    }

    #[test]
    fn expansions_low_order() {
        for mu in 1..=2 {
            for d in 0..=3 {
                let r = theta_expansion_check(mu, d, 8).unwrap();
                assert!(r.pass, "{r:?}");
            }
        }
    }
}
