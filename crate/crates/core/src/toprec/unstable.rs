//! The unstable pieces `S_0 = 1/z - z + (z + 1/z) log z` and
//! `S_1 = -log(1 - z^2)/2 + log(z)/2` of the wave function.
//!
//! Both are held as `P(z) + Q(z) log z` with rational `P`, `Q`. At `x = ∞`
//! the logarithm splits as `log z = -log x + log(z/w)` with `w = 1/x`, and
//! `z/w = 1 + w^2 + …` has a logarithm as an ordinary series.

use num_traits::Zero;
use serde::Serialize;

use super::curve::{catalan_inverse, dx_dz, x_of_z, W};
use crate::error::Result;
use crate::exact::rational::{factorial_q, q, qf, Rational};
use crate::exact::{Poly, RatFunc, Series};
use crate::wedge::{stationary_invariant, unit_insertions};

/// `P(z) + Q(z) log z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogForm {
    pub rational: RatFunc,
    pub log_coeff: RatFunc,
}

impl LogForm {
    /// `d/dz`, again of the same shape.
    pub fn derivative(&self) -> LogForm {
        let z_inv = RatFunc::new(Poly::one(), Poly::x()).expect("nonzero");
        LogForm {
            rational: &self.rational.derivative() + &(&self.log_coeff * &z_inv),
            log_coeff: self.log_coeff.derivative(),
        }
    }
}

/// `S_0(z) = 1/z - z + (z + 1/z) log z`.
pub fn s0() -> LogForm {
    let one_minus_z2 = Poly::from_ints(&[1, 0, -1]);
    LogForm {
        rational: RatFunc::new(one_minus_z2, Poly::x()).expect("nonzero"),
        log_coeff: x_of_z(),
    }
}

/// `S_1'(x)` from the closed form `-log(1 - z^2)/2 + log(z)/2`.
pub fn s1_prime_x() -> RatFunc {
    // d/dz: z/(1 - z^2) + 1/(2z)
    let a = RatFunc::new(Poly::x(), Poly::from_ints(&[1, 0, -1])).expect("nonzero");
    let b = RatFunc::new(Poly::one(), Poly::from_ints(&[0, 2])).expect("nonzero");
    (&(&a + &b) / &dx_dz()).expect("x'(z) is nonzero")
}

/// `-z(z^2 + 1) / (2 (z^2 - 1)^2)`, the value forced by the ħ^1 term of
/// the quantum curve.
pub fn s1_prime_expected() -> RatFunc {
    let num = Poly::from_ints(&[0, -1, 0, -1]);
    let den = Poly::from_ints(&[-1, 0, 1]).pow(2).scale(&q(2));
    RatFunc::new(num, den).expect("nonzero")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnstableFormsReport {
    pub order: i64,
    /// `dS_0 = log z dx`.
    pub s0_derivative: bool,
    /// `S_0(1/z) = -S_0(z)`.
    pub s0_skew: bool,
    pub s1_derivative: bool,
    /// `S_0 - (x - x log x)` against the one-point genus-zero invariants.
    pub s0_series: bool,
    /// `S_1 + log(x)/2` against the two-point genus-zero invariants.
    pub s1_series: bool,
    /// The cross term `sum (2d-1)! <τ_0(1) τ_{2d-1}(ω)> w^{2d}` against
    /// `log(z/w)`.
    pub cross_term: bool,
}

impl UnstableFormsReport {
    pub fn pass(&self) -> bool {
        self.s0_derivative && self.s0_skew && self.s1_derivative && self.s0_series && self.s1_series && self.cross_term
    }
}

/// `log(z(w)/w)` and `w/z(w)` through `w^order`.
fn log_and_inverse_ratio(order: i64) -> Result<(Series, Series)> {
    let ratio = catalan_inverse(order + 1).shift_exp(-1).truncate(order);
    Ok((ratio.log()?, ratio.inv()?))
}

/// `S_0 + x log x - x` as a series in `w`, from the closed form.
pub fn s0_regular_series(order: i64) -> Result<Series> {
    let (log_ratio, inv_ratio) = log_and_inverse_ratio(order + 1)?;
    // 1/z - z = w^{-1} (w/z) - z, and (z + 1/z) log(z/w) = w^{-1} log(z/w).
    let zw = catalan_inverse(order);
    let p = inv_ratio.shift_exp(-1).sub(&zw);
    let one_over_w = Series::monomial(W, q(1), -1, order);
    Ok(p.add(&log_ratio.shift_exp(-1)).sub(&one_over_w).truncate(order))
}

/// `S_1 + log(x)/2 = (log(z/w) - log(1 - z^2))/2` as a series in `w`.
pub fn s1_regular_series(order: i64) -> Result<Series> {
    let (log_ratio, _) = log_and_inverse_ratio(order)?;
    let zw = catalan_inverse(order);
    let one_minus = Series::one(W, order).sub(&zw.mul(&zw));
    Ok(log_ratio.sub(&one_minus.log()?).scale(&qf(1, 2)))
}

/// Coefficient of `w^e` in `-sum_d (2d-2)! <τ_{2d-2}(ω)>_{0,1}^d w^{2d-1}`.
fn s0_expected(e: i64) -> Result<Rational> {
    if e < 1 || e % 2 == 0 {
        return Ok(Rational::zero());
    }
    let d = ((e + 1) / 2) as usize;
    let b = 2 * d as i64 - 2;
    Ok(-factorial_q(b as u64) * stationary_invariant(0, d, &[b])?.value)
}

/// `(e-1)! <τ_0(1) τ_{e-1}(ω)>_{0,2}^{e/2}`, the cross term at `w^e`.
fn cross_expected(e: i64) -> Result<Rational> {
    if e < 2 || e % 2 != 0 {
        return Ok(Rational::zero());
    }
    Ok(factorial_q((e - 1) as u64) * unit_insertions(0, 1, (e / 2) as usize, &[e - 1])?)
}

/// Coefficient of `w^e` in `(1/2) sum_d <(-τ_0(1)/2 - sum b! τ_b(ω) w^{b+1})^2>_{0,2}^d`,
/// with the unstable constant `<τ_0(1)^2>_{0,2}^0` set to zero.
fn s1_expected(e: i64) -> Result<Rational> {
    if e < 2 || e % 2 != 0 {
        return Ok(Rational::zero());
    }
    let d = (e / 2) as usize;
    let mut two_point = Rational::zero();
    for b1 in 0..=e - 2 {
        let b2 = e - 2 - b1;
        two_point += factorial_q(b1 as u64) * factorial_q(b2 as u64) * stationary_invariant(0, d, &[b1, b2])?.value;
    }
    Ok((cross_expected(e)? + two_point) * qf(1, 2))
}

fn series_agree(s: &Series, order: i64, f: impl Fn(i64) -> Result<Rational>) -> Result<bool> {
    for e in s.min_exp().min(0)..=order {
        if s.coeff(e)? != f(e)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact identities for `S_0`, `S_1` in `z`, and their expansions at
/// `x = ∞` against the unstable invariants through `w^order`.
pub fn s0_s1_closed_forms(order: i64) -> Result<UnstableFormsReport> {
    let s = s0();
    let ds = s.derivative();
    let s0_derivative = ds.rational.is_zero() && ds.log_coeff == dx_dz();
    // log(1/z) = -log z.
    let s0_skew = s.rational.invert_var() == s.rational.scale(&q(-1)) && s.log_coeff.invert_var() == s.log_coeff;
    let s1_derivative = s1_prime_x() == s1_prime_expected();
    let s0_series = series_agree(&s0_regular_series(order)?, order, s0_expected)?;
    let s1_series = series_agree(&s1_regular_series(order)?, order, s1_expected)?;
    let (log_ratio, _) = log_and_inverse_ratio(order)?;
    let cross_term = series_agree(&log_ratio, order, cross_expected)?;
    Ok(UnstableFormsReport {
        order,
        s0_derivative,
        s0_skew,
        s1_derivative,
        s0_series,
        s1_series,
        cross_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_hold() {
        let r = s0_s1_closed_forms(9).unwrap();
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn s0_leading_terms() {
        // -<τ_0(ω)>_{0,1}^1 w - 2 <τ_2(ω)>_{0,1}^2 w^3 = -w - w^3/2.
        let s = s0_regular_series(4).unwrap();
        assert_eq!(s.coeff(-1).unwrap(), q(0));
        assert_eq!(s.coeff(1).unwrap(), q(-1));
        assert_eq!(s.coeff(3).unwrap(), qf(-1, 2));
    }

    #[test]
    fn s1_derivative_by_hand() {
        // z = 2: -2 * 5 / (2 * 9) = -5/9.
        assert_eq!(s1_prime_expected().eval(&q(2)).unwrap(), qf(-5, 9));
        assert_eq!(s1_prime_x().eval(&q(2)).unwrap(), qf(-5, 9));
    }
}
