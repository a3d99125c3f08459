//! The curve `x = z + 1/z`, `y = log z` and its unstable forms.

use num_traits::{One, Zero};

use crate::error::Result;
use crate::exact::rational::{binomial, q, Rational};
use crate::exact::{Poly, RatFunc, Series, ZExpr};

/// Local variable for expansions at `x = ∞`, standing for `1/x`.
pub const W: &str = "w";

/// `z(x) = sum_m C_m x^{-(2m+1)}` as a series in `w = 1/x` through `w^order`.
pub fn catalan_inverse(order: i64) -> Series {
    Series::from_fn(W, 0, order, |e| {
        if e % 2 == 1 {
            let m = (e - 1) / 2;
            binomial(2 * m, m) / q(m + 1)
        } else {
            Rational::zero()
        }
    })
}

/// `x(z) = z + 1/z`.
pub fn x_of_z() -> RatFunc {
    RatFunc::new(Poly::from_ints(&[1, 0, 1]), Poly::x()).expect("nonzero denominator")
}

/// `dx/dz = 1 - 1/z^2`.
pub fn dx_dz() -> RatFunc {
    x_of_z().derivative()
}

/// `d/dx` on functions of `z`.
pub fn d_dx(f: &RatFunc) -> RatFunc {
    (&f.derivative() / &dx_dz()).expect("dx/dz is not identically zero")
}

/// Coefficient of `dz` in `W_{0,1} = log z dx`.
pub fn w01() -> ZExpr {
    ZExpr::log_z() * ZExpr::rat(dx_dz())
}

/// `W_{0,1}` pulled back along `z -> 1/z`, as a coefficient of `dz`.
pub fn w01_involuted() -> ZExpr {
    // y(1/z) dx(1/z) with dx invariant under the involution.
    ZExpr::log(RatFunc::x().inv().expect("x is nonzero")) * ZExpr::rat(dx_dz())
}

/// `W_{0,2}` with its subtraction term, as the coefficient of `dz1 dz2`.
pub fn w02_eval(z1: &Rational, z2: &Rational) -> Result<Rational> {
    let x = x_of_z();
    let dx = dx_dz();
    let diff = z1 - z2;
    let xd = x.eval(z1)? - x.eval(z2)?;
    if diff.is_zero() || xd.is_zero() {
        return Err(crate::Error::DivisionByZero);
    }
    Ok((&diff * &diff).recip() - dx.eval(z1)? * dx.eval(z2)? / (&xd * &xd))
}

/// The simplified form `1/(1 - z1 z2)^2` of [`w02_eval`].
pub fn w02_simplified(z1: &Rational, z2: &Rational) -> Result<Rational> {
    let d = Rational::one() - z1 * z2;
    if d.is_zero() {
        return Err(crate::Error::DivisionByZero);
    }
    Ok((&d * &d).recip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::qf;

    #[test]
    fn catalan_terms() {
        let z = catalan_inverse(11);
        let c: Vec<Rational> = (1..=11).step_by(2).map(|e| z.coeff(e).unwrap()).collect();
        assert_eq!(c, vec![q(1), q(1), q(2), q(5), q(14), q(42)]);
    }

    #[test]
    fn catalan_inverts_x() {
        // x(z(w)) = 1/w, i.e. w z^2 - z + w = 0.
        let z = catalan_inverse(15);
        let w = Series::var_series(W, 15);
        let r = w.mul(&z.mul(&z)).sub(&z).add(&w);
        assert!(r.truncate(15).is_zero());
    }

    #[test]
    fn w02_simplifies() {
        for (a, b) in [(q(2), q(3)), (qf(1, 3), qf(-5, 7)), (q(-4), qf(2, 9))] {
            assert_eq!(w02_eval(&a, &b).unwrap(), w02_simplified(&a, &b).unwrap());
            assert_eq!(w02_eval(&a, &b).unwrap(), w02_eval(&b, &a).unwrap());
        }
    }

    #[test]
    fn w01_is_odd() {
        // log(1/z) = -log z near z = 1; the local expansion of the sum
        // must vanish.
        let s = crate::exact::local_laurent(&(w01() + w01_involuted()), &q(1), 4).unwrap();
        assert!(s.is_zero());
    }
}
