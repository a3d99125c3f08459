//! The functions `X_d(u)` as partition sums and as Laguerre values, the
//! difference equation they satisfy, the vanishing polynomial `Y_d`, and the
//! quadratic relations coming from the Toda lattice.
//!
//! Everything is written in `u = x/ħ`, so a shift of `x` by `ħ` is a shift
//! of `u` by one.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{factorial_q, q, qf, Rational};
use crate::exact::{Poly, RatFunc};
use crate::partitions::hook_table;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XFunction {
    pub d: usize,
    /// Rational function of `u`.
    pub value: RatFunc,
}

/// `(u + 1)(u + 2)...(u + d)`.
pub fn rising(d: usize) -> Poly {
    Poly::from_shifts((1..=d as i64).map(q))
}

fn compute_x(d: usize) -> RatFunc {
    let table = hook_table(d);
    // Common denominator prod (u + i); each λ contributes prod (u + i - λ_i) / H^2.
    let num = table
        .par_iter()
        .map(|h| {
            let p = Poly::from_shifts(h.partition.padded(d).enumerate().map(|(k, l)| q(k as i64 + 1 - l as i64)));
            p.scale(&h.inv_hook_sq())
        })
        .reduce(Poly::zero, |a, b| &a + &b);
    RatFunc::new(num, rising(d)).expect("nonzero denominator")
}

fn x_cache() -> &'static Mutex<HashMap<usize, Arc<RatFunc>>> {
    static C: OnceLock<Mutex<HashMap<usize, Arc<RatFunc>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn x_value(d: usize) -> Arc<RatFunc> {
    if let Some(x) = x_cache().lock().expect("poisoned").get(&d) {
        return x.clone();
    }
    let x = Arc::new(compute_x(d));
    x_cache().lock().expect("poisoned").entry(d).or_insert(x).clone()
}

/// `X_d = sum_{λ ⊢ d} H_λ^{-2} prod_{i=1..d} (u + i - λ_i)/(u + i)`, with `X_0 = 1`.
pub fn x_partition(d: usize) -> XFunction {
    XFunction {
        d,
        value: (*x_value(d)).clone(),
    }
}

/// Generalized Laguerre value `L_n^{(α)}(z)` for a rational parameter.
pub fn laguerre_value(n: usize, alpha: &Rational, z: &Rational) -> Rational {
    laguerre_symbolic(n, z).eval(alpha)
}

/// `L_n^{(α)}(z)` as a polynomial in the parameter `α`.
pub fn laguerre_symbolic(n: usize, z: &Rational) -> Poly {
    let mut acc = Poly::zero();
    let mut zi = Rational::one();
    for i in 0..=n {
        // C(n + α, n - i) = prod_{j < n-i} (n + α - j) / (n - i)!
        let k = n - i;
        let binom = Poly::from_shifts((0..k as i64).map(|j| q(n as i64 - j))).scale(&factorial_q(k as u64).recip());
        let sign = if i % 2 == 0 { q(1) } else { q(-1) };
        acc = &acc + &binom.scale(&(sign * &zi / factorial_q(i as u64)));
        zi *= z;
    }
    acc
}

/// Pole form `(1/d!) (1 - sum_{m=1..d} L_{d-m}^{(m)}(1) / (m-1)! * 1/(u+m))`.
pub fn x_laguerre_poles(d: usize) -> RatFunc {
    let one = q(1);
    let mut acc = RatFunc::one();
    for m in 1..=d {
        let c = laguerre_value(d - m, &q(m as i64), &one) / factorial_q(m as u64 - 1);
        acc = &acc - &RatFunc::pole(q(m as i64), 1).scale(&c);
    }
    acc.scale(&factorial_q(d as u64).recip())
}

/// Ratio form `L_d^{(u)}(1) / (d! L_d^{(u)}(0))`.
pub fn x_laguerre_ratio(d: usize) -> RatFunc {
    let num = laguerre_symbolic(d, &q(1));
    let den = laguerre_symbolic(d, &q(0)).scale(&factorial_q(d as u64));
    RatFunc::new(num, den).expect("L_d^(u)(0) is a nonzero polynomial")
}

/// `X_d` through Laguerre polynomials; both closed forms are computed and
/// must agree.
pub fn x_laguerre(d: usize) -> Result<XFunction> {
    let poles = x_laguerre_poles(d);
    let ratio = x_laguerre_ratio(d);
    if poles != ratio {
        return Err(Error::Invalid(format!("the two Laguerre forms of X_{d} disagree")));
    }
    Ok(XFunction { d, value: poles })
}

/// `X_{d-1}(u+1)/(u+1) + u (X_d(u-1) - X_d(u))`, which should vanish.
pub fn xd_recursion_defect(d: usize) -> RatFunc {
    assert!(d >= 1, "the recursion starts at d = 1");
    let prev = x_value(d - 1);
    let cur = x_value(d);
    let a = &prev.shift(&q(1)) * &RatFunc::pole(q(1), 1);
    let b = &RatFunc::x() * &(&cur.shift(&q(-1)) - &cur);
    &a + &b
}

pub fn verify_xd_recursion(d: usize) -> bool {
    d >= 1 && xd_recursion_defect(d).is_zero()
}

/// The summand of `Y_d` for one partition, `[(d - y) g(y+1) + (y - 1) g(y) + g(y - 1)] / H^2`.
fn y_summand(d: usize, g: &Poly) -> Poly {
    let dy = Poly::new(vec![q(d as i64), q(-1)]);
    let ym1 = Poly::linear(q(-1));
    &(&(&dy * &g.shift(&q(1))) + &(&ym1 * g)) + &g.shift(&q(-1))
}

/// `Y_d(y) = sum_{λ ⊢ d} [(d - y) g_λ(y+1) + (y - 1) g_λ(y) + g_λ(y - 1)] / H_λ^2`.
pub fn y_polynomial(d: usize) -> Poly {
    hook_table(d)
        .par_iter()
        .map(|h| y_summand(d, &h.partition.g_function()).scale(&h.inv_hook_sq()))
        .reduce(Poly::zero, |a, b| &a + &b)
}

/// `Y_d(y0)` summed term by term without expanding the polynomial.
pub fn y_value(d: usize, y0: &Rational) -> Rational {
    let g_at = |g: &Poly, y: Rational| g.eval(&y);
    hook_table(d)
        .iter()
        .map(|h| {
            let g = h.partition.g_function();
            let v = (q(d as i64) - y0) * g_at(&g, y0 + q(1)) + (y0 - q(1)) * g_at(&g, y0.clone()) + g_at(&g, y0 - q(1));
            v * h.inv_hook_sq()
        })
        .fold(Rational::zero(), |a, b| a + b)
}

/// `Y_d(y) = Y_{d+1}(y+1) - Y_{d+1}(y)` as polynomials.
pub fn y_inductive_step(d: usize) -> bool {
    let next = y_polynomial(d + 1);
    y_polynomial(d) == &next.shift(&q(1)) - &next
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TodaVariant {
    Full,
    OneLevel,
}

/// `sum_{a+b=d+1} X_a X_b (a-b)^2 / 2`.
fn toda_rhs(d: usize) -> RatFunc {
    let mut acc = RatFunc::zero();
    for a in 0..=d + 1 {
        let b = d + 1 - a;
        let w = qf((a as i64 - b as i64).pow(2), 2);
        if w.is_zero() {
            continue;
        }
        acc = &acc + &(&*x_value(a) * &*x_value(b)).scale(&w);
    }
    acc
}

/// The degree-`d` quadratic relation from the Toda lattice.
pub fn toda_quadratic_check(d: usize, variant: TodaVariant) -> bool {
    let one = q(1);
    let rhs = toda_rhs(d);
    match variant {
        TodaVariant::Full => {
            let mut lhs = RatFunc::zero();
            for a in 0..=d {
                lhs = &lhs + &(&x_value(a).shift(&one) * &x_value(d - a).shift(&-one.clone()));
            }
            let w = (&RatFunc::x() / &(&RatFunc::x() + &RatFunc::one())).expect("nonzero");
            &w * &lhs == rhs
        }
        TodaVariant::OneLevel => {
            let mut lhs = RatFunc::zero();
            for a in 0..=d + 1 {
                let (xa, xb) = (x_value(a), x_value(d + 1 - a));
                let xb_down = xb.shift(&-one.clone());
                lhs = &lhs + &(&(&*xa - &xa.shift(&-one.clone())) * &xb_down);
            }
            let inv_u2 = RatFunc::pole(q(0), 2);
            lhs == &inv_u2 * &rhs
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::partial_fractions;
    use crate::exact::rational::binomial;
    use crate::exact::rational::powi;

    /// Straight from the defining sum with numeric binomials.
    fn laguerre_by_definition(n: usize, alpha: i64, z: &Rational) -> Rational {
        (0..=n as i64)
            .map(|i| {
                let sign = if i % 2 == 0 { q(1) } else { q(-1) };
                sign * binomial(n as i64 + alpha, n as i64 - i) * powi(z, i) / factorial_q(i as u64)
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    fn u_plus(a: i64) -> RatFunc {
        RatFunc::from_poly(Poly::linear(q(a)))
    }

    #[test]
    fn small_x() {
        assert_eq!(x_partition(0).value, RatFunc::one());
        assert_eq!(x_partition(1).value, (&RatFunc::x() / &u_plus(1)).unwrap());
        // (u^2 + u - 1) / (2 (u+1)(u+2))
        let want = RatFunc::new(Poly::new(vec![qf(-1, 2), qf(1, 2), qf(1, 2)]), rising(2)).unwrap();
        assert_eq!(x_partition(2).value, want);
    }

    #[test]
    fn laguerre_small_values() {
        assert_eq!(laguerre_value(0, &qf(7, 3), &q(5)), q(1));
        assert_eq!(laguerre_value(1, &q(1), &q(1)), q(1));
        assert_eq!(laguerre_value(2, &q(0), &q(1)), qf(-1, 2));
        for n in 0..6 {
            for a in 0..4 {
                assert_eq!(laguerre_value(n, &q(a), &qf(3, 2)), laguerre_by_definition(n, a, &qf(3, 2)));
            }
        }
    }

    #[test]
    fn laguerre_forms_match_partition_sum() {
        for d in 0..=8 {
            assert_eq!(x_laguerre(d).unwrap().value, x_partition(d).value, "d = {d}");
        }
        let d2 = (&(&RatFunc::one() - &RatFunc::pole(q(1), 1)) - &RatFunc::pole(q(2), 1)).scale(&qf(1, 2));
        assert_eq!(x_laguerre(2).unwrap().value, d2);
    }

    #[test]
    fn recursion_low_degrees() {
        for d in 1..=6 {
            assert!(verify_xd_recursion(d), "d = {d}");
        }
        assert!(!verify_xd_recursion(0));
    }

    #[test]
    fn y_vanishes() {
        for d in 1..=6 {
            assert!(y_polynomial(d).is_zero());
            assert!(y_value(d, &q(d as i64)).is_zero());
        }
        assert!(y_inductive_step(3));
    }

    #[test]
    fn y_summand_for_one_box() {
        // (1 - y)(y + 1) + (y - 1) y + (y - 1) = 0 termwise for λ = (1).
        assert!(y_summand(1, &Poly::x()).is_zero());
    }

    #[test]
    fn x_tends_to_inverse_factorial() {
        for d in 0..=8 {
            let x = x_partition(d).value;
            assert!(x.num().degree() <= x.den().degree());
            let lim = if x.num().degree() == x.den().degree() { x.num().lead() } else { q(0) };
            assert_eq!(lim, factorial_q(d as u64).recip());
        }
    }

    #[test]
    fn poles_are_simple() {
        for d in 1..=8 {
            let pf = partial_fractions(&x_partition(d).value).unwrap();
            assert_eq!(pf.max_order(), 1);
            assert!(pf.terms.iter().all(|t| t.pole < q(0) && t.pole >= q(-(d as i64))));
        }
    }

    #[test]
    fn toda_relations() {
        for d in 0..=4 {
            assert!(toda_quadratic_check(d, TodaVariant::Full), "full d = {d}");
            assert!(toda_quadratic_check(d, TodaVariant::OneLevel), "one-level d = {d}");
        }
    }
}
