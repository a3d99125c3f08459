//! Expansions of forms and primitives at `z = 0`, i.e. at `x = ∞` on the
//! Catalan branch, and their comparison with stationary invariants.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::curve::catalan_inverse;
use super::form::{pole_at_catalan, Pole, PoleSum};
use super::recursion::toprec_wgn;
use crate::error::Result;
use crate::exact::rational::{factorial_q, Rational};
use crate::exact::Series;
use crate::wedge::{connected_table, genus_of, stationary_invariant};

/// All `b` in `N^n` with `sum b <= total`, in lexicographic order.
pub fn exponent_tuples(n: usize, total: i64) -> Vec<Vec<i64>> {
    fn rec(n: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=left {
            cur.push(b);
            rec(n, left - b, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, total, &mut Vec::new(), &mut out);
    out
}

/// Per-pole series in `w = 1/x`, with an optional extra factor.
struct SlotTable {
    series: BTreeMap<Pole, Series>,
}

impl SlotTable {
    fn build(sum: &PoleSum, order: i64, form: bool) -> Result<SlotTable> {
        let zw = catalan_inverse(order);
        // dz = (dz/dx) dx and dz/dx = -w^2 dz/dw.
        let dzdx = zw.derivative().shift_exp(2).scale(&-Rational::one());
        let mut series = BTreeMap::new();
        for p in sum.terms().keys().flatten() {
            if series.contains_key(p) {
                continue;
            }
            let s = pole_at_catalan(*p, &zw)?;
            series.insert(*p, if form { s.mul(&dzdx) } else { s });
        }
        Ok(SlotTable { series })
    }

    fn coeff(&self, sum: &PoleSum, exps: &[i64]) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (key, c) in sum.terms() {
            let mut t = c.clone();
            for (p, e) in key.iter().zip(exps) {
                let v = self.series[p].coeff(*e)?;
                if v.is_zero() {
                    t = Rational::zero();
                    break;
                }
                t *= v;
            }
            acc += t;
        }
        Ok(acc)
    }
}

/// Coefficients of `prod dx_i / x_i^{b_i + 2}` in `W_{g,n}` for `sum b <= total`.
pub fn wgn_x_expansion(g: usize, n: usize, total: i64) -> Result<BTreeMap<Vec<i64>, Rational>> {
    form_x_expansion(&*toprec_wgn(g, n)?, total)
}

/// [`wgn_x_expansion`] for a form already at hand.
pub fn form_x_expansion(w: &PoleSum, total: i64) -> Result<BTreeMap<Vec<i64>, Rational>> {
    let table = SlotTable::build(w, total + 2, true)?;
    exponent_tuples(w.n(), total)
        .into_par_iter()
        .map(|b| {
            let e: Vec<i64> = b.iter().map(|x| x + 2).collect();
            Ok((b, table.coeff(w, &e)?))
        })
        .collect()
}

/// Expansion of a function (such as a primitive) in `w_i = 1/x_i`:
/// coefficients of `prod w_i^{e_i}` for `sum e <= total`.
pub fn function_x_expansion(f: &PoleSum, total: i64) -> Result<BTreeMap<Vec<i64>, Rational>> {
    let table = SlotTable::build(f, total, false)?;
    exponent_tuples(f.n(), total)
        .into_par_iter()
        .map(|e| Ok((e.clone(), table.coeff(f, &e)?)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub exponents: Vec<i64>,
    #[serde(with = "crate::exact::rational::text")]
    pub expected: Rational,
    #[serde(with = "crate::exact::rational::text")]
    pub found: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionReport {
    pub g: usize,
    pub n: usize,
    pub total: i64,
    pub checked: usize,
    pub pass: bool,
    pub first_mismatch: Option<Mismatch>,
}

/// `prod (b_i+1)! <prod τ_{b_i}(ω)>_{g,n}^d` with `d` fixed by dimension.
pub fn weighted_invariant(g: usize, b: &[i64]) -> Result<Rational> {
    let s: i64 = b.iter().sum();
    let twice_d = s - 2 * g as i64 + 2;
    if twice_d < 0 || twice_d % 2 != 0 {
        return Ok(Rational::zero());
    }
    let d = (twice_d / 2) as usize;
    debug_assert_eq!(genus_of(d, b), Some(g));
    let w: Rational = b.iter().map(|&x| factorial_q((x + 1) as u64)).product();
    Ok(w * stationary_invariant(g, d, b)?.value)
}

/// Compares the `x`-expansion of `W_{g,n}` with the wedge invariants for all
/// exponent tuples with `sum b <= total`.
pub fn ns_check(g: usize, n: usize, total: i64) -> Result<ExpansionReport> {
    let exp = wgn_x_expansion(g, n, total)?;
    // One shared wedge table covers every tuple.
    let dmax = ((total + 2) / 2).max(0) as usize;
    connected_table(n, dmax, total + 1, Some(total + n as i64));
    let mut first = None;
    for (b, found) in &exp {
        let expected = weighted_invariant(g, b)?;
        if &expected != found {
            first = Some(Mismatch {
                exponents: b.clone(),
                expected,
                found: found.clone(),
            });
            break;
        }
    }
    Ok(ExpansionReport {
        g,
        n,
        total,
        checked: exp.len(),
        pass: first.is_none(),
        first_mismatch: first,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{q, qf};

    #[test]
    fn tuple_count() {
        assert_eq!(exponent_tuples(3, 2).len(), 10);
        assert_eq!(exponent_tuples(1, 4), (0..=4).map(|b| vec![b]).collect::<Vec<_>>());
    }

    #[test]
    fn w03_leading_coefficient() {
        let e = wgn_x_expansion(0, 3, 0).unwrap();
        assert_eq!(e[&vec![0, 0, 0]], q(1));
    }

    #[test]
    fn w11_leading_coefficient() {
        let e = wgn_x_expansion(1, 1, 2).unwrap();
        assert_eq!(e[&vec![0]], qf(-1, 24));
    }

    #[test]
    fn ns_low_orders() {
        for (g, n, t) in [(0, 3, 4), (1, 1, 6), (1, 2, 4)] {
            let r = ns_check(g, n, t).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }
}
