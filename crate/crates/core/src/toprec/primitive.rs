//! Skew primitives `F_{g,n}` of the stable correlation forms and their
//! expansion at `x = ∞`.
//!
//! A slot-skew function that does not depend on one of its variables is
//! zero, so the slotwise antiderivative followed by the slotwise projection
//! `G -> (G - G∘σ_i)/2` is the unique primitive.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use serde::Serialize;

use super::expansion::{exponent_tuples, function_x_expansion, Mismatch};
use super::form::PoleSum;
use super::recursion::toprec_wgn;
use crate::error::{Error, Result};
use crate::exact::rational::{factorial_q, qf, Rational};
use crate::wedge::{connected_table, unit_insertions};

type Cache = Mutex<BTreeMap<(usize, usize), Arc<PoleSum>>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// `F_{g,n}` as a sum of products of poles; checked against its three
/// defining conditions before it is returned.
pub fn primitive_fgn(g: usize, n: usize) -> Result<Arc<PoleSum>> {
    if let Some(f) = cache().lock().expect("cache poisoned").get(&(g, n)) {
        return Ok(f.clone());
    }
    let w = toprec_wgn(g, n)?;
    let mut f = (*w).clone();
    for i in 0..n {
        f = f.antiderivative(i)?;
    }
    let half = qf(1, 2);
    for i in 0..n {
        f = f.sub(&f.function_involution(i)?).scale(&half);
    }
    let report = primitive_conditions(&f, &w)?;
    if !report.all() {
        return Err(Error::Invalid(format!("primitive of W_{{{g},{n}}} fails its conditions: {report:?}")));
    }
    let f = Arc::new(f);
    cache().lock().expect("cache poisoned").insert((g, n), f.clone());
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimitiveReport {
    pub derivative_matches: bool,
    pub skew: bool,
    pub vanishes_at_origin: bool,
}

impl PrimitiveReport {
    pub fn all(&self) -> bool {
        self.derivative_matches && self.skew && self.vanishes_at_origin
    }
}

/// `d_1…d_n F = W`, `F(…,1/z_i,…) = -F` in every slot, and `F(0,…,0) = 0`.
pub fn primitive_conditions(f: &PoleSum, w: &PoleSum) -> Result<PrimitiveReport> {
    let n = f.n();
    let mut d = f.clone();
    for i in 0..n {
        d = d.derivative(i)?;
    }
    let mut skew = true;
    for i in 0..n {
        skew &= f.function_involution(i)?.add(f).is_zero();
    }
    let origin = vec![Rational::zero(); n];
    Ok(PrimitiveReport {
        derivative_matches: d.sub(w).is_zero(),
        skew,
        vanishes_at_origin: f.eval(&origin)?.is_zero(),
    })
}

/// Coefficients of `prod x_i^{-e_i}` in `F_{g,n}(z(x_1),…)` for `sum e <= total`.
pub fn fgn_x_expansion(g: usize, n: usize, total: i64) -> Result<BTreeMap<Vec<i64>, Rational>> {
    function_x_expansion(&*primitive_fgn(g, n)?, total)
}

/// Expected coefficient of `prod x_i^{-e_i}`: each `e_i = 0` inserts
/// `-τ_0(1)/2`, each `e_i = b+1` inserts `-b! τ_b(ω)`.
pub fn fgn_expected(g: usize, e: &[i64]) -> Result<Rational> {
    let k = e.iter().filter(|&&x| x == 0).count();
    let b: Vec<i64> = e.iter().filter(|&&x| x > 0).map(|x| x - 1).collect();
    // sum b = 2g - 2 + 2d + k fixes the degree.
    let twice_d = b.iter().sum::<i64>() - 2 * g as i64 + 2 - k as i64;
    if twice_d < 0 || twice_d % 2 != 0 {
        return Ok(Rational::zero());
    }
    let weight: Rational = b.iter().map(|&x| -factorial_q(x as u64)).product();
    let units = qf(-1, 2).pow(k as i32);
    Ok(units * weight * unit_insertions(g, k, (twice_d / 2) as usize, &b)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimitiveExpansionReport {
    pub g: usize,
    pub n: usize,
    pub total: i64,
    pub conditions: PrimitiveReport,
    pub checked: usize,
    pub pass: bool,
    pub first_mismatch: Option<Mismatch>,
}

/// The primitive's conditions together with its expansion against the
/// descendant combination.
pub fn fgn_check(g: usize, n: usize, total: i64) -> Result<PrimitiveExpansionReport> {
    let f = primitive_fgn(g, n)?;
    let conditions = primitive_conditions(&f, &*toprec_wgn(g, n)?)?;
    let exp = fgn_x_expansion(g, n, total)?;
    let dmax = ((total + 2) / 2).max(0) as usize;
    for m in 1..=n {
        connected_table(m, dmax, total, Some(total));
    }
    let mut first = None;
    for (e, found) in &exp {
        let expected = fgn_expected(g, e)?;
        if &expected != found {
            first = Some(Mismatch {
                exponents: e.clone(),
                expected,
                found: found.clone(),
            });
            break;
        }
    }
    Ok(PrimitiveExpansionReport {
        g,
        n,
        total,
        pass: first.is_none() && conditions.all(),
        conditions,
        checked: exp.len(),
        first_mismatch: first,
    })
}

/// Tuples used by [`fgn_check`]; exposed for reporting sizes.
pub fn fgn_tuple_count(n: usize, total: i64) -> usize {
    exponent_tuples(n, total).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::q;

    #[test]
    fn conditions_low_range() {
        for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2), (2, 1)] {
            let f = primitive_fgn(g, n).unwrap();
            let r = primitive_conditions(&f, &toprec_wgn(g, n).unwrap()).unwrap();
            assert!(r.all(), "({g},{n}) {r:?}");
        }
    }

    #[test]
    fn f03_leading_coefficient() {
        // <τ_0(ω)^3>_{0,3}^0 = 1 with three factors of -0!.
        let e = fgn_x_expansion(0, 3, 3).unwrap();
        assert_eq!(e[&vec![1, 1, 1]], q(-1));
        assert_eq!(e[&vec![0, 0, 0]], q(0));
    }

    #[test]
    fn f11_constant_term() {
        // A lone unit insertion has odd dimension in genus one, and
        // -0! <τ_0(ω)>_{1,1}^0 = 1/24.
        let e = fgn_x_expansion(1, 1, 2).unwrap();
        assert_eq!(e[&vec![0]], q(0));
        assert_eq!(e[&vec![1]], qf(1, 24));
    }

    #[test]
    fn expansions_match() {
        for (g, n, t) in [(0, 3, 5), (1, 1, 6), (0, 4, 4), (1, 2, 4)] {
            let r = fgn_check(g, n, t).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }
}
