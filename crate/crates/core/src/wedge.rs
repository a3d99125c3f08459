//! Stationary invariants of the projective line from the eigenvalues of the
//! diagonal operator on partition vectors.
//!
//! The disconnected `n`-point function in degree `d` is
//! `sum_{λ ⊢ d} (dim λ / d!)^2 prod_i ε_λ(x_i)`. Dividing the degree
//! generating function by the vacuum `sum_d q^d / d! = e^q` and taking set
//! partition cumulants over the marked points gives the connected function,
//! whose coefficient of `prod x_i^{b_i + 1}` in degree `d` is the invariant
//! `<prod τ_{b_i}(ω)>_{g,n}^d` with the genus fixed by
//! `sum b_i = 2g - 2 + 2d`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::rational::{factorial_q, q, qbig, qf, Rational};
use crate::exact::{MultiSeries, Series};
use crate::partitions::{hook_table, Partition};

/// `ζ(z) = e^{z/2} - e^{-z/2}` through `z^order`.
pub fn zeta_series(var: &str, order: i64) -> Series {
    let half = qf(1, 2);
    Series::exp_linear(var, &half, order).sub(&Series::exp_linear(var, &-half.clone(), order))
}

/// `1/ζ(z)` through `z^order`; starts at `z^-1`.
pub fn inv_zeta_series(var: &str, order: i64) -> Series {
    // ζ has valuation 1, so its inverse needs two more terms of ζ.
    zeta_series(var, order + 2).inv().expect("ζ is invertible").truncate(order)
}

/// `ε_λ(z) = sum_i (e^{z(λ_i - i + 1/2)} - e^{z(1/2 - i)}) + 1/ζ(z)`.
pub fn e0_eigenvalue(l: &Partition, var: &str, order: i64) -> Series {
    let mut acc = inv_zeta_series(var, order);
    for (k, &part) in l.parts().iter().enumerate() {
        let i = k as i64 + 1;
        let a = q(part as i64 - i) + qf(1, 2);
        let b = qf(1, 2) - q(i);
        acc = acc.add(&Series::exp_linear(var, &a, order).sub(&Series::exp_linear(var, &b, order)));
    }
    acc
}

pub fn var_name(i: usize) -> String {
    format!("x{}", i + 1)
}

fn mask_vars(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// `sum_{λ ⊢ d} (dim λ / d!)^2 prod_{i in vars} ε_λ(x_i)` with every variable
/// truncated at `order` and the total degree at `total`.
fn disconnected(d: usize, vars: &[usize], order: i64, total: Option<i64>) -> MultiSeries {
    let fact = factorial_q(d as u64);
    let parts: Vec<MultiSeries> = hook_table(d)
        .par_iter()
        .map(|h| {
            let w = qbig(h.dimension.clone()) / &fact;
            let w = &w * &w;
            let mut acc = MultiSeries::constant(w);
            for (k, &i) in vars.iter().enumerate() {
                let e = e0_eigenvalue(&h.partition, &var_name(i), order);
                // Each later variable can still lower the total by one.
                let later = (vars.len() - k - 1) as i64;
                acc = acc.mul(&MultiSeries::from_series(&e)).truncate(None, total.map(|t| t + later));
            }
            acc
        })
        .collect();
    let mut acc = MultiSeries::constant(Rational::zero());
    for p in &parts {
        acc = acc.add(p);
    }
    if vars.is_empty() {
        return acc;
    }
    // Keep the variable list even when everything cancels.
    let names: Vec<String> = vars.iter().map(|&i| var_name(i)).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let shape = MultiSeries::zero(&names, &vec![-1; vars.len()], &vec![order; vars.len()], total).expect("valid");
    shape.add(&acc)
}

/// Disconnected `n`-point function in degree `d`.
pub fn disconnected_npoint(d: usize, n: usize, order: i64) -> MultiSeries {
    disconnected(d, &(0..n).collect::<Vec<_>>(), order, None)
}

/// Connected functions for every subset of `n` points and every degree up to
/// `max_degree`, all truncated at a common per-variable order and at a total
/// degree of `total` for the full set of points.
#[derive(Clone, Debug)]
pub struct ConnectedTable {
    pub n: usize,
    pub max_degree: usize,
    pub order: i64,
    pub total: Option<i64>,
    /// `connected[mask][d]`.
    connected: Vec<Vec<MultiSeries>>,
}

impl ConnectedTable {
    pub fn build(n: usize, max_degree: usize, order: i64, total: Option<i64>) -> ConnectedTable {
        assert!(n <= 8, "at most 8 marked points");
        let full = (1u32 << n) - 1;
        // A subset S only needs total degree up to `total + (n - |S|)`,
        // because each missing variable contributes at least -1.
        let cap = |mask: u32| total.map(|t| t + (n as i64 - mask.count_ones() as i64));
        let masks: Vec<u32> = (1..=full).collect();
        let raw: Vec<Vec<MultiSeries>> = masks
            .iter()
            .map(|&m| {
                (0..=max_degree)
                    .map(|d| disconnected(d, &mask_vars(m), order, cap(m)))
                    .collect()
            })
            .collect();
        // Divide by e^q: Zn_d = sum_e Z_e (-1)^{d-e} / (d-e)!.
        let normalized: Vec<Vec<MultiSeries>> = raw
            .iter()
            .map(|z| {
                (0..=max_degree)
                    .map(|d| {
                        let mut acc = z[d].clone();
                        for e in 0..d {
                            let k = d - e;
                            let c = if k % 2 == 0 { q(1) } else { q(-1) } / factorial_q(k as u64);
                            acc = acc.add(&z[e].scale(&c));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let zn = |mask: u32, d: usize| -> MultiSeries {
            if mask == 0 {
                MultiSeries::constant(if d == 0 { Rational::one() } else { Rational::zero() })
            } else {
                normalized[mask as usize - 1][d].clone()
            }
        };
        let mut connected: Vec<Vec<MultiSeries>> = vec![Vec::new(); full as usize + 1];
        for s in 1..=full {
            let first = s & s.wrapping_neg();
            let rest = s ^ first;
            let mut per_degree = Vec::with_capacity(max_degree + 1);
            for d in 0..=max_degree {
                let mut c = zn(s, d);
                // Blocks T containing the first point, T != S.
                let mut sub = rest;
                loop {
                    let t = first | sub;
                    if t != s {
                        for e in 0..=d {
                            let ct: &MultiSeries = &connected[t as usize][e];
                            if ct.is_zero() {
                                continue;
                            }
                            let other = zn(s ^ t, d - e);
                            if other.is_zero() {
                                continue;
                            }
                            c = c.sub(&ct.mul(&other).truncate(None, cap(s)));
                        }
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & rest;
                }
                per_degree.push(c.truncate(None, cap(s)));
            }
            connected[s as usize] = per_degree;
        }
        ConnectedTable {
            n,
            max_degree,
            order,
            total,
            connected,
        }
    }

    /// Connected function of all `n` points in degree `d`.
    pub fn full(&self, d: usize) -> &MultiSeries {
        &self.connected[(1usize << self.n) - 1][d]
    }

    pub fn covers(&self, max_degree: usize, order: i64, total: Option<i64>) -> bool {
        self.max_degree >= max_degree
            && self.order >= order
            && match (self.total, total) {
                (None, _) => true,
                (Some(_), None) => false,
                (Some(a), Some(b)) => a >= b,
            }
    }
}

/// Connected `n`-point function in degree `d`.
pub fn connected_npoint(d: usize, n: usize, order: i64) -> MultiSeries {
    ConnectedTable::build(n, d, order, None).full(d).clone()
}

type TableCache = Mutex<HashMap<usize, Arc<ConnectedTable>>>;

fn tables() -> &'static TableCache {
    static T: OnceLock<TableCache> = OnceLock::new();
    T.get_or_init(Default::default)
}

/// Shared connected table for `n` points covering the request; grows on demand.
pub fn connected_table(n: usize, max_degree: usize, order: i64, total: Option<i64>) -> Arc<ConnectedTable> {
    let existing = tables().lock().expect("poisoned").get(&n).cloned();
    if let Some(t) = &existing {
        if t.covers(max_degree, order, total) {
            return t.clone();
        }
    }
    let (md, o, tt) = match &existing {
        None => (max_degree, order, total),
        Some(t) => (
            t.max_degree.max(max_degree),
            t.order.max(order),
            match (t.total, total) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            },
        ),
    };
    let built = Arc::new(ConnectedTable::build(n, md, o, tt));
    let mut guard = tables().lock().expect("poisoned");
    let slot = guard.entry(n).or_insert_with(|| built.clone());
    if !slot.covers(md, o, tt) {
        *slot = built.clone();
    }
    slot.clone()
}

/// Genus forced by `sum b_i = 2g - 2 + 2d`, if it is a nonnegative integer.
pub fn genus_of(d: usize, b: &[i64]) -> Option<usize> {
    let s: i64 = b.iter().sum::<i64>() + 2 - 2 * d as i64;
    (s >= 0 && s % 2 == 0).then_some((s / 2) as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantValue {
    #[serde(with = "crate::exact::rational::text")]
    pub value: Rational,
    /// The exponents violate the dimension constraint; the value is zero.
    pub dimension_violation: bool,
}

/// `<prod τ_{b_i}(ω)>_{g,n}^d` for `b_i >= -2`.
pub fn stationary_invariant(g: usize, d: usize, b: &[i64]) -> Result<InvariantValue> {
    let n = b.len();
    if n == 0 {
        return Err(Error::Invalid("at least one insertion is needed".into()));
    }
    if let Some(x) = b.iter().find(|&&x| x < -2) {
        return Err(Error::Invalid(format!("descendant exponent {x} below -2")));
    }
    if genus_of(d, b) != Some(g) {
        return Ok(InvariantValue {
            value: Rational::zero(),
            dimension_violation: true,
        });
    }
    let exps: Vec<i64> = b.iter().map(|x| x + 1).collect();
    let order = *exps.iter().max().expect("n >= 1");
    let total: i64 = exps.iter().sum();
    let table = connected_table(n, d, order, Some(total));
    let value = table.full(d).coeff(&exps)?;
    Ok(InvariantValue {
        value,
        dimension_violation: false,
    })
}

/// Sum of `k` unit insertions: `<τ_0(1)^k prod τ_{b_i}(ω)>_{g,n+k}^d`,
/// reduced by the string equation to stationary invariants.
pub fn unit_insertions(g: usize, k: usize, d: usize, b: &[i64]) -> Result<Rational> {
    let n = b.len();
    if b.iter().any(|&x| x < -2) {
        return Err(Error::Invalid("descendant exponent below -2".into()));
    }
    let s: i64 = b.iter().sum();
    if s != 2 * g as i64 - 2 + 2 * d as i64 + k as i64 {
        return Ok(Rational::zero());
    }
    if k == 0 {
        return Ok(stationary_invariant(g, d, b)?.value);
    }
    if g == 0 && d == 0 && n + k <= 3 {
        // Degree zero genus zero with three points is the triple intersection
        // on the target: two units and one point class.
        if n + k == 3 {
            return Ok(if k == 2 && b == [0] { q(1) } else { q(0) });
        }
        return Err(Error::UnstableCorrelator(format!(
            "<τ_0(1)^{k} τ_{b:?}(ω)>_{{0,{}}}^0",
            n + k
        )));
    }
    let mut acc = Rational::zero();
    for j in 0..n {
        if b[j] > 0 {
            let mut c = b.to_vec();
            c[j] -= 1;
            acc += unit_insertions(g, k - 1, d, &c)?;
        }
    }
    Ok(acc)
}

/// `(b+1)!` weights used by the x-expansion of the correlation forms.
pub fn form_weight(b: &[i64]) -> Rational {
    b.iter().map(|&x| factorial_q((x + 1) as u64)).fold(Rational::one(), |a, f| a * f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn zeta_coefficients() {
        let z = zeta_series("z", 7);
        assert_eq!(z.coeff(1).unwrap(), q(1));
        assert_eq!(z.coeff(3).unwrap(), qf(1, 24));
        assert_eq!(z.coeff(5).unwrap(), qf(1, 1920));
        assert!((0..=7).step_by(2).all(|k| z.coeff(k).unwrap().is_zero()));
        let iz = inv_zeta_series("z", 3);
        assert_eq!(iz.coeff(-1).unwrap(), q(1));
        assert_eq!(iz.coeff(1).unwrap(), qf(-1, 24));
        assert_eq!(iz.coeff(3).unwrap(), qf(7, 5760));
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(e0_eigenvalue(&Partition::empty(), "z", 5), inv_zeta_series("z", 5));
        let e1 = e0_eigenvalue(&p(&[1]), "z", 5);
        assert_eq!(e1, zeta_series("z", 5).add(&inv_zeta_series("z", 5)));
        assert_eq!(e1.coeff(1).unwrap(), qf(23, 24));
    }

    #[test]
    fn disconnected_examples() {
        let z = disconnected_npoint(0, 1, 3);
        assert_eq!(z.coeff(&[-1]).unwrap(), q(1));
        assert_eq!(z.coeff(&[1]).unwrap(), qf(-1, 24));
        assert_eq!(disconnected(1, &[], 0, None).coeff(&[]).unwrap(), q(1));
        assert_eq!(disconnected_npoint(1, 1, 3).coeff(&[1]).unwrap(), qf(23, 24));
    }

    #[test]
    fn low_invariants() {
        assert_eq!(stationary_invariant(0, 0, &[-2]).unwrap().value, q(1));
        assert_eq!(stationary_invariant(0, 1, &[0]).unwrap().value, q(1));
        assert_eq!(stationary_invariant(0, 1, &[0, 0]).unwrap().value, q(1));
        assert_eq!(stationary_invariant(0, 1, &[0, 0, 0]).unwrap().value, q(1));
        assert_eq!(connected_npoint(0, 2, 2).coeff(&[1, 1]).unwrap(), q(0));
        let bad = stationary_invariant(0, 1, &[1]).unwrap();
        assert!(bad.dimension_violation && bad.value.is_zero());
    }

    #[test]
    fn degree_zero_one_point_is_one_over_zeta() {
        // <τ_{2g-2}(ω)>_{g,1}^0 is the coefficient of x^{2g-1} in 1/ζ(x).
        let iz = inv_zeta_series("x", 5);
        assert_eq!(stationary_invariant(1, 0, &[0]).unwrap().value, iz.coeff(1).unwrap());
        assert_eq!(stationary_invariant(2, 0, &[2]).unwrap().value, iz.coeff(3).unwrap());
    }

    #[test]
    fn genus_zero_one_point() {
        for d in 1..=5 {
            let f = factorial_q(d as u64);
            let v = stationary_invariant(0, d, &[2 * d as i64 - 2]).unwrap().value;
            assert_eq!(v, (&f * &f).recip(), "d = {d}");
        }
        assert_eq!(stationary_invariant(1, 0, &[0]).unwrap().value, qf(-1, 24));
    }

    #[test]
    fn string_equation_chain() {
        for k in 2..=6 {
            assert_eq!(unit_insertions(0, k, 0, &[k as i64 - 2]).unwrap(), q(1), "k = {k}");
        }
        assert_eq!(unit_insertions(0, 2, 0, &[0]).unwrap(), q(1));
        assert_eq!(unit_insertions(0, 0, 1, &[0]).unwrap(), q(1));
        assert!(matches!(unit_insertions(0, 1, 0, &[-1]), Err(Error::UnstableCorrelator(_))));
    }

    #[test]
    fn invariants_are_symmetric() {
        let a = stationary_invariant(0, 2, &[2, 0, 0]).unwrap().value;
        let b = stationary_invariant(0, 2, &[0, 2, 0]).unwrap().value;
        let c = stationary_invariant(0, 2, &[0, 0, 2]).unwrap().value;
        assert_eq!(a, b);
        assert_eq!(b, c);
    }

    #[test]
    fn odd_parity_vanishes() {
        let c = connected_npoint(1, 2, 4);
        for (e, v) in c.terms() {
            let s: i64 = e.iter().map(|x| x - 1).sum();
            assert!(genus_of(1, &[s]).is_some(), "exponents {e:?} carry {v}");
        }
    }
}

/// First coefficient where the wedge side and a closed form disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesMismatch {
    /// `(0,1)` or `(0,2)`.
    pub case: (usize, usize),
    /// Exponents of `1/x_i`.
    pub exponents: Vec<i64>,
    #[serde(with = "crate::exact::rational::text")]
    pub closed_form: Rational,
    #[serde(with = "crate::exact::rational::text")]
    pub wedge: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnstableReport {
    pub order: i64,
    pub pass: bool,
    pub first_mismatch: Option<SeriesMismatch>,
}

/// An additive error injected into one invariant, for negative controls:
/// `(b-list, delta)` with one entry for the one-point and two for the
/// two-point case.
pub type Perturbation = (Vec<i64>, Rational);

/// Checks the degree-summed genus-zero one- and two-point functions against
/// `-2z + (z + 1/z) log(1 + z^2)` and `-log(1 - z_1 z_2)` with `z = z(x)`,
/// for all exponents of `1/x` with total at most `order`.
pub fn unstable_series_check(order: i64) -> Result<UnstableReport> {
    unstable_series_check_perturbed(order, None)
}

pub fn unstable_series_check_perturbed(order: i64, perturb: Option<&Perturbation>) -> Result<UnstableReport> {
    use crate::toprec::curve::{catalan_inverse, W};

    let shifted = |b: &[i64], v: Rational| -> Rational {
        match perturb {
            Some((pb, delta)) if pb.as_slice() == b => v + delta,
            _ => v,
        }
    };
    let report = |m: Option<SeriesMismatch>| UnstableReport {
        order,
        pass: m.is_none(),
        first_mismatch: m,
    };

    // One point: the closed form is odd in w and starts at w^1.
    let pad = order + 3;
    let z = catalan_inverse(pad);
    let zinv = z.inv()?;
    let log_part = Series::one(W, pad).add(&z.mul(&z)).log()?;
    let closed = z.scale(&q(-2)).add(&z.add(&zinv).mul(&log_part)).truncate(order);
    connected_table(1, ((order + 1) / 2) as usize, order, Some(order));
    for e in closed.min_exp().min(0)..=order {
        let c = closed.coeff(e)?;
        let b = e - 1;
        let wedge = if e >= 1 && b % 2 == 0 {
            let d = ((b + 2) / 2) as usize;
            -factorial_q(b as u64) * stationary_invariant(0, d, &[b])?.value
        } else {
            Rational::zero()
        };
        let wedge = shifted(&[b], wedge);
        if c != wedge {
            return Ok(report(Some(SeriesMismatch {
                case: (0, 1),
                exponents: vec![e],
                closed_form: c,
                wedge,
            })));
        }
    }

    // Two points: -log(1 - z1 z2) = sum_k (z1 z2)^k / k.
    let zp: Vec<Series> = {
        let mut v = vec![Series::one(W, order)];
        for k in 1..=order {
            v.push(v[k as usize - 1].mul(&z).truncate(order));
        }
        v
    };
    connected_table(2, (order / 2).max(0) as usize, order, Some(order));
    for e1 in 1..order {
        for e2 in 1..=order - e1 {
            let mut c = Rational::zero();
            for k in 1..=e1.min(e2) {
                c += zp[k as usize].coeff(e1)? * zp[k as usize].coeff(e2)? / q(k);
            }
            let b = [e1 - 1, e2 - 1];
            let s = b[0] + b[1];
            let wedge = if s % 2 == 0 {
                let d = ((s + 2) / 2) as usize;
                factorial_q(b[0] as u64) * factorial_q(b[1] as u64) * stationary_invariant(0, d, &b)?.value
            } else {
                Rational::zero()
            };
            let wedge = shifted(&b, wedge);
            if c != wedge {
                return Ok(report(Some(SeriesMismatch {
                    case: (0, 2),
                    exponents: vec![e1, e2],
                    closed_form: c,
                    wedge,
                })));
            }
        }
    }
    Ok(report(None))
}

#[cfg(test)]
mod closed_form_tests {
    use super::*;

    #[test]
    fn unstable_series_low_orders() {
        for order in [5, 9] {
            let r = unstable_series_check(order).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn perturbation_is_caught() {
        let r = unstable_series_check_perturbed(7, Some(&(vec![2], qf(1, 1000)))).unwrap();
        assert!(!r.pass);
        assert_eq!(r.first_mismatch.unwrap().exponents, vec![3]);
        let r = unstable_series_check_perturbed(7, Some(&(vec![1, 1], q(1)))).unwrap();
        assert_eq!(r.first_mismatch.unwrap().case, (0, 2));
    }

    #[test]
    fn degree_one_two_point() {
        assert_eq!(stationary_invariant(0, 1, &[0, 0]).unwrap().value, q(1));
    }
}
