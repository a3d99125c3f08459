//! The residue recursion for the stable forms `W_{g,n}`.
//!
//! At a branch point `a = ±1` everything is expanded in `t = z - a`. The
//! second argument `1/z` enters through `s = 1/z - a`, and its slot carries
//! the factor `d(1/z) = -dz/z^2`. Coefficients in the remaining variables stay
//! exact pole monomials `(z_i - a)^{-k}`, so no variable other than `t` is
//! ever expanded.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use rayon::prelude::*;

use super::curve::{w01, w01_involuted};
use super::form::{Pole, PoleSum};
use crate::error::{Error, Result};
use crate::exact::rational::{q, qf, Rational};
use crate::exact::{local_laurent, RatFunc, Series, ZExpr};

/// Default cap on `2g - 2 + n`.
pub const DEFAULT_BOUND: usize = 4;

const T: &str = "t";

/// Bound on pole orders of `W_{g,n}` in each slot.
pub fn pole_bound(g: usize, n: usize) -> u32 {
    (6 * g + 2 * n) as u32 - 4
}

type Cache = Mutex<HashMap<(usize, usize), Arc<PoleSum>>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// `W_{g,n}` as the coefficient of `dz_1 ... dz_n`, within the default bound.
pub fn toprec_wgn(g: usize, n: usize) -> Result<Arc<PoleSum>> {
    toprec_wgn_bounded(g, n, DEFAULT_BOUND)
}

pub fn toprec_wgn_bounded(g: usize, n: usize, bound: usize) -> Result<Arc<PoleSum>> {
    let chi = 2 * g as i64 - 2 + n as i64;
    if n == 0 || chi <= 0 {
        return Err(Error::Invalid(format!("({g},{n}) is not in the stable range")));
    }
    if chi as usize > bound {
        return Err(Error::Budget {
            what: format!("W_{{{g},{n}}}"),
            required: chi,
            budget: bound as i64,
        });
    }
    if let Some(w) = cache().lock().expect("poisoned").get(&(g, n)) {
        return Ok(w.clone());
    }
    let w = Arc::new(compute(g, n, bound)?);
    Ok(cache().lock().expect("poisoned").entry((g, n)).or_insert(w).clone())
}

/// Where a slot of a known form goes inside the bracket.
#[derive(Clone, Copy)]
enum Target {
    Direct,
    Involuted,
    /// Index among `z_2, ..., z_n`.
    Var(usize),
}

/// A factor of a bracket term: series in `t` tagged with pole monomials in
/// some of the outer variables.
type Factor = Vec<(Vec<(usize, Pole)>, Series)>;

struct Expander {
    a: Rational,
    order: i64,
    direct: HashMap<Pole, Series>,
    involuted: HashMap<Pole, Series>,
    /// `z^{-2}` and `s = 1/z - a` at the branch point.
    inv_z2: Series,
    s: Series,
}

impl Expander {
    fn new(a: &Rational, order: i64) -> Expander {
        let zinv = RatFunc::x().inv().expect("x is nonzero");
        Expander {
            a: a.clone(),
            order,
            direct: HashMap::new(),
            involuted: HashMap::new(),
            inv_z2: zinv.pow(2).expect("nonzero").laurent_at(a, T, order),
            s: (&zinv - &RatFunc::constant(a.clone())).laurent_at(a, T, order),
        }
    }

    /// `1/(z - c)^k` at `z = a + t`.
    fn direct(&mut self, p: Pole) -> Series {
        let (a, o) = (self.a.clone(), self.order);
        self.direct.entry(p).or_insert_with(|| p.ratfunc().laurent_at(&a, T, o)).clone()
    }

    /// `1/(1/z - c)^k` times `-1/z^2`.
    fn involuted(&mut self, p: Pole) -> Series {
        let (a, o) = (self.a.clone(), self.order);
        self.involuted
            .entry(p)
            .or_insert_with(|| {
                let f = &p.ratfunc().invert_var() * &RatFunc::x().pow(-2).expect("nonzero").scale(&q(-1));
                f.laurent_at(&a, T, o)
            })
            .clone()
    }

    fn form_factor(&mut self, w: &PoleSum, targets: &[Target]) -> Factor {
        let mut grouped: BTreeMap<Vec<(usize, Pole)>, Series> = BTreeMap::new();
        for (key, c) in w.terms() {
            let mut series = Series::constant(T, c.clone(), self.order);
            let mut tags = Vec::new();
            for (p, tgt) in key.iter().zip(targets) {
                match tgt {
                    Target::Direct => series = series.mul(&self.direct(*p)),
                    Target::Involuted => series = series.mul(&self.involuted(*p)),
                    Target::Var(i) => tags.push((*i, *p)),
                }
            }
            let e = grouped.entry(tags).or_insert_with(|| Series::zero(T, self.order));
            *e = e.add(&series);
        }
        grouped.into_iter().collect()
    }

    /// `dz dz_i / (z - z_i)^2` with `z` direct, through `t^jmax`.
    fn bergman_direct(&self, var: usize, jmax: i64) -> Factor {
        (0..=jmax)
            .map(|j| {
                let tag = vec![(var, Pole::new(self.a_sign(), (j + 2) as u32))];
                (tag, Series::monomial(T, q(j + 1), j, self.order))
            })
            .collect()
    }

    /// `d(1/z) dz_i / (1/z - z_i)^2`, through `s^jmax`.
    fn bergman_involuted(&self, var: usize, jmax: i64) -> Factor {
        let mut sj = Series::one(T, self.order);
        let mut out = Vec::new();
        for j in 0..=jmax {
            let tag = vec![(var, Pole::new(self.a_sign(), (j + 2) as u32))];
            out.push((tag, sj.mul(&self.inv_z2).scale(&q(-(j + 1)))));
            sj = sj.mul(&self.s);
        }
        out
    }

    fn a_sign(&self) -> i8 {
        if self.a > Rational::zero() {
            1
        } else {
            -1
        }
    }
}

fn min_valuation(f: &Factor) -> i64 {
    f.iter().map(|(_, s)| s.valuation()).min().unwrap_or(0)
}

fn multiply_into(bracket: &mut BTreeMap<Vec<(usize, Pole)>, Series>, x: &Factor, y: &Factor) {
    for (tx, sx) in x {
        for (ty, sy) in y {
            let mut tags: Vec<(usize, Pole)> = tx.iter().chain(ty).cloned().collect();
            tags.sort();
            let p = sx.mul(sy).truncate(0);
            let e = bracket.entry(tags).or_insert_with(|| Series::zero(T, 0));
            *e = e.add(&p);
        }
    }
}

fn add_into(bracket: &mut BTreeMap<Vec<(usize, Pole)>, Series>, x: Factor) {
    for (mut tags, s) in x {
        tags.sort();
        let e = bracket.entry(tags).or_insert_with(|| Series::zero(T, 0));
        *e = e.add(&s.truncate(0));
    }
}

/// Lists of subsets of `0..m` as bit masks.
fn subsets(m: usize) -> impl Iterator<Item = u32> {
    0..(1u32 << m)
}

fn compute(g: usize, n: usize, bound: usize) -> Result<PoleSum> {
    // Lower forms needed by the bracket, fetched up front.
    let mut lower: HashMap<(usize, usize), Arc<PoleSum>> = HashMap::new();
    let mut need = |gg: usize, nn: usize| -> Result<()> {
        let chi = 2 * gg as i64 - 2 + nn as i64;
        if chi > 0 && !lower.contains_key(&(gg, nn)) {
            lower.insert((gg, nn), toprec_wgn_bounded(gg, nn, bound)?);
        }
        Ok(())
    };
    if g >= 1 {
        need(g - 1, n + 1)?;
    }
    for g1 in 0..=g {
        let top = if g1 == g { n - 1 } else { n };
        for m in 1..=top {
            need(g1, m)?;
        }
    }
    // A product of two slot expansions loses the sum of their pole orders.
    let order = 2 * lower.values().map(|w| w.max_order()).max().unwrap_or(0) as i64 + 4;
    let parts: Vec<PoleSum> = [q(1), q(-1)]
        .par_iter()
        .map(|a| residue_at(g, n, a, order, &lower))
        .collect::<Result<_>>()?;
    let total = parts[0].add(&parts[1]);
    let bound = pole_bound(g, n);
    if total.max_order() > bound {
        return Err(Error::Invalid(format!(
            "W_{{{g},{n}}} has a pole of order {} above the bound {bound}",
            total.max_order()
        )));
    }
    Ok(total)
}

fn residue_at(
    g: usize,
    n: usize,
    a: &Rational,
    order: i64,
    lower: &HashMap<(usize, usize), Arc<PoleSum>>,
) -> Result<PoleSum> {
    let mut ex = Expander::new(a, order);
    let outer = n - 1;
    let mut bracket: BTreeMap<Vec<(usize, Pole)>, Series> = BTreeMap::new();

    // W_{g-1,n+1}(z, 1/z, z_2, ..., z_n).
    if g >= 1 {
        if g == 1 && n == 1 {
            // The Bergman kernel at (z, 1/z): -1/(z^2 - 1)^2.
            let f = RatFunc::new(crate::exact::Poly::from_ints(&[-1]), crate::exact::Poly::from_ints(&[1, 0, -2, 0, 1]))?;
            add_into(&mut bracket, vec![(Vec::new(), f.laurent_at(a, T, order))]);
        } else {
            let w = &lower[&(g - 1, n + 1)];
            let mut targets = vec![Target::Direct, Target::Involuted];
            targets.extend((0..outer).map(Target::Var));
            add_into(&mut bracket, ex.form_factor(w, &targets));
        }
    }

    // Split terms over g1 + g2 = g and I ⊔ J = {z_2, ..., z_n}; only W_{0,1}
    // is excluded.
    for g1 in 0..=g {
        let g2 = g - g1;
        for mask in subsets(outer) {
            let i: Vec<usize> = (0..outer).filter(|k| mask & (1 << k) != 0).collect();
            let j: Vec<usize> = (0..outer).filter(|k| mask & (1 << k) == 0).collect();
            if (g1 == 0 && i.is_empty()) || (g2 == 0 && j.is_empty()) {
                continue;
            }
            let left = side(&mut ex, lower, g1, &i, true)?;
            let right = side(&mut ex, lower, g2, &j, false)?;
            let (left, right) = match (left, right) {
                (Side::Form(l), Side::Form(r)) => (l, r),
                (Side::Bergman(v), Side::Form(r)) => (ex.bergman_direct(v, -min_valuation(&r)), r),
                (Side::Form(l), Side::Bergman(v)) => {
                    let r = ex.bergman_involuted(v, -min_valuation(&l));
                    (l, r)
                }
                (Side::Bergman(u), Side::Bergman(v)) => (ex.bergman_direct(u, 0), ex.bergman_involuted(v, 0)),
            };
            multiply_into(&mut bracket, &left, &right);
        }
    }

    if bracket.values().all(Series::is_zero) {
        return Ok(PoleSum::zero(n));
    }
    let p = bracket.values().map(|s| -s.valuation()).max().unwrap_or(0).max(0);
    let kernel = kernel_parts(a, p, &ex)?;
    let sign = ex.a_sign();
    let mut out = PoleSum::zero(n);
    for (tags, b) in &bracket {
        let mut rest = vec![Pole::constant(); outer];
        for (v, pole) in tags {
            rest[*v] = *pole;
        }
        for (jm1, kj) in kernel.iter().enumerate() {
            let j = jm1 as i64 + 1;
            let mut c = Rational::zero();
            for e in -1..=p - 1 {
                let ke = kj.coeff(e)?;
                if !ke.is_zero() {
                    c += ke * b.coeff(-1 - e)?;
                }
            }
            let mut key = vec![Pole::new(sign, (j + 1) as u32)];
            key.extend(rest.iter().copied());
            out.add_term(key, -c);
        }
    }
    Ok(out)
}

enum Side {
    Form(Factor),
    /// `W_{0,2}` with its other argument at the given outer variable.
    Bergman(usize),
}

fn side(
    ex: &mut Expander,
    lower: &HashMap<(usize, usize), Arc<PoleSum>>,
    g: usize,
    vars: &[usize],
    direct: bool,
) -> Result<Side> {
    if g == 0 && vars.len() == 1 {
        return Ok(Side::Bergman(vars[0]));
    }
    let w = lower
        .get(&(g, vars.len() + 1))
        .ok_or_else(|| Error::Invalid(format!("missing W_{{{g},{}}}", vars.len() + 1)))?;
    let mut targets = vec![if direct { Target::Direct } else { Target::Involuted }];
    targets.extend(vars.iter().map(|&v| Target::Var(v)));
    Ok(Side::Form(ex.form_factor(w, &targets)))
}

/// `K_j(t)` for `j = 1..=p+1`, where the recursion kernel is
/// `-sum_j K_j(t) / (z_1 - a)^{j+1}` and
/// `K_j = (t^j - s^j) / (2 (y(1/z) - y(z)) x'(z))`.
///
/// The factor `1/2` is the usual normalization of the recursion kernel;
/// without it every recursion step doubles and `W_{1,1}` starts at `-1/12`
/// instead of `<τ_0(ω)>_{1,1}^0 = -1/24`.
fn kernel_parts(a: &Rational, p: i64, ex: &Expander) -> Result<Vec<Series>> {
    let den = w01_involuted() - w01();
    let inv = local_laurent(&(ZExpr::constant(qf(1, 2)) / den), a, p)?;
    let t = Series::var_series(T, p + 2);
    let s = ex.s.truncate(p + 2);
    let (mut tj, mut sj) = (t.clone(), s.clone());
    let mut out = Vec::new();
    for _ in 1..=p + 1 {
        out.push(tj.sub(&sj).mul(&inv).truncate(p - 1));
        tj = tj.mul(&t);
        sj = sj.mul(&s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w03_closed_form() {
        // W_{0,3} = (1/2) sum_a prod_i 1/(z_i - a)^2 up to the sign of a.
        let w = toprec_wgn(0, 3).unwrap();
        assert!(w.is_symmetric());
        assert_eq!(w.max_order(), 2);
        for key in w.terms().keys() {
            assert!(key.iter().all(|p| p.order == 2));
            assert!(key.iter().all(|p| p.center == key[0].center));
        }
    }

    #[test]
    fn w11_first_coefficient() {
        let w = toprec_wgn(1, 1).unwrap();
        assert!(w.max_order() <= pole_bound(1, 1));
        // Antisymmetry of the form under z -> 1/z.
        assert_eq!(w.form_involution(0).unwrap(), w.neg());
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(toprec_wgn(0, 2), Err(Error::Invalid(_))));
        assert!(matches!(toprec_wgn(5, 5), Err(Error::Budget { .. })));
    }
}
