//! Sparse truncated series in several variables.
//!
//! Each variable carries a lower bound on its exponents and an inclusive
//! truncation order. An optional cap on the total degree adds one more
//! truncation. A variable absent from a series is treated as exact in it.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{self, Rational};
use super::series::Series;
use crate::error::{Error, Result};

/// Stand-in for "no truncation" in order arithmetic.
const EXACT: i64 = i64::MAX / 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSeries {
    vars: Vec<String>,
    min_exp: Vec<i64>,
    order: Vec<i64>,
    total: Option<i64>,
    terms: BTreeMap<Vec<i64>, Rational>,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exp: Vec<i64>,
    #[serde(with = "rational::text")]
    coeff: Rational,
}

#[derive(Serialize, Deserialize)]
struct MultiRecord {
    vars: Vec<String>,
    min_exp: Vec<i64>,
    order: Vec<i64>,
    total: Option<i64>,
    terms: Vec<TermRecord>,
}

impl Serialize for MultiSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MultiRecord {
            vars: self.vars.clone(),
            min_exp: self.min_exp.clone(),
            order: self.order.clone(),
            total: self.total,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRecord { exp: e.clone(), coeff: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MultiRecord::deserialize(d)?;
        let mut m = MultiSeries::zero(
            r.vars.iter().map(String::as_str).collect::<Vec<_>>().as_slice(),
            &r.min_exp,
            &r.order,
            r.total,
        )
        .map_err(serde::de::Error::custom)?;
        for t in r.terms {
            m.add_term(t.exp, t.coeff);
        }
        Ok(m)
    }
}

impl MultiSeries {
    pub fn zero(vars: &[&str], min_exp: &[i64], order: &[i64], total: Option<i64>) -> Result<MultiSeries> {
        if vars.len() != min_exp.len() || vars.len() != order.len() {
            return Err(Error::Invalid("one min_exp and one order per variable".into()));
        }
        let mut seen: Vec<&str> = vars.to_vec();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != vars.len() {
            return Err(Error::Invalid("repeated variable name".into()));
        }
        Ok(MultiSeries {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            min_exp: min_exp.to_vec(),
            order: order.to_vec(),
            total,
            terms: BTreeMap::new(),
        })
    }

    /// A constant, exact in every variable.
    pub fn constant(c: Rational) -> MultiSeries {
        let mut m = MultiSeries::zero(&[], &[], &[], None).expect("valid");
        m.add_term(Vec::new(), c);
        m
    }

    pub fn from_series(s: &Series) -> MultiSeries {
        // A tight lower bound keeps product truncations as high as possible.
        let s = &s.normalized();
        let mut m = MultiSeries::zero(&[s.var()], &[s.min_exp().min(s.order() + 1)], &[s.order()], None)
            .expect("valid");
        for (i, c) in s.coeffs().iter().enumerate() {
            m.add_term(vec![s.min_exp() + i as i64], c.clone());
        }
        m
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn orders(&self) -> &[i64] {
        &self.order
    }

    pub fn min_exps(&self) -> &[i64] {
        &self.min_exp
    }

    pub fn total_cap(&self) -> Option<i64> {
        self.total
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn known(&self, exp: &[i64]) -> bool {
        exp.iter().zip(&self.order).all(|(e, o)| e <= o)
            && self.total.is_none_or(|t| exp.iter().sum::<i64>() <= t)
    }

    /// Adds `c` to the coefficient at `exp`; terms beyond the truncation are dropped.
    pub fn add_term(&mut self, exp: Vec<i64>, c: Rational) {
        if c.is_zero() || !self.known(&exp) {
            return;
        }
        debug_assert!(exp.iter().zip(&self.min_exp).all(|(e, m)| e >= m));
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Coefficient at the exponents given for each variable in `vars()` order.
    pub fn coeff(&self, exp: &[i64]) -> Result<Rational> {
        if exp.len() != self.vars.len() {
            return Err(Error::Invalid(format!(
                "{} exponents for {} variables",
                exp.len(),
                self.vars.len()
            )));
        }
        for (i, (e, o)) in exp.iter().zip(&self.order).enumerate() {
            if e > o {
                return Err(Error::BeyondOrder {
                    var: self.vars[i].clone(),
                    exp: *e,
                    order: *o,
                });
            }
        }
        if let Some(t) = self.total {
            let s: i64 = exp.iter().sum();
            if s > t {
                return Err(Error::BeyondOrder {
                    var: "total degree".into(),
                    exp: s,
                    order: t,
                });
            }
        }
        Ok(self.terms.get(exp).cloned().unwrap_or_else(Rational::zero))
    }

    /// Coefficient looked up by variable name; variables not listed have exponent 0.
    pub fn coeff_named(&self, exps: &[(&str, i64)]) -> Result<Rational> {
        let mut e = vec![0; self.vars.len()];
        for (v, x) in exps {
            match self.vars.iter().position(|w| w == v) {
                Some(i) => e[i] = *x,
                None if *x == 0 => {}
                None => return Ok(Rational::zero()),
            }
        }
        self.coeff(&e)
    }

    fn min_total(&self) -> i64 {
        self.min_exp.iter().sum()
    }

    /// Union of variable lists plus, for each side, where its variables land.
    fn union(&self, o: &MultiSeries) -> (Vec<String>, Vec<usize>, Vec<usize>) {
        let mut vars = self.vars.clone();
        for v in &o.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        let pos = |m: &MultiSeries| m.vars.iter().map(|v| vars.iter().position(|w| w == v).expect("in union")).collect();
        let (a, b) = (pos(self), pos(o));
        (vars, a, b)
    }

    fn lookup(&self, v: &str) -> (i64, i64) {
        match self.vars.iter().position(|w| w == v) {
            Some(i) => (self.min_exp[i], self.order[i]),
            None => (0, EXACT),
        }
    }

    fn spread(e: &[i64], map: &[usize], n: usize) -> Vec<i64> {
        let mut out = vec![0; n];
        for (x, &i) in e.iter().zip(map) {
            out[i] = *x;
        }
        out
    }

    pub fn add(&self, o: &MultiSeries) -> MultiSeries {
        let (vars, ma, mb) = self.union(o);
        let mut min_exp = Vec::new();
        let mut order = Vec::new();
        for v in &vars {
            let (m1, o1) = self.lookup(v);
            let (m2, o2) = o.lookup(v);
            min_exp.push(m1.min(m2));
            order.push(o1.min(o2));
        }
        let total = match (self.total, o.total) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut out = MultiSeries {
            vars,
            min_exp,
            order,
            total,
            terms: BTreeMap::new(),
        };
        let n = out.vars.len();
        for (e, c) in &self.terms {
            out.add_term(Self::spread(e, &ma, n), c.clone());
        }
        for (e, c) in &o.terms {
            out.add_term(Self::spread(e, &mb, n), c.clone());
        }
        out
    }

    pub fn scale(&self, a: &Rational) -> MultiSeries {
        let mut out = self.clone();
        if a.is_zero() {
            out.terms.clear();
        } else {
            for c in out.terms.values_mut() {
                *c *= a;
            }
        }
        out
    }

    pub fn neg(&self) -> MultiSeries {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, o: &MultiSeries) -> MultiSeries {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &MultiSeries) -> MultiSeries {
        let (vars, ma, mb) = self.union(o);
        let mut min_exp = Vec::new();
        let mut order = Vec::new();
        for v in &vars {
            let (m1, o1) = self.lookup(v);
            let (m2, o2) = o.lookup(v);
            min_exp.push(m1 + m2);
            order.push((o1.saturating_add(m2)).min(o2.saturating_add(m1)).min(EXACT));
        }
        let total = match (self.total, o.total) {
            (Some(a), Some(b)) => Some((a + o.min_total()).min(b + self.min_total())),
            (Some(a), None) => Some(a + o.min_total()),
            (None, Some(b)) => Some(b + self.min_total()),
            (None, None) => None,
        };
        let mut out = MultiSeries {
            vars,
            min_exp,
            order,
            total,
            terms: BTreeMap::new(),
        };
        let n = out.vars.len();
        let left: Vec<(Vec<i64>, &Rational)> = self.terms.iter().map(|(e, c)| (Self::spread(e, &ma, n), c)).collect();
        let right: Vec<(Vec<i64>, &Rational)> = o.terms.iter().map(|(e, c)| (Self::spread(e, &mb, n), c)).collect();
        let mut acc: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
        for (ea, ca) in &left {
            for (eb, cb) in &right {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if !out.known(&e) {
                    continue;
                }
                *acc.entry(e).or_insert_with(Rational::zero) += *ca * *cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        out.terms = acc;
        out
    }

    /// Lowers every truncation to at most `order` in each variable and `total` overall.
    pub fn truncate(&self, order: Option<&[i64]>, total: Option<i64>) -> MultiSeries {
        let mut out = self.clone();
        if let Some(o) = order {
            for (x, y) in out.order.iter_mut().zip(o) {
                *x = (*x).min(*y);
            }
        }
        if let Some(t) = total {
            out.total = Some(out.total.map_or(t, |c| c.min(t)));
        }
        let keep: Vec<Vec<i64>> = out.terms.keys().filter(|e| !out.known(e)).cloned().collect();
        for k in keep {
            out.terms.remove(&k);
        }
        out
    }

    /// `log(self)` for a series with constant term 1 and no negative exponents.
    pub fn log(&self) -> Result<MultiSeries> {
        let u = self.unit_part()?;
        // Every term of u has total degree >= 1, so u^k vanishes once k exceeds the bound.
        let bound = self.degree_bound()?;
        let mut acc = u.scale(&Rational::zero());
        let mut pw = u.clone();
        for k in 1..=bound {
            let sign = if k % 2 == 1 { Rational::one() } else { -Rational::one() };
            acc = acc.add(&pw.scale(&(sign / rational::q(k))));
            pw = pw.mul(&u);
            if pw.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// `exp(self)` for a series with zero constant term and no negative exponents.
    pub fn exp(&self) -> Result<MultiSeries> {
        if self.min_exp.iter().any(|m| *m < 0) && self.terms.keys().any(|e| e.iter().any(|x| *x < 0)) {
            return Err(Error::NotExpandable("exp of a multivariate series with poles".into()));
        }
        let c0 = self.terms.get(&vec![0; self.vars.len()]).cloned().unwrap_or_else(Rational::zero);
        if !c0.is_zero() {
            return Err(Error::NonzeroConstant(rational::to_text(&c0)));
        }
        let bound = self.degree_bound()?;
        let mut acc = self.scale(&Rational::zero());
        for m in acc.min_exp.iter_mut() {
            *m = (*m).min(0);
        }
        acc.add_term(vec![0; acc.vars.len()], Rational::one());
        let mut pw = self.clone();
        let mut fact = Rational::one();
        for k in 1..=bound {
            fact *= rational::q(k);
            acc = acc.add(&pw.scale(&fact.recip()));
            pw = pw.mul(self);
            if pw.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    fn unit_part(&self) -> Result<MultiSeries> {
        if self.terms.keys().any(|e| e.iter().any(|x| *x < 0)) {
            return Err(Error::NotExpandable("log of a multivariate series with poles".into()));
        }
        let zero = vec![0; self.vars.len()];
        let c0 = self.terms.get(&zero).cloned().unwrap_or_else(Rational::zero);
        if !c0.is_one() {
            return Err(Error::ConstantNotOne(rational::to_text(&c0)));
        }
        let mut u = self.clone();
        u.terms.remove(&zero);
        for m in u.min_exp.iter_mut() {
            *m = (*m).max(0);
        }
        Ok(u)
    }

    fn degree_bound(&self) -> Result<i64> {
        let per_var: i64 = self.order.iter().map(|o| (*o).max(0)).sum();
        let b = match self.total {
            Some(t) => t.min(per_var),
            None => per_var,
        };
        if self.order.iter().any(|o| *o >= EXACT) {
            return Err(Error::Invalid("exp/log needs a finite truncation in every variable".into()));
        }
        Ok(b)
    }

    /// Same series with variables renamed by position.
    pub fn renamed(&self, names: &[&str]) -> Result<MultiSeries> {
        if names.len() != self.vars.len() {
            return Err(Error::Invalid("one name per variable".into()));
        }
        let mut out = self.clone();
        out.vars = names.iter().map(|s| s.to_string()).collect();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{q, qf};

    fn geometric(var: &str, order: i64) -> MultiSeries {
        MultiSeries::from_series(&Series::from_fn(var, 0, order, |_| q(1)))
    }

    #[test]
    fn product_of_disjoint_variables_keeps_orders() {
        let p = geometric("x", 3).mul(&geometric("y", 5));
        assert_eq!(p.orders(), &[3, 5]);
        assert_eq!(p.coeff(&[3, 5]).unwrap(), q(1));
        assert!(p.coeff(&[4, 0]).is_err());
    }

    #[test]
    fn product_in_a_shared_variable() {
        let a = MultiSeries::from_series(&Series::from_fn("x", -1, 3, |_| q(1)));
        let b = geometric("x", 4);
        let p = a.mul(&b);
        assert_eq!(p.orders(), &[3]);
        assert_eq!(p.coeff(&[-1]).unwrap(), q(1));
        assert_eq!(p.coeff(&[2]).unwrap(), q(4));
    }

    #[test]
    fn total_cap_is_enforced() {
        let mut a = MultiSeries::zero(&["x", "y"], &[0, 0], &[5, 5], Some(4)).unwrap();
        a.add_term(vec![2, 3], q(7));
        assert!(a.is_zero());
        assert!(a.coeff(&[2, 3]).is_err());
        assert_eq!(a.coeff(&[2, 2]).unwrap(), q(0));
    }

    #[test]
    fn log_of_product_is_sum_of_logs() {
        let a = geometric("x", 4);
        let b = geometric("y", 4);
        let l = a.mul(&b).log().unwrap();
        let want = a.log().unwrap().add(&b.log().unwrap());
        assert_eq!(l, want);
        assert_eq!(l.coeff(&[1, 0]).unwrap(), q(1));
        assert_eq!(l.coeff(&[2, 0]).unwrap(), qf(1, 2));
        assert_eq!(l.coeff(&[1, 1]).unwrap(), q(0));
    }

    #[test]
    fn exp_inverts_log() {
        let a = geometric("x", 3).mul(&geometric("y", 2));
        assert_eq!(a.log().unwrap().exp().unwrap(), a);
    }

    #[test]
    fn json_round_trip() {
        let a = geometric("x", 2).mul(&geometric("y", 1));
        let j = serde_json::to_string(&a).unwrap();
        let b: MultiSeries = serde_json::from_str(&j).unwrap();
        assert_eq!(a, b);
    }
}
