//! Sums of products of pole monomials `prod_i (z_i - c_i)^{-k_i}`.
//!
//! The same container holds correlation forms (as the coefficient of
//! `dz_1 ... dz_n`) and their primitives. Every center is `±1`; order `0`
//! stands for the constant `1` and is stored with center `+1`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{self, binomial, powi, q, Rational};
use crate::exact::{RatFunc, Series};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pole {
    pub center: i8,
    pub order: u32,
}

impl Pole {
    pub fn new(center: i8, order: u32) -> Pole {
        debug_assert!(center == 1 || center == -1);
        if order == 0 {
            Pole::constant()
        } else {
            Pole { center, order }
        }
    }

    pub fn constant() -> Pole {
        Pole { center: 1, order: 0 }
    }

    pub fn center_q(&self) -> Rational {
        q(self.center as i64)
    }

    /// `1/(z - c)^k` as a rational function.
    pub fn ratfunc(&self) -> RatFunc {
        if self.order == 0 {
            RatFunc::one()
        } else {
            RatFunc::pole(-self.center_q(), self.order as usize)
        }
    }

    pub fn eval(&self, z: &Rational) -> Result<Rational> {
        if self.order == 0 {
            return Ok(Rational::one());
        }
        let d = z - self.center_q();
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(powi(&d, -(self.order as i64)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleSum {
    n: usize,
    #[serde(with = "term_list")]
    terms: BTreeMap<Vec<Pole>, Rational>,
}

mod term_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Term {
        poles: Vec<Pole>,
        #[serde(with = "crate::exact::rational::text")]
        coeff: Rational,
    }

    pub fn serialize<S: Serializer>(t: &BTreeMap<Vec<Pole>, Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Term> = t
            .iter()
            .map(|(k, c)| Term {
                poles: k.clone(),
                coeff: c.clone(),
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<Vec<Pole>, Rational>, D::Error> {
        let v = Vec::<Term>::deserialize(d)?;
        Ok(v.into_iter().map(|t| (t.poles, t.coeff)).collect())
    }
}

impl PoleSum {
    pub fn zero(n: usize) -> PoleSum {
        PoleSum {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Pole>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: Vec<Pole>, c: Rational) {
        assert_eq!(key.len(), self.n, "one pole per slot");
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
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

    pub fn add(&self, o: &PoleSum) -> PoleSum {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, a: &Rational) -> PoleSum {
        let mut out = PoleSum::zero(self.n);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * a);
        }
        out
    }

    pub fn neg(&self) -> PoleSum {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, o: &PoleSum) -> PoleSum {
        self.add(&o.neg())
    }

    /// Largest pole order in any slot.
    pub fn max_order(&self) -> u32 {
        self.terms.keys().flatten().map(|p| p.order).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &[Rational]) -> Result<Rational> {
        if z.len() != self.n {
            return Err(Error::Invalid(format!("{} points for {} slots", z.len(), self.n)));
        }
        let mut acc = Rational::zero();
        for (k, c) in &self.terms {
            let mut t = c.clone();
            for (p, zi) in k.iter().zip(z) {
                t *= p.eval(zi)?;
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Slot `i` of the result is slot `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> PoleSum {
        let mut out = PoleSum::zero(self.n);
        for (k, c) in &self.terms {
            out.add_term(perm.iter().map(|&j| k[j]).collect(), c.clone());
        }
        out
    }

    /// Exact invariance under every transposition of adjacent slots.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n.saturating_sub(1)).all(|i| {
            let mut perm: Vec<usize> = (0..self.n).collect();
            perm.swap(i, i + 1);
            self.permuted(&perm) == *self
        })
    }

    /// Replaces slot `i` by a linear combination of slot values.
    fn map_slot(&self, i: usize, f: impl Fn(Pole) -> Result<Vec<(Pole, Rational)>>) -> Result<PoleSum> {
        let mut out = PoleSum::zero(self.n);
        for (k, c) in &self.terms {
            for (p, a) in f(k[i])? {
                let mut key = k.clone();
                key[i] = p;
                out.add_term(key, c * &a);
            }
        }
        Ok(out)
    }

    /// Pullback of the form along `z_i -> 1/z_i`.
    pub fn form_involution(&self, i: usize) -> Result<PoleSum> {
        self.map_slot(i, |p| {
            if p.order < 2 {
                return Err(Error::Invalid(format!(
                    "form term of order {} has no pullback in the pole basis",
                    p.order
                )));
            }
            // dz/(z-a)^k -> -(-a)^{-k} z^{k-2} dz/(z-a)^k, z = (z-a) + a.
            let a = p.center_q();
            let k = p.order as i64;
            let pre = -powi(&-a.clone(), -k);
            Ok((0..=k - 2)
                .map(|r| {
                    let c = &pre * binomial(k - 2, r) * powi(&a, k - 2 - r);
                    (Pole::new(p.center, (k - r) as u32), c)
                })
                .collect())
        })
    }

    /// The function with `z_i` replaced by `1/z_i`.
    pub fn function_involution(&self, i: usize) -> Result<PoleSum> {
        self.map_slot(i, |p| {
            if p.order == 0 {
                return Ok(vec![(p, Rational::one())]);
            }
            // 1/(1/z - a)^j = (-a)^{-j} sum_r C(j,r) a^r / (z-a)^r.
            let a = p.center_q();
            let j = p.order as i64;
            let pre = powi(&-a.clone(), -j);
            Ok((0..=j)
                .map(|r| (Pole::new(p.center, r as u32), &pre * binomial(j, r) * powi(&a, r)))
                .collect())
        })
    }

    /// Derivative in slot `i` of a function, giving the coefficient of `dz_i`.
    pub fn derivative(&self, i: usize) -> Result<PoleSum> {
        self.map_slot(i, |p| {
            Ok(if p.order == 0 {
                Vec::new()
            } else {
                vec![(Pole::new(p.center, p.order + 1), q(-(p.order as i64)))]
            })
        })
    }

    /// Antiderivative in slot `i`, without constant; a simple pole would
    /// produce a logarithm and is rejected.
    pub fn antiderivative(&self, i: usize) -> Result<PoleSum> {
        self.map_slot(i, |p| {
            if p.order <= 1 {
                return Err(Error::LogInPrimitive { slot: i });
            }
            let k = p.order as i64;
            Ok(vec![(Pole::new(p.center, p.order - 1), q(-1) / q(k - 1))])
        })
    }

    /// Reads the sum as a rational function of slot `i`, the other slots
    /// fixed at the given key; used for display and checks.
    pub fn slot_ratfunc(&self, i: usize, rest: &[Pole]) -> RatFunc {
        let mut acc = RatFunc::zero();
        for (k, c) in &self.terms {
            let others: Vec<Pole> = k.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| *p).collect();
            if others == rest {
                acc = &acc + &k[i].ratfunc().scale(c);
            }
        }
        acc
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let f: Vec<String> = k
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.order > 0)
                    .map(|(i, p)| {
                        let sign = if p.center > 0 { '-' } else { '+' };
                        format!("(z{}{}1)^-{}", i + 1, sign, p.order)
                    })
                    .collect();
                if f.is_empty() {
                    rational::to_text(c)
                } else {
                    format!("{}*{}", rational::to_text(c), f.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Expansion of `1/(z - c)^k` with `z = z(w)` the Catalan branch near `z = 0`.
pub fn pole_at_catalan(p: Pole, zw: &Series) -> Result<Series> {
    p.ratfunc().compose_series(zw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::qf;

    fn one_slot(terms: &[(i8, u32, Rational)]) -> PoleSum {
        let mut s = PoleSum::zero(1);
        for (c, k, a) in terms {
            s.add_term(vec![Pole::new(*c, *k)], a.clone());
        }
        s
    }

    #[test]
    fn involutions_match_direct_evaluation() {
        let f = one_slot(&[(1, 3, q(2)), (-1, 2, qf(1, 3)), (1, 0, q(5))]);
        let g = f.function_involution(0).unwrap();
        let form = one_slot(&[(1, 3, q(2)), (-1, 2, qf(1, 3)), (-1, 4, q(7))]);
        let h = form.form_involution(0).unwrap();
        for z in [q(3), qf(2, 7), qf(-5, 3)] {
            let zi = z.recip();
            assert_eq!(g.eval(std::slice::from_ref(&z)).unwrap(), f.eval(std::slice::from_ref(&zi)).unwrap());
            let expect = -form.eval(std::slice::from_ref(&zi)).unwrap() / (&z * &z);
            assert_eq!(h.eval(std::slice::from_ref(&z)).unwrap(), expect);
        }
    }

    #[test]
    fn derivative_inverts_antiderivative() {
        let f = one_slot(&[(1, 3, q(2)), (-1, 2, qf(1, 3))]);
        assert_eq!(f.antiderivative(0).unwrap().derivative(0).unwrap(), f);
        assert!(matches!(
            one_slot(&[(1, 1, q(1))]).antiderivative(0),
            Err(Error::LogInPrimitive { slot: 0 })
        ));
    }

    #[test]
    fn serde_round_trip() {
        let mut f = PoleSum::zero(2);
        f.add_term(vec![Pole::new(1, 2), Pole::new(-1, 4)], qf(-3, 8));
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<PoleSum>(&s).unwrap(), f);
    }
}
