//! Integer partitions, hook lengths and the polynomials attached to them.
//!
//! Partitions are stored without trailing zeros. Formulas indexed by
//! `i = 1..=d` read the padded view, where a partition of `d` has exactly `d`
//! parts.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{factorial, q, qbig, Rational};
use crate::exact::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Partition> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.parts
    }
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Partition> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid(format!("parts {parts:?} are not weakly decreasing")));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Partition {
        Partition::default()
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `λ_i` for `i >= 1`, zero past the last part.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// The first `n` parts with zeros appended.
    pub fn padded(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (1..=n).map(|i| self.part(i))
    }

    pub fn conjugate(&self) -> Partition {
        let w = self.parts.first().copied().unwrap_or(0);
        let parts = (1..=w).map(|j| self.parts.iter().filter(|&&p| p >= j).count()).collect();
        Partition { parts }
    }

    /// Hook lengths row by row.
    pub fn hooks(&self) -> Vec<Vec<usize>> {
        let c = self.conjugate();
        self.parts
            .iter()
            .enumerate()
            .map(|(i, &row)| (0..row).map(|j| (row - j - 1) + (c.parts[j] - i - 1) + 1).collect())
            .collect()
    }

    /// Contents `j - i` of the cells, row by row.
    pub fn contents(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.size());
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                out.push(j as i64 - i as i64);
            }
        }
        out
    }

    pub fn hook_product(&self) -> BigInt {
        self.hooks()
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, &h| acc * BigInt::from(h))
    }

    /// Number of standard Young tableaux, `d! / H_λ`.
    pub fn dimension(&self) -> BigInt {
        factorial(self.size() as u64) / self.hook_product()
    }

    pub fn hook_data(&self) -> HookData {
        HookData {
            partition: self.clone(),
            hook_product: self.hook_product(),
            dimension: self.dimension(),
        }
    }

    /// Partitions of `d - 1` obtained by deleting one corner, top row first.
    pub fn remove_corners(&self) -> Result<Vec<Partition>> {
        if self.is_empty() {
            return Err(Error::Invalid("the empty partition has no corners".into()));
        }
        let mut out = Vec::new();
        for i in 0..self.parts.len() {
            if self.parts.get(i + 1).copied().unwrap_or(0) < self.parts[i] {
                let mut p = self.parts.clone();
                p[i] -= 1;
                out.push(Partition::new(p).expect("still decreasing"));
            }
        }
        Ok(out)
    }

    /// Partitions of `d + 1` containing this one, top row first.
    pub fn add_corners(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        for i in 0..=self.parts.len() {
            let here = self.parts.get(i).copied().unwrap_or(0);
            if i == 0 || self.parts[i - 1] > here {
                let mut p = self.parts.clone();
                if i == p.len() {
                    p.push(1);
                } else {
                    p[i] += 1;
                }
                out.push(Partition { parts: p });
            }
        }
        out
    }

    /// `g_λ(y) = prod_{i=1..d} (y + λ_i - i)` over the padded view.
    pub fn g_function(&self) -> Poly {
        let d = self.size();
        self.padded(d)
            .enumerate()
            .fold(Poly::one(), |acc, (k, l)| &acc * &Poly::linear(q(l as i64 - k as i64 - 1)))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// A partition with its hook product and dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HookData {
    pub partition: Partition,
    pub hook_product: BigInt,
    pub dimension: BigInt,
}

impl HookData {
    /// `1 / H_λ^2`.
    pub fn inv_hook_sq(&self) -> Rational {
        let h = qbig(self.hook_product.clone());
        (&h * &h).recip()
    }
}

fn generate(d: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

type Table = Mutex<HashMap<usize, Arc<Vec<HookData>>>>;

fn table() -> &'static Table {
    static T: OnceLock<Table> = OnceLock::new();
    T.get_or_init(Default::default)
}

/// Partitions of `d` with hook data, in decreasing lexicographic order.
/// Each `d` is built once and then shared.
pub fn hook_table(d: usize) -> Arc<Vec<HookData>> {
    if let Some(t) = table().lock().expect("poisoned").get(&d) {
        return t.clone();
    }
    let built: Arc<Vec<HookData>> = Arc::new(generate(d).iter().map(Partition::hook_data).collect());
    table().lock().expect("poisoned").entry(d).or_insert(built).clone()
}

/// All partitions of `d` in decreasing lexicographic order.
pub fn enumerate_partitions(d: usize) -> Vec<Partition> {
    hook_table(d).iter().map(|h| h.partition.clone()).collect()
}

/// Outcome of [`han_corollary_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HanReport {
    pub d: usize,
    pub pass: bool,
    pub witness: Option<String>,
}

/// Checks the polynomial identity
/// `sum_{λ ⊢ d+1} (g_λ(y+1) - g_λ(y)) / H_λ^2 = sum_{μ ⊢ d} g_μ(y) / H_μ^2`
/// and, for every `μ ⊢ d`, `sum_{λ ⊃ μ} 1/H_λ = 1/H_μ`.
pub fn han_corollary_check(d: usize) -> HanReport {
    let lhs = hook_table(d + 1).iter().fold(Poly::zero(), |acc, h| {
        let g = h.partition.g_function();
        &acc + &(&g.shift(&q(1)) - &g).scale(&h.inv_hook_sq())
    });
    let rhs = hook_table(d)
        .iter()
        .fold(Poly::zero(), |acc, h| &acc + &h.partition.g_function().scale(&h.inv_hook_sq()));
    if lhs != rhs {
        let k = (0..=d + 1).find(|&k| lhs.coeff(k) != rhs.coeff(k)).unwrap_or(0);
        return HanReport {
            d,
            pass: false,
            witness: Some(format!("coefficient of y^{k} differs")),
        };
    }
    for h in hook_table(d).iter() {
        let s: Rational = h
            .partition
            .add_corners()
            .iter()
            .map(|l| qbig(l.hook_product()).recip())
            .sum();
        if s != qbig(h.hook_product.clone()).recip() {
            return HanReport {
                d,
                pass: false,
                witness: Some(format!("hook sum over the partitions above {}", h.partition)),
            };
        }
    }
    HanReport { d, pass: true, witness: None }
}

/// `sum_{λ ⊢ d} (dim λ / d!)^2`.
pub fn vacuum_weight(d: usize) -> Rational {
    let f = qbig(factorial(d as u64));
    hook_table(d)
        .iter()
        .map(|h| {
            let r = qbig(h.dimension.clone()) / &f;
            &r * &r
        })
        .fold(Rational::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    /// Counts standard fillings by placing n, n-1, ... into removable corners.
    fn tableaux_count(l: &Partition) -> u64 {
        if l.is_empty() {
            return 1;
        }
        l.remove_corners().unwrap().iter().map(tableaux_count).sum()
    }

    /// Partition counts by the textbook recurrence on the largest part.
    fn count_partitions(n: usize, max: usize) -> usize {
        if n == 0 {
            return 1;
        }
        (1..=n.min(max)).map(|k| count_partitions(n - k, k)).sum()
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_partitions(0), vec![Partition::empty()]);
        assert_eq!(enumerate_partitions(3), vec![p(&[3]), p(&[2, 1]), p(&[1, 1, 1])]);
        assert_eq!(enumerate_partitions(10).len(), 42);
        for d in 0..=12 {
            assert_eq!(enumerate_partitions(d).len(), count_partitions(d, d));
        }
    }

    #[test]
    fn hooks_and_dimensions() {
        assert_eq!(p(&[1]).hook_product(), BigInt::from(1));
        assert_eq!(p(&[2, 1]).hook_product(), BigInt::from(3));
        assert_eq!(p(&[2, 2]).hook_product(), BigInt::from(12));
        assert_eq!(p(&[5]).dimension(), BigInt::from(1));
        assert_eq!(p(&[2, 1]).dimension(), BigInt::from(2));
        assert_eq!(p(&[3, 2]).dimension(), BigInt::from(5));
    }

    #[test]
    fn dimension_counts_tableaux() {
        for d in 0..=8 {
            for l in enumerate_partitions(d) {
                assert_eq!(l.dimension(), BigInt::from(tableaux_count(&l)), "{l}");
            }
        }
    }

    #[test]
    fn corners() {
        assert_eq!(p(&[1]).remove_corners().unwrap(), vec![Partition::empty()]);
        assert_eq!(p(&[2, 1]).remove_corners().unwrap(), vec![p(&[1, 1]), p(&[2])]);
        assert_eq!(p(&[3, 3, 1]).remove_corners().unwrap(), vec![p(&[3, 2, 1]), p(&[3, 3])]);
        assert!(Partition::empty().remove_corners().is_err());
    }

    #[test]
    fn g_functions() {
        assert_eq!(p(&[1]).g_function(), Poly::from_ints(&[0, 1]));
        assert_eq!(p(&[1, 1]).g_function(), Poly::from_ints(&[0, -1, 1]));
        assert_eq!(p(&[2]).g_function(), Poly::from_ints(&[-2, -1, 1]));
    }

    #[test]
    fn branching_and_burnside() {
        for d in 1..=10 {
            let mut sq = BigInt::zero();
            for h in hook_table(d).iter() {
                let below: BigInt = h.partition.remove_corners().unwrap().iter().map(Partition::dimension).sum();
                assert_eq!(below, h.dimension);
                sq += &h.dimension * &h.dimension;
            }
            assert_eq!(sq, factorial(d as u64));
        }
    }

    #[test]
    fn han_identity_small() {
        for d in 1..=8 {
            assert!(han_corollary_check(d).pass, "d = {d}");
        }
    }

    #[test]
    fn vacuum_weight_is_inverse_factorial() {
        for d in 0..=12 {
            assert_eq!(vacuum_weight(d), qbig(factorial(d as u64)).recip());
        }
    }

    #[test]
    fn json_is_array_of_parts() {
        assert_eq!(serde_json::to_string(&p(&[3, 1, 1])).unwrap(), "[3,1,1]");
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
    }

    proptest! {
        #[test]
        fn conjugation_is_an_involution(d in 0usize..14, k in 0usize..200) {
            let all = enumerate_partitions(d);
            let l = &all[k % all.len()];
            prop_assert_eq!(l.conjugate().conjugate(), l.clone());
            prop_assert_eq!(l.conjugate().hook_product(), l.hook_product());
            prop_assert_eq!(l.g_function().degree(), if d == 0 { Some(0) } else { Some(d) });
        }

        #[test]
        fn corners_round_trip(d in 1usize..12, k in 0usize..200) {
            let all = enumerate_partitions(d);
            let l = &all[k % all.len()];
            for m in l.remove_corners().unwrap() {
                prop_assert!(m.add_corners().contains(l));
            }
        }
    }
}
