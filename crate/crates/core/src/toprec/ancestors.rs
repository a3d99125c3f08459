//! Decomposition of `W_{g,n}` in the basis `prod dη^{μ_k}_{d_k}(z_k)` and
//! the ancestor/descendant relation through the `S`-matrix.
//!
//! The ancestor invariants are `(-1)^n` times the raw basis coefficients:
//! each `dη` expands with the opposite sign of the `S`-matrix series.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::expansion::{exponent_tuples, Mismatch};
use super::form::{Pole, PoleSum};
use super::recursion::toprec_wgn;
use super::theta::{eta, s_matrix};
use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::exact::partial_fractions;
use crate::wedge::{connected_table, stationary_invariant};

/// `(d, μ)` for one slot.
pub type BasisIndex = (usize, usize);

/// Coordinates of one slot: the basis vectors `dη^μ_d/dz` written in the
/// pole basis, and a left inverse built on pivot coordinates.
struct SlotBasis {
    index: Vec<BasisIndex>,
    /// `left[r]` maps a pole to the coefficient of `index[r]`.
    left: Vec<BTreeMap<Pole, Rational>>,
    vectors: Vec<BTreeMap<Pole, Rational>>,
}

fn basis_vector(mu: usize, d: usize) -> Result<BTreeMap<Pole, Rational>> {
    let pf = partial_fractions(&eta(mu, d)?.derivative())?;
    if !pf.polynomial.is_zero() {
        return Err(Error::BasisDoesNotClose(format!("dη^{mu}_{d} has a polynomial part")));
    }
    let mut v = BTreeMap::new();
    for t in pf.terms {
        let center = if t.pole.is_one() { 1 } else { -1 };
        v.insert(Pole::new(center, t.order as u32), t.coeff);
    }
    Ok(v)
}

impl SlotBasis {
    fn build(max_d: usize) -> Result<SlotBasis> {
        let mut index = Vec::new();
        let mut vectors = Vec::new();
        for d in 0..=max_d {
            for mu in 1..=2 {
                index.push((d, mu));
                vectors.push(basis_vector(mu, d)?);
            }
        }
        let coords: Vec<Pole> = {
            let mut c: Vec<Pole> = vectors.iter().flat_map(|v| v.keys().copied()).collect();
            c.sort();
            c.dedup();
            c
        };
        // Rows: pole coordinates; columns: basis vectors. Eliminate to find
        // pivot rows, then invert the square pivot block.
        let k = index.len();
        let mut m: Vec<Vec<Rational>> = coords
            .iter()
            .map(|p| vectors.iter().map(|v| v.get(p).cloned().unwrap_or_else(Rational::zero)).collect())
            .collect();
        let mut pivots = Vec::with_capacity(k);
        let mut work = m.clone();
        for col in 0..k {
            let r = (0..work.len())
                .find(|r| !pivots.contains(r) && !work[*r][col].is_zero())
                .ok_or_else(|| Error::BasisDoesNotClose("slot basis is degenerate".into()))?;
            pivots.push(r);
            let p = work[r][col].clone();
            for rr in 0..work.len() {
                if rr != r && !work[rr][col].is_zero() {
                    let f = &work[rr][col] / &p;
                    for c in 0..k {
                        let sub = &f * &work[r][c];
                        work[rr][c] -= sub;
                    }
                }
            }
        }
        m = pivots.iter().map(|r| m[*r].clone()).collect();
        let inv = invert(m)?;
        // coefficient vector = inv * (pivot coordinates of the slot function)
        let left = (0..k)
            .map(|r| pivots.iter().enumerate().map(|(j, row)| (coords[*row], inv[r][j].clone())).collect())
            .collect();
        Ok(SlotBasis { index, left, vectors })
    }
}

/// Gauss-Jordan inverse of a square rational matrix.
fn invert(mut m: Vec<Vec<Rational>>) -> Result<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for col in 0..n {
        let r = (col..n)
            .find(|r| !m[*r][col].is_zero())
            .ok_or_else(|| Error::NotInvertible("pivot block".into()))?;
        m.swap(col, r);
        inv.swap(col, r);
        let p = m[col][col].clone();
        for c in 0..n {
            m[col][c] /= &p;
            inv[col][c] /= &p;
        }
        for rr in 0..n {
            if rr != col && !m[rr][col].is_zero() {
                let f = m[rr][col].clone();
                for c in 0..n {
                    let a = &f * &m[col][c];
                    m[rr][c] -= a;
                    let b = &f * &inv[col][c];
                    inv[rr][c] -= b;
                }
            }
        }
    }
    Ok(inv)
}

#[derive(Clone, Debug, Serialize)]
pub struct AncestorEntry {
    pub d: Vec<usize>,
    pub mu: Vec<usize>,
    #[serde(with = "rational::text")]
    pub value: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct AncestorTable {
    pub g: usize,
    pub n: usize,
    /// Nonzero ancestor invariants `<prod τ̄_{d_k}(e_{μ_k})>_{g,n}`.
    pub entries: Vec<AncestorEntry>,
}

impl AncestorTable {
    pub fn get(&self, d: &[usize], mu: &[usize]) -> Rational {
        self.entries
            .iter()
            .find(|e| e.d == d && e.mu == mu)
            .map(|e| e.value.clone())
            .unwrap_or_else(Rational::zero)
    }
}

/// Solves for the coefficients of `W_{g,n}` in the `dη` basis slot by slot
/// and checks that they reassemble to `W_{g,n}` exactly.
pub fn ancestor_decomposition(g: usize, n: usize) -> Result<AncestorTable> {
    let w = toprec_wgn(g, n)?;
    let max_order = w.max_order() as usize;
    let basis = SlotBasis::build(max_order.saturating_sub(2) / 2)?;
    // Apply the left inverse one slot at a time; keys become basis rows.
    let mut cur: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    {
        // Slots not yet converted keep their pole, encoded after the rows.
        let mut state: BTreeMap<(Vec<usize>, Vec<Pole>), Rational> =
            w.terms().iter().map(|(k, c)| ((Vec::new(), k.clone()), c.clone())).collect();
        for _ in 0..n {
            let mut next: BTreeMap<(Vec<usize>, Vec<Pole>), Rational> = BTreeMap::new();
            for ((rows, poles), c) in &state {
                for (r, l) in basis.left.iter().enumerate() {
                    if let Some(a) = l.get(&poles[0]) {
                        let mut rs = rows.clone();
                        rs.push(r);
                        let e = next.entry((rs, poles[1..].to_vec())).or_insert_with(Rational::zero);
                        *e += c * a;
                    }
                }
            }
            next.retain(|_, v| !v.is_zero());
            state = next;
        }
        for ((rows, _), c) in state {
            cur.insert(rows, c);
        }
    }
    // Reassemble.
    let mut back = PoleSum::zero(n);
    for (rows, c) in &cur {
        let mut partial: Vec<(Vec<Pole>, Rational)> = vec![(Vec::new(), c.clone())];
        for r in rows {
            let mut nxt = Vec::new();
            for (k, a) in &partial {
                for (p, b) in &basis.vectors[*r] {
                    let mut kk = k.clone();
                    kk.push(*p);
                    nxt.push((kk, a * b));
                }
            }
            partial = nxt;
        }
        for (k, a) in partial {
            back.add_term(k, a);
        }
    }
    if !back.sub(&w).is_zero() {
        return Err(Error::BasisDoesNotClose(format!("W_{{{g},{n}}} is not spanned by the dη basis")));
    }
    let sign = if n.is_multiple_of(2) { Rational::one() } else { -Rational::one() };
    let entries = cur
        .into_iter()
        .map(|(rows, c)| AncestorEntry {
            d: rows.iter().map(|r| basis.index[*r].0).collect(),
            mu: rows.iter().map(|r| basis.index[*r].1).collect(),
            value: &sign * c,
        })
        .collect();
    Ok(AncestorTable { g, n, entries })
}

/// Descendant `<prod τ_{m_k}(ω)>_{g,n}` from ancestors:
/// `sum_{d <= m} <prod τ̄_{d_k}(e_{μ_k})> prod (S_{m_k - d_k})`, contracted
/// on the same index as the `η` expansion.
pub fn descendant_from_ancestors(t: &AncestorTable, m: &[i64]) -> Rational {
    let mut acc = Rational::zero();
    for e in &t.entries {
        let mut term = e.value.clone();
        for ((d, mu), mk) in e.d.iter().zip(&e.mu).zip(m) {
            if (*d as i64) > *mk {
                term = Rational::zero();
                break;
            }
            term *= s_matrix((*mk - *d as i64) as usize).entry(2, *mu);
            if term.is_zero() {
                break;
            }
        }
        acc += term;
    }
    acc
}

/// `sum c prod η^{μ_k}_{d_k}(z_k)` at a point, with `c` the raw basis
/// coefficients; equals `F_{g,n}(z)`.
pub fn primitive_from_ancestors(t: &AncestorTable, z: &[Rational]) -> Result<Rational> {
    let sign = if t.n.is_multiple_of(2) { Rational::one() } else { -Rational::one() };
    let mut acc = Rational::zero();
    for e in &t.entries {
        let mut term = &sign * &e.value;
        for ((d, mu), zk) in e.d.iter().zip(&e.mu).zip(z) {
            term *= eta(*mu, *d)?.eval(zk)?;
        }
        acc += term;
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct AncestorReport {
    pub g: usize,
    pub n: usize,
    pub total: i64,
    pub entries: usize,
    pub checked: usize,
    pub pass: bool,
    pub first_mismatch: Option<Mismatch>,
}

/// Compares the ancestor-side descendants with the wedge invariants for
/// all `m` with `sum m <= total`.
pub fn ancestor_descendant_check(g: usize, n: usize, total: i64) -> Result<AncestorReport> {
    let t = ancestor_decomposition(g, n)?;
    let dmax = ((total + 2) / 2).max(0) as usize;
    connected_table(n, dmax, total + 1, Some(total + n as i64));
    let tuples = exponent_tuples(n, total);
    let mut first = None;
    for m in &tuples {
        let twice_d = m.iter().sum::<i64>() - 2 * g as i64 + 2;
        let expected = if twice_d < 0 || twice_d % 2 != 0 {
            Rational::zero()
        } else {
            stationary_invariant(g, (twice_d / 2) as usize, m)?.value
        };
        let found = descendant_from_ancestors(&t, m);
        if found != expected {
            first = Some(Mismatch {
                exponents: m.clone(),
                expected,
                found,
            });
            break;
        }
    }
    Ok(AncestorReport {
        g,
        n,
        total,
        entries: t.entries.len(),
        checked: tuples.len(),
        pass: first.is_none(),
        first_mismatch: first,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{q, qf};

    #[test]
    fn genus_zero_three_points_is_degree_zero() {
        let t = ancestor_decomposition(0, 3).unwrap();
        assert!(t.entries.iter().all(|e| e.d == [0, 0, 0]));
        // <τ_0(ω)^3> = 1 and only the point class survives at d = 0.
        assert_eq!(t.get(&[0, 0, 0], &[2, 2, 2]), q(1));
    }

    #[test]
    fn genus_one_one_point() {
        let t = ancestor_decomposition(1, 1).unwrap();
        // <τ_0(ω)>_{1,1} = -1/24 and <τ_1(ω)> is its S-matrix image.
        assert_eq!(descendant_from_ancestors(&t, &[0]), qf(-1, 24));
        assert!(t.entries.iter().all(|e| e.d[0] <= 1));
    }

    #[test]
    fn primitive_agrees_with_ancestor_sum() {
        use crate::toprec::primitive::primitive_fgn;
        let pts = [qf(1, 3), qf(-2, 5), qf(3, 7), qf(5, 2)];
        for (g, n) in [(0, 3), (1, 1), (1, 2), (0, 4), (2, 1)] {
            let t = ancestor_decomposition(g, n).unwrap();
            let f = primitive_fgn(g, n).unwrap();
            assert_eq!(f.eval(&pts[..n]).unwrap(), primitive_from_ancestors(&t, &pts[..n]).unwrap());
        }
    }

    #[test]
    fn relation_low_orders() {
        for (g, n, total) in [(0, 3, 6), (1, 1, 8), (1, 2, 5), (0, 4, 5), (2, 1, 8)] {
            let r = ancestor_descendant_check(g, n, total).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }
}
