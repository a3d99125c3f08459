//! Structural invariants over random inputs.

use num_traits::Zero;
use proptest::prelude::*;

use p1curve::exact::{q, qf, Poly, RatFunc, Rational, Series};
use p1curve::partitions::{enumerate_partitions, hook_table};
use p1curve::qcurve::{verify_xd_recursion, x_laguerre_poles, x_partition};
use p1curve::toprec::{primitive_fgn, toprec_wgn};
use p1curve::wavefunction::{string_reduction, theta_resummation_check, LogLaurentForm};
use p1curve::wedge::{stationary_invariant, unit_insertions};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=7).prop_map(|(n, d)| qf(n, d))
}

/// A rational away from the poles `z = ±1` and from `0`.
fn sample_point() -> impl Strategy<Value = Rational> {
    small_rational().prop_filter("pole or origin", |z| !z.is_zero() && *z != q(1) && *z != q(-1))
}

fn poly() -> impl Strategy<Value = Poly> {
    proptest::collection::vec(small_rational(), 0..5).prop_map(Poly::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_inverts_exp(c in proptest::collection::vec(small_rational(), 1..6)) {
        let mut coeffs = vec![Rational::zero()];
        coeffs.extend(c);
        let order = coeffs.len() as i64 - 1;
        let s = Series::new("t", 0, order, coeffs).unwrap();
        prop_assert_eq!(s.exp().unwrap().log().unwrap(), s);
    }

    #[test]
    fn series_inverse(c in proptest::collection::vec(small_rational(), 1..6)) {
        let mut coeffs = vec![q(1)];
        coeffs.extend(c);
        let order = coeffs.len() as i64 - 1;
        let s = Series::new("t", 0, order, coeffs).unwrap();
        prop_assert_eq!(s.mul(&s.inv().unwrap()), Series::one("t", order));
    }

    #[test]
    fn ratfunc_field_laws(a in poly(), b in poly(), c in poly().prop_filter("nonzero", |p| !p.is_zero())) {
        let f = RatFunc::new(a, c.clone()).unwrap();
        let g = RatFunc::new(b, c).unwrap();
        prop_assert_eq!(&(&f + &g) - &g, f.clone());
        prop_assert_eq!(&f * &g, &g * &f);
    }

    #[test]
    fn shift_is_additive(p in poly(), a in small_rational(), b in small_rational()) {
        let f = RatFunc::from_poly(p);
        prop_assert_eq!(f.shift(&a).shift(&b), f.shift(&(a + b)));
    }

    #[test]
    fn x_recursion_and_pole_form(d in 1usize..=12) {
        prop_assert!(verify_xd_recursion(d));
        prop_assert_eq!(x_partition(d).value, x_laguerre_poles(d));
    }

    #[test]
    fn x_at_infinity(d in 0usize..=9) {
        // Every summand tends to 1/H^2, so X_d(∞) = 1/d!.
        let lead = x_partition(d).value.expand_at_infinity("w", 0).coeff(0).unwrap();
        let fact: Rational = (1..=d as i64).map(q).product();
        prop_assert_eq!(lead * fact, q(1));
    }

    #[test]
    fn hook_squares_sum(d in 0usize..=10) {
        let total: Rational = hook_table(d).iter().map(|h| h.inv_hook_sq()).sum();
        let fact: Rational = (1..=d as i64).map(q).product();
        prop_assert_eq!(total * fact, q(1));
    }

    #[test]
    fn conjugation_preserves_hooks(d in 1usize..=9, pick in 0usize..1000) {
        let ps = enumerate_partitions(d);
        let p = &ps[pick % ps.len()];
        let c = p.conjugate();
        prop_assert_eq!(c.conjugate(), p.clone());
        prop_assert_eq!(c.hook_product(), p.hook_product());
    }

    #[test]
    fn invariants_symmetric(b in proptest::collection::vec(0i64..4, 2..=3), rot in 0usize..3) {
        let s: i64 = b.iter().sum();
        prop_assume!(s % 2 == 0 && s >= 2);
        let (g, d) = (0, ((s + 2) / 2) as usize);
        let mut c = b.clone();
        c.rotate_left(rot % b.len());
        prop_assert_eq!(stationary_invariant(g, d, &b).unwrap().value, stationary_invariant(g, d, &c).unwrap().value);
    }

    #[test]
    fn dimension_violation_is_zero(b in proptest::collection::vec(0i64..5, 1..=2), d in 0usize..3) {
        let s: i64 = b.iter().sum();
        let g = 1;
        prop_assume!(s != 2 * g - 2 + 2 * d as i64);
        let v = stationary_invariant(g as usize, d, &b).unwrap();
        prop_assert!(v.dimension_violation);
        prop_assert!(v.value.is_zero());
    }

    #[test]
    fn string_equation_one_step(b in proptest::collection::vec(0i64..4, 1..=2), d in 1usize..3) {
        let s: i64 = b.iter().sum();
        let twice_g = s + 1 - 2 * d as i64 + 2;
        prop_assume!(twice_g >= 0 && twice_g % 2 == 0);
        let g = (twice_g / 2) as usize;
        let expected: Rational = string_reduction(1, &b)
            .iter()
            .map(|(c, m)| m * stationary_invariant(g, d, c).unwrap().value)
            .sum();
        prop_assert_eq!(unit_insertions(g, 1, d, &b).unwrap(), expected);
    }

    #[test]
    fn log_laurent_shift_group(e in -3i64..4, lg in any::<bool>(), a in small_rational(), b in small_rational()) {
        let f = LogLaurentForm::monomial(0, e, lg, q(1), 5);
        prop_assert_eq!(f.shift(&a).shift(&b), f.shift(&(a + b)));
    }

    #[test]
    fn log_laurent_exp_is_multiplicative(c1 in small_rational(), c2 in small_rational(), e1 in -3i64..2, e2 in -3i64..2) {
        let f = LogLaurentForm::monomial(1, e1, false, c1, 5);
        let g = LogLaurentForm::monomial(2, e2, false, c2, 5);
        let lhs = f.add(&g).exp().unwrap();
        let rhs = f.exp().unwrap().mul(&g.exp().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn wgn_symmetric_and_skew(idx in 0usize..4, z in proptest::collection::vec(sample_point(), 4)) {
        let (g, n) = [(0, 3), (1, 1), (0, 4), (1, 2)][idx];
        let w = toprec_wgn(g, n).unwrap();
        prop_assert!(w.is_symmetric());
        let f = primitive_fgn(g, n).unwrap();
        let pt: Vec<Rational> = z[..n].to_vec();
        let mut flipped = pt.clone();
        flipped[0] = flipped[0].recip();
        prop_assert_eq!(f.eval(&flipped).unwrap(), -f.eval(&pt).unwrap());
    }

    #[test]
    fn theta_shift_holds(idx in 0usize..5) {
        let (g, n, d) = [(0, 1, 0), (1, 1, 0), (0, 1, 1), (0, 2, 1), (0, 1, 2)][idx];
        prop_assert!(theta_resummation_check(g, n, d, 5).unwrap().pass);
    }
}
