use num_traits::Zero;
use proptest::prelude::*;

use tau_interlace::interlace::{even_odd_split, hb_check, hb_compose, interlace_check};
use tau_interlace::jacobi::{phi, verify_identity, Identity};
use tau_interlace::poly::{count_real_roots, gcd, rat};
use tau_interlace::realroots::{isolate, real_roots};
use tau_interlace::scanner::root_sum;
use tau_interlace::stability::{necessary_condition_holds, routh_hurwitz};
use tau_interlace::{to_f64, Error, JacobiParams, RatPoly, Rational};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn poly(max_len: usize) -> impl Strategy<Value = RatPoly> {
    prop::collection::vec(small_rational(), 1..=max_len).prop_map(RatPoly::new)
}

fn distinct_roots(lo: i64, hi: i64, max: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::btree_set((lo * 4)..=(hi * 4), 1..=max)
        .prop_map(|s| s.into_iter().map(|k| rat(k, 4)).collect())
}

fn jacobi_point() -> impl Strategy<Value = JacobiParams> {
    (1usize..=9, -15i64..=30, -15i64..=30).prop_map(|(n, a, b)| JacobiParams::new(n, rat(a, 8), rat(b, 8)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in poly(5), b in poly(5), c in poly(5)) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn leibniz_rule(a in poly(6), b in poly(6)) {
        let lhs = (&a * &b).derivative();
        let rhs = &(&a.derivative() * &b) + &(&a * &b.derivative());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gcd_divides_both(a in poly(5), b in poly(5), c in poly(4)) {
        prop_assume!(!c.is_zero());
        let (pa, pb) = (&a * &c, &b * &c);
        prop_assume!(!pa.is_zero() && !pb.is_zero());
        let g = gcd(&pa, &pb).unwrap();
        prop_assert!(pa.rem(&g).unwrap().is_zero());
        prop_assert!(pb.rem(&g).unwrap().is_zero());
        prop_assert!(g.degree() >= c.degree());
    }

    #[test]
    fn sturm_counts_distinct_real_roots(roots in distinct_roots(-5, 5, 6), square in 0usize..3) {
        let mut p = RatPoly::from_roots(&roots);
        // repeated factors and a factor without real zeros leave the count unchanged
        for _ in 0..square {
            p = &p * &RatPoly::from_roots(&roots[..1]);
        }
        p = &p * &RatPoly::from_ints(&[1, 0, 1]);
        prop_assert_eq!(count_real_roots(&p, None, None).unwrap(), roots.len());
        let sf = p.squarefree_part().unwrap();
        prop_assert_eq!(sf.degree(), Some(roots.len() + 2));
    }

    #[test]
    fn interlacing_is_symmetric_and_scale_invariant(p in poly(5), q in poly(5), c in small_rational()) {
        prop_assume!(!c.is_zero());
        let pq = interlace_check(&p, &q).verdict;
        prop_assert_eq!(pq, interlace_check(&q, &p).verdict);
        prop_assert_eq!(pq, interlace_check(&p.scale(&c), &q).verdict);
    }

    #[test]
    fn rolle(roots in distinct_roots(-6, 6, 7)) {
        prop_assume!(roots.len() >= 2);
        let p = RatPoly::from_roots(&roots);
        prop_assert!(interlace_check(&p, &p.derivative()).is_strict());
    }

    #[test]
    fn even_odd_reconstruction(h in poly(9)) {
        let (e, o) = even_odd_split(&h);
        prop_assert_eq!(hb_compose(&e, &o), h);
    }

    #[test]
    fn isolation_is_scale_invariant(roots in distinct_roots(-4, 4, 5), c in small_rational()) {
        prop_assume!(!c.is_zero());
        let p = RatPoly::from_roots(&roots);
        let prec = rat(1, 1 << 20);
        let a = isolate(&p, &prec).unwrap();
        let b = isolate(&p.scale(&c), &prec).unwrap();
        prop_assert_eq!(a.roots.len(), roots.len());
        prop_assert_eq!(a.roots, b.roots);
    }

    #[test]
    fn hermite_biehler_agrees_with_routh(pr in distinct_roots(-6, -1, 3), qr in distinct_roots(-6, -1, 3), sign in prop::bool::ANY) {
        let p = RatPoly::from_roots(&pr);
        let mut q = RatPoly::from_roots(&qr);
        if sign {
            q = -q;
        }
        let h = hb_compose(&p, &q);
        prop_assert_eq!(hb_check(&p, &q), routh_hurwitz(&h).unwrap().stable);
    }

    #[test]
    fn routh_detects_right_half_plane_zero(roots in distinct_roots(-5, -1, 5), bad in 1i64..=20) {
        let stable = RatPoly::from_roots(&roots);
        prop_assert!(routh_hurwitz(&stable).unwrap().stable);
        let flipped = &stable * &RatPoly::from_roots(&[rat(bad, 4)]);
        prop_assert!(!routh_hurwitz(&flipped).unwrap().stable);
    }

    #[test]
    fn necessary_condition_on_negative_real_rooted(roots in distinct_roots(-8, -1, 7)) {
        prop_assume!(roots.len() >= 2);
        prop_assert!(necessary_condition_holds(&RatPoly::from_roots(&roots)).unwrap());
    }

    #[test]
    fn identities_hold(params in jacobi_point(), a in small_rational(), which in 0usize..Identity::ALL.len()) {
        let id = Identity::ALL[which];
        match verify_identity(id, &params, Some(&a)) {
            Ok(holds) => prop_assert!(holds, "{} fails at {:?}", id.name(), params),
            Err(Error::IdentityUndefined { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn root_sum_matches_isolated_roots(params in jacobi_point()) {
        let p = phi(&params);
        prop_assume!(p.degree().unwrap_or(0) >= 1);
        let roots = real_roots(&p).unwrap();
        prop_assume!(roots.iter().map(|r| r.multiplicity()).sum::<usize>() == p.degree().unwrap());
        let isolated = isolate(&p, &rat(1, 1 << 30)).unwrap();
        let approx: f64 = isolated.roots.iter().map(|r| to_f64(&r.mid) * r.mult as f64).sum();
        let exact = to_f64(&root_sum(&p).unwrap());
        prop_assert!((approx - exact).abs() <= 1e-6 * exact.abs().max(1.0));
    }
}
