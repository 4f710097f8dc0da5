use proptest::prelude::*;
use tancone::poly::{q, qi, PolyMap, Polynomial, Rational};
use tancone::puiseux::{
    risometry_check, PuiseuxPoint, PuiseuxSeries, RvClass, Valuation,
};

fn arb_series(min_num: i64) -> impl Strategy<Value = PuiseuxSeries> {
    prop::collection::vec((min_num..12i64, 1i64..4, -5i64..6), 0..5).prop_map(|ts| {
        PuiseuxSeries::from_terms(ts.into_iter().map(|(k, d, c)| (q(k, d), qi(c))), None)
    })
}

fn arb_point(n: usize, min_num: i64) -> impl Strategy<Value = PuiseuxPoint> {
    prop::collection::vec(arb_series(min_num), n).prop_map(PuiseuxPoint::new)
}

fn fin(v: Valuation) -> Option<Rational> {
    v.finite().cloned()
}

proptest! {
    #[test]
    fn valuation_is_multiplicative(a in arb_series(-3), b in arb_series(-3)) {
        let (va, vb) = (a.valuation(), b.valuation());
        let vab = a.mul(&b).valuation();
        match (fin(va), fin(vb)) {
            (Some(x), Some(y)) => prop_assert_eq!(vab, Valuation::Finite(x + y)),
            _ => prop_assert_eq!(vab, Valuation::Infinite),
        }
    }

    #[test]
    fn ultrametric_inequality(a in arb_series(-3), b in arb_series(-3)) {
        let s = a.add(&b).valuation();
        match (fin(a.valuation()), fin(b.valuation())) {
            (Some(x), Some(y)) => {
                if x != y {
                    prop_assert_eq!(fin(s), Some(x.min(y)));
                } else if let Some(v) = fin(s) {
                    prop_assert!(v >= x);
                }
            }
            (Some(x), None) | (None, Some(x)) => prop_assert_eq!(fin(s), Some(x)),
            (None, None) => prop_assert_eq!(s, Valuation::Infinite),
        }
    }

    #[test]
    fn division_inverts_multiplication(a in arb_series(-3), b in arb_series(-3)) {
        prop_assume!(b.leading().is_some());
        let back = a.mul(&b).div(&b).unwrap();
        // agreement wherever the quotient is known
        let order = back.order().cloned();
        let expect = match order {
            Some(n) => a.truncate(&n),
            None => a.clone(),
        };
        prop_assert_eq!(back, expect);
    }

    #[test]
    fn rv_classes_match_the_ball_criterion(x in arb_point(2, 0), d in arb_point(2, 0), shift in 0i64..4) {
        // y = x + t^shift * d, so v̂(x − y) ranges over values around v̂(x)
        let y = x.add(&d.scale(&PuiseuxSeries::monomial(qi(1), qi(shift))));
        let same = x.rvhat().unwrap() == y.rvhat().unwrap();
        let criterion = match (x.vhat(), x.sub(&y).vhat()) {
            (Valuation::Infinite, Valuation::Infinite) => true,
            (Valuation::Infinite, _) => false,
            (Valuation::Finite(vx), Valuation::Finite(vd)) => vd > vx,
            (Valuation::Finite(_), Valuation::Infinite) => true,
            _ => unreachable!("exact inputs"),
        };
        prop_assert_eq!(same, criterion);
    }

    #[test]
    fn direction_ignores_unit_scaling(x in arb_point(3, 0), u in arb_series(1), c in 1i64..5, neg in any::<bool>()) {
        prop_assume!(x.vhat() != Valuation::Infinite);
        let lead = if neg { -c } else { c };
        let unit = PuiseuxSeries::constant(qi(lead)).add(&u);
        prop_assert_eq!(x.direction().unwrap(), x.scale(&unit).direction().unwrap());
    }

    #[test]
    fn limit_is_additive(a in arb_point(2, 0), b in arb_point(2, 0)) {
        let la = a.limit().unwrap();
        let lb = b.limit().unwrap();
        let lab = a.add(&b).limit().unwrap();
        let sum: Vec<Rational> = la.iter().zip(&lb).map(|(x, y)| x + y).collect();
        prop_assert_eq!(lab, sum);
    }

    #[test]
    fn literal_round_trip(a in arb_series(-3), order in prop::option::of(0i64..15)) {
        let a = match order {
            Some(n) => a.truncate(&qi(n)),
            None => a,
        };
        prop_assert_eq!(a.to_string().parse::<PuiseuxSeries>().unwrap(), a);
    }

    #[test]
    fn shear_is_a_risometry_near_the_origin(pairs in prop::collection::vec((arb_point(2, 1), arb_point(2, 1)), 1..8)) {
        // φ(x, y) = (x, y + x²)
        let phi = PolyMap::new(vec![
            Polynomial::var(2, 0),
            &Polynomial::var(2, 1) + &Polynomial::var(2, 0).pow(2),
        ]).unwrap();
        let report = risometry_check(&phi, &pairs);
        prop_assert!(report.all_pass(), "{:?}", report.verdicts);
        prop_assert_eq!(report.isometry_violations, 0);
        // hand oracle: the added term (x − x')(x + x') is strictly smaller
        for (a, b) in &pairs {
            let diff = a.sub(b);
            let added = diff.coords[0].mul(&a.coords[0].add(&b.coords[0]));
            if let Some(vd) = diff.vhat().finite() {
                match added.valuation() {
                    Valuation::Finite(va) => prop_assert!(&va > vd),
                    other => prop_assert_eq!(other, Valuation::Infinite),
                }
            }
        }
    }

    #[test]
    fn passing_pairs_keep_their_distance(pairs in prop::collection::vec((arb_point(2, 1), arb_point(2, 1)), 1..8)) {
        let phi = PolyMap::new(vec![
            &Polynomial::var(2, 0) + &Polynomial::var(2, 1).pow(3),
            Polynomial::var(2, 1),
        ]).unwrap();
        let report = risometry_check(&phi, &pairs);
        for ((a, b), v) in pairs.iter().zip(&report.verdicts) {
            if *v == tancone::puiseux::PairVerdict::Pass {
                let fa = tancone::puiseux::PointMap::apply(&phi, a).unwrap();
                let fb = tancone::puiseux::PointMap::apply(&phi, b).unwrap();
                prop_assert_eq!(a.sub(b).vhat(), fa.sub(&fb).vhat());
            }
        }
    }
}

#[test]
fn zero_class_only_for_zero() {
    assert_eq!(PuiseuxPoint::zero(3).rvhat().unwrap(), RvClass::Zero);
    let p = PuiseuxPoint::ray(&[qi(0), qi(0)], &[qi(1), qi(0)]);
    assert_ne!(p.rvhat().unwrap(), RvClass::Zero);
}
