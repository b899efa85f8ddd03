use proptest::prelude::*;
use solfold::geometry::ProductPoint;
use solfold::kleinian::{
    fundamental_domain_reduce, int_det, int_mul, lattice_iso_test, sol_lattice_embed, toral_act,
    IntMatrix2, IsoResult, ToralGroupSpec, ToralWord,
};
use solfold::sol::{sol_act, SolParams};

const MATRICES: [IntMatrix2; 4] = [[2, 1, 1, 1], [3, 2, 1, 1], [3, 1, 2, 1], [5, 2, 2, 1]];

fn spec() -> impl Strategy<Value = ToralGroupSpec> {
    (0..MATRICES.len()).prop_map(|i| ToralGroupSpec::new(MATRICES[i]).unwrap())
}

fn word() -> impl Strategy<Value = ToralWord> {
    (-3i64..=3, -4i64..=4, -4i64..=4).prop_map(|(k, n, m)| ToralWord::new(k, n, m))
}

fn point() -> impl Strategy<Value = ProductPoint> {
    (-3.0..3.0f64, -2.0..2.0f64, -3.0..3.0f64, -2.0..2.0f64)
        .prop_map(|(x1, l1, x2, l2)| ProductPoint::new(x1, l1.exp(), x2, l2.exp()).unwrap())
}

fn elementary() -> impl Strategy<Value = IntMatrix2> {
    prop::collection::vec((any::<bool>(), -2i64..=2), 1..3).prop_map(|steps| {
        steps.into_iter().fold([1, 0, 0, 1], |u, (upper, e)| {
            int_mul(&u, &if upper { [1, e, 0, 1] } else { [1, 0, e, 1] })
        })
    })
}

proptest! {
    #[test]
    fn composition_is_associative_with_inverses(s in spec(), g in word(), h in word(), k in word()) {
        prop_assert_eq!(s.compose(&s.compose(&g, &h), &k), s.compose(&g, &s.compose(&h, &k)));
        prop_assert_eq!(s.compose(&g, &s.inverse(&g)), ToralWord::IDENTITY);
    }

    #[test]
    fn embedding_intertwines_the_actions(s in spec(), g in word(), z in point()) {
        let a = toral_act(&s, &g, &z).unwrap();
        let b = sol_act(&SolParams::standard(), &sol_lattice_embed(&s, &g).unwrap(), &z).unwrap();
        let scale = a.coords().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        prop_assert!(a.sup_distance(&b) < 1e-10 * scale);
    }

    #[test]
    fn reduction_lands_in_the_domain(s in spec(), z in point()) {
        let r = fundamental_domain_reduce(&s, &z).unwrap();
        let y1 = r.representative.z1.y();
        prop_assert!(1.0 <= y1 && y1 < s.lambda());
        let back = toral_act(&s, &r.reassemble, &r.representative).unwrap();
        let scale = z.coords().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        prop_assert!(back.sup_distance(&z) < 1e-10 * scale);
    }

    #[test]
    fn representatives_are_orbit_invariant(s in spec(), z in point(), g in word()) {
        let w = toral_act(&s, &g, &z).unwrap();
        let a = fundamental_domain_reduce(&s, &z).unwrap().representative;
        let b = fundamental_domain_reduce(&s, &w).unwrap().representative;
        prop_assert!(a.sup_distance(&b) < 1e-9);
    }

    #[test]
    fn found_conjugators_are_verified(i in 0..MATRICES.len(), u in elementary()) {
        let a = MATRICES[i];
        prop_assume!(int_det(&u).abs() == 1);
        let uinv = [u[3] * int_det(&u), -u[1] * int_det(&u), -u[2] * int_det(&u), u[0] * int_det(&u)];
        let b = int_mul(&int_mul(&u, &a), &uinv);
        match lattice_iso_test(&a, &b, 50).unwrap() {
            IsoResult::Found { u: w, target } => {
                let t = match target {
                    solfold::kleinian::IsoTarget::B => b,
                    solfold::kleinian::IsoTarget::BInverse => solfold::kleinian::int_inverse(&b),
                };
                prop_assert_eq!(int_mul(&w, &a), int_mul(&t, &w));
                prop_assert_eq!(int_det(&w).abs(), 1);
            }
            other => prop_assert!(false, "expected a conjugator, got {:?}", other),
        }
    }
}
