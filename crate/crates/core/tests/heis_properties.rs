use proptest::prelude::*;
use solfold::geometry::MixedPoint;
use solfold::heisenberg::{
    heis_act, heis_rectify, heis_rectify_inverse, heis_reduce, HeisElement, HeisLattice, IntHeis,
};

fn dyadic() -> impl Strategy<Value = f64> {
    (-512i32..=512).prop_map(|k| k as f64 / 64.0)
}

fn element() -> impl Strategy<Value = HeisElement> {
    (dyadic(), dyadic(), dyadic()).prop_map(|(a, b, c)| HeisElement::new(a, b, c))
}

fn point() -> impl Strategy<Value = MixedPoint> {
    (dyadic(), dyadic(), dyadic(), 1i32..=512)
        .prop_map(|(a, b, c, q)| MixedPoint::from_coords([a, b, c, q as f64 / 64.0]).unwrap())
}

proptest! {
    // dyadic inputs keep every product exact, so the axioms hold with equality
    #[test]
    fn group_axioms_are_exact(g in element(), h in element(), k in element()) {
        prop_assert_eq!(g.mul(&h).mul(&k), g.mul(&h.mul(&k)));
        prop_assert!(g.mul(&g.inv()).is_identity());
        prop_assert_eq!(g.mul(&HeisElement::IDENTITY), g);
    }

    #[test]
    fn action_axioms_are_exact(g in element(), h in element(), m in point()) {
        prop_assert_eq!(heis_act(&g.mul(&h), &m), heis_act(&g, &heis_act(&h, &m)));
        prop_assert_eq!(heis_act(&HeisElement::IDENTITY, &m), m);
    }

    #[test]
    fn action_preserves_im_w(g in element(), m in point()) {
        prop_assert_eq!(heis_act(&g, &m).w.y(), m.w.y());
    }

    #[test]
    fn commutators_are_central(g in element(), h in element(), k in element()) {
        let c = g.commutator(&h);
        prop_assert_eq!((c.a, c.b), (0.0, 0.0));
        prop_assert_eq!(c.mul(&k), k.mul(&c));
    }

    #[test]
    fn matrix_representation_is_multiplicative(g in element(), h in element()) {
        prop_assert_eq!(g.matrix() * h.matrix(), g.mul(&h).matrix());
    }

    #[test]
    fn rectification_round_trip(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, s in -2.0..2.0f64) {
        let g = HeisElement::new(a, b, c);
        let (g2, s2) = heis_rectify_inverse(&heis_rectify(&g, s).unwrap());
        prop_assert!(g2.sup_distance(&g) < 1e-12);
        prop_assert!((s2 - s).abs() < 1e-12);
    }

    #[test]
    fn reduction_lands_in_the_box_and_is_orbit_invariant(
        g in (-30.0..30.0f64, -30.0..30.0f64, -30.0..30.0f64),
        n in 1u32..4,
        l in (-3i64..=3, -3i64..=3, -3i64..=3),
    ) {
        let lattice = HeisLattice::Scaled(n);
        let (p, p2) = lattice.periods().unwrap();
        let g = HeisElement::new(g.0, g.1, g.2);
        let (lat, rep) = heis_reduce(&lattice, &g);
        prop_assert!(lattice.contains(&lat));
        prop_assert!((0.0..p).contains(&rep.a) && (0.0..p).contains(&rep.b) && (0.0..p2).contains(&rep.c));
        prop_assert!(lat.mul(&rep).sup_distance(&g) < 1e-10);
        let shift = HeisElement::new(p * l.0 as f64, p * l.1 as f64, p2 * l.2 as f64);
        let (_, rep2) = heis_reduce(&lattice, &shift.mul(&g));
        prop_assert!(rep2.sup_distance(&rep) < 1e-10);
    }

    #[test]
    fn integer_law_matches_the_real_law(a in (-9i64..9, -9i64..9, -9i64..9), b in (-9i64..9, -9i64..9, -9i64..9)) {
        let (x, y) = (IntHeis::new(a.0, a.1, a.2), IntHeis::new(b.0, b.1, b.2));
        prop_assert_eq!(x.mul(&y).to_element(), x.to_element().mul(&y.to_element()));
    }
}
