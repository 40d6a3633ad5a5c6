use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use torlab_core::autom::Automorphism;
use torlab_core::distops::TruncationWindow;
use torlab_core::report::{Entry, Report, Status};
use torlab_core::rootsys::{gadd, gis_zero, gscale, vadd, CartanType, Chevalley, GVec, Lattice};
use torlab_core::toroidal::Toroidal;
use torlab_core::{CycScalar, Q};

fn scalar(order: u32) -> impl Strategy<Value = CycScalar> {
    let deg = torlab_core::scalar::totient(order);
    prop::collection::vec((-9i128..=9, 1i128..=6), deg)
        .prop_map(move |c| CycScalar::from_poly(order, c.into_iter().map(|(n, d)| Q::new(n, d)).collect()))
}

fn scalar_any() -> impl Strategy<Value = CycScalar> {
    prop_oneof![Just(1u32), Just(3), Just(4), Just(8), Just(12)].prop_flat_map(scalar)
}

fn gvec(g: Arc<Chevalley>) -> impl Strategy<Value = GVec> {
    let dim = g.dim();
    prop::collection::vec((0..dim, -3i64..=3), 1..4).prop_map(move |terms| {
        terms.into_iter().fold(g.zero(), |acc, (a, c)| gadd(&acc, &gscale(&CycScalar::int(c), &g.unit(a))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in scalar_any(), b in scalar_any(), c in scalar_any()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn scalar_text_and_json_round_trip(a in scalar_any()) {
        let back: CycScalar = a.to_string().parse().unwrap();
        prop_assert_eq!(&back, &a);
        let j = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<CycScalar>(&j).unwrap(), a);
    }

    #[test]
    fn cocycle_axioms_on_lattice_vectors(
        (lat, a, b, c) in prop_oneof![Just("A2"), Just("D4"), Just("E6")].prop_flat_map(|t| {
            let ct: CartanType = t.parse().unwrap();
            let lat = Lattice::extended(&ct.cartan_matrix(), 2);
            let v = prop::collection::vec(-3i64..=3, lat.dim());
            (Just(lat), v.clone(), v.clone(), v)
        })
    ) {
        let sign = |x: i64| if x.rem_euclid(2) == 0 { 1 } else { -1 };
        prop_assert_eq!(lat.eps(&a, &a), sign(lat.form(&a, &a) / 2));
        prop_assert_eq!(lat.eps(&a, &b) * lat.eps(&b, &a), sign(lat.form(&a, &b)));
        prop_assert_eq!(lat.eps(&vadd(&a, &b), &c), lat.eps(&a, &c) * lat.eps(&b, &c));
        prop_assert_eq!(lat.eps(&a, &vadd(&b, &c)), lat.eps(&a, &b) * lat.eps(&a, &c));
    }

    #[test]
    fn chevalley_jacobi_and_invariance(
        (x, y, z) in {
            let g = Arc::new(Chevalley::from_type("A3".parse().unwrap()));
            (gvec(g.clone()), gvec(g.clone()), gvec(g))
        }
    ) {
        let g = Chevalley::from_type("A3".parse().unwrap());
        let j = gadd(&gadd(&g.bracket(&x, &g.bracket(&y, &z)), &g.bracket(&y, &g.bracket(&z, &x))), &g.bracket(&z, &g.bracket(&x, &y)));
        prop_assert!(gis_zero(&j));
        prop_assert_eq!(g.form(&g.bracket(&x, &y), &z), g.form(&x, &g.bracket(&y, &z)));
    }

    #[test]
    fn toroidal_jacobi_twisted(seed in any::<u64>()) {
        let g = Arc::new(Chevalley::from_type("A2".parse().unwrap()));
        let flip = Automorphism::diagram(&g, &[1, 0]).unwrap();
        let t = Toroidal::new(g, 1, flip);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = t.random_fixed(&mut rng, 2, 1);
        let y = t.random_fixed(&mut rng, 2, 1);
        let z = t.random_fixed(&mut rng, 2, 1);
        let j = t.bracket(&x, &t.bracket(&y, &z)).add(&t.bracket(&y, &t.bracket(&z, &x))).add(&t.bracket(&z, &t.bracket(&x, &y)));
        prop_assert!(t.normalize(&j).is_zero());
        let xy = t.bracket(&x, &y);
        prop_assert!(t.is_fixed(&xy));
        prop_assert_eq!(t.normalize(&xy), xy);
    }

    #[test]
    fn diagram_automorphism_has_its_order(x in gvec(Arc::new(Chevalley::from_type("D4".parse().unwrap())))) {
        let g = Chevalley::from_type("D4".parse().unwrap());
        // Triality on the outer nodes of D4 (node 1 is the centre).
        let tri = Automorphism::diagram(&g, &[2, 1, 3, 0]).unwrap();
        prop_assert_eq!(tri.exact_order(&g), 3);
        prop_assert_eq!(tri.apply_pow(3, &x), x.clone());
        prop_assert_eq!(g.form(&tri.apply(&x), &tri.apply(&x)), g.form(&x, &x));
    }

    #[test]
    fn report_round_trip(
        rows in prop::collection::vec(("[a-z]{1,6}", "[a-z0-9=, ]{0,10}", 0u8..3, 0u64..100, prop::option::of("[ -~]{0,12}")), 0..12)
    ) {
        let mut r = Report::new("prop", serde_json::json!({"k": 1}));
        for (id, params, st, checked, witness) in rows {
            let status = [Status::Pass, Status::Fail, Status::WindowClipped][st as usize];
            r.push(Entry { relation_id: id, params, status, checked, witness });
        }
        let r = r.finish();
        let text = r.to_json();
        let back: Report = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(back.to_json(), text);
        prop_assert!(r.entries.windows(2).all(|w| (&w[0].relation_id, &w[0].params) <= (&w[1].relation_id, &w[1].params)));
    }

    #[test]
    fn window_text_round_trip(w in 0i64..50, d in 0u32..9, b in 0u32..9) {
        let win = TruncationWindow::new(w, d, b).unwrap();
        prop_assert_eq!(win.to_string().parse::<TruncationWindow>().unwrap(), win);
    }
}
