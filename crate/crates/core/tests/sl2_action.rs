use num_bigint::BigInt;
use num_rational::BigRational;
use origami_core::flow::{make_segment, Direction, Extent};
use origami_core::sl2::{act, act_word, decompose, orbit_enumerate, projective_slope, psi_word, reflect_s};
use origami_core::{builtin_genus2_l, builtin_ornithorynque, Generator, GeneratorWord, IntMatrix2, ProjSlope, SurfacePoint};
use proptest::prelude::*;

type Q = BigRational;

fn word() -> impl Strategy<Value = GeneratorWord> {
    prop::collection::vec(prop::sample::select(Generator::ALL.to_vec()), 0..=20).prop_map(GeneratorWord)
}

fn short_word() -> impl Strategy<Value = GeneratorWord> {
    prop::collection::vec(prop::sample::select(Generator::ALL.to_vec()), 0..=6).prop_map(GeneratorWord)
}

fn point(o_n: usize) -> impl Strategy<Value = (usize, i64, i64)> {
    (0..o_n, 1i64..997, 1i64..997)
}

#[test]
fn ornithorynque_is_a_fixed_point() {
    let o = builtin_ornithorynque();
    assert!(act(&IntMatrix2::t(), &o).unwrap().isomorphic(&o));
    assert!(act(&IntMatrix2::r(), &o).unwrap().isomorphic(&o));
    assert!(reflect_s(&o).isomorphic(&o));
    let orbit = orbit_enumerate(&o, 100).unwrap();
    assert_eq!(orbit.len(), 1);
    assert!(orbit.complete);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decompose_round_trip(w in word()) {
        let m = w.evaluate();
        prop_assert_eq!(decompose(&m).unwrap().evaluate(), m);
    }

    #[test]
    fn action_is_a_left_action(a in short_word(), b in short_word()) {
        let o = builtin_genus2_l();
        let ab = GeneratorWord(a.0.iter().chain(&b.0).copied().collect());
        let lhs = act(&ab.evaluate(), &o).unwrap();
        let rhs = act(&a.evaluate(), &act(&b.evaluate(), &o).unwrap()).unwrap();
        prop_assert!(lhs.isomorphic(&rhs));
        prop_assert!(act_word(&ab, &o).isomorphic(&lhs));
    }

    #[test]
    fn action_preserves_cone_data(w in word()) {
        for o in [builtin_ornithorynque(), builtin_genus2_l()] {
            let img = act_word(&w, &o);
            prop_assert_eq!(img.cone_data().orders(), o.cone_data().orders());
            prop_assert_eq!(img.cone_data().genus, o.cone_data().genus);
        }
    }

    #[test]
    fn inverse_word_restores_origami_and_points(w in word(), (j, xn, yn) in point(3)) {
        let o = builtin_genus2_l();
        let p = SurfacePoint::new(&o, j, Q::new(xn.into(), 997.into()), Q::new(yn.into(), 997.into())).unwrap();
        let (img, target) = psi_word(&w, &o, &p);
        prop_assert_eq!(target.clone(), act_word(&w, &o));
        let (back, source) = psi_word(&w.inverse(), &target, &img);
        prop_assert_eq!(source, o);
        prop_assert_eq!(back, p);
    }

    #[test]
    fn psi_maps_straight_segments_to_straight_segments(
        w in short_word(), (j, xn, yn) in point(12), dx in -4i64..5, dy in -4i64..5, l in 1i64..40,
    ) {
        prop_assume!(dx != 0 || dy != 0);
        let o = builtin_ornithorynque();
        let p = SurfacePoint::new(&o, j, Q::new(xn.into(), 997.into()), Q::new(yn.into(), 997.into())).unwrap();
        let d = Direction::new(dx, dy).unwrap();
        let lam = Extent::Lambda(Q::new(l.into(), 8.into()));
        let Ok(seg) = make_segment(&o, &p, &d, &lam) else { return Ok(()) };
        let g = w.evaluate();
        let (p_img, target) = psi_word(&w, &o, &p);
        let (end_img, _) = psi_word(&w, &o, &seg.end);
        let img_seg = make_segment(&target, &p_img, &d.transformed(&g), &lam).unwrap();
        prop_assert_eq!(img_seg.end, end_img);
    }

    #[test]
    fn projective_action_inverts(w in word(), p in -50i64..50, q in 1i64..50) {
        let m = w.evaluate();
        let s = ProjSlope::Finite(Q::new(BigInt::from(p), BigInt::from(q)));
        let back = projective_slope(&m, &projective_slope(&m.inverse().unwrap(), &s));
        prop_assert_eq!(back, s);
    }
}
