use num_rational::BigRational;
use num_traits::{One, Zero};
use origami_core::origami::Corner;
use origami_core::{builtin_genus2_l, builtin_ornithorynque, Origami, Permutation, SurfacePoint};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_origami(n: usize, seed: u64) -> Option<Origami> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h: Vec<usize> = (0..n).collect();
    let mut v: Vec<usize> = (0..n).collect();
    h.shuffle(&mut rng);
    v.shuffle(&mut rng);
    Origami::from_images(h, v, None).ok()
}

fn random_perm(n: usize, seed: u64) -> Permutation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng);
    Permutation::new(p).unwrap()
}

#[test]
fn ornithorynque_invariants() {
    let o = builtin_ornithorynque();
    let cd = o.cone_data();
    assert_eq!(o.n(), 12);
    assert_eq!(cd.orders(), vec![2, 2, 2]);
    assert_eq!(cd.regular_vertices, 3);
    assert_eq!(cd.genus, 4);
    assert_eq!(o.automorphism_group().len(), 3);
    assert_eq!(o.commutator().cycle_type(), vec![3, 3, 3, 1, 1, 1]);
}

#[test]
fn genus2_l_has_one_cone_of_angle_six_pi() {
    let cd = builtin_genus2_l().cone_data();
    assert_eq!((cd.genus, cd.orders()), (2, vec![2]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_characteristic_matches_genus(n in 1usize..10, seed in any::<u64>()) {
        let Some(o) = random_origami(n, seed) else { return Ok(()) };
        prop_assert_eq!(o.edges().len(), 2 * n);
        let chi = o.vertex_count() as i64 - 2 * n as i64 + n as i64;
        prop_assert_eq!(chi, o.euler_characteristic());
        prop_assert_eq!(chi, 2 - 2 * o.cone_data().genus as i64);
        // Riemann–Hurwitz: total cone order is 2g − 2
        prop_assert_eq!(o.cone_data().orders().iter().sum::<usize>() as i64, -chi);
    }

    #[test]
    fn cone_data_invariant_under_relabeling(n in 1usize..10, seed in any::<u64>(), s2 in any::<u64>()) {
        let Some(o) = random_origami(n, seed) else { return Ok(()) };
        let r = o.relabeled(&random_perm(n, s2));
        prop_assert!(r.isomorphic(&o));
        let (a, b) = (o.cone_data(), r.cone_data());
        prop_assert_eq!(a.orders(), b.orders());
        prop_assert_eq!(a.regular_vertices, b.regular_vertices);
        prop_assert_eq!(a.genus, b.genus);
    }

    #[test]
    fn automorphisms_form_a_group(n in 1usize..9, seed in any::<u64>()) {
        let Some(o) = random_origami(n, seed) else { return Ok(()) };
        let g = o.automorphism_group();
        prop_assert_eq!(n % g.len(), 0);
        for a in &g {
            prop_assert!(g.contains(&a.inverse()));
            for b in &g {
                prop_assert!(g.contains(&a.compose(b)));
            }
        }
    }

    #[test]
    fn normalization_is_idempotent(j in 0usize..12, yn in 0i64..97) {
        let o = builtin_ornithorynque();
        let y = BigRational::new(yn.into(), 97.into());
        let p = SurfacePoint::new(&o, j, BigRational::one(), y.clone()).unwrap();
        prop_assert_eq!(p.clone().normalized(&o), p.clone());
        // (j, 1, y) is the left edge of h(j); a step left re-enters j
        prop_assert!(p.x.is_zero());
        prop_assert_eq!(o.h_inv().apply(p.square), j);
    }
}

#[test]
fn vertex_corners_are_consistent() {
    for o in [builtin_ornithorynque(), builtin_genus2_l()] {
        assert!(o.vertex_cross_check());
        for j in 0..o.n() {
            assert_eq!(o.vertex_at(j, Corner::TopRight), o.vertex_at(o.h().apply(j), Corner::TopLeft));
            assert_eq!(o.vertex_at(j, Corner::TopRight), o.vertex_at(o.v().apply(j), Corner::BottomRight));
        }
    }
}
