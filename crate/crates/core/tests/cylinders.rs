use num_bigint::BigInt;
use num_rational::BigRational;
use origami_core::cylinder::{horizontal_cylinders, induced_cylinders, vertical_cylinders, Base};
use origami_core::origami::ornithorynque_square;
use origami_core::sl2::projective_slope;
use origami_core::{builtin_genus2_l, builtin_ornithorynque, Generator, GeneratorWord, Origami, ProjSlope};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Q = BigRational;

fn random_origami(n: usize, seed: u64) -> Option<Origami> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h: Vec<usize> = (0..n).collect();
    let mut v: Vec<usize> = (0..n).collect();
    h.shuffle(&mut rng);
    v.shuffle(&mut rng);
    Origami::from_images(h, v, None).ok()
}

fn word() -> impl Strategy<Value = GeneratorWord> {
    prop::collection::vec(prop::sample::select(Generator::ALL.to_vec()), 0..=10).prop_map(GeneratorWord)
}

#[test]
fn ornithorynque_vertical_cylinders() {
    let o = builtin_ornithorynque();
    let d = vertical_cylinders(&o);
    assert_eq!(d.cylinders.len(), 2);
    let mut sets: Vec<Vec<usize>> = d.cylinders.iter().map(|c| c.squares.clone()).collect();
    sets.sort();
    // squares (i, a, ·) for a = 0 and a = 1
    let col = |a| {
        let mut s: Vec<usize> = (0..3).flat_map(|i| (0..2).map(move |b| ornithorynque_square(i, a, b))).collect();
        s.sort();
        s
    };
    let mut want = vec![col(0), col(1)];
    want.sort();
    assert_eq!(sets, want);
    for c in &d.cylinders {
        assert_eq!((c.length, c.width), (6, 1));
    }
    assert_eq!(d.area(), 12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn area_is_conserved(n in 1usize..10, seed in any::<u64>(), w in word(), vertical in any::<bool>()) {
        let Some(o) = random_origami(n, seed) else { return Ok(()) };
        let base = if vertical { Base::Vertical } else { Base::Horizontal };
        let d = induced_cylinders(&o, &w.evaluate(), base).unwrap();
        prop_assert_eq!(d.area(), n);
        let total: usize = d.cylinders.iter().map(|c| c.length * c.width).sum();
        prop_assert_eq!(total, n);
        let mut all: Vec<usize> = d.cylinders.iter().flat_map(|c| c.squares.clone()).collect();
        all.sort();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn induced_slope_is_the_image_of_the_base(w in word(), vertical in any::<bool>()) {
        let o = builtin_genus2_l();
        let m = w.evaluate();
        let (base, fixed) = if vertical {
            (Base::Vertical, ProjSlope::Finite(Q::from_integer(BigInt::from(0))))
        } else {
            (Base::Horizontal, ProjSlope::Infinity)
        };
        let d = induced_cylinders(&o, &m, base).unwrap();
        prop_assert_eq!(&d.slope, &projective_slope(&m, &fixed));
        for (i, c) in d.cylinders.iter().enumerate() {
            let x = Q::new(1.into(), 3.into());
            let y = Q::new(2.into(), 7.into());
            prop_assert!(d.closed_geodesic_audit(i, &x, &y).unwrap());
            prop_assert!(c.length * c.width == c.squares.len());
        }
    }
}

#[test]
fn horizontal_and_vertical_agree_under_rotation() {
    for o in [builtin_ornithorynque(), builtin_genus2_l()] {
        let v = vertical_cylinders(&o);
        let h = horizontal_cylinders(&o);
        let r = origami_core::IntMatrix2::r();
        let rot = induced_cylinders(&o, &r, Base::Vertical).unwrap();
        let mut lw_r: Vec<_> = rot.cylinders.iter().map(|c| (c.length, c.width)).collect();
        let mut lw_h: Vec<_> = h.cylinders.iter().map(|c| (c.length, c.width)).collect();
        lw_r.sort();
        lw_h.sort();
        assert_eq!(lw_r, lw_h);
        assert_eq!(v.area(), h.area());
    }
}
