use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use origami_core::flow::{cutting_sequence, make_segment, segments_intersect, point_on_segment, Direction, Extent};
use origami_core::verify::{random_segment, Reflection, SlopeCone};
use origami_core::{builtin_genus2_l, builtin_ornithorynque, SurfacePoint};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Q = BigRational;

fn start(o_n: usize) -> impl Strategy<Value = (usize, i64, i64)> {
    (0..o_n, 0i64..1009, 0i64..1009)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pieces_sum_to_the_segment(
        (j, xn, yn) in start(12), dx in -7i64..8, dy in -7i64..8, l in 1i64..200,
    ) {
        prop_assume!(dx != 0 || dy != 0);
        let o = builtin_ornithorynque();
        let p = SurfacePoint::new(&o, j, Q::new(xn.into(), 1009.into()), Q::new(yn.into(), 1009.into())).unwrap();
        let d = Direction::new(dx, dy).unwrap();
        let Ok(seg) = make_segment(&o, &p, &d, &Extent::Lambda(Q::new(l.into(), 16.into()))) else { return Ok(()) };
        let total = seg.pieces.iter().fold(Q::zero(), |acc, pc| acc + (&pc.lam1 - &pc.lam0));
        prop_assert_eq!(&total, &seg.lambda_end);
        for pc in &seg.pieces {
            let dl = &pc.lam1 - &pc.lam0;
            prop_assert_eq!(&pc.to.0 - &pc.from.0, &dl * Q::from_integer(d.dx.clone()));
            prop_assert_eq!(&pc.to.1 - &pc.from.1, &dl * Q::from_integer(d.dy.clone()));
        }
        for w in seg.pieces.windows(2) {
            prop_assert_eq!(&w[0].lam1, &w[1].lam0);
        }
    }

    #[test]
    fn reversal_reverses_the_cutting_sequence(
        (j, xn, yn) in start(3), dx in -7i64..8, dy in -7i64..8, l in 1i64..200,
    ) {
        prop_assume!(dx != 0 || dy != 0);
        let o = builtin_genus2_l();
        let p = SurfacePoint::new(&o, j, Q::new(xn.into(), 1009.into()), Q::new(yn.into(), 1009.into())).unwrap();
        let d = Direction::new(dx, dy).unwrap();
        let Ok(seg) = make_segment(&o, &p, &d, &Extent::Lambda(Q::new(l.into(), 16.into()))) else { return Ok(()) };
        let rev = seg.reversed(&o).unwrap();
        prop_assert_eq!(&rev.end, &seg.start);
        let mut fwd: Vec<_> = cutting_sequence(&seg).edges;
        fwd.reverse();
        prop_assert_eq!(cutting_sequence(&rev).edges, fwd);
    }

    #[test]
    fn intersection_witness_lies_on_both(seed in any::<u64>()) {
        let o = builtin_ornithorynque();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = Q::from_integer(5.into());
        let (Some(h), Some(v)) = (
            random_segment(&o, &SlopeCone::unit(), &k, &mut rng),
            random_segment(&o, &SlopeCone::above_one(), &k, &mut rng),
        ) else { return Ok(()) };
        if let Some(p) = segments_intersect(&o, &h, &v) {
            prop_assert!(point_on_segment(&o, &h, &p) && point_on_segment(&o, &v, &p));
        }
    }
}

#[test]
fn reflection_relabels_cutting_sequences_consistently() {
    let o = builtin_ornithorynque();
    let refl = Reflection::new(&o).expect("X_O is reflection symmetric");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    let k = Q::from_integer(8.into());
    let mut checked = 0;
    for _ in 0..300 {
        let Some(s) = random_segment(&o, &SlopeCone::unit(), &k, &mut rng) else { continue };
        let Ok(r) = refl.segment(&o, &s) else { continue };
        assert_eq!(r.direction.dx, -s.direction.dx.clone());
        assert_eq!(r.direction.dy, s.direction.dy);
        let (a, b) = (cutting_sequence(&s).letters, cutting_sequence(&r).letters);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            let prev = map.entry(x.clone()).or_insert_with(|| y.clone());
            assert_eq!(prev, y, "letter {x} maps to both {prev} and {y}");
        }
        checked += 1;
    }
    assert!(checked > 200);
    let mut images: Vec<_> = map.values().collect();
    images.sort();
    images.dedup();
    assert_eq!(images.len(), map.len(), "relabeling is injective");
}
