mod common;

use common::*;
use manin_core::counter::DEFAULT_BUDGET;
use manin_core::fan::Fan;
use manin_core::heights::{
    anticanonical_height, global_height, height_zeta_partial, local_height, Place, TorusPoint,
};
use manin_core::picard::PlFunction;
use num_rational::{BigRational, Ratio};
use num_traits::One;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;


#[test]
fn product_formula_for_characters() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, fan) in split_corpus() {
        let ms: Vec<Vec<i64>> = (0..3).map(|_| (0..fan.dim()).map(|_| rng.gen_range(-4..=4)).collect()).collect();
        for m in &ms {
            let phi = PlFunction::linear(&fan, m);
            for _ in 0..1000 {
                let x = random_point(&mut rng, fan.dim());
                assert_eq!(global_height(&fan, &phi, &x).unwrap(), BigRational::one(), "{name} m={m:?} x={x:?}");
            }
        }
    }
}

#[test]
fn zero_function_and_torsion_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (_, fan) in split_corpus() {
        let zero = PlFunction::zero(&fan);
        for _ in 0..50 {
            let x = random_point(&mut rng, fan.dim());
            assert_eq!(global_height(&fan, &zero, &x).unwrap(), BigRational::one());
            assert!(anticanonical_height(&fan, &x).unwrap() >= BigRational::one());
        }
        for signs in 0..(1u32 << fan.dim()) {
            let pairs: Vec<(i64, i64)> = (0..fan.dim()).map(|i| (if signs >> i & 1 == 1 { -1 } else { 1 }, 1)).collect();
            let x = TorusPoint::from_pairs(&pairs).unwrap();
            assert_eq!(anticanonical_height(&fan, &x).unwrap(), BigRational::one());
        }
    }
}

#[test]
fn unit_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (_, fan) in split_corpus() {
        let ac = PlFunction::anticanonical(&fan);
        for _ in 0..100 {
            let x = random_point(&mut rng, fan.dim());
            let i = rng.gen_range(0..fan.dim());
            let mut flipped = x.coords().to_vec();
            flipped[i] = -flipped[i];
            let y = TorusPoint::new(flipped).unwrap();
            for place in [Place::Infinite, Place::Prime(2), Place::Prime(3), Place::Prime(7)] {
                assert_eq!(local_height(&fan, &ac, &x, place).unwrap(), local_height(&fan, &ac, &y, place).unwrap());
            }
            // 5/3 is a 2-adic and 7-adic unit.
            let mut scaled = x.coords().to_vec();
            scaled[i] *= Ratio::new(5, 3);
            let z = TorusPoint::new(scaled).unwrap();
            for p in [2, 7] {
                assert_eq!(
                    local_height(&fan, &ac, &x, Place::Prime(p)).unwrap(),
                    local_height(&fan, &ac, &z, Place::Prime(p)).unwrap()
                );
            }
        }
    }
}


#[test]
fn matches_projective_embeddings() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    // Vertices of {m : ⟨m, e_j⟩ ≤ 1}: the valuation map sends x to log|x|_v,
    // so the height is max |x^m| over this polytope at every place.
    let p1_mons = vec![vec![1], vec![-1]];
    let p2_mons = vec![vec![1, 1], vec![1, -2], vec![-2, 1]];
    let hexagon = vec![vec![1, 0], vec![0, 1], vec![-1, 1], vec![-1, 0], vec![0, -1], vec![1, -1]];
    for _ in 0..300 {
        let x = random_point(&mut rng, 1);
        assert_eq!(anticanonical_height(&p1(), &x).unwrap(), monomial_height(&x, &p1_mons, 1));
        let y = random_point(&mut rng, 2);
        assert_eq!(anticanonical_height(&p2(), &y).unwrap(), monomial_height(&y, &p2_mons, 1), "{y:?}");
        assert_eq!(anticanonical_height(&dp6(), &y).unwrap(), monomial_height(&y, &hexagon, 1));
        let (a, b) = (TorusPoint::new(vec![y.coords()[0]]).unwrap(), TorusPoint::new(vec![y.coords()[1]]).unwrap());
        assert_eq!(
            anticanonical_height(&p1xp1(), &y).unwrap(),
            anticanonical_height(&p1(), &a).unwrap() * anticanonical_height(&p1(), &b).unwrap()
        );
    }
}

#[test]
fn zeta_partial_sums() {
    let fan = p1();
    assert_eq!(height_zeta_partial(&fan, 2.0, 1, DEFAULT_BUDGET).unwrap(), 2.0);
    assert_eq!(height_zeta_partial(&fan, 2.0, 0, DEFAULT_BUDGET).unwrap(), 0.0);
    let v: Vec<f64> = [10, 100, 1000].iter().map(|&b| height_zeta_partial(&fan, 2.0, b, DEFAULT_BUDGET).unwrap()).collect();
    assert!(v[0] < v[1] && v[1] < v[2]);
    assert!(v[2] - v[1] < v[1] - v[0]);
}

fn corpus_fan(i: usize) -> Fan {
    split_corpus().swap_remove(i).1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplicative_in_the_pl_argument(
        fan_idx in 0usize..5,
        seed in any::<u64>(),
    ) {
        let fan = corpus_fan(fan_idx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<i64> = (0..fan.n_rays()).map(|_| rng.gen_range(-3..=3)).collect();
        let b: Vec<i64> = (0..fan.n_rays()).map(|_| rng.gen_range(-3..=3)).collect();
        let (pa, pb) = (PlFunction::from_ints(&a), PlFunction::from_ints(&b));
        let x = random_point(&mut rng, fan.dim());
        prop_assert_eq!(
            global_height(&fan, &pa.add(&pb), &x).unwrap(),
            global_height(&fan, &pa, &x).unwrap() * global_height(&fan, &pb, &x).unwrap()
        );
        for place in [Place::Infinite, Place::Prime(2), Place::Prime(5)] {
            prop_assert_eq!(
                local_height(&fan, &pa.add(&pb), &x, place).unwrap(),
                local_height(&fan, &pa, &x, place).unwrap() * local_height(&fan, &pb, &x, place).unwrap()
            );
        }
    }
}
