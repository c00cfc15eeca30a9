#![allow(dead_code)]

use manin_core::cone::PolyCone;
use manin_core::fan::Fan;
use manin_core::heights::TorusPoint;
use manin_core::linalg::{rank_of, solve, IntMatrix};
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn p1() -> Fan {
    Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]], vec![]).unwrap()
}

pub fn p2() -> Fan {
    Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![2, 0]], vec![]).unwrap()
}

pub fn p1xp1() -> Fan {
    Fan::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        vec![],
    )
    .unwrap()
}

pub fn hirzebruch1() -> Fan {
    Fan::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, 1], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        vec![],
    )
    .unwrap()
}

/// Rays in cyclic order: (1,0), (1,1), (0,1), (-1,0), (-1,-1), (0,-1).
pub fn dp6() -> Fan {
    Fan::new(
        2,
        vec![vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, 0], vec![-1, -1], vec![0, -1]],
        (0..6).map(|i| vec![i, (i + 1) % 6]).collect(),
        vec![],
    )
    .unwrap()
}

pub fn p1_norm_one() -> Fan {
    Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]], vec![vec![vec![-1]]]).unwrap()
}

pub fn p1xp1_swap() -> Fan {
    Fan::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        vec![vec![vec![0, 1], vec![1, 0]]],
    )
    .unwrap()
}

pub fn p2_threecycle() -> Fan {
    Fan::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        vec![vec![vec![0, -1], vec![1, -1]]],
    )
    .unwrap()
}

pub fn split_corpus() -> Vec<(&'static str, Fan)> {
    vec![("p1", p1()), ("p2", p2()), ("p1xp1", p1xp1()), ("hirzebruch1", hirzebruch1()), ("dp6", dp6())]
}

pub fn full_corpus() -> Vec<(&'static str, Fan)> {
    let mut v = split_corpus();
    v.push(("p1-norm-one", p1_norm_one()));
    v.push(("p1xp1-swap", p1xp1_swap()));
    v.push(("p2-threecycle", p2_threecycle()));
    v
}

/// `ζ(s)` by direct summation with an Euler–Maclaurin tail.
pub fn zeta(s: f64) -> f64 {
    let n = 10_000u32;
    let mut sum: f64 = (1..n).rev().map(|k| (k as f64).powf(-s)).sum();
    let nf = n as f64;
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s / 12.0 * nf.powf(-s - 1.0);
    sum
}

/// `φ_s(x) = Σ s_j λ_j` for real `x = Σ λ_j e_j` in a two-dimensional
/// (or one-dimensional) unimodular fan, solved in floating point.
pub fn phi_real(fan: &Fan, s: &[f64], x: &[f64]) -> f64 {
    for cone in fan.max_cones() {
        let lam: Vec<f64> = match fan.dim() {
            1 => vec![x[0] / fan.rays()[cone[0]][0] as f64],
            2 => {
                let (a, b) = (&fan.rays()[cone[0]], &fan.rays()[cone[1]]);
                let det = (a[0] * b[1] - a[1] * b[0]) as f64;
                vec![(x[0] * b[1] as f64 - x[1] * b[0] as f64) / det, (a[0] as f64 * x[1] - a[1] as f64 * x[0]) / det]
            }
            _ => unimplemented!("oracle covers dimensions 1 and 2"),
        };
        if lam.iter().all(|&l| l >= -1e-12) {
            return cone.iter().zip(&lam).map(|(&j, l)| s[j] * l.max(0.0)).sum();
        }
    }
    panic!("complete fan covers {x:?}")
}

/// `∫_{R^d} e^{-φ_s(x) - i⟨x,y⟩} dx` by adaptive Gauss–Kronrod, split at the
/// kinks of `φ_s` (iterated for d = 2) and truncated where `e^{-φ_s} < 1e-17`.
pub fn archimedean_by_quadrature(fan: &Fan, s: &[f64], y: &[f64]) -> num_complex::Complex64 {
    use manin_core::quadrature::integrate;
    use num_complex::Complex64;
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let emax = fan.rays().iter().flat_map(|e| e.iter().map(|x| x.abs())).max().unwrap() as f64;
    let l = 40.0 * emax / smin;
    let f = |x: &[f64]| {
        let phase: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        Complex64::from_polar((-phi_real(fan, s, x)).exp(), -phase)
    };
    match fan.dim() {
        1 => integrate(|t| f(&[t]), -l, l, &[0.0], 1e-13, 1e-10).unwrap().value,
        2 => {
            let inner = |x1: f64| {
                let mut breaks = vec![0.0];
                for e in fan.rays() {
                    if e[0] != 0 && x1 / e[0] as f64 > 0.0 {
                        breaks.push(x1 * e[1] as f64 / e[0] as f64);
                    }
                }
                integrate(|t| f(&[x1, t]), -l, l, &breaks, 1e-13, 1e-10).unwrap().value
            };
            integrate(inner, -l, l, &[0.0], 1e-12, 1e-9).unwrap().value
        }
        _ => unimplemented!("oracle covers dimensions 1 and 2"),
    }
}

/// Whether `v` lies in the given unimodular maximal cone.
pub fn in_cone(fan: &Fan, cone: usize, v: &[i64]) -> bool {
    let rays: Vec<Vec<i64>> = fan.max_cones()[cone].iter().map(|&j| fan.rays()[j].clone()).collect();
    let m = IntMatrix::from_cols(&rays, fan.dim());
    solve(&m, v).is_some_and(|l| l.iter().all(|&x| x >= 0))
}

pub fn random_vec(rng: &mut ChaCha8Rng, d: usize, r: i64) -> Vec<i64> {
    (0..d).map(|_| rng.gen_range(-r..=r)).collect()
}

pub fn random_point(rng: &mut ChaCha8Rng, d: usize) -> TorusPoint {
    let coords = (0..d)
        .map(|_| {
            let mut n: i64 = rng.gen_range(1..=720);
            if rng.gen() {
                n = -n;
            }
            Ratio::new(n, rng.gen_range(1..=720))
        })
        .collect();
    TorusPoint::new(coords).unwrap()
}

/// A random full-dimensional cone kept pointed by a positive functional.
pub fn random_cone(rng: &mut ChaCha8Rng, k: usize) -> PolyCone {
    loop {
        let n = rng.gen_range(k..k + 4);
        let gens: Vec<Vec<i64>> = (0..n)
            .map(|_| loop {
                let v: Vec<i64> = (0..k).map(|_| rng.gen_range(-3..=3)).collect();
                if v.iter().sum::<i64>() > 0 {
                    break v;
                }
            })
            .collect();
        if rank_of(&gens, k) == k {
            return PolyCone::new(k, gens).unwrap();
        }
    }
}

/// A strictly positive rational combination of all generators.
pub fn interior_point(rng: &mut ChaCha8Rng, c: &PolyCone) -> Vec<BigRational> {
    let mut s = vec![BigRational::zero(); c.ambient_rank()];
    for g in c.generators() {
        let w = q(rng.gen_range(1..20), rng.gen_range(1..7));
        for (x, &gi) in s.iter_mut().zip(g) {
            *x += &w * BigRational::from_integer(gi.into());
        }
    }
    s
}

/// Ray order of the dP6 fan: C1, C12, C2, C23, C3, C13.
pub fn dp6_closed_form(s: &[BigRational]) -> BigRational {
    let (s1, s12, s2, s23, s3, s13) = (&s[0], &s[1], &s[2], &s[3], &s[4], &s[5]);
    let num = s1 + s2 + s3 + s12 + s13 + s23;
    let den = (s1 + s23) * (s2 + s13) * (s3 + s12) * (s1 + s2 + s3) * (s12 + s13 + s23);
    num / den
}

/// An indecomposable block: its matrix, the order of its action, and the
/// order of its `H^1` for any cyclic group acting through it.
pub fn block(kind: usize) -> (Vec<Vec<i64>>, usize, i64) {
    match kind {
        0 => (vec![vec![1]], 1, 1),
        1 => (vec![vec![-1]], 2, 2),
        2 => (vec![vec![0, 1], vec![1, 0]], 2, 1),
        3 => (vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]], 3, 1),
        4 => (vec![vec![0, -1], vec![1, -1]], 3, 3),
        5 => (vec![vec![0, -1], vec![1, 0]], 4, 2),
        _ => (vec![vec![0, -1], vec![1, 1]], 6, 1),
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / num_integer::gcd(a, b) * b
}

/// Block-diagonal module of rank ≤ 4 and order ≤ 6, conjugated by a random
/// unimodular matrix; returns the action, group order and expected `|H^1|`.
pub fn random_module(rng: &mut ChaCha8Rng) -> (IntMatrix, usize, i64) {
    loop {
        let mut blocks = Vec::new();
        let mut rank = 0;
        let mut order = 1;
        let mut h1 = 1;
        while rank < 4 {
            let (m, o, h) = block(rng.gen_range(0..7));
            if rank + m.len() > 4 || lcm(order, o) > 6 {
                if rng.gen_bool(0.5) {
                    break;
                }
                continue;
            }
            rank += m.len();
            order = lcm(order, o);
            h1 *= h;
            blocks.push(m);
        }
        if rank == 0 {
            continue;
        }
        let mut g = IntMatrix::zeros(rank, rank);
        let mut off = 0;
        for b in &blocks {
            for (i, row) in b.iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    g[(off + i, off + j)] = x;
                }
            }
            off += b.len();
        }
        let mut u = IntMatrix::identity(rank);
        for _ in 0..8 {
            let (i, j) = (rng.gen_range(0..rank), rng.gen_range(0..rank));
            if i != j {
                let f = rng.gen_range(-2..=2);
                for c in 0..rank {
                    let v = u[(j, c)];
                    u[(i, c)] += f * v;
                }
            }
        }
        let conj = u.mul(&g).mul(&u.unimodular_inverse());
        return (conj, order, h1);
    }
}

/// `max |Y|^e` over the primitive integer vector of monomial values `x^m`.
pub fn monomial_height(x: &TorusPoint, monomials: &[Vec<i64>], exponent: u32) -> BigRational {
    let vals: Vec<BigRational> = monomials
        .iter()
        .map(|m| {
            m.iter().zip(x.coords()).fold(BigRational::one(), |acc, (&e, c)| {
                let c = BigRational::new(BigInt::from(*c.numer()), BigInt::from(*c.denom()));
                acc * num_traits::pow(if e >= 0 { c } else { c.recip() }, e.unsigned_abs() as usize)
            })
        })
        .collect();
    let lcm = vals.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
    let ints: Vec<BigInt> = vals.iter().map(|v| (v * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::from(0), |g, v| g.gcd(v));
    let h = ints.iter().map(|v| (v / &g).magnitude().clone()).max().unwrap();
    BigRational::from_integer(BigInt::from(h).pow(exponent))
}

/// dP6 points of height ≤ B counted through the hexagon embedding. The
/// monomials x^{±e_i} force num, den ≤ √B in each coordinate.
pub fn dp6_hand_count(bound: u64) -> u64 {
    let hexagon = vec![vec![1, 0], vec![0, 1], vec![-1, 1], vec![-1, 0], vec![0, -1], vec![1, -1]];
    let s = (bound as f64).sqrt() as i64 + 1;
    let mut fracs = Vec::new();
    for a in 1..=s {
        for b in 1..=s {
            if num_integer::gcd(a, b) == 1 && a * a <= bound as i64 && b * b <= bound as i64 {
                fracs.push(Ratio::new(a, b));
                fracs.push(Ratio::new(-a, b));
            }
        }
    }
    let limit = BigRational::from_integer(bound.into());
    let mut n = 0;
    for x in &fracs {
        for y in &fracs {
            let p = TorusPoint::new(vec![*x, *y]).unwrap();
            if monomial_height(&p, &hexagon, 1) <= limit {
                n += 1;
            }
        }
    }
    n
}
