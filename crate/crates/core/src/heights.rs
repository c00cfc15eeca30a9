//! Exact local and global heights of rational points of a split torus.
//!
//! At a prime `p` the point `x` maps to the cocharacter `(-v_p(x_i))_i`, so
//! that `H_p(x) = p^{φ(-v_p(x))}`; at the real place `x` maps to
//! `(log |x_i|)_i`. With this convention the product formula holds and the
//! anticanonical height on the projective line is `max(|a|, |b|)^2`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::picard::{pl_evaluate_int, pl_evaluate_multiplicative, pow_signed, PlFunction};

/// A point of `(Q^*)^d`, coordinates in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusPoint {
    #[serde(with = "crate::rational::small_vec")]
    coords: Vec<Ratio<i64>>,
}

impl TorusPoint {
    pub fn new(coords: Vec<Ratio<i64>>) -> Result<Self> {
        if coords.iter().any(|c| *c.numer() == 0) {
            return Err(Error::ZeroCoordinate);
        }
        Ok(TorusPoint { coords })
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self> {
        if pairs.iter().any(|&(_, d)| d == 0) {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Self::new(pairs.iter().map(|&(n, d)| Ratio::new(n, d)).collect())
    }

    pub fn coords(&self) -> &[Ratio<i64>] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Primes dividing some numerator or denominator.
    pub fn support(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self
            .coords
            .iter()
            .flat_map(|c| {
                let mut v = prime_factors(c.numer().unsigned_abs());
                v.extend(prime_factors(c.denom().unsigned_abs()));
                v
            })
            .collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Place {
    Prime(u64),
    Infinite,
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn valuation(mut n: u64, p: u64) -> i64 {
    let mut v = 0;
    while n != 0 && n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

fn check(fan: &Fan, phi: &PlFunction, x: &TorusPoint) -> Result<()> {
    if !fan.is_split() {
        return Err(Error::NonSplit);
    }
    if x.dim() != fan.dim() {
        return Err(Error::InvalidArgument(format!("point has {} coordinates, fan dimension {}", x.dim(), fan.dim())));
    }
    if phi.integer_values().is_none() {
        return Err(Error::InvalidArgument("heights need an integer PL function".into()));
    }
    Ok(())
}

/// Image of `x` in the cocharacter lattice at the prime `p`.
pub fn cocharacter_at(x: &TorusPoint, p: u64) -> Vec<i64> {
    x.coords
        .iter()
        .map(|c| valuation(c.denom().unsigned_abs(), p) - valuation(c.numer().unsigned_abs(), p))
        .collect()
}

pub fn local_height(fan: &Fan, phi: &PlFunction, x: &TorusPoint, place: Place) -> Result<BigRational> {
    check(fan, phi, x)?;
    match place {
        Place::Prime(p) => {
            if p < 2 || prime_factors(p) != vec![p] {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
            let e = pl_evaluate_int(fan, phi, &cocharacter_at(x, p))?;
            let e = i64::try_from(e.to_integer()).map_err(|_| Error::InvalidArgument("exponent overflow".into()))?;
            Ok(pow_signed(&BigRational::from_integer(BigInt::from(p)), e))
        }
        Place::Infinite => {
            let q: Vec<Ratio<i64>> = x.coords.iter().map(|c| c.abs()).collect();
            pl_evaluate_multiplicative(fan, phi, &q)
        }
    }
}

/// Product of the local heights over all places.
pub fn global_height(fan: &Fan, phi: &PlFunction, x: &TorusPoint) -> Result<BigRational> {
    let mut h = local_height(fan, phi, x, Place::Infinite)?;
    for p in x.support() {
        h *= local_height(fan, phi, x, Place::Prime(p))?;
    }
    Ok(h)
}

pub fn anticanonical_height(fan: &Fan, x: &TorusPoint) -> Result<BigRational> {
    global_height(fan, &PlFunction::anticanonical(fan), x)
}

/// `Σ_{H(x) ≤ B} H(x)^{-s}` over the points of bounded anticanonical height.
pub fn height_zeta_partial(fan: &Fan, s: f64, bound: u64, budget: f64) -> Result<f64> {
    if bound < 1 {
        return Ok(0.0);
    }
    let points = crate::counter::enumerate_naive(fan, bound, budget, crate::exec::Execution::Sequential)?;
    let mut terms: Vec<f64> = points
        .iter()
        .map(|p| crate::rational::to_f64(&p.height).powf(-s))
        .collect();
    // Smallest first for a stable sum.
    terms.sort_by(f64::total_cmp);
    Ok(terms.iter().sum())
}

/// Height of a primitive integer vector: `max |Y_i|`.
pub fn max_norm_height(y: &[BigInt]) -> BigInt {
    let g = y.iter().fold(BigInt::from(0), |g, v| g.gcd(v));
    y.iter().map(|v| (v / &g).abs()).max().unwrap_or_else(BigInt::one)
}
