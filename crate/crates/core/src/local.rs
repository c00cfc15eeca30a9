//! Local computations: the polynomial `Q_Σ`, non-archimedean integrals of
//! local heights and their Fourier transforms at unramified characters, the
//! archimedean transform, and point counts over finite fields.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::{orbits_under, Fan, GaloisGroup, OrbitDecomposition};
use crate::linalg::dot;
use crate::rational::to_f64;

/// A polynomial in one variable per orbit, with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSigmaPolynomial {
    /// Orbit lengths `d_j`.
    pub orbit_lengths: Vec<u32>,
    /// Exponent vector to coefficient; zero coefficients are not stored.
    #[serde(with = "crate::rational::decimal_map")]
    pub monomials: BTreeMap<Vec<u32>, BigInt>,
}

impl QSigmaPolynomial {
    fn constant(l: usize, c: i64, orbit_lengths: Vec<u32>) -> Self {
        let mut monomials = BTreeMap::new();
        if c != 0 {
            monomials.insert(vec![0; l], BigInt::from(c));
        }
        QSigmaPolynomial { orbit_lengths, monomials }
    }

    fn add_assign(&mut self, other: &QSigmaPolynomial) {
        for (e, c) in &other.monomials {
            let entry = self.monomials.entry(e.clone()).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                self.monomials.remove(e);
            }
        }
    }

    /// Multiplies by `a + b·u_j^{e}`.
    fn mul_binomial(&mut self, j: usize, a: i64, b: i64, e: u32) {
        let mut out: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (exp, c) in &self.monomials {
            if a != 0 {
                *out.entry(exp.clone()).or_insert_with(BigInt::zero) += c * a;
            }
            if b != 0 {
                let mut x = exp.clone();
                x[j] += e;
                *out.entry(x).or_insert_with(BigInt::zero) += c * b;
            }
        }
        out.retain(|_, c| !c.is_zero());
        self.monomials = out;
    }

    pub fn n_vars(&self) -> usize {
        self.orbit_lengths.len()
    }

    pub fn constant_term(&self) -> BigInt {
        self.monomials.get(&vec![0; self.n_vars()]).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Smallest total degree among the nonconstant monomials, if any.
    pub fn min_nonconstant_degree(&self) -> Option<u32> {
        self.monomials.keys().map(|e| e.iter().sum::<u32>()).filter(|&d| d > 0).min()
    }

    /// `Q(0) = 1` and `Q - 1` has no monomial of total degree below 2.
    pub fn has_degree_two_property(&self) -> bool {
        self.constant_term() == BigInt::one() && self.min_nonconstant_degree().is_none_or(|d| d >= 2)
    }

    pub fn evaluate(&self, u: &[BigRational]) -> BigRational {
        self.monomials
            .iter()
            .map(|(e, c)| {
                let mut t = BigRational::from_integer(c.clone());
                for (x, &k) in u.iter().zip(e) {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
                t
            })
            .sum()
    }

    pub fn evaluate_complex(&self, u: &[Complex64]) -> Complex64 {
        self.monomials
            .iter()
            .map(|(e, c)| {
                let mut t = Complex64::new(to_f64(&BigRational::from_integer(c.clone())), 0.0);
                for (x, &k) in u.iter().zip(e) {
                    t *= x.powu(k);
                }
                t
            })
            .sum()
    }

    /// Coefficients of the one-variable polynomial `Q(u, ..., u)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = Vec::new();
        for (e, c) in &self.monomials {
            let deg = e.iter().sum::<u32>() as usize;
            if out.len() <= deg {
                out.resize(deg + 1, BigInt::zero());
            }
            out[deg] += c;
        }
        out
    }
}

/// `Q_Σ` for the orbit decomposition of a decomposition group: the sum over
/// invariant cones of `Π_{j∈σ} u_j^{d_j} Π_{j∉σ} (1 - u_j^{d_j})`.
pub fn qsigma(fan: &Fan, decomposition: &OrbitDecomposition) -> Result<QSigmaPolynomial> {
    let n = fan.n_rays();
    let mut seen = vec![false; n];
    for o in &decomposition.orbits {
        for &j in o {
            if j >= n || seen[j] {
                return Err(Error::InvalidArgument("orbits do not partition the rays".into()));
            }
            seen[j] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidArgument("orbits do not partition the rays".into()));
    }
    let l = decomposition.len();
    let orbit_of = decomposition.orbit_of(n);
    let lengths: Vec<u32> = decomposition.lengths().iter().map(|&x| x as u32).collect();
    let mut q = QSigmaPolynomial::constant(l, 0, lengths.clone());
    for cone in fan.all_cones() {
        let mut hit = vec![0usize; l];
        for &j in &cone.ray_indices {
            hit[orbit_of[j]] += 1;
        }
        if (0..l).any(|o| hit[o] != 0 && hit[o] != lengths[o] as usize) {
            continue;
        }
        let mut term = QSigmaPolynomial::constant(l, 1, lengths.clone());
        for o in 0..l {
            if hit[o] > 0 {
                term.mul_binomial(o, 0, 1, lengths[o]);
            } else {
                term.mul_binomial(o, 1, -1, lengths[o]);
            }
        }
        q.add_assign(&term);
    }
    Ok(q)
}

/// Orbit decompositions of every cyclic subgroup of the Galois group
/// (the trivial subgroup included), deduplicated.
pub fn cyclic_decompositions(fan: &Fan) -> Result<Vec<OrbitDecomposition>> {
    let group = GaloisGroup::generate(fan)?;
    let mut out: Vec<OrbitDecomposition> = Vec::new();
    for g in group.elements() {
        let o = orbits_under(fan, std::slice::from_ref(g))?;
        if !out.contains(&o) {
            out.push(o);
        }
    }
    Ok(out)
}

fn split_q(fan: &Fan) -> Result<QSigmaPolynomial> {
    let singletons = OrbitDecomposition { orbits: (0..fan.n_rays()).map(|j| vec![j]).collect() };
    qsigma(fan, &singletons)
}

fn check_weights(fan: &Fan, s: &[u32]) -> Result<()> {
    if !fan.is_split() {
        return Err(Error::NonSplit);
    }
    if s.len() != fan.n_rays() {
        return Err(Error::InvalidArgument(format!("{} weights for {} rays", s.len(), fan.n_rays())));
    }
    if s.contains(&0) {
        return Err(Error::InvalidArgument("weights must be positive for convergence".into()));
    }
    Ok(())
}

fn inv_pow(p: u64, e: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p).pow(e))
}

/// The value `Σ_{n ∈ Z^d} p^{-φ_s(n)}` as a lattice sum truncated to
/// `‖n‖∞ ≤ R`, the closed form, and a certified bound on the omitted tail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalIntegral {
    #[serde(with = "crate::rational")]
    pub partial: BigRational,
    #[serde(with = "crate::rational")]
    pub closed_form: BigRational,
    pub tail_bound: f64,
}

/// `φ_s(n) = Σ s_j λ_j` where `n = Σ λ_j e_j` in a cone containing `n`.
fn phi_weights(fan: &Fan, s: &[u32], n: &[i64]) -> u64 {
    for c in 0..fan.max_cones().len() {
        let chart = fan.chart(c).expect("full-dimensional cones");
        let coords: Vec<i64> = (0..fan.dim()).map(|j| dot(chart.dual.row(j), n)).collect();
        if coords.iter().all(|&x| x >= 0) {
            return fan.max_cones()[c]
                .iter()
                .zip(&coords)
                .map(|(&ray, &lam)| s[ray] as u64 * lam as u64 / chart.abs_det as u64)
                .sum();
        }
    }
    unreachable!("complete fan covers every vector")
}

fn box_points(d: usize, r: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * r + 1) as u64;
    let total = side.pow(d as u32);
    (0..total).map(move |mut idx| {
        (0..d)
            .map(|_| {
                let x = (idx % side) as i64 - r;
                idx /= side;
                x
            })
            .collect()
    })
}

pub fn local_integral(fan: &Fan, p: u64, s: &[u32], r: u32) -> Result<LocalIntegral> {
    check_weights(fan, s)?;
    let d = fan.dim();
    let mut by_exponent: BTreeMap<u64, u64> = BTreeMap::new();
    for n in box_points(d, r as i64) {
        *by_exponent.entry(phi_weights(fan, s, &n)).or_default() += 1;
    }
    let partial: BigRational = by_exponent
        .iter()
        .map(|(&e, &count)| BigRational::from_integer(count.into()) * inv_pow(p, e as u32))
        .sum();

    let q = split_q(fan)?;
    let u: Vec<BigRational> = s.iter().map(|&x| inv_pow(p, x)).collect();
    let mut closed_form = q.evaluate(&u);
    for x in &u {
        closed_form /= BigRational::one() - x;
    }

    // φ_s(n) ≥ c‖n‖∞ with c = min s / max ‖e_j‖∞; the shell ‖n‖∞ = t has
    // at most 2d(2t+1)^{d-1} points.
    let emax = fan.rays().iter().flat_map(|e| e.iter().map(|x| x.unsigned_abs())).max().unwrap_or(1);
    let c = *s.iter().min().unwrap() as f64 / emax as f64;
    let term = |t: f64| 2.0 * d as f64 * (2.0 * t + 1.0).powi(d as i32 - 1) * (p as f64).powf(-c * t);
    let mut tail = 0.0;
    let mut t = r as f64 + 1.0;
    loop {
        let a = term(t);
        let ratio = ((2.0 * t + 3.0) / (2.0 * t + 1.0)).powi(d as i32 - 1) * (p as f64).powf(-c);
        if ratio < 1.0 && a < 1e-30 {
            // Ratios decrease in t, so the rest is below a geometric series.
            tail += a / (1.0 - ratio);
            break;
        }
        tail += a;
        t += 1.0;
    }
    Ok(LocalIntegral { partial, closed_form, tail_bound: tail * (1.0 + 1e-9) })
}

/// Both sides of the diagonal factorization at `s_j = s`. The left side
/// counts lattice points by the relatively open cone containing them,
/// `Σ_τ (u/(1-u))^{dim τ}` with `u = p^{-s}`; the right side is
/// `(1 - u)^{-d} (1 - u)^{-k} Q_Σ(u, ..., u)`.
pub fn diagonal_factorization(fan: &Fan, p: u64, s: u32) -> Result<(BigRational, BigRational)> {
    if s == 0 {
        return Err(Error::InvalidArgument("weights must be positive".into()));
    }
    let n = fan.n_rays();
    let u = inv_pow(p, s);
    let l = BigRational::one() - &u;
    let ratio = &u / &l;
    let lhs: BigRational = fan
        .face_numbers()
        .iter()
        .enumerate()
        .map(|(j, &f)| BigRational::from_integer(f.into()) * num_traits::pow(ratio.clone(), j))
        .sum();
    let q = split_q(fan)?;
    let d = fan.dim();
    let k = n - d;
    let rhs = q.evaluate(&vec![u; n]) / num_traits::pow(l.clone(), d) / num_traits::pow(l, k);
    Ok((lhs, rhs))
}

/// `Q_Σ(θ_j p^{-s_j}) / Π (1 - θ_j p^{-s_j})` for unit complex `θ_j`.
pub fn unramified_character_transform(fan: &Fan, p: u64, s: &[u32], theta: &[Complex64]) -> Result<Complex64> {
    check_weights(fan, s)?;
    if theta.len() != fan.n_rays() {
        return Err(Error::InvalidArgument("one character value per ray is required".into()));
    }
    if theta.iter().any(|t| (t.norm() - 1.0).abs() > 1e-12) {
        return Err(Error::InvalidArgument("character values must have modulus 1".into()));
    }
    let q = split_q(fan)?;
    let u: Vec<Complex64> = s.iter().zip(theta).map(|(&x, t)| t * (p as f64).powi(-(x as i32))).collect();
    let mut v = q.evaluate_complex(&u);
    for x in &u {
        v /= Complex64::new(1.0, 0.0) - x;
    }
    Ok(v)
}

/// `Σ_{‖n‖∞ ≤ R} p^{-φ_s(n)} e^{i⟨n,y⟩}`, the lattice-sum side of the
/// transform with `θ_j = e^{i⟨e_j,y⟩}`.
pub fn twisted_lattice_sum(fan: &Fan, p: u64, s: &[u32], y: &[f64], r: u32) -> Result<Complex64> {
    check_weights(fan, s)?;
    let mut total = Complex64::new(0.0, 0.0);
    for n in box_points(fan.dim(), r as i64) {
        let e = phi_weights(fan, s, &n);
        let angle: f64 = n.iter().zip(y).map(|(&a, b)| a as f64 * b).sum();
        total += Complex64::from_polar((p as f64).powi(-(e as i32)), angle);
    }
    Ok(total)
}

/// Character values `θ_j = e^{i⟨e_j, y⟩}`.
pub fn characters_from(fan: &Fan, y: &[f64]) -> Vec<Complex64> {
    fan.rays()
        .iter()
        .map(|e| Complex64::from_polar(1.0, e.iter().zip(y).map(|(&a, b)| a as f64 * b).sum()))
        .collect()
}

pub type ComplexRational = Complex<BigRational>;

/// `Σ_{σ maximal} Π_{e_j ∈ σ} 1/(s_j + i⟨e_j, y⟩)`, exactly.
pub fn archimedean_transform(fan: &Fan, s: &[BigRational], y: &[BigRational]) -> Result<ComplexRational> {
    if s.len() != fan.n_rays() || y.len() != fan.dim() {
        return Err(Error::InvalidArgument("weights or frequency have the wrong length".into()));
    }
    if s.iter().any(|x| !x.is_positive()) {
        return Err(Error::InvalidArgument("weights must be positive".into()));
    }
    let mut total = ComplexRational::new(BigRational::zero(), BigRational::zero());
    for (c, cone) in fan.max_cones().iter().enumerate() {
        let mut den = ComplexRational::new(BigRational::one(), BigRational::zero());
        for &j in cone {
            let im: BigRational = fan.rays()[j]
                .iter()
                .zip(y)
                .map(|(&a, b)| b * BigRational::from_integer(a.into()))
                .sum();
            let f = ComplexRational::new(s[j].clone(), im);
            if f.re.is_zero() && f.im.is_zero() {
                return Err(Error::Pole(format!("factor for ray {j} vanishes in cone {c}")));
            }
            den *= f;
        }
        total += ComplexRational::new(BigRational::one(), BigRational::zero()) / den;
    }
    Ok(total)
}

/// Floating-point version of [`archimedean_transform`].
pub fn archimedean_transform_f64(fan: &Fan, s: &[f64], y: &[f64]) -> Complex64 {
    fan.max_cones()
        .iter()
        .map(|cone| {
            let den: Complex64 = cone
                .iter()
                .map(|&j| {
                    let im: f64 = fan.rays()[j].iter().zip(y).map(|(&a, b)| a as f64 * b).sum();
                    Complex64::new(s[j], im)
                })
                .product();
            den.inv()
        })
        .sum()
}

/// Least-squares slope of `log |transform(t·y)|` against `log t` over the
/// dyadic points `t = 2^a, ..., 2^b`.
pub fn archimedean_decay_slope(fan: &Fan, s: &[f64], direction: &[f64], a: i32, b: i32) -> f64 {
    let pts: Vec<(f64, f64)> = (a..=b)
        .map(|e| {
            let t = 2f64.powi(e);
            let y: Vec<f64> = direction.iter().map(|x| x * t).collect();
            (t.ln(), archimedean_transform_f64(fan, s, &y).norm().ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Point count of the toric variety over `F_p` and the local density.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDensity {
    pub prime: u64,
    #[serde(with = "crate::rational::decimal")]
    pub point_count: BigInt,
    #[serde(with = "crate::rational")]
    pub density: BigRational,
    #[serde(with = "crate::rational")]
    pub convergence_factor: BigRational,
}

impl LocalDensity {
    /// `density · convergence_factor`, the Euler factor at `p`.
    pub fn factor(&self) -> BigRational {
        &self.density * &self.convergence_factor
    }
}

/// `Σ_σ (p-1)^{d - dim σ}`, with density `count/p^d` and factor `(1-1/p)^k`.
pub fn point_count_fp(fan: &Fan, p: u64) -> Result<LocalDensity> {
    if !fan.is_split() {
        return Err(Error::NonSplit);
    }
    let d = fan.dim();
    let faces = fan.face_numbers();
    let pm1 = BigInt::from(p - 1);
    let point_count: BigInt = faces.iter().enumerate().map(|(j, &c)| BigInt::from(c) * pm1.pow((d - j) as u32)).sum();
    let density = BigRational::new(point_count.clone(), BigInt::from(p).pow(d as u32));
    let k = fan.n_rays() - d;
    let convergence_factor = num_traits::pow(BigRational::one() - inv_pow(p, 1), k);
    Ok(LocalDensity { prime: p, point_count, density, convergence_factor })
}
