//! Characteristic functions `X_Λ(s) = ∫_{Λ*} e^{-⟨s,y⟩} dy` of polyhedral
//! cones as exact rational functions, the constant α, and numerical checks
//! of the fibre-integration identity for quotients of cones.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::linalg::{dot, gcd_of, primitive, quotient_by_primitive, rank_of, IntMatrix};
use crate::picard::{coordinates_in, invariant_pic_basis, picard_data, sublattice_index, PicardLattice};
use crate::polyhedral::{extreme_rays, placing_triangulation};
use crate::quadrature::{integrate_symmetric, Estimate};
use crate::rational::to_f64;

/// A full-dimensional pointed cone in `Z^k ⊗ R`, given by generators
/// (stored sorted and deduplicated).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyCone {
    k: usize,
    generators: Vec<Vec<i64>>,
}

impl PolyCone {
    pub fn new(k: usize, generators: Vec<Vec<i64>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("ambient rank must be positive".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.len() != k) {
            return Err(Error::InvalidArgument(format!("generator {g:?} does not have length {k}")));
        }
        let mut generators: Vec<Vec<i64>> =
            generators.into_iter().filter(|g| g.iter().any(|&x| x != 0)).collect();
        generators.sort();
        generators.dedup();
        let rank = rank_of(&generators, k);
        if rank < k {
            return Err(Error::NotFullDimensional { rank, dim: k });
        }
        let cone = PolyCone { k, generators };
        // A strictly positive functional certifies Λ ∩ -Λ = 0.
        let dual = cone.dual_rays()?;
        if rank_of(&dual, k) < k {
            return Err(Error::NotPointed);
        }
        let w: Vec<i64> = (0..k).map(|i| dual.iter().map(|r| r[i]).sum()).collect();
        if cone.generators.iter().any(|g| dot(g, &w) <= 0) {
            return Err(Error::NotPointed);
        }
        Ok(cone)
    }

    pub fn ambient_rank(&self) -> usize {
        self.k
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn orthant(k: usize) -> Self {
        let gens = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
        PolyCone::new(k, gens).expect("orthant is pointed")
    }

    fn dual_rays(&self) -> Result<Vec<Vec<i64>>> {
        extreme_rays(&self.generators, self.k)
    }

    /// Primitive generators of the extreme rays.
    pub fn extreme_rays(&self) -> Result<Vec<Vec<i64>>> {
        let dual = self.dual_rays()?;
        extreme_rays(&dual, self.k)
    }

    /// Whether `s` lies in the interior of the cone.
    pub fn contains_interior(&self, s: &[BigRational]) -> Result<bool> {
        Ok(self.dual_rays()?.iter().all(|f| eval_form(f, s).is_positive()))
    }
}

/// `Λ* = {y : ⟨s, y⟩ ≥ 0 for all s ∈ Λ}`.
pub fn dual_cone(c: &PolyCone) -> Result<PolyCone> {
    PolyCone::new(c.k, c.dual_rays()?)
}

fn eval_form(f: &[i64], s: &[BigRational]) -> BigRational {
    f.iter().zip(s).map(|(&a, x)| x * BigRational::from_integer(BigInt::from(a))).sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "crate::rational")]
    pub coeff: BigRational,
    pub forms: Vec<Vec<i64>>,
}

/// `Σ coeff / Π ⟨form, s⟩`, homogeneous of degree `-k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeRationalFunction {
    pub terms: Vec<Term>,
}

impl ConeRationalFunction {
    pub fn evaluate(&self, s: &[BigRational]) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for t in &self.terms {
            let mut den = BigRational::from_integer(1.into());
            for f in &t.forms {
                let v = eval_form(f, s);
                if v.is_zero() {
                    return Err(Error::Pole(format!("form {f:?} vanishes")));
                }
                den *= v;
            }
            total += &t.coeff / den;
        }
        Ok(total)
    }

    pub fn evaluate_complex(&self, s: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                let den: Complex64 = t
                    .forms
                    .iter()
                    .map(|f| f.iter().zip(s).map(|(&a, z)| z * a as f64).sum::<Complex64>())
                    .product();
                to_f64(&t.coeff) / den
            })
            .sum()
    }

    /// Certified bound for `∫_{|y|>Y} |X(a + i(b + yγ))| dy`, valid once
    /// `Y ≥ 2|⟨f,b⟩|/|⟨f,γ⟩|` for every form; `None` if some term decays
    /// slower than `|y|^{-2}` or that threshold exceeds `Y`.
    pub fn tail_bound(&self, a: &[f64], b: &[f64], gamma: &[i64], y: f64) -> Option<f64> {
        let mut total = 0.0;
        for t in &self.terms {
            let mut m = 0i32;
            let mut c = to_f64(&t.coeff).abs();
            for f in &t.forms {
                let fg = dot(f, gamma) as f64;
                let fa: f64 = f.iter().zip(a).map(|(&x, v)| x as f64 * v).sum();
                let fb: f64 = f.iter().zip(b).map(|(&x, v)| x as f64 * v).sum();
                if fg == 0.0 {
                    if fa <= 0.0 {
                        return None;
                    }
                    c /= fa;
                } else {
                    if y < 2.0 * fb.abs() / fg.abs() {
                        return None;
                    }
                    // |fa + i(fb + y fg)| ≥ |y fg| / 2 beyond the threshold.
                    c /= fg.abs() / 2.0;
                    m += 1;
                }
            }
            if m < 2 {
                return None;
            }
            total += 2.0 * c * y.powi(1 - m) / f64::from(m - 1);
        }
        // Slack for rounding in the f64 evaluation of the bound itself.
        Some(total * (1.0 + 1e-12))
    }
}

/// The characteristic function via the placing triangulation of the dual
/// cone in its natural generator order.
pub fn xfunction(c: &PolyCone) -> Result<ConeRationalFunction> {
    let n = c.dual_rays()?.len();
    xfunction_with_order(c, &(0..n).collect::<Vec<_>>())
}

/// As [`xfunction`], inserting the dual generators in the given order.
pub fn xfunction_with_order(c: &PolyCone, order: &[usize]) -> Result<ConeRationalFunction> {
    let rays = c.dual_rays()?;
    if rank_of(&rays, c.k) < c.k {
        return Err(Error::NotPointed);
    }
    let simplices = placing_triangulation(&rays, c.k, order);
    let terms = simplices
        .into_iter()
        .map(|s| {
            let forms: Vec<Vec<i64>> = s.iter().map(|&i| rays[i].clone()).collect();
            let det = IntMatrix::from_rows(&forms, c.k).det().abs();
            Term { coeff: BigRational::from_integer(det.into()), forms }
        })
        .collect();
    Ok(ConeRationalFunction { terms })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaReport {
    #[serde(with = "crate::rational")]
    pub alpha: BigRational,
    /// Rank of the invariant Picard lattice.
    pub k: usize,
    /// Effective generators in a basis of the invariant Picard lattice.
    pub generators: Vec<Vec<i64>>,
    /// Anticanonical class in the same basis.
    pub anticanonical: Vec<i64>,
    /// Index of the sublattice spanned by the effective generators.
    pub effective_index: u64,
    pub xfunction: ConeRationalFunction,
}

/// `α = X_{Λ_eff}(-K)` on the invariant Picard lattice with its own lattice
/// normalization.
pub fn alpha(fan: &Fan) -> Result<AlphaReport> {
    let pic = PicardLattice::new(fan)?;
    let data = match picard_data(fan) {
        Ok(d) => d,
        Err(Error::NonCyclicGroup { .. }) => {
            // Ranks and classes do not need cohomology; recompute them alone.
            return alpha_from_classes(fan, &pic, &eff_classes(fan, &pic)?);
        }
        Err(e) => return Err(e),
    };
    alpha_from_classes(fan, &pic, &(data.eff_generators, data.anticanonical))
}

fn eff_classes(fan: &Fan, pic: &PicardLattice) -> Result<(Vec<Vec<i64>>, Vec<i64>)> {
    let orbits = crate::fan::galois_orbits(fan)?;
    let gens = orbits
        .orbits
        .iter()
        .map(|o| {
            let mut x = vec![0; fan.n_rays()];
            o.iter().for_each(|&j| x[j] = 1);
            pic.class(&x)
        })
        .collect();
    Ok((gens, pic.class(&vec![1; fan.n_rays()])))
}

fn alpha_from_classes(fan: &Fan, pic: &PicardLattice, classes: &(Vec<Vec<i64>>, Vec<i64>)) -> Result<AlphaReport> {
    let basis = invariant_pic_basis(fan, pic)?;
    let k = basis.len();
    let generators: Vec<Vec<i64>> =
        classes.0.iter().map(|g| coordinates_in(&basis, g)).collect::<Result<_>>()?;
    let anticanonical = coordinates_in(&basis, &classes.1)?;
    let cone = PolyCone::new(k, generators.clone())?;
    let ac: Vec<BigRational> = anticanonical.iter().map(|&x| BigRational::from_integer(x.into())).collect();
    if !cone.contains_interior(&ac)? {
        return Err(Error::AnticanonicalNotInterior);
    }
    let xf = xfunction(&cone)?;
    let alpha = xf.evaluate(&ac)?;
    let effective_index = sublattice_index(&generators, k)?;
    Ok(AlphaReport { alpha, k, generators, anticanonical, effective_index, xfunction: xf })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DescentResidual {
    pub quadrature: f64,
    pub exact: BigRational,
    pub residual: f64,
    /// Quadrature error estimate plus the certified truncation tail.
    pub error_bound: f64,
}

const TAIL_TARGET: f64 = 1e-9;

fn check_gamma(gamma: &[i64], k: usize) -> Result<()> {
    if gamma.len() != k {
        return Err(Error::InvalidArgument(format!("direction has length {} != {k}", gamma.len())));
    }
    match gcd_of(gamma) {
        0 => Err(Error::InvalidArgument("direction is zero".into())),
        1 => Ok(()),
        g => Err(Error::InvalidArgument(format!("direction is not primitive (gcd {g})"))),
    }
}

/// Image of a cone and a point under the quotient by `Zγ`.
pub fn quotient_cone(c: &PolyCone, gamma: &[i64]) -> Result<(PolyCone, IntMatrix)> {
    check_gamma(gamma, c.k)?;
    let u = quotient_by_primitive(gamma).expect("primitive");
    let mut gens: Vec<Vec<i64>> = c
        .generators
        .iter()
        .map(|g| primitive(&u.mul_vec(g)[1..]))
        .filter(|g| g.iter().any(|&x| x != 0))
        .collect();
    gens.sort();
    gens.dedup();
    Ok((PolyCone::new(c.k - 1, gens)?, u))
}

fn project_rational(u: &IntMatrix, s: &[BigRational]) -> Vec<BigRational> {
    (1..u.rows()).map(|i| eval_form(u.row(i), s)).collect()
}

/// Truncation point with certified tail below the target.
fn truncation(xf: &ConeRationalFunction, a: &[f64], b: &[f64], gamma: &[i64]) -> Result<(f64, f64)> {
    let mut y = 8.0;
    while y < 1e12 {
        if let Some(t) = xf.tail_bound(a, b, gamma, y) {
            if t / (2.0 * PI) < TAIL_TARGET {
                return Ok((y, t / (2.0 * PI)));
            }
        }
        y *= 2.0;
    }
    Err(Error::InvalidArgument("integrand does not decay fast enough for a certified tail".into()))
}

/// `(1/2π) ∫ X(a + i(b + yγ)) dy` with its error bound.
fn fibre_integral(xf: &ConeRationalFunction, a: &[f64], b: &[f64], gamma: &[i64]) -> Result<Estimate<Complex64>> {
    let (y_max, tail) = truncation(xf, a, b, gamma)?;
    let f = |y: f64| {
        let z: Vec<Complex64> =
            (0..a.len()).map(|i| Complex64::new(a[i], b[i] + y * gamma[i] as f64)).collect();
        xf.evaluate_complex(&z)
    };
    let est = integrate_symmetric(f, y_max, 1e-12, 1e-12)?;
    Ok(Estimate { value: est.value / (2.0 * PI), error: est.error / (2.0 * PI) + tail })
}

/// `|(1/2π)∫ X_Λ(s + iyγ) dy - X_{Λ/γ}(ψ(s))|` for an interior point `s`.
pub fn descent_check(c: &PolyCone, gamma: &[i64], s: &[BigRational]) -> Result<DescentResidual> {
    let (quot, u) = quotient_cone(c, gamma)?;
    if !c.contains_interior(s)? {
        return Err(Error::InvalidArgument("evaluation point is not interior".into()));
    }
    let exact = xfunction(&quot)?.evaluate(&project_rational(&u, s))?;
    let xf = xfunction(c)?;
    let a: Vec<f64> = s.iter().map(to_f64).collect();
    let est = fibre_integral(&xf, &a, &vec![0.0; a.len()], gamma)?;
    let residual = (est.value.re - to_f64(&exact)).abs().max(est.value.im.abs());
    Ok(DescentResidual { quadrature: est.value.re, exact, residual, error_bound: est.error })
}

/// Two successive quotients, by `γ₁` and then by the image of `γ₂`, each as
/// a one-dimensional contour integral.
pub fn descent_check_twice(
    c: &PolyCone,
    gamma1: &[i64],
    gamma2: &[i64],
    s: &[BigRational],
) -> Result<DescentResidual> {
    let (mid, u1) = quotient_cone(c, gamma1)?;
    check_gamma(gamma2, c.k)?;
    let g2: Vec<i64> = u1.mul_vec(gamma2)[1..].to_vec();
    let (last, u2) = quotient_cone(&mid, &g2)?;
    if !c.contains_interior(s)? {
        return Err(Error::InvalidArgument("evaluation point is not interior".into()));
    }
    let s_mid = project_rational(&u1, s);
    let exact = xfunction(&last)?.evaluate(&project_rational(&u2, &s_mid))?;

    let inner_xf = xfunction(c)?;
    let mid_xf = xfunction(&mid)?;
    let a: Vec<f64> = s.iter().map(to_f64).collect();
    let a_mid: Vec<f64> = s_mid.iter().map(to_f64).collect();
    let (y_max, outer_tail) = truncation(&mid_xf, &a_mid, &vec![0.0; a_mid.len()], &g2)?;

    let inner_err = std::cell::Cell::new(0.0f64);
    let failure = std::cell::Cell::new(None);
    let outer = |y2: f64| {
        let b: Vec<f64> = gamma2.iter().map(|&g| y2 * g as f64).collect();
        match fibre_integral(&inner_xf, &a, &b, gamma1) {
            Ok(e) => {
                inner_err.set(inner_err.get().max(e.error));
                e.value
            }
            Err(err) => {
                failure.set(Some(err));
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let est = integrate_symmetric(outer, y_max, 1e-10, 1e-10)?;
    if let Some(err) = failure.take() {
        return Err(err);
    }
    let value = est.value / (2.0 * PI);
    // The inner error is uniform in y₂, so it integrates to at most 2·y_max·err/2π.
    let error_bound = est.error / (2.0 * PI) + outer_tail + inner_err.get() * y_max / PI;
    let residual = (value.re - to_f64(&exact)).abs().max(value.im.abs());
    Ok(DescentResidual { quadrature: value.re, exact, residual, error_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn orthant_dual_and_xfunction() {
        let c = PolyCone::orthant(3);
        assert_eq!(dual_cone(&c).unwrap(), c);
        let x = xfunction(&c).unwrap();
        assert_eq!(x.evaluate(&[q(1, 1), q(2, 1), q(3, 1)]).unwrap(), q(1, 6));
    }

    #[test]
    fn two_dimensional_dual() {
        let c = PolyCone::new(2, vec![vec![1, 0], vec![1, 2]]).unwrap();
        assert_eq!(dual_cone(&c).unwrap().generators(), &[vec![0, 1], vec![2, -1]]);
    }

    #[test]
    fn unimodular_dual_is_inverse_transpose() {
        // Generators are the rows of U, so the dual is spanned by the
        // columns of U^{-1}.
        let u = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]], 2);
        let c = PolyCone::new(2, u.to_rows()).unwrap();
        let inv = u.unimodular_inverse();
        let mut cols: Vec<Vec<i64>> = (0..2).map(|j| inv.col(j)).collect();
        cols.sort();
        assert_eq!(dual_cone(&c).unwrap().generators(), cols.as_slice());
    }

    #[test]
    fn not_pointed_and_not_full() {
        assert_eq!(PolyCone::new(2, vec![vec![1, 0], vec![-1, 0], vec![0, 1]]).unwrap_err(), Error::NotPointed);
        assert_eq!(
            PolyCone::new(2, vec![vec![1, 1]]).unwrap_err(),
            Error::NotFullDimensional { rank: 1, dim: 2 }
        );
    }

    #[test]
    fn zero_direction_rejected() {
        let c = PolyCone::orthant(2);
        assert!(matches!(descent_check(&c, &[0, 0], &[q(1, 1), q(2, 1)]), Err(Error::InvalidArgument(_))));
        assert!(matches!(descent_check(&c, &[2, -2], &[q(1, 1), q(2, 1)]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn orthant_quotient() {
        let c = PolyCone::orthant(2);
        let r = descent_check(&c, &[1, -1], &[q(1, 1), q(2, 1)]).unwrap();
        assert_eq!(r.exact, q(1, 3));
        assert!(r.residual < 1e-6, "{r:?}");
    }

    #[test]
    fn json_shape() {
        let x = xfunction(&PolyCone::orthant(1)).unwrap();
        assert_eq!(serde_json::to_string(&x).unwrap(), r#"{"terms":[{"coeff":"1/1","forms":[[1]]}]}"#);
    }
}
