//! Piecewise-linear functions, the Picard lattice with its Galois action,
//! and cohomology of cyclic groups acting on lattices.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::{galois_orbits, ray_permutation, ConeQuery, Fan, GaloisGroup, OrbitDecomposition};
use crate::linalg::{kernel_basis, smith, solve, IntMatrix};

/// A function on the support of the fan, linear on each cone, given by its
/// values at the rays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlFunction {
    #[serde(with = "crate::rational::vec")]
    pub values: Vec<BigRational>,
}

impl PlFunction {
    pub fn from_ints(values: &[i64]) -> Self {
        PlFunction { values: values.iter().map(|&v| BigRational::from_integer(v.into())).collect() }
    }

    pub fn anticanonical(fan: &Fan) -> Self {
        Self::from_ints(&vec![1; fan.n_rays()])
    }

    pub fn zero(fan: &Fan) -> Self {
        Self::from_ints(&vec![0; fan.n_rays()])
    }

    /// The globally linear function `n ↦ ⟨m, n⟩`.
    pub fn linear(fan: &Fan, m: &[i64]) -> Self {
        Self::from_ints(&fan.rays().iter().map(|e| crate::linalg::dot(m, e)).collect::<Vec<_>>())
    }

    pub fn add(&self, other: &PlFunction) -> PlFunction {
        PlFunction { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    /// Integer values, if all values are integers.
    pub fn integer_values(&self) -> Option<Vec<i64>> {
        self.values
            .iter()
            .map(|v| if v.is_integer() { i64::try_from(v.to_integer()).ok() } else { None })
            .collect()
    }

    fn check_len(&self, fan: &Fan) -> Result<()> {
        if self.values.len() != fan.n_rays() {
            return Err(Error::InvalidArgument(format!(
                "PL function has {} values for {} rays",
                self.values.len(),
                fan.n_rays()
            )));
        }
        Ok(())
    }
}

/// The linear form agreeing with `phi` on maximal cone `cone`.
pub fn linear_form_on(fan: &Fan, phi: &PlFunction, cone: usize) -> Result<Vec<BigRational>> {
    phi.check_len(fan)?;
    let chart = fan
        .chart(cone)
        .ok_or_else(|| Error::MalformedFan(format!("maximal cone {cone} is not full-dimensional")))?;
    let d = fan.dim();
    let det = BigRational::from_integer(chart.abs_det.into());
    let mut m = vec![BigRational::zero(); d];
    for (j, &ray) in fan.max_cones()[cone].iter().enumerate() {
        // Row j of the chart is dual to the j-th ray of the (sorted) cone.
        let coeff = &phi.values[ray] / &det;
        for (i, mi) in m.iter_mut().enumerate() {
            *mi += &coeff * BigRational::from_integer(chart.dual[(j, i)].into());
        }
    }
    Ok(m)
}

/// Integer linear form on a maximal cone; errors if `phi` is not integral
/// there (it always is on a regular cone for integer `phi`).
pub fn integer_linear_form_on(fan: &Fan, phi: &PlFunction, cone: usize) -> Result<Vec<i64>> {
    linear_form_on(fan, phi, cone)?
        .into_iter()
        .map(|x| {
            if x.is_integer() {
                i64::try_from(x.to_integer()).map_err(|_| Error::InvalidArgument("linear form overflows".into()))
            } else {
                Err(Error::InvalidArgument("PL function is not integral on this cone".into()))
            }
        })
        .collect()
}

/// Value of `phi` at a rational vector.
pub fn pl_evaluate(fan: &Fan, phi: &PlFunction, v: &[BigRational]) -> Result<BigRational> {
    let cone = fan.locate_cone(&ConeQuery::Rational(v))?;
    let m = linear_form_on(fan, phi, cone)?;
    Ok(m.iter().zip(v).map(|(a, b)| a * b).sum())
}

/// Value of `phi` at an integer vector.
pub fn pl_evaluate_int(fan: &Fan, phi: &PlFunction, v: &[i64]) -> Result<BigRational> {
    pl_evaluate(fan, phi, &crate::fan::to_rational(v))
}

/// `exp(phi(log q))` for positive rationals `q`, exact for integral `phi`.
pub fn pl_evaluate_multiplicative(fan: &Fan, phi: &PlFunction, q: &[Ratio<i64>]) -> Result<BigRational> {
    let cone = fan.locate_cone(&ConeQuery::Multiplicative(q))?;
    let m = integer_linear_form_on(fan, phi, cone)?;
    let mut out = BigRational::one();
    for (&e, x) in m.iter().zip(q) {
        let x = BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()));
        out *= pow_signed(&x, e);
    }
    Ok(out)
}

pub(crate) fn pow_signed(x: &BigRational, e: i64) -> BigRational {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// `Pic = Z^n / E Z^d` where `E` has the rays as rows, with explicit
/// coordinates: `U E V = D` and the class of `x` is `(U x)[d..]`.
#[derive(Clone, Debug)]
pub struct PicardLattice {
    n: usize,
    d: usize,
    u: IntMatrix,
    u_inv: IntMatrix,
}

impl PicardLattice {
    pub fn new(fan: &Fan) -> Result<Self> {
        let (n, d) = (fan.n_rays(), fan.dim());
        let e = IntMatrix::from_rows(fan.rays(), d);
        let s = smith(&e);
        if s.rank != d {
            return Err(Error::Lattice("rays do not span the lattice".into()));
        }
        if s.factors.iter().any(|&f| f != 1) {
            return Err(Error::Lattice(format!(
                "Picard group has torsion (invariant factors {:?})",
                s.factors
            )));
        }
        Ok(PicardLattice { n, d, u: s.u, u_inv: s.u_inv })
    }

    pub fn rank(&self) -> usize {
        self.n - self.d
    }

    /// Class of a divisor `Σ x_j D_j`.
    pub fn class(&self, x: &[i64]) -> Vec<i64> {
        self.u.mul_vec(x)[self.d..].to_vec()
    }

    /// Class of a rational divisor.
    pub fn class_rational(&self, x: &[BigRational]) -> Vec<BigRational> {
        (self.d..self.n)
            .map(|i| {
                self.u
                    .row(i)
                    .iter()
                    .zip(x)
                    .map(|(&a, b)| b * BigRational::from_integer(a.into()))
                    .sum()
            })
            .collect()
    }

    /// A divisor representing a class.
    pub fn lift(&self, c: &[i64]) -> Vec<i64> {
        let mut y = vec![0; self.n];
        y[self.d..].copy_from_slice(c);
        self.u_inv.mul_vec(&y)
    }

    /// Matrix of the action on Pic induced by a permutation of the rays.
    pub fn induced_action(&self, perm: &[usize]) -> IntMatrix {
        let k = self.rank();
        let cols: Vec<Vec<i64>> = (0..k)
            .map(|j| {
                let mut c = vec![0; k];
                c[j] = 1;
                let x = self.lift(&c);
                let mut y = vec![0; self.n];
                for (i, &xi) in x.iter().enumerate() {
                    y[perm[i]] += xi;
                }
                self.class(&y)
            })
            .collect();
        IntMatrix::from_cols(&cols, k)
    }
}

/// The contragredient action `(g^{-1})^T` on `M`.
pub fn dual_action(g: &IntMatrix) -> IntMatrix {
    g.unimodular_inverse().transpose()
}

/// Invariant factors (> 1) of `H^1(⟨g⟩, L)` computed as `ker N / im(g - 1)`.
pub fn h1_cyclic(g: &IntMatrix, order: usize) -> Vec<i64> {
    let r = g.rows();
    let mut norm = IntMatrix::zeros(r, r);
    let mut p = IntMatrix::identity(r);
    for _ in 0..order {
        for i in 0..r {
            for j in 0..r {
                norm[(i, j)] += p[(i, j)];
            }
        }
        p = g.mul(&p);
    }
    let ker = kernel_basis(&norm);
    if ker.is_empty() {
        return Vec::new();
    }
    let kmat = IntMatrix::from_cols(&ker, r);
    let diff = g.sub_identity();
    let coords: Vec<Vec<i64>> = (0..r)
        .map(|j| solve(&kmat, &diff.col(j)).expect("image of g - 1 lies in the kernel of the norm"))
        .collect();
    let c = IntMatrix::from_cols(&coords, ker.len());
    let s = smith(&c);
    assert_eq!(s.rank, ker.len(), "H^1 of a finite group on a lattice is finite");
    s.factors.into_iter().filter(|&f| f > 1).collect()
}

/// The same group computed as the torsion of `coker(g - 1)`; the kernel of
/// the norm is the saturation of `im(g - 1)`.
pub fn h1_cyclic_via_coinvariants(g: &IntMatrix) -> Vec<i64> {
    smith(&g.sub_identity()).factors.into_iter().filter(|&f| f > 1).collect()
}

/// `H^1` of the group generated by `gens` on a lattice, as invariant factors.
fn h1_of_group(group: &GaloisGroup, action: impl Fn(&IntMatrix) -> IntMatrix) -> Result<Vec<i64>> {
    if group.order() == 1 {
        return Ok(Vec::new());
    }
    let g = group.cyclic_generator().ok_or(Error::NonCyclicGroup { order: group.order() })?;
    Ok(h1_cyclic(&action(&g), group.order()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PicardData {
    /// Rank of Pic over the splitting field, `n - d`.
    pub rank_split: usize,
    /// Rank of the Galois-invariant Picard group, `r - t`.
    pub rank_k: usize,
    /// Rank of the invariant characters `M^G`.
    pub t: usize,
    pub orbits: OrbitDecomposition,
    /// Classes of the orbit-sum divisors in the Pic coordinates.
    pub eff_generators: Vec<Vec<i64>>,
    /// Class of the anticanonical divisor (all coefficients 1).
    pub anticanonical: Vec<i64>,
    pub h1_gm: Vec<i64>,
    pub h1_gpic: Vec<i64>,
    pub group_order: usize,
}

impl PicardData {
    /// `h(T) = |H^1(G, M)|`.
    pub fn h_t(&self) -> u64 {
        self.h1_gm.iter().map(|&f| f as u64).product()
    }

    /// `β = |H^1(G, Pic)|`.
    pub fn beta(&self) -> u64 {
        self.h1_gpic.iter().map(|&f| f as u64).product()
    }
}

/// Galois action on Pic for each generator of the fan's group.
pub fn pic_actions(fan: &Fan, pic: &PicardLattice) -> Result<Vec<IntMatrix>> {
    fan.galois()
        .iter()
        .map(|g| {
            ray_permutation(fan, g)
                .map(|perm| pic.induced_action(&perm))
                .ok_or_else(|| Error::IncompatibleAction("matrix does not permute the rays".into()))
        })
        .collect()
}

pub fn picard_data(fan: &Fan) -> Result<PicardData> {
    let pic = PicardLattice::new(fan)?;
    let group = GaloisGroup::generate(fan)?;
    let orbits = galois_orbits(fan)?;
    let d = fan.dim();

    // t = rank of the fixed sublattice of M under the dual action.
    let t = if fan.galois().is_empty() {
        d
    } else {
        let stacked: Vec<Vec<i64>> =
            fan.galois().iter().flat_map(|g| dual_action(g).sub_identity().to_rows()).collect();
        d - IntMatrix::from_rows(&stacked, d).rank()
    };
    let r = orbits.len();

    let eff_generators = orbits
        .orbits
        .iter()
        .map(|o| {
            let mut x = vec![0; fan.n_rays()];
            o.iter().for_each(|&j| x[j] = 1);
            pic.class(&x)
        })
        .collect();
    let anticanonical = pic.class(&vec![1; fan.n_rays()]);

    let h1_gm = h1_of_group(&group, dual_action)?;
    let h1_gpic = h1_of_group(&group, |g| {
        let perm = ray_permutation(fan, g).expect("group elements permute the rays");
        pic.induced_action(&perm)
    })?;

    Ok(PicardData {
        rank_split: pic.rank(),
        rank_k: r - t,
        t,
        orbits,
        eff_generators,
        anticanonical,
        h1_gm,
        h1_gpic,
        group_order: group.order(),
    })
}

pub fn beta(fan: &Fan) -> Result<u64> {
    Ok(picard_data(fan)?.beta())
}

/// Basis (as columns) of the invariant sublattice `Pic^G`.
pub fn invariant_pic_basis(fan: &Fan, pic: &PicardLattice) -> Result<Vec<Vec<i64>>> {
    let k = pic.rank();
    let actions = pic_actions(fan, pic)?;
    if actions.is_empty() {
        return Ok((0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect());
    }
    let stacked: Vec<Vec<i64>> = actions.iter().flat_map(|a| a.sub_identity().to_rows()).collect();
    Ok(kernel_basis(&IntMatrix::from_rows(&stacked, k)))
}

/// Coordinates of an element of `Pic^G` in the given basis.
pub fn coordinates_in(basis: &[Vec<i64>], x: &[i64]) -> Result<Vec<i64>> {
    let m = IntMatrix::from_cols(basis, x.len());
    solve(&m, x).ok_or_else(|| Error::Lattice("class is not in the invariant sublattice".into()))
}

/// Index of the lattice spanned by `vectors` inside the lattice it lies in
/// (product of invariant factors); errors if they do not have full rank.
pub fn sublattice_index(vectors: &[Vec<i64>], k: usize) -> Result<u64> {
    let s = smith(&IntMatrix::from_cols(vectors, k));
    if s.rank < k {
        return Err(Error::Lattice("vectors do not span a full-rank sublattice".into()));
    }
    Ok(s.factors.iter().map(|&f| f as u64).product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::Fan;

    fn p1(galois: Vec<Vec<Vec<i64>>>) -> Fan {
        Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]], galois).unwrap()
    }

    fn p2(galois: Vec<Vec<Vec<i64>>>) -> Fan {
        Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![2, 0]], galois)
            .unwrap()
    }

    fn p1xp1(galois: Vec<Vec<Vec<i64>>>) -> Fan {
        Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
            galois,
        )
        .unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn evaluate_examples() {
        let f = p2(vec![]);
        let ac = PlFunction::anticanonical(&f);
        assert_eq!(pl_evaluate_int(&f, &ac, &[1, 1]).unwrap(), q(2));
        assert_eq!(pl_evaluate_int(&f, &PlFunction::zero(&f), &[5, -7]).unwrap(), q(0));
        let g = p1(vec![]);
        assert_eq!(pl_evaluate_int(&g, &PlFunction::anticanonical(&g), &[-3]).unwrap(), q(3));
    }

    #[test]
    fn p2_linear_forms() {
        let f = p2(vec![]);
        let ac = PlFunction::anticanonical(&f);
        let forms: Vec<Vec<i64>> = (0..3).map(|c| integer_linear_form_on(&f, &ac, c).unwrap()).collect();
        assert_eq!(forms, vec![vec![1, 1], vec![-2, 1], vec![1, -2]]);
    }

    #[test]
    fn split_p2() {
        let d = picard_data(&p2(vec![])).unwrap();
        assert_eq!((d.rank_split, d.rank_k, d.beta(), d.h_t()), (1, 1, 1, 1));
    }

    #[test]
    fn norm_one_torus() {
        let d = picard_data(&p1(vec![vec![vec![-1]]])).unwrap();
        assert_eq!(d.h1_gm, vec![2]);
        assert_eq!(d.h_t(), 2);
        assert_eq!(d.beta(), 1);
        assert_eq!((d.t, d.rank_k), (0, 1));
    }

    #[test]
    fn swap_on_p1xp1() {
        let d = picard_data(&p1xp1(vec![vec![vec![0, 1], vec![1, 0]]])).unwrap();
        assert_eq!((d.t, d.orbits.len(), d.rank_k), (1, 2, 1));
        assert_eq!(d.h_t(), 1);
        assert_eq!(d.beta(), 1);
    }

    #[test]
    fn three_cycle_on_p2() {
        let f = p2(vec![vec![vec![0, -1], vec![1, -1]]]);
        let d = picard_data(&f).unwrap();
        assert_eq!(d.t, 0);
        assert_eq!(d.h_t(), 3);
        assert_eq!(d.beta(), 1);
        let pic = PicardLattice::new(&f).unwrap();
        let g = &f.galois()[0];
        let perm = ray_permutation(&f, g).unwrap();
        let a = pic.induced_action(&perm);
        assert_eq!(h1_cyclic(&a, 3), h1_cyclic_via_coinvariants(&a));
        let m = dual_action(g);
        assert_eq!(h1_cyclic(&m, 3), h1_cyclic_via_coinvariants(&m));
    }

    #[test]
    fn permutation_module_has_trivial_h1() {
        let g = IntMatrix::from_rows(&[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]], 3);
        assert!(h1_cyclic(&g, 3).is_empty());
        assert!(h1_cyclic_via_coinvariants(&g).is_empty());
    }

    #[test]
    fn pic_of_p2_is_generated_by_any_line() {
        let pic = PicardLattice::new(&p2(vec![])).unwrap();
        let a = pic.class(&[1, 0, 0]);
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].abs(), 1);
        assert_eq!(pic.class(&[1, 0, 0]), pic.class(&[0, 1, 0]));
        assert_eq!(pic.class(&[1, 1, 1]), vec![3 * a[0]]);
        assert_eq!(pic.class(&pic.lift(&[5])), vec![5]);
    }
}
