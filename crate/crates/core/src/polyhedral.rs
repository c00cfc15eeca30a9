//! Exact polyhedral primitives: double description for extreme rays of
//! `{y : ⟨a_i, y⟩ ≥ 0}` and the placing triangulation of a pointed cone.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{dot, normal_vector, primitive, rank_of, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet(vec![0; len.div_ceil(64).max(1)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn is_subset(&self, other: &BitSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct Ray {
    v: Vec<i64>,
    tight: BitSet,
}

/// Extreme rays (primitive, lexicographically sorted) of the polyhedral cone
/// cut out by `⟨a, y⟩ ≥ 0` for every constraint row `a ∈ Z^k`.
///
/// The constraint rows must span `Z^k ⊗ Q` so that the cone is pointed;
/// otherwise `NotFullDimensional` is returned with the row rank. A result
/// spanning fewer than `k` dimensions is legitimate (lower-dimensional cone).
pub fn extreme_rays(constraints: &[Vec<i64>], k: usize) -> Result<Vec<Vec<i64>>> {
    let rows: Vec<Vec<i64>> =
        constraints.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    let rank = rank_of(&rows, k);
    if rank < k {
        return Err(Error::NotFullDimensional { rank, dim: k });
    }

    // Greedy basis for the initial simplicial cone.
    let mut basis: Vec<usize> = Vec::with_capacity(k);
    let mut basis_rows: Vec<Vec<i64>> = Vec::with_capacity(k);
    for (i, r) in rows.iter().enumerate() {
        basis_rows.push(r.clone());
        if rank_of(&basis_rows, k) == basis_rows.len() {
            basis.push(i);
            if basis.len() == k {
                break;
            }
        } else {
            basis_rows.pop();
        }
    }
    let b = IntMatrix::from_rows(&basis_rows, k);
    let det = b.det();
    let adj = b.adjugate();
    let sign = det.signum();
    let mut rays: Vec<Ray> = (0..k)
        .map(|j| {
            let v: Vec<i64> = adj.col(j).iter().map(|x| x * sign).collect();
            let mut tight = BitSet::new(rows.len());
            for (l, &bi) in basis.iter().enumerate() {
                if l != j {
                    tight.insert(bi);
                }
            }
            Ray { v: primitive(&v), tight }
        })
        .collect();

    for (idx, a) in rows.iter().enumerate() {
        if basis.contains(&idx) {
            continue;
        }
        let vals: Vec<i64> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < 0).collect();
        if neg.is_empty() {
            for (i, r) in rays.iter_mut().enumerate() {
                if vals[i] == 0 {
                    r.tight.insert(idx);
                }
            }
            continue;
        }
        let mut next: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].tight.and(&rays[n].tight);
                if common.count() + 2 < k {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(o, r)| o == p || o == n || !common.is_subset(&r.tight));
                if !adjacent {
                    continue;
                }
                let (ap, an) = (vals[p] as i128, vals[n] as i128);
                let combined: Vec<i128> = rays[p]
                    .v
                    .iter()
                    .zip(&rays[n].v)
                    .map(|(&x, &y)| ap * y as i128 - an * x as i128)
                    .collect();
                let g = combined.iter().fold(0i128, |g, &x| num_integer::Integer::gcd(&g, &x));
                let v: Vec<i64> = combined
                    .iter()
                    .map(|&x| i64::try_from(x / g).expect("overflow in double description"))
                    .collect();
                let mut tight = common;
                tight.insert(idx);
                next.push(Ray { v, tight });
            }
        }
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i] > 0 {
                next.push(r);
            } else if vals[i] == 0 {
                r.tight.insert(idx);
                next.push(r);
            }
        }
        rays = next;
    }
    let mut out: Vec<Vec<i64>> = rays.into_iter().map(|r| r.v).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Facets by brute force: every `(k-1)`-subset of generators spanning a
/// hyperplane whose normal is nonnegative on all generators. Exponential;
/// kept as an independent check on [`extreme_rays`].
pub fn facets_brute_force(generators: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
    fn subsets(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            subsets(n, size, i + 1, cur, out);
            cur.pop();
        }
    }
    if k == 1 {
        let mut out: Vec<Vec<i64>> = Vec::new();
        for s in [1i64, -1] {
            if generators.iter().all(|g| g[0] * s >= 0) {
                out.push(vec![s]);
            }
        }
        return out;
    }
    let mut combos = Vec::new();
    subsets(generators.len(), k - 1, 0, &mut Vec::new(), &mut combos);
    let mut out: Vec<Vec<i64>> = Vec::new();
    for c in combos {
        let vs: Vec<Vec<i64>> = c.iter().map(|&i| generators[i].clone()).collect();
        let n = normal_vector(&vs, k);
        if n.iter().all(|&x| x == 0) {
            continue;
        }
        for cand in [n.clone(), n.iter().map(|x| -x).collect::<Vec<_>>()] {
            if generators.iter().all(|g| dot(&cand, g) >= 0) {
                out.push(cand);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Placing (beneath–beyond) triangulation of the cone spanned by `points`,
/// inserting points in the given order. Returns simplicial cones as sorted
/// index lists of length `k`. Points must span `R^k` and lie in a pointed cone.
pub fn placing_triangulation(points: &[Vec<i64>], k: usize, order: &[usize]) -> Vec<Vec<usize>> {
    assert!(!order.is_empty());
    // Initial simplex: first k independent points in the given order.
    let mut initial: Vec<usize> = Vec::new();
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    for &i in order {
        chosen.push(points[i].clone());
        if rank_of(&chosen, k) == chosen.len() {
            initial.push(i);
            if initial.len() == k {
                break;
            }
        } else {
            chosen.pop();
        }
    }
    assert_eq!(initial.len(), k, "points do not span the ambient space");
    let mut simplices: Vec<Vec<usize>> = vec![sorted(initial.clone())];

    for &v in order {
        if initial.contains(&v) {
            continue;
        }
        // Boundary facets are (k-1)-faces belonging to exactly one simplex.
        let mut facet_owner: BTreeMap<Vec<usize>, (usize, usize)> = BTreeMap::new();
        for (si, s) in simplices.iter().enumerate() {
            for skip in 0..k {
                let facet: Vec<usize> =
                    s.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &x)| x).collect();
                facet_owner
                    .entry(facet)
                    .and_modify(|e| e.1 += 1)
                    .or_insert((si, 1));
            }
        }
        let mut added = Vec::new();
        for (facet, &(si, count)) in &facet_owner {
            if count != 1 {
                continue;
            }
            let vs: Vec<Vec<i64>> = facet.iter().map(|&i| points[i].clone()).collect();
            let mut normal = normal_vector(&vs, k);
            let opposite = simplices[si].iter().find(|x| !facet.contains(x)).copied().unwrap();
            if dot(&normal, &points[opposite]) < 0 {
                normal.iter_mut().for_each(|x| *x = -*x);
            }
            if dot(&normal, &points[v]) < 0 {
                let mut s = facet.clone();
                s.push(v);
                added.push(sorted(s));
            }
        }
        simplices.extend(added);
    }
    simplices
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_is_self_dual() {
        let rays = extreme_rays(&[vec![1, 0], vec![0, 1]], 2).unwrap();
        assert_eq!(rays, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn two_dimensional_dual() {
        let rays = extreme_rays(&[vec![1, 0], vec![1, 2]], 2).unwrap();
        assert_eq!(rays, vec![vec![0, 1], vec![2, -1]]);
    }

    #[test]
    fn square_pyramid_dual_has_four_rays() {
        let gens = vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]];
        let rays = extreme_rays(&gens, 3).unwrap();
        assert_eq!(rays.len(), 4);
        assert_eq!(rays, facets_brute_force(&gens, 3));
    }

    #[test]
    fn rank_deficient_rejected() {
        let err = extreme_rays(&[vec![1, 1], vec![2, 2]], 2).unwrap_err();
        assert_eq!(err, Error::NotFullDimensional { rank: 1, dim: 2 });
    }

    #[test]
    fn lower_dimensional_result() {
        // x ≥ 0, y ≥ 0, -y ≥ 0 : the ray (1, 0).
        let rays = extreme_rays(&[vec![1, 0], vec![0, 1], vec![0, -1]], 2).unwrap();
        assert_eq!(rays, vec![vec![1, 0]]);
    }

    #[test]
    fn placing_square_cone() {
        let pts = vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]];
        let t = placing_triangulation(&pts, 3, &[0, 1, 2, 3]);
        assert_eq!(t.len(), 2);
        let t2 = placing_triangulation(&pts, 3, &[3, 2, 1, 0]);
        assert_eq!(t2.len(), 2);
    }

    #[test]
    fn placing_skips_interior_points() {
        let pts = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
        let t = placing_triangulation(&pts, 2, &[0, 1, 2]);
        assert_eq!(t, vec![vec![0, 1]]);
    }
}
