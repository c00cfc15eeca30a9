//! Dense integer matrices and the lattice computations built on them.
//!
//! Entries are `i64`; products are formed in `i128` and narrowed with a
//! panic on overflow. Matrices in this crate are tiny (rank ≤ 8 lattices),
//! so overflow means a bug upstream rather than a large input.

use std::fmt;

use num_integer::Integer;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

#[inline]
fn narrow(x: i128) -> i64 {
    i64::try_from(x).expect("integer overflow in lattice arithmetic")
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must have length `cols`.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "row length mismatch");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols<C: AsRef<[i64]>>(cols: &[C], rows: usize) -> Self {
        Self::from_rows(cols, rows).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0i128;
                for l in 0..self.cols {
                    acc += self[(i, l)] as i128 * other[(l, j)] as i128;
                }
                out[(i, j)] = narrow(acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn sub_identity(&self) -> IntMatrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] -= 1;
        }
        m
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i64 {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> =
            (0..n).map(|i| self.row(i).iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        narrow(sign * a[n - 1][n - 1])
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> IntMatrix {
        let mut m = Self::zeros(self.rows - 1, self.cols - 1);
        let mut r = 0;
        for i in (0..self.rows).filter(|&i| i != skip_row) {
            let mut c = 0;
            for j in (0..self.cols).filter(|&j| j != skip_col) {
                m[(r, c)] = self[(i, j)];
                c += 1;
            }
            r += 1;
        }
        m
    }

    /// Classical adjugate, so that `A · adj(A) = det(A) · I`.
    pub fn adjugate(&self) -> IntMatrix {
        assert!(self.is_square());
        let n = self.rows;
        let mut adj = Self::zeros(n, n);
        if n == 1 {
            adj[(0, 0)] = 1;
            return adj;
        }
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det();
                adj[(j, i)] = if (i + j) % 2 == 0 { c } else { -c };
            }
        }
        adj
    }

    /// Inverse of a unimodular matrix. Panics if `|det| != 1`.
    pub fn unimodular_inverse(&self) -> IntMatrix {
        let d = self.det();
        assert!(d == 1 || d == -1, "matrix is not unimodular (det {d})");
        let mut adj = self.adjugate();
        if d == -1 {
            adj.data.iter_mut().for_each(|x| *x = -*x);
        }
        adj
    }

    pub fn rank(&self) -> usize {
        smith(self).rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: i64) {
        for j in 0..self.cols {
            let v = self[(dst, j)] as i128 + c as i128 * self[(src, j)] as i128;
            self[(dst, j)] = narrow(v);
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: i64) {
        for i in 0..self.rows {
            let v = self[(i, dst)] as i128 + c as i128 * self[(i, src)] as i128;
            self[(i, dst)] = narrow(v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)];
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            self[(i, c)] = -self[(i, c)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

/// Smith normal form `U · A · V = D` with `U`, `V` unimodular and the
/// inverses tracked alongside.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    /// Nonzero invariant factors `d_1 | d_2 | ...`, all positive.
    pub factors: Vec<i64>,
    pub rank: usize,
}

pub fn smith(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    macro_rules! row_swap {
        ($a:expr, $b:expr) => {{
            d.swap_rows($a, $b);
            u.swap_rows($a, $b);
            u_inv.swap_cols($a, $b);
        }};
    }
    macro_rules! col_swap {
        ($a:expr, $b:expr) => {{
            d.swap_cols($a, $b);
            v.swap_cols($a, $b);
            v_inv.swap_rows($a, $b);
        }};
    }
    macro_rules! row_add {
        ($dst:expr, $src:expr, $c:expr) => {{
            d.add_row($dst, $src, $c);
            u.add_row($dst, $src, $c);
            u_inv.add_col($src, $dst, -$c);
        }};
    }
    macro_rules! col_add {
        ($dst:expr, $src:expr, $c:expr) => {{
            d.add_col($dst, $src, $c);
            v.add_col($dst, $src, $c);
            v_inv.add_row($src, $dst, -$c);
        }};
    }

    let mut t = 0;
    while t < m.min(n) {
        // Pivot: smallest nonzero magnitude in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = d[(i, j)];
                if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        row_swap!(t, pi);
        col_swap!(t, pj);

        loop {
            let p = d[(t, t)];
            for i in t + 1..m {
                let q = d[(i, t)] / p;
                if q != 0 {
                    row_add!(i, t, -q);
                }
            }
            for j in t + 1..n {
                let q = d[(t, j)] / p;
                if q != 0 {
                    col_add!(j, t, -q);
                }
            }
            let col_rest = (t + 1..m).find(|&i| d[(i, t)] != 0);
            let row_rest = (t + 1..n).find(|&j| d[(t, j)] != 0);
            if col_rest.is_some() || row_rest.is_some() {
                // Remainders are smaller than the pivot; move the smallest in.
                let mut bi = t;
                let mut bj = t;
                for i in t + 1..m {
                    if d[(i, t)] != 0 && d[(i, t)].abs() < d[(bi, bj)].abs() {
                        bi = i;
                        bj = t;
                    }
                }
                for j in t + 1..n {
                    if d[(t, j)] != 0 && d[(t, j)].abs() < d[(bi, bj)].abs() {
                        bi = t;
                        bj = j;
                    }
                }
                row_swap!(t, bi);
                col_swap!(t, bj);
                continue;
            }
            let mut offender = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if d[(i, j)] % p != 0 {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => row_add!(t, i, 1),
                None => break,
            }
        }
        if d[(t, t)] < 0 {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        t += 1;
    }
    let factors: Vec<i64> = (0..t).map(|i| d[(i, i)]).collect();
    Smith { u, u_inv, v, v_inv, rank: factors.len(), factors }
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    debug_assert_eq!(a.len(), b.len());
    narrow(a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum())
}

pub fn gcd_of(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Divides by the gcd of the entries. The zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = gcd_of(v);
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// Z-basis of `{x : A x = 0}`. The returned lattice is saturated.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<i64>> {
    let s = smith(a);
    (s.rank..a.cols).map(|j| s.v.col(j)).collect()
}

/// Integer solution of `A x = b`, if one exists.
pub fn solve(a: &IntMatrix, b: &[i64]) -> Option<Vec<i64>> {
    assert_eq!(a.rows, b.len());
    let s = smith(a);
    let ub = s.u.mul_vec(b);
    let mut y = vec![0i64; a.cols];
    for (i, &f) in s.factors.iter().enumerate() {
        if ub[i] % f != 0 {
            return None;
        }
        y[i] = ub[i] / f;
    }
    if ub[s.rank..].iter().any(|&x| x != 0) {
        return None;
    }
    Some(s.v.mul_vec(&y))
}

/// Primitive integer normal to the hyperplane spanned by `k - 1` vectors of
/// `Z^k` (generalized cross product). Zero if the vectors are dependent.
pub fn normal_vector(vectors: &[Vec<i64>], k: usize) -> Vec<i64> {
    assert_eq!(vectors.len() + 1, k);
    if k == 1 {
        return vec![1];
    }
    let m = IntMatrix::from_rows(vectors, k);
    let n: Vec<i64> = (0..k)
        .map(|i| {
            let cols: Vec<Vec<i64>> = (0..k).filter(|&j| j != i).map(|j| m.col(j)).collect();
            let c = IntMatrix::from_cols(&cols, k - 1).det();
            if i % 2 == 0 { c } else { -c }
        })
        .collect();
    primitive(&n)
}

/// Matrix with rows `U` such that `U γ = e_1` for a primitive vector `γ`:
/// the remaining rows give a projection `Z^k → Z^{k-1}` with kernel `Zγ`.
pub fn quotient_by_primitive(gamma: &[i64]) -> Option<IntMatrix> {
    if gcd_of(gamma) != 1 {
        return None;
    }
    let k = gamma.len();
    let col = IntMatrix::from_cols(&[gamma.to_vec()], k);
    let s = smith(&col);
    let mut u = s.u;
    // U γ V = e_1 with V = ±1.
    if s.v[(0, 0)] < 0 {
        u.negate_row(0);
    }
    Some(u)
}

/// Integer rank of a list of vectors of length `k`.
pub fn rank_of(vectors: &[Vec<i64>], k: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    IntMatrix::from_rows(vectors, k).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        let c = rows[0].len();
        IntMatrix::from_rows(rows, c)
    }

    #[test]
    fn determinant_small() {
        assert_eq!(m(&[&[1, 2], &[3, 4]]).det(), -2);
        assert_eq!(m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]).det(), -1);
        assert_eq!(m(&[&[2, 0, 1], &[1, 1, 0], &[3, 1, 1]]).det(), 0);
        assert_eq!(m(&[&[0, 2], &[3, 0]]).det(), -6);
    }

    #[test]
    fn smith_decomposition_holds() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&a);
        assert_eq!(s.factors, vec![2, 6, 12]);
        let d = s.u.mul(&a).mul(&s.v);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { s.factors[i] } else { 0 };
                assert_eq!(d[(i, j)], want);
            }
        }
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(3));
        assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(3));
    }

    #[test]
    fn smith_rectangular() {
        let a = m(&[&[1, 0], &[0, 1], &[-1, -1]]);
        let s = smith(&a);
        assert_eq!(s.factors, vec![1, 1]);
        let d = s.u.mul(&a).mul(&s.v);
        assert_eq!(d.to_rows(), vec![vec![1, 0], vec![0, 1], vec![0, 0]]);
        assert_eq!(s.u_inv.mul(&s.u), IntMatrix::identity(3));
    }

    #[test]
    fn kernel_and_solve() {
        let a = m(&[&[1, 1, 1]]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(dot(&[1, 1, 1], v), 0);
        }
        assert_eq!(solve(&m(&[&[2, 0], &[0, 3]]), &[4, 9]), Some(vec![2, 3]));
        assert_eq!(solve(&m(&[&[2, 0], &[0, 3]]), &[3, 9]), None);
    }

    #[test]
    fn normals_and_quotients() {
        let n = normal_vector(&[vec![1, 0, 0], vec![0, 1, 0]], 3);
        assert_eq!(n, vec![0, 0, 1]);
        let n = normal_vector(&[vec![1, 2]], 2);
        assert_eq!(dot(&n, &[1, 2]), 0);
        let u = quotient_by_primitive(&[1, -1]).unwrap();
        assert_eq!(u.mul_vec(&[1, -1]), vec![1, 0]);
        assert!(quotient_by_primitive(&[2, 0]).is_none());
    }

    #[test]
    fn adjugate_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.mul(&a.unimodular_inverse()), IntMatrix::identity(2));
        let b = m(&[&[1, 0], &[1, 2]]);
        let adj = b.adjugate();
        assert_eq!(b.mul(&adj).to_rows(), vec![vec![2, 0], vec![0, 2]]);
    }
}
