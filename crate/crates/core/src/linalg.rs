//! Dense matrices over an exact field: row reduction, kernels, products and
//! characteristic polynomials.

use crate::arith::poly::Poly;
use crate::arith::{Field, Ring, Zp, Q};

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<F> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize, like: &F) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![like.zero_like(); rows * cols],
        }
    }

    pub fn identity(n: usize, like: &F) -> Self {
        let mut m = Self::zeros(n, n, like);
        for i in 0..n {
            m.data[i * n + i] = like.one_like();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<F>], like: &F) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c, like);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.data[i * c + j] = x.clone();
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<F> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn like(&self) -> F {
        self.data
            .first()
            .expect("empty matrix has no scalar context")
            .zero_like()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let z = self.like();
        let mut out = Self::zeros(self.rows, o.cols, &z);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.vanishes() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = out.get(i, j).add(&a.mul(o.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for j in 0..self.cols {
                    acc = acc.add(&self.get(i, j).mul(&v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.add(b))
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.sub(b))
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        let data = self.data.iter().map(|a| a.mul(s)).collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// `self - s*I`.
    pub fn minus_scalar(&self, s: &F) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        for i in 0..self.rows {
            let v = m.get(i, i).sub(s);
            m.set(i, i, v);
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.vanishes())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::identity(self.rows, &self.like());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).vanishes()) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).inv().expect("pivot must be invertible");
            for j in c..self.cols {
                let v = self.get(r, j).mul(&inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c).clone();
                if f.vanishes() {
                    continue;
                }
                for j in c..self.cols {
                    let v = self.get(i, j).sub(&f.mul(self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.clone().rref().len()
    }

    /// Basis of the right kernel `{v : A v = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        assert!(
            self.rows > 0,
            "kernel of a matrix with no rows needs a scalar context"
        );
        let mut m = self.clone();
        let pivots = m.rref();
        let z = m.like();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![z.clone(); self.cols];
                v[f] = z.one_like();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = m.get(r, f).neg();
                }
                v
            })
            .collect()
    }

    pub fn det(&self) -> F {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut d = m.like().one_like();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m.get(i, c).vanishes()) else {
                return m.like();
            };
            if pr != c {
                for j in 0..n {
                    m.data.swap(pr * n + j, c * n + j);
                }
                d = d.neg();
            }
            let piv = m.get(c, c).clone();
            d = d.mul(&piv);
            let inv = piv.inv().unwrap();
            for i in c + 1..n {
                let f = m.get(i, c).mul(&inv);
                if f.vanishes() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j).sub(&f.mul(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        d
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let z = self.like();
        let mut aug = Self::zeros(n, 2 * n, &z);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, z.one_like());
        }
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut out = Self::zeros(n, n, &z);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    /// Characteristic polynomial `det(X - A)`, coefficients low degree first,
    /// by the Faddeev-LeVerrier recursion (needs division by `1..n`).
    pub fn charpoly_coeffs(&self) -> Vec<F> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let z = if n == 0 { return vec![] } else { self.like() };
        let mut c = vec![z.clone(); n + 1];
        c[n] = z.one_like();
        let mut mk = Self::zeros(n, n, &z);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(A M_k)/k
            let mut next = self.mul(&mk);
            for i in 0..n {
                let v = next.get(i, i).add(&c[n - k + 1]);
                next.set(i, i, v);
            }
            mk = next;
            let am = self.mul(&mk);
            let mut tr = z.clone();
            for i in 0..n {
                tr = tr.add(am.get(i, i));
            }
            c[n - k] = tr.neg().div_int(k as i64);
        }
        c
    }

    /// Restriction of `self` to an invariant subspace spanned by `basis`
    /// (columns); returns the matrix in that basis.
    pub fn restrict(&self, basis: &[Vec<F>]) -> Self {
        let z = self.like();
        let b = Matrix::from_cols(basis, &z);
        let images: Vec<Vec<F>> = basis.iter().map(|v| self.mul_vec(v)).collect();
        let coords: Vec<Vec<F>> = images
            .iter()
            .map(|w| solve_in_span(&b, w).expect("subspace is not invariant"))
            .collect();
        Matrix::from_cols(&coords, &z)
    }
}

impl Matrix<Q> {
    pub fn charpoly(&self) -> Poly {
        Poly::new(self.charpoly_coeffs())
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| crate::arith::q(x)).collect())
                .collect(),
        )
    }
}

/// Coordinates of `w` in the column span of `b`, if it lies there.
pub fn solve_in_span<F: Field>(b: &Matrix<F>, w: &[F]) -> Option<Vec<F>> {
    let n = b.cols;
    let z = w[0].zero_like();
    let mut aug = Matrix::zeros(b.rows, n + 1, &z);
    for i in 0..b.rows {
        for j in 0..n {
            aug.set(i, j, b.get(i, j).clone());
        }
        aug.set(i, n, w[i].clone());
    }
    let piv = aug.rref();
    if piv.last() == Some(&n) {
        return None;
    }
    let mut x = vec![z; n];
    for (r, &c) in piv.iter().enumerate() {
        x[c] = aug.get(r, n).clone();
    }
    Some(x)
}

/// Intersection of kernels: basis of `{v : A_i v = 0 for all i}`.
pub fn common_kernel<F: Field>(mats: &[Matrix<F>]) -> Vec<Vec<F>> {
    assert!(!mats.is_empty());
    let cols = mats[0].cols;
    let z = mats[0].like();
    let rows: usize = mats.iter().map(|m| m.rows).sum();
    let mut stacked = Matrix::zeros(rows, cols, &z);
    let mut r0 = 0;
    for m in mats {
        for i in 0..m.rows {
            for j in 0..cols {
                stacked.set(r0 + i, j, m.get(i, j).clone());
            }
        }
        r0 += m.rows;
    }
    stacked.kernel()
}

/// Basis of the image of a subspace under a matrix, reduced to independence.
pub fn span_basis<F: Field>(vecs: &[Vec<F>]) -> Vec<Vec<F>> {
    if vecs.is_empty() {
        return vec![];
    }
    let mut r = Matrix::from_rows(vecs.to_vec());
    let piv = r.rref();
    (0..piv.len()).map(|i| r.row(i)).collect()
}

/// Solve `A x = b` over `Z/p^M` (a chain ring). Full pivoting on the entry
/// of least valuation makes every pivot divide its whole remaining row, so a
/// solution exists exactly when each reduced right-hand side is divisible by
/// its pivot's `p`-power. Free variables are set to zero.
pub fn solve_zp(mut a: Vec<Vec<Zp>>, mut b: Vec<Zp>) -> Option<Vec<Zp>> {
    let rows = a.len();
    if rows == 0 {
        return Some(vec![]);
    }
    let cols = a[0].len();
    let like = b[0].zero_like();
    let mut colperm: Vec<usize> = (0..cols).collect();
    let mut rank = 0;
    while rank < rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(rank) {
            for j in rank..cols {
                if let Some(v) = row[colperm[j]].valuation() {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        a.swap(rank, pi);
        b.swap(rank, pi);
        colperm.swap(rank, pj);
        let pc = colperm[rank];
        let piv = a[rank][pc];
        let v = piv.valuation().unwrap();
        let unit_inv = piv.div_p_pow(v).inv().expect("unit part");
        for i in rank + 1..rows {
            let x = a[i][pc];
            if x.vanishes() {
                continue;
            }
            // x / piv is integral since v(x) >= v(piv)
            let f = x.div_p_pow(v).mul(&unit_inv);
            for j in 0..cols {
                let t = a[rank][j].mul(&f);
                a[i][j] = a[i][j].sub(&t);
            }
            b[i] = b[i].sub(&b[rank].mul(&f));
        }
        rank += 1;
    }
    if b.iter().skip(rank).any(|x| !x.vanishes()) {
        return None;
    }
    let mut x = vec![like; cols];
    for r in (0..rank).rev() {
        let pc = colperm[r];
        let mut num = b[r];
        for j in r + 1..cols {
            let c = colperm[j];
            num = num.sub(&a[r][c].mul(&x[c]));
        }
        let piv = a[r][pc];
        let v = piv.valuation().unwrap();
        if num.valuation().is_some_and(|nv| nv < v) {
            return None;
        }
        x[pc] = num.div_p_pow(v).mul(&piv.div_p_pow(v).inv().unwrap());
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, Quad};

    #[test]
    fn charpoly_of_up_matrix() {
        // [[a_p, 1], [-p^{k+1}, 0]] with a_p = -1, p = 3, k = 0
        let m = Matrix::from_i64(&[&[-1, 1], &[-3, 0]]);
        assert_eq!(m.charpoly(), Poly::from_i64(&[3, 1, 1]));
    }

    #[test]
    fn kernel_and_rank() {
        let m = Matrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(|x| x.vanishes()));
    }

    #[test]
    fn det_and_inverse() {
        let m = Matrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.det(), q(18));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(3, &q(0)));
        assert!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn charpoly_matches_det_at_integer_points() {
        let m = Matrix::from_i64(&[&[1, 2, 0, 5], &[3, -1, 2, 0], &[0, 4, 2, 1], &[1, 1, 1, 1]]);
        let cp = m.charpoly();
        for x in -3..4 {
            let d = m.minus_scalar(&q(x)).scale(&q(-1)).det();
            assert_eq!(cp.eval(&q(x)), d);
        }
    }

    #[test]
    fn works_over_a_quadratic_field() {
        let s = Quad::sqrt_d(-11);
        let one = s.one_like();
        let m = Matrix::from_rows(vec![
            vec![s.clone(), one.clone()],
            vec![one.clone(), s.clone()],
        ]);
        let d = m.det();
        assert_eq!(d.as_rational(), Some(q(-12)));
    }

    #[test]
    fn solve_over_z_mod_p_power() {
        let z = |x: i128| Zp::new(3, 5, x);
        // 3x + 9y = 6 ; 9x + 2y = 11
        let a = vec![vec![z(3), z(9)], vec![z(9), z(2)]];
        let b = vec![z(6), z(11)];
        let x = solve_zp(a.clone(), b.clone()).unwrap();
        for (row, rhs) in a.iter().zip(&b) {
            assert_eq!(row[0].mul(&x[0]).add(&row[1].mul(&x[1])), *rhs);
        }
        // 3x = 1 has no solution
        assert!(solve_zp(vec![vec![z(3)]], vec![z(1)]).is_none());
    }
}
