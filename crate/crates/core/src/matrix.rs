//! Dense matrices over the rationals with exact elimination.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type RVec = Vec<BigRational>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn from_ints<I: Into<BigInt>>(v: impl IntoIterator<Item = I>) -> RVec {
    v.into_iter().map(|x| BigRational::from_integer(x.into())).collect()
}

pub fn is_zero_vec(v: &[BigRational]) -> bool {
    v.iter().all(Zero::is_zero)
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ExactMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[RVec]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        ExactMatrix { rows: rows.len(), cols, data: rows.iter().flatten().cloned().collect() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<RVec> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (r + 1..self.cols).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> RVec {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * out.cols + c;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// `self - λ·I`.
    pub fn shift(&self, lambda: &BigRational) -> ExactMatrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let v = m.get(i, i) - lambda;
            m.set(i, i, v);
        }
        m
    }

    /// Reduced row-echelon form and pivot columns.
    ///
    /// The pivot in each column is the nonzero entry of smallest absolute
    /// value, which keeps numerators and denominators small on 0/1 input.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut rows: Vec<RVec> = self.row_vecs();
        let pivots = rref_rows(&mut rows, self.cols);
        let mut out = ExactMatrix::zeros(rows.len(), self.cols);
        for (r, row) in rows.into_iter().enumerate() {
            for (c, v) in row.into_iter().enumerate() {
                out.set(r, c, v);
            }
        }
        (out, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.row_vecs();
        rref_rows(&mut rows, self.cols).len()
    }

    /// A basis of `{v : M v = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<RVec> {
        let mut rows = self.row_vecs();
        let pivots = rref_rows(&mut rows, self.cols);
        kernel_from_rref(&rows, &pivots, self.cols)
    }
}

/// In-place RREF over `rows`; returns pivot columns, truncates zero rows.
pub(crate) fn rref_rows(rows: &mut Vec<RVec>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let best = (r..rows.len())
            .filter(|&i| !rows[i][c].is_zero())
            .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()));
        let Some(pr) = best else { continue };
        rows.swap(r, pr);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        let nz: Vec<usize> = (c..ncols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub(crate) fn kernel_from_rref(rows: &[RVec], pivots: &[usize], ncols: usize) -> Vec<RVec> {
    let mut out = Vec::new();
    let mut is_pivot = vec![false; ncols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![BigRational::zero(); ncols];
        v[free] = BigRational::one();
        for (row, &p) in rows.iter().zip(pivots) {
            if !row[free].is_zero() {
                v[p] = -row[free].clone();
            }
        }
        out.push(v);
    }
    out
}

/// Row space of a matrix, kept in reduced form for membership queries.
#[derive(Debug, Clone)]
pub struct RowSpace {
    rows: Vec<RVec>,
    pivots: Vec<usize>,
    ncols: usize,
}

impl RowSpace {
    pub fn of(m: &ExactMatrix) -> Self {
        Self::of_rows(m.row_vecs(), m.ncols())
    }

    pub fn of_rows(mut rows: Vec<RVec>, ncols: usize) -> Self {
        let pivots = rref_rows(&mut rows, ncols);
        RowSpace { rows, pivots, ncols }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residual of `v` after eliminating against the reduced basis; zero iff
    /// `v` lies in the row space.
    pub fn residual(&self, v: &[BigRational]) -> RVec {
        assert_eq!(v.len(), self.ncols);
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (x, y) in w.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        is_zero_vec(&self.residual(v))
    }

    pub fn kernel_basis(&self) -> Vec<RVec> {
        kernel_from_rref(&self.rows, &self.pivots, self.ncols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(&rows.iter().map(|r| from_ints(r.iter().copied())).collect::<Vec<_>>())
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ker = a.kernel_basis();
        assert_eq!(ker.len(), 1);
        assert!(is_zero_vec(&a.mul_vec(&ker[0])));
    }

    #[test]
    fn rowspace_membership_matches_kernel_orthogonality() {
        let a = m(&[&[1, 1, 0, 0], &[0, 1, 1, 0]]);
        let rs = RowSpace::of(&a);
        let ker = a.kernel_basis();
        for v in [[1, 2, 1, 0], [1, 0, -1, 0], [0, 0, 0, 1], [3, 3, 0, 0]] {
            let v = from_ints(v);
            let orth = ker.iter().all(|k| dot(k, &v).is_zero());
            assert_eq!(rs.contains(&v), orth);
        }
    }

    #[test]
    fn identity_and_transpose() {
        let a = m(&[&[1, 2], &[3, 4]]);
        assert_eq!(a.mul(&ExactMatrix::identity(2)), a);
        assert_eq!(a.transpose().transpose(), a);
        assert!(!a.is_symmetric());
        assert!(a.add(&a.transpose()).is_symmetric());
        assert_eq!(a.shift(&BigRational::one()).get(1, 1), &BigRational::from_integer(3.into()));
    }
}
