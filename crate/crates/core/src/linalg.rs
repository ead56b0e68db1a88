//! Small dense and row-sparse matrix types.
//!
//! Everything here is desk-scale: dense storage is row-major and the LU is a
//! plain partially pivoted Doolittle factorisation.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    /// Builds from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch {
                expected: ncols,
                found: rows.iter().map(Vec::len).find(|&l| l != ncols).unwrap_or(0),
            });
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data: rows.iter().flatten().cloned().collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a.clone(), b.clone()))
                .collect(),
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a.clone() * other[(k, l)].clone();
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Field::pivot_size).fold(0.0, f64::max)
    }

    pub fn lu(&self) -> Result<Lu<T>> {
        Lu::factor(self.clone())
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorisation with partial pivoting, `PA = LU`.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Field> Lu<T> {
    pub fn factor(mut a: DenseMatrix<T>) -> Result<Self> {
        let n = a.rows;
        if n != a.cols {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.cols,
            });
        }
        let scale = a.max_abs();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pivot_row, pivot_size) = (k..n)
                .map(|i| (i, a[(i, k)].pivot_size()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_size.is_nan() || pivot_size <= scale * 1e-15 {
                return Err(Error::SingularSystem { column: k });
            }
            if pivot_row != k {
                for j in 0..n {
                    a.data.swap(k * n + j, pivot_row * n + j);
                }
                perm.swap(k, pivot_row);
            }
            let pivot = a[(k, k)].clone();
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let factor = a[(i, k)].clone() / pivot.clone();
                for j in k + 1..n {
                    let v = a[(i, j)].clone() - factor.clone() * a[(k, j)].clone();
                    a[(i, j)] = v;
                }
                a[(i, k)] = factor;
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n, "rhs dimension mismatch");
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            let mut s = x[i].clone();
            for (j, xj) in x.iter().enumerate().take(i) {
                s = s - self.lu[(i, j)].clone() * xj.clone();
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i].clone();
            for (j, xj) in x.iter().enumerate().skip(i + 1) {
                s = s - self.lu[(i, j)].clone() * xj.clone();
            }
            x[i] = s / self.lu[(i, i)].clone();
        }
        x
    }

    /// Dense inverse, one column at a time.
    pub fn inverse(&self) -> DenseMatrix<T> {
        let n = self.dim();
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            let col = self.solve(&e);
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
            e[j] = T::zero();
        }
        inv
    }
}

/// Symmetric positive-definiteness via an `LDLᵀ` sweep without pivoting.
///
/// Works over exact rationals too (no square roots). Returns the diagonal
/// pivots when every one of them is strictly positive.
pub fn ldlt_pivots<T: Scalar>(a: &DenseMatrix<T>) -> Option<Vec<T>> {
    let n = a.nrows();
    if n != a.ncols() {
        return None;
    }
    let mut work = a.clone();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let d = work[(k, k)].clone();
        if d <= T::zero() {
            return None;
        }
        for i in k + 1..n {
            if work[(i, k)].is_zero() {
                continue;
            }
            let l = work[(i, k)].clone() / d.clone();
            for j in k + 1..=i {
                let v = work[(i, j)].clone() - l.clone() * work[(j, k)].clone();
                work[(i, j)] = v;
            }
        }
        pivots.push(d);
    }
    Some(pivots)
}

/// Row-compressed sparse matrix; each row keeps `(column, value)` pairs in
/// ascending column order.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseRows<T> {
    ncols: usize,
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Field> SparseRows<T> {
    pub fn new(ncols: usize, rows: Vec<Vec<(usize, T)>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|mut r| {
                r.retain(|(_, v)| !v.is_zero());
                r.sort_by_key(|(j, _)| *j);
                r
            })
            .collect();
        Self { ncols, rows }
    }

    pub fn from_dense(m: &DenseMatrix<T>) -> Self {
        let rows = (0..m.nrows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, v.clone()))
                    .collect()
            })
            .collect();
        Self { ncols: m.ncols(), rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.rows[i]
            .iter()
            .find(|(c, _)| *c == j)
            .map_or_else(T::zero, |(_, v)| v.clone())
    }

    pub fn row_dot(&self, i: usize, x: &[T]) -> T {
        self.rows[i]
            .iter()
            .fold(T::zero(), |acc, (j, v)| acc + v.clone() * x[*j].clone())
    }

    pub fn matvec_into(&self, x: &[T], out: &mut [T]) {
        assert_eq!(x.len(), self.ncols, "sparse matvec dimension mismatch");
        for (i, o) in out.iter_mut().enumerate().take(self.rows.len()) {
            *o = self.row_dot(i, x);
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.rows.len()];
        self.matvec_into(x, &mut out);
        out
    }

    /// Scales row `i` by `s[i]`.
    pub fn scale_rows(&self, s: &[T]) -> Self {
        let rows = self
            .rows
            .iter()
            .zip(s)
            .map(|(r, si)| r.iter().map(|(j, v)| (*j, v.clone() * si.clone())).collect())
            .collect();
        Self::new(self.ncols, rows)
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(self.rows.len(), self.ncols);
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r {
                m[(i, *j)] = v.clone();
            }
        }
        m
    }

    /// Column indices of the nonzeros in row `i`.
    pub fn pattern(&self, i: usize) -> Vec<usize> {
        self.rows[i].iter().map(|(j, _)| *j).collect()
    }
}

/// Solves `a x = b` and verifies `‖ax − b‖_∞ ≤ tol·max(‖b‖_∞, tiny)`.
pub fn solve_checked<T: Field>(a: &DenseMatrix<T>, b: &[T], rel_tol: f64) -> Result<Vec<T>> {
    let x = a.lu()?.solve(b);
    let r = a.matvec(&x);
    let resid = r
        .iter()
        .zip(b)
        .map(|(ri, bi)| (ri.clone() - bi.clone()).pivot_size())
        .fold(0.0, f64::max);
    let bnorm = b.iter().map(Field::pivot_size).fold(0.0, f64::max);
    if resid > rel_tol * bnorm.max(f64::MIN_POSITIVE) && resid > 0.0 {
        return Err(Error::ResidualCheck {
            residual: resid,
            tolerance: rel_tol * bnorm,
        });
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use num_rational::BigRational;

    #[test]
    fn lu_solves_permuted_system() {
        let a = DenseMatrix::from_rows(&[vec![0.0f64, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]]).unwrap();
        let x = solve_checked(&a, &[5.0, 3.0, 4.0], 1e-12).unwrap();
        for (xi, ei) in x.iter().zip([1.0, 2.0, 1.0]) {
            assert!((xi - ei).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(a.lu(), Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn complex_lu() {
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        let a = DenseMatrix::from_rows(&[vec![i, one], vec![one, i]]).unwrap();
        let x = a.lu().unwrap().solve(&[one + i, one + i]);
        for xi in x {
            assert!((xi - one).norm() < 1e-14);
        }
    }

    #[test]
    fn exact_inverse() {
        let r = |n, d| BigRational::from_ratio(n, d);
        let a = DenseMatrix::from_rows(&[vec![r(2, 1), r(1, 3)], vec![r(1, 2), r(1, 1)]]).unwrap();
        let inv = a.lu().unwrap().inverse();
        assert_eq!(a.matmul(&inv), DenseMatrix::identity(2));
    }

    #[test]
    fn kron_matches_definition() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 3.0]]).unwrap();
        let b = DenseMatrix::identity(2);
        let k = a.kron(&b);
        assert_eq!(k[(0, 2)], 2.0);
        assert_eq!(k[(1, 3)], 2.0);
        assert_eq!(k[(3, 3)], 3.0);
        assert_eq!(k[(2, 0)], 0.0);
    }

    #[test]
    fn ldlt_detects_indefinite() {
        let spd = DenseMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let ind = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(ldlt_pivots(&spd).is_some());
        assert!(ldlt_pivots(&ind).is_none());
    }
}
