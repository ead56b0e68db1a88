use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SparseRows};
use crate::scalar::Scalar;

use super::AccuracyOrder;

/// Narrow-stencil second-derivative SBP operator `D2 = P⁻¹(−SᵀM + B)S`.
///
/// The tables provide the banded form `M̃ = SᵀMS`. `S` keeps the one-sided
/// boundary derivative in its first and last rows and a second-order central
/// difference elsewhere; `M` is then recovered as the SPD matrix
/// `K⁻ᵀ(M̃ + c·11ᵀ)K⁻¹` with `K = S + (e₀/h)1ᵀ`, which satisfies `SᵀMS = M̃`
/// exactly because `S1 = 0` and `M̃1 = 0`.
#[derive(Clone, Debug)]
pub struct SecondDerivativeOperator<T> {
    order: AccuracyOrder,
    h: T,
    norm: Vec<T>,
    d2: SparseRows<T>,
    s: SparseRows<T>,
    m: DenseMatrix<T>,
    m_tilde: SparseRows<T>,
}

impl<T: Scalar> SecondDerivativeOperator<T> {
    pub fn build(order: AccuracyOrder, n: usize, h: T) -> Result<Self> {
        order.check_grid(n)?;
        if h <= T::zero() {
            return Err(Error::InvalidParameter {
                name: "h",
                reason: format!("grid spacing must be positive, got {h:?}"),
            });
        }
        let first = order.first_table();
        let table = order.second_table();
        let b = first.norm.len();
        let r = |(num, den): (i64, i64)| T::from_ratio(num, den);
        let inv_h = T::one() / h.clone();

        // M̃ = -h²·D2 stencil in the interior, tabulated block at each end.
        let mut mt: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        let half = table.interior.len() - 1;
        for (i, row) in mt.iter_mut().enumerate() {
            for (k, &c) in table.interior.iter().enumerate() {
                let v = -r(c) * inv_h.clone();
                if k == 0 {
                    row.push((i, v));
                } else {
                    if i >= k {
                        row.push((i - k, v.clone()));
                    }
                    if i + k < n {
                        row.push((i + k, v));
                    }
                }
            }
        }
        for i in 0..b {
            for j in 0..b {
                let v = r(table.block[i][j]) * inv_h.clone();
                set(&mut mt[i], j, v.clone());
                set(&mut mt[n - 1 - i], n - 1 - j, v);
            }
        }
        debug_assert!(half <= b);
        let m_tilde = SparseRows::new(n, mt);

        let mut s_rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        let half_inv_h = inv_h.clone() / T::from_ratio(2, 1);
        for (i, row) in s_rows.iter_mut().enumerate().take(n - 1).skip(1) {
            row.push((i - 1, -half_inv_h.clone()));
            row.push((i + 1, half_inv_h.clone()));
        }
        for (j, &c) in table.boundary_derivative.iter().enumerate() {
            s_rows[0].push((j, r(c) * inv_h.clone()));
            s_rows[n - 1].push((n - 1 - j, -r(c) * inv_h.clone()));
        }
        let s = SparseRows::new(n, s_rows);

        let mut norm = vec![h.clone(); n];
        for (i, &w) in first.norm.iter().enumerate() {
            norm[i] = h.clone() * r(w);
            norm[n - 1 - i] = h.clone() * r(w);
        }

        // D2 = P⁻¹(−M̃ + BS)
        let mut d2_rows: Vec<Vec<(usize, T)>> = (0..n)
            .map(|i| m_tilde.row(i).iter().map(|(j, v)| (*j, -v.clone())).collect())
            .collect();
        for (j, v) in s.row(0) {
            add(&mut d2_rows[0], *j, -v.clone());
        }
        for (j, v) in s.row(n - 1) {
            add(&mut d2_rows[n - 1], *j, v.clone());
        }
        let inv_norm: Vec<T> = norm.iter().map(|w| T::one() / w.clone()).collect();
        let d2 = SparseRows::new(n, d2_rows).scale_rows(&inv_norm);

        let m = Self::recover_m(&s, &m_tilde, &h)?;
        Ok(Self {
            order,
            h,
            norm,
            d2,
            s,
            m,
            m_tilde,
        })
    }

    pub fn on_interval(order: AccuracyOrder, n: usize, x0: T, x1: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooSmall {
                n,
                min: order.min_points(),
                interior: order.interior(),
                boundary: order.boundary(),
            });
        }
        let h = (x1 - x0) / T::from_usize(n - 1);
        Self::build(order, n, h)
    }

    fn recover_m(s: &SparseRows<T>, m_tilde: &SparseRows<T>, h: &T) -> Result<DenseMatrix<T>> {
        let n = s.nrows();
        let nn = T::from_usize(n);
        let c = T::one() / (h.clone() * nn);
        let mut x = m_tilde.to_dense();
        for i in 0..n {
            for j in 0..n {
                x[(i, j)] = x[(i, j)].clone() + c.clone();
            }
        }
        let inv_h = T::one() / h.clone();
        let mut last_err = Error::SingularSystem { column: 0 };
        for anchor in [0, n - 1, n / 2] {
            let mut k = s.to_dense();
            for j in 0..n {
                k[(anchor, j)] = k[(anchor, j)].clone() + inv_h.clone();
            }
            match k.lu() {
                Ok(lu) => {
                    let kinv = lu.inverse();
                    return Ok(kinv.transpose().matmul(&x).matmul(&kinv));
                }
                Err(e) => last_err = e,
            }
        }
        Err(last_err)
    }

    pub fn order(&self) -> AccuracyOrder {
        self.order
    }

    pub fn n_points(&self) -> usize {
        self.norm.len()
    }

    pub fn h(&self) -> &T {
        &self.h
    }

    pub fn norm_weights(&self) -> &[T] {
        &self.norm
    }

    pub fn d2(&self) -> &SparseRows<T> {
        &self.d2
    }

    pub fn s(&self) -> &SparseRows<T> {
        &self.s
    }

    pub fn m(&self) -> &DenseMatrix<T> {
        &self.m
    }

    /// Banded `SᵀMS`, the dissipative part of `−P·D2`.
    pub fn m_tilde(&self) -> &SparseRows<T> {
        &self.m_tilde
    }

    pub fn boundary_width(&self) -> usize {
        self.order.boundary_width()
    }

    pub fn apply_into(&self, u: &[T], out: &mut [T]) {
        self.d2.matvec_into(u, out);
    }

    pub fn apply(&self, u: &[T]) -> Vec<T> {
        self.d2.matvec(u)
    }

    /// `(Su)₀`, the left boundary derivative.
    pub fn left_derivative(&self, u: &[T]) -> T {
        self.s.row_dot(0, u)
    }

    /// `(Su)_N`, the right boundary derivative.
    pub fn right_derivative(&self, u: &[T]) -> T {
        self.s.row_dot(self.n_points() - 1, u)
    }

    /// `uᵀM̃u = (Su)ᵀM(Su)`.
    pub fn dissipation(&self, u: &[T]) -> T {
        let mu = self.m_tilde.matvec(u);
        u.iter()
            .zip(&mu)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    /// `P⁻¹(−SᵀM + B)S` assembled densely from the stored parts.
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let n = self.n_points();
        let s = self.s.to_dense();
        let mut inner = s.transpose().matmul(&self.m).scale(-T::one());
        inner[(0, 0)] = inner[(0, 0)].clone() - T::one();
        inner[(n - 1, n - 1)] = inner[(n - 1, n - 1)].clone() + T::one();
        let p_inv: Vec<T> = self.norm.iter().map(|w| T::one() / w.clone()).collect();
        DenseMatrix::from_diagonal(&p_inv).matmul(&inner).matmul(&s)
    }
}

fn set<T: Scalar>(row: &mut Vec<(usize, T)>, j: usize, v: T) {
    match row.iter_mut().find(|(c, _)| *c == j) {
        Some(e) => e.1 = v,
        None => row.push((j, v)),
    }
}

fn add<T: Scalar>(row: &mut Vec<(usize, T)>, j: usize, v: T) {
    match row.iter_mut().find(|(c, _)| *c == j) {
        Some(e) => e.1 = e.1.clone() + v,
        None => row.push((j, v)),
    }
}
