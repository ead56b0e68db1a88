use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SparseRows};
use crate::scalar::{Real, Scalar};

use super::AccuracyOrder;

/// First-derivative SBP operator `D = P⁻¹Q` on `n` points with spacing `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstDerivativeOperator<T> {
    order: AccuracyOrder,
    h: T,
    norm: Vec<T>,
    q: SparseRows<T>,
    d: SparseRows<T>,
}

impl<T: Scalar> FirstDerivativeOperator<T> {
    pub fn build(order: AccuracyOrder, n: usize, h: T) -> Result<Self> {
        order.check_grid(n)?;
        if h <= T::zero() {
            return Err(Error::InvalidParameter {
                name: "h",
                reason: format!("grid spacing must be positive, got {h:?}"),
            });
        }
        let table = order.first_table();
        let b = table.norm.len();
        let r = |(num, den): (i64, i64)| T::from_ratio(num, den);

        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for (i, row) in rows.iter_mut().enumerate() {
            let boundary_row = i < b || i >= n - b;
            if boundary_row {
                continue;
            }
            for (k, &c) in table.interior.iter().enumerate() {
                let off = k + 1;
                row.push((i - off, -r(c)));
                row.push((i + off, r(c)));
            }
        }
        // Boundary rows: the tabulated block, then the interior stencil
        // spilling past the block.
        for i in 0..b {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for j in 0..b {
                left.push((j, r(table.block[i][j])));
                right.push((n - 1 - j, -r(table.block[i][j])));
            }
            for (k, &c) in table.interior.iter().enumerate() {
                let j = i + k + 1;
                if j >= b {
                    left.push((j, r(c)));
                    right.push((n - 1 - j, -r(c)));
                }
            }
            rows[i] = left;
            rows[n - 1 - i] = right;
        }
        let q = SparseRows::new(n, rows);

        let mut norm = vec![h.clone(); n];
        for (i, &w) in table.norm.iter().enumerate() {
            norm[i] = h.clone() * r(w);
            norm[n - 1 - i] = h.clone() * r(w);
        }
        Ok(Self::assemble(order, h, norm, q))
    }

    /// Builds on `[x0, x1]` with `n` points.
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

    /// Wraps externally supplied parts without checking the SBP property;
    /// use [`super::verify_first_derivative`] to certify them.
    pub fn from_parts(order: AccuracyOrder, h: T, norm: Vec<T>, q: DenseMatrix<T>) -> Result<Self> {
        let n = norm.len();
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: q.nrows(),
            });
        }
        if let Some(i) = norm.iter().position(|w| *w <= T::zero()) {
            return Err(Error::InvalidParameter {
                name: "P",
                reason: format!("norm weight {i} is not positive"),
            });
        }
        Ok(Self::assemble(order, h, norm, SparseRows::from_dense(&q)))
    }

    fn assemble(order: AccuracyOrder, h: T, norm: Vec<T>, q: SparseRows<T>) -> Self {
        let inv: Vec<T> = norm.iter().map(|w| T::one() / w.clone()).collect();
        let d = q.scale_rows(&inv);
        Self { order, h, norm, q, d }
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

    /// Diagonal of `P`.
    pub fn norm_weights(&self) -> &[T] {
        &self.norm
    }

    pub fn q(&self) -> &SparseRows<T> {
        &self.q
    }

    pub fn d(&self) -> &SparseRows<T> {
        &self.d
    }

    pub fn boundary_width(&self) -> usize {
        self.order.boundary_width()
    }

    /// `out = D u`.
    pub fn apply_into(&self, u: &[T], out: &mut [T]) {
        self.d.matvec_into(u, out);
    }

    pub fn apply(&self, u: &[T]) -> Vec<T> {
        self.d.matvec(u)
    }

    /// `(D u)_i` for a single row.
    pub fn apply_row(&self, i: usize, u: &[T]) -> T {
        self.d.row_dot(i, u)
    }

    pub fn dense_q(&self) -> DenseMatrix<T> {
        self.q.to_dense()
    }

    pub fn dense_d(&self) -> DenseMatrix<T> {
        self.d.to_dense()
    }

    pub fn dense_p(&self) -> DenseMatrix<T> {
        DenseMatrix::from_diagonal(&self.norm)
    }

    /// `B = diag(-1, 0, …, 0, 1)`.
    pub fn boundary_matrix(&self) -> DenseMatrix<T> {
        let n = self.n_points();
        let mut b = DenseMatrix::zeros(n, n);
        b[(0, 0)] = -T::one();
        b[(n - 1, n - 1)] = T::one();
        b
    }

    /// Grid coordinates `x0 + j·h`.
    pub fn nodes(&self, x0: T) -> Vec<T> {
        (0..self.n_points())
            .map(|j| x0.clone() + self.h.clone() * T::from_usize(j))
            .collect()
    }

    /// `uᵀ P v`.
    pub fn inner(&self, u: &[T], v: &[T]) -> T {
        self.norm
            .iter()
            .zip(u.iter().zip(v))
            .fold(T::zero(), |acc, (w, (a, b))| acc + w.clone() * a.clone() * b.clone())
    }
}

/// Dense JSON form `{order:{p,r}, n, h, P:[…], Q:[[…]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorDocument {
    pub order: AccuracyOrder,
    pub n: usize,
    pub h: f64,
    #[serde(rename = "P")]
    pub p: Vec<f64>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
}

impl<T: Real> FirstDerivativeOperator<T> {
    pub fn to_document(&self) -> OperatorDocument {
        OperatorDocument {
            order: self.order,
            n: self.n_points(),
            h: self.h.to_f64_lossy(),
            p: self.norm.iter().map(Scalar::to_f64_lossy).collect(),
            q: self
                .dense_q()
                .to_rows()
                .into_iter()
                .map(|r| r.iter().map(Scalar::to_f64_lossy).collect())
                .collect(),
        }
    }

    pub fn from_document(doc: &OperatorDocument) -> Result<Self> {
        let order = AccuracyOrder::new(doc.order.interior(), doc.order.boundary())?;
        if doc.p.len() != doc.n {
            return Err(Error::Document(format!("P has {} entries, n = {}", doc.p.len(), doc.n)));
        }
        let rows: Vec<Vec<T>> = doc.q.iter().map(|r| r.iter().map(|&v| T::lit(v)).collect()).collect();
        let q = DenseMatrix::from_rows(&rows).map_err(|e| Error::Document(e.to_string()))?;
        Self::from_parts(order, T::lit(doc.h), doc.p.iter().map(|&v| T::lit(v)).collect(), q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn second_order_matches_hand_derivation() {
        let op = FirstDerivativeOperator::build(AccuracyOrder::SECOND, 5, 0.25).unwrap();
        let h = 0.25;
        let expected_p = [h / 2.0, h, h, h, h / 2.0];
        assert_eq!(op.norm_weights(), &expected_p);
        let d = op.dense_d();
        assert_eq!(d.row(0), &[-4.0, 4.0, 0.0, 0.0, 0.0]);
        assert_eq!(d.row(2), &[0.0, -2.0, 0.0, 2.0, 0.0]);
        assert_eq!(d.row(4), &[0.0, 0.0, 0.0, -4.0, 4.0]);
    }

    #[test]
    fn grid_too_small() {
        assert!(matches!(
            FirstDerivativeOperator::build(AccuracyOrder::SIXTH, 9, 0.1),
            Err(Error::GridTooSmall { min: 13, .. })
        ));
        assert!(FirstDerivativeOperator::build(AccuracyOrder::SIXTH, 13, 0.1).is_ok());
        assert!(FirstDerivativeOperator::build(AccuracyOrder::FOURTH, 8, 0.1).is_err());
        assert!(FirstDerivativeOperator::build(AccuracyOrder::FOURTH, 9, -0.1).is_err());
    }

    #[test]
    fn exact_sbp_property_holds_with_rationals() {
        for order in AccuracyOrder::ALL {
            let n = order.min_points() + 3;
            let h = BigRational::from_ratio(1, (n - 1) as i64);
            let op = FirstDerivativeOperator::build(order, n, h).unwrap();
            let q = op.dense_q();
            let s = q.add(&q.transpose());
            assert_eq!(s, op.boundary_matrix(), "order {order}");
        }
    }

    #[test]
    fn constants_and_linears() {
        for order in AccuracyOrder::ALL {
            let n = 33;
            let op = FirstDerivativeOperator::on_interval(order, n, 0.0f64, 1.0).unwrap();
            let ones = vec![1.0; n];
            assert!(op.apply(&ones).iter().all(|v| v.abs() < 1e-12));
            let x = op.nodes(0.0);
            assert!(op.apply(&x).iter().all(|v| (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn document_round_trip() {
        let op = FirstDerivativeOperator::on_interval(AccuracyOrder::FOURTH, 17, 0.0, 1.0).unwrap();
        let doc = op.to_document();
        let json = serde_json::to_string(&doc).unwrap();
        assert!(json.contains("\"order\":{\"p\":4,\"r\":2}"));
        let back: OperatorDocument = serde_json::from_str(&json).unwrap();
        let op2 = FirstDerivativeOperator::<f64>::from_document(&back).unwrap();
        assert_eq!(op, op2);
    }
}
