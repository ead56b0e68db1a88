use serde::Serialize;

use crate::linalg::{ldlt_pivots, DenseMatrix};
use crate::scalar::Scalar;

use super::{FirstDerivativeOperator, SecondDerivativeOperator};

/// Bound on `‖Q + Qᵀ − B‖_max` and on the `D2` reconstruction residual.
pub const SBP_TOLERANCE: f64 = 1e-13;
/// Bound on the relative `D2` reconstruction residual, which collects
/// roundoff from the product `SᵀMS`.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-11;
/// Bound on monomial accuracy residuals over `[0, 1]`.
pub const ACCURACY_TOLERANCE: f64 = 1e-10;
/// Second-derivative accuracy residuals may also reach this many multiples
/// of `ε·‖D2‖_∞`, the roundoff of one application.
pub const ROUNDOFF_MULTIPLIER: f64 = 100.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccuracyResidual<T> {
    pub degree: u32,
    pub interior: T,
    pub boundary: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorReport<T> {
    /// `‖Q+Qᵀ−B‖_max` for first-derivative operators. For second-derivative
    /// ones `‖D2 − P⁻¹(−SᵀM+B)S‖_max / max(1, ‖D2‖_max)`, since the entries
    /// grow like `h⁻²`.
    pub max_sbp_residual: T,
    /// Bound applied to `max_sbp_residual`.
    pub sbp_tolerance: f64,
    pub accuracy: Vec<AccuracyResidual<T>>,
    /// Bound applied to the accuracy residuals of exactly differentiated degrees.
    pub accuracy_tolerance: f64,
    /// Highest monomial degree the interior rows must differentiate exactly.
    pub exact_interior_degree: u32,
    /// Highest monomial degree every row must differentiate exactly.
    pub exact_boundary_degree: u32,
    pub min_norm_weight_over_h: f64,
    pub spd_check: bool,
    /// Extreme eigenvalues of `M/h` (second-derivative operators only).
    pub m_spectrum_over_h: Option<(f64, f64)>,
}

impl<T: Scalar> OperatorReport<T> {
    /// True when every residual is within the crate tolerances.
    pub fn passes(&self) -> bool {
        self.max_sbp_residual.to_f64_lossy() <= self.sbp_tolerance
            && self.min_norm_weight_over_h > 0.0
            && self.spd_check
            && self.accuracy.iter().all(|a| {
                let int_ok =
                    a.degree > self.exact_interior_degree || a.interior.to_f64_lossy() <= self.accuracy_tolerance;
                let bnd_ok =
                    a.degree > self.exact_boundary_degree || a.boundary.to_f64_lossy() <= self.accuracy_tolerance;
                int_ok && bnd_ok
            })
    }

    pub fn accuracy_for(&self, degree: u32) -> Option<&AccuracyResidual<T>> {
        self.accuracy.iter().find(|a| a.degree == degree)
    }
}

fn monomial<T: Scalar>(x: &[T], k: u32) -> Vec<T> {
    x.iter()
        .map(|xi| (0..k).fold(T::one(), |acc, _| acc * xi.clone()))
        .collect()
}

/// Max residual over interior and boundary rows of `applied − exact`.
fn split_residual<T: Scalar>(applied: &[T], exact: &[T], width: usize) -> (T, T) {
    let n = applied.len();
    let mut interior = T::zero();
    let mut boundary = T::zero();
    for (i, (a, e)) in applied.iter().zip(exact).enumerate() {
        let r = (a.clone() - e.clone()).abs_value();
        if i < width || i >= n - width {
            boundary = boundary.max_of(r);
        } else {
            interior = interior.max_of(r);
        }
    }
    (interior, boundary)
}

fn first_derivative_residuals<T: Scalar>(
    apply: impl Fn(&[T]) -> Vec<T>,
    x: &[T],
    width: usize,
    max_degree: u32,
) -> Vec<AccuracyResidual<T>> {
    (0..=max_degree)
        .map(|k| {
            let du = apply(&monomial(x, k));
            let exact: Vec<T> = if k == 0 {
                vec![T::zero(); x.len()]
            } else {
                monomial(x, k - 1)
                    .into_iter()
                    .map(|v| v * T::from_usize(k as usize))
                    .collect()
            };
            let (interior, boundary) = split_residual(&du, &exact, width);
            AccuracyResidual {
                degree: k,
                interior,
                boundary,
            }
        })
        .collect()
}

/// Residuals of a second-derivative matrix on monomials `x^k`, `k ≤ max_degree`.
pub fn second_derivative_residuals<T: Scalar>(
    apply: impl Fn(&[T]) -> Vec<T>,
    x: &[T],
    width: usize,
    max_degree: u32,
) -> Vec<AccuracyResidual<T>> {
    (0..=max_degree)
        .map(|k| {
            let du = apply(&monomial(x, k));
            let exact: Vec<T> = if k < 2 {
                vec![T::zero(); x.len()]
            } else {
                monomial(x, k - 2)
                    .into_iter()
                    .map(|v| v * T::from_usize((k * (k - 1)) as usize))
                    .collect()
            };
            let (interior, boundary) = split_residual(&du, &exact, width);
            AccuracyResidual {
                degree: k,
                interior,
                boundary,
            }
        })
        .collect()
}

/// Certifies a first-derivative operator: SBP residual, monomial accuracy on
/// the operator's own nodes `x_j = j·h`, norm positivity.
pub fn verify_first_derivative<T: Scalar>(op: &FirstDerivativeOperator<T>) -> OperatorReport<T> {
    let q = op.dense_q();
    let residual = q.add(&q.transpose()).sub(&op.boundary_matrix());
    let max_sbp_residual = max_abs(&residual);
    let x = op.nodes(T::zero());
    let order = op.order();
    let accuracy = first_derivative_residuals(|u| op.apply(u), &x, op.boundary_width(), order.interior() + 1);
    let h = op.h().to_f64_lossy();
    let min_w = op
        .norm_weights()
        .iter()
        .map(Scalar::to_f64_lossy)
        .fold(f64::INFINITY, f64::min);
    OperatorReport {
        max_sbp_residual,
        sbp_tolerance: SBP_TOLERANCE,
        accuracy,
        accuracy_tolerance: ACCURACY_TOLERANCE,
        exact_interior_degree: order.interior(),
        exact_boundary_degree: order.boundary(),
        min_norm_weight_over_h: min_w / h,
        spd_check: op.norm_weights().iter().all(|w| *w > T::zero()),
        m_spectrum_over_h: None,
    }
}

/// Certifies a narrow second-derivative operator: reconstruction from its
/// parts, symmetry and positive definiteness of `M`, monomial accuracy.
pub fn verify_second_derivative<T: Scalar>(op: &SecondDerivativeOperator<T>) -> OperatorReport<T> {
    let d2 = op.d2().to_dense();
    let residual = op.reconstruct().sub(&d2);
    let m = op.m();
    let asym = max_abs(&m.sub(&m.transpose()));
    let symmetric = asym.to_f64_lossy() <= SBP_TOLERANCE * max_abs(m).to_f64_lossy().max(1.0);
    let spd = symmetric && ldlt_pivots(m).is_some();
    let x: Vec<T> = (0..op.n_points()).map(|j| op.h().clone() * T::from_usize(j)).collect();
    let order = op.order();
    let accuracy = second_derivative_residuals(|u| op.apply(u), &x, op.boundary_width(), order.interior() + 2);
    let h = op.h().to_f64_lossy();
    let min_w = op
        .norm_weights()
        .iter()
        .map(Scalar::to_f64_lossy)
        .fold(f64::INFINITY, f64::min);
    OperatorReport {
        max_sbp_residual: max_abs(&residual) / max_abs(&d2).max_of(T::one()),
        sbp_tolerance: RECONSTRUCTION_TOLERANCE,
        accuracy,
        accuracy_tolerance: ACCURACY_TOLERANCE.max(ROUNDOFF_MULTIPLIER * f64::EPSILON * row_sum_norm(&d2)),
        exact_interior_degree: order.interior() + 1,
        exact_boundary_degree: order.boundary() + 1,
        min_norm_weight_over_h: min_w / h,
        spd_check: spd,
        m_spectrum_over_h: spd.then(|| {
            let (lo, hi) = extreme_eigenvalues(m);
            (lo / h, hi / h)
        }),
    }
}

fn row_sum_norm<T: Scalar>(m: &DenseMatrix<T>) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].to_f64_lossy().abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `D·D`, the wide second derivative (`S = D`, `M = P`).
pub fn compose_wide_second_derivative<T: Scalar>(op: &FirstDerivativeOperator<T>) -> DenseMatrix<T> {
    let d = op.dense_d();
    d.matmul(&d)
}

fn max_abs<T: Scalar>(m: &DenseMatrix<T>) -> T {
    let mut best = T::zero();
    for i in 0..m.nrows() {
        for v in m.row(i) {
            best = best.max_of(v.abs_value());
        }
    }
    best
}

/// Smallest and largest eigenvalue of a symmetric positive definite matrix,
/// by power and inverse power iteration in `f64`.
fn extreme_eigenvalues<T: Scalar>(m: &DenseMatrix<T>) -> (f64, f64) {
    let n = m.nrows();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| m.row(i).iter().map(Scalar::to_f64_lossy).collect())
        .collect();
    let mf = DenseMatrix::from_rows(&rows).expect("square");
    let start: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    let rayleigh = |apply: &dyn Fn(&[f64]) -> Vec<f64>| {
        let mut v = start.clone();
        let mut est = 0.0;
        for _ in 0..500 {
            let nv = norm2(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            let w = apply(&v);
            est = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
            v = w;
        }
        est
    };
    let hi = rayleigh(&|v| mf.matvec(v));
    let lo = match mf.lu() {
        Ok(lu) => 1.0 / rayleigh(&|v| lu.solve(v)),
        Err(_) => 0.0,
    };
    (lo, hi)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbp_ops::AccuracyOrder;
    use num_rational::BigRational;

    #[test]
    fn well_built_fourth_order_passes() {
        let op = FirstDerivativeOperator::on_interval(AccuracyOrder::FOURTH, 33, 0.0, 1.0).unwrap();
        let rep = verify_first_derivative(&op);
        assert!(rep.max_sbp_residual <= 1e-13);
        assert!(rep.passes(), "{rep:?}");
    }

    #[test]
    fn perturbed_q_entry_shows_up_in_residual() {
        let op = FirstDerivativeOperator::on_interval(AccuracyOrder::FOURTH, 17, 0.0f64, 1.0).unwrap();
        let delta = 1e-6;
        let perturb = |i: usize, j: usize| {
            let mut q = op.dense_q();
            q[(i, j)] += delta;
            let bad = FirstDerivativeOperator::from_parts(op.order(), *op.h(), op.norm_weights().to_vec(), q).unwrap();
            verify_first_derivative(&bad).max_sbp_residual
        };
        // Diagonal entries enter Q+Qᵀ twice, off-diagonal ones once.
        assert!((perturb(3, 3) - 2.0 * delta).abs() < 1e-15);
        assert!((perturb(2, 5) - delta).abs() < 1e-15);
        assert!(!{
            let mut q = op.dense_q();
            q[(3, 3)] += delta;
            verify_first_derivative(
                &FirstDerivativeOperator::from_parts(op.order(), *op.h(), op.norm_weights().to_vec(), q).unwrap(),
            )
            .passes()
        });
    }

    #[test]
    fn second_order_boundary_error_on_quadratic() {
        // Row 0 is (u1 - u0)/h; on x² it gives h instead of 0.
        let n = 17;
        let h = 1.0f64 / 16.0;
        let op = FirstDerivativeOperator::build(AccuracyOrder::SECOND, n, h).unwrap();
        let rep = verify_first_derivative(&op);
        let r2 = rep.accuracy_for(2).unwrap();
        assert!(r2.interior <= 1e-12);
        assert!((r2.boundary - h).abs() < 1e-14);
    }

    #[test]
    fn exact_certification_has_zero_residuals() {
        for order in AccuracyOrder::ALL {
            let n = 17;
            let h = BigRational::from_ratio(1, 16);
            let rep = verify_first_derivative(&FirstDerivativeOperator::build(order, n, h.clone()).unwrap());
            assert_eq!(rep.max_sbp_residual, BigRational::from_ratio(0, 1));
            for a in &rep.accuracy {
                if a.degree <= order.interior() {
                    assert_eq!(a.interior, BigRational::from_ratio(0, 1), "{order} k={}", a.degree);
                }
                if a.degree <= order.boundary() {
                    assert_eq!(a.boundary, BigRational::from_ratio(0, 1), "{order} k={}", a.degree);
                }
            }
            let rep2 = verify_second_derivative(&SecondDerivativeOperator::build(order, n, h).unwrap());
            assert_eq!(rep2.max_sbp_residual, BigRational::from_ratio(0, 1));
            assert!(rep2.spd_check, "{order}");
            for a in &rep2.accuracy {
                if a.degree <= order.interior() + 1 {
                    assert_eq!(a.interior, BigRational::from_ratio(0, 1), "{order} k={}", a.degree);
                }
                if a.degree <= order.boundary() + 1 {
                    assert_eq!(a.boundary, BigRational::from_ratio(0, 1), "{order} k={}", a.degree);
                }
            }
        }
    }

    #[test]
    fn wide_composition_properties() {
        let op = FirstDerivativeOperator::on_interval(AccuracyOrder::SECOND, 17, 0.0, 1.0).unwrap();
        let dd = compose_wide_second_derivative(&op);
        let x = op.nodes(0.0);
        let res = second_derivative_residuals(|u| dd.matvec(u), &x, 2, 2);
        assert!(res[0].interior < 1e-12 && res[0].boundary < 1e-12);
        assert!(res[2].interior < 1e-10);
    }
}
