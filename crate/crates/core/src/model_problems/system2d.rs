use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::sbp_ops::FirstDerivativeOperator;
use crate::scalar::Real;

use super::{Grid1D, SemiDiscrete};

/// Coefficient matrices of `u_t + A u_x + B u_y = 0`, both symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricPair<T> {
    a: DenseMatrix<T>,
    b: DenseMatrix<T>,
}

impl<T: Real> SymmetricPair<T> {
    pub fn new(a: DenseMatrix<T>, b: DenseMatrix<T>) -> Result<Self> {
        let m = a.nrows();
        if m == 0 {
            return Err(Error::InvalidParameter {
                name: "A",
                reason: "system dimension must be at least 1".into(),
            });
        }
        for mat in [&a, &b] {
            if mat.nrows() != m || mat.ncols() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: if mat.nrows() != m { mat.nrows() } else { mat.ncols() },
                });
            }
            check_symmetric(mat, 1e-14)?;
        }
        Ok(Self { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DenseMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &DenseMatrix<T> {
        &self.b
    }
}

fn check_symmetric<T: Real>(m: &DenseMatrix<T>, rel: f64) -> Result<()> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    let scale = m.max_abs().max(1.0);
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs().to_f64_lossy());
        }
    }
    if asym > rel * scale {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok(())
}

/// Eigenvalues and orthonormal eigenvectors (columns) of a symmetric matrix
/// by cyclic Jacobi rotations.
pub fn symmetric_eigen<T: Real>(a: &DenseMatrix<T>) -> Result<(Vec<T>, DenseMatrix<T>)> {
    check_symmetric(a, 1e-12)?;
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        for j in 0..i {
            let avg = (m[(i, j)] + m[(j, i)]) / T::lit(2.0);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    let mut x = DenseMatrix::identity(n);
    let total = T::lit(m.max_abs()) * T::from_usize(n);
    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..i {
                off = off + m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() <= T::epsilon() * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * kp - s * kq;
                    m[(k, q)] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * pk - s * qk;
                    m[(q, k)] = s * pk + c * qk;
                }
                for k in 0..n {
                    let (kp, kq) = (x[(k, p)], x[(k, q)]);
                    x[(k, p)] = c * kp - s * kq;
                    x[(k, q)] = s * kp + c * kq;
                }
            }
        }
    }
    let values = (0..n).map(|i| m[(i, i)]).collect();
    Ok((values, x))
}

/// `(A⁺, A⁻)` with `A± = XΛ±Xᵀ`.
pub fn matrix_signed_parts<T: Real>(a: &DenseMatrix<T>) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    let (values, x) = symmetric_eigen(a)?;
    let n = values.len();
    let build = |keep: &dyn Fn(T) -> T| {
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = T::zero();
                for (k, &lam) in values.iter().enumerate() {
                    s = s + x[(i, k)] * keep(lam) * x[(j, k)];
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    };
    let plus = build(&|l: T| l.max(T::zero()));
    let minus = build(&|l: T| l.min(T::zero()));
    Ok((plus, minus))
}

/// Tensor grid; `x` varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D<T> {
    pub x: Grid1D<T>,
    pub y: Grid1D<T>,
}

impl<T: Real> Grid2D<T> {
    pub fn new(x: Grid1D<T>, y: Grid1D<T>) -> Self {
        Self { x, y }
    }

    /// `[0,1]²` with `n` points per direction.
    pub fn unit_square(n: usize) -> Result<Self> {
        Ok(Self::new(Grid1D::unit(n)?, Grid1D::unit(n)?))
    }
}

type SideFn<T> = Arc<dyn Fn(T, T, T, &mut [T]) + Send + Sync>;

/// Boundary data `g(x, y, t)` written into an `m`-vector.
#[derive(Clone)]
pub struct SideSignal<T> {
    eval: SideFn<T>,
    description: String,
}

impl<T: Real> SideSignal<T> {
    pub fn new(description: impl Into<String>, f: impl Fn(T, T, T, &mut [T]) + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            description: description.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new("0", |_, _, _, out: &mut [T]| out.fill(T::zero()))
    }

    pub fn eval_into(&self, x: T, y: T, t: T, out: &mut [T]) {
        (self.eval)(x, y, t, out)
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

impl<T> fmt::Debug for SideSignal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SideSignal")
            .field("description", &self.description)
            .finish()
    }
}

/// Data on the west (`x = x0`), east, south (`y = y0`) and north sides.
#[derive(Clone, Debug)]
pub struct SideData<T> {
    pub west: SideSignal<T>,
    pub east: SideSignal<T>,
    pub south: SideSignal<T>,
    pub north: SideSignal<T>,
}

impl<T: Real> SideData<T> {
    pub fn homogeneous() -> Self {
        Self::everywhere(SideSignal::zero())
    }

    /// The same trace on all four sides.
    pub fn everywhere(signal: SideSignal<T>) -> Self {
        Self {
            west: signal.clone(),
            east: signal.clone(),
            south: signal.clone(),
            north: signal,
        }
    }
}

/// `v_t + (I⊗D_x⊗A)v + (D_y⊗I⊗B)v = SAT` with far-field SATs on all sides.
/// The state index of component `k` at `(x_i, y_j)` is `(j·n_x + i)·m + k`.
#[derive(Debug, Clone)]
pub struct Hyperbolic2D<T: Real> {
    pair: SymmetricPair<T>,
    a_plus: DenseMatrix<T>,
    a_minus: DenseMatrix<T>,
    b_plus: DenseMatrix<T>,
    b_minus: DenseMatrix<T>,
    grid: Grid2D<T>,
    op_x: FirstDerivativeOperator<T>,
    op_y: FirstDerivativeOperator<T>,
    weights: Vec<T>,
    data: SideData<T>,
    label: String,
}

pub fn assemble_2d_hyperbolic<T: Real>(
    pair: SymmetricPair<T>,
    grid: Grid2D<T>,
    op_x: FirstDerivativeOperator<T>,
    op_y: FirstDerivativeOperator<T>,
    data: SideData<T>,
) -> Result<Hyperbolic2D<T>> {
    grid.x.check_operator(op_x.n_points(), *op_x.h())?;
    grid.y.check_operator(op_y.n_points(), *op_y.h())?;
    let (a_plus, a_minus) = matrix_signed_parts(pair.a())?;
    let (b_plus, b_minus) = matrix_signed_parts(pair.b())?;
    let m = pair.dim();
    let mut weights = Vec::with_capacity(op_x.n_points() * op_y.n_points() * m);
    for &wy in op_y.norm_weights() {
        for &wx in op_x.norm_weights() {
            weights.extend(std::iter::repeat_n(wy * wx, m));
        }
    }
    let label = format!(
        "2-D hyperbolic m={} {} {}x{}",
        m,
        op_x.order(),
        op_x.n_points(),
        op_y.n_points()
    );
    Ok(Hyperbolic2D {
        pair,
        a_plus,
        a_minus,
        b_plus,
        b_minus,
        grid,
        op_x,
        op_y,
        weights,
        data,
        label,
    })
}

fn mul_acc<T: Real>(mat: &DenseMatrix<T>, x: &[T], scale: T, out: &mut [T]) {
    for (i, o) in out.iter_mut().enumerate() {
        let row = mat.row(i);
        let s = row.iter().zip(x).fold(T::zero(), |acc, (a, b)| acc + *a * *b);
        *o = *o + scale * s;
    }
}

fn quad<T: Real>(mat: &DenseMatrix<T>, x: &[T], y: &[T]) -> T {
    (0..x.len()).fold(T::zero(), |acc, i| {
        let row = mat.row(i);
        acc + x[i] * row.iter().zip(y).fold(T::zero(), |s, (a, b)| s + *a * *b)
    })
}

impl<T: Real> Hyperbolic2D<T> {
    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    pub fn pair(&self) -> &SymmetricPair<T> {
        &self.pair
    }

    pub fn components(&self) -> usize {
        self.pair.dim()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (j * self.grid.x.n_points() + i) * self.components() + k
    }

    /// Samples `f(x, y, out)` into a state vector.
    pub fn sample(&self, f: impl Fn(T, T, &mut [T])) -> Vec<T> {
        let m = self.components();
        let mut state = vec![T::zero(); self.weights.len()];
        for (j, &y) in self.grid.y.nodes().iter().enumerate() {
            for (i, &x) in self.grid.x.nodes().iter().enumerate() {
                let s = self.index(i, j, 0);
                f(x, y, &mut state[s..s + m]);
            }
        }
        state
    }

    /// Energy rate contributed by one side point: `gᵀKg − (v−g)ᵀK(v−g) + vᵀNv`
    /// for an inflow part `K ⪰ 0` and outflow part `N ⪯ 0` seen from inside.
    fn side_rate(inflow: &DenseMatrix<T>, outflow: &DenseMatrix<T>, v: &[T], g: &[T], diff: &mut [T]) -> T {
        for ((d, a), b) in diff.iter_mut().zip(v).zip(g) {
            *d = *a - *b;
        }
        quad(inflow, g, g) - quad(inflow, diff, diff) + quad(outflow, v, v)
    }
}

impl<T: Real> SemiDiscrete<T> for Hyperbolic2D<T> {
    fn label(&self) -> &str {
        &self.label
    }

    fn state_dim(&self) -> usize {
        self.weights.len()
    }

    fn norm_weights(&self) -> &[T] {
        &self.weights
    }

    fn rhs_into(&self, v: &[T], t: T, out: &mut [T]) {
        let m = self.components();
        let nx = self.grid.x.n_points();
        let ny = self.grid.y.n_points();
        let mut acc = vec![T::zero(); m];
        let mut g = vec![T::zero(); m];
        let mut diff = vec![T::zero(); m];
        out.fill(T::zero());

        for j in 0..ny {
            for i in 0..nx {
                let base = self.index(i, j, 0);
                acc.fill(T::zero());
                for (c, d) in self.op_x.d().row(i) {
                    let s = self.index(*c, j, 0);
                    for k in 0..m {
                        acc[k] = acc[k] + *d * v[s + k];
                    }
                }
                mul_acc(self.pair.a(), &acc, -T::one(), &mut out[base..base + m]);
                acc.fill(T::zero());
                for (c, d) in self.op_y.d().row(j) {
                    let s = self.index(i, *c, 0);
                    for k in 0..m {
                        acc[k] = acc[k] + *d * v[s + k];
                    }
                }
                mul_acc(self.pair.b(), &acc, -T::one(), &mut out[base..base + m]);
            }
        }

        let px = self.op_x.norm_weights();
        let py = self.op_y.norm_weights();
        let (x0, x1) = (self.grid.x.x0(), self.grid.x.x1());
        let (y0, y1) = (self.grid.y.x0(), self.grid.y.x1());
        let mut penalize = |i: usize, j: usize, signal: &SideSignal<T>, x: T, y: T, mat: &DenseMatrix<T>, scale: T| {
            let base = self.index(i, j, 0);
            signal.eval_into(x, y, t, &mut g);
            for k in 0..m {
                diff[k] = v[base + k] - g[k];
            }
            mul_acc(mat, &diff, scale, &mut out[base..base + m]);
        };
        for (j, &y) in self.grid.y.nodes().iter().enumerate() {
            penalize(0, j, &self.data.west, x0, y, &self.a_plus, -T::one() / px[0]);
            penalize(nx - 1, j, &self.data.east, x1, y, &self.a_minus, T::one() / px[nx - 1]);
        }
        for (i, &x) in self.grid.x.nodes().iter().enumerate() {
            penalize(i, 0, &self.data.south, x, y0, &self.b_plus, -T::one() / py[0]);
            penalize(i, ny - 1, &self.data.north, x, y1, &self.b_minus, T::one() / py[ny - 1]);
        }
    }

    /// Sum over sides of `gᵀKg − (v−g)ᵀK(v−g) + vᵀNv`, weighted by the
    /// tangential norm: `K = A⁺, N = A⁻` on the west side, `K = −A⁻,
    /// N = −A⁺` on the east side and likewise with `B` south and north.
    fn boundary_rate(&self, v: &[T], t: T) -> T {
        let m = self.components();
        let nx = self.grid.x.n_points();
        let ny = self.grid.y.n_points();
        let px = self.op_x.norm_weights();
        let py = self.op_y.norm_weights();
        let neg_a_minus = self.a_minus.scale(-T::one());
        let neg_a_plus = self.a_plus.scale(-T::one());
        let neg_b_minus = self.b_minus.scale(-T::one());
        let neg_b_plus = self.b_plus.scale(-T::one());
        let mut g = vec![T::zero(); m];
        let mut diff = vec![T::zero(); m];
        let mut rate = T::zero();
        let (x0, x1) = (self.grid.x.x0(), self.grid.x.x1());
        let (y0, y1) = (self.grid.y.x0(), self.grid.y.x1());
        for (j, &y) in self.grid.y.nodes().iter().enumerate() {
            let west = self.index(0, j, 0);
            self.data.west.eval_into(x0, y, t, &mut g);
            rate = rate + py[j] * Self::side_rate(&self.a_plus, &self.a_minus, &v[west..west + m], &g, &mut diff);
            let east = self.index(nx - 1, j, 0);
            self.data.east.eval_into(x1, y, t, &mut g);
            rate = rate + py[j] * Self::side_rate(&neg_a_minus, &neg_a_plus, &v[east..east + m], &g, &mut diff);
        }
        for (i, &x) in self.grid.x.nodes().iter().enumerate() {
            let south = self.index(i, 0, 0);
            self.data.south.eval_into(x, y0, t, &mut g);
            rate = rate + px[i] * Self::side_rate(&self.b_plus, &self.b_minus, &v[south..south + m], &g, &mut diff);
            let north = self.index(i, ny - 1, 0);
            self.data.north.eval_into(x, y1, t, &mut g);
            rate = rate + px[i] * Self::side_rate(&neg_b_minus, &neg_b_plus, &v[north..north + m], &g, &mut diff);
        }
        rate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_problems::{assemble_advection, BoundarySignal, PenaltyConfig};
    use crate::sbp_ops::AccuracyOrder;

    fn mat(rows: &[&[f64]]) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn signed_parts_examples() {
        let (p, n) = matrix_signed_parts(&mat(&[&[1.0, 0.0], &[0.0, -1.0]])).unwrap();
        assert_eq!(p, mat(&[&[1.0, 0.0], &[0.0, 0.0]]));
        assert_eq!(n, mat(&[&[0.0, 0.0], &[0.0, -1.0]]));
        let (p, n) = matrix_signed_parts(&mat(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!(p.sub(&mat(&[&[0.5, 0.5], &[0.5, 0.5]])).max_abs() < 1e-15);
        assert!(n.sub(&mat(&[&[-0.5, 0.5], &[0.5, -0.5]])).max_abs() < 1e-15);
        let (p, n) = matrix_signed_parts(&DenseMatrix::<f64>::zeros(3, 3)).unwrap();
        assert_eq!(p.max_abs() + n.max_abs(), 0.0);
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let r = matrix_signed_parts(&mat(&[&[0.0, 1.0], &[0.5, 0.0]]));
        assert!(matches!(r, Err(Error::NotSymmetric { .. })));
        let r = SymmetricPair::new(mat(&[&[1.0]]), mat(&[&[1.0, 0.0], &[0.0, 1.0]]));
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn scalar_case_decouples_into_advection_lines() {
        let n = 17;
        let pair = SymmetricPair::new(mat(&[&[1.0]]), mat(&[&[0.0]])).unwrap();
        let grid = Grid2D::unit_square(n).unwrap();
        let op = grid.x.first_derivative(AccuracyOrder::FOURTH).unwrap();
        let trace = SideSignal::new("sin(x - t)", |x: f64, _y, t, out: &mut [f64]| out[0] = (x - t).sin());
        let sys =
            assemble_2d_hyperbolic(pair, grid.clone(), op.clone(), op.clone(), SideData::everywhere(trace)).unwrap();
        let line = assemble_advection(
            1.0,
            grid.x.clone(),
            op,
            &PenaltyConfig::default(),
            BoundarySignal::new("sin(-t)", |t: f64| (-t).sin()),
        )
        .unwrap();
        let state = sys.sample(|x, y, out| out[0] = (3.0 * x).cos() * (1.0 + y));
        let r = sys.rhs(&state, 0.3);
        for j in 0..n {
            let row = &state[j * n..(j + 1) * n];
            let expected = line.rhs(row, 0.3);
            for i in 0..n {
                assert!((r[j * n + i] - expected[i]).abs() < 1e-12, "line {j} node {i}");
            }
        }
    }
}
