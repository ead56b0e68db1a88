//! Semi-discrete SBP-SAT systems for the scalar, interface, system and
//! nonlinear model problems.
//!
//! Every system exposes its right-hand side together with the diagonal norm
//! it is stable in and the exact algebraic energy rate predicted by the
//! energy method, so `2⟨u, rhs(u)⟩ = boundary_rate(u)` can be audited to
//! roundoff.

mod advection;
mod burgers;
mod diffusion;
mod interface;
mod split;
mod steady;
mod stretched;
mod system2d;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sbp_ops::{AccuracyOrder, FirstDerivativeOperator, SecondDerivativeOperator};
use crate::scalar::Real;

pub use advection::{assemble_advection, AdvectionSystem};
pub use burgers::{assemble_burgers_split, BurgersSystem};
pub use diffusion::{assemble_advection_diffusion, AdvectionDiffusionSystem, SecondDerivativeMode};
pub use interface::{assemble_two_block_advection, InterfaceTerms, TwoBlockAdvection};
pub use split::{assemble_split_variable_advection, SplitAdvectionSystem};
pub use steady::{assemble_steady_transport, SteadySystem};
pub use stretched::{assemble_stretched_advection, MappingSpec, StretchedAdvectionSystem};
pub use system2d::{
    assemble_2d_hyperbolic, matrix_signed_parts, symmetric_eigen, Grid2D, Hyperbolic2D, SideData, SideSignal,
    SymmetricPair,
};

/// A method-of-lines system `du/dt = rhs(u, t)` with its energy norm.
pub trait SemiDiscrete<T: Real>: Send + Sync {
    fn label(&self) -> &str;

    fn state_dim(&self) -> usize;

    /// Diagonal of the norm matrix: `‖u‖² = Σ wᵢ uᵢ²`.
    fn norm_weights(&self) -> &[T];

    fn rhs_into(&self, u: &[T], t: T, out: &mut [T]);

    /// `d/dt ‖u‖²` predicted by the energy identity, including dissipation
    /// and forcing terms, so that it equals `2⟨u, rhs(u, t)⟩` exactly.
    fn boundary_rate(&self, u: &[T], t: T) -> T;

    /// Whether `rhs` is affine in the state (linear for homogeneous data).
    fn is_linear(&self) -> bool {
        true
    }

    /// Non-fatal assembly diagnostics, e.g. an inadmissible penalty that was
    /// explicitly allowed.
    fn warnings(&self) -> &[String] {
        &[]
    }

    fn rhs(&self, u: &[T], t: T) -> Vec<T> {
        let mut out = vec![T::zero(); self.state_dim()];
        self.rhs_into(u, t, &mut out);
        out
    }

    /// `‖u‖²` in the system norm.
    fn energy(&self, u: &[T]) -> T {
        self.norm_weights()
            .iter()
            .zip(u)
            .fold(T::zero(), |acc, (w, v)| acc + *w * *v * *v)
    }
}

impl<T: Real, S: SemiDiscrete<T> + ?Sized> SemiDiscrete<T> for Box<S> {
    fn label(&self) -> &str {
        (**self).label()
    }
    fn state_dim(&self) -> usize {
        (**self).state_dim()
    }
    fn norm_weights(&self) -> &[T] {
        (**self).norm_weights()
    }
    fn rhs_into(&self, u: &[T], t: T, out: &mut [T]) {
        (**self).rhs_into(u, t, out)
    }
    fn boundary_rate(&self, u: &[T], t: T) -> T {
        (**self).boundary_rate(u, t)
    }
    fn is_linear(&self) -> bool {
        (**self).is_linear()
    }
    fn warnings(&self) -> &[String] {
        (**self).warnings()
    }
}

/// Uniform grid `x_j = x0 + j·h` on `[x0, x1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D<T> {
    x0: T,
    x1: T,
    h: T,
    nodes: Vec<T>,
}

impl<T: Real> Grid1D<T> {
    pub fn new(x0: T, x1: T, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidParameter {
                name: "n_points",
                reason: format!("need at least 2 points, got {n_points}"),
            });
        }
        if !(x1 > x0) {
            return Err(Error::InvalidParameter {
                name: "interval",
                reason: format!("empty interval [{x0}, {x1}]"),
            });
        }
        let h = (x1 - x0) / T::from_usize(n_points - 1);
        let mut nodes: Vec<T> = (0..n_points).map(|j| x0 + h * T::from_usize(j)).collect();
        nodes[n_points - 1] = x1;
        Ok(Self { x0, x1, h, nodes })
    }

    /// `[0, 1]` with `n_points` points.
    pub fn unit(n_points: usize) -> Result<Self> {
        Self::new(T::zero(), T::one(), n_points)
    }

    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn x0(&self) -> T {
        self.x0
    }

    pub fn x1(&self) -> T {
        self.x1
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn sample(&self, f: impl Fn(T) -> T) -> Vec<T> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    pub fn first_derivative(&self, order: AccuracyOrder) -> Result<FirstDerivativeOperator<T>> {
        FirstDerivativeOperator::build(order, self.n_points(), self.h)
    }

    pub fn second_derivative(&self, order: AccuracyOrder) -> Result<SecondDerivativeOperator<T>> {
        SecondDerivativeOperator::build(order, self.n_points(), self.h)
    }

    pub(crate) fn check_operator(&self, n: usize, h: T) -> Result<()> {
        if n != self.n_points() {
            return Err(Error::DimensionMismatch {
                expected: self.n_points(),
                found: n,
            });
        }
        let tol = T::lit(1e-12) * self.h;
        if (h - self.h).abs() > tol {
            return Err(Error::InvalidParameter {
                name: "h",
                reason: format!("operator spacing {h} does not match grid spacing {}", self.h),
            });
        }
        Ok(())
    }
}

/// Time-dependent boundary datum with a human-readable description.
#[derive(Clone)]
pub struct BoundarySignal<T> {
    eval: Arc<dyn Fn(T) -> T + Send + Sync>,
    description: String,
}

impl<T: Real> BoundarySignal<T> {
    pub fn new(description: impl Into<String>, f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            description: description.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new("0", |_| T::zero())
    }

    pub fn constant(c: T) -> Self {
        Self::new(format!("{c}"), move |_| c)
    }

    pub fn at(&self, t: T) -> T {
        (self.eval)(t)
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

impl<T> fmt::Debug for BoundarySignal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundarySignal")
            .field("description", &self.description)
            .finish()
    }
}

/// Source term `F(x, t)`.
#[derive(Clone)]
pub struct Forcing<T> {
    eval: Arc<dyn Fn(T, T) -> T + Send + Sync>,
    description: String,
}

impl<T: Real> Forcing<T> {
    pub fn new(description: impl Into<String>, f: impl Fn(T, T) -> T + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            description: description.into(),
        }
    }

    pub fn at(&self, x: T, t: T) -> T {
        (self.eval)(x, t)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub(crate) fn sample(&self, nodes: &[T], t: T) -> Vec<T> {
        nodes.iter().map(|&x| self.at(x, t)).collect()
    }
}

impl<T> fmt::Debug for Forcing<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Forcing")
            .field("description", &self.description)
            .finish()
    }
}

/// Penalty strengths.
///
/// `boundary` multiplies the wave speed at an inflow boundary (stable for
/// values below −1/2). `interface_left` is the absolute penalty on the left
/// side of a two-block interface (stable up to `a/2`); the right one is
/// derived as `interface_left − a` unless overridden, which breaks
/// conservation and is flagged.
#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyConfig<T> {
    pub boundary: T,
    pub interface_left: T,
    pub interface_right: Option<T>,
    pub allow_unstable: bool,
}

impl<T: Real> Default for PenaltyConfig<T> {
    fn default() -> Self {
        Self {
            boundary: -T::one(),
            interface_left: T::zero(),
            interface_right: None,
            allow_unstable: false,
        }
    }
}

impl<T: Real> PenaltyConfig<T> {
    pub fn with_boundary(mut self, sigma: T) -> Self {
        self.boundary = sigma;
        self
    }

    pub fn with_interface_left(mut self, sigma: T) -> Self {
        self.interface_left = sigma;
        self
    }

    pub fn with_interface_right(mut self, sigma: T) -> Self {
        self.interface_right = Some(sigma);
        self
    }

    pub fn allowing_unstable(mut self) -> Self {
        self.allow_unstable = true;
        self
    }

    /// Inflow penalty must satisfy `σ < −1/2`.
    pub(crate) fn check_boundary(&self, warnings: &mut Vec<String>) -> Result<()> {
        let half = T::lit(0.5);
        if self.boundary < -half {
            return Ok(());
        }
        let err = Error::InadmissiblePenalty {
            name: "sigma",
            value: self.boundary.to_f64_lossy(),
            condition: "sigma < -1/2",
        };
        if self.allow_unstable {
            warnings.push(err.to_string());
            Ok(())
        } else {
            Err(err)
        }
    }
}

pub(crate) fn inv_first<T: Real>(weights: &[T]) -> T {
    T::one() / weights[0]
}

pub(crate) fn inv_last<T: Real>(weights: &[T]) -> T {
    T::one() / weights[weights.len() - 1]
}

pub(crate) fn weighted_dot<T: Real>(w: &[T], u: &[T], v: &[T]) -> T {
    w.iter()
        .zip(u.iter().zip(v))
        .fold(T::zero(), |acc, (wi, (a, b))| acc + *wi * *a * *b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing_and_endpoints() {
        let g = Grid1D::<f64>::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.h(), 0.5);
        assert_eq!(g.nodes(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(Grid1D::<f64>::new(1.0, 1.0, 5).is_err());
        assert!(Grid1D::<f64>::unit(1).is_err());
    }

    #[test]
    fn operator_must_match_grid() {
        let g = Grid1D::<f64>::unit(17).unwrap();
        let op = Grid1D::<f64>::unit(33)
            .unwrap()
            .first_derivative(AccuracyOrder::SECOND)
            .unwrap();
        assert!(g.check_operator(op.n_points(), *op.h()).is_err());
    }

    #[test]
    fn boundary_penalty_admissibility() {
        let mut w = Vec::new();
        assert!(PenaltyConfig::<f64>::default().check_boundary(&mut w).is_ok());
        let bad = PenaltyConfig::<f64>::default().with_boundary(-0.5);
        assert!(matches!(
            bad.check_boundary(&mut w),
            Err(Error::InadmissiblePenalty { .. })
        ));
        assert!(bad.allowing_unstable().check_boundary(&mut w).is_ok());
        assert_eq!(w.len(), 1);
    }
}
