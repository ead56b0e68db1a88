use crate::error::{Error, Result};
use crate::sbp_ops::FirstDerivativeOperator;
use crate::scalar::Real;

/// Linear functional `J(u) = ∫ w u dx`, evaluated with the operator's
/// quadrature as `wᵀPu`.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalSpec<T> {
    weights: Vec<T>,
}

impl<T: Real> FunctionalSpec<T> {
    pub fn new(weights: Vec<T>) -> Self {
        Self { weights }
    }

    /// Samples the weight function at the given nodes.
    pub fn sampled(nodes: &[T], weight: impl Fn(T) -> T) -> Self {
        Self::new(nodes.iter().map(|x| weight(*x)).collect())
    }

    /// `J(u) = ∫ u dx`.
    pub fn mean(n: usize) -> Self {
        Self::new(vec![T::one(); n])
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

pub fn evaluate_functional<T: Real>(
    spec: &FunctionalSpec<T>,
    op: &FirstDerivativeOperator<T>,
    state: &[T],
) -> Result<T> {
    let p = op.norm_weights();
    for len in [spec.weights.len(), state.len()] {
        if len != p.len() {
            return Err(Error::DimensionMismatch {
                expected: p.len(),
                found: len,
            });
        }
    }
    Ok(spec
        .weights
        .iter()
        .zip(p)
        .zip(state)
        .fold(T::zero(), |s, ((w, p), u)| s + *w * *p * *u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbp_ops::AccuracyOrder;

    #[test]
    fn quadrature_of_polynomials() {
        let op = FirstDerivativeOperator::on_interval(AccuracyOrder::SIXTH, 41, 0.0, 2.0).unwrap();
        let x = op.nodes(0.0);
        let u: Vec<f64> = x.iter().map(|x| x * x).collect();
        let j = evaluate_functional(&FunctionalSpec::mean(41), &op, &u).unwrap();
        assert!((j - 8.0 / 3.0).abs() < 1e-12);
        let spec = FunctionalSpec::sampled(&x, |x| x);
        let j = evaluate_functional(&spec, &op, &u).unwrap();
        assert!((j - 4.0).abs() < 1e-12);
        assert!(evaluate_functional(&spec, &op, &u[1..]).is_err());
    }
}
