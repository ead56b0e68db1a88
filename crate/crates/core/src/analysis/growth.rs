use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Exponential growth rate `α` of a solution norm, from `‖u‖² ≈ C e^{2αt}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub alpha: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
}

/// Least-squares slope of `ln E` against `t`, halved.
pub fn estimate_growth<T: Real>(times: &[T], energies: &[T]) -> Result<GrowthEstimate> {
    if times.len() != energies.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: energies.len(),
        });
    }
    if times.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "a growth estimate needs at least two samples".into(),
        });
    }
    let mut logs = Vec::with_capacity(energies.len());
    for (index, e) in energies.iter().enumerate() {
        let value = e.to_f64_lossy();
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveEnergy { index, value });
        }
        logs.push(value.ln());
    }
    let ts: Vec<f64> = times.iter().map(|t| t.to_f64_lossy()).collect();
    let n = ts.len() as f64;
    let mt = ts.iter().sum::<f64>() / n;
    let ml = logs.iter().sum::<f64>() / n;
    let stt: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
    if stt == 0.0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "sample times must not all coincide".into(),
        });
    }
    let stl: f64 = ts.iter().zip(&logs).map(|(t, l)| (t - mt) * (l - ml)).sum();
    Ok(GrowthEstimate {
        alpha: 0.5 * stl / stt,
        t_start: ts[0],
        t_end: ts[ts.len() - 1],
        samples: ts.len(),
    })
}

/// `E_{k+1} ≤ E_k (1 + rel_tol)` for every consecutive pair.
pub fn is_non_increasing<T: Real>(energies: &[T], rel_tol: f64) -> bool {
    energies.windows(2).all(|w| {
        let (a, b) = (w[0].to_f64_lossy(), w[1].to_f64_lossy());
        b <= a + rel_tol * a.abs()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exponent() {
        let t: Vec<f64> = (0..20).map(|k| k as f64 * 0.1).collect();
        let e: Vec<f64> = t.iter().map(|t| 3.0 * (2.0 * -0.7 * t).exp()).collect();
        let g = estimate_growth(&t, &e).unwrap();
        assert!((g.alpha + 0.7).abs() < 1e-12);
        assert!(is_non_increasing(&e, 0.0));
        assert!(!is_non_increasing(&[1.0, 1.1], 1e-3));
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(matches!(
            estimate_growth(&[0.0, 1.0], &[1.0, 0.0]),
            Err(Error::NonPositiveEnergy { index: 1, .. })
        ));
        assert!(estimate_growth(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(estimate_growth(&[1.0], &[1.0]).is_err());
    }
}
