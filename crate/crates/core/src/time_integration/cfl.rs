use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model_problems::SemiDiscrete;
use crate::scalar::Real;

/// Approximate extent of the RK4 stability region along the imaginary axis.
pub const RK4_STABILITY_EXTENT: f64 = 2.6;

const WINDOW: usize = 60;
const MAX_ITERATIONS: usize = 1500;
const AGREEMENT: f64 = 0.02;

/// Result of the power iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CflEstimate<T> {
    pub spectral_radius: T,
    pub iterations: usize,
}

/// Estimates the spectral radius of the right-hand side linearized at `u0`.
///
/// Norm growth factors of the power iteration are averaged geometrically
/// over consecutive windows, which also converges when the dominant
/// eigenvalues form a complex-conjugate pair. Affine systems are linearized
/// exactly by differencing; nonlinear ones with a scaled finite difference.
pub fn spectral_radius<T: Real, S: SemiDiscrete<T> + ?Sized>(system: &S, u0: &[T], t: T) -> Result<CflEstimate<T>> {
    let n = system.state_dim();
    if u0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u0.len(),
        });
    }
    let scale = u0.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let delta = if system.is_linear() {
        T::one()
    } else {
        T::lit(1e-7) * scale.max(T::one())
    };
    let base = system.rhs(u0, t);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<T> = (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
    normalize(&mut v);

    let mut shifted = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let mut logs: Vec<f64> = Vec::with_capacity(MAX_ITERATIONS);
    for it in 0..MAX_ITERATIONS {
        for ((s, u), d) in shifted.iter_mut().zip(u0).zip(&v) {
            *s = *u + delta * *d;
        }
        system.rhs_into(&shifted, t, &mut w);
        for (wi, b) in w.iter_mut().zip(&base) {
            *wi = (*wi - *b) / delta;
        }
        let growth = norm(&w);
        if growth == T::zero() {
            return Ok(CflEstimate {
                spectral_radius: T::zero(),
                iterations: it + 1,
            });
        }
        if !growth.is_finite() {
            return Err(Error::PowerIterationNoConverge {
                iterations: it + 1,
                estimate: f64::INFINITY,
            });
        }
        logs.push(growth.to_f64_lossy().ln());
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = *wi / growth;
        }
        let k = logs.len();
        if k >= 3 * WINDOW && k.is_multiple_of(WINDOW) {
            let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
            let previous = mean(&logs[k - 2 * WINDOW..k - WINDOW]);
            let current = mean(&logs[k - WINDOW..]);
            if (current - previous).abs() < AGREEMENT {
                return Ok(CflEstimate {
                    spectral_radius: T::lit(current.exp()),
                    iterations: k,
                });
            }
        }
    }
    let tail = &logs[logs.len() - WINDOW..];
    Err(Error::PowerIterationNoConverge {
        iterations: MAX_ITERATIONS,
        estimate: (tail.iter().sum::<f64>() / WINDOW as f64).exp(),
    })
}

/// `dt = safety · 2.6 / ρ̂`, capped at `t_final` (also when `ρ̂ = 0`).
pub fn cfl_timestep<T: Real, S: SemiDiscrete<T> + ?Sized>(system: &S, u0: &[T], safety: T, t_final: T) -> Result<T> {
    if !(safety > T::zero() && safety <= T::one()) {
        return Err(Error::InvalidParameter {
            name: "safety",
            reason: format!("CFL safety factor must lie in (0, 1], got {safety}"),
        });
    }
    let est = spectral_radius(system, u0, T::zero())?;
    if est.spectral_radius == T::zero() {
        return Ok(t_final);
    }
    Ok((safety * T::lit(RK4_STABILITY_EXTENT) / est.spectral_radius).min(t_final))
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |s, x| s + *x * *x).sqrt()
}

fn normalize<T: Real>(v: &mut [T]) {
    let n = norm(v);
    for x in v.iter_mut() {
        *x = *x / n;
    }
}
