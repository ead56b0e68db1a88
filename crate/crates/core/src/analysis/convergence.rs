use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model_problems::SemiDiscrete;
use crate::sbp_ops::AccuracyOrder;
use crate::scalar::Real;
use crate::time_integration::{cfl_timestep, rk4_final, TimeGrid};

use super::{max_norm, weighted_norm_squared};

/// Fits using fewer levels are never trimmed further.
pub const MIN_FIT_LEVELS: usize = 4;
pub const R_SQUARED_THRESHOLD: f64 = 0.98;

/// Least-squares fit of `log e = rate·log h + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_rate(h: &[f64], err: &[f64]) -> Result<RateFit> {
    if h.len() != err.len() {
        return Err(Error::DimensionMismatch {
            expected: h.len(),
            found: err.len(),
        });
    }
    if h.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "levels",
            reason: "a rate fit needs at least two levels".into(),
        });
    }
    if let Some(bad) = h.iter().chain(err).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter {
            name: "levels",
            reason: format!("spacings and errors must be positive and finite, got {bad}"),
        });
    }
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let rate = sxy / sxx;
    let intercept = my - rate * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(RateFit {
        rate,
        intercept,
        r_squared,
    })
}

/// [`fit_rate`] after excluding coarse levels while `r² < 0.98` and more
/// than [`MIN_FIT_LEVELS`] remain. Returns the fit and the number excluded.
/// Levels must be ordered from coarse to fine.
pub fn fit_rate_trimmed(h: &[f64], err: &[f64]) -> Result<(RateFit, usize)> {
    if h.len() != err.len() {
        return Err(Error::DimensionMismatch {
            expected: h.len(),
            found: err.len(),
        });
    }
    let mut excluded = 0;
    loop {
        let fit = fit_rate(&h[excluded..], &err[excluded..])?;
        if fit.r_squared >= R_SQUARED_THRESHOLD || h.len() - excluded <= MIN_FIT_LEVELS {
            return Ok((fit, excluded));
        }
        excluded += 1;
    }
}

/// One refinement level of a time-dependent study.
pub struct LevelSetup<T: Real> {
    pub n: usize,
    pub h: T,
    pub system: Box<dyn SemiDiscrete<T>>,
    /// Exact solution sampled on the level's nodes.
    pub exact: Box<dyn Fn(T) -> Vec<T> + Send + Sync>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StudyOptions {
    pub t_final: f64,
    pub cfl_safety: f64,
    /// Accept a time step once the Richardson estimate of the temporal error
    /// is at most this fraction of the spatial error.
    pub time_error_fraction: f64,
    pub max_time_refinements: usize,
    pub parallel: bool,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            t_final: 0.5,
            cfl_safety: 0.5,
            time_error_fraction: 0.01,
            max_time_refinements: 8,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelRecord {
    pub n: usize,
    pub h: f64,
    pub error_p: f64,
    pub error_max: f64,
    pub dt: f64,
    pub time_steps: usize,
    /// Richardson estimate `‖u_dt − u_dt/2‖/15` of the reported solution's
    /// temporal error.
    pub time_error: f64,
    pub time_error_subordinate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub label: String,
    pub order: Option<AccuracyOrder>,
    pub levels: Vec<LevelRecord>,
    /// Number of coarse levels excluded from the fit.
    pub excluded_levels: usize,
    pub fit: RateFit,
}

impl ConvergenceReport {
    /// Builds the report from level records, excluding coarse levels while
    /// `r² < 0.98` and more than [`MIN_FIT_LEVELS`] remain.
    pub fn from_levels(
        label: impl Into<String>,
        order: Option<AccuracyOrder>,
        levels: Vec<LevelRecord>,
    ) -> Result<Self> {
        if levels.len() < 3 {
            return Err(Error::InvalidParameter {
                name: "levels",
                reason: format!("a convergence study needs at least 3 levels, got {}", levels.len()),
            });
        }
        if levels.windows(2).any(|w| !(w[1].h < w[0].h)) {
            return Err(Error::InvalidParameter {
                name: "levels",
                reason: "grid spacing must decrease strictly from level to level".into(),
            });
        }
        let h: Vec<f64> = levels.iter().map(|l| l.h).collect();
        let e: Vec<f64> = levels.iter().map(|l| l.error_p).collect();
        let (fit, excluded) = fit_rate_trimmed(&h, &e)?;
        Ok(Self {
            label: label.into(),
            order,
            levels,
            excluded_levels: excluded,
            fit,
        })
    }

    pub fn fitted_rate(&self) -> f64 {
        self.fit.rate
    }

    /// `|rate − expected| ≤ tolerance` and `r² ≥ 0.98`.
    pub fn passes(&self, expected: f64, tolerance: f64) -> bool {
        (self.fit.rate - expected).abs() <= tolerance && self.fit.r_squared >= R_SQUARED_THRESHOLD
    }

    /// `order_p,order_r,n,h,err_P,err_max,fitted_rate`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("order_p,order_r,n,h,err_P,err_max,fitted_rate\n");
        let (p, r) = self.order.map_or((String::new(), String::new()), |o| {
            (o.interior().to_string(), o.boundary().to_string())
        });
        for l in &self.levels {
            let _ = writeln!(
                out,
                "{p},{r},{},{:.16e},{:.16e},{:.16e},{:.16e}",
                l.n, l.h, l.error_p, l.error_max, self.fit.rate
            );
        }
        out
    }
}

fn error_norms<T: Real>(weights: &[T], u: &[T], exact: &[T]) -> Result<(f64, f64)> {
    let diff: Vec<T> = u.iter().zip(exact).map(|(a, b)| *a - *b).collect();
    let p = weighted_norm_squared(weights, &diff)?.sqrt().to_f64_lossy();
    Ok((p, max_norm(&diff).to_f64_lossy()))
}

fn run_level<T: Real>(setup: &LevelSetup<T>, opts: &StudyOptions) -> Result<LevelRecord> {
    let t_final = T::lit(opts.t_final);
    let system = setup.system.as_ref();
    let u0 = (setup.exact)(T::zero());
    let exact = (setup.exact)(t_final);
    let weights = system.norm_weights();
    let dt = cfl_timestep(system, &u0, T::lit(opts.cfl_safety), t_final)?;
    let mut grid = TimeGrid::with_max_step(t_final, dt)?;
    let mut coarse = rk4_final(system, &u0, grid)?;
    let mut refinements = 0;
    loop {
        let fine_grid = grid.refined();
        let fine = rk4_final(system, &u0, fine_grid)?;
        let (time_diff, _) = error_norms(weights, &coarse, &fine)?;
        let time_error = time_diff / 15.0;
        let (error_p, error_max) = error_norms(weights, &fine, &exact)?;
        refinements += 1;
        let subordinate = time_error <= opts.time_error_fraction * error_p;
        if subordinate || refinements >= opts.max_time_refinements {
            return Ok(LevelRecord {
                n: setup.n,
                h: setup.h.to_f64_lossy(),
                error_p,
                error_max,
                dt: fine_grid.dt().to_f64_lossy(),
                time_steps: fine_grid.n_steps(),
                time_error,
                time_error_subordinate: subordinate,
            });
        }
        grid = fine_grid;
        coarse = fine;
    }
}

/// Integrates every level to `t_final` with RK4, starting from the CFL step
/// and halving it until the temporal error is subordinate, then fits the
/// spatial rate. Levels run concurrently when `opts.parallel` is set; the
/// report is ordered by level regardless.
pub fn run_convergence_study<T, F>(
    label: &str,
    order: Option<AccuracyOrder>,
    factory: F,
    levels: &[usize],
    opts: &StudyOptions,
) -> Result<ConvergenceReport>
where
    T: Real,
    F: Fn(usize) -> Result<LevelSetup<T>> + Sync,
{
    let one = |n: usize| factory(n).and_then(|setup| run_level(&setup, opts));
    let records: Vec<Result<LevelRecord>> = if opts.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = levels.iter().map(|&n| scope.spawn(move || one(n))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("convergence level panicked"))
                .collect()
        })
    } else {
        levels.iter().map(|&n| one(n)).collect()
    };
    let records = records.into_iter().collect::<Result<Vec<_>>>()?;
    ConvergenceReport::from_levels(label, order, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(h: f64, e: f64) -> LevelRecord {
        LevelRecord {
            n: (1.0 / h) as usize + 1,
            h,
            error_p: e,
            error_max: e,
            dt: 0.0,
            time_steps: 0,
            time_error: 0.0,
            time_error_subordinate: true,
        }
    }

    #[test]
    fn exact_power_law() {
        let h = [0.1, 0.05, 0.025, 0.0125];
        let e: Vec<f64> = h.iter().map(|x| 3.0 * x * x * x).collect();
        let fit = fit_rate(&h, &e).unwrap();
        assert!((fit.rate - 3.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polluted_coarse_level_is_dropped() {
        let mut levels: Vec<LevelRecord> = [0.1, 0.05, 0.025, 0.0125, 0.00625]
            .iter()
            .map(|&h| level(h, h * h))
            .collect();
        levels[0].error_p = 1e3;
        let report = ConvergenceReport::from_levels("x", None, levels).unwrap();
        assert_eq!(report.excluded_levels, 1);
        assert!((report.fitted_rate() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_level_sets() {
        let two = vec![level(0.1, 0.1), level(0.05, 0.01)];
        assert!(ConvergenceReport::from_levels("x", None, two).is_err());
        let unsorted = vec![level(0.05, 0.1), level(0.1, 0.01), level(0.025, 0.001)];
        assert!(ConvergenceReport::from_levels("x", None, unsorted).is_err());
        assert!(fit_rate(&[0.1, 0.05], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let levels = vec![level(0.5, 0.25), level(0.25, 0.0625), level(0.125, 0.015625)];
        let r = ConvergenceReport::from_levels("x", Some(AccuracyOrder::FOURTH), levels).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("order_p,order_r,n,h,err_P,err_max,fitted_rate\n4,2,3,"));
        assert_eq!(csv.lines().count(), 4);
    }
}
