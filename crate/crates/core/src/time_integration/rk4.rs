use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model_problems::SemiDiscrete;
use crate::scalar::Real;

use super::all_finite;

/// `n_steps` equal steps covering `[0, t_final]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid<T> {
    t_final: T,
    n_steps: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(t_final: T, n_steps: usize) -> Result<Self> {
        if !(t_final > T::zero() && t_final.is_finite()) || n_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "time grid",
                reason: format!("need t_final > 0 and at least one step, got T = {t_final}, {n_steps} steps"),
            });
        }
        Ok(Self { t_final, n_steps })
    }

    /// The coarsest uniform grid whose step does not exceed `dt_max`.
    pub fn with_max_step(t_final: T, dt_max: T) -> Result<Self> {
        if !(dt_max > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("time step must be positive, got {dt_max}"),
            });
        }
        let steps = (t_final / dt_max).ceil().to_f64_lossy().max(1.0);
        Self::new(t_final, steps as usize)
    }

    pub fn t_final(&self) -> T {
        self.t_final
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> T {
        self.t_final / T::from_usize(self.n_steps)
    }

    /// Same interval, twice the steps.
    pub fn refined(&self) -> Self {
        Self {
            t_final: self.t_final,
            n_steps: 2 * self.n_steps,
        }
    }

    pub fn time(&self, step: usize) -> T {
        if step == self.n_steps {
            self.t_final
        } else {
            self.dt() * T::from_usize(step)
        }
    }
}

/// Sampled history of an integration.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord<T> {
    pub steps: Vec<usize>,
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    /// `‖u‖²` in the system norm.
    pub energies: Vec<T>,
    /// `2⟨u, rhs(u, t)⟩` at the sample.
    pub measured_rates: Vec<T>,
    /// The system's energy identity at the sample.
    pub predicted_rates: Vec<T>,
}

impl<T: Real> TrajectoryRecord<T> {
    fn with_capacity(n: usize) -> Self {
        Self {
            steps: Vec::with_capacity(n),
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            energies: Vec::with_capacity(n),
            measured_rates: Vec::with_capacity(n),
            predicted_rates: Vec::with_capacity(n),
        }
    }

    fn push<S: SemiDiscrete<T> + ?Sized>(&mut self, system: &S, step: usize, t: T, u: &[T], rhs: &[T]) {
        let w = system.norm_weights();
        let mut measured = T::zero();
        let mut energy = T::zero();
        for ((wi, ui), ri) in w.iter().zip(u).zip(rhs) {
            energy = energy + *wi * *ui * *ui;
            measured = measured + *wi * *ui * *ri;
        }
        self.steps.push(step);
        self.times.push(t);
        self.states.push(u.to_vec());
        self.energies.push(energy);
        self.measured_rates.push(measured + measured);
        self.predicted_rates.push(system.boundary_rate(u, t));
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[T] {
        self.states.last().map_or(&[], Vec::as_slice)
    }

    /// Largest `|measured − predicted|` over the samples.
    pub fn max_rate_residual(&self) -> T {
        self.measured_rates
            .iter()
            .zip(&self.predicted_rates)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    /// CSV with header `t,energy,measured_rate,predicted_rate,residual`,
    /// every value with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,energy,measured_rate,predicted_rate,residual\n");
        for i in 0..self.len() {
            let (m, p) = (self.measured_rates[i], self.predicted_rates[i]);
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                plain(self.times[i]),
                plain(self.energies[i]),
                plain(m),
                plain(p),
                plain((m - p).abs())
            );
        }
        out
    }
}

/// Maps `-0.0` to `0.0` so CSV output does not depend on the sign of zero.
fn plain<T: Real>(x: T) -> T {
    if x == T::zero() {
        T::zero()
    } else {
        x
    }
}

struct Stages<T> {
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    tmp: Vec<T>,
}

impl<T: Real> Stages<T> {
    fn new(n: usize) -> Self {
        Self {
            k1: vec![T::zero(); n],
            k2: vec![T::zero(); n],
            k3: vec![T::zero(); n],
            k4: vec![T::zero(); n],
            tmp: vec![T::zero(); n],
        }
    }

    /// One classical RK4 step. `k1` must already hold `rhs(u, t)`.
    fn step<S: SemiDiscrete<T> + ?Sized>(&mut self, system: &S, u: &mut [T], t: T, dt: T) {
        let half = dt / T::lit(2.0);
        for ((y, u), k) in self.tmp.iter_mut().zip(u.iter()).zip(&self.k1) {
            *y = *u + half * *k;
        }
        system.rhs_into(&self.tmp, t + half, &mut self.k2);
        for ((y, u), k) in self.tmp.iter_mut().zip(u.iter()).zip(&self.k2) {
            *y = *u + half * *k;
        }
        system.rhs_into(&self.tmp, t + half, &mut self.k3);
        for ((y, u), k) in self.tmp.iter_mut().zip(u.iter()).zip(&self.k3) {
            *y = *u + dt * *k;
        }
        system.rhs_into(&self.tmp, t + dt, &mut self.k4);
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        for (i, ui) in u.iter_mut().enumerate() {
            *ui = *ui + sixth * (self.k1[i] + two * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
    }
}

fn check_dim<T: Real, S: SemiDiscrete<T> + ?Sized>(system: &S, u0: &[T]) -> Result<()> {
    if u0.len() != system.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: system.state_dim(),
            found: u0.len(),
        });
    }
    Ok(())
}

/// Classical RK4 over `grid`, sampling every `sample_every` steps and always
/// at the first and last step.
pub fn rk4_integrate<T: Real, S: SemiDiscrete<T> + ?Sized>(
    system: &S,
    u0: &[T],
    grid: TimeGrid<T>,
    sample_every: usize,
) -> Result<TrajectoryRecord<T>> {
    check_dim(system, u0)?;
    let every = sample_every.max(1);
    let dt = grid.dt();
    let mut u = u0.to_vec();
    let mut stages = Stages::new(u.len());
    let mut record = TrajectoryRecord::with_capacity(grid.n_steps() / every + 2);
    for step in 0..=grid.n_steps() {
        let t = grid.time(step);
        system.rhs_into(&u, t, &mut stages.k1);
        if step % every == 0 || step == grid.n_steps() {
            record.push(system, step, t, &u, &stages.k1);
        }
        if step == grid.n_steps() {
            break;
        }
        stages.step(system, &mut u, t, dt);
        if !all_finite(&u) {
            return Err(Error::NonFiniteState {
                step: step + 1,
                time: grid.time(step + 1).to_f64_lossy(),
            });
        }
    }
    Ok(record)
}

/// RK4 returning only the final state.
pub fn rk4_final<T: Real, S: SemiDiscrete<T> + ?Sized>(system: &S, u0: &[T], grid: TimeGrid<T>) -> Result<Vec<T>> {
    check_dim(system, u0)?;
    let dt = grid.dt();
    let mut u = u0.to_vec();
    let mut stages = Stages::new(u.len());
    for step in 0..grid.n_steps() {
        let t = grid.time(step);
        system.rhs_into(&u, t, &mut stages.k1);
        stages.step(system, &mut u, t, dt);
        if !all_finite(&u) {
            return Err(Error::NonFiniteState {
                step: step + 1,
                time: grid.time(step + 1).to_f64_lossy(),
            });
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay {
        rate: f64,
        w: Vec<f64>,
    }

    impl SemiDiscrete<f64> for Decay {
        fn label(&self) -> &str {
            "decay"
        }
        fn state_dim(&self) -> usize {
            1
        }
        fn norm_weights(&self) -> &[f64] {
            &self.w
        }
        fn rhs_into(&self, u: &[f64], _t: f64, out: &mut [f64]) {
            out[0] = -self.rate * u[0];
        }
        fn boundary_rate(&self, u: &[f64], _t: f64) -> f64 {
            -2.0 * self.rate * u[0] * u[0]
        }
    }

    #[test]
    fn exponential_decay_fourth_order() {
        let sys = Decay {
            rate: 1.0,
            w: vec![1.0],
        };
        let grid = TimeGrid::new(1.0, 100).unwrap();
        let rec = rk4_integrate(&sys, &[1.0], grid, 10).unwrap();
        assert!((rec.final_state()[0] - (-1.0f64).exp()).abs() < 1e-9);
        assert_eq!(rec.len(), 11);
        assert!(rec.times.windows(2).all(|w| w[1] > w[0]));
        assert!(rec.max_rate_residual() < 1e-15);
    }

    #[test]
    fn zero_rhs_keeps_state() {
        let sys = Decay {
            rate: 0.0,
            w: vec![1.0],
        };
        let u = rk4_final(&sys, &[0.3], TimeGrid::new(2.0, 7).unwrap()).unwrap();
        assert_eq!(u, vec![0.3]);
    }

    #[test]
    fn blow_up_reports_step() {
        let sys = Decay {
            rate: -1e3,
            w: vec![1.0],
        };
        let err = rk4_final(&sys, &[1.0], TimeGrid::new(100.0, 100).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteState { step, .. } if step > 1));
    }

    #[test]
    fn time_grid_validation() {
        assert!(TimeGrid::<f64>::new(0.0, 4).is_err());
        assert!(TimeGrid::<f64>::new(1.0, 0).is_err());
        let g = TimeGrid::with_max_step(1.0, 0.3).unwrap();
        assert_eq!(g.n_steps(), 4);
        assert_eq!(g.time(4), 1.0);
    }

    #[test]
    fn csv_layout() {
        let sys = Decay {
            rate: 1.0,
            w: vec![1.0],
        };
        let rec = rk4_integrate(&sys, &[0.0], TimeGrid::new(1.0, 2).unwrap(), 1).unwrap();
        let csv = rec.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,energy,measured_rate,predicted_rate,residual"));
        assert_eq!(
            lines.next(),
            Some("0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0")
        );
    }
}
