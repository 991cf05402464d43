// SPDX-License-Identifier: MIT OR Apache-2.0

//! Synthetic series: the trend-plus-two-sinusoids toy signal and the
//! Mackey-Glass delay differential equation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

/// `sin(4.25πt) + sin(8.5πt) + 5t`.
pub fn toy_signal(t: f64) -> f64 {
    (4.25 * PI * t).sin() + (8.5 * PI * t).sin() + 5.0 * t
}

/// Toy signal sampled at `i / n_train` on `[0, 1)` for training and at
/// `1 + 2j / n_test` on `[1, 3)` for testing.
pub fn gen_toy(n_train: usize, n_test: usize) -> Result<(TimeSeries, TimeSeries)> {
    let sample = |name: &str, times: Vec<f64>| {
        let values = times.iter().map(|&t| toy_signal(t)).collect();
        TimeSeries::new(name, times, values)
    };
    let train_t = (0..n_train).map(|i| i as f64 / n_train as f64).collect();
    let test_t = (0..n_test)
        .map(|j| 1.0 + 2.0 * j as f64 / n_test as f64)
        .collect();
    Ok((sample("toy_train", train_t)?, sample("toy_test", test_t)?))
}

/// `dx/dt = beta·x(t-tau) / (1 + x(t-tau)^exponent) - gamma·x(t)`.
///
/// `burn_in` and `sample_stride` count integration steps, not time units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MackeyGlassParams {
    pub beta: f64,
    pub gamma: f64,
    pub exponent: f64,
    pub tau: f64,
    pub dt: f64,
    pub history_value: f64,
    pub burn_in: usize,
    pub sample_stride: usize,
}

impl Default for MackeyGlassParams {
    fn default() -> Self {
        Self {
            beta: 0.2,
            gamma: 0.1,
            exponent: 10.0,
            tau: 17.0,
            dt: 1.0,
            history_value: 1.2,
            burn_in: 1000,
            sample_stride: 1,
        }
    }
}

impl MackeyGlassParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.beta,
            self.gamma,
            self.exponent,
            self.tau,
            self.dt,
            self.history_value,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Config(
                "Mackey-Glass parameters must be finite".into(),
            ));
        }
        if self.dt <= 0.0 || self.tau <= 0.0 {
            return Err(Error::Config("dt and tau must be positive".into()));
        }
        // The delayed state at the end of a step must already be known.
        if self.tau < self.dt {
            return Err(Error::Config(format!(
                "tau ({}) must be at least dt ({})",
                self.tau, self.dt
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::Config("sample_stride must be at least 1".into()));
        }
        Ok(())
    }

    fn rate(&self, x: f64, delayed: f64) -> f64 {
        self.beta * delayed / (1.0 + delayed.powf(self.exponent)) - self.gamma * x
    }
}

/// Stored trajectory with constant history before `t = 0`. Between grid
/// points the state is a cubic Hermite interpolant of the stored values and
/// slopes, which keeps the delayed term as accurate as the RK4 step.
struct Trajectory {
    dt: f64,
    history: f64,
    points: Vec<f64>,
    slopes: Vec<f64>,
}

impl Trajectory {
    fn at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.history;
        }
        let pos = t / self.dt;
        let i = pos.floor() as usize;
        let f = pos - i as f64;
        if f == 0.0 {
            return self.points[i];
        }
        let (f2, f3) = (f * f, f * f * f);
        let h00 = 2.0 * f3 - 3.0 * f2 + 1.0;
        let h10 = f3 - 2.0 * f2 + f;
        let h01 = -2.0 * f3 + 3.0 * f2;
        let h11 = f3 - f2;
        h00 * self.points[i]
            + h10 * self.dt * self.slopes[i]
            + h01 * self.points[i + 1]
            + h11 * self.dt * self.slopes[i + 1]
    }
}

/// Integrates with classical RK4, reading the delayed term off the stored
/// trajectory. Emits `n_total` samples with implicit integer times,
/// starting after `burn_in` steps and taking every `sample_stride`-th step.
pub fn gen_mackey_glass(n_total: usize, params: &MackeyGlassParams) -> Result<TimeSeries> {
    params.validate()?;
    if n_total < 2 {
        return Err(Error::Config(format!(
            "need at least 2 samples, got {n_total}"
        )));
    }
    let steps = params.burn_in + (n_total - 1) * params.sample_stride;
    let dt = params.dt;
    let mut traj = Trajectory {
        dt,
        history: params.history_value,
        points: Vec::with_capacity(steps + 1),
        slopes: Vec::with_capacity(steps + 1),
    };
    traj.points.push(params.history_value);

    for step in 0..steps {
        let t = step as f64 * dt;
        let x = traj.points[step];
        let k1 = params.rate(x, traj.at(t - params.tau));
        // Stored before the stage lookups: with tau == dt the end-of-step
        // delay lands exactly on this grid point.
        traj.slopes.push(k1);
        let d_half = traj.at(t + 0.5 * dt - params.tau);
        let d_end = traj.at(t + dt - params.tau);
        let k2 = params.rate(x + 0.5 * dt * k1, d_half);
        let k3 = params.rate(x + 0.5 * dt * k2, d_half);
        let k4 = params.rate(x + dt * k3, d_end);
        let next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !next.is_finite() {
            return Err(Error::Integration { step: step + 1 });
        }
        traj.points.push(next);
    }

    let values = (0..n_total)
        .map(|i| traj.points[params.burn_in + i * params.sample_stride])
        .collect();
    TimeSeries::from_values("mackey_glass", values)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Forward Euler with the delay read from an exact grid index.
    fn euler_oracle(n_total: usize, p: &MackeyGlassParams, substeps: usize) -> Vec<f64> {
        let h = p.dt / substeps as f64;
        let lag = (p.tau / h).round() as usize;
        let steps = (p.burn_in + (n_total - 1) * p.sample_stride) * substeps;
        let mut x = vec![p.history_value];
        for i in 0..steps {
            let delayed = if i >= lag {
                x[i - lag]
            } else {
                p.history_value
            };
            let dx = p.beta * delayed / (1.0 + delayed.powf(p.exponent)) - p.gamma * x[i];
            x.push(x[i] + h * dx);
        }
        (0..n_total)
            .map(|i| x[(p.burn_in + i * p.sample_stride) * substeps])
            .collect()
    }

    #[test]
    fn toy_counts_and_windows() {
        let (train, test) = gen_toy(128, 256).unwrap();
        assert_eq!((train.len(), test.len()), (128, 256));
        assert_eq!(train.times()[0], 0.0);
        assert!(*train.times().last().unwrap() < 1.0);
        assert_eq!(test.times()[0], 1.0);
        assert!(*test.times().last().unwrap() < 3.0);
        for s in [&train, &test] {
            for (t, v) in s.times().iter().zip(s.values()) {
                assert!((v - toy_signal(*t)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn toy_closed_form_points() {
        assert_eq!(toy_signal(0.0), 0.0);
        // sin(4.25π) = sin(π/4) and sin(8.5π) = sin(π/2).
        let expected = 2f64.sqrt() / 2.0 + 1.0 + 5.0;
        assert!((toy_signal(1.0) - expected).abs() < 1e-12);
    }

    #[test]
    fn toy_rejects_single_sample_sets() {
        assert!(gen_toy(1, 4).is_err());
    }

    #[test]
    fn zero_dynamics_stay_constant() {
        let p = MackeyGlassParams {
            beta: 0.0,
            gamma: 0.0,
            burn_in: 10,
            ..Default::default()
        };
        let s = gen_mackey_glass(50, &p).unwrap();
        assert!(s.values().iter().all(|&v| v == 1.2));
        assert_eq!(s.times()[49], 49.0);
    }

    #[test]
    fn default_series_stays_in_chaotic_band() {
        let p = MackeyGlassParams::default();
        let s = gen_mackey_glass(1024, &p).unwrap();
        let (lo, hi) = s
            .values()
            .iter()
            .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(lo > 0.2 && hi < 1.4, "range [{lo}, {hi}]");
        assert!(hi - lo > 0.7, "range [{lo}, {hi}] too narrow");

        // An independent fine Euler run occupies the same band.
        let reference = euler_oracle(1024, &p, 10);
        let (rlo, rhi) = reference
            .iter()
            .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        assert!((rlo - lo).abs() < 0.1 && (rhi - hi).abs() < 0.1);
    }

    #[test]
    fn early_window_tracks_fine_euler() {
        // Before chaos amplifies the discretization differences, the RK4
        // trajectory and a fine Euler trajectory coincide closely.
        let p = MackeyGlassParams {
            burn_in: 0,
            ..Default::default()
        };
        let rk = gen_mackey_glass(150, &p).unwrap();
        let euler = euler_oracle(150, &p, 100);
        let worst = rk
            .values()
            .iter()
            .zip(&euler)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 5e-3, "max deviation {worst}");
    }

    #[test]
    fn halving_dt_converges() {
        let coarse = MackeyGlassParams::default();
        let fine = MackeyGlassParams {
            dt: 0.5,
            burn_in: 2 * coarse.burn_in,
            sample_stride: 2,
            ..coarse
        };
        let a = gen_mackey_glass(512, &coarse).unwrap();
        let b = gen_mackey_glass(512, &fine).unwrap();
        let rms = (a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            / 512.0)
            .sqrt();
        assert!(rms < 1e-3, "rms {rms}");
    }

    #[test]
    fn deterministic() {
        let p = MackeyGlassParams::default();
        assert_eq!(
            gen_mackey_glass(100, &p).unwrap(),
            gen_mackey_glass(100, &p).unwrap()
        );
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = [
            MackeyGlassParams {
                dt: 0.0,
                ..Default::default()
            },
            MackeyGlassParams {
                tau: -1.0,
                ..Default::default()
            },
            MackeyGlassParams {
                tau: 0.5,
                ..Default::default()
            },
            MackeyGlassParams {
                sample_stride: 0,
                ..Default::default()
            },
        ];
        for p in bad {
            assert!(matches!(gen_mackey_glass(10, &p), Err(Error::Config(_))));
        }
        assert!(gen_mackey_glass(1, &MackeyGlassParams::default()).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        let p = MackeyGlassParams {
            gamma: -50.0,
            dt: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            gen_mackey_glass(2000, &p),
            Err(Error::Integration { .. })
        ));
    }
}
