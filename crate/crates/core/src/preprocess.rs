// SPDX-License-Identifier: MIT OR Apache-2.0

//! Invertible scaling of the time and value axes.
//!
//! Training timestamps are mapped so that the training window covers
//! `[0, 1)`: with `N` samples spanning `[t_min, t_max]`, the map is
//! `t' = (t - t_min) / ((t_max - t_min) * N / (N - 1))`. For evenly spaced
//! samples this places sample `k` at exactly `k / N`, which is what lets the
//! sinusoid frequencies be plain multiples of `2π`, and an evenly spaced
//! continuation lands at `1, 1 + 1/N, ...`. With irregular spacing, the
//! point `t' = 1` sits one mean spacing past the last training sample.
//!
//! Values are optionally passed through `ln`, then min-max scaled to
//! `[0, 10]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

/// Upper end of the normalized value range.
pub const VALUE_RANGE: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreprocessParams {
    pub t_offset: f64,
    pub t_scale: f64,
    pub v_offset: f64,
    pub v_scale: f64,
    pub log_filter: bool,
}

impl Default for PreprocessParams {
    fn default() -> Self {
        Self::identity()
    }
}

impl PreprocessParams {
    /// The do-nothing transform.
    pub fn identity() -> Self {
        Self {
            t_offset: 0.0,
            t_scale: 1.0,
            v_offset: 0.0,
            v_scale: 1.0,
            log_filter: false,
        }
    }

    pub fn fit(train: &TimeSeries, log_filter: bool) -> Result<Self> {
        let n = train.len();
        let times = train.times();
        let (t_min, t_max) = (times[0], times[n - 1]);
        let span = t_max - t_min;
        if !(span > 0.0 && span.is_finite()) {
            return Err(Error::DegenerateAxis {
                count: n,
                value: t_min,
            });
        }
        let t_scale = span * n as f64 / (n - 1) as f64;

        let filtered = filter_values(train.values(), log_filter)?;
        let (lo, hi) = filtered
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let (v_offset, v_scale) = if hi > lo {
            (lo, (hi - lo) / VALUE_RANGE)
        } else {
            // Constant series: centre it in the range.
            (lo - VALUE_RANGE / 2.0, 1.0)
        };
        Ok(Self {
            t_offset: t_min,
            t_scale,
            v_offset,
            v_scale,
            log_filter,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.t_offset, self.t_scale, self.v_offset, self.v_scale]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.t_scale <= 0.0 || self.v_scale <= 0.0 {
            return Err(Error::Config(format!(
                "preprocessing parameters must be finite with positive scales: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn normalize_time(&self, t: f64) -> f64 {
        (t - self.t_offset) / self.t_scale
    }

    pub fn denormalize_time(&self, t: f64) -> f64 {
        t * self.t_scale + self.t_offset
    }

    pub fn normalize_values(&self, values: &[f64]) -> Result<Vec<f64>> {
        let mut out = filter_values(values, self.log_filter)?;
        for v in &mut out {
            *v = (*v - self.v_offset) / self.v_scale;
        }
        Ok(out)
    }

    pub fn denormalize_value(&self, v: f64) -> f64 {
        let unscaled = v * self.v_scale + self.v_offset;
        if self.log_filter {
            unscaled.exp()
        } else {
            unscaled
        }
    }

    /// Maps model outputs back to data units. Total: overflowing
    /// exponentials become infinite rather than failing.
    pub fn invert_values(&self, predictions: &[f64]) -> Vec<f64> {
        predictions
            .iter()
            .map(|&v| self.denormalize_value(v))
            .collect()
    }

    pub fn apply(&self, series: &TimeSeries) -> Result<TimeSeries> {
        let times = series
            .times()
            .iter()
            .map(|&t| self.normalize_time(t))
            .collect();
        let values = self.normalize_values(series.values())?;
        TimeSeries::new(series.name(), times, values)
    }
}

fn filter_values(values: &[f64], log_filter: bool) -> Result<Vec<f64>> {
    if !log_filter {
        return Ok(values.to_vec());
    }
    values
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if value > 0.0 {
                Ok(value.ln())
            } else {
                Err(Error::Domain { index, value })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::E;

    #[test]
    fn implicit_times_map_to_k_over_n() {
        let s = TimeSeries::from_values("s", (0..128).map(|i| (i as f64).cos()).collect()).unwrap();
        let p = PreprocessParams::fit(&s, false).unwrap();
        let out = p.apply(&s).unwrap();
        for (k, &t) in out.times().iter().enumerate() {
            assert_relative_eq!(t, k as f64 / 128.0, max_relative = 1e-15);
        }
        assert!(*out.times().last().unwrap() < 1.0);
        assert_eq!(p.normalize_time(128.0), 1.0);
    }

    #[test]
    fn min_max_endpoints() {
        let s = TimeSeries::from_values("s", vec![2.0, 3.0, 4.0]).unwrap();
        let p = PreprocessParams::fit(&s, false).unwrap();
        let v = p.normalize_values(&[2.0, 3.0, 4.0]).unwrap();
        assert_relative_eq!(v[0], 0.0);
        assert_relative_eq!(v[1], 5.0, epsilon = 1e-12);
        assert_relative_eq!(v[2], 10.0, epsilon = 1e-12);
        assert_relative_eq!(p.denormalize_value(0.0), 2.0);
    }

    #[test]
    fn training_set_lands_in_unit_box() {
        let s = TimeSeries::new("s", vec![-3.0, 0.5, 0.7, 9.0], vec![5.0, -1.0, 2.0, 0.0]).unwrap();
        let p = PreprocessParams::fit(&s, false).unwrap();
        let out = p.apply(&s).unwrap();
        assert!(out.times().iter().all(|&t| (0.0..1.0).contains(&t)));
        assert!(out
            .values()
            .iter()
            .all(|&v| (0.0..=10.0 + 1e-12).contains(&v)));
        // One mean spacing past the last sample is exactly t' = 1.
        assert_eq!(p.normalize_time(13.0), 1.0);
        assert!(p.normalize_time(9.5) < 1.0);
    }

    #[test]
    fn constant_values_map_to_midpoint() {
        let s = TimeSeries::from_values("s", vec![7.0; 5]).unwrap();
        let p = PreprocessParams::fit(&s, false).unwrap();
        assert_eq!(p.v_scale, 1.0);
        assert!(p
            .normalize_values(s.values())
            .unwrap()
            .iter()
            .all(|&v| v == 5.0));
        assert_eq!(p.denormalize_value(5.0), 7.0);
    }

    #[test]
    fn log_filter_inverse_composes() {
        let s = TimeSeries::from_values("s", vec![E, E * E, E.powi(3)]).unwrap();
        let p = PreprocessParams::fit(&s, true).unwrap();
        // ln spans [1, 3], so v' = 10 unscales to 3 and exponentiates to e^3.
        assert_relative_eq!(p.denormalize_value(10.0), E.powi(3), max_relative = 1e-14);
        assert_relative_eq!(p.denormalize_value(0.0), E, max_relative = 1e-14);
    }

    #[test]
    fn log_filter_rejects_nonpositive() {
        let s = TimeSeries::from_values("s", vec![1.0, 0.0, 2.0]).unwrap();
        assert!(matches!(
            PreprocessParams::fit(&s, true),
            Err(Error::Domain { index: 1, .. })
        ));
        let ok = TimeSeries::from_values("s", vec![1.0, 2.0]).unwrap();
        let p = PreprocessParams::fit(&ok, true).unwrap();
        assert!(p.apply(&s).is_err());
    }

    #[test]
    fn identity_is_identity() {
        let p = PreprocessParams::identity();
        assert_eq!(p.normalize_time(0.3), 0.3);
        assert_eq!(p.denormalize_value(-4.5), -4.5);
    }

    proptest! {
        #[test]
        fn maps_are_strictly_increasing(a in -1e3f64..1e3, b in -1e3f64..1e3, log in any::<bool>()) {
            prop_assume!(a != b);
            let s = TimeSeries::from_values("s", vec![1.0, 50.0, 3.0]).unwrap();
            let p = PreprocessParams::fit(&s, log).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(p.normalize_time(lo) < p.normalize_time(hi));
            if log {
                let v = p.normalize_values(&[lo.abs() + 1.0, lo.abs() + 1.0 + (hi - lo)]).unwrap();
                prop_assert!(v[0] < v[1]);
            } else {
                let v = p.normalize_values(&[lo, hi]).unwrap();
                prop_assert!(v[0] < v[1]);
            }
        }
    }
}
