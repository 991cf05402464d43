// SPDX-License-Identifier: MIT OR Apache-2.0

//! Stochastic gradient descent on squared error with an L1 proximal shrink
//! of the output layer before every sample presentation.
//!
//! Every parameter takes gradient steps: amplitudes, augmentation weights,
//! and the sinusoid frequencies and phases. Only the output weights are
//! regularized.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Activation, AugmentationSpec, NdModel};
use crate::preprocess::PreprocessParams;
use crate::timeseries::TimeSeries;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Per-presentation shrink is `l1_strength * learning_rate`.
    pub l1_strength: f64,
    pub epochs: usize,
    pub seed: u64,
    pub aug: AugmentationSpec,
    pub log_filter: bool,
    /// Keep sinusoid frequencies and phases at their initial values.
    pub freeze_frequencies: bool,
    /// Sinusoid units whose frequency and amplitude are recorded each epoch.
    pub track: Vec<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            l1_strength: 1e-2,
            epochs: 10_000,
            seed: 0,
            aug: AugmentationSpec::default(),
            log_filter: false,
            freeze_frequencies: false,
            track: Vec::new(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.l1_strength >= 0.0 && self.l1_strength.is_finite()) {
            return Err(Error::Config(format!(
                "L1 strength must be nonnegative, got {}",
                self.l1_strength
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn shrink_per_presentation(&self) -> f64 {
        self.l1_strength * self.learning_rate
    }
}

/// Frequency and amplitude of one tracked sinusoid unit at an epoch end.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitSnapshot {
    pub frequency: f64,
    pub amplitude: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    /// RMSE over each epoch's presentations in normalized value units,
    /// measured on each sample just before its update.
    pub rmse: Vec<f64>,
    pub tracked_units: Vec<usize>,
    /// One row per epoch, one entry per tracked unit.
    pub snapshots: Vec<Vec<UnitSnapshot>>,
}

impl TrainTrace {
    pub fn epochs(&self) -> usize {
        self.rmse.len()
    }

    /// `epoch,rmse[,w_k,a_k...]`, epochs counted from 1.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("epoch,rmse");
        for k in &self.tracked_units {
            let _ = write!(out, ",w_{k},a_{k}");
        }
        out.push('\n');
        for (i, rmse) in self.rmse.iter().enumerate() {
            let _ = write!(out, "{},{rmse}", i + 1);
            if let Some(row) = self.snapshots.get(i) {
                for s in row {
                    let _ = write!(out, ",{},{}", s.frequency, s.amplitude);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Exact gradient of `0.5 * (forward(t) - target)^2`, laid out like
/// [`NdModel::params`].
pub fn gradient(model: &NdModel, t: f64, target: f64) -> Vec<f64> {
    let m = model.n_hidden();
    let mut grad = vec![0.0; model.n_params()];
    let mut acts = Vec::with_capacity(m);
    let mut output = 0.0;
    for (unit, w) in model.hidden().iter().zip(model.output_weights()) {
        let (h, dh) = unit
            .kind
            .eval_with_derivative(unit.input_weight * t + unit.bias);
        output += w * h;
        acts.push((h, dh));
    }
    let residual = output + model.output_bias() - target;
    for (i, ((h, dh), w)) in acts.iter().zip(model.output_weights()).enumerate() {
        let g = residual * w * dh;
        grad[2 * i] = g * t;
        grad[2 * i + 1] = g;
        grad[2 * m + i] = residual * h;
    }
    grad[3 * m] = residual;
    grad
}

/// Soft-thresholds every output weight toward zero by `amount`. The output
/// bias and all hidden parameters are left alone.
pub fn l1_shrink(model: &mut NdModel, amount: f64) {
    shrink_weights(model.output_weights_mut(), amount);
}

#[inline]
fn shrink_weights(weights: &mut [f64], amount: f64) {
    for w in weights {
        let magnitude = w.abs() - amount;
        *w = if magnitude > 0.0 {
            magnitude.copysign(*w)
        } else {
            0.0
        };
    }
}

/// Reusable buffers for [`sgd_step`].
#[derive(Default)]
pub struct StepScratch {
    acts: Vec<(f64, f64)>,
}

/// One presentation: shrink the output layer by `shrink`, then take a
/// gradient step of size `step` on `(t, target)`. Returns the residual seen
/// by the gradient step.
pub fn sgd_step(
    model: &mut NdModel,
    scratch: &mut StepScratch,
    t: f64,
    target: f64,
    step: f64,
    shrink: f64,
    freeze_sinusoids: bool,
) -> f64 {
    let (hidden, weights, bias) = model.layers_mut();
    if shrink > 0.0 {
        shrink_weights(weights, shrink);
    }

    scratch.acts.clear();
    let mut output = 0.0;
    for (unit, w) in hidden.iter().zip(weights.iter()) {
        let (h, dh) = unit
            .kind
            .eval_with_derivative(unit.input_weight * t + unit.bias);
        output += w * h;
        scratch.acts.push((h, dh));
    }
    let residual = output + *bias - target;
    let scaled = step * residual;

    for ((unit, w), &(h, dh)) in hidden.iter_mut().zip(weights.iter_mut()).zip(&scratch.acts) {
        let old_w = *w;
        *w -= scaled * h;
        if freeze_sinusoids && unit.kind == Activation::Sinusoid {
            continue;
        }
        let g = scaled * old_w * dh;
        unit.input_weight -= g * t;
        unit.bias -= g;
    }
    *bias -= scaled;
    residual
}

/// Fits preprocessing on `train`, builds a network with one sinusoid per
/// training sample and trains it for `config.epochs` shuffled passes.
pub fn fit_nd(train: &TimeSeries, config: &TrainConfig) -> Result<(NdModel, TrainTrace)> {
    config.validate()?;
    let n = train.len();
    if let Some(&k) = config.track.iter().find(|&&k| k >= n) {
        return Err(Error::Config(format!(
            "tracked unit {k} out of range for {n} sinusoid units"
        )));
    }
    let pre = PreprocessParams::fit(train, config.log_filter)?;
    let normalized = pre.apply(train)?;
    let times = normalized.times();
    let targets = normalized.values();

    let mut model = NdModel::init(n, config.aug, config.seed)?.with_preprocess(pre);
    // Separate stream from the one used for initialization.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);

    let step = config.learning_rate;
    let shrink = config.shrink_per_presentation();
    let mut order: Vec<usize> = (0..n).collect();
    let mut scratch = StepScratch::default();
    let mut trace = TrainTrace {
        tracked_units: config.track.clone(),
        ..Default::default()
    };

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut sse = 0.0;
        for &i in &order {
            let r = sgd_step(
                &mut model,
                &mut scratch,
                times[i],
                targets[i],
                step,
                shrink,
                config.freeze_frequencies,
            );
            sse += r * r;
        }
        let rmse = (sse / n as f64).sqrt();
        if !rmse.is_finite() {
            return Err(Error::Diverged { epoch, rmse });
        }
        trace.rmse.push(rmse);
        if !config.track.is_empty() {
            trace.snapshots.push(
                config
                    .track
                    .iter()
                    .map(|&k| UnitSnapshot {
                        frequency: model.hidden()[k].input_weight,
                        amplitude: model.output_weights()[k],
                    })
                    .collect(),
            );
        }
    }
    Ok((model, trace))
}
