// SPDX-License-Identifier: MIT OR Apache-2.0

//! The decomposition network: one input (normalized time), a hidden layer of
//! `N` sinusoid units followed by the augmentation units, and a single
//! linear output unit.
//!
//! ```text
//! x(t) = Σ_k a_k sin(w_k t + φ_k) + Σ_j c_j act_j(u_j t + b_j) + bias
//! ```

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::PreprocessParams;

/// Half-width of the uniform distribution used for "small random" weights.
pub const INIT_HALF_WIDTH: f64 = 0.01;

const FORMAT_NAME: &str = "ndmodel";
const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Sinusoid,
    Linear,
    Softplus,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn eval(self, z: f64) -> f64 {
        match self {
            Activation::Sinusoid => z.sin(),
            Activation::Linear => z,
            Activation::Softplus => softplus(z),
            Activation::Sigmoid => sigmoid(z),
        }
    }

    /// Activation and its derivative at `z`.
    #[inline]
    pub fn eval_with_derivative(self, z: f64) -> (f64, f64) {
        match self {
            Activation::Sinusoid => z.sin_cos(),
            Activation::Linear => (z, 1.0),
            Activation::Softplus => (softplus(z), sigmoid(z)),
            Activation::Sigmoid => {
                let s = sigmoid(z);
                (s, s * (1.0 - s))
            }
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Activation::Sinusoid => "sin",
            Activation::Linear => "linear",
            Activation::Softplus => "softplus",
            Activation::Sigmoid => "sigmoid",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `ln(1 + e^z)` without overflow for large `|z|`.
#[inline]
pub fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// For a sinusoid unit `input_weight` is the frequency and `bias` the phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiddenUnit {
    pub kind: Activation,
    pub input_weight: f64,
    pub bias: f64,
}

impl HiddenUnit {
    #[inline]
    pub fn activate(&self, t: f64) -> f64 {
        self.kind.eval(self.input_weight * t + self.bias)
    }
}

/// Composition of the nonperiodic augmentation `g(t)`. All zeros means
/// `g(t) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentationSpec {
    pub linear: usize,
    pub softplus: usize,
    pub sigmoid: usize,
}

impl AugmentationSpec {
    pub const NONE: Self = Self {
        linear: 0,
        softplus: 0,
        sigmoid: 0,
    };

    pub fn new(linear: usize, softplus: usize, sigmoid: usize) -> Self {
        Self {
            linear,
            softplus,
            sigmoid,
        }
    }

    pub fn len(&self) -> usize {
        self.linear + self.softplus + self.sigmoid
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn kinds(&self) -> impl Iterator<Item = Activation> {
        std::iter::repeat_n(Activation::Linear, self.linear)
            .chain(std::iter::repeat_n(Activation::Softplus, self.softplus))
            .chain(std::iter::repeat_n(Activation::Sigmoid, self.sigmoid))
    }
}

impl Default for AugmentationSpec {
    /// Ten units of each kind.
    fn default() -> Self {
        Self::new(10, 10, 10)
    }
}

/// One additive term of the model output at a given time.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub label: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NdModel {
    hidden: Vec<HiddenUnit>,
    output_weights: Vec<f64>,
    output_bias: f64,
    n_sinusoids: usize,
    preprocess: PreprocessParams,
}

/// Frequency of sinusoid unit `k` under the iDFT-mimicking layout.
pub fn initial_frequency(k: usize) -> f64 {
    TAU * (k / 2) as f64
}

/// Phase of sinusoid unit `k`: even units compute `cos`, odd ones `-sin`.
pub fn initial_phase(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        FRAC_PI_2
    } else {
        PI
    }
}

impl NdModel {
    /// Fresh network with `n_sinusoids` sinusoid units laid out like the
    /// inverse DFT, augmentation units near identity and small random output
    /// weights. Deterministic in `seed`.
    pub fn init(n_sinusoids: usize, aug: AugmentationSpec, seed: u64) -> Result<Self> {
        if n_sinusoids < 1 {
            return Err(Error::Config("need at least one sinusoid unit".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut small = move || rng.gen_range(-INIT_HALF_WIDTH..=INIT_HALF_WIDTH);

        let mut hidden: Vec<HiddenUnit> = (0..n_sinusoids)
            .map(|k| HiddenUnit {
                kind: Activation::Sinusoid,
                input_weight: initial_frequency(k),
                bias: initial_phase(k),
            })
            .collect();
        for kind in aug.kinds() {
            let input_weight = 1.0 + small();
            let bias = small();
            hidden.push(HiddenUnit {
                kind,
                input_weight,
                bias,
            });
        }
        let output_weights = (0..hidden.len()).map(|_| small()).collect();
        let output_bias = small();
        Ok(Self {
            hidden,
            output_weights,
            output_bias,
            n_sinusoids,
            preprocess: PreprocessParams::identity(),
        })
    }

    /// Assembles a model from explicit parts, checking the layout invariants.
    pub fn from_parts(
        hidden: Vec<HiddenUnit>,
        output_weights: Vec<f64>,
        output_bias: f64,
        preprocess: PreprocessParams,
    ) -> Result<Self> {
        if hidden.len() != output_weights.len() {
            return Err(Error::Size(format!(
                "{} hidden units but {} output weights",
                hidden.len(),
                output_weights.len()
            )));
        }
        let n_sinusoids = hidden
            .iter()
            .take_while(|u| u.kind == Activation::Sinusoid)
            .count();
        if hidden[n_sinusoids..]
            .iter()
            .any(|u| u.kind == Activation::Sinusoid)
        {
            return Err(Error::Config(
                "sinusoid units must precede augmentation units".into(),
            ));
        }
        let finite = hidden
            .iter()
            .all(|u| u.input_weight.is_finite() && u.bias.is_finite())
            && output_weights.iter().all(|w| w.is_finite())
            && output_bias.is_finite();
        if !finite {
            return Err(Error::Config("model parameters must be finite".into()));
        }
        preprocess.validate()?;
        Ok(Self {
            hidden,
            output_weights,
            output_bias,
            n_sinusoids,
            preprocess,
        })
    }

    pub fn with_preprocess(mut self, preprocess: PreprocessParams) -> Self {
        self.preprocess = preprocess;
        self
    }

    pub fn hidden(&self) -> &[HiddenUnit] {
        &self.hidden
    }

    pub fn output_weights(&self) -> &[f64] {
        &self.output_weights
    }

    pub fn output_bias(&self) -> f64 {
        self.output_bias
    }

    pub fn preprocess(&self) -> &PreprocessParams {
        &self.preprocess
    }

    pub fn n_sinusoids(&self) -> usize {
        self.n_sinusoids
    }

    pub fn n_hidden(&self) -> usize {
        self.hidden.len()
    }

    /// Output weights of the sinusoid units, i.e. the amplitudes `a_k`.
    pub fn amplitudes(&self) -> &[f64] {
        &self.output_weights[..self.n_sinusoids]
    }

    pub fn set_output_weight(&mut self, index: usize, weight: f64) {
        self.output_weights[index] = weight;
    }

    pub fn set_output_bias(&mut self, bias: f64) {
        self.output_bias = bias;
    }

    pub(crate) fn output_weights_mut(&mut self) -> &mut [f64] {
        &mut self.output_weights
    }

    pub(crate) fn layers_mut(&mut self) -> (&mut [HiddenUnit], &mut [f64], &mut f64) {
        (
            &mut self.hidden,
            &mut self.output_weights,
            &mut self.output_bias,
        )
    }

    /// Output at normalized time `t`, in normalized value units.
    pub fn forward(&self, t: f64) -> f64 {
        self.hidden
            .iter()
            .zip(&self.output_weights)
            .map(|(unit, w)| w * unit.activate(t))
            .sum::<f64>()
            + self.output_bias
    }

    /// Predictions in data units at raw timestamps.
    pub fn predict(&self, raw_times: &[f64]) -> Vec<f64> {
        raw_times
            .iter()
            .map(|&t| {
                let v = self.forward(self.preprocess.normalize_time(t));
                self.preprocess.denormalize_value(v)
            })
            .collect()
    }

    /// Labels of the terms returned by [`decompose`](Self::decompose), in order.
    pub fn component_labels(&self) -> Vec<String> {
        let mut counts = [0usize; 4];
        let mut labels: Vec<String> = self
            .hidden
            .iter()
            .map(|u| {
                let slot = &mut counts[u.kind as usize];
                let label = format!("{}_{}", u.kind.label(), slot);
                *slot += 1;
                label
            })
            .collect();
        labels.push("bias".to_owned());
        labels
    }

    /// Per-unit contributions at normalized time `t`; they sum to
    /// `forward(t)`.
    pub fn decompose(&self, t: f64) -> Vec<Component> {
        self.component_labels()
            .into_iter()
            .zip(self.component_values(t))
            .map(|(label, value)| Component { label, value })
            .collect()
    }

    /// Same terms as [`decompose`](Self::decompose) without the labels.
    pub fn component_values(&self, t: f64) -> Vec<f64> {
        let mut values: Vec<f64> = self
            .hidden
            .iter()
            .zip(&self.output_weights)
            .map(|(unit, w)| w * unit.activate(t))
            .collect();
        values.push(self.output_bias);
        values
    }

    /// Number of entries in [`params`](Self::params).
    pub fn n_params(&self) -> usize {
        3 * self.hidden.len() + 1
    }

    /// Flat parameter vector: `(input_weight, bias)` per hidden unit, then
    /// the output weights, then the output bias.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        for u in &self.hidden {
            p.push(u.input_weight);
            p.push(u.bias);
        }
        p.extend_from_slice(&self.output_weights);
        p.push(self.output_bias);
        p
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::Size(format!(
                "expected {} parameters, got {}",
                self.n_params(),
                params.len()
            )));
        }
        let m = self.hidden.len();
        for (u, pair) in self.hidden.iter_mut().zip(params.chunks_exact(2)) {
            u.input_weight = pair[0];
            u.bias = pair[1];
        }
        self.output_weights.copy_from_slice(&params[2 * m..3 * m]);
        self.output_bias = params[3 * m];
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }

    /// Versioned JSON document; floats use shortest round-trip decimals so
    /// parsing restores every parameter bit for bit.
    pub fn to_text(&self) -> String {
        let file = ModelFile {
            format: FORMAT_NAME.to_owned(),
            version: FORMAT_VERSION,
            preprocess: self.preprocess,
            output_bias: self.output_bias,
            units: self
                .hidden
                .iter()
                .zip(&self.output_weights)
                .map(|(u, &w)| UnitRecord {
                    kind: u.kind,
                    input_weight: u.input_weight,
                    bias: u.bias,
                    output_weight: w,
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("model serializes");
        text.push('\n');
        text
    }
}

impl FromStr for NdModel {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if file.format != FORMAT_NAME {
            return Err(Error::Format(format!("unknown format {:?}", file.format)));
        }
        if file.version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported version {} (expected {FORMAT_VERSION})",
                file.version
            )));
        }
        if file.units.is_empty() {
            return Err(Error::Format("model has no units".into()));
        }
        let (hidden, weights) = file
            .units
            .iter()
            .map(|r| {
                (
                    HiddenUnit {
                        kind: r.kind,
                        input_weight: r.input_weight,
                        bias: r.bias,
                    },
                    r.output_weight,
                )
            })
            .unzip();
        Self::from_parts(hidden, weights, file.output_bias, file.preprocess)
            .map_err(|e| Error::Format(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format: String,
    version: u32,
    preprocess: PreprocessParams,
    output_bias: f64,
    units: Vec<UnitRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitRecord {
    kind: Activation,
    input_weight: f64,
    bias: f64,
    output_weight: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn single_sinusoid(a: f64, w: f64, phi: f64) -> NdModel {
        NdModel::from_parts(
            vec![HiddenUnit {
                kind: Activation::Sinusoid,
                input_weight: w,
                bias: phi,
            }],
            vec![a],
            0.0,
            PreprocessParams::identity(),
        )
        .unwrap()
    }

    #[test]
    fn init_layout_for_four_units() {
        let m = NdModel::init(4, AugmentationSpec::NONE, 0).unwrap();
        let freqs: Vec<f64> = m.hidden().iter().map(|u| u.input_weight).collect();
        let phases: Vec<f64> = m.hidden().iter().map(|u| u.bias).collect();
        assert_eq!(freqs, vec![0.0, 0.0, TAU, TAU]);
        assert_eq!(phases, vec![FRAC_PI_2, PI, FRAC_PI_2, PI]);
    }

    #[test]
    fn init_rejects_zero_units() {
        assert!(matches!(
            NdModel::init(0, AugmentationSpec::default(), 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn first_unit_is_constant_one() {
        let m = NdModel::init(6, AugmentationSpec::NONE, 3).unwrap();
        for t in [0.0, 0.3, 1.7, -2.0] {
            assert_eq!(m.hidden()[0].activate(t), 1.0);
        }
    }

    #[test]
    fn init_phase_identities() {
        let m = NdModel::init(9, AugmentationSpec::NONE, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let t: f64 = rng.gen_range(-3.0..3.0);
            for (k, u) in m.hidden().iter().enumerate() {
                let f = TAU * (k / 2) as f64;
                let expected = if k % 2 == 0 {
                    (f * t).cos()
                } else {
                    -(f * t).sin()
                };
                assert_abs_diff_eq!(u.activate(t), expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn init_is_deterministic_and_small() {
        let aug = AugmentationSpec::default();
        let a = NdModel::init(16, aug, 42).unwrap();
        let b = NdModel::init(16, aug, 42).unwrap();
        let c = NdModel::init(16, aug, 43).unwrap();
        assert_eq!(a.params(), b.params());
        assert_ne!(a.params(), c.params());
        assert_eq!(a.n_hidden(), 46);
        assert!(a
            .output_weights()
            .iter()
            .all(|w| w.abs() <= INIT_HALF_WIDTH));
        assert!(a.output_bias().abs() <= INIT_HALF_WIDTH);
        for u in &a.hidden()[16..] {
            assert!((u.input_weight - 1.0).abs() <= INIT_HALF_WIDTH);
            assert!(u.bias.abs() <= INIT_HALF_WIDTH);
        }
        let kinds: Vec<_> = a.hidden()[16..].iter().map(|u| u.kind).collect();
        assert_eq!(kinds[0], Activation::Linear);
        assert_eq!(kinds[10], Activation::Softplus);
        assert_eq!(kinds[29], Activation::Sigmoid);
    }

    #[test]
    fn zero_weights_give_zero_output() {
        let mut m = NdModel::init(8, AugmentationSpec::default(), 0).unwrap();
        for i in 0..m.n_hidden() {
            m.set_output_weight(i, 0.0);
        }
        m.set_output_bias(0.0);
        for t in [0.0, 0.5, 2.5] {
            assert_eq!(m.forward(t), 0.0);
            assert!(m.decompose(t).iter().all(|c| c.value == 0.0));
        }
    }

    #[test]
    fn single_cosine_values() {
        let m = single_sinusoid(1.0, TAU, FRAC_PI_2);
        assert_abs_diff_eq!(m.forward(0.0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.forward(0.25), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn identity_preprocess_predict_is_forward() {
        let m = NdModel::init(5, AugmentationSpec::new(1, 1, 1), 9).unwrap();
        let times = [0.0, 0.4, 1.3];
        let p = m.predict(&times);
        for (t, v) in times.iter().zip(p) {
            assert_eq!(v, m.forward(*t));
        }
    }

    #[test]
    fn log_filtered_predict_exponentiates() {
        let pre = PreprocessParams {
            t_offset: 0.0,
            t_scale: 1.0,
            v_offset: 1.0,
            v_scale: 0.5,
            log_filter: true,
        };
        let m = single_sinusoid(2.0, 0.0, FRAC_PI_2).with_preprocess(pre);
        // forward is constant 2 → unscale 2 * 0.5 + 1 = 2 → e^2.
        assert_abs_diff_eq!(m.predict(&[0.7])[0], 2f64.exp(), epsilon = 1e-12);
    }

    #[test]
    fn decomposition_sums_to_forward() {
        let m = NdModel::init(12, AugmentationSpec::new(2, 2, 2), 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let t: f64 = rng.gen_range(-1.0..4.0);
            let f = m.forward(t);
            let sum: f64 = m.decompose(t).iter().map(|c| c.value).sum();
            assert!((sum - f).abs() <= 1e-12 * f.abs().max(1.0));
        }
        let labels = m.component_labels();
        assert_eq!(labels[0], "sin_0");
        assert_eq!(labels[12], "linear_0");
        assert_eq!(labels[14], "softplus_0");
        assert_eq!(labels[17], "sigmoid_1");
        assert_eq!(labels.last().unwrap(), "bias");
    }

    #[test]
    fn zero_amplitude_unit_contributes_zero() {
        let mut m = NdModel::init(4, AugmentationSpec::NONE, 0).unwrap();
        m.set_output_weight(2, 0.0);
        assert_eq!(m.decompose(0.37)[2].value, 0.0);
    }

    #[test]
    fn softplus_and_sigmoid_are_overflow_safe() {
        assert_eq!(softplus(1000.0), 1000.0);
        assert_eq!(softplus(-1000.0), 0.0);
        assert_abs_diff_eq!(softplus(0.0), 2f64.ln(), epsilon = 1e-15);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_abs_diff_eq!(sigmoid(0.0), 0.5);
    }

    #[test]
    fn params_round_trip() {
        let mut m = NdModel::init(6, AugmentationSpec::new(1, 1, 1), 2).unwrap();
        let mut p = m.params();
        assert_eq!(p.len(), m.n_params());
        p[0] = 3.5;
        let last = p.len() - 1;
        p[last] = -1.0;
        m.set_params(&p).unwrap();
        assert_eq!(m.hidden()[0].input_weight, 3.5);
        assert_eq!(m.output_bias(), -1.0);
        assert!(m.set_params(&p[1..]).is_err());
    }

    #[test]
    fn from_parts_checks_layout() {
        let sin = HiddenUnit {
            kind: Activation::Sinusoid,
            input_weight: 1.0,
            bias: 0.0,
        };
        let lin = HiddenUnit {
            kind: Activation::Linear,
            ..sin
        };
        let pre = PreprocessParams::identity();
        assert!(NdModel::from_parts(vec![lin, sin], vec![1.0, 1.0], 0.0, pre).is_err());
        assert!(NdModel::from_parts(vec![sin, lin], vec![1.0], 0.0, pre).is_err());
        assert!(NdModel::from_parts(vec![sin, lin], vec![1.0, f64::NAN], 0.0, pre).is_err());
        assert!(NdModel::from_parts(vec![sin, lin], vec![1.0, 1.0], 0.0, pre).is_ok());
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let m = NdModel::init(7, AugmentationSpec::new(2, 1, 1), 77)
            .unwrap()
            .with_preprocess(PreprocessParams {
                t_offset: 1489.5,
                t_scale: 1.0 / 3.0,
                v_offset: -0.1,
                v_scale: std::f64::consts::E,
                log_filter: true,
            });
        let back: NdModel = m.to_text().parse().unwrap();
        assert_eq!(back, m);
        let bits = |m: &NdModel| m.params().iter().map(|p| p.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&m));
    }

    #[test]
    fn malformed_files_are_format_errors() {
        let text = NdModel::init(3, AugmentationSpec::NONE, 0)
            .unwrap()
            .to_text();
        let truncated = &text[..text.len() / 2];
        assert!(matches!(
            truncated.parse::<NdModel>(),
            Err(Error::Format(_))
        ));
        let bumped = text.replace("\"version\": 1", "\"version\": 2");
        assert!(matches!(bumped.parse::<NdModel>(), Err(Error::Format(_))));
        assert!(matches!("".parse::<NdModel>(), Err(Error::Format(_))));
        let bad_scale = text.replace("\"t_scale\": 1.0", "\"t_scale\": -1.0");
        assert!(matches!(
            bad_scale.parse::<NdModel>(),
            Err(Error::Format(_))
        ));
    }
}
