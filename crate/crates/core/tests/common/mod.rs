// SPDX-License-Identifier: MIT OR Apache-2.0

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ndecomp::{Activation, HiddenUnit, NdModel, PreprocessParams};

/// A model with every parameter drawn at random: 1 to 8 sinusoids and 0 to
/// 3 units of each augmentation kind.
pub fn random_model(rng: &mut ChaCha8Rng) -> NdModel {
    let mut hidden = Vec::new();
    for _ in 0..rng.gen_range(1..=8) {
        hidden.push(HiddenUnit {
            kind: Activation::Sinusoid,
            input_weight: rng.gen_range(-30.0..30.0),
            bias: rng.gen_range(-4.0..4.0),
        });
    }
    for kind in [
        Activation::Linear,
        Activation::Softplus,
        Activation::Sigmoid,
    ] {
        for _ in 0..rng.gen_range(0..=3) {
            hidden.push(HiddenUnit {
                kind,
                input_weight: rng.gen_range(-3.0..3.0),
                bias: rng.gen_range(-2.0..2.0),
            });
        }
    }
    let weights = (0..hidden.len())
        .map(|_| rng.gen_range(-2.0..2.0))
        .collect();
    let bias = rng.gen_range(-5.0..5.0);
    NdModel::from_parts(hidden, weights, bias, PreprocessParams::identity()).unwrap()
}

pub fn loss(model: &NdModel, t: f64, target: f64) -> f64 {
    let r = model.forward(t) - target;
    0.5 * r * r
}

/// Evenly spaced `count` points of `f` starting at 0 with unit spacing.
pub fn sample(count: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    (0..count).map(|i| f(i as f64)).collect()
}
