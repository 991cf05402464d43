// SPDX-License-Identifier: MIT OR Apache-2.0

//! Trains the full model and both ablations on the toy signal and prints
//! their test errors.

use std::time::Instant;

use ndecomp::datasets::gen_toy;
use ndecomp::evaluate::rmse;
use ndecomp::fourier::dft_real;
use ndecomp::train::{fit_nd, TrainConfig};
use ndecomp::{AugmentationSpec, PreprocessParams};

fn main() -> ndecomp::Result<()> {
    let (train, test) = gen_toy(128, 256)?;
    let epochs = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(TrainConfig::default().epochs);
    let seed = std::env::var("SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let full = TrainConfig {
        epochs,
        seed,
        ..Default::default()
    };
    let variants = [
        ("full", full.clone()),
        (
            "frozen",
            TrainConfig {
                freeze_frequencies: true,
                ..full.clone()
            },
        ),
        (
            "no_aug",
            TrainConfig {
                aug: AugmentationSpec::NONE,
                ..full.clone()
            },
        ),
    ];
    for (name, cfg) in variants {
        let start = Instant::now();
        let (model, trace) = fit_nd(&train, &cfg)?;
        let err = rmse(test.values(), &model.predict(test.times()))?;
        let mut big: Vec<(usize, f64, f64)> = model
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.abs() > 1e-2)
            .map(|(k, &a)| (k, model.hidden()[k].input_weight / std::f64::consts::PI, a))
            .collect();
        big.sort_by(|a, b| b.2.abs().total_cmp(&a.2.abs()));
        println!(
            "{name:>7}: test rmse {err:.4}, train rmse {:.4}, {} amplitudes > 1e-2, {:.1}s",
            trace.rmse.last().unwrap(),
            big.len(),
            start.elapsed().as_secs_f64()
        );
        for (k, w, a) in big.iter().take(8) {
            println!("         unit {k:>3}: w = {w:.4}π, a = {a:.4}");
        }
    }

    let pre = PreprocessParams::fit(&train, false)?;
    let spectrum = dft_real(&pre.normalize_values(train.values())?)?;
    let idft: Vec<f64> = test
        .times()
        .iter()
        .map(|&t| pre.denormalize_value(spectrum.eval(pre.normalize_time(t))))
        .collect();
    println!("   idft: test rmse {:.4}", rmse(test.values(), &idft)?);
    Ok(())
}
