// SPDX-License-Identifier: MIT OR Apache-2.0

//! Mackey-Glass forecast with and without the augmentation units.

use std::time::Instant;

use ndecomp::datasets::{gen_mackey_glass, MackeyGlassParams};
use ndecomp::evaluate::{reports_to_table, run_benchmark, Baseline};
use ndecomp::train::TrainConfig;
use ndecomp::SplitSpec;

fn main() -> ndecomp::Result<()> {
    let mut args = std::env::args().skip(1);
    let epochs = args
        .next()
        .and_then(|s| s.parse().ok())
        .unwrap_or(TrainConfig::default().epochs);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let series = gen_mackey_glass(1024, &MackeyGlassParams::default())?;
    let config = TrainConfig {
        epochs,
        seed,
        ..Default::default()
    };
    let start = Instant::now();
    let bench = run_benchmark(&series, SplitSpec::new(512, 512)?, &config, &Baseline::ALL)?;
    print!("{}", reports_to_table(&bench.reports));
    println!("{:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
