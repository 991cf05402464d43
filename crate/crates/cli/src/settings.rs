// SPDX-License-Identifier: MIT OR Apache-2.0

//! Training settings shared by `train` and `benchmark`, layered as
//! defaults, then an optional `key=value` file, then command-line flags.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use ndecomp::{AugmentationSpec, TrainConfig};

use crate::Failure;

#[derive(Args, Debug, Clone, Default)]
pub struct TrainArgs {
    /// File of `key=value` lines (learning_rate, l1_strength, epochs, seed,
    /// log_filter, freeze_frequencies, no_aug, linear, softplus, sigmoid).
    /// Flags on the command line take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Passes over the training set [default: 10000]
    #[arg(long)]
    pub epochs: Option<usize>,

    /// SGD learning rate [default: 0.001]
    #[arg(long = "lr", value_name = "RATE")]
    pub learning_rate: Option<f64>,

    /// L1 strength on the output layer [default: 0.01]
    #[arg(long = "l1", value_name = "STRENGTH")]
    pub l1_strength: Option<f64>,

    /// Model the natural log of the values.
    #[arg(long)]
    pub log_filter: bool,

    /// Train without augmentation units.
    #[arg(long, conflicts_with_all = ["linear", "softplus", "sigmoid"])]
    pub no_aug: bool,

    /// Keep sinusoid frequencies and phases at their initial values.
    #[arg(long)]
    pub freeze_frequencies: bool,

    /// Linear augmentation units [default: 10]
    #[arg(long, value_name = "N")]
    pub linear: Option<usize>,

    /// Softplus augmentation units [default: 10]
    #[arg(long, value_name = "N")]
    pub softplus: Option<usize>,

    /// Sigmoid augmentation units [default: 10]
    #[arg(long, value_name = "N")]
    pub sigmoid: Option<usize>,
}

impl TrainArgs {
    pub fn resolve(&self, mut config: TrainConfig) -> Result<TrainConfig, Failure> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            apply_file(&mut config, &text)
                .map_err(|msg| Failure::Usage(format!("{}: {msg}", path.display())))?;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(epochs) = self.epochs {
            config.epochs = epochs;
        }
        if let Some(lr) = self.learning_rate {
            config.learning_rate = lr;
        }
        if let Some(l1) = self.l1_strength {
            config.l1_strength = l1;
        }
        config.log_filter |= self.log_filter;
        config.freeze_frequencies |= self.freeze_frequencies;
        if let Some(n) = self.linear {
            config.aug.linear = n;
        }
        if let Some(n) = self.softplus {
            config.aug.softplus = n;
        }
        if let Some(n) = self.sigmoid {
            config.aug.sigmoid = n;
        }
        if self.no_aug {
            config.aug = AugmentationSpec::NONE;
        }
        config.validate()?;
        Ok(config)
    }
}

fn apply_file(config: &mut TrainConfig, text: &str) -> Result<(), String> {
    let mut no_aug = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| format!("line {}: {key} expects {what}, got {value:?}", lineno + 1);
        match key {
            "learning_rate" | "lr" => {
                config.learning_rate = value.parse().map_err(|_| bad("a number"))?
            }
            "l1_strength" | "l1" => {
                config.l1_strength = value.parse().map_err(|_| bad("a number"))?
            }
            "epochs" => config.epochs = value.parse().map_err(|_| bad("an integer"))?,
            "seed" => config.seed = value.parse().map_err(|_| bad("an integer"))?,
            "linear" => config.aug.linear = value.parse().map_err(|_| bad("an integer"))?,
            "softplus" => config.aug.softplus = value.parse().map_err(|_| bad("an integer"))?,
            "sigmoid" => config.aug.sigmoid = value.parse().map_err(|_| bad("an integer"))?,
            "log_filter" => config.log_filter = value.parse().map_err(|_| bad("true or false"))?,
            "freeze_frequencies" => {
                config.freeze_frequencies = value.parse().map_err(|_| bad("true or false"))?
            }
            "no_aug" => no_aug = value.parse().map_err(|_| bad("true or false"))?,
            _ => return Err(format!("line {}: unknown key {key:?}", lineno + 1)),
        }
    }
    if no_aug {
        config.aug = AugmentationSpec::NONE;
    }
    Ok(())
}
