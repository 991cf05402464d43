// SPDX-License-Identifier: MIT OR Apache-2.0

//! Forecast error metrics and the train/test benchmark harness.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::dft_real;
use crate::model::{AugmentationSpec, NdModel};
use crate::preprocess::PreprocessParams;
use crate::timeseries::{SplitSpec, TimeSeries};
use crate::train::{fit_nd, TrainConfig, TrainTrace};

fn check_lengths(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::Size(format!(
            "{} actual values but {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::Size("metrics need at least one value".into()));
    }
    Ok(())
}

/// Mean absolute percentage error as a fraction (0.1 is 10%).
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    let mut total = 0.0;
    for (index, (a, p)) in actual.iter().zip(predicted).enumerate() {
        if *a == 0.0 {
            return Err(Error::UndefinedMetric { index });
        }
        total += ((a - p) / a).abs();
    }
    Ok(total / actual.len() as f64)
}

pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    let sse: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    Ok((sse / actual.len() as f64).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model_label: String,
    /// Fraction; multiply by 100 for percent.
    pub mape: f64,
    pub rmse: f64,
    pub n_test: usize,
}

impl EvalReport {
    pub fn score(label: impl Into<String>, actual: &[f64], predicted: &[f64]) -> Result<Self> {
        Ok(Self {
            model_label: label.into(),
            mape: mape(actual, predicted)?,
            rmse: rmse(actual, predicted)?,
            n_test: actual.len(),
        })
    }
}

/// Comparison forecasts computed on the same split as the main model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    /// Periodic continuation of the training window's inverse DFT.
    Idft,
    /// Last training value, repeated.
    Persistence,
    /// The same network with no augmentation units.
    NdNoAug,
}

impl Baseline {
    pub const ALL: [Baseline; 3] = [Baseline::Idft, Baseline::Persistence, Baseline::NdNoAug];

    pub fn label(self) -> &'static str {
        match self {
            Baseline::Idft => "idft",
            Baseline::Persistence => "persistence",
            Baseline::NdNoAug => "nd_no_aug",
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Baseline::ALL
            .into_iter()
            .find(|b| b.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown baseline {s:?}")))
    }
}

/// Forecast that repeats the final training value.
pub fn persistence_forecast(train: &TimeSeries, horizon: usize) -> Vec<f64> {
    vec![*train.values().last().expect("non-empty series"); horizon]
}

/// Inverse-DFT continuation of the (preprocessed) training values evaluated
/// at the test timestamps. Samples are treated as evenly spaced.
pub fn idft_forecast(train: &TimeSeries, times: &[f64], log_filter: bool) -> Result<Vec<f64>> {
    let pre = PreprocessParams::fit(train, log_filter)?;
    let spectrum = dft_real(&pre.normalize_values(train.values())?)?;
    Ok(times
        .iter()
        .map(|&t| pre.denormalize_value(spectrum.eval(pre.normalize_time(t))))
        .collect())
}

pub const ND_LABEL: &str = "nd";

#[derive(Clone, Debug)]
pub struct Benchmark {
    /// The main model first, then baselines in the requested order.
    pub reports: Vec<EvalReport>,
    pub model: NdModel,
    pub trace: TrainTrace,
    pub predictions: Vec<f64>,
}

/// Trains on the first `split.train_count` samples, forecasts the following
/// `split.test_count` and scores the model and each requested baseline.
/// The two network fits run on separate threads.
pub fn run_benchmark(
    series: &TimeSeries,
    split: SplitSpec,
    config: &TrainConfig,
    baselines: &[Baseline],
) -> Result<Benchmark> {
    let (train, test) = series.split(split)?;
    let actual = test.values();
    let no_aug_config = TrainConfig {
        aug: AugmentationSpec::NONE,
        track: Vec::new(),
        ..config.clone()
    };
    let want_no_aug = baselines.contains(&Baseline::NdNoAug);

    let (main, no_aug) = std::thread::scope(|scope| {
        let no_aug = want_no_aug.then(|| scope.spawn(|| fit_nd(&train, &no_aug_config)));
        let main = fit_nd(&train, config);
        let no_aug = no_aug.map(|h| h.join().expect("training thread panicked"));
        (main, no_aug)
    });
    let (model, trace) = main?;
    let predictions = model.predict(test.times());

    let mut reports = vec![EvalReport::score(ND_LABEL, actual, &predictions)?];
    let mut no_aug = no_aug.transpose()?;
    for &baseline in baselines {
        let forecast = match baseline {
            Baseline::Idft => idft_forecast(&train, test.times(), config.log_filter)?,
            Baseline::Persistence => persistence_forecast(&train, actual.len()),
            Baseline::NdNoAug => {
                let (m, _) = no_aug.take().expect("trained above");
                m.predict(test.times())
            }
        };
        reports.push(EvalReport::score(baseline.label(), actual, &forecast)?);
    }
    Ok(Benchmark {
        reports,
        model,
        trace,
        predictions,
    })
}

/// `model,mape_percent,rmse`.
pub fn reports_to_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from("model,mape_percent,rmse\n");
    for r in reports {
        let _ = writeln!(out, "{},{},{}", r.model_label, r.mape * 100.0, r.rmse);
    }
    out
}

/// Aligned plain-text table of reports.
pub fn reports_to_table(reports: &[EvalReport]) -> String {
    let width = reports
        .iter()
        .map(|r| r.model_label.len())
        .chain([5])
        .max()
        .unwrap_or(5);
    let mut out = format!(
        "{:<width$}  {:>10}  {:>12}  {:>6}\n",
        "model", "MAPE %", "RMSE", "n"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<width$}  {:>10.4}  {:>12.6}  {:>6}",
            r.model_label,
            r.mape * 100.0,
            r.rmse,
            r.n_test
        );
    }
    out
}

/// The four real-world benchmark series and the protocol used for each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceDataset {
    Labor,
    Airline,
    Ozone,
    Speleothem,
}

impl ReferenceDataset {
    pub const ALL: [ReferenceDataset; 4] = [
        ReferenceDataset::Labor,
        ReferenceDataset::Airline,
        ReferenceDataset::Ozone,
        ReferenceDataset::Speleothem,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReferenceDataset::Labor => "labor",
            ReferenceDataset::Airline => "airline",
            ReferenceDataset::Ozone => "ozone",
            ReferenceDataset::Speleothem => "speleothem",
        }
    }

    pub fn split(self) -> SplitSpec {
        let (train_count, test_count) = match self {
            ReferenceDataset::Labor => (258, 96),
            ReferenceDataset::Airline => (72, 72),
            ReferenceDataset::Ozone => (152, 44),
            ReferenceDataset::Speleothem => (250, 132),
        };
        SplitSpec {
            train_count,
            test_count,
        }
    }

    /// Airline and ozone counts grow multiplicatively and are modelled in
    /// log space.
    pub fn log_filter(self) -> bool {
        matches!(self, ReferenceDataset::Airline | ReferenceDataset::Ozone)
    }

    /// Speleothem samples are irregular and carry an explicit time column.
    pub fn has_time_column(self) -> bool {
        matches!(self, ReferenceDataset::Speleothem)
    }

    /// Published errors for every compared method, as reported alongside
    /// the original evaluation. Not recomputed here.
    pub fn published(self) -> Vec<PublishedRow> {
        let col = self as usize;
        PUBLISHED
            .iter()
            .filter_map(|(model, mapes, rmses)| {
                Some(PublishedRow {
                    model,
                    mape_percent: mapes[col]?,
                    rmse: rmses[col]?,
                })
            })
            .collect()
    }

    pub fn published_nd(self) -> PublishedRow {
        self.published()
            .into_iter()
            .find(|r| r.model == "ND")
            .expect("ND row present for every dataset")
    }
}

impl FromStr for ReferenceDataset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReferenceDataset::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown reference dataset {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PublishedRow {
    pub model: &'static str,
    pub mape_percent: f64,
    pub rmse: f64,
}

type PublishedEntry = (&'static str, [Option<f64>; 4], [Option<f64>; 4]);

// Columns: labor, airline, ozone, speleothem. MAPE in percent, then RMSE.
const PUBLISHED: [PublishedEntry; 7] = [
    (
        "ARIMA",
        [Some(39.42), Some(12.34), Some(39.50), None],
        [Some(2.97), Some(75.32), Some(1.33), None],
    ),
    (
        "SARIMA",
        [Some(29.69), Some(13.33), Some(22.71), None],
        [Some(2.41), Some(67.54), Some(1.06), None],
    ),
    (
        "SVR",
        [Some(25.14), Some(47.04), Some(49.53), Some(8.50)],
        [Some(2.18), Some(209.57), Some(1.83), Some(1.078)],
    ),
    (
        "Gashler/Ashmore",
        [Some(34.38), Some(19.89), Some(77.19), None],
        [Some(2.81), Some(94.47), Some(3.71), None],
    ),
    (
        "ESN",
        [Some(15.73), Some(12.05), Some(16.15), None],
        [Some(1.09), Some(63.50), Some(0.705), None],
    ),
    (
        "LSTM",
        [Some(14.63), Some(18.95), Some(16.52), None],
        [Some(1.14), Some(93.61), Some(0.667), None],
    ),
    (
        "ND",
        [Some(10.89), Some(9.52), Some(21.59), Some(1.89)],
        [Some(1.09), Some(45.03), Some(0.99), Some(0.214)],
    ),
];

/// Published reference rows as an aligned table, labelled as such.
pub fn published_table(dataset: ReferenceDataset) -> String {
    let mut out = format!(
        "published reference values for {} (not recomputed)\n{:<16}  {:>10}  {:>12}\n",
        dataset.name(),
        "model",
        "MAPE %",
        "RMSE"
    );
    for row in dataset.published() {
        let _ = writeln!(
            out,
            "{:<16}  {:>10.2}  {:>12}",
            row.model, row.mape_percent, row.rmse
        );
    }
    out
}
