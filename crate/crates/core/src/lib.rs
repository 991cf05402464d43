// SPDX-License-Identifier: MIT OR Apache-2.0

//! Neural decomposition of time series.
//!
//! A series is fit by a one-hidden-layer network whose hidden units are
//! sinusoids (initialized with the frequencies and phases of the inverse
//! DFT) plus a handful of nonperiodic augmentation units. Frequencies,
//! phases and amplitudes are all trained with SGD; an L1 shrink on the
//! output layer keeps only the sinusoids the data needs, so the fitted
//! model extrapolates instead of repeating the training window.
//!
//! ```no_run
//! use ndecomp::{datasets, train::{fit_nd, TrainConfig}, evaluate::rmse};
//!
//! let (train, test) = datasets::gen_toy(128, 256)?;
//! let (model, _trace) = fit_nd(&train, &TrainConfig::default())?;
//! let forecast = model.predict(test.times());
//! println!("test rmse {}", rmse(test.values(), &forecast)?);
//! # Ok::<(), ndecomp::Error>(())
//! ```

#![forbid(unsafe_code)]

pub mod datasets;
pub mod error;
pub mod evaluate;
pub mod fourier;
pub mod model;
pub mod preprocess;
pub mod timeseries;
pub mod train;

pub use error::{Error, Result};
pub use model::{Activation, AugmentationSpec, Component, HiddenUnit, NdModel};
pub use preprocess::PreprocessParams;
pub use timeseries::{SplitSpec, TimeSeries};
pub use train::{TrainConfig, TrainTrace};
