// SPDX-License-Identifier: MIT OR Apache-2.0

//! Sampled signals, train/test splits and CSV ingestion.
//!
//! A [`TimeSeries`] holds strictly increasing timestamps in arbitrary units
//! and one finite value per timestamp. Sampling does not need to be regular.

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    name: String,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series, checking that there are at least two samples, that
    /// times are finite and strictly increasing, and that values are finite.
    pub fn new(name: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Size(format!(
                "{} timestamps but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "need at least 2 samples, got {}",
                times.len()
            )));
        }
        if let Some(i) = times.iter().position(|t| !t.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "time at index {i} is not finite"
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "value at index {i} is not finite"
            )));
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Ordering {
                row: i + 1,
                previous: times[i],
                current: times[i + 1],
            });
        }
        Ok(Self {
            name: name.into(),
            times,
            values,
        })
    }

    /// Series with implicit timestamps `0, 1, 2, ...`.
    pub fn from_values(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let times = (0..values.len()).map(|i| i as f64).collect();
        Self::new(name, times, values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Samples in `range`, as a new series with the same name.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.end > self.len() {
            return Err(Error::Bounds {
                requested: range.end,
                available: self.len(),
            });
        }
        Self::new(
            self.name.clone(),
            self.times[range.clone()].to_vec(),
            self.values[range].to_vec(),
        )
    }

    /// First `train_count` samples, then the following `test_count`.
    pub fn split(&self, split: SplitSpec) -> Result<(TimeSeries, TimeSeries)> {
        let total = split.train_count + split.test_count;
        if total > self.len() {
            return Err(Error::Bounds {
                requested: total,
                available: self.len(),
            });
        }
        let train = self.slice(0..split.train_count)?;
        let test = self.slice(split.train_count..total)?;
        Ok((train, test))
    }

    pub fn load_csv(path: impl AsRef<Path>, has_time_column: bool) -> Result<Self> {
        Self::load_with(path.as_ref(), Some(has_time_column))
    }

    /// Like [`load_csv`](Self::load_csv), with the layout taken from the
    /// first data row: two columns are `time,value`, one is `value`.
    pub fn load_csv_detect(path: impl AsRef<Path>) -> Result<Self> {
        Self::load_with(path.as_ref(), None)
    }

    fn load_with(path: &Path, has_time_column: Option<bool>) -> Result<Self> {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse_csv(file, has_time_column).map(|s| s.with_name(name))
    }

    /// Parses `time,value` (or `value` only) rows. A single header row is
    /// tolerated when its first cell is not numeric.
    pub fn read_csv<R: Read>(reader: R, has_time_column: bool) -> Result<Self> {
        Self::parse_csv(reader, Some(has_time_column))
    }

    pub fn read_csv_detect<R: Read>(reader: R) -> Result<Self> {
        Self::parse_csv(reader, None)
    }

    fn parse_csv<R: Read>(reader: R, mut has_time_column: Option<bool>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (index, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Parse {
                row: e
                    .position()
                    .map_or(index, |p| p.line().saturating_sub(1) as usize),
                message: e.to_string(),
            })?;
            let row = record
                .position()
                .map_or(index, |p| p.line().saturating_sub(1) as usize);
            if index == 0 && record.iter().any(|cell| cell.parse::<f64>().is_err()) {
                continue;
            }
            let has_time_column = *has_time_column.get_or_insert(record.len() == 2);
            let expected = if has_time_column { 2 } else { 1 };
            if record.len() != expected {
                return Err(Error::Parse {
                    row,
                    message: format!("expected {expected} column(s), found {}", record.len()),
                });
            }
            let mut cells = record.iter().map(|cell| {
                cell.parse::<f64>().map_err(|_| Error::Parse {
                    row,
                    message: format!("not a number: {cell:?}"),
                })
            });
            if has_time_column {
                let t = cells.next().unwrap()?;
                let v = cells.next().unwrap()?;
                if let Some(&prev) = times.last() {
                    if t <= prev {
                        return Err(Error::Ordering {
                            row,
                            previous: prev,
                            current: t,
                        });
                    }
                }
                times.push(t);
                values.push(v);
            } else {
                values.push(cells.next().unwrap()?);
                times.push(times.len() as f64);
            }
        }
        Self::new("", times, values)
    }

    /// Writes `time,value` with shortest round-trip float formatting.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("time,value\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            let _ = writeln!(out, "{t},{v}");
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_count: usize,
    pub test_count: usize,
}

impl SplitSpec {
    pub fn new(train_count: usize, test_count: usize) -> Result<Self> {
        if train_count == 0 || test_count == 0 {
            return Err(Error::Config(format!(
                "split counts must be positive (train {train_count}, test {test_count})"
            )));
        }
        Ok(Self {
            train_count,
            test_count,
        })
    }
}
