// SPDX-License-Identifier: MIT OR Apache-2.0

//! `ndecomp`: generate series, train and inspect neural decomposition
//! models, and score forecasts.
//!
//! Exit status is 0 on success, 1 for usage errors, 2 for data errors and
//! 3 when training diverges.

mod settings;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use ndecomp::datasets::{gen_mackey_glass, gen_toy, MackeyGlassParams};
use ndecomp::evaluate::{
    published_table, reports_to_csv, reports_to_table, run_benchmark, Baseline, EvalReport,
    ReferenceDataset,
};
use ndecomp::fourier::dft_real;
use ndecomp::{NdModel, PreprocessParams, SplitSpec, TimeSeries, TrainConfig};

use settings::TrainArgs;

#[derive(Parser, Debug)]
#[command(
    name = "ndecomp",
    version,
    about = "Neural decomposition for time-series forecasting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic series as CSV.
    Generate {
        #[command(subcommand)]
        dataset: GenerateCommand,
    },
    /// Fit a model to a CSV series and save it.
    Train(TrainCmd),
    /// Forecast at a grid of times or at the times listed in a CSV.
    Predict(PredictCmd),
    /// Per-unit contributions of a saved model over a time grid, in the
    /// model's normalized value units; `prediction` is their sum.
    Decompose(DecomposeCmd),
    /// Score a saved model against a CSV of held-out values.
    Evaluate(EvaluateCmd),
    /// Train on the head of a series, forecast the tail, compare baselines.
    Benchmark(BenchmarkCmd),
    /// Amplitude spectrum of a series after preprocessing.
    Spectrum(SpectrumCmd),
}

#[derive(Subcommand, Debug)]
enum GenerateCommand {
    /// sin(4.25πt) + sin(8.5πt) + 5t, training on [0, 1) and testing on [1, 3).
    Toy {
        #[arg(long, default_value_t = 128)]
        train: usize,
        #[arg(long, default_value_t = 256)]
        test: usize,
        /// Directory receiving toy_train.csv and toy_test.csv.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Mackey-Glass delay differential equation, integrated with RK4.
    MackeyGlass {
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[command(flatten)]
        params: MackeyGlassArgs,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct MackeyGlassArgs {
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 10.0)]
    exponent: f64,
    #[arg(long, default_value_t = 17.0)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    #[arg(long, default_value_t = 1.2)]
    history: f64,
    /// Integration steps discarded before the first sample.
    #[arg(long, default_value_t = 1000)]
    burn_in: usize,
    /// Integration steps between emitted samples.
    #[arg(long, default_value_t = 1)]
    stride: usize,
}

impl MackeyGlassArgs {
    fn params(&self) -> MackeyGlassParams {
        MackeyGlassParams {
            beta: self.beta,
            gamma: self.gamma,
            exponent: self.exponent,
            tau: self.tau,
            dt: self.dt,
            history_value: self.history,
            burn_in: self.burn_in,
            sample_stride: self.stride,
        }
    }
}

fn load_series(path: &Path) -> Result<TimeSeries, Failure> {
    Ok(TimeSeries::load_csv_detect(path)?)
}

#[derive(Args, Debug)]
struct TrainCmd {
    /// CSV series: `time,value` rows, or a single value column.
    input: PathBuf,
    /// Where to save the trained model.
    #[arg(long, short)]
    out: PathBuf,
    #[command(flatten)]
    train: TrainArgs,
    /// Write the per-epoch training RMSE as CSV.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Sinusoid units whose frequency and amplitude go into the trace.
    #[arg(long, value_delimiter = ',', value_name = "K")]
    track: Vec<usize>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("when").required(true).args(["from", "times"])))]
struct PredictCmd {
    model: PathBuf,
    /// Start of an evenly spaced grid.
    #[arg(long, requires_all = ["to", "count"])]
    from: Option<f64>,
    /// End of the grid (exclusive).
    #[arg(long, requires = "from")]
    to: Option<f64>,
    #[arg(long, requires = "from")]
    count: Option<usize>,
    /// CSV whose first column lists the times to forecast.
    #[arg(long, value_name = "FILE")]
    times: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DecomposeCmd {
    model: PathBuf,
    /// Grid start [default: first training time]
    #[arg(long)]
    from: Option<f64>,
    /// Grid end, exclusive [default: end of the training window]
    #[arg(long)]
    to: Option<f64>,
    #[arg(long, default_value_t = 256)]
    count: usize,
    /// Fold units whose output weight is below this magnitude into an
    /// `other` column.
    #[arg(long, default_value_t = 0.0, value_name = "W")]
    min_weight: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvaluateCmd {
    model: PathBuf,
    /// Held-out CSV series.
    test: PathBuf,
    /// Emit CSV instead of a table.
    #[arg(long)]
    csv: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Builtin {
    Toy,
    MackeyGlass,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "builtin"])))]
struct BenchmarkCmd {
    /// CSV series holding the training samples followed by the test samples.
    input: Option<PathBuf>,
    /// Use a generated series instead of a file.
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    /// Apply a known dataset's split and log filter, and append
    /// its published results.
    #[arg(long, value_name = "NAME", value_parser = parse_reference)]
    reference: Option<ReferenceDataset>,
    /// Training samples taken from the head of the series.
    #[arg(long = "train")]
    train_count: Option<usize>,
    /// Test samples following the training window.
    #[arg(long = "test")]
    test_count: Option<usize>,
    /// Comparison models to score.
    #[arg(long, value_delimiter = ',', value_parser = parse_baseline,
          default_value = "idft,persistence,nd_no_aug")]
    baselines: Vec<Baseline>,
    #[command(flatten)]
    train: TrainArgs,
    /// Emit CSV instead of a table.
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write `time,actual,prediction` for the test window.
    #[arg(long, value_name = "FILE")]
    predictions: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SpectrumCmd {
    input: PathBuf,
    #[arg(long)]
    log_filter: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_reference(s: &str) -> Result<ReferenceDataset, String> {
    s.parse().map_err(|e: ndecomp::Error| e.to_string())
}

fn parse_baseline(s: &str) -> Result<Baseline, String> {
    s.parse().map_err(|e: ndecomp::Error| e.to_string())
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(ndecomp::Error),
}

impl From<ndecomp::Error> for Failure {
    fn from(e: ndecomp::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Core(ndecomp::Error::Config(_)) => 1,
            Failure::Core(ndecomp::Error::Diverged { .. }) => 3,
            Failure::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(msg) => f.write_str(msg),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate { dataset } => generate(dataset),
        Command::Train(cmd) => train(cmd),
        Command::Predict(cmd) => predict(cmd),
        Command::Decompose(cmd) => decompose(cmd),
        Command::Evaluate(cmd) => evaluate(cmd),
        Command::Benchmark(cmd) => benchmark(cmd),
        Command::Spectrum(cmd) => spectrum(cmd),
    }
}

/// Writes to `path`, or to standard output when there is none.
fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(path) => fs::write(path, text).map_err(|e| {
            Failure::Core(ndecomp::Error::Io {
                path: path.to_owned(),
                source: e,
            })
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::Usage(format!("cannot write to standard output: {e}")))
        }
    }
}

fn generate(dataset: GenerateCommand) -> Result<(), Failure> {
    match dataset {
        GenerateCommand::Toy {
            train,
            test,
            out_dir,
        } => {
            let (train, test) = gen_toy(train, test)?;
            for series in [&train, &test] {
                let path = out_dir.join(format!("{}.csv", series.name()));
                series.write_csv(&path)?;
                eprintln!("wrote {} ({} samples)", path.display(), series.len());
            }
            Ok(())
        }
        GenerateCommand::MackeyGlass { n, params, out } => {
            let series = gen_mackey_glass(n, &params.params())?;
            emit(out.as_deref(), &series.to_csv_string())
        }
    }
}

fn train(cmd: TrainCmd) -> Result<(), Failure> {
    let series = load_series(&cmd.input)?;
    let mut config = cmd.train.resolve(TrainConfig::default())?;
    config.track = cmd.track;
    let (model, trace) = ndecomp::train::fit_nd(&series, &config)?;
    model.save(&cmd.out)?;
    if let Some(path) = &cmd.trace {
        emit(Some(path), &trace.to_csv_string())?;
    }
    let active = model.amplitudes().iter().filter(|a| a.abs() > 1e-2).count();
    eprintln!(
        "trained {} epochs on {} samples; final training rmse {:.6} (normalized); \
         {active} of {} sinusoid amplitudes above 1e-2",
        trace.epochs(),
        series.len(),
        trace.rmse.last().copied().unwrap_or(f64::NAN),
        model.n_sinusoids(),
    );
    Ok(())
}

/// `count` evenly spaced points on `[from, to)`.
fn grid(from: f64, to: f64, count: usize) -> Result<Vec<f64>, Failure> {
    if !(from.is_finite() && to.is_finite()) || to < from {
        return Err(Failure::Usage(format!("invalid time range [{from}, {to})")));
    }
    if to == from {
        return Ok(Vec::new());
    }
    let step = (to - from) / count as f64;
    Ok((0..count).map(|i| from + i as f64 * step).collect())
}

/// First column of every numeric row; a non-numeric first row is a header.
fn read_times(path: &Path) -> Result<Vec<f64>, Failure> {
    let io_err = |source| {
        Failure::Core(ndecomp::Error::Io {
            path: path.to_owned(),
            source,
        })
    };
    let file = fs::File::open(path).map_err(io_err)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut times = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            Failure::Core(ndecomp::Error::Parse {
                row,
                message: e.to_string(),
            })
        })?;
        let Some(cell) = record.get(0).filter(|c| !c.is_empty()) else {
            continue;
        };
        match cell.parse::<f64>() {
            Ok(t) if t.is_finite() => times.push(t),
            _ if row == 0 => {}
            _ => {
                return Err(Failure::Core(ndecomp::Error::Parse {
                    row,
                    message: format!("time {cell:?} is not a finite number"),
                }))
            }
        }
    }
    Ok(times)
}

fn predict(cmd: PredictCmd) -> Result<(), Failure> {
    let model = NdModel::load(&cmd.model)?;
    let times = match (&cmd.times, cmd.from) {
        (Some(path), _) => read_times(path)?,
        (None, Some(from)) => grid(from, cmd.to.unwrap_or(from), cmd.count.unwrap_or(0))?,
        (None, None) => unreachable!("clap requires --from or --times"),
    };
    let mut out = String::from("time,prediction\n");
    for (t, p) in times.iter().zip(model.predict(&times)) {
        let _ = writeln!(out, "{t},{p}");
    }
    emit(cmd.out.as_deref(), &out)
}

fn decompose(cmd: DecomposeCmd) -> Result<(), Failure> {
    let model = NdModel::load(&cmd.model)?;
    let pre = *model.preprocess();
    let from = cmd.from.unwrap_or(pre.denormalize_time(0.0));
    let to = cmd.to.unwrap_or(pre.denormalize_time(1.0));
    let times = grid(from, to, cmd.count)?;

    let labels = model.component_labels();
    let n_units = model.n_hidden();
    let keep: Vec<bool> = model
        .output_weights()
        .iter()
        .map(|w| w.abs() >= cmd.min_weight)
        .collect();
    let folded = keep.iter().any(|k| !k);

    let mut out = String::from("time");
    for (label, _) in labels.iter().zip(&keep).filter(|(_, k)| **k) {
        let _ = write!(out, ",{label}");
    }
    if folded {
        out.push_str(",other");
    }
    out.push_str(",bias,prediction\n");

    for &t in &times {
        let tn = pre.normalize_time(t);
        let values = model.component_values(tn);
        let _ = write!(out, "{t}");
        let mut other = 0.0;
        for (v, k) in values[..n_units].iter().zip(&keep) {
            if *k {
                let _ = write!(out, ",{v}");
            } else {
                other += v;
            }
        }
        if folded {
            let _ = write!(out, ",{other}");
        }
        let _ = writeln!(out, ",{},{}", values[n_units], model.forward(tn));
    }
    emit(cmd.out.as_deref(), &out)
}

fn evaluate(cmd: EvaluateCmd) -> Result<(), Failure> {
    let model = NdModel::load(&cmd.model)?;
    let test = load_series(&cmd.test)?;
    let report = EvalReport::score(
        ndecomp::evaluate::ND_LABEL,
        test.values(),
        &model.predict(test.times()),
    )?;
    let reports = [report];
    let text = if cmd.csv {
        reports_to_csv(&reports)
    } else {
        reports_to_table(&reports)
    };
    emit(None, &text)
}

fn toy_series() -> Result<TimeSeries, Failure> {
    let (train, test) = gen_toy(128, 256)?;
    let times = [train.times(), test.times()].concat();
    let values = [train.values(), test.values()].concat();
    Ok(TimeSeries::new("toy", times, values)?)
}

fn benchmark(cmd: BenchmarkCmd) -> Result<(), Failure> {
    let reference = cmd.reference;
    let (series, default_split) = match (&cmd.input, cmd.builtin) {
        (Some(path), _) => (load_series(path)?, reference.map(|r| r.split())),
        (None, Some(Builtin::Toy)) => (toy_series()?, Some(SplitSpec::new(128, 256)?)),
        (None, Some(Builtin::MackeyGlass)) => (
            gen_mackey_glass(1024, &MackeyGlassParams::default())?,
            Some(SplitSpec::new(512, 512)?),
        ),
        (None, None) => unreachable!("clap requires an input or --builtin"),
    };
    let split = match (cmd.train_count, cmd.test_count, default_split) {
        (Some(train), Some(test), _) => SplitSpec::new(train, test)?,
        (Some(train), None, _) => SplitSpec::new(train, series.len().saturating_sub(train))?,
        (None, Some(test), _) => SplitSpec::new(series.len().saturating_sub(test), test)?,
        (None, None, Some(split)) => split,
        (None, None, None) => {
            return Err(Failure::Usage(
                "give --train and/or --test, or --reference, to define the split".into(),
            ))
        }
    };

    let base = TrainConfig {
        log_filter: reference.is_some_and(|r| r.log_filter()),
        ..TrainConfig::default()
    };
    let config = cmd.train.resolve(base)?;
    let result = run_benchmark(&series, split, &config, &cmd.baselines)?;

    let text = if cmd.csv {
        reports_to_csv(&result.reports)
    } else {
        let mut text = reports_to_table(&result.reports);
        if let Some(reference) = reference {
            text.push('\n');
            text.push_str(&published_table(reference));
        }
        text
    };
    emit(cmd.out.as_deref(), &text)?;

    if let Some(path) = &cmd.predictions {
        let (_, test) = series.split(split)?;
        let mut out = String::from("time,actual,prediction\n");
        for ((t, a), p) in test
            .times()
            .iter()
            .zip(test.values())
            .zip(&result.predictions)
        {
            let _ = writeln!(out, "{t},{a},{p}");
        }
        emit(Some(path), &out)?;
    }
    Ok(())
}

fn spectrum(cmd: SpectrumCmd) -> Result<(), Failure> {
    let series = load_series(&cmd.input)?;
    let pre = PreprocessParams::fit(&series, cmd.log_filter)?;
    let spectrum = dft_real(&pre.normalize_values(series.values())?)?;
    emit(cmd.out.as_deref(), &spectrum.to_csv_string())
}
