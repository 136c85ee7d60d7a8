//! Experiment spec files, batch execution and the `lineobs` command line.
//!
//! A spec file is flat `key = value` text; `#` starts a comment. List values
//! are comma separated. See `docs/formats.md` for every key.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sim::io::{read_summary_jsonl, write_run_csv, write_summary_jsonl};
use crate::sim::run::{run_scenario, summarize, ObserverSpec, RunSummary};
use crate::sim::scenario::{ScenarioConfig, Trajectory, DEFAULT_MIN_DEPTH};
use crate::stability::{certificate, OperatingEnvelope, StabilityCertificate};

/// Exit status for malformed arguments or spec files.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for failures while running.
pub const EXIT_RUNTIME: i32 = 3;

/// A batch of runs: every combination of noise level, trajectory and seed,
/// each run feeding all observers the same measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub seed: u64,
    pub runs: usize,
    pub duration: f64,
    pub dt: f64,
    pub cube_side: f64,
    pub min_depth: f64,
    pub noise_std: Vec<f64>,
    pub trajectories: Vec<Trajectory>,
    pub velocity_cap: f64,
    pub solver_tol: f64,
    /// Bound on `‖χ‖` used when checking `μ` against the certificate.
    pub max_chi: f64,
    pub observers: Vec<ObserverSpec>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        let s = ScenarioConfig::default();
        Self {
            name: "experiment".into(),
            seed: 0,
            runs: 1,
            duration: s.duration,
            dt: s.dt,
            cube_side: s.cube_side,
            min_depth: DEFAULT_MIN_DEPTH,
            noise_std: vec![0.0],
            trajectories: vec![Trajectory::Excitation],
            velocity_cap: s.velocity_cap,
            solver_tol: s.solver_tol,
            max_chi: 0.2,
            observers: Vec::new(),
        }
    }
}

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key} = '{value}': {why}"))
}

/// Parses a number, also accepting a fraction such as `1/30`.
pub fn parse_number(text: &str) -> std::result::Result<f64, String> {
    let text = text.trim();
    let value = match text.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
            a / b
        }
        None => text.parse().map_err(|e| format!("{e}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("'{text}' is not a finite number"))
    }
}

fn list<T>(key: &str, value: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| item(s).map_err(|e| bad(key, s, e))).collect()
}

fn number(key: &str, value: &str) -> Result<f64> {
    parse_number(value).map_err(|e| bad(key, value, e))
}

fn integer<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e| bad(key, value, e))
}

fn horizon(key: &str, s: &str) -> Result<(usize, f64)> {
    let (n, mu) = s.split_once(':').ok_or_else(|| bad(key, s, "expected N:mu"))?;
    Ok((integer(key, n)?, number(key, mu)?))
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = ExperimentSpec::default();
        let mut seen = Vec::new();
        let mut observers: [Vec<ObserverSpec>; 4] = Default::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            if seen.contains(&key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key '{key}'", i + 1)));
            }
            seen.push(key.to_string());
            match key {
                "name" => spec.name = value.to_string(),
                "seed" => spec.seed = integer(key, value)?,
                "runs" => spec.runs = integer(key, value)?,
                "duration" => spec.duration = number(key, value)?,
                "dt" => spec.dt = number(key, value)?,
                "cube_side" => spec.cube_side = number(key, value)?,
                "min_depth" => spec.min_depth = number(key, value)?,
                "noise_std" => spec.noise_std = list(key, value, |s| number(key, s))?,
                "trajectory" => spec.trajectories = list(key, value, Trajectory::from_str)?,
                "velocity_cap" => spec.velocity_cap = number(key, value)?,
                "solver_tol" => spec.solver_tol = number(key, value)?,
                "max_chi" => spec.max_chi = number(key, value)?,
                "mlo_mp" => observers[0] = list(key, value, |s| Ok(ObserverSpec::MloMp { alpha: number(key, s)? }))?,
                "mlo_sphere" => {
                    observers[1] = list(key, value, |s| Ok(ObserverSpec::MloSphere { alpha: number(key, s)? }))?
                }
                "mho_mp" => {
                    observers[2] = list(key, value, |s| {
                        let (window, mu) = horizon(key, s)?;
                        Ok(ObserverSpec::MhoMp { window, mu })
                    })?
                }
                "mho_sphere" => {
                    observers[3] = list(key, value, |s| {
                        let (window, mu) = horizon(key, s)?;
                        Ok(ObserverSpec::MhoSphere { window, mu })
                    })?
                }
                _ => return Err(Error::Config(format!("line {}: unknown key '{key}'", i + 1))),
            }
        }
        spec.observers = observers.concat();
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.noise_std.is_empty() || self.trajectories.is_empty() {
            return Err(Error::Config("noise_std and trajectory need at least one value".into()));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Config(format!("name '{}' is not usable as a file name", self.name)));
        }
        for s in self.scenarios(0) {
            s.validate()?;
        }
        for o in &self.observers {
            o.validate()?;
        }
        Ok(())
    }

    /// Scenario of every run, in output order: trajectory, noise level, seed.
    pub fn scenarios(&self, seed_offset: u64) -> Vec<ScenarioConfig> {
        let mut out = Vec::with_capacity(self.trajectories.len() * self.noise_std.len() * self.runs);
        for &trajectory in &self.trajectories {
            for &noise_std in &self.noise_std {
                for i in 0..self.runs as u64 {
                    out.push(ScenarioConfig {
                        seed: self.seed + seed_offset + i,
                        duration: self.duration,
                        dt: self.dt,
                        cube_side: self.cube_side,
                        noise_std,
                        trajectory,
                        velocity_cap: self.velocity_cap,
                        min_depth: self.min_depth,
                        solver_tol: self.solver_tol,
                    });
                }
            }
        }
        out
    }

    /// One message per Moment-Point horizon observer whose `μ` exceeds the
    /// certified bound for its window.
    pub fn mu_warnings(&self) -> Vec<String> {
        self.observers
            .iter()
            .filter_map(|o| match *o {
                ObserverSpec::MhoMp { window, mu } => {
                    let env = OperatingEnvelope::new(self.velocity_cap, self.velocity_cap, self.max_chi, self.dt, window)
                        .ok()?;
                    let c = certificate(&env).ok()?;
                    (mu > c.mu_max).then(|| {
                        format!("warning: {o} uses mu = {mu} above the certified bound {:.6} for N = {window}", c.mu_max)
                    })
                }
                _ => None,
            })
            .collect()
    }
}

fn csv_name(spec: &ExperimentSpec, s: &ScenarioConfig) -> String {
    format!("{}_{}_noise{}_seed{}.csv", spec.name, s.trajectory, s.noise_std, s.seed)
}

/// Runs the batch on `workers` threads and returns the summaries in
/// scenario order. With `out`, writes one CSV per run under `out/runs/`
/// and the summary to `out/<name>_summary.jsonl`.
pub fn run_batch(spec: &ExperimentSpec, seed_offset: u64, workers: usize, out: Option<&Path>) -> Result<Vec<RunSummary>> {
    spec.validate()?;
    let scenarios = spec.scenarios(seed_offset);
    let run_dir = out.map(|d| d.join("runs"));
    if let Some(dir) = &run_dir {
        fs::create_dir_all(dir)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let per_run: Vec<Vec<RunSummary>> = pool.install(|| {
        scenarios
            .par_iter()
            .map(|s| {
                let record = run_scenario(s, &spec.observers)?;
                if let Some(dir) = &run_dir {
                    let file = File::create(dir.join(csv_name(spec, s)))?;
                    write_run_csv(&record, BufWriter::new(file))?;
                }
                Ok(summarize(&record))
            })
            .collect::<Result<_>>()
    })?;
    let summaries: Vec<RunSummary> = per_run.into_iter().flatten().collect();
    if let Some(dir) = out {
        let file = File::create(dir.join(format!("{}_summary.jsonl", spec.name)))?;
        let mut w = BufWriter::new(file);
        write_summary_jsonl(&summaries, &mut w)?;
        w.flush()?;
    }
    Ok(summaries)
}

/// Certificates for every window size in `windows`.
pub fn certificate_table(
    max_nu: f64,
    max_omega: f64,
    max_chi: f64,
    dt: f64,
    windows: std::ops::RangeInclusive<usize>,
) -> Result<Vec<StabilityCertificate>> {
    if windows.is_empty() {
        return Err(Error::Config("empty window range".into()));
    }
    windows.map(|n| certificate(&OperatingEnvelope::new(max_nu, max_omega, max_chi, dt, n)?)).collect()
}

pub fn write_certificate_csv<W: Write>(rows: &[StabilityCertificate], mut out: W) -> Result<()> {
    writeln!(out, "N,delta,mu_max")?;
    for c in rows {
        writeln!(out, "{},{},{}", c.window, c.delta, c.mu_max)?;
    }
    Ok(())
}

/// Parses `a..b`, `a..=b`, `a-b` (all inclusive) or a single `n`.
pub fn parse_window_range(text: &str) -> std::result::Result<std::ops::RangeInclusive<usize>, String> {
    let text = text.trim();
    let parts = text.split_once("..=").or_else(|| text.split_once("..")).or_else(|| text.split_once('-'));
    let (a, b) = parts.unwrap_or((text, text));
    let a: usize = a.trim().parse().map_err(|e| format!("'{text}': {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("'{text}': {e}"))?;
    if a < 1 || b < a {
        return Err(format!("'{text}' is not a range of window sizes >= 1"));
    }
    Ok(a..=b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    ConvergenceTime,
    DirectionError,
    DepthError,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convergence_time" => Ok(Metric::ConvergenceTime),
            "direction_error" => Ok(Metric::DirectionError),
            "depth_error" => Ok(Metric::DepthError),
            _ => Err(Error::Config(format!(
                "unknown metric '{s}' (expected convergence_time, direction_error or depth_error)"
            ))),
        }
    }
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::ConvergenceTime => "convergence_time",
            Metric::DirectionError => "direction_error",
            Metric::DepthError => "depth_error",
        }
    }

    /// The metric value of one summary; runs that never converged are `+∞`.
    pub fn value(&self, s: &RunSummary) -> f64 {
        let v = match self {
            Metric::ConvergenceTime => s.convergence_time_s.unwrap_or(f64::INFINITY),
            Metric::DirectionError => s.eps_d_rad,
            Metric::DepthError => s.eps_l_m,
        };
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub observer: String,
    pub parameter: String,
    pub trajectory: String,
    pub noise_std: f64,
    pub metric: Metric,
    pub runs: usize,
    pub finite: usize,
    /// Median over all runs, failed runs counting as `+∞`.
    pub median: f64,
    /// Mean over the finite values only.
    pub mean: f64,
}

/// Median with NaN treated as `+∞`.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v: Vec<f64> = values.iter().map(|x| if x.is_nan() { f64::INFINITY } else { *x }).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Groups summaries by observer, parameter, trajectory and noise level, in
/// order of first appearance.
pub fn plotdata(summaries: &[RunSummary], metric: Metric) -> Vec<PlotRow> {
    let mut groups: Vec<((String, String, String, u64), Vec<f64>)> = Vec::new();
    for s in summaries {
        let key = (s.observer.clone(), s.parameter.clone(), s.trajectory.clone(), s.noise_std.to_bits());
        let v = metric.value(s);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, vals)) => vals.push(v),
            None => groups.push((key, vec![v])),
        }
    }
    groups
        .into_iter()
        .map(|((observer, parameter, trajectory, noise), vals)| {
            let finite: Vec<f64> = vals.iter().copied().filter(|v| v.is_finite()).collect();
            PlotRow {
                observer,
                parameter,
                trajectory,
                noise_std: f64::from_bits(noise),
                metric,
                runs: vals.len(),
                finite: finite.len(),
                median: median(&vals),
                mean: if finite.is_empty() { f64::NAN } else { finite.iter().sum::<f64>() / finite.len() as f64 },
            }
        })
        .collect()
}

pub fn write_plotdata_csv<W: Write>(rows: &[PlotRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["observer", "parameter", "trajectory", "noise_std", "metric", "runs", "finite", "median", "mean"])
        .map_err(io)?;
    for r in rows {
        w.write_record([
            r.observer.clone(),
            r.parameter.clone(),
            r.trajectory.clone(),
            r.noise_std.to_string(),
            r.metric.as_str().to_string(),
            r.runs.to_string(),
            r.finite.to_string(),
            r.median.to_string(),
            r.mean.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Parser)]
#[command(name = "lineobs", version, about = "Line structure-from-motion observers: batch simulation and stability tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the batch described by a spec file.
    Run {
        #[arg(long)]
        spec: PathBuf,
        /// Output directory for per-run CSVs and the summary.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads (default: available processors).
        #[arg(long)]
        workers: Option<usize>,
        /// Added to every seed of the spec.
        #[arg(long, default_value_t = 0)]
        seed_offset: u64,
    },
    /// Print the δ / μ bound table as CSV.
    Certificate {
        #[arg(long, default_value = "0.5", value_parser = parse_number)]
        max_nu: f64,
        #[arg(long, default_value = "0.5", value_parser = parse_number)]
        max_omega: f64,
        #[arg(long, default_value = "0.2", value_parser = parse_number)]
        max_chi: f64,
        #[arg(long, default_value = "1/30", value_parser = parse_number)]
        dt: f64,
        /// Window sizes, e.g. `2..7`.
        #[arg(long, default_value = "2..7", value_parser = parse_window_range)]
        n_range: std::ops::RangeInclusive<usize>,
    },
    /// Aggregate a summary file into medians and means as CSV.
    Plotdata {
        #[arg(long)]
        summary: PathBuf,
        /// convergence_time, direction_error or depth_error.
        #[arg(long, default_value = "convergence_time")]
        metric: String,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Format(_) => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

fn dispatch<O: Write, E: Write>(command: Command, stdout: &mut O, stderr: &mut E) -> Result<()> {
    match command {
        Command::Run { spec, out, workers, seed_offset } => {
            let spec = ExperimentSpec::from_file(&spec)?;
            for w in spec.mu_warnings() {
                writeln!(stderr, "{w}")?;
            }
            let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let summaries = run_batch(&spec, seed_offset, workers, Some(&out))?;
            writeln!(stderr, "{} summaries written to {}", summaries.len(), out.display())?;
            Ok(())
        }
        Command::Certificate { max_nu, max_omega, max_chi, dt, n_range } => {
            let rows = certificate_table(max_nu, max_omega, max_chi, dt, n_range)?;
            write_certificate_csv(&rows, stdout)
        }
        Command::Plotdata { summary, metric } => {
            let metric: Metric = metric.parse()?;
            let file = File::open(&summary).map_err(|e| Error::Config(format!("{}: {e}", summary.display())))?;
            let rows = plotdata(&read_summary_jsonl(BufReader::new(file))?, metric);
            write_plotdata_csv(&rows, stdout)
        }
    }
}

/// Runs the command line with explicit output streams and returns the exit status.
pub fn run_cli<I, T, O, E>(args: I, stdout: &mut O, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point used by the `lineobs` binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_cli(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
