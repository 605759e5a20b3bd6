//! `grw`: scenario runner, verification suites and parameter sweeps over `grw-core`.
//!
//! Exit codes: 0 when the verdict is pass (vacuous checks allowed), 2 on a failing
//! verdict, 1 on configuration or input errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use grw_core::conditionlab::{classify_sets, fit_all, quasi_einstein, ConditionId, FitContext};
use rayon::prelude::*;
use thiserror::Error;

mod cli;
pub mod config;
pub mod report;
pub mod suites;
pub mod sweep;

use cli::{Cli, Command};
use config::{Format, PointSpec, ScenarioConfig};
use report::{FitDto, NamedNums, PointReport, Report, Verdict};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("unknown suite `{0}` (known: all, {1})")]
    UnknownSuite(String, String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// What a command produced: a report, or raw CSV for sweeps.
pub enum Output {
    Report(Report),
    Sweep(sweep::SweepTable),
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match <Cli as clap::Parser>::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("grw: {e}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = cli.jobs.filter(|&j| j > 0) {
            b = b.num_threads(j);
        }
        b.build().map_err(|e| CliError::Config(e.to_string()))?
    };
    let start = Instant::now();
    let (out, path, format) = pool.install(|| -> Result<_, CliError> {
        match &cli.command {
            Command::Classify(a) => {
                let (cfg, text) = load(&a.config)?;
                let seed = a.seed.unwrap_or(cfg.seed);
                let report = classify(&cfg, text, seed, a.tol)?;
                let path = a.out.clone().or_else(|| cfg.output.path.clone());
                let format = a.format.or(cfg.output.format);
                Ok((Output::Report(report), path, format))
            }
            Command::Verify(a) => {
                let report = verify(&a.suite, a.seed)?;
                Ok((Output::Report(report), a.out.clone(), a.format))
            }
            Command::Sweep(a) => {
                let (cfg, _) = load(&a.config)?;
                let seed = a.seed.unwrap_or(cfg.seed);
                let table = sweep::run_sweep(&cfg, seed, a.tol)?;
                let path = a.out.clone().or_else(|| cfg.output.path.clone());
                Ok((Output::Sweep(table), path, a.format.or(Some(Format::Csv))))
            }
        }
    })?;
    let elapsed = start.elapsed().as_secs_f64();

    match &out {
        Output::Report(r) => {
            print!("{}", r.to_table());
            println!("wall clock: {elapsed:.2} s");
        }
        Output::Sweep(t) => {
            // stdout may carry the CSV itself
            eprintln!("{} rows, verdict: {}", t.rows.len(), t.verdict().as_str());
            eprintln!("wall clock: {elapsed:.2} s");
        }
    }
    if let Some(path) = path {
        let format = format.unwrap_or_else(|| guess_format(&path));
        write_file(&path, &render(&out, format)?)?;
    } else if let Output::Sweep(t) = &out {
        print!("{}", t.to_csv()?);
    }
    Ok(match &out {
        Output::Report(r) => r.verdict.exit_code(),
        Output::Sweep(t) => t.verdict().exit_code(),
    })
}

fn guess_format(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Format::Csv,
        Some("txt") => Format::Table,
        _ => Format::Json,
    }
}

fn render(out: &Output, format: Format) -> Result<String, CliError> {
    let compute = |e: &dyn std::fmt::Display| CliError::Compute(e.to_string());
    match (out, format) {
        (Output::Report(r), Format::Json) => r.to_json().map_err(|e| compute(&e)),
        (Output::Report(r), Format::Csv) => r.to_csv().map_err(|e| compute(&e)),
        (Output::Report(r), Format::Table) => Ok(r.to_table()),
        (Output::Sweep(t), Format::Csv) => t.to_csv(),
        (Output::Sweep(t), Format::Json) => t.to_json(),
        (Output::Sweep(t), Format::Table) => Ok(t.to_table()),
    }
}

fn load(path: &Path) -> Result<(ScenarioConfig, String), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok((ScenarioConfig::parse(&text)?, text))
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Evaluates one point: set membership, quasi-Einstein test and the condition battery.
pub fn evaluate_point(
    index: usize,
    p: &PointSpec,
    ids: &[ConditionId],
    ctx: &FitContext,
) -> Result<PointReport, CliError> {
    let compute = |e: grw_core::conditionlab::ConditionError| CliError::Compute(format!("{}: {e}", p.label));
    let sets = classify_sets(&p.snapshot, ctx.tol).map_err(compute)?;
    let quasi = quasi_einstein(&p.snapshot, ctx.tol).map_err(compute)?;
    let fits: Vec<FitDto> = fit_all(&p.snapshot, ids, ctx).map_err(compute)?.iter().map(FitDto::from).collect();
    let verdict = Verdict::combine(fits.iter().map(FitDto::verdict));
    Ok(PointReport {
        index,
        label: p.label.clone(),
        dim: p.snapshot.dim(),
        scalars: NamedNums(p.scalars.clone()),
        sets: (&sets).into(),
        quasi: (&quasi).into(),
        fits,
        verdict,
    })
}

/// `grw classify`: runs the configured battery at every point.
pub fn classify(cfg: &ScenarioConfig, text: String, seed: u64, tol: Option<f64>) -> Result<Report, CliError> {
    let ids = cfg.condition_ids()?;
    let ctx = cfg.fit_context(tol)?;
    let points = cfg.points(seed)?;
    let mut report = Report::new("classify", seed, text);
    report.points = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| evaluate_point(i, p, &ids, &ctx))
        .collect::<Result<_, _>>()?;
    Ok(report.finish())
}

/// `grw verify`: runs one named suite, or all of them.
pub fn verify(suite: &str, seed: u64) -> Result<Report, CliError> {
    let mut report = Report::new("verify", seed, format!("suite={suite}"));
    report.suites = suites::run(suite, seed)?;
    Ok(report.finish())
}
