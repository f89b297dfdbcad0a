//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::error::ErrorKind;
use clap::Parser;

use crate::algorithm::parse_algorithm_catalog;
use crate::error::{Error, Result};
use crate::runner::{
    emit_report_csv, run_sweep_with, AlgorithmAssignment, Architecture, DEFAULT_DEVICE,
    DEFAULT_TARGET,
};
use crate::schedule::{
    generate_poisson_events, generate_ticks, load_event_dates, load_role_actions, merge_calendars,
    parse_date, Cadence, EventCalendar,
};

/// Accumulated signature bandwidth and verification cost of a TUF repository,
/// swept over a catalog of signature algorithms.
#[derive(Debug, Clone, Parser)]
#[command(name = "tuf-costsim", version)]
pub struct CliConfig {
    /// Algorithm catalog CSV
    #[arg(long, value_name = "PATH")]
    pub algorithms: PathBuf,

    /// Update events CSV (`Date[,Target]`)
    #[arg(long, value_name = "PATH")]
    pub events: Option<PathBuf>,

    /// Scripted role changes CSV (`Date,Action,Name,RoleType,Algorithm,Flag`)
    #[arg(long, value_name = "PATH")]
    pub actions: Option<PathBuf>,

    /// Architecture CSV (`Role Name,Role Type,Algorithm,Reserve`); defaults to
    /// one instance of each role
    #[arg(long, value_name = "PATH")]
    pub arch: Option<PathBuf>,

    /// First date, inclusive
    #[arg(long, value_name = "YYYY-MM-DD", value_parser = parse_date_arg)]
    pub start: NaiveDate,

    /// Last date, inclusive
    #[arg(long, value_name = "YYYY-MM-DD", value_parser = parse_date_arg)]
    pub end: NaiveDate,

    /// Timestamp cadence: weekly, daily, hourly or minute
    #[arg(long, default_value = "daily", value_parser = parse_cadence_arg)]
    pub cadence: Cadence,

    /// Generate update events as a Poisson process with this mean per day
    #[arg(long, value_name = "FLOAT")]
    pub poisson_rate: Option<f64>,

    /// Seed for --poisson-rate
    #[arg(long, value_name = "INT")]
    pub seed: Option<u64>,

    /// Target staged by events that do not name one
    #[arg(long, value_name = "NAME", default_value = DEFAULT_TARGET)]
    pub target: String,

    /// Per-role algorithm map CSV (`Role Name,Algorithm`); runs once instead
    /// of sweeping the catalog
    #[arg(long, value_name = "PATH")]
    pub assignment: Option<PathBuf>,

    /// Device (repository) name
    #[arg(long, value_name = "NAME", default_value = DEFAULT_DEVICE)]
    pub device: String,

    /// Write the report here instead of standard output
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Log matched event dates to standard error
    #[arg(long)]
    pub verbose: bool,
}

fn parse_date_arg(s: &str) -> std::result::Result<NaiveDate, String> {
    parse_date(s).map_err(|e| e.to_string())
}

fn parse_cadence_arg(s: &str) -> std::result::Result<Cadence, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl CliConfig {
    pub fn validate(&self) -> Result<()> {
        if self.events.is_some() && self.poisson_rate.is_some() {
            return Err(Error::Config(
                "--events and --poisson-rate cannot be used together".into(),
            ));
        }
        if self.seed.is_some() && self.poisson_rate.is_none() {
            return Err(Error::Config(
                "--seed only applies to --poisson-rate; pass a rate as well".into(),
            ));
        }
        if self.start > self.end {
            return Err(Error::Range {
                start: self.start,
                end: self.end,
            });
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn in_file(path: &Path, err: Error) -> Error {
    match err {
        Error::Io { .. } => err,
        other => Error::Config(format!("{}: {other}", path.display())),
    }
}

/// Runs the configured sweep and returns the report CSV.
pub fn execute(config: &CliConfig, diagnostics: &mut dyn Write) -> Result<String> {
    config.validate()?;
    let catalog = parse_algorithm_catalog(&read(&config.algorithms)?)
        .map_err(|e| in_file(&config.algorithms, e))?;

    let arch = match &config.arch {
        Some(path) => Architecture::parse_csv(config.device.clone(), &read(path)?)
            .map_err(|e| in_file(path, e))?,
        None => Architecture::single_instance(config.device.clone()),
    };

    let mut calendar = match (&config.events, config.poisson_rate) {
        (Some(path), _) => {
            load_event_dates(&read(path)?, &config.target).map_err(|e| in_file(path, e))?
        }
        (None, Some(rate)) => generate_poisson_events(
            rate,
            config.start,
            config.end,
            config.seed.unwrap_or(0),
            &config.target,
        )?,
        (None, None) => EventCalendar::new(),
    };
    if let Some(path) = &config.actions {
        let actions = load_role_actions(&read(path)?).map_err(|e| in_file(path, e))?;
        calendar = merge_calendars(&calendar, &actions);
    }

    let assignments = match &config.assignment {
        Some(path) => {
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "per-role".into());
            vec![AlgorithmAssignment::parse_per_role_csv(label, &read(path)?)
                .map_err(|e| in_file(path, e))?]
        }
        None => catalog
            .iter()
            .map(|alg| AlgorithmAssignment::Uniform(alg.name.clone()))
            .collect(),
    };

    let ticks = generate_ticks(config.start, config.end, config.cadence)?;
    let mut log_error = None;
    let results = run_sweep_with(
        &arch,
        &assignments,
        &calendar,
        &ticks,
        &catalog,
        |_, _, outcome| {
            if config.verbose && log_error.is_none() {
                if let Some(date) = outcome.applied_date.filter(|_| !outcome.staged.is_empty()) {
                    if let Err(e) = writeln!(diagnostics, " - match {date}") {
                        log_error = Some(e);
                    }
                }
            }
        },
    )?;
    if let Some(source) = log_error {
        return Err(Error::Io {
            path: PathBuf::from("<stderr>"),
            source,
        });
    }
    for result in &results {
        for warning in &result.warnings {
            let _ = writeln!(diagnostics, "warning: {}: {warning}", result.assignment);
        }
    }
    Ok(emit_report_csv(&results))
}

/// Parses `args` (including the program name), runs, and writes the report
/// to `stdout` or `--output`. Returns the process exit status.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(config) => config,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{err}");
                    0
                }
                _ => {
                    let rendered = err.to_string();
                    let line = rendered.lines().next().unwrap_or("invalid arguments");
                    let _ = writeln!(stderr, "{}", line.trim_start_matches("error: "));
                    2
                }
            };
        }
    };

    let report = match execute(&config, stderr) {
        Ok(report) => report,
        Err(err) => {
            let _ = writeln!(stderr, "{err}");
            return 1;
        }
    };

    let written = match &config.output {
        Some(path) => std::fs::write(path, &report).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => stdout
            .write_all(report.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    };
    match written {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "{err}");
            1
        }
    }
}
