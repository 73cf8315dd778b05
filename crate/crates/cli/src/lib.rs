//! Command-line front end for `sheafnet`: reads network and schedule files,
//! runs one analysis and renders it as pretty JSON or DOT.

pub mod dot;
pub mod input;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use sheafnet::payload::{PayloadError, Protocol};
use sheafnet::TimeWindow;

pub use input::{parse_network, parse_schedule, ParseError, ScheduleInput};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Complex,
    Sections,
    Cohomology,
    Simulate,
    Bound,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Dot,
}

/// One invocation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub network: PathBuf,
    pub schedule: Option<PathBuf>,
    /// Overrides the network file's window.
    pub window: Option<TimeWindow>,
    pub threshold: Option<f64>,
    pub protocol: String,
    pub packet_dim: usize,
    pub queue_len: usize,
    pub format: Format,
    /// Seed for `[random_disk]` networks without their own.
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn new(command: Command, network: impl Into<PathBuf>) -> Self {
        Self {
            command,
            network: network.into(),
            schedule: None,
            window: None,
            threshold: None,
            protocol: "forward-everything".into(),
            packet_dim: 1,
            queue_len: 3,
            format: Format::Json,
            seed: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Input(String),
    /// Inputs that parse but describe no consistent network state.
    #[error("{0}")]
    Model(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Input(_) => 1,
            CliError::Model(_) => 2,
        }
    }
}

impl From<PayloadError> for CliError {
    fn from(e: PayloadError) -> Self {
        match e {
            PayloadError::InvalidSchedule { .. }
            | PayloadError::Inconsistent { .. }
            | PayloadError::InjectionConflict { .. }
            | PayloadError::InitialState { .. } => CliError::Model(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// A rendered report. `consistent` is false when the report records a failed
/// check; the binary then exits with code 2 after printing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub consistent: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let name = cfg.network.display().to_string();
    let mut net = parse_network(&name, &read(&cfg.network)?, cfg.seed)?;
    if let Some(t) = cfg.threshold {
        net.set_threshold(t).map_err(|e| CliError::Input(e.to_string()))?;
    }
    if let Some(w) = cfg.window {
        net = net.with_window(w);
    }
    let schedule = match &cfg.schedule {
        Some(path) => Some(parse_schedule(&path.display().to_string(), &read(path)?)?),
        None => None,
    };
    let payload = || -> Result<report::PayloadParams, CliError> {
        let protocol: Protocol = cfg
            .protocol
            .parse()
            .map_err(|e: sheafnet::payload::ProtocolError| CliError::Input(e.to_string()))?;
        let window = net.window().ok_or_else(|| {
            CliError::Input("this command needs a time window (--window or `window` in the network file)".into())
        })?;
        Ok(report::PayloadParams {
            protocol,
            window,
            packet_dim: cfg.packet_dim,
            queue_len: cfg.queue_len,
        })
    };
    let need_schedule = || {
        schedule
            .as_ref()
            .ok_or_else(|| CliError::Input("this command needs --schedule".into()))
    };

    match (cfg.command, cfg.format) {
        (Command::Complex, Format::Json) => Ok(json(report::complex(&net), true)),
        (Command::Sections, Format::Json) => Ok(json(report::sections(&net), true)),
        (Command::Cohomology, Format::Json) => {
            let (value, pass) = report::cohomology(&net);
            Ok(json(value, pass))
        }
        (Command::Simulate, Format::Json) => Ok(json(report::simulate(&net, &payload()?, need_schedule()?)?, true)),
        (Command::Bound, Format::Json) => {
            let idle = ScheduleInput::default();
            let sched = schedule.as_ref().unwrap_or(&idle);
            Ok(json(report::bound(&net, &payload()?, sched)?, true))
        }
        (Command::Complex, Format::Dot) => Ok(text(dot::complexes(&report::views(&net)))),
        (Command::Sections, Format::Dot) => Ok(text(dot::sections(&report::views(&net)))),
        (_, Format::Dot) => Err(CliError::Input(
            "DOT output is available for `complex` and `sections`".into(),
        )),
    }
}

fn json(value: serde_json::Value, consistent: bool) -> Outcome {
    let mut report = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    report.push('\n');
    Outcome { report, consistent }
}

fn text(report: String) -> Outcome {
    Outcome {
        report,
        consistent: true,
    }
}

/// Parses `START..END`, `START:END` or a single time.
pub fn parse_window(s: &str) -> Result<TimeWindow, String> {
    let (a, b) = s.split_once("..").or_else(|| s.split_once(':')).unwrap_or((s, s));
    let int = |x: &str| {
        x.trim()
            .parse::<i64>()
            .map_err(|_| format!("`{x}` is not an integer time"))
    };
    TimeWindow::new(int(a)?, int(b)?).map_err(|e| e.to_string())
}
