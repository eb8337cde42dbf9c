use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use icbargain::report::{
    mechanism_report, nbs_mac_report, region_export, sweep_b, sweep_csv, SweepReport, SweepSpec,
    RATE_UNITS, SCHEMA,
};
use icbargain::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

/// Nash bargaining over Han-Kobayashi regions of the two-user Gaussian
/// interference channel. Rates are in bits per channel use.
///
/// Exit codes: 0 success, 2 usage error, 3 the exact solver hit a numerical
/// degeneracy and the grid-search result was reported instead.
#[derive(Debug, Parser)]
#[command(name = "icbargain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; defaults to json for reports and csv for curves.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct Snr {
    /// SNR of user 1 in dB (P1 = 10^(snr/10), unit noise).
    #[arg(long = "snr1-db", allow_hyphen_values = true)]
    snr1_db: f64,
    /// SNR of user 2 in dB.
    #[arg(long = "snr2-db", allow_hyphen_values = true)]
    snr2_db: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// NBS over the Gaussian MAC capacity pentagon (closed form).
    NbsMac {
        #[command(flatten)]
        snr: Snr,
        /// Cross-check against the grid oracle at n = 2000.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Run the two-phase mechanism on one channel.
    ///
    /// Negotiation breaks down when a·P2 <= 1 (user 1) or b·P1 <= 1 (user 2)
    /// in the regimes where those tests apply; equality counts as breakdown.
    Mechanism {
        /// Cross gain from transmitter 2 to receiver 1.
        #[arg(long)]
        a: f64,
        /// Cross gain from transmitter 1 to receiver 2.
        #[arg(long)]
        b: f64,
        #[command(flatten)]
        snr: Snr,
        /// Cross-check the NBS against the grid oracle at n = 2000.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Export H-K region vertices, TDM frontier, R0 and both NBS points.
    Region {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[command(flatten)]
        snr: Snr,
        /// Number of TDM frontier samples (>= 2).
        #[arg(long = "tdm-samples", default_value_t = 101)]
        tdm_samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Sweep the cross gain b at fixed a. Rows where negotiation breaks
    /// down report the disagreement point.
    SweepB {
        #[arg(long)]
        a: f64,
        #[command(flatten)]
        snr: Snr,
        #[arg(long = "b-min", default_value_t = 0.0)]
        b_min: f64,
        #[arg(long = "b-max", default_value_t = 3.0)]
        b_max: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Usage(String),
    Io(io::Error),
    Json(serde_json::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Json(e)
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Flattens a JSON value into `key,value` lines.
fn to_kv_csv(value: &serde_json::Value) -> String {
    fn walk(prefix: &str, v: &serde_json::Value, out: &mut Vec<(String, String)>) {
        use serde_json::Value;
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, child, out);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), child, out);
                }
            }
            Value::Number(n) => out.push((
                prefix.to_string(),
                n.as_f64().map(icbargain::report::fmt_num).unwrap_or_else(|| n.to_string()),
            )),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
            Value::Null => out.push((prefix.to_string(), String::new())),
        }
    }
    let mut rows = Vec::new();
    walk("", value, &mut rows);
    let mut s = String::from("key,value\n");
    for (k, v) in rows {
        s.push_str(&k);
        s.push(',');
        s.push_str(&v);
        s.push('\n');
    }
    s
}

fn report_text<T: serde::Serialize>(value: &T, format: Option<Format>) -> Result<String, Failure> {
    match format.unwrap_or(Format::Json) {
        Format::Json => to_json(value),
        Format::Csv => Ok(to_kv_csv(&serde_json::to_value(value)?)),
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::NbsMac { snr, verify, output } => {
            let report = nbs_mac_report(snr.snr1_db, snr.snr2_db, verify)?;
            emit(&report_text(&report, output.format)?, &output.out)?;
            Ok(report.outcome.degenerate)
        }
        Command::Mechanism { a, b, snr, verify, output } => {
            let report = mechanism_report(a, b, snr.snr1_db, snr.snr2_db, verify)?;
            emit(&report_text(&report, output.format)?, &output.out)?;
            Ok(report.degenerate())
        }
        Command::Region { a, b, snr, tdm_samples, output } => {
            let export = region_export(a, b, snr.snr1_db, snr.snr2_db, tdm_samples)?;
            let text = match output.format.unwrap_or(Format::Csv) {
                Format::Csv => export.to_csv(),
                Format::Json => to_json(&export)?,
            };
            emit(&text, &output.out)?;
            Ok(export.mechanism.nbs.as_ref().is_some_and(|n| n.degenerate))
        }
        Command::SweepB { a, snr, b_min, b_max, step, output } => {
            let spec = SweepSpec {
                a,
                snr1_db: snr.snr1_db,
                snr2_db: snr.snr2_db,
                b_min,
                b_max,
                step,
            };
            let sweep = sweep_b(&spec)?;
            let text = match output.format.unwrap_or(Format::Csv) {
                Format::Csv => sweep_csv(&sweep.rows),
                Format::Json => to_json(&SweepReport {
                    schema: SCHEMA,
                    units: RATE_UNITS,
                    rows: &sweep.rows,
                })?,
            };
            emit(&text, &output.out)?;
            Ok(sweep.degenerate)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("warning: numerical degeneracy, grid-search fallback was used");
            ExitCode::from(EXIT_DEGENERATE)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
        Err(Failure::Json(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
