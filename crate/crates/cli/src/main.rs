//! `qdense`: certify properties of monotone operators from the command line.

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qdense_core::certify::{gap_landscape, standard_probe_grid};
use qdense_core::corpus::{self, CheckInputs, CheckRecord, Subject};
use qdense_core::format::{gap_csv, OperatorFile, RunReport};
use qdense_core::{CertParams, Error, Operator, PropertyTag, Verdict};

const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_SOFTWARE: u8 = 70;

#[derive(Parser)]
#[command(name = "qdense", version, about = "Certify quasidensity and related properties of monotone operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run property certifications on an operator file or a corpus entry.
    Check {
        /// Path to an operator file, or the name of a corpus entry.
        input: String,
        /// Comma-separated properties; defaults to all (files) or the
        /// entry's expectations (corpus names).
        #[arg(short, long, value_delimiter = ',', value_parser = parse_property)]
        properties: Vec<PropertyTag>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Emit the gap over a probe grid as CSV rows.
    GapLandscape {
        /// Path to an operator file, or the name of a corpus entry.
        input: String,
        #[command(flatten)]
        overrides: Overrides,
        /// Half-width of the probe grid.
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the built-in corpus against its expected verdicts.
    RunCorpus {
        /// Glob over entry names, e.g. `lambda*`.
        #[arg(long)]
        filter: Option<String>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(clap::Args)]
struct Overrides {
    /// Truncation radius.
    #[arg(long)]
    radius: Option<f64>,
    /// Gap tolerance for quasidensity.
    #[arg(long)]
    tol: Option<f64>,
    /// Probe points per axis.
    #[arg(long)]
    grid: Option<usize>,
}

impl Overrides {
    fn apply(&self, params: &mut CertParams) -> Result<(), Error> {
        for (name, v) in [("--radius", self.radius), ("--tol", self.tol)] {
            match v {
                Some(v) if !(v.is_finite() && v > 0.0) => {
                    return Err(Error::Parse { path: name.into(), message: "must be a positive number".into() })
                }
                _ => {}
            }
        }
        if self.grid == Some(0) {
            return Err(Error::Parse { path: "--grid".into(), message: "must be at least 1".into() });
        }
        if let Some(r) = self.radius {
            params.radius = r;
        }
        if let Some(t) = self.tol {
            params.tol = t;
        }
        if let Some(g) = self.grid {
            params.probe_points = g;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

fn parse_property(s: &str) -> Result<PropertyTag, String> {
    PropertyTag::parse(s).ok_or_else(|| {
        let names: Vec<&str> = PropertyTag::ALL.iter().map(|t| t.name()).collect();
        format!("unknown property `{s}` (expected one of {})", names.join(", "))
    })
}

/// An input resolved to an operator plus whatever the source supplies.
struct Resolved {
    source: String,
    bytes: Vec<u8>,
    operator: Operator,
    inputs: CheckInputs,
    entry: Option<corpus::CorpusEntry>,
}

fn resolve(input: &str, params: &mut CertParams) -> Result<Resolved, Error> {
    let path = Path::new(input);
    if path.is_file() {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::Parse { path: input.into(), message: e.to_string() })?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| Error::Parse { path: input.into(), message: "file is not UTF-8".into() })?;
        let file = OperatorFile::parse(&text)?;
        file.parameters.apply(params);
        return Ok(Resolved {
            source: input.into(),
            bytes,
            operator: file.operator(),
            inputs: CheckInputs { probes: file.parameters.probes.clone(), targets: file.parameters.targets.clone() },
            entry: None,
        });
    }
    let entry = corpus::find(input).ok_or_else(|| Error::Parse {
        path: input.into(),
        message: "no such file or corpus entry".into(),
    })?;
    Ok(Resolved {
        source: entry.name.clone(),
        bytes: entry.name.clone().into_bytes(),
        operator: entry.operator.clone(),
        inputs: CheckInputs::default(),
        entry: Some(entry),
    })
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn out(text: &str) {
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
}

fn emit(report: &RunReport, format: Format) {
    match format {
        Format::Text => out(&report.to_text()),
        Format::Json => out(&format!("{}\n", report.to_json())),
        Format::Csv => out(&report.to_csv()),
    }
}

/// Fail beats inconclusive beats pass.
fn verdict_code(checks: &[CheckRecord]) -> u8 {
    let verdicts = checks.iter().map(|c| c.report.verdict);
    if verdicts.clone().any(|v| v == Verdict::Fail) {
        EXIT_FAIL
    } else if verdicts.into_iter().any(|v| v != Verdict::Pass) {
        EXIT_INCONCLUSIVE
    } else {
        0
    }
}

fn check(input: &str, properties: &[PropertyTag], overrides: &Overrides, format: Format) -> Result<u8, Error> {
    let mut params = CertParams::default();
    let resolved = resolve(input, &mut params)?;
    overrides.apply(&mut params)?;

    let mut checks = Vec::new();
    match (&resolved.entry, properties.is_empty()) {
        (Some(entry), true) => checks = corpus::run_entry(entry, &params)?,
        _ => {
            let mut tags: Vec<PropertyTag> =
                if properties.is_empty() { PropertyTag::ALL.to_vec() } else { properties.to_vec() };
            tags.sort_by_key(|t| t.rank());
            tags.dedup();
            for tag in tags {
                let expectation = resolved
                    .entry
                    .iter()
                    .flat_map(|e| &e.expected)
                    .find(|x| x.property == tag && x.subject == Subject::Operator);
                let mut inputs = resolved.inputs.clone();
                if let Some(x) = expectation {
                    inputs.targets = inputs.targets.or_else(|| x.targets.clone());
                }
                let report = corpus::run_property(&resolved.operator, tag, &inputs, &params)?;
                checks.push(CheckRecord {
                    source: resolved.source.clone(),
                    subject: Subject::Operator,
                    expected: expectation.map(|x| x.verdict),
                    report,
                    note: resolved.entry.as_ref().and_then(|e| e.note.clone()),
                });
            }
        }
    }
    let report = RunReport::new(&resolved.bytes, checks);
    emit(&report, format);
    Ok(verdict_code(&report.checks))
}

fn landscape(input: &str, overrides: &Overrides, half_width: Option<f64>, format: Format) -> Result<u8, Error> {
    let mut params = CertParams::default();
    let resolved = resolve(input, &mut params)?;
    overrides.apply(&mut params)?;
    if let Some(w) = half_width {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Parse { path: "--half-width".into(), message: "must be a positive number".into() });
        }
        params.probe_half_width = w;
    }
    let explicit_grid = overrides.grid.is_some() || half_width.is_some();
    let probes = match resolved.inputs.probes {
        Some(p) if !explicit_grid => p,
        _ => standard_probe_grid(resolved.operator.dim(), params.probe_half_width, params.probe_points),
    };
    let rows = gap_landscape(&resolved.operator, &probes, &params)?;
    match format {
        Format::Json => out(&format!("{}\n", serde_json::to_string_pretty(&rows).expect("gap rows serialize"))),
        _ => out(&gap_csv(&rows)),
    }
    Ok(if rows.iter().all(|r| r.converged) { 0 } else { EXIT_INCONCLUSIVE })
}

fn run_corpus(filter: Option<&str>, overrides: &Overrides, format: Format) -> Result<u8, Error> {
    let mut params = CertParams::default();
    overrides.apply(&mut params)?;
    let entries = corpus::select(filter)?;
    let mut checks = Vec::new();
    for entry in &entries {
        checks.extend(corpus::run_entry(entry, &params)?);
    }
    let report = RunReport::new(filter.unwrap_or("").as_bytes(), checks);
    emit(&report, format);
    if !report.all_match() {
        for c in report.checks.iter().filter(|c| !c.matches()) {
            eprintln!(
                "mismatch: {} {} expected {} got {}",
                c.source,
                c.report.property,
                c.expected.map_or("-", |v| v.name()),
                c.report.verdict
            );
        }
        return Ok(EXIT_FAIL);
    }
    Ok(0)
}

fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse { .. } | Error::InvalidInput(_) | Error::EmptySelection(_) | Error::InvalidExponent(_)
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Check { input, properties, overrides, format } => check(input, properties, overrides, *format),
        Command::GapLandscape { input, overrides, half_width, format } => {
            landscape(input, overrides, *half_width, *format)
        }
        Command::RunCorpus { filter, overrides, format } => run_corpus(filter.as_deref(), overrides, *format),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_input_error(&e) { EXIT_USAGE } else { EXIT_SOFTWARE })
        }
    }
}
