//! Command-line front end.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success; `validate` also requires every criterion to pass |
//! | 1 | `validate` found failing criteria, or `query` found no (unique) answer |
//! | 2 | usage, configuration or spec error |
//! | 3 | reading or writing a log failed |
//! | 4 | the requested conversion is not supported |
//!
//! Results go to stdout, diagnostics to stderr. `DIRIGO_SPEC` names the
//! default domain spec; without it the bundled cargo pickup spec is used.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::convert::{convert_representation, ConvertError, O2oPairing};
use crate::domain::DomainSpec;
use crate::formats::dirigo::{read_dirigo, write_dirigo};
use crate::formats::Format;
use crate::quality::{evaluate_all, Representation};
use crate::queries::{self, ObjectSelector, QueryError};
use crate::sim::{self, SimConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

pub const SPEC_ENV: &str = "DIRIGO_SPEC";

#[derive(Debug, Parser)]
#[command(name = "dirigo", version, about = "Object-centric event log toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate cargo pickup logs and write a Dirigo bundle.
    Generate {
        #[arg(long, short)]
        out: PathBuf,
        /// Overrides the seed of the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, env = SPEC_ENV)]
        spec: Option<PathBuf>,
        /// Write the pinned golden log instead of simulating.
        #[arg(long, conflicts_with_all = ["seed", "config"])]
        golden: bool,
    },
    /// Convert a log between representations; prints the loss report.
    Convert {
        #[arg(long = "from", value_parser = parse_format)]
        from: Format,
        #[arg(long = "to", value_parser = parse_format)]
        to: Format,
        input: PathBuf,
        output: PathBuf,
        /// Supplies the assign/drop qualifier pairs of O2O relations.
        #[arg(long, env = SPEC_ENV)]
        spec: Option<PathBuf>,
    },
    /// Evaluate the quality criteria against a domain spec.
    Validate {
        input: PathBuf,
        #[arg(long, value_parser = parse_format, default_value = "dirigo")]
        format: Format,
        #[arg(long, env = SPEC_ENV)]
        spec: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Answer a goal query over a Dirigo bundle.
    Query {
        bundle: PathBuf,
        query: QueryName,
        /// Query parameters; objects are ids, `Attr=Value` or a unique value.
        params: Vec<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum QueryName {
    /// OBJECT ATTRIBUTE
    StaticAttribute,
    /// OBJECT ATTRIBUTE
    LastButOne,
    /// ACTIVITY OBJECT
    EventTime,
    /// OBJECT NAME
    StaticO2o,
    /// OBJECT
    NextAssignment,
    /// OBJECT ATTRIBUTE ACTIVITY
    AttributeBeforeEvent,
    /// OBJECT QUALIFIER
    O2oEvent,
    /// OBJECT ATTRIBUTE FROM TO
    StatusTransitions,
}

impl QueryName {
    fn arity(self) -> usize {
        match self {
            QueryName::NextAssignment => 1,
            QueryName::AttributeBeforeEvent => 3,
            QueryName::StatusTransitions => 4,
            _ => 2,
        }
    }
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

/// A failed command: exit code plus diagnostic.
struct Failure(i32, String);

type Outcome = Result<i32, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

fn io(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_IO, e.to_string())
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Generate {
            out: dir,
            seed,
            config,
            spec,
            golden,
        } => generate(&dir, seed, config.as_deref(), spec.as_deref(), golden, err),
        Command::Convert {
            from,
            to,
            input,
            output,
            spec,
        } => convert(from, to, &input, &output, spec.as_deref(), out, err),
        Command::Validate {
            input,
            format,
            spec,
            json,
        } => validate(&input, format, spec.as_deref(), json, out),
        Command::Query {
            bundle,
            query,
            params,
            json,
        } => run_query(&bundle, query, &params, json, out),
    }
}

fn load_spec(path: Option<&Path>) -> Result<DomainSpec, Failure> {
    match path {
        None => Ok(sim::canonical_spec()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| usage(format!("spec {}: {e}", p.display())))?;
            DomainSpec::parse(&text).map_err(|e| usage(format!("spec {}: {e}", p.display())))
        }
    }
}

fn generate(
    dir: &Path,
    seed: Option<u64>,
    config: Option<&Path>,
    spec: Option<&Path>,
    golden: bool,
    err: &mut dyn Write,
) -> Outcome {
    let spec = load_spec(spec)?;
    let log = if golden {
        sim::golden_log()
    } else {
        let mut cfg = match config {
            None => SimConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| usage(format!("config {}: {e}", p.display())))?;
                SimConfig::from_toml(&text).map_err(|e| usage(e.to_string()))?
            }
        };
        if let Some(s) = seed {
            cfg.seed = s;
        }
        sim::simulate(&cfg, &spec).map_err(|e| usage(e.to_string()))?
    };
    write_dirigo(&log, dir).map_err(io)?;
    let _ = writeln!(
        err,
        "wrote {} events and {} objects to {}",
        log.events().len(),
        log.objects().len(),
        dir.display()
    );
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn convert(
    from: Format,
    to: Format,
    input: &Path,
    output: &Path,
    spec: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let pairing = match spec {
        Some(_) => O2oPairing::from_spec(&load_spec(spec)?),
        None => O2oPairing::default(),
    };
    if matches!(from, Format::Docel | Format::Xoc) && from != to {
        return Err(Failure(
            EXIT_UNSUPPORTED,
            ConvertError::Unsupported { from, to }.to_string(),
        ));
    }
    let source = Representation::read(from, input).map_err(io)?;
    let conversion = convert_representation(source, to, &pairing).map_err(|e| match e {
        ConvertError::Unsupported { .. } => Failure(EXIT_UNSUPPORTED, e.to_string()),
        ConvertError::Model(_) => io(e),
    })?;
    conversion.output.write(output).map_err(io)?;
    write!(out, "{}", conversion.loss).map_err(io)?;
    let _ = writeln!(err, "{from} -> {to}: {} facts lost", conversion.loss.len());
    Ok(EXIT_OK)
}

fn validate(
    input: &Path,
    format: Format,
    spec: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> Outcome {
    let spec = load_spec(spec)?;
    let rep = Representation::read(format, input).map_err(io)?;
    let report = evaluate_all(&rep, &spec);
    if json {
        writeln!(out, "{}", report.to_json()).map_err(io)?;
    } else {
        write!(out, "{report}").map_err(io)?;
    }
    Ok(if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn run_query(
    bundle: &Path,
    name: QueryName,
    params: &[String],
    json: bool,
    out: &mut dyn Write,
) -> Outcome {
    if params.len() != name.arity() {
        return Err(usage(format!(
            "{} takes {} parameters, got {}",
            name.to_possible_value().expect("named").get_name(),
            name.arity(),
            params.len()
        )));
    }
    let log = read_dirigo(bundle).map_err(io)?;
    let p = |i: usize| params[i].as_str();
    let sel = |i: usize| -> ObjectSelector { p(i).parse().expect("infallible") };
    let failed = |e: QueryError| Failure(EXIT_FAILED, e.to_string());

    // each answer as text lines plus a JSON value
    let (lines, value): (Vec<String>, serde_json::Value) = match name {
        QueryName::StaticAttribute => {
            let v = queries::q_static_attribute(&log, &sel(0), p(1)).map_err(failed)?;
            (vec![v.clone()], json!(v))
        }
        QueryName::LastButOne => {
            let (t, v) = queries::q_last_but_one(&log, &sel(0), p(1)).map_err(failed)?;
            (
                vec![format!("{t} {v}")],
                json!({"timestamp": t.to_string(), "value": v}),
            )
        }
        QueryName::EventTime => {
            let t = queries::q_event_time(&log, p(0), &sel(1)).map_err(failed)?;
            (vec![t.to_string()], json!(t.to_string()))
        }
        QueryName::StaticO2o => {
            let v = queries::q_static_o2o(&log, &sel(0), p(1)).map_err(failed)?;
            (vec![v.clone()], json!(v))
        }
        QueryName::NextAssignment => {
            let v = queries::q_next_assignment(&log, &sel(0)).map_err(failed)?;
            (vec![v.clone()], json!(v))
        }
        QueryName::AttributeBeforeEvent => {
            let v = queries::q_attribute_before_event(&log, &sel(0), p(1), p(2)).map_err(failed)?;
            (vec![v.clone()], json!(v))
        }
        QueryName::O2oEvent => {
            let (e, t) = queries::q_o2o_event(&log, &sel(0), p(1)).map_err(failed)?;
            (
                vec![format!("{e} {t}")],
                json!({"event": e, "timestamp": t.to_string()}),
            )
        }
        QueryName::StatusTransitions => {
            let ts =
                queries::q_status_transitions(&log, &sel(0), p(1), p(2), p(3)).map_err(failed)?;
            let ts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
            (ts.clone(), json!(ts))
        }
    };
    if json {
        writeln!(out, "{value}").map_err(io)?;
    } else {
        for line in lines {
            writeln!(out, "{line}").map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}
