//! Command-line driver: builds a window quotient from a catalog family or a
//! presentation file, runs one verb and emits a text or JSON report.
//!
//! Exit codes: 0 when every asserted check passes, 1 when one fails, 2 on
//! usage or input errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use prosolv_core::algebra::quotient::default_buffer;
use prosolv_core::algebra::{parse_presentation, IngestError, Quotient, QuotientError, Window};
use prosolv_core::catalog::{instantiate, CatalogError, FamilyId, ParamVector};
use prosolv_core::cohomology::CohomologyError;
use prosolv_core::derivation::DerivationError;
use prosolv_core::linalg::{parse_rational, LinalgError};
use serde_json::{json, Map, Value};
use thiserror::Error;

pub mod args;
pub mod report;
mod verbs;

use args::{Cli, Common, Format, Output, Verb};
use report::Outcome;

/// Directory for reports; relative `--out` paths resolve against it.
pub const REPORT_DIR_ENV: &str = "PROSOLV_REPORT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("bad parameter: {0}")]
    Param(#[from] LinalgError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("presentation: {0}")]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Everything a run produced; `run` prints it, tests inspect it.
#[derive(Debug, Default)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<Value>,
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let ex = execute(argv);
    print!("{}", ex.stdout);
    eprint!("{}", ex.stderr);
    ex.code
}

pub fn execute<I, T>(argv: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Execution { code: 2, stderr: text, ..Default::default() }
            } else {
                Execution { code: 0, stdout: text, ..Default::default() }
            };
        }
    };
    match dispatch(&cli) {
        Ok(ex) => ex,
        Err(e) => Execution {
            code: 2,
            stderr: format!("error: {e}\n"),
            ..Default::default()
        },
    }
}

fn parse_params(s: &str) -> Result<ParamVector, CliError> {
    let values = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ParamVector::new(values))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn target(c: &Common) -> Result<(verbs::Target, Map<String, Value>), CliError> {
    let params = c.params.as_deref().map(parse_params).transpose()?;
    let (family, presentation) = match (&c.family, &c.presentation) {
        (Some(name), None) => {
            let f: FamilyId = name.parse()?;
            (Some(f), instantiate(f, params.as_ref())?)
        }
        (None, Some(path)) => {
            if params.is_some() {
                return Err(CliError::Usage("--params applies to catalog families only".into()));
            }
            (None, parse_presentation(&read(path)?)?)
        }
        _ => return Err(CliError::Usage("give exactly one of --family, --presentation".into())),
    };
    let buffer = c
        .buffer
        .unwrap_or_else(|| default_buffer(c.top, presentation.max_shift()));
    let window = Window::new(c.top, buffer)?;
    let quotient = Quotient::new(&presentation, window)?;

    let mut inputs = Map::new();
    inputs.insert("family".into(), family.map(|f| f.cli_name()).into());
    inputs.insert(
        "presentation".into(),
        c.presentation.as_ref().map(|p| p.display().to_string()).into(),
    );
    inputs.insert("algebra".into(), presentation.name().into());
    inputs.insert(
        "params".into(),
        params.as_ref().map_or(Value::Null, verbs::params_json),
    );
    inputs.insert("window".into(), json!({"N": window.top(), "B": window.buffer()}));
    if family == Some(FamilyId::M0Beta) {
        inputs.insert("beta_summand_index".into(), "e_{k+i-2}".into());
    }
    let t = verbs::Target {
        family,
        params,
        presentation,
        window,
        quotient,
    };
    Ok((t, inputs))
}

fn dispatch(cli: &Cli) -> Result<Execution, CliError> {
    let start = Instant::now();
    let (verb, output, inputs, outcome): (&str, &Output, Map<String, Value>, Outcome) =
        match &cli.verb {
            Verb::Catalog(out) => ("catalog", out, Map::new(), verbs::catalog()),
            Verb::Table(c) => {
                let (t, i) = target(c)?;
                ("table", &c.output, i, verbs::table(&t))
            }
            Verb::Jacobi(c) => {
                let (t, i) = target(c)?;
                ("jacobi", &c.output, i, verbs::jacobi(&t))
            }
            Verb::Series(c) => {
                let (t, i) = target(c)?;
                ("series", &c.output, i, verbs::series(&t))
            }
            Verb::Der(c) => {
                let (t, i) = target(c)?;
                ("der", &c.output, i, verbs::der(&t)?)
            }
            Verb::H1(c) => {
                let (t, i) = target(c)?;
                ("h1", &c.output, i, verbs::h1(&t)?)
            }
            Verb::Complete(c) => {
                let (t, i) = target(c)?;
                ("complete", &c.output, i, verbs::complete(&t)?)
            }
            Verb::H2(a) => {
                let (t, mut i) = target(&a.common)?;
                i.insert("seed".into(), a.seed.into());
                i.insert("samples".into(), a.samples.into());
                let o = verbs::h2(&t, a.seed, a.samples, a.max_unknowns)?;
                ("h2", &a.common.output, i, o)
            }
            Verb::Witness(a) => {
                let (t, mut i) = target(&a.common)?;
                i.insert("j_min".into(), a.j_min.into());
                let o = verbs::witness(&t, a.j_min, a.max_unknowns)?;
                ("witness", &a.common.output, i, o)
            }
        };
    let code = if outcome.failed() { 1 } else { 0 };
    let elapsed = u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX);
    let report = report::envelope(verb, Value::Object(inputs), outcome, elapsed);
    let rendered = match output.format {
        Format::Json => report::to_json(&report),
        Format::Text => report::to_text(&report),
    };

    let dir = std::env::var_os(REPORT_DIR_ENV).map(PathBuf::from);
    let mut ex = Execution {
        code,
        report: Some(report.clone()),
        ..Default::default()
    };
    match (&output.out, &dir) {
        (Some(path), _) => {
            let path = match &dir {
                Some(d) if path.is_relative() => d.join(path),
                _ => path.clone(),
            };
            write(&path, &rendered)?;
        }
        (None, Some(d)) => {
            write(&d.join(default_name(verb, &report)), &report::to_json(&report))?;
            ex.stdout = rendered;
        }
        (None, None) => ex.stdout = rendered,
    }
    Ok(ex)
}

fn default_name(verb: &str, report: &Value) -> String {
    let inputs = &report["inputs"];
    match inputs["algebra"].as_str() {
        Some(name) => format!(
            "{verb}_{name}_N{}_B{}.json",
            inputs["window"]["N"], inputs["window"]["B"]
        ),
        None => format!("{verb}.json"),
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)
}
