//! Command-line front end. Tables go out as CSV or JSON, reports as JSON, and
//! every run that writes a file also writes `<file>.manifest.json`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::convergence::{
    consistency_study, example1_study, powers_of_two, tadjeran_study, ConvergenceTable,
};
use crate::error::{Error, Result};
use crate::grunwald::{
    grunwald_weights, second_order_scheme, third_order_scheme, FracOrder, Scheme,
};
use crate::norms::{default_h_grid, log_grid, semigroup_norm_scan};
use crate::pde::{Example1Data, TadjeranScheme, TimeControl};
use crate::symbols::{certify_stability, combined_symbol};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "grunwald",
    version,
    about = "Grünwald-type fractional difference schemes: weights, stability, norms and convergence studies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// Write here instead of stdout; a manifest is written next to it.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grünwald weights w_0 .. w_count.
    Weights {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        count: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Stability certificate of a scheme's symbol (JSON).
    Stability {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// `p:<int>`, `order1`, `order2` or `order3`.
        #[arg(long)]
        scheme: String,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Semigroup norms and analyticity products on a t x h grid.
    Norms {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        scheme: String,
        /// `lo:hi:count` (log-spaced) or a comma list.
        #[arg(long, default_value = "1e-3:1e3:12")]
        tgrid: String,
        /// Same syntax; defaults to h^alpha = 1, 1e-1, ..., 1e-5.
        #[arg(long)]
        hgrid: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Max errors of the variable-coefficient test problem at dx = 1/10 .. 1/25.
    Table1 {
        #[arg(long, value_enum)]
        scheme: Table1Scheme,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// L1 errors of the half-line Cauchy problem with power-law data.
    Example1 {
        #[arg(long, value_enum)]
        f: DataKind,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        scheme: u8,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256")]
        resolutions: Vec<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Consistency errors on a Gaussian against the spectral derivative.
    Consistency {
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.8)]
        alpha: f64,
        #[arg(long)]
        scheme: String,
        /// Values of 1/h.
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256,512")]
        resolutions: Vec<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Table1Scheme {
    Order2,
    Order3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum DataKind {
    F1,
    F2,
    F3,
}

/// A table with a mandatory header. Missing cells are empty strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// CSV with LF endings; floats use the shortest text that parses back exactly.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(
                row.iter()
                    .map(|v| v.map(|x| format!("{x}")).unwrap_or_default()),
            )
            .map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        let header = r.headers().map_err(io)?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(io)?;
            let row = rec
                .iter()
                .map(|s| {
                    if s.is_empty() {
                        Ok(None)
                    } else {
                        s.parse::<f64>()
                            .map(Some)
                            .map_err(|e| Error::InvalidArgument(format!("bad number {s:?}: {e}")))
                    }
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    /// Array of objects keyed by the header; non-finite or missing cells become null.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.header
                            .iter()
                            .cloned()
                            .zip(row.iter().map(|v| json!(v)))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(format!("{:#}\n", self.to_json())),
        }
    }
}

/// Written next to every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub tool_version: String,
    pub timestamp: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, outputs: Vec<String>) -> Self {
        Self {
            command: command.into(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            outputs,
        }
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }
}

/// What a command produced, before it is written anywhere.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Table(Table),
    Report(Value),
}

impl Output {
    fn render(&self, format: Format) -> Result<String> {
        match self {
            Output::Table(t) => t.render(format),
            Output::Report(v) => Ok(format!("{v:#}\n")),
        }
    }
}

/// Parses `p:<int>`, `order1`, `order2` or `order3`.
pub fn parse_scheme(alpha: f64, spec: &str) -> Result<Scheme> {
    let order = FracOrder::new(alpha)?;
    match spec {
        "order1" => Ok(Scheme::first_order(order)),
        "order2" => second_order_scheme(order),
        "order3" => third_order_scheme(order),
        _ => {
            let p = spec
                .strip_prefix("p:")
                .and_then(|s| s.parse::<i64>().ok())
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "unknown scheme {spec:?}; use p:<int>, order1, order2 or order3"
                    ))
                })?;
            Ok(Scheme::shifted(order, p as f64))
        }
    }
}

/// `lo:hi:count` gives log-spaced points; anything else is a comma list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("bad grid {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if !(lo > 0.0 && hi >= lo && n >= 1) {
            return Err(bad());
        }
        return Ok(log_grid(lo, hi, n));
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

fn convergence_table(t: &ConvergenceTable, first: &str) -> Table {
    let mut out = Table::new(&[first, "h", "error", "ratio", "local_order", "fitted_order"]);
    for r in &t.rows {
        out.push(vec![
            Some(r.resolution as f64),
            Some(r.h),
            Some(r.error),
            r.ratio,
            r.local_order,
            Some(t.fitted_order),
        ]);
    }
    out
}

pub fn cmd_weights(alpha: f64, count: usize) -> Result<Output> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let w = grunwald_weights(alpha, count);
    let header: Vec<String> = (0..=count).map(|m| format!("w{m}")).collect();
    Ok(Output::Table(Table {
        header,
        rows: vec![w.into_iter().map(Some).collect()],
    }))
}

pub fn cmd_stability(alpha: f64, scheme: &str, samples: usize) -> Result<Output> {
    let s = parse_scheme(alpha, scheme)?;
    let r = certify_stability(&combined_symbol(&s, 1.0), samples)?;
    Ok(Output::Report(json!({
        "alpha": alpha,
        "scheme": scheme,
        "sign_change": r.sign_change,
        "c": r.c_coercivity,
        "c_bound": r.c_bound,
        "cprime_bound": if r.cprime_bound.is_finite() { json!(r.cprime_bound) } else { json!("inf") },
        "k_grid_size": r.k_grid_size,
    })))
}

pub fn cmd_norms(alpha: f64, scheme: &str, tgrid: &str, hgrid: Option<&str>) -> Result<Output> {
    let s = parse_scheme(alpha, scheme)?;
    let t = parse_grid(tgrid)?;
    let h = match hgrid {
        Some(g) => parse_grid(g)?,
        None => default_h_grid(alpha),
    };
    let scan = semigroup_norm_scan(&s, &t, &h)?;
    let mut out = Table::new(&["t", "h", "norm", "analyticity_product"]);
    for (i, &ti) in scan.t_grid.iter().enumerate() {
        for (j, &hj) in scan.h_grid.iter().enumerate() {
            out.push(vec![
                Some(ti),
                Some(hj),
                Some(scan.norms[i][j]),
                Some(scan.analyticity_products[i][j]),
            ]);
        }
    }
    Ok(Output::Table(out))
}

pub const TABLE1_RESOLUTIONS: [usize; 4] = [10, 15, 20, 25];

pub fn cmd_table1(scheme: Table1Scheme) -> Result<Output> {
    let kind = match scheme {
        Table1Scheme::Order2 => TadjeranScheme::Order2,
        Table1Scheme::Order3 => TadjeranScheme::Order3,
    };
    let t = tadjeran_study(kind, &TABLE1_RESOLUTIONS, &TimeControl::default())?;
    let mut out = Table::new(&["dx", "error", "ratio"]);
    for r in &t.rows {
        out.push(vec![Some(r.h), Some(r.error), r.ratio]);
    }
    Ok(Output::Table(out))
}

pub fn cmd_example1(f: DataKind, scheme: u8, resolutions: &[usize]) -> Result<Output> {
    let data = match f {
        DataKind::F1 => Example1Data::F1,
        DataKind::F2 => Example1Data::F2,
        DataKind::F3 => Example1Data::F3,
    };
    let t = example1_study(
        data,
        scheme as usize,
        resolutions,
        &TimeControl::default(),
        None,
    )?;
    Ok(Output::Table(convergence_table(&t, "nx")))
}

pub fn cmd_consistency(alpha: f64, scheme: &str, resolutions: &[usize]) -> Result<Output> {
    let s = parse_scheme(alpha, scheme)?;
    let t = consistency_study(&s, resolutions)?;
    Ok(Output::Table(convergence_table(&t, "inv_h")))
}

/// Default `1/h` values of the consistency study.
pub fn consistency_resolutions() -> Vec<usize> {
    powers_of_two(4, 9)
}

fn execute(cmd: &Command) -> Result<(Output, Format, Option<PathBuf>, &'static str, Value)> {
    Ok(match cmd {
        Command::Weights { alpha, count, out } => (
            cmd_weights(*alpha, *count)?,
            out.format,
            out.output.clone(),
            "weights",
            json!({"alpha": alpha, "count": count}),
        ),
        Command::Stability {
            alpha,
            scheme,
            samples,
            output,
        } => (
            cmd_stability(*alpha, scheme, *samples)?,
            Format::Json,
            output.clone(),
            "stability",
            json!({"alpha": alpha, "scheme": scheme, "samples": samples}),
        ),
        Command::Norms {
            alpha,
            scheme,
            tgrid,
            hgrid,
            out,
        } => (
            cmd_norms(*alpha, scheme, tgrid, hgrid.as_deref())?,
            out.format,
            out.output.clone(),
            "norms",
            json!({"alpha": alpha, "scheme": scheme, "tgrid": tgrid, "hgrid": hgrid}),
        ),
        Command::Table1 { scheme, out } => (
            cmd_table1(*scheme)?,
            out.format,
            out.output.clone(),
            "table1",
            json!({"scheme": scheme, "resolutions": TABLE1_RESOLUTIONS}),
        ),
        Command::Example1 {
            f,
            scheme,
            resolutions,
            out,
        } => (
            cmd_example1(*f, *scheme, resolutions)?,
            out.format,
            out.output.clone(),
            "example1",
            json!({"f": f, "scheme": scheme, "resolutions": resolutions}),
        ),
        Command::Consistency {
            alpha,
            scheme,
            resolutions,
            out,
        } => (
            cmd_consistency(*alpha, scheme, resolutions)?,
            out.format,
            out.output.clone(),
            "consistency",
            json!({"alpha": alpha, "scheme": scheme, "resolutions": resolutions}),
        ),
    })
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_precondition() {
        EXIT_PRECONDITION
    } else {
        EXIT_NUMERICAL
    }
}

fn write_outputs(
    text: &str,
    path: Option<&Path>,
    name: &str,
    params: Value,
    stdout: &mut dyn Write,
) -> std::io::Result<()> {
    match path {
        None => stdout.write_all(text.as_bytes()),
        Some(p) => {
            fs::write(p, text)?;
            let manifest = RunManifest::new(name, params, vec![p.display().to_string()]);
            let body = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
            fs::write(RunManifest::path_for(p), body + "\n")
        }
    }
}

/// Parses `args`, runs the command and returns the exit code. Output goes to
/// `stdout` unless `--output` is given; diagnostics go to `stderr`.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return if code == 0 {
                EXIT_OK
            } else {
                EXIT_PRECONDITION
            };
        }
    };
    let result = execute(&cli.command)
        .and_then(|(out, fmt, path, name, params)| Ok((out.render(fmt)?, path, name, params)));
    match result {
        Ok((text, path, name, params)) => {
            match write_outputs(&text, path.as_deref(), name, params, stdout) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    EXIT_PRECONDITION
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run() -> i32 {
    run_with(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
