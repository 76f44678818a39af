//! Command-line front end. The binary only parses arguments and maps the
//! outcome to an exit code; everything else lives here so it can be tested.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{sqrt_decompose, ExactRational};
use crate::averaged::{roe_r, roe_upper_bound_analytic};
use crate::bounds::{
    bound_report, easy_bound_floor, easy_bound_ratio, general_bound, lambda, lambda_bound,
    lambda_closed_form, nagata_holds, nagata_range_check, optimize_dr, small_n_exact, xu_threshold,
    BoundReport,
};
use crate::error::{Error, Result};
use crate::lattice::{easy_bound_certificate, lambda_certificate, nef_certificate, EasyVariant};
use crate::unloading::{roe_r_block_traced, roe_r_naive, state_diff, UnloadTrace};
use crate::verify::{self, Suite};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "fatpoint",
    version,
    about = "Exact lower bounds on the degree of plane curves through general fat points"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// lambda_n and ceil(m lambda_n)
    Lambda(LambdaArgs),
    /// The averaged constant r(n) and its analytic upper bound
    RoeR(RoeRArgs),
    /// Run the unloading algorithm for R(m, n)
    Unload(UnloadArgs),
    /// Every lower bound for one (m, n)
    Bound(BoundArgs),
    /// Grid of bounds as CSV or JSON
    Table(TableArgs),
    /// Compare ceil(m lambda_n) against m sqrt(n)
    Nagata(NagataArgs),
    /// Dump a divisor-lattice certificate
    Certificate(CertificateArgs),
    /// Run the invariant suites
    Verify(VerifyArgs),
}

/// An inclusive integer range written `A:B`, or a single value `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Range {
    pub start: u64,
    pub end: u64,
}

impl Range {
    pub fn iter(&self) -> std::ops::RangeInclusive<u64> {
        self.start..=self.end
    }
}

impl FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| format!("'{t}' is not a nonnegative integer"))
        };
        let (start, end) = match s.split_once(':') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if start > end {
            return Err(format!("empty range {start}:{end}"));
        }
        Ok(Range { start, end })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Naive,
    Block,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Column {
    EasyFloor,
    EasyRatio,
    Lambda,
    GeneralBest,
    #[value(name = "roe_R")]
    #[serde(rename = "roe_R")]
    RoeR,
    #[value(name = "r_n")]
    #[serde(rename = "r_n")]
    RN,
    Exact,
    Xu,
    Nagata,
}

impl Column {
    pub fn name(&self) -> &'static str {
        match self {
            Column::EasyFloor => "easy_floor",
            Column::EasyRatio => "easy_ratio",
            Column::Lambda => "lambda",
            Column::GeneralBest => "general_best",
            Column::RoeR => "roe_R",
            Column::RN => "r_n",
            Column::Exact => "exact",
            Column::Xu => "xu",
            Column::Nagata => "nagata",
        }
    }

    fn needs_n3(&self) -> bool {
        matches!(self, Column::RoeR | Column::RN)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Digits after the decimal point for approximate renderings
    #[arg(long, default_value_t = 6)]
    pub digits: u32,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct NSelect {
    #[arg(long, conflicts_with = "n_range")]
    pub n: Option<u64>,
    #[arg(long, value_name = "A:B")]
    pub n_range: Option<Range>,
}

#[derive(Debug, Clone, Args)]
pub struct MSelect {
    #[arg(long, conflicts_with = "m_range")]
    pub m: Option<u64>,
    #[arg(long, value_name = "A:B")]
    pub m_range: Option<Range>,
}

fn select(single: Option<u64>, range: Option<Range>, name: &str) -> Result<Option<Range>> {
    let r = match (single, range) {
        (Some(v), _) => Some(Range { start: v, end: v }),
        (None, r) => r,
    };
    if let Some(r) = r {
        if r.start == 0 {
            return Err(Error::Usage(format!("{name} must be positive")));
        }
    }
    Ok(r)
}

impl NSelect {
    fn required(&self) -> Result<Range> {
        select(self.n, self.n_range, "n")?
            .ok_or_else(|| Error::Usage("one of --n or --n-range is required".into()))
    }
}

impl MSelect {
    fn optional(&self) -> Result<Option<Range>> {
        select(self.m, self.m_range, "m")
    }

    fn required(&self) -> Result<Range> {
        self.optional()?
            .ok_or_else(|| Error::Usage("one of --m or --m-range is required".into()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct LambdaArgs {
    #[command(flatten)]
    pub n: NSelect,
    /// Also report ceil(m lambda_n)
    #[command(flatten)]
    pub m: MSelect,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RoeRArgs {
    #[command(flatten)]
    pub n: NSelect,
    #[command(flatten)]
    pub m: MSelect,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct UnloadArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum, default_value = "block")]
    pub engine: Engine,
    /// Print every step of every routine
    #[arg(long)]
    pub trace: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub m: MSelect,
    #[command(flatten)]
    pub n: NSelect,
    /// Comma-separated columns
    #[arg(long, value_enum, value_delimiter = ',', num_args = 0..)]
    pub columns: Vec<Column>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value_t = 6)]
    pub digits: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct NagataArgs {
    #[command(flatten)]
    pub m: MSelect,
    #[command(flatten)]
    pub n: NSelect,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertificateKind {
    /// The nef certificate behind lambda_n
    Lambda,
    /// A nef certificate for an explicit (d, r)
    Pair,
    /// Curve of degree floor(sqrt n) through floor(sqrt n)^2 points
    EasyA,
    /// Curve of degree ceil(sqrt n) through all n points
    EasyB,
}

#[derive(Debug, Clone, Args)]
pub struct CertificateArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum, default_value = "lambda")]
    pub kind: CertificateKind,
    /// Degree for --kind pair
    #[arg(long)]
    pub d: Option<u64>,
    /// Curve degree for --kind pair
    #[arg(long)]
    pub r: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "fast")]
    pub suite: String,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

/// Rendered output plus the exit status it implies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }
}

/// Exit status for an error: bad input is a usage error, anything that
/// means a computed result failed a check is a verification failure.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::EngineDisagreement { .. }
        | Error::LambdaNotAboveR { .. }
        | Error::CertificateCheck(_)
        | Error::Io { .. } => EXIT_FAILURE,
        _ => EXIT_USAGE,
    }
}

/// `p` for integers, otherwise `p/q (≈ decimal)`.
pub fn show_rational(q: &ExactRational, digits: u32) -> String {
    if q.is_integer() {
        q.to_string()
    } else {
        format!("{q} (≈ {})", q.to_decimal(digits))
    }
}

fn approx(q: &ExactRational, digits: u32) -> Value {
    json!({ "exact": q.to_string(), "approx": q.to_decimal(digits) })
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(SCHEMA_VERSION));
    }
    v
}

fn write_out(out: &Option<PathBuf>, body: String) -> Result<String> {
    match out {
        None => Ok(body),
        Some(path) => {
            fs::write(path, body).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            Ok(String::new())
        }
    }
}

fn csv_line(cells: &[String]) -> String {
    let mut line = cells.join(",");
    line.push('\n');
    line
}

pub fn run(cli: Cli) -> Outcome {
    let result = match cli.command {
        Command::Lambda(a) => cmd_lambda(&a).map(Outcome::ok),
        Command::RoeR(a) => cmd_roe_r(&a).map(Outcome::ok),
        Command::Unload(a) => cmd_unload(&a),
        Command::Bound(a) => cmd_bound(&a).map(Outcome::ok),
        Command::Table(a) => cmd_table(&a).map(Outcome::ok),
        Command::Nagata(a) => cmd_nagata(&a).map(Outcome::ok),
        Command::Certificate(a) => cmd_certificate(&a).map(Outcome::ok),
        Command::Verify(a) => cmd_verify(&a),
    };
    result.unwrap_or_else(|err| {
        let mut stderr = format!("error: {err}\n");
        if let Error::EngineDisagreement { diff, .. } = &err {
            stderr.push_str(diff);
        }
        Outcome {
            stdout: String::new(),
            stderr,
            code: exit_code(&err),
        }
    })
}

pub fn cmd_lambda(a: &LambdaArgs) -> Result<String> {
    let ns = a.n.required()?;
    let ms = a.m.optional()?;
    let digits = a.output.digits;
    let mut rows = Vec::new();
    for n in ns.iter() {
        let l = lambda(n)?;
        let bounds = match ms {
            Some(ms) => ms
                .iter()
                .map(|m| Ok((m, lambda_bound(m, n)?)))
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        rows.push((n, l, bounds));
    }
    let body = match a.output.format {
        Format::Text => {
            let mut s = String::new();
            for (n, l, bounds) in &rows {
                let _ = writeln!(s, "lambda_{n} = {}", show_rational(l, digits));
                for (m, b) in bounds {
                    let _ = writeln!(s, "  ceil({m} lambda_{n}) = {b}");
                }
            }
            s
        }
        Format::Csv => {
            let mut s = String::new();
            if ms.is_some() {
                s.push_str("n,lambda,m,lambda_bound\n");
                for (n, l, bounds) in &rows {
                    for (m, b) in bounds {
                        s.push_str(&csv_line(&[
                            n.to_string(),
                            l.to_string(),
                            m.to_string(),
                            b.to_string(),
                        ]));
                    }
                }
            } else {
                s.push_str("n,lambda\n");
                for (n, l, _) in &rows {
                    s.push_str(&csv_line(&[n.to_string(), l.to_string()]));
                }
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(n, l, bounds)| {
                    let mut row = json!({ "n": n, "lambda": approx(l, digits) });
                    if ms.is_some() {
                        row["bounds"] = bounds
                            .iter()
                            .map(|(m, b)| json!({ "m": m, "lambda_bound": b }))
                            .collect();
                    }
                    row
                })
                .collect();
            to_json(&with_schema(json!({ "rows": rows })))
        }
    };
    write_out(&a.output.out, body)
}

pub fn cmd_roe_r(a: &RoeRArgs) -> Result<String> {
    let ns = a.n.required()?;
    let ms = a.m.optional()?;
    let digits = a.output.digits;
    let mut rows = Vec::new();
    for n in ns.iter() {
        let r = roe_r(n)?;
        let analytic = roe_upper_bound_analytic(n, digits)?;
        let scaled = match ms {
            Some(ms) => ms
                .iter()
                .map(|m| (m, ExactRational::from(m) * &r))
                .collect(),
            None => Vec::new(),
        };
        rows.push((n, r, analytic, scaled));
    }
    let body = match a.output.format {
        Format::Text => {
            let mut s = String::new();
            for (n, r, analytic, scaled) in &rows {
                let _ = writeln!(s, "r({n}) = {}", show_rational(r, digits));
                let _ = writeln!(s, "  sqrt(n-1) - pi/8 + 1/sqrt(n-1) ≈ {analytic}");
                for (m, v) in scaled {
                    let _ = writeln!(s, "  {m} r({n}) = {}", show_rational(v, digits));
                }
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("n,r_n,analytic_bound");
            if ms.is_some() {
                s.push_str(",m,m_r_n");
            }
            s.push('\n');
            for (n, r, analytic, scaled) in &rows {
                let base = [n.to_string(), r.to_string(), format!("≈{analytic}")];
                if ms.is_some() {
                    for (m, v) in scaled {
                        let mut cells = base.to_vec();
                        cells.push(m.to_string());
                        cells.push(v.to_string());
                        s.push_str(&csv_line(&cells));
                    }
                } else {
                    s.push_str(&csv_line(&base));
                }
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(n, r, analytic, scaled)| {
                    let mut row = json!({
                        "n": n,
                        "r_n": approx(r, digits),
                        "analytic_bound_approx": analytic,
                    });
                    if ms.is_some() {
                        row["scaled"] = scaled
                            .iter()
                            .map(|(m, v)| json!({ "m": m, "m_r_n": approx(v, digits) }))
                            .collect();
                    }
                    row
                })
                .collect();
            to_json(&with_schema(json!({ "rows": rows })))
        }
    };
    write_out(&a.output.out, body)
}

fn fmt_ms(d: Duration) -> String {
    format!("{:.3} ms", d.as_secs_f64() * 1e3)
}

pub fn cmd_unload(a: &UnloadArgs) -> Result<Outcome> {
    if a.m == 0 {
        return Err(Error::Usage("m must be positive".into()));
    }
    if a.n < 3 {
        return Err(Error::Usage(format!("unload needs n >= 3, got {}", a.n)));
    }
    let (m, n) = (a.m, a.n);
    let mut timings: Vec<(&str, Duration)> = Vec::new();
    let mut value = None;
    let mut trace: Option<UnloadTrace> = None;

    let mut naive_run = None;
    if matches!(a.engine, Engine::Naive | Engine::Both) {
        let start = Instant::now();
        let run = roe_r_naive(m, n, a.trace)?;
        timings.push(("naive", start.elapsed()));
        value = Some(run.value);
        trace = run.trace.clone();
        naive_run = Some(run);
    }
    if matches!(a.engine, Engine::Block | Engine::Both) {
        let start = Instant::now();
        let (run, block_trace) = roe_r_block_traced(m, n)?;
        timings.push(("block", start.elapsed()));
        if let Some(naive) = &naive_run {
            let traces_differ = trace.as_ref().is_some_and(|t| *t != block_trace);
            if naive.value != run.value || naive.states != run.states || traces_differ {
                let mut diff = state_diff(&naive.states, &run.states);
                if traces_differ {
                    diff.push_str("step traces differ\n");
                }
                return Err(Error::EngineDisagreement {
                    m,
                    n,
                    naive: naive.value,
                    block: run.value,
                    diff,
                });
            }
        }
        value = Some(run.value);
        if a.trace && trace.is_none() {
            trace = Some(block_trace);
        }
    }
    let value = value.expect("at least one engine ran");
    let agree = a.engine == Engine::Both;

    let mut stderr = String::new();
    let body = match a.output.format {
        Format::Text | Format::Csv => {
            let mut s = String::new();
            if let Some(t) = &trace {
                s.push_str(&t.to_string());
            }
            let _ = writeln!(s, "R({m},{n}) = {value}");
            for (name, d) in &timings {
                let _ = writeln!(s, "{name} engine: {}", fmt_ms(*d));
            }
            if agree {
                s.push_str("engines agree\n");
            }
            s
        }
        Format::Json => {
            // Runtimes go to stderr so the JSON stays byte-identical.
            for (name, d) in &timings {
                let _ = writeln!(stderr, "{name} engine: {}", fmt_ms(*d));
            }
            let engines: Vec<&str> = timings.iter().map(|(e, _)| *e).collect();
            let mut v = json!({ "m": m, "n": n, "R": value, "engines": engines });
            if agree {
                v["engines_agree"] = json!(true);
            }
            if let Some(t) = &trace {
                v["trace"] = t.steps.iter().map(|s| json!(s.to_string())).collect();
            }
            to_json(&with_schema(v))
        }
    };
    Ok(Outcome {
        stdout: write_out(&a.output.out, body)?,
        stderr,
        code: EXIT_OK,
    })
}

fn report_text(r: &BoundReport, digits: u32) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "d({},{}) >= {}  [{}]", r.m, r.n, r.best, r.best_source);
    if let Some(v) = r.exact_small_n {
        let _ = writeln!(s, "  exact small-n        {v}");
    }
    let _ = writeln!(
        s,
        "  lambda               {}  (lambda_{} = {})",
        r.lambda_bound,
        r.n,
        show_rational(&r.lambda_value, digits)
    );
    let g = &r.general_best;
    let _ = writeln!(
        s,
        "  general (d, r)       {}  (d={}, r={}, nd/r = {})",
        g.bound,
        g.d,
        g.r,
        show_rational(&g.value, digits)
    );
    match r.roe_r {
        Some(v) => {
            let _ = writeln!(s, "  unloading R(m,n)     {v}");
        }
        None => {
            let _ = writeln!(s, "  unloading R(m,n)     n/a (needs n >= 3)");
        }
    }
    let _ = writeln!(
        s,
        "  easy mn/ceil(sqrt n) {}  ({})",
        r.easy_ratio.bound,
        show_rational(&r.easy_ratio.value, digits)
    );
    let _ = writeln!(s, "  easy m floor(sqrt n) {}", r.easy_floor);
    if let Some(x) = &r.xu_threshold {
        let _ = writeln!(
            s,
            "  Xu threshold         ≈ {x}  (reduced irreducible curves)"
        );
    }
    let _ = writeln!(
        s,
        "  best > m sqrt(n)     {}",
        if r.nagata_holds_at_best { "yes" } else { "no" }
    );
    s
}

pub fn cmd_bound(a: &BoundArgs) -> Result<String> {
    if a.m == 0 || a.n == 0 {
        return Err(Error::Usage("m and n must be positive".into()));
    }
    let digits = a.output.digits;
    let mut report = bound_report(a.m, a.n)?;
    if report.xu_threshold.is_some() {
        report.xu_threshold = Some(xu_threshold(a.m, a.n, digits)?);
    }
    let body = match a.output.format {
        Format::Text => report_text(&report, digits),
        Format::Csv => {
            let mut s = String::from("m,n,source,bound\n");
            for (src, v) in report.integer_bounds() {
                s.push_str(&csv_line(&[
                    a.m.to_string(),
                    a.n.to_string(),
                    json!(src).as_str().unwrap_or_default().to_string(),
                    v.to_string(),
                ]));
            }
            s
        }
        Format::Json => {
            let mut v = json!({ "report": report });
            v["approx"] = json!({
                "lambda_value": report.lambda_value.to_decimal(digits),
                "general_best_value": report.general_best.value.to_decimal(digits),
                "easy_ratio_value": report.easy_ratio.value.to_decimal(digits),
            });
            to_json(&with_schema(v))
        }
    };
    write_out(&a.output.out, body)
}

/// One table cell; `None` when the column is undefined at this `(m, n)`.
fn table_cell(col: Column, m: u64, n: u64, digits: u32) -> Result<Option<Value>> {
    Ok(Some(match col {
        Column::EasyFloor => json!(easy_bound_floor(m, n)?),
        Column::EasyRatio => json!(easy_bound_ratio(m, n)?.bound),
        Column::Lambda => json!(lambda_bound(m, n)?),
        Column::GeneralBest => {
            let (pair, _) = optimize_dr(n)?;
            json!(general_bound(m, n, pair)?)
        }
        Column::RoeR => json!(crate::unloading::roe_r_block(m, n)?.value),
        Column::RN => json!(roe_r(n)?.to_string()),
        Column::Exact => {
            if n > 9 {
                return Ok(None);
            }
            json!(small_n_exact(m, n)?)
        }
        Column::Xu => {
            if n < 2 {
                return Ok(None);
            }
            json!(format!("≈{}", xu_threshold(m, n, digits)?))
        }
        Column::Nagata => {
            let best = bound_report(m, n)?.best;
            json!(nagata_holds(best, m, n))
        }
    }))
}

fn cell_text(v: &Option<Value>) -> String {
    match v {
        None => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

pub fn cmd_table(a: &TableArgs) -> Result<String> {
    if a.columns.is_empty() {
        return Err(Error::Usage("table needs at least one column".into()));
    }
    let ms = a.m.required()?;
    let ns = a.n.required()?;
    if ns.start < 3 {
        if let Some(c) = a.columns.iter().find(|c| c.needs_n3()) {
            return Err(Error::Usage(format!("column {} needs n >= 3", c.name())));
        }
    }
    let names: Vec<&str> = a.columns.iter().map(Column::name).collect();
    let mut rows = Vec::new();
    for n in ns.iter() {
        for m in ms.iter() {
            let cells = a
                .columns
                .iter()
                .map(|&c| table_cell(c, m, n, a.digits))
                .collect::<Result<Vec<_>>>()?;
            rows.push((m, n, cells));
        }
    }
    let body = match a.format {
        Format::Csv | Format::Text => {
            let mut header = vec!["m".to_string(), "n".to_string()];
            header.extend(names.iter().map(|s| s.to_string()));
            let mut s = csv_line(&header);
            for (m, n, cells) in &rows {
                let mut line = vec![m.to_string(), n.to_string()];
                line.extend(cells.iter().map(cell_text));
                s.push_str(&csv_line(&line));
            }
            s
        }
        Format::Json => {
            let mut columns = vec!["m", "n"];
            columns.extend(&names);
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(m, n, cells)| {
                    let mut row = vec![json!(m), json!(n)];
                    row.extend(cells.into_iter().map(|c| c.unwrap_or(Value::Null)));
                    Value::Array(row)
                })
                .collect();
            to_json(&with_schema(json!({ "columns": columns, "rows": rows })))
        }
    };
    write_out(&a.out, body)
}

pub fn cmd_nagata(a: &NagataArgs) -> Result<String> {
    let ms = a.m.required()?;
    let ns = a.n.required()?;
    let mut rows = Vec::new();
    for n in ns.iter() {
        let dec = sqrt_decompose(n);
        // n = s^2 + s exactly when t = s
        let s_form = (dec.t == dec.s && dec.s >= 1).then_some(dec.s);
        for m in ms.iter() {
            let bound = lambda_bound(m, n)?;
            let holds = nagata_holds(bound, m, n);
            let (in_range, closed) = match s_form {
                Some(s) if s >= 3 => (
                    Some(nagata_range_check(s, m)?),
                    lambda_closed_form(m, s).ok(),
                ),
                Some(s) => (None, lambda_closed_form(m, s).ok()),
                None => (None, None),
            };
            rows.push((m, n, bound, holds, s_form, in_range, closed));
        }
    }
    let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    let body = match a.output.format {
        Format::Text => {
            let mut s = String::new();
            for (m, n, bound, holds, s_form, in_range, closed) in &rows {
                let rel = if *holds { ">" } else { "<=" };
                let _ = write!(s, "m={m} n={n}: ceil(m lambda_n) = {bound} {rel} m sqrt(n)");
                if let Some(sv) = s_form {
                    let _ = write!(s, "  [n = s^2+s, s={sv}");
                    if let Some(r) = in_range {
                        let _ = write!(s, ", guaranteed range: {}", if *r { "yes" } else { "no" });
                    }
                    if let Some(c) = closed {
                        let _ = write!(s, ", closed form {c}");
                    }
                    s.push(']');
                }
                s.push('\n');
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("m,n,lambda_bound,nagata,s,in_range,closed_form\n");
            for (m, n, bound, holds, s_form, in_range, closed) in &rows {
                s.push_str(&csv_line(&[
                    m.to_string(),
                    n.to_string(),
                    bound.to_string(),
                    holds.to_string(),
                    opt(*s_form),
                    in_range.map(|b| b.to_string()).unwrap_or_default(),
                    opt(*closed),
                ]));
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(m, n, bound, holds, s_form, in_range, closed)| {
                    json!({
                        "m": m, "n": n, "lambda_bound": bound, "nagata": holds,
                        "s": s_form, "in_range": in_range, "closed_form": closed,
                    })
                })
                .collect();
            to_json(&with_schema(json!({ "rows": rows })))
        }
    };
    write_out(&a.output.out, body)
}

pub fn cmd_certificate(a: &CertificateArgs) -> Result<String> {
    if a.n == 0 {
        return Err(Error::Usage("n must be positive".into()));
    }
    let digits = a.output.digits;
    let (value, text) = match a.kind {
        CertificateKind::Lambda | CertificateKind::Pair => {
            let cert = if a.kind == CertificateKind::Pair {
                let (Some(d), Some(r)) = (a.d, a.r) else {
                    return Err(Error::Usage("--kind pair needs --d and --r".into()));
                };
                nef_certificate(a.n, d, r)?
            } else {
                lambda_certificate(a.n)?
            };
            let mut t = String::new();
            let _ = writeln!(t, "nef certificate n={} d={} r={}", cert.n, cert.d, cert.r);
            let _ = writeln!(t, "  D = {}", cert.divisor);
            let _ = writeln!(t, "  C = {}", cert.curve);
            let _ = writeln!(
                t,
                "  D = sum of {} nonnegative terms:",
                cert.decomposition.terms().len()
            );
            for g in &cert.generators {
                let _ = writeln!(
                    t,
                    "    {} x {}  (D.{} = {})",
                    g.weight, g.generator, g.generator, g.pairing_with_d
                );
            }
            for c in &cert.checks {
                let _ = writeln!(
                    t,
                    "  {}: {} [{}]",
                    c.identity,
                    c.value,
                    if c.holds { "ok" } else { "FAIL" }
                );
            }
            let _ = writeln!(t, "  {}", cert.bound);
            let _ = writeln!(t, "  ratio = {}", show_rational(&cert.bound.ratio, digits));
            (json!({ "kind": "nef", "certificate": cert }), t)
        }
        CertificateKind::EasyA | CertificateKind::EasyB => {
            let variant = if a.kind == CertificateKind::EasyA {
                EasyVariant::A
            } else {
                EasyVariant::B
            };
            let cert = easy_bound_certificate(a.n, variant)?;
            let mut t = String::new();
            let _ = writeln!(
                t,
                "easy certificate n={} curve of degree {} through {} points",
                cert.n, cert.r, cert.points
            );
            let _ = writeln!(t, "  C = {}", cert.curve);
            let _ = writeln!(t, "  C.C = {}", cert.self_intersection);
            let _ = writeln!(t, "  {}", cert.bound);
            let _ = writeln!(t, "  ratio = {}", show_rational(&cert.bound.ratio, digits));
            (json!({ "kind": "easy", "certificate": cert }), t)
        }
    };
    let body = match a.output.format {
        Format::Json => to_json(&with_schema(value)),
        Format::Text => text,
        Format::Csv => {
            return Err(Error::Usage(
                "certificates support text or json only".into(),
            ))
        }
    };
    write_out(&a.output.out, body)
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let suite: Suite = a.suite.parse()?;
    let outcomes = verify::run(suite);
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    let stdout = match a.format {
        Format::Json => to_json(&with_schema(json!({
            "suite": suite,
            "passed": failed == 0,
            "checks": outcomes,
        }))),
        _ => {
            let mut s = String::new();
            for o in &outcomes {
                let status = if o.passed() { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    s,
                    "{status} {:<42} {:>8} cases {:>10}",
                    o.name,
                    o.cases,
                    fmt_ms(o.elapsed)
                );
                if let Some(f) = &o.failure {
                    let _ = writeln!(s, "     counterexample: {f}");
                }
            }
            let _ = writeln!(
                s,
                "{} suite: {} of {} checks passed",
                suite,
                outcomes.len() - failed,
                outcomes.len()
            );
            s
        }
    };
    Ok(Outcome {
        stdout,
        stderr: String::new(),
        code: if failed == 0 { EXIT_OK } else { EXIT_FAILURE },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("fatpoint").chain(args.iter().copied())).unwrap()
    }

    fn out(args: &[&str]) -> Outcome {
        run(parse(args))
    }

    #[test]
    fn ranges_parse() {
        assert_eq!("3:9".parse::<Range>().unwrap(), Range { start: 3, end: 9 });
        assert_eq!("4".parse::<Range>().unwrap(), Range { start: 4, end: 4 });
        assert!("9:3".parse::<Range>().is_err());
        assert!("a:3".parse::<Range>().is_err());
    }

    #[test]
    fn rationals_are_marked() {
        assert_eq!(
            show_rational(&ExactRational::frac(24, 7), 6),
            "24/7 (≈ 3.428571)"
        );
        assert_eq!(show_rational(&ExactRational::from(3u64), 6), "3");
    }

    #[test]
    fn bound_examples() {
        let o = out(&["bound", "--m", "1", "--n", "12"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.starts_with("d(1,12) >= 4"), "{}", o.stdout);
        assert!(o.stdout.contains("d=2, r=7, nd/r = 24/7"), "{}", o.stdout);

        let o = out(&["bound", "--m", "2", "--n", "7"]);
        assert!(
            o.stdout.starts_with("d(2,7) >= 6  [exact small-n]"),
            "{}",
            o.stdout
        );

        let o = out(&["bound", "--m", "1", "--n", "1"]);
        assert!(o.stdout.starts_with("d(1,1) >= 1"), "{}", o.stdout);

        let o = out(&["bound", "--m", "0", "--n", "4"]);
        assert_eq!(o.code, EXIT_USAGE);
    }

    #[test]
    fn bound_json_has_schema() {
        let o = out(&["bound", "--m", "1", "--n", "12", "--format", "json"]);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["report"]["best"], 4);
        assert_eq!(v["report"]["general_best"]["value"], "24/7");
    }

    #[test]
    fn unload_examples() {
        let o = out(&["unload", "--m", "2", "--n", "4", "--engine", "both"]);
        assert!(o.stdout.starts_with("R(2,4) = 4\n"), "{}", o.stdout);
        assert!(o.stdout.contains("engines agree"));

        let o = out(&[
            "unload", "--m", "10", "--n", "100", "--engine", "block", "--format", "json",
        ]);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        let r = v["R"].as_u64().unwrap();
        assert!((100..=102).contains(&r), "R = {r}");

        let o = out(&["unload", "--m", "1", "--n", "3", "--trace"]);
        let lines: Vec<&str> = o.stdout.lines().collect();
        assert_eq!(lines.len(), 4, "{}", o.stdout);
        assert!(lines[1].starts_with("i=2 j=1 R=2 "));
        assert_eq!(lines[2], "R(1,3) = 2");

        assert_eq!(out(&["unload", "--m", "1", "--n", "2"]).code, EXIT_USAGE);
    }

    #[test]
    fn table_examples() {
        let o = out(&[
            "table",
            "--m-range",
            "1:1",
            "--n-range",
            "3:9",
            "--columns",
            "exact,lambda",
        ]);
        assert_eq!(o.code, 0);
        let lines: Vec<&str> = o.stdout.lines().collect();
        assert_eq!(lines[0], "m,n,exact,lambda");
        assert_eq!(lines.len(), 8);
        for line in &lines[1..] {
            let f: Vec<u64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            assert!(f[2] >= f[3], "{line}");
        }

        let o = out(&[
            "table",
            "--m",
            "1",
            "--n-range",
            "10:12",
            "--columns",
            "lambda,roe_R",
        ]);
        let lines: Vec<&str> = o.stdout.lines().collect();
        assert_eq!(lines[0], "m,n,lambda,roe_R");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,10,3,"));

        let o = out(&["table", "--m", "1", "--n-range", "3:4", "--columns"]);
        assert_eq!(o.code, EXIT_USAGE);
        let o = out(&["table", "--m", "1", "--n-range", "2:4", "--columns", "r_n"]);
        assert_eq!(o.code, EXIT_USAGE);
    }

    #[test]
    fn table_is_deterministic() {
        let args = [
            "table",
            "--m-range",
            "1:3",
            "--n-range",
            "3:12",
            "--columns",
            "easy_floor,easy_ratio,lambda,general_best,roe_R,r_n,exact,xu,nagata",
            "--format",
            "json",
        ];
        let a = out(&args);
        assert_eq!(a, out(&args));
        let v: Value = serde_json::from_str(&a.stdout).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["rows"].as_array().unwrap().len(), 30);
    }

    #[test]
    fn verify_rejects_unknown_suite() {
        assert_eq!(out(&["verify", "--suite", "slow"]).code, EXIT_USAGE);
    }

    #[test]
    fn certificate_renders() {
        let o = out(&["certificate", "--n", "10", "--format", "json"]);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["certificate"]["d"], 3);
        assert_eq!(v["certificate"]["r"], 10);
        let o = out(&["certificate", "--n", "10", "--kind", "pair", "--d", "3"]);
        assert_eq!(o.code, EXIT_USAGE);
    }

    #[test]
    fn nagata_marks_s_form() {
        let o = out(&["nagata", "--m", "3", "--n", "12", "--format", "csv"]);
        assert_eq!(
            o.stdout,
            "m,n,lambda_bound,nagata,s,in_range,closed_form\n3,12,10,false,3,false,\n"
        );
    }
}
