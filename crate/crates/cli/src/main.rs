use std::fmt::Write as _;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use relfact_core::algebra::ConnectivityBundle;
use relfact_core::cluster::{factorized_dq, partition_function};
use relfact_core::io::{
    parse_decomposition, parse_graph, to_json, ClusterDoc, DistributionDoc, MatrixDoc, PolynomialDoc,
    ReliabilityReport,
};
use relfact_core::rational::format_rational;
use relfact_core::reliability::{
    factorized_with_bundle, joint_reliability, n2_closed_form, reliability_bruteforce, reliability_factoring,
    reliability_polynomial, state_distribution, Jobs, DEFAULT_ENUMERATION_BOUND,
};
use relfact_core::snf::smith_normal_form;
use relfact_core::{CutDecomposition, Error, OrderVariant, StochasticGraph};

mod verify;

#[derive(Parser)]
#[command(name = "relfact", version, about = "Exact K-terminal network reliability with boundary-cut factorization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reliability of a graph or decomposition by one route.
    Reliability(Opts),
    /// Factorized reliability of a decomposition with side reliabilities.
    Factor(Opts),
    /// Connectivity matrix, inverse, determinant and invariant factors.
    Conmatrix(Opts),
    /// Counts of K-pathsets by number of operative edges.
    Polynomial(Opts),
    /// Boundary state distributions of both sides of a decomposition.
    Distribution(Opts),
    /// Random cluster partition function.
    Rcm(Opts),
    /// Cross-check every route on a directory of fixtures.
    Verify(Opts),
}

#[derive(Args, Clone)]
pub(crate) struct Opts {
    /// Input JSON file (a directory for `verify`).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    route: Option<Route>,
    /// Boundary size for `conmatrix`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "canonical")]
    order: OrderArg,
    /// Worker threads: a positive count or `auto`.
    #[arg(long, default_value = "auto", value_parser = parse_jobs)]
    jobs: Jobs,
    /// Largest edge count for the enumeration routes.
    #[arg(long, env = "RELFACT_BOUND", default_value_t = DEFAULT_ENUMERATION_BOUND, value_parser = parse_bound)]
    bound: usize,
    /// Also run brute force on the union and compare.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value = "json")]
    output: Output,
    /// Include wall-clock timing in reports (breaks byte-identical output).
    #[arg(long)]
    timing: bool,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
enum Route {
    Bruteforce,
    Factoring,
    Factorized,
    Joint,
    N2,
}

impl Route {
    fn name(self) -> &'static str {
        match self {
            Route::Bruteforce => "bruteforce",
            Route::Factoring => "factoring",
            Route::Factorized => "factorized",
            Route::Joint => "joint",
            Route::N2 => "n2",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
enum OrderArg {
    Canonical,
    ReversedLevels,
}

impl From<OrderArg> for OrderVariant {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Canonical => OrderVariant::Canonical,
            OrderArg::ReversedLevels => OrderVariant::ReversedLevels,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
enum Output {
    Json,
    Text,
}

fn parse_jobs(s: &str) -> Result<Jobs, String> {
    if s == "auto" {
        return Ok(Jobs::Auto);
    }
    s.parse::<NonZeroUsize>().map(Jobs::Fixed).map_err(|_| format!("expected a positive integer or `auto`, got `{s}`"))
}

fn parse_bound(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(b) if b >= 1 => Ok(b),
        _ => Err(format!("expected a positive integer, got `{s}`")),
    }
}

/// Failure with its documented exit status. A cross-check mismatch (4) is
/// not a failure: the report is still printed, see [`Report::mismatch`].
#[derive(Debug)]
pub(crate) enum Failure {
    /// Malformed input or arguments: 2.
    Input(String),
    /// Semantic validation failure: 3.
    Invalid(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Invalid(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Invalid(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::PartitionSizeOutOfBounds(..) => Failure::Input(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

pub(crate) enum Input {
    Graph(StochasticGraph),
    Decomposition(CutDecomposition),
}

pub(crate) fn load(path: &Path) -> Outcome<Input> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: malformed JSON: {e}", path.display())))?;
    let with_path = |e: Error| -> Failure {
        match Failure::from(e) {
            Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
            Failure::Invalid(m) => Failure::Invalid(format!("{}: {m}", path.display())),
        }
    };
    if value.get("g1").is_some() {
        Ok(Input::Decomposition(parse_decomposition(&text).map_err(with_path)?))
    } else {
        Ok(Input::Graph(parse_graph(&text).map_err(with_path)?))
    }
}

fn input_path(opts: &Opts) -> Outcome<&Path> {
    opts.input.as_deref().ok_or_else(|| Failure::Input("--input is required".into()))
}

fn need_decomposition(input: Input, what: &str) -> Outcome<CutDecomposition> {
    match input {
        Input::Decomposition(d) => Ok(d),
        Input::Graph(_) => Err(Failure::Invalid(format!("{what} needs a decomposition input (g1, g2, boundary)"))),
    }
}

/// A rendered result: the JSON document and its text form.
struct Report {
    json: Value,
    text: String,
    /// Set after printing to signal a cross-check failure.
    mismatch: Option<String>,
}

impl Report {
    fn new(json: Value, text: String) -> Self {
        Report { json, text, mismatch: None }
    }
}

fn report_text(r: &ReliabilityReport) -> String {
    let mut t = format!("reliability: {}\nroute: {}\n", r.reliability, r.route);
    if let Some(n) = r.n {
        let _ = writeln!(t, "n: {n}");
    }
    if let Some(sides) = &r.side_reliabilities {
        for (name, side) in [("g1", &sides.g1), ("g2", &sides.g2)] {
            for (state, v) in side {
                let _ = writeln!(t, "{name}[{state}]: {v}");
            }
        }
    }
    if let (Some(order), Some(b)) = (&r.order, &r.b) {
        let _ = writeln!(t, "order: {}", order.join(" "));
        for row in b {
            let _ = writeln!(t, "b: {}", row.join(" "));
        }
    }
    if let Some(v) = r.verified {
        let _ = writeln!(t, "verified: {v}");
    }
    if let Some(w) = &r.warning {
        let _ = writeln!(t, "warning: {w}");
    }
    if let Some(ms) = r.timing_ms {
        let _ = writeln!(t, "timing_ms: {ms:.3}");
    }
    t
}

fn finish(mut r: ReliabilityReport, started: Instant, opts: &Opts) -> Report {
    if opts.timing {
        r.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    Report::new(serde_json::to_value(&r).expect("report serializes"), report_text(&r))
}

fn reliability_of_union(d: &CutDecomposition, route: Route, bound: usize) -> Outcome<ReliabilityReport> {
    match d.validate() {
        Ok(v) => {
            let value = match route {
                Route::Bruteforce => reliability_bruteforce(&v.union, bound)?,
                _ => reliability_factoring(&v.union),
            };
            Ok(ReliabilityReport::plain(&value, route.name()))
        }
        Err(e @ Error::UnreachableTerminal(_)) => {
            let mut r = ReliabilityReport::plain(&relfact_core::rational::int(0), route.name());
            r.warning = Some(e.to_string());
            Ok(r)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_reliability(opts: &Opts) -> Outcome<Report> {
    let started = Instant::now();
    let input = load(input_path(opts)?)?;
    let report = match input {
        Input::Graph(g) => {
            let route = opts.route.unwrap_or(Route::Factoring);
            let value = match route {
                Route::Bruteforce => reliability_bruteforce(&g, opts.bound)?,
                Route::Factoring => reliability_factoring(&g),
                other => {
                    return Err(Failure::Invalid(format!("route `{}` needs a decomposition input", other.name())));
                }
            };
            let mut r = ReliabilityReport::plain(&value, route.name());
            if !g.is_k_connected() {
                r.warning = Some("terminals are not connected even with every edge operative; reliability is 0".into());
            }
            r
        }
        Input::Decomposition(d) => match opts.route.unwrap_or(Route::Factorized) {
            route @ (Route::Bruteforce | Route::Factoring) => reliability_of_union(&d, route, opts.bound)?,
            Route::Factorized => {
                let bundle = ConnectivityBundle::new(d.n().max(1), opts.order.into())?;
                ReliabilityReport::factorized(&factorized_with_bundle(&d, &bundle, opts.jobs)?)
            }
            Route::Joint => match d.validate() {
                Ok(_) => {
                    let p1 = state_distribution(&d.g1, &d.boundary, opts.bound)?;
                    let p2 = state_distribution(&d.g2, &d.boundary, opts.bound)?;
                    let mut r = ReliabilityReport::plain(&joint_reliability(&p1, &p2)?, "joint");
                    r.n = Some(d.n());
                    r
                }
                Err(Error::UnreachableTerminal(_)) => reliability_of_union(&d, Route::Joint, opts.bound)?,
                Err(e) => return Err(e.into()),
            },
            Route::N2 => {
                let mut r = ReliabilityReport::plain(&n2_closed_form(&d)?, "n2");
                r.n = Some(2);
                if let Err(e @ Error::UnreachableTerminal(_)) = d.validate() {
                    r.warning = Some(e.to_string());
                }
                r
            }
        },
    };
    Ok(finish(report, started, opts))
}

fn cmd_factor(opts: &Opts) -> Outcome<Report> {
    let started = Instant::now();
    let d = need_decomposition(load(input_path(opts)?)?, "factor")?;
    let bundle = ConnectivityBundle::new(d.n().max(1), opts.order.into())?;
    let f = factorized_with_bundle(&d, &bundle, opts.jobs)?;
    let mut r = ReliabilityReport::factorized(&f).with_matrix(&bundle);
    let mut mismatch = None;
    if opts.verify {
        let brute = reliability_bruteforce(&d.union_graph(), opts.bound)?;
        let ok = brute == f.reliability;
        r.verified = Some(ok);
        if !ok {
            mismatch = Some(format!(
                "factorized {} != brute force {}",
                format_rational(&f.reliability),
                format_rational(&brute)
            ));
        }
    }
    let mut out = finish(r, started, opts);
    out.mismatch = mismatch;
    Ok(out)
}

fn cmd_conmatrix(opts: &Opts) -> Outcome<Report> {
    let n = opts.n.ok_or_else(|| Failure::Input("--n is required".into()))?;
    let bundle = ConnectivityBundle::new(n, opts.order.into())?;
    let det = bundle.a.determinant()?;
    let snf = smith_normal_form(&bundle.a)?;
    let doc = MatrixDoc::new(&bundle, &det, &snf);
    let mut text = format!("n: {n}\norder: {}\n", doc.order.join(" "));
    for row in &doc.a {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        let _ = writeln!(text, "A: {}", cells.join(" "));
    }
    for row in &doc.a_inv {
        let _ = writeln!(text, "A_inv: {}", row.join(" "));
    }
    let _ = writeln!(text, "det: {}", doc.det);
    let _ = writeln!(text, "invariant_factors: {}", snf.nontrivial().iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
    for [p, k, m] in &doc.torsion_prime_powers {
        let _ = writeln!(text, "torsion: Z_{}^{m} ({p}^{k})", p.pow(*k as u32));
    }
    Ok(Report::new(serde_json::to_value(&doc).expect("matrix serializes"), text))
}

fn graph_of(input: Input) -> StochasticGraph {
    match input {
        Input::Graph(g) => g,
        Input::Decomposition(d) => d.union_graph(),
    }
}

fn cmd_polynomial(opts: &Opts) -> Outcome<Report> {
    let g = graph_of(load(input_path(opts)?)?);
    let doc = PolynomialDoc::from(&reliability_polynomial(&g, opts.bound)?);
    let text = format!("edges: {}\ncounts: {}\npower_basis: {}\n", doc.edges, doc.counts.join(" "), doc.power_basis.join(" "));
    Ok(Report::new(serde_json::to_value(&doc).expect("polynomial serializes"), text))
}

fn cmd_distribution(opts: &Opts) -> Outcome<Report> {
    let d = need_decomposition(load(input_path(opts)?)?, "distribution")?;
    let p1 = state_distribution(&d.g1, &d.boundary, opts.bound)?;
    let p2 = state_distribution(&d.g2, &d.boundary, opts.bound)?;
    let joint = joint_reliability(&p1, &p2)?;
    let (d1, d2) = (DistributionDoc::new("g1", &p1), DistributionDoc::new("g2", &p2));
    let mut text = String::new();
    for doc in [&d1, &d2] {
        for (state, p) in &doc.probs {
            let _ = writeln!(text, "{}[{state}]: {p}", doc.side);
        }
        let _ = writeln!(text, "{}[stranded]: {}", doc.side, doc.stranded);
    }
    let _ = writeln!(text, "joint_reliability: {}", format_rational(&joint));
    let json = json!({
        "n": d.n(),
        "boundary": d.boundary.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "g1": d1,
        "g2": d2,
        "joint_reliability": format_rational(&joint),
    });
    Ok(Report::new(json, text))
}

fn cmd_rcm(opts: &Opts) -> Outcome<Report> {
    let input = load(input_path(opts)?)?;
    let (g, factorized) = match input {
        Input::Graph(g) => (g, None),
        Input::Decomposition(d) => {
            let bundle = ConnectivityBundle::new(d.n().max(1), opts.order.into())?;
            let f = factorized_dq(&d, &bundle, opts.bound, opts.jobs)?;
            (d.union_graph(), Some(f))
        }
    };
    let doc = ClusterDoc::from(&partition_function(&g, opts.bound)?);
    let mut text = String::new();
    for (k, w) in &doc.z {
        let _ = writeln!(text, "Z[q^{k}]: {w}");
    }
    let _ = writeln!(text, "dZdq_at_0: {}", doc.dz_dq_at_0);
    let mut json = serde_json::to_value(&doc).expect("cluster doc serializes");
    let mut mismatch = None;
    if let Some(f) = factorized {
        let f = format_rational(&f);
        let _ = writeln!(text, "factorized_dZdq_at_0: {f}");
        if f != doc.dz_dq_at_0 {
            mismatch = Some(format!("factorized derivative {f} != {}", doc.dz_dq_at_0));
        }
        json["factorized_dZdq_at_0"] = Value::String(f);
    }
    Ok(Report { json, text, mismatch })
}

fn run(cli: &Cli) -> Outcome<Report> {
    match &cli.command {
        Command::Reliability(o) => cmd_reliability(o),
        Command::Factor(o) => cmd_factor(o),
        Command::Conmatrix(o) => cmd_conmatrix(o),
        Command::Polynomial(o) => cmd_polynomial(o),
        Command::Distribution(o) => cmd_distribution(o),
        Command::Rcm(o) => cmd_rcm(o),
        Command::Verify(o) => verify::cmd_verify(o).map(|(json, text, mismatch)| Report { json, text, mismatch }),
    }
}

fn output_of(cli: &Cli) -> Output {
    match &cli.command {
        Command::Reliability(o)
        | Command::Factor(o)
        | Command::Conmatrix(o)
        | Command::Polynomial(o)
        | Command::Distribution(o)
        | Command::Rcm(o)
        | Command::Verify(o) => o.output,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match output_of(&cli) {
                Output::Json => println!("{}", to_json(&report.json)),
                Output::Text => print!("{}", report.text),
            }
            if let Some(w) = report.json.get("warning").and_then(Value::as_str) {
                eprintln!("warning: {w}");
            }
            match report.mismatch {
                Some(m) => {
                    eprintln!("error: verification failed: {m}");
                    ExitCode::from(4)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
