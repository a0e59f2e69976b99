//! `relfact verify`: every applicable route on every fixture, compared
//! exactly against the factoring value.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use relfact_core::algebra::ConnectivityBundle;
use relfact_core::cluster::{factorized_dq, partition_function};
use relfact_core::rational::format_rational;
use relfact_core::reliability::{
    factorized_with_bundle, joint_reliability, n2_closed_form, reliability_bruteforce, reliability_factoring,
    reliability_polynomial, state_distribution,
};
use relfact_core::{CutDecomposition, Error, OrderVariant, Rational, StochasticGraph};

use crate::{load, Failure, Input, Opts};

struct Check {
    name: String,
    value: Option<Rational>,
    note: Option<String>,
}

impl Check {
    fn value(name: &str, v: Rational) -> Self {
        Check { name: name.into(), value: Some(v), note: None }
    }

    fn skipped(name: &str, why: String) -> Self {
        Check { name: name.into(), value: None, note: Some(why) }
    }
}

/// Runs a route that may exceed the enumeration bound.
fn bounded(name: &str, r: Result<Rational, Error>) -> Result<Check, Failure> {
    match r {
        Ok(v) => Ok(Check::value(name, v)),
        Err(e @ Error::EnumerationBound { .. }) => Ok(Check::skipped(name, e.to_string())),
        Err(e) => Err(e.into()),
    }
}

fn graph_checks(g: &StochasticGraph, opts: &Opts) -> Result<(Rational, Vec<Check>), Failure> {
    let reference = reliability_factoring(g);
    let mut checks = vec![bounded("bruteforce", reliability_bruteforce(g, opts.bound))?];
    let probs: Vec<&Rational> = g.edges().iter().map(|e| &e.prob).collect();
    if let Some(&p) = probs.first() {
        if probs.iter().all(|q| *q == p) {
            checks.push(bounded("polynomial", reliability_polynomial(g, opts.bound).map(|poly| poly.evaluate(p)))?);
        }
    }
    if g.nodes() == g.terminals() && g.nodes().len() > 1 {
        match partition_function(g, opts.bound) {
            Ok(z) => checks.push(Check::value("rcm_w1", z.dq_at_zero())),
            Err(Error::DisconnectedGraph) => {}
            Err(e) => checks.push(bounded("rcm_w1", Err(e))?),
        }
    }
    Ok((reference, checks))
}

fn decomposition_checks(d: &CutDecomposition, opts: &Opts) -> Result<(Rational, Vec<Check>), Failure> {
    let hypothesis_ok = match d.validate() {
        Ok(_) => true,
        Err(Error::UnreachableTerminal(_)) => false,
        Err(e) => return Err(e.into()),
    };
    let union = d.union_graph();
    let reference = reliability_factoring(&union);
    let mut checks = vec![bounded("bruteforce", reliability_bruteforce(&union, opts.bound))?];
    for (name, variant) in [("factorized", OrderVariant::Canonical), ("factorized_reversed", OrderVariant::ReversedLevels)] {
        let bundle = ConnectivityBundle::new(d.n(), variant)?;
        checks.push(Check::value(name, factorized_with_bundle(d, &bundle, opts.jobs)?.reliability));
    }
    if hypothesis_ok {
        let joint = state_distribution(&d.g1, &d.boundary, opts.bound).and_then(|p1| {
            let p2 = state_distribution(&d.g2, &d.boundary, opts.bound)?;
            joint_reliability(&p1, &p2)
        });
        checks.push(bounded("joint", joint)?);
    }
    if d.n() == 2 {
        checks.push(Check::value("n2", n2_closed_form(d)?));
    }
    let all_terminal = [&d.g1, &d.g2].iter().all(|g| g.nodes() == g.terminals());
    if all_terminal && hypothesis_ok {
        let bundle = ConnectivityBundle::new(d.n(), OrderVariant::Canonical)?;
        match partition_function(&union, opts.bound) {
            Ok(z) => {
                checks.push(Check::value("rcm_w1", z.dq_at_zero()));
                checks.push(bounded("rcm_factorized", factorized_dq(d, &bundle, opts.bound, opts.jobs))?);
            }
            Err(Error::DisconnectedGraph) => {}
            Err(e) => checks.push(bounded("rcm_w1", Err(e))?),
        }
    }
    Ok((reference, checks))
}

fn fixtures(root: &Path) -> Result<Vec<PathBuf>, Failure> {
    if root.is_file() {
        return Ok(vec![root.to_path_buf()]);
    }
    let entries = std::fs::read_dir(root).map_err(|e| Failure::Input(format!("{}: {e}", root.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

pub(crate) fn cmd_verify(opts: &Opts) -> Result<(Value, String, Option<String>), Failure> {
    let root = opts.input.as_deref().unwrap_or(Path::new("fixtures"));
    let mut docs = Vec::new();
    let mut text = String::new();
    let mut failures = Vec::new();
    for path in fixtures(root)? {
        let name = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        let (reference, checks) = match load(&path)? {
            Input::Graph(g) => graph_checks(&g, opts)?,
            Input::Decomposition(d) => decomposition_checks(&d, opts)?,
        };
        let reference_text = format_rational(&reference);
        let _ = writeln!(text, "{name}: factoring = {reference_text}");
        let mut rows = Vec::new();
        for c in &checks {
            let (status, shown) = match &c.value {
                Some(v) if *v == reference => ("PASS", format_rational(v)),
                Some(v) => {
                    failures.push(format!("{name}: {} = {} (expected {reference_text})", c.name, format_rational(v)));
                    ("FAIL", format_rational(v))
                }
                None => ("SKIP", c.note.clone().unwrap_or_default()),
            };
            let _ = writeln!(text, "  {status} {}: {shown}", c.name);
            rows.push(json!({ "route": c.name, "status": status, "value": shown }));
        }
        docs.push(json!({ "fixture": name, "reliability": reference_text, "checks": rows }));
    }
    let ok = failures.is_empty();
    let _ = writeln!(text, "{}", if ok { "all routes agree" } else { "MISMATCH" });
    let json = json!({ "ok": ok, "fixtures": docs });
    Ok((json, text, (!ok).then(|| failures.join("; "))))
}
