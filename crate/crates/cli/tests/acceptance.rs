//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p relfact-cli --test acceptance -- --nocapture` to
//! see the report; the test fails if any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;

use relfact_core::algebra::{connectivity_number, det_orbit_formula, expected_connectivity_magnitude, factorial, ConnectivityBundle};
use relfact_core::cluster::{factorized_dq, partition_function};
use relfact_core::corpus::{corpus, CorpusConfig};
use relfact_core::matrix::rational_inverse_oracle;
use relfact_core::partition::{all_partitions, orbits};
use relfact_core::rational::rat;
use relfact_core::reliability::{
    factorized_with_bundle, gamma_graph, joint_reliability, n2_closed_form, reliability_bruteforce,
    reliability_factoring, reliability_polynomial, state_distribution, Jobs, DEFAULT_ENUMERATION_BOUND as BOUND,
};
use relfact_core::snf::smith_normal_form;
use relfact_core::{CutDecomposition, OrderVariant, Partition, Rational};

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bundle(n: usize) -> ConnectivityBundle {
    ConnectivityBundle::new(n, OrderVariant::Canonical).unwrap()
}

/// Compares `expected` (given in `labels` order, scaled by `1/scale`) with
/// `actual` (in the bundle's order) entry by entry through label lookup.
fn compare_by_label(
    what: &str,
    b: &ConnectivityBundle,
    labels: &[&str],
    expected: &[Vec<i64>],
    scale: i64,
    actual: impl Fn(usize, usize) -> Rational,
) -> Result<(), String> {
    let idx: Vec<usize> = labels
        .iter()
        .map(|l| b.order.index_of(&l.parse::<Partition>().unwrap()).ok_or_else(|| format!("{what}: unknown state {l}")))
        .collect::<Result<_, _>>()?;
    for (i, row) in expected.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let got = actual(idx[i], idx[j]);
            ensure(got == rat(v, scale), || {
                format!("{what}[{}, {}] = {got}, expected {v}/{scale}", labels[i], labels[j])
            })?;
        }
    }
    Ok(())
}

const N3_LABELS: [&str; 5] = ["1|2|3", "1|23", "13|2", "12|3", "123"];
const N4_LABELS: [&str; 15] = [
    "1|2|3|4", "1|2|34", "1|24|3", "14|2|3", "1|23|4", "13|2|4", "12|3|4", "14|23", "13|24", "12|34", "1|234", "134|2",
    "124|3", "123|4", "1234",
];

fn n4_a() -> Vec<Vec<i64>> {
    vec![
        vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
        vec![0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 1, 1, 1],
        vec![0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 1],
        vec![0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 0, 0, 1, 1],
        vec![0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 1, 1, 0, 1],
        vec![0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 1, 0, 1, 0, 1],
        vec![0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 1, 1, 0, 0, 1],
        vec![0, 1, 1, 0, 0, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1],
        vec![0, 1, 0, 1, 1, 0, 1, 1, 0, 1, 1, 1, 1, 1, 1],
        vec![0, 0, 1, 1, 1, 1, 0, 1, 1, 0, 1, 1, 1, 1, 1],
        vec![0, 0, 0, 1, 0, 1, 1, 1, 1, 1, 0, 1, 1, 1, 1],
        vec![0, 0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 0, 1, 1, 1],
        vec![0, 1, 0, 0, 1, 1, 0, 1, 1, 1, 1, 1, 0, 1, 1],
        vec![0, 1, 1, 1, 0, 0, 0, 1, 1, 1, 1, 1, 1, 0, 1],
        vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    ]
}

/// `6 · A⁻¹` for n = 4.
fn n4_a_inv_times_6() -> Vec<Vec<i64>> {
    vec![
        vec![-1, 1, 1, 1, 1, 1, 1, -1, -1, -1, -2, -2, -2, -2, 6],
        vec![1, 2, -1, -1, -1, -1, -1, 1, 1, -2, -1, -1, 2, 2, 0],
        vec![1, -1, 2, -1, -1, -1, -1, 1, -2, 1, -1, 2, -1, 2, 0],
        vec![1, -1, -1, 2, -1, -1, -1, -2, 1, 1, 2, -1, -1, 2, 0],
        vec![1, -1, -1, -1, 2, -1, -1, -2, 1, 1, -1, 2, 2, -1, 0],
        vec![1, -1, -1, -1, -1, 2, -1, 1, -2, 1, 2, -1, 2, -1, 0],
        vec![1, -1, -1, -1, -1, -1, 2, 1, 1, -2, 2, 2, -1, -1, 0],
        vec![-1, 1, 1, -2, -2, 1, 1, -1, -1, -1, 1, 1, 1, 1, 0],
        vec![-1, 1, -2, 1, 1, -2, 1, -1, -1, -1, 1, 1, 1, 1, 0],
        vec![-1, -2, 1, 1, 1, 1, -2, -1, -1, -1, 1, 1, 1, 1, 0],
        vec![-2, -1, -1, 2, -1, 2, 2, 1, 1, 1, -1, -1, -1, -1, 0],
        vec![-2, -1, 2, -1, 2, -1, 2, 1, 1, 1, -1, -1, -1, -1, 0],
        vec![-2, 2, -1, -1, 2, 2, -1, 1, 1, 1, -1, -1, -1, -1, 0],
        vec![-2, 2, 2, 2, -1, -1, -1, 1, 1, 1, -1, -1, -1, -1, 0],
        vec![6, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    ]
}

fn criterion_1() -> Verdict {
    let b2 = bundle(2);
    let l2 = ["1|2", "12"];
    compare_by_label("n=2 A", &b2, &l2, &[vec![0, 1], vec![1, 1]], 1, |i, j| b2.a[(i, j)].clone().into())?;
    compare_by_label("n=2 A_inv", &b2, &l2, &[vec![-1, 1], vec![1, 0]], 1, |i, j| b2.a_inv[(i, j)].clone())?;

    let b3 = bundle(3);
    let a3 = vec![
        vec![0, 0, 0, 0, 1],
        vec![0, 0, 1, 1, 1],
        vec![0, 1, 0, 1, 1],
        vec![0, 1, 1, 0, 1],
        vec![1, 1, 1, 1, 1],
    ];
    let a3_inv_times_2 = vec![
        vec![1, -1, -1, -1, 2],
        vec![-1, -1, 1, 1, 0],
        vec![-1, 1, -1, 1, 0],
        vec![-1, 1, 1, -1, 0],
        vec![2, 0, 0, 0, 0],
    ];
    let b3_factor = vec![
        vec![1, 0, 0, 0, 0],
        vec![-1, 1, 0, 0, 0],
        vec![-1, 0, 1, 0, 0],
        vec![-1, 0, 0, 1, 0],
        vec![2, -1, -1, -1, 1],
    ];
    let d3_factor = vec![
        vec![1, -1, -1, -1, 2],
        vec![0, 1, 0, 0, -1],
        vec![0, 0, 1, 0, -1],
        vec![0, 0, 0, 1, -1],
        vec![0, 0, 0, 0, 1],
    ];
    // C = diag(1/2, -1, -1, -1, 1), written as 2·C.
    let c3_times_2 = (0..5)
        .map(|i| (0..5).map(|j| if i != j { 0 } else { [1, -2, -2, -2, 2][i] }).collect())
        .collect::<Vec<Vec<i64>>>();
    let c = b3.c();
    compare_by_label("n=3 A", &b3, &N3_LABELS, &a3, 1, |i, j| b3.a[(i, j)].clone().into())?;
    compare_by_label("n=3 A_inv", &b3, &N3_LABELS, &a3_inv_times_2, 2, |i, j| b3.a_inv[(i, j)].clone())?;
    compare_by_label("n=3 B", &b3, &N3_LABELS, &b3_factor, 1, |i, j| b3.b[(i, j)].clone().into())?;
    compare_by_label("n=3 C", &b3, &N3_LABELS, &c3_times_2, 2, |i, j| c[(i, j)].clone())?;
    compare_by_label("n=3 D", &b3, &N3_LABELS, &d3_factor, 1, |i, j| b3.d[(i, j)].clone().into())?;

    let b4 = bundle(4);
    compare_by_label("n=4 A", &b4, &N4_LABELS, &n4_a(), 1, |i, j| b4.a[(i, j)].clone().into())?;
    compare_by_label("n=4 A_inv", &b4, &N4_LABELS, &n4_a_inv_times_6(), 6, |i, j| b4.a_inv[(i, j)].clone())?;
    Ok("n=2, n=3 (A, A_inv, B, C, D) and n=4 (A, A_inv) match entry for entry".into())
}

fn criterion_2() -> Verdict {
    let abs_det = |n: usize| bundle(n).abs_det().unwrap();
    ensure(abs_det(3) == BigInt::from(2), || format!("n=3: |det| = {}", abs_det(3)))?;
    ensure(det_orbit_formula(3).unwrap() == BigInt::from(2), || "n=3 orbit formula".into())?;
    ensure(abs_det(4) == BigInt::from(384), || format!("n=4: |det| = {}", abs_det(4)))?;
    // (orbit size, block count) for n = 5
    let table = [(1, 5), (10, 4), (15, 3), (10, 3), (5, 2), (10, 2), (1, 1)];
    let expected: BigInt = table.iter().map(|&(size, m)| num_traits::pow(factorial(m - 1), size)).product();
    let d5 = abs_det(5);
    ensure(d5 == expected, || format!("n=5: |det| = {d5}, expected {expected}"))?;
    ensure(det_orbit_formula(5).unwrap() == expected, || "n=5 orbit formula".into())?;
    Ok(format!("|det A| = 2, 384, {expected}"))
}

/// (prime, exponent) pairs with multiplicity, one list per prime.
type PrimePowers = &'static [&'static [(u64, usize)]];

fn criterion_3() -> Verdict {
    let cases: [(usize, PrimePowers); 3] = [
        (3, &[&[(2, 1)]]),
        (4, &[&[(6, 1), (2, 6)], &[(3, 1), (2, 7)]]),
        (5, &[&[(24, 1), (6, 10), (2, 25)], &[(8, 1), (3, 11), (2, 35)]]),
    ];
    let mut shown = Vec::new();
    for (n, groups) in cases {
        let snf = smith_normal_form(&bundle(n).a).map_err(|e| e.to_string())?;
        for g in groups {
            ensure(snf.matches_group(g), || format!("n={n}: torsion {:?} does not match {g:?}", snf.torsion_prime_powers))?;
        }
        shown.push(format!("n={n}: {:?}", snf.prime_power_triples()));
    }
    Ok(shown.join("; "))
}

fn criterion_4() -> Verdict {
    for n in 2..=5 {
        let b = bundle(n);
        let bcd = b.b.to_rational().mul(&b.c()).mul(&b.d.to_rational());
        let oracle = rational_inverse_oracle(&b.a).map_err(|e| e.to_string())?;
        ensure(bcd == oracle, || format!("n={n}: B·C·D differs from the elimination inverse"))?;
        ensure(b.a_inv == oracle, || format!("n={n}: stored inverse differs from the elimination inverse"))?;
    }
    Ok("B·C·D equals the elimination inverse for n = 2..5".into())
}

const PER_N: usize = 100;

struct Routes {
    brute: Rational,
    factoring: Rational,
    factorized: Rational,
    reversed: Rational,
    joint: Rational,
    n2: Option<Rational>,
}

fn routes(d: &CutDecomposition, canonical: &ConnectivityBundle, reversed: &ConnectivityBundle) -> Routes {
    let union = d.validate().unwrap().union;
    let p1 = state_distribution(&d.g1, &d.boundary, BOUND).unwrap();
    let p2 = state_distribution(&d.g2, &d.boundary, BOUND).unwrap();
    Routes {
        brute: reliability_bruteforce(&union, BOUND).unwrap(),
        factoring: reliability_factoring(&union),
        factorized: factorized_with_bundle(d, canonical, Jobs::sequential()).unwrap().reliability,
        reversed: factorized_with_bundle(d, reversed, Jobs::sequential()).unwrap().reliability,
        joint: joint_reliability(&p1, &p2).unwrap(),
        n2: (d.n() == 2).then(|| n2_closed_form(d).unwrap()),
    }
}

/// Criteria 5, 6 and 8 share one pass over the corpus.
fn corpus_results() -> BTreeMap<usize, Vec<Routes>> {
    let cfg = CorpusConfig::default();
    (1..=4)
        .map(|n| {
            let canonical = ConnectivityBundle::new(n, OrderVariant::Canonical).unwrap();
            let reversed = ConnectivityBundle::new(n, OrderVariant::ReversedLevels).unwrap();
            let rs = corpus(n, PER_N, &cfg).par_iter().map(|d| routes(d, &canonical, &reversed)).collect();
            (n, rs)
        })
        .collect()
}

fn criterion_5(results: &BTreeMap<usize, Vec<Routes>>) -> Verdict {
    for (n, rs) in results {
        ensure(rs.len() >= 100, || format!("n={n}: only {} instances", rs.len()))?;
        for (k, r) in rs.iter().enumerate() {
            ensure(r.factorized == r.brute && r.factoring == r.brute && r.joint == r.brute, || {
                format!(
                    "n={n} #{k}: brute {} factoring {} factorized {} joint {}",
                    r.brute, r.factoring, r.factorized, r.joint
                )
            })?;
        }
    }
    Ok(format!("4 routes agree on {} instances per n = 1..4", PER_N))
}

fn criterion_6(results: &BTreeMap<usize, Vec<Routes>>) -> Verdict {
    for (k, r) in results[&2].iter().enumerate() {
        ensure(r.n2.as_ref() == Some(&r.factorized), || format!("n=2 #{k}: closed form {:?} vs {}", r.n2, r.factorized))?;
    }
    // a = b: the n = 1 instances with the boundary node listed twice
    for (k, d) in corpus(1, 25, &CorpusConfig::default()).iter().enumerate() {
        let doubled = CutDecomposition { boundary: vec![d.boundary[0].clone(), d.boundary[0].clone()], ..d.clone() };
        let product = reliability_factoring(&d.g1) * reliability_factoring(&d.g2);
        let closed = n2_closed_form(&doubled).map_err(|e| e.to_string())?;
        ensure(closed == product, || format!("a=b #{k}: {closed} vs product {product}"))?;
    }
    Ok(format!("closed form matches on {} n=2 instances; a=b reduces to the product", results[&2].len()))
}

fn criterion_7() -> Verdict {
    for n in 1..=5 {
        for orbit in orbits(n).map_err(|e| e.to_string())? {
            let alphas: Vec<BigInt> = orbit.members.iter().map(connectivity_number).collect();
            ensure(alphas.windows(2).all(|w| w[0] == w[1]), || format!("n={n}: α not constant on orbit {:?}", orbit.shape))?;
            for (a, alpha) in orbit.members.iter().zip(&alphas) {
                ensure(alpha.abs() == expected_connectivity_magnitude(a), || format!("|α({a})| = {}", alpha.abs()))?;
            }
        }
        for a in all_partitions(n).map_err(|e| e.to_string())? {
            let g = gamma_graph(n, &a, &rat(1, 2)).map_err(|e| e.to_string())?;
            let poly = reliability_polynomial(&g, BOUND).map_err(|e| e.to_string())?;
            let sizes = a.shape();
            let degree: usize = (0..sizes.len()).flat_map(|i| (i + 1..sizes.len()).map(move |j| (i, j))).map(|(i, j)| sizes[i] * sizes[j]).sum();
            let (d, c) = poly.leading_term().ok_or_else(|| format!("Γ_{n}^{a}: zero polynomial"))?;
            let expected = factorial(a.block_count() - 1);
            ensure(d == degree && c.abs() == expected, || format!("Γ_{n}^{a}: leading {c}·p^{d}, expected ±{expected}·p^{degree}"))?;
        }
    }
    Ok("|α| = (m-1)!, constant on orbits; Γ leading terms ±(m-1)!·p^g for n ≤ 5".into())
}

fn criterion_8(results: &BTreeMap<usize, Vec<Routes>>) -> Verdict {
    for (n, rs) in results {
        for (k, r) in rs.iter().enumerate() {
            ensure(r.reversed == r.factorized, || format!("n={n} #{k}: {} vs {}", r.reversed, r.factorized))?;
        }
    }
    Ok("canonical and reversed-level orders agree on the full corpus".into())
}

fn criterion_9() -> Verdict {
    let cfg = CorpusConfig { all_terminal: true, seed: 0xc1a5, ..Default::default() };
    let mut count = 0;
    for n in 1..=4 {
        let b = bundle(n);
        let failures: Vec<String> = corpus(n, PER_N, &cfg)
            .par_iter()
            .enumerate()
            .filter_map(|(k, d)| {
                let union = d.validate().unwrap().union;
                let w1 = partition_function(&union, BOUND).unwrap().dq_at_zero();
                let all = reliability_bruteforce(&union, BOUND).unwrap();
                let fact = factorized_dq(d, &b, BOUND, Jobs::sequential()).unwrap();
                (w1 != all || fact != w1).then(|| format!("n={n} #{k}: w1 {w1} all-terminal {all} factorized {fact}"))
            })
            .collect();
        ensure(failures.is_empty(), || failures.join("; "))?;
        count += PER_N;
    }
    Ok(format!("w1 = all-terminal R and the factorized derivative identity hold on {count} instances"))
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run_cli(args: &[&str]) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_relfact")).args(args).env_remove("RELFACT_BOUND").output().unwrap();
    (out.stdout, out.status.code())
}

fn criterion_10() -> Verdict {
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    ensure(!files.is_empty(), || "no fixtures".into())?;
    let mut runs = 0;
    for f in &files {
        let path = f.to_str().unwrap();
        let decomposition = std::fs::read_to_string(f).unwrap().contains("\"g1\"");
        let mut commands: Vec<Vec<&str>> = vec![vec!["reliability"], vec!["reliability", "--route", "bruteforce"]];
        if decomposition {
            commands.extend([vec!["factor", "--verify"], vec!["distribution"], vec!["reliability", "--route", "joint"]]);
        }
        for cmd in commands {
            let mut outputs = Vec::new();
            for jobs in ["1", "auto", "1"] {
                let mut args = cmd.clone();
                args.extend(["--input", path, "--jobs", jobs]);
                outputs.push(run_cli(&args));
                runs += 1;
            }
            ensure(outputs.windows(2).all(|w| w[0] == w[1]), || format!("{cmd:?} on {path}: output differs across --jobs"))?;
            ensure(outputs[0].1 == Some(0), || format!("{cmd:?} on {path}: exit {:?}", outputs[0].1))?;
        }
    }
    let dir = fixtures_dir();
    let verify: Vec<_> =
        ["1", "auto"].iter().map(|j| run_cli(&["verify", "--input", dir.to_str().unwrap(), "--jobs", j])).collect();
    ensure(verify[0] == verify[1] && verify[0].1 == Some(0), || "verify output differs or fails".into())?;
    Ok(format!("{runs} runs over {} fixtures byte-identical for --jobs 1 and auto", files.len()))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

type Row = (&'static str, Verdict, Duration, Option<Duration>);

fn record(rows: &mut Vec<Row>, name: &'static str, budget_secs: Option<u64>, f: impl FnOnce() -> Verdict) {
    let (v, t) = timed(f);
    rows.push((name, v, t, budget_secs.map(Duration::from_secs)));
}

#[test]
fn acceptance_criteria() {
    let mut rows = Vec::new();
    record(&mut rows, "1 reference matrices", Some(1), criterion_1);
    record(&mut rows, "2 determinant", Some(5), criterion_2);
    record(&mut rows, "3 invariant factors", Some(10), criterion_3);
    record(&mut rows, "4 inverse cross-check", Some(10), criterion_4);
    let (results, corpus_time) = timed(corpus_results);
    rows.push(("5 factorization identity", criterion_5(&results), corpus_time, Some(Duration::from_secs(60))));
    record(&mut rows, "6 n=2 closed form", None, || criterion_6(&results));
    record(&mut rows, "7 connectivity numbers", Some(30), criterion_7);
    record(&mut rows, "8 order independence", None, || criterion_8(&results));
    record(&mut rows, "9 random cluster model", Some(30), criterion_9);
    record(&mut rows, "10 determinism", None, criterion_10);

    let mut failed = 0;
    for (name, verdict, took, budget) in &rows {
        let over = budget.is_some_and(|b| *took > b);
        let (status, detail) = match verdict {
            Ok(d) if !over => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; took {took:.2?}, budget {:?}", budget.unwrap())),
            Err(e) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} [{name}] ({took:.2?}) {detail}");
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
