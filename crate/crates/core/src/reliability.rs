//! Exact K-terminal reliability by three independent routes.
//!
//! * [`reliability_bruteforce`]: sum of state probabilities over all `2^m`
//!   edge states that connect the terminals.
//! * [`reliability_factoring`]: contraction/deletion recursion
//!   `R(G) = p_e R(G·e) + (1 − p_e) R(G − e)` with irrelevant-edge pruning.
//! * [`factorized_reliability`]: the boundary factorization
//!   `R(G) = Σ b_ij R(G₁^{A_i}) R(G₂^{A_j})` over a cut decomposition.
//!
//! [`joint_reliability`] gives a fourth, pre-factorization route through the
//! boundary state distributions of the two sides.

use std::collections::{BTreeMap, HashMap};
use std::num::NonZeroUsize;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::ConnectivityBundle;
use crate::compact::{CompactGraph, StateWalker};
use crate::error::{Error, Result};
use crate::graph::{CutDecomposition, Edge, NodeId, StochasticGraph};
use crate::partition::{all_partitions, OrderVariant, Partition};
use crate::rational::Rational;

/// Largest edge count accepted by the enumeration routes (2^24 states).
pub const DEFAULT_ENUMERATION_BOUND: usize = 24;

fn check_bound(g: &StochasticGraph, bound: usize) -> Result<()> {
    if g.edge_count() > bound || g.edge_count() > 63 {
        return Err(Error::EnumerationBound { edges: g.edge_count(), bound });
    }
    Ok(())
}

fn terminal_indices(c: &CompactGraph) -> Vec<usize> {
    c.terminals()
}

pub fn reliability_bruteforce(g: &StochasticGraph, bound: usize) -> Result<Rational> {
    check_bound(g, bound)?;
    let c = CompactGraph::from_graph(g);
    let terminals = terminal_indices(&c);
    let mut hit = BigInt::zero();
    let denom = StateWalker::weighted(&c).run(|dsu, _, w| {
        let mut roots = terminals.iter().map(|&t| dsu.find(t));
        let connected = match roots.next() {
            None => true,
            Some(r) => roots.all(|x| x == r),
        };
        if connected {
            hit += w;
        }
    });
    Ok(BigRational::new(hit, denom))
}

pub fn reliability_factoring(g: &StochasticGraph) -> Rational {
    let mut memo = HashMap::new();
    factor(CompactGraph::from_graph(g), &mut memo)
}

fn factor(g: CompactGraph, memo: &mut HashMap<CompactGraph, Rational>) -> Rational {
    if g.terminal_count() <= 1 {
        return Rational::one();
    }
    let (relevant, k_connected) = g.relevant_edges();
    if !k_connected {
        return Rational::zero();
    }
    let g = if relevant.iter().all(|&r| r) { g } else { g.restrict(&relevant) };
    if let Some(r) = memo.get(&g) {
        return r.clone();
    }
    // Pivot: smallest-id edge touching a terminal. After pruning every edge
    // is relevant and some terminal has one.
    let pivot = (0..g.edges.len())
        .filter(|&j| g.terminal[g.edges[j].0] || g.terminal[g.edges[j].1])
        .min_by_key(|&j| g.ids[j])
        .expect("connected terminals have an incident relevant edge");
    let p = g.probs[pivot].clone();
    let r = if p.is_one() {
        factor(g.contract(pivot), memo)
    } else if p.is_zero() {
        factor(g.delete(pivot), memo)
    } else {
        let up = factor(g.contract(pivot), memo);
        let down = factor(g.delete(pivot), memo);
        &p * up + (Rational::one() - &p) * down
    };
    memo.insert(g, r.clone());
    r
}

/// Counts `C_i` of K-pathsets with exactly `i` operative edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReliabilityPolynomial {
    pub coefficients: Vec<BigInt>,
}

impl ReliabilityPolynomial {
    pub fn edge_count(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `Σ C_i p^i (1 − p)^{m − i}`.
    pub fn evaluate(&self, p: &Rational) -> Rational {
        let m = self.edge_count();
        let q = Rational::one() - p;
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| BigRational::from_integer(c.clone()) * num_traits::pow(p.clone(), i) * num_traits::pow(q.clone(), m - i))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Coefficients in the monomial basis `1, p, p², …`.
    pub fn power_basis(&self) -> Vec<BigInt> {
        let m = self.edge_count();
        let binom = binomials(m);
        let mut out = vec![BigInt::zero(); m + 1];
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // p^i (1-p)^{m-i} = Σ_k C(m-i, k) (-1)^k p^{i+k}
            for k in 0..=m - i {
                let term = c * &binom[m - i][k];
                if k % 2 == 0 {
                    out[i + k] += term;
                } else {
                    out[i + k] -= term;
                }
            }
        }
        out
    }

    /// Highest-degree nonzero monomial `(degree, coefficient)`.
    pub fn leading_term(&self) -> Option<(usize, BigInt)> {
        let pb = self.power_basis();
        pb.iter().enumerate().rev().find(|(_, c)| !c.is_zero()).map(|(d, c)| (d, c.clone()))
    }
}

fn binomials(m: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for r in 1..=m {
        let prev = &rows[r - 1];
        let mut row = vec![BigInt::one(); r + 1];
        for k in 1..r {
            row[k] = &prev[k - 1] + &prev[k];
        }
        rows.push(row);
    }
    rows
}

pub fn reliability_polynomial(g: &StochasticGraph, bound: usize) -> Result<ReliabilityPolynomial> {
    check_bound(g, bound)?;
    let c = CompactGraph::from_graph(g);
    let terminals = terminal_indices(&c);
    let mut counts = vec![0u64; c.edges.len() + 1];
    StateWalker::unweighted(&c).run(|dsu, mask, _| {
        let mut roots = terminals.iter().map(|&t| dsu.find(t));
        let connected = match roots.next() {
            None => true,
            Some(r) => roots.all(|x| x == r),
        };
        if connected {
            counts[mask.count_ones() as usize] += 1;
        }
    });
    Ok(ReliabilityPolynomial { coefficients: counts.into_iter().map(BigInt::from).collect() })
}

/// Distribution of the boundary partition induced by one side's random
/// state.
///
/// States in which some terminal of the side reaches no boundary node can
/// never contribute to a K-pathset of the whole graph; their mass is kept
/// apart in `stranded` so that `Σ probs + stranded = 1`. When the side's
/// terminals are exactly the boundary nodes, `stranded` is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDistribution {
    pub n: usize,
    pub probs: BTreeMap<Partition, Rational>,
    pub stranded: Rational,
}

impl StateDistribution {
    pub fn prob(&self, p: &Partition) -> Rational {
        self.probs.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.probs.values().fold(self.stranded.clone(), |a, b| a + b)
    }

    /// `Σ_{B : (a, B) connected} P(B)`.
    pub fn connected_mass(&self, a: &Partition) -> Rational {
        self.probs
            .iter()
            .filter(|(b, _)| a.join_unchecked(b).is_top())
            .fold(Rational::zero(), |acc, (_, p)| acc + p)
    }
}

pub fn state_distribution(g: &StochasticGraph, boundary: &[NodeId], bound: usize) -> Result<StateDistribution> {
    check_bound(g, bound)?;
    let n = boundary.len();
    let states = all_partitions(n)?;
    let index: BTreeMap<&NodeId, usize> = g.nodes().iter().enumerate().map(|(i, n)| (n, i)).collect();
    let bidx: Vec<usize> = boundary
        .iter()
        .map(|b| index.get(b).copied().ok_or_else(|| Error::UnknownNode(b.to_string())))
        .collect::<Result<_>>()?;
    let c = CompactGraph::from_graph(g);
    let terminals = terminal_indices(&c);
    let mut mass: BTreeMap<Partition, BigInt> = states.into_iter().map(|p| (p, BigInt::zero())).collect();
    let mut stranded = BigInt::zero();
    let denom = StateWalker::weighted(&c).run(|dsu, _, w| {
        let roots: Vec<usize> = bidx.iter().map(|&b| dsu.find(b)).collect();
        if terminals.iter().any(|&t| !roots.contains(&dsu.find(t))) {
            stranded += w;
        } else {
            *mass.get_mut(&Partition::from_labels(&roots)).expect("partition enumerated") += w;
        }
    });
    Ok(StateDistribution {
        n,
        probs: mass.into_iter().map(|(p, m)| (p, BigRational::new(m, denom.clone()))).collect(),
        stranded: BigRational::new(stranded, denom),
    })
}

/// `Σ_{(A, B) connected} P₁(A) P₂(B)`.
pub fn joint_reliability(d1: &StateDistribution, d2: &StateDistribution) -> Result<Rational> {
    if d1.n != d2.n {
        return Err(Error::BoundarySizeMismatch(d1.n, d2.n));
    }
    let mut total = Rational::zero();
    for (a, pa) in d1.probs.iter().filter(|(_, p)| !p.is_zero()) {
        for (b, pb) in d2.probs.iter().filter(|(_, p)| !p.is_zero()) {
            if a.join_unchecked(b).is_top() {
                total += pa * pb;
            }
        }
    }
    Ok(total)
}

/// `R(G^A)` with terminals mapped through the identification, by the
/// factoring route.
pub fn conditioned_reliability(g: &StochasticGraph, boundary: &[NodeId], a: &Partition) -> Result<Rational> {
    Ok(reliability_factoring(&g.identify_nodes(boundary, a)?))
}

/// Worker count for the per-state side problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Jobs {
    #[default]
    Auto,
    Fixed(NonZeroUsize),
}

impl Jobs {
    pub fn sequential() -> Self {
        Jobs::Fixed(NonZeroUsize::MIN)
    }

    /// Runs `f` on a pool of the requested size.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match self {
            Jobs::Auto => f(),
            Jobs::Fixed(k) => rayon::ThreadPoolBuilder::new()
                .num_threads(k.get())
                .build()
                .expect("thread pool")
                .install(f),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FactorOptions {
    pub order: OrderVariant,
    pub jobs: Jobs,
}

/// Result of the boundary factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub reliability: Rational,
    pub n: usize,
    /// States in the order used for `b`.
    pub states: Vec<Partition>,
    /// `R(G₁^{A_i})`; empty when the short-circuit warning is set.
    pub side1: Vec<Rational>,
    /// `R(G₂^{A_j})`.
    pub side2: Vec<Rational>,
    /// Set when a terminal reaches no boundary node; the reliability is 0.
    pub warning: Option<String>,
}

pub fn factorized_reliability(d: &CutDecomposition, opts: &FactorOptions) -> Result<Factorization> {
    let n = d.n();
    let bundle = ConnectivityBundle::new(n.max(1), opts.order)?;
    factorized_with_bundle(d, &bundle, opts.jobs)
}

/// Same as [`factorized_reliability`] with a prebuilt matrix bundle.
pub fn factorized_with_bundle(d: &CutDecomposition, bundle: &ConnectivityBundle, jobs: Jobs) -> Result<Factorization> {
    let states = bundle.order.states().to_vec();
    match d.validate() {
        Ok(_) => {}
        Err(e @ Error::UnreachableTerminal(_)) => {
            return Ok(Factorization {
                reliability: Rational::zero(),
                n: d.n(),
                states,
                side1: Vec::new(),
                side2: Vec::new(),
                warning: Some(e.to_string()),
            });
        }
        Err(e) => return Err(e),
    }
    if bundle.n() != d.n() {
        return Err(Error::BoundarySizeMismatch(bundle.n(), d.n()));
    }
    let tasks: Vec<(&StochasticGraph, &Partition)> =
        [&d.g1, &d.g2].into_iter().flat_map(|g| states.iter().map(move |a| (g, a))).collect();
    let values: Vec<Rational> = jobs.install(|| {
        tasks
            .par_iter()
            .map(|(g, a)| conditioned_reliability(g, &d.boundary, a))
            .collect::<Result<Vec<_>>>()
    })?;
    let m = states.len();
    let (side1, side2) = (values[..m].to_vec(), values[m..].to_vec());
    Ok(Factorization { reliability: combine(bundle, &side1, &side2), n: d.n(), states, side1, side2, warning: None })
}

/// `Σ_ij b_ij r1_i r2_j`, summed in fixed index order.
pub fn combine(bundle: &ConnectivityBundle, r1: &[Rational], r2: &[Rational]) -> Rational {
    let mut total = Rational::zero();
    for (i, x) in r1.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let mut row = Rational::zero();
        for (j, y) in r2.iter().enumerate() {
            let b = &bundle.a_inv[(i, j)];
            if !b.is_zero() && !y.is_zero() {
                row += b * y;
            }
        }
        total += x * row;
    }
    total
}

/// Three-term inclusion–exclusion for a two-node boundary:
/// `R₁ R̂₂ + R̂₁ R₂ − R₁ R₂`, where `R̂` identifies the two boundary nodes.
pub fn n2_closed_form(d: &CutDecomposition) -> Result<Rational> {
    if d.n() != 2 {
        return Err(Error::NotTwoBoundary(d.n()));
    }
    match d.validate() {
        Ok(_) => {}
        Err(Error::UnreachableTerminal(_)) => return Ok(Rational::zero()),
        Err(e) => return Err(e),
    }
    let merged = Partition::top(2);
    let r1 = reliability_factoring(&d.g1);
    let r2 = reliability_factoring(&d.g2);
    let h1 = conditioned_reliability(&d.g1, &d.boundary, &merged)?;
    let h2 = conditioned_reliability(&d.g2, &d.boundary, &merged)?;
    Ok(&r1 * &h2 + &h1 * &r2 - &r1 * &r2)
}

/// Complete graph on nodes `1..n` with every edge at probability `p`,
/// nodes identified by `a`, all resulting nodes terminal.
pub fn gamma_graph(n: usize, a: &Partition, p: &Rational) -> Result<StochasticGraph> {
    if a.n() != n {
        return Err(Error::GroundSetMismatch(a.n(), n));
    }
    let nodes: Vec<NodeId> = (1..=n).map(|i| NodeId::new(i.to_string())).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push(Edge::new(edges.len() as u64 + 1, nodes[i].clone(), nodes[j].clone(), p.clone()));
        }
    }
    let complete = StochasticGraph::new(nodes.clone(), edges, nodes.clone())?;
    complete.identify_nodes(&nodes, a)
}
