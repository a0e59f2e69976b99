//! Random cluster partition function and its linear coefficient.
//!
//! `Z(q, G) = Σ_ω q^{k(ω)} P(ω)`, where `k(ω)` counts the connected
//! components of the spanning subgraph of operative edges, isolated nodes
//! included. The coefficient of `q` is the all-terminal reliability.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::ConnectivityBundle;
use crate::compact::{CompactGraph, StateWalker};
use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::graph::{CutDecomposition, StochasticGraph};
use crate::rational::Rational;
use crate::reliability::{combine, Jobs};

/// `Z(q) = Σ_k w_k q^k`, keyed by cluster count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPolynomial {
    pub coeffs: BTreeMap<usize, Rational>,
}

impl ClusterPolynomial {
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn evaluate(&self, q: &Rational) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |acc, (&k, w)| acc + w * num_traits::pow(q.clone(), k))
    }

    /// `∂Z/∂q` at `q = 0`, i.e. `w₁`.
    pub fn dq_at_zero(&self) -> Rational {
        self.coeff(1)
    }
}

pub fn dq_at_zero(z: &ClusterPolynomial) -> Rational {
    z.dq_at_zero()
}

fn check_connected(c: &CompactGraph) -> Result<()> {
    let mut dsu = DisjointSets::new(c.n);
    for &(u, v) in &c.edges {
        dsu.union(u, v);
    }
    if c.n > 1 && dsu.set_count() != 1 {
        return Err(Error::DisconnectedGraph);
    }
    Ok(())
}

pub fn partition_function(g: &StochasticGraph, bound: usize) -> Result<ClusterPolynomial> {
    if g.edge_count() > bound || g.edge_count() > 63 {
        return Err(Error::EnumerationBound { edges: g.edge_count(), bound });
    }
    let c = CompactGraph::from_graph(g);
    check_connected(&c)?;
    let mut mass: BTreeMap<usize, BigInt> = BTreeMap::new();
    let denom = StateWalker::weighted(&c).run(|dsu, _, w| {
        *mass.entry(dsu.set_count()).or_insert_with(BigInt::zero) += w;
    });
    Ok(ClusterPolynomial {
        coeffs: mass.into_iter().map(|(k, m)| (k, BigRational::new(m, denom.clone()))).collect(),
    })
}

/// `Σ_ij b_ij w₁(G₁^{A_i}) w₁(G₂^{A_j})` for an all-terminal decomposition.
pub fn factorized_dq(d: &CutDecomposition, bundle: &ConnectivityBundle, bound: usize, jobs: Jobs) -> Result<Rational> {
    d.validate()?;
    if bundle.n() != d.n() {
        return Err(Error::BoundarySizeMismatch(bundle.n(), d.n()));
    }
    for g in [&d.g1, &d.g2] {
        if let Some(v) = g.nodes().difference(g.terminals()).next() {
            return Err(Error::NotAllTerminal(v.to_string()));
        }
    }
    let states = bundle.order.states();
    let side = |g: &StochasticGraph| -> Result<Vec<Rational>> {
        use rayon::prelude::*;
        jobs.install(|| {
            states
                .par_iter()
                .map(|a| Ok(partition_function(&g.identify_nodes(&d.boundary, a)?, bound)?.dq_at_zero()))
                .collect()
        })
    };
    let (w1, w2) = (side(&d.g1)?, side(&d.g2)?);
    Ok(combine(bundle, &w1, &w2))
}

/// `Z(1, G)`; 1 for every graph.
pub fn total_mass(z: &ClusterPolynomial) -> Rational {
    z.evaluate(&Rational::one())
}
