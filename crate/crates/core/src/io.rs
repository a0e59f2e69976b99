//! JSON documents for graphs, decompositions and reports.
//!
//! Rationals travel as `"num/den"` strings; probabilities may also be exact
//! decimal strings or JSON numbers (`"0.9"` and `0.9` both read as `9/10`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::ConnectivityBundle;
use crate::cluster::ClusterPolynomial;
use crate::error::{ParseError, Result};
use crate::graph::{CutDecomposition, Edge, NodeId, StochasticGraph};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::reliability::{Factorization, ReliabilityPolynomial, StateDistribution};
use crate::snf::InvariantFactors;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbDoc {
    Text(String),
    Number(serde_json::Number),
}

impl ProbDoc {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            ProbDoc::Text(s) => Ok(parse_rational(s)?),
            ProbDoc::Number(n) => Ok(parse_rational(&n.to_string())?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: u64,
    pub u: String,
    pub v: String,
    pub p: ProbDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    pub terminals: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionDoc {
    pub g1: GraphDoc,
    pub g2: GraphDoc,
    pub boundary: Vec<String>,
}

/// Inverse of `NodeId`'s display: `"{a,b}"` names a merged node.
pub fn parse_node(s: &str) -> NodeId {
    match s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
        Some(inner) if inner.contains(',') => {
            let parts: Vec<NodeId> = inner.split(',').map(NodeId::new).collect();
            NodeId::merged(&parts)
        }
        _ => NodeId::new(s),
    }
}

impl From<&StochasticGraph> for GraphDoc {
    fn from(g: &StochasticGraph) -> Self {
        GraphDoc {
            nodes: g.nodes().iter().map(ToString::to_string).collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id,
                    u: e.u.to_string(),
                    v: e.v.to_string(),
                    p: ProbDoc::Text(format_rational(&e.prob)),
                })
                .collect(),
            terminals: g.terminals().iter().map(ToString::to_string).collect(),
        }
    }
}

impl GraphDoc {
    pub fn to_graph(&self) -> Result<StochasticGraph> {
        let edges = self
            .edges
            .iter()
            .map(|e| Ok(Edge::new(e.id, parse_node(&e.u), parse_node(&e.v), e.p.to_rational()?)))
            .collect::<Result<Vec<_>>>()?;
        StochasticGraph::new(
            self.nodes.iter().map(|n| parse_node(n)),
            edges,
            self.terminals.iter().map(|n| parse_node(n)),
        )
    }
}

impl From<&CutDecomposition> for DecompositionDoc {
    fn from(d: &CutDecomposition) -> Self {
        DecompositionDoc {
            g1: (&d.g1).into(),
            g2: (&d.g2).into(),
            boundary: d.boundary.iter().map(ToString::to_string).collect(),
        }
    }
}

impl DecompositionDoc {
    pub fn to_decomposition(&self) -> Result<CutDecomposition> {
        Ok(CutDecomposition {
            g1: self.g1.to_graph()?,
            g2: self.g2.to_graph()?,
            boundary: self.boundary.iter().map(|b| parse_node(b)).collect(),
        })
    }
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()).into())
}

pub fn parse_graph(text: &str) -> Result<StochasticGraph> {
    from_json::<GraphDoc>(text)?.to_graph()
}

pub fn parse_decomposition(text: &str) -> Result<CutDecomposition> {
    from_json::<DecompositionDoc>(text)?.to_decomposition()
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub n: usize,
    pub order: Vec<String>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    #[serde(rename = "A_inv")]
    pub a_inv: Vec<Vec<String>>,
    pub det: String,
    pub invariant_factors: Vec<String>,
    pub torsion_prime_powers: Vec<[u64; 3]>,
}

impl MatrixDoc {
    pub fn new(bundle: &ConnectivityBundle, det: &num_bigint::BigInt, snf: &InvariantFactors) -> Self {
        MatrixDoc {
            n: bundle.n(),
            order: bundle.order.labels(),
            a: bundle
                .a
                .to_rows()
                .iter()
                .map(|r| r.iter().map(|v| i64::try_from(v).expect("0/1 entry")).collect())
                .collect(),
            a_inv: bundle.a_inv.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect(),
            det: det.to_string(),
            invariant_factors: snf.snf_diagonal.iter().map(ToString::to_string).collect(),
            torsion_prime_powers: snf.prime_power_triples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideReliabilities {
    pub g1: BTreeMap<String, String>,
    pub g2: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub reliability: String,
    pub route: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub side_reliabilities: Option<SideReliabilities>,
    /// State labels indexing `b`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub order: Option<Vec<String>>,
    /// The inverse connectivity matrix used for the combination.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b: Option<Vec<Vec<String>>>,
    /// Outcome of the brute-force cross-check, when requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub warning: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_ms: Option<f64>,
}

impl ReliabilityReport {
    pub fn plain(value: &Rational, route: &str) -> Self {
        ReliabilityReport {
            reliability: format_rational(value),
            route: route.to_string(),
            n: None,
            side_reliabilities: None,
            order: None,
            b: None,
            verified: None,
            warning: None,
            timing_ms: None,
        }
    }

    pub fn factorized(f: &Factorization) -> Self {
        let side = |vals: &[Rational]| -> BTreeMap<String, String> {
            f.states.iter().zip(vals).map(|(a, r)| (a.to_string(), format_rational(r))).collect()
        };
        ReliabilityReport {
            reliability: format_rational(&f.reliability),
            route: "factorized".to_string(),
            n: Some(f.n),
            side_reliabilities: (f.warning.is_none())
                .then(|| SideReliabilities { g1: side(&f.side1), g2: side(&f.side2) }),
            order: None,
            b: None,
            verified: None,
            warning: f.warning.clone(),
            timing_ms: None,
        }
    }

    /// Attaches the order and inverse matrix of `bundle`.
    pub fn with_matrix(mut self, bundle: &ConnectivityBundle) -> Self {
        self.order = Some(bundle.order.labels());
        self.b = Some(bundle.a_inv.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialDoc {
    pub edges: usize,
    /// `C_i`, the number of K-pathsets with `i` operative edges.
    pub counts: Vec<String>,
    /// Coefficients of `1, p, p², …`.
    pub power_basis: Vec<String>,
}

impl From<&ReliabilityPolynomial> for PolynomialDoc {
    fn from(p: &ReliabilityPolynomial) -> Self {
        PolynomialDoc {
            edges: p.edge_count(),
            counts: p.coefficients.iter().map(ToString::to_string).collect(),
            power_basis: p.power_basis().iter().map(ToString::to_string).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionDoc {
    pub n: usize,
    pub side: String,
    pub probs: BTreeMap<String, String>,
    pub stranded: String,
}

impl DistributionDoc {
    pub fn new(side: &str, d: &StateDistribution) -> Self {
        DistributionDoc {
            n: d.n,
            side: side.to_string(),
            probs: d.probs.iter().map(|(a, p)| (a.to_string(), format_rational(p))).collect(),
            stranded: format_rational(&d.stranded),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterDoc {
    #[serde(rename = "Z")]
    pub z: BTreeMap<usize, String>,
    #[serde(rename = "dZdq_at_0")]
    pub dz_dq_at_0: String,
}

impl From<&ClusterPolynomial> for ClusterDoc {
    fn from(z: &ClusterPolynomial) -> Self {
        ClusterDoc {
            z: z.coeffs.iter().map(|(k, w)| (*k, format_rational(w))).collect(),
            dz_dq_at_0: format_rational(&z.dq_at_zero()),
        }
    }
}
