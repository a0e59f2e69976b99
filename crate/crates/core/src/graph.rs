//! Stochastic multigraphs and the structural operations used by the
//! reliability routes.
//!
//! Graph values are immutable; every operation returns a new graph. Parallel
//! edges and self-loops are ordinary edges: contraction produces them and
//! only irrelevant-edge pruning removes them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::compact::CompactGraph;
use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rational::{is_probability, format_rational, Rational};

pub type EdgeId = u64;

/// Node identifier. A node produced by merging carries the sorted set of
/// the original identifiers it stands for.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(Vec<String>);

impl NodeId {
    pub fn new(name: impl Into<String>) -> Self {
        Self(vec![name.into()])
    }

    pub fn merged<'a>(parts: impl IntoIterator<Item = &'a NodeId>) -> Self {
        let set: BTreeSet<String> = parts.into_iter().flat_map(|p| p.0.iter().cloned()).collect();
        Self(set.into_iter().collect())
    }

    pub fn originals(&self) -> &[String] {
        &self.0
    }

    pub fn is_merged(&self) -> bool {
        self.0.len() > 1
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            f.write_str(&self.0[0])
        } else {
            write!(f, "{{{}}}", self.0.join(","))
        }
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub u: NodeId,
    pub v: NodeId,
    pub prob: Rational,
}

impl Edge {
    pub fn new(id: EdgeId, u: impl Into<NodeId>, v: impl Into<NodeId>, prob: Rational) -> Self {
        Self { id, u: u.into(), v: v.into(), prob }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// A multigraph with independent edge survival probabilities and a
/// distinguished terminal set `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticGraph {
    nodes: BTreeSet<NodeId>,
    edges: Vec<Edge>,
    terminals: BTreeSet<NodeId>,
}

impl StochasticGraph {
    pub fn new(
        nodes: impl IntoIterator<Item = NodeId>,
        edges: Vec<Edge>,
        terminals: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self> {
        let mut node_set = BTreeSet::new();
        for n in nodes {
            if !node_set.insert(n.clone()) {
                return Err(Error::DuplicateNode(n.to_string()));
            }
        }
        let mut ids = BTreeSet::new();
        for e in &edges {
            if !ids.insert(e.id) {
                return Err(Error::DuplicateEdgeId(e.id));
            }
            for end in [&e.u, &e.v] {
                if !node_set.contains(end) {
                    return Err(Error::DanglingEndpoint { edge: e.id, node: end.to_string() });
                }
            }
            if !is_probability(&e.prob) {
                return Err(Error::BadProbability { edge: e.id, prob: format_rational(&e.prob) });
            }
        }
        let mut terminal_set = BTreeSet::new();
        for t in terminals {
            if !node_set.contains(&t) {
                return Err(Error::UnknownTerminal(t.to_string()));
            }
            terminal_set.insert(t);
        }
        Ok(Self { nodes: node_set, edges, terminals: terminal_set })
    }

    /// Convenience constructor from string labels.
    pub fn from_labels(
        nodes: &[&str],
        edges: &[(EdgeId, &str, &str, Rational)],
        terminals: &[&str],
    ) -> Result<Self> {
        Self::new(
            nodes.iter().map(|&n| NodeId::new(n)),
            edges.iter().map(|(id, u, v, p)| Edge::new(*id, *u, *v, p.clone())).collect(),
            terminals.iter().map(|&t| NodeId::new(t)),
        )
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn terminals(&self) -> &BTreeSet<NodeId> {
        &self.terminals
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn edge_ids(&self) -> BTreeSet<EdgeId> {
        self.edges.iter().map(|e| e.id).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Same structure and terminals, with every edge probability replaced.
    pub fn with_uniform_prob(&self, p: &Rational) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.prob = p.clone();
        }
        g
    }

    pub fn with_terminals(&self, terminals: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        Self::new(self.nodes.iter().cloned(), self.edges.clone(), terminals)
    }

    /// All nodes as terminals.
    pub fn all_terminal(&self) -> Self {
        let mut g = self.clone();
        g.terminals = g.nodes.clone();
        g
    }

    pub fn with_edge_prob(&self, id: EdgeId, p: Rational) -> Result<Self> {
        let mut g = self.clone();
        let e = g.edges.iter_mut().find(|e| e.id == id).ok_or(Error::UnknownEdge(id))?;
        if !is_probability(&p) {
            return Err(Error::BadProbability { edge: id, prob: format_rational(&p) });
        }
        e.prob = p;
        Ok(g)
    }

    /// Applies a node map and rebuilds node, edge and terminal sets.
    fn quotient(&self, map: &BTreeMap<NodeId, NodeId>, skip: Option<EdgeId>) -> Self {
        let image = |n: &NodeId| map.get(n).cloned().unwrap_or_else(|| n.clone());
        Self {
            nodes: self.nodes.iter().map(image).collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| Some(e.id) != skip)
                .map(|e| Edge { id: e.id, u: image(&e.u), v: image(&e.v), prob: e.prob.clone() })
                .collect(),
            terminals: self.terminals.iter().map(image).collect(),
        }
    }

    /// `G·e`: merge the endpoints of `e` and drop `e`. Edges parallel to
    /// `e` become self-loops.
    pub fn contract(&self, id: EdgeId) -> Result<Self> {
        let e = self.edge(id).ok_or(Error::UnknownEdge(id))?;
        let merged = NodeId::merged([&e.u, &e.v]);
        let map = [(e.u.clone(), merged.clone()), (e.v.clone(), merged)].into_iter().collect();
        Ok(self.quotient(&map, Some(id)))
    }

    /// `G−e`.
    pub fn delete(&self, id: EdgeId) -> Result<Self> {
        if self.edge(id).is_none() {
            return Err(Error::UnknownEdge(id));
        }
        let mut g = self.clone();
        g.edges.retain(|e| e.id != id);
        Ok(g)
    }

    /// `G^A`: merge the boundary nodes lying in one block of `a`.
    pub fn identify_nodes(&self, boundary: &[NodeId], a: &Partition) -> Result<Self> {
        if a.n() != boundary.len() {
            return Err(Error::GroundSetMismatch(a.n(), boundary.len()));
        }
        for b in boundary {
            if !self.nodes.contains(b) {
                return Err(Error::UnknownNode(b.to_string()));
            }
        }
        let mut map = BTreeMap::new();
        for block in a.blocks() {
            let merged = NodeId::merged(block.iter().map(|&i| &boundary[i - 1]));
            for &i in &block {
                map.insert(boundary[i - 1].clone(), merged.clone());
            }
        }
        Ok(self.quotient(&map, None))
    }

    pub fn is_k_pathset(&self, state: &EdgeState) -> Result<bool> {
        if state.operative.len() != self.edges.len()
            || self.edges.iter().any(|e| !state.operative.contains_key(&e.id))
        {
            return Err(Error::StateDomainMismatch);
        }
        let index: BTreeMap<&NodeId, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut dsu = DisjointSets::new(self.nodes.len());
        for e in &self.edges {
            if state.operative[&e.id] {
                dsu.union(index[&e.u], index[&e.v]);
            }
        }
        let mut roots = self.terminals.iter().map(|t| dsu.find(index[t]));
        Ok(match roots.next() {
            None => true,
            Some(r) => roots.all(|x| x == r),
        })
    }

    /// Whether all terminals lie in one component when every edge works.
    pub fn is_k_connected(&self) -> bool {
        let all = EdgeState::all(self, true);
        self.is_k_pathset(&all).expect("full state covers the edge set")
    }

    /// Edges on no K-minpath.
    pub fn irrelevant_edges(&self) -> Irrelevance {
        let compact = CompactGraph::from_graph(self);
        let (relevant, k_connected) = compact.relevant_edges();
        let irrelevant = self
            .edges
            .iter()
            .zip(relevant)
            .filter(|(_, r)| !r)
            .map(|(e, _)| e.id)
            .collect();
        Irrelevance { irrelevant, k_connected }
    }

    /// Union of nodes, edges and terminals; shared nodes are glued. Callers
    /// check that the sharing is intended.
    fn union(&self, other: &Self) -> Self {
        let mut g = self.clone();
        g.nodes.extend(other.nodes.iter().cloned());
        g.edges.extend(other.edges.iter().cloned());
        g.terminals.extend(other.terminals.iter().cloned());
        g
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Irrelevance {
    pub irrelevant: BTreeSet<EdgeId>,
    /// `false` when the fully operative graph does not connect `K`; in that
    /// case every edge is reported and the reliability is 0.
    pub k_connected: bool,
}

/// Operative/failed assignment for every edge of one graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeState {
    pub operative: BTreeMap<EdgeId, bool>,
}

impl EdgeState {
    pub fn all(g: &StochasticGraph, up: bool) -> Self {
        Self { operative: g.edges.iter().map(|e| (e.id, up)).collect() }
    }

    /// Bit `i` of `mask` is the state of the `i`-th edge in graph order.
    pub fn from_mask(g: &StochasticGraph, mask: u64) -> Self {
        Self {
            operative: g.edges.iter().enumerate().map(|(i, e)| (e.id, mask >> i & 1 == 1)).collect(),
        }
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.operative.iter().all(|(id, &up)| !up || other.operative.get(id) == Some(&true))
    }
}

/// Two sides sharing exactly the boundary nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutDecomposition {
    pub g1: StochasticGraph,
    pub g2: StochasticGraph,
    pub boundary: Vec<NodeId>,
}

impl CutDecomposition {
    pub fn n(&self) -> usize {
        self.boundary.len()
    }

    pub fn validate(&self) -> Result<ValidatedDecomposition> {
        validate_decomposition(self)
    }

    /// `G₁ ∪ G₂` without checking either hypothesis.
    pub fn union_graph(&self) -> StochasticGraph {
        self.g1.union(&self.g2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedDecomposition {
    pub decomposition: CutDecomposition,
    /// `G = G₁ ∪ G₂` with `K = K₁ ∪ K₂`.
    pub union: StochasticGraph,
}

/// Checks both hypotheses and returns the union graph. A boundary may name
/// the same node twice (the degenerate articulation case).
pub fn validate_decomposition(d: &CutDecomposition) -> Result<ValidatedDecomposition> {
    if d.boundary.is_empty() {
        return Err(Error::EmptyBoundary);
    }
    for (side, g) in [("g1", &d.g1), ("g2", &d.g2)] {
        for b in &d.boundary {
            if !g.nodes.contains(b) {
                return Err(Error::BoundaryNotInSide { side, node: b.to_string() });
            }
            if !g.terminals.contains(b) {
                return Err(Error::BoundaryNotTerminal { side, node: b.to_string() });
            }
        }
    }
    let ids1 = d.g1.edge_ids();
    if let Some(e) = d.g2.edges.iter().find(|e| ids1.contains(&e.id)) {
        return Err(Error::SharedEdge(e.id));
    }
    let boundary: BTreeSet<&NodeId> = d.boundary.iter().collect();
    if let Some(n) = d.g1.nodes.intersection(&d.g2.nodes).find(|n| !boundary.contains(n)) {
        return Err(Error::SharedNonBoundaryNode(n.to_string()));
    }
    let union = d.g1.union(&d.g2);

    let index: BTreeMap<&NodeId, usize> = union.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut dsu = DisjointSets::new(union.nodes.len());
    for e in &union.edges {
        dsu.union(index[&e.u], index[&e.v]);
    }
    let anchored: BTreeSet<usize> = d.boundary.iter().map(|b| dsu.find(index[b])).collect();
    if let Some(t) = union.terminals.iter().find(|t| !anchored.contains(&dsu.find(index[t]))) {
        return Err(Error::UnreachableTerminal(t.to_string()));
    }
    Ok(ValidatedDecomposition { decomposition: d.clone(), union })
}
