//! Seeded random decomposable graphs for cross-route testing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{CutDecomposition, Edge, NodeId, StochasticGraph};
use crate::rational::{rat, Rational};

#[derive(Debug, Clone, Copy)]
pub struct CorpusConfig {
    pub seed: u64,
    /// Upper bound on the edges of each side.
    pub max_side_edges: usize,
    /// Non-boundary nodes per side are drawn from `0..=max_extra_nodes`.
    pub max_extra_nodes: usize,
    /// Probabilities are `a/b` with `1 ≤ b ≤ max_denominator`, `0 ≤ a ≤ b`.
    pub max_denominator: i64,
    /// Every node is a terminal.
    pub all_terminal: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self { seed: 0x5eed, max_side_edges: 10, max_extra_nodes: 2, max_denominator: 12, all_terminal: false }
    }
}

fn random_prob(rng: &mut impl Rng, max_den: i64) -> Rational {
    let b = rng.gen_range(1..=max_den);
    rat(rng.gen_range(0..=b), b)
}

/// One connected side over `boundary ∪ extras`: a random spanning tree plus
/// extra (possibly parallel) edges.
fn random_side(
    rng: &mut impl Rng,
    cfg: &CorpusConfig,
    boundary: &[NodeId],
    tag: &str,
    next_id: &mut u64,
) -> StochasticGraph {
    let extras: Vec<NodeId> =
        (0..rng.gen_range(0..=cfg.max_extra_nodes)).map(|i| NodeId::new(format!("{tag}{}", i + 1))).collect();
    let mut nodes: Vec<NodeId> = boundary.iter().chain(&extras).cloned().collect();
    nodes.sort();
    nodes.dedup();

    let mut order = nodes.clone();
    order.shuffle(rng);
    let mut pairs: Vec<(usize, usize)> = (1..order.len()).map(|i| (rng.gen_range(0..i), i)).collect();
    let budget = cfg.max_side_edges.max(pairs.len());
    if order.len() > 1 {
        let extra = rng.gen_range(0..=budget - pairs.len());
        for _ in 0..extra {
            let u = rng.gen_range(0..order.len());
            let mut v = rng.gen_range(0..order.len() - 1);
            if v >= u {
                v += 1;
            }
            pairs.push((u, v));
        }
    }
    let edges: Vec<Edge> = pairs
        .into_iter()
        .map(|(u, v)| {
            *next_id += 1;
            Edge::new(*next_id, order[u].clone(), order[v].clone(), random_prob(rng, cfg.max_denominator))
        })
        .collect();

    let mut terminals: Vec<NodeId> = boundary.to_vec();
    for x in &extras {
        if cfg.all_terminal || rng.gen_bool(0.5) {
            terminals.push(x.clone());
        }
    }
    StochasticGraph::new(nodes, edges, terminals).expect("generated side is well formed")
}

pub fn random_decomposition(rng: &mut impl Rng, n: usize, cfg: &CorpusConfig) -> CutDecomposition {
    let boundary: Vec<NodeId> = (1..=n).map(|i| NodeId::new(format!("k{i}"))).collect();
    let mut next_id = 0;
    let g1 = random_side(rng, cfg, &boundary, "x", &mut next_id);
    let g2 = random_side(rng, cfg, &boundary, "y", &mut next_id);
    CutDecomposition { g1, g2, boundary }
}

/// `count` decompositions with boundary size `n`, reproducible from the
/// seed.
pub fn corpus(n: usize, count: usize, cfg: &CorpusConfig) -> Vec<CutDecomposition> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    (0..count).map(|_| random_decomposition(&mut rng, n, cfg)).collect()
}
