//! Index-based multigraph used on the hot paths: relevance analysis, the
//! factoring recursion and exhaustive state enumeration.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::dsu::{DisjointSets, RollbackSets};
use crate::graph::{EdgeId, StochasticGraph};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct CompactGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub probs: Vec<Rational>,
    pub ids: Vec<EdgeId>,
    pub terminal: Vec<bool>,
}

impl CompactGraph {
    /// Nodes are numbered in `BTreeSet` order; edges keep graph order.
    pub fn from_graph(g: &StochasticGraph) -> Self {
        let index: std::collections::BTreeMap<_, _> = g.nodes().iter().enumerate().map(|(i, n)| (n, i)).collect();
        Self {
            n: g.nodes().len(),
            edges: g.edges().iter().map(|e| (index[&e.u], index[&e.v])).collect(),
            probs: g.edges().iter().map(|e| e.prob.clone()).collect(),
            ids: g.edges().iter().map(|e| e.id).collect(),
            terminal: g.nodes().iter().map(|n| g.terminals().contains(n)).collect(),
        }
    }

    pub fn terminal_count(&self) -> usize {
        self.terminal.iter().filter(|&&t| t).count()
    }

    pub fn terminals(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.terminal[v]).collect()
    }

    /// Merge the endpoints of edge `i` and drop it.
    pub fn contract(&self, i: usize) -> Self {
        let (a, b) = self.edges[i];
        let (keep, gone) = (a.min(b), a.max(b));
        let map = |w: usize| -> usize {
            let w = if w == gone { keep } else { w };
            if w > gone { w - 1 } else { w }
        };
        let mut terminal = self.terminal.clone();
        terminal[keep] |= terminal[gone];
        terminal.remove(gone);
        let mut out = Self {
            n: self.n - usize::from(keep != gone),
            edges: Vec::with_capacity(self.edges.len() - 1),
            probs: Vec::with_capacity(self.edges.len() - 1),
            ids: Vec::with_capacity(self.edges.len() - 1),
            terminal: if keep != gone { terminal } else { self.terminal.clone() },
        };
        for j in (0..self.edges.len()).filter(|&j| j != i) {
            let (u, v) = self.edges[j];
            let (u, v) = if keep != gone { (map(u), map(v)) } else { (u, v) };
            out.edges.push((u, v));
            out.probs.push(self.probs[j].clone());
            out.ids.push(self.ids[j]);
        }
        out
    }

    pub fn delete(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.edges.remove(i);
        out.probs.remove(i);
        out.ids.remove(i);
        out
    }

    /// Keeps only the flagged edges, then drops nodes that are neither
    /// terminals nor incident to a kept edge.
    pub fn restrict(&self, keep: &[bool]) -> Self {
        let mut used = self.terminal.clone();
        for (j, &(u, v)) in self.edges.iter().enumerate() {
            if keep[j] {
                used[u] = true;
                used[v] = true;
            }
        }
        let mut relabel = vec![usize::MAX; self.n];
        let mut next = 0;
        for v in 0..self.n {
            if used[v] {
                relabel[v] = next;
                next += 1;
            }
        }
        let mut out = Self {
            n: next,
            edges: Vec::new(),
            probs: Vec::new(),
            ids: Vec::new(),
            terminal: (0..self.n).filter(|&v| used[v]).map(|v| self.terminal[v]).collect(),
        };
        for (j, &(u, v)) in self.edges.iter().enumerate() {
            if keep[j] {
                out.edges.push((relabel[u], relabel[v]));
                out.probs.push(self.probs[j].clone());
                out.ids.push(self.ids[j]);
            }
        }
        out
    }

    pub fn is_k_connected(&self) -> bool {
        let mut dsu = DisjointSets::new(self.n);
        for &(u, v) in &self.edges {
            dsu.union(u, v);
        }
        let mut roots = self.terminals().into_iter().map(|t| dsu.find(t));
        match roots.next() {
            None => true,
            Some(r) => roots.all(|x| x == r),
        }
    }

    /// Edge-index lists of the biconnected blocks (self-loops excluded).
    /// Parallel edges share a block.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (j, &(u, v)) in self.edges.iter().enumerate() {
            if u != v {
                adj[u].push((v, j));
                adj[v].push((u, j));
            }
        }
        let mut disc = vec![0usize; n];
        let mut low = vec![0usize; n];
        let mut time = 0;
        let mut estack: Vec<usize> = Vec::new();
        let mut blocks = Vec::new();
        for root in 0..n {
            if disc[root] != 0 {
                continue;
            }
            time += 1;
            disc[root] = time;
            low[root] = time;
            // (vertex, edge used to enter it, next adjacency position)
            let mut frames: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
            while let Some(&mut (v, via, ref mut pos)) = frames.last_mut() {
                if *pos < adj[v].len() {
                    let (w, j) = adj[v][*pos];
                    *pos += 1;
                    if Some(j) == via {
                        continue;
                    }
                    if disc[w] == 0 {
                        time += 1;
                        disc[w] = time;
                        low[w] = time;
                        estack.push(j);
                        frames.push((w, Some(j), 0));
                    } else if disc[w] < disc[v] {
                        estack.push(j);
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    frames.pop();
                    if let (Some(j), Some(&(parent, _, _))) = (via, frames.last()) {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] >= disc[parent] {
                            let mut block = Vec::new();
                            while let Some(k) = estack.pop() {
                                block.push(k);
                                if k == j {
                                    break;
                                }
                            }
                            blocks.push(block);
                        }
                    }
                }
            }
        }
        blocks
    }

    /// Per-edge relevance and K-connectivity. An edge is relevant iff it is
    /// a non-loop edge whose block lies on the block-cut-tree subtree
    /// spanning the terminals.
    pub fn relevant_edges(&self) -> (Vec<bool>, bool) {
        let m = self.edges.len();
        if self.terminal_count() <= 1 {
            return (vec![false; m], true);
        }
        if !self.is_k_connected() {
            return (vec![false; m], false);
        }
        let blocks = self.blocks();
        let nb = blocks.len();
        let block_vertices: Vec<Vec<usize>> = blocks
            .iter()
            .map(|b| {
                let mut vs: Vec<usize> = b.iter().flat_map(|&j| [self.edges[j].0, self.edges[j].1]).collect();
                vs.sort_unstable();
                vs.dedup();
                vs
            })
            .collect();
        let mut membership = vec![0usize; self.n];
        for vs in &block_vertices {
            for &v in vs {
                membership[v] += 1;
            }
        }
        // Tree nodes: blocks are 0..nb, cut vertex v is nb + v.
        let total = nb + self.n;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
        let mut marked = vec![false; total];
        for (b, vs) in block_vertices.iter().enumerate() {
            for &v in vs {
                if membership[v] >= 2 {
                    adj[b].push(nb + v);
                    adj[nb + v].push(b);
                    marked[nb + v] = self.terminal[v];
                } else if self.terminal[v] {
                    marked[b] = true;
                }
            }
        }
        let mut degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();
        let mut alive: Vec<bool> = (0..total).map(|x| x < nb || membership[x - nb] >= 2).collect();
        let mut queue: Vec<usize> = (0..total).filter(|&x| alive[x] && !marked[x] && degree[x] <= 1).collect();
        while let Some(x) = queue.pop() {
            if !alive[x] {
                continue;
            }
            alive[x] = false;
            for &y in &adj[x] {
                if alive[y] {
                    degree[y] -= 1;
                    if !marked[y] && degree[y] <= 1 {
                        queue.push(y);
                    }
                }
            }
        }
        let mut relevant = vec![false; m];
        for (b, block) in blocks.iter().enumerate() {
            if alive[b] {
                for &j in block {
                    relevant[j] = true;
                }
            }
        }
        (relevant, true)
    }
}

/// Exhaustive depth-first enumeration of the `2^m` edge states with an
/// incremental union-find. Each leaf sees the union-find of its operative
/// edges, the state mask (bit `i` = edge `i` up) and, when weighted, the
/// state probability numerator over the common denominator
/// `prod(denominators)` returned by [`StateWalker::run`].
pub(crate) struct StateWalker<'g> {
    graph: &'g CompactGraph,
    weighted: bool,
}

impl<'g> StateWalker<'g> {
    pub fn weighted(graph: &'g CompactGraph) -> Self {
        Self { graph, weighted: true }
    }

    pub fn unweighted(graph: &'g CompactGraph) -> Self {
        Self { graph, weighted: false }
    }

    pub fn run<F>(&self, mut leaf: F) -> BigInt
    where
        F: FnMut(&RollbackSets, u64, &BigInt),
    {
        let g = self.graph;
        let m = g.edges.len();
        let mut up = Vec::with_capacity(m);
        let mut down = Vec::with_capacity(m);
        let mut denom = BigInt::one();
        for p in &g.probs {
            if self.weighted {
                up.push(p.numer().clone());
                down.push(p.denom() - p.numer());
                denom *= p.denom();
            } else {
                up.push(BigInt::one());
                down.push(BigInt::one());
            }
        }
        let mut dsu = RollbackSets::new(g.n);
        let mut weights = vec![BigInt::zero(); m + 1];
        weights[0] = BigInt::one();
        walk(g, 0, 0, &up, &down, &mut weights, &mut dsu, &mut leaf);
        denom
    }
}

#[allow(clippy::too_many_arguments)]
fn walk<F>(
    g: &CompactGraph,
    i: usize,
    mask: u64,
    up: &[BigInt],
    down: &[BigInt],
    weights: &mut Vec<BigInt>,
    dsu: &mut RollbackSets,
    leaf: &mut F,
) where
    F: FnMut(&RollbackSets, u64, &BigInt),
{
    if i == g.edges.len() {
        leaf(dsu, mask, &weights[i]);
        return;
    }
    if !down[i].is_zero() {
        weights[i + 1] = &weights[i] * &down[i];
        walk(g, i + 1, mask, up, down, weights, dsu, leaf);
    }
    if !up[i].is_zero() {
        weights[i + 1] = &weights[i] * &up[i];
        let (u, v) = g.edges[i];
        dsu.union(u, v);
        walk(g, i + 1, mask | 1 << i, up, down, weights, dsu, leaf);
        dsu.undo();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn graph(n: usize, edges: &[(usize, usize)], terminals: &[usize]) -> CompactGraph {
        CompactGraph {
            n,
            edges: edges.to_vec(),
            probs: vec![rat(1, 2); edges.len()],
            ids: (0..edges.len() as u64).collect(),
            terminal: (0..n).map(|v| terminals.contains(&v)).collect(),
        }
    }

    #[test]
    fn blocks_of_two_triangles_sharing_a_vertex() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)], &[]);
        let mut blocks: Vec<Vec<usize>> = g
            .blocks()
            .into_iter()
            .map(|mut b| {
                b.sort();
                b
            })
            .collect();
        blocks.sort();
        assert_eq!(blocks, vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn parallel_edges_form_one_block_and_loops_none() {
        let g = graph(3, &[(0, 1), (1, 0), (1, 1), (1, 2)], &[]);
        let mut blocks = g.blocks();
        blocks.iter_mut().for_each(|b| b.sort());
        blocks.sort();
        assert_eq!(blocks, vec![vec![0, 1], vec![3]]);
    }

    #[test]
    fn relevance_ignores_side_branch() {
        // terminals 0 and 2 on a path, triangle hanging off node 1
        let g = graph(5, &[(0, 1), (1, 2), (1, 3), (3, 4), (4, 1)], &[0, 2]);
        let (rel, ok) = g.relevant_edges();
        assert!(ok);
        assert_eq!(rel, vec![true, true, false, false, false]);
    }

    #[test]
    fn contraction_renumbers_nodes() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)], &[0, 2]);
        let c = g.contract(1);
        assert_eq!(c.n, 2);
        assert_eq!(c.edges, vec![(0, 1), (1, 0)]);
        assert_eq!(c.terminal, vec![true, true]);
        let l = graph(2, &[(1, 1), (0, 1)], &[0]).contract(0);
        assert_eq!(l.n, 2);
        assert_eq!(l.edges, vec![(0, 1)]);
    }

    #[test]
    fn walker_visits_every_state_once() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)], &[]);
        let mut seen = Vec::new();
        let mut total = BigInt::zero();
        let denom = StateWalker::weighted(&g).run(|_, mask, w| {
            seen.push(mask);
            total += w;
        });
        seen.sort();
        assert_eq!(seen, (0..8).collect::<Vec<u64>>());
        assert_eq!(total, denom);
    }
}
