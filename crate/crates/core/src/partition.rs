//! Set partitions of the boundary `{1..n}` viewed as connectivity states.
//!
//! A [`Partition`] is stored as a restricted growth string: `labels[i]` is
//! the block of element `i + 1`, with blocks numbered in order of their
//! minimum element. That form is canonical, so derived equality, hashing and
//! ordering are all structural.
//!
//! The partitions form a lattice under refinement. [`Partition::join`] is
//! the finest common coarsening (the product of the generated subgroups of
//! `S_n`) and [`Partition::meet`] the coarsest common refinement (their
//! intersection).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::dsu::DisjointSets;
use crate::error::{Error, ParseError, Result};

/// Largest boundary size accepted by the enumerators. Bell(8) = 4140.
pub const MAX_BOUNDARY: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<u8>,
}

impl Partition {
    /// Builds a partition from arbitrary block labels, one per element.
    pub fn from_labels<T: Copy + Eq + std::hash::Hash>(raw: &[T]) -> Self {
        let mut seen: HashMap<T, u8> = HashMap::new();
        let labels = raw
            .iter()
            .map(|l| {
                let next = seen.len() as u8;
                *seen.entry(*l).or_insert(next)
            })
            .collect();
        Self { labels }
    }

    /// Builds a partition of `{1..n}` from 1-based blocks.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut raw = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(ParseError::Partition(format!("{blocks:?}")).into());
            }
            for &e in block {
                if e == 0 || e > n || raw[e - 1] != usize::MAX {
                    return Err(ParseError::Partition(format!("{blocks:?}")).into());
                }
                raw[e - 1] = b;
            }
        }
        if raw.contains(&usize::MAX) {
            return Err(ParseError::Partition(format!("{blocks:?}")).into());
        }
        Ok(Self::from_labels(&raw))
    }

    /// All-singletons partition, the identity subgroup `{id}`.
    pub fn singletons(n: usize) -> Self {
        Self { labels: (0..n as u8).collect() }
    }

    /// One-block partition, the whole group `S_n`.
    pub fn top(n: usize) -> Self {
        Self { labels: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn block_count(&self) -> usize {
        self.labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    pub fn is_top(&self) -> bool {
        self.block_count() == 1
    }

    pub fn is_singletons(&self) -> bool {
        self.block_count() == self.n()
    }

    /// Blocks as ascending 1-based element lists, ordered by minimum.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (i, &l) in self.labels.iter().enumerate() {
            blocks[l as usize].push(i + 1);
        }
        blocks
    }

    /// Block sizes in descending order; a complete conjugation invariant.
    pub fn shape(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.block_count()];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    /// Whether 1-based elements `i` and `j` share a block.
    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.labels[i - 1] == self.labels[j - 1]
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::GroundSetMismatch(self.n(), other.n()));
        }
        Ok(())
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.join_unchecked(other))
    }

    pub(crate) fn join_unchecked(&self, other: &Self) -> Self {
        let n = self.n();
        let mut dsu = DisjointSets::new(n);
        let mut first_a = [usize::MAX; MAX_LABELS];
        let mut first_b = [usize::MAX; MAX_LABELS];
        for i in 0..n {
            for (labels, first) in [(&self.labels, &mut first_a), (&other.labels, &mut first_b)] {
                let l = labels[i] as usize;
                if first[l] == usize::MAX {
                    first[l] = i;
                } else {
                    dsu.union(first[l], i);
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|i| dsu.find(i)).collect();
        Self::from_labels(&roots)
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.meet_unchecked(other))
    }

    pub(crate) fn meet_unchecked(&self, other: &Self) -> Self {
        let pairs: Vec<(u8, u8)> =
            self.labels.iter().zip(&other.labels).map(|(&a, &b)| (a, b)).collect();
        Self::from_labels(&pairs)
    }

    /// `self <= other`: every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.refines_unchecked(other))
    }

    pub(crate) fn refines_unchecked(&self, other: &Self) -> bool {
        let mut image = [u8::MAX; MAX_LABELS];
        for (&a, &b) in self.labels.iter().zip(&other.labels) {
            let slot = &mut image[a as usize];
            if *slot == u8::MAX {
                *slot = b;
            } else if *slot != b {
                return false;
            }
        }
        true
    }

    /// Whether the two states jointly connect the whole boundary.
    pub fn is_connected_pair(&self, other: &Self) -> Result<bool> {
        Ok(self.join(other)?.is_top())
    }

    /// Image of the partition under a permutation given as 1-based images:
    /// `sigma[i - 1]` is the image of `i`.
    pub fn conjugate(&self, sigma: &[usize]) -> Result<Self> {
        let n = self.n();
        if sigma.len() != n {
            return Err(Error::NotPermutation(n));
        }
        let mut seen = vec![false; n];
        for &s in sigma {
            if s == 0 || s > n || seen[s - 1] {
                return Err(Error::NotPermutation(n));
            }
            seen[s - 1] = true;
        }
        let mut raw = vec![0u8; n];
        for i in 0..n {
            raw[sigma[i] - 1] = self.labels[i];
        }
        Ok(Self::from_labels(&raw))
    }

    /// States covered by `self`: split exactly one block into two
    /// non-empty parts.
    pub fn co_covers(&self) -> Vec<Self> {
        let mut out = Vec::new();
        for block in self.blocks() {
            if block.len() < 2 {
                continue;
            }
            // The first element stays on one side so each split appears once.
            let rest = &block[1..];
            for mask in 0..(1u32 << rest.len()) - 1 {
                let mut raw: Vec<usize> = self.labels.iter().map(|&l| l as usize).collect();
                for (bit, &e) in rest.iter().enumerate() {
                    if mask & (1 << bit) == 0 {
                        raw[e - 1] = MAX_LABELS;
                    }
                }
                out.push(Self::from_labels(&raw));
            }
        }
        out
    }
}

const MAX_LABELS: usize = 64;

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| b.iter().map(|e| e.to_string()).collect::<String>())
            .collect();
        f.write_str(&text.join("|"))
    }
}

/// Parses the `"13|2"` syntax; single-digit elements, `n` inferred from the
/// largest element.
impl FromStr for Partition {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let bad = || ParseError::Partition(s.to_string());
        let mut blocks = Vec::new();
        let mut n = 0;
        for part in s.trim().split('|') {
            let block: Vec<usize> = part
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_, _>>()?;
            n = n.max(block.iter().copied().max().unwrap_or(0));
            blocks.push(block);
        }
        Partition::from_blocks(n, &blocks).map_err(|_| bad())
    }
}

fn check_bounds(n: usize) -> Result<()> {
    if n == 0 || n > MAX_BOUNDARY {
        return Err(Error::PartitionSizeOutOfBounds(n, MAX_BOUNDARY));
    }
    Ok(())
}

/// All set partitions of `{1..n}`, in restricted-growth-string order.
pub fn all_partitions(n: usize) -> Result<Vec<Partition>> {
    check_bounds(n)?;
    let mut out = Vec::new();
    let mut labels = vec![0u8; n];
    fn grow(i: usize, max: u8, labels: &mut Vec<u8>, out: &mut Vec<Partition>) {
        if i == labels.len() {
            out.push(Partition { labels: labels.clone() });
            return;
        }
        for l in 0..=max + 1 {
            labels[i] = l;
            grow(i + 1, max.max(l), labels, out);
        }
    }
    if n == 1 {
        out.push(Partition::top(1));
    } else {
        grow(1, 0, &mut labels, &mut out);
    }
    Ok(out)
}

/// One `S_n`-conjugation class of connectivity states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Shared block-size multiset, descending.
    pub shape: Vec<usize>,
    /// Members in lexicographic order of their canonical strings.
    pub members: Vec<Partition>,
}

impl Orbit {
    pub fn block_count(&self) -> usize {
        self.shape.len()
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Sort key for an orbit: finer levels first, then larger block sizes.
type OrbitKey = (std::cmp::Reverse<usize>, std::cmp::Reverse<Vec<usize>>);

/// Conjugation classes, listed finest level first and, within a level, by
/// descending block-size multiset.
pub fn orbits(n: usize) -> Result<Vec<Orbit>> {
    let mut groups: BTreeMap<OrbitKey, Vec<Partition>> = BTreeMap::new();
    for p in all_partitions(n)? {
        let shape = p.shape();
        groups
            .entry((std::cmp::Reverse(shape.len()), std::cmp::Reverse(shape)))
            .or_default()
            .push(p);
    }
    Ok(groups
        .into_iter()
        .map(|((_, std::cmp::Reverse(shape)), mut members)| {
            members.sort_by_cached_key(|p| p.to_string());
            Orbit { shape, members }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderVariant {
    #[default]
    Canonical,
    /// Canonical order with every level reversed; still coherent.
    ReversedLevels,
}

/// A linear order on all partitions of `{1..n}` that extends strict
/// refinement (finer states first).
#[derive(Debug, Clone)]
pub struct CoherentOrder {
    n: usize,
    states: Vec<Partition>,
    index: HashMap<Partition, usize>,
    orbit_of: Vec<usize>,
    orbits: Vec<Orbit>,
}

impl CoherentOrder {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_variant(n, OrderVariant::Canonical)
    }

    pub fn with_variant(n: usize, variant: OrderVariant) -> Result<Self> {
        let orbits = orbits(n)?;
        let mut states = Vec::new();
        let mut orbit_of = Vec::new();
        let mut level_start = 0;
        for (k, orbit) in orbits.iter().enumerate() {
            states.extend(orbit.members.iter().cloned());
            orbit_of.extend(std::iter::repeat_n(k, orbit.size()));
            let level_ends = orbits.get(k + 1).is_none_or(|o| o.block_count() != orbit.block_count());
            if level_ends {
                if variant == OrderVariant::ReversedLevels {
                    states[level_start..].reverse();
                    orbit_of[level_start..].reverse();
                }
                level_start = states.len();
            }
        }
        let index = states.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Ok(Self { n, states, index, orbit_of, orbits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Partition] {
        &self.states
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    /// Orbit index (into [`Self::orbits`]) of the state at `i`.
    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbit_of[i]
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|p| p.to_string()).collect()
    }
}

pub fn coherent_order(n: usize) -> Result<CoherentOrder> {
    CoherentOrder::new(n)
}

/// Bell numbers by the Bell triangle.
pub fn bell(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}
