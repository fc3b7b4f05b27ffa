//! Balanced k-way partitions and vertex separators of a kernel snapshot.
//!
//! Blocks are grown breadth-first from spread-out seeds under a size cap and
//! then polished by boundary moves. A vertex separator is read off an edge
//! partition by covering every cut edge with one of its endpoints.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::graph::CompactGraph;

pub const DEFAULT_EPSILON: f64 = 0.03;

const TRIES: usize = 4;
const REFINEMENT_PASSES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("cannot split {live} vertices into {k} blocks")]
    InvalidBlockCount { k: usize, live: usize },
    #[error("partition belongs to graph generation {partition}, graph is at {graph}")]
    Stale { partition: u64, graph: u64 },
    #[error("partition labels {got} vertices, graph has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vertex {vertex} has label {label} outside 0..{k}")]
    LabelOutOfRange { vertex: usize, label: u32, k: usize },
    #[error("block {block} holds {size} vertices, limit is {limit}")]
    Unbalanced { block: usize, size: usize, limit: usize },
    #[error("edge ({0}, {1}) joins two different blocks of a separator partition")]
    CrossEdge(usize, usize),
}

/// A k-way partition of the vertices of a [`CompactGraph`]. In separator
/// mode some vertices carry the [`Partition::SEPARATOR`] label instead of a
/// block and no edge joins two distinct blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    k: usize,
    labels: Vec<u32>,
    epsilon: f64,
    generation: u64,
    separator: bool,
}

/// Size cap of one block: `floor((1 + epsilon) * ceil(n / k))`.
pub fn max_block_size(n: usize, k: usize, epsilon: f64) -> usize {
    let ideal = n.div_ceil(k);
    (((1.0 + epsilon) * ideal as f64) + 1e-9).floor() as usize
}

impl Partition {
    pub const SEPARATOR: u32 = u32::MAX;

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn is_separator(&self) -> bool {
        self.separator
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Block of `v`, or `None` for a separator vertex.
    pub fn block_of(&self, v: usize) -> Option<usize> {
        match self.labels[v] {
            Self::SEPARATOR => None,
            b => Some(b as usize),
        }
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            if l != Self::SEPARATOR {
                sizes[l as usize] += 1;
            }
        }
        sizes
    }

    pub fn separator_vertices(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&v| self.labels[v] == Self::SEPARATOR).collect()
    }

    /// Edges whose endpoints lie in two different blocks.
    pub fn cut_edges(&self, g: &CompactGraph) -> Vec<(usize, usize)> {
        g.edges()
            .filter(|&(u, v)| {
                let (a, b) = (self.labels[u], self.labels[v]);
                a != b && a != Self::SEPARATOR && b != Self::SEPARATOR
            })
            .collect()
    }

    pub fn check_fresh(&self, g: &CompactGraph) -> Result<(), PartitionError> {
        if self.generation != g.generation() || self.labels.len() != g.len() {
            return Err(PartitionError::Stale { partition: self.generation, graph: g.generation() });
        }
        Ok(())
    }

    /// Full check: labels in range, blocks within the size cap, and in
    /// separator mode no edge between distinct blocks.
    pub fn validate(&self, g: &CompactGraph) -> Result<(), PartitionError> {
        if self.labels.len() != g.len() {
            return Err(PartitionError::LengthMismatch { expected: g.len(), got: self.labels.len() });
        }
        self.check_fresh(g)?;
        for (v, &l) in self.labels.iter().enumerate() {
            if (l as usize) >= self.k && !(self.separator && l == Self::SEPARATOR) {
                return Err(PartitionError::LabelOutOfRange { vertex: v, label: l, k: self.k });
            }
        }
        let limit = max_block_size(g.len(), self.k, self.epsilon);
        for (block, &size) in self.block_sizes().iter().enumerate() {
            if size > limit {
                return Err(PartitionError::Unbalanced { block, size, limit });
            }
        }
        if self.separator {
            if let Some(&(u, v)) = self.cut_edges(g).first() {
                return Err(PartitionError::CrossEdge(u, v));
            }
        }
        Ok(())
    }

    /// Moves one endpoint of every cut edge into the separator. The endpoint
    /// with more uncovered cut edges goes first; ties prefer the higher graph
    /// degree, then the lower id.
    pub fn to_separator(&self, g: &CompactGraph) -> Partition {
        let cut = self.cut_edges(g);
        let mut cut_degree = vec![0usize; g.len()];
        for &(u, v) in &cut {
            cut_degree[u] += 1;
            cut_degree[v] += 1;
        }
        let mut labels = self.labels.clone();
        for &(u, v) in &cut {
            if labels[u] == Self::SEPARATOR || labels[v] == Self::SEPARATOR {
                continue;
            }
            let key = |x: usize| (cut_degree[x], g.degree(x), std::cmp::Reverse(x));
            let pick = if key(u) >= key(v) { u } else { v };
            labels[pick] = Self::SEPARATOR;
            for &w in g.neighbors(pick) {
                if labels[w] != Self::SEPARATOR && self.labels[w] != self.labels[pick] {
                    cut_degree[w] -= 1;
                }
            }
            cut_degree[pick] = 0;
        }
        Partition { k: self.k, labels, epsilon: self.epsilon, generation: self.generation, separator: true }
    }
}

fn bfs_distances(g: &CompactGraph, source: usize, dist: &mut [usize]) {
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w] > dist[u] + 1 {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
}

/// First seed: the vertex farthest from a random start in its component.
/// Every further seed: the vertex farthest from all seeds so far, with
/// unreachable vertices counting as infinitely far.
fn pick_seeds<R: Rng + ?Sized>(g: &CompactGraph, k: usize, rng: &mut R) -> Vec<usize> {
    let n = g.len();
    let start = rng.gen_range(0..n);
    let mut probe = vec![usize::MAX; n];
    bfs_distances(g, start, &mut probe);
    let first = (0..n).filter(|&v| probe[v] != usize::MAX).max_by_key(|&v| (probe[v], std::cmp::Reverse(v))).unwrap_or(start);

    let mut dist = vec![usize::MAX; n];
    let mut seeds = vec![first];
    bfs_distances(g, first, &mut dist);
    while seeds.len() < k {
        let next = (0..n).filter(|v| !seeds.contains(v)).max_by_key(|&v| (dist[v], std::cmp::Reverse(v))).expect("k <= n");
        seeds.push(next);
        bfs_distances(g, next, &mut dist);
    }
    seeds
}

fn grow(g: &CompactGraph, seeds: &[usize], limit: usize) -> Vec<u32> {
    const UNSET: u32 = u32::MAX;
    let n = g.len();
    let k = seeds.len();
    let mut labels = vec![UNSET; n];
    let mut sizes = vec![0usize; k];
    let mut frontier: Vec<VecDeque<usize>> = vec![VecDeque::new(); k];
    let assign = |v: usize, b: usize, labels: &mut Vec<u32>, sizes: &mut Vec<usize>, frontier: &mut Vec<VecDeque<usize>>| {
        labels[v] = b as u32;
        sizes[b] += 1;
        frontier[b].extend(g.neighbors(v).iter().copied().filter(|&w| labels[w] == UNSET));
    };
    for (b, &s) in seeds.iter().enumerate() {
        assign(s, b, &mut labels, &mut sizes, &mut frontier);
    }
    let mut assigned = k;
    let mut next_leftover = 0;
    while assigned < n {
        let mut order: Vec<usize> = (0..k).filter(|&b| sizes[b] < limit).collect();
        order.sort_by_key(|&b| (sizes[b], b));
        let mut grew = false;
        for b in order {
            while let Some(v) = frontier[b].pop_front() {
                if labels[v] == UNSET {
                    assign(v, b, &mut labels, &mut sizes, &mut frontier);
                    grew = true;
                    break;
                }
            }
            if grew {
                break;
            }
        }
        if !grew {
            while labels[next_leftover] != UNSET {
                next_leftover += 1;
            }
            let b = (0..k).filter(|&b| sizes[b] < limit).min_by_key(|&b| (sizes[b], b)).expect("k blocks of the cap hold n vertices");
            assign(next_leftover, b, &mut labels, &mut sizes, &mut frontier);
        }
        assigned += 1;
    }
    labels
}

/// Moves boundary vertices to the neighboring block holding most of their
/// neighbors while that strictly reduces the cut and respects the cap.
fn refine(g: &CompactGraph, labels: &mut [u32], k: usize, limit: usize) {
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l as usize] += 1;
    }
    let mut conn = vec![0usize; k];
    for _ in 0..REFINEMENT_PASSES {
        let mut moved = false;
        for v in 0..g.len() {
            let home = labels[v] as usize;
            if sizes[home] <= 1 || g.neighbors(v).iter().all(|&w| labels[w] as usize == home) {
                continue;
            }
            for &w in g.neighbors(v) {
                conn[labels[w] as usize] += 1;
            }
            let mut best = home;
            for &w in g.neighbors(v) {
                let b = labels[w] as usize;
                if b != home && sizes[b] < limit && (conn[b] > conn[best] || (conn[b] == conn[best] && best != home && b < best)) {
                    best = b;
                }
            }
            for &w in g.neighbors(v) {
                conn[labels[w] as usize] = 0;
            }
            if best != home {
                labels[v] = best as u32;
                sizes[home] -= 1;
                sizes[best] += 1;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
}

/// A balanced k-way partition with a small edge cut.
pub fn edge_partition<R: Rng + ?Sized>(g: &CompactGraph, k: usize, epsilon: f64, rng: &mut R) -> Result<Partition, PartitionError> {
    let n = g.len();
    if k < 2 || k > n {
        return Err(PartitionError::InvalidBlockCount { k, live: n });
    }
    let limit = max_block_size(n, k, epsilon);
    let mut best: Option<(usize, Vec<u32>)> = None;
    for _ in 0..TRIES {
        let seeds = pick_seeds(g, k, rng);
        let mut labels = grow(g, &seeds, limit);
        refine(g, &mut labels, k, limit);
        let cut = g.edges().filter(|&(u, v)| labels[u] != labels[v]).count();
        if best.as_ref().is_none_or(|(c, _)| cut < *c) {
            best = Some((cut, labels));
        }
    }
    let labels = best.expect("at least one try").1;
    Ok(Partition { k, labels, epsilon, generation: g.generation(), separator: false })
}

/// A k-way vertex separator derived from [`edge_partition`].
pub fn vertex_separator<R: Rng + ?Sized>(g: &CompactGraph, k: usize, epsilon: f64, rng: &mut R) -> Result<Partition, PartitionError> {
    Ok(edge_partition(g, k, epsilon, rng)?.to_separator(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockFilter {
    TwoWay,
    Any,
}

#[derive(Debug, Clone)]
struct PoolEntry {
    edge: Partition,
    separator: Option<Partition>,
}

/// A fixed number of precomputed partitions of the current kernel, rebuilt
/// whenever the kernel generation changes. Block counts are drawn from the
/// powers of two up to `max_blocks`.
#[derive(Debug, Clone)]
pub struct PartitionPool {
    capacity: usize,
    max_blocks: usize,
    epsilon: f64,
    generation: Option<u64>,
    entries: Vec<PoolEntry>,
}

impl PartitionPool {
    pub fn new(capacity: usize, max_blocks: usize, epsilon: f64) -> Self {
        Self { capacity: capacity.max(1), max_blocks: max_blocks.max(2), epsilon, generation: None, entries: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn block_counts(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.edge.k()).collect()
    }

    fn choices(&self, n: usize) -> Vec<usize> {
        let cap = self.max_blocks.min(n);
        std::iter::successors(Some(2usize), |k| Some(k * 2)).take_while(|&k| k <= cap).collect()
    }

    fn refill<R: Rng + ?Sized>(&mut self, g: &CompactGraph, rng: &mut R) -> Result<(), PartitionError> {
        self.entries.clear();
        self.generation = Some(g.generation());
        let choices = self.choices(g.len());
        if choices.is_empty() {
            return Err(PartitionError::InvalidBlockCount { k: 2, live: g.len() });
        }
        for _ in 0..self.capacity {
            let k = *choices.choose(rng).expect("nonempty");
            self.entries.push(PoolEntry { edge: edge_partition(g, k, self.epsilon, rng)?, separator: None });
        }
        Ok(())
    }

    /// A uniformly random pool entry matching `filter`, as a separator if
    /// requested. Stale entries are discarded and the pool refilled first.
    pub fn fetch<R: Rng + ?Sized>(&mut self, g: &CompactGraph, want_separator: bool, filter: BlockFilter, rng: &mut R) -> Result<Partition, PartitionError> {
        if self.generation != Some(g.generation()) || self.entries.is_empty() {
            self.refill(g, rng)?;
        }
        let matching: Vec<usize> = (0..self.entries.len()).filter(|&i| filter == BlockFilter::Any || self.entries[i].edge.k() == 2).collect();
        let index = match matching.choose(rng) {
            Some(&i) => i,
            None => {
                let slot = rng.gen_range(0..self.entries.len());
                self.entries[slot] = PoolEntry { edge: edge_partition(g, 2, self.epsilon, rng)?, separator: None };
                slot
            }
        };
        let entry = &mut self.entries[index];
        if want_separator {
            Ok(entry.separator.get_or_insert_with(|| entry.edge.to_separator(g)).clone())
        } else {
            Ok(entry.edge.clone())
        }
    }
}
