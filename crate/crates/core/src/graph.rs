//! Weighted undirected graphs.
//!
//! [`WeightedGraph`] is the mutable graph rewritten by the data reductions.
//! Deleting a vertex only clears its liveness flag; adjacency lists keep the
//! stale entries and every neighbor view filters them lazily. Undoing a
//! deletion is therefore a flag flip plus count bookkeeping.
//!
//! [`CompactGraph`] is an immutable CSR snapshot of the live part of a
//! [`WeightedGraph`], relabeled to `0..n`. Local search, partitioning and the
//! evolutionary operators all work on snapshots.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;
pub type Weight = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("edge endpoint {endpoint} out of range for {n} vertices")]
    EndpointOutOfRange { endpoint: Vertex, n: usize },
    #[error("vertex {0} is not alive")]
    DeadVertex(Vertex),
    #[error("vertex {0} is already alive")]
    AliveVertex(Vertex),
    #[error("vertex {0} does not exist")]
    UnknownVertex(Vertex),
}

#[derive(Clone, Debug)]
pub struct WeightedGraph {
    n_original: usize,
    adj: Vec<Vec<Vertex>>,
    weight: Vec<Weight>,
    alive: Vec<bool>,
    live_count: usize,
    live_edges: usize,
    generation: u64,
}

impl WeightedGraph {
    /// Builds a graph on `weights.len()` vertices. Duplicate edges (in either
    /// orientation) are merged.
    pub fn from_edges(weights: Vec<Weight>, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let n = weights.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for endpoint in [u, v] {
                if endpoint >= n {
                    return Err(GraphError::EndpointOutOfRange { endpoint, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut live_edges = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            live_edges += list.len();
        }
        Ok(Self {
            n_original: n,
            adj,
            weight: weights,
            alive: vec![true; n],
            live_count: n,
            live_edges: live_edges / 2,
            generation: 0,
        })
    }

    pub fn empty() -> Self {
        Self::from_edges(Vec::new(), &[]).expect("empty graph is valid")
    }

    /// Number of vertices the graph was constructed with.
    pub fn n_original(&self) -> usize {
        self.n_original
    }

    /// Number of vertex ids ever allocated, including fold vertices and dead ones.
    pub fn capacity(&self) -> usize {
        self.adj.len()
    }

    pub fn live_count(&self) -> usize {
        self.live_count
    }

    pub fn live_edges(&self) -> usize {
        self.live_edges
    }

    pub fn is_empty(&self) -> bool {
        self.live_count == 0
    }

    /// Bumped on every mutation; snapshots and partitions compare against it.
    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v < self.adj.len()
    }

    pub fn is_alive(&self, v: Vertex) -> bool {
        v < self.alive.len() && self.alive[v]
    }

    pub fn weight(&self, v: Vertex) -> Weight {
        self.weight[v]
    }

    pub fn set_weight(&mut self, v: Vertex, w: Weight) {
        self.weight[v] = w;
        self.generation += 1;
    }

    pub fn live_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.adj.len()).filter(move |&v| self.alive[v])
    }

    /// Alive neighbors of `v`.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj[v].iter().copied().filter(move |&u| self.alive[u])
    }

    /// Raw adjacency entries of `v`, dead neighbors included.
    pub fn raw_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).count()
    }

    pub fn neighborhood_weight(&self, v: Vertex) -> Weight {
        self.neighbors(v).map(|u| self.weight[u]).sum()
    }

    /// True if `u` and `v` are adjacent (liveness is not checked).
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() { (u, v) } else { (v, u) };
        self.adj[a].contains(&b)
    }

    pub fn remove_vertex(&mut self, v: Vertex) -> Result<(), GraphError> {
        if !self.contains(v) {
            return Err(GraphError::UnknownVertex(v));
        }
        if !self.alive[v] {
            return Err(GraphError::DeadVertex(v));
        }
        let deg = self.degree(v);
        self.alive[v] = false;
        self.live_count -= 1;
        self.live_edges -= deg;
        self.generation += 1;
        Ok(())
    }

    /// Inverse of [`remove_vertex`](Self::remove_vertex).
    pub fn restore_vertex(&mut self, v: Vertex) -> Result<(), GraphError> {
        if !self.contains(v) {
            return Err(GraphError::UnknownVertex(v));
        }
        if self.alive[v] {
            return Err(GraphError::AliveVertex(v));
        }
        self.alive[v] = true;
        self.live_count += 1;
        self.live_edges += self.degree(v);
        self.generation += 1;
        Ok(())
    }

    /// Adds the edge `{u, v}`. The caller guarantees it is not present yet.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) {
        debug_assert!(u != v && !self.has_edge(u, v));
        self.adj[u].push(v);
        self.adj[v].push(u);
        if self.alive[u] && self.alive[v] {
            self.live_edges += 1;
        }
        self.generation += 1;
    }

    /// Physically deletes the edge `{u, v}` if present.
    pub fn remove_edge(&mut self, u: Vertex, v: Vertex) -> bool {
        let Some(i) = self.adj[u].iter().rposition(|&x| x == v) else {
            return false;
        };
        self.adj[u].remove(i);
        if let Some(j) = self.adj[v].iter().rposition(|&x| x == u) {
            self.adj[v].remove(j);
        }
        if self.alive[u] && self.alive[v] {
            self.live_edges -= 1;
        }
        self.generation += 1;
        true
    }

    /// Appends a fresh alive vertex adjacent to `neighbors` and returns its id.
    pub fn push_vertex(&mut self, weight: Weight, neighbors: &[Vertex]) -> Vertex {
        let id = self.adj.len();
        self.adj.push(Vec::with_capacity(neighbors.len()));
        self.weight.push(weight);
        self.alive.push(true);
        self.live_count += 1;
        for &u in neighbors {
            debug_assert!(u != id);
            self.adj[id].push(u);
            self.adj[u].push(id);
            if self.alive[u] {
                self.live_edges += 1;
            }
        }
        self.generation += 1;
        id
    }

    /// Removes the most recently pushed vertex. Only valid in LIFO order.
    pub fn pop_vertex(&mut self, v: Vertex) -> Result<(), GraphError> {
        if v + 1 != self.adj.len() {
            return Err(GraphError::UnknownVertex(v));
        }
        let neighbors = self.adj.pop().unwrap_or_default();
        let was_alive = self.alive.pop().unwrap_or(false);
        self.weight.pop();
        for u in neighbors {
            if let Some(j) = self.adj[u].iter().rposition(|&x| x == v) {
                self.adj[u].remove(j);
            }
            if was_alive && self.alive[u] {
                self.live_edges -= 1;
            }
        }
        if was_alive {
            self.live_count -= 1;
        }
        self.generation += 1;
        Ok(())
    }

    pub fn total_weight(&self) -> Weight {
        self.live_vertices().map(|v| self.weight[v]).sum()
    }

    /// Walks the whole structure and checks symmetry, loop freedom and the
    /// cached counters.
    pub fn audit(&self) -> Result<(), String> {
        let mut live = 0;
        let mut entries = 0;
        for v in 0..self.adj.len() {
            let mut seen = self.adj[v].clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(format!("duplicate neighbor entry at {v}"));
            }
            for &u in &self.adj[v] {
                if u == v {
                    return Err(format!("self-loop at {v}"));
                }
                if u >= self.adj.len() || !self.adj[u].contains(&v) {
                    return Err(format!("asymmetric adjacency {v} -> {u}"));
                }
            }
            if self.alive[v] {
                live += 1;
                entries += self.degree(v);
            }
        }
        if live != self.live_count {
            return Err(format!("live_count {} but {} alive flags", self.live_count, live));
        }
        if entries != 2 * self.live_edges {
            return Err(format!("live_edges {} but {} live entries", self.live_edges, entries));
        }
        Ok(())
    }

    /// Sorted live neighbor lists with weights; equal structures compare equal
    /// regardless of internal adjacency order.
    pub fn live_signature(&self) -> Vec<(Vertex, Weight, Vec<Vertex>)> {
        self.live_vertices()
            .map(|v| {
                let mut nbrs: Vec<_> = self.neighbors(v).collect();
                nbrs.sort_unstable();
                (v, self.weight[v], nbrs)
            })
            .collect()
    }

    pub fn compact(&self) -> CompactGraph {
        CompactGraph::from_graph(self)
    }
}

/// A sorted, duplicate-free set of vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn members(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(i) => {
                self.0.insert(i, v);
                true
            }
        }
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        match self.0.binary_search(&v) {
            Ok(i) => {
                self.0.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn to_bitvector(&self, n: usize) -> Vec<bool> {
        let mut bits = vec![false; n];
        for &v in &self.0 {
            if v < n {
                bits[v] = true;
            }
        }
        bits
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut v: Vec<_> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

impl From<Vec<Vertex>> for VertexSet {
    fn from(v: Vec<Vertex>) -> Self {
        v.into_iter().collect()
    }
}

/// Why a set failed the independence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DeadMember(Vertex),
    Edge(Vertex, Vertex),
}

pub fn check_independent(g: &WeightedGraph, s: &VertexSet) -> Result<(), Violation> {
    for v in s.iter() {
        if !g.is_alive(v) {
            return Err(Violation::DeadMember(v));
        }
    }
    for v in s.iter() {
        if let Some(u) = g.neighbors(v).find(|&u| u > v && s.contains(u)) {
            return Err(Violation::Edge(v, u));
        }
    }
    Ok(())
}

pub fn is_independent(g: &WeightedGraph, s: &VertexSet) -> bool {
    check_independent(g, s).is_ok()
}

pub fn set_weight(g: &WeightedGraph, s: &VertexSet) -> Weight {
    s.iter().map(|v| g.weight(v)).sum()
}

/// Immutable CSR view of the live part of a [`WeightedGraph`].
#[derive(Clone, Debug)]
pub struct CompactGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<Weight>,
    origin: Vec<Vertex>,
    generation: u64,
}

impl CompactGraph {
    pub fn from_graph(g: &WeightedGraph) -> Self {
        let origin: Vec<Vertex> = g.live_vertices().collect();
        let mut local = vec![usize::MAX; g.capacity()];
        for (i, &v) in origin.iter().enumerate() {
            local[v] = i;
        }
        let mut offsets = Vec::with_capacity(origin.len() + 1);
        let mut targets = Vec::with_capacity(2 * g.live_edges());
        offsets.push(0);
        for &v in &origin {
            let start = targets.len();
            targets.extend(g.neighbors(v).map(|u| local[u]));
            targets[start..].sort_unstable();
            offsets.push(targets.len());
        }
        let weights = origin.iter().map(|&v| g.weight(v)).collect();
        Self { offsets, targets, weights, origin, generation: g.generation() }
    }

    /// Convenience constructor for tests and tools; edges are deduplicated.
    pub fn from_edges(weights: Vec<Weight>, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        WeightedGraph::from_edges(weights, edges).map(|g| g.compact())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn weight(&self, v: usize) -> Weight {
        self.weights[v]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    /// Id of local vertex `v` in the graph this snapshot was taken from.
    pub fn origin(&self, v: usize) -> Vertex {
        self.origin[v]
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn bits_weight(&self, bits: &[bool]) -> Weight {
        bits.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| self.weights[v]).sum()
    }

    pub fn bits_independent(&self, bits: &[bool]) -> bool {
        self.edges().all(|(u, v)| !(bits[u] && bits[v]))
    }

    /// Independent and no vertex can be added without breaking independence.
    pub fn bits_maximal(&self, bits: &[bool]) -> bool {
        (0..self.len()).all(|v| bits[v] || self.neighbors(v).iter().any(|&u| bits[u]))
    }

    pub fn bits_cover(&self, cover: &[bool]) -> bool {
        self.edges().all(|(u, v)| cover[u] || cover[v])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> WeightedGraph {
        WeightedGraph::from_edges(vec![1, 1, 1], &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn builds_small_graphs() {
        let g = WeightedGraph::from_edges(vec![3, 4], &[(0, 1)]).unwrap();
        assert_eq!((g.live_count(), g.live_edges()), (2, 1));

        let g = WeightedGraph::from_edges(vec![7], &[]).unwrap();
        assert_eq!((g.live_count(), g.live_edges(), g.weight(0)), (1, 0, 7));

        let g = WeightedGraph::from_edges(vec![1, 1], &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.live_edges(), 1);
        g.audit().unwrap();
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(WeightedGraph::from_edges(vec![1, 1], &[(1, 1)]).unwrap_err(), GraphError::SelfLoop(1));
        assert!(matches!(
            WeightedGraph::from_edges(vec![1, 1], &[(0, 2)]),
            Err(GraphError::EndpointOutOfRange { endpoint: 2, n: 2 })
        ));
    }

    #[test]
    fn removal_bookkeeping() {
        let mut g = triangle();
        g.remove_vertex(0).unwrap();
        assert_eq!((g.live_count(), g.live_edges()), (2, 1));
        assert_eq!(g.remove_vertex(0), Err(GraphError::DeadVertex(0)));
        g.audit().unwrap();

        let mut k2 = WeightedGraph::from_edges(vec![1, 1], &[(0, 1)]).unwrap();
        k2.remove_vertex(0).unwrap();
        k2.remove_vertex(1).unwrap();
        assert!(k2.is_empty());
        assert_eq!(k2.live_edges(), 0);
    }

    #[test]
    fn restore_and_pop_are_inverses() {
        let mut g = triangle();
        let before = g.live_signature();
        g.remove_vertex(1).unwrap();
        let f = g.push_vertex(5, &[0, 2]);
        g.remove_edge(0, 2);
        g.audit().unwrap();
        g.add_edge(0, 2);
        g.pop_vertex(f).unwrap();
        g.restore_vertex(1).unwrap();
        g.audit().unwrap();
        assert_eq!(g.live_signature(), before);
    }

    #[test]
    fn independence_checks() {
        let p3 = WeightedGraph::from_edges(vec![5, 1, 5], &[(0, 1), (1, 2)]).unwrap();
        let ends = VertexSet::from(vec![0, 2]);
        assert!(is_independent(&p3, &ends));
        assert_eq!(set_weight(&p3, &ends), 10);

        let k2 = WeightedGraph::from_edges(vec![1, 1], &[(0, 1)]).unwrap();
        assert_eq!(check_independent(&k2, &VertexSet::from(vec![0, 1])), Err(Violation::Edge(0, 1)));

        assert!(is_independent(&k2, &VertexSet::new()));
        assert_eq!(set_weight(&k2, &VertexSet::new()), 0);

        let mut g = k2.clone();
        g.remove_vertex(0).unwrap();
        assert_eq!(check_independent(&g, &VertexSet::from(vec![0])), Err(Violation::DeadMember(0)));
    }

    #[test]
    fn compact_relabels_live_vertices() {
        let mut g = WeightedGraph::from_edges(vec![1, 2, 3, 4], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        g.remove_vertex(1).unwrap();
        let c = g.compact();
        assert_eq!(c.len(), 3);
        assert_eq!(c.num_edges(), 1);
        assert_eq!(c.origin(1), 2);
        assert_eq!(c.neighbors(1), &[2]);
        assert_eq!(c.weights(), &[1, 3, 4]);
    }

    fn arb_graph() -> impl Strategy<Value = (Vec<Weight>, Vec<(Vertex, Vertex)>)> {
        (1usize..14).prop_flat_map(|n| {
            let edges = proptest::collection::vec((0..n, 0..n), 0..40)
                .prop_map(|es| es.into_iter().filter(|(a, b)| a != b).collect::<Vec<_>>());
            (proptest::collection::vec(0u64..50, n), edges)
        })
    }

    proptest! {
        #[test]
        fn mutations_keep_invariants((weights, edges) in arb_graph(), ops in proptest::collection::vec((0usize..3, 0usize..14), 0..30)) {
            let mut g = WeightedGraph::from_edges(weights, &edges).unwrap();
            let mut removed = Vec::new();
            for (kind, raw) in ops {
                let v = raw % g.capacity();
                match kind {
                    0 => { if g.remove_vertex(v).is_ok() { removed.push(v); } }
                    1 => { if let Some(u) = removed.pop() { g.restore_vertex(u).unwrap(); } }
                    _ => g.set_weight(v, g.weight(v) / 2),
                }
                prop_assert!(g.audit().is_ok());
            }
        }

        #[test]
        fn independence_agrees_with_pairwise((weights, edges) in arb_graph(), mask in any::<u16>()) {
            let g = WeightedGraph::from_edges(weights, &edges).unwrap();
            let s: VertexSet = (0..g.capacity()).filter(|v| mask >> v & 1 == 1).collect();
            let members = s.members();
            let mut pairwise = true;
            for i in 0..members.len() {
                for j in i + 1..members.len() {
                    if edges.contains(&(members[i], members[j])) || edges.contains(&(members[j], members[i])) {
                        pairwise = false;
                    }
                }
            }
            prop_assert_eq!(is_independent(&g, &s), pairwise);
        }
    }
}
