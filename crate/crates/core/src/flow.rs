//! Dinic max-flow and the bipartite minimum-weight vertex cover built on it.

use std::collections::VecDeque;

use crate::graph::Weight;

pub const INFINITE: Weight = Weight::MAX / 4;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    rev: usize,
    cap: Weight,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork {
    arcs: Vec<Vec<Arc>>,
    level: Vec<i32>,
    cursor: Vec<usize>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self { arcs: vec![Vec::new(); nodes], level: vec![-1; nodes], cursor: vec![0; nodes] }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: Weight) {
        let rev_from = self.arcs[to].len() + usize::from(from == to);
        let rev_to = self.arcs[from].len();
        self.arcs[from].push(Arc { to, rev: rev_from, cap });
        self.arcs[to].push(Arc { to: from, rev: rev_to, cap: 0 });
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for a in &self.arcs[u] {
                if a.cap > 0 && self.level[a.to] < 0 {
                    self.level[a.to] = self.level[u] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, limit: Weight) -> Weight {
        if u == t {
            return limit;
        }
        while self.cursor[u] < self.arcs[u].len() {
            let i = self.cursor[u];
            let (to, cap) = (self.arcs[u][i].to, self.arcs[u][i].cap);
            if cap > 0 && self.level[to] == self.level[u] + 1 {
                let pushed = self.dfs(to, t, limit.min(cap));
                if pushed > 0 {
                    self.arcs[u][i].cap -= pushed;
                    let rev = self.arcs[u][i].rev;
                    self.arcs[to][rev].cap += pushed;
                    return pushed;
                }
            }
            self.cursor[u] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> Weight {
        let mut total = 0;
        while self.bfs(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let pushed = self.dfs(s, t, INFINITE);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Nodes reachable from `s` in the residual network; call after
    /// [`max_flow`](Self::max_flow). This is the source side of a minimum cut.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.arcs.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for a in &self.arcs[u] {
                if a.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }
}

/// Minimum-weight vertex cover of a bipartite graph via König's construction:
/// source to each left vertex with its weight, each right vertex to the sink
/// with its weight, infinite arcs along the edges. The cover is the left
/// vertices cut off from the source plus the right vertices still reachable.
///
/// Returns `(left_in_cover, right_in_cover, cover_weight)`.
pub fn bipartite_min_vertex_cover(
    left_weights: &[Weight],
    right_weights: &[Weight],
    edges: &[(usize, usize)],
) -> (Vec<bool>, Vec<bool>, Weight) {
    let nl = left_weights.len();
    let nr = right_weights.len();
    let source = nl + nr;
    let sink = source + 1;
    let mut net = FlowNetwork::new(nl + nr + 2);
    for (i, &w) in left_weights.iter().enumerate() {
        net.add_arc(source, i, w);
    }
    for (j, &w) in right_weights.iter().enumerate() {
        net.add_arc(nl + j, sink, w);
    }
    for &(i, j) in edges {
        net.add_arc(i, nl + j, INFINITE);
    }
    let value = net.max_flow(source, sink);
    let reach = net.source_side(source);
    let left = (0..nl).map(|i| !reach[i]).collect();
    let right = (0..nr).map(|j| reach[nl + j]).collect();
    (left, right, value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_max_flow() {
        // CLRS example network, max flow 23.
        let mut net = FlowNetwork::new(6);
        for &(u, v, c) in &[(0, 1, 16), (0, 2, 13), (1, 3, 12), (2, 1, 4), (2, 4, 14), (3, 2, 9), (3, 5, 20), (4, 3, 7), (4, 5, 4)] {
            net.add_arc(u, v, c);
        }
        assert_eq!(net.max_flow(0, 5), 23);
    }

    #[test]
    fn single_edge_cover_takes_lighter_endpoint() {
        let (l, r, w) = bipartite_min_vertex_cover(&[3], &[5], &[(0, 0)]);
        assert_eq!((l, r, w), (vec![true], vec![false], 3));
        let (l, r, w) = bipartite_min_vertex_cover(&[7], &[2], &[(0, 0)]);
        assert_eq!((l, r, w), (vec![false], vec![true], 2));
    }

    #[test]
    fn cover_matches_enumeration() {
        // left {a: 2, b: 2}, right {c: 3}, edges a-c, b-c: cover {c} weight 3.
        let (l, r, w) = bipartite_min_vertex_cover(&[2, 2], &[3], &[(0, 0), (1, 0)]);
        assert_eq!(w, 3);
        assert_eq!((l, r), (vec![false, false], vec![true]));
    }
}
