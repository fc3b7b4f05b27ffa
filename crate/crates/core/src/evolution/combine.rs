//! Recombination of parent solutions along a partition.
//!
//! Each operator returns raw offspring bitvectors. Separator-based offspring
//! are independent by construction; edge-partition offspring are made
//! independent by completing a vertex cover before taking its complement.
//! Callers still maximize and improve the result.

use thiserror::Error;

use crate::flow::bipartite_min_vertex_cover;
use crate::graph::{CompactGraph, Weight};
use crate::partition::{Partition, PartitionError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombineOp {
    VertexSeparator,
    MultiwayVertexSeparator,
    EdgeSeparator,
    MultiwayEdgeSeparator,
}

impl CombineOp {
    pub const ALL: [CombineOp; 4] = [CombineOp::VertexSeparator, CombineOp::MultiwayVertexSeparator, CombineOp::EdgeSeparator, CombineOp::MultiwayEdgeSeparator];

    pub fn wants_separator(self) -> bool {
        matches!(self, CombineOp::VertexSeparator | CombineOp::MultiwayVertexSeparator)
    }

    pub fn is_two_way(self) -> bool {
        matches!(self, CombineOp::VertexSeparator | CombineOp::EdgeSeparator)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CombineError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("operator needs a {expected} partition")]
    WrongPartition { expected: &'static str },
    #[error("operator needs {expected} parents, got {got}")]
    ParentCount { expected: usize, got: usize },
    #[error("parent {0} is not an independent set of the graph")]
    InvalidParent(usize),
}

fn check(g: &CompactGraph, part: &Partition, parents: &[&[bool]], separator: bool, two_way: bool) -> Result<(), CombineError> {
    part.check_fresh(g)?;
    if part.is_separator() != separator {
        return Err(CombineError::WrongPartition { expected: if separator { "vertex separator" } else { "edge" } });
    }
    if two_way && part.k() != 2 {
        return Err(CombineError::WrongPartition { expected: "two-way" });
    }
    let expected = if two_way { 2 } else { part.k() };
    if parents.len() != expected {
        return Err(CombineError::ParentCount { expected, got: parents.len() });
    }
    for (i, p) in parents.iter().enumerate() {
        if p.len() != g.len() || !g.bits_independent(p) {
            return Err(CombineError::InvalidParent(i));
        }
    }
    Ok(())
}

/// `score[i][j]`: weight of the vertices of block `j` selected by `pick(i, v)`.
fn block_scores(g: &CompactGraph, part: &Partition, count: usize, pick: impl Fn(usize, usize) -> bool) -> Vec<Vec<Weight>> {
    let mut score = vec![vec![0; part.k()]; count];
    for v in 0..g.len() {
        if let Some(b) = part.block_of(v) {
            for (i, row) in score.iter_mut().enumerate() {
                if pick(i, v) {
                    row[b] += g.weight(v);
                }
            }
        }
    }
    score
}

/// O1 takes block 0 from `a` and block 1 from `b`; O2 the other way round.
/// Separator vertices stay out.
pub fn combine_vertex_separator(g: &CompactGraph, part: &Partition, a: &[bool], b: &[bool]) -> Result<(Vec<bool>, Vec<bool>), CombineError> {
    check(g, part, &[a, b], true, true)?;
    let take = |first: &[bool], second: &[bool]| -> Vec<bool> {
        (0..g.len())
            .map(|v| match part.block_of(v) {
                Some(0) => first[v],
                Some(_) => second[v],
                None => false,
            })
            .collect()
    };
    Ok((take(a, b), take(b, a)))
}

/// Every block is copied from the parent with the heaviest solution inside
/// it, lowest parent index on ties.
pub fn combine_multiway_vertex_separator(g: &CompactGraph, part: &Partition, parents: &[&[bool]]) -> Result<Vec<bool>, CombineError> {
    check(g, part, parents, true, false)?;
    let score = block_scores(g, part, parents.len(), |i, v| parents[i][v]);
    let winner: Vec<usize> = (0..part.k()).map(|j| (0..parents.len()).fold(0, |best, i| if score[i][j] > score[best][j] { i } else { best })).collect();
    Ok((0..g.len()).map(|v| part.block_of(v).is_some_and(|b| parents[winner[b]][v])).collect())
}

/// Covers every edge left uncovered by `cover` with a minimum-weight cover
/// of the bipartite graph those edges form between block 0 and block 1.
fn repair_two_way(g: &CompactGraph, part: &Partition, cover: &mut [bool]) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut index = vec![usize::MAX; g.len()];
    let mut edges = Vec::new();
    for (u, v) in g.edges() {
        if cover[u] || cover[v] {
            continue;
        }
        let (l, r) = if part.block_of(u) == Some(0) { (u, v) } else { (v, u) };
        debug_assert_eq!((part.block_of(l), part.block_of(r)), (Some(0), Some(1)), "uncovered edge inside a block");
        for (x, side) in [(l, &mut left), (r, &mut right)] {
            if index[x] == usize::MAX {
                index[x] = side.len();
                side.push(x);
            }
        }
        edges.push((index[l], index[r]));
    }
    if edges.is_empty() {
        return;
    }
    let lw: Vec<Weight> = left.iter().map(|&v| g.weight(v)).collect();
    let rw: Vec<Weight> = right.iter().map(|&v| g.weight(v)).collect();
    let (lc, rc, _) = bipartite_min_vertex_cover(&lw, &rw, &edges);
    for (i, &v) in left.iter().enumerate() {
        cover[v] |= lc[i];
    }
    for (j, &v) in right.iter().enumerate() {
        cover[v] |= rc[j];
    }
}

/// Works on the complementary vertex covers: block 0 from one parent's cover,
/// block 1 from the other's, cut edges repaired by a minimum-weight bipartite
/// cover, then complemented back.
pub fn combine_edge_separator(g: &CompactGraph, part: &Partition, a: &[bool], b: &[bool]) -> Result<(Vec<bool>, Vec<bool>), CombineError> {
    check(g, part, &[a, b], false, true)?;
    let build = |first: &[bool], second: &[bool]| -> Vec<bool> {
        let mut cover: Vec<bool> = (0..g.len()).map(|v| if part.block_of(v) == Some(0) { !first[v] } else { !second[v] }).collect();
        repair_two_way(g, part, &mut cover);
        debug_assert!(g.bits_cover(&cover));
        cover.into_iter().map(|c| !c).collect()
    };
    Ok((build(a, b), build(b, a)))
}

/// Greedy cover completion: uncovered edges in ascending `(min, max)`
/// order; each gets the endpoint with the smaller weight per uncovered
/// incident edge, lower id on ties.
pub fn greedy_cover_repair(g: &CompactGraph, cover: &mut [bool]) {
    let mut open: Vec<usize> = (0..g.len()).map(|v| if cover[v] { 0 } else { g.neighbors(v).iter().filter(|&&u| !cover[u]).count() }).collect();
    for (u, v) in g.edges() {
        if cover[u] || cover[v] {
            continue;
        }
        // w(u) / open(u) <= w(v) / open(v)
        let lhs = g.weight(u) as u128 * open[v] as u128;
        let rhs = g.weight(v) as u128 * open[u] as u128;
        let pick = if lhs <= rhs { u } else { v };
        cover[pick] = true;
        open[pick] = 0;
        for &w in g.neighbors(pick) {
            if !cover[w] {
                open[w] -= 1;
            }
        }
    }
}

/// Every block takes the cover of the parent whose cover is lightest inside
/// it (lowest parent index on ties); leftover uncovered edges are repaired
/// greedily and the cover is complemented.
pub fn combine_multiway_edge_separator(g: &CompactGraph, part: &Partition, parents: &[&[bool]]) -> Result<Vec<bool>, CombineError> {
    check(g, part, parents, false, false)?;
    let score = block_scores(g, part, parents.len(), |i, v| !parents[i][v]);
    let winner: Vec<usize> = (0..part.k()).map(|j| (0..parents.len()).fold(0, |best, i| if score[i][j] < score[best][j] { i } else { best })).collect();
    let mut cover: Vec<bool> = (0..g.len()).map(|v| !parents[winner[part.block_of(v).expect("edge partition labels every vertex")]][v]).collect();
    greedy_cover_repair(g, &mut cover);
    debug_assert!(g.bits_cover(&cover));
    Ok(cover.into_iter().map(|c| !c).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{edge_partition, vertex_separator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(4)
    }

    #[test]
    fn vertex_separator_on_path() {
        let p3 = CompactGraph::from_edges(vec![5, 1, 5], &[(0, 1), (1, 2)]).unwrap();
        let part = vertex_separator(&p3, 2, 0.03, &mut rng()).unwrap();
        assert_eq!(part.separator_vertices(), vec![1]);
        let left = [true, false, false];
        let right = [false, false, true];
        let (a, b) = if part.block_of(0) == Some(0) { (left, right) } else { (right, left) };
        let (o1, o2) = combine_vertex_separator(&p3, &part, &a, &b).unwrap();
        assert_eq!(o1, vec![true, false, true]);
        assert_eq!(o2, vec![false; 3]);
        let (same, _) = combine_vertex_separator(&p3, &part, &a, &a).unwrap();
        assert_eq!(same, a.to_vec());
    }

    #[test]
    fn edge_repair_takes_lighter_endpoint() {
        let k2 = CompactGraph::from_edges(vec![1, 9], &[(0, 1)]).unwrap();
        let part = edge_partition(&k2, 2, 0.03, &mut rng()).unwrap();
        let light = [true, false];
        let heavy = [false, true];
        let (o1, o2) = combine_edge_separator(&k2, &part, &light, &heavy).unwrap();
        for o in [&o1, &o2] {
            assert!(k2.bits_independent(o));
        }
        // One offspring keeps both endpoints out of the cover; the repair
        // covers the edge with the weight-1 endpoint, leaving vertex 1.
        assert!(o1 == vec![false, true] || o2 == vec![false, true]);
    }

    #[test]
    fn wrong_partition_kind_is_rejected() {
        let p3 = CompactGraph::from_edges(vec![1; 3], &[(0, 1), (1, 2)]).unwrap();
        let edge = edge_partition(&p3, 2, 0.03, &mut rng()).unwrap();
        let a = [true, false, true];
        assert!(matches!(combine_vertex_separator(&p3, &edge, &a, &a), Err(CombineError::WrongPartition { .. })));
        let sep = edge.to_separator(&p3);
        assert!(matches!(combine_edge_separator(&p3, &sep, &a, &a), Err(CombineError::WrongPartition { .. })));
        assert!(matches!(combine_multiway_edge_separator(&p3, &edge, &[&a]), Err(CombineError::ParentCount { expected: 2, got: 1 })));
        assert!(matches!(combine_edge_separator(&p3, &edge, &[true, true, false], &a), Err(CombineError::InvalidParent(0))));
    }

    #[test]
    fn greedy_repair_covers_triangle() {
        let tri = CompactGraph::from_edges(vec![3, 1, 2], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut cover = vec![false; 3];
        greedy_cover_repair(&tri, &mut cover);
        assert!(tri.bits_cover(&cover));
        assert_eq!(cover, vec![false, true, true]);
    }
}
