#![allow(dead_code)]

use mwis_core::{Weight, WeightedGraph};
use rand::Rng;

pub fn graph(weights: &[Weight], edges: &[(usize, usize)]) -> WeightedGraph {
    WeightedGraph::from_edges(weights.to_vec(), edges).unwrap()
}

/// G(n, p) with weights uniform in `1..=max_weight`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64, max_weight: Weight) -> WeightedGraph {
    let weights = (0..n).map(|_| rng.gen_range(1..=max_weight)).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    WeightedGraph::from_edges(weights, &edges).unwrap()
}

pub fn cycle(n: usize, weight: Weight) -> WeightedGraph {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    WeightedGraph::from_edges(vec![weight; n], &edges).unwrap()
}

pub fn path(weights: &[Weight]) -> WeightedGraph {
    let edges: Vec<(usize, usize)> = (1..weights.len()).map(|i| (i - 1, i)).collect();
    graph(weights, &edges)
}

pub fn star(center: Weight, leaves: &[Weight]) -> WeightedGraph {
    let mut weights = vec![center];
    weights.extend_from_slice(leaves);
    let edges: Vec<(usize, usize)> = (1..=leaves.len()).map(|i| (0, i)).collect();
    graph(&weights, &edges)
}
