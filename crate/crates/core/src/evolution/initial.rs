//! Constructors for initial population members.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::CompactGraph;
use crate::local_search::{maximize_greedy, GreedyOrder, SearchState};

use super::Individual;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialStrategy {
    /// Free vertices in uniformly random order.
    RandomMwis,
    /// Free vertices heaviest first.
    GreedyWeightMwis,
    /// Repeatedly the free vertex with the fewest free neighbors.
    GreedyDegreeMwis,
    /// Cover built lightest first, then complemented.
    GreedyWeightVc,
    /// Cover built by most newly covered edges, then complemented.
    GreedyDegreeVc,
}

impl InitialStrategy {
    pub const ALL: [InitialStrategy; 5] = [
        InitialStrategy::RandomMwis,
        InitialStrategy::GreedyWeightMwis,
        InitialStrategy::GreedyDegreeMwis,
        InitialStrategy::GreedyWeightVc,
        InitialStrategy::GreedyDegreeVc,
    ];
}

/// Vertex order with random tie-breaking: shuffle, then stable sort.
fn shuffled_by<R: Rng + ?Sized, K: Ord>(n: usize, rng: &mut R, key: impl Fn(usize) -> K) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.sort_by_key(|&v| key(v));
    order
}

fn insert_in_order(state: &mut SearchState<'_>, order: &[usize]) {
    for &v in order {
        if state.is_free(v) {
            state.insert(v);
        }
    }
}

fn greedy_degree<R: Rng + ?Sized>(g: &CompactGraph, state: &mut SearchState<'_>, rng: &mut R) {
    let n = g.len();
    let mut residual: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let ties: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
    let mut heap: BinaryHeap<Reverse<(usize, u64, usize)>> = (0..n).map(|v| Reverse((residual[v], ties[v], v))).collect();
    while let Some(Reverse((d, _, v))) = heap.pop() {
        if !state.is_free(v) || d != residual[v] {
            continue;
        }
        let newly_blocked: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| state.is_free(u)).collect();
        state.insert(v);
        for u in newly_blocked {
            for &w in g.neighbors(u) {
                if state.is_free(w) {
                    residual[w] -= 1;
                    heap.push(Reverse((residual[w], ties[w], w)));
                }
            }
        }
    }
}

fn complement_of_cover(g: &CompactGraph, cover: &[bool]) -> Vec<bool> {
    debug_assert!(g.bits_cover(cover));
    cover.iter().map(|&c| !c).collect()
}

fn weight_cover<R: Rng + ?Sized>(g: &CompactGraph, rng: &mut R) -> Vec<bool> {
    let order = shuffled_by(g.len(), rng, |v| g.weight(v));
    let mut cover = vec![false; g.len()];
    for v in order {
        if g.neighbors(v).iter().any(|&u| !cover[u]) {
            cover[v] = true;
        }
    }
    cover
}

fn degree_cover<R: Rng + ?Sized>(g: &CompactGraph, rng: &mut R) -> Vec<bool> {
    let n = g.len();
    let mut uncovered: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let ties: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
    let mut heap: BinaryHeap<(usize, u64, usize)> = (0..n).filter(|&v| uncovered[v] > 0).map(|v| (uncovered[v], ties[v], v)).collect();
    let mut cover = vec![false; n];
    while let Some((d, _, v)) = heap.pop() {
        if cover[v] || d != uncovered[v] || d == 0 {
            continue;
        }
        cover[v] = true;
        uncovered[v] = 0;
        for &u in g.neighbors(v) {
            if !cover[u] {
                uncovered[u] -= 1;
                if uncovered[u] > 0 {
                    heap.push((uncovered[u], ties[u], u));
                }
            }
        }
    }
    cover
}

/// Builds a maximal independent set of `g` with the given constructor.
pub fn build_initial<R: Rng + ?Sized>(g: &CompactGraph, strategy: InitialStrategy, rng: &mut R) -> Individual {
    let mut state = match strategy {
        InitialStrategy::RandomMwis => {
            let mut s = SearchState::new(g);
            maximize_greedy(&mut s, GreedyOrder::UniformRandom, rng);
            s
        }
        InitialStrategy::GreedyWeightMwis => {
            let mut s = SearchState::new(g);
            insert_in_order(&mut s, &shuffled_by(g.len(), rng, |v| Reverse(g.weight(v))));
            s
        }
        InitialStrategy::GreedyDegreeMwis => {
            let mut s = SearchState::new(g);
            greedy_degree(g, &mut s, rng);
            s
        }
        InitialStrategy::GreedyWeightVc => {
            SearchState::from_bits(g, &complement_of_cover(g, &weight_cover(g, rng))).expect("complement of a cover is independent")
        }
        InitialStrategy::GreedyDegreeVc => {
            SearchState::from_bits(g, &complement_of_cover(g, &degree_cover(g, rng))).expect("complement of a cover is independent")
        }
    };
    maximize_greedy(&mut state, GreedyOrder::ByWeight, rng);
    Individual::from_state(&state)
}
