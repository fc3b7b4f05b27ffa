//! Weighted local search on a compact kernel snapshot.
//!
//! Two neighborhoods are explored: the (ω,1)-swap inserts a vertex and evicts
//! its solution neighbors when that gains weight, and the (1,2)-swap replaces
//! one solution vertex by two non-adjacent neighbors that were only blocked by
//! it. [`vnd`] alternates them until neither improves.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::graph::{CompactGraph, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalSearchError {
    #[error("solution has {got} entries, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vertices {0} and {1} are adjacent and both in the solution")]
    NotIndependent(usize, usize),
    #[error("perturbation strength must be at least 1")]
    ZeroStrength,
}

const NOT_FREE: usize = usize::MAX;

/// A solution together with per-vertex tightness and the list of free
/// vertices (outside the solution with no solution neighbor).
#[derive(Debug, Clone)]
pub struct SearchState<'g> {
    g: &'g CompactGraph,
    in_solution: Vec<bool>,
    tightness: Vec<u32>,
    free: Vec<usize>,
    free_pos: Vec<usize>,
    weight: Weight,
}

impl<'g> SearchState<'g> {
    pub fn new(g: &'g CompactGraph) -> Self {
        let n = g.len();
        Self { g, in_solution: vec![false; n], tightness: vec![0; n], free: (0..n).collect(), free_pos: (0..n).collect(), weight: 0 }
    }

    pub fn from_bits(g: &'g CompactGraph, bits: &[bool]) -> Result<Self, LocalSearchError> {
        if bits.len() != g.len() {
            return Err(LocalSearchError::LengthMismatch { expected: g.len(), got: bits.len() });
        }
        if let Some((u, v)) = g.edges().find(|&(u, v)| bits[u] && bits[v]) {
            return Err(LocalSearchError::NotIndependent(u, v));
        }
        let mut state = Self::new(g);
        for v in (0..g.len()).filter(|&v| bits[v]) {
            state.insert(v);
        }
        Ok(state)
    }

    pub fn graph(&self) -> &'g CompactGraph {
        self.g
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn contains(&self, v: usize) -> bool {
        self.in_solution[v]
    }

    pub fn tightness(&self, v: usize) -> u32 {
        self.tightness[v]
    }

    pub fn is_free(&self, v: usize) -> bool {
        self.free_pos[v] != NOT_FREE
    }

    pub fn free_vertices(&self) -> &[usize] {
        &self.free
    }

    pub fn bits(&self) -> &[bool] {
        &self.in_solution
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.in_solution
    }

    pub fn solution(&self) -> Vec<usize> {
        (0..self.g.len()).filter(|&v| self.in_solution[v]).collect()
    }

    pub fn is_maximal(&self) -> bool {
        self.free.is_empty()
    }

    fn add_free(&mut self, v: usize) {
        if self.free_pos[v] == NOT_FREE {
            self.free_pos[v] = self.free.len();
            self.free.push(v);
        }
    }

    fn drop_free(&mut self, v: usize) {
        let pos = self.free_pos[v];
        if pos == NOT_FREE {
            return;
        }
        let last = self.free.pop().expect("free list holds v");
        if last != v {
            self.free[pos] = last;
            self.free_pos[last] = pos;
        }
        self.free_pos[v] = NOT_FREE;
    }

    /// Adds a free vertex.
    pub fn insert(&mut self, v: usize) {
        debug_assert!(self.is_free(v), "vertex {v} is not free");
        self.drop_free(v);
        self.in_solution[v] = true;
        self.weight += self.g.weight(v);
        for &u in self.g.neighbors(v) {
            self.tightness[u] += 1;
            self.drop_free(u);
        }
    }

    pub fn remove(&mut self, v: usize) {
        debug_assert!(self.in_solution[v]);
        self.in_solution[v] = false;
        self.weight -= self.g.weight(v);
        for &u in self.g.neighbors(v) {
            self.tightness[u] -= 1;
            if self.tightness[u] == 0 && !self.in_solution[u] {
                self.add_free(u);
            }
        }
        if self.tightness[v] == 0 {
            self.add_free(v);
        }
    }

    /// Inserts `v`, evicting its solution neighbors first. Returns the evicted
    /// vertices.
    pub fn force(&mut self, v: usize) -> Vec<usize> {
        if self.in_solution[v] {
            return Vec::new();
        }
        let evicted: Vec<usize> = self.g.neighbors(v).iter().copied().filter(|&u| self.in_solution[u]).collect();
        for &u in &evicted {
            self.remove(u);
        }
        self.insert(v);
        evicted
    }

    /// Recomputes every invariant from scratch.
    pub fn audit(&self) -> Result<(), String> {
        let mut weight = 0;
        for v in 0..self.g.len() {
            let t = self.g.neighbors(v).iter().filter(|&&u| self.in_solution[u]).count() as u32;
            if t != self.tightness[v] {
                return Err(format!("tightness of {v} is {} but should be {t}", self.tightness[v]));
            }
            if self.in_solution[v] {
                weight += self.g.weight(v);
                if t > 0 {
                    return Err(format!("solution vertex {v} has a solution neighbor"));
                }
            }
            let should_be_free = !self.in_solution[v] && t == 0;
            if should_be_free != self.is_free(v) {
                return Err(format!("free flag of {v} is wrong"));
            }
            if self.is_free(v) && self.free[self.free_pos[v]] != v {
                return Err(format!("free index of {v} is stale"));
            }
        }
        if weight != self.weight {
            return Err(format!("cached weight {} differs from {weight}", self.weight));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyOrder {
    /// Heaviest first, ties by lower index.
    ByWeight,
    UniformRandom,
}

/// Adds free vertices until the solution is maximal.
pub fn maximize_greedy<R: Rng + ?Sized>(state: &mut SearchState<'_>, order: GreedyOrder, rng: &mut R) {
    let mut candidates = state.free.clone();
    match order {
        GreedyOrder::ByWeight => {
            let g = state.g;
            candidates.sort_unstable_by_key(|&v| (std::cmp::Reverse(g.weight(v)), v));
        }
        GreedyOrder::UniformRandom => candidates.shuffle(rng),
    }
    for v in candidates {
        if state.is_free(v) {
            state.insert(v);
        }
    }
}

/// Inserts non-solution `v` and evicts its solution neighbors if that
/// strictly increases the weight.
pub fn omega_one_swap(state: &mut SearchState<'_>, v: usize) -> bool {
    if state.in_solution[v] {
        return false;
    }
    let g = state.g;
    let blocking: Weight = g.neighbors(v).iter().filter(|&&u| state.in_solution[u]).map(|&u| g.weight(u)).sum();
    if g.weight(v) <= blocking {
        return false;
    }
    state.force(v);
    true
}

/// Finds the heaviest-first pair of non-adjacent 1-tight neighbors of
/// solution vertex `v` outweighing it.
fn one_two_pair(state: &SearchState<'_>, v: usize) -> Option<(usize, usize)> {
    let g = state.g;
    let mut tight: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| state.tightness[u] == 1).collect();
    if tight.len() < 2 {
        return None;
    }
    tight.sort_unstable_by_key(|&u| (std::cmp::Reverse(g.weight(u)), u));
    let wv = g.weight(v);
    for (i, &x) in tight.iter().enumerate() {
        let wx = g.weight(x);
        if wx + g.weight(tight[i + 1..].first().copied()?) <= wv {
            return None;
        }
        for &y in &tight[i + 1..] {
            if wx + g.weight(y) <= wv {
                break;
            }
            if !g.has_edge(x, y) {
                return Some((x, y));
            }
        }
    }
    None
}

/// Removes solution vertex `v` and inserts two non-adjacent neighbors whose
/// only solution neighbor was `v`, if their combined weight exceeds `w(v)`.
pub fn one_two_swap(state: &mut SearchState<'_>, v: usize) -> bool {
    if !state.in_solution[v] {
        return false;
    }
    let Some((x, y)) = one_two_pair(state, v) else {
        return false;
    };
    state.remove(v);
    state.insert(x);
    state.insert(y);
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VndOutcome {
    /// Attempted moves.
    pub iterations: usize,
    /// Accepted moves.
    pub moves: usize,
    /// True when the iteration cap stopped the search before a local optimum.
    pub capped: bool,
}

struct WorkQueue {
    queue: VecDeque<usize>,
    queued: Vec<bool>,
}

impl WorkQueue {
    fn new(n: usize) -> Self {
        Self { queue: VecDeque::new(), queued: vec![false; n] }
    }

    fn push(&mut self, v: usize) {
        if !self.queued[v] {
            self.queued[v] = true;
            self.queue.push_back(v);
        }
    }

    fn pop(&mut self) -> Option<usize> {
        let v = self.queue.pop_front()?;
        self.queued[v] = false;
        Some(v)
    }
}

/// Variable neighborhood descent: exhaust (ω,1)-swaps, then try a (1,2)-swap;
/// after any accepted move return to the first neighborhood. Stops at a
/// local optimum for both or after `max_iterations` attempted moves.
pub fn vnd<R: Rng + ?Sized>(state: &mut SearchState<'_>, max_iterations: usize, rng: &mut R) -> VndOutcome {
    let g = state.g;
    let n = g.len();
    let mut outcome = VndOutcome::default();
    if max_iterations == 0 || n == 0 {
        outcome.capped = max_iterations == 0 && n > 0;
        return outcome;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut outside = WorkQueue::new(n);
    let mut inside = WorkQueue::new(n);
    for &v in &order {
        if state.in_solution[v] {
            inside.push(v);
        } else {
            outside.push(v);
        }
    }

    let mut changed = Vec::new();
    loop {
        let fired = if let Some(v) = outside.pop() {
            if state.in_solution[v] {
                continue;
            }
            if outcome.iterations == max_iterations {
                outcome.capped = true;
                break;
            }
            outcome.iterations += 1;
            changed.clear();
            changed.push(v);
            let evicted: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| state.in_solution[u]).collect();
            if omega_one_swap(state, v) {
                changed.extend(evicted);
                true
            } else {
                false
            }
        } else if let Some(v) = inside.pop() {
            if !state.in_solution[v] {
                continue;
            }
            if outcome.iterations == max_iterations {
                outcome.capped = true;
                break;
            }
            outcome.iterations += 1;
            changed.clear();
            match one_two_pair(state, v) {
                Some((x, y)) => {
                    state.remove(v);
                    state.insert(x);
                    state.insert(y);
                    changed.extend([v, x, y]);
                    true
                }
                None => false,
            }
        } else {
            break;
        };

        if fired {
            outcome.moves += 1;
            for &c in &changed {
                if !state.in_solution[c] {
                    outside.push(c);
                }
                for &u in g.neighbors(c) {
                    if !state.in_solution[u] {
                        outside.push(u);
                    }
                    for &w in g.neighbors(u) {
                        if state.in_solution[w] {
                            inside.push(w);
                        }
                    }
                    if state.in_solution[u] {
                        inside.push(u);
                    }
                }
            }
        }
    }
    outcome
}

/// Greedy completion, descent, and a final completion for zero-weight free
/// vertices the descent cannot see.
pub fn improve<R: Rng + ?Sized>(state: &mut SearchState<'_>, max_iterations: usize, rng: &mut R) -> VndOutcome {
    maximize_greedy(state, GreedyOrder::ByWeight, rng);
    let outcome = vnd(state, max_iterations, rng);
    maximize_greedy(state, GreedyOrder::ByWeight, rng);
    outcome
}

/// Forces `strength` random non-solution vertices into the solution, then
/// completes greedily by weight.
pub fn perturb<R: Rng + ?Sized>(state: &mut SearchState<'_>, strength: usize, rng: &mut R) -> Result<(), LocalSearchError> {
    if strength == 0 {
        return Err(LocalSearchError::ZeroStrength);
    }
    let outside: Vec<usize> = (0..state.g.len()).filter(|&v| !state.in_solution[v]).collect();
    let picks: Vec<usize> = outside.choose_multiple(rng, strength).copied().collect();
    for v in picks {
        state.force(v);
    }
    maximize_greedy(state, GreedyOrder::ByWeight, rng);
    Ok(())
}

/// Perturbation strength that starts at 1, doubles after `patience`
/// consecutive failures up to `max`, and resets on improvement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerturbSchedule {
    strength: usize,
    failures: usize,
    patience: usize,
    max: usize,
}

impl Default for PerturbSchedule {
    fn default() -> Self {
        Self { strength: 1, failures: 0, patience: 2, max: 4 }
    }
}

impl PerturbSchedule {
    pub fn strength(&self) -> usize {
        self.strength
    }

    pub fn improved(&mut self) {
        self.strength = 1;
        self.failures = 0;
    }

    pub fn failed(&mut self) {
        self.failures += 1;
        if self.failures >= self.patience {
            self.failures = 0;
            self.strength = (self.strength * 2).min(self.max);
        }
    }
}

/// Repeated perturb-and-descend rounds, keeping the best solution seen.
pub fn iterated_local_search<R: Rng + ?Sized>(state: &mut SearchState<'_>, max_iterations: usize, rounds: usize, rng: &mut R) {
    improve(state, max_iterations, rng);
    let mut best = state.bits().to_vec();
    let mut best_weight = state.weight();
    let mut schedule = PerturbSchedule::default();
    for _ in 0..rounds {
        if state.g.is_empty() {
            break;
        }
        perturb(state, schedule.strength(), rng).expect("schedule strength is positive");
        improve(state, max_iterations, rng);
        if state.weight() > best_weight {
            best_weight = state.weight();
            best.copy_from_slice(state.bits());
            schedule.improved();
        } else {
            *state = SearchState::from_bits(state.g, &best).expect("best solution is independent");
            schedule.failed();
        }
    }
}
