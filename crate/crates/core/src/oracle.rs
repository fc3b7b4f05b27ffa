//! Exact maximum weight independent set for small graphs.
//!
//! Plain include/exclude branching on a maximum-degree vertex, pruned with
//! the bound "current weight + weight of all remaining candidates". No data
//! reductions are used, so the oracle stays independent of the kernelizer.

use thiserror::Error;

use crate::graph::{Vertex, VertexSet, Weight, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_vertices: usize,
    pub node_budget: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_vertices: 30, node_budget: 50_000_000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {live} live vertices, oracle limit is {limit}")]
    TooLarge { live: usize, limit: usize },
    #[error("search exceeded the node budget of {0}")]
    BudgetExceeded(u64),
}

struct Search<'a> {
    adj: &'a [u64],
    weights: &'a [Weight],
    best: Weight,
    best_set: u64,
    found: bool,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn mask_weight(&self, mut mask: u64) -> Weight {
        let mut total = 0;
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            total += self.weights[i];
            mask &= mask - 1;
        }
        total
    }

    fn run(&mut self, candidates: u64, chosen: u64, weight: Weight) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::BudgetExceeded(self.budget));
        }
        if self.found && weight + self.mask_weight(candidates) <= self.best {
            return Ok(());
        }
        let mut pick = None;
        let mut pick_deg = 0;
        let mut rest = candidates;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let deg = (self.adj[i] & candidates).count_ones();
            if pick.is_none() || deg > pick_deg {
                pick = Some(i);
                pick_deg = deg;
            }
        }
        match pick {
            Some(v) if pick_deg > 0 => {
                let bit = 1u64 << v;
                self.run(candidates & !bit & !self.adj[v], chosen | bit, weight + self.weights[v])?;
                self.run(candidates & !bit, chosen, weight)
            }
            _ => {
                // All remaining candidates are pairwise non-adjacent.
                let total = weight + self.mask_weight(candidates);
                if !self.found || total > self.best {
                    self.found = true;
                    self.best = total;
                    self.best_set = chosen | candidates;
                }
                Ok(())
            }
        }
    }
}

/// Returns the maximum independent set weight of the live graph and a witness.
pub fn brute_force(g: &WeightedGraph, limits: OracleLimits) -> Result<(Weight, VertexSet), OracleError> {
    let live: Vec<Vertex> = g.live_vertices().collect();
    let limit = limits.max_vertices.min(64);
    if live.len() > limit {
        return Err(OracleError::TooLarge { live: live.len(), limit });
    }
    let mut local = vec![usize::MAX; g.capacity()];
    for (i, &v) in live.iter().enumerate() {
        local[v] = i;
    }
    let adj: Vec<u64> = live.iter().map(|&v| g.neighbors(v).fold(0u64, |m, u| m | 1 << local[u])).collect();
    let weights: Vec<Weight> = live.iter().map(|&v| g.weight(v)).collect();
    let all = if live.len() == 64 { u64::MAX } else { (1u64 << live.len()) - 1 };
    let mut search = Search { adj: &adj, weights: &weights, best: 0, best_set: 0, found: false, nodes: 0, budget: limits.node_budget };
    search.run(all, 0, 0)?;
    let witness = (0..live.len()).filter(|&i| search.best_set >> i & 1 == 1).map(|i| live[i]).collect();
    Ok((search.best, witness))
}

/// [`brute_force`] with default limits, panicking on failure. Test helper.
pub fn alpha(g: &WeightedGraph) -> Weight {
    brute_force(g, OracleLimits::default()).expect("oracle limits exceeded").0
}
