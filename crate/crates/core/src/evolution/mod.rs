//! Population-based search on a kernel snapshot.

mod combine;
mod initial;

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{CompactGraph, Weight};
use crate::local_search::{improve, perturb, PerturbSchedule, SearchState};
use crate::partition::{BlockFilter, PartitionPool, DEFAULT_EPSILON};

pub use combine::{
    combine_edge_separator, combine_multiway_edge_separator, combine_multiway_vertex_separator, combine_vertex_separator, greedy_cover_repair,
    CombineError, CombineOp,
};
pub use initial::{build_initial, InitialStrategy};

/// An independent set of a kernel snapshot as a bitvector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Individual {
    bits: Vec<bool>,
    weight: Weight,
    generation: u64,
}

impl Individual {
    pub fn from_state(state: &SearchState<'_>) -> Self {
        Self { bits: state.bits().to_vec(), weight: state.weight(), generation: state.graph().generation() }
    }

    /// Independent set given by `bits`, or `None` if it is not independent.
    pub fn from_bits(g: &CompactGraph, bits: Vec<bool>) -> Option<Self> {
        (bits.len() == g.len() && g.bits_independent(&bits)).then(|| Self { weight: g.bits_weight(&bits), bits, generation: g.generation() })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&v| self.bits[v]).collect()
    }

    pub fn intersection(&self, other: &Individual) -> usize {
        self.bits.iter().zip(&other.bits).filter(|(a, b)| **a && **b).count()
    }

    /// Independent, maximal, cached weight correct, same generation.
    pub fn is_valid_for(&self, g: &CompactGraph) -> bool {
        self.generation == g.generation()
            && self.bits.len() == g.len()
            && g.bits_independent(&self.bits)
            && g.bits_maximal(&self.bits)
            && self.weight == g.bits_weight(&self.bits)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub pool_size: usize,
    pub ls_iterations: usize,
    pub max_blocks: usize,
    pub mutation_prob: f64,
    pub unsuccessful_limit: usize,
    /// Rounds without a membership change after which an offspring is
    /// inserted even if it is lighter than every member.
    pub force_after: usize,
    pub epsilon: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            population_size: 250,
            pool_size: 10,
            ls_iterations: 15000,
            max_blocks: 64,
            mutation_prob: 0.10,
            unsuccessful_limit: 1000,
            force_after: 100,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replacement {
    /// A lighter member was evicted.
    Inserted,
    /// Stagnation forced the offspring in over the most similar member.
    Forced,
    Duplicate,
    Rejected,
}

#[derive(Debug, Clone)]
pub struct Population {
    members: Vec<Individual>,
    stagnation: usize,
}

/// Improves raw offspring bits into a maximal local optimum.
pub fn finish_offspring<R: Rng + ?Sized>(g: &CompactGraph, bits: &[bool], ls_iterations: usize, rng: &mut R) -> Individual {
    let mut state = SearchState::from_bits(g, bits).expect("offspring are independent");
    improve(&mut state, ls_iterations, rng);
    Individual::from_state(&state)
}

impl Population {
    /// `size` members, each from a uniformly chosen constructor followed by
    /// local search.
    pub fn initialize<R: Rng + ?Sized>(g: &CompactGraph, size: usize, ls_iterations: usize, rng: &mut R) -> Self {
        let members = (0..size.max(1))
            .map(|_| {
                let strategy = *InitialStrategy::ALL.choose(rng).expect("nonempty");
                let start = build_initial(g, strategy, rng);
                finish_offspring(g, start.bits(), ls_iterations, rng)
            })
            .collect();
        Self { members, stagnation: 0 }
    }

    pub fn from_members(members: Vec<Individual>) -> Self {
        assert!(!members.is_empty(), "population needs at least one member");
        Self { members, stagnation: 0 }
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn stagnation(&self) -> usize {
        self.stagnation
    }

    fn best_index(&self) -> usize {
        (0..self.members.len()).fold(0, |best, i| if self.members[i].weight > self.members[best].weight { i } else { best })
    }

    /// Heaviest member, lowest index on ties.
    pub fn best(&self) -> &Individual {
        &self.members[self.best_index()]
    }

    /// The heavier of two uniformly drawn members (the first on ties).
    pub fn tournament_select<R: Rng + ?Sized>(&self, rng: &mut R) -> &Individual {
        let a = &self.members[rng.gen_range(0..self.members.len())];
        let b = &self.members[rng.gen_range(0..self.members.len())];
        if b.weight > a.weight {
            b
        } else {
            a
        }
    }

    /// Offers `offspring` to the population. Exact duplicates are rejected.
    /// Otherwise the lighter member sharing the most vertices with it is
    /// evicted. If no member is lighter the offspring is rejected, unless
    /// membership has not changed for `force_after` rounds; then it replaces
    /// the most similar member other than the best one.
    pub fn replace(&mut self, offspring: Individual, force_after: usize) -> Replacement {
        if self.members.iter().any(|m| m.bits == offspring.bits) {
            self.stagnation += 1;
            return Replacement::Duplicate;
        }
        let most_similar = |candidates: &mut dyn Iterator<Item = usize>, members: &[Individual]| {
            candidates.fold(None, |best: Option<(usize, usize)>, i| {
                let overlap = members[i].intersection(&offspring);
                match best {
                    Some((_, o)) if o >= overlap => best,
                    _ => Some((i, overlap)),
                }
            })
        };
        let lighter = most_similar(&mut (0..self.members.len()).filter(|&i| self.members[i].weight < offspring.weight), &self.members);
        if let Some((i, _)) = lighter {
            self.members[i] = offspring;
            self.stagnation = 0;
            return Replacement::Inserted;
        }
        if self.stagnation >= force_after {
            let best = self.best_index();
            if let Some((i, _)) = most_similar(&mut (0..self.members.len()).filter(|&i| i != best), &self.members) {
                self.members[i] = offspring;
                self.stagnation = 0;
                return Replacement::Forced;
            }
        }
        self.stagnation += 1;
        Replacement::Rejected
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub iteration: usize,
    pub best_weight: Weight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvolveStats {
    pub iterations: usize,
    pub inserted: usize,
    pub forced: usize,
    pub mutations: usize,
}

fn offspring_for<R: Rng + ?Sized>(
    g: &CompactGraph,
    pop: &Population,
    pool: &mut PartitionPool,
    op: CombineOp,
    rng: &mut R,
) -> Result<Vec<Vec<bool>>, CombineError> {
    let filter = if op.is_two_way() { BlockFilter::TwoWay } else { BlockFilter::Any };
    let part = pool.fetch(g, op.wants_separator(), filter, rng)?;
    let count = if op.is_two_way() { 2 } else { part.k() };
    let parents: Vec<&[bool]> = (0..count).map(|_| pop.tournament_select(rng).bits()).collect();
    Ok(match op {
        CombineOp::VertexSeparator => {
            let (a, b) = combine_vertex_separator(g, &part, parents[0], parents[1])?;
            vec![a, b]
        }
        CombineOp::EdgeSeparator => {
            let (a, b) = combine_edge_separator(g, &part, parents[0], parents[1])?;
            vec![a, b]
        }
        CombineOp::MultiwayVertexSeparator => vec![combine_multiway_vertex_separator(g, &part, &parents)?],
        CombineOp::MultiwayEdgeSeparator => vec![combine_multiway_edge_separator(g, &part, &parents)?],
    })
}

/// Combine, maybe mutate, replace; until `unsuccessful_limit` consecutive
/// offspring fail to enter the population by beating a member, or the
/// deadline passes. `sink` hears about every new best weight.
pub fn evolve<R: Rng + ?Sized>(
    g: &CompactGraph,
    pop: &mut Population,
    config: &EvolutionConfig,
    deadline: Option<Instant>,
    rng: &mut R,
    sink: &mut dyn FnMut(Progress),
) -> EvolveStats {
    let mut stats = EvolveStats::default();
    if g.len() < 2 {
        return stats;
    }
    let mut pool = PartitionPool::new(config.pool_size, config.max_blocks, config.epsilon);
    let mut schedule = PerturbSchedule::default();
    let mut best = pop.best().weight();
    let mut unsuccessful = 0;
    while unsuccessful < config.unsuccessful_limit {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        stats.iterations += 1;
        let op = *CombineOp::ALL.choose(rng).expect("nonempty");
        let raw = offspring_for(g, pop, &mut pool, op, rng).expect("pool partitions match the snapshot");
        let mut child = raw
            .iter()
            .map(|bits| finish_offspring(g, bits, config.ls_iterations, rng))
            .reduce(|a, b| if b.weight() > a.weight() { b } else { a })
            .expect("at least one offspring");
        let mutated = rng.gen_bool(config.mutation_prob.clamp(0.0, 1.0));
        if mutated {
            stats.mutations += 1;
            let mut state = SearchState::from_bits(g, child.bits()).expect("offspring are independent");
            perturb(&mut state, schedule.strength(), rng).expect("schedule strength is positive");
            improve(&mut state, config.ls_iterations, rng);
            child = Individual::from_state(&state);
        }
        match pop.replace(child, config.force_after) {
            Replacement::Inserted => {
                stats.inserted += 1;
                unsuccessful = 0;
                if mutated {
                    schedule.improved();
                }
            }
            outcome => {
                if outcome == Replacement::Forced {
                    stats.forced += 1;
                }
                unsuccessful += 1;
                if mutated {
                    schedule.failed();
                }
            }
        }
        let now = pop.best().weight();
        if now > best {
            best = now;
            sink(Progress { iteration: stats.iterations, best_weight: best });
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ind(g: &CompactGraph, members: &[usize]) -> Individual {
        let mut bits = vec![false; g.len()];
        for &v in members {
            bits[v] = true;
        }
        Individual::from_bits(g, bits).unwrap()
    }

    #[test]
    fn tournament_prefers_heavier() {
        let g = CompactGraph::from_edges(vec![3, 7], &[(0, 1)]).unwrap();
        let pop = Population::from_members(vec![ind(&g, &[0]), ind(&g, &[1])]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let pick = pop.tournament_select(&mut rng);
            assert!(pick.weight() == 7 || pick.weight() == 3);
        }
        let single = Population::from_members(vec![ind(&g, &[0])]);
        assert_eq!(single.tournament_select(&mut rng).weight(), 3);
    }

    #[test]
    fn replacement_rules() {
        // Path 0-1-2-3-4-5 with unit weights.
        let edges: Vec<(usize, usize)> = (0..5).map(|i| (i, i + 1)).collect();
        let g = CompactGraph::from_edges(vec![1; 6], &edges).unwrap();
        let mut pop = Population::from_members(vec![ind(&g, &[0, 2, 4]), ind(&g, &[1, 4]), ind(&g, &[0, 3])]);

        assert_eq!(pop.replace(ind(&g, &[0, 2, 4]), 100), Replacement::Duplicate);
        assert_eq!(pop.replace(ind(&g, &[1]), 100), Replacement::Rejected);
        // {1, 3, 5} beats both 2-vertex members; it shares 1 vertex with
        // {1, 4} and 1 with {0, 3}: the first one found goes.
        assert_eq!(pop.replace(ind(&g, &[1, 3, 5]), 100), Replacement::Inserted);
        assert_eq!(pop.members()[1].members(), vec![1, 3, 5]);
        assert_eq!(pop.stagnation(), 0);

        // {0, 2, 5} beats only {0, 3}.
        assert_eq!(pop.replace(ind(&g, &[0, 2, 5]), 100), Replacement::Inserted);
        assert_eq!(pop.members()[2].members(), vec![0, 2, 5]);
    }

    #[test]
    fn forcing_never_evicts_the_best() {
        let g = CompactGraph::from_edges(vec![5, 1, 1], &[(0, 1), (0, 2)]).unwrap();
        let mut pop = Population::from_members(vec![ind(&g, &[0]), ind(&g, &[0])]);
        assert_eq!(pop.replace(ind(&g, &[1, 2]), 0), Replacement::Forced);
        assert_eq!(pop.best().weight(), 5);
        assert_eq!(pop.members()[1].members(), vec![1, 2]);
    }

    #[test]
    fn zero_budget_leaves_population_untouched() {
        let g = CompactGraph::from_edges(vec![1, 9, 9, 1], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pop = Population::initialize(&g, 4, 100, &mut rng);
        let before = pop.members().to_vec();
        let config = EvolutionConfig { unsuccessful_limit: 0, ..EvolutionConfig::default() };
        let stats = evolve(&g, &mut pop, &config, None, &mut rng, &mut |_| {});
        assert_eq!((stats.iterations, pop.members()), (0, &before[..]));
    }

    #[test]
    fn path_with_heavy_middle_reaches_optimum() {
        let g = CompactGraph::from_edges(vec![1, 9, 9, 1], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pop = Population::initialize(&g, 6, 100, &mut rng);
        let config = EvolutionConfig { population_size: 6, unsuccessful_limit: 30, ..EvolutionConfig::default() };
        evolve(&g, &mut pop, &config, None, &mut rng, &mut |_| {});
        assert_eq!(pop.best().weight(), 10);
        assert!(pop.members().iter().all(|m| m.is_valid_for(&g)));
    }

    #[test]
    fn single_vertex_kernel() {
        let g = CompactGraph::from_edges(vec![4], &[]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut pop = Population::initialize(&g, 3, 100, &mut rng);
        let stats = evolve(&g, &mut pop, &EvolutionConfig::default(), None, &mut rng, &mut |_| {});
        assert_eq!((stats.inserted, pop.best().members()), (0, vec![0]));
    }
}
