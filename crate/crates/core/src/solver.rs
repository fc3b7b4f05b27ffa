//! The outer loop: reduce exactly, evolve on the kernel, force a vertex,
//! repeat until the kernel is gone or time is up.

use std::fmt;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolution::{evolve, EvolutionConfig, Population, Progress};
use crate::graph::{Vertex, VertexSet, Weight, WeightedGraph};
use crate::heuristic::{heuristic_reduce, SelectionAmount, SelectionStrategy};
use crate::kernel::{ordering_preset, Kernel, OrderingError, ReductionOrdering};
use crate::local_search::{improve, SearchState};
use crate::partition::DEFAULT_EPSILON;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub time_limit: Duration,
    pub seed: u64,
    pub population_size: usize,
    pub pool_size: usize,
    pub ls_iterations: usize,
    pub max_blocks: usize,
    pub mutation_prob: f64,
    pub unsuccessful_limit: usize,
    pub force_after: usize,
    pub ordering: ReductionOrdering,
    pub strategy: SelectionStrategy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            time_limit: Duration::from_secs(36_000),
            seed: 0,
            population_size: 250,
            pool_size: 10,
            ls_iterations: 15_000,
            max_blocks: 64,
            mutation_prob: 0.10,
            unsuccessful_limit: 1000,
            force_after: 100,
            ordering: ReductionOrdering::baseline(),
            strategy: SelectionStrategy::default(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("mutation probability {0} is outside [0, 1]")]
    MutationProbability(f64),
    #[error("selection fraction {0} is outside (0, 1]")]
    SelectionFraction(f64),
    #[error("max blocks must be at least 2, got {0}")]
    MaxBlocks(usize),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
}

impl SolverConfig {
    pub fn with_ordering(mut self, name: &str) -> Result<Self, ConfigError> {
        self.ordering = ordering_preset(name)?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("population size", self.population_size),
            ("pool size", self.pool_size),
            ("local search iterations", self.ls_iterations),
            ("unsuccessful limit", self.unsuccessful_limit),
        ] {
            if value == 0 {
                return Err(ConfigError::NotPositive(name));
            }
        }
        if self.max_blocks < 2 {
            return Err(ConfigError::MaxBlocks(self.max_blocks));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return Err(ConfigError::MutationProbability(self.mutation_prob));
        }
        if let SelectionAmount::Fraction(f) = self.strategy.amount {
            if !(f > 0.0 && f <= 1.0) {
                return Err(ConfigError::SelectionFraction(f));
            }
        }
        Ok(())
    }

    fn evolution(&self) -> EvolutionConfig {
        EvolutionConfig {
            population_size: self.population_size,
            pool_size: self.pool_size,
            ls_iterations: self.ls_iterations,
            max_blocks: self.max_blocks,
            mutation_prob: self.mutation_prob,
            unsuccessful_limit: self.unsuccessful_limit,
            force_after: self.force_after,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

/// State of one outer round, taken after exact reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub live_vertices: usize,
    pub offset: Weight,
    /// Heaviest kernel solution found by the evolutionary search this round.
    pub best_evolve_weight: Weight,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub solution: VertexSet,
    pub weight: Weight,
    pub elapsed: Duration,
    /// Number of exact reduction passes.
    pub rounds: usize,
    pub kernel_trace: Vec<RoundTrace>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveEvent {
    Round { round: usize, live_vertices: usize, offset: Weight },
    Evolve { round: usize, progress: Progress },
    Improved { weight: Weight },
}

fn lift(kernel: &Kernel, local: &[bool], origin: impl Fn(usize) -> Vertex) -> VertexSet {
    let solution: VertexSet = (0..local.len()).filter(|&v| local[v]).map(origin).collect();
    kernel.reconstruct(&solution).expect("kernel solutions are independent")
}

pub fn solve(g: &WeightedGraph, config: &SolverConfig) -> SolveResult {
    solve_with_progress(g, config, &mut |_| {})
}

pub fn solve_with_progress(g: &WeightedGraph, config: &SolverConfig, sink: &mut dyn FnMut(SolveEvent)) -> SolveResult {
    let start = Instant::now();
    let deadline = start.checked_add(config.time_limit);
    let out_of_time = || deadline.is_some_and(|d| Instant::now() >= d);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let evolution = config.evolution();

    let mut kernel = Kernel::new(g.clone());
    let mut best = VertexSet::new();
    let mut best_weight = 0;
    let mut rounds = 0;
    let mut trace = Vec::new();
    let mut offer = |candidate: VertexSet, sink: &mut dyn FnMut(SolveEvent)| {
        let w = crate::graph::set_weight(g, &candidate);
        if w > best_weight || (best.is_empty() && !candidate.is_empty()) {
            if w > best_weight {
                sink(SolveEvent::Improved { weight: w });
            }
            best_weight = w;
            best = candidate;
        }
    };

    while !kernel.is_empty() {
        kernel.reduce(&config.ordering);
        rounds += 1;
        sink(SolveEvent::Round { round: rounds, live_vertices: kernel.graph().live_count(), offset: kernel.offset() });
        if kernel.is_empty() {
            trace.push(RoundTrace { live_vertices: 0, offset: kernel.offset(), best_evolve_weight: 0 });
            break;
        }
        let snapshot = kernel.graph().compact();
        if out_of_time() {
            let mut state = SearchState::new(&snapshot);
            improve(&mut state, config.ls_iterations, &mut rng);
            trace.push(RoundTrace { live_vertices: snapshot.len(), offset: kernel.offset(), best_evolve_weight: state.weight() });
            offer(lift(&kernel, state.bits(), |v| snapshot.origin(v)), sink);
            break;
        }
        let mut pop = Population::initialize(&snapshot, config.population_size, config.ls_iterations, &mut rng);
        let round = rounds;
        evolve(&snapshot, &mut pop, &evolution, deadline, &mut rng, &mut |progress| sink(SolveEvent::Evolve { round, progress }));
        trace.push(RoundTrace { live_vertices: snapshot.len(), offset: kernel.offset(), best_evolve_weight: pop.best().weight() });
        offer(lift(&kernel, pop.best().bits(), |v| snapshot.origin(v)), sink);
        if out_of_time() {
            break;
        }
        heuristic_reduce(&mut kernel, &snapshot, &pop, config.strategy);
    }
    if kernel.is_empty() {
        offer(kernel.reconstruct(&VertexSet::new()).expect("empty kernel solution is independent"), sink);
    }

    SolveResult { solution: best, weight: best_weight, elapsed: start.elapsed(), rounds, kernel_trace: trace, seed: config.seed }
}

/// Outcome of checking a solution file against an instance.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct VerifyReport {
    /// Adjacent pairs both listed.
    pub violations: Vec<(Vertex, Vertex)>,
    pub duplicates: Vec<Vertex>,
    pub out_of_range: Vec<usize>,
    /// Weight of the distinct in-range vertices.
    pub weight: Weight,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty() && self.duplicates.is_empty() && self.out_of_range.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "OK, weight={}", self.weight);
        }
        write!(f, "INVALID, weight={}", self.weight)?;
        for (u, v) in &self.violations {
            write!(f, "\nedge {u} {v} has both endpoints in the solution")?;
        }
        for v in &self.duplicates {
            write!(f, "\nvertex {v} listed more than once")?;
        }
        for v in &self.out_of_range {
            write!(f, "\nvertex {v} out of range")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolutionParseError {
    #[error("line {line}: invalid vertex id {token:?}")]
    InvalidToken { line: usize, token: String },
}

/// Vertex ids from a solution file: one 0-indexed id per line, blank lines
/// and `%` comments ignored.
pub fn parse_solution(text: &str) -> Result<Vec<usize>, SolutionParseError> {
    let mut ids = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        ids.push(t.parse().map_err(|_| SolutionParseError::InvalidToken { line: i + 1, token: t.to_string() })?);
    }
    Ok(ids)
}

pub fn format_solution(solution: &VertexSet) -> String {
    solution.iter().map(|v| format!("{v}\n")).collect()
}

pub fn verify(g: &WeightedGraph, ids: &[usize]) -> VerifyReport {
    let mut report = VerifyReport::default();
    let mut seen = vec![false; g.n_original()];
    for &v in ids {
        if v >= g.n_original() {
            report.out_of_range.push(v);
        } else if seen[v] {
            if !report.duplicates.contains(&v) {
                report.duplicates.push(v);
            }
        } else {
            seen[v] = true;
            report.weight += g.weight(v);
        }
    }
    for u in 0..g.n_original() {
        if seen[u] {
            report.violations.extend(g.neighbors(u).filter(|&v| u < v && seen[v]).map(|v| (u, v)));
        }
    }
    report
}

pub fn verify_text(g: &WeightedGraph, text: &str) -> Result<VerifyReport, SolutionParseError> {
    Ok(verify(g, &parse_solution(text)?))
}

/// Summary of one solve, written as a single JSON object by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub weight: Weight,
    pub elapsed_seconds: f64,
    pub rounds: usize,
    pub ordering: String,
    pub strategy: String,
}

impl ResultRecord {
    pub fn new(instance: &str, g: &WeightedGraph, config: &SolverConfig, result: &SolveResult) -> Self {
        Self {
            instance: instance.to_string(),
            n: g.live_count(),
            m: g.live_edges(),
            seed: result.seed,
            weight: result.weight,
            elapsed_seconds: result.elapsed.as_secs_f64(),
            rounds: result.rounds,
            ordering: config.ordering.name().to_string(),
            strategy: config.strategy.kind.name().to_string(),
        }
    }
}
