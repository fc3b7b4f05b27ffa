//! Exact data reductions for maximum weight independent set.
//!
//! Every reduction rewrites a [`WeightedGraph`] in place and appends one
//! [`ReductionEvent`] describing both how to undo the graph surgery and how to
//! lift a solution of the reduced graph back to the graph before the step.
//! The invariant maintained by every rule is
//!
//! ```text
//! alpha(G) = alpha(G') + offset_delta
//! ```
//!
//! where `alpha` is the maximum independent set weight.

mod experiment;
mod ordering;
mod reconstruct;
pub mod rules;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{GraphError, Vertex, VertexSet, Weight, WeightedGraph};

pub use experiment::{run_ordering_experiment, ExperimentMode, ExperimentRow};
pub use ordering::{ordering_preset, OrderingError, ReductionOrdering, PRESET_NAMES};
pub use reconstruct::ReconstructError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    NeighborhoodRemoval,
    DegreeOne,
    Triangle,
    VShape,
    VShapeMin,
    IsolatedClique,
    BasicSingleEdge,
    ExtendedSingleEdge,
    Domination,
    Twin,
    SimplicialTransfer,
    Cwis,
    NeighborhoodFolding,
}

impl Rule {
    /// All rules in introduction order.
    pub const ALL: [Rule; 13] = [
        Rule::NeighborhoodRemoval,
        Rule::DegreeOne,
        Rule::Triangle,
        Rule::VShape,
        Rule::VShapeMin,
        Rule::IsolatedClique,
        Rule::BasicSingleEdge,
        Rule::ExtendedSingleEdge,
        Rule::Domination,
        Rule::Twin,
        Rule::SimplicialTransfer,
        Rule::Cwis,
        Rule::NeighborhoodFolding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::NeighborhoodRemoval => "neighborhood-removal",
            Rule::DegreeOne => "degree-one",
            Rule::Triangle => "triangle",
            Rule::VShape => "v-shape",
            Rule::VShapeMin => "v-shape-min",
            Rule::IsolatedClique => "isolated-clique",
            Rule::BasicSingleEdge => "basic-single-edge",
            Rule::ExtendedSingleEdge => "extended-single-edge",
            Rule::Domination => "domination",
            Rule::Twin => "twin",
            Rule::SimplicialTransfer => "simplicial-transfer",
            Rule::Cwis => "cwis",
            Rule::NeighborhoodFolding => "neighborhood-folding",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Primitive graph edits, replayed backwards to undo an event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphOp {
    Remove(Vertex),
    SetWeight { vertex: Vertex, prior: Weight },
    AddEdge(Vertex, Vertex),
    DropEdge(Vertex, Vertex),
    PushVertex(Vertex),
}

/// How a solution of the reduced graph is lifted across one event. `S` below
/// is the solution after the event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recovery {
    /// The vertices join `S` unconditionally.
    Include(Vec<Vertex>),
    /// Removed vertices stay out.
    Exclude,
    /// `vertex` joins unless some vertex of `watch` is already in `S`.
    IncludeUnlessAny { watch: Vec<Vertex>, vertex: Vertex },
    /// If `fold` is in `S` it is replaced by `inside`, otherwise `outside` joins.
    Fold { fold: Vertex, inside: Vec<Vertex>, outside: Vec<Vertex> },
    /// Degree-two vertex `v` removed, `x` inherited the neighborhood of `y`
    /// and `y` lost `w(v)`.
    VShapeMerge { v: Vertex, x: Vertex, y: Vertex },
    /// `x` and `y` lost `w(v)` each and `v` now stands for "both of them".
    VShapeMin { v: Vertex, x: Vertex, y: Vertex },
}

/// One undoable reduction step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionEvent {
    pub rule: Rule,
    pub ops: Vec<GraphOp>,
    pub recovery: Recovery,
    pub offset_delta: Weight,
}

impl ReductionEvent {
    pub fn removed(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.ops.iter().filter_map(|op| match op {
            GraphOp::Remove(v) => Some(*v),
            _ => None,
        })
    }

    pub fn weight_edits(&self) -> impl Iterator<Item = (Vertex, Weight)> + '_ {
        self.ops.iter().filter_map(|op| match op {
            GraphOp::SetWeight { vertex, prior } => Some((*vertex, *prior)),
            _ => None,
        })
    }

    pub fn fold_vertex(&self) -> Option<Vertex> {
        self.ops.iter().find_map(|op| match op {
            GraphOp::PushVertex(v) => Some(*v),
            _ => None,
        })
    }

    /// Every vertex whose neighborhood or weight this event changed.
    pub fn touched(&self) -> Vec<Vertex> {
        let mut out = Vec::new();
        for op in &self.ops {
            match *op {
                GraphOp::Remove(v) | GraphOp::PushVertex(v) => out.push(v),
                GraphOp::SetWeight { vertex, .. } => out.push(vertex),
                GraphOp::AddEdge(a, b) | GraphOp::DropEdge(a, b) => out.extend([a, b]),
            }
        }
        out
    }

    /// Reverts the graph surgery of this event. Events must be undone in
    /// reverse order of application.
    pub fn undo(&self, g: &mut WeightedGraph) -> Result<(), GraphError> {
        for op in self.ops.iter().rev() {
            match *op {
                GraphOp::Remove(v) => g.restore_vertex(v)?,
                GraphOp::SetWeight { vertex, prior } => g.set_weight(vertex, prior),
                GraphOp::AddEdge(a, b) => {
                    g.remove_edge(a, b);
                }
                GraphOp::DropEdge(a, b) => g.add_edge(a, b),
                GraphOp::PushVertex(v) => g.pop_vertex(v)?,
            }
        }
        Ok(())
    }
}

/// Records graph edits while a rule mutates the graph.
pub(crate) struct Edit<'a> {
    pub g: &'a mut WeightedGraph,
    ops: Vec<GraphOp>,
}

impl<'a> Edit<'a> {
    pub fn new(g: &'a mut WeightedGraph) -> Self {
        Self { g, ops: Vec::new() }
    }

    pub fn remove(&mut self, v: Vertex) {
        self.g.remove_vertex(v).expect("reduction removes a live vertex");
        self.ops.push(GraphOp::Remove(v));
    }

    pub fn remove_all(&mut self, vs: &[Vertex]) {
        for &v in vs {
            self.remove(v);
        }
    }

    pub fn set_weight(&mut self, v: Vertex, w: Weight) {
        let prior = self.g.weight(v);
        self.g.set_weight(v, w);
        self.ops.push(GraphOp::SetWeight { vertex: v, prior });
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) {
        self.g.add_edge(a, b);
        self.ops.push(GraphOp::AddEdge(a, b));
    }

    pub fn drop_edge(&mut self, a: Vertex, b: Vertex) {
        if self.g.remove_edge(a, b) {
            self.ops.push(GraphOp::DropEdge(a, b));
        }
    }

    pub fn push_vertex(&mut self, w: Weight, nbrs: &[Vertex]) -> Vertex {
        let v = self.g.push_vertex(w, nbrs);
        self.ops.push(GraphOp::PushVertex(v));
        v
    }

    pub fn finish(self, rule: Rule, recovery: Recovery, offset_delta: Weight) -> ReductionEvent {
        ReductionEvent { rule, ops: self.ops, recovery, offset_delta }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Let the critical-set rule fire when the best value is exactly zero.
    pub cwis_allow_zero: bool,
}

/// A vertex forced into the solution outside the reduction stack, together
/// with the number of events that had been applied at that moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForcedVertex {
    pub position: usize,
    pub vertex: Vertex,
    pub weight: Weight,
}

/// The reduced graph together with everything needed to lift a solution back
/// to the input graph.
#[derive(Debug, Clone)]
pub struct Kernel {
    original: WeightedGraph,
    graph: WeightedGraph,
    events: Vec<ReductionEvent>,
    offset: Weight,
    forced: Vec<ForcedVertex>,
    forced_weight: Weight,
}

impl Kernel {
    pub fn new(g: WeightedGraph) -> Self {
        Self { original: g.clone(), graph: g, events: Vec::new(), offset: 0, forced: Vec::new(), forced_weight: 0 }
    }

    pub fn original(&self) -> &WeightedGraph {
        &self.original
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn events(&self) -> &[ReductionEvent] {
        &self.events
    }

    /// Weight decided by reduction events.
    pub fn offset(&self) -> Weight {
        self.offset
    }

    pub fn forced(&self) -> &[ForcedVertex] {
        &self.forced
    }

    /// Weight of vertices forced by heuristic selection.
    pub fn forced_weight(&self) -> Weight {
        self.forced_weight
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Input-graph vertices that events put into the solution
    /// unconditionally. Fold vertices taken this way are left out; their
    /// expansion is only known during reconstruction.
    pub fn decided_in(&self) -> VertexSet {
        let n = self.original.n_original();
        self.events
            .iter()
            .filter_map(|e| match &e.recovery {
                Recovery::Include(vs) => Some(vs.iter().copied()),
                _ => None,
            })
            .flatten()
            .filter(|&v| v < n)
            .collect()
    }

    /// Tries a single rule at a single vertex. For edge rules every incident
    /// edge is examined; the critical-set rule ignores `v`.
    pub fn apply(&mut self, rule: Rule, v: Vertex, options: ReduceOptions) -> bool {
        let before = self.events.len();
        let fired = rules::apply_at(rule, &mut self.graph, v, &mut self.events, options);
        for e in &self.events[before..] {
            self.offset += e.offset_delta;
        }
        fired
    }

    /// Undoes the most recent reduction event. Refuses to cross a forced vertex.
    pub fn undo_last(&mut self) -> Option<ReductionEvent> {
        if self.forced.last().is_some_and(|f| f.position == self.events.len()) {
            return None;
        }
        let event = self.events.pop()?;
        event.undo(&mut self.graph).expect("events are undone in LIFO order");
        self.offset -= event.offset_delta;
        Some(event)
    }

    /// Puts `v` into the solution and deletes its closed neighborhood for good.
    pub fn force(&mut self, v: Vertex) -> Result<(), GraphError> {
        if !self.graph.is_alive(v) {
            return Err(GraphError::DeadVertex(v));
        }
        let nbrs: Vec<Vertex> = self.graph.neighbors(v).collect();
        let weight = self.graph.weight(v);
        self.graph.remove_vertex(v)?;
        for u in nbrs {
            self.graph.remove_vertex(u)?;
        }
        self.forced.push(ForcedVertex { position: self.events.len(), vertex: v, weight });
        self.forced_weight += weight;
        Ok(())
    }

    /// Applies the rules of `ordering` until none fires. After every success
    /// the scan restarts at the first rule of the ordering.
    pub fn reduce(&mut self, ordering: &ReductionOrdering) {
        self.reduce_with(ordering, ReduceOptions::default());
    }

    pub fn reduce_with(&mut self, ordering: &ReductionOrdering, options: ReduceOptions) {
        let rules = ordering.sequence();
        let mut queues = DirtyQueues::new(rules.len(), self.graph.capacity());
        queues.seed(self.graph.live_vertices());
        let mut cwis_dirty = true;

        'restart: loop {
            for (slot, &rule) in rules.iter().enumerate() {
                if rule == Rule::Cwis {
                    if cwis_dirty {
                        cwis_dirty = false;
                        if self.fire(rule, 0, options, &mut queues) {
                            cwis_dirty = true;
                            continue 'restart;
                        }
                    }
                    continue;
                }
                while let Some(v) = queues.pop(slot) {
                    if !self.graph.is_alive(v) {
                        continue;
                    }
                    if self.fire(rule, v, options, &mut queues) {
                        cwis_dirty = true;
                        continue 'restart;
                    }
                }
            }
            break;
        }
    }

    fn fire(&mut self, rule: Rule, v: Vertex, options: ReduceOptions, queues: &mut DirtyQueues) -> bool {
        let before = self.events.len();
        if !rules::apply_at(rule, &mut self.graph, v, &mut self.events, options) {
            return false;
        }
        queues.grow(self.graph.capacity());
        for e in &self.events[before..] {
            self.offset += e.offset_delta;
            for t in e.touched() {
                queues.push_two_hop(&self.graph, t);
            }
        }
        true
    }

    pub fn reconstruct(&self, kernel_solution: &VertexSet) -> Result<VertexSet, ReconstructError> {
        reconstruct::reconstruct(self, kernel_solution)
    }
}

/// Runs `ordering` exhaustively on a copy of `g`.
pub fn exact_reduce(g: &WeightedGraph, ordering: &ReductionOrdering) -> Kernel {
    let mut kernel = Kernel::new(g.clone());
    kernel.reduce(ordering);
    kernel
}

/// One FIFO of candidate vertices per rule slot, each with a membership flag.
struct DirtyQueues {
    queues: Vec<VecDeque<Vertex>>,
    queued: Vec<Vec<bool>>,
}

impl DirtyQueues {
    fn new(slots: usize, capacity: usize) -> Self {
        Self { queues: vec![VecDeque::new(); slots], queued: vec![vec![false; capacity]; slots] }
    }

    fn grow(&mut self, capacity: usize) {
        for q in &mut self.queued {
            if q.len() < capacity {
                q.resize(capacity, false);
            }
        }
    }

    fn seed(&mut self, vertices: impl Iterator<Item = Vertex>) {
        for v in vertices {
            self.push(v);
        }
    }

    fn push(&mut self, v: Vertex) {
        for (q, flags) in self.queues.iter_mut().zip(&mut self.queued) {
            if !flags[v] {
                flags[v] = true;
                q.push_back(v);
            }
        }
    }

    fn pop(&mut self, slot: usize) -> Option<Vertex> {
        let v = self.queues[slot].pop_front()?;
        self.queued[slot][v] = false;
        Some(v)
    }

    /// Queues `t` and everything within distance two of it. Dead vertices keep
    /// their adjacency entries, so a removed vertex still reaches its former
    /// neighbors.
    fn push_two_hop(&mut self, g: &WeightedGraph, t: Vertex) {
        if g.is_alive(t) {
            self.push(t);
        }
        if !g.contains(t) {
            return;
        }
        for &u in g.raw_neighbors(t) {
            if !g.is_alive(u) {
                continue;
            }
            self.push(u);
            for w in g.neighbors(u) {
                self.push(w);
            }
        }
    }
}
