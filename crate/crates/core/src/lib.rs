//! Memetic maximum weight independent set solver.
//!
//! The pipeline alternates exact kernelization ([`kernel`]), an evolutionary
//! search on the kernel ([`evolution`]) and heuristic vertex selection
//! ([`heuristic`]) until the kernel is empty or time runs out ([`solver`]).

pub mod evolution;
pub mod flow;
pub mod graph;
pub mod heuristic;
pub mod kernel;
pub mod local_search;
pub mod metis;
pub mod oracle;
pub mod partition;
pub mod solver;

pub use graph::{CompactGraph, GraphError, Vertex, VertexSet, Weight, WeightedGraph};
pub use solver::{solve, SolveResult, SolverConfig};
