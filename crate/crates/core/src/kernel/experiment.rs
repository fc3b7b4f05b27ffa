use std::time::Instant;

use serde::Serialize;

use crate::graph::{Weight, WeightedGraph};

use super::{exact_reduce, ordering_preset, ReductionOrdering, PRESET_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentMode {
    /// Baseline ordering with each rule left out in turn.
    DisableOne,
    /// Every named preset.
    PresetSweep,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub ordering: String,
    pub kernel_vertices: usize,
    pub kernel_edges: usize,
    pub offset: Weight,
    /// Kernel vertices over input vertices; 0 for an empty input.
    pub reduction_ratio: f64,
    pub elapsed_seconds: f64,
}

pub fn run_ordering_experiment(g: &WeightedGraph, mode: ExperimentMode) -> Vec<ExperimentRow> {
    let orderings: Vec<ReductionOrdering> = match mode {
        ExperimentMode::DisableOne => {
            let base = ReductionOrdering::baseline();
            base.sequence().iter().map(|&r| base.without(r)).collect()
        }
        ExperimentMode::PresetSweep => PRESET_NAMES.iter().map(|n| ordering_preset(n).expect("preset exists")).collect(),
    };
    let n = g.live_count();
    orderings
        .iter()
        .map(|o| {
            let start = Instant::now();
            let kernel = exact_reduce(g, o);
            let elapsed_seconds = start.elapsed().as_secs_f64();
            let k = kernel.graph();
            ExperimentRow {
                ordering: o.name().to_string(),
                kernel_vertices: k.live_count(),
                kernel_edges: k.live_edges(),
                offset: kernel.offset(),
                reduction_ratio: if n == 0 { 0.0 } else { k.live_count() as f64 / n as f64 },
                elapsed_seconds,
            }
        })
        .collect()
}
