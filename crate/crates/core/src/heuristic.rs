//! Heuristic vertex selection: pick promising vertices of the fittest
//! solution, force them into the final solution and delete their closed
//! neighborhoods so that exact reductions can fire again.

use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::evolution::Population;
use crate::graph::{CompactGraph, Vertex};
use crate::kernel::Kernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SelectionKind {
    /// Heaviest vertex.
    Weight,
    /// Smallest degree.
    Degree,
    /// Largest weight per neighbor.
    WeightOverDegree,
    /// Largest weight minus neighborhood weight.
    #[default]
    Hybrid,
    /// The vertex occurring in most population members, ties to the heavier.
    Participation,
}

impl SelectionKind {
    pub const ALL: [SelectionKind; 5] = [SelectionKind::Weight, SelectionKind::Degree, SelectionKind::WeightOverDegree, SelectionKind::Hybrid, SelectionKind::Participation];

    pub fn name(self) -> &'static str {
        match self {
            SelectionKind::Weight => "weight",
            SelectionKind::Degree => "degree",
            SelectionKind::WeightOverDegree => "weight-degree",
            SelectionKind::Hybrid => "hybrid",
            SelectionKind::Participation => "participation",
        }
    }
}

impl fmt::Display for SelectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|k| k.name()).collect();
            format!("unknown selection strategy {s:?}; expected one of {}", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SelectionAmount {
    #[default]
    Single,
    /// `ceil(fraction * |fittest|)` vertices, at least one. `0 < fraction <= 1`.
    Fraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SelectionStrategy {
    pub kind: SelectionKind,
    pub amount: SelectionAmount,
}

/// A score where larger is better. Infinite ends are used for degree-zero
/// vertices under weight/degree and zero-weight vertices under participation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rating {
    NegInf,
    Finite(Ratio<i128>),
    PosInf,
}

impl Rating {
    fn int(x: i128) -> Self {
        Rating::Finite(Ratio::from_integer(x))
    }
}

/// Score of `v` in the snapshot `g` under `kind`.
pub fn rate(kind: SelectionKind, g: &CompactGraph, pop: &Population, v: usize) -> Rating {
    let w = g.weight(v) as i128;
    let deg = g.degree(v) as i128;
    match kind {
        SelectionKind::Weight => Rating::int(w),
        SelectionKind::Degree => Rating::int(-deg),
        SelectionKind::WeightOverDegree if deg == 0 => Rating::PosInf,
        SelectionKind::WeightOverDegree => Rating::Finite(Ratio::new(w, deg)),
        SelectionKind::Hybrid => Rating::int(w - g.neighbors(v).iter().map(|&u| g.weight(u) as i128).sum::<i128>()),
        SelectionKind::Participation if w == 0 => Rating::NegInf,
        SelectionKind::Participation => {
            let count = pop.members().iter().filter(|m| m.bits()[v]).count() as i128;
            Rating::Finite(Ratio::from_integer(count) - Ratio::new(1, w))
        }
    }
}

/// Local vertices of `g` chosen by `strategy`, best first, ties to the lower
/// index. Participation considers every vertex and picks one; the others
/// choose among the members of the fittest individual.
pub fn select(strategy: SelectionStrategy, g: &CompactGraph, pop: &Population) -> Vec<usize> {
    let candidates: Vec<usize> = match strategy.kind {
        SelectionKind::Participation => (0..g.len()).collect(),
        _ => pop.best().members(),
    };
    if candidates.is_empty() {
        return Vec::new();
    }
    let count = match (strategy.kind, strategy.amount) {
        (SelectionKind::Participation, _) | (_, SelectionAmount::Single) => 1,
        (_, SelectionAmount::Fraction(f)) => ((f * candidates.len() as f64).ceil() as usize).clamp(1, candidates.len()),
    };
    let mut rated: Vec<(Rating, usize)> = candidates.into_iter().map(|v| (rate(strategy.kind, g, pop, v), v)).collect();
    rated.sort_by_key(|&(r, v)| (Reverse(r), v));
    rated.into_iter().take(count).map(|(_, v)| v).collect()
}

/// Forces the selected vertices into the kernel's solution, deleting their
/// closed neighborhoods. `g` must be the snapshot `pop` was built on.
/// Returns the forced kernel vertex ids.
pub fn heuristic_reduce(kernel: &mut Kernel, g: &CompactGraph, pop: &Population, strategy: SelectionStrategy) -> Vec<Vertex> {
    assert_eq!(g.generation(), kernel.graph().generation(), "population snapshot is stale");
    let chosen: Vec<Vertex> = select(strategy, g, pop).into_iter().map(|v| g.origin(v)).collect();
    for &v in &chosen {
        kernel.force(v).expect("selected vertices are pairwise non-adjacent");
    }
    chosen
}
