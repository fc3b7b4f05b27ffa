use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{check_independent, Vertex, VertexSet, Violation};

use super::{Kernel, Recovery};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReconstructError {
    #[error("kernel solution is not independent: {0:?}")]
    KernelNotIndependent(Violation),
    #[error("lifted solution is not independent in the input graph: {0:?}")]
    NotIndependent(Violation),
    #[error("vertex {0} is not a vertex of the input graph")]
    UnexpandedFold(Vertex),
}

pub(super) fn reconstruct(kernel: &Kernel, kernel_solution: &VertexSet) -> Result<VertexSet, ReconstructError> {
    check_independent(kernel.graph(), kernel_solution).map_err(ReconstructError::KernelNotIndependent)?;
    let mut s: BTreeSet<Vertex> = kernel_solution.iter().collect();
    let events = kernel.events();
    let forced = kernel.forced();
    let mut next_forced = forced.len();

    for position in (0..=events.len()).rev() {
        while next_forced > 0 && forced[next_forced - 1].position == position {
            next_forced -= 1;
            s.insert(forced[next_forced].vertex);
        }
        if position == 0 {
            break;
        }
        match &events[position - 1].recovery {
            Recovery::Include(vs) => s.extend(vs.iter().copied()),
            Recovery::Exclude => {}
            Recovery::IncludeUnlessAny { watch, vertex } => {
                if !watch.iter().any(|w| s.contains(w)) {
                    s.insert(*vertex);
                }
            }
            Recovery::Fold { fold, inside, outside } => {
                if s.remove(fold) {
                    s.extend(inside.iter().copied());
                } else {
                    s.extend(outside.iter().copied());
                }
            }
            &Recovery::VShapeMerge { v, x, y } => {
                if !s.contains(&y) {
                    s.insert(if s.contains(&x) { y } else { v });
                }
            }
            &Recovery::VShapeMin { v, x, y } => {
                let (has_v, has_x, has_y) = (s.contains(&v), s.contains(&x), s.contains(&y));
                match (has_x, has_y) {
                    (true, true) => {
                        s.remove(&v);
                    }
                    (true, false) | (false, true) => {
                        if has_v {
                            s.remove(&v);
                            s.insert(if has_x { y } else { x });
                        }
                    }
                    (false, false) => {
                        if has_v {
                            s.remove(&v);
                            s.insert(x);
                            s.insert(y);
                        } else {
                            s.insert(v);
                        }
                    }
                }
            }
        }
    }

    let n = kernel.original().n_original();
    if let Some(&bad) = s.iter().find(|&&v| v >= n) {
        return Err(ReconstructError::UnexpandedFold(bad));
    }
    let result: VertexSet = s.into_iter().collect();
    check_independent(kernel.original(), &result).map_err(ReconstructError::NotIndependent)?;
    Ok(result)
}
