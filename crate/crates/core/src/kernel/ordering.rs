use std::fmt;

use thiserror::Error;

use super::Rule;

pub const PRESET_NAMES: [&str; 5] = ["baseline", "time", "weight", "time_weight", "best_perm"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderingError {
    #[error("unknown ordering {name:?}; available presets: {}", PRESET_NAMES.join(", "))]
    UnknownPreset { name: String },
    #[error("rule {0} appears more than once in the ordering")]
    DuplicateRule(Rule),
}

/// The order in which the reduce loop tries rules. Each rule appears at most
/// once; the presets list all thirteen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOrdering {
    name: String,
    sequence: Vec<Rule>,
}

impl ReductionOrdering {
    pub fn new(name: impl Into<String>, sequence: Vec<Rule>) -> Result<Self, OrderingError> {
        for (i, rule) in sequence.iter().enumerate() {
            if sequence[..i].contains(rule) {
                return Err(OrderingError::DuplicateRule(*rule));
            }
        }
        Ok(Self { name: name.into(), sequence })
    }

    pub fn baseline() -> Self {
        Self { name: "baseline".into(), sequence: Rule::ALL.to_vec() }
    }

    /// A single rule on its own.
    pub fn only(rule: Rule) -> Self {
        Self { name: rule.name().into(), sequence: vec![rule] }
    }

    /// This ordering with `rule` left out.
    pub fn without(&self, rule: Rule) -> Self {
        Self { name: format!("{}-without-{}", self.name, rule.name()), sequence: self.sequence.iter().copied().filter(|&r| r != rule).collect() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sequence(&self) -> &[Rule] {
        &self.sequence
    }

    pub fn is_complete(&self) -> bool {
        self.sequence.len() == Rule::ALL.len()
    }
}

impl Default for ReductionOrdering {
    fn default() -> Self {
        Self::baseline()
    }
}

impl fmt::Display for ReductionOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Numbering used by the presets: reductions 1 to 12 in introduction order,
/// with 0 standing in for the V-shape minimum case that follows 4.
fn numbered(n: u8) -> Rule {
    match n {
        1 => Rule::NeighborhoodRemoval,
        2 => Rule::DegreeOne,
        3 => Rule::Triangle,
        4 => Rule::VShape,
        0 => Rule::VShapeMin,
        5 => Rule::IsolatedClique,
        6 => Rule::BasicSingleEdge,
        7 => Rule::ExtendedSingleEdge,
        8 => Rule::Domination,
        9 => Rule::Twin,
        10 => Rule::SimplicialTransfer,
        11 => Rule::Cwis,
        12 => Rule::NeighborhoodFolding,
        _ => unreachable!("no reduction numbered {n}"),
    }
}

pub fn ordering_preset(name: &str) -> Result<ReductionOrdering, OrderingError> {
    let numbers: [u8; 13] = match name {
        "baseline" => return Ok(ReductionOrdering::baseline()),
        "time" => [6, 5, 4, 9, 2, 1, 7, 0, 3, 8, 10, 11, 12],
        "weight" => [5, 11, 12, 6, 4, 0, 9, 8, 1, 2, 3, 10, 7],
        "time_weight" => [5, 6, 11, 4, 9, 2, 0, 1, 8, 7, 3, 10, 12],
        "best_perm" => [1, 2, 3, 4, 0, 5, 9, 11, 10, 8, 6, 7, 12],
        _ => return Err(OrderingError::UnknownPreset { name: name.to_string() }),
    };
    ReductionOrdering::new(name, numbers.iter().map(|&n| numbered(n)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_permutations() {
        for name in PRESET_NAMES {
            let o = ordering_preset(name).unwrap();
            assert_eq!(o.name(), name);
            assert!(o.is_complete());
            let mut seq = o.sequence().to_vec();
            seq.sort();
            assert_eq!(seq, Rule::ALL.to_vec());
        }
    }

    #[test]
    fn preset_heads_and_tails() {
        let base = ordering_preset("baseline").unwrap();
        assert_eq!(&base.sequence()[..2], &[Rule::NeighborhoodRemoval, Rule::DegreeOne]);
        let best = ordering_preset("best_perm").unwrap();
        assert_eq!(&best.sequence()[10..], &[Rule::BasicSingleEdge, Rule::ExtendedSingleEdge, Rule::NeighborhoodFolding]);
        assert_eq!(ordering_preset("time").unwrap().sequence()[0], Rule::BasicSingleEdge);
    }

    #[test]
    fn unknown_name_lists_presets() {
        let err = ordering_preset("fastest").unwrap_err();
        let msg = err.to_string();
        assert!(PRESET_NAMES.iter().all(|p| msg.contains(p)), "{msg}");
    }

    #[test]
    fn duplicates_rejected() {
        assert_eq!(
            ReductionOrdering::new("x", vec![Rule::Twin, Rule::Cwis, Rule::Twin]),
            Err(OrderingError::DuplicateRule(Rule::Twin))
        );
        assert_eq!(ReductionOrdering::baseline().without(Rule::Cwis).sequence().len(), 12);
    }
}
