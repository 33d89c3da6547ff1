//! The three-phase Fix algorithm.
//!
//! Phase 1 starts from the all-true assignment and walks the all-negative
//! clauses in order, flipping one variable per clause (a set `Z`), preferring
//! variables whose flip breaks no clause. Phase 2 collects a small set `Z′`
//! of repair variables so that every clause left depending on `Z′` holds at
//! least three of them. Phase 3 assigns `Z′` through a bipartite matching
//! between those clauses and `Z′`.
//!
//! Phases 1 and 2 keep per-clause counters and per-variable support counts
//! that are updated through the occurrence lists, so each set insertion costs
//! time proportional to the variable's occurrences. The whole run is
//! deterministic.

mod phase1;
mod phase2;
mod phase3;
pub mod predicates;

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Assignment, ClauseSet};
use crate::instrumentation::{collect_stats, PhaseStats, TraceRecord};
use crate::matching::HallViolation;
use crate::occurrences::{OccurrenceIndex, TooManyClauses};

pub use phase1::{run_phase1, Phase1, Phase1Result, Phase1State};
pub use phase2::{run_phase2, Phase2, Phase2State, Phase2Step, RepairWindow};
pub use phase3::{run_phase3, sigma_z_z_prime_m, Phase3Result};

/// Set of variables remembering insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarSet {
    member: Vec<bool>,
    order: Vec<u32>,
}

impl VarSet {
    pub fn new(n: usize) -> Self {
        VarSet {
            member: vec![false; n + 1],
            order: Vec::new(),
        }
    }

    pub fn from_vars(n: usize, vars: &[u32]) -> Self {
        let mut s = Self::new(n);
        for &v in vars {
            s.insert(v);
        }
        s
    }

    #[inline]
    pub fn contains(&self, var: u32) -> bool {
        self.member[var as usize]
    }

    /// Returns `false` if already present.
    pub fn insert(&mut self, var: u32) -> bool {
        if std::mem::replace(&mut self.member[var as usize], true) {
            return false;
        }
        self.order.push(var);
        true
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Members in insertion order.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn num_vars(&self) -> usize {
        self.member.len() - 1
    }

    /// `σ_Z`: members false, everything else true.
    pub fn sigma(&self) -> Assignment {
        let mut a = Assignment::all_true(self.num_vars());
        for &v in &self.order {
            a.set(v, false);
        }
        a
    }
}

/// Position windows derived from the clause width, as 0-based index ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverParams {
    pub k: usize,
    /// `⌈k/2⌉`; Phase 1 scans positions `1..k1` and falls back to `k1` (1-based).
    pub k1: usize,
    /// 1-based positions `(k1, k−5]`, used for safe repair picks.
    pub window_2d: Range<usize>,
    /// 1-based positions `(k−5, k]`, the unconditional repair window.
    pub window_2e: Range<usize>,
}

impl SolverParams {
    pub fn new(k: usize) -> Self {
        let k1 = k.div_ceil(2);
        let tail = k.saturating_sub(5);
        SolverParams {
            k,
            k1,
            window_2d: k1..tail.max(k1),
            window_2e: tail..k,
        }
    }
}

/// Why a run ended without an assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixFailure {
    /// Phase 2 met a queued clause without three distinct eligible
    /// variables in its last five positions.
    DegenerateClause { clause: usize },
    /// No matching covers every endangered clause.
    MatchingNotFound { violation: HallViolation },
}

impl FixFailure {
    pub fn reason(&self) -> &'static str {
        match self {
            FixFailure::DegenerateClause { .. } => "degenerate-clause",
            FixFailure::MatchingNotFound { .. } => "matching-not-found",
        }
    }
}

impl std::fmt::Display for FixFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FixFailure::DegenerateClause { clause } => {
                write!(
                    f,
                    "degenerate clause {clause}: fewer than 3 distinct repair variables"
                )
            }
            FixFailure::MatchingNotFound { violation } => write!(
                f,
                "no matching covers the endangered clauses ({} clauses share {} variables)",
                violation.clauses.len(),
                violation.variables.len()
            ),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FixError {
    #[error("clause width {0} unsupported (need 2 <= k <= 255)")]
    UnsupportedWidth(usize),
    #[error(transparent)]
    TooManyClauses(#[from] TooManyClauses),
    #[error("internal error: produced assignment leaves clauses {unsatisfied:?} unsatisfied")]
    Unsound { unsatisfied: Vec<usize> },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FixOptions {
    /// Record one [`TraceRecord`] per Phase-1 selection.
    pub trace: bool,
}

#[derive(Debug, Clone)]
pub struct FixOutcome {
    pub result: Result<Assignment, FixFailure>,
    pub stats: PhaseStats,
    pub z: VarSet,
    pub z_prime: VarSet,
    pub trace: Option<Vec<TraceRecord>>,
}

impl FixOutcome {
    pub fn is_success(&self) -> bool {
        self.result.is_ok()
    }
}

pub(crate) fn check_width(k: usize) -> Result<(), FixError> {
    if (2..=255).contains(&k) {
        Ok(())
    } else {
        Err(FixError::UnsupportedWidth(k))
    }
}

pub fn fix_solve<F: ClauseSet>(formula: &F) -> Result<FixOutcome, FixError> {
    fix_solve_with(formula, None, FixOptions::default())
}

/// Full run. Pass a prebuilt occurrence index to share it across calls.
pub fn fix_solve_with<F: ClauseSet>(
    formula: &F,
    occurrences: Option<&OccurrenceIndex>,
    options: FixOptions,
) -> Result<FixOutcome, FixError> {
    check_width(formula.width())?;
    let owned;
    let occ = match occurrences {
        Some(o) => o,
        None => {
            owned = OccurrenceIndex::build(formula)?;
            &owned
        }
    };

    let phase1 = run_phase1(formula, occ, options.trace);
    let mut phase2 = Phase2::new(formula, occ, &phase1.state);
    let degenerate = loop {
        match phase2.step() {
            Ok(Some(_)) => continue,
            Ok(None) => break None,
            Err(clause) => break Some(clause),
        }
    };
    let phase2 = phase2.into_state();
    let z = phase1.state.z().clone();

    if let Some(clause) = degenerate {
        let stats = collect_stats(&phase1.state, &phase2, None);
        return Ok(FixOutcome {
            result: Err(FixFailure::DegenerateClause { clause }),
            stats,
            z,
            z_prime: phase2.z_prime().clone(),
            trace: phase1.trace,
        });
    }

    let endangered = phase2.endangered_clauses();
    let phase3 = phase3::run_phase3_on(formula, &z, phase2.z_prime(), endangered);
    let stats = collect_stats(&phase1.state, &phase2, Some(&phase3));
    let result = match phase3.outcome {
        Ok(assignment) => {
            let unsatisfied = crate::formula::unsatisfied_indices(formula, &assignment);
            if !unsatisfied.is_empty() {
                return Err(FixError::Unsound { unsatisfied });
            }
            Ok(assignment)
        }
        Err(violation) => Err(FixFailure::MatchingNotFound { violation }),
    };
    Ok(FixOutcome {
        result,
        stats,
        z,
        z_prime: phase2.z_prime().clone(),
        trace: phase1.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{evaluate, Formula};
    use crate::generator::{sample_formula, GeneratorConfig};

    #[test]
    fn params_windows() {
        let p = SolverParams::new(3);
        assert_eq!((p.k1, p.window_2d.len(), p.window_2e.clone()), (2, 0, 0..3));
        let p = SolverParams::new(6);
        assert_eq!((p.k1, p.window_2d.len(), p.window_2e.clone()), (3, 0, 1..6));
        let p = SolverParams::new(16);
        assert_eq!(
            (p.k1, p.window_2d.clone(), p.window_2e.clone()),
            (8, 8..11, 11..16)
        );
        let p = SolverParams::new(15);
        assert_eq!(p.window_2d.len(), 2);
    }

    #[test]
    fn positive_clauses_give_all_true() {
        let f = Formula::from_ints(4, &[&[1, -2, -3], &[-1, 4, -2]]).unwrap();
        let out = fix_solve(&f).unwrap();
        assert_eq!(out.result.unwrap(), Assignment::all_true(4));
        assert_eq!(out.stats.z_size, 0);
    }

    #[test]
    fn single_all_negative_clause() {
        let f = Formula::from_ints(3, &[&[-1, -2, -3]]).unwrap();
        let a = fix_solve(&f).unwrap().result.unwrap();
        assert!(!a.value(1));
        assert!(evaluate(&f, &a));
    }

    #[test]
    fn rejects_unit_width() {
        let f = Formula::from_ints(2, &[&[1]]).unwrap();
        assert_eq!(fix_solve(&f).unwrap_err(), FixError::UnsupportedWidth(1));
    }

    #[test]
    fn deterministic() {
        let f = sample_formula(&GeneratorConfig::with_density(300, 5, 10.0, 4).unwrap()).unwrap();
        let a = fix_solve(&f).unwrap();
        let b = fix_solve(&f).unwrap();
        assert_eq!(a.result, b.result);
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.z, b.z);
    }
}
