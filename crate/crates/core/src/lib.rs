//! Fix: a deterministic solver for random k-SAT, with the uniform random
//! formula model, comparison heuristics and a Monte Carlo sweep harness.
//!
//! ```
//! use fixsat::{fix_solve, sample_formula, evaluate, GeneratorConfig};
//!
//! let config = GeneratorConfig::with_density(1_000, 10, 20.0, 7).unwrap();
//! let formula = sample_formula(&config).unwrap();
//! let outcome = fix_solve(&formula).unwrap();
//! let assignment = outcome.result.expect("low density instances are easy");
//! assert!(evaluate(&formula, &assignment));
//! ```

pub mod baselines;
pub mod dimacs;
pub mod formula;
pub mod generator;
pub mod instrumentation;
pub mod matching;
pub mod occurrences;
pub mod parallel;
pub mod solver;
pub mod sweep;

pub use dimacs::{parse_dimacs, write_dimacs};
pub use formula::{
    duplicate_stats, evaluate, unsatisfied_indices, Assignment, ClauseSet, DuplicateStats, Formula,
    FormulaError, Literal,
};
pub use generator::{sample_formula, GeneratorConfig, GeneratorError, SeededFormula};
pub use instrumentation::{check_bounds, PhaseStats, ReferenceBounds};
pub use occurrences::OccurrenceIndex;
pub use solver::{fix_solve, fix_solve_with, FixError, FixFailure, FixOptions, FixOutcome, VarSet};
