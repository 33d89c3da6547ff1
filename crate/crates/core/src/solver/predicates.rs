//! Definitional predicates, evaluated by scanning the formula.
//!
//! These are the reference semantics; the solver answers the same questions
//! in O(1) from incrementally maintained counters.

use thiserror::Error;

use crate::formula::{ClauseSet, Literal};
use crate::solver::VarSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PredicateError {
    #[error("Z-safety is only defined for variables outside Z; x{0} is in Z")]
    VariableInZ(u32),
}

/// True under `σ_Z`: positive with variable outside `Z`, or negative with variable in `Z`.
#[inline]
pub fn true_under_sigma(lit: Literal, z: &VarSet) -> bool {
    lit.is_positive() != z.contains(lit.var())
}

/// Exactly one positive literal (counted by position) from `V∖Z`, and no
/// negative literal whose variable is in `Z`.
pub fn is_z_unique<F: ClauseSet>(formula: &F, z: &VarSet, i: usize) -> bool {
    let clause = formula.clause(i);
    let positives_outside = clause
        .iter()
        .filter(|l| l.is_positive() && !z.contains(l.var()))
        .count();
    let negative_inside = clause
        .iter()
        .any(|l| l.is_negative() && z.contains(l.var()));
    positives_outside == 1 && !negative_inside
}

/// `x ∉ Z` occurs positively in no `Z`-unique clause.
pub fn is_z_safe<F: ClauseSet>(x: u32, formula: &F, z: &VarSet) -> Result<bool, PredicateError> {
    if z.contains(x) {
        return Err(PredicateError::VariableInZ(x));
    }
    let unsafe_ = (0..formula.num_clauses())
        .any(|i| formula.clause(i).contains(&Literal::pos(x)) && is_z_unique(formula, z, i));
    Ok(!unsafe_)
}

/// No literal of clause `i` is true under `σ_Z` with its variable outside `Z′`.
pub fn is_endangered<F: ClauseSet>(formula: &F, z: &VarSet, z_prime: &VarSet, i: usize) -> bool {
    !formula
        .clause(i)
        .iter()
        .any(|&l| true_under_sigma(l, z) && !z_prime.contains(l.var()))
}

/// Dead literal: positive with variable in `Z ∪ Z′`, or negative with variable outside `Z`.
#[inline]
pub fn is_dead(lit: Literal, z: &VarSet, z_prime: &VarSet) -> bool {
    if lit.is_positive() {
        z.contains(lit.var()) || z_prime.contains(lit.var())
    } else {
        !z.contains(lit.var())
    }
}

/// `x ∉ Z ∪ Z′`, and there is no clause with `x` positive at some position
/// `l` and every other position dead.
pub fn is_zz_safe<F: ClauseSet>(x: u32, formula: &F, z: &VarSet, z_prime: &VarSet) -> bool {
    if z.contains(x) || z_prime.contains(x) {
        return false;
    }
    let target = Literal::pos(x);
    for i in 0..formula.num_clauses() {
        let clause = formula.clause(i);
        for (l, &lit) in clause.iter().enumerate() {
            if lit == target
                && clause
                    .iter()
                    .enumerate()
                    .all(|(j, &other)| j == l || is_dead(other, z, z_prime))
            {
                return false;
            }
        }
    }
    true
}
