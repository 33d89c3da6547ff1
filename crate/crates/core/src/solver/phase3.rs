use crate::formula::{Assignment, ClauseSet};
use crate::matching::{
    self, hall_violation, hopcroft_karp, ClauseVariableGraph, HallViolation, Matching,
};
use crate::solver::{predicates, VarSet};

#[derive(Debug, Clone)]
pub struct Phase3Result {
    pub graph: ClauseVariableGraph,
    pub matching: Matching,
    pub outcome: Result<Assignment, HallViolation>,
}

impl Phase3Result {
    pub fn endangered_count(&self) -> usize {
        self.graph.num_left()
    }

    pub fn covered(&self) -> bool {
        self.outcome.is_ok()
    }
}

/// `σ_{Z,Z′,M}`: `Z∖Z′` false; a matched variable false when it occurs
/// negatively in its matched clause; everything else true.
pub fn sigma_z_z_prime_m<F: ClauseSet>(
    formula: &F,
    z: &VarSet,
    z_prime: &VarSet,
    matched: &[(usize, u32)],
) -> Assignment {
    let mut a = Assignment::all_true(formula.num_vars());
    for &v in z.order() {
        if !z_prime.contains(v) {
            a.set(v, false);
        }
    }
    for &(clause, var) in matched {
        if formula
            .clause(clause)
            .iter()
            .any(|l| l.var() == var && l.is_negative())
        {
            a.set(var, false);
        }
    }
    a
}

/// Match endangered clauses to `Z′` variables; endangered clauses found by scanning.
pub fn run_phase3<F: ClauseSet>(formula: &F, z: &VarSet, z_prime: &VarSet) -> Phase3Result {
    let endangered = (0..formula.num_clauses())
        .filter(|&i| predicates::is_endangered(formula, z, z_prime, i))
        .collect();
    run_phase3_on(formula, z, z_prime, endangered)
}

pub(crate) fn run_phase3_on<F: ClauseSet>(
    formula: &F,
    z: &VarSet,
    z_prime: &VarSet,
    endangered: Vec<usize>,
) -> Phase3Result {
    let graph = ClauseVariableGraph::from_clauses(formula, endangered, z_prime);
    let matching = hopcroft_karp(&graph);
    let outcome = if matching.covers_left(&graph) {
        debug_assert!(matching::verify_matching(&graph, &matching));
        Ok(sigma_z_z_prime_m(
            formula,
            z,
            z_prime,
            &matching.edges(&graph),
        ))
    } else {
        Err(hall_violation(&graph, &matching).expect("uncovered left vertex"))
    };
    Phase3Result {
        graph,
        matching,
        outcome,
    }
}
