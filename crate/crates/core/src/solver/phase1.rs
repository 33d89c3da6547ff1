use crate::formula::{is_all_negative, ClauseSet, Literal};
use crate::instrumentation::TraceRecord;
use crate::occurrences::OccurrenceIndex;
use crate::solver::{SolverParams, VarSet};

/// Counters describing `Z` after each Phase-1 step.
///
/// For every clause `i`:
/// * `pos_out_z[i]`: positions holding a positive literal whose variable is not in `Z`;
/// * `neg_in_z[i]`: positions holding a negative literal whose variable is in `Z`;
///
/// clause `i` is `Z`-unique iff `pos_out_z[i] == 1 && neg_in_z[i] == 0`.
/// `support[x]` counts the `Z`-unique clauses in which `x` occurs positively.
#[derive(Debug, Clone)]
pub struct Phase1State {
    k1: usize,
    z: VarSet,
    pos_out_z: Vec<u8>,
    neg_in_z: Vec<u8>,
    support: Vec<u32>,
    z_unique_count: usize,
    fallback_count: usize,
}

impl Phase1State {
    /// State for `Z = ∅`.
    pub fn new<F: ClauseSet>(formula: &F) -> Self {
        let m = formula.num_clauses();
        let mut state = Phase1State {
            k1: SolverParams::new(formula.width()).k1,
            z: VarSet::new(formula.num_vars()),
            pos_out_z: vec![0; m],
            neg_in_z: vec![0; m],
            support: vec![0; formula.num_vars() + 1],
            z_unique_count: 0,
            fallback_count: 0,
        };
        for i in 0..m {
            let clause = formula.clause(i);
            let positives = clause.iter().filter(|l| l.is_positive()).count();
            state.pos_out_z[i] = positives as u8;
            if positives == 1 {
                state.toggle_unique(&clause, true);
            }
        }
        state
    }

    #[inline]
    fn is_unique_counters(&self, i: usize) -> bool {
        self.pos_out_z[i] == 1 && self.neg_in_z[i] == 0
    }

    /// Adjust supports of the distinct positive variables of a clause that
    /// just entered (`on`) or left the `Z`-unique set.
    fn toggle_unique(&mut self, clause: &[Literal], on: bool) {
        for (j, &lit) in clause.iter().enumerate() {
            if lit.is_positive() && !clause[..j].contains(&lit) {
                let s = &mut self.support[lit.var() as usize];
                if on {
                    *s += 1;
                } else {
                    *s -= 1;
                }
            }
        }
        if on {
            self.z_unique_count += 1;
        } else {
            self.z_unique_count -= 1;
        }
    }

    /// Insert `x` into `Z` and update every counter it touches.
    pub fn add_to_z<F: ClauseSet>(&mut self, formula: &F, occ: &OccurrenceIndex, x: u32) {
        if !self.z.insert(x) {
            return;
        }
        for &i in occ.positive(x) {
            let i = i as usize;
            let before = self.is_unique_counters(i);
            self.pos_out_z[i] -= 1;
            let after = self.is_unique_counters(i);
            if before != after {
                self.toggle_unique(&formula.clause(i), after);
            }
        }
        for &i in occ.negative(x) {
            let i = i as usize;
            let before = self.is_unique_counters(i);
            self.neg_in_z[i] += 1;
            let after = self.is_unique_counters(i);
            if before != after {
                self.toggle_unique(&formula.clause(i), after);
            }
        }
    }

    pub fn z(&self) -> &VarSet {
        &self.z
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn is_z_unique(&self, i: usize) -> bool {
        self.is_unique_counters(i)
    }

    /// `U(x)`; defined for every variable, including members of `Z`.
    pub fn support(&self, x: u32) -> u32 {
        self.support[x as usize]
    }

    /// Counter form of `Z`-safety; meaningful for `x ∉ Z`.
    pub fn is_z_safe(&self, x: u32) -> bool {
        self.support[x as usize] == 0
    }

    pub fn pos_out_z(&self, i: usize) -> u8 {
        self.pos_out_z[i]
    }

    pub fn neg_in_z(&self, i: usize) -> u8 {
        self.neg_in_z[i]
    }

    pub fn z_unique_count(&self) -> usize {
        self.z_unique_count
    }

    /// Selections that took the fallback position `k1`.
    pub fn fallback_count(&self) -> usize {
        self.fallback_count
    }
}

/// Phase 1 as a resumable process: each [`step`](Phase1::step) performs one
/// selection (or reports that the clause scan is complete).
pub struct Phase1<'a, F: ClauseSet> {
    formula: &'a F,
    occ: &'a OccurrenceIndex,
    state: Phase1State,
    next_clause: usize,
}

impl<'a, F: ClauseSet> Phase1<'a, F> {
    pub fn new(formula: &'a F, occ: &'a OccurrenceIndex) -> Self {
        Phase1 {
            formula,
            occ,
            state: Phase1State::new(formula),
            next_clause: 0,
        }
    }

    pub fn state(&self) -> &Phase1State {
        &self.state
    }

    pub fn into_state(self) -> Phase1State {
        self.state
    }

    /// Scan forward to the next all-negative clause with no variable in `Z`
    /// and add one of its variables to `Z`.
    pub fn step(&mut self) -> Option<TraceRecord> {
        let m = self.formula.num_clauses();
        while self.next_clause < m {
            let i = self.next_clause;
            self.next_clause += 1;
            if self.state.neg_in_z[i] != 0 {
                continue;
            }
            let clause = self.formula.clause(i);
            if !is_all_negative(&clause) {
                continue;
            }
            let k1 = self.state.k1;
            let safe = clause[..k1 - 1]
                .iter()
                .map(|l| l.var())
                .find(|&x| self.state.is_z_safe(x));
            let (var, fallback) = match safe {
                Some(x) => (x, false),
                None => (clause[k1 - 1].var(), true),
            };
            drop(clause);
            self.state.add_to_z(self.formula, self.occ, var);
            if fallback {
                self.state.fallback_count += 1;
            }
            return Some(TraceRecord {
                step: self.state.z.len(),
                clause: i,
                variable: var,
                fallback,
                z_unique_count: self.state.z_unique_count,
            });
        }
        None
    }
}

pub struct Phase1Result {
    pub state: Phase1State,
    pub trace: Option<Vec<TraceRecord>>,
}

pub fn run_phase1<F: ClauseSet>(formula: &F, occ: &OccurrenceIndex, trace: bool) -> Phase1Result {
    let mut process = Phase1::new(formula, occ);
    let mut records = trace.then(Vec::new);
    while let Some(record) = process.step() {
        if let Some(r) = records.as_mut() {
            r.push(record);
        }
    }
    Phase1Result {
        state: process.into_state(),
        trace: records,
    }
}
