use std::collections::BTreeSet;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::formula::{ClauseSet, Literal};
use crate::occurrences::OccurrenceIndex;
use crate::solver::{Phase1State, SolverParams, VarSet};

/// Counters describing `Z′` relative to a fixed `Z`.
///
/// For every clause `i`:
/// * `support_out[i]`: positions whose literal is true under `σ_Z` with variable outside `Z′`
///   (the clause is endangered iff this is 0);
/// * `distinct_zp[i]`: distinct variables of the clause that lie in `Z′`;
/// * `non_dead[i]`: positions that are neither positive with variable in `Z ∪ Z′`
///   nor negative with variable outside `Z`.
///
/// `unsafe_support[x]` counts clauses whose single non-dead position is `x` positive.
/// The queue holds the endangered clauses with fewer than three distinct `Z′` variables.
const PREFETCH_DISTANCE: usize = 16;

fn prefetch<T>(item: &T) {
    crate::occurrences::prefetch(item as *const T);
}

// Kept side by side so one update touches one cache line.
#[derive(Debug, Clone, Copy, Default)]
struct ClauseCounters {
    support_out: u8,
    distinct_zp: u8,
    non_dead: u8,
}

#[derive(Debug, Clone)]
pub struct Phase2State {
    z: VarSet,
    z_prime: VarSet,
    counters: Vec<ClauseCounters>,
    unsafe_support: Vec<u32>,
    queue: BTreeSet<u32>,
    iterations: usize,
    initial_queue_len: usize,
}

#[inline]
fn true_under_sigma(lit: Literal, z: &VarSet) -> bool {
    lit.is_positive() != z.contains(lit.var())
}

impl Phase2State {
    /// State for `Z′ = ∅`; the queue starts as the clauses falsified by `σ_Z`.
    pub fn new<F: ClauseSet>(formula: &F, z: &VarSet) -> Self {
        let m = formula.num_clauses();
        let mut state = Phase2State {
            z: z.clone(),
            z_prime: VarSet::new(formula.num_vars()),
            counters: vec![ClauseCounters::default(); m],
            unsafe_support: vec![0; formula.num_vars() + 1],
            queue: BTreeSet::new(),
            iterations: 0,
            initial_queue_len: 0,
        };
        for i in 0..m {
            let clause = formula.clause(i);
            // With Z′ empty, a literal is live iff it is true under σ_Z.
            let mut support = 0u8;
            let mut live_lit = None;
            for &lit in clause.iter() {
                if true_under_sigma(lit, z) {
                    support += 1;
                    live_lit = Some(lit);
                }
            }
            state.counters[i].support_out = support;
            state.counters[i].non_dead = support;
            if support == 1 {
                let lit = live_lit.unwrap();
                if lit.is_positive() {
                    state.unsafe_support[lit.var() as usize] += 1;
                }
            }
            if support == 0 {
                state.queue.insert(i as u32);
            }
        }
        state.initial_queue_len = state.queue.len();
        state
    }

    /// Dead-literal test with the membership of `x` in `Z′` overridden.
    #[inline]
    fn is_dead(&self, lit: Literal, x: u32, x_in_zp: bool) -> bool {
        let v = lit.var();
        if lit.is_positive() {
            self.z.contains(v)
                || if v == x {
                    x_in_zp
                } else {
                    self.z_prime.contains(v)
                }
        } else {
            !self.z.contains(v)
        }
    }

    /// The variable clause `i` makes `(Z,Z′)`-unsafe, if any, while `x` is
    /// treated as in or out of `Z′`.
    fn witness(&self, clause: &[Literal], x: u32, x_in_zp: bool) -> Option<u32> {
        let lit = clause
            .iter()
            .copied()
            .find(|&l| !self.is_dead(l, x, x_in_zp))
            .expect("one live literal");
        lit.is_positive().then(|| lit.var())
    }

    /// Insert `x` into `Z′` and update every counter it touches.
    pub fn add_to_z_prime<F: ClauseSet>(&mut self, formula: &F, occ: &OccurrenceIndex, x: u32) {
        if self.z_prime.contains(x) {
            return;
        }
        let in_z = self.z.contains(x);
        let groups = occ.grouped(x);
        for (g, &(i, cp, cn)) in groups.iter().enumerate() {
            if let Some(&(ahead, _, _)) = groups.get(g + PREFETCH_DISTANCE) {
                prefetch(&self.counters[ahead as usize]);
            }
            let i = i as usize;
            let c = self.counters[i];
            let was_queued = c.support_out == 0 && c.distinct_zp < 3;
            let mut next = c;
            if in_z {
                next.support_out -= cn as u8;
            } else {
                next.support_out -= cp as u8;
                next.non_dead -= cp as u8;
            }
            next.distinct_zp += 1;
            // Only positive occurrences outside Z change liveness.
            if !in_z && cp > 0 && (c.non_dead == 1 || next.non_dead == 1) {
                let clause = formula.clause(i);
                let before = (c.non_dead == 1)
                    .then(|| self.witness(&clause, x, false))
                    .flatten();
                let after = (next.non_dead == 1)
                    .then(|| self.witness(&clause, x, true))
                    .flatten();
                if before != after {
                    if let Some(v) = before {
                        self.unsafe_support[v as usize] -= 1;
                    }
                    if let Some(v) = after {
                        self.unsafe_support[v as usize] += 1;
                    }
                }
            }
            self.counters[i] = next;
            let queued = next.support_out == 0 && next.distinct_zp < 3;
            if queued && !was_queued {
                self.queue.insert(i as u32);
            } else if was_queued && !queued {
                self.queue.remove(&(i as u32));
            }
        }
        self.z_prime.insert(x);
    }

    pub fn z(&self) -> &VarSet {
        &self.z
    }

    pub fn z_prime(&self) -> &VarSet {
        &self.z_prime
    }

    /// Counter form of `(Z,Z′)`-safety.
    pub fn is_zz_safe(&self, x: u32) -> bool {
        !self.z.contains(x) && !self.z_prime.contains(x) && self.unsafe_support[x as usize] == 0
    }

    pub fn is_endangered(&self, i: usize) -> bool {
        self.counters[i].support_out == 0
    }

    pub fn support_out(&self, i: usize) -> u8 {
        self.counters[i].support_out
    }

    pub fn distinct_z_prime(&self, i: usize) -> u8 {
        self.counters[i].distinct_zp
    }

    pub fn non_dead(&self, i: usize) -> u8 {
        self.counters[i].non_dead
    }

    pub fn unsafe_support(&self, x: u32) -> u32 {
        self.unsafe_support[x as usize]
    }

    pub fn queue(&self) -> &BTreeSet<u32> {
        &self.queue
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Clauses falsified by `σ_Z`, i.e. the queue size before the first iteration.
    pub fn initial_queue_len(&self) -> usize {
        self.initial_queue_len
    }

    /// All `(Z,Z′)`-endangered clauses in ascending order.
    pub fn endangered_clauses(&self) -> Vec<usize> {
        (0..self.counters.len())
            .filter(|&i| self.counters[i].support_out == 0)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepairWindow {
    /// Three safe variables from positions `(k1, k−5]`.
    Safe,
    /// First three distinct variables outside `Z′` from positions `(k−5, k]`.
    Tail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Phase2Step {
    pub clause: usize,
    pub variables: [u32; 3],
    pub window: RepairWindow,
}

/// Phase 2 as a resumable process over a fixed `Z`.
pub struct Phase2<'a, F: ClauseSet> {
    formula: &'a F,
    occ: &'a OccurrenceIndex,
    params: SolverParams,
    state: Phase2State,
}

impl<'a, F: ClauseSet> Phase2<'a, F> {
    pub fn new(formula: &'a F, occ: &'a OccurrenceIndex, phase1: &Phase1State) -> Self {
        Self::with_z(formula, occ, phase1.z())
    }

    pub fn with_z(formula: &'a F, occ: &'a OccurrenceIndex, z: &VarSet) -> Self {
        Phase2 {
            formula,
            occ,
            params: SolverParams::new(formula.width()),
            state: Phase2State::new(formula, z),
        }
    }

    pub fn state(&self) -> &Phase2State {
        &self.state
    }

    pub fn into_state(self) -> Phase2State {
        self.state
    }

    /// One loop iteration on the smallest queued clause. `Ok(None)` once the
    /// queue is empty; `Err(clause)` if the tail window lacks three distinct
    /// variables outside `Z′`.
    pub fn step(&mut self) -> Result<Option<Phase2Step>, usize> {
        let Some(&i) = self.state.queue.first() else {
            return Ok(None);
        };
        let i = i as usize;
        let clause = self.formula.clause(i);
        let mut picks: ArrayVec<u32, 3> = ArrayVec::new();
        for lit in &clause[self.params.window_2d.clone()] {
            let x = lit.var();
            if self.state.is_zz_safe(x) && !picks.contains(&x) {
                picks.push(x);
                if picks.is_full() {
                    break;
                }
            }
        }
        let window = if picks.is_full() {
            RepairWindow::Safe
        } else {
            picks.clear();
            for lit in &clause[self.params.window_2e.clone()] {
                let x = lit.var();
                if !self.state.z_prime.contains(x) && !picks.contains(&x) {
                    picks.push(x);
                    if picks.is_full() {
                        break;
                    }
                }
            }
            if !picks.is_full() {
                return Err(i);
            }
            RepairWindow::Tail
        };
        drop(clause);
        for &x in &picks {
            self.state.add_to_z_prime(self.formula, self.occ, x);
        }
        self.state.iterations += 1;
        let variables = picks.into_inner().expect("three picks");
        Ok(Some(Phase2Step {
            clause: i,
            variables,
            window,
        }))
    }
}

/// Run the repair loop to completion; `Err(clause)` on a degenerate clause,
/// returning the state reached so far alongside.
pub fn run_phase2<F: ClauseSet>(
    formula: &F,
    occ: &OccurrenceIndex,
    z: &VarSet,
) -> (Phase2State, Result<(), usize>) {
    let mut process = Phase2::with_z(formula, occ, z);
    let status = loop {
        match process.step() {
            Ok(Some(_)) => {}
            Ok(None) => break Ok(()),
            Err(clause) => break Err(clause),
        }
    };
    (process.into_state(), status)
}
