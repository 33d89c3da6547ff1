//! Comparison heuristics: Unit Clause, Shortest Clause, random-walk Walksat
//! and the Pure Literal rule.
//!
//! All of them are single-shot and seeded; the same `(formula, seed)` always
//! produces the same outcome.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Assignment, ClauseSet, Formula, Literal};
use crate::occurrences::OccurrenceIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Baseline {
    UnitClause,
    ShortestClause,
    Walksat,
    PureLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub algorithm: Baseline,
    pub seed: u64,
    /// Walksat flip budget; defaults to `50·n·k`.
    pub max_flips: Option<u64>,
}

impl BaselineConfig {
    pub fn new(algorithm: Baseline, seed: u64) -> Self {
        BaselineConfig {
            algorithm,
            seed,
            max_flips: None,
        }
    }
}

pub fn default_max_flips(n: usize, k: usize) -> u64 {
    50 * n as u64 * k as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum BaselineFailure {
    #[error("clause {clause} falsified")]
    Contradiction { clause: usize },
    #[error("flip budget of {flips} exhausted")]
    FlipBudgetExhausted { flips: u64 },
    #[error("{clauses} clauses left after pure literal elimination")]
    Residual { clauses: usize },
    #[error("max_flips must be at least 1")]
    InvalidBudget,
}

impl BaselineFailure {
    pub fn reason(&self) -> &'static str {
        match self {
            BaselineFailure::Contradiction { .. } => "contradiction",
            BaselineFailure::FlipBudgetExhausted { .. } => "budget",
            BaselineFailure::Residual { .. } => "residual",
            BaselineFailure::InvalidBudget => "invalid-budget",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineOutcome {
    pub result: Result<Assignment, BaselineFailure>,
    /// Assignments made (UC, SC, PL) or flips performed (Walksat).
    pub steps: u64,
}

pub fn run_baseline<F: ClauseSet>(
    formula: &F,
    occ: &OccurrenceIndex,
    config: &BaselineConfig,
) -> BaselineOutcome {
    match config.algorithm {
        Baseline::UnitClause => unit_clause_solve_with(formula, occ, config.seed),
        Baseline::ShortestClause => shortest_clause_solve_with(formula, occ, config.seed),
        Baseline::Walksat => walksat_solve_with(
            formula,
            occ,
            config.seed,
            config
                .max_flips
                .unwrap_or_else(|| default_max_flips(formula.num_vars(), formula.width())),
        ),
        Baseline::PureLiteral => pure_literal_solve_with(formula, occ),
    }
}

/// Clause indices grouped by current length, with O(1) insert, remove and
/// uniform sampling.
struct LengthBuckets {
    lists: Vec<Vec<u32>>,
    slot: Vec<u32>,
}

impl LengthBuckets {
    const ABSENT: u32 = u32::MAX;

    fn new(max_len: usize, m: usize) -> Self {
        LengthBuckets {
            lists: vec![Vec::new(); max_len + 1],
            slot: vec![Self::ABSENT; m],
        }
    }

    fn insert(&mut self, len: usize, i: usize) {
        self.slot[i] = self.lists[len].len() as u32;
        self.lists[len].push(i as u32);
    }

    fn remove(&mut self, len: usize, i: usize) {
        let s = self.slot[i];
        if s == Self::ABSENT {
            return;
        }
        let list = &mut self.lists[len];
        let last = *list.last().unwrap();
        list.swap_remove(s as usize);
        if last as usize != i {
            self.slot[last as usize] = s;
        }
        self.slot[i] = Self::ABSENT;
    }

    fn shortest(&self) -> Option<usize> {
        self.lists
            .iter()
            .skip(1)
            .position(|l| !l.is_empty())
            .map(|p| p + 1)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Rule {
    Unit,
    Shortest,
}

/// Partial assignment with per-clause bookkeeping: satisfied flags and the
/// number of distinct unassigned variables of each unsatisfied clause.
struct Propagation<'a, F: ClauseSet> {
    formula: &'a F,
    occ: &'a OccurrenceIndex,
    rule: Rule,
    value: Vec<Option<bool>>,
    free_vars: Vec<u32>,
    free_slot: Vec<u32>,
    satisfied: Vec<bool>,
    length: Vec<u32>,
    satisfied_count: usize,
    units: BTreeSet<u32>,
    buckets: LengthBuckets,
    steps: u64,
}

impl<'a, F: ClauseSet> Propagation<'a, F> {
    fn new(formula: &'a F, occ: &'a OccurrenceIndex, rule: Rule) -> Result<Self, usize> {
        let n = formula.num_vars();
        let m = formula.num_clauses();
        let k = formula.width();
        let mut p = Propagation {
            formula,
            occ,
            rule,
            value: vec![None; n + 1],
            free_vars: (1..=n as u32).collect(),
            free_slot: (0..=n as u32).map(|v| v.wrapping_sub(1)).collect(),
            satisfied: vec![false; m],
            length: vec![0; m],
            satisfied_count: 0,
            units: BTreeSet::new(),
            buckets: LengthBuckets::new(k, if rule == Rule::Shortest { m } else { 0 }),
            steps: 0,
        };
        let mut vars = Vec::with_capacity(k);
        for i in 0..m {
            vars.clear();
            vars.extend(formula.clause(i).iter().map(|l| l.var()));
            vars.sort_unstable();
            vars.dedup();
            p.length[i] = vars.len() as u32;
            p.enter(i);
        }
        Ok(p)
    }

    /// Register clause `i` under its current length.
    fn enter(&mut self, i: usize) {
        let len = self.length[i] as usize;
        match self.rule {
            Rule::Unit if len == 1 => {
                self.units.insert(i as u32);
            }
            Rule::Shortest if len < self.formula.width() => self.buckets.insert(len, i),
            _ => {}
        }
    }

    fn leave(&mut self, i: usize) {
        let len = self.length[i] as usize;
        match self.rule {
            Rule::Unit if len == 1 => {
                self.units.remove(&(i as u32));
            }
            Rule::Shortest if len < self.formula.width() => self.buckets.remove(len, i),
            _ => {}
        }
    }

    fn assign(&mut self, x: u32, v: bool) -> Result<(), usize> {
        debug_assert!(self.value[x as usize].is_none());
        self.value[x as usize] = Some(v);
        let s = self.free_slot[x as usize] as usize;
        let last = *self.free_vars.last().unwrap();
        self.free_vars.swap_remove(s);
        if last != x {
            self.free_slot[last as usize] = s as u32;
        }
        self.steps += 1;

        let mut conflict = None;
        for (i, cp, cn) in self.occ.grouped(x) {
            let i = i as usize;
            if self.satisfied[i] {
                continue;
            }
            self.leave(i);
            if (v && cp > 0) || (!v && cn > 0) {
                self.satisfied[i] = true;
                self.satisfied_count += 1;
            } else {
                self.length[i] -= 1;
                if self.length[i] == 0 {
                    conflict.get_or_insert(i);
                } else {
                    self.enter(i);
                }
            }
        }
        conflict.map_or(Ok(()), Err)
    }

    /// Some unassigned literal of clause `i`, uniformly among distinct ones.
    fn free_literal(&self, i: usize, rng: &mut ChaCha8Rng) -> Literal {
        let clause = self.formula.clause(i);
        let mut options: Vec<Literal> = clause
            .iter()
            .copied()
            .filter(|l| self.value[l.var() as usize].is_none())
            .collect();
        options.sort_unstable();
        options.dedup();
        options[rng.random_range(0..options.len())]
    }

    fn run(mut self, rng: &mut ChaCha8Rng) -> BaselineOutcome {
        let m = self.formula.num_clauses();
        let result = loop {
            if self.satisfied_count == m {
                let mut a = Assignment::all_true(self.formula.num_vars());
                for v in 1..self.value.len() {
                    if let Some(b) = self.value[v] {
                        a.set(v as u32, b);
                    }
                }
                break Ok(a);
            }
            let forced = match self.rule {
                Rule::Unit => self
                    .units
                    .first()
                    .map(|&i| self.free_literal(i as usize, rng)),
                Rule::Shortest => self.buckets.shortest().map(|len| {
                    let list = &self.buckets.lists[len];
                    let i = list[rng.random_range(0..list.len())] as usize;
                    self.free_literal(i, rng)
                }),
            };
            let (x, v) = match forced {
                Some(lit) => (lit.var(), lit.is_positive()),
                None => {
                    // Unsatisfied clauses always keep a free variable, so this is non-empty.
                    let x = self.free_vars[rng.random_range(0..self.free_vars.len())];
                    (x, rng.random_bool(0.5))
                }
            };
            if let Err(clause) = self.assign(x, v) {
                break Err(BaselineFailure::Contradiction { clause });
            }
        };
        BaselineOutcome {
            result,
            steps: self.steps,
        }
    }
}

fn propagate<F: ClauseSet>(
    formula: &F,
    occ: &OccurrenceIndex,
    seed: u64,
    rule: Rule,
) -> BaselineOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match Propagation::new(formula, occ, rule) {
        Ok(p) => p.run(&mut rng),
        Err(clause) => BaselineOutcome {
            result: Err(BaselineFailure::Contradiction { clause }),
            steps: 0,
        },
    }
}

/// Satisfy the lowest-index unit clause if there is one, otherwise give a
/// uniformly random free variable a uniformly random value.
pub fn unit_clause_solve<F: ClauseSet>(formula: &F, seed: u64) -> BaselineOutcome {
    let occ = OccurrenceIndex::build(formula).expect("clause count fits u32");
    unit_clause_solve_with(formula, &occ, seed)
}

pub fn unit_clause_solve_with<F: ClauseSet>(
    formula: &F,
    occ: &OccurrenceIndex,
    seed: u64,
) -> BaselineOutcome {
    propagate(formula, occ, seed, Rule::Unit)
}

/// Pick a uniformly random clause among the shortest shortened ones and set a
/// uniformly random free literal in it true; free step when no clause has
/// been shortened below `k`.
pub fn shortest_clause_solve<F: ClauseSet>(formula: &F, seed: u64) -> BaselineOutcome {
    let occ = OccurrenceIndex::build(formula).expect("clause count fits u32");
    shortest_clause_solve_with(formula, &occ, seed)
}

pub fn shortest_clause_solve_with<F: ClauseSet>(
    formula: &F,
    occ: &OccurrenceIndex,
    seed: u64,
) -> BaselineOutcome {
    propagate(formula, occ, seed, Rule::Shortest)
}

/// Pure random walk: flip a uniformly random variable position of a
/// uniformly random unsatisfied clause.
pub fn walksat_solve<F: ClauseSet>(formula: &F, seed: u64, max_flips: u64) -> BaselineOutcome {
    let occ = OccurrenceIndex::build(formula).expect("clause count fits u32");
    walksat_solve_with(formula, &occ, seed, max_flips)
}

pub fn walksat_solve_with<F: ClauseSet>(
    formula: &F,
    occ: &OccurrenceIndex,
    seed: u64,
    max_flips: u64,
) -> BaselineOutcome {
    if max_flips == 0 {
        return BaselineOutcome {
            result: Err(BaselineFailure::InvalidBudget),
            steps: 0,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = formula.num_vars();
    let m = formula.num_clauses();
    let mut assignment = Assignment::from_values((0..n).map(|_| rng.random_bool(0.5)).collect());
    let mut true_count = vec![0u32; m];
    let mut unsat = LengthBuckets::new(0, m);
    for (i, count) in true_count.iter_mut().enumerate() {
        *count = formula
            .clause(i)
            .iter()
            .filter(|&&l| assignment.satisfies(l))
            .count() as u32;
        if *count == 0 {
            unsat.insert(0, i);
        }
    }
    let mut flips = 0u64;
    while !unsat.lists[0].is_empty() {
        if flips == max_flips {
            return BaselineOutcome {
                result: Err(BaselineFailure::FlipBudgetExhausted { flips }),
                steps: flips,
            };
        }
        let list = &unsat.lists[0];
        let i = list[rng.random_range(0..list.len())] as usize;
        let x = formula.clause(i)[rng.random_range(0..formula.width())].var();
        let now_true = Literal::new(x, !assignment.value(x));
        assignment.set(x, now_true.is_positive());
        for &c in occ.clauses(now_true) {
            let c = c as usize;
            if true_count[c] == 0 {
                unsat.remove(0, c);
            }
            true_count[c] += 1;
        }
        for &c in occ.clauses(now_true.negate()) {
            let c = c as usize;
            true_count[c] -= 1;
            if true_count[c] == 0 {
                unsat.insert(0, c);
            }
        }
        flips += 1;
    }
    BaselineOutcome {
        result: Ok(assignment),
        steps: flips,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureLiteralReduction {
    /// `partial[v - 1]` is the value forced on `v`, if any.
    pub partial: Vec<Option<bool>>,
    /// Clauses not satisfied by `partial`, in original order.
    pub residual: Formula,
    pub residual_indices: Vec<usize>,
}

/// Repeatedly set the lowest-numbered pure variable to satisfy its literal
/// and drop the clauses it satisfies, until no pure variable remains.
pub fn pure_literal_reduce<F: ClauseSet>(formula: &F) -> PureLiteralReduction {
    let occ = OccurrenceIndex::build(formula).expect("clause count fits u32");
    pure_literal_reduce_with(formula, &occ)
}

pub fn pure_literal_reduce_with<F: ClauseSet>(
    formula: &F,
    occ: &OccurrenceIndex,
) -> PureLiteralReduction {
    let n = formula.num_vars();
    let m = formula.num_clauses();
    let mut pos = vec![0u32; n + 1];
    let mut neg = vec![0u32; n + 1];
    for v in 1..=n as u32 {
        pos[v as usize] = occ.positive(v).len() as u32;
        neg[v as usize] = occ.negative(v).len() as u32;
    }
    let is_pure = |p: u32, q: u32| (p == 0) != (q == 0);
    let mut pure: BTreeSet<u32> = (1..=n as u32)
        .filter(|&v| is_pure(pos[v as usize], neg[v as usize]))
        .collect();
    let mut partial = vec![None; n];
    let mut removed = vec![false; m];

    while let Some(v) = pure.pop_first() {
        let value = pos[v as usize] > 0;
        partial[v as usize - 1] = Some(value);
        for &i in occ.clauses(Literal::new(v, value)) {
            let i = i as usize;
            if std::mem::replace(&mut removed[i], true) {
                continue;
            }
            for lit in formula.clause(i).iter() {
                let u = lit.var() as usize;
                if lit.is_positive() {
                    pos[u] -= 1;
                } else {
                    neg[u] -= 1;
                }
                if partial[u - 1].is_none() {
                    if is_pure(pos[u], neg[u]) {
                        pure.insert(u as u32);
                    } else {
                        pure.remove(&(u as u32));
                    }
                }
            }
        }
    }

    let residual_indices: Vec<usize> = (0..m).filter(|&i| !removed[i]).collect();
    let mut literals = Vec::with_capacity(residual_indices.len() * formula.width());
    for &i in &residual_indices {
        literals.extend_from_slice(&formula.clause(i));
    }
    let residual =
        Formula::from_flat(n, formula.width(), literals).expect("subset of a valid formula");
    PureLiteralReduction {
        partial,
        residual,
        residual_indices,
    }
}

/// Pure literal elimination as a solver: succeeds iff nothing is left;
/// untouched variables are set true.
pub fn pure_literal_solve_with<F: ClauseSet>(
    formula: &F,
    occ: &OccurrenceIndex,
) -> BaselineOutcome {
    let r = pure_literal_reduce_with(formula, occ);
    let steps = r.partial.iter().filter(|v| v.is_some()).count() as u64;
    let result = if r.residual_indices.is_empty() {
        Ok(Assignment::from_values(
            r.partial.iter().map(|v| v.unwrap_or(true)).collect(),
        ))
    } else {
        Err(BaselineFailure::Residual {
            clauses: r.residual_indices.len(),
        })
    };
    BaselineOutcome { result, steps }
}
