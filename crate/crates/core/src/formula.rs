//! Literals, k-uniform formulas, assignments and CNF semantics.

use std::collections::HashMap;
use std::fmt;
use std::num::NonZeroI32;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A signed literal: `+v` is the variable `v`, `-v` its negation.
///
/// Variables are numbered from 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(NonZeroI32);

impl Literal {
    /// Panics if `var` is zero or does not fit a signed 32-bit DIMACS literal.
    #[inline]
    pub fn new(var: u32, positive: bool) -> Self {
        assert!(
            var >= 1 && var <= i32::MAX as u32,
            "variable {var} out of range"
        );
        let v = var as i32;
        Literal(NonZeroI32::new(if positive { v } else { -v }).unwrap())
    }

    #[inline]
    pub fn pos(var: u32) -> Self {
        Self::new(var, true)
    }

    #[inline]
    pub fn neg(var: u32) -> Self {
        Self::new(var, false)
    }

    /// `None` for 0 and `i32::MIN`.
    pub fn from_dimacs(value: i32) -> Option<Self> {
        if value == i32::MIN {
            return None;
        }
        NonZeroI32::new(value).map(Literal)
    }

    #[inline]
    pub fn to_dimacs(self) -> i32 {
        self.0.get()
    }

    #[inline]
    pub fn var(self) -> u32 {
        self.0.get().unsigned_abs()
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0.get() > 0
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        self.0.get() < 0
    }

    #[inline]
    pub fn negate(self) -> Self {
        Literal(-self.0)
    }

    /// Dense code in `0..2n`: `2(v-1)` for `v`, `2(v-1)+1` for `¬v`.
    #[inline]
    pub fn code(self) -> usize {
        ((self.var() as usize - 1) << 1) | self.is_negative() as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Self {
        Self::new((code >> 1) as u32 + 1, code & 1 == 0)
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var())
        } else {
            write!(f, "¬x{}", self.var())
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Total truth assignment over variables `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn all_true(n: usize) -> Self {
        Assignment {
            values: vec![true; n],
        }
    }

    pub fn all_false(n: usize) -> Self {
        Assignment {
            values: vec![false; n],
        }
    }

    /// `values[v - 1]` is the value of variable `v`.
    pub fn from_values(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    #[inline]
    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn value(&self, var: u32) -> bool {
        self.values[var as usize - 1]
    }

    #[inline]
    pub fn set(&mut self, var: u32, value: bool) {
        self.values[var as usize - 1] = value;
    }

    #[inline]
    pub fn satisfies(&self, lit: Literal) -> bool {
        self.value(lit.var()) == lit.is_positive()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// Assignment as DIMACS literals, one per variable.
    pub fn to_literals(&self) -> Vec<Literal> {
        (1..=self.values.len() as u32)
            .map(|v| Literal::new(v, self.value(v)))
            .collect()
    }

    /// Short content hash (hex SHA-256 prefix) used to stamp result rows.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut packed = vec![0u8; self.values.len().div_ceil(8)];
        for (i, &b) in self.values.iter().enumerate() {
            if b {
                packed[i / 8] |= 1 << (i % 8);
            }
        }
        let mut hasher = Sha256::new();
        hasher.update((self.values.len() as u64).to_le_bytes());
        hasher.update(&packed);
        hex::encode(&hasher.finalize()[..8])
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_literals()).finish()
    }
}

/// Read access to an ordered, k-uniform list of clauses over `n` variables.
///
/// Implemented by the materialized [`Formula`] and by
/// [`SeededFormula`](crate::generator::SeededFormula), which regenerates
/// clauses on demand so that instances larger than memory can be solved.
pub trait ClauseSet: Sync {
    type Clause<'a>: Deref<Target = [Literal]>
    where
        Self: 'a;

    fn num_vars(&self) -> usize;
    fn width(&self) -> usize;
    fn num_clauses(&self) -> usize;
    /// Clause `i`, 0-based.
    fn clause(&self, i: usize) -> Self::Clause<'_>;
    /// All literals back to back, when they are stored that way.
    fn flat_literals(&self) -> Option<&[Literal]> {
        None
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("formula needs at least one variable")]
    NoVariables,
    #[error("clause width must be at least 1")]
    ZeroWidth,
    #[error("clause {clause} has {found} literals, expected {expected}")]
    WidthMismatch {
        clause: usize,
        expected: usize,
        found: usize,
    },
    #[error("literal {literal} in clause {clause} refers to a variable outside 1..={n}")]
    VariableOutOfRange {
        clause: usize,
        literal: i32,
        n: usize,
    },
}

/// A k-uniform CNF formula stored as a flat literal array of length `k·m`.
///
/// Clause order and repeated literals are preserved.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    n: usize,
    k: usize,
    literals: Vec<Literal>,
}

impl Formula {
    pub fn new(n: usize, k: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, FormulaError> {
        if k == 0 {
            return Err(FormulaError::ZeroWidth);
        }
        let mut literals = Vec::with_capacity(k * clauses.len());
        for (i, c) in clauses.iter().enumerate() {
            if c.len() != k {
                return Err(FormulaError::WidthMismatch {
                    clause: i,
                    expected: k,
                    found: c.len(),
                });
            }
            literals.extend_from_slice(c);
        }
        Self::from_flat(n, k, literals)
    }

    /// Build from a flat literal array; clause `i` is `literals[i*k..(i+1)*k]`.
    pub fn from_flat(n: usize, k: usize, literals: Vec<Literal>) -> Result<Self, FormulaError> {
        if n == 0 {
            return Err(FormulaError::NoVariables);
        }
        if k == 0 {
            return Err(FormulaError::ZeroWidth);
        }
        if !literals.len().is_multiple_of(k) {
            return Err(FormulaError::WidthMismatch {
                clause: literals.len() / k,
                expected: k,
                found: literals.len() % k,
            });
        }
        if let Some(pos) = literals.iter().position(|l| l.var() as usize > n) {
            return Err(FormulaError::VariableOutOfRange {
                clause: pos / k,
                literal: literals[pos].to_dimacs(),
                n,
            });
        }
        Ok(Formula { n, k, literals })
    }

    /// Convenience constructor from DIMACS-style signed integers.
    ///
    /// Panics on a zero literal; meant for fixtures.
    pub fn from_ints(n: usize, clauses: &[&[i32]]) -> Result<Self, FormulaError> {
        let k = clauses.first().map_or(1, |c| c.len());
        let clauses = clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&l| Literal::from_dimacs(l).expect("zero literal"))
                    .collect()
            })
            .collect();
        Self::new(n, k, clauses)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.literals.len() / self.k
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn clauses(&self) -> std::slice::ChunksExact<'_, Literal> {
        self.literals.chunks_exact(self.k)
    }

    /// Materialize any clause source.
    pub fn from_clause_set<F: ClauseSet>(source: &F) -> Self {
        let mut literals = Vec::with_capacity(source.width() * source.num_clauses());
        for i in 0..source.num_clauses() {
            literals.extend_from_slice(&source.clause(i));
        }
        Formula {
            n: source.num_vars(),
            k: source.width(),
            literals,
        }
    }

    /// Sub-formula made of the listed clauses, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut literals = Vec::with_capacity(indices.len() * self.k);
        for &i in indices {
            literals.extend_from_slice(self.clause(i));
        }
        Formula {
            n: self.n,
            k: self.k,
            literals,
        }
    }

    #[inline]
    pub fn clause(&self, i: usize) -> &[Literal] {
        &self.literals[i * self.k..(i + 1) * self.k]
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula(n={}, k={}, m={})", self.n, self.k, self.m())
    }
}

impl ClauseSet for Formula {
    type Clause<'a> = &'a [Literal];

    fn num_vars(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        self.k
    }

    fn num_clauses(&self) -> usize {
        self.m()
    }

    #[inline]
    fn clause(&self, i: usize) -> &[Literal] {
        Formula::clause(self, i)
    }

    fn flat_literals(&self) -> Option<&[Literal]> {
        Some(&self.literals)
    }
}

#[inline]
pub fn clause_satisfied(clause: &[Literal], assignment: &Assignment) -> bool {
    clause.iter().any(|&l| assignment.satisfies(l))
}

pub fn evaluate<F: ClauseSet>(formula: &F, assignment: &Assignment) -> bool {
    (0..formula.num_clauses()).all(|i| clause_satisfied(&formula.clause(i), assignment))
}

/// Ascending 0-based indices of the clauses falsified by `assignment`.
pub fn unsatisfied_indices<F: ClauseSet>(formula: &F, assignment: &Assignment) -> Vec<usize> {
    (0..formula.num_clauses())
        .filter(|&i| !clause_satisfied(&formula.clause(i), assignment))
        .collect()
}

#[inline]
pub fn is_all_negative(clause: &[Literal]) -> bool {
    clause.iter().all(|l| l.is_negative())
}

/// Occurrence diagnostics for repeated variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateStats {
    /// Clauses in which some variable appears at two or more positions.
    pub repeat_var_clauses: usize,
    /// Clauses sharing at least two distinct variables with some other clause.
    pub shared_pair_clauses: usize,
    /// Largest number of clauses any single variable occurs in.
    pub max_var_degree: usize,
}

pub fn duplicate_stats<F: ClauseSet>(formula: &F) -> DuplicateStats {
    let m = formula.num_clauses();
    let mut degree = vec![0usize; formula.num_vars() + 1];
    let mut first_holder: HashMap<(u32, u32), usize> = HashMap::new();
    let mut shares = vec![false; m];
    let mut repeat_var_clauses = 0;
    let mut vars = Vec::with_capacity(formula.width());

    for i in 0..m {
        vars.clear();
        vars.extend(formula.clause(i).iter().map(|l| l.var()));
        vars.sort_unstable();
        let len = vars.len();
        vars.dedup();
        if vars.len() < len {
            repeat_var_clauses += 1;
        }
        for &v in &vars {
            degree[v as usize] += 1;
        }
        for a in 0..vars.len() {
            for b in a + 1..vars.len() {
                let holder = *first_holder.entry((vars[a], vars[b])).or_insert(i);
                if holder != i {
                    shares[holder] = true;
                    shares[i] = true;
                }
            }
        }
    }

    DuplicateStats {
        repeat_var_clauses,
        shared_pair_clauses: shares.iter().filter(|&&s| s).count(),
        max_var_degree: degree.into_iter().max().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_true_except(n: usize, falses: &[u32]) -> Assignment {
        let mut a = Assignment::all_true(n);
        for &v in falses {
            a.set(v, false);
        }
        a
    }

    #[test]
    fn literal_encoding() {
        let l = Literal::neg(7);
        assert_eq!(l.to_dimacs(), -7);
        assert_eq!(l.var(), 7);
        assert!(l.is_negative());
        assert_eq!(l.negate(), Literal::pos(7));
        assert_eq!(Literal::from_code(l.code()), l);
        assert_eq!(Literal::pos(1).code(), 0);
        assert_eq!(Literal::from_dimacs(0), None);
    }

    #[test]
    fn evaluate_examples() {
        let a = Formula::from_ints(3, &[&[1, -2, 3]]).unwrap();
        assert!(evaluate(&a, &Assignment::all_true(3)));
        let b = Formula::from_ints(3, &[&[-1, -2, -3]]).unwrap();
        assert!(!evaluate(&b, &Assignment::all_true(3)));
        assert!(evaluate(&b, &all_true_except(3, &[2])));
    }

    #[test]
    fn unsatisfied_examples() {
        let f = Formula::from_ints(3, &[&[1, -2, 3]]).unwrap();
        assert!(unsatisfied_indices(&f, &Assignment::all_true(3)).is_empty());
        let f = Formula::from_ints(2, &[&[-1, -2], &[1, 2]]).unwrap();
        assert_eq!(unsatisfied_indices(&f, &Assignment::all_true(2)), vec![0]);
        let f = Formula::from_ints(1, &[&[-1], &[-1]]).unwrap();
        assert_eq!(
            unsatisfied_indices(&f, &Assignment::all_true(1)),
            vec![0, 1]
        );
    }

    #[test]
    fn duplicate_stats_examples() {
        let f = Formula::from_ints(2, &[&[1, 1, 2]]).unwrap();
        assert_eq!(duplicate_stats(&f).repeat_var_clauses, 1);
        let f = Formula::from_ints(4, &[&[1, 2, 3], &[-1, -2, 4]]).unwrap();
        let s = duplicate_stats(&f);
        assert_eq!(s.shared_pair_clauses, 2);
        assert_eq!(s.repeat_var_clauses, 0);
        assert_eq!(s.max_var_degree, 2);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Formula::from_ints(0, &[]).unwrap_err(),
            FormulaError::NoVariables
        );
        assert!(matches!(
            Formula::from_ints(2, &[&[1, 3]]),
            Err(FormulaError::VariableOutOfRange {
                clause: 0,
                literal: 3,
                n: 2
            })
        ));
        assert!(matches!(
            Formula::new(3, 2, vec![vec![Literal::pos(1)]]),
            Err(FormulaError::WidthMismatch { .. })
        ));
    }

    #[test]
    fn digest_distinguishes_assignments() {
        let a = Assignment::all_true(10);
        let b = all_true_except(10, &[3]);
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest(), Assignment::all_true(10).digest());
    }
}
