//! DIMACS CNF reading and writing for k-uniform formulas.
//!
//! Clause order and repeated literals survive a round trip. The writer
//! emits a `c width <k>` comment so that formulas without clauses keep
//! their width; the reader honours it when present and otherwise infers
//! `k` from the first clause.

use std::fmt::Write as _;
use std::io::{self, Write};

use thiserror::Error;

use crate::formula::{Assignment, Formula, Literal};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("missing 'p cnf <vars> <clauses>' header")]
    MissingHeader,
    #[error("line {line}: malformed header {text:?}")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: duplicate header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: invalid token {token:?}")]
    BadToken { line: usize, token: String },
    #[error("line {line}: literal {literal} outside declared range 1..={n}")]
    VariableOutOfRange { line: usize, literal: i64, n: usize },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("last clause is not terminated by 0")]
    UnterminatedClause,
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("non-uniform clause width: clause {clause} has {found} literals, expected {expected}")]
    NonUniformWidth {
        clause: usize,
        expected: usize,
        found: usize,
    },
    #[error("cannot infer clause width of a formula without clauses")]
    UnknownWidth,
    #[error("header declares zero variables")]
    NoVariables,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssignmentParseError {
    #[error("line {line}: invalid token {token:?}")]
    BadToken { line: usize, token: String },
    #[error("literal {0} outside 1..={1}")]
    OutOfRange(i64, usize),
    #[error("variable {0} assigned twice")]
    Duplicate(u32),
    #[error("variable {0} has no value")]
    Missing(u32),
}

/// Parse a k-uniform DIMACS CNF document.
pub fn parse_dimacs(text: &str) -> Result<Formula, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut width_hint: Option<usize> = None;
    let mut literals: Vec<Literal> = Vec::new();
    let mut clause_lens: Vec<usize> = Vec::new();
    let mut current = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            let mut it = rest.split_whitespace();
            if it.next() == Some("width") {
                if let Some(k) = it.next().and_then(|t| t.parse::<usize>().ok()) {
                    width_hint = Some(k);
                }
            }
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line: line_no });
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || DimacsError::BadHeader {
                line: line_no,
                text: line.to_string(),
            };
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(bad());
            }
            let n = parts[2].parse::<usize>().map_err(|_| bad())?;
            let m = parts[3].parse::<usize>().map_err(|_| bad())?;
            if n == 0 {
                return Err(DimacsError::NoVariables);
            }
            if n > i32::MAX as usize {
                return Err(bad());
            }
            header = Some((n, m));
            literals.reserve(m.saturating_mul(3).min(1 << 24));
            continue;
        }
        let (n, _) = header.ok_or(DimacsError::MissingHeader)?;
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| DimacsError::BadToken {
                line: line_no,
                token: token.to_string(),
            })?;
            if value == 0 {
                if current == 0 {
                    return Err(DimacsError::EmptyClause { line: line_no });
                }
                clause_lens.push(current);
                current = 0;
                continue;
            }
            if value.unsigned_abs() as usize > n {
                return Err(DimacsError::VariableOutOfRange {
                    line: line_no,
                    literal: value,
                    n,
                });
            }
            literals.push(Literal::from_dimacs(value as i32).expect("nonzero and in range"));
            current += 1;
        }
    }

    let (n, m) = header.ok_or(DimacsError::MissingHeader)?;
    if current != 0 {
        return Err(DimacsError::UnterminatedClause);
    }
    if clause_lens.len() != m {
        return Err(DimacsError::ClauseCountMismatch {
            declared: m,
            found: clause_lens.len(),
        });
    }
    let k = match (clause_lens.first(), width_hint) {
        (Some(&first), Some(hint)) if hint != first => {
            return Err(DimacsError::NonUniformWidth {
                clause: 0,
                expected: hint,
                found: first,
            })
        }
        (Some(&first), _) => first,
        (None, Some(hint)) if hint > 0 => hint,
        (None, _) => return Err(DimacsError::UnknownWidth),
    };
    if let Some(bad) = clause_lens.iter().position(|&len| len != k) {
        return Err(DimacsError::NonUniformWidth {
            clause: bad,
            expected: k,
            found: clause_lens[bad],
        });
    }
    Ok(Formula::from_flat(n, k, literals).expect("validated while parsing"))
}

/// Stream a formula as DIMACS; `comments` become leading `c` lines.
pub fn write_dimacs_to<W: Write>(
    formula: &Formula,
    comments: &[String],
    out: &mut W,
) -> io::Result<()> {
    for c in comments {
        for line in c.lines() {
            writeln!(out, "c {line}")?;
        }
    }
    writeln!(out, "c width {}", formula.k())?;
    writeln!(out, "p cnf {} {}", formula.n(), formula.m())?;
    let mut buf = String::with_capacity(formula.k() * 8);
    for clause in formula.clauses() {
        buf.clear();
        for lit in clause {
            let _ = write!(buf, "{} ", lit.to_dimacs());
        }
        buf.push('0');
        writeln!(out, "{buf}")?;
    }
    Ok(())
}

pub fn write_dimacs(formula: &Formula) -> String {
    let mut out = Vec::new();
    write_dimacs_to(formula, &[], &mut out).expect("writing to memory");
    String::from_utf8(out).expect("ascii output")
}

/// DIMACS solution lines: `v 1 -2 3 ... 0`, wrapped every 10 literals.
pub fn format_assignment(assignment: &Assignment) -> String {
    let mut out = String::new();
    for chunk in assignment.to_literals().chunks(10) {
        out.push('v');
        for lit in chunk {
            let _ = write!(out, " {lit}");
        }
        out.push('\n');
    }
    out.push_str("v 0\n");
    out
}

/// Read an assignment for `n` variables from `v` lines (or bare integers).
/// Lines starting with `c` or `s` are skipped. Every variable needs a value.
pub fn parse_assignment(text: &str, n: usize) -> Result<Assignment, AssignmentParseError> {
    let mut values: Vec<Option<bool>> = vec![None; n];
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('s') {
            continue;
        }
        let body = line.strip_prefix('v').unwrap_or(line);
        for token in body.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| AssignmentParseError::BadToken {
                line: idx + 1,
                token: token.to_string(),
            })?;
            if value == 0 {
                continue;
            }
            let var = value.unsigned_abs() as usize;
            if var > n {
                return Err(AssignmentParseError::OutOfRange(value, n));
            }
            let slot = &mut values[var - 1];
            if slot.is_some() {
                return Err(AssignmentParseError::Duplicate(var as u32));
            }
            *slot = Some(value > 0);
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or(AssignmentParseError::Missing(i as u32 + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Assignment::from_values(values))
}
