use crate::formula::{ClauseSet, Literal};

/// Per-literal occurrence lists in compressed sparse row layout.
///
/// `clauses(l)` lists the 0-based indices of the clauses containing `l`, in
/// ascending order, once per position (a clause holding `l` twice appears
/// twice). Positions are recovered by scanning the clause itself.
#[derive(Debug, Clone)]
pub struct OccurrenceIndex {
    offsets: Vec<usize>,
    entries: Vec<u32>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("occurrence lists address clauses with u32; {0} clauses is too many")]
pub struct TooManyClauses(pub usize);

/// Cache hint for an upcoming access; `ptr` may point anywhere.
#[inline(always)]
pub(crate) fn prefetch<T>(ptr: *const T) {
    #[cfg(target_arch = "x86_64")]
    // SAFETY: prefetching is a hint and never faults.
    unsafe {
        std::arch::x86_64::_mm_prefetch(ptr as *const i8, std::arch::x86_64::_MM_HINT_T0);
    }
    #[cfg(not(target_arch = "x86_64"))]
    let _ = ptr;
}

// Writes land in 2n scattered streams; prefetching the slot of a literal a
// little ahead hides most of the miss latency.
fn scatter_flat(lits: &[Literal], k: usize, offsets: &[usize], entries: &mut [u32]) {
    const AHEAD: usize = 64;
    let mut cursor: Vec<u32> = offsets[..offsets.len() - 1]
        .iter()
        .map(|&o| o as u32)
        .collect();
    for (j, lit) in lits.iter().enumerate() {
        if let Some(next) = lits.get(j + AHEAD) {
            prefetch(entries.as_ptr().wrapping_add(cursor[next.code()] as usize));
        }
        let slot = &mut cursor[lit.code()];
        entries[*slot as usize] = (j / k) as u32;
        *slot += 1;
    }
}

impl OccurrenceIndex {
    pub fn build<F: ClauseSet>(formula: &F) -> Result<Self, TooManyClauses> {
        let m = formula.num_clauses();
        if m > u32::MAX as usize {
            return Err(TooManyClauses(m));
        }
        let codes = 2 * formula.num_vars();
        let mut offsets = vec![0usize; codes + 1];
        for i in 0..m {
            for lit in formula.clause(i).iter() {
                offsets[lit.code() + 1] += 1;
            }
        }
        for c in 0..codes {
            offsets[c + 1] += offsets[c];
        }
        let mut entries = vec![0u32; offsets[codes]];
        if let (Some(lits), Ok(_)) = (formula.flat_literals(), u32::try_from(offsets[codes])) {
            scatter_flat(lits, formula.width(), &offsets, &mut entries);
            return Ok(OccurrenceIndex { offsets, entries });
        }
        let mut cursor = offsets[..codes].to_vec();
        for i in 0..m {
            for lit in formula.clause(i).iter() {
                let slot = &mut cursor[lit.code()];
                entries[*slot] = i as u32;
                *slot += 1;
            }
        }
        Ok(OccurrenceIndex { offsets, entries })
    }

    #[inline]
    pub fn clauses(&self, lit: Literal) -> &[u32] {
        let c = lit.code();
        &self.entries[self.offsets[c]..self.offsets[c + 1]]
    }

    #[inline]
    pub fn positive(&self, var: u32) -> &[u32] {
        self.clauses(Literal::pos(var))
    }

    #[inline]
    pub fn negative(&self, var: u32) -> &[u32] {
        self.clauses(Literal::neg(var))
    }

    /// Number of literal positions holding `var`, either polarity.
    pub fn degree(&self, var: u32) -> usize {
        self.positive(var).len() + self.negative(var).len()
    }

    /// Clauses containing `var`, grouped: `(clause, positive count, negative count)`
    /// in ascending clause order.
    pub fn grouped(&self, var: u32) -> Vec<(u32, u32, u32)> {
        let (pos, neg) = (self.positive(var), self.negative(var));
        let mut out = Vec::with_capacity(pos.len() + neg.len());
        let (mut a, mut b) = (0, 0);
        while a < pos.len() || b < neg.len() {
            let next = match (pos.get(a), neg.get(b)) {
                (Some(&p), Some(&q)) => p.min(q),
                (Some(&p), None) => p,
                (None, Some(&q)) => q,
                (None, None) => unreachable!(),
            };
            let (mut cp, mut cn) = (0u32, 0u32);
            while pos.get(a) == Some(&next) {
                cp += 1;
                a += 1;
            }
            while neg.get(b) == Some(&next) {
                cn += 1;
                b += 1;
            }
            out.push((next, cp, cn));
        }
        out
    }
}
