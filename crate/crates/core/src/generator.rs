//! Uniform random k-SAT formulas.
//!
//! Every literal of every clause is drawn independently and uniformly from
//! the `2n` literals over `n` variables, so repeated variables inside a
//! clause and repeated clauses are both possible.
//!
//! Randomness is organized as one SplitMix64 stream per clause, keyed by
//! `(seed, clause index)`. Clause `i` can therefore be regenerated in
//! isolation, blocks of clauses can be filled in parallel, and the result
//! never depends on the number of worker threads.

use arrayvec::ArrayVec;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{ClauseSet, Formula, Literal};

/// Widest clause a [`SeededFormula`] can regenerate without allocating.
pub const MAX_LAZY_WIDTH: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("n must be at least 1")]
    NoVariables,
    #[error("k must be at least 1")]
    ZeroWidth,
    #[error("n = {0} exceeds the DIMACS variable range")]
    TooManyVariables(usize),
    #[error("k·m = {k}·{m} literals does not fit in memory addressing")]
    TooLarge { k: usize, m: usize },
    #[error("density must be finite and non-negative, got {0}")]
    BadDensity(f64),
    #[error("lazy generation supports k <= {MAX_LAZY_WIDTH}, got {0}")]
    WidthTooLargeForLazy(usize),
}

/// Parameters of one random formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(n: usize, k: usize, m: usize, seed: u64) -> Result<Self, GeneratorError> {
        let config = GeneratorConfig { n, k, m, seed };
        config.validate()?;
        Ok(config)
    }

    /// `m = floor(density · n)`.
    pub fn with_density(
        n: usize,
        k: usize,
        density: f64,
        seed: u64,
    ) -> Result<Self, GeneratorError> {
        Self::new(n, k, clauses_for_density(n, density)?, seed)
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.n == 0 {
            return Err(GeneratorError::NoVariables);
        }
        if self.k == 0 {
            return Err(GeneratorError::ZeroWidth);
        }
        if self.n > i32::MAX as usize {
            return Err(GeneratorError::TooManyVariables(self.n));
        }
        if self
            .k
            .checked_mul(self.m)
            .is_none_or(|t| t > isize::MAX as usize / 4)
        {
            return Err(GeneratorError::TooLarge {
                k: self.k,
                m: self.m,
            });
        }
        Ok(())
    }

    pub fn density(&self) -> f64 {
        self.m as f64 / self.n as f64
    }
}

pub fn clauses_for_density(n: usize, density: f64) -> Result<usize, GeneratorError> {
    if !density.is_finite() || density < 0.0 {
        return Err(GeneratorError::BadDensity(density));
    }
    // Snap products that are integral up to rounding error (0.29 · 100) before flooring.
    let product = density * n as f64;
    let nearest = product.round();
    let m = if (product - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        product.floor()
    };
    Ok(m as usize)
}

/// SplitMix64 output function; a bijection on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn clause_stream(seed: u64, clause: usize) -> SplitMix64 {
    SplitMix64::seed_from_u64(mix64(
        mix64(seed) ^ mix64(clause as u64 ^ 0x5bd1_e995_0000_0000),
    ))
}

#[inline]
fn fill_clause(seed: u64, n: usize, clause: usize, out: &mut [Literal]) {
    let mut rng = clause_stream(seed, clause);
    let codes = 2 * n as u64;
    for slot in out {
        *slot = Literal::from_code(rng.random_range(0..codes) as usize);
    }
}

/// A random formula that is never stored: clause `i` is regenerated from
/// `(seed, i)` on every access. Clause for clause identical to
/// [`sample_formula`] with the same config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededFormula {
    config: GeneratorConfig,
}

impl SeededFormula {
    pub fn new(config: GeneratorConfig) -> Result<Self, GeneratorError> {
        config.validate()?;
        if config.k > MAX_LAZY_WIDTH {
            return Err(GeneratorError::WidthTooLargeForLazy(config.k));
        }
        Ok(SeededFormula { config })
    }

    pub fn config(&self) -> &GeneratorConfig {
        &self.config
    }

    pub fn materialize(&self) -> Formula {
        // Validated on construction.
        sample_formula(&self.config).unwrap()
    }
}

impl ClauseSet for SeededFormula {
    type Clause<'a> = ArrayVec<Literal, MAX_LAZY_WIDTH>;

    fn num_vars(&self) -> usize {
        self.config.n
    }

    fn width(&self) -> usize {
        self.config.k
    }

    fn num_clauses(&self) -> usize {
        self.config.m
    }

    #[inline]
    fn clause(&self, i: usize) -> Self::Clause<'_> {
        let mut buf = ArrayVec::new();
        for _ in 0..self.config.k {
            buf.push(Literal::pos(1));
        }
        fill_clause(self.config.seed, self.config.n, i, &mut buf);
        buf
    }
}

/// Draw a formula with `m` clauses, each literal uniform over all `2n`.
pub fn sample_formula(config: &GeneratorConfig) -> Result<Formula, GeneratorError> {
    config.validate()?;
    let GeneratorConfig { n, k, m, seed } = *config;
    let mut literals = vec![Literal::pos(1); k * m];
    fill_blocks(&mut literals, k, |i, clause| {
        fill_clause(seed, n, i, clause)
    });
    Ok(Formula::from_flat(n, k, literals).expect("generated literals are in range"))
}

#[cfg(feature = "parallel")]
const BLOCK_CLAUSES: usize = 4096;

#[cfg(feature = "parallel")]
fn fill_blocks<G>(literals: &mut [Literal], k: usize, gen: G)
where
    G: Fn(usize, &mut [Literal]) + Sync,
{
    use rayon::prelude::*;
    literals
        .par_chunks_mut(k * BLOCK_CLAUSES)
        .enumerate()
        .for_each(|(b, block)| {
            for (j, clause) in block.chunks_exact_mut(k).enumerate() {
                gen(b * BLOCK_CLAUSES + j, clause);
            }
        });
}

#[cfg(not(feature = "parallel"))]
fn fill_blocks<G>(literals: &mut [Literal], k: usize, gen: G)
where
    G: Fn(usize, &mut [Literal]) + Sync,
{
    for (i, clause) in literals.chunks_exact_mut(k).enumerate() {
        gen(i, clause);
    }
}
