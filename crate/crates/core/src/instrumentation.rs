//! Per-run process quantities of Fix and the asymptotic reference bounds
//! they are compared against.

use serde::{Deserialize, Serialize};

use crate::solver::{Phase1State, Phase2State, Phase3Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Anomaly {
    DegenerateClause { clause: usize },
}

/// Summary of one Fix run.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PhaseStats {
    /// `|Z|` after Phase 1.
    pub z_size: usize,
    /// `Z`-unique clauses at the end of Phase 1.
    pub z_unique_count: usize,
    /// Clauses falsified by `σ_Z`.
    pub unsat_after_phase1: usize,
    /// `|Z′|` after Phase 2.
    pub z_prime_size: usize,
    /// `(Z,Z′)`-endangered clauses when Phase 2 stopped.
    pub endangered_count: usize,
    pub phase2_iterations: usize,
    pub matching_covered: bool,
    /// Phase-1 selections that fell back to position `k1`.
    pub fallback_1e_count: usize,
    pub anomalies: Vec<Anomaly>,
}

/// One Phase-1 selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// `t`, equal to `|Z|` after the step.
    pub step: usize,
    pub clause: usize,
    pub variable: u32,
    pub fallback: bool,
    pub z_unique_count: usize,
}

pub fn collect_stats(
    phase1: &Phase1State,
    phase2: &Phase2State,
    phase3: Option<&Phase3Result>,
) -> PhaseStats {
    let mut anomalies = Vec::new();
    if phase3.is_none() {
        if let Some(&clause) = phase2.queue().first() {
            anomalies.push(Anomaly::DegenerateClause {
                clause: clause as usize,
            });
        }
    }
    PhaseStats {
        z_size: phase1.z().len(),
        z_unique_count: phase1.z_unique_count(),
        unsat_after_phase1: phase2.initial_queue_len(),
        z_prime_size: phase2.z_prime().len(),
        endangered_count: match phase3 {
            Some(p) => p.endangered_count(),
            None => phase2.endangered_clauses().len(),
        },
        phase2_iterations: phase2.iterations(),
        matching_covered: phase3.is_some_and(Phase3Result::covered),
        fallback_1e_count: phase1.fallback_count(),
        anomalies,
    }
}

/// Reference bounds for an instance with `n` variables, width `k` and `m` clauses.
///
/// `ε` is recovered from the density through `m/n = (1−ε)·2^k·ln(k)/k`, so
/// `ω = (1−ε)·ln k = (m/n)·k/2^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceBounds {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub epsilon: f64,
    pub omega: f64,
    /// `4n·ln(ω)/k`; `None` when `ω <= 1`.
    pub z_bound: Option<f64>,
    /// `(1+ε/3)·ω·n`.
    pub z_unique_bound: f64,
    /// `exp(−k^{ε/8})·n`.
    pub unsat_bound: f64,
    /// `n·k^{−12}`.
    pub z_prime_bound: f64,
}

impl ReferenceBounds {
    pub fn new(n: usize, k: usize, m: usize) -> Self {
        let nf = n as f64;
        let kf = k as f64;
        let density = m as f64 / nf;
        let ln_k = kf.ln();
        let omega = density * kf / 2f64.powi(k as i32);
        let epsilon = if k >= 2 { 1.0 - omega / ln_k } else { f64::NAN };
        ReferenceBounds {
            n,
            k,
            m,
            epsilon,
            omega,
            z_bound: (omega > 1.0).then(|| 4.0 * nf * omega.ln() / kf),
            z_unique_bound: (1.0 + epsilon / 3.0) * omega * nf,
            unsat_bound: (-kf.powf(epsilon / 8.0)).exp() * nf,
            z_prime_bound: nf * kf.powi(-12),
        }
    }

    /// Density is in the regime where the bounds apply (`0 < ε < 1`).
    pub fn in_regime(&self) -> bool {
        self.epsilon > 0.0 && self.epsilon < 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub observed: f64,
    /// Bound before slack.
    pub bound: Option<f64>,
    /// `observed / bound`.
    pub ratio: Option<f64>,
    pub status: BoundStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub slack: f64,
    pub epsilon: f64,
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    pub fn get(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_pass_or_na(&self) -> bool {
        self.checks.iter().all(|c| c.status != BoundStatus::Fail)
    }
}

/// Compare observed quantities with `slack × bound`. Reports only; the
/// caller decides what a failure means.
pub fn check_bounds(stats: &PhaseStats, bounds: &ReferenceBounds, slack: f64) -> BoundsReport {
    assert!(slack >= 1.0, "slack must be at least 1");
    let regime = bounds.in_regime();
    let entry = |name: &str, observed: usize, bound: Option<f64>| {
        let observed = observed as f64;
        let bound = bound.filter(|_| regime);
        let status = match bound {
            None => BoundStatus::NotApplicable,
            Some(b) if observed <= slack * b => BoundStatus::Pass,
            Some(_) => BoundStatus::Fail,
        };
        BoundCheck {
            name: name.to_string(),
            observed,
            bound,
            ratio: bound.map(|b| {
                if b > 0.0 {
                    observed / b
                } else if observed == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }),
            status,
        }
    };
    BoundsReport {
        slack,
        epsilon: bounds.epsilon,
        checks: vec![
            entry("z_size", stats.z_size, bounds.z_bound),
            entry(
                "z_unique_count",
                stats.z_unique_count,
                Some(bounds.z_unique_bound),
            ),
            entry(
                "unsat_after_phase1",
                stats.unsat_after_phase1,
                Some(bounds.unsat_bound),
            ),
            entry(
                "z_prime_size",
                stats.z_prime_size,
                Some(bounds.z_prime_bound),
            ),
        ],
    }
}
