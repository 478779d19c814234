//! Dimension scores, optimality decay, gates and the aggregate reward.

use serde::{Deserialize, Serialize};

use super::config::{Decay, Dimension, GateSpec, VerifierConfig};
use super::rules::{RuleResult, Verdict, View};
use crate::erp::{OrderState, TerminalState};
use crate::model::ObjectiveType;
use crate::scalar::{percent, Scalar};

/// `(c, t)`: percent of applicable checks passed per dimension; NA never counts.
pub fn dimension_scores<T: Scalar>(results: &[RuleResult]) -> (T, T) {
    let score = |dim: Dimension| {
        let applicable: Vec<_> = results.iter().filter(|r| r.dimension == dim && r.verdict != Verdict::Na).collect();
        let passed = applicable.iter().filter(|r| r.verdict == Verdict::Pass).count();
        percent::<T>(passed, applicable.len())
    };
    (score(Dimension::Constraint), score(Dimension::Traceability))
}

/// 100 within tolerance of `e`, exponential decay beyond it.
pub fn decay_score<T: Scalar>(a: i64, e: i64, decay: &Decay) -> T {
    let over = a as i128 - e as i128;
    if over as f64 <= decay.tolerance(e) {
        return T::hundred();
    }
    let x = T::from_f64(decay.k) * T::from_i64(over as i64) / T::from_i64(e.max(1));
    T::hundred() * (-x).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalityScore<T> {
    pub o: T,
    pub p: T,
    pub s: Option<T>,
    pub realized_primary: i64,
    pub realized_secondary: Option<i64>,
}

/// Combines the sub-scores; the secondary only lifts a fully met primary.
pub fn combine<T: Scalar>(p: T, s: Option<T>, band_weight: f64) -> T {
    let w = T::from_f64(band_weight);
    match s {
        Some(s) if p >= T::hundred() => p - w * (p - s),
        Some(_) => (T::one() - w) * p,
        None => p,
    }
}

pub fn optimality_score<T: Scalar>(config: &VerifierConfig, terminal: &TerminalState) -> OptimalityScore<T> {
    let view = View::new(config, terminal);
    let (a, secondary) = view.realized();
    score_realized(config, a, secondary)
}

pub(crate) fn score_realized<T: Scalar>(config: &VerifierConfig, a: i64, secondary: Option<i64>) -> OptimalityScore<T> {
    let terms = &config.objective;
    if terms.objective_type == ObjectiveType::ConstraintOnly {
        return OptimalityScore { o: T::hundred(), p: T::hundred(), s: None, realized_primary: a, realized_secondary: None };
    }
    let p = terms.primary_decay.as_ref().map_or(T::hundred(), |d| decay_score(a, terms.certified_optimum, d));
    let s = match (secondary, terms.secondary_optimum, terms.secondary_decay.as_ref()) {
        (Some(x), Some(opt), Some(d)) => Some(decay_score(x, opt, d)),
        _ => None,
    };
    OptimalityScore { o: combine(p, s, terms.band_weight), p, s, realized_primary: a, realized_secondary: secondary }
}

/// Names of the hard-zero gates that fire.
pub fn hard_zero_gates(config: &VerifierConfig, terminal: &TerminalState) -> Vec<String> {
    let t = terminal.tables();
    config
        .gates
        .iter()
        .filter(|g| match g {
            GateSpec::PartialAcceptance { seed_records_digest } => {
                &terminal.task_records_digest() == seed_records_digest
            }
            GateSpec::RepairState => config.repair.as_ref().is_some_and(|rp| {
                let po_intact = rp.baseline_purchase_ids.iter().all(|id| {
                    t.purchase_orders.iter().any(|p| p.id == *id && p.state == OrderState::Confirmed)
                });
                let mo_intact = rp.baseline_build_ids.iter().all(|id| {
                    t.manufacturing_orders.iter().any(|m| m.id == *id && m.state == OrderState::Confirmed)
                });
                po_intact && mo_intact
            }),
        })
        .map(|g| g.name().to_string())
        .collect()
}

/// Gate, then constraint clip, then the weighted sum.
pub fn aggregate_reward<T: Scalar>(c: T, o: T, t: T, gate_fired: bool) -> T {
    if gate_fired {
        return T::zero();
    }
    if c < T::hundred() {
        return c / T::from_i64(4);
    }
    (T::from_i64(25) * c + T::from_i64(60) * o + T::from_i64(15) * t) / T::hundred()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown<T> {
    pub c: T,
    pub t: T,
    pub o: T,
    pub p: T,
    pub s: Option<T>,
    pub gates_fired: Vec<String>,
    #[serde(rename = "R")]
    pub r: T,
    pub realized_primary: i64,
    pub certified_optimum: i64,
    pub realized_secondary: Option<i64>,
    pub secondary_optimum: Option<i64>,
    pub canary_triggered: bool,
}

/// True when every applicable constraint check passes yet the plan beats the certified optimum.
///
/// Objectives are integral, so "strictly better" needs no tolerance.
pub fn canary_check<T>(config: &VerifierConfig, results: &[RuleResult], breakdown: &RewardBreakdown<T>) -> bool {
    if config.objective.objective_type == ObjectiveType::ConstraintOnly {
        return false;
    }
    let clean = results.iter().filter(|r| r.dimension == Dimension::Constraint).all(|r| r.verdict != Verdict::Fail);
    clean && breakdown.realized_primary < breakdown.certified_optimum
}
