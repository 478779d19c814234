//! Terminal-state grading.
//!
//! [`grade`] is the single entry used by every caller; it runs the rule
//! catalog, the optimality decay with re-pricing, the hard-zero gates, the
//! aggregate reward and the canary.

mod config;
mod rules;
mod score;

pub use config::{
    BaselineBuildTerm, Decay, Dimension, GateSpec, ObjectiveTerms, OrderTerm, RepairTerms, RuleId, RuleKind, RuleSpec,
    VerifierConfig, TASK_SUBJECT,
};
pub use rules::{run_rules, RuleResult, Verdict};
pub use score::{
    aggregate_reward, canary_check, combine, decay_score, dimension_scores, hard_zero_gates, optimality_score,
    OptimalityScore, RewardBreakdown,
};

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::erp::{canonical_json, TerminalState};
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grade<T> {
    pub results: Vec<RuleResult>,
    pub breakdown: RewardBreakdown<T>,
}

static GRADE_CALLS: AtomicU64 = AtomicU64::new(0);

/// Number of [`grade`] calls made by this process.
pub fn grade_calls() -> u64 {
    GRADE_CALLS.load(Ordering::Relaxed)
}

pub fn grade<T: Scalar>(config: &VerifierConfig, terminal: &TerminalState) -> Result<Grade<T>> {
    GRADE_CALLS.fetch_add(1, Ordering::Relaxed);
    let results = run_rules(config, terminal)?;
    let (c, t) = dimension_scores::<T>(&results);
    let opt = optimality_score::<T>(config, terminal);
    let gates_fired = hard_zero_gates(config, terminal);
    let r = aggregate_reward(c, opt.o, t, !gates_fired.is_empty());
    let mut breakdown = RewardBreakdown {
        c,
        t,
        o: opt.o,
        p: opt.p,
        s: opt.s,
        gates_fired,
        r,
        realized_primary: opt.realized_primary,
        certified_optimum: config.objective.certified_optimum,
        realized_secondary: opt.realized_secondary,
        secondary_optimum: config.objective.secondary_optimum,
        canary_triggered: false,
    };
    breakdown.canary_triggered = canary_check(config, &results, &breakdown);
    Ok(Grade { results, breakdown })
}

/// `rule_id, dimension, verdict, detail` rows with a header.
pub fn rules_tsv(results: &[RuleResult]) -> String {
    let mut out = String::from("rule_id\tdimension\tverdict\tdetail\n");
    for r in results {
        let detail = r.detail.replace(['\t', '\n'], " ");
        out.push_str(&format!("{}\t{}\t{}\t{}\n", r.rule_id, r.dimension.as_str(), r.verdict, detail));
    }
    out
}

pub fn reward_json<T: Scalar + Serialize>(breakdown: &RewardBreakdown<T>) -> String {
    canonical_json(breakdown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::compile_bundle;
    use crate::erp::{replay, ErpState, TerminalState};
    use crate::model::{fixtures, ObjectiveType, ParameterSetting};
    use crate::solver::{solve_specification, PhaseBudgets};

    fn bundle(p: &ParameterSetting) -> crate::compile::TaskBundle {
        let spec = solve_specification(p, &PhaseBudgets::default()).unwrap();
        compile_bundle(&spec, "t").unwrap()
    }

    fn terminals(b: &crate::compile::TaskBundle) -> (TerminalState, TerminalState) {
        let s = ErpState::apply_seed(&b.seed_spec).unwrap();
        (s.snapshot(), replay(&s, &b.oracle_plan.actions).unwrap())
    }

    #[test]
    fn single_order_oracle_and_noop() {
        let b = bundle(&fixtures::single_order());
        let (noop, oracle) = terminals(&b);
        let g = grade::<f64>(&b.verifier_config, &oracle).unwrap();
        assert!(g.results.iter().all(|r| r.verdict != Verdict::Fail), "{}", rules_tsv(&g.results));
        assert_eq!(g.breakdown.r, 100.0);
        assert_eq!((g.breakdown.realized_primary, g.breakdown.certified_optimum), (4_200, 4_200));
        assert!(!g.breakdown.canary_triggered);
        let po = &oracle.tables().purchase_orders;
        assert_eq!(po.len(), 1);
        assert_eq!((po[0].lines[0].qty, po[0].lines[0].unit_price_cents, po[0].origin.clone()), (6, 700, vec![1]));

        let g = grade::<f64>(&b.verifier_config, &noop).unwrap();
        assert_eq!((g.breakdown.c, g.breakdown.r), (0.0, 0.0));
        assert!(g.breakdown.gates_fired.is_empty());
    }

    #[test]
    fn buy_only_task_marks_manufacturing_rules_na() {
        let mut b = bundle(&fixtures::single_order());
        b.verifier_config.rules.push(RuleSpec { rule_id: "assembly_capacity_compliance:WC-01".into(), dimension: Dimension::Constraint });
        let (_, oracle) = terminals(&b);
        // workcenter absent from the config: the rule id does not resolve
        assert!(matches!(run_rules(&b.verifier_config, &oracle), Err(crate::Error::UnknownRuleId(_))));
        let b = bundle(&fixtures::make_or_buy());
        let (noop, _) = terminals(&b);
        let rs = run_rules(&b.verifier_config, &noop).unwrap();
        let mo: Vec<_> = rs.iter().filter(|r| r.rule_id.kind == RuleKind::MoScheduleCompliance).collect();
        assert!(!mo.is_empty() && mo.iter().all(|r| r.verdict == Verdict::Na));
    }

    #[test]
    fn repricing_defense() {
        let b = bundle(&fixtures::single_order());
        let (_, oracle) = terminals(&b);
        let before = grade::<f64>(&b.verifier_config, &oracle).unwrap().breakdown;
        let mut t = oracle.clone();
        t.0.purchase_orders[0].lines[0].unit_price_cents = 600;
        let g = grade::<f64>(&b.verifier_config, &t).unwrap();
        assert_eq!(g.breakdown.realized_primary, before.realized_primary);
        assert_eq!(g.breakdown.o, before.o);
        let tier = g.results.iter().find(|r| r.rule_id.kind == RuleKind::PoPriceTierCompliance).unwrap();
        assert_eq!(tier.verdict, Verdict::Fail);
        assert!(g.breakdown.c < 100.0);
        assert_eq!(g.breakdown.r, g.breakdown.c / 4.0);
    }

    #[test]
    fn small_price_slip_is_tolerated() {
        let b = bundle(&fixtures::single_order());
        let (_, mut t) = terminals(&b);
        t.0.purchase_orders[0].lines[0].unit_price_cents = 697;
        assert_eq!(grade::<f64>(&b.verifier_config, &t).unwrap().breakdown.r, 100.0);
        t.0.purchase_orders[0].lines[0].unit_price_cents = 696;
        assert!(grade::<f64>(&b.verifier_config, &t).unwrap().breakdown.r < 100.0);
    }

    #[test]
    fn make_or_buy_and_consolidation_oracles_score_full() {
        let mut cons = fixtures::symmetric_vendors();
        cons.objective_type = ObjectiveType::VendorConsolidation;
        let mut cap = fixtures::make_or_buy();
        cap.objective_type = ObjectiveType::CapacityPreservation;
        for p in [fixtures::make_or_buy(), cons, cap] {
            let b = bundle(&p);
            let (noop, oracle) = terminals(&b);
            let g = grade::<f64>(&b.verifier_config, &oracle).unwrap();
            assert_eq!(g.breakdown.r, 100.0, "{}", rules_tsv(&g.results));
            assert_eq!(g.breakdown.realized_primary, g.breakdown.certified_optimum);
            assert_eq!(g.breakdown.realized_secondary, g.breakdown.secondary_optimum);
            assert_eq!(grade::<f64>(&b.verifier_config, &noop).unwrap().breakdown.r, 0.0);
        }
    }

    #[test]
    fn decay_examples() {
        let spend = Decay::SPEND;
        assert_eq!(decay_score::<f64>(100_020, 100_000, &spend), 100.0);
        assert_eq!(decay_score::<f64>(100_250, 100_000, &spend), 100.0);
        assert!(decay_score::<f64>(100_251, 100_000, &spend) < 100.0);
        let p = decay_score::<f64>(110_000, 100_000, &spend);
        assert!((p - 60.653_065_971_263_34).abs() < 1e-9);
        let cons = Decay::for_objective(ObjectiveType::VendorConsolidation).unwrap();
        let p = decay_score::<f64>(3, 2, &cons);
        assert!((p - 36.787_944_117_144_23).abs() < 1e-9);
        let o = combine(p, Some(100.0), 0.1);
        assert!((o - 33.109_149_705_429_81).abs() < 1e-9);
        assert_eq!(combine(100.0_f64, Some(100.0), 0.1), 100.0);
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(aggregate_reward(100.0_f64, 100.0, 100.0, true), 0.0);
        assert_eq!(aggregate_reward(80.0_f64, 100.0, 100.0, false), 20.0);
        let r = aggregate_reward(100.0_f64, 60.653_065_971_263_34, 100.0, false);
        assert!((r - 76.391_839_582_758).abs() < 1e-9);
        assert_eq!(aggregate_reward(100.0_f32, 100.0, 100.0, false), 100.0);
    }

    #[test]
    fn vacuous_dimensions_score_full() {
        let (c, t) = dimension_scores::<f64>(&[]);
        assert_eq!((c, t), (100.0, 100.0));
    }

    #[test]
    fn rule_ids_parse_strictly() {
        let id: RuleId = "demand_coverage:ORD-01".parse().unwrap();
        assert_eq!(id.kind, RuleKind::DemandCoverage);
        assert_eq!(id.to_string(), "demand_coverage:ORD-01");
        for bad in ["demand_coverage", "nope:ORD-01", "demand_coverage:", "linked_posted_invoices_are_tax_free:x"] {
            assert!(matches!(bad.parse::<RuleId>(), Err(crate::Error::UnknownRuleId(_))), "{bad}");
        }
        assert_eq!(RuleKind::ALL.len(), 25);
    }

    #[test]
    fn adjacent_edit_fails_traceability_only() {
        let b = bundle(&fixtures::single_order());
        let (_, mut t) = terminals(&b);
        t.0.adjacent_records.insert(
            "x".into(),
            crate::erp::AdjacentRecord { key: "x".into(), table: "customers".into(), fields: Default::default() },
        );
        let g = grade::<f64>(&b.verifier_config, &t).unwrap();
        assert_eq!(g.breakdown.c, 100.0);
        assert!(g.breakdown.t < 100.0);
        assert!(g.breakdown.r < 100.0 && g.breakdown.r > 25.0);
    }
}
