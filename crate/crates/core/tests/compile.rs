use std::collections::BTreeSet;
use std::fs;
use std::sync::OnceLock;

use rayon::prelude::*;
use regex::Regex;

use taskforge::compile::{clause_tags, compile_bundle, money, write_task_dir, TaskBundle};
use taskforge::erp::{replay, Action, ErpState};
use taskforge::model::{fixtures, AdjacentCounts, ObjectiveType, PatternId, Tier};
use taskforge::sampler::generate_task;
use taskforge::solver::{solve_specification, PhaseBudgets};
use taskforge::verify::{grade, Decay, GateSpec, RuleId, RuleKind};
use taskforge::Error;

fn corpus() -> &'static [TaskBundle] {
    static CORPUS: OnceLock<Vec<TaskBundle>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let grid: Vec<_> = PatternId::ALL.into_iter().flat_map(|p| Tier::ALL.map(|t| (p, t))).collect();
        grid.par_iter().map(|&(p, t)| generate_task(p, t, 21).unwrap()).collect()
    })
}

fn bundle_of(params: taskforge::model::ParameterSetting) -> TaskBundle {
    let spec = solve_specification(&params, &PhaseBudgets::default()).unwrap();
    compile_bundle(&spec, "fixture").unwrap()
}

fn entity_ids(text: &str) -> BTreeSet<String> {
    let re = Regex::new(r"\b(?:ORD|CUS|PRD|VEN|OFR|BOM|WC)-\d{2}\b").unwrap();
    re.find_iter(text).map(|m| m.as_str().to_string()).collect()
}

fn seeded_ids(b: &TaskBundle) -> BTreeSet<String> {
    let s = &b.seed_spec;
    let mut ids = BTreeSet::new();
    ids.extend(s.products.iter().map(|p| p.product_id.clone()));
    ids.extend(s.customers.iter().map(|c| c.partner_id.clone()));
    ids.extend(s.vendors.iter().map(|v| v.partner_id.clone()));
    ids.extend(s.vendor_offers.iter().map(|o| o.offer_id.clone()));
    ids.extend(s.boms.iter().map(|x| x.bom_id.clone()));
    ids.extend(s.workcenters.iter().map(|w| w.workcenter_id.clone()));
    ids.extend(s.sales_orders.iter().map(|o| o.client_order_ref.clone()));
    ids
}

#[test]
fn single_source_property_holds_on_every_bundle() {
    for b in corpus() {
        let seeded = seeded_ids(b);
        let orders: BTreeSet<String> = b.verifier_config.orders.iter().map(|o| o.order_id.clone()).collect();
        // (a) instruction entities exist in the seed; orders to be entered exist in the ground truth
        for id in entity_ids(&b.instruction) {
            assert!(seeded.contains(&id) || (id.starts_with("ORD-") && orders.contains(&id)), "{}: {id}", b.task_name);
        }
        // (b) the oracle replays on the seed
        let state = ErpState::apply_seed(&b.seed_spec).unwrap();
        let terminal = replay(&state, &b.oracle_plan.actions).unwrap();
        // (c) rule arguments name only seeded entities or ground-truth orders
        for r in &b.verifier_config.rules {
            let id: RuleId = r.rule_id.parse().unwrap();
            assert_eq!(id.kind.dimension(), r.dimension);
            if id.subject != "task" {
                assert!(seeded.contains(&id.subject) || orders.contains(&id.subject), "{}: {}", b.task_name, r.rule_id);
            }
        }
        for o in &b.verifier_config.offers {
            assert!(seeded.contains(&o.offer_id));
        }
        // (d) the certified optimum is what the oracle realizes
        let g = grade::<f64>(&b.verifier_config, &terminal).unwrap();
        assert_eq!(g.breakdown.realized_primary, b.metadata.primary_optimum, "{}", b.task_name);
        assert_eq!(b.metadata.primary_optimum, b.oracle_plan.primary_optimum);
        assert_eq!(b.metadata.primary_optimum, b.verifier_config.objective.certified_optimum);
        assert_eq!(g.breakdown.realized_secondary.filter(|_| b.metadata.secondary_optimum.is_some()), b.metadata.secondary_optimum);
    }
}

#[test]
fn every_rendered_clause_has_a_rule() {
    for b in corpus() {
        let kinds: BTreeSet<&str> = b
            .verifier_config
            .rules
            .iter()
            .map(|r| r.rule_id.split(':').next().unwrap())
            .collect();
        let tags = clause_tags(&b.instruction);
        assert!(!tags.is_empty());
        for tag in tags {
            assert!(kinds.contains(tag.as_str()), "{}: clause {tag} has no rule", b.task_name);
        }
    }
}

#[test]
fn example_one_oracle_buys_six_at_tier_price() {
    let b = bundle_of(fixtures::single_order());
    let pos: Vec<_> = b
        .oracle_plan
        .actions
        .iter()
        .filter_map(|a| match a {
            Action::CreatePurchaseOrder { lines, origin, .. } => Some((lines, origin)),
            _ => None,
        })
        .collect();
    assert_eq!(pos.len(), 1);
    let (lines, origin) = pos[0];
    assert_eq!(lines.len(), 1);
    assert_eq!((lines[0].qty, lines[0].unit_price_cents), (6, 700));
    assert_eq!(origin.len(), 1);
    assert_eq!(b.metadata.primary_optimum, 4_200);
}

#[test]
fn constraint_only_plan_confirms_every_order() {
    let mut p = fixtures::single_order();
    p.objective_type = ObjectiveType::ConstraintOnly;
    let b = bundle_of(p);
    let state = ErpState::apply_seed(&b.seed_spec).unwrap();
    let t = replay(&state, &b.oracle_plan.actions).unwrap();
    let g = grade::<f64>(&b.verifier_config, &t).unwrap();
    let rule = g.results.iter().find(|r| r.rule_id.kind == RuleKind::TaskStateTransitionsCompleted).unwrap();
    assert_eq!(rule.verdict.to_string(), "PASS");
    assert_eq!(g.breakdown.r, 100.0);
}

#[test]
fn seed_carries_sampled_stock_and_no_adjacent_rows_when_none_requested() {
    let mut p = fixtures::single_order();
    p.adjacent_record_counts = AdjacentCounts::default();
    let b = bundle_of(p);
    assert_eq!(b.seed_spec.stock_levels["PRD-01"], 4);
    assert!(b.seed_spec.adjacent_records.is_empty());
    assert!(b.instruction.contains("| PRD-01 | Transfer Switch | 4 |"));
}

#[test]
fn pattern_specific_artifacts() {
    for b in corpus() {
        let kinds: BTreeSet<RuleKind> =
            b.verifier_config.rules.iter().map(|r| r.rule_id.parse::<RuleId>().unwrap().kind).collect();
        let cfg = &b.verifier_config;
        match b.metadata.pattern {
            PatternId::Replenishment | PatternId::ScreenedIntake | PatternId::SupplierRescue
                if b.seed_spec.boms.is_empty() =>
            {
                for k in [RuleKind::MoScheduleCompliance, RuleKind::AssemblyCapacityCompliance, RuleKind::MrpOriginTraceability] {
                    assert!(!kinds.contains(&k), "{}: {k}", b.task_name);
                }
            }
            _ => {}
        }
        if b.metadata.pattern == PatternId::ScreenedIntake {
            assert!(cfg.gates.iter().any(|g| matches!(g, GateSpec::PartialAcceptance { .. })));
            assert!(b.instruction.contains("Intake rules"));
            assert!(cfg.orders.len() >= 2);
        }
        if b.metadata.objective_type == ObjectiveType::RepairPlan {
            assert!(cfg.gates.contains(&GateSpec::RepairState));
            assert!(!b.seed_spec.purchase_orders.is_empty(), "{}: seeded broken plan missing", b.task_name);
        }
        let goal = b.instruction.split("## Objective").nth(1).unwrap();
        match b.metadata.objective_type {
            ObjectiveType::MinNewSpend => assert!(goal.contains("minimize new spend")),
            ObjectiveType::VendorConsolidation => {
                assert!(goal.contains("distinct vendors"));
                let d = cfg.objective.primary_decay.unwrap();
                assert_eq!((d.tau, d.k), (0.0, 2.0));
                assert_eq!(cfg.objective.secondary_decay, Some(Decay::SPEND));
            }
            _ => {}
        }
    }
}

#[test]
fn task_directory_layout_and_byte_stability() {
    let b = &corpus()[0];
    let root = tempfile::tempdir().unwrap();
    let dir = write_task_dir(b, root.path()).unwrap();
    for f in [
        "task.toml",
        "instruction.md",
        "environment/scenario_data.json",
        "solution/solve.sh",
        "solution/optimal_plan.json",
        "tests/test.sh",
        "tests/verifier_config.json",
    ] {
        assert!(dir.join(f).is_file(), "{f}");
    }
    let first: Vec<_> = ["task.toml", "tests/verifier_config.json", "environment/scenario_data.json"]
        .iter()
        .map(|f| fs::read(dir.join(f)).unwrap())
        .collect();
    write_task_dir(b, root.path()).unwrap();
    let second: Vec<_> = ["task.toml", "tests/verifier_config.json", "environment/scenario_data.json"]
        .iter()
        .map(|f| fs::read(dir.join(f)).unwrap())
        .collect();
    assert_eq!(first, second);
    let toml = fs::read_to_string(dir.join("task.toml")).unwrap();
    assert!(toml.contains("bash tests/test.sh"));
    assert!(!fs::read_to_string(dir.join("environment/scenario_data.json")).unwrap().contains('\r'));
}

#[test]
fn unwritable_root_is_an_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("occupied");
    fs::write(&file, "x").unwrap();
    let err = write_task_dir(&corpus()[0], &file).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err}");
}

#[test]
fn rendering_is_deterministic() {
    let spec = solve_specification(&fixtures::make_or_buy(), &PhaseBudgets::default()).unwrap();
    let a = compile_bundle(&spec, "x").unwrap();
    let b = compile_bundle(&spec, "x").unwrap();
    assert_eq!(a.instruction, b.instruction);
    assert_eq!(money(123_456_789), "1,234,567.89");
    assert_eq!(money(-5), "-0.05");
}
