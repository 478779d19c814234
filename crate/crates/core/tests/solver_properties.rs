use proptest::prelude::*;

use taskforge::model::{
    build_program, fixtures, Comparator, ConstraintProgram, IndicatorLink, LinearConstraint, LinearObjective,
    ObjectiveSpec, ObjectiveType, VarId, VarRole, VariableDecl,
};
use taskforge::solver::{
    brute_force_solve, brute_force_with, lexicographic_fix, multi_phase_solve, solve, solve_with, Budget,
    PhaseBudgets, PhaseVerdict, SolveStatus,
};

#[derive(Debug, Clone)]
struct Spec {
    uppers: Vec<i64>,
    rows: Vec<(Vec<i64>, u8, i64)>,
    link: Option<(usize, usize, i64, i64)>,
    cost: Vec<i64>,
    order: Vec<usize>,
}

fn spec() -> impl Strategy<Value = Spec> {
    (2usize..=5).prop_flat_map(|n| {
        (
            prop::collection::vec(0i64..=6, n),
            prop::collection::vec((prop::collection::vec(-4i64..=5, n), 0u8..3, -6i64..=18), 1..=4),
            prop::option::of((0..n, 0..n, 0i64..=3, 2i64..=6)),
            prop::collection::vec(-3i64..=9, n),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        )
            .prop_map(|(uppers, rows, link, cost, order)| Spec { uppers, rows, link, cost, order })
    })
}

fn program(s: &Spec) -> ConstraintProgram {
    let n = s.uppers.len();
    let variables = (0..n)
        .map(|i| VariableDecl {
            id: VarId(i as u32),
            name: format!("x{i}"),
            role: VarRole::Generic,
            lower: 0,
            upper: s.uppers[i],
        })
        .collect();
    let linear_constraints = s
        .rows
        .iter()
        .enumerate()
        .map(|(k, (coeffs, cmp, rhs))| {
            let terms = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(i, c)| (VarId(i as u32), *c))
                .collect();
            let cmp = [Comparator::Le, Comparator::Ge, Comparator::Eq][*cmp as usize];
            LinearConstraint::new(format!("r{k}"), terms, cmp, *rhs)
        })
        .collect();
    let indicator_links = match s.link {
        Some((i, q, lo, hi)) if i != q => {
            vec![IndicatorLink { indicator: VarId(i as u32), quantity: VarId(q as u32), lower: lo, upper: hi }]
        }
        _ => vec![],
    };
    ConstraintProgram {
        variables,
        linear_constraints,
        indicator_links,
        objective: ObjectiveSpec {
            objective_type: ObjectiveType::MinNewSpend,
            primary_coeffs: s.cost.iter().enumerate().map(|(i, c)| (VarId(i as u32), *c)).collect(),
            secondary_spend_coeffs: None,
            baseline_assignment: None,
        },
        canonical_order: s.order.iter().map(|&i| VarId(i as u32)).collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_agrees_with_enumeration(s in spec()) {
        let prog = program(&s);
        let fast = solve(&prog, None, 10_000).unwrap();
        let slow = brute_force_solve(&prog).unwrap();
        prop_assert_eq!(fast.status, slow.status);
        prop_assert_eq!(fast.objective_value, slow.objective_value);
        if let Some(a) = &fast.assignment {
            prop_assert!(prog.check_assignment(a).unwrap().is_feasible());
            prop_assert_eq!(Some(prog.objective.primary().value(a.values())), fast.objective_value);
        }
    }

    #[test]
    fn lexicographic_fix_is_enumeration_minimum(s in spec()) {
        let prog = program(&s);
        let slow = brute_force_solve(&prog).unwrap();
        prop_assume!(slow.status == SolveStatus::Optimal);
        let e = slow.objective_value.unwrap();
        let fixed = lexicographic_fix(&prog, e, None, Budget::millis(10_000)).unwrap();
        // the first feasible point met in canonical enumeration order is the lexicographic minimum
        let pin = prog.objective.primary().pin("pin", e);
        let first = brute_force_with(&prog, &LinearObjective::zero(), &[pin]).unwrap();
        prop_assert_eq!(fixed.status, SolveStatus::Optimal);
        prop_assert_eq!(fixed.assignment, first.assignment);
        prop_assert_eq!(fixed.objective_value, Some(e));
    }

    #[test]
    fn pinning_the_optimum_keeps_feasibility(s in spec()) {
        let prog = program(&s);
        let out = solve(&prog, None, 10_000).unwrap();
        prop_assume!(out.status == SolveStatus::Optimal);
        let e = out.objective_value.unwrap();
        let pin = prog.objective.primary().pin("pin", e);
        let pinned = solve_with(&prog, &prog.objective.primary(), &[pin], Budget::millis(10_000)).unwrap();
        prop_assert_eq!(pinned.status, SolveStatus::Optimal);
        prop_assert_eq!(pinned.objective_value, Some(e));
    }

    #[test]
    fn multi_phase_is_deterministic(s in spec()) {
        let prog = program(&s);
        let a = multi_phase_solve(&prog, &PhaseBudgets::default()).unwrap();
        let b = multi_phase_solve(&prog, &PhaseBudgets::default()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn model_instances_agree_with_enumeration(
        qty in 1i64..=14,
        stock in 0i64..=6,
        lo1 in 0i64..=5, span1 in 0i64..=8, price1 in 50i64..=900,
        lo2 in 0i64..=5, span2 in 0i64..=8, price2 in 50i64..=900,
        lead2 in 1i64..=20,
    ) {
        let mut p = fixtures::symmetric_vendors();
        p.demands[0].quantity = qty;
        p.initial_stock.insert("PRD-01".into(), stock);
        p.vendor_offers[0].tier_min_qty = lo1;
        p.vendor_offers[0].tier_max_qty = lo1 + span1;
        p.vendor_offers[0].unit_price_cents = price1;
        p.vendor_offers[1].tier_min_qty = lo2;
        p.vendor_offers[1].tier_max_qty = lo2 + span2;
        p.vendor_offers[1].unit_price_cents = price2;
        p.vendor_offers[1].lead_time_days = lead2;
        let prog = build_program(&p).unwrap();
        let fast = solve(&prog, None, 10_000).unwrap();
        let slow = brute_force_solve(&prog).unwrap();
        prop_assert_eq!(fast.status, slow.status);
        prop_assert_eq!(fast.objective_value, slow.objective_value);
        let run = multi_phase_solve(&prog, &PhaseBudgets::default()).unwrap();
        if let PhaseVerdict::Solved { assignment, primary_optimum, .. } = run.verdict {
            prop_assert_eq!(Some(primary_optimum), slow.objective_value);
            prop_assert!(prog.check_assignment(&assignment).unwrap().is_feasible());
            // tier channeling
            for link in &prog.indicator_links {
                let (b, q) = (assignment.get(link.indicator), assignment.get(link.quantity));
                prop_assert!((b == 0 && q == 0) || (b == 1 && link.lower <= q && q <= link.upper));
            }
        }
    }
}

#[test]
fn lexicographic_exhaustion_mid_sequence_keeps_primary() {
    let prog = build_program(&fixtures::make_or_buy()).unwrap();
    let e = solve(&prog, None, 5_000).unwrap().objective_value.unwrap();
    let full = lexicographic_fix(&prog, e, None, Budget::millis(5_000)).unwrap();
    assert_eq!(full.status, SolveStatus::Optimal);
    assert!(full.nodes_explored >= 2);
    let cut = lexicographic_fix(&prog, e, None, Budget::millis(5_000).with_nodes(full.nodes_explored / 2)).unwrap();
    assert_eq!(cut.status, SolveStatus::Unknown);
    assert!(cut.assignment.is_none());
}
