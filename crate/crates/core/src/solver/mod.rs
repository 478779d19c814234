//! Exact solving with optimality certificates and deterministic tie-breaking.
//!
//! Branch-and-bound prunes with a floating-point relaxation but accepts only
//! assignments that pass an exact integer check.

mod bnb;
mod brute;
mod lex;
mod lp;
mod phases;
mod propagate;

pub use bnb::{solve, solve_with, Budget, SolveOutcome, SolveStatus};
pub use brute::{brute_force_solve, brute_force_with, BRUTE_FORCE_LIMIT};
pub use lex::lexicographic_fix;
pub use phases::{
    multi_phase_solve, solve_specification, Phase, PhaseAccounting, PhaseBudgets, PhaseCounts, PhaseRecord, PhaseRun, PhaseVerdict,
    SolvedSpecification,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::{build_program, fixtures, Assignment, LinearObjective, ObjectiveType};

    #[test]
    fn single_order_optimum() {
        let prog = build_program(&fixtures::single_order()).unwrap();
        let out = solve(&prog, None, 5_000).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.objective_value, Some(4200));
        assert_eq!(out.assignment, Some(Assignment(vec![6, 1, 4])));
        let oracle = brute_force_solve(&prog).unwrap();
        assert_eq!(oracle.objective_value, Some(4200));
        assert_eq!(oracle.assignment, Some(Assignment(vec![6, 1, 4])));
    }

    #[test]
    fn demand_beyond_supply_is_infeasible() {
        let mut p = fixtures::single_order();
        p.demands[0].quantity = 30;
        p.demands[0].budget_cents = 30_000;
        let prog = build_program(&p).unwrap();
        assert_eq!(solve(&prog, None, 5_000).unwrap().status, SolveStatus::Infeasible);
        assert_eq!(brute_force_solve(&prog).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn zero_budget_is_rejected() {
        let prog = build_program(&fixtures::single_order()).unwrap();
        assert!(matches!(solve(&prog, None, 0), Err(Error::BudgetMustBePositive)));
    }

    #[test]
    fn zero_demand_gives_zero_plan() {
        let mut p = fixtures::single_order();
        p.initial_stock.insert("PRD-01".into(), 10);
        p.objective_type = ObjectiveType::ConstraintOnly;
        let prog = build_program(&p).unwrap();
        let out = brute_force_with(&prog, &LinearObjective::zero(), &[]).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.objective_value, Some(0));
    }

    #[test]
    fn symmetric_vendors_tie_break_is_lexicographic_minimum() {
        let prog = build_program(&fixtures::symmetric_vendors()).unwrap();
        let run = multi_phase_solve(&prog, &PhaseBudgets::default()).unwrap();
        let PhaseVerdict::Solved { assignment, primary_optimum, .. } = run.verdict else { panic!() };
        assert_eq!(primary_optimum, 7_000);
        // minimizing q[OFR-01] first drives the whole quantity onto the later offer
        let named = assignment.to_named(&prog);
        assert_eq!(named["q[OFR-01]"], 0);
        assert_eq!(named["q[OFR-02]"], 10);
        let pin = prog.objective.primary().pin("pin", primary_optimum);
        let oracle = brute_force_with(&prog, &LinearObjective::zero(), &[pin]).unwrap();
        assert_eq!(oracle.assignment, Some(assignment));
    }

    #[test]
    fn lexicographic_budget_exhaustion_is_unknown() {
        let prog = build_program(&fixtures::make_or_buy()).unwrap();
        let e = solve(&prog, None, 5_000).unwrap().objective_value.unwrap();
        let out = lexicographic_fix(&prog, e, None, Budget::millis(5_000).with_nodes(1)).unwrap();
        assert_eq!(out.status, SolveStatus::Unknown);
        assert!(out.assignment.is_none());
    }

    #[test]
    fn constraint_only_runs_feasibility_then_lexicographic() {
        let mut p = fixtures::single_order();
        p.objective_type = ObjectiveType::ConstraintOnly;
        let prog = build_program(&p).unwrap();
        let run = multi_phase_solve(&prog, &PhaseBudgets::default()).unwrap();
        let phases: Vec<_> = run.phase_log.iter().map(|r| (r.phase, r.outcome.status)).collect();
        assert_eq!(
            phases,
            vec![(Phase::Feasibility, SolveStatus::Optimal), (Phase::Lexicographic, SolveStatus::Optimal)]
        );
    }

    #[test]
    fn consolidation_runs_secondary() {
        let mut p = fixtures::symmetric_vendors();
        p.objective_type = ObjectiveType::VendorConsolidation;
        let prog = build_program(&p).unwrap();
        let run = multi_phase_solve(&prog, &PhaseBudgets::default()).unwrap();
        let phases: Vec<_> = run.phase_log.iter().map(|r| r.phase).collect();
        assert_eq!(phases, vec![Phase::Primary, Phase::SpendSecondary, Phase::Lexicographic]);
        let PhaseVerdict::Solved { primary_optimum, secondary_optimum, .. } = run.verdict else { panic!() };
        assert_eq!((primary_optimum, secondary_optimum), (1, Some(7_000)));
    }

    #[test]
    fn infeasible_primary_is_retried_then_fails() {
        let mut p = fixtures::single_order();
        p.demands[0].quantity = 30;
        let prog = build_program(&p).unwrap();
        let run = multi_phase_solve(&prog, &PhaseBudgets::default()).unwrap();
        let phases: Vec<_> = run.phase_log.iter().map(|r| r.phase).collect();
        assert_eq!(phases, vec![Phase::Primary, Phase::PrimaryRetry]);
        assert!(matches!(run.into_solved(&p, &prog), Err(Error::SampleInfeasible(_))));
    }

    #[test]
    fn accounting_tsv_shape() {
        let prog = build_program(&fixtures::single_order()).unwrap();
        let run = multi_phase_solve(&prog, &PhaseBudgets::default()).unwrap();
        let mut acc = PhaseAccounting::default();
        acc.record(&run.phase_log);
        let tsv = acc.to_tsv();
        assert!(tsv.starts_with("phase\tcalls\toptimal\tinfeasible\tunknown\n"));
        assert!(tsv.contains("Primary objective\t1\t1\t0\t0\n"));
        assert!(tsv.ends_with("Total\t2\t2\t0\t0\n"));
    }
}
