//! The generation-time solve sequence and its status accounting.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::bnb::{solve_with, Budget, SolveOutcome, SolveStatus};
use super::lex::{lexicographic_fix, objective_pins};
use crate::error::{Error, Result};
use crate::model::{Assignment, ConstraintProgram, LinearObjective, ObjectiveType, ParameterSetting};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Feasibility,
    Primary,
    PrimaryRetry,
    SpendSecondary,
    Lexicographic,
    LexicographicRetry,
}

impl Phase {
    pub const ALL: [Phase; 6] = [
        Phase::Feasibility,
        Phase::Primary,
        Phase::PrimaryRetry,
        Phase::SpendSecondary,
        Phase::Lexicographic,
        Phase::LexicographicRetry,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Phase::Feasibility => "Feasibility",
            Phase::Primary => "Primary objective",
            Phase::PrimaryRetry => "Primary retry",
            Phase::SpendSecondary => "Spend secondary",
            Phase::Lexicographic => "Lexicographic fixed-search",
            Phase::LexicographicRetry => "Fixed-search retry",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub phase: Phase,
    pub outcome: SolveOutcome,
}

/// Per-phase budgets. Node limits are for reproducible budget tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseBudgets {
    pub first_ms: u64,
    pub retry_ms: u64,
    pub max_nodes: Option<u64>,
}

impl Default for PhaseBudgets {
    fn default() -> Self {
        PhaseBudgets { first_ms: 5_000, retry_ms: 15_000, max_nodes: None }
    }
}

impl PhaseBudgets {
    fn first(&self) -> Budget {
        Budget { time_ms: self.first_ms, max_nodes: self.max_nodes }
    }

    fn retry(&self) -> Budget {
        Budget { time_ms: self.retry_ms, max_nodes: self.max_nodes.map(|n| n.saturating_mul(3)) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseVerdict {
    Solved { assignment: Assignment, primary_optimum: i64, secondary_optimum: Option<i64> },
    /// No feasible plan, or the primary could not be certified after the retry.
    Infeasible,
    /// Primary certified but the tie-break ended `UNKNOWN`; the sample is rejected.
    TieBreakUnknown { primary_optimum: i64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRun {
    pub phase_log: Vec<PhaseRecord>,
    pub verdict: PhaseVerdict,
}

/// The certified plan and optimum for one accepted parameter setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvedSpecification {
    pub params: ParameterSetting,
    pub program: ConstraintProgram,
    pub optimal_assignment: Assignment,
    pub primary_optimum: i64,
    pub secondary_optimum: Option<i64>,
    pub phase_log: Vec<PhaseRecord>,
}

impl PhaseRun {
    pub fn into_solved(self, params: &ParameterSetting, program: &ConstraintProgram) -> Result<SolvedSpecification> {
        match self.verdict {
            PhaseVerdict::Solved { assignment, primary_optimum, secondary_optimum } => Ok(SolvedSpecification {
                params: params.clone(),
                program: program.clone(),
                optimal_assignment: assignment,
                primary_optimum,
                secondary_optimum,
                phase_log: self.phase_log,
            }),
            PhaseVerdict::Infeasible => Err(Error::SampleInfeasible("primary phase found no certified plan".into())),
            PhaseVerdict::TieBreakUnknown { .. } => Err(Error::SampleRejected("tie-break phase ended UNKNOWN".into())),
        }
    }
}

fn run_with_retry(
    log: &mut Vec<PhaseRecord>,
    first: Phase,
    retry: Phase,
    retry_on_infeasible: bool,
    budgets: &PhaseBudgets,
    mut call: impl FnMut(Budget) -> Result<SolveOutcome>,
) -> Result<SolveOutcome> {
    let out = call(budgets.first())?;
    log.push(PhaseRecord { phase: first, outcome: out.clone() });
    let again = match out.status {
        SolveStatus::Unknown => true,
        SolveStatus::Infeasible => retry_on_infeasible,
        SolveStatus::Optimal => false,
    };
    if !again {
        return Ok(out);
    }
    let out = call(budgets.retry())?;
    log.push(PhaseRecord { phase: retry, outcome: out.clone() });
    Ok(out)
}

/// Feasibility (constraint-only) or primary, optional spend secondary, then lexicographic fix.
pub fn multi_phase_solve(program: &ConstraintProgram, budgets: &PhaseBudgets) -> Result<PhaseRun> {
    program.well_formed()?;
    let mut log = Vec::new();
    let primary = program.objective.primary();

    let primary_out = if program.objective.objective_type == ObjectiveType::ConstraintOnly {
        let out = solve_with(program, &LinearObjective::zero(), &[], budgets.first())?;
        log.push(PhaseRecord { phase: Phase::Feasibility, outcome: out.clone() });
        out
    } else {
        // INFEASIBLE is retried too, matching the reported accounting shape
        run_with_retry(&mut log, Phase::Primary, Phase::PrimaryRetry, true, budgets, |b| {
            solve_with(program, &primary, &[], b)
        })?
    };
    let e = match (primary_out.status, primary_out.objective_value) {
        (SolveStatus::Optimal, Some(v)) => v,
        _ => return Ok(PhaseRun { phase_log: log, verdict: PhaseVerdict::Infeasible }),
    };

    let mut secondary_optimum = None;
    if let Some(sec) = program.objective.secondary() {
        let pins = objective_pins(program, e, None);
        let out = solve_with(program, &sec, &pins, budgets.first())?;
        log.push(PhaseRecord { phase: Phase::SpendSecondary, outcome: out.clone() });
        match (out.status, out.objective_value) {
            (SolveStatus::Optimal, Some(v)) => secondary_optimum = Some(v),
            _ => {
                return Ok(PhaseRun { phase_log: log, verdict: PhaseVerdict::TieBreakUnknown { primary_optimum: e } })
            }
        }
    }

    let lex = run_with_retry(&mut log, Phase::Lexicographic, Phase::LexicographicRetry, false, budgets, |b| {
        lexicographic_fix(program, e, secondary_optimum, b)
    })?;
    let verdict = match (lex.status, lex.assignment) {
        (SolveStatus::Optimal, Some(assignment)) => {
            PhaseVerdict::Solved { assignment, primary_optimum: e, secondary_optimum }
        }
        _ => PhaseVerdict::TieBreakUnknown { primary_optimum: e },
    };
    Ok(PhaseRun { phase_log: log, verdict })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCounts {
    pub calls: u64,
    pub optimal: u64,
    pub infeasible: u64,
    pub unknown: u64,
}

impl PhaseCounts {
    fn add(&mut self, status: SolveStatus) {
        self.calls += 1;
        match status {
            SolveStatus::Optimal => self.optimal += 1,
            SolveStatus::Infeasible => self.infeasible += 1,
            SolveStatus::Unknown => self.unknown += 1,
        }
    }

    fn merge(&mut self, other: &PhaseCounts) {
        self.calls += other.calls;
        self.optimal += other.optimal;
        self.infeasible += other.infeasible;
        self.unknown += other.unknown;
    }
}

/// Status counts per phase across many solve sequences.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseAccounting {
    pub phases: BTreeMap<Phase, PhaseCounts>,
}

impl PhaseAccounting {
    pub fn record(&mut self, log: &[PhaseRecord]) {
        for r in log {
            self.phases.entry(r.phase).or_default().add(r.outcome.status);
        }
    }

    pub fn merge(&mut self, other: &PhaseAccounting) {
        for (p, c) in &other.phases {
            self.phases.entry(*p).or_default().merge(c);
        }
    }

    pub fn total(&self) -> PhaseCounts {
        let mut t = PhaseCounts::default();
        for c in self.phases.values() {
            t.merge(c);
        }
        t
    }

    /// `phase, calls, optimal, infeasible, unknown` with a trailing total row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("phase\tcalls\toptimal\tinfeasible\tunknown\n");
        let mut line = |label: &str, c: &PhaseCounts| {
            let _ = writeln!(out, "{label}\t{}\t{}\t{}\t{}", c.calls, c.optimal, c.infeasible, c.unknown);
        };
        for p in Phase::ALL {
            line(p.label(), &self.phases.get(&p).copied().unwrap_or_default());
        }
        line("Total", &self.total());
        out
    }
}

/// Builds, solves and certifies `params` in one call.
pub fn solve_specification(params: &ParameterSetting, budgets: &PhaseBudgets) -> Result<SolvedSpecification> {
    let program = crate::model::build_program(params)?;
    multi_phase_solve(&program, budgets)?.into_solved(params, &program)
}
