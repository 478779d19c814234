//! Depth-first branch-and-bound over bounded integers.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::lp::{solve_lp, LpResult};
use super::propagate::propagate;
use crate::error::{Error, Result};
use crate::model::{Assignment, ConstraintProgram, LinearConstraint, LinearObjective};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unknown,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "OPTIMAL",
            SolveStatus::Infeasible => "INFEASIBLE",
            SolveStatus::Unknown => "UNKNOWN",
        }
    }
}

/// Result of one solver call. Equality ignores `wall_time_ms`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub assignment: Option<Assignment>,
    pub objective_value: Option<i64>,
    pub nodes_explored: u64,
    pub wall_time_ms: u64,
}

impl PartialEq for SolveOutcome {
    fn eq(&self, other: &Self) -> bool {
        self.status == other.status
            && self.assignment == other.assignment
            && self.objective_value == other.objective_value
            && self.nodes_explored == other.nodes_explored
    }
}

impl SolveOutcome {
    pub(crate) fn unknown(nodes: u64, started: Instant) -> Self {
        SolveOutcome {
            status: SolveStatus::Unknown,
            assignment: None,
            objective_value: None,
            nodes_explored: nodes,
            wall_time_ms: started.elapsed().as_millis() as u64,
        }
    }

    pub(crate) fn infeasible(nodes: u64, started: Instant) -> Self {
        SolveOutcome { status: SolveStatus::Infeasible, ..Self::unknown(nodes, started) }
    }
}

/// Wall-clock and node limits for one solver call.
///
/// The node limit makes budget exhaustion reproducible; the wall clock is the production guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub time_ms: u64,
    pub max_nodes: Option<u64>,
}

impl Budget {
    pub fn millis(time_ms: u64) -> Self {
        Budget { time_ms, max_nodes: None }
    }

    pub fn with_nodes(self, max_nodes: u64) -> Self {
        Budget { max_nodes: Some(max_nodes), ..self }
    }
}

/// Shared clock for a sequence of searches.
pub(crate) struct Clock {
    pub started: Instant,
    pub budget: Budget,
    pub nodes: u64,
}

impl Clock {
    pub fn new(budget: Budget) -> Result<Self> {
        if budget.time_ms == 0 {
            return Err(Error::BudgetMustBePositive);
        }
        Ok(Clock { started: Instant::now(), budget, nodes: 0 })
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if let Some(max) = self.budget.max_nodes {
            if self.nodes > max {
                return false;
            }
        }
        self.started.elapsed().as_millis() as u64 <= self.budget.time_ms
    }
}

pub(crate) enum Search {
    Optimal(i64, Vec<i64>),
    Infeasible,
    Unknown,
}

/// Minimizes `objective` over `rows` within the box `[lo, hi]`.
pub(crate) fn search(
    program: &ConstraintProgram,
    rows: &[LinearConstraint],
    objective: &LinearObjective,
    lo: Vec<i64>,
    hi: Vec<i64>,
    clock: &mut Clock,
) -> Search {
    let n = lo.len();
    let mut cost = vec![0.0; n];
    for (v, c) in &objective.terms {
        cost[v.idx()] += *c as f64;
    }
    let order: Vec<usize> = program.canonical_order.iter().map(|v| v.idx()).collect();
    let mut incumbent: Option<(i64, Vec<i64>)> = None;
    let mut stack = vec![(lo, hi)];

    while let Some((mut lo, mut hi)) = stack.pop() {
        if !clock.tick() {
            return Search::Unknown;
        }
        if !propagate(rows, &mut lo, &mut hi) {
            continue;
        }
        let trivial: i64 = objective
            .terms
            .iter()
            .map(|(v, c)| (c * lo[v.idx()]).min(c * hi[v.idx()]))
            .sum();
        if let Some((best, _)) = &incumbent {
            if trivial >= *best {
                continue;
            }
        }
        if lo == hi {
            // propagation over fully fixed rows is an exact feasibility check
            let val = objective.value(&lo);
            if incumbent.as_ref().is_none_or(|(b, _)| val < *b) {
                incumbent = Some((val, lo));
            }
            continue;
        }

        let split = match solve_lp(rows, &cost, &lo, &hi) {
            LpResult::Infeasible => continue,
            LpResult::Optimal { value, x } => {
                if let Some((best, _)) = &incumbent {
                    let margin = 1e-6 * value.abs().max(1.0);
                    if value - margin > (*best - 1) as f64 {
                        continue;
                    }
                }
                let frac = order.iter().copied().find(|&j| (x[j] - x[j].round()).abs() > 1e-6);
                match frac {
                    Some(j) => Some((j, x[j].floor() as i64)),
                    None => {
                        let cand: Vec<i64> =
                            x.iter().enumerate().map(|(j, v)| (v.round() as i64).clamp(lo[j], hi[j])).collect();
                        let exact = rows.iter().all(|r| r.holds(&cand));
                        if exact {
                            let val = objective.value(&cand);
                            if incumbent.as_ref().is_none_or(|(b, _)| val < *b) {
                                incumbent = Some((val, cand));
                            }
                            if (val as f64) <= value + 0.5 {
                                continue;
                            }
                        }
                        None
                    }
                }
            }
            LpResult::Inconclusive => None,
        };
        let (j, at) = split.unwrap_or_else(|| {
            let j = order.iter().copied().find(|&j| lo[j] < hi[j]).expect("unfixed variable");
            (j, lo[j] + (hi[j] - lo[j]) / 2)
        });
        let at = at.clamp(lo[j], hi[j] - 1);
        let mut up_lo = lo.clone();
        up_lo[j] = at + 1;
        stack.push((up_lo, hi.clone()));
        let mut down_hi = hi;
        down_hi[j] = at;
        stack.push((lo, down_hi));
    }
    match incumbent {
        Some((v, x)) => Search::Optimal(v, x),
        None => Search::Infeasible,
    }
}

/// Solves `program` for its primary objective or `objective_override`.
pub fn solve(
    program: &ConstraintProgram,
    objective_override: Option<&LinearObjective>,
    budget_ms: u64,
) -> Result<SolveOutcome> {
    let primary = program.objective.primary();
    solve_with(program, objective_override.unwrap_or(&primary), &[], Budget::millis(budget_ms))
}

/// Solves with extra side constraints (e.g. objective pins) under an explicit budget.
pub fn solve_with(
    program: &ConstraintProgram,
    objective: &LinearObjective,
    extra: &[LinearConstraint],
    budget: Budget,
) -> Result<SolveOutcome> {
    program.well_formed()?;
    let mut clock = Clock::new(budget)?;
    let mut rows = program.all_rows();
    rows.extend_from_slice(extra);
    let result = search(program, &rows, objective, program.lower_bounds(), program.upper_bounds(), &mut clock);
    Ok(match result {
        Search::Optimal(v, x) => SolveOutcome {
            status: SolveStatus::Optimal,
            assignment: Some(Assignment(x)),
            objective_value: Some(v),
            nodes_explored: clock.nodes,
            wall_time_ms: clock.started.elapsed().as_millis() as u64,
        },
        Search::Infeasible => SolveOutcome::infeasible(clock.nodes, clock.started),
        Search::Unknown => SolveOutcome::unknown(clock.nodes, clock.started),
    })
}
