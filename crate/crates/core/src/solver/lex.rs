//! Deterministic tie-breaking among optimal plans.

use super::bnb::{search, Budget, Clock, Search, SolveOutcome, SolveStatus};
use super::propagate::propagate;
use crate::error::Result;
use crate::model::{Assignment, ConstraintProgram, LinearConstraint, LinearObjective};

/// Pins the objectives at their optima as side constraints.
pub(crate) fn objective_pins(
    program: &ConstraintProgram,
    primary_optimum: i64,
    secondary_optimum: Option<i64>,
) -> Vec<LinearConstraint> {
    let mut pins = Vec::new();
    let primary = program.objective.primary();
    if !primary.is_zero() {
        pins.push(primary.pin("pin[primary]", primary_optimum));
    }
    if let (Some(sec), Some(bound)) = (program.objective.secondary(), secondary_optimum) {
        pins.push(sec.pin("pin[secondary]", bound));
    }
    pins
}

/// Minimizes each variable in canonical order with the optima pinned.
///
/// The result is the canonical-order lexicographically smallest optimal assignment.
/// On budget expiry the partial fixes are discarded and `UNKNOWN` is returned.
pub fn lexicographic_fix(
    program: &ConstraintProgram,
    primary_optimum: i64,
    secondary_optimum: Option<i64>,
    budget: Budget,
) -> Result<SolveOutcome> {
    program.well_formed()?;
    let mut clock = Clock::new(budget)?;
    let mut rows = program.all_rows();
    rows.extend(objective_pins(program, primary_optimum, secondary_optimum));
    let mut lo = program.lower_bounds();
    let mut hi = program.upper_bounds();
    if !propagate(&rows, &mut lo, &mut hi) {
        return Ok(SolveOutcome::infeasible(clock.nodes, clock.started));
    }
    let mut witness: Option<Vec<i64>> = None;
    for var in program.canonical_order.clone() {
        let j = var.idx();
        if !propagate(&rows, &mut lo, &mut hi) {
            return Ok(SolveOutcome::infeasible(clock.nodes, clock.started));
        }
        // a witness agreeing with every fix so far that already sits at the floor is minimal
        let value = match &witness {
            Some(w) if w[j] == lo[j] => lo[j],
            _ => {
                if lo[j] == hi[j] {
                    lo[j]
                } else {
                    match search(program, &rows, &LinearObjective::single(var), lo.clone(), hi.clone(), &mut clock) {
                        Search::Optimal(v, x) => {
                            witness = Some(x);
                            v
                        }
                        Search::Infeasible => return Ok(SolveOutcome::infeasible(clock.nodes, clock.started)),
                        Search::Unknown => return Ok(SolveOutcome::unknown(clock.nodes, clock.started)),
                    }
                }
            }
        };
        lo[j] = value;
        hi[j] = value;
        if let Some(w) = &witness {
            if w[j] != value {
                witness = None;
            }
        }
    }
    if !rows.iter().all(|r| r.holds(&lo)) {
        return Ok(SolveOutcome::infeasible(clock.nodes, clock.started));
    }
    let objective_value = program.objective.primary().value(&lo);
    Ok(SolveOutcome {
        status: SolveStatus::Optimal,
        assignment: Some(Assignment(lo)),
        objective_value: Some(objective_value),
        nodes_explored: clock.nodes,
        wall_time_ms: clock.started.elapsed().as_millis() as u64,
    })
}
