//! Exhaustive enumeration oracle for small programs.

use std::time::Instant;

use super::bnb::{SolveOutcome, SolveStatus};
use crate::error::{Error, Result};
use crate::model::{Assignment, ConstraintProgram, LinearConstraint, LinearObjective};

/// Largest domain product the oracle will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

/// Enumerates every assignment against the primary objective.
pub fn brute_force_solve(program: &ConstraintProgram) -> Result<SolveOutcome> {
    brute_force_with(program, &program.objective.primary(), &[])
}

/// Enumerates in canonical-order lexicographic order; ties keep the first (smallest) assignment.
pub fn brute_force_with(
    program: &ConstraintProgram,
    objective: &LinearObjective,
    extra: &[LinearConstraint],
) -> Result<SolveOutcome> {
    program.well_formed()?;
    let started = Instant::now();
    let lo = program.lower_bounds();
    let hi = program.upper_bounds();
    let mut size: u128 = 1;
    for (l, h) in lo.iter().zip(&hi) {
        size = size.saturating_mul((h - l + 1).max(0) as u128);
    }
    if size > BRUTE_FORCE_LIMIT {
        return Err(Error::DomainTooLarge(size));
    }
    let mut rows = program.all_rows();
    rows.extend_from_slice(extra);
    let order: Vec<usize> = program.canonical_order.iter().map(|v| v.idx()).collect();

    let mut best: Option<(i64, Vec<i64>)> = None;
    let mut x = lo.clone();
    let mut visited = 0u64;
    if size > 0 {
        loop {
            visited += 1;
            if rows.iter().all(|r| r.holds(&x)) {
                let v = objective.value(&x);
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, x.clone()));
                }
            }
            // odometer: last canonical variable changes fastest
            let mut k = order.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                let j = order[k];
                if x[j] < hi[j] {
                    x[j] += 1;
                    break;
                }
                x[j] = lo[j];
                if k == 0 {
                    k = usize::MAX;
                    break;
                }
            }
            if k == usize::MAX || order.is_empty() {
                break;
            }
        }
    }
    let wall_time_ms = started.elapsed().as_millis() as u64;
    Ok(match best {
        Some((v, x)) => SolveOutcome {
            status: SolveStatus::Optimal,
            assignment: Some(Assignment(x)),
            objective_value: Some(v),
            nodes_explored: visited,
            wall_time_ms,
        },
        None => SolveOutcome {
            status: SolveStatus::Infeasible,
            assignment: None,
            objective_value: None,
            nodes_explored: visited,
            wall_time_ms,
        },
    })
}
