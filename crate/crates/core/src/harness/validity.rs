//! No-op and oracle replay over a corpus.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::{grade_terminal, load_corpus, noop_terminal, oracle_terminal, perturbation_snapshots, write_json, write_text};
use crate::compile::LoadedTask;
use crate::error::{Error, Result};
use crate::model::Tier;
use crate::verify::Verdict;

/// Checks from the original protocol that need humans or a language model.
pub const NOT_RUN_CHECKS: [&str; 2] = ["llm_consistency_judge", "expert_spot_check"];

/// Oracle rewards within this distance of 100 count as full credit.
const FULL_CREDIT_EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ValidityOptions {
    pub jobs: Option<usize>,
    pub perturbations: usize,
    pub perturbation_seed: u64,
}

impl Default for ValidityOptions {
    fn default() -> Self {
        ValidityOptions { jobs: None, perturbations: 500, perturbation_seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityRow {
    pub task_name: String,
    pub tier: Tier,
    pub num_variables: usize,
    pub noop_reward: f64,
    pub oracle_reward: f64,
    pub noop_gates: Vec<String>,
    /// Non-NA checks on the oracle terminal.
    pub applicable_checks: usize,
    pub canary_flags: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValiditySummary {
    pub tasks_total: usize,
    pub noop_zero_count: usize,
    pub oracle_full_count: usize,
    pub canary_count: usize,
    pub perturbations: usize,
    pub perturbation_canary_count: usize,
    /// Each entry reads "<check>: not run (out of scope)".
    pub not_run: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub rows: Vec<ValidityRow>,
    pub summary: ValiditySummary,
}

impl ValidityReport {
    fn from_rows(mut rows: Vec<ValidityRow>, perturbations: usize, perturbation_canary_count: usize) -> Self {
        rows.sort_by(|a, b| a.task_name.cmp(&b.task_name));
        let summary = ValiditySummary {
            tasks_total: rows.len(),
            noop_zero_count: rows.iter().filter(|r| r.noop_reward == 0.0).count(),
            oracle_full_count: rows.iter().filter(|r| (r.oracle_reward - 100.0).abs() <= FULL_CREDIT_EPS).count(),
            canary_count: rows.iter().map(|r| r.canary_flags as usize).sum(),
            perturbations,
            perturbation_canary_count,
            not_run: NOT_RUN_CHECKS.iter().map(|c| format!("{c}: not run (out of scope)")).collect(),
        };
        ValidityReport { rows, summary }
    }

    pub fn passed(&self) -> bool {
        let s = &self.summary;
        s.noop_zero_count == s.tasks_total
            && s.oracle_full_count == s.tasks_total
            && s.canary_count == 0
            && s.perturbation_canary_count == 0
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("task_name\ttier\tnoop_reward\toracle_reward\tnoop_gates\tapplicable_checks\tcanary_flags\n");
        for r in &self.rows {
            let gates = if r.noop_gates.is_empty() { "-".to_string() } else { r.noop_gates.join(",") };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.task_name, r.tier, r.noop_reward, r.oracle_reward, gates, r.applicable_checks, r.canary_flags
            );
        }
        out
    }

    /// Writes `validity.tsv` and `validity_summary.json`.
    pub fn write(&self, out: &Path) -> Result<()> {
        write_text(&out.join("validity.tsv"), &self.to_tsv())?;
        write_json(&out.join("validity_summary.json"), &self.summary)
    }
}

fn check_task(task: &LoadedTask) -> Result<ValidityRow> {
    let config = &task.verifier_config;
    let noop = grade_terminal(config, &noop_terminal(task)?)?;
    let oracle = grade_terminal(config, &oracle_terminal(task)?)?;
    Ok(ValidityRow {
        task_name: task.metadata.name.clone(),
        tier: task.metadata.difficulty,
        num_variables: task.metadata.num_variables,
        noop_reward: noop.breakdown.r,
        oracle_reward: oracle.breakdown.r,
        noop_gates: noop.breakdown.gates_fired.clone(),
        applicable_checks: oracle.results.iter().filter(|r| r.verdict != Verdict::Na).count(),
        canary_flags: u32::from(noop.breakdown.canary_triggered) + u32::from(oracle.breakdown.canary_triggered),
    })
}

fn in_pool<R: Send>(jobs: Option<usize>, work: impl FnOnce() -> R + Send) -> Result<R> {
    match jobs {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InconsistentParameters(format!("thread pool: {e}")))?
            .install(work)),
        None => Ok(work()),
    }
}

/// Grades no-op and oracle terminals of every task, plus seeded perturbations of the oracle terminals.
pub fn run_validity(corpus: &Path, options: &ValidityOptions) -> Result<ValidityReport> {
    let tasks = load_corpus(corpus)?;
    let (rows, flagged) = in_pool(options.jobs, || -> Result<(Vec<ValidityRow>, usize)> {
        let rows = tasks.par_iter().map(check_task).collect::<Result<Vec<_>>>()?;
        let snapshots = perturbation_snapshots(&tasks, options.perturbations, options.perturbation_seed)?;
        let flags = snapshots
            .par_iter()
            .map(|(i, _, t)| grade_terminal(&tasks[*i].verifier_config, t).map(|g| usize::from(g.breakdown.canary_triggered)))
            .collect::<Result<Vec<_>>>()?;
        Ok((rows, flags.into_iter().sum()))
    })??;
    Ok(ValidityReport::from_rows(rows, options.perturbations, flagged))
}
