//! Validity harness: no-op and oracle replay, perturbation and canary scans.
//!
//! All grading here goes through [`crate::verify::grade`]; nothing in this
//! module inspects rules or rewards beyond what a [`Grade`] reports.

mod canary;
mod validity;

use std::fs;
use std::path::{Path, PathBuf};

pub use canary::{
    canary_scan, fault_injection, load_snapshots, perturb, perturbation_snapshots, CanaryRow, CanaryScan, FaultInjection,
};
pub use validity::{run_validity, ValidityOptions, ValidityReport, ValidityRow, ValiditySummary, NOT_RUN_CHECKS};

use crate::compile::{load_task_dir, LoadedTask};
use crate::erp::{canonical_json, replay, ErpState, OraclePlan, TerminalState};
use crate::error::{Error, Result};
use crate::verify::{grade, reward_json, rules_tsv, Grade, VerifierConfig};

/// Task directories under `corpus`, sorted by name; a directory is a task iff it has `task.toml`.
pub fn list_tasks(corpus: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(corpus).map_err(|e| Error::io(corpus, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(corpus, e))?.path();
        if path.join("task.toml").is_file() {
            out.push(path);
        }
    }
    out.sort();
    if out.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(out)
}

pub fn load_corpus(corpus: &Path) -> Result<Vec<LoadedTask>> {
    list_tasks(corpus)?.iter().map(|d| load_task_dir(d)).collect()
}

/// The seeded environment, untouched.
pub fn noop_terminal(task: &LoadedTask) -> Result<TerminalState> {
    Ok(ErpState::apply_seed(&task.seed_spec)?.snapshot())
}

/// The seeded environment after replaying `plan`.
pub fn replay_plan(task: &LoadedTask, plan: &OraclePlan) -> Result<TerminalState> {
    replay(&ErpState::apply_seed(&task.seed_spec)?, &plan.actions)
}

pub fn oracle_terminal(task: &LoadedTask) -> Result<TerminalState> {
    replay_plan(task, &task.oracle_plan)
}

/// The grading call shared by every command.
pub fn grade_terminal(config: &VerifierConfig, terminal: &TerminalState) -> Result<Grade<f64>> {
    grade::<f64>(config, terminal)
}

pub fn read_snapshot(path: &Path) -> Result<TerminalState> {
    let text = fs::read_to_string(path).map_err(|e| Error::MalformedSnapshot(format!("{}: {e}", path.display())))?;
    TerminalState::from_json(&text)
}

pub fn read_plan(path: &Path) -> Result<OraclePlan> {
    let text = fs::read_to_string(path).map_err(|e| Error::MalformedTaskDir(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedTaskDir(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Grades a snapshot against a task directory and writes `rule_results.tsv` and `reward.json` to `out`.
pub fn verify_task(task_dir: &Path, snapshot: &Path, out: &Path) -> Result<Grade<f64>> {
    let task = load_task_dir(task_dir)?;
    let terminal = read_snapshot(snapshot)?;
    let g = grade_terminal(&task.verifier_config, &terminal)?;
    write(&out.join("rule_results.tsv"), &rules_tsv(&g.results))?;
    write(&out.join("reward.json"), &reward_json(&g.breakdown))?;
    Ok(g)
}

/// Replays a plan file against a task's seed and writes the terminal snapshot to `out`.
pub fn replay_task(task_dir: &Path, plan: &Path, out: &Path) -> Result<TerminalState> {
    let task = load_task_dir(task_dir)?;
    let terminal = replay_plan(&task, &read_plan(plan)?)?;
    write(out, &terminal.to_canonical_json())?;
    Ok(terminal)
}

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    write(path, &canonical_json(value))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    write(path, text)
}
