//! Perturbation snapshots, snapshot scans and the fault-injection fixture.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{grade_terminal, load_corpus, oracle_terminal};
use crate::compile::{LoadedTask, TaskBundle};
use crate::erp::{replay, ErpState, OrderState, TerminalState};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SeededRng};
use crate::verify::{Dimension, Verdict};

const PERTURBATION_KINDS: i64 = 12;

/// Applies one to three random record edits. The result is structurally valid but may break any rule.
pub fn perturb(terminal: &TerminalState, rng: &mut SeededRng) -> TerminalState {
    let mut t = terminal.clone();
    let edits = rng.int_in(1, 3);
    for _ in 0..edits {
        let tb = &mut t.0;
        match rng.int_in(0, PERTURBATION_KINDS - 1) {
            0 | 1 | 2 | 3 | 8 if !tb.purchase_orders.is_empty() => {
                let i = rng.int_in(0, tb.purchase_orders.len() as i64 - 1) as usize;
                let po = &mut tb.purchase_orders[i];
                if po.lines.is_empty() {
                    continue;
                }
                let j = rng.int_in(0, po.lines.len() as i64 - 1) as usize;
                let line = &mut po.lines[j];
                match rng.int_in(0, 4) {
                    0 => line.qty += rng.int_in(1, 3),
                    1 => line.qty = (line.qty - rng.int_in(1, 3)).max(0),
                    2 => line.unit_price_cents = (line.unit_price_cents + rng.int_in(-50, 50)).max(1),
                    3 => line.expected_day += rng.int_in(-1, 1),
                    _ => po.state = OrderState::Cancelled,
                }
            }
            4 if !tb.sales_orders.is_empty() => {
                let i = rng.int_in(0, tb.sales_orders.len() as i64 - 1) as usize;
                let so = &mut tb.sales_orders[i];
                if let Some(line) = so.lines.first_mut() {
                    line.allocated_qty = (line.allocated_qty + rng.int_in(-2, 1)).max(0);
                }
            }
            5 if !tb.sales_orders.is_empty() => {
                let i = rng.int_in(0, tb.sales_orders.len() as i64 - 1) as usize;
                let so = &mut tb.sales_orders[i];
                so.commitment_day = so.commitment_day.map(|d| d + rng.int_in(-1, 2));
            }
            6 if !tb.manufacturing_orders.is_empty() => {
                let i = rng.int_in(0, tb.manufacturing_orders.len() as i64 - 1) as usize;
                let mo = &mut tb.manufacturing_orders[i];
                match rng.int_in(0, 2) {
                    0 => mo.qty = (mo.qty + rng.int_in(-2, 2)).max(0),
                    1 => {
                        let shift = rng.int_in(-1, 1);
                        mo.start_day += shift;
                        mo.end_day += shift;
                    }
                    _ => mo.state = OrderState::Cancelled,
                }
            }
            7 if !tb.invoices.is_empty() => {
                let i = rng.int_in(0, tb.invoices.len() as i64 - 1) as usize;
                if rng.chance(0.5) {
                    tb.invoices.remove(i);
                } else {
                    tb.invoices[i].amount_cents += rng.int_in(-100, 100);
                }
            }
            9 if !tb.purchase_orders.is_empty() => {
                let i = rng.int_in(0, tb.purchase_orders.len() as i64 - 1) as usize;
                let mut dup = tb.purchase_orders[i].clone();
                dup.id = tb.purchase_orders.iter().map(|p| p.id).max().unwrap_or(0) + 1;
                tb.purchase_orders.push(dup);
            }
            10 if !tb.adjacent_records.is_empty() => {
                let keys: Vec<String> = tb.adjacent_records.keys().cloned().collect();
                let key = rng.pick(&keys).clone();
                if let Some(rec) = tb.adjacent_records.get_mut(&key) {
                    rec.fields.insert("note".into(), format!("edited-{}", rng.int_in(0, 999)));
                }
            }
            11 if !tb.sales_orders.is_empty() => {
                let i = rng.int_in(0, tb.sales_orders.len() as i64 - 1) as usize;
                tb.sales_orders[i].state = OrderState::Cancelled;
            }
            _ => {}
        }
    }
    t
}

/// `count` perturbed oracle terminals, cycling through `tasks`; each is `(task index, label, terminal)`.
pub fn perturbation_snapshots(
    tasks: &[LoadedTask],
    count: usize,
    seed: u64,
) -> Result<Vec<(usize, String, TerminalState)>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if tasks.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let oracles = tasks.iter().map(oracle_terminal).collect::<Result<Vec<_>>>()?;
    Ok((0..count)
        .map(|k| {
            let i = k % tasks.len();
            let mut rng = SeededRng::new(derive_seed(seed, &["perturb", &tasks[i].metadata.name], k as u64));
            (i, format!("{}__perturb{k:03}", tasks[i].metadata.name), perturb(&oracles[i], &mut rng))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanaryRow {
    pub snapshot: String,
    pub task_name: String,
    pub reward: f64,
    pub canary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanaryScan {
    pub rows: Vec<CanaryRow>,
    pub flagged: usize,
}

impl CanaryScan {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("snapshot\ttask_name\treward\tcanary\n");
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", r.snapshot, r.task_name, r.reward, if r.canary { "FLAG" } else { "ok" });
        }
        out
    }
}

/// `*.json` files in `dir` by file stem, sorted.
pub fn load_snapshots(dir: &Path) -> Result<Vec<(String, TerminalState)>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            super::read_snapshot(p).map(|t| (stem, t))
        })
        .collect()
}

/// Grades every snapshot in `snapshots` against its task; a snapshot named `<task>` or `<task>__<label>` belongs to `<task>`.
pub fn canary_scan(corpus: &Path, snapshots: &Path) -> Result<CanaryScan> {
    let tasks: BTreeMap<String, LoadedTask> =
        load_corpus(corpus)?.into_iter().map(|t| (t.metadata.name.clone(), t)).collect();
    let mut rows = Vec::new();
    for (stem, terminal) in load_snapshots(snapshots)? {
        let task_name = stem.split("__").next().unwrap_or_default().to_string();
        let task = tasks.get(&task_name).ok_or_else(|| Error::UnmatchedSnapshot(stem.clone()))?;
        let g = grade_terminal(&task.verifier_config, &terminal)?;
        rows.push(CanaryRow { snapshot: stem, task_name, reward: g.breakdown.r, canary: g.breakdown.canary_triggered });
    }
    let flagged = rows.iter().filter(|r| r.canary).count();
    Ok(CanaryScan { rows, flagged })
}

/// A task whose verifier has lost the rules an exploit needs to slip through.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultInjection {
    pub bundle: TaskBundle,
    pub exploit: TerminalState,
    pub deleted_rules: Vec<String>,
}

/// Cancels every confirmed purchase in the oracle terminal, then deletes exactly the
/// constraint rules that catch it. `None` when cancelling purchases cannot beat the optimum.
pub fn fault_injection(bundle: &TaskBundle) -> Result<Option<FaultInjection>> {
    let oracle = replay(&ErpState::apply_seed(&bundle.seed_spec)?, &bundle.oracle_plan.actions)?;
    let mut exploit = oracle;
    for po in &mut exploit.0.purchase_orders {
        if po.state == OrderState::Confirmed {
            po.state = OrderState::Cancelled;
        }
    }
    let g = grade_terminal(&bundle.verifier_config, &exploit)?;
    if g.breakdown.realized_primary >= g.breakdown.certified_optimum {
        return Ok(None);
    }
    let deleted_rules: Vec<String> = g
        .results
        .iter()
        .filter(|r| r.dimension == Dimension::Constraint && r.verdict == Verdict::Fail)
        .map(|r| r.rule_id.to_string())
        .collect();
    let mut faulty = bundle.clone();
    faulty.verifier_config.rules.retain(|r| !deleted_rules.contains(&r.rule_id));
    Ok(Some(FaultInjection { bundle: faulty, exploit, deleted_rules }))
}
