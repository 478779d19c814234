//! Task bundles and the on-disk task directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{emit_environment_seed, emit_oracle_plan, emit_verifier_config, render_instruction};
use crate::erp::{canonical_json, ErpState, OraclePlan, SeedSpec};
use crate::error::{Error, Result};
use crate::model::{ObjectiveType, PatternId, Tier};
use crate::solver::SolvedSpecification;
use crate::verify::VerifierConfig;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskMetadata {
    pub name: String,
    pub pattern: PatternId,
    pub difficulty: Tier,
    /// Decimal text; TOML integers cannot hold every `u64`.
    pub seed: String,
    pub objective_type: ObjectiveType,
    pub primary_optimum: i64,
    pub secondary_optimum: Option<i64>,
    pub num_variables: usize,
    pub num_constraints: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct AgentSection {
    timeout_sec: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct VerifierSection {
    command: String,
    timeout_sec: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct TaskToml {
    metadata: TaskMetadata,
    agent: AgentSection,
    verifier: VerifierSection,
}

/// The four artifacts of one task plus its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskBundle {
    pub task_name: String,
    pub instruction: String,
    pub seed_spec: SeedSpec,
    pub oracle_plan: OraclePlan,
    pub verifier_config: VerifierConfig,
    pub metadata: TaskMetadata,
}

/// Projects all four artifacts and checks that the oracle replays on the seed.
pub fn compile_bundle(spec: &SolvedSpecification, task_name: &str) -> Result<TaskBundle> {
    let seed_spec = emit_environment_seed(spec);
    let oracle_plan = emit_oracle_plan(spec)?;
    let state = ErpState::apply_seed(&seed_spec)?;
    crate::erp::replay(&state, &oracle_plan.actions)
        .map_err(|e| Error::UnrealizableAssignment(format!("oracle does not replay: {e}")))?;
    let verifier_config = emit_verifier_config(spec, task_name)?;
    let p = &spec.params;
    let metadata = TaskMetadata {
        name: task_name.to_string(),
        pattern: p.pattern_id,
        difficulty: p.difficulty,
        seed: p.seed.to_string(),
        objective_type: p.objective_type,
        primary_optimum: oracle_plan.primary_optimum,
        secondary_optimum: oracle_plan.secondary_optimum,
        num_variables: spec.program.num_vars(),
        num_constraints: spec.program.num_constraints(),
    };
    Ok(TaskBundle {
        task_name: task_name.to_string(),
        instruction: render_instruction(spec),
        seed_spec,
        oracle_plan,
        verifier_config,
        metadata,
    })
}

pub const SOLVE_SH: &str = r#"#!/usr/bin/env bash
# Replays the certified plan on the seeded environment and writes the terminal snapshot.
set -euo pipefail
TASK_DIR="$(cd "$(dirname "$0")/.." && pwd)"
taskforge replay --task-dir "$TASK_DIR" --plan "$TASK_DIR/solution/optimal_plan.json" --out "${1:-$TASK_DIR/terminal_state.json}"
"#;

pub const TEST_SH: &str = r#"#!/usr/bin/env bash
# Grades a terminal snapshot; writes rule_results.tsv and reward.json.
set -euo pipefail
TASK_DIR="$(cd "$(dirname "$0")/.." && pwd)"
SNAPSHOT="${1:-$TASK_DIR/terminal_state.json}"
OUT_DIR="${2:-$TASK_DIR/logs/verifier}"
taskforge verify --task-dir "$TASK_DIR" --snapshot "$SNAPSHOT" --out "$OUT_DIR"
"#;

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes the task directory under `root/<task_name>` and returns its path.
pub fn write_task_dir(bundle: &TaskBundle, root: &Path) -> Result<PathBuf> {
    let dir = root.join(&bundle.task_name);
    let toml = TaskToml {
        metadata: bundle.metadata.clone(),
        agent: AgentSection { timeout_sec: 3600 },
        verifier: VerifierSection { command: "bash tests/test.sh".into(), timeout_sec: 600 },
    };
    let toml = toml::to_string(&toml).map_err(|e| Error::MalformedTaskDir(e.to_string()))?;
    write(&dir.join("task.toml"), &toml)?;
    write(&dir.join("instruction.md"), &bundle.instruction)?;
    write(&dir.join("environment/scenario_data.json"), &canonical_json(&bundle.seed_spec))?;
    write(&dir.join("solution/solve.sh"), SOLVE_SH)?;
    write(&dir.join("solution/optimal_plan.json"), &canonical_json(&bundle.oracle_plan))?;
    write(&dir.join("tests/test.sh"), TEST_SH)?;
    write(&dir.join("tests/verifier_config.json"), &canonical_json(&bundle.verifier_config))?;
    Ok(dir)
}

/// A task directory read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedTask {
    pub dir: PathBuf,
    pub metadata: TaskMetadata,
    pub seed_spec: SeedSpec,
    pub oracle_plan: OraclePlan,
    pub verifier_config: VerifierConfig,
}

fn read_json<T: serde::de::DeserializeOwned>(dir: &Path, rel: &str) -> Result<T> {
    let path = dir.join(rel);
    let text =
        fs::read_to_string(&path).map_err(|e| Error::MalformedTaskDir(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedTaskDir(format!("{}: {e}", path.display())))
}

pub fn load_task_dir(dir: &Path) -> Result<LoadedTask> {
    let toml_path = dir.join("task.toml");
    let text = fs::read_to_string(&toml_path)
        .map_err(|e| Error::MalformedTaskDir(format!("{}: {e}", toml_path.display())))?;
    let parsed: TaskToml =
        toml::from_str(&text).map_err(|e| Error::MalformedTaskDir(format!("{}: {e}", toml_path.display())))?;
    Ok(LoadedTask {
        dir: dir.to_path_buf(),
        metadata: parsed.metadata,
        seed_spec: read_json(dir, "environment/scenario_data.json")?,
        oracle_plan: read_json(dir, "solution/optimal_plan.json")?,
        verifier_config: read_json(dir, "tests/verifier_config.json")?,
    })
}
