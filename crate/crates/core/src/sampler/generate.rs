//! The rejection loop and corpus generation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::draw::sample_parameters;
use super::recipe::DifficultyRecipe;
use super::screen::{pre_solver_screen, ScreenResult};
use crate::compile::{compile_bundle, write_task_dir, TaskBundle};
use crate::error::{Error, Result};
use crate::model::{
    build_program, BaselineAllocation, BaselineBuild, BaselineLine, BaselinePurchase, ObjectiveType,
    ParameterSetting, PatternId, RepairBaseline, Tier, VarIndex,
};
use crate::rng::{derive_seed, SeededRng};
use crate::solver::{multi_phase_solve, PhaseAccounting, PhaseBudgets, SolvedSpecification};

pub const RESAMPLE_CAP: u32 = 500;

#[derive(Debug, Clone)]
pub struct GenerationOptions {
    pub budgets: PhaseBudgets,
    pub resample_cap: u32,
    pub recipes: BTreeMap<Tier, DifficultyRecipe>,
    /// Worker threads for corpus generation; `None` uses the rayon default.
    pub jobs: Option<usize>,
}

impl Default for GenerationOptions {
    fn default() -> Self {
        GenerationOptions {
            // node caps decide every outcome; the clock is a safety net far above a capped search
            budgets: PhaseBudgets { first_ms: 120_000, retry_ms: 360_000, max_nodes: Some(20_000) },
            resample_cap: RESAMPLE_CAP,
            recipes: Tier::ALL.into_iter().map(|t| (t, DifficultyRecipe::for_tier(t))).collect(),
            jobs: None,
        }
    }
}

/// One accepted task and what it cost to find.
#[derive(Debug, Clone)]
pub struct GeneratedTask {
    pub bundle: TaskBundle,
    pub solved: SolvedSpecification,
    pub attempts: u32,
    pub pre_solver_discards: u32,
    pub solver_discards: u32,
    pub accounting: PhaseAccounting,
}

enum Attempt {
    Solved(Box<SolvedSpecification>),
    PreSolverDiscard,
    SolverDiscard,
}

/// Sub-seed for one attempt of one task.
pub fn attempt_seed(seed: u64, pattern: PatternId, tier: Tier, attempt: u32) -> u64 {
    derive_seed(seed, &[pattern.as_str(), tier.as_str()], u64::from(attempt))
}

fn solve_logged(
    p: &ParameterSetting,
    budgets: &PhaseBudgets,
    accounting: &mut PhaseAccounting,
) -> Result<Option<SolvedSpecification>> {
    let program = build_program(p)?;
    let run = multi_phase_solve(&program, budgets)?;
    accounting.record(&run.phase_log);
    match run.into_solved(p, &program) {
        Ok(s) => Ok(Some(s)),
        Err(Error::SampleInfeasible(_) | Error::SampleRejected(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Withdraws one vendor the pristine plan buys from; the pristine plan becomes the baseline.
fn disrupt(p: &mut ParameterSetting, pristine: &SolvedSpecification, rng: &mut SeededRng) -> bool {
    let idx = VarIndex::of(&pristine.program);
    let x = &pristine.optimal_assignment;
    let mut by_vendor: BTreeMap<String, Vec<BaselineLine>> = BTreeMap::new();
    for o in &p.vendor_offers {
        let qty = x.get(idx.offers[&o.offer_id].0);
        if qty > 0 {
            by_vendor.entry(o.vendor_id.clone()).or_default().push(BaselineLine { offer_id: o.offer_id.clone(), qty });
        }
    }
    if by_vendor.is_empty() {
        return false;
    }
    let used: Vec<String> = by_vendor.keys().cloned().collect();
    let withdrawn = rng.pick(&used).clone();
    let builds = idx
        .assembly
        .iter()
        .filter(|(_, a)| x.get(**a) > 0)
        .map(|((bom_id, wc), a)| BaselineBuild { bom_id: bom_id.clone(), workcenter_id: wc.clone(), qty: x.get(*a) })
        .collect();
    let allocations = idx
        .stock
        .iter()
        .filter(|(_, s)| x.get(**s) > 0)
        .map(|(order_id, s)| BaselineAllocation { order_id: order_id.clone(), qty: x.get(*s) })
        .collect();
    for o in &mut p.vendor_offers {
        if o.vendor_id == withdrawn {
            o.withdrawn = true;
        }
    }
    p.repair_baseline = Some(RepairBaseline {
        withdrawn_vendor_id: withdrawn,
        purchases: by_vendor.into_iter().map(|(vendor_id, lines)| BaselinePurchase { vendor_id, lines }).collect(),
        builds,
        allocations,
    });
    true
}

fn run_attempt(
    recipe: &DifficultyRecipe,
    pattern: PatternId,
    sub_seed: u64,
    budgets: &PhaseBudgets,
    accounting: &mut PhaseAccounting,
) -> Result<Attempt> {
    let mut rng = SeededRng::new(sub_seed);
    let mut p = sample_parameters(recipe, pattern, &mut rng);
    if p.objective_type == ObjectiveType::RepairPlan {
        p.objective_type = ObjectiveType::MinNewSpend;
        if !pre_solver_screen(&p).is_accept() {
            return Ok(Attempt::PreSolverDiscard);
        }
        let Some(pristine) = solve_logged(&p, budgets, accounting)? else {
            return Ok(Attempt::SolverDiscard);
        };
        if !disrupt(&mut p, &pristine, &mut rng) {
            return Ok(Attempt::PreSolverDiscard);
        }
        p.objective_type = ObjectiveType::RepairPlan;
    }
    if let ScreenResult::Discard(_) = pre_solver_screen(&p) {
        return Ok(Attempt::PreSolverDiscard);
    }
    Ok(match solve_logged(&p, budgets, accounting)? {
        Some(s) => Attempt::Solved(Box::new(s)),
        None => Attempt::SolverDiscard,
    })
}

/// Samples, screens and solves until an attempt is certified, then compiles it.
pub fn generate_task_with(
    pattern: PatternId,
    tier: Tier,
    seed: u64,
    task_name: &str,
    options: &GenerationOptions,
) -> Result<GeneratedTask> {
    let recipe = options
        .recipes
        .get(&tier)
        .ok_or_else(|| Error::InconsistentParameters(format!("no recipe for {tier}")))?;
    let mut accounting = PhaseAccounting::default();
    let (mut pre, mut post) = (0, 0);
    for attempt in 0..options.resample_cap {
        let sub_seed = attempt_seed(seed, pattern, tier, attempt);
        match run_attempt(recipe, pattern, sub_seed, &options.budgets, &mut accounting)? {
            Attempt::PreSolverDiscard => pre += 1,
            Attempt::SolverDiscard => post += 1,
            Attempt::Solved(solved) => {
                let bundle = compile_bundle(&solved, task_name)?;
                return Ok(GeneratedTask {
                    bundle,
                    solved: *solved,
                    attempts: attempt + 1,
                    pre_solver_discards: pre,
                    solver_discards: post,
                    accounting,
                });
            }
        }
    }
    Err(Error::ResampleCapExceeded { task: task_name.to_string(), attempts: options.resample_cap })
}

/// [`generate_task_with`] under default options, named `{tier}-{pattern}`.
pub fn generate_task(pattern: PatternId, tier: Tier, seed: u64) -> Result<TaskBundle> {
    let name = format!("{tier}-{pattern}");
    generate_task_with(pattern, tier, seed, &name, &GenerationOptions::default()).map(|g| g.bundle)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub pattern: PatternId,
    pub tier: Tier,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(rename = "task", default)]
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Manifest> {
        let m: Manifest = toml::from_str(text).map_err(|e| Error::MalformedManifest(e.to_string()))?;
        if m.total() == 0 {
            return Err(Error::EmptyManifest);
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Manifest::parse(&text)
    }

    /// Every implemented pattern at every tier, `count` tasks each.
    pub fn full_grid(count: u32) -> Manifest {
        let entries = Tier::ALL
            .into_iter()
            .flat_map(|tier| PatternId::ALL.into_iter().map(move |pattern| ManifestEntry { pattern, tier, count }))
            .collect();
        Manifest { entries }
    }

    pub fn total(&self) -> u32 {
        self.entries.iter().map(|e| e.count).sum()
    }

    /// Tasks in manifest order with stable names and per-task seeds.
    pub fn plan(&self, master_seed: u64) -> Vec<PlannedTask> {
        let mut out = Vec::new();
        for e in &self.entries {
            for _ in 0..e.count {
                let name = format!("s{:03}-{}-{}", out.len() + 1, e.tier, e.pattern);
                let seed = derive_seed(master_seed, &["task", &name], 0);
                out.push(PlannedTask { name, pattern: e.pattern, tier: e.tier, seed });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedTask {
    pub name: String,
    pub pattern: PatternId,
    pub tier: Tier,
    pub seed: u64,
}

/// Per-task line of the generation report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaskSummary {
    pub name: String,
    pub pattern: PatternId,
    pub tier: Tier,
    pub seed: u64,
    pub objective_type: ObjectiveType,
    pub attempts: u32,
    pub pre_solver_discards: u32,
    pub solver_discards: u32,
    pub num_variables: usize,
    pub num_constraints: usize,
    pub num_rules: usize,
    pub primary_optimum: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationReport {
    pub accepted: u64,
    pub attempts: u64,
    pub pre_solver_discards: u64,
    pub solver_discards: u64,
    pub resamples_per_tier: BTreeMap<Tier, u64>,
    /// Never written to report files.
    pub wall_time_ms: u64,
    pub phase_accounting: PhaseAccounting,
    /// Sorted by task name.
    pub tasks: Vec<TaskSummary>,
}

impl GenerationReport {
    fn from_tasks(mut generated: Vec<(PlannedTask, GeneratedTask)>, wall_time_ms: u64) -> GenerationReport {
        generated.sort_by(|a, b| a.0.name.cmp(&b.0.name));
        let mut report = GenerationReport {
            accepted: 0,
            attempts: 0,
            pre_solver_discards: 0,
            solver_discards: 0,
            resamples_per_tier: Tier::ALL.into_iter().map(|t| (t, 0)).collect(),
            wall_time_ms,
            phase_accounting: PhaseAccounting::default(),
            tasks: Vec::new(),
        };
        for (plan, g) in &generated {
            report.accepted += 1;
            report.attempts += u64::from(g.attempts);
            report.pre_solver_discards += u64::from(g.pre_solver_discards);
            report.solver_discards += u64::from(g.solver_discards);
            *report.resamples_per_tier.entry(plan.tier).or_default() += u64::from(g.attempts - 1);
            report.phase_accounting.merge(&g.accounting);
            report.tasks.push(TaskSummary {
                name: plan.name.clone(),
                pattern: plan.pattern,
                tier: plan.tier,
                seed: plan.seed,
                objective_type: g.solved.params.objective_type,
                attempts: g.attempts,
                pre_solver_discards: g.pre_solver_discards,
                solver_discards: g.solver_discards,
                num_variables: g.solved.program.num_vars(),
                num_constraints: g.solved.program.num_constraints(),
                num_rules: g.bundle.verifier_config.rules.len(),
                primary_optimum: g.solved.primary_optimum,
            });
        }
        report
    }

    /// One row per task.
    pub fn tasks_tsv(&self) -> String {
        let mut out = String::from(
            "task\tpattern\ttier\tseed\tobjective\tattempts\tpre_solver_discards\tsolver_discards\tvariables\tconstraints\trules\tprimary_optimum\n",
        );
        for t in &self.tasks {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.name,
                t.pattern,
                t.tier,
                t.seed,
                t.objective_type.as_str(),
                t.attempts,
                t.pre_solver_discards,
                t.solver_discards,
                t.num_variables,
                t.num_constraints,
                t.num_rules,
                t.primary_optimum
            );
        }
        out
    }

    /// Per-tier totals and mean model size.
    pub fn tier_summary_tsv(&self) -> String {
        let mut out =
            String::from("tier\ttasks\tattempts\tpre_solver_discards\tsolver_discards\tmean_variables\tmean_constraints\tmean_rules\n");
        for tier in Tier::ALL {
            let rows: Vec<_> = self.tasks.iter().filter(|t| t.tier == tier).collect();
            if rows.is_empty() {
                continue;
            }
            let n = rows.len() as f64;
            let mean = |f: &dyn Fn(&TaskSummary) -> usize| rows.iter().map(|t| f(t) as f64).sum::<f64>() / n;
            let _ = writeln!(
                out,
                "{tier}\t{}\t{}\t{}\t{}\t{:.2}\t{:.2}\t{:.2}",
                rows.len(),
                rows.iter().map(|t| t.attempts as u64).sum::<u64>(),
                rows.iter().map(|t| t.pre_solver_discards as u64).sum::<u64>(),
                rows.iter().map(|t| t.solver_discards as u64).sum::<u64>(),
                mean(&|t| t.num_variables),
                mean(&|t| t.num_constraints),
                mean(&|t| t.num_rules),
            );
        }
        let _ = writeln!(
            out,
            "all\t{}\t{}\t{}\t{}\t\t\t",
            self.accepted, self.attempts, self.pre_solver_discards, self.solver_discards
        );
        out
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Generates every task in `manifest` into `out`, plus the three report files.
pub fn generate_corpus(
    manifest: &Manifest,
    master_seed: u64,
    out: &Path,
    options: &GenerationOptions,
) -> Result<(PathBuf, GenerationReport)> {
    if manifest.total() == 0 {
        return Err(Error::EmptyManifest);
    }
    let start = std::time::Instant::now();
    let planned = manifest.plan(master_seed);
    let work = || -> Vec<Result<(PlannedTask, GeneratedTask)>> {
        planned
            .par_iter()
            .map(|t| generate_task_with(t.pattern, t.tier, t.seed, &t.name, options).map(|g| (t.clone(), g)))
            .collect()
    };
    let results = match options.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InconsistentParameters(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let generated = results.into_iter().collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    for (_, g) in &generated {
        write_task_dir(&g.bundle, out)?;
    }
    let report = GenerationReport::from_tasks(generated, start.elapsed().as_millis() as u64);
    write_file(&out.join("generation_report.tsv"), &report.tasks_tsv())?;
    write_file(&out.join("tier_summary.tsv"), &report.tier_summary_tsv())?;
    write_file(&out.join("solver_status.tsv"), &report.phase_accounting.to_tsv())?;
    Ok((out.to_path_buf(), report))
}
