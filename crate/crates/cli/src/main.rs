//! `taskforge`: generate task corpora, grade terminal snapshots, and run the validity harness.
//!
//! Exit codes: 0 success, 1 usage error, 2 malformed input or failed run,
//! 3 validity failure (non-zero no-op, short oracle, or a canary flag).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use taskforge::harness::{self, ValidityOptions};
use taskforge::sampler::{generate_corpus, GenerationOptions, Manifest};
use taskforge::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_VALIDITY: u8 = 3;

#[derive(Parser)]
#[command(name = "taskforge", version, about = "Generate and grade verifiable ERP planning tasks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a corpus from a manifest.
    Generate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Grade a terminal snapshot against one task.
    Verify {
        #[arg(long)]
        task_dir: PathBuf,
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a plan on a task's seeded environment and write the terminal snapshot.
    Replay {
        #[arg(long)]
        task_dir: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// No-op, oracle and perturbation checks over a corpus.
    Validity {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = 500)]
        perturbations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Grade a directory of snapshots (`<task>.json` or `<task>__<label>.json`) and report canary flags.
    CanaryScan {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        snapshots: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write no-op, oracle and perturbed snapshots for every task in a corpus.
    Snapshots {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        perturbations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Error(Error),
    Validity(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::Io { path: parent.display().to_string(), source: e })?;
    }
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
    Ok(())
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate { manifest, seed, out, jobs } => {
            let manifest = Manifest::load(&manifest)?;
            let options = GenerationOptions { jobs, ..GenerationOptions::default() };
            let (dir, report) = generate_corpus(&manifest, seed, &out, &options)?;
            print!("{}", report.tier_summary_tsv());
            println!("wrote {} tasks to {} in {} ms", report.accepted, dir.display(), report.wall_time_ms);
        }
        Command::Verify { task_dir, snapshot, out } => {
            let g = harness::verify_task(&task_dir, &snapshot, &out)?;
            let b = &g.breakdown;
            println!("R={} c={} o={} t={} gates={:?} canary={}", b.r, b.c, b.o, b.t, b.gates_fired, b.canary_triggered);
        }
        Command::Replay { task_dir, plan, out } => {
            harness::replay_task(&task_dir, &plan, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Validity { corpus, out, jobs, perturbations, seed } => {
            let options = ValidityOptions { jobs, perturbations, perturbation_seed: seed };
            let report = harness::run_validity(&corpus, &options)?;
            let out = out.unwrap_or(corpus);
            report.write(&out)?;
            let s = &report.summary;
            println!(
                "tasks={} noop_zero={} oracle_full={} canary={} perturbations={} perturbation_canary={}",
                s.tasks_total, s.noop_zero_count, s.oracle_full_count, s.canary_count, s.perturbations, s.perturbation_canary_count
            );
            for line in &s.not_run {
                println!("{line}");
            }
            if !report.passed() {
                return Err(Failure::Validity("validity checks failed".into()));
            }
        }
        Command::CanaryScan { corpus, snapshots, out } => {
            let scan = harness::canary_scan(&corpus, &snapshots)?;
            if let Some(out) = out {
                write(&out.join("canary_scan.tsv"), &scan.to_tsv())?;
            }
            println!("snapshots={} flagged={}", scan.rows.len(), scan.flagged);
            if scan.flagged > 0 {
                return Err(Failure::Validity(format!("{} snapshot(s) triggered the canary", scan.flagged)));
            }
        }
        Command::Snapshots { corpus, out, perturbations, seed } => {
            let tasks = harness::load_corpus(&corpus)?;
            for task in &tasks {
                let name = &task.metadata.name;
                write(&out.join(format!("{name}__noop.json")), &harness::noop_terminal(task)?.to_canonical_json())?;
                write(&out.join(format!("{name}__oracle.json")), &harness::oracle_terminal(task)?.to_canonical_json())?;
            }
            for (_, label, t) in harness::perturbation_snapshots(&tasks, perturbations, seed)? {
                write(&out.join(format!("{label}.json")), &t.to_canonical_json())?;
            }
            println!("wrote {} snapshots to {}", 2 * tasks.len() + perturbations, out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Validity(msg)) => {
            eprintln!("validity failure: {msg}");
            ExitCode::from(EXIT_VALIDITY)
        }
    }
}
