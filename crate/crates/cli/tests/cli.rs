use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use taskforge::compile::write_task_dir;
use taskforge::harness::fault_injection;
use taskforge::model::{PatternId, Tier};
use taskforge::sampler::generate_task;

const MANIFEST: &str = "[[task]]\npattern = \"routine_replenishment\"\ntier = \"easy\"\ncount = 1\n\
                        [[task]]\npattern = \"screened_intake_billing\"\ntier = \"medium\"\ncount = 1\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_taskforge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn generate(root: &Path, name: &str) -> PathBuf {
    let manifest = root.join("manifest.toml");
    fs::write(&manifest, MANIFEST).unwrap();
    let out = root.join(name);
    let o = run(&["generate", "--manifest", p(&manifest), "--seed", "9", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["verify", "--task-dir", "x"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn malformed_inputs_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "[[task]]\npattern = 3\n").unwrap();
    assert_eq!(code(&run(&["generate", "--manifest", p(&bad), "--out", p(&tmp.path().join("c"))])), 2);
    let empty = tmp.path().join("empty.toml");
    fs::write(&empty, "").unwrap();
    assert_eq!(code(&run(&["generate", "--manifest", p(&empty), "--out", p(&tmp.path().join("c"))])), 2);
    assert_eq!(code(&run(&["validity", "--corpus", p(&tmp.path().join("missing"))])), 2);

    let corpus = generate(tmp.path(), "corpus");
    let task = corpus.join("s001-easy-routine_replenishment");
    let snap = tmp.path().join("truncated.json");
    fs::write(&snap, "{\"horizon_days\": 3").unwrap();
    let o = run(&["verify", "--task-dir", p(&task), "--snapshot", p(&snap), "--out", p(&tmp.path().join("v"))]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn generate_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let a = generate(tmp.path(), "a");
    let b = generate(tmp.path(), "b");
    let (ta, tb) = (tree(&a), tree(&b));
    assert!(ta.keys().any(|k| k.ends_with("tests/verifier_config.json")));
    assert_eq!(ta, tb);
}

#[test]
fn replay_verify_and_validity_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = generate(tmp.path(), "corpus");
    let task = corpus.join("s002-medium-screened_intake_billing");
    let terminal = tmp.path().join("terminal.json");
    let o = run(&["replay", "--task-dir", p(&task), "--plan", p(&task.join("solution/optimal_plan.json")), "--out", p(&terminal)]);
    assert_eq!(code(&o), 0);
    let out = tmp.path().join("verify");
    let o = run(&["verify", "--task-dir", p(&task), "--snapshot", p(&terminal), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("R=100 "));
    assert!(out.join("rule_results.tsv").is_file());
    let reward: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("reward.json")).unwrap()).unwrap();
    assert_eq!(reward["R"], 100.0);

    let report = tmp.path().join("report");
    let o = run(&["validity", "--corpus", p(&corpus), "--out", p(&report), "--perturbations", "20", "--jobs", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("tasks=2 noop_zero=2 oracle_full=2 canary=0"));
    assert!(stdout.contains("llm_consistency_judge: not run"));
    assert!(report.join("validity.tsv").is_file() && report.join("validity_summary.json").is_file());

    let snaps = tmp.path().join("snaps");
    assert_eq!(code(&run(&["snapshots", "--corpus", p(&corpus), "--out", p(&snaps), "--perturbations", "6"])), 0);
    assert_eq!(fs::read_dir(&snaps).unwrap().count(), 2 * 2 + 6);
    let o = run(&["canary-scan", "--corpus", p(&corpus), "--snapshots", p(&snaps), "--out", p(&report)]);
    assert_eq!(code(&o), 0);
    assert!(report.join("canary_scan.tsv").is_file());
}

#[test]
fn task_scripts_drive_the_binary() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = generate(tmp.path(), "corpus");
    let task = corpus.join("s001-easy-routine_replenishment");
    let bin_dir = Path::new(env!("CARGO_BIN_EXE_taskforge")).parent().unwrap();
    let path = format!("{}:{}", bin_dir.display(), std::env::var("PATH").unwrap_or_default());
    let solve = Command::new("bash").arg(task.join("solution/solve.sh")).env("PATH", &path).output().unwrap();
    assert!(solve.status.success(), "{}", String::from_utf8_lossy(&solve.stderr));
    let test = Command::new("bash").arg(task.join("tests/test.sh")).env("PATH", &path).output().unwrap();
    assert!(test.status.success(), "{}", String::from_utf8_lossy(&test.stderr));
    let reward = fs::read_to_string(task.join("logs/verifier/reward.json")).unwrap();
    assert!(reward.contains("\"R\": 100"), "{reward}");
}

#[test]
fn canary_flag_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    let snaps = tmp.path().join("snaps");
    fs::create_dir_all(&snaps).unwrap();
    let fixture = (0..40)
        .find_map(|seed| fault_injection(&generate_task(PatternId::Replenishment, Tier::Easy, seed).unwrap()).unwrap())
        .unwrap();
    write_task_dir(&fixture.bundle, &corpus).unwrap();
    fs::write(snaps.join(format!("{}__exploit.json", fixture.bundle.task_name)), fixture.exploit.to_canonical_json()).unwrap();
    let o = run(&["canary-scan", "--corpus", p(&corpus), "--snapshots", p(&snaps)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("flagged=1"));

    fs::write(snaps.join("nobody__x.json"), fixture.exploit.to_canonical_json()).unwrap();
    assert_eq!(code(&run(&["canary-scan", "--corpus", p(&corpus), "--snapshots", p(&snaps)])), 2);
}
