//! Every grading command goes through `verify::grade`; the process-wide call counter proves it.
//! Kept as a single test so no other test in this binary moves the counter.

use std::fs;

use taskforge::compile::write_task_dir;
use taskforge::harness::{self, canary_scan, run_validity, ValidityOptions};
use taskforge::model::{PatternId, Tier};
use taskforge::sampler::generate_task;
use taskforge::verify::grade_calls;

#[test]
fn all_commands_share_one_grading_entry() {
    let corpus = tempfile::tempdir().unwrap();
    let specs = [(PatternId::Replenishment, Tier::Easy), (PatternId::ScreenedIntake, Tier::Medium)];
    for (i, (p, t)) in specs.into_iter().enumerate() {
        let mut b = generate_task(p, t, 5).unwrap();
        b.task_name = format!("t{i}");
        b.metadata.name = b.task_name.clone();
        write_task_dir(&b, corpus.path()).unwrap();
    }
    let tasks = harness::load_corpus(corpus.path()).unwrap();
    let snaps = tempfile::tempdir().unwrap();
    for task in &tasks {
        let name = &task.metadata.name;
        fs::write(snaps.path().join(format!("{name}__oracle.json")), harness::oracle_terminal(task).unwrap().to_canonical_json())
            .unwrap();
        fs::write(snaps.path().join(format!("{name}__noop.json")), harness::noop_terminal(task).unwrap().to_canonical_json())
            .unwrap();
    }

    let before = grade_calls();
    let out = tempfile::tempdir().unwrap();
    let g = harness::verify_task(&tasks[0].dir, &snaps.path().join("t0__oracle.json"), out.path()).unwrap();
    assert_eq!(grade_calls() - before, 1);
    assert!(out.path().join("rule_results.tsv").is_file() && out.path().join("reward.json").is_file());

    let before = grade_calls();
    let options = ValidityOptions { jobs: Some(2), perturbations: 7, perturbation_seed: 3 };
    let report = run_validity(corpus.path(), &options).unwrap();
    assert_eq!(grade_calls() - before, 2 * 2 + 7);
    assert_eq!(report.rows[0].oracle_reward, g.breakdown.r);

    let before = grade_calls();
    let scan = canary_scan(corpus.path(), snaps.path()).unwrap();
    assert_eq!(grade_calls() - before, 4);
    assert_eq!(scan.flagged, 0);
    let oracle_row = scan.rows.iter().find(|r| r.snapshot == "t0__oracle").unwrap();
    assert_eq!(oracle_row.reward, g.breakdown.r);
}
