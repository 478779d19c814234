use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use proptest::prelude::*;

use taskforge::compile::write_task_dir;
use taskforge::model::{build_program, fixtures, ObjectiveType, PatternId, Tier};
use taskforge::rng::SeededRng;
use taskforge::sampler::{
    generate_corpus, generate_task, generate_task_with, pre_solver_screen, sample_parameters, BomStructure,
    DifficultyRecipe, GenerationOptions, Manifest, ScreenResult,
};
use taskforge::solver::{brute_force_solve, Phase, SolveStatus};
use taskforge::Error;

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn recipes_match_the_published_table() {
    let easy = DifficultyRecipe::for_tier(Tier::Easy);
    assert_eq!(easy.customer_count, [4, 4]);
    assert_eq!(easy.demand, [1, 11]);
    assert_eq!(easy.stock_ratio, [0.75, 0.92]);
    assert_eq!(easy.vendor_capacity_ratio, [0.40, 0.90]);
    assert_eq!(easy.tightness, [0.25, 0.25]);
    assert_eq!(easy.bom_structure, vec![BomStructure::None]);
    assert_eq!(easy.workcenter_count, vec![0]);
    assert_eq!(easy.objective_pool, vec![ObjectiveType::ConstraintOnly, ObjectiveType::MinNewSpend]);

    let medium = DifficultyRecipe::for_tier(Tier::Medium);
    assert_eq!(medium.customer_count, [8, 10]);
    assert_eq!(medium.demand, [14, 25]);
    assert_eq!(medium.stock_ratio, [0.38, 0.52]);
    assert_eq!(medium.vendor_capacity_ratio, [0.10, 0.36]);
    assert_eq!(medium.tightness, [0.55, 0.55]);
    assert_eq!(medium.bom_structure, vec![BomStructure::None, BomStructure::Single]);
    assert_eq!(medium.workcenter_count, vec![0, 3]);
    assert_eq!(medium.objective_pool, vec![ObjectiveType::MinNewSpend, ObjectiveType::VendorConsolidation]);

    let hard = DifficultyRecipe::for_tier(Tier::Hard);
    assert_eq!(hard.customer_count, [10, 32]);
    assert_eq!(hard.demand, [15, 31]);
    assert_eq!(hard.stock_ratio, [0.04, 0.42]);
    assert_eq!(hard.vendor_capacity_ratio, [0.07, 0.26]);
    assert_eq!(hard.tightness, [0.62, 0.72]);
    assert_eq!(hard.bom_structure, vec![BomStructure::MultiStage]);
    assert_eq!(hard.workcenter_count, vec![3]);
    assert_eq!(hard.objective_pool, vec![ObjectiveType::CapacityPreservation, ObjectiveType::RepairPlan]);
}

#[test]
fn unstated_fields_use_desk_defaults() {
    let got: Vec<_> = Tier::ALL
        .into_iter()
        .map(|t| {
            let r = DifficultyRecipe::for_tier(t);
            (r.deadline, r.lead_time, r.vendor_count)
        })
        .collect();
    assert_eq!(got, vec![([7, 14], [1, 5], [2, 3]), ([5, 12], [2, 7], [3, 5]), ([3, 10], [2, 9], [4, 8])]);
}

#[test]
fn malformed_recipes_are_rejected() {
    assert!(DifficultyRecipe::parse_all("[easy]\ncustomer_count = [4, 4]\n").is_err());
    let mut r = DifficultyRecipe::for_tier(Tier::Easy);
    r.stock_ratio = [0.9, 0.2];
    assert!(r.validate().is_err());
    let mut r = DifficultyRecipe::for_tier(Tier::Easy);
    r.tightness = [0.25, 1.5];
    assert!(r.validate().is_err());
}

#[test]
fn easy_recipe_always_draws_four_customers() {
    let recipe = DifficultyRecipe::for_tier(Tier::Easy);
    for seed in 0..200 {
        for pattern in PatternId::ALL {
            let p = sample_parameters(&recipe, pattern, &mut SeededRng::new(seed));
            assert_eq!(p.demands.len(), 4);
            assert_eq!(p.customers.len(), 4);
        }
    }
}

#[test]
fn same_seed_same_parameters() {
    let recipe = DifficultyRecipe::for_tier(Tier::Hard);
    for pattern in PatternId::ALL {
        let a = sample_parameters(&recipe, pattern, &mut SeededRng::new(99));
        let b = sample_parameters(&recipe, pattern, &mut SeededRng::new(99));
        let c = sample_parameters(&recipe, pattern, &mut SeededRng::new(100));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.seed, 99);
    }
}

#[test]
fn screen_discards_demand_beyond_supply() {
    let mut p = fixtures::single_order();
    p.demands[0].quantity = 100;
    p.demands[0].budget_cents = 100 * p.demands[0].unit_list_price_cents;
    p.initial_stock.insert("PRD-01".into(), 10);
    p.vendor_offers[0].tier_max_qty = 50;
    assert!(matches!(pre_solver_screen(&p), ScreenResult::Discard(_)));
}

#[test]
fn screen_accepts_demand_within_supply() {
    let mut p = fixtures::single_order();
    p.initial_stock.insert("PRD-01".into(), 4);
    p.vendor_offers[0].tier_max_qty = 20;
    // supply bound 24 against demand 10
    assert_eq!(pre_solver_screen(&p), ScreenResult::Accept);
}

#[test]
fn screen_discards_when_every_offer_is_late() {
    let mut p = fixtures::single_order();
    p.initial_stock.insert("PRD-01".into(), 0);
    p.vendor_offers[0].lead_time_days = 20;
    assert!(matches!(pre_solver_screen(&p), ScreenResult::Discard(_)));
}

#[test]
fn rigged_recipe_exhausts_the_resample_cap() {
    let mut options = GenerationOptions::default();
    let r = options.recipes.get_mut(&Tier::Easy).unwrap();
    r.stock_ratio = [0.0, 0.0];
    r.vendor_capacity_ratio = [0.0, 0.0];
    r.demand = [50, 50];
    r.vendor_count = [1, 1];
    let err = generate_task_with(PatternId::Replenishment, Tier::Easy, 5, "rigged", &options).unwrap_err();
    assert!(matches!(err, Error::ResampleCapExceeded { attempts: 500, .. }), "{err}");
}

#[test]
fn generate_task_is_byte_identical() {
    for (pattern, tier) in [(PatternId::TwoStageBuild, Tier::Medium), (PatternId::SupplierRescue, Tier::Easy)] {
        let a = generate_task(pattern, tier, 11).unwrap();
        let b = generate_task(pattern, tier, 11).unwrap();
        assert_eq!(a, b);
        let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        write_task_dir(&a, da.path()).unwrap();
        write_task_dir(&b, db.path()).unwrap();
        assert_eq!(tree(da.path()), tree(db.path()));
    }
}

#[test]
fn accepted_samples_passed_the_screen_and_certified_the_primary() {
    let options = GenerationOptions::default();
    for pattern in PatternId::ALL {
        for tier in [Tier::Easy, Tier::Medium] {
            let g = generate_task_with(pattern, tier, 3, "t", &options).unwrap();
            assert_eq!(pre_solver_screen(&g.solved.params), ScreenResult::Accept);
            let first = &g.solved.phase_log[0];
            assert!(matches!(first.phase, Phase::Primary | Phase::PrimaryRetry | Phase::Feasibility));
            assert!(g.solved.phase_log.iter().any(|r| r.outcome.status == SolveStatus::Optimal
                && matches!(r.phase, Phase::Primary | Phase::PrimaryRetry | Phase::Feasibility)));
            assert_eq!(g.attempts, 1 + g.pre_solver_discards + g.solver_discards);
        }
    }
}

#[test]
fn certified_optimum_matches_brute_force_on_small_instances() {
    let options = GenerationOptions::default();
    let mut checked = 0;
    for seed in 0..12 {
        for pattern in [PatternId::Replenishment, PatternId::MakeOrBuy, PatternId::SupplierRescue] {
            let g = generate_task_with(pattern, Tier::Easy, seed, "t", &options).unwrap();
            let program = build_program(&g.solved.params).unwrap();
            let mut program = program;
            if g.solved.params.objective_type == ObjectiveType::ConstraintOnly {
                continue;
            }
            // the oracle only needs the primary
            program.objective.secondary_spend_coeffs = None;
            match brute_force_solve(&program) {
                Ok(out) => {
                    assert_eq!(out.status, SolveStatus::Optimal);
                    assert_eq!(out.objective_value, Some(g.solved.primary_optimum), "{pattern} seed {seed}");
                    checked += 1;
                }
                Err(Error::DomainTooLarge(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
    assert!(checked >= 10, "only {checked} instances small enough to enumerate");
}

#[test]
fn manifest_parsing_and_naming() {
    assert!(matches!(Manifest::parse(""), Err(Error::EmptyManifest)));
    assert!(matches!(Manifest::parse("[[task]]\npattern = \"routine_replenishment\"\ntier = \"easy\"\ncount = 0\n"), Err(Error::EmptyManifest)));
    assert!(matches!(Manifest::parse("[[task]]\npattern = \"nope\"\ntier = \"easy\"\ncount = 1\n"), Err(Error::MalformedManifest(_))));
    let m = Manifest::parse("[[task]]\npattern = \"two_stage_build\"\ntier = \"hard\"\ncount = 2\n").unwrap();
    let names: Vec<_> = m.plan(1).into_iter().map(|t| t.name).collect();
    assert_eq!(names, vec!["s001-hard-two_stage_build", "s002-hard-two_stage_build"]);
    let desk = Manifest::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../manifests/desk.toml")).unwrap();
    assert_eq!(desk, Manifest::full_grid(4));
    assert_eq!(desk.total(), 60);
}

#[test]
fn empty_manifest_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let empty = Manifest { entries: vec![] };
    assert!(matches!(generate_corpus(&empty, 1, dir.path(), &GenerationOptions::default()), Err(Error::EmptyManifest)));
}

#[test]
fn small_corpus_report_accounts_for_every_attempt() {
    let dir = tempfile::tempdir().unwrap();
    let m = Manifest::parse(
        "[[task]]\npattern = \"supplier_cancellation_rescue\"\ntier = \"medium\"\ncount = 2\n\
         [[task]]\npattern = \"screened_intake_billing\"\ntier = \"easy\"\ncount = 2\n",
    )
    .unwrap();
    let (root, report) = generate_corpus(&m, 8, dir.path(), &GenerationOptions::default()).unwrap();
    assert_eq!(report.accepted, 4);
    assert_eq!(report.accepted + report.pre_solver_discards + report.solver_discards, report.attempts);
    assert_eq!(report.resamples_per_tier.values().sum::<u64>(), report.attempts - report.accepted);
    let names: Vec<_> = report.tasks.iter().map(|t| t.name.as_str()).collect();
    assert_eq!(
        names,
        vec![
            "s001-medium-supplier_cancellation_rescue",
            "s002-medium-supplier_cancellation_rescue",
            "s003-easy-screened_intake_billing",
            "s004-easy-screened_intake_billing"
        ]
    );
    for f in ["generation_report.tsv", "tier_summary.tsv", "solver_status.tsv"] {
        assert!(root.join(f).is_file(), "{f}");
    }
    let rows = fs::read_to_string(root.join("generation_report.tsv")).unwrap();
    assert_eq!(rows.lines().count(), 5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn draws_stay_inside_recipe_ranges(seed in any::<u64>(), p in 0usize..5, t in 0usize..3) {
        let pattern = PatternId::ALL[p];
        let recipe = DifficultyRecipe::for_tier(Tier::ALL[t]);
        let mut params = sample_parameters(&recipe, pattern, &mut SeededRng::new(seed));
        let n = params.demands.len() as i64;
        prop_assert!(recipe.customer_count[0] <= n && n <= recipe.customer_count[1]);
        for d in &params.demands {
            prop_assert!(recipe.demand[0] <= d.quantity && d.quantity <= recipe.demand[1]);
            prop_assert!(recipe.deadline[0] <= d.deadline_day && d.deadline_day <= recipe.deadline[1]);
            prop_assert!(d.budget_cents >= d.value_cents());
        }
        let m = params.vendors.len() as i64;
        prop_assert!(recipe.vendor_count[0] <= m && m <= recipe.vendor_count[1]);
        for o in &params.vendor_offers {
            prop_assert!(recipe.lead_time[0] <= o.lead_time_days && o.lead_time_days <= recipe.lead_time[1]);
            prop_assert!(1 <= o.tier_min_qty && o.tier_min_qty <= o.tier_max_qty);
            prop_assert!(o.unit_price_cents >= 1);
        }
        prop_assert!(recipe.workcenter_count.contains(&(params.workcenters.len() as i64)) || params.boms.is_empty());
        prop_assert!(recipe.objective_candidates(pattern).contains(&params.objective_type));
        if params.objective_type == ObjectiveType::RepairPlan {
            // repair samples are completed by the baseline construction step
            params.objective_type = ObjectiveType::MinNewSpend;
        }
        prop_assert!(params.validate().is_ok());
    }
}
