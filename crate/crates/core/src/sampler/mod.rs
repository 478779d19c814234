//! Recipe-driven sampling, cheap pre-solver screening and the rejection loop.
//!
//! Every attempt draws from its own stream seeded by
//! `derive_seed(task_seed, [pattern, tier], attempt)`, so accepted tasks do not
//! depend on scheduling or on how many attempts other tasks needed.

mod draw;
mod generate;
mod recipe;
mod screen;

pub use draw::sample_parameters;
pub use generate::{
    attempt_seed, generate_corpus, generate_task, generate_task_with, GeneratedTask, GenerationOptions,
    GenerationReport, Manifest, ManifestEntry, PlannedTask, TaskSummary, RESAMPLE_CAP,
};
pub use recipe::{BomStructure, DifficultyRecipe};
pub use screen::{pre_solver_screen, ScreenResult};
