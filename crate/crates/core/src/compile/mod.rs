//! Projection of a solved specification into the four task artifacts.

mod bundle;
mod config;
mod instruction;
mod oracle;
mod seed;

pub use bundle::{compile_bundle, load_task_dir, write_task_dir, LoadedTask, TaskBundle, TaskMetadata, SOLVE_SH, TEST_SH};
pub use config::{emit_verifier_config, instantiate_rules};
pub use instruction::{clause_tags, money, render_instruction};
pub use oracle::emit_oracle_plan;
pub use seed::emit_environment_seed;
