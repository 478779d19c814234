//! Parametric constraint programs for procurement and manufacturing workflows.

mod build;
pub mod fixtures;
mod params;
mod program;

pub use build::{build_program, VarIndex};
pub use params::*;
pub use program::*;
