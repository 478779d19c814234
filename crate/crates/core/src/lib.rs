//! Generation and verification of ERP planning tasks from a single constraint program.

pub mod compile;
pub mod erp;
pub mod error;
pub mod harness;
pub mod model;
pub mod rng;
pub mod sampler;
pub mod scalar;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type RewardBreakdownF64 = verify::RewardBreakdown<f64>;
pub type RewardBreakdownF32 = verify::RewardBreakdown<f32>;
pub type GradeF64 = verify::Grade<f64>;
pub type GradeF32 = verify::Grade<f32>;
pub type OptimalityScoreF64 = verify::OptimalityScore<f64>;
pub type OptimalityScoreF32 = verify::OptimalityScore<f32>;
