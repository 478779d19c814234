//! Difficulty recipes, loaded from the bundled `config/recipes.toml`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ObjectiveType, PatternId, Tier};

const RECIPES_TOML: &str = include_str!("../../config/recipes.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BomStructure {
    None,
    Single,
    MultiStage,
}

impl BomStructure {
    /// Structure a pattern builds; fixed by the pattern, not the tier.
    pub fn of_pattern(pattern: PatternId) -> BomStructure {
        match pattern {
            PatternId::MakeOrBuy => BomStructure::Single,
            PatternId::TwoStageBuild => BomStructure::MultiStage,
            _ => BomStructure::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifficultyRecipe {
    #[serde(skip_deserializing, default = "default_tier")]
    pub tier: Tier,
    pub customer_count: [i64; 2],
    pub demand: [i64; 2],
    pub stock_ratio: [f64; 2],
    pub vendor_capacity_ratio: [f64; 2],
    pub tightness: [f64; 2],
    /// The tier's nominal structures; manufacturing patterns use their own.
    pub bom_structure: Vec<BomStructure>,
    /// Allowed workcenter counts; one is picked per sample.
    pub workcenter_count: Vec<i64>,
    pub objective_pool: Vec<ObjectiveType>,
    pub deadline: [i64; 2],
    pub vendor_count: [i64; 2],
    pub lead_time: [i64; 2],
    pub price_noise_sigma: f64,
    pub finished_products: [i64; 2],
    /// Chance that a vendor quotes a given purchasable product.
    pub offer_probability: f64,
    pub adjacent_per_table: [i64; 2],
}

fn default_tier() -> Tier {
    Tier::Easy
}

impl DifficultyRecipe {
    /// The bundled recipe for `tier`.
    pub fn for_tier(tier: Tier) -> DifficultyRecipe {
        let all = Self::parse_all(RECIPES_TOML).expect("bundled recipes are valid");
        all[&tier].clone()
    }

    /// Parses a recipe table keyed by tier name and validates each recipe.
    pub fn parse_all(text: &str) -> Result<BTreeMap<Tier, DifficultyRecipe>> {
        let raw: BTreeMap<String, DifficultyRecipe> =
            toml::from_str(text).map_err(|e| Error::InconsistentParameters(format!("recipes: {e}")))?;
        let mut out = BTreeMap::new();
        for (name, mut recipe) in raw {
            recipe.tier = name.parse().map_err(|_| Error::InconsistentParameters(format!("unknown tier `{name}`")))?;
            recipe.validate()?;
            out.insert(recipe.tier, recipe);
        }
        for tier in Tier::ALL {
            if !out.contains_key(&tier) {
                return Err(Error::InconsistentParameters(format!("missing recipe for {tier}")));
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InconsistentParameters(format!("{} recipe: {what}", self.tier)));
        let int_ranges = [
            ("customer_count", self.customer_count),
            ("demand", self.demand),
            ("deadline", self.deadline),
            ("vendor_count", self.vendor_count),
            ("lead_time", self.lead_time),
            ("finished_products", self.finished_products),
            ("adjacent_per_table", self.adjacent_per_table),
        ];
        for (name, [lo, hi]) in int_ranges {
            if lo > hi || lo < 0 {
                return bad(&format!("{name} range [{lo}, {hi}]"));
            }
        }
        if self.customer_count[0] < 1 || self.demand[0] < 1 || self.vendor_count[0] < 1 || self.finished_products[0] < 1 {
            return bad("counts and demand must start at 1");
        }
        let fractions = [
            ("stock_ratio", self.stock_ratio),
            ("vendor_capacity_ratio", self.vendor_capacity_ratio),
            ("tightness", self.tightness),
        ];
        for (name, [lo, hi]) in fractions {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return bad(&format!("{name} range [{lo}, {hi}]"));
            }
        }
        if self.tightness[0] <= 0.0 {
            return bad("tightness must be positive");
        }
        if !(0.0..=1.0).contains(&self.offer_probability) || !(0.0..0.34).contains(&self.price_noise_sigma) {
            return bad("offer_probability or price_noise_sigma out of range");
        }
        if self.workcenter_count.is_empty() || self.workcenter_count.iter().any(|&w| w < 0) {
            return bad("workcenter_count");
        }
        if self.bom_structure.is_empty() {
            return bad("empty bom_structure");
        }
        if self.objective_pool.is_empty() {
            return bad("empty objective pool");
        }
        Ok(())
    }

    /// Objectives this recipe may assign to `pattern`: the pool restricted to what the
    /// pattern supports, else the pattern's optimizing objectives.
    pub fn objective_candidates(&self, pattern: PatternId) -> Vec<ObjectiveType> {
        let supported = pattern.supported_objectives();
        let both: Vec<_> = self.objective_pool.iter().copied().filter(|o| supported.contains(o)).collect();
        if !both.is_empty() {
            return both;
        }
        let optimizing: Vec<_> =
            supported.iter().copied().filter(|o| *o != ObjectiveType::ConstraintOnly).collect();
        if optimizing.is_empty() {
            supported.to_vec()
        } else {
            optimizing
        }
    }
}
