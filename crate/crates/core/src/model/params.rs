//! Sampled scenario parameters for one task instance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Easy,
    Medium,
    Hard,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Easy, Tier::Medium, Tier::Hard];

    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Easy => "easy",
            Tier::Medium => "medium",
            Tier::Hard => "hard",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "easy" => Ok(Tier::Easy),
            "medium" => Ok(Tier::Medium),
            "hard" => Ok(Tier::Hard),
            other => Err(Error::MalformedManifest(format!("unknown tier `{other}`"))),
        }
    }
}

/// The implemented workflow patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PatternId {
    /// Buy-only replenishment under stock, MOQ, capacity, price and lead-time limits.
    #[serde(rename = "routine_replenishment")]
    Replenishment,
    /// Draft backlog screened by intake rules, then sourced and invoiced.
    #[serde(rename = "screened_intake_billing")]
    ScreenedIntake,
    /// Finished goods either bought or assembled from one BOM.
    #[serde(rename = "single_bom_make_or_buy")]
    MakeOrBuy,
    /// Final product built from an intermediate subassembly on qualified workcenters.
    #[serde(rename = "two_stage_build")]
    TwoStageBuild,
    /// A supplier withdrew; repair the seeded purchase plan.
    #[serde(rename = "supplier_cancellation_rescue")]
    SupplierRescue,
}

impl PatternId {
    pub const ALL: [PatternId; 5] = [
        PatternId::Replenishment,
        PatternId::ScreenedIntake,
        PatternId::MakeOrBuy,
        PatternId::TwoStageBuild,
        PatternId::SupplierRescue,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternId::Replenishment => "routine_replenishment",
            PatternId::ScreenedIntake => "screened_intake_billing",
            PatternId::MakeOrBuy => "single_bom_make_or_buy",
            PatternId::TwoStageBuild => "two_stage_build",
            PatternId::SupplierRescue => "supplier_cancellation_rescue",
        }
    }

    /// Objectives the pattern's constraint family can carry.
    pub fn supported_objectives(self) -> &'static [ObjectiveType] {
        use ObjectiveType::*;
        match self {
            PatternId::Replenishment => &[ConstraintOnly, MinNewSpend, VendorConsolidation],
            PatternId::ScreenedIntake => &[ConstraintOnly, MinNewSpend, VendorConsolidation],
            PatternId::MakeOrBuy => &[MinNewSpend, CapacityPreservation],
            PatternId::TwoStageBuild => &[MinNewSpend, CapacityPreservation],
            PatternId::SupplierRescue => &[RepairPlan],
        }
    }

    pub fn has_manufacturing(self) -> bool {
        matches!(self, PatternId::MakeOrBuy | PatternId::TwoStageBuild)
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PatternId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::UnknownPattern(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveType {
    MinNewSpend,
    VendorConsolidation,
    CapacityPreservation,
    RepairPlan,
    ConstraintOnly,
}

impl ObjectiveType {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveType::MinNewSpend => "min_new_spend",
            ObjectiveType::VendorConsolidation => "vendor_consolidation",
            ObjectiveType::CapacityPreservation => "capacity_preservation",
            ObjectiveType::RepairPlan => "repair_plan",
            ObjectiveType::ConstraintOnly => "constraint_only",
        }
    }

    /// Whether the objective carries a spend secondary.
    pub fn has_spend_secondary(self) -> bool {
        matches!(
            self,
            ObjectiveType::VendorConsolidation
                | ObjectiveType::CapacityPreservation
                | ObjectiveType::RepairPlan
        )
    }
}

impl fmt::Display for ObjectiveType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductRole {
    /// Sold to customers.
    Finished,
    /// Built by one BOM and consumed by another.
    Intermediate,
    /// Purchased and consumed by assembly.
    Component,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSpec {
    pub product_id: String,
    pub name: String,
    pub role: ProductRole,
    pub standard_price_cents: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartySpec {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomerDemand {
    pub order_id: String,
    pub customer_id: String,
    pub product_id: String,
    pub quantity: i64,
    pub deadline_day: i64,
    pub unit_list_price_cents: i64,
    /// Ceiling on the order's total sale amount.
    pub budget_cents: i64,
    pub is_seeded_order: bool,
    pub must_screen: bool,
}

impl CustomerDemand {
    pub fn value_cents(&self) -> i64 {
        self.quantity * self.unit_list_price_cents
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VendorOffer {
    pub offer_id: String,
    pub vendor_id: String,
    pub product_id: String,
    pub tier_min_qty: i64,
    pub tier_max_qty: i64,
    pub unit_price_cents: i64,
    pub lead_time_days: i64,
    /// Offer no longer honoured by the vendor (disruption).
    #[serde(default)]
    pub withdrawn: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BomComponent {
    pub product_id: String,
    pub qty_per_unit: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BomSpec {
    pub bom_id: String,
    pub output_product_id: String,
    pub components: Vec<BomComponent>,
    pub route_workcenter_ids: Vec<String>,
    pub minutes_per_unit: i64,
    pub stage_depth: u8,
    /// Day production runs for this BOM start; components must be on hand by then.
    pub build_start_day: i64,
    pub build_days: i64,
    /// Conversion cost per assembled unit, counted as new spend.
    pub conversion_cost_cents: i64,
}

impl BomSpec {
    pub fn finish_day(&self) -> i64 {
        self.build_start_day + self.build_days
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkcenterSpec {
    pub workcenter_id: String,
    pub name: String,
    pub capacity_minutes: i64,
    pub qualified_bom_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreeningPolicy {
    pub min_order_value_cents: i64,
    pub blocked_customer_ids: Vec<String>,
}

impl ScreeningPolicy {
    pub fn accepts(&self, order: &CustomerDemand) -> bool {
        order.value_cents() >= self.min_order_value_cents
            && !self.blocked_customer_ids.contains(&order.customer_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InvoicingPolicy {
    None,
    Regular,
    FixedDownpayment { amount_cents: i64 },
    /// Deposit as a fraction of order value, in basis points.
    PercentDownpayment { basis_points: i64 },
}

impl InvoicingPolicy {
    pub fn invoices(self) -> bool {
        !matches!(self, InvoicingPolicy::None)
    }

    pub fn has_downpayment(self) -> bool {
        matches!(
            self,
            InvoicingPolicy::FixedDownpayment { .. } | InvoicingPolicy::PercentDownpayment { .. }
        )
    }

    /// Downpayment owed on an order of the given value; percentages round half up to the cent.
    pub fn downpayment_cents(self, order_value_cents: i64) -> i64 {
        match self {
            InvoicingPolicy::FixedDownpayment { amount_cents } => amount_cents.min(order_value_cents),
            InvoicingPolicy::PercentDownpayment { basis_points } => {
                (order_value_cents as i128 * basis_points as i128 + 5_000).div_euclid(10_000) as i64
            }
            _ => 0,
        }
    }

    pub fn regular_cents(self, order_value_cents: i64) -> i64 {
        order_value_cents - self.downpayment_cents(order_value_cents)
    }
}

/// New spend may not exceed `(1 - margin)` of retained order revenue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginPolicy {
    pub min_margin_basis_points: i64,
}

impl MarginPolicy {
    pub fn spend_cap_cents(self, revenue_cents: i64) -> i64 {
        (revenue_cents as i128 * (10_000 - self.min_margin_basis_points) as i128).div_euclid(10_000)
            as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineLine {
    pub offer_id: String,
    pub qty: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselinePurchase {
    pub vendor_id: String,
    pub lines: Vec<BaselineLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineBuild {
    pub bom_id: String,
    pub workcenter_id: Option<String>,
    pub qty: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineAllocation {
    pub order_id: String,
    pub qty: i64,
}

/// The seeded plan a repair task starts from, after the scripted disruption.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairBaseline {
    pub withdrawn_vendor_id: String,
    pub purchases: Vec<BaselinePurchase>,
    pub builds: Vec<BaselineBuild>,
    pub allocations: Vec<BaselineAllocation>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacentCounts {
    pub customers: u32,
    pub vendors: u32,
    pub products: u32,
    pub documents: u32,
}

impl AdjacentCounts {
    pub fn total(&self) -> u32 {
        self.customers + self.vendors + self.products + self.documents
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterSetting {
    pub pattern_id: PatternId,
    pub difficulty: Tier,
    pub seed: u64,
    pub horizon_days: i64,
    pub product_domain: String,
    pub customers: Vec<PartySpec>,
    pub vendors: Vec<PartySpec>,
    pub products: Vec<ProductSpec>,
    pub demands: Vec<CustomerDemand>,
    pub vendor_offers: Vec<VendorOffer>,
    pub boms: Vec<BomSpec>,
    pub workcenters: Vec<WorkcenterSpec>,
    pub initial_stock: BTreeMap<String, i64>,
    pub screening_policy: Option<ScreeningPolicy>,
    pub invoicing_policy: InvoicingPolicy,
    pub margin_policy: Option<MarginPolicy>,
    pub repair_baseline: Option<RepairBaseline>,
    pub objective_type: ObjectiveType,
    pub adjacent_record_counts: AdjacentCounts,
}

impl ParameterSetting {
    pub fn stock(&self, product_id: &str) -> i64 {
        self.initial_stock.get(product_id).copied().unwrap_or(0)
    }

    pub fn product(&self, product_id: &str) -> Option<&ProductSpec> {
        self.products.iter().find(|p| p.product_id == product_id)
    }

    pub fn offer(&self, offer_id: &str) -> Option<&VendorOffer> {
        self.vendor_offers.iter().find(|o| o.offer_id == offer_id)
    }

    pub fn bom(&self, bom_id: &str) -> Option<&BomSpec> {
        self.boms.iter().find(|b| b.bom_id == bom_id)
    }

    pub fn has_screening(&self) -> bool {
        self.demands.iter().any(|d| d.must_screen)
    }

    /// Screening verdict; orders not subject to screening are always accepted.
    pub fn is_accepted(&self, order: &CustomerDemand) -> bool {
        if !order.must_screen {
            return true;
        }
        self.screening_policy.as_ref().is_none_or(|p| p.accepts(order))
    }

    pub fn accepted_demands(&self) -> impl Iterator<Item = &CustomerDemand> {
        self.demands.iter().filter(|d| self.is_accepted(d))
    }

    pub fn accepted_revenue_cents(&self) -> i64 {
        self.accepted_demands().map(CustomerDemand::value_cents).sum()
    }

    /// Products that some BOM (transitively) needs to build `product_id`, plus itself.
    pub fn supply_closure(&self, product_id: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![product_id.to_string()];
        while let Some(p) = stack.pop() {
            if !out.insert(p.clone()) {
                continue;
            }
            for bom in self.boms.iter().filter(|b| b.output_product_id == p) {
                for c in &bom.components {
                    stack.push(c.product_id.clone());
                }
            }
        }
        out
    }

    /// Checks the type-level invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InconsistentParameters(msg));
        if self.horizon_days < 1 {
            return bad(format!("horizon_days {} < 1", self.horizon_days));
        }
        let products: BTreeSet<&str> = self.products.iter().map(|p| p.product_id.as_str()).collect();
        let vendors: BTreeSet<&str> = self.vendors.iter().map(|v| v.id.as_str()).collect();
        let customers: BTreeSet<&str> = self.customers.iter().map(|c| c.id.as_str()).collect();
        let boms: BTreeSet<&str> = self.boms.iter().map(|b| b.bom_id.as_str()).collect();
        let wcs: BTreeSet<&str> = self.workcenters.iter().map(|w| w.workcenter_id.as_str()).collect();
        if products.len() != self.products.len() || vendors.len() != self.vendors.len() {
            return bad("duplicate product or vendor id".into());
        }
        let mut order_ids = BTreeSet::new();
        for d in &self.demands {
            if !order_ids.insert(d.order_id.as_str()) {
                return bad(format!("duplicate order id {}", d.order_id));
            }
            if !products.contains(d.product_id.as_str()) {
                return bad(format!("order {} references unknown product {}", d.order_id, d.product_id));
            }
            if !customers.contains(d.customer_id.as_str()) {
                return bad(format!("order {} references unknown customer {}", d.order_id, d.customer_id));
            }
            if d.quantity < 1 {
                return bad(format!("order {} quantity {} < 1", d.order_id, d.quantity));
            }
            if d.deadline_day < 0 || d.deadline_day > self.horizon_days {
                return bad(format!("order {} deadline {} outside horizon", d.order_id, d.deadline_day));
            }
            if d.unit_list_price_cents < 0 || d.budget_cents < 0 {
                return bad(format!("order {} has negative money", d.order_id));
            }
        }
        let mut offer_ids = BTreeSet::new();
        for o in &self.vendor_offers {
            if !offer_ids.insert(o.offer_id.as_str()) {
                return bad(format!("duplicate offer id {}", o.offer_id));
            }
            if !vendors.contains(o.vendor_id.as_str()) {
                return bad(format!("offer {} references unknown vendor {}", o.offer_id, o.vendor_id));
            }
            if !products.contains(o.product_id.as_str()) {
                return bad(format!("offer {} references unknown product {}", o.offer_id, o.product_id));
            }
            if o.tier_min_qty < 0 || o.tier_min_qty > o.tier_max_qty {
                return bad(format!("offer {} has tier [{}, {}]", o.offer_id, o.tier_min_qty, o.tier_max_qty));
            }
            if o.unit_price_cents < 1 || o.lead_time_days < 0 {
                return bad(format!("offer {} has invalid price or lead time", o.offer_id));
            }
        }
        for b in &self.boms {
            if b.components.is_empty() {
                return bad(format!("bom {} has no components", b.bom_id));
            }
            if !products.contains(b.output_product_id.as_str()) {
                return bad(format!("bom {} outputs unknown product {}", b.bom_id, b.output_product_id));
            }
            for c in &b.components {
                if !products.contains(c.product_id.as_str()) {
                    return bad(format!("bom {} references absent product {}", b.bom_id, c.product_id));
                }
                if c.qty_per_unit < 1 {
                    return bad(format!("bom {} component qty < 1", b.bom_id));
                }
            }
            for w in &b.route_workcenter_ids {
                if !wcs.contains(w.as_str()) {
                    return bad(format!("bom {} routes to unknown workcenter {}", b.bom_id, w));
                }
            }
            if b.minutes_per_unit < 0 || b.build_days < 0 || b.build_start_day < 0 {
                return bad(format!("bom {} has negative timing", b.bom_id));
            }
            if !(1..=2).contains(&b.stage_depth) {
                return bad(format!("bom {} stage depth {} not in 1..=2", b.bom_id, b.stage_depth));
            }
        }
        for w in &self.workcenters {
            if w.capacity_minutes < 0 {
                return bad(format!("workcenter {} capacity < 0", w.workcenter_id));
            }
            for b in &w.qualified_bom_ids {
                if !boms.contains(b.as_str()) {
                    return bad(format!("workcenter {} qualifies unknown bom {}", w.workcenter_id, b));
                }
            }
        }
        for (p, qty) in &self.initial_stock {
            if !products.contains(p.as_str()) || *qty < 0 {
                return bad(format!("invalid stock entry {p}: {qty}"));
            }
        }
        // no cycles: every BOM output must not be in the closure of its own components
        for b in &self.boms {
            for c in &b.components {
                if self.supply_closure(&c.product_id).contains(&b.output_product_id) {
                    return bad(format!("bom {} is cyclic", b.bom_id));
                }
            }
        }
        let is_repair = self.objective_type == ObjectiveType::RepairPlan;
        if is_repair != self.repair_baseline.is_some() {
            return bad("repair_baseline must be present iff objective is repair_plan".into());
        }
        if let Some(rb) = &self.repair_baseline {
            if !vendors.contains(rb.withdrawn_vendor_id.as_str()) {
                return bad(format!("withdrawn vendor {} unknown", rb.withdrawn_vendor_id));
            }
            for po in &rb.purchases {
                for l in &po.lines {
                    match self.offer(&l.offer_id) {
                        Some(o) if o.vendor_id == po.vendor_id => {}
                        _ => return bad(format!("baseline line references bad offer {}", l.offer_id)),
                    }
                }
            }
            for b in &rb.builds {
                if !boms.contains(b.bom_id.as_str()) {
                    return bad(format!("baseline build references unknown bom {}", b.bom_id));
                }
            }
            for a in &rb.allocations {
                if !order_ids.contains(a.order_id.as_str()) {
                    return bad(format!("baseline allocation references unknown order {}", a.order_id));
                }
            }
        }
        Ok(())
    }
}
