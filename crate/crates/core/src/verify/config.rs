//! Instantiated grading configuration for one task.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BomSpec, InvoicingPolicy, MarginPolicy, ObjectiveType, VendorOffer, WorkcenterSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Constraint,
    Traceability,
}

impl Dimension {
    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Constraint => "constraint",
            Dimension::Traceability => "traceability",
        }
    }
}

macro_rules! rule_kinds {
    ($($variant:ident => $name:literal, $dim:ident;)*) => {
        /// The implemented rule catalog.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum RuleKind {
            $($variant,)*
        }

        impl RuleKind {
            pub const ALL: &'static [RuleKind] = &[$(RuleKind::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(RuleKind::$variant => $name,)*
                }
            }

            pub fn dimension(self) -> Dimension {
                match self {
                    $(RuleKind::$variant => Dimension::$dim,)*
                }
            }
        }
    };
}

rule_kinds! {
    DemandCoverage => "demand_coverage", Constraint;
    DeadlineFulfillment => "deadline_fulfillment", Constraint;
    ListPrice => "list_price", Constraint;
    SaleRevenue => "sale_revenue", Constraint;
    BudgetCompliance => "budget_compliance", Constraint;
    SupplyTimingFeasible => "supply_timing_feasible", Constraint;
    SupplyCoverage => "supply_coverage", Constraint;
    PoPriceTierCompliance => "po_price_tier_compliance", Constraint;
    PoMinQtyCompliance => "po_min_qty_compliance", Constraint;
    PoConsolidationCompliance => "po_consolidation_compliance", Constraint;
    NewSpendMarginPolicy => "new_spend_margin_policy", Constraint;
    RegularInvoiceAmountMatchesPolicy => "regular_invoice_amount_matches_policy", Constraint;
    DownpaymentInvoiceAmountMatchesPolicy => "downpayment_invoice_amount_matches_policy", Constraint;
    RejectedOrderNotInvoiced => "rejected_order_not_invoiced", Constraint;
    PoOriginTraceability => "po_origin_traceability", Traceability;
    MrpOriginTraceability => "mrp_origin_traceability", Traceability;
    AdjacentDataUntouched => "adjacent_data_untouched", Traceability;
    MoScheduleCompliance => "mo_schedule_compliance", Constraint;
    MoComponentFeasibility => "mo_component_feasibility", Constraint;
    AssemblyCapacityCompliance => "assembly_capacity_compliance", Constraint;
    ForbiddenFinishedMoAbsent => "forbidden_finished_mo_absent", Constraint;
    TaskStateTransitionsCompleted => "task_state_transitions_completed", Constraint;
    SeededOrderConfirmed => "seeded_order_confirmed", Constraint;
    SeededOrderCancelled => "seeded_order_cancelled", Constraint;
    RepairStateCompliance => "repair_state_compliance", Constraint;
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownRuleId(s.to_string()))
    }
}

/// Subject used by task-wide rules.
pub const TASK_SUBJECT: &str = "task";

/// `kind:subject`, e.g. `demand_coverage:ORD-01`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleId {
    pub kind: RuleKind,
    pub subject: String,
}

impl RuleId {
    pub fn new(kind: RuleKind, subject: impl Into<String>) -> Self {
        RuleId { kind, subject: subject.into() }
    }

    pub fn task(kind: RuleKind) -> Self {
        RuleId::new(kind, TASK_SUBJECT)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.subject)
    }
}

impl FromStr for RuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, subject) = s.split_once(':').ok_or_else(|| Error::UnknownRuleId(s.to_string()))?;
        if subject.is_empty() {
            return Err(Error::UnknownRuleId(s.to_string()));
        }
        Ok(RuleId { kind: kind.parse().map_err(|_| Error::UnknownRuleId(s.to_string()))?, subject: subject.into() })
    }
}

impl Serialize for RuleId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RuleId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSpec {
    /// Kept as text so a config naming an unimplemented rule still parses.
    pub rule_id: String,
    pub dimension: Dimension,
}

/// Ground truth for one customer order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderTerm {
    pub order_id: String,
    pub customer_id: String,
    pub product_id: String,
    pub qty: i64,
    pub deadline_day: i64,
    pub unit_list_price_cents: i64,
    pub budget_cents: i64,
    pub seeded: bool,
    pub screened: bool,
    pub accepted: bool,
}

impl OrderTerm {
    pub fn value_cents(&self) -> i64 {
        self.qty * self.unit_list_price_cents
    }
}

/// Zero-penalty tolerance and decay rate for one metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decay {
    pub tau: f64,
    /// `tau` is a fraction of the certified optimum rather than an absolute amount.
    pub tau_relative: bool,
    pub k: f64,
}

impl Decay {
    pub fn for_objective(objective: ObjectiveType) -> Option<Decay> {
        match objective {
            ObjectiveType::MinNewSpend => Some(Decay::SPEND),
            ObjectiveType::VendorConsolidation => Some(Decay { tau: 0.0, tau_relative: false, k: 2.0 }),
            ObjectiveType::CapacityPreservation => Some(Decay { tau: 0.0001, tau_relative: true, k: 5.0 }),
            ObjectiveType::RepairPlan => Some(Decay { tau: 0.0, tau_relative: false, k: 2.0 }),
            ObjectiveType::ConstraintOnly => None,
        }
    }

    /// 0.25 percent of the optimum.
    pub const SPEND: Decay = Decay { tau: 0.0025, tau_relative: true, k: 5.0 };

    pub fn tolerance(&self, e: i64) -> f64 {
        if self.tau_relative {
            self.tau * e as f64
        } else {
            self.tau
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTerms {
    pub objective_type: ObjectiveType,
    pub certified_optimum: i64,
    pub secondary_optimum: Option<i64>,
    pub primary_decay: Option<Decay>,
    pub secondary_decay: Option<Decay>,
    pub band_weight: f64,
}

impl ObjectiveTerms {
    pub fn new(objective_type: ObjectiveType, e: i64, secondary: Option<i64>) -> Self {
        ObjectiveTerms {
            objective_type,
            certified_optimum: e,
            secondary_optimum: secondary,
            primary_decay: Decay::for_objective(objective_type),
            secondary_decay: secondary.map(|_| Decay::SPEND),
            band_weight: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineBuildTerm {
    pub bom_id: String,
    pub workcenter_id: Option<String>,
    pub qty: i64,
}

/// The seeded plan of a repair task, as ids in the seeded environment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairTerms {
    pub withdrawn_vendor_id: String,
    pub baseline_purchase_ids: Vec<u32>,
    pub baseline_build_ids: Vec<u32>,
    pub baseline_offer_qty: BTreeMap<String, i64>,
    pub baseline_builds: Vec<BaselineBuildTerm>,
    pub baseline_allocations: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum GateSpec {
    /// Fires when sales, purchase, manufacturing and invoice tables still hash to the seed.
    PartialAcceptance { seed_records_digest: String },
    /// Fires when every seeded baseline order is still confirmed.
    RepairState,
}

impl GateSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GateSpec::PartialAcceptance { .. } => "partial_acceptance",
            GateSpec::RepairState => "repair_state",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifierConfig {
    pub task_name: String,
    pub rules: Vec<RuleSpec>,
    pub objective: ObjectiveTerms,
    pub horizon_days: i64,
    pub orders: Vec<OrderTerm>,
    /// Authoritative tier table; PO lines are re-priced from here.
    pub offers: Vec<VendorOffer>,
    pub boms: Vec<BomSpec>,
    pub workcenters: Vec<WorkcenterSpec>,
    pub stock: BTreeMap<String, i64>,
    pub invoicing_policy: InvoicingPolicy,
    pub margin_policy: Option<MarginPolicy>,
    pub repair: Option<RepairTerms>,
    pub gates: Vec<GateSpec>,
    pub adjacent_digest: String,
}

impl VerifierConfig {
    pub fn offer(&self, offer_id: &str) -> Option<&VendorOffer> {
        self.offers.iter().find(|o| o.offer_id == offer_id)
    }

    pub fn order(&self, order_id: &str) -> Option<&OrderTerm> {
        self.orders.iter().find(|o| o.order_id == order_id)
    }

    pub fn bom(&self, bom_id: &str) -> Option<&BomSpec> {
        self.boms.iter().find(|b| b.bom_id == bom_id)
    }

    pub fn stock(&self, product_id: &str) -> i64 {
        self.stock.get(product_id).copied().unwrap_or(0)
    }

    pub fn is_screened(&self) -> bool {
        self.orders.iter().any(|o| o.screened)
    }

    /// The product plus everything any BOM needs to build it.
    pub fn supply_closure(&self, product_id: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![product_id.to_string()];
        while let Some(p) = stack.pop() {
            if out.insert(p.clone()) {
                for b in self.boms.iter().filter(|b| b.output_product_id == p) {
                    stack.extend(b.components.iter().map(|c| c.product_id.clone()));
                }
            }
        }
        out
    }

    pub fn parsed_rules(&self) -> Result<Vec<RuleId>> {
        let mut ids = self.rules.iter().map(|r| r.rule_id.parse()).collect::<Result<Vec<RuleId>>>()?;
        ids.sort_by_key(|id| id.to_string());
        Ok(ids)
    }
}
