//! Verifier configuration projection.

use std::collections::BTreeSet;

use super::seed::emit_environment_seed;
use crate::erp::{adjacent_digest, ErpState};
use crate::error::Result;
use crate::model::{ObjectiveType, ParameterSetting};
use crate::solver::SolvedSpecification;
use crate::verify::{
    BaselineBuildTerm, GateSpec, ObjectiveTerms, OrderTerm, RepairTerms, RuleId, RuleKind, RuleSpec, VerifierConfig,
};

/// The applicable rule subset for a parameter setting, sorted by id.
pub fn instantiate_rules(p: &ParameterSetting) -> Vec<RuleId> {
    use RuleKind::*;
    let mut ids = Vec::new();
    for d in &p.demands {
        let o = d.order_id.as_str();
        if p.is_accepted(d) {
            for k in [DemandCoverage, DeadlineFulfillment, ListPrice, SaleRevenue, BudgetCompliance] {
                ids.push(RuleId::new(k, o));
            }
            if p.invoicing_policy.invoices() {
                ids.push(RuleId::new(RegularInvoiceAmountMatchesPolicy, o));
            }
            if p.invoicing_policy.has_downpayment() {
                ids.push(RuleId::new(DownpaymentInvoiceAmountMatchesPolicy, o));
            }
            if d.is_seeded_order {
                ids.push(RuleId::new(SeededOrderConfirmed, o));
            }
        } else {
            ids.push(RuleId::new(RejectedOrderNotInvoiced, o));
            if d.is_seeded_order {
                ids.push(RuleId::new(SeededOrderCancelled, o));
            }
        }
    }
    let sold: BTreeSet<&str> = p.accepted_demands().map(|d| d.product_id.as_str()).collect();
    for s in sold {
        ids.push(RuleId::new(SupplyCoverage, s));
    }
    let bought: BTreeSet<&str> = p.vendor_offers.iter().map(|o| o.product_id.as_str()).collect();
    for b in &bought {
        for k in [SupplyTimingFeasible, PoPriceTierCompliance, PoMinQtyCompliance, PoOriginTraceability] {
            ids.push(RuleId::new(k, *b));
        }
    }
    if !bought.is_empty() {
        ids.push(RuleId::task(PoConsolidationCompliance));
    }
    if p.margin_policy.is_some() {
        ids.push(RuleId::task(NewSpendMarginPolicy));
    }
    for b in &p.boms {
        for k in [MoScheduleCompliance, MoComponentFeasibility, MrpOriginTraceability] {
            ids.push(RuleId::new(k, b.bom_id.as_str()));
        }
    }
    if !p.boms.is_empty() {
        ids.push(RuleId::task(ForbiddenFinishedMoAbsent));
    }
    for w in &p.workcenters {
        ids.push(RuleId::new(AssemblyCapacityCompliance, w.workcenter_id.as_str()));
    }
    ids.push(RuleId::task(TaskStateTransitionsCompleted));
    ids.push(RuleId::task(AdjacentDataUntouched));
    if p.repair_baseline.is_some() {
        ids.push(RuleId::task(RepairStateCompliance));
    }
    ids.sort_by_key(|id| id.to_string());
    ids
}

pub fn emit_verifier_config(spec: &SolvedSpecification, task_name: &str) -> Result<VerifierConfig> {
    let p = &spec.params;
    let seed = emit_environment_seed(spec);
    let seeded = ErpState::apply_seed(&seed)?.snapshot();
    let mut gates = Vec::new();
    if p.has_screening() {
        gates.push(GateSpec::PartialAcceptance { seed_records_digest: seeded.task_records_digest() });
    }
    let repair = p.repair_baseline.as_ref().map(|rb| {
        gates.push(GateSpec::RepairState);
        let mut offer_qty = std::collections::BTreeMap::new();
        for po in &rb.purchases {
            for l in &po.lines {
                *offer_qty.entry(l.offer_id.clone()).or_default() += l.qty;
            }
        }
        RepairTerms {
            withdrawn_vendor_id: rb.withdrawn_vendor_id.clone(),
            baseline_purchase_ids: (1..=seed.purchase_orders.len() as u32).collect(),
            baseline_build_ids: (1..=seed.manufacturing_orders.len() as u32).collect(),
            baseline_offer_qty: offer_qty,
            baseline_builds: rb
                .builds
                .iter()
                .map(|b| BaselineBuildTerm { bom_id: b.bom_id.clone(), workcenter_id: b.workcenter_id.clone(), qty: b.qty })
                .collect(),
            baseline_allocations: rb.allocations.iter().map(|a| (a.order_id.clone(), a.qty)).collect(),
        }
    });
    let (e, secondary) = match p.objective_type {
        ObjectiveType::ConstraintOnly => (0, None),
        _ => (spec.primary_optimum, spec.secondary_optimum),
    };
    let mut orders: Vec<OrderTerm> = p
        .demands
        .iter()
        .map(|d| OrderTerm {
            order_id: d.order_id.clone(),
            customer_id: d.customer_id.clone(),
            product_id: d.product_id.clone(),
            qty: d.quantity,
            deadline_day: d.deadline_day,
            unit_list_price_cents: d.unit_list_price_cents,
            budget_cents: d.budget_cents,
            seeded: d.is_seeded_order,
            screened: d.must_screen,
            accepted: p.is_accepted(d),
        })
        .collect();
    orders.sort_by(|a, b| a.order_id.cmp(&b.order_id));
    Ok(VerifierConfig {
        task_name: task_name.to_string(),
        rules: instantiate_rules(p)
            .into_iter()
            .map(|id| RuleSpec { dimension: id.kind.dimension(), rule_id: id.to_string() })
            .collect(),
        objective: ObjectiveTerms::new(p.objective_type, e, secondary),
        horizon_days: p.horizon_days,
        orders,
        offers: p.vendor_offers.clone(),
        boms: p.boms.clone(),
        workcenters: p.workcenters.clone(),
        stock: p.initial_stock.clone(),
        invoicing_policy: p.invoicing_policy,
        margin_policy: p.margin_policy,
        repair,
        gates,
        adjacent_digest: adjacent_digest(&seeded.tables().adjacent_records),
    })
}
