//! Instruction rendering from fixed templates.
//!
//! Each policy sentence carries a `<!-- clause:KIND -->` tag naming the rule
//! kind that grades it; only clauses whose rules are instantiated are rendered.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::config::instantiate_rules;
use crate::model::{InvoicingPolicy, ObjectiveType, ParameterSetting, PatternId};
use crate::solver::SolvedSpecification;
use crate::verify::RuleKind;

/// Cents as a two-decimal amount.
pub fn money(cents: i64) -> String {
    let sign = if cents < 0 { "-" } else { "" };
    let c = cents.unsigned_abs();
    let whole = (c / 100).to_string();
    let mut grouped = String::new();
    for (i, ch) in whole.chars().enumerate() {
        if i > 0 && (whole.len() - i).is_multiple_of(3) {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    format!("{sign}{grouped}.{:02}", c % 100)
}

fn title(pattern: PatternId) -> &'static str {
    match pattern {
        PatternId::Replenishment => "Replenish open customer orders",
        PatternId::ScreenedIntake => "Screen, source and bill the order backlog",
        PatternId::MakeOrBuy => "Make or buy finished goods",
        PatternId::TwoStageBuild => "Plan a two-stage build",
        PatternId::SupplierRescue => "Repair the purchase plan after a supplier withdrawal",
    }
}

/// Extracts the rule kinds named by clause tags.
pub fn clause_tags(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(i) = rest.find("<!-- clause:") {
        let tail = &rest[i + "<!-- clause:".len()..];
        let Some(j) = tail.find(" -->") else { break };
        out.push(tail[..j].to_string());
        rest = &tail[j..];
    }
    out
}

pub fn render_instruction(spec: &SolvedSpecification) -> String {
    let p: &ParameterSetting = &spec.params;
    let kinds: BTreeSet<RuleKind> = instantiate_rules(p).into_iter().map(|r| r.kind).collect();
    let mut out = String::new();
    let clause = |out: &mut String, kind: RuleKind, text: &str| {
        if kinds.contains(&kind) {
            let _ = writeln!(out, "- <!-- clause:{} --> {text}", kind.as_str());
        }
    };
    let w = &mut out;
    let _ = writeln!(w, "# {}\n", title(p.pattern_id));

    let _ = writeln!(w, "## Business context\n");
    let _ = writeln!(
        w,
        "You plan operations for a {} business. The ERP already holds the customers, products, vendors \
         and orders listed below. Days count from day 0 (today); the planning horizon ends on day {}. \
         All amounts are in currency units with two decimals and carry no tax.\n",
        p.product_domain.replace('_', " "),
        p.horizon_days
    );

    let _ = writeln!(w, "## Customer demand\n");
    let _ = writeln!(w, "| Order | Customer | Product | Qty | Due day | Unit list price | Budget | In ERP |");
    let _ = writeln!(w, "|---|---|---|---|---|---|---|---|");
    let mut demands: Vec<_> = p.demands.iter().collect();
    demands.sort_by(|a, b| a.order_id.cmp(&b.order_id));
    for d in &demands {
        let customer = p.customers.iter().find(|c| c.id == d.customer_id).map_or("", |c| c.name.as_str());
        let _ = writeln!(
            w,
            "| {} | {} ({}) | {} | {} | {} | {} | {} | {} |",
            d.order_id,
            customer,
            d.customer_id,
            d.product_id,
            d.quantity,
            d.deadline_day,
            money(d.unit_list_price_cents),
            money(d.budget_cents),
            if d.is_seeded_order { "draft sales order" } else { "not yet entered" }
        );
    }
    let _ = writeln!(w);
    if demands.iter().any(|d| !d.is_seeded_order) {
        let _ = writeln!(
            w,
            "Orders marked \"not yet entered\" must be created as sales orders whose client reference is the order id.\n"
        );
    }
    clause(w, RuleKind::DemandCoverage, "Confirm every accepted order and cover its full quantity from allocated on-hand stock, purchases or production.");
    clause(w, RuleKind::DeadlineFulfillment, "Supply for an order must be usable by its due day, and its commitment day must not be later than the due day.");
    clause(w, RuleKind::ListPrice, "Sell every line at the unit list price shown.");
    clause(w, RuleKind::SaleRevenue, "Each order's total must equal quantity times list price.");
    clause(w, RuleKind::BudgetCompliance, "No order total may exceed the customer's budget.");
    clause(w, RuleKind::SupplyCoverage, "Allocations may not exceed on-hand stock, and total supply of each sold product must cover accepted demand.");
    let _ = writeln!(w);

    let _ = writeln!(w, "## Supply\n");
    let _ = writeln!(w, "| Product | Name | On hand |");
    let _ = writeln!(w, "|---|---|---|");
    for prod in &p.products {
        let _ = writeln!(w, "| {} | {} | {} |", prod.product_id, prod.name, p.stock(&prod.product_id));
    }
    let _ = writeln!(w);
    if !p.vendor_offers.is_empty() {
        let _ = writeln!(w, "| Offer | Vendor | Product | Min qty | Max qty | Unit price | Lead days | Status |");
        let _ = writeln!(w, "|---|---|---|---|---|---|---|---|");
        let mut offers: Vec<_> = p.vendor_offers.iter().collect();
        offers.sort_by(|a, b| a.offer_id.cmp(&b.offer_id));
        for o in offers {
            let _ = writeln!(
                w,
                "| {} | {} | {} | {} | {} | {} | {} | {} |",
                o.offer_id,
                o.vendor_id,
                o.product_id,
                o.tier_min_qty,
                o.tier_max_qty,
                money(o.unit_price_cents),
                o.lead_time_days,
                if o.withdrawn { "withdrawn" } else { "active" }
            );
        }
        let _ = writeln!(w);
    }
    clause(w, RuleKind::PoMinQtyCompliance, "The total ordered on an offer must be zero or lie within its minimum and maximum quantity; withdrawn offers cannot be used.");
    clause(w, RuleKind::PoPriceTierCompliance, "Purchase lines must carry the offer's unit price.");
    clause(w, RuleKind::SupplyTimingFeasible, "A purchase line's expected day is its order day plus the offer's lead time and must fall within the horizon.");
    let _ = writeln!(w);

    if !p.boms.is_empty() {
        let _ = writeln!(w, "## Manufacturing\n");
        let _ = writeln!(w, "| BOM | Output | Components per unit | Routes | Minutes per unit | Start day | Build days | Conversion cost per unit |");
        let _ = writeln!(w, "|---|---|---|---|---|---|---|---|");
        for b in &p.boms {
            let comps: Vec<String> = b.components.iter().map(|c| format!("{} x{}", c.product_id, c.qty_per_unit)).collect();
            let routes = if b.route_workcenter_ids.is_empty() { "any".to_string() } else { b.route_workcenter_ids.join(", ") };
            let _ = writeln!(
                w,
                "| {} | {} | {} | {} | {} | {} | {} | {} |",
                b.bom_id,
                b.output_product_id,
                comps.join(", "),
                routes,
                b.minutes_per_unit,
                b.build_start_day,
                b.build_days,
                money(b.conversion_cost_cents)
            );
        }
        let _ = writeln!(w);
        if !p.workcenters.is_empty() {
            let _ = writeln!(w, "| Workcenter | Name | Capacity minutes | Qualified BOMs |");
            let _ = writeln!(w, "|---|---|---|---|");
            for wc in &p.workcenters {
                let _ = writeln!(
                    w,
                    "| {} | {} | {} | {} |",
                    wc.workcenter_id,
                    wc.name,
                    wc.capacity_minutes,
                    wc.qualified_bom_ids.join(", ")
                );
            }
            let _ = writeln!(w);
        }
        clause(w, RuleKind::MoScheduleCompliance, "Manufacturing orders start on the BOM's start day, end after its build days, and run on a routed workcenter qualified for the BOM.");
        clause(w, RuleKind::MoComponentFeasibility, "Components must be on hand, received or built by the start day of every build that consumes them.");
        clause(w, RuleKind::AssemblyCapacityCompliance, "Scheduled minutes on a workcenter may not exceed its capacity over the horizon.");
        clause(w, RuleKind::ForbiddenFinishedMoAbsent, "Build only products that accepted orders need.");
        let _ = writeln!(w);
    }

    let _ = writeln!(w, "## Policies\n");
    clause(w, RuleKind::PoConsolidationCompliance, "Place at most one purchase order per vendor.");
    clause(w, RuleKind::PoOriginTraceability, "Set every purchase order's origin to the sales orders it supplies.");
    clause(w, RuleKind::MrpOriginTraceability, "Set every manufacturing order's origin to the sales orders it supplies.");
    if let Some(sp) = &p.screening_policy {
        if p.has_screening() {
            let blocked = if sp.blocked_customer_ids.is_empty() {
                "none".to_string()
            } else {
                sp.blocked_customer_ids.join(", ")
            };
            let text = format!(
                "Intake rules: accept an order only if its value is at least {} and its customer is not blocked (blocked: {blocked}). \
                 Confirm accepted orders and cancel the rest.",
                money(sp.min_order_value_cents)
            );
            clause(w, RuleKind::TaskStateTransitionsCompleted, &text);
            clause(w, RuleKind::SeededOrderCancelled, "Rejected orders must end cancelled.");
            clause(w, RuleKind::RejectedOrderNotInvoiced, "Never invoice a rejected order.");
        }
    } else {
        clause(w, RuleKind::TaskStateTransitionsCompleted, "Every order listed above must end confirmed.");
    }
    match p.invoicing_policy {
        InvoicingPolicy::None => {}
        InvoicingPolicy::Regular => {
            clause(w, RuleKind::RegularInvoiceAmountMatchesPolicy, "Post one invoice per accepted order for its full value.");
        }
        InvoicingPolicy::FixedDownpayment { amount_cents } => {
            let text = format!(
                "Post a deposit invoice of {} per accepted order (capped at the order value).",
                money(amount_cents)
            );
            clause(w, RuleKind::DownpaymentInvoiceAmountMatchesPolicy, &text);
            clause(w, RuleKind::RegularInvoiceAmountMatchesPolicy, "Then post one regular invoice for the remaining balance.");
        }
        InvoicingPolicy::PercentDownpayment { basis_points } => {
            let text = format!(
                "Post a deposit invoice of {}.{:02}% of each accepted order's value, rounded half up to the cent.",
                basis_points / 100,
                basis_points % 100
            );
            clause(w, RuleKind::DownpaymentInvoiceAmountMatchesPolicy, &text);
            clause(w, RuleKind::RegularInvoiceAmountMatchesPolicy, "Then post one regular invoice for the remaining balance.");
        }
    }
    if let Some(m) = p.margin_policy {
        let text = format!(
            "Keep a margin of at least {}.{:02}%: new spend on purchases and conversion may not exceed {} of retained order revenue.",
            m.min_margin_basis_points / 100,
            m.min_margin_basis_points % 100,
            money(m.spend_cap_cents(p.accepted_revenue_cents()))
        );
        clause(w, RuleKind::NewSpendMarginPolicy, &text);
    }
    if let Some(rb) = &p.repair_baseline {
        let text = format!(
            "Vendor {} has withdrawn all its offers. Cancel purchase orders that depend on it and keep the stock allocations already committed to orders.",
            rb.withdrawn_vendor_id
        );
        clause(w, RuleKind::RepairStateCompliance, &text);
    }
    clause(w, RuleKind::AdjacentDataUntouched, "Leave unrelated customers, vendors, products and documents untouched.");
    let _ = writeln!(w);

    let _ = writeln!(w, "## Objective\n");
    let goal = match p.objective_type {
        ObjectiveType::MinNewSpend => {
            "Among plans meeting every rule above, minimize new spend: purchase cost at offer prices plus conversion cost of builds."
        }
        ObjectiveType::VendorConsolidation => {
            "Among plans meeting every rule above, minimize the number of distinct vendors used; break ties by lowest new spend."
        }
        ObjectiveType::CapacityPreservation => {
            "Among plans meeting every rule above, minimize scheduled workcenter minutes; break ties by lowest new spend."
        }
        ObjectiveType::RepairPlan => {
            "Among plans meeting every rule above, change the existing plan as little as possible (total absolute change in purchased and built quantities); break ties by lowest new spend."
        }
        ObjectiveType::ConstraintOnly => "Any plan meeting every rule above is acceptable.",
    };
    let _ = writeln!(w, "{goal}");
    out
}
