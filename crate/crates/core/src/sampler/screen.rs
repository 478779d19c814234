//! Closed-form supply bounds checked before any solver call.

use std::collections::BTreeSet;

use crate::model::{InvoicingPolicy, ParameterSetting};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScreenResult {
    Accept,
    Discard(String),
}

impl ScreenResult {
    pub fn is_accept(&self) -> bool {
        matches!(self, ScreenResult::Accept)
    }
}

/// Saturating bound on units of `product` obtainable by `day`, ignoring cost and MOQs.
fn supply_bound(p: &ParameterSetting, product: &str, day: i64, depth: u8) -> i64 {
    let mut total = p.stock(product);
    for o in &p.vendor_offers {
        if o.product_id == product && !o.withdrawn && o.lead_time_days <= day {
            total = total.saturating_add(o.tier_max_qty);
        }
    }
    if depth > 4 {
        return total;
    }
    for bom in p.boms.iter().filter(|b| b.output_product_id == product && b.finish_day() <= day) {
        let qualified: Vec<_> = p
            .workcenters
            .iter()
            .filter(|w| bom.route_workcenter_ids.contains(&w.workcenter_id) && w.qualified_bom_ids.contains(&bom.bom_id))
            .collect();
        let capacity = if bom.route_workcenter_ids.is_empty() || bom.minutes_per_unit == 0 {
            i64::MAX
        } else {
            qualified.iter().map(|w| w.capacity_minutes / bom.minutes_per_unit).sum()
        };
        let parts = bom
            .components
            .iter()
            .map(|c| supply_bound(p, &c.product_id, bom.build_start_day, depth + 1) / c.qty_per_unit)
            .min()
            .unwrap_or(0);
        total = total.saturating_add(capacity.min(parts));
    }
    total
}

/// Rejects settings that no plan can satisfy, using arithmetic bounds only.
pub fn pre_solver_screen(p: &ParameterSetting) -> ScreenResult {
    if let Err(e) = p.validate() {
        return ScreenResult::Discard(e.to_string());
    }
    if p.has_screening() {
        let accepted = p.demands.iter().filter(|d| d.must_screen && p.is_accepted(d)).count();
        let screened = p.demands.iter().filter(|d| d.must_screen).count();
        if accepted == 0 || accepted == screened {
            return ScreenResult::Discard("screening must keep at least one order and reject at least one".into());
        }
    }
    for d in &p.demands {
        if d.budget_cents < d.value_cents() {
            return ScreenResult::Discard(format!("{} budget below order value", d.order_id));
        }
    }
    if let InvoicingPolicy::FixedDownpayment { amount_cents } = p.invoicing_policy {
        if p.accepted_demands().any(|d| amount_cents >= d.value_cents()) {
            return ScreenResult::Discard("fixed downpayment not below an order value".into());
        }
    }
    let sold: BTreeSet<&str> = p.accepted_demands().map(|d| d.product_id.as_str()).collect();
    for product in sold {
        let deadlines: BTreeSet<i64> =
            p.accepted_demands().filter(|d| d.product_id == product).map(|d| d.deadline_day).collect();
        for dl in deadlines {
            let due: i64 = p
                .accepted_demands()
                .filter(|d| d.product_id == product && d.deadline_day <= dl)
                .map(|d| d.quantity)
                .sum();
            let bound = supply_bound(p, product, dl, 0);
            if due > bound {
                return ScreenResult::Discard(format!(
                    "{product}: {due} units due by day {dl} exceed supply bound {bound}"
                ));
            }
        }
    }
    ScreenResult::Accept
}
