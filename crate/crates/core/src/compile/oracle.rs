//! Oracle plan projection: the certified assignment as ordered actions.

use std::collections::{BTreeMap, BTreeSet};

use super::seed::{origin_refs, seeded_demands};
use crate::erp::{Action, InvoiceKind, NewPurchaseLine, NewSalesLine, OraclePlan};
use crate::error::{Error, Result};
use crate::model::{ObjectiveType, VarIndex};
use crate::solver::SolvedSpecification;

/// Sales order ids the oracle will see, by order id.
pub(crate) fn sales_order_ids(spec: &SolvedSpecification) -> BTreeMap<String, u32> {
    let p = &spec.params;
    let mut ids: BTreeMap<String, u32> = BTreeMap::new();
    for (i, d) in seeded_demands(p).into_iter().enumerate() {
        ids.insert(d.order_id.clone(), i as u32 + 1);
    }
    let mut created: Vec<_> = p.accepted_demands().filter(|d| !d.is_seeded_order).collect();
    created.sort_by(|a, b| a.order_id.cmp(&b.order_id));
    let base = ids.len() as u32;
    for (i, d) in created.into_iter().enumerate() {
        ids.insert(d.order_id.clone(), base + i as u32 + 1);
    }
    ids
}

/// Builds the ordered plan: sales decisions, allocations, purchases, builds, invoices.
pub fn emit_oracle_plan(spec: &SolvedSpecification) -> Result<OraclePlan> {
    let p = &spec.params;
    let prog = &spec.program;
    let x = &spec.optimal_assignment;
    let idx = VarIndex::of(prog);
    let unrealizable = |m: String| Error::UnrealizableAssignment(m);
    let so_ids = sales_order_ids(spec);
    let origin = |products: BTreeSet<String>| -> Vec<u32> {
        origin_refs(p, &products).iter().filter_map(|r| so_ids.get(r).copied()).collect()
    };
    let repair = p.repair_baseline.as_ref();
    let mut actions = Vec::new();

    let mut demands: Vec<_> = p.demands.iter().collect();
    demands.sort_by(|a, b| a.order_id.cmp(&b.order_id));
    for d in &demands {
        let accepted = p.is_accepted(d);
        if let Some(acc) = idx.accept.get(&d.order_id) {
            if x.get(*acc) != i64::from(accepted) {
                return Err(unrealizable(format!("accept flag of {} disagrees with screening", d.order_id)));
            }
        }
        match (d.is_seeded_order, accepted) {
            (true, false) => actions.push(Action::CancelSalesOrder { sales_order: so_ids[&d.order_id] }),
            (true, true) if repair.is_none() => actions.push(Action::ConfirmSalesOrder {
                sales_order: so_ids[&d.order_id],
                commitment_day: d.deadline_day,
            }),
            (false, true) => {
                actions.push(Action::CreateSalesOrder {
                    client_order_ref: d.order_id.clone(),
                    customer_id: d.customer_id.clone(),
                    requested_day: d.deadline_day,
                    lines: vec![NewSalesLine {
                        product_id: d.product_id.clone(),
                        qty: d.quantity,
                        unit_price_cents: d.unit_list_price_cents,
                    }],
                });
                actions.push(Action::ConfirmSalesOrder {
                    sales_order: so_ids[&d.order_id],
                    commitment_day: d.deadline_day,
                });
            }
            _ => {}
        }
    }

    let baseline_alloc: BTreeMap<&str, i64> = repair
        .map(|rb| rb.allocations.iter().map(|a| (a.order_id.as_str(), a.qty)).collect())
        .unwrap_or_default();
    for d in demands.iter().filter(|d| p.is_accepted(d)) {
        let s = x.get(idx.stock[&d.order_id]);
        let already = baseline_alloc.get(d.order_id.as_str()).copied().unwrap_or(0);
        if s < already {
            return Err(unrealizable(format!("allocation for {} below the committed {already}", d.order_id)));
        }
        if s > already {
            actions.push(Action::AllocateStock {
                sales_order: so_ids[&d.order_id],
                product_id: d.product_id.clone(),
                qty: s - already,
            });
        }
    }

    // purchases: one order per vendor, offers in id order
    let mut wanted: BTreeMap<String, Vec<(String, i64)>> = BTreeMap::new();
    for (offer_id, (q, _)) in &idx.offers {
        let qty = x.get(*q);
        if qty > 0 {
            let o = p.offer(offer_id).ok_or_else(|| unrealizable(format!("unknown offer {offer_id}")))?;
            if o.withdrawn {
                return Err(unrealizable(format!("plan buys on withdrawn offer {offer_id}")));
            }
            wanted.entry(o.vendor_id.clone()).or_default().push((offer_id.clone(), qty));
        }
    }
    let mut kept_vendors = BTreeSet::new();
    if let Some(rb) = repair {
        for (i, po) in rb.purchases.iter().enumerate() {
            let mut base: Vec<(String, i64)> = po.lines.iter().map(|l| (l.offer_id.clone(), l.qty)).collect();
            base.sort();
            let withdrawn = po.vendor_id == rb.withdrawn_vendor_id;
            if !withdrawn && wanted.get(&po.vendor_id) == Some(&base) && !kept_vendors.contains(&po.vendor_id) {
                kept_vendors.insert(po.vendor_id.clone());
            } else {
                actions.push(Action::CancelPurchaseOrder { purchase_order: i as u32 + 1 });
            }
        }
    }
    for (vendor, lines) in &wanted {
        if kept_vendors.contains(vendor) {
            continue;
        }
        let mut new_lines = Vec::new();
        let mut products = BTreeSet::new();
        for (offer_id, qty) in lines {
            let o = p.offer(offer_id).expect("offer checked above");
            products.insert(o.product_id.clone());
            new_lines.push(NewPurchaseLine {
                offer_id: offer_id.clone(),
                qty: *qty,
                unit_price_cents: o.unit_price_cents,
                expected_day: o.lead_time_days,
            });
        }
        actions.push(Action::CreatePurchaseOrder {
            vendor_id: vendor.clone(),
            order_day: 0,
            lines: new_lines,
            origin: origin(products),
        });
    }

    // builds: one order per route with positive quantity
    let mut kept_routes = BTreeSet::new();
    if let Some(rb) = repair {
        for (i, b) in rb.builds.iter().enumerate() {
            let key = (b.bom_id.clone(), b.workcenter_id.clone());
            let planned = idx.assembly.get(&key).map_or(0, |a| x.get(*a));
            if planned == b.qty && !kept_routes.contains(&key) {
                kept_routes.insert(key);
            } else {
                actions.push(Action::CancelManufacturingOrder { manufacturing_order: i as u32 + 1 });
            }
        }
    }
    for ((bom_id, wc), a) in &idx.assembly {
        let qty = x.get(*a);
        if qty == 0 || kept_routes.contains(&(bom_id.clone(), wc.clone())) {
            continue;
        }
        let bom = p.bom(bom_id).ok_or_else(|| unrealizable(format!("unknown bom {bom_id}")))?;
        actions.push(Action::CreateManufacturingOrder {
            bom_id: bom_id.clone(),
            qty,
            workcenter_id: wc.clone(),
            start_day: bom.build_start_day,
            end_day: bom.finish_day(),
            origin: origin(BTreeSet::from([bom.output_product_id.clone()])),
        });
    }

    // invoices: deposit first, then the balance
    if p.invoicing_policy.invoices() {
        for d in demands.iter().filter(|d| p.is_accepted(d)) {
            let so = so_ids[&d.order_id];
            let value = d.value_cents();
            if p.invoicing_policy.has_downpayment() {
                actions.push(Action::PostInvoice {
                    sales_order: so,
                    kind: InvoiceKind::Downpayment,
                    amount_cents: p.invoicing_policy.downpayment_cents(value),
                });
            }
            actions.push(Action::PostInvoice {
                sales_order: so,
                kind: InvoiceKind::Regular,
                amount_cents: p.invoicing_policy.regular_cents(value),
            });
        }
    }

    let (primary_optimum, secondary_optimum) = match p.objective_type {
        ObjectiveType::ConstraintOnly => (0, None),
        _ => (spec.primary_optimum, spec.secondary_optimum),
    };
    Ok(OraclePlan { objective_type: p.objective_type, primary_optimum, secondary_optimum, actions })
}
