//! Environment seed projection.

use std::collections::{BTreeMap, BTreeSet};

use crate::erp::{
    AdjacentRecord, BomRecord, OfferRecord, OrderState, PartnerRecord, ProductRecord, PurchaseLine, SeedManufacturingOrder,
    SeedPurchaseOrder, SeedSalesOrder, SeedSpec, WorkcenterRecord,
};
use crate::model::ParameterSetting;
use crate::solver::SolvedSpecification;
use crate::rng::{derive_seed, SeededRng};

const CITIES: [&str; 8] = ["Leeds", "Porto", "Lyon", "Graz", "Turku", "Ghent", "Brno", "Cork"];
const DOC_KINDS: [&str; 3] = ["quotation", "vendor_bill", "delivery_note"];

/// Seeded sales orders, in id order: demands flagged as seeded, sorted by order id.
pub(crate) fn seeded_demands(params: &ParameterSetting) -> Vec<&crate::model::CustomerDemand> {
    let mut v: Vec<_> = params.demands.iter().filter(|d| d.is_seeded_order).collect();
    v.sort_by(|a, b| a.order_id.cmp(&b.order_id));
    v
}

/// Accepted orders whose supply closure contains any of `products`, by order id.
pub(crate) fn origin_refs(params: &ParameterSetting, products: &BTreeSet<String>) -> Vec<String> {
    let mut refs: Vec<String> = params
        .accepted_demands()
        .filter(|d| params.supply_closure(&d.product_id).iter().any(|p| products.contains(p)))
        .map(|d| d.order_id.clone())
        .collect();
    refs.sort();
    refs
}

fn adjacent_records(params: &ParameterSetting) -> Vec<AdjacentRecord> {
    let counts = params.adjacent_record_counts;
    let mut rng = SeededRng::new(derive_seed(params.seed, &["adjacent", params.pattern_id.as_str()], 0));
    let mut out = Vec::new();
    let mut push = |key: String, table: &str, fields: Vec<(&str, String)>| {
        out.push(AdjacentRecord {
            key,
            table: table.into(),
            fields: fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        });
    };
    for i in 1..=counts.customers {
        let city = rng.pick(&CITIES).to_string();
        push(format!("customer:ADJ-C{i:03}"), "customers", vec![("name", format!("Account {i:03}")), ("city", city)]);
    }
    for i in 1..=counts.vendors {
        let city = rng.pick(&CITIES).to_string();
        push(format!("vendor:ADJ-V{i:03}"), "vendors", vec![("name", format!("Supplier {i:03}")), ("city", city)]);
    }
    for i in 1..=counts.products {
        let price = rng.int_in(100, 50_000);
        push(
            format!("product:ADJ-P{i:03}"),
            "products",
            vec![("name", format!("Catalog item {i:03}")), ("standard_price_cents", price.to_string())],
        );
    }
    for i in 1..=counts.documents {
        let kind = rng.pick(&DOC_KINDS).to_string();
        let amount = rng.int_in(1_000, 500_000);
        push(
            format!("document:ADJ-D{i:03}"),
            "documents",
            vec![("kind", kind), ("amount_cents", amount.to_string()), ("state", "posted".into())],
        );
    }
    out
}

/// Projects the sampled records, the repair baseline and the adjacent rows into a seed.
pub fn emit_environment_seed(spec: &SolvedSpecification) -> SeedSpec {
    let p = &spec.params;
    let repair = p.repair_baseline.as_ref();
    let baseline_alloc: BTreeMap<&str, i64> = repair
        .map(|rb| rb.allocations.iter().map(|a| (a.order_id.as_str(), a.qty)).collect())
        .unwrap_or_default();
    let sales_orders = seeded_demands(p)
        .into_iter()
        .map(|d| {
            // repair tasks start from a committed plan; others from a draft backlog
            let state = if repair.is_some() && p.is_accepted(d) { OrderState::Confirmed } else { OrderState::Draft };
            SeedSalesOrder {
                client_order_ref: d.order_id.clone(),
                customer_id: d.customer_id.clone(),
                product_id: d.product_id.clone(),
                qty: d.quantity,
                unit_price_cents: d.unit_list_price_cents,
                requested_day: d.deadline_day,
                state,
                allocated_qty: baseline_alloc.get(d.order_id.as_str()).copied().unwrap_or(0),
            }
        })
        .collect();
    let purchase_orders = repair
        .map(|rb| {
            rb.purchases
                .iter()
                .map(|po| {
                    let lines: Vec<PurchaseLine> = po
                        .lines
                        .iter()
                        .filter_map(|l| {
                            let o = p.offer(&l.offer_id)?;
                            Some(PurchaseLine {
                                offer_id: o.offer_id.clone(),
                                product_id: o.product_id.clone(),
                                qty: l.qty,
                                unit_price_cents: o.unit_price_cents,
                                expected_day: o.lead_time_days,
                            })
                        })
                        .collect();
                    let products = lines.iter().map(|l| l.product_id.clone()).collect();
                    SeedPurchaseOrder {
                        vendor_id: po.vendor_id.clone(),
                        lines,
                        order_day: 0,
                        origin_refs: origin_refs(p, &products),
                    }
                })
                .collect()
        })
        .unwrap_or_default();
    let manufacturing_orders = repair
        .map(|rb| {
            rb.builds
                .iter()
                .filter_map(|b| {
                    let bom = p.bom(&b.bom_id)?;
                    Some(SeedManufacturingOrder {
                        bom_id: b.bom_id.clone(),
                        qty: b.qty,
                        workcenter_id: b.workcenter_id.clone(),
                        start_day: bom.build_start_day,
                        end_day: bom.finish_day(),
                        origin_refs: origin_refs(p, &BTreeSet::from([bom.output_product_id.clone()])),
                    })
                })
                .collect()
        })
        .unwrap_or_default();
    SeedSpec {
        horizon_days: p.horizon_days,
        products: p
            .products
            .iter()
            .map(|x| ProductRecord {
                product_id: x.product_id.clone(),
                name: x.name.clone(),
                standard_price_cents: x.standard_price_cents,
            })
            .collect(),
        customers: p.customers.iter().map(|c| PartnerRecord { partner_id: c.id.clone(), name: c.name.clone() }).collect(),
        vendors: p.vendors.iter().map(|v| PartnerRecord { partner_id: v.id.clone(), name: v.name.clone() }).collect(),
        vendor_offers: p
            .vendor_offers
            .iter()
            .map(|o| OfferRecord {
                offer_id: o.offer_id.clone(),
                vendor_id: o.vendor_id.clone(),
                product_id: o.product_id.clone(),
                tier_min_qty: o.tier_min_qty,
                tier_max_qty: o.tier_max_qty,
                unit_price_cents: o.unit_price_cents,
                lead_time_days: o.lead_time_days,
                active: !o.withdrawn,
            })
            .collect(),
        boms: p
            .boms
            .iter()
            .map(|b| BomRecord {
                bom_id: b.bom_id.clone(),
                output_product_id: b.output_product_id.clone(),
                components: b.components.clone(),
                route_workcenter_ids: b.route_workcenter_ids.clone(),
                minutes_per_unit: b.minutes_per_unit,
                build_start_day: b.build_start_day,
                build_days: b.build_days,
                conversion_cost_cents: b.conversion_cost_cents,
            })
            .collect(),
        workcenters: p
            .workcenters
            .iter()
            .map(|w| WorkcenterRecord {
                workcenter_id: w.workcenter_id.clone(),
                name: w.name.clone(),
                capacity_minutes: w.capacity_minutes,
                qualified_bom_ids: w.qualified_bom_ids.clone(),
            })
            .collect(),
        stock_levels: p.initial_stock.clone(),
        sales_orders,
        purchase_orders,
        manufacturing_orders,
        invoicing_policy: p.invoicing_policy,
        adjacent_records: adjacent_records(p),
    }
}
