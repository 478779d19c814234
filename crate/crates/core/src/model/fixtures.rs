//! Small hand-built parameter settings used by tests and examples.

use std::collections::BTreeMap;

use super::params::*;

fn party(id: &str, name: &str) -> PartySpec {
    PartySpec { id: id.into(), name: name.into() }
}

fn demand(order: &str, customer: &str, product: &str, qty: i64, deadline: i64, price: i64) -> CustomerDemand {
    CustomerDemand {
        order_id: order.into(),
        customer_id: customer.into(),
        product_id: product.into(),
        quantity: qty,
        deadline_day: deadline,
        unit_list_price_cents: price,
        budget_cents: qty * price,
        is_seeded_order: true,
        must_screen: false,
    }
}

fn offer(id: &str, vendor: &str, product: &str, lo: i64, hi: i64, price: i64, lead: i64) -> VendorOffer {
    VendorOffer {
        offer_id: id.into(),
        vendor_id: vendor.into(),
        product_id: product.into(),
        tier_min_qty: lo,
        tier_max_qty: hi,
        unit_price_cents: price,
        lead_time_days: lead,
        withdrawn: false,
    }
}

/// One order of 10 units due day 14, 4 on hand, one offer `[5, 20]` at 700 cents, lead 3.
pub fn single_order() -> ParameterSetting {
    ParameterSetting {
        pattern_id: PatternId::Replenishment,
        difficulty: Tier::Easy,
        seed: 0,
        horizon_days: 21,
        product_domain: "power_equipment".into(),
        customers: vec![party("CUS-01", "Harbor Utilities")],
        vendors: vec![party("VEN-01", "Northwind Supply")],
        products: vec![ProductSpec {
            product_id: "PRD-01".into(),
            name: "Transfer Switch".into(),
            role: ProductRole::Finished,
            standard_price_cents: 650,
        }],
        demands: vec![demand("ORD-01", "CUS-01", "PRD-01", 10, 14, 1_000)],
        vendor_offers: vec![offer("OFR-01", "VEN-01", "PRD-01", 5, 20, 700, 3)],
        boms: vec![],
        workcenters: vec![],
        initial_stock: BTreeMap::from([("PRD-01".to_string(), 4)]),
        screening_policy: None,
        invoicing_policy: InvoicingPolicy::None,
        margin_policy: None,
        repair_baseline: None,
        objective_type: ObjectiveType::MinNewSpend,
        adjacent_record_counts: AdjacentCounts::default(),
    }
}

/// Two vendors with identical terms competing for a 10-unit order with no stock.
pub fn symmetric_vendors() -> ParameterSetting {
    let mut p = single_order();
    p.vendors.push(party("VEN-02", "Eastgate Components"));
    p.initial_stock.insert("PRD-01".into(), 0);
    p.vendor_offers = vec![
        offer("OFR-01", "VEN-01", "PRD-01", 1, 20, 700, 3),
        offer("OFR-02", "VEN-02", "PRD-01", 1, 20, 700, 3),
    ];
    p
}

/// Make-or-buy: finished good purchasable or assembled from two components on two workcenters.
pub fn make_or_buy() -> ParameterSetting {
    let mut p = single_order();
    p.pattern_id = PatternId::MakeOrBuy;
    p.vendors.push(party("VEN-02", "Eastgate Components"));
    p.products.push(ProductSpec {
        product_id: "PRD-02".into(),
        name: "Contactor".into(),
        role: ProductRole::Component,
        standard_price_cents: 200,
    });
    p.products.push(ProductSpec {
        product_id: "PRD-03".into(),
        name: "Enclosure".into(),
        role: ProductRole::Component,
        standard_price_cents: 100,
    });
    p.initial_stock = BTreeMap::from([
        ("PRD-01".to_string(), 2),
        ("PRD-02".to_string(), 4),
        ("PRD-03".to_string(), 0),
    ]);
    p.vendor_offers = vec![
        offer("OFR-01", "VEN-01", "PRD-01", 5, 20, 900, 3),
        offer("OFR-02", "VEN-02", "PRD-02", 2, 30, 200, 1),
        offer("OFR-03", "VEN-02", "PRD-03", 2, 30, 100, 2),
    ];
    p.boms = vec![BomSpec {
        bom_id: "BOM-01".into(),
        output_product_id: "PRD-01".into(),
        components: vec![
            BomComponent { product_id: "PRD-02".into(), qty_per_unit: 2 },
            BomComponent { product_id: "PRD-03".into(), qty_per_unit: 1 },
        ],
        route_workcenter_ids: vec!["WC-01".into(), "WC-02".into()],
        minutes_per_unit: 30,
        stage_depth: 1,
        build_start_day: 3,
        build_days: 2,
        conversion_cost_cents: 150,
    }];
    p.workcenters = vec![
        WorkcenterSpec {
            workcenter_id: "WC-01".into(),
            name: "Assembly Line A".into(),
            capacity_minutes: 120,
            qualified_bom_ids: vec!["BOM-01".into()],
        },
        WorkcenterSpec {
            workcenter_id: "WC-02".into(),
            name: "Assembly Line B".into(),
            capacity_minutes: 90,
            qualified_bom_ids: vec!["BOM-01".into()],
        },
    ];
    p
}
