//! Parameter draws.
//!
//! Draw order is fixed and part of the determinism contract:
//!
//! 1. catalog: finished product count, then per finished product its standard
//!    price or BOM shape (component prices, quantities per unit, conversion cost)
//! 2. customer count, then per order: product, quantity, deadline, list price
//!    noise, budget headroom, seeded flag
//! 3. tightness, vendor count, then per (purchasable product, vendor): offer
//!    presence, capacity ratio, tier minimum, lead time, unit cost noise
//! 4. stock ratio per stocked product
//! 5. BOM timing and minutes, workcenter count, qualification, capacity ratio
//! 6. pattern policies: screening, invoicing, margin
//! 7. objective type
//! 8. product-domain label, adjacent record counts

use std::collections::BTreeMap;

use super::recipe::{BomStructure, DifficultyRecipe};
use crate::model::{
    AdjacentCounts, BomComponent, BomSpec, CustomerDemand, InvoicingPolicy, MarginPolicy, ObjectiveType,
    ParameterSetting, PartySpec, PatternId, ProductRole, ProductSpec, ScreeningPolicy, VendorOffer, WorkcenterSpec,
};
use crate::rng::SeededRng;

/// List price over standard cost before noise.
const LIST_MARKUP: f64 = 1.4;
const DOMAINS: [&str; 2] = ["power_equipment", "lab_supplies"];

const CUSTOMER_PREFIX: [&str; 8] = ["Harbor", "Summit", "Granite", "Riverside", "Pinecrest", "Lakeshore", "Ironwood", "Meridian"];
const CUSTOMER_SUFFIX: [&str; 4] = ["Utilities", "Builders", "Facilities", "Services"];
const VENDOR_NAMES: [&str; 8] = [
    "Northwind Supply",
    "Eastgate Components",
    "Bluefield Trading",
    "Keystone Industrial",
    "Copperline Parts",
    "Westbrook Distribution",
    "Redstone Wholesale",
    "Silverleaf Sourcing",
];

struct DomainNames {
    finished: [&'static str; 3],
    intermediate: [&'static str; 3],
    component: [&'static str; 9],
}

fn domain_names(domain: &str) -> DomainNames {
    if domain == "lab_supplies" {
        DomainNames {
            finished: ["Fume Hood", "Incubator", "Centrifuge"],
            intermediate: ["Airflow Module", "Chamber Assembly", "Rotor Assembly"],
            component: [
                "Blower Fan", "Sash Panel", "Heating Element", "Door Gasket", "Drive Motor", "Control Board",
                "Temperature Probe", "Filter Cartridge", "Steel Frame",
            ],
        }
    } else {
        DomainNames {
            finished: ["Transfer Switch", "Generator Set", "Switchgear Panel"],
            intermediate: ["Control Module", "Alternator Assembly", "Busbar Assembly"],
            component: [
                "Contactor", "Enclosure", "Relay", "Wiring Harness", "Stator", "Breaker", "Voltage Regulator",
                "Cooling Fan", "Mounting Rail",
            ],
        }
    }
}

fn range(rng: &mut SeededRng, r: [i64; 2]) -> i64 {
    rng.int_in(r[0], r[1])
}

fn frange(rng: &mut SeededRng, r: [f64; 2]) -> f64 {
    rng.float_in(r[0], r[1])
}

fn cents(x: f64) -> i64 {
    (x.round() as i64).max(1)
}

/// A product slot in the catalog before names are assigned.
struct Slot {
    role: ProductRole,
    standard_price_cents: i64,
    /// Index into the domain's name list for its role.
    name_index: usize,
}

struct BomShape {
    output: usize,
    components: Vec<(usize, i64)>,
    conversion_cost_cents: i64,
    stage_depth: u8,
}

/// Draws one parameter setting; `rng` must be fresh for the setting's seed.
pub fn sample_parameters(recipe: &DifficultyRecipe, pattern: PatternId, rng: &mut SeededRng) -> ParameterSetting {
    let structure = BomStructure::of_pattern(pattern);

    // 1. catalog
    let mut finished_count = range(rng, recipe.finished_products) as usize;
    if structure != BomStructure::None {
        finished_count = finished_count.min(2);
    }
    let mut slots: Vec<Slot> = Vec::new();
    let mut shapes: Vec<BomShape> = Vec::new();
    let mut components = 0usize;
    let mut intermediates = 0usize;
    let mut new_component = |slots: &mut Vec<Slot>, rng: &mut SeededRng| {
        slots.push(Slot { role: ProductRole::Component, standard_price_cents: rng.int_in(300, 3_000), name_index: components });
        components += 1;
        slots.len() - 1
    };
    let mut finished_ids = Vec::new();
    for f in 0..finished_count {
        let out = slots.len();
        slots.push(Slot { role: ProductRole::Finished, standard_price_cents: 0, name_index: f });
        finished_ids.push(out);
        match structure {
            BomStructure::None => slots[out].standard_price_cents = rng.int_in(2_000, 20_000),
            BomStructure::Single => {
                let parts: Vec<(usize, i64)> =
                    (0..2).map(|_| (new_component(&mut slots, rng), rng.int_in(1, 3))).collect();
                let conversion = rng.int_in(100, 600);
                let cost: i64 = parts.iter().map(|(c, k)| slots[*c].standard_price_cents * k).sum::<i64>() + conversion;
                slots[out].standard_price_cents = cents(cost as f64 * rng.float_in(0.95, 1.25));
                shapes.push(BomShape { output: out, components: parts, conversion_cost_cents: conversion, stage_depth: 1 });
            }
            BomStructure::MultiStage => {
                let mid = slots.len();
                slots.push(Slot { role: ProductRole::Intermediate, standard_price_cents: 0, name_index: intermediates });
                intermediates += 1;
                let parts: Vec<(usize, i64)> =
                    (0..2).map(|_| (new_component(&mut slots, rng), rng.int_in(1, 3))).collect();
                let conv_mid = rng.int_in(100, 600);
                let mid_cost: i64 =
                    parts.iter().map(|(c, k)| slots[*c].standard_price_cents * k).sum::<i64>() + conv_mid;
                slots[mid].standard_price_cents = mid_cost;
                let direct = (new_component(&mut slots, rng), rng.int_in(1, 2));
                let conv_top = rng.int_in(100, 600);
                let cost = mid_cost + slots[direct.0].standard_price_cents * direct.1 + conv_top;
                slots[out].standard_price_cents = cents(cost as f64 * rng.float_in(0.95, 1.25));
                shapes.push(BomShape { output: mid, components: parts, conversion_cost_cents: conv_mid, stage_depth: 1 });
                shapes.push(BomShape {
                    output: out,
                    components: vec![(mid, 1), direct],
                    conversion_cost_cents: conv_top,
                    stage_depth: 2,
                });
            }
        }
    }
    let product_ids: Vec<String> = (0..slots.len()).map(|i| format!("PRD-{:02}", i + 1)).collect();

    // 2. customers and orders
    let n = range(rng, recipe.customer_count) as usize;
    let screened = pattern == PatternId::ScreenedIntake;
    let mut demands = Vec::with_capacity(n);
    for i in 0..n {
        let product = *rng.pick(&finished_ids);
        let quantity = range(rng, recipe.demand);
        let deadline_day = range(rng, recipe.deadline);
        let price = cents(slots[product].standard_price_cents as f64 * LIST_MARKUP * rng.noise_factor(recipe.price_noise_sigma));
        let headroom = rng.float_in(1.0, 1.25);
        let seeded_draw = rng.chance(0.5);
        let value = quantity * price;
        demands.push(CustomerDemand {
            order_id: format!("ORD-{:02}", i + 1),
            customer_id: format!("CUS-{:02}", i + 1),
            product_id: product_ids[product].clone(),
            quantity,
            deadline_day,
            unit_list_price_cents: price,
            budget_cents: ((value as f64 * headroom).ceil() as i64).max(value),
            is_seeded_order: match pattern {
                PatternId::MakeOrBuy | PatternId::TwoStageBuild => seeded_draw,
                _ => true,
            },
            must_screen: screened,
        });
    }

    // units of each product the finished demand implies, through the BOMs
    let mut need = vec![0i64; slots.len()];
    for d in &demands {
        let idx = product_ids.iter().position(|p| *p == d.product_id).expect("drawn product");
        need[idx] += d.quantity;
    }
    for shape in shapes.iter().rev() {
        for (c, k) in &shape.components {
            need[*c] += k * need[shape.output];
        }
    }

    // 3. vendors and offers
    let tightness = frange(rng, recipe.tightness);
    let m = range(rng, recipe.vendor_count) as usize;
    let vendors: Vec<PartySpec> = (0..m)
        .map(|v| PartySpec { id: format!("VEN-{:02}", v + 1), name: VENDOR_NAMES[v % VENDOR_NAMES.len()].to_string() })
        .collect();
    let mut vendor_offers = Vec::new();
    for (p, slot) in slots.iter().enumerate() {
        if slot.role == ProductRole::Intermediate {
            continue;
        }
        let mut quoting: Vec<usize> = (0..m).filter(|_| rng.chance(recipe.offer_probability)).collect();
        if quoting.is_empty() {
            quoting.push(rng.int_in(0, m as i64 - 1) as usize);
        }
        for v in quoting {
            let ratio = frange(rng, recipe.vendor_capacity_ratio);
            let upper = ((ratio * need[p] as f64).round() as i64).max(1);
            let moq_cap = ((tightness * upper as f64).round() as i64).max(1);
            let lower = rng.int_in(1, moq_cap);
            let lead = range(rng, recipe.lead_time);
            let price = cents(slot.standard_price_cents as f64 * rng.noise_factor(recipe.price_noise_sigma));
            vendor_offers.push(VendorOffer {
                offer_id: format!("OFR-{:02}", vendor_offers.len() + 1),
                vendor_id: vendors[v].id.clone(),
                product_id: product_ids[p].clone(),
                tier_min_qty: lower,
                tier_max_qty: upper,
                unit_price_cents: price,
                lead_time_days: lead,
                withdrawn: false,
            });
        }
    }

    // 4. stock
    let mut initial_stock = BTreeMap::new();
    for (p, slot) in slots.iter().enumerate() {
        let ratio = frange(rng, recipe.stock_ratio);
        let units = if slot.role == ProductRole::Intermediate { 0 } else { (ratio * need[p] as f64).round() as i64 };
        initial_stock.insert(product_ids[p].clone(), units);
    }

    // 5. manufacturing
    let mut boms = Vec::new();
    let mut finish_by_output: BTreeMap<usize, i64> = BTreeMap::new();
    for (i, shape) in shapes.iter().enumerate() {
        let start = match shape.components.iter().find_map(|(c, _)| finish_by_output.get(c)) {
            Some(&ready) => ready,
            None => rng.int_in(recipe.lead_time[0], recipe.lead_time[0] + 2),
        };
        let build_days = rng.int_in(1, 2);
        let minutes = rng.int_in(10, 40);
        finish_by_output.insert(shape.output, start + build_days);
        boms.push(BomSpec {
            bom_id: format!("BOM-{:02}", i + 1),
            output_product_id: product_ids[shape.output].clone(),
            components: shape
                .components
                .iter()
                .map(|(c, k)| BomComponent { product_id: product_ids[*c].clone(), qty_per_unit: *k })
                .collect(),
            route_workcenter_ids: Vec::new(),
            minutes_per_unit: minutes,
            stage_depth: shape.stage_depth,
            build_start_day: start,
            build_days,
            conversion_cost_cents: shape.conversion_cost_cents,
        });
    }
    let wc_count = if boms.is_empty() { 0 } else { *rng.pick(&recipe.workcenter_count) as usize };
    let mut workcenters = Vec::new();
    if wc_count > 0 {
        let mut qualified = vec![vec![false; boms.len()]; wc_count];
        for (b, _) in boms.iter().enumerate() {
            for row in qualified.iter_mut() {
                row[b] = rng.chance(0.75);
            }
            if qualified.iter().all(|row| !row[b]) {
                qualified[rng.int_in(0, wc_count as i64 - 1) as usize][b] = true;
            }
        }
        for (w, row) in qualified.iter().enumerate() {
            let ratio = frange(rng, recipe.vendor_capacity_ratio);
            let load: i64 = boms
                .iter()
                .zip(shapes.iter())
                .zip(row)
                .filter(|(_, q)| **q)
                .map(|((bom, shape), _)| bom.minutes_per_unit * need[shape.output])
                .sum();
            workcenters.push(WorkcenterSpec {
                workcenter_id: format!("WC-{:02}", w + 1),
                name: format!("Assembly Line {}", (b'A' + w as u8) as char),
                capacity_minutes: (load as f64 * ratio / tightness).round() as i64,
                qualified_bom_ids: boms.iter().zip(row).filter(|(_, q)| **q).map(|(b, _)| b.bom_id.clone()).collect(),
            });
        }
        let ids: Vec<String> = workcenters.iter().map(|w| w.workcenter_id.clone()).collect();
        for bom in &mut boms {
            bom.route_workcenter_ids = ids.clone();
        }
    }

    // 6. policies
    let mut screening_policy = None;
    let mut invoicing_policy = InvoicingPolicy::None;
    let mut margin_policy = None;
    if screened {
        let blocked = if rng.chance(0.5) { vec![rng.pick(&demands).customer_id.clone()] } else { Vec::new() };
        let mut values: Vec<i64> = demands.iter().map(CustomerDemand::value_cents).collect();
        values.sort_unstable();
        let k = rng.int_in(1, (n as i64 / 2).max(1)).min(n as i64 - 1).max(0) as usize;
        let policy = ScreeningPolicy { min_order_value_cents: values[k], blocked_customer_ids: blocked };
        let smallest_kept = demands.iter().filter(|d| policy.accepts(d)).map(CustomerDemand::value_cents).min();
        invoicing_policy = match rng.int_in(0, 2) {
            0 => InvoicingPolicy::Regular,
            1 => {
                let base = smallest_kept.unwrap_or(values[0]) as f64 * rng.float_in(0.1, 0.3);
                InvoicingPolicy::FixedDownpayment { amount_cents: ((base / 100.0).floor() as i64).max(1) * 100 }
            }
            _ => InvoicingPolicy::PercentDownpayment { basis_points: *rng.pick(&[1_000, 2_000, 2_500, 3_000, 5_000]) },
        };
        screening_policy = Some(policy);
    }
    if matches!(pattern, PatternId::Replenishment | PatternId::ScreenedIntake) {
        margin_policy = Some(MarginPolicy { min_margin_basis_points: rng.int_in(500, 2_000) });
    }

    // 7. objective
    let mut candidates = recipe.objective_candidates(pattern);
    if workcenters.is_empty() && candidates.len() > 1 {
        candidates.retain(|o| *o != ObjectiveType::CapacityPreservation);
    }
    let objective_type = *rng.pick(&candidates);

    // 8. domain and adjacent records
    let product_domain = rng.pick(&DOMAINS).to_string();
    let adjacent_record_counts = AdjacentCounts {
        customers: range(rng, recipe.adjacent_per_table) as u32,
        vendors: range(rng, recipe.adjacent_per_table) as u32,
        products: range(rng, recipe.adjacent_per_table) as u32,
        documents: range(rng, recipe.adjacent_per_table) as u32,
    };

    let names = domain_names(&product_domain);
    let products = slots
        .iter()
        .zip(&product_ids)
        .map(|(slot, id)| {
            let list: &[&str] = match slot.role {
                ProductRole::Finished => &names.finished,
                ProductRole::Intermediate => &names.intermediate,
                ProductRole::Component => &names.component,
            };
            ProductSpec {
                product_id: id.clone(),
                name: list[slot.name_index % list.len()].to_string(),
                role: slot.role,
                standard_price_cents: slot.standard_price_cents,
            }
        })
        .collect();
    let customers = (0..n)
        .map(|i| PartySpec {
            id: format!("CUS-{:02}", i + 1),
            name: format!("{} {}", CUSTOMER_PREFIX[i % 8], CUSTOMER_SUFFIX[(i / 8) % 4]),
        })
        .collect();
    let last_build = boms.iter().map(BomSpec::finish_day).max().unwrap_or(0);
    let horizon_days = recipe.deadline[1].max(recipe.lead_time[1]).max(last_build) + 7;

    ParameterSetting {
        pattern_id: pattern,
        difficulty: recipe.tier,
        seed: rng.seed(),
        horizon_days,
        product_domain,
        customers,
        vendors,
        products,
        demands,
        vendor_offers,
        boms,
        workcenters,
        initial_stock,
        screening_policy,
        invoicing_policy,
        margin_policy,
        repair_baseline: None,
        objective_type,
        adjacent_record_counts,
    }
}
