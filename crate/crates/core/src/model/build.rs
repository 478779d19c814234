//! Projection of a parameter setting into a constraint program.

use std::collections::BTreeMap;

use super::params::{ObjectiveType, ParameterSetting, ProductRole};
use super::program::{
    Comparator, ConstraintProgram, IndicatorLink, LinearConstraint, ObjectiveSpec, VarId,
    VarRole, VariableDecl,
};
use crate::error::Result;

/// Variable handles grouped by the business entity they describe.
#[derive(Debug, Clone, Default)]
pub struct VarIndex {
    /// offer id -> (q, b)
    pub offers: BTreeMap<String, (VarId, VarId)>,
    /// (bom id, workcenter id) -> a
    pub assembly: BTreeMap<(String, Option<String>), VarId>,
    /// order id -> s
    pub stock: BTreeMap<String, VarId>,
    /// order id -> accept
    pub accept: BTreeMap<String, VarId>,
    /// vendor id -> y
    pub vendor_used: BTreeMap<String, VarId>,
}

impl VarIndex {
    /// Recovers the index from variable roles.
    pub fn of(program: &ConstraintProgram) -> VarIndex {
        let mut idx = VarIndex::default();
        let mut b_by_offer = BTreeMap::new();
        for v in &program.variables {
            if let VarRole::OfferUsed { offer_id } = &v.role {
                b_by_offer.insert(offer_id.clone(), v.id);
            }
        }
        for v in &program.variables {
            match &v.role {
                VarRole::PurchaseQty { offer_id, .. } => {
                    if let Some(b) = b_by_offer.get(offer_id) {
                        idx.offers.insert(offer_id.clone(), (v.id, *b));
                    }
                }
                VarRole::AssemblyQty { bom_id, workcenter_id } => {
                    idx.assembly.insert((bom_id.clone(), workcenter_id.clone()), v.id);
                }
                VarRole::StockAlloc { order_id } => {
                    idx.stock.insert(order_id.clone(), v.id);
                }
                VarRole::Accept { order_id } => {
                    idx.accept.insert(order_id.clone(), v.id);
                }
                VarRole::VendorUsed { vendor_id } => {
                    idx.vendor_used.insert(vendor_id.clone(), v.id);
                }
                _ => {}
            }
        }
        idx
    }
}

struct Builder {
    variables: Vec<VariableDecl>,
}

impl Builder {
    fn add(&mut self, name: String, role: VarRole, lower: i64, upper: i64) -> VarId {
        let id = VarId(self.variables.len() as u32);
        self.variables.push(VariableDecl { id, name, role, lower, upper });
        id
    }
}

/// Builds the bounded-integer program for `params`.
///
/// Canonical variable order: offers by (vendor, product, tier minimum) with `q` before `b`,
/// assembly by (bom, workcenter), stock allocations by order, accept flags by order, then
/// vendor-used flags by vendor and repair deviations in plan-variable order.
pub fn build_program(params: &ParameterSetting) -> Result<ConstraintProgram> {
    params.validate()?;
    let mut b = Builder { variables: Vec::new() };
    let mut idx = VarIndex::default();

    // offers
    let mut offers: Vec<_> = params.vendor_offers.iter().collect();
    offers.sort_by(|x, y| {
        (&x.vendor_id, &x.product_id, x.tier_min_qty, &x.offer_id)
            .cmp(&(&y.vendor_id, &y.product_id, y.tier_min_qty, &y.offer_id))
    });
    let mut links = Vec::new();
    for o in &offers {
        let cap = if o.withdrawn { 0 } else { o.tier_max_qty };
        let q = b.add(
            format!("q[{}]", o.offer_id),
            VarRole::PurchaseQty {
                offer_id: o.offer_id.clone(),
                vendor_id: o.vendor_id.clone(),
                product_id: o.product_id.clone(),
            },
            0,
            cap,
        );
        let used = b.add(
            format!("b[{}]", o.offer_id),
            VarRole::OfferUsed { offer_id: o.offer_id.clone() },
            0,
            if o.withdrawn { 0 } else { 1 },
        );
        links.push(IndicatorLink { indicator: used, quantity: q, lower: o.tier_min_qty, upper: o.tier_max_qty });
        idx.offers.insert(o.offer_id.clone(), (q, used));
    }

    // assembly routes; bound each by the total units any stage could need
    let total_demand: i64 = params.demands.iter().map(|d| d.quantity).sum();
    let mut boms: Vec<_> = params.boms.iter().collect();
    boms.sort_by(|x, y| x.bom_id.cmp(&y.bom_id));
    for bom in &boms {
        let need = assembly_bound(params, &bom.output_product_id, total_demand);
        let routes: Vec<Option<String>> = if bom.route_workcenter_ids.is_empty() {
            vec![None]
        } else {
            let mut r: Vec<_> = bom
                .route_workcenter_ids
                .iter()
                .filter(|w| {
                    params
                        .workcenters
                        .iter()
                        .any(|wc| &wc.workcenter_id == *w && wc.qualified_bom_ids.contains(&bom.bom_id))
                })
                .cloned()
                .map(Some)
                .collect();
            r.sort();
            r
        };
        for wc in routes {
            let name = match &wc {
                Some(w) => format!("a[{}@{}]", bom.bom_id, w),
                None => format!("a[{}]", bom.bom_id),
            };
            let a = b.add(
                name,
                VarRole::AssemblyQty { bom_id: bom.bom_id.clone(), workcenter_id: wc.clone() },
                0,
                need,
            );
            idx.assembly.insert((bom.bom_id.clone(), wc), a);
        }
    }

    // stock allocations and accept flags
    let mut orders: Vec<_> = params.demands.iter().collect();
    orders.sort_by(|x, y| x.order_id.cmp(&y.order_id));
    let baseline_alloc: BTreeMap<&str, i64> = params
        .repair_baseline
        .iter()
        .flat_map(|rb| rb.allocations.iter().map(|a| (a.order_id.as_str(), a.qty)))
        .collect();
    for d in &orders {
        let accepted = params.is_accepted(d);
        let lower = baseline_alloc.get(d.order_id.as_str()).copied().unwrap_or(0);
        let upper = if accepted { d.quantity } else { 0 };
        let s = b.add(
            format!("s[{}]", d.order_id),
            VarRole::StockAlloc { order_id: d.order_id.clone() },
            lower.min(upper),
            upper,
        );
        idx.stock.insert(d.order_id.clone(), s);
    }
    for d in orders.iter().filter(|d| d.must_screen) {
        let acc = b.add(
            format!("accept[{}]", d.order_id),
            VarRole::Accept { order_id: d.order_id.clone() },
            0,
            1,
        );
        idx.accept.insert(d.order_id.clone(), acc);
    }

    if params.objective_type == ObjectiveType::VendorConsolidation {
        let mut vendors: Vec<&str> = params.vendor_offers.iter().map(|o| o.vendor_id.as_str()).collect();
        vendors.sort();
        vendors.dedup();
        for v in vendors {
            let y = b.add(format!("y[{v}]"), VarRole::VendorUsed { vendor_id: v.to_string() }, 0, 1);
            idx.vendor_used.insert(v.to_string(), y);
        }
    }

    let mut cons = Vec::new();

    // stock availability per sold product
    let mut sold: Vec<&str> = params.demands.iter().map(|d| d.product_id.as_str()).collect();
    sold.sort();
    sold.dedup();
    for p in &sold {
        let terms: Vec<_> = orders
            .iter()
            .filter(|d| d.product_id == *p)
            .map(|d| (idx.stock[&d.order_id], 1))
            .collect();
        cons.push(LinearConstraint::new(format!("stock[{p}]"), terms, Comparator::Le, params.stock(p)));
    }

    // cumulative on-time coverage per (product, deadline)
    for p in &sold {
        let mut deadlines: Vec<i64> = orders.iter().filter(|d| d.product_id == *p).map(|d| d.deadline_day).collect();
        deadlines.sort();
        deadlines.dedup();
        for dl in deadlines {
            let mut terms = Vec::new();
            let mut rhs = 0;
            for d in orders.iter().filter(|d| d.product_id == *p && d.deadline_day <= dl) {
                terms.push((idx.stock[&d.order_id], 1));
                match idx.accept.get(&d.order_id) {
                    Some(acc) => terms.push((*acc, -d.quantity)),
                    None => rhs += d.quantity,
                }
            }
            for o in &offers {
                if o.product_id == *p && o.lead_time_days <= dl {
                    terms.push((idx.offers[&o.offer_id].0, 1));
                }
            }
            for bom in boms.iter().filter(|bm| bm.output_product_id == *p && bm.finish_day() <= dl) {
                for ((bid, _), a) in &idx.assembly {
                    if *bid == bom.bom_id {
                        terms.push((*a, 1));
                    }
                }
            }
            cons.push(LinearConstraint::new(format!("cover[{p}@{dl}]"), terms, Comparator::Ge, rhs));
        }
    }

    // component availability before each production start
    let mut bom_rows: BTreeMap<(String, i64), ()> = BTreeMap::new();
    for bom in &boms {
        for c in &bom.components {
            bom_rows.insert((c.product_id.clone(), bom.build_start_day), ());
        }
    }
    for (comp, start) in bom_rows.keys() {
        let mut terms = Vec::new();
        for user in boms.iter().filter(|bm| bm.build_start_day <= *start) {
            if let Some(c) = user.components.iter().find(|c| &c.product_id == comp) {
                for ((bid, _), a) in &idx.assembly {
                    if *bid == user.bom_id {
                        terms.push((*a, c.qty_per_unit));
                    }
                }
            }
        }
        for o in offers.iter().filter(|o| &o.product_id == comp && o.lead_time_days <= *start) {
            terms.push((idx.offers[&o.offer_id].0, -1));
        }
        for maker in boms.iter().filter(|bm| &bm.output_product_id == comp && bm.finish_day() <= *start) {
            for ((bid, _), a) in &idx.assembly {
                if *bid == maker.bom_id {
                    terms.push((*a, -1));
                }
            }
        }
        cons.push(LinearConstraint::new(
            format!("components[{comp}@{start}]"),
            terms,
            Comparator::Le,
            params.stock(comp),
        ));
    }

    // aggregate workcenter minutes
    let mut wcs: Vec<_> = params.workcenters.iter().collect();
    wcs.sort_by(|x, y| x.workcenter_id.cmp(&y.workcenter_id));
    for wc in wcs {
        let terms: Vec<_> = idx
            .assembly
            .iter()
            .filter(|((_, w), _)| w.as_deref() == Some(wc.workcenter_id.as_str()))
            .map(|((bid, _), a)| (*a, params.bom(bid).map_or(0, |bm| bm.minutes_per_unit)))
            .collect();
        if !terms.is_empty() {
            cons.push(LinearConstraint::new(
                format!("capacity[{}]", wc.workcenter_id),
                terms,
                Comparator::Le,
                wc.capacity_minutes,
            ));
        }
    }

    // spend weights
    let mut spend = Vec::new();
    for o in &offers {
        spend.push((idx.offers[&o.offer_id].0, o.unit_price_cents));
    }
    for ((bid, _), a) in &idx.assembly {
        let cost = params.bom(bid).map_or(0, |bm| bm.conversion_cost_cents);
        spend.push((*a, cost));
    }
    spend.sort();

    if let Some(margin) = params.margin_policy {
        cons.push(LinearConstraint::new(
            "margin",
            spend.clone(),
            Comparator::Le,
            margin.spend_cap_cents(params.accepted_revenue_cents()),
        ));
    }

    // screening
    for d in orders.iter().filter(|d| d.must_screen) {
        let acc = idx.accept[&d.order_id];
        cons.push(LinearConstraint::new(
            format!("screen[{}]", d.order_id),
            vec![(acc, 1)],
            Comparator::Eq,
            i64::from(params.is_accepted(d)),
        ));
        cons.push(LinearConstraint::new(
            format!("retain[{}]", d.order_id),
            vec![(idx.stock[&d.order_id], 1), (acc, -d.quantity)],
            Comparator::Le,
            0,
        ));
    }

    // distinct vendors
    for o in &offers {
        if let Some(y) = idx.vendor_used.get(&o.vendor_id) {
            cons.push(LinearConstraint::new(
                format!("vendor[{}]", o.offer_id),
                vec![(idx.offers[&o.offer_id].1, 1), (*y, -1)],
                Comparator::Le,
                0,
            ));
        }
    }

    // repair distance bookkeeping
    let mut baseline = None;
    let mut deviation_terms = Vec::new();
    if let Some(rb) = &params.repair_baseline {
        let mut base_q: BTreeMap<&str, i64> = BTreeMap::new();
        for po in &rb.purchases {
            for l in &po.lines {
                *base_q.entry(l.offer_id.as_str()).or_default() += l.qty;
            }
        }
        let mut base_a: BTreeMap<(String, Option<String>), i64> = BTreeMap::new();
        for bl in &rb.builds {
            *base_a.entry((bl.bom_id.clone(), bl.workcenter_id.clone())).or_default() += bl.qty;
        }
        let mut plan: Vec<(VarId, i64)> = Vec::new();
        for o in &offers {
            plan.push((idx.offers[&o.offer_id].0, base_q.get(o.offer_id.as_str()).copied().unwrap_or(0)));
        }
        for (key, a) in &idx.assembly {
            plan.push((*a, base_a.get(key).copied().unwrap_or(0)));
        }
        for (x, base) in &plan {
            let decl = &b.variables[x.idx()];
            let ub = (decl.upper - base).max(base - decl.lower).max(0);
            let name = format!("d[{}]", decl.name);
            let dv = b.add(name.clone(), VarRole::RepairDeviation { of: *x }, 0, ub);
            cons.push(LinearConstraint::new(format!("{name}+"), vec![(dv, 1), (*x, -1)], Comparator::Ge, -base));
            cons.push(LinearConstraint::new(format!("{name}-"), vec![(dv, 1), (*x, 1)], Comparator::Ge, *base));
            deviation_terms.push((dv, 1));
        }
        baseline = Some(plan);
    }

    let (primary, secondary) = match params.objective_type {
        ObjectiveType::MinNewSpend => (spend.clone(), None),
        ObjectiveType::VendorConsolidation => {
            (idx.vendor_used.values().map(|y| (*y, 1)).collect(), Some(spend.clone()))
        }
        ObjectiveType::CapacityPreservation => {
            let minutes = idx
                .assembly
                .iter()
                .filter(|((_, w), _)| w.is_some())
                .map(|((bid, _), a)| (*a, params.bom(bid).map_or(0, |bm| bm.minutes_per_unit)))
                .collect();
            (minutes, Some(spend.clone()))
        }
        ObjectiveType::RepairPlan => (deviation_terms, Some(spend.clone())),
        ObjectiveType::ConstraintOnly => (Vec::new(), None),
    };

    let n = b.variables.len();
    let program = ConstraintProgram {
        variables: b.variables,
        linear_constraints: cons,
        indicator_links: links,
        objective: ObjectiveSpec {
            objective_type: params.objective_type,
            primary_coeffs: primary,
            secondary_spend_coeffs: secondary,
            baseline_assignment: baseline,
        },
        canonical_order: (0..n as u32).map(VarId).collect(),
    };
    program.well_formed()?;
    Ok(program)
}

/// Upper bound on units of `product` any assembly route could usefully make.
fn assembly_bound(params: &ParameterSetting, product: &str, total_demand: i64) -> i64 {
    let direct: i64 = params
        .demands
        .iter()
        .filter(|d| d.product_id == product)
        .map(|d| d.quantity)
        .sum();
    if direct > 0 {
        return direct;
    }
    // intermediate: bounded by what downstream BOMs could consume
    let mut bound = 0;
    for user in params.boms.iter() {
        if let Some(c) = user.components.iter().find(|c| c.product_id == product) {
            bound += c.qty_per_unit * assembly_bound(params, &user.output_product_id, total_demand);
        }
    }
    if bound == 0 && params.product(product).map(|p| p.role) != Some(ProductRole::Finished) {
        total_demand
    } else {
        bound
    }
}
