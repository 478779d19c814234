//! Rule evaluation over a terminal snapshot.
//!
//! Every constraint rule is at least as strict as the corresponding rows of the
//! constraint program: a snapshot passing all of them maps to a feasible
//! assignment whose objective equals the realized metric.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::config::{Dimension, OrderTerm, RuleId, RuleKind, VerifierConfig};
use crate::erp::{adjacent_digest, InvoiceKind, InvoiceState, ManufacturingOrder, OrderState, PurchaseLine,
    PurchaseOrder, SalesOrder, Tables, TerminalState};
use crate::error::{Error, Result};
use crate::model::{BomSpec, ObjectiveType, VendorOffer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "NA")]
    Na,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Na => "NA",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleResult {
    pub rule_id: RuleId,
    pub dimension: Dimension,
    pub verdict: Verdict,
    pub detail: String,
}

type Eval = (Verdict, String);

fn pass(detail: impl Into<String>) -> Eval {
    (Verdict::Pass, detail.into())
}

fn fail(detail: impl Into<String>) -> Eval {
    (Verdict::Fail, detail.into())
}

fn na(detail: impl Into<String>) -> Eval {
    (Verdict::Na, detail.into())
}

fn check(ok: bool, good: impl Into<String>, bad: impl Into<String>) -> Eval {
    if ok {
        pass(good)
    } else {
        fail(bad)
    }
}

/// Read-only projections of a snapshot shared by all rules.
pub(crate) struct View<'a> {
    pub cfg: &'a VerifierConfig,
    pub t: &'a Tables,
    pub pos: Vec<&'a PurchaseOrder>,
    pub mos: Vec<&'a ManufacturingOrder>,
}

impl<'a> View<'a> {
    pub fn new(cfg: &'a VerifierConfig, terminal: &'a TerminalState) -> Self {
        let t = terminal.tables();
        View {
            cfg,
            t,
            pos: t.purchase_orders.iter().filter(|p| p.state == OrderState::Confirmed).collect(),
            mos: t.manufacturing_orders.iter().filter(|m| m.state == OrderState::Confirmed).collect(),
        }
    }

    fn live_orders(&self, order_id: &str) -> Vec<&'a SalesOrder> {
        self.t
            .sales_orders
            .iter()
            .filter(|s| s.client_order_ref == order_id && s.state != OrderState::Cancelled)
            .collect()
    }

    /// The single confirmed sales order carrying `order_id`, or why there is none.
    pub fn confirmed_so(&self, order_id: &str) -> std::result::Result<&'a SalesOrder, String> {
        match self.live_orders(order_id).as_slice() {
            [] => Err(format!("no open sales order for {order_id}")),
            [so] if so.state == OrderState::Confirmed => Ok(so),
            [so] => Err(format!("SO-{} for {order_id} is not confirmed", so.id)),
            many => Err(format!("{} open sales orders for {order_id}", many.len())),
        }
    }

    fn allocated(&self, order: &OrderTerm) -> i64 {
        self.confirmed_so(&order.order_id).map_or(0, |so| {
            so.lines.iter().filter(|l| l.product_id == order.product_id).map(|l| l.allocated_qty).sum()
        })
    }

    fn known_offer(&self, line: &PurchaseLine) -> Option<&'a VendorOffer> {
        self.cfg.offer(&line.offer_id).filter(|o| o.product_id == line.product_id)
    }

    pub fn lines_of(&self, product_id: &str) -> Vec<(&'a PurchaseOrder, &'a PurchaseLine)> {
        self.pos
            .iter()
            .flat_map(|po| po.lines.iter().map(move |l| (*po, l)))
            .filter(|(_, l)| l.product_id == product_id)
            .collect()
    }

    pub fn offer_qty(&self, offer_id: &str) -> i64 {
        self.pos.iter().flat_map(|po| po.lines.iter()).filter(|l| l.offer_id == offer_id).map(|l| l.qty).sum()
    }

    fn mo_bom(&self, mo: &ManufacturingOrder) -> Option<&'a BomSpec> {
        self.cfg.bom(&mo.bom_id)
    }

    /// Purchased and built units of `product_id` usable by `day`.
    fn supply_by(&self, product_id: &str, day: i64) -> i64 {
        let bought: i64 = self
            .lines_of(product_id)
            .into_iter()
            .filter_map(|(po, l)| {
                let o = self.known_offer(l)?;
                (!o.withdrawn && po.order_day + o.lead_time_days <= day).then_some(l.qty)
            })
            .sum();
        let built: i64 = self
            .mos
            .iter()
            .filter(|m| self.mo_bom(m).is_some_and(|b| b.output_product_id == product_id) && m.end_day <= day)
            .map(|m| m.qty)
            .sum();
        bought + built
    }

    fn accepted_of<'b>(&self, product_id: &'b str) -> impl Iterator<Item = &'a OrderTerm> + 'b
    where
        'a: 'b,
    {
        self.cfg.orders.iter().filter(move |o| o.accepted && o.product_id == product_id)
    }

    /// Repriced new spend: authoritative tier prices plus conversion costs.
    pub fn spend(&self) -> i64 {
        let bought: i64 = self
            .pos
            .iter()
            .flat_map(|po| po.lines.iter())
            .filter_map(|l| self.known_offer(l).map(|o| l.qty * o.unit_price_cents))
            .sum();
        let built: i64 =
            self.mos.iter().filter_map(|m| self.mo_bom(m).map(|b| m.qty * b.conversion_cost_cents)).sum();
        bought + built
    }

    pub fn vendors_used(&self) -> i64 {
        let mut used = BTreeSet::new();
        for o in &self.cfg.offers {
            if self.offer_qty(&o.offer_id) > 0 {
                used.insert(o.vendor_id.as_str());
            }
        }
        used.len() as i64
    }

    pub fn routed_minutes(&self) -> i64 {
        self.mos
            .iter()
            .filter(|m| m.workcenter_id.is_some())
            .filter_map(|m| self.mo_bom(m).map(|b| m.qty * b.minutes_per_unit))
            .sum()
    }

    pub fn repair_distance(&self) -> i64 {
        let Some(rp) = &self.cfg.repair else { return 0 };
        let mut d = 0;
        for o in &self.cfg.offers {
            let base = rp.baseline_offer_qty.get(&o.offer_id).copied().unwrap_or(0);
            d += (self.offer_qty(&o.offer_id) - base).abs();
        }
        let mut built: BTreeMap<(String, Option<String>), i64> = BTreeMap::new();
        for m in &self.mos {
            *built.entry((m.bom_id.clone(), m.workcenter_id.clone())).or_default() += m.qty;
        }
        let mut base: BTreeMap<(String, Option<String>), i64> = BTreeMap::new();
        for b in &rp.baseline_builds {
            *base.entry((b.bom_id.clone(), b.workcenter_id.clone())).or_default() += b.qty;
        }
        let keys: BTreeSet<_> = built.keys().chain(base.keys()).cloned().collect();
        for k in keys {
            d += (built.get(&k).copied().unwrap_or(0) - base.get(&k).copied().unwrap_or(0)).abs();
        }
        d
    }

    /// Primary metric and, when defined, the spend secondary.
    pub fn realized(&self) -> (i64, Option<i64>) {
        let spend = self.spend();
        match self.cfg.objective.objective_type {
            ObjectiveType::MinNewSpend => (spend, None),
            ObjectiveType::VendorConsolidation => (self.vendors_used(), Some(spend)),
            ObjectiveType::CapacityPreservation => (self.routed_minutes(), Some(spend)),
            ObjectiveType::RepairPlan => (self.repair_distance(), Some(spend)),
            ObjectiveType::ConstraintOnly => (0, None),
        }
    }

    fn origin_serves(&self, origin: &[u32], product_id: &str) -> std::result::Result<(), String> {
        if origin.is_empty() {
            return Err("origin is empty".into());
        }
        let mut serves = false;
        for id in origin {
            let so = self
                .t
                .sales_orders
                .iter()
                .find(|s| s.id == *id)
                .ok_or_else(|| format!("origin SO-{id} does not exist"))?;
            if so.state != OrderState::Confirmed {
                return Err(format!("origin SO-{id} is not confirmed"));
            }
            serves |= so.lines.iter().any(|l| self.cfg.supply_closure(&l.product_id).contains(product_id));
        }
        if serves {
            Ok(())
        } else {
            Err(format!("no origin order needs {product_id}"))
        }
    }

    fn eval(&self, id: &RuleId) -> Result<Eval> {
        let unknown = || Error::UnknownRuleId(id.to_string());
        let order = || self.cfg.order(&id.subject).ok_or_else(unknown);
        let bom = || self.cfg.bom(&id.subject).ok_or_else(unknown);
        use RuleKind::*;
        Ok(match id.kind {
            DemandCoverage => {
                let o = order()?;
                match self.confirmed_so(&o.order_id) {
                    Err(e) => fail(e),
                    Ok(so) => {
                        let line_ok = so.customer_id == o.customer_id
                            && so.lines.len() == 1
                            && so.lines[0].product_id == o.product_id
                            && so.lines[0].qty == o.qty
                            && (0..=o.qty).contains(&so.lines[0].allocated_qty);
                        if !line_ok {
                            fail(format!("SO-{} does not carry {} x {} for {}", so.id, o.qty, o.product_id, o.customer_id))
                        } else {
                            let need: i64 = self.accepted_of(&o.product_id).map(|d| d.qty).sum();
                            let have: i64 = self.accepted_of(&o.product_id).map(|d| self.allocated(d)).sum::<i64>()
                                + self.supply_by(&o.product_id, self.cfg.horizon_days);
                            check(have >= need, format!("{have} >= {need}"), format!("supply {have} < demand {need}"))
                        }
                    }
                }
            }
            DeadlineFulfillment => {
                let o = order()?;
                match self.confirmed_so(&o.order_id) {
                    Err(e) => fail(e),
                    Ok(so) if so.commitment_day.is_none_or(|d| d > o.deadline_day) => {
                        fail(format!("commitment {:?} misses deadline {}", so.commitment_day, o.deadline_day))
                    }
                    Ok(_) => {
                        let dl = o.deadline_day;
                        let early = || {
                            self.cfg.orders.iter().filter(move |d| d.product_id == o.product_id && d.deadline_day <= dl)
                        };
                        let need: i64 = early().filter(|d| d.accepted).map(|d| d.qty).sum();
                        let have: i64 = early().map(|d| self.allocated(d)).sum::<i64>() + self.supply_by(&o.product_id, dl);
                        check(
                            have >= need,
                            format!("{have} >= {need} by day {dl}"),
                            format!("only {have} of {need} by day {dl}"),
                        )
                    }
                }
            }
            ListPrice => {
                let o = order()?;
                match self.confirmed_so(&o.order_id) {
                    Err(e) => fail(e),
                    Ok(so) => check(
                        so.lines.iter().all(|l| l.unit_price_cents == o.unit_list_price_cents),
                        "list price",
                        format!("SO-{} deviates from list price {}", so.id, o.unit_list_price_cents),
                    ),
                }
            }
            SaleRevenue => {
                let o = order()?;
                match self.confirmed_so(&o.order_id) {
                    Err(e) => fail(e),
                    Ok(so) => check(
                        so.amount_cents() == o.value_cents(),
                        "revenue",
                        format!("amount {} != {}", so.amount_cents(), o.value_cents()),
                    ),
                }
            }
            BudgetCompliance => {
                let o = order()?;
                match self.confirmed_so(&o.order_id) {
                    Err(e) => fail(e),
                    Ok(so) => check(
                        so.amount_cents() <= o.budget_cents,
                        "within budget",
                        format!("amount {} > budget {}", so.amount_cents(), o.budget_cents),
                    ),
                }
            }
            SupplyCoverage => {
                let p = id.subject.as_str();
                if let Some(bad) = self.accepted_of(p).find_map(|d| self.confirmed_so(&d.order_id).err()) {
                    return Ok(fail(bad));
                }
                let allocs: Vec<i64> = self
                    .t
                    .sales_orders
                    .iter()
                    .filter(|s| s.state != OrderState::Cancelled)
                    .flat_map(|s| s.lines.iter())
                    .filter(|l| l.product_id == p)
                    .map(|l| l.allocated_qty)
                    .collect();
                let total: i64 = allocs.iter().sum();
                if allocs.iter().any(|a| *a < 0) || total > self.cfg.stock(p) {
                    return Ok(fail(format!("allocations {total} exceed stock {}", self.cfg.stock(p))));
                }
                let need: i64 = self.accepted_of(p).map(|d| d.qty).sum();
                let have: i64 =
                    self.accepted_of(p).map(|d| self.allocated(d)).sum::<i64>() + self.supply_by(p, self.cfg.horizon_days);
                check(have >= need, format!("{have} >= {need}"), format!("supply {have} < demand {need}"))
            }
            SupplyTimingFeasible => {
                let lines = self.lines_of(&id.subject);
                if lines.is_empty() {
                    return Ok(na("no purchase lines"));
                }
                for (po, l) in lines {
                    let Some(o) = self.known_offer(l) else {
                        return Ok(fail(format!("PO-{} line names unknown offer {}", po.id, l.offer_id)));
                    };
                    let arrival = po.order_day + o.lead_time_days;
                    if po.order_day < 0 || l.expected_day != arrival || arrival > self.cfg.horizon_days {
                        return Ok(fail(format!(
                            "PO-{} expects day {} but offer {} arrives day {arrival}",
                            po.id, l.expected_day, o.offer_id
                        )));
                    }
                }
                pass("lead times respected")
            }
            PoPriceTierCompliance => {
                let lines = self.lines_of(&id.subject);
                if lines.is_empty() {
                    return Ok(na("no purchase lines"));
                }
                for (po, l) in lines {
                    let Some(o) = self.known_offer(l) else {
                        return Ok(fail(format!("PO-{} line names unknown offer {}", po.id, l.offer_id)));
                    };
                    let diff = (l.unit_price_cents as i128 - o.unit_price_cents as i128).abs();
                    if diff > 1 && diff * 1000 > 5 * o.unit_price_cents as i128 {
                        return Ok(fail(format!(
                            "PO-{} writes {} instead of tier price {}",
                            po.id, l.unit_price_cents, o.unit_price_cents
                        )));
                    }
                }
                pass("tier prices")
            }
            PoMinQtyCompliance => {
                let p = id.subject.as_str();
                let lines = self.lines_of(p);
                if lines.is_empty() {
                    return Ok(na("no purchase lines"));
                }
                if let Some((po, l)) = lines.iter().find(|(_, l)| l.qty < 1 || self.known_offer(l).is_none()) {
                    return Ok(fail(format!("PO-{} has an invalid line on {}", po.id, l.offer_id)));
                }
                for o in self.cfg.offers.iter().filter(|o| o.product_id == p) {
                    let q = self.offer_qty(&o.offer_id);
                    let ok = q == 0 || (!o.withdrawn && o.tier_min_qty <= q && q <= o.tier_max_qty);
                    if !ok {
                        return Ok(fail(format!(
                            "offer {} ordered {q}, tier [{}, {}]{}",
                            o.offer_id,
                            o.tier_min_qty,
                            o.tier_max_qty,
                            if o.withdrawn { " withdrawn" } else { "" }
                        )));
                    }
                }
                pass("tier quantities")
            }
            PoConsolidationCompliance => {
                if self.pos.is_empty() {
                    return Ok(na("no purchase orders"));
                }
                let mut per_vendor: BTreeMap<&str, usize> = BTreeMap::new();
                for po in &self.pos {
                    *per_vendor.entry(po.vendor_id.as_str()).or_default() += 1;
                }
                match per_vendor.iter().find(|(_, n)| **n > 1) {
                    Some((v, n)) => fail(format!("{n} purchase orders for {v}")),
                    None => pass("one purchase order per vendor"),
                }
            }
            NewSpendMarginPolicy => {
                let Some(m) = self.cfg.margin_policy else { return Ok(na("no margin policy")) };
                let revenue: i64 = self
                    .cfg
                    .orders
                    .iter()
                    .filter(|o| o.accepted && self.confirmed_so(&o.order_id).is_ok())
                    .map(OrderTerm::value_cents)
                    .sum();
                let (spend, cap) = (self.spend(), m.spend_cap_cents(revenue));
                if revenue == 0 {
                    fail("no retained revenue")
                } else {
                    check(spend <= cap, format!("spend {spend} <= {cap}"), format!("spend {spend} > cap {cap}"))
                }
            }
            RegularInvoiceAmountMatchesPolicy | DownpaymentInvoiceAmountMatchesPolicy => {
                let o = order()?;
                let (kind, want) = if id.kind == RegularInvoiceAmountMatchesPolicy {
                    (InvoiceKind::Regular, self.cfg.invoicing_policy.regular_cents(o.value_cents()))
                } else {
                    (InvoiceKind::Downpayment, self.cfg.invoicing_policy.downpayment_cents(o.value_cents()))
                };
                match self.confirmed_so(&o.order_id) {
                    Err(e) => fail(e),
                    Ok(so) => {
                        let amounts: Vec<i64> = self
                            .t
                            .invoices
                            .iter()
                            .filter(|i| i.sales_order == so.id && i.kind == kind && i.state == InvoiceState::Posted)
                            .map(|i| i.amount_cents)
                            .collect();
                        check(amounts == [want], format!("{want}"), format!("posted {amounts:?}, expected [{want}]"))
                    }
                }
            }
            RejectedOrderNotInvoiced => {
                let o = order()?;
                let ids: BTreeSet<u32> = self
                    .t
                    .sales_orders
                    .iter()
                    .filter(|s| s.client_order_ref == o.order_id)
                    .map(|s| s.id)
                    .collect();
                let n = self
                    .t
                    .invoices
                    .iter()
                    .filter(|i| ids.contains(&i.sales_order) && i.state == InvoiceState::Posted)
                    .count();
                check(n == 0, "not invoiced", format!("{n} invoices posted"))
            }
            PoOriginTraceability => {
                let lines = self.lines_of(&id.subject);
                if lines.is_empty() {
                    return Ok(na("no purchase lines"));
                }
                for (po, _) in lines {
                    if let Err(e) = self.origin_serves(&po.origin, &id.subject) {
                        return Ok(fail(format!("PO-{}: {e}", po.id)));
                    }
                }
                pass("origins set")
            }
            MrpOriginTraceability => {
                let b = bom()?;
                let mos: Vec<_> = self.mos.iter().filter(|m| m.bom_id == b.bom_id).collect();
                if mos.is_empty() {
                    return Ok(na("no manufacturing orders"));
                }
                for m in mos {
                    if let Err(e) = self.origin_serves(&m.origin, &b.output_product_id) {
                        return Ok(fail(format!("MO-{}: {e}", m.id)));
                    }
                }
                pass("origins set")
            }
            AdjacentDataUntouched => {
                let d = adjacent_digest(&self.t.adjacent_records);
                check(d == self.cfg.adjacent_digest, "digest matches", "adjacent records changed")
            }
            MoScheduleCompliance => {
                let b = bom()?;
                let mos: Vec<_> = self.mos.iter().filter(|m| m.bom_id == b.bom_id).collect();
                if mos.is_empty() {
                    return Ok(na("no manufacturing orders"));
                }
                for m in mos {
                    let route_ok = match &m.workcenter_id {
                        None => b.route_workcenter_ids.is_empty(),
                        Some(w) => {
                            b.route_workcenter_ids.contains(w)
                                && self
                                    .cfg
                                    .workcenters
                                    .iter()
                                    .any(|wc| &wc.workcenter_id == w && wc.qualified_bom_ids.contains(&b.bom_id))
                        }
                    };
                    if m.qty < 1 || m.start_day != b.build_start_day || m.end_day != b.finish_day() || !route_ok {
                        return Ok(fail(format!(
                            "MO-{} runs days {}..{} on {:?}; expected {}..{} on a qualified route",
                            m.id,
                            m.start_day,
                            m.end_day,
                            m.workcenter_id,
                            b.build_start_day,
                            b.finish_day()
                        )));
                    }
                }
                pass("schedule")
            }
            MoComponentFeasibility => {
                let b = bom()?;
                if !self.mos.iter().any(|m| m.bom_id == b.bom_id) {
                    return Ok(na("no manufacturing orders"));
                }
                let start = b.build_start_day;
                for c in &b.components {
                    let used: i64 = self
                        .mos
                        .iter()
                        .filter_map(|m| {
                            let mb = self.mo_bom(m)?;
                            (mb.build_start_day <= start).then_some(())?;
                            let per = mb.components.iter().find(|x| x.product_id == c.product_id)?.qty_per_unit;
                            Some(per * m.qty)
                        })
                        .sum();
                    let avail = self.cfg.stock(&c.product_id) + self.supply_by(&c.product_id, start);
                    if used > avail {
                        return Ok(fail(format!("{} needs {used} by day {start}, {avail} available", c.product_id)));
                    }
                }
                pass("components available")
            }
            AssemblyCapacityCompliance => {
                let w = &id.subject;
                let wc = self.cfg.workcenters.iter().find(|x| &x.workcenter_id == w).ok_or_else(unknown)?;
                let mos: Vec<_> = self.mos.iter().filter(|m| m.workcenter_id.as_ref() == Some(w)).collect();
                if mos.is_empty() {
                    return Ok(na("no manufacturing orders"));
                }
                let minutes: i64 = mos.iter().map(|m| m.qty * self.mo_bom(m).map_or(0, |b| b.minutes_per_unit)).sum();
                check(
                    minutes <= wc.capacity_minutes,
                    format!("{minutes} <= {} minutes", wc.capacity_minutes),
                    format!("{minutes} > {} minutes", wc.capacity_minutes),
                )
            }
            ForbiddenFinishedMoAbsent => {
                if self.mos.is_empty() {
                    return Ok(na("no manufacturing orders"));
                }
                let needed: BTreeSet<String> = self
                    .cfg
                    .orders
                    .iter()
                    .filter(|o| o.accepted)
                    .flat_map(|o| self.cfg.supply_closure(&o.product_id))
                    .collect();
                match self.mos.iter().find(|m| self.mo_bom(m).is_none_or(|b| !needed.contains(&b.output_product_id))) {
                    Some(m) => fail(format!("MO-{} builds with {} which no accepted order needs", m.id, m.bom_id)),
                    None => pass("no forbidden builds"),
                }
            }
            TaskStateTransitionsCompleted => {
                for o in &self.cfg.orders {
                    if o.accepted {
                        if let Err(e) = self.confirmed_so(&o.order_id) {
                            return Ok(fail(e));
                        }
                    } else if !self.live_orders(&o.order_id).is_empty() {
                        return Ok(fail(format!("rejected order {} is still open", o.order_id)));
                    }
                }
                pass("all orders settled")
            }
            SeededOrderConfirmed => {
                let o = order()?;
                match self.confirmed_so(&o.order_id) {
                    Err(e) => fail(e),
                    Ok(so) => pass(format!("SO-{} confirmed", so.id)),
                }
            }
            SeededOrderCancelled => {
                let o = order()?;
                let all: Vec<_> = self.t.sales_orders.iter().filter(|s| s.client_order_ref == o.order_id).collect();
                check(
                    !all.is_empty() && all.iter().all(|s| s.state == OrderState::Cancelled),
                    "cancelled",
                    format!("{} not cancelled", o.order_id),
                )
            }
            RepairStateCompliance => {
                let Some(rp) = &self.cfg.repair else { return Ok(na("not a repair task")) };
                if let Some(po) = self.pos.iter().find(|p| p.vendor_id == rp.withdrawn_vendor_id) {
                    return Ok(fail(format!("PO-{} still relies on withdrawn {}", po.id, rp.withdrawn_vendor_id)));
                }
                for (order_id, base) in &rp.baseline_allocations {
                    let Some(o) = self.cfg.order(order_id) else { continue };
                    let got = self.allocated(o);
                    if got < *base {
                        return Ok(fail(format!("{order_id} allocation {got} below committed {base}")));
                    }
                }
                pass("plan repaired")
            }
        })
    }
}

/// Evaluates every configured rule, ordered by rule id.
pub fn run_rules(config: &VerifierConfig, terminal: &TerminalState) -> Result<Vec<RuleResult>> {
    let view = View::new(config, terminal);
    config
        .parsed_rules()?
        .into_iter()
        .map(|id| {
            let (verdict, detail) = view.eval(&id)?;
            Ok(RuleResult { dimension: id.kind.dimension(), rule_id: id, verdict, detail })
        })
        .collect()
}
