//! The mutable system of record, its actions, and terminal snapshots.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::records::*;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewSalesLine {
    pub product_id: String,
    pub qty: i64,
    pub unit_price_cents: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewPurchaseLine {
    pub offer_id: String,
    pub qty: i64,
    pub unit_price_cents: i64,
    pub expected_day: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginTarget {
    PurchaseOrder,
    ManufacturingOrder,
}

/// One write against the system of record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    CreateSalesOrder { client_order_ref: String, customer_id: String, requested_day: i64, lines: Vec<NewSalesLine> },
    ConfirmSalesOrder { sales_order: u32, commitment_day: i64 },
    CancelSalesOrder { sales_order: u32 },
    CreatePurchaseOrder { vendor_id: String, order_day: i64, lines: Vec<NewPurchaseLine>, origin: Vec<u32> },
    CancelPurchaseOrder { purchase_order: u32 },
    CreateManufacturingOrder {
        bom_id: String,
        qty: i64,
        workcenter_id: Option<String>,
        start_day: i64,
        end_day: i64,
        origin: Vec<u32>,
    },
    CancelManufacturingOrder { manufacturing_order: u32 },
    AllocateStock { sales_order: u32, product_id: String, qty: i64 },
    PostInvoice { sales_order: u32, kind: InvoiceKind, amount_cents: i64 },
    SetOrigin { target: OriginTarget, id: u32, origin: Vec<u32> },
    UpdateAdjacentRecord { key: String, field: String, value: String },
}

/// All record tables; this is what grading sees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tables {
    pub horizon_days: i64,
    pub products: BTreeMap<String, ProductRecord>,
    pub customers: BTreeMap<String, PartnerRecord>,
    pub vendors: BTreeMap<String, PartnerRecord>,
    pub vendor_offers: BTreeMap<String, OfferRecord>,
    pub boms: BTreeMap<String, BomRecord>,
    pub workcenters: BTreeMap<String, WorkcenterRecord>,
    pub stock_levels: BTreeMap<String, i64>,
    pub sales_orders: Vec<SalesOrder>,
    pub purchase_orders: Vec<PurchaseOrder>,
    pub manufacturing_orders: Vec<ManufacturingOrder>,
    pub invoices: Vec<Invoice>,
    pub adjacent_records: BTreeMap<String, AdjacentRecord>,
    /// Digest of the adjacent records as seeded.
    pub adjacent_seed_digest: String,
}

/// An immutable end-of-episode snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TerminalState(pub Tables);

/// Canonical JSON: key-sorted, two-space indent, trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json::Value maps are BTreeMap-backed, so keys come out sorted
    let v = serde_json::to_value(value).expect("serializable value");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable value");
    s.push('\n');
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn adjacent_digest(records: &BTreeMap<String, AdjacentRecord>) -> String {
    sha256_hex(canonical_json(records).as_bytes())
}

impl TerminalState {
    pub fn tables(&self) -> &Tables {
        &self.0
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedSnapshot(e.to_string()))
    }

    /// Digest of the transactional tables an agent is expected to change.
    pub fn task_records_digest(&self) -> String {
        let t = &self.0;
        let v = serde_json::json!({
            "sales_orders": t.sales_orders,
            "purchase_orders": t.purchase_orders,
            "manufacturing_orders": t.manufacturing_orders,
            "invoices": t.invoices,
        });
        sha256_hex(canonical_json(&v).as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErpState {
    tables: Tables,
    log: Vec<Action>,
}

fn so_ref(id: u32) -> String {
    format!("SO-{id}")
}

impl ErpState {
    /// Loads the seeded records; every cross reference must resolve.
    pub fn apply_seed(seed: &SeedSpec) -> Result<Self> {
        let dangling = |m: String| Error::DanglingReference(m);
        let products: BTreeMap<_, _> = seed.products.iter().map(|p| (p.product_id.clone(), p.clone())).collect();
        let customers: BTreeMap<_, _> = seed.customers.iter().map(|p| (p.partner_id.clone(), p.clone())).collect();
        let vendors: BTreeMap<_, _> = seed.vendors.iter().map(|p| (p.partner_id.clone(), p.clone())).collect();
        for o in &seed.vendor_offers {
            if !vendors.contains_key(&o.vendor_id) || !products.contains_key(&o.product_id) {
                return Err(dangling(format!("offer {}", o.offer_id)));
            }
        }
        for b in &seed.boms {
            let ok = products.contains_key(&b.output_product_id)
                && b.components.iter().all(|c| products.contains_key(&c.product_id))
                && b.route_workcenter_ids.iter().all(|w| seed.workcenters.iter().any(|x| &x.workcenter_id == w));
            if !ok {
                return Err(dangling(format!("bom {}", b.bom_id)));
            }
        }
        for p in seed.stock_levels.keys() {
            if !products.contains_key(p) {
                return Err(dangling(format!("stock for {p}")));
            }
        }
        let adjacent: BTreeMap<_, _> = seed.adjacent_records.iter().map(|a| (a.key.clone(), a.clone())).collect();
        let mut state = ErpState {
            tables: Tables {
                horizon_days: seed.horizon_days,
                products,
                customers,
                vendors,
                vendor_offers: seed.vendor_offers.iter().map(|o| (o.offer_id.clone(), o.clone())).collect(),
                boms: seed.boms.iter().map(|b| (b.bom_id.clone(), b.clone())).collect(),
                workcenters: seed.workcenters.iter().map(|w| (w.workcenter_id.clone(), w.clone())).collect(),
                stock_levels: seed.stock_levels.clone(),
                sales_orders: Vec::new(),
                purchase_orders: Vec::new(),
                manufacturing_orders: Vec::new(),
                invoices: Vec::new(),
                adjacent_seed_digest: adjacent_digest(&adjacent),
                adjacent_records: adjacent,
            },
            log: Vec::new(),
        };
        let mut by_ref = BTreeMap::new();
        for so in &seed.sales_orders {
            if !state.tables.customers.contains_key(&so.customer_id) || !state.tables.products.contains_key(&so.product_id)
            {
                return Err(dangling(format!("sales order {}", so.client_order_ref)));
            }
            let id = state.tables.sales_orders.len() as u32 + 1;
            state.tables.sales_orders.push(SalesOrder {
                id,
                client_order_ref: so.client_order_ref.clone(),
                customer_id: so.customer_id.clone(),
                lines: vec![SalesLine {
                    product_id: so.product_id.clone(),
                    qty: so.qty,
                    unit_price_cents: so.unit_price_cents,
                    allocated_qty: so.allocated_qty,
                }],
                state: so.state,
                requested_day: so.requested_day,
                commitment_day: (so.state == OrderState::Confirmed).then_some(so.requested_day),
            });
            by_ref.insert(so.client_order_ref.clone(), id);
        }
        let resolve = |refs: &[String]| -> Result<Vec<u32>> {
            refs.iter()
                .map(|r| by_ref.get(r).copied().ok_or_else(|| dangling(format!("origin {r}"))))
                .collect()
        };
        for po in &seed.purchase_orders {
            let origin = resolve(&po.origin_refs)?;
            let lines = po
                .lines
                .iter()
                .map(|l| NewPurchaseLine {
                    offer_id: l.offer_id.clone(),
                    qty: l.qty,
                    unit_price_cents: l.unit_price_cents,
                    expected_day: l.expected_day,
                })
                .collect();
            state.create_purchase(&po.vendor_id, po.order_day, lines, origin, true)?;
        }
        for mo in &seed.manufacturing_orders {
            let origin = resolve(&mo.origin_refs)?;
            state.create_manufacturing(&mo.bom_id, mo.qty, mo.workcenter_id.clone(), mo.start_day, mo.end_day, origin)?;
        }
        state.check_allocations()?;
        Ok(state)
    }

    pub fn tables(&self) -> &Tables {
        &self.tables
    }

    pub fn action_log(&self) -> &[Action] {
        &self.log
    }

    pub fn snapshot(&self) -> TerminalState {
        TerminalState(self.tables.clone())
    }

    fn sales_order_mut(&mut self, id: u32) -> Result<&mut SalesOrder> {
        self.tables
            .sales_orders
            .iter_mut()
            .find(|s| s.id == id)
            .ok_or_else(|| Error::UnknownEntity(so_ref(id)))
    }

    fn check_origin(&self, origin: &[u32]) -> Result<()> {
        for id in origin {
            if !self.tables.sales_orders.iter().any(|s| s.id == *id) {
                return Err(Error::UnknownEntity(so_ref(*id)));
            }
        }
        Ok(())
    }

    fn check_allocations(&self) -> Result<()> {
        let mut used: BTreeMap<&str, i64> = BTreeMap::new();
        for so in self.tables.sales_orders.iter().filter(|s| s.state != OrderState::Cancelled) {
            for l in &so.lines {
                *used.entry(l.product_id.as_str()).or_default() += l.allocated_qty;
            }
        }
        for (p, q) in used {
            let on_hand = self.tables.stock_levels.get(p).copied().unwrap_or(0);
            if q > on_hand {
                return Err(Error::InvalidTransition(format!("allocations of {p} ({q}) exceed stock ({on_hand})")));
            }
        }
        Ok(())
    }

    fn create_purchase(
        &mut self,
        vendor_id: &str,
        order_day: i64,
        lines: Vec<NewPurchaseLine>,
        origin: Vec<u32>,
        allow_inactive: bool,
    ) -> Result<u32> {
        if !self.tables.vendors.contains_key(vendor_id) {
            return Err(Error::UnknownEntity(vendor_id.to_string()));
        }
        if order_day < 0 || lines.is_empty() {
            return Err(Error::InvalidTransition("purchase order needs lines and a non-negative day".into()));
        }
        self.check_origin(&origin)?;
        let mut out = Vec::new();
        for l in lines {
            let offer = self
                .tables
                .vendor_offers
                .get(&l.offer_id)
                .ok_or_else(|| Error::UnknownEntity(l.offer_id.clone()))?;
            if offer.vendor_id != vendor_id {
                return Err(Error::InvalidTransition(format!("offer {} is not sold by {vendor_id}", l.offer_id)));
            }
            if !offer.active && !allow_inactive {
                return Err(Error::InvalidTransition(format!("offer {} is withdrawn", l.offer_id)));
            }
            if l.qty < 1 {
                return Err(Error::InvalidTransition("purchase line quantity must be positive".into()));
            }
            out.push(PurchaseLine {
                offer_id: l.offer_id,
                product_id: offer.product_id.clone(),
                qty: l.qty,
                unit_price_cents: l.unit_price_cents,
                expected_day: l.expected_day,
            });
        }
        let id = self.tables.purchase_orders.len() as u32 + 1;
        self.tables.purchase_orders.push(PurchaseOrder {
            id,
            vendor_id: vendor_id.to_string(),
            lines: out,
            order_day,
            state: OrderState::Confirmed,
            origin,
        });
        Ok(id)
    }

    fn create_manufacturing(
        &mut self,
        bom_id: &str,
        qty: i64,
        workcenter_id: Option<String>,
        start_day: i64,
        end_day: i64,
        origin: Vec<u32>,
    ) -> Result<u32> {
        if !self.tables.boms.contains_key(bom_id) {
            return Err(Error::UnknownEntity(bom_id.to_string()));
        }
        if let Some(w) = &workcenter_id {
            if !self.tables.workcenters.contains_key(w) {
                return Err(Error::UnknownEntity(w.clone()));
            }
        }
        if qty < 1 || start_day < 0 || end_day < start_day {
            return Err(Error::InvalidTransition("manufacturing order needs positive qty and ordered days".into()));
        }
        self.check_origin(&origin)?;
        let id = self.tables.manufacturing_orders.len() as u32 + 1;
        self.tables.manufacturing_orders.push(ManufacturingOrder {
            id,
            bom_id: bom_id.to_string(),
            qty,
            workcenter_id,
            start_day,
            end_day,
            state: OrderState::Confirmed,
            origin,
        });
        Ok(id)
    }

    /// Applies one action; on error the state is unchanged.
    pub fn apply_action(&mut self, action: &Action) -> Result<()> {
        let before = self.tables.clone();
        let res = self.apply_inner(action);
        match res {
            Ok(()) => {
                self.log.push(action.clone());
                Ok(())
            }
            Err(e) => {
                self.tables = before;
                Err(e)
            }
        }
    }

    fn apply_inner(&mut self, action: &Action) -> Result<()> {
        let invalid = |m: String| Error::InvalidTransition(m);
        match action {
            Action::CreateSalesOrder { client_order_ref, customer_id, requested_day, lines } => {
                if !self.tables.customers.contains_key(customer_id) {
                    return Err(Error::UnknownEntity(customer_id.clone()));
                }
                if lines.is_empty() {
                    return Err(invalid("sales order needs lines".into()));
                }
                for l in lines {
                    if !self.tables.products.contains_key(&l.product_id) {
                        return Err(Error::UnknownEntity(l.product_id.clone()));
                    }
                    if l.qty < 1 {
                        return Err(invalid("sales line quantity must be positive".into()));
                    }
                }
                let id = self.tables.sales_orders.len() as u32 + 1;
                self.tables.sales_orders.push(SalesOrder {
                    id,
                    client_order_ref: client_order_ref.clone(),
                    customer_id: customer_id.clone(),
                    lines: lines
                        .iter()
                        .map(|l| SalesLine {
                            product_id: l.product_id.clone(),
                            qty: l.qty,
                            unit_price_cents: l.unit_price_cents,
                            allocated_qty: 0,
                        })
                        .collect(),
                    state: OrderState::Draft,
                    requested_day: *requested_day,
                    commitment_day: None,
                });
            }
            Action::ConfirmSalesOrder { sales_order, commitment_day } => {
                let so = self.sales_order_mut(*sales_order)?;
                if so.state != OrderState::Draft {
                    return Err(invalid(format!("{} is {:?}, not draft", so_ref(so.id), so.state)));
                }
                so.state = OrderState::Confirmed;
                so.commitment_day = Some(*commitment_day);
            }
            Action::CancelSalesOrder { sales_order } => {
                let id = *sales_order;
                if self
                    .tables
                    .invoices
                    .iter()
                    .any(|i| i.sales_order == id && i.state == InvoiceState::Posted)
                {
                    return Err(invalid(format!("{} has posted invoices", so_ref(id))));
                }
                let so = self.sales_order_mut(id)?;
                if so.state == OrderState::Cancelled {
                    return Err(invalid(format!("{} already cancelled", so_ref(id))));
                }
                so.state = OrderState::Cancelled;
                for l in &mut so.lines {
                    l.allocated_qty = 0;
                }
            }
            Action::CreatePurchaseOrder { vendor_id, order_day, lines, origin } => {
                self.create_purchase(vendor_id, *order_day, lines.clone(), origin.clone(), false)?;
            }
            Action::CancelPurchaseOrder { purchase_order } => {
                let po = self
                    .tables
                    .purchase_orders
                    .iter_mut()
                    .find(|p| p.id == *purchase_order)
                    .ok_or_else(|| Error::UnknownEntity(format!("PO-{purchase_order}")))?;
                if po.state != OrderState::Confirmed {
                    return Err(invalid(format!("PO-{} is not confirmed", po.id)));
                }
                po.state = OrderState::Cancelled;
            }
            Action::CreateManufacturingOrder { bom_id, qty, workcenter_id, start_day, end_day, origin } => {
                self.create_manufacturing(bom_id, *qty, workcenter_id.clone(), *start_day, *end_day, origin.clone())?;
            }
            Action::CancelManufacturingOrder { manufacturing_order } => {
                let mo = self
                    .tables
                    .manufacturing_orders
                    .iter_mut()
                    .find(|m| m.id == *manufacturing_order)
                    .ok_or_else(|| Error::UnknownEntity(format!("MO-{manufacturing_order}")))?;
                if mo.state != OrderState::Confirmed {
                    return Err(invalid(format!("MO-{} is not confirmed", mo.id)));
                }
                mo.state = OrderState::Cancelled;
            }
            Action::AllocateStock { sales_order, product_id, qty } => {
                if *qty < 1 {
                    return Err(invalid("allocation must be positive".into()));
                }
                let so = self.sales_order_mut(*sales_order)?;
                if so.state != OrderState::Confirmed {
                    return Err(invalid(format!("{} is not confirmed", so_ref(so.id))));
                }
                let line = so
                    .lines
                    .iter_mut()
                    .find(|l| &l.product_id == product_id)
                    .ok_or_else(|| Error::UnknownEntity(format!("{product_id} on {}", so_ref(*sales_order))))?;
                if line.allocated_qty + qty > line.qty {
                    return Err(invalid(format!("allocation exceeds ordered quantity on {}", so_ref(*sales_order))));
                }
                line.allocated_qty += qty;
                self.check_allocations()?;
            }
            Action::PostInvoice { sales_order, kind, amount_cents } => {
                let so = self
                    .tables
                    .sales_orders
                    .iter()
                    .find(|s| s.id == *sales_order)
                    .ok_or_else(|| Error::UnknownEntity(so_ref(*sales_order)))?;
                if so.state != OrderState::Confirmed {
                    return Err(invalid(format!("{} is not confirmed", so_ref(so.id))));
                }
                if *amount_cents < 0 {
                    return Err(invalid("negative invoice".into()));
                }
                let customer_id = so.customer_id.clone();
                let id = self.tables.invoices.len() as u32 + 1;
                self.tables.invoices.push(Invoice {
                    id,
                    customer_id,
                    sales_order: *sales_order,
                    kind: *kind,
                    amount_cents: *amount_cents,
                    state: InvoiceState::Posted,
                });
            }
            Action::SetOrigin { target, id, origin } => {
                self.check_origin(origin)?;
                let slot = match target {
                    OriginTarget::PurchaseOrder => self
                        .tables
                        .purchase_orders
                        .iter_mut()
                        .find(|p| p.id == *id)
                        .map(|p| &mut p.origin),
                    OriginTarget::ManufacturingOrder => self
                        .tables
                        .manufacturing_orders
                        .iter_mut()
                        .find(|m| m.id == *id)
                        .map(|m| &mut m.origin),
                };
                *slot.ok_or_else(|| Error::UnknownEntity(format!("{target:?} {id}")))? = origin.clone();
            }
            Action::UpdateAdjacentRecord { key, field, value } => {
                let rec = self
                    .tables
                    .adjacent_records
                    .get_mut(key)
                    .ok_or_else(|| Error::UnknownEntity(key.clone()))?;
                rec.fields.insert(field.clone(), value.clone());
            }
        }
        Ok(())
    }
}

/// An ordered action list realizing a plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OraclePlan {
    pub objective_type: crate::model::ObjectiveType,
    pub primary_optimum: i64,
    pub secondary_optimum: Option<i64>,
    pub actions: Vec<Action>,
}

/// Applies every action in order and returns the terminal snapshot.
pub fn replay(state: &ErpState, actions: &[Action]) -> Result<TerminalState> {
    let mut s = state.clone();
    for a in actions {
        s.apply_action(a)?;
    }
    Ok(s.snapshot())
}
