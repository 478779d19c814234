//! Record types stored by the simulator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{BomComponent, InvoicingPolicy};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductRecord {
    pub product_id: String,
    pub name: String,
    pub standard_price_cents: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartnerRecord {
    pub partner_id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OfferRecord {
    pub offer_id: String,
    pub vendor_id: String,
    pub product_id: String,
    pub tier_min_qty: i64,
    pub tier_max_qty: i64,
    pub unit_price_cents: i64,
    pub lead_time_days: i64,
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BomRecord {
    pub bom_id: String,
    pub output_product_id: String,
    pub components: Vec<BomComponent>,
    pub route_workcenter_ids: Vec<String>,
    pub minutes_per_unit: i64,
    pub build_start_day: i64,
    pub build_days: i64,
    pub conversion_cost_cents: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkcenterRecord {
    pub workcenter_id: String,
    pub name: String,
    pub capacity_minutes: i64,
    pub qualified_bom_ids: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderState {
    Draft,
    Confirmed,
    Cancelled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SalesLine {
    pub product_id: String,
    pub qty: i64,
    pub unit_price_cents: i64,
    pub allocated_qty: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SalesOrder {
    pub id: u32,
    /// Customer's reference for the request.
    pub client_order_ref: String,
    pub customer_id: String,
    pub lines: Vec<SalesLine>,
    pub state: OrderState,
    pub requested_day: i64,
    pub commitment_day: Option<i64>,
}

impl SalesOrder {
    pub fn amount_cents(&self) -> i64 {
        self.lines.iter().map(|l| l.qty * l.unit_price_cents).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurchaseLine {
    pub offer_id: String,
    pub product_id: String,
    pub qty: i64,
    /// Price as written on the order; may disagree with the offer.
    pub unit_price_cents: i64,
    pub expected_day: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurchaseOrder {
    pub id: u32,
    pub vendor_id: String,
    pub lines: Vec<PurchaseLine>,
    pub order_day: i64,
    pub state: OrderState,
    /// Sales order ids this purchase serves.
    pub origin: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManufacturingOrder {
    pub id: u32,
    pub bom_id: String,
    pub qty: i64,
    pub workcenter_id: Option<String>,
    pub start_day: i64,
    pub end_day: i64,
    pub state: OrderState,
    pub origin: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvoiceKind {
    Regular,
    Downpayment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvoiceState {
    Draft,
    Posted,
}

/// Invoices carry no tax lines; the simulator is tax-free by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invoice {
    pub id: u32,
    pub customer_id: String,
    pub sales_order: u32,
    pub kind: InvoiceKind,
    pub amount_cents: i64,
    pub state: InvoiceState,
}

/// An unrelated record seeded for realism; graded only by digest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacentRecord {
    pub key: String,
    pub table: String,
    pub fields: BTreeMap<String, String>,
}

/// A seeded sales order, as it exists before the agent acts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSalesOrder {
    pub client_order_ref: String,
    pub customer_id: String,
    pub product_id: String,
    pub qty: i64,
    pub unit_price_cents: i64,
    pub requested_day: i64,
    pub state: OrderState,
    pub allocated_qty: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPurchaseOrder {
    pub vendor_id: String,
    pub lines: Vec<PurchaseLine>,
    pub order_day: i64,
    /// Client order refs of the sales orders it serves.
    pub origin_refs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedManufacturingOrder {
    pub bom_id: String,
    pub qty: i64,
    pub workcenter_id: Option<String>,
    pub start_day: i64,
    pub end_day: i64,
    pub origin_refs: Vec<String>,
}

/// Everything the environment contains before the agent acts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub horizon_days: i64,
    pub products: Vec<ProductRecord>,
    pub customers: Vec<PartnerRecord>,
    pub vendors: Vec<PartnerRecord>,
    pub vendor_offers: Vec<OfferRecord>,
    pub boms: Vec<BomRecord>,
    pub workcenters: Vec<WorkcenterRecord>,
    pub stock_levels: BTreeMap<String, i64>,
    pub sales_orders: Vec<SeedSalesOrder>,
    /// Seeded purchases and builds are created confirmed.
    pub purchase_orders: Vec<SeedPurchaseOrder>,
    pub manufacturing_orders: Vec<SeedManufacturingOrder>,
    pub invoicing_policy: InvoicingPolicy,
    pub adjacent_records: Vec<AdjacentRecord>,
}
