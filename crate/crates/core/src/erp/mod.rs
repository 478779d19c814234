//! In-memory system of record: seeded tables, actions with per-record state
//! machines, and canonical terminal snapshots.
//!
//! Sales orders move draft -> confirmed -> cancelled (draft -> cancelled is also
//! legal); purchase and manufacturing orders are created confirmed and may only
//! be cancelled. Invoices are posted on creation and block cancelling their order.

mod records;
mod state;

pub use records::*;
pub use state::{
    adjacent_digest, canonical_json, replay, sha256_hex, Action, ErpState, NewPurchaseLine, NewSalesLine,
    OraclePlan, OriginTarget, Tables, TerminalState,
};

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::error::Error;
    use crate::model::InvoicingPolicy;

    fn partner(id: &str) -> PartnerRecord {
        PartnerRecord { partner_id: id.into(), name: format!("Partner {id}") }
    }

    fn seed() -> SeedSpec {
        SeedSpec {
            horizon_days: 21,
            products: vec![ProductRecord { product_id: "P1".into(), name: "Pump".into(), standard_price_cents: 500 }],
            customers: ["C1", "C2", "C3", "C4"].into_iter().map(partner).collect(),
            vendors: ["V1", "V2"].into_iter().map(partner).collect(),
            vendor_offers: vec![OfferRecord {
                offer_id: "O1".into(),
                vendor_id: "V1".into(),
                product_id: "P1".into(),
                tier_min_qty: 5,
                tier_max_qty: 20,
                unit_price_cents: 700,
                lead_time_days: 3,
                active: true,
            }],
            boms: vec![],
            workcenters: vec![],
            stock_levels: BTreeMap::from([("P1".to_string(), 4)]),
            sales_orders: (1..=3)
                .map(|i| SeedSalesOrder {
                    client_order_ref: format!("R{i}"),
                    customer_id: format!("C{i}"),
                    product_id: "P1".into(),
                    qty: 10,
                    unit_price_cents: 1_000,
                    requested_day: 14,
                    state: OrderState::Draft,
                    allocated_qty: 0,
                })
                .collect(),
            purchase_orders: vec![],
            manufacturing_orders: vec![],
            invoicing_policy: InvoicingPolicy::Regular,
            adjacent_records: vec![AdjacentRecord {
                key: "partner:X1".into(),
                table: "partners".into(),
                fields: BTreeMap::from([("city".to_string(), "Leeds".to_string())]),
            }],
        }
    }

    #[test]
    fn seed_tables_match_counts() {
        let s = ErpState::apply_seed(&seed()).unwrap();
        let t = s.tables();
        assert_eq!((t.customers.len(), t.vendors.len()), (4, 2));
        assert_eq!(t.stock_levels["P1"], 4);
        assert_eq!(t.sales_orders.iter().map(|o| o.id).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(t.adjacent_seed_digest, adjacent_digest(&t.adjacent_records));
    }

    #[test]
    fn empty_adjacent_digest_is_digest_of_empty_map() {
        let mut sd = seed();
        sd.adjacent_records.clear();
        let s = ErpState::apply_seed(&sd).unwrap();
        assert_eq!(s.tables().adjacent_seed_digest, sha256_hex(b"{}\n"));
    }

    #[test]
    fn dangling_offer_is_rejected() {
        let mut sd = seed();
        sd.vendor_offers[0].vendor_id = "V9".into();
        assert!(matches!(ErpState::apply_seed(&sd), Err(Error::DanglingReference(_))));
    }

    #[test]
    fn noop_replay_is_identity() {
        let s = ErpState::apply_seed(&seed()).unwrap();
        let t = replay(&s, &[]).unwrap();
        assert_eq!(t, s.snapshot());
        assert_eq!(t.tables().adjacent_seed_digest, adjacent_digest(&t.tables().adjacent_records));
    }

    #[test]
    fn purchase_origin_can_be_set() {
        let mut s = ErpState::apply_seed(&seed()).unwrap();
        s.apply_action(&Action::CreatePurchaseOrder {
            vendor_id: "V1".into(),
            order_day: 0,
            lines: vec![NewPurchaseLine { offer_id: "O1".into(), qty: 6, unit_price_cents: 700, expected_day: 3 }],
            origin: vec![],
        })
        .unwrap();
        s.apply_action(&Action::SetOrigin { target: OriginTarget::PurchaseOrder, id: 1, origin: vec![3] }).unwrap();
        assert_eq!(s.tables().purchase_orders[0].origin, vec![3]);
        assert_eq!(s.action_log().len(), 2);
        let bad = Action::SetOrigin { target: OriginTarget::PurchaseOrder, id: 1, origin: vec![9] };
        assert!(matches!(s.apply_action(&bad), Err(Error::UnknownEntity(_))));
    }

    #[test]
    fn cancel_then_confirm_is_invalid() {
        let mut s = ErpState::apply_seed(&seed()).unwrap();
        s.apply_action(&Action::CancelSalesOrder { sales_order: 1 }).unwrap();
        let before = s.tables().clone();
        let err = s.apply_action(&Action::ConfirmSalesOrder { sales_order: 1, commitment_day: 14 });
        assert!(matches!(err, Err(Error::InvalidTransition(_))));
        assert_eq!(s.tables(), &before);
    }

    #[test]
    fn allocation_beyond_stock_errors() {
        let mut s = ErpState::apply_seed(&seed()).unwrap();
        for id in [1, 2] {
            s.apply_action(&Action::ConfirmSalesOrder { sales_order: id, commitment_day: 14 }).unwrap();
        }
        let alloc = |so, qty| Action::AllocateStock { sales_order: so, product_id: "P1".into(), qty };
        s.apply_action(&alloc(1, 3)).unwrap();
        assert!(matches!(s.apply_action(&alloc(2, 2)), Err(Error::InvalidTransition(_))));
        s.apply_action(&alloc(2, 1)).unwrap();
        // cancelling releases the allocation
        s.apply_action(&Action::CancelSalesOrder { sales_order: 1 }).unwrap();
        s.apply_action(&alloc(2, 3)).unwrap();
        assert!(s.apply_action(&alloc(3, 1)).is_err());
    }

    #[test]
    fn invoices_need_confirmed_orders_and_block_cancel() {
        let mut s = ErpState::apply_seed(&seed()).unwrap();
        let inv = Action::PostInvoice { sales_order: 1, kind: InvoiceKind::Regular, amount_cents: 10_000 };
        assert!(s.apply_action(&inv).is_err());
        s.apply_action(&Action::ConfirmSalesOrder { sales_order: 1, commitment_day: 14 }).unwrap();
        s.apply_action(&inv).unwrap();
        assert!(s.apply_action(&Action::CancelSalesOrder { sales_order: 1 }).is_err());
    }

    #[test]
    fn adjacent_edit_changes_digest() {
        let s = ErpState::apply_seed(&seed()).unwrap();
        let edit = Action::UpdateAdjacentRecord { key: "partner:X1".into(), field: "city".into(), value: "York".into() };
        let t = replay(&s, &[edit]).unwrap();
        assert_ne!(t.tables().adjacent_seed_digest, adjacent_digest(&t.tables().adjacent_records));
    }

    #[test]
    fn withdrawn_offers_cannot_be_ordered() {
        let mut sd = seed();
        sd.vendor_offers[0].active = false;
        let mut s = ErpState::apply_seed(&sd).unwrap();
        let po = Action::CreatePurchaseOrder {
            vendor_id: "V1".into(),
            order_day: 0,
            lines: vec![NewPurchaseLine { offer_id: "O1".into(), qty: 6, unit_price_cents: 700, expected_day: 3 }],
            origin: vec![],
        };
        assert!(matches!(s.apply_action(&po), Err(Error::InvalidTransition(_))));
    }

    #[test]
    fn snapshot_round_trips_canonically() {
        let s = ErpState::apply_seed(&seed()).unwrap();
        let text = s.snapshot().to_canonical_json();
        assert!(text.ends_with("}\n"));
        let back = TerminalState::from_json(&text).unwrap();
        assert_eq!(back, s.snapshot());
        assert_eq!(back.to_canonical_json(), text);
        assert!(matches!(TerminalState::from_json(&text[..text.len() / 2]), Err(Error::MalformedSnapshot(_))));
    }

    #[test]
    fn replay_is_deterministic() {
        let s = ErpState::apply_seed(&seed()).unwrap();
        let plan = vec![
            Action::ConfirmSalesOrder { sales_order: 2, commitment_day: 14 },
            Action::AllocateStock { sales_order: 2, product_id: "P1".into(), qty: 4 },
        ];
        assert_eq!(replay(&s, &plan).unwrap().to_canonical_json(), replay(&s, &plan).unwrap().to_canonical_json());
    }
}
