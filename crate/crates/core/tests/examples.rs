//! Frozen reference values for the Shaanxi fixtures and golden renders.

mod common;

use rust_decimal_macros::dec;

use nrbs::change::{item_change_report, sheet_change};
use nrbs::compiler::{category_subtotal, cross_check_prices, shaanxi_price_references, DiscrepancyKind};
use nrbs::io::{render_changes, render_sheet, render_summary, Format};
use nrbs::responsibility::{build_records, ActorKind, DebtorMap, RightKind, RightsMatrix};
use nrbs::{Category, Money, Side, Symbol};

use common::{sheet_2013, sheet_2018};

fn bn(v: rust_decimal::Decimal) -> Money {
    Money::from_billions(v).unwrap()
}

#[test]
fn forest_subtotal() {
    assert_eq!(category_subtotal(&sheet_2013(), Side::Asset, Category::Forests), bn(dec!(5.80)));
    assert_eq!(category_subtotal(&sheet_2013(), Side::Asset, Category::Land).display_billions(), "11490.29");
}

#[test]
fn natural_gas_level_change() {
    let r = item_change_report(&sheet_2013(), &sheet_2018()).unwrap();
    let gas = r
        .records
        .iter()
        .find(|x| x.key.side == Side::Asset && x.key.item == "Natural gas")
        .unwrap();
    let level = gas.level_change.unwrap();
    assert_eq!(level.magnitude, dec!(336.37));
    assert_eq!((level.unit.symbol(), level.unit.scale()), (Symbol::CubicMetre, 10));
    assert_eq!(gas.current_price.level, bn(dec!(655.90)));
}

#[test]
fn zinc_liability_pct_diverges_from_print() {
    let r = item_change_report(&sheet_2013(), &sheet_2018()).unwrap();
    let zinc = r
        .records
        .iter()
        .find(|x| x.key.side == Side::Liability && x.key.item == "Zinc")
        .unwrap();
    let pct = zinc.constant_price.unwrap().pct.unwrap();
    assert_eq!(pct.percent_2dp(), dec!(54.93));
    assert!((pct.percent() - dec!(55.31)).abs() > dec!(0.05));
}

#[test]
fn every_matched_item_and_no_strays() {
    let r = item_change_report(&sheet_2013(), &sheet_2018()).unwrap();
    assert_eq!(r.records.len(), 48);
    assert!(r.additions.is_empty() && r.removals.is_empty());
}

#[test]
fn gdp_change() {
    let s = sheet_change(&sheet_2013(), &sheet_2018(), bn(dec!(1620.55)), bn(dec!(2394.19))).unwrap();
    assert_eq!(s.gdp_change.level, bn(dec!(773.64)));
    assert_eq!(s.gdp_change.pct.unwrap().percent_2dp(), dec!(47.74));
    assert_eq!(s.asset_change.level, bn(dec!(493.01)));
    assert_eq!(s.liability_to_gdp_close.unwrap().percent_2dp(), dec!(11.07));
    assert_eq!(s.liability_to_gdp_open.unwrap().percent_2dp(), dec!(14.41));
}

#[test]
fn reference_prices() {
    let refs = shaanxi_price_references().unwrap();
    let sheet = sheet_2013();
    let loose = cross_check_prices(&sheet, &refs, dec!(0.001)).unwrap();
    assert!(loose
        .iter()
        .all(|d| d.key.as_ref().unwrap().category == Category::Water));
    assert_eq!(loose.len(), 3);
    assert!(matches!(loose[0].kind, DiscrepancyKind::PriceReference { .. }));
    // 190.21 vs 190.20 only shows up below a 0.005% tolerance.
    let tight = cross_check_prices(&sheet, &refs, dec!(0.00001)).unwrap();
    assert_eq!(tight.len(), 4);
}

#[test]
fn coal_record_2018() {
    let recs = build_records(&sheet_2018(), &DebtorMap::new()).unwrap();
    let coal = recs
        .iter()
        .find(|r| r.category == Category::ResourceOverexploitation && r.item == "Coal")
        .unwrap();
    assert_eq!(coal.debtor.kind, ActorKind::Company);
    assert_eq!(coal.creditor.name, "MNR");
    assert!(coal.repayment_period.is_none());
    assert_eq!(coal.expenditure, bn(dec!(127.04)));
}

#[test]
fn regime_debtors_are_companies() {
    let m = RightsMatrix::shaanxi_default().unwrap();
    let recs = build_records(&sheet_2013(), &DebtorMap::from_regime(&m)).unwrap();
    assert_eq!(recs.len(), 21);
    assert!(recs.iter().all(|r| r.debtor.kind == ActorKind::Company));
    assert!(m
        .holders(Category::ResourceOverexploitation, RightKind::Monitoring)
        .all(|a| matches!(a.kind, ActorKind::Government(_))));
}

#[test]
fn golden_sheet_text() {
    let text = render_sheet(&sheet_2013(), Format::Text).unwrap();
    assert_eq!(text, include_str!("golden/shaanxi_2013.txt"));
}

#[test]
fn golden_changes_text() {
    let (a, b) = (sheet_2013(), sheet_2018());
    let s = sheet_change(&a, &b, bn(dec!(1620.55)), bn(dec!(2394.19))).unwrap();
    let text = format!(
        "{}\n{}",
        render_summary(&s, Format::Text).unwrap(),
        render_changes(&item_change_report(&a, &b).unwrap(), Format::Text).unwrap()
    );
    assert_eq!(text, include_str!("golden/changes_2013_2018.txt"));
    assert!(text.contains("↑2.49%"));
}
