//! Inter-period change: physical level change, constant-price (quantity
//! effect at the opening price) and current-price (total value) changes.

use std::collections::HashSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BalanceSheet, ItemKey, LineItem};
use crate::money::{Fraction, Money, UnitPrice};
use crate::units::Quantity;

/// A signed level change and its fraction of the opening level.
///
/// `pct` is `None` when the opening level is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceChange {
    pub level: Money,
    pub pct: Option<Fraction>,
}

/// Quantity effect valued at the opening period's unit price.
pub fn constant_price_change(
    q_open: &Quantity,
    q_close: &Quantity,
    p_base: &UnitPrice,
) -> Result<PriceChange> {
    q_open.unit.ensure_same_dimension(&p_base.per())?;
    let delta = q_close.checked_sub(q_open)?.normalize(q_open.unit)?;
    Ok(PriceChange {
        level: p_base.times(&delta)?,
        pct: Fraction::new(delta.magnitude, q_open.magnitude),
    })
}

pub fn current_price_change(v_open: Money, v_close: Money) -> Result<PriceChange> {
    let level = v_close.checked_sub(v_open)?;
    Ok(PriceChange {
        level,
        pct: Fraction::new(level.yuan(), v_open.yuan()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeRecord {
    pub key: ItemKey,
    pub q_open: Option<Quantity>,
    pub q_close: Option<Quantity>,
    pub p_open: Option<UnitPrice>,
    pub p_close: Option<UnitPrice>,
    /// `q_close − q_open` in the opening unit.
    pub level_change: Option<Quantity>,
    /// Absent without both quantities and an opening price.
    pub constant_price: Option<PriceChange>,
    pub current_price: PriceChange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ChangeReport {
    pub records: Vec<ChangeRecord>,
    /// Items present only in the closing sheet.
    pub additions: Vec<LineItem>,
    /// Items present only in the opening sheet.
    pub removals: Vec<LineItem>,
}

fn record_for(open: &LineItem, close: &LineItem) -> Result<ChangeRecord> {
    let level_change = match (&open.quantity, &close.quantity) {
        (Some(a), Some(b)) => Some(b.checked_sub(a)?.normalize(a.unit)?),
        _ => None,
    };
    let constant_price = match (&open.quantity, &close.quantity, &open.price) {
        (Some(a), Some(b), Some(p)) => Some(constant_price_change(a, b, p)?),
        _ => None,
    };
    Ok(ChangeRecord {
        key: open.key(),
        q_open: open.quantity,
        q_close: close.quantity,
        p_open: open.price,
        p_close: close.price,
        level_change,
        constant_price,
        current_price: current_price_change(open.value, close.value)?,
    })
}

/// Matches items by side, category and name, and reports per-item changes.
/// Records follow the opening sheet's order; additions the closing sheet's.
pub fn item_change_report(opening: &BalanceSheet, closing: &BalanceSheet) -> Result<ChangeReport> {
    let mut report = ChangeReport::default();
    let mut matched = HashSet::new();
    for open in opening.items() {
        let key = open.key();
        match closing.find(&key) {
            Some(close) => {
                report.records.push(record_for(open, close)?);
                matched.insert(key);
            }
            None => report.removals.push(open.clone()),
        }
    }
    report.additions = closing
        .items()
        .filter(|l| !matched.contains(&l.key()))
        .cloned()
        .collect();
    Ok(report)
}

/// Sheet-level change and liability burden relative to GDP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetChangeSummary {
    pub region: String,
    pub opening_date: Option<NaiveDate>,
    pub closing_date: Option<NaiveDate>,
    pub asset_open: Money,
    pub asset_close: Money,
    pub liability_open: Money,
    pub liability_close: Money,
    pub net_worth_open: Money,
    pub net_worth_close: Money,
    pub asset_change: PriceChange,
    pub liability_change: PriceChange,
    pub net_worth_change: PriceChange,
    pub gdp_open: Money,
    pub gdp_close: Money,
    pub gdp_change: PriceChange,
    pub liability_to_gdp_open: Option<Fraction>,
    pub liability_to_gdp_close: Option<Fraction>,
}

pub fn sheet_change(
    opening: &BalanceSheet,
    closing: &BalanceSheet,
    gdp_open: Money,
    gdp_close: Money,
) -> Result<SheetChangeSummary> {
    if opening.region != closing.region {
        return Err(Error::RegionMismatch {
            opening: opening.region.clone(),
            closing: closing.region.clone(),
        });
    }
    let (o, c) = (&opening.totals, &closing.totals);
    let asset_change = current_price_change(o.asset_total, c.asset_total)?;
    let liability_change = current_price_change(o.liability_total, c.liability_total)?;
    let net_worth_change = current_price_change(o.net_worth, c.net_worth)?;
    let expected = asset_change.level.checked_sub(liability_change.level)?;
    if net_worth_change.level != expected {
        return Err(Error::Invariant(format!(
            "net worth change {} != asset change - liability change {}",
            net_worth_change.level, expected
        )));
    }
    Ok(SheetChangeSummary {
        region: opening.region.clone(),
        opening_date: opening.date,
        closing_date: closing.date,
        asset_open: o.asset_total,
        asset_close: c.asset_total,
        liability_open: o.liability_total,
        liability_close: c.liability_total,
        net_worth_open: o.net_worth,
        net_worth_close: c.net_worth,
        asset_change,
        liability_change,
        net_worth_change,
        gdp_open,
        gdp_close,
        gdp_change: current_price_change(gdp_open, gdp_close)?,
        liability_to_gdp_open: Fraction::new(o.liability_total.yuan(), gdp_open.yuan()),
        liability_to_gdp_close: Fraction::new(c.liability_total.yuan(), gdp_close.yuan()),
    })
}
