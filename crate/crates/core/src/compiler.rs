//! Sheet assembly and the internal-consistency validator.

use std::collections::HashSet;
use std::fmt;

use chrono::NaiveDate;
use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BalanceSheet, Category, ItemKey, LineItem, Side, Totals};
use crate::money::{Money, UnitPrice};
use crate::units::{shift_pow10, Symbol, Unit};
use crate::valuation::{agricultural_external_cost_rate, ExternalCostSchedule};

/// 1%: absorbs 2-decimal rounding of printed values but not decade errors.
pub const DEFAULT_REL_TOL: Decimal = Decimal::from_parts(1, 0, 0, false, 2);

fn checked_sum<'a>(mut items: impl Iterator<Item = &'a LineItem>) -> Result<Money> {
    items.try_fold(Money::ZERO, |acc, l| acc.checked_add(l.value))
}

fn check_side(side: Side, items: &[LineItem], seen: &mut HashSet<ItemKey>) -> Result<()> {
    for item in items {
        if item.side != side || !item.category.is_legal_for(side) {
            return Err(Error::IllegalCategory {
                side,
                category: item.category,
            });
        }
        item.check()?;
        if !seen.insert(item.key()) {
            return Err(Error::DuplicateItem {
                side,
                category: item.category,
                item: item.item.clone(),
            });
        }
    }
    Ok(())
}

/// Assembles a balance sheet; totals are exact sums of the stored item values.
///
/// Item order is preserved for rendering.
pub fn compile_sheet(
    region: impl Into<String>,
    date: impl Into<Option<NaiveDate>>,
    assets: Vec<LineItem>,
    liabilities: Vec<LineItem>,
) -> Result<BalanceSheet> {
    let mut seen = HashSet::new();
    check_side(Side::Asset, &assets, &mut seen)?;
    check_side(Side::Liability, &liabilities, &mut seen)?;

    let asset_total = checked_sum(assets.iter())?;
    let liability_total = checked_sum(liabilities.iter())?;
    let net_worth = asset_total.checked_sub(liability_total)?;

    Ok(BalanceSheet {
        region: region.into(),
        date: date.into(),
        assets,
        liabilities,
        totals: Totals {
            asset_total,
            liability_total,
            net_worth,
        },
    })
}

/// Exact sum of the item values in one category; zero when it has none.
pub fn category_subtotal(sheet: &BalanceSheet, side: Side, category: Category) -> Money {
    sheet
        .side(side)
        .iter()
        .filter(|l| l.category == category)
        .map(|l| l.value)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiscrepancyKind {
    /// `quantity × price` disagrees with the stored value.
    ValueMismatch {
        computed: Money,
        stored: Money,
        /// `computed / stored`; absent when the stored value is zero.
        ratio: Option<Decimal>,
        /// `k` such that `computed ≈ stored × 10^k`.
        suggested_power_of_ten: Option<i32>,
    },
    /// A printed unit price disagrees with an independently derived one.
    PriceReference {
        printed: UnitPrice,
        reference: UnitPrice,
        source: String,
    },
    IllegalCategory,
    TotalMismatch {
        side: Side,
        recomputed: Money,
        stored: Money,
    },
    NetWorthIdentity {
        asset_total: Money,
        liability_total: Money,
        net_worth: Money,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub key: Option<ItemKey>,
    #[serde(flatten)]
    pub kind: DiscrepancyKind,
}

impl Discrepancy {
    /// True for failures of the sheet's own arithmetic identities, as opposed
    /// to disagreements in the underlying data.
    pub fn is_structural(&self) -> bool {
        matches!(
            self.kind,
            DiscrepancyKind::IllegalCategory
                | DiscrepancyKind::TotalMismatch { .. }
                | DiscrepancyKind::NetWorthIdentity { .. }
        )
    }
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let who = self
            .key
            .as_ref()
            .map(|k| k.to_string())
            .unwrap_or_else(|| "sheet".into());
        match &self.kind {
            DiscrepancyKind::ValueMismatch {
                computed,
                stored,
                ratio,
                suggested_power_of_ten,
            } => {
                write!(
                    f,
                    "{who}: quantity x price = {} billion yuan, stored {} billion yuan",
                    computed.billions().normalize(),
                    stored.billions().normalize()
                )?;
                if let Some(r) = ratio {
                    write!(f, ", ratio {}", crate::money::round_half_up(*r, 4).normalize())?;
                }
                if let Some(k) = suggested_power_of_ten {
                    write!(f, ", likely off by 10^{k}")?;
                }
                Ok(())
            }
            DiscrepancyKind::PriceReference {
                printed,
                reference,
                source,
            } => write!(f, "{who}: unit price {printed} differs from {reference} ({source})"),
            DiscrepancyKind::IllegalCategory => write!(f, "{who}: category not legal for side"),
            DiscrepancyKind::TotalMismatch {
                side,
                recomputed,
                stored,
            } => write!(
                f,
                "{who}: {side} total {} does not match item sum {}",
                stored.display_billions(),
                recomputed.display_billions()
            ),
            DiscrepancyKind::NetWorthIdentity {
                asset_total,
                liability_total,
                net_worth,
            } => write!(
                f,
                "{who}: net worth {} != {} - {}",
                net_worth.display_billions(),
                asset_total.display_billions(),
                liability_total.display_billions()
            ),
        }
    }
}

fn ensure_positive_tol(rel_tol: Decimal) -> Result<()> {
    if rel_tol <= Decimal::ZERO {
        return Err(Error::InvalidParams(format!("rel_tol must be positive, got {rel_tol}")));
    }
    Ok(())
}

fn outside_tol(ratio: Decimal, rel_tol: Decimal) -> bool {
    (ratio - Decimal::ONE).abs() > rel_tol
}

/// `k ≠ 0` with `ratio` within `rel_tol` of `10^k`.
pub fn power_of_ten_correction(ratio: Decimal, rel_tol: Decimal) -> Option<i32> {
    if ratio <= Decimal::ZERO {
        return None;
    }
    let k = ratio.to_f64()?.log10().round() as i32;
    if k == 0 {
        return None;
    }
    let rescaled = shift_pow10(ratio, -(k as i64)).ok()?;
    (!outside_tol(rescaled, rel_tol)).then_some(k)
}

/// Recomputes `quantity × price` for every priced item and re-checks the
/// sheet's identities. Never fails on data problems; it reports them.
pub fn validate_consistency(sheet: &BalanceSheet, rel_tol: Decimal) -> Result<Vec<Discrepancy>> {
    ensure_positive_tol(rel_tol)?;
    let mut out = Vec::new();

    for side in [Side::Asset, Side::Liability] {
        for item in sheet.side(side) {
            if item.side != side || !item.category.is_legal_for(side) {
                out.push(Discrepancy {
                    key: Some(item.key()),
                    kind: DiscrepancyKind::IllegalCategory,
                });
            }
            let (Some(q), Some(p)) = (&item.quantity, &item.price) else {
                continue;
            };
            let computed = match p.times(q) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let stored = item.value;
            let ratio = if stored.is_zero() {
                None
            } else {
                computed.yuan().checked_div(stored.yuan())
            };
            let mismatch = match ratio {
                Some(r) => outside_tol(r, rel_tol),
                None => !computed.is_zero(),
            };
            if mismatch {
                out.push(Discrepancy {
                    key: Some(item.key()),
                    kind: DiscrepancyKind::ValueMismatch {
                        computed,
                        stored,
                        ratio,
                        suggested_power_of_ten: ratio
                            .and_then(|r| power_of_ten_correction(r, rel_tol)),
                    },
                });
            }
        }

        let recomputed = checked_sum(sheet.side(side).iter())?;
        let stored = sheet.side_total(side);
        if recomputed != stored {
            out.push(Discrepancy {
                key: None,
                kind: DiscrepancyKind::TotalMismatch {
                    side,
                    recomputed,
                    stored,
                },
            });
        }
    }

    let t = &sheet.totals;
    if t.asset_total.checked_sub(t.liability_total)?.checked_sub(t.net_worth)? != Money::ZERO {
        out.push(Discrepancy {
            key: None,
            kind: DiscrepancyKind::NetWorthIdentity {
                asset_total: t.asset_total,
                liability_total: t.liability_total,
                net_worth: t.net_worth,
            },
        });
    }
    Ok(out)
}

/// An independently sourced unit price for one item, or every priced item of
/// a category when `item` is `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceReference {
    pub side: Side,
    pub category: Category,
    pub item: Option<String>,
    pub price: UnitPrice,
    pub source: String,
}

/// Compares printed unit prices against reference prices.
pub fn cross_check_prices(
    sheet: &BalanceSheet,
    references: &[PriceReference],
    rel_tol: Decimal,
) -> Result<Vec<Discrepancy>> {
    ensure_positive_tol(rel_tol)?;
    let mut out = Vec::new();
    for r in references {
        let matching = sheet.side(r.side).iter().filter(|l| {
            l.category == r.category && r.item.as_deref().is_none_or(|name| name == l.item)
        });
        for item in matching {
            let Some(printed) = item.price else { continue };
            let Ok(reference) = r.price.per_unit(printed.per()) else {
                continue;
            };
            let ratio = printed.amount() / reference.amount();
            if outside_tol(ratio, rel_tol) {
                out.push(Discrepancy {
                    key: Some(item.key()),
                    kind: DiscrepancyKind::PriceReference {
                        printed,
                        reference,
                        source: r.source.clone(),
                    },
                });
            }
        }
    }
    Ok(out)
}

/// Reference prices shipped with the Shaanxi fixtures: the summed crop
/// external-cost rate and the 2013-2018 average water price.
pub fn shaanxi_price_references() -> Result<Vec<PriceReference>> {
    let crop_rate = agricultural_external_cost_rate(&ExternalCostSchedule::crop_production())?;
    Ok(vec![
        PriceReference {
            side: Side::Liability,
            category: Category::EcologicalDegradation,
            item: Some("Agricultural intensification and expansion".into()),
            price: UnitPrice::new(crop_rate, Unit::base(Symbol::Hectare))?,
            source: "sum of crop external-cost components".into(),
        },
        PriceReference {
            side: Side::Asset,
            category: Category::Water,
            item: None,
            price: UnitPrice::new(Decimal::new(469, 2), Unit::base(Symbol::CubicMetre))?,
            source: "average water price 2013-2018".into(),
        },
    ])
}
