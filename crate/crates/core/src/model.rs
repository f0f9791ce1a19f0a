//! Account taxonomy and the balance-sheet data model.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::money::{Money, UnitPrice};
use crate::units::Quantity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Asset,
    Liability,
}

impl Side {
    pub fn categories(self) -> &'static [Category] {
        match self {
            Side::Asset => &Category::ASSETS,
            Side::Liability => &Category::LIABILITIES,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Asset => "Asset",
            Side::Liability => "Liability",
        })
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "Asset" => Ok(Side::Asset),
            "Liability" => Ok(Side::Liability),
            other => Err(format!("unknown side `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Land,
    Energy,
    Minerals,
    Water,
    Forests,
    ResourceOverexploitation,
    EnvironmentalPollution,
    EcologicalDegradation,
}

impl Category {
    pub const ASSETS: [Category; 5] = [
        Category::Land,
        Category::Energy,
        Category::Minerals,
        Category::Water,
        Category::Forests,
    ];

    pub const LIABILITIES: [Category; 3] = [
        Category::ResourceOverexploitation,
        Category::EnvironmentalPollution,
        Category::EcologicalDegradation,
    ];

    pub fn side(self) -> Side {
        match self {
            Category::Land
            | Category::Energy
            | Category::Minerals
            | Category::Water
            | Category::Forests => Side::Asset,
            Category::ResourceOverexploitation
            | Category::EnvironmentalPollution
            | Category::EcologicalDegradation => Side::Liability,
        }
    }

    pub fn is_legal_for(self, side: Side) -> bool {
        self.side() == side
    }

    pub fn ensure_legal_for(self, side: Side) -> Result<()> {
        if self.is_legal_for(side) {
            Ok(())
        } else {
            Err(Error::IllegalCategory {
                side,
                category: self,
            })
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Category::Land => "Land",
            Category::Energy => "Energy",
            Category::Minerals => "Minerals",
            Category::Water => "Water",
            Category::Forests => "Forests",
            Category::ResourceOverexploitation => "ResourceOverexploitation",
            Category::EnvironmentalPollution => "EnvironmentalPollution",
            Category::EcologicalDegradation => "EcologicalDegradation",
        }
    }

    /// Human-readable heading used by the text renderer.
    pub fn label(self) -> &'static str {
        match self {
            Category::ResourceOverexploitation => "Resource overexploitation",
            Category::EnvironmentalPollution => "Environmental pollution",
            Category::EcologicalDegradation => "Ecological degradation",
            other => other.token(),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Category::ASSETS
            .iter()
            .chain(Category::LIABILITIES.iter())
            .copied()
            .find(|c| c.token() == s)
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ValuationMethod {
    /// Income capitalization of land rent.
    Ica,
    Market,
    Replacement,
    Abatement,
    /// Value ingested as a total expenditure or output, no unit price.
    Aggregate,
    /// Coverage gap: the item exists in the taxonomy but has no data.
    NotAssessed,
}

impl ValuationMethod {
    pub fn token(self) -> &'static str {
        match self {
            ValuationMethod::Ica => "ICA",
            ValuationMethod::Market => "MARKET",
            ValuationMethod::Replacement => "REPLACEMENT",
            ValuationMethod::Abatement => "ABATEMENT",
            ValuationMethod::Aggregate => "AGGREGATE",
            ValuationMethod::NotAssessed => "NONE",
        }
    }
}

impl fmt::Display for ValuationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for ValuationMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "ICA" => ValuationMethod::Ica,
            "MARKET" => ValuationMethod::Market,
            "REPLACEMENT" => ValuationMethod::Replacement,
            "ABATEMENT" => ValuationMethod::Abatement,
            "AGGREGATE" => ValuationMethod::Aggregate,
            "NONE" => ValuationMethod::NotAssessed,
            other => return Err(format!("unknown valuation method `{other}`")),
        })
    }
}

/// Identity of a line item across periods.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ItemKey {
    pub side: Side,
    pub category: Category,
    pub item: String,
}

impl fmt::Display for ItemKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.side, self.category, self.item)
    }
}

/// One row of an account side.
///
/// `value` is authoritative: totals sum it directly and never recompute
/// `quantity × price`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineItem {
    pub side: Side,
    pub category: Category,
    pub item: String,
    pub quantity: Option<Quantity>,
    pub price: Option<UnitPrice>,
    pub method: ValuationMethod,
    pub value: Money,
}

impl LineItem {
    pub fn new(
        side: Side,
        category: Category,
        item: impl Into<String>,
        quantity: Option<Quantity>,
        price: Option<UnitPrice>,
        method: ValuationMethod,
        value: Money,
    ) -> Result<Self> {
        let line = LineItem {
            side,
            category,
            item: item.into(),
            quantity,
            price,
            method,
            value,
        };
        line.check()?;
        Ok(line)
    }

    pub(crate) fn check(&self) -> Result<()> {
        self.category.ensure_legal_for(self.side)?;
        if let Some(q) = &self.quantity {
            q.ensure_non_negative()?;
            if let Some(p) = &self.price {
                q.unit.ensure_same_dimension(&p.per())?;
            }
        }
        if self.value.is_negative() {
            return Err(Error::NegativeQuantity(format!("value {}", self.value)));
        }
        if self.method == ValuationMethod::NotAssessed && !self.value.is_zero() {
            return Err(Error::UnassessedWithValue(self.item.clone()));
        }
        Ok(())
    }

    pub fn key(&self) -> ItemKey {
        ItemKey {
            side: self.side,
            category: self.category,
            item: self.item.clone(),
        }
    }

    pub fn is_assessed(&self) -> bool {
        self.method != ValuationMethod::NotAssessed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Totals {
    pub asset_total: Money,
    pub liability_total: Money,
    pub net_worth: Money,
}

/// A dated statement of assets, liabilities and net worth for one region.
///
/// Built by [`crate::compiler::compile_sheet`]. `date` is `None` only for a
/// sheet loaded from a file with no rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceSheet {
    pub region: String,
    pub date: Option<NaiveDate>,
    pub assets: Vec<LineItem>,
    pub liabilities: Vec<LineItem>,
    pub totals: Totals,
}

impl BalanceSheet {
    pub fn side(&self, side: Side) -> &[LineItem] {
        match side {
            Side::Asset => &self.assets,
            Side::Liability => &self.liabilities,
        }
    }

    pub fn items(&self) -> impl Iterator<Item = &LineItem> {
        self.assets.iter().chain(self.liabilities.iter())
    }

    pub fn find(&self, key: &ItemKey) -> Option<&LineItem> {
        self.side(key.side)
            .iter()
            .find(|l| l.category == key.category && l.item == key.item)
    }

    pub fn side_total(&self, side: Side) -> Money {
        match side {
            Side::Asset => self.totals.asset_total,
            Side::Liability => self.totals.liability_total,
        }
    }
}
