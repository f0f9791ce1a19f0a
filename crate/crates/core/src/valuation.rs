//! Monetary valuation methods and the physical water stock-flow identity.
//!
//! Market value, replacement cost and imputed abatement cost share one
//! kernel (`quantity × unit price` with exact unit cancellation); they differ
//! only in what the price means, which is recorded as the item's
//! [`ValuationMethod`].

use std::collections::BTreeMap;
use std::fmt;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Category, LineItem, Side, ValuationMethod};
use crate::money::{Money, UnitPrice};
use crate::units::{Dimension, Quantity, Symbol, Unit};

pub const DEFAULT_INTEREST_RATE: Decimal = Decimal::from_parts(5, 0, 0, false, 2);
pub const DEFAULT_EARNING_YEARS: u32 = 30;

/// Inputs of the income capitalization approach for land.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IcaParams {
    /// Annual rent, yuan per hm² per year.
    pub annual_rent: Decimal,
    /// Interest rate per year, as a fraction.
    pub rate: Decimal,
    /// Earning period in whole years.
    pub years: u32,
}

impl IcaParams {
    pub fn new(annual_rent: Decimal, rate: Decimal, years: u32) -> Result<Self> {
        let p = IcaParams {
            annual_rent,
            rate,
            years,
        };
        p.validate()?;
        Ok(p)
    }

    /// 5% interest over a 30-year earning period.
    pub fn with_defaults(annual_rent: Decimal) -> Result<Self> {
        IcaParams::new(annual_rent, DEFAULT_INTEREST_RATE, DEFAULT_EARNING_YEARS)
    }

    fn validate(&self) -> Result<()> {
        if self.years < 1 {
            return Err(Error::InvalidParams("earning period must be at least 1 year".into()));
        }
        if self.rate.is_sign_negative() && !self.rate.is_zero() {
            return Err(Error::InvalidParams(format!("negative interest rate {}", self.rate)));
        }
        if self.annual_rent.is_sign_negative() && !self.annual_rent.is_zero() {
            return Err(Error::InvalidParams(format!("negative rent {}", self.annual_rent)));
        }
        Ok(())
    }
}

fn pow_u32(base: Decimal, mut exp: u32) -> Result<Decimal> {
    let mut acc = Decimal::ONE;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc.checked_mul(b).ok_or(Error::Overflow("raising to a power"))?;
        }
        exp >>= 1;
        if exp > 0 {
            b = b.checked_mul(b).ok_or(Error::Overflow("raising to a power"))?;
        }
    }
    Ok(acc)
}

/// Present value of `years` years of rent: `P/R · (1 − (1+R)^−N)`, or `P·N`
/// when `R = 0`. Yuan per hm².
pub fn income_capitalization(p: &IcaParams) -> Result<Decimal> {
    p.validate()?;
    let years = Decimal::from(p.years);
    if p.rate.is_zero() {
        return p
            .annual_rent
            .checked_mul(years)
            .ok_or(Error::Overflow("capitalizing rent"));
    }
    // (1+R)^-N as (1/(1+R))^N, which underflows towards zero instead of overflowing.
    let discount = Decimal::ONE
        .checked_div(Decimal::ONE + p.rate)
        .ok_or(Error::Overflow("capitalizing rent"))?;
    let annuity = (Decimal::ONE - pow_u32(discount, p.years)?)
        .checked_div(p.rate)
        .ok_or(Error::Overflow("capitalizing rent"))?;
    p.annual_rent
        .checked_mul(annuity)
        .ok_or(Error::Overflow("capitalizing rent"))
}

/// Capitalized land price as a [`UnitPrice`] per hm², for use with [`market_value`].
pub fn income_capitalization_price(p: &IcaParams) -> Result<UnitPrice> {
    UnitPrice::new(income_capitalization(p)?, Unit::base(Symbol::Hectare))
}

fn price_quantity(quantity: &Quantity, price: &UnitPrice) -> Result<Money> {
    quantity.ensure_non_negative()?;
    price.times(quantity)
}

pub fn market_value(quantity: &Quantity, price: &UnitPrice) -> Result<Money> {
    price_quantity(quantity, price)
}

pub fn replacement_cost(quantity: &Quantity, unit_cost: &UnitPrice) -> Result<Money> {
    price_quantity(quantity, unit_cost)
}

pub fn imputed_abatement_cost(emission: &Quantity, unit_cost: &UnitPrice) -> Result<Money> {
    price_quantity(emission, unit_cost)
}

/// Builds a line item whose value is computed from its quantity and price.
///
/// Only the unit-price methods apply; aggregate and unassessed items carry
/// ingested values and are built with [`LineItem::new`].
pub fn valued_item(
    side: Side,
    category: Category,
    item: impl Into<String>,
    quantity: Quantity,
    price: UnitPrice,
    method: ValuationMethod,
) -> Result<LineItem> {
    let value = match method {
        ValuationMethod::Ica | ValuationMethod::Market => market_value(&quantity, &price)?,
        ValuationMethod::Replacement => replacement_cost(&quantity, &price)?,
        ValuationMethod::Abatement => imputed_abatement_cost(&quantity, &price)?,
        ValuationMethod::Aggregate | ValuationMethod::NotAssessed => {
            return Err(Error::InvalidParams(format!(
                "method {method} has no unit-price valuation"
            )))
        }
    };
    LineItem::new(side, category, item, Some(quantity), Some(price), method, value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CostComponent {
    Water,
    Soil,
    Air,
    Biodiversity,
    HumanHealth,
}

impl CostComponent {
    pub const ALL: [CostComponent; 5] = [
        CostComponent::Water,
        CostComponent::Soil,
        CostComponent::Air,
        CostComponent::Biodiversity,
        CostComponent::HumanHealth,
    ];
}

impl fmt::Display for CostComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostComponent::Water => "water",
            CostComponent::Soil => "soil",
            CostComponent::Air => "air",
            CostComponent::Biodiversity => "biodiversity",
            CostComponent::HumanHealth => "human_health",
        })
    }
}

/// Annual external costs of crop production, yuan per hm² per component.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalCostSchedule {
    components: BTreeMap<CostComponent, Decimal>,
}

impl ExternalCostSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, component: CostComponent, rate: Decimal) -> Result<Self> {
        if rate.is_sign_negative() && !rate.is_zero() {
            return Err(Error::InvalidParams(format!("negative {component} cost {rate}")));
        }
        self.components.insert(component, rate);
        Ok(self)
    }

    /// Per-component crop production costs used for the Shaanxi sheets.
    pub fn crop_production() -> Self {
        let rates = [
            (CostComponent::Water, Decimal::new(1150, 2)),
            (CostComponent::Soil, Decimal::new(8586, 2)),
            (CostComponent::Air, Decimal::new(1085, 2)),
            (CostComponent::Biodiversity, Decimal::new(4335, 2)),
            (CostComponent::HumanHealth, Decimal::new(3864, 2)),
        ];
        ExternalCostSchedule {
            components: rates.into_iter().collect(),
        }
    }

    pub fn get(&self, component: CostComponent) -> Option<Decimal> {
        self.components.get(&component).copied()
    }
}

/// Sum of all five components, yuan per hm² per year.
pub fn agricultural_external_cost_rate(s: &ExternalCostSchedule) -> Result<Decimal> {
    CostComponent::ALL.iter().try_fold(Decimal::ZERO, |acc, c| {
        s.get(*c)
            .map(|v| acc + v)
            .ok_or_else(|| Error::MissingComponent(c.to_string()))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaterIncreases {
    pub rainfall: Quantity,
    pub inflows: Quantity,
    pub socio_economic_return: Quantity,
    pub other: Quantity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaterDecreases {
    pub water_utility: Quantity,
    pub outflows: Quantity,
    pub other: Quantity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaterFlows {
    pub opening: Quantity,
    pub increases: WaterIncreases,
    pub decreases: WaterDecreases,
}

impl WaterIncreases {
    pub fn iter(&self) -> impl Iterator<Item = &Quantity> {
        [&self.rainfall, &self.inflows, &self.socio_economic_return, &self.other].into_iter()
    }

    pub fn zero(unit: Unit) -> Self {
        let z = Quantity::zero(unit);
        WaterIncreases {
            rainfall: z,
            inflows: z,
            socio_economic_return: z,
            other: z,
        }
    }
}

impl WaterDecreases {
    pub fn iter(&self) -> impl Iterator<Item = &Quantity> {
        [&self.water_utility, &self.outflows, &self.other].into_iter()
    }

    pub fn zero(unit: Unit) -> Self {
        let z = Quantity::zero(unit);
        WaterDecreases {
            water_utility: z,
            outflows: z,
            other: z,
        }
    }
}

/// Closing stock = opening + Σ increases − Σ decreases, in the opening unit.
pub fn water_closing_stock(w: &WaterFlows) -> Result<Quantity> {
    let all = std::iter::once(&w.opening)
        .chain(w.increases.iter())
        .chain(w.decreases.iter());
    for q in all {
        if q.dimension() != Dimension::Volume {
            return Err(Error::DimensionMismatch {
                left: Dimension::Volume,
                right: q.dimension(),
            });
        }
        q.ensure_non_negative()?;
    }
    let mut closing = w.opening;
    for q in w.increases.iter() {
        closing = closing.checked_add(q)?;
    }
    for q in w.decreases.iter() {
        closing = closing.checked_sub(q)?;
    }
    if closing.is_negative() {
        return Err(Error::NegativeClosingStock(closing.to_string()));
    }
    Ok(closing)
}
