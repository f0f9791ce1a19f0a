//! Dimensioned physical quantities.
//!
//! A [`Unit`] is a base symbol plus a power-of-ten scale, mirroring table
//! headers such as "(×10³) km²". Conversions between units of the same
//! dimension are exact decimal shifts; nothing here touches binary floats.

use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_SCALE: u8 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Mass,
    Volume,
    Area,
    Count,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Mass => "mass",
            Dimension::Volume => "volume",
            Dimension::Area => "area",
            Dimension::Count => "count",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    /// Metric tonne.
    Tonne,
    CubicMetre,
    SquareKilometre,
    /// Hectare (hm²).
    Hectare,
    Each,
}

impl Symbol {
    pub fn dimension(self) -> Dimension {
        match self {
            Symbol::Tonne => Dimension::Mass,
            Symbol::CubicMetre => Dimension::Volume,
            Symbol::SquareKilometre | Symbol::Hectare => Dimension::Area,
            Symbol::Each => Dimension::Count,
        }
    }

    /// Power of ten relative to the smallest symbol of the same dimension
    /// (1 km² = 10² hm²).
    fn base_exponent(self) -> i64 {
        match self {
            Symbol::SquareKilometre => 2,
            _ => 0,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Symbol::Tonne => "t",
            Symbol::CubicMetre => "m3",
            Symbol::SquareKilometre => "km2",
            Symbol::Hectare => "hm2",
            Symbol::Each => "ea",
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "t" => Symbol::Tonne,
            "m3" | "m³" => Symbol::CubicMetre,
            "km2" | "km²" => Symbol::SquareKilometre,
            "hm2" | "hm²" | "ha" => Symbol::Hectare,
            "ea" => Symbol::Each,
            other => return Err(Error::UnknownUnit(other.to_string())),
        })
    }
}

/// A base symbol scaled by `10^scale`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Unit {
    symbol: Symbol,
    scale: u8,
}

impl Unit {
    pub fn new(symbol: Symbol, scale: u8) -> Result<Self> {
        if scale > MAX_SCALE {
            return Err(Error::ScaleOutOfRange(scale as i64));
        }
        Ok(Unit { symbol, scale })
    }

    pub const fn base(symbol: Symbol) -> Self {
        Unit { symbol, scale: 0 }
    }

    pub fn symbol(&self) -> Symbol {
        self.symbol
    }

    pub fn scale(&self) -> u8 {
        self.scale
    }

    pub fn dimension(&self) -> Dimension {
        self.symbol.dimension()
    }

    /// Total power of ten of this unit relative to the dimension's smallest symbol.
    pub(crate) fn exponent(&self) -> i64 {
        self.symbol.base_exponent() + self.scale as i64
    }

    pub(crate) fn ensure_same_dimension(&self, other: &Unit) -> Result<()> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch {
                left: self.dimension(),
                right: other.dimension(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            f.write_str(self.symbol.token())
        } else {
            write!(f, "10^{} {}", self.scale, self.symbol.token())
        }
    }
}

/// Parses `(10^<k> )?<symbol>`, e.g. `"10^3 km2"`, `"t"`, `"10^10 m3"`.
impl FromStr for Unit {
    type Err = Error;

    fn from_str(token: &str) -> Result<Self> {
        let token = token.trim();
        let (scale, symbol) = match token.split_once(char::is_whitespace) {
            Some((head, rest)) => {
                let digits = head
                    .strip_prefix("10^")
                    .ok_or_else(|| Error::MalformedScale(token.to_string()))?;
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(Error::MalformedScale(token.to_string()));
                }
                let k: i64 = digits
                    .parse()
                    .map_err(|_| Error::MalformedScale(token.to_string()))?;
                if k > MAX_SCALE as i64 {
                    return Err(Error::ScaleOutOfRange(k));
                }
                (k as u8, rest.trim())
            }
            None if token.starts_with("10^") => {
                return Err(Error::MalformedScale(token.to_string()))
            }
            None => (0, token),
        };
        Unit::new(symbol.parse()?, scale)
    }
}

/// Multiplies `value` by `10^k` exactly, by moving the decimal point.
pub(crate) fn shift_pow10(value: Decimal, k: i64) -> Result<Decimal> {
    let scale = value.scale() as i64;
    let mantissa = value.mantissa();
    let shifted = if k >= 0 && k <= scale {
        Decimal::try_from_i128_with_scale(mantissa, (scale - k) as u32)
    } else if k > scale {
        let factor = 10i128
            .checked_pow((k - scale) as u32)
            .ok_or(Error::Overflow("rescaling a quantity"))?;
        let m = mantissa
            .checked_mul(factor)
            .ok_or(Error::Overflow("rescaling a quantity"))?;
        Decimal::try_from_i128_with_scale(m, 0)
    } else {
        // Trailing zeros can be dropped before growing the scale.
        let reduced = value.normalize();
        let new_scale = reduced.scale() as i64 - k;
        if new_scale > Decimal::MAX_SCALE as i64 {
            return Err(Error::Overflow("rescaling a quantity"));
        }
        Decimal::try_from_i128_with_scale(reduced.mantissa(), new_scale as u32)
    };
    shifted.map_err(|_| Error::Overflow("rescaling a quantity"))
}

/// A decimal magnitude in a dimensioned unit.
///
/// Magnitudes are signed so that differences (level changes) are
/// representable; stock and flow inputs are checked for `>= 0` where they
/// enter the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quantity {
    pub magnitude: Decimal,
    pub unit: Unit,
}

impl Quantity {
    pub fn new(magnitude: Decimal, unit: Unit) -> Self {
        Quantity { magnitude, unit }
    }

    pub fn zero(unit: Unit) -> Self {
        Quantity::new(Decimal::ZERO, unit)
    }

    pub fn dimension(&self) -> Dimension {
        self.unit.dimension()
    }

    pub fn is_negative(&self) -> bool {
        self.magnitude.is_sign_negative() && !self.magnitude.is_zero()
    }

    pub fn ensure_non_negative(&self) -> Result<()> {
        if self.is_negative() {
            return Err(Error::NegativeQuantity(self.to_string()));
        }
        Ok(())
    }

    /// Re-expresses the quantity in `target`, which must share its dimension.
    pub fn normalize(&self, target: Unit) -> Result<Quantity> {
        self.unit.ensure_same_dimension(&target)?;
        let magnitude = shift_pow10(self.magnitude, self.unit.exponent() - target.exponent())?;
        Ok(Quantity::new(magnitude, target))
    }

    /// Magnitude expressed in the smallest symbol of the dimension, scale 0.
    pub(crate) fn base_magnitude(&self) -> Result<Decimal> {
        shift_pow10(self.magnitude, self.unit.exponent())
    }

    pub fn checked_add(&self, other: &Quantity) -> Result<Quantity> {
        let rhs = other.normalize(self.unit)?;
        let magnitude = self
            .magnitude
            .checked_add(rhs.magnitude)
            .ok_or(Error::Overflow("adding quantities"))?;
        Ok(Quantity::new(magnitude, self.unit))
    }

    pub fn checked_sub(&self, other: &Quantity) -> Result<Quantity> {
        let rhs = other.normalize(self.unit)?;
        let magnitude = self
            .magnitude
            .checked_sub(rhs.magnitude)
            .ok_or(Error::Overflow("subtracting quantities"))?;
        Ok(Quantity::new(magnitude, self.unit))
    }

    /// Exact numeric equality after normalization, regardless of unit scale.
    pub fn same_amount(&self, other: &Quantity) -> Result<bool> {
        self.unit.ensure_same_dimension(&other.unit)?;
        Ok(self.base_magnitude()? == other.base_magnitude()?)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.magnitude, self.unit)
    }
}
