use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Neg, Sub};

use rust_decimal::{Decimal, RoundingStrategy};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{shift_pow10, Quantity, Unit};

/// Power of ten of the display convention ("billion yuan").
pub const BILLION_EXP: i64 = 9;

pub const CURRENCY: &str = "yuan";

/// Rounds half away from zero to `dp` decimals; used for every printed figure.
pub fn round_half_up(value: Decimal, dp: u32) -> Decimal {
    value.round_dp_with_strategy(dp, RoundingStrategy::MidpointAwayFromZero)
}

/// An exact amount of yuan.
///
/// Stored unrounded; only [`Money::display_billions`] rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Money(Decimal);

impl Money {
    pub const ZERO: Money = Money(Decimal::ZERO);

    pub fn from_yuan(amount: Decimal) -> Self {
        Money(amount)
    }

    pub fn from_billions(amount: Decimal) -> Result<Self> {
        Ok(Money(shift_pow10(amount, BILLION_EXP)?))
    }

    pub fn yuan(&self) -> Decimal {
        self.0
    }

    pub fn billions(&self) -> Decimal {
        // Shifting down by 10^9 only grows the scale; it fails solely past 28 places.
        shift_pow10(self.0, -BILLION_EXP).unwrap_or_else(|_| self.0 / Decimal::from(1_000_000_000))
    }

    /// Half-up, 2 decimals, in billions of yuan.
    pub fn display_billions(&self) -> String {
        format!("{:.2}", round_half_up(self.billions(), 2))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn checked_add(self, other: Money) -> Result<Money> {
        self.0
            .checked_add(other.0)
            .map(Money)
            .ok_or(Error::Overflow("adding money"))
    }

    pub fn checked_sub(self, other: Money) -> Result<Money> {
        self.0
            .checked_sub(other.0)
            .map(Money)
            .ok_or(Error::Overflow("subtracting money"))
    }
}

/// Exact sum of two amounts. The currency is fixed, so there is no mismatch case.
pub fn money_add(a: Money, b: Money) -> Money {
    a + b
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Money> for Money {
    fn sum<I: Iterator<Item = &'a Money>>(iter: I) -> Money {
        iter.copied().sum()
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} billion {}", self.display_billions(), CURRENCY)
    }
}

/// Yuan per one `per` unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnitPrice {
    amount: Decimal,
    per: Unit,
}

impl UnitPrice {
    pub fn new(amount: Decimal, per: Unit) -> Result<Self> {
        if amount <= Decimal::ZERO {
            return Err(Error::NonPositivePrice(amount.to_string()));
        }
        Ok(UnitPrice { amount, per })
    }

    pub fn amount(&self) -> Decimal {
        self.amount
    }

    pub fn per(&self) -> Unit {
        self.per
    }

    /// Same price expressed per `target` unit.
    pub fn per_unit(&self, target: Unit) -> Result<UnitPrice> {
        self.per.ensure_same_dimension(&target)?;
        let amount = shift_pow10(self.amount, target.exponent() - self.per.exponent())?;
        UnitPrice::new(amount, target)
    }

    /// `quantity × price` after cancelling units exactly.
    pub fn times(&self, quantity: &Quantity) -> Result<Money> {
        quantity.unit.ensure_same_dimension(&self.per)?;
        let magnitude = shift_pow10(
            quantity.magnitude,
            quantity.unit.exponent() - self.per.exponent(),
        )?;
        magnitude
            .checked_mul(self.amount)
            .map(Money::from_yuan)
            .ok_or(Error::Overflow("valuing a quantity"))
    }
}

impl fmt::Display for UnitPrice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}/{}", self.amount, CURRENCY, self.per)
    }
}

/// An exact ratio `numerator / denominator` with a non-zero denominator.
///
/// Kept as a pair so percentages never lose precision before rendering.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Fraction {
    numerator: Decimal,
    denominator: Decimal,
}

impl Fraction {
    pub fn new(numerator: Decimal, denominator: Decimal) -> Option<Fraction> {
        if denominator.is_zero() {
            None
        } else {
            Some(Fraction {
                numerator,
                denominator,
            })
        }
    }

    pub fn zero() -> Fraction {
        Fraction {
            numerator: Decimal::ZERO,
            denominator: Decimal::ONE,
        }
    }

    pub fn numerator(&self) -> Decimal {
        self.numerator
    }

    pub fn denominator(&self) -> Decimal {
        self.denominator
    }

    /// Decimal value, correct to 28 significant digits.
    pub fn value(&self) -> Decimal {
        self.numerator / self.denominator
    }

    pub fn percent(&self) -> Decimal {
        self.value() * Decimal::ONE_HUNDRED
    }

    /// Percentage rounded half-up to 2 decimals.
    pub fn percent_2dp(&self) -> Decimal {
        round_half_up(self.percent(), 2)
    }

    pub fn display_percent(&self) -> String {
        format!("{:.2}%", self.percent_2dp())
    }

    pub fn signum(&self) -> i32 {
        if self.numerator.is_zero() {
            0
        } else if self.numerator.is_sign_negative() == self.denominator.is_sign_negative() {
            1
        } else {
            -1
        }
    }
}

impl PartialEq for Fraction {
    fn eq(&self, other: &Self) -> bool {
        self.numerator * other.denominator == other.numerator * self.denominator
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let flip = self.denominator.is_sign_negative() != other.denominator.is_sign_negative();
        let lhs = self.numerator * other.denominator;
        let rhs = other.numerator * self.denominator;
        Some(if flip {
            rhs.cmp(&lhs)
        } else {
            lhs.cmp(&rhs)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::Symbol;
    use rust_decimal_macros::dec;

    fn b(v: Decimal) -> Money {
        Money::from_billions(v).unwrap()
    }

    #[test]
    fn add_land_items() {
        assert_eq!(money_add(b(dec!(1054.70)), b(dec!(2892.94))), b(dec!(3947.64)));
        assert_eq!(money_add(b(dec!(1054.70)), Money::ZERO), b(dec!(1054.70)));
    }

    #[test]
    fn display_is_half_up() {
        assert_eq!(b(dec!(0.005)).display_billions(), "0.01");
        assert_eq!(b(dec!(0.0049)).display_billions(), "0.00");
        assert_eq!(b(dec!(-0.005)).display_billions(), "-0.01");
        assert_eq!(b(dec!(18775.59)).to_string(), "18775.59 billion yuan");
    }

    #[test]
    fn billions_round_trip() {
        let m = Money::from_yuan(dec!(145));
        assert_eq!(m.billions(), dec!(0.000000145));
        assert_eq!(b(m.billions()), m);
    }

    #[test]
    fn price_rejects_non_positive() {
        let t = Unit::base(Symbol::Tonne);
        assert!(UnitPrice::new(Decimal::ZERO, t).is_err());
        assert!(UnitPrice::new(dec!(-1), t).is_err());
    }

    #[test]
    fn price_conversion() {
        let per_km2 = UnitPrice::new(dec!(264200000), Unit::base(Symbol::SquareKilometre)).unwrap();
        let per_hm2 = per_km2.per_unit(Unit::base(Symbol::Hectare)).unwrap();
        assert_eq!(per_hm2.amount(), dec!(2642000));
    }

    #[test]
    fn fraction_equality_is_exact() {
        let a = Fraction::new(dec!(1), dec!(3)).unwrap();
        let c = Fraction::new(dec!(2), dec!(6)).unwrap();
        assert_eq!(a, c);
        assert!(Fraction::new(dec!(1), Decimal::ZERO).is_none());
        assert_eq!(Fraction::new(dec!(-542.46), dec!(1706.43)).unwrap().display_percent(), "-31.79%");
    }
}
