//! Natural resource balance sheets: compile regional asset and liability
//! accounts from physical quantities and unit prices, analyse change between
//! two periods, check internal consistency, and assign liability
//! responsibility under a property-rights regime.

pub mod change;
pub mod compiler;
pub mod error;
pub mod io;
pub mod model;
pub mod money;
pub mod responsibility;
pub mod units;
pub mod valuation;

pub use error::{Error, Result};
pub use model::{BalanceSheet, Category, ItemKey, LineItem, Side, Totals, ValuationMethod};
pub use money::{money_add, Fraction, Money, UnitPrice};
pub use units::{Dimension, Quantity, Symbol, Unit};
