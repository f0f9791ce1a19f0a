use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::{csv_error, csv_reader, parse_field, row_of};
use crate::compiler::compile_sheet;
use crate::error::{Error, Result};
use crate::model::{BalanceSheet, Category, LineItem, Side, ValuationMethod};
use crate::money::{Money, UnitPrice};
use crate::units::{Quantity, Unit};

/// Placeholder for an absent quantity or price cell.
pub const ABSENT: &str = "-";

pub const SHEET_COLUMNS: [&str; 11] = [
    "region",
    "date",
    "side",
    "category",
    "item",
    "quantity",
    "quantity_unit",
    "unit_price_yuan",
    "price_per_unit",
    "valuation_method",
    "value_billion_yuan",
];

/// One CSV row of a balance-sheet file, as text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineItemRow {
    pub region: String,
    pub date: String,
    pub side: String,
    pub category: String,
    pub item: String,
    pub quantity: String,
    pub quantity_unit: String,
    pub unit_price_yuan: String,
    pub price_per_unit: String,
    pub valuation_method: String,
    pub value_billion_yuan: String,
}

fn optional_pair(row: usize, what: &str, amount: &str, unit: &str) -> Result<Option<(Decimal, Unit)>> {
    match (amount == ABSENT, unit == ABSENT) {
        (true, true) => Ok(None),
        (false, false) => {
            let a: Decimal = parse_field(row, amount)?;
            let u = unit.parse::<Unit>().map_err(|e| Error::Parse {
                row,
                message: format!("{what} unit: {e}"),
            })?;
            Ok(Some((a, u)))
        }
        _ => Err(Error::Parse {
            row,
            message: format!("{what} and its unit must both be present or both `{ABSENT}`"),
        }),
    }
}

impl LineItemRow {
    fn into_item(self, row: usize) -> Result<(String, NaiveDate, LineItem)> {
        let date: NaiveDate = parse_field(row, &self.date)?;
        let side: Side = parse_field(row, &self.side)?;
        let category: Category = parse_field(row, &self.category)?;
        let method: ValuationMethod = parse_field(row, &self.valuation_method)?;
        let value = Money::from_billions(parse_field(row, &self.value_billion_yuan)?)
            .map_err(|e| Error::Parse {
                row,
                message: e.to_string(),
            })?;
        let quantity = optional_pair(row, "quantity", &self.quantity, &self.quantity_unit)?
            .map(|(m, u)| Quantity::new(m, u));
        let price = optional_pair(row, "unit price", &self.unit_price_yuan, &self.price_per_unit)?
            .map(|(a, u)| UnitPrice::new(a, u))
            .transpose()
            .map_err(|e| Error::Parse {
                row,
                message: e.to_string(),
            })?;
        let item = LineItem::new(side, category, self.item, quantity, price, method, value)
            .map_err(|e| match e {
                Error::IllegalCategory { .. } => e,
                other => Error::Parse {
                    row,
                    message: other.to_string(),
                },
            })?;
        Ok((self.region, date, item))
    }

    fn from_item(region: &str, date: NaiveDate, l: &LineItem) -> Self {
        let (quantity, quantity_unit) = match &l.quantity {
            Some(q) => (q.magnitude.to_string(), q.unit.to_string()),
            None => (ABSENT.into(), ABSENT.into()),
        };
        let (unit_price_yuan, price_per_unit) = match &l.price {
            Some(p) => (p.amount().to_string(), p.per().to_string()),
            None => (ABSENT.into(), ABSENT.into()),
        };
        LineItemRow {
            region: region.to_string(),
            date: date.to_string(),
            side: l.side.to_string(),
            category: l.category.to_string(),
            item: l.item.clone(),
            quantity,
            quantity_unit,
            unit_price_yuan,
            price_per_unit,
            valuation_method: l.method.to_string(),
            value_billion_yuan: exact_billions(l.value),
        }
    }
}

/// Exact value in billions with at least two decimals.
pub(crate) fn exact_billions(m: Money) -> String {
    let mut d = m.billions().normalize();
    if d.scale() < 2 {
        d.rescale(2);
    }
    d.to_string()
}

/// Reads and compiles one region and period.
///
/// A file with only a header yields an empty sheet with no region or date.
pub fn load_sheet<R: Read>(reader: R) -> Result<BalanceSheet> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.iter().ne(SHEET_COLUMNS) {
        return Err(Error::Parse {
            row: row_of(&headers),
            message: format!("expected columns {}", SHEET_COLUMNS.join(",")),
        });
    }
    let mut period: Option<(String, NaiveDate)> = None;
    let (mut assets, mut liabilities) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let row = row_of(&rec);
        let parsed: LineItemRow = rec.deserialize(Some(&headers)).map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        let (region, date, item) = parsed.into_item(row)?;
        match &period {
            None => period = Some((region, date)),
            Some((r, d)) if *r == region && *d == date => {}
            Some((r, d)) => {
                return Err(Error::MixedPeriod(format!(
                    "row {row} is {region} {date}, earlier rows are {r} {d}"
                )))
            }
        }
        match item.side {
            Side::Asset => assets.push(item),
            Side::Liability => liabilities.push(item),
        }
    }
    let (region, date) = match period {
        Some((r, d)) => (r, Some(d)),
        None => (String::new(), None),
    };
    compile_sheet(region, date, assets, liabilities)
}

pub fn load_sheet_path(path: impl AsRef<Path>) -> Result<BalanceSheet> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_sheet(f)
}

/// Writes the sheet in the input schema; [`load_sheet`] reads it back exactly.
pub fn write_sheet_csv<W: Write>(sheet: &BalanceSheet, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(SHEET_COLUMNS).map_err(csv_error)?;
    if let Some(date) = sheet.date {
        for l in sheet.items() {
            w.serialize(LineItemRow::from_item(&sheet.region, date, l))
                .map_err(csv_error)?;
        }
    } else if sheet.items().next().is_some() {
        return Err(Error::InvalidParams("sheet with items has no date".into()));
    }
    w.flush()?;
    Ok(())
}
