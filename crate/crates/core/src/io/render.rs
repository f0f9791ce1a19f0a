use rust_decimal::Decimal;
use serde_json::{json, Value};

use super::sheet::{exact_billions, write_sheet_csv, LineItemRow};
use super::{csv_error, Format};
use crate::change::{ChangeRecord, ChangeReport, PriceChange, SheetChangeSummary};
use crate::compiler::{Discrepancy, DiscrepancyKind};
use crate::error::{Error, Result};
use crate::model::{BalanceSheet, LineItem, Side};
use crate::money::{round_half_up, Fraction, Money};
use crate::responsibility::{rights_report, LiabilityRecord, RightsMatrix};
use crate::units::Quantity;

const NOT_ASSESSED: &str = "--";
const UNDEFINED: &str = "n/a";

fn width(s: &str) -> usize {
    s.chars().count()
}

fn pad(s: &str, w: usize, right: bool) -> String {
    let fill = " ".repeat(w.saturating_sub(width(s)));
    if right {
        format!("{fill}{s}")
    } else {
        format!("{s}{fill}")
    }
}

/// Left-aligned first column, right-aligned others, two-space gutters.
fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| width(h)).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(width(c));
        }
    }
    let line = |cells: Vec<&str>| {
        let s: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| pad(c, widths[i], i > 0))
            .collect();
        let mut s = s.join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(headers.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

fn csv_string(headers: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(headers).map_err(csv_error)?;
    for r in rows {
        w.write_record(r).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn json_lines(values: impl IntoIterator<Item = Value>) -> String {
    values.into_iter().map(|v| format!("{v}\n")).collect()
}

fn rows_to_json(headers: &[&str], rows: &[Vec<String>]) -> String {
    json_lines(rows.iter().map(|r| {
        Value::Object(
            headers
                .iter()
                .zip(r)
                .map(|(h, c)| (h.to_string(), Value::String(c.clone())))
                .collect(),
        )
    }))
}

fn tabular(format: Format, headers: &[&str], rows: &[Vec<String>]) -> Result<String> {
    match format {
        Format::Text => Ok(table(headers, rows)),
        Format::Csv => csv_string(headers, rows),
        Format::JsonLines => Ok(rows_to_json(headers, rows)),
    }
}

fn arrow(d: Decimal) -> &'static str {
    if d.is_zero() {
        ""
    } else if d.is_sign_negative() {
        "↓"
    } else {
        "↑"
    }
}

/// Unsigned 2-decimal figure with a direction arrow.
fn arrowed(d: Decimal) -> String {
    format!("{}{:.2}", arrow(d), round_half_up(d.abs(), 2))
}

fn pct_text(p: Option<Fraction>) -> String {
    p.map_or(UNDEFINED.into(), |f| format!("{}%", arrowed(f.percent())))
}

fn pct_plain(p: Option<Fraction>) -> String {
    p.map_or(String::new(), |f| format!("{:.2}", f.percent_2dp()))
}

fn quantity_text(q: &Option<Quantity>) -> String {
    q.map_or("-".into(), |q| format!("{} {}", q.magnitude, q.unit))
}

fn value_text(l: &LineItem) -> String {
    if l.is_assessed() {
        l.value.display_billions()
    } else {
        NOT_ASSESSED.into()
    }
}

fn side_column(sheet: &BalanceSheet, side: Side) -> Vec<[String; 3]> {
    let mut rows = vec![[
        match side {
            Side::Asset => "ASSETS".into(),
            Side::Liability => "LIABILITIES".into(),
        },
        String::new(),
        String::new(),
    ]];
    rows.push(["Item".into(), "Physical quantity".into(), "Value".into()]);
    for &c in side.categories() {
        let items: Vec<&LineItem> = sheet.side(side).iter().filter(|l| l.category == c).collect();
        if items.is_empty() {
            continue;
        }
        rows.push([c.label().into(), String::new(), String::new()]);
        for l in items {
            rows.push([format!("  {}", l.item), quantity_text(&l.quantity), value_text(l)]);
        }
    }
    rows
}

fn render_column(rows: &[[String; 3]], footer: [String; 2]) -> Vec<String> {
    let w0 = rows.iter().map(|r| width(&r[0])).max().unwrap_or(0).max(width(&footer[0]));
    let w1 = rows.iter().map(|r| width(&r[1])).max().unwrap_or(0);
    let w2 = rows.iter().map(|r| width(&r[2])).max().unwrap_or(0).max(width(&footer[1]));
    let mut out: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{}  {}  {}",
                pad(&r[0], w0, false),
                pad(&r[1], w1, true),
                pad(&r[2], w2, true)
            )
        })
        .collect();
    out.push(format!(
        "{}  {}  {}",
        pad(&footer[0], w0, false),
        pad("", w1, true),
        pad(&footer[1], w2, true)
    ));
    out
}

fn sheet_text(sheet: &BalanceSheet) -> String {
    let date = sheet.date.map_or("-".to_string(), |d| d.to_string());
    let region = if sheet.region.is_empty() { "-" } else { &sheet.region };
    let t = &sheet.totals;
    let mut left = render_column(
        &side_column(sheet, Side::Asset),
        ["Total Assets".into(), t.asset_total.display_billions()],
    );
    let mut right = render_column(
        &side_column(sheet, Side::Liability),
        ["Total Liabilities".into(), t.liability_total.display_billions()],
    );
    // Footers share the last line.
    let rows = left.len().max(right.len());
    let lw = left.iter().map(|s| width(s)).max().unwrap_or(0);
    let rw = right.iter().map(|s| width(s)).max().unwrap_or(0);
    let lf = left.pop().unwrap_or_default();
    let rf = right.pop().unwrap_or_default();
    left.resize(rows - 1, String::new());
    right.resize(rows - 1, String::new());
    left.push(lf);
    right.push(rf);

    let mut out = format!("Natural resource balance sheet: {region}, {date} (billion yuan)\n\n");
    for (l, r) in left.iter().zip(&right) {
        let line = format!("{} | {}", pad(l, lw, false), pad(r, rw, false));
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out.push('\n');
    out.push_str(&format!("Net Worth: {}\n", t.net_worth.display_billions()));
    out
}

fn sheet_json(sheet: &BalanceSheet) -> Result<String> {
    let mut lines = Vec::new();
    if let Some(date) = sheet.date {
        for l in sheet.items() {
            let row = LineItemRow {
                region: sheet.region.clone(),
                date: date.to_string(),
                side: l.side.to_string(),
                category: l.category.to_string(),
                item: l.item.clone(),
                quantity: l.quantity.map_or(String::new(), |q| q.magnitude.to_string()),
                quantity_unit: l.quantity.map_or(String::new(), |q| q.unit.to_string()),
                unit_price_yuan: l.price.map_or(String::new(), |p| p.amount().to_string()),
                price_per_unit: l.price.map_or(String::new(), |p| p.per().to_string()),
                valuation_method: l.method.to_string(),
                value_billion_yuan: exact_billions(l.value),
            };
            let mut v = serde_json::to_value(row).map_err(|e| Error::Io(e.to_string()))?;
            v["record"] = json!("item");
            lines.push(v);
        }
    }
    let t = &sheet.totals;
    lines.push(json!({
        "record": "totals",
        "region": sheet.region,
        "date": sheet.date.map(|d| d.to_string()),
        "asset_total_billion_yuan": exact_billions(t.asset_total),
        "liability_total_billion_yuan": exact_billions(t.liability_total),
        "net_worth_billion_yuan": exact_billions(t.net_worth),
    }));
    Ok(json_lines(lines))
}

/// Text mirrors the two-sided layout; CSV is the input schema; json-lines has
/// one object per item and a final totals object.
pub fn render_sheet(sheet: &BalanceSheet, format: Format) -> Result<String> {
    match format {
        Format::Text => Ok(sheet_text(sheet)),
        Format::Csv => {
            let mut buf = Vec::new();
            write_sheet_csv(sheet, &mut buf)?;
            String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
        }
        Format::JsonLines => sheet_json(sheet),
    }
}

fn kind_token(k: &DiscrepancyKind) -> &'static str {
    match k {
        DiscrepancyKind::ValueMismatch { .. } => "value_mismatch",
        DiscrepancyKind::PriceReference { .. } => "price_reference",
        DiscrepancyKind::IllegalCategory => "illegal_category",
        DiscrepancyKind::TotalMismatch { .. } => "total_mismatch",
        DiscrepancyKind::NetWorthIdentity { .. } => "net_worth_identity",
    }
}

const DISCREPANCY_COLUMNS: [&str; 6] = [
    "item",
    "kind",
    "computed_billion_yuan",
    "stored_billion_yuan",
    "suggested_power_of_ten",
    "message",
];

pub fn render_discrepancies(ds: &[Discrepancy], format: Format) -> Result<String> {
    match format {
        Format::Text if ds.is_empty() => Ok("no discrepancies\n".into()),
        Format::Text => Ok(ds.iter().map(|d| format!("{d}\n")).collect()),
        Format::JsonLines => {
            let values: std::result::Result<Vec<Value>, _> =
                ds.iter().map(serde_json::to_value).collect();
            Ok(json_lines(values.map_err(|e| Error::Io(e.to_string()))?))
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = ds
                .iter()
                .map(|d| {
                    let (computed, stored, k) = match &d.kind {
                        DiscrepancyKind::ValueMismatch {
                            computed,
                            stored,
                            suggested_power_of_ten,
                            ..
                        } => (
                            exact_billions(*computed),
                            exact_billions(*stored),
                            suggested_power_of_ten.map_or(String::new(), |k| k.to_string()),
                        ),
                        DiscrepancyKind::TotalMismatch {
                            recomputed, stored, ..
                        } => (exact_billions(*recomputed), exact_billions(*stored), String::new()),
                        _ => Default::default(),
                    };
                    vec![
                        d.key.as_ref().map_or(String::new(), |k| k.to_string()),
                        kind_token(&d.kind).into(),
                        computed,
                        stored,
                        k,
                        d.to_string(),
                    ]
                })
                .collect();
            csv_string(&DISCREPANCY_COLUMNS, &rows)
        }
    }
}

const CHANGE_COLUMNS: [&str; 13] = [
    "status",
    "side",
    "category",
    "item",
    "q_open",
    "q_open_unit",
    "q_close",
    "q_close_unit",
    "level_change",
    "const_change_billion_yuan",
    "const_pct",
    "curr_change_billion_yuan",
    "curr_pct",
];

fn split_quantity(q: &Option<Quantity>) -> (String, String) {
    q.map_or((String::new(), String::new()), |q| {
        (q.magnitude.to_string(), q.unit.to_string())
    })
}

fn change_row(r: &ChangeRecord) -> Vec<String> {
    let (qo, qou) = split_quantity(&r.q_open);
    let (qc, qcu) = split_quantity(&r.q_close);
    let (cl, cp) = r.constant_price.map_or((String::new(), String::new()), |c| {
        (exact_billions(c.level), pct_plain(c.pct))
    });
    vec![
        "matched".into(),
        r.key.side.to_string(),
        r.key.category.to_string(),
        r.key.item.clone(),
        qo,
        qou,
        qc,
        qcu,
        r.level_change.map_or(String::new(), |q| q.magnitude.to_string()),
        cl,
        cp,
        exact_billions(r.current_price.level),
        pct_plain(r.current_price.pct),
    ]
}

fn unmatched_row(status: &str, l: &LineItem) -> Vec<String> {
    let (q, qu) = split_quantity(&l.quantity);
    let mut row = vec![
        status.to_string(),
        l.side.to_string(),
        l.category.to_string(),
        l.item.clone(),
    ];
    if status == "removed" {
        row.extend([q, qu, String::new(), String::new()]);
    } else {
        row.extend([String::new(), String::new(), q, qu]);
    }
    row.resize(CHANGE_COLUMNS.len(), String::new());
    row
}

fn changes_text(report: &ChangeReport) -> String {
    let headers = [
        "Item",
        "Opening",
        "Closing",
        "Level change",
        "Constant price",
        "Change",
        "Current price",
        "Change",
    ];
    let mut out = String::new();
    for side in [Side::Asset, Side::Liability] {
        let rows: Vec<Vec<String>> = report
            .records
            .iter()
            .filter(|r| r.key.side == side)
            .map(|r| {
                let (cl, cp) = r.constant_price.map_or((UNDEFINED.into(), UNDEFINED.into()), |c| {
                    (arrowed(c.level.billions()), pct_text(c.pct))
                });
                vec![
                    r.key.item.clone(),
                    quantity_text(&r.q_open),
                    quantity_text(&r.q_close),
                    r.level_change
                        .map_or(UNDEFINED.into(), |q| format!("{} {}", arrowed(q.magnitude), q.unit)),
                    cl,
                    cp,
                    arrowed(r.current_price.level.billions()),
                    pct_text(r.current_price.pct),
                ]
            })
            .collect();
        if rows.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(match side {
            Side::Asset => "ASSET CHANGES (billion yuan)\n",
            Side::Liability => "LIABILITY CHANGES (billion yuan)\n",
        });
        out.push_str(&table(&headers, &rows));
    }
    for (title, items) in [("Added", &report.additions), ("Removed", &report.removals)] {
        if !items.is_empty() {
            out.push_str(&format!("\n{title}:\n"));
            for l in items.iter() {
                out.push_str(&format!("  {}\n", l.key()));
            }
        }
    }
    if out.is_empty() {
        out.push_str("no matching items\n");
    }
    out
}

/// Per-item changes. Text uses arrows and magnitudes; CSV and json-lines use
/// signed values and exact billions.
pub fn render_changes(report: &ChangeReport, format: Format) -> Result<String> {
    if format == Format::Text {
        return Ok(changes_text(report));
    }
    let mut rows: Vec<Vec<String>> = report.records.iter().map(change_row).collect();
    rows.extend(report.additions.iter().map(|l| unmatched_row("added", l)));
    rows.extend(report.removals.iter().map(|l| unmatched_row("removed", l)));
    tabular(format, &CHANGE_COLUMNS, &rows)
}

const SUMMARY_COLUMNS: [&str; 5] = ["item", "opening", "closing", "change", "change_pct"];

fn summary_rows(s: &SheetChangeSummary, text: bool) -> Vec<Vec<String>> {
    let money = |m: Money| if text { m.display_billions() } else { exact_billions(m) };
    let change = |c: &PriceChange| {
        if text {
            (arrowed(c.level.billions()), pct_text(c.pct))
        } else {
            (exact_billions(c.level), pct_plain(c.pct))
        }
    };
    let mut rows = Vec::new();
    for (name, open, close, c) in [
        ("Total assets", s.asset_open, s.asset_close, &s.asset_change),
        ("Total liabilities", s.liability_open, s.liability_close, &s.liability_change),
        ("Net worth", s.net_worth_open, s.net_worth_close, &s.net_worth_change),
        ("GDP", s.gdp_open, s.gdp_close, &s.gdp_change),
    ] {
        let (level, pct) = change(c);
        rows.push(vec![name.into(), money(open), money(close), level, pct]);
    }
    let ratio = |f: Option<Fraction>| {
        f.map_or(UNDEFINED.to_string(), |f| {
            if text {
                f.display_percent()
            } else {
                format!("{:.2}", f.percent_2dp())
            }
        })
    };
    rows.push(vec![
        "Liabilities / GDP".into(),
        ratio(s.liability_to_gdp_open),
        ratio(s.liability_to_gdp_close),
        String::new(),
        String::new(),
    ]);
    rows
}

pub fn render_summary(s: &SheetChangeSummary, format: Format) -> Result<String> {
    if format == Format::Text {
        let date = |d: Option<chrono::NaiveDate>| d.map_or("-".to_string(), |d| d.to_string());
        let heading = format!(
            "{}: {} to {} (billion yuan)\n",
            s.region,
            date(s.opening_date),
            date(s.closing_date)
        );
        let rows = summary_rows(s, true);
        return Ok(heading + &table(&["Item", "Opening", "Closing", "Change", "Change %"], &rows));
    }
    tabular(format, &SUMMARY_COLUMNS, &summary_rows(s, false))
}

const RECORD_COLUMNS: [&str; 9] = [
    "category",
    "item",
    "debtor_kind",
    "debtor_name",
    "creditor_kind",
    "creditor_name",
    "repayment_start",
    "repayment_end",
    "expenditure_billion_yuan",
];

pub fn render_records(records: &[LiabilityRecord], format: Format) -> Result<String> {
    if format == Format::Text {
        let rows: Vec<Vec<String>> = records
            .iter()
            .map(|r| {
                vec![
                    format!("{}: {}", r.category.label(), r.item),
                    r.debtor.to_string(),
                    r.creditor.name.clone(),
                    r.repayment_period
                        .map_or("unspecified".into(), |p| format!("{} to {}", p.start, p.end)),
                    r.expenditure.display_billions(),
                ]
            })
            .collect();
        let total: Money = records.iter().map(|r| r.expenditure).sum();
        let mut out = table(
            &["Liability", "Debtor", "Creditor", "Repayment", "Expenditure (billion yuan)"],
            &rows,
        );
        out.push_str(&format!("Total expenditure: {}\n", total.display_billions()));
        return Ok(out);
    }
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let (start, end) = r
                .repayment_period
                .map_or((String::new(), String::new()), |p| {
                    (p.start.to_string(), p.end.to_string())
                });
            vec![
                r.category.to_string(),
                r.item.clone(),
                r.debtor.kind.to_string(),
                r.debtor.name.clone(),
                r.creditor.kind.to_string(),
                r.creditor.name.clone(),
                start,
                end,
                exact_billions(r.expenditure),
            ]
        })
        .collect();
    tabular(format, &RECORD_COLUMNS, &rows)
}

const RIGHTS_COLUMNS: [&str; 4] = ["category", "right", "actor_kind", "actor_name"];

/// CSV output is the regime config format.
pub fn render_rights(m: &RightsMatrix, format: Format) -> Result<String> {
    if format == Format::Text {
        return Ok(rights_report(m));
    }
    let rows: Vec<Vec<String>> = m
        .entries()
        .map(|(c, r, a)| vec![c.to_string(), r.to_string(), a.kind.to_string(), a.name.clone()])
        .collect();
    tabular(format, &RIGHTS_COLUMNS, &rows)
}
