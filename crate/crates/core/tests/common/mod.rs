#![allow(dead_code)]

use std::path::PathBuf;

use nrbs::io::load_sheet_path;
use nrbs::BalanceSheet;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn sheet_2013() -> BalanceSheet {
    load_sheet_path(fixture("shaanxi_2013.csv")).expect("2013 fixture loads")
}

pub fn sheet_2018() -> BalanceSheet {
    load_sheet_path(fixture("shaanxi_2018.csv")).expect("2018 fixture loads")
}

/// Rows of a fixture manifest, skipping `#` comments and the header.
pub fn manifest(name: &str) -> Vec<Vec<String>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(fixture(name))
        .expect("manifest opens");
    rdr.records()
        .map(|r| r.expect("manifest row").iter().map(str::to_string).collect())
        .collect()
}
