mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;

use nrbs::change::{constant_price_change, current_price_change, item_change_report, sheet_change};
use nrbs::compiler::{category_subtotal, compile_sheet, validate_consistency, DEFAULT_REL_TOL};
use nrbs::io::{load_sheet, write_sheet_csv};
use nrbs::responsibility::{assign_creditor, build_records, Agency, DebtorMap};
use nrbs::valuation::{
    income_capitalization, valued_item, water_closing_stock, IcaParams, WaterDecreases,
    WaterFlows, WaterIncreases,
};
use nrbs::{
    BalanceSheet, Category, LineItem, Money, Quantity, Side, Symbol, Unit, UnitPrice,
    ValuationMethod,
};

fn dec_2dp(max_cents: u64) -> impl Strategy<Value = Decimal> {
    (0..=max_cents).prop_map(|c| Decimal::new(c as i64, 2))
}

fn symbol_for(category: Category) -> Symbol {
    match category {
        Category::Land => Symbol::SquareKilometre,
        Category::Water | Category::Forests => Symbol::CubicMetre,
        Category::EcologicalDegradation => Symbol::Hectare,
        _ => Symbol::Tonne,
    }
}

fn method_for(side: Side) -> ValuationMethod {
    match side {
        Side::Asset => ValuationMethod::Market,
        Side::Liability => ValuationMethod::Abatement,
    }
}

/// A priced line item valued by the valuation module, or an aggregate row.
fn item_strategy(side: Side, idx: usize) -> impl Strategy<Value = LineItem> {
    let cats = side.categories().to_vec();
    (
        prop::sample::select(cats),
        dec_2dp(10_000_000),
        0u8..=10,
        1u64..=5_000_000,
        0u8..=3,
        any::<bool>(),
        dec_2dp(1_000_000),
    )
        .prop_map(move |(cat, mag, scale, price_cents, per_scale, aggregate, agg_value)| {
            let sym = symbol_for(cat);
            let name = format!("item {idx}");
            if aggregate {
                let value = Money::from_billions(agg_value).unwrap();
                LineItem::new(side, cat, name, None, None, ValuationMethod::Aggregate, value)
                    .unwrap()
            } else {
                let q = Quantity::new(mag, Unit::new(sym, scale).unwrap());
                let p = UnitPrice::new(
                    Decimal::new(price_cents as i64, 2),
                    Unit::new(sym, per_scale).unwrap(),
                )
                .unwrap();
                valued_item(side, cat, name, q, p, method_for(side)).unwrap()
            }
        })
}

fn side_strategy(side: Side, max: usize) -> impl Strategy<Value = Vec<LineItem>> {
    (0..=max).prop_flat_map(move |n| {
        (0..n)
            .map(|i| item_strategy(side, i).boxed())
            .collect::<Vec<_>>()
    })
}

fn sheet_strategy() -> impl Strategy<Value = BalanceSheet> {
    (side_strategy(Side::Asset, 8), side_strategy(Side::Liability, 8)).prop_map(|(a, l)| {
        compile_sheet("Region", chrono::NaiveDate::from_ymd_opt(2020, 12, 31), a, l).unwrap()
    })
}

fn to_f64(d: Decimal) -> f64 {
    d.to_f64().unwrap()
}

fn brute_force_ica(p: f64, r: f64, n: u32) -> f64 {
    (1..=n).map(|t| p / (1.0 + r).powi(t as i32)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ica_matches_brute_force(
        rent in 1u64..=100_000_000,
        rate_bp in 1u32..=5_000,
        years in 1u32..=200,
    ) {
        let p = Decimal::new(rent as i64, 2);
        let r = Decimal::new(rate_bp as i64, 4);
        let v = income_capitalization(&IcaParams::new(p, r, years).unwrap()).unwrap();
        let oracle = brute_force_ica(to_f64(p), to_f64(r), years);
        prop_assert!((to_f64(v) - oracle).abs() <= 1e-9 * oracle);
    }
}

proptest! {
    #[test]
    fn ica_zero_rate_limit(rent in 1u64..=100_000_000, years in 1u32..=200) {
        let p = Decimal::new(rent as i64, 2);
        let limit = p * Decimal::from(years);
        let exact = income_capitalization(&IcaParams::new(p, Decimal::ZERO, years).unwrap()).unwrap();
        prop_assert_eq!(exact, limit);
        let near = income_capitalization(&IcaParams::new(p, Decimal::new(1, 9), years).unwrap()).unwrap();
        prop_assert!(((near - limit) / limit).abs() < Decimal::new(1, 6));
    }

    #[test]
    fn ica_linear_in_rent(rent in 1u64..=1_000_000, k in 1u32..=1000, rate_bp in 0u32..=2000, years in 1u32..=100) {
        let r = Decimal::new(rate_bp as i64, 4);
        let p = Decimal::new(rent as i64, 2);
        let v1 = income_capitalization(&IcaParams::new(p, r, years).unwrap()).unwrap();
        let vk = income_capitalization(&IcaParams::new(p * Decimal::from(k), r, years).unwrap()).unwrap();
        let diff = (vk - v1 * Decimal::from(k)).abs();
        prop_assert!(diff <= vk * Decimal::new(1, 20));
    }

    #[test]
    fn ica_decreases_with_rate(rent in 1u64..=1_000_000, lo in 0u32..=1000, step in 1u32..=1000, years in 1u32..=100) {
        let p = Decimal::new(rent as i64, 2);
        let v = |bp: u32| income_capitalization(&IcaParams::new(p, Decimal::new(bp as i64, 4), years).unwrap()).unwrap();
        prop_assert!(v(lo + step) < v(lo));
    }

    #[test]
    fn water_conservation(
        opening in dec_2dp(1_000_000_000),
        inc in prop::array::uniform4((dec_2dp(1_000_000), 0u8..=4)),
        dec in prop::array::uniform3((dec_2dp(1_000), 0u8..=2)),
        open_scale in 0u8..=10,
    ) {
        let v = |m: Decimal, k: u8| Quantity::new(m, Unit::new(Symbol::CubicMetre, k).unwrap());
        let flows = WaterFlows {
            opening: v(opening, open_scale),
            increases: WaterIncreases {
                rainfall: v(inc[0].0, inc[0].1),
                inflows: v(inc[1].0, inc[1].1),
                socio_economic_return: v(inc[2].0, inc[2].1),
                other: v(inc[3].0, inc[3].1),
            },
            decreases: WaterDecreases {
                water_utility: v(dec[0].0, dec[0].1),
                outflows: v(dec[1].0, dec[1].1),
                other: v(dec[2].0, dec[2].1),
            },
        };
        let sum = |qs: Vec<&Quantity>| qs.into_iter().fold(Quantity::zero(flows.opening.unit), |a, q| a.checked_add(q).unwrap());
        let net = sum(flows.increases.iter().collect()).checked_sub(&sum(flows.decreases.iter().collect())).unwrap();
        match water_closing_stock(&flows) {
            Ok(closing) => {
                prop_assert_eq!(closing.unit, flows.opening.unit);
                prop_assert!(closing.checked_sub(&flows.opening).unwrap().same_amount(&net).unwrap());
            }
            Err(nrbs::Error::NegativeClosingStock(_)) => {
                prop_assert!(flows.opening.checked_add(&net).unwrap().is_negative());
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn water_zero_and_balanced_flux(opening in dec_2dp(1_000_000_000), flux in dec_2dp(1_000_000), k in 0u8..=10) {
        let unit = Unit::new(Symbol::CubicMetre, k).unwrap();
        let open = Quantity::new(opening, unit);
        let zero = WaterFlows { opening: open, increases: WaterIncreases::zero(unit), decreases: WaterDecreases::zero(unit) };
        prop_assert_eq!(water_closing_stock(&zero).unwrap(), open);
        let mut balanced = zero;
        balanced.increases.inflows = Quantity::new(flux, unit);
        balanced.decreases.outflows = Quantity::new(flux, unit);
        prop_assert!(water_closing_stock(&balanced).unwrap().same_amount(&open).unwrap());
    }

    #[test]
    fn compile_is_permutation_invariant(sheet in sheet_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = sheet.assets.clone();
        let mut l = sheet.liabilities.clone();
        a.shuffle(&mut rng);
        l.shuffle(&mut rng);
        let shuffled = compile_sheet(sheet.region.clone(), sheet.date, a, l).unwrap();
        prop_assert_eq!(shuffled.totals, sheet.totals);
        for side in [Side::Asset, Side::Liability] {
            for &c in side.categories() {
                prop_assert_eq!(category_subtotal(&shuffled, side, c), category_subtotal(&sheet, side, c));
            }
        }
    }

    #[test]
    fn subtotals_sum_to_side_totals(sheet in sheet_strategy()) {
        for side in [Side::Asset, Side::Liability] {
            let s: Money = side.categories().iter().map(|&c| category_subtotal(&sheet, side, c)).sum();
            prop_assert_eq!(s, sheet.side_total(side));
        }
        prop_assert_eq!(sheet.totals.net_worth, sheet.totals.asset_total - sheet.totals.liability_total);
    }

    #[test]
    fn compile_is_deterministic(sheet in sheet_strategy()) {
        let again = compile_sheet(sheet.region.clone(), sheet.date, sheet.assets.clone(), sheet.liabilities.clone()).unwrap();
        prop_assert_eq!(again, sheet);
    }

    #[test]
    fn valued_sheets_validate_clean(sheet in sheet_strategy()) {
        prop_assert!(validate_consistency(&sheet, DEFAULT_REL_TOL).unwrap().is_empty());
    }

    #[test]
    fn csv_round_trip(sheet in sheet_strategy()) {
        let mut buf = Vec::new();
        write_sheet_csv(&sheet, &mut buf).unwrap();
        let back = load_sheet(&buf[..]).unwrap();
        if sheet.items().next().is_some() {
            prop_assert_eq!(&back, &sheet);
        } else {
            prop_assert_eq!(back.totals, sheet.totals);
        }
        let mut again = Vec::new();
        write_sheet_csv(&back, &mut again).unwrap();
        prop_assert_eq!(again, buf);
    }

    #[test]
    fn change_is_antisymmetric(a in sheet_strategy(), b in sheet_strategy()) {
        let ab = item_change_report(&a, &b).unwrap();
        let ba = item_change_report(&b, &a).unwrap();
        prop_assert_eq!(ab.records.len(), ba.records.len());
        prop_assert_eq!(ab.additions.len(), ba.removals.len());
        for r in &ab.records {
            let s = ba.records.iter().find(|x| x.key == r.key).unwrap();
            prop_assert_eq!(r.current_price.level, -s.current_price.level);
            if let (Some(x), Some(y)) = (r.level_change, s.level_change) {
                prop_assert!(x.checked_add(&y).unwrap().magnitude.is_zero());
            }
        }
        let s1 = sheet_change(&a, &b, Money::ZERO, Money::ZERO).unwrap();
        let s2 = sheet_change(&b, &a, Money::ZERO, Money::ZERO).unwrap();
        prop_assert_eq!(s1.net_worth_change.level, -s2.net_worth_change.level);
    }

    #[test]
    fn change_sign_matches_pct_sign(open in dec_2dp(10_000_000), close in dec_2dp(10_000_000)) {
        let c = current_price_change(Money::from_billions(open).unwrap(), Money::from_billions(close).unwrap()).unwrap();
        let level_sign = if c.level.is_zero() { 0 } else if c.level.is_negative() { -1 } else { 1 };
        match c.pct {
            Some(p) => prop_assert_eq!(p.signum(), level_sign),
            None => prop_assert!(open.is_zero()),
        }
    }

    #[test]
    fn constant_price_ignores_price_unit(
        q0 in dec_2dp(1_000_000), q1 in dec_2dp(1_000_000), k in 0u8..=6,
        cents in 1u64..=10_000_000, per in 0u8..=6, per2 in 0u8..=6,
    ) {
        let unit = Unit::new(Symbol::Tonne, k).unwrap();
        let p = UnitPrice::new(Decimal::new(cents as i64, 2), Unit::new(Symbol::Tonne, per).unwrap()).unwrap();
        let p2 = p.per_unit(Unit::new(Symbol::Tonne, per2).unwrap()).unwrap();
        let a = constant_price_change(&Quantity::new(q0, unit), &Quantity::new(q1, unit), &p).unwrap();
        let b = constant_price_change(&Quantity::new(q0, unit), &Quantity::new(q1, unit), &p2).unwrap();
        prop_assert_eq!(a.level, b.level);
        prop_assert_eq!(a.pct, b.pct);
    }

    #[test]
    fn item_changes_sum_to_total_change(a in sheet_strategy(), seed in any::<u64>()) {
        // Same items, values rescaled by a seeded factor.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bump = |items: &[LineItem], rng: &mut ChaCha8Rng| -> Vec<LineItem> {
            items.iter().map(|l| {
                let mut l = l.clone();
                l.method = ValuationMethod::Aggregate;
                l.price = None;
                let f = Decimal::new(*[50i64, 100, 150, 275].choose(rng).unwrap(), 2);
                l.value = Money::from_yuan(l.value.yuan() * f);
                l
            }).collect()
        };
        let b = compile_sheet(a.region.clone(), a.date, bump(&a.assets, &mut rng), bump(&a.liabilities, &mut rng)).unwrap();
        let report = item_change_report(&a, &b).unwrap();
        prop_assert!(report.additions.is_empty() && report.removals.is_empty());
        let sum = |side: Side| -> Money {
            report.records.iter().filter(|r| r.key.side == side).map(|r| r.current_price.level).sum()
        };
        let s = sheet_change(&a, &b, Money::ZERO, Money::ZERO).unwrap();
        prop_assert_eq!(sum(Side::Asset), s.asset_change.level);
        prop_assert_eq!(sum(Side::Liability), s.liability_change.level);
        prop_assert_eq!(s.net_worth_change.level, s.asset_change.level - s.liability_change.level);
    }

    #[test]
    fn records_sum_to_liability_total(sheet in sheet_strategy()) {
        let records = build_records(&sheet, &DebtorMap::new()).unwrap();
        prop_assert_eq!(records.len(), sheet.liabilities.len());
        let total: Money = records.iter().map(|r| r.expenditure).sum();
        prop_assert_eq!(total, sheet.totals.liability_total);
        for r in &records {
            prop_assert!(matches!(r.creditor.as_agency(), Some(Agency::Mnr | Agency::Mee)));
            prop_assert!(r.repayment_period.is_none());
        }
    }
}

#[test]
fn creditor_image_is_exactly_two_agencies() {
    let image: std::collections::BTreeSet<_> = Category::LIABILITIES
        .iter()
        .map(|&c| assign_creditor(c).unwrap().as_agency().unwrap())
        .collect();
    assert_eq!(image, [Agency::Mnr, Agency::Mee].into_iter().collect());
    for c in Category::ASSETS {
        assert!(assign_creditor(c).is_err());
    }
}
