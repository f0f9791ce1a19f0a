//! Property-rights regime and liability-responsibility records.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{csv_error, csv_reader, parse_field, row_of};
use crate::model::{BalanceSheet, Category, Side};
use crate::money::Money;

const DEFAULT_REGIME: &str = include_str!("../fixtures/regime_default.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RightGroup {
    Use,
    Control,
    Authoritative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RightKind {
    UseDirect,
    UseIndirect,
    Management,
    Exclusion,
    Transaction,
    Monitoring,
    Definition,
    Allocation,
}

impl RightKind {
    pub const ALL: [RightKind; 8] = [
        RightKind::UseDirect,
        RightKind::UseIndirect,
        RightKind::Management,
        RightKind::Exclusion,
        RightKind::Transaction,
        RightKind::Monitoring,
        RightKind::Definition,
        RightKind::Allocation,
    ];

    pub fn group(self) -> RightGroup {
        match self {
            RightKind::UseDirect | RightKind::UseIndirect => RightGroup::Use,
            RightKind::Management
            | RightKind::Exclusion
            | RightKind::Transaction
            | RightKind::Monitoring => RightGroup::Control,
            RightKind::Definition | RightKind::Allocation => RightGroup::Authoritative,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            RightKind::UseDirect => "use_direct",
            RightKind::UseIndirect => "use_indirect",
            RightKind::Management => "management",
            RightKind::Exclusion => "exclusion",
            RightKind::Transaction => "transaction",
            RightKind::Monitoring => "monitoring",
            RightKind::Definition => "definition",
            RightKind::Allocation => "allocation",
        }
    }
}

impl fmt::Display for RightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for RightKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        RightKind::ALL
            .into_iter()
            .find(|r| r.token() == s)
            .ok_or_else(|| format!("unknown right `{s}`"))
    }
}

/// The two creditor agencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Agency {
    /// Ministry of Natural Resources.
    Mnr,
    /// Ministry of Ecology and Environment.
    Mee,
}

impl Agency {
    pub fn token(self) -> &'static str {
        match self {
            Agency::Mnr => "MNR",
            Agency::Mee => "MEE",
        }
    }

    pub fn full_name(self) -> &'static str {
        match self {
            Agency::Mnr => "Ministry of Natural Resources",
            Agency::Mee => "Ministry of Ecology and Environment",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActorKind {
    Agency(Agency),
    /// Government at the given administrative level, e.g. `provincial`.
    Government(String),
    Company,
    Individual,
    Organization,
}

impl fmt::Display for ActorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActorKind::Agency(a) => write!(f, "agency:{}", a.token()),
            ActorKind::Government(level) => write!(f, "government:{level}"),
            ActorKind::Company => f.write_str("company"),
            ActorKind::Individual => f.write_str("individual"),
            ActorKind::Organization => f.write_str("organization"),
        }
    }
}

impl FromStr for ActorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "agency:MNR" => ActorKind::Agency(Agency::Mnr),
            "agency:MEE" => ActorKind::Agency(Agency::Mee),
            "company" => ActorKind::Company,
            "individual" => ActorKind::Individual,
            "organization" => ActorKind::Organization,
            other => match other.strip_prefix("government:") {
                Some(level) if !level.is_empty() => ActorKind::Government(level.to_string()),
                _ => return Err(format!("unknown actor kind `{other}`")),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Actor {
    pub kind: ActorKind,
    pub name: String,
}

impl Actor {
    pub fn new(kind: ActorKind, name: impl Into<String>) -> Self {
        Actor {
            kind,
            name: name.into(),
        }
    }

    pub fn agency(a: Agency) -> Self {
        Actor::new(ActorKind::Agency(a), a.token())
    }

    pub fn mnr() -> Self {
        Actor::agency(Agency::Mnr)
    }

    pub fn mee() -> Self {
        Actor::agency(Agency::Mee)
    }

    /// Debtor used when neither the input nor the regime names one.
    pub fn default_debtor() -> Self {
        Actor::new(ActorKind::Company, "company")
    }

    pub fn as_agency(&self) -> Option<Agency> {
        match self.kind {
            ActorKind::Agency(a) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.name, self.kind)
    }
}

/// Actors holding each right over each liability category.
///
/// Invariants: only liability categories appear; every category present has
/// at least one monitoring holder; each agency appears under a single name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RightsMatrix {
    grid: BTreeMap<(Category, RightKind), BTreeSet<Actor>>,
}

impl RightsMatrix {
    pub fn new(entries: impl IntoIterator<Item = (Category, RightKind, Actor)>) -> Result<Self> {
        let mut grid: BTreeMap<(Category, RightKind), BTreeSet<Actor>> = BTreeMap::new();
        let mut agency_names: BTreeMap<Agency, String> = BTreeMap::new();
        for (category, right, actor) in entries {
            category.ensure_legal_for(Side::Liability)?;
            if let Some(agency) = actor.as_agency() {
                let name = agency_names
                    .entry(agency)
                    .or_insert_with(|| actor.name.clone());
                if *name != actor.name {
                    return Err(Error::DuplicateAgency(agency.token().to_string()));
                }
            }
            grid.entry((category, right)).or_default().insert(actor);
        }
        let m = RightsMatrix { grid };
        for c in m.categories() {
            if m.holders(c, RightKind::Monitoring).next().is_none() {
                return Err(Error::MissingMonitoring(c));
            }
        }
        Ok(m)
    }

    /// Reads the `category,right,actor_kind,actor_name` config format.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv_reader(reader);
        let mut entries = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_error)?;
            let row = row_of(&rec);
            if rec.len() != 4 {
                return Err(Error::Parse {
                    row,
                    message: format!("expected 4 columns, found {}", rec.len()),
                });
            }
            let category: Category = parse_field(row, &rec[0])?;
            let right: RightKind = parse_field(row, &rec[1])?;
            let kind: ActorKind = parse_field(row, &rec[2])?;
            entries.push((category, right, Actor::new(kind, &rec[3])));
        }
        RightsMatrix::new(entries)
    }

    /// The shipped default regime.
    pub fn shaanxi_default() -> Result<Self> {
        RightsMatrix::from_csv(DEFAULT_REGIME.as_bytes())
    }

    /// Categories with at least one entry, in taxonomy order.
    pub fn categories(&self) -> impl Iterator<Item = Category> + '_ {
        let set: BTreeSet<Category> = self.grid.keys().map(|(c, _)| *c).collect();
        set.into_iter()
    }

    /// Every (category, right, actor) triple in grid order.
    pub fn entries(&self) -> impl Iterator<Item = (Category, RightKind, &Actor)> {
        self.grid
            .iter()
            .flat_map(|((c, r), actors)| actors.iter().map(move |a| (*c, *r, a)))
    }

    pub fn holders(&self, category: Category, right: RightKind) -> impl Iterator<Item = &Actor> {
        self.grid.get(&(category, right)).into_iter().flatten()
    }
}

/// Creditor agency for a liability category.
pub fn assign_creditor(category: Category) -> Result<Actor> {
    match category {
        Category::ResourceOverexploitation => Ok(Actor::mnr()),
        Category::EnvironmentalPollution | Category::EcologicalDegradation => Ok(Actor::mee()),
        asset => Err(Error::IllegalCategory {
            side: Side::Liability,
            category: asset,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepaymentPeriod {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl RepaymentPeriod {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if end < start {
            return Err(Error::InvalidParams(format!(
                "repayment period ends ({end}) before it starts ({start})"
            )));
        }
        Ok(RepaymentPeriod { start, end })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DebtorEntry {
    pub debtor: Actor,
    pub repayment_period: Option<RepaymentPeriod>,
}

/// Debtor lookup: item entry, then category entry, then [`Actor::default_debtor`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DebtorMap {
    items: BTreeMap<(Category, String), DebtorEntry>,
    categories: BTreeMap<Category, DebtorEntry>,
}

impl DebtorMap {
    pub fn new() -> Self {
        DebtorMap::default()
    }

    /// Category debtors taken from the regime: the sole non-agency holder of
    /// direct use rights, when there is exactly one.
    pub fn from_regime(m: &RightsMatrix) -> Self {
        let mut map = DebtorMap::new();
        for c in m.categories() {
            let users: Vec<&Actor> = m
                .holders(c, RightKind::UseDirect)
                .filter(|a| a.as_agency().is_none())
                .collect();
            if let [only] = users.as_slice() {
                map.set_category(c, (*only).clone(), None);
            }
        }
        map
    }

    pub fn set_item(
        &mut self,
        category: Category,
        item: impl Into<String>,
        debtor: Actor,
        repayment_period: Option<RepaymentPeriod>,
    ) {
        self.items.insert(
            (category, item.into()),
            DebtorEntry {
                debtor,
                repayment_period,
            },
        );
    }

    pub fn set_category(
        &mut self,
        category: Category,
        debtor: Actor,
        repayment_period: Option<RepaymentPeriod>,
    ) {
        self.categories.insert(
            category,
            DebtorEntry {
                debtor,
                repayment_period,
            },
        );
    }

    /// Entries of `other` take precedence.
    pub fn merge(&mut self, other: DebtorMap) {
        self.items.extend(other.items);
        self.categories.extend(other.categories);
    }

    pub fn lookup(&self, category: Category, item: &str) -> DebtorEntry {
        self.items
            .get(&(category, item.to_string()))
            .or_else(|| self.categories.get(&category))
            .cloned()
            .unwrap_or(DebtorEntry {
                debtor: Actor::default_debtor(),
                repayment_period: None,
            })
    }

    /// Reads `category,item,actor_kind,actor_name[,repayment_start,repayment_end]`.
    /// An empty or `*` item applies to the whole category.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv_reader(reader);
        let mut map = DebtorMap::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_error)?;
            let row = row_of(&rec);
            if rec.len() != 4 && rec.len() != 6 {
                return Err(Error::Parse {
                    row,
                    message: format!("expected 4 or 6 columns, found {}", rec.len()),
                });
            }
            let category: Category = parse_field(row, &rec[0])?;
            if !category.is_legal_for(Side::Liability) {
                return Err(Error::Parse {
                    row,
                    message: format!("{category} is not a liability category"),
                });
            }
            let kind: ActorKind = parse_field(row, &rec[2])?;
            let debtor = Actor::new(kind, &rec[3]);
            let period = match rec.get(4).zip(rec.get(5)) {
                Some((s, e)) if !s.is_empty() || !e.is_empty() => {
                    let start: NaiveDate = parse_field(row, s)?;
                    let end: NaiveDate = parse_field(row, e)?;
                    Some(RepaymentPeriod::new(start, end).map_err(|e| Error::Parse {
                        row,
                        message: e.to_string(),
                    })?)
                }
                _ => None,
            };
            match &rec[1] {
                "" | "*" => map.set_category(category, debtor, period),
                item => map.set_item(category, item, debtor, period),
            }
        }
        Ok(map)
    }
}

/// Who owes what to whom for one liability line item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiabilityRecord {
    pub category: Category,
    pub item: String,
    pub debtor: Actor,
    pub creditor: Actor,
    pub repayment_period: Option<RepaymentPeriod>,
    pub expenditure: Money,
}

/// One record per assessed liability line item, in sheet order.
pub fn build_records(sheet: &BalanceSheet, debtors: &DebtorMap) -> Result<Vec<LiabilityRecord>> {
    sheet
        .liabilities
        .iter()
        .filter(|l| l.is_assessed())
        .map(|l| {
            let entry = debtors.lookup(l.category, &l.item);
            Ok(LiabilityRecord {
                category: l.category,
                item: l.item.clone(),
                debtor: entry.debtor,
                creditor: assign_creditor(l.category)?,
                repayment_period: entry.repayment_period,
                expenditure: l.value,
            })
        })
        .collect()
}

const EMPTY_MONITORING: &str = "(none: MISSING)";

/// Fixed-layout table: one row per category, one line per right, actors
/// sorted and joined by `; `.
pub fn rights_report(m: &RightsMatrix) -> String {
    let right_w = RightKind::ALL.iter().map(|r| r.token().len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in m.categories() {
        out.push_str(c.label());
        out.push('\n');
        for r in RightKind::ALL {
            let actors: Vec<String> = m.holders(c, r).map(|a| a.to_string()).collect();
            let cell = if actors.is_empty() {
                if r == RightKind::Monitoring {
                    EMPTY_MONITORING.to_string()
                } else {
                    "-".to_string()
                }
            } else {
                actors.join("; ")
            };
            out.push_str(&format!("  {:<right_w$}  {}\n", r.token(), cell));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gov() -> Actor {
        Actor::new(ActorKind::Government("provincial".into()), "Shaanxi")
    }

    #[test]
    fn rights_partition_into_groups() {
        let count = |g| RightKind::ALL.iter().filter(|r| r.group() == g).count();
        assert_eq!(count(RightGroup::Use), 2);
        assert_eq!(count(RightGroup::Control), 4);
        assert_eq!(count(RightGroup::Authoritative), 2);
        for r in RightKind::ALL {
            assert_eq!(r.token().parse::<RightKind>().unwrap(), r);
        }
    }

    #[test]
    fn creditor_mapping() {
        assert_eq!(assign_creditor(Category::ResourceOverexploitation).unwrap(), Actor::mnr());
        assert_eq!(assign_creditor(Category::EnvironmentalPollution).unwrap(), Actor::mee());
        assert_eq!(assign_creditor(Category::EcologicalDegradation).unwrap(), Actor::mee());
        assert!(matches!(
            assign_creditor(Category::Land),
            Err(Error::IllegalCategory { .. })
        ));
    }

    #[test]
    fn default_regime_monitoring_is_government() {
        let m = RightsMatrix::shaanxi_default().unwrap();
        let mon: Vec<_> = m
            .holders(Category::ResourceOverexploitation, RightKind::Monitoring)
            .collect();
        assert!(!mon.is_empty());
        assert!(mon.iter().all(|a| matches!(a.kind, ActorKind::Government(_))));
        assert_eq!(m.categories().count(), 3);
    }

    #[test]
    fn missing_monitoring_rejected() {
        let e = RightsMatrix::new([(
            Category::EnvironmentalPollution,
            RightKind::UseDirect,
            Actor::default_debtor(),
        )]);
        assert_eq!(e, Err(Error::MissingMonitoring(Category::EnvironmentalPollution)));
    }

    #[test]
    fn agency_must_be_singleton() {
        let e = RightsMatrix::new([
            (Category::EcologicalDegradation, RightKind::Monitoring, gov()),
            (Category::EcologicalDegradation, RightKind::Definition, Actor::mee()),
            (
                Category::EcologicalDegradation,
                RightKind::Allocation,
                Actor::new(ActorKind::Agency(Agency::Mee), "Other"),
            ),
        ]);
        assert!(matches!(e, Err(Error::DuplicateAgency(_))));
    }

    #[test]
    fn asset_category_rejected() {
        assert!(RightsMatrix::new([(Category::Land, RightKind::Monitoring, gov())]).is_err());
    }

    #[test]
    fn single_category_report() {
        let m = RightsMatrix::new([(Category::EcologicalDegradation, RightKind::Monitoring, gov())])
            .unwrap();
        let r = rights_report(&m);
        assert_eq!(r.lines().filter(|l| !l.starts_with(' ')).count(), 1);
        assert_eq!(r.lines().count(), 1 + RightKind::ALL.len());
        assert!(r.contains("monitoring    Shaanxi (government:provincial)"));
        assert_eq!(r, rights_report(&m));
    }

    #[test]
    fn debtor_lookup_order() {
        let mut d = DebtorMap::new();
        let org = Actor::new(ActorKind::Organization, "Coop");
        d.set_category(Category::EcologicalDegradation, org.clone(), None);
        d.set_item(Category::EcologicalDegradation, "CO2", gov(), None);
        assert_eq!(d.lookup(Category::EcologicalDegradation, "CO2").debtor, gov());
        assert_eq!(d.lookup(Category::EcologicalDegradation, "Overfishing").debtor, org);
        assert_eq!(
            d.lookup(Category::EnvironmentalPollution, "SO2").debtor,
            Actor::default_debtor()
        );
    }

    #[test]
    fn debtor_csv_with_period() {
        let src = "category,item,actor_kind,actor_name,repayment_start,repayment_end\n\
                   ResourceOverexploitation,Coal,company,Coal Group,2019-01-01,2023-12-31\n\
                   EnvironmentalPollution,*,individual,Residents,,\n";
        let d = DebtorMap::from_csv(src.as_bytes()).unwrap();
        let coal = d.lookup(Category::ResourceOverexploitation, "Coal");
        assert_eq!(coal.debtor.name, "Coal Group");
        assert!(coal.repayment_period.is_some());
        assert!(d.lookup(Category::EnvironmentalPollution, "SO2").repayment_period.is_none());
        let bad = "category,item,actor_kind,actor_name,repayment_start,repayment_end\n\
                   ResourceOverexploitation,Coal,company,X,2020-01-01,2019-01-01\n";
        assert!(matches!(DebtorMap::from_csv(bad.as_bytes()), Err(Error::Parse { row: 2, .. })));
    }

    #[test]
    fn regime_csv_errors_name_row() {
        let src = "category,right,actor_kind,actor_name\n\
                   EcologicalDegradation,monitoring,government:provincial,Shaanxi\n\
                   EcologicalDegradation,stewardship,company,X\n";
        assert!(matches!(
            RightsMatrix::from_csv(src.as_bytes()),
            Err(Error::Parse { row: 3, .. })
        ));
    }
}
