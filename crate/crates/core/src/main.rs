use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rust_decimal::Decimal;

use nrbs::change::{item_change_report, sheet_change};
use nrbs::compiler::{cross_check_prices, shaanxi_price_references, validate_consistency, DEFAULT_REL_TOL};
use nrbs::io::{
    load_sheet_path, render_changes, render_discrepancies, render_records, render_rights,
    render_sheet, render_summary, Format,
};
use nrbs::responsibility::{build_records, DebtorMap, RightsMatrix};
use nrbs::{Error, Money, Result};

#[derive(Parser)]
#[command(name = "nrbs", version, about = "Compile and analyse natural resource balance sheets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChangeReportKind {
    Summary,
    Items,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a sheet; print it and optionally write sheet.csv and totals.csv
    Compile {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Report consistency discrepancies (always exits 0 on readable input)
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        rel_tol: Decimal,
        /// Also compare unit prices with the built-in reference prices
        #[arg(long)]
        price_references: bool,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Compare two periods of the same region
    Changes {
        #[arg(long)]
        opening: PathBuf,
        #[arg(long)]
        closing: PathBuf,
        /// Opening-period GDP in billion yuan
        #[arg(long)]
        gdp_open: Decimal,
        /// Closing-period GDP in billion yuan
        #[arg(long)]
        gdp_close: Decimal,
        #[arg(long, value_enum, default_value = "all")]
        report: ChangeReportKind,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Build liability-responsibility records
    Assign {
        #[arg(long)]
        input: PathBuf,
        /// Rights-matrix config; the shipped default regime when omitted
        #[arg(long)]
        regime: Option<PathBuf>,
        /// Debtor overrides: category,item,actor_kind,actor_name[,repayment_start,repayment_end]
        #[arg(long)]
        debtors: Option<PathBuf>,
        /// Print the rights matrix before the records
        #[arg(long)]
        show_regime: bool,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Render a sheet in another format
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "text")]
        format: String,
    },
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run(cmd: Command) -> Result<String> {
    match cmd {
        Command::Compile { input, out, format } => {
            let format: Format = format.parse()?;
            let sheet = load_sheet_path(&input)?;
            if let Some(dir) = out {
                fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
                write_file(&dir.join("sheet.csv"), &render_sheet(&sheet, Format::Csv)?)?;
                let t = &sheet.totals;
                let totals = format!(
                    "region,date,asset_total_billion_yuan,liability_total_billion_yuan,net_worth_billion_yuan\n{},{},{},{},{}\n",
                    sheet.region,
                    sheet.date.map_or(String::new(), |d| d.to_string()),
                    t.asset_total.display_billions(),
                    t.liability_total.display_billions(),
                    t.net_worth.display_billions()
                );
                write_file(&dir.join("totals.csv"), &totals)?;
            }
            render_sheet(&sheet, format)
        }
        Command::Validate {
            input,
            rel_tol,
            price_references,
            format,
        } => {
            let format: Format = format.parse()?;
            let sheet = load_sheet_path(&input)?;
            let mut found = validate_consistency(&sheet, rel_tol)?;
            if price_references {
                found.extend(cross_check_prices(&sheet, &shaanxi_price_references()?, rel_tol)?);
            }
            render_discrepancies(&found, format)
        }
        Command::Changes {
            opening,
            closing,
            gdp_open,
            gdp_close,
            report,
            format,
        } => {
            let format: Format = format.parse()?;
            let a = load_sheet_path(&opening)?;
            let b = load_sheet_path(&closing)?;
            let gdp = |v: Decimal| {
                if v.is_sign_negative() {
                    Err(Error::InvalidParams(format!("GDP must be non-negative, got {v}")))
                } else {
                    Money::from_billions(v)
                }
            };
            let summary = sheet_change(&a, &b, gdp(gdp_open)?, gdp(gdp_close)?)?;
            let items = item_change_report(&a, &b)?;
            match (report, format) {
                (ChangeReportKind::Summary, f) => render_summary(&summary, f),
                (ChangeReportKind::Items, f) => render_changes(&items, f),
                (ChangeReportKind::All, Format::Text) => Ok(format!(
                    "{}\n{}",
                    render_summary(&summary, Format::Text)?,
                    render_changes(&items, Format::Text)?
                )),
                (ChangeReportKind::All, f) => Err(Error::InvalidParams(format!(
                    "--report all is text only; pick summary or items for {f}"
                ))),
            }
        }
        Command::Assign {
            input,
            regime,
            debtors,
            show_regime,
            format,
        } => {
            let format: Format = format.parse()?;
            let sheet = load_sheet_path(&input)?;
            let matrix = match regime {
                Some(p) => RightsMatrix::from_csv(open(&p)?)?,
                None => RightsMatrix::shaanxi_default()?,
            };
            let mut map = DebtorMap::from_regime(&matrix);
            if let Some(p) = debtors {
                map.merge(DebtorMap::from_csv(open(&p)?)?);
            }
            let records = build_records(&sheet, &map)?;
            let total: Money = records.iter().map(|r| r.expenditure).sum();
            if total != sheet.totals.liability_total {
                return Err(Error::Invariant(format!(
                    "record expenditures {} != liability total {}",
                    total, sheet.totals.liability_total
                )));
            }
            let mut out = String::new();
            if show_regime {
                out.push_str(&render_rights(&matrix, format)?);
                if format == Format::Text {
                    out.push('\n');
                }
            }
            out.push_str(&render_records(&records, format)?);
            Ok(out)
        }
        Command::Render { input, format } => {
            let format: Format = format.parse()?;
            render_sheet(&load_sheet_path(&input)?, format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_invariant() { 2 } else { 1 })
        }
    }
}
