//! `etaq` — batch front end for the eta-quotient library.
//!
//! Exit codes: 0 on success (and on full verification), 1 when verification
//! finds a mismatch, 2 on usage errors (bad flags, malformed exponent
//! strings, inadmissible indices, insufficient precision).

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use etaq::catalog::{
    self, enumerate_level, table, verify_entry, EnumerationConfig, VerificationReport,
};
use etaq::hecke::{
    closed_coefficient, scaled_transform_simplified, transform_general, HeckeContext,
};
use etaq::qseries::eta_quotient_expansion;
use etaq::{dimension, EtaQuotient};

#[derive(Parser)]
#[command(
    name = "etaq",
    about = "Exact q-expansions, invariants, dimensions and Hecke coefficient transforms for integral-weight eta-quotients",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct EntryArgs {
    /// Level N (positive integer)
    #[arg(long)]
    level: u64,
    /// Exponent string over the divisors of N, e.g. "1^{-4}2^{10}4^{-4}"
    #[arg(long)]
    eta: String,
}

#[derive(Subcommand)]
enum Command {
    /// Print the q-expansion of an eta-quotient
    Expand {
        #[command(flatten)]
        entry: EntryArgs,
        /// Number of coefficients to compute
        #[arg(long, default_value_t = 500)]
        prec: usize,
        /// Emit the series as a JSON object instead of lines
        #[arg(long)]
        json: bool,
    },
    /// Print every derived invariant of an eta-quotient
    Invariants {
        #[command(flatten)]
        entry: EntryArgs,
    },
    /// Evaluate the dimension formula
    Dim {
        #[command(flatten)]
        entry: EntryArgs,
    },
    /// Evaluate the closed coefficient formula at index l
    Coeff {
        #[command(flatten)]
        entry: EntryArgs,
        /// Coefficient index (must be 1 mod m_r)
        #[arg(long)]
        l: u64,
        /// Allow eta-quotients that are not catalog rows (the formula is
        /// then unproven for the input)
        #[arg(long)]
        unverified: bool,
    },
    /// Evaluate the transform coefficient l^{k/2-1}·c_{T_l f}(n)
    Hecke {
        #[command(flatten)]
        entry: EntryArgs,
        /// Transform index (must be 1 mod m_r)
        #[arg(long)]
        l: u64,
        /// Exponent n, an integer or a fraction like "3/8"
        #[arg(long)]
        n: String,
        /// Evaluate the unsimplified double sum in floating point (scaled by
        /// l^{k/2}, i.e. l times the exact value) instead of the exact form
        #[arg(long)]
        general: bool,
        /// Expansion precision backing the coefficient lookups
        #[arg(long, default_value_t = 500)]
        prec: usize,
    },
    /// Re-verify catalog rows against their expansions
    Verify {
        /// Verify all 83 rows
        #[arg(long, conflicts_with = "id")]
        all: bool,
        /// Verify a single row by its 1-based catalog position
        #[arg(long)]
        id: Option<usize>,
        /// Expansion precision (coefficients checked at indices below this)
        #[arg(long, default_value_t = 500)]
        prec: usize,
        /// Worker threads (default: all available)
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Search the exponent box at one level for quotients with the catalog's
    /// defining properties
    Enumerate {
        /// Level N
        #[arg(long)]
        level: u64,
        /// Exponent box half-width (claiming catalog reproduction needs >= 17)
        #[arg(long, default_value_t = 20)]
        bound: i64,
    },
    /// Dump the embedded catalog as tab-separated values
    Table,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn parse_entry(args: &EntryArgs) -> Result<EtaQuotient, String> {
    EtaQuotient::parse(args.level, &args.eta).map_err(|e| e.to_string())
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let parse_int = |t: &str| {
        t.parse::<BigInt>()
            .map_err(|e| format!("bad number {t:?}: {e}"))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(BigRational::new(parse_int(num)?, den))
        }
        None => Ok(BigRational::from(parse_int(s)?)),
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Expand { entry, prec, json } => {
            if prec == 0 {
                return Err("precision must be at least 1".into());
            }
            let e = parse_entry(&entry)?;
            let f = eta_quotient_expansion(&e, prec);
            if json {
                println!("{}", f.to_json());
            } else {
                let offset = f.offset().clone();
                for (j, c) in f.coeffs().iter().enumerate() {
                    let exponent = &offset + BigRational::from(BigInt::from(j as i64));
                    println!("{exponent}\t{c}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Invariants { entry } => {
            let e = parse_entry(&entry)?;
            let inv = e.derive();
            println!("level = {}", e.level());
            println!("r = {}", e.r_string());
            println!("k = {}", inv.k);
            println!("Pi = {}", inv.pi);
            println!("Pi_sf = {}", inv.pi_sf);
            println!("m_r = {}", inv.m_r);
            println!("delta = {}", inv.delta);
            println!("x_N = {}", inv.x_n);
            println!("order_at_infinity = {}", e.vanishing_order_at_infinity());
            for (c, x) in &inv.x_c {
                println!("x_c[{c}] = {x}");
            }
            println!("integral_weight = {}", e.is_integral_weight());
            println!("holomorphic = {}", e.is_holomorphic());
            println!("catalog_row = {}", catalog::is_catalog_row(&e));
            Ok(ExitCode::SUCCESS)
        }
        Command::Dim { entry } => {
            let e = parse_entry(&entry)?;
            let d = dimension::dim(&e).map_err(|e| e.to_string())?;
            println!("{d}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Coeff {
            entry,
            l,
            unverified,
        } => {
            let e = parse_entry(&entry)?;
            let ctx = if catalog::is_catalog_row(&e) {
                HeckeContext::for_catalog(&e, l)
            } else if unverified {
                HeckeContext::unverified(&e, l)
            } else {
                return Err(format!(
                    "{} (level {}) is not a catalog row; the closed formula is only \
                     established for catalog rows. Pass --unverified to evaluate it anyway.",
                    e.r_string(),
                    e.level()
                ));
            }
            .map_err(|e| e.to_string())?;
            let c = closed_coefficient(&ctx).map_err(|e| e.to_string())?;
            println!("{c}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Hecke {
            entry,
            l,
            n,
            general,
            prec,
        } => {
            let e = parse_entry(&entry)?;
            let n = parse_rational(&n)?;
            let ctx = HeckeContext::unverified(&e, l).map_err(|e| e.to_string())?;
            let f = eta_quotient_expansion(&e, prec);
            if general {
                let g = transform_general(&ctx, &n, &f).map_err(|e| e.to_string())?;
                println!("{} + {}*i", g.re, g.im);
            } else {
                let s = scaled_transform_simplified(&ctx, &n, &f).map_err(|e| e.to_string())?;
                println!("{s}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            all,
            id,
            prec,
            jobs,
        } => {
            if prec < 2 {
                return Err("verification needs precision at least 2".into());
            }
            let entries = table();
            let selected: Vec<&catalog::TableEntry> = if all {
                entries.iter().collect()
            } else if let Some(id) = id {
                if id == 0 || id > entries.len() {
                    return Err(format!("row id must be in 1..={}", entries.len()));
                }
                vec![&entries[id - 1]]
            } else {
                return Err("pass --all or --id K".into());
            };
            let reports = run_verification(&selected, prec, jobs)?;
            let mut all_ok = true;
            for r in &reports {
                print_report(r);
                all_ok &= r.verified();
            }
            let verified = reports.iter().filter(|r| r.verified()).count();
            println!(
                "verified {verified}/{} rows at precision {prec}",
                reports.len()
            );
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Enumerate { level, bound } => {
            if level == 0 {
                return Err("level must be positive".into());
            }
            if bound < 0 {
                return Err("bound must be nonnegative".into());
            }
            if matches!(level, 24 | 30 | 36) {
                eprintln!(
                    "note: output at level {level} is candidate-only; no cross-checked \
                     reference set ships for this level and the default box takes very \
                     long to search here (consider a smaller --bound)"
                );
            }
            let cfg = EnumerationConfig {
                level,
                bound,
                k_max: None,
                dimension_filter: true,
            };
            for e in enumerate_level(&cfg) {
                println!("{}", e.r_string());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Table => {
            let mut lines = vec!["N\tr\tm_r\tk\tdelta\tPi_sf".to_string()];
            for t in table() {
                lines.push(format!(
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    t.entry.level(),
                    t.entry.r_string(),
                    t.m_r,
                    t.k,
                    t.delta,
                    t.pi_sf
                ));
            }
            println!("{}", lines.join("\n"));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_verification(
    selected: &[&catalog::TableEntry],
    prec: usize,
    jobs: Option<usize>,
) -> Result<Vec<VerificationReport>, String> {
    let verify = || {
        use rayon::prelude::*;
        selected
            .par_iter()
            .map(|t| verify_entry(t, prec))
            .collect::<Vec<_>>()
    };
    match jobs {
        Some(jobs) => {
            if jobs == 0 {
                return Err("jobs must be at least 1".into());
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| e.to_string())?;
            Ok(pool.install(verify))
        }
        None => Ok(verify()),
    }
}

fn print_report(r: &VerificationReport) {
    if r.verified() {
        println!(
            "ok row {} N={} {} ({} coefficients, transform indices {:?})",
            r.index, r.level, r.r_string, r.coefficients_checked, r.eigen_indices
        );
    } else {
        println!("FAIL row {} N={} {}", r.index, r.level, r.r_string);
        for f in &r.failures {
            println!("  {f}");
        }
    }
}
