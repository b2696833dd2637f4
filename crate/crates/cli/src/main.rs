//! `kempner`: certified digits of `K0` and `K1`, plus the counting,
//! enumeration and verification tools behind them.

mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use kempner_core::counting::{count_per_length, mass_gf, MassGf};
use kempner_core::oracle::{brute_partial, count_by_enumeration, ENUMERATION_LIMIT};
use kempner_core::stieltjes::{check_functional_identity, Transform};
use kempner_core::summation::{compute, k1_statistics, KRequest, KResult, Which};
use kempner_core::{bits_for_digits, compute_moments, k1, Error, Fixed, PatternSpec, Rounding};
use serde_json::json;

use output::{group_digits, integer_array, OutputRecord};

#[derive(Parser)]
#[command(
    name = "kempner",
    version,
    about = "Harmonic sums over integers with zero or one occurrence of a two-digit string"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct PatternArgs {
    /// Base, between 2 and 36.
    #[arg(long, short, value_parser = clap::value_parser!(u32).range(2..=36))]
    base: u32,
    /// Two digits in the base's alphabet (0-9A-Z), e.g. 42 or 0F.
    #[arg(long, short)]
    pattern: String,
}

impl PatternArgs {
    fn spec(&self) -> Result<PatternSpec, Error> {
        PatternSpec::parse(self.base, &self.pattern)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sum of 1/n over n without the pattern.
    K0(KArgs),
    /// Sum of 1/n over n with exactly one occurrence of the pattern.
    K1(KArgs),
    /// Dump the moment sequences u_m and v_m as JSON.
    Moments {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long, default_value_t = 20)]
        max_m: usize,
        /// Decimal digits printed per moment.
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Admissible integers per length, from the generating functions.
    Count {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long, default_value_t = 1)]
        occurrences: u32,
        #[arg(long)]
        max_len: usize,
        /// Also enumerate directly and compare.
        #[arg(long)]
        check: bool,
    },
    /// Enumerate every admissible integer below b^max_len and enclose the sum.
    Bruteforce {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        max_len: u32,
        #[arg(long, default_value_t = 1)]
        occurrences: u32,
        #[arg(long)]
        json: bool,
    },
    /// K1 for every pattern of a base against b^2 ln b.
    Stats {
        #[arg(long, short, value_parser = clap::value_parser!(u32).range(2..=36))]
        base: u32,
        #[arg(long, default_value_t = 20)]
        digits: u32,
        /// Allow bases above 16.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run identity, counting and enclosure checks; exit 1 on any failure.
    Verify,
}

#[derive(Args)]
struct KArgs {
    #[command(flatten)]
    pattern: PatternArgs,
    /// Certified decimal digits after the point.
    #[arg(long, short, env = "KEMPNER_DIGITS", default_value_t = 50)]
    digits: u32,
    #[arg(long)]
    json: bool,
}

enum Failure {
    Usage(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verify) => ExitCode::from(1),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::K0(args) => run_k(args, Which::K0),
        Command::K1(args) => run_k(args, Which::K1),
        Command::Moments { pattern, max_m, digits } => run_moments(&pattern, max_m, digits),
        Command::Count {
            pattern,
            occurrences,
            max_len,
            check,
        } => run_count(&pattern, occurrences, max_len, check),
        Command::Bruteforce {
            pattern,
            max_len,
            occurrences,
            json,
        } => run_bruteforce(&pattern, max_len, occurrences, json),
        Command::Stats {
            base,
            digits,
            force,
            json,
        } => run_stats(base, digits, force, json),
        Command::Verify => run_verify(),
    }
}

fn record(r: &KResult, elapsed_ms: u128) -> OutputRecord {
    let p = r.request.pattern;
    OutputRecord {
        base: p.base(),
        alpha: p.alpha(),
        beta: p.beta(),
        pattern: p.to_string(),
        which: format!("{:?}", r.request.which),
        digits: r.request.target_digits,
        value: r.to_decimal(),
        error_bound: r.error_bound.to_sci_upper(3),
        m_used: r.m_used,
        precision_used: r.precision_digits,
        precision_bits: r.precision_bits,
        wall_time_ms: elapsed_ms,
    }
}

fn run_k(args: KArgs, which: Which) -> Result<(), Failure> {
    let p = args.pattern.spec()?;
    let start = Instant::now();
    let r = compute(&KRequest::new(p, which, args.digits)?)?;
    let rec = record(&r, start.elapsed().as_millis());
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rec).expect("serializable"));
    } else {
        println!(
            "{}({};\"{}\") = {}",
            rec.which,
            rec.base,
            rec.pattern,
            group_digits(&rec.value)
        );
        println!(
            "error bound {}  M={}  precision {} digits",
            rec.error_bound, rec.m_used, rec.precision_used
        );
    }
    Ok(())
}

fn run_moments(pattern: &PatternArgs, max_m: usize, digits: u32) -> Result<(), Failure> {
    let p = pattern.spec()?;
    let table = compute_moments(&p, max_m, bits_for_digits(digits + 10))?;
    let show = |xs: &[Fixed]| xs.iter().map(|x| x.to_decimal(digits)).collect::<Vec<_>>();
    let out = json!({
        "base": p.base(),
        "pattern": p.to_string(),
        "digits": digits,
        "u": show(table.u_values()),
        "v": show(table.v_values()),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    Ok(())
}

fn run_count(pattern: &PatternArgs, occurrences: u32, max_len: usize, check: bool) -> Result<(), Failure> {
    let p = pattern.spec()?;
    let leading: Vec<u32> = (1..p.base()).collect();
    let counts = count_per_length(&p, occurrences, &leading, max_len)?;
    let values: Vec<String> = counts
        .as_integers()
        .expect("counts are integers")
        .iter()
        .map(|c| c.to_string())
        .collect();
    println!("{}", integer_array(&values));
    if check {
        let seen = count_by_enumeration(&p, occurrences, max_len as u32)?;
        let seen: Vec<String> = seen.iter().map(|c| c.to_string()).collect();
        if seen != values {
            eprintln!("enumeration disagrees: {}", integer_array(&seen));
            return Err(Failure::Verify);
        }
        eprintln!("enumeration agrees");
    }
    Ok(())
}

fn run_bruteforce(pattern: &PatternArgs, max_len: u32, occurrences: u32, json: bool) -> Result<(), Failure> {
    let p = pattern.spec()?;
    let start = Instant::now();
    let s = brute_partial(&p, occurrences, max_len, 100)?;
    let digits = 15;
    let tail = Fixed::from_rational(&s.tail_mass, 100, Rounding::Nearest);
    if json {
        let out = json!({
            "base": p.base(),
            "pattern": p.to_string(),
            "occurrences": occurrences,
            "max_len": max_len,
            "terms_counted": s.terms_counted,
            "partial_sum": s.partial_sum.to_decimal(digits),
            "tail_mass": tail.to_decimal(digits),
            "lower": s.lower.to_decimal(digits),
            "upper": s.upper.to_decimal(digits),
            "heuristic": format!("{:.12}", s.heuristic_estimate()),
            "counts_per_length": s.counts_per_length,
            "wall_time_ms": start.elapsed().as_millis(),
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        println!("integers counted  {}", s.terms_counted);
        println!("partial sum       {}", s.partial_sum.to_decimal(digits));
        println!("tail mass         {}", tail.to_decimal(digits));
        println!(
            "enclosure         ({}, {})",
            s.lower.to_decimal(digits),
            s.upper.to_decimal(digits)
        );
        println!("estimate          {:.12} (heuristic)", s.heuristic_estimate());
    }
    Ok(())
}

fn run_stats(base: u32, digits: u32, force: bool, json: bool) -> Result<(), Failure> {
    if base > 16 && !force {
        return Err(Failure::Usage(format!(
            "base {base} needs --force ({} patterns)",
            base * base
        )));
    }
    let stats = k1_statistics(base, digits)?;
    if json {
        let entries: Vec<_> = stats
            .entries
            .iter()
            .map(|e| {
                json!({
                    "pattern": e.pattern.to_string(),
                    "value": e.value.to_decimal(digits),
                    "deviation": format!("{:+.6e}", e.deviation),
                })
            })
            .collect();
        let out = json!({
            "base": base,
            "digits": digits,
            "reference": stats.reference.to_decimal(digits),
            "max_deviation": stats.max_deviation,
            "max_deviation_distinct": stats.max_deviation_distinct,
            "below": stats.below.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "entries": entries,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        return Ok(());
    }
    let shown = digits.min(12);
    println!("b^2 ln b = {}", stats.reference.to_decimal(shown));
    for e in &stats.entries {
        println!(
            "{:>4}  {}  {:+.6e}",
            e.pattern.to_string(),
            e.value.to_decimal(shown),
            e.deviation
        );
    }
    println!("max |K1 - b^2 ln b|            {:.6}", stats.max_deviation);
    println!("max over distinct digits       {:.6}", stats.max_deviation_distinct);
    let below: Vec<String> = stats.below.iter().map(|p| p.to_string()).collect();
    println!("below b^2 ln b                 {}", below.join(" "));
    Ok(())
}

const K1_10_42: &str = "230.25882 13214 33508 40478 77627 59267 85873 95858 57341 57966 44057 49270 12717 79357 21101 87579 14837 04726 00875 18443";

fn run_verify() -> Result<(), Failure> {
    let mut failures = 0;
    let mut report = |name: &str, ok: bool, note: String| {
        println!("{} {name}: {note}", if ok { "PASS" } else { "FAIL" });
        failures += usize::from(!ok);
    };

    // Functional identities on n in 1..=b^2.
    for (b, s) in [(2, "10"), (2, "00"), (10, "42"), (10, "77")] {
        let p = PatternSpec::parse(b, s)?;
        let table = compute_moments(&p, 301, bits_for_digits(80))?;
        let mut bad = 0;
        let mut total = 0;
        for n in 1..=(b * b) as u64 {
            for kind in [Transform::U, Transform::V] {
                bad += usize::from(!check_functional_identity(kind, n, &table, 300)?.holds());
                total += 1;
            }
        }
        report(
            &format!("identities {b}/{s}"),
            bad == 0,
            format!("{} of {total} hold", total - bad),
        );
    }

    // Generating functions against enumeration, and Z = W_beta^2.
    for (b, s, l) in [(2, "00", 14), (3, "21", 10), (10, "42", 5)] {
        let p = PatternSpec::parse(b, s)?;
        let leading: Vec<u32> = (1..b).collect();
        let mut ok = true;
        for occ in 0..2 {
            let gf = count_per_length(&p, occ, &leading, l as usize)?.as_u64();
            ok &= gf == Some(count_by_enumeration(&p, occ, l)?);
        }
        let w = mass_gf(&p, MassGf::WLeading(p.beta()))?;
        ok &= mass_gf(&p, MassGf::Z)?.same_function(&w.mul(&w));
        report(&format!("counting {b}/{s}"), ok, format!("lengths up to {l}"));
    }

    // Brute-force enclosures.
    for (b, s, n) in [(2, "00", 20), (2, "10", 20), (10, "42", 6)] {
        let p = PatternSpec::parse(b, s)?;
        debug_assert!((b as u64).pow(n) <= ENUMERATION_LIMIT);
        let v = k1(p, 20)?.value.rescale(100, Rounding::Nearest);
        let sw = brute_partial(&p, 1, n, 100)?;
        report(
            &format!("enclosure {b}/{s} N={n}"),
            sw.contains(&v),
            format!(
                "{} < {} < {}",
                sw.lower.to_decimal(6),
                v.to_decimal(6),
                sw.upper.to_decimal(6)
            ),
        );
    }

    // Published 100-digit value.
    let r = k1(PatternSpec::parse(10, "42")?, 105)?;
    let published = Fixed::parse_decimal(K1_10_42, r.value.bits()).expect("literal");
    let gap = (&r.value - &published).abs();
    let unit = Fixed::from_ratio(
        &1.into(),
        &num_bigint::BigInt::from(10u32).pow(100),
        r.value.bits(),
        Rounding::Floor,
    );
    report(
        "K1(10;\"42\") 100 digits",
        gap <= unit,
        format!("gap {}", gap.to_sci_upper(2)),
    );

    if failures == 0 {
        Ok(())
    } else {
        eprintln!("{failures} checks failed");
        Err(Failure::Verify)
    }
}
