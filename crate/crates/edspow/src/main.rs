use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use edspow::arith::PrimeTable;
use edspow::config::{JobConfig, OutputFormat};
use edspow::eds::{EdsSequence, PowerSet};
use edspow::solver::{self, SolveOptions};
use edspow::{verify, Error};

const EXIT_CONFIG: u8 = 1;
const EXIT_VERIFICATION: u8 = 2;
const EXIT_TRUNCATED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "edspow",
    about = "Elliptic divisibility sequences and perfect-power products over \
             arithmetic progressions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to the JSON job configuration.
    #[arg(long)]
    config: PathBuf,
    /// Term cache file (JSON, index -> decimal B_n); loaded if present.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Output format (overrides the config).
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "text" => Ok(OutputFormat::Text),
        "jsonl" => Ok(OutputFormat::Jsonl),
        other => Err(format!("unknown format {other:?} (expected text or jsonl)")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the terms B_1..B_max_n of the configured sequence.
    Gen {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        max_n: u64,
    },
    /// Scan for indices whose term is an exact l-th power.
    Powers {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        ell: Option<u32>,
        #[arg(long, default_value_t = 20)]
        max_n: u64,
    },
    /// Enumerate all solutions of B_m...B_{m+(k-1)d} = y^l in the certified box.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        ell: Option<u32>,
        /// Explicit power-set indices, e.g. "1,2,3,4,7,12" (overrides config).
        #[arg(long)]
        power_set: Option<String>,
        /// Treat the explicit power set as the complete set of l-th-power indices.
        #[arg(long)]
        assume_complete: bool,
        /// Candidate budget for the k > 48 fallback regime.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Run the divisibility-identity property suite.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 60)]
        max_n: u64,
        #[arg(long, default_value_t = 50)]
        max_p: u64,
        /// Upper end of the Rosser–Schoenfeld check range.
        #[arg(long, default_value_t = 100_000)]
        rs_max: u64,
    },
}

fn load(common: &Common) -> edspow::Result<(JobConfig, EdsSequence)> {
    let config = JobConfig::load(&common.config)?;
    let seq = config.build_sequence()?;
    if let Some(cache) = &common.cache {
        if cache.exists() {
            seq.load_cache(cache)?;
        }
    }
    Ok((config, seq))
}

fn run() -> edspow::Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen { common, max_n } => {
            let (config, seq) = load(&common)?;
            let format = common.format.unwrap_or(config.format);
            for n in 1..=max_n {
                let b = seq.term_b(n)?;
                match format {
                    OutputFormat::Text => println!("B_{n} = {b}"),
                    OutputFormat::Jsonl => {
                        println!("{}", serde_json::json!({"n": n, "b": b.to_string()}))
                    }
                }
            }
            if seq.is_normalized() {
                eprintln!("note: B_1 != 1 for this point; terms shown are B_n / B_1");
            }
            if let Some(cache) = &common.cache {
                seq.save_cache(cache)?;
            }
            Ok(0)
        }
        Command::Powers { common, ell, max_n } => {
            let (config, seq) = load(&common)?;
            let ell = ell.unwrap_or(config.ell);
            let set = seq.scan_powers(ell, max_n)?;
            let format = common.format.unwrap_or(config.format);
            match format {
                OutputFormat::Text => {
                    let indices: Vec<String> =
                        set.indices.iter().map(|n| n.to_string()).collect();
                    println!(
                        "P_{ell}(B) up to {max_n}: {{{}}} (N = {}, M = {})",
                        indices.join(", "),
                        set.n_ell(),
                        set.m_ell()
                    );
                }
                OutputFormat::Jsonl => println!("{}", serde_json::to_string(&set)?),
            }
            Ok(0)
        }
        Command::Solve { common, ell, power_set, assume_complete, budget } => {
            let (config, seq) = load(&common)?;
            let ell = ell.unwrap_or(config.ell);
            let set = match power_set {
                Some(spec) => {
                    let indices = parse_index_list(&spec)?;
                    let set = PowerSet::asserted(&seq, ell, &indices)?;
                    if assume_complete {
                        set
                    } else {
                        let max = set.m_ell();
                        PowerSet {
                            provenance: edspow::eds::Provenance::ScannedUpTo(max),
                            ..set
                        }
                    }
                }
                None => config.build_power_set(&seq, ell)?,
            };
            let table = PrimeTable::new(config.sieve_limit());
            let options = SolveOptions {
                horizon: config.horizon.unwrap_or(edspow::bounds::DEFAULT_HORIZON),
                fallback_budget: budget
                    .or(config.budget)
                    .unwrap_or_else(|| SolveOptions::default().fallback_budget),
                ..Default::default()
            };
            let report = solver::solve(&seq, &table, &set, &options)?;
            let format = common.format.unwrap_or(config.format);
            match format {
                OutputFormat::Jsonl => {
                    for s in &report.solutions {
                        println!("{}", s.json());
                    }
                    println!(
                        "{}",
                        serde_json::json!({
                            "report": {
                                "certificate": report.certificate,
                                "completeness": report.completeness,
                                "conditional": report.conditional,
                                "stats": report.stats,
                            }
                        })
                    );
                }
                OutputFormat::Text => {
                    println!("{:>6} {:>6} {:>6}  y", "m", "d", "k");
                    for s in &report.solutions {
                        println!("{:>6} {:>6} {:>6}  {}", s.m, s.d, s.k, s.y);
                    }
                    println!(
                        "{} solution(s); k_max = {}, completeness = {:?}{}",
                        report.solutions.len(),
                        report.certificate.k_max,
                        report.completeness,
                        if report.conditional {
                            " (conditional: power set not asserted complete)"
                        } else {
                            ""
                        }
                    );
                }
            }
            Ok(if report.is_truncated() { EXIT_TRUNCATED } else { 0 })
        }
        Command::Verify { common, max_n, max_p, rs_max } => {
            let (config, seq) = load(&common)?;
            let table = PrimeTable::new(config.sieve_limit().max(rs_max));
            let report = verify::run_suite(&seq, &table, max_n, max_p, rs_max)?;
            let format = common.format.unwrap_or(config.format);
            match format {
                OutputFormat::Jsonl => println!("{}", report.json()),
                OutputFormat::Text => {
                    for outcome in &report.outcomes {
                        let status = if outcome.violations.is_empty() { "ok" } else { "FAIL" };
                        println!("[{status}] {} ({} checks)", outcome.name, outcome.checks);
                        for v in &outcome.violations {
                            println!("       {v}");
                        }
                    }
                    for w in &report.warnings {
                        println!("note: {w}");
                    }
                    println!(
                        "{} checks, {}",
                        report.total_checks(),
                        if report.passed() { "all passed" } else { "VIOLATIONS FOUND" }
                    );
                }
            }
            Ok(if report.passed() { 0 } else { EXIT_VERIFICATION })
        }
    }
}

fn parse_index_list(spec: &str) -> edspow::Result<Vec<u64>> {
    spec.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("bad power-set index {part:?}")))
        })
        .collect()
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
