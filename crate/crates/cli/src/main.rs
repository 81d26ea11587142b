mod output;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use markoff_core::factor::is_prime;
use markoff_core::oracle::{self, MAX_GRAPH_PRIME};
use markoff_core::{primes_between, run_prime, Config, MiddleGameConfig, Variant, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use output::{Format, Meta, Row, Sink};

const OK: u8 = 0;
const USAGE: u8 = 1;
const INCONCLUSIVE: u8 = 2;
const MISMATCH: u8 = 3;

/// Certify connectivity of the Markoff graph modulo primes.
#[derive(Parser, Debug)]
#[command(name = "markoff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the sieve on a single prime.
    Check {
        p: u64,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run the sieve on every prime in [LO, HI).
    Range {
        lo: u64,
        hi: u64,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run the sieve on N distinct primes drawn uniformly from [LO, HI).
    Sample {
        n: usize,
        lo: u64,
        hi: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Cross-check the sieve against brute-force enumeration.
    Oracle { p: u64 },
}

#[derive(Args, Debug)]
struct RunOpts {
    /// Most triples inspected per orbit.
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    /// Walk every orbit to the end.
    #[arg(long, conflicts_with = "cap")]
    no_cap: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value = "maximal")]
    variant: Variant,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report elapsed_ms as 0 so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// For primes within brute-force reach, also run the graph oracle and
    /// accept an inconclusive sieve verdict when the graph is connected.
    #[arg(long)]
    oracle: bool,
}

impl RunOpts {
    fn config(&self) -> Config {
        Config {
            cap: if self.no_cap { None } else { Some(self.cap) },
            middle: MiddleGameConfig {
                variant: self.variant,
                ..MiddleGameConfig::default()
            },
            ..Config::default()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { p, opts } => {
            if !is_prime(p) || p <= 3 {
                eprintln!("error: {p} is not a prime greater than 3");
                USAGE
            } else {
                run(&[p], &opts, None)
            }
        }
        Command::Range { lo, hi, opts } => {
            if lo >= hi {
                eprintln!("error: empty interval [{lo}, {hi})");
                USAGE
            } else {
                let primes: Vec<u64> = primes_between(lo.max(5), hi);
                run(&primes, &opts, None)
            }
        }
        Command::Sample { n, lo, hi, seed, opts } => match sample(n, lo, hi, seed) {
            Ok(primes) => run(&primes, &opts, Some(seed)),
            Err(e) => {
                eprintln!("error: {e}");
                USAGE
            }
        },
        Command::Oracle { p } => cmd_oracle(p),
    };
    ExitCode::from(code)
}

/// `n` distinct primes from `[lo, hi)` by rejection sampling, ascending.
fn sample(n: usize, lo: u64, hi: u64, seed: u64) -> Result<Vec<u64>, String> {
    let lo = lo.max(5);
    if n == 0 || lo >= hi {
        return Err("need n >= 1 and a non-empty interval".into());
    }
    // count exactly when cheap, otherwise trust the prime number theorem
    let available = if hi - lo <= 50_000_000 {
        primes_between(lo, hi).len()
    } else {
        ((hi - lo) as f64 / (2.0 * (hi as f64).ln())) as usize
    };
    if available < n {
        return Err(format!("[{lo}, {hi}) holds fewer than {n} primes"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = BTreeSet::new();
    while chosen.len() < n {
        let x = rng.gen_range(lo..hi);
        if is_prime(x) {
            chosen.insert(x);
        }
    }
    Ok(chosen.into_iter().collect())
}

fn run(primes: &[u64], opts: &RunOpts, seed: Option<u64>) -> u8 {
    let config = opts.config();
    let meta = Meta {
        tool: "markoff",
        version: env!("CARGO_PKG_VERSION"),
        variant: opts.variant.name(),
        cap: config.cap,
        seed,
    };
    let mut sink = match Sink::open(opts.out.as_deref(), opts.format, &meta) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot open output: {e}");
            return USAGE;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return USAGE;
        }
    };

    let mut all_ok = true;
    // Each chunk is computed in parallel and written in order, so rows
    // come out ascending no matter which worker finishes first.
    let chunk = 4 * pool.current_num_threads().max(1);
    for batch in primes.chunks(chunk) {
        let rows: Vec<Result<Row, String>> = pool.install(|| {
            batch
                .par_iter()
                .map(|&p| {
                    let report = run_prime(p, config).map_err(|e| format!("p = {p}: {e}"))?;
                    let mut row = Row::new(&report, !opts.no_timing);
                    if opts.oracle && p <= MAX_GRAPH_PRIME {
                        let single = oracle::connected_components(p)
                            .map_err(|e| format!("p = {p}: {e}"))?
                            .len()
                            == 1;
                        row.oracle = Some(if single { "connected" } else { "disconnected" });
                    }
                    Ok(row)
                })
                .collect()
        });
        for row in rows {
            let row = match row {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return USAGE;
                }
            };
            all_ok &= row.verdict == Verdict::Connected.as_str() || row.oracle == Some("connected");
            if let Err(e) = sink.write(&row) {
                eprintln!("error: write failed: {e}");
                return USAGE;
            }
        }
    }
    if let Err(e) = sink.finish() {
        eprintln!("error: write failed: {e}");
        return USAGE;
    }
    if all_ok {
        OK
    } else {
        INCONCLUSIVE
    }
}

fn cmd_oracle(p: u64) -> u8 {
    let check = match oracle::cross_check(p) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return USAGE;
        }
    };
    println!("p = {p}");
    println!("vertices = {}", check.vertices);
    println!("components = {}", check.components.len());
    println!("checks = {}", check.checks.join(", "));
    if check.passed() {
        println!("result = pass");
        OK
    } else {
        println!("result = FAIL");
        for f in &check.failures {
            println!("  {f}");
        }
        MISMATCH
    }
}
