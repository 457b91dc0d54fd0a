//! `qshuffle` — batch verification of the shuffling-model identities.
//!
//! Exit codes: 0 when every requested check holds, 1 on an identity mismatch
//! or statistical rejection, 2 on usage errors. Reports go to stdout (JSON by
//! default), diagnostics to stderr.

use std::fmt::Write as _;
use std::num::NonZeroUsize;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qshuffle::{
    check_euler_induction, check_pnt, check_prob_induction, estimate_event,
    estimate_event_with_workers, eval_euler_function, DistributionTable, IdentityReport,
    McConfig, NumericQ, Pattern,
};

#[derive(Parser)]
#[command(name = "qshuffle", version, about = "Exact and statistical checks of the insertion-shuffling model behind the pentagonal number theorem")]
struct Cli {
    /// Output format for reports on stdout
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the Euler product with the pentagonal sum modulo q^T
    CheckPnt {
        /// Truncation order T
        #[arg(long = "T", default_value_t = 500)]
        order: usize,
    },
    /// Verify the probabilistic recursion for every depth N = 0..=N_max
    CheckInduction {
        #[arg(long = "N-max", default_value_t = 10)]
        n_max: usize,
        #[arg(long = "T", default_value_t = 200)]
        order: usize,
    },
    /// Verify the q-series recursion and its agreement with the
    /// event-probability route for every depth N = 0..=N_max
    CheckEuler {
        #[arg(long = "N-max", default_value_t = 10)]
        n_max: usize,
        #[arg(long = "T", default_value_t = 200)]
        order: usize,
    },
    /// Dump the exact distribution of the time-K model, optionally
    /// restricted to a pattern
    Enumerate {
        /// Horizon K; the table has (K+1)! rows
        #[arg(long = "K")]
        horizon: usize,
        /// Truncation order (default: K(K+1)/2 + 1, the smallest exact one)
        #[arg(long = "T")]
        order: Option<usize>,
        /// Enumeration cap override; the default refuses K > 8
        #[arg(long)]
        cap: Option<usize>,
        #[command(flatten)]
        pattern: PatternArgs,
    },
    /// Re-derive every pattern probability from full enumeration and compare
    /// with the product formula, for horizons 1..=K and all 3^K mark choices
    OracleSweep {
        #[arg(long = "K", default_value_t = 5)]
        horizon: usize,
    },
    /// Estimate a pattern probability by simulating the process at a
    /// numeric q, and compare with the exact product when it is computable
    Simulate {
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long = "K", default_value_t = 50)]
        horizon: usize,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Worker threads (default: all cores); the estimate is identical
        /// for every choice
        #[arg(long)]
        workers: Option<NonZeroUsize>,
        #[command(flatten)]
        pattern: PatternArgs,
    },
    /// Evaluate floor(1 / (tanh 1; tanh 1)_inf)
    EasterEgg,
}

#[derive(Args)]
struct PatternArgs {
    /// Leftmost times, comma separated (e.g. --I 2,5)
    #[arg(long = "I", value_delimiter = ',')]
    leftmost: Vec<usize>,
    /// Anti-leftmost times, comma separated (e.g. --J 1,3)
    #[arg(long = "J", value_delimiter = ',')]
    anti_leftmost: Vec<usize>,
    /// Extend J by every remaining time up to the horizon
    #[arg(long = "J-inf")]
    j_to_horizon: bool,
}

impl PatternArgs {
    fn build(&self) -> Result<Pattern, String> {
        Pattern::new(
            self.leftmost.iter().copied(),
            self.anti_leftmost.iter().copied(),
            self.j_to_horizon,
        )
        .map_err(|e| e.to_string())
    }

    fn is_free(&self) -> bool {
        self.leftmost.is_empty() && self.anti_leftmost.is_empty() && !self.j_to_horizon
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("qshuffle: {message}");
            ExitCode::from(2)
        }
    }
}

/// Runs one command; `Ok(true)` means every check held.
fn run(cli: &Cli) -> Result<bool, String> {
    match &cli.command {
        Command::CheckPnt { order } => {
            require_positive(*order, "--T")?;
            let report = check_pnt(*order);
            print_reports(cli.format, std::slice::from_ref(&report));
            Ok(report.holds)
        }
        Command::CheckInduction { n_max, order } => {
            require_positive(*order, "--T")?;
            let reports = check_prob_induction(*n_max, *order);
            print_reports(cli.format, &reports);
            Ok(reports.iter().all(|r| r.holds))
        }
        Command::CheckEuler { n_max, order } => {
            require_positive(*order, "--T")?;
            let reports = check_euler_induction(*n_max, *order);
            print_reports(cli.format, &reports);
            Ok(reports.iter().all(|r| r.holds))
        }
        Command::Enumerate {
            horizon,
            order,
            cap,
            pattern,
        } => {
            require_positive(*horizon, "--K")?;
            let order = order.unwrap_or(horizon * (horizon + 1) / 2 + 1);
            let table = match cap {
                Some(cap) => DistributionTable::enumerate_with_cap(*horizon, order, *cap),
                None => DistributionTable::enumerate(*horizon, order),
            }
            .map_err(|e| e.to_string())?;
            let restriction = pattern.build()?;
            restriction
                .require_within(*horizon)
                .map_err(|e| e.to_string())?;
            print_table(cli.format, &table, &restriction, pattern.is_free());
            Ok(true)
        }
        Command::OracleSweep { horizon } => {
            require_positive(*horizon, "--K")?;
            let summaries = oracle_sweep(*horizon)?;
            print_sweep(cli.format, &summaries);
            Ok(summaries.iter().all(|s| s.holds))
        }
        Command::Simulate {
            q,
            horizon,
            trials,
            seed,
            workers,
            pattern,
        } => {
            let q = NumericQ::new(*q).map_err(|e| e.to_string())?;
            let cfg = McConfig::new(q, *horizon, *trials, *seed).map_err(|e| e.to_string())?;
            let pattern = pattern.build()?;
            let estimate = match workers {
                Some(workers) => estimate_event_with_workers(&cfg, &pattern, *workers),
                None => estimate_event(&cfg, &pattern),
            }
            .map_err(|e| e.to_string())?;
            let exact = pattern.numeric_probability(*horizon, q);
            let z_score = (estimate.stderr > 0.0)
                .then(|| (estimate.p_hat - exact) / estimate.stderr);
            let outcome = SimulationOutcome {
                p_hat: estimate.p_hat,
                stderr: estimate.stderr,
                exact: Some(exact),
                z_score,
            };
            print_simulation(cli.format, &outcome);
            // statistical rejection: more than 4 standard errors off, or an
            // exact mismatch when the estimator has no variance at all
            let rejected = match z_score {
                Some(z) => z.abs() > 4.0,
                None => estimate.p_hat != exact,
            };
            Ok(!rejected)
        }
        Command::EasterEgg => {
            let q = NumericQ::new(1f64.tanh()).expect("tanh 1 is in (0,1)");
            let eval = eval_euler_function(q, 1e-13);
            let outcome = EasterEgg {
                floor: (1.0 / eval.value).floor() as u64,
                inverse: 1.0 / eval.value,
                product: eval.value,
                log_tail_bound: eval.log_tail_bound,
            };
            print_easter_egg(cli.format, &outcome);
            Ok(true)
        }
    }
}

fn require_positive(value: usize, flag: &str) -> Result<(), String> {
    if value == 0 {
        Err(format!("{flag} must be a positive integer"))
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// oracle sweep
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SweepSummary {
    #[serde(rename = "K")]
    horizon: usize,
    patterns: usize,
    mismatches: usize,
    holds: bool,
    runtime_ms: u64,
}

/// For each horizon up to `max_horizon`, compares the enumeration-summed
/// probability of every 3^K mark assignment with the product formula.
fn oracle_sweep(max_horizon: usize) -> Result<Vec<SweepSummary>, String> {
    (1..=max_horizon)
        .map(|horizon| {
            let started = Instant::now();
            let order = horizon * (horizon + 1) / 2 + 1;
            let table =
                DistributionTable::enumerate(horizon, order).map_err(|e| e.to_string())?;
            let mut patterns = 0usize;
            let mut mismatches = 0usize;
            for code in 0..3usize.pow(horizon as u32) {
                let mut digits = code;
                let mut leftmost = Vec::new();
                let mut anti_leftmost = Vec::new();
                for time in 1..=horizon {
                    match digits % 3 {
                        1 => leftmost.push(time),
                        2 => anti_leftmost.push(time),
                        _ => {}
                    }
                    digits /= 3;
                }
                let pattern = Pattern::new(leftmost, anti_leftmost, false)
                    .expect("marks yield disjoint sets");
                patterns += 1;
                let summed = table.event_probability(&pattern).map_err(|e| e.to_string())?;
                if summed != pattern.event_probability(horizon, order) {
                    mismatches += 1;
                }
            }
            Ok(SweepSummary {
                horizon,
                patterns,
                mismatches,
                holds: mismatches == 0,
                runtime_ms: started.elapsed().as_millis() as u64,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// output
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SimulationOutcome {
    p_hat: f64,
    stderr: f64,
    exact: Option<f64>,
    z_score: Option<f64>,
}

#[derive(Serialize)]
struct EasterEgg {
    floor: u64,
    inverse: f64,
    product: f64,
    log_tail_bound: f64,
}

fn print_reports(format: Format, reports: &[IdentityReport]) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(reports).expect("serializable")),
        Format::Text => {
            for report in reports {
                println!("{report}");
            }
        }
        Format::Csv => {
            println!("name,N,T,holds,runtime_ms");
            for report in reports {
                let depth = report.depth.map_or(String::new(), |d| d.to_string());
                println!(
                    "{},{},{},{},{}",
                    report.name,
                    depth,
                    report.order,
                    report.holds,
                    report.runtime.as_millis()
                );
            }
        }
    }
}

fn print_table(format: Format, table: &DistributionTable, restriction: &Pattern, free: bool) {
    let rows: Vec<_> = table
        .rows()
        .filter(|(shuffle, _)| free || restriction.contains(shuffle))
        .collect();
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                shuffle: String,
                probability: &'a qshuffle::TruncatedSeries,
            }
            let rows: Vec<Row> = rows
                .into_iter()
                .map(|(shuffle, probability)| Row {
                    shuffle: shuffle.to_string(),
                    probability,
                })
                .collect();
            println!("{}", serde_json::to_string(&rows).expect("serializable"));
        }
        Format::Csv => {
            println!("shuffle,probability");
            for (shuffle, probability) in rows {
                println!("\"{shuffle}\",{probability}");
            }
        }
        Format::Text => {
            let width = rows
                .iter()
                .map(|(s, _)| s.to_string().len())
                .max()
                .unwrap_or(0);
            for (shuffle, probability) in rows {
                let mut line = String::new();
                let _ = write!(line, "{:<width$}  {probability}", shuffle.to_string());
                println!("{line}");
            }
        }
    }
}

fn print_sweep(format: Format, summaries: &[SweepSummary]) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(summaries).expect("serializable")),
        Format::Csv => {
            println!("K,patterns,mismatches,holds,runtime_ms");
            for s in summaries {
                println!(
                    "{},{},{},{},{}",
                    s.horizon, s.patterns, s.mismatches, s.holds, s.runtime_ms
                );
            }
        }
        Format::Text => {
            for s in summaries {
                let verdict = if s.holds { "holds" } else { "FAILS" };
                println!(
                    "K={}: {} patterns, {} mismatches, {verdict} ({} ms)",
                    s.horizon, s.patterns, s.mismatches, s.runtime_ms
                );
            }
        }
    }
}

fn print_simulation(format: Format, outcome: &SimulationOutcome) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(outcome).expect("serializable")),
        Format::Csv => {
            println!("p_hat,stderr,exact,z_score");
            println!(
                "{},{},{},{}",
                outcome.p_hat,
                outcome.stderr,
                outcome.exact.map_or(String::new(), |v| v.to_string()),
                outcome.z_score.map_or(String::new(), |v| v.to_string())
            );
        }
        Format::Text => {
            println!("p_hat  = {}", outcome.p_hat);
            println!("stderr = {}", outcome.stderr);
            if let Some(exact) = outcome.exact {
                println!("exact  = {exact}");
            }
            if let Some(z) = outcome.z_score {
                println!("z      = {z}");
            }
        }
    }
}

fn print_easter_egg(format: Format, outcome: &EasterEgg) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(outcome).expect("serializable")),
        Format::Csv => {
            println!("floor,inverse,product,log_tail_bound");
            println!(
                "{},{},{},{}",
                outcome.floor, outcome.inverse, outcome.product, outcome.log_tail_bound
            );
        }
        Format::Text => {
            println!(
                "{} ((tanh 1; tanh 1)_inf^-1 = {}, tail bound {:.3e})",
                outcome.floor, outcome.inverse, outcome.log_tail_bound
            );
        }
    }
}
