use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ifibf::cases::{Case, Preset};
use ifibf::experiments::{self, MethodChoice, MonteCarlo, Strategy};
use ifibf::formats::{parse_interests, parse_stream, parse_topology, read_file};
use ifibf::report::Table;
use ifibf::simulate::{self, SimulateOptions};
use ifibf_core::estimation::{CountMode, EstimatorConfig, HashBudget};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser, Debug)]
#[command(name = "ifibf", version, about = "Iterated Bloom filter FIB experiments")]
struct Cli {
    /// Memory preset: I (2^17 bits), II (2^32) or III (2^38), all at p = 0.5.
    #[arg(long, global = true, default_value = "I")]
    case: Preset,
    /// Explicit memory in bits; overrides --case.
    #[arg(long, global = true)]
    m: Option<u64>,
    /// Position width in bits for an explicit memory.
    #[arg(long, global = true, requires = "m")]
    b: Option<u32>,
    /// Fraction of zero bits at design load for an explicit memory.
    #[arg(long, global = true, default_value_t = 0.5)]
    p: f64,
    /// Write CSV here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Add empirical rates with 95% intervals (table3, fpr).
    #[arg(long, global = true)]
    monte_carlo: bool,
    /// Negative queries per Monte-Carlo estimate.
    #[arg(long, global = true, default_value_t = 100_000)]
    trials: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a standard design into levels and apply repetitions.
    Design(DesignArgs),
    /// False-positive rates under the three repetition examples.
    Table3 {
        #[arg(long, default_value_t = 4)]
        k: u32,
    },
    /// Name size per scheme against a four-level plain-text name.
    NamingBits(Sweep),
    /// Elements admitted per scheme.
    Capacity(Sweep),
    /// False-positive rate per scheme at design load.
    Fpr(Sweep),
    /// Capacity per table when memory is shared by several tables.
    MultiFib {
        #[arg(long, default_value_t = 10)]
        fibs: u32,
        /// Emit the single-table memory series for f in {0.0625, 0.1, 0.01} instead.
        #[arg(long)]
        fpr_series: bool,
    },
    /// Estimate per-level element counts from a request stream.
    Estimate(EstimateArgs),
    /// Route Interests over a topology file.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct Sweep {
    /// Largest per-level hash count in the sweep.
    #[arg(long, default_value_t = 10)]
    k_max: u32,
}

#[derive(Args, Debug)]
struct DesignArgs {
    /// Hashes in total across levels.
    #[arg(long, default_value_t = 4)]
    k: u32,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Repetition fraction per level (one value applies to all).
    #[arg(long, value_delimiter = ',')]
    repetition: Vec<f64>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Keep)]
    strategy: StrategyArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum StrategyArg {
    Keep,
    Shrink,
    Rehash,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    #[value(name = "I")]
    One,
    #[value(name = "II")]
    Two,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CountArg {
    Distinct,
    Volume,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// One name per line, blank lines between epochs.
    #[arg(long)]
    stream: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    method: MethodArg,
    /// Normal quantile added as a safety margin.
    #[arg(long, default_value_t = 1.96)]
    z: f64,
    /// Fold fields beyond this depth into the last level.
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, value_enum, default_value_t = CountArg::Distinct)]
    count: CountArg,
    #[arg(long, default_value_t = 1e6)]
    prior_var: f64,
    #[arg(long, default_value_t = 1.0)]
    variance_floor: f64,
    /// Also write filter dimensions for the estimates here.
    #[arg(long)]
    design: Option<PathBuf>,
    /// Hashes per level for --design.
    #[arg(long, default_value_t = 1, conflicts_with = "target_f")]
    k: u32,
    /// Pick the fewest hashes reaching this per-level rate instead of --k.
    #[arg(long)]
    target_f: Option<f64>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    topology: PathBuf,
    /// `source name` per line.
    #[arg(long)]
    interests: Option<PathBuf>,
    /// Generate this many Interests from --seed.
    #[arg(long, conflicts_with = "interests")]
    random_interests: Option<usize>,
    /// Share of generated Interests for unregistered names.
    #[arg(long, default_value_t = 0.0)]
    foreign: f64,
    /// Exact prefix sets instead of filters.
    #[arg(long)]
    oracle: bool,
    /// Charge plain-text names on links.
    #[arg(long)]
    hierarchical: bool,
    /// Send copies to every tied interface.
    #[arg(long)]
    multicast: bool,
    #[arg(long)]
    hop_limit: Option<usize>,
    /// Write one row per Interest here.
    #[arg(long)]
    per_interest: Option<PathBuf>,
    /// Write bits per directed link here.
    #[arg(long)]
    links: Option<PathBuf>,
}

fn write_table(table: &Table, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(f);
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        None => table.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let case = match cli.m {
        Some(m) => Case::custom(m, cli.b, cli.p)?,
        None => Case::preset(cli.case),
    };
    let mc = cli.monte_carlo.then(|| MonteCarlo::new(cli.trials, cli.seed));
    if mc.is_some() && !matches!(cli.command, Command::Table3 { .. } | Command::Fpr(_)) {
        eprintln!("note: --monte-carlo only applies to table3 and fpr");
    }
    let table = match &cli.command {
        Command::Design(a) => {
            let strategy = match a.strategy {
                StrategyArg::Keep => Strategy::Keep,
                StrategyArg::Shrink => Strategy::Shrink,
                StrategyArg::Rehash => Strategy::Rehash,
            };
            experiments::design_table(&case, a.k, a.levels, &a.repetition, strategy)?
        }
        Command::Table3 { k } => experiments::table3(&case, *k, mc.as_ref())?,
        Command::NamingBits(s) => experiments::naming_bits_table(&case, s.k_max),
        Command::Capacity(s) => experiments::capacity_table(&case, s.k_max)?,
        Command::Fpr(s) => experiments::fpr_table(&case, s.k_max, mc.as_ref())?,
        Command::MultiFib { fibs, fpr_series } => {
            if *fpr_series {
                experiments::fpr_series_table(&case)
            } else {
                experiments::multi_fib_table(&case, *fibs)?
            }
        }
        Command::Estimate(a) => {
            let epochs = parse_stream(&read_file(&a.stream)?).with_context(|| a.stream.display().to_string())?;
            let config = EstimatorConfig {
                prior_var: a.prior_var,
                variance_floor: a.variance_floor,
                count_mode: match a.count {
                    CountArg::Distinct => CountMode::Distinct,
                    CountArg::Volume => CountMode::Volume,
                },
                ..EstimatorConfig::default()
            };
            let methods = match a.method {
                MethodArg::One => MethodChoice::WholeName,
                MethodArg::Two => MethodChoice::PerField,
                MethodArg::Both => MethodChoice::Both,
            };
            let levels = experiments::estimate(&epochs, methods, a.z, config, a.max_depth)?;
            if let Some(path) = &a.design {
                let budget = a.target_f.map_or(HashBudget::Fixed(a.k), HashBudget::TargetFpr);
                write_table(&experiments::sizing_table(&levels, case.p, budget)?, Some(path))?;
            }
            experiments::estimate_table(&levels)
        }
        Command::Simulate(a) => {
            let file = parse_topology(&read_file(&a.topology)?).with_context(|| a.topology.display().to_string())?;
            let interests = match (&a.interests, a.random_interests) {
                (Some(p), _) => parse_interests(&read_file(p)?, &file.topology).with_context(|| p.display().to_string())?,
                (None, Some(n)) => {
                    if !(0.0..=1.0).contains(&a.foreign) {
                        bail!("--foreign must lie in [0, 1]");
                    }
                    simulate::random_interests(&file, n, a.foreign, &mut ChaCha8Rng::seed_from_u64(cli.seed))
                }
                (None, None) => bail!("give --interests or --random-interests"),
            };
            let opts = SimulateOptions {
                oracle: a.oracle,
                hierarchical: a.hierarchical,
                multicast: a.multicast,
                hop_limit: a.hop_limit,
            };
            let report = simulate::run(&file, &interests, &opts)?;
            if let Some(p) = &a.per_interest {
                write_table(&simulate::interest_table(&file, &interests, &report), Some(p))?;
            }
            if let Some(p) = &a.links {
                write_table(&simulate::link_table(&file, &report), Some(p))?;
            }
            simulate::summary_table(&report)
        }
    };
    write_table(&table, cli.output.as_deref())
}
