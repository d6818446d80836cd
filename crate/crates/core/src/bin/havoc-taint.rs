use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use havoc_taint::analysis::{
    build_seed_pool, experiment_influenced_bytes, experiment_splicing, experiment_stack_distance,
    experiment_start_positions, mann_whitney_u, Alternative, Histogram,
};
use havoc_taint::distance::DistanceReport;
use havoc_taint::fuzzer::{run_campaign, CampaignConfig, Mode, StatsSummary};
use havoc_taint::mutation::StackPolicy;
use havoc_taint::rng::{derive_seed, random_bytes};
use havoc_taint::target::target_by_name;
use havoc_taint::{Error, Result};

const SEED_STREAM: u64 = 0x5eed;

#[derive(Parser)]
#[command(name = "havoc-taint", version, about = "Havoc mutation and taint inference experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "sparse_hot")]
    target: String,
}

#[derive(Args)]
struct SeedSource {
    /// Read the seed from a file.
    #[arg(long, conflicts_with = "seed_len")]
    seed_file: Option<PathBuf>,
    /// Use this many pseudo-random bytes derived from the rng seed.
    #[arg(long)]
    seed_len: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Vanilla,
    Ztaint,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    /// Execution count at full coverage; runs that never got there rank last.
    TimeToFull,
    Edges,
}

#[derive(Clone, Copy, ValueEnum)]
enum AltArg {
    TwoSided,
    Less,
    Greater,
}

#[derive(Subcommand)]
enum Command {
    /// Run a fuzzing campaign and write its stats CSV.
    Fuzz {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "ztaint")]
        mode: ModeArg,
        #[arg(long, default_value_t = 100_000)]
        max_executions: u64,
        #[arg(long, default_value_t = CampaignConfig::DEFAULT_MUTANTS_PER_SEED)]
        mutants_per_seed: usize,
        #[arg(long, default_value_t = 0.5)]
        sampling_fraction: f64,
        #[arg(long)]
        beta: Option<f64>,
        /// `afl` or `aflpp`.
        #[arg(long, default_value = "aflpp")]
        stack_policy: String,
        #[arg(long)]
        no_splicing: bool,
        /// Write the final corpus here.
        #[arg(long)]
        corpus_dir: Option<PathBuf>,
        /// Initial seed files; the target's default seed when empty.
        seeds: Vec<PathBuf>,
    },
    /// Histogram of unit-mutation start positions.
    SampleStart {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        seed: SeedSource,
        #[arg(long, default_value_t = 100_000)]
        iterations: usize,
        /// Independent runs summed into one histogram.
        #[arg(long, default_value_t = 10)]
        runs: u64,
    },
    /// Histogram of bytes changed by path-preserving mutants.
    SampleInfluence {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        seed: SeedSource,
        #[arg(long, default_value_t = 100_000)]
        iterations: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 10)]
        runs: u64,
    },
    /// Mean distances per fixed stack size.
    StackDistance {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        seed: SeedSource,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
        stacks: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        iterations: usize,
    },
    /// Distances with and without splicing.
    SpliceDistance {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        seed: SeedSource,
        /// Use these files as the corpus instead of growing a pool.
        #[arg(long, num_args = 1..)]
        corpus: Vec<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        pool_size: usize,
        #[arg(long, default_value_t = 10_000)]
        iterations: usize,
    },
    /// Mann-Whitney U over two sets of stats CSV files.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, num_args = 1.., required = true)]
        a: Vec<PathBuf>,
        #[arg(long, num_args = 1.., required = true)]
        b: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "time-to-full")]
        metric: Metric,
        #[arg(long, value_enum, default_value = "two-sided")]
        alternative: AltArg,
    },
}

fn seed_bytes(src: &SeedSource, common: &Common) -> Result<Vec<u8>> {
    let bytes = match (&src.seed_file, src.seed_len) {
        (Some(path), _) => fs::read(path)?,
        (None, Some(len)) => random_bytes(len, derive_seed(common.rng_seed, SEED_STREAM)),
        (None, None) => target_by_name(&common.target)?.default_seed().to_vec(),
    };
    if bytes.is_empty() {
        return Err(Error::EmptySeed);
    }
    Ok(bytes)
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn summed(runs: u64, rng_seed: u64, run: impl Fn(u64) -> Result<Histogram>) -> Result<Histogram> {
    if runs == 0 {
        return Err(Error::InvalidConfig("runs must be at least 1".into()));
    }
    let mut total = run(derive_seed(rng_seed, 0))?;
    for r in 1..runs {
        total.merge(&run(derive_seed(rng_seed, r))?);
    }
    Ok(total)
}

fn metric_value(summary: &StatsSummary, metric: Metric) -> f64 {
    match metric {
        Metric::TimeToFull => summary.full_coverage_at.map_or(f64::INFINITY, |e| e as f64),
        Metric::Edges => summary.edges_covered as f64,
    }
}

fn load_metric(paths: &[PathBuf], metric: Metric) -> Result<Vec<f64>> {
    paths
        .iter()
        .map(|p| {
            let summary: StatsSummary = fs::read_to_string(p)?.parse()?;
            Ok(metric_value(&summary, metric))
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fuzz {
            common,
            mode,
            max_executions,
            mutants_per_seed,
            sampling_fraction,
            beta,
            stack_policy,
            no_splicing,
            corpus_dir,
            seeds,
        } => {
            let mut config = CampaignConfig::new(&common.target);
            config.rng_seed = common.rng_seed;
            config.max_executions = max_executions;
            config.mutants_per_seed = mutants_per_seed;
            config.sampling_fraction = sampling_fraction;
            config.mode = match mode {
                ModeArg::Vanilla => Mode::Vanilla,
                ModeArg::Ztaint => Mode::ZTaint,
            };
            config.havoc.stack_policy = stack_policy.parse::<StackPolicy>()?;
            config.splicing_stage_enabled = !no_splicing;
            if let Some(beta) = beta {
                config.threshold.beta = beta;
            }
            let initial = if seeds.is_empty() {
                vec![target_by_name(&common.target)?.default_seed().to_vec()]
            } else {
                seeds.iter().map(fs::read).collect::<std::io::Result<Vec<_>>>()?
            };
            let report = run_campaign(&config, &initial)?;
            if let Some(dir) = corpus_dir {
                report.corpus.save(&dir)?;
            }
            emit(&common, &report.stats.to_csv())
        }
        Command::SampleStart {
            common,
            seed,
            iterations,
            runs,
        } => {
            let seed = seed_bytes(&seed, &common)?;
            let hist = summed(runs, common.rng_seed, |s| experiment_start_positions(&seed, iterations, s))?;
            emit(&common, &hist.to_csv())
        }
        Command::SampleInfluence {
            common,
            seed,
            iterations,
            k,
            runs,
        } => {
            let seed = seed_bytes(&seed, &common)?;
            let hist = summed(runs, common.rng_seed, |s| {
                experiment_influenced_bytes(&common.target, &seed, iterations, k, s)
            })?;
            emit(&common, &hist.to_csv())
        }
        Command::StackDistance {
            common,
            seed,
            stacks,
            iterations,
        } => {
            let seed = seed_bytes(&seed, &common)?;
            let table = experiment_stack_distance(&seed, &stacks, iterations, common.rng_seed)?;
            let mut out = format!("{}\n", DistanceReport::CSV_HEADER);
            for (stack, report) in &table {
                out.push_str(&report.csv_rows(&stack.to_string(), &common.target));
            }
            emit(&common, &out)
        }
        Command::SpliceDistance {
            common,
            seed,
            corpus,
            pool_size,
            iterations,
        } => {
            let pool = if corpus.is_empty() {
                let seed = seed_bytes(&seed, &common)?;
                build_seed_pool(&seed, pool_size, derive_seed(common.rng_seed, 1))?
            } else {
                corpus.iter().map(fs::read).collect::<std::io::Result<Vec<_>>>()?
            };
            let report = experiment_splicing(&pool, iterations, common.rng_seed)?;
            emit(&common, &report.csv())
        }
        Command::Compare {
            common,
            a,
            b,
            metric,
            alternative,
        } => {
            let xs = load_metric(&a, metric)?;
            let ys = load_metric(&b, metric)?;
            let alt = match alternative {
                AltArg::TwoSided => Alternative::TwoSided,
                AltArg::Less => Alternative::Less,
                AltArg::Greater => Alternative::Greater,
            };
            let r = mann_whitney_u(&xs, &ys);
            let p = r.p(alt);
            emit(
                &common,
                &format!("target,U,p,significant\n{},{},{:.6e},{}\n", common.target, r.u, p, p < 0.05),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::CorpusTooSmall | Error::SpliceInfeasible => 3,
                Error::Io(_) => 1,
                _ => 2,
            })
        }
    }
}
