use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fairsched::ratio::{self, Rational};
use fairsched::{Instance, Schedule, Time};
use fairsched_cli::bench::{run_bench, BenchConfig};
use fairsched_cli::gen::{generate, Distribution, GenSpec};
use fairsched_cli::solve::{solve, Algo, SolveParams};
use fairsched_cli::verify::{claim_from_output, verify, Claim};

const EXIT_OK: u8 = 0;
const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_FLAGGED: u8 = 3;

/// Fair repetitive scheduling: minimize the largest total completion time
/// of any client over all days.
#[derive(Parser)]
#[command(name = "fairsched", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Lp2,
    Ptas,
    Inversion,
    Qptas,
    Exact,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Lp2 => Algo::Lp2,
            AlgoArg::Ptas => Algo::Ptas,
            AlgoArg::Inversion => Algo::Inversion,
            AlgoArg::Qptas => Algo::Qptas,
            AlgoArg::Exact => Algo::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    TwoPoint,
    Unit,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        p_min: Time,
        #[arg(long, default_value_t = 10)]
        p_max: Time,
        #[arg(long, value_enum, default_value = "uniform")]
        distribution: DistArg,
        /// Share of clients at `p_max` for the two-point distribution.
        #[arg(long, default_value_t = 0.1)]
        high_fraction: f64,
        #[arg(long)]
        day_invariant: bool,
        #[arg(long)]
        seed: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Solve an instance and print the schedule with its certificate.
    Solve {
        #[arg(long, value_enum)]
        algo: AlgoArg,
        /// Accuracy, as a decimal or a fraction such as `1/4`.
        #[arg(long, default_value = "1/2")]
        eps: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Seconds.
        #[arg(long)]
        time_budget: Option<f64>,
        /// Write the final LP in CPLEX LP format (lp2 and qptas).
        #[arg(long)]
        dump_lp: Option<PathBuf>,
        /// Use the batching of an exactly solved optimum (small instances).
        #[arg(long)]
        oracle_batching: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
        instance: PathBuf,
    },
    /// Re-check a schedule against its claimed objective and lower bound.
    Verify {
        instance: PathBuf,
        schedule: PathBuf,
        /// Claimed objective; defaults to the certificate in the schedule file.
        #[arg(long = "k")]
        k: Option<Time>,
        #[arg(long)]
        lb: Option<Time>,
    },
    /// Run a seeded suite of instances through several algorithms.
    Bench {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        m_min: usize,
        #[arg(long, default_value_t = 3)]
        m_max: usize,
        #[arg(long, default_value_t = 10)]
        p_max: Time,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "lp2,ptas,inversion,qptas,exact"
        )]
        algos: Vec<String>,
        #[arg(long, default_value = "1/2")]
        eps: String,
        #[arg(long)]
        time_budget: Option<f64>,
        #[arg(long, default_value_t = 6)]
        oracle_max_n: usize,
        /// CSV destination; stdout when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long)]
        gantt: Option<PathBuf>,
    },
    /// Print every implemented lower bound.
    Bound { instance: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    Instance::from_json(&read(path)?)
        .with_context(|| format!("invalid instance {}", path.display()))
}

fn parse_eps(s: &str) -> Result<Rational> {
    let e = ratio::parse(s)?;
    if e <= ratio::int(0) {
        bail!("--eps must be positive");
    }
    Ok(e)
}

fn budget(secs: Option<f64>) -> Result<Option<Duration>> {
    secs.map(|s| Duration::try_from_secs_f64(s).context("invalid --time-budget"))
        .transpose()
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen {
            n,
            m,
            p_min,
            p_max,
            distribution,
            high_fraction,
            day_invariant,
            seed,
            out,
        } => {
            let distribution = match distribution {
                DistArg::Uniform => Distribution::Uniform,
                DistArg::TwoPoint => Distribution::TwoPoint {
                    fraction: high_fraction,
                },
                DistArg::Unit => Distribution::Unit,
            };
            let spec = GenSpec {
                n,
                m,
                p_min,
                p_max,
                day_invariant,
                distribution,
                seed,
            };
            emit(&(generate(&spec)?.to_json() + "\n"), out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Solve {
            algo,
            eps,
            seed,
            time_budget,
            dump_lp,
            oracle_batching,
            out,
            instance,
        } => {
            let inst = load_instance(&instance)?;
            let algo = Algo::from(algo);
            if dump_lp.is_some() && !matches!(algo, Algo::Lp2 | Algo::Qptas) {
                bail!("--dump-lp is available for lp2 and qptas only");
            }
            let params = SolveParams {
                eps: parse_eps(&eps)?,
                seed,
                time_budget: budget(time_budget)?,
                oracle_batching,
            };
            let result = solve(&inst, algo, &params)?;
            if let Some(path) = dump_lp {
                let text = result
                    .lp
                    .as_ref()
                    .map(|lp| lp.to_cplex_lp())
                    .unwrap_or_default();
                fs::write(&path, text)
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            emit(&result.to_json(), out.as_deref())?;
            Ok(if result.flagged {
                EXIT_FLAGGED
            } else {
                EXIT_OK
            })
        }
        Command::Verify {
            instance,
            schedule,
            k,
            lb,
        } => {
            let inst = load_instance(&instance)?;
            let text = read(&schedule)?;
            let sched = Schedule::from_json(&text)
                .with_context(|| format!("invalid schedule {}", schedule.display()))?;
            let from_file = claim_from_output(&text);
            let claim = match (k, from_file) {
                (Some(k), _) => Claim { K: k, lb },
                (None, Some(c)) => Claim {
                    K: c.K,
                    lb: lb.or(c.lb),
                },
                (None, None) => bail!("no claimed K: pass --k or a solver output file"),
            };
            let report = verify(&inst, &sched, &claim)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.pass {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
        Command::Bench {
            count,
            seed,
            n_min,
            n_max,
            m_min,
            m_max,
            p_max,
            algos,
            eps,
            time_budget,
            oracle_max_n,
            out,
            gantt,
        } => {
            if n_min == 0 || n_min > n_max || m_min == 0 || m_min > m_max || p_max == 0 {
                bail!("invalid size ranges");
            }
            let cfg = BenchConfig {
                count,
                seed,
                n_range: (n_min, n_max),
                m_range: (m_min, m_max),
                p_max,
                algos: algos
                    .iter()
                    .map(|a| Algo::parse(a))
                    .collect::<Result<_>>()?,
                eps: parse_eps(&eps)?,
                time_budget: budget(time_budget)?,
                oracle_max_n,
            };
            let report = run_bench(&cfg)?;
            let mut csv = Vec::new();
            report.write_csv(&mut csv)?;
            emit(&String::from_utf8(csv)?, out.as_deref())?;
            if let Some(path) = gantt {
                fs::write(&path, report.gantt.join("\n"))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            Ok(EXIT_OK)
        }
        Command::Bound { instance } => {
            let inst = load_instance(&instance)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&fairsched_cli::bounds_report(&inst)?)?
            );
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
