use std::path::PathBuf;
use std::process::ExitCode;

use av1324::analysis::{self, AnalyzeArgs, DaArgs, ExtendArgs};
use av1324::enumerate::{self, AlternatingArgs, EnumerateArgs};
use av1324::verify::{self, Status};
use av1324::{default_memory_cap, parse_bytes, CliError, RunManifest, EXIT_FAILURE, EXIT_USAGE};
use av1324_analysis::diffapprox::DEFAULT_MIN_FRACTION;
use av1324_analysis::hp::DEFAULT_PRECISION;
use av1324_analysis::report::DEFAULT_RATIO_CUTOFF;
use av1324_core::oracle::AlternatingConvention;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "av1324", version, about = "Enumerate and analyse 1324-avoiding permutations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Threads {
    /// Worker threads; 0 uses one per core.
    #[arg(long, env = "AV1324_THREADS", default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Convention {
    UpDown,
    DownUp,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count 1324-avoiders of every length up to n by the transfer sweep.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Comma-separated reconstruction moduli; chosen automatically if absent.
        #[arg(long, value_delimiter = ',')]
        moduli: Option<Vec<u64>>,
        #[command(flatten)]
        threads: Threads,
        #[arg(long)]
        out: PathBuf,
        /// Memory cap such as 4G; defaults to 75% of physical memory.
        #[arg(long, env = "AV1324_MAX_MEMORY", value_parser = parse_bytes)]
        max_memory: Option<u128>,
    },
    /// Cross-check the sweep against exhaustive enumeration.
    Verify {
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "up-down")]
        convention: Convention,
        #[command(flatten)]
        threads: Threads,
    },
    /// Ratio methods and log fits over a series, as CSV traces and a JSON summary.
    Analyze {
        series: PathBuf,
        #[arg(long, env = "AV1324_MU")]
        mu: Option<String>,
        #[arg(long, env = "AV1324_SIGMA")]
        sigma: Option<String>,
        #[arg(long)]
        outdir: PathBuf,
        #[arg(long, env = "AV1324_PRECISION", default_value_t = DEFAULT_PRECISION)]
        precision: usize,
        #[arg(long, env = "AV1324_CUTOFF_RATIO_INDEX", default_value_t = DEFAULT_RATIO_CUTOFF)]
        cutoff_ratio_index: usize,
        #[command(flatten)]
        threads: Threads,
    },
    /// Predict further coefficients from an ensemble of differential approximants.
    Extend {
        series: PathBuf,
        #[arg(long)]
        count: usize,
        /// Ratios to predict; defaults to --count.
        #[arg(long)]
        ratio_count: Option<usize>,
        #[arg(long)]
        outdir: PathBuf,
        #[arg(long, env = "AV1324_PRECISION", default_value_t = DEFAULT_PRECISION)]
        precision: usize,
        #[command(flatten)]
        threads: Threads,
    },
    /// Table of differential-approximant singularities and exponents.
    Da {
        series: PathBuf,
        /// Analyse the renormalized series instead of the raw one.
        #[arg(long)]
        renormalize: bool,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        lmax: i64,
        /// Smallest fraction of the coefficients each approximant must use.
        #[arg(long, default_value_t = DEFAULT_MIN_FRACTION)]
        min_fraction: f64,
        #[arg(long)]
        outdir: Option<PathBuf>,
        #[arg(long, env = "AV1324_PRECISION", default_value_t = DEFAULT_PRECISION)]
        precision: usize,
        #[command(flatten)]
        threads: Threads,
    },
    /// Count alternating 1324-avoiders with the restricted sweep.
    Alternating {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn report_outputs(m: &RunManifest) {
    for o in &m.outputs {
        println!("wrote {} ({} bytes, sha256 {})", o.path, o.bytes, o.sha256);
    }
    println!("wall time {:.2}s", m.wall_time_seconds);
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Enumerate {
            n,
            moduli,
            threads,
            out,
            max_memory,
        } => {
            let m = enumerate::enumerate(&EnumerateArgs {
                n,
                moduli,
                threads: threads.threads,
                out,
                max_memory: max_memory.or_else(default_memory_cap),
            })?;
            println!("moduli {:?} verification {:?}", m.moduli, m.verification_modulus);
            println!("peak states {}", m.peak_states.unwrap_or(0));
            report_outputs(&m);
        }
        Command::Verify {
            n_max,
            convention,
            threads,
        } => {
            let convention = match convention {
                Convention::UpDown => AlternatingConvention::UpDown,
                Convention::DownUp => AlternatingConvention::DownUp,
            };
            let r = verify::verify(n_max, threads.threads, convention)?;
            for c in &r.checks {
                println!("{c}");
            }
            let gaps = r.checks.iter().filter(|c| c.status == Status::KnownGap).count();
            println!("p_{n_max} = {}", r.counts[n_max - 1]);
            match r.failures() {
                0 => println!("PASS ({gaps} known gap(s))"),
                k => return Err(CliError::VerificationFailed(k)),
            }
        }
        Command::Analyze {
            series,
            mu,
            sigma,
            outdir,
            precision,
            cutoff_ratio_index,
            threads,
        } => {
            let (report, m) = analysis::analyze(&AnalyzeArgs {
                series,
                mu,
                sigma,
                outdir,
                precision,
                ratio_cutoff: cutoff_ratio_index,
                threads: threads.threads,
            })?;
            let text = serde_json::to_string_pretty(&report.summary).expect("serializable");
            println!("{text}");
            report_outputs(&m);
        }
        Command::Extend {
            series,
            count,
            ratio_count,
            outdir,
            precision,
            threads,
        } => {
            let (s, m) = analysis::extend(&ExtendArgs {
                series,
                count,
                ratio_count,
                outdir,
                precision,
                threads: threads.threads,
            })?;
            println!("{} exact terms, {} predicted", s.exact_len(), s.extended.len());
            report_outputs(&m);
        }
        Command::Da {
            series,
            renormalize,
            orders,
            lmax,
            min_fraction,
            outdir,
            precision,
            threads,
        } => {
            let (run, m) = analysis::da(&DaArgs {
                series,
                renormalize,
                orders,
                l_max: lmax,
                min_fraction,
                outdir,
                precision,
                threads: threads.threads,
            })?;
            print!("{}", run.table());
            if let Some(m) = m {
                report_outputs(&m);
            }
        }
        Command::Alternating { n, out } => {
            let m = enumerate::alternating(&AlternatingArgs { n, out })?;
            report_outputs(&m);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("av1324: {e}");
            let code = e.exit_code();
            ExitCode::from(if code == 0 { EXIT_FAILURE } else { code } as u8)
        }
    }
}
