//! `conjo`: verify Conjecture O on homogeneous spaces G/P from the command
//! line. One space per invocation via `--type` plus a parabolic, or a batch
//! via `--suite desk|extended`.
//!
//! Node indices are 1-based Bourbaki numbering. Flags override environment
//! variables (`CONJO_CAP`, `CONJO_EXACT_CAP`, `CONJO_TOL`, `CONJO_OUT`,
//! `CONJO_EXPORT`, `CONJO_JOBS`, `CONJO_CACHE`), which override defaults.
//!
//! Exit codes: 0 all checks pass; 1 a verification failed; 2 usage or
//! descriptor error; 3 a cap was exceeded outside suite mode; 4 output
//! could not be written.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::Parser;

use conjecture_o::config::{run, ExportSet, RunConfig, SpaceSpec, Suite};
use conjecture_o::error::Error;
use conjecture_o::roots::CartanType;

#[derive(Parser, Debug)]
#[command(
    name = "conjo",
    version,
    about = "Quantum Chevalley c1-operators on G/P and Conjecture O verification"
)]
struct Cli {
    /// Cartan type descriptor, e.g. A3, B2, A2xA1.
    #[arg(long = "type", value_name = "DESC")]
    cartan_type: Option<String>,

    /// Comma-separated 1-based node indices of I_P (the parabolic).
    #[arg(long, value_delimiter = ',', value_name = "NODES")]
    parabolic: Option<Vec<usize>>,

    /// Comma-separated 1-based node indices of I^P (the complement);
    /// mutually exclusive with --parabolic.
    #[arg(long, value_delimiter = ',', value_name = "NODES", conflicts_with = "parabolic")]
    parabolic_complement: Option<Vec<usize>>,

    /// Batch suite: desk or extended.
    #[arg(long, conflicts_with = "cartan_type")]
    suite: Option<String>,

    /// Quotient size cap.
    #[arg(long)]
    cap: Option<usize>,

    /// Exact-spectrum size cap (larger matrices fall back to numeric mode).
    #[arg(long)]
    exact_cap: Option<usize>,

    /// Relative eigenvalue cluster tolerance.
    #[arg(long)]
    tol: Option<f64>,

    /// Output directory for per-space artifacts.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Exports to write under --out: json,dot,csv,matrix.
    #[arg(long, value_delimiter = ',')]
    export: Option<Vec<String>>,

    /// Worker count for space-level parallelism.
    #[arg(long)]
    jobs: Option<usize>,

    /// Quotient cache directory.
    #[arg(long)]
    cache: Option<PathBuf>,
}

fn env_fallback<T: FromStr>(flag: Option<T>, var: &str) -> Option<T> {
    flag.or_else(|| std::env::var(var).ok().and_then(|v| v.parse().ok()))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::BadDescriptor(_)
        | Error::InvalidCartanType(_, _)
        | Error::NodeOutOfRange(_, _)
        | Error::ParabolicIsFullGroup
        | Error::BadConfig(_) => 2,
        Error::QuotientCapExceeded { .. } => 3,
        Error::Io { .. } | Error::Serde(_) => 4,
        _ => 1,
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut config = if let Some(name) = &cli.suite {
        Suite::parse(name)?.config()
    } else {
        let Some(desc) = &cli.cartan_type else {
            return Err(Error::BadConfig("either --type or --suite is required".into()));
        };
        let cartan: CartanType = desc.parse()?;
        let rank = cartan.rank();
        let to_zero_based = |nodes: &[usize]| -> Result<Vec<usize>, Error> {
            nodes
                .iter()
                .map(|&n| {
                    if n == 0 || n > rank {
                        Err(Error::NodeOutOfRange(n, rank))
                    } else {
                        Ok(n - 1)
                    }
                })
                .collect()
        };
        let i_p = if let Some(complement) = &cli.parabolic_complement {
            let complement = to_zero_based(complement)?;
            (0..rank).filter(|i| !complement.contains(i)).collect()
        } else {
            to_zero_based(cli.parabolic.as_deref().unwrap_or(&[]))?
        };
        RunConfig::new(vec![SpaceSpec::new(cartan, i_p)])
    };

    if let Some(cap) = env_fallback(cli.cap, "CONJO_CAP") {
        config.options.quotient_cap = cap;
    }
    if let Some(cap) = env_fallback(cli.exact_cap, "CONJO_EXACT_CAP") {
        config.options.exact_cap = cap;
    }
    if let Some(tol) = env_fallback(cli.tol, "CONJO_TOL") {
        config.options.cluster_tol_rel = tol;
    }
    config.out_dir = env_fallback(cli.out.clone(), "CONJO_OUT");
    if let Some(jobs) = env_fallback(cli.jobs, "CONJO_JOBS") {
        config.jobs = jobs;
    }
    config.options.cache_dir = env_fallback(cli.cache.clone(), "CONJO_CACHE");
    let export_names = cli.export.clone().or_else(|| {
        std::env::var("CONJO_EXPORT")
            .ok()
            .map(|v| v.split(',').map(|s| s.to_string()).collect())
    });
    if let Some(names) = export_names {
        config.exports = ExportSet::parse(&names)?;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("conjo: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    let suite_mode = config.suite_mode;
    match run(&config) {
        Ok(summary) => {
            if suite_mode || summary.reports.len() > 1 {
                print!("{}", summary.table());
            } else {
                for report in &summary.reports {
                    print!("{}", report.render_text());
                }
            }
            if summary.cap_exceeded {
                ExitCode::from(3)
            } else if summary.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("conjo: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
