use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qd_quapi::cli::{self, kernel_cache, runner, RunConfig, SweepSpec};
use qd_quapi::error::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qd-quapi",
    version,
    about = "QUAPI dynamics of two coupled quantum dots in a phonon bath"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one configuration and write its trajectory CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Directory for the trajectory (default: the configured path).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Reuse (or create) a memory-kernel cache file.
        #[arg(long)]
        kernel_cache: Option<PathBuf>,
    },
    /// Run one trajectory per parameter value plus a summary table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// temperature, j12, kmax, dt or werner_lambda
        #[arg(long)]
        param: String,
        /// Comma-separated values, e.g. 77,150,300
        #[arg(long)]
        values: String,
    },
    /// Memory-length and time-step refinement study.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Memory lengths to compare, ascending.
        #[arg(long, default_value = "3,4,5,6", value_delimiter = ',')]
        kmax: Vec<usize>,
        /// Memory lengths of the dt and dt/2 runs; "3,6" keeps the memory
        /// time fixed.
        #[arg(long, default_value = "3,6", value_delimiter = ',')]
        dt_kmax: Vec<usize>,
        /// Horizon in ps (default: the configured grid horizon).
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Compute the memory kernel for a configuration and store it as JSON.
    KernelCache {
        #[arg(long)]
        config: PathBuf,
        /// Output file (a directory gets kernel.json inside it).
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(path: &std::path::Path) -> Result<RunConfig> {
    let cfg = cli::load_config_file(path)?;
    eprint!("{}", cfg.derived_summary());
    Ok(cfg)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run {
            config,
            out,
            kernel_cache,
        } => {
            let cfg = load(&config)?;
            let path = match &out {
                Some(dir) => dir.join(
                    cfg.output
                        .path
                        .file_name()
                        .unwrap_or("trajectory.csv".as_ref()),
                ),
                None => cfg.output.path.clone(),
            };
            let kernel = match &kernel_cache {
                Some(p) => Some(kernel_cache::load_or_compute(
                    p,
                    &cfg.bath,
                    cfg.grid.dt,
                    cfg.grid.kmax,
                )?),
                None => None,
            };
            let s = runner::run_to_path(&cfg, &path, kernel.as_ref())?;
            println!(
                "wrote {} rows to {} (final eof {:.6}, max trace error {:.2e})",
                s.rows,
                path.display(),
                s.final_eof,
                s.max_trace_error
            );
        }
        Command::Sweep {
            config,
            out,
            param,
            values,
        } => {
            let cfg = load(&config)?;
            let spec = SweepSpec::parse(&param, &values)?;
            let points = runner::sweep(&cfg, &spec, &out)?;
            let mut failed = 0;
            for p in &points {
                match &p.outcome {
                    Ok(s) => println!(
                        "{} = {}: final eof {:.6}",
                        spec.parameter, p.value, s.final_eof
                    ),
                    Err(e) => {
                        failed += 1;
                        println!("{} = {}: failed: {e}", spec.parameter, p.value);
                    }
                }
            }
            println!("summary written to {}", out.join("summary.csv").display());
            if failed > 0 {
                return Err(Error::Numeric(format!(
                    "{failed} of {} sweep runs failed",
                    points.len()
                )));
            }
        }
        Command::Converge {
            config,
            out,
            kmax,
            dt_kmax,
            horizon,
        } => {
            let &[coarse, fine] = dt_kmax.as_slice() else {
                return Err(Error::Config("--dt-kmax takes two values".into()));
            };
            let cfg = load(&config)?;
            let horizon = horizon.unwrap_or_else(|| cfg.grid.horizon());
            let report = runner::converge(&cfg, &kmax, (coarse, fine), horizon)?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("convergence.json"), &json)?;
            }
            println!("{json}");
        }
        Command::KernelCache { config, out } => {
            let cfg = load(&config)?;
            let path = if out.is_dir() {
                out.join("kernel.json")
            } else {
                out
            };
            let k = runner::write_kernel_cache(&cfg, &path)?;
            println!(
                "wrote kernel (dt {}, kmax {}) to {}",
                k.dt,
                k.kmax,
                path.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
