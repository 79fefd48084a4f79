use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mginf::cli::{self, Format};
use mginf::mdinf::{self, MDDensity};
use mginf::parse::{DistSpec, GridSpec};
use mginf::{moments, sim, transform, Error, QueueConfig};

#[derive(Parser)]
#[command(
    name = "mginf",
    version,
    about = "Busy-period analysis of the M/G/inf queue"
)]
struct Args {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Quadrature tolerance; each command has its own default.
    #[arg(long, global = true, env = "MGINF_TOL")]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Peakedness and eta for one service law.
    Eta {
        #[arg(long)]
        dist: DistSpec,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Busy-period moments and variance bounds.
    Moments {
        #[arg(long)]
        dist: DistSpec,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = moments::DEFAULT_MAX_ORDER)]
        nmax: usize,
    },
    /// Recompute the eta table and compare with the embedded reference values.
    Table1,
    /// Run the bound suites over a grid such as `rho=0.5,1;lambda=1;family=D,M`.
    Bounds {
        #[arg(long)]
        grid: Option<GridSpec>,
    },
    /// Monte Carlo estimates from independent busy periods.
    Simulate {
        #[arg(long)]
        dist: DistSpec,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write the raw busy periods to this CSV file.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Busy-period density of M/D/inf.
    Density {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        tmax: Option<f64>,
    },
}

enum Failure {
    Input(String),
    Compute(Error),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(format!("output: {e}"))
    }
}

fn run(args: Args) -> Result<(), Failure> {
    let format = match args.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    if let Some(t) = args.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Input(format!(
                "tolerance must be positive, got {t}"
            )));
        }
    }
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let ttol = args.tol.unwrap_or(transform::DEFAULT_TOL);
    let checks_ok = match args.command {
        Command::Eta { dist, lambda, rho } => {
            let (d, q) = dist.resolve(lambda, rho)?;
            let report = transform::eta(&d, &q, ttol)?;
            cli::write_records(&[report], format, &mut out)?;
            true
        }
        Command::Moments {
            dist,
            lambda,
            rho,
            nmax,
        } => {
            let (d, q) = dist.resolve(lambda, rho)?;
            let table =
                moments::busy_moments(&d, &q, nmax, args.tol.unwrap_or(moments::DEFAULT_TOL))?;
            cli::write_records(&cli::moment_rows(&table), format, &mut out)?;
            true
        }
        Command::Table1 => {
            let rows = cli::run_table1(ttol);
            cli::write_records(&rows, format, &mut out)?;
            cli::all_pass(&rows)
        }
        Command::Bounds { grid } => {
            let rows = cli::run_bounds(&grid.unwrap_or_default(), ttol);
            cli::write_records(&rows, format, &mut out)?;
            cli::all_pass(&rows)
        }
        Command::Simulate {
            dist,
            lambda,
            rho,
            n,
            seed,
            samples,
        } => {
            let (d, q) = dist.resolve(lambda, rho)?;
            let result = sim::estimate(&d, &q, n, seed)?;
            if let Some(path) = samples {
                let xs = sim::busy_period_samples(&d, &q, n, seed)?;
                sim::write_samples_csv(&xs, BufWriter::new(File::create(path)?))?;
            }
            cli::write_records(&[result], format, &mut out)?;
            true
        }
        Command::Density {
            lambda,
            alpha,
            step,
            tmax,
        } => {
            let q = QueueConfig::new(lambda, lambda * alpha)?;
            let step = step.unwrap_or(alpha / mdinf::DEFAULT_STEPS_PER_ALPHA as f64);
            let tmax = tmax.unwrap_or_else(|| MDDensity::default_t_max(&q));
            let dens = mdinf::md_density(&q, tmax, step, args.tol.unwrap_or(1e-10))?;
            cli::write_density(&dens, format, &mut out)?;
            true
        }
    };
    out.flush()?;
    if checks_ok {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() {
                cli::EXIT_INVALID_INPUT
            } else {
                0
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => {
            eprintln!("mginf: one or more checks failed");
            ExitCode::from(cli::EXIT_CHECK_FAILED as u8)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("mginf: {msg}");
            ExitCode::from(cli::EXIT_INVALID_INPUT as u8)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("mginf: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
