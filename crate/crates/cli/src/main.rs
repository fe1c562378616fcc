use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use krr_cli::config::{DEFAULT_ETA, DEFAULT_MAX_ITER, OUTPUT_ENV};
use krr_cli::{
    compute_spectra, demo_config, run_experiment, run_grid, write_spectra, DemoTable,
    ExperimentConfig, ProblemSpec, Result, SolverSpec, SpectraSettings,
};
use krr_core::problems::{DEFAULT_BAND, DEFAULT_SIGMA};

/// GMRES, QMR and their range-restricted variants on discrete ill-posed
/// test problems.
#[derive(Parser)]
#[command(name = "krr", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the grid described by a JSON config.
    ///
    /// Config fields: problem {name: phillips|shaw|blur2d, n, band, sigma},
    /// solvers [{name: gmres|qmr|rrgmres|rrqmr|tsvd, shifts}],
    /// noise_levels_percent, assumed_noise_levels_percent (optional, paired
    /// with the actual levels), seeds, eta (default 1.01), max_iter
    /// (default 100), output_dir (default krr-output). The KRR_OUT
    /// environment variable overrides output_dir.
    Run { config: PathBuf },
    /// Single solve, printed as one summary line.
    Solve {
        #[arg(long, default_value = "phillips")]
        problem: String,
        /// Grid size, or image side for blur2d.
        #[arg(long, default_value_t = 512)]
        n: usize,
        /// blur2d PSF half-bandwidth.
        #[arg(long, default_value_t = DEFAULT_BAND)]
        band: usize,
        /// blur2d PSF width.
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
        /// gmres, qmr, rrgmres, rrqmr or tsvd.
        #[arg(long, default_value = "gmres")]
        solver: String,
        /// Range-restriction shift; defaults to 0 for gmres/qmr, 1 for rrgmres/rrqmr.
        #[arg(long)]
        shift: Option<usize>,
        /// Noise level in percent of ||b_exact||.
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ETA)]
        eta: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// Noise level assumed by the stopping rule; defaults to --noise.
        #[arg(long)]
        assumed_noise: Option<f64>,
    },
    /// Projected singular values of GMRES and QMR on Phillips.
    Spectra {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 30)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        shifts: Vec<usize>,
        /// Output directory; falls back to KRR_OUT, then krr-output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in reduced-size grids for the three result tables.
    DemoTables {
        /// 1, 2 or 3; all tables when omitted.
        #[arg(long)]
        table: Option<DemoTable>,
        /// Output root (one subdirectory per table); falls back to KRR_OUT,
        /// then krr-output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn output_root(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| {
        std::env::var_os(OUTPUT_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
    .unwrap_or_else(|| PathBuf::from(krr_cli::config::DEFAULT_OUTPUT_DIR))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            cfg.apply_output_override(std::env::var_os(OUTPUT_ENV));
            let out = run_experiment(&cfg)?;
            println!(
                "{} runs, {} files written to {}",
                out.outcomes.len(),
                out.files.len(),
                cfg.output_dir.display()
            );
        }
        Command::Solve {
            problem,
            n,
            band,
            sigma,
            solver,
            shift,
            noise,
            seed,
            eta,
            max_iter,
            assumed_noise,
        } => {
            let blur = problem == "blur2d";
            let cfg = ExperimentConfig {
                problem: ProblemSpec {
                    name: problem,
                    n,
                    band: blur.then_some(band),
                    sigma: blur.then_some(sigma),
                },
                solvers: vec![SolverSpec::new(
                    &solver,
                    &shift.into_iter().collect::<Vec<_>>(),
                )],
                noise_levels_percent: vec![noise],
                assumed_noise_levels_percent: assumed_noise.map(|a| vec![a]),
                seeds: vec![seed],
                eta,
                max_iter,
                output_dir: PathBuf::new(),
            };
            for o in run_grid(&cfg)? {
                let r = &o.record;
                println!(
                    "problem={} solver={} shift={} noise={} assumed={} seed={} iterations={} stop={} \
                     error={:.5e} residual={:.5e} min_error={:.5e} min_iteration={}",
                    r.problem,
                    r.solver,
                    r.shift,
                    r.noise_percent,
                    r.assumed_noise_percent,
                    r.seed,
                    r.iterations,
                    r.stop_reason,
                    r.final_error,
                    r.final_residual,
                    r.min_error,
                    r.min_error_iteration
                );
            }
        }
        Command::Spectra {
            n,
            m,
            noise,
            seed,
            shifts,
            out,
        } => {
            let reports = compute_spectra(&SpectraSettings {
                n,
                m,
                noise_percent: noise,
                seed,
                shifts,
            })?;
            let dir = output_root(out);
            write_spectra(&reports, &dir)?;
            for r in &reports {
                let decay = r
                    .decay_index(1e-8)
                    .map_or_else(|| "none".to_string(), |i| i.to_string());
                println!(
                    "{} shift={} m={} sigma_min/sigma_1={:.5e} first_below_1e-8={decay}",
                    r.method,
                    r.shift,
                    r.m,
                    r.smallest() / r.singular_values[0]
                );
            }
            println!("wrote {}", dir.display());
        }
        Command::DemoTables { table, out } => {
            let root = output_root(out);
            let tables = table.map_or(DemoTable::ALL.to_vec(), |t| vec![t]);
            for t in tables {
                let cfg = demo_config(t, &root);
                let out = run_experiment(&cfg)?;
                println!(
                    "{t}: {} runs written to {}",
                    out.outcomes.len(),
                    cfg.output_dir.display()
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
