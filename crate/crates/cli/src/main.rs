//! Experiment runner for escape-time studies of stochastic market models.
//!
//! Exit codes: 0 success, 2 validation error, 3 degenerate ensemble
//! (nothing escaped), 1 anything else.

mod config;
mod presets;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use escapelab_core::{market, output, Error};

use config::ExperimentConfig;
use presets::Overrides;

#[derive(Parser)]
#[command(
    name = "escapelab",
    about = "Monte Carlo escape-time experiments on stochastic market models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonFlags {
    /// Master RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Events per ensemble/sweep point, or observations for series runs.
    #[arg(long)]
    events: Option<usize>,
    /// Logical worker count (chains under volatility carry-over).
    #[arg(long)]
    workers: Option<usize>,
    /// Integration time step for the continuous-time models.
    #[arg(long)]
    dt: Option<f64>,
    /// Output directory (default: $ESCAPELAB_OUT or the working dir).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named preset: fig2, fig3, fig4a, fig4b, fig5 or fig6-9.
    RunPreset {
        name: String,
        #[command(flatten)]
        common: CommonFlags,
        /// Starting position override for the fig4a/fig4b/fig5 panels.
        #[arg(long)]
        x_start: Option<f64>,
        /// Fitted model parameters for fig2 ([gbm]/[garch]/[heston] TOML).
        #[arg(long)]
        params: Option<PathBuf>,
        /// Reference escape-time file (as written by `ingest`) to compare
        /// model escape-time PFs against with chi-square and K-S tests.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Run an experiment described by a TOML config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Ingest a daily closure-price CSV and pool per-stock escape times.
    Ingest {
        prices: PathBuf,
        /// Initial threshold in units of each stock's sigma.
        #[arg(long, default_value_t = -0.1, allow_hyphen_values = true)]
        k_i: f64,
        /// Final (absorbing) threshold in units of each stock's sigma.
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        k_f: f64,
        /// Keep stocks with gaps out of the pool instead of rejecting.
        #[arg(long)]
        allow_gaps: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the canonical form and fingerprint of a config file.
    DumpCanonical { config: PathBuf },
}

fn overrides(
    common: &CommonFlags,
    x_start: Option<f64>,
    params: Option<PathBuf>,
    data: Option<PathBuf>,
) -> Overrides {
    Overrides {
        seed: common.seed,
        events: common.events,
        workers: common.workers,
        dt: common.dt,
        out: common.out.clone(),
        x_start,
        params,
        data,
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::DegenerateEnsemble(_) => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn install_worker_pool(workers: Option<usize>) {
    if let Some(w) = workers {
        // physical pool size; results never depend on it
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global();
    }
}

fn real_main() -> Result<(), Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::RunPreset {
            name,
            common,
            x_start,
            params,
            data,
        } => {
            install_worker_pool(common.workers);
            let ov = overrides(&common, x_start, params, data);
            let experiments = presets::expand_preset(&name, &ov)?;
            let report = runner::run_all(&experiments)?;
            report.print();
            Ok(())
        }
        Command::Run { config, common } => {
            install_worker_pool(common.workers);
            let mut experiment = ExperimentConfig::load(&config)?;
            let ov = overrides(&common, None, None, None);
            ov.apply(&mut experiment);
            experiment.validate()?;
            let report = runner::run_experiment(&experiment, "")?;
            report.print();
            Ok(())
        }
        Command::Ingest {
            prices,
            k_i,
            k_f,
            allow_gaps,
            out,
        } => {
            let (table, dropped) = market::load_price_table_with(
                &prices,
                market::IngestOptions { allow_gaps },
            )?;
            let returns = market::compute_returns(&table, market::ReturnMode::Log)?;
            let pooled = market::empirical_escape_dataset(&returns, k_i, k_f)?;

            let input_id = format!(
                "ingest {} k_i={k_i} k_f={k_f} stocks={} days={}",
                prices.display(),
                table.tickers.len(),
                table.n_days
            );
            let fp = escapelab_core::fingerprint(&input_id);
            let out_dir = out.unwrap_or_else(|| {
                std::env::var("ESCAPELAB_OUT")
                    .ok()
                    .filter(|s| !s.is_empty())
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from("."))
            });
            std::fs::create_dir_all(&out_dir)?;
            let path = output::unique_path(&out_dir, "empirical_escape_times", &fp, "steps");
            output::write_escape_steps(&path, &pooled.times, &fp)?;

            println!("fingerprint: {fp}");
            println!(
                "stocks: {} ({} dropped for gaps, {} skipped for zero sigma)",
                table.tickers.len(),
                dropped,
                pooled.skipped_zero_sigma
            );
            println!("days: {}", table.n_days);
            println!("pooled escape events: {}", pooled.times.len());
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::DumpCanonical { config } => {
            let experiment = ExperimentConfig::load(&config)?;
            print!("{}", experiment.canonical());
            println!("# fingerprint: {}", experiment.fingerprint());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
