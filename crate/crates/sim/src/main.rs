use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use flc_sldo::check::run_checks;
use flc_sldo::config::load_config;
use flc_sldo::core::controllers::Variant;
use flc_sldo::core::integrate::Scheme;
use flc_sldo::core::scenario::{RunError, ScenarioConfig};
use flc_sldo::experiments::{comparison_row, mse_table, run_controllers, sweep, REFERENCE_TABLE};
use flc_sldo::plots::write_figures;
use flc_sldo::trace::{export_downsampled, run_scenario, trace_hash, write_meta, write_params_table};
use flc_sldo::{Result, SimError};

/// Closed-loop simulator for feedback-linearizing control with disturbance
/// observers.
#[derive(Parser)]
#[command(name = "flc-sldo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its trace, metadata, parameters and plots.
    Run {
        /// TOML scenario file or preset name.
        #[arg(long, default_value = "paper-default")]
        config: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        scheme: Option<Scheme>,
        /// Overrides the controller in the config (flc, flci, bndo, sldo).
        #[arg(long)]
        controller: Option<Variant>,
        /// Keep every N-th sample in the CSV and plots.
        #[arg(long, default_value_t = 1)]
        downsample: usize,
        #[arg(long)]
        no_plots: bool,
    },
    /// Run several controllers on the same scenario and tabulate metrics.
    Compare {
        #[arg(long, default_value = "paper-default")]
        config: String,
        #[arg(long, value_delimiter = ',', default_value = "flc,flci,bndo,sldo")]
        controllers: Vec<Variant>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        scheme: Option<Scheme>,
        #[arg(long)]
        no_plots: bool,
    },
    /// Noisy estimation MSE of type-1 against type-2 fuzzy models.
    Table1 {
        #[arg(long, default_value = "paper-default")]
        config: String,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, value_delimiter = ',', default_value = "20,40,80")]
        snr: Vec<f64>,
    },
    /// Run the invariant suite. Exits with 2 when any check fails.
    Check {
        #[arg(long, default_value = "paper-default")]
        config: String,
    },
    /// Vary one config key and report the tracking metrics.
    Sweep {
        #[arg(long, default_value = "paper-default")]
        config: String,
        /// Dotted key, e.g. `t2nfs.alpha` or `sldo.eta`.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
}

fn load(source: &str, scheme: Option<Scheme>) -> Result<ScenarioConfig> {
    let mut cfg = load_config(source)?;
    if let Some(s) = scheme {
        cfg.scheme = s;
    }
    Ok(cfg)
}

fn fmt(v: f64) -> String {
    format!("{v:>10.4}")
}

fn cmd_run(
    config: &str,
    out: &Path,
    scheme: Option<Scheme>,
    controller: Option<Variant>,
    every: usize,
    plots: bool,
) -> Result<()> {
    let mut cfg = load(config, scheme)?;
    if let Some(v) = controller {
        cfg.controller = v;
    }
    let start = Instant::now();
    let trace = match run_scenario(&cfg) {
        Err(SimError::Run(RunError::BlowUp { step, partial, source, last_valid })) => {
            // Keep what was computed for post-mortem.
            let path = out.join("trace_partial.csv");
            export_downsampled(&partial, &path, 1)?;
            eprintln!("partial trace written to {}", path.display());
            return Err(SimError::Run(RunError::BlowUp { step, partial, source, last_valid }));
        }
        other => other?,
    };
    let elapsed = start.elapsed();
    let csv = out.join("trace.csv");
    export_downsampled(&trace.records, &csv, every)?;
    write_meta(&trace.meta, &out.join("meta.toml"))?;
    write_params_table(&trace.final_params, &out.join("t2nfs_params.csv"))?;
    println!(
        "{} {} steps in {:.2?}, trace {}",
        cfg.controller.label(),
        trace.records.len(),
        elapsed,
        csv.display()
    );
    println!("config sha256 {}", trace.meta.config_hash);
    println!("trace  sha256 {}", trace_hash(&trace.records));
    let d = &trace.diagnostics;
    println!(
        "guard-active samples {}, q in [{:.4}, {:.4}], min spread {:.3e}",
        d.guard_active_samples, d.q_min, d.q_max, d.min_sigma
    );
    if plots {
        let files = write_figures(&out.join("figures"), &[(cfg.controller, trace)], every.max(20))?;
        println!("{} figures in {}", files.len(), out.join("figures").display());
    }
    Ok(())
}

fn cmd_compare(config: &str, controllers: &[Variant], out: &Path, scheme: Option<Scheme>, plots: bool) -> Result<()> {
    let base = load(config, scheme)?;
    let runs = run_controllers(&base, controllers)?;
    std::fs::create_dir_all(out).map_err(|e| SimError::io(out, e))?;
    let path = out.join("comparison.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|source| SimError::Csv { path: path.clone(), source })?;
    println!(
        "{:<10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "controller", "os1 %", "ts1", "x1(10)", "plateau2", "ts2", "|x1| p3", "mse bn", "mse sl"
    );
    for (v, trace) in &runs {
        let row = comparison_row(*v, trace).map_err(|e| SimError::Config(e.to_string()))?;
        println!(
            "{:<10} {} {} {} {} {} {} {} {}",
            row.controller,
            fmt(row.phase1_overshoot_pct),
            fmt(row.phase1_settling),
            fmt(row.x1_at_10s),
            fmt(row.phase2_plateau),
            fmt(row.phase2_settling),
            fmt(row.phase3_mean_abs_x1),
            fmt(row.phase3_mse_bndo),
            fmt(row.phase3_mse_sldo)
        );
        w.serialize(&row).map_err(|source| SimError::Csv { path: path.clone(), source })?;
        export_downsampled(&trace.records, &out.join(format!("trace_{}.csv", v.short_name())), 1)?;
    }
    w.flush().map_err(|e| SimError::io(&path, e))?;
    if plots {
        let files = write_figures(&out.join("figures"), &runs, 20)?;
        println!("{} figures in {}", files.len(), out.join("figures").display());
    }
    Ok(())
}

fn cmd_table1(config: &str, seeds: u64, snrs: &[f64]) -> Result<()> {
    let base = load(config, None)?;
    let seeds: Vec<u64> = (0..seeds).collect();
    let cells = mse_table(&base, snrs, &seeds)?;
    println!("{:>8} {:>12} {:>12} {:>9}   {:>10} {:>10}", "SNR dB", "type-1", "type-2", "gain %", "ref t1", "ref t2");
    for c in &cells {
        let reference = REFERENCE_TABLE.iter().find(|r| r.0 == c.snr_db);
        let (r1, r2) = reference.map_or(("-".into(), "-".into()), |r| (format!("{:.4}", r.1), format!("{:.4}", r.2)));
        println!(
            "{:>8} {:>12.6} {:>12.6} {:>9.2}   {:>10} {:>10}",
            c.snr_db,
            c.type1,
            c.type2,
            c.improvement_pct(),
            r1,
            r2
        );
    }
    println!("{} seeds per cell", seeds.len());
    Ok(())
}

fn cmd_check(config: &str) -> Result<bool> {
    let base = load(config, None)?;
    let results = run_checks(&base)?;
    for r in &results {
        println!("{r}");
    }
    Ok(results.iter().all(|r| r.passed))
}

fn cmd_sweep(config: &str, param: &str, values: &[String]) -> Result<()> {
    let base = load(config, None)?;
    let rows = sweep(&base, param, values)?;
    let mut w = csv::Writer::from_writer(std::io::stdout());
    for row in &rows {
        w.serialize(row).map_err(|source| SimError::Csv { path: "<stdout>".into(), source })?;
    }
    w.flush().map_err(|e| SimError::io("<stdout>", e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Bad arguments count as a configuration error.
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Run { config, out, scheme, controller, downsample, no_plots } => {
            cmd_run(config, out, *scheme, *controller, *downsample, !no_plots).map(|_| true)
        }
        Command::Compare { config, controllers, out, scheme, no_plots } => {
            cmd_compare(config, controllers, out, *scheme, !no_plots).map(|_| true)
        }
        Command::Table1 { config, seeds, snr } => cmd_table1(config, *seeds, snr).map(|_| true),
        Command::Check { config } => cmd_check(config),
        Command::Sweep { config, param, values } => cmd_sweep(config, param, values).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
