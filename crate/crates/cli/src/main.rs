//! Command-line front end: single driven runs, lambda/coupling sweeps, and
//! gnuplot script generation over previously produced result directories.

mod config;
mod output;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tangle4::{
    angular, bin_histogram, build_closed_hamiltonian, convergence_probe, diagonalize, evolve,
    extract_period, gamma_matrix, run_sweep, tangle_series, Error as CoreError, SweepGrid,
};

use config::{OutputKind, SweepConfigFile};
use output::RunReport;

#[derive(Parser)]
#[command(
    name = "tangle4",
    version,
    about = "Driven three-qubit/one-cavity entanglement simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one driven run and write its time series and summary.
    Run(RunArgs),
    /// Scan the (lambda, eta_L) grid and write period statistics.
    Sweep(SweepArgs),
    /// Emit gnuplot scripts for the CSV files in a result directory.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file.
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON configuration file.
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding series.csv / sweep.csv / histogram.csv / contour.csv.
    dir: PathBuf,
    /// Where to write the scripts (defaults to the data directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CommonArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Size of the rayon worker pool (defaults to the logical CPU count).
    #[arg(long)]
    workers: Option<usize>,
    /// Override the integrator step, in seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// Override the integration window, in seconds.
    #[arg(long)]
    t_end: Option<f64>,
    /// Reserved; the simulation is deterministic and takes no seed.
    #[arg(long)]
    seedless: bool,
}

/// Exit code 2 for configuration mistakes, 3 for numeric trouble during a
/// structurally valid computation.
enum Failure {
    Config(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NormDrift { .. }
            | CoreError::NonFinite { .. }
            | CoreError::EigenNoConvergence { .. }
            | CoreError::EigenResidual { .. }
            | CoreError::BasisNotUnitary { .. }
            | CoreError::BadSample { .. }
            | CoreError::NotHermitian { .. }
            | CoreError::NotPositive { .. } => Failure::Numeric(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn reject_seedless(common: &CommonArgs) -> Result<(), Failure> {
    if common.seedless {
        return Err(Failure::Config(
            "--seedless is reserved: the simulation is fully deterministic and takes no seed"
                .into(),
        ));
    }
    Ok(())
}

fn init_workers(common: &CommonArgs) -> Result<(), Failure> {
    let Some(n) = common.workers else { return Ok(()) };
    if n == 0 {
        return Err(Failure::Config("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(format!("worker pool: {e}")))
}

fn apply_overrides(
    integrator: &mut config::IntegratorSection,
    common: &CommonArgs,
) -> Result<(), Failure> {
    if let Some(dt) = common.dt {
        if !dt.is_finite() {
            return Err(Failure::Config(format!("--dt must be finite, got {dt}")));
        }
        integrator.dt = config::TimeSpan(dt);
    }
    if let Some(t_end) = common.t_end {
        if !t_end.is_finite() {
            return Err(Failure::Config(format!("--t-end must be finite, got {t_end}")));
        }
        integrator.t_end = config::TimeSpan(t_end);
    }
    Ok(())
}

fn read_config_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    reject_seedless(&args.common)?;
    init_workers(&args.common)?;

    let text = read_config_text(&args.config)?;
    let mut cfg = config::parse_run_config(&text)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))?;
    apply_overrides(&mut cfg.integrator, &args.common)?;

    let params = cfg.system.to_params();
    params.validate()?;
    let init = cfg.initial_state.to_initial_state().map_err(Failure::Config)?;
    let integrator = cfg.integrator.to_config();
    integrator.validate()?;
    let detection = cfg.detection.to_detection();
    detection.validate()?;

    let h = build_closed_hamiltonian(&params)?;
    let basis = diagonalize(&h)?;
    let gamma = gamma_matrix(&basis);

    if !params.weak_drive() {
        eprintln!(
            "warning: drive amplitude is not small against the couplings; \
             the single-photon truncation may not hold"
        );
    }
    let advance = tangle4::dynamics::phase_advance_per_step(&params, &basis, &integrator);
    if advance > 0.5 {
        eprintln!(
            "warning: phase advance per step is {advance:.2} rad; \
             reduce --dt for a trustworthy integration"
        );
    }

    let traj = evolve(&basis, &gamma, &params, &init, &integrator)?;
    let series = tangle_series(&traj)?;
    let convergence_deviation = if cfg.integrator.convergence_check {
        Some(convergence_probe(&basis, &gamma, &params, &init, &integrator)?)
    } else {
        None
    };

    let (period, period_note) = match extract_period(&series, &detection) {
        Ok(est) => (Some(est), None),
        Err(CoreError::NoPeriodicity { minima }) => (
            None,
            Some(format!(
                "no periodicity detected: {minima} qualifying minima (need at least 2)"
            )),
        ),
        Err(other) => return Err(other.into()),
    };

    fs::create_dir_all(&args.common.out)?;
    let out = &args.common.out;
    for kind in &cfg.outputs {
        match kind {
            OutputKind::Series => output::write_series_csv(&out.join("series.csv"), &series)?,
            OutputKind::Trajectory => {
                output::write_trajectory_csv(&out.join("trajectory.csv"), &traj)?
            }
            OutputKind::Spectrum => output::write_spectrum_csv(&out.join("spectrum.csv"), &basis)?,
        }
    }

    let report = RunReport {
        config: &cfg,
        samples: series.len(),
        dt_s: integrator.dt,
        t_end_s: integrator.t_end,
        phase_advance_per_step_rad: advance,
        weak_drive: params.weak_drive(),
        convergence_deviation,
        norm_deviation_max: traj.max_norm_deviation(),
        peak_tangle: tangle4::tangle::clamp_reported(series.max_value()),
        min_tangle: series.min_value(),
        period: period.as_ref(),
        period_note: period_note.as_deref(),
    };
    output::write_run_json(&out.join("run.json"), &report)?;

    println!(
        "run: {} samples over {:.6} us, peak tangle {:.6e}",
        series.len(),
        integrator.t_end * 1e6,
        report.peak_tangle
    );
    match (&period, &period_note) {
        (Some(est), _) => println!(
            "period: {:.6} us from {} minima (reliable: {})",
            est.tau * 1e6,
            est.minima_times.len(),
            est.reliable
        ),
        (None, Some(note)) => println!("period: none ({note})"),
        (None, None) => unreachable!("missing period always carries a note"),
    }
    if let Some(dev) = convergence_deviation {
        println!("convergence probe: max tangle deviation {dev:.3e} at half step");
    }
    println!("wrote {}", out.join("run.json").display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    reject_seedless(&args.common)?;
    init_workers(&args.common)?;

    let text = read_config_text(&args.config)?;
    let mut cfg: SweepConfigFile = config::parse_sweep_config(&text)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))?;
    apply_overrides(&mut cfg.integrator, &args.common)?;

    let lambda_values = cfg.grid.lambda.expand().map_err(Failure::Config)?;
    let eta_l_values: Vec<f64> = cfg
        .grid
        .coupling_l
        .expand()
        .map_err(Failure::Config)?
        .into_iter()
        .map(angular)
        .collect();

    let grid = SweepGrid {
        lambda_values,
        eta_l_values,
        eta_r_override: cfg.grid.coupling_r.map(|f| angular(f.0)),
        fixed: cfg.system.to_params(),
        init: cfg.initial_state.to_initial_state().map_err(Failure::Config)?,
        integrator: cfg.integrator.to_config(),
        detection: cfg.detection.to_detection(),
    };

    let result = run_sweep(&grid)?;
    let histogram = bin_histogram(&result, cfg.histogram_bin_width)?;

    fs::create_dir_all(&args.common.out)?;
    let out = &args.common.out;
    output::write_sweep_csv(&out.join("sweep.csv"), &result)?;
    output::write_histogram_csv(&out.join("histogram.csv"), &histogram)?;
    output::write_contour_csv(&out.join("contour.csv"), &result)?;
    output::write_sweep_errors_json(&out.join("sweep_errors.json"), &result)?;

    let total = result.points.len();
    let flagged = result.flagged().count();
    println!(
        "sweep: {} x {} grid, {} points, {} flagged",
        result.lambda_values.len(),
        result.eta_l_values.len(),
        total,
        flagged
    );
    match histogram.argmax().filter(|bin| bin.count > 0) {
        Some(bin) => println!(
            "histogram argmax: lambda bin [{:.3}, {:.3}) with summed period {:.6} us over {} points",
            bin.lambda_lo,
            bin.lambda_lo + histogram.bin_width,
            bin.summed_period * 1e6,
            bin.count
        ),
        None => println!("histogram: no periodic points"),
    }
    println!("wrote {}", out.join("sweep.csv").display());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), Failure> {
    let data_dir = &args.dir;
    if !data_dir.is_dir() {
        return Err(Failure::Config(format!(
            "{} is not a directory",
            data_dir.display()
        )));
    }
    let out_dir = args.out.as_deref().unwrap_or(data_dir);
    fs::create_dir_all(out_dir)?;
    let written = report::emit_scripts(data_dir, out_dir)?;
    if written.is_empty() {
        return Err(Failure::Config(format!(
            "no plottable data in {}; expected any of series.csv, sweep.csv, histogram.csv, contour.csv",
            data_dir.display()
        )));
    }
    for script in &written {
        println!("wrote {}", out_dir.join(script).display());
    }
    Ok(())
}
