//! File emission. Every writer formats floats with a fixed precision so a
//! repeated invocation produces byte-identical files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use tangle4::tangle::clamp_reported;
use tangle4::{
    angular, DressedBasis, Histogram, PeriodEstimate, SweepResult, TangleSeries, Trajectory, DIM,
};

use crate::config::RunConfigFile;

fn mhz(rad_per_s: f64) -> f64 {
    rad_per_s / angular(1e6)
}

/// time_us,tangle — the reported tangle clamps the sub-1e-9 negative dust
/// floating-point cancellation leaves behind.
pub fn write_series_csv(path: &Path, series: &TangleSeries) -> io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "time_us,tangle")?;
    for (t, v) in series.times().iter().zip(series.values()) {
        writeln!(f, "{:.9},{:.9}", t * 1e6, clamp_reported(*v))?;
    }
    f.flush()
}

/// time_us plus the 16 bare populations, columns named pop_m{m}_n{n}.
pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    write!(f, "time_us")?;
    for i in 0..DIM {
        write!(f, ",pop_m{}_n{}", i / 2, i % 2)?;
    }
    writeln!(f)?;
    for (t, amps) in traj.times().iter().zip(traj.bare()) {
        write!(f, "{:.9}", t * 1e6)?;
        for a in amps {
            write!(f, ",{:.9}", a.norm_sqr())?;
        }
        writeln!(f)?;
    }
    f.flush()
}

/// level,energy_ghz,excitation — the dressed levels of the drive-free
/// Hamiltonian, ascending.
pub fn write_spectrum_csv(path: &Path, basis: &DressedBasis) -> io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "level,energy_ghz,excitation")?;
    for (k, &e) in basis.energies().iter().enumerate() {
        writeln!(f, "{},{:.9},{:.9}", k, e / angular(1e9), basis.excitation_number(k))?;
    }
    f.flush()
}

/// Everything a run decided and measured, including the effective
/// configuration (after command-line overrides) for exact re-running.
#[derive(Serialize)]
pub struct RunReport<'a> {
    pub config: &'a RunConfigFile,
    pub samples: usize,
    pub dt_s: f64,
    pub t_end_s: f64,
    pub phase_advance_per_step_rad: f64,
    pub weak_drive: bool,
    /// Largest 4-tangle deviation against a half-step rerun, when the
    /// convergence probe ran.
    pub convergence_deviation: Option<f64>,
    pub norm_deviation_max: f64,
    pub peak_tangle: f64,
    pub min_tangle: f64,
    pub period: Option<&'a PeriodEstimate>,
    pub period_note: Option<&'a str>,
}

pub fn write_run_json(path: &Path, report: &RunReport) -> io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, report)?;
    writeln!(f)?;
    f.flush()
}

/// lambda,eta_L_MHz,period_us,peak_tangle,reliable — one row per grid
/// point in deterministic row-major order; nan marks a missing quantity.
pub fn write_sweep_csv(path: &Path, result: &SweepResult) -> io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "lambda,eta_L_MHz,period_us,peak_tangle,reliable")?;
    for p in &result.points {
        let period = match &p.period {
            Some(est) => format!("{:.9}", est.tau * 1e6),
            None => "nan".into(),
        };
        let peak = match p.peak_tangle {
            Some(v) => format!("{:.9}", clamp_reported(v)),
            None => "nan".into(),
        };
        let reliable = p.period.as_ref().map(|est| est.reliable).unwrap_or(false);
        writeln!(f, "{:.6},{:.6},{},{},{}", p.lambda, mhz(p.eta_l), period, peak, reliable)?;
    }
    f.flush()
}

/// lambda_bin_lo,summed_period_us,count.
pub fn write_histogram_csv(path: &Path, histogram: &Histogram) -> io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "lambda_bin_lo,summed_period_us,count")?;
    for bin in &histogram.bins {
        writeln!(f, "{:.6},{:.9},{}", bin.lambda_lo, bin.summed_period * 1e6, bin.count)?;
    }
    f.flush()
}

/// log10 of the period (us) as a gnuplot nonuniform matrix: the first row
/// carries the column count and the eta_L values in MHz, each following
/// row starts with its lambda.
pub fn write_contour_csv(path: &Path, result: &SweepResult) -> io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    let ncols = result.eta_l_values.len();
    write!(f, "{ncols}")?;
    for &eta in &result.eta_l_values {
        write!(f, ",{:.6}", mhz(eta))?;
    }
    writeln!(f)?;
    for (i, &lambda) in result.lambda_values.iter().enumerate() {
        write!(f, "{lambda:.6}")?;
        for j in 0..ncols {
            match &result.points[i * ncols + j].period {
                Some(est) => write!(f, ",{:.9}", (est.tau * 1e6).log10())?,
                None => write!(f, ",nan")?,
            }
        }
        writeln!(f)?;
    }
    f.flush()
}

#[derive(Serialize)]
struct SweepError<'a> {
    lambda: f64,
    eta_l_mhz: f64,
    message: &'a str,
}

/// Per-point failures and extraction misses; always written, `[]` when the
/// whole grid went through cleanly.
pub fn write_sweep_errors_json(path: &Path, result: &SweepResult) -> io::Result<()> {
    let errors: Vec<SweepError> = result
        .flagged()
        .map(|p| SweepError {
            lambda: p.lambda,
            eta_l_mhz: mhz(p.eta_l),
            message: p.note.as_deref().unwrap_or(""),
        })
        .collect();
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, &errors)?;
    writeln!(f)?;
    f.flush()
}
