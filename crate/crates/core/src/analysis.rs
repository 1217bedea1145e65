//! Revival statistics and coupling-ratio sweeps.
//!
//! The tangle of a driven run collapses near zero and revives periodically;
//! the revival period tau is read off the gaps between near-zero minima.
//! Sweeps scan the coupling ratio lambda = eta_M / eta_L against the outer
//! coupling eta_L (= eta_R) and aggregate the periods into a histogram over
//! lambda.
//!
//! Couplings realize lambda geometrically: a qubit at position x along a
//! cavity of length L sees eta(x) = eta_max |cos(2 pi x / L)|. Note the pure
//! cosine profile puts the often-quoted operating point x = 4.53 mm on a
//! 24 mm resonator at lambda ≈ 0.375, several percent above the histogram
//! peak near 0.35; treat quoted positions as rounded.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, InitialState, IntegratorConfig};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_closed_hamiltonian, diagonalize, gamma_matrix, SystemParams};
use crate::tangle::{tangle_series, TangleSeries};

/// Knobs for minima/peak detection on a tangle series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeakDetection {
    /// A minimum qualifies when below this fraction of the series maximum.
    pub zero_threshold: f64,
    /// Minima (or peaks) closer than this are merged, seconds.
    pub min_separation: f64,
}

impl Default for PeakDetection {
    fn default() -> Self {
        Self { zero_threshold: 0.02, min_separation: 10.0e-9 }
    }
}

impl PeakDetection {
    pub fn validate(&self) -> Result<()> {
        if !(self.zero_threshold > 0.0 && self.zero_threshold < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "zero_threshold must be in (0, 1), got {}",
                self.zero_threshold
            )));
        }
        if !(self.min_separation >= 0.0 && self.min_separation.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "min_separation must be nonnegative, got {}",
                self.min_separation
            )));
        }
        Ok(())
    }
}

/// Revival statistics of one tangle series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodEstimate {
    /// Mean gap between consecutive qualifying minima, seconds.
    pub tau: f64,
    /// Times of the qualifying minima, seconds.
    pub minima_times: Vec<f64>,
    /// Global maximum of the series.
    pub peak_value: f64,
    /// Time of the first local maximum exceeding 90% of the global max.
    pub rise_time: f64,
    /// (max gap - min gap) / tau; zero when only one gap exists.
    pub spread: f64,
    /// True when the spread stays within 20%.
    pub reliable: bool,
    /// Mean gap between dominant revival peaks, when at least two exist.
    /// Independent of the minima route; kept for comparison.
    pub tau_peak_to_peak: Option<f64>,
}

/// Indices of interior local extrema that pass `is_candidate`. Runs of
/// candidates whose consecutive spacing stays below `min_separation` count as
/// one extremum, represented by the best member; this keeps sampling noise
/// inside a single valley (or plateau) from splitting it in two.
fn detect_extrema(
    times: &[f64],
    values: &[f64],
    is_candidate: impl Fn(usize) -> bool,
    better: impl Fn(f64, f64) -> bool,
    min_separation: f64,
) -> Vec<usize> {
    let mut picked: Vec<usize> = Vec::new();
    let mut last_candidate: Option<usize> = None;
    for k in 1..values.len().saturating_sub(1) {
        if !is_candidate(k) {
            continue;
        }
        match last_candidate {
            Some(prev) if times[k] - times[prev] < min_separation => {
                let rep = picked.last_mut().expect("cluster exists once a candidate was seen");
                if better(values[k], values[*rep]) {
                    *rep = k;
                }
            }
            _ => picked.push(k),
        }
        last_candidate = Some(k);
    }
    picked
}

/// Extracts the revival period from a tangle series.
///
/// Fails with `NoPeriodicity` when fewer than two qualifying minima exist,
/// e.g. for series that never collapse near zero.
pub fn extract_period(series: &TangleSeries, detection: &PeakDetection) -> Result<PeriodEstimate> {
    detection.validate()?;
    let times = series.times();
    let values = series.values();
    if values.len() < 3 {
        return Err(Error::NoPeriodicity { minima: 0 });
    }

    let peak_value = series.max_value();
    let rise_level = 0.9 * peak_value;
    let last = values.len() - 1;
    let rise_idx = (0..values.len())
        .find(|&k| {
            values[k] > rise_level
                && (k == 0 || values[k] >= values[k - 1])
                && (k == last || values[k] >= values[k + 1])
        })
        .unwrap_or(0);
    let rise_time = times[rise_idx];

    let zero_level = detection.zero_threshold * peak_value;
    let minima = detect_extrema(
        times,
        values,
        |k| values[k] <= values[k - 1] && values[k] <= values[k + 1] && values[k] < zero_level,
        |new, old| new < old,
        detection.min_separation,
    );
    if minima.len() < 2 {
        return Err(Error::NoPeriodicity { minima: minima.len() });
    }
    let minima_times: Vec<f64> = minima.iter().map(|&k| times[k]).collect();
    let gaps: Vec<f64> = minima_times.windows(2).map(|w| w[1] - w[0]).collect();
    let tau = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let spread = if gaps.len() < 2 {
        0.0
    } else {
        let max = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        (max - min) / tau
    };

    let peak_level = 0.5 * peak_value;
    let peaks = detect_extrema(
        times,
        values,
        |k| values[k] >= values[k - 1] && values[k] >= values[k + 1] && values[k] > peak_level,
        |new, old| new > old,
        detection.min_separation,
    );
    let tau_peak_to_peak = (peaks.len() >= 2).then(|| {
        let first = times[peaks[0]];
        let last = times[*peaks.last().unwrap()];
        (last - first) / (peaks.len() - 1) as f64
    });

    Ok(PeriodEstimate {
        tau,
        minima_times,
        peak_value,
        rise_time,
        spread,
        reliable: spread <= 0.2,
        tau_peak_to_peak,
    })
}

/// Cartesian sweep over lambda (outer) and eta_L (inner).
///
/// Per point, eta_L applies to qubits L and R (unless overridden) and
/// eta_M = lambda * eta_L; everything else comes from `fixed`.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub lambda_values: Vec<f64>,
    /// rad/s.
    pub eta_l_values: Vec<f64>,
    /// Fixed eta_R in rad/s; `None` ties eta_R to eta_L.
    pub eta_r_override: Option<f64>,
    pub fixed: SystemParams,
    pub init: InitialState,
    pub integrator: IntegratorConfig,
    pub detection: PeakDetection,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_values.is_empty() {
            return Err(Error::EmptyGrid("no lambda values".into()));
        }
        if self.eta_l_values.is_empty() {
            return Err(Error::EmptyGrid("no eta_L values".into()));
        }
        for &l in &self.lambda_values {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::InvalidConfig(format!("lambda {l} outside [0, 1]")));
            }
        }
        for &e in &self.eta_l_values {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidConfig(format!("eta_L must be positive, got {e}")));
            }
        }
        self.integrator.validate()?;
        self.detection.validate()?;
        self.params_at(self.lambda_values[0], self.eta_l_values[0]).validate()
    }

    pub fn params_at(&self, lambda: f64, eta_l: f64) -> SystemParams {
        let mut p = self.fixed;
        p.eta_l = eta_l;
        p.eta_r = self.eta_r_override.unwrap_or(eta_l);
        p.eta_m = lambda * eta_l;
        p
    }
}

/// One grid point's outcome. `peak_tangle`/`min_tangle` are `None` only when
/// the run itself failed; `period` is additionally `None` when the series
/// shows no extractable periodicity. Either condition leaves a note.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub lambda: f64,
    /// rad/s.
    pub eta_l: f64,
    pub peak_tangle: Option<f64>,
    pub min_tangle: Option<f64>,
    pub period: Option<PeriodEstimate>,
    pub note: Option<String>,
}

/// All grid points in row-major order (lambda outer, eta_L inner).
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub lambda_values: Vec<f64>,
    pub eta_l_values: Vec<f64>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Points whose simulation or extraction left a note.
    pub fn flagged(&self) -> impl Iterator<Item = &SweepPoint> {
        self.points.iter().filter(|p| p.note.is_some())
    }
}

fn run_point(grid: &SweepGrid, lambda: f64, eta_l: f64) -> SweepPoint {
    let params = grid.params_at(lambda, eta_l);
    let series: Result<TangleSeries> = (|| {
        let h = build_closed_hamiltonian(&params)?;
        let basis = diagonalize(&h)?;
        let gamma = gamma_matrix(&basis);
        let traj = evolve(&basis, &gamma, &params, &grid.init, &grid.integrator)?;
        tangle_series(&traj)
    })();
    match series {
        Err(e) => SweepPoint {
            lambda,
            eta_l,
            peak_tangle: None,
            min_tangle: None,
            period: None,
            note: Some(format!("run failed: {e}")),
        },
        Ok(series) => {
            let peak = series.max_value();
            let min = series.min_value();
            match extract_period(&series, &grid.detection) {
                Ok(est) => SweepPoint {
                    lambda,
                    eta_l,
                    peak_tangle: Some(peak),
                    min_tangle: Some(min),
                    period: Some(est),
                    note: None,
                },
                Err(e) => SweepPoint {
                    lambda,
                    eta_l,
                    peak_tangle: Some(peak),
                    min_tangle: Some(min),
                    period: None,
                    note: Some(format!("no period: {e}")),
                },
            }
        }
    }
}

/// Runs every grid point, in parallel, and returns them in deterministic
/// row-major order. Individual failures are recorded, not fatal.
pub fn run_sweep(grid: &SweepGrid) -> Result<SweepResult> {
    grid.validate()?;
    let tasks: Vec<(usize, f64, f64)> = grid
        .lambda_values
        .iter()
        .flat_map(|&l| grid.eta_l_values.iter().map(move |&e| (l, e)))
        .enumerate()
        .map(|(i, (l, e))| (i, l, e))
        .collect();
    let mut computed: Vec<(usize, SweepPoint)> = tasks
        .par_iter()
        .map(|&(i, l, e)| (i, run_point(grid, l, e)))
        .collect();
    computed.sort_by_key(|&(i, _)| i);
    Ok(SweepResult {
        lambda_values: grid.lambda_values.clone(),
        eta_l_values: grid.eta_l_values.clone(),
        points: computed.into_iter().map(|(_, p)| p).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lambda_lo: f64,
    /// Sum of reliable periods in this bin, seconds.
    pub summed_period: f64,
    pub count: usize,
}

/// Periods summed per lambda bin; unreliable or failed points are excluded
/// from the bins and only counted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub bins: Vec<HistogramBin>,
    pub excluded: usize,
}

impl Histogram {
    /// Bin with the largest summed period; first wins ties.
    pub fn argmax(&self) -> Option<&HistogramBin> {
        self.bins
            .iter()
            .reduce(|best, b| if b.summed_period > best.summed_period { b } else { best })
    }
}

/// Aggregates reliable periods into lambda bins of `bin_width`.
///
/// A record at lambda falls into bin floor(lambda / width); the tiny epsilon
/// keeps on-grid values exactly at a bin edge in the upper bin.
pub fn bin_histogram(result: &SweepResult, bin_width: f64) -> Result<Histogram> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::InvalidConfig(format!("bin width must be positive, got {bin_width}")));
    }
    let bin_of = |lambda: f64| (lambda / bin_width + 1e-9).floor() as usize;
    let max_bin = result
        .points
        .iter()
        .map(|p| bin_of(p.lambda))
        .max()
        .ok_or_else(|| Error::EmptyGrid("no sweep points to bin".into()))?;
    let mut bins: Vec<HistogramBin> = (0..=max_bin)
        .map(|k| HistogramBin {
            lambda_lo: k as f64 * bin_width,
            summed_period: 0.0,
            count: 0,
        })
        .collect();
    let mut excluded = 0usize;
    for p in &result.points {
        match &p.period {
            Some(est) if est.reliable => {
                let bin = &mut bins[bin_of(p.lambda)];
                bin.summed_period += est.tau;
                bin.count += 1;
            }
            _ => excluded += 1,
        }
    }
    Ok(Histogram { bin_width, bins, excluded })
}

/// Coupling strength of a qubit at position `x_m` along a cavity of length
/// `cavity_length_m`: eta_max |cos(2 pi x / L)|, restricted to the first
/// quarter wavelength where the profile falls monotonically.
pub fn coupling_from_position(x_m: f64, cavity_length_m: f64, eta_max: f64) -> Result<f64> {
    if !(cavity_length_m > 0.0 && cavity_length_m.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "cavity length must be positive, got {cavity_length_m}"
        )));
    }
    if !(eta_max >= 0.0 && eta_max.is_finite()) {
        return Err(Error::InvalidParams(format!("eta_max must be nonnegative, got {eta_max}")));
    }
    let max_m = cavity_length_m / 4.0;
    if !(0.0..=max_m).contains(&x_m) {
        return Err(Error::PositionOutOfRange { x_m, max_m });
    }
    Ok(eta_max * (std::f64::consts::TAU * x_m / cavity_length_m).cos().abs())
}
