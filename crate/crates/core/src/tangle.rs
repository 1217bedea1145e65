//! Residual four-party entanglement of pure states.
//!
//! The 4-tangle is the alternating sum, over all 14 nonempty proper subsets
//! S of the four sites, of the squared bipartite concurrence between S and
//! its complement: positive for singles and triples, negative for pairs,
//! halved overall. It vanishes on product and W-type states, reaches 1 on
//! GHZ-type states, and its defect from the single-site sum measures how
//! far the state sits from saturating entanglement monogamy.

use std::sync::OnceLock;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::hilbert::{index_maps, partial_trace, PureState, SubsystemMask, DIM};
use crate::linalg::{C64, ZERO};

/// Squared concurrence between `mask` and its complement,
/// 2 (1 - tr rho_mask^2).
pub fn concurrence_sq(state: &PureState, mask: SubsystemMask) -> f64 {
    2.0 * (1.0 - partial_trace(state, mask).purity())
}

struct SubsetPlan {
    sign: f64,
    keep_map: Vec<usize>,
    trace_map: Vec<usize>,
}

fn subset_plans() -> &'static [SubsetPlan] {
    static PLANS: OnceLock<Vec<SubsetPlan>> = OnceLock::new();
    PLANS.get_or_init(|| {
        SubsystemMask::enumerate_proper()
            .into_iter()
            .map(|mask| {
                let (keep_map, trace_map) = index_maps(mask);
                let sign = if mask.len() == 2 { -1.0 } else { 1.0 };
                SubsetPlan { sign, keep_map, trace_map }
            })
            .collect()
    })
}

/// tr(rho^2) of the reduced state, accumulated entry by entry without
/// materializing rho.
fn purity_fused(amps: &[C64; DIM], plan: &SubsetPlan) -> f64 {
    let d = plan.keep_map.len();
    let mut purity = 0.0;
    for r in 0..d {
        for c in r..d {
            let mut entry = ZERO;
            for &t in &plan.trace_map {
                entry += amps[plan.keep_map[r] | t] * amps[plan.keep_map[c] | t].conj();
            }
            let weight = if r == c { 1.0 } else { 2.0 };
            purity += weight * entry.norm_sqr();
        }
    }
    purity
}

fn four_tangle_amps(amps: &[C64; DIM]) -> f64 {
    let mut total = 0.0;
    for plan in subset_plans() {
        total += plan.sign * 2.0 * (1.0 - purity_fused(amps, plan));
    }
    0.5 * total
}

/// 4-tangle |H|^2 of a normalized pure state, by the full 14-subset
/// alternating sum.
pub fn four_tangle(state: &PureState) -> f64 {
    four_tangle_amps(state.amplitudes())
}

/// Algebraically identical form using complement symmetry: the single-site
/// concurrences minus the three distinct 2|2 partitions. Kept as an
/// independent cross-check of `four_tangle`, not a replacement.
pub fn four_tangle_collapsed(state: &PureState) -> f64 {
    use crate::hilbert::Site::{Cavity, L, M, R};
    let singles: f64 = [L, M, R, Cavity]
        .into_iter()
        .map(|s| concurrence_sq(state, SubsystemMask::single(s)))
        .sum();
    let partitions: f64 = [[L, M], [L, R], [L, Cavity]]
        .into_iter()
        .map(|pair| concurrence_sq(state, SubsystemMask::new(&pair).unwrap()))
        .sum();
    singles - partitions
}

/// Clamps the tiny negative values that floating-point cancellation can
/// leave in a quantity that is analytically nonnegative. Anything below
/// -1e-9 is left alone: that would be evidence of a real defect.
pub fn clamp_reported(value: f64) -> f64 {
    if value < 0.0 && value >= -1.0e-9 {
        0.0
    } else {
        value
    }
}

/// 4-tangle sampled along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TangleSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TangleSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(times.len(), values.len());
        Self { times, values }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates the 4-tangle at every stored sample of a trajectory.
///
/// Each sample must still be normalized within 1e-6; a violation names the
/// offending sample index.
pub fn tangle_series(traj: &Trajectory) -> Result<TangleSeries> {
    let mut values = Vec::with_capacity(traj.len());
    for (index, amps) in traj.bare().iter().enumerate() {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let deviation = (norm - 1.0).abs();
        if !deviation.is_finite() || deviation > 1e-6 {
            return Err(Error::BadSample { index, deviation });
        }
        values.push(four_tangle_amps(amps));
    }
    Ok(TangleSeries { times: traj.times().to_vec(), values })
}
