//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("bare index out of range: qubit configuration {m}, photon number {n}")]
    InvalidIndex { m: usize, n: usize },

    #[error("subsystem mask must name a proper nonempty subset, got {mask:#06b}")]
    InvalidMask { mask: u8 },

    #[error("state is not normalized: |norm - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("matrix is not Hermitian: max |A - A^dag| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge after {sweeps} cyclic sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("eigen-residual {residual:.3e} exceeds the trust bound {bound:.3e}")]
    EigenResidual { residual: f64, bound: f64 },

    #[error("eigenbasis is not unitary: deviation {deviation:.3e}")]
    BasisNotUnitary { deviation: f64 },

    #[error("matrix has negative eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("norm drift {drift:.3e} at step {step} exceeds 1e-6; reduce the time step")]
    NormDrift { step: u64, drift: f64 },

    #[error("non-finite amplitude at step {step}; reduce the time step")]
    NonFinite { step: u64 },

    #[error("tangle series sample {index} is not normalized: |norm - 1| = {deviation:.3e}")]
    BadSample { index: usize, deviation: f64 },

    #[error("no periodicity detected: {minima} qualifying minima (need at least 2)")]
    NoPeriodicity { minima: usize },

    #[error("position {x_m} m outside the first quarter wavelength [0, {max_m} m]")]
    PositionOutOfRange { x_m: f64, max_m: f64 },

    #[error("empty sweep grid: {0}")]
    EmptyGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
