//! Simulation of distributed entanglement in a driven circuit-QED register:
//! three superconducting qubits exchanging a single microwave photon with a
//! common cavity mode under a weak external drive.
//!
//! The crate builds the closed-system Hamiltonian on the 16-dimensional
//! truncated Hilbert space (three qubits, cavity restricted to {0, 1}
//! photons), diagonalizes it into a dressed basis, integrates the driven
//! dynamics in that basis, and evaluates the residual multipartite
//! entanglement (4-tangle) of the resulting pure states. On top of that sit
//! revival-period extraction and batch parameter sweeps over the coupling
//! ratio lambda = eta_M / eta_L.
//!
//! All angular frequencies are in rad/s and times in seconds. Conversion
//! from ordinary frequencies (Hz) happens at the configuration boundary.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod hilbert;
pub mod linalg;
pub mod tangle;

pub use analysis::{
    bin_histogram, coupling_from_position, extract_period, run_sweep, Histogram, HistogramBin,
    PeakDetection, PeriodEstimate, SweepGrid, SweepPoint, SweepResult,
};
pub use dynamics::{convergence_probe, evolve, IntegratorConfig, InitialState, Trajectory};
pub use error::Error;
pub use hamiltonian::{
    build_closed_hamiltonian, diagonalize, gamma_matrix, DressedBasis, GammaMatrix, SystemParams,
    ZConvention,
};
pub use hilbert::{
    flat_index, split_index, BareIndex, DensityMatrix, PureState, Site, SubsystemMask, DIM,
    QUBIT_CONFIGS,
};
pub use linalg::{CMat, C64};
pub use tangle::{concurrence_sq, four_tangle, four_tangle_collapsed, tangle_series, TangleSeries};

/// Angular frequency (rad/s) of an ordinary frequency given in Hz.
pub fn angular(f_hz: f64) -> f64 {
    std::f64::consts::TAU * f_hz
}
