//! Closed-system Hamiltonian and its dressed eigenbasis.
//!
//! H0 counts the cavity photon and the qubit inversions; the interaction
//! exchanges one excitation between the cavity and each qubit within the
//! rotating-wave approximation. The single-photon truncation drops the
//! (two-photon) image of a^dag sigma_- acting on |phi_m, 1>, which is the
//! price of the 16-dimensional space and is negligible in the weak-drive
//! regime this crate targets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{flat_index, split_index, DIM, QUBIT_CONFIGS};
use crate::linalg::{CMat, C64};

/// How the qubit inversion enters H0: `Half` uses (Omega/2) sigma_z so Omega
/// is the transition frequency; `Full` uses Omega sigma_z verbatim, making
/// the transition 2 Omega.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZConvention {
    #[default]
    Half,
    Full,
}

/// Closed-system and drive parameters, all angular frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Cavity mode frequency omega_c.
    pub omega_c: f64,
    /// Qubit frequencies Omega_L, Omega_M, Omega_R.
    pub omega_l: f64,
    pub omega_m: f64,
    pub omega_r: f64,
    /// Qubit-cavity couplings eta_L, eta_M, eta_R.
    pub eta_l: f64,
    pub eta_m: f64,
    pub eta_r: f64,
    /// External drive amplitude epsilon_D and frequency omega_D.
    pub epsilon_d: f64,
    pub omega_d: f64,
    pub z_convention: ZConvention,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_c", self.omega_c),
            ("omega_l", self.omega_l),
            ("omega_m", self.omega_m),
            ("omega_r", self.omega_r),
            ("omega_d", self.omega_d),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        let nonneg = [
            ("eta_l", self.eta_l),
            ("eta_m", self.eta_m),
            ("eta_r", self.eta_r),
            ("epsilon_d", self.epsilon_d),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Coupling ratio lambda = eta_M / eta_L.
    pub fn lambda(&self) -> f64 {
        self.eta_m / self.eta_l
    }

    /// True when the drive is weak against the strongest coupling, the
    /// regime in which the single-photon truncation is trustworthy.
    pub fn weak_drive(&self) -> bool {
        let eta_max = self.eta_l.max(self.eta_m).max(self.eta_r);
        self.epsilon_d <= 0.1 * eta_max
    }

    fn qubit_term(&self, omega: f64) -> f64 {
        match self.z_convention {
            ZConvention::Half => 0.5 * omega,
            ZConvention::Full => omega,
        }
    }
}

/// Drive-free Hamiltonian H0 + H_int on the bare basis, in rad/s.
pub fn build_closed_hamiltonian(params: &SystemParams) -> Result<CMat> {
    params.validate()?;
    let mut h = CMat::zeros(DIM);
    let qubits = [
        (2u8, params.omega_l, params.eta_l),
        (1u8, params.omega_m, params.eta_m),
        (0u8, params.omega_r, params.eta_r),
    ];
    for m in 0..QUBIT_CONFIGS {
        for n in 0..2 {
            let i = flat_index(m, n)?;
            let mut diag = params.omega_c * n as f64;
            for &(bit, omega, _) in &qubits {
                let sign = if m & (1 << bit) != 0 { 1.0 } else { -1.0 };
                diag += sign * params.qubit_term(omega);
            }
            h[(i, i)] = C64::new(diag, 0.0);
        }
        // a sigma_+ : |phi_m, 1> -> |phi_{m + 2^bit}, 0> for an unexcited qubit.
        for &(bit, _, eta) in &qubits {
            if m & (1 << bit) == 0 {
                let from = flat_index(m, 1)?;
                let to = flat_index(m | (1 << bit), 0)?;
                h[(to, from)] += C64::new(eta, 0.0);
                h[(from, to)] += C64::new(eta, 0.0);
            }
        }
    }
    Ok(h)
}

/// Dressed eigenbasis of the drive-free Hamiltonian.
///
/// Row k of `alpha` holds the bare-basis coefficients of dressed state
/// |u_k>, ordered by ascending energy.
#[derive(Debug, Clone)]
pub struct DressedBasis {
    energies: Vec<f64>,
    alpha: CMat,
}

impl DressedBasis {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Bare-basis coefficient alpha^(k)_{m,n} as alpha[(k, flat_index(m, n))].
    pub fn alpha(&self) -> &CMat {
        &self.alpha
    }

    pub fn energy_span(&self) -> f64 {
        self.energies[DIM - 1] - self.energies[0]
    }

    /// Dressed coefficients c_k = <u_k|psi> of a bare-amplitude vector.
    pub fn project(&self, bare: &[C64; DIM]) -> [C64; DIM] {
        let mut c = [C64::new(0.0, 0.0); DIM];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (0..DIM).map(|i| self.alpha[(k, i)].conj() * bare[i]).sum();
        }
        c
    }

    /// Mean excitation number of dressed state k; integer-valued for the
    /// drive-free Hamiltonian, which conserves excitation number.
    pub fn excitation_number(&self, k: usize) -> f64 {
        (0..DIM)
            .map(|i| {
                let idx = split_index(i);
                let n_exc = (idx.m.count_ones() + idx.n as u32) as f64;
                n_exc * self.alpha[(k, i)].norm_sqr()
            })
            .sum()
    }
}

/// Diagonalizes the drive-free Hamiltonian into a dressed basis.
///
/// Fails if the eigensolver stalls or the result is not trustworthy:
/// eigen-residual above 1e-10 times the spectral norm, or basis unitarity
/// off by more than 1e-12.
pub fn diagonalize(h: &CMat) -> Result<DressedBasis> {
    assert_eq!(h.dim(), DIM, "dressed basis is defined on the full space");
    let eig = h.hermitian_eigen()?;
    let spectral = eig
        .values
        .iter()
        .fold(0.0f64, |acc, &e| acc.max(e.abs()));
    let residual = eig.max_residual(h);
    let bound = 1e-10 * spectral;
    if residual > bound {
        return Err(Error::EigenResidual { residual, bound });
    }
    let unit = eig.unitarity_deviation();
    if unit > 1e-12 {
        return Err(Error::BasisNotUnitary { deviation: unit });
    }
    let alpha = CMat::from_fn(DIM, |k, i| eig.vectors[(i, k)]);
    Ok(DressedBasis { energies: eig.values, alpha })
}

/// Photon-exchange matrix gamma_jk = <u_j| a |u_k> in the dressed basis.
#[derive(Debug, Clone)]
pub struct GammaMatrix {
    g: CMat,
}

impl GammaMatrix {
    pub fn entry(&self, j: usize, k: usize) -> C64 {
        self.g[(j, k)]
    }

    pub fn as_cmat(&self) -> &CMat {
        &self.g
    }

    /// Sum of |gamma_jk|^2; equals the number of single-photon basis states
    /// (8) for any unitary dressed basis.
    pub fn frobenius_sq(&self) -> f64 {
        let n = self.g.frobenius_norm();
        n * n
    }
}

/// gamma_jk = sum_m conj(alpha^(j)_{m,0}) alpha^(k)_{m,1}.
pub fn gamma_matrix(basis: &DressedBasis) -> GammaMatrix {
    let alpha = basis.alpha();
    let g = CMat::from_fn(DIM, |j, k| {
        (0..QUBIT_CONFIGS)
            .map(|m| alpha[(j, 2 * m)].conj() * alpha[(k, 2 * m + 1)])
            .sum()
    });
    GammaMatrix { g }
}
