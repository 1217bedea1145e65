//! Truncated Hilbert space of three qubits and a single cavity mode.
//!
//! The cavity is restricted to photon numbers {0, 1}, so the composite space
//! has dimension 16. A basis state |phi_m, n> is labelled by the qubit
//! configuration m (a 3-bit string with qubit L the most significant bit and
//! qubit R the least significant) and the photon number n. States are stored
//! flat with index i = 2 m + n, which makes the four two-level subsystems
//! correspond to the four bits of i: L, M, R, cavity from high to low.

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64, ZERO};

/// Total dimension of the truncated space.
pub const DIM: usize = 16;
/// Number of three-qubit configurations.
pub const QUBIT_CONFIGS: usize = 8;

/// Label (m, n) of a bare basis state |phi_m, n>.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BareIndex {
    pub m: usize,
    pub n: usize,
}

impl BareIndex {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m >= QUBIT_CONFIGS || n >= 2 {
            return Err(Error::InvalidIndex { m, n });
        }
        Ok(Self { m, n })
    }

    pub fn flat(self) -> usize {
        2 * self.m + self.n
    }
}

/// Flat storage index of |phi_m, n>.
pub fn flat_index(m: usize, n: usize) -> Result<usize> {
    BareIndex::new(m, n).map(BareIndex::flat)
}

/// Inverse of `flat_index`.
pub fn split_index(i: usize) -> BareIndex {
    assert!(i < DIM, "flat index {i} out of range");
    BareIndex { m: i / 2, n: i % 2 }
}

/// One of the four two-level subsystems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    L,
    M,
    R,
    Cavity,
}

impl Site {
    pub const ALL: [Site; 4] = [Site::L, Site::M, Site::R, Site::Cavity];

    /// Bit position of this site inside a flat basis index.
    pub fn bit(self) -> u8 {
        match self {
            Site::L => 3,
            Site::M => 2,
            Site::R => 1,
            Site::Cavity => 0,
        }
    }
}

/// Nonempty proper subset of the four sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsystemMask(u8);

impl SubsystemMask {
    pub fn new(sites: &[Site]) -> Result<Self> {
        let mut bits = 0u8;
        for &s in sites {
            bits |= 1 << s.bit();
        }
        Self::from_bits(bits)
    }

    pub fn from_bits(bits: u8) -> Result<Self> {
        if bits == 0 || bits >= 0b1111 {
            return Err(Error::InvalidMask { mask: bits });
        }
        Ok(Self(bits))
    }

    pub fn single(site: Site) -> Self {
        Self(1 << site.bit())
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn contains(self, site: Site) -> bool {
        self.0 & (1 << site.bit()) != 0
    }

    pub fn complement(self) -> Self {
        Self(!self.0 & 0b1111)
    }

    /// Sites in the mask, most significant first.
    pub fn sites(self) -> Vec<Site> {
        Site::ALL.iter().copied().filter(|s| self.contains(*s)).collect()
    }

    /// All 14 nonempty proper subsets, grouped by size 1, 2, 3.
    pub fn enumerate_proper() -> Vec<SubsystemMask> {
        let mut out: Vec<SubsystemMask> = (1u8..0b1111).map(SubsystemMask).collect();
        out.sort_by_key(|m| (m.len(), m.bits()));
        out
    }
}

/// Normalized pure state on the 16-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: [C64; DIM],
}

impl PureState {
    /// Requires normalization within 1e-9.
    pub fn new(amps: [C64; DIM]) -> Result<Self> {
        Self::with_norm_tolerance(amps, 1e-9)
    }

    /// Same as `new` with a caller-chosen normalization tolerance.
    pub fn with_norm_tolerance(amps: [C64; DIM], tol: f64) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let deviation = (norm - 1.0).abs();
        if !deviation.is_finite() || deviation > tol {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { amps })
    }

    /// State with the given nonzero amplitudes; all others are zero.
    pub fn from_amplitudes(pairs: &[(BareIndex, C64)]) -> Result<Self> {
        let mut amps = [ZERO; DIM];
        for &(idx, a) in pairs {
            amps[idx.flat()] = a;
        }
        Self::new(amps)
    }

    /// Single bare basis state |phi_m, n>.
    pub fn basis_state(idx: BareIndex) -> Self {
        let mut amps = [ZERO; DIM];
        amps[idx.flat()] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[C64; DIM] {
        &self.amps
    }

    pub fn amplitude(&self, idx: BareIndex) -> C64 {
        self.amps[idx.flat()]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Reduced density matrix on a subset of sites, row-major.
///
/// Row/column indices enumerate the kept sites' bits ordered as in the flat
/// index (L, M, R, cavity from high to low).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// tr(rho^2); equals sum of |entries|^2 for a Hermitian matrix.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Checks hermiticity (1e-12), unit trace (1e-10), and positivity
    /// (eigenvalues above -1e-10). Meant for tests and debugging; the hot
    /// path trusts `partial_trace`, which is Hermitian by construction.
    pub fn validate(&self) -> Result<()> {
        let m = self.as_cmat();
        let dev = m.hermiticity_deviation();
        if dev > 1e-12 {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { deviation: (tr - 1.0).abs() });
        }
        let eig = m.hermitian_eigen()?;
        if let Some(&min) = eig.values.first() {
            if min < -1e-10 {
                return Err(Error::NotPositive { min_eigenvalue: min });
            }
        }
        Ok(())
    }

    pub fn as_cmat(&self) -> CMat {
        CMat::from_fn(self.dim, |i, j| self.get(i, j))
    }
}

/// Flat indices composing a sub-index over `mask` with a sub-index over the
/// complement: `keep_map[r] | trace_map[t]` is a full basis index.
pub(crate) fn index_maps(mask: SubsystemMask) -> (Vec<usize>, Vec<usize>) {
    let build = |bits: u8| -> Vec<usize> {
        let positions: Vec<u8> = (0..4).rev().filter(|&b| bits & (1 << b) != 0).collect();
        let d = 1usize << positions.len();
        (0..d)
            .map(|sub| {
                positions
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (slot, &pos)| {
                        let bit = (sub >> (positions.len() - 1 - slot)) & 1;
                        acc | (bit << pos)
                    })
            })
            .collect()
    };
    (build(mask.bits()), build(mask.complement().bits()))
}

/// Reduced state of `keep`, tracing out the complementary sites.
pub fn partial_trace(state: &PureState, keep: SubsystemMask) -> DensityMatrix {
    let (keep_map, trace_map) = index_maps(keep);
    let d = keep_map.len();
    let amps = state.amplitudes();
    let mut data = vec![ZERO; d * d];
    for r in 0..d {
        for c in r..d {
            let mut acc = ZERO;
            for &t in &trace_map {
                acc += amps[keep_map[r] | t] * amps[keep_map[c] | t].conj();
            }
            data[r * d + c] = acc;
            if r != c {
                data[c * d + r] = acc.conj();
            }
        }
    }
    DensityMatrix { dim: d, data }
}
