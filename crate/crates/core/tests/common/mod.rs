//! Shared helpers for the integration-test binaries: the reference
//! operating point and two independently coded propagation oracles.

#![allow(dead_code)]

use num_complex::Complex64 as C64;
use tangle4::{
    angular, build_closed_hamiltonian, diagonalize, evolve, gamma_matrix, InitialState,
    IntegratorConfig, SystemParams, ZConvention, DIM,
};

pub const ZERO: C64 = C64::new(0.0, 0.0);

/// Homogeneous-coupling operating point the study revolves around.
pub fn reference_params() -> SystemParams {
    SystemParams {
        omega_c: angular(6.13e9),
        omega_l: angular(6.112e9),
        omega_m: angular(6.111e9),
        omega_r: angular(6.112e9),
        eta_l: angular(300.0e6),
        eta_m: angular(300.0e6),
        eta_r: angular(300.0e6),
        epsilon_d: angular(200.0e3),
        omega_d: angular(6.11e9),
        z_convention: ZConvention::Half,
    }
}

/// Lab-frame Hamiltonian at time `t`, built directly from the definition
/// with explicit bit arithmetic (flat index = 2 m + n; qubit bits of m:
/// L = 4, M = 2, R = 1).
pub fn lab_hamiltonian(p: &SystemParams, t: f64) -> [[C64; DIM]; DIM] {
    let mut h = [[ZERO; DIM]; DIM];
    let qubits = [(4usize, p.omega_l, p.eta_l), (2, p.omega_m, p.eta_m), (1, p.omega_r, p.eta_r)];
    for m in 0..8usize {
        for n in 0..2usize {
            let i = 2 * m + n;
            let mut e = p.omega_c * n as f64;
            for &(bit, omega, _) in &qubits {
                let sign = if m & bit != 0 { 1.0 } else { -1.0 };
                e += match p.z_convention {
                    ZConvention::Half => 0.5 * sign * omega,
                    ZConvention::Full => sign * omega,
                };
            }
            h[i][i] = C64::new(e, 0.0);
        }
        for &(bit, _, eta) in &qubits {
            if m & bit == 0 {
                // a sigma_+ : |m, 1> -> |m + bit, 0>, plus the conjugate.
                let from = 2 * m + 1;
                let to = 2 * (m | bit);
                h[to][from] += C64::new(eta, 0.0);
                h[from][to] += C64::new(eta, 0.0);
            }
        }
    }
    // Drive i eps (a^dag e^{-i w t} - a e^{+i w t}).
    let up = C64::new(0.0, p.epsilon_d) * C64::new(0.0, -p.omega_d * t).exp();
    for m in 0..8usize {
        h[2 * m + 1][2 * m] += up;
        h[2 * m][2 * m + 1] += up.conj();
    }
    h
}

/// One sub-step of exp(-i H dt) applied by its Taylor series; converges in a
/// handful of terms because |H| dt stays near 1e-3.
pub fn expm_step(h: &[[C64; DIM]; DIM], dt: f64, psi: &mut [C64; DIM]) {
    let mut term = *psi;
    let mut result = *psi;
    for k in 1..60 {
        let mut next = [ZERO; DIM];
        for (r, row) in h.iter().enumerate() {
            let mut acc = ZERO;
            for (c, &v) in row.iter().enumerate() {
                acc += v * term[c];
            }
            // (-i dt / k) H term
            next[r] = C64::new(0.0, -dt / k as f64) * acc;
        }
        term = next;
        for (r, &v) in term.iter().enumerate() {
            result[r] += v;
        }
        let size: f64 = term.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if size < 1e-18 {
            break;
        }
    }
    *psi = result;
}

/// Largest amplitude deviation after aligning the global phase on the
/// largest component; states are rays, so the comparison must be too.
pub fn ray_distance(a: &[C64; DIM], b: &[C64; DIM]) -> f64 {
    let pivot = (0..DIM)
        .max_by(|&i, &j| a[i].norm_sqr().total_cmp(&a[j].norm_sqr()))
        .unwrap();
    let phase = if b[pivot].norm() > 1e-12 {
        a[pivot] / b[pivot] / (a[pivot] / b[pivot]).norm()
    } else {
        C64::new(1.0, 0.0)
    };
    (0..DIM).map(|i| (a[i] - phase * b[i]).norm()).fold(0.0, f64::max)
}

/// Worst ray distance between the production integrator and a brute-force
/// matrix-exponential propagation (0.01 ps sub-steps, drive phase frozen at
/// each sub-step midpoint) over `t_end` seconds from the tilted state.
pub fn taylor_mismatch_over_window(p: &SystemParams, t_end: f64) -> f64 {
    let h = build_closed_hamiltonian(p).unwrap();
    let basis = diagonalize(&h).unwrap();
    let gamma = gamma_matrix(&basis);
    let cfg = IntegratorConfig { t_end, dt: 1.0e-12, sample_stride: 100 };
    let traj = evolve(&basis, &gamma, p, &InitialState::Tilted, &cfg).unwrap();

    let mut psi = *InitialState::Tilted.state().unwrap().amplitudes();
    let sub = 1.0e-14;
    let per_sample = (cfg.dt * cfg.sample_stride as f64 / sub).round() as usize;
    let mut worst = 0.0f64;
    for (s, bare) in traj.bare().iter().enumerate() {
        worst = worst.max(ray_distance(bare, &psi));
        if s + 1 < traj.len() {
            let t0 = traj.times()[s];
            for k in 0..per_sample {
                let mid = t0 + (k as f64 + 0.5) * sub;
                let hm = lab_hamiltonian(p, mid);
                expm_step(&hm, sub, &mut psi);
            }
        }
    }
    worst
}

/// Worst deviation of the simulated photon/qubit populations from the
/// closed-form cos^2 / sin^2 vacuum-Rabi exchange, over five periods.
pub fn vacuum_rabi_mismatch() -> f64 {
    let p = SystemParams {
        omega_c: angular(6.0e9),
        omega_l: angular(6.0e9),
        omega_m: angular(5.1e9),
        omega_r: angular(7.3e9),
        eta_l: angular(300.0e6),
        eta_m: 0.0,
        eta_r: 0.0,
        epsilon_d: 0.0,
        omega_d: angular(6.0e9),
        z_convention: ZConvention::Half,
    };
    let h = build_closed_hamiltonian(&p).unwrap();
    let basis = diagonalize(&h).unwrap();
    let gamma = gamma_matrix(&basis);
    // Five exchange periods pi / eta of 1.667 ns each.
    let cfg = IntegratorConfig {
        t_end: 5.0 * std::f64::consts::PI / p.eta_l,
        dt: 1.0e-12,
        sample_stride: 10,
    };
    let traj = evolve(&basis, &gamma, &p, &InitialState::Photon, &cfg).unwrap();
    let photon = 1usize; // flat(0, 1)
    let excited = 8usize; // flat(4, 0)
    let mut worst = 0.0f64;
    for (s, bare) in traj.bare().iter().enumerate() {
        let t = traj.times()[s];
        let c = (p.eta_l * t).cos().powi(2);
        worst = worst.max((bare[photon].norm_sqr() - c).abs());
        worst = worst.max((bare[excited].norm_sqr() - (1.0 - c)).abs());
        let rest: f64 = (0..DIM)
            .filter(|&i| i != photon && i != excited)
            .map(|i| bare[i].norm_sqr())
            .sum();
        worst = worst.max(rest);
    }
    worst
}
