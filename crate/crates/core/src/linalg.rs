//! Dense complex linear algebra sized for a 16-dimensional Hilbert space.
//!
//! The eigensolver is a cyclic Jacobi iteration for Hermitian matrices. At
//! this dimension it is fast, needs no external backend, and gives full
//! control over the ordering and phase conventions that downstream code
//! relies on for reproducibility.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Dense square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    n: usize,
    a: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Self::from_fn(self.n, |i, j| {
            (0..self.n).map(|k| self[(i, k)] * rhs[(k, j)]).sum()
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest |A_ij - conj(A_ji)| over all entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    fn offdiag_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Iterates until the off-diagonal Frobenius norm falls below
    /// `1e-13 * ||A||_F`. Eigenvalues come back ascending; eigenvectors are
    /// the columns of the returned matrix, each rescaled so its first
    /// component of magnitude above 1e-8 is real and positive. Both
    /// conventions keep the decomposition reproducible run to run.
    pub fn hermitian_eigen(&self) -> Result<Eigen> {
        let dev = self.hermiticity_deviation();
        if dev > 1e-12 * (1.0 + self.frobenius_norm()) {
            return Err(Error::NotHermitian { deviation: dev });
        }

        let n = self.n;
        let mut b = self.clone();
        let mut v = CMat::identity(n);
        let norm = self.frobenius_norm();
        let threshold = 1e-13 * norm;
        // Entries already far below the target make no progress worth a rotation.
        let skip = threshold / ((n * n) as f64 + 1.0);

        const MAX_SWEEPS: usize = 60;
        let mut converged = norm == 0.0 || n < 2;
        let mut sweeps = 0;
        while !converged && sweeps < MAX_SWEEPS {
            sweeps += 1;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = b[(p, q)];
                    let r = apq.norm();
                    if r <= skip {
                        continue;
                    }
                    let phase = apq / r;
                    let app = b[(p, p)].re;
                    let aqq = b[(q, q)].re;
                    // cot(2 theta) for the rotation zeroing the (p, q) entry.
                    let vartheta = (app - aqq) / (2.0 * r);
                    let t = if vartheta >= 0.0 {
                        1.0 / (vartheta + (vartheta * vartheta + 1.0).sqrt())
                    } else {
                        1.0 / (vartheta - (vartheta * vartheta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let sp = phase * s;
                    let spc = phase.conj() * s;

                    for i in 0..n {
                        let aip = b[(i, p)];
                        let aiq = b[(i, q)];
                        b[(i, p)] = c * aip + spc * aiq;
                        b[(i, q)] = -sp * aip + c * aiq;
                    }
                    for i in 0..n {
                        let api = b[(p, i)];
                        let aqi = b[(q, i)];
                        b[(p, i)] = c * api + sp * aqi;
                        b[(q, i)] = -spc * api + c * aqi;
                    }
                    b[(p, q)] = ZERO;
                    b[(q, p)] = ZERO;
                    b[(p, p)].im = 0.0;
                    b[(q, q)].im = 0.0;

                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = c * vip + spc * viq;
                        v[(i, q)] = -sp * vip + c * viq;
                    }
                }
            }
            converged = b.offdiag_norm() <= threshold;
        }
        if !converged {
            return Err(Error::EigenNoConvergence { sweeps });
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| b[(i, i)].re.total_cmp(&b[(j, j)].re));

        let mut values = Vec::with_capacity(n);
        let mut vectors = CMat::zeros(n);
        for (k, &src) in order.iter().enumerate() {
            values.push(b[(src, src)].re);
            let pivot = (0..n)
                .map(|i| v[(i, src)])
                .find(|z| z.norm() > 1e-8)
                .expect("unit eigenvector has a component above 1e-8");
            let fix = pivot.conj() / pivot.norm();
            for i in 0..n {
                vectors[(i, k)] = v[(i, src)] * fix;
            }
        }
        Ok(Eigen { values, vectors })
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.a[i * self.n + j]
    }
}

/// Hermitian eigendecomposition: `values[k]` pairs with eigenvector column
/// `vectors[(., k)]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl Eigen {
    /// Largest residual ||A v_k - lambda_k v_k||_2 over all eigenpairs.
    pub fn max_residual(&self, a: &CMat) -> f64 {
        let n = a.dim();
        let mut worst = 0.0f64;
        for k in 0..n {
            let col: Vec<C64> = (0..n).map(|i| self.vectors[(i, k)]).collect();
            let av = a.matvec(&col);
            let resid: f64 = av
                .iter()
                .zip(&col)
                .map(|(&av_i, &v_i)| (av_i - self.values[k] * v_i).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(resid);
        }
        worst
    }

    /// Largest entry of |V V^dag - I|; zero for an exactly unitary basis.
    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.vectors.matmul(&self.vectors.adjoint());
        let n = prod.dim();
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { ONE } else { ZERO };
                dev = dev.max((prod[(i, j)] - expect).norm());
            }
        }
        dev
    }
}
