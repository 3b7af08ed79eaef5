//! Two-mode Gaussian states and exact photon-number statistics.
//!
//! Quadrature convention: x = a + a_dag, p = i(a_dag - a), so [x, p] = 2i and
//! the vacuum covariance is the identity. The state vector is ordered
//! (x_s, p_s, x_i, p_i). Physicality is cov + i Omega >= 0 with Omega the
//! block-diagonal symplectic form.
//!
//! Photon moments are computed exactly from the first and second quadrature
//! moments via the Gaussian (Wick) factorization of fourth-order moments,
//! expressed through the normal (N) and anomalous (M) fluctuation matrices:
//!
//!   <n_j>         = |alpha_j|^2 + N_jj
//!   Cov(n_j,n_k)  = 2 Re[a_j* a_k* M_jk] + 2 Re[a_j a_k* N_jk]
//!                   + |M_jk|^2 + |N_jk|^2 + delta_jk (|alpha_j|^2 + N_jj)

use nalgebra::{DMatrix, Matrix4, Vector4};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("covariance violates the uncertainty relation (min eigenvalue {min_eig:.3e})")]
    UnphysicalCovariance { min_eig: f64 },
    #[error("covariance is not symmetric")]
    NotSymmetric,
    #[error("parametric gain must be >= 1, got {g}")]
    GainBelowUnity { g: f64 },
}

/// Tolerance on the physicality eigenvalue check.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Mean quadrature vector plus 4x4 covariance for a signal/idler mode pair.
#[derive(Debug, Clone)]
pub struct GaussianTwoModeState {
    pub mean: Vector4<f64>,
    pub cov: Matrix4<f64>,
    /// Conversion from dimensionless mode amplitude squared to photons per
    /// pulse; 1.0 when amplitudes already count photons.
    pub photons_per_pulse_scale: f64,
}

/// Photon-number means, variances and cross covariance, in photons per pulse.
#[derive(Debug, Clone, Copy)]
pub struct PhotonStatistics {
    pub mean_s: f64,
    pub mean_i: f64,
    pub var_s: f64,
    pub var_i: f64,
    pub cov_si: f64,
}

impl PhotonStatistics {
    /// Variance of the photon-number difference n_s - n_i.
    pub fn var_diff(&self) -> f64 {
        self.var_s + self.var_i - 2.0 * self.cov_si
    }
}

impl GaussianTwoModeState {
    /// Vacuum in both modes.
    pub fn vacuum() -> Self {
        Self {
            mean: Vector4::zeros(),
            cov: Matrix4::identity(),
            photons_per_pulse_scale: 1.0,
        }
    }

    /// Coherent signal of `photons` mean photon number (phase 0), idler vacuum.
    pub fn coherent_signal(photons: f64) -> Self {
        let mut s = Self::vacuum();
        s.mean[0] = 2.0 * photons.sqrt();
        s
    }

    /// Complex amplitude of mode j (0 = signal, 1 = idler), alpha = (x+ip)/2.
    pub fn alpha(&self, j: usize) -> Complex64 {
        Complex64::new(self.mean[2 * j], self.mean[2 * j + 1]) / 2.0
    }

    /// Minimum eigenvalue of cov + i Omega, computed on the equivalent real
    /// symmetric 8x8 embedding [[cov, -B], [B, cov]] with B = Omega.
    pub fn physicality_eigenvalue(&self) -> f64 {
        let omega = symplectic_form();
        let mut m = DMatrix::<f64>::zeros(8, 8);
        for r in 0..4 {
            for c in 0..4 {
                m[(r, c)] = self.cov[(r, c)];
                m[(r + 4, c + 4)] = self.cov[(r, c)];
                m[(r, c + 4)] = -omega[(r, c)];
                m[(r + 4, c)] = omega[(r, c)];
            }
        }
        let eig = m.symmetric_eigenvalues();
        eig.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn check_physical(&self) -> Result<(), StateError> {
        let asym = (self.cov - self.cov.transpose()).abs().max();
        if asym > 1e-9 * (1.0 + self.cov.abs().max()) {
            return Err(StateError::NotSymmetric);
        }
        let min_eig = self.physicality_eigenvalue();
        let scale = 1.0 + self.cov.diagonal().abs().max();
        if min_eig < -PHYSICALITY_TOL * scale {
            return Err(StateError::UnphysicalCovariance { min_eig });
        }
        Ok(())
    }

    /// Congruence transform of the state by a (symplectic) matrix.
    pub fn apply_symplectic(&mut self, s: &Matrix4<f64>) {
        self.mean = s * self.mean;
        self.cov = s * self.cov * s.transpose();
    }

    /// Add classical Gaussian noise: cov += extra (zero-mean).
    pub fn add_noise(&mut self, extra: &Matrix4<f64>) {
        self.cov += extra;
    }

    /// Beam-splitter loss with transmission eta_s on the signal mode and
    /// eta_i on the idler mode.
    pub fn apply_loss(&mut self, eta_s: f64, eta_i: f64) {
        let d = Matrix4::from_diagonal(&Vector4::new(
            eta_s.sqrt(),
            eta_s.sqrt(),
            eta_i.sqrt(),
            eta_i.sqrt(),
        ));
        let vac = Matrix4::from_diagonal(&Vector4::new(
            1.0 - eta_s,
            1.0 - eta_s,
            1.0 - eta_i,
            1.0 - eta_i,
        ));
        self.mean = d * self.mean;
        self.cov = d * self.cov * d + vac;
    }

    /// Phase-insensitive amplification with gain h_s, h_i >= 1 per mode.
    pub fn apply_incoherent_gain(&mut self, h_s: f64, h_i: f64) {
        let d = Matrix4::from_diagonal(&Vector4::new(
            h_s.sqrt(),
            h_s.sqrt(),
            h_i.sqrt(),
            h_i.sqrt(),
        ));
        let added = Matrix4::from_diagonal(&Vector4::new(
            h_s - 1.0,
            h_s - 1.0,
            h_i - 1.0,
            h_i - 1.0,
        ));
        self.mean = d * self.mean;
        self.cov = d * self.cov * d + added;
    }
}

/// The two-mode symplectic form for (x_s, p_s, x_i, p_i).
pub fn symplectic_form() -> Matrix4<f64> {
    let mut o = Matrix4::zeros();
    o[(0, 1)] = 1.0;
    o[(1, 0)] = -1.0;
    o[(2, 3)] = 1.0;
    o[(3, 2)] = -1.0;
    o
}

/// Exact photon statistics of a Gaussian two-mode state.
pub fn photon_statistics(state: &GaussianTwoModeState) -> Result<PhotonStatistics, StateError> {
    state.check_physical()?;
    let cov = &state.cov;
    let sigma = |a: usize, b: usize| cov[(a, b)];

    // N_jk = 1/4 [s(xj,xk) + s(pj,pk) + i(s(xj,pk) - s(pj,xk)) - 2 delta_jk]
    // M_jk = 1/4 [s(xj,xk) - s(pj,pk) + i(s(xj,pk) + s(pj,xk))]
    let n_mat = |j: usize, k: usize| -> Complex64 {
        let (xj, pj, xk, pk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        let delta = if j == k { 2.0 } else { 0.0 };
        Complex64::new(
            sigma(xj, xk) + sigma(pj, pk) - delta,
            sigma(xj, pk) - sigma(pj, xk),
        ) / 4.0
    };
    let m_mat = |j: usize, k: usize| -> Complex64 {
        let (xj, pj, xk, pk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        Complex64::new(
            sigma(xj, xk) - sigma(pj, pk),
            sigma(xj, pk) + sigma(pj, xk),
        ) / 4.0
    };

    let alpha = [state.alpha(0), state.alpha(1)];
    let mean = |j: usize| alpha[j].norm_sqr() + n_mat(j, j).re;
    let cov_n = |j: usize, k: usize| -> f64 {
        let m = m_mat(j, k);
        let n = n_mat(j, k);
        let mut c = 2.0 * (alpha[j].conj() * alpha[k].conj() * m).re
            + 2.0 * (alpha[j] * alpha[k].conj() * n).re
            + m.norm_sqr()
            + n.norm_sqr();
        if j == k {
            c += alpha[j].norm_sqr() + n_mat(j, j).re;
        }
        c
    };

    let s = state.photons_per_pulse_scale;
    Ok(PhotonStatistics {
        mean_s: mean(0) * s,
        mean_i: mean(1) * s,
        var_s: cov_n(0, 0) * s * s,
        var_i: cov_n(1, 1) * s * s,
        cov_si: cov_n(0, 1) * s * s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_physical_and_dark() {
        let v = GaussianTwoModeState::vacuum();
        let st = photon_statistics(&v).unwrap();
        assert!(st.mean_s.abs() < 1e-12);
        assert!(st.var_s.abs() < 1e-12);
        assert!(st.cov_si.abs() < 1e-12);
    }

    #[test]
    fn coherent_state_is_poissonian() {
        let s = GaussianTwoModeState::coherent_signal(100.0);
        let st = photon_statistics(&s).unwrap();
        assert!((st.mean_s - 100.0).abs() < 1e-9);
        assert!((st.var_s - 100.0).abs() < 1e-9);
        assert!(st.cov_si.abs() < 1e-12);
        assert!(st.mean_i.abs() < 1e-12);
    }

    #[test]
    fn thermal_mode_variance() {
        // single thermal mode with nbar = 1: cov = (2 nbar + 1) I = 3I
        let mut s = GaussianTwoModeState::vacuum();
        s.cov[(0, 0)] = 3.0;
        s.cov[(1, 1)] = 3.0;
        let st = photon_statistics(&s).unwrap();
        assert!((st.mean_s - 1.0).abs() < 1e-12);
        assert!((st.var_s - 2.0).abs() < 1e-12, "var {}", st.var_s);
    }

    #[test]
    fn two_mode_squeezed_vacuum_moments() {
        // per-mode nbar = 1: cosh(2r) = 3, sinh(2r) = 2 sqrt(2)
        let nbar: f64 = 1.0;
        let c2 = 2.0 * nbar + 1.0;
        let s2 = 2.0 * (nbar * (nbar + 1.0)).sqrt();
        let mut s = GaussianTwoModeState::vacuum();
        s.cov = Matrix4::from_diagonal(&Vector4::new(c2, c2, c2, c2));
        s.cov[(0, 2)] = s2;
        s.cov[(2, 0)] = s2;
        s.cov[(1, 3)] = -s2;
        s.cov[(3, 1)] = -s2;
        let st = photon_statistics(&s).unwrap();
        assert!((st.mean_s - 1.0).abs() < 1e-12);
        assert!((st.mean_i - 1.0).abs() < 1e-12);
        assert!((st.var_s - 2.0).abs() < 1e-12);
        assert!((st.var_i - 2.0).abs() < 1e-12);
        assert!((st.cov_si - 2.0).abs() < 1e-12);
        assert!(st.var_diff().abs() < 1e-12);
    }

    #[test]
    fn unphysical_covariance_rejected() {
        let mut s = GaussianTwoModeState::vacuum();
        s.cov[(0, 0)] = 0.1; // squeezed x without stretched p
        match photon_statistics(&s) {
            Err(StateError::UnphysicalCovariance { .. }) => {}
            other => panic!("expected UnphysicalCovariance, got {other:?}"),
        }
    }

    #[test]
    fn photon_scale_applies() {
        let mut s = GaussianTwoModeState::coherent_signal(4.0);
        s.photons_per_pulse_scale = 3.0;
        let st = photon_statistics(&s).unwrap();
        assert!((st.mean_s - 12.0).abs() < 1e-9);
        assert!((st.var_s - 36.0).abs() < 1e-9);
    }
}
