//! Quantum fluctuation layer: builds the two-mode Gaussian output state from
//! the classical gain, seed excess noise and Raman thermal noise, and turns
//! states into the measured twin-beam observables.

pub mod wigner;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{db_to_linear, BOLTZMANN_J_K, PLANCK_J_S};
use crate::detection::DetectionChain;
use crate::gaussian::{photon_statistics, GaussianTwoModeState, StateError};

#[derive(Debug, Error, PartialEq)]
pub enum QuantumError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("detected idler mean is zero; the photon-number asymmetry is undefined")]
    XiUndefined,
    #[error("no detected light; shot-noise reference undefined")]
    NoLight,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Injected seed: mean photons per pulse and intensity noise above the SNL.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SeedSpec {
    pub mean_photons_per_pulse: f64,
    pub excess_noise_db: f64,
}

/// Lumped Raman noise model parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RamanSpec {
    pub detuning_thz: f64,
    pub temperature_k: f64,
    /// Fraction of the parametric interaction subject to Raman noise, [0, 1].
    pub raman_fraction: f64,
}

/// The measured twin-beam quantities, all linear ratios.
#[derive(Debug, Clone, Copy)]
pub struct TwinBeamObservables {
    /// Intensity-difference noise over the shot-noise limit.
    pub r_t: f64,
    /// Individual-beam noise over each beam's own shot noise.
    pub r_s: f64,
    pub r_i: f64,
    /// Photon-number asymmetry (I_s - I_in)/I_i on loss-corrected means;
    /// None when the detected idler is empty.
    pub xi: Option<f64>,
    /// Shot-noise limit in photons^2 per pulse (sum of detected means).
    pub snl_photons: f64,
    /// DC photocurrent ratio of the two detectors.
    pub i1_over_i2: f64,
}

/// Bose-Einstein phonon occupation at `detuning_thz` and `temperature_k`.
pub fn thermal_occupation(detuning_thz: f64, temperature_k: f64) -> f64 {
    if detuning_thz <= 0.0 || temperature_k <= 0.0 {
        return 0.0;
    }
    let x = PLANCK_J_S * detuning_thz * 1e12 / (BOLTZMANN_J_K * temperature_k);
    1.0 / (x.exp() - 1.0)
}

/// Displaced signal with amplitude-quadrature excess noise, idler vacuum.
///
/// The amplitude quadrature variance is the linear excess-noise factor E, so
/// the bright-beam intensity noise is E times shot noise; an empty seed is
/// exact vacuum regardless of E (laser intensity noise needs a carrier). The
/// displacement carries `mean_photons_per_pulse`; the classical noise adds
/// (E-1)/4 photons on top, matching the randomized-coherent-amplitude
/// picture used by the Fock oracle.
pub fn seed_state(seed: &SeedSpec) -> GaussianTwoModeState {
    let mut s = GaussianTwoModeState::vacuum();
    if seed.mean_photons_per_pulse <= 0.0 {
        return s;
    }
    let e = db_to_linear(seed.excess_noise_db.max(0.0));
    s.mean[0] = 2.0 * seed.mean_photons_per_pulse.sqrt();
    s.cov[(0, 0)] = e;
    s
}

/// Symplectic two-mode squeeze with cosh^2 r = g at squeezing phase `phase`.
pub fn two_mode_squeeze_matrix(g: f64, phase: f64) -> Matrix4<f64> {
    let c = g.sqrt();
    let s = (g - 1.0).sqrt();
    let (sin, cos) = phase.sin_cos();
    let mut m = Matrix4::identity();
    m[(0, 0)] = c;
    m[(0, 2)] = s * cos;
    m[(0, 3)] = s * sin;
    m[(1, 1)] = c;
    m[(1, 2)] = s * sin;
    m[(1, 3)] = -s * cos;
    m[(2, 0)] = s * cos;
    m[(2, 1)] = s * sin;
    m[(2, 2)] = c;
    m[(3, 0)] = s * sin;
    m[(3, 1)] = -s * cos;
    m[(3, 3)] = c;
    m
}

/// Lossless parametric amplification with intensity gain g (phase 0).
pub fn apply_parametric_gain(
    state: &GaussianTwoModeState,
    g: f64,
) -> Result<GaussianTwoModeState, QuantumError> {
    if g < 1.0 {
        return Err(QuantumError::InvalidParameter(format!("gain must be >= 1, got {g}")));
    }
    let mut out = state.clone();
    out.apply_symplectic(&two_mode_squeeze_matrix(g, 0.0));
    Ok(out)
}

/// Covariance added by the lumped Raman model at gain g: Stokes (signal)
/// noise scales with n_th + 1, anti-Stokes (idler) with n_th; the photon
/// means follow from the covariance trace.
pub fn raman_noise_covariance(g: f64, raman: &RamanSpec) -> Matrix4<f64> {
    let f = raman.raman_fraction;
    if f <= 0.0 || g <= 1.0 {
        return Matrix4::zeros();
    }
    let n_th = thermal_occupation(raman.detuning_thz, raman.temperature_k);
    let stokes = 4.0 * f * (g - 1.0) * (n_th + 1.0);
    let anti = 4.0 * f * (g - 1.0) * n_th;
    Matrix4::from_diagonal(&nalgebra::Vector4::new(stokes, stokes, anti, anti))
}

pub fn inject_raman_noise(
    state: &GaussianTwoModeState,
    g: f64,
    raman: &RamanSpec,
) -> GaussianTwoModeState {
    let mut out = state.clone();
    out.add_noise(&raman_noise_covariance(g, raman));
    out
}

/// Full quantum chain of one operating point, before detection.
#[derive(Debug, Clone, Copy)]
pub struct QuantumChain {
    pub seed: SeedSpec,
    /// Total classical intensity gain of the signal.
    pub gain: f64,
    /// Fraction of the gain acting incoherently: past the saturation knee
    /// this share of the amplification stops pair-producing and only adds
    /// amplifier-like noise, degrading the twin-beam correlation.
    pub incoherent_fraction: f64,
    pub raman: RamanSpec,
}

impl QuantumChain {
    /// Noise covariance of the incoherently acting share of the gain:
    /// phi (g - 1) per quadrature on each beam, the excess a
    /// phase-insensitive amplifier carrying that share would inject.
    pub fn saturation_noise_covariance(&self) -> Matrix4<f64> {
        let v = self.incoherent_fraction * (self.gain - 1.0).max(0.0);
        Matrix4::from_diagonal(&nalgebra::Vector4::new(v, v, v, v))
    }

    /// Total zero-mean noise added after the squeeze (saturation + Raman).
    pub fn added_noise_covariance(&self) -> Matrix4<f64> {
        self.saturation_noise_covariance() + raman_noise_covariance(self.gain, &self.raman)
    }

    /// Evaluate the exact output state of the chain.
    pub fn output_state(&self) -> Result<GaussianTwoModeState, QuantumError> {
        if self.gain < 1.0 {
            return Err(QuantumError::InvalidParameter(format!(
                "gain must be >= 1, got {}",
                self.gain
            )));
        }
        if !(0.0..=1.0).contains(&self.incoherent_fraction) {
            return Err(QuantumError::InvalidParameter(
                "incoherent fraction must lie in [0, 1]".into(),
            ));
        }
        let mut state = seed_state(&self.seed);
        state.apply_symplectic(&two_mode_squeeze_matrix(self.gain, 0.0));
        state.add_noise(&self.added_noise_covariance());
        Ok(state)
    }
}

/// Apply the detection chain and compute every measured ratio.
///
/// `seed_mean_in` is the injected signal mean in photons per pulse; the
/// asymmetry xi uses loss-corrected detected means against it.
pub fn twin_beam_observables(
    state: &GaussianTwoModeState,
    detection: &DetectionChain,
    seed_mean_in: f64,
) -> Result<TwinBeamObservables, QuantumError> {
    detection
        .validate()
        .map_err(|e| QuantumError::InvalidParameter(e.to_string()))?;
    let mut detected = state.clone();
    let (eta_s_eff, eta_i) = (detection.eta_signal * detection.voa_transmission, detection.eta_idler);
    detected.apply_loss(eta_s_eff, eta_i);
    let st = photon_statistics(&detected)?;

    let snl = st.mean_s + st.mean_i;
    if snl <= 0.0 {
        return Err(QuantumError::NoLight);
    }
    let r_t = st.var_diff() / snl;
    let r_s = if st.mean_s > 0.0 { st.var_s / st.mean_s } else { 1.0 };
    let r_i = if st.mean_i > 0.0 { st.var_i / st.mean_i } else { 1.0 };
    let xi = if st.mean_i > 1e-12 * st.mean_s.max(1.0) {
        Some((st.mean_s / eta_s_eff - seed_mean_in) / (st.mean_i / eta_i))
    } else {
        None
    };
    let i1_over_i2 = if st.mean_i > 0.0 { st.mean_s / st.mean_i } else { f64::INFINITY };
    Ok(TwinBeamObservables { r_t, r_s, r_i, xi, snl_photons: snl, i1_over_i2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::DetectionChain;
    use crate::fock::fock_oracle_auto;
    use crate::gaussian::photon_statistics;

    #[test]
    fn thermal_occupation_reference_points() {
        assert!((thermal_occupation(2.1, 300.0) - 2.505).abs() < 0.01);
        assert!((thermal_occupation(2.1, 77.0) - 0.370).abs() < 0.005);
        assert!(thermal_occupation(2.1, 1e-9) < 1e-12);
    }

    #[test]
    fn shot_limited_seed_is_coherent() {
        let s = seed_state(&SeedSpec { mean_photons_per_pulse: 50.0, excess_noise_db: 0.0 });
        let st = photon_statistics(&s).unwrap();
        assert!((st.mean_s - 50.0).abs() < 1e-9);
        assert!((st.var_s - 50.0).abs() < 1e-9);
    }

    #[test]
    fn empty_seed_ignores_excess_noise() {
        let s = seed_state(&SeedSpec { mean_photons_per_pulse: 0.0, excess_noise_db: 12.0 });
        assert_eq!(s.cov, Matrix4::identity());
        assert_eq!(s.mean, nalgebra::Vector4::zeros());
    }

    #[test]
    fn bright_seed_fano_factor_matches_excess_noise() {
        let e_db = 12.0;
        let s = seed_state(&SeedSpec { mean_photons_per_pulse: 1e6, excess_noise_db: e_db });
        let st = photon_statistics(&s).unwrap();
        let fano = st.var_s / st.mean_s;
        assert!((fano - db_to_linear(e_db)).abs() < 0.1, "fano {fano}");
    }

    #[test]
    fn unit_gain_is_identity() {
        let s = seed_state(&SeedSpec { mean_photons_per_pulse: 5.0, excess_noise_db: 3.0 });
        let out = apply_parametric_gain(&s, 1.0).unwrap();
        assert!((out.cov - s.cov).abs().max() < 1e-12);
        assert!((out.mean - s.mean).abs().max() < 1e-12);
    }

    #[test]
    fn squeeze_matrix_is_symplectic() {
        use crate::gaussian::symplectic_form;
        for g in [1.0, 2.0, 17.0, 56.0] {
            for phase in [0.0, 0.7, 2.1] {
                let s = two_mode_squeeze_matrix(g, phase);
                let omega = symplectic_form();
                let residual = (s * omega * s.transpose() - omega).abs().max();
                assert!(residual < 1e-9, "g {g} phase {phase}: {residual}");
            }
        }
    }

    #[test]
    fn spontaneous_gain_two_makes_twin_thermal_pair() {
        let out = apply_parametric_gain(&GaussianTwoModeState::vacuum(), 2.0).unwrap();
        let st = photon_statistics(&out).unwrap();
        assert!((st.mean_s - 1.0).abs() < 1e-12);
        assert!((st.mean_i - 1.0).abs() < 1e-12);
        assert!(st.var_diff().abs() < 1e-12);
    }

    #[test]
    fn gaussian_path_matches_fock_oracle_at_gain_three() {
        let s = seed_state(&SeedSpec { mean_photons_per_pulse: 5.0, excess_noise_db: 0.0 });
        let out = apply_parametric_gain(&s, 3.0).unwrap();
        let st = photon_statistics(&out).unwrap();
        let oracle = fock_oracle_auto(3.0, 5.0, 1.0, 64).unwrap().stats;
        assert!((st.mean_s - oracle.mean_s).abs() / oracle.mean_s < 1e-6);
        assert!((st.mean_i - oracle.mean_i).abs() / oracle.mean_i < 1e-6);
        assert!((st.var_s - oracle.var_s).abs() / oracle.var_s < 1e-4);
        assert!((st.var_i - oracle.var_i).abs() / oracle.var_i < 1e-4);
        assert!((st.cov_si - oracle.cov_si).abs() / oracle.cov_si < 1e-4);
    }

    #[test]
    fn squeezing_phase_leaves_observables_unchanged() {
        let chain = DetectionChain::equal(0.7);
        let seed = SeedSpec { mean_photons_per_pulse: 1e5, excess_noise_db: 6.0 };
        let reference = {
            let mut st = seed_state(&seed);
            st.apply_symplectic(&two_mode_squeeze_matrix(12.0, 0.0));
            twin_beam_observables(&st, &chain, 1e5).unwrap()
        };
        for phase in [0.3, 1.0, 2.9, 4.4] {
            let mut st = seed_state(&seed);
            st.apply_symplectic(&two_mode_squeeze_matrix(12.0, phase));
            let obs = twin_beam_observables(&st, &chain, 1e5).unwrap();
            assert!((obs.r_t - reference.r_t).abs() < 1e-9);
            assert!((obs.r_s - reference.r_s).abs() < 1e-9);
            assert!((obs.r_i - reference.r_i).abs() < 1e-9);
            assert!((obs.snl_photons - reference.snl_photons).abs() < 1e-9 * reference.snl_photons);
        }
    }

    #[test]
    fn raman_noise_raises_difference_variance() {
        let seed = SeedSpec { mean_photons_per_pulse: 1e4, excess_noise_db: 0.0 };
        let out = apply_parametric_gain(&seed_state(&seed), 20.0).unwrap();
        let quiet = photon_statistics(&out).unwrap().var_diff();
        let raman = RamanSpec { detuning_thz: 2.1, temperature_k: 300.0, raman_fraction: 0.05 };
        let noisy = photon_statistics(&inject_raman_noise(&out, 20.0, &raman)).unwrap().var_diff();
        assert!(noisy > quiet);
        // f_R = 0 is a no-op
        let off = RamanSpec { raman_fraction: 0.0, ..raman };
        let same = photon_statistics(&inject_raman_noise(&out, 20.0, &off)).unwrap().var_diff();
        assert!((same - quiet).abs() < 1e-9 * quiet);
    }

    #[test]
    fn cooling_lowers_individual_beam_noise() {
        let chain = DetectionChain::equal(0.55);
        let seed = SeedSpec { mean_photons_per_pulse: 4e5, excess_noise_db: 0.0 };
        let g = 20.0;
        let obs_at = |t_k: f64| {
            let out = apply_parametric_gain(&seed_state(&seed), g).unwrap();
            let raman = RamanSpec { detuning_thz: 2.1, temperature_k: t_k, raman_fraction: 0.05 };
            twin_beam_observables(&inject_raman_noise(&out, g, &raman), &chain, 4e5).unwrap()
        };
        let warm = obs_at(300.0);
        let cold = obs_at(77.0);
        assert!(cold.r_s < warm.r_s);
        assert!(cold.r_i < warm.r_i);
    }

    #[test]
    fn ideal_bright_chain_hits_closed_form() {
        // R_t = 1 - eta + eta/(2g - 1) for a bright shot-limited seed
        let seed = SeedSpec { mean_photons_per_pulse: 1e6, excess_noise_db: 0.0 };
        for (g, eta) in [(2.0, 1.0), (10.0, 0.55), (56.0, 0.55)] {
            let out = apply_parametric_gain(&seed_state(&seed), g).unwrap();
            let obs = twin_beam_observables(&out, &DetectionChain::equal(eta), 1e6).unwrap();
            let expect = 1.0 - eta + eta / (2.0 * g - 1.0);
            assert!(
                (obs.r_t - expect).abs() / expect < 1e-3,
                "g {g} eta {eta}: {} vs {expect}",
                obs.r_t
            );
        }
    }

    #[test]
    fn xi_undefined_at_unit_gain() {
        let seed = SeedSpec { mean_photons_per_pulse: 100.0, excess_noise_db: 0.0 };
        let out = apply_parametric_gain(&seed_state(&seed), 1.0).unwrap();
        let obs = twin_beam_observables(&out, &DetectionChain::equal(0.5), 100.0).unwrap();
        assert!(obs.xi.is_none());
        assert!((obs.r_t - 1.0).abs() < 1e-6, "coherent beam sits at the SNL");
    }

    #[test]
    fn saturation_noise_keeps_gain_and_degrades_correlation() {
        let chain = QuantumChain {
            seed: SeedSpec { mean_photons_per_pulse: 1e5, excess_noise_db: 0.0 },
            gain: 30.0,
            incoherent_fraction: 0.25,
            raman: RamanSpec { detuning_thz: 2.1, temperature_k: 300.0, raman_fraction: 0.0 },
        };
        let st = photon_statistics(&chain.output_state().unwrap()).unwrap();
        // the mean gain is untouched by the decorrelation noise
        assert!((st.mean_s / 1e5 - 30.0).abs() / 30.0 < 1e-3, "signal gain {}", st.mean_s / 1e5);
        // but the difference squeezing degrades
        let ideal = QuantumChain { incoherent_fraction: 0.0, ..chain };
        let st0 = photon_statistics(&ideal.output_state().unwrap()).unwrap();
        assert!(st.var_diff() > 3.0 * st0.var_diff());
    }
}
