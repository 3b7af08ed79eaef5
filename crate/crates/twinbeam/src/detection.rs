//! Collection and detection chain: losses, VOA balancing, shot-noise
//! calibration, electronic-noise handling and loss-correction arithmetic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussian::GaussianTwoModeState;
use crate::optim::{golden_section_minimize, sampled_local_minima};

#[derive(Debug, Error, PartialEq)]
pub enum DetectionError {
    #[error("efficiency out of range: {0}")]
    InvalidEfficiency(String),
    #[error("zero total detected mean; shot-noise calibration undefined")]
    ZeroCalibration,
    #[error("measured variance {measured} does not exceed the electronic floor {electronic}")]
    NonPhysicalCorrection { measured: f64, electronic: f64 },
    #[error("measurement {r_meas} below the vacuum-loss floor 1 - eta = {floor}")]
    BelowVacuumFloor { r_meas: f64, floor: f64 },
}

/// Per-arm transmissions and detector metadata of the differential receiver.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DetectionChain {
    /// Total collection x quantum efficiency of the signal arm, (0, 1].
    pub eta_signal: f64,
    /// Same for the idler arm.
    pub eta_idler: f64,
    /// Variable attenuator in the signal arm only, (0, 1].
    pub voa_transmission: f64,
    /// Electronic noise floor relative to the SNL, dB below.
    pub electronic_noise_db_below_snl: f64,
    /// Spectrum-analyzer settings; metadata only.
    pub detection_frequency_mhz: f64,
    pub resolution_bandwidth_khz: f64,
}

impl DetectionChain {
    /// Equal efficiencies, open VOA, default analyzer settings.
    pub fn equal(eta: f64) -> Self {
        Self {
            eta_signal: eta,
            eta_idler: eta,
            voa_transmission: 1.0,
            electronic_noise_db_below_snl: 10.0,
            detection_frequency_mhz: 3.0,
            resolution_bandwidth_khz: 100.0,
        }
    }

    pub fn validate(&self) -> Result<(), DetectionError> {
        for (name, v) in [
            ("eta_signal", self.eta_signal),
            ("eta_idler", self.eta_idler),
            ("voa_transmission", self.voa_transmission),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(DetectionError::InvalidEfficiency(format!(
                    "{name} must be in (0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_voa(&self, voa: f64) -> Self {
        Self { voa_transmission: voa, ..*self }
    }

    /// Electronic noise variance given the SNL on the same scale.
    pub fn electronic_variance(&self, snl: f64) -> f64 {
        snl * crate::constants::db_to_linear(-self.electronic_noise_db_below_snl)
    }
}

/// Beam-splitter loss of the whole chain applied to a state: signal sees
/// eta_signal * voa, idler sees eta_idler.
pub fn apply_loss(
    state: &GaussianTwoModeState,
    chain: &DetectionChain,
) -> Result<GaussianTwoModeState, DetectionError> {
    chain.validate()?;
    let mut out = state.clone();
    out.apply_loss(chain.eta_signal * chain.voa_transmission, chain.eta_idler);
    Ok(out)
}

/// Bracket and tolerance of the VOA search.
#[derive(Debug, Clone, Copy)]
pub struct VoaSearch {
    pub lo: f64,
    pub hi: f64,
    pub x_tol: f64,
}

impl Default for VoaSearch {
    fn default() -> Self {
        Self { lo: 0.5, hi: 1.0, x_tol: 1e-4 }
    }
}

/// Result of the VOA optimization.
#[derive(Debug, Clone, Copy)]
pub struct VoaBalance {
    pub voa_opt: f64,
    pub r_t_min: f64,
    pub i1_over_i2: f64,
    /// Set when the bracket probe saw more than one local minimum; the
    /// runner-up is reported alongside.
    pub non_unimodal: Option<(f64, f64)>,
}

/// Minimize R_t over the VOA transmission by golden-section search.
///
/// The probe grid first checks that R_t(voa) is unimodal on the bracket;
/// if not, both local minima are reported and the better one returned.
pub fn balance_voa(
    state: &GaussianTwoModeState,
    chain: &DetectionChain,
    search: &VoaSearch,
    seed_mean_in: f64,
) -> Result<VoaBalance, crate::quantum::QuantumError> {
    let r_t_of = |voa: f64| -> f64 {
        crate::quantum::twin_beam_observables(state, &chain.with_voa(voa), seed_mean_in)
            .map(|o| o.r_t)
            .unwrap_or(f64::INFINITY)
    };
    let minima = sampled_local_minima(r_t_of, search.lo, search.hi, 17);
    let non_unimodal = if minima.len() > 1 {
        // report the runner-up (position, value)
        let mut sorted = minima.clone();
        sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
        Some(sorted[1])
    } else {
        None
    };
    let (voa_opt, r_t_min) = golden_section_minimize(r_t_of, search.lo, search.hi, search.x_tol);
    // never settle for worse than the open VOA when it is inside the bracket
    let (voa_opt, r_t_min) = if search.hi >= 1.0 && r_t_of(1.0) < r_t_min {
        (1.0, r_t_of(1.0))
    } else {
        (voa_opt, r_t_min)
    };
    let obs =
        crate::quantum::twin_beam_observables(state, &chain.with_voa(voa_opt), seed_mean_in)?;
    Ok(VoaBalance { voa_opt, r_t_min, i1_over_i2: obs.i1_over_i2, non_unimodal })
}

/// A shot-noise calibration: two coherent beams matched on the DC sum.
#[derive(Debug, Clone)]
pub struct CalibrationRecord {
    pub dc_sum_reference: f64,
    pub snl_variance: f64,
    pub method_note: String,
}

/// SNL from the detected means: Poissonian variance equals the summed mean.
pub fn snl_calibrate(
    detected_mean_s: f64,
    detected_mean_i: f64,
) -> Result<CalibrationRecord, DetectionError> {
    if detected_mean_s < 0.0 || detected_mean_i < 0.0 {
        return Err(DetectionError::InvalidEfficiency("detected means must be >= 0".into()));
    }
    let sum = detected_mean_s + detected_mean_i;
    if sum <= 0.0 {
        return Err(DetectionError::ZeroCalibration);
    }
    Ok(CalibrationRecord {
        dc_sum_reference: sum,
        snl_variance: sum,
        method_note: "coherent illumination matched on the DC current sum".into(),
    })
}

/// Remove the electronic noise floor from a measured variance.
pub fn subtract_electronic_noise(
    measured_var: f64,
    electronic_var: f64,
) -> Result<f64, DetectionError> {
    if electronic_var < 0.0 || measured_var <= electronic_var {
        return Err(DetectionError::NonPhysicalCorrection {
            measured: measured_var,
            electronic: electronic_var,
        });
    }
    Ok(measured_var - electronic_var)
}

/// Which effective efficiency the loss correction divides by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossConvention {
    /// Arithmetic mean of the two arm efficiencies.
    MeanEfficiency,
    /// Geometric mean: each arm contributes its own sqrt(eta), the scaling
    /// of the cross-correlated noise term.
    PerArm,
}

/// Infer the source noise reduction from the measured one:
/// R_src = (R_meas - (1 - eta_eff)) / eta_eff.
pub fn loss_correct(
    r_meas: f64,
    eta_s: f64,
    eta_i: f64,
    convention: LossConvention,
) -> Result<f64, DetectionError> {
    let eta = match convention {
        LossConvention::MeanEfficiency => 0.5 * (eta_s + eta_i),
        LossConvention::PerArm => (eta_s * eta_i).sqrt(),
    };
    let floor = 1.0 - eta;
    if r_meas <= floor {
        return Err(DetectionError::BelowVacuumFloor { r_meas, floor });
    }
    Ok((r_meas - floor) / eta)
}
