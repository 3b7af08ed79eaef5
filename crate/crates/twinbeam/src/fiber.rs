//! Dispersion-shifted fiber parameters.
//!
//! Dispersion is modeled by a linear slope about the zero-dispersion
//! wavelength: D(lambda) = S (lambda - lambda_ZDW), which fixes beta2 at any
//! nearby wavelength and a constant beta3. beta2 vanishes at the ZDW by
//! construction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::C_NM_PS;

#[derive(Debug, Error, PartialEq)]
pub enum FiberError {
    #[error("fiber parameter out of range: {0}")]
    InvalidParameter(String),
}

/// Physical parameters of a span of dispersion-shifted fiber.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberSpec {
    pub length_m: f64,
    /// Kerr nonlinear coefficient, 1/(W km).
    pub gamma_per_w_km: f64,
    /// Zero-dispersion wavelength, nm.
    pub zdw_nm: f64,
    /// Dispersion slope S at the ZDW, ps/(nm^2 km).
    pub dispersion_slope_ps_nm2_km: f64,
    pub temperature_k: f64,
    /// Total propagation loss over the span, dB.
    pub propagation_loss_db: f64,
}

impl FiberSpec {
    pub fn validate(&self) -> Result<(), FiberError> {
        if self.length_m <= 0.0 {
            return Err(FiberError::InvalidParameter(format!(
                "length_m must be > 0, got {}",
                self.length_m
            )));
        }
        if self.gamma_per_w_km < 0.0 {
            return Err(FiberError::InvalidParameter(format!(
                "gamma_per_W_km must be >= 0, got {}",
                self.gamma_per_w_km
            )));
        }
        if self.temperature_k <= 0.0 {
            return Err(FiberError::InvalidParameter(format!(
                "temperature_K must be > 0, got {}",
                self.temperature_k
            )));
        }
        if self.propagation_loss_db < 0.0 {
            return Err(FiberError::InvalidParameter(format!(
                "propagation_loss_dB must be >= 0, got {}",
                self.propagation_loss_db
            )));
        }
        Ok(())
    }

    pub fn length_km(&self) -> f64 {
        self.length_m / 1000.0
    }

    /// Dispersion parameter D at `lambda_nm`, ps/(nm km).
    pub fn dispersion_d(&self, lambda_nm: f64) -> f64 {
        self.dispersion_slope_ps_nm2_km * (lambda_nm - self.zdw_nm)
    }

    /// Group-velocity dispersion beta2 at `lambda_nm`, ps^2/km.
    /// beta2 = -D lambda^2 / (2 pi c); anomalous (negative) above the ZDW.
    pub fn beta2_at(&self, lambda_nm: f64) -> f64 {
        -self.dispersion_d(lambda_nm) * lambda_nm * lambda_nm
            / (2.0 * std::f64::consts::PI * C_NM_PS)
    }

    /// Third-order dispersion at the ZDW, ps^3/km:
    /// beta3 = S lambda^4 / (2 pi c)^2.
    pub fn beta3(&self) -> f64 {
        let l = self.zdw_nm;
        let two_pi_c = 2.0 * std::f64::consts::PI * C_NM_PS;
        self.dispersion_slope_ps_nm2_km * l * l * l * l / (two_pi_c * two_pi_c)
    }

    /// Field attenuation coefficient alpha/2 in 1/km (power loss spread
    /// uniformly over the span).
    pub fn field_loss_per_km(&self) -> f64 {
        let alpha_db_per_km = self.propagation_loss_db / self.length_km();
        alpha_db_per_km * (10f64.ln() / 10.0) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dsf() -> FiberSpec {
        FiberSpec {
            length_m: 300.0,
            gamma_per_w_km: 2.0,
            zdw_nm: 1551.0,
            dispersion_slope_ps_nm2_km: 0.075,
            temperature_k: 300.0,
            propagation_loss_db: 0.0,
        }
    }

    #[test]
    fn beta2_zero_at_zdw() {
        assert_eq!(dsf().beta2_at(1551.0), 0.0);
    }

    #[test]
    fn beta2_anomalous_above_zdw() {
        // pump side of the ZDW: D > 0 so beta2 < 0
        let b2 = dsf().beta2_at(1552.5);
        assert!(b2 < 0.0);
        // -(1552.5^2 / 2 pi c) * 0.075 * 1.5 = -0.1440 ps^2/km
        assert!((b2 + 0.14395).abs() < 1e-3, "beta2 {b2}");
    }

    #[test]
    fn beta3_order_of_magnitude() {
        // S lambda^4 / (2 pi c)^2 with S = 0.075 ps/nm^2/km at 1551 nm
        let b3 = dsf().beta3();
        assert!((b3 - 0.1223).abs() < 1e-3, "beta3 {b3}");
    }

    #[test]
    fn loss_conversion() {
        let mut f = dsf();
        f.propagation_loss_db = 3.0;
        // 3 dB over 0.3 km = 10 dB/km, alpha = 2.3026/km, field = half
        assert!((f.field_loss_per_km() - 1.1513).abs() < 1e-3);
    }
}
