//! Frequency-ladder coupled-mode propagation with pump depletion.
//!
//! Modes sit at nu_p + m * step for m in [-M, M]; m = 0 is the pump. In the
//! twin-beam configuration the step is negative so that m = +1 is the
//! longer-wavelength (Stokes) signal and m = -1 the idler.
//!
//! Amplitudes are photon-flux normalized: |a_m|^2 is the photon flux of mode
//! m expressed as power at the pump frequency (W). The four-wave coupling
//! carries the symmetric weight sqrt(nu_j nu_k nu_l nu_m)/nu_p^2, which makes
//! the total flux sum |a_m|^2 and the ladder-index sum m |a_m|^2 exact
//! invariants of lossless propagation (Manley-Rowe).

use num_complex::Complex64;
use thiserror::Error;

use super::ode::{integrate, OdeError, OdeOptions};
use crate::constants::frequency_thz;
use crate::fiber::FiberSpec;

#[derive(Debug, Error, PartialEq)]
pub enum LadderError {
    #[error("ladder order must be >= 1, got {order}")]
    OrderTooSmall { order: usize },
    #[error("sideband table needs order >= 2, got {order}")]
    OrderTooSmallForSidebands { order: usize },
    #[error("powers must be >= 0")]
    NegativePower,
    #[error("pump wavelength {pump_nm} nm too far from the ZDW {zdw_nm} nm")]
    PumpFarFromZdw { pump_nm: f64, zdw_nm: f64 },
    #[error(transparent)]
    Solver(#[from] OdeError),
}

/// Amplitudes of the 2M+1 ladder modes around the pump.
#[derive(Debug, Clone)]
pub struct ModeLadder {
    /// Pump optical frequency, THz.
    pub center_frequency_thz: f64,
    /// Signed mode spacing, THz (negative when m = +1 is the red side).
    pub detuning_step_thz: f64,
    /// Highest |m| kept.
    pub order: usize,
    /// Amplitudes indexed m + order, |a|^2 in pump-referred W.
    pub amplitudes: Vec<Complex64>,
}

impl ModeLadder {
    /// Pump of `pump_power_w` at m = 0 and seed of `seed_power_w` at m = +1,
    /// everything else dark.
    pub fn seeded(
        pump_nm: f64,
        detuning_step_thz: f64,
        order: usize,
        pump_power_w: f64,
        seed_power_w: f64,
    ) -> Result<Self, LadderError> {
        if order < 1 {
            return Err(LadderError::OrderTooSmall { order });
        }
        if pump_power_w < 0.0 || seed_power_w < 0.0 {
            return Err(LadderError::NegativePower);
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 2 * order + 1];
        amplitudes[order] = Complex64::new(pump_power_w.sqrt(), 0.0);
        amplitudes[order + 1] = Complex64::new(seed_power_w.sqrt(), 0.0);
        Ok(Self {
            center_frequency_thz: frequency_thz(pump_nm),
            detuning_step_thz,
            order,
            amplitudes,
        })
    }

    pub fn mode_frequency_thz(&self, m: i32) -> f64 {
        self.center_frequency_thz + m as f64 * self.detuning_step_thz
    }

    /// Photon flux of mode m in pump-referred W.
    pub fn flux(&self, m: i32) -> f64 {
        self.amplitudes[(m + self.order as i32) as usize].norm_sqr()
    }

    /// Physical power of mode m in W.
    pub fn power(&self, m: i32) -> f64 {
        self.flux(m) * self.mode_frequency_thz(m) / self.center_frequency_thz
    }

    /// Sum of photon fluxes (Manley-Rowe invariant in lossless propagation).
    pub fn total_flux(&self) -> f64 {
        (0..self.amplitudes.len()).map(|i| self.amplitudes[i].norm_sqr()).sum()
    }

    /// Ladder-index-weighted flux, the second lossless invariant.
    pub fn weighted_flux(&self) -> f64 {
        let order = self.order as i32;
        (-order..=order).map(|m| m as f64 * self.flux(m)).sum()
    }
}

/// Knobs of the ladder propagation besides the fiber itself.
#[derive(Debug, Clone)]
pub struct LadderOptions {
    pub ode: OdeOptions,
    /// Temporal-overlap deration of the Kerr coefficient (walk-off proxy).
    pub overlap_factor: f64,
    /// Lumped Raman Stokes gain, 1/(W km): amplifies m = +1, attenuates m = -1.
    pub raman_gain_per_w_km: f64,
    /// Include the fiber's distributed loss.
    pub include_loss: bool,
}

impl Default for LadderOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            overlap_factor: 1.0,
            raman_gain_per_w_km: 0.0,
            include_loss: false,
        }
    }
}

/// Linear phase mismatch 2 beta(w_p) - beta(w_p + W) - beta(w_p - W) of the
/// degenerate four-wave process, per km. Equals -beta2(pump) W^2 for the
/// slope dispersion model (beta3 cancels in the symmetric pair).
pub fn phase_mismatch(
    fiber: &FiberSpec,
    pump_nm: f64,
    detuning_thz: f64,
) -> Result<f64, LadderError> {
    if (pump_nm - fiber.zdw_nm).abs() > 20.0 {
        return Err(LadderError::PumpFarFromZdw { pump_nm, zdw_nm: fiber.zdw_nm });
    }
    let omega = 2.0 * std::f64::consts::PI * detuning_thz;
    Ok(-fiber.beta2_at(pump_nm) * omega * omega)
}

/// Propagation constant offset of ladder index m relative to the pump frame
/// (constant and group-velocity terms removed), per km.
fn beta_offset(fiber: &FiberSpec, pump_nm: f64, step_thz: f64, m: i32) -> f64 {
    let omega = 2.0 * std::f64::consts::PI * step_thz * m as f64;
    0.5 * fiber.beta2_at(pump_nm) * omega * omega + fiber.beta3() / 6.0 * omega * omega * omega
}

/// Integrate the degenerate-pump chi(3) coupled equations over the fiber.
/// SPM, XPM and every energy-conserving four-wave term within the ladder are
/// included; pump depletion is exact.
pub fn coupled_mode_propagate(
    input: &ModeLadder,
    fiber: &FiberSpec,
    opts: &LadderOptions,
) -> Result<ModeLadder, LadderError> {
    let order = input.order as i32;
    let n_modes = input.amplitudes.len();
    let pump_nm = crate::constants::wavelength_nm(input.center_frequency_thz);
    let gamma = fiber.gamma_per_w_km * opts.overlap_factor;
    let betas: Vec<f64> =
        (-order..=order).map(|m| beta_offset(fiber, pump_nm, input.detuning_step_thz, m)).collect();
    // symmetric flux-conserving coupling weights
    let root_nu: Vec<f64> =
        (-order..=order).map(|m| input.mode_frequency_thz(m).sqrt()).collect();
    let nu_p = input.center_frequency_thz;
    let field_loss = if opts.include_loss { fiber.field_loss_per_km() } else { 0.0 };
    let raman = opts.raman_gain_per_w_km / 2.0;
    let sig = (order + 1) as usize; // index of m = +1
    let idl = (order - 1) as usize;
    let pump = order as usize;

    let rhs = move |_z: f64, a: &[Complex64], da: &mut [Complex64]| {
        for m_idx in 0..n_modes {
            let mut nl = Complex64::new(0.0, 0.0);
            for j_idx in 0..n_modes {
                for k_idx in 0..n_modes {
                    // j + k - l = m with all indices shifted by `order`
                    let l_signed = j_idx as i32 + k_idx as i32 - m_idx as i32;
                    if l_signed < 0 || l_signed >= n_modes as i32 {
                        continue;
                    }
                    let l_idx = l_signed as usize;
                    let w = root_nu[j_idx] * root_nu[k_idx] * root_nu[l_idx] * root_nu[m_idx]
                        / (nu_p * nu_p);
                    nl += w * a[j_idx] * a[k_idx] * a[l_idx].conj();
                }
            }
            da[m_idx] = Complex64::new(0.0, betas[m_idx]) * a[m_idx]
                + Complex64::new(0.0, gamma) * nl
                - field_loss * a[m_idx];
        }
        if raman != 0.0 {
            let pump_power = a[pump].norm_sqr();
            da[sig] += raman * pump_power * a[sig];
            da[idl] -= raman * pump_power * a[idl];
        }
    };

    let out = integrate(rhs, 0.0, fiber.length_km(), &input.amplitudes, &opts.ode)?;
    Ok(ModeLadder { amplitudes: out, ..input.clone() })
}

/// Seeded parametric gain: output / input intensity of the m = +1 mode.
#[derive(Debug, Clone, Copy)]
pub struct GainPoint {
    pub pump_power_w: f64,
    pub seed_power_w: f64,
    pub g: f64,
}

/// How to bridge the quasi-CW solver to pulsed operation.
#[derive(Debug, Clone, Copy)]
pub enum PulseAveraging {
    /// Single slice at the given powers.
    Off,
    /// Seed-energy-weighted average over temporal slices of the Gaussian
    /// pump/seed profiles.
    On { pump_fwhm_ps: f64, seed_fwhm_ps: f64, slices: usize },
}

/// Probe power standing in for an exactly dark seed (and for the unsaturated
/// gain reference).
pub const PROBE_SEED_W: f64 = 1e-15;

/// Seeded parametric gain of the ladder FOPA, optionally averaged over the
/// pulse profiles.
pub fn seeded_gain(
    fiber: &FiberSpec,
    pump_nm: f64,
    detuning_step_thz: f64,
    pump_peak_w: f64,
    seed_peak_w: f64,
    averaging: PulseAveraging,
    order: usize,
    opts: &LadderOptions,
) -> Result<GainPoint, LadderError> {
    // a dark seed is probed with the same temporal profile at negligible power
    let seed_scale = if seed_peak_w > 0.0 { seed_peak_w } else { PROBE_SEED_W };
    let one_slice = |pump_w: f64, seed_w: f64| -> Result<f64, LadderError> {
        let ladder = ModeLadder::seeded(pump_nm, detuning_step_thz, order, pump_w, seed_w)?;
        let out = coupled_mode_propagate(&ladder, fiber, opts)?;
        Ok(out.flux(1) / ladder.flux(1))
    };

    let g = match averaging {
        PulseAveraging::Off => one_slice(pump_peak_w, seed_scale)?,
        PulseAveraging::On { pump_fwhm_ps, seed_fwhm_ps, slices } => {
            let slices = slices.max(3) | 1; // odd, so the peak slice is sampled
            let t0p = pump_fwhm_ps / (2.0 * (2f64.ln()).sqrt());
            let t0s = seed_fwhm_ps / (2.0 * (2f64.ln()).sqrt());
            let t_max = 3.0 * t0s;
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..slices {
                let t = -t_max + 2.0 * t_max * i as f64 / (slices - 1) as f64;
                let wp = (-t * t / (t0p * t0p)).exp();
                let ws = (-t * t / (t0s * t0s)).exp();
                let g_slice = one_slice(pump_peak_w * wp, seed_scale * ws)?;
                num += ws * g_slice;
                den += ws;
            }
            num / den
        }
    };
    Ok(GainPoint { pump_power_w: pump_peak_w, seed_power_w: seed_peak_w, g })
}

/// Closed-form undepleted gain of the phase-matched process at kappa = 0:
/// g = cosh^2(gamma P z). Used as the analytic oracle for the solver.
pub fn undepleted_matched_gain(gamma_per_w_km: f64, pump_w: f64, length_km: f64) -> f64 {
    let x = gamma_per_w_km * pump_w * length_km;
    x.cosh() * x.cosh()
}

/// Per-mode intensity table and the second-to-first-order sideband ratio.
#[derive(Debug, Clone)]
pub struct SidebandTable {
    /// (m, photon flux in pump-referred W), ascending in m.
    pub per_mode: Vec<(i32, f64)>,
    /// 10 log10 of stronger |m|=2 flux over stronger |m|=1 flux.
    pub r2_db: f64,
}

pub fn sideband_ratios(ladder: &ModeLadder) -> Result<SidebandTable, LadderError> {
    if ladder.order < 2 {
        return Err(LadderError::OrderTooSmallForSidebands { order: ladder.order });
    }
    let order = ladder.order as i32;
    let per_mode: Vec<(i32, f64)> = (-order..=order).map(|m| (m, ladder.flux(m))).collect();
    let first = ladder.flux(1).max(ladder.flux(-1));
    let second = ladder.flux(2).max(ladder.flux(-2));
    Ok(SidebandTable { per_mode, r2_db: 10.0 * (second / first).log10() })
}
