//! Complex field envelopes on a uniform time grid.
//!
//! An [`OpticalPulse`] stores the analytic-signal envelope A(t) in sqrt(W)
//! relative to a carrier wavelength. A spectral component at detuning
//! `+f` THz from the carrier enters the envelope as `exp(-i 2 pi f t)`,
//! i.e. the physical field is `A(t) exp(-i omega_0 t)`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::constants::{frequency_thz, photon_energy_j, C_NM_PS};

#[derive(Debug, Error, PartialEq)]
pub enum PulseError {
    #[error("grid length {n} is not a power of two")]
    NotPowerOfTwo { n: usize },
    #[error("grid spacing must be positive, got {dt_ps}")]
    NonPositiveSpacing { dt_ps: f64 },
    #[error("grid too coarse: {samples:.1} samples across the FWHM (need >= 16)")]
    GridTooCoarse { samples: f64 },
    #[error("pulse energy outside grid: fraction {fraction:.3e} exceeds 1e-6")]
    EnergyOutsideGrid { fraction: f64 },
    #[error("invalid pulse parameter: {0}")]
    InvalidParameter(String),
    #[error("zero pulse has no metrics")]
    ZeroPulse,
}

/// Uniform time grid: `n` samples (power of two) spaced `dt_ps` apart,
/// centered on t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub dt_ps: f64,
}

impl GridSpec {
    pub fn new(n: usize, dt_ps: f64) -> Result<Self, PulseError> {
        if !n.is_power_of_two() || n < 2 {
            return Err(PulseError::NotPowerOfTwo { n });
        }
        if dt_ps <= 0.0 {
            return Err(PulseError::NonPositiveSpacing { dt_ps });
        }
        Ok(Self { n, dt_ps })
    }

    /// Sample time of index k, grid centered on zero.
    pub fn time(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dt_ps
    }

    /// Detuning frequency (THz) of FFT bin k, standard FFT ordering.
    pub fn freq(&self, k: usize) -> f64 {
        let n = self.n;
        let span = 1.0 / (n as f64 * self.dt_ps);
        if k < n / 2 {
            k as f64 * span
        } else {
            (k as f64 - n as f64) * span
        }
    }

    /// Full frequency span of the grid in THz.
    pub fn freq_span_thz(&self) -> f64 {
        1.0 / self.dt_ps
    }
}

/// Complex field envelope on a uniform time grid.
#[derive(Debug, Clone)]
pub struct OpticalPulse {
    pub carrier_wavelength_nm: f64,
    pub grid: GridSpec,
    pub envelope: Vec<Complex64>,
}

/// Summary metrics of a pulse: widths, time-bandwidth product, energy.
#[derive(Debug, Clone, Copy)]
pub struct PulseMetrics {
    pub fwhm_ps: f64,
    pub spectral_fwhm_nm: f64,
    pub spectral_fwhm_thz: f64,
    /// Time-bandwidth product, FWHM(t) * FWHM(nu).
    pub tbp: f64,
    pub energy_pj: f64,
    pub photons_per_pulse: f64,
    /// Set when the intensity profile has more than one region above half
    /// maximum; the reported width then spans the outermost crossings.
    pub ambiguous_fwhm: bool,
}

impl OpticalPulse {
    /// All-zero envelope.
    pub fn zero(carrier_wavelength_nm: f64, grid: GridSpec) -> Self {
        Self {
            carrier_wavelength_nm,
            grid,
            envelope: vec![Complex64::new(0.0, 0.0); grid.n],
        }
    }

    /// Pulse energy in pJ (sum of |A|^2 dt with power in W, time in ps).
    pub fn energy_pj(&self) -> f64 {
        self.envelope.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dt_ps
    }

    /// Instantaneous power |A(t)|^2 in W.
    pub fn power(&self) -> Vec<f64> {
        self.envelope.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Power spectral density per FFT bin in pJ/THz, normalized so that the
    /// sum times the bin width (in THz) equals the pulse energy in pJ.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut buf = self.envelope.clone();
        let mut planner = FftPlanner::new();
        // The "-i omega t" envelope convention puts a +f THz component into
        // the inverse-transform bin at +f, so analyze with the inverse FFT.
        let fft = planner.plan_fft_inverse(self.grid.n);
        fft.process(&mut buf);
        let scale = self.grid.dt_ps * self.grid.dt_ps;
        buf.iter().map(|a| a.norm_sqr() * scale).collect()
    }
}

/// Construct a (possibly chirped) Gaussian pulse.
///
/// The envelope is `sqrt(peak_power) exp(-(1 + iC) t^2 / (2 T0^2))` with T0
/// chosen so the intensity FWHM equals `fwhm_ps`. Positive chirp together
/// with anomalous dispersion gives initial pulse compression.
pub fn gaussian_pulse(
    peak_power_w: f64,
    fwhm_ps: f64,
    carrier_nm: f64,
    chirp: f64,
    grid: GridSpec,
) -> Result<OpticalPulse, PulseError> {
    if peak_power_w < 0.0 {
        return Err(PulseError::InvalidParameter(format!(
            "peak power must be >= 0, got {peak_power_w}"
        )));
    }
    if fwhm_ps <= 0.0 {
        return Err(PulseError::InvalidParameter(format!(
            "FWHM must be > 0, got {fwhm_ps}"
        )));
    }
    if peak_power_w == 0.0 {
        return Ok(OpticalPulse::zero(carrier_nm, grid));
    }
    let samples_across = fwhm_ps / grid.dt_ps;
    if samples_across < 16.0 {
        return Err(PulseError::GridTooCoarse { samples: samples_across });
    }
    // T0 from the intensity FWHM: |A|^2 = P0 exp(-t^2/T0^2).
    let t0 = fwhm_ps / (2.0 * (2f64.ln()).sqrt());
    let amp = peak_power_w.sqrt();
    let envelope: Vec<Complex64> = (0..grid.n)
        .map(|k| {
            let t = grid.time(k);
            let arg = -t * t / (2.0 * t0 * t0);
            amp * (Complex64::new(arg, chirp * arg)).exp()
        })
        .collect();
    let pulse = OpticalPulse { carrier_wavelength_nm: carrier_nm, grid, envelope };

    // Truncation check: analytic energy of the infinite Gaussian vs the grid.
    let analytic_pj = peak_power_w * t0 * std::f64::consts::PI.sqrt();
    let fraction = ((analytic_pj - pulse.energy_pj()) / analytic_pj).abs();
    if fraction > 1e-6 {
        return Err(PulseError::EnergyOutsideGrid { fraction });
    }
    Ok(pulse)
}

/// FWHM of a sampled profile by linear interpolation between the outermost
/// half-maximum crossings. Returns (width, more_than_one_region).
fn fwhm_interpolated(values: &[f64], spacing: f64) -> Option<(f64, bool)> {
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    if max <= 0.0 {
        return None;
    }
    let half = max / 2.0;
    let n = values.len();
    let mut first = None;
    let mut last = None;
    let mut regions = 0usize;
    let mut above = values[0] > half;
    if above {
        regions = 1;
        first = Some(0.0);
    }
    for k in 1..n {
        let was = above;
        above = values[k] > half;
        if above && !was {
            regions += 1;
            let frac = (half - values[k - 1]) / (values[k] - values[k - 1]);
            let x = (k - 1) as f64 + frac;
            if first.is_none() {
                first = Some(x);
            }
        } else if !above && was {
            let frac = (values[k - 1] - half) / (values[k - 1] - values[k]);
            last = Some((k - 1) as f64 + frac);
        }
    }
    if above {
        last = Some((n - 1) as f64);
    }
    match (first, last) {
        (Some(a), Some(b)) if b > a => Some(((b - a) * spacing, regions > 1)),
        _ => None,
    }
}

/// Temporal and spectral widths, TBP, energy and photon number of a pulse.
pub fn pulse_metrics(pulse: &OpticalPulse) -> Result<PulseMetrics, PulseError> {
    let energy_pj = pulse.energy_pj();
    if energy_pj <= 0.0 {
        return Err(PulseError::ZeroPulse);
    }
    let power = pulse.power();
    let (fwhm_ps, ambiguous_t) =
        fwhm_interpolated(&power, pulse.grid.dt_ps).ok_or(PulseError::ZeroPulse)?;

    // Reorder the spectrum to monotone frequency before measuring its width.
    let spec = pulse.spectrum();
    let n = pulse.grid.n;
    let mut ordered = vec![0.0; n];
    for (k, s) in spec.iter().enumerate() {
        let idx = (k + n / 2) % n;
        ordered[idx] = *s;
    }
    let df = 1.0 / (n as f64 * pulse.grid.dt_ps);
    let (spectral_fwhm_thz, ambiguous_f) =
        fwhm_interpolated(&ordered, df).ok_or(PulseError::ZeroPulse)?;

    let lambda = pulse.carrier_wavelength_nm;
    let spectral_fwhm_nm = spectral_fwhm_thz * lambda * lambda / C_NM_PS;
    let photons = energy_pj * 1e-12 / photon_energy_j(lambda);
    Ok(PulseMetrics {
        fwhm_ps,
        spectral_fwhm_nm,
        spectral_fwhm_thz,
        tbp: fwhm_ps * spectral_fwhm_thz,
        energy_pj,
        photons_per_pulse: photons,
        ambiguous_fwhm: ambiguous_t || ambiguous_f,
    })
}

/// Relative difference between time-domain and frequency-domain energy.
/// Should be at machine precision for any pulse (Parseval).
pub fn parseval_residual(pulse: &OpticalPulse) -> f64 {
    let e_t = pulse.energy_pj();
    let df = 1.0 / (pulse.grid.n as f64 * pulse.grid.dt_ps);
    let e_f: f64 = pulse.spectrum().iter().sum::<f64>() * df;
    if e_t == 0.0 {
        0.0
    } else {
        ((e_t - e_f) / e_t).abs()
    }
}

/// Carrier frequency in THz.
pub fn carrier_thz(pulse: &OpticalPulse) -> f64 {
    frequency_thz(pulse.carrier_wavelength_nm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::GAUSSIAN_TBP;

    fn grid() -> GridSpec {
        GridSpec::new(1024, 0.05).unwrap()
    }

    #[test]
    fn transform_limited_gaussian_widths() {
        let p = gaussian_pulse(1.0, 4.0, 1552.5, 0.0, grid()).unwrap();
        let m = pulse_metrics(&p).unwrap();
        assert!((m.fwhm_ps - 4.0).abs() < 0.05, "fwhm {}", m.fwhm_ps);
        assert!((m.tbp - GAUSSIAN_TBP).abs() < 0.002, "tbp {}", m.tbp);
        // 0.441/4 THz at 1552.5 nm is about 0.88 nm
        assert!((m.spectral_fwhm_nm - 0.887).abs() < 0.01, "nm {}", m.spectral_fwhm_nm);
        assert!(!m.ambiguous_fwhm);
    }

    #[test]
    fn zero_power_gives_zero_envelope() {
        let p = gaussian_pulse(0.0, 4.0, 1552.5, 0.0, grid()).unwrap();
        assert_eq!(p.energy_pj(), 0.0);
        assert!(p.envelope.iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn chirp_scales_spectrum_by_sqrt2() {
        let p0 = gaussian_pulse(1.0, 4.0, 1552.5, 0.0, grid()).unwrap();
        let p1 = gaussian_pulse(1.0, 4.0, 1552.5, 1.0, grid()).unwrap();
        let m0 = pulse_metrics(&p0).unwrap();
        let m1 = pulse_metrics(&p1).unwrap();
        assert!((m1.fwhm_ps - m0.fwhm_ps).abs() < 1e-9);
        let ratio = m1.spectral_fwhm_thz / m0.spectral_fwhm_thz;
        assert!((ratio - 2f64.sqrt()).abs() < 0.01, "ratio {ratio}");
        assert!((m1.tbp - GAUSSIAN_TBP * 2f64.sqrt()).abs() < 0.005);
    }

    #[test]
    fn photon_count_at_one_pj() {
        let mut p = gaussian_pulse(1.0, 4.0, 1552.5, 0.0, grid()).unwrap();
        let scale = (1.0 / p.energy_pj()).sqrt();
        for a in &mut p.envelope {
            *a *= scale;
        }
        let m = pulse_metrics(&p).unwrap();
        assert!((m.energy_pj - 1.0).abs() < 1e-9);
        // 1 pJ / (hc/lambda at 1552.5 nm) = 7.8155e6
        assert!((m.photons_per_pulse - 7.8155e6).abs() / 7.8155e6 < 1e-3);
    }

    #[test]
    fn coarse_grid_rejected() {
        let g = GridSpec::new(64, 1.0).unwrap();
        match gaussian_pulse(1.0, 4.0, 1552.5, 0.0, g) {
            Err(PulseError::GridTooCoarse { .. }) => {}
            other => panic!("expected GridTooCoarse, got {other:?}"),
        }
    }

    #[test]
    fn short_grid_rejected() {
        // fine spacing but window only ~2x the FWHM: tails clipped
        let g = GridSpec::new(128, 0.08).unwrap();
        match gaussian_pulse(1.0, 4.0, 1552.5, 0.0, g) {
            Err(PulseError::EnergyOutsideGrid { .. }) => {}
            other => panic!("expected EnergyOutsideGrid, got {other:?}"),
        }
    }

    #[test]
    fn double_peak_flags_ambiguity() {
        let g = grid();
        let mut p = OpticalPulse::zero(1552.5, g);
        let t0 = 2.0 / (2.0 * (2f64.ln()).sqrt());
        for k in 0..g.n {
            let t = g.time(k);
            let a = (-(t - 8.0) * (t - 8.0) / (2.0 * t0 * t0)).exp()
                + (-(t + 8.0) * (t + 8.0) / (2.0 * t0 * t0)).exp();
            p.envelope[k] = Complex64::new(a, 0.0);
        }
        let m = pulse_metrics(&p).unwrap();
        assert!(m.ambiguous_fwhm);
        // outermost crossings: roughly the 16 ps separation plus one width
        assert!(m.fwhm_ps > 16.0);
    }

    #[test]
    fn parseval_holds() {
        let p = gaussian_pulse(2.5, 3.0, 1569.8, 0.7, grid()).unwrap();
        assert!(parseval_residual(&p) < 1e-10);
    }
}
