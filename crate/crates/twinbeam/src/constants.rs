//! Physical constants and unit conversions.
//!
//! Internal unit system: time in ps, propagation distance in km, wavelengths
//! in nm, optical power in W. With these choices `power * time` is directly
//! in pJ and `c` below is in nm/ps, which keeps dispersion coefficients in
//! the conventional ps^2/km and ps^3/km.

/// Planck constant, J*s (exact SI).
pub const PLANCK_J_S: f64 = 6.626_070_15e-34;

/// Boltzmann constant, J/K (exact SI).
pub const BOLTZMANN_J_K: f64 = 1.380_649e-23;

/// Speed of light, m/s (exact SI).
pub const C_M_S: f64 = 299_792_458.0;

/// Speed of light in nm/ps (equivalently um/ns); handy because nm * THz = nm/ps.
pub const C_NM_PS: f64 = C_M_S * 1e-3;

/// Time-bandwidth product of a transform-limited Gaussian pulse
/// (FWHM in time times FWHM in frequency), 2 ln2 / pi.
pub const GAUSSIAN_TBP: f64 = 0.441_271_200_305_303_6;

/// Energy of one photon at vacuum wavelength `lambda_nm`, in J.
pub fn photon_energy_j(lambda_nm: f64) -> f64 {
    PLANCK_J_S * C_M_S / (lambda_nm * 1e-9)
}

/// Optical frequency (THz) of vacuum wavelength `lambda_nm`.
pub fn frequency_thz(lambda_nm: f64) -> f64 {
    C_NM_PS / lambda_nm
}

/// Vacuum wavelength (nm) of optical frequency `nu_thz`.
pub fn wavelength_nm(nu_thz: f64) -> f64 {
    C_NM_PS / nu_thz
}

/// Linear power ratio from dB.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// dB from a linear power ratio.
pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Photons per pulse for a pulse train of `avg_power_w` average power at
/// repetition rate `rep_rate_mhz`, carried at `lambda_nm`.
pub fn photons_per_pulse(avg_power_w: f64, rep_rate_mhz: f64, lambda_nm: f64) -> f64 {
    let pulse_energy_j = avg_power_w / (rep_rate_mhz * 1e6);
    pulse_energy_j / photon_energy_j(lambda_nm)
}
