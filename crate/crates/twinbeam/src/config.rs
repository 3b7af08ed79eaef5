//! Scenario files: `[section]` headers with `key = value` pairs (TOML
//! subset), strict about unknown keys, with every violation reported by key
//! path in one pass.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Serialize;
use toml::Value;

use crate::constants::{frequency_thz, photons_per_pulse, GAUSSIAN_TBP};
use crate::detection::DetectionChain;
use crate::fiber::FiberSpec;
use crate::meanfield::{LadderOptions, OdeOptions};
use crate::quantum::{RamanSpec, SeedSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigViolation {
    pub path: String,
    pub reason: String,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.reason)
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    Parse(String),
    Invalid(Vec<ConfigViolation>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "cannot read config: {e}"),
            ConfigError::Parse(e) => write!(f, "cannot parse config: {e}"),
            ConfigError::Invalid(v) => {
                writeln!(f, "{} config violation(s):", v.len())?;
                for violation in v {
                    writeln!(f, "  {violation}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepAxis {
    Gain,
    PumpPower,
    SeedPower,
}

#[derive(Debug, Clone, Serialize)]
pub struct PumpSpec {
    pub wavelength_nm: f64,
    pub fwhm_nm: f64,
    pub avg_power_mw: f64,
    pub rep_rate_mhz: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedBeam {
    pub wavelength_nm: f64,
    pub fwhm_nm: f64,
    pub avg_power_uw: f64,
    pub excess_noise_db: f64,
    /// Transmission of the input coupler feeding the fiber.
    pub coupler_transmission: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SaturationSpec {
    /// Saturation depth 1 - g/g0 where decorrelation starts.
    pub knee: f64,
    /// Fraction of the log-gain turned incoherent past the knee.
    pub strength: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub points: Vec<f64>,
    pub seed_powers_uw: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Numerics {
    pub ode_abs_tol: f64,
    pub ode_rel_tol: f64,
    pub pulse_slices: usize,
    pub overlap_factor: f64,
    pub ladder_order: usize,
    pub grid_n: usize,
    pub grid_dt_ps: f64,
    pub voa_search_tol: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            ode_abs_tol: 1e-10,
            ode_rel_tol: 1e-8,
            pulse_slices: 33,
            overlap_factor: 1.0,
            ladder_order: 2,
            grid_n: 2048,
            grid_dt_ps: 0.05,
            voa_search_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RamanSection {
    pub raman_fraction: f64,
    /// Defaults to the pump-seed detuning when absent.
    pub detuning_thz: Option<f64>,
    /// Defaults to the fiber temperature when absent.
    pub temperature_k: Option<f64>,
    /// Lumped Stokes gain; defaults to 2 gamma f_R when absent.
    pub stokes_gain_per_w_km: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectionSection {
    pub chain: DetectionChain,
    /// Fractional VOA trim allowed when a sweep re-optimizes per point.
    pub voa_trim_window: f64,
}

/// A complete named experiment configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub name: String,
    pub rng_seed: u64,
    pub fiber: FiberSpec,
    pub pump: PumpSpec,
    pub seed: SeedBeam,
    pub raman: RamanSection,
    pub detection: DetectionSection,
    pub saturation: SaturationSpec,
    pub sweep: SweepSpec,
    pub numerics: Numerics,
}

impl Scenario {
    /// Transform-limited pump duration implied by the pump filter bandwidth.
    pub fn pump_fwhm_ps(&self) -> f64 {
        let dv = self.pump.fwhm_nm * crate::constants::C_NM_PS
            / (self.pump.wavelength_nm * self.pump.wavelength_nm);
        GAUSSIAN_TBP / dv
    }

    /// Transform-limited seed duration implied by its filter bandwidth.
    pub fn seed_fwhm_ps(&self) -> f64 {
        let lambda = self.seed.wavelength_nm;
        let dv = self.seed.fwhm_nm * crate::constants::C_NM_PS / (lambda * lambda);
        GAUSSIAN_TBP / dv
    }

    /// Signed ladder step: seed frequency minus pump frequency (negative for
    /// a red-side signal).
    pub fn detuning_step_thz(&self) -> f64 {
        frequency_thz(self.seed.wavelength_nm) - frequency_thz(self.pump.wavelength_nm)
    }

    /// Peak power of a transform-limited Gaussian pulse train.
    fn peak_power_w(avg_power_w: f64, rep_rate_mhz: f64, fwhm_ps: f64) -> f64 {
        let energy_pj = avg_power_w / (rep_rate_mhz * 1e6) * 1e12;
        let t0 = fwhm_ps / (2.0 * (2f64.ln()).sqrt());
        energy_pj / (t0 * std::f64::consts::PI.sqrt())
    }

    pub fn pump_peak_w(&self, avg_power_mw: f64) -> f64 {
        Self::peak_power_w(avg_power_mw * 1e-3, self.pump.rep_rate_mhz, self.pump_fwhm_ps())
    }

    pub fn seed_peak_w(&self, avg_power_uw: f64) -> f64 {
        Self::peak_power_w(
            avg_power_uw * 1e-6 * self.seed.coupler_transmission,
            self.pump.rep_rate_mhz,
            self.seed_fwhm_ps(),
        )
    }

    pub fn seed_photons(&self, avg_power_uw: f64) -> f64 {
        photons_per_pulse(
            avg_power_uw * 1e-6 * self.seed.coupler_transmission,
            self.pump.rep_rate_mhz,
            self.seed.wavelength_nm,
        )
    }

    pub fn raman_spec(&self) -> RamanSpec {
        RamanSpec {
            detuning_thz: self.raman.detuning_thz.unwrap_or_else(|| self.detuning_step_thz().abs()),
            temperature_k: self.raman.temperature_k.unwrap_or(self.fiber.temperature_k),
            raman_fraction: self.raman.raman_fraction,
        }
    }

    pub fn seed_spec(&self, avg_power_uw: f64) -> SeedSpec {
        SeedSpec {
            mean_photons_per_pulse: self.seed_photons(avg_power_uw),
            excess_noise_db: self.seed.excess_noise_db,
        }
    }

    pub fn ladder_options(&self) -> LadderOptions {
        LadderOptions {
            ode: OdeOptions {
                abs_tol: self.numerics.ode_abs_tol,
                rel_tol: self.numerics.ode_rel_tol,
                ..Default::default()
            },
            overlap_factor: self.numerics.overlap_factor,
            raman_gain_per_w_km: self.raman.stokes_gain_per_w_km.unwrap_or_else(|| {
                2.0 * self.fiber.gamma_per_w_km * self.raman.raman_fraction
            }),
            include_loss: self.fiber.propagation_loss_db > 0.0,
        }
    }

    pub fn averaging(&self) -> crate::meanfield::PulseAveraging {
        crate::meanfield::PulseAveraging::On {
            pump_fwhm_ps: self.pump_fwhm_ps(),
            seed_fwhm_ps: self.seed_fwhm_ps(),
            slices: self.numerics.pulse_slices,
        }
    }
}

// ---- strict parsing -------------------------------------------------------

struct Section<'a> {
    path: String,
    table: Option<&'a toml::map::Map<String, Value>>,
    errors: Vec<ConfigViolation>,
    seen: Vec<String>,
}

impl<'a> Section<'a> {
    fn new(path: &str, table: Option<&'a toml::map::Map<String, Value>>) -> Self {
        Self { path: path.into(), table, errors: Vec::new(), seen: Vec::new() }
    }

    fn key_path(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{}", self.path, key)
        }
    }

    fn raw(&mut self, key: &str) -> Option<&'a Value> {
        self.seen.push(key.to_string());
        self.table.and_then(|t| t.get(key))
    }

    fn f64_req(&mut self, key: &str) -> Option<f64> {
        match self.raw(key) {
            Some(v) => self.as_f64(key, v),
            None => {
                self.errors.push(ConfigViolation {
                    path: self.key_path(key),
                    reason: "missing required key".into(),
                });
                None
            }
        }
    }

    fn f64_opt(&mut self, key: &str, default: f64) -> f64 {
        match self.raw(key) {
            Some(v) => self.as_f64(key, v).unwrap_or(default),
            None => default,
        }
    }

    fn f64_maybe(&mut self, key: &str) -> Option<f64> {
        match self.raw(key) {
            Some(v) => self.as_f64(key, v),
            None => None,
        }
    }

    fn usize_opt(&mut self, key: &str, default: usize) -> usize {
        match self.raw(key) {
            Some(Value::Integer(i)) if *i >= 0 => *i as usize,
            Some(_) => {
                self.errors.push(ConfigViolation {
                    path: self.key_path(key),
                    reason: "expected a non-negative integer".into(),
                });
                default
            }
            None => default,
        }
    }

    fn as_f64(&mut self, key: &str, v: &Value) -> Option<f64> {
        match v {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.errors.push(ConfigViolation {
                    path: self.key_path(key),
                    reason: format!("expected a number, got {}", v.type_str()),
                });
                None
            }
        }
    }

    fn string_req(&mut self, key: &str) -> Option<String> {
        match self.raw(key) {
            Some(Value::String(s)) => Some(s.clone()),
            Some(v) => {
                self.errors.push(ConfigViolation {
                    path: self.key_path(key),
                    reason: format!("expected a string, got {}", v.type_str()),
                });
                None
            }
            None => {
                self.errors.push(ConfigViolation {
                    path: self.key_path(key),
                    reason: "missing required key".into(),
                });
                None
            }
        }
    }

    fn f64_array_req(&mut self, key: &str) -> Option<Vec<f64>> {
        match self.raw(key) {
            Some(Value::Array(a)) => {
                let mut out = Vec::with_capacity(a.len());
                for v in a {
                    match v {
                        Value::Float(f) => out.push(*f),
                        Value::Integer(i) => out.push(*i as f64),
                        _ => {
                            self.errors.push(ConfigViolation {
                                path: self.key_path(key),
                                reason: "array elements must be numbers".into(),
                            });
                            return None;
                        }
                    }
                }
                Some(out)
            }
            Some(v) => {
                self.errors.push(ConfigViolation {
                    path: self.key_path(key),
                    reason: format!("expected an array, got {}", v.type_str()),
                });
                None
            }
            None => {
                self.errors.push(ConfigViolation {
                    path: self.key_path(key),
                    reason: "missing required key".into(),
                });
                None
            }
        }
    }

    fn f64_array_maybe(&mut self, key: &str) -> Option<Vec<f64>> {
        match self.raw(key) {
            Some(Value::Array(_)) => {
                // re-borrow through the required path for uniform errors
                self.seen.pop();
                self.f64_array_req(key)
            }
            Some(v) => {
                self.errors.push(ConfigViolation {
                    path: self.key_path(key),
                    reason: format!("expected an array, got {}", v.type_str()),
                });
                None
            }
            None => None,
        }
    }

    fn check(&mut self, cond: bool, key: &str, reason: &str) {
        if !cond {
            self.errors
                .push(ConfigViolation { path: self.key_path(key), reason: reason.into() });
        }
    }

    fn finish(mut self) -> Vec<ConfigViolation> {
        if let Some(t) = self.table {
            for key in t.keys() {
                if !self.seen.iter().any(|s| s == key) {
                    self.errors.push(ConfigViolation {
                        path: self.key_path(key),
                        reason: "unknown key".into(),
                    });
                }
            }
        }
        self.errors
    }
}

const SECTIONS: &[&str] =
    &["fiber", "pump", "seed", "raman", "detection", "saturation", "sweep", "numerics"];
const REQUIRED_SECTIONS: &[&str] = &["fiber", "pump", "seed", "detection", "sweep"];

/// Parse and validate a scenario from TOML text.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    let root: Value = text.parse().map_err(|e| ConfigError::Parse(format!("{e}")))?;
    let root = match root {
        Value::Table(t) => t,
        _ => return Err(ConfigError::Parse("top level must be a table".into())),
    };
    let mut errors: Vec<ConfigViolation> = Vec::new();

    for key in root.keys() {
        if key != "name" && key != "rng_seed" && !SECTIONS.contains(&key.as_str()) {
            errors.push(ConfigViolation {
                path: key.clone(),
                reason: "unknown section or key".into(),
            });
        }
    }
    for section in REQUIRED_SECTIONS {
        if !root.contains_key(*section) {
            errors.push(ConfigViolation {
                path: String::new(),
                reason: format!("missing section: {section}"),
            });
        }
    }

    let section_table = |name: &str| -> Option<&toml::map::Map<String, Value>> {
        root.get(name).and_then(|v| v.as_table())
    };
    for name in SECTIONS {
        if let Some(v) = root.get(*name) {
            if v.as_table().is_none() {
                errors.push(ConfigViolation {
                    path: (*name).into(),
                    reason: "must be a [section] table".into(),
                });
            }
        }
    }

    // top-level scalars
    let name = match root.get("name") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => {
            errors.push(ConfigViolation { path: "name".into(), reason: "must be a string".into() });
            String::new()
        }
        None => {
            errors
                .push(ConfigViolation { path: "name".into(), reason: "missing required key".into() });
            String::new()
        }
    };
    let rng_seed = match root.get("rng_seed") {
        Some(Value::Integer(i)) if *i >= 0 => *i as u64,
        Some(_) => {
            errors.push(ConfigViolation {
                path: "rng_seed".into(),
                reason: "must be a non-negative integer".into(),
            });
            1
        }
        None => 1,
    };

    // fiber
    let mut s = Section::new("fiber", section_table("fiber"));
    let length_m = s.f64_req("length_m").unwrap_or(300.0);
    let gamma = s.f64_req("gamma_per_W_km").unwrap_or(2.0);
    let zdw = s.f64_req("zdw_nm").unwrap_or(1551.0);
    let slope = s.f64_opt("dispersion_slope_ps_nm2_km", 0.075);
    let temp = s.f64_opt("temperature_K", 300.0);
    let loss = s.f64_opt("propagation_loss_dB", 0.0);
    s.check(length_m > 0.0, "length_m", "must be > 0");
    s.check(gamma >= 0.0, "gamma_per_W_km", "must be >= 0");
    s.check(temp > 0.0, "temperature_K", "must be > 0");
    s.check(loss >= 0.0, "propagation_loss_dB", "must be >= 0");
    errors.extend(s.finish());
    let fiber = FiberSpec {
        length_m,
        gamma_per_w_km: gamma,
        zdw_nm: zdw,
        dispersion_slope_ps_nm2_km: slope,
        temperature_k: temp,
        propagation_loss_db: loss,
    };

    // pump
    let mut s = Section::new("pump", section_table("pump"));
    let pump_wl = s.f64_req("wavelength_nm").unwrap_or(1552.5);
    let pump_fwhm = s.f64_req("fwhm_nm").unwrap_or(0.9);
    let pump_avg = s.f64_opt("avg_power_mW", 1.7);
    let rep = s.f64_opt("rep_rate_MHz", 40.0);
    s.check(pump_wl > 0.0, "wavelength_nm", "must be > 0");
    s.check(pump_fwhm > 0.0, "fwhm_nm", "must be > 0");
    s.check(pump_avg >= 0.0, "avg_power_mW", "must be >= 0");
    s.check(rep > 0.0, "rep_rate_MHz", "must be > 0");
    errors.extend(s.finish());
    let pump =
        PumpSpec { wavelength_nm: pump_wl, fwhm_nm: pump_fwhm, avg_power_mw: pump_avg, rep_rate_mhz: rep };

    // seed
    let mut s = Section::new("seed", section_table("seed"));
    let seed_wl = s.f64_req("wavelength_nm").unwrap_or(1569.8);
    let seed_fwhm = s.f64_opt("fwhm_nm", 1.2);
    let seed_uw = s.f64_req("avg_power_uW").unwrap_or(2.0);
    let excess = s.f64_opt("excess_noise_db", 0.0);
    let coupler = s.f64_opt("coupler_transmission", 1.0);
    s.check(seed_wl > 0.0, "wavelength_nm", "must be > 0");
    s.check(seed_fwhm > 0.0, "fwhm_nm", "must be > 0");
    s.check(seed_uw >= 0.0, "avg_power_uW", "must be >= 0");
    s.check(excess >= 0.0, "excess_noise_db", "must be >= 0");
    s.check(coupler > 0.0 && coupler <= 1.0, "coupler_transmission", "must be in (0, 1]");
    errors.extend(s.finish());
    let seed = SeedBeam {
        wavelength_nm: seed_wl,
        fwhm_nm: seed_fwhm,
        avg_power_uw: seed_uw,
        excess_noise_db: excess,
        coupler_transmission: coupler,
    };

    // raman (optional)
    let mut s = Section::new("raman", section_table("raman"));
    let fraction = s.f64_opt("raman_fraction", 0.0);
    let detuning = s.f64_maybe("detuning_THz");
    let raman_temp = s.f64_maybe("temperature_K");
    let stokes = s.f64_maybe("stokes_gain_per_W_km");
    s.check((0.0..=1.0).contains(&fraction), "raman_fraction", "must be in [0, 1]");
    if let Some(d) = detuning {
        s.check(d > 0.0, "detuning_THz", "must be > 0");
    }
    if let Some(t) = raman_temp {
        s.check(t > 0.0, "temperature_K", "must be > 0");
    }
    errors.extend(s.finish());
    let raman = RamanSection {
        raman_fraction: fraction,
        detuning_thz: detuning,
        temperature_k: raman_temp,
        stokes_gain_per_w_km: stokes,
    };

    // detection
    let mut s = Section::new("detection", section_table("detection"));
    let eta_s = s.f64_req("eta_signal").unwrap_or(0.55);
    let eta_i = s.f64_req("eta_idler").unwrap_or(0.58);
    let voa = s.f64_opt("voa_transmission", 1.0);
    let elec = s.f64_opt("electronic_noise_db_below_snl", 10.0);
    let det_freq = s.f64_opt("detection_frequency_MHz", 3.0);
    let rbw = s.f64_opt("resolution_bandwidth_kHz", 100.0);
    let trim = s.f64_opt("voa_trim_window", 0.01);
    s.check(eta_s > 0.0 && eta_s <= 1.0, "eta_signal", "must be in (0, 1]");
    s.check(eta_i > 0.0 && eta_i <= 1.0, "eta_idler", "must be in (0, 1]");
    s.check(voa > 0.0 && voa <= 1.0, "voa_transmission", "must be in (0, 1]");
    s.check(elec >= 0.0, "electronic_noise_db_below_snl", "must be >= 0");
    s.check((0.0..1.0).contains(&trim), "voa_trim_window", "must be in [0, 1)");
    errors.extend(s.finish());
    let detection = DetectionSection {
        chain: DetectionChain {
            eta_signal: eta_s,
            eta_idler: eta_i,
            voa_transmission: voa,
            electronic_noise_db_below_snl: elec,
            detection_frequency_mhz: det_freq,
            resolution_bandwidth_khz: rbw,
        },
        voa_trim_window: trim,
    };

    // saturation (optional)
    let mut s = Section::new("saturation", section_table("saturation"));
    let knee = s.f64_opt("knee", 0.0);
    let strength = s.f64_opt("strength", 0.0);
    s.check((0.0..1.0).contains(&knee), "knee", "must be in [0, 1)");
    s.check((0.0..=1.0).contains(&strength), "strength", "must be in [0, 1]");
    errors.extend(s.finish());
    let saturation = SaturationSpec { knee, strength };

    // sweep
    let mut s = Section::new("sweep", section_table("sweep"));
    let axis = match s.string_req("axis").as_deref() {
        Some("gain") => SweepAxis::Gain,
        Some("pump_power") => SweepAxis::PumpPower,
        Some("seed_power") => SweepAxis::SeedPower,
        Some(other) => {
            s.errors.push(ConfigViolation {
                path: "sweep.axis".into(),
                reason: format!("must be gain | pump_power | seed_power, got {other}"),
            });
            SweepAxis::Gain
        }
        None => SweepAxis::Gain,
    };
    let points = s.f64_array_req("points").unwrap_or_default();
    if points.is_empty() {
        s.errors.push(ConfigViolation {
            path: "sweep.points".into(),
            reason: "needs at least one point".into(),
        });
    }
    if points.windows(2).any(|w| w[1] <= w[0]) {
        s.errors.push(ConfigViolation {
            path: "sweep.points".into(),
            reason: "points must be strictly increasing".into(),
        });
    }
    let seed_powers = s.f64_array_maybe("seed_powers_uW");
    errors.extend(s.finish());
    let sweep = SweepSpec { axis, points, seed_powers_uw: seed_powers };

    // numerics (optional)
    let mut s = Section::new("numerics", section_table("numerics"));
    let d = Numerics::default();
    let numerics = Numerics {
        ode_abs_tol: s.f64_opt("ode_abs_tol", d.ode_abs_tol),
        ode_rel_tol: s.f64_opt("ode_rel_tol", d.ode_rel_tol),
        pulse_slices: s.usize_opt("pulse_slices", d.pulse_slices),
        overlap_factor: s.f64_opt("overlap_factor", d.overlap_factor),
        ladder_order: s.usize_opt("ladder_order", d.ladder_order),
        grid_n: s.usize_opt("grid_n", d.grid_n),
        grid_dt_ps: s.f64_opt("grid_dt_ps", d.grid_dt_ps),
        voa_search_tol: s.f64_opt("voa_search_tol", d.voa_search_tol),
    };
    s.check(numerics.pulse_slices >= 3, "pulse_slices", "must be >= 3");
    s.check(numerics.ladder_order >= 1, "ladder_order", "must be >= 1");
    s.check(numerics.grid_n.is_power_of_two(), "grid_n", "must be a power of two");
    s.check(numerics.grid_dt_ps > 0.0, "grid_dt_ps", "must be > 0");
    errors.extend(s.finish());

    if !errors.is_empty() {
        return Err(ConfigError::Invalid(errors));
    }
    Ok(Scenario {
        name,
        rng_seed,
        fiber,
        pump,
        seed,
        raman,
        detection,
        saturation,
        sweep,
        numerics,
    })
}

/// Load and validate a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(ConfigError::Io)?;
    parse_scenario(&text)
}

/// Canonical content hash of (scenario, seed, version) for the manifest.
pub fn scenario_hash(scenario: &Scenario, rng_seed: u64, version: &str) -> String {
    use sha2::{Digest, Sha256};
    let canonical = serde_json::to_string(scenario).unwrap_or_default();
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    hasher.update(rng_seed.to_le_bytes());
    hasher.update(version.as_bytes());
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect::<Vec<_>>().join("")
}

/// Tolerances recorded in run manifests, keyed by name.
pub fn tolerance_map(scn: &Scenario) -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("ode_abs_tol".into(), scn.numerics.ode_abs_tol),
        ("ode_rel_tol".into(), scn.numerics.ode_rel_tol),
        ("voa_search_tol".into(), scn.numerics.voa_search_tol),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "unit"
[fiber]
length_m = 300.0
gamma_per_W_km = 2.0
zdw_nm = 1551.0
[pump]
wavelength_nm = 1552.5
fwhm_nm = 0.9
[seed]
wavelength_nm = 1569.8
avg_power_uW = 2.0
[detection]
eta_signal = 0.55
eta_idler = 0.58
[sweep]
axis = "gain"
points = [2.0, 5.0, 10.0]
"#;

    #[test]
    fn minimal_scenario_parses() {
        let scn = parse_scenario(MINIMAL).unwrap();
        assert_eq!(scn.name, "unit");
        assert_eq!(scn.rng_seed, 1);
        assert!((scn.pump_fwhm_ps() - 3.94).abs() < 0.05);
        assert!((scn.seed_fwhm_ps() - 3.02).abs() < 0.05);
        assert!((scn.detuning_step_thz() + 2.128).abs() < 0.01);
        // 2 uW at 40 MHz and 1569.8 nm is about 3.95e5 photons per pulse
        assert!((scn.seed_photons(2.0) - 3.95e5).abs() / 3.95e5 < 0.01);
    }

    #[test]
    fn empty_file_reports_missing_sections() {
        match parse_scenario("") {
            Err(ConfigError::Invalid(v)) => {
                assert!(v.iter().any(|e| e.reason == "missing section: fiber"), "{v:?}");
                assert!(v.iter().any(|e| e.reason == "missing section: sweep"));
            }
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_voa_rejected() {
        let text = MINIMAL.replace(
            "eta_idler = 0.58",
            "eta_idler = 0.58\nvoa_transmission = 1.5",
        );
        match parse_scenario(&text) {
            Err(ConfigError::Invalid(v)) => {
                assert!(
                    v.iter().any(|e| e.path == "detection.voa_transmission"
                        && e.reason.contains("(0, 1]")),
                    "{v:?}"
                );
            }
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        // a stray key lands in whichever section precedes it
        let text = MINIMAL.replace("[sweep]", "typo_key = 1\n[sweep]");
        match parse_scenario(&text) {
            Err(ConfigError::Invalid(v)) => {
                assert!(v.iter().any(|e| e.path == "detection.typo_key"), "{v:?}");
            }
            other => panic!("expected Invalid, got {other:?}"),
        }
        let text2 = MINIMAL.replace("length_m = 300.0", "length_m = 300.0\nbogus = 2");
        match parse_scenario(&text2) {
            Err(ConfigError::Invalid(v)) => {
                assert!(v.iter().any(|e| e.path == "fiber.bogus"), "{v:?}");
            }
            other => panic!("expected Invalid, got {other:?}"),
        }
        // genuinely top-level unknown key
        let text3 = MINIMAL.replace("name = \"unit\"", "name = \"unit\"\nstray = 1");
        match parse_scenario(&text3) {
            Err(ConfigError::Invalid(v)) => {
                assert!(v.iter().any(|e| e.path == "stray"), "{v:?}");
            }
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn non_monotone_sweep_rejected() {
        let text = MINIMAL.replace("[2.0, 5.0, 10.0]", "[2.0, 2.0]");
        assert!(matches!(parse_scenario(&text), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn hash_stable_and_seed_sensitive() {
        let scn = parse_scenario(MINIMAL).unwrap();
        let a = scenario_hash(&scn, 1, "0.1.0");
        let b = scenario_hash(&scn, 1, "0.1.0");
        let c = scenario_hash(&scn, 2, "0.1.0");
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 16);
    }
}
