//! Scenario-driven sweep runners and their deterministic CSV output.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{scenario_hash, tolerance_map, Scenario, SweepAxis};
use crate::constants::{frequency_thz, linear_to_db, wavelength_nm};
use crate::detection::{balance_voa, VoaSearch};
use crate::meanfield::{
    coupled_mode_propagate, LadderError, ModeLadder, SplitStepError, StepControl,
};
use crate::optim::bisect_root;
use crate::pulse::{GridSpec, PulseError};
use crate::quantum::{QuantumChain, QuantumError};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum RunError {
    #[error("sweep point {point}: {source}")]
    AtPoint {
        point: f64,
        #[source]
        source: Box<RunError>,
    },
    #[error(transparent)]
    Ladder(#[from] LadderError),
    #[error(transparent)]
    SplitStep(#[from] SplitStepError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error("gain {g} not reachable below {pump_cap_w} W peak pump")]
    GainUnreachable { g: f64, pump_cap_w: f64 },
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

fn at_point(point: f64) -> impl FnOnce(RunError) -> RunError {
    move |e| RunError::AtPoint { point, source: Box::new(e) }
}

/// Energy-summed ladder result over the pulse slices.
#[derive(Debug, Clone)]
pub struct SlicedLadder {
    /// Energy-weighted seeded gain.
    pub g: f64,
    /// Photon-number asymmetry (I_s - I_in)/I_i of the classical field;
    /// None when the idler stayed empty.
    pub xi: Option<f64>,
    /// Per-mode energy sums, index m + order.
    pub mode_sums: Vec<f64>,
    pub order: usize,
}

impl SlicedLadder {
    pub fn mode_sum(&self, m: i32) -> f64 {
        self.mode_sums[(m + self.order as i32) as usize]
    }

    /// Second-to-first-order sideband ratio in dB (order >= 2).
    pub fn r2_db(&self) -> Option<f64> {
        if self.order < 2 {
            return None;
        }
        let first = self.mode_sum(1).max(self.mode_sum(-1));
        let second = self.mode_sum(2).max(self.mode_sum(-2));
        Some(10.0 * (second / first).log10())
    }
}

/// One pass over the temporal slices of the pump/seed profiles: per-slice
/// coupled-mode solve, energy-summed outputs.
pub fn sliced_ladder(
    scn: &Scenario,
    pump_peak_w: f64,
    seed_peak_w: f64,
    order: usize,
) -> Result<SlicedLadder, RunError> {
    let opts = scn.ladder_options();
    let step = scn.detuning_step_thz();
    let slices = (scn.numerics.pulse_slices.max(3)) | 1;
    let t0p = scn.pump_fwhm_ps() / (2.0 * (2f64.ln()).sqrt());
    let t0s = scn.seed_fwhm_ps() / (2.0 * (2f64.ln()).sqrt());
    let t_max = 3.0 * t0s;

    let mut in_s = 0.0;
    let mut mode_sums = vec![0.0; 2 * order + 1];
    for i in 0..slices {
        let t = -t_max + 2.0 * t_max * i as f64 / (slices - 1) as f64;
        let wp = (-t * t / (t0p * t0p)).exp();
        let ws = (-t * t / (t0s * t0s)).exp();
        // a dark seed still probes with the seed's own profile so the
        // energy weighting matches the seeded case
        let seed_in =
            if seed_peak_w > 0.0 { seed_peak_w } else { crate::meanfield::PROBE_SEED_W } * ws;
        let ladder =
            ModeLadder::seeded(scn.pump.wavelength_nm, step, order, pump_peak_w * wp, seed_in)?;
        let out = coupled_mode_propagate(&ladder, &scn.fiber, &opts)?;
        in_s += ladder.flux(1);
        for (acc, m) in mode_sums.iter_mut().zip(-(order as i32)..=(order as i32)) {
            *acc += out.flux(m);
        }
    }
    let out_s = mode_sums[order + 1];
    let out_i = mode_sums[order - 1];
    let xi = if out_i > 1e-30 { Some((out_s - in_s) / out_i) } else { None };
    Ok(SlicedLadder { g: out_s / in_s, xi, mode_sums, order })
}

/// Pulse-averaged seeded gain at the given peak powers (ladder order 1).
pub fn average_gain(scn: &Scenario, pump_peak_w: f64, seed_peak_w: f64) -> Result<f64, RunError> {
    Ok(sliced_ladder(scn, pump_peak_w, seed_peak_w, 1)?.g)
}

/// Gain the same pump would give an arbitrarily weak probe (the unsaturated
/// reference for the saturation-decorrelation model).
pub fn unsaturated_gain(scn: &Scenario, pump_peak_w: f64) -> Result<f64, RunError> {
    average_gain(scn, pump_peak_w, 0.0)
}

/// Invert the pulse-averaged gain for the peak pump power reaching `g`.
pub fn pump_peak_for_gain(scn: &Scenario, g: f64, seed_peak_w: f64) -> Result<f64, RunError> {
    if g < 1.0 + 1e-12 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    let cap = 1e3;
    while average_gain(scn, hi, seed_peak_w)? < g {
        hi *= 2.0;
        if hi > cap {
            return Err(RunError::GainUnreachable { g, pump_cap_w: cap });
        }
    }
    // bisection is cheap next to the solves and unconditionally stable
    let f = |p: f64| average_gain(scn, p, seed_peak_w).map(|gv| gv - g).unwrap_or(f64::NAN);
    bisect_root(f, 0.0, hi, hi * 1e-6).ok_or(RunError::GainUnreachable { g, pump_cap_w: cap })
}

/// Incoherent gain fraction from the saturation depth 1 - g/g0.
pub fn incoherent_fraction(scn: &Scenario, g: f64, g_unsat: f64) -> f64 {
    if g_unsat <= 1.0 || g >= g_unsat {
        return 0.0;
    }
    let depth = 1.0 - g / g_unsat;
    let knee = scn.saturation.knee;
    let raw = scn.saturation.strength * ((depth - knee) / (1.0 - knee)).max(0.0);
    raw.clamp(0.0, 0.95)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RtRow {
    pub g: f64,
    pub r_t_db: f64,
    pub r_s_db: f64,
    pub r_i_db: f64,
    pub voa_opt: f64,
    pub i1_over_i2: f64,
    pub xi: Option<f64>,
    pub snl_photons: f64,
}

/// The full model at one operating point: mean-field gain and saturation,
/// quantum chain, per-point VOA trim, detection.
pub fn rt_point(scn: &Scenario, pump_peak_w: f64, seed_avg_uw: f64) -> Result<RtRow, RunError> {
    let seed_peak = scn.seed_peak_w(seed_avg_uw);
    let mf = sliced_ladder(scn, pump_peak_w, seed_peak, 1)?;
    let g = mf.g;
    let g0 = unsaturated_gain(scn, pump_peak_w)?;
    let chain = QuantumChain {
        seed: scn.seed_spec(seed_avg_uw),
        gain: g.max(1.0),
        incoherent_fraction: incoherent_fraction(scn, g, g0),
        raman: scn.raman_spec(),
    };
    let state = chain.output_state()?;
    let det = &scn.detection.chain;
    let w = scn.detection.voa_trim_window;
    let search = VoaSearch {
        lo: (det.voa_transmission * (1.0 - w)).max(1e-6),
        hi: (det.voa_transmission * (1.0 + w)).min(1.0),
        x_tol: scn.numerics.voa_search_tol,
    };
    let seed_mean = chain.seed.mean_photons_per_pulse;
    let bal = balance_voa(&state, det, &search, seed_mean)?;
    let obs = crate::quantum::twin_beam_observables(&state, &det.with_voa(bal.voa_opt), seed_mean)?;
    Ok(RtRow {
        g,
        r_t_db: linear_to_db(obs.r_t),
        r_s_db: linear_to_db(obs.r_s),
        r_i_db: linear_to_db(obs.r_i),
        voa_opt: bal.voa_opt,
        i1_over_i2: obs.i1_over_i2,
        xi: mf.xi,
        snl_photons: obs.snl_photons,
    })
}

/// Noise reduction versus gain (or pump power), VOA re-trimmed per point.
pub fn run_rt_vs_gain(scn: &Scenario) -> Result<Vec<RtRow>, RunError> {
    let seed_uw = scn.seed.avg_power_uw;
    let seed_peak = scn.seed_peak_w(seed_uw);
    scn.sweep
        .points
        .par_iter()
        .map(|&point| {
            let pump_peak = match scn.sweep.axis {
                SweepAxis::Gain => pump_peak_for_gain(scn, point, seed_peak),
                SweepAxis::PumpPower => Ok(scn.pump_peak_w(point)),
                SweepAxis::SeedPower => Ok(scn.pump_peak_w(scn.pump.avg_power_mw)),
            }
            .map_err(at_point(point))?;
            let seed = if scn.sweep.axis == SweepAxis::SeedPower { point } else { seed_uw };
            rt_point(scn, pump_peak, seed).map_err(at_point(point))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GainRow {
    pub seed_power_uw: f64,
    pub pump_avg_mw: f64,
    pub g: f64,
}

/// Classical gain versus pump power, one curve per seed power.
pub fn run_gain_vs_pump(scn: &Scenario) -> Result<Vec<GainRow>, RunError> {
    let seeds = scn
        .sweep
        .seed_powers_uw
        .clone()
        .unwrap_or_else(|| vec![scn.seed.avg_power_uw]);
    let mut jobs = Vec::new();
    for &seed_uw in &seeds {
        for &pump_mw in &scn.sweep.points {
            jobs.push((seed_uw, pump_mw));
        }
    }
    jobs.par_iter()
        .map(|&(seed_uw, pump_mw)| {
            let g = average_gain(scn, scn.pump_peak_w(pump_mw), scn.seed_peak_w(seed_uw))
                .map_err(at_point(pump_mw))?;
            Ok(GainRow { seed_power_uw: seed_uw, pump_avg_mw: pump_mw, g })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SpectrumOutput {
    /// (wavelength_nm, power_dbm) ascending in wavelength.
    pub rows: Vec<(f64, f64)>,
    /// Ladder sideband energies, (m, pump-referred W summed over slices).
    pub sidebands: Vec<(i32, f64)>,
    pub r2_db: f64,
    pub gain: f64,
}

/// Fiber output spectrum from the split-step propagator plus the ladder
/// sideband table at the scenario operating point.
pub fn run_spectrum(scn: &Scenario) -> Result<SpectrumOutput, RunError> {
    let pump_peak = scn.pump_peak_w(scn.pump.avg_power_mw);
    let seed_peak = scn.seed_peak_w(scn.seed.avg_power_uw);
    let order = scn.numerics.ladder_order.max(2);
    let mf = sliced_ladder(scn, pump_peak, seed_peak, order)?;

    // composite field: pump at the carrier plus the offset seed
    let grid = GridSpec::new(scn.numerics.grid_n, scn.numerics.grid_dt_ps)?;
    let pump = crate::pulse::gaussian_pulse(
        pump_peak,
        scn.pump_fwhm_ps(),
        scn.pump.wavelength_nm,
        0.0,
        grid,
    )?;
    let seed = crate::pulse::gaussian_pulse(
        seed_peak.max(1e-30),
        scn.seed_fwhm_ps(),
        scn.pump.wavelength_nm,
        0.0,
        grid,
    )?;
    let offset = scn.detuning_step_thz();
    let mut field = pump;
    for (k, a) in field.envelope.iter_mut().enumerate() {
        let t = grid.time(k);
        let phase = -2.0 * std::f64::consts::PI * offset * t;
        *a += seed.envelope[k] * Complex64::from_polar(1.0, phase);
    }
    // effective gamma carries the same temporal-overlap deration
    let mut fiber = scn.fiber.clone();
    fiber.gamma_per_w_km *= scn.numerics.overlap_factor;
    let out = crate::meanfield::split_step_propagate(&field, &fiber, &StepControl::default())?;

    let spec = out.spectrum();
    let n = grid.n;
    let df = 1.0 / (n as f64 * grid.dt_ps);
    let nu0 = frequency_thz(out.carrier_wavelength_nm);
    let mut rows: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let nu = nu0 + grid.freq(k);
            let bin_energy_pj = spec[k] * df;
            let avg_mw = bin_energy_pj * 1e-12 * scn.pump.rep_rate_mhz * 1e6 * 1e3;
            (wavelength_nm(nu), 10.0 * avg_mw.max(1e-30).log10())
        })
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));

    let order_i = order as i32;
    let sidebands: Vec<(i32, f64)> = (-order_i..=order_i).map(|m| (m, mf.mode_sum(m))).collect();
    Ok(SpectrumOutput {
        rows,
        sidebands,
        r2_db: mf.r2_db().unwrap_or(f64::NEG_INFINITY),
        gain: mf.g,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct XiRow {
    pub g: f64,
    pub xi: Option<f64>,
    pub i1_over_i2: f64,
}

/// Photon-number asymmetry versus gain from the classical mean field.
pub fn run_xi_vs_gain(scn: &Scenario) -> Result<Vec<XiRow>, RunError> {
    let seed_uw = scn.seed.avg_power_uw;
    let seed_peak = scn.seed_peak_w(seed_uw);
    scn.sweep
        .points
        .par_iter()
        .map(|&point| {
            let pump_peak = match scn.sweep.axis {
                SweepAxis::Gain => pump_peak_for_gain(scn, point, seed_peak),
                SweepAxis::PumpPower => Ok(scn.pump_peak_w(point)),
                SweepAxis::SeedPower => Ok(scn.pump_peak_w(scn.pump.avg_power_mw)),
            }
            .map_err(at_point(point))?;
            let mf = sliced_ladder(scn, pump_peak, seed_peak, 1).map_err(at_point(point))?;
            let det = &scn.detection.chain;
            let i1_over_i2 = if mf.mode_sum(-1) > 1e-30 {
                det.eta_signal * det.voa_transmission * mf.mode_sum(1)
                    / (det.eta_idler * mf.mode_sum(-1))
            } else {
                f64::INFINITY
            };
            Ok(XiRow { g: mf.g, xi: mf.xi, i1_over_i2 })
        })
        .collect()
}

// ---- deterministic CSV + manifest ------------------------------------------

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub scenario_hash: String,
    pub tool_version: String,
    pub rng_seed: u64,
    pub wall_time_s: f64,
    pub tolerances: std::collections::BTreeMap<String, f64>,
}

/// 9-significant-digit scientific notation, `.` decimal separator.
pub fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.8e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_else(|| "nan".to_string())
}

/// Assemble a CSV document: manifest-hash comment, header row, data rows,
/// LF endings.
pub fn csv_document(hash: &str, header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# manifest {hash} tool twinbeam {TOOL_VERSION}\n"));
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn rt_csv(scn: &Scenario, rng_seed: u64, rows: &[RtRow]) -> String {
    let hash = scenario_hash(scn, rng_seed, TOOL_VERSION);
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_f(r.g),
                fmt_f(r.r_t_db),
                fmt_f(r.r_s_db),
                fmt_f(r.r_i_db),
                fmt_f(r.voa_opt),
                fmt_f(r.i1_over_i2),
                fmt_opt(r.xi),
                fmt_f(r.snl_photons),
            ]
        })
        .collect();
    csv_document(&hash, "g,R_t_db,R_s_db,R_i_db,voa_opt,i1_over_i2,xi,snl_photons", &body)
}

pub fn gain_csv(scn: &Scenario, rng_seed: u64, rows: &[GainRow]) -> String {
    let hash = scenario_hash(scn, rng_seed, TOOL_VERSION);
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![fmt_f(r.seed_power_uw), fmt_f(r.pump_avg_mw), fmt_f(r.g)])
        .collect();
    csv_document(&hash, "seed_power_uW,pump_avg_mW,g", &body)
}

pub fn xi_csv(scn: &Scenario, rng_seed: u64, rows: &[XiRow]) -> String {
    let hash = scenario_hash(scn, rng_seed, TOOL_VERSION);
    let body: Vec<Vec<String>> =
        rows.iter().map(|r| vec![fmt_f(r.g), fmt_opt(r.xi), fmt_f(r.i1_over_i2)]).collect();
    csv_document(&hash, "g,xi,i1_over_i2", &body)
}

pub fn spectrum_csv(scn: &Scenario, rng_seed: u64, out: &SpectrumOutput) -> String {
    let hash = scenario_hash(scn, rng_seed, TOOL_VERSION);
    let mut doc = format!("# manifest {hash} tool twinbeam {TOOL_VERSION}\n");
    doc.push_str(&format!("# seeded_gain {}\n", fmt_f(out.gain)));
    for (m, e) in &out.sidebands {
        doc.push_str(&format!("# sideband m={m} flux {}\n", fmt_f(*e)));
    }
    doc.push_str(&format!("# r2_db {}\n", fmt_f(out.r2_db)));
    doc.push_str("wavelength_nm,power_dbm\n");
    for (wl, p) in &out.rows {
        doc.push_str(&format!("{},{}\n", fmt_f(*wl), fmt_f(*p)));
    }
    doc
}

/// Write the CSV and its sibling manifest (`<out>.manifest.json`).
pub fn write_output(
    path: &Path,
    csv: &str,
    scn: &Scenario,
    rng_seed: u64,
    started: Instant,
) -> Result<(), RunError> {
    std::fs::write(path, csv.as_bytes())?;
    let manifest = RunManifest {
        scenario_hash: scenario_hash(scn, rng_seed, TOOL_VERSION),
        tool_version: TOOL_VERSION.into(),
        rng_seed,
        wall_time_s: started.elapsed().as_secs_f64(),
        tolerances: tolerance_map(scn),
    };
    let mut manifest_path = path.as_os_str().to_owned();
    manifest_path.push(".manifest.json");
    std::fs::write(
        manifest_path,
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_scenario;

    fn scenario(extra: &str) -> Scenario {
        let text = format!(
            r#"
name = "sweep-unit"
[fiber]
length_m = 300.0
gamma_per_W_km = 2.0
zdw_nm = 1551.0
[pump]
wavelength_nm = 1552.5
fwhm_nm = 0.9
avg_power_mW = 1.7
[seed]
wavelength_nm = 1569.8
avg_power_uW = 2.0
[detection]
eta_signal = 0.55
eta_idler = 0.58
[sweep]
axis = "gain"
points = [1.5, 4.0]
[numerics]
pulse_slices = 9
overlap_factor = 0.5
{extra}
"#
        );
        parse_scenario(&text).unwrap()
    }

    #[test]
    fn gain_inversion_roundtrips() {
        let scn = scenario("");
        let seed_peak = scn.seed_peak_w(2.0);
        let p = pump_peak_for_gain(&scn, 10.0, seed_peak).unwrap();
        let g = average_gain(&scn, p, seed_peak).unwrap();
        assert!((g - 10.0).abs() / 10.0 < 1e-4, "g {g}");
    }

    #[test]
    fn zero_pump_gives_unity_gain() {
        let scn = scenario("");
        let g = average_gain(&scn, 0.0, scn.seed_peak_w(2.0)).unwrap();
        assert!((g - 1.0).abs() < 1e-7, "g {g}");
    }

    #[test]
    fn rt_sweep_runs_and_is_ordered() {
        let scn = scenario("");
        let rows = run_rt_vs_gain(&scn).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[0].g - 1.5).abs() < 0.01);
        assert!((rows[1].g - 4.0).abs() < 0.02);
        assert!(rows[1].r_t_db < rows[0].r_t_db, "more gain, more squeezing");
    }

    #[test]
    fn csv_formatting_is_stable() {
        assert_eq!(fmt_f(1.5), "1.50000000e0");
        assert_eq!(fmt_f(0.0), "0.00000000e0");
        assert_eq!(fmt_opt(None), "nan");
        let scn = scenario("");
        let rows = vec![RtRow {
            g: 2.0,
            r_t_db: -1.0,
            r_s_db: 3.0,
            r_i_db: 3.0,
            voa_opt: 1.0,
            i1_over_i2: 1.01,
            xi: None,
            snl_photons: 1e5,
        }];
        let doc = rt_csv(&scn, 1, &rows);
        let lines: Vec<&str> = doc.lines().collect();
        assert!(lines[0].starts_with("# manifest "));
        assert_eq!(lines[1], "g,R_t_db,R_s_db,R_i_db,voa_opt,i1_over_i2,xi,snl_photons");
        assert!(lines[2].contains("nan"));
        assert!(doc.ends_with('\n'));
        assert!(!doc.contains('\r'));
    }
}
