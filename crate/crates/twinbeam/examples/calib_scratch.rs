use num_complex::Complex64;
use twinbeam::config::parse_scenario;
use twinbeam::meanfield::{split_step_propagate, StepControl};
use twinbeam::pulse::{gaussian_pulse, GridSpec};
use twinbeam::sweep::{pump_peak_for_gain, rt_point, sliced_ladder};

fn scenario(
    overlap: f64,
    seed_uw: f64,
    pump_fwhm_nm: f64,
    slope: f64,
    extra: &str,
) -> twinbeam::config::Scenario {
    let text = format!(
        r#"
name = "calib"
[fiber]
length_m = 300.0
gamma_per_W_km = 2.0
zdw_nm = 1551.0
dispersion_slope_ps_nm2_km = {slope}
[pump]
wavelength_nm = 1552.5
fwhm_nm = {pump_fwhm_nm}
avg_power_mW = 1.7
[seed]
wavelength_nm = 1569.8
avg_power_uW = {seed_uw}
[detection]
eta_signal = 0.55
eta_idler = 0.58
[sweep]
axis = "gain"
points = [2.0]
[numerics]
pulse_slices = 33
overlap_factor = {overlap}
{extra}
"#
    );
    parse_scenario(&text).unwrap()
}

fn splitstep_r2(scn: &twinbeam::config::Scenario, pump_peak: f64) -> f64 {
    let grid = GridSpec::new(4096, 0.04).unwrap();
    let pump = gaussian_pulse(pump_peak, scn.pump_fwhm_ps(), 1552.5, 0.0, grid).unwrap();
    let seed =
        gaussian_pulse(scn.seed_peak_w(scn.seed.avg_power_uw), scn.seed_fwhm_ps(), 1552.5, 0.0, grid)
            .unwrap();
    let offset = scn.detuning_step_thz();
    let mut field = pump;
    for (k, a) in field.envelope.iter_mut().enumerate() {
        let t = grid.time(k);
        *a += seed.envelope[k]
            * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * offset * t);
    }
    let mut fiber = scn.fiber.clone();
    fiber.gamma_per_w_km *= scn.numerics.overlap_factor;
    let out = split_step_propagate(&field, &fiber, &StepControl::default()).unwrap();
    let spec = out.spectrum();
    let band = |m: f64| -> f64 {
        let center = m * offset;
        let half = offset.abs() / 2.0;
        (0..grid.n).filter(|&k| (grid.freq(k) - center).abs() < half).map(|k| spec[k]).sum()
    };
    let first = band(1.0).max(band(-1.0));
    let second = band(2.0).max(band(-2.0));
    10.0 * (second / first).log10()
}

const SLOPE: f64 = 0.045;
const OV: f64 = 0.54;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(|s| s.as_str()).unwrap_or("all");

    if mode == "gain56" {
        // overlap calibration for g ~ 56 at 1.7 mW with the chosen slope
        for ov in [0.5, 0.55, 0.6, 0.65] {
            let scn = scenario(ov, 2.0, 0.9, SLOPE, "");
            let p = scn.pump_peak_w(1.7);
            let g = twinbeam::sweep::average_gain(&scn, p, scn.seed_peak_w(2.0)).unwrap();
            println!("slope {SLOPE} ov {ov}: g(1.7 mW) = {g:.2}");
        }
    }

    if mode == "all" || mode == "r2" {
        // bandwidth comparison across dispersion slopes and overlaps
        for slope in [0.045, 0.06, 0.075, 0.09] {
            for (ov09, ov05) in [(0.55, 0.55), (0.55, 0.7)] {
                let s09 = scenario(ov09, 2.0, 0.9, slope, "");
                let s05 = scenario(ov05, 2.0, 0.5, slope, "");
                let p09 = pump_peak_for_gain(&s09, 20.0, s09.seed_peak_w(2.0)).unwrap();
                let p05 = pump_peak_for_gain(&s05, 20.0, s05.seed_peak_w(2.0)).unwrap();
                let r09 = splitstep_r2(&s09, p09);
                let r05 = splitstep_r2(&s05, p05);
                println!(
                    "slope {slope:.3} ov ({ov09},{ov05}): r2(0.9nm) {r09:6.2}  r2(0.5nm) {r05:6.2}  diff {:+5.2} dB",
                    r05 - r09
                );
            }
        }
    }

    if mode == "all" || mode == "turning" {
        for (knee, strength) in [(0.1, 0.5), (0.15, 0.5), (0.15, 0.8), (0.2, 0.8)] {
            println!("--- knee {knee} strength {strength}");
            for seed_uw in [2.0, 5.0, 15.0] {
                let e_db = twinbeam::constants::linear_to_db(1.0 + 14.85 * seed_uw / 15.0);
                let extra = format!("[saturation]\nknee = {knee}\nstrength = {strength}\n");
                let mut scn = scenario(OV, seed_uw, 0.9, SLOPE, &extra);
                scn.seed.excess_noise_db = e_db;
                let seed_peak = scn.seed_peak_w(seed_uw);
                print!("  seed {seed_uw:5.1} uW R_t(g):");
                let (mut best_g, mut best_rt) = (0.0, f64::INFINITY);
                for g_t in [3.0, 5.0, 7.0, 9.0, 11.0, 14.0, 17.0, 21.0, 26.0, 32.0, 40.0, 48.0, 56.0, 66.0] {
                    match pump_peak_for_gain(&scn, g_t, seed_peak) {
                        Ok(p) => {
                            let row = rt_point(&scn, p, seed_uw).unwrap();
                            if row.r_t_db < best_rt {
                                best_rt = row.r_t_db;
                                best_g = g_t;
                            }
                            print!(" {g_t:.0}:{:+.2}", row.r_t_db);
                        }
                        Err(_) => print!(" {g_t:.0}:x"),
                    }
                }
                println!("  => min {best_rt:+.2} dB at g {best_g:.0}");
            }
        }
    }

    if mode == "fig6" {
        // 77 K scenario sanity at g = 56
        let extra = "[saturation]\nknee = 0.2\nstrength = 0.5\n[raman]\nraman_fraction = 0.03\ntemperature_K = 77.0\n";
        let mut scn = scenario(0.55, 2.0, 0.9, 0.075, extra);
        scn.detection.chain.eta_signal = 0.53;
        scn.detection.chain.eta_idler = 0.57;
        scn.seed.excess_noise_db = 4.7;
        let seed_peak = scn.seed_peak_w(2.0);
        let p = pump_peak_for_gain(&scn, 56.0, seed_peak).unwrap();
        let row = rt_point(&scn, p, 2.0).unwrap();
        println!("77K g=56: R_t {:+.2} dB voa {:.4} i1/i2 {:.4}", row.r_t_db, row.voa_opt, row.i1_over_i2);
    }

    if mode == "depths" {
        debug_depths();
    }

    let _ = sliced_ladder;
}

#[allow(dead_code)]
fn debug_depths() {
    for seed_uw in [2.0, 5.0] {
        let extra = "[saturation]\nknee = 0.25\nstrength = 0.6\n";
        let scn = scenario(OV, seed_uw, 0.9, SLOPE, extra);
        let seed_peak = scn.seed_peak_w(seed_uw);
        print!("seed {seed_uw} uW: (g, depth, phi):");
        for g_t in [12.0, 17.0, 24.0, 32.0, 42.0, 56.0] {
            let p = pump_peak_for_gain(&scn, g_t, seed_peak).unwrap();
            let g0 = twinbeam::sweep::unsaturated_gain(&scn, p).unwrap();
            let phi = twinbeam::sweep::incoherent_fraction(&scn, g_t, g0);
            print!("  ({g_t:.0}, {:.3}, {:.3})", 1.0 - g_t / g0, phi);
        }
        println!();
    }
}
