use twinbeam::detection::DetectionChain;
use twinbeam::quantum::*;

fn main() {
    let n = 3.95e5;
    let e_db = twinbeam::constants::linear_to_db(2.98);
    for g in [12.0, 17.0, 24.0, 32.0, 56.0] {
        let chain = QuantumChain {
            seed: SeedSpec { mean_photons_per_pulse: n, excess_noise_db: e_db },
            gain: g,
            incoherent_fraction: 0.0,
            raman: RamanSpec { detuning_thz: 2.1, temperature_k: 300.0, raman_fraction: 0.0 },
        };
        let state = chain.output_state().unwrap();
        let det = DetectionChain::equal(0.55);
        print!("g {g:4.0}:");
        for v in [1.0, 0.997, 0.99, 0.98] {
            let obs = twin_beam_observables(&state, &det.with_voa(v), n).unwrap();
            print!("  v{v}: {:+.3} dB", twinbeam::constants::linear_to_db(obs.r_t));
        }
        println!();
    }
}
