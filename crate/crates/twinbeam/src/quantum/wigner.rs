//! Truncated-Wigner Monte Carlo cross-check of the Gaussian-moment path.
//!
//! Samples the Gaussian Wigner distribution of the chain input, pushes the
//! samples through the same physical maps (squeeze, incoherent gain, Raman
//! noise, detection loss) with freshly sampled vacuum ancillas, and converts
//! symmetrized sample moments to normally-ordered photon statistics:
//! with u = (x^2 + p^2)/4 per mode,
//!   <n> = E[u] - 1/2,  Var(n) = Var(u) - 1/4,  Cov(n_s, n_i) = Cov(u_s, u_i).
//!
//! Sampling is deterministic for a fixed seed and independent of the worker
//! count: samples are drawn in fixed-size chunks, each chunk on its own
//! counter-derived RNG stream, and reduced in chunk order.

use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{QuantumChain, QuantumError, TwinBeamObservables};
use crate::detection::DetectionChain;

/// Per-field standard errors of the Monte Carlo estimates.
#[derive(Debug, Clone, Copy)]
pub struct TwinBeamErrors {
    pub r_t: f64,
    pub r_s: f64,
    pub r_i: f64,
    pub xi: f64,
    pub snl_photons: f64,
    pub i1_over_i2: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct WignerEstimate {
    pub observables: TwinBeamObservables,
    pub errors: TwinBeamErrors,
    pub n_samples: usize,
}

const CHUNK: usize = 8192;

/// Raw accumulator of the per-sample u moments.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    // shifted first/second moments of u_s, u_i and fourth of d = u_s - u_i
    sum_s: f64,
    sum_s2: f64,
    sum_i: f64,
    sum_i2: f64,
    sum_si: f64,
    sum_d: f64,
    sum_d2: f64,
    sum_d3: f64,
    sum_d4: f64,
    shift_s: f64,
    shift_i: f64,
}

impl Moments {
    fn merge_into(mut self, other: &Moments) -> Moments {
        if self.n == 0.0 {
            return *other;
        }
        // re-reference the other accumulator to this shift
        let (ds, di) = (other.shift_s - self.shift_s, other.shift_i - self.shift_i);
        let dd = ds - di;
        self.n += other.n;
        self.sum_s += other.sum_s + other.n * ds;
        self.sum_s2 += other.sum_s2 + 2.0 * ds * other.sum_s + other.n * ds * ds;
        self.sum_i += other.sum_i + other.n * di;
        self.sum_i2 += other.sum_i2 + 2.0 * di * other.sum_i + other.n * di * di;
        self.sum_si += other.sum_si + ds * other.sum_i + di * other.sum_s + other.n * ds * di;
        self.sum_d4 += other.sum_d4
            + 4.0 * dd * other.sum_d3
            + 6.0 * dd * dd * other.sum_d2
            + 4.0 * dd * dd * dd * other.sum_d
            + other.n * dd * dd * dd * dd;
        self.sum_d3 +=
            other.sum_d3 + 3.0 * dd * other.sum_d2 + 3.0 * dd * dd * other.sum_d + other.n * dd * dd * dd;
        self.sum_d2 += other.sum_d2 + 2.0 * dd * other.sum_d + other.n * dd * dd;
        self.sum_d += other.sum_d + other.n * dd;
        self
    }
}

fn run_chunk(
    chunk_index: u64,
    n: usize,
    rng_seed: u64,
    mean: &Vector4<f64>,
    chol: &Matrix4<f64>,
    squeeze: &Matrix4<f64>,
    noise_sigma: [f64; 4],
    eta: (f64, f64),
) -> Moments {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(chunk_index + 1);
    let mut acc = Moments::default();
    let (eta_s, eta_i) = eta;
    let any_noise = noise_sigma.iter().any(|s| *s > 0.0);
    for k in 0..n {
        let draw = |rng: &mut ChaCha8Rng| -> f64 { rng.sample(StandardNormal) };
        let z = Vector4::new(draw(&mut rng), draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let mut v = mean + chol * z;
        v = squeeze * &v;
        if any_noise {
            for j in 0..4 {
                v[j] += noise_sigma[j] * draw(&mut rng);
            }
        }
        // detection loss with vacuum ancillas
        let (ts, ti) = (eta_s.sqrt(), eta_i.sqrt());
        let (vs, vi) = ((1.0 - eta_s).sqrt(), (1.0 - eta_i).sqrt());
        v[0] = ts * v[0] + vs * draw(&mut rng);
        v[1] = ts * v[1] + vs * draw(&mut rng);
        v[2] = ti * v[2] + vi * draw(&mut rng);
        v[3] = ti * v[3] + vi * draw(&mut rng);

        let u_s = 0.25 * (v[0] * v[0] + v[1] * v[1]);
        let u_i = 0.25 * (v[2] * v[2] + v[3] * v[3]);
        if k == 0 {
            acc.shift_s = u_s;
            acc.shift_i = u_i;
        }
        let (a, b) = (u_s - acc.shift_s, u_i - acc.shift_i);
        let d = a - b;
        acc.n += 1.0;
        acc.sum_s += a;
        acc.sum_s2 += a * a;
        acc.sum_i += b;
        acc.sum_i2 += b * b;
        acc.sum_si += a * b;
        acc.sum_d += d;
        acc.sum_d2 += d * d;
        acc.sum_d3 += d * d * d;
        acc.sum_d4 += d * d * d * d;
    }
    acc
}

/// Monte Carlo twin-beam observables with standard errors.
pub fn wigner_monte_carlo(
    chain: &QuantumChain,
    detection: &DetectionChain,
    seed_mean_in: f64,
    n_samples: usize,
    rng_seed: u64,
) -> Result<WignerEstimate, QuantumError> {
    if n_samples < 10_000 {
        return Err(QuantumError::InvalidParameter(format!(
            "need at least 1e4 samples, got {n_samples}"
        )));
    }
    detection.validate().map_err(|e| QuantumError::InvalidParameter(e.to_string()))?;
    let input = super::seed_state(&chain.seed);
    input.check_physical()?;
    let chol = nalgebra::Cholesky::new(input.cov)
        .ok_or_else(|| QuantumError::InvalidParameter("input covariance not positive".into()))?
        .l();
    let squeeze = super::two_mode_squeeze_matrix(chain.gain, 0.0);
    let noise_cov = chain.added_noise_covariance();
    let noise_sigma = [
        noise_cov[(0, 0)].sqrt(),
        noise_cov[(1, 1)].sqrt(),
        noise_cov[(2, 2)].sqrt(),
        noise_cov[(3, 3)].sqrt(),
    ];
    let eta = (detection.eta_signal * detection.voa_transmission, detection.eta_idler);

    let n_chunks = n_samples.div_ceil(CHUNK);
    let chunks: Vec<Moments> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let count = if c == n_chunks - 1 { n_samples - c * CHUNK } else { CHUNK };
            run_chunk(
                c as u64,
                count,
                rng_seed,
                &input.mean,
                &chol,
                &squeeze,
                noise_sigma,
                eta,
            )
        })
        .collect();
    let acc = chunks.iter().fold(Moments::default(), |a, b| a.merge_into(b));

    let n = acc.n;
    let mean_us = acc.sum_s / n + acc.shift_s;
    let mean_ui = acc.sum_i / n + acc.shift_i;
    let var_us = (acc.sum_s2 - acc.sum_s * acc.sum_s / n) / (n - 1.0);
    let var_ui = (acc.sum_i2 - acc.sum_i * acc.sum_i / n) / (n - 1.0);
    let cov_u = (acc.sum_si - acc.sum_s * acc.sum_i / n) / (n - 1.0);
    let mean_d = acc.sum_d / n;
    let var_d = (acc.sum_d2 - acc.sum_d * acc.sum_d / n) / (n - 1.0);
    // central fourth moment of d for the variance standard error
    let m2 = acc.sum_d2 / n - mean_d * mean_d;
    let m4 = (acc.sum_d4 - 4.0 * mean_d * acc.sum_d3 + 6.0 * mean_d * mean_d * acc.sum_d2
        - 3.0 * n * mean_d.powi(4))
        / n;

    let mean_ns = mean_us - 0.5;
    let mean_ni = mean_ui - 0.5;
    let var_ns = var_us - 0.25;
    let var_ni = var_ui - 0.25;
    let var_diff = var_d - 0.5;

    let snl = mean_ns + mean_ni;
    if snl <= 0.0 {
        return Err(QuantumError::NoLight);
    }
    let r_t = var_diff / snl;
    let r_s = var_ns / mean_ns.max(1e-300);
    let r_i = var_ni / mean_ni.max(1e-300);
    let (eta_s_eff, eta_i) = eta;
    let xi = if mean_ni > 1e-9 * mean_ns.max(1.0) {
        Some((mean_ns / eta_s_eff - seed_mean_in) / (mean_ni / eta_i))
    } else {
        None
    };
    let i1_over_i2 = mean_ns / mean_ni;

    // standard errors
    let se_mean_s = (var_us / n).sqrt();
    let se_mean_i = (var_ui / n).sqrt();
    let se_var_d = ((m4 - m2 * m2).max(0.0) / n).sqrt();
    // normal-theory approximation for the per-beam variances
    let se_var_s = var_us * (2.0 / (n - 1.0)).sqrt();
    let se_var_i = var_ui * (2.0 / (n - 1.0)).sqrt();
    let se_snl = ((var_us + var_ui + 2.0 * cov_u) / n).sqrt();
    let se_rt = ((se_var_d / snl).powi(2) + (var_diff * se_snl / (snl * snl)).powi(2)).sqrt();
    let se_rs = ((se_var_s / mean_ns).powi(2)
        + (var_ns * se_mean_s / (mean_ns * mean_ns)).powi(2))
    .sqrt();
    let se_ri = ((se_var_i / mean_ni).powi(2)
        + (var_ni * se_mean_i / (mean_ni * mean_ni)).powi(2))
    .sqrt();
    let se_i1_i2 = if mean_ni > 0.0 {
        i1_over_i2.abs()
            * ((se_mean_s / mean_ns).powi(2) + (se_mean_i / mean_ni).powi(2)).sqrt()
    } else {
        f64::INFINITY
    };
    let se_xi = match xi {
        Some(x) => {
            let num = mean_ns / eta_s_eff - seed_mean_in;
            x.abs()
                * (((se_mean_s / eta_s_eff) / num).powi(2) + (se_mean_i / mean_ni).powi(2)).sqrt()
        }
        None => f64::INFINITY,
    };

    Ok(WignerEstimate {
        observables: TwinBeamObservables { r_t, r_s, r_i, xi, snl_photons: snl, i1_over_i2 },
        errors: TwinBeamErrors {
            r_t: se_rt,
            r_s: se_rs,
            r_i: se_ri,
            xi: se_xi,
            snl_photons: se_snl,
            i1_over_i2: se_i1_i2,
        },
        n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{twin_beam_observables, RamanSpec, SeedSpec};

    fn small_chain() -> QuantumChain {
        QuantumChain {
            seed: SeedSpec { mean_photons_per_pulse: 200.0, excess_noise_db: 6.0 },
            gain: 8.0,
            incoherent_fraction: 0.1,
            raman: RamanSpec { detuning_thz: 2.1, temperature_k: 300.0, raman_fraction: 0.03 },
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let chain = small_chain();
        let det = DetectionChain::equal(0.7);
        let a = wigner_monte_carlo(&chain, &det, 200.0, 20_000, 7).unwrap();
        let b = wigner_monte_carlo(&chain, &det, 200.0, 20_000, 7).unwrap();
        assert_eq!(a.observables.r_t, b.observables.r_t);
        assert_eq!(a.observables.snl_photons, b.observables.snl_photons);
    }

    #[test]
    fn matches_exact_moments_within_three_sigma() {
        let chain = small_chain();
        let det = DetectionChain::equal(0.7);
        let exact = twin_beam_observables(&chain.output_state().unwrap(), &det, 200.0).unwrap();
        let mc = wigner_monte_carlo(&chain, &det, 200.0, 200_000, 11).unwrap();
        let within = |got: f64, want: f64, se: f64, what: &str| {
            assert!(
                (got - want).abs() <= 3.0 * se.max(1e-12),
                "{what}: {got} vs {want} (se {se})"
            );
        };
        within(mc.observables.r_t, exact.r_t, mc.errors.r_t, "r_t");
        within(mc.observables.r_s, exact.r_s, mc.errors.r_s, "r_s");
        within(mc.observables.r_i, exact.r_i, mc.errors.r_i, "r_i");
        within(mc.observables.snl_photons, exact.snl_photons, mc.errors.snl_photons, "snl");
        within(mc.observables.i1_over_i2, exact.i1_over_i2, mc.errors.i1_over_i2, "i1/i2");
        within(mc.observables.xi.unwrap(), exact.xi.unwrap(), mc.errors.xi, "xi");
    }

    #[test]
    fn coherent_input_sits_at_shot_noise() {
        let chain = QuantumChain {
            seed: SeedSpec { mean_photons_per_pulse: 500.0, excess_noise_db: 0.0 },
            gain: 1.0,
            incoherent_fraction: 0.0,
            raman: RamanSpec { detuning_thz: 2.1, temperature_k: 300.0, raman_fraction: 0.0 },
        };
        let det = DetectionChain::equal(1.0);
        let mc = wigner_monte_carlo(&chain, &det, 500.0, 100_000, 3).unwrap();
        assert!((mc.observables.r_s - 1.0).abs() <= 3.0 * mc.errors.r_s);
    }

    #[test]
    fn errors_shrink_with_sample_count() {
        let chain = small_chain();
        let det = DetectionChain::equal(0.7);
        let a = wigner_monte_carlo(&chain, &det, 200.0, 50_000, 5).unwrap();
        let b = wigner_monte_carlo(&chain, &det, 200.0, 100_000, 5).unwrap();
        let ratio = b.errors.r_t / a.errors.r_t;
        assert!(ratio > 0.5 && ratio < 0.9, "ratio {ratio}");
    }
}
