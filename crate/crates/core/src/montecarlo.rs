//! Deterministic, seeded Monte Carlo expectation engine.
//!
//! Every trial owns an independent RNG stream derived from
//! (master seed, trial index), so an estimate is a pure function of its
//! inputs: the same `(fn, n, seed)` triple gives bit-identical results
//! regardless of how many workers execute the trials or in which order
//! they finish. Reduction happens in trial-index order.

use crate::channels::{sample_nakagami_matrix, SystemConfig};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// RNG for one trial: a counter-based stream split of the master seed.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `n` independent trials (possibly in parallel) and returns their
/// outputs in trial-index order.
pub fn par_trials<T, F>(n: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            f(i, &mut rng)
        })
        .collect()
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Trials that entered the estimate.
    pub n: u64,
    pub seed: u64,
    /// Trials excluded for returning a non-finite value.
    pub excluded: u64,
    /// Set when more than 1% of trials were excluded.
    pub flagged: bool,
}

impl McEstimate {
    /// Welford reduction over already-ordered trial values; non-finite
    /// values are excluded and counted.
    pub fn from_values(values: &[f64], seed: u64) -> Result<Self> {
        let mut mean = 0.0f64;
        let mut m2 = 0.0f64;
        let mut k = 0u64;
        let mut excluded = 0u64;
        for &v in values {
            if !v.is_finite() {
                excluded += 1;
                continue;
            }
            k += 1;
            let delta = v - mean;
            mean += delta / k as f64;
            m2 += delta * (v - mean);
        }
        if k < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 finite trials, got {k}"
            )));
        }
        let stderr = (m2 / (k - 1) as f64 / k as f64).sqrt();
        Ok(Self {
            mean,
            stderr,
            n: k,
            seed,
            excluded,
            flagged: excluded * 100 > values.len() as u64,
        })
    }
}

/// Monte Carlo expectation of `f` over `n` seeded trials.
pub fn expect<F>(f: F, n: u64, seed: u64) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2 trials, got {n}")));
    }
    let values = par_trials(n, seed, |_, rng| f(rng));
    McEstimate::from_values(&values, seed)
}

/// Monte Carlo estimate of the ergodic capacity with receiver channel
/// knowledge, E[ln det(I + (P0/σ²_c) H_c H_c†)] over fading draws, in nats
/// per channel use.
pub fn ergodic_capacity_mc(cfg: &SystemConfig, n: u64, seed: u64) -> Result<McEstimate> {
    let snr = cfg.avg_power / cfg.comm_noise_var;
    expect(
        |rng| {
            let h =
                sample_nakagami_matrix(cfg.comm_antennas, cfg.tx_antennas, &cfg.comm_fading, rng);
            capacity_integrand(&h, snr)
        },
        n,
        seed,
    )
}

/// ln det(I + snr·H H†) for one channel draw.
pub fn capacity_integrand(h: &ComplexMatrix, snr: f64) -> f64 {
    h.gram()
        .scale(snr)
        .add_scaled_identity(1.0)
        .ln_det_psd()
        .unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nakagami::NakagamiParams;
    use approx::assert_relative_eq;

    fn rayleigh_cfg(nc: usize, m_tx: usize) -> SystemConfig {
        SystemConfig::new(
            m_tx,
            1,
            nc,
            16,
            10.0,
            1.0,
            1.0,
            NakagamiParams::new(1.0, 1.0).unwrap(),
            NakagamiParams::new(1.0, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn constant_function() {
        let est = expect(|_| 4.25, 100, 3).unwrap();
        assert_eq!(est.mean, 4.25);
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.n, 100);
        assert!(!est.flagged);
    }

    #[test]
    fn rayleigh_power_moment() {
        let params = NakagamiParams::new(1.0, 1.0).unwrap();
        let est = expect(
            |rng| {
                let h = sample_nakagami_matrix(1, 1, &params, rng);
                h.at(0, 0).norm_sqr()
            },
            100_000,
            42,
        )
        .unwrap();
        assert!((est.mean - 1.0).abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| ergodic_capacity_mc(&rayleigh_cfg(2, 2), 500, 99).unwrap())
        };
        let a = run(1);
        let b = run(4);
        let c = run(8);
        assert_eq!(a, b);
        assert_eq!(b, c);
        assert!(a.mean.to_bits() == b.mean.to_bits());
    }

    #[test]
    fn capacity_determinant_forms_agree() {
        let cfg = rayleigh_cfg(3, 2);
        let snr = cfg.avg_power / cfg.comm_noise_var;
        let mut rng = trial_rng(17, 5);
        for _ in 0..10 {
            let h = sample_nakagami_matrix(
                cfg.comm_antennas,
                cfg.tx_antennas,
                &cfg.comm_fading,
                &mut rng,
            );
            let lhs = capacity_integrand(&h, snr);
            let rhs = h
                .adjoint()
                .gram()
                .scale(snr)
                .add_scaled_identity(1.0)
                .ln_det_psd()
                .unwrap();
            assert_relative_eq!(lhs, rhs, epsilon = 1e-9);
        }
    }

    #[test]
    fn stderr_shrinks_with_sqrt_n() {
        let params = NakagamiParams::new(1.0, 1.0).unwrap();
        let f = |rng: &mut ChaCha8Rng| {
            let h = sample_nakagami_matrix(1, 1, &params, rng);
            (1.0 + 10.0 * h.at(0, 0).norm_sqr()).ln()
        };
        let small = expect(f, 20_000, 5).unwrap();
        let big = expect(f, 40_000, 5).unwrap();
        let ratio = small.stderr / big.stderr;
        assert!(
            (ratio - 2f64.sqrt()).abs() < 0.2 * 2f64.sqrt(),
            "ratio {ratio}"
        );
    }

    #[test]
    fn non_finite_trials_are_excluded_and_flagged() {
        let est = expect(
            |rng| {
                use rand::Rng;
                let u: f64 = rng.random();
                if u < 0.05 {
                    f64::NAN
                } else {
                    1.0
                }
            },
            2_000,
            8,
        )
        .unwrap();
        assert_eq!(est.mean, 1.0);
        assert!(est.excluded > 0);
        assert!(est.flagged);
    }
}
