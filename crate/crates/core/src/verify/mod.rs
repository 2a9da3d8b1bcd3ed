//! Independent oracles and property checks validating every closed form
//! against brute force: quadrature for the conditional entropy-power and
//! Fisher-information identities, a simulated likelihood-ratio detector
//! against the detection-error bound, and Monte Carlo comparisons of the
//! rate-distortion and Cramér-Rao integrands.
//!
//! None of the oracles share a code path with the formulas they check.

pub mod quad;

use crate::channels::{
    d_avg_occupancy, sample_circular_gaussian, wjs_mi_upper_bound_from_avg, KlConvention,
    SystemConfig,
};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::montecarlo::{par_trials, McEstimate};
use crate::nakagami::{
    bcrb_per_x, c_m, inverse_rd_nakagami, mmse_lower_bound_global, mmse_lower_bound_per_x,
    NakagamiParams,
};
use crate::nats::Nats;
use crate::occupancy::{
    detection_bound_from_beam_energy, detection_error_lower_bound, signal_from_gram,
    BoundComposition, OccupancyConfig,
};
use crate::presets;
use rayon::prelude::*;
use serde::Serialize;

/// Outcome of one verification check. `pass` holds exactly when the
/// measured value sits within `tolerance` of the reference (for one-sided
/// checks the measured value is the worst violation and the reference 0).
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckReport {
    fn from_deviation(
        name: &str,
        measured: f64,
        reference: f64,
        tolerance: f64,
        detail: String,
    ) -> Self {
        Self {
            name: name.into(),
            pass: (measured - reference).abs() <= tolerance,
            measured,
            reference,
            tolerance,
            detail,
        }
    }
}

/// Options shared by the verification suite.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Trials for the likelihood-ratio detector simulation.
    pub detector_trials: u64,
    /// Channel draws for the BCRB/RDB ordering comparison.
    pub ordering_draws: u64,
    pub kl: KlConvention,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 1789,
            detector_trials: 20_000,
            ordering_draws: 2_000,
            kl: KlConvention::HalfPrefactor,
        }
    }
}

fn logspace(lo_exp: f64, hi_exp: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 10f64.powf(lo_exp + (hi_exp - lo_exp) * k as f64 / (n - 1) as f64))
        .collect()
}

/// For scalar Rayleigh sensing the inverse rate-distortion value at
/// t = ln(1 + ω p/σ²) must equal the exact Gaussian conditional MMSE
/// ω σ²/(σ² + ω p), an algebraic identity checked to near machine
/// precision across an SNR grid.
pub fn check_rdb_gaussian_equality() -> CheckReport {
    let params = NakagamiParams::new(1.0, 1.0).expect("valid");
    let mut worst = 0.0f64;
    for s in logspace(-2.0, 4.0, 50) {
        let bound = inverse_rd_nakagami(1, &params, Nats((1.0 + s).ln())).expect("valid rate");
        let exact = 1.0 / (1.0 + s);
        worst = worst.max(((bound - exact) / exact).abs());
    }
    CheckReport::from_deviation(
        "rdb-gaussian-equality",
        worst,
        0.0,
        1e-12,
        "max relative gap between the scalar Rayleigh bound and the Gaussian MMSE over 50 SNR points"
            .into(),
    )
}

/// Which high-noise limit to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HighNoiseCase {
    Bernoulli,
    Nakagami,
}

/// As the sensing noise grows the bounds must climb monotonically to the
/// prior risk: min(p₀, p₁) for the detection bound, M·N_s·ω·e^{c_m} for
/// the fading bound (equal to the true prior risk only at m = 1; the
/// e^{c_m} slack is reported for m = 2).
pub fn check_high_noise_tightness(case: HighNoiseCase, sigma_grid: &[f64]) -> CheckReport {
    match case {
        HighNoiseCase::Bernoulli => {
            let occ = presets::occupancy_4x4();
            let energy = occ.system.power_budget() / occ.system.tx_antennas as f64;
            let mut last = -1.0;
            let mut monotone_violation = 0.0f64;
            let mut bound = 0.0;
            for &sigma in sigma_grid {
                let mut scaled = occ.clone();
                scaled.system.sensing_noise_var = sigma * sigma;
                bound = detection_bound_from_beam_energy(
                    energy,
                    &scaled,
                    BoundComposition::TwoStage,
                    KlConvention::HalfPrefactor,
                )
                .expect("valid energy");
                monotone_violation = monotone_violation.max(last - bound);
                last = bound;
            }
            let gap = (0.5 - bound).abs();
            CheckReport::from_deviation(
                "high-noise-bernoulli",
                gap.max(monotone_violation),
                0.0,
                1e-5,
                format!(
                    "detection bound at sigma = {} is {bound}, prior risk 0.5, worst monotonicity violation {monotone_violation:.2e}",
                    sigma_grid.last().unwrap()
                ),
            )
        }
        HighNoiseCase::Nakagami => {
            let mut worst = 0.0f64;
            let mut detail = String::new();
            for m in [1.0, 2.0] {
                let mut cfg = presets::nakagami_mimo(m);
                let slb_prior = 16.0 * c_m(&cfg.sensing_fading).exp();
                let mut last = -1.0;
                let mut monotone_violation = 0.0f64;
                let mut bound = 0.0;
                for &sigma in sigma_grid {
                    cfg.sensing_noise_var = sigma * sigma;
                    bound = mmse_lower_bound_global(&cfg);
                    monotone_violation = monotone_violation.max(last - bound);
                    last = bound;
                }
                let rel_gap = ((bound - slb_prior) / slb_prior).abs();
                worst = worst.max(rel_gap).max(monotone_violation);
                if m == 1.0 {
                    detail.push_str(&format!(
                        "m=1: limit {bound} vs exact prior risk 16 (relative gap {rel_gap:.2e}); "
                    ));
                } else {
                    detail.push_str(&format!(
                        "m=2: limit {bound} sits a factor e^(c_2) = {:.6} below the prior risk 16 (slack {:.2}%)",
                        c_m(&cfg.sensing_fading).exp(),
                        100.0 * (1.0 - c_m(&cfg.sensing_fading).exp())
                    ));
                }
            }
            CheckReport::from_deviation("high-noise-nakagami", worst, 0.0, 1e-6, detail)
        }
    }
}

/// Scalar prior for the conditional entropy-power/Fisher comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StamPrior {
    /// Standard Gaussian: equality case.
    Gaussian,
    /// Two-component mixture ½N(−2,1) + ½N(2,1): strict inequality.
    GaussianMixture,
}

impl StamPrior {
    fn density(&self, v: f64) -> f64 {
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        match self {
            StamPrior::Gaussian => phi(v),
            StamPrior::GaussianMixture => 0.5 * phi(v + 2.0) + 0.5 * phi(v - 2.0),
        }
    }

    /// d/dv ln f(v).
    fn score(&self, v: f64) -> f64 {
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        match self {
            StamPrior::Gaussian => -v,
            StamPrior::GaussianMixture => {
                let a = phi(v + 2.0);
                let b = phi(v - 2.0);
                (-(v + 2.0) * a - (v - 2.0) * b) / (a + b)
            }
        }
    }

    fn extent(&self) -> f64 {
        match self {
            StamPrior::Gaussian => 10.0,
            StamPrior::GaussianMixture => 13.0,
        }
    }
}

/// Conditional entropy power N(V|W) and conditional Fisher information
/// J(V|W) for W = V + σZ, both by two-stage adaptive quadrature
/// (outer w, inner v).
fn entropy_power_and_fisher(prior: StamPrior, sigma: f64) -> Result<(f64, f64)> {
    let tau = 2.0 * std::f64::consts::PI;
    let ext = prior.extent();
    let w_ext = ext + 10.0 * sigma;
    let noise = |z: f64| (-0.5 * (z / sigma).powi(2)).exp() / (tau.sqrt() * sigma);

    let h_v = quad::integrate(
        &|v: f64| {
            let p = prior.density(v);
            if p > 1e-300 {
                -p * p.ln()
            } else {
                0.0
            }
        },
        -ext,
        ext,
        1e-10,
    )?;

    let marginal = |w: f64| {
        quad::integrate(
            &|v: f64| prior.density(v) * noise(w - v),
            (w - 10.0 * sigma).max(-ext),
            (w + 10.0 * sigma).min(ext),
            1e-12,
        )
        .unwrap_or(f64::NAN)
    };

    let h_w = quad::integrate(
        &|w: f64| {
            let p = marginal(w);
            if p > 1e-300 {
                -p * p.ln()
            } else {
                0.0
            }
        },
        -w_ext,
        w_ext,
        1e-9,
    )?;

    // h(V|W) = h(V) + h(W|V) − h(W), with h(W|V) the Gaussian channel term
    let h_v_given_w = h_v + 0.5 * (tau * std::f64::consts::E * sigma * sigma).ln() - h_w;
    let entropy_power = (2.0 * h_v_given_w).exp() / (tau * std::f64::consts::E);

    // J(V|W) = ∬ (∂_v ln f(v|w))² f(v, w) dv dw with the posterior score
    // s(v) + (w − v)/σ²
    let fisher = quad::integrate(
        &|w: f64| {
            quad::integrate(
                &|v: f64| {
                    let score = prior.score(v) + (w - v) / (sigma * sigma);
                    score * score * prior.density(v) * noise(w - v)
                },
                (w - 10.0 * sigma).max(-ext),
                (w + 10.0 * sigma).min(ext),
                1e-12,
            )
            .unwrap_or(f64::NAN)
        },
        -w_ext,
        w_ext,
        1e-9,
    )?;

    if !entropy_power.is_finite() || !fisher.is_finite() {
        return Err(Error::Domain(
            "quadrature returned a non-finite value".into(),
        ));
    }
    Ok((entropy_power, fisher))
}

/// Conditional Stam inequality N(V|W) ≥ 1/J(V|W): equality for a Gaussian
/// prior (checked to 1e-6 against the analytic posterior variance),
/// nonnegative slack for the mixture prior, across a σ grid.
pub fn check_conditional_stam_scalar(prior: StamPrior, sigma_grid: &[f64]) -> CheckReport {
    let results: Vec<(f64, f64, f64)> = sigma_grid
        .par_iter()
        .map(|&sigma| {
            let (n, j) = entropy_power_and_fisher(prior, sigma).unwrap_or((f64::NAN, f64::NAN));
            (sigma, n, j)
        })
        .collect();
    match prior {
        StamPrior::Gaussian => {
            let mut worst = 0.0f64;
            for &(sigma, n, j) in &results {
                if !n.is_finite() || !j.is_finite() {
                    worst = f64::INFINITY;
                    break;
                }
                let exact = sigma * sigma / (1.0 + sigma * sigma);
                worst = worst
                    .max((n - exact).abs())
                    .max((1.0 / j - exact).abs())
                    .max((n - 1.0 / j).abs());
            }
            CheckReport::from_deviation(
                "stam-gaussian",
                worst,
                0.0,
                1e-6,
                format!(
                    "max |N(V|W) − J(V|W)⁻¹| and gap to the posterior variance σ²/(1+σ²) over {} noise levels",
                    sigma_grid.len()
                ),
            )
        }
        StamPrior::GaussianMixture => {
            let mut min_slack = f64::INFINITY;
            for &(_, n, j) in &results {
                min_slack = min_slack.min(n - 1.0 / j);
            }
            CheckReport::from_deviation(
                "stam-mixture",
                min_slack.min(0.0).abs(),
                0.0,
                1e-7,
                format!(
                    "smallest slack N(V|W) − J(V|W)⁻¹ over the grid is {min_slack:.3e} (must be nonnegative)"
                ),
            )
        }
    }
}

/// Empirical error of the exact MAP (likelihood-ratio) detector for the
/// occupancy model at a fixed signal block, with its binomial standard
/// error. Simulates the conditional Gaussian observation exactly,
/// including the diffuse-multipath covariance under occupancy.
pub fn map_detector_error(
    occ: &OccupancyConfig,
    x: &ComplexMatrix,
    n_trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    let cfg = &occ.system;
    let n_dim = cfg.sensing_antennas * cfg.coherence_length;
    let sigma2 = cfg.sensing_noise_var;
    let mu0 = occ.mean_response(false).mul(x).vectorize();
    let mu1 = occ.mean_response(true).mul(x).vectorize();
    let sigma0 = ComplexMatrix::identity(n_dim).scale(sigma2);
    let sigma1 = x
        .adjoint()
        .mul(x)
        .scale(occ.sigma2_diffuse)
        .add_scaled_identity(sigma2)
        .transpose()
        .kron(&ComplexMatrix::identity(cfg.sensing_antennas));
    let laws = [(mu0, sigma0), (mu1, sigma1)];
    let prepared: Vec<(ComplexMatrix, ComplexMatrix, ComplexMatrix, f64)> = laws
        .iter()
        .map(|(mu, sigma)| {
            let inv = sigma.inv_psd()?;
            let factor = sigma.cholesky_factor()?;
            let ln_det = sigma.ln_det_psd()?;
            Ok((mu.clone(), inv, factor, ln_det))
        })
        .collect::<Result<_>>()?;
    let log_prior = [(1.0 - occ.p1).ln(), occ.p1.ln()];

    let errors = par_trials(n_trials, seed, |_, rng| {
        use rand::Rng;
        let actual = usize::from(rng.random::<f64>() < occ.p1);
        let w = sample_circular_gaussian(n_dim, 1, 1.0, rng);
        let y = prepared[actual].0.add(&prepared[actual].2.mul(&w));
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for (a, (mu, inv, _, ln_det)) in prepared.iter().enumerate() {
            let diff = y.sub(mu);
            let score = log_prior[a] - ln_det - inv.quad_form(&diff);
            if score > best_score {
                best_score = score;
                best = a;
            }
        }
        (best != actual) as u8 as f64
    });
    let est = McEstimate::from_values(&errors, seed)?;
    Ok((est.mean, est.stderr))
}

/// The simulated MAP detector must never do better than the rate-distortion
/// detection bound (within 3 standard errors): indistinguishable
/// hypotheses (α = 0), the reference scenario, and a very strong scatterer
/// are all exercised.
pub fn check_detector_vs_bound(opts: &VerifyOptions) -> CheckReport {
    let base = presets::occupancy_4x4();
    let budget = base.system.power_budget();
    let m = base.system.tx_antennas;
    let iso = ComplexMatrix::identity(m).scale(budget / m as f64);
    let x = signal_from_gram(&iso, base.system.coherence_length).expect("T >= M");

    let mut worst = 0.0f64;
    let mut details = Vec::new();
    for (idx, alpha) in [0.0, base.alpha_mag, 5.0].into_iter().enumerate() {
        let mut occ = base.clone();
        occ.alpha_mag = alpha;
        let d_avg = d_avg_occupancy(&x, &occ, opts.kl).expect("finite signal");
        let mi = wjs_mi_upper_bound_from_avg(occ.p1, d_avg).expect("valid prior");
        let bound = detection_error_lower_bound(occ.p1, mi).expect("valid information");
        let (err, se) = map_detector_error(&occ, &x, opts.detector_trials, opts.seed + idx as u64)
            .expect("simulation");
        let violation = (bound - 3.0 * se - err).max(0.0);
        worst = worst.max(violation);
        details.push(format!(
            "alpha={alpha}: empirical {err:.5} (se {se:.1e}) vs bound {bound:.5}"
        ));
    }
    CheckReport::from_deviation("detector-vs-bound", worst, 0.0, 0.0, details.join("; "))
}

/// Orders the two converse families across fading severities: at m = 1/2
/// only the rate-distortion bound exists; at m = 1 both exist (and agree
/// per draw in the scalar case); at m = 2 the Cramér-Rao bound is strictly
/// tighter at the reference SNR, with non-overlapping 3σ intervals.
pub fn check_bcrb_vs_rdb_ordering(opts: &VerifyOptions) -> CheckReport {
    let mut violation = 0.0f64;
    let mut details = Vec::new();

    // m = 1/2: BCRB must refuse, RDB must stand
    let cfg_half = presets::nakagami_mimo(0.5);
    let x0 = ComplexMatrix::zeros(4, 16);
    let bcrb_refused = matches!(
        bcrb_per_x(&x0, &cfg_half),
        Err(Error::BcrbInapplicable { .. })
    );
    let rdb_half = mmse_lower_bound_per_x(&x0, &cfg_half).expect("finite");
    if !bcrb_refused || !(rdb_half.is_finite() && rdb_half > 0.0) {
        violation = violation.max(1.0);
    }
    details.push(format!(
        "m=0.5: BCRB inapplicable = {bcrb_refused}, RDB = {rdb_half:.4}"
    ));

    // m = 1: both finite, and identical per draw in the scalar geometry
    let scalar = SystemConfig::new(
        1,
        1,
        1,
        8,
        2.0,
        1.0,
        1.0,
        NakagamiParams::new(1.0, 1.0).expect("valid"),
        NakagamiParams::new(1.0, 1.0).expect("valid"),
    )
    .expect("valid");
    let scalar_gap: f64 = par_trials(16, opts.seed ^ 0x51a, |_, rng| {
        let x = sample_circular_gaussian(1, 8, scalar.avg_power, rng);
        let rdb = mmse_lower_bound_per_x(&x, &scalar).expect("finite");
        let bcrb = bcrb_per_x(&x, &scalar).expect("m = 1");
        ((rdb - bcrb) / bcrb).abs()
    })
    .into_iter()
    .fold(0.0, f64::max);
    violation = violation.max((scalar_gap - 1e-12).max(0.0));
    details.push(format!(
        "m=1 scalar: max relative RDB/BCRB gap {scalar_gap:.2e}"
    ));

    // m = 2 at the reference SNR under the capacity-achieving input
    let cfg2 = presets::nakagami_mimo(2.0);
    let pairs = par_trials(opts.ordering_draws, opts.seed ^ 0xb2c, |_, rng| {
        let x = sample_circular_gaussian(4, 16, cfg2.avg_power, rng);
        let rdb = mmse_lower_bound_per_x(&x, &cfg2).unwrap_or(f64::NAN);
        let bcrb = bcrb_per_x(&x, &cfg2).unwrap_or(f64::NAN);
        (rdb, bcrb)
    });
    let rdb_vals: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let bcrb_vals: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let rdb_est = McEstimate::from_values(&rdb_vals, opts.seed).expect("enough draws");
    let bcrb_est = McEstimate::from_values(&bcrb_vals, opts.seed).expect("enough draws");
    let margin = bcrb_est.mean - rdb_est.mean;
    let separation = 3.0 * (rdb_est.stderr + bcrb_est.stderr);
    violation = violation.max((separation - margin).max(0.0));
    details.push(format!(
        "m=2: BCRB {:.4e} (se {:.1e}) vs RDB {:.4e} (se {:.1e}), margin {margin:.2e} vs 3σ {separation:.2e}",
        bcrb_est.mean, bcrb_est.stderr, rdb_est.mean, rdb_est.stderr
    ));

    CheckReport::from_deviation(
        "bcrb-vs-rdb-ordering",
        violation,
        0.0,
        0.0,
        details.join("; "),
    )
}

/// Default σ grid for the high-noise checks: six decades.
pub fn high_noise_sigma_grid() -> Vec<f64> {
    logspace(0.0, 6.0, 13)
}

/// Default σ grid for the conditional Stam check.
pub fn stam_sigma_grid() -> Vec<f64> {
    logspace(-1.0, 1.0, 10)
}

/// Runs the whole suite concurrently; the report order is fixed.
pub fn run_all(opts: &VerifyOptions) -> Vec<CheckReport> {
    let checks: Vec<Box<dyn Fn() -> CheckReport + Sync + Send>> = vec![
        Box::new(check_rdb_gaussian_equality),
        Box::new(|| check_high_noise_tightness(HighNoiseCase::Bernoulli, &high_noise_sigma_grid())),
        Box::new(|| check_high_noise_tightness(HighNoiseCase::Nakagami, &high_noise_sigma_grid())),
        Box::new(|| check_conditional_stam_scalar(StamPrior::Gaussian, &stam_sigma_grid())),
        Box::new(|| check_conditional_stam_scalar(StamPrior::GaussianMixture, &stam_sigma_grid())),
        {
            let opts = opts.clone();
            Box::new(move || check_detector_vs_bound(&opts))
        },
        {
            let opts = opts.clone();
            Box::new(move || check_bcrb_vs_rdb_ordering(&opts))
        },
    ];
    checks.par_iter().map(|c| c()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_equality_holds() {
        let r = check_rdb_gaussian_equality();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn high_noise_limits() {
        let grid = high_noise_sigma_grid();
        let r = check_high_noise_tightness(HighNoiseCase::Bernoulli, &grid);
        assert!(r.pass, "{r:?}");
        let r = check_high_noise_tightness(HighNoiseCase::Nakagami, &grid);
        assert!(r.pass, "{r:?}");
        assert!(
            r.detail.contains("10.9"),
            "slack report missing: {}",
            r.detail
        );
    }

    #[test]
    fn stam_gaussian_equality_single_sigma() {
        let (n, j) = entropy_power_and_fisher(StamPrior::Gaussian, 1.0).unwrap();
        assert_relative_eq!(n, 0.5, epsilon = 1e-7);
        assert_relative_eq!(1.0 / j, 0.5, epsilon = 1e-7);
    }

    #[test]
    fn stam_mixture_has_slack_at_moderate_noise() {
        let (n, j) = entropy_power_and_fisher(StamPrior::GaussianMixture, 1.0).unwrap();
        assert!(n - 1.0 / j >= 0.0, "slack {} negative", n - 1.0 / j);
        // the mixture is far from Gaussian here: slack should be visible
        assert!(n - 1.0 / j > 1e-3);
    }

    #[test]
    fn detector_never_beats_bound_small() {
        let opts = VerifyOptions {
            detector_trials: 4_000,
            ..VerifyOptions::default()
        };
        let r = check_detector_vs_bound(&opts);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn ordering_check_small() {
        let opts = VerifyOptions {
            ordering_draws: 300,
            ..VerifyOptions::default()
        };
        let r = check_bcrb_vs_rdb_ordering(&opts);
        assert!(r.pass, "{r:?}");
    }
}
