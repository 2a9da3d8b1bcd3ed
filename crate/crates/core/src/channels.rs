//! System configuration, fading-channel/signal sampling, and the Gaussian
//! information measures (log-det mutual information, Gaussian KL, and the
//! weighted Jensen–Shannon bound on binary mutual information).

use crate::error::{Error, Result};
use crate::mathfn::{binary_entropy, kl_bernoulli_flip};
use crate::matrix::ComplexMatrix;
use crate::nakagami::NakagamiParams;
use crate::nats::Nats;
use crate::occupancy::OccupancyConfig;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

/// Scalar system parameters for one scenario.
///
/// The total power budget over a coherence block is
/// `tx_antennas * avg_power * coherence_length`.
#[derive(Debug, Clone)]
pub struct SystemConfig {
    /// Transmit antennas (M).
    pub tx_antennas: usize,
    /// Sensing receive antennas (N_s).
    pub sensing_antennas: usize,
    /// Communication receive antennas (N_c).
    pub comm_antennas: usize,
    /// Coherence length in symbols (T).
    pub coherence_length: usize,
    /// Per-antenna average power (P0).
    pub avg_power: f64,
    /// Sensing noise variance per complex entry.
    pub sensing_noise_var: f64,
    /// Communication noise variance per complex entry.
    pub comm_noise_var: f64,
    /// Fading law of the sensing channel entries.
    pub sensing_fading: NakagamiParams,
    /// Fading law of the communication channel entries.
    pub comm_fading: NakagamiParams,
}

impl SystemConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        tx_antennas: usize,
        sensing_antennas: usize,
        comm_antennas: usize,
        coherence_length: usize,
        avg_power: f64,
        sensing_noise_var: f64,
        comm_noise_var: f64,
        sensing_fading: NakagamiParams,
        comm_fading: NakagamiParams,
    ) -> Result<Self> {
        for (name, v) in [
            ("tx_antennas", tx_antennas),
            ("sensing_antennas", sensing_antennas),
            ("comm_antennas", comm_antennas),
            ("coherence_length", coherence_length),
        ] {
            if v < 1 {
                return Err(Error::Domain(format!("{name} must be >= 1")));
            }
        }
        for (name, v) in [
            ("avg_power", avg_power),
            ("sensing_noise_var", sensing_noise_var),
            ("comm_noise_var", comm_noise_var),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            tx_antennas,
            sensing_antennas,
            comm_antennas,
            coherence_length,
            avg_power,
            sensing_noise_var,
            comm_noise_var,
            sensing_fading,
            comm_fading,
        })
    }

    /// Total power budget M·P0·T, the trace constraint on E[XX†].
    pub fn power_budget(&self) -> f64 {
        self.tx_antennas as f64 * self.avg_power * self.coherence_length as f64
    }

    /// ω_s/σ²_s, the per-unit-power sensing gain.
    pub fn sensing_gain(&self) -> f64 {
        self.sensing_fading.omega() / self.sensing_noise_var
    }
}

/// A complex Gaussian law CN(mean, cov).
#[derive(Debug, Clone)]
pub struct GaussianLaw {
    mean: ComplexMatrix,
    cov: ComplexMatrix,
}

impl GaussianLaw {
    pub fn new(mean: ComplexMatrix, cov: ComplexMatrix) -> Result<Self> {
        if mean.cols() != 1 {
            return Err(Error::Structure("mean must be a column vector".into()));
        }
        if cov.rows() != mean.rows() || cov.cols() != mean.rows() {
            return Err(Error::Structure(format!(
                "covariance is {}x{} but the mean has dimension {}",
                cov.rows(),
                cov.cols(),
                mean.rows()
            )));
        }
        if !cov.is_hermitian() || !cov.is_psd() {
            return Err(Error::Structure("covariance must be Hermitian PSD".into()));
        }
        Ok(Self { mean, cov })
    }

    pub fn dim(&self) -> usize {
        self.mean.rows()
    }

    pub fn mean(&self) -> &ComplexMatrix {
        &self.mean
    }

    pub fn cov(&self) -> &ComplexMatrix {
        &self.cov
    }
}

/// Which prefactor the complex-Gaussian KL divergence carries.
///
/// `HalfPrefactor` is the printed convention this library reproduces by
/// default: ½[tr(Σ₁⁻¹Σ₀) + Δμ†Σ₁⁻¹Δμ − n + ln det Σ₁/det Σ₀]. `Standard`
/// drops the ½, the usual convention for circularly-symmetric complex
/// Gaussians.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KlConvention {
    #[default]
    HalfPrefactor,
    Standard,
}

/// Draws an iid complex Nakagami(m, ω) matrix: each entry is N·e^{jΘ} with
/// N² ~ Gamma(m, ω/m) and Θ uniform, so E[|entry|²] = ω. At m = 1 the
/// entries are circular complex Gaussians of variance ω.
pub fn sample_nakagami_matrix<R: Rng>(
    rows: usize,
    cols: usize,
    params: &NakagamiParams,
    rng: &mut R,
) -> ComplexMatrix {
    let gamma = Gamma::new(params.m(), params.omega() / params.m())
        .expect("NakagamiParams guarantees positive shape and scale");
    let mut m = ComplexMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            let amplitude = gamma.sample(rng).sqrt();
            let phase = rng.random::<f64>() * std::f64::consts::TAU;
            m.set(i, j, Complex64::from_polar(amplitude, phase));
        }
    }
    m
}

/// Draws an iid circular complex Gaussian matrix with per-entry variance.
pub fn sample_circular_gaussian<R: Rng>(
    rows: usize,
    cols: usize,
    variance: f64,
    rng: &mut R,
) -> ComplexMatrix {
    let std = (variance / 2.0).sqrt();
    let normal = rand_distr::StandardNormal;
    let mut m = ComplexMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            let re: f64 = normal.sample(rng);
            let im: f64 = normal.sample(rng);
            m.set(i, j, Complex64::new(re * std, im * std));
        }
    }
    m
}

/// Gaussian-maximum-entropy bound on the sensing mutual information for a
/// fixed signal block x: N_s · ln det(I_M + (ω_s/σ²_s) x x†).
pub fn gaussian_mi_sensing(x: &ComplexMatrix, cfg: &SystemConfig) -> Result<Nats> {
    if !x.is_finite() {
        return Err(Error::Domain("signal block has non-finite entries".into()));
    }
    gaussian_mi_sensing_from_gram(&x.gram(), cfg)
}

/// Same bound evaluated directly on a Gram/covariance matrix G = x x† (or
/// a block covariance E[XX†]).
pub fn gaussian_mi_sensing_from_gram(gram: &ComplexMatrix, cfg: &SystemConfig) -> Result<Nats> {
    if !gram.is_finite() {
        return Err(Error::Domain("Gram matrix has non-finite entries".into()));
    }
    let arg = gram.scale(cfg.sensing_gain()).add_scaled_identity(1.0);
    Ok(Nats(cfg.sensing_antennas as f64 * arg.ln_det_psd()?))
}

/// Per-realization communication rate with receiver channel knowledge:
/// ln det(I_{N_c} + H_c Q H_c† / (T σ²_c)) in nats per channel use, where
/// Q is the block covariance E[XX†] under the trace budget M·P0·T.
pub fn ergodic_rate_csir(
    h_c: &ComplexMatrix,
    q: &ComplexMatrix,
    cfg: &SystemConfig,
) -> Result<Nats> {
    if !q.is_hermitian() || !q.is_psd() {
        return Err(Error::Domain("covariance must be Hermitian PSD".into()));
    }
    let budget = cfg.power_budget();
    if q.trace_real() > budget * (1.0 + 1e-9) {
        return Err(Error::Domain(format!(
            "covariance trace {} exceeds the power budget {budget}",
            q.trace_real()
        )));
    }
    let scale = 1.0 / (cfg.coherence_length as f64 * cfg.comm_noise_var);
    let arg = h_c
        .mul(q)
        .mul(&h_c.adjoint())
        .scale(scale)
        .add_scaled_identity(1.0);
    Ok(Nats(arg.ln_det_psd()?))
}

/// KL divergence D(q₀ ‖ q₁) between complex Gaussian laws, under the chosen
/// prefactor convention. Σ₁ must be invertible.
pub fn kl_gaussian(q0: &GaussianLaw, q1: &GaussianLaw, conv: KlConvention) -> Result<Nats> {
    if q0.dim() != q1.dim() {
        return Err(Error::Structure(
            "dimension mismatch between the two laws".into(),
        ));
    }
    let n = q0.dim();
    let (vals, _) = q1.cov().eigh();
    let max = vals.iter().cloned().fold(0.0f64, f64::max);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 1e-12 * max {
        return Err(Error::Singular(
            "second covariance is singular or near-singular".into(),
        ));
    }
    let sigma1_inv = q1.cov().inv_psd()?;
    let trace_term = sigma1_inv.mul(q0.cov()).trace_real();
    let delta = q1.mean().sub(q0.mean());
    let quad = sigma1_inv.quad_form(&delta);
    let ld = q1.cov().ln_det_psd()? - q0.cov().ln_det_psd()?;
    let raw = trace_term + quad - n as f64 + ld;
    Ok(match conv {
        KlConvention::HalfPrefactor => Nats(0.5 * raw),
        KlConvention::Standard => Nats(raw),
    })
}

/// Upper bound on the binary mutual information I(A; Y) via the weighted
/// Jensen–Shannon divergence:
/// H₂(p₁) − ln(1 + e^{−D(A‖1−A) − D_avg}), D_avg = p₀·KL(q₀‖q₁) + p₁·KL(q₁‖q₀).
/// The result is clamped into [0, H₂(p₁)]; degenerate priors yield 0.
pub fn wjs_mi_upper_bound(p1: f64, kl01: Nats, kl10: Nats) -> Result<Nats> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::Domain(format!("prior {p1} not in [0,1]")));
    }
    if kl01.0.is_nan() || kl10.0.is_nan() || kl01.0 < 0.0 || kl10.0 < 0.0 {
        return Err(Error::Domain("KL divergences must be nonnegative".into()));
    }
    if p1 == 0.0 || p1 == 1.0 {
        return Ok(Nats::ZERO);
    }
    let d_avg = (1.0 - p1) * kl01.0 + p1 * kl10.0;
    wjs_mi_upper_bound_from_avg(p1, Nats(d_avg))
}

/// The same bound when the prior-weighted average KL is already in hand.
pub fn wjs_mi_upper_bound_from_avg(p1: f64, d_avg: Nats) -> Result<Nats> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::Domain(format!("prior {p1} not in [0,1]")));
    }
    if d_avg.0.is_nan() || d_avg.0 < 0.0 {
        return Err(Error::Domain("average KL must be nonnegative".into()));
    }
    if p1 == 0.0 || p1 == 1.0 {
        return Ok(Nats::ZERO);
    }
    let h = binary_entropy(p1)?.0;
    let flip = kl_bernoulli_flip(p1)?.0;
    let bound = h - (-flip - d_avg.0).exp().ln_1p();
    Ok(Nats(bound.clamp(0.0, h)))
}

/// The prior-weighted average KL between the two occupancy hypotheses for a
/// fixed signal block x, evaluated term by term from the closed form (with
/// β_W = σ²_W/σ²_s and G = x x†):
///
/// ½·[ p₀·N_s·tr((β_W G + I)⁻¹) + p₁·N_s·β_W·tr(G)
///     + (|α|²/σ²_s)(v†Gv − p₀·β_W·v†G(I + β_W G)⁻¹Gv)
///     − p₀·N_s·M + (p₀−p₁)·N_s·ln det(β_W G + I) ]
///
/// Every β_W term vanishes identically at σ²_W = 0, leaving
/// (|α|²/(2σ²_s))·v†Gv.
pub fn d_avg_occupancy(
    x: &ComplexMatrix,
    occ: &OccupancyConfig,
    conv: KlConvention,
) -> Result<Nats> {
    if !x.is_finite() {
        return Err(Error::Domain("signal block has non-finite entries".into()));
    }
    d_avg_occupancy_from_gram(&x.gram(), occ, conv)
}

/// [`d_avg_occupancy`] evaluated directly on a Gram matrix G = x x†.
pub fn d_avg_occupancy_from_gram(
    gram: &ComplexMatrix,
    occ: &OccupancyConfig,
    conv: KlConvention,
) -> Result<Nats> {
    let cfg = &occ.system;
    let p1 = occ.p1;
    let p0 = 1.0 - p1;
    let n_s = cfg.sensing_antennas as f64;
    let m = cfg.tx_antennas as f64;
    let sigma2_s = cfg.sensing_noise_var;
    let beta_w = occ.sigma2_diffuse / sigma2_s;
    let alpha2 = occ.alpha_mag * occ.alpha_mag;
    let v = &occ.steering;

    let quad_plain = gram.quad_form(v);
    let raw = if beta_w == 0.0 {
        // every β_W term vanishes identically: the trace term cancels the
        // −p₀·N_s·M term and the log-det is zero
        alpha2 / sigma2_s * quad_plain
    } else {
        let shifted = gram.scale(beta_w).add_scaled_identity(1.0);
        let shifted_inv = shifted.inv_psd()?;
        let t1 = p0 * n_s * shifted_inv.trace_real();
        let gv = gram.mul(v);
        let t3_correction = p0 * beta_w * shifted_inv.quad_form(&gv);
        let t5 = (p0 - p1) * n_s * shifted.ln_det_psd()?;
        let t2 = p1 * n_s * beta_w * gram.trace_real();
        let t3 = alpha2 / sigma2_s * (quad_plain - t3_correction);
        let t4 = -p0 * n_s * m;
        t1 + t2 + t3 + t4 + t5
    };
    Ok(match conv {
        KlConvention::HalfPrefactor => Nats(0.5 * raw),
        KlConvention::Standard => Nats(raw),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::trial_rng;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn small_cfg() -> SystemConfig {
        SystemConfig::new(
            4,
            4,
            4,
            16,
            2.0,
            1.0,
            0.5,
            NakagamiParams::new(1.0, 1.0).unwrap(),
            NakagamiParams::new(1.0, 0.25).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn nakagami_sampling_moments() {
        let n = 100_000usize;
        for (m, omega, fourth) in [(1.0, 1.0, 2.0), (2.0, 1.0, 1.5), (0.5, 2.0, 12.0)] {
            let params = NakagamiParams::new(m, omega).unwrap();
            let mut rng = trial_rng(7, 0);
            let mat = sample_nakagami_matrix(1, n, &params, &mut rng);
            let mut sum_mag2 = 0.0;
            let mut sum_mag4 = 0.0;
            let mut sum_re = 0.0;
            for j in 0..n {
                let h = mat.at(0, j);
                let mag2 = h.norm_sqr();
                sum_mag2 += mag2;
                sum_mag4 += mag2 * mag2;
                sum_re += h.re;
            }
            let mean2 = sum_mag2 / n as f64;
            let mean4 = sum_mag4 / n as f64;
            // E|h|² = ω with var(|h|²) = ω²/m
            let se2 = (omega * omega / m / n as f64).sqrt();
            assert!(
                (mean2 - omega).abs() < 3.5 * se2,
                "m={m}: E|h|^2 = {mean2}, expected {omega}"
            );
            // E|h|⁴ = ω²(1 + 1/m)
            assert!(
                (mean4 - fourth).abs() < 0.05 * fourth,
                "m={m}: E|h|^4 = {mean4}, expected {fourth}"
            );
            // uniform phase: zero mean
            let se_re = (omega / 2.0 / n as f64).sqrt();
            assert!((sum_re / n as f64).abs() < 4.0 * se_re);
        }
    }

    #[test]
    fn sensing_mi_scalar_and_zero() {
        let cfg = SystemConfig::new(
            1,
            3,
            1,
            8,
            1.0,
            0.5,
            1.0,
            NakagamiParams::new(1.0, 2.0).unwrap(),
            NakagamiParams::new(1.0, 1.0).unwrap(),
        )
        .unwrap();
        let x = ComplexMatrix::zeros(1, 8);
        assert_eq!(gaussian_mi_sensing(&x, &cfg).unwrap().0, 0.0);
        // M = 1, ‖x‖² = p: N_s ln(1 + ω p/σ²)
        let mut x = ComplexMatrix::zeros(1, 8);
        x.set(0, 0, Complex64::new(1.5, 2.0));
        let p = 1.5f64 * 1.5 + 4.0;
        assert_relative_eq!(
            gaussian_mi_sensing(&x, &cfg).unwrap().0,
            3.0 * (1.0 + 2.0 * p / 0.5).ln(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn sensing_mi_sylvester_symmetry() {
        let cfg = small_cfg();
        let mut rng = trial_rng(11, 3);
        let x = sample_circular_gaussian(4, 16, 1.3, &mut rng);
        let lhs = gaussian_mi_sensing(&x, &cfg).unwrap().0;
        // T×T determinant form
        let gram_t = x.adjoint().gram();
        let arg = gram_t.scale(cfg.sensing_gain()).add_scaled_identity(1.0);
        let rhs = cfg.sensing_antennas as f64 * arg.ln_det_psd().unwrap();
        assert_relative_eq!(lhs, rhs, epsilon = 1e-9);
    }

    #[test]
    fn csir_rate_anchors() {
        let cfg = small_cfg();
        let q = ComplexMatrix::zeros(4, 4);
        let h = ComplexMatrix::identity(4);
        assert_eq!(ergodic_rate_csir(&h, &q, &cfg).unwrap().0, 0.0);

        // scalar AWGN: ln(1 + P0/σ²)
        let cfg1 = SystemConfig::new(
            1,
            1,
            1,
            16,
            2.0,
            1.0,
            0.5,
            NakagamiParams::new(1.0, 1.0).unwrap(),
            NakagamiParams::new(1.0, 1.0).unwrap(),
        )
        .unwrap();
        let h = ComplexMatrix::identity(1);
        let q = ComplexMatrix::from_real_diagonal(&[cfg1.avg_power * 16.0]);
        assert_relative_eq!(
            ergodic_rate_csir(&h, &q, &cfg1).unwrap().0,
            (1.0f64 + 2.0 / 0.5).ln(),
            max_relative = 1e-12
        );

        // isotropic Q matches the fixed-channel capacity form
        let mut rng = trial_rng(5, 9);
        let h = sample_circular_gaussian(4, 4, 0.7, &mut rng);
        let q = ComplexMatrix::identity(4).scale(cfg.avg_power * 16.0);
        let lhs = ergodic_rate_csir(&h, &q, &cfg).unwrap().0;
        let arg = h
            .gram()
            .scale(cfg.avg_power / cfg.comm_noise_var)
            .add_scaled_identity(1.0);
        assert_relative_eq!(lhs, arg.ln_det_psd().unwrap(), epsilon = 1e-12);

        // power budget is enforced
        let q = ComplexMatrix::identity(4).scale(cfg.power_budget());
        assert!(ergodic_rate_csir(&h, &q, &cfg).is_err());
        let neg = ComplexMatrix::from_real_diagonal(&[1.0, -0.5, 1.0, 1.0]);
        assert!(ergodic_rate_csir(&h, &neg, &cfg).is_err());
    }

    #[test]
    fn kl_gaussian_anchors() {
        let id = |n| ComplexMatrix::identity(n);
        let zero_mean = |n| ComplexMatrix::zeros(n, 1);
        let q = GaussianLaw::new(zero_mean(3), id(3)).unwrap();
        assert_eq!(
            kl_gaussian(&q, &q, KlConvention::HalfPrefactor).unwrap().0,
            0.0
        );

        // scalar mean shift: |μ|²/2 under the half-prefactor convention
        let mu = ComplexMatrix::column(&[Complex64::new(0.6, -0.8)]);
        let q0 = GaussianLaw::new(zero_mean(1), id(1)).unwrap();
        let q1 = GaussianLaw::new(mu, id(1)).unwrap();
        assert_relative_eq!(
            kl_gaussian(&q0, &q1, KlConvention::HalfPrefactor)
                .unwrap()
                .0,
            0.5,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            kl_gaussian(&q0, &q1, KlConvention::Standard).unwrap().0,
            1.0,
            max_relative = 1e-12
        );

        // scalar variance mismatch: ½(½ − 1 + ln 2)
        let q0 = GaussianLaw::new(zero_mean(1), id(1)).unwrap();
        let q1 = GaussianLaw::new(zero_mean(1), id(1).scale(2.0)).unwrap();
        assert_relative_eq!(
            kl_gaussian(&q0, &q1, KlConvention::HalfPrefactor)
                .unwrap()
                .0,
            0.09657359027997265,
            max_relative = 1e-12
        );

        // singular target covariance is rejected
        let q1 =
            GaussianLaw::new(zero_mean(2), ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).unwrap();
        let q0 = GaussianLaw::new(zero_mean(2), id(2)).unwrap();
        assert!(kl_gaussian(&q0, &q1, KlConvention::HalfPrefactor).is_err());
    }

    #[test]
    fn kl_gaussian_nonnegative_random() {
        let mut rng = trial_rng(21, 0);
        for _ in 0..20 {
            let a = sample_circular_gaussian(3, 3, 1.0, &mut rng);
            let b = sample_circular_gaussian(3, 3, 1.0, &mut rng);
            let q0 = GaussianLaw::new(
                sample_circular_gaussian(3, 1, 1.0, &mut rng),
                a.gram().add_scaled_identity(0.1),
            )
            .unwrap();
            let q1 = GaussianLaw::new(
                sample_circular_gaussian(3, 1, 1.0, &mut rng),
                b.gram().add_scaled_identity(0.1),
            )
            .unwrap();
            let kl = kl_gaussian(&q0, &q1, KlConvention::HalfPrefactor)
                .unwrap()
                .0;
            assert!(kl >= -1e-12, "negative KL {kl}");
        }
    }

    #[test]
    fn wjs_bound_anchors() {
        assert_eq!(
            wjs_mi_upper_bound(0.5, Nats::ZERO, Nats::ZERO).unwrap().0,
            0.0
        );
        // frozen: ln 2 − ln(1 + e⁻²)
        assert_relative_eq!(
            wjs_mi_upper_bound_from_avg(0.5, Nats(2.0)).unwrap().0,
            0.5662191695169728,
            max_relative = 1e-12
        );
        // asymptote at infinite separation
        assert_relative_eq!(
            wjs_mi_upper_bound_from_avg(0.5, Nats(1e9)).unwrap().0,
            LN_2,
            max_relative = 1e-12
        );
        assert_eq!(
            wjs_mi_upper_bound(0.0, Nats(3.0), Nats(3.0)).unwrap().0,
            0.0
        );
        assert_eq!(
            wjs_mi_upper_bound(1.0, Nats(3.0), Nats(3.0)).unwrap().0,
            0.0
        );
        assert!(wjs_mi_upper_bound(0.5, Nats(-1.0), Nats(0.0)).is_err());

        // never exceeds the prior entropy, monotone in D_avg
        for p1 in [0.1, 0.3, 0.5, 0.8] {
            let h = binary_entropy(p1).unwrap().0;
            let mut last = -1.0;
            for d in [0.0, 0.1, 0.5, 1.0, 3.0, 10.0] {
                let b = wjs_mi_upper_bound_from_avg(p1, Nats(d)).unwrap().0;
                assert!(b <= h + 1e-12);
                assert!(b >= last - 1e-12, "not monotone at p1={p1}, d={d}");
                last = b;
            }
        }
    }
}
