//! Closed forms for the Nakagami-fading case study: prior Fisher
//! information, the inverse rate-distortion function of an iid complex
//! Nakagami vector, the resulting MMSE lower bounds, and the Bayesian
//! Cramér-Rao integrand it is compared against.

use crate::channels::{gaussian_mi_sensing, gaussian_mi_sensing_from_gram, SystemConfig};
use crate::error::{Error, Result};
use crate::mathfn::{digamma, log_gamma};
use crate::matrix::ComplexMatrix;
use crate::nats::Nats;

/// Shape/scale pair of a Nakagami fading law. m = 1 is Rayleigh; m < 1 is
/// severe fading, where the prior Fisher information diverges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakagamiParams {
    m: f64,
    omega: f64,
}

impl NakagamiParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        if !m.is_finite() || m <= 0.0 {
            return Err(Error::Domain(format!("shape m must be positive, got {m}")));
        }
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::Domain(format!(
                "scale omega must be positive, got {omega}"
            )));
        }
        Ok(Self { m, omega })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// The Bayesian Cramér-Rao bound exists only for m ≥ 1.
    pub fn bcrb_eligible(&self) -> bool {
        self.m >= 1.0
    }
}

/// Fisher information of a complex Nakagami variable: m/ω for m ≥ 1,
/// infinite for m < 1 (the prior concentrates too much mass at the origin).
pub fn fisher_info(params: &NakagamiParams) -> f64 {
    if params.m >= 1.0 {
        params.m / params.omega
    } else {
        f64::INFINITY
    }
}

/// The entropy offset c_m = (m−1)(1−ψ(m)) + ln(Γ(m)/m) of the Nakagami
/// inverse rate-distortion function. c_1 = 0 (Rayleigh), c_m < 0 otherwise.
pub fn c_m(params: &NakagamiParams) -> f64 {
    let m = params.m;
    (m - 1.0) * (1.0 - digamma(m).expect("m > 0")) + log_gamma(m).expect("m > 0") - m.ln()
}

/// Inverse rate-distortion function of an n-dimensional iid complex
/// Nakagami(m, ω) source under squared error: n·ω·e^{c_m − t/n}.
pub fn inverse_rd_nakagami(n: usize, params: &NakagamiParams, t: Nats) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    if t.0 < 0.0 {
        return Err(Error::Domain(format!("rate {} < 0", t.0)));
    }
    let nf = n as f64;
    Ok(nf * params.omega * (c_m(params) - t.0 / nf).exp())
}

/// Per-realization MMSE lower-bound integrand for estimating the sensing
/// channel from one signal block x:
/// M·N_s·ω_s·e^{c_m}·det(I_M + (ω_s/σ²_s)·x x†)^{−1/M}.
///
/// By construction this is exactly [`inverse_rd_nakagami`] at dimension
/// M·N_s evaluated at the Gaussian sensing information of x.
pub fn mmse_lower_bound_per_x(x: &ComplexMatrix, cfg: &SystemConfig) -> Result<f64> {
    let mi = gaussian_mi_sensing(x, cfg)?;
    inverse_rd_nakagami(
        cfg.tx_antennas * cfg.sensing_antennas,
        &cfg.sensing_fading,
        mi,
    )
}

/// [`mmse_lower_bound_per_x`] evaluated on a Gram or covariance matrix,
/// the form used when a block covariance Q stands in for x x†.
pub fn mmse_lower_bound_from_gram(gram: &ComplexMatrix, cfg: &SystemConfig) -> Result<f64> {
    let mi = gaussian_mi_sensing_from_gram(gram, cfg)?;
    inverse_rd_nakagami(
        cfg.tx_antennas * cfg.sensing_antennas,
        &cfg.sensing_fading,
        mi,
    )
}

/// The best (power-optimized) global MMSE lower bound:
/// M·N_s·ω_s·e^{c_m} / (1 + (ω_s/σ²_s)·T·P0).
pub fn mmse_lower_bound_global(cfg: &SystemConfig) -> f64 {
    let m = cfg.tx_antennas as f64;
    let n_s = cfg.sensing_antennas as f64;
    let omega = cfg.sensing_fading.omega();
    let denom = cfg.sensing_gain() * cfg.coherence_length as f64 * cfg.avg_power + 1.0;
    m * n_s * omega * c_m(&cfg.sensing_fading).exp() / denom
}

/// Bayesian Cramér-Rao integrand for one signal block,
/// N_s·tr((x x†/σ²_s + (m_s/ω_s)·I_M)⁻¹), exploiting the I_{N_s} ⊗ x x†
/// block structure so only an M×M matrix is inverted.
///
/// Returns [`Error::BcrbInapplicable`] for m_s < 1: in severe fading the
/// prior is too singular for a finite Fisher information.
pub fn bcrb_per_x(x: &ComplexMatrix, cfg: &SystemConfig) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain("signal block has non-finite entries".into()));
    }
    bcrb_from_gram(&x.gram(), cfg)
}

/// [`bcrb_per_x`] evaluated on a Gram or covariance matrix.
pub fn bcrb_from_gram(gram: &ComplexMatrix, cfg: &SystemConfig) -> Result<f64> {
    let fading = &cfg.sensing_fading;
    if !fading.bcrb_eligible() {
        return Err(Error::BcrbInapplicable { m: fading.m() });
    }
    let j = fisher_info(fading);
    let arg = gram
        .scale(1.0 / cfg.sensing_noise_var)
        .add_scaled_identity(j);
    Ok(cfg.sensing_antennas as f64 * arg.inv_psd()?.trace_real())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::sample_circular_gaussian;
    use crate::mathfn::EULER_MASCHERONI;
    use crate::montecarlo::trial_rng;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use std::f64::consts::LN_2;

    fn table_cfg(m_s: f64) -> SystemConfig {
        // 4x4 MIMO, T = 16, 24 dB transmit SNR on both links, ω_c = 1/M
        let p0 = 10f64.powf(2.4);
        SystemConfig::new(
            4,
            4,
            4,
            16,
            p0,
            1.0,
            1.0,
            NakagamiParams::new(m_s, 1.0).unwrap(),
            NakagamiParams::new(m_s, 0.25).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn fisher_info_values() {
        assert_eq!(fisher_info(&NakagamiParams::new(1.0, 1.0).unwrap()), 1.0);
        assert_eq!(fisher_info(&NakagamiParams::new(2.0, 1.0).unwrap()), 2.0);
        assert_eq!(fisher_info(&NakagamiParams::new(2.0, 0.5).unwrap()), 4.0);
        assert!(fisher_info(&NakagamiParams::new(0.5, 1.0).unwrap()).is_infinite());
        assert!(NakagamiParams::new(0.0, 1.0).is_err());
        assert!(NakagamiParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn c_m_values() {
        // c_1 = 0 exactly (both terms vanish)
        assert!(c_m(&NakagamiParams::new(1.0, 1.0).unwrap()).abs() < 1e-13);
        // c_2 = γ − ln 2
        assert_relative_eq!(
            c_m(&NakagamiParams::new(2.0, 1.0).unwrap()),
            EULER_MASCHERONI - LN_2,
            max_relative = 1e-12
        );
        // frozen from the digamma/log-gamma oracles:
        // −0.5(1 − ψ(1/2)) + ln(√π / 0.5)
        assert_relative_eq!(
            c_m(&NakagamiParams::new(0.5, 1.0).unwrap()),
            -0.21624288952606634,
            max_relative = 1e-12
        );
        // the offset is scale-free
        assert_relative_eq!(
            c_m(&NakagamiParams::new(0.5, 7.0).unwrap()),
            c_m(&NakagamiParams::new(0.5, 1.0).unwrap()),
            max_relative = 1e-15
        );
    }

    #[test]
    fn inverse_rd_anchors() {
        let rayleigh = NakagamiParams::new(1.0, 1.0).unwrap();
        assert_relative_eq!(
            inverse_rd_nakagami(1, &rayleigh, Nats::ZERO).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            inverse_rd_nakagami(8, &rayleigh, Nats::ZERO).unwrap(),
            8.0,
            max_relative = 1e-12
        );
        // scalar Rayleigh at rate ln(1+s) equals the Gaussian MMSE 1/(1+s)
        for s in [0.1f64, 1.0, 9.0, 251.0] {
            assert_relative_eq!(
                inverse_rd_nakagami(1, &rayleigh, Nats((1.0 + s).ln())).unwrap(),
                1.0 / (1.0 + s),
                max_relative = 1e-12
            );
        }
        assert!(inverse_rd_nakagami(1, &rayleigh, Nats(-0.1)).is_err());
    }

    #[test]
    fn mmse_bound_anchors() {
        let cfg = table_cfg(1.0);
        let x = ComplexMatrix::zeros(4, 16);
        // no information: the prior risk M·N_s·ω·e^{c_m}
        assert_relative_eq!(
            mmse_lower_bound_per_x(&x, &cfg).unwrap(),
            16.0,
            max_relative = 1e-12
        );

        // scalar case: ω e^{c_m} / (1 + ω p/σ²)
        let cfg1 = SystemConfig::new(
            1,
            1,
            1,
            4,
            1.0,
            0.5,
            1.0,
            NakagamiParams::new(2.0, 3.0).unwrap(),
            NakagamiParams::new(1.0, 1.0).unwrap(),
        )
        .unwrap();
        let mut x = ComplexMatrix::zeros(1, 4);
        x.set(0, 0, Complex64::new(2.0, 0.0));
        let p = 4.0;
        let expected = 3.0 * c_m(&cfg1.sensing_fading).exp() / (1.0 + 3.0 * p / 0.5);
        assert_relative_eq!(
            mmse_lower_bound_per_x(&x, &cfg1).unwrap(),
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn mmse_bound_is_the_inverse_rd_composition() {
        let cfg = table_cfg(2.0);
        let mut rng = trial_rng(3, 1);
        for _ in 0..5 {
            let x = sample_circular_gaussian(4, 16, cfg.avg_power, &mut rng);
            let direct = mmse_lower_bound_per_x(&x, &cfg).unwrap();
            let composed = inverse_rd_nakagami(
                16,
                &cfg.sensing_fading,
                gaussian_mi_sensing(&x, &cfg).unwrap(),
            )
            .unwrap();
            assert_relative_eq!(direct, composed, max_relative = 1e-12);
        }
    }

    #[test]
    fn global_bound_plugin_value() {
        // Table-scale config at m_s = 1: 16/(16·10^2.4 + 1), exactly
        let cfg = table_cfg(1.0);
        let expected = 16.0 / (16.0 * 10f64.powf(2.4) + 1.0);
        assert_relative_eq!(
            mmse_lower_bound_global(&cfg),
            expected,
            max_relative = 1e-12
        );

        // m_s = 2 scales the bound by e^{c_2}
        let cfg2 = table_cfg(2.0);
        assert_relative_eq!(
            mmse_lower_bound_global(&cfg2),
            expected * (EULER_MASCHERONI - LN_2).exp(),
            max_relative = 1e-12
        );

        // vanishing power: the prior risk
        let mut low = table_cfg(1.0);
        low.avg_power = 1e-300;
        assert_relative_eq!(mmse_lower_bound_global(&low), 16.0, max_relative = 1e-9);
    }

    #[test]
    fn bcrb_anchors() {
        let cfg = table_cfg(2.0);
        let x = ComplexMatrix::zeros(4, 16);
        // prior-only bound M·N_s·ω/m
        assert_relative_eq!(
            bcrb_per_x(&x, &cfg).unwrap(),
            16.0 * 1.0 / 2.0,
            max_relative = 1e-12
        );

        // scalar: 1/(p/σ² + m/ω)
        let cfg1 = SystemConfig::new(
            1,
            1,
            1,
            4,
            1.0,
            0.5,
            1.0,
            NakagamiParams::new(2.0, 3.0).unwrap(),
            NakagamiParams::new(1.0, 1.0).unwrap(),
        )
        .unwrap();
        let mut x = ComplexMatrix::zeros(1, 4);
        x.set(0, 0, Complex64::new(2.0, 0.0));
        assert_relative_eq!(
            bcrb_per_x(&x, &cfg1).unwrap(),
            1.0 / (4.0 / 0.5 + 2.0 / 3.0),
            max_relative = 1e-12
        );

        // severe fading: typed error
        let cfg_half = table_cfg(0.5);
        assert!(matches!(
            bcrb_per_x(&x14(), &cfg_half),
            Err(Error::BcrbInapplicable { .. })
        ));
    }

    fn x14() -> ComplexMatrix {
        ComplexMatrix::zeros(4, 16)
    }

    #[test]
    fn scalar_rayleigh_bcrb_equals_rdb_integrand() {
        // m = 1, M = N_s = 1: both equal ω σ²/(σ² + ω p) per draw
        let cfg = SystemConfig::new(
            1,
            1,
            1,
            4,
            1.0,
            0.7,
            1.0,
            NakagamiParams::new(1.0, 2.0).unwrap(),
            NakagamiParams::new(1.0, 1.0).unwrap(),
        )
        .unwrap();
        let mut rng = trial_rng(9, 2);
        for _ in 0..10 {
            let x = sample_circular_gaussian(1, 4, 1.0, &mut rng);
            let rdb = mmse_lower_bound_per_x(&x, &cfg).unwrap();
            let bcrb = bcrb_per_x(&x, &cfg).unwrap();
            assert_relative_eq!(rdb, bcrb, max_relative = 1e-12);
        }
    }
}
