//! The occupancy-detection case study: a low-rank perturbation of a static
//! room response flips with a hidden binary state, and the detection error
//! is lower-bounded by inverting the Bernoulli rate-distortion function at
//! the weighted Jensen–Shannon information bound.

use crate::channels::{
    ergodic_rate_csir, sample_circular_gaussian, wjs_mi_upper_bound, KlConvention, SystemConfig,
};
use crate::error::{Error, Result};
use crate::mathfn::{binary_entropy, binary_entropy_inverse, kl_bernoulli_flip};
use crate::matrix::ComplexMatrix;
use crate::montecarlo::trial_rng;
use crate::nats::Nats;
use num_complex::Complex64;

/// Seed for the fixed baseline response and receive pattern draws. These do
/// not enter the bound in the low-multipath regime (only the transmit
/// steering vector does) but the detector simulation uses them.
const BASELINE_SEED: u64 = 0x0cc0;

/// Configuration of the occupancy-detection scenario.
#[derive(Debug, Clone)]
pub struct OccupancyConfig {
    pub system: SystemConfig,
    /// Prior occupancy probability p₁ ∈ (0, 1).
    pub p1: f64,
    /// Magnitude |α| of the scattering amplitude.
    pub alpha_mag: f64,
    /// Unit-norm transmit steering vector v (M × 1).
    pub steering: ComplexMatrix,
    /// Unit-norm receive pattern u (N_s × 1).
    pub rx_pattern: ComplexMatrix,
    /// Static baseline response H₀ (N_s × M).
    pub baseline: ComplexMatrix,
    /// Diffuse multipath variance σ²_W (0 in the low-multipath regime).
    pub sigma2_diffuse: f64,
}

impl OccupancyConfig {
    /// Builds the scenario from an azimuth for the steering vector; the
    /// baseline response and receive pattern come from a fixed seeded draw.
    pub fn new(
        system: SystemConfig,
        p1: f64,
        alpha_mag: f64,
        phi_rad: f64,
        sigma2_diffuse: f64,
    ) -> Result<Self> {
        if !(p1 > 0.0 && p1 < 1.0) {
            return Err(Error::Domain(format!(
                "prior p1 = {p1} must lie strictly in (0,1)"
            )));
        }
        if !alpha_mag.is_finite() || alpha_mag < 0.0 {
            return Err(Error::Domain(format!(
                "|alpha| = {alpha_mag} must be finite and >= 0"
            )));
        }
        if !sigma2_diffuse.is_finite() || sigma2_diffuse < 0.0 {
            return Err(Error::Domain(format!(
                "diffuse variance {sigma2_diffuse} must be finite and >= 0"
            )));
        }
        let steering = steering_vector(system.tx_antennas, phi_rad);
        let mut rng = trial_rng(BASELINE_SEED, 0);
        let mut u = sample_circular_gaussian(system.sensing_antennas, 1, 1.0, &mut rng);
        let norm = u.frobenius_norm();
        u = u.scale(1.0 / norm);
        let baseline =
            sample_circular_gaussian(system.sensing_antennas, system.tx_antennas, 1.0, &mut rng);
        let cfg = Self {
            system,
            p1,
            alpha_mag,
            steering,
            rx_pattern: u,
            baseline,
            sigma2_diffuse,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        for (name, v, dim) in [
            ("steering", &self.steering, self.system.tx_antennas),
            ("rx_pattern", &self.rx_pattern, self.system.sensing_antennas),
        ] {
            if v.rows() != dim || v.cols() != 1 {
                return Err(Error::Structure(format!("{name} must be a {dim}-vector")));
            }
            if (v.frobenius_norm() - 1.0).abs() > 1e-10 {
                return Err(Error::Structure(format!("{name} must have unit norm")));
            }
        }
        Ok(())
    }

    /// The channel response matrix under occupancy state a ∈ {0, 1},
    /// without the diffuse component.
    pub fn mean_response(&self, occupied: bool) -> ComplexMatrix {
        if occupied {
            let bump = self
                .rx_pattern
                .mul(&self.steering.adjoint())
                .scale(self.alpha_mag);
            self.baseline.add(&bump)
        } else {
            self.baseline.clone()
        }
    }
}

/// Uniform-linear-array steering vector with half-wavelength spacing:
/// v_k = e^{jπ k sin φ}/√M.
pub fn steering_vector(m: usize, phi_rad: f64) -> ComplexMatrix {
    let scale = 1.0 / (m as f64).sqrt();
    ComplexMatrix::from_fn(m, 1, |k, _| {
        Complex64::from_polar(scale, std::f64::consts::PI * k as f64 * phi_rad.sin())
    })
}

/// Lower bound on the detection error probability from the inverse
/// Bernoulli rate-distortion function:
/// H₂⁻¹(max(0, H₂(p₁) − I)). Equals min(p₀, p₁) at I = 0 and 0 once
/// I ≥ H₂(p₁).
pub fn detection_error_lower_bound(p1: f64, mi: Nats) -> Result<f64> {
    if mi.0 < 0.0 {
        return Err(Error::Domain(format!("mutual information {} < 0", mi.0)));
    }
    let h = binary_entropy(p1)?.0;
    binary_entropy_inverse(Nats((h - mi.0).max(0.0)))
}

/// How the detection bound is composed from the information bound.
///
/// The two forms are algebraically identical (the Jensen–Shannon bound is
/// H₂(p₁) minus the softplus term the relaxed formula inverts directly);
/// both are kept so either path can be exercised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundComposition {
    /// H₂⁻¹(H₂(p₁) − WJS bound): invert at the mutual-information bound.
    #[default]
    TwoStage,
    /// H₂⁻¹(ln(1 + e^{−D(A‖1−A) − D_avg})): the single displayed formula.
    Relaxed,
}

/// Detection-error lower bound as a function of the beamformed energy
/// v†Qv, in the low-multipath regime where D_avg = (|α|²/(2σ²_s))·v†Qv.
pub fn detection_bound_from_beam_energy(
    energy: f64,
    occ: &OccupancyConfig,
    comp: BoundComposition,
    conv: KlConvention,
) -> Result<f64> {
    if energy < 0.0 {
        return Err(Error::Domain(format!("beam energy {energy} < 0")));
    }
    let prefactor = match conv {
        KlConvention::HalfPrefactor => 0.5,
        KlConvention::Standard => 1.0,
    };
    let d_avg = prefactor * occ.alpha_mag * occ.alpha_mag / occ.system.sensing_noise_var * energy;
    match comp {
        BoundComposition::TwoStage => {
            let mi = wjs_mi_upper_bound(occ.p1, Nats(d_avg), Nats(d_avg))?;
            detection_error_lower_bound(occ.p1, mi)
        }
        BoundComposition::Relaxed => {
            let flip = kl_bernoulli_flip(occ.p1)?.0;
            let arg = (-flip - d_avg).exp().ln_1p();
            binary_entropy_inverse(Nats(arg.min(binary_entropy(occ.p1)?.0)))
        }
    }
}

/// Detection-error lower bound for a block covariance Q under the trace
/// budget (checked to 1e-6 relative) in the low-multipath regime.
pub fn detection_bound_from_gram(
    q: &ComplexMatrix,
    occ: &OccupancyConfig,
    comp: BoundComposition,
    conv: KlConvention,
) -> Result<f64> {
    check_covariance(q, occ)?;
    detection_bound_from_beam_energy(q.quad_form(&occ.steering), occ, comp, conv)
}

fn check_covariance(q: &ComplexMatrix, occ: &OccupancyConfig) -> Result<()> {
    let budget = occ.system.power_budget();
    if (q.trace_real() - budget).abs() > 1e-6 * budget {
        return Err(Error::Domain(format!(
            "covariance trace {} differs from the power budget {budget}",
            q.trace_real()
        )));
    }
    if !q.is_psd() {
        return Err(Error::Domain("covariance must be Hermitian PSD".into()));
    }
    Ok(())
}

/// The two integrands of one converse-region point for a covariance Q and
/// a communication channel draw: the detection-error bound and the
/// per-realization communication rate.
pub fn occupancy_region_integrands(
    q: &ComplexMatrix,
    h_c: &ComplexMatrix,
    occ: &OccupancyConfig,
    comp: BoundComposition,
    conv: KlConvention,
) -> Result<(f64, Nats)> {
    let d_bound = detection_bound_from_gram(q, occ, comp, conv)?;
    let rate = ergodic_rate_csir(h_c, q, &occ.system)?;
    Ok((d_bound, rate))
}

/// A signal block x with x x† = Q exactly: x = Q^{1/2} F where the rows of
/// F (M × T) are orthonormal discrete-frequency rows.
pub fn signal_from_gram(q: &ComplexMatrix, t: usize) -> Result<ComplexMatrix> {
    let m = q.rows();
    if t < m {
        return Err(Error::Structure(format!(
            "coherence length {t} shorter than the antenna count {m}"
        )));
    }
    if !q.is_psd() {
        return Err(Error::Domain("covariance must be Hermitian PSD".into()));
    }
    let (vals, basis) = q.eigh();
    let sqrt_vals: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    let root = ComplexMatrix::from_eigh(&sqrt_vals, &basis);
    let scale = 1.0 / (t as f64).sqrt();
    let rows = ComplexMatrix::from_fn(m, t, |k, tt| {
        Complex64::from_polar(scale, -std::f64::consts::TAU * (k * tt) as f64 / t as f64)
    });
    Ok(root.mul(&rows))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::nakagami::NakagamiParams;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    pub(crate) fn occupancy_cfg() -> OccupancyConfig {
        // 4x4, T = 16, 10 dB sensing SNR, |α| = 0.2, φ = −37°
        let system = SystemConfig::new(
            4,
            4,
            4,
            16,
            10.0,
            1.0,
            10.0 / 10f64.powf(2.4),
            NakagamiParams::new(1.0, 1.0).unwrap(),
            NakagamiParams::new(1.0, 10.0 / 10f64.powf(2.4)).unwrap(),
        )
        .unwrap();
        OccupancyConfig::new(system, 0.5, 0.2, -37f64.to_radians(), 0.0).unwrap()
    }

    #[test]
    fn steering_vector_anchors() {
        let v = steering_vector(1, 0.7);
        assert_eq!(v.at(0, 0), Complex64::new(1.0, 0.0));

        // broadside: all-equal entries 1/√M
        let v = steering_vector(4, 0.0);
        for k in 0..4 {
            assert_relative_eq!(v.at(k, 0).re, 0.5, epsilon = 1e-15);
            assert_relative_eq!(v.at(k, 0).im, 0.0, epsilon = 1e-15);
        }

        // unit norm at an arbitrary azimuth
        let v = steering_vector(4, -37f64.to_radians());
        assert_relative_eq!(v.frobenius_norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn detection_bound_anchors() {
        assert_eq!(detection_error_lower_bound(0.5, Nats::ZERO).unwrap(), 0.5);
        assert_eq!(detection_error_lower_bound(0.5, Nats(LN_2)).unwrap(), 0.0);
        assert_eq!(detection_error_lower_bound(0.5, Nats(5.0)).unwrap(), 0.0);
        // frozen: H₂⁻¹(ln(1 + e⁻²)), composed with the D_avg = 2 bound
        let mi = crate::channels::wjs_mi_upper_bound_from_avg(0.5, Nats(2.0)).unwrap();
        assert_relative_eq!(
            detection_error_lower_bound(0.5, mi).unwrap(),
            0.0277770649674,
            epsilon = 1e-9
        );
        assert!(detection_error_lower_bound(0.5, Nats(-0.1)).is_err());
        // never exceeds the guessing error
        for p1 in [0.1, 0.33, 0.5, 0.77] {
            for mi in [0.0, 0.01, 0.2, 1.0] {
                let b = detection_error_lower_bound(p1, Nats(mi)).unwrap();
                assert!(b <= p1.min(1.0 - p1) + 1e-12);
            }
        }
    }

    #[test]
    fn the_two_compositions_agree() {
        let occ = occupancy_cfg();
        for energy in [0.0, 0.1, 1.0, 40.0, 640.0] {
            let two = detection_bound_from_beam_energy(
                energy,
                &occ,
                BoundComposition::TwoStage,
                KlConvention::HalfPrefactor,
            )
            .unwrap();
            let rel = detection_bound_from_beam_energy(
                energy,
                &occ,
                BoundComposition::Relaxed,
                KlConvention::HalfPrefactor,
            )
            .unwrap();
            assert_relative_eq!(two, rel, epsilon = 1e-9);
        }
        // and for an asymmetric prior
        let mut occ = occupancy_cfg();
        occ.p1 = 0.2;
        for energy in [0.0, 1.0, 100.0] {
            let two = detection_bound_from_beam_energy(
                energy,
                &occ,
                BoundComposition::TwoStage,
                KlConvention::HalfPrefactor,
            )
            .unwrap();
            let rel = detection_bound_from_beam_energy(
                energy,
                &occ,
                BoundComposition::Relaxed,
                KlConvention::HalfPrefactor,
            )
            .unwrap();
            assert_relative_eq!(two, rel, epsilon = 1e-9);
        }
    }

    #[test]
    fn rank_one_beamforming_saturates_the_bound() {
        let occ = occupancy_cfg();
        let budget = occ.system.power_budget();
        let v = &occ.steering;
        let q_beam = v.mul(&v.adjoint()).scale(budget);
        let d_beam = detection_bound_from_gram(
            &q_beam,
            &occ,
            BoundComposition::TwoStage,
            KlConvention::HalfPrefactor,
        )
        .unwrap();
        // the beamformed energy equals the full budget
        assert_relative_eq!(q_beam.quad_form(v), budget, max_relative = 1e-10);

        // isotropic covariance leaves energy budget/M on the beam
        let q_iso = ComplexMatrix::identity(4).scale(budget / 4.0);
        let d_iso = detection_bound_from_gram(
            &q_iso,
            &occ,
            BoundComposition::TwoStage,
            KlConvention::HalfPrefactor,
        )
        .unwrap();
        assert!(d_beam < d_iso);

        // zero beam energy: the bound falls back to the guessing error
        assert_eq!(
            detection_bound_from_beam_energy(
                0.0,
                &occ,
                BoundComposition::TwoStage,
                KlConvention::HalfPrefactor
            )
            .unwrap(),
            0.5
        );

        // trace violations are rejected
        let q_bad = ComplexMatrix::identity(4).scale(budget);
        assert!(detection_bound_from_gram(
            &q_bad,
            &occ,
            BoundComposition::TwoStage,
            KlConvention::HalfPrefactor
        )
        .is_err());
    }

    #[test]
    fn region_integrands_pair_bound_and_rate() {
        use crate::channels::{ergodic_rate_csir, sample_nakagami_matrix};
        use crate::montecarlo::trial_rng;

        let occ = occupancy_cfg();
        let budget = occ.system.power_budget();
        let q = ComplexMatrix::identity(4).scale(budget / 4.0);
        let mut rng = trial_rng(3, 7);
        let h_c = sample_nakagami_matrix(4, 4, &occ.system.comm_fading, &mut rng);
        let (d, rate) = occupancy_region_integrands(
            &q,
            &h_c,
            &occ,
            BoundComposition::TwoStage,
            KlConvention::HalfPrefactor,
        )
        .unwrap();
        let d_direct = detection_bound_from_gram(
            &q,
            &occ,
            BoundComposition::TwoStage,
            KlConvention::HalfPrefactor,
        )
        .unwrap();
        let rate_direct = ergodic_rate_csir(&h_c, &q, &occ.system).unwrap();
        assert_eq!(d, d_direct);
        assert_eq!(rate.0, rate_direct.0);

        // infeasible covariance is rejected
        let q_bad = ComplexMatrix::identity(4).scale(budget);
        assert!(occupancy_region_integrands(
            &q_bad,
            &h_c,
            &occ,
            BoundComposition::TwoStage,
            KlConvention::HalfPrefactor
        )
        .is_err());
    }

    #[test]
    fn signal_from_gram_reproduces_the_covariance() {
        let occ = occupancy_cfg();
        let budget = occ.system.power_budget();
        let v = &occ.steering;
        // a mixed-rank covariance: beamformed plus isotropic
        let q = v
            .mul(&v.adjoint())
            .scale(0.6 * budget)
            .add(&ComplexMatrix::identity(4).scale(0.1 * budget));
        let x = signal_from_gram(&q, 16).unwrap();
        assert!(x.gram().sub(&q).frobenius_norm() <= 1e-10 * q.frobenius_norm());
        assert!(signal_from_gram(&q, 2).is_err());
    }
}
