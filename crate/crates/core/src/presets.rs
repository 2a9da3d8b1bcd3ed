//! Desk-scale reference scenarios used by the verification suite, the
//! bundled scenario files, and the acceptance tests.

use crate::channels::SystemConfig;
use crate::nakagami::NakagamiParams;
use crate::occupancy::OccupancyConfig;

/// 4×4 MIMO target-response estimation scenario: T = 16, 24 dB transmit
/// SNR on both links, ω_s = 1, ω_c = 1/M, common Nakagami shape on both
/// links.
pub fn nakagami_mimo(shape: f64) -> SystemConfig {
    let p0 = 10f64.powf(2.4);
    SystemConfig::new(
        4,
        4,
        4,
        16,
        p0,
        1.0,
        1.0,
        NakagamiParams::new(shape, 1.0).expect("positive parameters"),
        NakagamiParams::new(shape, 0.25).expect("positive parameters"),
    )
    .expect("valid scenario")
}

/// 4×4 occupancy-detection scenario: p₁ = 1/2, T = 16, 10 dB sensing SNR,
/// 24 dB communication SNR, |α| = 0.2, steering azimuth −37°, Rayleigh
/// communication fading with ω_c = σ²_c, low-multipath regime (σ²_W = 0).
pub fn occupancy_4x4() -> OccupancyConfig {
    let p0 = 10.0;
    let sigma2_c = p0 / 10f64.powf(2.4);
    let system = SystemConfig::new(
        4,
        4,
        4,
        16,
        p0,
        1.0,
        sigma2_c,
        NakagamiParams::new(1.0, 1.0).expect("positive parameters"),
        NakagamiParams::new(1.0, sigma2_c).expect("positive parameters"),
    )
    .expect("valid scenario");
    OccupancyConfig::new(system, 0.5, 0.2, -37f64.to_radians(), 0.0).expect("valid scenario")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_consistent() {
        let cfg = nakagami_mimo(1.0);
        assert_eq!(cfg.power_budget(), 4.0 * 10f64.powf(2.4) * 16.0);
        let occ = occupancy_4x4();
        assert_eq!(occ.system.power_budget(), 640.0);
        assert!((occ.steering.frobenius_norm() - 1.0).abs() < 1e-12);
        assert_eq!(occ.sigma2_diffuse, 0.0);
    }
}
