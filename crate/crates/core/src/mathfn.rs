//! Scalar special functions and information-theoretic primitives.
//!
//! Everything downstream (rate-distortion functions, Nakagami closed forms,
//! detection bounds) reduces to the handful of functions in this module, so
//! they are kept dependency-free and accurate to near machine precision.

use crate::error::{Error, Result};
use crate::nats::Nats;
use std::f64::consts::LN_2;

/// ln(π)
const LN_PI: f64 = 1.1447298858494002;
/// ln(2 √(e/π)), normalization of the Lanczos series below.
const LN_2_SQRT_E_OVER_PI: f64 = 0.6207822376352452;
/// Euler–Mascheroni constant.
pub const EULER_MASCHERONI: f64 = 0.5772156649015329;

/// Lanczos coefficients for g = 10.900511 (Pugh's analysis, ~16 digits).
const LANCZOS_DK: &[f64] = &[
    2.4857408913875355e-5,
    1.0514237858172197,
    -3.4568709722201625,
    4.512277094668948,
    -2.9828522532357664,
    1.056397115771267,
    -1.9542877319164587e-1,
    1.709705434044412e-2,
    -5.719261174043057e-4,
    4.633994733599057e-6,
    -2.7199490848860772e-9,
];
const LANCZOS_R: f64 = 10.900511;

/// Natural logarithm of the gamma function, ln Γ(x), for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1−x) = π / sin(πx)
        let s = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |s, (i, &d)| s + d / (i as f64 - x));
        LN_PI
            - (std::f64::consts::PI * x).sin().ln()
            - s.ln()
            - LN_2_SQRT_E_OVER_PI
            - (0.5 - x) * ((0.5 - x + LANCZOS_R) / std::f64::consts::E).ln()
    } else {
        let s = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |s, (i, &d)| s + d / (x + i as f64 - 1.0));
        s.ln()
            + LN_2_SQRT_E_OVER_PI
            + (x - 0.5) * ((x - 0.5 + LANCZOS_R) / std::f64::consts::E).ln()
    }
}

/// Digamma function ψ(x) for x > 0.
///
/// Recurrence shifts the argument above 12, then the asymptotic expansion
/// in inverse even powers is applied; accurate to ~1e-14.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut result = 0.0;
    let mut z = x;
    while z < 12.0 {
        result -= 1.0 / z;
        z += 1.0;
    }
    let mut r = 1.0 / z;
    result += z.ln() - 0.5 * r;
    r *= r;
    // Bernoulli-number coefficients B_{2k}/(2k)
    const S3: f64 = 1.0 / 12.0;
    const S4: f64 = 1.0 / 120.0;
    const S5: f64 = 1.0 / 252.0;
    const S6: f64 = 1.0 / 240.0;
    const S7: f64 = 1.0 / 132.0;
    result -= r * (S3 - r * (S4 - r * (S5 - r * (S6 - r * S7))));
    Ok(result)
}

/// Binary entropy H₂(p) = −p ln p − (1−p) ln(1−p) in nats, with 0·ln 0 = 0.
pub fn binary_entropy(p: f64) -> Result<Nats> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "binary_entropy requires p in [0,1], got {p}"
        )));
    }
    let term = |t: f64| if t == 0.0 { 0.0 } else { -t * t.ln() };
    Ok(Nats(term(p) + term(1.0 - p)))
}

/// Inverse of the binary entropy on the branch p ∈ [0, 1/2].
///
/// Solved by bisection to |Δp| ≤ 1e-12. The small-error branch is the one
/// needed by detection-error lower bounds. A numerical overshoot of the
/// upper endpoint ln 2 by up to 1e-9 is clamped; anything larger is a
/// domain error.
pub fn binary_entropy_inverse(h: Nats) -> Result<f64> {
    let h = h.0;
    if h.is_nan() || !(-1e-12..=LN_2 + 1e-9).contains(&h) {
        return Err(Error::Domain(format!(
            "binary_entropy_inverse requires h in [0, ln 2], got {h}"
        )));
    }
    if h <= 0.0 {
        return Ok(0.0);
    }
    if h >= LN_2 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let hm = binary_entropy(mid).expect("mid in [0,1/2]").0;
        if hm < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// KL divergence between Bernoulli(p) and Bernoulli(q) in nats.
///
/// Infinite exactly when the supports mismatch (p puts mass where q does
/// not).
pub fn kl_bernoulli(p: f64, q: f64) -> Result<Nats> {
    for (name, v) in [("p", p), ("q", q)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!(
                "kl_bernoulli requires {name} in [0,1], got {v}"
            )));
        }
    }
    let term = |a: f64, b: f64| {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * (a.ln() - b.ln())
        }
    };
    Ok(Nats(term(p, q) + term(1.0 - p, 1.0 - q)))
}

/// KL divergence between the law of a Bernoulli(p1) state and its flip,
/// D(A ‖ 1−A) = p₀ ln(p₀/p₁) + p₁ ln(p₁/p₀). Zero at p1 = 1/2 by symmetry.
pub fn kl_bernoulli_flip(p1: f64) -> Result<Nats> {
    kl_bernoulli(1.0 - p1, p1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_gamma_known_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-13);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-13);
        // ln √π, independently 0.5 * ln(π)
        assert_relative_eq!(
            log_gamma(0.5).unwrap(),
            0.5 * std::f64::consts::PI.ln(),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            log_gamma(0.5).unwrap(),
            0.5723649429247001,
            max_relative = 1e-12
        );
        // Γ(5) = 24
        assert_relative_eq!(log_gamma(5.0).unwrap(), 24f64.ln(), max_relative = 1e-13);
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.0).is_err());
    }

    #[test]
    fn log_gamma_recurrence_grid() {
        let mut x = 0.1;
        while x <= 50.0 {
            let lhs = log_gamma(x + 1.0).unwrap();
            let rhs = log_gamma(x).unwrap() + x.ln();
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()), "x = {x}");
            x += 0.1;
        }
    }

    #[test]
    fn digamma_known_values() {
        assert_relative_eq!(
            digamma(1.0).unwrap(),
            -EULER_MASCHERONI,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            digamma(2.0).unwrap(),
            1.0 - EULER_MASCHERONI,
            max_relative = 1e-12
        );
        // ψ(1/2) = −γ − 2 ln 2
        assert_relative_eq!(
            digamma(0.5).unwrap(),
            -EULER_MASCHERONI - 2.0 * LN_2,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            digamma(0.5).unwrap(),
            -1.9635100260214235,
            max_relative = 1e-12
        );
        assert!(digamma(0.0).is_err());
    }

    #[test]
    fn digamma_recurrence_grid() {
        let mut x = 0.1;
        while x <= 50.0 {
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            assert!((lhs - 1.0 / x).abs() <= 1e-10 * (1.0 + 1.0 / x), "x = {x}");
            x += 0.1;
        }
    }

    #[test]
    fn binary_entropy_known_values() {
        assert_eq!(binary_entropy(0.0).unwrap().0, 0.0);
        assert_eq!(binary_entropy(1.0).unwrap().0, 0.0);
        assert_eq!(binary_entropy(0.5).unwrap().0, LN_2);
        // frozen from a 40-digit series evaluation
        assert_relative_eq!(
            binary_entropy(0.11).unwrap().0,
            0.34651533691866615,
            max_relative = 1e-14
        );
        assert!(binary_entropy(-0.01).is_err());
        assert!(binary_entropy(1.01).is_err());
    }

    #[test]
    fn binary_entropy_inverse_round_trip() {
        assert_eq!(binary_entropy_inverse(Nats(0.0)).unwrap(), 0.0);
        assert_eq!(binary_entropy_inverse(Nats(LN_2)).unwrap(), 0.5);
        let h = binary_entropy(0.11).unwrap();
        assert_relative_eq!(binary_entropy_inverse(h).unwrap(), 0.11, epsilon = 1e-10);
        // upper branch folds onto the lower one
        let h = binary_entropy(0.89).unwrap();
        assert_relative_eq!(binary_entropy_inverse(h).unwrap(), 0.11, epsilon = 1e-10);
        assert!(binary_entropy_inverse(Nats(LN_2 + 1e-3)).is_err());
        assert!(binary_entropy_inverse(Nats(-1e-3)).is_err());
    }

    #[test]
    fn kl_bernoulli_values() {
        assert_eq!(kl_bernoulli(0.5, 0.5).unwrap().0, 0.0);
        assert_eq!(kl_bernoulli_flip(0.5).unwrap().0, 0.0);
        // 0.8 ln 4 + 0.2 ln(1/4) = 0.6 ln 4
        assert_relative_eq!(
            kl_bernoulli(0.8, 0.2).unwrap().0,
            0.8317766166719344,
            max_relative = 1e-14
        );
        assert!(kl_bernoulli(0.5, 0.0).unwrap().0.is_infinite());
        assert_eq!(kl_bernoulli(0.0, 0.0).unwrap().0, 0.0);
        assert!(kl_bernoulli(1.2, 0.5).is_err());
    }

    #[test]
    fn nats_to_bits_at_formatting_only() {
        let h = binary_entropy(0.5).unwrap();
        assert_relative_eq!(h.to_bits(), 1.0, max_relative = 1e-15);
    }
}
