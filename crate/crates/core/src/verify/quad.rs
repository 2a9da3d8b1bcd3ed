//! Adaptive Gauss–Kronrod quadrature (G7–K15 with interval bisection).
//!
//! This is the numerical backbone of the verification oracles and is kept
//! deliberately independent of every closed form it is used to check.

use crate::error::{Error, Result};

/// Kronrod-15 abscissae on [0, 1] side of the symmetric rule.
const XK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];

/// Kronrod-15 weights matching `XK`.
const WK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// Gauss-7 weights for the odd-index abscissae of `XK`.
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut kronrod = WK[7] * f(mid);
    let mut gauss = WG[3] * f(mid);
    for i in 0..7 {
        let dx = half * XK[i];
        let fsum = f(mid - dx) + f(mid + dx);
        kronrod += WK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Integrates `f` over [a, b] to the requested absolute tolerance by
/// adaptive bisection of the G7–K15 rule.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abstol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 100_000;
    // pre-split so a feature narrower than a K15 node spacing cannot hide
    // inside a single panel of the initial interval
    const PANELS: usize = 32;
    let mut stack = Vec::with_capacity(PANELS);
    let width = (b - a) / PANELS as f64;
    for k in 0..PANELS {
        stack.push((
            a + k as f64 * width,
            a + (k + 1) as f64 * width,
            abstol / PANELS as f64,
        ));
    }
    let mut total = 0.0;
    let mut used = 0usize;
    while let Some((lo, hi, tol)) = stack.pop() {
        used += 1;
        if used > MAX_INTERVALS {
            return Err(Error::Domain(format!(
                "quadrature failed to converge on [{a}, {b}]"
            )));
        }
        let (value, err) = gk15(f, lo, hi);
        if err <= tol || hi - lo < 1e-14 * (1.0 + lo.abs()) {
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * tol));
            stack.push((mid, hi, 0.5 * tol));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(&|x: f64| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12).unwrap();
        // ∫ = x⁴/4 − x² + x
        let exact = (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0);
        assert_relative_eq!(v, exact, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_mass_and_entropy() {
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mass = integrate(&phi, -12.0, 12.0, 1e-12).unwrap();
        assert_relative_eq!(mass, 1.0, epsilon = 1e-11);
        let h = integrate(
            &|x: f64| {
                let p = phi(x);
                if p > 1e-300 {
                    -p * p.ln()
                } else {
                    0.0
                }
            },
            -12.0,
            12.0,
            1e-11,
        )
        .unwrap();
        let exact = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
        assert_relative_eq!(h, exact, epsilon = 1e-9);
    }

    #[test]
    fn sharp_peak_converges() {
        // narrow Gaussian inside a much wider interval
        let s = 0.01;
        let f = |x: f64| (-0.5 * (x / s).powi(2)).exp() / ((2.0 * std::f64::consts::PI).sqrt() * s);
        let mass = integrate(&f, -5.0, 5.0, 1e-10).unwrap();
        assert_relative_eq!(mass, 1.0, epsilon = 1e-8);
    }
}
