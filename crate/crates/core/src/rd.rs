//! Rate-distortion functions, Shannon lower bounds, the second-order dual
//! bound, and a Blahut–Arimoto solver used as the numerical oracle for the
//! closed forms.

use crate::error::{Error, Result};
use crate::mathfn::{binary_entropy, binary_entropy_inverse};
use crate::nats::Nats;

/// Bernoulli source (Hamming distortion is implied wherever it is used).
#[derive(Debug, Clone, Copy)]
pub struct BernoulliSource {
    p1: f64,
}

impl BernoulliSource {
    pub fn new(p1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) {
            return Err(Error::Domain(format!(
                "Bernoulli probability {p1} not in [0,1]"
            )));
        }
        Ok(Self { p1 })
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    /// min(p0, p1): the zero-rate distortion under Hamming loss.
    pub fn guessing_error(&self) -> f64 {
        self.p1.min(1.0 - self.p1)
    }

    pub fn entropy(&self) -> Nats {
        binary_entropy(self.p1).expect("validated at construction")
    }
}

/// Finite source with an explicit distortion matrix d(i, j) between source
/// symbol i and reproduction j.
#[derive(Debug, Clone)]
pub struct DiscreteSource {
    pmf: Vec<f64>,
    distortion: Vec<Vec<f64>>,
}

impl DiscreteSource {
    pub fn new(pmf: Vec<f64>, distortion: Vec<Vec<f64>>) -> Result<Self> {
        if pmf.is_empty() {
            return Err(Error::Structure("empty source alphabet".into()));
        }
        let sum: f64 = pmf.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Structure(format!("pmf sums to {sum}, not 1")));
        }
        if pmf.iter().any(|&p| p.is_nan() || !(0.0..=1.0).contains(&p)) {
            return Err(Error::Structure("pmf entries outside [0,1]".into()));
        }
        if distortion.len() != pmf.len() {
            return Err(Error::Structure(
                "distortion row count != alphabet size".into(),
            ));
        }
        let m = distortion[0].len();
        if m == 0 || distortion.iter().any(|row| row.len() != m) {
            return Err(Error::Structure("ragged or empty distortion matrix".into()));
        }
        if distortion
            .iter()
            .flatten()
            .any(|&d| !d.is_finite() || d < 0.0)
        {
            return Err(Error::Structure(
                "distortion entries must be finite and >= 0".into(),
            ));
        }
        Ok(Self { pmf, distortion })
    }

    /// Bernoulli(p1) with Hamming distortion.
    pub fn bernoulli_hamming(p1: f64) -> Result<Self> {
        Self::new(vec![1.0 - p1, p1], vec![vec![0.0, 1.0], vec![1.0, 0.0]])
    }

    /// Uniform n-ary source with Hamming distortion.
    pub fn uniform_hamming(n: usize) -> Result<Self> {
        let pmf = vec![1.0 / n as f64; n];
        let d = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new(pmf, d)
    }

    pub fn alphabet_size(&self) -> usize {
        self.pmf.len()
    }

    pub fn reproduction_size(&self) -> usize {
        self.distortion[0].len()
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn distortion(&self, i: usize, j: usize) -> f64 {
        self.distortion[i][j]
    }

    pub fn entropy(&self) -> Nats {
        Nats(
            self.pmf
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| -p * p.ln())
                .sum(),
        )
    }

    /// Smallest expected distortion achievable at zero rate,
    /// min over reproductions j of E[d(X, j)].
    pub fn zero_rate_distortion(&self) -> f64 {
        (0..self.reproduction_size())
            .map(|j| {
                self.pmf
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| p * self.distortion[i][j])
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// The multiset of per-column distortion values, sorted, provided every
    /// column carries the same one.
    fn column_multiset(&self) -> Result<Vec<f64>> {
        let sorted_col = |j: usize| {
            let mut col: Vec<f64> = (0..self.alphabet_size())
                .map(|i| self.distortion[i][j])
                .collect();
            col.sort_by(|a, b| a.partial_cmp(b).unwrap());
            col
        };
        let base = sorted_col(0);
        for j in 1..self.reproduction_size() {
            let col = sorted_col(j);
            if base
                .iter()
                .zip(&col)
                .any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + a.abs()))
            {
                return Err(Error::Structure(
                    "distortion columns are not permutations of a common multiset".into(),
                ));
            }
        }
        Ok(base)
    }
}

/// R(D) of a Bernoulli source under Hamming distortion:
/// H₂(p₁) − H₂(D) for 0 ≤ D ≤ min(p₀, p₁), zero beyond.
pub fn bernoulli_rd(src: &BernoulliSource, d: f64) -> Result<Nats> {
    if d < 0.0 {
        return Err(Error::Domain(format!("distortion {d} < 0")));
    }
    if d >= src.guessing_error() {
        return Ok(Nats::ZERO);
    }
    let r = src.entropy().0 - binary_entropy(d)?.0;
    Ok(Nats(r.max(0.0)))
}

/// Inverse rate-distortion function of a Bernoulli source:
/// H₂⁻¹(H₂(p₁) − r) for 0 ≤ r ≤ H₂(p₁), zero beyond.
pub fn bernoulli_rd_inverse(src: &BernoulliSource, r: Nats) -> Result<f64> {
    if r.0 < 0.0 {
        return Err(Error::Domain(format!("rate {} < 0", r.0)));
    }
    let h = src.entropy().0;
    if r.0 >= h {
        return Ok(0.0);
    }
    let p = binary_entropy_inverse(Nats(h - r.0))?;
    // the inverse never exceeds the zero-rate guessing error
    Ok(p.min(src.guessing_error()))
}

/// Source field for the continuous Shannon lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

/// Shannon lower bound on the inverse rate-distortion function under
/// squared Euclidean distortion, for an n-dimensional source of
/// differential entropy h:
/// real case n/(2πe)·e^{2(h−r)/n}, complex case n/(πe)·e^{(h−r)/n}.
pub fn slb_continuous_inverse(n: usize, h: Nats, r: Nats, field: Field) -> f64 {
    let nf = n as f64;
    let tau = std::f64::consts::PI * std::f64::consts::E;
    match field {
        Field::Real => nf / (2.0 * tau) * (2.0 * (h.0 - r.0) / nf).exp(),
        Field::Complex => nf / tau * ((h.0 - r.0) / nf).exp(),
    }
}

/// Discrete Shannon lower bound H(X) − φ(D), where
/// φ(D) = max{H(q) : Σ qᵢ dᵢ ≤ D} over the common column multiset,
/// computed by bisection on the exponential-family tilt. Clamped at zero.
pub fn slb_discrete(src: &DiscreteSource, d: f64) -> Result<Nats> {
    if d < 0.0 {
        return Err(Error::Domain(format!("distortion {d} < 0")));
    }
    let values = src.column_multiset()?;
    let d_min = values[0];
    if d < d_min - 1e-12 {
        return Err(Error::Domain(format!(
            "distortion {d} below the minimum column value {d_min}"
        )));
    }
    let phi = max_entropy_under_mean(&values, d);
    Ok(Nats((src.entropy().0 - phi).max(0.0)))
}

/// max{H(q) : Σ qᵢ vᵢ ≤ D} over distributions q on the given values, via
/// the tilted family qᵢ ∝ e^{−λ vᵢ} with bisection on λ ≥ 0.
fn max_entropy_under_mean(values: &[f64], d: f64) -> f64 {
    let n = values.len() as f64;
    let mean: f64 = values.iter().sum::<f64>() / n;
    if d >= mean {
        return n.ln();
    }
    let v_min = values[0];
    if d <= v_min + 1e-300 {
        let mult = values.iter().filter(|&&v| v <= v_min + 1e-12).count();
        return (mult as f64).ln();
    }
    let tilted = |lambda: f64| -> (f64, f64) {
        // weights relative to the minimum value for stability
        let w: Vec<f64> = values
            .iter()
            .map(|&v| (-lambda * (v - v_min)).exp())
            .collect();
        let z: f64 = w.iter().sum();
        let mean_d: f64 = w.iter().zip(values).map(|(wi, &vi)| wi * vi).sum::<f64>() / z;
        let entropy: f64 = w
            .iter()
            .map(|&wi| {
                let q = wi / z;
                if q > 0.0 {
                    -q * q.ln()
                } else {
                    0.0
                }
            })
            .sum();
        (mean_d, entropy)
    };
    let mut hi = 1.0;
    while tilted(hi).0 > d && hi < 1e12 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tilted(mid).0 > d {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * (1.0 + hi) {
            break;
        }
    }
    tilted(0.5 * (lo + hi)).1
}

/// Second-order lower bound on the inverse rate-distortion function:
/// max(0, E[d] − √(2·I·E[d²])), valid for any source and distortion.
pub fn second_order_bound(mean_d: f64, mean_d2: f64, mi: Nats) -> Result<f64> {
    if mean_d < 0.0 {
        return Err(Error::Domain(format!("mean distortion {mean_d} < 0")));
    }
    if mean_d2 < mean_d * mean_d * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "inconsistent moments: E[d^2] = {mean_d2} < (E[d])^2 = {}",
            mean_d * mean_d
        )));
    }
    if mi.0 < 0.0 {
        return Err(Error::Domain(format!("mutual information {} < 0", mi.0)));
    }
    Ok((mean_d - (2.0 * mi.0 * mean_d2).sqrt()).max(0.0))
}

/// One converged point of the Blahut–Arimoto iteration.
#[derive(Debug, Clone, Copy)]
pub struct BaPoint {
    pub distortion: f64,
    pub rate: Nats,
    pub iterations: usize,
    pub converged: bool,
}

/// Options for the Blahut–Arimoto iteration.
#[derive(Debug, Clone, Copy)]
pub struct BaOptions {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for BaOptions {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            tol: 1e-10,
        }
    }
}

/// Blahut–Arimoto at a fixed Lagrange slope λ > 0: alternately updates the
/// test channel against the reproduction marginal with tilt e^{−λ d(i,j)}
/// and returns (E[d], I) at the fixed point. Non-convergence within the
/// iteration budget is reported through the `converged` flag on the last
/// iterate.
pub fn blahut_arimoto(src: &DiscreteSource, lagrange: f64, opts: BaOptions) -> Result<BaPoint> {
    if lagrange.is_nan() || lagrange <= 0.0 {
        return Err(Error::Domain(format!(
            "Lagrange slope {lagrange} must be > 0"
        )));
    }
    let n = src.alphabet_size();
    let m = src.reproduction_size();
    let p = src.pmf();
    let mut r = vec![1.0 / m as f64; m];
    let mut w = vec![vec![0.0f64; m]; n];
    let mut last_rate = f64::INFINITY;
    let mut rate = 0.0;
    let mut dist = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    for it in 0..opts.max_iters {
        iterations = it + 1;
        // test channel update
        for (i, row) in w.iter_mut().enumerate() {
            let mut z = 0.0;
            for (j, wij) in row.iter_mut().enumerate() {
                *wij = r[j] * (-lagrange * src.distortion(i, j)).exp();
                z += *wij;
            }
            for wij in row.iter_mut() {
                *wij /= z;
            }
        }
        // reproduction marginal update
        for j in 0..m {
            r[j] = (0..n).map(|i| p[i] * w[i][j]).sum();
        }
        // functionals at the current pair
        dist = 0.0;
        rate = 0.0;
        for i in 0..n {
            for j in 0..m {
                let wij = w[i][j];
                if wij > 0.0 && r[j] > 0.0 {
                    dist += p[i] * wij * src.distortion(i, j);
                    rate += p[i] * wij * (wij.ln() - r[j].ln());
                }
            }
        }
        rate = rate.max(0.0);
        if (rate - last_rate).abs() < opts.tol {
            converged = true;
            break;
        }
        last_rate = rate;
    }
    Ok(BaPoint {
        distortion: dist,
        rate: Nats(rate),
        iterations,
        converged,
    })
}

/// Blahut–Arimoto point at a target distortion, by bisection on the slope.
pub fn blahut_arimoto_at_distortion(
    src: &DiscreteSource,
    target_d: f64,
    opts: BaOptions,
) -> Result<BaPoint> {
    if target_d <= 0.0 {
        return Err(Error::Domain(format!(
            "target distortion {target_d} must be > 0 for a slope search"
        )));
    }
    // distortion is decreasing in the slope
    let mut lo = 1e-9;
    let mut hi = 1.0;
    while blahut_arimoto(src, hi, opts)?.distortion > target_d && hi < 1e9 {
        hi *= 2.0;
    }
    let mut best = blahut_arimoto(src, hi, opts)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let pt = blahut_arimoto(src, mid, opts)?;
        if pt.distortion > target_d {
            lo = mid;
        } else {
            hi = mid;
            best = pt;
        }
        if (best.distortion - target_d).abs() < 1e-12 || hi - lo < 1e-13 * hi {
            break;
        }
    }
    Ok(best)
}

/// A sampled rate-distortion curve, non-increasing and convex in D.
#[derive(Debug, Clone)]
pub struct RdCurve {
    points: Vec<(f64, Nats)>,
}

impl RdCurve {
    /// Validates monotonicity (R non-increasing in D), a discrete midpoint
    /// convexity check, and a vanishing rate at the largest distortion.
    pub fn new(mut points: Vec<(f64, Nats)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Structure("empty rate-distortion curve".into()));
        }
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for pair in points.windows(2) {
            if pair[1].1 .0 > pair[0].1 .0 + 1e-9 {
                return Err(Error::Structure(format!(
                    "rate increases with distortion near D = {}",
                    pair[1].0
                )));
            }
        }
        for triple in points.windows(3) {
            let (d0, r0) = (triple[0].0, triple[0].1 .0);
            let (d1, r1) = (triple[1].0, triple[1].1 .0);
            let (d2, r2) = (triple[2].0, triple[2].1 .0);
            if d2 > d0 {
                let chord = r0 + (r2 - r0) * (d1 - d0) / (d2 - d0);
                if r1 > chord + 1e-7 {
                    return Err(Error::Structure(format!("curve not convex near D = {d1}")));
                }
            }
        }
        let tail = points.last().unwrap().1 .0;
        if tail.abs() > 1e-6 {
            return Err(Error::Structure(format!(
                "rate at the largest sampled distortion is {tail}, expected 0"
            )));
        }
        Ok(Self { points })
    }

    pub fn d_min(&self) -> f64 {
        self.points.first().unwrap().0
    }

    pub fn d_max(&self) -> f64 {
        self.points.last().unwrap().0
    }

    pub fn points(&self) -> &[(f64, Nats)] {
        &self.points
    }

    /// R(D) by linear interpolation; clamps outside the sampled range.
    pub fn rate_at(&self, d: f64) -> Nats {
        if d <= self.d_min() {
            return self.points[0].1;
        }
        if d >= self.d_max() {
            return Nats::ZERO;
        }
        let idx = self.points.partition_point(|&(dd, _)| dd <= d);
        let (d0, r0) = self.points[idx - 1];
        let (d1, r1) = self.points[idx];
        let t = (d - d0) / (d1 - d0);
        Nats(r0.0 + t * (r1.0 - r0.0))
    }

    /// Inverse evaluation: the smallest sampled distortion whose rate is
    /// at most r (linear interpolation between bracketing samples).
    pub fn distortion_at(&self, r: Nats) -> f64 {
        if r.0 >= self.points[0].1 .0 {
            return self.d_min();
        }
        if r.0 <= 0.0 {
            return self.d_max();
        }
        for pair in self.points.windows(2) {
            let (d0, r0) = (pair[0].0, pair[0].1 .0);
            let (d1, r1) = (pair[1].0, pair[1].1 .0);
            if r.0 <= r0 && r.0 >= r1 {
                if (r0 - r1).abs() < 1e-15 {
                    return d0;
                }
                let t = (r0 - r.0) / (r0 - r1);
                return d0 + t * (d1 - d0);
            }
        }
        self.d_max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn bernoulli_rd_values() {
        let src = BernoulliSource::new(0.5).unwrap();
        assert_eq!(bernoulli_rd(&src, 0.0).unwrap().0, LN_2);
        assert_eq!(bernoulli_rd(&src, 0.5).unwrap().0, 0.0);
        assert_eq!(bernoulli_rd(&src, 0.7).unwrap().0, 0.0);
        // ln 2 − H₂(0.11), frozen from the 40-digit oracle
        assert_relative_eq!(
            bernoulli_rd(&src, 0.11).unwrap().0,
            0.34663184364127916,
            max_relative = 1e-13
        );
        assert!(bernoulli_rd(&src, -0.1).is_err());
    }

    #[test]
    fn bernoulli_rd_inverse_values() {
        let src = BernoulliSource::new(0.5).unwrap();
        assert_eq!(bernoulli_rd_inverse(&src, Nats(0.0)).unwrap(), 0.5);
        assert_eq!(bernoulli_rd_inverse(&src, Nats(LN_2)).unwrap(), 0.0);
        assert_eq!(bernoulli_rd_inverse(&src, Nats(10.0)).unwrap(), 0.0);
        assert!(bernoulli_rd_inverse(&src, Nats(-0.1)).is_err());

        // round trip against bernoulli_rd by bisection at p1 = 0.3
        let src = BernoulliSource::new(0.3).unwrap();
        let d = bernoulli_rd_inverse(&src, Nats(0.2)).unwrap();
        let r = bernoulli_rd(&src, d).unwrap();
        assert_relative_eq!(r.0, 0.2, epsilon = 1e-9);
    }

    #[test]
    fn slb_continuous_gaussian_anchors() {
        let tau = std::f64::consts::PI * std::f64::consts::E;
        // standard real Gaussian at zero rate: the variance
        let h = 0.5 * (2.0 * tau).ln();
        assert_relative_eq!(
            slb_continuous_inverse(1, Nats(h), Nats::ZERO, Field::Real),
            1.0,
            max_relative = 1e-14
        );
        // unit-variance circular complex Gaussian
        let h = tau.ln();
        assert_relative_eq!(
            slb_continuous_inverse(1, Nats(h), Nats::ZERO, Field::Complex),
            1.0,
            max_relative = 1e-14
        );
        // direct substitution, n = 2 complex at rate 2
        assert_relative_eq!(
            slb_continuous_inverse(2, Nats(2.0 * tau.ln()), Nats(2.0), Field::Complex),
            2.0 * (-1.0f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn slb_discrete_binary_hamming_is_tight() {
        let src = DiscreteSource::bernoulli_hamming(0.5).unwrap();
        let bern = BernoulliSource::new(0.5).unwrap();
        for d in [0.0, 0.05, 0.11, 0.25, 0.4] {
            let slb = slb_discrete(&src, d).unwrap().0;
            let exact = bernoulli_rd(&bern, d).unwrap().0;
            assert!((slb - exact).abs() <= 1e-9, "D = {d}: {slb} vs {exact}");
        }
    }

    #[test]
    fn slb_discrete_edges() {
        let src = DiscreteSource::uniform_hamming(4).unwrap();
        assert_relative_eq!(
            slb_discrete(&src, 0.0).unwrap().0,
            4.0f64.ln(),
            epsilon = 1e-12
        );
        // beyond the uniform-mean distortion the bound clamps to zero
        assert_eq!(slb_discrete(&src, 0.75).unwrap().0, 0.0);
        assert_eq!(slb_discrete(&src, 2.0).unwrap().0, 0.0);

        // a non-uniform source also clamps at zero once φ reaches H_max
        let src = DiscreteSource::bernoulli_hamming(0.2).unwrap();
        assert_eq!(slb_discrete(&src, 0.5).unwrap().0, 0.0);

        let bad =
            DiscreteSource::new(vec![0.5, 0.5], vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert!(matches!(slb_discrete(&bad, 0.1), Err(Error::Structure(_))));
    }

    #[test]
    fn second_order_bound_values() {
        assert_eq!(second_order_bound(0.5, 0.25, Nats(0.0)).unwrap(), 0.5);
        assert_relative_eq!(
            second_order_bound(0.5, 0.25, Nats(0.5)).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        // Bernoulli(1/2) Hamming at I = 0.05 nats: below the exact inverse
        let so = second_order_bound(0.5, 0.5, Nats(0.05)).unwrap();
        assert_relative_eq!(so, 0.276393202250021, max_relative = 1e-12);
        let src = BernoulliSource::new(0.5).unwrap();
        let exact = bernoulli_rd_inverse(&src, Nats(0.05)).unwrap();
        assert_relative_eq!(exact, 0.3432184016350332, max_relative = 1e-9);
        assert!(so <= exact);
        assert!(second_order_bound(0.5, 0.2, Nats(0.1)).is_err());
        assert!(second_order_bound(-0.1, 0.25, Nats(0.1)).is_err());
    }

    #[test]
    fn blahut_arimoto_matches_bernoulli_closed_form() {
        let src = DiscreteSource::bernoulli_hamming(0.5).unwrap();
        let bern = BernoulliSource::new(0.5).unwrap();
        for lambda in [0.5, 1.0, 2.0, 4.0] {
            let pt = blahut_arimoto(&src, lambda, BaOptions::default()).unwrap();
            assert!(pt.converged);
            let exact = bernoulli_rd(&bern, pt.distortion).unwrap().0;
            assert!(
                (pt.rate.0 - exact).abs() < 1e-6,
                "lambda = {lambda}: {} vs {exact}",
                pt.rate.0
            );
        }
    }

    #[test]
    fn blahut_arimoto_endpoints() {
        let src = DiscreteSource::bernoulli_hamming(0.5).unwrap();
        // steep slope: D → 0, R → H
        let pt = blahut_arimoto(&src, 50.0, BaOptions::default()).unwrap();
        assert!(pt.distortion < 1e-9);
        assert_relative_eq!(pt.rate.0, LN_2, epsilon = 1e-6);
        // flat slope: R → 0, D → zero-rate distortion
        let pt = blahut_arimoto(&src, 1e-4, BaOptions::default()).unwrap();
        assert!(pt.rate.0 < 1e-6);
        assert_relative_eq!(pt.distortion, src.zero_rate_distortion(), epsilon = 1e-3);
    }

    #[test]
    fn blahut_arimoto_target_distortion() {
        let src = DiscreteSource::bernoulli_hamming(0.5).unwrap();
        let pt = blahut_arimoto_at_distortion(&src, 0.11, BaOptions::default()).unwrap();
        assert!((pt.distortion - 0.11).abs() < 1e-9);
        assert!((pt.rate.0 - 0.34663184364127916).abs() < 1e-6);
    }

    #[test]
    fn rd_curve_checks_and_queries() {
        let bern = BernoulliSource::new(0.5).unwrap();
        let mut pts = Vec::new();
        for k in 0..=40 {
            let d = 0.5 * k as f64 / 40.0;
            pts.push((d, bernoulli_rd(&bern, d).unwrap()));
        }
        let curve = RdCurve::new(pts).unwrap();
        assert_eq!(curve.d_min(), 0.0);
        assert_eq!(curve.d_max(), 0.5);
        let exact = bernoulli_rd(&bern, 0.11).unwrap().0;
        // chords of a convex curve sit above it
        assert!(curve.rate_at(0.11).0 >= exact - 1e-12);
        assert!((curve.rate_at(0.11).0 - exact).abs() < 1e-3);
        let d = curve.distortion_at(Nats(0.2));
        assert!((bernoulli_rd(&bern, d).unwrap().0 - 0.2).abs() < 1e-3);

        // a non-convex curve is rejected
        let bad = RdCurve::new(vec![(0.0, Nats(1.0)), (0.5, Nats(0.9)), (1.0, Nats(0.0))]);
        assert!(bad.is_err());
    }
}
