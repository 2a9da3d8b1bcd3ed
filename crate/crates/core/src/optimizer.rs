//! Covariance shaping on the PSD cone: maximize the per-realization
//! communication log-det rate over Hermitian PSD covariances with a fixed
//! trace, subject to a sensing floor: a log-det floor for the fading
//! estimation study, a quadratic-form floor for occupancy detection. The
//! Pareto frontier is traced by sweeping the floor level.

use crate::channels::{sample_nakagami_matrix, KlConvention, SystemConfig};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::montecarlo::{par_trials, McEstimate};
use crate::nakagami::{bcrb_from_gram, c_m};
use crate::nats::Nats;
use crate::occupancy::{detection_bound_from_beam_energy, BoundComposition, OccupancyConfig};

/// The sensing floor attached to the trace-constrained PSD set.
#[derive(Debug, Clone)]
pub enum FloorKind {
    /// No sensing constraint.
    None,
    /// ln det(I + gain·Q) ≥ tau.
    LogDet { gain: f64, tau: f64 },
    /// v†Qv ≥ gamma for a unit-norm direction v.
    QuadForm {
        direction: ComplexMatrix,
        gamma: f64,
    },
}

/// A feasible covariance set: trace equality plus an optional floor.
#[derive(Debug, Clone)]
pub struct PsdConstraintSet {
    pub trace_budget: f64,
    pub floor: FloorKind,
}

impl PsdConstraintSet {
    pub fn new(trace_budget: f64, floor: FloorKind) -> Result<Self> {
        if !trace_budget.is_finite() || trace_budget <= 0.0 {
            return Err(Error::Domain(format!(
                "trace budget {trace_budget} must be positive"
            )));
        }
        Ok(Self {
            trace_budget,
            floor,
        })
    }

    /// The floor value g(Q); +∞ when there is no floor.
    pub fn floor_value(&self, q: &ComplexMatrix) -> Result<f64> {
        match &self.floor {
            FloorKind::None => Ok(f64::INFINITY),
            FloorKind::LogDet { gain, .. } => q.scale(*gain).add_scaled_identity(1.0).ln_det_psd(),
            FloorKind::QuadForm { direction, .. } => Ok(q.quad_form(direction)),
        }
    }

    /// The required floor level; −∞ when there is no floor.
    pub fn floor_level(&self) -> f64 {
        match &self.floor {
            FloorKind::None => f64::NEG_INFINITY,
            FloorKind::LogDet { tau, .. } => *tau,
            FloorKind::QuadForm { gamma, .. } => *gamma,
        }
    }

    /// The covariance that maximizes the floor under the trace budget:
    /// isotropic for the log-det floor (and the unconstrained set),
    /// rank-one along the direction for the quadratic floor.
    pub fn floor_optimal_q(&self, dim: usize) -> ComplexMatrix {
        match &self.floor {
            FloorKind::None | FloorKind::LogDet { .. } => {
                ComplexMatrix::identity(dim).scale(self.trace_budget / dim as f64)
            }
            FloorKind::QuadForm { direction, .. } => {
                direction.mul(&direction.adjoint()).scale(self.trace_budget)
            }
        }
    }

    /// The largest attainable floor value under the trace budget.
    pub fn floor_max(&self, dim: usize) -> Result<f64> {
        self.floor_value(&self.floor_optimal_q(dim))
    }

    /// Feasibility is certified by evaluating the floor at its optimal
    /// covariance.
    pub fn certify_feasible(&self, dim: usize) -> Result<()> {
        if let FloorKind::QuadForm { direction, .. } = &self.floor {
            if direction.rows() != dim || direction.cols() != 1 {
                return Err(Error::Structure(format!(
                    "floor direction must be a {dim}-vector"
                )));
            }
            if (direction.frobenius_norm() - 1.0).abs() > 1e-10 {
                return Err(Error::Structure(
                    "floor direction must have unit norm".into(),
                ));
            }
        }
        let max = self.floor_max(dim)?;
        let level = self.floor_level();
        if level > max * (1.0 + 1e-12) + 1e-12 {
            return Err(Error::Infeasible(format!(
                "floor level {level} exceeds the attainable maximum {max}"
            )));
        }
        Ok(())
    }
}

/// Solver options for [`maximize_rate_with_floor`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Inner iteration cap per penalty stage.
    pub max_inner: usize,
    /// Relative objective-change stopping tolerance.
    pub rel_tol: f64,
    /// Interior-penalty weights, driven toward zero and warm-started.
    pub penalty_stages: Vec<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_inner: 10_000,
            rel_tol: 1e-8,
            penalty_stages: vec![1e-2, 1e-4, 1e-6],
        }
    }
}

/// One solved point of a Pareto sweep.
#[derive(Debug, Clone)]
pub struct ParetoPoint {
    /// The sweep parameter (floor level) that produced the point.
    pub sweep_param: f64,
    /// The optimal covariance.
    pub q: ComplexMatrix,
    /// ln det rate objective at `q`, nats per channel use.
    pub objective: Nats,
    /// Floor value g(q) at the solution.
    pub floor_value: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Projected-gradient (gradient-mapping) norm at termination,
    /// normalized by the gradient norm at the isotropic covariance.
    pub kkt_residual: f64,
}

/// Euclidean projection of a real vector onto the simplex
/// {λ ≥ 0, Σλ = budget}.
fn project_simplex(vals: &[f64], budget: f64) -> Vec<f64> {
    let mut sorted: Vec<f64> = vals.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    let mut found = false;
    for (k, &w) in sorted.iter().enumerate() {
        cumsum += w;
        let candidate = (cumsum - budget) / (k + 1) as f64;
        if w - candidate > 0.0 {
            theta = candidate;
            found = true;
        } else {
            break;
        }
    }
    if !found {
        // all mass on the largest entry
        theta = sorted[0] - budget;
    }
    vals.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Euclidean projection of a Hermitian matrix onto
/// {Q ⪰ 0, tr Q = budget}: eigendecompose and project the spectrum.
fn project_trace_psd(m: &ComplexMatrix, budget: f64) -> ComplexMatrix {
    let (vals, basis) = m.eigh();
    let projected = project_simplex(&vals, budget);
    ComplexMatrix::from_eigh(&projected, &basis)
}

struct Objective<'a> {
    /// H_c / √(T σ²_c), so the rate is ln det(I + A Q A†).
    a: ComplexMatrix,
    cset: &'a PsdConstraintSet,
}

impl Objective<'_> {
    fn rate(&self, q: &ComplexMatrix) -> Result<f64> {
        self.a
            .mul(q)
            .mul(&self.a.adjoint())
            .add_scaled_identity(1.0)
            .ln_det_psd()
    }

    /// Ascent direction of the rate: A†(I + A Q A†)⁻¹ A.
    fn rate_gradient(&self, q: &ComplexMatrix) -> Result<ComplexMatrix> {
        let inner = self
            .a
            .mul(q)
            .mul(&self.a.adjoint())
            .add_scaled_identity(1.0)
            .inv_psd()?;
        Ok(self.a.adjoint().mul(&inner).mul(&self.a))
    }

    /// Gradient of the floor value g(Q).
    fn floor_gradient(&self, q: &ComplexMatrix) -> Result<Option<ComplexMatrix>> {
        match &self.cset.floor {
            FloorKind::None => Ok(None),
            FloorKind::LogDet { gain, .. } => Ok(Some(
                q.scale(*gain)
                    .add_scaled_identity(1.0)
                    .inv_psd()?
                    .scale(*gain),
            )),
            FloorKind::QuadForm { direction, .. } => Ok(Some(direction.mul(&direction.adjoint()))),
        }
    }

    /// Penalized objective f(Q) + μ·ln(g(Q) − level); −∞ outside the floor.
    fn penalized(&self, q: &ComplexMatrix, mu: f64) -> Result<f64> {
        let f = self.rate(q)?;
        if mu == 0.0 || matches!(self.cset.floor, FloorKind::None) {
            return Ok(f);
        }
        let slack = self.cset.floor_value(q)? - self.cset.floor_level();
        if slack <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(f + mu * slack.ln())
    }

    fn penalized_gradient(&self, q: &ComplexMatrix, mu: f64) -> Result<ComplexMatrix> {
        let mut g = self.rate_gradient(q)?;
        if mu > 0.0 {
            if let Some(fg) = self.floor_gradient(q)? {
                let slack = self.cset.floor_value(q)? - self.cset.floor_level();
                if slack > 0.0 {
                    g = g.add(&fg.scale(mu / slack));
                }
            }
        }
        Ok(g)
    }
}

/// Maximizes ln det(I + H_c Q H_c†/(T σ²_c)) over the constraint set by
/// projected gradient ascent with a logarithmic interior penalty for the
/// floor. The problem is concave over a convex set, so the returned KKT
/// point is globally optimal within tolerance.
pub fn maximize_rate_with_floor(
    h_c: &ComplexMatrix,
    t_sigma2_c: f64,
    cset: &PsdConstraintSet,
    opts: &SolveOptions,
) -> Result<ParetoPoint> {
    maximize_rate_with_floor_from(h_c, t_sigma2_c, cset, opts, None)
}

/// [`maximize_rate_with_floor`] with an optional warm-start covariance,
/// used when sweeping a floor grid: the previous solution is blended back
/// into feasibility and reused.
pub fn maximize_rate_with_floor_from(
    h_c: &ComplexMatrix,
    t_sigma2_c: f64,
    cset: &PsdConstraintSet,
    opts: &SolveOptions,
    warm_start: Option<&ComplexMatrix>,
) -> Result<ParetoPoint> {
    let dim = h_c.cols();
    cset.certify_feasible(dim)?;
    if t_sigma2_c.is_nan() || t_sigma2_c <= 0.0 {
        return Err(Error::Domain(format!(
            "noise scale {t_sigma2_c} must be positive"
        )));
    }
    let obj = Objective {
        a: h_c.scale(1.0 / t_sigma2_c.sqrt()),
        cset,
    };
    let budget = cset.trace_budget;
    let level = cset.floor_level();
    let floor_max = cset.floor_max(dim)?;
    let iso = ComplexMatrix::identity(dim).scale(budget / dim as f64);
    let grad_ref = obj.rate_gradient(&iso)?.frobenius_norm().max(1e-300);

    // the floor pins the covariance when its level reaches the maximum
    let pinned = level.is_finite() && level >= floor_max - 1e-9 * (1.0 + floor_max.abs());
    if pinned {
        let q = cset.floor_optimal_q(dim);
        let objective = obj.rate(&q)?;
        let floor_value = cset.floor_value(&q)?;
        return Ok(ParetoPoint {
            sweep_param: level,
            q,
            objective: Nats(objective),
            floor_value,
            converged: true,
            iterations: 0,
            kkt_residual: 0.0,
        });
    }

    // strictly feasible start: the warm start (or the isotropic matrix),
    // blended toward the floor-optimal covariance until the floor holds
    // with slack
    let mut q = match warm_start {
        Some(w) if w.rows() == dim && w.cols() == dim && w.is_psd() => project_trace_psd(w, budget),
        _ => iso.clone(),
    };
    if level.is_finite() {
        let needed = level + 1e-6 * (floor_max - level).abs().max(1e-12);
        if cset.floor_value(&q)? < needed {
            let q_floor = cset.floor_optimal_q(dim);
            let mut t = 0.5;
            for _ in 0..60 {
                let cand = q.scale(1.0 - t).add(&q_floor.scale(t));
                if cset.floor_value(&cand)? >= needed {
                    q = cand;
                    break;
                }
                t = 0.5 * (t + 1.0);
            }
        }
    }

    let stages: Vec<f64> = if matches!(cset.floor, FloorKind::None) || !level.is_finite() {
        vec![0.0]
    } else {
        opts.penalty_stages.clone()
    };

    let kkt_target = 0.5e-6 * grad_ref;
    let mut total_iters = 0usize;
    let mut converged = true;
    let mut final_mu = 0.0;
    for &mu in &stages {
        final_mu = mu;
        let mut f_cur = obj.penalized(&q, mu)?;
        let mut step = budget / dim as f64;
        let mut stage_converged = false;
        let mut stalled = 0usize;
        for _ in 0..opts.max_inner {
            total_iters += 1;
            let g = obj.penalized_gradient(&q, mu)?;
            let mut accepted = false;
            let mut improvement = f64::INFINITY;
            for _ in 0..60 {
                let cand = project_trace_psd(&q.add(&g.scale(step)), budget);
                let f_cand = obj.penalized(&cand, mu)?;
                if f_cand.is_finite() && f_cand >= f_cur - 1e-14 * (1.0 + f_cur.abs()) {
                    improvement = f_cand - f_cur;
                    q = cand;
                    f_cur = f_cand;
                    accepted = true;
                    step *= 1.5;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                // the step size collapsed to numerical noise
                stage_converged = true;
                break;
            }
            if improvement.abs() <= opts.rel_tol * (1.0 + f_cur.abs()) {
                stalled += 1;
                if mu > 0.0 {
                    // penalty stages only need the objective to settle;
                    // the optimality certificate comes from the last stage
                    stage_converged = true;
                    break;
                }
                let g_new = obj.penalized_gradient(&q, mu)?;
                let mapped = project_trace_psd(&q.add(&g_new), budget)
                    .sub(&q)
                    .frobenius_norm();
                if mapped <= kkt_target || stalled >= 40 {
                    stage_converged = true;
                    break;
                }
            } else {
                stalled = 0;
            }
        }
        if !stage_converged {
            converged = false;
        }
    }

    // repair a floor violated by the final projection (blending with the
    // floor-optimal point preserves trace and PSD, and the floor value is
    // concave along the blend)
    if level.is_finite() {
        let mut slack = cset.floor_value(&q)? - level;
        if slack < 0.0 {
            let q_floor = cset.floor_optimal_q(dim);
            let mut t = 1e-9;
            while slack < 0.0 && t <= 1.0 {
                let cand = q.scale(1.0 - t).add(&q_floor.scale(t));
                slack = cset.floor_value(&cand)? - level;
                if slack >= 0.0 {
                    q = cand;
                    break;
                }
                t *= 4.0;
            }
        }
    }

    let g = obj.penalized_gradient(&q, final_mu)?;
    let mapped = project_trace_psd(&q.add(&g), budget)
        .sub(&q)
        .frobenius_norm();
    let objective = obj.rate(&q)?;
    let floor_value = cset.floor_value(&q)?;
    Ok(ParetoPoint {
        sweep_param: level,
        q,
        objective: Nats(objective),
        floor_value,
        converged,
        iterations: total_iters,
        kkt_residual: mapped / grad_ref,
    })
}

/// One point of a converse-region sweep: a distortion bound, the Monte
/// Carlo rate bound, and (when applicable) the Bayesian Cramér-Rao bound
/// evaluated at the same per-draw covariances.
#[derive(Debug, Clone)]
pub struct RegionPoint {
    pub sweep_param: f64,
    pub d_bound: f64,
    pub d_stderr: f64,
    pub rate_mean: f64,
    pub rate_stderr: f64,
    /// BCRB mean and standard error; `None` when the bound is inapplicable.
    pub bcrb: Option<(f64, f64)>,
    /// Per-point count of draws excluded for solver failure.
    pub excluded: u64,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![b];
    }
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Converse-region sweep for the Nakagami fading study. The log-det floor
/// level τ runs from 0 to τ_max = M·ln(1 + (ω_s/σ²_s)·P0·T); each level
/// maps to the distortion bound M·N_s·ω_s·e^{c_m}·e^{−τ/M} while the rate
/// is the Monte Carlo mean of per-realization optimized log-det rates.
pub fn pareto_sweep_nakagami(
    cfg: &SystemConfig,
    n_channel_draws: u64,
    n_sweep: usize,
    seed: u64,
) -> Result<Vec<RegionPoint>> {
    if n_sweep < 2 {
        return Err(Error::Domain(format!("need n_sweep >= 2, got {n_sweep}")));
    }
    if n_channel_draws < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 channel draws, got {n_channel_draws}"
        )));
    }
    let m = cfg.tx_antennas;
    let beta = cfg.sensing_gain();
    let budget = cfg.power_budget();
    let tau_max = m as f64 * (1.0 + beta * budget / m as f64).ln();
    let taus = linspace(0.0, tau_max, n_sweep);
    let t_sigma2 = cfg.coherence_length as f64 * cfg.comm_noise_var;
    let opts = SolveOptions::default();
    let bcrb_applies = cfg.sensing_fading.bcrb_eligible();

    // per draw: rate and BCRB integrand at every sweep level, warm-started
    // along the grid
    let per_draw: Vec<Vec<(f64, f64)>> = par_trials(n_channel_draws, seed, |_, rng| {
        let h_c = sample_nakagami_matrix(cfg.comm_antennas, m, &cfg.comm_fading, rng);
        let mut warm: Option<ComplexMatrix> = None;
        taus.iter()
            .map(|&tau| {
                let cset = PsdConstraintSet {
                    trace_budget: budget,
                    floor: if tau <= 0.0 {
                        FloorKind::None
                    } else {
                        FloorKind::LogDet { gain: beta, tau }
                    },
                };
                match maximize_rate_with_floor_from(&h_c, t_sigma2, &cset, &opts, warm.as_ref()) {
                    Ok(pt) => {
                        let bcrb = if bcrb_applies {
                            bcrb_from_gram(&pt.q, cfg).unwrap_or(f64::NAN)
                        } else {
                            f64::NAN
                        };
                        let rate = pt.objective.0;
                        warm = Some(pt.q);
                        (rate, bcrb)
                    }
                    Err(_) => (f64::NAN, f64::NAN),
                }
            })
            .collect()
    });

    let prior = m as f64
        * cfg.sensing_antennas as f64
        * cfg.sensing_fading.omega()
        * c_m(&cfg.sensing_fading).exp();
    let mut points = Vec::with_capacity(n_sweep);
    for (k, &tau) in taus.iter().enumerate() {
        let rates: Vec<f64> = per_draw.iter().map(|row| row[k].0).collect();
        let rate_est = McEstimate::from_values(&rates, seed)?;
        let bcrb = if bcrb_applies {
            let vals: Vec<f64> = per_draw.iter().map(|row| row[k].1).collect();
            let est = McEstimate::from_values(&vals, seed)?;
            Some((est.mean, est.stderr))
        } else {
            None
        };
        points.push(RegionPoint {
            sweep_param: tau,
            d_bound: prior * (-tau / m as f64).exp(),
            d_stderr: 0.0,
            rate_mean: rate_est.mean,
            rate_stderr: rate_est.stderr,
            bcrb,
            excluded: rate_est.excluded,
        });
    }
    Ok(points)
}

/// Converse-region sweep for occupancy detection: the beamformed-energy
/// floor γ = v†Qv runs from 0 to the full power budget; each level maps to
/// the detection-error bound at D_avg = (|α|²/(2σ²_s))·γ.
pub fn pareto_sweep_occupancy(
    occ: &OccupancyConfig,
    n_channel_draws: u64,
    n_sweep: usize,
    seed: u64,
    comp: BoundComposition,
    conv: KlConvention,
) -> Result<Vec<RegionPoint>> {
    if n_sweep < 1 {
        return Err(Error::Domain("need n_sweep >= 1".into()));
    }
    if n_channel_draws < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 channel draws, got {n_channel_draws}"
        )));
    }
    let cfg = &occ.system;
    let m = cfg.tx_antennas;
    let budget = cfg.power_budget();
    let gammas = linspace(0.0, budget, n_sweep);
    let t_sigma2 = cfg.coherence_length as f64 * cfg.comm_noise_var;
    let opts = SolveOptions::default();

    let per_draw: Vec<Vec<f64>> = par_trials(n_channel_draws, seed, |_, rng| {
        let h_c = sample_nakagami_matrix(cfg.comm_antennas, m, &cfg.comm_fading, rng);
        let mut warm: Option<ComplexMatrix> = None;
        gammas
            .iter()
            .map(|&gamma| {
                let cset = PsdConstraintSet {
                    trace_budget: budget,
                    floor: if gamma <= 0.0 {
                        FloorKind::None
                    } else {
                        FloorKind::QuadForm {
                            direction: occ.steering.clone(),
                            gamma,
                        }
                    },
                };
                match maximize_rate_with_floor_from(&h_c, t_sigma2, &cset, &opts, warm.as_ref()) {
                    Ok(pt) => {
                        let rate = pt.objective.0;
                        warm = Some(pt.q);
                        rate
                    }
                    Err(_) => f64::NAN,
                }
            })
            .collect()
    });

    let mut points = Vec::with_capacity(n_sweep);
    for (k, &gamma) in gammas.iter().enumerate() {
        let rates: Vec<f64> = per_draw.iter().map(|row| row[k]).collect();
        let rate_est = McEstimate::from_values(&rates, seed)?;
        points.push(RegionPoint {
            sweep_param: gamma,
            d_bound: detection_bound_from_beam_energy(gamma, occ, comp, conv)?,
            d_stderr: 0.0,
            rate_mean: rate_est.mean,
            rate_stderr: rate_est.stderr,
            bcrb: None,
            excluded: rate_est.excluded,
        });
    }
    Ok(points)
}

/// The Pareto staircase of a point cloud in the (D, R) plane: dominated
/// points (another point has no larger D and no smaller R) are dropped,
/// then an upper-concave-hull pass keeps the convex boundary. The output
/// is sorted by D ascending with R non-decreasing.
pub fn pareto_hull(points: &[RegionPoint]) -> Vec<RegionPoint> {
    if points.is_empty() {
        return Vec::new();
    }
    let mut sorted: Vec<RegionPoint> = points.to_vec();
    sorted.sort_by(|a, b| {
        a.d_bound
            .partial_cmp(&b.d_bound)
            .unwrap()
            .then(b.rate_mean.partial_cmp(&a.rate_mean).unwrap())
    });
    // dominance sweep: ascending D, keep only strict improvements in R
    let mut undominated: Vec<RegionPoint> = Vec::new();
    for p in sorted {
        match undominated.last() {
            Some(last) if p.rate_mean <= last.rate_mean => {}
            _ => undominated.push(p),
        }
    }
    // upper concave hull over (D, R)
    let mut hull: Vec<RegionPoint> = Vec::new();
    for p in undominated {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            let cross = (b.d_bound - a.d_bound) * (p.rate_mean - a.rate_mean)
                - (b.rate_mean - a.rate_mean) * (p.d_bound - a.d_bound);
            // middle point on or below the chord: remove
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::trial_rng;
    use crate::nakagami::NakagamiParams;
    use approx::assert_relative_eq;

    /// Closed-form water-filling on the eigenvalues of H†H/(Tσ²): the
    /// independent optimality oracle for the floor-free solver.
    pub(crate) fn water_filling_objective(h: &ComplexMatrix, t_sigma2: f64, budget: f64) -> f64 {
        let (gains, _) = h.adjoint().gram().scale(1.0 / t_sigma2).eigh();
        let mut g: Vec<f64> = gains.into_iter().filter(|&g| g > 1e-300).collect();
        g.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // the active set is the largest k whose water level clears 1/g_k
        for k in (1..=g.len()).rev() {
            let inv_sum: f64 = g[..k].iter().map(|&gi| 1.0 / gi).sum();
            let level = (budget + inv_sum) / k as f64;
            if level > 1.0 / g[k - 1] {
                return g[..k].iter().map(|&gi| (level * gi).ln()).sum();
            }
        }
        0.0
    }

    fn cfg() -> SystemConfig {
        SystemConfig::new(
            4,
            4,
            4,
            16,
            2.0,
            1.0,
            1.0,
            NakagamiParams::new(1.0, 1.0).unwrap(),
            NakagamiParams::new(1.0, 0.25).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn simplex_projection_basics() {
        let p = project_simplex(&[0.5, 0.5], 1.0);
        assert_eq!(p, vec![0.5, 0.5]);
        let p = project_simplex(&[2.0, 0.0], 1.0);
        assert_relative_eq!(p[0], 1.0, epsilon = 1e-12);
        assert_eq!(p[1], 0.0);
        let p = project_simplex(&[-5.0, -7.0], 3.0);
        assert_relative_eq!(p.iter().sum::<f64>(), 3.0, epsilon = 1e-12);
        assert!(p.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn floor_free_solution_matches_water_filling() {
        let c = cfg();
        let t_sigma2 = 16.0;
        let budget = c.power_budget();
        let cset = PsdConstraintSet::new(budget, FloorKind::None).unwrap();
        let mut rng = trial_rng(31, 0);
        for _ in 0..20 {
            let h = sample_nakagami_matrix(4, 4, &c.comm_fading, &mut rng);
            let pt =
                maximize_rate_with_floor(&h, t_sigma2, &cset, &SolveOptions::default()).unwrap();
            let wf = water_filling_objective(&h, t_sigma2, budget);
            assert!(
                (pt.objective.0 - wf).abs() <= 1e-6 * (1.0 + wf),
                "solver {} vs water-filling {wf}",
                pt.objective.0
            );
            assert!(pt.kkt_residual <= 1e-6, "kkt residual {}", pt.kkt_residual);
            assert_relative_eq!(pt.q.trace_real(), budget, max_relative = 1e-9);
        }
    }

    #[test]
    fn logdet_floor_at_max_pins_isotropic() {
        let c = cfg();
        let budget = c.power_budget();
        let beta = c.sensing_gain();
        let tau_max = 4.0 * (1.0 + beta * budget / 4.0).ln();
        let cset = PsdConstraintSet::new(
            budget,
            FloorKind::LogDet {
                gain: beta,
                tau: tau_max,
            },
        )
        .unwrap();
        let mut rng = trial_rng(32, 0);
        let h = sample_nakagami_matrix(4, 4, &c.comm_fading, &mut rng);
        let pt = maximize_rate_with_floor(&h, 16.0, &cset, &SolveOptions::default()).unwrap();
        let iso = ComplexMatrix::identity(4).scale(budget / 4.0);
        assert!(pt.q.sub(&iso).frobenius_norm() <= 1e-9 * iso.frobenius_norm());

        // beyond the maximum: infeasible
        let bad = PsdConstraintSet::new(
            budget,
            FloorKind::LogDet {
                gain: beta,
                tau: tau_max * 1.01,
            },
        )
        .unwrap();
        assert!(matches!(
            maximize_rate_with_floor(&h, 16.0, &bad, &SolveOptions::default()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn quadform_floor_beyond_budget_is_infeasible() {
        let v = crate::occupancy::steering_vector(4, 0.4);
        let cset = PsdConstraintSet::new(
            10.0,
            FloorKind::QuadForm {
                direction: v,
                gamma: 10.5,
            },
        )
        .unwrap();
        assert!(matches!(
            cset.certify_feasible(4),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn quadform_floor_at_budget_pins_rank_one() {
        let c = cfg();
        let budget = c.power_budget();
        let v = crate::occupancy::steering_vector(4, 0.4);
        let cset = PsdConstraintSet::new(
            budget,
            FloorKind::QuadForm {
                direction: v.clone(),
                gamma: budget,
            },
        )
        .unwrap();
        let mut rng = trial_rng(33, 0);
        let h = sample_nakagami_matrix(4, 4, &c.comm_fading, &mut rng);
        let pt = maximize_rate_with_floor(&h, 16.0, &cset, &SolveOptions::default()).unwrap();
        let pinned = v.mul(&v.adjoint()).scale(budget);
        assert!(pt.q.sub(&pinned).frobenius_norm() <= 1e-9 * pinned.frobenius_norm());
        // objective equals the rank-one beamformed rate
        let hv = h.mul(&v);
        let expected = (1.0 + budget / 16.0 * hv.gram().trace_real()).ln();
        assert_relative_eq!(pt.objective.0, expected, max_relative = 1e-9);
    }

    #[test]
    fn floored_solutions_are_feasible_and_monotone() {
        let c = cfg();
        let budget = c.power_budget();
        let beta = c.sensing_gain();
        let tau_max = 4.0 * (1.0 + beta * budget / 4.0).ln();
        let mut rng = trial_rng(34, 0);
        let h = sample_nakagami_matrix(4, 4, &c.comm_fading, &mut rng);
        let mut last_rate = f64::INFINITY;
        for frac in [0.0, 0.25, 0.5, 0.75, 0.95, 1.0] {
            let tau = frac * tau_max;
            let cset = PsdConstraintSet::new(
                budget,
                if tau == 0.0 {
                    FloorKind::None
                } else {
                    FloorKind::LogDet { gain: beta, tau }
                },
            )
            .unwrap();
            let pt = maximize_rate_with_floor(&h, 16.0, &cset, &SolveOptions::default()).unwrap();
            assert!(pt.converged);
            assert_relative_eq!(pt.q.trace_real(), budget, max_relative = 1e-6);
            assert!(
                pt.floor_value >= tau - 1e-6 * (1.0 + tau),
                "floor {} below level {tau}",
                pt.floor_value
            );
            assert!(
                pt.objective.0 <= last_rate + 1e-7,
                "rate increased as the floor tightened"
            );
            last_rate = pt.objective.0;
        }
    }

    #[test]
    fn nakagami_sweep_endpoints() {
        let c = cfg();
        let points = pareto_sweep_nakagami(&c, 40, 6, 7).unwrap();
        assert_eq!(points.len(), 6);
        let prior = 16.0 * c.sensing_fading.omega();
        assert_relative_eq!(points[0].d_bound, prior, max_relative = 1e-12);
        let global = crate::nakagami::mmse_lower_bound_global(&c);
        assert_relative_eq!(points.last().unwrap().d_bound, global, max_relative = 1e-9);
        // D strictly decreasing, rate non-increasing within noise
        for w in points.windows(2) {
            assert!(w[1].d_bound < w[0].d_bound);
            assert!(
                w[1].rate_mean
                    <= w[0].rate_mean + 2.0 * (w[0].rate_stderr + w[1].rate_stderr) + 1e-9
            );
        }
        // Rayleigh: BCRB columns present
        assert!(points[0].bcrb.is_some());
    }

    #[test]
    fn occupancy_sweep_endpoints() {
        let occ = crate::occupancy::tests::occupancy_cfg();
        let points = pareto_sweep_occupancy(
            &occ,
            30,
            5,
            11,
            BoundComposition::TwoStage,
            KlConvention::HalfPrefactor,
        )
        .unwrap();
        assert_eq!(points.len(), 5);
        assert_eq!(points[0].d_bound, 0.5);
        for w in points.windows(2) {
            assert!(w[1].d_bound < w[0].d_bound);
            assert!(
                w[1].rate_mean
                    <= w[0].rate_mean + 2.0 * (w[0].rate_stderr + w[1].rate_stderr) + 1e-9
            );
        }
        assert!(points.iter().all(|p| p.bcrb.is_none()));
    }

    fn rp(d: f64, r: f64) -> RegionPoint {
        RegionPoint {
            sweep_param: 0.0,
            d_bound: d,
            d_stderr: 0.0,
            rate_mean: r,
            rate_stderr: 0.0,
            bcrb: None,
            excluded: 0,
        }
    }

    #[test]
    fn pareto_hull_cases() {
        let single = pareto_hull(&[rp(1.0, 1.0)]);
        assert_eq!(single.len(), 1);

        let two = pareto_hull(&[rp(2.0, 2.0), rp(1.0, 1.0)]);
        assert_eq!(two.len(), 2);
        assert_eq!(two[0].d_bound, 1.0);

        // middle point below the chord is removed
        let three = pareto_hull(&[rp(0.0, 0.0), rp(1.0, 0.2), rp(2.0, 2.0)]);
        assert_eq!(three.len(), 2);

        // dominated point (higher D, lower R) is removed
        let dom = pareto_hull(&[rp(1.0, 2.0), rp(1.5, 1.0), rp(2.0, 3.0)]);
        assert!(dom.iter().all(|p| (p.d_bound - 1.5).abs() > 1e-12));

        // brute force dominance oracle on a random-ish cloud
        let cloud: Vec<RegionPoint> = (0..20)
            .map(|i| {
                let d = (i as f64 * 0.37).sin().abs();
                let r = (i as f64 * 0.73).cos().abs() * 2.0;
                rp(d, r)
            })
            .collect();
        let hull = pareto_hull(&cloud);
        for p in &hull {
            for q in &cloud {
                let dominates =
                    q.d_bound <= p.d_bound - 1e-15 && q.rate_mean >= p.rate_mean + 1e-15;
                assert!(
                    !dominates,
                    "hull point ({}, {}) is dominated",
                    p.d_bound, p.rate_mean
                );
            }
        }
        for w in hull.windows(2) {
            assert!(w[0].d_bound < w[1].d_bound);
            assert!(w[0].rate_mean <= w[1].rate_mean);
        }
    }
}
