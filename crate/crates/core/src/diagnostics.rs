//! Quantitative checks along trajectories: distance-comparison (Harnack)
//! ratios, the energy functional and its dissipation identity, the curvature
//! ratio R = (−Δ_h v − bv)/vᵖ with its weighted moments, the universal
//! time-derivative bound, decay-rate fits toward the steady profile, and
//! space-time scaling envelopes in the extinction frame.
//!
//! Everything here is a pure function of immutable trajectories. Constants
//! such as the comparison constant c₀ or the decay rate γ are *measured*
//! outputs with explicit windows — the theory guarantees existence, not
//! values — except where a closed form pins them and the tests assert it.

use serde::{Deserialize, Serialize};

use crate::domain::{dirichlet_energy, distance_field, integrate, GridFunction};
use crate::error::FdeError;
use crate::evolve::{Frame, Trajectory};
use crate::fit;
use crate::steady::SteadyState;
use crate::tolerances::{
    FIT_BURN_IN_FACTOR, FIT_FLOOR_FACTOR, FIT_LINE_BAND, FIT_MAX_REL_ERR, FIT_MIN_DECAY,
    HARNACK_DEGENERATE_SPREAD, MIN_FIT_POINTS, R_MASK_FRACTION,
};

/// Named, strictly increasing (t, value) series with a scale note.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeSeries {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub note: String,
}

impl TimeSeries {
    pub fn new(name: &str, points: Vec<(f64, f64)>, note: &str) -> Result<TimeSeries, FdeError> {
        for k in 0..points.len() {
            if !points[k].1.is_finite() {
                return Err(FdeError::Contract(format!(
                    "series {name} has a non-finite value at t = {}",
                    points[k].0
                )));
            }
            if k > 0 && !(points[k].0 > points[k - 1].0) {
                return Err(FdeError::Contract(format!(
                    "series {name} has non-increasing times at index {k}"
                )));
            }
        }
        Ok(TimeSeries {
            name: name.to_string(),
            points,
            note: note.to_string(),
        })
    }

    pub fn max_value(&self) -> f64 {
        self.points.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest value among points with t in [a, b].
    pub fn max_on(&self, a: f64, b: f64) -> f64 {
        self.points
            .iter()
            .filter(|&&(t, _)| t >= a && t <= b)
            .map(|&(_, v)| v)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// One named pass/fail verdict with the tolerance it was judged against.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckFlag {
    pub name: String,
    pub passed: bool,
    pub tolerance_name: String,
    pub tolerance: f64,
    pub observed: f64,
    pub message: String,
}

/// Aggregated diagnostics of one run: series, measured constants, verdicts.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub series: std::collections::BTreeMap<String, TimeSeries>,
    pub constants: std::collections::BTreeMap<String, f64>,
    pub flags: Vec<CheckFlag>,
}

impl DiagnosticsReport {
    pub fn insert_series(&mut self, s: TimeSeries) {
        self.series.insert(s.name.clone(), s);
    }

    pub fn all_passed(&self) -> bool {
        self.flags.iter().all(|f| f.passed)
    }
}

// ---------------------------------------------------------------------------
// Distance comparison (Harnack) ratio.
// ---------------------------------------------------------------------------

/// Extremes of v/d over interior nodes. `degenerate` is raised when v fails
/// to vanish at first order at the boundary: either v ≤ 0 somewhere inside
/// (min reported as 0), or the ratio spread collapses (min/max below
/// `HARNACK_DEGENERATE_SPREAD`, the discrete signature of higher-order
/// boundary vanishing such as v = d²).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HarnackRatio {
    pub min: f64,
    pub max: f64,
    /// max(max, 1/min); infinite when degenerate.
    pub c0: f64,
    pub degenerate: bool,
}

pub fn harnack_ratio(v: &GridFunction<f64>) -> Result<HarnackRatio, FdeError> {
    if !v.is_dirichlet() {
        return Err(FdeError::Contract(
            "harnack ratio expects a Dirichlet field".into(),
        ));
    }
    let grid = v.grid();
    let d = distance_field(grid);
    let mut min = f64::INFINITY;
    let mut max: f64 = 0.0;
    let mut nonpositive = false;
    for i in grid.interior_indices() {
        let vi = v.values()[i];
        if vi <= 0.0 {
            nonpositive = true;
            min = 0.0;
            continue;
        }
        let r = vi / d.values()[i];
        min = min.min(r);
        max = max.max(r);
    }
    let degenerate = nonpositive || (max > 0.0 && min < HARNACK_DEGENERATE_SPREAD * max);
    let c0 = if degenerate && min == 0.0 {
        f64::INFINITY
    } else {
        max.max(min.recip())
    };
    Ok(HarnackRatio {
        min,
        max,
        c0,
        degenerate,
    })
}

// ---------------------------------------------------------------------------
// Energy and dissipation.
// ---------------------------------------------------------------------------

/// Frame-aware energy functional:
///
///   base:      J[u] = ∫(|∇u|² − b·u²)
///   rescaled:  J[v] = ∫(|∇v|² − b·v² − (2/(p+1))|v|^{p+1})
///
/// Each is a Lyapunov functional of its flow with the same dissipation law
/// dJ/dt = −2p∫v^{p−1}(∂ₜv)².
pub fn energy_j(v: &GridFunction<f64>, p: f64, b: f64, frame: Frame) -> Result<f64, FdeError> {
    if !v.is_dirichlet() {
        return Err(FdeError::Contract("energy expects a Dirichlet field".into()));
    }
    let grad = dirichlet_energy(v);
    let mass = integrate(&v.map(|x| x * x), None)?;
    let base = grad - b * mass;
    match frame {
        Frame::Base => Ok(base),
        Frame::Rescaled => {
            let pot = integrate(&v.map(|x| x.abs().powf(p + 1.0)), None)?;
            Ok(base - 2.0 / (p + 1.0) * pot)
        }
    }
}

/// Discrete check of the dissipation identity along a trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DissipationCheck {
    /// J(t_k) at every snapshot.
    pub energy: TimeSeries,
    /// |ΔJ/Δt + 2p∫v^{p−1}(∂ₜv)²| at interior snapshot times.
    pub residual: TimeSeries,
    /// The residual divided by |ΔJ/Δt|.
    pub relative: TimeSeries,
    /// True when J never increases between adjacent snapshots.
    pub monotone: bool,
    /// Largest upward jump of J between adjacent snapshots (0 if monotone).
    pub max_uptick: f64,
}

/// Centered-difference evaluation of dJ/dt + 2p∫v^{p−1}(∂ₜv)² at interior
/// snapshot times; works in either frame with that frame's energy.
pub fn dissipation_residual(traj: &Trajectory) -> Result<DissipationCheck, FdeError> {
    if traj.len() < 3 {
        return Err(FdeError::Estimation(format!(
            "dissipation check needs at least 3 snapshots, got {}",
            traj.len()
        )));
    }
    let p = traj.p;
    let energies: Vec<f64> = traj
        .snapshots
        .iter()
        .map(|s| energy_j(s, p, traj.b, traj.frame))
        .collect::<Result<_, _>>()?;
    let mut monotone = true;
    let mut max_uptick: f64 = 0.0;
    for k in 1..energies.len() {
        let jump = energies[k] - energies[k - 1];
        if jump > 0.0 {
            monotone = false;
            max_uptick = max_uptick.max(jump);
        }
    }
    let mut residual = Vec::with_capacity(traj.len() - 2);
    let mut relative = Vec::with_capacity(traj.len() - 2);
    for k in 1..traj.len() - 1 {
        let span = traj.times[k + 1] - traj.times[k - 1];
        let dj = (energies[k + 1] - energies[k - 1]) / span;
        let vdot = traj.snapshots[k + 1].zip_with(&traj.snapshots[k - 1], |a, b| (a - b) / span)?;
        let integrand = traj.snapshots[k]
            .zip_with(&vdot, |v, w| v.abs().powf(p - 1.0) * w * w)?;
        let dissipation = 2.0 * p * integrate(&integrand, None)?;
        let r = (dj + dissipation).abs();
        residual.push((traj.times[k], r));
        relative.push((traj.times[k], r / dj.abs().max(f64::MIN_POSITIVE)));
    }
    Ok(DissipationCheck {
        energy: TimeSeries::new(
            "J",
            traj.times.iter().copied().zip(energies).collect(),
            "energy functional per snapshot",
        )?,
        residual: TimeSeries::new(
            "dissipation_residual",
            residual,
            "|dJ/dt + 2p∫v^{p-1}(dv/dt)^2|, centered differences",
        )?,
        relative: TimeSeries::new(
            "dissipation_residual_rel",
            relative,
            "residual relative to |dJ/dt|",
        )?,
        monotone,
        max_uptick,
    })
}

// ---------------------------------------------------------------------------
// Curvature ratio R and its moments.
// ---------------------------------------------------------------------------

/// The curvature ratio along a snapshot. `r_elliptic` is
/// (−Δ_h v − bv)/vᵖ; `r_time` (when a forward-in-time neighbor was given)
/// is the flow identity 1 − p·(∂ₜv)/v, valid along the rescaled flow.
/// Interior nodes with v below `R_MASK_FRACTION`·d are masked: their R is
/// set to 0 and their indices reported — pointwise quotients there amplify
/// noise without carrying information. Boundary nodes carry the value of
/// their nearest interior neighbor (one-sided extension).
#[derive(Debug, Clone)]
pub struct CurvatureField {
    pub r_elliptic: GridFunction<f64>,
    pub r_time: Option<GridFunction<f64>>,
    pub masked: Vec<usize>,
    pub masked_fraction: f64,
}

impl CurvatureField {
    /// Max-norm of r_elliptic − r_time over unmasked interior nodes.
    pub fn route_discrepancy(&self) -> Option<f64> {
        let rt = self.r_time.as_ref()?;
        let grid = self.r_elliptic.grid();
        let masked: std::collections::HashSet<usize> = self.masked.iter().copied().collect();
        let mut sup: f64 = 0.0;
        for i in grid.interior_indices() {
            if !masked.contains(&i) {
                sup = sup.max((self.r_elliptic.values()[i] - rt.values()[i]).abs());
            }
        }
        Some(sup)
    }

    /// Max-norm of r_elliptic − c over unmasked interior nodes.
    pub fn elliptic_deviation_from(&self, c: f64) -> f64 {
        let grid = self.r_elliptic.grid();
        let masked: std::collections::HashSet<usize> = self.masked.iter().copied().collect();
        let mut sup: f64 = 0.0;
        for i in grid.interior_indices() {
            if !masked.contains(&i) {
                sup = sup.max((self.r_elliptic.values()[i] - c).abs());
            }
        }
        sup
    }
}

/// Copy each boundary node's value from its nearest interior neighbor.
fn extend_to_boundary(f: &mut [f64], grid: &crate::domain::Grid<f64>) {
    let clamp_interior = |i: usize, n: usize| -> usize { i.max(1).min(n.saturating_sub(2)) };
    let nx = grid.nodes_per_axis(0);
    match grid.dimension() {
        1 => {
            for idx in 0..grid.node_count() {
                if grid.is_boundary(idx) {
                    f[idx] = f[clamp_interior(idx, nx)];
                }
            }
        }
        _ => {
            let ny = grid.nodes_per_axis(1);
            for idx in 0..grid.node_count() {
                if grid.is_boundary(idx) {
                    let [ix, iy] = grid.multi_index(idx);
                    let src = grid.index(clamp_interior(ix, nx), clamp_interior(iy, ny));
                    f[idx] = f[src];
                }
            }
        }
    }
}

pub fn curvature_r(
    v: &GridFunction<f64>,
    p: f64,
    b: f64,
    dt_pair: Option<(&GridFunction<f64>, f64)>,
) -> Result<CurvatureField, FdeError> {
    if !v.is_dirichlet() {
        return Err(FdeError::Contract(
            "curvature ratio expects a Dirichlet field".into(),
        ));
    }
    let grid = v.grid().clone();
    let d = distance_field(&grid);
    let v_int = v.interior_values();
    let neg_l = crate::linalg::apply_neg_lap(&grid, b, &v_int); // (−Δ_h − b)v

    let mut masked = Vec::new();
    let mut r_e = vec![0.0; grid.node_count()];
    for (k, i) in grid.interior_indices().enumerate() {
        let vi = v.values()[i];
        if vi < R_MASK_FRACTION * d.values()[i] {
            masked.push(i);
        } else {
            r_e[i] = neg_l[k] / vi.powf(p);
        }
    }
    let masked_fraction = masked.len() as f64 / grid.interior_count() as f64;
    extend_to_boundary(&mut r_e, &grid);
    let r_elliptic = GridFunction::from_values(grid.clone(), r_e)?;

    let r_time = match dt_pair {
        None => None,
        Some((v_next, dt)) => {
            v.check_same_grid(v_next)?;
            if !(dt > 0.0) {
                return Err(FdeError::Parameter(format!(
                    "time-derivative pair needs dt > 0, got {dt}"
                )));
            }
            let masked_set: std::collections::HashSet<usize> = masked.iter().copied().collect();
            let mut r_t = vec![0.0; grid.node_count()];
            for i in grid.interior_indices() {
                if !masked_set.contains(&i) {
                    let vi = v.values()[i];
                    let vdot = (v_next.values()[i] - vi) / dt;
                    r_t[i] = 1.0 - p * vdot / vi;
                }
            }
            extend_to_boundary(&mut r_t, &grid);
            Some(GridFunction::from_values(grid.clone(), r_t)?)
        }
    };

    Ok(CurvatureField {
        r_elliptic,
        r_time,
        masked,
        masked_fraction,
    })
}

/// Weighted moment series M_q(t) = ∫|R−1|^q v^{p+1} over unmasked interior
/// nodes, with the largest masked fraction encountered.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentSeries {
    pub series: TimeSeries,
    pub masked_fraction_max: f64,
}

pub fn moments_mq(traj: &Trajectory, q: f64) -> Result<MomentSeries, FdeError> {
    if !(q >= 1.0) {
        return Err(FdeError::Parameter(format!("moment order must be ≥ 1, got {q}")));
    }
    if traj.frame != Frame::Rescaled {
        return Err(FdeError::Contract(
            "moments are defined along rescaled trajectories".into(),
        ));
    }
    let p = traj.p;
    let grid = traj.grid().clone();
    let mut points = Vec::with_capacity(traj.len());
    let mut frac_max: f64 = 0.0;
    for (t, v) in traj.times.iter().zip(traj.snapshots.iter()) {
        let cur = curvature_r(v, p, traj.b, None)?;
        frac_max = frac_max.max(cur.masked_fraction);
        let masked: std::collections::HashSet<usize> = cur.masked.iter().copied().collect();
        let mut acc = 0.0;
        for i in grid.interior_indices() {
            if !masked.contains(&i) {
                let r = cur.r_elliptic.values()[i];
                let vi = v.values()[i];
                acc += grid.quad_weight(i) * (r - 1.0).abs().powf(q) * vi.powf(p + 1.0);
            }
        }
        points.push((*t, acc));
    }
    Ok(MomentSeries {
        series: TimeSeries::new(
            &format!("M_{q}"),
            points,
            "weighted curvature moment over unmasked interior nodes",
        )?,
        masked_fraction_max: frac_max,
    })
}

// ---------------------------------------------------------------------------
// Universal time-derivative bound.
// ---------------------------------------------------------------------------

/// The universal upper bound on ∂ₜv along the rescaled flow:
/// ∂ₜv ≤ p/((p−1)²)·[1 − e^{−pt/(p−1)}]⁻¹·v for t > 0.
pub fn time_derivative_bound_coefficient(p: f64, t: f64) -> f64 {
    p / ((p - 1.0) * (p - 1.0)) / (1.0 - (-p * t / (p - 1.0)).exp())
}

/// Per-snapshot margin max_i(∂ₜv − bound·v) at positive snapshot times;
/// negative margin means the bound holds. ∂ₜv is centered at interior
/// times and one-sided at the last snapshot.
pub fn benilan_crandall_margin(traj: &Trajectory) -> Result<TimeSeries, FdeError> {
    if traj.frame != Frame::Rescaled {
        return Err(FdeError::Contract(
            "the time-derivative bound applies to rescaled trajectories".into(),
        ));
    }
    if traj.len() < 2 {
        return Err(FdeError::Estimation(
            "time-derivative bound needs at least 2 snapshots".into(),
        ));
    }
    let p = traj.p;
    let grid = traj.grid().clone();
    let mut points = Vec::new();
    for k in 1..traj.len() {
        let t = traj.times[k];
        let (lo, hi) = if k + 1 < traj.len() { (k - 1, k + 1) } else { (k - 1, k) };
        let span = traj.times[hi] - traj.times[lo];
        let coeff = time_derivative_bound_coefficient(p, t);
        let mut margin = f64::NEG_INFINITY;
        for i in grid.interior_indices() {
            let vdot = (traj.snapshots[hi].values()[i] - traj.snapshots[lo].values()[i]) / span;
            let m = vdot - coeff * traj.snapshots[k].values()[i];
            margin = margin.max(m);
        }
        points.push((t, margin));
    }
    TimeSeries::new(
        "bc_margin",
        points,
        "max over interior nodes of dv/dt − bound·v; ≤ 0 means satisfied",
    )
}

// ---------------------------------------------------------------------------
// Convergence-rate fits.
// ---------------------------------------------------------------------------

/// Result of fitting exponential decay of the profile-normalized error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateFit {
    /// Decay rate of log ‖v/S − 1‖∞ (positive = decay).
    pub gamma_sup: f64,
    /// Decay rate of the S^{p+1}-weighted L² error.
    pub gamma_weighted: f64,
    /// R² of the sup-norm fit.
    pub r2: f64,
    /// True when no trustworthy fit window exists (error not decaying, too
    /// few points, or sitting at the solver-noise floor).
    pub refused: bool,
    /// Fit window in trajectory time (0,0 when refused).
    pub window: (f64, f64),
    pub sup_error: TimeSeries,
    pub weighted_error: TimeSeries,
}

/// Sup-norm relative error ‖v/S − 1‖∞ over interior nodes per snapshot.
pub fn relative_error_series(
    traj: &Trajectory,
    steady: &SteadyState,
) -> Result<TimeSeries, FdeError> {
    steady.s.check_same_grid(&traj.snapshots[0])?;
    let grid = traj.grid().clone();
    let pts = traj
        .times
        .iter()
        .zip(traj.snapshots.iter())
        .map(|(&t, v)| {
            let mut sup: f64 = 0.0;
            for i in grid.interior_indices() {
                sup = sup.max((v.values()[i] / steady.s.values()[i] - 1.0).abs());
            }
            (t, sup)
        })
        .collect();
    TimeSeries::new("rel_err_sup", pts, "sup of |v/S − 1| over interior nodes")
}

/// S^{p+1}-weighted L² relative error (∫(v/S − 1)²·S^{p+1})^{1/2}.
pub fn weighted_error_series(
    traj: &Trajectory,
    steady: &SteadyState,
) -> Result<TimeSeries, FdeError> {
    steady.s.check_same_grid(&traj.snapshots[0])?;
    let p = traj.p;
    let pts = traj
        .times
        .iter()
        .zip(traj.snapshots.iter())
        .map(|(&t, v)| -> Result<(f64, f64), FdeError> {
            let integrand = v.zip_with(&steady.s, |vi, si| {
                if si == 0.0 {
                    0.0
                } else {
                    let e = vi / si - 1.0;
                    e * e * si.powf(p + 1.0)
                }
            })?;
            Ok((t, integrate(&integrand, None)?.sqrt()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    TimeSeries::new(
        "rel_err_weighted",
        pts,
        "sqrt of ∫(v/S − 1)^2 S^{p+1}",
    )
}

/// Least-squares decay rates of the two error norms over the straight part
/// of the decay. Snapshots with sup error above `FIT_MAX_REL_ERR` are
/// ignored outright; within the rest, the head stays out of the window
/// until the error falls below the peak over `FIT_BURN_IN_FACTOR` (initial
/// transient), and the window ends once the series comes within
/// `FIT_FLOOR_FACTOR` of its minimum (error floor). A seed regression on
/// the early half of that window is then extended forward only while the
/// log-errors stay within `FIT_LINE_BAND` of the seed line, which cuts off
/// the bent tail produced by extinction-time misfit. The fit refuses
/// unless at least `MIN_FIT_POINTS` remain with a net decay of
/// `FIT_MIN_DECAY` across the final window. `robust` switches the sup-norm
/// fit to the median-of-slopes estimator for noisy tails.
pub fn convergence_rate(
    traj: &Trajectory,
    steady: &SteadyState,
    robust: bool,
) -> Result<RateFit, FdeError> {
    let sup_error = relative_error_series(traj, steady)?;
    let weighted_error = weighted_error_series(traj, steady)?;

    let refused = |sup_error: TimeSeries, weighted_error: TimeSeries| RateFit {
        gamma_sup: 0.0,
        gamma_weighted: 0.0,
        r2: 0.0,
        refused: true,
        window: (0.0, 0.0),
        sup_error,
        weighted_error,
    };

    // Candidate tail: below the large-error cutoff and strictly positive.
    let candidates: Vec<(f64, f64)> = sup_error
        .points
        .iter()
        .copied()
        .filter(|&(_, e)| e > 0.0 && e < FIT_MAX_REL_ERR)
        .collect();
    if candidates.len() < MIN_FIT_POINTS {
        return Ok(refused(sup_error, weighted_error));
    }
    // Keep the middle of the decay: drop the initial transient and the
    // approach to the error floor, where the log-error curve bends.
    let floor = candidates.iter().map(|&(_, e)| e).fold(f64::INFINITY, f64::min);
    let peak = candidates.iter().map(|&(_, e)| e).fold(0.0, f64::max);
    let guarded: Vec<(f64, f64)> = candidates
        .iter()
        .copied()
        .skip_while(|&(_, e)| e > peak / FIT_BURN_IN_FACTOR)
        .take_while(|&(_, e)| e > FIT_FLOOR_FACTOR * floor)
        .collect();
    if guarded.len() < MIN_FIT_POINTS {
        return Ok(refused(sup_error, weighted_error));
    }
    // Seed a line on the early half, then extend while the series stays
    // within the log band of that line.
    let log_guarded: Vec<(f64, f64)> = guarded.iter().map(|&(t, e)| (t, e.ln())).collect();
    let seed_len = (log_guarded.len() / 2).max(MIN_FIT_POINTS).min(log_guarded.len());
    let seed = fit::ols(&log_guarded[..seed_len])?;
    let mut cut = seed_len;
    while cut < log_guarded.len() {
        let (t, le) = log_guarded[cut];
        if (le - (seed.intercept + seed.slope * t)).abs() > FIT_LINE_BAND {
            break;
        }
        cut += 1;
    }
    let window = &guarded[..cut];
    let log_sup = &log_guarded[..cut];
    if window.len() < MIN_FIT_POINTS {
        return Ok(refused(sup_error, weighted_error));
    }
    let decay = window[0].1 / window[window.len() - 1].1;
    if !(decay >= FIT_MIN_DECAY) {
        return Ok(refused(sup_error, weighted_error));
    }

    let sup_fit = if robust {
        fit::median_slopes(log_sup)?
    } else {
        fit::ols(log_sup)?
    };
    let (t_a, t_b) = (window[0].0, window[window.len() - 1].0);
    let log_weighted: Vec<(f64, f64)> = weighted_error
        .points
        .iter()
        .filter(|&&(t, e)| t >= t_a && t <= t_b && e > 0.0)
        .map(|&(t, e)| (t, e.ln()))
        .collect();
    let gamma_weighted = if log_weighted.len() >= 2 {
        -fit::ols(&log_weighted)?.slope
    } else {
        0.0
    };
    Ok(RateFit {
        gamma_sup: -sup_fit.slope,
        gamma_weighted,
        r2: sup_fit.r2,
        refused: false,
        window: (t_a, t_b),
        sup_error,
        weighted_error,
    })
}

// ---------------------------------------------------------------------------
// Scaling envelopes in the extinction frame.
// ---------------------------------------------------------------------------

/// Envelope constants C_l(t) = max_i |∂ₜˡu| / (d·(T*−t)^{1/(p−1)−l}) along a
/// base trajectory, with the sup over the observation window
/// [T*/4, T* − 5·dt].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvelopeResult {
    pub series: TimeSeries,
    pub sup: f64,
    pub window: (f64, f64),
    pub derivative_order: usize,
}

pub fn scaling_envelope(
    traj: &Trajectory,
    tstar: f64,
    l: usize,
) -> Result<EnvelopeResult, FdeError> {
    if traj.frame != Frame::Base {
        return Err(FdeError::Contract(
            "scaling envelopes are measured along base trajectories".into(),
        ));
    }
    if l > 1 {
        return Err(FdeError::Parameter(format!(
            "derivative order must be 0 or 1, got {l}"
        )));
    }
    let p = traj.p;
    let dt = traj.dt_policy.dt;
    let delta = 0.25 * tstar;
    let t_hi = tstar - 5.0 * dt;
    if !(tstar > 0.0) || !(t_hi > delta) {
        return Err(FdeError::Parameter(format!(
            "extinction time {tstar} leaves no observation window [T*/4, T*−5dt]"
        )));
    }
    if traj.times[traj.len() - 1] >= tstar {
        return Err(FdeError::Parameter(format!(
            "declared extinction time {tstar} does not exceed the last snapshot time {}",
            traj.times[traj.len() - 1]
        )));
    }
    if traj.times[0] > delta {
        return Err(FdeError::Parameter(
            "trajectory starts after the observation window opens".into(),
        ));
    }
    let grid = traj.grid().clone();
    let d = distance_field(&grid);
    let exponent = 1.0 / (p - 1.0) - l as f64;
    let mut points = Vec::new();
    for k in 0..traj.len() {
        let t = traj.times[k];
        if t > t_hi {
            break;
        }
        let scale = (tstar - t).powf(exponent);
        let mut c = 0.0f64;
        match l {
            0 => {
                for i in grid.interior_indices() {
                    c = c.max(traj.snapshots[k].values()[i] / (d.values()[i] * scale));
                }
                points.push((t, c));
            }
            _ => {
                if k == 0 || k + 1 >= traj.len() {
                    continue; // centered derivative unavailable at the ends
                }
                let span = traj.times[k + 1] - traj.times[k - 1];
                for i in grid.interior_indices() {
                    let udot =
                        (traj.snapshots[k + 1].values()[i] - traj.snapshots[k - 1].values()[i])
                            / span;
                    c = c.max(udot.abs() / (d.values()[i] * scale));
                }
                points.push((t, c));
            }
        }
    }
    let in_window: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(t, _)| t >= delta && t <= t_hi)
        .collect();
    if in_window.is_empty() {
        return Err(FdeError::Estimation(
            "no snapshots fall inside the envelope observation window".into(),
        ));
    }
    let sup = in_window.iter().map(|&(_, c)| c).fold(0.0f64, f64::max);
    Ok(EnvelopeResult {
        series: TimeSeries::new(
            &format!("envelope_C{l}"),
            points,
            "max_i |d_t^l u| / (d·(T*−t)^{1/(p−1)−l})",
        )?,
        sup,
        window: (delta, t_hi),
        derivative_order: l,
    })
}
