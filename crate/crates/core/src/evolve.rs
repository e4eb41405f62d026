//! Time integration of the extinction flow and its rescaled companion.
//!
//! Base frame:      ∂ₜuᵖ = Δu + bu          (finite-time extinction)
//! Rescaled frame:  ∂ₜvᵖ = Δv + bv + vᵖ     (flow toward the steady profile)
//!
//! The scheme is backward Euler in the variable w = uᵖ, where the equation
//! is an ordinary parabolic problem with nonlinearity w^{1/p}: each step
//! solves
//!
//!   w⁺ − w = dt·[(Δ_h + b)(w⁺)^{1/p} + σ·w⁺],   σ = 0 (base) or 1 (rescaled)
//!
//! by damped Newton. Working in w keeps the step well-defined where u
//! vanishes (boundary, extinction) — no division by u^{p−1} ever occurs.
//! The Newton linear system is transformed to a symmetric positive-definite
//! one and solved by a tridiagonal sweep in 1D or dense Cholesky in 2D.
//!
//! The frame transform implements the exact change of variables
//!
//!   v(x,t) = [p/((p−1)(T*−τ))]^{1/(p−1)} u(x,τ),
//!   t = (p/(p−1))·ln(T*/(T*−τ)),   τ = T*·(1 − e^{−((p−1)/p)·t}),
//!
//! under which the separable solution built on S maps to the constant-in-time
//! profile S. (The factor in the time map is forced by the rescaled equation
//! itself: matching diffusion terms requires dt/dτ = p/((p−1)(T*−τ)).)

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{Grid, GridFunction};
use crate::error::FdeError;
use crate::fit;
use crate::linalg::{dense_system, tridiag_system};
use crate::steady::SteadyState;
use crate::tolerances::{
    EXTINCTION_FLOOR_FRACTION, JACOBIAN_FLOOR, MAX_DT_HALVINGS, NEWTON_MAX_ITERS, NEWTON_TOL,
};

/// Which equation a trajectory solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Base,
    Rescaled,
}

/// Step-size and snapshot policy.
///
/// `dt` is the requested step. When `tstar_hint` is set, the effective step
/// near the hinted extinction time shrinks to (T̂ − t)/100 — the natural
/// scale on which the solution changes there — and the run stops at
/// T̂ − dt, beyond which the step would underflow the policy resolution.
/// `geometric_snapshots` (meaningful only with a hint) spaces snapshots so
/// that T̂ − t shrinks by a fixed ratio between records, resolving the
/// (T̂ − t)^{1/(p−1)} regime; otherwise the cadence is uniform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DtPolicy {
    pub dt: f64,
    pub snapshot_interval: f64,
    #[serde(default)]
    pub tstar_hint: Option<f64>,
    #[serde(default)]
    pub geometric_snapshots: bool,
}

impl DtPolicy {
    pub fn uniform(dt: f64, snapshot_interval: f64) -> Self {
        DtPolicy {
            dt,
            snapshot_interval,
            tstar_hint: None,
            geometric_snapshots: false,
        }
    }

    fn validate(&self) -> Result<(), FdeError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(FdeError::Parameter(format!(
                "dt must be positive and finite, got {}",
                self.dt
            )));
        }
        if !(self.snapshot_interval > 0.0) || !self.snapshot_interval.is_finite() {
            return Err(FdeError::Parameter(format!(
                "snapshot interval must be positive and finite, got {}",
                self.snapshot_interval
            )));
        }
        if let Some(ts) = self.tstar_hint {
            if !(ts > 0.0) || !ts.is_finite() {
                return Err(FdeError::Parameter(format!(
                    "extinction-time hint must be positive and finite, got {ts}"
                )));
            }
        }
        Ok(())
    }
}

/// Stop rule for the base flow; the extinction floor is always active on top.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub t_end: Option<f64>,
}

/// Ordered snapshots of one flow, with frame and parameter provenance.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub frame: Frame,
    pub p: f64,
    pub b: f64,
    pub times: Vec<f64>,
    pub snapshots: Vec<GridFunction<f64>>,
    pub dt_policy: DtPolicy,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> &Arc<Grid<f64>> {
        self.snapshots[0].grid()
    }

    /// Structural invariants: strictly increasing times, one grid, Dirichlet
    /// nonnegative snapshots, matching lengths.
    pub fn validate(&self) -> Result<(), FdeError> {
        if self.times.len() != self.snapshots.len() || self.times.is_empty() {
            return Err(FdeError::Contract(
                "trajectory needs equally many times and snapshots, at least one".into(),
            ));
        }
        for k in 1..self.times.len() {
            if !(self.times[k] > self.times[k - 1]) {
                return Err(FdeError::Contract(format!(
                    "snapshot times must increase strictly; t[{}] = {} after {}",
                    k,
                    self.times[k],
                    self.times[k - 1]
                )));
            }
        }
        let grid = self.grid();
        for (k, s) in self.snapshots.iter().enumerate() {
            s.check_same_grid(&self.snapshots[0])?;
            if !s.is_dirichlet() {
                return Err(FdeError::Contract(format!(
                    "snapshot {k} lost the Dirichlet tag"
                )));
            }
            if s.values().iter().any(|&v| v < 0.0) {
                return Err(FdeError::Contract(format!("snapshot {k} has negative nodes")));
            }
        }
        let _ = grid;
        Ok(())
    }

    /// Max-norm history (t, ‖u(t)‖∞) over snapshots.
    pub fn max_norm_series(&self) -> Vec<(f64, f64)> {
        self.times
            .iter()
            .zip(self.snapshots.iter())
            .map(|(&t, s)| (t, s.max_value()))
            .collect()
    }

    /// First `n` snapshots as a new trajectory.
    pub fn truncated(&self, n: usize) -> Trajectory {
        let n = n.min(self.len()).max(1);
        Trajectory {
            frame: self.frame,
            p: self.p,
            b: self.b,
            times: self.times[..n].to_vec(),
            snapshots: self.snapshots[..n].to_vec(),
            dt_policy: self.dt_policy.clone(),
        }
    }

    /// Snapshots with t ≤ t_max.
    pub fn restrict_to_time(&self, t_max: f64) -> Trajectory {
        let n = self.times.iter().take_while(|&&t| t <= t_max).count();
        self.truncated(n)
    }
}

/// Outcome of an evolve run. `failure` is set when the run aborted early
/// (step rejected even after the maximum number of dt-halvings); the
/// trajectory then holds the partial history up to the failure time.
#[derive(Debug, Clone)]
pub struct EvolveResult {
    pub trajectory: Trajectory,
    pub failure: Option<String>,
    pub steps_accepted: usize,
    pub dt_halvings: usize,
}

impl EvolveResult {
    /// The trajectory, insisting the run completed.
    pub fn expect_complete(self) -> Result<Trajectory, FdeError> {
        match self.failure {
            None => Ok(self.trajectory),
            Some(msg) => Err(FdeError::Solver(format!("run aborted early: {msg}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// The backward-Euler step.
// ---------------------------------------------------------------------------

/// One implicit step in w = uᵖ on interior values. `sigma` is the source
/// switch (0 base, 1 rescaled). Returns the new interior w or a step-failure
/// error after `NEWTON_MAX_ITERS` Newton iterations.
fn be_step_w(
    grid: &Arc<Grid<f64>>,
    p: f64,
    b: f64,
    sigma: f64,
    w: &[f64],
    dt: f64,
) -> Result<Vec<f64>, FdeError> {
    let inv_p = 1.0 / p;
    let mut what = w.to_vec();
    let shrink = 1.0 - sigma * dt;
    if shrink <= 0.0 {
        return Err(FdeError::Parameter(format!(
            "dt = {dt} too large for the implicit source term (needs dt < 1)"
        )));
    }
    for _ in 0..NEWTON_MAX_ITERS {
        // Residual F = ŵ − w − dt·[(Δ_h+b)ŵ^{1/p} + σŵ].
        let u_hat: Vec<f64> = what.iter().map(|&wi| wi.powf(inv_p)).collect();
        let neg_lu = crate::linalg::apply_neg_lap(grid, b, &u_hat); // (−Δ_h − b)u
        let f: Vec<f64> = (0..w.len())
            .map(|i| what[i] - w[i] - dt * (-neg_lu[i] + sigma * what[i]))
            .collect();
        let fnorm = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if fnorm <= NEWTON_TOL {
            return Ok(what);
        }
        // Newton system J δ = −F with J = (1−σdt)I − dt(Δ_h+b)D,
        // D = diag((1/p)ŵ^{1/p−1}). Substituting η = Dδ symmetrizes it:
        //   M η = −F,   M = (1−σdt)D⁻¹ + dt(−Δ_h−b),
        // which is positive definite for dt < 1 and b below the first
        // eigenvalue. δ = D⁻¹η then damps updates where w is tiny.
        let d_inv: Vec<f64> = what
            .iter()
            .map(|&wi| p * wi.max(JACOBIAN_FLOOR).powf(1.0 - inv_p))
            .collect();
        let extra: Vec<f64> = d_inv.iter().map(|&di| shrink * di).collect();
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let eta = match grid.dimension() {
            1 => tridiag_system(grid, b, &extra, dt).solve(&rhs)?,
            _ => {
                let m = dense_system(grid, b, &extra, dt);
                let chol = m.cholesky().ok_or_else(|| {
                    FdeError::Solver("implicit step matrix lost positive definiteness".into())
                })?;
                chol.solve(&nalgebra::DVector::from_column_slice(&rhs))
                    .iter()
                    .copied()
                    .collect()
            }
        };
        // δ = D⁻¹η, entrywise d_inv·η; clamping applies to iterates only —
        // the accepted output has passed the residual test above unclamped.
        for i in 0..what.len() {
            what[i] = (what[i] + d_inv[i] * eta[i]).max(0.0);
        }
    }
    Err(FdeError::Solver(format!(
        "implicit step did not converge in {NEWTON_MAX_ITERS} Newton iterations (dt = {dt:.3e})"
    )))
}

fn interior_w(u: &GridFunction<f64>, p: f64) -> Vec<f64> {
    u.interior_values().iter().map(|&v| v.powf(p)).collect()
}

fn from_interior_w(
    grid: &Arc<Grid<f64>>,
    w: &[f64],
    p: f64,
) -> Result<GridFunction<f64>, FdeError> {
    let u: Vec<f64> = w.iter().map(|&wi| wi.powf(1.0 / p)).collect();
    GridFunction::from_interior(grid, &u)
}

fn check_state(u: &GridFunction<f64>, p: f64, what: &str) -> Result<(), FdeError> {
    if !(p > 1.0) {
        return Err(FdeError::Parameter(format!("p must exceed 1, got {p}")));
    }
    if !u.is_dirichlet() {
        return Err(FdeError::Contract(format!("{what} must carry the Dirichlet tag")));
    }
    if u.values().iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(FdeError::Contract(format!(
            "{what} must be nonnegative and finite at every node"
        )));
    }
    Ok(())
}

/// One backward-Euler step of the base flow ∂ₜuᵖ = Δu + bu.
pub fn step_base(
    u: &GridFunction<f64>,
    dt: f64,
    p: f64,
    b: f64,
) -> Result<GridFunction<f64>, FdeError> {
    check_state(u, p, "step input")?;
    let w = interior_w(u, p);
    let w_next = be_step_w(u.grid(), p, b, 0.0, &w, dt)?;
    from_interior_w(u.grid(), &w_next, p)
}

/// One backward-Euler step of the rescaled flow ∂ₜvᵖ = Δv + bv + vᵖ,
/// source treated implicitly.
pub fn step_rescaled(
    v: &GridFunction<f64>,
    dt: f64,
    p: f64,
    b: f64,
) -> Result<GridFunction<f64>, FdeError> {
    check_state(v, p, "step input")?;
    let w = interior_w(v, p);
    let w_next = be_step_w(v.grid(), p, b, 1.0, &w, dt)?;
    from_interior_w(v.grid(), &w_next, p)
}

// ---------------------------------------------------------------------------
// Evolve drivers.
// ---------------------------------------------------------------------------

/// Lazy snapshot target times. Uniform cadence by default; geometric in
/// (T̂ − t) when the policy carries a hint and asks for it.
enum Targets {
    Uniform { interval: f64, k: usize },
    List { items: Vec<f64>, idx: usize },
}

impl Targets {
    fn new(policy: &DtPolicy) -> Targets {
        match (policy.geometric_snapshots, policy.tstar_hint) {
            (true, Some(ts)) => {
                // T̂ − t_k shrinks by 0.9 per record down to the dt scale.
                let mut items = Vec::new();
                let mut gap = ts;
                loop {
                    gap *= 0.9;
                    if gap < 50.0 * policy.dt {
                        break;
                    }
                    items.push(ts - gap);
                }
                Targets::List { items, idx: 0 }
            }
            _ => Targets::Uniform {
                interval: policy.snapshot_interval,
                k: 0,
            },
        }
    }

    fn peek(&self) -> Option<f64> {
        match self {
            Targets::Uniform { interval, k } => Some((*k + 1) as f64 * interval),
            Targets::List { items, idx } => items.get(*idx).copied(),
        }
    }

    fn advance(&mut self) {
        match self {
            Targets::Uniform { k, .. } => *k += 1,
            Targets::List { idx, .. } => *idx += 1,
        }
    }
}

#[cfg(test)]
fn snapshot_targets(policy: &DtPolicy, limit: usize) -> Vec<f64> {
    let mut targets = Targets::new(policy);
    let mut out = Vec::new();
    while let Some(t) = targets.peek() {
        out.push(t);
        targets.advance();
        if out.len() >= limit {
            break;
        }
    }
    out
}

struct Driver {
    frame: Frame,
    p: f64,
    b: f64,
    sigma: f64,
    policy: DtPolicy,
    floor: f64,
    t_end: Option<f64>,
}

impl Driver {
    /// March from `u0`, recording snapshots at the policy cadence plus the
    /// initial and final states. A step that fails Newton is retried with a
    /// halved dt up to `MAX_DT_HALVINGS` times; exhaustion aborts the run
    /// with the partial trajectory preserved.
    fn run(&self, u0: &GridFunction<f64>) -> Result<EvolveResult, FdeError> {
        let grid = u0.grid().clone();
        let mut times = vec![0.0];
        let mut snapshots = vec![u0.clone()];
        let mut w = interior_w(u0, self.p);
        let mut t = 0.0;
        let mut steps_accepted = 0usize;
        let mut dt_halvings = 0usize;
        let mut failure = None;

        let mut targets = Targets::new(&self.policy);

        // Hard end of the run: t_end, and with an extinction hint also
        // T̂ − dt (past it the policy step (T̂−t)/100 underflows the run's
        // resolution).
        let hint_stop = self.policy.tstar_hint.map(|ts| ts - self.policy.dt);
        let run_end = match (self.t_end, hint_stop) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (None, None) => None,
        };

        let below_floor = |w: &[f64]| -> bool {
            let umax = w.iter().fold(0.0f64, |m, &x| m.max(x)).powf(1.0 / self.p);
            umax < self.floor
        };

        'outer: loop {
            if self.frame == Frame::Base && below_floor(&w) {
                break;
            }
            if let Some(re) = run_end {
                if t >= re - 1e-14 * re.abs().max(1.0) {
                    break;
                }
            }

            // Skip targets at or behind the clock, then march exactly onto
            // the next one (clipped by the run end).
            while let Some(tt) = targets.peek() {
                if tt <= t * (1.0 + 1e-14) {
                    targets.advance();
                } else {
                    break;
                }
            }
            let next_target = targets.peek();
            let mut slice_is_target = false;
            let slice_end = match (next_target, run_end) {
                (Some(tt), Some(re)) => {
                    if tt <= re {
                        slice_is_target = true;
                        tt
                    } else {
                        re
                    }
                }
                (Some(tt), None) => {
                    slice_is_target = true;
                    tt
                }
                (None, Some(re)) => re,
                // Geometric targets exhausted and no end: march in dt-scale
                // chunks until the floor stops the run.
                (None, None) => t + self.policy.snapshot_interval,
            };

            let mut dt_want = self.policy.dt;
            if let Some(ts) = self.policy.tstar_hint {
                dt_want = dt_want.min(((ts - t) / 100.0).max(self.policy.dt * 1e-6));
            }
            let remaining = slice_end - t;
            let substeps = (remaining / dt_want - 1e-9).ceil().max(1.0) as usize;
            let dt_slice = remaining / substeps as f64;

            let mut reached_slice_end = true;
            for k in 0..substeps {
                let mut dt_try = dt_slice;
                let mut halved = 0usize;
                let w_next = loop {
                    match be_step_w(&grid, self.p, self.b, self.sigma, &w, dt_try) {
                        Ok(next) => break Some(next),
                        Err(_) if halved < MAX_DT_HALVINGS => {
                            dt_try *= 0.5;
                            halved += 1;
                            dt_halvings += 1;
                        }
                        Err(e) => {
                            failure = Some(format!(
                                "step at t = {t:.6e} rejected after {MAX_DT_HALVINGS} dt-halvings: {e}"
                            ));
                            break None;
                        }
                    }
                };
                let Some(next) = w_next else { break 'outer };
                w = next;
                steps_accepted += 1;
                t += dt_try;
                if halved == 0 && k == substeps - 1 {
                    t = slice_end; // absorb roundoff so targets are exact
                } else if halved > 0 {
                    // A shortened step knocked the march off the slice grid.
                    reached_slice_end = false;
                    break;
                }
                if self.frame == Frame::Base && below_floor(&w) {
                    reached_slice_end = k == substeps - 1;
                    break;
                }
            }

            // Record if we landed on a snapshot target.
            if reached_slice_end && slice_is_target {
                targets.advance();
                times.push(t);
                snapshots.push(from_interior_w(&grid, &w, self.p)?);
            }
        }

        // Final state, if not already recorded.
        if (t - times[times.len() - 1]).abs() > 1e-14 * t.max(1.0) {
            times.push(t);
            snapshots.push(from_interior_w(&grid, &w, self.p)?);
        }

        let trajectory = Trajectory {
            frame: self.frame,
            p: self.p,
            b: self.b,
            times,
            snapshots,
            dt_policy: self.policy.clone(),
        };
        trajectory.validate()?;
        Ok(EvolveResult {
            trajectory,
            failure,
            steps_accepted,
            dt_halvings,
        })
    }
}

/// Evolve the base flow from `u0` until the max-norm falls below the
/// extinction floor (`EXTINCTION_FLOOR_FRACTION`·initial max) or `stop.t_end`.
pub fn evolve_base(
    u0: &GridFunction<f64>,
    p: f64,
    b: f64,
    policy: &DtPolicy,
    stop: StopRule,
) -> Result<EvolveResult, FdeError> {
    check_state(u0, p, "initial data")?;
    policy.validate()?;
    let u0_max = u0.max_value();
    if u0_max == 0.0 {
        // Extinct from the start: the trajectory is the single initial state.
        let trajectory = Trajectory {
            frame: Frame::Base,
            p,
            b,
            times: vec![0.0],
            snapshots: vec![u0.clone()],
            dt_policy: policy.clone(),
        };
        return Ok(EvolveResult {
            trajectory,
            failure: None,
            steps_accepted: 0,
            dt_halvings: 0,
        });
    }
    let driver = Driver {
        frame: Frame::Base,
        p,
        b,
        sigma: 0.0,
        policy: policy.clone(),
        floor: EXTINCTION_FLOOR_FRACTION * u0_max,
        t_end: stop.t_end,
    };
    driver.run(u0)
}

/// Evolve the rescaled flow from `v0` up to rescaled time `t_end`.
pub fn evolve_rescaled(
    v0: &GridFunction<f64>,
    p: f64,
    b: f64,
    policy: &DtPolicy,
    t_end: f64,
) -> Result<EvolveResult, FdeError> {
    check_state(v0, p, "initial data")?;
    policy.validate()?;
    if !(t_end > 0.0) {
        return Err(FdeError::Parameter(format!(
            "rescaled end time must be positive, got {t_end}"
        )));
    }
    let driver = Driver {
        frame: Frame::Rescaled,
        p,
        b,
        sigma: 1.0,
        policy: policy.clone(),
        floor: 0.0,
        t_end: Some(t_end),
    };
    driver.run(v0)
}

// ---------------------------------------------------------------------------
// Extinction-time estimation.
// ---------------------------------------------------------------------------

/// Extinction-time estimate from the max-norm decay law
/// ‖u(t)‖∞^{p−1} ∝ (T* − t).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtinctionEstimate {
    pub tstar: f64,
    /// Fit window [t_a, t_b] in trajectory time.
    pub window: (f64, f64),
    pub r2: f64,
    pub method: String,
}

/// Fit ‖u‖∞^{p−1} against t by least squares over the final quarter of the
/// usable snapshots (those with max-norm ≥ 10× the extinction floor) and
/// report the root of the fitted line.
///
/// One refinement on top of the plain recipe: the implicit scheme leaves an
/// exponential tail just before the root — once the amplitude drops below
/// the dt scale, the discrete solution decays geometrically per step instead
/// of following the algebraic law. Snapshots in that zone (fitted value
/// below 10·|slope|·dt, i.e. within ~10 steps of the provisional root) are
/// discarded and the line refitted, otherwise they bias the root and can
/// even push it inside the fit window.
pub fn estimate_extinction_time(traj: &Trajectory) -> Result<ExtinctionEstimate, FdeError> {
    if traj.frame != Frame::Base {
        return Err(FdeError::Contract(
            "extinction-time estimation applies to base-frame trajectories".into(),
        ));
    }
    let series = traj.max_norm_series();
    let initial_max = series[0].1;
    if initial_max == 0.0 || series.iter().all(|&(_, m)| m == 0.0) {
        return Ok(ExtinctionEstimate {
            tstar: 0.0,
            window: (0.0, 0.0),
            r2: 1.0,
            method: "identically_zero".into(),
        });
    }
    let floor = EXTINCTION_FLOOR_FRACTION * initial_max;
    let final_max = series[series.len() - 1].1;
    if final_max >= 10.0 * floor {
        return Err(FdeError::Estimation(format!(
            "trajectory never falls below 10× the extinction floor \
             (final max {final_max:.3e} vs floor {floor:.3e}); run it further"
        )));
    }
    let usable: Vec<(f64, f64)> = series
        .iter()
        .filter(|&&(_, m)| m >= 10.0 * floor)
        .map(|&(t, m)| (t, m.powf(traj.p - 1.0)))
        .collect();
    if usable.len() < 8 {
        return Err(FdeError::Estimation(format!(
            "only {} usable snapshots above 10× the extinction floor; need 8",
            usable.len()
        )));
    }
    let window_len = (usable.len() + 3) / 4;
    let window_len = window_len.max(8).min(usable.len());
    let mut window = usable[usable.len() - window_len..].to_vec();
    let provisional = fit::ols(&window)?;
    if !(provisional.slope < 0.0) {
        return Err(FdeError::Estimation(format!(
            "max-norm power is not decaying over the fit window (slope {})",
            provisional.slope
        )));
    }
    let tail_cutoff = 10.0 * (-provisional.slope) * traj.dt_policy.dt;
    while window.len() > 2 && window[window.len() - 1].1 < tail_cutoff {
        window.pop();
    }
    if window.len() < 8 {
        return Err(FdeError::Estimation(format!(
            "only {} fit points clear of the implicit extinction tail; need 8",
            window.len()
        )));
    }
    let line = fit::ols(&window)?;
    if !(line.slope < 0.0) {
        return Err(FdeError::Estimation(format!(
            "max-norm power is not decaying over the fit window (slope {})",
            line.slope
        )));
    }
    let tstar = -line.intercept / line.slope;
    let (t_a, t_b) = (window[0].0, window[window.len() - 1].0);
    if !(tstar > t_b) {
        return Err(FdeError::Estimation(format!(
            "estimated extinction time {tstar} does not exceed the fit window end {t_b}"
        )));
    }
    Ok(ExtinctionEstimate {
        tstar,
        window: (t_a, t_b),
        r2: line.r2,
        method: "max_norm_power_fit".into(),
    })
}

// ---------------------------------------------------------------------------
// Frame transforms.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformDirection {
    ToRescaled,
    ToBase,
}

/// Rescaled time of base time τ: t = (p/(p−1))·ln(T*/(T*−τ)).
pub fn time_to_rescaled(p: f64, tstar: f64, tau: f64) -> Result<f64, FdeError> {
    if tau >= tstar {
        return Err(FdeError::Parameter(format!(
            "base time {tau} is not below the extinction time {tstar}"
        )));
    }
    Ok(p / (p - 1.0) * (tstar / (tstar - tau)).ln())
}

/// Base time of rescaled time t: τ = T*·(1 − e^{−((p−1)/p)·t}).
pub fn time_to_base(p: f64, tstar: f64, t: f64) -> f64 {
    tstar * (1.0 - (-(p - 1.0) / p * t).exp())
}

/// Value prefactor of the rescaling at base time τ:
/// v = [p/((p−1)(T*−τ))]^{1/(p−1)}·u.
pub fn rescale_factor(p: f64, tstar: f64, tau: f64) -> Result<f64, FdeError> {
    if tau >= tstar {
        return Err(FdeError::Parameter(format!(
            "base time {tau} is not below the extinction time {tstar}"
        )));
    }
    Ok((p / ((p - 1.0) * (tstar - tau))).powf(1.0 / (p - 1.0)))
}

/// Apply the exact change of variables between frames to every snapshot.
/// `to_rescaled` requires a base trajectory whose times stay below `tstar`.
pub fn frame_transform(
    traj: &Trajectory,
    tstar: f64,
    direction: TransformDirection,
) -> Result<Trajectory, FdeError> {
    if !(tstar > 0.0) || !tstar.is_finite() {
        return Err(FdeError::Parameter(format!(
            "extinction time must be positive and finite, got {tstar}"
        )));
    }
    let p = traj.p;
    match direction {
        TransformDirection::ToRescaled => {
            if traj.frame != Frame::Base {
                return Err(FdeError::Contract(
                    "to_rescaled expects a base-frame trajectory".into(),
                ));
            }
            let mut times = Vec::with_capacity(traj.len());
            let mut snapshots = Vec::with_capacity(traj.len());
            for (tau, u) in traj.times.iter().zip(traj.snapshots.iter()) {
                let t = time_to_rescaled(p, tstar, *tau)?;
                let factor = rescale_factor(p, tstar, *tau)?;
                times.push(t);
                snapshots.push(u.scale(factor));
            }
            let out = Trajectory {
                frame: Frame::Rescaled,
                p,
                b: traj.b,
                times,
                snapshots,
                dt_policy: traj.dt_policy.clone(),
            };
            out.validate()?;
            Ok(out)
        }
        TransformDirection::ToBase => {
            if traj.frame != Frame::Rescaled {
                return Err(FdeError::Contract(
                    "to_base expects a rescaled-frame trajectory".into(),
                ));
            }
            let mut times = Vec::with_capacity(traj.len());
            let mut snapshots = Vec::with_capacity(traj.len());
            for (t, v) in traj.times.iter().zip(traj.snapshots.iter()) {
                let tau = time_to_base(p, tstar, *t);
                let factor = rescale_factor(p, tstar, tau)?;
                times.push(tau);
                snapshots.push(v.scale(factor.recip()));
            }
            let out = Trajectory {
                frame: Frame::Base,
                p,
                b: traj.b,
                times,
                snapshots,
                dt_policy: traj.dt_policy.clone(),
            };
            out.validate()?;
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// Closed-form reference trajectories.
// ---------------------------------------------------------------------------

/// Separable amplitude c(τ) of data a·S: c(τ) = a·(1 − τ/T*)^{1/(p−1)} with
/// T* = p·a^{p−1}/(p−1); zero past extinction.
pub fn separable_amplitude(p: f64, a: f64, tau: f64) -> f64 {
    let tstar = crate::steady::separable_extinction_time(p, a);
    if tau >= tstar {
        0.0
    } else {
        a * (1.0 - tau / tstar).powf(1.0 / (p - 1.0))
    }
}

/// Exact separable trajectory c(τ)·S at the given times — a closed-form
/// fixture for transform and diagnostic tests (no solver involved).
pub fn separable_trajectory(steady: &SteadyState, a: f64, times: &[f64]) -> Trajectory {
    let snapshots = times
        .iter()
        .map(|&tau| steady.s.scale(separable_amplitude(steady.p, a, tau)))
        .collect();
    Trajectory {
        frame: Frame::Base,
        p: steady.p,
        b: steady.b,
        times: times.to_vec(),
        snapshots,
        dt_policy: DtPolicy::uniform(1e-3, 1e-2),
    }
}
