//! Stationary profiles and spectral barriers: the positive steady state S of
//!
//!   −Δ_h S − bS = Sᵖ,   S = 0 on ∂Ω,   S > 0 inside,
//!
//! Dirichlet and distance-weighted eigenpairs, the exact separable solution
//! built on S, and an initial-data factory producing fields comparable to
//! the boundary distance.
//!
//! The 1D solver shoots with classical RK4 on a refined auxiliary mesh and
//! bisects on the initial slope; the 2D solver runs damped Newton from a
//! scaled first eigenfunction. Both finish with a Newton polish on the
//! discrete operator so the *discrete* residual reaches the declared
//! tolerances — trajectories started at S then sit still to solver noise,
//! and the curvature ratio at S equals 1 to the relative tolerance.

use std::sync::Arc;

use crate::domain::{distance_field, Grid, GridFunction};
use crate::error::FdeError;
use crate::linalg::{apply_neg_lap, dense_solve, dense_system, tridiag_system};
use crate::tolerances::{
    EIGEN_MAX_ITERS, EIGEN_TOL, NEWTON_MAX_DAMPINGS, SHOOTING_AUX_REFINEMENT, SHOOTING_BRACKET,
    SHOOTING_SLOPE_TOL, STEADY_TOL_REL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteadyMethod {
    Shooting,
    Newton,
}

/// Positive discrete solution of −Δ_h S − bS = Sᵖ with residual provenance.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub s: GridFunction<f64>,
    pub p: f64,
    pub b: f64,
    /// ‖−Δ_h S − bS − Sᵖ‖∞ over interior nodes; reported for inspection.
    /// Its floor is the `eps·‖S‖∞/h²` rounding noise of the operator, so no
    /// fixed threshold is enforced on it.
    pub residual_norm: f64,
    /// ‖(−Δ_h S − bS − Sᵖ)/Sᵖ‖∞ over interior nodes; equals the deviation
    /// of the curvature ratio from 1 at S. Guaranteed ≤ `STEADY_TOL_REL`.
    pub residual_rel: f64,
    pub method: SteadyMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenWeight {
    Unweighted,
    /// Generalized problem (−Δ_h − b)ψ = λ d^{p−1} ψ.
    DistanceWeighted,
}

/// First eigenpair, normalized to ∫ψ² = 1, nonnegative sign convention.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    pub psi: GridFunction<f64>,
    pub weight: EigenWeight,
    /// ‖(−Δ_h − b)ψ − λ w ψ‖∞ over interior nodes.
    pub residual_norm: f64,
}

/// Odd power |s|^{p−1}·s; keeps the nonlinearity defined for transient
/// negative iterates during shooting and Newton.
fn odd_pow(s: f64, p: f64) -> f64 {
    s.abs().powf(p - 1.0) * s
}

fn steady_residual(grid: &Arc<Grid<f64>>, p: f64, b: f64, s_int: &[f64]) -> Vec<f64> {
    let mut r = apply_neg_lap(grid, b, s_int);
    for (ri, &si) in r.iter_mut().zip(s_int.iter()) {
        *ri -= odd_pow(si, p);
    }
    r
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Damped Newton on the interior residual, driving the Sᵖ-relative residual
/// below `STEADY_TOL_REL`.
///
/// The stopping norm is pointwise-relative because the profile spans several
/// orders of magnitude between the boundary layer and the bulk: a fixed
/// absolute tolerance is either meaningless near the boundary or sits below
/// the `eps·‖S‖∞/h²` rounding floor of the discrete operator in the bulk.
/// The absolute norm is still recorded on the result for inspection.
fn polish(
    grid: &Arc<Grid<f64>>,
    p: f64,
    b: f64,
    mut s: Vec<f64>,
    method: &str,
) -> Result<Vec<f64>, FdeError> {
    let rel_norm = |s_int: &[f64], r: &[f64]| -> f64 {
        r.iter()
            .zip(s_int.iter())
            .map(|(ri, &si)| ri.abs() / si.abs().powf(p).max(f64::MIN_POSITIVE))
            .fold(0.0f64, f64::max)
    };
    let mut r = steady_residual(grid, p, b, &s);
    for _ in 0..60 {
        if rel_norm(&s, &r) <= STEADY_TOL_REL {
            return Ok(s);
        }
        // J = −Δ_h − b − p·|S|^{p−1}; indefinite, so use LU with pivoting.
        let jac_diag: Vec<f64> = s.iter().map(|&si| -p * si.abs().powf(p - 1.0)).collect();
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        let m = match grid.dimension() {
            1 => dense_1d(grid, b, &jac_diag),
            _ => dense_system(grid, b, &jac_diag, 1.0),
        };
        let delta = dense_solve(m, &rhs)?;
        let r0 = max_abs(&r);
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..=NEWTON_MAX_DAMPINGS {
            let cand: Vec<f64> = s.iter().zip(delta.iter()).map(|(&si, &di)| si + step * di).collect();
            let rc = steady_residual(grid, p, b, &cand);
            if max_abs(&rc) < r0 {
                s = cand;
                r = rc;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(FdeError::Solver(format!(
                "{method} polish stagnated at residual {r0:.3e}"
            )));
        }
    }
    let r = steady_residual(grid, p, b, &s);
    if rel_norm(&s, &r) <= STEADY_TOL_REL {
        Ok(s)
    } else {
        Err(FdeError::Solver(format!(
            "{method} polish did not reach tolerance: abs {:.3e}, rel {:.3e}",
            max_abs(&r),
            rel_norm(&s, &r)
        )))
    }
}

fn dense_1d(grid: &Arc<Grid<f64>>, b: f64, extra: &[f64]) -> nalgebra::DMatrix<f64> {
    let n = extra.len();
    let h2 = grid.spacing(0) * grid.spacing(0);
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = extra[i] + 2.0 / h2 - b;
        if i > 0 {
            m[(i, i - 1)] = -1.0 / h2;
        }
        if i + 1 < n {
            m[(i, i + 1)] = -1.0 / h2;
        }
    }
    m
}

fn build_steady(
    grid: &Arc<Grid<f64>>,
    p: f64,
    b: f64,
    s_int: Vec<f64>,
    method: SteadyMethod,
) -> Result<SteadyState, FdeError> {
    if s_int.iter().any(|&v| v <= 0.0) {
        return Err(FdeError::Solver(
            "steady solution lost interior positivity".into(),
        ));
    }
    let r = steady_residual(grid, p, b, &s_int);
    let residual_norm = max_abs(&r);
    let residual_rel = r
        .iter()
        .zip(s_int.iter())
        .map(|(ri, &si)| ri.abs() / si.powf(p))
        .fold(0.0f64, f64::max);
    let s = GridFunction::from_interior(grid, &s_int)?;
    Ok(SteadyState {
        s,
        p,
        b,
        residual_norm,
        residual_rel,
        method,
    })
}

fn check_parameters(grid: &Arc<Grid<f64>>, p: f64, b: f64) -> Result<(), FdeError> {
    if !(p > 1.0) {
        return Err(FdeError::Parameter(format!("p must exceed 1, got {p}")));
    }
    let lambda1 = first_eigenpair(grid)?.lambda;
    if b >= lambda1 {
        return Err(FdeError::Parameter(format!(
            "b = {b} must stay below the first Dirichlet eigenvalue {lambda1:.6}"
        )));
    }
    Ok(())
}

/// One classical RK4 step for S'' = −|S|^{p−1}S − bS.
fn rk4_step(s: f64, v: f64, h: f64, p: f64, b: f64) -> (f64, f64) {
    let acc = |s: f64| -odd_pow(s, p) - b * s;
    let (k1s, k1v) = (v, acc(s));
    let (k2s, k2v) = (v + 0.5 * h * k1v, acc(s + 0.5 * h * k1s));
    let (k3s, k3v) = (v + 0.5 * h * k2v, acc(s + 0.5 * h * k2s));
    let (k4s, k4v) = (v + h * k3v, acc(s + h * k3s));
    (
        s + h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s),
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

/// Integrates from the left endpoint with S = 0, S' = m across the auxiliary
/// mesh. Returns the profile at auxiliary nodes and the first zero-crossing
/// position (None when S stays positive through the right endpoint).
struct ShotProfile {
    values: Vec<f64>,
    slopes: Vec<f64>,
    first_zero: Option<f64>,
}

fn shoot(grid: &Arc<Grid<f64>>, p: f64, b: f64, m: f64, refinement: usize) -> ShotProfile {
    let [lo, hi] = grid.extent(0);
    let aux_n = (grid.nodes_per_axis(0) - 1) * refinement;
    let h = (hi - lo) / aux_n as f64;
    let mut values = Vec::with_capacity(aux_n + 1);
    let mut slopes = Vec::with_capacity(aux_n + 1);
    let (mut s, mut v) = (0.0, m);
    values.push(s);
    slopes.push(v);
    let mut first_zero = None;
    for k in 0..aux_n {
        let (sn, vn) = rk4_step(s, v, h, p, b);
        if first_zero.is_none() && k > 0 && sn <= 0.0 && s > 0.0 {
            // Linear interpolation of the crossing inside the step.
            let frac = s / (s - sn);
            first_zero = Some(lo + (k as f64 + frac) * h);
        }
        s = sn;
        v = vn;
        values.push(s);
        slopes.push(v);
    }
    if first_zero.is_none() && s <= 0.0 {
        first_zero = Some(hi);
    }
    ShotProfile {
        values,
        slopes,
        first_zero,
    }
}

/// Shooting solver for the 1D steady problem. Bisects the initial slope
/// until the first zero of the shot profile lands on the right endpoint,
/// samples the auxiliary profile onto the grid, then polishes against the
/// discrete operator.
pub fn solve_steady_1d(grid: &Arc<Grid<f64>>, p: f64, b: f64) -> Result<SteadyState, FdeError> {
    if grid.dimension() != 1 {
        return Err(FdeError::Contract("solve_steady_1d requires a 1D grid".into()));
    }
    check_parameters(grid, p, b)?;
    let refinement = SHOOTING_AUX_REFINEMENT;
    let m_star = converge_slope(grid, p, b, refinement)?;
    let profile = shoot(grid, p, b, m_star, refinement);

    // Sample auxiliary nodes that coincide with grid nodes.
    let s_int: Vec<f64> = (1..grid.nodes_per_axis(0) - 1)
        .map(|i| profile.values[i * refinement].max(0.0))
        .collect();
    let s_int = polish(grid, p, b, s_int, "shooting")?;
    build_steady(grid, p, b, s_int, SteadyMethod::Shooting)
}

/// Raw shot at the converged slope, exposed for conservation-law tests:
/// ½S'² + |S|^{p+1}/(p+1) + bS²/2 is constant along the profile when the
/// equation is autonomous.
pub fn shooting_profile(
    grid: &Arc<Grid<f64>>,
    p: f64,
    b: f64,
    refinement: usize,
) -> Result<(Vec<f64>, Vec<f64>, f64), FdeError> {
    check_parameters(grid, p, b)?;
    let m_star = converge_slope(grid, p, b, refinement)?;
    let profile = shoot(grid, p, b, m_star, refinement);
    Ok((profile.values, profile.slopes, m_star))
}

/// Bisect the initial slope m = S'(left endpoint) until the first zero of
/// the shot profile lands on the right endpoint. X(m) decreases in m, so
/// the invariant is X(m_lo) > L (or no crossing) and X(m_hi) < L. The
/// default bracket is widened geometrically when it does not straddle:
/// near p = 1 the amplitude grows like a power of 1/(p−1) and the wall
/// slope can exceed any fixed ceiling.
fn converge_slope(grid: &Arc<Grid<f64>>, p: f64, b: f64, refinement: usize) -> Result<f64, FdeError> {
    let [lo, hi] = grid.extent(0);
    let length = hi - lo;
    let (mut m_lo, mut m_hi) = SHOOTING_BRACKET;
    let crosses_short = |m: f64| -> bool {
        match shoot(grid, p, b, m, refinement).first_zero {
            Some(x) => x - lo < length,
            None => false,
        }
    };
    while crosses_short(m_lo) && m_lo > 1e-12 {
        m_lo /= 10.0;
    }
    if crosses_short(m_lo) {
        return Err(FdeError::Solver(format!(
            "shooting bracket not found: slope {m_lo:.1e} already crosses inside the domain \
             (p = {p}, b = {b}, length = {length})"
        )));
    }
    while !crosses_short(m_hi) && m_hi < 1e12 {
        m_hi *= 10.0;
    }
    if !crosses_short(m_hi) {
        return Err(FdeError::Solver(format!(
            "shooting bracket not found: slope {m_hi:.1e} does not cross inside the domain \
             (p = {p}, b = {b}, length = {length})"
        )));
    }
    while (m_hi - m_lo) > SHOOTING_SLOPE_TOL * m_hi {
        let mid = 0.5 * (m_lo + m_hi);
        if crosses_short(mid) {
            m_hi = mid;
        } else {
            m_lo = mid;
        }
    }
    Ok(0.5 * (m_lo + m_hi))
}

/// Damped Newton for the 2D steady problem, initialized from the first
/// eigenfunction scaled so its single-mode projection solves the equation.
pub fn solve_steady_2d(grid: &Arc<Grid<f64>>, p: f64, b: f64) -> Result<SteadyState, FdeError> {
    if grid.dimension() != 2 {
        return Err(FdeError::Contract("solve_steady_2d requires a 2D grid".into()));
    }
    check_parameters(grid, p, b)?;
    let eig = first_eigenpair(grid)?;
    let psi = &eig.psi;
    // c^{p−1}·∫ψ^{p+1} = (λ₁ − b)·∫ψ² matches the leading mode of both sides.
    let psi_sq = crate::domain::integrate(&psi.map(|v| v * v), None)?;
    let psi_p1 = crate::domain::integrate(&psi.map(|v| v.abs().powf(p + 1.0)), None)?;
    let c = ((eig.lambda - b) * psi_sq / psi_p1).powf(1.0 / (p - 1.0));
    let init: Vec<f64> = psi.interior_values().iter().map(|&v| c * v.max(0.0)).collect();
    let s_int = polish(grid, p, b, init, "newton")?;
    build_steady(grid, p, b, s_int, SteadyMethod::Newton)
}

/// Inverse power iteration for the first Dirichlet eigenpair of −Δ_h,
/// normalized to ∫ψ² = 1 with ψ ≥ 0.
pub fn first_eigenpair(grid: &Arc<Grid<f64>>) -> Result<EigenPair, FdeError> {
    eigen_iteration(grid, 0.0, None)
}

/// Inverse power iteration for (−Δ_h − b)ψ = λ d^{p−1} ψ on interior nodes.
pub fn weighted_eigenpair(grid: &Arc<Grid<f64>>, p: f64, b: f64) -> Result<EigenPair, FdeError> {
    if !(p > 1.0) {
        return Err(FdeError::Parameter(format!("p must exceed 1, got {p}")));
    }
    let lambda1 = first_eigenpair(grid)?.lambda;
    if b >= lambda1 {
        return Err(FdeError::Parameter(format!(
            "b = {b} must stay below the first Dirichlet eigenvalue {lambda1:.6}"
        )));
    }
    let d = distance_field(grid);
    let w: Vec<f64> = grid
        .interior_indices()
        .map(|i| d.values()[i].powf(p - 1.0))
        .collect();
    eigen_iteration(grid, b, Some(w))
}

/// Generalized inverse iteration A ψ_{k+1} ∝ W ψ_k with Rayleigh-quotient
/// stopping; W = identity recovers the plain problem.
fn eigen_iteration(
    grid: &Arc<Grid<f64>>,
    b: f64,
    weight: Option<Vec<f64>>,
) -> Result<EigenPair, FdeError> {
    let n = grid.interior_count();
    if n == 0 {
        return Err(FdeError::Contract("grid has no interior nodes".into()));
    }
    let apply_w = |v: &[f64]| -> Vec<f64> {
        match &weight {
            Some(w) => v.iter().zip(w.iter()).map(|(&x, &wi)| wi * x).collect(),
            None => v.to_vec(),
        }
    };
    // Positive start with full overlap on the ground mode.
    let d = distance_field(grid);
    let mut psi: Vec<f64> = grid.interior_indices().map(|i| d.values()[i]).collect();
    let norm = max_abs(&psi);
    psi.iter_mut().for_each(|x| *x /= norm);

    let solve_a: Box<dyn Fn(&[f64]) -> Result<Vec<f64>, FdeError>> = match grid.dimension() {
        1 => {
            let zeros = vec![0.0; n];
            let sys = tridiag_system(grid, b, &zeros, 1.0);
            Box::new(move |rhs: &[f64]| sys.solve(rhs))
        }
        _ => {
            let zeros = vec![0.0; n];
            let m = dense_system(grid, b, &zeros, 1.0);
            let chol = m
                .cholesky()
                .ok_or_else(|| FdeError::Solver("elliptic operator not positive definite".into()))?;
            Box::new(move |rhs: &[f64]| {
                let x = chol.solve(&nalgebra::DVector::from_column_slice(rhs));
                Ok(x.iter().copied().collect())
            })
        }
    };

    let mut lambda_prev = f64::INFINITY;
    let mut lambda = 0.0;
    let mut converged = false;
    for _ in 0..EIGEN_MAX_ITERS {
        let z = solve_a(&apply_w(&psi))?;
        let nz = max_abs(&z);
        if nz == 0.0 {
            return Err(FdeError::Solver("eigen iteration collapsed to zero".into()));
        }
        psi = z.iter().map(|&x| x / nz).collect();
        // Rayleigh quotient ⟨ψ, Aψ⟩ / ⟨ψ, Wψ⟩.
        let apsi = apply_neg_lap(grid, b, &psi);
        let wpsi = apply_w(&psi);
        let num: f64 = psi.iter().zip(apsi.iter()).map(|(&a, &c)| a * c).sum();
        let den: f64 = psi.iter().zip(wpsi.iter()).map(|(&a, &c)| a * c).sum();
        lambda = num / den;
        if (lambda - lambda_prev).abs() <= EIGEN_TOL * lambda.abs().max(1.0) {
            converged = true;
            break;
        }
        lambda_prev = lambda;
    }
    if !converged {
        return Err(FdeError::Solver(format!(
            "eigen iteration did not converge; last increment {:.3e}",
            (lambda - lambda_prev).abs()
        )));
    }

    // Nonnegative sign convention, then quadrature normalization ∫ψ² = 1.
    let total: f64 = psi.iter().sum();
    if total < 0.0 {
        psi.iter_mut().for_each(|x| *x = -*x);
    }
    let f = GridFunction::from_interior(grid, &psi)?;
    let mass = crate::domain::integrate(&f.map(|v| v * v), None)?;
    let scale = mass.sqrt().recip();
    let psi_scaled: Vec<f64> = psi.iter().map(|&x| x * scale).collect();
    let apsi = apply_neg_lap(grid, b, &psi_scaled);
    let wpsi = apply_w(&psi_scaled);
    let residual_norm = apsi
        .iter()
        .zip(wpsi.iter())
        .map(|(&a, &w)| (a - lambda * w).abs())
        .fold(0.0f64, f64::max);
    let psi_fn = GridFunction::from_interior(grid, &psi_scaled)?;
    if psi_fn.values().iter().any(|&v| v < 0.0) {
        return Err(FdeError::Solver(
            "first eigenfunction came out with a sign change".into(),
        ));
    }
    Ok(EigenPair {
        lambda,
        psi: psi_fn,
        weight: if weight.is_some() {
            EigenWeight::DistanceWeighted
        } else {
            EigenWeight::Unweighted
        },
        residual_norm,
    })
}

/// Closed-form separable solution u(·,t) = [(p−1)(T*−t)/p]^{1/(p−1)} S.
pub fn separable_solution(
    steady: &SteadyState,
    tstar: f64,
    t: f64,
) -> Result<GridFunction<f64>, FdeError> {
    if t > tstar {
        return Err(FdeError::Parameter(format!(
            "time {t} exceeds the extinction time {tstar}"
        )));
    }
    let p = steady.p;
    let factor = ((p - 1.0) * (tstar - t) / p).powf(1.0 / (p - 1.0));
    Ok(steady.s.scale(factor))
}

/// Extinction time of separable data a·S: T* = p·a^{p−1}/(p−1).
pub fn separable_extinction_time(p: f64, a: f64) -> f64 {
    p * a.powf(p - 1.0) / (p - 1.0)
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDataKind {
    /// a·S, staying on the separable ray.
    ScaledSteady { a: f64 },
    /// S·(a + (1−a)·bump): a convex combination of S and a bump-modulated
    /// profile; off the separable ray for 0 < a < 1.
    SteadyPlusBump {
        a: f64,
        center: Vec<f64>,
        width: f64,
    },
    /// scale·ψ̃ built from the distance-weighted eigenfunction.
    WeightedEigenfunction { scale: f64 },
}

/// Initial datum plus the comparability diagnostics the factory reports:
/// the two-sided distance-comparison constant and the boundedness proxy for
/// u^{1−p}(−Δ_h − b)u (finite for admissible smooth data; reported, not
/// asserted, since the discrete grid cannot certify boundary smoothness).
#[derive(Debug, Clone)]
pub struct InitialData {
    pub u0: GridFunction<f64>,
    /// c with c⁻¹·d ≤ u₀ ≤ c·d over interior nodes.
    pub harnack_c: f64,
    /// sup over interior nodes of |(−Δ_h u − bu)| / u^{p−1}.
    pub curvature_ratio_sup: f64,
}

fn smooth_bump(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

pub fn initial_data(
    kind: &InitialDataKind,
    steady: &SteadyState,
) -> Result<InitialData, FdeError> {
    let grid = steady.s.grid().clone();
    let u0 = match kind {
        InitialDataKind::ScaledSteady { a } => {
            if !(*a > 0.0) {
                return Err(FdeError::Parameter(format!(
                    "scaled_steady needs a > 0, got {a}"
                )));
            }
            steady.s.scale(*a)
        }
        InitialDataKind::SteadyPlusBump { a, center, width } => {
            if !(*a > 0.0 && *a <= 1.0) {
                return Err(FdeError::Parameter(format!(
                    "steady_plus_bump needs a ∈ (0,1], got {a}"
                )));
            }
            if !(*width > 0.0) || center.len() < grid.dimension() {
                return Err(FdeError::Parameter(
                    "steady_plus_bump needs a positive width and a center per axis".into(),
                ));
            }
            let (a, width) = (*a, *width);
            let cx = center[0];
            let cy = center.get(1).copied().unwrap_or(0.0);
            let dim = grid.dimension();
            let s = steady.s.clone();
            let modulated = GridFunction::sample(&grid, true, |[x, y]| {
                let r = if dim == 1 {
                    (x - cx).abs() / width
                } else {
                    ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() / width
                };
                a + (1.0 - a) * smooth_bump(r)
            });
            s.zip_with(&modulated, |si, mi| si * mi)?
        }
        InitialDataKind::WeightedEigenfunction { scale } => {
            if !(*scale > 0.0) {
                return Err(FdeError::Parameter(format!(
                    "weighted_eigenfunction needs scale > 0, got {scale}"
                )));
            }
            let eig = weighted_eigenpair(&grid, steady.p, steady.b)?;
            eig.psi.scale(*scale)
        }
    };

    // Sign guard: the factory only produces strictly positive interior data.
    if grid.interior_indices().any(|i| u0.values()[i] <= 0.0) {
        return Err(FdeError::Parameter(
            "initial data parameters produce a sign change in the interior".into(),
        ));
    }

    let d = distance_field(&grid);
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max: f64 = 0.0;
    let mut curvature_sup: f64 = 0.0;
    let u_int = u0.interior_values();
    let lu = apply_neg_lap(&grid, steady.b, &u_int);
    for (k, i) in grid.interior_indices().enumerate() {
        let ratio = u0.values()[i] / d.values()[i];
        ratio_min = ratio_min.min(ratio);
        ratio_max = ratio_max.max(ratio);
        curvature_sup = curvature_sup.max(lu[k].abs() / u_int[k].powf(steady.p - 1.0));
    }
    Ok(InitialData {
        u0,
        harnack_c: ratio_max.max(1.0 / ratio_min),
        curvature_ratio_sup: curvature_sup,
    })
}
