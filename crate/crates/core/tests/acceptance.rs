//! Acceptance gate: eleven criteria, one test — and thus one harness
//! pass/fail line — per criterion. Every tolerance is pinned as a named
//! constant below; each passing test also prints a `criterion N [PASS]`
//! line with the measured quantities.
//!
//! Heavy runs are shared between criteria through lazily initialized
//! fixtures, so the gate stays well inside its wall-clock budgets.

use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fde_lab::diagnostics::{
    benilan_crandall_margin, convergence_rate, curvature_r, dissipation_residual, harnack_ratio,
    moments_mq, relative_error_series, scaling_envelope,
};
use fde_lab::domain::{build_grid, distance_field, integrate, Grid, GridFunction};
use fde_lab::evolve::{
    estimate_extinction_time, evolve_base, evolve_rescaled, frame_transform, DtPolicy, StopRule,
    Trajectory, TransformDirection,
};
use fde_lab::funcineq::{
    campanato_bridge, campanato_seminorm, chi_exponent, families, hardy_sobolev_ratio, ode_bound,
    ode_oracle_sup, weighted_holder_seminorm, weighted_sobolev_ratio, CampanatoSampling,
    SpaceTimeFunction,
};
use fde_lab::steady::{initial_data, solve_steady_1d, solve_steady_2d, InitialDataKind, SteadyState};
use fde_lab::tolerances::{frozen, STEADY_TOL_REL};

// ---------------------------------------------------------------------------
// Pinned tolerances.
// ---------------------------------------------------------------------------

/// Criterion 1: sup-amplitude error against the separable solution at
/// half-time, extinction-time error, and wall-clock budget.
const C1_MAX_REL_ERR: f64 = 1e-2;
const C1_MAX_TSTAR_ERR: f64 = 2e-2;
const C1_MAX_SECONDS: f64 = 60.0;

/// Criterion 2: admissible convergence-order windows and budget.
const C2_DT_ORDER: (f64, f64) = (0.8, 1.2);
const C2_H_ORDER: (f64, f64) = (1.7, 2.3);
const C2_MAX_SECONDS: f64 = 300.0;

/// Criterion 3: mid-run relative defect of the dissipation identity.
const C3_MAX_MID_RELATIVE: f64 = 0.05;

/// Criterion 4: comparability ceiling, rescaled onset time, and the base
/// window as fractions of the extinction time.
const C4_C0_MAX: f64 = 10.0;
const C4_FROM_TIME: f64 = 0.5;
const C4_BAND: (f64, f64) = (0.25, 0.9);

/// Criterion 5: curvature deviation at the stationary profile and the
/// admissible gap between the elliptic and time-derivative routes.
const C5_MAX_STEADY_DEV: f64 = 10.0 * STEADY_TOL_REL;
const C5_MAX_ROUTE_GAP: f64 = 1e-2;

/// Criterion 6: late-window growth ceiling for the curvature moments.
const C6_MAX_LATE_GROWTH: f64 = 2.0;

/// Criterion 8: fit quality floor for the decay-rate certificate.
const C8_MIN_R2: f64 = 0.95;

/// Criterion 9: wall-clock budget for the exponent/quotient/ODE block.
const C9_MAX_SECONDS: f64 = 120.0;

// ---------------------------------------------------------------------------
// Shared fixtures.
// ---------------------------------------------------------------------------

fn interval(extent: f64, n: usize) -> std::sync::Arc<Grid<f64>> {
    build_grid(1, &[[0.0, extent]], &[n]).unwrap()
}

/// Stationary profile on the 401-node unit interval (p = 2, b = 0).
fn unit_steady() -> &'static SteadyState {
    static S: OnceLock<SteadyState> = OnceLock::new();
    S.get_or_init(|| solve_steady_1d(&interval(1.0, 401), 2.0, 0.0).unwrap())
}

/// Stationary profile on the canonical 401-node interval of length 3,
/// whose wall slope keeps the profile uniformly comparable to the
/// boundary distance.
fn canonical_steady() -> &'static SteadyState {
    static S: OnceLock<SteadyState> = OnceLock::new();
    S.get_or_init(|| solve_steady_1d(&interval(3.0, 401), 2.0, 0.0).unwrap())
}

/// The reference extinction run: u0 = S/2 on the unit interval, N = 401,
/// dt = 1e-4, evolved to extinction. Shared by criteria 1, 3, and 11.
fn reference_run() -> &'static (Trajectory, f64) {
    static R: OnceLock<(Trajectory, f64)> = OnceLock::new();
    R.get_or_init(|| {
        let clock = Instant::now();
        let traj = evolve_base(
            &unit_steady().s.scale(0.5),
            2.0,
            0.0,
            &DtPolicy::uniform(1e-4, 0.01),
            StopRule::default(),
        )
        .unwrap()
        .expect_complete()
        .unwrap();
        (traj, clock.elapsed().as_secs_f64())
    })
}

/// A genuinely converging rescaled trajectory: an off-ray base run,
/// transformed with its own estimated extinction time and trimmed at the
/// error minimum. Shared by criteria 6, 8, and 11.
fn converging_run() -> &'static (Trajectory, SteadyState) {
    static R: OnceLock<(Trajectory, SteadyState)> = OnceLock::new();
    R.get_or_init(|| {
        let st = solve_steady_1d(&interval(1.0, 101), 2.0, 0.0).unwrap();
        let bump = initial_data(
            &InitialDataKind::SteadyPlusBump {
                a: 0.5,
                center: vec![0.4],
                width: 0.25,
            },
            &st,
        )
        .unwrap();
        let traj = evolve_base(&bump.u0, 2.0, 0.0, &DtPolicy::uniform(2e-4, 5e-3), StopRule::default())
            .unwrap()
            .expect_complete()
            .unwrap();
        let est = estimate_extinction_time(&traj).unwrap();
        let safe = traj.restrict_to_time(est.tstar * 0.999);
        let rescaled = frame_transform(&safe, est.tstar, TransformDirection::ToRescaled).unwrap();
        let err = relative_error_series(&rescaled, &st).unwrap();
        let argmin = err
            .points
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
            .unwrap()
            .0;
        (rescaled.truncated(argmin + 1), st)
    })
}

fn nearest<'a>(traj: &'a Trajectory, t: f64) -> (f64, &'a GridFunction<f64>) {
    let k = traj
        .times
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - t).abs().partial_cmp(&(b.1 - t).abs()).unwrap())
        .unwrap()
        .0;
    (traj.times[k], &traj.snapshots[k])
}

// ---------------------------------------------------------------------------
// The criteria.
// ---------------------------------------------------------------------------

/// 1. The solver tracks the separable solution u = (1−t)/2·S on the unit
/// interval (N = 401, dt = 1e-4, u0 = S/2): sup-amplitude within 1% at
/// t = 0.5, estimated extinction time within 2% of 1, under 60 s.
#[test]
fn criterion_01_separable_solution_tracking() {
    let (traj, seconds) = reference_run();
    let smax = unit_steady().s.max_value();
    let (tk, snap) = nearest(traj, 0.5);
    let exact = 0.5 * (1.0 - tk) * smax;
    let rel = (snap.max_value() - exact).abs() / exact;
    assert!(
        rel <= C1_MAX_REL_ERR,
        "sup-amplitude relative error {rel} at t = {tk} exceeds {C1_MAX_REL_ERR}"
    );
    let est = estimate_extinction_time(traj).unwrap();
    let terr = (est.tstar - 1.0).abs();
    assert!(
        terr <= C1_MAX_TSTAR_ERR,
        "extinction-time error {terr} exceeds {C1_MAX_TSTAR_ERR}"
    );
    assert!(
        *seconds <= C1_MAX_SECONDS,
        "run took {seconds} s, budget {C1_MAX_SECONDS} s"
    );
    println!(
        "criterion 1 [PASS] separable tracking: rel err {rel:.2e} at t = {tk}, \
         extinction-time err {terr:.2e}, {seconds:.2} s"
    );
}

/// 2. Measured convergence orders: first order in dt (against the
/// discrete separable reference on a fixed grid) and second order in h
/// (against a near-continuum profile), three refinements each, under 5 min.
#[test]
fn criterion_02_integrator_convergence_orders() {
    let clock = Instant::now();

    // dt study: same grid on both sides isolates the time discretization.
    let st = solve_steady_1d(&interval(1.0, 101), 2.0, 0.0).unwrap();
    let mut dt_errs = Vec::new();
    for dt in [4e-3, 2e-3, 1e-3] {
        let run = evolve_base(
            &st.s.scale(0.5),
            2.0,
            0.0,
            &DtPolicy::uniform(dt, 0.25),
            StopRule { t_end: Some(0.25) },
        )
        .unwrap()
        .expect_complete()
        .unwrap();
        let tk = *run.times.last().unwrap();
        let c = 0.5 - tk / 2.0;
        let snap = run.snapshots.last().unwrap();
        let err = snap
            .values()
            .iter()
            .zip(st.s.values())
            .map(|(&u, &s)| (u - c * s).abs())
            .fold(0.0f64, f64::max);
        dt_errs.push(err);
    }
    let dt_orders = [
        (dt_errs[0] / dt_errs[1]).log2(),
        (dt_errs[1] / dt_errs[2]).log2(),
    ];
    for o in dt_orders {
        assert!(
            (C2_DT_ORDER.0..=C2_DT_ORDER.1).contains(&o),
            "dt order {o} outside [{}, {}] (errors {dt_errs:?})",
            C2_DT_ORDER.0,
            C2_DT_ORDER.1
        );
    }

    // h study: compare against the profile of a 1601-node solve, whose
    // node set contains each coarser lattice.
    let fine = solve_steady_1d(&interval(1.0, 1601), 2.0, 0.0).unwrap();
    let mut h_errs = Vec::new();
    for n in [51usize, 101, 201] {
        let st_n = solve_steady_1d(&interval(1.0, n), 2.0, 0.0).unwrap();
        let run = evolve_base(
            &st_n.s.scale(0.5),
            2.0,
            0.0,
            &DtPolicy::uniform(5e-5, 0.05),
            StopRule { t_end: Some(0.05) },
        )
        .unwrap()
        .expect_complete()
        .unwrap();
        let tk = *run.times.last().unwrap();
        let c = 0.5 - tk / 2.0;
        let stride = 1600 / (n - 1);
        let snap = run.snapshots.last().unwrap();
        let err = (0..n)
            .map(|i| (snap.values()[i] - c * fine.s.values()[i * stride]).abs())
            .fold(0.0f64, f64::max);
        h_errs.push(err);
    }
    let h_orders = [(h_errs[0] / h_errs[1]).log2(), (h_errs[1] / h_errs[2]).log2()];
    for o in h_orders {
        assert!(
            (C2_H_ORDER.0..=C2_H_ORDER.1).contains(&o),
            "h order {o} outside [{}, {}] (errors {h_errs:?})",
            C2_H_ORDER.0,
            C2_H_ORDER.1
        );
    }

    let seconds = clock.elapsed().as_secs_f64();
    assert!(seconds <= C2_MAX_SECONDS, "took {seconds} s");
    println!(
        "criterion 2 [PASS] convergence orders: dt {:.3}/{:.3}, h {:.3}/{:.3}, {seconds:.2} s",
        dt_orders[0], dt_orders[1], h_orders[0], h_orders[1]
    );
}

/// 3. Along the reference extinction run, the energy never increases
/// between snapshots and the discrete dissipation identity holds to 5%
/// relative at mid-run.
#[test]
fn criterion_03_energy_dissipation_identity() {
    let (traj, _) = reference_run();
    let check = dissipation_residual(traj).unwrap();
    assert!(check.monotone, "energy rose by {}", check.max_uptick);
    let mid = traj.times[traj.len() / 2];
    let (tm, rel_mid) = *check
        .relative
        .points
        .iter()
        .min_by(|a, b| (a.0 - mid).abs().partial_cmp(&(b.0 - mid).abs()).unwrap())
        .unwrap();
    assert!(
        rel_mid <= C3_MAX_MID_RELATIVE,
        "relative identity defect {rel_mid} at t = {tm} exceeds {C3_MAX_MID_RELATIVE}"
    );
    println!(
        "criterion 3 [PASS] dissipation: monotone, mid-run relative defect {rel_mid:.2e} at t = {tm:.2}"
    );
}

/// 4. Global comparability with the boundary distance: along the rescaled
/// run from v0 = 1.2·S on the canonical interval, the two-sided constant
/// of v/d stays ≤ 10 for t ≥ 0.5; along the matching base-frame run,
/// u/(d·(T̂−τ)) admits a two-sided band constant ≤ 10 over
/// [0.25·T̂, 0.9·T̂].
#[test]
fn criterion_04_global_harnack_comparability() {
    let st = canonical_steady();
    let run = evolve_rescaled(&st.s.scale(1.2), 2.0, 0.0, &DtPolicy::uniform(1e-3, 0.05), 4.0)
        .unwrap()
        .expect_complete()
        .unwrap();
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for (t, v) in run.times.iter().zip(run.snapshots.iter()) {
        if *t >= C4_FROM_TIME {
            let h = harnack_ratio(v).unwrap();
            assert!(!h.degenerate, "comparability degenerates at t = {t}");
            worst = worst.max(h.c0);
            checked += 1;
        }
    }
    assert!(checked > 20, "only {checked} rescaled snapshots past the onset");
    assert!(worst <= C4_C0_MAX, "rescaled c0 {worst} exceeds {C4_C0_MAX}");

    let base = evolve_base(
        &st.s.scale(1.2),
        2.0,
        0.0,
        &DtPolicy::uniform(1e-4, 0.02),
        StopRule::default(),
    )
    .unwrap()
    .expect_complete()
    .unwrap();
    let est = estimate_extinction_time(&base).unwrap();
    let grid = st.s.grid();
    let d = distance_field(grid);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut in_window = 0usize;
    for (tau, u) in base.times.iter().zip(base.snapshots.iter()) {
        if *tau >= C4_BAND.0 * est.tstar && *tau <= C4_BAND.1 * est.tstar {
            for i in grid.interior_indices() {
                let ratio = u.values()[i] / (d.values()[i] * (est.tstar - tau));
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
            in_window += 1;
        }
    }
    assert!(in_window > 20, "only {in_window} base snapshots in the window");
    let band = hi.max(1.0 / lo);
    assert!(
        band <= C4_C0_MAX,
        "base-frame band constant {band} exceeds {C4_C0_MAX} (ratios in [{lo}, {hi}])"
    );
    println!(
        "criterion 4 [PASS] comparability: rescaled worst c0 {worst:.3}, \
         base band constant {band:.3} (both ≤ {C4_C0_MAX})"
    );
}

/// 5. The curvature ratio is ≡ 1 at the stationary profile to ten times
/// the stationary solve tolerance, and its elliptic and time-derivative
/// routes agree to 1e-2 along an actual rescaled run at N = 401,
/// dt = 1e-4.
#[test]
fn criterion_05_curvature_identity_and_route_agreement() {
    let st = unit_steady();
    let cur = curvature_r(&st.s, 2.0, 0.0, None).unwrap();
    assert!(cur.masked.is_empty(), "masking at the stationary profile");
    let dev = cur.elliptic_deviation_from(1.0);
    assert!(
        dev <= C5_MAX_STEADY_DEV,
        "curvature deviation {dev} at the stationary profile exceeds {C5_MAX_STEADY_DEV}"
    );

    let canon = canonical_steady();
    let run = evolve_rescaled(
        &canon.s.scale(1.2),
        2.0,
        0.0,
        &DtPolicy::uniform(1e-4, 1e-4),
        2e-3,
    )
    .unwrap()
    .expect_complete()
    .unwrap();
    assert!(run.len() >= 20, "only {} route snapshots", run.len());
    let mut worst = 0.0f64;
    for k in 0..run.len() - 1 {
        let dt = run.times[k + 1] - run.times[k];
        let pair = curvature_r(&run.snapshots[k], 2.0, 0.0, Some((&run.snapshots[k + 1], dt)))
            .unwrap();
        worst = worst.max(pair.route_discrepancy().unwrap());
    }
    assert!(
        worst <= C5_MAX_ROUTE_GAP,
        "route gap {worst} exceeds {C5_MAX_ROUTE_GAP}"
    );
    println!(
        "criterion 5 [PASS] curvature: steady deviation {dev:.2e} ≤ {C5_MAX_STEADY_DEV:.1e}, \
         route gap {worst:.2e} ≤ {C5_MAX_ROUTE_GAP:.0e}"
    );
}

/// 6. The curvature moments M_q, q ∈ {2, 4, 8}, stay bounded along the
/// converging rescaled run: the sup over the second half of the window
/// does not exceed twice the sup over the second quarter.
#[test]
fn criterion_06_moment_boundedness() {
    let (traj, _) = converging_run();
    assert!(traj.len() >= 12, "only {} snapshots", traj.len());
    let t_end = traj.times[traj.len() - 1];
    let mut summary = Vec::new();
    for q in [2.0, 4.0, 8.0] {
        let m = moments_mq(traj, q).unwrap();
        let late = m.series.max_on(t_end / 2.0, t_end);
        let reference = m.series.max_on(t_end / 4.0, t_end / 2.0);
        assert!(
            late <= C6_MAX_LATE_GROWTH * reference,
            "q = {q}: late sup {late} vs reference {reference}"
        );
        summary.push(format!("M_{q}: {late:.2e}/{reference:.2e}"));
    }
    println!(
        "criterion 6 [PASS] moments bounded (late sup / reference sup): {}",
        summary.join(", ")
    );
}

/// 7. The universal time-derivative bound of the rescaled flow holds with
/// nonpositive margin at every snapshot, across p ∈ {1.5, 2, 3} in one
/// dimension (N = 101) and on a coarse square (17×17).
#[test]
fn criterion_07_time_derivative_bound() {
    let mut summary = Vec::new();
    for p in [1.5, 2.0, 3.0] {
        let grid = interval(1.0, 101);
        let st = solve_steady_1d(&grid, p, 0.0).unwrap();
        let run = evolve_rescaled(&st.s.scale(0.9), p, 0.0, &DtPolicy::uniform(1e-3, 0.05), 1.0)
            .unwrap()
            .expect_complete()
            .unwrap();
        let margin = benilan_crandall_margin(&run).unwrap().max_value();
        assert!(margin <= 0.0, "1D p = {p}: margin {margin} is positive");
        summary.push(format!("1D p={p}: {margin:.2e}"));

        let square = build_grid(2, &[[0.0, 1.0], [0.0, 1.0]], &[17, 17]).unwrap();
        let st2 = solve_steady_2d(&square, p, 0.0).unwrap();
        let run2 = evolve_rescaled(&st2.s.scale(0.9), p, 0.0, &DtPolicy::uniform(2e-3, 0.05), 0.5)
            .unwrap()
            .expect_complete()
            .unwrap();
        let margin2 = benilan_crandall_margin(&run2).unwrap().max_value();
        assert!(margin2 <= 0.0, "2D p = {p}: margin {margin2} is positive");
        summary.push(format!("2D p={p}: {margin2:.2e}"));
    }
    println!("criterion 7 [PASS] time-derivative bound margins: {}", summary.join(", "));
}

/// 8. The decay-rate certificate on the converging run: the fitted sup
/// rate is positive with fit quality R² ≥ 0.95, and the weighted error is
/// dominated pointwise by (∫S^{p+1})^{1/2} times the sup error.
#[test]
fn criterion_08_convergence_rate_certificate() {
    let (traj, st) = converging_run();
    let fit = convergence_rate(traj, st, false).unwrap();
    assert!(!fit.refused, "rate fit refused");
    assert!(fit.gamma_sup > 0.0, "nonpositive rate {}", fit.gamma_sup);
    assert!(
        fit.r2 >= C8_MIN_R2,
        "fit quality {} below {C8_MIN_R2} over window {:?}",
        fit.r2,
        fit.window
    );
    let pot = integrate(&st.s.map(|v| v.powf(st.p + 1.0)), None).unwrap().sqrt();
    for (sup_pt, w_pt) in fit.sup_error.points.iter().zip(fit.weighted_error.points.iter()) {
        assert!(
            w_pt.1 <= pot * sup_pt.1 * (1.0 + 1e-12),
            "weighted error {} escapes the sup-error envelope {} at t = {}",
            w_pt.1,
            pot * sup_pt.1,
            w_pt.0
        );
    }
    println!(
        "criterion 8 [PASS] decay certificate: rate {:.4} (weighted {:.4}), R² {:.4}, \
         window ({:.2}, {:.2}); weighted ≤ {pot:.3}·sup pointwise",
        fit.gamma_sup, fit.gamma_weighted, fit.r2, fit.window.0, fit.window.1
    );
}

/// 9. Integrability exponents at the tabulated parameter points, the
/// space-time quotient ceiling over the pinned family, and domination of
/// the ODE oracle by the closed bound over fifty seeded tuples — all
/// under two minutes.
#[test]
fn criterion_09_exponents_quotients_ode_domination() {
    let clock = Instant::now();

    let a = chi_exponent(1, 2.0).unwrap();
    assert!((a.chi - 1.5).abs() <= 1e-12 && a.s.is_none());
    let b = chi_exponent(2, 3.0).unwrap();
    assert!((b.chi - 4.0 / 3.0).abs() <= 1e-12 && b.s.is_none());
    let c = chi_exponent(3, 2.0).unwrap();
    assert!((c.s.unwrap() - 1.0).abs() <= 1e-12 && (c.chi - 1.5).abs() <= 1e-12);

    let mut max_ratio = 0.0f64;
    for f in families::sobolev_family() {
        let r = weighted_sobolev_ratio(&f, 2.0).unwrap();
        assert!(
            r <= frozen::WEIGHTED_SOBOLEV_CONSTANT,
            "quotient {r} exceeds the recorded ceiling {}",
            frozen::WEIGHTED_SOBOLEV_CONSTANT
        );
        max_ratio = max_ratio.max(r);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xFDE0);
    let mut worst_margin = 0.0f64;
    for case in 0..50 {
        let alpha = rng.gen_range(0.2..1.5);
        let mu1 = rng.gen_range(0.3..1.5);
        let mu2 = rng.gen_range(0.0..0.9);
        let mu3 = if case % 5 == 0 { 1.0 } else { rng.gen_range(0.0..1.0) };
        let zeta0 = rng.gen_range(0.05..1.5);
        let integral = rng.gen_range(0.1..1.5);
        let bound = ode_bound(alpha, mu1, mu2, mu3, zeta0, integral).unwrap();
        let sup = ode_oracle_sup(alpha, mu1, mu2, mu3, zeta0, integral).unwrap();
        assert!(
            sup <= bound,
            "case {case}: oracle sup {sup} exceeds the bound {bound}"
        );
        worst_margin = worst_margin.max(sup / bound);
    }

    let seconds = clock.elapsed().as_secs_f64();
    assert!(seconds <= C9_MAX_SECONDS, "took {seconds} s");
    println!(
        "criterion 9 [PASS] exponents 3/2, 4/3, (s=1, 3/2); quotient max {max_ratio:.4} ≤ {}; \
         ode worst sup/bound {worst_margin:.3}; {seconds:.2} s",
        frozen::WEIGHTED_SOBOLEV_CONSTANT
    );
}

/// 10. Seminorm calibration: both seminorms vanish exactly on constants;
/// the interior term is bridged by the boundary term at every sampled
/// wall center with the recorded constant; and the cylinder and weighted
/// Hölder seminorms are two-sidedly equivalent over the pinned 20-member
/// family with the recorded constant.
#[test]
fn criterion_10_seminorm_calibration_and_bridge() {
    let grid = interval(1.0, 17);
    let times: Vec<f64> = (0..9).map(|k| k as f64 / 8.0).collect();
    let constant = SpaceTimeFunction::sample(&grid, &times, false, |_, _| 3.25).unwrap();
    let camp0 = campanato_seminorm(&constant, 0.5, 2.0, &CampanatoSampling::default()).unwrap();
    assert_eq!(camp0.value, 0.0, "cylinder seminorm of a constant");
    let hold0 = weighted_holder_seminorm(&constant, 0.5, 2.0).unwrap();
    assert_eq!(hold0.value, 0.0, "weighted seminorm of a constant");

    let mut worst_bridge = 0.0f64;
    for k in 0..4 {
        let u = families::holder_fixture(k);
        let bridge = campanato_bridge(&u, 0.5, 2.0, 4).unwrap();
        assert!(bridge.centers_checked > 0, "no wall centers sampled");
        assert!(
            bridge.max_ratio <= frozen::CAMPANATO_BRIDGE_CONSTANT,
            "member {k}: bridge ratio {} exceeds the recorded constant {}",
            bridge.max_ratio,
            frozen::CAMPANATO_BRIDGE_CONSTANT
        );
        worst_bridge = worst_bridge.max(bridge.max_ratio);
    }

    let mut worst_equiv = 0.0f64;
    for k in 0..20 {
        let u = families::holder_fixture(k);
        let camp = campanato_seminorm(&u, 0.5, 2.0, &CampanatoSampling::default())
            .unwrap()
            .value;
        let hold = weighted_holder_seminorm(&u, 0.5, 2.0).unwrap().value;
        assert!(camp > 0.0 && hold > 0.0, "degenerate family member {k}");
        let two_sided = (camp / hold).max(hold / camp);
        assert!(
            two_sided <= frozen::HOLDER_EQUIVALENCE_CONSTANT,
            "member {k}: equivalence ratio {two_sided} exceeds the recorded constant {}",
            frozen::HOLDER_EQUIVALENCE_CONSTANT
        );
        worst_equiv = worst_equiv.max(two_sided);
    }
    println!(
        "criterion 10 [PASS] seminorms: constants ↦ 0 exactly; bridge max {worst_bridge:.3} ≤ {}; \
         equivalence max {worst_equiv:.3} ≤ {}",
        frozen::CAMPANATO_BRIDGE_CONSTANT,
        frozen::HOLDER_EQUIVALENCE_CONSTANT
    );
}

/// 11. Explicit statements of what this laboratory does not reproduce at
/// desk scale, each paired with the finite stand-in that is verified
/// instead.
#[test]
fn criterion_11_desk_scale_limitations() {
    // (a) The full boundary expansion with its sharp exponent ladder is a
    // continuum statement; at desk scale only the finite envelope
    // constants for derivative orders 0 and 1 are certified.
    let (traj, _) = reference_run();
    let est = estimate_extinction_time(traj).unwrap();
    let dt = traj.dt_policy.dt;
    let cut = (est.tstar * (1.0 - 1e-3)).min(est.tstar - 5.0 * dt);
    let safe = traj.restrict_to_time(cut);
    let mut sups = Vec::new();
    for l in [0usize, 1] {
        let env = scaling_envelope(&safe, est.tstar, l).unwrap();
        assert!(
            env.sup.is_finite() && env.sup > 0.0,
            "envelope constant for derivative order {l} is not a positive finite number"
        );
        sups.push(env.sup);
    }
    println!(
        "criterion 11 [STATEMENT] the sharp boundary-expansion exponents are not certified \
         at desk scale; verified instead: finite envelope constants C0 = {:.2}, C1 = {:.2}",
        sups[0], sups[1]
    );

    // (b) The critical-exponent refinement exists only in dimension ≥ 3,
    // where no grid is built here; the exponent formula is exercised, the
    // grid evaluator refuses.
    let pack = chi_exponent(3, 2.0).unwrap();
    assert_eq!(pack.s, Some(1.0));
    let grid = interval(1.0, 33);
    let f = GridFunction::sample(&grid, true, |[x, _]| x * (1.0 - x));
    assert!(
        hardy_sobolev_ratio(&f, 3, 2.0, 1.0).is_err(),
        "the quotient evaluator must refuse dimensions ≥ 3"
    );
    println!(
        "criterion 11 [STATEMENT] the critical-case refinement needs dimension ≥ 3: exponent \
         formula gives s = 1 there, while grid quotients refuse (no such grids at desk scale)"
    );

    // (c) The sharp value of the convergence rate is not reproduced; the
    // certificate is positivity plus fit quality only.
    let (conv, st) = converging_run();
    let fit = convergence_rate(conv, st, false).unwrap();
    assert!(!fit.refused && fit.gamma_sup > 0.0);
    println!(
        "criterion 11 [STATEMENT] the sharp decay rate is not certified; measured \
         {:.4} with R² {:.4} is reported as a positive rate, nothing more",
        fit.gamma_sup, fit.r2
    );
}
