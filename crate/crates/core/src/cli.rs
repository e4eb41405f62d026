//! Batch driver: parse a run configuration, execute the experiments it
//! lists (steady solves, extinction runs, rescaled runs, re-diagnosis of
//! stored trajectories, functional-inequality suites), and emit CSV/JSON
//! artifacts under one directory per experiment.
//!
//! Exit codes: 0 — everything ran and every requested check passed;
//! 1 — a check failed (its name is printed) or an artifact/contract problem;
//! 2 — the configuration violates the schema (field path printed);
//! 3 — a solver failed or a parameter precondition surfaced at runtime
//! (partial artifacts are kept).
//!
//! Identical (config, seed) pairs produce byte-identical artifact files;
//! wall-clock timing is reported on stdout only, never written into
//! artifacts. `FDE_LAB_THREADS` caps the number of worker threads used for
//! independent experiments.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{DiagnosticSpec, ExperimentConfig, ExperimentKind, RunConfig};
use crate::diagnostics::{
    benilan_crandall_margin, convergence_rate, curvature_r, dissipation_residual, harnack_ratio,
    moments_mq, scaling_envelope, CheckFlag, DiagnosticsReport, TimeSeries,
};
use crate::domain::{build_grid, Grid, GridFunction};
use crate::error::FdeError;
use crate::evolve::{
    estimate_extinction_time, evolve_base, evolve_rescaled, StopRule, Trajectory,
};
use crate::funcineq::{chi_exponent, ode_bound, ode_oracle_sup, weighted_sobolev_ratio,
    SpaceTimeFunction};
use crate::io::{
    read_json, read_trajectory, write_grid_function, write_json, write_manifest,
    write_steady_state, write_time_series, write_trajectory, GridSpec, NormEvaluation,
    RefinementPoint,
};
use crate::steady::{initial_data, solve_steady_1d, solve_steady_2d, SteadyState};
use crate::tolerances::{frozen, STEADY_TOL_REL};

// ---------------------------------------------------------------------------
// Command line.
// ---------------------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(
    name = "fde-lab",
    version,
    about = "Numerical laboratory for a Dirichlet fast diffusion equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Execute every experiment in a JSON config and write artifacts.
    Run {
        /// Path to the run configuration (JSON, schema 1).
        config: PathBuf,
        /// Output root; overrides the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// RNG seed for the randomized suites; overrides the config's `seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Extract one named series from an experiment report as `t,value` CSV.
    Plot {
        /// Path to an experiment's `report.json`.
        report: PathBuf,
        /// Series name, e.g. `J`, `M_8`, `rel_err_sup`.
        #[arg(long)]
        quantity: String,
        /// Output CSV path; defaults to `plot_<quantity>.csv` beside the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    init_thread_pool();
    match cli.command {
        Cmd::Run { config, out, seed } => cmd_run(&config, out, seed),
        Cmd::Plot {
            report,
            quantity,
            out,
        } => cmd_plot(&report, &quantity, out),
    }
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("FDE_LAB_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n >= 1 {
                // A second initialization (tests, repeated calls) is harmless.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Run reports.
// ---------------------------------------------------------------------------

/// Summary of one executed experiment: the verdicts and the emitted files.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentOutcome {
    pub name: String,
    pub kind: String,
    pub passed: bool,
    pub flags: Vec<CheckFlag>,
    /// Relative path → SHA-256 for every file under the experiment directory.
    pub manifest: BTreeMap<String, String>,
}

/// Overall run summary printed to stdout. Timing stays out of the artifact
/// files so artifacts remain byte-deterministic.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub experiments: Vec<ExperimentOutcome>,
    pub wall_ms: u128,
}

fn kind_label(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Steady => "steady",
        ExperimentKind::EvolveBase => "evolve_base",
        ExperimentKind::EvolveRescaled => "evolve_rescaled",
        ExperimentKind::Diagnose => "diagnose",
        ExperimentKind::Funcineq => "funcineq",
    }
}

fn cmd_run(config_path: &Path, out: Option<PathBuf>, seed: Option<u64>) -> i32 {
    let mut config = match RunConfig::load(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    if let Some(out) = out {
        config.output_dir = Some(out);
    }
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let root = config
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("fde-runs"));
    if let Err(e) = fs::create_dir_all(&root) {
        eprintln!("cannot create output root {}: {e}", root.display());
        return 1;
    }

    let started = Instant::now();
    let results: Vec<Result<ExperimentOutcome, FdeError>> = config
        .experiments
        .par_iter()
        .map(|exp| execute_experiment(exp, config.seed, &root))
        .collect();

    let mut outcomes = Vec::new();
    let mut first_error: Option<i32> = None;
    for (exp, result) in config.experiments.iter().zip(results) {
        match result {
            Ok(outcome) => outcomes.push(outcome),
            Err(e) => {
                eprintln!("experiment `{}` failed: {e}", exp.name);
                first_error.get_or_insert(e.exit_code());
            }
        }
    }
    let report = RunReport {
        experiments: outcomes,
        wall_ms: started.elapsed().as_millis(),
        config,
    };
    match serde_json::to_string_pretty(&report) {
        Ok(text) => println!("{text}"),
        Err(e) => {
            eprintln!("cannot serialize the run report: {e}");
            first_error.get_or_insert(1);
        }
    }
    if let Some(code) = first_error {
        return code;
    }
    let mut failed = false;
    for outcome in &report.experiments {
        for flag in outcome.flags.iter().filter(|f| !f.passed) {
            eprintln!(
                "check failed: {}/{}: {}",
                outcome.name, flag.name, flag.message
            );
            failed = true;
        }
    }
    if failed {
        1
    } else {
        0
    }
}

fn cmd_plot(report_path: &Path, quantity: &str, out: Option<PathBuf>) -> i32 {
    let run = || -> Result<PathBuf, FdeError> {
        let report: DiagnosticsReport = read_json(report_path)?;
        let series = report.series.get(quantity).ok_or_else(|| {
            let known: Vec<&str> = report.series.keys().map(|s| s.as_str()).collect();
            FdeError::Contract(format!(
                "series `{quantity}` is not in {}; available: {}",
                report_path.display(),
                known.join(", ")
            ))
        })?;
        let out = out.unwrap_or_else(|| {
            let dir = report_path.parent().unwrap_or_else(|| Path::new("."));
            dir.join(format!("plot_{}.csv", sanitize(quantity)))
        });
        write_time_series(&out, series)?;
        Ok(out)
    };
    match run() {
        Ok(path) => {
            println!("{}", path.display());
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Experiment execution.
// ---------------------------------------------------------------------------

fn solve_steady(grid: &Arc<Grid<f64>>, p: f64, b: f64) -> Result<SteadyState, FdeError> {
    match grid.dimension() {
        1 => solve_steady_1d(grid, p, b),
        _ => solve_steady_2d(grid, p, b),
    }
}

/// Runs one experiment into `<root>/<name>/` and returns its outcome.
/// Solver aborts still leave the partial trajectory on disk.
pub fn execute_experiment(
    exp: &ExperimentConfig,
    seed: u64,
    root: &Path,
) -> Result<ExperimentOutcome, FdeError> {
    let dir = root.join(&exp.name);
    fs::create_dir_all(&dir)?;
    let report = match exp.kind {
        ExperimentKind::Steady => execute_steady(exp, &dir)?,
        ExperimentKind::EvolveBase => execute_evolve(exp, &dir, false)?,
        ExperimentKind::EvolveRescaled => execute_evolve(exp, &dir, true)?,
        ExperimentKind::Diagnose => execute_diagnose(exp)?,
        ExperimentKind::Funcineq => execute_funcineq(exp, &dir, seed)?,
    };
    write_json(&dir.join("report.json"), &report)?;
    for series in report.series.values() {
        write_time_series(
            &dir.join(format!("series_{}.csv", sanitize(&series.name))),
            series,
        )?;
    }
    let manifest = write_manifest(&dir)?;
    Ok(ExperimentOutcome {
        name: exp.name.clone(),
        kind: kind_label(exp.kind).to_string(),
        passed: report.all_passed(),
        flags: report.flags,
        manifest,
    })
}

fn execute_steady(exp: &ExperimentConfig, dir: &Path) -> Result<DiagnosticsReport, FdeError> {
    let grid = exp.grid.as_ref().unwrap().build()?;
    let steady = solve_steady(&grid, exp.p.unwrap(), exp.b_or_default())?;
    write_steady_state(&dir.join("steady"), &steady)?;
    let mut report = DiagnosticsReport::default();
    report.constants.insert("residual_norm".into(), steady.residual_norm);
    report.constants.insert("residual_rel".into(), steady.residual_rel);
    report.constants.insert(
        "s_max".into(),
        steady.s.values().iter().cloned().fold(0.0, f64::max),
    );
    report.flags.push(CheckFlag {
        name: "steady_residual".into(),
        passed: steady.residual_rel <= STEADY_TOL_REL,
        tolerance_name: "STEADY_TOL_REL".into(),
        tolerance: STEADY_TOL_REL,
        observed: steady.residual_rel,
        message: "relative defect of the discrete stationary equation".into(),
    });
    Ok(report)
}

fn execute_evolve(
    exp: &ExperimentConfig,
    dir: &Path,
    rescaled: bool,
) -> Result<DiagnosticsReport, FdeError> {
    let grid = exp.grid.as_ref().unwrap().build()?;
    let p = exp.p.unwrap();
    let b = exp.b_or_default();
    let steady = solve_steady(&grid, p, b)?;
    let init = initial_data(exp.initial.as_ref().unwrap(), &steady)?;
    write_grid_function(&dir.join("initial.csv"), &init.u0)?;
    let policy = exp.dt.as_ref().unwrap();
    let result = if rescaled {
        evolve_rescaled(&init.u0, p, b, policy, exp.t_end.unwrap())?
    } else {
        evolve_base(&init.u0, p, b, policy, StopRule { t_end: exp.t_end })?
    };
    // Persist whatever was computed before reporting a mid-run abort, so a
    // failed run still leaves inspectable artifacts.
    write_trajectory(&dir.join("trajectory"), &result.trajectory)?;
    if let Some(msg) = result.failure {
        return Err(FdeError::Solver(format!(
            "time stepping aborted after {} accepted steps: {msg}",
            result.steps_accepted
        )));
    }
    let mut report = run_diagnostics(&result.trajectory, &exp.diagnostics, Some(&steady))?;
    report
        .constants
        .insert("steps_accepted".into(), result.steps_accepted as f64);
    report
        .constants
        .insert("dt_halvings".into(), result.dt_halvings as f64);
    report
        .constants
        .insert("initial_harnack_c".into(), init.harnack_c);
    report
        .constants
        .insert("initial_curvature_ratio_sup".into(), init.curvature_ratio_sup);
    Ok(report)
}

fn execute_diagnose(exp: &ExperimentConfig) -> Result<DiagnosticsReport, FdeError> {
    let traj = read_trajectory(exp.trajectory.as_ref().unwrap())?;
    traj.validate()?;
    run_diagnostics(&traj, &exp.diagnostics, None)
}

// ---------------------------------------------------------------------------
// Diagnostics orchestration.
// ---------------------------------------------------------------------------

/// Evaluates each requested check along the trajectory, producing one or
/// more pass/fail flags and the backing time series. `steady` is reused
/// when the caller already solved it; otherwise it is solved on demand for
/// the checks that compare against the stationary profile.
pub fn run_diagnostics(
    traj: &Trajectory,
    specs: &[DiagnosticSpec],
    steady: Option<&SteadyState>,
) -> Result<DiagnosticsReport, FdeError> {
    let mut report = DiagnosticsReport::default();
    let mut solved: Option<SteadyState> = None;
    for spec in specs {
        let steady_ref: Option<&SteadyState> = match spec {
            DiagnosticSpec::ConvergenceRate { .. } => Some(match steady {
                Some(s) => s,
                None => {
                    if solved.is_none() {
                        solved = Some(solve_steady(traj.grid(), traj.p, traj.b)?);
                    }
                    solved.as_ref().unwrap()
                }
            }),
            _ => None,
        };
        run_one_diagnostic(traj, spec, steady_ref, &mut report)?;
    }
    Ok(report)
}

fn run_one_diagnostic(
    traj: &Trajectory,
    spec: &DiagnosticSpec,
    steady: Option<&SteadyState>,
    report: &mut DiagnosticsReport,
) -> Result<(), FdeError> {
    match spec {
        DiagnosticSpec::Dissipation {
            max_mid_run_relative,
        } => {
            let check = dissipation_residual(traj)?;
            let mid = check.relative.points[check.relative.points.len() / 2].1;
            report.flags.push(CheckFlag {
                name: "dissipation_monotone".into(),
                passed: check.monotone,
                tolerance_name: "exact".into(),
                tolerance: 0.0,
                observed: check.max_uptick,
                message: "largest energy increase between adjacent snapshots".into(),
            });
            report.flags.push(CheckFlag {
                name: "dissipation_identity".into(),
                passed: mid <= *max_mid_run_relative,
                tolerance_name: "max_mid_run_relative".into(),
                tolerance: *max_mid_run_relative,
                observed: mid,
                message: "relative dissipation-identity residual at the middle snapshot".into(),
            });
            report.insert_series(check.energy);
            report.insert_series(check.residual);
            report.insert_series(check.relative);
        }
        DiagnosticSpec::Harnack { c0_max, from_time } => {
            let mut points = Vec::new();
            let mut worst = 0.0f64;
            let mut degenerate = false;
            for (k, &t) in traj.times.iter().enumerate() {
                if t < *from_time {
                    continue;
                }
                let h = harnack_ratio(&traj.snapshots[k])?;
                degenerate |= h.degenerate;
                worst = worst.max(h.c0);
                points.push((t, h.c0));
            }
            if points.is_empty() {
                return Err(FdeError::Estimation(format!(
                    "no snapshots at or after t = {from_time} for the distance-comparison check"
                )));
            }
            report.insert_series(TimeSeries::new(
                "harnack_c0",
                points,
                "two-sided distance-comparison constant per snapshot",
            )?);
            report.flags.push(CheckFlag {
                name: "harnack_c0".into(),
                passed: !degenerate && worst <= *c0_max,
                tolerance_name: "c0_max".into(),
                tolerance: *c0_max,
                observed: worst,
                message: if degenerate {
                    "a snapshot lost two-sided comparability with the boundary distance".into()
                } else {
                    "largest two-sided comparability constant over the window".into()
                },
            });
        }
        DiagnosticSpec::CurvatureRoutes { max_route_gap } => {
            let mut points = Vec::new();
            let mut worst = 0.0f64;
            let mut masked_max = 0.0f64;
            for k in 0..traj.len().saturating_sub(1) {
                let dt = traj.times[k + 1] - traj.times[k];
                let field = curvature_r(
                    &traj.snapshots[k],
                    traj.p,
                    traj.b,
                    Some((&traj.snapshots[k + 1], dt)),
                )?;
                masked_max = masked_max.max(field.masked_fraction);
                if let Some(gap) = field.route_discrepancy() {
                    worst = worst.max(gap);
                    points.push((traj.times[k], gap));
                }
            }
            if points.is_empty() {
                return Err(FdeError::Estimation(
                    "no snapshot pair produced comparable curvature routes".into(),
                ));
            }
            report.insert_series(TimeSeries::new(
                "curvature_route_gap",
                points,
                "sup over unmasked nodes of |elliptic − time-derivative| curvature",
            )?);
            report
                .constants
                .insert("curvature_masked_fraction_max".into(), masked_max);
            report.flags.push(CheckFlag {
                name: "curvature_route_agreement".into(),
                passed: worst <= *max_route_gap,
                tolerance_name: "max_route_gap".into(),
                tolerance: *max_route_gap,
                observed: worst,
                message: "agreement of the two curvature evaluation routes".into(),
            });
        }
        DiagnosticSpec::Moments {
            q,
            max_late_growth,
        } => {
            let t_end = *traj.times.last().unwrap();
            for &qi in q {
                let moments = moments_mq(traj, qi)?;
                let early = moments.series.max_on(t_end * 0.25, t_end * 0.5);
                let late = moments.series.max_on(t_end * 0.5, t_end);
                let name = format!("moments_{}_bounded", moments.series.name);
                let passed = late.is_finite()
                    && early.is_finite()
                    && (late <= *max_late_growth * early || late <= 1e-12);
                report.flags.push(CheckFlag {
                    name,
                    passed,
                    tolerance_name: "max_late_growth".into(),
                    tolerance: *max_late_growth,
                    observed: if early > 0.0 { late / early } else { 0.0 },
                    message: "second-half sup over second-quarter sup of the moment".into(),
                });
                report
                    .constants
                    .insert(
                        format!("{}_masked_fraction_max", moments.series.name),
                        moments.masked_fraction_max,
                    );
                report.insert_series(moments.series);
            }
        }
        DiagnosticSpec::TimeDerivativeBound => {
            let margin = benilan_crandall_margin(traj)?;
            let worst = margin.max_value();
            report.flags.push(CheckFlag {
                name: "time_derivative_bound".into(),
                passed: worst <= 0.0,
                tolerance_name: "nonpositive_margin".into(),
                tolerance: 0.0,
                observed: worst,
                message: "largest margin of the universal time-derivative bound".into(),
            });
            report.insert_series(margin);
        }
        DiagnosticSpec::ConvergenceRate { min_r2, robust } => {
            let fit = convergence_rate(traj, steady.unwrap(), *robust)?;
            report.flags.push(CheckFlag {
                name: "convergence_rate".into(),
                passed: !fit.refused && fit.gamma_sup > 0.0 && fit.r2 >= *min_r2,
                tolerance_name: "min_r2".into(),
                tolerance: *min_r2,
                observed: fit.r2,
                message: if fit.refused {
                    "the error tail was too short or too shallow for a trustworthy fit".into()
                } else {
                    format!(
                        "fitted decay rate {} (weighted {}) over t ∈ [{}, {}]",
                        fit.gamma_sup, fit.gamma_weighted, fit.window.0, fit.window.1
                    )
                },
            });
            if !fit.refused {
                report.constants.insert("gamma_sup".into(), fit.gamma_sup);
                report
                    .constants
                    .insert("gamma_weighted".into(), fit.gamma_weighted);
                report.constants.insert("rate_fit_r2".into(), fit.r2);
            }
            report.insert_series(fit.sup_error);
            report.insert_series(fit.weighted_error);
        }
        DiagnosticSpec::ScalingEnvelope { orders } => {
            let estimate = estimate_extinction_time(traj)?;
            let tstar = estimate.tstar;
            let cut = (tstar * (1.0 - 1e-3)).min(tstar - 5.0 * traj.dt_policy.dt);
            let usable = traj.restrict_to_time(cut);
            if usable.len() < 3 {
                return Err(FdeError::Estimation(
                    "too few snapshots strictly before the estimated extinction time".into(),
                ));
            }
            report.constants.insert("tstar_estimate".into(), tstar);
            report
                .constants
                .insert("tstar_fit_r2".into(), estimate.r2);
            for &l in orders {
                let env = scaling_envelope(&usable, tstar, l)?;
                report.flags.push(CheckFlag {
                    name: format!("scaling_envelope_C{l}_finite"),
                    passed: env.sup.is_finite() && env.sup > 0.0,
                    tolerance_name: "finite".into(),
                    tolerance: f64::INFINITY,
                    observed: env.sup,
                    message: format!(
                        "envelope constant over t ∈ [{}, {}]",
                        env.window.0, env.window.1
                    ),
                });
                report
                    .constants
                    .insert(format!("envelope_C{l}"), env.sup);
                report.insert_series(env.series);
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Functional-inequality pipeline.
// ---------------------------------------------------------------------------

fn default_funcineq_grid() -> Result<Arc<Grid<f64>>, FdeError> {
    build_grid(1, &[[0.0, 1.0]], &[33])
}

/// Smooth Dirichlet profile ∏(x−lo)(hi−x) used for the refinement series.
fn smooth_profile(grid: &Arc<Grid<f64>>) -> GridFunction<f64> {
    let d = grid.dimension();
    let extents: Vec<[f64; 2]> = (0..d).map(|a| grid.extent(a)).collect();
    GridFunction::sample(grid, true, move |pos| {
        (0..d)
            .map(|a| (pos[a] - extents[a][0]) * (extents[a][1] - pos[a]))
            .product()
    })
}

fn execute_funcineq(
    exp: &ExperimentConfig,
    dir: &Path,
    seed: u64,
) -> Result<DiagnosticsReport, FdeError> {
    let p = exp.p.unwrap();
    let mut report = DiagnosticsReport::default();

    // Integrability exponents across dimensions at this p.
    for n in 1..=4usize {
        let pack = chi_exponent(n, p)?;
        report.constants.insert(format!("chi_n{n}"), pack.chi);
        if let Some(s) = pack.s {
            report.constants.insert(format!("hardy_s_n{n}"), s);
        }
    }

    // Space-time Sobolev quotient over the seeded family.
    let default_grid = exp.grid.is_none();
    let grid = match &exp.grid {
        Some(spec) => spec.build()?,
        None => default_funcineq_grid()?,
    };
    let levels = 9usize;
    let times: Vec<f64> = (0..levels).map(|k| k as f64 / (levels - 1) as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0f64;
    for _ in 0..100 {
        let sample: Vec<Vec<f64>> = times
            .iter()
            .map(|_| {
                (0..grid.node_count())
                    .map(|i| {
                        if grid.is_boundary(i) {
                            0.0
                        } else {
                            rng.gen_range(0.0..1.0)
                        }
                    })
                    .collect()
            })
            .collect();
        let f = SpaceTimeFunction::new(grid.clone(), times.clone(), sample)?;
        max_ratio = max_ratio.max(weighted_sobolev_ratio(&f, p)?);
    }
    let mut refinement = Vec::new();
    for factor in [1usize, 2] {
        let spec = GridSpec::of(&grid);
        let n: Vec<usize> = spec.n.iter().map(|&n| factor * (n - 1) + 1).collect();
        let fine = build_grid(spec.dimension, &spec.extents, &n)?;
        let profile = smooth_profile(&fine);
        let st = SpaceTimeFunction::new(
            fine.clone(),
            times.clone(),
            vec![profile.values().to_vec(); times.len()],
        )?;
        let value = weighted_sobolev_ratio(&st, p)?;
        max_ratio = max_ratio.max(value);
        refinement.push(RefinementPoint {
            label: format!("n={}", n.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("x")),
            value,
        });
    }
    write_json(
        &dir.join("sobolev_ratio.json"),
        &NormEvaluation {
            value: max_ratio,
            policy: serde_json::json!({
                "random_samples": 100,
                "seed": seed,
                "grid": GridSpec::of(&grid),
                "time_levels": levels,
                "p": p,
                "smooth_profile": "product of per-axis boundary parabolas",
            }),
            refinement_series: refinement,
        },
    )?;
    report.constants.insert("sobolev_ratio_max".into(), max_ratio);
    // The recorded ceiling was measured for the default family at p = 2;
    // other settings report the value without asserting against it.
    if default_grid && p == 2.0 {
        report.flags.push(CheckFlag {
            name: "sobolev_ratio_ceiling".into(),
            passed: max_ratio <= frozen::WEIGHTED_SOBOLEV_CONSTANT,
            tolerance_name: "WEIGHTED_SOBOLEV_CONSTANT".into(),
            tolerance: frozen::WEIGHTED_SOBOLEV_CONSTANT,
            observed: max_ratio,
            message: "largest space-time Sobolev quotient over the seeded family".into(),
        });
    }

    // ODE comparison bound against the saturated-trajectory oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all_dominated = true;
    let mut worst_ratio = 0.0f64;
    for case in 0..50 {
        let alpha = rng.gen_range(0.2..1.5);
        let mu1 = rng.gen_range(0.3..1.5);
        let mu2 = rng.gen_range(0.0..0.9);
        let mu3 = if case % 5 == 0 {
            1.0
        } else {
            rng.gen_range(0.0..1.0)
        };
        let zeta0 = rng.gen_range(0.05..1.5);
        let integral = rng.gen_range(0.1..1.5);
        let bound = ode_bound(alpha, mu1, mu2, mu3, zeta0, integral)?;
        let sup = ode_oracle_sup(alpha, mu1, mu2, mu3, zeta0, integral)?;
        all_dominated &= sup <= bound;
        worst_ratio = worst_ratio.max(sup / bound);
    }
    write_json(
        &dir.join("ode_domination.json"),
        &NormEvaluation {
            value: worst_ratio,
            policy: serde_json::json!({
                "tuples": 50,
                "seed": seed,
                "alpha": [0.2, 1.5],
                "mu1": [0.3, 1.5],
                "mu2": [0.0, 0.9],
                "mu3": "uniform [0,1), every fifth case pinned to 1",
                "zeta0": [0.05, 1.5],
                "integral": [0.1, 1.5],
            }),
            refinement_series: Vec::new(),
        },
    )?;
    report.flags.push(CheckFlag {
        name: "ode_domination".into(),
        passed: all_dominated,
        tolerance_name: "oracle_below_bound".into(),
        tolerance: 1.0,
        observed: worst_ratio,
        message: "largest oracle-sup / bound ratio over the seeded tuples".into(),
    });
    Ok(report)
}
