//! Run-configuration schema: a versioned JSON document listing independent
//! experiments. Parsing is strict — unknown fields, wrong types, and
//! out-of-range parameters are hard errors carrying the offending field
//! path (e.g. `experiments[0].p`) so a config can be fixed without reading
//! solver output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::FdeError;
use crate::evolve::DtPolicy;
use crate::io::GridSpec;
use crate::steady::InitialDataKind;

/// The one schema version this build understands.
pub const SCHEMA_VERSION: u32 = 1;

/// Default RNG seed when the config omits one.
pub const DEFAULT_SEED: u64 = 0xFDE0;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Top-level document: schema version, seed for the randomized suites,
/// optional output root, and the experiment list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub experiments: Vec<ExperimentConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Solve the stationary profile and persist it with its sidecar.
    Steady,
    /// Run the extinction flow in original variables.
    EvolveBase,
    /// Run the rescaled flow toward the stationary profile.
    EvolveRescaled,
    /// Re-run diagnostics over a previously written trajectory directory.
    Diagnose,
    /// Evaluate the functional-inequality suite at the given p.
    Funcineq,
}

/// One experiment. Which fields are required depends on `kind`; supplying a
/// field the kind does not consume is a schema error, so configs cannot
/// silently carry dead parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Directory-safe label; artifacts land under `<output_dir>/<name>/`.
    pub name: String,
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Linear zero-order coefficient; must stay below the principal
    /// eigenvalue, which only the solver can check (a runtime error, not a
    /// schema error).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialDataKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<DtPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Existing trajectory directory (`diagnose` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<DiagnosticSpec>,
}

impl ExperimentConfig {
    pub fn b_or_default(&self) -> f64 {
        self.b.unwrap_or(0.0)
    }
}

fn default_dissipation_rel() -> f64 {
    0.05
}
fn default_c0_max() -> f64 {
    10.0
}
fn default_from_time() -> f64 {
    0.0
}
fn default_route_gap() -> f64 {
    1e-2
}
fn default_qs() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}
fn default_growth() -> f64 {
    2.0
}
fn default_min_r2() -> f64 {
    0.95
}
fn default_orders() -> Vec<usize> {
    vec![0, 1]
}

/// One requested check with its tolerance knobs. Defaults match the
/// laboratory's standard gates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum DiagnosticSpec {
    /// Energy is non-increasing and the discrete dissipation identity holds
    /// to `max_mid_run_relative` at the middle snapshot.
    Dissipation {
        #[serde(default = "default_dissipation_rel")]
        max_mid_run_relative: f64,
    },
    /// Two-sided comparability of the state with the boundary distance:
    /// c₀ ≤ `c0_max` at every snapshot with t ≥ `from_time`.
    Harnack {
        #[serde(default = "default_c0_max")]
        c0_max: f64,
        #[serde(default = "default_from_time")]
        from_time: f64,
    },
    /// Elliptic and time-derivative curvature routes agree within
    /// `max_route_gap` on unmasked nodes (rescaled trajectories).
    CurvatureRoutes {
        #[serde(default = "default_route_gap")]
        max_route_gap: f64,
    },
    /// Late-time boundedness of the curvature moments: for each q, the sup
    /// over the second half of the run is at most `max_late_growth` times
    /// the sup over the second quarter.
    Moments {
        #[serde(default = "default_qs")]
        q: Vec<f64>,
        #[serde(default = "default_growth")]
        max_late_growth: f64,
    },
    /// The universal time-derivative upper bound holds at every snapshot
    /// (margin ≤ 0).
    TimeDerivativeBound,
    /// Exponential convergence toward the stationary profile: positive
    /// fitted rate with R² ≥ `min_r2`.
    ConvergenceRate {
        #[serde(default = "default_min_r2")]
        min_r2: f64,
        #[serde(default)]
        robust: bool,
    },
    /// Finite boundary-scaling envelope constants for the requested
    /// time-derivative orders (base trajectories).
    ScalingEnvelope {
        #[serde(default = "default_orders")]
        orders: Vec<usize>,
    },
}

impl DiagnosticSpec {
    /// Stable label used in reports and flag names.
    pub fn label(&self) -> &'static str {
        match self {
            DiagnosticSpec::Dissipation { .. } => "dissipation",
            DiagnosticSpec::Harnack { .. } => "harnack",
            DiagnosticSpec::CurvatureRoutes { .. } => "curvature_routes",
            DiagnosticSpec::Moments { .. } => "moments",
            DiagnosticSpec::TimeDerivativeBound => "time_derivative_bound",
            DiagnosticSpec::ConvergenceRate { .. } => "convergence_rate",
            DiagnosticSpec::ScalingEnvelope { .. } => "scaling_envelope",
        }
    }
}

fn config_err(path: String, message: impl Into<String>) -> FdeError {
    FdeError::Config {
        path,
        message: message.into(),
    }
}

impl RunConfig {
    /// Strict parse + semantic validation.
    pub fn parse(text: &str) -> Result<RunConfig, FdeError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let config: RunConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = match e.path().to_string().as_str() {
                "." => "<document root>".to_string(),
                p => p.to_string(),
            };
            config_err(path, e.inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<RunConfig, FdeError> {
        let text = fs::read_to_string(path)?;
        RunConfig::parse(&text)
    }

    fn validate(&self) -> Result<(), FdeError> {
        if self.schema != SCHEMA_VERSION {
            return Err(config_err(
                "schema".into(),
                format!(
                    "unsupported schema version {}; this build reads version {SCHEMA_VERSION}",
                    self.schema
                ),
            ));
        }
        if self.experiments.is_empty() {
            return Err(config_err(
                "experiments".into(),
                "the experiment list must not be empty",
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, exp) in self.experiments.iter().enumerate() {
            exp.validate(&format!("experiments[{i}]"))?;
            if !seen.insert(exp.name.clone()) {
                return Err(config_err(
                    format!("experiments[{i}].name"),
                    format!("duplicate experiment name `{}`", exp.name),
                ));
            }
        }
        Ok(())
    }
}

impl ExperimentConfig {
    fn validate(&self, at: &str) -> Result<(), FdeError> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(config_err(
                format!("{at}.name"),
                "names must be nonempty and use only [A-Za-z0-9_-] (they become directories)",
            ));
        }
        if let Some(p) = self.p {
            if !(p > 1.0) || !p.is_finite() {
                return Err(config_err(
                    format!("{at}.p"),
                    format!("p must be a finite number exceeding 1, got {p}"),
                ));
            }
        }
        if let Some(b) = self.b {
            if !b.is_finite() {
                return Err(config_err(format!("{at}.b"), "b must be finite"));
            }
        }
        if let Some(g) = &self.grid {
            self.validate_grid(g, at)?;
        }
        if let Some(dt) = &self.dt {
            if !(dt.dt > 0.0) || !dt.dt.is_finite() {
                return Err(config_err(
                    format!("{at}.dt.dt"),
                    format!("the step must be positive and finite, got {}", dt.dt),
                ));
            }
            if !(dt.snapshot_interval > 0.0) || !dt.snapshot_interval.is_finite() {
                return Err(config_err(
                    format!("{at}.dt.snapshot_interval"),
                    "the snapshot interval must be positive and finite",
                ));
            }
            if let Some(hint) = dt.tstar_hint {
                if !(hint > 0.0) || !hint.is_finite() {
                    return Err(config_err(
                        format!("{at}.dt.tstar_hint"),
                        "the extinction hint must be positive and finite",
                    ));
                }
            }
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0) || !t.is_finite() {
                return Err(config_err(
                    format!("{at}.t_end"),
                    format!("t_end must be positive and finite, got {t}"),
                ));
            }
        }

        // Field applicability per kind: required fields must be present,
        // inapplicable fields must be absent.
        let need = |field: &str, present: bool| -> Result<(), FdeError> {
            if present {
                Ok(())
            } else {
                Err(config_err(
                    format!("{at}.{field}"),
                    format!("`{field}` is required for kind `{}`", kind_name(self.kind)),
                ))
            }
        };
        let forbid = |field: &str, present: bool| -> Result<(), FdeError> {
            if present {
                Err(config_err(
                    format!("{at}.{field}"),
                    format!(
                        "`{field}` does not apply to kind `{}`",
                        kind_name(self.kind)
                    ),
                ))
            } else {
                Ok(())
            }
        };
        match self.kind {
            ExperimentKind::Steady => {
                need("grid", self.grid.is_some())?;
                need("p", self.p.is_some())?;
                forbid("initial", self.initial.is_some())?;
                forbid("dt", self.dt.is_some())?;
                forbid("t_end", self.t_end.is_some())?;
                forbid("trajectory", self.trajectory.is_some())?;
                forbid("diagnostics", !self.diagnostics.is_empty())?;
            }
            ExperimentKind::EvolveBase => {
                need("grid", self.grid.is_some())?;
                need("p", self.p.is_some())?;
                need("initial", self.initial.is_some())?;
                need("dt", self.dt.is_some())?;
                forbid("trajectory", self.trajectory.is_some())?;
            }
            ExperimentKind::EvolveRescaled => {
                need("grid", self.grid.is_some())?;
                need("p", self.p.is_some())?;
                need("initial", self.initial.is_some())?;
                need("dt", self.dt.is_some())?;
                need("t_end", self.t_end.is_some())?;
                forbid("trajectory", self.trajectory.is_some())?;
            }
            ExperimentKind::Diagnose => {
                need("trajectory", self.trajectory.is_some())?;
                if self.diagnostics.is_empty() {
                    return Err(config_err(
                        format!("{at}.diagnostics"),
                        "`diagnose` without any requested check does nothing",
                    ));
                }
                forbid("grid", self.grid.is_some())?;
                forbid("p", self.p.is_some())?;
                forbid("b", self.b.is_some())?;
                forbid("initial", self.initial.is_some())?;
                forbid("dt", self.dt.is_some())?;
                forbid("t_end", self.t_end.is_some())?;
            }
            ExperimentKind::Funcineq => {
                need("p", self.p.is_some())?;
                forbid("initial", self.initial.is_some())?;
                forbid("dt", self.dt.is_some())?;
                forbid("t_end", self.t_end.is_some())?;
                forbid("trajectory", self.trajectory.is_some())?;
                forbid("diagnostics", !self.diagnostics.is_empty())?;
            }
        }
        for (j, d) in self.diagnostics.iter().enumerate() {
            d.validate(&format!("{at}.diagnostics[{j}]"))?;
        }
        Ok(())
    }

    fn validate_grid(&self, g: &GridSpec, at: &str) -> Result<(), FdeError> {
        if !(g.dimension == 1 || g.dimension == 2) {
            return Err(config_err(
                format!("{at}.grid.dimension"),
                format!("only dimensions 1 and 2 are supported, got {}", g.dimension),
            ));
        }
        if g.extents.len() != g.dimension || g.n.len() != g.dimension {
            return Err(config_err(
                format!("{at}.grid"),
                "extents and n must list one entry per axis",
            ));
        }
        for (axis, e) in g.extents.iter().enumerate() {
            if !(e[1] > e[0]) || !e[0].is_finite() || !e[1].is_finite() {
                return Err(config_err(
                    format!("{at}.grid.extents[{axis}]"),
                    "each extent must be a finite increasing pair",
                ));
            }
        }
        for (axis, &n) in g.n.iter().enumerate() {
            if n < 3 {
                return Err(config_err(
                    format!("{at}.grid.n[{axis}]"),
                    format!("need at least 3 nodes per axis, got {n}"),
                ));
            }
        }
        Ok(())
    }
}

impl DiagnosticSpec {
    fn validate(&self, at: &str) -> Result<(), FdeError> {
        match self {
            DiagnosticSpec::Dissipation {
                max_mid_run_relative,
            } => {
                if !(*max_mid_run_relative > 0.0) {
                    return Err(config_err(
                        format!("{at}.max_mid_run_relative"),
                        "the relative tolerance must be positive",
                    ));
                }
            }
            DiagnosticSpec::Harnack { c0_max, from_time } => {
                if !(*c0_max >= 1.0) {
                    return Err(config_err(
                        format!("{at}.c0_max"),
                        "a two-sided comparability constant is at least 1",
                    ));
                }
                if !from_time.is_finite() || *from_time < 0.0 {
                    return Err(config_err(
                        format!("{at}.from_time"),
                        "from_time must be a nonnegative number",
                    ));
                }
            }
            DiagnosticSpec::CurvatureRoutes { max_route_gap } => {
                if !(*max_route_gap > 0.0) {
                    return Err(config_err(
                        format!("{at}.max_route_gap"),
                        "the route-agreement tolerance must be positive",
                    ));
                }
            }
            DiagnosticSpec::Moments {
                q,
                max_late_growth,
            } => {
                if q.is_empty() {
                    return Err(config_err(format!("{at}.q"), "list at least one moment"));
                }
                if q.iter().any(|&qi| !(qi >= 1.0)) {
                    return Err(config_err(
                        format!("{at}.q"),
                        "moment orders must be at least 1",
                    ));
                }
                if !(*max_late_growth >= 1.0) {
                    return Err(config_err(
                        format!("{at}.max_late_growth"),
                        "the admissible late-time growth factor is at least 1",
                    ));
                }
            }
            DiagnosticSpec::TimeDerivativeBound => {}
            DiagnosticSpec::ConvergenceRate { min_r2, .. } => {
                if !(*min_r2 > 0.0 && *min_r2 <= 1.0) {
                    return Err(config_err(
                        format!("{at}.min_r2"),
                        "R² thresholds live in (0, 1]",
                    ));
                }
            }
            DiagnosticSpec::ScalingEnvelope { orders } => {
                if orders.is_empty() || orders.iter().any(|&l| l > 1) {
                    return Err(config_err(
                        format!("{at}.orders"),
                        "supported derivative orders are 0 and 1",
                    ));
                }
            }
        }
        Ok(())
    }
}

fn kind_name(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Steady => "steady",
        ExperimentKind::EvolveBase => "evolve_base",
        ExperimentKind::EvolveRescaled => "evolve_rescaled",
        ExperimentKind::Diagnose => "diagnose",
        ExperimentKind::Funcineq => "funcineq",
    }
}
