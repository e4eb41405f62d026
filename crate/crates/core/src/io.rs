//! Artifact persistence: node-value CSV for grid functions, directory
//! layout for trajectories, `t,value` CSV for time series, pretty JSON for
//! reports and sidecars, and SHA-256 content hashing for run manifests.
//!
//! Every float is printed with Rust's shortest round-trip formatting, so a
//! written artifact parses back to bitwise-identical values and identical
//! runs produce byte-identical files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::TimeSeries;
use crate::domain::{build_grid, Grid, GridFunction};
use crate::error::FdeError;
use crate::evolve::{DtPolicy, Frame, Trajectory};
use crate::steady::{EigenPair, SteadyState};

// ---------------------------------------------------------------------------
// Grid specification (the serializable form of a Grid).
// ---------------------------------------------------------------------------

/// Lattice descriptor: dimension, per-axis extents, per-axis node counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dimension: usize,
    pub extents: Vec<[f64; 2]>,
    pub n: Vec<usize>,
}

impl GridSpec {
    pub fn of(grid: &Grid<f64>) -> GridSpec {
        let d = grid.dimension();
        GridSpec {
            dimension: d,
            extents: (0..d).map(|a| grid.extent(a)).collect(),
            n: (0..d).map(|a| grid.nodes_per_axis(a)).collect(),
        }
    }

    pub fn build(&self) -> Result<Arc<Grid<f64>>, FdeError> {
        build_grid(self.dimension, &self.extents, &self.n)
    }
}

// ---------------------------------------------------------------------------
// Grid-function CSV.
// ---------------------------------------------------------------------------

/// Shortest decimal that parses back to the same f64.
fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Writes `x[,y],value` rows, one node per row in lattice index order.
pub fn write_grid_function(path: &Path, f: &GridFunction<f64>) -> Result<(), FdeError> {
    let grid = f.grid();
    let mut out = String::new();
    match grid.dimension() {
        1 => out.push_str("x,value\n"),
        _ => out.push_str("x,y,value\n"),
    }
    for i in 0..grid.node_count() {
        let [x, y] = grid.position(i);
        match grid.dimension() {
            1 => out.push_str(&format!("{},{}\n", fmt(x), fmt(f.values()[i]))),
            _ => out.push_str(&format!(
                "{},{},{}\n",
                fmt(x),
                fmt(y),
                fmt(f.values()[i])
            )),
        }
    }
    fs::write(path, out)?;
    Ok(())
}

fn parse_f64(field: &str, path: &Path, line: usize) -> Result<f64, FdeError> {
    field.trim().parse::<f64>().map_err(|_| {
        FdeError::Contract(format!(
            "{}:{line}: `{field}` is not a number",
            path.display()
        ))
    })
}

/// Reads a node-value CSV back into a grid function, reconstructing the
/// lattice from the coordinate columns and verifying the row order matches
/// the lattice index order.
pub fn read_grid_function(path: &Path) -> Result<GridFunction<f64>, FdeError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| FdeError::Contract(format!("{}: empty file", path.display())))?;
    let dimension = match header.trim() {
        "x,value" => 1,
        "x,y,value" => 2,
        other => {
            return Err(FdeError::Contract(format!(
                "{}: unrecognized header `{other}`",
                path.display()
            )))
        }
    };
    let mut coords: Vec<[f64; 2]> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dimension + 1 {
            return Err(FdeError::Contract(format!(
                "{}:{}: expected {} fields, got {}",
                path.display(),
                k + 2,
                dimension + 1,
                fields.len()
            )));
        }
        let x = parse_f64(fields[0], path, k + 2)?;
        let y = if dimension == 2 {
            parse_f64(fields[1], path, k + 2)?
        } else {
            0.0
        };
        coords.push([x, y]);
        values.push(parse_f64(fields[dimension], path, k + 2)?);
    }
    if coords.is_empty() {
        return Err(FdeError::Contract(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    let grid = reconstruct_grid(dimension, &coords, path)?;
    GridFunction::from_values(grid, values)
}

fn reconstruct_grid(
    dimension: usize,
    coords: &[[f64; 2]],
    path: &Path,
) -> Result<Arc<Grid<f64>>, FdeError> {
    let mut axes: Vec<Vec<f64>> = Vec::new();
    for axis in 0..dimension {
        let mut vals: Vec<f64> = coords.iter().map(|c| c[axis]).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.dedup();
        axes.push(vals);
    }
    let n: Vec<usize> = axes.iter().map(|a| a.len()).collect();
    if n.iter().product::<usize>() != coords.len() {
        return Err(FdeError::Contract(format!(
            "{}: rows do not fill a {}-axis lattice",
            path.display(),
            dimension
        )));
    }
    let extents: Vec<[f64; 2]> = axes.iter().map(|a| [a[0], *a.last().unwrap()]).collect();
    let grid = build_grid(dimension, &extents, &n)?;
    let scale: f64 = extents
        .iter()
        .map(|e| (e[1] - e[0]).abs())
        .fold(1.0, f64::max);
    for (i, c) in coords.iter().enumerate() {
        let p = grid.position(i);
        if (p[0] - c[0]).abs() > 1e-12 * scale || (p[1] - c[1]).abs() > 1e-12 * scale {
            return Err(FdeError::Contract(format!(
                "{}: row {} is out of lattice index order",
                path.display(),
                i + 2
            )));
        }
    }
    Ok(grid)
}

// ---------------------------------------------------------------------------
// Time-series CSV.
// ---------------------------------------------------------------------------

/// Writes `t,value` rows.
pub fn write_time_series(path: &Path, series: &TimeSeries) -> Result<(), FdeError> {
    let mut out = String::from("t,value\n");
    for &(t, v) in &series.points {
        out.push_str(&format!("{},{}\n", fmt(t), fmt(v)));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_time_series(path: &Path, name: &str) -> Result<TimeSeries, FdeError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "t,value" => {}
        other => {
            return Err(FdeError::Contract(format!(
                "{}: expected `t,value` header, got {other:?}",
                path.display()
            )))
        }
    }
    let mut points = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(FdeError::Contract(format!(
                "{}:{}: expected 2 fields",
                path.display(),
                k + 2
            )));
        }
        points.push((
            parse_f64(fields[0], path, k + 2)?,
            parse_f64(fields[1], path, k + 2)?,
        ));
    }
    TimeSeries::new(name, points, "")
}

// ---------------------------------------------------------------------------
// JSON documents.
// ---------------------------------------------------------------------------

/// Pretty JSON with a trailing newline; map keys come from ordered
/// containers, so the bytes are deterministic.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FdeError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FdeError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

// ---------------------------------------------------------------------------
// Trajectory directories.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryMeta {
    frame: Frame,
    p: f64,
    b: f64,
    dt_policy: DtPolicy,
    grid: GridSpec,
    snapshot_count: usize,
}

/// Lays out `meta.json`, `times.csv` (`k,t` rows), and one `snap_<k>.csv`
/// per snapshot under `dir`, creating the directory if needed.
pub fn write_trajectory(dir: &Path, traj: &Trajectory) -> Result<(), FdeError> {
    if traj.is_empty() {
        return Err(FdeError::Contract(
            "refusing to persist an empty trajectory".into(),
        ));
    }
    fs::create_dir_all(dir)?;
    let meta = TrajectoryMeta {
        frame: traj.frame,
        p: traj.p,
        b: traj.b,
        dt_policy: traj.dt_policy.clone(),
        grid: GridSpec::of(traj.snapshots[0].grid()),
        snapshot_count: traj.len(),
    };
    write_json(&dir.join("meta.json"), &meta)?;
    let mut times = String::from("k,t\n");
    for (k, &t) in traj.times.iter().enumerate() {
        times.push_str(&format!("{k},{}\n", fmt(t)));
    }
    fs::write(dir.join("times.csv"), times)?;
    for (k, snap) in traj.snapshots.iter().enumerate() {
        write_grid_function(&dir.join(format!("snap_{k}.csv")), snap)?;
    }
    Ok(())
}

pub fn read_trajectory(dir: &Path) -> Result<Trajectory, FdeError> {
    let meta: TrajectoryMeta = read_json(&dir.join("meta.json"))?;
    let grid = meta.grid.build()?;
    let times_path = dir.join("times.csv");
    let text = fs::read_to_string(&times_path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "k,t" => {}
        other => {
            return Err(FdeError::Contract(format!(
                "{}: expected `k,t` header, got {other:?}",
                times_path.display()
            )))
        }
    }
    let mut times = Vec::new();
    for (row, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 || fields[0].trim().parse::<usize>() != Ok(row) {
            return Err(FdeError::Contract(format!(
                "{}:{}: snapshot indices must run 0,1,2,...",
                times_path.display(),
                row + 2
            )));
        }
        times.push(parse_f64(fields[1], &times_path, row + 2)?);
    }
    if times.len() != meta.snapshot_count {
        return Err(FdeError::Contract(format!(
            "{}: meta declares {} snapshots but times.csv lists {}",
            dir.display(),
            meta.snapshot_count,
            times.len()
        )));
    }
    let mut snapshots = Vec::with_capacity(times.len());
    for k in 0..times.len() {
        let snap = read_grid_function(&dir.join(format!("snap_{k}.csv")))?;
        snap.check_same_grid(&GridFunction::zeros(&grid))?;
        snapshots.push(snap);
    }
    Ok(Trajectory {
        frame: meta.frame,
        p: meta.p,
        b: meta.b,
        times,
        snapshots,
        dt_policy: meta.dt_policy,
    })
}

// ---------------------------------------------------------------------------
// Profile sidecars (steady states and eigenpairs).
// ---------------------------------------------------------------------------

/// JSON companion to a profile CSV: solver parameters and residual
/// provenance. `lambda` is present for eigenpairs only.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSidecar {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
    pub b: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    pub residual_norm: f64,
    pub method: String,
}

/// Writes `<base>.csv` (the profile) and `<base>.json` (the sidecar).
pub fn write_steady_state(base: &Path, steady: &SteadyState) -> Result<(), FdeError> {
    write_grid_function(&base.with_extension("csv"), &steady.s)?;
    let sidecar = ProfileSidecar {
        p: Some(steady.p),
        b: steady.b,
        lambda: None,
        residual_norm: steady.residual_norm,
        method: format!("{:?}", steady.method).to_lowercase(),
    };
    write_json(&base.with_extension("json"), &sidecar)
}

pub fn write_eigen_pair(base: &Path, pair: &EigenPair, b: f64) -> Result<(), FdeError> {
    write_grid_function(&base.with_extension("csv"), &pair.psi)?;
    let sidecar = ProfileSidecar {
        p: None,
        b,
        lambda: Some(pair.lambda),
        residual_norm: pair.residual_norm,
        method: "inverse_power".into(),
    };
    write_json(&base.with_extension("json"), &sidecar)
}

// ---------------------------------------------------------------------------
// Norm evaluations.
// ---------------------------------------------------------------------------

/// Exported form of one functional-inequality evaluation: the value, the
/// sampling/evaluation policy that produced it, and the refinement series
/// backing its convergence claim.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormEvaluation {
    pub value: f64,
    pub policy: serde_json::Value,
    pub refinement_series: Vec<RefinementPoint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinementPoint {
    /// Resolution label, e.g. `n=101`.
    pub label: String,
    pub value: f64,
}

// ---------------------------------------------------------------------------
// Content hashing.
// ---------------------------------------------------------------------------

pub fn sha256_hex(path: &Path) -> Result<String, FdeError> {
    let bytes = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

/// Relative path → SHA-256 of every regular file under `dir`, sorted by
/// path (BTreeMap), for embedding in run reports.
pub fn manifest_for_dir(dir: &Path) -> Result<BTreeMap<String, String>, FdeError> {
    let mut manifest = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let mut entries: Vec<PathBuf> = fs::read_dir(&d)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()?;
        entries.sort();
        for path in entries {
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(dir)
                    .map_err(|_| FdeError::Contract("path escapes the manifest root".into()))?
                    .to_string_lossy()
                    .replace('\\', "/");
                manifest.insert(rel, sha256_hex(&path)?);
            }
        }
    }
    Ok(manifest)
}

/// Writes `manifest.json` under `dir` covering every other file in it.
pub fn write_manifest(dir: &Path) -> Result<BTreeMap<String, String>, FdeError> {
    let manifest = manifest_for_dir(dir)?;
    let path = dir.join("manifest.json");
    let mut file = fs::File::create(&path)?;
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    file.write_all(text.as_bytes())?;
    Ok(manifest)
}
