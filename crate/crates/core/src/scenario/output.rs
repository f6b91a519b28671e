//! Artifact files: node snapshots, the time series, polylines and meshes.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which reads back
//! to the identical `f64`. Lines end in `\n` on every platform.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::ScenarioError;
use crate::geometry::Vec3;
use crate::solver::SeriesRow;
use crate::surface::ParametricSurface;

pub const SNAPSHOT_HEADER_3D: &str = "k,u,x1,x2,x3";
pub const SNAPSHOT_HEADER_2D: &str = "k,u,y1,y2";
pub const SERIES_COLUMNS: [&str; 8] = [
    "t",
    "dt",
    "L",
    "max_f_abs",
    "phi_l2",
    "mean_kv",
    "dispersion",
    "dl_dt_identity",
];
pub const METRIC_COLUMNS: [&str; 2] = ["det_min", "det_max"];

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ScenarioError + '_ {
    move |source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn num(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").expect("writing to a String");
}

/// CSV text of one snapshot. `dim` is 3 for curves in space and 2 for curves
/// in the parameter square; `state` holds the node coordinates back to back.
pub fn snapshot_csv(state: &[f64], dim: usize) -> String {
    let m = state.len() / dim;
    let mut out = String::with_capacity(m * (dim + 1) * 24);
    out.push_str(if dim == 3 { SNAPSHOT_HEADER_3D } else { SNAPSHOT_HEADER_2D });
    out.push('\n');
    for (k, node) in state.chunks_exact(dim).enumerate() {
        write!(out, "{k},").expect("writing to a String");
        num(&mut out, k as f64 / m as f64);
        for c in node {
            out.push(',');
            num(&mut out, *c);
        }
        out.push('\n');
    }
    out
}

pub fn write_snapshot(path: &Path, state: &[f64], dim: usize) -> Result<(), ScenarioError> {
    fs::write(path, snapshot_csv(state, dim)).map_err(io_err(path))
}

/// Node coordinates of a snapshot file, flattened, and their dimension.
pub fn read_snapshot(path: &Path) -> Result<(Vec<f64>, usize), ScenarioError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    let dim = match lines.next() {
        Some(SNAPSHOT_HEADER_3D) => 3,
        Some(SNAPSHOT_HEADER_2D) => 2,
        other => {
            return Err(ScenarioError::Parse(format!(
                "{}: unexpected snapshot header {other:?}",
                path.display()
            )))
        }
    };
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 2 {
            return Err(ScenarioError::Parse(format!("{}: line {} has {} fields", path.display(), i + 2, fields.len())));
        }
        for f in &fields[2..] {
            values.push(f.parse::<f64>().map_err(|e| {
                ScenarioError::Parse(format!("{}: line {}: {e}", path.display(), i + 2))
            })?);
        }
    }
    Ok((values, dim))
}

pub fn series_csv(rows: &[SeriesRow], with_metric: bool) -> String {
    let mut out = SERIES_COLUMNS.join(",");
    if with_metric {
        out.push(',');
        out.push_str(&METRIC_COLUMNS.join(","));
    }
    out.push('\n');
    for r in rows {
        let d = &r.diag;
        let mut fields = vec![r.t, r.dt, d.length, d.max_f_abs, d.phi_l2, d.mean_kv, d.dispersion, d.dl_dt_identity];
        if with_metric {
            let (lo, hi) = d.metric_det.unwrap_or((f64::NAN, f64::NAN));
            fields.extend([lo, hi]);
        }
        for (i, x) in fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            num(&mut out, *x);
        }
        out.push('\n');
    }
    out
}

/// A parsed series file: column names and rows of values.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SeriesTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn read_series(path: &Path) -> Result<SeriesTable, ScenarioError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    let columns: Vec<String> = lines
        .next()
        .ok_or_else(|| ScenarioError::Parse(format!("{}: empty series file", path.display())))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ScenarioError::Parse(format!("{}: line {}: {e}", path.display(), i + 2)))?;
        if row.len() != columns.len() {
            return Err(ScenarioError::Parse(format!("{}: line {} has {} fields", path.display(), i + 2, row.len())));
        }
        rows.push(row);
    }
    Ok(SeriesTable { columns, rows })
}

/// Closed polyline in Wavefront OBJ form.
pub fn polyline_obj(nodes: &[Vec3]) -> String {
    let mut out = String::new();
    for x in nodes {
        out.push('v');
        for c in x.iter() {
            out.push(' ');
            num(&mut out, *c);
        }
        out.push('\n');
    }
    out.push('l');
    for k in 1..=nodes.len() {
        write!(out, " {k}").expect("writing to a String");
    }
    out.push_str(" 1\n");
    out
}

/// Triangulated `n × n` grid of a doubly periodic map, as OBJ.
pub fn grid_mesh_obj<F: Fn(f64, f64) -> Vec3>(map: F, n: usize) -> String {
    let mut out = String::new();
    for i in 0..n {
        for j in 0..n {
            let x = map(i as f64 / n as f64, j as f64 / n as f64);
            out.push('v');
            for c in x.iter() {
                out.push(' ');
                num(&mut out, *c);
            }
            out.push('\n');
        }
    }
    let id = |i: usize, j: usize| (i % n) * n + (j % n) + 1;
    for i in 0..n {
        for j in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            writeln!(out, "f {a} {b} {c}").expect("writing to a String");
            writeln!(out, "f {a} {c} {d}").expect("writing to a String");
        }
    }
    out
}

pub fn parametric_mesh_obj(surface: &dyn ParametricSurface, n: usize) -> String {
    grid_mesh_obj(|u, v| surface.chi(&crate::geometry::Vec2::new(u, v)), n)
}

/// Mesh of `X1² + X2² + c²(X3 − φ(X1, X2))² = r²` through the spherical
/// angles of `(X1, X2, c(X3 − φ))`. Poles are shared by their latitude rows.
pub fn graph_sphere_mesh_obj<P: Fn(f64, f64) -> f64>(radius: f64, stiffness: f64, phi: P, n: usize) -> String {
    grid_mesh_obj(
        |u, v| {
            // v ∈ [0, 1) spans the polar angle twice, so reflect the second half
            let theta = PI * (2.0 * v).min(2.0 - 2.0 * v);
            let (st, ct) = theta.sin_cos();
            let (sp, cp) = (2.0 * PI * u).sin_cos();
            let (x1, x2) = (radius * st * cp, radius * st * sp);
            Vec3::new(x1, x2, radius * ct / stiffness + phi(x1, x2))
        },
        n,
    )
}
