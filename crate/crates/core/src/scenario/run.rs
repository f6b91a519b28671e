use std::fs;
use std::path::{Path, PathBuf};

use super::config::{to_toml, ErrorRecord, Formulation, OutputFormat, RunRecord, ScenarioConfig, SurfaceConfig};
use super::output::{
    graph_sphere_mesh_obj, io_err, parametric_mesh_obj, polyline_obj, series_csv, snapshot_csv,
};
use super::ScenarioError;
use crate::solver::{evolve, StopReason, Trajectory};
use crate::surface::{BumpSphere, BumpSurfaceParams, Klein, Torus, TorusParams};

pub const SERIES_FILE: &str = "series.csv";
pub const METADATA_FILE: &str = "metadata.toml";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const SURFACE_MESH_FILE: &str = "surface.obj";
const MESH_RESOLUTION: usize = 96;

/// Everything a finished run left on disk, plus the in-memory trajectory.
#[derive(Debug)]
pub struct RunArtifacts {
    pub directory: PathBuf,
    pub snapshots: Vec<PathBuf>,
    pub snapshot_times: Vec<f64>,
    pub series: PathBuf,
    pub metadata: PathBuf,
    pub surface_mesh: Option<PathBuf>,
    pub stop_reason: StopReason,
    pub trajectory: Trajectory,
}

pub fn snapshot_name(index: usize) -> String {
    format!("snapshot_{index:04}.csv")
}

/// Run a scenario and write its artifacts. A solver failure still writes
/// the series and a metadata file with the error record before returning
/// [`ScenarioError::Solver`].
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunArtifacts, ScenarioError> {
    let cfg = cfg.resolved();
    let (flow, y0) = cfg.build()?;
    let dir = cfg.output_dir();
    let snap_dir = dir.join(SNAPSHOT_DIR);
    if snap_dir.exists() {
        fs::remove_dir_all(&snap_dir).map_err(io_err(&snap_dir))?;
    }
    fs::create_dir_all(&snap_dir).map_err(io_err(&snap_dir))?;

    let dim = match cfg.formulation {
        Formulation::Embedded => 3,
        Formulation::Immersed => 2,
    };
    let with_obj = cfg.output.formats.contains(&OutputFormat::Obj);
    let with_csv = cfg.output.formats.contains(&OutputFormat::Csv);
    let mut snapshots = Vec::new();
    let mut times = Vec::new();
    let mut sink_error: Option<ScenarioError> = None;
    let mut sink = |t: f64, y: &[f64]| {
        if sink_error.is_some() {
            return;
        }
        let base = snap_dir.join(snapshot_name(times.len()));
        times.push(t);
        let mut write = |path: PathBuf, text: String| {
            if let Err(e) = fs::write(&path, text) {
                sink_error = Some(ScenarioError::Io { path, source: e });
            }
        };
        if with_csv {
            write(base.clone(), snapshot_csv(y, dim));
        }
        if with_obj {
            write(base.with_extension("obj"), polyline_obj(&flow.image(y)));
        }
        snapshots.push(base);
    };
    let trajectory = evolve(flow.as_ref(), y0, &cfg.solver, &mut sink);
    if let Some(e) = sink_error {
        return Err(e);
    }

    let series = dir.join(SERIES_FILE);
    fs::write(&series, series_csv(&trajectory.series, cfg.formulation == Formulation::Immersed))
        .map_err(io_err(&series))?;

    let stats = trajectory.state.stats;
    let record = RunRecord {
        status: if trajectory.outcome.is_ok() { "ok" } else { "error" }.into(),
        stop_reason: trajectory.outcome.as_ref().ok().map(|r| r.as_str().to_string()),
        t_final: trajectory.state.t,
        accepted_steps: stats.accepted,
        rejected_steps: stats.rejected,
        rhs_evaluations: stats.rhs_evals,
        snapshot_times: times.clone(),
        max_alpha_residual: trajectory.max_alpha_residual,
        error: trajectory.outcome.as_ref().err().map(|e| ErrorRecord {
            kind: e.kind().into(),
            message: e.to_string(),
            time: e.time(),
            node: e.node(),
        }),
        version: env!("CARGO_PKG_VERSION").into(),
    };
    let metadata = dir.join(METADATA_FILE);
    let meta = ScenarioConfig {
        run: Some(record),
        ..cfg.clone()
    };
    fs::write(&metadata, to_toml(&meta)?).map_err(io_err(&metadata))?;

    let surface_mesh = if cfg.output.surface_mesh {
        let path = dir.join(SURFACE_MESH_FILE);
        fs::write(&path, surface_mesh_obj(&cfg.surface)?).map_err(io_err(&path))?;
        Some(path)
    } else {
        None
    };

    let stop_reason = match &trajectory.outcome {
        Ok(r) => *r,
        Err(e) => return Err(ScenarioError::Solver(e.clone())),
    };
    Ok(RunArtifacts {
        directory: dir,
        snapshots,
        snapshot_times: times,
        series,
        metadata,
        surface_mesh,
        stop_reason,
        trajectory,
    })
}

/// The configuration and run record stored in a run directory.
pub fn read_metadata(dir: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let path = dir.join(METADATA_FILE);
    if !path.exists() {
        return Err(ScenarioError::MissingArtifact(path));
    }
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    toml::from_str(&text).map_err(|e| ScenarioError::Parse(format!("{}: {e}", path.display())))
}

fn surface_mesh_obj(surface: &SurfaceConfig) -> Result<String, ScenarioError> {
    let invalid = |e: crate::FlowError| ScenarioError::Validation(e.to_string());
    Ok(match *surface {
        SurfaceConfig::Torus {
            tube_radius,
            center_radius,
        } => parametric_mesh_obj(
            &Torus::new(TorusParams::new(tube_radius, center_radius).map_err(invalid)?),
            MESH_RESOLUTION,
        ),
        SurfaceConfig::Klein => parametric_mesh_obj(&Klein::default(), MESH_RESOLUTION),
        SurfaceConfig::BumpSphere {
            radius,
            stiffness,
            height,
        } => {
            let params = BumpSurfaceParams::new(radius, stiffness, height).map_err(invalid)?;
            let bumps = BumpSphere::new(params);
            graph_sphere_mesh_obj(radius, stiffness, |x1, x2| bumps.bump_offset(x1, x2), MESH_RESOLUTION)
        }
        SurfaceConfig::Sphere { radius } => graph_sphere_mesh_obj(radius, 1.0, |_, _| 0.0, MESH_RESOLUTION),
    })
}
