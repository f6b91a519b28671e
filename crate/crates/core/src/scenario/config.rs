//! Scenario configuration: TOML text in, validated solver setup out.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::geometry::{DiscreteCurve2, DiscreteCurve3, Vec2, Vec3};
use crate::kernels::FlowParams;
use crate::redistribution::RedistributionConfig;
use crate::solver::{CurveFlow, EmbeddedFlow, ImmersedFlow, SolverConfig};
use crate::surface::{
    BumpSphere, BumpSurfaceParams, ImplicitSurface, Klein, ParametricSurface, Sphere, Torus, TorusParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    #[default]
    Embedded,
    Immersed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceConfig {
    Torus {
        #[serde(default = "defaults::tube_radius")]
        tube_radius: f64,
        #[serde(default = "defaults::center_radius")]
        center_radius: f64,
    },
    Klein,
    BumpSphere {
        #[serde(default = "defaults::bump_radius")]
        radius: f64,
        #[serde(default = "defaults::bump_stiffness")]
        stiffness: f64,
        #[serde(default = "defaults::bump_height")]
        height: f64,
    },
    Sphere {
        #[serde(default = "defaults::one")]
        radius: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCurve {
    /// `X0(u) = χ(k u, l u)`, optionally sampled on a torus with other radii.
    TorusKnot {
        k: i64,
        l: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sample_tube_radius: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sample_center_radius: Option<f64>,
    },
    /// Circle at polar angle `theta0_deg` from the `X3` axis.
    LatitudeCircle { theta0_deg: f64 },
    /// `X1²/a² + X2²/b² = 1` lifted onto the upper sheet.
    ProjectedEllipse { a: f64, b: f64 },
    /// Explicit nodes: 3 coordinates each (embedded) or 2 plus a winding
    /// (immersed).
    Nodes {
        points: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        winding: Option<[i64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    #[serde(default = "defaults::one")]
    pub a_const: f64,
    #[serde(default = "defaults::one")]
    pub stabilizer_gain: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            a_const: 1.0,
            stabilizer_gain: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Obj,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Run directory; `runs/<name>` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(default = "defaults::formats")]
    pub formats: Vec<OutputFormat>,
    #[serde(default)]
    pub surface_mesh: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: None,
            formats: defaults::formats(),
            surface_mesh: false,
        }
    }
}

/// Outcome of a run, appended to the configuration in the metadata file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_reason: Option<String>,
    pub t_final: f64,
    pub accepted_steps: u64,
    pub rejected_steps: u64,
    pub rhs_evaluations: u64,
    pub snapshot_times: Vec<f64>,
    pub max_alpha_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "defaults::name")]
    pub name: String,
    #[serde(default)]
    pub formulation: Formulation,
    pub surface: SurfaceConfig,
    pub initial_curve: InitialCurve,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub redistribution: RedistributionConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Present only in metadata written after a run; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunRecord>,
}

mod defaults {
    use super::OutputFormat;

    pub fn one() -> f64 {
        1.0
    }
    pub fn tube_radius() -> f64 {
        1.0
    }
    pub fn center_radius() -> f64 {
        4.0
    }
    pub fn bump_radius() -> f64 {
        2.5
    }
    pub fn bump_stiffness() -> f64 {
        4.0
    }
    pub fn bump_height() -> f64 {
        3.0
    }
    pub fn formats() -> Vec<OutputFormat> {
        vec![OutputFormat::Csv]
    }
    pub fn name() -> String {
        "custom".into()
    }
}

/// Parse and validate, returning the fully resolved configuration.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    let cfg = cfg.resolved();
    cfg.validate()?;
    Ok(cfg)
}

/// Parse after applying `key.path=value` overrides to the raw document.
pub fn parse_config_with_overrides(text: &str, overrides: &[String]) -> Result<ScenarioConfig, ScenarioError> {
    let mut doc: toml::Table = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let text = toml::to_string(&doc).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    parse_config(&text)
}

fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<(), ScenarioError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ScenarioError::Parse(format!("override '{assignment}' is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(ScenarioError::Parse(format!("override '{assignment}' has an empty key")));
    }
    // a value that is not valid TOML on its own is taken as a bare string
    let value = toml::from_str::<toml::Table>(&format!("v = {}", raw.trim()))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut table = doc;
    for p in parents {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| ScenarioError::Parse(format!("override '{assignment}': '{p}' is not a table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

pub fn to_toml(cfg: &ScenarioConfig) -> Result<String, ScenarioError> {
    toml::to_string(cfg).map_err(|e| ScenarioError::Parse(e.to_string()))
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation(msg.into())
}

impl ScenarioConfig {
    /// Defaults filled in and any run record dropped.
    pub fn resolved(&self) -> Self {
        let mut cfg = self.clone();
        cfg.run = None;
        if let InitialCurve::Nodes { points, .. } = &cfg.initial_curve {
            cfg.solver.nodes = points.len();
        }
        cfg.solver = cfg.solver.resolved();
        if cfg.output.directory.is_none() {
            cfg.output.directory = Some(PathBuf::from("runs").join(&cfg.name));
        }
        cfg
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output
            .directory
            .clone()
            .unwrap_or_else(|| PathBuf::from("runs").join(&self.name))
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.solver.validate().map_err(|e| invalid(e.to_string()))?;
        self.redistribution.validate().map_err(|e| invalid(e.to_string()))?;
        if !(self.flow.a_const > 0.0) {
            return Err(invalid(format!("flow requires a_const > 0 (got {})", self.flow.a_const)));
        }
        if !(self.flow.stabilizer_gain >= 0.0) {
            return Err(invalid(format!(
                "flow requires stabilizer_gain >= 0 (got {})",
                self.flow.stabilizer_gain
            )));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(invalid(format!("name '{}' must be a plain file name", self.name)));
        }
        let surface = self.surface.build()?;
        match (self.formulation, &surface) {
            (Formulation::Embedded, s) if s.implicit.is_none() => {
                return Err(invalid(format!(
                    "embedded formulation requires an implicit surface; '{}' is parametric only",
                    self.surface.name()
                )))
            }
            (Formulation::Immersed, s) if s.parametric.is_none() => {
                return Err(invalid(format!(
                    "immersed formulation requires a parametric surface; '{}' is implicit only",
                    self.surface.name()
                )))
            }
            _ => {}
        }
        self.initial_state().map(|_| ())
    }

    /// The solver-facing flow and its initial flattened state.
    pub fn build(&self) -> Result<(Box<dyn CurveFlow>, Vec<f64>), ScenarioError> {
        self.validate()?;
        let surface = self.surface.build()?;
        let y0 = self.initial_state()?;
        let flow = FlowParams::new(self.flow.a_const, self.flow.stabilizer_gain);
        let system: Box<dyn CurveFlow> = match self.formulation {
            Formulation::Embedded => Box::new(EmbeddedFlow {
                surface: surface.implicit.clone().expect("validated"),
                flow,
                redistribution: self.redistribution,
                delta: self.solver.delta,
            }),
            Formulation::Immersed => Box::new(ImmersedFlow {
                surface: surface.parametric.clone().expect("validated"),
                companion: surface.implicit.clone(),
                flow,
                redistribution: self.redistribution,
                delta: self.solver.delta,
                winding: self.winding(),
            }),
        };
        Ok((system, y0))
    }

    /// Winding numbers of the immersed curve; `(0, 0)` for embedded runs.
    pub fn winding(&self) -> (i64, i64) {
        match (&self.formulation, &self.initial_curve) {
            (Formulation::Embedded, _) => (0, 0),
            (_, InitialCurve::TorusKnot { k, l, .. }) => (*k, *l),
            (_, InitialCurve::Nodes { winding, .. }) => winding.map(|w| (w[0], w[1])).unwrap_or((0, 0)),
            _ => (0, 0),
        }
    }

    fn initial_state(&self) -> Result<Vec<f64>, ScenarioError> {
        let m = self.solver.nodes;
        let us = |j: usize| j as f64 / m as f64;
        let surface_name = self.surface.name();
        let curve_err = |e: crate::FlowError| invalid(format!("initial curve: {e}"));
        match (&self.initial_curve, self.formulation) {
            (InitialCurve::TorusKnot { k, l, .. }, _) if *k == 0 && *l == 0 => {
                Err(invalid("torus_knot requires (k, l) != (0, 0)"))
            }
            (
                InitialCurve::TorusKnot {
                    k,
                    l,
                    sample_tube_radius,
                    sample_center_radius,
                },
                Formulation::Embedded,
            ) => {
                let SurfaceConfig::Torus {
                    tube_radius,
                    center_radius,
                } = self.surface
                else {
                    return Err(invalid(format!(
                        "embedded torus_knot requires the torus surface (got '{surface_name}')"
                    )));
                };
                let params = TorusParams::new(
                    sample_tube_radius.unwrap_or(tube_radius),
                    sample_center_radius.unwrap_or(center_radius),
                )
                .map_err(|e| invalid(format!("torus_knot sampling: {e}")))?;
                let sampler = Torus::new(params);
                let nodes = (0..m)
                    .map(|j| sampler.chi(&Vec2::new(*k as f64 * us(j), *l as f64 * us(j))))
                    .collect();
                Ok(DiscreteCurve3::new(nodes).map_err(curve_err)?.to_flat())
            }
            (InitialCurve::TorusKnot { sample_tube_radius, sample_center_radius, .. }, Formulation::Immersed)
                if sample_tube_radius.is_some() || sample_center_radius.is_some() =>
            {
                Err(invalid("immersed torus_knot curves lie on the surface; sample radii are embedded-only"))
            }
            (InitialCurve::TorusKnot { k, l, .. }, Formulation::Immersed) => {
                let nodes = (0..m)
                    .map(|j| Vec2::new(*k as f64 * us(j), *l as f64 * us(j)))
                    .collect();
                Ok(DiscreteCurve2::new(nodes, (*k, *l)).map_err(curve_err)?.to_flat())
            }
            (InitialCurve::LatitudeCircle { theta0_deg }, Formulation::Embedded) => {
                let SurfaceConfig::Sphere { radius } = self.surface else {
                    return Err(invalid(format!(
                        "latitude_circle requires the sphere surface (got '{surface_name}')"
                    )));
                };
                if !(*theta0_deg > 0.0 && *theta0_deg < 180.0) {
                    return Err(invalid(format!(
                        "latitude_circle requires 0 < theta0_deg < 180 (got {theta0_deg})"
                    )));
                }
                let (s, c) = theta0_deg.to_radians().sin_cos();
                let nodes = (0..m)
                    .map(|j| {
                        let (sp, cp) = (2.0 * PI * us(j)).sin_cos();
                        Vec3::new(radius * s * cp, radius * s * sp, radius * c)
                    })
                    .collect();
                Ok(DiscreteCurve3::new(nodes).map_err(curve_err)?.to_flat())
            }
            (InitialCurve::ProjectedEllipse { a, b }, Formulation::Embedded) => {
                if !matches!(self.surface, SurfaceConfig::BumpSphere { .. } | SurfaceConfig::Sphere { .. }) {
                    return Err(invalid(format!(
                        "projected_ellipse requires the bump_sphere or sphere surface (got '{surface_name}')"
                    )));
                }
                if !(*a > 0.0 && *b > 0.0) {
                    return Err(invalid(format!("projected_ellipse requires a, b > 0 (got {a}, {b})")));
                }
                let mut nodes = Vec::with_capacity(m);
                for j in 0..m {
                    let (sp, cp) = (2.0 * PI * us(j)).sin_cos();
                    let (x1, x2) = (a * cp, b * sp);
                    let x3 = upper_sheet(&self.surface, x1, x2).ok_or_else(|| {
                        invalid(format!("projected_ellipse ({a}, {b}) leaves the surface footprint"))
                    })?;
                    nodes.push(Vec3::new(x1, x2, x3));
                }
                Ok(DiscreteCurve3::new(nodes).map_err(curve_err)?.to_flat())
            }
            (InitialCurve::Nodes { points, winding }, Formulation::Embedded) => {
                if winding.is_some() {
                    return Err(invalid("explicit embedded nodes take no winding"));
                }
                let nodes = points
                    .iter()
                    .map(|p| match p.as_slice() {
                        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
                        _ => Err(invalid(format!("embedded nodes need 3 coordinates (got {})", p.len()))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(DiscreteCurve3::new(nodes).map_err(curve_err)?.to_flat())
            }
            (InitialCurve::Nodes { points, winding }, Formulation::Immersed) => {
                let nodes = points
                    .iter()
                    .map(|p| match p.as_slice() {
                        [u, v] => Ok(Vec2::new(*u, *v)),
                        _ => Err(invalid(format!("immersed nodes need 2 coordinates (got {})", p.len()))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let w = winding.map(|w| (w[0], w[1])).unwrap_or((0, 0));
                Ok(DiscreteCurve2::new(nodes, w).map_err(curve_err)?.to_flat())
            }
            (curve, Formulation::Immersed) => Err(invalid(format!(
                "initial curve '{}' is only available in the embedded formulation",
                curve.kind()
            ))),
        }
    }
}

fn upper_sheet(surface: &SurfaceConfig, x1: f64, x2: f64) -> Option<f64> {
    match *surface {
        SurfaceConfig::BumpSphere {
            radius,
            stiffness,
            height,
        } => BumpSphere::new(BumpSurfaceParams {
            radius,
            stiffness,
            height,
        })
        .upper_height(x1, x2),
        SurfaceConfig::Sphere { radius } => Sphere { radius }.upper_height(x1, x2),
        _ => None,
    }
}

impl InitialCurve {
    pub fn kind(&self) -> &'static str {
        match self {
            InitialCurve::TorusKnot { .. } => "torus_knot",
            InitialCurve::LatitudeCircle { .. } => "latitude_circle",
            InitialCurve::ProjectedEllipse { .. } => "projected_ellipse",
            InitialCurve::Nodes { .. } => "nodes",
        }
    }
}

/// Implicit and parametric descriptions available for a catalog surface.
#[derive(Debug, Clone)]
pub struct BuiltSurface {
    pub implicit: Option<Arc<dyn ImplicitSurface>>,
    pub parametric: Option<Arc<dyn ParametricSurface>>,
}

impl SurfaceConfig {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceConfig::Torus { .. } => "torus",
            SurfaceConfig::Klein => "klein",
            SurfaceConfig::BumpSphere { .. } => "bump_sphere",
            SurfaceConfig::Sphere { .. } => "sphere",
        }
    }

    pub fn build(&self) -> Result<BuiltSurface, ScenarioError> {
        let e = |e: crate::FlowError| invalid(e.to_string());
        Ok(match *self {
            SurfaceConfig::Torus {
                tube_radius,
                center_radius,
            } => {
                let t = Arc::new(Torus::new(TorusParams::new(tube_radius, center_radius).map_err(e)?));
                BuiltSurface {
                    implicit: Some(t.clone()),
                    parametric: Some(t),
                }
            }
            SurfaceConfig::Klein => BuiltSurface {
                implicit: None,
                parametric: Some(Arc::new(Klein::default())),
            },
            SurfaceConfig::BumpSphere {
                radius,
                stiffness,
                height,
            } => BuiltSurface {
                implicit: Some(Arc::new(BumpSphere::new(
                    BumpSurfaceParams::new(radius, stiffness, height).map_err(e)?,
                ))),
                parametric: None,
            },
            SurfaceConfig::Sphere { radius } => BuiltSurface {
                implicit: Some(Arc::new(Sphere::new(radius).map_err(e)?)),
                parametric: None,
            },
        })
    }
}
