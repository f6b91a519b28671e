use thiserror::Error;

/// Failures raised by the geometry, surface and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("a closed curve needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),

    #[error("degenerate segment ending at node {index}")]
    DegenerateSegment { index: usize },

    #[error("point outside the surface regularity domain{}", fmt_node(*.node))]
    OutsideRegularityDomain { node: Option<usize> },

    #[error("metric determinant {det:e} below the singularity floor{}", fmt_node(*.node))]
    NearSingularMetric { det: f64, node: Option<usize> },

    #[error("time step collapsed to {dt:e} at t = {t}")]
    StepCollapse { t: f64, dt: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("solver aborted at t = {t}: {source}")]
    AtTime { t: f64, source: Box<FlowError> },
}

fn fmt_node(node: Option<usize>) -> String {
    match node {
        Some(k) => format!(" at node {k}"),
        None => String::new(),
    }
}

impl FlowError {
    /// Attach the node index to surface errors that were raised without one.
    pub fn at_node(self, k: usize) -> Self {
        match self {
            FlowError::OutsideRegularityDomain { node: None } => {
                FlowError::OutsideRegularityDomain { node: Some(k) }
            }
            FlowError::NearSingularMetric { det, node: None } => {
                FlowError::NearSingularMetric { det, node: Some(k) }
            }
            other => other,
        }
    }

    pub fn at_time(self, t: f64) -> Self {
        match self {
            e @ FlowError::AtTime { .. } => e,
            e @ FlowError::StepCollapse { .. } => e,
            other => FlowError::AtTime {
                t,
                source: Box::new(other),
            },
        }
    }

    /// Strip the time wrapper, if any.
    pub fn root(&self) -> &FlowError {
        match self {
            FlowError::AtTime { source, .. } => source.root(),
            other => other,
        }
    }

    /// Node index carried by the error, if any.
    pub fn node(&self) -> Option<usize> {
        match self.root() {
            FlowError::DegenerateSegment { index } => Some(*index),
            FlowError::OutsideRegularityDomain { node } => *node,
            FlowError::NearSingularMetric { node, .. } => *node,
            _ => None,
        }
    }

    /// Time carried by the error, if any.
    pub fn time(&self) -> Option<f64> {
        match self {
            FlowError::AtTime { t, .. } | FlowError::StepCollapse { t, .. } => Some(*t),
            _ => None,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            FlowError::TooFewNodes(_) => "TooFewNodes",
            FlowError::DegenerateSegment { .. } => "DegenerateSegment",
            FlowError::OutsideRegularityDomain { .. } => "OutsideRegularityDomain",
            FlowError::NearSingularMetric { .. } => "NearSingularMetric",
            FlowError::StepCollapse { .. } => "StepCollapse",
            FlowError::InvalidParameter(_) => "InvalidParameter",
            FlowError::AtTime { .. } => unreachable!(),
        }
    }
}

pub type Result<T, E = FlowError> = std::result::Result<T, E>;
