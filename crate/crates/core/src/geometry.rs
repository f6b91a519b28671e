//! Closed polygonal curves and their per-node discrete Frenet quantities.
//!
//! Node indices are periodic: node `k - 1` of node `0` is node `M - 1`.
//! Segment `k` joins node `k - 1` to node `k`, so `d[k] = |X_k - X_{k-1}|`
//! and the finite volume owned by node `k` has length `(d[k] + d[k+1]) / 2`.

use nalgebra::{Vector2, Vector3};

use crate::error::{FlowError, Result};

pub type Vec3 = Vector3<f64>;
pub type Vec2 = Vector2<f64>;

#[inline]
pub(crate) fn prev(k: usize, m: usize) -> usize {
    if k == 0 {
        m - 1
    } else {
        k - 1
    }
}

#[inline]
pub(crate) fn next(k: usize, m: usize) -> usize {
    if k + 1 == m {
        0
    } else {
        k + 1
    }
}

/// A closed polygon in 3-space.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve3 {
    nodes: Vec<Vec3>,
}

impl DiscreteCurve3 {
    pub fn new(nodes: Vec<Vec3>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(FlowError::TooFewNodes(nodes.len()));
        }
        let m = nodes.len();
        for k in 0..m {
            if nodes[k] == nodes[prev(k, m)] {
                return Err(FlowError::DegenerateSegment { index: k });
            }
        }
        Ok(Self { nodes })
    }

    /// Wraps nodes without checking invariants, to build degenerate inputs.
    #[cfg(test)]
    pub(crate) fn from_nodes_unchecked(nodes: Vec<Vec3>) -> Self {
        Self { nodes }
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn into_nodes(self) -> Vec<Vec3> {
        self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Mesh size `h = 1/M`.
    pub fn mesh_size(&self) -> f64 {
        1.0 / self.nodes.len() as f64
    }

    pub fn total_length(&self) -> f64 {
        let m = self.nodes.len();
        (0..m).map(|k| (self.nodes[k] - self.nodes[prev(k, m)]).norm()).sum()
    }

    /// Cyclic shift: node `k` of the result is node `k + j` of `self`.
    pub fn rotated(&self, j: usize) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.rotate_left(j % self.nodes.len());
        Self { nodes }
    }

    pub(crate) fn to_flat(&self) -> Vec<f64> {
        self.nodes.iter().flat_map(|x| [x.x, x.y, x.z]).collect()
    }
}

/// A closed curve in the doubly periodic parameter square, stored lifted to
/// the universal cover. Walking once around the curve shifts the lifted
/// coordinates by the integer winding pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve2 {
    nodes: Vec<Vec2>,
    winding: (i64, i64),
}

impl DiscreteCurve2 {
    pub fn new(nodes: Vec<Vec2>, winding: (i64, i64)) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(FlowError::TooFewNodes(nodes.len()));
        }
        let curve = Self { nodes, winding };
        for k in 0..curve.len() {
            if curve.lifted(k as isize) == curve.lifted(k as isize - 1) {
                return Err(FlowError::DegenerateSegment { index: k });
            }
        }
        Ok(curve)
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn winding(&self) -> (i64, i64) {
        self.winding
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn shift(&self) -> Vec2 {
        Vec2::new(self.winding.0 as f64, self.winding.1 as f64)
    }

    /// Node `k` for any integer `k`, continued through the winding shift.
    pub fn lifted(&self, k: isize) -> Vec2 {
        let m = self.nodes.len() as isize;
        let wraps = k.div_euclid(m);
        let idx = k.rem_euclid(m) as usize;
        self.nodes[idx] + self.shift() * wraps as f64
    }

    pub(crate) fn to_flat(&self) -> Vec<f64> {
        self.nodes.iter().flat_map(|y| [y.x, y.y]).collect()
    }

    pub(crate) fn from_flat(flat: &[f64], winding: (i64, i64)) -> Self {
        Self {
            nodes: flat.chunks_exact(2).map(|c| Vec2::new(c[0], c[1])).collect(),
            winding,
        }
    }
}

/// Per-node discrete Frenet data of a closed polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct FrenetData {
    /// `d[k] = |X_k - X_{k-1}|`.
    pub d: Vec<f64>,
    /// Centered tangent `(X_{k+1} - X_{k-1}) / (d_{k+1} + d_k)`; not exactly unit.
    pub tangent: Vec<Vec3>,
    /// Finite-volume curvature vector, the discrete `∂²X/∂s²`.
    pub curvature_vector: Vec<Vec3>,
    pub curvature: Vec<f64>,
    /// Curvature vector divided by `δ + κ_k`.
    pub normal: Vec<Vec3>,
    /// Unit `T × N`, or zero where `|T × N| <= δ`.
    pub binormal: Vec<Vec3>,
    pub total_length: f64,
}

impl FrenetData {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Length of the finite volume owned by node `k`.
    pub fn dual_length(&self, k: usize) -> f64 {
        0.5 * (self.d[k] + self.d[next(k, self.d.len())])
    }
}

pub fn segment_lengths(curve: &DiscreteCurve3) -> Result<Vec<f64>> {
    segment_lengths_of(curve.nodes())
}

pub(crate) fn segment_lengths_of(nodes: &[Vec3]) -> Result<Vec<f64>> {
    let m = nodes.len();
    if m < 3 {
        return Err(FlowError::TooFewNodes(m));
    }
    let mut d = Vec::with_capacity(m);
    for k in 0..m {
        let dk = (nodes[k] - nodes[prev(k, m)]).norm();
        if !(dk > 0.0) {
            return Err(FlowError::DegenerateSegment { index: k });
        }
        d.push(dk);
    }
    Ok(d)
}

pub fn frenet_data(curve: &DiscreteCurve3, delta: f64) -> Result<FrenetData> {
    frenet_data_of(curve.nodes(), delta)
}

pub(crate) fn frenet_data_of(nodes: &[Vec3], delta: f64) -> Result<FrenetData> {
    let d = segment_lengths_of(nodes)?;
    let m = nodes.len();
    let mut tangent = Vec::with_capacity(m);
    let mut curvature_vector = Vec::with_capacity(m);
    let mut curvature = Vec::with_capacity(m);
    let mut normal = Vec::with_capacity(m);
    let mut binormal = Vec::with_capacity(m);
    for k in 0..m {
        let (kp, kn) = (prev(k, m), next(k, m));
        let (dk, dn) = (d[k], d[kn]);
        let t = (nodes[kn] - nodes[kp]) / (dn + dk);
        let kvec =
            ((nodes[kn] - nodes[k]) / dn - (nodes[k] - nodes[kp]) / dk) * (2.0 / (dk + dn));
        let kappa = kvec.norm();
        let denom = delta + kappa;
        let n = if denom > 0.0 { kvec / denom } else { Vec3::zeros() };
        let b = t.cross(&n);
        let bn = b.norm();
        let b = if bn > delta && bn > 0.0 { b / bn } else { Vec3::zeros() };
        tangent.push(t);
        curvature_vector.push(kvec);
        curvature.push(kappa);
        normal.push(n);
        binormal.push(b);
    }
    let total_length = d.iter().sum();
    Ok(FrenetData {
        d,
        tangent,
        curvature_vector,
        curvature,
        normal,
        binormal,
        total_length,
    })
}

/// Discrete torsion `τ_k = B_k · ∂N/∂s`, with `∂N/∂s` taken as a centered
/// difference of the discrete normals. Entries where `κ_k <= δ` (or where a
/// neighbouring normal is undefined) are `NaN`.
pub fn torsion_diagnostic(curve: &DiscreteCurve3, delta: f64) -> Result<Vec<f64>> {
    let fr = frenet_data(curve, delta)?;
    let m = fr.len();
    let defined = |k: usize| fr.curvature[k] > delta;
    Ok((0..m)
        .map(|k| {
            let (kp, kn) = (prev(k, m), next(k, m));
            if !(defined(k) && defined(kp) && defined(kn)) {
                return f64::NAN;
            }
            let dn = (fr.normal[kn] - fr.normal[kp]) / (fr.d[kn] + fr.d[k]);
            dn.dot(&fr.binormal[k])
        })
        .collect())
}

/// Samples `map(k / M)` for `k = 0..M`.
pub fn curve_from_parametric<F>(map: F, m: usize) -> Result<DiscreteCurve3>
where
    F: Fn(f64) -> Vec3,
{
    if m < 3 {
        return Err(FlowError::TooFewNodes(m));
    }
    let nodes = (0..m).map(|k| map(k as f64 / m as f64)).collect();
    DiscreteCurve3::new(nodes)
}
