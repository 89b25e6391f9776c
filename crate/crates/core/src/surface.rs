//! Surfaces left invariant by a one-parameter group of rigid motions.

use crate::error::Result;
use crate::geometry::{
    curvatures_from_forms, fundamental_forms, CurvaturePair, FundamentalForms, ParamSurface, Vec3,
};
use crate::par::{map_range, Execution};
use crate::profile::ScalarFn;

/// The group a surface is swept by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symmetry {
    /// Translations along a unit axis.
    Translation { axis: Vec3 },
    /// Rotations about a line through the origin.
    Rotation { axis: Vec3 },
    /// Screw motions about the z axis with angular rate `omega`.
    Screw { omega: f64 },
}

/// A chart whose `v` direction follows the symmetry orbits, so the metric is
/// `du² + f(u)² dv²` whenever `u` is orthogonal arc length.
#[derive(Clone)]
pub struct InvariantSurface {
    pub chart: ParamSurface,
    pub symmetry: Symmetry,
    /// Metric factor `f(u)` when the chart is in orthogonal arc-length form.
    pub metric: Option<ScalarFn>,
    /// Truncations and other remarks gathered during synthesis.
    pub notes: Vec<String>,
}

impl std::fmt::Debug for InvariantSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InvariantSurface")
            .field("chart", &self.chart)
            .field("symmetry", &self.symmetry)
            .field("metric", &self.metric.is_some())
            .field("notes", &self.notes)
            .finish()
    }
}

impl InvariantSurface {
    pub fn new(chart: ParamSurface, symmetry: Symmetry) -> Self {
        Self {
            chart,
            symmetry,
            metric: None,
            notes: Vec::new(),
        }
    }

    pub fn with_metric(mut self, f: ScalarFn) -> Self {
        self.metric = Some(f);
        self
    }

    pub fn eval(&self, u: f64, v: f64) -> Vec3 {
        self.chart.eval(u, v)
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.chart.u_range()
    }

    pub fn v_range(&self) -> (f64, f64) {
        self.chart.v_range()
    }

    pub fn forms(&self, u: f64, v: f64, step: f64) -> Result<FundamentalForms> {
        fundamental_forms(&self.chart, u, v, step)
    }

    pub fn curvatures(&self, u: f64, v: f64, step: f64) -> Result<CurvaturePair> {
        self.forms(u, v, step).map(|f| curvatures_from_forms(&f))
    }

    /// Reflection `y ↦ −y` of the embedding.
    pub fn mirrored(&self) -> Self {
        let symmetry = match self.symmetry {
            Symmetry::Screw { omega } => Symmetry::Screw { omega: -omega },
            Symmetry::Translation { axis } => Symmetry::Translation {
                axis: Vec3::new(axis.x, -axis.y, axis.z),
            },
            Symmetry::Rotation { axis } => Symmetry::Rotation {
                axis: Vec3::new(axis.x, -axis.y, axis.z),
            },
        };
        Self {
            chart: self.chart.transformed(|p| Vec3::new(p.x, -p.y, p.z)),
            symmetry,
            metric: self.metric.clone(),
            notes: self.notes.clone(),
        }
    }
}

/// `n` points spread evenly over `[a + margin, b − margin]`.
pub fn interior_samples(range: (f64, f64), n: usize, margin: f64) -> Vec<f64> {
    let (a, b) = (range.0 + margin, range.1 - margin);
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Forms at every node of an `nu × nv` interior grid, row-major in `u`.
pub fn forms_on_grid(
    surface: &InvariantSurface,
    nu: usize,
    nv: usize,
    step: f64,
    exec: Execution,
) -> Result<Vec<((f64, f64), FundamentalForms)>> {
    let margin = 3.0 * step;
    let us = interior_samples(surface.u_range(), nu, margin);
    let vs = interior_samples(surface.v_range(), nv, margin);
    map_range(exec, nu * nv, |k| {
        let (u, v) = (us[k / nv], vs[k % nv]);
        surface.forms(u, v, step).map(|f| ((u, v), f))
    })
    .into_iter()
    .collect()
}
