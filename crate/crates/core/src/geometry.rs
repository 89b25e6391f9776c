//! Vector, curve and surface primitives; fundamental forms and curvatures
//! computed from finite-difference jets. Every synthesized object in the crate
//! is checked against these numeric routes.
//!
//! Normal convention: `N = (x_u × x_v) / |x_u × x_v|` everywhere. The sign of
//! `H` therefore depends on the chart orientation; potentials only use `H²`.

use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{GipError, Result};

pub type Vec3 = Vector3<f64>;

/// Below this `|x_u × x_v|` a chart is treated as singular.
pub const REGULARITY_TOL: f64 = 1e-9;

/// Tolerance on `H² − K ≥ 0` for numerically computed pairs.
pub const DISCRIMINANT_TOL: f64 = 1e-10;

/// Absolute finite-difference step for curvature oracles on unit-scale
/// geometry. Second-difference round-off grows like `ε/step²`, so oracles
/// that must resolve `1e−8` use this rather than `DEFAULT_RELATIVE_STEP`.
pub const ORACLE_STEP: f64 = 1e-3;

/// Relative finite-difference step used when none is given.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
    mass: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::natural()
    }
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) || !(mass > 0.0 && mass.is_finite()) {
            return Err(GipError::Invalid(format!(
                "hbar and mass must be positive (hbar = {hbar}, mass = {mass})"
            )));
        }
        Ok(Self { hbar, mass })
    }

    /// ħ = m = 1, so ħ²/2m = 1/2.
    pub fn natural() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }

    /// CODATA ħ and the electron mass, lengths in metres.
    pub fn si_electron() -> Self {
        Self {
            hbar: 1.054_571_817e-34,
            mass: 9.109_383_701_5e-31,
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Planck's constant h = 2πħ.
    pub fn planck(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar
    }

    /// ħ²/2m, the kinetic prefactor.
    pub fn kinetic(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }
}

pub type SurfaceMap = Arc<dyn Fn(f64, f64) -> Vec3 + Send + Sync>;

/// A chart `x(u, v)` on a rectangle.
#[derive(Clone)]
pub struct ParamSurface {
    map: SurfaceMap,
    u_range: (f64, f64),
    v_range: (f64, f64),
}

impl std::fmt::Debug for ParamSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamSurface")
            .field("u_range", &self.u_range)
            .field("v_range", &self.v_range)
            .finish_non_exhaustive()
    }
}

impl ParamSurface {
    pub fn new<F>(map: F, u_range: (f64, f64), v_range: (f64, f64)) -> Self
    where
        F: Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
    {
        Self::from_arc(Arc::new(map), u_range, v_range)
    }

    pub fn from_arc(map: SurfaceMap, u_range: (f64, f64), v_range: (f64, f64)) -> Self {
        Self {
            map,
            u_range,
            v_range,
        }
    }

    #[inline]
    pub fn eval(&self, u: f64, v: f64) -> Vec3 {
        (self.map)(u, v)
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.u_range
    }

    pub fn v_range(&self) -> (f64, f64) {
        self.v_range
    }

    pub fn map(&self) -> &SurfaceMap {
        &self.map
    }

    /// `DEFAULT_RELATIVE_STEP` times the larger side of the domain.
    pub fn default_step(&self) -> f64 {
        let scale = (self.u_range.1 - self.u_range.0)
            .abs()
            .max((self.v_range.1 - self.v_range.0).abs())
            .max(1e-3);
        DEFAULT_RELATIVE_STEP * scale
    }

    /// Composes the chart with a rigid map of the ambient space.
    pub fn transformed<T>(&self, t: T) -> Self
    where
        T: Fn(Vec3) -> Vec3 + Send + Sync + 'static,
    {
        let inner = self.map.clone();
        Self::new(move |u, v| t(inner(u, v)), self.u_range, self.v_range)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

impl FundamentalForms {
    pub fn metric_det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvaturePair {
    /// Gaussian curvature.
    pub k: f64,
    /// Mean curvature (sign follows the chart's normal).
    pub h: f64,
}

impl CurvaturePair {
    /// `H² − K`, the square of half the principal curvature gap.
    pub fn discriminant(&self) -> f64 {
        self.h * self.h - self.k
    }

    /// `√(H² − K)` with tiny negative round-off clamped to zero.
    pub fn gap(&self) -> f64 {
        self.discriminant().max(0.0).sqrt()
    }
}

/// Fourth-order central difference stencils.
pub(crate) mod jets {
    pub const D1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];

    #[inline]
    pub fn d1<T, F>(f: F, x: f64, h: f64) -> T
    where
        F: Fn(f64) -> T,
        T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        (f(x - 2.0 * h) - f(x + 2.0 * h) + (f(x + h) - f(x - h)) * 8.0) * (1.0 / (12.0 * h))
    }

    #[inline]
    pub fn d2<T, F>(f: F, x: f64, h: f64) -> T
    where
        F: Fn(f64) -> T,
        T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        ((f(x + h) + f(x - h)) * 16.0 - (f(x + 2.0 * h) + f(x - 2.0 * h)) - f(x) * 30.0)
            * (1.0 / (12.0 * h * h))
    }

    #[inline]
    pub fn d3<T, F>(f: F, x: f64, h: f64) -> T
    where
        F: Fn(f64) -> T,
        T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        ((f(x + h) - f(x - h)) * -13.0 + (f(x + 2.0 * h) - f(x - 2.0 * h)) * 8.0
            - (f(x + 3.0 * h) - f(x - 3.0 * h)))
            * (1.0 / (8.0 * h * h * h))
    }
}

/// First and second partials of the chart at one point.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceJet {
    pub xu: Vec3,
    pub xv: Vec3,
    pub xuu: Vec3,
    pub xuv: Vec3,
    pub xvv: Vec3,
}

pub fn surface_jet(surface: &ParamSurface, u: f64, v: f64, step: f64) -> SurfaceJet {
    let h = step;
    let xu = jets::d1(|t| surface.eval(t, v), u, h);
    let xv = jets::d1(|t| surface.eval(u, t), v, h);
    let xuu = jets::d2(|t| surface.eval(t, v), u, h);
    let xvv = jets::d2(|t| surface.eval(u, t), v, h);
    let mut xuv = Vec3::zeros();
    for (a, wa) in jets::D1 {
        for (b, wb) in jets::D1 {
            xuv += surface.eval(u + a * h, v + b * h) * (wa * wb);
        }
    }
    xuv /= 144.0 * h * h;
    SurfaceJet {
        xu,
        xv,
        xuu,
        xuv,
        xvv,
    }
}

/// First and second fundamental forms from numeric jets of the chart.
pub fn fundamental_forms(
    surface: &ParamSurface,
    u: f64,
    v: f64,
    step: f64,
) -> Result<FundamentalForms> {
    if !(step > 0.0) {
        return Err(GipError::Invalid(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    let j = surface_jet(surface, u, v, step);
    let cross = j.xu.cross(&j.xv);
    let norm = cross.norm();
    if !(norm >= REGULARITY_TOL) {
        return Err(GipError::DegenerateSurface { u, v, norm });
    }
    let n = cross / norm;
    Ok(FundamentalForms {
        g11: j.xu.dot(&j.xu),
        g12: j.xu.dot(&j.xv),
        g22: j.xv.dot(&j.xv),
        h11: j.xuu.dot(&n),
        h12: j.xuv.dot(&n),
        h22: j.xvv.dot(&n),
    })
}

pub fn curvatures_from_forms(f: &FundamentalForms) -> CurvaturePair {
    let det = f.metric_det();
    CurvaturePair {
        k: (f.h11 * f.h22 - f.h12 * f.h12) / det,
        h: (f.h11 * f.g22 - 2.0 * f.h12 * f.g12 + f.h22 * f.g11) / (2.0 * det),
    }
}

/// Numeric curvature pair of a chart at `(u, v)`.
pub fn surface_curvatures(
    surface: &ParamSurface,
    u: f64,
    v: f64,
    step: f64,
) -> Result<CurvaturePair> {
    fundamental_forms(surface, u, v, step).map(|f| curvatures_from_forms(&f))
}

/// Geometry-induced potential `−(ħ²/2m)(H² − K)` of a surface.
pub fn gip_from_curvatures(pair: &CurvaturePair, c: &PhysicalConstants) -> f64 {
    -c.kinetic() * pair.discriminant()
}

/// Curvatures of the graph `(x, y, Z(x, y))` straight from the derivatives of `Z`.
pub fn graph_curvatures<Z: Fn(f64, f64) -> f64>(z: Z, x: f64, y: f64, step: f64) -> CurvaturePair {
    let h = step;
    let zx = jets::d1(|t| z(t, y), x, h);
    let zy = jets::d1(|t| z(x, t), y, h);
    let zxx = jets::d2(|t| z(t, y), x, h);
    let zyy = jets::d2(|t| z(x, t), y, h);
    let mut zxy = 0.0;
    for (a, wa) in jets::D1 {
        for (b, wb) in jets::D1 {
            zxy += wa * wb * z(x + a * h, y + b * h);
        }
    }
    zxy /= 144.0 * h * h;
    let w = 1.0 + zx * zx + zy * zy;
    CurvaturePair {
        k: (zxx * zyy - zxy * zxy) / (w * w),
        h: (zxx * (1.0 + zy * zy) - 2.0 * zxy * zx * zy + zyy * (1.0 + zx * zx))
            / (2.0 * w.powf(1.5)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveInvariants {
    pub kappa: f64,
    /// Zero when the curve is locally straight (see `planar_degenerate`).
    pub tau: f64,
    /// `|α' × α''|` fell below tolerance: torsion is undefined there.
    pub planar_degenerate: bool,
}

/// Curvature and torsion of any regular parametrization, from numeric jets.
pub fn curve_invariants<A: Fn(f64) -> Vec3>(alpha: A, s: f64, step: f64) -> CurveInvariants {
    let d1: Vec3 = jets::d1(&alpha, s, step);
    let d2: Vec3 = jets::d2(&alpha, s, step);
    let d3: Vec3 = jets::d3(&alpha, s, step);
    let c = d1.cross(&d2);
    let cn = c.norm();
    let speed = d1.norm();
    let kappa = cn / speed.powi(3);
    // relative to the speed so that the flag is scale free
    if cn < 1e-9 * speed * speed.max(1.0) {
        return CurveInvariants {
            kappa,
            tau: 0.0,
            planar_degenerate: true,
        };
    }
    CurveInvariants {
        kappa,
        tau: d1.dot(&d2.cross(&d3)) / (cn * cn),
        planar_degenerate: false,
    }
}

/// Screw motion `γ_t`: rotate `(q¹, q²)` by `−ωt` about the z axis and lift
/// `q³` by `pitch_unit · t`.
pub fn apply_screw_motion(q: &Vec3, t: f64, omega: f64, pitch_unit: f64) -> Vec3 {
    let (s, c) = (omega * t).sin_cos();
    Vec3::new(q.x * c + q.y * s, -q.x * s + q.y * c, q.z + pitch_unit * t)
}
