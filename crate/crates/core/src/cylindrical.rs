//! Translation-invariant surfaces `X(s, t) = α(s) + t·a` with prescribed mean
//! curvature.
//!
//! For a planar arc-length curve with turning angle `ψ` and a unit axis `a`,
//! the angle `θ` between `a` and `α'` obeys `cos θ = a₁cos ψ + a₂sin ψ`, and
//! with the normal `a × α' / sin θ` the mean curvature is
//! `H = a₃κ / (2 sin³θ)`. The cross section therefore solves
//! `ψ' = 2H(s) sin³θ(ψ) / a₃`. For a vertical axis `θ ≡ π/2` and this is
//! `κ = 2H`; for a tilted axis `θ` drifts with `ψ` and is reported.

use crate::curve::{planar_closed_form, CurvatureProfile, PlanarStart, ReconstructedCurve};
use crate::error::{GipError, Result};
use crate::geometry::{jets, Vec3, ORACLE_STEP};
use crate::par::Execution;
use crate::profile::{scalar_fn, HermiteProfile, ScalarFn};
use crate::quad::uniform_grid;
use crate::surface::{interior_samples, InvariantSurface, Symmetry};

const AXIS_NORM_TOL: f64 = 1e-12;
const AXIS_A3_TOL: f64 = 1e-9;

/// Endpoints within this distance (position and tangent) count as a closed
/// cross section.
pub const CLOSED_SECTION_TOL: f64 = 1e-6;

#[derive(Clone)]
pub struct CylindricalSpec {
    pub axis: Vec3,
    pub h_profile: ScalarFn,
    pub s_range: (f64, f64),
    pub t_range: (f64, f64),
    /// Direction of `α'(s₀)` measured from the x axis.
    pub heading: f64,
}

impl std::fmt::Debug for CylindricalSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CylindricalSpec")
            .field("axis", &self.axis)
            .field("s_range", &self.s_range)
            .field("t_range", &self.t_range)
            .field("heading", &self.heading)
            .finish_non_exhaustive()
    }
}

impl CylindricalSpec {
    pub fn new<H>(axis: Vec3, h: H, s_range: (f64, f64), t_range: (f64, f64)) -> Result<Self>
    where
        H: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let spec = Self {
            axis,
            h_profile: scalar_fn(h),
            s_range,
            t_range,
            heading: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_heading(mut self, heading: f64) -> Result<Self> {
        self.heading = heading;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        validate_axis(&self.axis)?;
        if !(self.s_range.1 > self.s_range.0) || !(self.t_range.1 > self.t_range.0) {
            return Err(GipError::Invalid(format!(
                "empty cylinder ranges s {:?}, t {:?}",
                self.s_range, self.t_range
            )));
        }
        let st = self.sin_theta_at(self.heading);
        if !(st > AXIS_A3_TOL) {
            return Err(GipError::NonRegularSurface { a3: self.axis.z });
        }
        Ok(())
    }

    /// `sin θ` for a tangent with turning angle `psi`.
    pub fn sin_theta_at(&self, psi: f64) -> f64 {
        let c = self.axis.x * psi.cos() + self.axis.y * psi.sin();
        (1.0 - c * c).max(0.0).sqrt()
    }

    /// Angle between the axis and the initial tangent.
    pub fn theta(&self) -> f64 {
        let c = self.axis.x * self.heading.cos() + self.axis.y * self.heading.sin();
        c.clamp(-1.0, 1.0).acos()
    }

    pub fn is_vertical(&self) -> bool {
        self.axis.x == 0.0 && self.axis.y == 0.0
    }
}

fn validate_axis(a: &Vec3) -> Result<()> {
    if !a.iter().all(|c| c.is_finite()) || (a.norm() - 1.0).abs() > AXIS_NORM_TOL {
        return Err(GipError::Invalid(format!(
            "cylinder axis must be a unit vector, got {a:?}"
        )));
    }
    if a.z.abs() <= AXIS_A3_TOL {
        return Err(GipError::NonRegularSurface { a3: a.z });
    }
    Ok(())
}

/// Planar curvature of the cross section together with its turning angle.
#[derive(Debug, Clone)]
pub struct CrossSection {
    /// Signed curvature (positive = counterclockwise).
    pub profile: CurvatureProfile,
    /// Largest `|θ(s) − θ(s₀)|` along the section.
    pub theta_variation: f64,
}

/// Reduces prescribed mean curvature to a planar curvature problem.
///
/// `samples` sets the grid on which the turning angle is integrated for a
/// tilted axis (classical RK4, quintic Hermite in between).
pub fn cross_section_from_mean_curvature(
    spec: &CylindricalSpec,
    samples: usize,
) -> Result<CrossSection> {
    spec.validate()?;
    let h = spec.h_profile.clone();
    let a3 = spec.axis.z;
    if spec.is_vertical() {
        let k = move |s: f64| 2.0 * h(s) / a3;
        return Ok(CrossSection {
            profile: CurvatureProfile::planar(k, spec.s_range, samples.max(2))?,
            theta_variation: 0.0,
        });
    }

    let n = samples.max(2);
    let grid = uniform_grid(spec.s_range.0, spec.s_range.1, n);
    let g = {
        let spec = spec.clone();
        move |psi: f64| spec.sin_theta_at(psi).powi(3)
    };
    let rate = |s: f64, psi: f64| 2.0 * h(s) * g(psi) / a3;
    let mut psi = vec![spec.heading; n];
    for i in 1..n {
        let (s, dt) = (grid[i - 1], grid[i] - grid[i - 1]);
        let y = psi[i - 1];
        let k1 = rate(s, y);
        let k2 = rate(s + 0.5 * dt, y + 0.5 * dt * k1);
        let k3 = rate(s + 0.5 * dt, y + 0.5 * dt * k2);
        let k4 = rate(s + dt, y + dt * k3);
        psi[i] = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    let hstep = 1e-4 * (spec.s_range.1 - spec.s_range.0).max(1.0);
    let dpsi: Vec<f64> = grid.iter().zip(&psi).map(|(&s, &p)| rate(s, p)).collect();
    let d2psi: Vec<f64> = grid
        .iter()
        .zip(&psi)
        .zip(&dpsi)
        .map(|((&s, &p), &dp)| {
            let dh: f64 = jets::d1(|x| h(x), s, hstep);
            let dg: f64 = jets::d1(&g, p, 1e-4);
            2.0 * (dh * g(p) + h(s) * dg * dp) / a3
        })
        .collect();
    let psi_of_s = HermiteProfile::new(grid.clone(), psi.clone(), dpsi, d2psi)?;

    let theta0 = spec.theta();
    let theta_variation = psi
        .iter()
        .map(|&p| (spec.sin_theta_at(p).asin() - theta0.sin().asin()).abs())
        .fold(0.0, f64::max);
    let h2 = spec.h_profile.clone();
    let k = move |s: f64| 2.0 * h2(s) * g(psi_of_s.eval(s)) / a3;
    Ok(CrossSection {
        profile: CurvatureProfile::planar(k, spec.s_range, n)?,
        theta_variation,
    })
}

/// `X(s, t) = α(s) + t·a` over a planar cross section.
pub fn extrude(
    curve: &ReconstructedCurve,
    axis: Vec3,
    t_range: (f64, f64),
) -> Result<InvariantSurface> {
    validate_axis(&axis)?;
    if !curve.is_planar(1e-12) {
        return Err(GipError::Invalid(
            "extrusion needs a cross section in the z = 0 plane".into(),
        ));
    }
    if curve.len() < 2 {
        return Err(GipError::Invalid(
            "cross section needs at least two samples".into(),
        ));
    }
    let alpha = curve.interpolant()?;
    let s_range = (curve.s[0], curve.s[curve.len() - 1]);
    let chart = crate::geometry::ParamSurface::new(
        move |s, t| alpha.position(s) + axis * t,
        s_range,
        t_range,
    );
    let mut surface = InvariantSurface::new(chart, Symmetry::Translation { axis });
    if curve.is_closed(CLOSED_SECTION_TOL) {
        surface.notes.push("closed cross section".into());
    }
    Ok(surface)
}

/// A synthesized cylinder with its cross section.
#[derive(Debug, Clone)]
pub struct CylinderSynthesis {
    pub curve: ReconstructedCurve,
    pub surface: InvariantSurface,
    pub closed: bool,
    pub theta_variation: f64,
}

/// Full pipeline: prescribed `H(s)` → planar section (closed form) → extrusion.
pub fn synthesize(spec: &CylindricalSpec, step: f64) -> Result<CylinderSynthesis> {
    let samples = (((spec.s_range.1 - spec.s_range.0) / step).round() as usize + 1).max(2);
    let section = cross_section_from_mean_curvature(spec, samples)?;
    let kappa = section.profile.kappa.clone();
    let curve = planar_closed_form(
        move |s| kappa(s),
        spec.s_range,
        step,
        PlanarStart {
            x0: 0.0,
            y0: 0.0,
            heading: spec.heading,
        },
    )?;
    let mut surface = extrude(&curve, spec.axis, spec.t_range)?;
    if section.theta_variation > 0.0 {
        surface.notes.push(format!(
            "axis-tangent angle varies along the section by {:.3e} rad",
            section.theta_variation
        ));
    }
    let closed = curve.is_closed(CLOSED_SECTION_TOL);
    Ok(CylinderSynthesis {
        curve,
        surface,
        closed,
        theta_variation: section.theta_variation,
    })
}

/// Largest mismatch between the numeric mean curvature along the section
/// (middle of the `t` range, normal `a × α'`) and the target. The error is
/// relative to `max |H_target|` when that is non-zero and absolute otherwise.
pub fn verify_prescribed_h<H>(
    surface: &InvariantSurface,
    h_target: H,
    samples: usize,
    exec: Execution,
) -> Result<f64>
where
    H: Fn(f64) -> f64 + Send + Sync,
{
    let step = ORACLE_STEP;
    let ss = interior_samples(surface.u_range(), samples.max(1), 3.0 * step);
    let t = 0.5 * (surface.v_range().0 + surface.v_range().1);
    let scale = ss.iter().map(|&s| h_target(s).abs()).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let errs: Vec<Result<f64>> = crate::par::map_slice(exec, &ss, |&s| {
        surface
            .curvatures(s, t, step)
            .map(|p| (-p.h - h_target(s)).abs() / scale)
    });
    errs.into_iter()
        .try_fold(0.0_f64, |acc, e| e.map(|e| acc.max(e)))
}

/// Largest `|K|` over an interior grid.
pub fn max_gaussian(
    surface: &InvariantSurface,
    nu: usize,
    nv: usize,
    exec: Execution,
) -> Result<f64> {
    let us = interior_samples(surface.u_range(), nu, 3.0 * ORACLE_STEP);
    let vs = interior_samples(surface.v_range(), nv, 3.0 * ORACLE_STEP);
    let vals: Vec<Result<f64>> = crate::par::map_range(exec, nu * nv, |k| {
        surface
            .curvatures(us[k / nv], vs[k % nv], ORACLE_STEP)
            .map(|p| p.k.abs())
    });
    vals.into_iter()
        .try_fold(0.0_f64, |acc, e| e.map(|e| acc.max(e)))
}
