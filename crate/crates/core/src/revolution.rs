//! Surfaces of revolution with prescribed `U = √(H² − K)`.
//!
//! With the generating curve written as a graph `z = λ(ρ)` over the distance
//! `ρ` to the axis, the parallel principal curvature `A` obeys
//! `ρA' = ±2U`, so
//!
//! ```text
//! A(ρ) = ±(2∫_{ρ₀}^{ρ} U(x)/x dx + a₁)
//! λ(ρ) = ±∫_{ρ₀}^{ρ} ρA/√(1 − ρ²A²) dρ + a₂
//! ```
//!
//! The same quadrature read as `q(ρ)` gives the horizontal-axis dual.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{GipError, Result};
use crate::geometry::{jets, ParamSurface, Vec3, ORACLE_STEP};
use crate::par::{map_slice, Execution};
use crate::profile::{scalar_fn, HermiteProfile, ScalarFn};
use crate::quad::cumulative_adaptive;
use crate::surface::{interior_samples, InvariantSurface, Symmetry};

/// Nodes with `1 − ρ²A² ≤ MASK_FLOOR` are cut from the domain.
pub const MASK_FLOOR: f64 = 1e-6;

const QUAD_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Clone)]
pub struct RevolutionFamilyParams {
    /// Prescribed `U(ρ) ≥ 0`.
    pub u: ScalarFn,
    pub a1: f64,
    pub a2: f64,
    pub rho0: f64,
    /// Branch of `A`.
    pub sign_a: Sign,
    /// Branch of `λ` (and `q`).
    pub sign_lambda: Sign,
}

impl std::fmt::Debug for RevolutionFamilyParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RevolutionFamilyParams")
            .field("a1", &self.a1)
            .field("a2", &self.a2)
            .field("rho0", &self.rho0)
            .field("sign_a", &self.sign_a)
            .field("sign_lambda", &self.sign_lambda)
            .finish_non_exhaustive()
    }
}

impl RevolutionFamilyParams {
    pub fn new<U>(u: U, a1: f64, a2: f64, rho0: f64) -> Result<Self>
    where
        U: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(rho0 > 0.0) {
            return Err(GipError::SingularIntegrand { rho: rho0 });
        }
        if !a1.is_finite() || !a2.is_finite() {
            return Err(GipError::Invalid("a1 and a2 must be finite".into()));
        }
        Ok(Self {
            u: scalar_fn(u),
            a1,
            a2,
            rho0,
            sign_a: Sign::Plus,
            sign_lambda: Sign::Plus,
        })
    }

    pub fn with_signs(mut self, sign_a: Sign, sign_lambda: Sign) -> Self {
        self.sign_a = sign_a;
        self.sign_lambda = sign_lambda;
        self
    }
}

/// Parallel principal curvature `A(ρ)` on a grid, with a C² interpolant.
#[derive(Debug, Clone)]
pub struct AProfile {
    pub rho: Vec<f64>,
    pub values: Vec<f64>,
    /// Index of `ρ₀` in `rho`.
    pub origin: usize,
    hermite: HermiteProfile,
}

impl AProfile {
    pub fn eval(&self, rho: f64) -> f64 {
        self.hermite.eval(rho)
    }

    /// `A`, `A'`, `A''`.
    pub fn eval3(&self, rho: f64) -> (f64, f64, f64) {
        self.hermite.eval3(rho)
    }
}

fn prepare_grid(rho0: f64, grid: &[f64]) -> Result<(Vec<f64>, usize)> {
    if grid.len() < 2 {
        return Err(GipError::Invalid(
            "rho grid needs at least two points".into(),
        ));
    }
    if let Some(&bad) = grid.iter().find(|&&r| !(r > 0.0)) {
        return Err(GipError::SingularIntegrand { rho: bad });
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GipError::Invalid(
            "rho grid must be strictly increasing".into(),
        ));
    }
    if rho0 < grid[0] || rho0 > grid[grid.len() - 1] {
        return Err(GipError::Invalid(format!(
            "rho0 = {rho0} lies outside the grid [{}, {}]",
            grid[0],
            grid[grid.len() - 1]
        )));
    }
    let mut g = grid.to_vec();
    let i = g.partition_point(|&r| r < rho0);
    let near = |j: usize| (g[j] - rho0).abs() <= 1e-12 * rho0;
    let origin = if i < g.len() && near(i) {
        g[i] = rho0;
        i
    } else if i > 0 && near(i - 1) {
        g[i - 1] = rho0;
        i - 1
    } else {
        g.insert(i, rho0);
        i
    };
    Ok((g, origin))
}

/// Running integral of `f` from `grid[origin]` to every node.
fn integrate_from<F: Fn(f64) -> f64>(f: F, grid: &[f64], origin: usize) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    let fwd = cumulative_adaptive(&f, &grid[origin..], QUAD_TOL);
    out[origin..].copy_from_slice(&fwd);
    let back: Vec<f64> = grid[..=origin].iter().rev().copied().collect();
    let bwd = cumulative_adaptive(&f, &back, QUAD_TOL);
    for (k, v) in bwd.into_iter().enumerate() {
        out[origin - k] = v;
    }
    out
}

/// `A(ρ) = ±(2∫_{ρ₀}^{ρ} U(x)/x dx + a₁)` on `rho_grid` (with `ρ₀` inserted).
pub fn a_from_potential(
    u: &ScalarFn,
    rho0: f64,
    a1: f64,
    sign: Sign,
    rho_grid: &[f64],
) -> Result<AProfile> {
    if !(rho0 > 0.0) {
        return Err(GipError::SingularIntegrand { rho: rho0 });
    }
    let (rho, origin) = prepare_grid(rho0, rho_grid)?;
    for &r in &rho {
        let v = u(r);
        if !(v >= 0.0) || !v.is_finite() {
            return Err(GipError::Invalid(format!(
                "prescribed U must be finite and non-negative, U({r}) = {v}"
            )));
        }
    }
    let sg = sign.value();
    let integral = integrate_from(|x| 2.0 * u(x) / x, &rho, origin);
    let values: Vec<f64> = integral.iter().map(|i| sg * (i + a1)).collect();
    let d1: Vec<f64> = rho.iter().map(|&r| sg * 2.0 * u(r) / r).collect();
    let d2: Vec<f64> = rho
        .iter()
        .map(|&r| {
            let du: f64 = jets::d1(|x| u(x), r, 1e-4 * r);
            sg * 2.0 * (du * r - u(r)) / (r * r)
        })
        .collect();
    let hermite = HermiteProfile::new(rho.clone(), values.clone(), d1, d2)?;
    Ok(AProfile {
        rho,
        values,
        origin,
        hermite,
    })
}

/// `m = 1 − ρ²A²` and its ρ-derivative.
fn mask_jet(rho: f64, a: f64, da: f64) -> (f64, f64) {
    (
        1.0 - rho * rho * a * a,
        -2.0 * rho * a * a - 2.0 * rho * rho * a * da,
    )
}

/// Graph `λ(ρ)` of a generating curve.
#[derive(Debug, Clone)]
pub struct GeneratingCurveRev {
    pub rho: Vec<f64>,
    pub a: Vec<f64>,
    /// `1 − ρ²A² > MASK_FLOOR` per node.
    pub mask: Vec<bool>,
    /// Inclusive node range of the connected valid domain around `ρ₀`.
    pub domain: (usize, usize),
    /// `λ` on the domain, NaN elsewhere.
    pub lambda: Vec<f64>,
    pub truncated: bool,
    pub notes: Vec<String>,
    pub params: RevolutionFamilyParams,
    pub a_profile: AProfile,
}

/// `λ(ρ)` on the maximal masked subgrid around `ρ₀`.
pub fn generating_curve_vertical(
    params: &RevolutionFamilyParams,
    rho_grid: &[f64],
) -> Result<GeneratingCurveRev> {
    let ap = a_from_potential(&params.u, params.rho0, params.a1, params.sign_a, rho_grid)?;
    let rho = ap.rho.clone();
    let origin = ap.origin;
    let m0 = 1.0 - params.rho0 * params.rho0 * ap.values[origin].powi(2);
    if !(m0 > MASK_FLOOR) {
        return Err(GipError::NoSolutionHere {
            rho0: params.rho0,
            mask: m0,
        });
    }
    let mask: Vec<bool> = rho
        .iter()
        .zip(&ap.values)
        .map(|(&r, &a)| 1.0 - r * r * a * a > MASK_FLOOR)
        .collect();
    let mut lo = origin;
    while lo > 0 && mask[lo - 1] {
        lo -= 1;
    }
    let mut hi = origin;
    while hi + 1 < rho.len() && mask[hi + 1] {
        hi += 1;
    }
    let truncated = lo > 0 || hi + 1 < rho.len();
    let mut notes = Vec::new();
    if truncated {
        notes.push(format!(
            "domain truncated to rho in [{}, {}] where 1 - rho^2 A^2 > {MASK_FLOOR:e}",
            rho[lo], rho[hi]
        ));
    }
    let sl = params.sign_lambda.value();
    let integrand = |x: f64| {
        let a = ap.eval(x);
        x * a / (1.0 - x * x * a * a).max(MASK_FLOOR * 1e-3).sqrt()
    };
    let part = integrate_from(integrand, &rho[lo..=hi], origin - lo);
    let mut lambda = vec![f64::NAN; rho.len()];
    for (k, v) in part.into_iter().enumerate() {
        lambda[lo + k] = sl * v + params.a2;
    }
    Ok(GeneratingCurveRev {
        a: ap.values.clone(),
        rho,
        mask,
        domain: (lo, hi),
        lambda,
        truncated,
        notes,
        params: params.clone(),
        a_profile: ap,
    })
}

/// Arc-length meridian `s ↦ (ρ(s), z(s))` with `s = 0` at `ρ₀`.
#[derive(Debug, Clone)]
pub struct Meridian {
    pub rho_of_s: HermiteProfile,
    pub z_of_s: HermiteProfile,
}

impl Meridian {
    pub fn s_range(&self) -> (f64, f64) {
        self.rho_of_s.range()
    }

    pub fn knots(&self) -> &[f64] {
        self.rho_of_s.knots()
    }
}

impl GeneratingCurveRev {
    pub fn domain_rho(&self) -> &[f64] {
        &self.rho[self.domain.0..=self.domain.1]
    }

    pub fn domain_lambda(&self) -> &[f64] {
        &self.lambda[self.domain.0..=self.domain.1]
    }

    /// `λ(ρ)` as a C² interpolant on the domain.
    pub fn lambda_profile(&self) -> Result<HermiteProfile> {
        let sl = self.params.sign_lambda.value();
        let rho = self.domain_rho().to_vec();
        let (mut d1, mut d2) = (Vec::new(), Vec::new());
        for &r in &rho {
            let (a, da, _) = self.a_profile.eval3(r);
            let (m, dm) = mask_jet(r, a, da);
            let sq = m.sqrt();
            d1.push(sl * r * a / sq);
            d2.push(sl * ((a + r * da) / sq - r * a * dm / (2.0 * m * sq)));
        }
        HermiteProfile::new(rho, self.domain_lambda().to_vec(), d1, d2)
    }

    /// Arc-length parametrization of the generating curve.
    pub fn meridian(&self) -> Result<Meridian> {
        let sl = self.params.sign_lambda.value();
        let rho = self.domain_rho();
        let ap = &self.a_profile;
        let origin = ap.origin - self.domain.0;
        let s = integrate_from(
            |x| {
                let a = ap.eval(x);
                1.0 / (1.0 - x * x * a * a).max(MASK_FLOOR * 1e-3).sqrt()
            },
            rho,
            origin,
        );
        let (mut dr, mut ddr, mut dz, mut ddz) = (vec![], vec![], vec![], vec![]);
        for &r in rho {
            let (a, da, _) = ap.eval3(r);
            let (m, dm) = mask_jet(r, a, da);
            let sq = m.sqrt();
            dr.push(sq);
            ddr.push(0.5 * dm);
            dz.push(sl * r * a);
            ddz.push(sl * sq * (a + r * da));
        }
        Ok(Meridian {
            rho_of_s: HermiteProfile::new(s.clone(), rho.to_vec(), dr, ddr)?,
            z_of_s: HermiteProfile::new(s, self.domain_lambda().to_vec(), dz, ddz)?,
        })
    }
}

/// Revolves the generating curve about the z axis, with `u` the arc length
/// of the meridian so the metric reads `du² + ρ(u)² dφ²`.
pub fn revolve_vertical(curve: &GeneratingCurveRev) -> Result<InvariantSurface> {
    let mer = curve.meridian()?;
    let u_range = mer.s_range();
    if !(u_range.1 > u_range.0) {
        return Err(GipError::Invalid(
            "generating curve domain is a single point".into(),
        ));
    }
    let (r, z) = (mer.rho_of_s.clone(), mer.z_of_s.clone());
    let chart = ParamSurface::new(
        move |u, phi| {
            let rho = r.eval(u);
            Vec3::new(rho * phi.cos(), rho * phi.sin(), z.eval(u))
        },
        u_range,
        (0.0, 2.0 * PI),
    );
    let rho_fn = mer.rho_of_s.clone();
    let mut surface = InvariantSurface::new(chart, Symmetry::Rotation { axis: Vec3::z() })
        .with_metric(scalar_fn(move |u| rho_fn.eval(u)));
    surface.notes.extend(curve.notes.iter().cloned());
    Ok(surface)
}

/// Horizontal-axis dual of the generating curve.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum HorizontalCurve {
    Profile {
        q_of_rho: HermiteProfile,
        rho_of_q: HermiteProfile,
        truncated: bool,
        notes: Vec<String>,
    },
    /// `ρ' ≡ 0`: the dual degenerates to a circular cylinder.
    Cylinder { radius: f64 },
}

impl HorizontalCurve {
    pub fn surface(&self, cylinder_length: (f64, f64)) -> Result<InvariantSurface> {
        match self {
            HorizontalCurve::Cylinder { radius } => {
                let r = *radius;
                let mut s = revolve_horizontal(scalar_fn(move |_| r), cylinder_length)?;
                s.notes.push(format!("cylinder branch, radius {r}"));
                Ok(s)
            }
            HorizontalCurve::Profile {
                rho_of_q, notes, ..
            } => {
                let f = rho_of_q.clone();
                let range = rho_of_q.range();
                let mut s = revolve_horizontal(scalar_fn(move |q| f.eval(q)), range)?;
                s.notes.extend(notes.iter().cloned());
                Ok(s)
            }
        }
    }
}

/// `q(ρ)` by the same quadrature as `λ(ρ)`, returned with its inverse `ρ(q)`.
pub fn generating_curve_horizontal(
    params: &RevolutionFamilyParams,
    rho_grid: &[f64],
) -> Result<HorizontalCurve> {
    let ap = a_from_potential(&params.u, params.rho0, params.a1, params.sign_a, rho_grid)?;
    let m0 = 1.0 - (params.rho0 * ap.values[ap.origin]).powi(2);
    if m0.abs() <= 1e-12 {
        return Ok(HorizontalCurve::Cylinder {
            radius: params.rho0,
        });
    }
    let curve = generating_curve_vertical(params, rho_grid)?;
    let (lo, hi) = curve.domain;
    let origin = curve.a_profile.origin;
    let sgn0 = (curve.rho[origin] * curve.a[origin]).signum();
    if curve.a[origin] == 0.0 {
        return Err(GipError::InvariantViolation(format!(
            "q(rho) is stationary at rho0 = {} (A = 0); the horizontal dual is not a graph there",
            params.rho0
        )));
    }
    // keep the component where q is strictly monotone
    let ok = |i: usize| (curve.rho[i] * curve.a[i]) * sgn0 > MASK_FLOOR;
    let (mut l2, mut h2) = (origin, origin);
    while l2 > lo && ok(l2 - 1) {
        l2 -= 1;
    }
    while h2 < hi && ok(h2 + 1) {
        h2 += 1;
    }
    if h2 == l2 {
        return Err(GipError::InvariantViolation(
            "horizontal dual has an empty monotone domain".into(),
        ));
    }
    let mut notes = curve.notes.clone();
    if l2 > lo || h2 < hi {
        notes.push(format!(
            "dual domain cut to rho in [{}, {}] where q is monotone",
            curve.rho[l2], curve.rho[h2]
        ));
    }
    let lam = curve.lambda_profile()?;
    let rho: Vec<f64> = curve.rho[l2..=h2].to_vec();
    let (mut q, mut dq, mut ddq) = (vec![], vec![], vec![]);
    for &r in &rho {
        let (v, d, dd) = lam.eval3(r);
        q.push(v);
        dq.push(d);
        ddq.push(dd);
    }
    let q_of_rho = HermiteProfile::new(rho.clone(), q.clone(), dq.clone(), ddq.clone())?;
    let inv_d1: Vec<f64> = dq.iter().map(|d| 1.0 / d).collect();
    let inv_d2: Vec<f64> = dq.iter().zip(&ddq).map(|(d, dd)| -dd / d.powi(3)).collect();
    let rho_of_q = HermiteProfile::new_any_order(q, rho, inv_d1, inv_d2)?;
    Ok(HorizontalCurve::Profile {
        q_of_rho,
        rho_of_q,
        truncated: curve.truncated || l2 > lo || h2 < hi,
        notes,
    })
}

/// `x(q, φ) = (q, ρ(q) sin φ, ρ(q) cos φ)`.
pub fn revolve_horizontal(rho_of_q: ScalarFn, q_range: (f64, f64)) -> Result<InvariantSurface> {
    if !(q_range.1 > q_range.0) {
        return Err(GipError::Invalid(format!("empty q range {q_range:?}")));
    }
    for q in interior_samples(q_range, 64, 0.0) {
        let r = rho_of_q(q);
        if !(r > 0.0) {
            return Err(GipError::Invalid(format!(
                "rho(q) must be positive, rho({q}) = {r}"
            )));
        }
    }
    let chart = ParamSurface::new(
        move |q, phi| {
            let r = rho_of_q(q);
            Vec3::new(q, r * phi.sin(), r * phi.cos())
        },
        q_range,
        (0.0, 2.0 * PI),
    );
    Ok(InvariantSurface::new(
        chart,
        Symmetry::Rotation { axis: Vec3::x() },
    ))
}

fn rotation_axis(surface: &InvariantSurface) -> Result<Vec3> {
    match surface.symmetry {
        Symmetry::Rotation { axis } => Ok(axis.normalize()),
        other => Err(GipError::Invalid(format!(
            "expected a surface of revolution, got {other:?}"
        ))),
    }
}

/// `(distance to axis, height along axis)` of the profile through `v`.
fn profile_point(surface: &InvariantSurface, axis: &Vec3, u: f64, v: f64) -> (f64, f64) {
    let p = surface.eval(u, v);
    let h = p.dot(axis);
    ((p - axis * h).norm(), h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KenmotsuReport {
    pub max_residual: f64,
    /// Traversal orientation of the meridian that satisfies the equation.
    pub orientation: Sign,
}

/// Max of `|Z' − 2iUZ + |Z|²|` along the meridian, `Z = x⁻¹(x' + i z')` in arc
/// length. The equation holds for one traversal direction only, so both are
/// evaluated and the better one is reported.
pub fn kenmotsu_residual<U>(
    surface: &InvariantSurface,
    u_of_rho: U,
    samples: usize,
    exec: Execution,
) -> Result<KenmotsuReport>
where
    U: Fn(f64) -> f64 + Send + Sync,
{
    let axis = rotation_axis(surface)?;
    let v0 = surface.v_range().0;
    let h = ORACLE_STEP;
    let us = interior_samples(surface.u_range(), samples.max(1), 3.0 * h);
    let rows: Vec<Result<(f64, f64)>> = map_slice(exec, &us, |&u| {
        let r = |t: f64| profile_point(surface, &axis, t, v0).0;
        let z = |t: f64| profile_point(surface, &axis, t, v0).1;
        let x = r(u);
        if !(x > 0.0) {
            return Err(GipError::Invalid(format!(
                "meridian touches the axis at u = {u}"
            )));
        }
        let (dx, dz): (f64, f64) = (jets::d1(r, u, h), jets::d1(z, u, h));
        let (ddx, ddz): (f64, f64) = (jets::d2(r, u, h), jets::d2(z, u, h));
        // Z = (x_u + i z_u)/(σx) with σ = |γ_u|, and d/ds = σ⁻¹ d/du
        let sigma = (dx * dx + dz * dz).sqrt();
        let dsigma = (dx * ddx + dz * ddz) / sigma;
        let den = sigma * x;
        let dden = dsigma * x + sigma * dx;
        let (zr, zi) = (dx / den, dz / den);
        let dzr = (ddx / den - dx * dden / (den * den)) / sigma;
        let dzi = (ddz / den - dz * dden / (den * den)) / sigma;
        let uu = u_of_rho(x);
        let mod2 = zr * zr + zi * zi;
        let res = |s: f64| {
            let re = dzr + s * 2.0 * uu * zi + mod2;
            let im = dzi - s * 2.0 * uu * zr;
            (re * re + im * im).sqrt()
        };
        Ok((res(1.0), res(-1.0)))
    });
    let (mut plus, mut minus) = (0.0_f64, 0.0_f64);
    for r in rows {
        let (p, m) = r?;
        plus = plus.max(p);
        minus = minus.max(m);
    }
    Ok(if plus <= minus {
        KenmotsuReport {
            max_residual: plus,
            orientation: Sign::Plus,
        }
    } else {
        KenmotsuReport {
            max_residual: minus,
            orientation: Sign::Minus,
        }
    })
}

/// Largest `|√(H² − K) − U(ρ)|` over interior meridian samples, where `ρ` is
/// the distance to the axis.
pub fn verify_prescribed_u<U>(
    surface: &InvariantSurface,
    u_of_rho: U,
    samples: usize,
    exec: Execution,
) -> Result<f64>
where
    U: Fn(f64) -> f64 + Send + Sync,
{
    let axis = rotation_axis(surface)?;
    let v = 0.5 * (surface.v_range().0 + surface.v_range().1);
    let us = interior_samples(surface.u_range(), samples.max(1), 3.0 * ORACLE_STEP);
    let errs: Vec<Result<f64>> = map_slice(exec, &us, |&u| {
        let (rho, _) = profile_point(surface, &axis, u, v);
        surface
            .curvatures(u, v, ORACLE_STEP)
            .map(|p| (p.gap() - u_of_rho(rho)).abs())
    });
    errs.into_iter()
        .try_fold(0.0_f64, |acc, e| e.map(|e| acc.max(e)))
}

/// Largest numeric `H² − K` over an interior grid.
pub fn max_discriminant(
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
            .map(|p| p.discriminant())
    });
    vals.into_iter()
        .try_fold(f64::NEG_INFINITY, |acc, e| e.map(|e| acc.max(e)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereFit {
    pub centre: Vec3,
    pub radius: f64,
    /// Largest `| |p − c| − r |` over the points.
    pub max_residual: f64,
}

/// Algebraic least-squares sphere through `points`.
pub fn fit_sphere(points: &[Vec3]) -> Result<SphereFit> {
    if points.len() < 4 {
        return Err(GipError::Invalid(
            "sphere fit needs at least four points".into(),
        ));
    }
    let n = points.len();
    let mut m = DMatrix::zeros(n, 4);
    let mut rhs = DVector::zeros(n);
    for (i, p) in points.iter().enumerate() {
        m[(i, 0)] = 2.0 * p.x;
        m[(i, 1)] = 2.0 * p.y;
        m[(i, 2)] = 2.0 * p.z;
        m[(i, 3)] = 1.0;
        rhs[i] = p.norm_squared();
    }
    let sol = m
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| GipError::Numeric(format!("sphere fit failed: {e}")))?;
    let centre = Vec3::new(sol[0], sol[1], sol[2]);
    let r2 = sol[3] + centre.norm_squared();
    if !(r2 > 0.0) {
        return Err(GipError::Numeric(
            "sphere fit produced a non-positive radius".into(),
        ));
    }
    let radius = r2.sqrt();
    let max_residual = points
        .iter()
        .map(|p| ((p - centre).norm() - radius).abs())
        .fold(0.0, f64::max);
    Ok(SphereFit {
        centre,
        radius,
        max_residual,
    })
}

/// Chart samples on an interior `nu × nv` grid.
pub fn sample_points(surface: &InvariantSurface, nu: usize, nv: usize) -> Vec<Vec3> {
    let us = interior_samples(surface.u_range(), nu, 0.0);
    let vs = interior_samples(surface.v_range(), nv, 0.0);
    us.iter()
        .flat_map(|&u| vs.iter().map(move |&v| (u, v)))
        .map(|(u, v)| surface.eval(u, v))
        .collect()
}
