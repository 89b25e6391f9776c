//! Helicoidal surfaces `X(ρ, φ) = (ρ cos ωφ, ρ sin ωφ, λ(ρ) + φ)` in natural
//! parameters `(ξ, χ)`, where the metric is `dξ² + 𝒰(ξ)² dχ²`.
//!
//! Every positive `𝒰` is realized by a two-parameter family `(ω, a)` of
//! isometric helicoidal surfaces:
//!
//! ```text
//! ρ  = √(a²𝒰² − 1) / |ω|
//! λ' = a𝒰 √R / (|ω| (a²𝒰² − 1))
//! Φ' = √R / (|ω| a𝒰 (a²𝒰² − 1)),     φ = χ/a − Φ(ξ)
//! R  = a²𝒰²(ω² − a²𝒰̇²) − ω²
//! ```
//!
//! `λ` and `Φ` do not depend on the sign of `ω`; chirality enters only
//! through the rotation `ωφ`, so `ω ↦ −ω` is the mirror `y ↦ −y`.

use std::f64::consts::PI;

use crate::error::{GipError, Result};
use crate::geometry::{jets, CurvaturePair, ParamSurface, Vec3, ORACLE_STEP};
use crate::par::{map_range, Execution};
use crate::profile::{scalar_fn, HermiteProfile, ScalarFn};
use crate::quad::{cumulative_adaptive, uniform_grid};
use crate::revolution::Sign;
use crate::surface::{interior_samples, InvariantSurface, Symmetry};

/// Default quadrature density along `ξ`.
pub const POINTS_PER_UNIT_XI: f64 = 2048.0;

const QUAD_TOL: f64 = 1e-14;
const DERIV_STEP: f64 = 1e-3;
/// Relative size below which `R` counts as zero.
const RADICAND_TOL: f64 = 1e-9;

/// `(𝒰, ω, a)`: a metric profile and one member of its isometric family.
#[derive(Clone)]
pub struct BourFamily {
    u_nat: ScalarFn,
    du: Option<ScalarFn>,
    ddu: Option<ScalarFn>,
    pub omega: f64,
    pub a: f64,
}

impl std::fmt::Debug for BourFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BourFamily")
            .field("omega", &self.omega)
            .field("a", &self.a)
            .field("exact_derivatives", &self.du.is_some())
            .finish_non_exhaustive()
    }
}

impl BourFamily {
    /// Derivatives of `𝒰` are taken numerically.
    pub fn new<U>(u: U, omega: f64, a: f64) -> Result<Self>
    where
        U: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::build(scalar_fn(u), None, None, omega, a)
    }

    /// `𝒰` with its first and second derivatives.
    pub fn with_derivatives(
        u: ScalarFn,
        du: ScalarFn,
        ddu: ScalarFn,
        omega: f64,
        a: f64,
    ) -> Result<Self> {
        Self::build(u, Some(du), Some(ddu), omega, a)
    }

    fn build(
        u: ScalarFn,
        du: Option<ScalarFn>,
        ddu: Option<ScalarFn>,
        omega: f64,
        a: f64,
    ) -> Result<Self> {
        if !(omega != 0.0 && omega.is_finite()) || !(a != 0.0 && a.is_finite()) {
            return Err(GipError::Invalid(format!(
                "omega and a must be finite and non-zero (omega = {omega}, a = {a})"
            )));
        }
        Ok(Self {
            u_nat: u,
            du,
            ddu,
            omega,
            a,
        })
    }

    pub fn u(&self, xi: f64) -> f64 {
        (self.u_nat)(xi)
    }

    pub fn du(&self, xi: f64) -> f64 {
        match &self.du {
            Some(d) => d(xi),
            None => jets::d1(|x| (self.u_nat)(x), xi, DERIV_STEP),
        }
    }

    pub fn ddu(&self, xi: f64) -> f64 {
        match &self.ddu {
            Some(d) => d(xi),
            None => jets::d2(|x| (self.u_nat)(x), xi, DERIV_STEP),
        }
    }

    pub fn chirality(&self) -> Sign {
        if self.omega > 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Same profile with the opposite screw sense.
    pub fn mirrored(&self) -> Self {
        Self {
            omega: -self.omega,
            ..self.clone()
        }
    }

    /// `a²𝒰² − 1`, which must be positive.
    pub fn radius_radicand(&self, xi: f64) -> f64 {
        let au = self.a * self.u(xi);
        au * au - 1.0
    }

    /// `R = a²𝒰²(ω² − a²𝒰̇²) − ω²`, which must be non-negative.
    pub fn radicand(&self, xi: f64) -> f64 {
        let (u, du) = (self.u(xi), self.du(xi));
        let (a2, w2) = (self.a * self.a, self.omega * self.omega);
        a2 * u * u * (w2 - a2 * du * du) - w2
    }

    fn radicand_scale(&self, xi: f64) -> f64 {
        (self.a * self.u(xi) * self.omega).powi(2).max(1.0)
    }

    /// `√R`, with `|R|` below the round-off floor treated as zero.
    fn root_radicand(&self, xi: f64) -> f64 {
        let r = self.radicand(xi);
        if r <= RADICAND_TOL * self.radicand_scale(xi) {
            0.0
        } else {
            r.sqrt()
        }
    }

    pub fn rho(&self, xi: f64) -> f64 {
        self.radius_radicand(xi).max(0.0).sqrt() / self.omega.abs()
    }

    fn lambda_rate(&self, xi: f64) -> f64 {
        let au = self.a * self.u(xi);
        au * self.root_radicand(xi) / (self.omega.abs() * (au * au - 1.0))
    }

    fn phi_rate(&self, xi: f64) -> f64 {
        let au = self.a * self.u(xi);
        self.root_radicand(xi) / (self.omega.abs() * au * (au * au - 1.0))
    }

    /// Checks both radicands at every grid node.
    pub fn check_feasible(&self, xi_grid: &[f64]) -> Result<()> {
        for &xi in xi_grid {
            let r0 = self.radius_radicand(xi);
            if !(r0 > 0.0) {
                return Err(GipError::FamilyInfeasible {
                    xi,
                    constraint: "a^2 U^2 - 1",
                    value: r0,
                });
            }
            let r = self.radicand(xi);
            if !(r >= -RADICAND_TOL * self.radicand_scale(xi)) {
                return Err(GipError::FamilyInfeasible {
                    xi,
                    constraint: "a^2 U^2 (omega^2 - a^2 U'^2) - omega^2",
                    value: r,
                });
            }
        }
        Ok(())
    }
}

/// `(ω, ω₀, ω₁)` with `𝒰² = ω²ξ² + 2ω₁ωξ + ω₀` (`a = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalFamily {
    pub omega: f64,
    pub omega0: f64,
    pub omega1: f64,
}

impl MinimalFamily {
    pub fn new(omega: f64, omega0: f64, omega1: f64) -> Result<Self> {
        if !(omega != 0.0 && omega.is_finite()) || !omega0.is_finite() || !omega1.is_finite() {
            return Err(GipError::Invalid(format!(
                "invalid minimal family ({omega}, {omega0}, {omega1})"
            )));
        }
        Ok(Self {
            omega,
            omega0,
            omega1,
        })
    }

    pub fn helicoid(omega: f64) -> Result<Self> {
        Self::new(omega, 1.0, 0.0)
    }

    /// `b = ω₀ − ω₁²`.
    pub fn b(&self) -> f64 {
        self.omega0 - self.omega1 * self.omega1
    }

    pub fn check(&self) -> Result<()> {
        let b = self.b();
        if !(b >= 1.0) {
            return Err(GipError::InvariantViolation(format!(
                "minimal family needs b = omega0 - omega1^2 >= 1, got {b}"
            )));
        }
        Ok(())
    }

    /// `(ωξ + ω₁)² + b`, equal to `𝒰²`.
    pub fn quadratic(&self, xi: f64) -> f64 {
        let t = self.omega * xi + self.omega1;
        t * t + self.b()
    }

    /// Centre `ξ = −ω₁/ω` of the profile.
    pub fn centre(&self) -> f64 {
        -self.omega1 / self.omega
    }
}

/// `𝒰² = (ω²ξ² + 2ω₁ωξ + ω₀)/a²` with exact derivatives and `a = 1`.
pub fn minimal_profile(fam: &MinimalFamily) -> Result<BourFamily> {
    minimal_profile_scaled(fam, 1.0)
}

/// The minimal profile for an arbitrary `a`.
pub fn minimal_profile_scaled(fam: &MinimalFamily, a: f64) -> Result<BourFamily> {
    fam.check()?;
    let f = *fam;
    let u = move |xi: f64| f.quadratic(xi).sqrt() / a;
    let du = move |xi: f64| f.omega * (f.omega * xi + f.omega1) / (a * f.quadratic(xi).sqrt());
    let ddu = move |xi: f64| {
        let uu = u(xi);
        let d = du(xi);
        (f.omega * f.omega / (a * a) - d * d) / uu
    };
    BourFamily::with_derivatives(scalar_fn(u), scalar_fn(du), scalar_fn(ddu), fam.omega, a)
}

/// Gaussian curvature `−bω²/[(ωξ + ω₁)² + b]²` of a minimal member.
pub fn minimal_gaussian(fam: &MinimalFamily, xi: f64) -> Result<f64> {
    fam.check()?;
    let p = fam.quadratic(xi);
    Ok(-fam.b() * fam.omega * fam.omega / (p * p))
}

/// A helicoidal surface in natural parameters.
#[derive(Debug, Clone)]
pub struct HelicoidalSurface {
    pub family: BourFamily,
    lambda: HermiteProfile,
    phi_offset: HermiteProfile,
    pub chi_range: (f64, f64),
    pub notes: Vec<String>,
}

impl HelicoidalSurface {
    pub fn xi_range(&self) -> (f64, f64) {
        self.lambda.range()
    }

    pub fn rho(&self, xi: f64) -> f64 {
        self.family.rho(xi)
    }

    pub fn lambda(&self, xi: f64) -> f64 {
        self.lambda.eval(xi)
    }

    /// `φ(ξ, χ) = χ/a − Φ(ξ)`.
    pub fn phi(&self, xi: f64, chi: f64) -> f64 {
        chi / self.family.a - self.phi_offset.eval(xi)
    }

    pub fn point(&self, xi: f64, chi: f64) -> Vec3 {
        let phi = self.phi(xi, chi);
        let rho = self.rho(xi);
        let t = self.family.omega * phi;
        Vec3::new(rho * t.cos(), rho * t.sin(), self.lambda(xi) + phi)
    }

    pub fn with_chi_range(mut self, chi_range: (f64, f64)) -> Self {
        self.chi_range = chi_range;
        self
    }

    /// Chart `(ξ, χ)` with the metric factor `𝒰`.
    pub fn surface(&self) -> InvariantSurface {
        let me = self.clone();
        let chart = ParamSurface::new(
            move |xi, chi| me.point(xi, chi),
            self.xi_range(),
            self.chi_range,
        );
        let fam = self.family.clone();
        let mut s = InvariantSurface::new(
            chart,
            Symmetry::Screw {
                omega: self.family.omega,
            },
        )
        .with_metric(scalar_fn(move |xi| fam.u(xi)));
        s.notes = self.notes.clone();
        s
    }
}

/// `n` nodes over `range` at the default density, at least 3.
pub fn default_xi_grid(range: (f64, f64)) -> Vec<f64> {
    let n = (((range.1 - range.0) * POINTS_PER_UNIT_XI).ceil() as usize + 1).max(3);
    uniform_grid(range.0, range.1, n)
}

fn check_grid(xi_grid: &[f64]) -> Result<()> {
    if xi_grid.len() < 2 || xi_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GipError::Invalid(
            "xi grid must be strictly increasing with at least two points".into(),
        ));
    }
    Ok(())
}

fn integrated_profile<F: Fn(f64) -> f64>(rate: F, xi_grid: &[f64]) -> Result<HermiteProfile> {
    let values = cumulative_adaptive(&rate, xi_grid, QUAD_TOL);
    let d1: Vec<f64> = xi_grid.iter().map(|&x| rate(x)).collect();
    let d2: Vec<f64> = xi_grid
        .iter()
        .map(|&x| jets::d1(&rate, x, DERIV_STEP))
        .collect();
    HermiteProfile::new(xi_grid.to_vec(), values, d1, d2)
}

fn default_chi_range(fam: &BourFamily) -> (f64, f64) {
    (0.0, 2.0 * PI * fam.a.abs() / fam.omega.abs())
}

/// Bour synthesis: `ρ` in closed form, `λ` and `Φ` by quadrature from
/// `xi_grid[0]`. Radicands are checked at every node; between nodes a
/// slightly negative `R` is clamped to zero.
pub fn bour_surface(family: &BourFamily, xi_grid: &[f64]) -> Result<HelicoidalSurface> {
    check_grid(xi_grid)?;
    family.check_feasible(xi_grid)?;
    let lambda = integrated_profile(|x| family.lambda_rate(x), xi_grid)?;
    let phi_offset = integrated_profile(|x| family.phi_rate(x), xi_grid)?;
    Ok(HelicoidalSurface {
        family: family.clone(),
        lambda,
        phi_offset,
        chi_range: default_chi_range(family),
        notes: Vec::new(),
    })
}

/// Minimal member with closed-form integrands
/// `λ' = √(b−1)√P/(P−1)`, `Φ' = √(b−1)/(√P(P−1))`, `P = 𝒰²`.
pub fn minimal_surface_embedding(
    fam: &MinimalFamily,
    xi_grid: &[f64],
) -> Result<HelicoidalSurface> {
    check_grid(xi_grid)?;
    let family = minimal_profile(fam)?;
    for &xi in xi_grid {
        let p = fam.quadratic(xi);
        if !(p - 1.0 > 0.0) {
            return Err(GipError::FamilyInfeasible {
                xi,
                constraint: "omega^2 xi^2 + 2 omega1 omega xi + omega0 - 1",
                value: p - 1.0,
            });
        }
    }
    let sb = (fam.b() - 1.0).sqrt();
    let f = *fam;
    let lambda = integrated_profile(
        |x| {
            let p = f.quadratic(x);
            sb * p.sqrt() / (p - 1.0)
        },
        xi_grid,
    )?;
    let phi_offset = integrated_profile(
        |x| {
            let p = f.quadratic(x);
            sb / (p.sqrt() * (p - 1.0))
        },
        xi_grid,
    )?;
    Ok(HelicoidalSurface {
        chi_range: default_chi_range(&family),
        family,
        lambda,
        phi_offset,
        notes: Vec::new(),
    })
}

/// Mirror image: `ω ↦ −ω`, which is `y ↦ −y` of the embedding.
pub fn enantiomorph(surface: &HelicoidalSurface) -> HelicoidalSurface {
    HelicoidalSurface {
        family: surface.family.mirrored(),
        ..surface.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelicoidalCurvatures {
    pub pair: CurvaturePair,
    /// `R = 0`: the mean-curvature formula has a vanishing denominator.
    pub singular: bool,
}

/// `K = −𝒰̈/𝒰` and `H = (a²𝒰𝒰̈ + a²𝒰̇² − ω²)/(2√R)` for the normal
/// `𝒰⁻¹(X_χ × X_ξ)`. Where `R = 0` the point is flagged; `H` is reported as
/// zero when the numerator vanishes too and NaN otherwise.
pub fn helicoidal_curvatures(family: &BourFamily, xi: f64) -> HelicoidalCurvatures {
    let (u, du, ddu) = (family.u(xi), family.du(xi), family.ddu(xi));
    let k = -ddu / u;
    let a2 = family.a * family.a;
    let num = a2 * u * ddu + a2 * du * du - family.omega * family.omega;
    let r = family.radicand(xi);
    let scale = family.radicand_scale(xi);
    if r <= RADICAND_TOL * scale {
        let h = if num.abs() <= 1e-6 * scale {
            0.0
        } else {
            f64::NAN
        };
        return HelicoidalCurvatures {
            pair: CurvaturePair { k, h },
            singular: true,
        };
    }
    HelicoidalCurvatures {
        pair: CurvaturePair {
            k,
            h: num / (2.0 * r.sqrt()),
        },
        singular: false,
    }
}

/// Natural parameters of `X(ρ, φ)` for a generating profile `λ(ρ)`.
#[derive(Debug, Clone)]
pub struct NaturalParameters {
    pub omega: f64,
    pub rho: Vec<f64>,
    /// `ξ(ρ)` with `ξ(ρ₀) = ρ₀`.
    pub xi: Vec<f64>,
    /// `χ − φ` as a function of `ρ`.
    pub chi_offset: Vec<f64>,
    dxi: Vec<f64>,
    ddxi: Vec<f64>,
}

/// `dξ = √(1 + ω²ρ²λ'²/(1 + ω²ρ²)) dρ` and `dχ = dφ + λ'/(1 + ω²ρ²) dρ`,
/// integrated from `rho_grid[0]`.
pub fn natural_parameters(
    lambda_of_rho: &ScalarFn,
    omega: f64,
    rho_grid: &[f64],
) -> Result<NaturalParameters> {
    check_grid(rho_grid)?;
    if !(omega != 0.0) {
        return Err(GipError::Invalid("omega must be non-zero".into()));
    }
    let slope =
        |r: f64| -> f64 { jets::d1(|x| lambda_of_rho(x), r, DERIV_STEP * r.abs().max(1.0)) };
    let w2 = omega * omega;
    let dxi = |r: f64| {
        let l = slope(r);
        (1.0 + w2 * r * r * l * l / (1.0 + w2 * r * r)).sqrt()
    };
    let dchi = |r: f64| slope(r) / (1.0 + w2 * r * r);
    let r0 = rho_grid[0];
    let xi: Vec<f64> = cumulative_adaptive(dxi, rho_grid, QUAD_TOL)
        .into_iter()
        .map(|v| v + r0)
        .collect();
    let chi_offset = cumulative_adaptive(dchi, rho_grid, QUAD_TOL);
    let d1: Vec<f64> = rho_grid.iter().map(|&r| dxi(r)).collect();
    let d2: Vec<f64> = rho_grid
        .iter()
        .map(|&r| jets::d1(dxi, r, DERIV_STEP * r.abs().max(1.0)))
        .collect();
    Ok(NaturalParameters {
        omega,
        rho: rho_grid.to_vec(),
        xi,
        chi_offset,
        dxi: d1,
        ddxi: d2,
    })
}

impl NaturalParameters {
    /// `ρ(ξ)` by inverting `ξ(ρ)`.
    pub fn rho_of_xi(&self) -> Result<HermiteProfile> {
        let d1: Vec<f64> = self.dxi.iter().map(|d| 1.0 / d).collect();
        let d2: Vec<f64> = self
            .dxi
            .iter()
            .zip(&self.ddxi)
            .map(|(d, dd)| -dd / d.powi(3))
            .collect();
        HermiteProfile::new(self.xi.clone(), self.rho.clone(), d1, d2)
    }

    /// `𝒰(ξ) = √(1 + ω²ρ(ξ)²)`, the member `(ω, a = 1)` of its Bour family.
    pub fn bour_family(&self) -> Result<BourFamily> {
        let r = self.rho_of_xi()?;
        let w2 = self.omega * self.omega;
        let rr = r.clone();
        let u = move |xi: f64| (1.0 + w2 * rr.eval(xi).powi(2)).sqrt();
        let du = {
            let r = r.clone();
            move |xi: f64| {
                let (v, d, _) = r.eval3(xi);
                w2 * v * d / (1.0 + w2 * v * v).sqrt()
            }
        };
        let ddu = move |xi: f64| {
            let (v, d, dd) = r.eval3(xi);
            let uu = (1.0 + w2 * v * v).sqrt();
            let du = w2 * v * d / uu;
            (w2 * (d * d + v * dd) - du * du) / uu
        };
        BourFamily::with_derivatives(scalar_fn(u), scalar_fn(du), scalar_fn(ddu), self.omega, 1.0)
    }
}

/// Numeric checks of a synthesized surface against its profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BourCheck {
    /// Largest `|g₁₁ − 1|`, `|g₁₂|`, `|g₂₂ − 𝒰²|`.
    pub metric_error: f64,
    /// Largest `|K − (−𝒰̈/𝒰)|`.
    pub gaussian_error: f64,
    /// Largest `|H|`.
    pub max_abs_h: f64,
    /// Largest `|H − H_formula|` over non-singular points (chart normal
    /// `X_ξ × X_χ`, the negative of the formula's normal).
    pub mean_error: f64,
}

/// Numeric forms on an `nxi × nchi` interior grid compared with the profile.
pub fn check_surface(
    hs: &HelicoidalSurface,
    nxi: usize,
    nchi: usize,
    exec: Execution,
) -> Result<BourCheck> {
    let s = hs.surface();
    let h = ORACLE_STEP;
    let xs = interior_samples(s.u_range(), nxi, 3.0 * h);
    let cs = interior_samples(s.v_range(), nchi, 3.0 * h);
    let rows: Vec<Result<[f64; 4]>> = map_range(exec, nxi * nchi, |k| {
        let (xi, chi) = (xs[k / nchi], cs[k % nchi]);
        let f = s.forms(xi, chi, h)?;
        let p = crate::geometry::curvatures_from_forms(&f);
        let u = hs.family.u(xi);
        let metric = (f.g11 - 1.0)
            .abs()
            .max(f.g12.abs())
            .max((f.g22 - u * u).abs());
        let formula = helicoidal_curvatures(&hs.family, xi);
        let mean = if formula.singular || formula.pair.h.is_nan() {
            0.0
        } else {
            (p.h + formula.pair.h).abs()
        };
        Ok([metric, (p.k - formula.pair.k).abs(), p.h.abs(), mean])
    });
    let mut out = [0.0_f64; 4];
    for r in rows {
        let r = r?;
        for i in 0..4 {
            out[i] = out[i].max(r[i]);
        }
    }
    Ok(BourCheck {
        metric_error: out[0],
        gaussian_error: out[1],
        max_abs_h: out[2],
        mean_error: out[3],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::surface_curvatures;

    fn ex() -> Execution {
        Execution::default()
    }

    fn quadratic_profile(c: f64) -> impl Fn(f64) -> f64 + Send + Sync + Clone {
        move |xi: f64| (c + xi * xi).sqrt()
    }

    #[test]
    fn helicoid_profile_gives_helicoid() {
        let fam = BourFamily::new(quadratic_profile(1.0), 1.0, 1.0).unwrap();
        let hs = bour_surface(&fam, &default_xi_grid((0.2, 2.0))).unwrap();
        for &xi in &[0.3, 1.0, 1.9] {
            assert!((hs.rho(xi) - xi).abs() < 1e-14);
            assert!(hs.lambda(xi).abs() < 1e-14);
        }
        let c = helicoidal_curvatures(&fam, 0.0);
        assert!((c.pair.k + 1.0).abs() < 1e-7);
        assert_eq!(c.pair.h, 0.0);
        assert!(c.singular);
    }

    #[test]
    fn constant_profile_lies_on_a_cylinder() {
        let (u0, w, a) = (1.5, 2.0, 1.2);
        let fam = BourFamily::new(move |_| u0, w, a).unwrap();
        let hs = bour_surface(&fam, &default_xi_grid((0.0, 1.0))).unwrap();
        let r = ((a * u0).powi(2) - 1.0).sqrt() / w;
        for &(xi, chi) in &[(0.1, 0.3), (0.5, 2.0), (0.9, -1.0)] {
            let p = hs.point(xi, chi);
            assert!(((p.x * p.x + p.y * p.y).sqrt() - r).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_families_name_the_constraint() {
        let fam = BourFamily::new(|_| 0.5, 1.0, 1.0).unwrap();
        match bour_surface(&fam, &[0.0, 1.0]) {
            Err(GipError::FamilyInfeasible { constraint, .. }) => {
                assert_eq!(constraint, "a^2 U^2 - 1")
            }
            other => panic!("{other:?}"),
        }
        // steep profile: a²𝒰̇² > ω²
        let steep = BourFamily::new(|x: f64| 2.0 + 3.0 * x, 1.0, 1.0).unwrap();
        assert!(matches!(
            bour_surface(&steep, &[0.0, 1.0]),
            Err(GipError::FamilyInfeasible { .. })
        ));
    }

    #[test]
    fn minimal_family_constraints() {
        assert!(minimal_profile(&MinimalFamily::new(1.0, 0.5, 0.0).unwrap()).is_err());
        assert!(minimal_profile(&MinimalFamily::new(1.0, 2.0, 1.0).unwrap()).is_ok());
        let hel = minimal_profile(&MinimalFamily::helicoid(1.0).unwrap()).unwrap();
        assert!((hel.u(0.7) - (1.0f64 + 0.49).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn minimal_gaussian_examples() {
        let hel = MinimalFamily::helicoid(1.0).unwrap();
        assert_eq!(minimal_gaussian(&hel, 0.0).unwrap(), -1.0);
        let f = MinimalFamily::new(2.0, 5.0, 1.0).unwrap();
        let prof = minimal_profile(&f).unwrap();
        for i in -20..=20 {
            let xi = 0.37 * i as f64;
            let k = minimal_gaussian(&f, xi).unwrap();
            assert!(k < 0.0);
            // identity with −𝒰̈/𝒰 (numeric second derivative)
            let num: f64 = -jets::d2(|x| prof.u(x), xi, 1e-3) / prof.u(xi);
            assert!((k - num).abs() < 1e-8, "{xi}: {k} vs {num}");
            assert!((k + prof.ddu(xi) / prof.u(xi)).abs() < 1e-14 * k.abs().max(1.0));
        }
        let far = minimal_gaussian(&hel, 1e3).unwrap();
        assert!((far * 1e12 + 1.0).abs() < 1e-5);
    }

    #[test]
    fn minimal_embeddings_are_minimal_and_isometric() {
        for (w, w0, w1, range) in [
            (1.0, 3.0, 0.0, (-2.0, 2.0)),
            (2.0, 5.0, 1.0, (-2.0, 1.0)),
            (1.0, 1.0, 0.0, (0.2, 2.0)),
        ] {
            let fam = MinimalFamily::new(w, w0, w1).unwrap();
            let hs = minimal_surface_embedding(&fam, &default_xi_grid(range)).unwrap();
            let c = check_surface(&hs, 16, 5, ex()).unwrap();
            assert!(c.max_abs_h < 1e-6, "{fam:?} {c:?}");
            assert!(c.metric_error < 1e-6, "{fam:?} {c:?}");
            assert!(c.gaussian_error < 1e-6, "{fam:?} {c:?}");
        }
    }

    #[test]
    fn closed_form_and_general_routes_agree() {
        let fam = MinimalFamily::new(1.0, 3.0, 0.5).unwrap();
        let grid = default_xi_grid((-1.0, 1.5));
        let a = minimal_surface_embedding(&fam, &grid).unwrap();
        let b = bour_surface(&minimal_profile(&fam).unwrap(), &grid).unwrap();
        for &(xi, chi) in &[(-0.9, 0.1), (0.0, 1.0), (1.4, 3.0)] {
            assert!((a.point(xi, chi) - b.point(xi, chi)).norm() < 1e-10);
        }
    }

    #[test]
    fn helicoid_member_has_flat_lambda() {
        let fam = MinimalFamily::helicoid(1.5).unwrap();
        let hs = minimal_surface_embedding(&fam, &default_xi_grid((0.3, 1.0))).unwrap();
        assert!(hs.lambda(0.8).abs() < 1e-15);
    }

    #[test]
    fn parameter_a_only_reparametrizes() {
        let fam = MinimalFamily::new(1.0, 3.0, 0.0).unwrap();
        let grid = default_xi_grid((-1.0, 1.0));
        let one = bour_surface(&minimal_profile(&fam).unwrap(), &grid).unwrap();
        let two = bour_surface(&minimal_profile_scaled(&fam, 2.0).unwrap(), &grid).unwrap();
        for &(xi, chi) in &[(-0.5, 0.2), (0.3, 1.7), (0.9, -2.0)] {
            assert!((one.point(xi, chi) - two.point(xi, 2.0 * chi)).norm() < 1e-12);
        }
    }

    #[test]
    fn bour_family_shares_metric_and_k_but_not_h() {
        let grid = default_xi_grid((0.2, 2.0));
        let p = quadratic_profile(1.0);
        let f1 = BourFamily::new(p.clone(), 1.0, 1.0).unwrap();
        let f2 = BourFamily::new(p, 2.0, 1.5).unwrap();
        let s1 = bour_surface(&f1, &grid).unwrap();
        let s2 = bour_surface(&f2, &grid).unwrap();
        let c1 = check_surface(&s1, 12, 4, ex()).unwrap();
        let c2 = check_surface(&s2, 12, 4, ex()).unwrap();
        assert!(
            c1.metric_error < 1e-6 && c2.metric_error < 1e-6,
            "{c1:?} {c2:?}"
        );
        assert!(c1.gaussian_error < 1e-5 && c2.gaussian_error < 1e-5);
        assert!(c2.mean_error < 1e-5, "{c2:?}");
        let h2 = helicoidal_curvatures(&f2, 1.0).pair.h;
        assert!(h2.abs() > 1e-3);
    }

    #[test]
    fn mirror_pair() {
        let fam = MinimalFamily::new(1.0, 3.0, 0.0).unwrap();
        let hs = minimal_surface_embedding(&fam, &default_xi_grid((-1.0, 1.0))).unwrap();
        let m = enantiomorph(&hs);
        let mm = enantiomorph(&m);
        let (s, sm) = (hs.surface(), m.surface());
        for &(xi, chi) in &[(-0.7, 0.4), (0.2, 2.2), (0.8, 5.0)] {
            let (p, q) = (hs.point(xi, chi), m.point(xi, chi));
            assert_eq!(q, Vec3::new(p.x, -p.y, p.z));
            assert_eq!(mm.point(xi, chi), p);
            let (f, g) = (
                s.forms(xi, chi, ORACLE_STEP).unwrap(),
                sm.forms(xi, chi, ORACLE_STEP).unwrap(),
            );
            assert!(
                (f.g11 - g.g11).abs() < 1e-10
                    && (f.g12 - g.g12).abs() < 1e-10
                    && (f.g22 - g.g22).abs() < 1e-10
            );
            let (k1, k2) = (
                surface_curvatures(&s.chart, xi, chi, ORACLE_STEP).unwrap(),
                surface_curvatures(&sm.chart, xi, chi, ORACLE_STEP).unwrap(),
            );
            assert!((k1.k - k2.k).abs() < 1e-9);
            assert!((k1.h.abs() - k2.h.abs()).abs() < 1e-9);
        }
    }

    #[test]
    fn natural_parameter_examples() {
        let flat =
            natural_parameters(&scalar_fn(|_| 0.0), 1.3, &uniform_grid(0.5, 2.0, 31)).unwrap();
        for (r, (x, c)) in flat.rho.iter().zip(flat.xi.iter().zip(&flat.chi_offset)) {
            assert!((x - r).abs() < 1e-14 && c.abs() < 1e-14);
        }
        let lin =
            natural_parameters(&scalar_fn(|r| 0.2 * r), 1.0, &uniform_grid(0.5, 2.0, 31)).unwrap();
        assert!(lin.xi.windows(2).all(|w| w[1] - w[0] >= 0.05 - 1e-15));
        // large ω: dξ/dρ → √(1 + λ'²)
        let big =
            natural_parameters(&scalar_fn(|r| 0.2 * r), 1e4, &uniform_grid(0.5, 2.0, 31)).unwrap();
        let rate = (big.xi[30] - big.xi[0]) / 1.5;
        assert!((rate - (1.04f64).sqrt()).abs() < 1e-7, "{rate}");
    }

    #[test]
    fn natural_parameters_feed_bour_back_to_the_same_profile() {
        let omega = 1.2;
        let lam = |r: f64| 0.3 * r + 0.1 * r * r;
        let grid = uniform_grid(0.5, 2.0, 600);
        let np = natural_parameters(&scalar_fn(lam), omega, &grid).unwrap();
        let fam = np.bour_family().unwrap();
        let xi_grid = default_xi_grid((np.xi[0], np.xi[np.xi.len() - 1]));
        let hs = bour_surface(&fam, &xi_grid).unwrap();
        let rho = np.rho_of_xi().unwrap();
        for &xi in &[xi_grid[10], 1.0, 1.6, xi_grid[xi_grid.len() - 10]] {
            let r = rho.eval(xi);
            assert!((hs.rho(xi) - r).abs() < 1e-9);
            assert!((hs.lambda(xi) - (lam(r) - lam(0.5))).abs() < 1e-7, "{xi}");
        }
    }
}
