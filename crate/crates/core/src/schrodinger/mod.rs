//! Separated Schrödinger problems on invariant surfaces.
//!
//! On a metric `du² + f(u)² dv²` with the geometric potential
//! `−(ħ²/2m)(H² − K)`, the substitution `ψ = A(u) B(v)/√f` leaves
//!
//! ```text
//! −(ħ²/2m) A'' + V A = E A
//! V = −(ħ²/2m)[ḟ²/(4f²) + f̈/(2f) + H²] + (ħ²/2m) λ_sep / f²
//! ```
//!
//! with `B'' = −λ_sep B`. Spectra of `A` are computed by second-order
//! finite differences and [`eigen::RingTridiagonal`].

pub mod eigen;

use crate::error::{GipError, Result};
use crate::geometry::{jets, PhysicalConstants};
use crate::helicoidal::MinimalFamily;
use crate::par::{map_slice, Execution};
use crate::profile::{scalar_fn, ScalarFn};
use crate::quad::uniform_grid;

pub use eigen::RingTridiagonal;

/// Largest relative spread of grid spacings accepted as uniform.
pub const UNIFORM_GRID_TOL: f64 = 1e-9;

/// Invariant metric factor `f(u) > 0`.
#[derive(Clone)]
pub struct MetricProfile {
    f: ScalarFn,
}

impl std::fmt::Debug for MetricProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("MetricProfile")
    }
}

impl MetricProfile {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self { f: scalar_fn(f) }
    }

    pub fn from_fn(f: ScalarFn) -> Self {
        Self { f }
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    /// Values on `grid`, failing where `f ≤ 0`.
    pub fn sample(&self, grid: &[f64]) -> Result<Vec<f64>> {
        grid.iter()
            .map(|&u| {
                let v = self.eval(u);
                if v > 0.0 && v.is_finite() {
                    Ok(v)
                } else {
                    Err(GipError::Invalid(format!(
                        "metric factor must be positive, f({u}) = {v}"
                    )))
                }
            })
            .collect()
    }
}

/// A sampled 1D potential.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePotential1D {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub lambda_sep: f64,
    pub m_chi: Option<i64>,
}

impl EffectivePotential1D {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() || u.len() < 2 {
            return Err(GipError::Invalid(
                "potential needs matching u and V samples".into(),
            ));
        }
        if u.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GipError::Invalid(
                "potential grid must be strictly increasing".into(),
            ));
        }
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(GipError::Numeric(format!(
                "potential is not finite at u = {}",
                u[i]
            )));
        }
        Ok(Self {
            u,
            v,
            lambda_sep: 0.0,
            m_chi: None,
        })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &[f64], v: F) -> Result<Self> {
        Self::new(grid.to_vec(), grid.iter().map(|&u| v(u)).collect())
    }

    fn tagged(mut self, lambda_sep: f64, m_chi: Option<i64>) -> Self {
        self.lambda_sep = lambda_sep;
        self.m_chi = m_chi;
        self
    }

    /// Adds a user potential, for instance an external field.
    pub fn plus<F: Fn(f64) -> f64>(mut self, extra: F) -> Result<Self> {
        for (v, &u) in self.v.iter_mut().zip(&self.u) {
            *v += extra(u);
        }
        Self::new(self.u, self.v).map(|p| p.tagged(self.lambda_sep, self.m_chi))
    }

    /// Common spacing, or an error if the grid is not uniform.
    pub fn spacing(&self) -> Result<f64> {
        uniform_spacing(&self.u)
    }

    /// Trapezoidal `∫V du`.
    pub fn integral(&self) -> f64 {
        self.u
            .windows(2)
            .zip(self.v.windows(2))
            .map(|(u, v)| 0.5 * (u[1] - u[0]) * (v[0] + v[1]))
            .sum()
    }
}

fn uniform_spacing(u: &[f64]) -> Result<f64> {
    let n = u.len();
    let h = (u[n - 1] - u[0]) / (n - 1) as f64;
    let deviation = u
        .windows(2)
        .map(|w| ((w[1] - w[0]) - h).abs() / h)
        .fold(0.0, f64::max);
    if deviation > UNIFORM_GRID_TOL {
        return Err(GipError::NonUniformGrid { deviation });
    }
    Ok(h)
}

/// First and second derivatives of grid samples: central differences inside,
/// second-order one-sided stencils at the two ends.
pub fn grid_derivatives(y: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = y.len();
    assert!(n >= 4, "need at least four samples");
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 1..n - 1 {
        d1[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
        d2[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
    }
    d1[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
    d1[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
    d2[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / (h * h);
    d2[n - 1] = (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / (h * h);
    (d1, d2)
}

/// `V = −(ħ²/2m)[ḟ²/(4f²) + f̈/(2f) + H²] + (ħ²/2m) λ_sep/f²` on a uniform grid.
pub fn effective_potential(
    f: &MetricProfile,
    h: &ScalarFn,
    c: &PhysicalConstants,
    lambda_sep: f64,
    grid: &[f64],
) -> Result<EffectivePotential1D> {
    check_grid(grid)?;
    let step = uniform_spacing(grid)?;
    let fv = f.sample(grid)?;
    let (d1, d2) = grid_derivatives(&fv, step);
    let k = c.kinetic();
    let v = grid
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let (f, fd, fdd) = (fv[i], d1[i], d2[i]);
            let hu = h(u);
            -k * (fd * fd / (4.0 * f * f) + fdd / (2.0 * f) + hu * hu) + k * lambda_sep / (f * f)
        })
        .collect();
    EffectivePotential1D::new(grid.to_vec(), v).map(|p| p.tagged(lambda_sep, None))
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 4 {
        return Err(GipError::Invalid("grid needs at least four points".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GipError::Invalid("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `H_rev = [x(ẋz̈ − ẍż) + ż]/(2x)` for an arc-length meridian `(x(u), z(u))`.
pub fn h_rev_from_meridian(x: ScalarFn, z: ScalarFn, step: f64) -> ScalarFn {
    scalar_fn(move |u| {
        let (xv, xd, xdd) = (
            x(u),
            jets::d1(|t| x(t), u, step),
            jets::d2(|t| x(t), u, step),
        );
        let (zd, zdd) = (jets::d1(|t| z(t), u, step), jets::d2(|t| z(t), u, step));
        (xv * (xd * zdd - xdd * zd) + zd) / (2.0 * xv)
    })
}

/// `V = −(ħ²/2m)[(ẋ² + 2xẍ − 4m_χ²)/(4x²) + H_rev²]`.
pub fn revolution_effective(
    x: &ScalarFn,
    h_rev: &ScalarFn,
    m_chi: i64,
    c: &PhysicalConstants,
    grid: &[f64],
) -> Result<EffectivePotential1D> {
    check_grid(grid)?;
    let step = uniform_spacing(grid)?;
    let xv = MetricProfile::from_fn(x.clone()).sample(grid)?;
    let (d1, d2) = grid_derivatives(&xv, step);
    let m2 = (m_chi * m_chi) as f64;
    let k = c.kinetic();
    let v = grid
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let (x, xd, xdd) = (xv[i], d1[i], d2[i]);
            let h = h_rev(u);
            -k * ((xd * xd + 2.0 * x * xdd - 4.0 * m2) / (4.0 * x * x) + h * h)
        })
        .collect();
    EffectivePotential1D::new(grid.to_vec(), v).map(|p| p.tagged(m2, Some(m_chi)))
}

/// `k_χ = m_χ ω`.
pub fn quantize_k_chi(m_chi: i64, omega: f64) -> f64 {
    m_chi as f64 * omega
}

/// `V(ξ) = −(ħ²/2m)(ω²/4){ b/[b + (ωξ+ω₁)²]² + (1 − 4m_χ²)/[b + (ωξ+ω₁)²] }`.
pub fn helicoidal_minimal_veff(
    fam: &MinimalFamily,
    m_chi: i64,
    c: &PhysicalConstants,
    xi_grid: &[f64],
) -> Result<EffectivePotential1D> {
    fam.check()?;
    let (b, w) = (fam.b(), fam.omega);
    let m2 = (m_chi * m_chi) as f64;
    let k = c.kinetic();
    let v = |xi: f64| {
        let p = fam.quadratic(xi);
        -k * 0.25 * w * w * (b / (p * p) + (1.0 - 4.0 * m2) / p)
    };
    let kc = quantize_k_chi(m_chi, w);
    EffectivePotential1D::from_fn(xi_grid, v).map(|p| p.tagged(kc * kc, Some(m_chi)))
}

/// Boundary condition of a 1D problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// `A = 0` at both grid ends.
    Dirichlet,
    /// The last grid point is identified with the first.
    Periodic,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Dirichlet => "dirichlet",
            Boundary::Periodic => "periodic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid: Vec<f64>,
    pub energies: Vec<f64>,
    /// Eigenvectors on the full grid with `Σ ψ² h = 1`. Dirichlet states are
    /// zero at both ends; periodic states repeat the first value at the end.
    pub states: Vec<Vec<f64>>,
    pub boundary: Boundary,
    pub bound: Vec<bool>,
}

impl Spectrum {
    pub fn bound_count(&self) -> usize {
        self.bound.iter().filter(|&&b| b).count()
    }

    /// Grid index of the largest `|ψ_k|²`.
    pub fn density_argmax(&self, k: usize) -> usize {
        let s = &self.states[k];
        let mut best = 0;
        for (i, v) in s.iter().enumerate() {
            if v * v > s[best] * s[best] {
                best = i;
            }
        }
        best
    }

    /// `Σ ψ_k² h` over the distinct grid points.
    pub fn norm(&self, k: usize) -> f64 {
        let h = (self.grid[self.grid.len() - 1] - self.grid[0]) / (self.grid.len() - 1) as f64;
        let s = &self.states[k];
        let n = match self.boundary {
            Boundary::Dirichlet => s.len(),
            Boundary::Periodic => s.len() - 1,
        };
        s[..n].iter().map(|v| v * v).sum::<f64>() * h
    }
}

/// Lowest `n_states` eigenpairs of `−(ħ²/2m)D² + V` with the three-point
/// second difference.
pub fn solve_1d_eigen(
    v: &EffectivePotential1D,
    bc: Boundary,
    c: &PhysicalConstants,
    n_states: usize,
    exec: Execution,
) -> Result<Spectrum> {
    let h = v.spacing()?;
    let n = v.u.len();
    let available = n.saturating_sub(2);
    if n_states == 0 || n_states > available {
        return Err(GipError::TooManyStates {
            requested: n_states,
            available,
        });
    }
    let t = c.kinetic() / (h * h);
    let (range, corner) = match bc {
        Boundary::Dirichlet => (1..n - 1, 0.0),
        Boundary::Periodic => (0..n - 1, -t),
    };
    let m = range.len();
    if m < 3 {
        return Err(GipError::Invalid(
            "grid too small for the boundary condition".into(),
        ));
    }
    let diag: Vec<f64> = v.v[range.clone()].iter().map(|x| 2.0 * t + x).collect();
    let mat = RingTridiagonal::new(diag, vec![-t; m - 1], corner);
    let (energies, vectors) = mat.lowest(n_states, exec);
    let scale = 1.0 / h.sqrt();
    let states = vectors
        .into_iter()
        .map(|x| {
            let mut full = vec![0.0; n];
            for (j, val) in x.into_iter().enumerate() {
                full[range.start + j] = val * scale;
            }
            if bc == Boundary::Periodic {
                full[n - 1] = full[0];
            }
            full
        })
        .collect();
    let bound = energies.iter().map(|&e| e < 0.0).collect();
    Ok(Spectrum {
        grid: v.u.clone(),
        energies,
        states,
        boundary: bc,
        bound,
    })
}

/// `V ≤ 0` everywhere and `∫V du < 0`: a sufficient condition for a bound
/// state in one dimension.
pub fn bound_state_criterion(v: &EffectivePotential1D) -> bool {
    v.v.iter().all(|&x| x <= 0.0) && v.integral() < 0.0
}

/// Quantum numbers of a cylinder level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantumNumbersCyl {
    /// Cross-section number, from 1 (open) or 0 (closed).
    pub n_u: usize,
    /// Axial number, from 1.
    pub n_v: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderLevel {
    pub numbers: QuantumNumbersCyl,
    pub energy: f64,
}

/// `E(n_u, n_v) = h²n_v²/(8mL_v²) + E_{κ,n_u}`, where `E_{κ,n_u}` are the
/// lowest `n_max` cross-section levels in `−ħ²κ²/8m` on `[0, L_u]` and
/// `n_v = 1..=n_max`. Closed sections are periodic and their levels pair up,
/// so the `i`-th one carries `n_u = ⌊(i+1)/2⌋`.
pub fn cylinder_spectrum(
    kappa: &ScalarFn,
    l_u: f64,
    l_v: f64,
    closed: bool,
    c: &PhysicalConstants,
    n_max: usize,
    points: usize,
) -> Result<Vec<CylinderLevel>> {
    if !(l_u > 0.0) || !(l_v > 0.0) {
        return Err(GipError::Invalid(format!(
            "box lengths must be positive (L_u = {l_u}, L_v = {l_v})"
        )));
    }
    let grid = uniform_grid(0.0, l_u, points.max(5));
    let k8 = c.hbar() * c.hbar() / (8.0 * c.mass());
    let pot = EffectivePotential1D::from_fn(&grid, |u| {
        let k = kappa(u);
        -k8 * k * k
    })?;
    let bc = if closed {
        Boundary::Periodic
    } else {
        Boundary::Dirichlet
    };
    let cross = solve_1d_eigen(&pot, bc, c, n_max, Execution::default())?;
    let hp = c.planck();
    let mut out = Vec::with_capacity(n_max * n_max);
    for (i, &e) in cross.energies.iter().enumerate() {
        let n_u = if closed { i.div_ceil(2) } else { i + 1 };
        for n_v in 1..=n_max {
            let axial = hp * hp * (n_v * n_v) as f64 / (8.0 * c.mass() * l_v * l_v);
            out.push(CylinderLevel {
                numbers: QuantumNumbersCyl { n_u, n_v },
                energy: axial + e,
            });
        }
    }
    Ok(out)
}

/// `ξ = √b ξ̃ − ω₁/ω` carries the minimal-family equation into the helicoid
/// equation, whose eigenvalues are `b E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelicoidMap {
    pub scale: f64,
    pub shift: f64,
    pub energy_factor: f64,
}

impl HelicoidMap {
    pub fn xi(&self, xi_tilde: f64) -> f64 {
        self.scale * xi_tilde + self.shift
    }

    pub fn xi_tilde(&self, xi: f64) -> f64 {
        (xi - self.shift) / self.scale
    }
}

pub fn map_to_helicoid(fam: &MinimalFamily) -> Result<HelicoidMap> {
    fam.check()?;
    let b = fam.b();
    Ok(HelicoidMap {
        scale: b.sqrt(),
        shift: fam.centre(),
        energy_factor: b,
    })
}

/// Box for helicoidal spectra, centred on `ξ = −ω₁/ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxOptions {
    /// Initial half width; `None` means `20/|ω|`.
    pub half_width: Option<f64>,
    /// Grid spacing; `None` means `0.01/|ω|`.
    pub spacing: Option<f64>,
    pub n_states: usize,
    /// Relative change of bound energies accepted when the box is doubled.
    pub tolerance: f64,
    pub max_doublings: usize,
}

impl Default for BoxOptions {
    fn default() -> Self {
        Self {
            half_width: None,
            spacing: None,
            n_states: 4,
            tolerance: 1e-4,
            max_doublings: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxedSpectrum {
    pub m_chi: i64,
    pub spectrum: Spectrum,
    pub half_width: f64,
    pub centre: f64,
    /// Bound energies moved by at most the tolerance on the last doubling.
    pub converged: bool,
    /// Largest relative change of the ground state between the last two boxes.
    pub last_change: f64,
    pub potential: EffectivePotential1D,
}

fn box_grid(centre: f64, half: f64, spacing: f64) -> Vec<f64> {
    let cells = ((2.0 * half / spacing).round() as usize).max(4);
    let cells = cells + cells % 2;
    uniform_grid(centre - half, centre + half, cells + 1)
}

/// Dirichlet spectrum of the minimal-family equation, doubling the box until
/// the ground state, if bound, moves by at most the relative tolerance.
pub fn helicoid_spectrum(
    fam: &MinimalFamily,
    m_chi: i64,
    c: &PhysicalConstants,
    opts: &BoxOptions,
    exec: Execution,
) -> Result<BoxedSpectrum> {
    fam.check()?;
    let w = fam.omega.abs();
    let spacing = opts.spacing.unwrap_or(0.01 / w);
    let mut half = opts.half_width.unwrap_or(20.0 / w);
    if !(spacing > 0.0 && half > 2.0 * spacing) {
        return Err(GipError::Invalid(format!(
            "box half width {half} and spacing {spacing} are inconsistent"
        )));
    }
    let centre = fam.centre();
    let solve = |half: f64| -> Result<(Spectrum, EffectivePotential1D)> {
        let grid = box_grid(centre, half, spacing);
        let pot = helicoidal_minimal_veff(fam, m_chi, c, &grid)?;
        let s = solve_1d_eigen(&pot, Boundary::Dirichlet, c, opts.n_states, exec)?;
        Ok((s, pot))
    };
    let (mut spec, mut pot) = solve(half)?;
    let mut change = f64::INFINITY;
    let mut converged = false;
    for _ in 0..opts.max_doublings {
        if !spec.bound[0] {
            converged = true;
            change = 0.0;
            break;
        }
        let (next, next_pot) = solve(2.0 * half)?;
        let (e0, e1) = (spec.energies[0], next.energies[0]);
        change = (e1 - e0).abs() / e1.abs();
        half *= 2.0;
        spec = next;
        pot = next_pot;
        if change <= opts.tolerance {
            converged = true;
            break;
        }
    }
    Ok(BoxedSpectrum {
        m_chi,
        spectrum: spec,
        half_width: half,
        centre,
        converged,
        last_change: change,
        potential: pot,
    })
}

/// [`helicoid_spectrum`] for several `m_χ`, each solve single-threaded and
/// the sweep points spread over `exec`.
pub fn sweep_m_chi(
    fam: &MinimalFamily,
    m_values: &[i64],
    c: &PhysicalConstants,
    opts: &BoxOptions,
    exec: Execution,
) -> Result<Vec<BoxedSpectrum>> {
    map_slice(exec, m_values, |&m| {
        helicoid_spectrum(fam, m, c, opts, Execution::Sequential)
    })
    .into_iter()
    .collect()
}

/// Potential of a cylinder cross section, `−ħ²κ²/8m`, on `grid`.
pub fn cylinder_potential(
    kappa: &ScalarFn,
    c: &PhysicalConstants,
    grid: &[f64],
) -> Result<EffectivePotential1D> {
    let k8 = c.hbar() * c.hbar() / (8.0 * c.mass());
    EffectivePotential1D::from_fn(grid, |u| {
        let k = kappa(u);
        -k8 * k * k
    })
}
