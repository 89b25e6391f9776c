//! Job specification files.
//!
//! A job is one TOML document. `mode` picks the pipeline and the section of
//! the same name carries its parameters:
//!
//! ```toml
//! mode = "helicoid"
//! units = "natural"
//!
//! [helicoid]
//! kind = "minimal"
//! omega = 1.0
//! omega0 = 3.0
//! omega1 = 0.0
//! xi_range = [-2.0, 2.0]
//!
//! [mesh]
//! nu = 64
//! nv = 64
//!
//! [sweep]
//! "helicoid.omega0" = [2.0, 3.0]
//! ```
//!
//! Expressions are strings in one variable (`s` for curves and cylinders,
//! `rho` for revolution potentials, `xi` for helicoidal profiles).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::PhysicalConstants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Curve,
    Cylinder,
    Revolve,
    Helicoid,
    Spectrum,
    Verify,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Curve => "curve",
            Mode::Cylinder => "cylinder",
            Mode::Revolve => "revolve",
            Mode::Helicoid => "helicoid",
            Mode::Spectrum => "spectrum",
            Mode::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// `ħ = m = 1`.
    #[default]
    Natural,
    /// SI with the electron mass.
    Si,
}

impl Units {
    pub fn name(self) -> &'static str {
        match self {
            Units::Natural => "natural",
            Units::Si => "si",
        }
    }

    pub fn constants(self) -> PhysicalConstants {
        match self {
            Units::Natural => PhysicalConstants::natural(),
            Units::Si => PhysicalConstants::si_electron(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub mode: Mode,
    #[serde(default)]
    pub units: Units,
    pub curve: Option<CurveJob>,
    pub cylinder: Option<CylinderJob>,
    pub revolve: Option<RevolveJob>,
    pub helicoid: Option<HelicoidJob>,
    pub spectrum: Option<SpectrumJob>,
    pub verify: Option<VerifyJob>,
    pub mesh: Option<MeshJob>,
    /// Parameter lists keyed by dotted field path. Expanded before parsing.
    pub sweep: Option<toml::Table>,
}

fn default_step() -> f64 {
    1e-3
}
fn default_samples() -> usize {
    200
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJob {
    /// `κ(s)`; exclusive with `potential`.
    pub kappa: Option<String>,
    /// `V(s) ≤ 0`, turned into `κ = √(−8mV/ħ²)`.
    pub potential: Option<String>,
    /// `τ(s)`; a non-planar curve is only built by Frenet integration.
    pub tau: Option<String>,
    pub s_range: [f64; 2],
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default)]
    pub heading: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}
fn default_t_range() -> [f64; 2] {
    [0.0, 1.0]
}
fn default_points() -> usize {
    2001
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderJob {
    /// Mean curvature `H(s)` along the cross section.
    pub h: String,
    #[serde(default = "default_axis")]
    pub axis: [f64; 3],
    pub s_range: [f64; 2],
    #[serde(default = "default_t_range")]
    pub t_range: [f64; 2],
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default)]
    pub heading: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Number of cross-section and axial levels; no spectrum when absent.
    pub n_states: Option<usize>,
    #[serde(default = "default_points")]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisKind {
    #[default]
    Vertical,
    Horizontal,
}

fn plus() -> i8 {
    1
}
fn default_rho_points() -> usize {
    4001
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevolveJob {
    /// `U(ρ) ≥ 0`.
    pub u: String,
    pub a1: f64,
    #[serde(default)]
    pub a2: f64,
    pub rho0: f64,
    pub rho_range: [f64; 2],
    #[serde(default = "default_rho_points")]
    pub rho_points: usize,
    #[serde(default)]
    pub axis: AxisKind,
    #[serde(default = "plus")]
    pub sign_a: i8,
    #[serde(default = "plus")]
    pub sign_lambda: i8,
    /// Axial extent used when the horizontal dual is a round cylinder.
    #[serde(default = "default_t_range")]
    pub cylinder_length: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HelicoidKind {
    Minimal,
    Bour,
}

fn one() -> f64 {
    1.0
}
fn default_check() -> [usize; 2] {
    [41, 16]
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiSelect {
    pub m_chi: i64,
    #[serde(default)]
    pub state: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelicoidJob {
    pub kind: HelicoidKind,
    pub omega: f64,
    pub omega0: Option<f64>,
    pub omega1: Option<f64>,
    /// Metric profile `𝒰(ξ)` of a Bour family.
    pub u: Option<String>,
    #[serde(default = "one")]
    pub a: f64,
    pub xi_range: [f64; 2],
    pub chi_range: Option<[f64; 2]>,
    /// Build the enantiomorph (`ω ↦ −ω`).
    #[serde(default)]
    pub mirror: bool,
    /// Oracle grid `[nξ, nχ]`.
    #[serde(default = "default_check")]
    pub check: [usize; 2],
    /// Attach `|ψ|²` of a bound-state solve to the mesh (minimal kind only).
    pub psi: Option<PsiSelect>,
}

fn default_n_states() -> usize {
    4
}
fn default_tolerance() -> f64 {
    1e-4
}
fn default_doublings() -> usize {
    4
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumJob {
    pub omega: f64,
    pub omega0: f64,
    pub omega1: f64,
    pub m_chi: Vec<i64>,
    #[serde(default = "default_n_states")]
    pub n_states: usize,
    pub half_width: Option<f64>,
    pub spacing: Option<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_doublings")]
    pub max_doublings: usize,
    /// Also write the potential and states of every `m_χ`.
    #[serde(default = "yes")]
    pub states: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyJob {
    /// A `report.toml` from an earlier run, relative to the spec file.
    pub run: String,
    /// Accepted absolute difference between recorded and recomputed errors.
    #[serde(default)]
    pub tolerance: f64,
}

fn default_res() -> usize {
    64
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshJob {
    #[serde(default = "default_res")]
    pub nu: usize,
    #[serde(default = "default_res")]
    pub nv: usize,
    #[serde(default = "yes")]
    pub enabled: bool,
}

impl Default for MeshJob {
    fn default() -> Self {
        Self {
            nu: default_res(),
            nv: default_res(),
            enabled: true,
        }
    }
}

/// A validation failure tied to a field of the spec.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn field(path: &str, message: impl Into<String>) -> FieldError {
    FieldError {
        path: path.to_string(),
        message: message.into(),
    }
}

fn range_ok(path: &str, r: [f64; 2]) -> Result<(), FieldError> {
    if r.iter().all(|x| x.is_finite()) && r[1] > r[0] {
        Ok(())
    } else {
        Err(field(
            path,
            format!("expected an increasing pair of finite numbers, got {r:?}"),
        ))
    }
}

fn positive(path: &str, x: f64) -> Result<(), FieldError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(field(path, format!("must be positive, got {x}")))
    }
}

fn sign_ok(path: &str, s: i8) -> Result<(), FieldError> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(field(path, format!("must be 1 or -1, got {s}")))
    }
}

fn at_least(path: &str, n: usize, min: usize) -> Result<(), FieldError> {
    if n >= min {
        Ok(())
    } else {
        Err(field(path, format!("must be at least {min}, got {n}")))
    }
}

impl JobSpec {
    /// Parses one (already sweep-expanded) document.
    pub fn from_table(table: toml::Table) -> Result<Self, FieldError> {
        let spec: JobSpec =
            toml::Value::Table(table)
                .try_into()
                .map_err(|e: toml::de::Error| {
                    let msg = e.message().to_string();
                    field("spec", msg)
                })?;
        spec.validate()?;
        Ok(spec)
    }

    /// Checks that the section for `mode` is present and its values are usable.
    pub fn validate(&self) -> Result<(), FieldError> {
        let need = |present: bool| {
            if present {
                Ok(())
            } else {
                Err(field(
                    self.mode.name(),
                    format!("section [{}] is required for this mode", self.mode.name()),
                ))
            }
        };
        if let Some(m) = &self.mesh {
            at_least("mesh.nu", m.nu, 2)?;
            at_least("mesh.nv", m.nv, 2)?;
        }
        match self.mode {
            Mode::Curve => {
                need(self.curve.is_some())?;
                let c = self.curve.as_ref().unwrap();
                match (&c.kappa, &c.potential) {
                    (Some(_), None) | (None, Some(_)) => {}
                    _ => {
                        return Err(field(
                            "curve",
                            "give exactly one of `kappa` and `potential`",
                        ))
                    }
                }
                range_ok("curve.s_range", c.s_range)?;
                positive("curve.step", c.step)?;
                at_least("curve.samples", c.samples, 1)?;
            }
            Mode::Cylinder => {
                need(self.cylinder.is_some())?;
                let c = self.cylinder.as_ref().unwrap();
                range_ok("cylinder.s_range", c.s_range)?;
                range_ok("cylinder.t_range", c.t_range)?;
                positive("cylinder.step", c.step)?;
                at_least("cylinder.samples", c.samples, 1)?;
                at_least("cylinder.points", c.points, 5)?;
                if let Some(n) = c.n_states {
                    at_least("cylinder.n_states", n, 1)?;
                }
            }
            Mode::Revolve => {
                need(self.revolve.is_some())?;
                let r = self.revolve.as_ref().unwrap();
                range_ok("revolve.rho_range", r.rho_range)?;
                positive("revolve.rho_range", r.rho_range[0])?;
                positive("revolve.rho0", r.rho0)?;
                if r.rho0 < r.rho_range[0] || r.rho0 > r.rho_range[1] {
                    return Err(field(
                        "revolve.rho0",
                        format!("{} lies outside rho_range", r.rho0),
                    ));
                }
                at_least("revolve.rho_points", r.rho_points, 5)?;
                sign_ok("revolve.sign_a", r.sign_a)?;
                sign_ok("revolve.sign_lambda", r.sign_lambda)?;
                range_ok("revolve.cylinder_length", r.cylinder_length)?;
                at_least("revolve.samples", r.samples, 1)?;
            }
            Mode::Helicoid => {
                need(self.helicoid.is_some())?;
                let h = self.helicoid.as_ref().unwrap();
                if !(h.omega.is_finite() && h.omega != 0.0) {
                    return Err(field("helicoid.omega", "must be finite and non-zero"));
                }
                range_ok("helicoid.xi_range", h.xi_range)?;
                if let Some(c) = h.chi_range {
                    range_ok("helicoid.chi_range", c)?;
                }
                at_least("helicoid.check[0]", h.check[0], 1)?;
                at_least("helicoid.check[1]", h.check[1], 1)?;
                match h.kind {
                    HelicoidKind::Minimal => {
                        if h.omega0.is_none() {
                            return Err(field(
                                "helicoid.omega0",
                                "required for kind = \"minimal\"",
                            ));
                        }
                        if h.u.is_some() {
                            return Err(field("helicoid.u", "only used with kind = \"bour\""));
                        }
                    }
                    HelicoidKind::Bour => {
                        if h.u.is_none() {
                            return Err(field("helicoid.u", "required for kind = \"bour\""));
                        }
                        if h.psi.is_some() {
                            return Err(field(
                                "helicoid.psi",
                                "only available for kind = \"minimal\"",
                            ));
                        }
                        positive("helicoid.a", h.a.abs())?;
                    }
                }
            }
            Mode::Spectrum => {
                need(self.spectrum.is_some())?;
                let s = self.spectrum.as_ref().unwrap();
                if !(s.omega.is_finite() && s.omega != 0.0) {
                    return Err(field("spectrum.omega", "must be finite and non-zero"));
                }
                if s.m_chi.is_empty() {
                    return Err(field("spectrum.m_chi", "needs at least one value"));
                }
                at_least("spectrum.n_states", s.n_states, 1)?;
                positive("spectrum.tolerance", s.tolerance)?;
                if let Some(w) = s.half_width {
                    positive("spectrum.half_width", w)?;
                }
                if let Some(h) = s.spacing {
                    positive("spectrum.spacing", h)?;
                }
            }
            Mode::Verify => {
                need(self.verify.is_some())?;
                if !(self.verify.as_ref().unwrap().tolerance >= 0.0) {
                    return Err(field("verify.tolerance", "must be non-negative"));
                }
            }
        }
        Ok(())
    }

    pub fn mesh(&self) -> MeshJob {
        self.mesh.unwrap_or_default()
    }
}

/// Swept values of one point and its resolved job table.
pub type SweepPoint = (BTreeMap<String, toml::Value>, toml::Table);

/// Expands `[sweep]` into one table per point. Keys are visited in
/// lexicographic order and the last key varies fastest.
pub fn expand_sweep(mut table: toml::Table) -> Result<Vec<SweepPoint>, FieldError> {
    let Some(sweep) = table.remove("sweep") else {
        return Ok(vec![(BTreeMap::new(), table)]);
    };
    let toml::Value::Table(sweep) = sweep else {
        return Err(field("sweep", "must be a table of value lists"));
    };
    let mut axes: Vec<(String, Vec<toml::Value>)> = Vec::new();
    for (key, values) in sweep {
        let path = format!("sweep.\"{key}\"");
        let toml::Value::Array(values) = values else {
            return Err(field(&path, "must be a list of values"));
        };
        if values.is_empty() {
            return Err(field(&path, "must not be empty"));
        }
        axes.push((key, values));
    }
    axes.sort_by(|a, b| a.0.cmp(&b.0));
    let total: usize = axes.iter().map(|a| a.1.len()).product();
    let mut out = Vec::with_capacity(total);
    for mut k in 0..total {
        let mut point = table.clone();
        let mut chosen = BTreeMap::new();
        let mut picks = vec![0; axes.len()];
        for (i, axis) in axes.iter().enumerate().rev() {
            picks[i] = k % axis.1.len();
            k /= axis.1.len();
        }
        for ((key, values), &i) in axes.iter().zip(&picks) {
            set_path(&mut point, key, values[i].clone())?;
            chosen.insert(key.clone(), values[i].clone());
        }
        out.push((chosen, point));
    }
    Ok(out)
}

fn set_path(table: &mut toml::Table, path: &str, value: toml::Value) -> Result<(), FieldError> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(field(&format!("sweep.\"{path}\""), "malformed field path"));
    }
    let mut cur = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = match entry {
            toml::Value::Table(t) => t,
            _ => {
                return Err(field(
                    &format!("sweep.\"{path}\""),
                    format!("`{part}` is not a section"),
                ))
            }
        };
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
