//! One pipeline per mode. Each returns the files it would write, the oracle
//! errors and a few scalar results; nothing touches the file system here.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::spec::{
    AxisKind, CurveJob, CylinderJob, HelicoidJob, HelicoidKind, JobSpec, Mode, RevolveJob,
    SpectrumJob,
};
use super::CliError;
use crate::curve::{
    curvature_from_gip, curvature_recovery_error, integrate_frenet, planar_closed_form,
    route_agreement, CurvatureProfile, FrenetFrame, PlanarStart, ReconstructedCurve,
};
use crate::cylindrical::{self, CylindricalSpec};
use crate::error::GipError;
use crate::expr::Expr;
use crate::geometry::{PhysicalConstants, Vec3};
use crate::helicoidal::{
    bour_surface, check_surface, default_xi_grid, enantiomorph, helicoidal_curvatures,
    minimal_surface_embedding, BourFamily, HelicoidalSurface, MinimalFamily,
};
use crate::mesh::{mesh_surface, polyline_obj, Mesh};
use crate::par::Execution;
use crate::profile::{scalar_fn, PotentialProfile, ScalarFn};
use crate::quad::uniform_grid;
use crate::revolution::{
    self, fit_sphere, generating_curve_horizontal, generating_curve_vertical, kenmotsu_residual,
    revolve_vertical, sample_points, verify_prescribed_u, HorizontalCurve, RevolutionFamilyParams,
    Sign,
};
use crate::schrodinger::{cylinder_spectrum, helicoid_spectrum, sweep_m_chi, BoxOptions, Spectrum};
use crate::surface::InvariantSurface;

/// Everything a job produces before it is written out.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Relative path and contents, in output order.
    pub files: Vec<(String, String)>,
    pub errors: BTreeMap<String, f64>,
    pub summary: BTreeMap<String, toml::Value>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn error(&mut self, key: &str, value: f64) {
        self.errors.insert(key.to_string(), value);
    }

    fn put<V: Into<toml::Value>>(&mut self, key: &str, value: V) {
        self.summary.insert(key.to_string(), value.into());
    }
}

pub(crate) fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_rows<I: IntoIterator<Item = Vec<f64>>>(header: &str, rows: I) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(num).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn expr(path: &str, source: &str, var: &str) -> Result<ScalarFn, CliError> {
    Expr::parse(source, var)
        .map(Expr::into_fn)
        .map_err(|e| CliError::field(path, e.to_string()))
}

/// Largest step no longer than `step` that divides `range` evenly.
fn dividing_step(range: (f64, f64), step: f64) -> (f64, usize) {
    let n = ((range.1 - range.0) / step).ceil().max(1.0) as usize;
    ((range.1 - range.0) / n as f64, n)
}

fn pair(r: [f64; 2]) -> (f64, f64) {
    (r[0], r[1])
}

fn sign(s: i8) -> Sign {
    if s < 0 {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// Runs the pipeline of `spec.mode`. With `files == false` only the oracle
/// errors and the summary are computed.
pub fn run_job(spec: &JobSpec, exec: Execution, files: bool) -> Result<Outcome, CliError> {
    let c = spec.units.constants();
    let mut out = Outcome::default();
    match spec.mode {
        Mode::Curve => curve(spec.curve.as_ref().unwrap(), &c, exec, files, &mut out)?,
        Mode::Cylinder => {
            let surface = cylinder(spec.cylinder.as_ref().unwrap(), &c, exec, files, &mut out)?;
            if files {
                add_mesh(spec, &surface, &c, exec, None, &mut out)?;
            }
        }
        Mode::Revolve => {
            let surface = revolve(spec.revolve.as_ref().unwrap(), exec, files, &mut out)?;
            if files {
                add_mesh(spec, &surface, &c, exec, None, &mut out)?;
            }
        }
        Mode::Helicoid => helicoid(spec, &c, exec, files, &mut out)?,
        Mode::Spectrum => spectrum(spec.spectrum.as_ref().unwrap(), &c, exec, files, &mut out)?,
        Mode::Verify => return Err(CliError::field("mode", "verify jobs cannot be nested")),
    }
    Ok(out)
}

fn add_mesh(
    spec: &JobSpec,
    surface: &InvariantSurface,
    c: &PhysicalConstants,
    exec: Execution,
    extra: Option<(&str, ScalarFn)>,
    out: &mut Outcome,
) -> Result<(), CliError> {
    let m = spec.mesh();
    if !m.enabled {
        return Ok(());
    }
    let mut mesh: Mesh = mesh_surface(surface, m.nu, m.nv, c, exec)?;
    if let Some((name, f)) = extra {
        mesh = mesh.with_attribute(name, |u, _| f(u));
    }
    out.put("mesh.vertices", mesh.vertices.len() as i64);
    out.put("mesh.faces", mesh.faces.len() as i64);
    out.put("mesh.skipped", mesh.skipped as i64);
    if mesh.skipped > 0 {
        out.notes.push(format!(
            "mesh: {} degenerate triangles skipped",
            mesh.skipped
        ));
    }
    let header = format!(
        "gipsynth {} surface, {}x{} grid",
        spec.mode.name(),
        m.nu,
        m.nv
    );
    out.files.push(("surface.obj".into(), mesh.to_obj(&header)));
    out.files
        .push(("surface_vertices.csv".into(), mesh.attributes_csv()));
    Ok(())
}

fn curve_csv(curve: &ReconstructedCurve, c: &PhysicalConstants) -> String {
    let k8 = c.hbar() * c.hbar() / (8.0 * c.mass());
    csv_rows(
        "s,x,y,z,kappa,tau,V",
        curve.s.iter().enumerate().map(|(i, &s)| {
            let p = curve.positions[i];
            let k = curve.kappa[i];
            vec![s, p.x, p.y, p.z, k, curve.tau[i], -k8 * k * k]
        }),
    )
}

fn curve(
    job: &CurveJob,
    c: &PhysicalConstants,
    exec: Execution,
    files: bool,
    out: &mut Outcome,
) -> Result<(), CliError> {
    let range = pair(job.s_range);
    let (step, cells) = dividing_step(range, job.step);
    let samples = cells + 1;
    out.put("curve.step", step);
    let kappa = match (&job.kappa, &job.potential) {
        (Some(k), _) => expr("curve.kappa", k, "s")?,
        (None, Some(v)) => {
            let v = expr("curve.potential", v, "s")?;
            curvature_from_gip(&PotentialProfile::Closed(v), c, range, samples)?.kappa
        }
        (None, None) => unreachable!("validated"),
    };
    let tau = match &job.tau {
        Some(t) => expr("curve.tau", t, "s")?,
        None => scalar_fn(|_| 0.0),
    };
    let (sn, cs) = job.heading.sin_cos();
    let frame = FrenetFrame::from_tangent_normal(Vec3::new(cs, sn, 0.0), Vec3::new(-sn, cs, 0.0))?;
    let profile = CurvatureProfile::new(kappa.clone(), tau, range, samples)?;
    let frenet = integrate_frenet(&profile, &frame, Vec3::zeros(), step)?;
    let k = kappa.clone();
    let target = move |s: f64| k(s);
    out.error(
        "curve.kappa_frenet",
        curvature_recovery_error(&frenet, &target, job.samples, exec)?,
    );
    let result = if job.tau.is_none() {
        let k = kappa.clone();
        let closed = planar_closed_form(
            move |s| k(s),
            range,
            step,
            PlanarStart {
                x0: 0.0,
                y0: 0.0,
                heading: job.heading,
            },
        )?;
        out.error(
            "curve.kappa_closed_form",
            curvature_recovery_error(&closed, &target, job.samples, exec)?,
        );
        out.error("curve.route_agreement", route_agreement(&closed, &frenet)?);
        closed
    } else {
        out.notes
            .push("non-planar curve: Frenet integration only".into());
        frenet
    };
    let (p0, p1) = (
        result.positions[0],
        result.positions[result.positions.len() - 1],
    );
    out.put("curve.end_gap", (p1 - p0).norm());
    out.put(
        "curve.closed",
        result.is_closed(cylindrical::CLOSED_SECTION_TOL),
    );
    out.put("curve.frame_drift", result.frame_drift());
    if files {
        out.files.push(("curve.csv".into(), curve_csv(&result, c)));
        out.files.push((
            "curve.obj".into(),
            polyline_obj(&result.positions, "gipsynth curve"),
        ));
    }
    Ok(())
}

fn cylinder(
    job: &CylinderJob,
    c: &PhysicalConstants,
    exec: Execution,
    files: bool,
    out: &mut Outcome,
) -> Result<InvariantSurface, CliError> {
    let h = expr("cylinder.h", &job.h, "s")?;
    let axis = Vec3::new(job.axis[0], job.axis[1], job.axis[2]);
    let hf = h.clone();
    let spec = CylindricalSpec::new(axis, move |s| hf(s), pair(job.s_range), pair(job.t_range))?
        .with_heading(job.heading)?;
    let (step, _) = dividing_step(pair(job.s_range), job.step);
    out.put("cylinder.step", step);
    let syn = cylindrical::synthesize(&spec, step)?;
    let hf = h.clone();
    out.error(
        "cylinder.h_error",
        cylindrical::verify_prescribed_h(&syn.surface, move |s| hf(s), job.samples, exec)?,
    );
    out.error(
        "cylinder.max_abs_k",
        cylindrical::max_gaussian(&syn.surface, 16, 8, exec)?,
    );
    out.put("cylinder.closed", syn.closed);
    out.put("cylinder.theta_variation", syn.theta_variation);
    out.notes.extend(syn.surface.notes.iter().cloned());
    if let Some(n) = job.n_states {
        if !spec.is_vertical() {
            return Err(CliError::field(
                "cylinder.n_states",
                "the separated spectrum needs a vertical axis",
            ));
        }
        let samples = syn.curve.s.len();
        let section = cylindrical::cross_section_from_mean_curvature(&spec, samples)?;
        let l_u = job.s_range[1] - job.s_range[0];
        let l_v = job.t_range[1] - job.t_range[0];
        let levels = cylinder_spectrum(
            &section.profile.kappa,
            l_u,
            l_v,
            syn.closed,
            c,
            n,
            job.points,
        )?;
        out.put(
            "cylinder.ground_energy",
            levels
                .iter()
                .map(|l| l.energy)
                .fold(f64::INFINITY, f64::min),
        );
        if files {
            let mut s = String::from("n_u,n_v,energy\n");
            for l in &levels {
                let _ = writeln!(s, "{},{},{}", l.numbers.n_u, l.numbers.n_v, num(l.energy));
            }
            out.files.push(("spectrum.csv".into(), s));
        }
    }
    if files {
        out.files
            .push(("section.csv".into(), curve_csv(&syn.curve, c)));
    }
    Ok(syn.surface)
}

fn revolve(
    job: &RevolveJob,
    exec: Execution,
    files: bool,
    out: &mut Outcome,
) -> Result<InvariantSurface, CliError> {
    let u = expr("revolve.u", &job.u, "rho")?;
    let uf = u.clone();
    let params = RevolutionFamilyParams::new(move |r| uf(r), job.a1, job.a2, job.rho0)?
        .with_signs(sign(job.sign_a), sign(job.sign_lambda));
    let grid = uniform_grid(job.rho_range[0], job.rho_range[1], job.rho_points);
    let flat = grid.iter().all(|&r| u(r) == 0.0);
    let target = |r: f64| u(r);
    let surface = match job.axis {
        AxisKind::Vertical => {
            let curve = generating_curve_vertical(&params, &grid)?;
            let (i0, i1) = curve.domain;
            out.put(
                "revolve.domain",
                toml::Value::Array(vec![curve.rho[i0].into(), curve.rho[i1].into()]),
            );
            out.put("revolve.truncated", curve.truncated);
            out.notes.extend(curve.notes.iter().cloned());
            let surface = revolve_vertical(&curve)?;
            out.error(
                "revolve.kenmotsu",
                kenmotsu_residual(&surface, target, job.samples, exec)?.max_residual,
            );
            if files {
                out.files.push((
                    "generating.csv".into(),
                    csv_rows(
                        "rho,lambda,A",
                        (i0..=i1).map(|i| vec![curve.rho[i], curve.lambda[i], curve.a[i]]),
                    ),
                ));
            }
            surface
        }
        AxisKind::Horizontal => {
            let curve = generating_curve_horizontal(&params, &grid)?;
            let surface = curve.surface(pair(job.cylinder_length))?;
            match &curve {
                HorizontalCurve::Cylinder { radius } => {
                    out.put("revolve.cylinder_radius", *radius);
                }
                HorizontalCurve::Profile {
                    rho_of_q,
                    truncated,
                    notes,
                    ..
                } => {
                    out.put("revolve.truncated", *truncated);
                    out.notes.extend(notes.iter().cloned());
                    if files {
                        let rows = rho_of_q
                            .knots()
                            .iter()
                            .zip(rho_of_q.values())
                            .map(|(&q, &r)| vec![q, r]);
                        out.files
                            .push(("generating.csv".into(), csv_rows("q,rho", rows)));
                    }
                }
            }
            surface
        }
    };
    out.error(
        "revolve.u_error",
        verify_prescribed_u(&surface, target, job.samples, exec)?,
    );
    if flat {
        out.error(
            "revolve.max_discriminant",
            revolution::max_discriminant(&surface, 16, 8, exec)?,
        );
        if job.a1 != 0.0 && job.axis == AxisKind::Vertical {
            let fit = fit_sphere(&sample_points(&surface, 24, 12))?;
            out.put("revolve.sphere_radius", fit.radius);
            out.error(
                "revolve.sphere_radius_error",
                (fit.radius - 1.0 / job.a1.abs()).abs(),
            );
            out.error("revolve.sphere_residual", fit.max_residual);
        }
    }
    out.notes.extend(surface.notes.iter().cloned());
    Ok(surface)
}

fn minimal_family(job: &HelicoidJob) -> Result<MinimalFamily, CliError> {
    Ok(MinimalFamily::new(
        job.omega,
        job.omega0.unwrap_or(1.0),
        job.omega1.unwrap_or(0.0),
    )?)
}

fn interpolate(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let n = grid.len();
    if x < grid[0] || x > grid[n - 1] {
        return 0.0;
    }
    let i = grid.partition_point(|&g| g <= x).clamp(1, n - 1) - 1;
    let t = (x - grid[i]) / (grid[i + 1] - grid[i]);
    values[i] + t * (values[i + 1] - values[i])
}

fn helicoid(
    spec: &JobSpec,
    c: &PhysicalConstants,
    exec: Execution,
    files: bool,
    out: &mut Outcome,
) -> Result<(), CliError> {
    let job = spec.helicoid.as_ref().unwrap();
    let grid = default_xi_grid(pair(job.xi_range));
    let mut hs: HelicoidalSurface = match job.kind {
        HelicoidKind::Minimal => minimal_surface_embedding(&minimal_family(job)?, &grid)?,
        HelicoidKind::Bour => {
            let u = expr("helicoid.u", job.u.as_ref().unwrap(), "xi")?;
            bour_surface(&BourFamily::new(move |x| u(x), job.omega, job.a)?, &grid)?
        }
    };
    if job.mirror {
        hs = enantiomorph(&hs);
    }
    if let Some(r) = job.chi_range {
        hs = hs.with_chi_range(pair(r));
    }
    let check = check_surface(&hs, job.check[0], job.check[1], exec)?;
    out.error("helicoid.metric", check.metric_error);
    out.error("helicoid.gaussian", check.gaussian_error);
    out.error("helicoid.mean_formula", check.mean_error);
    out.put("helicoid.max_abs_h", check.max_abs_h);
    out.put("helicoid.chirality", hs.family.chirality().value());
    out.notes.extend(hs.notes.iter().cloned());
    if !files {
        return Ok(());
    }
    let (x0, x1) = hs.xi_range();
    let rows = uniform_grid(x0, x1, 401).into_iter().map(|xi| {
        let cv = helicoidal_curvatures(&hs.family, xi);
        vec![
            xi,
            hs.rho(xi),
            hs.lambda(xi),
            hs.family.u(xi),
            cv.pair.k,
            cv.pair.h,
        ]
    });
    out.files.push((
        "profile.csv".into(),
        csv_rows("xi,rho,lambda,U,K,H", rows.collect::<Vec<_>>()),
    ));
    let extra = match job.psi {
        Some(sel) => {
            let fam = minimal_family(job)?;
            let opts = BoxOptions {
                n_states: sel.state + 1,
                ..BoxOptions::default()
            };
            let b = helicoid_spectrum(&fam, sel.m_chi, c, &opts, exec)?;
            out.put("psi.energy", b.spectrum.energies[sel.state]);
            let g = b.spectrum.grid.clone();
            let dens: Vec<f64> = b.spectrum.states[sel.state].iter().map(|v| v * v).collect();
            Some(("psi2", scalar_fn(move |xi| interpolate(&g, &dens, xi))))
        }
        None => None,
    };
    add_mesh(spec, &hs.surface(), c, exec, extra, out)
}

fn states_csv(spec: &Spectrum, v: &[f64]) -> String {
    let mut header = String::from("xi,V");
    for k in 0..spec.states.len() {
        let _ = write!(header, ",psi_{k}");
    }
    csv_rows(
        &header,
        spec.grid.iter().enumerate().map(|(i, &x)| {
            let mut row = vec![x, v[i]];
            row.extend(spec.states.iter().map(|s| s[i]));
            row
        }),
    )
}

fn spectrum(
    job: &SpectrumJob,
    c: &PhysicalConstants,
    exec: Execution,
    files: bool,
    out: &mut Outcome,
) -> Result<(), CliError> {
    let fam = MinimalFamily::new(job.omega, job.omega0, job.omega1)?;
    let opts = BoxOptions {
        half_width: job.half_width,
        spacing: job.spacing,
        n_states: job.n_states,
        tolerance: job.tolerance,
        max_doublings: job.max_doublings,
    };
    let runs = sweep_m_chi(&fam, &job.m_chi, c, &opts, exec)?;
    let mut table = String::from("m_chi,state,energy,bound,converged,half_width,box_change\n");
    for r in &runs {
        let s = &r.spectrum;
        for (k, &e) in s.energies.iter().enumerate() {
            let _ = writeln!(
                table,
                "{},{},{},{},{},{},{}",
                r.m_chi,
                k,
                num(e),
                s.bound[k],
                r.converged,
                num(r.half_width),
                num(r.last_change)
            );
        }
        let tag = format!("m{}", r.m_chi);
        out.error(&format!("spectrum.box_change_{tag}"), r.last_change);
        out.put(&format!("spectrum.bound_{tag}"), s.bound_count() as i64);
        out.put(&format!("spectrum.ground_{tag}"), s.energies[0]);
        out.put(
            &format!("spectrum.ground_argmax_{tag}"),
            s.grid[s.density_argmax(0)],
        );
        if !r.converged {
            out.notes.push(format!(
                "m_chi = {}: ground state not converged under box doubling",
                r.m_chi
            ));
        }
        if files && job.states {
            out.files
                .push((format!("states_{tag}.csv"), states_csv(s, &r.potential.v)));
        }
    }
    if runs
        .iter()
        .any(|r| r.m_chi.abs() >= 1 && r.spectrum.bound[0] && r.spectrum.energies[0] > -1e-6)
    {
        out.notes.push(
            "levels within 1e-6 below zero are discretization noise of the continuum edge".into(),
        );
    }
    if files {
        out.files.insert(0, ("spectrum.csv".into(), table));
    }
    Ok(())
}

impl From<GipError> for CliError {
    fn from(e: GipError) -> Self {
        CliError::Gip(e)
    }
}
