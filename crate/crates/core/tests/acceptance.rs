//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test --test acceptance`.

#![allow(clippy::type_complexity)]

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use gipsynth::curve::{
    curvature_recovery_error, integrate_frenet, planar_closed_form, route_agreement,
    CurvatureProfile, FrenetFrame, PlanarStart,
};
use gipsynth::geometry::{surface_curvatures, PhysicalConstants, Vec3, ORACLE_STEP};
use gipsynth::helicoidal::{
    bour_surface, check_surface, default_xi_grid, minimal_gaussian, minimal_surface_embedding,
    BourFamily, MinimalFamily,
};
use gipsynth::par::Execution;
use gipsynth::profile::scalar_fn;
use gipsynth::quad::uniform_grid;
use gipsynth::revolution::{
    fit_sphere, generating_curve_horizontal, generating_curve_vertical, kenmotsu_residual,
    max_discriminant, revolve_vertical, sample_points, verify_prescribed_u, HorizontalCurve,
    RevolutionFamilyParams,
};
use gipsynth::schrodinger::{
    cylinder_spectrum, helicoid_spectrum, map_to_helicoid, solve_1d_eigen, Boundary, BoxOptions,
    EffectivePotential1D,
};
use gipsynth::surface::interior_samples;
use gipsynth::Result;

type Outcome = Result<(bool, String)>;

fn exec() -> Execution {
    Execution::default()
}

fn nat() -> PhysicalConstants {
    PhysicalConstants::natural()
}

const MINIMAL: [(f64, f64, f64, (f64, f64)); 3] = [
    (1.0, 1.0, 0.0, (0.2, 2.0)),
    (1.0, 3.0, 0.0, (-2.0, 2.0)),
    (2.0, 5.0, 1.0, (-2.0, 1.0)),
];

fn curve_round_trip() -> Outcome {
    let profiles: [(&str, fn(f64) -> f64); 3] = [
        ("1", |_| 1.0),
        ("s", |s| s),
        ("1+0.3 sin s", |s| 1.0 + 0.3 * s.sin()),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, k) in profiles {
        let t = Instant::now();
        let p = CurvatureProfile::planar(k, (0.0, 10.0), 10001)?;
        let a = integrate_frenet(&p, &FrenetFrame::standard(), Vec3::zeros(), 1e-3)?;
        let b = planar_closed_form(k, (0.0, 10.0), 1e-3, PlanarStart::default())?;
        let ea = curvature_recovery_error(&a, k, 400, exec())?;
        let eb = curvature_recovery_error(&b, k, 400, exec())?;
        let agree = route_agreement(&a, &b)?;
        let secs = t.elapsed().as_secs_f64();
        ok &= ea <= 1e-4 && eb <= 1e-4 && agree <= 1e-7 && secs < 1.0;
        parts.push(format!(
            "k={name}: rel {:.1e}/{:.1e}, routes {agree:.1e}, {secs:.2}s",
            ea, eb
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn flat_gip() -> Outcome {
    let a1 = 0.8;
    let sphere = revolve_vertical(&generating_curve_vertical(
        &RevolutionFamilyParams::new(|_| 0.0, a1, 0.0, 0.6)?,
        &uniform_grid(0.1, 2.0, 300),
    )?)?;
    let ds = max_discriminant(&sphere, 30, 6, exec())?;
    let fit = fit_sphere(&sample_points(&sphere, 40, 12))?;
    let plane = revolve_vertical(&generating_curve_vertical(
        &RevolutionFamilyParams::new(|_| 0.0, 0.0, 1.25, 1.0)?,
        &uniform_grid(0.1, 3.0, 300),
    )?)?;
    let dp = max_discriminant(&plane, 30, 6, exec())?;
    let pts = sample_points(&plane, 10, 6);
    let flat = pts.iter().all(|p| (p.z - 1.25).abs() < 1e-12);
    let dr = (fit.radius - 1.0 / a1).abs();
    Ok((
        ds <= 1e-8 && dp <= 1e-8 && dr <= 1e-6 && flat,
        format!("sphere H^2-K {ds:.1e}, |r - 1/a1| {dr:.1e}; plane H^2-K {dp:.1e}, z const {flat}"),
    ))
}

fn constant_gip() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for u0 in [0.1, 0.25] {
        let c = generating_curve_vertical(
            &RevolutionFamilyParams::new(move |_| u0, 0.0, 0.0, 1.0)?,
            &uniform_grid(0.2, 4.0, 800),
        )?;
        let s = revolve_vertical(&c)?;
        let err = verify_prescribed_u(&s, move |_| u0, 200, exec())?;
        let ken = kenmotsu_residual(&s, move |_| u0, 200, exec())?.max_residual;
        let mer = c.meridian()?;
        let (a, b) = mer.s_range();
        let spread = (mer.rho_of_s.eval(a) - mer.rho_of_s.eval(b)).abs();
        ok &= err <= 1e-5 && ken <= 1e-5 && spread > 0.1;
        parts.push(format!(
            "U0={u0}: |sqrt(H^2-K)-U0| {err:.1e}, Kenmotsu {ken:.1e}, radius spread {spread:.2}"
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn duality() -> Outcome {
    let u = |r: f64| 0.2 / r;
    let p = RevolutionFamilyParams::new(u, 0.05, 0.0, 1.0)?;
    let g = uniform_grid(1.0, 3.0, 1601);
    let vert = generating_curve_vertical(&p, &g)?;
    let hor = generating_curve_horizontal(&p, &g)?;
    let HorizontalCurve::Profile { q_of_rho, .. } = &hor else {
        return Ok((false, "horizontal dual degenerated to a cylinder".into()));
    };
    let lam = vert.lambda_profile()?;
    let sv = revolve_vertical(&vert)?;
    let sh = hor.surface((0.0, 0.0))?;
    // U read off each surface at matching radii. Near rho0 the horizontal
    // chart is stretched (dq/drho ~ a1), so its step shrinks with q'.
    let mer = vert.meridian()?;
    let rhos = interior_samples((1.0, 3.0), 80, 0.01);
    let mut diff = 0.0_f64;
    for &rho in &rhos {
        let s = mer
            .rho_of_s
            .invert(rho)
            .expect("radius grows along the meridian");
        let uv = surface_curvatures(&sv.chart, s, 0.3, ORACLE_STEP)?.gap();
        let (q, dq, _) = q_of_rho.eval3(rho);
        let uh = surface_curvatures(&sh.chart, q, 0.3, ORACLE_STEP * dq.min(1.0))?.gap();
        diff = diff.max((uv - uh).abs());
    }
    let (lo, hi) = lam.range();
    let mut id = 0.0_f64;
    for h in interior_samples((lam.eval(lo), lam.eval(hi)), 60, 1e-3) {
        let rho = lam.invert(h).expect("lambda is monotone");
        id = id.max((q_of_rho.eval(rho) - h).abs());
    }
    Ok((
        diff <= 1e-5 && id <= 1e-6,
        format!("max |U_vert - U_hor| {diff:.1e}, |q(lambda^-1(h)) - h| {id:.1e}"),
    ))
}

fn bour_lemma() -> Outcome {
    let grid = default_xi_grid((0.2, 2.0));
    let mut ok = true;
    let mut parts = Vec::new();
    for c in [1.0, 2.0] {
        let u = move |x: f64| (c + x * x).sqrt();
        let mut surfaces = Vec::new();
        for (w, a) in [(1.0, 1.0), (2.0, 1.5)] {
            let hs = bour_surface(&BourFamily::new(u, w, a)?, &grid)?;
            let chk = check_surface(&hs, 24, 6, exec())?;
            ok &= chk.metric_error <= 1e-6 && chk.gaussian_error <= 1e-5;
            parts.push(format!(
                "U^2={c}+xi^2 (w,a)=({w},{a}): metric {:.1e}, K {:.1e}",
                chk.metric_error, chk.gaussian_error
            ));
            surfaces.push(hs);
        }
        let (s1, s2) = (surfaces[0].surface(), surfaces[1].surface());
        let mut dh = 0.0_f64;
        for xi in interior_samples((0.2, 2.0), 24, 0.01) {
            let h1 = surface_curvatures(&s1.chart, xi, 0.5, ORACLE_STEP)?.h;
            let h2 = surface_curvatures(&s2.chart, xi, 0.5, ORACLE_STEP)?.h;
            dh = dh.max((h1 - h2).abs());
        }
        if c == 2.0 {
            ok &= dh > 1e-3;
        }
        parts.push(format!("sup |H1-H2| {dh:.2e}"));
    }
    Ok((ok, parts.join("; ")))
}

fn minimal_family() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (w, w0, w1, range) in MINIMAL {
        let fam = MinimalFamily::new(w, w0, w1)?;
        let hs = minimal_surface_embedding(&fam, &default_xi_grid(range))?;
        let s = hs.surface();
        let (mut hmax, mut kerr) = (0.0_f64, 0.0_f64);
        for xi in interior_samples(range, 41, 3.0 * ORACLE_STEP) {
            for chi in interior_samples(s.v_range(), 5, 3.0 * ORACLE_STEP) {
                let p = surface_curvatures(&s.chart, xi, chi, ORACLE_STEP)?;
                hmax = hmax.max(p.h.abs());
                kerr = kerr.max((p.k - minimal_gaussian(&fam, xi)?).abs());
            }
        }
        ok &= hmax <= 1e-6 && kerr <= 1e-6;
        parts.push(format!(
            "({w},{w0},{w1}) on {range:?}: |H| {hmax:.1e}, K {kerr:.1e}"
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn eigensolver() -> Outcome {
    let t = Instant::now();
    let l = 2.0;
    let v = EffectivePotential1D::from_fn(&uniform_grid(0.0, l, 2000), |_| 0.0)?;
    let s = solve_1d_eigen(&v, Boundary::Dirichlet, &nat(), 6, exec())?;
    let mut box_err = 0.0_f64;
    for (k, e) in s.energies.iter().enumerate() {
        let n = (k + 1) as f64;
        let exact = n * n * PI * PI / (2.0 * l * l);
        box_err = box_err.max((e - exact).abs() / exact);
    }
    let v = EffectivePotential1D::from_fn(&uniform_grid(-12.0, 12.0, 4801), |u| 0.5 * u * u)?;
    let s = solve_1d_eigen(&v, Boundary::Dirichlet, &nat(), 6, exec())?;
    let ho = s
        .energies
        .iter()
        .enumerate()
        .map(|(n, e)| (e - (n as f64 + 0.5)).abs())
        .fold(0.0, f64::max);
    let secs = t.elapsed().as_secs_f64();
    Ok((
        box_err <= 1e-4 && ho <= 1e-3 && secs < 5.0,
        format!("box rel {box_err:.1e} (n=1..6), oscillator {ho:.1e} (n=0..5), {secs:.2}s"),
    ))
}

fn bound_states() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (w, w0, w1, _) in MINIMAL {
        let fam = MinimalFamily::new(w, w0, w1)?;
        let s0 = helicoid_spectrum(&fam, 0, &nat(), &BoxOptions::default(), exec())?;
        let stable = s0.converged && s0.last_change <= 1e-4;
        ok &= s0.spectrum.bound[0] && stable;
        let mut lowest = f64::INFINITY;
        for m in [-2, -1, 1, 2] {
            let s = helicoid_spectrum(&fam, m, &nat(), &BoxOptions::default(), exec())?;
            lowest = lowest.min(s.spectrum.energies[0]);
        }
        ok &= lowest >= -1e-6;
        parts.push(format!(
            "({w},{w0},{w1}): m=0 E0 {:.6} (doubling change {:.1e}), min E over m=+-1,+-2 {lowest:.2e}",
            s0.spectrum.energies[0], s0.last_change
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn helicoid_map() -> Outcome {
    let fam = MinimalFamily::new(1.0, 3.0, 0.0)?;
    let map = map_to_helicoid(&fam)?;
    let hel = MinimalFamily::helicoid(1.0)?;
    // matched boxes: the minimal-family box is the helicoid box stretched by sqrt(b)
    let hopts = BoxOptions {
        half_width: Some(20.0),
        spacing: Some(0.01),
        n_states: 6,
        max_doublings: 0,
        ..BoxOptions::default()
    };
    let mopts = BoxOptions {
        half_width: Some(20.0 * map.scale),
        spacing: Some(0.01 * map.scale),
        ..hopts
    };
    let mut worst = 0.0_f64;
    for m in 0..3 {
        let eh = helicoid_spectrum(&hel, m, &nat(), &hopts, exec())?
            .spectrum
            .energies;
        let em = helicoid_spectrum(&fam, m, &nat(), &mopts, exec())?
            .spectrum
            .energies;
        for (a, b) in em.iter().zip(&eh) {
            worst = worst.max((a - b / map.energy_factor).abs() / a.abs());
        }
    }
    // default boxes, bound ground state
    let e = helicoid_spectrum(&fam, 0, &nat(), &BoxOptions::default(), exec())?
        .spectrum
        .energies[0];
    let eh = helicoid_spectrum(&hel, 0, &nat(), &BoxOptions::default(), exec())?
        .spectrum
        .energies[0];
    let ground = (e - eh / map.energy_factor).abs() / e.abs();
    Ok((
        worst <= 1e-4 && ground <= 1e-4,
        format!("matched boxes m=0..2, 6 levels: rel {worst:.1e}; independent boxes ground state: rel {ground:.1e}"),
    ))
}

fn localization() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (w, w0, w1, _) in MINIMAL {
        let fam = MinimalFamily::new(w, w0, w1)?;
        let opts = BoxOptions {
            max_doublings: 0,
            ..BoxOptions::default()
        };
        let s0 = helicoid_spectrum(&fam, 0, &nat(), &opts, exec())?;
        let s2 = helicoid_spectrum(&fam, 2, &nat(), &opts, exec())?;
        let h = s0.spectrum.grid[1] - s0.spectrum.grid[0];
        let p0 = s0.spectrum.grid[s0.spectrum.density_argmax(0)];
        let p2 = s2.spectrum.grid[s2.spectrum.density_argmax(0)];
        let d0 = (p0 - fam.centre()).abs();
        let outer = (p2 - s2.centre).abs() / s2.half_width;
        ok &= d0 <= h * (1.0 + 1e-9) && outer > 0.5;
        parts.push(format!("({w},{w0},{w1}): m=0 peak {d0:.1e} from centre (cell {h:.0e}), m=2 peak at {outer:.2} of half width"));
    }
    Ok((ok, parts.join("; ")))
}

fn cylinder() -> Outcome {
    let c = nat();
    let (lu, lv) = (2.0, 3.0);
    let zero = scalar_fn(|_| 0.0);
    let levels = cylinder_spectrum(&zero, lu, lv, false, &c, 4, 2001)?;
    let h = c.planck();
    let mut strip = 0.0_f64;
    for l in &levels {
        let (nu, nv) = (l.numbers.n_u as f64, l.numbers.n_v as f64);
        let exact = h * h * nv * nv / (8.0 * lv * lv) + h * h * nu * nu / (8.0 * lu * lu);
        strip = strip.max((l.energy - exact).abs() / exact);
    }
    let r = 0.8;
    let shift = -c.hbar().powi(2) / (8.0 * c.mass() * r * r);
    let mut dev = 0.0_f64;
    for closed in [false, true] {
        let flat = cylinder_spectrum(&zero, 2.0 * PI * r, 1.0, closed, &c, 4, 1001)?;
        let bent = cylinder_spectrum(
            &scalar_fn(move |_| 1.0 / r),
            2.0 * PI * r,
            1.0,
            closed,
            &c,
            4,
            1001,
        )?;
        for (a, b) in flat.iter().zip(&bent) {
            dev = dev.max((b.energy - a.energy - shift).abs());
        }
    }
    Ok((
        strip <= 1e-4 && dev <= 1e-10,
        format!("strip rel {strip:.1e}; constant-curvature shift deviation {dev:.1e}"),
    ))
}

const DETERMINISM_JOBS: [(&str, &str); 3] = [
    (
        "helicoid",
        "mode = \"helicoid\"\n[helicoid]\nkind = \"minimal\"\nomega = 2.0\nomega0 = 5.0\nomega1 = 1.0\nxi_range = [-2.0, 1.0]\npsi = { m_chi = 0 }\n[mesh]\nnu = 40\nnv = 24\n",
    ),
    (
        "spectrum",
        "mode = \"spectrum\"\n[spectrum]\nomega = 1.0\nomega0 = 3.0\nomega1 = 0.0\nm_chi = [0, 1, 2, 3]\nn_states = 3\n[sweep]\n\"spectrum.omega1\" = [0.0, 0.5]\n",
    ),
    ("revolve", "mode = \"revolve\"\n[revolve]\nu = \"0.2/rho\"\na1 = 0.05\nrho0 = 1.0\nrho_range = [1.0, 3.0]\nrho_points = 801\n"),
];

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((
                    p.strip_prefix(dir).unwrap().display().to_string(),
                    std::fs::read(&p).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| gipsynth::GipError::Numeric(e.to_string()))?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, text) in DETERMINISM_JOBS {
        let spec = tmp.path().join(format!("{name}.toml"));
        std::fs::write(&spec, text).unwrap();
        let mut runs = Vec::new();
        for threads in ["1", "4"] {
            let out = tmp.path().join(format!("{name}_{threads}"));
            let status = Command::new(env!("CARGO_BIN_EXE_gipsynth"))
                .args([
                    "--spec",
                    spec.to_str().unwrap(),
                    "--out",
                    out.to_str().unwrap(),
                    "--threads",
                    threads,
                ])
                .output()
                .unwrap();
            ok &= status.status.success();
            let files: Vec<_> = tree(&out)
                .into_iter()
                .filter(|(p, _)| !p.ends_with("timing.toml"))
                .collect();
            runs.push(files);
        }
        let same = runs[0] == runs[1] && !runs[0].is_empty();
        ok &= same;
        parts.push(format!(
            "{name}: {} files {}",
            runs[0].len(),
            if same { "identical" } else { "DIFFER" }
        ));
    }
    parts.push("timing.toml excluded".into());
    Ok((ok, parts.join("; ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("curve round trip", curve_round_trip),
        ("flat GIP: sphere and plane", flat_gip),
        ("constant GIP revolution surface", constant_gip),
        ("vertical/horizontal duality", duality),
        ("Bour family isometry", bour_lemma),
        ("minimal family", minimal_family),
        ("eigensolver calibration", eigensolver),
        ("bound states", bound_states),
        ("helicoid map", helicoid_map),
        ("localization", localization),
        ("cylinder spectrum", cylinder),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} [{}] {name} ({:.2}s): {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
