//! Triangle meshes of charts, with per-vertex curvature attributes.
//!
//! Vertices that coincide in space (seams, poles) are welded through a spatial
//! hash, so a closed surface yields a closed triangulation.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{GipError, Result};
use crate::geometry::{gip_from_curvatures, PhysicalConstants, Vec3, ORACLE_STEP};
use crate::par::{map_range, Execution};
use crate::surface::InvariantSurface;

/// Default welding distance relative to the mesh bounding box.
pub const WELD_RELATIVE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    /// Chart parameters of the first grid node welded into each vertex.
    pub params: Vec<(f64, f64)>,
    pub faces: Vec<[usize; 3]>,
    /// Named per-vertex scalars, in output column order.
    pub attributes: Vec<(String, Vec<f64>)>,
    /// Triangles dropped because they collapsed to a line or a point.
    pub skipped: usize,
}

fn cell_of(p: &Vec3, size: f64) -> (i64, i64, i64) {
    (
        (p.x / size).floor() as i64,
        (p.y / size).floor() as i64,
        (p.z / size).floor() as i64,
    )
}

/// Merges points closer than `tol`; returns the kept points and the index map.
pub fn weld(points: &[Vec3], tol: f64) -> (Vec<Vec3>, Vec<usize>) {
    let size = tol.max(f64::MIN_POSITIVE) * 2.0;
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let mut kept: Vec<Vec3> = Vec::new();
    let mut map = Vec::with_capacity(points.len());
    for p in points {
        let (cx, cy, cz) = cell_of(p, size);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = grid.get(&(cx + dx, cy + dy, cz + dz)) {
                        for &id in ids {
                            if (kept[id] - p).norm() <= tol {
                                found = Some(id);
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        let id = found.unwrap_or_else(|| {
            kept.push(*p);
            grid.entry((cx, cy, cz)).or_default().push(kept.len() - 1);
            kept.len() - 1
        });
        map.push(id);
    }
    (kept, map)
}

/// Triangulates an `nu × nv` node grid over the chart, welds coincident
/// vertices and attaches `K`, `H` and `V_gip`. Curvatures at boundary nodes
/// are evaluated a few steps inside the chart; where the chart is singular
/// (a pole) they are NaN.
pub fn mesh_surface(
    surface: &InvariantSurface,
    nu: usize,
    nv: usize,
    c: &PhysicalConstants,
    exec: Execution,
) -> Result<Mesh> {
    if nu < 2 || nv < 2 {
        return Err(GipError::Invalid(format!(
            "mesh resolution must be at least 2x2, got {nu}x{nv}"
        )));
    }
    let (u0, u1) = surface.u_range();
    let (v0, v1) = surface.v_range();
    let node = |i: usize, j: usize| {
        (
            u0 + (u1 - u0) * i as f64 / (nu - 1) as f64,
            v0 + (v1 - v0) * j as f64 / (nv - 1) as f64,
        )
    };
    let raw: Vec<Vec3> = map_range(exec, nu * nv, |k| {
        let (u, v) = node(k / nv, k % nv);
        surface.eval(u, v)
    });
    let extent = raw.iter().fold(0.0_f64, |m, p| {
        m.max(p.x.abs()).max(p.y.abs()).max(p.z.abs())
    });
    let (vertices, map) = weld(&raw, WELD_RELATIVE * extent.max(1.0));
    let mut params = vec![(f64::NAN, f64::NAN); vertices.len()];
    for (k, &id) in map.iter().enumerate().rev() {
        params[id] = node(k / nv, k % nv);
    }
    let mut faces = Vec::with_capacity(2 * (nu - 1) * (nv - 1));
    let mut skipped = 0;
    for i in 0..nu - 1 {
        for j in 0..nv - 1 {
            let (a, b) = (map[i * nv + j], map[(i + 1) * nv + j]);
            let (cc, d) = (map[(i + 1) * nv + j + 1], map[i * nv + j + 1]);
            for tri in [[a, b, cc], [a, cc, d]] {
                let area = (vertices[tri[1]] - vertices[tri[0]])
                    .cross(&(vertices[tri[2]] - vertices[tri[0]]))
                    .norm();
                if tri[0] == tri[1]
                    || tri[1] == tri[2]
                    || tri[0] == tri[2]
                    || area <= f64::EPSILON * extent * extent
                {
                    skipped += 1;
                } else {
                    faces.push(tri);
                }
            }
        }
    }
    let mut normals = vec![Vec3::zeros(); vertices.len()];
    for f in &faces {
        let n = (vertices[f[1]] - vertices[f[0]]).cross(&(vertices[f[2]] - vertices[f[0]]));
        for &v in f {
            normals[v] += n;
        }
    }
    for n in &mut normals {
        let len = n.norm();
        if len > 0.0 {
            *n /= len;
        }
    }
    let margin = 3.0 * ORACLE_STEP;
    let inside = |x: f64, lo: f64, hi: f64| {
        if hi - lo > 2.0 * margin {
            x.clamp(lo + margin, hi - margin)
        } else {
            x
        }
    };
    let curv: Vec<[f64; 3]> = map_range(exec, vertices.len(), |k| {
        let (u, v) = params[k];
        match surface.curvatures(inside(u, u0, u1), inside(v, v0, v1), ORACLE_STEP) {
            Ok(p) => [p.k, p.h, gip_from_curvatures(&p, c)],
            Err(_) => [f64::NAN; 3],
        }
    });
    let attributes = ["K", "H", "V_gip"]
        .iter()
        .enumerate()
        .map(|(a, name)| (name.to_string(), curv.iter().map(|c| c[a]).collect()))
        .collect();
    Ok(Mesh {
        vertices,
        normals,
        params,
        faces,
        attributes,
        skipped,
    })
}

impl Mesh {
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = std::collections::HashSet::new();
        for f in &self.faces {
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        self.vertices.len() as i64 - edges.len() as i64 + self.faces.len() as i64
    }

    /// Adds a scalar computed from each vertex's chart parameters.
    pub fn with_attribute<F: Fn(f64, f64) -> f64>(mut self, name: &str, f: F) -> Self {
        let values = self.params.iter().map(|&(u, v)| f(u, v)).collect();
        self.attributes.push((name.to_string(), values));
        self
    }

    /// `y ↦ −y` on vertices and normals, with faces reversed to keep the
    /// normals outward.
    pub fn mirrored(&self) -> Self {
        let flip = |p: &Vec3| Vec3::new(p.x, -p.y, p.z);
        Self {
            vertices: self.vertices.iter().map(flip).collect(),
            normals: self.normals.iter().map(flip).collect(),
            faces: self.faces.iter().map(|f| [f[0], f[2], f[1]]).collect(),
            ..self.clone()
        }
    }

    /// Wavefront OBJ with `v`, `vn` and `f` records; indices are 1-based.
    pub fn to_obj(&self, header: &str) -> String {
        let mut s = String::new();
        for line in header.lines() {
            let _ = writeln!(s, "# {line}");
        }
        for p in &self.vertices {
            let _ = writeln!(s, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
        }
        for n in &self.normals {
            let _ = writeln!(s, "vn {:.16e} {:.16e} {:.16e}", n.x, n.y, n.z);
        }
        for f in &self.faces {
            let (a, b, c) = (f[0] + 1, f[1] + 1, f[2] + 1);
            let _ = writeln!(s, "f {a}//{a} {b}//{b} {c}//{c}");
        }
        s
    }

    /// Sidecar CSV keyed by the 1-based OBJ vertex index.
    pub fn attributes_csv(&self) -> String {
        let mut s = String::from("vertex,u,v");
        for (name, _) in &self.attributes {
            s.push(',');
            s.push_str(name);
        }
        s.push('\n');
        for (k, &(u, v)) in self.params.iter().enumerate() {
            let _ = write!(s, "{},{:.16e},{:.16e}", k + 1, u, v);
            for (_, values) in &self.attributes {
                let _ = write!(s, ",{:.16e}", values[k]);
            }
            s.push('\n');
        }
        s
    }
}

/// OBJ polyline (`v` and one `l` record) for a sampled curve.
pub fn polyline_obj(points: &[Vec3], header: &str) -> String {
    let mut s = String::new();
    for line in header.lines() {
        let _ = writeln!(s, "# {line}");
    }
    for p in points {
        let _ = writeln!(s, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
    }
    s.push('l');
    for k in 1..=points.len() {
        let _ = write!(s, " {k}");
    }
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ParamSurface;
    use crate::helicoidal::{
        default_xi_grid, enantiomorph, minimal_surface_embedding, MinimalFamily,
    };
    use crate::surface::Symmetry;
    use std::f64::consts::PI;

    fn sphere() -> InvariantSurface {
        InvariantSurface::new(
            ParamSurface::new(
                |u, v| Vec3::new(u.sin() * v.cos(), u.sin() * v.sin(), u.cos()),
                (0.0, PI),
                (0.0, 2.0 * PI),
            ),
            Symmetry::Rotation { axis: Vec3::z() },
        )
    }

    #[test]
    fn closed_sphere_has_euler_characteristic_two() {
        let m = mesh_surface(
            &sphere(),
            17,
            33,
            &PhysicalConstants::natural(),
            Execution::default(),
        )
        .unwrap();
        assert_eq!(m.euler_characteristic(), 2);
        assert_eq!(m.vertices.len(), 15 * 32 + 2);
        assert_eq!(m.skipped, 2 * 32);
        let k = &m.attributes[0].1;
        let finite: Vec<f64> = k.iter().copied().filter(|x| x.is_finite()).collect();
        assert!(finite.iter().all(|x| (x - 1.0).abs() < 1e-6));
        // outward normals
        for (p, n) in m.vertices.iter().zip(&m.normals) {
            assert!(p.dot(n) > 0.9);
        }
    }

    #[test]
    fn helicoid_strip_keeps_every_node() {
        let fam = MinimalFamily::helicoid(1.0).unwrap();
        let hs = minimal_surface_embedding(&fam, &default_xi_grid((0.2, 2.0))).unwrap();
        let m = mesh_surface(
            &hs.surface(),
            12,
            40,
            &PhysicalConstants::natural(),
            Execution::default(),
        )
        .unwrap();
        assert_eq!(m.vertices.len(), 12 * 40);
        assert_eq!(m.skipped, 0);
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn enantiomorph_meshes_mirror_vertexwise() {
        let fam = MinimalFamily::new(1.0, 3.0, 0.0).unwrap();
        let hs = minimal_surface_embedding(&fam, &default_xi_grid((-1.0, 1.0))).unwrap();
        let c = PhysicalConstants::natural();
        let a = mesh_surface(&hs.surface(), 8, 16, &c, Execution::Sequential).unwrap();
        let b = mesh_surface(
            &enantiomorph(&hs).surface(),
            8,
            16,
            &c,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(a.vertices.len(), b.vertices.len());
        for (p, q) in a.vertices.iter().zip(&b.vertices) {
            assert_eq!(*q, Vec3::new(p.x, -p.y, p.z));
        }
        assert_eq!(a.mirrored().vertices, b.vertices);
    }

    #[test]
    fn parallel_and_sequential_meshes_match() {
        let c = PhysicalConstants::natural();
        let a = mesh_surface(&sphere(), 9, 12, &c, Execution::Sequential).unwrap();
        let b = mesh_surface(&sphere(), 9, 12, &c, Execution::Parallel).unwrap();
        assert_eq!(a.to_obj(""), b.to_obj(""));
        assert_eq!(a.attributes_csv(), b.attributes_csv());
    }

    #[test]
    fn obj_and_csv_layout() {
        let m = mesh_surface(
            &sphere(),
            3,
            5,
            &PhysicalConstants::natural(),
            Execution::Sequential,
        )
        .unwrap();
        let obj = m.to_obj("unit sphere");
        assert!(obj.starts_with("# unit sphere\nv "));
        assert_eq!(
            obj.lines().filter(|l| l.starts_with("v ")).count(),
            m.vertices.len()
        );
        assert_eq!(
            obj.lines().filter(|l| l.starts_with("f ")).count(),
            m.faces.len()
        );
        let csv = m.attributes_csv();
        assert_eq!(csv.lines().next(), Some("vertex,u,v,K,H,V_gip"));
        assert_eq!(csv.lines().count(), m.vertices.len() + 1);
        assert!(mesh_surface(
            &sphere(),
            1,
            5,
            &PhysicalConstants::natural(),
            Execution::Sequential
        )
        .is_err());
    }

    #[test]
    fn welding_merges_only_close_points() {
        let pts = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1e-12, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
        ];
        let (kept, map) = weld(&pts, 1e-9);
        assert_eq!(kept.len(), 2);
        assert_eq!(map, vec![0, 0, 1]);
    }

    #[test]
    fn polyline_records() {
        let obj = polyline_obj(&[Vec3::zeros(), Vec3::x()], "");
        assert!(obj.ends_with("l 1 2\n"));
    }
}
