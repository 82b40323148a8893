//! Watertight tessellation of a configured solid, exporters and metrics.
//!
//! Every patch is a fan of generator columns from its apex to samples on its
//! ridge boundary. Solid vertices, edge samples, ridge samples and triple
//! points live in one shared pool, so neighbouring patches reference the
//! same vertex indices along every seam.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::cone::{build_module, cone_for_vertex, Module};
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::seam;
use crate::search::SCHEMA_VERSION;
use crate::solid::{PlatonicSolid, SolidName, Vec3};

pub const MIN_RESOLUTION: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub solid: SolidName,
    pub label: String,
    pub resolution: usize,
    /// Segments per solid edge; always even so edge midpoints are vertices.
    pub edge_segments: usize,
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    /// Patch id of every triangle, in seam patch order.
    pub tags: Vec<u32>,
}

#[derive(Clone, Copy)]
enum Ref {
    Shared(usize),
    Local(usize),
}

struct Pool {
    points: Vec<Vec3>,
    edge_base: Vec<usize>,
    segments: usize,
}

impl Pool {
    fn new(solid: &PlatonicSolid, segments: usize) -> Pool {
        let mut points = solid.vertices.clone();
        let mut edge_base = Vec::with_capacity(solid.edges.len());
        for &[u, v] in &solid.edges {
            edge_base.push(points.len());
            let (pu, pv) = (solid.vertices[u], solid.vertices[v]);
            for k in 1..segments {
                points.push(if 2 * k == segments {
                    0.5 * (pu + pv)
                } else {
                    pu + (k as f64 / segments as f64) * (pv - pu)
                });
            }
        }
        Pool {
            points,
            edge_base,
            segments,
        }
    }

    /// Index of the `k`-th sample walking edge `e` away from vertex `from`.
    fn edge_point(&self, solid: &PlatonicSolid, e: usize, from: usize, k: usize) -> usize {
        let [u, v] = solid.edges[e];
        let k = if from == u { k } else { self.segments - k };
        match k {
            0 => u,
            k if k == self.segments => v,
            k => self.edge_base[e] + k - 1,
        }
    }

    fn push(&mut self, p: Vec3) -> usize {
        self.points.push(p);
        self.points.len() - 1
    }
}

fn ridge_endpoint(solid: &PlatonicSolid, pool: &Pool, face: usize, triple: Option<usize>, p: &Vec3) -> usize {
    let close = |q: &Vec3| (q - p).norm() < 1e-9;
    if let Some(&v) = solid.faces[face].iter().find(|&&v| close(&solid.vertices[v])) {
        return v;
    }
    for &e in &solid.face_edges[face] {
        let [u, _] = solid.edges[e];
        let m = pool.edge_point(solid, e, u, pool.segments / 2);
        if close(&pool.points[m]) {
            return m;
        }
    }
    match triple {
        Some(t) if close(&pool.points[t]) => t,
        _ => unreachable!("ridge endpoint off the face boundary and triple point"),
    }
}

/// Pooled samples of every ridge of a module, from arc start to arc end.
fn pool_ridges(solid: &PlatonicSolid, pool: &mut Pool, module: &Module, h: f64) -> Vec<Vec<usize>> {
    let triple = module.triple_point.map(|t| pool.push(t));
    module
        .ridges
        .iter()
        .map(|ridge| {
            let n = ((ridge.length() / h).ceil() as usize).max(2);
            let first = ridge_endpoint(solid, pool, module.face, triple, &ridge.arc_start);
            let last = ridge_endpoint(solid, pool, module.face, triple, &ridge.arc_end);
            let mut ids = vec![first];
            for i in 1..n {
                ids.push(pool.push(ridge.point_at(i as f64 / n as f64)));
            }
            ids.push(last);
            ids
        })
        .collect()
}

struct PatchJob<'a> {
    module: &'a Module,
    index: usize,
    ridges: Vec<&'a [usize]>,
}

fn tessellate_patch(solid: &PlatonicSolid, pool: &Pool, job: &PatchJob<'_>, h: f64) -> (Vec<Vec3>, Vec<[Ref; 3]>) {
    let patch = &job.module.patches[job.index];
    let a = patch.apex();
    let pa = patch.cone.apex;
    let t_of = |i: usize| patch.local_azimuth(&(pool.points[i] - pa));

    // boundary samples in increasing local azimuth
    let mut arcs: Vec<Vec<usize>> = job
        .ridges
        .iter()
        .map(|r| {
            let mut v = r.to_vec();
            if t_of(v[0]) > t_of(*v.last().expect("ridge samples")) {
                v.reverse();
            }
            v
        })
        .collect();
    arcs.sort_by(|x, y| t_of(x[0]).total_cmp(&t_of(y[0])));
    let mut boundary: Vec<usize> = Vec::new();
    for arc in arcs {
        let skip = usize::from(boundary.last() == arc.first());
        boundary.extend_from_slice(&arc[skip..]);
    }

    let m = boundary.len() - 1;
    let edge_column = |vertex: usize, top: usize| -> Vec<Ref> {
        let e = solid.edge_index(a, vertex).expect("patch side is a solid edge");
        let n = if top == vertex {
            pool.segments
        } else {
            pool.segments / 2
        };
        debug_assert_eq!(pool.edge_point(solid, e, a, n), top);
        (0..=n).map(|k| Ref::Shared(pool.edge_point(solid, e, a, k))).collect()
    };

    let mut locals = Vec::new();
    let mut columns: Vec<Vec<Ref>> = Vec::with_capacity(m + 1);
    for (i, &b) in boundary.iter().enumerate() {
        if i == 0 {
            columns.push(edge_column(patch.start_vertex, b));
        } else if i == m {
            columns.push(edge_column(patch.end_vertex, b));
        } else {
            let pb = pool.points[b];
            let n = (((pb - pa).norm() / h).round() as usize).max(1);
            let mut col = vec![Ref::Shared(a)];
            for k in 1..n {
                locals.push(pa + (k as f64 / n as f64) * (pb - pa));
                col.push(Ref::Local(locals.len() - 1));
            }
            col.push(Ref::Shared(b));
            columns.push(col);
        }
    }

    let mut tris = Vec::new();
    for pair in columns.windows(2) {
        let (c, d) = (&pair[0], &pair[1]);
        let (p, q) = (c.len() - 1, d.len() - 1);
        tris.push([c[0], c[1], d[1]]);
        let (mut i, mut j) = (1, 1);
        while i < p || j < q {
            // advance on the column whose next sample sits lower
            let advance_c = j == q || (i < p && ((i + 1) * q) <= ((j + 1) * p));
            if advance_c {
                tris.push([c[i], c[i + 1], d[j]]);
                i += 1;
            } else {
                tris.push([c[i], d[j + 1], d[j]]);
                j += 1;
            }
        }
    }
    (locals, tris)
}

/// Tessellate every module of a configuration.
pub fn build_mesh(solid: &PlatonicSolid, config: &Configuration, resolution: usize) -> Result<Mesh> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::ResolutionTooLow(resolution));
    }
    let segments = resolution + resolution % 2;
    let h = solid.edge_length() / segments as f64;
    let modules: Vec<Module> = (0..solid.n_faces())
        .map(|f| build_module(solid, f, config.orientations[f] as usize))
        .collect::<Result<_>>()?;

    let mut pool = Pool::new(solid, segments);
    let ridge_ids: Vec<Vec<Vec<usize>>> = modules.iter().map(|m| pool_ridges(solid, &mut pool, m, h)).collect();

    let mut jobs = Vec::new();
    for (module, ids) in modules.iter().zip(&ridge_ids) {
        for (index, patch) in module.patches.iter().enumerate() {
            let ridges = module
                .ridge_pairs
                .iter()
                .zip(ids)
                .filter(|((x, y), _)| *x == patch.apex() || *y == patch.apex())
                .map(|(_, r)| r.as_slice())
                .collect();
            jobs.push(PatchJob { module, index, ridges });
        }
    }
    let pieces: Vec<(Vec<Vec3>, Vec<[Ref; 3]>)> = jobs
        .par_iter()
        .map(|job| tessellate_patch(solid, &pool, job, h))
        .collect();

    let mut vertices = pool.points;
    let mut triangles = Vec::new();
    let mut tags = Vec::new();
    for (patch_id, (locals, tris)) in pieces.into_iter().enumerate() {
        let base = vertices.len();
        vertices.extend(locals);
        let resolve = |r: Ref| match r {
            Ref::Shared(i) => i as u32,
            Ref::Local(i) => (base + i) as u32,
        };
        let mut out: Vec<[u32; 3]> = tris.into_iter().map(|t| t.map(resolve)).collect();
        // the zipper winds every triangle the same way; fix the sense once
        let signed: f64 = out.iter().map(|t| signed_volume(&vertices, t)).sum();
        if signed < 0.0 {
            for t in &mut out {
                t.swap(1, 2);
            }
        }
        tags.extend(std::iter::repeat_n(patch_id as u32, out.len()));
        triangles.extend(out);
    }
    Ok(Mesh {
        solid: solid.name,
        label: config.label(),
        resolution,
        edge_segments: segments,
        vertices,
        triangles,
        tags,
    })
}

fn signed_volume(vertices: &[Vec3], t: &[u32; 3]) -> f64 {
    let [a, b, c] = t.map(|i| vertices[i as usize]);
    a.dot(&b.cross(&c)) / 6.0
}

impl Mesh {
    fn corners(&self, t: &[u32; 3]) -> [Vec3; 3] {
        t.map(|i| self.vertices[i as usize])
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = self.corners(t);
                0.5 * (b - a).cross(&(c - a)).norm()
            })
            .sum()
    }

    /// Enclosed volume by the divergence theorem.
    pub fn volume(&self) -> f64 {
        self.triangles.iter().map(|t| signed_volume(&self.vertices, t)).sum()
    }

    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(u32, u32)> = self
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |i| (t[i].min(t[(i + 1) % 3]), t[i].max(t[(i + 1) % 3]))))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.triangles.len() as i64
    }

    /// Closed, consistently oriented 2-manifold check: every directed edge
    /// occurs once and its reverse occurs once, and no vertex is unused.
    pub fn check_closed(&self) -> Result<()> {
        let mut directed: HashMap<(u32, u32), u32> = HashMap::with_capacity(3 * self.triangles.len());
        for t in &self.triangles {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::OpenMesh(format!("degenerate triangle {t:?}")));
            }
            for i in 0..3 {
                *directed.entry((t[i], t[(i + 1) % 3])).or_default() += 1;
            }
        }
        for (&(a, b), &n) in &directed {
            if n != 1 {
                return Err(Error::OpenMesh(format!("edge {a}-{b} used {n} times in one direction")));
            }
            if !directed.contains_key(&(b, a)) {
                return Err(Error::OpenMesh(format!("boundary edge {a}-{b}")));
            }
        }
        let mut used = vec![false; self.vertices.len()];
        for t in &self.triangles {
            for &i in t {
                used[i as usize] = true;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::OpenMesh(format!("vertex {i} is not used")));
        }
        Ok(())
    }

    pub fn max_radius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn find_vertex(&self, p: &Vec3, tol: f64) -> Option<usize> {
        self.vertices.iter().position(|v| (v - p).norm() <= tol)
    }

    pub fn scaled(&self, factor: f64) -> Mesh {
        Mesh {
            vertices: self.vertices.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Largest height of a mesh vertex above the plane of a triangle. Zero for
    /// a convex mesh. At most `max_planes` triangles are tested, evenly spread.
    pub fn convexity_defect(&self, max_planes: usize) -> f64 {
        let stride = self.triangles.len().div_ceil(max_planes.max(1)).max(1);
        self.triangles
            .par_iter()
            .step_by(stride)
            .map(|t| {
                let [a, b, c] = self.corners(t);
                let n = (b - a).cross(&(c - a));
                let len = n.norm();
                if len < 1e-14 {
                    return 0.0;
                }
                let n = n / len;
                self.vertices.iter().map(|v| (v - a).dot(&n)).fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Largest distance from a triangle centroid to the cone surface of the
/// patch it belongs to; the chord error of the tessellation.
pub fn surface_deviation(solid: &PlatonicSolid, config: &Configuration, mesh: &Mesh) -> f64 {
    let cones: Vec<_> = seam::patches(solid, config)
        .iter()
        .map(|p| cone_for_vertex(solid, p.apex))
        .collect();
    mesh.triangles
        .iter()
        .zip(&mesh.tags)
        .map(|(t, &tag)| {
            let [a, b, c] = mesh.corners(t);
            cones[tag as usize].signed_distance(&((a + b + c) / 3.0)).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportFormat {
    StlBinary,
    StlAscii,
    Obj,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::StlBinary | ExportFormat::StlAscii => "stl",
            ExportFormat::Obj => "obj",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stl-binary" | "stl" => Ok(ExportFormat::StlBinary),
            "stl-ascii" => Ok(ExportFormat::StlAscii),
            "obj" => Ok(ExportFormat::Obj),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

fn unit_normal(t: [Vec3; 3]) -> Vec3 {
    let n = (t[1] - t[0]).cross(&(t[2] - t[0]));
    let len = n.norm();
    if len > 0.0 {
        n / len
    } else {
        n
    }
}

pub fn write_mesh<W: Write>(mesh: &Mesh, format: ExportFormat, mut out: W) -> io::Result<()> {
    match format {
        ExportFormat::StlBinary => {
            let mut header = [b' '; 80];
            let title = format!("platonicon {}", mesh.label);
            let n = title.len().min(80);
            header[..n].copy_from_slice(&title.as_bytes()[..n]);
            out.write_all(&header)?;
            out.write_all(&(mesh.triangles.len() as u32).to_le_bytes())?;
            for t in &mesh.triangles {
                let c = mesh.corners(t);
                for v in std::iter::once(unit_normal(c)).chain(c) {
                    for x in v.iter() {
                        out.write_all(&(*x as f32).to_le_bytes())?;
                    }
                }
                out.write_all(&0u16.to_le_bytes())?;
            }
        }
        ExportFormat::StlAscii => {
            writeln!(out, "solid platonicon")?;
            for t in &mesh.triangles {
                let c = mesh.corners(t);
                let n = unit_normal(c);
                writeln!(out, "  facet normal {:e} {:e} {:e}", n.x, n.y, n.z)?;
                writeln!(out, "    outer loop")?;
                for v in c {
                    writeln!(out, "      vertex {:e} {:e} {:e}", v.x, v.y, v.z)?;
                }
                writeln!(out, "    endloop")?;
                writeln!(out, "  endfacet")?;
            }
            writeln!(out, "endsolid platonicon")?;
        }
        ExportFormat::Obj => {
            writeln!(out, "# platonicon {}", mesh.label)?;
            for v in &mesh.vertices {
                writeln!(out, "v {} {} {}", v.x, v.y, v.z)?;
            }
            let mut tag = u32::MAX;
            for (t, &g) in mesh.triangles.iter().zip(&mesh.tags) {
                if g != tag {
                    writeln!(out, "g patch{g}")?;
                    tag = g;
                }
                writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
            }
        }
    }
    Ok(())
}

pub fn export_mesh(mesh: &Mesh, format: ExportFormat) -> Vec<u8> {
    let mut buf = Vec::new();
    write_mesh(mesh, format, &mut buf).expect("writing to memory");
    buf
}

pub fn save_mesh(mesh: &Mesh, format: ExportFormat, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = io::BufWriter::new(file);
    write_mesh(mesh, format, &mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Vertices and triangles of an OBJ document. Polygons are fan-split.
pub fn read_obj(text: &str) -> Result<(Vec<Vec3>, Vec<[u32; 3]>)> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let bad = || Error::Parse(format!("OBJ line {}: {line}", no + 1));
        match it.next() {
            Some("v") => {
                let xs: Vec<f64> = it.map(|s| s.parse().map_err(|_| bad())).collect::<Result<_>>()?;
                if xs.len() < 3 {
                    return Err(bad());
                }
                vertices.push(Vec3::new(xs[0], xs[1], xs[2]));
            }
            Some("f") => {
                let ids: Vec<u32> = it
                    .map(|s| {
                        s.split('/')
                            .next()
                            .and_then(|x| x.parse::<u32>().ok())
                            .filter(|&x| x >= 1)
                            .map(|x| x - 1)
                            .ok_or_else(bad)
                    })
                    .collect::<Result<_>>()?;
                if ids.len() < 3 {
                    return Err(bad());
                }
                for i in 1..ids.len() - 1 {
                    triangles.push([ids[0], ids[i], ids[i + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok((vertices, triangles))
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub solid: SolidName,
    pub family: &'static str,
    pub configuration: String,
    pub class_index: Option<usize>,
    pub resolution: usize,
    pub vertices: usize,
    pub triangles: usize,
    pub surface_area: f64,
    pub volume: f64,
    pub solid_surface_area: f64,
    pub solid_volume: f64,
    pub circumsphere_area: f64,
    pub circumsphere_volume: f64,
    pub area_to_volume: f64,
    pub volume_to_solid: f64,
    pub volume_to_circumsphere: f64,
    pub area_to_circumsphere: f64,
    pub volume_ordering_holds: bool,
    /// Reported only; see [`Mesh::convexity_defect`].
    pub convexity_defect: f64,
}

pub fn metrics(mesh: &Mesh, solid: &PlatonicSolid) -> Result<MetricsReport> {
    mesh.check_closed()?;
    let area = mesh.area();
    let volume = mesh.volume();
    let solid_volume = solid.volume();
    let sphere_volume = 4.0 * PI / 3.0;
    let sphere_area = 4.0 * PI;
    Ok(MetricsReport {
        schema_version: SCHEMA_VERSION,
        solid: solid.name,
        family: solid.name.family(),
        configuration: mesh.label.clone(),
        class_index: None,
        resolution: mesh.resolution,
        vertices: mesh.vertices.len(),
        triangles: mesh.triangles.len(),
        surface_area: area,
        volume,
        solid_surface_area: solid.surface_area(),
        solid_volume,
        circumsphere_area: sphere_area,
        circumsphere_volume: sphere_volume,
        area_to_volume: area / volume,
        volume_to_solid: volume / solid_volume,
        volume_to_circumsphere: volume / sphere_volume,
        area_to_circumsphere: area / sphere_area,
        volume_ordering_holds: solid_volume < volume && volume < sphere_volume,
        convexity_defect: mesh.convexity_defect(2000),
    })
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// CSV document with a header row and one row per report.
pub fn metrics_csv(reports: &[MetricsReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        w.serialize(r).expect("flat record");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::enumerate_configs;
    use crate::solid::build_solid;

    fn matched_tetra() -> (PlatonicSolid, Configuration) {
        let s = build_solid(SolidName::Tetrahedron);
        let c = enumerate_configs(&s)
            .find(|c| seam::is_developable(&s, c, seam::RuleSet::TangentAlternation).developable)
            .unwrap();
        (s, c)
    }

    fn first_config(name: SolidName) -> (PlatonicSolid, Configuration) {
        let s = build_solid(name);
        let c = Configuration::new(&s, vec![0; s.n_faces()]).unwrap();
        (s, c)
    }

    #[test]
    fn closed_manifold_for_every_solid() {
        for name in SolidName::ALL {
            let (s, c) = first_config(name);
            let m = build_mesh(&s, &c, 8).unwrap();
            m.check_closed().unwrap();
            assert_eq!(m.euler_characteristic(), 2, "{name}");
            assert!(m.max_radius() <= 1.0 + 1e-9);
            assert!(m.volume() > 0.0);
        }
    }

    #[test]
    fn matched_tetra_at_resolution_64() {
        let (s, c) = matched_tetra();
        let m = build_mesh(&s, &c, 64).unwrap();
        m.check_closed().unwrap();
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn edge_midpoints_are_vertices() {
        for name in SolidName::ALL {
            let (s, c) = first_config(name);
            let m = build_mesh(&s, &c, 5).unwrap();
            for &[u, v] in &s.edges {
                let mid = 0.5 * (s.vertices[u] + s.vertices[v]);
                assert!(m.find_vertex(&mid, 1e-12).is_some(), "{name} edge {u}-{v}");
            }
        }
    }

    #[test]
    fn volume_converges() {
        for name in SolidName::ALL {
            let (s, c) = first_config(name);
            let v1 = build_mesh(&s, &c, 32).unwrap().volume();
            let v2 = build_mesh(&s, &c, 64).unwrap().volume();
            assert!(((v2 - v1) / v2).abs() < 1e-3, "{name}: {v1} vs {v2}");
        }
    }

    #[test]
    fn area_matches_patch_integrals() {
        let (s, c) = matched_tetra();
        let analytic: f64 = (0..4)
            .map(|f| build_module(&s, f, c.orientations[f] as usize).unwrap().area())
            .sum();
        let m = build_mesh(&s, &c, 64).unwrap();
        assert!((m.area() - analytic).abs() / analytic < 1e-3);
    }

    #[test]
    fn chord_error_shrinks() {
        let (s, c) = first_config(SolidName::Dodecahedron);
        let d1 = surface_deviation(&s, &c, &build_mesh(&s, &c, 8).unwrap());
        let d2 = surface_deviation(&s, &c, &build_mesh(&s, &c, 16).unwrap());
        assert!(d2 < d1 && d2 < 0.35 * d1, "{d1} {d2}");
    }

    #[test]
    fn deterministic_output() {
        let (s, c) = first_config(SolidName::Icosahedron);
        let a = export_mesh(&build_mesh(&s, &c, 6).unwrap(), ExportFormat::StlBinary);
        let b = export_mesh(&build_mesh(&s, &c, 6).unwrap(), ExportFormat::StlBinary);
        assert_eq!(a, b);
    }

    #[test]
    fn stl_and_obj_sizes() {
        let (s, c) = first_config(SolidName::Cube);
        let m = build_mesh(&s, &c, 4).unwrap();
        let stl = export_mesh(&m, ExportFormat::StlBinary);
        assert_eq!(stl.len(), 84 + 50 * m.triangles.len());
        let ascii = String::from_utf8(export_mesh(&m, ExportFormat::StlAscii)).unwrap();
        assert_eq!(ascii.matches("facet normal").count(), m.triangles.len());
        let obj = String::from_utf8(export_mesh(&m, ExportFormat::Obj)).unwrap();
        let (v, t) = read_obj(&obj).unwrap();
        assert_eq!(v.len(), m.vertices.len());
        assert_eq!(t, m.triangles);
    }

    #[test]
    fn metrics_ordering() {
        let (s, c) = matched_tetra();
        let r = metrics(&build_mesh(&s, &c, 16).unwrap(), &s).unwrap();
        assert!((r.solid_volume - 8.0 / (9.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!((r.circumsphere_volume - 4.188_790_204_786_391).abs() < 1e-12);
        assert!(r.volume_ordering_holds);
        assert!(r.convexity_defect < 1e-6, "{}", r.convexity_defect);
        let doc = metrics_csv(std::slice::from_ref(&r));
        let mut rd = csv::Reader::from_reader(doc.as_bytes());
        let header = rd.headers().unwrap().clone();
        let rows: Vec<csv::StringRecord> = rd.records().map(|x| x.unwrap()).collect();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].len(), header.len());
        assert_eq!(&rows[0][3], r.configuration.as_str());
    }

    #[test]
    fn rejects_low_resolution_and_open_mesh() {
        let (s, c) = first_config(SolidName::Tetrahedron);
        assert!(matches!(build_mesh(&s, &c, 2), Err(Error::ResolutionTooLow(2))));
        let mut m = build_mesh(&s, &c, 3).unwrap();
        m.triangles.pop();
        assert!(matches!(metrics(&m, &s), Err(Error::OpenMesh(_))));
    }

    #[test]
    fn unknown_format() {
        assert!("ply".parse::<ExportFormat>().is_err());
        assert_eq!("obj".parse::<ExportFormat>().unwrap(), ExportFormat::Obj);
    }
}
