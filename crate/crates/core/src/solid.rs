//! Canonical tables for the five Platonic solids.
//!
//! Every solid is scaled to unit circumradius with its centroid at the
//! origin. Vertex order is fixed by the literal tables in this file. Faces
//! are discovered from the coordinates and then put in a breadth-first
//! "spiral" order:
//!
//! 1. each face cycle runs counter-clockwise seen from outside and starts at
//!    its lowest vertex index;
//! 2. faces are keyed by their sorted vertex list; the face with the smallest
//!    key is face 0;
//! 3. the remaining faces follow in breadth-first order over edge adjacency,
//!    neighbours visited in increasing key order.
//!
//! Edges are unordered pairs `(a, b)` with `a < b`, sorted lexicographically.
//! The full tables are dumped to `docs/solids.json` by `platonicon solids`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolidName {
    Tetrahedron,
    Cube,
    Octahedron,
    Dodecahedron,
    Icosahedron,
}

impl SolidName {
    pub const ALL: [SolidName; 5] = [
        SolidName::Tetrahedron,
        SolidName::Cube,
        SolidName::Octahedron,
        SolidName::Dodecahedron,
        SolidName::Icosahedron,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SolidName::Tetrahedron => "tetrahedron",
            SolidName::Cube => "cube",
            SolidName::Octahedron => "octahedron",
            SolidName::Dodecahedron => "dodecahedron",
            SolidName::Icosahedron => "icosahedron",
        }
    }

    pub fn dual(self) -> SolidName {
        match self {
            SolidName::Tetrahedron => SolidName::Tetrahedron,
            SolidName::Cube => SolidName::Octahedron,
            SolidName::Octahedron => SolidName::Cube,
            SolidName::Dodecahedron => SolidName::Icosahedron,
            SolidName::Icosahedron => SolidName::Dodecahedron,
        }
    }

    /// Name of the roller family built on this solid.
    pub fn family(self) -> &'static str {
        match self {
            SolidName::Tetrahedron => "tetrahedcon",
            SolidName::Cube => "cubicon",
            SolidName::Octahedron => "octahedcon",
            SolidName::Dodecahedron => "dodecahedcon",
            SolidName::Icosahedron => "icosahedcon",
        }
    }
}

impl fmt::Display for SolidName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolidName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tetrahedron" | "tetra" => Ok(SolidName::Tetrahedron),
            "cube" | "hexahedron" => Ok(SolidName::Cube),
            "octahedron" | "octa" => Ok(SolidName::Octahedron),
            "dodecahedron" | "dodeca" => Ok(SolidName::Dodecahedron),
            "icosahedron" | "icosa" => Ok(SolidName::Icosahedron),
            _ => Err(Error::UnknownSolid {
                name: s.to_string(),
                valid: SolidName::ALL.map(SolidName::as_str).join(", "),
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlatonicSolid {
    pub name: SolidName,
    #[serde(serialize_with = "ser_points")]
    pub vertices: Vec<Vec3>,
    /// Vertex cycles, counter-clockwise seen from outside.
    pub faces: Vec<Vec<usize>>,
    /// Unordered vertex pairs `(a, b)` with `a < b`.
    pub edges: Vec<[usize; 2]>,
    /// The two faces incident to each edge, smaller index first.
    pub edge_faces: Vec<[usize; 2]>,
    /// `face_edges[f][i]` is the edge joining `faces[f][i]` and `faces[f][i + 1]`.
    pub face_edges: Vec<Vec<usize>>,
    pub dihedral: f64,
    pub dual_dihedral: f64,
}

fn ser_points<S: serde::Serializer>(pts: &[Vec3], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(pts.len()))?;
    for p in pts {
        seq.serialize_element(&[p.x, p.y, p.z])?;
    }
    seq.end()
}

impl PlatonicSolid {
    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn centroid(&self) -> Vec3 {
        Vec3::zeros()
    }

    pub fn dual_name(&self) -> SolidName {
        self.name.dual()
    }

    pub fn face_size(&self) -> usize {
        self.faces[0].len()
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { [a, b] } else { [b, a] };
        self.edges.binary_search(&key).ok()
    }

    pub fn edge_length(&self) -> f64 {
        let [a, b] = self.edges[0];
        (self.vertices[b] - self.vertices[a]).norm()
    }

    /// Outward unit normal of a face.
    pub fn face_normal(&self, face: usize) -> Vec3 {
        self.face_center(face).normalize()
    }

    pub fn face_center(&self, face: usize) -> Vec3 {
        let f = &self.faces[face];
        f.iter().map(|&v| self.vertices[v]).sum::<Vec3>() / f.len() as f64
    }

    /// Faces incident to a vertex, in index order.
    pub fn vertex_faces(&self, v: usize) -> Vec<usize> {
        (0..self.faces.len()).filter(|&f| self.faces[f].contains(&v)).collect()
    }

    /// Neighbours of `v` along solid edges.
    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&[a, b]| match (a == v, b == v) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .collect()
    }

    pub fn volume(&self) -> f64 {
        // Divergence theorem over fan-triangulated faces.
        let mut vol = 0.0;
        for f in &self.faces {
            let p0 = self.vertices[f[0]];
            for i in 1..f.len() - 1 {
                let p1 = self.vertices[f[i]];
                let p2 = self.vertices[f[i + 1]];
                vol += p0.dot(&p1.cross(&p2)) / 6.0;
            }
        }
        vol
    }

    pub fn surface_area(&self) -> f64 {
        let mut area = 0.0;
        for f in &self.faces {
            let p0 = self.vertices[f[0]];
            for i in 1..f.len() - 1 {
                area += 0.5 * (self.vertices[f[i]] - p0).cross(&(self.vertices[f[i + 1]] - p0)).norm();
            }
        }
        area
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

const PHI: f64 = 1.618_033_988_749_895;

fn raw_vertices(name: SolidName) -> Vec<[f64; 3]> {
    let signs = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
    let cube = || {
        let mut v = Vec::with_capacity(8);
        for x in [-1.0, 1.0] {
            for y in [-1.0, 1.0] {
                for z in [-1.0, 1.0] {
                    v.push([x, y, z]);
                }
            }
        }
        v
    };
    // (0, s1*a, s2*b) and its two cyclic shifts.
    let cyclic = |a: f64, b: f64| {
        let mut v = Vec::with_capacity(12);
        for (s1, s2) in signs {
            v.push([0.0, s1 * a, s2 * b]);
        }
        for (s1, s2) in signs {
            v.push([s1 * a, s2 * b, 0.0]);
        }
        for (s1, s2) in signs {
            v.push([s2 * b, 0.0, s1 * a]);
        }
        v
    };
    match name {
        SolidName::Tetrahedron => vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]],
        SolidName::Cube => cube(),
        SolidName::Octahedron => vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ],
        SolidName::Dodecahedron => {
            let mut v = cube();
            v.extend(cyclic(1.0 / PHI, PHI));
            v
        }
        SolidName::Icosahedron => cyclic(1.0, PHI),
    }
}

pub fn build_solid(name: SolidName) -> PlatonicSolid {
    let vertices: Vec<Vec3> = raw_vertices(name)
        .into_iter()
        .map(|[x, y, z]| Vec3::new(x, y, z).normalize())
        .collect();
    let faces = order_faces(discover_faces(&vertices));

    let mut edge_set = BTreeSet::new();
    for f in &faces {
        for i in 0..f.len() {
            let (a, b) = (f[i], f[(i + 1) % f.len()]);
            edge_set.insert([a.min(b), a.max(b)]);
        }
    }
    let edges: Vec<[usize; 2]> = edge_set.into_iter().collect();
    let lookup = |a: usize, b: usize| {
        edges
            .binary_search(&[a.min(b), a.max(b)])
            .expect("face edge missing from edge table")
    };
    let face_edges: Vec<Vec<usize>> = faces
        .iter()
        .map(|f| (0..f.len()).map(|i| lookup(f[i], f[(i + 1) % f.len()])).collect())
        .collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); edges.len()];
    for (fi, fe) in face_edges.iter().enumerate() {
        for &e in fe {
            incident[e].push(fi);
        }
    }
    let edge_faces: Vec<[usize; 2]> = incident
        .into_iter()
        .map(|v| {
            assert_eq!(v.len(), 2, "edge not shared by exactly two faces");
            [v[0].min(v[1]), v[0].max(v[1])]
        })
        .collect();

    let n0 = face_normal_of(&vertices, &faces[edge_faces[0][0]]);
    let n1 = face_normal_of(&vertices, &faces[edge_faces[0][1]]);
    let dihedral = PI - n0.angle(&n1);

    // The dual's face normals are this solid's vertex directions, so its
    // dihedral follows from the central angle of an edge.
    let [a, b] = edges[0];
    let dual_dihedral = PI - vertices[a].angle(&vertices[b]);

    PlatonicSolid {
        name,
        vertices,
        faces,
        edges,
        edge_faces,
        face_edges,
        dihedral,
        dual_dihedral,
    }
}

fn face_normal_of(vertices: &[Vec3], face: &[usize]) -> Vec3 {
    let c: Vec3 = face.iter().map(|&v| vertices[v]).sum::<Vec3>() / face.len() as f64;
    c.normalize()
}

/// Supporting planes that contain at least three vertices.
fn discover_faces(vertices: &[Vec3]) -> Vec<Vec<usize>> {
    let n = vertices.len();
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let normal = (vertices[j] - vertices[i]).cross(&(vertices[k] - vertices[i]));
                if normal.norm() < 1e-9 {
                    continue;
                }
                let mut normal = normal.normalize();
                if normal.dot(&vertices[i]) < 0.0 {
                    normal = -normal;
                }
                let d = normal.dot(&vertices[i]);
                if vertices.iter().any(|v| normal.dot(v) > d + 1e-9) {
                    continue;
                }
                let on: Vec<usize> = (0..n)
                    .filter(|&m| (normal.dot(&vertices[m]) - d).abs() < 1e-9)
                    .collect();
                found.insert(on);
            }
        }
    }
    found.into_iter().map(|set| counter_clockwise(vertices, set)).collect()
}

fn counter_clockwise(vertices: &[Vec3], set: Vec<usize>) -> Vec<usize> {
    let c: Vec3 = set.iter().map(|&v| vertices[v]).sum::<Vec3>() / set.len() as f64;
    let normal = c.normalize();
    let u = (vertices[set[0]] - c).normalize();
    let w = normal.cross(&u);
    let mut cycle = set;
    cycle.sort_by(|&a, &b| {
        let pa = vertices[a] - c;
        let pb = vertices[b] - c;
        let ta = pa.dot(&w).atan2(pa.dot(&u));
        let tb = pb.dot(&w).atan2(pb.dot(&u));
        ta.total_cmp(&tb)
    });
    let start = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, &v)| v)
        .map(|(i, _)| i)
        .unwrap_or(0);
    cycle.rotate_left(start);
    cycle
}

/// Breadth-first face order; see the module docs.
fn order_faces(mut faces: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let key = |f: &Vec<usize>| {
        let mut k = f.clone();
        k.sort_unstable();
        k
    };
    faces.sort_by_key(key);
    let keys: Vec<Vec<usize>> = faces.iter().map(key).collect();
    let shares_edge = |a: &Vec<usize>, b: &Vec<usize>| a.iter().filter(|v| b.contains(v)).count() == 2;

    let mut order = Vec::with_capacity(faces.len());
    let mut seen = vec![false; faces.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(f) = queue.pop_front() {
        order.push(f);
        let mut next: BTreeMap<&Vec<usize>, usize> = BTreeMap::new();
        for g in 0..faces.len() {
            if !seen[g] && shares_edge(&faces[f], &faces[g]) {
                next.insert(&keys[g], g);
            }
        }
        for (_, g) in next {
            seen[g] = true;
            queue.push_back(g);
        }
    }
    order.into_iter().map(|i| faces[i].clone()).collect()
}

/// Half of the dual dihedral: the half-angle of every cone on this solid.
pub fn cone_half_angle(solid: &PlatonicSolid) -> f64 {
    solid.dual_dihedral / 2.0
}

pub fn dual_dihedral(solid: &PlatonicSolid) -> f64 {
    solid.dual_dihedral
}
