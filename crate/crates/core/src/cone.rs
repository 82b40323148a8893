//! Vertex cones, the modules they carve out above each face, and the conic
//! ridges where two cones of a module meet.
//!
//! Azimuths on a cone are measured in the right-handed frame `(e1, e2, u)`
//! where `u` is the axis. A generator at azimuth `phi` is
//! `cos(alpha) u + sin(alpha) w(phi)` with `w = cos(phi) e1 + sin(phi) e2`.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::config::apex_set;
use crate::error::{Error, Result};
use crate::solid::{cone_half_angle, PlatonicSolid, Vec3};
use crate::tolerance;

#[derive(Debug, Clone, Serialize)]
pub struct Cone {
    pub vertex: usize,
    #[serde(serialize_with = "ser_vec")]
    pub apex: Vec3,
    /// Unit vector from the apex toward the centroid.
    #[serde(serialize_with = "ser_vec")]
    pub axis: Vec3,
    pub half_angle: f64,
    #[serde(skip)]
    pub e1: Vec3,
    #[serde(skip)]
    pub e2: Vec3,
}

fn ser_vec<S: serde::Serializer>(v: &Vec3, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&[v.x, v.y, v.z], s)
}

pub fn cone_for_vertex(solid: &PlatonicSolid, vertex: usize) -> Cone {
    let apex = solid.vertices[vertex];
    let axis = (solid.centroid() - apex).normalize();
    let first = *solid.neighbours(vertex).iter().min().expect("vertex has neighbours");
    let d = solid.vertices[first] - apex;
    let e1 = (d - d.dot(&axis) * axis).normalize();
    let e2 = axis.cross(&e1);
    Cone {
        vertex,
        apex,
        axis,
        half_angle: cone_half_angle(solid),
        e1,
        e2,
    }
}

impl Cone {
    pub fn w(&self, phi: f64) -> Vec3 {
        phi.cos() * self.e1 + phi.sin() * self.e2
    }

    /// Unit generator direction.
    pub fn generator(&self, phi: f64) -> Vec3 {
        let (s, c) = self.half_angle.sin_cos();
        c * self.axis + s * self.w(phi)
    }

    /// Outward unit normal along the generator at `phi`.
    pub fn normal(&self, phi: f64) -> Vec3 {
        let (s, c) = self.half_angle.sin_cos();
        c * self.w(phi) - s * self.axis
    }

    pub fn point(&self, phi: f64, r: f64) -> Vec3 {
        self.apex + r * self.generator(phi)
    }

    /// Azimuth of a direction in `[0, 2pi)`.
    pub fn azimuth(&self, dir: &Vec3) -> f64 {
        dir.dot(&self.e2).atan2(dir.dot(&self.e1)).rem_euclid(TAU)
    }

    /// Signed distance-like residual, positive outside the cone solid.
    /// Exact distance near the surface on the forward nappe.
    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        let d = p - self.apex;
        let h = d.dot(&self.axis);
        let rho = (d - h * self.axis).norm();
        let (s, c) = self.half_angle.sin_cos();
        rho * c - h * s
    }

    /// Tangent-plane normal along the generator through `p`.
    pub fn tangent_normal_at(&self, p: &Vec3) -> Vec3 {
        self.normal(self.azimuth(&(p - self.apex)))
    }

    /// Angle between a direction and the axis.
    pub fn opening(&self, dir: &Vec3) -> f64 {
        dir.normalize().dot(&self.axis).clamp(-1.0, 1.0).acos()
    }
}

/// The piece of one apex cone that belongs to a module.
#[derive(Debug, Clone)]
pub struct Patch {
    pub face: usize,
    pub cone: Cone,
    /// Azimuth of the generator at local azimuth 0.
    pub phi0: f64,
    /// Azimuth span; local azimuths run over `[0, span]`.
    pub span: f64,
    /// Face neighbours of the apex at local azimuth 0 and `span`.
    pub start_vertex: usize,
    pub end_vertex: usize,
    /// Other apices of the module.
    pub others: Vec<(usize, Vec3)>,
}

impl Patch {
    pub fn apex(&self) -> usize {
        self.cone.vertex
    }

    pub fn generator(&self, t: f64) -> Vec3 {
        self.cone.generator(self.phi0 + t)
    }

    pub fn normal(&self, t: f64) -> Vec3 {
        self.cone.normal(self.phi0 + t)
    }

    pub fn point(&self, t: f64, r: f64) -> Vec3 {
        self.cone.point(self.phi0 + t, r)
    }

    /// Local azimuth of a direction, with values just below 0 folded onto 0.
    pub fn local_azimuth(&self, dir: &Vec3) -> f64 {
        let t = (self.cone.azimuth(dir) - self.phi0).rem_euclid(TAU);
        if t > TAU - 1e-9 {
            0.0
        } else {
            t
        }
    }

    /// Radial extent along the generator at local azimuth `t`, and the apex
    /// whose bisector plane bounds it.
    pub fn radial_bound(&self, t: f64) -> (f64, usize) {
        let g = self.generator(t);
        let a = self.cone.apex;
        let mut best = (f64::INFINITY, usize::MAX);
        for &(b, pb) in &self.others {
            let r = bisector_hit(&a, &pb, &g);
            if r < best.0 {
                best = (r, b);
            }
        }
        best
    }

    /// Patch area from `1/2 sin(alpha) * integral r(t)^2 dt`.
    pub fn area(&self) -> f64 {
        let n = 4096;
        let h = self.span / n as f64;
        let f = |t: f64| self.radial_bound(t).0.powi(2);
        let mut acc = f(0.0) + f(self.span);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        0.5 * self.cone.half_angle.sin() * acc * h / 3.0
    }
}

/// Distance along unit direction `g` from `a` to the perpendicular bisector
/// plane of `a` and `b`; infinite when `g` points away from it.
pub fn bisector_hit(a: &Vec3, b: &Vec3, g: &Vec3) -> f64 {
    let ab = b - a;
    let d = ab.normalize();
    let gd = g.dot(&d);
    if gd <= 1e-15 {
        f64::INFINITY
    } else {
        0.5 * ab.norm() / gd
    }
}

/// A ridge arc lying in the perpendicular bisector plane of two apices.
#[derive(Debug, Clone)]
pub struct RidgeConic {
    pub face: usize,
    pub cone_a: Cone,
    pub cone_b: Cone,
    /// Unit normal of the bisector plane, from apex A toward apex B.
    pub plane_normal: Vec3,
    pub plane_point: Vec3,
    /// Orthonormal frame of the plane, origin at `plane_point`.
    pub ex: Vec3,
    pub ey: Vec3,
    /// `[A, B, C, D, E, F]` of `A x^2 + B xy + C y^2 + D x + E y + F = 0`.
    pub coefficients: [f64; 6],
    pub arc_start: Vec3,
    pub arc_end: Vec3,
    /// Azimuth on cone A at the arc start, and signed sweep to the end.
    phi_start: f64,
    phi_sweep: f64,
    /// Cumulative arc length at uniform azimuth nodes.
    lengths: Vec<f64>,
}

const ARC_NODES: usize = 256;
const GAUSS: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

impl RidgeConic {
    /// Point of the arc at cone-A azimuth `phi`.
    fn at_phi(&self, phi: f64) -> Vec3 {
        let g = self.cone_a.generator(phi);
        self.cone_a.apex + bisector_hit(&self.cone_a.apex, &self.cone_b.apex, &g) * g
    }

    fn speed(&self, phi: f64) -> f64 {
        let a = &self.cone_a;
        let g = a.generator(phi);
        let dg = a.half_angle.sin() * a.axis.cross(&a.w(phi));
        let gd = g.dot(&self.plane_normal);
        let t = bisector_hit(&a.apex, &self.cone_b.apex, &g);
        let dt = -t * dg.dot(&self.plane_normal) / gd;
        (dt * g + t * dg).norm() * self.phi_sweep.abs()
    }

    fn segment_length(&self, u0: f64, u1: f64) -> f64 {
        let mid = 0.5 * (u0 + u1);
        let half = 0.5 * (u1 - u0);
        GAUSS
            .iter()
            .map(|&(x, w)| w * self.speed(self.phi_start + (mid + half * x) * self.phi_sweep))
            .sum::<f64>()
            * half
    }

    fn build_table(&mut self) {
        let mut lengths = Vec::with_capacity(ARC_NODES + 1);
        lengths.push(0.0);
        let mut acc = 0.0;
        for i in 0..ARC_NODES {
            let u0 = i as f64 / ARC_NODES as f64;
            let u1 = (i + 1) as f64 / ARC_NODES as f64;
            // split each node interval once more for accuracy near the ends
            acc += self.segment_length(u0, 0.5 * (u0 + u1)) + self.segment_length(0.5 * (u0 + u1), u1);
            lengths.push(acc);
        }
        self.lengths = lengths;
    }

    pub fn length(&self) -> f64 {
        *self.lengths.last().expect("table built")
    }

    /// Point at normalized arc length `s` in `[0, 1]`. Endpoints are exact.
    pub fn point_at(&self, s: f64) -> Vec3 {
        if s <= 0.0 {
            return self.arc_start;
        }
        if s >= 1.0 {
            return self.arc_end;
        }
        let target = s * self.length();
        let i = self.lengths.partition_point(|&l| l <= target).clamp(1, ARC_NODES) - 1;
        let u0 = i as f64 / ARC_NODES as f64;
        let du = 1.0 / ARC_NODES as f64;
        let rest = target - self.lengths[i];
        let mut lo = u0;
        let mut hi = u0 + du;
        let mut u = u0 + du * rest / (self.lengths[i + 1] - self.lengths[i]).max(1e-300);
        for _ in 0..60 {
            let f = self.segment_length(u0, u) - rest;
            if f.abs() < 1e-14 {
                break;
            }
            if f > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let step = f / self.speed(self.phi_start + u * self.phi_sweep);
            let next = u - step;
            u = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        self.at_phi(self.phi_start + u * self.phi_sweep)
    }

    /// `n + 1` points at uniform arc length, endpoints included.
    pub fn sample(&self, n: usize) -> Vec<Vec3> {
        (0..=n).map(|i| self.point_at(i as f64 / n as f64)).collect()
    }

    pub fn to_plane(&self, p: &Vec3) -> (f64, f64) {
        let d = p - self.plane_point;
        (d.dot(&self.ex), d.dot(&self.ey))
    }

    pub fn conic_residual(&self, x: f64, y: f64) -> f64 {
        let [a, b, c, d, e, f] = self.coefficients;
        a * x * x + b * x * y + c * y * y + d * x + e * y + f
    }
}

/// Quadric `((q - a).u)^2 - cos^2(alpha) |q - a|^2` restricted to a plane frame.
fn plane_conic(cone: &Cone, o: &Vec3, ex: &Vec3, ey: &Vec3) -> [f64; 6] {
    let c2 = cone.half_angle.cos().powi(2);
    let c = o - cone.apex;
    let (xu, yu, cu) = (ex.dot(&cone.axis), ey.dot(&cone.axis), c.dot(&cone.axis));
    [
        xu * xu - c2,
        2.0 * xu * yu,
        yu * yu - c2,
        2.0 * cu * xu - 2.0 * c2 * c.dot(ex),
        2.0 * cu * yu - 2.0 * c2 * c.dot(ey),
        cu * cu - c2 * c.norm_squared(),
    ]
}

/// Point where the central axis of a pentagon face meets the vertex cones,
/// above the face.
pub fn pentagon_triple_point(solid: &PlatonicSolid, face: usize) -> Vec3 {
    let n = solid.face_normal(face);
    let cone = cone_for_vertex(solid, solid.faces[face][0]);
    let h0 = solid.face_center(face).dot(&n);
    // signed distance is negative on the face centre and positive at infinity
    let (mut lo, mut hi) = (h0, 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cone.signed_distance(&(mid * n)) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi) * n
}

/// Ridge arc between the cones at two apices of a face.
///
/// Endpoints: on a triangle, the third vertex and the midpoint of the apex
/// edge; on a square, the two other vertices; on a pentagon, a boundary
/// point (the common neighbour, or the edge midpoint for adjacent apices)
/// and the triple point on the face axis.
pub fn ridge_conic(solid: &PlatonicSolid, cone_a: &Cone, cone_b: &Cone, face: usize) -> Result<RidgeConic> {
    let f = &solid.faces[face];
    let k = f.len();
    for v in [cone_a.vertex, cone_b.vertex] {
        if !f.contains(&v) {
            return Err(Error::VertexNotOnFace { vertex: v, face });
        }
    }
    if cone_a.vertex == cone_b.vertex {
        return Err(Error::IdenticalApices(cone_a.vertex));
    }
    let pos = |v: usize| f.iter().position(|&x| x == v).expect("on face");
    let (ia, ib) = (pos(cone_a.vertex), pos(cone_b.vertex));
    let adjacent = (ia + 1) % k == ib || (ib + 1) % k == ia;
    let (pa, pb) = (cone_a.apex, cone_b.apex);
    let mid = 0.5 * (pa + pb);
    let (start, end) = match k {
        3 => {
            let third = f[3 - ia - ib];
            (solid.vertices[third], mid)
        }
        4 => {
            let others: Vec<usize> = f
                .iter()
                .copied()
                .filter(|&v| v != cone_a.vertex && v != cone_b.vertex)
                .collect();
            (solid.vertices[others[0]], solid.vertices[others[1]])
        }
        _ => {
            let boundary = if adjacent {
                mid
            } else {
                // the vertex between them
                let between = if (ia + 2) % 5 == ib { (ia + 1) % 5 } else { (ib + 1) % 5 };
                solid.vertices[f[between]]
            };
            (boundary, pentagon_triple_point(solid, face))
        }
    };

    let plane_normal = (pb - pa).normalize();
    let mperp = mid - mid.dot(&plane_normal) * plane_normal;
    let ex = if mperp.norm() > 1e-12 {
        mperp.normalize()
    } else {
        solid.face_normal(face)
    };
    let ey = plane_normal.cross(&ex);
    let coefficients = plane_conic(cone_a, &mid, &ex, &ey);

    let phi_start = cone_a.azimuth(&(start - pa));
    let phi_end = cone_a.azimuth(&(end - pa));
    // sweep the short way; the arc never spans more than a patch
    let mut sweep = (phi_end - phi_start).rem_euclid(TAU);
    if sweep > std::f64::consts::PI {
        sweep -= TAU;
    }
    let mut ridge = RidgeConic {
        face,
        cone_a: cone_a.clone(),
        cone_b: cone_b.clone(),
        plane_normal,
        plane_point: mid,
        ex,
        ey,
        coefficients,
        arc_start: start,
        arc_end: end,
        phi_start,
        phi_sweep: sweep,
        lengths: Vec::new(),
    };
    ridge.build_table();
    Ok(ridge)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "id", rename_all = "kebab-case")]
pub enum PointClass {
    Interior,
    OnPatch(usize),
    OnRidge(usize),
    OnFacePlane,
    Exterior,
}

/// The volume common to the apex cones of a face, above that face.
#[derive(Debug, Clone)]
pub struct Module {
    pub face: usize,
    pub orientation: usize,
    pub apex_set: Vec<usize>,
    pub cones: Vec<Cone>,
    pub patches: Vec<Patch>,
    /// Ridges in apex-pair order `(0,1)`, `(0,2)`, `(1,2)`.
    pub ridges: Vec<RidgeConic>,
    pub ridge_pairs: Vec<(usize, usize)>,
    pub face_normal: Vec3,
    pub face_offset: f64,
    pub triple_point: Option<Vec3>,
}

pub fn build_patch(solid: &PlatonicSolid, face: usize, apex: usize, others: &[usize]) -> Patch {
    let f = &solid.faces[face];
    let k = f.len();
    let i = f.iter().position(|&v| v == apex).expect("apex on face");
    let prev = f[(i + k - 1) % k];
    let next = f[(i + 1) % k];
    let cone = cone_for_vertex(solid, apex);
    let az = |v: usize| cone.azimuth(&(solid.vertices[v] - cone.apex));
    let (ap, an) = (az(prev), az(next));
    let fwd = (an - ap).rem_euclid(TAU);
    let (phi0, span, start_vertex, end_vertex) = if fwd < std::f64::consts::PI {
        (ap, fwd, prev, next)
    } else {
        (an, TAU - fwd, next, prev)
    };
    Patch {
        face,
        cone,
        phi0,
        span,
        start_vertex,
        end_vertex,
        others: others.iter().map(|&b| (b, solid.vertices[b])).collect(),
    }
}

pub fn build_module(solid: &PlatonicSolid, face: usize, orientation: usize) -> Result<Module> {
    let apices = apex_set(solid, face, orientation)?;
    let cones: Vec<Cone> = apices.iter().map(|&v| cone_for_vertex(solid, v)).collect();
    let patches = apices
        .iter()
        .map(|&a| {
            let others: Vec<usize> = apices.iter().copied().filter(|&b| b != a).collect();
            build_patch(solid, face, a, &others)
        })
        .collect();
    let mut ridges = Vec::new();
    let mut ridge_pairs = Vec::new();
    for i in 0..apices.len() {
        for j in i + 1..apices.len() {
            ridges.push(ridge_conic(solid, &cones[i], &cones[j], face)?);
            ridge_pairs.push((apices[i], apices[j]));
        }
    }
    let face_normal = solid.face_normal(face);
    Ok(Module {
        face,
        orientation,
        face_offset: solid.face_center(face).dot(&face_normal),
        triple_point: (apices.len() == 3).then(|| pentagon_triple_point(solid, face)),
        apex_set: apices,
        cones,
        patches,
        ridges,
        ridge_pairs,
        face_normal,
    })
}

impl Module {
    /// Membership with precedence ridge, patch, face plane.
    pub fn classify_point(&self, p: &Vec3) -> PointClass {
        let tol = tolerance::SURFACE;
        let h = p.dot(&self.face_normal) - self.face_offset;
        if h < -tol {
            return PointClass::Exterior;
        }
        let dist: Vec<f64> = self.cones.iter().map(|c| c.signed_distance(p)).collect();
        if dist.iter().any(|&d| d > tol) {
            return PointClass::Exterior;
        }
        if let Some(c) = self.cones.iter().find(|c| (c.apex - p).norm() <= tol) {
            return PointClass::OnPatch(c.vertex);
        }
        let on: Vec<usize> = (0..self.cones.len()).filter(|&i| dist[i].abs() <= tol).collect();
        for (r, ridge) in self.ridges.iter().enumerate() {
            let (a, b) = (ridge.cone_a.vertex, ridge.cone_b.vertex);
            let has = |v: usize| on.iter().any(|&i| self.cones[i].vertex == v);
            if has(a) && has(b) && (p - ridge.plane_point).dot(&ridge.plane_normal).abs() <= tol {
                return PointClass::OnRidge(r);
            }
        }
        if let Some(&i) = on.iter().min_by(|&&i, &&j| {
            (self.cones[i].apex - p)
                .norm()
                .total_cmp(&(self.cones[j].apex - p).norm())
        }) {
            return PointClass::OnPatch(self.cones[i].vertex);
        }
        if h.abs() <= tol {
            PointClass::OnFacePlane
        } else {
            PointClass::Interior
        }
    }

    /// Sample points over every patch, `n` azimuth steps by `n` radial steps.
    pub fn surface_samples(&self, n: usize) -> Vec<Vec3> {
        let mut out = Vec::new();
        for patch in &self.patches {
            for i in 0..=n {
                let t = patch.span * i as f64 / n as f64;
                let (rmax, _) = patch.radial_bound(t);
                for j in 0..=n {
                    out.push(patch.point(t, rmax * j as f64 / n as f64));
                }
            }
        }
        out
    }

    pub fn area(&self) -> f64 {
        self.patches.iter().map(Patch::area).sum()
    }
}

pub fn classify_point(module: &Module, p: &Vec3) -> PointClass {
    module.classify_point(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::orientation_count;
    use crate::solid::{build_solid, SolidName};

    fn vertex_id(s: &PlatonicSolid, p: [f64; 3]) -> usize {
        let p = Vec3::from(p).normalize();
        s.vertices.iter().position(|v| (v - p).norm() < 1e-12).unwrap()
    }

    fn face_with(s: &PlatonicSolid, vs: &[usize]) -> usize {
        (0..s.n_faces())
            .find(|&f| vs.iter().all(|v| s.faces[f].contains(v)))
            .unwrap()
    }

    /// Independent cone test: angle between `p - apex` and `-apex`.
    fn on_cone(s: &PlatonicSolid, v: usize, p: &Vec3) -> f64 {
        let a = s.vertices[v];
        let d = p - a;
        if d.norm() < 1e-12 {
            return 0.0;
        }
        let alpha = s.dual_dihedral / 2.0;
        d.normalize().dot(&(-a.normalize())).acos() - alpha
    }

    #[test]
    fn half_angles() {
        let expected = [
            35.264_389_682_754_654,
            54.735_610_317_245_346,
            45.0,
            69.094_842_552_110_7,
            58.282_525_588_538_99,
        ];
        for (name, deg) in SolidName::ALL.into_iter().zip(expected) {
            let s = build_solid(name);
            let c = cone_for_vertex(&s, 0);
            assert!((c.half_angle.to_degrees() - deg).abs() < 1e-9, "{name}");
        }
        let t = build_solid(SolidName::Tetrahedron);
        let a = cone_for_vertex(&t, 0).half_angle;
        assert!(((1.0f64 / 3.0).acos() / 2.0 - a).abs() < 1e-12);
        assert!((a.sin() - 0.577_350_3).abs() < 1e-7);
        let i = build_solid(SolidName::Icosahedron);
        assert!(((-1.0 / 5f64.sqrt()).acos() / 2.0 - cone_for_vertex(&i, 0).half_angle).abs() < 1e-12);
    }

    #[test]
    fn octahedron_cone_axis() {
        let s = build_solid(SolidName::Octahedron);
        let v = vertex_id(&s, [1.0, 0.0, 0.0]);
        let c = cone_for_vertex(&s, v);
        assert!((c.axis - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);
        let dir = Vec3::new(0.0, 1.0, 0.0) - Vec3::new(1.0, 0.0, 0.0);
        assert!((c.opening(&dir) - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn incident_edges_are_generators() {
        for name in SolidName::ALL {
            let s = build_solid(name);
            for v in 0..s.vertices.len() {
                let c = cone_for_vertex(&s, v);
                assert!((c.e1.cross(&c.e2) - c.axis).norm() < 1e-12);
                for w in s.neighbours(v) {
                    let dir = s.vertices[w] - s.vertices[v];
                    assert!(
                        (c.opening(&dir) - c.half_angle).abs() < tolerance::ANGLE,
                        "{name} {v}-{w}"
                    );
                    assert!(c.signed_distance(&s.vertices[w]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn half_angle_matches_dual_solid_dihedral() {
        // oracle: dihedral of the dual, computed from the dual's own faces
        for name in SolidName::ALL {
            let s = build_solid(name);
            let d = build_solid(name.dual());
            let [f, g] = d.edge_faces[0];
            let dihedral = std::f64::consts::PI - d.face_normal(f).dot(&d.face_normal(g)).acos();
            assert!(
                (cone_for_vertex(&s, 0).half_angle - dihedral / 2.0).abs() < 1e-12,
                "{name}"
            );
        }
    }

    #[test]
    fn tangent_planes_agree_across_edges() {
        for name in SolidName::ALL {
            let s = build_solid(name);
            for &[v, w] in &s.edges {
                let cv = cone_for_vertex(&s, v);
                let cw = cone_for_vertex(&s, w);
                let nv = cv.tangent_normal_at(&s.vertices[w]);
                let nw = cw.tangent_normal_at(&s.vertices[v]);
                assert!((nv - nw).norm() < tolerance::TANGENT, "{name} {v}-{w}");
                let midpoint = (s.vertices[v] + s.vertices[w]).normalize();
                assert!((nv - midpoint).norm() < tolerance::TANGENT);
            }
        }
    }

    #[test]
    fn support_distance_is_sin_alpha() {
        for name in SolidName::ALL {
            let s = build_solid(name);
            let alpha = s.dual_dihedral / 2.0;
            for v in 0..s.vertices.len() {
                let c = cone_for_vertex(&s, v);
                for i in 0..36 {
                    let phi = i as f64 * TAU / 36.0;
                    let n = c.normal(phi);
                    // plane through the apex with normal n; distance from the origin
                    let dist = c.apex.dot(&n);
                    assert!((dist - alpha.sin()).abs() < 1e-12, "{name}");
                    assert!(n.dot(&c.generator(phi)).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn tetrahedron_ridge_conic() {
        let s = build_solid(SolidName::Tetrahedron);
        let v = vertex_id(&s, [1.0, 1.0, 1.0]);
        let a = vertex_id(&s, [1.0, -1.0, -1.0]);
        let b = vertex_id(&s, [-1.0, 1.0, -1.0]);
        let face = face_with(&s, &[v, a, b]);
        let r = ridge_conic(&s, &cone_for_vertex(&s, v), &cone_for_vertex(&s, a), face).unwrap();
        let k = 3f64.sqrt();
        assert!((r.arc_start * k - Vec3::new(-1.0, 1.0, -1.0)).norm() < 1e-12);
        assert!((r.arc_end * k - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-12);
        for p in r.sample(200) {
            let q = p * k;
            assert!((q.y + q.z).abs() < 1e-9);
            assert!(((q.x + 1.0).powi(2) + 4.0 * q.y * q.y - 4.0).abs() < 1e-9, "{q:?}");
            assert!(on_cone(&s, v, &p).abs() < 1e-9);
            assert!(on_cone(&s, a, &p).abs() < 1e-9);
        }
    }

    #[test]
    fn octahedron_ridge_parabola() {
        let s = build_solid(SolidName::Octahedron);
        let x = vertex_id(&s, [1.0, 0.0, 0.0]);
        let y = vertex_id(&s, [0.0, 1.0, 0.0]);
        let z = vertex_id(&s, [0.0, 0.0, 1.0]);
        let face = face_with(&s, &[x, y, z]);
        let r = ridge_conic(&s, &cone_for_vertex(&s, x), &cone_for_vertex(&s, y), face).unwrap();
        assert!((r.arc_start - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
        assert!((r.arc_end - Vec3::new(0.5, 0.5, 0.0)).norm() < 1e-15);
        for p in r.sample(100) {
            assert!((p.x - p.y).abs() < 1e-9);
            assert!((p.z * p.z - (1.0 - 2.0 * p.x)).abs() < 1e-9);
        }
    }

    #[test]
    fn plane_conic_coefficients_vanish_on_the_arc() {
        for name in SolidName::ALL {
            let s = build_solid(name);
            for o in 0..orientation_count(s.face_size()) {
                let m = build_module(&s, 0, o).unwrap();
                for r in &m.ridges {
                    let scale = r.coefficients.iter().map(|c| c.abs()).fold(0.0, f64::max);
                    for p in r.sample(50) {
                        let (x, y) = r.to_plane(&p);
                        assert!(r.conic_residual(x, y).abs() / scale < 1e-9, "{name}");
                        assert!((p - r.plane_point).dot(&r.plane_normal).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn ridge_arcs_lie_on_both_cones_and_above_face() {
        for name in SolidName::ALL {
            let s = build_solid(name);
            for face in 0..s.n_faces() {
                let m = build_module(&s, face, 0).unwrap();
                for r in &m.ridges {
                    let pts = r.sample(64);
                    for (i, p) in pts.iter().enumerate() {
                        assert!(on_cone(&s, r.cone_a.vertex, p).abs() < 1e-9);
                        assert!(on_cone(&s, r.cone_b.vertex, p).abs() < 1e-9);
                        let h = p.dot(&m.face_normal) - m.face_offset;
                        let end = i == 0 || i == pts.len() - 1;
                        let boundary_end = i == 0 || s.face_size() < 5;
                        if !end {
                            assert!(h > 1e-12, "{name} face {face} sample {i}: {h}");
                        } else if boundary_end {
                            assert!(h.abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ridge_plane_is_fixed_by_apex_swap() {
        let s = build_solid(SolidName::Dodecahedron);
        let m = build_module(&s, 3, 2).unwrap();
        for r in &m.ridges {
            let n = r.plane_normal;
            let reflect = |p: Vec3| p - 2.0 * (p - r.plane_point).dot(&n) * n;
            assert!((reflect(r.cone_a.apex) - r.cone_b.apex).norm() < 1e-12);
            for p in r.sample(10) {
                assert!((reflect(p) - p).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn triangle_arc_projects_onto_altitude() {
        for name in [SolidName::Tetrahedron, SolidName::Octahedron, SolidName::Icosahedron] {
            let s = build_solid(name);
            let m = build_module(&s, 1, 2).unwrap();
            let r = &m.ridges[0];
            let n = m.face_normal;
            let foot = r.arc_start;
            let dir = (r.arc_end - foot).normalize();
            for p in r.sample(40) {
                let q = p - (p.dot(&n) - m.face_offset) * n;
                let off = (q - foot) - (q - foot).dot(&dir) * dir;
                assert!(off.norm() < 1e-9, "{name}");
            }
        }
    }

    #[test]
    fn arc_length_is_uniform() {
        let s = build_solid(SolidName::Icosahedron);
        let m = build_module(&s, 0, 0).unwrap();
        let r = &m.ridges[0];
        let pts = r.sample(4000);
        let chords: f64 = pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
        assert!((chords - r.length()).abs() < 1e-7);
        let steps: Vec<f64> = pts.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        let mean = r.length() / 4000.0;
        assert!(steps.iter().all(|d| (d - mean).abs() < 1e-9 * 4000.0 * mean));
    }

    #[test]
    fn pentagon_triple_point_is_concurrent() {
        let s = build_solid(SolidName::Dodecahedron);
        for face in 0..s.n_faces() {
            for o in 0..5 {
                let m = build_module(&s, face, o).unwrap();
                let t = m.triple_point.unwrap();
                // independent check: bisect where the two bisector planes swap
                // order on the distinguished apex's patch
                let p = &m.patches[0];
                let (b, c) = (p.others[0].1, p.others[1].1);
                let a = p.cone.apex;
                let diff = |t: f64| {
                    let g = p.generator(t);
                    bisector_hit(&a, &b, &g) - bisector_hit(&a, &c, &g)
                };
                let (mut lo, mut hi) = (1e-9, p.span - 1e-9);
                assert!(diff(lo).signum() != diff(hi).signum());
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if diff(mid).signum() == diff(lo).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let tt = 0.5 * (lo + hi);
                let point = p.point(tt, bisector_hit(&a, &b, &p.generator(tt)));
                assert!((point - t).norm() < tolerance::TRIPLE_POINT, "face {face} o {o}");
                for r in &m.ridges {
                    assert!((r.arc_end - t).norm() < 1e-15);
                    assert!((r.point_at(1.0 - 1e-9) - t).norm() < 1e-7);
                    for cone in &m.cones {
                        assert!(on_cone(&s, cone.vertex, &t).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn patch_spans_one_face_sector() {
        for name in SolidName::ALL {
            let s = build_solid(name);
            let deg = s.vertex_faces(0).len() as f64;
            for face in 0..s.n_faces() {
                let m = build_module(&s, face, 0).unwrap();
                for p in &m.patches {
                    assert!((p.span - TAU / deg).abs() < 1e-12);
                    let mid = p.generator(0.5 * p.span);
                    assert!(mid.dot(&m.face_normal) > 0.0, "patch lies above its face");
                    let end = s.vertices[p.end_vertex] - p.cone.apex;
                    assert!((p.generator(p.span) - end.normalize()).norm() < 1e-12);
                    // the bound reaches the face vertex or the edge midpoint
                    let (r0, _) = p.radial_bound(0.0);
                    let l = s.edge_length();
                    assert!((r0 - l).abs() < 1e-12 || (r0 - l / 2.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn classification_examples() {
        let s = build_solid(SolidName::Tetrahedron);
        let v = vertex_id(&s, [1.0, 1.0, 1.0]);
        let a = vertex_id(&s, [1.0, -1.0, -1.0]);
        let face = face_with(&s, &[v, a]);
        let o = (0..3).find(|&o| {
            let mut set = apex_set(&s, face, o).unwrap();
            set.sort_unstable();
            set == [v.min(a), v.max(a)]
        });
        let m = build_module(&s, face, o.unwrap()).unwrap();
        let mid = 0.5 * (s.vertices[v] + s.vertices[a]);
        assert_eq!(m.classify_point(&mid), PointClass::OnRidge(0));
        assert_eq!(m.classify_point(&s.vertices[v]), PointClass::OnPatch(v));
        assert_eq!(m.classify_point(&s.vertices[a]), PointClass::OnPatch(a));
        assert_eq!(m.classify_point(&Vec3::zeros()), PointClass::Exterior);
        let c = s.face_center(face);
        assert_eq!(m.classify_point(&c), PointClass::OnFacePlane);
        assert_eq!(m.classify_point(&(c + 0.01 * m.face_normal)), PointClass::Interior);
        assert_eq!(m.classify_point(&(c * 3.0)), PointClass::Exterior);
    }

    #[test]
    fn surface_samples_classify_on_surface() {
        for name in SolidName::ALL {
            let s = build_solid(name);
            let m = build_module(&s, 2, 1).unwrap();
            for p in m.surface_samples(12) {
                let c = m.classify_point(&p);
                assert!(
                    matches!(c, PointClass::OnPatch(_) | PointClass::OnRidge(_)),
                    "{name} {c:?}"
                );
            }
        }
    }

    #[test]
    fn module_footprint_is_the_face() {
        // in the face plane, points inside the polygon are members and points
        // just outside are not
        for name in SolidName::ALL {
            let s = build_solid(name);
            for o in 0..orientation_count(s.face_size()) {
                let m = build_module(&s, 0, o).unwrap();
                let c = s.face_center(0);
                for &v in &s.faces[0] {
                    let p = s.vertices[v];
                    for t in [0.1, 0.5, 0.9, 0.999] {
                        let q = c + t * (p - c);
                        assert_ne!(m.classify_point(&q), PointClass::Exterior, "{name}");
                    }
                    let q = c + 1.001 * (p - c);
                    assert_eq!(m.classify_point(&q), PointClass::Exterior, "{name}");
                }
                for (i, &v) in s.faces[0].iter().enumerate() {
                    let w = s.faces[0][(i + 1) % s.face_size()];
                    let mid = 0.5 * (s.vertices[v] + s.vertices[w]);
                    let q = c + 1.001 * (mid - c);
                    assert_eq!(m.classify_point(&q), PointClass::Exterior, "{name}");
                }
            }
        }
    }

    #[test]
    fn circumscription_and_containment() {
        for name in SolidName::ALL {
            let s = build_solid(name);
            let modules: Vec<Module> = (0..s.n_faces())
                .map(|f| build_module(&s, f, f % orientation_count(s.face_size())).unwrap())
                .collect();
            let on_surface = |p: &Vec3| {
                modules
                    .iter()
                    .any(|m| matches!(m.classify_point(p), PointClass::OnPatch(_) | PointClass::OnRidge(_)))
            };
            for v in &s.vertices {
                assert!(on_surface(v), "{name}");
            }
            for &[a, b] in &s.edges {
                for i in 0..100 {
                    let t = i as f64 / 99.0;
                    let p = s.vertices[a] * (1.0 - t) + s.vertices[b] * t;
                    assert!(on_surface(&p), "{name} edge {a}-{b} t={t}");
                }
            }
            for m in &modules {
                for p in m.surface_samples(16) {
                    assert!(p.norm() <= 1.0 + 1e-9, "{name}: {}", p.norm());
                }
                for r in &m.ridges {
                    for p in r.sample(32) {
                        assert!(p.norm() <= 1.0 + 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn errors() {
        let s = build_solid(SolidName::Cube);
        let c0 = cone_for_vertex(&s, s.faces[0][0]);
        let off = (0..8).find(|v| !s.faces[0].contains(v)).unwrap();
        let c1 = cone_for_vertex(&s, off);
        assert!(matches!(
            ridge_conic(&s, &c0, &c1, 0),
            Err(Error::VertexNotOnFace { .. })
        ));
        assert!(matches!(ridge_conic(&s, &c0, &c0, 0), Err(Error::IdenticalApices(_))));
    }
}
