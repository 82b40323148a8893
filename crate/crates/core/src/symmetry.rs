//! Symmetry groups as exact vertex permutations.

use nalgebra::Matrix3;
use serde::Serialize;

use crate::solid::{PlatonicSolid, SolidName, Vec3};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SymmetryOp {
    pub vertex_perm: Vec<usize>,
    pub face_perm: Vec<usize>,
    pub edge_perm: Vec<usize>,
    /// Rotation (`true`) or reflection / rotoreflection.
    pub proper: bool,
}

impl SymmetryOp {
    pub fn is_identity(&self) -> bool {
        self.vertex_perm.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SymmetryOp) -> SymmetryOp {
        let pick = |a: &[usize], b: &[usize]| b.iter().map(|&i| a[i]).collect::<Vec<_>>();
        SymmetryOp {
            vertex_perm: pick(&self.vertex_perm, &other.vertex_perm),
            face_perm: pick(&self.face_perm, &other.face_perm),
            edge_perm: pick(&self.edge_perm, &other.edge_perm),
            proper: self.proper == other.proper,
        }
    }

    pub fn inverse(&self) -> SymmetryOp {
        let inv = |p: &[usize]| {
            let mut out = vec![0; p.len()];
            for (i, &j) in p.iter().enumerate() {
                out[j] = i;
            }
            out
        };
        SymmetryOp {
            vertex_perm: inv(&self.vertex_perm),
            face_perm: inv(&self.face_perm),
            edge_perm: inv(&self.edge_perm),
            proper: self.proper,
        }
    }

    /// Orthogonal matrix realising the permutation on the solid's coordinates.
    pub fn matrix(&self, solid: &PlatonicSolid) -> Matrix3<f64> {
        let base = &solid.faces[0][..3];
        let cols = |ids: &[usize]| {
            Matrix3::from_columns(&[solid.vertices[ids[0]], solid.vertices[ids[1]], solid.vertices[ids[2]]])
        };
        let target: Vec<usize> = base.iter().map(|&v| self.vertex_perm[v]).collect();
        cols(&target) * cols(base).try_inverse().expect("face vertices are independent")
    }
}

#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    pub solid: SolidName,
    pub proper_only: bool,
    pub ops: Vec<SymmetryOp>,
}

impl SymmetryGroup {
    pub fn order(&self) -> usize {
        self.ops.len()
    }

    pub fn proper(&self) -> impl Iterator<Item = &SymmetryOp> {
        self.ops.iter().filter(|op| op.proper)
    }

    pub fn improper(&self) -> impl Iterator<Item = &SymmetryOp> {
        self.ops.iter().filter(|op| !op.proper)
    }
}

/// All isometries of the solid, found by mapping one reference flag of face 0
/// onto every flag of the solid.
pub fn symmetry_group(solid: &PlatonicSolid, proper_only: bool) -> SymmetryGroup {
    let base = &solid.faces[0][..3];
    let basis = Matrix3::from_columns(&[
        solid.vertices[base[0]],
        solid.vertices[base[1]],
        solid.vertices[base[2]],
    ]);
    let basis_inv = basis.try_inverse().expect("face vertices are independent");

    let mut ops = Vec::new();
    for face in &solid.faces {
        let k = face.len();
        for i in 0..k {
            for step in [1, k - 1] {
                let t = [face[i], face[(i + step) % k], face[(i + 2 * step) % k]];
                let target = Matrix3::from_columns(&[solid.vertices[t[0]], solid.vertices[t[1]], solid.vertices[t[2]]]);
                let m = target * basis_inv;
                if !((m * m.transpose()) - Matrix3::identity())
                    .iter()
                    .all(|x| x.abs() < 1e-9)
                {
                    continue;
                }
                if let Some(op) = op_from_matrix(solid, &m) {
                    ops.push(op);
                }
            }
        }
    }
    ops.sort_by(|a, b| {
        b.is_identity()
            .cmp(&a.is_identity())
            .then_with(|| a.vertex_perm.cmp(&b.vertex_perm))
    });
    ops.dedup();
    if proper_only {
        ops.retain(|op| op.proper);
    }
    SymmetryGroup {
        solid: solid.name,
        proper_only,
        ops,
    }
}

fn op_from_matrix(solid: &PlatonicSolid, m: &Matrix3<f64>) -> Option<SymmetryOp> {
    let vertex_perm = solid
        .vertices
        .iter()
        .map(|v| find_vertex(&solid.vertices, &(m * v)))
        .collect::<Option<Vec<_>>>()?;
    let face_perm = solid
        .faces
        .iter()
        .map(|f| {
            let mut image: Vec<usize> = f.iter().map(|&v| vertex_perm[v]).collect();
            image.sort_unstable();
            solid.faces.iter().position(|g| {
                let mut s = g.clone();
                s.sort_unstable();
                s == image
            })
        })
        .collect::<Option<Vec<_>>>()?;
    let edge_perm = solid
        .edges
        .iter()
        .map(|&[a, b]| solid.edge_index(vertex_perm[a], vertex_perm[b]))
        .collect::<Option<Vec<_>>>()?;
    Some(SymmetryOp {
        vertex_perm,
        face_perm,
        edge_perm,
        proper: m.determinant() > 0.0,
    })
}

fn find_vertex(vertices: &[Vec3], p: &Vec3) -> Option<usize> {
    vertices.iter().position(|v| (v - p).norm() < 1e-9)
}
