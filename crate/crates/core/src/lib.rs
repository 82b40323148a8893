pub mod calibrate;
pub mod cone;
pub mod config;
pub mod error;
pub mod mesh;
pub mod roll;
pub mod seam;
pub mod search;
pub mod solid;
pub mod symmetry;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use solid::{build_solid, PlatonicSolid, SolidName, Vec3};
pub use symmetry::{symmetry_group, SymmetryGroup, SymmetryOp};
