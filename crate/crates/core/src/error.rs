use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown solid `{name}`; expected one of: {valid}")]
    UnknownSolid { name: String, valid: String },

    #[error("vertex {vertex} is not part of face {face}")]
    VertexNotOnFace { vertex: usize, face: usize },

    #[error("ridge needs two distinct apices, got {0} twice")]
    IdenticalApices(usize),

    #[error("orientation index {index} out of range for face {face} (k = {k})")]
    OrientationOutOfRange { face: usize, index: usize, k: usize },

    #[error("configuration for {solid} needs {expected} orientations, got {got}")]
    ConfigLength { solid: String, expected: usize, got: usize },

    #[error("symmetry group belongs to {group}, configuration to {config}")]
    GroupMismatch { group: String, config: String },

    #[error("improper operations requested from a rotation-only group")]
    ProperOnlyGroup,

    #[error("unknown rule set `{name}`; expected one of: {valid}")]
    UnknownRuleSet { name: String, valid: String },

    #[error("mode does not belong to this configuration: {0}")]
    InvalidMode(String),

    #[error("resolution {0} is below the minimum of 3")]
    ResolutionTooLow(usize),

    #[error("mesh is not closed: {0}")]
    OpenMesh(String),

    #[error("trace is not closed; footprint needs a closed trace")]
    OpenTrace,

    #[error("no supporting candidate at edge event: {0}")]
    NoCandidate(String),

    #[error("unknown export format `{0}`; expected stl-binary, stl-ascii or obj")]
    UnknownFormat(String),

    #[error("malformed document: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
