//! Global tolerance table. Every length is in circumradius units, so these
//! values are absolute.

use serde::Serialize;

/// Coordinate and regularity checks on the canonical solid tables.
pub const SOLID: f64 = 1e-12;
/// Point-on-surface and membership band used by classification.
pub const SURFACE: f64 = 1e-9;
/// Angular agreement for the cone generator law.
pub const ANGLE: f64 = 1e-9;
/// Tangent-plane normal deviation across solid edges.
pub const TANGENT: f64 = 1e-8;
/// Concurrency of the three ridge arcs of a pentagon module.
pub const TRIPLE_POINT: f64 = 1e-7;
/// Chord error target for arc-length tables of ridge arcs.
pub const CHORD: f64 = 1e-10;
/// Supporting-plane test during rolling.
pub const SUPPORT: f64 = 1e-8;
/// Angular test used to match candidate patches at edge events.
pub const EVENT_ANGLE: f64 = 1e-8;
/// Pose closure after a full rolling cycle.
pub const CLOSURE: f64 = 1e-6;
/// Relative deviation allowed on the rolling height.
pub const HEIGHT: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceTable {
    pub solid: f64,
    pub surface: f64,
    pub angle: f64,
    pub tangent: f64,
    pub triple_point: f64,
    pub chord: f64,
    pub support: f64,
    pub event_angle: f64,
    pub closure: f64,
    pub height: f64,
}

pub fn table() -> ToleranceTable {
    ToleranceTable {
        solid: SOLID,
        surface: SURFACE,
        angle: ANGLE,
        tangent: TANGENT,
        triple_point: TRIPLE_POINT,
        chord: CHORD,
        support: SUPPORT,
        event_angle: EVENT_ANGLE,
        closure: CLOSURE,
        height: HEIGHT,
    }
}
