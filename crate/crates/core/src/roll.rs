//! Quasi-static rolling on a horizontal ground plane.
//!
//! The body rests on one patch at a time. While the contact generator sweeps
//! a patch the apex stays put on the ground and the heading of the contact
//! line turns by `sin(alpha)` per radian of cone azimuth. When the sweep
//! reaches a solid edge, the next patch is chosen from the patches whose
//! tangent plane along that edge is the ground plane and whose sweep carries
//! the contact forward across the edge. These candidates come from geometry
//! alone; the slot bookkeeping in [`crate::seam`] is checked against them.
//!
//! World frame: ground is `z = 0`, body above it. A body point `b` sits at
//! `R b + T`. The tracked centre is the solid centroid (body origin).

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{Matrix3, Rotation3, Unit, UnitQuaternion};
use serde::Serialize;

use crate::cone::{build_module, Patch};
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::seam::{same_cycle, Branch};
use crate::solid::{PlatonicSolid, Vec3};
use crate::tolerance;

/// Patch being swept, and whether it was entered at local azimuth 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RollState {
    pub patch: usize,
    pub forward: bool,
}

impl RollState {
    pub fn index(self) -> usize {
        2 * self.patch + usize::from(!self.forward)
    }

    pub fn from_index(i: usize) -> Self {
        RollState {
            patch: i / 2,
            forward: i.is_multiple_of(2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub next: RollState,
    pub branch: Branch,
    pub pivot: usize,
}

/// What happens when the sweep of a state ends.
#[derive(Debug, Clone, Serialize)]
pub struct EdgeEvent {
    pub edge: usize,
    /// Apex of the outgoing patch and the far end of the contact edge.
    pub pivot: usize,
    pub far_vertex: usize,
    pub candidates: Vec<Candidate>,
}

/// Patches of a configured body and the edge events of every rolling state.
#[derive(Debug, Clone)]
pub struct RollGeometry {
    pub solid: PlatonicSolid,
    pub config: Configuration,
    pub patches: Vec<Patch>,
    pub alpha: f64,
    pub events: Vec<EdgeEvent>,
    /// Body points used to test that the ground supports the body.
    pub support_points: Vec<Vec3>,
}

impl RollGeometry {
    pub fn new(solid: &PlatonicSolid, config: &Configuration) -> Result<Self> {
        let mut patches = Vec::new();
        let mut support_points = solid.vertices.clone();
        for (face, &o) in config.orientations.iter().enumerate() {
            let m = build_module(solid, face, o as usize)?;
            support_points.extend(m.surface_samples(8));
            for r in &m.ridges {
                support_points.extend(r.sample(16));
            }
            patches.extend(m.patches);
        }
        let alpha = solid.dual_dihedral / 2.0;
        let mut geo = RollGeometry {
            solid: solid.clone(),
            config: config.clone(),
            patches,
            alpha,
            events: Vec::new(),
            support_points,
        };
        geo.events = (0..2 * geo.patches.len())
            .map(|i| geo.analyse(RollState::from_index(i)))
            .collect::<Result<_>>()?;
        Ok(geo)
    }

    fn exit_t(&self, s: RollState) -> f64 {
        if s.forward {
            self.patches[s.patch].span
        } else {
            0.0
        }
    }

    fn entry_t(&self, s: RollState) -> f64 {
        if s.forward {
            0.0
        } else {
            self.patches[s.patch].span
        }
    }

    /// Rate of change of the contact normal, per unit of sweep, at local
    /// azimuth `t` when moving in direction `forward`.
    fn normal_velocity(&self, p: &Patch, t: f64, forward: bool) -> Vec3 {
        let w = p.cone.w(p.phi0 + t);
        let v = self.alpha.cos() * p.cone.axis.cross(&w);
        if forward {
            v
        } else {
            -v
        }
    }

    fn analyse(&self, s: RollState) -> Result<EdgeEvent> {
        let p = &self.patches[s.patch];
        let t = self.exit_t(s);
        let a = p.apex();
        let g = p.generator(t);
        let n = p.normal(t);
        let pa = self.solid.vertices[a];
        let far_vertex = self
            .solid
            .neighbours(a)
            .into_iter()
            .find(|&v| ((self.solid.vertices[v] - pa).normalize() - g).norm() < 1e-9)
            .ok_or_else(|| Error::NoCandidate(format!("patch {} exit generator is not a solid edge", s.patch)))?;
        let edge = self.solid.edge_index(a, far_vertex).expect("neighbours share an edge");
        let v_in = self.normal_velocity(p, t, s.forward);

        let mut candidates = Vec::new();
        for (qi, q) in self.patches.iter().enumerate() {
            if qi == s.patch {
                continue;
            }
            let b = q.apex();
            let pb = self.solid.vertices[b];
            if (pb - pa).cross(&g).norm() > 1e-9 {
                continue;
            }
            for (tq, forward) in [(0.0, true), (q.span, false)] {
                let gq = q.generator(tq);
                if gq.cross(&g).norm() > 1e-9 {
                    continue;
                }
                if (q.normal(tq) - n).norm() > tolerance::EVENT_ANGLE {
                    continue;
                }
                let v_out = self.normal_velocity(q, tq, forward);
                if v_out.dot(&v_in) <= tolerance::EVENT_ANGLE {
                    continue;
                }
                candidates.push(Candidate {
                    next: RollState { patch: qi, forward },
                    branch: if b == a { Branch::Smooth } else { Branch::Switch },
                    pivot: b,
                });
            }
        }
        candidates.sort_by_key(|c| (c.branch, c.next));
        Ok(EdgeEvent {
            edge,
            pivot: a,
            far_vertex,
            candidates,
        })
    }

    /// Edges where some arrival offers more than one candidate.
    pub fn branching_edges(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .events
            .iter()
            .filter(|e| e.candidates.len() > 1)
            .map(|e| e.edge)
            .collect();
        set.into_iter().collect()
    }

    /// Choose the successor of a state under a policy.
    pub fn step(&self, s: RollState, policy: &BranchPolicy) -> Result<(RollState, Branch, usize)> {
        let ev = &self.events[s.index()];
        if ev.candidates.is_empty() {
            return Err(Error::NoCandidate(format!(
                "{} patch {} ({}) at edge {}",
                self.config.label(),
                s.patch,
                if s.forward { "forward" } else { "backward" },
                ev.edge
            )));
        }
        let want = match policy {
            BranchPolicy::First => Branch::Smooth,
            BranchPolicy::Script(script) => script.get(&ev.edge).copied().unwrap_or(Branch::Smooth),
        };
        let c = ev
            .candidates
            .iter()
            .find(|c| c.branch == want)
            .unwrap_or(&ev.candidates[0]);
        Ok((c.next, c.branch, ev.candidates.len()))
    }

    /// Patch area from the closed-form integral.
    pub fn patch_area(&self, patch: usize) -> f64 {
        self.patches[patch].area()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BranchPolicy {
    /// Continue on the same cone whenever that is a candidate.
    First,
    /// Choice per edge; unscripted edges behave as `First`.
    Script(BTreeMap<usize, Branch>),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RollOptions {
    pub max_events: usize,
    /// Stop after returning to the start state this many times.
    pub cycles: usize,
    /// Pose samples per sweep for height and support checks.
    pub samples_per_sweep: usize,
    /// Boundary samples per footprint sector.
    pub footprint_samples: usize,
}

impl Default for RollOptions {
    fn default() -> Self {
        RollOptions {
            max_events: 10_000,
            cycles: 1,
            samples_per_sweep: 8,
            footprint_samples: 128,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RollEvent {
    pub index: usize,
    pub from: RollState,
    pub to: RollState,
    pub edge: usize,
    pub branch: Branch,
    pub candidates: usize,
    pub heading: f64,
    pub pivot_ground: [f64; 2],
}

/// Ground region swept by the contact during one patch sweep: the apex
/// point and the far boundary, in sweep order.
#[derive(Debug, Clone, Serialize)]
pub struct FootprintSector {
    pub patch: usize,
    pub apex: [f64; 2],
    pub boundary: Vec<[f64; 2]>,
}

impl FootprintSector {
    pub fn area(&self) -> f64 {
        let mut pts = vec![self.apex];
        pts.extend(self.boundary.iter().copied());
        let mut acc = 0.0;
        for i in 0..pts.len() {
            let (p, q) = (pts[i], pts[(i + 1) % pts.len()]);
            acc += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * acc.abs()
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Footprint {
    pub sectors: Vec<FootprintSector>,
}

impl Footprint {
    pub fn area(&self) -> f64 {
        self.sectors.iter().map(FootprintSector::area).sum()
    }

    pub fn to_svg(&self) -> String {
        let pts = self
            .sectors
            .iter()
            .flat_map(|s| std::iter::once(s.apex).chain(s.boundary.iter().copied()));
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in pts {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if self.sectors.is_empty() {
            lo = [0.0; 2];
            hi = [1.0; 2];
        }
        let pad = 0.05 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        let mut s = String::new();
        writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">",
            lo[0] - pad,
            -(hi[1] + pad),
            hi[0] - lo[0] + 2.0 * pad,
            hi[1] - lo[1] + 2.0 * pad
        )
        .unwrap();
        for sec in &self.sectors {
            let mut d = String::new();
            for p in std::iter::once(&sec.apex).chain(&sec.boundary) {
                write!(d, "{:.6},{:.6} ", p[0], -p[1]).unwrap();
            }
            let hue = (sec.patch * 47) % 360;
            writeln!(
                s,
                "  <polygon data-patch=\"{}\" points=\"{}\" fill=\"hsl({hue},60%,75%)\" stroke=\"black\" stroke-width=\"{:.6}\"/>",
                sec.patch,
                d.trim_end(),
                pad * 0.02
            )
            .unwrap();
        }
        s.push_str("</svg>\n");
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RollTrace {
    pub config: String,
    pub policy: BranchPolicy,
    pub start: RollState,
    pub events: Vec<RollEvent>,
    /// Patch of every sweep, in order.
    pub visits: Vec<usize>,
    pub height_samples: Vec<f64>,
    pub expected_height: f64,
    pub max_height_deviation: f64,
    /// Lowest body point over all samples; negative means penetration.
    pub min_clearance: f64,
    /// Largest deviation of the accumulated pose from the closed form.
    pub max_pose_error: f64,
    pub closed: bool,
    pub cycles_completed: usize,
    /// Events per cycle, when closed.
    pub period: Option<usize>,
    pub exhausted: bool,
    /// Centroid ground path length over the trace.
    pub centroid_path_length: f64,
    /// Net heading change and ground displacement of the centroid per cycle.
    pub cycle_heading_change: Option<f64>,
    pub cycle_displacement: Option<[f64; 2]>,
    /// Attitude and contact-point mismatch on return to the start state.
    pub closure_error: Option<f64>,
    #[serde(skip)]
    pub footprint: Footprint,
}

struct Pose {
    rot: UnitQuaternion<f64>,
    trans: Vec3,
}

impl Pose {
    fn apply(&self, b: &Vec3) -> Vec3 {
        self.rot * b + self.trans
    }
}

/// Rotation taking body `(g, n)` to world `(h, -z)`.
fn contact_rotation(g: &Vec3, n: &Vec3, heading: f64) -> UnitQuaternion<f64> {
    let h = Vec3::new(heading.cos(), heading.sin(), 0.0);
    let down = -Vec3::z();
    let body = Matrix3::from_columns(&[*g, *n, g.cross(n)]);
    let world = Matrix3::from_columns(&[h, down, h.cross(&down)]);
    UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(world * body.transpose()))
}

pub fn simulate_roll(geo: &RollGeometry, policy: &BranchPolicy, opts: &RollOptions) -> Result<RollTrace> {
    simulate_from(
        geo,
        RollState {
            patch: 0,
            forward: true,
        },
        policy,
        opts,
    )
}

pub fn simulate_from(
    geo: &RollGeometry,
    start: RollState,
    policy: &BranchPolicy,
    opts: &RollOptions,
) -> Result<RollTrace> {
    let sin_a = geo.alpha.sin();
    let z = Unit::new_unchecked(Vec3::z());
    let p0 = &geo.patches[start.patch];
    let t0 = geo.entry_t(start);
    let rot = contact_rotation(&p0.generator(t0), &p0.normal(t0), 0.0);
    let apex0 = geo.solid.vertices[p0.apex()];
    let mut pose = Pose {
        trans: -(rot * apex0),
        rot,
    };
    let mut heading = 0.0f64;

    let mut trace = RollTrace {
        config: geo.config.label(),
        policy: policy.clone(),
        start,
        events: Vec::new(),
        visits: Vec::new(),
        height_samples: Vec::new(),
        expected_height: sin_a,
        max_height_deviation: 0.0,
        min_clearance: f64::INFINITY,
        max_pose_error: 0.0,
        closed: false,
        cycles_completed: 0,
        period: None,
        exhausted: false,
        centroid_path_length: 0.0,
        cycle_heading_change: None,
        cycle_displacement: None,
        closure_error: None,
        footprint: Footprint::default(),
    };
    let start_attitude = pose.rot.inverse() * Vec3::z();
    let start_centroid = pose.trans;
    let mut last_centroid = pose.trans;
    let mut state = start;
    let mut seen = BTreeSet::from([start]);

    for index in 0..opts.max_events {
        let p = &geo.patches[state.patch];
        let a = geo.solid.vertices[p.apex()];
        let axis = Unit::new_unchecked(p.cone.axis);
        let t_in = geo.entry_t(state);
        let sweep = if state.forward { p.span } else { -p.span };
        let pivot = pose.apply(&a);
        let entry = Pose {
            rot: pose.rot,
            trans: pose.trans,
        };
        let at = |delta: f64| -> Pose {
            let rz = UnitQuaternion::from_axis_angle(&z, sin_a * delta);
            let rot = rz * entry.rot * UnitQuaternion::from_axis_angle(&axis, -delta);
            Pose {
                rot,
                trans: pivot + rz * (entry.trans - pivot),
            }
        };

        trace.visits.push(state.patch);
        for k in 1..=opts.samples_per_sweep {
            let delta = sweep * k as f64 / opts.samples_per_sweep as f64;
            let ps = at(delta);
            let h = ps.trans.z;
            trace.height_samples.push(h);
            trace.max_height_deviation = trace.max_height_deviation.max((h - sin_a).abs() / sin_a);
            let low = geo
                .support_points
                .iter()
                .map(|b| ps.apply(b).z)
                .fold(f64::INFINITY, f64::min);
            trace.min_clearance = trace.min_clearance.min(low);
            trace.centroid_path_length += (ps.trans - last_centroid).xy().norm();
            last_centroid = ps.trans;
        }

        let mut boundary = Vec::with_capacity(opts.footprint_samples + 1);
        for k in 0..=opts.footprint_samples {
            let delta = sweep * k as f64 / opts.footprint_samples as f64;
            let t = t_in + delta;
            let (r, _) = p.radial_bound(t);
            let psi = heading + sin_a * delta;
            boundary.push([pivot.x + r * psi.cos(), pivot.y + r * psi.sin()]);
        }
        trace.footprint.sectors.push(FootprintSector {
            patch: state.patch,
            apex: [pivot.x, pivot.y],
            boundary,
        });

        pose = at(sweep);
        pose.rot.renormalize();
        heading += sin_a * sweep;
        let t_out = geo.exit_t(state);
        let closed_form = contact_rotation(&p.generator(t_out), &p.normal(t_out), heading);
        trace.max_pose_error = trace.max_pose_error.max(pose.rot.angle_to(&closed_form));

        let (next, branch, n_cand) = geo.step(state, policy)?;
        let ev = &geo.events[state.index()];
        let next_apex = geo.patches[next.patch].apex();
        let new_pivot = pose.apply(&geo.solid.vertices[next_apex]);
        if branch == Branch::Switch {
            heading += PI;
        }
        trace.events.push(RollEvent {
            index,
            from: state,
            to: next,
            edge: ev.edge,
            branch,
            candidates: n_cand,
            heading,
            pivot_ground: [new_pivot.x, new_pivot.y],
        });
        state = next;

        if state == start {
            trace.cycles_completed += 1;
            if trace.cycles_completed == 1 {
                trace.closed = true;
                trace.period = Some(trace.events.len());
                trace.cycle_heading_change = Some(heading);
                let d = pose.trans - start_centroid;
                trace.cycle_displacement = Some([d.x, d.y]);
                let attitude = pose.rot.inverse() * Vec3::z();
                let contact = pose.rot.inverse() * (new_pivot - pose.trans);
                trace.closure_error = Some((attitude - start_attitude).norm().max((contact - apex0).norm()));
            }
            if trace.cycles_completed >= opts.cycles {
                return Ok(trace);
            }
        } else if trace.cycles_completed == 0 && !seen.insert(state) {
            // entered a cycle that avoids the start state
            return Ok(trace);
        }
    }
    trace.exhausted = true;
    Ok(trace)
}

/// Sectors of the first closed cycle of a trace.
pub fn develop_footprint(trace: &RollTrace) -> Result<Footprint> {
    if trace.events.is_empty() && trace.footprint.sectors.is_empty() {
        return Ok(Footprint::default());
    }
    let period = trace.period.ok_or(Error::OpenTrace)?;
    Ok(Footprint {
        sectors: trace.footprint.sectors[..period].to_vec(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeSummary {
    pub index: usize,
    /// Choice at every branching edge.
    pub script: Vec<(usize, Branch)>,
    /// Patches of the cycle through the start state, or of the cycle the
    /// trace falls into.
    pub cycle: Vec<usize>,
    pub closed: bool,
    pub coverage: f64,
    pub full: bool,
    /// Every patch on the cycle visited once.
    pub injective: bool,
    pub footprint_area: f64,
    pub visited_patch_area: f64,
    pub centroid_path_length: f64,
    /// Cycles of the successor map, each listed once up to reversal.
    pub decomposition: Vec<Vec<usize>>,
}

/// Cycles of the successor map over all states, as patch sequences; a cycle
/// and its reverse are reported once.
pub fn state_cycles(geo: &RollGeometry, policy: &BranchPolicy) -> Result<Vec<Vec<usize>>> {
    let n = 2 * geo.patches.len();
    let succ: Vec<usize> = (0..n)
        .map(|i| geo.step(RollState::from_index(i), policy).map(|(s, _, _)| s.index()))
        .collect::<Result<_>>()?;
    let mut color = vec![0u8; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if color[s] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut x = s;
        while color[x] == 0 {
            color[x] = 1;
            path.push(x);
            x = succ[x];
        }
        if color[x] == 1 {
            let from = path.iter().position(|&y| y == x).expect("on path");
            let cyc: Vec<usize> = path[from..].iter().map(|&y| y / 2).collect();
            if !cycles.iter().any(|c| same_cycle(c, &cyc)) {
                cycles.push(cyc);
            }
        }
        for y in path {
            color[y] = 2;
        }
    }
    for c in &mut cycles {
        // rotate to start at the smallest patch
        let k = c
            .iter()
            .enumerate()
            .min_by_key(|&(_, p)| *p)
            .map(|(i, _)| i)
            .unwrap_or(0);
        c.rotate_left(k);
    }
    cycles.sort();
    Ok(cycles)
}

/// One script per assignment of Smooth or Switch to the branching edges,
/// all-Smooth first.
pub fn script_policies(geo: &RollGeometry) -> Vec<Vec<(usize, Branch)>> {
    let edges = geo.branching_edges();
    (0..1usize << edges.len())
        .map(|code| {
            edges
                .iter()
                .enumerate()
                .map(|(i, &e)| {
                    let bit = (code >> (edges.len() - 1 - i)) & 1;
                    (e, if bit == 0 { Branch::Smooth } else { Branch::Switch })
                })
                .collect()
        })
        .collect()
}

/// Every branch script over the branching edges, traced from patch 0.
pub fn list_modes(geo: &RollGeometry) -> Result<Vec<ModeSummary>> {
    let total = geo.patches.len();
    let opts = RollOptions {
        max_events: 4 * total + 4,
        samples_per_sweep: 2,
        ..RollOptions::default()
    };
    script_policies(geo)
        .into_iter()
        .enumerate()
        .map(|(index, script)| {
            let policy = BranchPolicy::Script(script.iter().copied().collect());
            let trace = simulate_roll(geo, &policy, &opts)?;
            let cycle: Vec<usize> = match trace.period {
                Some(p) => trace.visits[..p].to_vec(),
                None => {
                    // the walk fell into a cycle avoiding the start state
                    let last = trace.events.last().map(|e| e.to).expect("events");
                    let from = trace.events.iter().position(|e| e.from == last).unwrap_or(0);
                    trace.visits[from..].to_vec()
                }
            };
            let distinct: BTreeSet<usize> = cycle.iter().copied().collect();
            let footprint_area = match trace.period {
                Some(p) => trace.footprint.sectors[..p].iter().map(FootprintSector::area).sum(),
                None => 0.0,
            };
            let visited_patch_area = distinct.iter().map(|&p| geo.patch_area(p)).sum();
            Ok(ModeSummary {
                index,
                script,
                closed: trace.closed,
                coverage: distinct.len() as f64 / total as f64,
                full: trace.closed && distinct.len() == total && cycle.len() == total,
                injective: distinct.len() == cycle.len(),
                cycle,
                footprint_area,
                visited_patch_area,
                centroid_path_length: trace.centroid_path_length,
                decomposition: state_cycles(geo, &policy)?,
            })
        })
        .collect()
}

/// Ground-truth developability: some script has a successor cycle that
/// visits every patch exactly once.
pub fn oracle_developable(geo: &RollGeometry) -> Result<bool> {
    let total = geo.patches.len();
    for script in script_policies(geo) {
        let policy = BranchPolicy::Script(script.into_iter().collect());
        for c in state_cycles(geo, &policy)? {
            let distinct: BTreeSet<usize> = c.iter().copied().collect();
            if c.len() == total && distinct.len() == total {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::enumerate_configs;
    use crate::seam::{edge_slots, patches as seam_patches};
    use crate::solid::{build_solid, SolidName};

    fn matched_tetra() -> (PlatonicSolid, Configuration) {
        let s = build_solid(SolidName::Tetrahedron);
        let c = Configuration::new(&s, vec![0, 2, 1, 1]).unwrap();
        (s, c)
    }

    #[test]
    fn geometric_patches_follow_seam_order() {
        let (s, c) = matched_tetra();
        let geo = RollGeometry::new(&s, &c).unwrap();
        let sp = seam_patches(&s, &c);
        assert_eq!(geo.patches.len(), sp.len());
        for (g, p) in geo.patches.iter().zip(&sp) {
            assert_eq!((g.face, g.apex()), (p.face, p.apex));
        }
    }

    #[test]
    fn candidate_count_equals_far_side_slots() {
        for name in [SolidName::Tetrahedron, SolidName::Cube] {
            let s = build_solid(name);
            for c in enumerate_configs(&s) {
                let geo = RollGeometry::new(&s, &c).unwrap();
                let slots = edge_slots(&s, &c);
                for (i, ev) in geo.events.iter().enumerate() {
                    let face = geo.patches[i / 2].face;
                    let far = slots[ev.edge].slots.iter().filter(|sl| sl.face != face).count();
                    assert_eq!(ev.candidates.len(), far, "{} state {i}", c.label());
                    if slots[ev.edge].slots.len() == 4 {
                        assert_eq!(ev.candidates.len(), 2);
                    }
                    if slots[ev.edge].slots.len() == 2 {
                        assert_eq!(ev.candidates.len(), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn height_is_constant_and_ground_supports() {
        for name in SolidName::ALL {
            let s = build_solid(name);
            let c = enumerate_configs(&s).next().unwrap();
            let geo = RollGeometry::new(&s, &c).unwrap();
            let trace = simulate_roll(
                &geo,
                &BranchPolicy::First,
                &RollOptions {
                    max_events: 200,
                    ..RollOptions::default()
                },
            )
            .unwrap();
            assert!(trace.max_height_deviation < tolerance::HEIGHT, "{name}");
            assert!(
                trace.min_clearance > -tolerance::SUPPORT,
                "{name}: {}",
                trace.min_clearance
            );
            assert!(trace.max_pose_error < 1e-9, "{name}: {}", trace.max_pose_error);
        }
    }

    #[test]
    fn matched_tetrahedron_modes() {
        let (s, c) = matched_tetra();
        let geo = RollGeometry::new(&s, &c).unwrap();
        let modes = list_modes(&geo).unwrap();
        assert_eq!(modes.len(), 4);
        assert!(modes.iter().any(|m| m.full));
        assert!(modes.iter().any(|m| !m.full));
        for m in &modes {
            assert!(m.closed);
            assert!(m.injective);
            assert!((m.footprint_area - m.visited_patch_area).abs() < 5e-3 * m.visited_patch_area);
        }
    }

    #[test]
    fn cubicon_rolls_without_branches() {
        let s = build_solid(SolidName::Cube);
        let c = Configuration::new(&s, vec![0, 0, 1, 1, 0, 0]).unwrap();
        let geo = RollGeometry::new(&s, &c).unwrap();
        assert!(geo.branching_edges().is_empty());
        let modes = list_modes(&geo).unwrap();
        assert_eq!(modes.len(), 1);
        assert!(modes[0].full);
        assert_eq!(modes[0].cycle.len(), 12);
        let trace = simulate_roll(&geo, &BranchPolicy::First, &RollOptions::default()).unwrap();
        assert!(trace.events.iter().all(|e| e.candidates == 1));
        assert!(trace.closure_error.unwrap() < tolerance::CLOSURE);
    }

    #[test]
    fn footprint_needs_closed_trace() {
        let (s, c) = matched_tetra();
        let geo = RollGeometry::new(&s, &c).unwrap();
        let open = simulate_roll(
            &geo,
            &BranchPolicy::First,
            &RollOptions {
                max_events: 3,
                ..RollOptions::default()
            },
        )
        .unwrap();
        assert!(open.exhausted);
        assert!(matches!(develop_footprint(&open), Err(Error::OpenTrace)));
        let closed = simulate_roll(&geo, &BranchPolicy::First, &RollOptions::default()).unwrap();
        let fp = develop_footprint(&closed).unwrap();
        let area: f64 = closed.visits[..closed.period.unwrap()]
            .iter()
            .map(|&p| geo.patch_area(p))
            .sum();
        assert!((fp.area() - area).abs() < 5e-3 * area);
        assert!(fp.to_svg().starts_with("<svg"));
    }

    #[test]
    fn empty_trace_has_empty_footprint() {
        let (s, c) = matched_tetra();
        let geo = RollGeometry::new(&s, &c).unwrap();
        let t = simulate_roll(
            &geo,
            &BranchPolicy::First,
            &RollOptions {
                max_events: 0,
                ..RollOptions::default()
            },
        )
        .unwrap();
        assert!(develop_footprint(&t).unwrap().sectors.is_empty());
    }
}
