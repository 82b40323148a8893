//! Invariant suites shared by the command line and the test harness.
//! Every check counts the items it tested and the items that passed.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::calibrate::oracle_agreement;
use crate::cone::{build_module, Cone, Module, PointClass};
use crate::config::{enumerate_configs, orientation_count, raw_config_count, Configuration, GroupAction};
use crate::error::{Error, Result};
use crate::roll::{list_modes, simulate_roll, BranchPolicy, RollGeometry, RollOptions};
use crate::seam::{cycle_decomposition, edge_slots, pairing_modes, patches, RuleSet};
use crate::search::{default_budget, enumerate_classes, ClassReport};
use crate::solid::{build_solid, PlatonicSolid, SolidName, Vec3};
use crate::symmetry::symmetry_group;
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Geometry,
    Combinatorics,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Geometry, Suite::Combinatorics, Suite::Oracle];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Combinatorics => "combinatorics",
            Suite::Oracle => "oracle",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.as_str() == s).ok_or_else(|| {
            Error::Parse(format!(
                "unknown suite `{s}`; expected geometry, combinatorics or oracle"
            ))
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub solid: SolidName,
    pub passed: usize,
    pub total: usize,
    /// Largest error seen, in the units of the check's tolerance.
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &'static str, solid: SolidName, tolerance: f64) -> Check {
        Check {
            name,
            solid,
            passed: 0,
            total: 0,
            worst: 0.0,
            tolerance,
        }
    }

    fn error(&mut self, err: f64) {
        self.total += 1;
        if err <= self.tolerance {
            self.passed += 1;
        }
        if err.is_nan() {
            self.worst = f64::NAN;
        } else {
            self.worst = self.worst.max(err);
        }
    }

    fn truth(&mut self, ok: bool) {
        self.error(if ok { 0.0 } else { f64::INFINITY });
    }

    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub rule_set: RuleSet,
    pub checks: Vec<Check>,
    /// Set when a search ran out of budget.
    pub incomplete: Vec<SolidName>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(Check::ok)
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "{:<14} {:<24} {:>9} {:>9} {:>11} {:>9}  result",
            "solid", "check", "passed", "total", "worst", "tol"
        )
        .unwrap();
        for c in &self.checks {
            writeln!(
                s,
                "{:<14} {:<24} {:>9} {:>9} {:>11.3e} {:>9.1e}  {}",
                c.solid.as_str(),
                c.name,
                c.passed,
                c.total,
                c.worst,
                c.tolerance,
                if c.ok() { "ok" } else { "FAIL" }
            )
            .unwrap();
        }
        s
    }
}

fn modules_for_all_orientations(solid: &PlatonicSolid) -> Result<Vec<Module>> {
    let k = orientation_count(solid.face_size());
    (0..solid.n_faces())
        .flat_map(|f| (0..k).map(move |o| (f, o)))
        .map(|(f, o)| build_module(solid, f, o))
        .collect()
}

fn angle(a: &Vec3, b: &Vec3) -> f64 {
    a.normalize().dot(&b.normalize()).clamp(-1.0, 1.0).acos()
}

/// Tangent plane of whichever patch of `m` holds a point on a solid edge.
fn sheet_normal(m: &Module, p: &Vec3) -> Option<Vec3> {
    match m.classify_point(p) {
        PointClass::OnPatch(v) => Some(cone_for_vertex_of(m, v).tangent_normal_at(p)),
        _ => None,
    }
}

fn cone_for_vertex_of(m: &Module, v: usize) -> &Cone {
    m.cones.iter().find(|c| c.vertex == v).expect("apex of module")
}

pub fn geometry_checks(solid: &PlatonicSolid) -> Result<Vec<Check>> {
    let name = solid.name;
    let mut tables = Check::new("solid-tables", name, tolerance::SOLID);
    for v in &solid.vertices {
        tables.error((v.norm() - 1.0).abs());
    }
    let l = solid.edge_length();
    for (fi, f) in solid.faces.iter().enumerate() {
        let n = f.len();
        let (normal, centre) = (solid.face_normal(fi), solid.face_center(fi));
        for i in 0..n {
            tables.error((solid.vertices[f[i]] - centre).dot(&normal).abs());
            let (a, b, c) = (
                solid.vertices[f[i]],
                solid.vertices[f[(i + 1) % n]],
                solid.vertices[f[(i + 2) % n]],
            );
            tables.error(((b - a).norm() - l).abs());
            let interior = angle(&(a - b), &(c - b));
            tables.error((interior - std::f64::consts::PI * (n as f64 - 2.0) / n as f64).abs());
        }
    }
    let faces_per_edge: Vec<usize> = (0..solid.edges.len())
        .map(|e| solid.face_edges.iter().filter(|fe| fe.contains(&e)).count())
        .collect();
    for c in faces_per_edge {
        tables.truth(c == 2);
    }
    tables.truth(solid.vertices.len() as i64 - solid.edges.len() as i64 + solid.n_faces() as i64 == 2);

    let mut group = Check::new("symmetry-order", name, 0.0);
    let (proper, full) = match name {
        SolidName::Tetrahedron => (12, 24),
        SolidName::Cube | SolidName::Octahedron => (24, 48),
        _ => (60, 120),
    };
    group.truth(symmetry_group(solid, true).order() == proper);
    group.truth(symmetry_group(solid, false).order() == full);

    let mut cone_law = Check::new("cone-law", name, tolerance::ANGLE);
    let half = solid.dual_dihedral / 2.0;
    for (v, p) in solid.vertices.iter().enumerate() {
        for w in solid.neighbours(v) {
            cone_law.error((angle(&(solid.vertices[w] - p), &(solid.centroid() - p)) - half).abs());
        }
    }

    let modules = modules_for_all_orientations(solid)?;
    let mut ridges = Check::new("ridge-on-both-cones", name, tolerance::SURFACE);
    let mut triple = Check::new("triple-point", name, tolerance::TRIPLE_POINT);
    let mut circ = Check::new("circumscription", name, tolerance::SURFACE);
    let mut sphere = Check::new("inside-circumsphere", name, tolerance::SURFACE);
    for m in &modules {
        for r in &m.ridges {
            for p in r.sample(64) {
                let err = r
                    .cone_a
                    .signed_distance(&p)
                    .abs()
                    .max(r.cone_b.signed_distance(&p).abs())
                    .max((p - r.plane_point).dot(&r.plane_normal).abs());
                ridges.error(err);
            }
        }
        if let Some(t) = m.triple_point {
            // on all three cones, equidistant from the three apices, and the
            // limit of every ridge arc
            let d: Vec<f64> = m.cones.iter().map(|c| (t - c.apex).norm()).collect();
            let spread = d.iter().cloned().fold(f64::MIN, f64::max) - d.iter().cloned().fold(f64::MAX, f64::min);
            let on = m.cones.iter().map(|c| c.signed_distance(&t).abs()).fold(0.0, f64::max);
            let near = m
                .ridges
                .iter()
                .map(|r| (r.point_at(1.0 - 1e-9) - t).norm())
                .fold(0.0, f64::max);
            triple.error(spread.max(on).max(near));
        }
        let f = &solid.faces[m.face];
        for i in 0..f.len() {
            let (a, b) = (solid.vertices[f[i]], solid.vertices[f[(i + 1) % f.len()]]);
            for k in 0..=100 {
                let p = a + (k as f64 / 100.0) * (b - a);
                let on_surface = matches!(m.classify_point(&p), PointClass::OnPatch(_) | PointClass::OnRidge(_));
                let dist = m.cones.iter().map(|c| c.signed_distance(&p)).fold(f64::MIN, f64::max);
                circ.error(if on_surface { dist.abs() } else { f64::INFINITY });
            }
        }
        for p in m.surface_samples(16) {
            sphere.error((p.norm() - 1.0).max(0.0));
        }
    }

    let mut tangent = Check::new("tangent-continuity", name, tolerance::TANGENT);
    let k = orientation_count(solid.face_size());
    for (e, &[u, v]) in solid.edges.iter().enumerate() {
        let faces: Vec<usize> = (0..solid.n_faces())
            .filter(|&f| solid.face_edges[f].contains(&e))
            .collect();
        let (pu, pv) = (solid.vertices[u], solid.vertices[v]);
        for o1 in 0..k {
            for o2 in 0..k {
                let m1 = &modules[faces[0] * k + o1];
                let m2 = &modules[faces[1] * k + o2];
                for s in 0..20 {
                    let p = pu + ((s as f64 + 0.5) / 20.0) * (pv - pu);
                    match (sheet_normal(m1, &p), sheet_normal(m2, &p)) {
                        (Some(n1), Some(n2)) => tangent.error((n1 - n2).norm()),
                        _ => tangent.truth(false),
                    }
                }
            }
        }
    }
    Ok(vec![tables, group, cone_law, ridges, triple, circ, sphere, tangent])
}

/// Class set by scanning every raw configuration.
fn scan_classes(solid: &PlatonicSolid, action: &GroupAction, rules: RuleSet) -> (BTreeSet<Vec<u8>>, u64) {
    let configs: Vec<Configuration> = enumerate_configs(solid).collect();
    let hits: Vec<Vec<u8>> = configs
        .par_iter()
        .filter(|c| crate::seam::is_developable(solid, c, rules).developable)
        .map(|c| action.canonical_vec(&c.orientations, true))
        .collect();
    let n = hits.len() as u64;
    (hits.into_iter().collect(), n)
}

pub fn combinatorics_checks(solid: &PlatonicSolid, rules: RuleSet) -> Result<(Vec<Check>, ClassReport)> {
    let name = solid.name;
    let group = symmetry_group(solid, false);
    let action = GroupAction::new(solid, &group)?;
    let small = raw_config_count(solid) <= 100_000;

    let mut slots = Check::new("slot-count", name, 0.0);
    let sample: Vec<Configuration> = enumerate_configs(solid).take(20_000).collect();
    for c in &sample {
        let n_patches = patches(solid, c).len();
        let total: usize = edge_slots(solid, c).iter().map(|e| e.slots.len()).sum();
        slots.truth(total == 2 * n_patches);
    }

    let report = enumerate_classes(solid, rules, default_budget(name));
    let mut classes = Check::new("class-consistency", name, 0.0);
    for c in &report.classes {
        classes.truth(action.canonical_vec(&c.configuration.orientations, true) == c.configuration.orientations);
        classes.truth(c.orbit_size * c.full_stabilizer == group.order());
        classes.truth(crate::seam::is_developable(solid, &c.configuration, rules).developable);
    }

    let mut modes = Check::new("mode-involution", name, 0.0);
    for c in &report.classes {
        let n = patches(solid, &c.configuration).len();
        for m in pairing_modes(solid, &c.configuration, rules) {
            let inv = m.partner.iter().enumerate().all(|(i, &j)| j != i && m.partner[j] == i);
            modes.truth(inv);
            let cover: usize = cycle_decomposition(&m.partner).iter().map(Vec::len).sum();
            modes.truth(cover == n);
        }
    }

    let mut out = vec![slots, classes, modes];
    if small {
        let mut scan = Check::new("search-equals-scan", name, 0.0);
        for r in RuleSet::ALL {
            let pruned = enumerate_classes(solid, r, None);
            let (set, raw) = scan_classes(solid, &action, r);
            let found: BTreeSet<Vec<u8>> = pruned
                .classes
                .iter()
                .map(|c| c.configuration.orientations.clone())
                .collect();
            scan.truth(found == set);
            scan.truth(pruned.developable_configs == raw);
        }
        out.push(scan);
    }
    Ok((out, report))
}

/// Rolling checks on one configuration per solid: the first class of the
/// report when there is one, else the all-zero configuration.
pub fn oracle_checks(solid: &PlatonicSolid, rules: RuleSet, report: Option<&ClassReport>) -> Result<Vec<Check>> {
    let name = solid.name;
    let mut out = Vec::new();
    if matches!(name, SolidName::Tetrahedron | SolidName::Cube) {
        let a = oracle_agreement(solid, rules)?;
        let mut agree = Check::new("oracle-agreement", name, 0.0);
        for _ in 0..a.configs_checked {
            agree.truth(true);
        }
        let bad: BTreeSet<&String> = a.developability_mismatches.iter().chain(&a.mode_mismatches).collect();
        agree.passed -= bad.len();
        agree.worst = if bad.is_empty() { 0.0 } else { f64::INFINITY };
        out.push(agree);
    }

    let config = report
        .and_then(|r| r.classes.first())
        .map(|c| c.configuration.clone())
        .unwrap_or_else(|| Configuration::new(solid, vec![0; solid.n_faces()]).expect("zero config"));
    let geo = RollGeometry::new(solid, &config)?;

    let mut candidates = Check::new("candidates-far-slots", name, 0.0);
    let slots = edge_slots(solid, &config);
    for (i, ev) in geo.events.iter().enumerate() {
        let face = geo.patches[i / 2].face;
        let far = slots[ev.edge].slots.iter().filter(|s| s.face != face).count();
        candidates.truth(ev.candidates.len() == far);
    }

    let opts = RollOptions {
        cycles: 3,
        ..RollOptions::default()
    };
    let trace = simulate_roll(&geo, &BranchPolicy::First, &opts)?;
    let mut height = Check::new("rolling-height", name, tolerance::HEIGHT);
    height.error(trace.max_height_deviation);
    let mut support = Check::new("ground-support", name, tolerance::SUPPORT);
    support.error((-trace.min_clearance).max(0.0));
    let mut closure = Check::new("cycle-closure", name, tolerance::CLOSURE);
    closure.truth(trace.closed && trace.cycles_completed >= 3);
    closure.error(trace.closure_error.unwrap_or(f64::INFINITY));
    closure.error(trace.max_pose_error);

    let mut footprint = Check::new("footprint-area", name, 5e-3);
    for m in list_modes(&geo)?.iter().filter(|m| m.full) {
        footprint.error((m.footprint_area - m.visited_patch_area).abs() / m.visited_patch_area);
    }
    out.extend([candidates, height, support, closure, footprint]);
    Ok(out)
}

pub fn run_suite(suite: Suite, solids: &[SolidName], rules: RuleSet) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut incomplete = Vec::new();
    for &name in solids {
        let solid = build_solid(name);
        match suite {
            Suite::Geometry => checks.extend(geometry_checks(&solid)?),
            Suite::Combinatorics => {
                let (c, report) = combinatorics_checks(&solid, rules)?;
                if !report.complete {
                    incomplete.push(name);
                }
                checks.extend(c);
            }
            Suite::Oracle => {
                let report = enumerate_classes(&solid, rules, default_budget(name));
                if !report.complete {
                    incomplete.push(name);
                }
                checks.extend(oracle_checks(&solid, rules, Some(&report))?);
            }
        }
    }
    Ok(SuiteReport {
        suite,
        rule_set: rules,
        checks,
        incomplete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_suite_passes_on_tetrahedron_and_octahedron() {
        for name in [SolidName::Tetrahedron, SolidName::Octahedron] {
            let checks = geometry_checks(&build_solid(name)).unwrap();
            for c in &checks {
                assert!(c.ok(), "{c:?}");
                assert!(c.total > 0 || c.name == "triple-point", "{c:?}");
            }
        }
    }

    #[test]
    fn combinatorics_suite_passes_on_cube() {
        let (checks, report) =
            combinatorics_checks(&build_solid(SolidName::Cube), RuleSet::TangentAlternation).unwrap();
        assert!(report.complete);
        assert!(checks.iter().all(Check::ok), "{checks:?}");
        assert!(checks.iter().any(|c| c.name == "search-equals-scan"));
    }

    #[test]
    fn failing_item_is_counted() {
        let mut c = Check::new("x", SolidName::Cube, 1e-9);
        c.error(1e-12);
        c.error(1e-3);
        assert_eq!((c.passed, c.total), (1, 2));
        assert!(!c.ok());
    }

    #[test]
    fn suite_names() {
        assert_eq!("oracle".parse::<Suite>().unwrap(), Suite::Oracle);
        assert!("calibration".parse::<Suite>().is_err());
    }
}
