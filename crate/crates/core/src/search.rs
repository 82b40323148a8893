//! Enumeration of developable configuration classes.
//!
//! Depth-first over faces in canonical (spiral) order. A branch is cut when
//! an edge whose two faces are both assigned has an odd slot count, or when
//! a group image of the assigned prefix is already lexicographically
//! smaller. Surviving leaves are exactly the canonical representatives of
//! the parity-even classes. Rule sets that tolerate odd slot counts skip
//! the parity cut.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{apex_set, orientation_count, ClassInfo, Configuration, GroupAction};
use crate::seam::{is_developable, RuleSet};
use crate::solid::{PlatonicSolid, SolidName};
use crate::symmetry::symmetry_group;

pub const SCHEMA_VERSION: u32 = 1;

/// Published family sizes: classes, and classes with no rotation axis where
/// stated.
pub fn reference_counts(name: SolidName) -> ReferenceCount {
    match name {
        SolidName::Octahedron => ReferenceCount {
            classes: 5,
            no_rotation_axis: Some(3),
        },
        SolidName::Dodecahedron => ReferenceCount {
            classes: 3,
            no_rotation_axis: None,
        },
        _ => ReferenceCount {
            classes: 2,
            no_rotation_axis: None,
        },
    }
}

/// Default node budgets; `None` is unbounded.
pub fn default_budget(name: SolidName) -> Option<u64> {
    match name {
        SolidName::Dodecahedron => Some(100_000_000),
        SolidName::Icosahedron => Some(1_000_000_000),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReferenceCount {
    pub classes: usize,
    pub no_rotation_axis: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassEntry {
    pub index: usize,
    pub label: String,
    pub configuration: Configuration,
    pub orbit_size: usize,
    pub chiral: bool,
    pub proper_stabilizer: usize,
    pub full_stabilizer: usize,
    pub rotation_axis: bool,
    pub mode_count: usize,
    pub full_modes: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub schema_version: u32,
    pub solid: SolidName,
    pub family: String,
    pub rule_set: RuleSet,
    pub complete: bool,
    pub nodes_visited: u64,
    pub budget: Option<u64>,
    /// Classes under the full group, mirror images identified.
    pub class_count: usize,
    pub chiral_classes: usize,
    /// Classes when each chiral pair counts twice.
    pub class_count_mirrors_distinct: usize,
    pub no_rotation_axis: usize,
    /// Raw developable configurations: the sum of orbit sizes.
    pub developable_configs: u64,
    pub reference: ReferenceCount,
    pub classes: Vec<ClassEntry>,
}

impl ClassReport {
    pub fn matches_reference(&self) -> bool {
        self.complete
            && self.class_count == self.reference.classes
            && self
                .reference
                .no_rotation_axis
                .is_none_or(|n| n == self.no_rotation_axis)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

struct Search<'a> {
    solid: &'a PlatonicSolid,
    action: GroupAction,
    rules: RuleSet,
    /// `slot_delta[f][o][j]`: slots face `f` in orientation `o` adds to its
    /// `j`-th edge.
    slot_delta: Vec<Vec<Vec<u8>>>,
    /// Edges whose second face is `f`.
    closes_at: Vec<Vec<usize>>,
    radix: Vec<u8>,
    budget: Option<u64>,
    nodes: AtomicU64,
    exhausted: AtomicBool,
}

impl<'a> Search<'a> {
    fn new(solid: &'a PlatonicSolid, rules: RuleSet, budget: Option<u64>) -> Self {
        let group = symmetry_group(solid, false);
        let action = GroupAction::new(solid, &group).expect("same solid");
        let slot_delta = (0..solid.n_faces())
            .map(|f| {
                let face = &solid.faces[f];
                (0..orientation_count(face.len()))
                    .map(|o| {
                        let set = apex_set(solid, f, o).expect("in range");
                        (0..face.len())
                            .map(|i| set.contains(&face[i]) as u8 + set.contains(&face[(i + 1) % face.len()]) as u8)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut closes_at = vec![Vec::new(); solid.n_faces()];
        for (e, faces) in solid.edge_faces.iter().enumerate() {
            closes_at[faces[0].max(faces[1])].push(e);
        }
        Search {
            solid,
            action,
            rules,
            slot_delta,
            closes_at,
            radix: solid.faces.iter().map(|f| orientation_count(f.len()) as u8).collect(),
            budget,
            nodes: AtomicU64::new(0),
            exhausted: AtomicBool::new(false),
        }
    }

    /// Counts a node; false once the budget is spent.
    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.budget.is_some_and(|b| n > b) {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    /// Assign orientation `o` to the next face; false if the branch is cut.
    fn push(&self, prefix: &mut Vec<u8>, slots: &mut [u8], o: u8) -> bool {
        let f = prefix.len();
        prefix.push(o);
        for (j, &e) in self.solid.face_edges[f].iter().enumerate() {
            slots[e] += self.slot_delta[f][o as usize][j];
        }
        let parity_ok =
            !self.rules.requires_even_slots() || self.closes_at[f].iter().all(|&e| slots[e].is_multiple_of(2));
        parity_ok && !self.action.prefix_rejected(prefix, self.solid.n_faces(), true)
    }

    fn pop(&self, prefix: &mut Vec<u8>, slots: &mut [u8]) {
        let f = prefix.len() - 1;
        let o = prefix.pop().expect("non-empty") as usize;
        for (j, &e) in self.solid.face_edges[f].iter().enumerate() {
            slots[e] -= self.slot_delta[f][o][j];
        }
    }

    fn dfs(&self, prefix: &mut Vec<u8>, slots: &mut [u8], out: &mut Vec<Vec<u8>>) {
        if self.exhausted.load(Ordering::Relaxed) {
            return;
        }
        if prefix.len() == self.solid.n_faces() {
            out.push(prefix.clone());
            return;
        }
        for o in 0..self.radix[prefix.len()] {
            if !self.tick() {
                return;
            }
            if self.push(prefix, slots, o) {
                self.dfs(prefix, slots, out);
            }
            self.pop(prefix, slots);
        }
    }

    /// Surviving prefixes of length `depth`, visited as the serial search
    /// would visit them.
    fn prefixes(&self, depth: usize) -> Vec<Vec<u8>> {
        fn rec(s: &Search<'_>, depth: usize, prefix: &mut Vec<u8>, slots: &mut [u8], out: &mut Vec<Vec<u8>>) {
            if prefix.len() == depth {
                out.push(prefix.clone());
                return;
            }
            for o in 0..s.radix[prefix.len()] {
                if !s.tick() {
                    return;
                }
                if s.push(prefix, slots, o) {
                    rec(s, depth, prefix, slots, out);
                }
                s.pop(prefix, slots);
            }
        }
        let mut out = Vec::new();
        let mut slots = vec![0u8; self.solid.edges.len()];
        rec(self, depth, &mut Vec::new(), &mut slots, &mut out);
        out
    }

    fn run_shard(&self, prefix: &[u8]) -> Vec<Vec<u8>> {
        let mut p = Vec::with_capacity(self.solid.n_faces());
        let mut slots = vec![0u8; self.solid.edges.len()];
        for &o in prefix {
            self.push(&mut p, &mut slots, o);
        }
        let mut out = Vec::new();
        self.dfs(&mut p, &mut slots, &mut out);
        out
    }

    fn entry(&self, canonical: Vec<u8>) -> Option<ClassEntry> {
        let config = Configuration::new(self.solid, canonical).expect("valid");
        let dev = is_developable(self.solid, &config, self.rules);
        if !dev.developable {
            return None;
        }
        let ClassInfo {
            orbit_size,
            chiral,
            proper_stabilizer,
            full_stabilizer,
            ..
        } = self.action.class_info(&config).expect("full group");
        Some(ClassEntry {
            index: 0,
            label: config.label(),
            configuration: config,
            orbit_size,
            chiral,
            proper_stabilizer,
            full_stabilizer,
            rotation_axis: proper_stabilizer > 1,
            mode_count: dev.mode_count,
            full_modes: dev.full_modes,
        })
    }
}

/// Canonical classes of developable configurations of `solid`.
///
/// Output is independent of the rayon thread count. When the node budget
/// runs out the report is flagged incomplete and holds what was found.
pub fn enumerate_classes(solid: &PlatonicSolid, rules: RuleSet, budget: Option<u64>) -> ClassReport {
    let search = Search::new(solid, rules, budget);
    // shard at the first depth with enough prefixes to keep workers busy
    let mut depth = 0;
    let mut width = 1usize;
    while depth < solid.n_faces() && width < 256 {
        width *= search.radix[depth] as usize;
        depth += 1;
    }
    let shards = search.prefixes(depth);
    let leaves: Vec<Vec<u8>> = shards
        .par_iter()
        .map(|p| search.run_shard(p))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let mut classes: Vec<ClassEntry> = leaves.into_par_iter().filter_map(|c| search.entry(c)).collect();
    classes.sort_by(|a, b| a.configuration.orientations.cmp(&b.configuration.orientations));
    for (i, c) in classes.iter_mut().enumerate() {
        c.index = i;
    }
    let exhausted = search.exhausted.load(Ordering::Relaxed);
    let nodes = search.nodes.load(Ordering::Relaxed);
    let chiral = classes.iter().filter(|c| c.chiral).count();
    ClassReport {
        schema_version: SCHEMA_VERSION,
        solid: solid.name,
        family: solid.name.family().to_string(),
        rule_set: rules,
        complete: !exhausted,
        nodes_visited: budget.map_or(nodes, |b| nodes.min(b)),
        budget,
        class_count: classes.len(),
        chiral_classes: chiral,
        class_count_mirrors_distinct: classes.len() + chiral,
        no_rotation_axis: classes.iter().filter(|c| !c.rotation_axis).count(),
        developable_configs: classes.iter().map(|c| c.orbit_size as u64).sum(),
        reference: reference_counts(solid.name),
        classes,
    }
}

/// One summary row per report, against the published counts.
pub fn summary_table(reports: &[ClassReport]) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{:<13} {:<20} {:>7} {:>6} {:>9} {:>7} {:>9}  status",
        "family", "rule set", "classes", "chiral", "w/mirror", "no-axis", "published"
    )
    .unwrap();
    for r in reports {
        let published = match r.reference.no_rotation_axis {
            Some(n) => format!("{} ({n})", r.reference.classes),
            None => r.reference.classes.to_string(),
        };
        let status = if !r.complete {
            "incomplete"
        } else if r.matches_reference() {
            "match"
        } else {
            "differs"
        };
        writeln!(
            s,
            "{:<13} {:<20} {:>7} {:>6} {:>9} {:>7} {:>9}  {}",
            r.family,
            r.rule_set.as_str(),
            r.class_count,
            r.chiral_classes,
            r.class_count_mirrors_distinct,
            r.no_rotation_axis,
            published,
            status
        )
        .unwrap();
    }
    s
}

/// Per-class table of one report.
pub fn class_table(r: &ClassReport) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{} ({} rule set): {} classes{}",
        r.family,
        r.rule_set,
        r.class_count,
        if r.complete {
            ""
        } else {
            " [incomplete: budget exhausted]"
        }
    )
    .unwrap();
    writeln!(
        s,
        "{:>3}  {:<40} {:>5} {:>6} {:>5} {:>5}  rotation axis",
        "#", "orientations", "orbit", "chiral", "stab", "modes"
    )
    .unwrap();
    for c in &r.classes {
        let digits: String = c
            .configuration
            .orientations
            .iter()
            .map(|d| char::from(b'0' + d))
            .collect();
        let full = c.full_modes.iter().filter(|&&f| f).count();
        writeln!(
            s,
            "{:>3}  {:<40} {:>5} {:>6} {:>5} {:>2}/{:<2}  {}",
            c.index,
            digits,
            c.orbit_size,
            if c.chiral { "yes" } else { "no" },
            c.proper_stabilizer,
            full,
            c.mode_count,
            if c.rotation_axis {
                "yes"
            } else {
                "no rotational symmetry axis"
            }
        )
        .unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::config::enumerate_configs;
    use crate::solid::build_solid;

    /// Raw scan oracle: canonical forms of every developable configuration.
    fn raw_scan(name: SolidName, rules: RuleSet) -> (BTreeSet<Vec<u8>>, u64) {
        let s = build_solid(name);
        let g = symmetry_group(&s, false);
        let a = GroupAction::new(&s, &g).unwrap();
        let mut classes = BTreeSet::new();
        let mut count = 0;
        for c in enumerate_configs(&s) {
            if is_developable(&s, &c, rules).developable {
                count += 1;
                classes.insert(a.canonical_vec(&c.orientations, true));
            }
        }
        (classes, count)
    }

    #[test]
    fn pruned_search_equals_raw_scan() {
        for name in [SolidName::Tetrahedron, SolidName::Cube, SolidName::Octahedron] {
            for rules in RuleSet::ALL {
                let s = build_solid(name);
                let r = enumerate_classes(&s, rules, None);
                let (oracle, count) = raw_scan(name, rules);
                let found: BTreeSet<Vec<u8>> = r.classes.iter().map(|c| c.configuration.orientations.clone()).collect();
                assert_eq!(found, oracle, "{name} {rules}");
                assert_eq!(r.developable_configs, count, "{name} {rules}: orbit sum");
                assert!(r.complete);
            }
        }
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let s = build_solid(SolidName::Octahedron);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| enumerate_classes(&s, RuleSet::TangentAlternation, None));
        let b = four.install(|| enumerate_classes(&s, RuleSet::TangentAlternation, None));
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let s = build_solid(SolidName::Octahedron);
        let r = enumerate_classes(&s, RuleSet::TangentAlternation, Some(20));
        assert!(!r.complete);
        assert_eq!(r.nodes_visited, 20);
        assert!(summary_table(&[r]).contains("incomplete"));
    }

    #[test]
    fn tables_render() {
        let s = build_solid(SolidName::Cube);
        let r = enumerate_classes(&s, RuleSet::TangentAlternation, None);
        let t = class_table(&r);
        assert_eq!(t.lines().count(), 2 + r.class_count);
        assert!(summary_table(&[r]).contains("cubicon"));
    }
}
