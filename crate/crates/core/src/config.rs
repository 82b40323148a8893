//! Module orientations, whole-solid configurations and their symmetry
//! classes.
//!
//! Orientation index semantics, for a face cycle `(f0, f1, ..)` in canonical
//! order (see [`crate::solid`]):
//!
//! | face     | k | index `i` selects | apex set                 |
//! |----------|---|-------------------|--------------------------|
//! | triangle | 3 | edge `f_i f_{i+1}` | `[f_i, f_{i+1}]`         |
//! | square   | 2 | diagonal at `f_i`  | `[f_i, f_{i+2}]`         |
//! | pentagon | 5 | vertex `f_i`       | `[f_i, f_{i+2}, f_{i+3}]` |
//!
//! Indices wrap modulo the face size. The pentagon apex set lists the
//! distinguished vertex first, then the endpoints of the opposite edge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solid::{PlatonicSolid, SolidName};
use crate::symmetry::SymmetryGroup;

pub fn orientation_count(face_size: usize) -> usize {
    match face_size {
        3 => 3,
        4 => 2,
        5 => 5,
        _ => unreachable!("Platonic faces have 3, 4 or 5 sides"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub face: usize,
    pub index: usize,
}

/// Apex vertices of the module on `face` in orientation `index`.
pub fn apex_set(solid: &PlatonicSolid, face: usize, index: usize) -> Result<Vec<usize>> {
    let f = &solid.faces[face];
    let k = f.len();
    let count = orientation_count(k);
    if index >= count {
        return Err(Error::OrientationOutOfRange { face, index, k: count });
    }
    Ok(match k {
        3 => vec![f[index], f[(index + 1) % 3]],
        4 => vec![f[index], f[index + 2]],
        _ => vec![f[index], f[(index + 2) % 5], f[(index + 3) % 5]],
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    pub solid: SolidName,
    pub orientations: Vec<u8>,
}

impl Configuration {
    pub fn new(solid: &PlatonicSolid, orientations: Vec<u8>) -> Result<Self> {
        if orientations.len() != solid.n_faces() {
            return Err(Error::ConfigLength {
                solid: solid.name.to_string(),
                expected: solid.n_faces(),
                got: orientations.len(),
            });
        }
        for (face, &o) in orientations.iter().enumerate() {
            let k = orientation_count(solid.faces[face].len());
            if o as usize >= k {
                return Err(Error::OrientationOutOfRange {
                    face,
                    index: o as usize,
                    k,
                });
            }
        }
        Ok(Configuration {
            solid: solid.name,
            orientations,
        })
    }

    pub fn apex_sets(&self, solid: &PlatonicSolid) -> Vec<Vec<usize>> {
        self.orientations
            .iter()
            .enumerate()
            .map(|(f, &o)| apex_set(solid, f, o as usize).expect("validated configuration"))
            .collect()
    }

    pub fn to_descriptor(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("configuration serializes");
        s.push('\n');
        s
    }

    pub fn from_descriptor(text: &str) -> Result<Self> {
        let raw: Configuration = serde_json::from_str(text)?;
        let solid = crate::solid::build_solid(raw.solid);
        Configuration::new(&solid, raw.orientations)
    }

    /// Compact `solid:o0,o1,..` label.
    pub fn label(&self) -> String {
        let digits: Vec<String> = self.orientations.iter().map(u8::to_string).collect();
        format!("{}:{}", self.solid, digits.join(","))
    }
}

pub fn raw_config_count(solid: &PlatonicSolid) -> u128 {
    solid.faces.iter().map(|f| orientation_count(f.len()) as u128).product()
}

/// Lexicographic stream over all configurations of a solid.
pub struct ConfigIter {
    solid: SolidName,
    radices: Vec<u8>,
    next: Option<Vec<u8>>,
}

impl Iterator for ConfigIter {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.radices[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(Configuration {
            solid: self.solid,
            orientations: current,
        })
    }
}

pub fn enumerate_configs(solid: &PlatonicSolid) -> ConfigIter {
    ConfigIter {
        solid: solid.name,
        radices: solid.faces.iter().map(|f| orientation_count(f.len()) as u8).collect(),
        next: Some(vec![0; solid.n_faces()]),
    }
}

/// A symmetry op's effect on orientation vectors.
#[derive(Debug, Clone)]
pub struct OpAction {
    pub face_map: Vec<usize>,
    /// `orient_map[f][o]`: orientation on face `face_map[f]` that is the image
    /// of orientation `o` on face `f`.
    pub orient_map: Vec<Vec<u8>>,
    pub proper: bool,
}

/// Precomputed action of a symmetry group on configurations.
#[derive(Debug, Clone)]
pub struct GroupAction {
    pub solid: SolidName,
    pub proper_only: bool,
    pub ops: Vec<OpAction>,
}

impl GroupAction {
    pub fn new(solid: &PlatonicSolid, group: &SymmetryGroup) -> Result<Self> {
        if group.solid != solid.name {
            return Err(Error::GroupMismatch {
                group: group.solid.to_string(),
                config: solid.name.to_string(),
            });
        }
        let all_sets: Vec<Vec<Vec<usize>>> = (0..solid.n_faces())
            .map(|f| {
                (0..orientation_count(solid.faces[f].len()))
                    .map(|o| {
                        let mut s = apex_set(solid, f, o).expect("in range");
                        s.sort_unstable();
                        s
                    })
                    .collect()
            })
            .collect();
        let ops = group
            .ops
            .iter()
            .map(|op| {
                let orient_map = (0..solid.n_faces())
                    .map(|f| {
                        let g = op.face_perm[f];
                        all_sets[f]
                            .iter()
                            .map(|set| {
                                let mut img: Vec<usize> = set.iter().map(|&v| op.vertex_perm[v]).collect();
                                img.sort_unstable();
                                all_sets[g]
                                    .iter()
                                    .position(|s| *s == img)
                                    .expect("symmetry maps apex sets to apex sets")
                                    as u8
                            })
                            .collect()
                    })
                    .collect();
                OpAction {
                    face_map: op.face_perm.clone(),
                    orient_map,
                    proper: op.proper,
                }
            })
            .collect();
        Ok(GroupAction {
            solid: solid.name,
            proper_only: group.proper_only,
            ops,
        })
    }

    pub fn order(&self) -> usize {
        self.ops.len()
    }

    pub fn apply_op(&self, op: &OpAction, c: &[u8]) -> Vec<u8> {
        let mut out = vec![0u8; c.len()];
        self.apply_into(op, c, &mut out);
        out
    }

    pub fn apply_into(&self, op: &OpAction, c: &[u8], out: &mut [u8]) {
        for (f, &o) in c.iter().enumerate() {
            out[op.face_map[f]] = op.orient_map[f][o as usize];
        }
    }

    fn check(&self, config: &Configuration, include_improper: bool) -> Result<()> {
        if config.solid != self.solid {
            return Err(Error::GroupMismatch {
                group: self.solid.to_string(),
                config: config.solid.to_string(),
            });
        }
        if include_improper && self.proper_only {
            return Err(Error::ProperOnlyGroup);
        }
        Ok(())
    }

    /// Lexicographically smallest image of `c`.
    pub fn canonical_vec(&self, c: &[u8], include_improper: bool) -> Vec<u8> {
        let mut best = c.to_vec();
        let mut buf = vec![0u8; c.len()];
        for op in &self.ops {
            if !include_improper && !op.proper {
                continue;
            }
            self.apply_into(op, c, &mut buf);
            if buf < best {
                best.copy_from_slice(&buf);
            }
        }
        best
    }

    pub fn canonicalize(&self, config: &Configuration, include_improper: bool) -> Result<Vec<u8>> {
        self.check(config, include_improper)?;
        Ok(self.canonical_vec(&config.orientations, include_improper))
    }

    /// True when some group image of every completion of the assigned prefix
    /// is lexicographically smaller, so no completion can be canonical.
    pub fn prefix_rejected(&self, prefix: &[u8], n_faces: usize, include_improper: bool) -> bool {
        let k = prefix.len();
        let mut img: Vec<Option<u8>> = vec![None; n_faces];
        'ops: for op in &self.ops {
            if !include_improper && !op.proper {
                continue;
            }
            img.iter_mut().for_each(|x| *x = None);
            for (f, &o) in prefix.iter().enumerate() {
                img[op.face_map[f]] = Some(op.orient_map[f][o as usize]);
            }
            for (i, &ci) in prefix.iter().enumerate() {
                match img[i] {
                    None => continue 'ops,
                    Some(x) if x < ci => return true,
                    Some(x) if x > ci => continue 'ops,
                    Some(_) => {}
                }
            }
            debug_assert!(k <= n_faces);
        }
        false
    }

    pub fn class_info(&self, config: &Configuration) -> Result<ClassInfo> {
        self.check(config, true)?;
        let c = &config.orientations;
        let canonical = self.canonical_vec(c, true);
        let mut full_stab = 0;
        let mut proper_stab = 0;
        let mut buf = vec![0u8; c.len()];
        for op in &self.ops {
            self.apply_into(op, c, &mut buf);
            if buf == *c {
                full_stab += 1;
                if op.proper {
                    proper_stab += 1;
                }
            }
        }
        let proper_canonical = self.canonical_vec(c, false);
        let mirror = self
            .ops
            .iter()
            .find(|op| !op.proper)
            .expect("full group contains a reflection");
        let mirrored = self.apply_op(mirror, c);
        let chiral = self.canonical_vec(&mirrored, false) != proper_canonical;
        Ok(ClassInfo {
            canonical,
            orbit_size: self.order() / full_stab,
            chiral,
            proper_stabilizer: proper_stab,
            full_stabilizer: full_stab,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassInfo {
    pub canonical: Vec<u8>,
    /// Orbit size under the full group.
    pub orbit_size: usize,
    pub chiral: bool,
    /// Number of rotations fixing the configuration; 1 means no rotation axis.
    pub proper_stabilizer: usize,
    pub full_stabilizer: usize,
}

/// Canonical encoding of `config` under `group`.
pub fn canonicalize(
    solid: &PlatonicSolid,
    config: &Configuration,
    group: &SymmetryGroup,
    include_improper: bool,
) -> Result<Vec<u8>> {
    if group.solid != config.solid {
        return Err(Error::GroupMismatch {
            group: group.solid.to_string(),
            config: config.solid.to_string(),
        });
    }
    GroupAction::new(solid, group)?.canonicalize(config, include_improper)
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, BTreeSet};

    use proptest::prelude::*;

    use super::*;
    use crate::solid::build_solid;
    use crate::symmetry::symmetry_group;

    fn action(name: SolidName, proper: bool) -> (PlatonicSolid, GroupAction) {
        let s = build_solid(name);
        let g = symmetry_group(&s, proper);
        let a = GroupAction::new(&s, &g).unwrap();
        (s, a)
    }

    #[test]
    fn apex_sets_follow_the_table() {
        let t = build_solid(SolidName::Tetrahedron);
        let f = t.faces[0].clone();
        assert_eq!(apex_set(&t, 0, 0).unwrap(), vec![f[0], f[1]]);
        assert_eq!(apex_set(&t, 0, 1).unwrap(), vec![f[1], f[2]]);
        assert_eq!(apex_set(&t, 0, 2).unwrap(), vec![f[2], f[0]]);

        let c = build_solid(SolidName::Cube);
        let f = c.faces[0].clone();
        assert_eq!(apex_set(&c, 0, 0).unwrap(), vec![f[0], f[2]]);
        assert_eq!(apex_set(&c, 0, 1).unwrap(), vec![f[1], f[3]]);

        let d = build_solid(SolidName::Dodecahedron);
        let f = d.faces[0].clone();
        // (X, U, Y, Z, W) with X distinguished -> {X, Y, Z}
        assert_eq!(apex_set(&d, 0, 0).unwrap(), vec![f[0], f[2], f[3]]);
        let s = apex_set(&d, 0, 0).unwrap();
        assert!(d.edge_index(s[1], s[2]).is_some(), "Y Z is the opposite edge");
        assert!(d.edge_index(s[0], s[1]).is_none());
    }

    #[test]
    fn out_of_range_names_k() {
        let c = build_solid(SolidName::Cube);
        let err = apex_set(&c, 0, 2).unwrap_err();
        assert!(err.to_string().contains("k = 2"));
        assert!(Configuration::new(&c, vec![0, 0, 0, 0, 0, 3]).is_err());
        assert!(Configuration::new(&c, vec![0, 0]).is_err());
    }

    #[test]
    fn raw_counts() {
        let counts = [81u128, 64, 6561, 244_140_625, 3_486_784_401];
        for (name, n) in SolidName::ALL.into_iter().zip(counts) {
            assert_eq!(raw_config_count(&build_solid(name)), n);
        }
        let t = build_solid(SolidName::Tetrahedron);
        let all: Vec<_> = enumerate_configs(&t).collect();
        assert_eq!(all.len(), 81);
        assert!(all.windows(2).all(|w| w[0].orientations < w[1].orientations));
        assert_eq!(enumerate_configs(&build_solid(SolidName::Cube)).count(), 64);
    }

    #[test]
    fn icosahedron_iterator_streams() {
        let s = build_solid(SolidName::Icosahedron);
        let first: Vec<_> = enumerate_configs(&s).take(4).collect();
        assert_eq!(first[3].orientations[19], 0);
        assert_eq!(first[3].orientations[18], 1);
    }

    /// Brute-force orbit partition, independent of `canonical_vec`.
    fn orbits(s: &PlatonicSolid, a: &GroupAction, proper: bool) -> Vec<BTreeSet<Vec<u8>>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for c in enumerate_configs(s) {
            if seen.contains(&c.orientations) {
                continue;
            }
            let orbit: BTreeSet<Vec<u8>> = a
                .ops
                .iter()
                .filter(|op| op.proper || !proper)
                .map(|op| a.apply_op(op, &c.orientations))
                .collect();
            seen.extend(orbit.iter().cloned());
            out.push(orbit);
        }
        out
    }

    #[test]
    fn orbit_partition_at_desk_scale() {
        for (name, total) in [
            (SolidName::Tetrahedron, 81),
            (SolidName::Cube, 64),
            (SolidName::Octahedron, 6561),
        ] {
            let (s, a) = action(name, false);
            let orbs = orbits(&s, &a, false);
            assert_eq!(orbs.iter().map(BTreeSet::len).sum::<usize>(), total);
            for orb in &orbs {
                assert_eq!(a.order() % orb.len(), 0, "orbit size divides group order");
                let canon: BTreeSet<Vec<u8>> = orb.iter().map(|c| a.canonical_vec(c, true)).collect();
                assert_eq!(canon.len(), 1);
                assert_eq!(canon.iter().next().unwrap(), orb.iter().next().unwrap());
                let info = a
                    .class_info(&Configuration::new(&s, orb.iter().next().unwrap().clone()).unwrap())
                    .unwrap();
                assert_eq!(info.orbit_size, orb.len());
            }
        }
    }

    #[test]
    fn matched_tetrahedron_configs_form_one_class() {
        let (s, a) = action(SolidName::Tetrahedron, true);
        // faces pair up across two opposite edges: 3 such configurations
        let mut matched = Vec::new();
        for c in enumerate_configs(&s) {
            let sets = c.apex_sets(&s);
            let mut chosen: BTreeMap<[usize; 2], usize> = BTreeMap::new();
            for set in &sets {
                *chosen.entry([set[0].min(set[1]), set[0].max(set[1])]).or_default() += 1;
            }
            if chosen.values().all(|&n| n == 2) {
                matched.push(c);
            }
        }
        assert_eq!(matched.len(), 3);
        let forms: BTreeSet<Vec<u8>> = matched.iter().map(|c| a.canonicalize(c, false).unwrap()).collect();
        assert_eq!(forms.len(), 1);
    }

    #[test]
    fn chirality_agrees_with_brute_force() {
        for name in [SolidName::Tetrahedron, SolidName::Cube, SolidName::Octahedron] {
            let (s, full) = action(name, false);
            let proper_orbits = orbits(&s, &full, true);
            let index: BTreeMap<&Vec<u8>, usize> = proper_orbits
                .iter()
                .enumerate()
                .flat_map(|(i, o)| o.iter().map(move |c| (c, i)))
                .collect();
            for c in enumerate_configs(&s).step_by(3) {
                let own = index[&c.orientations];
                let mirror_orbits: BTreeSet<usize> = full
                    .ops
                    .iter()
                    .filter(|op| !op.proper)
                    .map(|op| index[&full.apply_op(op, &c.orientations)])
                    .collect();
                let chiral = !mirror_orbits.contains(&own);
                assert_eq!(full.class_info(&c).unwrap().chiral, chiral, "{}", c.label());
            }
        }
    }

    #[test]
    fn mismatched_group_is_rejected() {
        let t = build_solid(SolidName::Tetrahedron);
        let c = build_solid(SolidName::Cube);
        let g = symmetry_group(&c, false);
        let cfg = Configuration::new(&t, vec![0; 4]).unwrap();
        assert!(matches!(
            canonicalize(&t, &cfg, &g, true),
            Err(Error::GroupMismatch { .. })
        ));
        let (_, proper) = action(SolidName::Tetrahedron, true);
        assert!(matches!(proper.canonicalize(&cfg, true), Err(Error::ProperOnlyGroup)));
    }

    #[test]
    fn prefix_pruning_never_drops_a_canonical_form() {
        let (s, a) = action(SolidName::Octahedron, false);
        for c in enumerate_configs(&s) {
            let canonical = a.canonical_vec(&c.orientations, true) == c.orientations;
            for k in 1..=s.n_faces() {
                if a.prefix_rejected(&c.orientations[..k], s.n_faces(), true) {
                    assert!(!canonical, "{} pruned at {k}", c.label());
                }
            }
            if !canonical {
                assert!(a.prefix_rejected(&c.orientations, s.n_faces(), true));
            }
        }
    }

    #[test]
    fn descriptor_round_trip_is_bit_exact() {
        let s = build_solid(SolidName::Dodecahedron);
        let c = Configuration::new(&s, vec![0, 1, 2, 3, 4, 0, 1, 2, 3, 4, 0, 1]).unwrap();
        let text = c.to_descriptor();
        let back = Configuration::from_descriptor(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_descriptor(), text);
    }

    proptest! {
        #[test]
        fn canonical_form_is_orbit_invariant(seed in proptest::collection::vec(0u8..3, 8), op in 0usize..48) {
            let (s, a) = action(SolidName::Octahedron, false);
            let c = Configuration::new(&s, seed).unwrap();
            let img = a.apply_op(&a.ops[op], &c.orientations);
            prop_assert_eq!(a.canonical_vec(&img, true), a.canonical_vec(&c.orientations, true));
        }

        #[test]
        fn action_law(seed in proptest::collection::vec(0u8..5, 12), g in 0usize..120, h in 0usize..120) {
            let s = build_solid(SolidName::Dodecahedron);
            let group = symmetry_group(&s, false);
            let a = GroupAction::new(&s, &group).unwrap();
            let gh = group.ops[g].compose(&group.ops[h]);
            let gh_index = group.ops.iter().position(|op| *op == gh).unwrap();
            let lhs = a.apply_op(&a.ops[gh_index], &seed);
            let rhs = a.apply_op(&a.ops[g], &a.apply_op(&a.ops[h], &seed));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
