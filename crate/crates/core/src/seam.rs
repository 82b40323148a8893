//! Combinatorial seam paths: which patch the contact moves into when it
//! reaches a solid edge.
//!
//! Every patch has two ends, one on each face edge through its apex. End 0
//! lies on the edge towards the previous vertex of the face cycle, end 1 on
//! the edge towards the next vertex. Slot-end `2p + e` is end `e` of patch
//! `p`. A mode pairs the slot-ends of every edge; walking a patch from one
//! end to the other and then jumping to the partner end traces the cycles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::solid::PlatonicSolid;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeamPatch {
    pub id: usize,
    pub face: usize,
    pub apex: usize,
    /// Edge ids of end 0 and end 1.
    pub edges: [usize; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Slot {
    pub patch: usize,
    pub end: usize,
    pub face: usize,
    /// Apex of the patch, which is one of the edge endpoints.
    pub pivot: usize,
}

impl Slot {
    pub fn slot_end(&self) -> usize {
        2 * self.patch + self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeSlots {
    pub edge: usize,
    pub slots: Vec<Slot>,
}

impl EdgeSlots {
    pub fn side(&self, face: usize) -> impl Iterator<Item = &Slot> {
        self.slots.iter().filter(move |s| s.face == face)
    }
}

pub fn patches(solid: &PlatonicSolid, config: &Configuration) -> Vec<SeamPatch> {
    let mut out = Vec::new();
    for (face, set) in config.apex_sets(solid).into_iter().enumerate() {
        let f = &solid.faces[face];
        let k = f.len();
        for apex in set {
            let i = f.iter().position(|&v| v == apex).expect("apex on face");
            out.push(SeamPatch {
                id: out.len(),
                face,
                apex,
                edges: [solid.face_edges[face][(i + k - 1) % k], solid.face_edges[face][i]],
            });
        }
    }
    out
}

pub fn edge_slots(solid: &PlatonicSolid, config: &Configuration) -> Vec<EdgeSlots> {
    let mut out: Vec<EdgeSlots> = (0..solid.edges.len())
        .map(|edge| EdgeSlots {
            edge,
            slots: Vec::new(),
        })
        .collect();
    for p in patches(solid, config) {
        for end in 0..2 {
            out[p.edges[end]].slots.push(Slot {
                patch: p.id,
                end,
                face: p.face,
                pivot: p.apex,
            });
        }
    }
    out
}

/// Slot count per edge, from apex sets alone.
pub fn slot_counts(solid: &PlatonicSolid, apex_sets: &[Vec<usize>]) -> Vec<u8> {
    let mut counts = vec![0u8; solid.edges.len()];
    for (face, set) in apex_sets.iter().enumerate() {
        for (i, &e) in solid.face_edges[face].iter().enumerate() {
            let f = &solid.faces[face];
            let (a, b) = (f[i], f[(i + 1) % f.len()]);
            counts[e] += set.contains(&a) as u8 + set.contains(&b) as u8;
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleSet {
    /// 4-slot edges pair across the edge, both smooth or both switching.
    #[default]
    TangentAlternation,
    /// As above, plus the pairing of the two slots on each side.
    CrossPairing,
    /// 4-slot edges always continue on the same cone.
    SmoothOnly,
    /// 4-slot edges always switch cone.
    SwitchOnly,
    /// No pairing: the contact may cross into any slot on the far face, and
    /// a configuration develops when one strongly connected set of rolling
    /// states reaches every patch. Odd slot counts are allowed and patches
    /// may be revisited. Modes are not defined under this rule.
    CoveringWalk,
}

impl RuleSet {
    pub const ALL: [RuleSet; 5] = [
        RuleSet::TangentAlternation,
        RuleSet::CrossPairing,
        RuleSet::SmoothOnly,
        RuleSet::SwitchOnly,
        RuleSet::CoveringWalk,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleSet::TangentAlternation => "tangent-alternation",
            RuleSet::CrossPairing => "cross-pairing",
            RuleSet::SmoothOnly => "smooth-only",
            RuleSet::SwitchOnly => "switch-only",
            RuleSet::CoveringWalk => "covering-walk",
        }
    }

    /// Whether an odd slot count rules a configuration out.
    pub fn requires_even_slots(self) -> bool {
        self != RuleSet::CoveringWalk
    }

    /// Pairings allowed at a 4-slot edge.
    pub fn branches(self) -> &'static [Branch] {
        match self {
            RuleSet::TangentAlternation => &[Branch::Smooth, Branch::Switch],
            RuleSet::CrossPairing => &[Branch::Smooth, Branch::Switch, Branch::SameSide],
            RuleSet::SmoothOnly => &[Branch::Smooth],
            RuleSet::SwitchOnly => &[Branch::Switch],
            RuleSet::CoveringWalk => &[],
        }
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleSet::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::UnknownRuleSet {
                name: s.to_string(),
                valid: RuleSet::ALL.map(RuleSet::as_str).join(", "),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Same pivot on both sides of the edge.
    Smooth,
    /// Pivot moves to the other edge endpoint.
    Switch,
    /// Two slots of the same face are joined.
    SameSide,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairingMode {
    /// Choice at each 4-slot edge, by edge id.
    pub choices: Vec<(usize, Branch)>,
    /// `partner[slot_end]`.
    pub partner: Vec<usize>,
}

/// Pairing of the slots of a 2-slot or 4-slot edge.
fn pair_edge(es: &EdgeSlots, branch: Branch, partner: &mut [usize]) {
    let mut link = |a: &Slot, b: &Slot| {
        partner[a.slot_end()] = b.slot_end();
        partner[b.slot_end()] = a.slot_end();
    };
    if es.slots.len() == 2 {
        link(&es.slots[0], &es.slots[1]);
        return;
    }
    let f = es.slots[0].face;
    let a: Vec<&Slot> = es.side(f).collect();
    let b: Vec<&Slot> = es.slots.iter().filter(|s| s.face != f).collect();
    match branch {
        Branch::SameSide => {
            link(a[0], a[1]);
            link(b[0], b[1]);
        }
        Branch::Smooth | Branch::Switch => {
            let want_same = branch == Branch::Smooth;
            for x in &a {
                let y = b
                    .iter()
                    .find(|y| (y.pivot == x.pivot) == want_same)
                    .expect("opposite side has both pivots");
                link(x, y);
            }
        }
    }
}

/// All modes of a configuration under a rule set, in lexicographic order of
/// branch choices (edges ascending). Empty when some edge has an odd slot
/// count.
pub fn pairing_modes(solid: &PlatonicSolid, config: &Configuration, rules: RuleSet) -> Vec<PairingMode> {
    let slots = edge_slots(solid, config);
    if rules == RuleSet::CoveringWalk || slots.iter().any(|es| es.slots.len() % 2 == 1) {
        return Vec::new();
    }
    let n_ends = slots.iter().map(|es| es.slots.len()).sum::<usize>();
    let mut base = vec![usize::MAX; n_ends];
    let mut branching = Vec::new();
    for es in &slots {
        if es.slots.len() == 2 {
            pair_edge(es, Branch::Smooth, &mut base);
        } else {
            branching.push(es);
        }
    }
    let options = rules.branches();
    let total = options.len().pow(branching.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut digits = vec![0; branching.len()];
            for d in digits.iter_mut().rev() {
                *d = code % options.len();
                code /= options.len();
            }
            let mut partner = base.clone();
            let choices = branching
                .iter()
                .zip(&digits)
                .map(|(es, &d)| {
                    pair_edge(es, options[d], &mut partner);
                    (es.edge, options[d])
                })
                .collect();
            PairingMode { choices, partner }
        })
        .collect()
}

/// Cycles of patches under a mode. Each cycle starts at its smallest patch,
/// which is left through end 1; cycles are sorted by that patch.
pub fn cycle_decomposition(partner: &[usize]) -> Vec<Vec<usize>> {
    let n = partner.len() / 2;
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut exit = 2 * start + 1;
        loop {
            let p = exit / 2;
            if seen[p] {
                break;
            }
            seen[p] = true;
            cycle.push(p);
            let entry = partner[exit];
            exit = entry ^ 1;
        }
        cycles.push(cycle);
    }
    cycles
}

pub fn mode_cycles(solid: &PlatonicSolid, config: &Configuration, mode: &PairingMode) -> Result<Vec<Vec<usize>>> {
    let n = patches(solid, config).len();
    let ok = mode.partner.len() == 2 * n
        && mode
            .partner
            .iter()
            .enumerate()
            .all(|(i, &j)| j < 2 * n && mode.partner[j] == i && j / 2 != i / 2);
    if !ok {
        return Err(Error::InvalidMode(config.label()));
    }
    Ok(cycle_decomposition(&mode.partner))
}

#[derive(Debug, Clone, Serialize)]
pub struct Developability {
    pub developable: bool,
    pub mode_count: usize,
    /// Index of the first mode with a single cycle.
    pub witness: Option<usize>,
    /// Whether each mode develops the full surface.
    pub full_modes: Vec<bool>,
}

pub fn is_developable(solid: &PlatonicSolid, config: &Configuration, rules: RuleSet) -> Developability {
    if rules == RuleSet::CoveringWalk {
        return Developability {
            developable: walk_covers_all(solid, config),
            mode_count: 0,
            witness: None,
            full_modes: Vec::new(),
        };
    }
    let modes = pairing_modes(solid, config, rules);
    let full_modes: Vec<bool> = modes
        .iter()
        .map(|m| cycle_decomposition(&m.partner).len() == 1)
        .collect();
    let witness = full_modes.iter().position(|&f| f);
    Developability {
        developable: witness.is_some(),
        mode_count: modes.len(),
        witness,
        full_modes,
    }
}

/// Successors of each exit slot-end when any far-side slot may be entered.
/// State `x` means "leaving patch `x / 2` through end `x % 2`".
pub fn state_graph(solid: &PlatonicSolid, config: &Configuration) -> Vec<Vec<usize>> {
    let ps = patches(solid, config);
    let slots = edge_slots(solid, config);
    (0..2 * ps.len())
        .map(|x| {
            let p = &ps[x / 2];
            slots[p.edges[x % 2]]
                .slots
                .iter()
                .filter(|y| y.face != p.face)
                .map(|y| y.slot_end() ^ 1)
                .collect()
        })
        .collect()
}

/// True when some strongly connected component of the state graph with at
/// least one internal arc touches every patch.
pub fn walk_covers_all(solid: &PlatonicSolid, config: &Configuration) -> bool {
    let adj = state_graph(solid, config);
    let n_patches = adj.len() / 2;
    strongly_connected(&adj).into_iter().any(|comp| {
        let cyclic = comp.len() > 1 || adj[comp[0]].contains(&comp[0]);
        let mut hit = vec![false; n_patches];
        comp.iter().for_each(|&x| hit[x / 2] = true);
        cyclic && hit.iter().all(|&h| h)
    })
}

/// Tarjan's algorithm, iterative.
fn strongly_connected(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call = vec![(root, 0usize)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Cycles compared up to rotation and reversal.
pub fn same_cycle(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let n = a.len();
    let Some(k) = b.iter().position(|&x| x == a[0]) else {
        return false;
    };
    let fwd = (0..n).all(|i| a[i] == b[(k + i) % n]);
    let back = (0..n).all(|i| a[i] == b[(k + n - i) % n]);
    fwd || back
}
