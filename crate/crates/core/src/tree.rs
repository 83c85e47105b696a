//! Level-by-level reachability tree with predecessor links.
//!
//! An edge at level `i` is identified by the bit path `b_0 .. b_i` of the
//! reachable-state prefix it represents. Its label maps each RMT `r` of
//! cell `i` that can produce that prefix to the set of edges (same level)
//! holding the matching predecessor prefixes `x_0 .. x_i`. Those target sets
//! are the links: following a link from the edge of `y` lands on the edge of
//! some `x` with `F(x)` agreeing with `y` on the prefix.
//!
//! At the last level a link `y -> x` exists exactly when `F(x) = y`, so a
//! walk of length `m` from the edge of `D` to the edge of `S` witnesses
//! `F^m(S) = D`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::ca::{valid_rmts, Configuration, Rmt, Rule, RuleVector};
use crate::error::{Error, Result};

/// Largest automaton the bit-path edge identity can address.
pub const MAX_CELLS: usize = 128;

/// Default size cap for whole-tree enumeration.
pub const DEFAULT_TREE_CAP: usize = 16;

/// Identity of a tree edge: the bit path from the root, plus its level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    level: u32,
    // the path as a u128 split in two halves, keeping the identity at 24 bytes
    hi: u64,
    lo: u64,
}

impl EdgeId {
    #[inline]
    fn from_parts(level: u32, path: u128) -> Self {
        EdgeId { level, hi: (path >> 64) as u64, lo: path as u64 }
    }

    #[inline]
    fn path(self) -> u128 {
        ((self.hi as u128) << 64) | self.lo as u128
    }

    pub fn root(bit: u8) -> Self {
        EdgeId::from_parts(0, (bit & 1) as u128)
    }

    /// `index` is the path value with the root bit most significant.
    pub fn new(level: usize, index: u128) -> Result<Self> {
        if level >= MAX_CELLS || (level + 1 < 128 && index >> (level + 1) != 0) {
            return Err(Error::MalformedLevel(format!(
                "edge index {index} does not fit level {level}"
            )));
        }
        Ok(EdgeId::from_parts(level as u32, index))
    }

    /// Edge selected by the first `level + 1` cells of `c`.
    pub fn from_prefix(c: &Configuration, level: usize) -> Self {
        EdgeId::from_parts(level as u32, c.prefix_value(level))
    }

    #[inline]
    pub fn child(self, bit: u8) -> Self {
        EdgeId::from_parts(self.level + 1, (self.path() << 1) | (bit & 1) as u128)
    }

    pub fn parent(self) -> Option<Self> {
        (self.level > 0).then(|| EdgeId::from_parts(self.level - 1, self.path() >> 1))
    }

    #[inline]
    pub fn level(self) -> usize {
        self.level as usize
    }

    #[inline]
    pub fn index(self) -> u128 {
        self.path()
    }

    /// 0 for a 0-edge, 1 for a 1-edge.
    #[inline]
    pub fn bit(self) -> u8 {
        (self.lo & 1) as u8
    }

    pub fn bits(self) -> String {
        let path = self.path();
        (0..=self.level)
            .rev()
            .map(|k| if (path >> k) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}.{}", self.level, self.path())
    }
}

/// RMTs carried by an edge, each with its outgoing link targets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Label {
    // (rmt, target) records sorted by RMT, then target; nearly always short
    links: SmallVec<[(Rmt, EdgeId); 3]>,
}

impl Label {
    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn contains(&self, r: Rmt) -> bool {
        self.links.iter().any(|(k, _)| *k == r)
    }

    /// RMT keys in increasing order.
    pub fn rmts(&self) -> impl Iterator<Item = Rmt> + '_ {
        self.links
            .iter()
            .enumerate()
            .filter(|(i, (r, _))| *i == 0 || self.links[i - 1].0 != *r)
            .map(|(_, (r, _))| *r)
    }

    pub fn rmt_values(&self) -> Vec<u8> {
        self.rmts().map(Rmt::value).collect()
    }

    pub fn targets(&self, r: Rmt) -> impl Iterator<Item = EdgeId> + '_ {
        self.links.iter().filter(move |(k, _)| *k == r).map(|(_, t)| *t)
    }

    /// Every `(rmt, target)` link record.
    pub fn links(&self) -> impl Iterator<Item = (Rmt, EdgeId)> + '_ {
        self.links.iter().copied()
    }

    pub fn insert(&mut self, r: Rmt, target: EdgeId) {
        if let Err(pos) = self.links.binary_search(&(r, target)) {
            self.links.insert(pos, (r, target));
        }
    }

    /// Number of RMT keys carrying more than one target.
    pub fn multi_target_entries(&self) -> usize {
        self.rmts().filter(|&r| self.targets(r).nth(1).is_some()).count()
    }
}

/// Source and destination configurations whose prefixes are tracked per level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anchors {
    pub source: Configuration,
    pub dest: Configuration,
}

impl Anchors {
    pub fn new(source: Configuration, dest: Configuration) -> Self {
        Anchors { source, dest }
    }

    fn edges_at(&self, level: usize) -> (EdgeId, EdgeId) {
        (
            EdgeId::from_prefix(&self.source, level),
            EdgeId::from_prefix(&self.dest, level),
        )
    }
}

/// One level of the tree: surviving edges in increasing identity order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Level {
    index: usize,
    n: usize,
    edges: Vec<(EdgeId, Label)>,
    s_edge: Option<EdgeId>,
    d_edge: Option<EdgeId>,
}

impl Level {
    pub fn index(&self) -> usize {
        self.index
    }

    /// Size of the automaton the level belongs to.
    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn is_last(&self) -> bool {
        self.index + 1 == self.n
    }

    pub fn s_edge(&self) -> Option<EdgeId> {
        self.s_edge
    }

    pub fn d_edge(&self) -> Option<EdgeId> {
        self.d_edge
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Label)> + '_ {
        self.edges.iter().map(|(e, l)| (*e, l))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().map(|(e, _)| *e)
    }

    /// Number of stored edges (the surviving-label tally).
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn non_empty_count(&self) -> usize {
        self.edges.iter().filter(|(_, l)| !l.is_empty()).count()
    }

    fn position(&self, id: EdgeId) -> Option<usize> {
        self.edges.binary_search_by(|(e, _)| e.cmp(&id)).ok()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.position(id).is_some()
    }

    pub fn label(&self, id: EdgeId) -> Option<&Label> {
        self.position(id).map(|p| &self.edges[p].1)
    }

    /// Link records from stored edges that point at `target`.
    pub fn incoming(&self, target: EdgeId) -> Vec<(EdgeId, Rmt)> {
        self.incoming_iter(target).collect()
    }

    pub(crate) fn incoming_iter(&self, target: EdgeId) -> impl Iterator<Item = (EdgeId, Rmt)> + '_ {
        self.edges.iter().flat_map(move |(e, label)| {
            label.links().filter(move |(_, t)| *t == target).map(move |(r, _)| (*e, r))
        })
    }

    /// Label entries with more than one link target, summed over the level.
    pub fn multi_target_entries(&self) -> usize {
        self.edges.iter().map(|(_, l)| l.multi_target_entries()).sum()
    }

    fn with_anchors(index: usize, n: usize, anchors: Option<&Anchors>) -> Self {
        let (s_edge, d_edge) = match anchors {
            Some(a) => {
                let (s, d) = a.edges_at(index);
                (Some(s), Some(d))
            }
            None => (None, None),
        };
        Level { index, n, edges: Vec::new(), s_edge, d_edge }
    }

    fn is_anchor(&self, id: EdgeId) -> bool {
        self.s_edge == Some(id) || self.d_edge == Some(id)
    }

    // Keep a candidate if it carries RMTs or is one of the tracked prefixes.
    fn push_candidate(&mut self, id: EdgeId, label: Label) {
        if !label.is_empty() || self.is_anchor(id) {
            self.edges.push((id, label));
        }
    }
}

fn check_anchors(rv: &RuleVector, anchors: Option<&Anchors>) -> Result<()> {
    let n = rv.len();
    if n > MAX_CELLS {
        return Err(Error::SizeCapExceeded { n, cap: MAX_CELLS });
    }
    if let Some(a) = anchors {
        for c in [&a.source, &a.dest] {
            if c.len() != n {
                return Err(Error::LengthMismatch { expected: n, found: c.len() });
            }
        }
    }
    Ok(())
}

/// Level 0: RMTs of cell 0 split between the 0-edge and 1-edge by their
/// output, each linked to the root edge named by its middle bit.
pub fn build_root(rv: &RuleVector, anchors: Option<&Anchors>) -> Result<Level> {
    check_anchors(rv, anchors)?;
    let n = rv.len();
    let rule = rv.rule(0);
    let mut labels = [Label::default(), Label::default()];
    for r in valid_rmts(0, n)? {
        labels[rule.apply(r) as usize].insert(r, EdgeId::root(r.middle()));
    }
    let mut level = Level::with_anchors(0, n, anchors);
    let [zero, one] = labels;
    level.push_candidate(EdgeId::root(0), zero);
    level.push_candidate(EdgeId::root(1), one);
    Ok(level)
}

/// Target of a child RMT's link given one target of its parent RMT's link.
#[inline]
pub fn link_target(parent_target: EdgeId, child_rmt: Rmt) -> EdgeId {
    parent_target.child(child_rmt.middle())
}

/// Builds level `prev.index() + 1` from the surviving edges of `prev`.
pub fn expand_level(prev: &Level, rule: Rule, anchors: Option<&Anchors>) -> Result<Level> {
    let n = prev.n;
    let i = prev.index + 1;
    if i >= n {
        return Err(Error::LevelOutOfRange { level: i, n });
    }
    if let Some(a) = anchors {
        if a.source.len() != n || a.dest.len() != n {
            return Err(Error::MalformedLevel("anchors do not match the level's size".into()));
        }
    }
    if prev.edges.iter().any(|(e, _)| e.level() != prev.index) {
        return Err(Error::MalformedLevel(format!(
            "level {} stores edges of another level",
            prev.index
        )));
    }
    let last = i + 1 == n;
    let mut level = Level::with_anchors(i, n, anchors);

    for (parent, label) in &prev.edges {
        let mut children = [Label::default(), Label::default()];
        for (r, t) in label.links() {
            let (even, odd) = r.children();
            let kids: &[Rmt] = if last { &[even] } else { &[even, odd] };
            for &s in kids {
                children[rule.apply(s) as usize].insert(s, link_target(t, s));
            }
        }
        let [zero, one] = children;
        level.push_candidate(parent.child(0), zero);
        level.push_candidate(parent.child(1), one);
    }

    // Tracked prefixes stay addressable even when their parent carried no RMTs.
    for id in [level.s_edge, level.d_edge].into_iter().flatten() {
        let parent_kept = id.parent().is_some_and(|p| prev.contains(p));
        if parent_kept && !level.contains(id) {
            let pos = level.edges.partition_point(|(e, _)| *e < id);
            level.edges.insert(pos, (id, Label::default()));
        }
    }
    Ok(level)
}

/// Outcome of a walk search from the D-prefix edge to the S-prefix edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSearchResult {
    pub exists: bool,
    /// Fewest links on a walk from `d_edge` to `s_edge`.
    pub min_length: Option<u64>,
    /// Edges lying on at least one such walk (plus both endpoints).
    pub survivors: BTreeSet<EdgeId>,
    /// One shortest walk, `d_edge` first.
    pub walk: Option<Vec<EdgeId>>,
}

// Adjacency in compressed rows: node `u`'s neighbours are
// `targets[offsets[u]..offsets[u + 1]]`.
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Csr {
    fn from_arcs(k: usize, arcs: &[(usize, usize)]) -> Self {
        let mut offsets = vec![0usize; k + 1];
        for &(u, _) in arcs {
            offsets[u + 1] += 1;
        }
        for u in 0..k {
            offsets[u + 1] += offsets[u];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; arcs.len()];
        for &(u, v) in arcs {
            targets[fill[u]] = v;
            fill[u] += 1;
        }
        Csr { offsets, targets }
    }

    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    fn neighbours(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }
}

struct LinkGraph {
    forward: Csr,
    backward: Csr,
}

impl LinkGraph {
    fn new(level: &Level) -> Self {
        let k = level.edges.len();
        let mut arcs = Vec::new();
        for (u, (_, label)) in level.edges.iter().enumerate() {
            for (_, t) in label.links() {
                // dangling targets are not traversable
                if let Some(v) = level.position(t) {
                    arcs.push((u, v));
                }
            }
        }
        let forward = Csr::from_arcs(k, &arcs);
        for arc in &mut arcs {
            *arc = (arc.1, arc.0);
        }
        let backward = Csr::from_arcs(k, &arcs);
        LinkGraph { forward, backward }
    }
}

const UNSEEN: usize = usize::MAX;

// BFS returning (distance, next-hop toward the source) per node.
fn bfs(adj: &Csr, start: usize) -> (Vec<usize>, Vec<usize>) {
    let mut dist = vec![UNSEEN; adj.len()];
    let mut via = vec![UNSEEN; adj.len()];
    let mut queue = VecDeque::from([start]);
    dist[start] = 0;
    while let Some(u) = queue.pop_front() {
        for &v in adj.neighbours(u) {
            if dist[v] == UNSEEN {
                dist[v] = dist[u] + 1;
                via[v] = u;
                queue.push_back(v);
            }
        }
    }
    (dist, via)
}

/// Searches the level's link graph for a walk from `d_edge` to `s_edge`.
/// With `reflexive`, `d_edge == s_edge` is a walk of length 0; otherwise
/// the walk must use at least one link.
pub fn path_search(level: &Level, reflexive: bool) -> PathSearchResult {
    let mut none = PathSearchResult {
        exists: false,
        min_length: None,
        survivors: BTreeSet::new(),
        walk: None,
    };
    let (Some(d_id), Some(s_id)) = (level.d_edge, level.s_edge) else {
        return none;
    };
    none.survivors.extend([d_id, s_id]);
    let (Some(d), Some(s)) = (level.position(d_id), level.position(s_id)) else {
        return none;
    };

    let graph = LinkGraph::new(level);
    // distance to s along forward links, with the next hop toward s
    let (to_s, next) = bfs(&graph.backward, s);
    let (from_d, _) = bfs(&graph.forward, d);

    let first_hop = if d == s && reflexive {
        Some((0usize, d))
    } else if d == s {
        graph.forward
            .neighbours(d)
            .iter()
            .filter(|&&u| to_s[u] != UNSEEN)
            .map(|&u| (to_s[u] + 1, u))
            .min()
    } else {
        (to_s[d] != UNSEEN).then_some((to_s[d], d))
    };

    let Some((length, mut cursor)) = first_hop else {
        return none;
    };

    let mut walk = vec![d_id];
    if d == s && !reflexive {
        walk.push(level.edges[cursor].0);
    }
    while cursor != s {
        cursor = next[cursor];
        walk.push(level.edges[cursor].0);
    }

    let mut survivors: BTreeSet<EdgeId> = level
        .edges
        .iter()
        .enumerate()
        .filter(|(u, _)| from_d[*u] != UNSEEN && to_s[*u] != UNSEEN)
        .map(|(_, (e, _))| *e)
        .collect();
    survivors.extend([d_id, s_id]);

    PathSearchResult {
        exists: true,
        min_length: Some(length as u64),
        survivors,
        walk: Some(walk),
    }
}

/// Drops every edge outside `survivors`; the tracked prefixes always stay.
/// Links into dropped edges remain recorded but are no longer traversable.
pub fn prune(level: &Level, survivors: &BTreeSet<EdgeId>) -> Level {
    prune_owned(level.clone(), survivors)
}

pub(crate) fn prune_owned(mut level: Level, survivors: &BTreeSet<EdgeId>) -> Level {
    let (s, d) = (level.s_edge, level.d_edge);
    level
        .edges
        .retain(|(e, _)| survivors.contains(e) || Some(*e) == s || Some(*e) == d);
    level
}

/// Every level of the unpruned tree.
#[derive(Debug, Clone)]
pub struct FullTree {
    pub levels: Vec<Level>,
    /// Non-empty edges at the last level, i.e. the number of reachable states.
    pub leaf_count: usize,
}

impl FullTree {
    /// The reachable configurations, read off the non-empty last-level edges.
    pub fn reachable_states(&self) -> Vec<Configuration> {
        let last = self.levels.last().expect("tree has at least one level");
        let n = last.cells();
        last.edges()
            .filter(|(_, l)| !l.is_empty())
            .map(|(e, _)| Configuration::from_index(e.index(), n))
            .collect()
    }
}

pub fn enumerate_full_tree(rv: &RuleVector, cap: usize) -> Result<FullTree> {
    let n = rv.len();
    if n > cap {
        return Err(Error::SizeCapExceeded { n, cap });
    }
    let mut levels = vec![build_root(rv, None)?];
    for i in 1..n {
        let next = expand_level(&levels[i - 1], rv.rule(i), None)?;
        levels.push(next);
    }
    let leaf_count = levels[n - 1].non_empty_count();
    Ok(FullTree { levels, leaf_count })
}

/// Graphviz rendering: one node per stored edge (bits + RMT label), solid
/// tree arcs from parent to child, dashed link arcs annotated `r→`.
pub fn to_dot(levels: &[Level]) -> String {
    let mut out = String::from("digraph reachability_tree {\n  rankdir=TB;\n  node [shape=box];\n");
    out.push_str("  \"root\" [label=\"root\"];\n");
    for level in levels {
        for (e, label) in level.edges() {
            let rmts: Vec<String> = label.rmt_values().iter().map(u8::to_string).collect();
            let style = if label.is_empty() { ", style=dotted" } else { "" };
            let _ = writeln!(
                out,
                "  \"{}\" [label=\"{}\\n{{{}}}\"{}];",
                e.bits(),
                e,
                rmts.join(","),
                style
            );
            let parent = e.parent().map_or_else(|| "root".to_string(), EdgeId::bits);
            let _ = writeln!(out, "  \"{}\" -> \"{}\";", parent, e.bits());
        }
        for (e, label) in level.edges() {
            for (r, t) in label.links() {
                if level.contains(t) {
                    let _ = writeln!(
                        out,
                        "  \"{}\" -> \"{}\" [style=dashed, label=\"{}→\"];",
                        e.bits(),
                        t.bits(),
                        r
                    );
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> RuleVector {
        "9,170,195,80".parse().unwrap()
    }

    fn e(level: usize, index: u128) -> EdgeId {
        EdgeId::new(level, index).unwrap()
    }

    fn anchors(s: &str, d: &str) -> Anchors {
        Anchors::new(s.parse().unwrap(), d.parse().unwrap())
    }

    fn levels_with(rv: &RuleVector, a: Option<&Anchors>) -> Vec<Level> {
        let mut levels = vec![build_root(rv, a).unwrap()];
        for i in 1..rv.len() {
            let next = expand_level(&levels[i - 1], rv.rule(i), a).unwrap();
            levels.push(next);
        }
        levels
    }

    #[test]
    fn edge_identity() {
        let x = e(1, 2);
        assert_eq!(x.bits(), "10");
        assert_eq!(x.child(1), e(2, 5));
        assert_eq!(e(2, 5).parent(), Some(x));
        assert_eq!(EdgeId::root(1).parent(), None);
        assert!(EdgeId::new(1, 4).is_err());
        assert_eq!(x.to_string(), "E1.2");
    }

    #[test]
    fn root_labels_and_links() {
        let root = build_root(&fixture(), None).unwrap();
        let l0 = root.label(EdgeId::root(0)).unwrap();
        let l1 = root.label(EdgeId::root(1)).unwrap();
        assert_eq!(l0.rmt_values(), vec![1, 2]);
        assert_eq!(l1.rmt_values(), vec![0, 3]);
        let r = |v| Rmt::new(v).unwrap();
        assert_eq!(l0.targets(r(2)).collect::<Vec<_>>(), [EdgeId::root(1)]);
        assert_eq!(l0.targets(r(1)).collect::<Vec<_>>(), [EdgeId::root(0)]);
        assert_eq!(l1.targets(r(0)).collect::<Vec<_>>(), [EdgeId::root(0)]);
        // self link iff self-replicating
        for (edge, label) in root.edges() {
            for (rm, t) in label.links() {
                assert_eq!(t == edge, fixture().rule(0).is_self_replicating(rm));
            }
        }
    }

    #[test]
    fn link_target_examples() {
        let r = |v| Rmt::new(v).unwrap();
        assert_eq!(link_target(e(0, 0), r(0)), e(1, 0));
        assert_eq!(link_target(e(0, 0), r(1)), e(1, 0));
        assert_eq!(link_target(e(0, 0), r(2)), e(1, 1));
    }

    #[test]
    fn fixture_levels() {
        let levels = levels_with(&fixture(), None);
        let one: Vec<Vec<u8>> = (0..4)
            .map(|j| levels[1].label(e(1, j)).unwrap().rmt_values())
            .collect();
        assert_eq!(one, vec![vec![2, 4], vec![3, 5], vec![0, 6], vec![1, 7]]);
        // E3.1 is a non-reachable edge, dropped at birth
        assert!(!levels[3].contains(e(3, 1)));
        let r = |v| Rmt::new(v).unwrap();
        assert_eq!(levels[1].label(e(1, 1)).unwrap().targets(r(5)).collect::<Vec<_>>(), [e(1, 2)]);
        assert_eq!(levels[2].label(e(2, 2)).unwrap().targets(r(2)).collect::<Vec<_>>(), [e(2, 5)]);
        assert_eq!(levels[3].label(e(3, 5)).unwrap().targets(r(4)).collect::<Vec<_>>(), [e(3, 10)]);
        assert_eq!(levels[1].label(e(1, 2)).unwrap().targets(r(0)).collect::<Vec<_>>(), [e(1, 0)]);
        assert_eq!(levels[1].label(e(1, 3)).unwrap().targets(r(1)).collect::<Vec<_>>(), [e(1, 0)]);
    }

    #[test]
    fn fixture_leaf_count() {
        let tree = enumerate_full_tree(&fixture(), DEFAULT_TREE_CAP).unwrap();
        assert_eq!(tree.leaf_count, 8);
        let zero = RuleVector::uniform(Rule::new(0), 4).unwrap();
        assert_eq!(enumerate_full_tree(&zero, DEFAULT_TREE_CAP).unwrap().leaf_count, 1);
        let big = RuleVector::uniform(Rule::new(0), 17).unwrap();
        assert_eq!(
            enumerate_full_tree(&big, DEFAULT_TREE_CAP).unwrap_err(),
            Error::SizeCapExceeded { n: 17, cap: 16 }
        );
    }

    #[test]
    fn leaf_paths_of_fixture() {
        let a = anchors("0000", "0101");
        let leaf = levels_with(&fixture(), Some(&a)).pop().unwrap();
        let res = path_search(&leaf, true);
        assert!(res.exists);
        assert_eq!(res.min_length, Some(2));
        assert_eq!(res.walk.unwrap(), vec![e(3, 5), e(3, 10), e(3, 0)]);

        let a = anchors("0000", "1101");
        let leaf = levels_with(&fixture(), Some(&a)).pop().unwrap();
        assert!(!path_search(&leaf, true).exists);
    }

    #[test]
    fn reflexive_search() {
        let a = anchors("0110", "0110");
        let root = build_root(&fixture(), Some(&a)).unwrap();
        let res = path_search(&root, true);
        assert!(res.exists);
        assert_eq!(res.min_length, Some(0));
        assert_eq!(res.walk.unwrap(), vec![EdgeId::root(0)]);
    }

    #[test]
    fn strict_search_needs_a_cycle() {
        // 0000 -> 1010 -> 0101 -> 0000 is a 3-cycle of the fixture
        let a = anchors("0000", "0000");
        let leaf = levels_with(&fixture(), Some(&a)).pop().unwrap();
        let res = path_search(&leaf, false);
        assert_eq!(res.min_length, Some(3));
        let walk = res.walk.unwrap();
        assert_eq!(walk.first(), walk.last());
        assert_eq!(walk.len(), 4);
    }

    #[test]
    fn pruning_keeps_walk_survivors() {
        let rv = fixture();
        let a = anchors("1010", "0000");
        let root = build_root(&rv, Some(&a)).unwrap();
        let res = path_search(&root, true);
        let root = prune(&root, &res.survivors);
        assert_eq!(root.len(), 2);

        // E1.3 lies on the closed walk E1.2 -> E1.3 -> E1.0 -> E1.2, so a
        // walk-based survivor set keeps it; only simple paths would drop it.
        let one = expand_level(&root, rv.rule(1), Some(&a)).unwrap();
        let res = path_search(&one, true);
        let one = prune(&one, &res.survivors);
        assert_eq!(one.len(), 4);

        let two = expand_level(&one, rv.rule(2), Some(&a)).unwrap();
        let res = path_search(&two, true);
        let two = prune(&two, &res.survivors);
        assert_eq!(two.edge_ids().collect::<Vec<_>>(), vec![e(2, 0), e(2, 2), e(2, 5)]);

        let three = expand_level(&two, rv.rule(3), Some(&a)).unwrap();
        let res = path_search(&three, true);
        assert!(res.exists);
        assert_eq!(res.min_length, Some(2));
    }

    #[test]
    fn pruning_with_everything_surviving_is_identity() {
        let a = anchors("0000", "0101");
        let root = build_root(&fixture(), Some(&a)).unwrap();
        let all: BTreeSet<EdgeId> = root.edge_ids().collect();
        assert_eq!(prune(&root, &all), root);
    }

    #[test]
    fn expand_rejects_bad_levels() {
        let levels = levels_with(&fixture(), None);
        assert!(matches!(
            expand_level(&levels[3], Rule::new(0), None),
            Err(Error::LevelOutOfRange { level: 4, n: 4 })
        ));
    }

    #[test]
    fn single_cell_tree() {
        let rv = RuleVector::from_codes(&[0b0000_0100]).unwrap();
        let tree = enumerate_full_tree(&rv, DEFAULT_TREE_CAP).unwrap();
        assert_eq!(tree.levels.len(), 1);
        // RMTs {0,2}: rule outputs 0 and 1, so both 0 and 1 are reachable
        assert_eq!(tree.leaf_count, 2);
    }

    #[test]
    fn dot_export_mentions_links() {
        let levels = levels_with(&fixture(), None);
        let dot = to_dot(&levels);
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("\"0\" -> \"1\" [style=dashed, label=\"2→\"]"));
        assert!(dot.contains("\"0101\""));
    }
}
