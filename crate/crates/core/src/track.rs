//! Track assignments and the separator-tree track layouts.
//!
//! The pipeline goes through four key types:
//! [`TrackKey`] `(d, i, k)` for the layout `T`, [`LayerKey`] `(i, k)` for
//! one depth of it, [`WrappedKey`] `(i mod 3, k)` after wrapping, and
//! [`FinalKey`] `(d, i mod 3, k)` for the composed layout. Each key type is
//! ordered lexicographically, and that order is the track order.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Layering};
use crate::separator::SeparatorTree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrackError {
    #[error("vertex {0} appears in more than one track position")]
    DuplicateVertex(usize),
    #[error("vertex {vertex} is out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("track {0} is empty")]
    EmptyTrack(String),
    #[error("node {node} has {count} vertices in layer {layer}, more than ell = {ell}")]
    LayerOverfull { node: usize, layer: usize, count: usize, ell: usize },
    #[error("edge ({u}, {v}) spans layers {lu} and {lv}")]
    LayerGap { u: usize, v: usize, lu: usize, lv: usize },
    #[error("edge ({u}, {v}) has span {span} in its depth layout, limit {limit}")]
    SpanTooLarge { u: usize, v: usize, span: usize, limit: usize },
    #[error("depth {0} has no wrapped layout, or coverage differs")]
    DepthMismatch(usize),
    #[error("{0} X-crossings")]
    XCrossings(usize),
    #[error("separator tree and tree layout disagree: {0}")]
    TreeLayout(String),
}

/// Track of the layout `T`: depth of the separator node (root = 1),
/// layer, and label within the node's layer (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrackKey {
    pub depth: usize,
    pub layer: usize,
    pub slot: usize,
}

/// Track of a layered layout such as one depth of `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LayerKey {
    pub layer: usize,
    pub slot: usize,
}

/// Track of a wrapped layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WrappedKey {
    pub residue: usize,
    pub slot: usize,
}

/// Track of the final layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FinalKey {
    pub depth: usize,
    pub residue: usize,
    pub slot: usize,
}

/// Vertices distributed over totally ordered, non-empty tracks. Tracks are
/// indexed `0..track_count()` in key order; vertices outside the layout
/// have no track.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackAssignment<K> {
    n: usize,
    keys: Vec<K>,
    tracks: Vec<Vec<usize>>,
    track_of: Vec<Option<usize>>,
    position_of: Vec<usize>,
}

impl<K: Ord + Copy + Debug> TrackAssignment<K> {
    /// Builds from per-track vertex sequences over the universe `0..n`.
    pub fn from_tracks(n: usize, tracks: BTreeMap<K, Vec<usize>>) -> Result<Self, TrackError> {
        let mut track_of = vec![None; n];
        let mut position_of = vec![usize::MAX; n];
        let mut keys = Vec::with_capacity(tracks.len());
        let mut seqs = Vec::with_capacity(tracks.len());
        for (idx, (key, seq)) in tracks.into_iter().enumerate() {
            if seq.is_empty() {
                return Err(TrackError::EmptyTrack(format!("{key:?}")));
            }
            for (pos, &v) in seq.iter().enumerate() {
                if v >= n {
                    return Err(TrackError::VertexOutOfRange { vertex: v, n });
                }
                if track_of[v].replace(idx).is_some() {
                    return Err(TrackError::DuplicateVertex(v));
                }
                position_of[v] = pos;
            }
            keys.push(key);
            seqs.push(seq);
        }
        Ok(TrackAssignment { n, keys, tracks: seqs, track_of, position_of })
    }

    /// Size of the vertex universe.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn track_count(&self) -> usize {
        self.keys.len()
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn tracks(&self) -> &[Vec<usize>] {
        &self.tracks
    }

    pub fn track(&self, v: usize) -> Option<usize> {
        self.track_of.get(v).copied().flatten()
    }

    pub fn key(&self, v: usize) -> Option<K> {
        self.track(v).map(|t| self.keys[t])
    }

    /// Rank within the vertex's track.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.track(v).map(|_| self.position_of[v])
    }

    pub fn contains(&self, v: usize) -> bool {
        self.track(v).is_some()
    }

    /// Covered vertices, ascending.
    pub fn vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.contains(v)).collect()
    }

    pub fn len(&self) -> usize {
        self.tracks.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    /// Edges of `g` with both endpoints in the layout.
    pub fn covered_edges<'g>(&'g self, g: &'g Graph) -> impl Iterator<Item = (usize, usize)> + 'g {
        g.edges().iter().copied().filter(|&(u, v)| self.contains(u) && self.contains(v))
    }

    /// Re-keys every track, keeping each track's order.
    pub fn map_keys<J: Ord + Copy + Debug>(&self, f: impl Fn(K) -> J) -> Result<TrackAssignment<J>, TrackError> {
        let tracks = self.keys.iter().zip(&self.tracks).map(|(&k, s)| (f(k), s.clone())).collect();
        TrackAssignment::from_tracks(self.n, tracks)
    }

    pub fn to_map(&self) -> BTreeMap<K, Vec<usize>> {
        self.keys.iter().copied().zip(self.tracks.iter().cloned()).collect()
    }
}

/// Two edges between the same pair of tracks whose endpoints interleave in
/// opposite orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct XCrossing {
    pub first: (usize, usize),
    pub second: (usize, usize),
}

/// Edges of `g` whose endpoints share a track.
pub fn coloring_violations<K: Ord + Copy + Debug>(g: &Graph, t: &TrackAssignment<K>) -> Vec<(usize, usize)> {
    t.covered_edges(g).filter(|&(u, v)| t.track(u) == t.track(v)).collect()
}

/// Every X-crossing among the covered edges of `g`, by exhaustive scan of
/// the edge pairs on each pair of tracks.
pub fn verify_no_xcrossing<K: Ord + Copy + Debug>(g: &Graph, t: &TrackAssignment<K>) -> Vec<XCrossing> {
    // Edges oriented from the lower track, grouped by track pair.
    let mut groups: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for (u, v) in t.covered_edges(g) {
        let (tu, tv) = (t.track(u).unwrap(), t.track(v).unwrap());
        if tu == tv {
            continue;
        }
        let (a, b) = if tu < tv { (u, v) } else { (v, u) };
        groups.entry((tu.min(tv), tu.max(tv))).or_default().push((a, b));
    }
    let mut out = Vec::new();
    let pos = |v: usize| t.position_of[v];
    for edges in groups.values() {
        for (i, &(a1, b1)) in edges.iter().enumerate() {
            for &(a2, b2) in &edges[i + 1..] {
                let forward = pos(a1) < pos(a2) && pos(b2) < pos(b1);
                let backward = pos(a2) < pos(a1) && pos(b1) < pos(b2);
                if forward || backward {
                    let e1 = (a1.min(b1), a1.max(b1));
                    let e2 = (a2.min(b2), a2.max(b2));
                    out.push(XCrossing { first: e1.min(e2), second: e1.max(e2) });
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Whether `t` is a proper track layout of the covered part of `g`.
pub fn is_track_layout<K: Ord + Copy + Debug>(g: &Graph, t: &TrackAssignment<K>) -> bool {
    coloring_violations(g, t).is_empty() && verify_no_xcrossing(g, t).is_empty()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpanStats {
    pub max_span: usize,
    /// Span → edge count.
    pub histogram: BTreeMap<usize, usize>,
}

/// Spans of the covered edges under the track ranks given by `rank`.
pub fn span_stats<K: Ord + Copy + Debug>(
    g: &Graph,
    t: &TrackAssignment<K>,
    rank: impl Fn(&K) -> usize,
) -> EdgeSpanStats {
    let mut stats = EdgeSpanStats::default();
    for (u, v) in t.covered_edges(g) {
        let (a, b) = (rank(&t.key(u).unwrap()), rank(&t.key(v).unwrap()));
        let span = a.abs_diff(b);
        stats.max_span = stats.max_span.max(span);
        *stats.histogram.entry(span).or_insert(0) += 1;
    }
    stats
}

/// Rank of a track in the flat order `0..track_count()`.
pub fn flat_rank<K: Ord + Copy + Debug>(t: &TrackAssignment<K>) -> impl Fn(&K) -> usize + '_ {
    move |k| t.keys.binary_search(k).expect("key of the layout")
}

/// Left-to-right order of separator-tree nodes on each depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeTrackLayout {
    /// `levels[j]` holds the nodes at depth `j + 1`.
    pub levels: Vec<Vec<usize>>,
    /// Index of each node within its level.
    pub position: Vec<usize>,
}

/// Level-by-level drawing of the separator tree: children follow their
/// parents' order, and siblings are sorted by the smallest vertex in their
/// subtrees.
pub fn tree_track_layout(s: &SeparatorTree) -> TreeTrackLayout {
    let m = s.nodes.len();
    let mut min_vertex = vec![usize::MAX; m];
    // Nodes are created parent-first, so a reverse sweep sees children first.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&x| std::cmp::Reverse(s.nodes[x].depth));
    for &x in &order {
        let own = s.nodes[x].vertices.iter().copied().min().unwrap_or(usize::MAX);
        let below = s.nodes[x].children.iter().map(|&c| min_vertex[c]).min().unwrap_or(usize::MAX);
        min_vertex[x] = own.min(below);
    }
    let mut levels = Vec::new();
    let mut position = vec![0; m];
    let mut current: Vec<usize> = s.root().into_iter().collect();
    while !current.is_empty() {
        for (j, &x) in current.iter().enumerate() {
            position[x] = j;
        }
        let mut next = Vec::new();
        for &x in &current {
            let mut kids = s.nodes[x].children.clone();
            kids.sort_by_key(|&c| (min_vertex[c], c));
            next.extend(kids);
        }
        levels.push(std::mem::replace(&mut current, next));
    }
    TreeTrackLayout { levels, position }
}

/// Checks that every node sits once on its own level and that no two
/// parent-child edges between consecutive levels cross.
pub fn verify_tree_track_layout(s: &SeparatorTree, ts: &TreeTrackLayout) -> Vec<String> {
    let mut out = Vec::new();
    let mut seen = vec![0usize; s.nodes.len()];
    for (j, level) in ts.levels.iter().enumerate() {
        for (p, &x) in level.iter().enumerate() {
            if x >= s.nodes.len() {
                out.push(format!("unknown node {x}"));
                continue;
            }
            seen[x] += 1;
            if s.nodes[x].depth != j + 1 {
                out.push(format!("node {x} at depth {} drawn on level {}", s.nodes[x].depth, j + 1));
            }
            if ts.position[x] != p {
                out.push(format!("node {x} position mismatch"));
            }
        }
    }
    for (x, &c) in seen.iter().enumerate() {
        if c != 1 {
            out.push(format!("node {x} drawn {c} times"));
        }
    }
    for level in ts.levels.iter().skip(1) {
        let edges: Vec<(usize, usize)> = level
            .iter()
            .filter_map(|&c| s.nodes.get(c).and_then(|n| n.parent).map(|p| (ts.position[p], ts.position[c])))
            .collect();
        for (i, &(p1, c1)) in edges.iter().enumerate() {
            for &(p2, c2) in &edges[i + 1..] {
                if (p1 < p2 && c2 < c1) || (p2 < p1 && c1 < c2) {
                    out.push(format!("tree edges cross between levels at positions {c1} and {c2}"));
                }
            }
        }
    }
    out
}

/// The layout `T`: each vertex goes to `(depth of its node, layer, label)`,
/// and each track is ordered by the nodes' left-to-right positions.
pub fn assign_tracks(
    s: &SeparatorTree,
    l: &Layering,
    ts: &TreeTrackLayout,
) -> Result<TrackAssignment<TrackKey>, TrackError> {
    let n = s.vertex_node.len();
    if l.len() != n {
        return Err(TrackError::TreeLayout(format!("layering has {} vertices, tree {n}", l.len())));
    }
    if ts.position.len() != s.nodes.len() {
        return Err(TrackError::TreeLayout("node count differs".into()));
    }
    let mut tracks: BTreeMap<TrackKey, Vec<(usize, usize)>> = BTreeMap::new();
    for (id, node) in s.nodes.iter().enumerate() {
        let mut by_layer: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &v in &node.vertices {
            by_layer.entry(l.layer(v)).or_default().push(v);
        }
        for (layer, mut vs) in by_layer {
            if vs.len() > s.ell {
                return Err(TrackError::LayerOverfull { node: id, layer, count: vs.len(), ell: s.ell });
            }
            vs.sort_unstable();
            for (k, v) in vs.into_iter().enumerate() {
                let key = TrackKey { depth: node.depth, layer, slot: k + 1 };
                tracks.entry(key).or_default().push((ts.position[id], v));
            }
        }
    }
    let tracks = tracks
        .into_iter()
        .map(|(k, mut seq)| {
            seq.sort_unstable();
            (k, seq.into_iter().map(|(_, v)| v).collect())
        })
        .collect();
    TrackAssignment::from_tracks(n, tracks)
}

/// The tracks of `T` at one depth, re-keyed by `(layer, slot)`. Only
/// [`extract_depth_layout`] creates these, so wrapping in the pipeline
/// always sees a whole depth at once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthLayout {
    depth: usize,
    layout: TrackAssignment<LayerKey>,
}

/// A wrapped depth layout, ready for [`compose_final`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrappedDepth {
    depth: usize,
    layout: TrackAssignment<WrappedKey>,
}

impl DepthLayout {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn layout(&self) -> &TrackAssignment<LayerKey> {
        &self.layout
    }

    pub fn wrap(&self, g: &Graph) -> Result<WrappedDepth, TrackError> {
        Ok(WrappedDepth { depth: self.depth, layout: wrap(g, &self.layout)? })
    }
}

impl WrappedDepth {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn layout(&self) -> &TrackAssignment<WrappedKey> {
        &self.layout
    }
}

/// Restricts `T` to depth `d` and checks that every edge inside the depth
/// spans at most `2ell - 1` tracks in `(layer, slot)` order.
pub fn extract_depth_layout(
    g: &Graph,
    t: &TrackAssignment<TrackKey>,
    d: usize,
    ell: usize,
) -> Result<DepthLayout, TrackError> {
    let tracks: BTreeMap<LayerKey, Vec<usize>> = t
        .keys()
        .iter()
        .zip(t.tracks())
        .filter(|(k, _)| k.depth == d)
        .map(|(k, seq)| (LayerKey { layer: k.layer, slot: k.slot }, seq.clone()))
        .collect();
    let layout = TrackAssignment::from_tracks(t.universe(), tracks)?;
    let rank = |k: &LayerKey| k.layer * ell + k.slot - 1;
    let limit = (2 * ell).saturating_sub(1);
    for (u, v) in layout.covered_edges(g) {
        let span = rank(&layout.key(u).unwrap()).abs_diff(rank(&layout.key(v).unwrap()));
        if span > limit {
            return Err(TrackError::SpanTooLarge { u, v, span, limit });
        }
    }
    Ok(DepthLayout { depth: d, layout })
}

/// Wraps a layered layout onto tracks `(layer mod 3, slot)`. Within a new
/// track, vertices are ordered by layer, and vertices of one layer keep
/// their old order.
pub fn wrap(g: &Graph, t: &TrackAssignment<LayerKey>) -> Result<TrackAssignment<WrappedKey>, TrackError> {
    for (u, v) in t.covered_edges(g) {
        let (lu, lv) = (t.key(u).unwrap().layer, t.key(v).unwrap().layer);
        if lu.abs_diff(lv) > 1 {
            return Err(TrackError::LayerGap { u, v, lu, lv });
        }
    }
    // Keys are sorted by layer, so appending track by track realises both rules.
    let mut tracks: BTreeMap<WrappedKey, Vec<usize>> = BTreeMap::new();
    for (k, seq) in t.keys().iter().zip(t.tracks()) {
        tracks.entry(WrappedKey { residue: k.layer % 3, slot: k.slot }).or_default().extend_from_slice(seq);
    }
    TrackAssignment::from_tracks(t.universe(), tracks)
}

/// A broken wrapping guarantee.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WrapViolation {
    TooManyTracks {
        tracks: usize,
        limit: usize,
    },
    Coverage(usize),
    WrongTrack(usize),
    /// Rule (1): a lower layer must come first.
    LayerOrder(usize, usize),
    /// Rule (2): one layer keeps its original order.
    TieOrder(usize, usize),
    /// Same track, different layers less than 3 apart.
    LayerGap(usize, usize),
    XCrossing(XCrossing),
}

/// Checks a wrapped layout against the layout it came from.
pub fn check_wrap(
    g: &Graph,
    original: &TrackAssignment<LayerKey>,
    wrapped: &TrackAssignment<WrappedKey>,
    ell: usize,
) -> Vec<WrapViolation> {
    let mut out = Vec::new();
    if wrapped.track_count() > 3 * ell {
        out.push(WrapViolation::TooManyTracks { tracks: wrapped.track_count(), limit: 3 * ell });
    }
    for v in 0..original.universe().max(wrapped.universe()) {
        if original.contains(v) != wrapped.contains(v) {
            out.push(WrapViolation::Coverage(v));
        }
    }
    for v in original.vertices() {
        let (o, w) = (original.key(v).unwrap(), wrapped.key(v));
        if w != Some(WrappedKey { residue: o.layer % 3, slot: o.slot }) {
            out.push(WrapViolation::WrongTrack(v));
        }
    }
    for seq in wrapped.tracks() {
        for pair in seq.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let (Some(ka), Some(kb)) = (original.key(a), original.key(b)) else { continue };
            if ka.layer > kb.layer {
                out.push(WrapViolation::LayerOrder(a, b));
            } else if ka.layer == kb.layer {
                if original.position(a) > original.position(b) {
                    out.push(WrapViolation::TieOrder(a, b));
                }
            } else if kb.layer < ka.layer + 3 {
                out.push(WrapViolation::LayerGap(a, b));
            }
        }
    }
    out.extend(verify_no_xcrossing(g, wrapped).into_iter().map(WrapViolation::XCrossing));
    out
}

/// Final layout: vertex `v` at depth `d` goes to `(d, i mod 3, k)` with the
/// order of its wrapped depth layout.
pub fn compose_final(
    t: &TrackAssignment<TrackKey>,
    wrapped: &[WrappedDepth],
) -> Result<TrackAssignment<FinalKey>, TrackError> {
    let mut depths: Vec<usize> = t.keys().iter().map(|k| k.depth).collect();
    depths.dedup();
    let by_depth: BTreeMap<usize, &WrappedDepth> = wrapped.iter().map(|w| (w.depth, w)).collect();
    if by_depth.len() != wrapped.len() || by_depth.keys().copied().ne(depths.iter().copied()) {
        return Err(TrackError::DepthMismatch(depths.first().copied().unwrap_or(0)));
    }
    let mut tracks = BTreeMap::new();
    for (&d, w) in &by_depth {
        for (k, seq) in w.layout.keys().iter().zip(w.layout.tracks()) {
            if seq.iter().any(|&v| t.key(v).map(|x| x.depth) != Some(d)) {
                return Err(TrackError::DepthMismatch(d));
            }
            tracks.insert(FinalKey { depth: d, residue: k.residue, slot: k.slot }, seq.clone());
        }
    }
    let out = TrackAssignment::from_tracks(t.universe(), tracks)?;
    if out.len() != t.len() {
        return Err(TrackError::DepthMismatch(0));
    }
    Ok(out)
}

/// Random graph with an X-crossing-free layered layout: vertices are spread
/// over `layers × ell` tracks, and random edges between tracks whose
/// layers differ by at most one are kept when they create no X-crossing.
pub fn random_layered_layout(n: usize, layers: usize, ell: usize, seed: u64) -> (Graph, TrackAssignment<LayerKey>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = layers.max(1);
    let ell = ell.max(1);
    let mut tracks: BTreeMap<LayerKey, Vec<usize>> = BTreeMap::new();
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);
    for v in ids {
        let key = LayerKey { layer: rng.gen_range(0..layers), slot: rng.gen_range(1..=ell) };
        tracks.entry(key).or_default().push(v);
    }
    let t = TrackAssignment::from_tracks(n, tracks).expect("fresh tracks are valid");
    let mut groups: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    let mut edges = Vec::new();
    let verts = t.vertices();
    if verts.len() >= 2 {
        for _ in 0..3 * n {
            let (u, v) = (*verts.choose(&mut rng).unwrap(), *verts.choose(&mut rng).unwrap());
            let (tu, tv) = (t.track(u).unwrap(), t.track(v).unwrap());
            if tu == tv || t.keys()[tu].layer.abs_diff(t.keys()[tv].layer) > 1 {
                continue;
            }
            let (a, b) = if tu < tv { (u, v) } else { (v, u) };
            let group = groups.entry((tu.min(tv), tu.max(tv))).or_default();
            let (pa, pb) = (t.position(a).unwrap(), t.position(b).unwrap());
            let clash = group.iter().any(|&(x, y)| {
                let (px, py) = (t.position(x).unwrap(), t.position(y).unwrap());
                (px == pa && py == pb) || (px < pa && pb < py) || (pa < px && py < pb)
            });
            if !clash {
                group.push((a, b));
                edges.push((u.min(v), u.max(v)));
            }
        }
    }
    let g = Graph::new(n, edges).expect("edges are simple");
    (g, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::augment_to_triangulation;
    use crate::generators::{generate, Family, GeneratorSpec};
    use crate::separator::{bfs_tree, build_separator_tree, SeparatorTree};

    fn two_track(a: Vec<usize>, b: Vec<usize>, n: usize) -> TrackAssignment<usize> {
        TrackAssignment::from_tracks(n, BTreeMap::from([(0, a), (1, b)])).unwrap()
    }

    #[test]
    fn xcrossing_definition() {
        // Track A: u=0 < v=1; track B: y=2 < w=3.
        let t = two_track(vec![0, 1], vec![2, 3], 4);
        let crossing = Graph::new(4, [(0, 3), (1, 2)]).unwrap();
        assert_eq!(verify_no_xcrossing(&crossing, &t).len(), 1);
        let parallel = Graph::new(4, [(0, 2), (1, 3)]).unwrap();
        assert!(verify_no_xcrossing(&parallel, &t).is_empty());
        let shared = Graph::new(4, [(0, 2), (0, 3), (1, 3)]).unwrap();
        assert!(verify_no_xcrossing(&shared, &t).is_empty());
    }

    #[test]
    fn span_of_two_track_path() {
        let t = two_track(vec![0, 2], vec![1], 3);
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let s = span_stats(&g, &t, flat_rank(&t));
        assert_eq!(s.max_span, 1);
        assert_eq!(s.histogram, BTreeMap::from([(1, 2)]));
        assert!(is_track_layout(&g, &t));
    }

    #[test]
    fn rejects_bad_tracks() {
        assert_eq!(
            TrackAssignment::from_tracks(3, BTreeMap::from([(0, vec![0, 1]), (1, vec![1])])),
            Err(TrackError::DuplicateVertex(1))
        );
        assert!(TrackAssignment::from_tracks(3, BTreeMap::from([(0, vec![])])).is_err());
        assert!(TrackAssignment::from_tracks(1, BTreeMap::from([(0, vec![4])])).is_err());
    }

    fn tree_from_parents(parent: &[Option<usize>]) -> SeparatorTree {
        // One vertex per node.
        SeparatorTree::from_parts(2, parent, (0..parent.len()).collect(), &vec![None; parent.len()]).unwrap()
    }

    #[test]
    fn tree_layouts() {
        let single = tree_from_parents(&[None]);
        assert_eq!(tree_track_layout(&single).levels, vec![vec![0]]);
        let star = tree_from_parents(&[None, Some(0), Some(0), Some(0)]);
        assert_eq!(tree_track_layout(&star).levels, vec![vec![0], vec![1, 2, 3]]);
    }

    #[test]
    fn random_tree_layouts_do_not_cross() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut parent = vec![None];
            for x in 1..50 {
                parent.push(Some(rng.gen_range(0..x)));
            }
            // Shuffle node ids so sibling order is not the creation order.
            let s = tree_from_parents(&parent);
            let mut vn: Vec<usize> = (0..50).collect();
            vn.shuffle(&mut rng);
            let s = SeparatorTree::from_parts(2, &s.parents(), vn, &vec![None; 50]).unwrap();
            let ts = tree_track_layout(&s);
            assert!(verify_tree_track_layout(&s, &ts).is_empty());
        }
    }

    #[test]
    fn single_leaf_path() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let l = Layering::new(vec![0, 1, 2, 3]);
        let s = SeparatorTree::from_parts(2, &[None], vec![0; 4], &[None]).unwrap();
        let t = assign_tracks(&s, &l, &tree_track_layout(&s)).unwrap();
        assert_eq!(t.track_count(), 4);
        for v in 0..4 {
            assert_eq!(t.key(v), Some(TrackKey { depth: 1, layer: v, slot: 1 }));
        }
        assert!(is_track_layout(&g, &t));
    }

    #[test]
    fn same_node_same_layer_gets_two_labels() {
        let l = Layering::new(vec![0, 1, 1]);
        let s = SeparatorTree::from_parts(2, &[None], vec![0; 3], &[None]).unwrap();
        let t = assign_tracks(&s, &l, &tree_track_layout(&s)).unwrap();
        assert_eq!(t.key(1).unwrap().slot, 1);
        assert_eq!(t.key(2).unwrap().slot, 2);
        let s1 = SeparatorTree::from_parts(1, &[None], vec![0; 3], &[None]).unwrap();
        assert!(matches!(assign_tracks(&s1, &l, &tree_track_layout(&s1)), Err(TrackError::LayerOverfull { .. })));
    }

    #[test]
    fn depth_spans() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let keys = |a: TrackKey, b: TrackKey| {
            TrackAssignment::from_tracks(2, BTreeMap::from([(a, vec![0]), (b, vec![1])])).unwrap()
        };
        let t = keys(TrackKey { depth: 1, layer: 0, slot: 1 }, TrackKey { depth: 1, layer: 0, slot: 2 });
        let d = extract_depth_layout(&g, &t, 1, 2).unwrap();
        assert_eq!(span_stats(&g, d.layout(), |k| k.layer * 2 + k.slot - 1).max_span, 1);
        let t = keys(TrackKey { depth: 1, layer: 0, slot: 1 }, TrackKey { depth: 1, layer: 1, slot: 2 });
        let d = extract_depth_layout(&g, &t, 1, 2).unwrap();
        assert_eq!(span_stats(&g, d.layout(), |k| k.layer * 2 + k.slot - 1).max_span, 3);
        assert!(extract_depth_layout(&g, &t, 2, 2).unwrap().layout().is_empty());
    }

    #[test]
    fn wrap_orders_lower_layers_first() {
        let t = TrackAssignment::from_tracks(
            2,
            BTreeMap::from([(LayerKey { layer: 5, slot: 1 }, vec![0]), (LayerKey { layer: 2, slot: 1 }, vec![1])]),
        )
        .unwrap();
        let g = Graph::empty(2);
        let w = wrap(&g, &t).unwrap();
        assert_eq!(w.tracks(), &[vec![1, 0]]);
        assert!(check_wrap(&g, &t, &w, 1).is_empty());
        let bad = Graph::new(2, [(0, 1)]).unwrap();
        assert!(matches!(wrap(&bad, &t), Err(TrackError::LayerGap { .. })));
    }

    #[test]
    fn wrap_of_six_track_path() {
        // A path on 6 layers, one vertex per layer.
        let g = Graph::new(6, (0..5).map(|i| (i, i + 1))).unwrap();
        let t = TrackAssignment::from_tracks(6, (0..6).map(|i| (LayerKey { layer: i, slot: 1 }, vec![i])).collect())
            .unwrap();
        let w = wrap(&g, &t).unwrap();
        assert_eq!(w.track_count(), 3);
        assert_eq!(w.tracks(), &[vec![0, 3], vec![1, 4], vec![2, 5]]);
        assert!(check_wrap(&g, &t, &w, 1).is_empty());
    }

    #[test]
    fn wrap_is_identity_below_three_layers() {
        for seed in 0..50 {
            let (g, t) = random_layered_layout(30, 3, 2, seed);
            let w = wrap(&g, &t).unwrap();
            assert_eq!(w.tracks(), t.tracks());
            assert_eq!(
                w.keys().iter().map(|k| (k.residue, k.slot)).collect::<Vec<_>>(),
                t.keys().iter().map(|k| (k.layer, k.slot)).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn random_layouts_are_xcrossing_free_and_wrap_cleanly() {
        for seed in 0..100 {
            let (g, t) = random_layered_layout(80, 12, 1 + (seed as usize % 3), seed);
            assert!(is_track_layout(&g, &t));
            assert!(g.edge_count() > 0);
            let w = wrap(&g, &t).unwrap();
            assert!(check_wrap(&g, &t, &w, 1 + (seed as usize % 3)).is_empty());
        }
    }

    #[test]
    fn pipeline_layouts_on_a_grid() {
        let (g, r) = generate(&GeneratorSpec { family: Family::Grid { rows: 8, cols: 8 }, seed: 0 }).unwrap();
        let tri = augment_to_triangulation(&g, &r).unwrap();
        let (bt, l) = bfs_tree(&tri, 0).unwrap();
        let s = build_separator_tree(&tri, &bt, &l, 2).unwrap();
        let ts = tree_track_layout(&s);
        assert!(verify_tree_track_layout(&s, &ts).is_empty());
        let t = assign_tracks(&s, &l, &ts).unwrap();
        assert!(is_track_layout(&tri.graph, &t));
        let wrapped: Vec<WrappedDepth> = (1..=s.height())
            .map(|d| extract_depth_layout(&tri.graph, &t, d, 2).unwrap().wrap(&tri.graph).unwrap())
            .collect();
        for (d, w) in wrapped.iter().enumerate() {
            let orig = extract_depth_layout(&tri.graph, &t, d + 1, 2).unwrap();
            assert!(check_wrap(&tri.graph, orig.layout(), w.layout(), 2).is_empty());
        }
        let fin = compose_final(&t, &wrapped).unwrap();
        assert!(is_track_layout(&tri.graph, &fin));
        assert!(is_track_layout(&g, &fin));
        assert!(fin.track_count() <= crate::bounds::track_bound(64, 2));
        assert!(compose_final(&t, &wrapped[1..]).is_err());
    }
}
