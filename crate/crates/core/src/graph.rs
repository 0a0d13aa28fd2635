//! Simple undirected graphs, layerings and separations.
//!
//! Everything downstream indexes into a [`Graph`] by dense vertex ids
//! `0..n`. Subgraphs never re-index: a [`Subgraph`] is a membership mask over
//! the parent's ids, so separator-tree nodes and track assignments can refer
//! to original vertices directly.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("parallel edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex {0} has no layer")]
    LayeringMissing(usize),
    #[error("layering assigns a layer to vertex {0}, which is not in the graph")]
    LayeringExtra(usize),
    #[error("vertex {0} of the subgraph is on neither side of the separation")]
    SeparationUncovered(usize),
    #[error("vertex {0} is in the separation but not in the subgraph")]
    SeparationForeign(usize),
    #[error("graph is disconnected: vertex {unreached} is unreachable from {root}")]
    Disconnected { root: usize, unreached: usize },
}

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are stored normalized (`u < v`) and sorted, so an edge's index in
/// [`Graph::edges`] is a stable identifier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut list = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        Ok(Graph { n, edges: list, adj })
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbours of `v`, ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Index of the edge `{u, v}` in [`Graph::edges`].
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    /// This graph plus `extra` edges; fails on duplicates.
    pub fn with_edges(&self, extra: &[(usize, usize)]) -> Result<Graph, GraphError> {
        Graph::new(self.n, self.edges.iter().copied().chain(extra.iter().copied()))
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || bfs_layering(self, 0).is_ok()
    }
}

/// A vertex subset of a parent graph, viewed as its induced subgraph.
#[derive(Clone, Debug)]
pub struct Subgraph<'g> {
    graph: &'g Graph,
    members: Vec<bool>,
    vertices: Vec<usize>,
}

impl<'g> Subgraph<'g> {
    pub fn whole(graph: &'g Graph) -> Self {
        Subgraph { graph, members: vec![true; graph.n], vertices: (0..graph.n).collect() }
    }

    pub fn induced(graph: &'g Graph, vertices: &[usize]) -> Result<Self, GraphError> {
        let mut members = vec![false; graph.n];
        for &v in vertices {
            if v >= graph.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: graph.n });
            }
            members[v] = true;
        }
        let vertices = (0..graph.n).filter(|&v| members[v]).collect();
        Ok(Subgraph { graph, members, vertices })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.members.len() && self.members[v]
    }

    /// Edges of the parent graph with both endpoints in the subset.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.graph.edges.iter().copied().filter(move |&(u, v)| self.members[u] && self.members[v])
    }
}

/// Assignment of a layer index to every vertex.
///
/// Layer indices need not be contiguous: layerings inherited by subgraphs may
/// leave some layers empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layering {
    layer_of: Vec<usize>,
}

impl Layering {
    pub fn new(layer_of: Vec<usize>) -> Self {
        Layering { layer_of }
    }

    pub fn layer(&self, v: usize) -> usize {
        self.layer_of[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.layer_of
    }

    pub fn len(&self) -> usize {
        self.layer_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layer_of.is_empty()
    }

    /// Largest layer index `p`, or `None` for an empty layering.
    pub fn max_layer(&self) -> Option<usize> {
        self.layer_of.iter().copied().max()
    }

    /// `V_0, ..., V_p`, each ascending.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.max_layer().map_or(0, |p| p + 1)];
        for (v, &i) in self.layer_of.iter().enumerate() {
            out[i].push(v);
        }
        out
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers().iter().map(Vec::len).collect()
    }
}

/// Returns every edge whose endpoint layers differ by more than one.
pub fn validate_layering(g: &Graph, l: &Layering) -> Result<Vec<(usize, usize)>, GraphError> {
    if l.len() < g.n {
        return Err(GraphError::LayeringMissing(l.len()));
    }
    if l.len() > g.n {
        return Err(GraphError::LayeringExtra(g.n));
    }
    Ok(g.edges.iter().copied().filter(|&(u, v)| l.layer(u).abs_diff(l.layer(v)) > 1).collect())
}

/// A pair `(V(G1), V(G2))` whose union covers a subgraph.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Separation {
    pub left: BTreeSet<usize>,
    pub right: BTreeSet<usize>,
}

impl Separation {
    pub fn new(left: impl IntoIterator<Item = usize>, right: impl IntoIterator<Item = usize>) -> Self {
        Separation { left: left.into_iter().collect(), right: right.into_iter().collect() }
    }

    /// `V(G1) ∩ V(G2)`.
    pub fn separator(&self) -> Vec<usize> {
        self.left.intersection(&self.right).copied().collect()
    }

    pub fn left_only(&self) -> Vec<usize> {
        self.left.difference(&self.right).copied().collect()
    }

    pub fn right_only(&self) -> Vec<usize> {
        self.right.difference(&self.left).copied().collect()
    }

    fn check_coverage(&self, sub: &Subgraph<'_>) -> Result<(), GraphError> {
        if let Some(&v) = self.left.iter().chain(&self.right).find(|&&v| !sub.contains(v)) {
            return Err(GraphError::SeparationForeign(v));
        }
        if let Some(&v) = sub.vertices().iter().find(|v| !self.left.contains(v) && !self.right.contains(v)) {
            return Err(GraphError::SeparationUncovered(v));
        }
        Ok(())
    }
}

/// Edges of `sub` joining `left − right` to `right − left`. Empty means the
/// pair is a separation.
pub fn validate_separation(sub: &Subgraph<'_>, s: &Separation) -> Result<Vec<(usize, usize)>, GraphError> {
    s.check_coverage(sub)?;
    let side = |v: usize| match (s.left.contains(&v), s.right.contains(&v)) {
        (true, false) => -1i8,
        (false, true) => 1,
        _ => 0,
    };
    Ok(sub.edges().filter(|&(u, v)| side(u) * side(v) == -1).collect())
}

/// Outcome of checking a separation against the layered separator rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredSeparatorCheck {
    pub ell: usize,
    /// Separator vertices per layer (only non-empty layers are listed).
    pub per_layer_counts: BTreeMap<usize, usize>,
    /// `|V(G1) − V(G2)|`.
    pub left_size: usize,
    /// `|V(G2) − V(G1)|`.
    pub right_size: usize,
    /// `|V(G')|`.
    pub total: usize,
    pub crossing_edges: Vec<(usize, usize)>,
}

impl LayeredSeparatorCheck {
    /// Layers holding more than `ell` separator vertices.
    pub fn overfull_layers(&self) -> Vec<(usize, usize)> {
        self.per_layer_counts.iter().filter(|&(_, &c)| c > self.ell).map(|(&i, &c)| (i, c)).collect()
    }

    pub fn balanced(&self) -> bool {
        is_balanced(self.left_size, self.total) && is_balanced(self.right_size, self.total)
    }

    pub fn is_valid(&self) -> bool {
        self.crossing_edges.is_empty() && self.balanced() && self.overfull_layers().is_empty()
    }
}

/// `side ≤ 2/3 · total`, compared exactly.
pub fn is_balanced(side: usize, total: usize) -> bool {
    3 * side as u128 <= 2 * total as u128
}

pub fn check_layered_separator(
    sub: &Subgraph<'_>,
    s: &Separation,
    l: &Layering,
    ell: usize,
) -> Result<LayeredSeparatorCheck, GraphError> {
    let crossing_edges = validate_separation(sub, s)?;
    if l.len() < sub.graph().vertex_count() {
        return Err(GraphError::LayeringMissing(l.len()));
    }
    let mut per_layer_counts = BTreeMap::new();
    for v in s.separator() {
        *per_layer_counts.entry(l.layer(v)).or_insert(0) += 1;
    }
    Ok(LayeredSeparatorCheck {
        ell,
        per_layer_counts,
        left_size: s.left_only().len(),
        right_size: s.right_only().len(),
        total: sub.len(),
        crossing_edges,
    })
}

/// Layering by graph distance from `root`.
pub fn bfs_layering(g: &Graph, root: usize) -> Result<Layering, GraphError> {
    if root >= g.n {
        return Err(GraphError::VertexOutOfRange { vertex: root, n: g.n });
    }
    let mut dist = vec![usize::MAX; g.n];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in &g.adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    if let Some(unreached) = dist.iter().position(|&d| d == usize::MAX) {
        return Err(GraphError::Disconnected { root, unreached });
    }
    Ok(Layering::new(dist))
}

/// Connected components of the subgraph induced by `within`.
///
/// Each component is sorted; components are ordered by their smallest vertex.
///
/// # Panics
///
/// If a vertex of `within` is not a vertex of `g`.
pub fn connected_components(g: &Graph, within: &[usize]) -> Vec<Vec<usize>> {
    let mut state = vec![0u8; g.n]; // 0: outside, 1: unvisited, 2: visited
    for &v in within {
        state[v] = 1;
    }
    let mut roots: Vec<usize> = within.to_vec();
    roots.sort_unstable();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for r in roots {
        if state[r] != 1 {
            continue;
        }
        state[r] = 2;
        stack.push(r);
        let mut comp = Vec::new();
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &w in &g.adj[v] {
                if state[w] == 1 {
                    state[w] = 2;
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    fn grid(rows: usize, cols: usize) -> Graph {
        let id = |r: usize, c: usize| r * cols + c;
        let mut e = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    e.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < rows {
                    e.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        Graph::new(rows * cols, e).unwrap()
    }

    #[test]
    fn rejects_malformed_edges() {
        assert_eq!(Graph::new(2, [(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(Graph::new(2, [(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert_eq!(Graph::new(2, [(0, 2)]), Err(GraphError::VertexOutOfRange { vertex: 2, n: 2 }));
    }

    #[test]
    fn layering_validation() {
        let g = path(3);
        assert!(validate_layering(&g, &Layering::new(vec![0, 1, 2])).unwrap().is_empty());
        let g2 = g.with_edges(&[(0, 2)]).unwrap();
        assert_eq!(validate_layering(&g2, &Layering::new(vec![0, 1, 2])).unwrap(), vec![(0, 2)]);
        assert!(validate_layering(&Graph::empty(0), &Layering::new(vec![])).unwrap().is_empty());
        assert_eq!(validate_layering(&g, &Layering::new(vec![0, 1])), Err(GraphError::LayeringMissing(2)));
        assert_eq!(validate_layering(&g, &Layering::new(vec![0, 1, 2, 3])), Err(GraphError::LayeringExtra(3)));
    }

    #[test]
    fn separation_validation() {
        let tri = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let sub = Subgraph::whole(&tri);
        let s = Separation::new([0, 1], [1, 2]);
        assert_eq!(validate_separation(&sub, &s).unwrap(), vec![(0, 2)]);

        let p = path(3);
        let sub = Subgraph::whole(&p);
        assert!(validate_separation(&sub, &s).unwrap().is_empty());
        assert_eq!(s.separator(), vec![1]);

        let degenerate = Separation::new([0, 1, 2], []);
        assert!(validate_separation(&sub, &degenerate).unwrap().is_empty());

        let partial = Separation::new([0], [1]);
        assert_eq!(validate_separation(&sub, &partial), Err(GraphError::SeparationUncovered(2)));
        let small = Subgraph::induced(&p, &[0, 1]).unwrap();
        assert_eq!(validate_separation(&small, &s), Err(GraphError::SeparationForeign(2)));
    }

    #[test]
    fn layered_separator_check() {
        let p = path(3);
        let sub = Subgraph::whole(&p);
        let l = Layering::new(vec![0, 1, 2]);
        let c = check_layered_separator(&sub, &Separation::new([0, 1], [1, 2]), &l, 1).unwrap();
        assert!(c.is_valid());
        assert_eq!((c.left_size, c.right_size), (1, 1));

        let p6 = path(6);
        let sub = Subgraph::whole(&p6);
        let l6 = Layering::new((0..6).collect());
        let c = check_layered_separator(&sub, &Separation::new(0..6, [5]), &l6, 2).unwrap();
        assert_eq!(c.left_size, 5);
        assert!(!c.balanced());
        let c = check_layered_separator(&sub, &Separation::new(0..5, [4, 5]), &l6, 2).unwrap();
        assert_eq!(c.left_size, 4);
        assert!(c.balanced());
    }

    #[test]
    fn balance_is_exact() {
        assert!(is_balanced(4, 6));
        assert!(!is_balanced(5, 6));
        assert!(is_balanced(2, 3));
        assert!(!is_balanced(1, 1));
        assert!(is_balanced(0, 1));
    }

    // Independent oracle: repeated relaxation (Bellman-Ford style) of distances.
    fn relaxation_distances(g: &Graph, root: usize) -> Vec<usize> {
        let mut d = vec![usize::MAX; g.vertex_count()];
        d[root] = 0;
        loop {
            let mut changed = false;
            for &(u, v) in g.edges() {
                for (a, b) in [(u, v), (v, u)] {
                    if d[a] != usize::MAX && d[a] + 1 < d[b] {
                        d[b] = d[a] + 1;
                        changed = true;
                    }
                }
            }
            if !changed {
                return d;
            }
        }
    }

    #[test]
    fn bfs_layering_examples() {
        let g = grid(3, 3);
        let l = bfs_layering(&g, 0).unwrap();
        assert_eq!(l.as_slice(), relaxation_distances(&g, 0).as_slice());
        assert_eq!(l.layer_sizes(), vec![1, 2, 3, 2, 1]);
        assert!(validate_layering(&g, &l).unwrap().is_empty());

        let star = Graph::new(6, (1..6).map(|i| (0, i))).unwrap();
        assert_eq!(bfs_layering(&star, 0).unwrap().layer_sizes(), vec![1, 5]);
        assert_eq!(bfs_layering(&Graph::empty(1), 0).unwrap().layer_sizes(), vec![1]);

        let two = Graph::new(3, [(0, 1)]).unwrap();
        assert_eq!(bfs_layering(&two, 0), Err(GraphError::Disconnected { root: 0, unreached: 2 }));
    }

    #[test]
    fn components() {
        let p = path(3);
        assert_eq!(connected_components(&p, &[0, 2]), vec![vec![0], vec![2]]);
        assert!(connected_components(&p, &[]).is_empty());
        let tri = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(connected_components(&tri, &[2, 0, 1]), vec![vec![0, 1, 2]]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph() -> impl Strategy<Value = Graph> {
            (1usize..16).prop_flat_map(|n| {
                proptest::collection::vec((0..n, 0..n), 0..40).prop_map(move |pairs| {
                    let mut set = BTreeSet::new();
                    for (a, b) in pairs {
                        if a != b {
                            set.insert((a.min(b), a.max(b)));
                        }
                    }
                    Graph::new(n, set).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn components_partition_within(g in arb_graph(), mask in proptest::collection::vec(any::<bool>(), 16)) {
                let within: Vec<usize> = (0..g.vertex_count()).filter(|&v| mask[v]).collect();
                let comps = connected_components(&g, &within);
                let mut seen = vec![usize::MAX; g.vertex_count()];
                for (ci, c) in comps.iter().enumerate() {
                    for &v in c {
                        prop_assert_eq!(seen[v], usize::MAX);
                        seen[v] = ci;
                    }
                    prop_assert_eq!(connected_components(&g, c).len(), 1);
                }
                for &v in &within {
                    prop_assert!(seen[v] != usize::MAX);
                }
                for &(u, v) in g.edges() {
                    if seen[u] != usize::MAX && seen[v] != usize::MAX {
                        prop_assert_eq!(seen[u], seen[v]);
                    }
                }
            }

            #[test]
            fn separation_matches_edge_scan(g in arb_graph(), sides in proptest::collection::vec(0u8..3, 16)) {
                let n = g.vertex_count();
                let left = (0..n).filter(|&v| sides[v] != 2);
                let right = (0..n).filter(|&v| sides[v] != 0);
                let s = Separation::new(left, right);
                let sub = Subgraph::whole(&g);
                let bad = validate_separation(&sub, &s).unwrap();
                let scan: Vec<_> = g.edges().iter().copied()
                    .filter(|&(u, v)| (sides[u] == 0 && sides[v] == 2) || (sides[u] == 2 && sides[v] == 0))
                    .collect();
                prop_assert_eq!(bad, scan);
                let l = Layering::new(vec![0; n]);
                for ell in 1..4 {
                    let c = check_layered_separator(&sub, &s, &l, ell).unwrap();
                    let c2 = check_layered_separator(&sub, &s, &l, ell + 1).unwrap();
                    prop_assert!(!c.is_valid() || c2.is_valid());
                }
            }

            #[test]
            fn bfs_layering_is_valid(g in arb_graph()) {
                if let Ok(l) = bfs_layering(&g, 0) {
                    prop_assert!(validate_layering(&g, &l).unwrap().is_empty());
                }
            }
        }
    }
}
