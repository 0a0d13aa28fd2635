//! Layered separators from BFS fundamental cycles, and the recursive
//! separator tree built from them.
//!
//! Every recursive step works on the original triangulation: the current
//! component gets weight 1 and everything else weight 0, and a balanced
//! fundamental cycle of the whole triangulation is chosen. Since the cycle
//! comes from a BFS tree it meets each layer at most twice, and the part of
//! it inside the component becomes the node's vertex set.
//!
//! Candidate cycles are scored in near-constant time each via the dual
//! spanning tree: the non-tree edges of a spanning tree of a triangulation
//! form a spanning tree of the dual, and the fundamental cycle of a
//! non-tree edge splits the faces exactly like removing its dual edge does.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::bounds;
use crate::embed::{Darts, Triangulation};
use crate::graph::{connected_components, is_balanced, Graph, Layering, Separation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparatorError {
    #[error("root {0} is not a vertex")]
    InvalidRoot(usize),
    #[error("triangulation is disconnected")]
    Disconnected,
    #[error("({0}, {1}) is not a non-tree edge")]
    NotNonTreeEdge(usize, usize),
    #[error("cycle is not a simple cycle of the graph")]
    NotSimpleCycle,
    #[error("fundamental cycle meets layer {layer} {count} times")]
    LayerOverflow { layer: usize, count: usize },
    #[error("separator search needs n >= 4 and positive total weight")]
    DegenerateInput,
    #[error("no balanced fundamental cycle for total weight {total}")]
    NoBalancedCycle { total: u64 },
    #[error("ell must be at least 2 for cycle separators, got {0}")]
    EllTooSmall(usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Breadth-first spanning tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BfsTree {
    pub root: usize,
    /// `None` for the root.
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<usize>,
    /// Vertices in BFS visiting order.
    pub order: Vec<usize>,
}

impl BfsTree {
    pub fn is_tree_edge(&self, u: usize, v: usize) -> bool {
        self.parent[u] == Some(v) || self.parent[v] == Some(u)
    }

    pub fn lca(&self, mut u: usize, mut v: usize) -> usize {
        while self.depth[u] > self.depth[v] {
            u = self.parent[u].unwrap();
        }
        while self.depth[v] > self.depth[u] {
            v = self.parent[v].unwrap();
        }
        while u != v {
            u = self.parent[u].unwrap();
            v = self.parent[v].unwrap();
        }
        u
    }
}

/// BFS tree of the triangulation from `root`, and the layering it induces.
pub fn bfs_tree(tri: &Triangulation, root: usize) -> Result<(BfsTree, Layering), SeparatorError> {
    let g = &tri.graph;
    let n = g.vertex_count();
    if root >= n {
        return Err(SeparatorError::InvalidRoot(root));
    }
    let mut parent = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in g.neighbors(v) {
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                parent[w] = Some(v);
                queue.push_back(w);
            }
        }
    }
    if order.len() != n {
        return Err(SeparatorError::Disconnected);
    }
    let layering = Layering::new(depth.clone());
    Ok((BfsTree { root, parent, depth, order }, layering))
}

/// Cycle formed by a non-tree edge and the tree paths to the endpoints'
/// lowest common ancestor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalCycle {
    /// `u, …, lca, …, v` for closing edge `(u, v)`, `u < v`.
    pub vertices: Vec<usize>,
    pub closing_edge: (usize, usize),
}

impl FundamentalCycle {
    /// Vertex count per layer of `l`.
    pub fn layer_counts(&self, l: &Layering) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &v in &self.vertices {
            *m.entry(l.layer(v)).or_insert(0) += 1;
        }
        m
    }
}

pub fn fundamental_cycle(t: &BfsTree, g: &Graph, e: (usize, usize)) -> Result<FundamentalCycle, SeparatorError> {
    let (u, v) = (e.0.min(e.1), e.0.max(e.1));
    if !g.has_edge(u, v) || t.is_tree_edge(u, v) {
        return Err(SeparatorError::NotNonTreeEdge(e.0, e.1));
    }
    let lca = t.lca(u, v);
    let mut vertices = Vec::new();
    let mut x = u;
    while x != lca {
        vertices.push(x);
        x = t.parent[x].unwrap();
    }
    vertices.push(lca);
    let mut down = Vec::new();
    let mut y = v;
    while y != lca {
        down.push(y);
        y = t.parent[y].unwrap();
    }
    vertices.extend(down.into_iter().rev());
    let cycle = FundamentalCycle { vertices, closing_edge: (u, v) };
    let layering = Layering::new(t.depth.clone());
    if let Some((&layer, &count)) = cycle.layer_counts(&layering).iter().find(|&(_, &c)| c > 2) {
        return Err(SeparatorError::LayerOverflow { layer, count });
    }
    Ok(cycle)
}

/// The two regions bounded by a simple cycle of an embedded triangulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSides {
    /// Off-cycle vertices on the side of the face of dart `c0 → c1`.
    pub inside: Vec<usize>,
    pub outside: Vec<usize>,
}

/// Splits the off-cycle vertices by flood-filling faces without crossing
/// cycle edges.
pub fn cycle_sides(tri: &Triangulation, cycle: &[usize]) -> Result<CycleSides, SeparatorError> {
    let darts = Darts::new(&tri.rotation);
    let (face_of, face_count) = darts.face_ids();
    cycle_sides_with(tri, &darts, &face_of, face_count, cycle)
}

fn dart_between(darts: &Darts, tri: &Triangulation, u: usize, v: usize) -> Option<usize> {
    let start = darts.first_out(u)?;
    tri.rotation.rotation(u).iter().position(|&w| w == v).map(|j| start + j)
}

fn cycle_sides_with(
    tri: &Triangulation,
    darts: &Darts,
    face_of: &[usize],
    face_count: usize,
    cycle: &[usize],
) -> Result<CycleSides, SeparatorError> {
    let g = &tri.graph;
    let n = g.vertex_count();
    let k = cycle.len();
    let mut on_cycle = vec![false; n];
    for &c in cycle {
        if c >= n || std::mem::replace(&mut on_cycle[c], true) {
            return Err(SeparatorError::NotSimpleCycle);
        }
    }
    if k < 3 {
        return Err(SeparatorError::NotSimpleCycle);
    }
    let mut blocked = vec![false; darts.len()];
    let mut start_face = usize::MAX;
    for j in 0..k {
        let d = dart_between(darts, tri, cycle[j], cycle[(j + 1) % k]).ok_or(SeparatorError::NotSimpleCycle)?;
        blocked[d] = true;
        blocked[darts.twin(d)] = true;
        if j == 0 {
            start_face = face_of[d];
        }
    }
    // Face adjacency through unblocked edges.
    let mut face_darts: Vec<Vec<usize>> = vec![Vec::new(); face_count];
    for d in 0..darts.len() {
        face_darts[face_of[d]].push(d);
    }
    let mut in_region = vec![false; face_count];
    in_region[start_face] = true;
    let mut queue = VecDeque::from([start_face]);
    while let Some(f) = queue.pop_front() {
        for &d in &face_darts[f] {
            if blocked[d] {
                continue;
            }
            let h = face_of[darts.twin(d)];
            if !in_region[h] {
                in_region[h] = true;
                queue.push_back(h);
            }
        }
    }
    let mut side = vec![0i8; n];
    let (mut inside, mut outside) = (Vec::new(), Vec::new());
    for v in 0..n {
        if on_cycle[v] {
            continue;
        }
        let d = darts.first_out(v).ok_or(SeparatorError::NotSimpleCycle)?;
        if in_region[face_of[d]] {
            side[v] = 1;
            inside.push(v);
        } else {
            side[v] = -1;
            outside.push(v);
        }
    }
    if let Some(&(a, b)) = g.edges().iter().find(|&&(a, b)| side[a] * side[b] == -1) {
        return Err(SeparatorError::Internal(format!("edge ({a}, {b}) crosses the cycle")));
    }
    Ok(CycleSides { inside, outside })
}

/// Precomputed data for scoring fundamental cycles of one BFS tree.
struct SearchContext<'a> {
    tri: &'a Triangulation,
    tree: &'a BfsTree,
    darts: Darts,
    face_of: Vec<usize>,
    face_count: usize,
    /// Non-tree edges as `(graph edge index, u, v, lca)`, `u < v`.
    candidates: Vec<(usize, usize, usize, usize)>,
    /// Dart `v → u` of each candidate.
    candidate_dart: Vec<usize>,
    /// Dual tree: candidate index of the edge to the parent face.
    dual_parent_edge: Vec<usize>,
    dual_preorder: Vec<usize>,
    dual_parent: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
    /// Face that represents each vertex (the face of its first dart).
    vertex_face: Vec<usize>,
}

/// Score of one candidate under a weighting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Score {
    candidate: usize,
    inside: u64,
    outside: u64,
}

impl<'a> SearchContext<'a> {
    fn new(tri: &'a Triangulation, tree: &'a BfsTree) -> Result<Self, SeparatorError> {
        let g = &tri.graph;
        let darts = Darts::new(&tri.rotation);
        let (face_of, face_count) = darts.face_ids();
        let candidates: Vec<_> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|&(_, &(u, v))| !tree.is_tree_edge(u, v))
            .map(|(i, &(u, v))| (i, u, v, tree.lca(u, v)))
            .collect();
        let candidate_dart: Vec<usize> =
            candidates.iter().map(|&(_, u, v, _)| dart_between(&darts, tri, v, u).expect("edge has a dart")).collect();
        let mut dual_adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); face_count];
        for (c, &d) in candidate_dart.iter().enumerate() {
            let (f1, f2) = (face_of[d], face_of[darts.twin(d)]);
            dual_adj[f1].push((f2, c));
            dual_adj[f2].push((f1, c));
        }
        let mut dual_parent_edge = vec![usize::MAX; face_count];
        let mut dual_parent = vec![usize::MAX; face_count];
        let mut tin = vec![usize::MAX; face_count];
        let mut tout = vec![0; face_count];
        let mut dual_preorder = Vec::with_capacity(face_count);
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        tin[0] = 0;
        dual_preorder.push(0);
        while let Some(&mut (f, ref mut i)) = stack.last_mut() {
            if *i < dual_adj[f].len() {
                let (h, c) = dual_adj[f][*i];
                *i += 1;
                if tin[h] == usize::MAX {
                    tin[h] = dual_preorder.len();
                    dual_preorder.push(h);
                    dual_parent[h] = f;
                    dual_parent_edge[h] = c;
                    stack.push((h, 0));
                } else if dual_parent_edge[f] != c {
                    return Err(SeparatorError::Internal("dual of non-tree edges has a cycle".into()));
                }
            } else {
                tout[f] = dual_preorder.len();
                stack.pop();
            }
        }
        if dual_preorder.len() != face_count {
            return Err(SeparatorError::Internal("dual of non-tree edges is disconnected".into()));
        }
        let vertex_face =
            (0..g.vertex_count()).map(|v| darts.first_out(v).map_or(usize::MAX, |d| face_of[d])).collect();
        Ok(SearchContext {
            tri,
            tree,
            darts,
            face_of,
            face_count,
            candidates,
            candidate_dart,
            dual_parent_edge,
            dual_preorder,
            dual_parent,
            tin,
            tout,
            vertex_face,
        })
    }

    fn in_subtree(&self, root: usize, f: usize) -> bool {
        self.tin[root] <= self.tin[f] && self.tin[f] < self.tout[root]
    }

    /// Best balanced candidate for `weights`: minimum inside weight, then
    /// minimum edge index.
    fn search(&self, weights: &[u64]) -> Result<Score, SeparatorError> {
        let n = self.tri.graph.vertex_count();
        let total: u64 = weights.iter().sum();
        // Weight of represented vertices per dual subtree.
        let mut sub = vec![0u64; self.face_count];
        for v in 0..n {
            if weights[v] > 0 {
                sub[self.vertex_face[v]] += weights[v];
            }
        }
        for &f in self.dual_preorder.iter().skip(1).rev() {
            sub[self.dual_parent[f]] += sub[f];
        }
        // Nearest weighted ancestor (inclusive) along the BFS tree.
        let mut up = vec![usize::MAX; n];
        for &v in &self.tree.order {
            up[v] = if weights[v] > 0 { v } else { self.tree.parent[v].map_or(usize::MAX, |p| up[p]) };
        }
        let mut best: Option<Score> = None;
        for (c, &(_, u, v, lca)) in self.candidates.iter().enumerate() {
            let lca_depth = self.tree.depth[lca];
            let d = self.candidate_dart[c];
            // Inside = region containing face(v → u).
            let f_in = self.face_of[d];
            let f_out = self.face_of[self.darts.twin(d)];
            let (root, inside_is_subtree) = if self.dual_parent_edge[f_in] == c {
                (f_in, true)
            } else {
                debug_assert_eq!(self.dual_parent_edge[f_out], c);
                (f_out, false)
            };
            let mut inside = if inside_is_subtree { sub[root] } else { total - sub[root] };
            let mut on_cycle = 0u64;
            let mut visit = |x: usize| {
                on_cycle += weights[x];
                let f = self.vertex_face[x];
                if self.in_subtree(root, f) == inside_is_subtree {
                    inside -= weights[x];
                }
            };
            let mut x = up[u];
            while x != usize::MAX && self.tree.depth[x] >= lca_depth {
                visit(x);
                x = self.tree.parent[x].map_or(usize::MAX, |p| up[p]);
            }
            let mut y = up[v];
            while y != usize::MAX && self.tree.depth[y] > lca_depth {
                visit(y);
                y = self.tree.parent[y].map_or(usize::MAX, |p| up[p]);
            }
            let outside = total - inside - on_cycle;
            if !(is_balanced_w(inside, total) && is_balanced_w(outside, total)) {
                continue;
            }
            let score = Score { candidate: c, inside, outside };
            if best.is_none_or(|b| inside < b.inside) {
                best = Some(score);
            }
        }
        best.ok_or(SeparatorError::NoBalancedCycle { total })
    }

    fn cycle_of(&self, c: usize) -> Result<FundamentalCycle, SeparatorError> {
        let (_, u, v, _) = self.candidates[c];
        fundamental_cycle(self.tree, &self.tri.graph, (u, v))
    }

    fn sides(&self, cycle: &FundamentalCycle) -> Result<CycleSides, SeparatorError> {
        // Orient the cycle so that its first dart is v → u, matching search().
        let mut oriented = cycle.vertices.clone();
        oriented.rotate_right(1);
        cycle_sides_with(self.tri, &self.darts, &self.face_of, self.face_count, &oriented)
    }
}

fn is_balanced_w(side: u64, total: u64) -> bool {
    3 * side as u128 <= 2 * total as u128
}

/// Finds a fundamental cycle with at most 2/3 of the total weight strictly
/// on each side. Cycle vertices count towards neither side.
///
/// The returned separation is `(inside ∪ cycle, outside ∪ cycle)` over all
/// vertices of the triangulation.
pub fn find_layered_separator(
    tri: &Triangulation,
    t: &BfsTree,
    l: &Layering,
    weights: &[u64],
) -> Result<(FundamentalCycle, Separation), SeparatorError> {
    let n = tri.graph.vertex_count();
    if n < 4 || weights.len() != n || weights.iter().sum::<u64>() == 0 {
        return Err(SeparatorError::DegenerateInput);
    }
    let ctx = SearchContext::new(tri, t)?;
    let score = ctx.search(weights)?;
    let cycle = ctx.cycle_of(score.candidate)?;
    let sides = ctx.sides(&cycle)?;
    let wsum = |s: &[usize]| s.iter().map(|&v| weights[v]).sum::<u64>();
    if wsum(&sides.inside) != score.inside || wsum(&sides.outside) != score.outside {
        return Err(SeparatorError::Internal("dual-tree weights disagree with flood fill".into()));
    }
    if let Some((&layer, &count)) = cycle.layer_counts(l).iter().find(|&(_, &c)| c > 2) {
        return Err(SeparatorError::LayerOverflow { layer, count });
    }
    let sep = Separation::new(
        sides.inside.iter().chain(&cycle.vertices).copied(),
        sides.outside.iter().chain(&cycle.vertices).copied(),
    );
    Ok((cycle, sep))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorNode {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// `s(G)`, ascending.
    pub vertices: Vec<usize>,
    /// Root has depth 1.
    pub depth: usize,
    /// Vertex count of the component this node was built for.
    pub subproblem_size: usize,
    /// Off-separator vertex counts `(inside, outside)` of the component;
    /// `None` for leaves.
    pub sides: Option<(usize, usize)>,
}

/// Rooted decomposition tree with every vertex mapped to one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorTree {
    pub ell: usize,
    pub nodes: Vec<SeparatorNode>,
    pub vertex_node: Vec<usize>,
}

impl SeparatorTree {
    /// Rebuilds a tree from a parent array and the vertex map. Children are
    /// ordered by id.
    pub fn from_parts(
        ell: usize,
        parent: &[Option<usize>],
        vertex_node: Vec<usize>,
        sides: &[Option<(usize, usize)>],
    ) -> Result<Self, SeparatorError> {
        let m = parent.len();
        if sides.len() != m {
            return Err(SeparatorError::Internal("sides length mismatch".into()));
        }
        let mut nodes: Vec<SeparatorNode> = (0..m)
            .map(|i| SeparatorNode {
                parent: parent[i],
                children: Vec::new(),
                vertices: Vec::new(),
                depth: 0,
                subproblem_size: 0,
                sides: sides[i],
            })
            .collect();
        let mut roots = Vec::new();
        for (i, &up) in parent.iter().enumerate() {
            match up {
                Some(p) if p < m && p != i => nodes[p].children.push(i),
                Some(_) => return Err(SeparatorError::Internal(format!("bad parent of node {i}"))),
                None => roots.push(i),
            }
        }
        if m > 0 && roots.len() != 1 {
            return Err(SeparatorError::Internal(format!("{} roots", roots.len())));
        }
        for (v, &s) in vertex_node.iter().enumerate() {
            if s >= m {
                return Err(SeparatorError::Internal(format!("vertex {v} maps to missing node {s}")));
            }
            nodes[s].vertices.push(v);
        }
        let mut order = Vec::with_capacity(m);
        if let Some(&r) = roots.first() {
            nodes[r].depth = 1;
            order.push(r);
            let mut i = 0;
            while i < order.len() {
                let s = order[i];
                i += 1;
                for c in nodes[s].children.clone() {
                    nodes[c].depth = nodes[s].depth + 1;
                    order.push(c);
                }
            }
        }
        if order.len() != m {
            return Err(SeparatorError::Internal("parent array contains a cycle".into()));
        }
        for &s in order.iter().rev() {
            let below: usize = nodes[s].children.iter().map(|&c| nodes[c].subproblem_size).sum();
            nodes[s].subproblem_size = nodes[s].vertices.len() + below;
        }
        Ok(SeparatorTree { ell, nodes, vertex_node })
    }

    pub fn root(&self) -> Option<usize> {
        self.nodes.iter().position(|s| s.parent.is_none())
    }

    /// Maximum node depth (root = 1); 0 for an empty tree.
    pub fn height(&self) -> usize {
        self.nodes.iter().map(|s| s.depth).max().unwrap_or(0)
    }

    pub fn parents(&self) -> Vec<Option<usize>> {
        self.nodes.iter().map(|s| s.parent).collect()
    }

    /// All vertices mapped into the subtree of `s`, ascending.
    pub fn subtree_vertices(&self, s: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            out.extend_from_slice(&self.nodes[x].vertices);
            stack.extend_from_slice(&self.nodes[x].children);
        }
        out.sort_unstable();
        out
    }
}

/// Recursive decomposition of the triangulation into layered separators.
pub fn build_separator_tree(
    tri: &Triangulation,
    t: &BfsTree,
    l: &Layering,
    ell: usize,
) -> Result<SeparatorTree, SeparatorError> {
    if ell < 2 {
        return Err(SeparatorError::EllTooSmall(ell));
    }
    let g = &tri.graph;
    let n = g.vertex_count();
    let mut nodes: Vec<SeparatorNode> = Vec::new();
    let mut vertex_node = vec![usize::MAX; n];
    if n == 0 {
        return Ok(SeparatorTree { ell, nodes, vertex_node });
    }
    let ctx = if n >= 4 { Some(SearchContext::new(tri, t)?) } else { None };
    let mut weights = vec![0u64; n];
    let mut layer_count: BTreeMap<usize, usize> = BTreeMap::new();
    // (component, parent node, depth)
    let mut queue: VecDeque<(Vec<usize>, Option<usize>, usize)> = VecDeque::from([((0..n).collect(), None, 1)]);
    while let Some((comp, parent, depth)) = queue.pop_front() {
        let id = nodes.len();
        if let Some(p) = parent {
            nodes[p].children.push(id);
        }
        layer_count.clear();
        for &v in &comp {
            *layer_count.entry(l.layer(v)).or_insert(0) += 1;
        }
        let is_leaf = layer_count.values().all(|&c| c <= ell);
        if is_leaf {
            for &v in &comp {
                vertex_node[v] = id;
            }
            nodes.push(SeparatorNode {
                parent,
                children: Vec::new(),
                vertices: comp.clone(),
                depth,
                subproblem_size: comp.len(),
                sides: None,
            });
            continue;
        }
        let ctx = ctx.as_ref().ok_or(SeparatorError::Internal("small graph needs no split".into()))?;
        for &v in &comp {
            weights[v] = 1;
        }
        let score = ctx.search(&weights)?;
        let cycle = ctx.cycle_of(score.candidate)?;
        let sides = ctx.sides(&cycle)?;
        let mut separator: Vec<usize> = cycle.vertices.iter().copied().filter(|&v| weights[v] > 0).collect();
        separator.sort_unstable();
        let inside: Vec<usize> = sides.inside.iter().copied().filter(|&v| weights[v] > 0).collect();
        let outside: Vec<usize> = sides.outside.iter().copied().filter(|&v| weights[v] > 0).collect();
        if inside.len() as u64 != score.inside || outside.len() as u64 != score.outside {
            return Err(SeparatorError::Internal("dual-tree weights disagree with flood fill".into()));
        }
        let total = comp.len();
        if separator.is_empty() || !is_balanced(inside.len(), total) || !is_balanced(outside.len(), total) {
            return Err(SeparatorError::Internal("chosen cycle is not a balanced separator".into()));
        }
        for &v in &comp {
            weights[v] = 0;
        }
        for &v in &separator {
            vertex_node[v] = id;
        }
        nodes.push(SeparatorNode {
            parent,
            children: Vec::new(),
            vertices: separator,
            depth,
            subproblem_size: total,
            sides: Some((inside.len(), outside.len())),
        });
        for side in [inside, outside] {
            for child in connected_components(g, &side) {
                queue.push_back((child, Some(id), depth + 1));
            }
        }
    }
    Ok(SeparatorTree { ell, nodes, vertex_node })
}

/// A broken separator-tree guarantee.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeViolation {
    VertexMapping(String),
    LayerOverflow { node: usize, layer: usize, count: usize },
    Height { height: usize, bound: usize },
    Unbalanced { node: usize, part: usize, subproblem: usize },
    SidesMismatch { node: usize },
    CrossingEdge { u: usize, v: usize },
    DisconnectedChild { node: usize },
}

impl std::fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TreeViolation::VertexMapping(s) => write!(f, "vertex mapping: {s}"),
            TreeViolation::LayerOverflow { node, layer, count } => {
                write!(f, "node {node} has {count} vertices in layer {layer}")
            }
            TreeViolation::Height { height, bound } => write!(f, "height {height} exceeds {bound}"),
            TreeViolation::Unbalanced { node, part, subproblem } => {
                write!(f, "node {node}: part of size {part} exceeds 2/3 of {subproblem}")
            }
            TreeViolation::SidesMismatch { node } => write!(f, "node {node}: recorded sides disagree with children"),
            TreeViolation::CrossingEdge { u, v } => write!(f, "edge ({u}, {v}) joins sibling subtrees"),
            TreeViolation::DisconnectedChild { node } => write!(f, "subproblem of node {node} is disconnected"),
        }
    }
}

/// Re-checks every separator-tree guarantee against the graph `g` it was
/// built for.
pub fn verify_separator_tree(g: &Graph, l: &Layering, s: &SeparatorTree) -> Vec<TreeViolation> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    if s.vertex_node.len() != n {
        out.push(TreeViolation::VertexMapping(format!("{} entries for {n} vertices", s.vertex_node.len())));
        return out;
    }
    if n == 0 {
        return out;
    }
    for (id, node) in s.nodes.iter().enumerate() {
        for &v in &node.vertices {
            if v >= n || s.vertex_node[v] != id {
                out.push(TreeViolation::VertexMapping(format!("vertex {v} listed at node {id}")));
            }
        }
    }
    let listed: usize = s.nodes.iter().map(|x| x.vertices.len()).sum();
    if listed != n || s.vertex_node.iter().any(|&x| x >= s.nodes.len()) {
        out.push(TreeViolation::VertexMapping("node vertex sets do not partition V".into()));
        return out;
    }
    for (id, node) in s.nodes.iter().enumerate() {
        let mut per_layer: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in &node.vertices {
            *per_layer.entry(l.layer(v)).or_insert(0) += 1;
        }
        for (&layer, &count) in &per_layer {
            if count > s.ell {
                out.push(TreeViolation::LayerOverflow { node: id, layer, count });
            }
        }
    }
    let bound = bounds::depth_bound(n);
    if s.height() > bound {
        out.push(TreeViolation::Height { height: s.height(), bound });
    }
    // Euler tour of S for ancestor tests.
    let Some(root) = s.root() else {
        out.push(TreeViolation::VertexMapping("no root".into()));
        return out;
    };
    let mut tin = vec![0; s.nodes.len()];
    let mut tout = vec![0; s.nodes.len()];
    let mut size = vec![0usize; s.nodes.len()];
    let mut clock = 0;
    let mut stack = vec![(root, 0usize)];
    tin[root] = clock;
    while let Some(&mut (x, ref mut i)) = stack.last_mut() {
        if *i < s.nodes[x].children.len() {
            let c = s.nodes[x].children[*i];
            *i += 1;
            clock += 1;
            tin[c] = clock;
            stack.push((c, 0));
        } else {
            tout[x] = clock;
            size[x] = s.nodes[x].vertices.len() + s.nodes[x].children.iter().map(|&c| size[c]).sum::<usize>();
            stack.pop();
        }
    }
    if size[root] != n {
        out.push(TreeViolation::VertexMapping("tree does not reach every node".into()));
    }
    for (id, node) in s.nodes.iter().enumerate() {
        if size[id] != node.subproblem_size {
            out.push(TreeViolation::SidesMismatch { node: id });
        }
        for &c in &node.children {
            if 3 * size[c] > 2 * size[id] {
                out.push(TreeViolation::Unbalanced { node: id, part: size[c], subproblem: size[id] });
            }
        }
        match node.sides {
            Some((a, b)) => {
                for part in [a, b] {
                    if !is_balanced(part, size[id]) {
                        out.push(TreeViolation::Unbalanced { node: id, part, subproblem: size[id] });
                    }
                }
                if a + b + node.vertices.len() != size[id] {
                    out.push(TreeViolation::SidesMismatch { node: id });
                }
            }
            None if !node.children.is_empty() => out.push(TreeViolation::SidesMismatch { node: id }),
            None => {}
        }
    }
    let ancestor = |a: usize, b: usize| tin[a] <= tin[b] && tin[b] <= tout[a];
    for &(u, v) in g.edges() {
        let (a, b) = (s.vertex_node[u], s.vertex_node[v]);
        if !ancestor(a, b) && !ancestor(b, a) {
            out.push(TreeViolation::CrossingEdge { u, v });
        }
    }
    for id in 0..s.nodes.len() {
        if connected_components(g, &s.subtree_vertices(id)).len() != 1 {
            out.push(TreeViolation::DisconnectedChild { node: id });
        }
    }
    out
}
