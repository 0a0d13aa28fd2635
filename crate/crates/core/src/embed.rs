//! Combinatorial planar embeddings.
//!
//! A [`RotationSystem`] lists, for every vertex, its neighbours in cyclic
//! order. Faces are traced with the usual successor rule: the dart `u → v`
//! is followed by `v → w`, where `w` comes right after `u` in the rotation
//! at `v`.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::graph::{connected_components, Graph, GraphError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error("rotation has {got} vertices, graph has {expected}")]
    WrongVertexCount { expected: usize, got: usize },
    #[error("rotation at vertex {0} does not match its neighbourhood")]
    RotationMismatch(usize),
    #[error("dart ({0}, {1}) appears in more than one face")]
    DartReused(usize, usize),
    #[error("face list misses dart ({0}, {1})")]
    DartUncovered(usize, usize),
    #[error("graph must be connected to be embedded")]
    Disconnected,
    #[error("not a planar embedding: V - E + F = {vertices} - {edges} + {faces} != 2")]
    NotPlanar { vertices: usize, edges: usize, faces: usize },
    #[error("graph is not 2-connected")]
    NotBiconnected,
    #[error("facial walk through vertex {0} is not a simple cycle")]
    FaceNotSimple(usize),
    #[error("face of length {0} has no chord-free vertex")]
    NoFanVertex(usize),
    #[error("triangulation invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Cyclic neighbour order at every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    order: Vec<Vec<usize>>,
}

impl RotationSystem {
    /// Checks that every cyclic order lists each neighbour exactly once.
    pub fn new(g: &Graph, order: Vec<Vec<usize>>) -> Result<Self, EmbedError> {
        if order.len() != g.vertex_count() {
            return Err(EmbedError::WrongVertexCount { expected: g.vertex_count(), got: order.len() });
        }
        for (v, rot) in order.iter().enumerate() {
            let mut sorted = rot.clone();
            sorted.sort_unstable();
            if sorted != g.neighbors(v) {
                return Err(EmbedError::RotationMismatch(v));
            }
        }
        Ok(RotationSystem { order })
    }

    /// Builds the rotation from facial walks.
    ///
    /// Each face is a closed vertex walk `v0 v1 … v(k-1)` meaning darts
    /// `v0→v1, …, v(k-1)→v0`; every dart of `g` must occur exactly once.
    pub fn from_faces(g: &Graph, faces: &[Vec<usize>]) -> Result<Self, EmbedError> {
        let mut succ: HashMap<(usize, usize), usize> = HashMap::new();
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        for face in faces {
            let k = face.len();
            for j in 0..k {
                let (a, b, c) = (face[j], face[(j + 1) % k], face[(j + 2) % k]);
                if !g.has_edge(a, b) {
                    return Err(EmbedError::Invariant(format!("face uses non-edge ({a}, {b})")));
                }
                if !seen.insert((a, b)) {
                    return Err(EmbedError::DartReused(a, b));
                }
                // Dart a→b is followed by b→c, so c follows a at b.
                succ.insert((b, a), c);
            }
        }
        for &(u, v) in g.edges() {
            for d in [(u, v), (v, u)] {
                if !seen.contains(&d) {
                    return Err(EmbedError::DartUncovered(d.0, d.1));
                }
            }
        }
        let mut order = Vec::with_capacity(g.vertex_count());
        for v in 0..g.vertex_count() {
            let nb = g.neighbors(v);
            let mut rot = Vec::with_capacity(nb.len());
            if let Some(&first) = nb.first() {
                let mut cur = first;
                loop {
                    rot.push(cur);
                    cur = *succ.get(&(v, cur)).ok_or(EmbedError::RotationMismatch(v))?;
                    if cur == first || rot.len() > nb.len() {
                        break;
                    }
                }
            }
            order.push(rot);
        }
        RotationSystem::new(g, order)
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.order[v]
    }

    pub fn as_lists(&self) -> &[Vec<usize>] {
        &self.order
    }

    /// Rotation restricted to the edges of `sub`, which must be a spanning
    /// subgraph of the embedded graph.
    pub fn restrict(&self, sub: &Graph) -> Result<Self, EmbedError> {
        let order = self
            .order
            .iter()
            .enumerate()
            .map(|(v, rot)| rot.iter().copied().filter(|&w| sub.has_edge(v, w)).collect())
            .collect();
        RotationSystem::new(sub, order)
    }
}

/// Dart indexing of a rotation system.
///
/// Dart `offset[v] + j` goes from `v` to `rotation(v)[j]`.
#[derive(Clone, Debug)]
pub(crate) struct Darts {
    offset: Vec<usize>,
    head: Vec<usize>,
    tail: Vec<usize>,
    twin: Vec<usize>,
}

impl Darts {
    pub(crate) fn new(r: &RotationSystem) -> Self {
        let n = r.order.len();
        let mut offset = Vec::with_capacity(n + 1);
        let mut head = Vec::new();
        let mut tail = Vec::new();
        offset.push(0);
        for (v, rot) in r.order.iter().enumerate() {
            for &w in rot {
                head.push(w);
                tail.push(v);
            }
            offset.push(head.len());
        }
        let index: HashMap<(usize, usize), usize> = (0..head.len()).map(|d| ((tail[d], head[d]), d)).collect();
        let twin = (0..head.len()).map(|d| index[&(head[d], tail[d])]).collect();
        Darts { offset, head, tail, twin }
    }

    pub(crate) fn len(&self) -> usize {
        self.head.len()
    }

    pub(crate) fn head(&self, d: usize) -> usize {
        self.head[d]
    }

    pub(crate) fn tail(&self, d: usize) -> usize {
        self.tail[d]
    }

    pub(crate) fn twin(&self, d: usize) -> usize {
        self.twin[d]
    }

    /// First dart leaving `v`, if any.
    pub(crate) fn first_out(&self, v: usize) -> Option<usize> {
        (self.offset[v] < self.offset[v + 1]).then_some(self.offset[v])
    }

    pub(crate) fn next_in_face(&self, d: usize) -> usize {
        let t = self.twin[d];
        let v = self.tail[t];
        let deg = self.offset[v + 1] - self.offset[v];
        self.offset[v] + (t - self.offset[v] + 1) % deg
    }

    /// Face id of every dart plus the face count.
    pub(crate) fn face_ids(&self) -> (Vec<usize>, usize) {
        let mut face_of = vec![usize::MAX; self.len()];
        let mut count = 0;
        for start in 0..self.len() {
            if face_of[start] != usize::MAX {
                continue;
            }
            let mut d = start;
            while face_of[d] == usize::MAX {
                face_of[d] = count;
                d = self.next_in_face(d);
            }
            count += 1;
        }
        (face_of, count)
    }
}

/// Facial walks of an embedded connected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceSet {
    /// Each face is its cyclic sequence of darts `(tail, head)`.
    pub faces: Vec<Vec<(usize, usize)>>,
    /// Index of the designated outer face (the longest walk, first on ties).
    pub outer: usize,
}

impl FaceSet {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Vertex sequence of face `f`.
    pub fn walk(&self, f: usize) -> Vec<usize> {
        self.faces[f].iter().map(|&(u, _)| u).collect()
    }
}

/// Traces all faces and checks Euler's formula.
pub fn faces(g: &Graph, r: &RotationSystem) -> Result<FaceSet, EmbedError> {
    if r.order.len() != g.vertex_count() {
        return Err(EmbedError::WrongVertexCount { expected: g.vertex_count(), got: r.order.len() });
    }
    if !g.is_connected() {
        return Err(EmbedError::Disconnected);
    }
    let darts = Darts::new(r);
    let mut out = Vec::new();
    let mut used = vec![false; darts.len()];
    for start in 0..darts.len() {
        if used[start] {
            continue;
        }
        let mut walk = Vec::new();
        let mut d = start;
        while !used[d] {
            used[d] = true;
            walk.push((darts.tail(d), darts.head(d)));
            d = darts.next_in_face(d);
        }
        out.push(walk);
    }
    if out.is_empty() {
        // A lone vertex: the plane minus a point is one face.
        out.push(Vec::new());
    }
    let (v, e, f) = (g.vertex_count(), g.edge_count(), out.len());
    if v + f != e + 2 {
        return Err(EmbedError::NotPlanar { vertices: v, edges: e, faces: f });
    }
    let mut outer = 0;
    for (i, w) in out.iter().enumerate() {
        if w.len() > out[outer].len() {
            outer = i;
        }
    }
    Ok(FaceSet { faces: out, outer })
}

/// Mutable embedding used while augmenting.
struct Augmenter {
    order: Vec<Vec<usize>>,
    adjacency: HashSet<(usize, usize)>,
    added: Vec<(usize, usize)>,
}

impl Augmenter {
    fn new(g: &Graph, r: &RotationSystem) -> Self {
        Augmenter { order: r.order.clone(), adjacency: g.edges().iter().copied().collect(), added: Vec::new() }
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency.contains(&(a.min(b), a.max(b)))
    }

    fn succ(&self, v: usize, u: usize) -> usize {
        let rot = &self.order[v];
        let p = rot.iter().position(|&x| x == u).expect("neighbour in rotation");
        rot[(p + 1) % rot.len()]
    }

    /// Adds the chord `u–w` across the corner `u → mid → w`, where
    /// `w = succ(mid, u)`; the chord lies in the face of that corner.
    fn add_corner_chord(&mut self, u: usize, mid: usize, w: usize) {
        debug_assert_eq!(self.succ(mid, u), w);
        debug_assert!(u != w && !self.adjacent(u, w));
        let pu = self.order[u].iter().position(|&x| x == mid).expect("mid adjacent to u");
        self.order[u].insert(pu, w);
        let pw = self.order[w].iter().position(|&x| x == mid).expect("mid adjacent to w");
        self.order[w].insert(pw + 1, u);
        self.adjacency.insert((u.min(w), u.max(w)));
        self.added.push((u.min(w), u.max(w)));
    }

    fn finish(self, g: &Graph) -> Result<Augmented, EmbedError> {
        let graph = g.with_edges(&self.added)?;
        let rotation = RotationSystem::new(&graph, self.order)?;
        Ok((graph, rotation, self.added))
    }
}

/// Block (biconnected component) id of every edge, indexed like `g.edges()`.
pub(crate) fn edge_blocks(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut block = vec![usize::MAX; g.edge_count()];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut next_block = 0;
    let mut edge_stack: Vec<usize> = Vec::new();
    // (vertex, parent, next neighbour index)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for s in 0..n {
        if disc[s] != usize::MAX {
            continue;
        }
        disc[s] = time;
        low[s] = time;
        time += 1;
        stack.push((s, usize::MAX, 0));
        while let Some(&mut (v, parent, ref mut i)) = stack.last_mut() {
            if *i < g.degree(v) {
                let w = g.neighbors(v)[*i];
                *i += 1;
                if disc[w] == usize::MAX {
                    edge_stack.push(g.edge_index(v, w).unwrap());
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push(g.edge_index(v, w).unwrap());
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] >= disc[parent] {
                        let tree_edge = g.edge_index(parent, v).unwrap();
                        while let Some(e) = edge_stack.pop() {
                            block[e] = next_block;
                            if e == tree_edge {
                                break;
                            }
                        }
                        next_block += 1;
                    }
                }
            }
        }
    }
    block
}

pub(crate) fn is_biconnected(g: &Graph) -> bool {
    if g.vertex_count() < 3 || !g.is_connected() {
        return false;
    }
    let blocks = edge_blocks(g);
    blocks.iter().all(|&b| b == blocks[0])
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Augmented graph, its rotation, and the edges that were added.
pub type Augmented = (Graph, RotationSystem, Vec<(usize, usize)>);

/// Adds edges inside faces until the graph is 2-connected.
///
/// At every cut vertex `v`, consecutive neighbours `u, w` in the rotation
/// that lie in different blocks are joined by a chord across the corner
/// `u → v → w`; that merges exactly those two blocks.
pub fn biconnect(g: &Graph, r: &RotationSystem) -> Result<Augmented, EmbedError> {
    faces(g, r)?;
    let blocks = edge_blocks(g);
    let mut uf: Vec<usize> = (0..blocks.iter().map(|&b| b + 1).max().unwrap_or(0)).collect();
    let mut block_of: HashMap<(usize, usize), usize> = g.edges().iter().copied().zip(blocks.iter().copied()).collect();
    let mut aug = Augmenter::new(g, r);
    if g.vertex_count() >= 3 {
        for v in 0..g.vertex_count() {
            let deg = aug.order[v].len();
            if deg < 2 {
                continue;
            }
            for j in 0..deg {
                let u = aug.order[v][j];
                let w = aug.order[v][(j + 1) % deg];
                let bu = find(&mut uf, block_of[&(u.min(v), u.max(v))]);
                let bw = find(&mut uf, block_of[&(w.min(v), w.max(v))]);
                if bu == bw {
                    continue;
                }
                aug.add_corner_chord(u, v, w);
                uf[bw] = bu;
                block_of.insert((u.min(w), u.max(w)), bu);
            }
        }
    }
    let (graph, rotation, added) = aug.finish(g)?;
    faces(&graph, &rotation)?;
    Ok((graph, rotation, added))
}

/// A maximal planar graph with its embedding and the edges that were added
/// to reach it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    pub graph: Graph,
    pub rotation: RotationSystem,
    pub added_edges: Vec<(usize, usize)>,
}

impl Triangulation {
    /// Checks every face is a triangle on three distinct vertices and
    /// `E = 3V − 6`. Graphs with at most three vertices are exempt.
    pub fn validate(&self) -> Result<(), EmbedError> {
        let fs = faces(&self.graph, &self.rotation)?;
        let v = self.graph.vertex_count();
        if v <= 3 {
            return Ok(());
        }
        if self.graph.edge_count() != 3 * v - 6 {
            return Err(EmbedError::Invariant(format!("{} edges, expected {}", self.graph.edge_count(), 3 * v - 6)));
        }
        for f in 0..fs.len() {
            let w = fs.walk(f);
            if w.len() != 3 || w[0] == w[1] || w[1] == w[2] || w[0] == w[2] {
                return Err(EmbedError::Invariant(format!("face {w:?} is not a triangle")));
            }
        }
        Ok(())
    }
}

/// Fans every non-triangular face from a vertex with no chord to the rest
/// of the face, so no parallel edge can arise.
///
/// Inputs with at most three vertices are returned unchanged.
pub fn triangulate(g: &Graph, r: &RotationSystem) -> Result<Triangulation, EmbedError> {
    let fs = faces(g, r)?;
    if g.vertex_count() <= 3 {
        return Ok(Triangulation { graph: g.clone(), rotation: r.clone(), added_edges: Vec::new() });
    }
    if !is_biconnected(g) {
        return Err(EmbedError::NotBiconnected);
    }
    let mut aug = Augmenter::new(g, r);
    for f in 0..fs.len() {
        let walk = fs.walk(f);
        let k = walk.len();
        if k == 3 {
            continue;
        }
        let mut distinct = walk.clone();
        distinct.sort_unstable();
        if let Some(w) = distinct.windows(2).find(|w| w[0] == w[1]) {
            return Err(EmbedError::FaceNotSimple(w[0]));
        }
        let start = (0..k)
            .find(|&i| {
                let v = walk[i];
                (0..k).all(|j| {
                    let d = (j + k - i) % k;
                    d <= 1 || d == k - 1 || !aug.adjacent(v, walk[j])
                })
            })
            .ok_or(EmbedError::NoFanVertex(k))?;
        let v = walk[start];
        for step in 2..k - 1 {
            let mid = walk[(start + step - 1) % k];
            let w = walk[(start + step) % k];
            aug.add_corner_chord(v, mid, w);
        }
    }
    let (graph, rotation, added_edges) = aug.finish(g)?;
    let tri = Triangulation { graph, rotation, added_edges };
    tri.validate()?;
    Ok(tri)
}

/// Runs [`biconnect`] then [`triangulate`], returning all added edges
/// together. Inputs with at most three vertices are returned unchanged.
pub fn augment_to_triangulation(g: &Graph, r: &RotationSystem) -> Result<Triangulation, EmbedError> {
    if g.vertex_count() <= 3 {
        return triangulate(g, r);
    }
    let (bg, br, mut added) = biconnect(g, r)?;
    let mut tri = triangulate(&bg, &br)?;
    added.append(&mut tri.added_edges);
    added.sort_unstable();
    tri.added_edges = added;
    Ok(tri)
}

/// Components of `g` after deleting `v`; used by tests as an independent
/// cut-vertex check.
pub fn components_without(g: &Graph, v: usize) -> usize {
    let rest: Vec<usize> = (0..g.vertex_count()).filter(|&x| x != v).collect();
    connected_components(g, &rest).len()
}
