//! Deterministic planar graph families, each with its embedding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{EmbedError, RotationSystem};
use crate::graph::{Graph, GraphError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `rows × cols` grid with its straight-line embedding.
    Grid { rows: usize, cols: usize },
    /// Stacked triangulation grown by inserting each new vertex into the
    /// oldest remaining face (breadth-first stacking). Seed is ignored.
    StackedTriangulation { n: usize },
    /// `rings` concentric cycles of `ring_size` vertices joined by
    /// triangulated bands, capped by one vertex at each end.
    CylinderTriangulation { rings: usize, ring_size: usize },
    /// Stacked triangulation where each new vertex goes into a uniformly
    /// random face.
    RandomTriangulation { n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub seed: u64,
}

/// Family selector for experiments that only fix a target vertex count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Grid,
    Stacked,
    Cylinder,
    Random,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Grid => "grid",
            FamilyKind::Stacked => "stacked",
            FamilyKind::Cylinder => "cylinder",
            FamilyKind::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "grid" => Some(FamilyKind::Grid),
            "stacked" | "stacked_triangulation" => Some(FamilyKind::Stacked),
            "cylinder" | "cylinder_triangulation" => Some(FamilyKind::Cylinder),
            "random" | "random_triangulation" => Some(FamilyKind::Random),
            _ => None,
        }
    }

    /// Whether different seeds give different graphs.
    pub fn is_random(self) -> bool {
        self == FamilyKind::Random
    }

    /// A spec with about `n` vertices: exactly `n` except for cylinders,
    /// which round down to whole rings.
    pub fn spec(self, n: usize, seed: u64) -> GeneratorSpec {
        let family = match self {
            FamilyKind::Grid => {
                let rows = (1..=n).take_while(|r| r * r <= n).filter(|r| n.is_multiple_of(*r)).last().unwrap_or(1);
                Family::Grid { rows, cols: n / rows.max(1) }
            }
            FamilyKind::Stacked => Family::StackedTriangulation { n },
            FamilyKind::Cylinder => {
                let body = n.saturating_sub(2).max(3);
                let ring_size = ((body as f64).sqrt() as usize).max(3);
                Family::CylinderTriangulation { rings: (body / ring_size).max(1), ring_size }
            }
            FamilyKind::Random => Family::RandomTriangulation { n },
        };
        GeneratorSpec { family, seed }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<(Graph, RotationSystem), GenerateError> {
    match spec.family {
        Family::Grid { rows, cols } => grid(rows, cols),
        Family::StackedTriangulation { n } => stacked(n, None),
        Family::RandomTriangulation { n } => stacked(n, Some(spec.seed)),
        Family::CylinderTriangulation { rings, ring_size } => cylinder(rings, ring_size),
    }
}

fn from_faces(n: usize, faces: &[Vec<usize>]) -> Result<(Graph, RotationSystem), GenerateError> {
    let mut edges = Vec::new();
    for f in faces {
        for j in 0..f.len() {
            let (a, b) = (f[j], f[(j + 1) % f.len()]);
            if a < b {
                edges.push((a, b));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let g = Graph::new(n, edges)?;
    let r = RotationSystem::from_faces(&g, faces)?;
    Ok((g, r))
}

fn grid(rows: usize, cols: usize) -> Result<(Graph, RotationSystem), GenerateError> {
    if rows == 0 || cols == 0 {
        return Err(GenerateError::InvalidParameters(format!("grid {rows}x{cols}")));
    }
    let (rows, cols) = (rows.min(cols), rows.max(cols));
    let id = |r: usize, c: usize| r * cols + c;
    let n = rows * cols;
    if n == 1 {
        let g = Graph::empty(1);
        let r = RotationSystem::new(&g, vec![vec![]])?;
        return Ok((g, r));
    }
    let mut faces = Vec::new();
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols - 1 {
            faces.push(vec![id(r, c), id(r, c + 1), id(r + 1, c + 1), id(r + 1, c)]);
        }
    }
    // Boundary walked counter-clockwise, then reversed for the outer face.
    let mut boundary = Vec::new();
    if rows == 1 {
        boundary.extend((0..cols).map(|c| id(0, c)));
        boundary.extend((1..cols - 1).rev().map(|c| id(0, c)));
    } else {
        boundary.extend((0..cols).map(|c| id(0, c)));
        boundary.extend((1..rows).map(|r| id(r, cols - 1)));
        boundary.extend((0..cols - 1).rev().map(|c| id(rows - 1, c)));
        boundary.extend((1..rows - 1).rev().map(|r| id(r, 0)));
    }
    boundary.reverse();
    faces.push(boundary);
    from_faces(n, &faces)
}

fn stacked(n: usize, seed: Option<u64>) -> Result<(Graph, RotationSystem), GenerateError> {
    if n < 3 {
        return Err(GenerateError::InvalidParameters(format!("triangulation needs n >= 3, got {n}")));
    }
    let mut faces: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1]];
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut head = 0;
    for x in 3..n {
        let [a, b, c] = match rng.as_mut() {
            Some(rng) => {
                let i = rng.gen_range(0..faces.len());
                faces.swap_remove(i)
            }
            None => {
                let f = faces[head];
                head += 1;
                f
            }
        };
        faces.push([a, b, x]);
        faces.push([b, c, x]);
        faces.push([c, a, x]);
    }
    let live: Vec<Vec<usize>> = faces[head..].iter().map(|f| f.to_vec()).collect();
    from_faces(n, &live)
}

fn cylinder(rings: usize, k: usize) -> Result<(Graph, RotationSystem), GenerateError> {
    if rings == 0 || k < 3 {
        return Err(GenerateError::InvalidParameters(format!(
            "cylinder needs rings >= 1 and ring_size >= 3, got {rings}, {k}"
        )));
    }
    let id = |r: usize, j: usize| r * k + (j % k);
    let inner = rings * k;
    let outer = inner + 1;
    let mut faces = Vec::new();
    for j in 0..k {
        faces.push(vec![inner, id(0, j), id(0, j + 1)]);
        faces.push(vec![outer, id(rings - 1, j + 1), id(rings - 1, j)]);
    }
    for r in 0..rings - 1 {
        for j in 0..k {
            faces.push(vec![id(r, j), id(r + 1, j), id(r, j + 1)]);
            faces.push(vec![id(r, j + 1), id(r + 1, j), id(r + 1, j + 1)]);
        }
    }
    from_faces(rings * k + 2, &faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{faces, Triangulation};

    fn spec(family: Family) -> GeneratorSpec {
        GeneratorSpec { family, seed: 7 }
    }

    #[test]
    fn grid_2x2_is_c4() {
        let (g, r) = generate(&spec(Family::Grid { rows: 2, cols: 2 })).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));
        assert_eq!(faces(&g, &r).unwrap().len(), 2);
    }

    #[test]
    fn degenerate_grids() {
        let (g, r) = generate(&spec(Family::Grid { rows: 1, cols: 1 })).unwrap();
        assert_eq!(g.vertex_count(), 1);
        faces(&g, &r).unwrap();
        let (g, r) = generate(&spec(Family::Grid { rows: 1, cols: 5 })).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(faces(&g, &r).unwrap().len(), 1);
        assert!(generate(&spec(Family::Grid { rows: 0, cols: 5 })).is_err());
    }

    #[test]
    fn stacked_four_is_k4() {
        let (g, _) = generate(&spec(Family::StackedTriangulation { n: 4 })).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!((0..4).all(|v| g.degree(v) == 3));
    }

    #[test]
    fn triangulations_have_3n_minus_6_edges() {
        for n in 3..40 {
            for family in [Family::StackedTriangulation { n }, Family::RandomTriangulation { n }] {
                let (g, r) = generate(&spec(family)).unwrap();
                assert_eq!(g.edge_count(), 3 * n - 6);
                let t = Triangulation { graph: g, rotation: r, added_edges: vec![] };
                t.validate().unwrap();
            }
        }
        let (g, r) = generate(&spec(Family::CylinderTriangulation { rings: 4, ring_size: 5 })).unwrap();
        assert_eq!(g.vertex_count(), 22);
        let t = Triangulation { graph: g, rotation: r, added_edges: vec![] };
        t.validate().unwrap();
    }

    #[test]
    fn deterministic_and_seeded() {
        let a = generate(&spec(Family::RandomTriangulation { n: 60 })).unwrap();
        let b = generate(&spec(Family::RandomTriangulation { n: 60 })).unwrap();
        assert_eq!(a, b);
        let c = generate(&GeneratorSpec { family: Family::RandomTriangulation { n: 60 }, seed: 8 }).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn every_family_passes_euler() {
        for kind in [FamilyKind::Grid, FamilyKind::Stacked, FamilyKind::Cylinder, FamilyKind::Random] {
            for n in [5, 10, 37, 100] {
                let (g, r) = generate(&kind.spec(n, 1)).unwrap();
                faces(&g, &r).unwrap();
                if kind != FamilyKind::Cylinder {
                    assert_eq!(g.vertex_count(), n);
                }
            }
        }
    }

    #[test]
    fn grid_dimensions_for_target_sizes() {
        let dims = |n| match FamilyKind::Grid.spec(n, 0).family {
            Family::Grid { rows, cols } => (rows, cols),
            _ => unreachable!(),
        };
        assert_eq!(dims(10), (2, 5));
        assert_eq!(dims(100), (10, 10));
        assert_eq!(dims(5000), (50, 100));
    }
}
