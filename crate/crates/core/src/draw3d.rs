//! Straight-line 3D grid drawings from track layouts, and an exact
//! crossing checker.
//!
//! Track `j` becomes the vertical column over `(j, j²)`. No three column
//! points are collinear, so two edges can only meet away from their shared
//! endpoints when their four columns interleave, or when both join the same
//! pair of columns. The second case is ruled out by the absence of
//! X-crossings once heights increase along each track, and the first one
//! forbids a single height per edge pair, which is skipped.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::track::{verify_no_xcrossing, TrackAssignment};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DrawError {
    #[error("track layout does not cover vertex {0}")]
    Uncovered(usize),
    #[error("track layout has {0} X-crossings")]
    XCrossings(usize),
    #[error("vertex {vertex} needs z > {z_max}; last blocked by edges {blocking:?}")]
    ZLimit { vertex: usize, z_max: i64, blocking: Option<(Edge, Edge)> },
    #[error("drawing has {got} positions for {expected} vertices")]
    WrongVertexCount { expected: usize, got: usize },
}

pub type Point = [i64; 3];

/// Edge as `(low, high)` vertex ids.
pub type Edge = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDrawing3D {
    pub positions: Vec<Point>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeStats {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub volume: u128,
}

/// Bounding box side counts and their product; all 1 for an empty drawing.
pub fn volume_stats(d: &GridDrawing3D) -> VolumeStats {
    let side = |axis: usize| {
        let lo = d.positions.iter().map(|p| p[axis]).min().unwrap_or(0);
        let hi = d.positions.iter().map(|p| p[axis]).max().unwrap_or(0);
        (hi - lo) as u64 + 1
    };
    let (x, y, z) = (side(0), side(1), side(2));
    VolumeStats { x, y, z, volume: x as u128 * y as u128 * z as u128 }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DrawOptions {
    /// Largest height tried; `None` means `64 n`.
    pub z_max: Option<i64>,
}

fn column(j: usize) -> (i128, i128) {
    (j as i128, (j * j) as i128)
}

fn cross2(a: (i128, i128), b: (i128, i128)) -> i128 {
    a.0 * b.1 - a.1 * b.0
}

fn sub2(a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
    (a.0 - b.0, a.1 - b.1)
}

/// Whether column pairs `{a, b}` and `{c, d}` (four distinct columns)
/// interleave along the curve.
fn interleaved(a: usize, b: usize, c: usize, d: usize) -> bool {
    let (lo, hi) = (a.min(b), a.max(b));
    let inside = |x: usize| lo < x && x < hi;
    inside(c) != inside(d)
}

/// Places track `j` on column `(j, j²)` and picks, vertex by vertex in
/// track order, the smallest height above the previous vertex of the track
/// that avoids every crossing with edges already drawn.
pub fn draw<K: Ord + Copy + Debug>(
    g: &Graph,
    t: &TrackAssignment<K>,
    opts: DrawOptions,
) -> Result<GridDrawing3D, DrawError> {
    let n = g.vertex_count();
    if let Some(v) = (0..n).find(|&v| !t.contains(v)) {
        return Err(DrawError::Uncovered(v));
    }
    let x = verify_no_xcrossing(g, t);
    if !x.is_empty() {
        return Err(DrawError::XCrossings(x.len()));
    }
    let z_max = opts.z_max.unwrap_or(64 * n as i64).max(1);
    let mut z = vec![0i64; n];
    let mut placed = vec![false; n];
    // Drawn edges grouped by column pair (low, high), as (low vertex, high vertex).
    let mut by_columns: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    let col = |v: usize| t.track(v).unwrap();
    for (j, seq) in t.tracks().iter().enumerate() {
        let mut floor = 0i64;
        for &v in seq {
            let mut forbidden: BTreeSet<i64> = BTreeSet::new();
            let mut witness: HashMap<i64, (Edge, Edge)> = HashMap::new();
            let a = column(j);
            for &u in g.neighbors(v).iter().filter(|&&u| placed[u]) {
                let cu = col(u);
                let b = column(cu);
                for (&(c1, c2), edges) in &by_columns {
                    if c1 == j || c2 == j || c1 == cu || c2 == cu || !interleaved(j, cu, c1, c2) {
                        continue;
                    }
                    let (pc, pd) = (column(c1), column(c2));
                    // Projections meet at A + s(B - A) = C + r(D - C).
                    let den = cross2(sub2(b, a), sub2(pd, pc));
                    let sn = cross2(sub2(pc, a), sub2(pd, pc));
                    let rn = cross2(sub2(pc, a), sub2(b, a));
                    for &(x, y) in edges {
                        // Heights agree there iff z_v (den - sn) = den z_x + rn (z_y - z_x) - sn z_u.
                        let (zx, zy, zu) = (z[x] as i128, z[y] as i128, z[u] as i128);
                        let num = den * zx + rn * (zy - zx) - sn * zu;
                        let q = den - sn;
                        if num % q == 0 {
                            let zv = num / q;
                            if zv > floor as i128 && zv <= z_max as i128 {
                                forbidden.insert(zv as i64);
                                witness.entry(zv as i64).or_insert(((v.min(u), v.max(u)), (x.min(y), x.max(y))));
                            }
                        }
                    }
                }
            }
            let mut zv = floor + 1;
            while forbidden.contains(&zv) {
                zv += 1;
            }
            if zv > z_max {
                return Err(DrawError::ZLimit { vertex: v, z_max, blocking: witness.get(&z_max).copied() });
            }
            z[v] = zv;
            floor = zv;
            placed[v] = true;
            for &u in g.neighbors(v).iter().filter(|&&u| placed[u] && u != v) {
                let cu = col(u);
                let key = (cu.min(j), cu.max(j));
                let e = if cu < j { (u, v) } else { (v, u) };
                by_columns.entry(key).or_default().push(e);
            }
        }
    }
    let positions = (0..n)
        .map(|v| {
            let (x, y) = column(col(v));
            [x as i64, y as i64, z[v]]
        })
        .collect();
    Ok(GridDrawing3D { positions })
}

/// A pair of drawn elements that touch where they should not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DrawingViolation {
    SamePosition(usize, usize),
    VertexOnEdge { vertex: usize, edge: (usize, usize) },
    Crossing((usize, usize), (usize, usize)),
    Overlap((usize, usize), (usize, usize)),
}

type P = [i128; 3];

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: P, b: P) -> P {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: P, b: P) -> i128 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn widen(p: Point) -> P {
    [p[0] as i128, p[1] as i128, p[2] as i128]
}

/// Whether `p` lies on the closed segment `ab`.
fn on_segment(p: P, a: P, b: P) -> bool {
    let (ab, ap) = (sub(b, a), sub(p, a));
    cross(ab, ap) == [0, 0, 0] && dot(ap, ab) >= 0 && dot(ap, ab) <= dot(ab, ab)
}

/// How two closed segments meet.
fn segment_contact(a: P, b: P, c: P, d: P) -> Contact {
    let (u, v, w) = (sub(b, a), sub(d, c), sub(c, a));
    let normal = cross(u, v);
    if normal == [0, 0, 0] {
        // Parallel: contact only if collinear.
        if cross(u, w) != [0, 0, 0] {
            return Contact::None;
        }
        // Project onto the line through a with direction u.
        let (t0, t1) = (dot(sub(c, a), u), dot(sub(d, a), u));
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        let (from, to) = (lo.max(0), hi.min(dot(u, u)));
        return if from > to {
            Contact::None
        } else if from == to {
            Contact::Point
        } else {
            Contact::Segment
        };
    }
    if dot(w, normal) != 0 {
        return Contact::None;
    }
    // Coplanar, not parallel: solve a + s u = c + r v in the plane.
    let nn = dot(normal, normal);
    let s_num = dot(cross(w, v), normal);
    let r_num = dot(cross(w, u), normal);
    if (0..=nn).contains(&s_num) && (0..=nn).contains(&r_num) {
        Contact::Point
    } else {
        Contact::None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Contact {
    None,
    Point,
    Segment,
}

/// All violations of a straight-line drawing, using exact integer
/// arithmetic.
pub fn verify_drawing(g: &Graph, d: &GridDrawing3D) -> Result<Vec<DrawingViolation>, DrawError> {
    let n = g.vertex_count();
    if d.positions.len() != n {
        return Err(DrawError::WrongVertexCount { expected: n, got: d.positions.len() });
    }
    let p: Vec<P> = d.positions.iter().copied().map(widen).collect();
    let mut out = Vec::new();
    let mut by_point: HashMap<P, usize> = HashMap::new();
    for (v, &pv) in p.iter().enumerate() {
        if let Some(&u) = by_point.get(&pv) {
            out.push(DrawingViolation::SamePosition(u, v));
        } else {
            by_point.insert(pv, v);
        }
    }
    let edges = g.edges();
    let bbox: Vec<(P, P)> = edges
        .iter()
        .map(|&(a, b)| {
            let lo = [0, 1, 2].map(|i| p[a][i].min(p[b][i]));
            let hi = [0, 1, 2].map(|i| p[a][i].max(p[b][i]));
            (lo, hi)
        })
        .collect();
    // Vertices strictly inside non-incident edges.
    let mut sorted_vertices: Vec<usize> = (0..n).collect();
    sorted_vertices.sort_by_key(|&v| p[v][0]);
    for (i, &(a, b)) in edges.iter().enumerate() {
        let (lo, hi) = bbox[i];
        let start = sorted_vertices.partition_point(|&v| p[v][0] < lo[0]);
        for &v in &sorted_vertices[start..] {
            if p[v][0] > hi[0] {
                break;
            }
            if v != a && v != b && (0..3).all(|k| lo[k] <= p[v][k] && p[v][k] <= hi[k]) && on_segment(p[v], p[a], p[b])
            {
                out.push(DrawingViolation::VertexOnEdge { vertex: v, edge: (a, b) });
            }
        }
    }
    // Edge pairs, swept along x.
    let mut idx: Vec<usize> = (0..edges.len()).collect();
    idx.sort_by_key(|&i| bbox[i].0[0]);
    for (k, &i) in idx.iter().enumerate() {
        let (lo_i, hi_i) = bbox[i];
        for &j in &idx[k + 1..] {
            let (lo_j, hi_j) = bbox[j];
            if lo_j[0] > hi_i[0] {
                break;
            }
            if (1..3).any(|a| lo_j[a] > hi_i[a] || lo_i[a] > hi_j[a]) {
                continue;
            }
            let (e, f) = (edges[i], edges[j]);
            let (e, f) = (e.min(f), e.max(f));
            let shared = [e.0, e.1].iter().filter(|x| **x == f.0 || **x == f.1).count();
            let contact = segment_contact(p[e.0], p[e.1], p[f.0], p[f.1]);
            match (shared, contact) {
                (_, Contact::Segment) => out.push(DrawingViolation::Overlap(e, f)),
                (0, Contact::Point) => out.push(DrawingViolation::Crossing(e, f)),
                _ => {}
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
