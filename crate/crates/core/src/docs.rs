//! Versioned JSON documents for graphs, layouts and drawings.
//!
//! Loading re-checks every structural guarantee unless the caller opts out
//! with `trust = true`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds;
use crate::draw3d::{verify_drawing, volume_stats, GridDrawing3D, VolumeStats};
use crate::embed::{faces, EmbedError, RotationSystem};
use crate::graph::{validate_layering, Graph, GraphError, Layering};
use crate::pipeline::{BoundReport, PipelineRun};
use crate::queue::{validate_queue_layout, QueueLayout};
use crate::separator::{verify_separator_tree, SeparatorTree};
use crate::track::{coloring_violations, verify_no_xcrossing, FinalKey, TrackAssignment};

pub const GRAPH_FORMAT: &str = "qtrack-graph";
pub const LAYOUT_FORMAT: &str = "qtrack-layout";
pub const DRAWING_FORMAT: &str = "qtrack-drawing";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected format {expected:?} version {VERSION}, found {found:?} version {version}")]
    Format { expected: &'static str, found: String, version: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("document failed validation: {0}")]
    Invalid(String),
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), DocError> {
    if ok {
        Ok(())
    } else {
        Err(DocError::Invalid(what()))
    }
}

fn check_header(expected: &'static str, found: &str, version: u32) -> Result<(), DocError> {
    if found == expected && version == VERSION {
        Ok(())
    } else {
        Err(DocError::Format { expected, found: found.to_string(), version })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub format: String,
    pub version: u32,
    pub vertex_count: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl GraphDocument {
    pub fn new(g: &Graph, rotation: Option<&RotationSystem>) -> Self {
        GraphDocument {
            format: GRAPH_FORMAT.into(),
            version: VERSION,
            vertex_count: g.vertex_count(),
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
            rotation: rotation.map(|r| r.as_lists().to_vec()),
            metadata: BTreeMap::new(),
        }
    }

    /// Graph and rotation; a rotation must also pass the planarity check.
    pub fn to_graph(&self) -> Result<(Graph, Option<RotationSystem>), DocError> {
        check_header(GRAPH_FORMAT, &self.format, self.version)?;
        let g = Graph::new(self.vertex_count, self.edges.iter().map(|e| (e[0], e[1])))?;
        check(g.edge_count() == self.edges.len(), || "duplicate edges".into())?;
        let r = match &self.rotation {
            Some(order) => {
                let r = RotationSystem::new(&g, order.clone())?;
                faces(&g, &r)?;
                Some(r)
            }
            None => None,
        };
        Ok((g, r))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn from_json(text: &str, trust: bool) -> Result<Self, DocError> {
        let doc: Self = serde_json::from_str(text)?;
        check_header(GRAPH_FORMAT, &doc.format, doc.version)?;
        if !trust {
            doc.to_graph()?;
        }
        Ok(doc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub parent: Vec<Option<usize>>,
    pub vertex_node: Vec<usize>,
    /// Per node, off-separator vertex counts on each side; `null` for leaves.
    pub sides: Vec<Option<[usize; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackDocument {
    pub depth: usize,
    pub residue: usize,
    pub slot: usize,
    /// Vertices in track order.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutDocument {
    pub format: String,
    pub version: u32,
    pub ell: usize,
    pub graph: GraphDocument,
    /// Edges added to reach the triangulation the tree was built on.
    pub augmented_edges: Vec<[usize; 2]>,
    pub layering: Vec<usize>,
    pub separator_tree: TreeDocument,
    /// Final tracks in track order.
    pub tracks: Vec<TrackDocument>,
    pub queues: QueueLayout,
    pub bounds: BoundReport,
}

/// The structures a layout document describes.
#[derive(Clone, Debug)]
pub struct LoadedLayout {
    pub graph: Graph,
    pub rotation: Option<RotationSystem>,
    pub augmented: Graph,
    pub layering: Layering,
    pub tree: SeparatorTree,
    pub tracks: TrackAssignment<FinalKey>,
    pub queues: QueueLayout,
}

impl LayoutDocument {
    pub fn from_run(run: &PipelineRun, rotation: Option<&RotationSystem>) -> Self {
        let tree = &run.tree;
        LayoutDocument {
            format: LAYOUT_FORMAT.into(),
            version: VERSION,
            ell: tree.ell,
            graph: GraphDocument::new(&run.graph, rotation),
            augmented_edges: run.triangulation.added_edges.iter().map(|&(u, v)| [u, v]).collect(),
            layering: run.layering.as_slice().to_vec(),
            separator_tree: TreeDocument {
                parent: tree.parents(),
                vertex_node: tree.vertex_node.clone(),
                sides: tree.nodes.iter().map(|s| s.sides.map(|(a, b)| [a, b])).collect(),
            },
            tracks: run
                .layout_final
                .keys()
                .iter()
                .zip(run.layout_final.tracks())
                .map(|(k, seq)| TrackDocument {
                    depth: k.depth,
                    residue: k.residue,
                    slot: k.slot,
                    vertices: seq.clone(),
                })
                .collect(),
            queues: run.queues.clone(),
            bounds: run.report.clone(),
        }
    }

    /// Rebuilds the structures, running every validator unless `trust`.
    pub fn load(&self, trust: bool) -> Result<LoadedLayout, DocError> {
        check_header(LAYOUT_FORMAT, &self.format, self.version)?;
        let (graph, rotation) = self.graph.to_graph()?;
        let n = graph.vertex_count();
        let extra: Vec<(usize, usize)> = self.augmented_edges.iter().map(|e| (e[0], e[1])).collect();
        check(extra.iter().all(|&(u, v)| !graph.has_edge(u, v)), || "augmented edge repeats an input edge".into())?;
        let augmented = graph.with_edges(&extra)?;
        check(self.layering.len() == n, || "layering length".into())?;
        let layering = Layering::new(self.layering.clone());
        let sides: Vec<Option<(usize, usize)>> =
            self.separator_tree.sides.iter().map(|s| s.map(|[a, b]| (a, b))).collect();
        let tree = SeparatorTree::from_parts(
            self.ell,
            &self.separator_tree.parent,
            self.separator_tree.vertex_node.clone(),
            &sides,
        )
        .map_err(|e| DocError::Invalid(e.to_string()))?;
        let track_map: BTreeMap<FinalKey, Vec<usize>> = self
            .tracks
            .iter()
            .map(|t| (FinalKey { depth: t.depth, residue: t.residue, slot: t.slot }, t.vertices.clone()))
            .collect();
        check(track_map.len() == self.tracks.len(), || "repeated track key".into())?;
        check(track_map.values().eq(self.tracks.iter().map(|t| &t.vertices)), || "tracks are not in key order".into())?;
        let tracks = TrackAssignment::from_tracks(n, track_map).map_err(|e| DocError::Invalid(e.to_string()))?;
        let loaded = LoadedLayout { graph, rotation, augmented, layering, tree, tracks, queues: self.queues.clone() };
        if !trust {
            self.validate(&loaded)?;
        }
        Ok(loaded)
    }

    fn validate(&self, x: &LoadedLayout) -> Result<(), DocError> {
        let n = x.graph.vertex_count();
        let h = &x.augmented;
        check(h.is_connected(), || "augmented graph is disconnected".into())?;
        let gaps = validate_layering(h, &x.layering)?;
        check(gaps.is_empty(), || format!("layering: edge {:?} skips a layer", gaps[0]))?;
        let problems = verify_separator_tree(h, &x.layering, &x.tree);
        check(problems.is_empty(), || format!("separator tree: {}", problems[0]))?;
        check(x.tracks.len() == n, || "tracks do not cover every vertex".into())?;
        for v in 0..n {
            let k = x.tracks.key(v).unwrap();
            let depth = x.tree.nodes[x.tree.vertex_node[v]].depth;
            check(
                k.depth == depth && k.residue == x.layering.layer(v) % 3 && (1..=self.ell).contains(&k.slot),
                || format!("vertex {v} on track {k:?} disagrees with the tree and layering"),
            )?;
        }
        let same = coloring_violations(h, &x.tracks);
        check(same.is_empty(), || format!("edge {:?} inside one track", same[0]))?;
        let cross = verify_no_xcrossing(h, &x.tracks);
        check(cross.is_empty(), || format!("{} X-crossings", cross.len()))?;
        let nested = validate_queue_layout(&x.graph, &x.queues).map_err(|e| DocError::Invalid(e.to_string()))?;
        check(nested.is_empty(), || format!("queue nesting {:?}", nested[0]))?;
        let report = BoundReport {
            n,
            ell: self.ell,
            tracks: x.tracks.track_count(),
            track_bound: bounds::track_bound(n, self.ell),
            queues: x.queues.queue_count,
            tree_depth: x.tree.height(),
            depth_bound: bounds::depth_bound(n),
        };
        check(report == self.bounds, || format!("bound report {:?} does not match {:?}", self.bounds, report))?;
        check(report.holds(), || format!("bounds violated: {report:?}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn from_json(text: &str, trust: bool) -> Result<Self, DocError> {
        let doc: Self = serde_json::from_str(text)?;
        doc.load(trust)?;
        Ok(doc)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrawingDocument {
    pub format: String,
    pub version: u32,
    pub graph: GraphDocument,
    pub positions: Vec<[i64; 3]>,
    /// Side counts `[X, Y, Z]` of the bounding box.
    pub bounding_box: [u64; 3],
    pub volume: u128,
}

impl DrawingDocument {
    pub fn new(g: &Graph, d: &GridDrawing3D) -> Self {
        let VolumeStats { x, y, z, volume } = volume_stats(d);
        DrawingDocument {
            format: DRAWING_FORMAT.into(),
            version: VERSION,
            graph: GraphDocument::new(g, None),
            positions: d.positions.clone(),
            bounding_box: [x, y, z],
            volume,
        }
    }

    pub fn load(&self, trust: bool) -> Result<(Graph, GridDrawing3D), DocError> {
        check_header(DRAWING_FORMAT, &self.format, self.version)?;
        let (g, _) = self.graph.to_graph()?;
        let d = GridDrawing3D { positions: self.positions.clone() };
        if !trust {
            let problems = verify_drawing(&g, &d).map_err(|e| DocError::Invalid(e.to_string()))?;
            check(problems.is_empty(), || format!("drawing: {:?}", problems[0]))?;
            let s = volume_stats(&d);
            check([s.x, s.y, s.z] == self.bounding_box && s.volume == self.volume, || {
                "bounding box or volume disagrees with positions".into()
            })?;
        }
        Ok((g, d))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn from_json(text: &str, trust: bool) -> Result<Self, DocError> {
        let doc: Self = serde_json::from_str(text)?;
        doc.load(trust)?;
        Ok(doc)
    }
}

/// Which of the three formats a JSON text declares.
pub fn sniff_format(text: &str) -> Result<String, DocError> {
    #[derive(Deserialize)]
    struct Header {
        format: String,
    }
    Ok(serde_json::from_str::<Header>(text)?.format)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::draw3d::DrawOptions;
    use crate::generators::{generate, Family, GeneratorSpec};
    use crate::pipeline::{draw_run, run_pipeline};

    fn sample() -> (PipelineRun, RotationSystem) {
        let (g, r) = generate(&GeneratorSpec { family: Family::RandomTriangulation { n: 40 }, seed: 3 }).unwrap();
        (run_pipeline(&g, Some(&r), 2).unwrap(), r)
    }

    #[test]
    fn graph_round_trip() {
        let (g, r) = generate(&GeneratorSpec { family: Family::Grid { rows: 3, cols: 4 }, seed: 0 }).unwrap();
        let mut doc = GraphDocument::new(&g, Some(&r));
        doc.metadata.insert("family".into(), "grid".into());
        let back = GraphDocument::from_json(&doc.to_json(), false).unwrap();
        assert_eq!(back, doc);
        let (g2, r2) = back.to_graph().unwrap();
        assert_eq!((g2, r2), (g, Some(r)));
    }

    #[test]
    fn graph_rejections() {
        let bad = r#"{"format":"qtrack-graph","version":1,"vertex_count":2,"edges":[[0,0]]}"#;
        assert!(matches!(GraphDocument::from_json(bad, false), Err(DocError::Graph(_))));
        assert!(GraphDocument::from_json(bad, true).is_ok());
        let wrong = r#"{"format":"qtrack-layout","version":1,"vertex_count":2,"edges":[]}"#;
        assert!(matches!(GraphDocument::from_json(wrong, true), Err(DocError::Format { .. })));
        assert!(matches!(GraphDocument::from_json("{", false), Err(DocError::Json(_))));
    }

    #[test]
    fn layout_round_trip_and_tamper_detection() {
        let (run, r) = sample();
        let doc = LayoutDocument::from_run(&run, Some(&r));
        let text = doc.to_json();
        let back = LayoutDocument::from_json(&text, false).unwrap();
        assert_eq!(back, doc);
        assert_eq!(sniff_format(&text).unwrap(), LAYOUT_FORMAT);

        let mut moved = doc.clone();
        let last = moved.tracks.last_mut().unwrap();
        last.residue = (last.residue + 1) % 3;
        last.slot = 9;
        assert!(moved.load(false).is_err());

        let mut bad_bound = doc.clone();
        bad_bound.bounds.tracks += 1;
        assert!(bad_bound.load(false).is_err());
        assert!(bad_bound.load(true).is_ok());

        let mut bad_tree = doc.clone();
        let root_vertex = bad_tree.separator_tree.vertex_node.iter().position(|&s| s != 0).unwrap();
        bad_tree.separator_tree.vertex_node[root_vertex] = 0;
        assert!(bad_tree.load(false).is_err());
    }

    #[test]
    fn drawing_round_trip() {
        let (run, _) = sample();
        let (d, _) = draw_run(&run, DrawOptions::default()).unwrap();
        let doc = DrawingDocument::new(&run.graph, &d);
        let back = DrawingDocument::from_json(&doc.to_json(), false).unwrap();
        assert_eq!(back, doc);
        let mut broken = doc.clone();
        broken.positions[1] = broken.positions[0];
        assert!(broken.load(false).is_err());
    }
}
