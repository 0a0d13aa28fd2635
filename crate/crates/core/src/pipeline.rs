//! End-to-end driver: augmentation, separator tree, track layouts, queues,
//! and the experiment runner built on it.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds;
use crate::draw3d::{draw, verify_drawing, volume_stats, DrawError, DrawOptions, GridDrawing3D, VolumeStats};
use crate::embed::{augment_to_triangulation, EmbedError, RotationSystem, Triangulation};
use crate::generators::{generate, FamilyKind, GenerateError};
use crate::graph::{Graph, GraphError, Layering};
use crate::queue::{tracks_to_queues, validate_queue_layout, QueueError, QueueLayout};
use crate::separator::{bfs_tree, build_separator_tree, verify_separator_tree, BfsTree, SeparatorError, SeparatorTree};
use crate::track::{
    assign_tracks, check_wrap, coloring_violations, compose_final, extract_depth_layout, tree_track_layout,
    verify_no_xcrossing, verify_tree_track_layout, FinalKey, TrackAssignment, TrackError, TrackKey, TreeTrackLayout,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input graph has no vertices")]
    EmptyGraph,
    #[error("input graph is disconnected")]
    Disconnected,
    #[error("input graph needs a rotation system")]
    MissingRotation,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Separator(#[from] SeparatorError),
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Queue(#[from] QueueError),
    #[error(transparent)]
    Draw(#[from] DrawError),
    #[error("invariant violated: {0}")]
    Violation(String),
    #[error("bound violated: {0:?}")]
    Bound(Box<ExperimentRow>),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The inequalities certified by one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub ell: usize,
    pub tracks: usize,
    pub track_bound: usize,
    pub queues: usize,
    pub tree_depth: usize,
    pub depth_bound: usize,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.tracks <= self.track_bound && self.tree_depth <= self.depth_bound && self.queues < self.tracks.max(1)
    }
}

/// Every intermediate structure of a verified run.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub graph: Graph,
    pub triangulation: Triangulation,
    pub bfs: BfsTree,
    pub layering: Layering,
    pub tree: SeparatorTree,
    pub tree_layout: TreeTrackLayout,
    pub layout_t: TrackAssignment<TrackKey>,
    pub layout_final: TrackAssignment<FinalKey>,
    pub queues: QueueLayout,
    pub report: BoundReport,
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), PipelineError> {
    if ok {
        Ok(())
    } else {
        Err(PipelineError::Violation(what()))
    }
}

/// Any rotation of a tree is planar, so trees may omit one.
fn default_rotation(g: &Graph) -> Option<RotationSystem> {
    if g.edge_count() + 1 != g.vertex_count() {
        return None;
    }
    RotationSystem::new(g, (0..g.vertex_count()).map(|v| g.neighbors(v).to_vec()).collect()).ok()
}

/// Runs every stage and re-checks every guarantee; the returned run is
/// fully verified.
pub fn run_pipeline(g: &Graph, rotation: Option<&RotationSystem>, ell: usize) -> Result<PipelineRun, PipelineError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(PipelineError::EmptyGraph);
    }
    if !g.is_connected() {
        return Err(PipelineError::Disconnected);
    }
    let fallback;
    let rotation = match rotation {
        Some(r) => r,
        None => {
            fallback = default_rotation(g).ok_or(PipelineError::MissingRotation)?;
            &fallback
        }
    };
    let tri = augment_to_triangulation(g, rotation)?;
    ensure(g.edges().iter().all(|&(u, v)| tri.graph.has_edge(u, v)), || "triangulation lost an input edge".into())?;
    let h = &tri.graph;
    let (bfs, layering) = bfs_tree(&tri, 0)?;
    let tree = build_separator_tree(&tri, &bfs, &layering, ell)?;
    let problems = verify_separator_tree(h, &layering, &tree);
    ensure(problems.is_empty(), || format!("separator tree: {}", problems[0]))?;

    let tree_layout = tree_track_layout(&tree);
    let problems = verify_tree_track_layout(&tree, &tree_layout);
    ensure(problems.is_empty(), || format!("tree track layout: {}", problems[0]))?;

    let layout_t = assign_tracks(&tree, &layering, &tree_layout)?;
    check_track_layout(h, &layout_t, "T")?;

    let mut wrapped = Vec::new();
    for d in 1..=tree.height() {
        let depth = extract_depth_layout(h, &layout_t, d, ell)?;
        if depth.layout().is_empty() {
            continue;
        }
        let w = depth.wrap(h)?;
        let problems = check_wrap(h, depth.layout(), w.layout(), ell);
        ensure(problems.is_empty(), || format!("wrap at depth {d}: {:?}", problems[0]))?;
        wrapped.push(w);
    }
    let layout_final = compose_final(&layout_t, &wrapped)?;
    check_track_layout(h, &layout_final, "T'")?;

    let queues = tracks_to_queues(g, &layout_final)?;
    let nested = validate_queue_layout(g, &queues)?;
    ensure(nested.is_empty(), || format!("queue layout: {:?}", nested[0]))?;

    let report = BoundReport {
        n,
        ell,
        tracks: layout_final.track_count(),
        track_bound: bounds::track_bound(n, ell),
        queues: queues.queue_count,
        tree_depth: tree.height(),
        depth_bound: bounds::depth_bound(n),
    };
    ensure(report.holds(), || format!("{report:?}"))?;
    Ok(PipelineRun {
        graph: g.clone(),
        triangulation: tri,
        bfs,
        layering,
        tree,
        tree_layout,
        layout_t,
        layout_final,
        queues,
        report,
    })
}

fn check_track_layout<K: Ord + Copy + std::fmt::Debug>(
    g: &Graph,
    t: &TrackAssignment<K>,
    name: &str,
) -> Result<(), PipelineError> {
    ensure(t.len() == g.vertex_count(), || format!("{name} does not cover every vertex"))?;
    let same = coloring_violations(g, t);
    ensure(same.is_empty(), || format!("{name}: edge {:?} inside one track", same[0]))?;
    let x = verify_no_xcrossing(g, t);
    ensure(x.is_empty(), || format!("{name}: {} X-crossings, first {:?}", x.len(), x[0]))
}

/// Draws the final layout of a run and checks the drawing exactly,
/// including the bounding-box limits of the column placement.
pub fn draw_run(run: &PipelineRun, opts: DrawOptions) -> Result<(GridDrawing3D, VolumeStats), PipelineError> {
    let d = draw(&run.graph, &run.layout_final, opts)?;
    let problems = verify_drawing(&run.graph, &d)?;
    ensure(problems.is_empty(), || format!("drawing: {:?}", problems[0]))?;
    let stats = volume_stats(&d);
    let t = run.layout_final.track_count() as u64;
    ensure(stats.x <= t && stats.y <= (t - 1) * (t - 1) + 1, || format!("drawing box {stats:?} for {t} tracks"))?;
    Ok((d, stats))
}

/// One CSV row of an experiment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub family: String,
    pub seed: u64,
    pub n: usize,
    pub tree_depth: usize,
    pub depth_bound: usize,
    pub tracks: usize,
    pub track_bound: usize,
    pub queues: usize,
    #[serde(rename = "X")]
    pub x: u64,
    #[serde(rename = "Y")]
    pub y: u64,
    #[serde(rename = "Z")]
    pub z: u64,
    pub volume: u128,
    pub wall_time_ms: u64,
}

impl ExperimentRow {
    pub fn within_bounds(&self) -> bool {
        self.tracks <= self.track_bound && self.tree_depth <= self.depth_bound
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub families: Vec<FamilyKind>,
    pub sizes: Vec<usize>,
    /// Seeds for random families; deterministic families use the first.
    pub seeds: Vec<u64>,
    pub ell: usize,
    pub draw: bool,
}

/// Runs one verified pipeline per (family, size, seed) cell and returns
/// the rows sorted by family, size and seed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>, PipelineError> {
    let mut rows = Vec::new();
    for &family in &cfg.families {
        let seeds: &[u64] = if family.is_random() { &cfg.seeds } else { &cfg.seeds[..cfg.seeds.len().min(1)] };
        let seeds = if seeds.is_empty() { &[0][..] } else { seeds };
        for &n in &cfg.sizes {
            for &seed in seeds {
                let start = Instant::now();
                let (g, r) = generate(&family.spec(n, seed))?;
                let run = run_pipeline(&g, Some(&r), cfg.ell)?;
                let stats = if cfg.draw {
                    draw_run(&run, DrawOptions::default())?.1
                } else {
                    VolumeStats { x: 0, y: 0, z: 0, volume: 0 }
                };
                let rep = &run.report;
                let row = ExperimentRow {
                    family: family.name().to_string(),
                    seed,
                    n: rep.n,
                    tree_depth: rep.tree_depth,
                    depth_bound: rep.depth_bound,
                    tracks: rep.tracks,
                    track_bound: rep.track_bound,
                    queues: rep.queues,
                    x: stats.x,
                    y: stats.y,
                    z: stats.z,
                    volume: stats.volume,
                    wall_time_ms: start.elapsed().as_millis() as u64,
                };
                if !row.within_bounds() {
                    return Err(PipelineError::Bound(Box::new(row)));
                }
                rows.push(row);
            }
        }
    }
    rows.sort_by(|a, b| (&a.family, a.n, a.seed).cmp(&(&b.family, b.n, b.seed)));
    Ok(rows)
}

pub const CSV_HEADER: [&str; 13] = [
    "family",
    "seed",
    "n",
    "tree_depth",
    "depth_bound",
    "tracks",
    "track_bound",
    "queues",
    "X",
    "Y",
    "Z",
    "volume",
    "wall_time_ms",
];

/// Writes rows as CSV; the header is written even when there are no rows.
pub fn write_csv(rows: &[ExperimentRow], out: impl Write) -> Result<(), PipelineError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{Family, GeneratorSpec};

    fn run(family: Family, seed: u64) -> PipelineRun {
        let (g, r) = generate(&GeneratorSpec { family, seed }).unwrap();
        run_pipeline(&g, Some(&r), 2).unwrap()
    }

    #[test]
    fn stacked_hundred_meets_bounds() {
        let r = run(Family::StackedTriangulation { n: 100 }, 0);
        assert!(r.report.tracks <= 78);
        assert!(r.report.queues <= 77);
        assert!(r.report.tree_depth <= 13);
    }

    #[test]
    fn single_vertex() {
        let r = run_pipeline(&Graph::empty(1), None, 2).unwrap();
        assert_eq!((r.report.tracks, r.report.queues, r.report.tree_depth), (1, 0, 1));
        let (d, s) = draw_run(&r, DrawOptions::default()).unwrap();
        assert_eq!(d.positions.len(), 1);
        assert_eq!(s.volume, 1);
    }

    #[test]
    fn small_inputs() {
        let edge = Graph::new(2, [(0, 1)]).unwrap();
        let r = run_pipeline(&edge, None, 2).unwrap();
        assert_eq!((r.report.tracks, r.report.queues), (2, 1));
        for n in 3..12 {
            let path = Graph::new(n, (1..n).map(|v| (v - 1, v))).unwrap();
            let r = run_pipeline(&path, None, 2).unwrap();
            if n <= crate::queue::EXACT_QUEUE_LIMIT {
                assert!(crate::queue::exact_queue_number(&path).unwrap() <= r.report.queues);
            }
            let star = Graph::new(n, (1..n).map(|v| (0, v))).unwrap();
            run_pipeline(&star, None, 2).unwrap();
        }
    }

    #[test]
    fn error_paths() {
        let two = Graph::empty(2);
        assert!(matches!(run_pipeline(&two, None, 2), Err(PipelineError::Disconnected)));
        assert!(matches!(run_pipeline(&Graph::empty(0), None, 2), Err(PipelineError::EmptyGraph)));
        let c4 = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert!(matches!(run_pipeline(&c4, None, 2), Err(PipelineError::MissingRotation)));
    }

    #[test]
    fn grid_twenty_and_drawings() {
        let r = run(Family::Grid { rows: 20, cols: 20 }, 0);
        assert!(r.report.holds());
        let r = run(Family::Grid { rows: 8, cols: 8 }, 0);
        draw_run(&r, DrawOptions::default()).unwrap();
        let r = run(Family::RandomTriangulation { n: 200 }, 4);
        draw_run(&r, DrawOptions::default()).unwrap();
    }

    #[test]
    fn experiment_rows_and_csv() {
        let cfg = ExperimentConfig {
            families: vec![FamilyKind::Random, FamilyKind::Stacked],
            sizes: vec![100, 30],
            seeds: vec![2, 1],
            ell: 2,
            draw: true,
        };
        let rows = run_experiment(&cfg).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!((rows[0].family.as_str(), rows[0].n, rows[0].seed), ("random", 30, 1));
        assert!(rows.iter().all(ExperimentRow::within_bounds));
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(text
            .starts_with("family,seed,n,tree_depth,depth_bound,tracks,track_bound,queues,X,Y,Z,volume,wall_time_ms\n"));

        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
    }
}
