//! Track and queue layouts of planar graphs built from layered separators.
//!
//! The pipeline triangulates an embedded planar graph, decomposes it with
//! BFS-cycle separators, assigns tracks from the decomposition tree, wraps
//! each depth onto a bounded number of tracks, and derives queue layouts and
//! 3D grid drawings from the result. Every stage has an independent checker.

pub mod bounds;
pub mod docs;
pub mod draw3d;
pub mod embed;
pub mod generators;
pub mod graph;
pub mod pipeline;
pub mod queue;
pub mod render;
pub mod separator;
pub mod track;

pub use docs::{DocError, DrawingDocument, GraphDocument, LayoutDocument};
pub use draw3d::{GridDrawing3D, VolumeStats};
pub use embed::{RotationSystem, Triangulation};
pub use generators::{generate, Family, FamilyKind, GeneratorSpec};
pub use graph::{Graph, Layering, Separation};
pub use pipeline::{run_pipeline, BoundReport, PipelineError, PipelineRun};
pub use queue::QueueLayout;
pub use separator::SeparatorTree;
pub use track::{FinalKey, LayerKey, TrackAssignment, TrackKey, WrappedKey};
