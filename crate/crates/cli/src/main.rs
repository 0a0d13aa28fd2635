use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qtrack_core::docs::{sniff_format, DRAWING_FORMAT, GRAPH_FORMAT, LAYOUT_FORMAT};
use qtrack_core::draw3d::{draw, verify_drawing, DrawOptions};
use qtrack_core::pipeline::{run_experiment, write_csv, ExperimentConfig};
use qtrack_core::render::{export_obj, export_track_svg};
use qtrack_core::{
    generate, run_pipeline, DrawingDocument, Family, FamilyKind, GeneratorSpec, GraphDocument, LayoutDocument,
};

#[derive(Parser)]
#[command(name = "qtrack", version, about = "Track, queue and 3D layouts of planar graphs")]
struct Cli {
    /// Skip re-validation when loading documents.
    #[arg(long, global = true)]
    trust: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph document.
    Generate {
        #[command(flatten)]
        source: GeneratorArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute and verify a layout from a graph document or a generator.
    Layout {
        #[arg(short, long, conflicts_with = "family")]
        input: Option<PathBuf>,
        #[command(flatten)]
        source: GeneratorArgs,
        #[arg(long, default_value_t = 2)]
        ell: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Load any document with full validation and report the result.
    Verify { input: PathBuf },
    /// Draw a layout document in 3D.
    Draw {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = DrawFormat::Json)]
        format: DrawFormat,
        /// Largest z coordinate to try (default 64 n).
        #[arg(long)]
        z_max: Option<i64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the pipeline over families, sizes and seeds and write CSV rows.
    Experiment {
        #[arg(long, value_delimiter = ',', default_value = "stacked,random,grid")]
        families: Vec<String>,
        /// Vertex counts; `--sizes` alone gives an empty run with just the header.
        #[arg(long, value_delimiter = ',', num_args = 0.., default_values_t = [100usize, 1000])]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3])]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 2)]
        ell: usize,
        /// Skip the 3D drawings (volume columns become 0).
        #[arg(long)]
        no_draw: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// SVG of a layout document, or OBJ of a drawing document.
    Render {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GeneratorArgs {
    /// grid, stacked, cylinder or random.
    #[arg(long)]
    family: Option<String>,
    /// Target vertex count.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    rings: Option<usize>,
    #[arg(long)]
    ring_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum DrawFormat {
    Json,
    Obj,
}

#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, e: impl ToString) -> Self {
        Failure { kind, message: e.to_string() }
    }
}

type Outcome = Result<(), Failure>;

impl GeneratorArgs {
    fn spec(&self) -> Result<GeneratorSpec, Failure> {
        let name = self.family.as_deref().ok_or_else(|| Failure::new("usage", "--family or --input is required"))?;
        let kind = FamilyKind::parse(name).ok_or_else(|| Failure::new("usage", format!("unknown family {name:?}")))?;
        let family = match (kind, self.rows, self.cols, self.rings, self.ring_size) {
            (FamilyKind::Grid, Some(rows), Some(cols), _, _) => Family::Grid { rows, cols },
            (FamilyKind::Cylinder, _, _, Some(rings), Some(ring_size)) => {
                Family::CylinderTriangulation { rings, ring_size }
            }
            _ => {
                let n = self.n.ok_or_else(|| Failure::new("usage", "size flags are required (--n)"))?;
                return Ok(kind.spec(n, self.seed));
            }
        };
        Ok(GeneratorSpec { family, seed: self.seed })
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::new("io", e))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))
}

fn write(path: &Option<PathBuf>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::new("io", format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::new("io", e)),
    }
}

fn report(value: serde_json::Value) {
    eprintln!("{value}");
}

fn run(cli: Cli) -> Outcome {
    let trust = cli.trust;
    match cli.command {
        Command::Generate { source, output } => {
            let spec = source.spec()?;
            let (g, r) = generate(&spec).map_err(|e| Failure::new("generate", e))?;
            let mut doc = GraphDocument::new(&g, Some(&r));
            doc.metadata.insert("generator".into(), serde_json::to_value(spec).expect("spec serializes"));
            write(&output, &doc.to_json())
        }
        Command::Layout { input, source, ell, output } => {
            let (g, r) = match input {
                Some(path) => {
                    let doc =
                        GraphDocument::from_json(&read(&path)?, trust).map_err(|e| Failure::new("document", e))?;
                    doc.to_graph().map_err(|e| Failure::new("document", e))?
                }
                None => {
                    let (g, r) = generate(&source.spec()?).map_err(|e| Failure::new("generate", e))?;
                    (g, Some(r))
                }
            };
            let run = run_pipeline(&g, r.as_ref(), ell).map_err(|e| Failure::new("pipeline", e))?;
            report(json!({ "bounds": run.report }));
            write(&output, &LayoutDocument::from_run(&run, r.as_ref()).to_json())
        }
        Command::Verify { input } => {
            let text = read(&input)?;
            let format = sniff_format(&text).map_err(|e| Failure::new("document", e))?;
            let doc = |e| Failure::new("invalid", e);
            match format.as_str() {
                GRAPH_FORMAT => drop(GraphDocument::from_json(&text, false).map_err(doc)?),
                LAYOUT_FORMAT => drop(LayoutDocument::from_json(&text, false).map_err(doc)?),
                DRAWING_FORMAT => drop(DrawingDocument::from_json(&text, false).map_err(doc)?),
                other => return Err(Failure::new("document", format!("unknown format {other:?}"))),
            }
            println!("{}", json!({ "format": format, "valid": true }));
            Ok(())
        }
        Command::Draw { input, format, z_max, output } => {
            let doc = LayoutDocument::from_json(&read(&input)?, trust).map_err(|e| Failure::new("document", e))?;
            let layout = doc.load(true).map_err(|e| Failure::new("document", e))?;
            let d = draw(&layout.graph, &layout.tracks, DrawOptions { z_max }).map_err(|e| Failure::new("draw", e))?;
            let problems = verify_drawing(&layout.graph, &d).map_err(|e| Failure::new("draw", e))?;
            if let Some(p) = problems.first() {
                return Err(Failure::new("draw", format!("{} violations, first {p:?}", problems.len())));
            }
            let out = DrawingDocument::new(&layout.graph, &d);
            report(json!({ "bounding_box": out.bounding_box, "volume": out.volume.to_string() }));
            match format {
                DrawFormat::Json => write(&output, &out.to_json()),
                DrawFormat::Obj => write(&output, &export_obj(&out)),
            }
        }
        Command::Experiment { families, sizes, seeds, ell, no_draw, output } => {
            let families = families
                .iter()
                .map(|f| FamilyKind::parse(f).ok_or_else(|| Failure::new("usage", format!("unknown family {f:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let cfg = ExperimentConfig { families, sizes, seeds, ell, draw: !no_draw };
            let rows = run_experiment(&cfg).map_err(|e| Failure::new("experiment", e))?;
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf).map_err(|e| Failure::new("io", e))?;
            report(json!({ "rows": rows.len(), "all_within_bounds": rows.iter().all(|r| r.within_bounds()) }));
            write(&output, &String::from_utf8(buf).expect("csv is utf-8"))
        }
        Command::Render { input, output } => {
            let text = read(&input)?;
            let format = sniff_format(&text).map_err(|e| Failure::new("document", e))?;
            match format.as_str() {
                LAYOUT_FORMAT => {
                    let doc = LayoutDocument::from_json(&text, trust).map_err(|e| Failure::new("document", e))?;
                    write(&output, &export_track_svg(&doc))
                }
                DRAWING_FORMAT => {
                    let doc = DrawingDocument::from_json(&text, trust).map_err(|e| Failure::new("document", e))?;
                    write(&output, &export_obj(&doc))
                }
                other => Err(Failure::new("document", format!("cannot render {other:?}"))),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            report(json!({ "error": { "kind": f.kind, "message": f.message } }));
            ExitCode::from(2)
        }
    }
}
