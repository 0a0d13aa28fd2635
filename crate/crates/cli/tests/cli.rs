use std::path::Path;
use std::process::{Command, Output};

fn qtrack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtrack")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = qtrack(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn generate_layout_draw_render_verify() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, layout, drawing) = (path(dir.path(), "g.json"), path(dir.path(), "l.json"), path(dir.path(), "d.json"));
    ok(&["generate", "--family", "random", "--n", "60", "--seed", "4", "-o", &graph]);
    let out = ok(&["layout", "-i", &graph, "-o", &layout]);
    let stderr: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(stderr["bounds"]["tracks"].as_u64().unwrap() <= stderr["bounds"]["track_bound"].as_u64().unwrap());
    ok(&["draw", "-i", &layout, "-o", &drawing]);
    for file in [&graph, &layout, &drawing] {
        let out = ok(&["verify", file]);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["valid"], true);
    }
    let svg = ok(&["render", "-i", &layout]).stdout;
    assert!(String::from_utf8(svg).unwrap().starts_with("<svg"));
    let obj = String::from_utf8(ok(&["render", "-i", &drawing]).stdout).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 60);
    let obj = String::from_utf8(ok(&["draw", "-i", &layout, "--format", "obj"]).stdout).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("l ")).count(), 3 * 60 - 6);
}

#[test]
fn layout_from_generator_flags() {
    let out = ok(&["layout", "--family", "grid", "--rows", "5", "--cols", "6"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["format"], "qtrack-layout");
    assert_eq!(doc["graph"]["vertex_count"], 30);
}

#[test]
fn tampered_documents_fail_with_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let layout = path(dir.path(), "l.json");
    ok(&["layout", "--family", "stacked", "--n", "30", "-o", &layout]);
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&layout).unwrap()).unwrap();
    doc["bounds"]["tracks"] = serde_json::json!(1);
    std::fs::write(&layout, doc.to_string()).unwrap();
    let out = qtrack(&["verify", &layout]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "invalid");
    // Trusted loads skip validation.
    assert!(qtrack(&["--trust", "render", "-i", &layout]).status.success());
}

#[test]
fn disconnected_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let graph = path(dir.path(), "g.json");
    std::fs::write(&graph, r#"{"format":"qtrack-graph","version":1,"vertex_count":3,"edges":[[0,1]]}"#).unwrap();
    let out = qtrack(&["layout", "-i", &graph]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "pipeline");
}

#[test]
fn experiment_csv() {
    let out = ok(&["experiment", "--families", "stacked,grid", "--sizes", "20,50", "--seeds", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,seed,n,tree_depth,depth_bound,tracks,track_bound,queues,X,Y,Z,volume,wall_time_ms");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("grid,1,20,"));
    let out = ok(&["experiment", "--families", "stacked", "--sizes"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}
