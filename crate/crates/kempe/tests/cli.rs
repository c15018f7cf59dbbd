use std::fs;
use std::path::Path;

use kempe::cli::run;
use kempe::json::{from_json, to_json};

fn kempe(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("kempe").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn compile_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let sq = path(dir.path(), "sq.json");
    let (code, out, _) = kempe(&["compile", "--expr", "z*z+1", "--center", "0", "--radius", "1", "-o", &sq]);
    assert_eq!(code, 0);
    assert!(out.contains("sym_order"));
    let (code, out, _) = kempe(&["eval", &sq, "--input", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "2+0i");
    for branch in ["1", "77", "123456"] {
        let (_, other, _) = kempe(&["eval", &sq, "--input", "0.3-0.4i", "--branch", branch]);
        assert_eq!(other.trim(), "0.93-0.24i");
    }
    let (code, _, err) = kempe(&["eval", &sq, "--input", "1.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("outside the certified ball"));
}

#[test]
fn loaded_documents_reserialize_identically_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "zw.json");
    assert_eq!(kempe(&["compile", "--expr", "z*w", "-o", &file]).0, 0);
    let text = fs::read_to_string(&file).unwrap();
    let doc = from_json(&text).unwrap();
    assert_eq!(to_json(&doc), text);
    let (code, out, _) = kempe(&["verify", &file, "--samples", "50"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("PASS\n"));
}

#[test]
fn verify_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "neg.json");
    assert_eq!(kempe(&["compile", "--expr", "-z", "-o", &file]).0, 0);
    // Claim a different map than the one compiled.
    let text = fs::read_to_string(&file).unwrap().replace("\"expr\": \"-z\"", "\"expr\": \"z\"");
    fs::write(&file, text).unwrap();
    let (code, out, _) = kempe(&["verify", &file, "--samples", "20"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(kempe(&[]).0, 2);
    assert_eq!(kempe(&["frobnicate"]).0, 2);
    assert_eq!(kempe(&["compile", "--expr", "z*"]).0, 2);
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "x.json");
    let (code, _, err) = kempe(&["compile", "--expr", "z +* 1", "-o", &file]);
    assert_eq!(code, 2);
    assert!(err.contains("unexpected"));
    assert_eq!(kempe(&["info", &path(dir.path(), "missing.json")]).0, 2);
}

#[test]
fn curve_trace_writes_a_closed_polygon() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "circle.json");
    let svg = path(dir.path(), "circle.svg");
    let (code, out, _) = kempe(&["compile", "--expr", "z*conj(z) - 1", "--curve", "--radius", "2", "-o", &file]);
    assert_eq!(code, 0);
    assert!(out.contains("closed"));
    let (code, table, _) = kempe(&["trace", &file, "--seed", "1", "--step", "0.05", "--svg", &svg]);
    assert_eq!(code, 0);
    assert!(table.contains("exit Closed"));
    let rows: Vec<&str> = table.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(rows.len() > 100);
    for row in rows {
        let cols: Vec<f64> = row.split_whitespace().skip(1).map(|c| c.parse().unwrap()).collect();
        assert!((cols[0].hypot(cols[1]) - 1.0).abs() < 1e-8);
    }
    assert!(fs::read_to_string(&svg).unwrap().contains("<polygon"));
}

#[test]
fn render_draws_every_vertex_and_edge() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "neg.json");
    let svg = path(dir.path(), "neg.svg");
    assert_eq!(kempe(&["compile", "--expr", "-z", "-o", &file]).0, 0);
    assert_eq!(kempe(&["render", &file, "--input", "0.2+0.1i", "--svg", &svg]).0, 0);
    let doc = from_json(&fs::read_to_string(&file).unwrap()).unwrap();
    let drawing = fs::read_to_string(&svg).unwrap();
    assert_eq!(drawing.matches("<circle").count(), doc.linkage.linkage.vertex_count());
    assert_eq!(drawing.matches("<line").count(), doc.linkage.linkage.edges().len());
    let (code, info, _) = kempe(&["info", &file]);
    assert_eq!(code, 0);
    assert!(info.contains(&format!("vertices {}", doc.linkage.linkage.vertex_count())));
}
