use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use branchmap::field::{write_sf2, ScalarField2D};
use branchmap::trees::fixtures::{triangle_a, triangle_b, triangle_c};
use branchmap::trees::write_mt;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_branchmap")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn triangle_files(dir: &Path) -> [PathBuf; 3] {
    let paths = ["a.mt", "b.mt", "c.mt"].map(|n| dir.join(n));
    for (p, t) in paths.iter().zip([triangle_a(), triangle_b(), triangle_c()]) {
        write_mt(&t, p).unwrap();
    }
    paths
}

#[test]
fn dist_prints_nine_decimals() {
    let dir = TempDir::new().unwrap();
    let [a, b, c] = triangle_files(dir.path());
    assert_eq!(stdout(&run(&["dist", s(&a), s(&c)])), "5.000000000\n");
    assert_eq!(stdout(&run(&["dist", s(&a), s(&a)])), "0.000000000\n");
    let one = run(&["dist", s(&b), s(&c), "--distance", "one-degree", "--metric", "birth-persistence", "--mode", "sum"]);
    assert_eq!(stdout(&one), "3.000000000\n");
}

#[test]
fn dist_writes_mapping_json() {
    let dir = TempDir::new().unwrap();
    let [a, _, c] = triangle_files(dir.path());
    let json = dir.path().join("m.json");
    stdout(&run(&["dist", s(&a), s(&c), "--mapping", s(&json)]));
    let v: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["totalCost"], 5.0);
    assert_eq!(v["pairs"].as_array().unwrap().len(), 2);
    assert_eq!(v["metric"], "birth-persistence");
}

#[test]
fn usage_and_data_errors_have_distinct_codes() {
    let dir = TempDir::new().unwrap();
    let [a, b, _] = triangle_files(dir.path());
    assert_eq!(run(&["dist", s(&a), s(&b), "--distance", "edit"]).status.code(), Some(1));
    assert_eq!(run(&["dist", s(&a), s(&b), "--metric", "l7"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let missing = dir.path().join("missing.mt");
    assert_eq!(run(&["dist", s(&a), s(&missing)]).status.code(), Some(2));
    let bad = dir.path().join("bad.mt");
    fs::write(&bad, "MT 2\n0 0 -1\n1 oops 0\n").unwrap();
    let out = run(&["dist", s(&a), s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.mt:3"));
    let invalid = dir.path().join("invalid.mt");
    fs::write(&invalid, "MT 3\n0 0 -1\n1 5 0\n2 4 1\n").unwrap();
    assert_eq!(run(&["dist", s(&a), s(&invalid)]).status.code(), Some(2));
}

#[test]
fn tree_from_fields() {
    let dir = TempDir::new().unwrap();
    let bumps = ScalarField2D::from_fn(9, 9, |x, y| {
        let g = |cx: f64, cy: f64| (-((x - cx).powi(2) + (y - cy).powi(2)) / 0.01).exp();
        g(0.25, 0.5) + 0.5 * g(0.75, 0.5)
    })
    .unwrap();
    let field = dir.path().join("two.sf2");
    write_sf2(&bumps, &field).unwrap();
    let mt = stdout(&run(&["tree", s(&field)]));
    assert!(mt.starts_with("MT 4\n"), "{mt}");

    let flat = dir.path().join("flat.sf2");
    write_sf2(&ScalarField2D::new(3, 3, vec![1.0; 9]).unwrap(), &flat).unwrap();
    let out = dir.path().join("flat.mt");
    stdout(&run(&["tree", s(&flat), "-o", s(&out)]));
    assert!(fs::read_to_string(&out).unwrap().starts_with("MT 2\n"));

    let broken = dir.path().join("broken.sf2");
    fs::write(&broken, "SF2 2 x\n").unwrap();
    let out = run(&["tree", s(&broken)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.sf2:1"));
}

#[test]
fn gen_is_deterministic_and_periodic() {
    let dir = TempDir::new().unwrap();
    let (x, y) = (dir.path().join("x"), dir.path().join("y"));
    for out in [&x, &y] {
        stdout(&run(&["gen", "outlier", "--members", "20", "--outlier-index", "7", "--seed", "1", "-o", s(out), "--set", "rows=30", "--set", "cols=30"]));
    }
    for k in 0..20 {
        let name = format!("member_{k}.sf2");
        assert_eq!(fs::read(x.join(&name)).unwrap(), fs::read(y.join(&name)).unwrap());
    }
    assert!(!x.join("member_20.sf2").exists());

    let p = dir.path().join("p");
    stdout(&run(&["gen", "periodic", "--length", "10", "--period", "5", "--variation", "0", "-o", s(&p)]));
    assert_eq!(fs::read(p.join("member_0.sf2")).unwrap(), fs::read(p.join("member_5.sf2")).unwrap());
    assert_ne!(fs::read(p.join("member_0.sf2")).unwrap(), fs::read(p.join("member_1.sf2")).unwrap());

    let cfg = dir.path().join("gen.cfg");
    fs::write(&cfg, "# small grid\nrows = 20\ncols = 20\nmembers = 2\n").unwrap();
    let c = dir.path().join("c");
    stdout(&run(&["gen", "peaks", "--config", s(&cfg), "-o", s(&c)]));
    assert!(c.join("member_1.sf2").exists() && !c.join("member_2.sf2").exists());
    assert_eq!(run(&["gen", "peaks", "--set", "nonsense=1", "-o", s(&c)]).status.code(), Some(1));
}

#[test]
fn peaks_have_nine_maxima_after_simplification() {
    let dir = TempDir::new().unwrap();
    stdout(&run(&["gen", "peaks", "--members", "20", "--seed", "1", "-o", s(dir.path())]));
    for k in 0..20 {
        let mt = stdout(&run(&["tree", s(&dir.path().join(format!("member_{k}.sf2"))), "--simplify", "0.05"]));
        let tree = branchmap::trees::parse_mt(&mt, Path::new("out")).unwrap();
        assert_eq!(tree.leaf_count(), 9, "member {k}");
    }
}

#[test]
fn matrix_matches_dist_and_orders() {
    let dir = TempDir::new().unwrap();
    let [a, b, c] = triangle_files(dir.path());
    let csv_path = dir.path().join("m.csv");
    let pgm = dir.path().join("m.pgm");
    stdout(&run(&["matrix", s(&a), s(&b), s(&c), "-o", s(&csv_path), "--heatmap", s(&pgm), "--jobs", "2"]));
    let text = fs::read_to_string(&csv_path).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], vec!["", "a", "b", "c"]);
    let dist = stdout(&run(&["dist", s(&a), s(&c)]));
    assert_eq!(rows[1][3], dist.trim());
    for i in 1..4 {
        assert_eq!(rows[i][i], "0.000000000");
        for j in 1..4 {
            assert_eq!(rows[i][j], rows[j][i]);
        }
    }
    let img = fs::read(&pgm).unwrap();
    assert!(img.starts_with(b"P5"));
    assert_eq!(img.len() - img.iter().rposition(|&c| c == b'\n').unwrap() - 1, 9);

    let clustered = stdout(&run(&["matrix", s(dir.path()), "--order", "cluster"]));
    let mut labels: Vec<&str> = clustered.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    labels.sort();
    assert_eq!(labels, vec!["a", "b", "c"]);

    let same = stdout(&run(&["matrix", s(&a), s(&a), s(&a)]));
    assert!(same.lines().skip(1).all(|l| l.split(',').skip(1).all(|v| v == "0.000000000")));
    assert_eq!(run(&["matrix", s(&a)]).status.code(), Some(1));
}

#[test]
fn matrix_names_the_invalid_member() {
    let dir = TempDir::new().unwrap();
    let [a, _, _] = triangle_files(dir.path());
    let bad = dir.path().join("bad.mt");
    fs::write(&bad, "MT 3\n0 0 -1\n1 5 0\n2 4 1\n").unwrap();
    let out = run(&["matrix", s(&a), s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad"));
}

fn tracks(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(&run(args))).unwrap()
}

#[test]
fn track_constant_two_step_and_split_series() {
    let dir = TempDir::new().unwrap();
    let [a, b, _] = triangle_files(dir.path());
    let v = tracks(&["track", s(&a), s(&a), s(&a)]);
    let list = v["tracks"].as_array().unwrap();
    assert_eq!(list.len(), 2);
    assert!(list.iter().all(|t| t["startStep"] == 0 && t["endStep"] == 2));

    let v = tracks(&["track", s(&a), s(&b)]);
    assert_eq!(v["steps"].as_array().unwrap().len(), 1);
    let pairs = v["steps"][0]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), v["tracks"].as_array().unwrap().len());

    let split = dir.path().join("split");
    stdout(&run(&["gen", "split", "-o", s(&split)]));
    let files: Vec<String> = (0..16).map(|k| s(&split.join(format!("member_{k}.sf2"))).to_string()).collect();
    let mut args = vec!["track", "--simplify", "0.01"];
    args.extend(files.iter().map(String::as_str));
    let v = tracks(&args);
    let spans: Vec<(u64, u64)> = v["tracks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| (t["startStep"].as_u64().unwrap(), t["endStep"].as_u64().unwrap()))
        .collect();
    assert_eq!(spans.len(), 3, "{spans:?}");
    assert_eq!(spans.iter().filter(|&&(s, e)| s == 0 && e == 15).count(), 2);
    let born = spans.iter().find(|&&(s, _)| s > 0).unwrap();
    assert_eq!(born.1, 15);

    assert_eq!(run(&["track", s(&a)]).status.code(), Some(1));
    assert_eq!(run(&["track", s(&a), s(&b), "--distance", "one-degree"]).status.code(), Some(1));
}
