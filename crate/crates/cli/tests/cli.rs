use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn surface(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "surfaces", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavefront")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn csv_rows(path: &std::path::Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("u,v,branch_id,color,topology"));
    lines.map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn branches(rows: &[Vec<String>]) -> Vec<(String, String, Vec<[f64; 2]>)> {
    let mut out: Vec<(String, String, Vec<[f64; 2]>)> = Vec::new();
    let mut last = String::new();
    for r in rows {
        let p = [r[0].parse().unwrap(), r[1].parse().unwrap()];
        if r[2] != last || out.is_empty() {
            last = r[2].clone();
            out.push((r[3].clone(), r[4].clone(), Vec::new()));
        }
        out.last_mut().unwrap().2.push(p);
    }
    out
}

#[test]
fn analyze_swallowtail() {
    let out = run(&["analyze", "--surface", &surface("s-sw.json"), "--point", "0,0"]);
    assert!(out.status.success());
    let doc = json(&out);
    let p = &doc["points"][0];
    assert_eq!(p["type"], "Swallowtail");
    assert_eq!(p["germ"], "A3");
    let phi_t = p["versality"].as_array().unwrap().iter().find(|v| v["family"] == "PhiT").unwrap();
    assert_eq!(phi_t["versal"], true);
    assert_eq!(doc["surface"]["type"], "monge");
}

#[test]
fn analyze_hyperbolic_right_angled() {
    let out = run(&["analyze", "--surface", &surface("s-hypra.json"), "--point", "0,0"]);
    assert!(out.status.success());
    let p = &json(&out)["points"][0];
    assert_eq!(p["type"], "D4Plus3D");
    assert_eq!(p["curvatures"]["umbilic"], true);
    let phi = p["versality"].as_array().unwrap().iter().find(|v| v["family"] == "Phi").unwrap();
    assert_eq!(phi["versal"], false);
}

#[test]
fn analyze_document_round_trips() {
    let out = run(&["analyze", "--surface", &surface("s-cbf.json"), "--point", "0,0", "--sheet", "1"]);
    assert!(out.status.success());
    let doc: wavefront_cli::AnalysisDocument = serde_json::from_slice(&out.stdout).unwrap();
    let again = wavefront_cli::to_json(&doc);
    assert_eq!(again.as_bytes(), &out.stdout[..]);
}

#[test]
fn plane_has_no_focal_point() {
    let out = run(&["analyze", "--surface", &surface("plane.json"), "--point", "0,0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no focal point (κ=0)"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["analyze", "--surface", &surface("s-sw.json"), "--point", "zero"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--surface", "/nonexistent.json", "--point", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--surface", &surface("s-sw.json"), "--point", "0,0", "--sheet", "3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn cpc_loop_near_elliptic_umbilic() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cpc.csv");
    let out = run(&[
        "trace", "--surface", &surface("s-ell.json"), "--what", "cpc", "--value", "0.95",
        "--region=-0.5:0.5,-0.5:0.5", "--grid", "200", "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let loops: Vec<_> = branches(&csv_rows(&csv)).into_iter().filter(|(_, _, pts)| pts.len() > 2 && pts[0] == pts[pts.len() - 1]).collect();
    assert_eq!(loops.len(), 1);
    let (color, topology, pts) = &loops[0];
    // below the umbilic value the level lies on the red (smaller) sheet
    assert_eq!(color, "red");
    assert_eq!(topology, "smooth_arc");
    assert!(pts.iter().all(|p| p[0].hypot(p[1]) < 0.1));
}

#[test]
fn cpc_crossing_at_hyperbolic_umbilic() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cpc.csv");
    let out = run(&[
        "trace", "--surface", &surface("s-hyp.json"), "--what", "cpc", "--value", "1",
        "--region=-0.5:0.5,-0.5:0.5", "--grid", "200", "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let b = branches(&csv_rows(&csv));
    let through_origin: Vec<_> = b.iter().filter(|(_, _, pts)| pts.iter().any(|p| p[0].hypot(p[1]) < 0.02)).collect();
    assert!(through_origin.len() >= 2);
    assert!(through_origin.iter().all(|(_, t, _)| t == "crossing"));
}

#[test]
fn swallowtail_ridge_is_one_arc() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ridge.csv");
    let out = run(&[
        "trace", "--surface", &surface("s-sw.json"), "--what", "ridge", "--value", "blue",
        "--region=-0.3:0.3,-0.3:0.3", "--grid", "200", "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let b = branches(&csv_rows(&csv));
    assert_eq!(b.len(), 1);
    assert_eq!(b[0].0, "blue");
    assert_eq!(b[0].1, "smooth_arc");
    assert!(b[0].2.iter().any(|p| p[0].hypot(p[1]) < 1e-2));
}

fn sweep_counts(file: &str, dir: &std::path::Path) -> Value {
    let out = run(&[
        "sweep", "--surface", &surface(file), "--t", "0.9:1.1:3", "--region=-0.5:0.5,-0.5:0.5",
        "--grid", "200", "--out", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn sweep_elliptic_and_hyperbolic() {
    for (file, expected) in [("s-ell.json", 3), ("s-hyp.json", 1)] {
        let dir = tempfile::tempdir().unwrap();
        let s = sweep_counts(file, dir.path());
        let frames = s["frames"].as_array().unwrap();
        assert_eq!(frames.len(), 3);
        for k in [0, 2] {
            assert_eq!(frames[k]["near_umbilic"]["Swallowtail"], expected, "{file} frame {k}");
        }
        for f in frames {
            let mesh = std::fs::read_to_string(dir.path().join(f["mesh"].as_str().unwrap())).unwrap();
            check_obj(&mesh, 200);
        }
        assert!(dir.path().join("t_001.json").exists());
    }
}

fn check_obj(mesh: &str, n: usize) {
    let verts = mesh.lines().filter(|l| l.starts_with("v ")).count();
    assert_eq!(verts, n * n);
    let mut faces = 0;
    for l in mesh.lines().filter(|l| l.starts_with("f ")) {
        faces += 1;
        for id in l.split_whitespace().skip(1) {
            let id: usize = id.parse().unwrap();
            assert!(id >= 1 && id <= verts);
        }
    }
    assert_eq!(faces, 2 * (n - 1) * (n - 1));
}

#[test]
fn sweep_of_plane_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let s = sweep_counts("plane.json", dir.path());
    for f in s["frames"].as_array().unwrap() {
        assert!(f["counts"].as_object().unwrap().is_empty());
    }
    assert!(s["umbilics"].as_array().unwrap().is_empty());
}

#[test]
fn outputs_are_deterministic() {
    let a = run(&["analyze", "--surface", &surface("s-ell.json"), "--point", "0.01,-0.02", "--sheet", "2"]);
    let b = run(&["analyze", "--surface", &surface("s-ell.json"), "--point", "0.01,-0.02", "--sheet", "2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let s1 = sweep_counts("s-hyp.json", d1.path());
    let s2 = sweep_counts("s-hyp.json", d2.path());
    assert_eq!(s1, s2);
    for k in 0..3 {
        let name = format!("t_{k:03}.json");
        assert_eq!(std::fs::read(d1.path().join(&name)).unwrap(), std::fs::read(d2.path().join(&name)).unwrap());
    }
    assert_eq!(run(&["verify", "--n", "5", "--seed", "9"]).stdout, run(&["verify", "--n", "5", "--seed", "9"]).stdout);
}

#[test]
fn verify_lines() {
    let out = run(&["verify", "--n", "10", "--seed", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "agreement 10/10 pass"));
    assert_eq!(text.lines().last(), Some("verify: pass"));
}

#[test]
fn verify_zero_instances_passes() {
    let out = run(&["verify", "--n", "0"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("agreement 0/0 pass"));
}

#[test]
fn other_surface_kinds_analyze() {
    for (file, point) in [("ellipsoid-3-2-1.json", "0.3,0.2"), ("torus.json", "0.4,1.1"), ("polygraph.json", "0.1,0.05")] {
        let out = run(&["analyze", "--surface", &surface(file), "--point", point]);
        assert!(matches!(out.status.code(), Some(0) | Some(3)), "{file}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
