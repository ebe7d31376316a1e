use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn ghostdyn(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ghostdyn"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("GHOSTDYN_THREADS", t),
        None => cmd.env_remove("GHOSTDYN_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = ghostdyn(args, None);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(p)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const SMALL_RENDER: &[&str] = &["--preset", "fig3c", "--width", "60", "--height", "30", "--budget", "20000"];

#[test]
fn index_check_meets_identity() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "index.csv");
    ok(&["index-check", "--mu", "4", "--gamma", "0.2", "--eps", "1e-6", "--output", s(&out)]);
    let rows = csv_rows(&out);
    assert_eq!(rows[0].join(","), "eps,re_index,im_index,re_analytic,im_analytic,rel_err");
    let rel: f64 = rows[1][5].parse().unwrap();
    assert!(rel < 1e-8, "{rel}");
    assert!(Path::new(&format!("{}.manifest.json", s(&out))).exists());
}

#[test]
fn channel_width_ratio() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "width.csv");
    let stdout = ok(&["channel-width", "--mu", "4", "--gamma", "0.2", "--eps", "1e-5", "--output", s(&out)]);
    let rows = csv_rows(&out);
    assert_eq!(rows[0].join(","), "epsilon,width,width_over_eps");
    let ratio: f64 = rows[1][2].parse().unwrap();
    assert!((ratio - 5.9476).abs() / 5.9476 < 0.03, "{ratio}");
    assert!(stdout.contains("width/eps"));
}

#[test]
fn fit_scaling_summary() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "fit.csv");
    let stdout = ok(&["fit-scaling", "--preset", "fig5", "--output", s(&out)]);
    let line = stdout.lines().find(|l| l.starts_with("exponent")).expect("summary line");
    let p: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((p + 0.5).abs() <= 0.02, "{line}");
    assert_eq!(csv_rows(&out).len(), 18);
}

#[test]
fn transient_scan_schema() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "scan.csv");
    ok(&["transient-scan", "--eps-from", "1e-6", "--eps-to", "1e-4", "--eps-per-decade", "2", "--output", s(&out)]);
    let rows = csv_rows(&out);
    assert_eq!(rows[0].join(","), "epsilon,N_measured,N_predicted,rel_err");
    assert_eq!(rows.len(), 6);
    let n: f64 = rows[1][1].parse().unwrap();
    let p: f64 = rows[1][2].parse().unwrap();
    assert!((n - p).abs() / n < 0.05);
}

#[test]
fn echo_precedes_run() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "deg.csv");
    let stdout = ok(&["degenerate-check", "--output", s(&out)]);
    assert!(stdout.starts_with("# degenerate-check\neps = 0.1,-0.1,0.01,-0.01\n"));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1 + 3 * 4 * 2);
    assert!(rows.iter().any(|r| r[0] == "h3" && r[6] == "attracting"));
}

#[test]
fn render_round_trip_and_thread_independence() {
    let dir = TempDir::new().unwrap();
    let first = path(&dir, "a.ppm");
    let mut args = vec!["render-dynamical"];
    args.extend_from_slice(SMALL_RENDER);
    args.extend_from_slice(&["--png", "true", "--output", s(&first)]);
    let out = ghostdyn(&args, Some("1"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(first.with_extension("hist.csv").exists());
    assert!(first.with_extension("png").exists());

    let manifest_path = format!("{}.manifest.json", s(&first));
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["command"], "render-dynamical");
    assert_eq!(manifest["config"]["width"], "60");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 3);

    // re-running from the manifest on more threads reproduces every artifact
    let moved = path(&dir, "manifest.json");
    std::fs::rename(&manifest_path, &moved).unwrap();
    let original = std::fs::read(&first).unwrap();
    std::fs::remove_file(&first).unwrap();
    let out = ghostdyn(&["render-dynamical", "--config", s(&moved)], Some("3"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&first).unwrap(), original);
    let rerun: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(rerun["outputs"], manifest["outputs"]);
}

#[test]
fn parameter_plane_and_diagram() {
    let dir = TempDir::new().unwrap();
    let img = path(&dir, "p.ppm");
    ok(&["render-parameter", "--preset", "fig2b", "--width", "40", "--height", "20", "--budget", "2000", "--output", s(&img)]);
    let bytes = std::fs::read(&img).unwrap();
    assert!(bytes.starts_with(b"P6\n40 20\n255\n"));
    assert_eq!(bytes.len(), 13 + 40 * 20 * 3);

    let csv = path(&dir, "b.csv");
    ok(&["bifurcation", "--preset", "fig2a", "--n-params", "5", "--n-record", "3", "--output", s(&csv)]);
    let rows = csv_rows(&csv);
    assert_eq!(
        rows[0].join(","),
        "mu,x0,status,branch_minus,branch_minus_stable,branch_plus,branch_plus_stable,v0,v1,v2"
    );
    assert_eq!(rows.len(), 1 + 5 * 2);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x.csv");
    let code = |args: &[&str], threads: Option<&str>| ghostdyn(args, threads).status.code().unwrap();

    assert_eq!(code(&["transient-scan", "--gamma", "1.5", "--output", s(&out)], None), 2);
    assert_eq!(code(&["render-dynamical", "--unknown", "1"], None), 2);
    assert_eq!(code(&["index-check", "--output", s(&out)], Some("0")), 2);
    assert_eq!(code(&["--help"], None), 0);
    // budget too small for the passage
    assert_eq!(code(&["transient-scan", "--budget", "10", "--output", s(&out)], None), 5);
    assert_eq!(code(&["channel-width", "--eps", "1e-4", "--budget", "10", "--output", s(&out)], None), 5);
    assert!(!out.exists());
}

#[test]
fn failed_run_removes_partial_outputs() {
    let dir = TempDir::new().unwrap();
    let img = path(&dir, "r.ppm");
    // a directory where the PNG should go makes the last write fail
    std::fs::create_dir(img.with_extension("png")).unwrap();
    let args = [
        "render-dynamical", "--preset", "fig3c", "--width", "60", "--height", "30", "--budget", "100", "--png", "true",
        "--output", s(&img),
    ];
    let out = ghostdyn(&args, None);
    assert_eq!(out.status.code(), Some(8), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!img.exists());
    assert!(!img.with_extension("hist.csv").exists());
    assert!(!Path::new(&format!("{}.manifest.json", s(&img))).exists());
}
