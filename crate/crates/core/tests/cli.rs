use std::path::Path;
use std::process::{Command, Output};

fn hutchinf(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hutchinf")).args(args).current_dir(dir).output().expect("binary runs")
}

fn ppm_black_pixels(bytes: &[u8]) -> usize {
    // header is three newline-terminated lines
    let mut nl = 0;
    let start = bytes.iter().position(|b| {
        nl += usize::from(*b == b'\n');
        nl == 3
    });
    bytes[start.unwrap() + 1..].chunks(3).filter(|px| px == &[0, 0, 0]).count()
}

#[test]
fn render_pixel_counts_grow_by_four() {
    let dir = tempfile::tempdir().unwrap();
    let mut counts = Vec::new();
    for k in 1..=3 {
        let out = format!("r{k}.ppm");
        let o = hutchinf(&["render", "--system", "ex5", "--depth", &k.to_string(), "--prune", "0", "--out", &out], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let bytes = std::fs::read(dir.path().join(&out)).unwrap();
        assert!(bytes.starts_with(b"P6\n512 512\n255\n"));
        counts.push(ppm_black_pixels(&bytes));
    }
    assert_eq!(counts, [4, 16, 256]);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for run in ["a", "b"] {
        let o = hutchinf(&["render", "--depth", "3", "--out", &format!("{run}.ppm")], dir.path());
        assert!(o.status.success());
        let o = hutchinf(&["converge", "--depth", "4", "--out", &format!("{run}.csv")], dir.path());
        assert!(o.status.success());
        let o = hutchinf(&["cantor", "--auto-ms", "3", "--depth", "2", "--resolution", "64", "--out", run], dir.path());
        assert!(o.status.success());
    }
    let read = |p: &str| std::fs::read(dir.path().join(p)).unwrap();
    assert_eq!(read("a.ppm"), read("b.ppm"));
    assert_eq!(read("a.csv"), read("b.csv"));
    for f in ["squares.csv", "squares.ppm", "certificate.json"] {
        assert_eq!(read(&format!("a/{f}")), read(&format!("b/{f}")), "{f}");
    }
}

#[test]
fn converge_table_format() {
    let dir = tempfile::tempdir().unwrap();
    let o = hutchinf(&["converge", "--system", "ex5", "--depth", "6"], dir.path());
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,size,step,bound,slack,within"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn weak_system_needs_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let o = hutchinf(&["converge", "--system", "sup-pair", "--depth", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--allow-s2"));
    let o = hutchinf(&["converge", "--system", "sup-pair", "--depth", "4", "--prune", "0", "--allow-s2"], dir.path());
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let last = text.lines().last().unwrap();
    // k, size, step, distance to the attractor
    assert_eq!(last, format!("4,34,0.0,{}", 1.0 / 6.0 - 1.0 / 8.0));
}

#[test]
fn attractor_writes_points_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = hutchinf(&["attractor", "--tol", "0.05", "--out", "pts.csv"], dir.path());
    assert!(o.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(summary["err"].as_f64().unwrap() <= 0.05);
    let csv = std::fs::read_to_string(dir.path().join("pts.csv")).unwrap();
    assert!(csv.starts_with("x,y\n"));
    assert_eq!(csv.lines().count() as u64, summary["points"].as_u64().unwrap() + 1);
}

#[test]
fn cantor_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = hutchinf(&["cantor", "--auto-ms", "4", "--resolution", "32", "--out", "good"], dir.path());
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("good/certificate.json")).unwrap()).unwrap();
    assert_eq!(report["ok"], true);
    assert_eq!(report["ms"], serde_json::json!([1, 2, 4, 4, 5]));

    let o = hutchinf(&["cantor", "--ms", "1,1,1", "--resolution", "32", "--out", "bad"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = hutchinf(&["cantor", "--ms", "2,1", "--out", "worse"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let squares = std::fs::read_to_string(dir.path().join("good/squares.csv")).unwrap();
    assert!(squares.starts_with("address,x,y,side\n"));
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let o = hutchinf(&["verify", "metrics", "--out", "report.json"], dir.path());
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(r["passed"], true);
    let o = hutchinf(&["verify", "nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_all_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = hutchinf(&["verify"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn config_file_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{
        "schema": 1,
        "system": {"builtin": "ex5"},
        "run": {"depth": 2, "prune_eps": 0.0},
        "output": {"viewport": {"min": [0, 0], "max": [1, 1], "width": 64, "height": 32}, "image": "img/out.ppm"}
    }"#;
    std::fs::write(dir.path().join("cfg.json"), cfg).unwrap();
    let o = hutchinf(&["render", "--config", "cfg.json"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = std::fs::read(dir.path().join("img/out.ppm")).unwrap();
    assert!(bytes.starts_with(b"P6\n64 32\n255\n"));
    assert_eq!(ppm_black_pixels(&bytes), 16);

    std::fs::write(dir.path().join("bad.json"), r#"{"schema": 99, "system": {"builtin": "ex5"}}"#).unwrap();
    assert_eq!(hutchinf(&["render", "--config", "bad.json"], dir.path()).status.code(), Some(2));
    assert_eq!(hutchinf(&["render", "--system", "nope"], dir.path()).status.code(), Some(2));

    let cfg = r#"{"schema": 1, "system": {"builtin": "ex5"}, "run": {"tol": 0.05}, "output": {"table": "a.csv", "report": "a.json"}}"#;
    std::fs::write(dir.path().join("att.json"), cfg).unwrap();
    let o = hutchinf(&["attractor", "--config", "att.json"], dir.path());
    assert!(o.status.success());
    let written = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(written, String::from_utf8(o.stdout).unwrap().trim_end().as_bytes());
    assert!(dir.path().join("a.csv").exists());
}
