use std::process::{Command, Output};

fn tripartite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tripartite"))
        .args(args)
        .output()
        .expect("spawn tripartite")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sweep_inertial_gghz() {
    let out = tripartite(&["sweep", "--family", "gghz", "--accel", "0", "--theta-steps", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "family,a_over_wc,r,theta,pi_tangle,three_tangle,s_max_closed,s_max_numeric,violated"
    );
    let rows = rows(&text);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][6], "5.65685424949");
    assert_eq!(rows[1][8], "true");
    assert_eq!(rows[0][8], "false");
}

#[test]
fn sweep_ms_bob_infinite_never_violates() {
    let out = tripartite(&["sweep", "--family", "ms-bob", "--accel", "inf", "--theta-steps", "41"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 41);
    assert!(rows.iter().all(|r| r[1] == "inf" && r[8] == "false"));
}

#[test]
fn sweep_numeric_column_and_json() {
    let out = tripartite(&[
        "sweep", "--family", "ms", "--accel", "0,2", "--theta-steps", "2", "--numeric",
        "--restarts", "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let closed: f64 = r[6].parse().unwrap();
        let numeric: f64 = r[7].parse().unwrap();
        assert!(closed - numeric <= 1e-4 && numeric <= closed + 1e-8);
    }
    let json = tripartite(&["sweep", "--accel", "inf", "--theta-steps", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v[0]["a_over_wc"], "inf");
    assert!(v[0]["s_max_numeric"].is_null());
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["sweep", "--theta-steps", "1"][..],
        &["sweep", "--family", "w-state"],
        &["sweep", "--accel", "fast"],
        &["verify", "--restarts", "0"],
        &["figdata", "--figure", "9z"],
        &["figdata", "--figure", "all"],
        &["frobnicate"],
    ] {
        let out = tripartite(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unwritable_output_exits_two() {
    let out = tripartite(&["tables", "--output", "/nonexistent-dir/tables.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonexistent-dir"));
}

#[test]
fn tables_report_values_and_deviations() {
    let out = tripartite(&["tables"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = rows(&stdout(&out));
    let cell = |table: &str, q: &str, a: &str| {
        rows.iter()
            .find(|r| r[0] == table && r[1] == q && r[2] == a)
            .unwrap_or_else(|| panic!("missing {table} {q} {a}"))
            .clone()
    };
    let tau_c = ["0", "2", "4", "6", "8", "10", "100"];
    for a in tau_c {
        assert_eq!(cell("II", "tau_c", a)[7], "true", "tau_c a={a}");
    }
    let pi_c4 = cell("II", "pi_c", "4");
    assert_eq!(pi_c4[3], "0.25");
    assert!((pi_c4[4].parse::<f64>().unwrap() - 0.550).abs() < 5e-4);
    assert_eq!(pi_c4[7], "false");
    let tau_inf = cell("I", "tau_*", "inf");
    assert_eq!(tau_inf[7], "true");
}

#[test]
fn verify_reports_corrupted_closed_form() {
    let out = tripartite(&["verify", "--samples", "2", "--restarts", "4", "--corrupt", "s-max"]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("FAIL smax-numeric-vs-closed"), "{text}");
    assert!(text.contains("verification FAILED"));
}

#[test]
fn verify_writes_json_report() {
    let dir = std::env::temp_dir().join(format!("tripartite-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = tripartite(&[
        "verify", "--samples", "3", "--restarts", "8", "--report", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["discrepancies"].as_array().unwrap().len() >= 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

fn figure(id: &str) -> Vec<(f64, f64, String)> {
    let out = tripartite(&["figdata", "--figure", id]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("x,y,series"));
    rows(&text)
        .into_iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].clone()))
        .collect()
}

#[test]
fn figure_1c_crosses_four_at_half_tangle() {
    let pts = figure("1c");
    let series = ["a=0", "a=2", "a=5", "a=10"];
    for s in series {
        let curve: Vec<_> = pts.iter().filter(|p| p.2 == s).collect();
        assert!(!curve.is_empty(), "{s}");
        for p in curve {
            if p.0 > 0.5 + 1e-9 {
                assert!(p.1 > 4.0, "{s}: tau={} S={}", p.0, p.1);
            } else if p.0 < 0.5 - 1e-9 {
                assert!(p.1 <= 4.0 + 1e-12, "{s}: tau={} S={}", p.0, p.1);
            }
        }
    }
}

#[test]
fn figure_2a_pi_dominates_tau() {
    for (tau, pi, _) in figure("2a") {
        assert!(pi >= tau - 1e-12);
    }
}

#[test]
fn figures_2b_2c_are_monotone() {
    for id in ["2b", "2c"] {
        let pts = figure(id);
        for s in ["a=0", "a=2", "a=5", "a=10"] {
            let curve: Vec<_> = pts.iter().filter(|p| p.2 == s).collect();
            for w in curve.windows(2) {
                assert!(w[1].0 >= w[0].0 - 1e-12 && w[1].1 >= w[0].1 - 1e-12, "{id} {s}");
            }
        }
    }
}

#[test]
fn figdata_all_writes_six_files() {
    let dir = std::env::temp_dir().join(format!("tripartite-fig-{}", std::process::id()));
    let out = tripartite(&["figdata", "--figure", "all", "--output-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for id in ["1a", "1b", "1c", "2a", "2b", "2c"] {
        assert!(dir.join(format!("fig{id}.csv")).exists(), "{id}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
