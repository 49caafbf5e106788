use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn dpal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpal"))
        .args(args)
        .env_remove("DPAL_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn leakage_on_three_world_fixture() {
    let m = fixture("three_worlds.json");
    let o = dpal(&[
        "check",
        "-m",
        &m,
        "-s",
        "1",
        "-f",
        "[K[2] K[2] p0]K[0] K[1] p0",
        "-k",
        "adpal",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "true");
    let o = dpal(&[
        "check",
        "-m",
        &m,
        "-s",
        "1",
        "-f",
        "K[0] K[1] p0",
        "-k",
        "adpal",
    ]);
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn exit_codes() {
    let m = fixture("three_worlds.json");
    let parse_error = dpal(&["check", "-m", &m, "-s", "1", "-f", "p0 &", "-k", "adpal"]);
    assert_eq!(parse_error.status.code(), Some(2));
    let wrong_mode = dpal(&["check", "-m", &m, "-s", "1", "-f", "p0"]);
    assert_eq!(wrong_mode.status.code(), Some(3));
    let bad_state = dpal(&["check", "-m", &m, "-s", "9", "-f", "p0", "-k", "adpal"]);
    assert_eq!(bad_state.status.code(), Some(3));
    let bad_agent = dpal(&["check", "-m", &m, "-s", "1", "-f", "K[7] p0", "-k", "adpal"]);
    assert_eq!(bad_agent.status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{ not json").unwrap();
    let o = dpal(&["check", "-m", broken.to_str().unwrap(), "-f", "p"]);
    assert_eq!(o.status.code(), Some(2));
    let bad_flag = dpal(&["check", "--nope"]);
    assert_eq!(bad_flag.status.code(), Some(2));
}

#[test]
fn top_update_under_edpal_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let before = dir.path().join("m.json");
    let after = dir.path().join("m2.json");
    let o = dpal(&[
        "muddy",
        "model",
        "--n",
        "3",
        "--k",
        "3",
        "--depths",
        "2-i",
        "-o",
        before.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = dpal(&[
        "update",
        "-m",
        before.to_str().unwrap(),
        "-f",
        "true",
        "-k",
        "edpal",
        "-o",
        after.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&before).unwrap(), fs::read(&after).unwrap());
}

#[test]
fn dpal_update_doubles_states() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    dpal(&[
        "muddy",
        "model",
        "--n",
        "2",
        "--k",
        "2",
        "-o",
        m.to_str().unwrap(),
    ]);
    let o = dpal(&["update", "-m", m.to_str().unwrap(), "-f", "!K[1] m1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let states = v["states"].as_array().unwrap();
    assert!(states.iter().any(|s| s == "0.11"));
    assert!(states.iter().any(|s| s == "1.11"));
}

#[test]
fn muddy_matrix_output() {
    let o = dpal(&["muddy", "matrix"]);
    assert_eq!(
        stdout(&o),
        "semantics\tamnesia\tleakage\nDPAL\tfalse\tfalse\nEDPAL\ttrue\tfalse\nADPAL\tfalse\ttrue\n"
    );
    let o = dpal(&["muddy", "lower", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("violations=0"));
}

#[test]
fn axioms_suite_reports() {
    let o = dpal(&["axioms", "-t", "dbel", "--cases", "40", "--models", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("violations=0"));
    let o = dpal(&["axioms", "-t", "edpal", "-k", "dpal"]);
    assert_eq!(o.status.code(), Some(3));
    let o = dpal(&["axioms", "--variant", "kp", "-k", "edpal", "--cases", "300"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("reverse=4"));
}

#[test]
fn sat_finds_and_misses() {
    let o = dpal(&["sat", "-f", "K[0] p & !P[0,1]", "-k", "dbel"]);
    assert!(stdout(&o).starts_with("satisfiable"));
    let o = dpal(&["sat", "-f", "K[0] K[0] p & !P[0,1]", "-k", "dbel"]);
    assert!(stdout(&o).starts_with("unsatisfiable"));
}

#[test]
fn bench_csv_growth() {
    let o = dpal(&["bench", "--cases", "20", "--max-vars", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let headers = r.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (family, growth) = (col("family"), col("growth"));
    let mut sat_rows = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        let g: f64 = rec[growth].parse().unwrap();
        assert!(g <= 4.0, "{rec:?}");
        if &rec[family] == "3sat" {
            sat_rows += 1;
        }
    }
    // n announcements plus the input model for each n in 1..=3.
    assert_eq!(sat_rows, 2 + 3 + 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("fitted c"));
}

#[test]
fn export_dot_clusters() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    dpal(&[
        "muddy",
        "model",
        "--n",
        "3",
        "--k",
        "3",
        "-o",
        m.to_str().unwrap(),
    ]);
    let o = dpal(&[
        "export-dot",
        "-m",
        m.to_str().unwrap(),
        "-s",
        "111",
        "-f",
        "<!K[2] m2><!K[1] m1>!K[2] true",
        "-k",
        "dpal",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert!(dot.starts_with("graph updates {"));
    assert_eq!(dot.matches("subgraph cluster_").count(), 3);
    assert!(dot.contains("style=dashed"));
}

#[test]
fn workers_env_is_accepted() {
    let o = Command::new(env!("CARGO_BIN_EXE_dpal"))
        .args(["muddy", "lower", "--k", "2"])
        .env("DPAL_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
