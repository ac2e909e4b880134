use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn jcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jcount"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_net(dir: &Path, name: &str, degree: usize, rows: [&[&str]; 3]) -> String {
    let doc = serde_json::json!({ "degree": degree, "basis": rows });
    let path = dir.join(name);
    fs::write(&path, doc.to_string()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn nd_formats() {
    let o = jcount(&["--format", "csv", "nd", "--max", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "d,N\n1,1\n2,1\n3,12\n4,620\n");

    let o = jcount(&["--format", "json", "nd", "--max", "3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"][2]["N"], "12");

    assert_eq!(jcount(&["nd", "--max", "0"]).status.code(), Some(2));
    assert_eq!(jcount(&["nd"]).status.code(), Some(2));
}

#[test]
fn nd_cache_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("n.txt");
    let cache = cache.to_str().unwrap();

    let first = jcount(&["nd", "--max", "5", "--cache", cache]);
    assert!(first.status.success());
    let second = jcount(&["nd", "--max", "5", "--cache", cache]);
    assert_eq!(stdout(&first), stdout(&second));
    assert!(stderr(&second).contains("loaded 5 entries"));

    // A longer run extends the cache and the shorter one still agrees.
    let longer = jcount(&["--format", "csv", "nd", "--max", "8", "--cache", cache]);
    assert!(stdout(&longer).ends_with("8,13525751027392\n"));
    assert_eq!(fs::read_to_string(cache).unwrap().lines().count(), 8);

    // With two entries the audit must re-derive N_2.
    fs::write(cache, "1 1\n2 5\n").unwrap();
    let bad = jcount(&["nd", "--max", "3", "--cache", cache]);
    assert_eq!(bad.status.code(), Some(3));

    fs::write(cache, "1 1\n2 1\nx\n").unwrap();
    let bad = jcount(&["nd", "--max", "3", "--cache", cache]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(stderr(&bad).contains("line 3"));
}

#[test]
fn ed_outputs() {
    let o = jcount(&["--format", "json", "ed", "--d", "4", "--j", "generic"]);
    assert_eq!(stdout(&o).trim(), r#"{"d":4,"j":"generic","E":"1860"}"#);

    let o = jcount(&["--format", "csv", "ed", "--d", "3"]);
    assert_eq!(
        stdout(&o),
        "d,j,E,ZT\n3,generic,12,12\n3,0,4,12\n3,1728,6,12\n"
    );

    let o = jcount(&["--format", "json", "ed", "--d", "6", "--j", "0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["E"], "87709920");

    assert_eq!(jcount(&["ed", "--d", "2"]).status.code(), Some(2));
    assert_eq!(
        jcount(&["ed", "--d", "3", "--j", "7"]).status.code(),
        Some(2)
    );
}

#[test]
fn strata_listing() {
    let o = jcount(&["strata", "--d", "3", "--max-extra", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("single-tail family (e=0, k=1): 256"));
    assert!(out.contains("T(3|#8|)"));

    let o = jcount(&["strata", "--d", "3", "--survivors-only"]);
    let out = stdout(&o);
    let rows: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with("tree") || l.starts_with("circuit"))
        .collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|l| l.contains("true")));

    let o = jcount(&[
        "--format",
        "json",
        "strata",
        "--d",
        "3",
        "--max-extra",
        "1",
        "--full",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_object());

    assert_eq!(
        jcount(&["strata", "--d", "3", "--max-extra", "5"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        jcount(&["strata", "--d", "3", "--full", "--ceiling", "10"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(jcount(&["strata", "--d", "1"]).status.code(), Some(2));
}

#[test]
fn series_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cusp = write_net(
        dir.path(),
        "cusp.json",
        3,
        [
            &["1", "0", "0", "0"],
            &["0", "1", "0", "0"],
            &["0", "0", "0", "1"],
        ],
    );
    let o = jcount(&["series", &cusp]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "point: infinity\nvanishing sequence: (0, 2, 3)\nK: 0\ncriterion: true\n"
    );

    let shifted = write_net(
        dir.path(),
        "shifted.json",
        3,
        [
            &["1", "0", "0", "0"],
            &["0", "1", "0", "0"],
            &["0", "0", "-5", "1"],
        ],
    );
    let o = jcount(&["--format", "json", "series", &shifted]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["K"], "5");
    assert_eq!(v["criterion"], true);

    let o = jcount(&["series", &cusp, "--at", "0"]);
    assert!(stdout(&o).contains("vanishing sequence: (0, 1, 3)"));

    let flat = write_net(
        dir.path(),
        "flat.json",
        3,
        [
            &["1", "0", "0", "0"],
            &["0", "1", "0", "0"],
            &["2", "2", "0", "0"],
        ],
    );
    assert_eq!(jcount(&["series", &flat]).status.code(), Some(5));

    let broken = write_net(
        dir.path(),
        "broken.json",
        3,
        [
            &["1/0", "0", "0", "0"],
            &["0", "1", "0", "0"],
            &["0", "0", "0", "1"],
        ],
    );
    let o = jcount(&["series", &broken]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1/0"));

    let missing = dir.path().join("absent.json");
    assert_ne!(
        jcount(&["series", missing.to_str().unwrap()]).status.code(),
        Some(0)
    );
}

#[test]
fn output_is_deterministic() {
    for args in [
        &[
            "--format",
            "json",
            "strata",
            "--d",
            "3",
            "--max-extra",
            "2",
            "--circuits",
        ][..],
        &["--format", "csv", "ed", "--d", "9"][..],
    ] {
        assert_eq!(stdout(&jcount(args)), stdout(&jcount(args)));
    }
}

#[test]
fn help_and_usage() {
    assert_eq!(jcount(&["--help"]).status.code(), Some(0));
    assert_eq!(jcount(&["bogus"]).status.code(), Some(2));
}
