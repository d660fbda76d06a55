use std::process::{Command, Output};

fn pathmark(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathmark"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let o = pathmark(&[
            "sweep-phi",
            "--mode",
            "particle",
            "--pairs",
            "100000",
            "--trials",
            "100",
            "--seed",
            "42",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn different_seeds_differ() {
    let run = |seed: &str| stdout(&pathmark(&["table", "--pairs", "1000", "--seed", seed]));
    assert_ne!(run("1"), run("2"));
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.conf");
    std::fs::write(
        &cfg,
        "# scenario\nphi_deg = 40\nmode = particle\npairs = 0\n",
    )
    .unwrap();
    let o = pathmark(&[
        "table",
        "--config",
        cfg.to_str().unwrap(),
        "--phi-deg",
        "30",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("3.0000000000000000e1,0.0000000000000000e0,particle,usd,0,100,1,"));
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "phi_deg = 30\n\ncolour = blue\n").unwrap();
    let o = pathmark(&["table", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 3"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn exit_codes() {
    let o = pathmark(&["table", "--phi-deg", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("phi_deg") && err.contains("22.5") && err.contains("usd"),
        "{err}"
    );
    assert_eq!(err.lines().count(), 1);

    assert_eq!(
        pathmark(&["fringe", "--mode", "particle"]).status.code(),
        Some(2)
    );
    assert_eq!(
        pathmark(&["table", "--mode", "sideways"]).status.code(),
        Some(2)
    );
    assert_eq!(pathmark(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        pathmark(&["table", "--config", "/no/such/file"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        pathmark(&["table", "--out", "/no/such/dir/out.csv"])
            .status
            .code(),
        Some(1)
    );
    // non-USD measurements accept the full range
    assert!(
        pathmark(&["table", "--phi-deg", "10", "--measurement", "mem"])
            .status
            .success()
    );
}

#[test]
fn negative_angles_are_values() {
    let o = pathmark(&["table", "--alpha-deg", "-90", "--pairs", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o)
        .lines()
        .nth(1)
        .unwrap()
        .contains(",-9.0000000000000000e1,"));
}

#[test]
fn json_mirrors_csv() {
    let csv = stdout(&pathmark(&["table", "--pairs", "0"]));
    let json = stdout(&pathmark(&["table", "--pairs", "0", "--json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["command"], "table");
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let cols: Vec<&str> = v["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(header, cols);
    assert_eq!(v["rows"].as_array().unwrap().len(), csv.lines().count() - 1);
    assert!(v["rows"][0]["sampled_mean"].is_null());
}

#[test]
fn sweep_rows_on_domain_error() {
    let o = pathmark(&[
        "sweep-phi",
        "--start",
        "0",
        "--stop",
        "45",
        "--steps",
        "4",
        "--pairs",
        "0",
        "--on-domain-error",
        "row",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let status: Vec<&str> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(7).unwrap())
        .collect();
    assert!(status[0].starts_with("\"error") && status[1].starts_with("\"error"));
    assert_eq!(&status[2..], ["ok", "ok"]);
    let o = pathmark(&["sweep-phi", "--start", "0", "--stop", "45", "--steps", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selfcheck_passes_and_detects_a_fault() {
    let o = pathmark(&["selfcheck"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    let o = pathmark(&["selfcheck", "--inject-fault", "npbs-sign"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o)
        .lines()
        .any(|l| l.starts_with("FAIL  oracle equivalence")));
}
