use std::process::{Command, Output};

fn shrinker(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shrinker"))
        .args(args)
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    shrinker(args).status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["verify", "clifford", "--grid", "16x16"]), 0);
    assert_eq!(code(&["verify", "control", "--grid", "16x16"]), 1);
    assert_eq!(code(&["verify", "torus-of-doom"]), 2);
    assert_eq!(code(&["verify", "clifford", "--grid", "8x8"]), 2);
    assert_eq!(code(&["verify", "clifford", "--grid", "17x16"]), 2);
    assert_eq!(code(&["verify", "clifford", "--tol", "nonsense=1"]), 2);
    assert_eq!(code(&["al"]), 2);
    assert_eq!(
        code(&["flow", "--init", "circle:3", "--raw", "--t-max", "1e-3"]),
        1
    );
}

#[test]
fn tolerance_override_can_fail_a_check() {
    let out = shrinker(&[
        "verify",
        "lee-wang:1,2",
        "--grid",
        "16x16",
        "--tol",
        "simons_identity=0",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv
        .lines()
        .any(|l| l.contains(",simons_identity,") && l.ends_with(",false")));
}

#[test]
fn scan_rows_and_warnings() {
    let out = shrinker(&["scan", "--pairs", "1,2", "2,4", "--grid", "64x64"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "m,n,min_a2,max_a2,lower_bound,upper_bound,within_bounds,note"
    );
    let row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&row[..2], ["1", "2"]);
    assert!((row[4].parse::<f64>().unwrap() - 7.0 / 6.0).abs() < 1e-15);
    assert!((row[5].parse::<f64>().unwrap() - 13.0 / 3.0).abs() < 1e-15);
    assert_eq!(row[6], "true");
    assert!(lines[2].starts_with("2,4,,,,,,skipped"));
    assert!(String::from_utf8(out.stderr).unwrap().contains("warning"));
}

#[test]
fn circle_trace_has_constant_conserved_quantity() {
    let out = shrinker(&["al", "--shoot", "0.9:1.1", "--rotation", "1,1"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("s,x1,x2,T1,T2,k,c"));
    let e = (-0.5f64).exp();
    for line in lines {
        let c: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((c - e).abs() <= 1e-8 * e);
    }
}

#[test]
fn flow_writes_time_series() {
    let dir = std::env::temp_dir().join(format!("shrinker-flow-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let series = dir.join("series.csv");
    let snaps = dir.join("snaps.csv");
    let out = shrinker(&[
        "flow",
        "--init",
        "ellipse01",
        "--tol",
        "1e-6",
        "--out",
        series.to_str().unwrap(),
        "--snapshots",
        snaps.to_str().unwrap(),
        "--snapshot-interval",
        "1",
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&series).unwrap();
    assert!(text.starts_with("t,length,area,residual\n"));
    let last: f64 = text
        .lines()
        .last()
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(last <= 1e-6);
    assert!(std::fs::read_to_string(&snaps)
        .unwrap()
        .starts_with("t,index,x,y\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn worker_count_does_not_change_output() {
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_shrinker"))
            .args(["verify", "lee-wang:2,3", "--grid", "64x64"])
            .env("SHRINKER_WORKERS", workers)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("4"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}
