use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyharm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).expect("valid JSON")
}

#[test]
fn degree_of_norm_square() {
    assert_eq!(stdout(&["degree", "--dim", "2", "--poly", "x1^2+x2^2"]), "1\n");
    assert_eq!(json(&["degree", "--dim", "3", "--poly", "x1^4", "--json"])["degree"], 2);
}

#[test]
fn np_reports_both_routes() {
    assert_eq!(
        stdout(&["np", "--dim", "2", "--poly", "x1^2+x2^2-1"]),
        "1\nformula=search=1\n"
    );
    let v = json(&["np", "--poly", "x1*x2", "--json"]);
    assert_eq!((v["formula"].as_u64(), v["search"].as_u64()), (Some(2), Some(2)));
}

#[test]
fn support_on_circle() {
    let circle = data("circle4.json");
    assert_eq!(
        stdout(&["support", "--poly", "x1^2+x2^2-1", "--measure", &circle, "--smax", "20"]),
        "supported\n"
    );
    let v = json(&["support", "--poly", "x1^2+x2^2-1", "--measure", &data("inside.json"), "--json"]);
    assert_eq!(v["verdict"], "not_supported");
    assert_eq!(v["certificate"]["value"], "-3/4");
    let short = stdout(&["support", "--poly", "x1^2+x2^2-1", "--measure", &circle, "--smax", "3"]);
    assert!(short.starts_with("undecided"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["degree"]).status.code(), Some(2));
    assert_eq!(run(&["degree", "--poly", "x1", "--dim", "two"]).status.code(), Some(2));

    let bad_poly = run(&["degree", "--poly", "2x1"]);
    assert_eq!(bad_poly.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_poly.stderr).contains("position 1"));

    assert_eq!(
        run(&["markov-series", "--measure", &data("outside.json")]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["markov-series", "--measure", &data("missing.json")]).status.code(),
        Some(1)
    );

    let short = run(&[
        "identity-check",
        "--poly",
        "x1^3 - x2",
        "--measure",
        &data("three.json"),
        "--smax",
        "1",
    ]);
    assert_eq!(short.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&short.stderr).contains("insufficient"));
}

#[test]
fn exact_outputs() {
    assert_eq!(
        stdout(&["almansi", "--poly", "x1^2"]),
        "h0 = 1/2*x1^2 - 1/2*x2^2\nh1 = 1/2\n"
    );
    let layer = json(&["basis", "--dim", "2", "--degree", "2", "--json"]);
    assert_eq!(layer["elements"][0]["poly"], "x1^2 - x2^2");
    assert_eq!(layer["elements"][1]["norm_sq"], "1/8");

    let q = json(&["second-kind", "--poly", "x1^2+x2^2-1", "--measure", &data("circle4.json"), "--kmax", "3", "--json"]);
    assert_eq!(q["sectors"], serde_json::json!([{"k": 0, "m": 1, "p": ["1"]}]));

    assert_eq!(
        stdout(&["identity-check", "--poly", "x1*x2 - x2 + 2", "--measure", &data("three.json")]),
        "true\n"
    );
    assert_eq!(
        stdout(&["ortho-check", "--poly", "x1", "--measure", &data("circle4.json"), "--order", "2"]),
        "false\n"
    );
    assert_eq!(
        stdout(&["ortho-check", "--poly", "x1*x2", "--measure", &data("three.json"), "--h", "x1^3 - x2"]),
        "0\n"
    );

    let sep = json(&[
        "separate",
        "--poly",
        "x1^2+x2^2-1",
        "--measure",
        &data("e1.json"),
        "--measure",
        &data("e2.json"),
        "--json",
    ]);
    assert_eq!(sep["witness"], "x1");
    assert_eq!(sep["degree"], 1);

    let rank = json(&["density-rank", "--poly", "x1^2+x2^2-1", "--measure", &data("circle4.json"), "--json"]);
    assert_eq!(rank["full_rank"], true);
    assert_eq!(rank["evaluation_matrix_rank"], 4);
}

#[test]
fn series_round_trip() {
    let three = data("three.json");
    let text = stdout(&["markov-series", "--measure", &three, "--smax", "40", "--json"]);
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join("three_series.json");
    std::fs::write(&path, &text).unwrap();

    let from_file = json(&[
        "markov-eval",
        "--series",
        path.to_str().unwrap(),
        "--zeta",
        "0,3",
        "--theta",
        "0.6,0.8",
        "--json",
    ]);
    let direct = json(&["markov-eval", "--measure", &three, "--zeta", "0,3", "--theta", "0.6,0.8", "--json"]);
    for part in ["re", "im"] {
        let a = from_file["series"][part].as_f64().unwrap();
        let b = direct["value"][part].as_f64().unwrap();
        assert!((a - b).abs() < 1e-10, "{part}: {a} vs {b}");
    }

    // The rest series uses the same schema.
    let rest = stdout(&["rest", "--poly", "x1 - 1", "--measure", &three, "--smax", "6", "--json"]);
    let rest_path = dir.join("three_rest.json");
    std::fs::write(&rest_path, rest).unwrap();
    assert!(run(&["markov-eval", "--series", rest_path.to_str().unwrap(), "--zeta", "2", "--theta", "1,0"])
        .status
        .success());
}

#[test]
fn grid_is_csv() {
    let csv = stdout(&[
        "markov-eval",
        "--measure",
        &data("circle4.json"),
        "--grid",
        "2:4:5",
        "--theta",
        "1,1",
        "--smax",
        "30",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "zeta_re,zeta_im,re,im,series_re,series_im");
    assert_eq!(lines.len(), 6);
    for line in &lines[1..] {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cells[2] - cells[4]).abs() < 1e-9);
    }
}

#[test]
fn output_is_deterministic() {
    let three = data("three.json");
    let cases: [&[&str]; 4] = [
        &["markov-series", "--measure", &three, "--smax", "8", "--json"],
        &["second-kind", "--poly", "x1^2*x2 - x1", "--measure", &three],
        &["moments", "--measure", &three, "--smax", "4", "--json"],
        &["basis", "--dim", "3", "--degree", "3"],
    ];
    for args in cases {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}
