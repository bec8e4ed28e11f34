use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpbench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn exit_codes() {
    let golden: [(&[&str], i32); 12] = [
        (&["verify", "ex1"], 0),
        (&["verify", "ex5", "--literal-prop2"], 0),
        (&["verify", "nope"], 1),
        (&["verify", &fixture("malformed.json")], 1),
        (&["construct", &fixture("ex1_spec.json")], 0),
        (&["construct", &fixture("ex1_spec_sphere_fiber.json")], 4),
        (&["construct", &fixture("ex1_spec_blowup.json")], 3),
        (&["classify", &fixture("hypotheses.json")], 0),
        (&["classify", &fixture("hypotheses_missing_bf.json")], 1),
        (&["estimate", "ex1-lich", "--R", "4"], 0),
        (&["estimate", "ex2", "--R", "4"], 1),
        (&["export", "ex2", "--grid", "0.1:10:400"], 0),
    ];
    for (args, want) in golden {
        let o = run(args);
        assert_eq!(code(&o), want, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn verify_ex1_reports_small_residuals() {
    let o = run(&["verify", "ex1"]);
    let r = json(&o);
    assert_eq!(r["pass"], true);
    for eq in ["ode1", "ode2", "ode3"] {
        assert!(r["per_equation"][eq]["sup"].as_f64().unwrap() < 1e-9);
    }
    assert_eq!(r["grid"]["count"], 401);
}

#[test]
fn verify_csv_summary() {
    let rows = csv_rows(&run(&["verify", "ex4", "--csv"]));
    assert_eq!(rows[0], ["equation", "sup", "argmax"]);
    let eqs: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(eqs, ["lemma2", "ode1", "ode2", "ode3"]);
}

#[test]
fn failing_verification_exits_2() {
    let o = run(&["verify", "ex1", "--tol", "1e-20"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn parse_errors() {
    let o = run(&["verify", &fixture("malformed.json")]);
    assert!(stderr(&o).contains("parse error"), "{}", stderr(&o));
    let o = run(&["verify", "ex1", "--grid", "0:1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("a:b:n"));
}

#[test]
fn constructed_ansatz_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ex1.json");
    let o = run(&[
        "construct",
        &fixture("ex1_spec.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["report"]["pass"], true);
    assert_eq!(doc["ansatz"]["h"]["kind"], "spline");

    let o = run(&["verify", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(json(&o)["per_equation"]["ode1"]["sup"].as_f64().unwrap() < 1e-9);
}

#[test]
fn construct_errors_carry_details() {
    let o = run(&["construct", &fixture("ex1_spec_blowup.json")]);
    let escape = -(1.0 / 2f64.sqrt()).atanh();
    let err = stderr(&o);
    let last: f64 = err.rsplit("xi = ").next().unwrap().trim().parse().unwrap();
    assert!(last > escape && last - escape < 1e-3, "{err}");

    let o = run(&["construct", &fixture("ex1_spec_sphere_fiber.json")]);
    assert!(stderr(&o).contains("does not match fiber theta 1"));
    let o = run(&[
        "construct",
        &fixture("ex1_spec_sphere_fiber.json"),
        "--literal-prop2",
    ]);
    assert_eq!(code(&o), 4);
    assert!(
        stderr(&o).contains("implied fiber constant 0"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn catalog_json_round_trip_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    for e in warpbench::catalog::all() {
        let path = dir.path().join(format!("{}.json", e.id));
        std::fs::write(&path, serde_json::to_string(&e.ansatz).unwrap()).unwrap();
        let grid = format!("{}:{}:{}", e.grid.min, e.grid.max, e.grid.count);
        let direct = json(&run(&["verify", &e.id]));
        let via_file = json(&run(&["verify", path.to_str().unwrap(), "--grid", &grid]));
        assert_eq!(direct["pass"], via_file["pass"], "{}", e.id);
        for (eq, s) in direct["per_equation"].as_object().unwrap() {
            let a = s["sup"].as_f64().unwrap();
            let b = via_file["per_equation"][eq]["sup"].as_f64().unwrap();
            assert!((a - b).abs() <= 1e-12, "{} {eq}: {a} vs {b}", e.id);
        }
    }
}

#[test]
fn classify_presets() {
    let o = run(&[
        "classify",
        "--preset",
        "ricci",
        "--steady",
        "--fiber-scalar",
        "1",
    ]);
    assert_eq!(json(&o)["verdict"], "nonexistent");
    let o = run(&[
        "classify",
        "--preset",
        "ricci",
        "--expanding",
        "--fiber-scalar",
        "-1",
        "--ricci-w-nonneg",
    ]);
    let v = json(&o);
    assert_eq!(v["verdict"], "rigid");
    assert!(v["clause"].as_str().unwrap().starts_with("rigidity"));

    // a side condition reported as violated blocks the conclusion
    let o = run(&[
        "classify",
        "--preset",
        "ricci",
        "--expanding",
        "--fiber-scalar",
        "-1",
        "--ricci-w",
        "violated",
    ]);
    assert_eq!(json(&o)["verdict"], "undetermined");

    let o = run(&["classify", "--preset", "ricci", "--steady"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("fiber_scalar"));
    let o = run(&[
        "classify",
        "--preset",
        "wobble",
        "--steady",
        "--fiber-scalar",
        "1",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn classify_hypothesis_files_and_ansatze() {
    let v = json(&run(&["classify", &fixture("hypotheses.json")]));
    assert_eq!(v["verdict"], "rigid");
    let o = run(&["classify", &fixture("hypotheses_missing_bf.json")]);
    assert!(stderr(&o).contains("missing sign_BF"), "{}", stderr(&o));

    // EX1 has the right signs up to B_F = 0 but grows too fast
    let v = json(&run(&["classify", "ex1"]));
    assert_eq!(v["verdict"]["verdict"], "undetermined");
    assert_eq!(v["hypotheses"]["input"]["growth_ok"], "violated");
}

#[test]
fn estimate_csv() {
    let o = run(&["estimate", "ex1-lich", "--R", "4"]);
    let rows = csv_rows(&o);
    assert_eq!(rows[0], ["xi", "u", "grad_ln_u", "bracket", "local_C"]);
    assert!(rows.len() > 2);
    for r in &rows[1..] {
        let c: f64 = r[4].parse().unwrap();
        assert!(c.is_finite() && c > 0.0);
        let g: f64 = r[2].parse().unwrap();
        assert!((g - 1.6).abs() < 1e-12);
        // 17 significant digits
        assert_eq!(
            r[1].split('e')
                .next()
                .unwrap()
                .replace(['-', '.'], "")
                .len(),
            17
        );
    }

    let o = run(&["estimate", "ex2", "--R", "4"]);
    assert!(stderr(&o).contains("unsupported base"));
    let o = run(&["estimate", "ex1", "--R", "1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn estimate_json() {
    let v = json(&run(&["estimate", "ex1", "--R", "8", "--json"]));
    assert_eq!(v["R"], 8.0);
    assert!(v["empirical_c"].as_f64().unwrap().is_finite());
    assert_eq!(v["K"], 0.0);
}

#[test]
fn export_row_count_and_columns() {
    let o = run(&["export", "ex2", "--grid", "0.1:10:400"]);
    let rows = csv_rows(&o);
    assert_eq!(rows[0], ["xi", "ode1", "ode2", "ode3", "theta_implied"]);
    assert_eq!(rows.len() - 1, 400);
    assert_eq!(rows[1][0].parse::<f64>().unwrap(), 0.1);
    assert_eq!(rows[400][0].parse::<f64>().unwrap(), 10.0);

    let v = json(&run(&["export", "ex1", "--grid", "-1:1:5", "--json"]));
    assert_eq!(v.as_array().unwrap().len(), 5);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let o = run(&[
        "export",
        "ex1",
        "--grid",
        "-1:1:11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(out).unwrap().lines().count(), 12);
}

#[test]
fn list_catalog() {
    let text = String::from_utf8(run(&["list"]).stdout).unwrap();
    for id in warpbench::catalog::IDS {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id}");
    }
    let v = json(&run(&["list", "--json"]));
    assert_eq!(v.as_array().unwrap().len(), warpbench::catalog::IDS.len());
}
