use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const E1: &str = r#"{"n":2,"m":2,"day_invariant":true,"p":[[1,2]]}"#;
const E2: &str = r#"{"n":2,"m":2,"day_invariant":false,"p":[[1,2],[2,1]]}"#;

fn fairsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairsched"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.json");
    for (path, seed) in [(&a, "3"), (&b, "3"), (&c, "4")] {
        let out = fairsched(&["gen", "--n", "6", "--m", "3", "--seed", seed, "-o", s(path)]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn gen_unit_and_two_point() {
    let out = fairsched(&[
        "gen",
        "--n",
        "7",
        "--m",
        "10",
        "--distribution",
        "unit",
        "--seed",
        "1",
    ]);
    let v = json(&out);
    assert!(v["p"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r.as_array().unwrap())
        .all(|p| p == 1));

    let out = fairsched(&[
        "gen",
        "--n",
        "20",
        "--m",
        "2",
        "--p-min",
        "1",
        "--p-max",
        "100",
        "--distribution",
        "two-point",
        "--high-fraction",
        "0.1",
        "--day-invariant",
        "--seed",
        "1",
    ]);
    let v = json(&out);
    let row = v["p"][0].as_array().unwrap();
    assert_eq!(row.iter().filter(|p| **p == 100).count(), 2);
    assert_eq!(row.iter().filter(|p| **p == 1).count(), 18);
}

#[test]
fn solve_every_algorithm_on_e1() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "e1.json", E1);
    for algo in ["lp2", "ptas", "inversion", "qptas", "exact"] {
        let out = fairsched(&["solve", "--algo", algo, "--seed", "1", s(&inst)]);
        assert!(matches!(out.status.code(), Some(0) | Some(3)), "{algo}");
        let v = json(&out);
        assert_eq!(v["algo"], algo);
        assert_eq!(v["perms"].as_array().unwrap().len(), 2);
        let k = v["certificate"]["K"].as_u64().unwrap();
        assert!(k >= 5, "{algo}: {k}");
        assert!(v["certificate"]["lb"].as_u64().unwrap() <= 5);
    }
    let v = json(&fairsched(&["solve", "--algo", "exact", s(&inst)]));
    assert_eq!(v["certificate"]["K"], 5);
    assert_eq!(v["certificate"]["ratio_bound"], 1.0);
}

#[test]
fn verify_accepts_solver_output_and_rejects_tampering() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "e1.json", E1);
    let sched = dir.path().join("s.json");
    let out = fairsched(&["solve", "--algo", "inversion", "-o", s(&sched), s(&inst)]);
    assert!(out.status.success());

    let ok = fairsched(&["verify", s(&inst), s(&sched)]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["pass"], true);

    let ok = fairsched(&["verify", s(&inst), s(&sched), "--k", "5", "--lb", "5"]);
    assert_eq!(ok.status.code(), Some(0));

    let bad_k = fairsched(&["verify", s(&inst), s(&sched), "--k", "4"]);
    assert_eq!(bad_k.status.code(), Some(1));
    assert!(json(&bad_k)["failures"][0]
        .as_str()
        .unwrap()
        .contains("claimed 4"));

    let bad_lb = fairsched(&["verify", s(&inst), s(&sched), "--k", "5", "--lb", "6"]);
    assert_eq!(bad_lb.status.code(), Some(1));

    let plain = write(&dir, "plain.json", r#"{"perms":[[1,2],[2,1]]}"#);
    assert_eq!(
        fairsched(&["verify", s(&inst), s(&plain)]).status.code(),
        Some(2)
    );
    assert_eq!(
        fairsched(&["verify", s(&inst), s(&plain), "--k", "5"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn input_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "e2.json", E2);
    let broken = write(&dir, "broken.json", "{\"n\": 2");
    let zero = write(
        &dir,
        "zero.json",
        r#"{"n":2,"m":1,"day_invariant":false,"p":[[0,1]]}"#,
    );
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", "--algo", "lp2", "/nonexistent/instance.json"],
        vec!["solve", "--algo", "lp2", s(&broken)],
        vec!["solve", "--algo", "lp2", s(&zero)],
        vec!["solve", "--algo", "qptas", s(&inst)],
        vec!["solve", "--algo", "inversion", s(&inst)],
        vec!["solve", "--algo", "lp2", "--eps", "0", s(&inst)],
        vec![
            "solve",
            "--algo",
            "exact",
            "--dump-lp",
            "/tmp/x.lp",
            s(&inst),
        ],
        vec![
            "gen", "--n", "3", "--m", "2", "--p-min", "5", "--p-max", "2", "--seed", "1",
        ],
        vec!["bench", "--seed", "1", "--n-min", "4", "--n-max", "2"],
    ];
    for args in cases {
        let out = fairsched(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn dump_lp_writes_cplex_text() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "e2.json", E2);
    let lp = dir.path().join("relax.lp");
    let out = fairsched(&["solve", "--algo", "lp2", "--dump-lp", s(&lp), s(&inst)]);
    assert!(out.status.success());
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.starts_with("Minimize"));
    assert!(text.contains("Subject To"));
    assert!(text.contains("client_1"));
}

#[test]
fn bound_lists_certified_bounds() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "e1.json", E1);
    let out = fairsched(&["bound", s(&inst)]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["best_certified"], 5);
    let names: Vec<&str> = v["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"enhanced_lower_bound"));
    assert!(names.contains(&"lp_relaxation"));
}

#[test]
fn bench_report_respects_certified_ratios() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("bench.csv");
    let gantt = dir.path().join("gantt.txt");
    let out = fairsched(&[
        "bench",
        "--count",
        "100",
        "--seed",
        "4",
        "--n-max",
        "5",
        "--m-max",
        "3",
        "-o",
        s(&csv),
        "--gantt",
        s(&gantt),
    ]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, fairsched_cli::bench::COLUMNS);
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let oracle = &rec[8];
        let empirical: f64 = rec[9].parse().unwrap();
        if !oracle.is_empty() {
            assert!(empirical >= 1.0);
            if !rec[7].is_empty() {
                let certified: f64 = rec[7].parse().unwrap();
                assert!(certified + 1e-9 >= empirical, "{rec:?}");
            }
        }
        rows += 1;
    }
    assert!(rows >= 300);
    assert!(fs::read_to_string(&gantt).unwrap().contains("day  1 |"));
}

#[test]
fn exhausted_budget_is_flagged_with_exit_3() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("d.json");
    let out = fairsched(&["gen", "--n", "6", "--m", "4", "--seed", "1", "-o", s(&inst)]);
    assert!(out.status.success());
    let sched = dir.path().join("s.json");
    let out = fairsched(&[
        "solve",
        "--algo",
        "exact",
        "--time-budget",
        "0",
        "-o",
        s(&sched),
        s(&inst),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_str(&fs::read_to_string(&sched).unwrap()).unwrap();
    assert_eq!(v["certificate"]["flagged"], true);
    assert_eq!(
        fairsched(&["verify", s(&inst), s(&sched)]).status.code(),
        Some(0)
    );
}
