use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cloudsched"));
    c.env_remove("SCHED_TIME_QUANTUM");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn one_job(deadline: &str) -> String {
    format!(
        r#"{{"params":{{"s_A":"1","s_B":"4","c":"2"}},
            "jobs":[{{"id":"a","release":"0","deadline":"{deadline}","p_A":"2","p_B":"1"}}]}}"#
    )
}

#[test]
fn run_a1_ok() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "i.json", &one_job("10"));
    let out = dir.path().join("s.json");
    let o = run(&["run", inst.to_str().unwrap(), "a1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("cost: 3"));
    // the written schedule validates on its own
    let v = run(&["validate", inst.to_str().unwrap(), out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("feasible, cost 3"));
}

#[test]
fn run_infeasible_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "i.json", &one_job("2"));
    let o = run(&["run", inst.to_str().unwrap(), "a1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("infeasible job a"));
}

#[test]
fn run_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "i.json", &one_job("10"));
    let o = run(&["run", inst.to_str().unwrap(), "greedyfit", "--json", "--ratio"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cost"], "3");
    assert_eq!(v["algorithm"], "greedyfit");
}

#[test]
fn bd_setup_ratio_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(
        dir.path(),
        "i.json",
        r#"{"params":{"s_A":"3","s_B":"8","c":"1"},"jobs":[{"id":"a","release":"0","deadline":"40","p_A":"2","p_B":"2"}]}"#,
    );
    let o = run(&["run", inst.to_str().unwrap(), "bd:0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("multiple"), "{}", stderr(&o));
}

#[test]
fn malformed_json_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(
        dir.path(),
        "i.json",
        r#"{"params":{"s_A":"1","s_B":"4","c":"1"},"jobs":[{"id":"a","release":"x","deadline":"4","p_A":"1","p_B":"1"}]}"#,
    );
    let o = run(&["run", inst.to_str().unwrap(), "a1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("jobs[0].release"), "{}", stderr(&o));
}

#[test]
fn unknown_algorithm_and_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "i.json", &one_job("10"));
    assert_eq!(run(&["run", inst.to_str().unwrap(), "fastest"]).status.code(), Some(2));
    assert_eq!(run(&["run", "/nonexistent.json", "a1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn quantum_rejects_off_grid_times() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "i.json", &one_job("10.5"));
    let o = bin()
        .args(["run", inst.to_str().unwrap(), "a1"])
        .env("SCHED_TIME_QUANTUM", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("quantum"));
    let o = bin()
        .args(["run", inst.to_str().unwrap(), "a1"])
        .env("SCHED_TIME_QUANTUM", "1/2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = bin()
        .args(["run", inst.to_str().unwrap(), "a1"])
        .env("SCHED_TIME_QUANTUM", "-1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn opt_cases() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "i.json", &one_job("10"));
    let out = dir.path().join("opt.json");
    let o = run(&["opt", inst.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("cost: 3"));
    assert_eq!(
        run(&["validate", inst.to_str().unwrap(), out.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );

    let empty = write(
        dir.path(),
        "e.json",
        r#"{"params":{"s_A":"1","s_B":"4","c":"1"},"jobs":[]}"#,
    );
    assert!(stdout(&run(&["opt", empty.to_str().unwrap()])).contains("cost: 0"));

    let big = dir.path().join("big.json");
    assert!(run(&["gen", "stacked-b", "n=9", "--out", big.to_str().unwrap()])
        .status
        .success());
    let o = run(&["opt", big.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("limit 8"));
}

#[test]
fn gen_families_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (fam, extra) in [
        ("prop1", "beta=2"),
        ("lb-mid", "epsilon=1/2"),
        ("lb-small-a", "t=4"),
        ("lb-small-b", "t=3"),
        ("greedyfit", "s_b=6"),
        ("stacked-b", "n=4"),
        ("random", "seed=9"),
    ] {
        let o = run(&["gen", fam, extra]);
        assert_eq!(o.status.code(), Some(0), "{fam}: {}", stderr(&o));
        let p = write(dir.path(), &format!("{fam}.json"), &stdout(&o));
        let r = run(&["run", p.to_str().unwrap(), "a1"]);
        assert!(matches!(r.status.code(), Some(0 | 1)), "{fam}");
    }
    assert_eq!(run(&["gen", "lb-mid", "bogus=1"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "nope"]).status.code(), Some(2));
}

#[test]
fn tentative_emits_json() {
    let dir = tempfile::tempdir().unwrap();
    let batch = write(
        dir.path(),
        "b.json",
        r#"{"params":{"s_A":"2","s_B":"4","c":"2"},"jobs":[
            {"id":"x","release":"0","deadline":"30","p_A":"1","p_B":"1"},
            {"id":"y","release":"0","deadline":"30","p_A":"1","p_B":"1"}]}"#,
    );
    let o = run(&["tentative", batch.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["objective"], "10");
    assert_eq!(v["intervals"].as_array().unwrap().len(), 2);
    let ff = run(&["tentative", batch.to_str().unwrap(), "--firstfit"]);
    assert_eq!(ff.status.code(), Some(0));
}

#[test]
fn bench_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "b.toml",
        r#"
[[sweep]]
name = "mid"
family = "lb-mid"
algorithms = ["a1"]
params = { s = 4, c = 1, t = 4 }
vary = { epsilon = ["1", "1/2", "1/4"] }
"#,
    );
    let a = run(&["bench", cfg.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("instance,algo,epsilon,beta,n,cost,opt,ratio,feasible,ms")
    );
    let ratios: Vec<f64> = lines.map(|l| l.split(',').nth(7).unwrap().parse().unwrap()).collect();
    assert_eq!(ratios.len(), 3);
    assert!(ratios[0] < ratios[1] && ratios[1] < ratios[2]);
    assert_eq!(stdout(&run(&["bench", cfg.to_str().unwrap(), "--workers", "1"])), text);

    let empty = write(dir.path(), "e.toml", "");
    assert_eq!(
        stdout(&run(&["bench", empty.to_str().unwrap()])),
        "instance,algo,epsilon,beta,n,cost,opt,ratio,feasible,ms\n"
    );
    let bad = write(dir.path(), "x.toml", "[[sweep]]\nname = 1\n");
    assert_eq!(run(&["bench", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn validate_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "i.json", &one_job("10"));
    let sched = write(
        dir.path(),
        "s.json",
        r#"{"rentals":[{"id":0,"type":"A","open":"0","close":"2"}],"assignments":[{"job":"a","rental":0,"start":"0"}]}"#,
    );
    let o = run(&["validate", inst.to_str().unwrap(), sched.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violation"));
}
