use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use thue_core::solve::{CoprimePair, SUnitSolution, ThueMahlerSolution};

const F: &str = "[1,0,0,-2]";

fn thue(args: &[&str], cache: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_thue"));
    c.args(args).env_remove("THUE_CACHE_DIR");
    if let Some(d) = cache {
        c.arg("--cache-dir").arg(d);
    }
    c.output().expect("binary runs")
}

fn lines(o: &Output) -> Vec<Value> {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is JSON"))
        .collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn thue_example_has_two_solutions_and_summary() {
    let recs = lines(&thue(&["solve", "thue", "--form", F, "-m", "1", "-B", "1000"], None));
    assert_eq!(recs.len(), 3);
    let sols: Vec<CoprimePair> = recs[..2]
        .iter()
        .map(|r| serde_json::from_value(r.clone()).unwrap())
        .collect();
    let pairs: Vec<(i64, i64)> = sols
        .iter()
        .map(|s| (i64::try_from(&s.p).unwrap(), i64::try_from(&s.q).unwrap()))
        .collect();
    assert_eq!(pairs, vec![(-1, -1), (1, 0)]);
    let s = &recs[2];
    assert_eq!(s["record"], "summary");
    assert_eq!(s["count"], 2);
    assert_eq!(s["command"], "solve thue");
    assert_eq!(s["seed"], 0);
    assert!(s["config_hash"].as_str().unwrap().len() == 64);
    assert!(s["version"].is_string());
}

#[test]
fn negative_right_side_is_accepted() {
    let recs = lines(&thue(&["solve", "thue", "--form", F, "-m", "-1", "-B", "1000"], None));
    assert_eq!(recs.last().unwrap()["count"], 2);
    assert_eq!(recs[0]["p"], -1);
    assert_eq!(recs[0]["q"], 0);
}

#[test]
fn sigma_example_reports_area_estimate() {
    let recs = lines(&thue(&["count", "sigma", "--form", F, "--tol", "1e-3"], None));
    let s = recs.last().unwrap();
    let v = s["value"].as_f64().unwrap();
    assert!((v - 4.2065463).abs() < 1e-3, "{v}");
    assert!(s["radius"].as_f64().unwrap() <= 1e-3);
    assert_eq!(s["method"], "quadrature");
}

#[test]
fn sunit_count_bound_is_seven_to_the_eighth() {
    let recs = lines(&thue(&["bounds", "eval", "--name", "sunit_count", "-t", "2"], None));
    assert_eq!(recs[0]["value"], 5_764_801);
    assert_eq!(recs[0]["side"], "upper_count");
}

#[test]
fn outputs_round_trip_into_core_types() {
    let recs = lines(&thue(&["solve", "tm", "--form", F, "-S", "2,3", "-B", "100"], None));
    for r in &recs[..recs.len() - 1] {
        let s: ThueMahlerSolution = serde_json::from_value(r.clone()).unwrap();
        assert_eq!(serde_json::to_value(&s).unwrap()["value"], r["value"]);
    }
    let recs = lines(&thue(&["solve", "sunit", "-S", "2,3", "-E", "4"], None));
    for r in &recs[..recs.len() - 1] {
        let s: SUnitSolution = serde_json::from_value(r.clone()).unwrap();
        assert_eq!(serde_json::to_value(&s).unwrap()["x"], r["x"]);
    }
}

#[test]
fn exit_codes_separate_usage_domain_and_internal() {
    let bad_form = thue(&["solve", "thue", "--form", "x", "-m", "1", "-B", "10"], None);
    assert_eq!(bad_form.status.code(), Some(2));
    assert!(stderr(&bad_form).contains("--form"));
    let not_prime = thue(&["solve", "sunit", "-S", "4", "-E", "2"], None);
    assert_eq!(not_prime.status.code(), Some(2));
    let bad_grid = thue(&["count", "A", "--form", F, "-Z", "100,10"], None);
    assert_eq!(bad_grid.status.code(), Some(2));
    assert!(stderr(&bad_grid).contains('z'));
    let out_of_domain = thue(
        &[
            "bounds",
            "eval",
            "--name",
            "thue_height",
            "-n",
            "3",
            "-H",
            "3",
            "-M",
            "1",
        ],
        None,
    );
    assert_eq!(out_of_domain.status.code(), Some(3));
    assert!(out_of_domain.stdout.is_empty());
    let reducible = thue(&["solve", "thue", "--form", "[1,0,-1]", "-m", "1", "-B", "10"], None);
    assert_eq!(reducible.status.code(), Some(3));
    // An unreadable cache location is an environment failure, not a user error.
    let file = tempfile::NamedTempFile::new().unwrap();
    let blocked = file.path().join("sub");
    let internal = thue(&["forms", "disc", "--form", F], Some(&blocked));
    assert_eq!(internal.status.code(), Some(4));
    assert_eq!(thue(&["--help"], None).status.code(), Some(0));
}

#[test]
fn identical_rerun_hits_cache_with_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["count", "A", "--form", F, "-Z", "100,1000"];
    let first = thue(&args, Some(dir.path()));
    let second = thue(&args, Some(dir.path()));
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(stderr(&first).contains("hits 0"));
    assert!(stderr(&second).contains("hits 1 misses 0"));
}

#[test]
fn changed_seed_misses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["count", "A", "--form", F, "-Z", "100,1000"];
    thue(&args, Some(dir.path()));
    let mut seeded = vec!["--seed", "7"];
    seeded.extend(args);
    let o = thue(&seeded, Some(dir.path()));
    assert!(stderr(&o).contains("hits 0"), "{}", stderr(&o));
    let recs = lines(&o);
    assert_eq!(recs.last().unwrap()["seed"], 7);
}

#[test]
fn extended_grid_reuses_cached_points() {
    let dir = tempfile::tempdir().unwrap();
    let small = lines(&thue(&["count", "A", "--form", F, "-Z", "100,1000"], Some(dir.path())));
    let o = thue(&["count", "A", "--form", F, "-Z", "100,1000,3000"], Some(dir.path()));
    // Two cached points; the whole-run entry and the new point are misses.
    assert!(stderr(&o).contains("hits 2 misses 2"), "{}", stderr(&o));
    let big = lines(&o);
    assert_eq!(small[..2], big[..2]);
}

#[test]
fn corrupt_cache_entry_is_a_miss_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["forms", "disc", "--form", F];
    let first = lines(&thue(&args, Some(dir.path())));
    for e in std::fs::read_dir(dir.path()).unwrap() {
        std::fs::write(e.unwrap().path(), b"not json").unwrap();
    }
    let o = thue(&args, Some(dir.path()));
    assert!(stderr(&o).contains("warning"));
    assert_eq!(lines(&o), first);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let cmds: [&[&str]; 3] = [
        &["solve", "sunit", "-S", "2,3,5", "-E", "6"],
        &["count", "A", "--form", F, "-Z", "1000,5000"],
        &["solve", "tm", "--form", F, "-S", "2,3", "-B", "200"],
    ];
    for cmd in cmds {
        let outs: Vec<Vec<u8>> = ["1", "4", "16"]
            .iter()
            .map(|t| {
                let mut a = vec!["--threads", t];
                a.extend(cmd);
                let o = thue(&a, None);
                assert!(o.status.success());
                o.stdout
            })
            .collect();
        assert_eq!(outs[0], outs[1]);
        assert_eq!(outs[0], outs[2]);
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(cfg, "# sweep defaults\nseed = 5\nformat = csv").unwrap();
    let path = cfg.path().to_str().unwrap();
    let o = thue(&["--config", path, "count", "R", "--form", F, "-Z", "100"], None);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("count,record,scan_box,z\n"), "{text}");
    assert!(text.contains("\"seed\":5"));
    let o = thue(
        &[
            "--config", path, "--seed", "9", "--format", "json", "forms", "disc", "--form", F,
        ],
        None,
    );
    assert_eq!(lines(&o)[0]["seed"], 9);
}

#[test]
fn verify_reads_a_summary_from_stdin() {
    let tm = thue(&["solve", "tm", "--form", F, "-S", "2,3", "-B", "100"], None);
    let mut child = Command::new(env!("CARGO_BIN_EXE_thue"))
        .args(["bounds", "verify", "--summary", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&tm.stdout).unwrap();
    let o = child.wait_with_output().unwrap();
    let recs = lines(&o);
    assert_eq!(recs[0]["verdict"], "PASS");
    assert_eq!(recs[0]["name"], "tm_count");
    assert_eq!(recs[0]["observed"], 6);
}

#[test]
fn big_values_are_strings() {
    let recs = lines(&thue(
        &["bounds", "eval", "--name", "tm_count", "-n", "3", "-t", "2"],
        None,
    ));
    assert_eq!(recs[0]["value"], "54000000000000000");
    let recs = lines(&thue(
        &[
            "bounds",
            "eval",
            "--name",
            "thue_height",
            "-n",
            "3",
            "-H",
            "3",
            "-M",
            "3",
        ],
        None,
    ));
    assert!(recs[0]["log_value"].is_f64());
    assert!(recs[0].get("value").is_none());
}
