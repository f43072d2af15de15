use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rrx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrx")).args(args).env_remove("RRX_OUT_DIR").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field<'a>(summary: &'a str, key: &str) -> Option<&'a str> {
    summary.split_whitespace().find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
}

fn out_arg(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn rearrange_to_a_quarter() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path(), "r.csv");
    let o = rrx(&["rearrange", "--series", "alt-harmonic", "--target", "0.25", "--horizon", "100000", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert_eq!(field(&s, "verdict"), Some("converges-to"), "{s}");
    let fin: f64 = field(&s, "final").unwrap().parse().unwrap();
    assert!((fin - 0.25).abs() < 1e-3);
    assert_eq!(field(&s, "horizon"), Some("100000"));
    assert_eq!(field(&s, "band-violations"), Some("0"));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("index,sum_0,last_term_mag\n"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("config={"));
}

#[test]
fn confine_forced_bound() {
    let dir = tempfile::tempdir().unwrap();
    let batch = dir.path().join("b.txt");
    std::fs::write(&batch, "1\n-1\n1\n-1\n").unwrap();
    let out = out_arg(dir.path(), "c.json");
    let o = rrx(&["confine", "--batch", batch.to_str().unwrap(), "--format", "json", "--out", &out]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["achieved"], 1.0);
    assert_eq!(v["method"], "bruteforce");
    assert_eq!(field(&stdout(&o), "final"), Some("1"));
}

#[test]
fn zero_magnitudes_always_converge() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path(), "mc.csv");
    let o = rrx(&["signs-mc", "--magnitudes", "zero", "--trials", "20", "--horizon", "2000", "--window", "100", "--out", &out]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(field(&s, "convergence-proxy"), Some("1"), "{s}");
    assert_eq!(field(&s, "verdict"), Some("converges"));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("trial,tail_osc,running_max\n"));
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["rearrange", "--target", "0.25", "--horizon", "0"][..],
        &["rearrange", "--target", "0.25", "--horizon", "10", "--frobnicate"],
        &["rearrange", "--horizon", "10"],
        &["bogus-command"],
        &["jumble", "--perm", "flip:width=2,colour=red", "--set", "evens", "--horizon", "10"],
        &["steer", "--target", "0.1", "--horizon", "100"],
        &["mix", "--perm", "riemann", "--horizon", "100"],
        &[],
    ] {
        let o = rrx(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn runtime_errors_exit_1_and_leave_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let missing = dir.path().join("missing.txt");
    let o = rrx(&["confine", "--batch", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    // ragged rows
    let batch = dir.path().join("b.txt");
    std::fs::write(&batch, "1,0\n-1\n").unwrap();
    let o = rrx(&["confine", "--batch", batch.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    // negative magnitudes
    let o = rrx(&["signs-mc", "--magnitudes", "alt-harmonic", "--horizon", "100", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    // dependent coordinates cannot be steered apart
    let o = rrx(&[
        "steer", "--series", "alt-harmonic", "--series", "alt-harmonic", "--target", "0.5,0.9", "--horizon", "1000",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1, "only the batch file remains");
}

#[test]
fn undetermined_is_success() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path(), "r.csv");
    let o = rrx(&["rearrange", "--target", "0.25", "--horizon", "3", "--out", &out]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "verdict"), Some("undetermined"));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_rrx"))
        .args(["bp", "--perm", "identity", "--horizon", "100", "--format", "json"])
        .env("RRX_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("bp.json")).unwrap()).unwrap();
    assert_eq!(v["trajectory"]["horizon"], 100);
}

/// Every subcommand, small.
fn battery(dir: &Path) -> Vec<(String, Vec<String>)> {
    let batch = dir.join("batch.txt");
    std::fs::write(&batch, "0.5,0.1\n-0.3,0.4\n0.2,-0.9\n-0.4,0.4\n").unwrap();
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("rearrange", vec!["rearrange", "--target", "1.5", "--prefix", "1,3", "--horizon", "5000"]),
        ("oscillate", vec!["oscillate", "--lo", "-1", "--hi", "1", "--horizon", "5000"]),
        ("to-infinity", vec!["to-infinity", "--sign", "minus", "--horizon", "5000"]),
        ("shuffle-exp", vec!["shuffle-exp", "--negatives", "2000"]),
        ("confine", vec!["confine", "--batch", batch.to_str().unwrap()]),
        ("steer", vec!["steer", "--target", "0.8,0.5", "--horizon", "5000", "--no-precheck"]),
        ("pad", vec!["pad", "--random-flips", "3", "--count", "200"]),
        ("pad-iterate", vec!["pad", "--iterate", "affine:mul=2,add=2", "--count", "20"]),
        ("jumble", vec!["jumble", "--perm", "flip:stride=3", "--set", "orbit", "--horizon", "10000"]),
        ("mix", vec!["mix", "--perm", "riemann:target=0", "--series", "alt-harmonic", "--horizon", "5000"]),
        ("signs-mc", vec!["signs-mc", "--trials", "10", "--horizon", "2000", "--window", "100", "--seed", "3"]),
        ("bp", vec!["bp", "--perm", "flip:seed=4,max=9", "--horizon", "5000", "--seed", "9"]),
        ("adfam", vec!["adfam", "--reals", "sqrt2,sqrt3,sqrt5", "--depth", "500"]),
        ("pair-div", vec!["pair-div", "--x", "odd", "--y", "list:blocks=2;4;6", "--horizon", "4096"]),
        ("encode-perm", vec!["encode-perm", "--perm", "shuffle:beta=0.8", "--k", "40"]),
    ];
    cases.into_iter().map(|(n, a)| (n.to_string(), a.into_iter().map(String::from).collect())).collect()
}

#[test]
fn every_subcommand_is_deterministic_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    for (name, args) in battery(dir.path()) {
        for fmt in ["csv", "json"] {
            let mut files: Vec<PathBuf> = Vec::new();
            for run in 0..2 {
                let out = dir.path().join(format!("{name}-{run}.{fmt}"));
                let mut a: Vec<&str> = args.iter().map(String::as_str).collect();
                a.extend(["--format", fmt, "--out", out.to_str().unwrap()]);
                let o = rrx(&a);
                assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
                assert!(field(&stdout(&o), "verdict").is_some());
                files.push(out);
            }
            let (a, b) = (std::fs::read(&files[0]).unwrap(), std::fs::read(&files[1]).unwrap());
            assert!(!a.is_empty());
            assert_eq!(a, b, "{name} {fmt}");
            if fmt == "json" {
                serde_json::from_slice::<serde_json::Value>(&a).unwrap();
            }
        }
    }
}

#[test]
fn saved_config_replays_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = out_arg(dir.path(), "a.csv");
    let o = rrx(&["mix", "--perm", "riemann:target=0", "--horizon", "3000", "--out", &out, "--save-config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let first = std::fs::read(&out).unwrap();
    std::fs::remove_file(&out).unwrap();
    let o2 = rrx(&["--config", cfg.to_str().unwrap()]);
    assert!(o2.status.success(), "{}", String::from_utf8_lossy(&o2.stderr));
    assert_eq!(std::fs::read(&out).unwrap(), first);
    assert_eq!(stdout(&o), stdout(&o2));
    // the echoed canonical config is the same both times
    let echo = |o: &Output| String::from_utf8_lossy(&o.stderr).lines().find(|l| l.starts_with("config=")).map(String::from);
    assert_eq!(echo(&o), echo(&o2));
    // --config with a subcommand, or with overrides, is a usage error
    assert_eq!(rrx(&["--config", cfg.to_str().unwrap(), "--seed", "2"]).status.code(), Some(2));
    assert_eq!(rrx(&["--config", cfg.to_str().unwrap(), "bp", "--perm", "identity", "--horizon", "5"]).status.code(), Some(2));
}

#[test]
fn help_documents_the_grammar() {
    let o = rrx(&["--help"]);
    assert!(o.status.success());
    let h = stdout(&o);
    for word in ["kind:key=val", "flip:width=W", "riemann:target=T", "RRX_OUT_DIR", "signs-mc", "encode-perm"] {
        assert!(h.contains(word), "{word}");
    }
}

#[test]
fn shuffle_csv_has_paired_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path(), "s.csv");
    let o = rrx(&["shuffle-exp", "--negatives", "100", "--out", &out]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("index,sum_alpha,sum_beta\n"));
}
