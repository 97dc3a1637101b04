use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ewl_cli::commands::{cmd_avg, cmd_expsum, cmd_kbsz, cmd_sieve, ExpsumData, KbszData};
use ewl_cli::RunConfig;
use proptest::prelude::*;

fn ewl(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ewl"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("run ewl")
}

fn cfg(entries: &[(&str, &str)]) -> RunConfig {
    entries.iter().copied().collect()
}

#[test]
fn sieve_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let first = cmd_sieve(&cfg(&[("n_max", "10")]), dir.path()).unwrap().data;
    assert_eq!(first.sum_lambda, 0);
    assert_eq!((first.primes, first.squarefree, first.sum_mu), (4, 7, -1));
    assert_eq!(first.cache, ewl::arith::CacheStatus::Built);
    let again = cmd_sieve(&cfg(&[("n_max", "10")]), dir.path()).unwrap().data;
    assert_eq!(again.cache, ewl::arith::CacheStatus::Hit);
    assert_eq!(again.to_string(), first.to_string());
    let one = cmd_sieve(&cfg(&[("n_max", "1")]), dir.path()).unwrap().data;
    assert_eq!((one.primes, one.sum_lambda), (0, 1));
}

#[test]
fn zero_weight_gives_zero_series_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmd_avg(&cfg(&[("weight", "zero"), ("n_max", "5000")]), dir.path()).unwrap();
    assert!(o.data.series.values.iter().all(|v| v.norm() == 0.0));
    let text = fs::read_to_string(dir.path().join("avg.csv")).unwrap();
    let mut lines = text.lines();
    let meta = ewl::report::parse_meta(lines.next().unwrap()).unwrap();
    for key in ["schema_version", "tool", "version", "weight", "seed", "n_max"] {
        assert!(meta.iter().any(|(k, _)| k == key), "missing {key}");
    }
    assert_eq!(lines.next(), Some("N,re,im,abs"));
    assert!(lines.all(|l| l.ends_with(",0,0,0")));
}

#[test]
fn decay_report_is_decreasing() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmd_expsum(&cfg(&[("sizes", "2^12,2^16")]), dir.path()).unwrap();
    let ExpsumData::Decay(r) = o.data else { panic!("decay mode") };
    assert!(r.is_strictly_decreasing());
    let text = fs::read_to_string(dir.path().join("expsum.csv")).unwrap();
    assert_eq!(text.lines().nth(1), Some("N,k,G,max_norm,argmax_theta,fitted_A,fitted_C"));
}

#[test]
fn kbsz_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmd_kbsz(&cfg(&[("sequence", "one"), ("n_max", "1000")]), dir.path()).unwrap();
    let KbszData::Correlation(r) = o.data else { panic!("criterion mode") };
    assert_eq!(r.hypothesis_plausible, Some(false));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("kbsz.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["meta"]["sequence"], "one");
    assert_eq!(json["report"]["matrix"][0][1], serde_json::json!([1.0, 0.0]));

    let o = cmd_kbsz(
        &cfg(&[("sequence", "orbit"), ("alpha", "golden"), ("n_max", "100000"), ("grid", "100000"), ("p_max", "13")]),
        dir.path(),
    )
    .unwrap();
    let KbszData::Correlation(r) = o.data else { panic!("criterion mode") };
    assert_eq!(r.hypothesis_plausible, Some(true));
    assert!(r.weighted_at(100_000).unwrap().norm() < 0.05);

    let o = cmd_kbsz(&cfg(&[("mode", "commuting"), ("n_max", "100000")]), dir.path()).unwrap();
    let KbszData::Correlation(r) = o.data else { panic!("commuting mode") };
    assert!(r.weighted_at(100_000).unwrap().norm() < 0.05);
    assert!(r.label.is_some());
}

#[test]
fn exit_codes_and_messages() {
    let dir = tempfile::tempdir().unwrap();
    let ok = ewl(&["sieve", "--set", "n_max=100"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("primes=25"));

    let bad = ewl(&["expsum", "--set", "sizes=100", "--set", "grid_factor=2"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&bad.stderr);
    assert!(msg.contains("G") && msg.contains("4N"), "{msg}");

    let bad = ewl(&["finitary", "--set", "modulus=64", "--set", "n=64"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("N = 64 must be < J = 64"));

    let bad = ewl(&["avg", "--set", "weight=banana"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("weight"));

    let bad = ewl(&["--assert", "12"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    let bad = ewl(&["--assert", "1", "--set", "n_max=5"], dir.path());
    assert_eq!(bad.status.code(), Some(2));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let io = ewl(&["avg", "--set", "n_max=100"], &blocker.join("sub"));
    assert_eq!(io.status.code(), Some(3));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(&path, "# decay run\nsizes = 2^10\nweight = moebius\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ewl"))
        .args(["config", "--config"])
        .arg(&path)
        .args(["--set", "weight=liouville"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout), "sizes = 2^10\nweight = liouville\n");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["maximal", "--set", "modulus=256", "--set", "trials=3", "--set", "k=4", "--set", "seed=99"];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(ewl(&args, &a).status.code(), Some(0));
    assert_eq!(ewl(&args, &b).status.code(), Some(0));
    for f in ["maximal.csv", "transference.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    let c = dir.path().join("c");
    let other = ["maximal", "--set", "modulus=256", "--set", "trials=3", "--set", "k=4", "--set", "seed=100"];
    assert_eq!(ewl(&other, &c).status.code(), Some(0));
    assert_ne!(fs::read(a.join("maximal.csv")).unwrap(), fs::read(c.join("maximal.csv")).unwrap());
}

#[test]
fn assert_mode_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = ewl(&["--assert", "c10"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    assert!(dir.path().join("c10/closed_form.csv").exists());
}

proptest! {
    #[test]
    fn config_round_trip(entries in proptest::collection::btree_map("[a-z_][a-z0-9_]{0,12}", "[ -~]{0,30}", 0..12)) {
        let entries: Vec<(String, String)> = entries
            .into_iter()
            .map(|(k, v)| (k, v.trim().to_string()))
            .filter(|(_, v)| !v.is_empty())
            .collect();
        let cfg: RunConfig = entries.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        let text = cfg.to_text();
        let back = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_text(), text);
    }
}
