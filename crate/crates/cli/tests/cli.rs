use std::path::Path;
use std::process::{Command, Output};

use deaconescu::props::ClassificationRecord;
use deaconescu::search::{Checkpoint, SearchReport};
use num_bigint::BigUint;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deaconescu"))
        .args(args)
        .env_remove("DEACONESCU_MEMORY_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn totient_human_output() {
    for (n, line) in [
        ("15", "phi=8 s2=3 omega=2 squarefree=true"),
        ("1", "phi=1 s2=1 omega=0 squarefree=true"),
        ("12", "phi=4 s2=0 omega=2 squarefree=false"),
    ] {
        let out = run(&["totient", n]);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out).trim(), line);
    }
}

#[test]
fn parse_failures_exit_2() {
    for args in [
        &["totient", "abc"][..],
        &["totient", "0"],
        &["check", "1"],
        &["check", "-5"],
        &["bound", "0"],
        &["verify", "lemma99"],
        &["frobnicate"],
        &["scan", "--limit", "1"],
        &["search", "--m", "4"],
    ] {
        assert_eq!(code(&run(args)), 2, "{args:?}");
    }
}

#[test]
fn check_records() {
    let out = run(&["check", "7"]);
    assert_eq!(code(&out), 0);
    let line = stdout(&out);
    assert!(
        line.contains("is_prime=true") && line.contains("multiplier=1"),
        "{line}"
    );

    let line = stdout(&run(&["check", "15"]));
    assert!(line.contains("multiplier=null"), "{line}");

    let line = stdout(&run(&["check", "4"]));
    assert!(
        line.contains("is_lehmer=false") && line.contains("is_deaconescu=false"),
        "{line}"
    );
}

#[test]
fn json_records_round_trip() {
    for n in [2u64, 4, 7, 15, 341, 561, 1_000_000_007] {
        let out = run(&["--format", "json", "check", &n.to_string()]);
        assert_eq!(code(&out), 0);
        let record: ClassificationRecord = serde_json::from_str(stdout(&out).trim()).unwrap();
        assert_eq!(record, ClassificationRecord::for_n(n).unwrap());
    }
}

#[test]
fn bound_values() {
    assert_eq!(stdout(&run(&["bound", "2"])).trim(), "2^6 - 2^4 = 48");
    assert_eq!(stdout(&run(&["bound", "1"])).trim(), "2^3 - 2^2 = 4");
    let expected = (BigUint::from(1u32) << 135u32) - (BigUint::from(1u32) << 71u32);
    assert_eq!(
        stdout(&run(&["bound", "7"])).trim(),
        format!("2^135 - 2^71 = {expected}")
    );

    let out = run(&["--format", "json", "bound", "7"]);
    let v: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["high_exponent"], 135);
    assert_eq!(v["low_exponent"], 71);
    assert_eq!(v["value"], expected.to_string());
}

#[test]
fn bound_over_budget_exits_3() {
    assert_eq!(code(&run(&["bound", "40"])), 3);
}

#[test]
fn csv_headers() {
    let cases: [(&[&str], &str); 5] = [
        (&["totient", "15"], "n,phi,s2,omega,squarefree"),
        (&["check", "15"], "n,phi,s2,is_prime,is_lehmer,is_deaconescu,multiplier"),
        (&["bound", "3"], "k,high_exponent,low_exponent,value"),
        (&["verify", "lemma21", "--limit", "100"], "suite,check,status,detail"),
        (
            &["scan", "--limit", "100"],
            "examined,pruned_ratio,pruned_bound,pruned_mod3,primes,primes_in_d1,witnesses,lehmer_witnesses,elapsed_seconds,cursor",
        ),
    ];
    for (args, header) in cases {
        let mut full = vec!["--format", "csv"];
        full.extend_from_slice(args);
        let out = run(&full);
        assert_eq!(code(&out), 0, "{args:?}");
        assert_eq!(stdout(&out).lines().next(), Some(header), "{args:?}");
    }
    let text = stdout(&run(&["--format", "csv", "totient", "15"]));
    assert_eq!(text.lines().nth(1), Some("15,8,3,2,true"));
}

#[test]
fn verify_suites_pass() {
    for args in [
        &["verify", "oracle", "--limit", "10000"][..],
        &["verify", "lemma21", "--limit", "100000"],
        &["verify", "thm11"],
        &["verify", "nielsen"],
        &["verify", "thm13"],
    ] {
        let out = run(args);
        assert_eq!(code(&out), 0, "{args:?}: {}", stdout(&out));
        let text = stdout(&out);
        assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
    }
}

#[test]
fn verify_json_lines_parse() {
    let out = run(&["--format", "json", "verify", "all", "--limit", "200"]);
    assert_eq!(code(&out), 0);
    let suites: Vec<String> = stdout(&out)
        .lines()
        .map(|l| {
            serde_json::from_str::<Value>(l).unwrap()["suite"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    for s in ["lemma21", "thm11", "nielsen", "oracle", "thm13"] {
        assert!(suites.iter().any(|x| x == s), "{s} missing");
    }
}

#[test]
fn scan_reports() {
    let out = run(&["scan", "--limit", "2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("examined=1 "));

    let out = run(&["--workers", "2", "scan", "--limit", "1000000"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(
        text.starts_with("examined=999999 ") && text.contains(" witnesses=0 "),
        "{text}"
    );

    let out = run(&["--format", "json", "scan", "--limit", "100000"]);
    let report: SearchReport = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report.examined, 99_999);
    assert_eq!(report.primes, 9592);
}

#[test]
fn emit_records_streams_every_value() {
    let out = run(&[
        "--format",
        "json",
        "scan",
        "--limit",
        "500",
        "--emit-records",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 499 + 1);
    for (i, line) in lines[..499].iter().enumerate() {
        let record: ClassificationRecord = serde_json::from_str(line).unwrap();
        assert_eq!(record, ClassificationRecord::for_n(i as u64 + 2).unwrap());
    }
    let report: SearchReport = serde_json::from_str(lines[499]).unwrap();
    assert_eq!(report.examined, 499);
}

#[test]
fn search_with_flags() {
    let out = run(&["search", "--k", "7", "--pool", "100000", "--n-cap", "1e18"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains(" witnesses=0 "));

    let out = run(&[
        "--format", "json", "search", "--k-min", "3", "--k-max", "5", "--pool", "200", "--m", "all",
    ]);
    assert_eq!(code(&out), 0);
    let report: SearchReport = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!(report.witnesses.is_empty());
    assert!(report.pruned_ratio + report.pruned_bound + report.pruned_mod3 > 0);
}

fn scan_json(args: &[&str]) -> (i32, SearchReport) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let report = serde_json::from_str(stdout(&out).trim()).unwrap_or_default();
    (code(&out), report)
}

#[test]
fn interrupted_scan_resumes_to_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("scan.json");
    let cp = cp.to_str().unwrap();

    let (_, whole) = scan_json(&["scan", "--limit", "1000000"]);
    let (status, partial) = scan_json(&[
        "scan",
        "--limit",
        "1000000",
        "--checkpoint",
        cp,
        "--stop-after-units",
        "4",
    ]);
    assert_eq!(status, 0);
    assert!(partial.examined < whole.examined);
    assert!(Path::new(cp).exists());

    let (status, total) = scan_json(&["resume", "--checkpoint", cp]);
    assert_eq!(status, 0);
    assert_eq!(total.canonical_json(), whole.canonical_json());
    let saved = Checkpoint::load(Path::new(cp)).unwrap();
    assert_eq!(
        saved.partial_counters.canonical_json(),
        whole.canonical_json()
    );
}

#[test]
fn checkpoint_mismatch_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("scan.json");
    let cp = cp.to_str().unwrap();
    let (status, _) = scan_json(&[
        "scan",
        "--limit",
        "200000",
        "--checkpoint",
        cp,
        "--stop-after-units",
        "1",
    ]);
    assert_eq!(status, 0);
    // Same checkpoint, different limit.
    assert_eq!(
        code(&run(&["scan", "--limit", "300000", "--checkpoint", cp])),
        4
    );
    // Search against a scan checkpoint.
    assert_eq!(
        code(&run(&[
            "search",
            "--k",
            "3",
            "--pool",
            "100",
            "--checkpoint",
            cp
        ])),
        4
    );
    // Missing and corrupt files.
    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&run(&["resume", "--checkpoint", missing.to_str().unwrap()])),
        4
    );
    let corrupt = dir.path().join("corrupt.json");
    std::fs::write(&corrupt, "{ not json").unwrap();
    assert_eq!(
        code(&run(&["resume", "--checkpoint", corrupt.to_str().unwrap()])),
        4
    );
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "mode = \"exhaustive\"\nlimit = 5000\nworker_count = 2\n",
    )
    .unwrap();
    let config = config.to_str().unwrap();

    let (status, report) = scan_json(&["--config", config, "scan"]);
    assert_eq!(status, 0);
    assert_eq!(report.examined, 4999);
    let (_, report) = scan_json(&["--config", config, "scan", "--limit", "100"]);
    assert_eq!(report.examined, 99);

    let dfs = dir.path().join("dfs.toml");
    std::fs::write(
        &dfs,
        "k_range = [3, 4]\nm_candidates = \"all\"\nprime_pool_limit = 150\nn_cap = \"2^40\"\n",
    )
    .unwrap();
    let out = run(&["--config", dfs.to_str().unwrap(), "search"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "limt = 5\n").unwrap();
    assert_eq!(code(&run(&["--config", bad.to_str().unwrap(), "scan"])), 2);
}
