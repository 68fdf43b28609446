use std::fs;
use std::path::Path;
use std::process::Command;

use parallel_thompson::acquisition::{AcquisitionStrategy, StrategyKind};
use parallel_thompson::benchmarks::BenchmarkId;
use parallel_thompson::harness::cli::{run_cli, EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME};
use parallel_thompson::harness::{
    emit_plot_data, run_experiment, run_theory_suite, ExperimentConfig, ReportBundle, TheoryConfig,
};
use parallel_thompson::metrics::Axis;
use parallel_thompson::sim::{Mode, StopRule, TimeDistribution};
use parallel_thompson::Error;

fn tiny(kind: StrategyKind, mode: Mode, runs: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        BenchmarkId::Branin,
        mode,
        AcquisitionStrategy::new(kind),
        3,
        StopRule::Budget(12),
        TimeDistribution::uniform(0.5, 1.5).unwrap(),
    );
    cfg.runs = runs;
    cfg.base_seed = 40;
    cfg.time_grid = 10;
    cfg
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["parallel-thompson"];
    argv.extend_from_slice(args);
    let code = run_cli(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                files.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn single_random_run_smoke() {
    let bundle = run_experiment(&tiny(StrategyKind::Random, Mode::Asynchronous, 1)).unwrap();
    assert_eq!(bundle.traces.len(), 1);
    assert_eq!(bundle.label, "asyRand");
    assert_eq!(bundle.by_count.points.len(), 12);
    assert_eq!(bundle.by_time.points.len(), 10);
    assert!(bundle.by_count.points.iter().all(|p| p.stderr == 0.0));
}

#[test]
fn identical_configs_write_identical_bytes() {
    let cfg = tiny(StrategyKind::Ts, Mode::Synchronous, 2);
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&cfg)
        .unwrap()
        .write_to(&dir.path().join("a"))
        .unwrap();
    run_experiment(&cfg)
        .unwrap()
        .write_to(&dir.path().join("b"))
        .unwrap();
    let a = read_tree(&dir.path().join("a"));
    assert_eq!(a, read_tree(&dir.path().join("b")));
    let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
    for want in [
        "by_count.csv",
        "by_time.csv",
        "config.json",
        "summary.json",
        "traces/seed_40.csv",
    ] {
        assert!(names.contains(&want), "{names:?}");
    }
}

#[test]
fn bundles_reload_exactly() {
    let bundle = run_experiment(&tiny(StrategyKind::Ucb, Mode::Sequential, 2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    bundle.write_to(dir.path()).unwrap();
    assert_eq!(ReportBundle::load(dir.path()).unwrap(), bundle);
}

#[test]
fn plot_data_aligns_grids() {
    let dir = tempfile::tempdir().unwrap();
    assert!(emit_plot_data(&[], None, dir.path()).is_err());

    let a = run_experiment(&tiny(StrategyKind::Random, Mode::Asynchronous, 2)).unwrap();
    let mut cfg = tiny(StrategyKind::Ts, Mode::Asynchronous, 2);
    cfg.budget = Some(9);
    let b = run_experiment(&cfg).unwrap();
    assert!(emit_plot_data(&[a.clone(), a.clone()], None, dir.path()).is_err());

    let written = emit_plot_data(&[a, b], Some(Axis::ByCount), dir.path()).unwrap();
    assert_eq!(written.len(), 2);
    let grids: Vec<Vec<String>> = written
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).unwrap();
            assert!(text.starts_with("coordinate,mean,stderr,run_count\n"));
            text.lines()
                .skip(1)
                .map(|l| l.split(',').next().unwrap().to_string())
                .collect()
        })
        .collect();
    assert_eq!(grids[0], grids[1]);
    assert_eq!(grids[0].len(), 9);
}

#[test]
fn theory_suite_passes_and_negative_control_fails() {
    let cfg = TheoryConfig {
        trials: 200_000,
        concentration_runs: 200,
        throughput_runs: 200,
        seed: 3,
        ..TheoryConfig::default()
    };
    let report = run_theory_suite(&cfg).unwrap();
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    assert!(report.all_pass(), "{failed:?}");

    let strict = TheoryConfig {
        tolerance: 1e-12,
        ..cfg
    };
    let report = run_theory_suite(&strict).unwrap();
    assert!(!report.all_pass());
    assert!(report.failed > 0);

    let zero = TheoryConfig { trials: 0, ..cfg };
    assert!(run_theory_suite(&zero).is_err());
}

#[test]
fn theory_report_json_has_stable_key_order() {
    let cfg = TheoryConfig {
        trials: 20_000,
        concentration_runs: 100,
        throughput_runs: 50,
        ..TheoryConfig::default()
    };
    let json = run_theory_suite(&cfg).unwrap().to_json_string();
    let pos = |k: &str| json.find(&format!("\"{k}\"")).unwrap();
    assert!(pos("config") < pos("passed"));
    assert!(pos("passed") < pos("failed"));
    assert!(pos("failed") < pos("checks"));
    let first = &json[pos("checks")..];
    let order = [
        "name",
        "parameters",
        "expected",
        "observed",
        "tolerance",
        "relation",
        "pass",
    ];
    let idx: Vec<usize> = order
        .iter()
        .map(|k| first.find(&format!("\"{k}\"")).unwrap())
        .collect();
    assert!(idx.windows(2).all(|w| w[0] < w[1]), "{idx:?}");
    assert_eq!(json, run_theory_suite(&cfg).unwrap().to_json_string());
}

#[test]
fn config_echo_is_ordered_and_round_trips() {
    let cfg = tiny(StrategyKind::HallucinatedTs, Mode::Asynchronous, 3);
    let text = cfg.to_json_string();
    let keys = [
        "benchmark",
        "mode",
        "strategy",
        "workers",
        "budget",
        "times",
        "runs",
        "base_seed",
    ];
    let idx: Vec<usize> = keys
        .iter()
        .map(|k| text.find(&format!("\"{k}\"")).unwrap())
        .collect();
    assert!(idx.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(ExperimentConfig::from_json_str(&text).unwrap(), cfg);
}

#[test]
fn config_errors_name_the_field() {
    let bad = r#"{"benchmark": "branin", "mode": "asynchronous", "strategy": {"kind": "ts"},
                  "workers": 0, "budget": 5, "times": {"type": "exponential", "lambda": 1.0}}"#;
    match ExperimentConfig::from_json_str(bad) {
        Err(Error::Config { path, .. }) => assert_eq!(path, "workers"),
        other => panic!("{other:?}"),
    }
    let typo = bad.replace("\"workers\": 0", "\"workers\": 2, \"wrokers\": 2");
    assert!(matches!(
        ExperimentConfig::from_json_str(&typo),
        Err(Error::Config { .. })
    ));
    let unknown = bad
        .replace("branin", "rosenbrock")
        .replace("\"workers\": 0", "\"workers\": 2");
    match ExperimentConfig::from_json_str(&unknown) {
        Err(Error::Config { path, .. }) => assert_eq!(path, "benchmark"),
        other => panic!("{other:?}"),
    }
}

fn is_17_significant(field: &str) -> bool {
    let Some((mantissa, exp)) = field.split_once('e') else {
        return false;
    };
    let digits = mantissa.trim_start_matches('-').replace('.', "");
    digits.len() == 17 && digits.chars().all(|c| c.is_ascii_digit()) && exp.parse::<i32>().is_ok()
}

#[test]
fn csv_floats_carry_seventeen_digits() {
    let bundle = run_experiment(&tiny(StrategyKind::Ei, Mode::Asynchronous, 2)).unwrap();
    let text = bundle.by_time.to_csv_string();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert!(
            is_17_significant(f[0]) && is_17_significant(f[1]) && is_17_significant(f[2]),
            "{line}"
        );
        assert!(f[3].parse::<usize>().is_ok());
    }
    let trace = bundle.traces[0].1.to_csv_string();
    let header = trace.lines().next().unwrap();
    assert!(header.starts_with("index,worker,dispatch_time,finish_time,value,clean_value,x0"));
    for line in trace.lines().skip(1) {
        assert!(line.split(',').skip(2).all(is_17_significant), "{line}");
    }
}

#[test]
fn cli_exit_codes_in_process() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    fs::write(
        &cfg_path,
        tiny(StrategyKind::Random, Mode::Synchronous, 1).to_json_string(),
    )
    .unwrap();
    let out = dir.path().join("out");
    let (code, stdout, _) = cli(&[
        "run",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--runs",
        "2",
        "--seed",
        "7",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.starts_with("synRand: 2 runs"));
    let echoed = ExperimentConfig::from_path(&out.join("config.json")).unwrap();
    assert_eq!((echoed.runs, echoed.base_seed), (2, 7));
    assert!(out.join("traces/seed_8.csv").exists());

    let (code, _, err) = cli(&[
        "run",
        "--config",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_CONFIG, "{err}");
    fs::write(&cfg_path, "{\"benchmark\": 3}").unwrap();
    assert_eq!(
        cli(&["run", "--config", cfg_path.to_str().unwrap()]).0,
        EXIT_CONFIG
    );
    assert_eq!(cli(&["bogus-subcommand"]).0, EXIT_CONFIG);
    assert_eq!(cli(&["--help"]).0, EXIT_OK);

    let (code, stdout, _) = cli(&["list-benchmarks"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("name,dim,noise_sd,opt_value"));
    assert_eq!(lines.count(), BenchmarkId::ALL.len());

    let plot = dir.path().join("plot");
    let (code, _, err) = cli(&[
        "plot-data",
        out.to_str().unwrap(),
        "--out",
        plot.to_str().unwrap(),
        "--axis",
        "time",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(plot.join("synRand_by_time.csv").exists());
    // a directory that is not a bundle fails at run time, not at parse time
    let (code, _, _) = cli(&[
        "plot-data",
        plot.to_str().unwrap(),
        "--out",
        plot.to_str().unwrap(),
    ]);
    assert_ne!(code, EXIT_OK);
}

#[test]
fn theory_subcommand_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("theory.json");
    fs::write(
        &path,
        r#"{"trials": 10000, "tolerance": 1e-12, "concentration_runs": 100, "throughput_runs": 50}"#,
    )
    .unwrap();
    let (code, stdout, _) = cli(&["theory", "--config", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_RUNTIME);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["failed"].as_u64().unwrap() > 0);

    fs::write(&path, r#"{"trials": 0}"#).unwrap();
    assert_eq!(
        cli(&["theory", "--config", path.to_str().unwrap()]).0,
        EXIT_CONFIG
    );
}

#[test]
fn binary_reports_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_parallel-thompson");
    let ok = Command::new(exe).arg("list-benchmarks").output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8(ok.stdout).unwrap().contains("hartmann18"));
    let bad = Command::new(exe)
        .args(["run", "--config", "/nonexistent/cfg.json"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_CONFIG));
    assert!(!bad.stderr.is_empty());
}
