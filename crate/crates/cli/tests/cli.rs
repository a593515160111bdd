//! Binary-level behaviour: exit codes, determinism, artifact layout.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use memsim_cli::{Outcome, Registry, Scenario};

fn memory_sim(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_memory-sim"));
    cmd.args(args);
    if let Some(dir) = out {
        cmd.env("MEMORY_SIM_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

#[test]
fn list_is_stable_and_alphabetized() {
    let first = memory_sim(&["list"], None);
    let second = memory_sim(&["list"], None);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("fig5a-rose-visibility"));
    let names: Vec<&str> = text
        .lines()
        .filter_map(|l| l.split_whitespace().next())
        .collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted);
}

#[test]
fn unknown_scenario_exits_2_with_the_registered_names() {
    let out = memory_sim(&["run", "nonexistent"], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("derived-constants"));
    assert!(err.contains("rose-storage"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(memory_sim(&[], None).status.code(), Some(2));
    assert_eq!(memory_sim(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(memory_sim(&["run"], None).status.code(), Some(2));
    // malformed --set value is a configuration error, not a panic
    let dir = tempfile::tempdir().unwrap();
    let out = memory_sim(
        &["run", "derived-constants", "--set", "garbage"],
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_the_artifact_files_and_exits_0_on_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = memory_sim(&["run", "derived-constants"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let scenario_dir = dir.path().join("derived-constants");
    for file in ["data.csv", "fit.txt", "summary.txt"] {
        assert!(scenario_dir.join(file).is_file(), "missing {file}");
    }
    let summary = fs::read_to_string(scenario_dir.join("summary.txt")).unwrap();
    assert!(summary.contains("status=pass"));
    assert!(!summary.contains('\r'));
}

#[test]
fn missed_target_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = memory_sim(
        &[
            "run",
            "derived-constants",
            "--set",
            "expect.od=5.0:0.1%",
        ],
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(1));
    let summary =
        fs::read_to_string(dir.path().join("derived-constants/summary.txt")).unwrap();
    assert!(summary.contains("status=fail"));
}

#[test]
fn identical_config_and_seed_give_byte_identical_output() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = memory_sim(&["run", "fig5b-afc-visibility"], Some(dir.path()));
        assert_eq!(out.status.code(), Some(0));
    }
    for file in ["data.csv", "fit.txt", "summary.txt", "scan0.csv"] {
        let a = fs::read(dir_a.path().join("fig5b-afc-visibility").join(file)).unwrap();
        let b = fs::read(dir_b.path().join("fig5b-afc-visibility").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn overrides_change_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = memory_sim(
        &[
            "run",
            "fig4-t2",
            "--set",
            "t2_waveguide=150us",
            "--set",
            "expect.t2_waveguide_us=150:0.1%",
        ],
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
}

#[test]
fn registering_a_plugin_scenario_grows_the_listing_by_one() {
    let mut registry = Registry::standard();
    let before = registry.listing();
    registry.register(Scenario {
        name: "zz-plugin",
        description: "locally registered scenario",
        config_text: "expect.answer=42:0\n",
        run: |_cfg| {
            let mut values = BTreeMap::new();
            values.insert("answer".to_string(), 42.0);
            Ok(Outcome {
                values,
                data_csv: "quantity,value\nanswer,42\n".into(),
                fit_report: String::new(),
                extra_files: vec![],
            })
        },
    });
    let after = registry.listing();
    assert_eq!(after.lines().count(), before.lines().count() + 1);
    assert!(after.contains("zz-plugin"));

    let dir = tempfile::tempdir().unwrap();
    let report = memsim_cli::run_scenario(&registry, "zz-plugin", &[], dir.path()).unwrap();
    assert!(report.passed);
}

#[test]
fn every_scenario_finishes_well_inside_the_time_budget() {
    let dir = tempfile::tempdir().unwrap();
    let names = {
        let list = memory_sim(&["list"], None);
        String::from_utf8(list.stdout)
            .unwrap()
            .lines()
            .filter_map(|l| l.split_whitespace().next().map(str::to_string))
            .collect::<Vec<_>>()
    };
    for name in names {
        let start = std::time::Instant::now();
        let out = memory_sim(&["run", &name], Some(dir.path()));
        let elapsed = start.elapsed();
        assert_eq!(out.status.code(), Some(0), "{name} failed: {out:?}");
        assert!(
            elapsed.as_secs() < 60,
            "{name} took {elapsed:?}, over the 60 s budget"
        );
    }
}

#[test]
fn profile_csv_artifact_uses_the_canonical_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = memory_sim(&["run", "fig3-absorption"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("fig3-absorption/data.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("detuning_hz,od"));
    let first = lines.next().unwrap();
    let fields: Vec<&str> = first.split(',').collect();
    assert_eq!(fields.len(), 2);
    // full double precision: 17 significant digits
    assert!(fields[1].len() >= 17);
}
