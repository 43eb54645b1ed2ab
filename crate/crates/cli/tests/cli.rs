use std::path::Path;
use std::process::Command;

use pmelab_cli::config::*;
use pmelab_cli::{run, run_to_dir, CliError, ExperimentConfig};
use proptest::prelude::*;

fn pmelab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pmelab"))
}

fn all_defaults() -> Vec<Experiment> {
    vec![
        Experiment::RegularitySweep(RegularitySweep::default()),
        Experiment::RegularitySweep(RegularitySweep::forced_pme()),
        Experiment::BarenblattValidate(BarenblattValidate::default()),
        Experiment::NondegeneracyFit(NondegeneracyFitConfig::default()),
        Experiment::AndersonRun(AndersonRunConfig::default()),
        Experiment::EnergyAudit(EnergyAuditConfig::default()),
        Experiment::ExponentTable(ExponentTableConfig::default()),
    ]
}

#[test]
fn config_echo_round_trips() {
    for e in all_defaults() {
        let c = ExperimentConfig::new(e);
        c.validate().unwrap();
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn random_configs_round_trip(m in 1.01f64..5.0, p in 1.0f64..6.0, n_log in 4u32..16, tol in 0.0f64..1.0, seed in any::<u64>()) {
        let c = ExperimentConfig {
            seed,
            ..ExperimentConfig::new(Experiment::BarenblattValidate(BarenblattValidate {
                m, p, n: 1 << n_log, tolerance: tol, ..Default::default()
            }))
        };
        c.validate().unwrap();
        prop_assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
    }
}

#[test]
fn minimal_json_fills_defaults() {
    let c = ExperimentConfig::from_json(r#"{"schema_version":1,"experiment":{"kind":"exponent-table"}}"#).unwrap();
    assert_eq!(c.experiment, Experiment::ExponentTable(ExponentTableConfig::default()));
    assert_eq!(c.seed, 1);
}

#[test]
fn invalid_configs_are_rejected_before_compute() {
    let bad = [
        r#"{"schema_version":2,"experiment":{"kind":"exponent-table"}}"#,
        r#"{"schema_version":1,"experiment":{"kind":"no-such-thing"}}"#,
        r#"{"schema_version":1,"experiment":{"kind":"barenblatt-validate","m":0.5}}"#,
        r#"{"schema_version":1,"experiment":{"kind":"barenblatt-validate","n":1000}}"#,
        r#"{"schema_version":1,"experiment":{"kind":"anderson-run","m":2.5}}"#,
        r#"{"schema_version":1,"experiment":{"kind":"energy-audit","gammas":[1.0]}}"#,
        r#"{"schema_version":1,"bogus":3,"experiment":{"kind":"exponent-table"}}"#,
    ];
    for b in bad {
        assert!(matches!(ExperimentConfig::from_json(b), Err(CliError::Config(_))), "{b}");
    }
}

#[test]
fn exit_codes_are_distinct() {
    let codes = [
        CliError::ChecksFailed { failed: 1 }.exit_code(),
        CliError::Config(String::new()).exit_code(),
        CliError::from(pmelab_core::Error::BlowUp { time: 0.0, step: 0, max_abs: 2.0, cap: 1.0 }).exit_code(),
        CliError::Io(std::io::Error::other("x")).exit_code(),
    ];
    assert_eq!(codes, [2, 3, 4, 5]);
}

#[test]
fn exponent_table_csv_matches_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, r#"{"schema_version":1,"format":"csv","experiment":{"kind":"exponent-table"}}"#).unwrap();
    let out = dir.path().join("out");
    let st = pmelab().args(["run", "--config"]).arg(&cfg_path).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let text = std::fs::read_to_string(out.join("exponent_table.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,s_star,p_star,s_energy"));
    for (line, m) in lines.zip([1.25f64, 1.5, 2.0, 3.0]) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v[0], m);
        assert!((v[1] - 2.0 / m).abs() < 1e-15);
        assert!((v[2] - m).abs() < 1e-12);
        assert_eq!(v[3], 2.0 / (m + 1.0));
    }
    assert!(!out.join("exponent_table.svg").exists());
    assert!(out.join("report.json").exists() && out.join("timing.json").exists());
}

#[test]
fn cli_reports_config_errors_and_check_failures() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"schema_version":1,"experiment":{"kind":"barenblatt-validate","m":1.0}}"#).unwrap();
    let st = pmelab().args(["run", "--config"]).arg(&bad).status().unwrap();
    assert_eq!(st.code(), Some(3));

    let strict = dir.path().join("strict.json");
    std::fs::write(&strict, r#"{"schema_version":1,"experiment":{"kind":"exponent-table","tolerance":0.0}}"#).unwrap();
    let st = pmelab().args(["run", "--config"]).arg(&strict).arg("--out").arg(dir.path().join("o")).status().unwrap();
    assert_eq!(st.code(), Some(2));

    let st = pmelab().args(["inspect", "--config"]).arg(&strict).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let st = pmelab().args(["suite", "--only", "9", "--out"]).arg(dir.path().join("s")).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let st = pmelab().args(["suite", "--only", "9", "--tolerance", "9=0", "--out"]).arg(dir.path().join("s0")).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn inspect_reads_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let g = pmelab_core::Grid::periodic(1, 8, 2.0).unwrap();
    let f = pmelab_core::Field::constant(g, 0.5).unwrap();
    let path = dir.path().join("u.bin");
    pmelab_core::grid::write_snapshot(&f, std::fs::File::create(&path).unwrap()).unwrap();
    let out = pmelab().args(["inspect", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dim 1 n 8 length 2"), "{text}");
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "timing.json")
        .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn empty_force_audit_is_conservative_and_deterministic() {
    let cfg = ExperimentConfig::new(Experiment::EnergyAudit(EnergyAuditConfig {
        ms: vec![2.0],
        forcings: vec![ForcingKind::Zero],
        n: 128,
        t_end: 0.05,
        snapshots: 10,
        ..Default::default()
    }));
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run_to_dir(&cfg, a.path()).unwrap();
    let rb = run_to_dir(&cfg, b.path()).unwrap();
    assert!(ra.passed(), "{:?}", ra.checks);
    assert!(ra.checks.iter().any(|c| c.name.contains("mass balance")));
    assert_eq!(ra.checks, rb.checks);
    assert_eq!(read_all(a.path()), read_all(b.path()));
    let echoed: serde_json::Value = serde_json::from_slice(&std::fs::read(a.path().join("report.json")).unwrap()).unwrap();
    let back: ExperimentConfig = serde_json::from_value(echoed["config"].clone()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn barenblatt_validate_at_full_resolution() {
    let (rep, out) = run(&ExperimentConfig::new(Experiment::BarenblattValidate(Default::default()))).unwrap();
    assert!(rep.passed(), "{:?}", rep.checks);
    let row = &out.tables[0].rows[0];
    let s_hat: f64 = row[1].parse().unwrap();
    assert!((1.23..=1.43).contains(&s_hat), "{s_hat}");
}

#[test]
fn seeds_change_stochastic_output() {
    let base = AndersonRunConfig {
        n: 512,
        t_end: 0.01,
        realisations: 1,
        mollifier_blocks: vec![3],
        ..Default::default()
    };
    let mk = |seed| ExperimentConfig {
        seed,
        ..ExperimentConfig::new(Experiment::AndersonRun(base.clone()))
    };
    let (a, _) = run(&mk(1)).unwrap();
    let (b, _) = run(&mk(2)).unwrap();
    let (c, _) = run(&mk(1)).unwrap();
    assert_ne!(a.checks, b.checks);
    assert_eq!(a.checks, c.checks);
}
