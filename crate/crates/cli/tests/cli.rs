use std::path::Path;
use std::process::{Command, Output};

use harvest_cli::config::{RunConfig, Task};
use harvest_cli::presets;
use harvest_cli::run::run;
use harvest_cli::svg::{render, PlotSpec, Table};
use harvest_cli::CliError;
use harvest_core::kernels::QuadratureMethod;
use harvest_core::oracle::{gaussian_profile, Boundary, LatticeModel};
use proptest::prelude::*;
use serde_json::Value;

fn harvest(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harvest"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn all_presets() -> Vec<RunConfig> {
    ["fig1", "fig2", "fig4", "oracle", "oracle-chain"]
        .iter()
        .map(|n| presets::by_name(n).unwrap().config)
        .collect()
}

fn monte_carlo_config() -> RunConfig {
    let mut cfg = presets::fig1().config;
    if let Task::Harvest(h) = &mut cfg.task {
        h.quadrature.method = QuadratureMethod::MonteCarlo {
            seed: 7,
            samples: 1000,
        };
        h.quadrature.rel_tol = 1e-2;
    }
    cfg
}

fn object_keys(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                out.push(k.clone());
                object_keys(v, out);
            }
        }
        Value::Array(items) => items.iter().for_each(|i| object_keys(i, out)),
        _ => {}
    }
}

#[test]
fn presets_round_trip_and_validate() {
    for cfg in all_presets() {
        cfg.validate().unwrap();
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let mut v: Value = serde_json::from_str(&presets::fig4().config.to_json()).unwrap();
    v["task"]["sweep"]["stride"] = Value::from(2);
    let err = RunConfig::from_json(&v.to_string()).unwrap_err();
    assert!(matches!(err, CliError::Parse(ref m) if m.contains("stride")), "{err}");

    let mut v: Value = serde_json::from_str(&presets::fig1().config.to_json()).unwrap();
    v["task"]["detector_a"]["potential"]["radius"] = Value::from(1.0);
    assert!(RunConfig::from_json(&v.to_string()).is_err());
}

#[test]
fn empty_sweep_is_rejected_with_field_path() {
    let mut v: Value = serde_json::from_str(&presets::fig1().config.to_json()).unwrap();
    v["task"]["sweep"]["max"] = v["task"]["sweep"]["min"].clone();
    let err = RunConfig::from_json(&v.to_string()).unwrap_err();
    match err {
        CliError::Config { path, .. } => assert!(path.starts_with("task.sweep"), "{path}"),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn help_documents_every_config_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = harvest(&["--help"], dir.path());
    assert!(out.status.success());
    let help = String::from_utf8(out.stdout).unwrap();
    let mut keys = Vec::new();
    let mut configs = all_presets();
    configs.push(monte_carlo_config());
    for cfg in configs {
        object_keys(&serde_json::from_str(&cfg.to_json()).unwrap(), &mut keys);
    }
    keys.extend(["csv", "svg", "include_zero", "force_full_3d", "center_time"].map(String::from));
    keys.sort();
    keys.dedup();
    for k in keys {
        assert!(help.contains(&k), "--help does not mention `{k}`");
    }
}

#[test]
fn purity_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = harvest(&["fig4", "--out", name, "--svg"], dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(read("a.svg"), read("b.svg"));
}

#[test]
fn purity_is_symmetric_under_ratio_inversion() {
    let csv = run(&presets::fig4().config).unwrap();
    let table = Table::parse(&csv).unwrap();
    let r = table.numbers("sigma_over_ell").unwrap();
    let nu = table.numbers("nu").unwrap();
    let dim = table.numbers("dim").unwrap();
    for i in 0..r.len() {
        let j = (0..r.len())
            .find(|&j| dim[j] == dim[i] && (r[j] * r[i] - 1.0).abs() < 1e-12)
            .expect("log sweep symmetric about 1");
        assert!((nu[i] - nu[j]).abs() <= 1e-10 * nu[i], "r = {}", r[i]);
    }
}

#[test]
fn svg_curve_counts_follow_grouping() {
    let fig4 = presets::fig4();
    let svg = render(&Table::parse(&run(&fig4.config).unwrap()).unwrap(), &fig4.plot).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);

    let fig1 = presets::fig1();
    let cfg = fig1.config.clone().with_points(6);
    let svg = render(&Table::parse(&run(&cfg).unwrap()).unwrap(), &fig1.plot).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
}

#[test]
fn plotting_a_missing_column_names_it() {
    let table = Table::parse("a,b\n1,2\n3,4\n").unwrap();
    let err = render(&table, &PlotSpec::lines("a", &["nope"])).unwrap_err();
    assert!(matches!(err, CliError::MissingColumn(ref c) if c == "nope"));

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("t.csv"), "a,b\n1,2\n").unwrap();
    let out = harvest(&["plot", "t.csv", "--x", "a", "--y", "missing"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("`missing`"));
}

#[test]
fn seedless_refuses_monte_carlo() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("mc.json"), monte_carlo_config().to_json()).unwrap();
    let out = harvest(&["harvest", "--config", "mc.json", "--seedless"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seedless"));
    assert!(!dir.path().join("out.csv").exists());
}

#[test]
fn presets_reject_config_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), presets::fig4().config.to_json()).unwrap();
    let out = harvest(&["fig4", "--config", "c.json"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn zero_coupling_oracle_row_is_exactly_zero() {
    let mut cfg = presets::oracle_single().config;
    if let Task::Oracle(o) = &mut cfg.task {
        let sites = 16;
        o.model = LatticeModel {
            n_sites: sites,
            spacing: 0.5,
            target_mass: 1.0,
            boundary: Boundary::Periodic,
            probes: o.model.probes.clone(),
        };
        for (p, c) in o.model.probes.iter_mut().zip([5.0, 7.0]) {
            if let harvest_core::oracle::ProbeModes::SingleMode { profile, .. } = &mut p.modes {
                *profile = gaussian_profile(sites, 0.5, c, 0.5);
            }
        }
        o.lambdas.points = 2;
    }
    let table = Table::parse(&run(&cfg).unwrap()).unwrap();
    let lambda = table.numbers("lambda").unwrap();
    let exact = table.numbers("n_exact").unwrap();
    let zero = lambda.iter().position(|&l| l == 0.0).expect("lambda = 0 row");
    assert_eq!(exact[zero], 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edited_configs_round_trip(
        min in 0.0f64..4.0,
        width in 0.1f64..10.0,
        points in 2usize..500,
        tol in 1e-12f64..1e-2,
        seps in prop::collection::vec(0.1f64..20.0, 0..4),
    ) {
        let mut cfg = presets::fig2().config;
        if let Task::Harvest(h) = &mut cfg.task {
            h.sweep.min = min;
            h.sweep.max = min + width;
            h.sweep.points = points;
            h.quadrature.rel_tol = tol;
            h.separations = seps;
        }
        prop_assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }
}
