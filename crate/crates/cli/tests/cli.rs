use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use quantum_ratio_cli::config::{DiffusionArgs, Format, ScenarioConfig, SgArgs, SgMode, SpinSpikeArgs, TunnelArgs};

fn qratio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qratio"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// CSV body without the `#` header lines, split into cells.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn workspace_file(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
        .display()
        .to_string()
}

#[test]
fn exit_codes() {
    assert_eq!(qratio(&["--help"]).status.code(), Some(0));
    assert_eq!(qratio(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qratio(&["diffusion", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        qratio(&["diffusion", "--particles", "unobtainium"]).status.code(),
        Some(1)
    );
    assert_eq!(qratio(&["diffusion", "--size", "3 furlongs"]).status.code(), Some(1));
    assert_eq!(qratio(&["regime", "--strictness", "1"]).status.code(), Some(1));
    assert_eq!(qratio(&["diffusion", "--threads", "0"]).status.code(), Some(1));
    assert_eq!(
        qratio(&["diffusion", "--seed", "18446744073709551615"]).status.code(),
        Some(1)
    );
    // a regime condition that fails is a failure, not a usage error
    let o = qratio(&["regime", "--tau-dec", "1e-3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau_dec << tau_trans"));
    assert_eq!(qratio(&["regime"]).status.code(), Some(0));
}

#[test]
fn unknown_config_keys_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "[diffusion]\nsize = \"1 um\"\ncolour = \"red\"\n").unwrap();
    let o = qratio(&["diffusion", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn diffusion_reproduces_the_reference_doubling_times() {
    let o = qratio(&[
        "diffusion",
        "--size",
        "1um",
        "--particles",
        "electron,hydrogen,C70,stone1g",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# tool: quantum-ratio"));
    assert!(text.contains("# config_sha256: "));
    assert!(text.contains("# convention: size = 2 x standard deviation"));
    let (h, rows) = csv_rows(&text);
    let t = column(&h, "doubling_time_s");
    let want = [1e-8, 1.6e-5, 8e-3, 1e19];
    assert_eq!(rows.len(), 4);
    for (row, w) in rows.iter().zip(want) {
        let got: f64 = row[t].parse().unwrap();
        assert!((1.0 / 3.0..=3.0).contains(&(got / w)), "{row:?}");
    }
}

#[test]
fn spin_spike_mean_is_the_binomial_mean() {
    let o = qratio(&["spin-spike", "--N", "1000", "--theta", "pi/4"]);
    assert!(o.status.success());
    let (h, rows) = csv_rows(&stdout(&o));
    let mean: f64 = rows[0][column(&h, "mean_x")].parse().unwrap();
    assert!((mean - (std::f64::consts::PI / 8.0).cos().powi(2)).abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let o = qratio(&[
        "spin-spike",
        "--N",
        "1000",
        "--theta",
        "pi/4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let dist = std::fs::read_to_string(dir.path().join("spin_spike_distribution.csv")).unwrap();
    let (h, rows) = csv_rows(&dist);
    let (x, w) = (column(&h, "x"), column(&h, "weight"));
    let total: f64 = rows.iter().map(|r| r[w].parse::<f64>().unwrap()).sum();
    let first: f64 = rows
        .iter()
        .map(|r| r[x].parse::<f64>().unwrap() * r[w].parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!((first - mean).abs() < 1e-12);
}

#[test]
fn tunnel_scan_is_unitary_and_matched() {
    let o = qratio(&["tunnel", "--barrier", "rect:V0=2E,w=0.6nm"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 100);
    let (u, t, r, wkb) = (
        column(&h, "unitarity_error"),
        column(&h, "t_exact"),
        column(&h, "r_exact"),
        column(&h, "t_wkb"),
    );
    for row in &rows {
        assert!(row[u].parse::<f64>().unwrap() <= 1e-10);
        let s: f64 = row[t].parse::<f64>().unwrap() + row[r].parse::<f64>().unwrap();
        assert!((s - 1.0).abs() <= 1e-10);
    }
    // below the barrier both methods report a value
    assert!(!rows[0][wkb].is_empty());
    assert_eq!(qratio(&["tunnel", "--barrier", "rect:V0=2E"]).status.code(), Some(1));
    assert_eq!(
        qratio(&["tunnel", "--barrier", "gauss:V0=2E,sigma=0.3nm", "--points", "20"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let run = |threads: &str, dir: &Path| {
        let o = qratio(&[
            "sg",
            "--mode",
            "classical",
            "--samples",
            "20000",
            "--threads",
            threads,
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        (
            std::fs::read(dir.join("sg_screen.csv")).unwrap(),
            std::fs::read(dir.join("sg_report.json")).unwrap(),
        )
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run("1", a.path()), run("4", b.path()));

    let tunnel = |threads| stdout(&qratio(&["tunnel", "--points", "50", "--threads", threads]));
    assert_eq!(tunnel("1"), tunnel("3"));
}

#[test]
fn config_file_and_flags_give_the_same_run() {
    let file = workspace_file("scenarios/tunnel_scan.toml");
    let from_file = stdout(&qratio(&["tunnel", "--config", &file]));
    let from_flags = stdout(&qratio(&[
        "tunnel",
        "--particle",
        "electron",
        "--energy",
        "1 eV",
        "--barrier",
        "rect:V0=2E,kw=10",
        "--points",
        "100",
    ]));
    assert_eq!(from_file, from_flags);
    // flags override the file, which changes the hash
    let other = stdout(&qratio(&["tunnel", "--config", &file, "--points", "10"]));
    assert_ne!(other.lines().nth(1), from_file.lines().nth(1));
}

#[test]
fn json_output_is_a_single_envelope() {
    let o = qratio(&["qratio", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["provenance"]["tool"], "quantum-ratio");
    let rows = v["report"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert!(r["log10_deviation"].as_f64().unwrap().abs() <= 0.5);
    }
    let o = qratio(&["qratio", "--particle", "electron", "--r-q", "1 nm"]);
    assert!(stdout(&o).contains("inf"));
}

#[test]
fn every_scenario_runs() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["silver_sg", "tunnel_scan", "ag_regime"] {
        let cfg = workspace_file(&format!("scenarios/{f}.toml"));
        let text = std::fs::read_to_string(&cfg).unwrap();
        ScenarioConfig::parse(&text).unwrap();
        let cmd = match f {
            "silver_sg" => "sg",
            "tunnel_scan" => "tunnel",
            _ => "regime",
        };
        let o = qratio(&[cmd, "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn paper_tables_writes_every_file_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = qratio(&["paper-tables", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "table1",
        "table5",
        "fig6_spin5",
        "fig7_spin1000",
        "fig6_spin5_summary",
        "fig7_spin1000_summary",
    ] {
        let text = std::fs::read_to_string(dir.path().join(format!("{f}.csv"))).unwrap();
        assert!(text.starts_with("# tool: "), "{f}");
    }
    let fig6 = std::fs::read_to_string(dir.path().join("fig6_spin5.csv")).unwrap();
    // N = 10 spins, two angles, eleven values of k each
    assert_eq!(csv_rows(&fig6).1.len(), 22);
}

#[test]
fn talbot_commands_report_resonance() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = qratio(&[
        "talbot",
        "--samples",
        "8192",
        "--slits",
        "50",
        "--carpet-rows",
        "8",
        "--out",
        d,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let si: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("self_image.json")).unwrap()).unwrap();
    assert!(si["report"]["self_image"]["correlation"].as_f64().unwrap() > 0.8);
    assert!(dir.path().join("carpet.csv").exists() && dir.path().join("carpet.json").exists());

    let o = qratio(&[
        "talbot-lau",
        "--samples",
        "8192",
        "--slits",
        "20",
        "--source",
        "point",
        "--out",
        d,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let tl: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("talbot_lau.json")).unwrap()).unwrap();
    assert!(tl["report"]["visibility"].as_f64().unwrap() >= 0.3);
}

fn opt_str() -> impl Strategy<Value = Option<String>> {
    prop::option::of("[a-zA-Z0-9 ./=,:-]{0,16}")
}

prop_compose! {
    fn scenario()(
        seed in prop::option::of(0..=i64::MAX as u64),
        json in any::<bool>(),
        size in opt_str(),
        particles in prop::option::of(prop::collection::vec("[A-Za-z0-9]{1,8}", 0..4)),
        gamma in prop::option::of(-1e300..1e300_f64),
        samples in prop::option::of(0usize..1_000_000),
        theta in opt_str(),
        n in prop::option::of(prop::collection::vec(1..=i64::MAX as u64, 1..4)),
        barrier in opt_str(),
        points in prop::option::of(any::<u32>()),
    ) -> ScenarioConfig {
        ScenarioConfig {
            seed,
            format: Some(if json { Format::Json } else { Format::Csv }),
            diffusion: DiffusionArgs { size, particles },
            sg: SgArgs { mode: Some(SgMode::Mixed), gamma, samples, theta: theta.clone(), ..SgArgs::default() },
            spin_spike: SpinSpikeArgs { n, theta: theta.map(|t| vec![t]) },
            tunnel: TunnelArgs { barrier, points: points.map(|p| p as usize), ..TunnelArgs::default() },
            ..ScenarioConfig::default()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn config_round_trips_exactly(c in scenario()) {
        let text = c.to_toml();
        let back = ScenarioConfig::parse(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_toml(), text);
    }
}
