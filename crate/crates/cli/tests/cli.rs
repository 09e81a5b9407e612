use std::process::{Command, Output};

use mdiew_cli::{run, Command as Cmd, RunConfig};

fn mdiew(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdiew"))
        .args(args)
        .env_remove("MDIEW_SEED")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(i).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn mdiew_curve_analytic_column() {
    let out = stdout(&mdiew(&[
        "--command",
        "mdiew-curve",
        "--trials",
        "0",
        "--v",
        "0",
        "--v",
        "0.25",
        "--v",
        "0.5",
        "--v",
        "0.75",
        "--v",
        "1",
    ]));
    let j = column(&out, "j");
    for (got, want) in j.iter().zip([-0.125, -0.0625, 0.0, 0.0625, 0.125]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn attack_demo_operating_point() {
    let out = stdout(&mdiew(&[
        "--command",
        "attack-demo",
        "--trials",
        "0",
        "--v",
        "1",
        "--delta-t",
        "5.5",
        "--window",
        "4",
    ]));
    let w = column(&out, "witness_attacked");
    assert_eq!(w.len(), 1);
    assert!((w[0] - -0.40171325518485124).abs() < 1e-10);
}

#[test]
fn tangle_curve_on_published_angles() {
    let out = stdout(&mdiew(&[
        "--command",
        "tangle-curve",
        "--theta",
        "45",
        "--theta",
        "30",
        "--theta",
        "22.5",
        "--theta",
        "15",
        "--theta",
        "0",
    ]));
    for (got, want) in column(&out, "tangle")
        .iter()
        .zip([1.0, 0.25, 0.0, 0.0, 0.0])
    {
        assert!((got - want).abs() < 1e-9);
    }
}

#[test]
fn csv_uses_full_precision_and_footer() {
    let out = stdout(&mdiew(&["--command", "tangle-curve", "--v", "0.1"]));
    let row = out.lines().nth(1).unwrap();
    for field in row.split(',') {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
    }
    assert!(out.contains("# seed: 42 (default)"));
    assert!(out.contains(&format!("# version: {}", env!("CARGO_PKG_VERSION"))));
}

#[test]
fn seed_from_environment_is_logged() {
    let out = Command::new(env!("CARGO_BIN_EXE_mdiew"))
        .args(["--command", "mdiew-curve", "--trials", "1000", "--v", "0.5"])
        .env("MDIEW_SEED", "9")
        .output()
        .unwrap();
    let text = stdout(&out);
    assert!(text.contains("# seed: 9 (env MDIEW_SEED)"), "{text}");
    let flagged = stdout(&mdiew(&[
        "--command",
        "mdiew-curve",
        "--trials",
        "1000",
        "--v",
        "0.5",
        "--seed",
        "9",
    ]));
    // same seed, same numbers
    assert_eq!(column(&text, "j_estimate"), column(&flagged, "j_estimate"));
}

#[test]
fn different_seeds_change_estimates() {
    let a = stdout(&mdiew(&[
        "--command",
        "mdiew-curve",
        "--trials",
        "5000",
        "--v",
        "1",
        "--seed",
        "1",
    ]));
    let b = stdout(&mdiew(&[
        "--command",
        "mdiew-curve",
        "--trials",
        "5000",
        "--v",
        "1",
        "--seed",
        "2",
    ]));
    assert_ne!(column(&a, "j_estimate"), column(&b, "j_estimate"));
}

#[test]
fn json_mirrors_csv_rows() {
    let out = stdout(&mdiew(&["--command", "tables", "--format", "json"]));
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    let csv = stdout(&mdiew(&["--command", "tables"]));
    assert_eq!(
        rows.len(),
        csv.lines().filter(|l| !l.starts_with('#')).count() - 1
    );
    assert_eq!(rows[0]["decomposition"], "sparse");
    assert_eq!(doc["metadata"]["command"], "tables");
}

#[test]
fn default_curves_are_finite() {
    for cmd in [
        Cmd::MdiewCurve,
        Cmd::TangleCurve,
        Cmd::Tomography,
        Cmd::EfficiencyCurve,
        Cmd::AttackDemo,
    ] {
        let mut cfg = RunConfig::new(cmd);
        if matches!(
            cmd,
            Cmd::MdiewCurve | Cmd::EfficiencyCurve | Cmd::AttackDemo
        ) {
            cfg.trials = Some(2000);
        }
        let table = run(&cfg).unwrap();
        if matches!(cmd, Cmd::MdiewCurve | Cmd::TangleCurve) {
            assert_eq!(table.rows.len(), 21);
        }
        for name in &table.columns {
            for x in table.column(name).unwrap() {
                assert!(x.is_finite(), "{name} in {}", cmd.name());
            }
        }
    }
}

#[test]
fn invalid_input_exits_nonzero() {
    for args in [
        &["--command", "mdiew-curve", "--v", "1.5"][..],
        &["--command", "tangle-curve", "--v", "0.5", "--theta", "10"],
        &[
            "--command",
            "attack-demo",
            "--window",
            "-1",
            "--trials",
            "0",
        ],
        &["--command", "nope"],
        &["--command", "mdiew-adversary", "--draws", "0"],
    ] {
        let out = mdiew(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unwritable_output_path_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = mdiew(&["--command", "tables", "--out", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let printed = stdout(&mdiew(&["--command", "tangle-curve"]));
    let written = mdiew(&["--command", "tangle-curve", "--out", path.to_str().unwrap()]);
    assert!(written.status.success() && written.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}
