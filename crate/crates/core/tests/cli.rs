use std::fs;
use std::path::Path;
use std::process::Command;

use decide_qsl::cli::{
    parse_config, parse_summary, parse_table, read_series, read_summary, run, write_run, Method, ModelKind,
    SweepAxis, SUMMARY_FILE, TIMING_FILE,
};
use decide_qsl::qsl::qsl_report;
use decide_qsl::Error;

const SMALL_SBM: &str = r#"
model = "sbm"
method = "decide"

[sbm]
xi = 0.5
n_osc = 20

[grid]
dt = 0.01
tau = 0.5

[ensemble]
n_traj = 24
master_seed = 3
"#;

#[test]
fn minimal_config_takes_defaults() {
    let c = parse_config("model = \"sbm\"").unwrap();
    assert_eq!(c.method, Method::Decide);
    let p = c.sbm();
    assert_eq!((p.delta, p.xi, p.omega_c, p.n_osc, p.temperature), (0.2, 0.1, 1.0, 200, 1.0));
    assert_eq!(p.omega_max, Some(5.0));
    assert_eq!((c.dt(), c.tau()), (0.005, 1.0));
    assert_eq!(c.ensemble.n_traj, 10_000);

    let f = parse_config("model = \"fmo\"").unwrap();
    assert_eq!(f.model, ModelKind::Fmo);
    let p = f.fmo();
    assert_eq!((p.lambda_cm, p.tau_c_fs, p.modes_per_site, p.initial_site), (35.0, 50.0, 40, 1));
    assert_eq!(p.omega_max_fs, Some(0.2));
    assert_eq!((f.dt(), f.tau()), (1.0, 1000.0));
}

#[test]
fn invalid_configs_are_rejected() {
    let e = parse_config("model = \"fmo\"\nmethod = \"nm_bre\"").unwrap_err();
    assert!(matches!(e, Error::Validation(_)), "{e}");
    assert!(e.is_config_error());

    let e = parse_config("model = \"sbm\"\n[sbm]\nxi = -1.0").unwrap_err();
    assert!(matches!(e, Error::Validation(_)), "{e}");

    let e = parse_config("model = \"sbm\"\ncolour = 3").unwrap_err();
    assert!(matches!(e, Error::Parse { .. }), "{e}");

    let e = parse_config("model = \"sbm\"\n\n[grid\n").unwrap_err();
    match e {
        Error::Parse { line, .. } => assert_eq!(line, Some(3)),
        other => panic!("{other}"),
    }
}

#[test]
fn config_round_trips() {
    let text = format!("{SMALL_SBM}\n[sweep]\naxis = \"coupling\"\nvalues = [0.25, 1.0]\n");
    let c = parse_config(&text).unwrap();
    assert_eq!(c.sweep.as_ref().unwrap().axis, SweepAxis::Coupling);
    assert_eq!(parse_config(&c.to_toml()).unwrap(), c);
    let f = parse_config("model = \"fmo\"\n[fmo]\ntemperature_k = 77.0").unwrap();
    assert_eq!(parse_config(&f.to_toml()).unwrap(), f);
}

#[test]
fn built_in_table_entries() {
    let t = decide_qsl::cli::fmo_table(None).unwrap();
    assert_eq!(t.len(), 7);
    assert_eq!(t[2][2], 12210.0);
    assert_eq!(t[3][6], -63.3);
    assert_eq!(t[6][3], -63.3);
    for i in 0..7 {
        for j in 0..7 {
            assert_eq!(t[i][j], t[j][i]);
        }
    }
}

#[test]
fn table_override_shape_is_checked() {
    let row = "1 2 3 4 5 6 7\n";
    assert_eq!(parse_table(&row.repeat(7)).unwrap().len(), 7);
    let e = parse_table(&row.repeat(6)).unwrap_err();
    assert!(matches!(e, Error::OverrideShapeMismatch { rows: 6, cols: 7 }), "{e}");
    assert!(e.is_config_error());
    let e = parse_table(&format!("{}1 2 3\n", row.repeat(6))).unwrap_err();
    assert!(matches!(e, Error::OverrideShapeMismatch { .. }), "{e}");
}

fn run_into(dir: &Path, text: &str) {
    let mut c = parse_config(text).unwrap();
    c.output.emit_series = true;
    let out = run(&c).unwrap();
    write_run(dir, &c, &out).unwrap();
}

#[test]
fn deterministic_outputs_are_byte_identical() {
    let text = format!("{SMALL_SBM}\n[sweep]\naxis = \"coupling\"\nvalues = [1.0, 0.25]\n");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_into(a.path(), &text);
    let with_workers = text.replace("master_seed = 3", "master_seed = 3\nworkers = 2");
    run_into(b.path(), &with_workers);
    for name in [SUMMARY_FILE, "series_000.tsv", "series_001.tsv"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        if name == SUMMARY_FILE {
            // the embedded configuration differs only in the worker count
            let strip = |v: &[u8]| -> String {
                String::from_utf8_lossy(v).lines().filter(|l| !l.starts_with('#')).collect()
            };
            assert_eq!(strip(&x), strip(&y));
        } else {
            assert_eq!(x, y, "{name}");
        }
    }
    assert!(a.path().join(TIMING_FILE).exists());
}

#[test]
fn summary_agrees_with_written_series() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{SMALL_SBM}\n[sweep]\naxis = \"tau\"\nvalues = [0.2, 0.5, 0.3]\n");
    run_into(dir.path(), &text);
    let rows = read_summary(&dir.path().join(SUMMARY_FILE)).unwrap();
    assert_eq!(rows.iter().map(|r| r.tau).collect::<Vec<_>>(), vec![0.2, 0.3, 0.5]);
    for r in &rows {
        let series = read_series(&dir.path().join(r.series.as_ref().unwrap())).unwrap();
        assert_eq!(series.n_traj, 24);
        let q = qsl_report(&series, r.tau).unwrap();
        assert_eq!(q.tau2(), r.tau2);
        assert_eq!(q.tau1(), r.tau1);
        assert_eq!(q.tau_inf(), r.tau_inf);
        assert_eq!(q.fidelity, r.fidelity);
        assert!(r.tau1 <= r.tau2 && r.tau2 <= r.tau_inf);
        assert!(r.tau_iso.is_some());
    }
}

#[test]
fn summary_parser_rejects_bad_header() {
    assert!(parse_summary("point\tcoordinate\n1\t2\n").is_err());
    assert!(parse_summary("").unwrap().is_empty());
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_decide-qsl")).args(args).output().unwrap()
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    };

    let iso = write(
        "iso.toml",
        "model = \"sbm\"\nmethod = \"isolated\"\n[sbm]\ndelta = 0.2\n[grid]\ndt = 0.005\ntau = 1.0\n",
    );
    let out_dir = dir.path().join("out");
    let o = binary(&["simulate", "--config", &iso, "--out", out_dir.to_str().unwrap(), "--emit-series"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_summary(&out_dir.join(SUMMARY_FILE)).unwrap();
    assert!((rows[0].tau2 - 0.1395458).abs() < 1e-6);
    assert!(out_dir.join("series_000.tsv").exists());

    let bad = write("bad.toml", "model = \"fmo\"\nmethod = \"m_bre\"\n");
    assert_eq!(binary(&["simulate", "--config", &bad]).status.code(), Some(2));
    let broken = write("broken.toml", "model = [\n");
    assert_eq!(binary(&["simulate", "--config", &broken]).status.code(), Some(2));
    let missing = dir.path().join("nope.toml");
    assert_eq!(binary(&["simulate", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
    let table = write("six.txt", &"1 2 3 4 5 6 7\n".repeat(6));
    assert_eq!(binary(&["table", "--file", &table]).status.code(), Some(2));

    let o = binary(&["table"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.contains("12210"));
}

#[test]
fn binary_reports_numerical_failure_coordinate() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("blowup.toml");
    fs::write(
        &p,
        "model = \"sbm\"\n[sbm]\nxi = 1e6\nn_osc = 20\n[grid]\ndt = 0.5\ntau = 50.0\n[ensemble]\nn_traj = 8\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let o = binary(&[
        "sweep",
        "--config",
        p.to_str().unwrap(),
        "--axis",
        "temperature",
        "--values",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(3), "{stderr}");
    assert!(stderr.contains("temperature=2"), "{stderr}");
}
