use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_fracalign");
const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");

fn fracalign(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scenario(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const STEADY: &str = "[model]\nkind = \"special\"\nalpha = 0.5\n[grid]\nn = 64\n\
                      [initial]\nrho = \"constant(1.5)\"\nu_mean = 0.2\n[stepper]\nt_end = 1.0\n";

#[test]
fn minimal_config_is_accepted() {
    let dir = TempDir::new().unwrap();
    let o = fracalign(dir.path(), &["check", &format!("{GOLDEN}/minimal.toml")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn golden_round_trip() {
    let dir = TempDir::new().unwrap();
    let o = fracalign(dir.path(), &["check", &format!("{GOLDEN}/minimal.toml")]);
    let expected = fs::read_to_string(format!("{GOLDEN}/minimal.normalized.toml")).unwrap();
    let emitted = String::from_utf8(o.stdout).unwrap();
    assert_eq!(emitted, expected);
    let again = fracalign(
        dir.path(),
        &["check", &format!("{GOLDEN}/minimal.normalized.toml")],
    );
    assert_eq!(String::from_utf8(again.stdout).unwrap(), expected);
}

#[test]
fn alignment_alpha_outside_unit_interval_is_rejected() {
    let dir = TempDir::new().unwrap();
    let p = scenario(
        &dir,
        "a.toml",
        "[model]\nkind = \"primitive\"\nalpha = 1.5\n[grid]\nn = 64\n",
    );
    let o = fracalign(dir.path(), &["run", &p]);
    assert_eq!(code(&o), 64);
    assert!(stderr(&o).contains("(0, 1)"), "{}", stderr(&o));
    assert!(!dir.path().join("output").exists());
}

#[test]
fn unknown_key_is_rejected_with_line_number() {
    let dir = TempDir::new().unwrap();
    let p = scenario(
        &dir,
        "a.toml",
        "[model]\nkind = \"special\"\nalpha = 0.5\n[grid]\nn = 64\nwidth = 3\n",
    );
    let o = fracalign(dir.path(), &["check", &p]);
    assert_eq!(code(&o), 64);
    let err = stderr(&o);
    assert!(err.contains("line 6") && err.contains("width"), "{err}");
}

#[test]
fn usage_errors_and_help() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&fracalign(dir.path(), &["run"])), 64);
    assert_eq!(code(&fracalign(dir.path(), &["frobnicate"])), 64);
    assert_eq!(code(&fracalign(dir.path(), &["--help"])), 0);
    assert_eq!(code(&fracalign(dir.path(), &["run", "missing.toml"])), 5);
}

#[test]
fn steady_state_exits_zero_with_exact_timeseries_header() {
    let dir = TempDir::new().unwrap();
    let p = scenario(&dir, "s.toml", STEADY);
    let o = fracalign(dir.path(), &["run", &p, "--output-dir", "out", "--quiet"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let ts = fs::read_to_string(dir.path().join("out/timeseries.csv")).unwrap();
    assert_eq!(
        ts.lines().next().unwrap(),
        "time,mass,momentum,rho_min,rho_max,F_min,F_max,max_dx_F,flock_amp,bkm,u_l2"
    );
    assert!(ts.lines().skip(1).all(|l| l.split(',').count() == 11));
    let report = fs::read_to_string(dir.path().join("out/report.txt")).unwrap();
    assert!(report.starts_with("schema = \"fracalign-report/1\""));
    assert!(report.contains("termination = \"reached_t_end\""));
    assert!(!dir.path().join("out/snapshots.csv").exists());
}

#[test]
fn record_every_thins_the_timeseries() {
    let dir = TempDir::new().unwrap();
    let p = scenario(&dir, "s.toml", STEADY);
    fracalign(dir.path(), &["run", &p, "--output-dir", "all", "--quiet"]);
    fracalign(
        dir.path(),
        &[
            "run",
            &p,
            "--output-dir",
            "thin",
            "--record-every",
            "5",
            "--quiet",
        ],
    );
    let rows = |d: &str| {
        fs::read_to_string(dir.path().join(d).join("timeseries.csv"))
            .unwrap()
            .lines()
            .count()
    };
    assert!(rows("thin") < rows("all"));
    assert!(rows("thin") >= 2);
}

#[test]
fn snapshots_have_one_row_per_node() {
    let dir = TempDir::new().unwrap();
    let text = format!("{STEADY}snapshot_times = [0.0, 0.5]\n");
    let p = scenario(&dir, "s.toml", &text);
    assert_eq!(code(&fracalign(dir.path(), &["run", &p, "--quiet"])), 0);
    let snap = fs::read_to_string(dir.path().join("output/snapshots.csv")).unwrap();
    let mut lines = snap.lines();
    assert_eq!(lines.next().unwrap(), "t,x,rho,u,G,F");
    assert_eq!(lines.count(), 2 * 64);
}

#[test]
fn inviscid_burgers_blowup() {
    let dir = TempDir::new().unwrap();
    let base = "[model]\nkind = \"burgers\"\nalpha = 1.0\nepsilon = 0.0\n[grid]\nn = 512\n[stepper]\nt_end = 2.0\n";
    let expected = scenario(&dir, "e.toml", &format!("{base}expect_blowup = true\n"));
    let o = fracalign(dir.path(), &["run", &expected, "--quiet"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = fs::read_to_string(dir.path().join("output/report.txt")).unwrap();
    assert!(report.contains("termination = \"blowup_detected\""));
    let unexpected = scenario(&dir, "u.toml", base);
    assert_eq!(
        code(&fracalign(dir.path(), &["run", &unexpected, "--quiet"])),
        2
    );
    // dissipative Burgers stays smooth, so an expected blow-up is a failure
    let smooth = "[model]\nkind = \"burgers\"\nalpha = 1.0\nepsilon = 1.0\n[grid]\nn = 64\n\
                  [stepper]\nt_end = 0.5\nexpect_blowup = true\n";
    let smooth = scenario(&dir, "s.toml", smooth);
    assert_eq!(
        code(&fracalign(dir.path(), &["run", &smooth, "--quiet"])),
        3
    );
}

#[test]
fn step_limit_is_a_run_failure() {
    let dir = TempDir::new().unwrap();
    let p = scenario(&dir, "s.toml", &format!("{STEADY}max_steps = 3\n"));
    let o = fracalign(dir.path(), &["run", &p, "--quiet"]);
    assert_eq!(code(&o), 4);
    let report = fs::read_to_string(dir.path().join("output/report.txt")).unwrap();
    assert!(report.contains("termination = \"step_limit\""));
}

#[test]
fn sweep_of_six_rows_reaches_t_end() {
    let dir = TempDir::new().unwrap();
    let base =
        "[model]\nkind = \"reformulated\"\nalpha = 0.5\n[grid]\nn = 64\n[stepper]\nt_end = 0.5\n\
                [output]\ndir = \"sweep\"\n";
    let p = scenario(&dir, "base.toml", base);
    let o = fracalign(
        dir.path(),
        &[
            "sweep",
            &p,
            "--grid",
            "model.alpha=0.3,0.5,0.7;grid.n=64,128",
            "--quiet",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = fs::read_to_string(dir.path().join("sweep/summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert!(lines[0].starts_with("row,model.alpha,grid.n,termination,exit_code"));
    assert_eq!(lines.len(), 7);
    let expected = [
        ("0.3", "64"),
        ("0.3", "128"),
        ("0.5", "64"),
        ("0.5", "128"),
        ("0.7", "64"),
        ("0.7", "128"),
    ];
    for (i, (line, (a, n))) in lines[1..].iter().zip(expected).enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!((f[0], f[1], f[2]), (i.to_string().as_str(), a, n));
        assert_eq!(f[3], "reached_t_end", "{line}");
        assert!(dir
            .path()
            .join(format!("sweep/row_{i:03}/timeseries.csv"))
            .exists());
    }
}

#[test]
fn sweep_rows_with_invalid_overrides_are_reported() {
    let dir = TempDir::new().unwrap();
    let base = "[model]\nkind = \"special\"\nalpha = 0.5\n[grid]\nn = 64\n[stepper]\nt_end = 0.2\n";
    let p = scenario(&dir, "base.toml", base);
    let o = fracalign(
        dir.path(),
        &["sweep", &p, "--grid", "model.alpha=0.5,1.5", "--quiet"],
    );
    assert_eq!(code(&o), 0);
    let summary = fs::read_to_string(dir.path().join("output/summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().skip(1).collect();
    assert!(rows[0].contains("reached_t_end"));
    assert!(rows[1].contains("config_error"));
    let o = fracalign(
        dir.path(),
        &["sweep", &p, "--grid", "model.alpha=1.5,2.5", "--quiet"],
    );
    assert_eq!(code(&o), 3);
    let o = fracalign(dir.path(), &["sweep", &p, "--grid", "alpha=0.5"]);
    assert_eq!(code(&o), 64);
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((
                    p.strip_prefix(dir).unwrap().to_string_lossy().into_owned(),
                    fs::read(&p).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn repeated_runs_are_byte_identical() {
    let text = "[model]\nkind = \"primitive\"\nalpha = 0.4\n[grid]\nn = 64\n\
                [initial]\nrho = \"constant(1.0) + random_modes(0.2, 4)\"\nu = \"random_modes(0.3, 3)\"\nseed = 7\n\
                [stepper]\nt_end = 0.5\nsnapshot_times = [0.25]\n";
    let outputs: Vec<_> = (0..2)
        .map(|_| {
            let dir = TempDir::new().unwrap();
            let p = scenario(&dir, "r.toml", text);
            fracalign(dir.path(), &["run", &p, "--output-dir", "run", "--quiet"]);
            let grid = "model.alpha=0.3,0.6;initial.seed=1,2";
            fracalign(
                dir.path(),
                &[
                    "sweep",
                    &p,
                    "--output-dir",
                    "sweep",
                    "--grid",
                    grid,
                    "--quiet",
                ],
            );
            (
                tree(&dir.path().join("run")),
                tree(&dir.path().join("sweep")),
            )
        })
        .collect();
    assert_eq!(outputs[0].0.len(), 4);
    assert_eq!(outputs[0].1.len(), 1 + 4 * 4);
    assert!(
        outputs[0] == outputs[1],
        "outputs differ between identical runs"
    );
}

#[test]
fn verify_moc_on_special_data() {
    let dir = TempDir::new().unwrap();
    let text = "[model]\nkind = \"special\"\nalpha = 0.5\n[grid]\nn = 64\n\
                [initial]\nrho = \"constant(1.0) + single_mode(0.02, 1, cos)\"\n[stepper]\nt_end = 2.0\n\
                [moc]\nchecks = 4\n";
    let p = scenario(&dir, "m.toml", text);
    let o = fracalign(dir.path(), &["verify-moc", &p]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("[moc]"));
    assert!(stdout.contains("obeys = true"));
    assert!(stdout.contains("times_checked = 5"));
    // a larger bump obeys no scaled modulus with lambda = 1/k, k <= 64
    let steep = text.replace("single_mode(0.02, 1, cos)", "single_mode(0.1, 1, cos)");
    let p = scenario(&dir, "steep.toml", &steep);
    let o = fracalign(dir.path(), &["verify-moc", &p, "--quiet"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn selftest_passes() {
    let dir = TempDir::new().unwrap();
    let o = fracalign(dir.path(), &["selftest"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(
        String::from_utf8(o.stdout)
            .unwrap()
            .lines()
            .filter(|l| l.starts_with("PASS"))
            .count(),
        5
    );
}

#[test]
fn one_point_sweep_matches_a_plain_run() {
    let dir = TempDir::new().unwrap();
    let p = scenario(&dir, "s.toml", STEADY);
    fracalign(dir.path(), &["run", &p, "--output-dir", "run", "--quiet"]);
    let o = fracalign(dir.path(), &["sweep", &p, "--output-dir", "sweep", "--grid", "model.alpha=0.5", "--quiet"]);
    assert_eq!(code(&o), 0);
    for f in ["timeseries.csv", "report.txt"] {
        let a = fs::read(dir.path().join("run").join(f)).unwrap();
        let b = fs::read(dir.path().join("sweep/row_000").join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn feasibility_sweep_emits_the_feasible_region() {
    let dir = TempDir::new().unwrap();
    let base = "[model]\nkind = \"special\"\nalpha = 0.5\n[grid]\nn = 32\n\
                [initial]\nrho = \"constant(1.0) + single_mode(0.02, 1, cos)\"\n[stepper]\nt_end = 0.1\n\
                [moc]\nmode = \"manual\"\ndelta = 0.1\ngamma = 0.0001\nchecks = 1\n";
    let p = scenario(&dir, "f.toml", base);
    let grid = "moc.delta=0.4,0.01;moc.gamma=1e-4,1e-2";
    let o = fracalign(dir.path(), &["sweep", &p, "--grid", grid, "--quiet"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = fs::read_to_string(dir.path().join("output/summary.csv")).unwrap();
    let mut lines = summary.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 4);
    // admissible pairs carry a sampled functional maximum, inadmissible ones an error
    for (row, admissible) in rows.iter().zip([true, false, true, false]) {
        if admissible {
            let f: f64 = row[col("moc_functional_max")].parse().unwrap();
            assert!(f.is_finite());
            assert_eq!(row[col("moc_feasible")], (f < 0.0).to_string());
        } else {
            assert_eq!(row[col("termination")], "config_error");
        }
    }
}

#[test]
fn scenario_suite_exits_zero() {
    let suite = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios");
    let mut files: Vec<_> = fs::read_dir(suite)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    files.sort();
    assert!(files.len() >= 5);
    let dir = TempDir::new().unwrap();
    for f in files {
        let o = fracalign(dir.path(), &["run", f.to_str().unwrap(), "--quiet"]);
        assert_eq!(code(&o), 0, "{}: {}", f.display(), stderr(&o));
    }
}
