//! Files written for a run: `timeseries.csv`, `snapshots.csv` and
//! `report.txt`.

use std::fs;
use std::path::Path;

use serde::Serialize;

use fracalign::model::compute_f;
use fracalign::{Params, Record, State};

use crate::config::emit_config;
use crate::error::{CliError, CliResult};
use crate::scenario::{CheckResult, MocReport, Outcome};

pub const TIMESERIES_HEADER: [&str; 11] = [
    "time",
    "mass",
    "momentum",
    "rho_min",
    "rho_max",
    "F_min",
    "F_max",
    "max_dx_F",
    "flock_amp",
    "bkm",
    "u_l2",
];
pub const SNAPSHOT_HEADER: [&str; 6] = ["t", "x", "rho", "u", "G", "F"];
pub const REPORT_SCHEMA: &str = "fracalign-report/1";
pub const TIMESERIES_SCHEMA: &str = "fracalign-timeseries/1";
pub const SNAPSHOT_SCHEMA: &str = "fracalign-snapshots/1";

/// Shortest round-trip form; exponent notation outside `[1e-4, 1e15)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn writer(path: &Path) -> CliResult<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_timeseries(path: &Path, records: &[Record]) -> CliResult<()> {
    let mut w = writer(path)?;
    let err = csv_err(path);
    w.write_record(TIMESERIES_HEADER).map_err(&err)?;
    for r in records {
        let row = [
            r.time,
            r.mass,
            r.momentum,
            r.rho_min,
            r.rho_max,
            r.f_min,
            r.f_max,
            r.max_dx_f,
            r.flocking_amplitude,
            r.bkm_partial,
            r.u_l2_norm,
        ];
        w.write_record(row.map(num)).map_err(&err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// One row per grid point and snapshot. The Burgers model has `rho = 1`
/// and no `G` or `F`; those columns are left empty.
pub fn write_snapshots(path: &Path, snapshots: &[State], params: &Params) -> CliResult<()> {
    let mut w = writer(path)?;
    let err = csv_err(path);
    w.write_record(SNAPSHOT_HEADER).map_err(&err)?;
    for s in snapshots {
        let u = s.velocity(params)?;
        let nodes = u.grid().nodes();
        let t = num(s.time());
        match s.rho() {
            Some(rho) => {
                let g = s.g_field(params)?;
                let f = compute_f(rho, &g)?;
                for (j, x) in nodes.iter().enumerate() {
                    let row = [
                        t.clone(),
                        num(*x),
                        num(rho.values()[j]),
                        num(u.values()[j]),
                        num(g.values()[j]),
                        num(f.values()[j]),
                    ];
                    w.write_record(&row).map_err(&err)?;
                }
            }
            None => {
                for (j, x) in nodes.iter().enumerate() {
                    let row = [
                        t.clone(),
                        num(*x),
                        num(1.0),
                        num(u.values()[j]),
                        String::new(),
                        String::new(),
                    ];
                    w.write_record(&row).map_err(&err)?;
                }
            }
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct Report<'a> {
    schema: &'static str,
    timeseries_schema: &'static str,
    snapshot_schema: &'static str,
    run: RunSection,
    checks: Vec<&'a CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    moc: Option<&'a MocReport>,
}

#[derive(Serialize)]
struct RunSection {
    model: &'static str,
    termination: &'static str,
    exit_code: i32,
    steps: usize,
    final_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    blowup_time: Option<f64>,
    bkm_integral: f64,
    records: usize,
    snapshots: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

/// The report is TOML: the run summary, one `[[checks]]` entry per check
/// and the modulus section. It contains no timings, so identical runs
/// produce identical reports.
pub fn render_report(o: &Outcome) -> String {
    let r = &o.result;
    let report = Report {
        schema: REPORT_SCHEMA,
        timeseries_schema: TIMESERIES_SCHEMA,
        snapshot_schema: SNAPSHOT_SCHEMA,
        run: RunSection {
            model: o.config.model.name(),
            termination: r.termination.name(),
            exit_code: o.exit_code,
            steps: r.steps,
            final_time: r.final_state.time(),
            blowup_time: r.blowup_time,
            bkm_integral: r.bkm_integral,
            records: r.records.len(),
            snapshots: o.snapshots.len(),
            failure: r.failure.as_ref().map(|e| e.to_string()),
        },
        checks: o.checks.iter().collect(),
        moc: o.moc.as_ref(),
    };
    toml::to_string(&report).expect("report serializes")
}

/// Writes every enabled output of `o` into `dir`, together with the
/// normalized configuration that produced it.
pub fn write_outputs(dir: &Path, o: &Outcome) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let write = |name: &str, text: String| {
        let p = dir.join(name);
        fs::write(&p, text).map_err(|e| CliError::io(p, e))
    };
    write("config.toml", emit_config(&o.config))?;
    if o.config.output.timeseries {
        write_timeseries(&dir.join("timeseries.csv"), &o.result.records)?;
    }
    if o.config.output.snapshots && !o.snapshots.is_empty() {
        write_snapshots(&dir.join("snapshots.csv"), &o.snapshots, &o.params)?;
    }
    write("report.txt", render_report(o))
}
