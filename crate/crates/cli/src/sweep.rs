//! Parameter sweeps: a base configuration and a grid of key-path overrides
//! such as `model.alpha=0.3,0.5,0.7;grid.n=128,256`.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::config::{parse_raw, validate, RawConfig, ScenarioConfig};
use crate::error::{CliError, CliResult};
use crate::exit;
use crate::output::{num, write_outputs};
use crate::scenario::{run_scenario, Outcome};

pub const SUMMARY_FILE: &str = "summary.csv";

/// One swept key and its values.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub table: String,
    pub key: String,
    pub values: Vec<toml::Value>,
    /// Values as written, for the summary.
    pub labels: Vec<String>,
}

impl Axis {
    pub fn path(&self) -> String {
        format!("{}.{}", self.table, self.key)
    }
}

/// Splits on `sep` outside parentheses and quotes.
fn split_outside(text: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut quoted, mut start) = (0i32, false, 0);
    for (i, c) in text.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '(' | '[' if !quoted => depth += 1,
            ')' | ']' if !quoted => depth -= 1,
            c if c == sep && depth == 0 && !quoted => {
                parts.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

/// A TOML literal if the text is one, otherwise a string.
fn parse_value(text: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {text}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(text.trim_matches('"').to_string()))
}

pub fn parse_grid(spec: &str) -> CliResult<Vec<Axis>> {
    let mut axes: Vec<Axis> = Vec::new();
    for part in split_outside(spec, ';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (path, values) = part.split_once('=').ok_or_else(|| {
            CliError::Grid(format!("'{part}' is not of the form table.key=v1,v2"))
        })?;
        let (table, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| CliError::Grid(format!("'{}' is not a table.key path", path.trim())))?;
        if axes.iter().any(|a| a.table == table && a.key == key) {
            return Err(CliError::Grid(format!("{table}.{key} is swept twice")));
        }
        let labels: Vec<String> = split_outside(values, ',')
            .into_iter()
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        if labels.is_empty() {
            return Err(CliError::Grid(format!("{table}.{key} has no values")));
        }
        axes.push(Axis {
            table: table.trim().to_string(),
            key: key.trim().to_string(),
            values: labels.iter().map(|l| parse_value(l)).collect(),
            labels,
        });
    }
    if axes.is_empty() {
        return Err(CliError::Grid("no axes given".into()));
    }
    Ok(axes)
}

/// Cartesian product of the axis indices; the last axis varies fastest.
pub fn rows(axes: &[Axis]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..axis.values.len()).map(move |i| {
                    let mut r = prefix.clone();
                    r.push(i);
                    r
                })
            })
            .collect();
    }
    out
}

/// Applies one row of overrides to the base text and validates the result.
pub fn apply(base: &str, axes: &[Axis], row: &[usize]) -> CliResult<ScenarioConfig> {
    parse_raw(base)?;
    let mut doc: toml::Table = toml::from_str(base).map_err(|e| CliError::config(e.to_string()))?;
    for (axis, &i) in axes.iter().zip(row) {
        let table = doc
            .entry(axis.table.clone())
            .or_insert_with(|| toml::Value::Table(Default::default()));
        let toml::Value::Table(t) = table else {
            return Err(CliError::config(format!("{} is not a table", axis.table)));
        };
        t.insert(axis.key.clone(), axis.values[i].clone());
    }
    let raw: RawConfig = toml::Value::Table(doc)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::config(e.to_string().trim_end().to_string()))?;
    validate(&raw)
}

#[derive(Debug)]
pub struct SweepRow {
    pub index: usize,
    pub labels: Vec<String>,
    pub outcome: CliResult<Outcome>,
}

impl SweepRow {
    pub fn exit_code(&self) -> i32 {
        match &self.outcome {
            Ok(o) => o.exit_code,
            Err(e) => exit::for_error(e),
        }
    }
}

/// Runs all rows in parallel; results come back in row order.
pub fn run_sweep(base: &str, axes: &[Axis], record_every: Option<usize>) -> Vec<SweepRow> {
    rows(axes)
        .into_par_iter()
        .enumerate()
        .map(|(index, row)| {
            let labels = axes
                .iter()
                .zip(&row)
                .map(|(a, &i)| a.labels[i].clone())
                .collect();
            let outcome = apply(base, axes, &row).and_then(|mut c| {
                if let Some(k) = record_every {
                    c.stepper.record_every = k;
                }
                run_scenario(&c)
            });
            SweepRow {
                index,
                labels,
                outcome,
            }
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Writes each row into `dir/row_NNN` and the overview into `dir/summary.csv`.
pub fn write_sweep(dir: &Path, axes: &[Axis], rows: &[SweepRow]) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(SUMMARY_FILE);
    let csv_err = |source| CliError::Csv {
        path: path.clone(),
        source,
    };
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    let mut header = vec!["row".to_string()];
    header.extend(axes.iter().map(Axis::path));
    header.extend(
        [
            "termination",
            "exit_code",
            "steps",
            "final_time",
            "blowup_time",
            "bkm_integral",
            "checks_ok",
            "moc_feasible",
            "moc_functional_max",
            "moc_worst_margin",
            "error",
        ]
        .map(String::from),
    );
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        let mut rec = vec![row.index.to_string()];
        rec.extend(row.labels.iter().cloned());
        match &row.outcome {
            Ok(o) => {
                write_outputs(&dir.join(format!("row_{:03}", row.index)), o)?;
                let r = &o.result;
                rec.extend([
                    r.termination.name().to_string(),
                    o.exit_code.to_string(),
                    r.steps.to_string(),
                    num(r.final_state.time()),
                    opt(r.blowup_time),
                    num(r.bkm_integral),
                    o.checks_ok().to_string(),
                    o.moc
                        .as_ref()
                        .map(|m| m.feasible.to_string())
                        .unwrap_or_default(),
                    o.moc
                        .as_ref()
                        .map(|m| num(m.functional_max))
                        .unwrap_or_default(),
                    opt(o.moc.as_ref().and_then(|m| m.worst_margin)),
                    String::new(),
                ]);
            }
            Err(e) => {
                let kind = if matches!(e, CliError::Config(_)) {
                    "config_error"
                } else {
                    "error"
                };
                rec.extend([
                    kind.to_string(),
                    row.exit_code().to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    e.to_string().replace('\n', " "),
                ]);
            }
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))
}
