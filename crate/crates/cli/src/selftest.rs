//! Quick installation checks, each a few seconds at most.

use std::time::Instant;

use fracalign::diagnostics::FeasibilitySearch;
use fracalign::integrator::Termination;
use fracalign::{Field, Grid};

use crate::config::{emit_config, parse_config};
use crate::scenario::run_scenario;

#[derive(Debug, Clone)]
pub struct SelfCheck {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
    pub seconds: f64,
}

fn timed(name: &'static str, f: impl FnOnce() -> Result<(bool, String), String>) -> SelfCheck {
    let start = Instant::now();
    let (ok, detail) = f().unwrap_or_else(|e| (false, e));
    SelfCheck {
        name,
        ok,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn fractional_symbol() -> Result<(bool, String), String> {
    let g = Grid::periodic(64).map_err(|e| e.to_string())?;
    let alpha = 0.6;
    let f = Field::from_fn(g, |x| (3.0 * x).cos()).map_err(|e| e.to_string())?;
    let lf = f.fractional_laplacian(alpha).map_err(|e| e.to_string())?;
    let scale = 3f64.powf(alpha);
    let err = lf
        .values()
        .iter()
        .zip(f.values())
        .map(|(a, b)| (a - scale * b).abs())
        .fold(0.0, f64::max);
    Ok((
        err < 1e-12,
        format!("|Lambda^a cos 3x - 3^a cos 3x| = {err:.1e}"),
    ))
}

fn scenario(text: &str) -> Result<crate::scenario::Outcome, String> {
    let c = parse_config(text).map_err(|e| e.to_string())?;
    run_scenario(&c).map_err(|e| e.to_string())
}

fn special_run() -> Result<(bool, String), String> {
    let o = scenario(
        "[model]\nkind = \"special\"\nalpha = 0.5\n[grid]\nn = 128\n[initial]\nu_mean = 0.3\n[stepper]\nt_end = 2.0\n",
    )?;
    let failed: Vec<_> = o.checks.iter().filter(|c| !c.ok).map(|c| c.name).collect();
    Ok((
        o.termination() == Termination::ReachedTEnd && failed.is_empty(),
        format!(
            "{} after {} steps, failed checks {:?}",
            o.termination().name(),
            o.result.steps,
            failed
        ),
    ))
}

fn burgers_blowup() -> Result<(bool, String), String> {
    let o = scenario(
        "[model]\nkind = \"burgers\"\nalpha = 1.0\nepsilon = 0.0\n[grid]\nn = 512\n[stepper]\nt_end = 2.0\n",
    )?;
    let t = o.result.blowup_time;
    let ok = matches!(t, Some(t) if (0.8..1.2).contains(&t));
    Ok((
        ok,
        format!("inviscid shock detected at t = {t:?}, expected near 1"),
    ))
}

fn config_round_trip() -> Result<(bool, String), String> {
    let c = parse_config("[model]\nkind = \"primitive\"\nalpha = 0.4\n[grid]\nn = 64\n")
        .map_err(|e| e.to_string())?;
    let text = emit_config(&c);
    let again = parse_config(&text).map_err(|e| e.to_string())?;
    Ok((
        again == c && emit_config(&again) == text,
        "emit then parse is the identity".into(),
    ))
}

fn feasibility() -> Result<(bool, String), String> {
    let fp = FeasibilitySearch::new(0.5, 1.0)
        .search()
        .map_err(|e| e.to_string())?;
    Ok(match fp {
        Some(p) => (
            p.worst < 0.0,
            format!(
                "delta {:.3e}, gamma {:.3e}, max functional {:.2e}",
                p.delta, p.gamma, p.worst
            ),
        ),
        None => (false, "no feasible modulus for alpha = 0.5, m = 1".into()),
    })
}

pub fn run_selftest() -> Vec<SelfCheck> {
    vec![
        timed("fractional_symbol", fractional_symbol),
        timed("config_round_trip", config_round_trip),
        timed("special_model_run", special_run),
        timed("burgers_blowup", burgers_blowup),
        timed("feasibility_search", feasibility),
    ]
}
