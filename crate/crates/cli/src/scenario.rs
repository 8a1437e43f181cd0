//! Running a validated scenario and judging the outcome.

use serde::Serialize;

use fracalign::diagnostics::{
    check_density_bounds, check_f_transport, lipschitz_scale, moc_check,
    nonlinear_max_principle_check, FeasibilitySearch, FunctionalQuadrature, ModulusOfContinuity,
};
use fracalign::integrator::{run, RunResult, Termination};
use fracalign::model::{special_velocity, Formulation};
use fracalign::{Grid, Params, Record, State};

use crate::config::{InitialSpec, MocMode, ScenarioConfig};
use crate::error::{CliError, CliResult};
use crate::exit;
use crate::profile::VelocitySpec;

/// Relative drift allowed in mass and momentum.
pub const CONSERVATION_TOL: f64 = 1e-8;
/// Largest `1/k` tried when the scaling parameter is chosen automatically.
pub const MAX_SCALING_K: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub ok: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MocReport {
    pub delta: f64,
    pub gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Largest sampled value of the breakthrough functional; negative means
    /// the pair `(δ, γ)` is feasible for the initial density minimum.
    pub functional_max: f64,
    pub feasible: bool,
    /// Smallest margin over the checked times, the initial time included.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_time: Option<f64>,
    pub times_checked: usize,
    pub obeys: bool,
    /// Only zero initial `G` is covered by the modulus argument; otherwise
    /// the check is reported but does not affect the exit status.
    pub gating: bool,
    pub note: String,
}

#[derive(Debug)]
pub struct Outcome {
    pub config: ScenarioConfig,
    pub params: Params,
    pub result: RunResult<f64>,
    /// Snapshots at the user-requested times.
    pub snapshots: Vec<State>,
    pub checks: Vec<CheckResult>,
    pub moc: Option<MocReport>,
    pub exit_code: i32,
}

impl Outcome {
    pub fn termination(&self) -> Termination {
        self.result.termination
    }

    pub fn checks_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok) && self.moc.as_ref().map_or(true, |m| m.obeys || !m.gating)
    }
}

pub fn params(config: &ScenarioConfig) -> CliResult<Params> {
    Ok(match config.model {
        Formulation::Burgers => Params::burgers(config.alpha, config.epsilon)?,
        _ => Params::alignment(config.alpha)?,
    })
}

fn initial_error(e: fracalign::Error) -> CliError {
    CliError::config(format!("initial data: {e}"))
}

/// Builds the initial state; problems with the data are configuration errors.
pub fn initial_state(config: &ScenarioConfig, params: &Params) -> CliResult<State> {
    let grid = Grid::new(config.n, config.length).map_err(initial_error)?;
    let seed = config.seed;
    let state = match &config.initial {
        InitialSpec::Burgers { u } => State::burgers(u.sample(&grid, seed).map_err(initial_error)?),
        InitialSpec::Special { rho, u_mean } => {
            State::special(rho.sample(&grid, seed).map_err(initial_error)?, *u_mean)
                .map_err(initial_error)?
        }
        InitialSpec::Alignment { rho, u } => {
            let rho = rho.sample(&grid, seed).map_err(initial_error)?;
            let u = match u {
                VelocitySpec::Profile(p) => p.sample(&grid, seed.wrapping_add(1)),
                VelocitySpec::GZero { mean } => special_velocity(&rho, config.alpha, *mean),
            }
            .map_err(initial_error)?;
            let s = State::primitive(rho, u).map_err(initial_error)?;
            if config.model == Formulation::Reformulated {
                s.to_reformulated(params).map_err(initial_error)?
            } else {
                s
            }
        }
    };
    Ok(state)
}

fn initial_g_is_zero(config: &ScenarioConfig) -> bool {
    matches!(
        config.initial,
        InitialSpec::Special { .. }
            | InitialSpec::Alignment {
                u: VelocitySpec::GZero { .. },
                ..
            }
    )
}

fn check_times(config: &ScenarioConfig) -> Vec<f64> {
    let t = config.stepper.t_end;
    let k = config.moc.checks;
    (1..=k).map(|i| t * i as f64 / k as f64).collect()
}

fn contains_time(times: &[f64], t: f64, t_end: f64) -> bool {
    let tol = 1e-12 * t_end.max(1.0);
    times.iter().any(|&s| (s - t).abs() <= tol)
}

/// Runs the scenario, the enabled checks and the modulus check.
pub fn run_scenario(config: &ScenarioConfig) -> CliResult<Outcome> {
    let params = params(config)?;
    let initial = initial_state(config, &params)?;

    let modulus = if config.moc.mode != MocMode::Off && config.model.is_alignment() {
        Some(choose_modulus(config, &initial)?)
    } else {
        None
    };

    let mut stepper = config.stepper.to_core();
    if modulus.is_some() {
        stepper.snapshot_times.extend(check_times(config));
    }
    let result = run(initial.clone(), &params, &stepper)?;

    let user_times = &config.stepper.snapshot_times;
    let t_end = config.stepper.t_end;
    let snapshots: Vec<State> = result
        .snapshots
        .iter()
        .filter(|s| contains_time(user_times, s.time(), t_end))
        .cloned()
        .collect();

    let checks = if result.termination == Termination::ReachedTEnd {
        run_checks(config, &params, &initial, &result)?
    } else {
        Vec::new()
    };

    let moc = match modulus {
        Some(chosen) => Some(finish_moc(config, &initial, &result, chosen)?),
        None => None,
    };

    let mut outcome = Outcome {
        config: config.clone(),
        params,
        result,
        snapshots,
        checks,
        moc,
        exit_code: exit::OK,
    };
    outcome.exit_code = exit_code(&outcome);
    Ok(outcome)
}

fn exit_code(o: &Outcome) -> i32 {
    let expect = o.config.stepper.expect_blowup;
    match o.termination() {
        Termination::BlowupDetected if expect => exit::OK,
        Termination::BlowupDetected => exit::BLOWUP,
        Termination::ReachedTEnd if expect => exit::CHECK_FAILED,
        Termination::ReachedTEnd if !o.checks_ok() => exit::CHECK_FAILED,
        Termination::ReachedTEnd => exit::OK,
        Termination::Vacuum | Termination::StepLimit | Termination::NumericalFailure => {
            exit::RUN_FAILED
        }
    }
}

fn relative_drift(records: &[Record], f: impl Fn(&Record) -> f64, scale: f64) -> f64 {
    let v0 = f(&records[0]);
    records
        .iter()
        .map(|r| (f(r) - v0).abs())
        .fold(0.0, f64::max)
        / scale
}

fn run_checks(
    config: &ScenarioConfig,
    params: &Params,
    initial: &State,
    result: &RunResult<f64>,
) -> CliResult<Vec<CheckResult>> {
    let records = &result.records;
    let first = &records[0];
    let mut out = Vec::new();
    if config.checks.conservation {
        let mass = relative_drift(records, |r| r.mass, first.mass.abs().max(f64::MIN_POSITIVE));
        let momentum = relative_drift(
            records,
            |r| r.momentum,
            first.momentum.abs().max(first.mass.abs()),
        );
        let worst = mass.max(momentum);
        out.push(CheckResult {
            name: "conservation",
            ok: worst <= CONSERVATION_TOL,
            value: worst,
            tolerance: CONSERVATION_TOL,
            detail: format!("relative mass drift {mass:e}, momentum drift {momentum:e}"),
        });
    }
    let Some(rho0) = initial.rho() else {
        return Ok(out);
    };
    if config.checks.density_bounds {
        let f0_sup = first.f_max.abs().max(first.f_min.abs());
        let d = check_density_bounds(records, f0_sup, first.rho_min)?;
        out.push(CheckResult {
            name: "density_bounds",
            ok: d.upper_bound_ok && d.lower_bound_ok,
            value: d.worst_lower_margin,
            tolerance: fracalign::diagnostics::BOUND_TOL,
            detail: format!(
                "lower bound margin {:e}, sup rho {} at t = {}, no late growth: {}",
                d.worst_lower_margin, d.sup_rho_max, d.sup_time, d.upper_bound_ok
            ),
        });
    }
    if config.checks.f_transport {
        let g0 = initial.g_field(params)?;
        let w0 = lipschitz_scale(rho0, &g0)?;
        let t = check_f_transport(records, w0)?;
        out.push(CheckResult {
            name: "f_transport",
            ok: t.f_transport_ok && t.f_lipschitz_ok,
            value: t.f_drift,
            tolerance: fracalign::diagnostics::TRANSPORT_TOL,
            detail: format!(
                "extrema drift {:e}, Lipschitz ratio {} (bound 1)",
                t.f_drift, t.f_lipschitz_ratio
            ),
        });
    }
    if config.checks.max_principle {
        let rho = result
            .final_state
            .rho()
            .expect("alignment state has a density");
        let r = nonlinear_max_principle_check(rho, config.alpha)?;
        out.push(CheckResult {
            name: "max_principle",
            ok: r.constant.is_finite() && r.constant >= 0.0,
            value: r.constant,
            tolerance: 0.0,
            detail: format!(
                "theta {:e} at x = {}, Lambda^a rho {:e}, sup|phi| {:e}",
                r.theta, r.x_bar, r.laplacian, r.phi_sup
            ),
        });
    }
    Ok(out)
}

struct ChosenModulus {
    modulus: Option<ModulusOfContinuity>,
    functional_max: f64,
    lambda: Option<f64>,
    note: String,
}

fn choose_modulus(config: &ScenarioConfig, initial: &State) -> CliResult<ChosenModulus> {
    let rho0 = initial.rho().expect("alignment state has a density");
    let search = FeasibilitySearch::new(config.alpha, rho0.min());
    let (modulus, functional_max, mut note) = match config.moc.mode {
        MocMode::Manual { delta, gamma } => {
            let m = ModulusOfContinuity::new(delta, gamma, config.alpha)?;
            let worst = search.worst_value(&m, &FunctionalQuadrature::default())?;
            (Some(m), worst, String::new())
        }
        _ => match search.search()? {
            Some(fp) => (
                Some(ModulusOfContinuity::new(fp.delta, fp.gamma, config.alpha)?),
                fp.worst,
                String::new(),
            ),
            None => (
                None,
                f64::NAN,
                "no feasible (delta, gamma) found".to_string(),
            ),
        },
    };
    let lambda = match (modulus, config.moc.lambda) {
        (None, _) => None,
        (Some(_), Some(l)) => Some(l),
        (Some(m), None) => {
            let mut found = None;
            for k in 1..=MAX_SCALING_K {
                let l = 1.0 / k as f64;
                if moc_check(rho0, &m, l)?.obeys {
                    found = Some(l);
                    break;
                }
            }
            if found.is_none() {
                note = format!("initial density obeys no omega(xi / lambda) with lambda = 1/k, k <= {MAX_SCALING_K}");
            }
            found
        }
    };
    Ok(ChosenModulus {
        modulus,
        functional_max,
        lambda,
        note,
    })
}

fn finish_moc(
    config: &ScenarioConfig,
    initial: &State,
    result: &RunResult<f64>,
    chosen: ChosenModulus,
) -> CliResult<MocReport> {
    let gating = initial_g_is_zero(config);
    let mut report = MocReport {
        delta: chosen.modulus.map_or(f64::NAN, |m| m.delta()),
        gamma: chosen.modulus.map_or(f64::NAN, |m| m.gamma()),
        lambda: chosen.lambda,
        functional_max: chosen.functional_max,
        feasible: chosen.functional_max < 0.0,
        worst_margin: None,
        worst_time: None,
        times_checked: 0,
        obeys: false,
        gating,
        note: chosen.note,
    };
    let (Some(m), Some(lambda)) = (chosen.modulus, chosen.lambda) else {
        return Ok(report);
    };
    let times = check_times(config);
    let t_end = config.stepper.t_end;
    let states = std::iter::once(initial).chain(
        result
            .snapshots
            .iter()
            .filter(|s| contains_time(&times, s.time(), t_end)),
    );
    let mut worst = (f64::INFINITY, 0.0);
    for s in states {
        let rho = s.rho().expect("alignment state has a density");
        let v = moc_check(rho, &m, lambda)?;
        if v.margin < worst.0 {
            worst = (v.margin, s.time());
        }
        report.times_checked += 1;
    }
    report.worst_margin = Some(worst.0);
    report.worst_time = Some(worst.1);
    report.obeys = worst.0 > 0.0;
    if result.termination != Termination::ReachedTEnd {
        report.note = format!(
            "run ended at t = {} ({}); later times were not checked",
            result.final_state.time(),
            result.termination.name()
        );
    }
    Ok(report)
}
