//! Classical RK4 time stepping with stability-limited steps, trajectory
//! recording and blow-up monitoring.

use crate::diagnostics::{regularity, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::model::{rhs, ModelParams, SystemState};
use crate::scalar::Scalar;

/// Step control and monitoring thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct StepperConfig<T> {
    pub cfl_transport: T,
    pub cfl_dissipation: T,
    pub t_end: T,
    pub max_steps: usize,
    pub record_every: usize,
    pub blowup_gradient_threshold: T,
    pub tail_fraction_threshold: T,
    /// Times at which the full state is kept; steps are shortened to land on them.
    pub snapshot_times: Vec<T>,
}

impl<T: Scalar> StepperConfig<T> {
    pub fn new(t_end: T) -> Self {
        Self {
            cfl_transport: T::lit(0.4),
            cfl_dissipation: T::lit(0.4),
            t_end,
            max_steps: 1_000_000,
            record_every: 1,
            blowup_gradient_threshold: T::lit(1e4),
            tail_fraction_threshold: T::lit(1e-4),
            snapshot_times: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: T| v > T::zero() && v <= T::one();
        let mut bad = Vec::new();
        if !unit(self.cfl_transport) {
            bad.push(format!("cfl_transport must lie in (0, 1], got {}", self.cfl_transport));
        }
        if !unit(self.cfl_dissipation) {
            bad.push(format!(
                "cfl_dissipation must lie in (0, 1], got {}",
                self.cfl_dissipation
            ));
        }
        if !(self.t_end > T::zero()) || !self.t_end.is_finite() {
            bad.push(format!("t_end must be positive, got {}", self.t_end));
        }
        if self.max_steps == 0 {
            bad.push("max_steps must be positive".into());
        }
        if self.record_every == 0 {
            bad.push("record_every must be positive".into());
        }
        if !(self.blowup_gradient_threshold > T::zero()) {
            bad.push(format!(
                "blowup_gradient_threshold must be positive, got {}",
                self.blowup_gradient_threshold
            ));
        }
        if !(self.tail_fraction_threshold > T::zero() && self.tail_fraction_threshold < T::one()) {
            bad.push(format!(
                "tail_fraction_threshold must lie in (0, 1), got {}",
                self.tail_fraction_threshold
            ));
        }
        if self.snapshot_times.iter().any(|t| !(*t >= T::zero())) {
            bad.push("snapshot times must be nonnegative".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Parameter(bad.join("; ")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    ReachedTEnd,
    BlowupDetected,
    Vacuum,
    StepLimit,
    /// Non-finite values appeared in the state.
    NumericalFailure,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::ReachedTEnd => "reached_t_end",
            Termination::BlowupDetected => "blowup_detected",
            Termination::Vacuum => "vacuum",
            Termination::StepLimit => "step_limit",
            Termination::NumericalFailure => "numerical_failure",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult<T: Scalar> {
    pub final_state: SystemState<T>,
    pub records: Vec<TrajectoryRecord<T>>,
    pub termination: Termination,
    /// `∫ ||∂_x rho||_∞^2 dt` (of `u` for the Burgers model), trapezoid rule.
    pub bkm_integral: T,
    pub steps: usize,
    /// Time at which the monitor fired.
    pub blowup_time: Option<T>,
    /// States at the configured snapshot times that were reached.
    pub snapshots: Vec<SystemState<T>>,
    /// Error that ended the run early, if any.
    pub failure: Option<Error>,
}

/// Stable step: `min(cfl_t h / max|u|, cfl_d / (max rho k_max^a))`.
///
/// For the Burgers model `max rho` is replaced by `epsilon`.
pub fn compute_dt<T: Scalar>(
    state: &SystemState<T>,
    params: &ModelParams<T>,
    config: &StepperConfig<T>,
) -> Result<T> {
    let grid = state.grid();
    let u = state.velocity(params)?;
    let umax = u.max_abs().max(T::lit(1e-12));
    let transport = config.cfl_transport * grid.spacing() / umax;
    let strength = match state.rho() {
        Some(rho) => rho.max(),
        None => params.epsilon,
    };
    let rate = strength * grid.max_retained_wavenumber().powf(params.alpha);
    let dissipative = if rate > T::zero() {
        config.cfl_dissipation / rate
    } else {
        T::infinity()
    };
    Ok(transport.min(dissipative))
}

/// One classical fourth-order Runge–Kutta step.
pub fn step_rk4<T: Scalar>(
    state: &SystemState<T>,
    params: &ModelParams<T>,
    dt: T,
) -> Result<SystemState<T>> {
    let half = dt * T::lit(0.5);
    let t0 = state.time();
    let stage = |k: &[crate::spectral::RealField<T>], c: T, t: T| {
        let comps = state
            .components()
            .into_iter()
            .zip(k)
            .map(|(y, dy)| y.axpy(c, dy))
            .collect();
        state.with_components(comps, t)
    };
    let k1 = rhs(state, params)?;
    let s2 = stage(&k1, half, t0 + half)?;
    let k2 = rhs(&s2, params)?;
    let s3 = stage(&k2, half, t0 + half)?;
    let k3 = rhs(&s3, params)?;
    let s4 = stage(&k3, dt, t0 + dt)?;
    let k4 = rhs(&s4, params)?;
    let sixth = dt / T::lit(6.0);
    let comps = state
        .components()
        .into_iter()
        .enumerate()
        .map(|(i, y)| {
            let incr = k1[i]
                .axpy(T::lit(2.0), &k2[i])
                .axpy(T::lit(2.0), &k3[i])
                .zip_map(&k4[i], |a, b| a + b);
            y.axpy(sixth, &incr)
        })
        .collect();
    state.with_components(comps, t0 + dt)
}

fn classify(err: &Error) -> Termination {
    match err {
        Error::Vacuum { .. } => Termination::Vacuum,
        _ => Termination::NumericalFailure,
    }
}

fn check_vacuum<T: Scalar>(state: &SystemState<T>) -> Result<()> {
    if let Some(rho) = state.rho() {
        let min = rho.min();
        let threshold = T::lit(crate::model::VACUUM_RATIO) * rho.mean();
        if !(min > threshold) {
            return Err(Error::Vacuum {
                min_rho: min.to_f64_lossy(),
                threshold: threshold.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// Integrates `initial` to `config.t_end` or until a monitor fires.
pub fn run<T: Scalar>(
    initial: SystemState<T>,
    params: &ModelParams<T>,
    config: &StepperConfig<T>,
) -> Result<RunResult<T>> {
    config.validate()?;
    let t_end = config.t_end;
    let time_tol = T::lit(1e-12) * t_end.max(T::one());
    let mut snapshot_times: Vec<T> = config
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t <= t_end + time_tol)
        .collect();
    snapshot_times.sort_by(|a, b| a.partial_cmp(b).expect("finite snapshot times"));
    snapshot_times.dedup();
    let mut next_snapshot = 0;
    let mut snapshots = Vec::new();

    let mut state = initial;
    let mut reg = regularity(&state)?;
    let mut bkm = T::zero();
    let mut records = vec![TrajectoryRecord::capture(&state, params, reg, bkm)?];
    let mut last_recorded = 0usize;
    let mut steps = 0usize;
    let mut failure = None;
    let mut blowup_time = None;

    while next_snapshot < snapshot_times.len()
        && snapshot_times[next_snapshot] <= state.time() + time_tol
    {
        snapshots.push(state.clone());
        next_snapshot += 1;
    }

    let termination = loop {
        let t = state.time();
        if reg.max_gradient > config.blowup_gradient_threshold
            || reg.tail_fraction > config.tail_fraction_threshold
        {
            blowup_time = Some(t);
            break Termination::BlowupDetected;
        }
        if t >= t_end - time_tol {
            break Termination::ReachedTEnd;
        }
        if steps >= config.max_steps {
            break Termination::StepLimit;
        }
        let mut dt = match compute_dt(&state, params, config) {
            Ok(dt) => dt,
            Err(e) => {
                let kind = classify(&e);
                failure = Some(e);
                break kind;
            }
        };
        let mut target = t_end;
        if next_snapshot < snapshot_times.len() {
            target = target.min(snapshot_times[next_snapshot]);
        }
        if t + dt >= target - time_tol {
            dt = target - t;
        }
        let next = match step_rk4(&state, params, dt) {
            Ok(s) => s,
            Err(e) => {
                let kind = classify(&e);
                failure = Some(e);
                break kind;
            }
        };
        if let Err(e) = check_vacuum(&next) {
            failure = Some(e);
            break Termination::Vacuum;
        }
        let next_reg = regularity(&next)?;
        steps += 1;
        let g0 = reg.max_gradient;
        let g1 = next_reg.max_gradient;
        bkm = bkm + dt * T::lit(0.5) * (g0 * g0 + g1 * g1);
        state = next;
        reg = next_reg;

        while next_snapshot < snapshot_times.len()
            && snapshot_times[next_snapshot] <= state.time() + time_tol
        {
            snapshots.push(state.clone());
            next_snapshot += 1;
        }
        if steps % config.record_every == 0 {
            records.push(TrajectoryRecord::capture(&state, params, reg, bkm)?);
            last_recorded = steps;
        }
    };

    if last_recorded != steps {
        // vacuum and failures leave the last good state, which is recorded
        records.push(TrajectoryRecord::capture(&state, params, reg, bkm)?);
    }
    Ok(RunResult {
        final_state: state,
        records,
        termination,
        bkm_integral: bkm,
        steps,
        blowup_time,
        snapshots,
        failure,
    })
}
