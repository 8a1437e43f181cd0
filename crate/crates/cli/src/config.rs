//! Scenario configuration.
//!
//! The file is TOML restricted to seven tables:
//!
//! ```toml
//! [model]
//! kind = "reformulated"      # primitive | reformulated | special | burgers
//! alpha = 0.5
//!
//! [grid]
//! n = 256
//! ```
//!
//! Every other key has a default; the README lists the full schema.
//! Unknown tables and keys are rejected. Semantic problems are collected
//! and reported together.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use fracalign::diagnostics::{scaling_factor, ModulusOfContinuity};
use fracalign::initial::Profile;
use fracalign::model::Formulation;
use fracalign::Config;

use crate::error::{CliError, CliResult};
use crate::profile::{parse_profile, parse_velocity, VelocitySpec};

pub const DEFAULT_RHO: &str = "constant(1.0) + single_mode(0.5, 1, cos)";
pub const DEFAULT_ALIGNMENT_U: &str = "g_zero(0.0)";
pub const DEFAULT_BURGERS_U: &str = "single_mode(1.0, 1, sin)";

const FORMULATIONS: [Formulation; 4] = [
    Formulation::Primitive,
    Formulation::Reformulated,
    Formulation::Special,
    Formulation::Burgers,
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<RawModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<RawGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<RawInitial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stepper: Option<RawStepper>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<RawDiagnostics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moc: Option<RawMoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<RawOutput>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInitial {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawStepper {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl_transport: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl_dissipation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup_gradient: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_blowup: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDiagnostics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conservation: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_bounds: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_transport: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_principle: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeseries: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<bool>,
}

/// Initial data per model family.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Alignment { rho: Profile, u: VelocitySpec },
    Special { rho: Profile, u_mean: f64 },
    Burgers { u: Profile },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepperSettings {
    pub t_end: f64,
    pub cfl_transport: f64,
    pub cfl_dissipation: f64,
    pub max_steps: usize,
    pub record_every: usize,
    pub blowup_gradient: f64,
    pub tail_threshold: f64,
    pub snapshot_times: Vec<f64>,
    pub expect_blowup: bool,
}

impl StepperSettings {
    pub fn to_core(&self) -> Config {
        let mut c = Config::new(self.t_end);
        c.cfl_transport = self.cfl_transport;
        c.cfl_dissipation = self.cfl_dissipation;
        c.max_steps = self.max_steps;
        c.record_every = self.record_every;
        c.blowup_gradient_threshold = self.blowup_gradient;
        c.tail_fraction_threshold = self.tail_threshold;
        c.snapshot_times = self.snapshot_times.clone();
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckToggles {
    pub conservation: bool,
    pub density_bounds: bool,
    pub f_transport: bool,
    pub max_principle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MocMode {
    Off,
    /// `(δ, γ)` from the feasibility search at `m = min rho0`.
    Auto,
    Manual {
        delta: f64,
        gamma: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MocSettings {
    pub mode: MocMode,
    /// `None` picks the largest `1/k` the initial density obeys.
    pub lambda: Option<f64>,
    /// Number of evenly spaced times at which the modulus is checked.
    pub checks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub dir: PathBuf,
    pub timeseries: bool,
    pub snapshots: bool,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub model: Formulation,
    pub alpha: f64,
    /// Burgers viscosity; zero for the alignment models.
    pub epsilon: f64,
    pub n: usize,
    pub length: f64,
    pub initial: InitialSpec,
    pub seed: u64,
    pub stepper: StepperSettings,
    pub checks: CheckToggles,
    pub moc: MocSettings,
    pub output: OutputSettings,
}

/// Parses TOML text into the raw key tree; syntax errors and unknown keys
/// carry line numbers.
pub fn parse_raw(text: &str) -> CliResult<RawConfig> {
    toml::from_str(text).map_err(|e| CliError::config(e.to_string().trim_end().to_string()))
}

pub fn parse_config(text: &str) -> CliResult<ScenarioConfig> {
    validate(&parse_raw(text)?)
}

/// Normalized text form with every default spelled out.
pub fn emit_config(config: &ScenarioConfig) -> String {
    toml::to_string(&to_raw(config)).expect("configuration serializes")
}

fn finite(bad: &mut Vec<String>, key: &str, v: f64) {
    if !v.is_finite() {
        bad.push(format!("{key} must be finite, got {v}"));
    }
}

pub fn validate(raw: &RawConfig) -> CliResult<ScenarioConfig> {
    let mut bad = Vec::new();
    let model_t = raw.model.clone().unwrap_or_default();
    let grid_t = raw.grid.clone().unwrap_or_default();
    let init_t = raw.initial.clone().unwrap_or_default();
    let step_t = raw.stepper.clone().unwrap_or_default();
    let diag_t = raw.diagnostics.clone().unwrap_or_default();
    let moc_t = raw.moc.clone().unwrap_or_default();
    let out_t = raw.output.clone().unwrap_or_default();

    let model = match model_t.kind.as_deref() {
        None => {
            bad.push("model.kind is required (primitive, reformulated, special or burgers)".into());
            Formulation::Reformulated
        }
        Some(k) => FORMULATIONS
            .into_iter()
            .find(|f| f.name() == k)
            .unwrap_or_else(|| {
                bad.push(format!(
                    "model.kind must be primitive, reformulated, special or burgers, got '{k}'"
                ));
                Formulation::Reformulated
            }),
    };
    let alpha = match model_t.alpha {
        None => {
            bad.push("model.alpha is required".into());
            0.5
        }
        Some(a) => {
            if model.is_alignment() && !(a > 0.0 && a < 1.0) {
                bad.push(format!(
                    "model.alpha = {a} is outside (0, 1), the range in which the {} model is \
                     known to stay regular",
                    model.name()
                ));
            } else if !model.is_alignment() && !(a > 0.0 && a < 2.0) {
                bad.push(format!("model.alpha = {a} must lie in (0, 2) for burgers"));
            }
            a
        }
    };
    let epsilon = match (model, model_t.epsilon) {
        (Formulation::Burgers, e) => {
            let e = e.unwrap_or(1.0);
            if !(e >= 0.0) || !e.is_finite() {
                bad.push(format!("model.epsilon must be nonnegative, got {e}"));
            }
            e
        }
        (_, Some(_)) => {
            bad.push("model.epsilon only applies to the burgers model".into());
            0.0
        }
        (_, None) => 0.0,
    };

    let n = match grid_t.n {
        None => {
            bad.push("grid.n is required".into());
            256
        }
        Some(n) => {
            if n < 8 || n % 2 != 0 || n > 1 << 22 {
                bad.push(format!(
                    "grid.n must be even and between 8 and 2^22, got {n}"
                ));
            }
            n as usize
        }
    };
    let length = grid_t.length.unwrap_or(std::f64::consts::TAU);
    if !(length > 0.0) || !length.is_finite() {
        bad.push(format!("grid.length must be positive, got {length}"));
    }

    let mut profile = |key: &str, text: Option<&str>, default: &str| {
        parse_profile(text.unwrap_or(default)).unwrap_or_else(|e| {
            bad.push(format!("initial.{key}: {e}"));
            Profile::Constant(1.0)
        })
    };
    let initial = match model {
        Formulation::Burgers => {
            let u = profile("u", init_t.u.as_deref(), DEFAULT_BURGERS_U);
            if init_t.rho.is_some() {
                bad.push("initial.rho does not apply to the burgers model".into());
            }
            if init_t.u_mean.is_some() {
                bad.push("initial.u_mean only applies to the special model".into());
            }
            InitialSpec::Burgers { u }
        }
        Formulation::Special => {
            let rho = profile("rho", init_t.rho.as_deref(), DEFAULT_RHO);
            if init_t.u.is_some() {
                bad.push(
                    "initial.u does not apply to the special model; set initial.u_mean".into(),
                );
            }
            let u_mean = init_t.u_mean.unwrap_or(0.0);
            finite(&mut bad, "initial.u_mean", u_mean);
            InitialSpec::Special { rho, u_mean }
        }
        _ => {
            let rho = profile("rho", init_t.rho.as_deref(), DEFAULT_RHO);
            let u = parse_velocity(init_t.u.as_deref().unwrap_or(DEFAULT_ALIGNMENT_U))
                .unwrap_or_else(|e| {
                    bad.push(format!("initial.u: {e}"));
                    VelocitySpec::GZero { mean: 0.0 }
                });
            if init_t.u_mean.is_some() {
                bad.push("initial.u_mean only applies to the special model".into());
            }
            InitialSpec::Alignment { rho, u }
        }
    };
    let seed = init_t.seed.unwrap_or(0);

    let stepper = StepperSettings {
        t_end: step_t.t_end.unwrap_or(10.0),
        cfl_transport: step_t.cfl_transport.unwrap_or(0.4),
        cfl_dissipation: step_t.cfl_dissipation.unwrap_or(0.4),
        max_steps: step_t.max_steps.unwrap_or(1_000_000) as usize,
        record_every: step_t.record_every.unwrap_or(1) as usize,
        blowup_gradient: step_t.blowup_gradient.unwrap_or(1e4),
        tail_threshold: step_t.tail_threshold.unwrap_or(1e-4),
        snapshot_times: step_t.snapshot_times.clone().unwrap_or_default(),
        expect_blowup: step_t.expect_blowup.unwrap_or(false),
    };
    if let Err(fracalign::Error::Parameter(msg)) = stepper.to_core().validate() {
        bad.extend(msg.split("; ").map(|m| format!("stepper: {m}")));
    }
    for &t in &stepper.snapshot_times {
        if !(t >= 0.0 && t <= stepper.t_end) {
            bad.push(format!(
                "stepper.snapshot_times entry {t} lies outside [0, {}]",
                stepper.t_end
            ));
        }
    }

    let checks = CheckToggles {
        conservation: diag_t.conservation.unwrap_or(true),
        density_bounds: diag_t.density_bounds.unwrap_or(true),
        f_transport: diag_t.f_transport.unwrap_or(true),
        max_principle: diag_t.max_principle.unwrap_or(true),
    };

    let mode = match moc_t.mode.as_deref().unwrap_or("off") {
        "off" => MocMode::Off,
        "auto" => MocMode::Auto,
        "manual" => match (moc_t.delta, moc_t.gamma) {
            (Some(delta), Some(gamma)) => {
                if model.is_alignment() && alpha > 0.0 && alpha < 1.0 {
                    if let Err(e) = ModulusOfContinuity::new(delta, gamma, alpha) {
                        bad.push(format!("moc: {e}"));
                    }
                }
                MocMode::Manual { delta, gamma }
            }
            _ => {
                bad.push("moc.mode = \"manual\" needs moc.delta and moc.gamma".into());
                MocMode::Off
            }
        },
        other => {
            bad.push(format!(
                "moc.mode must be off, auto or manual, got '{other}'"
            ));
            MocMode::Off
        }
    };
    if !matches!(mode, MocMode::Manual { .. }) && (moc_t.delta.is_some() || moc_t.gamma.is_some()) {
        bad.push("moc.delta and moc.gamma only apply with moc.mode = \"manual\"".into());
    }
    if mode != MocMode::Off && !model.is_alignment() {
        bad.push("the modulus of continuity check needs a density; burgers has none".into());
    }
    if let Some(l) = moc_t.lambda {
        if let Err(e) = scaling_factor(l) {
            bad.push(format!("moc.lambda: {e}"));
        }
    }
    let moc = MocSettings {
        mode,
        lambda: moc_t.lambda,
        checks: moc_t.checks.unwrap_or(20) as usize,
    };
    if moc.checks == 0 {
        bad.push("moc.checks must be positive".into());
    }

    let output = OutputSettings {
        dir: PathBuf::from(out_t.dir.as_deref().unwrap_or("output")),
        timeseries: out_t.timeseries.unwrap_or(true),
        snapshots: out_t.snapshots.unwrap_or(true),
    };

    if !bad.is_empty() {
        return Err(CliError::Config(bad));
    }
    Ok(ScenarioConfig {
        model,
        alpha,
        epsilon,
        n,
        length,
        initial,
        seed,
        stepper,
        checks,
        moc,
        output,
    })
}

fn to_raw(c: &ScenarioConfig) -> RawConfig {
    let (rho, u, u_mean) = match &c.initial {
        InitialSpec::Alignment { rho, u } => (Some(rho.to_string()), Some(u.to_string()), None),
        InitialSpec::Special { rho, u_mean } => (Some(rho.to_string()), None, Some(*u_mean)),
        InitialSpec::Burgers { u } => (None, Some(u.to_string()), None),
    };
    let (mode, delta, gamma) = match c.moc.mode {
        MocMode::Off => ("off", None, None),
        MocMode::Auto => ("auto", None, None),
        MocMode::Manual { delta, gamma } => ("manual", Some(delta), Some(gamma)),
    };
    RawConfig {
        model: Some(RawModel {
            kind: Some(c.model.name().into()),
            alpha: Some(c.alpha),
            epsilon: (c.model == Formulation::Burgers).then_some(c.epsilon),
        }),
        grid: Some(RawGrid {
            n: Some(c.n as u64),
            length: Some(c.length),
        }),
        initial: Some(RawInitial {
            rho,
            u,
            u_mean,
            seed: Some(c.seed),
        }),
        stepper: Some(RawStepper {
            t_end: Some(c.stepper.t_end),
            cfl_transport: Some(c.stepper.cfl_transport),
            cfl_dissipation: Some(c.stepper.cfl_dissipation),
            max_steps: Some(c.stepper.max_steps as u64),
            record_every: Some(c.stepper.record_every as u64),
            blowup_gradient: Some(c.stepper.blowup_gradient),
            tail_threshold: Some(c.stepper.tail_threshold),
            snapshot_times: Some(c.stepper.snapshot_times.clone()),
            expect_blowup: Some(c.stepper.expect_blowup),
        }),
        diagnostics: Some(RawDiagnostics {
            conservation: Some(c.checks.conservation),
            density_bounds: Some(c.checks.density_bounds),
            f_transport: Some(c.checks.f_transport),
            max_principle: Some(c.checks.max_principle),
        }),
        moc: Some(RawMoc {
            mode: Some(mode.into()),
            delta,
            gamma,
            lambda: c.moc.lambda,
            checks: Some(c.moc.checks as u64),
        }),
        output: Some(RawOutput {
            dir: Some(c.output.dir.to_string_lossy().into_owned()),
            timeseries: Some(c.output.timeseries),
            snapshots: Some(c.output.snapshots),
        }),
    }
}
