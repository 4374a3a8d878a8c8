use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{AccelLimits, DriveSignal};
use crate::engine::{Channel, ErrorMap, SlideConfig};
use crate::error::{Error, Result};
use crate::models::{model_by_name, SYSTEM_NAMES};
use crate::nn::{Activation, Precision, TrainConfig};

/// Built-in experiment setups; a run file selects one with `preset = "name"`
/// and overrides individual keys.
pub const PRESETS: [(&str, &str); 4] = [
    ("linear_oscillator", include_str!("../../presets/linear_oscillator.toml")),
    ("duffing", include_str!("../../presets/duffing.toml")),
    ("slider_crank_lumped", include_str!("../../presets/slider_crank_lumped.toml")),
    ("two_mass_constrained", include_str!("../../presets/two_mass_constrained.toml")),
];

/// Excitation drawn for every generated trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DriveSpec {
    RandomStepForce {
        min: f64,
        max: f64,
    },
    PiecewiseConstantAcceleration {
        #[serde(default = "omega_max")]
        omega_max: f64,
        #[serde(default = "alpha_max")]
        alpha_max: f64,
        #[serde(default = "phase_min")]
        phase_min: usize,
        #[serde(default = "phase_max")]
        phase_max: usize,
        #[serde(default = "p_zero")]
        p_zero: f64,
    },
    Constant {
        values: Vec<f64>,
    },
}

fn omega_max() -> f64 {
    AccelLimits::default().omega_max
}
fn alpha_max() -> f64 {
    AccelLimits::default().alpha_max
}
fn phase_min() -> usize {
    20
}
fn phase_max() -> usize {
    60
}
fn p_zero() -> f64 {
    0.1
}

impl DriveSpec {
    pub fn generate(&self, n_steps: usize, h: f64, seed: u64) -> Result<DriveSignal> {
        match self {
            DriveSpec::RandomStepForce { min, max } => {
                crate::dynamics::gen_random_step_force((*min, *max), n_steps, h, seed)
            }
            DriveSpec::PiecewiseConstantAcceleration { omega_max, alpha_max, phase_min, phase_max, p_zero } => {
                crate::dynamics::gen_accel_trajectory(
                    AccelLimits { omega_max: *omega_max, alpha_max: *alpha_max },
                    (*phase_min, *phase_max),
                    *p_zero,
                    n_steps,
                    h,
                    seed,
                )
            }
            DriveSpec::Constant { values } => Ok(DriveSignal::constant(values, h, n_steps)),
        }
    }

    fn channels(&self) -> Option<usize> {
        match self {
            DriveSpec::RandomStepForce { .. } => Some(1),
            DriveSpec::PiecewiseConstantAcceleration { .. } => Some(2),
            DriveSpec::Constant { values } => Some(values.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub name: String,
    pub h: f64,
    #[serde(default)]
    pub seed: u64,
    /// Steps per trajectory after the startup phase; defaults to `n_in`.
    #[serde(default)]
    pub steps: Option<usize>,
    /// Steps simulated before the recorded part of every trajectory.
    #[serde(default)]
    pub startup_steps: usize,
    #[serde(default = "substeps")]
    pub substeps: usize,
    pub drive: DriveSpec,
    /// Uniform ranges for the initial coordinates; empty starts at the model's
    /// rest state.
    #[serde(default)]
    pub initial_q: Vec<[f64; 2]>,
    #[serde(default)]
    pub initial_qdot: Vec<[f64; 2]>,
}

fn substeps() -> usize {
    8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    pub n_in: usize,
    pub n_out: usize,
    pub inputs: Vec<Channel>,
    pub outputs: Vec<Channel>,
    #[serde(default)]
    pub initial: Vec<Channel>,
    #[serde(default)]
    pub dataset_stride: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub hidden: Vec<usize>,
    pub activation: Activation,
    #[serde(default = "yes")]
    pub bias: bool,
    #[serde(default)]
    pub precision: Precision,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingSection {
    #[serde(default = "n_train")]
    pub n_train: usize,
    #[serde(default = "n_val")]
    pub n_val: usize,
    #[serde(default = "lr")]
    pub lr: f64,
    /// Filled with `n_train / 8` when loading.
    #[serde(default)]
    pub batch: Option<usize>,
    #[serde(default = "epochs")]
    pub epochs: usize,
    #[serde(default = "val_every")]
    pub val_every: usize,
    #[serde(default)]
    pub seed: u64,
}

fn n_train() -> usize {
    1024
}
fn n_val() -> usize {
    64
}
fn lr() -> f64 {
    1e-3
}
fn epochs() -> usize {
    100
}
fn val_every() -> usize {
    20
}

impl Default for TrainingSection {
    fn default() -> Self {
        TrainingSection {
            n_train: n_train(),
            n_val: n_val(),
            lr: lr(),
            batch: None,
            epochs: epochs(),
            val_every: val_every(),
            seed: 0,
        }
    }
}

impl TrainingSection {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            lr: self.lr,
            batch_size: self.batch,
            epochs: self.epochs,
            val_every: self.val_every,
            seed: self.seed,
            ..TrainConfig::default()
        }
    }
}

/// Error-estimator network and its training data. Unset sizes and training
/// parameters follow the surrogate's.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    #[serde(default = "eps_hi")]
    pub eps_hi: f64,
    #[serde(default = "eps_lo")]
    pub eps_lo: f64,
    /// Drive amplitude factors applied to every base trajectory. `n_train`
    /// and `n_val` count base trajectories.
    #[serde(default = "multipliers")]
    pub multipliers: Vec<f64>,
    pub hidden: Vec<usize>,
    pub activation: Activation,
    #[serde(default)]
    pub n_train: Option<usize>,
    #[serde(default)]
    pub n_val: Option<usize>,
    #[serde(default)]
    pub lr: Option<f64>,
    #[serde(default)]
    pub batch: Option<usize>,
    #[serde(default)]
    pub epochs: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn eps_hi() -> f64 {
    ErrorMap::default().eps_hi
}
fn eps_lo() -> f64 {
    ErrorMap::default().eps_lo
}
fn multipliers() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 1.5, 2.0]
}

impl EstimatorSection {
    pub fn error_map(&self) -> ErrorMap {
        ErrorMap { eps_hi: self.eps_hi, eps_lo: self.eps_lo }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearizationSection {
    #[serde(default = "a_rel")]
    pub a_rel: f64,
    /// Trajectory samples between two linearizations.
    #[serde(default = "stride")]
    pub stride: usize,
    /// Trajectories averaged when estimating the decay time.
    #[serde(default = "n_trajectories")]
    pub n_trajectories: usize,
}

fn a_rel() -> f64 {
    0.01
}
fn stride() -> usize {
    4
}
fn n_trajectories() -> usize {
    8
}

impl Default for LinearizationSection {
    fn default() -> Self {
        LinearizationSection { a_rel: a_rel(), stride: stride(), n_trajectories: n_trajectories() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSection {
    #[serde(default = "batch_sizes")]
    pub batch_sizes: Vec<usize>,
    #[serde(default = "repetitions")]
    pub repetitions: usize,
    #[serde(default = "warmup")]
    pub warmup: usize,
}

fn batch_sizes() -> Vec<usize> {
    vec![1, 4, 16, 64, 256]
}
fn repetitions() -> usize {
    20
}
fn warmup() -> usize {
    3
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection { batch_sizes: batch_sizes(), repetitions: repetitions(), warmup: warmup() }
    }
}

/// A fully resolved experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    #[serde(default)]
    pub windows: Option<WindowSection>,
    #[serde(default)]
    pub network: Option<NetworkSection>,
    #[serde(default)]
    pub training: TrainingSection,
    #[serde(default)]
    pub estimator: Option<EstimatorSection>,
    #[serde(default)]
    pub linearization: LinearizationSection,
    #[serde(default)]
    pub bench: BenchSection,
}

fn preset_value(name: &str) -> Result<toml::Value> {
    let text = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<_> = PRESETS.iter().map(|p| p.0).collect();
            Error::config("preset", format!("unknown preset `{name}`; expected one of {}", names.join(", ")))
        })?;
    toml::from_str(text).map_err(|e| Error::config("preset", format!("built-in preset `{name}`: {e}")))
}

/// Overlays `top` onto `base`; tables merge key by key, everything else is replaced.
pub fn merge_toml(base: &mut toml::Value, top: toml::Value) {
    match (base, top) {
        (toml::Value::Table(b), toml::Value::Table(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) => merge_toml(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn key_of(path: &serde_path_to_error::Path) -> String {
    let s = path.to_string();
    if s == "." {
        String::new()
    } else {
        s
    }
}

impl RunConfig {
    pub fn preset(name: &str) -> Result<Self> {
        Self::from_value(preset_value(name)?)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let value: toml::Value = toml::from_str(text).map_err(|e| Error::config("", e.to_string()))?;
        Self::from_value(value)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Parses a configuration table, expanding a `preset` key first.
    pub fn from_value(mut value: toml::Value) -> Result<Self> {
        if let Some(table) = value.as_table_mut() {
            if let Some(p) = table.remove("preset") {
                let name = p
                    .as_str()
                    .ok_or_else(|| Error::config("preset", "preset must be a name"))?
                    .to_string();
                let mut base = preset_value(&name)?;
                merge_toml(&mut base, value);
                value = base;
            }
        }
        let mut cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            let key = key_of(e.path());
            Error::config(key, e.into_inner().to_string())
        })?;
        cfg.resolve()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("", e.to_string()))
    }

    /// Fills derived defaults and checks value ranges.
    fn resolve(&mut self) -> Result<()> {
        let s = &self.system;
        if !SYSTEM_NAMES.contains(&s.name.as_str()) {
            return Err(Error::config(
                "system.name",
                format!("unknown system `{}`; expected one of {}", s.name, SYSTEM_NAMES.join(", ")),
            ));
        }
        if !(s.h > 0.0 && s.h.is_finite()) {
            return Err(Error::config("system.h", "time step must be positive"));
        }
        if s.substeps == 0 {
            return Err(Error::config("system.substeps", "need at least one substep"));
        }
        if s.steps == Some(0) {
            return Err(Error::config("system.steps", "need at least one step"));
        }
        let model = model_by_name(&s.name)?;
        if s.drive.channels() != Some(model.n_u()) {
            return Err(Error::config(
                "system.drive",
                format!("`{}` takes {} drive channels", s.name, model.n_u()),
            ));
        }
        for (key, ranges) in [("system.initial_q", &s.initial_q), ("system.initial_qdot", &s.initial_qdot)] {
            if !ranges.is_empty() && ranges.len() != model.n_q() {
                return Err(Error::config(key, format!("need {} ranges, one per coordinate", model.n_q())));
            }
            if ranges.iter().any(|r| !(r[0] <= r[1])) {
                return Err(Error::config(key, "every range needs min ≤ max"));
            }
        }
        if s.initial_q.is_empty() != s.initial_qdot.is_empty() {
            return Err(Error::config("system.initial_qdot", "give ranges for both q and qdot or for neither"));
        }
        if model.n_a() > 0 && !s.initial_q.is_empty() {
            return Err(Error::config("system.initial_q", "constrained systems start from a consistent rest state"));
        }

        if let Some(w) = &self.windows {
            let sc = self.slide_config()?;
            sc.validate()?;
            for c in w.inputs.iter().chain(&w.outputs).chain(&w.initial) {
                let limit = match c.source {
                    crate::engine::Source::Drive | crate::engine::Source::Director => model.n_u(),
                    crate::engine::Source::Q | crate::engine::Source::Qdot => model.n_q(),
                    crate::engine::Source::Output => model.n_y(),
                };
                if c.index >= limit {
                    return Err(Error::config(
                        "windows",
                        format!("{} channel {} out of range for `{}`", c.source.as_str(), c.index, s.name),
                    ));
                }
            }
            if let Some(steps) = s.steps {
                if steps < w.n_in {
                    return Err(Error::config("system.steps", "trajectories must cover at least one window"));
                }
            }
        }

        if let Some(n) = &self.network {
            if n.hidden.contains(&0) {
                return Err(Error::config("network.hidden", "layer widths must be positive"));
            }
        }

        let t = &mut self.training;
        if t.n_train == 0 {
            return Err(Error::config("training.n_train", "need at least one training sample"));
        }
        if t.n_val == 0 {
            return Err(Error::config("training.n_val", "need at least one validation sample"));
        }
        check_lr("training.lr", t.lr)?;
        let batch = t.batch.unwrap_or((t.n_train / 8).max(1));
        if batch == 0 || batch > t.n_train {
            return Err(Error::config("training.batch", format!("batch size {batch} outside 1..={}", t.n_train)));
        }
        t.batch = Some(batch);
        if t.epochs == 0 {
            return Err(Error::config("training.epochs", "need at least one epoch"));
        }
        if t.val_every == 0 {
            return Err(Error::config("training.val_every", "validation period must be positive"));
        }

        if let Some(e) = &mut self.estimator {
            ErrorMap::new(e.eps_lo, e.eps_hi).map_err(|err| Error::config("estimator.eps_lo", err.to_string()))?;
            if e.multipliers.is_empty() || e.multipliers.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
                return Err(Error::config("estimator.multipliers", "amplitude factors must be finite and non-negative"));
            }
            if e.hidden.contains(&0) {
                return Err(Error::config("estimator.hidden", "layer widths must be positive"));
            }
            let n = *e.n_train.get_or_insert(self.training.n_train);
            e.n_val.get_or_insert(self.training.n_val);
            if n == 0 || e.n_val == Some(0) {
                return Err(Error::config("estimator.n_train", "need at least one sample"));
            }
            let lr = *e.lr.get_or_insert(self.training.lr);
            check_lr("estimator.lr", lr)?;
            e.epochs.get_or_insert(self.training.epochs);
            e.seed.get_or_insert(self.training.seed);
            // Every multiplier, plus one, is applied to each base trajectory.
            let rows = n * (e.multipliers.len() + usize::from(!e.multipliers.contains(&1.0)));
            let b = *e.batch.get_or_insert((rows / 8).max(1));
            if b == 0 || b > rows {
                return Err(Error::config("estimator.batch", format!("batch size {b} outside 1..={rows}")));
            }
        }

        let l = &self.linearization;
        if !(l.a_rel > 0.0 && l.a_rel < 1.0) {
            return Err(Error::config("linearization.a_rel", "relative amplitude must lie in (0, 1)"));
        }
        if l.stride == 0 || l.n_trajectories == 0 {
            return Err(Error::config("linearization.stride", "stride and trajectory count must be positive"));
        }

        let b = &self.bench;
        if b.repetitions < 20 {
            return Err(Error::config("bench.repetitions", "timing needs at least 20 repetitions"));
        }
        if b.batch_sizes.is_empty() || b.batch_sizes.contains(&0) {
            return Err(Error::config("bench.batch_sizes", "batch sizes must be positive"));
        }
        Ok(())
    }

    /// Window layout; errors when the run has no `windows` section.
    pub fn slide_config(&self) -> Result<SlideConfig> {
        let w = self.windows.as_ref().ok_or_else(|| Error::config("windows", "missing section"))?;
        Ok(SlideConfig {
            system: self.system.name.clone(),
            h: self.system.h,
            n_in: w.n_in,
            n_out: w.n_out,
            inputs: w.inputs.clone(),
            outputs: w.outputs.clone(),
            initial: w.initial.clone(),
            dataset_stride: w.dataset_stride,
        })
    }

    pub fn network(&self) -> Result<&NetworkSection> {
        self.network.as_ref().ok_or_else(|| Error::config("network", "missing section"))
    }

    pub fn estimator(&self) -> Result<&EstimatorSection> {
        self.estimator.as_ref().ok_or_else(|| Error::config("estimator", "missing section"))
    }

    /// Estimator training parameters, falling back to the surrogate's.
    pub fn estimator_train_config(&self) -> Result<TrainConfig> {
        let e = self.estimator()?;
        let t = &self.training;
        Ok(TrainConfig {
            lr: e.lr.unwrap_or(t.lr),
            batch_size: e.batch,
            epochs: e.epochs.unwrap_or(t.epochs),
            val_every: t.val_every,
            seed: e.seed.unwrap_or(t.seed),
            ..TrainConfig::default()
        })
    }

    /// Recorded steps per trajectory, excluding the startup phase.
    pub fn trajectory_steps(&self) -> Result<usize> {
        match (self.system.steps, &self.windows) {
            (Some(n), _) => Ok(n),
            (None, Some(w)) => Ok(w.n_in),
            (None, None) => Err(Error::config("system.steps", "needed when there is no windows section")),
        }
    }
}

fn check_lr(key: &str, lr: f64) -> Result<()> {
    if lr > 0.0 && lr.is_finite() {
        Ok(())
    } else {
        Err(Error::config(key, "learning rate must be positive"))
    }
}
