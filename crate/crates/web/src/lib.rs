//! WebAssembly bindings for the browser demo in `www/`.

use slide_core::engine::{sliding_inference, EvalMode, Sequence, SlideConfig};
use slide_core::io::RunConfig;
use slide_core::linearization::{decay_time, linearize, LinearizeOptions};
use slide_core::models::model_by_name;
use slide_core::nn::Network;
use slide_core::pipeline::Generator;
use wasm_bindgen::prelude::*;

fn js(e: slide_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Sampled curves returned to the page.
#[wasm_bindgen]
pub struct Series {
    t: Vec<f64>,
    drive: Vec<f64>,
    output: Vec<f64>,
    reference: Vec<f64>,
}

#[wasm_bindgen]
impl Series {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }

    /// First drive channel.
    #[wasm_bindgen(getter)]
    pub fn drive(&self) -> Vec<f64> {
        self.drive.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn output(&self) -> Vec<f64> {
        self.output.clone()
    }

    /// Simulated output on the same time grid as `output`; empty for plain simulations.
    #[wasm_bindgen(getter)]
    pub fn reference(&self) -> Vec<f64> {
        self.reference.clone()
    }
}

/// Simulates trajectory `index` of a preset with its drive scaled by `amplitude`.
/// Returns the drive and the output channel `channel`.
#[wasm_bindgen]
pub fn simulate(system: &str, index: u32, steps: u32, amplitude: f64, channel: u32) -> Result<Series, JsError> {
    simulate_series(system, index as u64, steps as usize, amplitude, channel as usize).map_err(js)
}

pub fn simulate_series(system: &str, index: u64, steps: usize, amplitude: f64, channel: usize) -> slide_core::Result<Series> {
    let cfg = RunConfig::preset(system)?;
    let g = Generator::new(&cfg)?;
    let mut drive = g.drive(index, steps)?;
    if amplitude != 1.0 {
        drive = drive.scaled(amplitude);
    }
    let traj = g.run(&drive)?;
    let pick = |rows: &[Vec<f64>], k: usize| rows.iter().map(|r| r.get(k).copied().unwrap_or(0.0)).collect();
    if channel >= g.model().n_y() {
        return Err(slide_core::Error::config("channel", format!("{system} has {} outputs", g.model().n_y())));
    }
    Ok(Series { t: traj.t.clone(), drive: pick(&traj.u, 0), output: pick(&traj.y, channel), reference: Vec::new() })
}

/// Eigenvalues of a system linearized at its initial state, as
/// `[re0, im0, re1, im1, …]`, slowest first.
#[wasm_bindgen]
pub fn eigenvalues(system: &str) -> Result<Vec<f64>, JsError> {
    modes(system, 0.01).map(|m| m.0).map_err(js)
}

/// Time for the slowest damped mode at the initial state to decay to `a_rel`;
/// infinite when no mode is damped.
#[wasm_bindgen]
pub fn decay(system: &str, a_rel: f64) -> Result<f64, JsError> {
    modes(system, a_rel).map(|m| m.1).map_err(js)
}

pub fn modes(system: &str, a_rel: f64) -> slide_core::Result<(Vec<f64>, f64)> {
    let model = model_by_name(system)?;
    let opts = LinearizeOptions::default();
    let r = linearize(model.as_ref(), &model.initial_state(), &vec![0.0; model.n_u()], 0.0, &opts)?;
    let t_d = match r.slowest_damped(&opts) {
        Some(v) => decay_time(v, a_rel)?,
        None => f64::INFINITY,
    };
    Ok((r.eigenvalues.iter().flat_map(|v| [v.re, v.im]).collect(), t_d))
}

/// A small Duffing surrogate trained in the page.
#[wasm_bindgen]
pub struct Surrogate {
    cfg: RunConfig,
    config: SlideConfig,
    network: Network,
    val_rmse: f64,
}

#[wasm_bindgen]
impl Surrogate {
    /// Trains on `n_train` generated windows for `epochs` epochs with one
    /// hidden ReLU layer of `width` neurons.
    #[wasm_bindgen(constructor)]
    pub fn new(n_train: u32, epochs: u32, width: u32, seed: u32) -> Result<Surrogate, JsError> {
        Self::train(n_train as usize, epochs as usize, width as usize, seed as u64).map_err(js)
    }

    /// Best validation RMSE in scaled units.
    #[wasm_bindgen(getter, js_name = valRmse)]
    pub fn val_rmse(&self) -> f64 {
        self.val_rmse
    }

    /// Sliding-window prediction over a fresh sequence of `steps` steps next to
    /// the simulated position.
    pub fn predict(&self, index: u32, steps: u32) -> Result<Series, JsError> {
        self.prediction(index as u64, steps as usize).map_err(js)
    }
}

impl Surrogate {
    pub fn train(n_train: usize, epochs: usize, width: usize, seed: u64) -> slide_core::Result<Surrogate> {
        let text = format!(
            "preset = \"duffing\"\n[system]\nseed = {seed}\n[network]\nhidden = [{width}]\nactivation = \"relu\"\n\
             [training]\nn_train = {n_train}\nn_val = {}\nepochs = {epochs}\nval_every = {}\nseed = {seed}\n",
            (n_train / 8).max(1),
            (epochs / 10).max(1),
        );
        let cfg = RunConfig::from_toml_str(&text)?;
        let config = cfg.slide_config()?;
        let (train, val) = Generator::new(&cfg)?.train_val(None)?;
        let n = cfg.network()?;
        let widths = [config.input_width(), width, config.output_width()];
        let tc = cfg.training.train_config();
        let (network, report) = Network::new(&widths, n.activation, n.bias, n.precision, tc.seed)?.train(&train.data, &val.data, &tc)?;
        Ok(Surrogate { cfg, config, network, val_rmse: report.best_val_rmse })
    }

    pub fn prediction(&self, index: u64, steps: usize) -> slide_core::Result<Series> {
        let g = Generator::new(&self.cfg)?;
        let traj = g.trajectory_with_steps(index, steps)?;
        let out = sliding_inference(&self.network, &self.config, &Sequence::from(&traj), EvalMode::Batched)?;
        Ok(Series {
            t: out.times(self.config.h),
            drive: out.steps.iter().map(|&s| traj.u[s][0]).collect(),
            output: out.y.iter().map(|r| r[0]).collect(),
            reference: out.steps.iter().map(|&s| traj.q[s][0]).collect(),
        })
    }
}
