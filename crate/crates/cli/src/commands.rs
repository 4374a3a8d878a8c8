use std::path::{Path, PathBuf};

use clap::Args;
use log::info;
use serde::Serialize;
use slide_core::bench::bench_speedup;
use slide_core::dynamics::{DriveSignal, TrajectoryColumns};
use slide_core::engine::{
    predict_with_error, rank_correlation, sliding_inference, EvalMode, Sequence, SlideConfig, Source, WindowedDataset,
};
use slide_core::io::{
    load_dataset, load_model, save_dataset, save_model, DatasetFile, DatasetTarget, ModelFile, ModelRole, RunConfig,
    TrainingProvenance,
};
use slide_core::linearization::{decay_time, linearize, LinearizeOptions};
use slide_core::models::model_by_name;
use slide_core::nn::{Activation, Network, Precision, TrainConfig, TrainReport};
use slide_core::pipeline::Generator;
use slide_core::{Error, Result};
use toml::Value;

use crate::config::{self, Overrides};
use crate::table::{self, num};
use crate::{ActivationArg, GlobalArgs, PrecisionArg};

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Trajectory index; its seed is the base seed plus the index.
    #[arg(long, default_value_t = 0)]
    index: u64,
    /// Recorded steps (default: the configured trajectory length).
    #[arg(long)]
    steps: Option<usize>,
    /// Factor applied to the drive signal.
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    /// Output CSV (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn scaled(drive: DriveSignal, amplitude: f64) -> Result<DriveSignal> {
    if !amplitude.is_finite() {
        return Err(Error::config("amplitude", "must be finite"));
    }
    Ok(if amplitude == 1.0 { drive } else { drive.scaled(amplitude) })
}

pub fn simulate(g: &GlobalArgs, a: SimulateArgs) -> Result<()> {
    let cfg = config::load(g, None, Overrides::default())?;
    let gen = Generator::new(&cfg)?;
    let steps = match a.steps {
        Some(n) => n,
        None => cfg.trajectory_steps()?,
    };
    let traj = gen.run(&scaled(gen.drive(a.index, steps)?, a.amplitude)?)?;
    table::write_text(a.out.as_deref(), &traj.to_csv(&TrajectoryColumns::of(gen.model())))
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Directory receiving train.slds and val.slds.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "f64")]
    precision: PrecisionArg,
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long)]
    n_val: Option<usize>,
    /// Reject window configurations that truncate less than the estimated decay time.
    #[arg(long)]
    check_decay: bool,
}

fn datasets(cfg: &RunConfig, check_decay: bool) -> Result<(WindowedDataset, WindowedDataset)> {
    let gen = Generator::new(cfg)?;
    let decay = if check_decay { Some(gen.decay()?) } else { None };
    if let Some(d) = &decay {
        info!("mean decay time {:.4} s (largest {:.4} s)", d.t_d_mean, d.t_d_max);
    }
    gen.train_val(decay.as_ref())
}

pub fn gen(g: &GlobalArgs, a: GenArgs) -> Result<()> {
    let mut ov = Overrides::default();
    ov.count("training.n_train", a.n_train);
    ov.count("training.n_val", a.n_val);
    let cfg = config::load(g, None, ov)?;
    let (train, val) = datasets(&cfg, a.check_decay)?;
    table::at(&a.out, std::fs::create_dir_all(&a.out).map_err(Error::from))?;
    for (name, ds) in [("train.slds", train), ("val.slds", val)] {
        let path = a.out.join(name);
        let n = ds.len();
        table::at(&path, save_dataset(&path, &DatasetFile::window(ds), a.precision.into()))?;
        println!("{}: {n} windows", path.display());
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct EigenArgs {
    /// Number of trajectories to linearize along.
    #[arg(long)]
    trajectories: Option<usize>,
    /// Trajectory samples between two linearizations.
    #[arg(long)]
    stride: Option<usize>,
    /// Relative amplitude defining the decay time.
    #[arg(long)]
    a_rel: Option<f64>,
    /// Eigenvalue table CSV (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn eigen(g: &GlobalArgs, a: EigenArgs) -> Result<()> {
    let mut ov = Overrides::default();
    ov.count("linearization.n_trajectories", a.trajectories);
    ov.count("linearization.stride", a.stride);
    ov.opt("linearization.a_rel", a.a_rel);
    let cfg = config::load(g, None, ov)?;
    let l = &cfg.linearization;
    let gen = Generator::new(&cfg)?;
    let opts = LinearizeOptions::default();

    let header: Vec<String> =
        ["trajectory", "index", "t", "mode", "re", "im", "rigid", "t_d"].map(String::from).to_vec();
    let mut rows = Vec::new();
    for k in 0..l.n_trajectories as u64 {
        let traj = gen.trajectory(k)?;
        for i in (0..traj.len()).step_by(l.stride) {
            let r = linearize(gen.model(), &traj.state(i), &traj.u[i], traj.t[i], &opts)?;
            for (m, v) in r.eigenvalues.iter().enumerate() {
                let rigid = opts.is_rigid(*v);
                let t_d = if rigid { f64::INFINITY } else { decay_time(*v, l.a_rel)? };
                rows.push(vec![
                    k.to_string(),
                    i.to_string(),
                    num(traj.t[i]),
                    m.to_string(),
                    num(v.re),
                    num(v.im),
                    (rigid as u8).to_string(),
                    num(t_d),
                ]);
            }
        }
    }
    table::write_csv(a.out.as_deref(), &header, &rows)?;

    let on_stdout = a.out.is_none();
    let d = gen.decay()?;
    table::note(
        on_stdout,
        &format!(
            "{} samples: mean Re(v) = {:.6}, t_d(mean) = {:.6} s, t_d(max) = {:.6} s at A_rel = {}",
            d.samples.len(),
            d.mean_re,
            d.t_d_mean,
            d.t_d_max,
            d.a_rel
        ),
    );
    if cfg.windows.is_some() {
        let sc = cfg.slide_config()?;
        let verdict = if sc.truncation_time() >= d.t_d_mean { "covers" } else { "is shorter than" };
        table::note(
            on_stdout,
            &format!("window truncation {:.6} s {verdict} the mean decay time", sc.truncation_time()),
        );
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Training windows (default: generate from the configuration).
    #[arg(long, requires = "val")]
    train: Option<PathBuf>,
    /// Validation windows.
    #[arg(long, requires = "train")]
    val: Option<PathBuf>,
    /// Hidden layer widths, e.g. 100,100.
    #[arg(long, value_delimiter = ',')]
    arch: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    act: Option<ActivationArg>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    val_every: Option<usize>,
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long)]
    n_val: Option<usize>,
    #[arg(long, value_enum)]
    precision: Option<PrecisionArg>,
    #[arg(long)]
    no_bias: bool,
    /// Reject window configurations that truncate less than the estimated decay time.
    #[arg(long)]
    check_decay: bool,
    #[arg(long, default_value = "model.slnn")]
    out: PathBuf,
    /// Training curve CSV.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Training summary TOML.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn act_name(a: ActivationArg) -> Value {
    Value::String(format!("{:?}", Activation::from(a)).to_lowercase())
}

fn precision_name(p: PrecisionArg) -> Value {
    Value::String(format!("{:?}", Precision::from(p)).to_lowercase())
}

fn window_file(path: &Path) -> Result<WindowedDataset> {
    let f = table::at(path, load_dataset(path))?;
    if f.target != DatasetTarget::Window {
        return Err(Error::format(0, format!("{} holds estimator targets, not windows", path.display())));
    }
    Ok(f.dataset)
}

fn provenance(tc: &TrainConfig, r: &TrainReport, n_train: usize, n_val: usize) -> TrainingProvenance {
    TrainingProvenance {
        seed: tc.seed,
        epochs: tc.epochs,
        best_epoch: r.best_epoch,
        best_val_rmse: r.best_val_rmse,
        lr: tc.lr,
        batch_size: r.batch_size,
        n_train,
        n_val,
    }
}

fn write_curve(path: &Path, r: &TrainReport) -> Result<()> {
    let header = ["epoch", "train_loss", "val_rmse"].map(String::from);
    let mut val = r.validation.iter().peekable();
    let rows: Vec<Vec<String>> = r
        .epoch_loss
        .iter()
        .enumerate()
        .map(|(i, loss)| {
            let epoch = i + 1;
            let v = val.next_if(|(e, _)| *e == epoch).map_or(String::new(), |(_, v)| num(*v));
            vec![epoch.to_string(), num(*loss), v]
        })
        .collect();
    table::write_csv(Some(path), &header, &rows)
}

#[derive(Serialize)]
struct TrainSummary {
    role: ModelRole,
    system: String,
    widths: Vec<usize>,
    activation: Activation,
    precision: Precision,
    bias: bool,
    n_params: usize,
    n_train: usize,
    n_val: usize,
    seed: u64,
    lr: f64,
    batch_size: usize,
    iterations_per_epoch: usize,
    epochs: usize,
    best_epoch: usize,
    best_val_rmse: f64,
    final_train_loss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    estimator: Option<EstimatorStats>,
}

impl TrainSummary {
    fn new(m: &ModelFile, r: &TrainReport) -> Self {
        let t = &m.training;
        TrainSummary {
            role: m.role,
            system: m.config.system.clone(),
            widths: m.network.widths().to_vec(),
            activation: m.network.activations()[0],
            precision: m.network.precision(),
            bias: m.network.has_bias(),
            n_params: m.network.n_params(),
            n_train: t.n_train,
            n_val: t.n_val,
            seed: t.seed,
            lr: t.lr,
            batch_size: r.batch_size,
            iterations_per_epoch: r.iterations_per_epoch,
            epochs: t.epochs,
            best_epoch: r.best_epoch,
            best_val_rmse: r.best_val_rmse,
            final_train_loss: r.epoch_loss.last().copied().unwrap_or(f64::NAN),
            estimator: None,
        }
    }
}

pub fn train(g: &GlobalArgs, a: TrainArgs) -> Result<()> {
    let mut ov = Overrides::default();
    ov.counts("network.hidden", a.arch.as_deref());
    ov.opt("network.activation", a.act.map(act_name));
    ov.opt("network.precision", a.precision.map(precision_name));
    if a.no_bias {
        ov.set("network.bias", Value::Boolean(false));
    }
    ov.opt("training.lr", a.lr);
    ov.count("training.batch", a.batch);
    ov.count("training.epochs", a.epochs);
    ov.count("training.val_every", a.val_every);
    ov.count("training.n_train", a.n_train);
    ov.count("training.n_val", a.n_val);
    let cfg = config::load(g, None, ov)?;

    let (train, val) = match (&a.train, &a.val) {
        (Some(t), Some(v)) => (window_file(t)?, window_file(v)?),
        _ => datasets(&cfg, a.check_decay)?,
    };
    if train.config != val.config {
        return Err(Error::config("val", "training and validation sets use different window configurations"));
    }
    let net_cfg = cfg.network()?;
    let mut widths = vec![train.config.input_width()];
    widths.extend(&net_cfg.hidden);
    widths.push(train.config.output_width());
    let tc = cfg.training.train_config();
    let net = Network::new(&widths, net_cfg.activation, net_cfg.bias, net_cfg.precision, tc.seed)?;
    info!("training {widths:?} on {} windows, validating on {}", train.len(), val.len());
    let (best, report) = net.train(&train.data, &val.data, &tc)?;

    let model = ModelFile {
        network: best,
        role: ModelRole::Surrogate,
        config: train.config.clone(),
        error_map: None,
        training: provenance(&tc, &report, train.len(), val.len()),
    };
    table::at(&a.out, save_model(&a.out, &model))?;
    if let Some(p) = &a.curve {
        write_curve(p, &report)?;
    }
    if let Some(p) = &a.report {
        table::write_toml(p, &TrainSummary::new(&model, &report))?;
    }
    println!(
        "best validation RMSE {:e} at epoch {} of {}; model written to {}",
        report.best_val_rmse,
        report.best_epoch,
        tc.epochs,
        a.out.display()
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct TrainEeArgs {
    /// Trained surrogate model.
    #[arg(long)]
    surrogate: PathBuf,
    #[arg(long, default_value = "estimator.slnn")]
    out: PathBuf,
    /// Log10 of the error mapped to 0.
    #[arg(long, allow_hyphen_values = true)]
    eps_lo: Option<f64>,
    /// Log10 of the error mapped to 1.
    #[arg(long, allow_hyphen_values = true)]
    eps_hi: Option<f64>,
    /// Drive amplitude multipliers, e.g. 0,0.5,1,1.5,2.
    #[arg(long, value_delimiter = ',')]
    augment: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    arch: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    act: Option<ActivationArg>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Base trajectories for training.
    #[arg(long)]
    n_train: Option<usize>,
    /// Base trajectories for validation.
    #[arg(long)]
    n_val: Option<usize>,
    #[arg(long)]
    curve: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Serialize)]
struct EstimatorStats {
    clamped_train: usize,
    clamped_val: usize,
    val_rank_correlation: f64,
    multipliers: Vec<MultiplierStats>,
}

#[derive(Serialize)]
struct MultiplierStats {
    multiplier: f64,
    windows: usize,
    median_error: f64,
    median_estimate: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}

fn load_role(path: &Path, role: ModelRole) -> Result<ModelFile> {
    let m = table::at(path, load_model(path))?;
    if m.role != role {
        return Err(Error::config("model", format!("{} holds a {:?} network, expected {role:?}", path.display(), m.role)));
    }
    Ok(m)
}

/// The configuration must simulate the system the model was trained on.
fn check_system(cfg: &RunConfig, sc: &SlideConfig) -> Result<()> {
    if cfg.system.name != sc.system || cfg.system.h != sc.h {
        return Err(Error::config(
            "system",
            format!(
                "configuration simulates {} at h = {} but the model was trained on {} at h = {}",
                cfg.system.name, cfg.system.h, sc.system, sc.h
            ),
        ));
    }
    Ok(())
}

pub fn train_ee(g: &GlobalArgs, a: TrainEeArgs) -> Result<()> {
    let sur = load_role(&a.surrogate, ModelRole::Surrogate)?;
    let mut ov = Overrides::default();
    ov.opt("estimator.eps_lo", a.eps_lo);
    ov.opt("estimator.eps_hi", a.eps_hi);
    ov.floats("estimator.multipliers", a.augment.as_deref());
    ov.counts("estimator.hidden", a.arch.as_deref());
    ov.opt("estimator.activation", a.act.map(act_name));
    ov.opt("estimator.lr", a.lr);
    ov.count("estimator.batch", a.batch);
    ov.count("estimator.epochs", a.epochs);
    ov.count("estimator.n_train", a.n_train);
    ov.count("estimator.n_val", a.n_val);
    let cfg = config::load(g, Some(&sur.config.system), ov)?;
    check_system(&cfg, &sur.config)?;
    if !cfg.slide_config()?.compatible_with(&sur.config) {
        return Err(Error::config("windows", "configuration windows differ from the surrogate's"));
    }
    let e = cfg.estimator()?;
    let map = e.error_map();
    let tc = cfg.estimator_train_config()?;

    let (tr, va) = Generator::new(&cfg)?.estimator_data(&sur.network)?;
    let mut widths = vec![sur.config.input_width()];
    widths.extend(&e.hidden);
    widths.push(1);
    let net = Network::new(&widths, e.activation, true, sur.network.precision(), tc.seed)?;
    info!("training estimator {widths:?} on {} windows, validating on {}", tr.dataset.len(), va.dataset.len());
    let (best, report) = net.train(&tr.dataset.data, &va.dataset.data, &tc)?;

    let e_hat: Vec<f64> = best
        .predict(&va.dataset.data.x, va.dataset.len())?
        .into_iter()
        .map(|v| map.decode(v))
        .collect();
    let rho = rank_correlation(&e_hat, &va.errors)?;
    let mut mults = va.multipliers.clone();
    mults.sort_by(f64::total_cmp);
    mults.dedup();
    let per = mults
        .iter()
        .map(|&m| {
            let pick = |v: &[f64]| -> Vec<f64> {
                v.iter().zip(&va.multipliers).filter(|(_, k)| **k == m).map(|(x, _)| *x).collect()
            };
            let errors = pick(&va.errors);
            MultiplierStats {
                multiplier: m,
                windows: errors.len(),
                median_error: median(errors),
                median_estimate: median(pick(&e_hat)),
            }
        })
        .collect();

    let model = ModelFile {
        network: best,
        role: ModelRole::Estimator,
        config: sur.config.clone(),
        error_map: Some(map),
        training: provenance(&tc, &report, tr.dataset.len(), va.dataset.len()),
    };
    table::at(&a.out, save_model(&a.out, &model))?;
    if let Some(p) = &a.curve {
        write_curve(p, &report)?;
    }
    if let Some(p) = &a.report {
        let mut s = TrainSummary::new(&model, &report);
        s.estimator = Some(EstimatorStats {
            clamped_train: tr.clamped,
            clamped_val: va.clamped,
            val_rank_correlation: rho,
            multipliers: per,
        });
        table::write_toml(p, &s)?;
    }
    println!(
        "best validation RMSE {:e} (mapped units) at epoch {}; rank correlation {rho:.4}; estimator written to {}",
        report.best_val_rmse,
        report.best_epoch,
        a.out.display()
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct InferArgs {
    /// Trained surrogate model.
    #[arg(long)]
    model: PathBuf,
    /// Error estimator adding an `e_hat` column.
    #[arg(long)]
    estimator: Option<PathBuf>,
    /// Input sequence CSV with the column names written by `simulate`.
    #[arg(long, conflicts_with_all = ["index", "steps", "amplitude"])]
    input: Option<PathBuf>,
    /// Trajectory to simulate as input (default: the first one outside the training and validation sets).
    #[arg(long)]
    index: Option<u64>,
    /// Recorded steps of the simulated input.
    #[arg(long)]
    steps: Option<usize>,
    /// Factor applied to the simulated drive.
    #[arg(long)]
    amplitude: Option<f64>,
    /// One forward pass per window instead of one batch.
    #[arg(long)]
    sequential: bool,
    /// Prediction CSV (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Reads a sequence from the columns written by `simulate`; state and output
/// groups are optional but must be complete when present.
fn read_sequence(path: &Path, system: &str, h: f64) -> Result<Sequence> {
    let model = model_by_name(system)?;
    let names = TrajectoryColumns::of(model.as_ref());
    let (header, rows) = table::at(path, table::read_csv(path))?;
    let find = |cols: &[String]| -> Option<Vec<usize>> {
        cols.iter().map(|c| header.iter().position(|h| h == c)).collect()
    };
    let pick = |cols: Option<Vec<usize>>| -> Option<Vec<Vec<f64>>> {
        cols.map(|idx| rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect())
    };
    let qdot_names: Vec<String> = names.q.iter().map(|n| format!("{n}_dot")).collect();
    let u = pick(find(&names.u)).ok_or_else(|| {
        Error::format(0, format!("{} lacks the drive columns {}", path.display(), names.u.join(",")))
    })?;
    Ok(Sequence {
        h,
        u,
        q: pick(find(&names.q)),
        qdot: pick(find(&qdot_names)),
        y: pick(find(&names.y)),
    })
}

fn true_value(seq: &Sequence, source: Source, index: usize, step: usize) -> Option<f64> {
    let rows = match source {
        Source::Drive => Some(&seq.u),
        Source::Q => seq.q.as_ref(),
        Source::Qdot => seq.qdot.as_ref(),
        Source::Output => seq.y.as_ref(),
        Source::Director => None,
    }?;
    rows.get(step).and_then(|r| r.get(index)).copied()
}

pub fn infer(g: &GlobalArgs, a: InferArgs) -> Result<()> {
    let m = load_role(&a.model, ModelRole::Surrogate)?;
    let sc = &m.config;
    let seq = match &a.input {
        Some(path) => read_sequence(path, &sc.system, sc.h)?,
        None => {
            let cfg = config::load(g, Some(&sc.system), Overrides::default())?;
            check_system(&cfg, sc)?;
            let gen = Generator::new(&cfg)?;
            let index = a.index.unwrap_or((cfg.training.n_train + cfg.training.n_val) as u64);
            let steps = match a.steps {
                Some(n) => n,
                None => cfg.trajectory_steps()?,
            };
            let drive = scaled(gen.drive(index, steps)?, a.amplitude.unwrap_or(1.0))?;
            Sequence::from(&gen.run(&drive)?)
        }
    };
    let mode = if a.sequential { EvalMode::Sequential } else { EvalMode::Batched };
    let (out, e_hat) = match &a.estimator {
        Some(path) => {
            let est = load_role(path, ModelRole::Estimator)?;
            let map = est.error_map.ok_or_else(|| Error::format(0, "estimator file lacks its error map"))?;
            let (out, e) = predict_with_error(&m.network, sc, &est.network, &est.config, &map, &seq, mode)?;
            (out, Some(e))
        }
        None => (sliding_inference(&m.network, sc, &seq, mode)?, None),
    };

    let truth: Vec<bool> = sc
        .outputs
        .iter()
        .map(|c| true_value(&seq, c.source, c.index, 0).is_some())
        .collect();
    let mut header = vec!["t".to_string(), "step".into(), "window".into()];
    header.extend(sc.outputs.iter().map(|c| format!("pred_{}", c.name())));
    for (c, has) in sc.outputs.iter().zip(&truth) {
        if *has {
            header.push(format!("true_{}", c.name()));
        }
    }
    if e_hat.is_some() {
        header.push("e_hat".into());
    }
    let mut sq = 0.0;
    let mut n_sq = 0usize;
    let mut rows = Vec::with_capacity(out.steps.len());
    for (k, &s) in out.steps.iter().enumerate() {
        let mut row = vec![num(s as f64 * sc.h), s.to_string(), out.window[k].to_string()];
        row.extend(out.y[k].iter().map(|v| num(*v)));
        for (ci, (c, has)) in sc.outputs.iter().zip(&truth).enumerate() {
            if *has {
                match true_value(&seq, c.source, c.index, s) {
                    Some(v) => {
                        let d = c.scale(out.y[k][ci]) - c.scale(v);
                        sq += d * d;
                        n_sq += 1;
                        row.push(num(v));
                    }
                    None => row.push(String::new()),
                }
            }
        }
        if let Some(e) = &e_hat {
            row.push(num(e[out.window[k]]));
        }
        rows.push(row);
    }
    table::write_csv(a.out.as_deref(), &header, &rows)?;

    let mut msg = format!("{} windows, {} predicted samples", out.n_windows, out.steps.len());
    if n_sq > 0 {
        msg += &format!(", RMSE {:e} (scaled units)", (sq / n_sq as f64).sqrt());
    }
    table::note(a.out.is_none(), &msg);
    Ok(())
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Trained surrogate model.
    #[arg(long)]
    model: PathBuf,
    /// Batch sizes of the sweep, e.g. 1,4,16,64,256.
    #[arg(long, value_delimiter = ',')]
    batch_sizes: Option<Vec<usize>>,
    /// Timed repetitions (at least 20).
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    warmup: Option<usize>,
    /// Batch sweep CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Full report TOML.
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn bench(g: &GlobalArgs, a: BenchArgs) -> Result<()> {
    let m = load_role(&a.model, ModelRole::Surrogate)?;
    let mut ov = Overrides::default();
    ov.counts("bench.batch_sizes", a.batch_sizes.as_deref());
    ov.count("bench.repetitions", a.repetitions);
    ov.count("bench.warmup", a.warmup);
    let cfg = config::load(g, Some(&m.config.system), ov)?;
    check_system(&cfg, &m.config)?;
    let gen = Generator::new(&cfg)?;
    let r = bench_speedup(&m.network, &gen, &m.config, &cfg.bench)?;
    if let Some(p) = &a.out {
        table::write_text(Some(p), &r.sweep_csv())?;
    }
    if let Some(p) = &a.report {
        table::write_toml(p, &r)?;
    }
    println!(
        "t_sim {:.4e} s, t_NN {:.4e} s, n_in {}, n_out {}: S = {:.2}",
        r.t_sim.median, r.t_nn.median, r.n_in, r.n_out, r.speedup
    );
    for p in &r.sweep {
        println!("  batch {:>4}: t_NN {:.4e} s per window, S = {:.2}", p.batch, p.t_nn, p.speedup);
    }
    Ok(())
}
