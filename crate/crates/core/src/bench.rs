//! Wall-clock comparison of simulation and surrogate inference.
//!
//! `S = (t_sim / t_NN)·(n_out / n_in)`: the simulation covers an `n_in`-step
//! horizon while one forward pass yields `n_out` new steps.

use std::hint::black_box;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dynamics::{simulate, SimOptions};
use crate::engine::{window_input, Sequence, SlideConfig};
use crate::error::{Error, Result};
use crate::io::BenchSection;
use crate::nn::{Mlp, Network, Scalar, Workspace};
use crate::pipeline::Generator;

/// Each repetition repeats the timed operation until it has run this long.
const MIN_REPETITION: Duration = Duration::from_millis(2);

pub fn speedup(t_sim: f64, t_nn: f64, n_in: usize, n_out: usize) -> f64 {
    (t_sim / t_nn) * (n_out as f64 / n_in as f64)
}

/// Seconds per call over the repetitions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub median: f64,
    pub mean: f64,
    pub std: f64,
    pub repetitions: usize,
    /// Calls averaged inside one repetition.
    pub inner: usize,
}

impl Timing {
    fn from_samples(mut s: Vec<f64>, inner: usize) -> Self {
        let n = s.len() as f64;
        let mean = s.iter().sum::<f64>() / n;
        let std = (s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
        s.sort_by(f64::total_cmp);
        let k = s.len() / 2;
        let median = if s.len() % 2 == 1 { s[k] } else { 0.5 * (s[k - 1] + s[k]) };
        Timing { median, mean, std, repetitions: s.len(), inner }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchPoint {
    pub batch: usize,
    /// One forward pass over `batch` windows.
    pub t_batch: Timing,
    /// `t_batch.median / batch`.
    pub t_nn: f64,
    pub speedup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub system: String,
    pub n_in: usize,
    pub n_out: usize,
    pub t_sim: Timing,
    /// Forward pass over a single window.
    pub t_nn: Timing,
    pub speedup: f64,
    pub sweep: Vec<BatchPoint>,
}

impl BenchReport {
    /// Speedup from the stored medians.
    pub fn recomputed_speedup(&self) -> f64 {
        speedup(self.t_sim.median, self.t_nn.median, self.n_in, self.n_out)
    }

    pub fn sweep_csv(&self) -> String {
        let mut s = String::from("batch,t_batch_median,t_batch_mean,t_batch_std,t_nn,speedup\n");
        for p in &self.sweep {
            s += &format!(
                "{},{:e},{:e},{:e},{:e},{:e}\n",
                p.batch, p.t_batch.median, p.t_batch.mean, p.t_batch.std, p.t_nn, p.speedup
            );
        }
        s
    }
}

/// Untimed calls, then the number of calls that lasts at least [`MIN_REPETITION`].
fn calibrate(f: &mut impl FnMut() -> Result<()>, warmup: usize) -> Result<usize> {
    for _ in 0..warmup {
        f()?;
    }
    let start = Instant::now();
    f()?;
    let once = start.elapsed().max(Duration::from_nanos(1));
    Ok((MIN_REPETITION.as_nanos() / once.as_nanos()).clamp(1, 1_000_000) as usize)
}

/// Seconds per call over `inner` calls.
fn sample(f: &mut impl FnMut() -> Result<()>, inner: usize) -> Result<f64> {
    let start = Instant::now();
    for _ in 0..inner {
        f()?;
    }
    Ok(start.elapsed().as_secs_f64() / inner as f64)
}

/// Times `f` after `warmup` untimed calls; every repetition runs `f` often
/// enough to last at least [`MIN_REPETITION`].
pub fn time_repeated(mut f: impl FnMut() -> Result<()>, warmup: usize, repetitions: usize) -> Result<Timing> {
    let inner = calibrate(&mut f, warmup)?;
    let samples = (0..repetitions).map(|_| sample(&mut f, inner)).collect::<Result<Vec<_>>>()?;
    Ok(Timing::from_samples(samples, inner))
}

/// Times `f` and `g` like [`time_repeated`] with their repetitions
/// alternating, so a slow spell of the machine lands on both.
pub fn time_paired(
    mut f: impl FnMut() -> Result<()>,
    mut g: impl FnMut() -> Result<()>,
    warmup: usize,
    repetitions: usize,
) -> Result<(Timing, Timing)> {
    let (inner_f, inner_g) = (calibrate(&mut f, warmup)?, calibrate(&mut g, warmup)?);
    let (mut sf, mut sg) = (Vec::with_capacity(repetitions), Vec::with_capacity(repetitions));
    for _ in 0..repetitions {
        sf.push(sample(&mut f, inner_f)?);
        sg.push(sample(&mut g, inner_g)?);
    }
    Ok((Timing::from_samples(sf, inner_f), Timing::from_samples(sg, inner_g)))
}

/// Forward passes of `batch` copies of `window`.
fn forward_call<'a, T: Scalar>(net: &'a Mlp<T>, window: &[f64], batch: usize) -> impl FnMut() -> Result<()> + 'a {
    let x: Vec<T> = window.iter().cycle().take(window.len() * batch).map(|&v| T::of(v)).collect();
    let mut ws = Workspace::new();
    move || {
        black_box(net.forward(black_box(&x), batch, &mut ws)?);
        Ok(())
    }
}

/// Simulation of one `n_in`-step horizon against surrogate forward passes
/// at every batch size of `bench`.
pub fn bench_speedup(
    network: &Network,
    generator: &Generator<'_>,
    config: &SlideConfig,
    bench: &BenchSection,
) -> Result<BenchReport> {
    if network.n_in() != config.input_width() || network.n_out() != config.output_width() {
        return Err(Error::Shape(format!(
            "network maps {}→{} but the window configuration needs {}→{}",
            network.n_in(),
            network.n_out(),
            config.input_width(),
            config.output_width()
        )));
    }
    let model = generator.model();
    let drive = generator.drive(0, config.n_in)?;
    let initial = generator.initial_state(&drive)?;
    let opts = SimOptions::new(config.h, config.n_in);
    let sim = || {
        black_box(simulate(model, &initial, &drive, &opts)?);
        Ok(())
    };

    let traj = generator.run(&drive)?;
    let mut window = Vec::new();
    window_input(config, &Sequence::from(&traj), 0, &mut window)?;

    let (warmup, reps) = (bench.warmup, bench.repetitions);
    let (t_sim, t_nn) = match network {
        Network::F32(n) => time_paired(sim, forward_call(n, &window, 1), warmup, reps)?,
        Network::F64(n) => time_paired(sim, forward_call(n, &window, 1), warmup, reps)?,
    };
    let time = |batch: usize| match network {
        Network::F32(n) => time_repeated(forward_call(n, &window, batch), warmup, reps),
        Network::F64(n) => time_repeated(forward_call(n, &window, batch), warmup, reps),
    };
    let sweep = bench
        .batch_sizes
        .iter()
        .map(|&batch| {
            let t_batch = time(batch)?;
            let per_window = t_batch.median / batch as f64;
            Ok(BatchPoint {
                batch,
                speedup: speedup(t_sim.median, per_window, config.n_in, config.n_out),
                t_nn: per_window,
                t_batch,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchReport {
        system: config.system.clone(),
        n_in: config.n_in,
        n_out: config.n_out,
        speedup: speedup(t_sim.median, t_nn.median, config.n_in, config.n_out),
        t_sim,
        t_nn,
        sweep,
    })
}
