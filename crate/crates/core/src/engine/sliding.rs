use log::warn;

use super::windows::window_input;
use super::{Sequence, SlideConfig};
use crate::error::{Error, Result};
use crate::nn::Network;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EvalMode {
    /// All windows in one forward pass.
    #[default]
    Batched,
    /// One forward pass per window.
    Sequential,
}

/// Concatenated predictions of consecutive windows.
#[derive(Clone, Debug, PartialEq)]
pub struct SlidingOutput {
    pub n_windows: usize,
    /// Sequence step of every predicted sample.
    pub steps: Vec<usize>,
    /// Window that produced every predicted sample.
    pub window: Vec<usize>,
    /// Unscaled outputs, one row of output channels per predicted sample.
    pub y: Vec<Vec<f64>>,
}

impl SlidingOutput {
    pub fn times(&self, h: f64) -> Vec<f64> {
        self.steps.iter().map(|&s| s as f64 * h).collect()
    }
}

/// Number of windows of stride `n_out` that fit into `len` samples, and the
/// number of tail samples left over.
pub fn window_count(config: &SlideConfig, len: usize) -> Result<(usize, usize)> {
    if len < config.n_in {
        return Err(Error::Window(format!("sequence of {len} samples is shorter than one window ({})", config.n_in)));
    }
    let extra = len - config.n_in;
    Ok((extra / config.n_out + 1, extra % config.n_out))
}

/// Window that predicts sequence step `s`, if any.
///
/// Window `j` reads inputs `[j·n_out, j·n_out + n_in)` and predicts the steps
/// `j·n_out + n_in − n_out + 1 ..= j·n_out + n_in`.
pub fn window_of_step(config: &SlideConfig, s: usize, n_windows: usize) -> Option<usize> {
    let first = config.n_in - config.n_out + 1;
    if s < first {
        return None;
    }
    let j = (s - first) / config.n_out;
    (j < n_windows).then_some(j)
}

/// Scaled inputs of every sliding window, row-major.
pub fn sliding_windows(config: &SlideConfig, seq: &Sequence) -> Result<(Vec<f64>, usize)> {
    config.validate()?;
    let (n_windows, tail) = window_count(config, seq.len())?;
    // The sample right after the last input span is still predicted.
    if tail > 1 {
        warn!("dropping {} trailing samples that do not fill a window", tail - 1);
    }
    let mut x = Vec::with_capacity(n_windows * config.input_width());
    for j in 0..n_windows {
        window_input(config, seq, j * config.n_out, &mut x)?;
    }
    Ok((x, n_windows))
}

fn check_network(net: &Network, config: &SlideConfig, n_out: usize) -> Result<()> {
    if net.n_in() != config.input_width() || net.n_out() != n_out {
        return Err(Error::Shape(format!(
            "network maps {}→{} but the windows need {}→{}",
            net.n_in(),
            net.n_out(),
            config.input_width(),
            n_out
        )));
    }
    Ok(())
}

pub(crate) fn evaluate(net: &Network, x: &[f64], n: usize, mode: EvalMode) -> Result<Vec<f64>> {
    match mode {
        EvalMode::Batched => net.predict(x, n),
        EvalMode::Sequential => {
            let w = net.n_in();
            let mut out = Vec::with_capacity(n * net.n_out());
            for row in x.chunks_exact(w) {
                out.extend(net.predict(row, 1)?);
            }
            Ok(out)
        }
    }
}

/// Slides the surrogate over `seq` with stride `n_out` and concatenates the
/// unscaled predictions. Tail samples that do not fill a window are dropped.
pub fn sliding_inference(net: &Network, config: &SlideConfig, seq: &Sequence, mode: EvalMode) -> Result<SlidingOutput> {
    check_network(net, config, config.output_width())?;
    let (x, n_windows) = sliding_windows(config, seq)?;
    let pred = evaluate(net, &x, n_windows, mode)?;
    Ok(assemble(config, &pred, n_windows))
}

pub(crate) fn assemble(config: &SlideConfig, pred: &[f64], n_windows: usize) -> SlidingOutput {
    let n_ch = config.outputs.len();
    let mut out = SlidingOutput {
        n_windows,
        steps: Vec::with_capacity(n_windows * config.n_out),
        window: Vec::with_capacity(n_windows * config.n_out),
        y: Vec::with_capacity(n_windows * config.n_out),
    };
    for j in 0..n_windows {
        let row = &pred[j * config.output_width()..(j + 1) * config.output_width()];
        for i in 0..config.n_out {
            out.steps.push(j * config.n_out + config.output_step(i));
            out.window.push(j);
            out.y.push(
                config
                    .outputs
                    .iter()
                    .enumerate()
                    .map(|(c, ch)| ch.unscale(row[i * n_ch + c]))
                    .collect(),
            );
        }
    }
    out
}

pub(crate) fn check_estimator(net: &Network, config: &SlideConfig) -> Result<()> {
    check_network(net, config, 1)
}
