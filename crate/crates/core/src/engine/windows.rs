use serde::{Deserialize, Serialize};

use super::{Channel, SlideConfig, Source};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::linearization::DecayEstimate;
use crate::nn::Dataset;

/// Sampled signals a window can read from. Only the drive is mandatory; state
/// and output samples are needed only by configs that use them.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sequence {
    pub h: f64,
    pub u: Vec<Vec<f64>>,
    pub q: Option<Vec<Vec<f64>>>,
    pub qdot: Option<Vec<Vec<f64>>>,
    pub y: Option<Vec<Vec<f64>>>,
}

impl Sequence {
    pub fn from_drive(u: Vec<Vec<f64>>, h: f64) -> Self {
        Sequence { h, u, ..Default::default() }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// First `len` samples of every signal.
    pub fn truncated(&self, len: usize) -> Sequence {
        let cut = |v: &Vec<Vec<f64>>| v[..len.min(v.len())].to_vec();
        Sequence {
            h: self.h,
            u: cut(&self.u),
            q: self.q.as_ref().map(cut),
            qdot: self.qdot.as_ref().map(cut),
            y: self.y.as_ref().map(cut),
        }
    }

    fn rows(&self, source: Source) -> Option<&[Vec<f64>]> {
        match source {
            Source::Drive | Source::Director => Some(&self.u),
            Source::Q => self.q.as_deref(),
            Source::Qdot => self.qdot.as_deref(),
            Source::Output => self.y.as_deref(),
        }
    }

    /// Appends the scaled value(s) of `c` at `step`.
    fn push_scaled(&self, c: &Channel, step: usize, out: &mut Vec<f64>) -> Result<()> {
        let rows = self
            .rows(c.source)
            .ok_or_else(|| Error::Window(format!("sequence has no {:?} samples", c.source)))?;
        let row = rows
            .get(step)
            .ok_or_else(|| Error::Window(format!("step {step} is past the end of the sequence ({} samples)", rows.len())))?;
        let raw = *row
            .get(c.index)
            .ok_or_else(|| Error::Window(format!("{:?} channel {} does not exist", c.source, c.index)))?;
        if c.source == Source::Director {
            out.push(c.scale(raw.cos()));
            out.push(c.scale(raw.sin()));
        } else {
            out.push(c.scale(raw));
        }
        Ok(())
    }
}

impl From<&Trajectory> for Sequence {
    fn from(t: &Trajectory) -> Self {
        Sequence {
            h: t.h,
            u: t.u.clone(),
            q: Some(t.q.clone()),
            qdot: Some(t.qdot.clone()),
            y: Some(t.y.clone()),
        }
    }
}

/// Scaled network input of the window starting at `start`.
pub fn window_input(config: &SlideConfig, seq: &Sequence, start: usize, out: &mut Vec<f64>) -> Result<()> {
    for c in &config.initial {
        seq.push_scaled(c, start, out)?;
    }
    for i in start..start + config.n_in {
        for c in &config.inputs {
            seq.push_scaled(c, i, out)?;
        }
    }
    Ok(())
}

/// Scaled target of the window starting at `start`.
pub fn window_target(config: &SlideConfig, seq: &Sequence, start: usize, out: &mut Vec<f64>) -> Result<()> {
    for j in 0..config.n_out {
        for c in &config.outputs {
            seq.push_scaled(c, start + config.output_step(j), out)?;
        }
    }
    Ok(())
}

/// Where a dataset came from: sequence `i` was generated with seed
/// `base_seed + first_index + i`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub system: String,
    pub h: f64,
    #[serde(default)]
    pub base_seed: Option<u64>,
    #[serde(default)]
    pub first_index: u64,
    #[serde(default)]
    pub n_sequences: usize,
}

/// Scaled input/target pairs together with the config that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowedDataset {
    pub config: SlideConfig,
    pub data: Dataset<f64>,
    pub provenance: Provenance,
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Fraction of scaled inputs inside `[−1.5, 1.5]`.
    pub fn inputs_in_unit_range(&self) -> f64 {
        if self.data.x.is_empty() {
            return 1.0;
        }
        self.data.x.iter().filter(|v| v.abs() <= 1.5).count() as f64 / self.data.x.len() as f64
    }

    pub fn split(&self, n_first: usize) -> Result<(WindowedDataset, WindowedDataset)> {
        if n_first > self.len() {
            return Err(Error::Window(format!("cannot split {} samples at {n_first}", self.len())));
        }
        let part = |r: std::ops::Range<usize>| WindowedDataset {
            config: self.config.clone(),
            data: self.data.slice(r),
            provenance: self.provenance.clone(),
        };
        Ok((part(0..n_first), part(n_first..self.len())))
    }
}

/// Start steps of the windows cut from a sequence of `len` samples.
fn window_starts(config: &SlideConfig, len: usize) -> Vec<usize> {
    let need = config.n_in + 1;
    if len < need {
        return Vec::new();
    }
    match config.dataset_stride {
        None => vec![0],
        Some(stride) => (0..=len - need).step_by(stride).collect(),
    }
}

/// Cuts training windows from whole sequences.
///
/// With a decay estimate attached, configs without initial conditions must
/// truncate at least the mean decay time.
pub fn build_windows(sequences: &[Sequence], config: &SlideConfig, decay: Option<&DecayEstimate>) -> Result<WindowedDataset> {
    config.validate()?;
    if let Some(d) = decay {
        if config.initial.is_empty() && config.truncation_time() < d.t_d_mean {
            return Err(Error::Window(format!(
                "truncation {:.4} s is shorter than the decay time {:.4} s",
                config.truncation_time(),
                d.t_d_mean
            )));
        }
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (k, seq) in sequences.iter().enumerate() {
        if (seq.h - config.h).abs() > 1e-12 * config.h {
            return Err(Error::Window(format!("sequence {k} has step {} but the config uses {}", seq.h, config.h)));
        }
        let starts = window_starts(config, seq.len());
        if starts.is_empty() {
            return Err(Error::Window(format!(
                "sequence {k} has {} samples, a window needs {}",
                seq.len(),
                config.n_in + 1
            )));
        }
        for s in starts {
            window_input(config, seq, s, &mut x)?;
            window_target(config, seq, s, &mut y)?;
        }
    }
    Ok(WindowedDataset {
        config: config.clone(),
        data: Dataset::new(config.input_width(), config.output_width(), x, y)?,
        provenance: Provenance {
            system: config.system.clone(),
            h: config.h,
            n_sequences: sequences.len(),
            ..Default::default()
        },
    })
}
