use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a channel's raw value comes from at a given step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Drive channel `index`.
    Drive,
    /// Drive channel `index` read as an angle and encoded as `(cos, sin)`.
    Director,
    Q,
    Qdot,
    /// System output channel `index`.
    Output,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Drive => "drive",
            Source::Director => "director",
            Source::Q => "q",
            Source::Qdot => "qdot",
            Source::Output => "output",
        }
    }
}

/// One scalar (two for directors) per step, stored as `gain·raw + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Channel {
    pub source: Source,
    #[serde(default)]
    pub index: usize,
    #[serde(default = "one")]
    pub gain: f64,
    #[serde(default)]
    pub offset: f64,
}

fn one() -> f64 {
    1.0
}

impl Channel {
    pub fn new(source: Source, index: usize, gain: f64) -> Self {
        Channel { source, index, gain, offset: 0.0 }
    }

    /// Column name such as `q0` or `drive1`.
    pub fn name(&self) -> String {
        format!("{}{}", self.source.as_str(), self.index)
    }

    pub fn width(&self) -> usize {
        match self.source {
            Source::Director => 2,
            _ => 1,
        }
    }

    #[inline]
    pub fn scale(&self, raw: f64) -> f64 {
        self.gain * raw + self.offset
    }

    #[inline]
    pub fn unscale(&self, scaled: f64) -> f64 {
        (scaled - self.offset) / self.gain
    }
}

/// Window geometry and channel layout shared by a surrogate, its error
/// estimator and the datasets they are trained on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlideConfig {
    pub system: String,
    pub h: f64,
    pub n_in: usize,
    pub n_out: usize,
    /// Channels forming `r_i` at every input step.
    pub inputs: Vec<Channel>,
    /// Channels forming `y_i` at every output step.
    pub outputs: Vec<Channel>,
    /// State values at the window start, placed before the first input step.
    #[serde(default)]
    pub initial: Vec<Channel>,
    /// Offset between windows cut from one training trajectory; `None` cuts a
    /// single window at the start.
    #[serde(default)]
    pub dataset_stride: Option<usize>,
}

impl SlideConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::config("windows.h", "time step must be positive"));
        }
        if self.n_out == 0 || self.n_out > self.n_in {
            return Err(Error::config(
                "windows.n_out",
                format!("need 1 ≤ n_out ≤ n_in, got n_in = {}, n_out = {}", self.n_in, self.n_out),
            ));
        }
        if self.inputs.is_empty() && self.initial.is_empty() {
            return Err(Error::config("windows.inputs", "no input channels"));
        }
        if self.outputs.is_empty() {
            return Err(Error::config("windows.outputs", "no output channels"));
        }
        for c in self.inputs.iter().chain(&self.outputs).chain(&self.initial) {
            if !(c.gain.is_finite() && c.gain != 0.0 && c.offset.is_finite()) {
                return Err(Error::config("windows", format!("channel {c:?} needs a finite nonzero gain")));
            }
        }
        if self.outputs.iter().any(|c| c.source == Source::Director) {
            return Err(Error::config("windows.outputs", "director encoding is for inputs only"));
        }
        if self.initial.iter().any(|c| !matches!(c.source, Source::Q | Source::Qdot)) {
            return Err(Error::config("windows.initial", "initial conditions must be q or qdot channels"));
        }
        if self.dataset_stride == Some(0) {
            return Err(Error::config("windows.dataset_stride", "stride must be positive"));
        }
        Ok(())
    }

    /// Values per input step.
    pub fn step_width(&self) -> usize {
        self.inputs.iter().map(Channel::width).sum()
    }

    pub fn initial_width(&self) -> usize {
        self.initial.len()
    }

    /// Width of the network input vector.
    pub fn input_width(&self) -> usize {
        self.initial_width() + self.n_in * self.step_width()
    }

    /// Width of the network output vector.
    pub fn output_width(&self) -> usize {
        self.n_out * self.outputs.len()
    }

    /// Steps between the window start and the first predicted output.
    pub fn truncation_steps(&self) -> usize {
        self.n_in - self.n_out
    }

    pub fn truncation_time(&self) -> f64 {
        self.truncation_steps() as f64 * self.h
    }

    /// Offset of output `j` (0-based) from the window start; the last output
    /// lands one step after the last input.
    pub fn output_step(&self, j: usize) -> usize {
        self.n_in - self.n_out + 1 + j
    }

    /// Affine map of every network input column.
    pub fn input_scaling(&self) -> Vec<Channel> {
        let mut cols: Vec<Channel> = self.initial.clone();
        for _ in 0..self.n_in {
            for c in &self.inputs {
                cols.extend(std::iter::repeat_n(*c, c.width()));
            }
        }
        cols
    }

    /// Affine map of every network output column.
    pub fn output_scaling(&self) -> Vec<Channel> {
        (0..self.n_out).flat_map(|_| self.outputs.iter().copied()).collect()
    }

    /// Window and surrogate configs agree on everything the networks see.
    pub fn compatible_with(&self, other: &SlideConfig) -> bool {
        self.system == other.system
            && self.h == other.h
            && self.n_in == other.n_in
            && self.n_out == other.n_out
            && self.inputs == other.inputs
            && self.initial == other.initial
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spring_damper() -> SlideConfig {
        SlideConfig {
            system: "linear_oscillator".into(),
            h: 1.0 / 64.0,
            n_in: 64,
            n_out: 64,
            inputs: vec![Channel::new(Source::Drive, 0, 5e-4)],
            outputs: vec![Channel::new(Source::Output, 0, 1.0)],
            initial: vec![Channel::new(Source::Q, 0, 1.0), Channel::new(Source::Qdot, 0, 1.0)],
            dataset_stride: None,
        }
    }

    #[test]
    fn widths() {
        let sd = spring_damper();
        sd.validate().unwrap();
        assert_eq!(sd.input_width(), 66);
        assert_eq!(sd.output_width(), 64);
        assert_eq!(sd.output_step(0), 1);
        assert_eq!(sd.output_step(63), 64);

        let sc = SlideConfig {
            system: "slider_crank_lumped".into(),
            h: 1.0 / 32.0,
            n_in: 128,
            n_out: 32,
            inputs: vec![Channel::new(Source::Director, 0, 1.0)],
            outputs: vec![Channel::new(Source::Output, 1, 1e3)],
            initial: vec![],
            dataset_stride: None,
        };
        sc.validate().unwrap();
        assert_eq!(sc.input_width(), 256);
        assert_eq!(sc.output_width(), 32);
        assert_eq!(sc.input_scaling().len(), 256);
        assert_eq!(sc.truncation_time(), 3.0);
    }

    #[test]
    fn invalid_geometry() {
        let mut c = spring_damper();
        c.n_out = 65;
        assert!(matches!(c.validate(), Err(Error::Config { .. })));
        c.n_out = 0;
        assert!(c.validate().is_err());
        let mut c = spring_damper();
        c.inputs[0].gain = 0.0;
        assert!(c.validate().is_err());
        let mut c = spring_damper();
        c.initial[0].source = Source::Drive;
        assert!(c.validate().is_err());
    }

    #[test]
    fn scaling_round_trip() {
        let c = Channel { source: Source::Drive, index: 0, gain: 1e-3, offset: 0.25 };
        for raw in [-1234.5, 0.0, 1e-9, 987.25] {
            let back = c.unscale(c.scale(raw));
            assert!((back - raw).abs() <= 1e-12 * raw.abs().max(1.0));
        }
    }
}
