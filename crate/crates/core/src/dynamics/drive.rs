use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What generated a drive signal, together with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DriveKind {
    Constant,
    Samples,
    RandomStepForce { min: f64, max: f64 },
    PiecewiseConstantAcceleration {
        omega_max: f64,
        alpha_max: f64,
        phase_min: usize,
        phase_max: usize,
        p_zero: f64,
    },
    PointToPoint,
}

/// Velocity and acceleration bounds of a constant-acceleration angle trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccelLimits {
    pub omega_max: f64,
    pub alpha_max: f64,
}

impl Default for AccelLimits {
    fn default() -> Self {
        AccelLimits {
            omega_max: 8.0,
            alpha_max: 20.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Profile {
    /// Per grid step and channel: value, rate and acceleration at the step start.
    Pieces { coeffs: Vec<[f64; 3]> },
    /// Constant-acceleration point-to-point motion between waypoints.
    Ptp {
        waypoints: Vec<Vec<f64>>,
        times: Vec<f64>,
    },
}

/// Time-dependent reference/excitation applied to a model.
///
/// Values between grid points follow the generating profile exactly: step
/// forces are held constant over each step, acceleration profiles are
/// piecewise quadratic in the angle.
#[derive(Clone, Debug, PartialEq)]
pub struct DriveSignal {
    pub kind: DriveKind,
    pub h: f64,
    pub n_steps: usize,
    pub seed: Option<u64>,
    n_channels: usize,
    profile: Profile,
}

impl DriveSignal {
    /// Signal holding `values` for all time.
    pub fn constant(values: &[f64], h: f64, n_steps: usize) -> Self {
        let coeffs = (0..n_steps.max(1))
            .flat_map(|_| values.iter().map(|&v| [v, 0.0, 0.0]))
            .collect();
        DriveSignal {
            kind: DriveKind::Constant,
            h,
            n_steps: n_steps.max(1),
            seed: None,
            n_channels: values.len(),
            profile: Profile::Pieces { coeffs },
        }
    }

    /// Sample-and-hold signal from per-step values (`samples[i]` acts on `[i h, (i+1) h)`).
    pub fn from_samples(samples: &[Vec<f64>], h: f64) -> Result<Self> {
        let n_channels = samples.first().map(Vec::len).unwrap_or(0);
        if samples.iter().any(|s| s.len() != n_channels) {
            return Err(Error::Shape("drive samples have inconsistent widths".into()));
        }
        let coeffs = samples
            .iter()
            .flat_map(|s| s.iter().map(|&v| [v, 0.0, 0.0]))
            .collect();
        Ok(DriveSignal {
            kind: DriveKind::Samples,
            h,
            n_steps: samples.len(),
            seed: None,
            n_channels,
            profile: Profile::Pieces { coeffs },
        })
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn value(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n_channels];
        self.value_into(t, &mut out);
        out
    }

    pub fn value_into(&self, t: f64, out: &mut [f64]) {
        let k = if t <= 0.0 {
            0
        } else {
            // Guard against t = k·h landing just below the grid point.
            (t / self.h + 1e-9).floor() as usize
        };
        let k = k.min(self.n_steps - 1);
        let tau = (t - k as f64 * self.h).max(0.0);
        self.value_in_step(k, tau, out);
    }

    /// Value at local time `tau ∈ [0, h]` inside grid step `k`.
    ///
    /// Integrators use this form so that the end point of a step still sees
    /// that step's piece (left limit), which keeps held inputs causal.
    pub fn value_in_step(&self, k: usize, tau: f64, out: &mut [f64]) {
        match &self.profile {
            Profile::Pieces { coeffs } => {
                let (k, tau) = if k >= self.n_steps {
                    (self.n_steps - 1, tau + (k + 1 - self.n_steps) as f64 * self.h)
                } else {
                    (k, tau)
                };
                let row = &coeffs[k * self.n_channels..(k + 1) * self.n_channels];
                for (o, c) in out.iter_mut().zip(row) {
                    *o = c[0] + c[1] * tau + 0.5 * c[2] * tau * tau;
                }
            }
            Profile::Ptp { waypoints, times } => {
                ptp_eval(waypoints, times, k as f64 * self.h + tau, out)
            }
        }
    }

    /// Value at grid point `i`.
    pub fn sample(&self, i: usize) -> Vec<f64> {
        self.value(i as f64 * self.h)
    }

    pub fn samples(&self) -> Vec<Vec<f64>> {
        (0..self.n_steps).map(|i| self.sample(i)).collect()
    }

    /// Same signal with every channel multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> DriveSignal {
        let profile = match &self.profile {
            Profile::Pieces { coeffs } => Profile::Pieces {
                coeffs: coeffs
                    .iter()
                    .map(|c| [c[0] * factor, c[1] * factor, c[2] * factor])
                    .collect(),
            },
            Profile::Ptp { waypoints, times } => Profile::Ptp {
                waypoints: waypoints
                    .iter()
                    .map(|w| w.iter().map(|v| v * factor).collect())
                    .collect(),
                times: times.clone(),
            },
        };
        DriveSignal {
            profile,
            ..self.clone()
        }
    }

    /// Concatenates `self` for steps `[0, split)` with `other` from step `split` on.
    pub fn spliced(&self, split: usize, other: &DriveSignal) -> Result<DriveSignal> {
        if self.n_channels != other.n_channels || self.h != other.h {
            return Err(Error::Shape("spliced drive signals differ in layout".into()));
        }
        let n = self.n_steps.max(other.n_steps);
        let samples: Vec<Vec<f64>> = (0..n)
            .map(|i| if i < split { self.sample(i) } else { other.sample(i) })
            .collect();
        let mut out = DriveSignal::from_samples(&samples, self.h)?;
        out.seed = self.seed;
        Ok(out)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random force, uniform in `[min, max]` per step and held over each step.
pub fn gen_random_step_force(bounds: (f64, f64), n_steps: usize, h: f64, seed: u64) -> Result<DriveSignal> {
    let (min, max) = bounds;
    if !(min <= max) || !min.is_finite() || !max.is_finite() {
        return Err(Error::config("bounds", format!("invalid force bounds [{min}, {max}]")));
    }
    let mut rng = rng(seed);
    let coeffs = (0..n_steps.max(1))
        .map(|_| {
            let u: f64 = rng.random();
            [min + (max - min) * u, 0.0, 0.0]
        })
        .collect();
    Ok(DriveSignal {
        kind: DriveKind::RandomStepForce { min, max },
        h,
        n_steps: n_steps.max(1),
        seed: Some(seed),
        n_channels: 1,
        profile: Profile::Pieces { coeffs },
    })
}

/// Angle reference with piecewise-constant angular acceleration.
///
/// Channels are `(φ_des, ω_des)`. Each phase lasts a uniformly drawn number of
/// steps in `phase_len` (inclusive) and, with probability `p_zero`, has zero
/// acceleration; otherwise the acceleration is uniform in `±alpha_max`. When a
/// step would push `|ω|` past `omega_max`, that step's acceleration is reduced
/// to land exactly on the limit and the rest of the phase coasts. The motion
/// starts at rest at an angle uniform in `[−π, π]`.
pub fn gen_accel_trajectory(
    limits: AccelLimits,
    phase_len: (usize, usize),
    p_zero: f64,
    n_steps: usize,
    h: f64,
    seed: u64,
) -> Result<DriveSignal> {
    if !(limits.omega_max > 0.0 && limits.alpha_max > 0.0) {
        return Err(Error::config("limits", "velocity and acceleration limits must be positive"));
    }
    if phase_len.0 == 0 || phase_len.0 > phase_len.1 {
        return Err(Error::config("phase_len", "phase length range must be non-empty and positive"));
    }
    if !(0.0..=1.0).contains(&p_zero) {
        return Err(Error::config("p_zero", "probability must lie in [0, 1]"));
    }
    let mut rng = rng(seed);
    let mut phi = rng.random_range(-PI..=PI);
    let mut omega = 0.0;
    let n_steps = n_steps.max(1);
    let mut coeffs = Vec::with_capacity(2 * n_steps);

    let mut remaining = 0usize;
    let mut accel = 0.0;
    while coeffs.len() < 2 * n_steps {
        if remaining == 0 {
            remaining = rng.random_range(phase_len.0..=phase_len.1);
            let zero = rng.random::<f64>() < p_zero;
            let a = rng.random_range(-limits.alpha_max..=limits.alpha_max);
            accel = if zero { 0.0 } else { a };
        }
        let mut a = accel;
        let next = omega + a * h;
        if next.abs() > limits.omega_max {
            a = (limits.omega_max.copysign(next) - omega) / h;
            accel = 0.0;
        }
        coeffs.push([phi, omega, a]);
        coeffs.push([omega, a, 0.0]);
        phi += omega * h + 0.5 * a * h * h;
        omega += a * h;
        remaining -= 1;
    }
    Ok(DriveSignal {
        kind: DriveKind::PiecewiseConstantAcceleration {
            omega_max: limits.omega_max,
            alpha_max: limits.alpha_max,
            phase_min: phase_len.0,
            phase_max: phase_len.1,
            p_zero,
        },
        h,
        n_steps,
        seed: Some(seed),
        n_channels: 2,
        profile: Profile::Pieces { coeffs },
    })
}

/// Point-to-point motion through `waypoints` with constant acceleration on the
/// first half of each segment and constant deceleration on the second half.
///
/// Channels are the joint angles followed by the joint velocities.
pub fn gen_ptp(waypoints: &[Vec<f64>], segment_times: &[f64], h: f64, n_steps: usize) -> Result<DriveSignal> {
    if waypoints.len() != segment_times.len() + 1 {
        return Err(Error::config(
            "waypoints",
            format!(
                "{} waypoints need {} segment times, got {}",
                waypoints.len(),
                waypoints.len().saturating_sub(1),
                segment_times.len()
            ),
        ));
    }
    let n_joints = waypoints[0].len();
    if waypoints.iter().any(|w| w.len() != n_joints) {
        return Err(Error::config("waypoints", "waypoints differ in joint count"));
    }
    if segment_times.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::config("segment_times", "segment times must be positive"));
    }
    Ok(DriveSignal {
        kind: DriveKind::PointToPoint,
        h,
        n_steps: n_steps.max(1),
        seed: None,
        n_channels: 2 * n_joints,
        profile: Profile::Ptp {
            waypoints: waypoints.to_vec(),
            times: segment_times.to_vec(),
        },
    })
}

fn ptp_eval(waypoints: &[Vec<f64>], times: &[f64], t: f64, out: &mut [f64]) {
    let n = waypoints[0].len();
    let mut start = 0.0;
    for (seg, &dur) in times.iter().enumerate() {
        if t < start + dur {
            let tau = (t - start).max(0.0);
            for j in 0..n {
                let q0 = waypoints[seg][j];
                let delta = waypoints[seg + 1][j] - q0;
                let a = 4.0 * delta / (dur * dur);
                let half = 0.5 * dur;
                if tau <= half {
                    out[j] = q0 + 0.5 * a * tau * tau;
                    out[n + j] = a * tau;
                } else {
                    let r = dur - tau;
                    out[j] = q0 + delta - 0.5 * a * r * r;
                    out[n + j] = a * r;
                }
            }
            return;
        }
        start += dur;
    }
    let last = waypoints.last().unwrap();
    out[..n].copy_from_slice(last);
    out[n..].iter_mut().for_each(|v| *v = 0.0);
}
