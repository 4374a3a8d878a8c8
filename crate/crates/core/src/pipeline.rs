//! Trajectory and dataset generation driven by a [`RunConfig`].
//!
//! Trajectory `i` uses seed `base + i` for its drive and the second ChaCha
//! stream of the same seed for its initial state, so any subset of a dataset
//! can be regenerated on its own and in any order.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{simulate, DriveSignal, SimOptions, State, SystemModel, Trajectory};
use crate::engine::{build_estimator_dataset, build_windows, EstimatorData, Provenance, Sequence, WindowedDataset};
use crate::error::{Error, Result};
use crate::io::RunConfig;
use crate::linearization::{trajectory_mean_decay, DecayEstimate, LinearizeOptions};
use crate::models::model_by_name;
use crate::nn::Network;

pub struct Generator<'a> {
    cfg: &'a RunConfig,
    model: Box<dyn SystemModel>,
}

impl<'a> Generator<'a> {
    pub fn new(cfg: &'a RunConfig) -> Result<Self> {
        Ok(Generator { cfg, model: model_by_name(&cfg.system.name)? })
    }

    pub fn model(&self) -> &dyn SystemModel {
        self.model.as_ref()
    }

    pub fn seed(&self, index: u64) -> u64 {
        self.cfg.system.seed.wrapping_add(index)
    }

    /// Drive of trajectory `index` covering the startup phase and `steps` recorded steps.
    pub fn drive(&self, index: u64, steps: usize) -> Result<DriveSignal> {
        let s = &self.cfg.system;
        s.drive.generate(s.startup_steps + steps, s.h, self.seed(index))
    }

    pub fn initial_state(&self, drive: &DriveSignal) -> Result<State> {
        let s = &self.cfg.system;
        if s.initial_q.is_empty() {
            return self.model.initial_state_for(&drive.sample(0));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(drive.seed.unwrap_or(s.seed));
        rng.set_stream(1);
        let mut draw = |ranges: &[[f64; 2]]| -> Vec<f64> {
            ranges
                .iter()
                .map(|r| if r[0] == r[1] { r[0] } else { rng.random_range(r[0]..r[1]) })
                .collect()
        };
        let q = draw(&s.initial_q);
        let qdot = draw(&s.initial_qdot);
        Ok(State::new(q, qdot))
    }

    /// Simulates `drive` from its initial state and drops the startup phase.
    pub fn run(&self, drive: &DriveSignal) -> Result<Trajectory> {
        let s = &self.cfg.system;
        let n = drive.n_steps;
        let opts = SimOptions::new(s.h, n).with_substeps(s.substeps);
        let traj = simulate(self.model.as_ref(), &self.initial_state(drive)?, drive, &opts)?;
        Ok(if s.startup_steps > 0 { traj.skip(s.startup_steps) } else { traj })
    }

    pub fn trajectory(&self, index: u64) -> Result<Trajectory> {
        self.trajectory_with_steps(index, self.cfg.trajectory_steps()?)
    }

    pub fn trajectory_with_steps(&self, index: u64, steps: usize) -> Result<Trajectory> {
        self.run(&self.drive(index, steps)?)
    }

    pub fn sequences(&self, indices: Range<u64>) -> Result<Vec<Sequence>> {
        indices.map(|i| self.trajectory(i).map(|t| Sequence::from(&t))).collect()
    }

    pub fn windows(&self, indices: Range<u64>, decay: Option<&DecayEstimate>) -> Result<WindowedDataset> {
        let config = self.cfg.slide_config()?;
        let first = indices.start;
        let count = (indices.end - indices.start) as usize;
        let mut ds = build_windows(&self.sequences(indices)?, &config, decay)?;
        ds.provenance = Provenance {
            system: config.system.clone(),
            h: config.h,
            base_seed: Some(self.cfg.system.seed),
            first_index: first,
            n_sequences: count,
        };
        Ok(ds)
    }

    /// Trajectories `[0, n_train)` for training, the next `n_val` for validation.
    pub fn train_val(&self, decay: Option<&DecayEstimate>) -> Result<(WindowedDataset, WindowedDataset)> {
        let t = &self.cfg.training;
        let n_train = t.n_train as u64;
        let train = self.windows(0..n_train, decay)?;
        let val = self.windows(n_train..n_train + t.n_val as u64, decay)?;
        Ok((train, val))
    }

    /// Estimator training data reuses the surrogate's training trajectories
    /// (scaled by every multiplier); its validation trajectories follow the
    /// surrogate's validation range and are seen by neither network.
    pub fn estimator_data(&self, surrogate: &Network) -> Result<(EstimatorData, EstimatorData)> {
        let e = self.cfg.estimator()?;
        let config = self.cfg.slide_config()?;
        let steps = self.cfg.trajectory_steps()?;
        let n_train = e.n_train.unwrap_or(self.cfg.training.n_train) as u64;
        let n_val = e.n_val.unwrap_or(self.cfg.training.n_val) as u64;
        let held_out = (self.cfg.training.n_train + self.cfg.training.n_val) as u64;
        let build = |range: Range<u64>| -> Result<EstimatorData> {
            let drives = range.map(|i| self.drive(i, steps)).collect::<Result<Vec<_>>>()?;
            build_estimator_dataset(surrogate, &config, &e.error_map(), &drives, &e.multipliers, |d| {
                self.run(d).map(|t| Sequence::from(&t))
            })
        };
        Ok((build(0..n_train)?, build(held_out..held_out + n_val)?))
    }

    /// Mean decay over the configured number of trajectories.
    pub fn decay(&self) -> Result<DecayEstimate> {
        let l = &self.cfg.linearization;
        let opts = LinearizeOptions::default();
        let mut samples = Vec::new();
        for i in 0..l.n_trajectories as u64 {
            let traj = self.trajectory(i)?;
            samples.extend(trajectory_mean_decay(self.model(), &traj, l.a_rel, l.stride, &opts)?.samples);
        }
        if samples.is_empty() {
            return Err(Error::NoDampedMode);
        }
        let mean_re = samples.iter().map(|s| s.eigenvalue.re).sum::<f64>() / samples.len() as f64;
        let t_d_mean = crate::linearization::decay_time(num_complex::Complex64::new(mean_re, 0.0), l.a_rel)?;
        let t_d_max = samples.iter().map(|s| s.t_d).fold(f64::NEG_INFINITY, f64::max);
        Ok(DecayEstimate { a_rel: l.a_rel, mean_re, t_d_mean, t_d_max, samples })
    }
}
