use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};

/// Positions and velocities at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
}

impl State {
    pub fn new(q: Vec<f64>, qdot: Vec<f64>) -> Self {
        assert_eq!(q.len(), qdot.len());
        State { q, qdot }
    }

    pub fn at_rest(q: Vec<f64>) -> Self {
        let n = q.len();
        State { q, qdot: vec![0.0; n] }
    }
}

/// Samples of a simulation on the fixed grid `t_i = i·h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub system: String,
    pub seed: Option<u64>,
    pub h: f64,
    pub t: Vec<f64>,
    pub q: Vec<Vec<f64>>,
    pub qdot: Vec<Vec<f64>>,
    /// Drive (reference) channels sampled at the grid points.
    pub u: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn state(&self, i: usize) -> State {
        State::new(self.q[i].clone(), self.qdot[i].clone())
    }

    /// Drops the first `n` samples and shifts the time axis so the new first
    /// sample sits at `t = 0`.
    pub fn skip(&self, n: usize) -> Trajectory {
        let n = n.min(self.len());
        let t0 = self.t.get(n).copied().unwrap_or(0.0);
        Trajectory {
            system: self.system.clone(),
            seed: self.seed,
            h: self.h,
            t: self.t[n..].iter().map(|t| t - t0).collect(),
            q: self.q[n..].to_vec(),
            qdot: self.qdot[n..].to_vec(),
            u: self.u[n..].to_vec(),
            y: self.y[n..].to_vec(),
        }
    }

    pub fn output_channel(&self, c: usize) -> Vec<f64> {
        self.y.iter().map(|y| y[c]).collect()
    }

    /// CSV with header `t,q...,qdot...,u...,y...`. Numbers use the shortest
    /// decimal representation that parses back to the same binary64 value.
    pub fn to_csv(&self, names: &TrajectoryColumns) -> String {
        let mut out = String::new();
        let mut header = vec!["t".to_string()];
        header.extend(names.q.iter().cloned());
        header.extend(names.q.iter().map(|n| format!("{n}_dot")));
        header.extend(names.u.iter().cloned());
        header.extend(names.y.iter().cloned());
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.len() {
            let _ = write!(out, "{}", self.t[i]);
            for v in self.q[i].iter().chain(&self.qdot[i]).chain(&self.u[i]).chain(&self.y[i]) {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, names: &TrajectoryColumns, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_csv(names).as_bytes()).map_err(Error::from)
    }
}

/// Column names used by [`Trajectory::to_csv`].
#[derive(Clone, Debug)]
pub struct TrajectoryColumns {
    pub q: Vec<String>,
    pub u: Vec<String>,
    pub y: Vec<String>,
}

impl TrajectoryColumns {
    pub fn of(model: &dyn super::SystemModel) -> Self {
        TrajectoryColumns {
            q: model.coordinate_names(),
            u: model.drive_names(),
            y: model.output_names(),
        }
    }
}
