use num_complex::Complex64;

use super::{linearize, LinearizeOptions};
use crate::dynamics::{SystemModel, Trajectory};
use crate::error::{Error, Result};

/// Time after which a mode with eigenvalue `v` has decayed to the relative
/// amplitude `a_rel`, `t_d = ln(a_rel)/Re(v)`.
///
/// Modes with `Re(v) ≥ 0` never decay and yield `f64::INFINITY`.
pub fn decay_time(v: Complex64, a_rel: f64) -> Result<f64> {
    if !(a_rel > 0.0 && a_rel < 1.0) {
        return Err(Error::config("arel", format!("relative amplitude must lie in (0, 1), got {a_rel}")));
    }
    if v.re >= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(a_rel.ln() / v.re)
}

/// Slowest non-rigid mode at one sampled state.
#[derive(Clone, Debug, PartialEq)]
pub struct DecaySample {
    pub index: usize,
    pub t: f64,
    pub eigenvalue: Complex64,
    pub t_d: f64,
    pub n_rigid: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayEstimate {
    pub a_rel: f64,
    pub mean_re: f64,
    pub t_d_mean: f64,
    pub t_d_max: f64,
    pub samples: Vec<DecaySample>,
}

/// Linearizes at every `stride`-th state of `trajectory`, takes the slowest
/// non-rigid mode at each, and converts the mean of their real parts into a
/// decay time. The largest instantaneous decay time is reported alongside.
pub fn trajectory_mean_decay(
    model: &dyn SystemModel,
    trajectory: &Trajectory,
    a_rel: f64,
    stride: usize,
    opts: &LinearizeOptions,
) -> Result<DecayEstimate> {
    if trajectory.is_empty() {
        return Err(Error::Shape("trajectory is empty".into()));
    }
    if stride == 0 {
        return Err(Error::config("stride", "sample stride must be positive"));
    }
    let mut samples = Vec::new();
    for i in (0..trajectory.len()).step_by(stride) {
        let state = trajectory.state(i);
        let report = linearize(model, &state, &trajectory.u[i], trajectory.t[i], opts)?;
        let n_rigid = report.eigenvalues.iter().filter(|&&v| opts.is_rigid(v)).count();
        let v = report.slowest_damped(opts).ok_or(Error::NoDampedMode)?;
        samples.push(DecaySample {
            index: i,
            t: trajectory.t[i],
            eigenvalue: v,
            t_d: decay_time(v, a_rel)?,
            n_rigid,
        });
    }
    let mean_re = samples.iter().map(|s| s.eigenvalue.re).sum::<f64>() / samples.len() as f64;
    let t_d_mean = decay_time(Complex64::new(mean_re, 0.0), a_rel)?;
    let t_d_max = samples.iter().map(|s| s.t_d).fold(f64::NEG_INFINITY, f64::max);
    Ok(DecayEstimate { a_rel, mean_re, t_d_mean, t_d_max, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{gen_random_step_force, simulate, DriveSignal, SimOptions, State};
    use crate::models::{make_oscillator, OscillatorParams};

    #[test]
    fn decay_time_examples() {
        // ω0 = 40, D = 0.1 → Re(v) = −4
        let td = decay_time(Complex64::new(-4.0, 39.8), 0.01).unwrap();
        assert!((td - 1.15).abs() / 1.15 < 5e-3);
        assert!((td - 1.151_292_546_497_023).abs() < 1e-12);
        let td = decay_time(Complex64::new(-0.5, 0.0), 0.01).unwrap();
        assert!((td - 9.2103).abs() < 1e-4);
        assert!(decay_time(Complex64::new(-4.0, 0.0), 1.0 - 1e-12).unwrap() < 1e-12);
        assert_eq!(decay_time(Complex64::new(0.0, 40.0), 0.01).unwrap(), f64::INFINITY);
        assert_eq!(decay_time(Complex64::new(0.3, 0.0), 0.01).unwrap(), f64::INFINITY);
        assert!(decay_time(Complex64::new(-1.0, 0.0), 0.0).is_err());
        assert!(decay_time(Complex64::new(-1.0, 0.0), 1.5).is_err());
    }

    #[test]
    fn stationary_trajectory() {
        let osc = make_oscillator(OscillatorParams::linear());
        let drive = DriveSignal::constant(&[0.0], 0.01, 50);
        let traj = simulate(&osc, &State::at_rest(vec![0.0]), &drive, &SimOptions::new(0.01, 50)).unwrap();
        let est = trajectory_mean_decay(&osc, &traj, 0.01, 5, &LinearizeOptions::default()).unwrap();
        assert_eq!(est.samples.len(), 11);
        assert!((est.t_d_mean - 1.1513).abs() < 1e-4);
        assert!((est.t_d_max - est.t_d_mean).abs() < 1e-9);
    }

    #[test]
    fn duffing_is_state_independent() {
        let duff = make_oscillator(OscillatorParams::duffing());
        let drive = gen_random_step_force((-1000.0, 1000.0), 200, 0.025, 3).unwrap();
        let traj = simulate(&duff, &State::at_rest(vec![0.0]), &drive, &SimOptions::new(0.025, 200)).unwrap();
        let est = trajectory_mean_decay(&duff, &traj, 0.01, 7, &LinearizeOptions::default()).unwrap();
        for s in &est.samples {
            assert!((s.eigenvalue.re + 4.0).abs() < 1e-6, "{:?}", s);
        }
        assert!((est.t_d_mean - 1.1513).abs() < 1e-4);
    }

    struct FreeMass;

    impl SystemModel for FreeMass {
        fn name(&self) -> &str {
            "free_mass"
        }
        fn n_q(&self) -> usize {
            1
        }
        fn n_u(&self) -> usize {
            1
        }
        fn n_y(&self) -> usize {
            1
        }
        fn mass(&self, _q: &[f64]) -> nalgebra::DMatrix<f64> {
            nalgebra::DMatrix::identity(1, 1)
        }
        fn force(&self, _q: &[f64], _qdot: &[f64], effort: &[f64], _t: f64) -> Vec<f64> {
            effort.to_vec()
        }
        fn output(&self, q: &[f64], _qdot: &[f64], _drive: &[f64], _t: f64) -> Vec<f64> {
            q.to_vec()
        }
        fn initial_state(&self) -> State {
            State::at_rest(vec![0.0])
        }
    }

    #[test]
    fn all_rigid_is_an_error() {
        let drive = DriveSignal::constant(&[0.0], 0.01, 4);
        let traj = simulate(&FreeMass, &State::at_rest(vec![0.0]), &drive, &SimOptions::new(0.01, 4)).unwrap();
        let r = trajectory_mean_decay(&FreeMass, &traj, 0.01, 1, &LinearizeOptions::default());
        assert!(matches!(r, Err(Error::NoDampedMode)));
    }
}
