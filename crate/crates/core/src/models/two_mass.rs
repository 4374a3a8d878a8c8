use nalgebra::DMatrix;

use super::OscillatorParams;
use crate::dynamics::{State, SystemModel};

/// Two identical oscillators tied together by `q1 − q2 = 0`.
///
/// The constrained motion is a single oscillator of twice the mass, stiffness
/// and damping, so its spectrum equals the single oscillator's.
#[derive(Clone, Debug)]
pub struct TwoMassConstrained {
    pub params: OscillatorParams,
    pub initial: State,
}

pub fn make_two_mass_constrained() -> TwoMassConstrained {
    TwoMassConstrained {
        params: OscillatorParams::linear(),
        initial: State::at_rest(vec![0.1, 0.1]),
    }
}

impl SystemModel for TwoMassConstrained {
    fn name(&self) -> &str {
        "two_mass_constrained"
    }

    fn n_q(&self) -> usize {
        2
    }

    fn n_a(&self) -> usize {
        1
    }

    fn n_u(&self) -> usize {
        1
    }

    fn n_y(&self) -> usize {
        1
    }

    fn mass(&self, _q: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal_element(2, 2, self.params.m)
    }

    /// The drive force acts on the first mass.
    fn force(&self, q: &[f64], qdot: &[f64], effort: &[f64], _t: f64) -> Vec<f64> {
        let OscillatorParams { k, d, .. } = self.params;
        vec![effort[0] - d * qdot[0] - k * q[0], -d * qdot[1] - k * q[1]]
    }

    fn constraint(&self, q: &[f64], _t: f64) -> Vec<f64> {
        vec![q[0] - q[1]]
    }

    fn constraint_jacobian(&self, _q: &[f64], _t: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(1, 2, &[1.0, -1.0])
    }

    fn constraint_bias(&self, _q: &[f64], _qdot: &[f64], _t: f64) -> Vec<f64> {
        vec![0.0]
    }

    fn output(&self, q: &[f64], _qdot: &[f64], _drive: &[f64], _t: f64) -> Vec<f64> {
        vec![q[0]]
    }

    fn initial_state(&self) -> State {
        self.initial.clone()
    }

    fn energy(&self, q: &[f64], qdot: &[f64]) -> Option<f64> {
        let OscillatorParams { m, k, .. } = self.params;
        Some(
            q.iter()
                .zip(qdot)
                .map(|(x, v)| 0.5 * m * v * v + 0.5 * k * x * x)
                .sum(),
        )
    }

    fn coordinate_names(&self) -> Vec<String> {
        vec!["x1".into(), "x2".into()]
    }

    fn drive_names(&self) -> Vec<String> {
        vec!["F".into()]
    }

    fn output_names(&self) -> Vec<String> {
        vec!["x1_out".into()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_dae, DriveSignal, SimOptions};

    #[test]
    fn jacobian_is_constant() {
        let m = make_two_mass_constrained();
        for q in [[0.0, 0.0], [1.0, -2.0], [3.5, 3.5]] {
            assert_eq!(m.constraint_jacobian(&q, 0.0).as_slice(), &[1.0, -1.0]);
        }
    }

    #[test]
    fn symmetric_motion_is_preserved() {
        let m = make_two_mass_constrained();
        let h = 1.0 / 64.0;
        let drive = DriveSignal::constant(&[0.0], h, 256);
        let traj = integrate_dae(&m, &m.initial_state(), &drive, &SimOptions::new(h, 256)).unwrap();
        for q in &traj.q {
            assert!((q[0] - q[1]).abs() <= 1e-9);
        }
        // and it actually oscillates and decays
        assert!(traj.q[256][0].abs() < 0.1 * 0.05);
    }
}
