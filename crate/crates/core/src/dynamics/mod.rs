//! System abstraction, drive signals and fixed-step time integration.
//!
//! Every model is written in redundant coordinates as
//! `M(q) q̈ + Gᵀ λ = f(q, q̇, effort, t)` with holonomic constraints
//! `g(q) = 0`. Models without constraints are plain second-order ODEs.

mod drive;
mod integrate;
mod trajectory;

pub use drive::{gen_accel_trajectory, gen_ptp, gen_random_step_force, AccelLimits, DriveKind, DriveSignal};
pub use integrate::{integrate_dae, integrate_ode, simulate, Baumgarte, SimOptions};
pub use trajectory::{State, Trajectory, TrajectoryColumns};

use nalgebra::DMatrix;

/// PD control law `τ = P (φ_des − φ) + D (ω_des − ω)`.
pub fn pd_torque(target: (f64, f64), actual: (f64, f64), gains: (f64, f64)) -> f64 {
    gains.0 * (target.0 - actual.0) + gains.1 * (target.1 - actual.1)
}

/// A dynamic system in (possibly constrained) second-order form.
///
/// The drive signal provides `n_u` reference channels per time instant; `actuate`
/// turns them into the generalized efforts that enter `force`. For open-loop
/// models the two coincide. Closed-loop models (PD-driven slider-crank) compute
/// the effort from the reference and the current state, which keeps the
/// controller out of the linearized plant.
pub trait SystemModel: Send + Sync {
    fn name(&self) -> &str;
    fn n_q(&self) -> usize;
    fn n_a(&self) -> usize {
        0
    }
    /// Number of drive (reference) channels.
    fn n_u(&self) -> usize;
    fn n_y(&self) -> usize;
    fn n_effort(&self) -> usize {
        self.n_u()
    }

    fn mass(&self, q: &[f64]) -> DMatrix<f64>;
    fn force(&self, q: &[f64], qdot: &[f64], effort: &[f64], t: f64) -> Vec<f64>;

    fn actuate(&self, drive: &[f64], _q: &[f64], _qdot: &[f64]) -> Vec<f64> {
        drive.to_vec()
    }

    fn constraint(&self, _q: &[f64], _t: f64) -> Vec<f64> {
        Vec::new()
    }

    fn constraint_jacobian(&self, q: &[f64], _t: f64) -> DMatrix<f64> {
        DMatrix::zeros(0, q.len())
    }

    /// Velocity-product term `(d/dt G) q̇` of the acceleration-level constraints.
    ///
    /// The default differentiates the Jacobian numerically along `q̇`.
    fn constraint_bias(&self, q: &[f64], qdot: &[f64], t: f64) -> Vec<f64> {
        if self.n_a() == 0 {
            return Vec::new();
        }
        let speed = qdot.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if speed == 0.0 {
            return vec![0.0; self.n_a()];
        }
        let eps = 1e-6 / speed;
        let shifted = |sign: f64| -> Vec<f64> {
            q.iter().zip(qdot).map(|(qi, vi)| qi + sign * eps * vi).collect()
        };
        let gp = self.constraint_jacobian(&shifted(1.0), t);
        let gm = self.constraint_jacobian(&shifted(-1.0), t);
        let gdot = (gp - gm) / (2.0 * eps);
        (gdot * nalgebra::DVector::from_column_slice(qdot)).as_slice().to_vec()
    }

    fn output(&self, q: &[f64], qdot: &[f64], drive: &[f64], t: f64) -> Vec<f64>;

    fn initial_state(&self) -> State;

    /// Consistent rest state matching the drive's first sample, for models
    /// whose drive prescribes a configuration.
    fn initial_state_for(&self, _drive0: &[f64]) -> crate::error::Result<State> {
        Ok(self.initial_state())
    }

    /// Total mechanical energy, when the model defines one.
    fn energy(&self, _q: &[f64], _qdot: &[f64]) -> Option<f64> {
        None
    }

    fn coordinate_names(&self) -> Vec<String> {
        (0..self.n_q()).map(|i| format!("q{i}")).collect()
    }

    fn drive_names(&self) -> Vec<String> {
        (0..self.n_u()).map(|i| format!("u{i}")).collect()
    }

    fn output_names(&self) -> Vec<String> {
        (0..self.n_y()).map(|i| format!("y{i}")).collect()
    }
}
