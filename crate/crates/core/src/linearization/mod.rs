//! Decay-time estimation from the linearized equations of motion.
//!
//! The pipeline linearizes `M q̈ + Gᵀλ = f` about a state, projects the
//! tangent stiffness and damping onto the nullspace of the constraint
//! Jacobian, solves the first-order eigenproblem and converts the real parts
//! of the eigenvalues into the time a perturbation needs to decay to a given
//! relative amplitude.

mod decay;
mod eigen;
mod modal;
mod nullspace;
mod tangent;

pub use decay::{decay_time, trajectory_mean_decay, DecayEstimate, DecaySample};
pub use eigen::{complex_eigenvalues, first_order_matrix};
pub use modal::ModalResponse;
pub use nullspace::{nullspace_basis, project_system, Nullspace};
pub use tangent::tangent_matrices;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{State, SystemModel};
use crate::error::Result;

/// Numerical tolerances of the linearization pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearizeOptions {
    /// Singular values below `s_tol · σ_max` count as zero.
    pub s_tol: f64,
    /// Modes with `|Re v|` below this are rigid-body modes.
    pub rigid_tol: f64,
    /// Modes with `|v|` below this are rigid-body modes as well. A rigid mode
    /// of a constrained model comes out of a finite-difference tangent as a
    /// tiny eigenvalue pair whose real part is pure round-off.
    pub rigid_magnitude_tol: f64,
}

impl Default for LinearizeOptions {
    fn default() -> Self {
        LinearizeOptions {
            s_tol: 1e-10,
            rigid_tol: 1e-6,
            rigid_magnitude_tol: 1e-3,
        }
    }
}

impl LinearizeOptions {
    pub fn is_rigid(&self, v: Complex64) -> bool {
        v.re.abs() < self.rigid_tol || v.norm() < self.rigid_magnitude_tol
    }
}

/// Everything computed when linearizing a model about one state.
#[derive(Clone, Debug)]
pub struct LinearizationReport {
    pub state: State,
    pub stiffness: DMatrix<f64>,
    pub damping: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub constraint_jacobian: DMatrix<f64>,
    /// Rows span the nullspace of the constraint Jacobian.
    pub nullspace: DMatrix<f64>,
    pub n_nonzero: usize,
    pub singular_values: Vec<f64>,
    pub projected_mass: DMatrix<f64>,
    pub projected_stiffness: DMatrix<f64>,
    pub projected_damping: DMatrix<f64>,
    pub eigenvalues: Vec<Complex64>,
    pub s_tol: f64,
}

impl LinearizationReport {
    /// Decay time of every eigenvalue at relative amplitude `a_rel`.
    pub fn decay_times(&self, a_rel: f64) -> Result<Vec<f64>> {
        self.eigenvalues.iter().map(|&v| decay_time(v, a_rel)).collect()
    }

    /// The non-rigid eigenvalue with the smallest `|Re v|`.
    pub fn slowest_damped(&self, opts: &LinearizeOptions) -> Option<Complex64> {
        self.eigenvalues.iter().copied().find(|&v| !opts.is_rigid(v))
    }
}

/// Linearizes `model` about `state` with the drive held at `drive`.
///
/// The generalized effort is evaluated once from the drive and then frozen, so
/// feedback controllers do not enter the tangent matrices.
pub fn linearize(
    model: &dyn SystemModel,
    state: &State,
    drive: &[f64],
    t: f64,
    opts: &LinearizeOptions,
) -> Result<LinearizationReport> {
    let effort = model.actuate(drive, &state.q, &state.qdot);
    let (stiffness, damping) = tangent_matrices(model, &state.q, &state.qdot, &effort, t)?;
    let mass = model.mass(&state.q);
    let constraint_jacobian = model.constraint_jacobian(&state.q, t);
    let ns = nullspace_basis(&constraint_jacobian, opts.s_tol);
    let (pm, pk, pd) = project_system(&mass, &stiffness, &damping, &ns.basis);
    let eigenvalues = complex_eigenvalues(&pm, &pk, &pd)?;
    Ok(LinearizationReport {
        state: state.clone(),
        stiffness,
        damping,
        mass,
        constraint_jacobian,
        nullspace: ns.basis,
        n_nonzero: ns.n_nonzero,
        singular_values: ns.singular_values,
        projected_mass: pm,
        projected_stiffness: pk,
        projected_damping: pd,
        eigenvalues,
        s_tol: opts.s_tol,
    })
}
