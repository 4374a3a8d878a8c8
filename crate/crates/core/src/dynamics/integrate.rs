use nalgebra::{DMatrix, DVector};

use super::{DriveSignal, State, SystemModel, Trajectory};
use crate::error::{Error, Result};

/// Baumgarte feedback gains for the acceleration-level constraints,
/// `g̈ + 2α ġ + β² g = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Baumgarte {
    pub alpha: f64,
    pub beta: f64,
}

impl Baumgarte {
    /// Gains `α = β = factor / h_sim`.
    pub fn per_step(h_sim: f64, factor: f64) -> Self {
        Baumgarte {
            alpha: factor / h_sim,
            beta: factor / h_sim,
        }
    }

    pub const DEFAULT_FACTOR: f64 = 0.1;
}

/// Fixed-step integration settings.
///
/// `h` is the sampling step of the produced trajectory (the surrogate grid);
/// each step is integrated with `substeps` classical RK4 steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimOptions {
    pub h: f64,
    pub n_steps: usize,
    pub substeps: usize,
    pub baumgarte: Option<Baumgarte>,
}

impl SimOptions {
    pub const DEFAULT_SUBSTEPS: usize = 8;

    pub fn new(h: f64, n_steps: usize) -> Self {
        SimOptions {
            h,
            n_steps,
            substeps: Self::DEFAULT_SUBSTEPS,
            baumgarte: None,
        }
    }

    pub fn with_substeps(mut self, substeps: usize) -> Self {
        self.substeps = substeps.max(1);
        self
    }

    pub fn with_baumgarte(mut self, gains: Baumgarte) -> Self {
        self.baumgarte = Some(gains);
        self
    }

    pub fn h_sim(&self) -> f64 {
        self.h / self.substeps as f64
    }

    fn gains(&self) -> Baumgarte {
        self.baumgarte
            .unwrap_or_else(|| Baumgarte::per_step(self.h_sim(), Baumgarte::DEFAULT_FACTOR))
    }
}

/// Integrates an unconstrained model with fixed-step RK4.
pub fn integrate_ode(
    model: &dyn SystemModel,
    initial: &State,
    drive: &DriveSignal,
    opts: &SimOptions,
) -> Result<Trajectory> {
    if model.n_a() != 0 {
        return Err(Error::config(
            "model",
            format!("{} has {} constraints; use integrate_dae", model.name(), model.n_a()),
        ));
    }
    simulate(model, initial, drive, opts)
}

/// Integrates a constrained model: each RK4 stage solves the saddle-point
/// system `[[M, Gᵀ], [G, 0]] [q̈; λ] = [f; −(Ġ q̇) − 2α ġ − β² g]`.
pub fn integrate_dae(
    model: &dyn SystemModel,
    initial: &State,
    drive: &DriveSignal,
    opts: &SimOptions,
) -> Result<Trajectory> {
    simulate(model, initial, drive, opts)
}

/// Integrates any model, choosing the ODE or DAE right-hand side from `n_a`.
pub fn simulate(
    model: &dyn SystemModel,
    initial: &State,
    drive: &DriveSignal,
    opts: &SimOptions,
) -> Result<Trajectory> {
    let n = model.n_q();
    if initial.q.len() != n || initial.qdot.len() != n {
        return Err(Error::Shape(format!(
            "initial state has {} coordinates, {} expects {n}",
            initial.q.len(),
            model.name()
        )));
    }
    if !(opts.h > 0.0) {
        return Err(Error::config("h", "step size must be positive"));
    }
    if drive.n_channels() != model.n_u() {
        return Err(Error::Shape(format!(
            "drive has {} channels, {} expects {}",
            drive.n_channels(),
            model.name(),
            model.n_u()
        )));
    }
    let rhs = Rhs {
        model,
        drive,
        gains: opts.gains(),
        h: opts.h,
        drive_buf: std::cell::RefCell::new(vec![0.0; model.n_u()]),
    };
    let h_sim = opts.h_sim();

    let mut traj = Trajectory {
        system: model.name().to_string(),
        seed: drive.seed,
        h: opts.h,
        t: Vec::with_capacity(opts.n_steps + 1),
        q: Vec::with_capacity(opts.n_steps + 1),
        qdot: Vec::with_capacity(opts.n_steps + 1),
        u: Vec::with_capacity(opts.n_steps + 1),
        y: Vec::with_capacity(opts.n_steps + 1),
    };
    let mut z: Vec<f64> = initial.q.iter().chain(&initial.qdot).copied().collect();
    record(&mut traj, model, drive, &z, 0, opts.h);

    let mut scratch = Rk4Scratch::new(2 * n);
    for k in 0..opts.n_steps {
        for s in 0..opts.substeps {
            let tau = s as f64 * h_sim;
            rk4_step(&rhs, k, tau, h_sim, &mut z, &mut scratch)
                .map_err(|e| e.at_step(k + 1))?;
            if z.iter().any(|v| !v.is_finite()) {
                return Err(Error::IntegrationDiverged { step: k + 1 });
            }
        }
        record(&mut traj, model, drive, &z, k + 1, opts.h);
    }
    Ok(traj)
}

fn record(traj: &mut Trajectory, model: &dyn SystemModel, drive: &DriveSignal, z: &[f64], i: usize, h: f64) {
    let n = z.len() / 2;
    let t = i as f64 * h;
    let mut u = vec![0.0; drive.n_channels()];
    drive.value_in_step(i, 0.0, &mut u);
    let y = model.output(&z[..n], &z[n..], &u, t);
    traj.t.push(t);
    traj.q.push(z[..n].to_vec());
    traj.qdot.push(z[n..].to_vec());
    traj.u.push(u);
    traj.y.push(y);
}

enum StageError {
    Singular,
    Diverged,
}

impl StageError {
    fn at_step(self, step: usize) -> Error {
        match self {
            StageError::Singular => Error::ConstraintDegeneracy { step },
            StageError::Diverged => Error::IntegrationDiverged { step },
        }
    }
}

struct Rhs<'a> {
    model: &'a dyn SystemModel,
    drive: &'a DriveSignal,
    gains: Baumgarte,
    h: f64,
    drive_buf: std::cell::RefCell<Vec<f64>>,
}

impl Rhs<'_> {
    /// Writes `ż = [q̇; q̈]` for grid step `k` at local time `tau`.
    fn eval(&self, k: usize, tau: f64, z: &[f64], dz: &mut [f64]) -> Result<(), StageError> {
        let n = z.len() / 2;
        let (q, qdot) = z.split_at(n);
        let t = k as f64 * self.h + tau;
        let mut drive = self.drive_buf.borrow_mut();
        self.drive.value_in_step(k, tau, &mut drive);
        let effort = self.model.actuate(&drive, q, qdot);
        let f = self.model.force(q, qdot, &effort, t);
        let m = self.model.mass(q);
        let n_a = self.model.n_a();

        let acc = if n_a == 0 {
            let rhs = DVector::from_vec(f);
            match m.clone().cholesky() {
                Some(ch) => ch.solve(&rhs),
                None => m.lu().solve(&rhs).ok_or(StageError::Singular)?,
            }
        } else {
            let g = self.model.constraint(q, t);
            let jac = self.model.constraint_jacobian(q, t);
            let bias = self.model.constraint_bias(q, qdot, t);
            let gdot = &jac * DVector::from_column_slice(qdot);
            let dim = n + n_a;
            let mut lhs = DMatrix::zeros(dim, dim);
            lhs.view_mut((0, 0), (n, n)).copy_from(&m);
            lhs.view_mut((n, 0), (n_a, n)).copy_from(&jac);
            lhs.view_mut((0, n), (n, n_a)).copy_from(&jac.transpose());
            let mut rhs = DVector::zeros(dim);
            rhs.rows_mut(0, n).copy_from_slice(&f);
            let Baumgarte { alpha, beta } = self.gains;
            for i in 0..n_a {
                rhs[n + i] = -bias[i] - 2.0 * alpha * gdot[i] - beta * beta * g[i];
            }
            let sol = lhs.lu().solve(&rhs).ok_or(StageError::Singular)?;
            if sol.iter().any(|v| !v.is_finite()) {
                return Err(StageError::Singular);
            }
            sol.rows(0, n).into_owned()
        };
        if acc.iter().any(|v| !v.is_finite()) {
            return Err(StageError::Diverged);
        }
        dz[..n].copy_from_slice(qdot);
        dz[n..].copy_from_slice(acc.as_slice());
        Ok(())
    }
}

struct Rk4Scratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Scratch {
    fn new(len: usize) -> Self {
        Rk4Scratch {
            k1: vec![0.0; len],
            k2: vec![0.0; len],
            k3: vec![0.0; len],
            k4: vec![0.0; len],
            tmp: vec![0.0; len],
        }
    }
}

fn rk4_step(rhs: &Rhs<'_>, k: usize, tau: f64, dt: f64, z: &mut [f64], s: &mut Rk4Scratch) -> Result<(), StageError> {
    rhs.eval(k, tau, z, &mut s.k1)?;
    for i in 0..z.len() {
        s.tmp[i] = z[i] + 0.5 * dt * s.k1[i];
    }
    rhs.eval(k, tau + 0.5 * dt, &s.tmp, &mut s.k2)?;
    for i in 0..z.len() {
        s.tmp[i] = z[i] + 0.5 * dt * s.k2[i];
    }
    rhs.eval(k, tau + 0.5 * dt, &s.tmp, &mut s.k3)?;
    for i in 0..z.len() {
        s.tmp[i] = z[i] + dt * s.k3[i];
    }
    rhs.eval(k, tau + dt, &s.tmp, &mut s.k4)?;
    for i in 0..z.len() {
        z[i] += dt / 6.0 * (s.k1[i] + 2.0 * s.k2[i] + 2.0 * s.k3[i] + s.k4[i]);
    }
    Ok(())
}
