use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::dynamics::{pd_torque, State, SystemModel};
use crate::error::{Error, Result};

/// How the crank is driven.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SliderCrankInput {
    /// Drive channels `(φ_des, ω_des)` tracked by a PD torque on the crank.
    Pd { p: f64, d: f64 },
    /// The single drive channel is the crank torque itself.
    Torque,
}

/// Planar slider-crank whose connecting rod is two rigid halves joined by a
/// torsional spring-damper at mid-length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliderCrankParams {
    pub l1: f64,
    pub l2: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    /// Bending stiffness of the rod the hinge stands in for.
    pub ei: f64,
    pub hinge_stiffness: f64,
    pub hinge_damping: f64,
    /// Internal couple applied across the hinge (positive opens segment B
    /// relative to segment A).
    pub hinge_moment: f64,
    pub input: SliderCrankInput,
    pub initial_angle: f64,
}

impl Default for SliderCrankParams {
    fn default() -> Self {
        let ei = 13.8;
        let l2 = 1.0;
        let k = PI * PI * ei / l2;
        SliderCrankParams {
            l1: 0.5,
            l2,
            m1: 2.0,
            m2: 4.0,
            m3: 1.0,
            ei,
            hinge_stiffness: k,
            hinge_damping: 0.015 * k,
            hinge_moment: 0.0,
            input: SliderCrankInput::Pd { p: 100.0, d: 20.0 },
            initial_angle: 0.0,
        }
    }
}

const PHI: usize = 0;
const XA: usize = 1;
const YA: usize = 2;
const TA: usize = 3;
const XB: usize = 4;
const YB: usize = 5;
const TB: usize = 6;
const XS: usize = 7;

/// Coordinates `[φ, x_a, y_a, θ_a, x_b, y_b, θ_b, x_s]`: crank angle, centre
/// and angle of both rod halves, slider position.
#[derive(Clone, Debug)]
pub struct SliderCrank {
    pub params: SliderCrankParams,
}

pub fn make_slider_crank_lumped(params: SliderCrankParams) -> SliderCrank {
    let p = &params;
    assert!(p.l1 > 0.0 && p.l2 > p.l1, "slider-crank needs 0 < l1 < l2");
    assert!(p.m1 > 0.0 && p.m2 > 0.0 && p.m3 > 0.0, "masses must be positive");
    SliderCrank { params }
}

/// Slider position of the rigid mechanism, `l1 cos φ + √(l2² − l1² sin² φ)`.
pub fn rigid_slider_position(phi: f64, l1: f64, l2: f64) -> Result<f64> {
    let s = l1 * phi.sin();
    let disc = l2 * l2 - s * s;
    if disc < 0.0 || !disc.is_finite() {
        return Err(Error::Kinematics(format!(
            "rod length {l2} cannot reach the slider line at φ = {phi}"
        )));
    }
    Ok(l1 * phi.cos() + disc.sqrt())
}

impl SliderCrank {
    fn half(&self) -> f64 {
        0.25 * self.params.l2
    }

    fn segment_mass(&self) -> f64 {
        0.5 * self.params.m2
    }

    fn segment_inertia(&self) -> f64 {
        let l = 0.5 * self.params.l2;
        self.segment_mass() * l * l / 12.0
    }

    /// Crank inertia about its pivot (homogeneous bar).
    fn crank_inertia(&self) -> f64 {
        self.params.m1 * self.params.l1 * self.params.l1 / 3.0
    }

    /// Consistent configuration at rest with a straight rod.
    pub fn state_at_rest(&self, phi: f64) -> Result<State> {
        let SliderCrankParams { l1, l2, .. } = self.params;
        let xs = rigid_slider_position(phi, l1, l2)?;
        let (cx, cy) = (l1 * phi.cos(), l1 * phi.sin());
        let theta = (-cy).atan2(xs - cx);
        let (ct, st) = (theta.cos(), theta.sin());
        let h = self.half();
        let mut q = vec![0.0; 8];
        q[PHI] = phi;
        q[XA] = cx + h * ct;
        q[YA] = cy + h * st;
        q[TA] = theta;
        q[XB] = cx + 3.0 * h * ct;
        q[YB] = cy + 3.0 * h * st;
        q[TB] = theta;
        q[XS] = xs;
        Ok(State::at_rest(q))
    }

    pub fn hinge_angle(&self, q: &[f64]) -> f64 {
        q[TB] - q[TA]
    }

    /// Transverse offset of the mid-rod hinge from the chord between crank
    /// pin and slider pin.
    pub fn mid_deflection(&self, q: &[f64]) -> f64 {
        let l1 = self.params.l1;
        let h = self.half();
        let (cx, cy) = (l1 * q[PHI].cos(), l1 * q[PHI].sin());
        let (sx, sy) = (q[XS], 0.0);
        let (hx, hy) = (q[XA] + h * q[TA].cos(), q[YA] + h * q[TA].sin());
        let (dx, dy) = (sx - cx, sy - cy);
        let len = dx.hypot(dy);
        (dx * (hy - cy) - dy * (hx - cx)) / len
    }
}

impl SystemModel for SliderCrank {
    fn name(&self) -> &str {
        "slider_crank_lumped"
    }

    fn n_q(&self) -> usize {
        8
    }

    fn n_a(&self) -> usize {
        6
    }

    fn n_u(&self) -> usize {
        match self.params.input {
            SliderCrankInput::Pd { .. } => 2,
            SliderCrankInput::Torque => 1,
        }
    }

    fn n_y(&self) -> usize {
        2
    }

    fn n_effort(&self) -> usize {
        1
    }

    fn mass(&self, _q: &[f64]) -> DMatrix<f64> {
        let ms = self.segment_mass();
        let is = self.segment_inertia();
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            self.crank_inertia(),
            ms,
            ms,
            is,
            ms,
            ms,
            is,
            self.params.m3,
        ]))
    }

    fn actuate(&self, drive: &[f64], q: &[f64], qdot: &[f64]) -> Vec<f64> {
        match self.params.input {
            SliderCrankInput::Pd { p, d } => {
                vec![pd_torque((drive[0], drive[1]), (q[PHI], qdot[PHI]), (p, d))]
            }
            SliderCrankInput::Torque => vec![drive[0]],
        }
    }

    fn force(&self, q: &[f64], qdot: &[f64], effort: &[f64], _t: f64) -> Vec<f64> {
        let p = &self.params;
        let delta = q[TB] - q[TA];
        let delta_dot = qdot[TB] - qdot[TA];
        let moment = p.hinge_stiffness * delta + p.hinge_damping * delta_dot;
        let mut f = vec![0.0; 8];
        f[PHI] = effort[0];
        f[TA] = moment - p.hinge_moment;
        f[TB] = -moment + p.hinge_moment;
        f
    }

    fn constraint(&self, q: &[f64], _t: f64) -> Vec<f64> {
        let l1 = self.params.l1;
        let h = self.half();
        let (ca, sa) = (q[TA].cos(), q[TA].sin());
        let (cb, sb) = (q[TB].cos(), q[TB].sin());
        vec![
            l1 * q[PHI].cos() - (q[XA] - h * ca),
            l1 * q[PHI].sin() - (q[YA] - h * sa),
            q[XA] + h * ca - (q[XB] - h * cb),
            q[YA] + h * sa - (q[YB] - h * sb),
            q[XB] + h * cb - q[XS],
            q[YB] + h * sb,
        ]
    }

    fn constraint_jacobian(&self, q: &[f64], _t: f64) -> DMatrix<f64> {
        let l1 = self.params.l1;
        let h = self.half();
        let (cp, sp) = (q[PHI].cos(), q[PHI].sin());
        let (ca, sa) = (q[TA].cos(), q[TA].sin());
        let (cb, sb) = (q[TB].cos(), q[TB].sin());
        let mut g = DMatrix::zeros(6, 8);
        g[(0, PHI)] = -l1 * sp;
        g[(0, XA)] = -1.0;
        g[(0, TA)] = -h * sa;
        g[(1, PHI)] = l1 * cp;
        g[(1, YA)] = -1.0;
        g[(1, TA)] = h * ca;
        g[(2, XA)] = 1.0;
        g[(2, TA)] = -h * sa;
        g[(2, XB)] = -1.0;
        g[(2, TB)] = -h * sb;
        g[(3, YA)] = 1.0;
        g[(3, TA)] = h * ca;
        g[(3, YB)] = -1.0;
        g[(3, TB)] = h * cb;
        g[(4, XB)] = 1.0;
        g[(4, TB)] = -h * sb;
        g[(4, XS)] = -1.0;
        g[(5, YB)] = 1.0;
        g[(5, TB)] = h * cb;
        g
    }

    fn constraint_bias(&self, q: &[f64], qdot: &[f64], _t: f64) -> Vec<f64> {
        let l1 = self.params.l1;
        let h = self.half();
        let wp2 = qdot[PHI] * qdot[PHI];
        let wa2 = qdot[TA] * qdot[TA];
        let wb2 = qdot[TB] * qdot[TB];
        let (cp, sp) = (q[PHI].cos(), q[PHI].sin());
        let (ca, sa) = (q[TA].cos(), q[TA].sin());
        let (cb, sb) = (q[TB].cos(), q[TB].sin());
        vec![
            -l1 * cp * wp2 - h * ca * wa2,
            -l1 * sp * wp2 - h * sa * wa2,
            -h * ca * wa2 - h * cb * wb2,
            -h * sa * wa2 - h * sb * wb2,
            -h * cb * wb2,
            -h * sb * wb2,
        ]
    }

    fn output(&self, q: &[f64], _qdot: &[f64], _drive: &[f64], _t: f64) -> Vec<f64> {
        vec![q[XS], self.mid_deflection(q)]
    }

    fn initial_state(&self) -> State {
        self.state_at_rest(self.params.initial_angle)
            .expect("default slider-crank geometry is always reachable")
    }

    fn initial_state_for(&self, drive0: &[f64]) -> Result<State> {
        match self.params.input {
            SliderCrankInput::Pd { .. } => self.state_at_rest(drive0[0]),
            SliderCrankInput::Torque => Ok(self.initial_state()),
        }
    }

    fn energy(&self, q: &[f64], qdot: &[f64]) -> Option<f64> {
        let m = self.mass(q);
        let kinetic: f64 = (0..8).map(|i| 0.5 * m[(i, i)] * qdot[i] * qdot[i]).sum();
        let delta = self.hinge_angle(q);
        Some(kinetic + 0.5 * self.params.hinge_stiffness * delta * delta)
    }

    fn coordinate_names(&self) -> Vec<String> {
        ["phi", "xa", "ya", "theta_a", "xb", "yb", "theta_b", "xs"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn drive_names(&self) -> Vec<String> {
        match self.params.input {
            SliderCrankInput::Pd { .. } => vec!["phi_des".into(), "omega_des".into()],
            SliderCrankInput::Torque => vec!["torque".into()],
        }
    }

    fn output_names(&self) -> Vec<String> {
        vec!["x_p".into(), "d_mid".into()]
    }
}
