use nalgebra::DMatrix;

use crate::dynamics::{State, SystemModel};

/// Single-mass spring-damper with optional cubic hardening,
/// `m ẍ + d ẋ + k x + α k x³ = F(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatorParams {
    pub m: f64,
    pub k: f64,
    pub d: f64,
    /// Cubic stiffness factor; zero gives the linear oscillator.
    pub alpha: f64,
    /// Gain applied to the force before it enters a network.
    pub force_scale: f64,
}

impl OscillatorParams {
    pub fn linear() -> Self {
        OscillatorParams {
            m: 1.0,
            k: 1600.0,
            d: 8.0,
            alpha: 0.0,
            force_scale: 5e-4,
        }
    }

    pub fn duffing() -> Self {
        OscillatorParams {
            alpha: 0.5,
            force_scale: 1e-3,
            ..Self::linear()
        }
    }

    pub fn natural_frequency(&self) -> f64 {
        (self.k / self.m).sqrt()
    }

    /// Natural frequency of the undamped system linearized at displacement `x_bar`.
    pub fn linearized_frequency(&self, x_bar: f64) -> f64 {
        (self.k * (1.0 + 3.0 * self.alpha * x_bar * x_bar) / self.m).sqrt()
    }

    pub fn damping_ratio(&self) -> f64 {
        self.d / (2.0 * self.m * self.natural_frequency())
    }
}

#[derive(Clone, Debug)]
pub struct Oscillator {
    pub params: OscillatorParams,
    name: &'static str,
}

pub fn make_oscillator(params: OscillatorParams) -> Oscillator {
    assert!(params.m > 0.0 && params.k > 0.0 && params.d >= 0.0, "invalid oscillator parameters");
    let name = if params.alpha == 0.0 { "linear_oscillator" } else { "duffing" };
    Oscillator { params, name }
}

impl SystemModel for Oscillator {
    fn name(&self) -> &str {
        self.name
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

    fn mass(&self, _q: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, self.params.m)
    }

    fn force(&self, q: &[f64], qdot: &[f64], effort: &[f64], _t: f64) -> Vec<f64> {
        let OscillatorParams { k, d, alpha, .. } = self.params;
        let x = q[0];
        vec![effort[0] - d * qdot[0] - k * x - alpha * k * x * x * x]
    }

    fn output(&self, q: &[f64], _qdot: &[f64], _drive: &[f64], _t: f64) -> Vec<f64> {
        vec![q[0]]
    }

    fn initial_state(&self) -> State {
        State::at_rest(vec![0.0])
    }

    fn energy(&self, q: &[f64], qdot: &[f64]) -> Option<f64> {
        let OscillatorParams { m, k, alpha, .. } = self.params;
        let x = q[0];
        Some(0.5 * m * qdot[0] * qdot[0] + 0.5 * k * x * x + 0.25 * alpha * k * x.powi(4))
    }

    fn coordinate_names(&self) -> Vec<String> {
        vec!["x".into()]
    }

    fn drive_names(&self) -> Vec<String> {
        vec!["F".into()]
    }

    fn output_names(&self) -> Vec<String> {
        vec!["x_out".into()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{gen_random_step_force, integrate_ode, DriveSignal, SimOptions};

    #[test]
    fn linear_parameters() {
        let p = OscillatorParams::linear();
        assert!((p.natural_frequency() - 40.0).abs() < 1e-12);
        assert!((p.damping_ratio() - 0.1).abs() < 1e-12);
        let duff = OscillatorParams::duffing();
        assert!((duff.linearized_frequency(0.0) - 40.0).abs() < 1e-12);
        assert!((duff.linearized_frequency(1.0) - 63.245553).abs() < 1e-5);
    }

    #[test]
    fn equilibrium_stays_at_rest() {
        let osc = make_oscillator(OscillatorParams::linear());
        let drive = DriveSignal::constant(&[0.0], 0.01, 100);
        let traj = integrate_ode(&osc, &osc.initial_state(), &drive, &SimOptions::new(0.01, 100)).unwrap();
        assert!(traj.q.iter().all(|q| q[0] == 0.0));
    }

    // Oracle: closed-form underdamped free response.
    fn analytic_free(t: f64) -> f64 {
        let wd = 1584f64.sqrt();
        (-4.0 * t).exp() * ((wd * t).cos() + 4.0 / wd * (wd * t).sin())
    }

    #[test]
    fn free_decay_matches_closed_form() {
        let osc = make_oscillator(OscillatorParams::linear());
        let h = 1e-3;
        let drive = DriveSignal::constant(&[0.0], h, 1000);
        let opts = SimOptions::new(h, 1000).with_substeps(1);
        let traj = integrate_ode(&osc, &State::at_rest(vec![1.0]), &drive, &opts).unwrap();
        let worst = traj
            .t
            .iter()
            .zip(&traj.q)
            .map(|(&t, q)| (q[0] - analytic_free(t)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-6, "max error {worst}");
    }

    #[test]
    fn step_halving_convergence() {
        let osc = make_oscillator(OscillatorParams::linear());
        let end_error = |h: f64| {
            let n = (1.0 / h).round() as usize;
            let drive = DriveSignal::constant(&[0.0], h, n);
            let opts = SimOptions::new(h, n).with_substeps(1);
            let traj = integrate_ode(&osc, &State::at_rest(vec![1.0]), &drive, &opts).unwrap();
            (traj.q[n][0] - analytic_free(1.0)).abs()
        };
        let mut prev = end_error(0.02);
        for h in [0.01, 0.005, 0.0025] {
            let e = end_error(h);
            assert!(prev / e >= 8.0, "h={h}: ratio {}", prev / e);
            prev = e;
        }
    }

    #[test]
    fn duffing_static_equilibrium() {
        // 1600·1 + 0.5·1600·1³ = 2400
        let osc = make_oscillator(OscillatorParams::duffing());
        let h = 0.01;
        let drive = DriveSignal::constant(&[2400.0], h, 1000);
        let traj = integrate_ode(&osc, &osc.initial_state(), &drive, &SimOptions::new(h, 1000)).unwrap();
        let x = traj.q.last().unwrap()[0];
        assert!((x - 1.0).abs() < 1e-9, "x = {x}");
    }

    #[test]
    fn unforced_energy_is_non_increasing() {
        for params in [OscillatorParams::linear(), OscillatorParams::duffing()] {
            let osc = make_oscillator(params);
            let h = 1.0 / 64.0;
            let drive = DriveSignal::constant(&[0.0], h, 200);
            let traj = integrate_ode(&osc, &State::new(vec![0.8], vec![-3.0]), &drive, &SimOptions::new(h, 200)).unwrap();
            let e: Vec<f64> = (0..traj.len()).map(|i| osc.energy(&traj.q[i], &traj.qdot[i]).unwrap()).collect();
            for w in e.windows(2) {
                assert!(w[1] <= w[0] + 1e-9 * e[0]);
            }
        }
    }

    #[test]
    fn deterministic_runs() {
        let osc = make_oscillator(OscillatorParams::duffing());
        let drive = gen_random_step_force((-1000.0, 1000.0), 200, 0.025, 9).unwrap();
        let opts = SimOptions::new(0.025, 200);
        let a = integrate_ode(&osc, &osc.initial_state(), &drive, &opts).unwrap();
        let b = integrate_ode(&osc, &osc.initial_state(), &drive, &opts).unwrap();
        assert_eq!(a, b);
    }
}
