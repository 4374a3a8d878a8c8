use nalgebra::DMatrix;

use crate::dynamics::SystemModel;
use crate::error::{Error, Result};

/// Tangent stiffness `K = −∂f/∂q` and damping `D = −∂f/∂q̇` by central
/// differences with step `1e-6·(1 + |x_j|)`.
///
/// Derivatives of the mass matrix and of the constraint reactions are not
/// included.
pub fn tangent_matrices(
    model: &dyn SystemModel,
    q: &[f64],
    qdot: &[f64],
    effort: &[f64],
    t: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = q.len();
    let column = |wrt_velocity: bool, j: usize| -> Result<Vec<f64>> {
        let x = if wrt_velocity { qdot[j] } else { q[j] };
        let eps = 1e-6 * (1.0 + x.abs());
        let eval = |delta: f64| {
            let mut qq = q.to_vec();
            let mut vv = qdot.to_vec();
            if wrt_velocity {
                vv[j] += delta;
            } else {
                qq[j] += delta;
            }
            model.force(&qq, &vv, effort, t)
        };
        let fp = eval(eps);
        let fm = eval(-eps);
        let col: Vec<f64> = fp.iter().zip(&fm).map(|(a, b)| -(a - b) / (2.0 * eps)).collect();
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::Linearization(format!(
                "non-finite force derivative with respect to {}{j}",
                if wrt_velocity { "qdot" } else { "q" }
            )));
        }
        Ok(col)
    };
    let mut k = DMatrix::zeros(n, n);
    let mut d = DMatrix::zeros(n, n);
    for j in 0..n {
        k.set_column(j, &nalgebra::DVector::from_vec(column(false, j)?));
        d.set_column(j, &nalgebra::DVector::from_vec(column(true, j)?));
    }
    Ok((k, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_oscillator, OscillatorParams};

    #[test]
    fn oscillator_tangents() {
        let lin = make_oscillator(OscillatorParams::linear());
        let (k, d) = tangent_matrices(&lin, &[0.3], &[1.0], &[0.0], 0.0).unwrap();
        assert!((k[(0, 0)] - 1600.0).abs() < 1e-6);
        assert!((d[(0, 0)] - 8.0).abs() < 1e-6);

        let duff = make_oscillator(OscillatorParams::duffing());
        let (k0, _) = tangent_matrices(&duff, &[0.0], &[0.0], &[0.0], 0.0).unwrap();
        assert!((k0[(0, 0)] - 1600.0).abs() < 1e-6);
        let (k1, _) = tangent_matrices(&duff, &[1.0], &[0.0], &[0.0], 0.0).unwrap();
        assert!((k1[(0, 0)] - 4000.0).abs() < 1e-4);
    }
}
