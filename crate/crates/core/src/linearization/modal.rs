use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::eigen::{first_order_matrix, sort_eigenvalues};
use crate::error::{Error, Result};

/// Free response of the linearized system written as a sum of modes,
/// `z(t) = Σ Φ_i p_{0,i} e^{v_i t}` with `z = [q; q̇]`.
#[derive(Clone, Debug)]
pub struct ModalResponse {
    pub eigenvalues: Vec<Complex64>,
    /// Columns are the eigenvectors of the first-order system matrix.
    pub modes: DMatrix<Complex64>,
    /// Initial modal coordinates.
    pub p0: DVector<Complex64>,
}

impl ModalResponse {
    /// Decomposes the initial state `(q0, qdot0)` into modal coordinates.
    ///
    /// Fails for defective systems, where the eigenvectors do not form a basis.
    pub fn new(
        m: &DMatrix<f64>,
        k: &DMatrix<f64>,
        d: &DMatrix<f64>,
        q0: &[f64],
        qdot0: &[f64],
    ) -> Result<Self> {
        let n = m.nrows();
        if q0.len() != n || qdot0.len() != n {
            return Err(Error::Shape(format!("initial state must have {n} coordinates")));
        }
        let s = first_order_matrix(m, k, d)?;
        let mut eigenvalues: Vec<Complex64> = s.complex_eigenvalues().iter().map(|c| Complex64::new(c.re, c.im)).collect();
        sort_eigenvalues(&mut eigenvalues);
        let sc: DMatrix<Complex64> = s.map(|x| Complex64::new(x, 0.0));
        let dim = 2 * n;
        let mut modes = DMatrix::zeros(dim, dim);
        for (i, &v) in eigenvalues.iter().enumerate() {
            let shifted = &sc - DMatrix::from_diagonal_element(dim, dim, v);
            let svd = shifted.svd(false, true);
            let vt = svd.v_t.expect("right singular vectors requested");
            let j = svd
                .singular_values
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(j, _)| j)
                .unwrap();
            // the null vector of S − vI is the conjugated row of Vᴴ
            let phi = vt.row(j).map(|c| c.conj()).transpose();
            modes.set_column(i, &phi);
        }
        let z0 = DVector::from_iterator(dim, q0.iter().chain(qdot0).map(|&x| Complex64::new(x, 0.0)));
        let lu = modes.clone().lu();
        let p0 = lu
            .solve(&z0)
            .filter(|p| p.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
            .ok_or_else(|| Error::Eigen("eigenvectors do not form a basis".into()))?;
        Ok(ModalResponse { eigenvalues, modes, p0 })
    }

    /// Displacements `q(t)` reconstructed from the modal sum.
    pub fn displacement(&self, t: f64) -> Vec<f64> {
        let n = self.modes.nrows() / 2;
        let mut q = vec![Complex64::new(0.0, 0.0); n];
        for (i, &v) in self.eigenvalues.iter().enumerate() {
            let a = self.p0[i] * (v * t).exp();
            for (r, qr) in q.iter_mut().enumerate() {
                *qr += self.modes[(r, i)] * a;
            }
        }
        q.into_iter().map(|c| c.re).collect()
    }
}
