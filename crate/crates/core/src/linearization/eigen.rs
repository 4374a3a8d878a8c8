use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// First-order system matrix of `M̄ q̈ + D̄ q̇ + K̄ q = 0` in `z = [q; q̇]`.
///
/// With `A = [[K̄, D̄], [0, −M̄]]` and `B = [[0, M̄], [M̄, 0]]` the equations read
/// `A z + B ż = 0`, so the state matrix is `−B⁻¹A = [[0, I], [−M̄⁻¹K̄, −M̄⁻¹D̄]]`.
pub fn first_order_matrix(m: &DMatrix<f64>, k: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let lu = m.clone().lu();
    if n > 0 && !lu.is_invertible() {
        return Err(Error::Eigen("projected mass matrix is singular".into()));
    }
    let minv_k = lu.solve(k).ok_or_else(|| Error::Eigen("projected mass matrix is singular".into()))?;
    let minv_d = lu.solve(d).ok_or_else(|| Error::Eigen("projected mass matrix is singular".into()))?;
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    s.view_mut((0, n), (n, n)).fill_with_identity();
    s.view_mut((n, 0), (n, n)).copy_from(&(-minv_k));
    s.view_mut((n, n), (n, n)).copy_from(&(-minv_d));
    Ok(s)
}

/// All `2·n_f` eigenvalues of the first-order system, ordered by ascending
/// `|Re|`, then ascending `|Im|`, then ascending `Im`.
pub fn complex_eigenvalues(m: &DMatrix<f64>, k: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let s = first_order_matrix(m, k, d)?;
    let schur = nalgebra::linalg::Schur::try_new(s, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let mut v: Vec<Complex64> = schur
        .complex_eigenvalues()
        .iter()
        .map(|c| Complex64::new(c.re, c.im))
        .collect();
    sort_eigenvalues(&mut v);
    Ok(v)
}

pub(crate) fn sort_eigenvalues(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        a.re.abs()
            .total_cmp(&b.re.abs())
            .then(a.im.abs().total_cmp(&b.im.abs()))
            .then(a.im.total_cmp(&b.im))
    });
}
