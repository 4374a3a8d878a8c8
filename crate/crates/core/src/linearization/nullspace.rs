use nalgebra::DMatrix;

/// Orthonormal basis of `ker(G)` stored as rows, with the SVD data used to
/// obtain it.
#[derive(Clone, Debug)]
pub struct Nullspace {
    pub basis: DMatrix<f64>,
    pub n_nonzero: usize,
    pub singular_values: Vec<f64>,
}

/// Nullspace of the constraint Jacobian `G` (`n_a × n_q`) via SVD.
///
/// `Gᵀ` is decomposed as `U Σ Vᵀ` with singular values in descending order;
/// the left singular vectors beyond the `n_nz` singular values exceeding
/// `s_tol · σ_max` span `ker(G)` and become the rows of `N`. `Gᵀ` is padded
/// with zero columns to a square matrix so the SVD yields the full `U`.
pub fn nullspace_basis(g: &DMatrix<f64>, s_tol: f64) -> Nullspace {
    let n_q = g.ncols();
    let n_a = g.nrows();
    if n_a == 0 {
        return Nullspace {
            basis: DMatrix::identity(n_q, n_q),
            n_nonzero: 0,
            singular_values: Vec::new(),
        };
    }
    let cols = n_a.max(n_q);
    let mut gt = DMatrix::zeros(n_q, cols);
    gt.view_mut((0, 0), (n_q, n_a)).copy_from(&g.transpose());
    let svd = gt.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sv = svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]).then(a.cmp(&b)));
    let sigma_max = sv[order[0]];
    let threshold = s_tol * sigma_max;
    let n_nonzero = if sigma_max == 0.0 {
        0
    } else {
        order.iter().filter(|&&i| sv[i] > threshold).count()
    };
    // U is n_q × min(n_q, cols) = n_q × n_q.
    let null_cols: Vec<usize> = order.iter().copied().skip(n_nonzero).filter(|&i| i < u.ncols()).collect();
    let mut basis = DMatrix::zeros(null_cols.len(), n_q);
    for (row, &c) in null_cols.iter().enumerate() {
        basis.set_row(row, &u.column(c).transpose());
    }
    Nullspace {
        basis,
        n_nonzero,
        singular_values: order.iter().take(n_a.min(n_q)).map(|&i| sv[i]).collect(),
    }
}

/// Congruence projection `(N M Nᵀ, N K Nᵀ, N D Nᵀ)`.
pub fn project_system(
    m: &DMatrix<f64>,
    k: &DMatrix<f64>,
    d: &DMatrix<f64>,
    n: &DMatrix<f64>,
) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let nt = n.transpose();
    (n * m * &nt, n * k * &nt, n * d * &nt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_constraint() {
        let g = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let ns = nullspace_basis(&g, 1e-10);
        assert_eq!(ns.n_nonzero, 1);
        assert_eq!(ns.basis.shape(), (1, 2));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let b = &ns.basis;
        let sign = b[(0, 0)].signum();
        assert!((sign * b[(0, 0)] - r).abs() < 1e-12 && (sign * b[(0, 1)] - r).abs() < 1e-12);
    }

    #[test]
    fn zero_and_full_constraints() {
        let ns = nullspace_basis(&DMatrix::zeros(2, 3), 1e-10);
        assert_eq!(ns.n_nonzero, 0);
        assert_eq!(ns.basis.nrows(), 3);
        // columns may come in any orthonormal arrangement; check N Nᵀ = I
        assert!((&ns.basis * ns.basis.transpose() - DMatrix::<f64>::identity(3, 3)).amax() < 1e-12);

        let full = nullspace_basis(&DMatrix::identity(3, 3), 1e-10);
        assert_eq!(full.basis.nrows(), 0);
        let (pm, _, _) = project_system(
            &DMatrix::identity(3, 3),
            &DMatrix::identity(3, 3),
            &DMatrix::identity(3, 3),
            &full.basis,
        );
        assert_eq!(pm.shape(), (0, 0));
    }

    #[test]
    fn no_constraints_give_identity() {
        let ns = nullspace_basis(&DMatrix::zeros(0, 4), 1e-10);
        assert_eq!(ns.basis, DMatrix::identity(4, 4));
        let m = DMatrix::from_fn(4, 4, |i, j| (i + 2 * j) as f64);
        let (pm, _, _) = project_system(&m, &m, &m, &ns.basis);
        assert_eq!(pm, m);
    }

    #[test]
    fn two_mass_projection() {
        let g = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let n = nullspace_basis(&g, 1e-10).basis;
        let (pm, pk, pd) = project_system(
            &DMatrix::from_diagonal_element(2, 2, 1.0),
            &DMatrix::from_diagonal_element(2, 2, 1600.0),
            &DMatrix::from_diagonal_element(2, 2, 8.0),
            &n,
        );
        assert!((pm[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((pk[(0, 0)] - 1600.0).abs() < 1e-9);
        assert!((pd[(0, 0)] - 8.0).abs() < 1e-12);
    }
}
