//! Small linear-algebra helpers shared across modules.

use nalgebra::DMatrix;

/// Symplectic form for `n_modes` modes in (x1, p1, x2, p2, ...) ordering:
/// block diagonal with [[0, 1], [-1, 0]] per mode.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for m in 0..n_modes {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    omega
}

/// Largest absolute entry of a matrix.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()))
}

/// Symmetric square root of a positive semidefinite matrix.
/// Eigenvalues within roundoff below zero are clamped to zero.
pub fn symmetric_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let q = eig.eigenvectors;
    &q * DMatrix::from_diagonal(&sqrt_vals) * q.transpose()
}

/// Symplectic eigenvalues of a covariance matrix (one per mode, sorted
/// ascending). Computed from the singular values of R * Omega * R with
/// R the symmetric square root of the covariance; the singular values
/// come in equal pairs and each pair is one symplectic eigenvalue.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Vec<f64> {
    let n_modes = cov.nrows() / 2;
    assert_eq!(cov.nrows(), 2 * n_modes);
    assert_eq!(cov.nrows(), cov.ncols());
    let r = symmetric_sqrt(cov);
    let m = &r * symplectic_form(n_modes) * &r;
    let svd = m.svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| a.partial_cmp(b).expect("singular values are finite"));
    (0..n_modes).map(|k| 0.5 * (sv[2 * k] + sv[2 * k + 1])).collect()
}
