//! Gaussian states and their symplectic evolution.
//!
//! A state over N modes is a mean vector (length 2N) and a covariance
//! matrix (2N x 2N) in (x1, p1, x2, p2, ...) ordering with vacuum
//! variance 1/2. Evolution under a pair-coupling generator K is the
//! linear map S = exp(K t), which must be symplectic: S Omega S^T =
//! Omega. Every computed exponential is checked against that identity
//! and rejected if the residual exceeds 1e-8.

use crate::error::Error;
use crate::interaction::GeneratorMatrix;
use crate::linalg::{max_abs, symplectic_eigenvalues, symplectic_form};
use nalgebra::{DMatrix, DVector};

/// Symmetry defect allowed in a covariance matrix, relative to its scale.
const COV_SYMMETRY_TOL: f64 = 1e-12;
/// Ceiling on the symplectic residual of a computed propagator.
const SYMPLECTIC_TOL: f64 = 1e-8;
/// Slack below the vacuum floor allowed by the uncertainty check.
const UNCERTAINTY_TOL: f64 = 1e-9;

/// Mean vector and covariance matrix of a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state from parts, checking dimensions and symmetry.
    pub fn from_parts(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self, Error> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::DimensionMismatch { expected: 2, got: dim });
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: cov.nrows() });
        }
        let defect = max_abs(&(&cov - cov.transpose()));
        if defect > COV_SYMMETRY_TOL * (1.0 + max_abs(&cov)) {
            return Err(Error::OutOfRange(format!(
                "covariance is not symmetric (defect {defect:.3e})"
            )));
        }
        Ok(Self { n_modes: dim / 2, mean, cov })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Symplectic spectrum of the covariance, sorted ascending. Physical
    /// states satisfy the uncertainty floor nu >= 1/2 for every value;
    /// pure states sit exactly at 1/2.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        symplectic_eigenvalues(&self.cov)
    }

    /// Uncertainty-principle check with a small numerical allowance.
    pub fn is_physical(&self) -> bool {
        self.symplectic_eigenvalues()
            .iter()
            .all(|&nu| nu >= 0.5 - UNCERTAINTY_TOL)
    }
}

/// The N-mode vacuum: zero mean, covariance I/2.
pub fn vacuum_state(n_modes: usize) -> GaussianState {
    assert!(n_modes >= 1, "states need at least one mode");
    GaussianState {
        n_modes,
        mean: DVector::zeros(2 * n_modes),
        cov: DMatrix::identity(2 * n_modes, 2 * n_modes) * 0.5,
    }
}

/// A checked symplectic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
    n_modes: usize,
}

impl SymplecticTransform {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Largest entry of S Omega S^T - Omega.
    pub fn residual(&self) -> f64 {
        residual_of(&self.matrix, self.n_modes)
    }
}

fn residual_of(s: &DMatrix<f64>, n_modes: usize) -> f64 {
    let omega = symplectic_form(n_modes);
    max_abs(&(s * &omega * s.transpose() - omega))
}

/// Deviation of a transform from the symplectic group, as the largest
/// entry of S Omega S^T - Omega.
pub fn symplectic_residual(s: &SymplecticTransform) -> f64 {
    s.residual()
}

/// Propagator exp(K t) for a coupling generator, residual-checked.
pub fn propagator(generator: &GeneratorMatrix, t: f64) -> Result<SymplecticTransform, Error> {
    let n_modes = generator.n_modes();
    let s = (generator.matrix() * t).exp();
    let residual = residual_of(&s, n_modes);
    if !residual.is_finite() || residual > SYMPLECTIC_TOL {
        return Err(Error::NonSymplectic { residual });
    }
    Ok(SymplecticTransform { matrix: s, n_modes })
}

/// Evolves a state for time `t` under a coupling generator.
pub fn evolve(
    state: &GaussianState,
    generator: &GeneratorMatrix,
    t: f64,
) -> Result<GaussianState, Error> {
    if generator.n_modes() != state.n_modes {
        return Err(Error::DimensionMismatch {
            expected: state.n_modes,
            got: generator.n_modes(),
        });
    }
    let s = propagator(generator, t)?;
    let mean = s.matrix() * &state.mean;
    let raw = s.matrix() * &state.cov * s.matrix().transpose();
    // The product is symmetric up to roundoff; restore it exactly.
    let cov = (&raw + raw.transpose()) * 0.5;
    Ok(GaussianState { n_modes: state.n_modes, mean, cov })
}

/// Pure-loss channel: mode j keeps intensity fraction `transmissions[j]`
/// and admixes vacuum for the rest. Transmission 1 is the identity and
/// 0 replaces the mode by vacuum.
pub fn apply_loss(state: &GaussianState, transmissions: &[f64]) -> Result<GaussianState, Error> {
    if transmissions.len() != state.n_modes {
        return Err(Error::DimensionMismatch {
            expected: state.n_modes,
            got: transmissions.len(),
        });
    }
    for (j, &tau) in transmissions.iter().enumerate() {
        if !(tau.is_finite() && (0.0..=1.0).contains(&tau)) {
            return Err(Error::OutOfRange(format!(
                "transmission for mode {} must lie in [0, 1], got {tau}",
                j + 1
            )));
        }
    }
    let dim = 2 * state.n_modes;
    let root: Vec<f64> = transmissions.iter().map(|&t| t.sqrt()).collect();
    let mut mean = state.mean.clone();
    for a in 0..dim {
        mean[a] *= root[a / 2];
    }
    let mut cov = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            let scale = root[a / 2] * root[b / 2];
            let vacuum = if a == b { (1.0 - transmissions[a / 2]) * 0.5 } else { 0.0 };
            cov[(a, b)] = scale * state.cov[(a, b)] + vacuum;
        }
    }
    Ok(GaussianState { n_modes: state.n_modes, mean, cov })
}
