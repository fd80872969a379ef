//! Error type shared by all simulator modules.

use thiserror::Error;

/// Failure modes surfaced by the simulator core.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Phase matching cannot be closed; carries the residual at the
    /// bracket ends of the root search (rad/m, relative to 2 k_pump
    /// for the cone solve, absolute for the mode-layout solve).
    #[error("no phase-matched solution: {detail} (residuals {residual_lo:.3e}, {residual_hi:.3e})")]
    NoSolution {
        detail: String,
        residual_lo: f64,
        residual_hi: f64,
    },

    /// A coupling graph violated a structural invariant.
    #[error("invalid coupling graph: {0}")]
    InvalidGraph(String),

    /// The generator eigensolve produced an eigenvalue with an imaginary
    /// part too large to discard; signals a malformed generator.
    #[error("generator spectrum is not real: max |Im| {max_imag:.3e} vs norm {norm:.3e}")]
    NonRealSpectrum { max_imag: f64, norm: f64 },

    /// Operand dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A computed transform failed the symplectic residual check.
    #[error("transform failed symplectic check: residual {residual:.3e}")]
    NonSymplectic { residual: f64 },

    /// A physical parameter fell outside its admissible range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A quadrature combination was given with all-zero coefficients.
    #[error("joint quadrature coefficients are all zero")]
    ZeroVector,

    /// A mode index does not address a mode of the state.
    #[error("mode index {index} out of range for {n_modes} modes")]
    IndexOutOfRange { index: usize, n_modes: usize },

    /// A bipartition was empty, improper, or referenced bad indices.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// A truncated Fock computation would exceed the size ceiling.
    #[error("Fock space of {required} amplitudes exceeds ceiling {ceiling}")]
    DimensionGuard { required: usize, ceiling: usize },

    /// Too few candidate configurations to rank.
    #[error("configuration ranking needs at least two candidates, got {0}")]
    TooFewCandidates(usize),
}
