//! Simulator core for dual-pump four-wave mixing in a thin nonlinear medium.
//!
//! Two strong pump beams cross at a small angle and drive parametric
//! pair production into weak output modes. The crate covers the pipeline
//! from beam geometry to entanglement metrics:
//!
//! * [`geometry`]: wavevector phase matching, the spontaneous emission
//!   cone around each pump, and the four-mode / six-mode output layouts.
//! * [`interaction`]: pair-coupling graphs, the quadratic-Hamiltonian
//!   generator in quadrature space, and gain spectra.
//! * [`gaussian`]: Gaussian states (mean vector + covariance matrix),
//!   symplectic evolution, and loss channels.
//! * [`metrics`]: photon numbers, two-mode squeezing, logarithmic
//!   negativity, and short-time correlation graphs.
//! * [`oracle`]: a truncated Fock-space integrator used as an
//!   independent cross-check of the Gaussian engine.
//!
//! Conventions: quadratures are ordered (x1, p1, x2, p2, ...), vacuum
//! variance is 1/2, and angles are radians unless a name says otherwise.

pub mod error;
pub mod gaussian;
pub mod geometry;
pub mod interaction;
pub mod linalg;
pub mod metrics;
pub mod oracle;

pub use error::Error;
pub use gaussian::{
    apply_loss, evolve, propagator, symplectic_residual, vacuum_state, GaussianState,
    SymplecticTransform,
};
pub use geometry::{
    cone_half_angle, enumerate_candidate_configs, phase_mismatch, solve_four_mode_geometry,
    CandidateConfig, ConfigKind, DispersionParams, ModeGeometry, PumpConfig, Wavevector,
};
pub use interaction::{
    compare_configurations, coupling_graph_from_powers, gain_spectrum, hamiltonian_generator,
    ComparisonEntry, ComparisonReport, CouplingEdge, CouplingGraph, GeneratorMatrix,
};
pub use metrics::{
    correlation_graph, joint_quadrature_variance, log_negativity, mean_photon_numbers,
    two_mode_squeezing, CorrelationGraph, QuadCombo, TwoModeSqueezing,
};
pub use oracle::{
    fock_covariance, fock_evolve, fock_evolve_with_ceiling, oracle_compare, FockState,
    OracleComparison, DEFAULT_SIZE_CEILING,
};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
