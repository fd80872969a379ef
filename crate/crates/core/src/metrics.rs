//! Observables and entanglement measures on Gaussian states.

use crate::error::Error;
use crate::gaussian::{evolve, vacuum_state, GaussianState};
use crate::interaction::GeneratorMatrix;
use crate::linalg::symplectic_eigenvalues;
use nalgebra::DVector;

/// Mean photon number of each mode: (Var x + Var p + <x>^2 + <p>^2 - 1)/2.
pub fn mean_photon_numbers(state: &GaussianState) -> Vec<f64> {
    let cov = state.cov();
    let mean = state.mean();
    (0..state.n_modes())
        .map(|m| {
            let (ix, ip) = (2 * m, 2 * m + 1);
            0.5 * (cov[(ix, ix)] + cov[(ip, ip)] + mean[ix] * mean[ix] + mean[ip] * mean[ip]
                - 1.0)
        })
        .collect()
}

/// Variance of the joint quadrature sum_a c_a r_a. The coefficient
/// vector is normalized internally, so the vacuum value is 1/2 for any
/// nonzero input.
pub fn joint_quadrature_variance(state: &GaussianState, coeffs: &[f64]) -> Result<f64, Error> {
    let dim = 2 * state.n_modes();
    if coeffs.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: coeffs.len() });
    }
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let c = DVector::from_row_slice(coeffs) / norm;
    Ok((c.transpose() * state.cov() * &c)[(0, 0)])
}

/// The four canonical two-mode quadrature combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadCombo {
    XDiff,
    XSum,
    PDiff,
    PSum,
}

impl QuadCombo {
    pub const ALL: [QuadCombo; 4] = [
        QuadCombo::XDiff,
        QuadCombo::XSum,
        QuadCombo::PDiff,
        QuadCombo::PSum,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            QuadCombo::XDiff => "x-difference",
            QuadCombo::XSum => "x-sum",
            QuadCombo::PDiff => "p-difference",
            QuadCombo::PSum => "p-sum",
        }
    }
}

/// Best (smallest) variance among the canonical combinations of a mode
/// pair, and which combination attains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeSqueezing {
    pub variance: f64,
    pub combo: QuadCombo,
}

/// Scans (x_i +/- x_j)/sqrt(2) and (p_i +/- p_j)/sqrt(2) for the lowest
/// variance. Values below the vacuum 1/2 witness squeezing. Ties keep
/// the earliest combination in `QuadCombo::ALL` order.
pub fn two_mode_squeezing(
    state: &GaussianState,
    i: usize,
    j: usize,
) -> Result<TwoModeSqueezing, Error> {
    let n = state.n_modes();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, n_modes: n });
        }
    }
    if i == j {
        return Err(Error::OutOfRange(format!(
            "two-mode squeezing needs distinct modes, got {i} twice"
        )));
    }
    let mut best: Option<TwoModeSqueezing> = None;
    for combo in QuadCombo::ALL {
        let mut c = vec![0.0; 2 * n];
        let (off, sign) = match combo {
            QuadCombo::XDiff => (0, -1.0),
            QuadCombo::XSum => (0, 1.0),
            QuadCombo::PDiff => (1, -1.0),
            QuadCombo::PSum => (1, 1.0),
        };
        c[2 * i + off] = 1.0;
        c[2 * j + off] = sign;
        let variance = joint_quadrature_variance(state, &c)?;
        if best.is_none_or(|b| variance < b.variance) {
            best = Some(TwoModeSqueezing { variance, combo });
        }
    }
    Ok(best.expect("four combinations were scanned"))
}

/// Logarithmic negativity of the bipartition `partition` vs the rest.
///
/// The partial transpose flips the sign of every p quadrature on the
/// partition side; symplectic eigenvalues of the transposed covariance
/// below 1/2 contribute -log2(2 nu) each. The result is symmetric in
/// partition vs complement and zero for separable states.
pub fn log_negativity(state: &GaussianState, partition: &[usize]) -> Result<f64, Error> {
    let n = state.n_modes();
    if partition.is_empty() {
        return Err(Error::InvalidPartition("partition is empty".into()));
    }
    let mut seen = vec![false; n];
    for &m in partition {
        if m >= n {
            return Err(Error::IndexOutOfRange { index: m, n_modes: n });
        }
        if seen[m] {
            return Err(Error::InvalidPartition(format!("mode {m} listed twice")));
        }
        seen[m] = true;
    }
    if partition.len() == n {
        return Err(Error::InvalidPartition(
            "partition must leave at least one mode on the other side".into(),
        ));
    }
    let mut cov = state.cov().clone();
    for &m in partition {
        let p = 2 * m + 1;
        for a in 0..2 * n {
            cov[(p, a)] = -cov[(p, a)];
            cov[(a, p)] = -cov[(a, p)];
        }
    }
    let mut e_n = 0.0;
    for nu in symplectic_eigenvalues(&cov) {
        if nu < 0.5 {
            e_n -= (2.0 * nu).log2();
        }
    }
    Ok(e_n)
}

/// Which mode pairs develop correlations at short times.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationGraph {
    n_modes: usize,
    threshold: f64,
    adjacency: Vec<bool>,
}

impl CorrelationGraph {
    fn slot(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a * self.n_modes + b
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.adjacency[self.slot(i, j)]
    }

    /// Adjacent pairs (i < j) in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n_modes {
            for j in (i + 1)..self.n_modes {
                if self.is_adjacent(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.n_modes).filter(|&j| self.is_adjacent(i, j)).count()
    }
}

/// Evolves vacuum for a short time and marks mode pairs whose
/// cross-covariance block exceeds `threshold * t_small`. Directly
/// coupled pairs develop correlations linearly in time; uncoupled pairs
/// only quadratically, so a short probe separates the two cleanly.
pub fn correlation_graph(
    generator: &GeneratorMatrix,
    t_small: f64,
    threshold: f64,
) -> Result<CorrelationGraph, Error> {
    if !(t_small.is_finite() && t_small > 0.0) {
        return Err(Error::OutOfRange(format!(
            "probe time must be positive, got {t_small}"
        )));
    }
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::OutOfRange(format!(
            "correlation threshold must be positive, got {threshold}"
        )));
    }
    let n = generator.n_modes();
    let state = evolve(&vacuum_state(n), generator, t_small)?;
    let cov = state.cov();
    let mut adjacency = vec![false; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut peak = 0.0_f64;
            for a in 0..2 {
                for b in 0..2 {
                    peak = peak.max(cov[(2 * i + a, 2 * j + b)].abs());
                }
            }
            adjacency[i * n + j] = peak > threshold * t_small;
        }
    }
    Ok(CorrelationGraph { n_modes: n, threshold, adjacency })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::apply_loss;
    use crate::interaction::{hamiltonian_generator, CouplingGraph};

    const LOG2_E: f64 = std::f64::consts::LOG2_E;

    fn squeezer_pair(r: f64) -> GaussianState {
        let gen = hamiltonian_generator(&CouplingGraph::new(2, &[(0, 1, 1.0)]).unwrap());
        evolve(&vacuum_state(2), &gen, r).unwrap()
    }

    /// Four modes, two disjoint squeezer pairs 1-4 and 2-3.
    fn disjoint_pairs(r: f64) -> GaussianState {
        let graph = CouplingGraph::new(4, &[(0, 3, 1.0), (1, 2, 1.0)]).unwrap();
        evolve(&vacuum_state(4), &hamiltonian_generator(&graph), r).unwrap()
    }

    #[test]
    fn vacuum_has_no_photons_and_shot_noise_everywhere() {
        let v = vacuum_state(3);
        for n in mean_photon_numbers(&v) {
            assert!(n.abs() < 1e-15);
        }
        let var = joint_quadrature_variance(&v, &[1.0, 0.0, 2.0, 0.0, 0.0, -1.0]).unwrap();
        assert!((var - 0.5).abs() < 1e-15);
    }

    #[test]
    fn squeezer_photon_number_is_sinh_squared() {
        let state = squeezer_pair(0.5);
        let expect = 0.5_f64.sinh().powi(2);
        assert!((expect - 0.27154).abs() < 1e-5);
        for n in mean_photon_numbers(&state) {
            assert!((n - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn photon_numbers_scale_linearly_with_transmission() {
        let state = squeezer_pair(0.5);
        let before = mean_photon_numbers(&state);
        let after = mean_photon_numbers(&apply_loss(&state, &[0.7, 0.3]).unwrap());
        assert!((after[0] - 0.7 * before[0]).abs() < 1e-12);
        assert!((after[1] - 0.3 * before[1]).abs() < 1e-12);
    }

    #[test]
    fn coefficients_are_normalized_internally() {
        let state = squeezer_pair(0.4);
        let a = joint_quadrature_variance(&state, &[1.0, 0.0, -1.0, 0.0]).unwrap();
        let b = joint_quadrature_variance(&state, &[5.0, 0.0, -5.0, 0.0]).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn zero_coefficients_are_rejected() {
        let v = vacuum_state(2);
        assert!(matches!(
            joint_quadrature_variance(&v, &[0.0; 4]),
            Err(Error::ZeroVector)
        ));
        assert!(matches!(
            joint_quadrature_variance(&v, &[1.0; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn squeezer_pair_squeezes_x_difference_to_exponential_floor() {
        let state = squeezer_pair(0.5);
        let best = two_mode_squeezing(&state, 0, 1).unwrap();
        assert_eq!(best.combo, QuadCombo::XDiff);
        assert!((best.variance - 0.5 * (-1.0_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn outer_pair_of_the_single_pump_graph_is_a_plain_squeezer() {
        // Dual coupling off: modes 1 and 4 form a standalone squeezer
        // pair inside the four-mode state.
        let gen = hamiltonian_generator(&CouplingGraph::four_mode_symmetric(0.5, 0.0));
        let state = evolve(&vacuum_state(4), &gen, 1.0).unwrap();
        let best = two_mode_squeezing(&state, 0, 3).unwrap();
        assert!((best.variance - 0.5 * (-1.0_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn non_edge_pairs_show_no_squeezing_at_short_times() {
        let gen = hamiltonian_generator(&CouplingGraph::four_mode_symmetric(0.5, 0.5));
        let state = evolve(&vacuum_state(4), &gen, 1e-3).unwrap();
        let best = two_mode_squeezing(&state, 0, 1).unwrap();
        assert!(best.variance >= 0.5 - 1e-9);
    }

    #[test]
    fn equal_coupling_leaves_the_difference_supermode_at_shot_noise() {
        // With equal single and dual rates the (x1-x2)/sqrt(2) supermode
        // decouples from the dynamics entirely.
        let gen = hamiltonian_generator(&CouplingGraph::four_mode_symmetric(0.3, 0.3));
        let state = evolve(&vacuum_state(4), &gen, 1.7).unwrap();
        let mut c = vec![0.0; 8];
        c[0] = 1.0;
        c[2] = -1.0;
        let var = joint_quadrature_variance(&state, &c).unwrap();
        assert!((var - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_mode_squeezing_validates_indices() {
        let v = vacuum_state(2);
        assert!(matches!(
            two_mode_squeezing(&v, 0, 2),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(two_mode_squeezing(&v, 1, 1).is_err());
    }

    #[test]
    fn squeezer_log_negativity_is_two_r_log2_e() {
        let state = squeezer_pair(0.5);
        let e_n = log_negativity(&state, &[0]).unwrap();
        assert!((e_n - LOG2_E).abs() < 1e-9);
        assert!((e_n - 2.0 * 0.5 * LOG2_E).abs() < 1e-9);
    }

    #[test]
    fn vacuum_is_separable() {
        assert_eq!(log_negativity(&vacuum_state(4), &[0, 2]).unwrap(), 0.0);
    }

    #[test]
    fn log_negativity_matches_on_complement() {
        let state = disjoint_pairs(0.37);
        let a = log_negativity(&state, &[0, 1]).unwrap();
        let b = log_negativity(&state, &[2, 3]).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn disjoint_pairs_add_their_negativities() {
        // Cut {1,2} vs {3,4} crosses both squeezer pairs.
        let state = disjoint_pairs(0.5);
        let e_n = log_negativity(&state, &[0, 1]).unwrap();
        assert!((e_n - 2.0 * LOG2_E).abs() < 1e-9);
    }

    #[test]
    fn symmetric_four_mode_cut_doubles_the_effective_squeezing() {
        // Equal single and dual rates: across {1,2} vs {3,4} the sum
        // supermodes form one squeezer at twice the edge rate while the
        // difference supermodes stay in vacuum. At 2*eps*t = 1 that is
        // E_N = 2 log2(e).
        let gen = hamiltonian_generator(&CouplingGraph::four_mode_symmetric(0.5, 0.5));
        let state = evolve(&vacuum_state(4), &gen, 1.0).unwrap();
        let e_n = log_negativity(&state, &[0, 1]).unwrap();
        assert!((e_n - 2.8853900817779268).abs() < 1e-9);
        assert!((e_n - 2.0 * LOG2_E).abs() < 1e-9);
    }

    #[test]
    fn log_negativity_never_increases_under_loss() {
        let state = disjoint_pairs(0.6);
        let before = log_negativity(&state, &[0]).unwrap();
        let after =
            log_negativity(&apply_loss(&state, &[0.7; 4]).unwrap(), &[0]).unwrap();
        assert!(after < before);
    }

    #[test]
    fn partitions_are_validated() {
        let v = vacuum_state(3);
        assert!(matches!(
            log_negativity(&v, &[]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            log_negativity(&v, &[0, 1, 2]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            log_negativity(&v, &[1, 1]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            log_negativity(&v, &[5]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn correlation_graph_recovers_the_four_cycle() {
        let gen = hamiltonian_generator(&CouplingGraph::four_mode_symmetric(0.5, 0.5));
        let graph = correlation_graph(&gen, 1e-3, 0.1).unwrap();
        assert_eq!(graph.edges(), vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
        for m in 0..4 {
            assert_eq!(graph.degree(m), 2);
        }
    }

    #[test]
    fn correlation_graph_without_dual_coupling_is_two_pairs() {
        let gen = hamiltonian_generator(&CouplingGraph::four_mode_symmetric(0.5, 0.0));
        let graph = correlation_graph(&gen, 1e-3, 0.1).unwrap();
        assert_eq!(graph.edges(), vec![(0, 3), (1, 2)]);
    }

    #[test]
    fn uncoupled_modes_never_correlate() {
        let gen = hamiltonian_generator(&CouplingGraph::new(4, &[]).unwrap());
        let graph = correlation_graph(&gen, 1e-3, 0.1).unwrap();
        assert!(graph.edges().is_empty());
    }

    #[test]
    fn cross_covariance_grows_linearly_on_edges_and_quadratically_off() {
        // Log-log slope of the peak cross-covariance over two decades:
        // directly coupled pairs grow like t, uncoupled like t^2.
        let gen = hamiltonian_generator(&CouplingGraph::four_mode_symmetric(0.5, 0.5));
        let block_peak = |cov: &nalgebra::DMatrix<f64>, i: usize, j: usize| {
            let mut peak = 0.0_f64;
            for a in 0..2 {
                for b in 0..2 {
                    peak = peak.max(cov[(2 * i + a, 2 * j + b)].abs());
                }
            }
            peak
        };
        let fit_slope = |i: usize, j: usize| {
            let n = 9;
            let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
            for k in 0..n {
                let t = 1e-4 * 10f64.powf(2.0 * k as f64 / (n - 1) as f64);
                let state = evolve(&vacuum_state(4), &gen, t).unwrap();
                let (x, y) = (t.ln(), block_peak(state.cov(), i, j).ln());
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            let n = n as f64;
            (n * sxy - sx * sy) / (n * sxx - sx * sx)
        };
        assert!(fit_slope(0, 3) <= 1.1, "edge pair slope {}", fit_slope(0, 3));
        assert!(fit_slope(0, 1) >= 1.9, "non-edge slope {}", fit_slope(0, 1));
    }

    #[test]
    fn correlation_probe_rejects_bad_parameters() {
        let gen = hamiltonian_generator(&CouplingGraph::four_mode_symmetric(0.5, 0.5));
        assert!(correlation_graph(&gen, 0.0, 0.1).is_err());
        assert!(correlation_graph(&gen, 1e-3, 0.0).is_err());
    }
}
