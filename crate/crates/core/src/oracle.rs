//! Independent truncated-Fock-space evolution used to cross-check the
//! covariance engine.
//!
//! The state vector lives on occupation numbers (n_1, ..., n_N) with
//! each n_j <= cutoff, evolved by the pair-creation generator
//! sum_edges eps (a_i+ a_j+ - a_i a_j). That matrix is exactly
//! antisymmetric even after truncation, so the norm is conserved to
//! rounding; the honest truncation diagnostic is the population sitting
//! on the cutoff boundary, not the norm defect.

use crate::error::Error;
use crate::gaussian::{evolve, vacuum_state};
use crate::interaction::{hamiltonian_generator, CouplingGraph};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Largest amplitude count the truncated evolution will allocate;
/// equals four modes at cutoff 14.
pub const DEFAULT_SIZE_CEILING: usize = 50_625;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Pure state on the truncated multimode Fock lattice.
#[derive(Debug, Clone)]
pub struct FockState {
    n_modes: usize,
    cutoff: usize,
    amp: Vec<Complex64>,
}

impl FockState {
    fn vacuum(n_modes: usize, cutoff: usize) -> FockState {
        let len = (cutoff + 1).pow(n_modes as u32);
        let mut amp = vec![Complex64::ZERO; len];
        amp[0] = Complex64::new(1.0, 0.0);
        FockState { n_modes, cutoff, amp }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    fn stride(&self, mode: usize) -> usize {
        (self.cutoff + 1).pow((self.n_modes - 1 - mode) as u32)
    }

    fn index(&self, occupancy: &[usize]) -> usize {
        occupancy
            .iter()
            .enumerate()
            .map(|(m, &n)| n * self.stride(m))
            .sum()
    }

    pub fn amplitude(&self, occupancy: &[usize]) -> Complex64 {
        assert_eq!(occupancy.len(), self.n_modes, "occupancy length");
        assert!(
            occupancy.iter().all(|&n| n <= self.cutoff),
            "occupancy exceeds cutoff"
        );
        self.amp[self.index(occupancy)]
    }

    pub fn population(&self, occupancy: &[usize]) -> f64 {
        self.amplitude(occupancy).norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Norm defect 1 - |psi|. Rounding-level by construction, since the
    /// truncated generator stays exactly antisymmetric.
    pub fn leakage(&self) -> f64 {
        1.0 - self.norm()
    }

    /// Probability of finding any mode exactly at the cutoff. This is
    /// the meaningful truncation-quality figure.
    pub fn boundary_population(&self) -> f64 {
        let dims = self.cutoff + 1;
        let mut total = 0.0;
        for (idx, a) in self.amp.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let at_edge = (0..self.n_modes)
                .any(|m| (idx / self.stride(m)) % dims == self.cutoff);
            if at_edge {
                total += p;
            }
        }
        total
    }

    /// Mean photon number per mode.
    pub fn mean_photon_numbers(&self) -> Vec<f64> {
        let dims = self.cutoff + 1;
        let mut out = vec![0.0; self.n_modes];
        for (idx, a) in self.amp.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            for (m, tally) in out.iter_mut().enumerate() {
                *tally += p * ((idx / self.stride(m)) % dims) as f64;
            }
        }
        out
    }
}

/// One application of the generator: dst += G src.
fn apply_generator(
    graph: &CouplingGraph,
    cutoff: usize,
    strides: &[usize],
    sqrt_n: &[f64],
    src: &[Complex64],
    dst: &mut [Complex64],
) {
    let dims = cutoff + 1;
    let n_modes = graph.n_modes();
    let mut occ = vec![0usize; n_modes];
    for (idx, &a) in src.iter().enumerate() {
        if a == Complex64::ZERO {
            continue;
        }
        for m in 0..n_modes {
            occ[m] = (idx / strides[m]) % dims;
        }
        for edge in graph.edges() {
            let (ni, nj) = (occ[edge.i], occ[edge.j]);
            if ni < cutoff && nj < cutoff {
                let w = edge.epsilon * sqrt_n[ni + 1] * sqrt_n[nj + 1];
                dst[idx + strides[edge.i] + strides[edge.j]] += w * a;
            }
            if ni > 0 && nj > 0 {
                let w = edge.epsilon * sqrt_n[ni] * sqrt_n[nj];
                dst[idx - strides[edge.i] - strides[edge.j]] -= w * a;
            }
        }
    }
}

/// Evolves vacuum under the pair-creation generator for time `t` on a
/// lattice truncated at `cutoff` photons per mode, with an explicit
/// ceiling on the amplitude count.
///
/// Integration is Taylor series with sub-stepping: the step count grows
/// with a crude generator-norm bound so each sub-step converges fast.
pub fn fock_evolve_with_ceiling(
    graph: &CouplingGraph,
    t: f64,
    cutoff: usize,
    ceiling: usize,
) -> Result<FockState, Error> {
    assert!(cutoff >= 1, "cutoff must be at least 1");
    assert!(t.is_finite() && t >= 0.0, "time must be finite and nonnegative");
    let n_modes = graph.n_modes();
    let required = (cutoff + 1)
        .checked_pow(n_modes as u32)
        .unwrap_or(usize::MAX);
    if required > ceiling {
        return Err(Error::DimensionGuard { required, ceiling });
    }

    let mut state = FockState::vacuum(n_modes, cutoff);
    if t == 0.0 || graph.edges().is_empty() {
        return Ok(state);
    }

    let strides: Vec<usize> = (0..n_modes).map(|m| state.stride(m)).collect();
    let sqrt_n: Vec<f64> = (0..=cutoff + 1).map(|n| (n as f64).sqrt()).collect();

    // Row-sum bound on the generator: each edge contributes at most two
    // transitions of weight eps*(cutoff+1).
    let bound: f64 = graph
        .edges()
        .iter()
        .map(|e| 2.0 * e.epsilon * (cutoff as f64 + 1.0))
        .sum();
    let substeps = (bound * t).ceil().max(1.0) as usize;
    let h = t / substeps as f64;

    let len = state.amp.len();
    let mut term = vec![Complex64::ZERO; len];
    let mut next = vec![Complex64::ZERO; len];
    for _ in 0..substeps {
        term.copy_from_slice(&state.amp);
        let mut acc = state.amp.clone();
        for k in 1..=200u32 {
            next.iter_mut().for_each(|v| *v = Complex64::ZERO);
            apply_generator(graph, cutoff, &strides, &sqrt_n, &term, &mut next);
            let scale = h / f64::from(k);
            let mut term_sq = 0.0;
            let mut acc_sq = 0.0;
            for i in 0..len {
                term[i] = next[i] * scale;
                acc[i] += term[i];
                term_sq += term[i].norm_sqr();
                acc_sq += acc[i].norm_sqr();
            }
            if term_sq <= 1e-34 * acc_sq {
                break;
            }
        }
        state.amp.copy_from_slice(&acc);
    }
    Ok(state)
}

/// [`fock_evolve_with_ceiling`] at the default amplitude-count ceiling.
pub fn fock_evolve(graph: &CouplingGraph, t: f64, cutoff: usize) -> Result<FockState, Error> {
    fock_evolve_with_ceiling(graph, t, cutoff, DEFAULT_SIZE_CEILING)
}

/// Lowered copy a_mode |psi>, reusing the state's indexing.
fn lowered(state: &FockState, mode: usize) -> Vec<Complex64> {
    let dims = state.cutoff + 1;
    let stride = state.stride(mode);
    let mut out = vec![Complex64::ZERO; state.amp.len()];
    for (idx, v) in out.iter_mut().enumerate() {
        let n = (idx / stride) % dims;
        if n < state.cutoff {
            *v = ((n + 1) as f64).sqrt() * state.amp[idx + stride];
        }
    }
    out
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Quadrature mean vector and covariance matrix of a Fock state, in the
/// same (x_1, p_1, ..., x_N, p_N) ordering the covariance engine uses.
pub fn fock_covariance(state: &FockState) -> (DVector<f64>, DMatrix<f64>) {
    let n = state.n_modes;
    let low: Vec<Vec<Complex64>> = (0..n).map(|m| lowered(state, m)).collect();
    let alpha: Vec<Complex64> = (0..n).map(|m| inner(&state.amp, &low[m])).collect();

    // m_kl = <a_k+ a_l>, n_kl = <a_k a_l>
    let mut m = DMatrix::from_element(n, n, Complex64::ZERO);
    let mut nn = DMatrix::from_element(n, n, Complex64::ZERO);
    for k in 0..n {
        for l in 0..n {
            m[(k, l)] = inner(&low[k], &low[l]);
            // a_k a_l |psi> via lowering the already-lowered vector.
            let dims = state.cutoff + 1;
            let stride = state.stride(k);
            let mut chi = vec![Complex64::ZERO; state.amp.len()];
            for (idx, v) in chi.iter_mut().enumerate() {
                let occ = (idx / stride) % dims;
                if occ < state.cutoff {
                    *v = ((occ + 1) as f64).sqrt() * low[l][idx + stride];
                }
            }
            nn[(k, l)] = inner(&state.amp, &chi);
        }
    }

    let mut mean = DVector::zeros(2 * n);
    for k in 0..n {
        mean[2 * k] = SQRT2 * alpha[k].re;
        mean[2 * k + 1] = SQRT2 * alpha[k].im;
    }
    let mut cov = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        for l in 0..n {
            let delta = if k == l { 0.5 } else { 0.0 };
            let xx = nn[(k, l)].re + m[(k, l)].re + delta - mean[2 * k] * mean[2 * l];
            let pp = -nn[(k, l)].re + m[(k, l)].re + delta
                - mean[2 * k + 1] * mean[2 * l + 1];
            let xp = nn[(k, l)].im + m[(k, l)].im - mean[2 * k] * mean[2 * l + 1];
            cov[(2 * k, 2 * l)] = xx;
            cov[(2 * k + 1, 2 * l + 1)] = pp;
            cov[(2 * k, 2 * l + 1)] = xp;
            cov[(2 * l + 1, 2 * k)] = xp;
        }
    }
    // Clean rounding asymmetry so downstream consumers see an exactly
    // symmetric matrix.
    let sym = (&cov + cov.transpose()) * 0.5;
    (mean, sym)
}

/// Outcome of running both engines on the same graph and time.
#[derive(Debug, Clone, Copy)]
pub struct OracleComparison {
    /// Largest entrywise gap between the two covariance matrices.
    pub max_deviation: f64,
    /// Norm defect of the truncated state (rounding-level).
    pub leakage: f64,
    /// Population at the truncation boundary (real truncation error).
    pub boundary_population: f64,
}

/// Evolves vacuum with both the covariance engine and the truncated
/// Fock engine and reports how far apart the covariances land.
pub fn oracle_compare(
    graph: &CouplingGraph,
    t: f64,
    cutoff: usize,
) -> Result<OracleComparison, Error> {
    let generator = hamiltonian_generator(graph);
    let gaussian = evolve(&vacuum_state(graph.n_modes()), &generator, t)?;
    let fock = fock_evolve(graph, t, cutoff)?;
    let (_, cov_fock) = fock_covariance(&fock);
    let diff = gaussian.cov() - &cov_fock;
    let max_deviation = diff.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    Ok(OracleComparison {
        max_deviation,
        leakage: fock.leakage(),
        boundary_population: fock.boundary_population(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(eps: f64) -> CouplingGraph {
        CouplingGraph::new(2, &[(0, 1, eps)]).unwrap()
    }

    #[test]
    fn zero_time_is_vacuum() {
        let state = fock_evolve(&pair(0.8), 0.0, 6).unwrap();
        assert_eq!(state.amplitude(&[0, 0]), Complex64::new(1.0, 0.0));
        assert!((state.norm() - 1.0).abs() < 1e-15);
        let (mean, cov) = fock_covariance(&state);
        assert!(mean.amax() < 1e-15);
        for k in 0..4 {
            for l in 0..4 {
                let want = if k == l { 0.5 } else { 0.0 };
                assert!((cov[(k, l)] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pair_source_matches_the_analytic_amplitude_ladder() {
        // One edge at rate 1 for time r: amplitude on (n, n) is
        // tanh(r)^n / cosh(r), all other occupancies empty.
        let r = 0.3;
        let state = fock_evolve(&pair(1.0), r, 12).unwrap();
        let (t, c) = (r.tanh(), r.cosh());
        for n in 0..=5 {
            let want = t.powi(n as i32) / c;
            let got = state.amplitude(&[n, n]);
            assert!((got.re - want).abs() < 1e-6, "n={n}: {} vs {want}", got.re);
            assert!(got.im.abs() < 1e-12);
        }
        assert!(state.population(&[1, 0]) < 1e-24);
        assert!(state.population(&[2, 1]) < 1e-24);
        assert!((state.norm() - 1.0).abs() < 1e-9);
        assert!(state.boundary_population() < 1e-10);
    }

    #[test]
    fn only_even_total_photon_numbers_are_populated() {
        let state = fock_evolve(&pair(1.0), 0.4, 8).unwrap();
        let dims = state.cutoff() + 1;
        for idx in 0..dims * dims {
            let total = idx / dims + idx % dims;
            if total % 2 == 1 {
                assert!(state.amp[idx].norm_sqr() < 1e-24);
            }
        }
    }

    #[test]
    fn photon_numbers_match_sinh_squared() {
        let r = 0.35;
        let state = fock_evolve(&pair(1.0), r, 12).unwrap();
        for n in state.mean_photon_numbers() {
            assert!((n - r.sinh().powi(2)).abs() < 1e-6);
        }
    }

    #[test]
    fn symmetric_graph_state_is_mode_exchange_invariant() {
        // Swapping modes 1<->2 and 4<->3 maps the symmetric four-mode
        // graph onto itself, so the state must be invariant too.
        let graph = CouplingGraph::four_mode_symmetric(0.3, 0.3);
        let state = fock_evolve(&graph, 0.5, 5).unwrap();
        let c = state.cutoff();
        for n1 in 0..=c {
            for n2 in 0..=c {
                for n3 in 0..=c {
                    for n4 in 0..=c {
                        let a = state.amplitude(&[n1, n2, n3, n4]);
                        let b = state.amplitude(&[n2, n1, n4, n3]);
                        assert!((a - b).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn squeezer_covariance_matches_the_hyperbolic_form() {
        // One edge, rate 1, time r: Var x = Var p = cosh(2r)/2 on each
        // mode, cross terms sinh(2r)/2 in x and -sinh(2r)/2 in p.
        let r = 0.3;
        let state = fock_evolve(&pair(1.0), r, 12).unwrap();
        let (mean, cov) = fock_covariance(&state);
        assert!(mean.amax() < 1e-12);
        let (ch, sh) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        let want = [
            [ch, 0.0, sh, 0.0],
            [0.0, ch, 0.0, -sh],
            [sh, 0.0, ch, 0.0],
            [0.0, -sh, 0.0, ch],
        ];
        for k in 0..4 {
            for l in 0..4 {
                assert!(
                    (cov[(k, l)] - want[k][l]).abs() < 1e-4,
                    "({k},{l}): {} vs {}",
                    cov[(k, l)],
                    want[k][l]
                );
            }
        }
    }

    #[test]
    fn covariances_agree_with_the_gaussian_engine() {
        let graph = CouplingGraph::four_mode_symmetric(0.15, 0.15);
        let report = oracle_compare(&graph, 1.0, 10).unwrap();
        assert!(report.max_deviation < 1e-3, "deviation {}", report.max_deviation);
        assert!(report.leakage.abs() < 1e-9);
        assert!(report.boundary_population < 1e-6);
    }

    #[test]
    fn zero_graph_comparison_is_exact() {
        let graph = CouplingGraph::new(3, &[]).unwrap();
        let report = oracle_compare(&graph, 2.0, 4).unwrap();
        assert!(report.max_deviation < 1e-14);
        assert!(report.leakage.abs() < 1e-14);
    }

    #[test]
    fn deviation_shrinks_as_the_cutoff_grows() {
        let graph = pair(1.0);
        let coarse = oracle_compare(&graph, 0.5, 4).unwrap();
        let fine = oracle_compare(&graph, 0.5, 12).unwrap();
        assert!(fine.max_deviation < coarse.max_deviation);
        assert!(fine.boundary_population < coarse.boundary_population);
    }

    #[test]
    fn total_photon_number_matches_the_gaussian_engine() {
        use crate::metrics::mean_photon_numbers;
        let graph = CouplingGraph::four_mode_symmetric(0.2, 0.1);
        let t = 0.8;
        let fock = fock_evolve(&graph, t, 10).unwrap();
        let gaussian =
            evolve(&vacuum_state(4), &hamiltonian_generator(&graph), t).unwrap();
        let total_fock: f64 = fock.mean_photon_numbers().iter().sum();
        let total_gauss: f64 = mean_photon_numbers(&gaussian).iter().sum();
        assert!((total_fock - total_gauss).abs() < 1e-6);
    }

    #[test]
    fn amplitude_count_is_guarded() {
        let graph = CouplingGraph::four_mode_symmetric(0.1, 0.1);
        let err = fock_evolve(&graph, 0.1, 15).unwrap_err();
        match err {
            Error::DimensionGuard { required, ceiling } => {
                assert_eq!(required, 65_536);
                assert_eq!(ceiling, DEFAULT_SIZE_CEILING);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(fock_evolve_with_ceiling(&pair(0.5), 0.1, 8, 10).is_err());
    }
}
