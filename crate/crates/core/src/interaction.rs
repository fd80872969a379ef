//! Pair-coupling graphs and their quadratic-Hamiltonian generators.
//!
//! Each undirected edge (i, j) with weight epsilon stands for a parametric
//! pair-production term: photons are created (or annihilated) jointly in
//! modes i and j at rate epsilon. In quadrature space the edge drives
//!
//! ```text
//! dx_i/dt = eps * x_j    dp_i/dt = -eps * p_j
//! ```
//!
//! and symmetrically in (i <-> j): amplification along x, deamplification
//! along p. Only the product epsilon * t is physical here; callers that
//! think in terms of a squeezing parameter r should pick t = r / epsilon.

use crate::error::Error;
use crate::geometry::{CandidateConfig, ConfigKind};
use nalgebra::DMatrix;

/// One undirected pair coupling: modes `i` and `j` at rate `epsilon` (1/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingEdge {
    pub i: usize,
    pub j: usize,
    pub epsilon: f64,
}

/// Undirected weighted graph of pair couplings over `n_modes` modes.
///
/// Structural invariants are enforced at construction: indices in range,
/// no self loops, no duplicate edges, weights finite and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGraph {
    n_modes: usize,
    edges: Vec<CouplingEdge>,
}

impl CouplingGraph {
    /// Builds a graph from (i, j, epsilon) triples, normalizing each edge
    /// to i < j.
    pub fn new(n_modes: usize, edges: &[(usize, usize, f64)]) -> Result<Self, Error> {
        if n_modes == 0 {
            return Err(Error::InvalidGraph("graph needs at least one mode".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for &(i, j, epsilon) in edges {
            if i >= n_modes || j >= n_modes {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for {n_modes} modes"
                )));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self loop on mode {i}")));
            }
            if !epsilon.is_finite() || epsilon < 0.0 {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) has invalid weight {epsilon}"
                )));
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            if !seen.insert((a, b)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
            }
            out.push(CouplingEdge { i: a, j: b, epsilon });
        }
        Ok(Self { n_modes, edges: out })
    }

    /// Four-mode graph in the symmetric parameterization: the two
    /// single-pump edges (modes 1-4 and 2-3) carry `eps_single`, the two
    /// dual-pump edges (1-3 and 2-4) carry `eps_dual`. Mode labels are
    /// 1..4 clockwise from top-left; indices here are 0-based.
    pub fn four_mode_symmetric(eps_single: f64, eps_dual: f64) -> Self {
        coupling_graph_from_powers(1.0, 1.0, eps_single, eps_dual)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn edges(&self) -> &[CouplingEdge] {
        &self.edges
    }

    /// Number of edges incident on mode `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.edges.iter().filter(|e| e.i == i || e.j == i).count()
    }

    /// Largest edge weight (zero for an empty edge set).
    pub fn max_epsilon(&self) -> f64 {
        self.edges.iter().fold(0.0_f64, |m, e| m.max(e.epsilon))
    }
}

/// Builds the four-mode coupling graph from pump powers (W) and gain
/// coefficients (1/(s W)).
///
/// Single-pump edges scale linearly with the driving pump's power; the
/// two dual-pump edges take one photon from each pump and scale with the
/// geometric mean sqrt(P_A * P_B). Edges whose weight comes out exactly
/// zero are omitted, so e.g. `g_dual = 0` leaves two disjoint two-mode
/// squeezers.
pub fn coupling_graph_from_powers(
    power_a: f64,
    power_b: f64,
    g_single: f64,
    g_dual: f64,
) -> CouplingGraph {
    assert!(
        power_a >= 0.0 && power_b >= 0.0 && g_single >= 0.0 && g_dual >= 0.0,
        "powers and gains must be nonnegative"
    );
    let eps_a = g_single * power_a;
    let eps_b = g_single * power_b;
    let eps_cross = g_dual * (power_a * power_b).sqrt();
    let all = [
        (0usize, 3usize, eps_a),     // modes 1-4, pumped by A alone
        (1, 2, eps_b),               // modes 2-3, pumped by B alone
        (0, 2, eps_cross),           // modes 1-3, one photon from each pump
        (1, 3, eps_cross),           // modes 2-4, one photon from each pump
    ];
    let edges: Vec<_> = all.into_iter().filter(|&(_, _, e)| e > 0.0).collect();
    CouplingGraph::new(4, &edges).expect("construction from powers satisfies graph invariants")
}

/// Generator K of the first-moment flow dr/dt = K r in (x1, p1, ...)
/// ordering. K lies in the symplectic Lie algebra: K Omega + Omega K^T = 0
/// holds exactly by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    matrix: DMatrix<f64>,
    n_modes: usize,
}

impl GeneratorMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }
}

/// Assembles the quadrature-space generator of a coupling graph.
pub fn hamiltonian_generator(graph: &CouplingGraph) -> GeneratorMatrix {
    let n = graph.n_modes();
    let mut k = DMatrix::zeros(2 * n, 2 * n);
    for e in graph.edges() {
        k[(2 * e.i, 2 * e.j)] += e.epsilon;
        k[(2 * e.j, 2 * e.i)] += e.epsilon;
        k[(2 * e.i + 1, 2 * e.j + 1)] -= e.epsilon;
        k[(2 * e.j + 1, 2 * e.i + 1)] -= e.epsilon;
    }
    GeneratorMatrix { matrix: k, n_modes: n }
}

/// Eigenvalues of the generator, sorted descending. The dominant value is
/// the exponential gain rate of the fastest-growing joint quadrature.
///
/// The spectrum of a valid graph is real (the generator is a symmetric
/// mode-coupling matrix tensored with diag(1, -1)); imaginary parts are
/// discarded below 1e-10 and anything larger than 1e-8 times the
/// generator norm reports a malformed generator.
pub fn gain_spectrum(graph: &CouplingGraph) -> Result<Vec<f64>, Error> {
    let k = hamiltonian_generator(graph);
    let norm = k.matrix().iter().fold(0.0_f64, |m, &v| m.max(v.abs()))
        * (2 * graph.n_modes()) as f64;
    let eig = k.matrix().clone().complex_eigenvalues();
    let mut max_imag = 0.0_f64;
    let mut vals: Vec<f64> = Vec::with_capacity(eig.len());
    for z in eig.iter() {
        max_imag = max_imag.max(z.im.abs());
        vals.push(z.re);
    }
    if max_imag > (1e-8 * norm).max(1e-10) {
        return Err(Error::NonRealSpectrum { max_imag, norm });
    }
    vals.sort_by(|a, b| b.partial_cmp(a).expect("eigenvalues are finite"));
    Ok(vals)
}

/// One row of a configuration ranking.
#[derive(Debug, Clone)]
pub struct ComparisonEntry {
    pub kind: ConfigKind,
    pub gain_score: f64,
    pub n_modes: usize,
    /// Edge count incident on each mode, in mode order.
    pub degrees: Vec<usize>,
}

/// Candidate configurations ranked by dominant gain, descending.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub entries: Vec<ComparisonEntry>,
}

/// Recomputes the dominant gain of each candidate and ranks them.
/// Ties keep the input order, which lists the four-mode layout first.
pub fn compare_configurations(
    candidates: &[CandidateConfig],
) -> Result<ComparisonReport, Error> {
    if candidates.len() < 2 {
        return Err(Error::TooFewCandidates(candidates.len()));
    }
    let mut entries = Vec::with_capacity(candidates.len());
    for c in candidates {
        let spectrum = gain_spectrum(&c.graph)?;
        let n = c.graph.n_modes();
        entries.push(ComparisonEntry {
            kind: c.kind,
            gain_score: spectrum[0],
            n_modes: n,
            degrees: (0..n).map(|i| c.graph.degree(i)).collect(),
        });
    }
    entries.sort_by(|a, b| {
        b.gain_score
            .partial_cmp(&a.gain_score)
            .expect("gain scores are finite")
    });
    Ok(ComparisonReport { entries })
}
