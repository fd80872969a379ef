//! Subcommand implementations. Each one validates the full config
//! first, then builds a [`Table`] plus optional human-readable notes
//! (notes go to stderr so stdout stays machine-readable).

use crate::config::{RunConfig, SweepParameter};
use crate::sweep::run_indexed;
use crate::table::Table;
use fwm_core::gaussian::{
    apply_loss, evolve, propagator, symplectic_residual, vacuum_state, GaussianState,
};
use fwm_core::geometry::{
    cone_half_angle, enumerate_candidate_configs, phase_mismatch, solve_four_mode_geometry,
    Wavevector,
};
use fwm_core::interaction::{
    compare_configurations, coupling_graph_from_powers, gain_spectrum, hamiltonian_generator,
    CouplingGraph, GeneratorMatrix,
};
use fwm_core::metrics::{
    correlation_graph, log_negativity, mean_photon_numbers, two_mode_squeezing,
};
use fwm_core::oracle::oracle_compare;
use fwm_core::{Error, SPEED_OF_LIGHT};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Largest eps*t the oracle subcommand will accept; beyond this the
/// truncated engine is not validated.
pub const ORACLE_EPS_T_CAP: f64 = 0.4;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or flag combination (exit 2).
    Config(String),
    /// Phase matching or another solve has no solution (exit 1).
    NoSolution(String),
    /// A resource or validity guard tripped (exit 3).
    Guard(String),
    /// Any other runtime failure (exit 1).
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::NoSolution(_) | CliError::Run(_) => 1,
            CliError::Guard(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::NoSolution(m)
            | CliError::Guard(m)
            | CliError::Run(m) => m,
        }
    }
}

fn core_err(e: Error) -> CliError {
    match e {
        Error::NoSolution { .. } => CliError::NoSolution(e.to_string()),
        Error::DimensionGuard { .. } => CliError::Guard(e.to_string()),
        other => CliError::Run(other.to_string()),
    }
}

#[derive(Debug)]
pub struct CommandOutput {
    pub table: Table,
    /// Informational lines for stderr.
    pub notes: Vec<String>,
    /// Set when the command ran to completion but the check it
    /// performs failed; main exits 1 after printing the table.
    pub failure: Option<String>,
}

impl CommandOutput {
    fn table(table: Table) -> CommandOutput {
        CommandOutput { table, notes: Vec::new(), failure: None }
    }
}

fn graph_from_config(cfg: &RunConfig) -> CouplingGraph {
    coupling_graph_from_powers(cfg.pump.power_a, cfg.pump.power_b, cfg.g_single, cfg.g_dual)
}

fn dominant_gain(graph: &CouplingGraph) -> Result<f64, CliError> {
    Ok(gain_spectrum(graph).map_err(core_err)?.first().copied().unwrap_or(0.0))
}

/// One-based pair list like "1-4 2-3".
fn edge_list_label(edges: &[(usize, usize)]) -> String {
    if edges.is_empty() {
        return "none".to_string();
    }
    edges
        .iter()
        .map(|(i, j)| format!("{}-{}", i + 1, j + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

fn partition_label(partition: &[usize]) -> String {
    partition.iter().map(|m| (m + 1).to_string()).collect::<Vec<_>>().join(",")
}

/// Squeezing-parameter grid for strength sweeps.
fn strength_grid(cfg: &RunConfig) -> Vec<f64> {
    let s = &cfg.sweep;
    (0..s.steps)
        .map(|i| s.min + (s.max - s.min) * i as f64 / (s.steps - 1) as f64)
        .collect()
}

/// eps_single of pump A, the reference rate that converts r to time.
fn reference_rate(cfg: &RunConfig) -> Result<f64, CliError> {
    let eps = cfg.g_single * cfg.pump.power_a;
    if eps > 0.0 {
        Ok(eps)
    } else {
        Err(CliError::Config(
            "mapping r to time needs g_single_hz_per_w and power_a_mw positive".to_string(),
        ))
    }
}

pub fn cmd_phase_match(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let theta = cone_half_angle(&cfg.dispersion, &cfg.pump).map_err(core_err)?;
    let geo = solve_four_mode_geometry(&cfg.pump, &cfg.dispersion).map_err(core_err)?;

    let omega_p = cfg.pump.pump_omega();
    let k_pump = cfg.dispersion.n_pump * omega_p / SPEED_OF_LIGHT;
    let k_a = Wavevector::from_direction(&cfg.pump.direction_a(), cfg.dispersion.n_pump, omega_p);
    let k_b = Wavevector::from_direction(&cfg.pump.direction_b(), cfg.dispersion.n_pump, omega_p);
    let index_of = |m: usize| {
        if geo.frequencies[m] < omega_p {
            cfg.dispersion.n_probe
        } else {
            cfg.dispersion.n_conj
        }
    };
    let out_k = |m: usize| {
        Wavevector::from_direction(&geo.directions[m], index_of(m), geo.frequencies[m])
    };

    let mut table = Table::new(["quantity", "value"]);
    table.push(vec!["cone_half_angle_mrad".into(), (theta * 1e3).into()]);
    table.push(vec!["layout_residual_rel".into(), (geo.residual / k_pump).into()]);
    table.push(vec!["degenerate".into(), geo.degenerate.into()]);
    // The four pairwise processes: two single-pump, two dual-pump.
    let processes: [(&str, Wavevector, Wavevector, usize, usize); 4] = [
        ("mismatch_rel_pair_14", k_a, k_a, 0, 3),
        ("mismatch_rel_pair_23", k_b, k_b, 1, 2),
        ("mismatch_rel_pair_13", k_a, k_b, 0, 2),
        ("mismatch_rel_pair_24", k_a, k_b, 1, 3),
    ];
    for (label, p1, p2, i, j) in processes {
        let dk = phase_mismatch(&[p1, p2], &[out_k(i), out_k(j)]).norm();
        table.push(vec![label.into(), (dk / (2.0 * k_pump)).into()]);
    }
    for m in 0..4 {
        let d = geo.directions[m];
        table.push(vec![format!("mode_{}_dir_x", m + 1).into(), d.x.into()]);
        table.push(vec![format!("mode_{}_dir_y", m + 1).into(), d.y.into()]);
        table.push(vec![format!("mode_{}_dir_z", m + 1).into(), d.z.into()]);
        table.push(vec![
            format!("mode_{}_freq_rad_per_s", m + 1).into(),
            geo.frequencies[m].into(),
        ]);
    }

    let mut out = CommandOutput::table(table);
    out.notes.push(format!("cone half-angle {:.4} mrad", theta * 1e3));
    if geo.degenerate {
        out.notes.push("layout is degenerate (collinear pumps or closed cone)".to_string());
    }
    Ok(out)
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let graph = graph_from_config(cfg);
    let gen = hamiltonian_generator(&graph);
    let prop = propagator(&gen, cfg.evolve_time).map_err(core_err)?;
    let state = evolve(&vacuum_state(4), &gen, cfg.evolve_time).map_err(core_err)?;
    let lossy = apply_loss(&state, &cfg.taus).map_err(core_err)?;
    let before = mean_photon_numbers(&state);
    let after = mean_photon_numbers(&lossy);

    let mut table = Table::new(["mode", "n_evolved", "n_after_loss", "var_x", "var_p"]);
    for m in 0..4 {
        table.push(vec![
            (m + 1).into(),
            before[m].into(),
            after[m].into(),
            state.cov()[(2 * m, 2 * m)].into(),
            state.cov()[(2 * m + 1, 2 * m + 1)].into(),
        ]);
    }
    let mut out = CommandOutput::table(table);
    out.notes.push(format!("dominant gain rate {:.6} 1/s", dominant_gain(&graph)?));
    out.notes.push(format!(
        "propagator symplectic residual {:.3e}",
        symplectic_residual(&prop)
    ));
    Ok(out)
}

/// Photon numbers after a short evolution at one power split.
fn ratio_point(cfg: &RunConfig, ratio: f64) -> Result<(Vec<f64>, f64), CliError> {
    let power_a = ratio * cfg.sweep.total_power;
    let power_b = (1.0 - ratio) * cfg.sweep.total_power;
    let graph = coupling_graph_from_powers(power_a, power_b, cfg.g_single, cfg.g_dual);
    let state = evolve(&vacuum_state(4), &hamiltonian_generator(&graph), cfg.sweep.time)
        .map_err(core_err)?;
    Ok((mean_photon_numbers(&state), dominant_gain(&graph)?))
}

pub fn cmd_sweep_ratio(cfg: &RunConfig, workers: usize) -> Result<CommandOutput, CliError> {
    if cfg.sweep.parameter != SweepParameter::PowerRatio {
        return Err(CliError::Config(
            "sweep-ratio needs [sweep] parameter = power_ratio".to_string(),
        ));
    }
    // Interior grid over the open interval (0,1): i/steps for
    // i = 1..steps-1, which contains 0.5 exactly for even step counts.
    let steps = cfg.sweep.steps;
    let rows = run_indexed(steps - 1, workers, |idx| {
        let ratio = (idx + 1) as f64 / steps as f64;
        ratio_point(cfg, ratio).map(|(ns, gain)| (ratio, ns, gain))
    });

    let mut table = Table::new([
        "ratio",
        "n_1",
        "n_2",
        "n_3",
        "n_4",
        "n_total",
        "dominant_gain",
    ]);
    for row in rows {
        let (ratio, ns, gain) = row?;
        let total: f64 = ns.iter().sum();
        table.push(vec![
            ratio.into(),
            ns[0].into(),
            ns[1].into(),
            ns[2].into(),
            ns[3].into(),
            total.into(),
            gain.into(),
        ]);
    }
    Ok(CommandOutput::table(table))
}

pub fn cmd_sweep_strength(cfg: &RunConfig, workers: usize) -> Result<CommandOutput, CliError> {
    if cfg.sweep.parameter != SweepParameter::Strength {
        return Err(CliError::Config(
            "sweep-strength needs [sweep] parameter = r".to_string(),
        ));
    }
    let eps_ref = reference_rate(cfg)?;
    let graph = graph_from_config(cfg);
    let gen = hamiltonian_generator(&graph);
    let grid = strength_grid(cfg);

    type StrengthRow = (f64, f64, f64, f64, f64, f64, f64);
    let rows = run_indexed(grid.len(), workers, |idx| -> Result<StrengthRow, CliError> {
        let r = grid[idx];
        let t = r / eps_ref;
        let state = evolve(&vacuum_state(4), &gen, t).map_err(core_err)?;
        let lossy = apply_loss(&state, &cfg.taus).map_err(core_err)?;
        let total: f64 = mean_photon_numbers(&state).iter().sum();
        let e_n = log_negativity(&state, &[0, 1]).map_err(core_err)?;
        let e_n_lossy = log_negativity(&lossy, &[0, 1]).map_err(core_err)?;
        let sq = two_mode_squeezing(&state, 0, 3).map_err(core_err)?.variance;
        let sq_lossy = two_mode_squeezing(&lossy, 0, 3).map_err(core_err)?.variance;
        Ok((r, t, total, e_n, e_n_lossy, sq, sq_lossy))
    });

    let mut table = Table::new([
        "r",
        "time_s",
        "n_total",
        "e_n_12",
        "e_n_12_lossy",
        "sq_14_var",
        "sq_14_var_lossy",
    ]);
    for row in rows {
        let (r, t, total, e_n, e_n_lossy, sq, sq_lossy) = row?;
        table.push(vec![
            r.into(),
            t.into(),
            total.into(),
            e_n.into(),
            e_n_lossy.into(),
            sq.into(),
            sq_lossy.into(),
        ]);
    }
    Ok(CommandOutput::table(table))
}

pub fn cmd_compare_configs(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let candidates =
        enumerate_candidate_configs(&cfg.pump, &cfg.dispersion, cfg.g_single, cfg.g_dual)
            .map_err(core_err)?;
    let report = compare_configurations(&candidates).map_err(core_err)?;

    let mut table = Table::new(["rank", "kind", "gain_score", "n_modes", "mode_degrees"]);
    for (rank, entry) in report.entries.iter().enumerate() {
        let degrees = entry
            .degrees
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        table.push(vec![
            (rank + 1).into(),
            entry.kind.label().into(),
            entry.gain_score.into(),
            entry.n_modes.into(),
            degrees.into(),
        ]);
    }
    Ok(CommandOutput::table(table))
}

fn state_at_r(
    gen: &GeneratorMatrix,
    eps_ref: f64,
    r: f64,
) -> Result<GaussianState, CliError> {
    evolve(&vacuum_state(4), gen, r / eps_ref).map_err(core_err)
}

pub fn cmd_entanglement(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let eps_ref = reference_rate(cfg)?;
    let graph = graph_from_config(cfg);
    let gen = hamiltonian_generator(&graph);
    let corr = correlation_graph(&gen, cfg.correlation.probe_time, cfg.correlation.threshold)
        .map_err(core_err)?;
    let edges = edge_list_label(&corr.edges());

    let mut table = Table::new([
        "r",
        "partition",
        "e_n",
        "e_n_lossy",
        "sq_14_var",
        "sq_14_var_lossy",
        "sq_13_var",
        "sq_13_var_lossy",
        "correlation_edges",
    ]);
    for &r in &cfg.entanglement.r_values {
        let state = state_at_r(&gen, eps_ref, r)?;
        let lossy = apply_loss(&state, &cfg.taus).map_err(core_err)?;
        let sq_14 = two_mode_squeezing(&state, 0, 3).map_err(core_err)?.variance;
        let sq_14_lossy = two_mode_squeezing(&lossy, 0, 3).map_err(core_err)?.variance;
        let sq_13 = two_mode_squeezing(&state, 0, 2).map_err(core_err)?.variance;
        let sq_13_lossy = two_mode_squeezing(&lossy, 0, 2).map_err(core_err)?.variance;
        for partition in &cfg.entanglement.partitions {
            let e_n = log_negativity(&state, partition).map_err(core_err)?;
            let e_n_lossy = log_negativity(&lossy, partition).map_err(core_err)?;
            table.push(vec![
                r.into(),
                partition_label(partition).into(),
                e_n.into(),
                e_n_lossy.into(),
                sq_14.into(),
                sq_14_lossy.into(),
                sq_13.into(),
                sq_13_lossy.into(),
                edges.clone().into(),
            ]);
        }
    }
    Ok(CommandOutput::table(table))
}

/// Random 4-mode graph whose rates keep eps*time within the cap.
fn random_oracle_graph(rng: &mut ChaCha8Rng, cfg: &RunConfig) -> CouplingGraph {
    let eps_cap = cfg.oracle.max_eps_t / cfg.oracle.time;
    let mut edges = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            if rng.random_bool(0.6) {
                edges.push((i, j, rng.random_range(0.05 * eps_cap..eps_cap)));
            }
        }
    }
    CouplingGraph::new(4, &edges).unwrap()
}

pub fn cmd_oracle_check(cfg: &RunConfig, seed: u64) -> Result<CommandOutput, CliError> {
    if cfg.oracle.max_eps_t > ORACLE_EPS_T_CAP {
        return Err(CliError::Guard(format!(
            "oracle max_eps_t = {} exceeds the validated cap {ORACLE_EPS_T_CAP}",
            cfg.oracle.max_eps_t
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Table::new([
        "graph",
        "n_edges",
        "max_eps_t",
        "cutoff",
        "deviation",
        "leakage",
        "boundary_population",
        "pass",
    ]);
    let mut worst: Option<String> = None;
    for idx in 0..cfg.oracle.n_graphs {
        let graph = random_oracle_graph(&mut rng, cfg);
        let report =
            oracle_compare(&graph, cfg.oracle.time, cfg.oracle.cutoff).map_err(core_err)?;
        let pass = report.max_deviation < 1e-3 && report.leakage.abs() < 1e-4;
        if !pass && worst.is_none() {
            worst = Some(format!(
                "graph {idx}: deviation {:.3e}, leakage {:.3e}",
                report.max_deviation, report.leakage
            ));
        }
        table.push(vec![
            idx.into(),
            graph.edges().len().into(),
            (graph.max_epsilon() * cfg.oracle.time).into(),
            cfg.oracle.cutoff.into(),
            report.max_deviation.into(),
            report.leakage.into(),
            report.boundary_population.into(),
            pass.into(),
        ]);
    }
    let mut out = CommandOutput::table(table);
    out.failure = worst.map(|w| format!("oracle comparison failed: {w}"));
    Ok(out)
}
