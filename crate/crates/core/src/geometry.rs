//! Beam geometry and wavevector phase matching.
//!
//! Coordinate frame: +z is the mean propagation axis, +y points up, and
//! the two pumps are tilted in the x-z plane by the half crossing angle,
//! pump A toward -x and pump B toward +x. Output modes are labeled 1..4
//! clockwise from top-left in the transverse (x, y) plane: 1 above pump A,
//! 2 above pump B, 3 below pump B, 4 below pump A.
//!
//! Pair production must conserve momentum. For a single pump, two pump
//! photons convert into a lower-frequency (probe) and higher-frequency
//! (conjugate) photon emitted on a cone around the pump axis; the cone
//! half-angle is fixed by the refractive indices and the frequency
//! offset. With two pumps, a photon taken from each pump feeds the
//! diagonal mode pairs, and one mode layout must satisfy all four
//! processes at once: 1-4 and 2-3 (single pump), 1-3 and 2-4 (dual pump).

use crate::error::Error;
use crate::interaction::{coupling_graph_from_powers, gain_spectrum, CouplingGraph};
use crate::SPEED_OF_LIGHT;
use nalgebra::Vector3;

/// Relative tolerance of the cone-angle root solve.
const CONE_RESIDUAL_REL: f64 = 1e-12;
/// Default ceiling on the four-mode layout residual, as a fraction of
/// the pump wavenumber.
const LAYOUT_CEILING_REL: f64 = 1e-3;

/// Pump beam parameters. Both pumps share one vacuum wavelength and are
/// tilted symmetrically by `half_cross_angle` about the z axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpConfig {
    /// Vacuum wavelength, m.
    pub wavelength_vacuum: f64,
    /// Tilt of each pump from the z axis, rad.
    pub half_cross_angle: f64,
    /// Pump A power, W.
    pub power_a: f64,
    /// Pump B power, W.
    pub power_b: f64,
    /// Detuning from the atomic line, rad/s. Bookkeeping only; it does
    /// not enter the dynamics.
    pub detuning: f64,
}

impl Default for PumpConfig {
    /// 795 nm pumps crossing at 0.9 degrees (0.45 degree half-angle),
    /// 100 mW each.
    fn default() -> Self {
        Self {
            wavelength_vacuum: 795e-9,
            half_cross_angle: 0.45_f64.to_radians(),
            power_a: 0.1,
            power_b: 0.1,
            detuning: 0.0,
        }
    }
}

impl PumpConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.wavelength_vacuum.is_finite() && self.wavelength_vacuum > 0.0) {
            return Err(Error::OutOfRange(format!(
                "pump wavelength must be positive, got {}",
                self.wavelength_vacuum
            )));
        }
        if !(self.half_cross_angle.is_finite()
            && (0.0..std::f64::consts::FRAC_PI_2).contains(&self.half_cross_angle))
        {
            return Err(Error::OutOfRange(format!(
                "half crossing angle must lie in [0, pi/2), got {}",
                self.half_cross_angle
            )));
        }
        if !(self.power_a.is_finite() && self.power_a >= 0.0)
            || !(self.power_b.is_finite() && self.power_b >= 0.0)
        {
            return Err(Error::OutOfRange(format!(
                "pump powers must be nonnegative, got {} and {}",
                self.power_a, self.power_b
            )));
        }
        if !self.detuning.is_finite() {
            return Err(Error::OutOfRange("detuning must be finite".into()));
        }
        Ok(())
    }

    /// Pump angular frequency, rad/s.
    pub fn pump_omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.wavelength_vacuum
    }

    /// Unit propagation direction of pump A (tilted toward -x).
    pub fn direction_a(&self) -> Vector3<f64> {
        Vector3::new(-self.half_cross_angle.sin(), 0.0, self.half_cross_angle.cos())
    }

    /// Unit propagation direction of pump B (tilted toward +x).
    pub fn direction_b(&self) -> Vector3<f64> {
        Vector3::new(self.half_cross_angle.sin(), 0.0, self.half_cross_angle.cos())
    }
}

/// Refractive indices seen by the pump, probe, and conjugate fields,
/// plus the probe/conjugate offset from the pump frequency.
///
/// The probe sits at pump frequency minus `freq_offset`, the conjugate
/// at pump frequency plus `freq_offset`. Slightly anomalous indices
/// (just below 1) are admitted: near an atomic resonance the pump can
/// see less phase delay than the far-detuned sidebands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionParams {
    pub n_pump: f64,
    pub n_probe: f64,
    pub n_conj: f64,
    /// Probe/conjugate offset from the pump frequency, rad/s.
    pub freq_offset: f64,
}

impl DispersionParams {
    /// Index floor; values slightly below 1 are physical near resonance.
    const MIN_INDEX: f64 = 1.0 - 1e-3;

    /// Calibrated defaults: with the default 795 nm pumps and a 3 GHz
    /// offset, the sideband indices are tuned so the emission cone
    /// half-angle comes out at 8.0 mrad, matching hot-vapor experiments.
    pub fn calibrated_default() -> Self {
        Self {
            n_pump: 1.0,
            n_probe: 1.000032,
            n_conj: 1.000032,
            freq_offset: 2.0 * std::f64::consts::PI * 3e9,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (name, n) in [
            ("n_pump", self.n_pump),
            ("n_probe", self.n_probe),
            ("n_conj", self.n_conj),
        ] {
            if !(n.is_finite() && n >= Self::MIN_INDEX) {
                return Err(Error::OutOfRange(format!(
                    "{name} must be at least {}, got {n}",
                    Self::MIN_INDEX
                )));
            }
        }
        if !(self.freq_offset.is_finite() && self.freq_offset >= 0.0) {
            return Err(Error::OutOfRange(format!(
                "frequency offset must be nonnegative, got {}",
                self.freq_offset
            )));
        }
        Ok(())
    }

    /// Probe angular frequency for a given pump frequency.
    pub fn probe_omega(&self, pump_omega: f64) -> f64 {
        pump_omega - self.freq_offset
    }

    /// Conjugate angular frequency for a given pump frequency.
    pub fn conj_omega(&self, pump_omega: f64) -> f64 {
        pump_omega + self.freq_offset
    }
}

/// A wavevector in the medium, rad/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavevector {
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
}

impl Wavevector {
    /// Wavevector along `direction` for a field of angular frequency
    /// `omega` in a medium of index `n`; the magnitude is n * omega / c.
    pub fn from_direction(direction: &Vector3<f64>, n: f64, omega: f64) -> Self {
        let unit = direction.normalize();
        let mag = n * omega / SPEED_OF_LIGHT;
        Self {
            kx: mag * unit.x,
            ky: mag * unit.y,
            kz: mag * unit.z,
        }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.kx, self.ky, self.kz)
    }

    pub fn magnitude(&self) -> f64 {
        self.as_vector().norm()
    }
}

/// Momentum mismatch of one parametric process: the pump wavevectors
/// (photons absorbed) minus the output wavevectors (photons emitted).
/// A phase-matched process has mismatch zero.
pub fn phase_mismatch(pumps: &[Wavevector], outputs: &[Wavevector]) -> Vector3<f64> {
    debug_assert!(!pumps.is_empty() && !outputs.is_empty());
    let sum_p: Vector3<f64> = pumps.iter().map(Wavevector::as_vector).sum();
    let sum_o: Vector3<f64> = outputs.iter().map(Wavevector::as_vector).sum();
    sum_p - sum_o
}

/// Magnitudes of the pump, probe, and conjugate wavevectors, rad/m.
fn wavenumbers(disp: &DispersionParams, pump: &PumpConfig) -> Result<(f64, f64, f64), Error> {
    let omega_p = pump.pump_omega();
    let omega_pr = disp.probe_omega(omega_p);
    if omega_pr <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "frequency offset {} rad/s exceeds the pump frequency {omega_p} rad/s",
            disp.freq_offset
        )));
    }
    let k_p = disp.n_pump * omega_p / SPEED_OF_LIGHT;
    let k_pr = disp.n_probe * omega_pr / SPEED_OF_LIGHT;
    let k_c = disp.n_conj * disp.conj_omega(omega_p) / SPEED_OF_LIGHT;
    Ok((k_p, k_pr, k_c))
}

/// Conjugate polar angle enforcing transverse momentum balance against a
/// probe at `theta_pr`: k_pr sin(theta_pr) = k_c sin(theta_c).
fn conjugate_angle(theta_pr: f64, k_pr: f64, k_c: f64) -> f64 {
    (k_pr * theta_pr.sin() / k_c).asin()
}

/// Longitudinal mismatch of the single-pump process with the probe at
/// polar angle `theta` and the conjugate angle slaved to it. Positive
/// when the outputs still carry excess longitudinal momentum.
fn cone_residual(theta: f64, k_p: f64, k_pr: f64, k_c: f64) -> f64 {
    let theta_c = conjugate_angle(theta, k_pr, k_c);
    k_pr * theta.cos() + k_c * theta_c.cos() - 2.0 * k_p
}

/// Half-angle of the spontaneous emission cone around a single pump, rad.
///
/// Two pump photons convert to a probe/conjugate pair; tilting the pair
/// off axis shortens its longitudinal momentum until the process closes.
/// The root of the longitudinal residual is bracketed and bisected to a
/// relative residual below 1e-12. Collinear media (zero residual on
/// axis) return exactly 0.
pub fn cone_half_angle(disp: &DispersionParams, pump: &PumpConfig) -> Result<f64, Error> {
    disp.validate()?;
    pump.validate()?;
    let (k_p, k_pr, k_c) = wavenumbers(disp, pump)?;
    let scale = 2.0 * k_p;

    let f0 = cone_residual(0.0, k_p, k_pr, k_c);
    if f0 == 0.0 {
        return Ok(0.0);
    }
    // The residual decreases monotonically with tilt, so a negative
    // on-axis value can never be closed.
    let theta_max = if k_pr <= k_c {
        std::f64::consts::FRAC_PI_2
    } else {
        (k_c / k_pr).asin()
    };
    let f_max = cone_residual(theta_max, k_p, k_pr, k_c);
    if f0 < 0.0 || f_max > 0.0 {
        return Err(Error::NoSolution {
            detail: "single-pump cone cannot be closed by tilting".into(),
            residual_lo: f0 / scale,
            residual_hi: f_max / scale,
        });
    }

    let (mut lo, mut hi) = (0.0_f64, theta_max);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let f = cone_residual(mid, k_p, k_pr, k_c);
        if f.abs() / scale < CONE_RESIDUAL_REL {
            return Ok(mid);
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let f = cone_residual(mid, k_p, k_pr, k_c);
    Err(Error::NoSolution {
        detail: "cone bisection failed to converge".into(),
        residual_lo: f / scale,
        residual_hi: f / scale,
    })
}

/// Solved four-mode output layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGeometry {
    /// Unit propagation directions of modes 1..4.
    pub directions: [Vector3<f64>; 4],
    /// Angular frequency of each mode, rad/s. Modes 1 and 2 sit at the
    /// probe frequency, 3 and 4 at the conjugate frequency, so every
    /// matched pair sums to twice the pump frequency.
    pub frequencies: [f64; 4],
    /// Set when distinct mode labels collapse onto one direction
    /// (collinear pumps, or a closed cone of zero angle).
    pub degenerate: bool,
    /// Root-sum-square momentum mismatch over the four processes, rad/m.
    pub residual: f64,
}

/// Transverse basis of a pump axis: `e1` horizontal, `y` vertical, so a
/// mode direction at polar angle `theta` and azimuth `phi` is
/// cos(theta) axis + sin(theta) (cos(phi) e1 + sin(phi) y).
/// Azimuth pi/2 is straight above the pump, -pi/2 straight below.
fn transverse_basis(axis: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let y = Vector3::new(0.0, 1.0, 0.0);
    let e1 = y.cross(axis).normalize();
    let y_perp = axis.cross(&e1);
    (e1, y_perp)
}

fn cone_direction(axis: &Vector3<f64>, theta: f64, phi: f64) -> Vector3<f64> {
    let (e1, y) = transverse_basis(axis);
    axis * theta.cos() + (e1 * phi.cos() + y * phi.sin()) * theta.sin()
}

/// Derivative of `cone_direction` with respect to azimuth.
fn cone_direction_dphi(axis: &Vector3<f64>, theta: f64, phi: f64) -> Vector3<f64> {
    let (e1, y) = transverse_basis(axis);
    (e1 * (-phi.sin()) + y * phi.cos()) * theta.sin()
}

/// Per-mode cone data used by the layout solver: the pump axis a mode
/// sits on, its polar angle, and its wavenumber.
struct ModeCone {
    axis: Vector3<f64>,
    theta: f64,
    k: f64,
}

/// The four matched processes as (pump momentum, mode index, mode index).
/// Listed as single-pump A, single-pump B, dual 1-3, dual 2-4.
fn processes(k_p: f64, dir_a: &Vector3<f64>, dir_b: &Vector3<f64>) -> [(Vector3<f64>, usize, usize); 4] {
    let ka = dir_a * k_p;
    let kb = dir_b * k_p;
    [
        (ka * 2.0, 0, 3),
        (kb * 2.0, 1, 2),
        (ka + kb, 0, 2),
        (ka + kb, 1, 3),
    ]
}

/// Stacked 12-component mismatch vector over the four processes.
fn layout_residual(
    phis: &[f64; 4],
    cones: &[ModeCone; 4],
    procs: &[(Vector3<f64>, usize, usize); 4],
) -> nalgebra::DVector<f64> {
    let dirs: Vec<Vector3<f64>> = (0..4)
        .map(|m| cone_direction(&cones[m].axis, cones[m].theta, phis[m]) * cones[m].k)
        .collect();
    let mut r = nalgebra::DVector::zeros(12);
    for (p, (pump_k, i, j)) in procs.iter().enumerate() {
        let d = pump_k - dirs[*i] - dirs[*j];
        r[3 * p] = d.x;
        r[3 * p + 1] = d.y;
        r[3 * p + 2] = d.z;
    }
    r
}

/// Gauss-Newton refinement of the four azimuths, minimizing the sum of
/// squared process mismatches. Returns the azimuths and the final
/// root-sum-square residual.
fn optimize_azimuths(
    seed: [f64; 4],
    cones: &[ModeCone; 4],
    procs: &[(Vector3<f64>, usize, usize); 4],
) -> ([f64; 4], f64) {
    let mut phis = seed;
    for _ in 0..60 {
        let r = layout_residual(&phis, cones, procs);
        let mut jac = nalgebra::DMatrix::<f64>::zeros(12, 4);
        for (p, (_, i, j)) in procs.iter().enumerate() {
            for m in [*i, *j] {
                let d = cone_direction_dphi(&cones[m].axis, cones[m].theta, phis[m]) * cones[m].k;
                jac[(3 * p, m)] -= d.x;
                jac[(3 * p + 1, m)] -= d.y;
                jac[(3 * p + 2, m)] -= d.z;
            }
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &r;
        let step = match jtj.clone().lu().solve(&jtr) {
            Some(s) => s,
            // Singular normal equations (zero cone angle): the azimuths
            // are irrelevant, keep the seed.
            None => break,
        };
        for m in 0..4 {
            phis[m] -= step[m];
        }
        if step.amax() < 1e-14 {
            break;
        }
    }
    let r = layout_residual(&phis, cones, procs);
    (phis, r.norm())
}

/// Solves the four-mode output layout for a pump pair.
///
/// Each mode rides the emission cone of its pump at the frequency-matched
/// polar angle; only the azimuths are free. They are seeded directly
/// above and below the pumps and refined by Gauss-Newton until the sum
/// of squared mismatches over the four processes is stationary. Fails
/// with `NoSolution` if the best residual exceeds `ceiling` (rad/m);
/// `solve_four_mode_geometry` applies the default ceiling of 1e-3 times
/// the pump wavenumber.
pub fn solve_four_mode_geometry_with_ceiling(
    pump: &PumpConfig,
    disp: &DispersionParams,
    ceiling: f64,
) -> Result<ModeGeometry, Error> {
    let theta_pr = cone_half_angle(disp, pump)?;
    let (k_p, k_pr, k_c) = wavenumbers(disp, pump)?;
    let theta_c = conjugate_angle(theta_pr, k_pr, k_c);
    let omega_p = pump.pump_omega();

    let dir_a = pump.direction_a();
    let dir_b = pump.direction_b();
    let cones = [
        ModeCone { axis: dir_a, theta: theta_pr, k: k_pr },
        ModeCone { axis: dir_b, theta: theta_pr, k: k_pr },
        ModeCone { axis: dir_b, theta: theta_c, k: k_c },
        ModeCone { axis: dir_a, theta: theta_c, k: k_c },
    ];
    let procs = processes(k_p, &dir_a, &dir_b);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let (phis, residual) = optimize_azimuths([half_pi, half_pi, -half_pi, -half_pi], &cones, &procs);

    if residual > ceiling {
        return Err(Error::NoSolution {
            detail: "four-mode layout residual above ceiling".into(),
            residual_lo: residual,
            residual_hi: ceiling,
        });
    }

    let directions: [Vector3<f64>; 4] = std::array::from_fn(|m| {
        cone_direction(&cones[m].axis, cones[m].theta, phis[m]).normalize()
    });
    let mut degenerate = false;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if directions[i].dot(&directions[j]) > 1.0 - 1e-18 {
                degenerate = true;
            }
        }
    }
    let omega_pr = disp.probe_omega(omega_p);
    let omega_c = disp.conj_omega(omega_p);
    Ok(ModeGeometry {
        directions,
        frequencies: [omega_pr, omega_pr, omega_c, omega_c],
        degenerate,
        residual,
    })
}

/// Four-mode layout with the default residual ceiling.
pub fn solve_four_mode_geometry(
    pump: &PumpConfig,
    disp: &DispersionParams,
) -> Result<ModeGeometry, Error> {
    let (k_p, _, _) = wavenumbers(disp, pump)?;
    solve_four_mode_geometry_with_ceiling(pump, disp, LAYOUT_CEILING_REL * k_p)
}

/// Which candidate mode layout a configuration uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigKind {
    /// Four modes above/below the pumps; every mode takes part in one
    /// single-pump and one dual-pump process.
    FourMode,
    /// Three independent squeezer pairs: one above/below each pump plus
    /// a pair at the two cone-intersection points.
    SixMode,
}

impl ConfigKind {
    pub fn label(&self) -> &'static str {
        match self {
            ConfigKind::FourMode => "four-mode",
            ConfigKind::SixMode => "six-mode",
        }
    }
}

/// A candidate output configuration: mode layout plus induced couplings.
#[derive(Debug, Clone)]
pub struct CandidateConfig {
    pub kind: ConfigKind,
    pub directions: Vec<Vector3<f64>>,
    /// Angular frequency of each mode, rad/s.
    pub frequencies: Vec<f64>,
    pub graph: CouplingGraph,
    /// Dominant gain rate of the induced coupling graph, 1/s.
    pub gain_score: f64,
}

/// Intersection of the two pump cones at polar angle `theta`: the point
/// lies in the mirror plane x = 0 at elevation set by both cone
/// constraints. `sign` picks the upper (+1) or lower (-1) point. If the
/// cones are too narrow to meet, the closest-approach direction in the
/// horizontal plane is returned.
fn cone_intersection(half_cross: f64, theta: f64, sign: f64) -> Vector3<f64> {
    let z = (theta.cos() / half_cross.cos()).min(1.0);
    let y = sign * (1.0 - z * z).max(0.0).sqrt();
    Vector3::new(0.0, y, z)
}

/// Enumerates the competing output configurations for one pump setup:
/// the four-mode layout and the six-mode alternative, each scored by the
/// dominant gain of its induced coupling graph and sorted best first.
/// Ties keep the four-mode layout first.
pub fn enumerate_candidate_configs(
    pump: &PumpConfig,
    disp: &DispersionParams,
    g_single: f64,
    g_dual: f64,
) -> Result<Vec<CandidateConfig>, Error> {
    if !(g_single.is_finite() && g_single >= 0.0 && g_dual.is_finite() && g_dual >= 0.0) {
        return Err(Error::OutOfRange(format!(
            "gain coefficients must be nonnegative, got {g_single} and {g_dual}"
        )));
    }
    let four = solve_four_mode_geometry(pump, disp)?;
    let graph4 = coupling_graph_from_powers(pump.power_a, pump.power_b, g_single, g_dual);
    let score4 = gain_spectrum(&graph4)?[0];

    let theta_pr = cone_half_angle(disp, pump)?;
    let (_, k_pr, k_c) = wavenumbers(disp, pump)?;
    let theta_c = conjugate_angle(theta_pr, k_pr, k_c);
    let omega_p = pump.pump_omega();
    let (omega_pr, omega_c) = (disp.probe_omega(omega_p), disp.conj_omega(omega_p));
    let dir_a = pump.direction_a();
    let dir_b = pump.direction_b();
    let half_pi = std::f64::consts::FRAC_PI_2;

    // Independent probe/conjugate pair above/below each pump, plus the
    // dual-pump pair at the cone intersections.
    let six_dirs = vec![
        cone_direction(&dir_a, theta_pr, half_pi),
        cone_direction(&dir_a, theta_c, -half_pi),
        cone_direction(&dir_b, theta_pr, half_pi),
        cone_direction(&dir_b, theta_c, -half_pi),
        cone_intersection(pump.half_cross_angle, theta_pr, 1.0),
        cone_intersection(pump.half_cross_angle, theta_c, -1.0),
    ];
    let eps_a = g_single * pump.power_a;
    let eps_b = g_single * pump.power_b;
    let eps_cross = g_dual * (pump.power_a * pump.power_b).sqrt();
    let six_edges: Vec<(usize, usize, f64)> = [(0, 1, eps_a), (2, 3, eps_b), (4, 5, eps_cross)]
        .into_iter()
        .filter(|&(_, _, e)| e > 0.0)
        .collect();
    let graph6 = CouplingGraph::new(6, &six_edges)?;
    let score6 = gain_spectrum(&graph6)?[0];

    let mut candidates = vec![
        CandidateConfig {
            kind: ConfigKind::FourMode,
            directions: four.directions.to_vec(),
            frequencies: four.frequencies.to_vec(),
            graph: graph4,
            gain_score: score4,
        },
        CandidateConfig {
            kind: ConfigKind::SixMode,
            directions: six_dirs,
            frequencies: vec![omega_pr, omega_c, omega_pr, omega_c, omega_pr, omega_c],
            graph: graph6,
            gain_score: score6,
        },
    ];
    candidates.sort_by(|a, b| {
        b.gain_score
            .partial_cmp(&a.gain_score)
            .expect("gain scores are finite")
    });
    Ok(candidates)
}
