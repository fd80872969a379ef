//! Run configuration: a flat sectioned key=value file with explicit
//! unit suffixes in key names, converted to SI at parse time.
//!
//! Unknown sections, unknown keys, duplicates, and malformed values are
//! all hard errors carrying the offending line number, so a typo never
//! silently falls back to a default.

use fwm_core::geometry::{DispersionParams, PumpConfig};
use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "config line {n}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line: Some(line), message: message.into() }
}

fn verr(message: impl Into<String>) -> ConfigError {
    ConfigError { line: None, message: message.into() }
}

/// Which quantity a sweep walks over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// P_A / (P_A + P_B) at fixed total power, open interval (0,1).
    PowerRatio,
    /// Squeezing parameter r = eps_single * t.
    Strength,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub steps: usize,
    pub total_power: f64,
    pub time: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementSpec {
    pub r_values: Vec<f64>,
    /// Zero-based mode subsets.
    pub partitions: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpec {
    pub cutoff: usize,
    pub time: f64,
    pub n_graphs: usize,
    pub max_eps_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSpec {
    pub probe_time: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pump: PumpConfig,
    pub dispersion: DispersionParams,
    pub g_single: f64,
    pub g_dual: f64,
    pub taus: [f64; 4],
    pub evolve_time: f64,
    pub sweep: SweepSpec,
    pub entanglement: EntanglementSpec,
    pub oracle: OracleSpec,
    pub correlation: CorrelationSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pump: PumpConfig::default(),
            dispersion: DispersionParams::calibrated_default(),
            g_single: 5.0,
            g_dual: 4.0,
            taus: [0.7; 4],
            evolve_time: 1.0,
            sweep: SweepSpec {
                parameter: SweepParameter::PowerRatio,
                steps: 64,
                total_power: 0.2,
                time: 0.01,
                min: 0.0,
                max: 1.0,
            },
            entanglement: EntanglementSpec {
                r_values: vec![0.25, 0.5],
                partitions: vec![vec![0], vec![0, 1]],
            },
            oracle: OracleSpec { cutoff: 12, time: 1.0, n_graphs: 20, max_eps_t: 0.3 },
            correlation: CorrelationSpec { probe_time: 1e-3, threshold: 0.1 },
        }
    }
}

const GHZ: f64 = 2.0 * PI * 1e9;

fn parse_f64(line: usize, key: &str, raw: &str) -> Result<f64, ConfigError> {
    raw.parse::<f64>()
        .map_err(|_| err(line, format!("key '{key}': expected a number, got '{raw}'")))
}

fn parse_usize(line: usize, key: &str, raw: &str) -> Result<usize, ConfigError> {
    raw.parse::<usize>()
        .map_err(|_| err(line, format!("key '{key}': expected a nonnegative integer, got '{raw}'")))
}

fn parse_f64_list(line: usize, key: &str, raw: &str) -> Result<Vec<f64>, ConfigError> {
    raw.split(',')
        .map(|piece| parse_f64(line, key, piece.trim()))
        .collect()
}

/// Pipe-separated partitions of comma-separated one-based mode labels,
/// e.g. "1 | 1,2". Stored zero-based.
fn parse_partitions(line: usize, key: &str, raw: &str) -> Result<Vec<Vec<usize>>, ConfigError> {
    raw.split('|')
        .map(|group| {
            group
                .split(',')
                .map(|piece| {
                    let label = parse_usize(line, key, piece.trim())?;
                    if !(1..=4).contains(&label) {
                        return Err(err(
                            line,
                            format!("key '{key}': mode label {label} outside 1..4"),
                        ));
                    }
                    Ok(label - 1)
                })
                .collect()
        })
        .collect()
}

impl RunConfig {
    /// Parses `text` over the built-in defaults.
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut section = String::new();
        let mut seen: HashSet<(String, String)> = HashSet::new();

        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find(['#', ';']) {
                Some(cut) => &raw_line[..cut],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err(line_no, format!("unterminated section '{line}'")))?
                    .trim();
                const SECTIONS: [&str; 8] = [
                    "pump",
                    "dispersion",
                    "gains",
                    "loss",
                    "evolution",
                    "sweep",
                    "entanglement",
                    "oracle",
                ];
                if name == "correlation" || SECTIONS.contains(&name) {
                    section = name.to_string();
                    continue;
                }
                return Err(err(line_no, format!("unknown section '{name}'")));
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line_no, format!("expected 'key = value', got '{line}'")))?;
            let key = key.trim();
            let value = value.trim();
            if section.is_empty() {
                return Err(err(line_no, format!("key '{key}' appears before any [section]")));
            }
            if !seen.insert((section.clone(), key.to_string())) {
                return Err(err(line_no, format!("duplicate key '{key}' in [{section}]")));
            }
            cfg.apply(&section, key, value, line_no)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(
        &mut self,
        section: &str,
        key: &str,
        value: &str,
        line: usize,
    ) -> Result<(), ConfigError> {
        match (section, key) {
            ("pump", "wavelength_nm") => {
                self.pump.wavelength_vacuum = parse_f64(line, key, value)? * 1e-9;
            }
            ("pump", "half_cross_angle_deg") => {
                self.pump.half_cross_angle = parse_f64(line, key, value)? * PI / 180.0;
            }
            ("pump", "power_a_mw") => self.pump.power_a = parse_f64(line, key, value)? * 1e-3,
            ("pump", "power_b_mw") => self.pump.power_b = parse_f64(line, key, value)? * 1e-3,
            ("pump", "detuning_ghz") => {
                self.pump.detuning = parse_f64(line, key, value)? * GHZ;
            }
            ("dispersion", "n_pump") => self.dispersion.n_pump = parse_f64(line, key, value)?,
            ("dispersion", "n_probe") => self.dispersion.n_probe = parse_f64(line, key, value)?,
            ("dispersion", "n_conj") => self.dispersion.n_conj = parse_f64(line, key, value)?,
            ("dispersion", "freq_offset_ghz") => {
                self.dispersion.freq_offset = parse_f64(line, key, value)? * GHZ;
            }
            ("gains", "g_single_hz_per_w") => self.g_single = parse_f64(line, key, value)?,
            ("gains", "g_dual_hz_per_w") => self.g_dual = parse_f64(line, key, value)?,
            ("loss", "tau_1") => self.taus[0] = parse_f64(line, key, value)?,
            ("loss", "tau_2") => self.taus[1] = parse_f64(line, key, value)?,
            ("loss", "tau_3") => self.taus[2] = parse_f64(line, key, value)?,
            ("loss", "tau_4") => self.taus[3] = parse_f64(line, key, value)?,
            ("evolution", "time_s") => self.evolve_time = parse_f64(line, key, value)?,
            ("sweep", "parameter") => {
                self.sweep.parameter = match value {
                    "power_ratio" => SweepParameter::PowerRatio,
                    "r" => SweepParameter::Strength,
                    other => {
                        return Err(err(
                            line,
                            format!(
                                "key 'parameter': unknown sweep parameter '{other}' \
                                 (expected 'power_ratio' or 'r')"
                            ),
                        ))
                    }
                };
            }
            ("sweep", "steps") => self.sweep.steps = parse_usize(line, key, value)?,
            ("sweep", "total_power_mw") => {
                self.sweep.total_power = parse_f64(line, key, value)? * 1e-3;
            }
            ("sweep", "time_s") => self.sweep.time = parse_f64(line, key, value)?,
            ("sweep", "min") => self.sweep.min = parse_f64(line, key, value)?,
            ("sweep", "max") => self.sweep.max = parse_f64(line, key, value)?,
            ("entanglement", "r_values") => {
                self.entanglement.r_values = parse_f64_list(line, key, value)?;
            }
            ("entanglement", "partitions") => {
                self.entanglement.partitions = parse_partitions(line, key, value)?;
            }
            ("oracle", "cutoff") => self.oracle.cutoff = parse_usize(line, key, value)?,
            ("oracle", "time_s") => self.oracle.time = parse_f64(line, key, value)?,
            ("oracle", "n_graphs") => self.oracle.n_graphs = parse_usize(line, key, value)?,
            ("oracle", "max_eps_t") => self.oracle.max_eps_t = parse_f64(line, key, value)?,
            ("correlation", "probe_time_s") => {
                self.correlation.probe_time = parse_f64(line, key, value)?;
            }
            ("correlation", "threshold") => {
                self.correlation.threshold = parse_f64(line, key, value)?;
            }
            _ => return Err(err(line, format!("unknown key '{key}' in section [{section}]"))),
        }
        Ok(())
    }

    /// Full cross-field validation; every subcommand calls this before
    /// doing any work.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.pump.validate().map_err(|e| verr(e.to_string()))?;
        self.dispersion.validate().map_err(|e| verr(e.to_string()))?;
        for (label, g) in [("g_single_hz_per_w", self.g_single), ("g_dual_hz_per_w", self.g_dual)]
        {
            if !(g.is_finite() && g >= 0.0) {
                return Err(verr(format!("{label} must be finite and nonnegative, got {g}")));
            }
        }
        for (m, tau) in self.taus.iter().enumerate() {
            if !(tau.is_finite() && (0.0..=1.0).contains(tau)) {
                return Err(verr(format!("tau_{} must lie in [0, 1], got {tau}", m + 1)));
            }
        }
        if !(self.evolve_time.is_finite() && self.evolve_time >= 0.0) {
            return Err(verr(format!(
                "evolution time_s must be finite and nonnegative, got {}",
                self.evolve_time
            )));
        }
        let s = &self.sweep;
        if s.steps < 2 {
            return Err(verr(format!("sweep steps must be at least 2, got {}", s.steps)));
        }
        if !(s.total_power.is_finite() && s.total_power > 0.0) {
            return Err(verr("sweep total_power_mw must be positive".to_string()));
        }
        if !(s.time.is_finite() && s.time >= 0.0) {
            return Err(verr("sweep time_s must be finite and nonnegative".to_string()));
        }
        if !(s.min.is_finite() && s.max.is_finite() && s.min < s.max) {
            return Err(verr(format!("sweep range needs min < max, got [{}, {}]", s.min, s.max)));
        }
        if self.entanglement.r_values.is_empty() {
            return Err(verr("entanglement r_values must not be empty".to_string()));
        }
        for r in &self.entanglement.r_values {
            if !(r.is_finite() && *r >= 0.0) {
                return Err(verr(format!("entanglement r value must be nonnegative, got {r}")));
            }
        }
        if self.entanglement.partitions.is_empty() {
            return Err(verr("entanglement partitions must not be empty".to_string()));
        }
        for part in &self.entanglement.partitions {
            let unique: HashSet<_> = part.iter().collect();
            if part.is_empty() || part.len() >= 4 || unique.len() != part.len() {
                return Err(verr(format!(
                    "each partition must list 1..3 distinct modes of 1..4, got {:?}",
                    part.iter().map(|m| m + 1).collect::<Vec<_>>()
                )));
            }
        }
        let o = &self.oracle;
        if !(1..=14).contains(&o.cutoff) {
            return Err(verr(format!("oracle cutoff must lie in 1..14, got {}", o.cutoff)));
        }
        if !(o.time.is_finite() && o.time > 0.0) {
            return Err(verr("oracle time_s must be positive".to_string()));
        }
        if o.n_graphs == 0 {
            return Err(verr("oracle n_graphs must be at least 1".to_string()));
        }
        if !(o.max_eps_t.is_finite() && o.max_eps_t > 0.0) {
            return Err(verr("oracle max_eps_t must be positive".to_string()));
        }
        let c = &self.correlation;
        if !(c.probe_time.is_finite() && c.probe_time > 0.0) {
            return Err(verr("correlation probe_time_s must be positive".to_string()));
        }
        if !(c.threshold.is_finite() && c.threshold > 0.0) {
            return Err(verr("correlation threshold must be positive".to_string()));
        }
        Ok(())
    }
}
