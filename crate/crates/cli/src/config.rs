//! Versioned JSON experiment configs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    #[serde(rename = "csv")]
    Csv,
    #[default]
    #[serde(rename = "csv+svg")]
    CsvSvg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// Base seed; experiments derive their noise and spike seeds from it.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
    pub experiment: Experiment,
}

fn default_seed() -> u64 {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    RegularitySweep(RegularitySweep),
    BarenblattValidate(BarenblattValidate),
    NondegeneracyFit(NondegeneracyFitConfig),
    AndersonRun(AndersonRunConfig),
    EnergyAudit(EnergyAuditConfig),
    ExponentTable(ExponentTableConfig),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::RegularitySweep(_) => "regularity-sweep",
            Experiment::BarenblattValidate(_) => "barenblatt-validate",
            Experiment::NondegeneracyFit(_) => "nondegeneracy-fit",
            Experiment::AndersonRun(_) => "anderson-run",
            Experiment::EnergyAudit(_) => "energy-audit",
            Experiment::ExponentTable(_) => "exponent-table",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum SweepSource {
    /// `|x − x0|^β` profiles; expected exponent `β + 1/p`.
    PowerProfile { betas: Vec<f64>, length: f64 },
    /// PME runs forced by narrow spike trains; one-sided check
    /// `s_hat > 2/m − tolerance`.
    ForcedPme {
        ms: Vec<f64>,
        /// Runs per `m`, with seeds `seed, seed+1, …`.
        runs_per_m: usize,
        length: f64,
        t_end: f64,
        spikes: usize,
        spike_mass: f64,
        /// Spike width in grid cells.
        spike_width_cells: f64,
        spike_duration: f64,
        snapshots: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegularitySweep {
    pub n: usize,
    pub ps: Vec<f64>,
    pub tolerance: f64,
    pub source: SweepSource,
}

impl Default for RegularitySweep {
    fn default() -> Self {
        RegularitySweep {
            n: 1 << 14,
            ps: vec![1.5, 2.0],
            tolerance: 0.1,
            source: SweepSource::PowerProfile {
                betas: vec![0.5, 1.0],
                length: 1.0,
            },
        }
    }
}

impl RegularitySweep {
    pub fn forced_pme() -> Self {
        RegularitySweep {
            n: 1 << 11,
            ps: vec![1.1],
            tolerance: 0.2,
            source: SweepSource::ForcedPme {
                ms: vec![1.3, 1.6],
                runs_per_m: 2,
                length: 8.0,
                t_end: 0.2,
                spikes: 6,
                spike_mass: 0.5,
                spike_width_cells: 4.0,
                spike_duration: 0.02,
                snapshots: 40,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BarenblattValidate {
    pub m: f64,
    pub p: f64,
    pub n: usize,
    pub length: f64,
    pub a: f64,
    pub gamma_shift: f64,
    pub t: f64,
    pub tolerance: f64,
}

impl Default for BarenblattValidate {
    fn default() -> Self {
        BarenblattValidate {
            m: 2.0,
            p: 3.0,
            n: 1 << 14,
            length: 16.0,
            a: 1.0,
            gamma_shift: 1.0,
            t: 0.0,
            tolerance: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NondegeneracyFitConfig {
    pub ms: Vec<f64>,
    pub js: Vec<f64>,
    pub deltas: Vec<f64>,
    pub gamma: f64,
    pub v_lo: f64,
    pub v_hi: f64,
    /// Relative tolerance on `α` and `β`.
    pub tolerance: f64,
    /// Relative tolerance on `λ`.
    pub lambda_tolerance: f64,
}

impl Default for NondegeneracyFitConfig {
    fn default() -> Self {
        NondegeneracyFitConfig {
            ms: vec![1.5, 2.0, 3.0],
            js: vec![4.0, 4.0 * std::f64::consts::SQRT_2, 8.0],
            deltas: vec![1.0, 2.0, 4.0],
            gamma: 0.9,
            v_lo: -1.0,
            v_hi: 1.0,
            tolerance: 0.05,
            lambda_tolerance: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AndersonRunConfig {
    pub m: f64,
    pub n: usize,
    pub length: f64,
    pub t_end: f64,
    /// Noise realisations, with seeds `seed, seed+1, …`.
    pub realisations: usize,
    /// Highest kept Littlewood–Paley block of each mollification level.
    pub mollifier_blocks: Vec<u32>,
    pub snapshot_every: f64,
    pub n_v: usize,
    /// Spread of the implied constant across mollification levels.
    pub tolerance: f64,
}

impl Default for AndersonRunConfig {
    fn default() -> Self {
        AndersonRunConfig {
            m: 1.5,
            n: 1 << 10,
            length: 4.0,
            t_end: 0.2,
            realisations: 3,
            mollifier_blocks: vec![4, 5, 6],
            snapshot_every: 0.002,
            n_v: 301,
            tolerance: 0.25,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingKind {
    Zero,
    Steady,
    Spikes,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyAuditConfig {
    pub ms: Vec<f64>,
    pub forcings: Vec<ForcingKind>,
    pub gammas: Vec<f64>,
    /// Coarse resolution; each refinement doubles it.
    pub n: usize,
    pub refinements: usize,
    pub length: f64,
    pub t_end: f64,
    pub snapshots: usize,
    /// Allowed relative growth of the implied constant per refinement.
    pub tolerance: f64,
    pub mass_tolerance: f64,
}

impl Default for EnergyAuditConfig {
    fn default() -> Self {
        EnergyAuditConfig {
            ms: vec![2.0, 3.0],
            forcings: vec![ForcingKind::Zero, ForcingKind::Steady, ForcingKind::Spikes],
            gammas: vec![0.5, 0.9],
            n: 512,
            refinements: 1,
            length: 8.0,
            t_end: 0.25,
            snapshots: 100,
            tolerance: 0.05,
            mass_tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExponentTableConfig {
    pub ms: Vec<f64>,
    pub anderson_m: f64,
    pub aniso_m: Vec<f64>,
    pub aniso_n: Vec<f64>,
    pub tolerance: f64,
}

impl Default for ExponentTableConfig {
    fn default() -> Self {
        ExponentTableConfig {
            ms: vec![1.25, 1.5, 2.0, 3.0],
            anderson_m: 1.5,
            aniso_m: vec![2.0, 3.0],
            aniso_n: vec![2.0, 3.0],
            tolerance: 1e-12,
        }
    }
}

fn cfg<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

fn positive(name: &str, x: f64) -> CliResult<()> {
    if !(x > 0.0 && x.is_finite()) {
        return cfg(format!("{name} must be positive and finite, got {x}"));
    }
    Ok(())
}

fn nonneg(name: &str, x: f64) -> CliResult<()> {
    if !(x >= 0.0 && x.is_finite()) {
        return cfg(format!("{name} must be finite and >= 0, got {x}"));
    }
    Ok(())
}

fn above_one(name: &str, xs: &[f64]) -> CliResult<()> {
    if xs.is_empty() {
        return cfg(format!("{name} must not be empty"));
    }
    if let Some(x) = xs.iter().find(|x| !(**x > 1.0 && x.is_finite())) {
        return cfg(format!("{name} entries must exceed 1, got {x}"));
    }
    Ok(())
}

fn resolution(n: usize) -> CliResult<()> {
    if n < 16 || !n.is_power_of_two() {
        return cfg(format!("n must be a power of two >= 16, got {n}"));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            seed: default_seed(),
            output_dir: default_out(),
            format: OutputFormat::default(),
            experiment,
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let c: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// Preconditions of the target module, checked before any compute.
    pub fn validate(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return cfg(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        match &self.experiment {
            Experiment::RegularitySweep(c) => {
                resolution(c.n)?;
                if c.ps.is_empty() || c.ps.iter().any(|p| !(*p >= 1.0 && p.is_finite())) {
                    return cfg("ps must be finite and >= 1");
                }
                nonneg("tolerance", c.tolerance)?;
                match &c.source {
                    SweepSource::PowerProfile { betas, length } => {
                        positive("length", *length)?;
                        if betas.is_empty() || betas.iter().any(|b| !(*b > 0.0)) {
                            return cfg("betas must be positive");
                        }
                    }
                    SweepSource::ForcedPme {
                        ms,
                        runs_per_m,
                        length,
                        t_end,
                        spikes,
                        spike_mass,
                        spike_width_cells,
                        spike_duration,
                        snapshots,
                    } => {
                        above_one("ms", ms)?;
                        positive("length", *length)?;
                        positive("t_end", *t_end)?;
                        positive("spike_mass", *spike_mass)?;
                        positive("spike_width_cells", *spike_width_cells)?;
                        positive("spike_duration", *spike_duration)?;
                        if spike_duration > t_end {
                            return cfg("spike_duration must not exceed t_end");
                        }
                        if *runs_per_m == 0 || *spikes == 0 || *snapshots == 0 {
                            return cfg("runs_per_m, spikes and snapshots must be positive");
                        }
                    }
                }
            }
            Experiment::BarenblattValidate(c) => {
                resolution(c.n)?;
                above_one("m", &[c.m])?;
                if !(c.p >= 1.0 && c.p.is_finite()) {
                    return cfg("p must be finite and >= 1");
                }
                positive("length", c.length)?;
                positive("a", c.a)?;
                positive("gamma_shift", c.gamma_shift)?;
                nonneg("tolerance", c.tolerance)?;
                if !(c.t >= 0.0) {
                    return cfg("t must be >= 0");
                }
            }
            Experiment::NondegeneracyFit(c) => {
                above_one("ms", &c.ms)?;
                if c.js.len() < 2 || c.deltas.len() < 2 || c.js.len() * c.deltas.len() < 4 {
                    return cfg("need at least two J and two delta values");
                }
                for &x in c.js.iter().chain(&c.deltas) {
                    positive("J/delta", x)?;
                }
                if !(c.gamma >= 0.0 && c.gamma <= 1.0) {
                    return cfg("gamma must lie in [0,1]");
                }
                if !(c.v_lo < c.v_hi) {
                    return cfg("v_lo must be below v_hi");
                }
                nonneg("tolerance", c.tolerance)?;
                nonneg("lambda_tolerance", c.lambda_tolerance)?;
            }
            Experiment::AndersonRun(c) => {
                if !(c.m > 1.0 && c.m < 2.0) {
                    return cfg(format!("anderson m must lie in (1,2), got {}", c.m));
                }
                resolution(c.n)?;
                positive("length", c.length)?;
                positive("t_end", c.t_end)?;
                positive("snapshot_every", c.snapshot_every)?;
                nonneg("tolerance", c.tolerance)?;
                if c.realisations == 0 || c.mollifier_blocks.is_empty() || c.n_v < 3 {
                    return cfg("need realisations, mollifier blocks and n_v >= 3");
                }
            }
            Experiment::EnergyAudit(c) => {
                above_one("ms", &c.ms)?;
                resolution(c.n)?;
                if c.forcings.is_empty() || c.gammas.is_empty() {
                    return cfg("forcings and gammas must not be empty");
                }
                if c.gammas.iter().any(|g| !(0.0..1.0).contains(g)) {
                    return cfg("gammas must lie in [0,1)");
                }
                positive("length", c.length)?;
                positive("t_end", c.t_end)?;
                nonneg("tolerance", c.tolerance)?;
                nonneg("mass_tolerance", c.mass_tolerance)?;
                if c.snapshots == 0 {
                    return cfg("snapshots must be positive");
                }
            }
            Experiment::ExponentTable(c) => {
                above_one("ms", &c.ms)?;
                if !(c.anderson_m > 1.0) {
                    return cfg("anderson_m must exceed 1");
                }
                if c.aniso_m.len() != c.aniso_n.len() || c.aniso_m.is_empty() {
                    return cfg("aniso_m and aniso_n must have equal nonzero length");
                }
                nonneg("tolerance", c.tolerance)?;
            }
        }
        Ok(())
    }
}
