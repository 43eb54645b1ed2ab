//! The eleven acceptance criteria, run concurrently.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use pmelab_core::dyadic::DyadicPartition;
use pmelab_core::exact::{barenblatt_eval, barenblatt_field, BarenblattParams};
use pmelab_core::fourier::wave_norm;
use pmelab_core::kinetic::{chi, chi_edge_difference, velocity_average, VGrid};
use pmelab_core::solvers::{l1_contraction_check, solve_pme, Forcing, PmeProblem, SnapshotStride};
use pmelab_core::spectral::{
    aniso_exponents, averaging_exponents, kinetic_space_time, microlocal_decompose, nikolskii_seminorm,
    nikolskii_time_integral, ExponentInputs, SymbolDescriptor,
};
use pmelab_core::{dft_forward, signed_power, Field, Grid};

use crate::config::*;
use crate::error::{CliError, CliResult};
use crate::experiments::{execute, two_bumps, Outcome};
use crate::output::{fmt_f64, write_atomic, Table};
use crate::report::{checks_csv, failed_hard, Check};

/// `(id, title, default tolerance)`.
pub const CRITERIA: [(u8, &str, f64); 11] = [
    (1, "exponent algebra", 1e-12),
    (2, "Barenblatt regularity", 0.1),
    (3, "estimator calibration", 0.1),
    (4, "non-degeneracy fit", 0.05),
    (5, "energy audit", 0.05),
    (6, "L1 contraction", 0.01),
    (7, "forced-PME regularity lower bound", 0.2),
    (8, "Anderson a-priori bound", 0.25),
    (9, "Nikolskii scaling identity", 0.01),
    (10, "time-integrated Nikolskii bound", 0.1),
    (11, "structural invariants", 1e-8),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub schema_version: u32,
    pub seed: u64,
    /// Primary tolerance overrides by criterion id.
    pub tolerances: BTreeMap<u8, f64>,
    /// Criteria to run; empty means all.
    pub only: Vec<u8>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            schema_version: SCHEMA_VERSION,
            seed: 1,
            tolerances: BTreeMap::new(),
            only: Vec::new(),
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let c: SuiteConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!("unsupported schema_version {}", self.schema_version)));
        }
        let known = |id: &u8| CRITERIA.iter().any(|c| c.0 == *id);
        if let Some(id) = self.only.iter().chain(self.tolerances.keys()).find(|id| !known(id)) {
            return Err(CliError::Config(format!("unknown criterion id {id}")));
        }
        if let Some((id, t)) = self.tolerances.iter().find(|(_, t)| !(**t >= 0.0 && t.is_finite())) {
            return Err(CliError::Config(format!("tolerance for criterion {id} must be finite and >= 0, got {t}")));
        }
        Ok(())
    }

    pub fn tolerance(&self, id: u8) -> f64 {
        self.tolerances
            .get(&id)
            .copied()
            .unwrap_or_else(|| CRITERIA.iter().find(|c| c.0 == id).map(|c| c.2).unwrap_or(0.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub tolerance: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    #[serde(skip)]
    pub elapsed_s: f64,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let hard = self.checks.iter().filter(|c| c.hard).count();
        let ok = hard - failed_hard(&self.checks);
        let mut s = format!(
            "criterion {:>2} {status}  {} (tol {}; {ok}/{hard} hard checks; {:.1}s)",
            self.id,
            self.title,
            fmt_f64(self.tolerance),
            self.elapsed_s
        );
        if let Some(e) = &self.error {
            s.push_str(&format!(" error: {e}"));
        }
        for c in self.checks.iter().filter(|c| c.hard && !c.passed) {
            s.push_str(&format!("\n    failed: {} = {} (bound {})", c.name, fmt_f64(c.measured), fmt_f64(c.bound)));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub config: SuiteConfig,
    pub criteria: Vec<CriterionOutcome>,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn get(&self, id: u8) -> Option<&CriterionOutcome> {
        self.criteria.iter().find(|c| c.id == id)
    }

    pub fn failed_count(&self) -> usize {
        self.criteria.iter().filter(|c| !c.passed).count()
    }

    /// `summary.json`, `summary.csv`, one `criterion_NN/` folder per
    /// criterion with its checks and tables, and `timing.json`.
    pub fn write(&self, dir: &Path) -> CliResult<()> {
        std::fs::create_dir_all(dir)?;
        let json = serde_json::to_vec_pretty(self).map_err(std::io::Error::other)?;
        write_atomic(&dir.join("summary.json"), &json)?;
        let mut t = Table::new("summary", &["id", "title", "tolerance", "status", "hard_failed", "error"]);
        let mut timing = BTreeMap::new();
        for c in &self.criteria {
            t.push(vec![
                c.id.to_string(),
                c.title.clone(),
                fmt_f64(c.tolerance),
                if c.passed { "pass" } else { "fail" }.into(),
                failed_hard(&c.checks).to_string(),
                c.error.clone().unwrap_or_default(),
            ]);
            let sub = dir.join(format!("criterion_{:02}", c.id));
            std::fs::create_dir_all(&sub)?;
            write_atomic(&sub.join("checks.csv"), &checks_csv(&c.checks)?)?;
            for tab in &c.tables {
                write_atomic(&sub.join(format!("{}.csv", tab.name)), &tab.to_csv()?)?;
            }
            timing.insert(c.id.to_string(), c.elapsed_s);
        }
        write_atomic(&dir.join("summary.csv"), &t.to_csv()?)?;
        let timing = serde_json::to_vec_pretty(&timing).map_err(std::io::Error::other)?;
        write_atomic(&dir.join("timing.json"), &timing)?;
        Ok(())
    }
}

/// Runs every selected criterion; failures (including panics) are recorded
/// per criterion and never abort the others.
pub fn run_acceptance_suite(cfg: &SuiteConfig) -> SuiteSummary {
    let ids: Vec<(u8, &str)> = CRITERIA
        .iter()
        .filter(|c| cfg.only.is_empty() || cfg.only.contains(&c.0))
        .map(|c| (c.0, c.1))
        .collect();
    let criteria = ids
        .par_iter()
        .map(|&(id, title)| {
            let tol = cfg.tolerance(id);
            let start = Instant::now();
            let res = catch_unwind(AssertUnwindSafe(|| run_criterion(id, tol, cfg.seed)));
            let (checks, tables, error) = match res {
                Ok(Ok(o)) => (o.checks, o.tables, None),
                Ok(Err(e)) => (Vec::new(), Vec::new(), Some(e.to_string())),
                Err(p) => {
                    let msg = p
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_else(|| "panic".into());
                    (Vec::new(), Vec::new(), Some(format!("panic: {msg}")))
                }
            };
            let passed = error.is_none() && !checks.is_empty() && failed_hard(&checks) == 0;
            CriterionOutcome {
                id,
                title: title.to_string(),
                tolerance: tol,
                passed,
                checks,
                error,
                elapsed_s: start.elapsed().as_secs_f64(),
                tables,
            }
        })
        .collect();
    SuiteSummary {
        config: cfg.clone(),
        criteria,
    }
}

fn experiment(e: Experiment, seed: u64) -> CliResult<Outcome> {
    let cfg = ExperimentConfig {
        seed,
        ..ExperimentConfig::new(e)
    };
    cfg.validate()?;
    execute(&cfg)
}

fn run_criterion(id: u8, tol: f64, seed: u64) -> CliResult<Outcome> {
    match id {
        1 => {
            let mut o = experiment(
                Experiment::ExponentTable(ExponentTableConfig {
                    tolerance: tol,
                    ..Default::default()
                }),
                seed,
            )?;
            let a = averaging_exponents(&ExponentInputs::anderson(1.5)?)?;
            o.checks.push(Check::below("anderson m=1.5: |s* - 1|", (a.s_star - 1.0).abs(), tol));
            let (s, p) = aniso_exponents(&[2.0, 3.0], &[2.0, 3.0])?;
            o.checks.push(Check::below(
                "anisotropic (2,3)/(2,3): |(s*, p*) - (1/3, 3/2)|",
                (s - 1.0 / 3.0).abs().max((p - 1.5).abs()),
                tol,
            ));
            Ok(o)
        }
        2 => experiment(
            Experiment::BarenblattValidate(BarenblattValidate {
                tolerance: tol,
                ..Default::default()
            }),
            seed,
        ),
        3 => experiment(
            Experiment::RegularitySweep(RegularitySweep {
                tolerance: tol,
                ..Default::default()
            }),
            seed,
        ),
        4 => experiment(
            Experiment::NondegeneracyFit(NondegeneracyFitConfig {
                tolerance: tol,
                lambda_tolerance: 2.0 * tol,
                ..Default::default()
            }),
            seed,
        ),
        5 => experiment(
            Experiment::EnergyAudit(EnergyAuditConfig {
                tolerance: tol,
                ..Default::default()
            }),
            seed,
        ),
        6 => contraction(tol),
        7 => experiment(
            Experiment::RegularitySweep(RegularitySweep {
                tolerance: tol,
                ..RegularitySweep::forced_pme()
            }),
            seed,
        ),
        8 => experiment(
            Experiment::AndersonRun(AndersonRunConfig {
                tolerance: tol,
                ..Default::default()
            }),
            seed,
        ),
        9 => scaling(tol),
        10 => nikolskii_bound(tol),
        11 => structural(tol, seed),
        _ => Err(CliError::Config(format!("unknown criterion {id}"))),
    }
}

fn contraction(tol: f64) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let mut table = Table::new("contraction", &["n", "initial_distance", "sup_distance", "slack", "relative_slack"]);
    let mut slacks = Vec::new();
    for n in [1usize << 12, 1 << 13] {
        let g = Grid::periodic(1, n, 8.0)?;
        let a = two_bumps(g)?;
        let b = Field::from_fn(g, |p| 0.9 * (1.0 - (p[0] - 0.2).powi(2)).max(0.0))?;
        let rep = l1_contraction_check(&PmeProblem::new(2.0, a.clone(), 0.02), &a, &b)?;
        let rel = rep.slack / rep.initial_distance;
        table.push(vec![
            n.to_string(),
            fmt_f64(rep.initial_distance),
            fmt_f64(rep.sup_distance),
            fmt_f64(rep.slack),
            fmt_f64(rel),
        ]);
        slacks.push((n, rel, rep.slack));
    }
    out.checks.push(Check::below("relative slack at n=4096", slacks[0].1, tol));
    out.checks.push(Check::flag(
        "slack halves under refinement",
        slacks[1].2 <= 0.5 * slacks[0].2,
    ));
    out.tables.push(table);
    Ok(out)
}

/// `log_η` of the seminorm ratio for `ũ(x) = η^{−2/m} u(ηx)`, with `ũ` on a
/// grid of `η n` nodes so that its samples are exactly samples of `u`.
pub fn nikolskii_scaling_exponent(m: f64, p: f64, s: f64, n: usize) -> CliResult<f64> {
    let eta: f64 = 2.0;
    let bb = BarenblattParams::new(m, 1, 1.0, 1.0)?;
    let g = Grid::periodic(1, n, 16.0)?;
    let u = barenblatt_field(&bb, &g, 0.0)?;
    let gf = Grid::periodic(1, 2 * n, 16.0)?;
    let ut = Field::from_fn(gf, |x| eta.powf(-2.0 / m) * barenblatt_eval(&bb, 0.0, &[eta * x[0]]))?;
    let a = nikolskii_seminorm(&u, s, p)?.value;
    let b = nikolskii_seminorm(&ut, s, p)?.value;
    Ok((b / a).ln() / eta.ln())
}

fn scaling(tol: f64) -> CliResult<Outcome> {
    let (m, p, s) = (2.0, 2.0, 0.5);
    let measured = nikolskii_scaling_exponent(m, p, s, 1 << 10)?;
    let want = -2.0 * p / m + s * p - 1.0;
    let mut table = Table::new("scaling", &["measured", "predicted"]);
    table.push(vec![fmt_f64(measured), fmt_f64(want)]);
    Ok(Outcome {
        checks: vec![Check::below("|measured/predicted - 1|", (measured / want - 1.0).abs(), tol)],
        tables: vec![table],
        plots: Vec::new(),
    })
}

/// `(LHS, RHS)` of the time-integrated Nikolskii bound for `m = 2`,
/// `γ = 1`: `∫|u|^3_{N^{2/3,3}} dt` against `‖u0‖_2² + ‖S‖²_{L²_{t,x}}`.
pub fn nikolskii_bound_sides(n: usize) -> CliResult<(f64, f64)> {
    let (m, gamma) = (2.0, 1.0);
    let g = Grid::periodic(1, n, 8.0)?;
    let u0 = two_bumps(g)?;
    let s = Field::from_fn(g, |p| 0.5 * (-4.0 * (p[0] + 2.0).powi(2)).exp())?;
    let t_end = 0.25;
    let pb = PmeProblem::new(m, u0.clone(), t_end).with_force(Forcing::Steady(s.clone()));
    let tr = solve_pme(&pb, SnapshotStride::Every(t_end / 50.0))?;
    let lhs = nikolskii_time_integral(&tr, 2.0 / (m + gamma), m + gamma)?;
    let rhs = u0.lp_norm_pow(1.0 + gamma) + t_end * s.lp_norm_pow(1.0 + gamma);
    Ok((lhs, rhs))
}

fn nikolskii_bound(tol: f64) -> CliResult<Outcome> {
    let runs: Vec<CliResult<(usize, f64, f64)>> = [1usize << 10, 1 << 11]
        .par_iter()
        .map(|&n| nikolskii_bound_sides(n).map(|(l, r)| (n, l, r)))
        .collect();
    let mut out = Outcome::default();
    let mut table = Table::new("nikolskii_bound", &["n", "lhs", "rhs", "constant"]);
    let mut cs = Vec::new();
    for r in runs {
        let (n, l, rh) = r?;
        let c = l / rh;
        table.push(vec![n.to_string(), fmt_f64(l), fmt_f64(rh), fmt_f64(c)]);
        out.checks.push(Check::flag(format!("n={n}: constant finite"), c.is_finite() && c > 0.0));
        cs.push(c);
    }
    out.checks.push(Check::below("|C_fine/C_coarse - 1|", (cs[1] / cs[0] - 1.0).abs(), tol));
    out.tables.push(table);
    Ok(out)
}

fn random_field(g: Grid, rng: &mut ChaCha8Rng) -> CliResult<Field> {
    Ok(Field::new(g, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())?)
}

/// Brute-force `sup |r−s|^m / |r^{[m/2]} − s^{[m/2]}|²` on a lattice in
/// `[−10, 10]²`.
fn lattice_constant(m: f64, n: i32) -> f64 {
    let mut c: f64 = 0.0;
    for i in -n..=n {
        for k in -n..=n {
            if i != k {
                let (r, s) = (10.0 * i as f64 / n as f64, 10.0 * k as f64 / n as f64);
                let den = (signed_power(r, 0.5 * m) - signed_power(s, 0.5 * m)).powi(2);
                c = c.max((r - s).abs().powf(m) / den);
            }
        }
    }
    c
}

fn structural(tol: f64, seed: u64) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut pou: f64 = 0.0;
    for g in [Grid::periodic(1, 1024, 3.0)?, Grid::periodic(2, 64, 1.0)?] {
        let part = DyadicPartition::for_grid(&g);
        for idx in 0..g.len() {
            pou = pou.max((part.total(wave_norm(&g, idx)) - 1.0).abs());
        }
    }
    out.checks.push(Check::below("partition of unity: max |sum - 1|", pou, 1e-12));

    let mut parseval: f64 = 0.0;
    for _ in 0..20 {
        for g in [Grid::periodic(1, 256, 1.0)?, Grid::periodic(2, 16, 1.0)?] {
            let u = random_field(g, &mut rng)?;
            let direct: f64 = u.values().iter().map(|x| x * x).sum();
            parseval = parseval.max((dft_forward(&u)?.energy() / direct - 1.0).abs());
        }
    }
    out.checks.push(Check::below("Parseval: max relative error", parseval, 1e-12));

    // kinetic sandwich: ∫χ dv = u, ∫|χ| dv = |u|, sign(v)χ ≥ 0, up to one cell
    let g = Grid::periodic(1, 64, 1.0)?;
    let mut avg_err: f64 = 0.0;
    let mut abs_err: f64 = 0.0;
    let mut sign_bad = 0usize;
    let mut delta_bad = 0usize;
    for nv in [11usize, 40, 101] {
        let vg = VGrid::covering(1.0, nv, 0.0)?;
        let u = random_field(g, &mut rng)?;
        let f = chi(&u, &vg)?;
        let avg = velocity_average(&f, |_| 1.0)?;
        let abs = velocity_average(&f, |v| v.signum())?;
        for i in 0..g.len() {
            let ui = u.values()[i];
            avg_err = avg_err.max((avg.values()[i] - ui).abs() / vg.dv());
            abs_err = abs_err.max((abs.values()[i] - ui.abs()).abs() / vg.dv());
            for k in 0..nv {
                if vg.center(k).signum() * (f.at(i, k) as f64) < 0.0 {
                    sign_bad += 1;
                }
            }
            // −1 on the cell (lo, lo+dv] holding u, +1 on the one holding 0
            let d = chi_edge_difference(ui, &vg);
            let ok = d.iter().enumerate().all(|(k, &dk)| {
                let lo = vg.lower_edge(k);
                let hi = lo + vg.dv();
                let want = (lo < 0.0 && 0.0 <= hi) as i8 - (lo < ui && ui <= hi) as i8;
                dk == want
            });
            if !ok {
                delta_bad += 1;
            }
        }
    }
    out.checks.push(Check::below("velocity average minus u, in cells", avg_err, 1.0 + 1e-9));
    out.checks.push(Check::below("velocity average of |chi| minus |u|, in cells", abs_err, 1.0 + 1e-9));
    out.checks.push(Check::below("sign(v) chi < 0 occurrences", sign_bad as f64, 0.5));
    out.checks.push(Check::below("edge-difference violations of -delta_u + delta_0", delta_bad as f64, 0.5));

    // micro-local reconstruction on Barenblatt kinetic data
    let bb = BarenblattParams::new(2.0, 1, 1.0, 1.0)?;
    let g = Grid::periodic(1, 1 << 8, 16.0)?;
    let nt = 1 << 7;
    let t_end = 0.5;
    let tr = solve_pme(
        &PmeProblem::new(2.0, barenblatt_field(&bb, &g, 0.0)?, t_end),
        SnapshotStride::Every(t_end / nt as f64),
    )?;
    let vg = VGrid::covering(tr.max_abs(), 33, 0.05)?;
    let data = kinetic_space_time(&tr, &vg, nt)?;
    let dec = microlocal_decompose(&data, &SymbolDescriptor::Pme { m: 2.0, dim: 1 }, 1.0, 12, &vec![vg.dv(); vg.n_v()])?;
    out.checks.push(Check::below("micro-local reconstruction error", dec.reconstruction_error, tol));

    let mut worst: f64 = 0.0;
    let mut table = Table::new("power_inequality", &["m", "lattice_constant", "max_ratio"]);
    for m in [2.0, 2.5, 3.0] {
        let c = lattice_constant(m, 400);
        let mut ratio: f64 = 0.0;
        for _ in 0..100_000 {
            let r: f64 = rng.gen_range(-10.0..10.0);
            let s: f64 = rng.gen_range(-10.0..10.0);
            let rhs = c * (signed_power(r, 0.5 * m) - signed_power(s, 0.5 * m)).powi(2);
            if rhs > 0.0 {
                ratio = ratio.max((r - s).abs().powf(m) / rhs);
            }
        }
        table.push(vec![fmt_f64(m), fmt_f64(c), fmt_f64(ratio)]);
        worst = worst.max(ratio);
    }
    out.checks.push(Check::below("power inequality: max lhs/(c rhs)", worst, 1.0 + 1e-12));
    out.tables.push(table);
    Ok(out)
}
