//! One pipeline per experiment kind. Each returns its checks and artifacts
//! without touching the filesystem.

use rayon::prelude::*;

use pmelab_core::exact::{barenblatt_critical_exponent, barenblatt_field, power_profile, BarenblattParams};
use pmelab_core::kinetic::{anderson_energy_audit, dissipation_from_run, entropy_audit, AuditOptions, VGrid};
use pmelab_core::solvers::{
    sample_white_noise, solve_anderson, solve_pme, AndersonProblem, Forcing, PmeProblem, SnapshotStride, SpikeTrain,
};
use pmelab_core::spectral::{
    aniso_exponents, aniso_lambda, averaging_exponents, besov_profile_auto, critical_exponent_estimate,
    exponent_table, nondegeneracy_fit, time_integrated_profile, BesovProfile, ExponentInputs, ScanOptions,
    SymbolDescriptor, VInterval,
};
use pmelab_core::{Field, Grid};

use crate::config::*;
use crate::error::{config_err, CliResult};
use crate::output::{bar_chart, fmt_f64, line_plot, Series, Table};
use crate::report::Check;

#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    /// `(file stem, svg text)`.
    pub plots: Vec<(String, String)>,
}

pub fn execute(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    match &cfg.experiment {
        Experiment::RegularitySweep(c) => regularity_sweep(c, cfg.seed),
        Experiment::BarenblattValidate(c) => barenblatt_validate(c),
        Experiment::NondegeneracyFit(c) => nondegeneracy(c),
        Experiment::AndersonRun(c) => anderson(c, cfg.seed),
        Experiment::EnergyAudit(c) => energy_audit(c, cfg.seed),
        Experiment::ExponentTable(c) => exponents(c),
    }
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

fn decay_series(label: String, prof: &BesovProfile) -> Series {
    Series {
        label,
        points: prof
            .entries
            .iter()
            .filter(|e| e.1 > 0.0)
            .map(|e| (e.0 as f64, e.1.log2()))
            .collect(),
    }
}

/// Two compact bumps, scaled to the box.
pub fn two_bumps(g: Grid) -> CliResult<Field> {
    let s = g.length() / 8.0;
    Ok(Field::from_fn(g, |p| {
        let x = p[0] / s;
        (1.0 - x * x).max(0.0) + 0.5 * (1.0 - 4.0 * (x - 1.5).powi(2)).max(0.0)
    })?)
}

/// `(p, profile, s_hat, capped, slope stderr)`.
type SweepRow = (f64, BesovProfile, f64, bool, f64);

fn regularity_sweep(c: &RegularitySweep, seed: u64) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let mut table = Table::new("regularity", &["case", "p", "s_hat", "reference", "capped", "slope_stderr"]);
    let mut series = Vec::new();
    match &c.source {
        SweepSource::PowerProfile { betas, length } => {
            let g = Grid::periodic(1, c.n, *length).map_err(config_err)?;
            for &beta in betas {
                let u = power_profile(beta, &g)?;
                for &p in &c.ps {
                    let prof = besov_profile_auto(&u, p)?;
                    let fit = critical_exponent_estimate(&prof, None)?;
                    let want = beta + 1.0 / p;
                    let case = format!("power beta={beta}");
                    out.checks.push(Check::below(
                        format!("{case} p={p}: |s_hat - (beta + 1/p)|"),
                        (fit.s_hat - want).abs(),
                        c.tolerance,
                    ));
                    table.push(vec![case.clone(), f(p), f(fit.s_hat), f(want), fit.capped.to_string(), f(fit.slope_stderr)]);
                    series.push(decay_series(format!("beta={beta} p={p}"), &prof));
                }
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
            let g = Grid::periodic(1, c.n, *length).map_err(config_err)?;
            let jobs: Vec<(f64, u64)> = ms
                .iter()
                .flat_map(|&m| (0..*runs_per_m as u64).map(move |r| (m, seed + r)))
                .collect();
            let runs: Vec<CliResult<Vec<SweepRow>>> = jobs
                .par_iter()
                .map(|&(m, s)| {
                    let train = SpikeTrain::random(
                        &g,
                        *spikes,
                        spike_width_cells * g.spacing(),
                        *spike_duration,
                        *spike_mass,
                        *t_end,
                        s,
                    )?;
                    let pb = PmeProblem::new(m, two_bumps(g)?, *t_end).with_force(Forcing::Spikes(train));
                    let tr = solve_pme(&pb, SnapshotStride::Every(t_end / *snapshots as f64))?;
                    let w = tr.trapezoid_weights();
                    c.ps.iter()
                        .map(|&p| {
                            let prof = time_integrated_profile(tr.snapshots(), &w, p)?;
                            let fit = critical_exponent_estimate(&prof, None)?;
                            Ok((p, prof, fit.s_hat, fit.capped, fit.slope_stderr))
                        })
                        .collect()
                })
                .collect();
            for (&(m, s), res) in jobs.iter().zip(runs) {
                for (p, prof, s_hat, capped, se) in res? {
                    let floor = 2.0 / m;
                    let case = format!("forced m={m} seed={s}");
                    out.checks.push(Check::above(format!("{case} p={p}: s_hat vs 2/m - tol"), s_hat, floor - c.tolerance));
                    table.push(vec![case.clone(), f(p), f(s_hat), f(floor), capped.to_string(), f(se)]);
                    series.push(decay_series(format!("m={m} seed={s}"), &prof));
                }
            }
        }
    }
    out.tables.push(table);
    out.plots.push((
        "block_decay".into(),
        line_plot("Block-norm decay", "j", "log2 ||Delta_j u||_p", &series),
    ));
    Ok(out)
}

fn barenblatt_validate(c: &BarenblattValidate) -> CliResult<Outcome> {
    let bb = BarenblattParams::new(c.m, 1, c.a, c.gamma_shift).map_err(config_err)?;
    let g = Grid::periodic(1, c.n, c.length).map_err(config_err)?;
    let mut out = Outcome::default();
    out.checks.push(Check::below(
        "support radius / half box",
        bb.support_radius(c.t + 1.0) / (0.5 * c.length),
        1.0,
    ));
    let u = barenblatt_field(&bb, &g, c.t)?;
    let later = barenblatt_field(&bb, &g, c.t + 1.0)?;
    out.checks.push(Check::below("mass drift over unit time", (u.integral() - later.integral()).abs(), 1e-6));

    let mut table = Table::new("barenblatt", &["p", "s_hat", "s_critical", "capped"]);
    let mut series = Vec::new();
    let mut ps = vec![c.p];
    if c.p != c.m + 1.0 {
        ps.push(c.m + 1.0);
    }
    for &p in &ps {
        let prof = besov_profile_auto(&u, p)?;
        let fit = critical_exponent_estimate(&prof, None)?;
        let sc = barenblatt_critical_exponent(c.m, p)?;
        out.checks.push(Check::below(format!("p={p}: |s_hat - s_c|"), (fit.s_hat - sc).abs(), c.tolerance));
        table.push(vec![f(p), f(fit.s_hat), f(sc), fit.capped.to_string()]);
        series.push(decay_series(format!("p={p}"), &prof));
    }
    // membership threshold gamma < m/(m-1) at p = m+1, restated as s_c
    let threshold = 2.0 / (c.m + 1.0) * c.m / (c.m - 1.0);
    out.checks.push(Check::below(
        "threshold restatement |s_c(m, m+1) - 2m/((m+1)(m-1))|",
        (barenblatt_critical_exponent(c.m, c.m + 1.0)? - threshold).abs(),
        1e-12,
    ));
    out.tables.push(table);
    out.plots.push(("block_decay".into(), line_plot("Barenblatt block decay", "j", "log2 ||Delta_j u||_p", &series)));
    Ok(out)
}

fn nondegeneracy(c: &NondegeneracyFitConfig) -> CliResult<Outcome> {
    let iv = VInterval::new(c.v_lo, c.v_hi).map_err(config_err)?;
    let opts = ScanOptions::default();
    let fits: Vec<CliResult<_>> = c
        .ms
        .par_iter()
        .map(|&m| {
            let d = SymbolDescriptor::Pme { m, dim: 1 };
            Ok(nondegeneracy_fit(&d, &c.js, &c.deltas, c.gamma, &iv, &opts)?)
        })
        .collect();
    let mut out = Outcome::default();
    let mut rows = Table::new("nondegeneracy_rows", &["m", "j", "delta", "omega", "dv_bound"]);
    let mut summary = Table::new(
        "nondegeneracy_fit",
        &["m", "alpha", "alpha_expected", "beta", "beta_expected", "lambda", "lambda_expected", "mu"],
    );
    let mut series = Vec::new();
    for (&m, fit) in c.ms.iter().zip(fits) {
        let fit = fit?;
        let a_want = 1.0 / (m - 1.0);
        let l_want = aniso_lambda(&[m], &[m], c.gamma)?;
        out.checks.push(Check::below(format!("m={m}: |alpha/(1/(m-1)) - 1|"), (fit.alpha / a_want - 1.0).abs(), c.tolerance));
        out.checks.push(Check::below(format!("m={m}: |beta/2 - 1|"), (fit.beta / 2.0 - 1.0).abs(), c.tolerance));
        out.checks.push(Check::below(
            format!("m={m}: |lambda/lambda_formula - 1|"),
            (fit.lambda / l_want - 1.0).abs(),
            c.lambda_tolerance,
        ));
        summary.push(vec![f(m), f(fit.alpha), f(a_want), f(fit.beta), f(2.0), f(fit.lambda), f(l_want), f(fit.mu)]);
        for r in &fit.rows {
            rows.push(vec![f(m), f(r.j), f(r.delta), f(r.omega), f(r.dv_bound)]);
        }
        let j0 = c.js[0];
        series.push(Series {
            label: format!("m={m}, J={j0:.3}"),
            points: fit
                .rows
                .iter()
                .filter(|r| r.j == j0 && r.omega > 0.0)
                .map(|r| (r.delta.ln(), r.omega.ln()))
                .collect(),
        });
    }
    out.tables.push(summary);
    out.tables.push(rows);
    out.plots.push(("omega_fit".into(), line_plot("Non-degeneracy measure", "ln delta", "ln omega", &series)));
    Ok(out)
}

fn anderson(c: &AndersonRunConfig, seed: u64) -> CliResult<Outcome> {
    let g = Grid::dirichlet(c.n, c.length).map_err(config_err)?;
    let l = c.length;
    let u0 = Field::from_fn(g, |p| (p[0] * (l - p[0]) / l).max(0.0))?;
    let jobs: Vec<(u64, u32)> = (0..c.realisations as u64)
        .flat_map(|r| c.mollifier_blocks.iter().map(move |&b| (seed + r, b)))
        .collect();
    let results: Vec<CliResult<(f64, f64, f64, f64)>> = jobs
        .par_iter()
        .map(|&(s, b)| {
            let noise = sample_white_noise(&g, s)?;
            let level = 0.99 / (2.0 * std::f64::consts::PI * 2f64.powi(b as i32) / l);
            let pb = AndersonProblem::new(c.m, u0.clone(), noise, level, c.t_end);
            let run = solve_anderson(&pb, SnapshotStride::Every(c.snapshot_every))?;
            let tr = &run.trajectory;
            let vg = VGrid::covering(tr.max_abs(), c.n_v, 0.05)?;
            let q = dissipation_from_run(tr, c.m, 0.0, &vg)?;
            let rep = anderson_energy_audit(&run, &q, c.m, c.m)?;
            let prof = time_integrated_profile(tr.snapshots(), &tr.trapezoid_weights(), c.m)?;
            let fit = critical_exponent_estimate(&prof, None)?;
            Ok((rep.rows[0].implied_constant, rep.rows[1].implied_constant, fit.s_hat, run.potential_besov))
        })
        .collect();
    let mut out = Outcome::default();
    let mut table = Table::new(
        "anderson",
        &["seed", "block", "energy_constant", "kinetic_constant", "s_hat", "potential_besov"],
    );
    let mut bars = Vec::new();
    let mut per_seed: Vec<(u64, Vec<f64>)> = Vec::new();
    let reference = 3.0 / (2.0 * c.m);
    for (&(s, b), r) in jobs.iter().zip(results) {
        let (ce, ck, s_hat, pb) = r?;
        table.push(vec![s.to_string(), b.to_string(), f(ce), f(ck), f(s_hat), f(pb)]);
        bars.push((format!("{s}/{b}"), ce));
        out.checks.push(Check::flag(format!("seed={s} block={b}: energy constant finite"), ce.is_finite()));
        out.checks.push(Check::report(format!("seed={s} block={b}: s_hat vs 3/(2m)"), s_hat, reference));
        match per_seed.last_mut() {
            Some((k, v)) if *k == s => v.push(ce),
            _ => per_seed.push((s, vec![ce])),
        }
    }
    for (s, cs) in per_seed {
        let mean = cs.iter().sum::<f64>() / cs.len() as f64;
        let spread = cs.iter().map(|x| (x / mean - 1.0).abs()).fold(0.0, f64::max);
        out.checks.push(Check::below(format!("seed={s}: constant spread across mollification"), spread, c.tolerance));
    }
    out.tables.push(table);
    out.plots.push(("energy_constants".into(), bar_chart("Anderson energy constants (seed/block)", "C", &bars)));
    Ok(out)
}

fn forcing(kind: ForcingKind, g: &Grid, t_end: f64, seed: u64) -> CliResult<Forcing> {
    let s = g.length() / 8.0;
    Ok(match kind {
        ForcingKind::Zero => Forcing::Zero,
        ForcingKind::Steady => Forcing::Steady(Field::from_fn(*g, |p| {
            0.5 * (-4.0 * ((p[0] / s) + 2.0).powi(2)).exp()
        })?),
        ForcingKind::Spikes => Forcing::Spikes(SpikeTrain::random(g, 4, 0.05 * s, 0.08 * t_end, 0.3, t_end, seed)?),
    })
}

fn energy_audit(c: &EnergyAuditConfig, seed: u64) -> CliResult<Outcome> {
    let jobs: Vec<(f64, ForcingKind, usize)> = c
        .ms
        .iter()
        .flat_map(|&m| c.forcings.iter().flat_map(move |&k| (0..=c.refinements).map(move |r| (m, k, r))))
        .collect();
    for &(_, _, r) in &jobs {
        Grid::periodic(1, c.n << r, c.length).map_err(config_err)?;
    }
    let results: Vec<CliResult<(Vec<f64>, Option<f64>)>> = jobs
        .par_iter()
        .map(|&(m, kind, r)| {
            let n = c.n << r;
            let g = Grid::periodic(1, n, c.length)?;
            let u0 = two_bumps(g)?;
            let force = forcing(kind, &g, c.t_end, seed)?;
            let tr = solve_pme(
                &PmeProblem::new(m, u0.clone(), c.t_end).with_force(force.clone()),
                SnapshotStride::Every(c.t_end / c.snapshots as f64),
            )?;
            let vg = VGrid::covering(tr.max_abs(), n / 4 + 1, 0.05)?;
            let q = dissipation_from_run(&tr, m, 0.0, &vg)?;
            let consts = c
                .gammas
                .iter()
                .map(|&gamma| {
                    let rep = entropy_audit(&tr, &q, gamma, &force, &AuditOptions::default())?;
                    Ok(rep.row("energy").map(|r| r.implied_constant).unwrap_or(f64::NAN))
                })
                .collect::<CliResult<Vec<f64>>>()?;
            let drift = match &force {
                Forcing::Zero => Some((tr.last().integral() - u0.integral()).abs()),
                Forcing::Steady(s) => Some((tr.last().integral() - u0.integral() - c.t_end * s.integral()).abs()),
                Forcing::Spikes(_) => None,
            };
            Ok((consts, drift))
        })
        .collect();
    let kind_name = |k: ForcingKind| match k {
        ForcingKind::Zero => "zero",
        ForcingKind::Steady => "steady",
        ForcingKind::Spikes => "spikes",
    };
    let mut out = Outcome::default();
    let mut table = Table::new("energy_audit", &["m", "forcing", "n", "gamma", "implied_constant"]);
    let mut bars = Vec::new();
    let mut prev: Option<(f64, ForcingKind, Vec<f64>)> = None;
    for (&(m, kind, r), res) in jobs.iter().zip(results) {
        let (consts, drift) = res?;
        let n = c.n << r;
        let case = format!("m={m} {} n={n}", kind_name(kind));
        if let Some(d) = drift {
            out.checks.push(Check::below(format!("{case}: mass balance"), d, c.mass_tolerance));
        }
        for (&gamma, &ci) in c.gammas.iter().zip(&consts) {
            table.push(vec![f(m), kind_name(kind).into(), n.to_string(), f(gamma), f(ci)]);
            out.checks.push(Check::flag(format!("{case} gamma={gamma}: constant finite"), ci.is_finite() && ci > 0.0));
            if r == c.refinements {
                bars.push((format!("{m}/{}/{gamma}", kind_name(kind)), ci));
            }
        }
        if let Some((pm, pk, pc)) = &prev {
            if *pm == m && *pk == kind && r > 0 {
                for ((&gamma, &a), &b) in c.gammas.iter().zip(pc).zip(&consts) {
                    out.checks.push(Check::below(
                        format!("{case} gamma={gamma}: growth under refinement"),
                        (b / a - 1.0).max(0.0),
                        c.tolerance,
                    ));
                }
            }
        }
        prev = Some((m, kind, consts));
    }
    out.tables.push(table);
    out.plots.push(("energy_audit".into(), bar_chart("Energy audit constants (m/forcing/gamma)", "C", &bars)));
    Ok(out)
}

fn exponents(c: &ExponentTableConfig) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let rows = exponent_table(&c.ms).map_err(config_err)?;
    let mut table = Table::new("exponent_table", &["m", "s_star", "p_star", "s_energy"]);
    for r in &rows {
        table.push(vec![f(r.m), f(r.s_star), f(r.p_star), f(r.s_energy)]);
        let e = averaging_exponents(&ExponentInputs::pme_limit(r.m)?)?;
        let err = (e.theta - 1.0 / r.m)
            .abs()
            .max((e.s_star - 2.0 / r.m).abs())
            .max((e.p_star - r.m).abs())
            .max((r.s_energy - 2.0 / (r.m + 1.0)).abs());
        out.checks.push(Check::below(format!("m={}: PME-limit exponents", r.m), err, c.tolerance));
    }
    let a = averaging_exponents(&ExponentInputs::anderson(c.anderson_m).map_err(config_err)?)?;
    out.checks.push(Check::below(
        format!("anderson m={}: |s* - 3/(2m)|", c.anderson_m),
        (a.s_star - 1.5 / c.anderson_m).abs(),
        c.tolerance,
    ));
    let (s, p) = aniso_exponents(&c.aniso_m, &c.aniso_n).map_err(config_err)?;
    let mbar = c.aniso_m.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let low = c.aniso_m.iter().chain(&c.aniso_n).cloned().fold(f64::INFINITY, f64::min);
    let (s_want, p_want) = ((2.0 / mbar) * (low - 1.0) / (mbar - 1.0), 2.0 * mbar / (1.0 + mbar));
    out.checks.push(Check::below(
        "anisotropic (s*, p*)",
        (s - s_want).abs().max((p - p_want).abs()),
        c.tolerance,
    ));
    let mut aniso = Table::new("aniso_exponents", &["m", "n", "s_star", "p_star"]);
    let join = |v: &[f64]| v.iter().map(|x| f(*x)).collect::<Vec<_>>().join(";");
    aniso.push(vec![join(&c.aniso_m), join(&c.aniso_n), f(s), f(p)]);
    out.plots.push((
        "exponent_table".into(),
        line_plot(
            "Exponents vs m",
            "m",
            "exponent",
            &[
                Series { label: "s* = 2/m".into(), points: rows.iter().map(|r| (r.m, r.s_star)).collect() },
                Series { label: "s_energy = 2/(m+1)".into(), points: rows.iter().map(|r| (r.m, r.s_energy)).collect() },
            ],
        ),
    ));
    out.tables.push(table);
    out.tables.push(aniso);
    Ok(out)
}
