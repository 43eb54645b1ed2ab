use super::engine::{run, Axis, Engine, RunControl, SnapshotStride};
use super::forcing::ForceSampler;
use super::noise::{mollify_noise, noise_grid};
use super::trajectory::{SchemeKind, Trajectory};
use super::{check_common, default_blowup_cap, DEFAULT_CFL};
use crate::error::{invalid, Result};
use crate::grid::{Boundary, Field};
use crate::spectral::besov_profile_auto;

/// `∂_t u = ∂_xx u^{[m]} + ε ∂_xx u + u S^ε` on a Dirichlet interval, with
/// `S^ε = scale · mollify_noise(noise, noise_level)`.
#[derive(Clone, Debug)]
pub struct AndersonProblem {
    pub m: f64,
    pub u0: Field,
    /// Raw noise on [`noise_grid`]`(u0.grid())`.
    pub noise: Field,
    pub noise_level: f64,
    pub noise_scale: f64,
    pub viscosity: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub max_dt: Option<f64>,
    pub blowup_cap: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct AndersonRun {
    pub trajectory: Trajectory,
    /// `S^ε` on the periodic noise grid (node `i` multiplies `u_i`).
    pub potential: Field,
    /// `sup_j 2^{-j/2} ‖Δ_j S^ε‖_∞`, a `B^{-1/2}_{∞,∞}` surrogate.
    pub potential_besov: f64,
    pub potential_sup: f64,
}

impl AndersonProblem {
    pub fn new(m: f64, u0: Field, noise: Field, noise_level: f64, t_end: f64) -> Self {
        AndersonProblem {
            m,
            u0,
            noise,
            noise_level,
            noise_scale: 1.0,
            viscosity: 0.0,
            t_end,
            cfl_safety: DEFAULT_CFL,
            max_dt: None,
            blowup_cap: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 1.0 && self.m < 2.0) {
            return invalid(format!("m must lie in (1,2), got {}", self.m));
        }
        let g = self.u0.grid();
        if g.dim() != 1 || g.boundary() != Boundary::DirichletZero {
            return invalid("anderson problem needs a 1D dirichlet grid");
        }
        if self.u0.min() < 0.0 {
            return invalid("initial data must be nonnegative");
        }
        noise_grid(g)?.ensure_same(self.noise.grid(), "noise")?;
        if !self.noise_scale.is_finite() {
            return invalid("noise scale must be finite");
        }
        check_common(self.t_end, self.cfl_safety, self.viscosity, self.max_dt)
    }

    /// `S^ε` on the noise grid.
    pub fn potential(&self) -> Result<Field> {
        mollify_noise(&self.noise, self.noise_level)?.scale(self.noise_scale)
    }
}

pub fn solve_anderson(problem: &AndersonProblem, stride: SnapshotStride) -> Result<AndersonRun> {
    problem.validate()?;
    let potential = problem.potential()?;
    let g = *problem.u0.grid();
    let engine = Engine {
        grid: g,
        axes: vec![Axis { m: problem.m, flux: None }],
        eps: problem.viscosity,
        cfl: problem.cfl_safety,
        potential: Some(potential.values()),
    };
    let trajectory = run(
        &engine,
        &problem.u0,
        &ForceSampler::Zero,
        &RunControl {
            t_end: problem.t_end,
            stride,
            max_dt: problem.max_dt,
            blowup_cap: problem
                .blowup_cap
                .unwrap_or_else(|| default_blowup_cap(problem.u0.max_abs())),
            kind: SchemeKind::Anderson,
        },
    )?;
    let prof = besov_profile_auto(&potential, f64::INFINITY)?;
    let potential_besov = prof
        .entries
        .iter()
        .map(|&(j, b)| 2f64.powf(-0.5 * j as f64) * b)
        .fold(0.0, f64::max);
    Ok(AndersonRun {
        trajectory,
        potential_sup: potential.max_abs(),
        potential,
        potential_besov,
    })
}
