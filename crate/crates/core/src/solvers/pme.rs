use super::engine::{run, Axis, Engine, RunControl, SnapshotStride};
use super::forcing::Forcing;
use super::trajectory::{SchemeKind, Trajectory};
use super::{check_common, default_blowup_cap, DEFAULT_CFL};
use crate::error::{invalid, Result};
use crate::grid::Field;

/// `∂_t u = Δ u^{[m]} + εΔu + S` on the grid of `u0`.
///
/// Dirichlet-zero grids are accepted in 1D as well; mass balance is exact
/// only in the periodic case.
#[derive(Clone, Debug)]
pub struct PmeProblem {
    pub m: f64,
    pub u0: Field,
    pub force: Forcing,
    pub viscosity: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    /// Upper bound on the step, on top of the CFL rule.
    pub max_dt: Option<f64>,
    /// Abort when `max|u|` exceeds this; defaults to `1e6 (1 + max|u0|)`.
    pub blowup_cap: Option<f64>,
}

impl PmeProblem {
    pub fn new(m: f64, u0: Field, t_end: f64) -> Self {
        PmeProblem {
            m,
            u0,
            force: Forcing::Zero,
            viscosity: 0.0,
            t_end,
            cfl_safety: DEFAULT_CFL,
            max_dt: None,
            blowup_cap: None,
        }
    }

    pub fn with_force(mut self, force: Forcing) -> Self {
        self.force = force;
        self
    }

    pub fn with_viscosity(mut self, eps: f64) -> Self {
        self.viscosity = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 1.0 && self.m.is_finite()) {
            return invalid(format!("m must exceed 1, got {}", self.m));
        }
        if self.u0.grid().dim() == 2 && !self.u0.grid().is_periodic() {
            return invalid("dirichlet grids are 1D only");
        }
        check_common(self.t_end, self.cfl_safety, self.viscosity, self.max_dt)
    }

    pub(crate) fn engine(&self) -> Engine<'static> {
        let g = *self.u0.grid();
        Engine {
            grid: g,
            axes: vec![Axis { m: self.m, flux: None }; g.dim()],
            eps: self.viscosity,
            cfl: self.cfl_safety,
            potential: None,
        }
    }

    pub(crate) fn cap(&self) -> f64 {
        self.blowup_cap.unwrap_or_else(|| default_blowup_cap(self.u0.max_abs()))
    }
}

pub fn solve_pme(problem: &PmeProblem, stride: SnapshotStride) -> Result<Trajectory> {
    problem.validate()?;
    let sampler = problem.force.sampler(problem.u0.grid())?;
    run(
        &problem.engine(),
        &problem.u0,
        &sampler,
        &RunControl {
            t_end: problem.t_end,
            stride,
            max_dt: problem.max_dt,
            blowup_cap: problem.cap(),
            kind: SchemeKind::Pme,
        },
    )
}

/// `∂_t u + Σ_j ∂_j u^{[n_j]} − Σ_j ∂_jj u^{[m_j]} − εΔu = S`, periodic.
///
/// `n_list = None` drops the flux. The flux uses the signed power so that it
/// stays monotone for sign-changing data.
#[derive(Clone, Debug)]
pub struct AnisoProblem {
    pub m_list: Vec<f64>,
    pub n_list: Option<Vec<f64>>,
    pub u0: Field,
    pub force: Forcing,
    pub viscosity: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub max_dt: Option<f64>,
    pub blowup_cap: Option<f64>,
}

impl AnisoProblem {
    pub fn new(m_list: Vec<f64>, n_list: Option<Vec<f64>>, u0: Field, t_end: f64) -> Self {
        AnisoProblem {
            m_list,
            n_list,
            u0,
            force: Forcing::Zero,
            viscosity: 0.0,
            t_end,
            cfl_safety: DEFAULT_CFL,
            max_dt: None,
            blowup_cap: None,
        }
    }

    /// `min_j m_j`.
    pub fn m_min(&self) -> f64 {
        self.m_list.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.u0.grid();
        if !g.is_periodic() {
            return invalid("anisotropic solver needs a periodic grid");
        }
        if self.m_list.len() != g.dim() {
            return invalid(format!("need {} diffusion exponents, got {}", g.dim(), self.m_list.len()));
        }
        if self.m_list.iter().any(|&m| !(m >= 1.0 && m.is_finite())) {
            return invalid("diffusion exponents must be >= 1");
        }
        if !(self.m_min() > 1.0) {
            return invalid("min m_j must exceed 1");
        }
        if let Some(n) = &self.n_list {
            if n.len() != g.dim() {
                return invalid(format!("need {} flux exponents, got {}", g.dim(), n.len()));
            }
            if n.iter().any(|&v| !(v >= 1.0 && v.is_finite())) {
                return invalid("flux exponents must be >= 1");
            }
        }
        check_common(self.t_end, self.cfl_safety, self.viscosity, self.max_dt)
    }
}

pub fn solve_aniso(problem: &AnisoProblem, stride: SnapshotStride) -> Result<Trajectory> {
    problem.validate()?;
    let g = *problem.u0.grid();
    let axes = (0..g.dim())
        .map(|a| Axis {
            m: problem.m_list[a],
            flux: problem.n_list.as_ref().map(|n| n[a]),
        })
        .collect();
    let engine = Engine {
        grid: g,
        axes,
        eps: problem.viscosity,
        cfl: problem.cfl_safety,
        potential: None,
    };
    let sampler = problem.force.sampler(&g)?;
    run(
        &engine,
        &problem.u0,
        &sampler,
        &RunControl {
            t_end: problem.t_end,
            stride,
            max_dt: problem.max_dt,
            blowup_cap: problem
                .blowup_cap
                .unwrap_or_else(|| default_blowup_cap(problem.u0.max_abs())),
            kind: SchemeKind::Aniso,
        },
    )
}
