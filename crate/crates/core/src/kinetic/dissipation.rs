//! Discrete entropy-dissipation measure of the monotone schemes.
//!
//! For `∂_t u_i = Σ_e (Φ(u_{i+e}) − 2Φ(u_i) + Φ(u_{i−e})) / h²` and any
//! convex `η`, summation by parts gives
//!
//! ```text
//! d/dt Σ_i η(u_i) h^d = − Σ_{interfaces} h^d ∫ η''(v) ρ(v) dv,
//! ρ = |Φ(b) − Φ(a)| / h²  on  v ∈ [min(a,b), max(a,b)]
//! ```
//!
//! with `(a, b)` the values on both sides of an interface. So the measure
//! `q = ρ dv dx dt` is exactly what the scheme dissipates, and it is
//! nonnegative by construction. With `Φ = u^{[m]} + εu` one has
//! `∫ρ dv ≈ m|u|^{m−1}|∇u|² + ε|∇u|²`: the first part is the parabolic
//! measure `n = (4m/(m+1)²) |∇u^{[(m+1)/2]}|² δ_{v=u}`, the second the
//! viscous one. Snapshots enter with trapezoid time weights.

use serde::{Deserialize, Serialize};

use super::vgrid::VGrid;
use crate::error::{invalid, Result};
use crate::grid::{Boundary, Grid};
use crate::nonlinear::signed_power;
use crate::solvers::Trajectory;

/// One `(t, x, v)` cell of the measure. `node`/`axis` name the interface
/// between `node` and its right neighbour along `axis`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissipationCell {
    pub snapshot: u32,
    pub node: u32,
    pub axis: u8,
    pub cell: u32,
    pub parabolic: f64,
    pub viscous: f64,
}

impl DissipationCell {
    pub fn weight(&self) -> f64 {
        self.parabolic + self.viscous
    }
}

#[derive(Clone, Debug)]
pub struct DissipationMeasure {
    grid: Grid,
    vgrid: VGrid,
    times: Vec<f64>,
    cells: Vec<DissipationCell>,
}

impl DissipationMeasure {
    /// Assembles a measure from explicit cells; weights must be
    /// nonnegative and indices in range.
    pub fn from_cells(grid: Grid, vgrid: VGrid, times: Vec<f64>, cells: Vec<DissipationCell>) -> Result<Self> {
        for c in &cells {
            if !(c.parabolic >= 0.0 && c.viscous >= 0.0) {
                return invalid("dissipation weights must be nonnegative");
            }
            if c.cell as usize >= vgrid.n_v() || c.node as usize >= grid.len() || c.snapshot as usize >= times.len() {
                return invalid("dissipation cell index out of range");
            }
            if c.axis as usize >= grid.dim() {
                return invalid("dissipation axis out of range");
            }
        }
        Ok(DissipationMeasure {
            grid,
            vgrid,
            times,
            cells,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn vgrid(&self) -> &VGrid {
        &self.vgrid
    }
    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn cells(&self) -> &[DissipationCell] {
        &self.cells
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().map(|c| c.weight()).sum()
    }
    pub fn parabolic_total(&self) -> f64 {
        self.cells.iter().map(|c| c.parabolic).sum()
    }
    pub fn viscous_total(&self) -> f64 {
        self.cells.iter().map(|c| c.viscous).sum()
    }

    /// Position of the interface a cell belongs to.
    pub fn position(&self, c: &DissipationCell) -> [f64; 2] {
        let mut p = self.grid.point(c.node as usize);
        p[c.axis as usize] += 0.5 * self.grid.spacing();
        p
    }

    /// `Σ_cells q_c w(k)` for a per-velocity-cell weight.
    pub fn moment(&self, weight: impl Fn(usize) -> f64) -> f64 {
        let w: Vec<f64> = (0..self.vgrid.n_v()).map(weight).collect();
        self.cells.iter().map(|c| c.weight() * w[c.cell as usize]).sum()
    }

    /// `∫ g(v) q` with `g` replaced by its exact cell average, given an
    /// antiderivative `big_g`.
    pub fn cell_average_moment(&self, big_g: impl Fn(f64) -> f64) -> f64 {
        let vg = self.vgrid;
        let dv = vg.dv();
        self.moment(|k| {
            let lo = vg.lower_edge(k);
            (big_g(lo + dv) - big_g(lo)) / dv
        })
    }
}

/// Each interface as `(node, axis, u_node, u_right)`.
pub(crate) fn for_each_interface(grid: &Grid, u: &[f64], mut f: impl FnMut(usize, usize, f64, f64)) {
    let n = grid.n();
    if grid.dim() == 1 {
        for i in 0..n {
            let right = if i + 1 < n {
                u[i + 1]
            } else if grid.boundary() == Boundary::Periodic {
                u[0]
            } else {
                0.0
            };
            f(i, 0, u[i], right);
        }
    } else {
        for r in 0..n {
            for c in 0..n {
                let i = r * n + c;
                f(i, 0, u[i], u[((r + 1) % n) * n + c]);
                f(i, 1, u[i], u[r * n + (c + 1) % n]);
            }
        }
    }
}

/// The measure of an isotropic run with exponent `m` and viscosity `ε`.
pub fn dissipation_from_run(traj: &Trajectory, m: f64, eps: f64, vgrid: &VGrid) -> Result<DissipationMeasure> {
    dissipation_from_run_axes(traj, &vec![m; traj.grid().dim()], eps, vgrid)
}

/// Per-axis exponents (anisotropic runs). First-order flux terms of the
/// upwind scheme are not included.
pub fn dissipation_from_run_axes(
    traj: &Trajectory,
    m_axes: &[f64],
    eps: f64,
    vgrid: &VGrid,
) -> Result<DissipationMeasure> {
    let grid = *traj.grid();
    if m_axes.len() != grid.dim() {
        return invalid("one exponent per axis required");
    }
    if !(eps >= 0.0) {
        return invalid("viscosity must be >= 0");
    }
    for s in traj.snapshots() {
        vgrid.ensure_covers(s.min().min(0.0), s.max().max(0.0))?;
    }
    let h = grid.spacing();
    let weights = traj.trapezoid_weights();
    let mut cells = Vec::new();
    let dv = vgrid.dv();
    for (k, (snap, &w)) in traj.snapshots().iter().zip(&weights).enumerate() {
        if w == 0.0 {
            continue;
        }
        let fac = w * grid.cell_volume() / (h * h);
        for_each_interface(&grid, snap.values(), |node, axis, a, b| {
            if a == b {
                return;
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let m = m_axes[axis];
            let par = (signed_power(b, m) - signed_power(a, m)).abs() * fac;
            let visc = eps * (hi - lo) * fac;
            let k_lo = vgrid.cell_of(lo).expect("covered");
            let k_hi = vgrid.cell_of(hi).expect("covered");
            for c in k_lo..=k_hi {
                let e = vgrid.lower_edge(c);
                let overlap = (hi.min(e + dv) - lo.max(e)).max(0.0);
                if overlap == 0.0 {
                    continue;
                }
                cells.push(DissipationCell {
                    snapshot: k as u32,
                    node: node as u32,
                    axis: axis as u8,
                    cell: c as u32,
                    parabolic: par * overlap,
                    viscous: visc * overlap,
                });
            }
        });
    }
    Ok(DissipationMeasure {
        grid,
        vgrid: *vgrid,
        times: traj.times().to_vec(),
        cells,
    })
}

/// `Σ_cells |v_c|^{−γ} q_c`; the cell containing 0 uses the exact cell
/// average of `|v|^{−γ}`.
pub fn singular_moment(q: &DissipationMeasure, gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return invalid(format!("gamma must lie in [0,1), got {gamma}"));
    }
    Ok(power_moment(q, -gamma))
}

/// `∫ |v|^a q` for `a > −1`, scored like [`singular_moment`].
pub fn power_moment(q: &DissipationMeasure, a: f64) -> f64 {
    assert!(a > -1.0, "exponent must exceed -1");
    let vg = *q.vgrid();
    let zero = vg.zero_cell();
    let dv = vg.dv();
    let anti = |v: f64| signed_power(v, 1.0 + a) / (1.0 + a);
    q.moment(|k| {
        if k == zero {
            let lo = vg.lower_edge(k);
            (anti(lo + dv) - anti(lo)) / dv
        } else if a == 0.0 {
            1.0
        } else {
            vg.center(k).abs().powf(a)
        }
    })
}
