use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::{Field, Grid};

/// Uniform cells `[v_min + k dv, v_min + (k+1) dv)`, `k < n_v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VGrid {
    v_min: f64,
    v_max: f64,
    n_v: usize,
}

impl VGrid {
    pub fn new(v_min: f64, v_max: f64, n_v: usize) -> Result<VGrid> {
        if !(v_min < 0.0 && v_max > 0.0 && v_min.is_finite() && v_max.is_finite()) {
            return invalid(format!("velocity range must straddle 0, got [{v_min}, {v_max}]"));
        }
        if n_v < 3 {
            return invalid("need at least 3 velocity cells");
        }
        Ok(VGrid { v_min, v_max, n_v })
    }

    /// Symmetric grid on `[−(1+margin)U, (1+margin)U]` with an odd number of
    /// cells, so that `v = 0` is the centre of the middle cell.
    pub fn covering(u_abs_max: f64, n_v: usize, margin: f64) -> Result<VGrid> {
        let r = (u_abs_max.abs() * (1.0 + margin)).max(f64::MIN_POSITIVE.sqrt());
        let n = if n_v % 2 == 0 { n_v + 1 } else { n_v };
        VGrid::new(-r, r, n)
    }

    pub fn v_min(&self) -> f64 {
        self.v_min
    }
    pub fn v_max(&self) -> f64 {
        self.v_max
    }
    pub fn n_v(&self) -> usize {
        self.n_v
    }
    pub fn dv(&self) -> f64 {
        (self.v_max - self.v_min) / self.n_v as f64
    }
    pub fn lower_edge(&self, k: usize) -> f64 {
        self.v_min + k as f64 * self.dv()
    }
    pub fn center(&self, k: usize) -> f64 {
        self.v_min + (k as f64 + 0.5) * self.dv()
    }

    /// Cell containing `v` (upper edge belongs to the cell above, the last
    /// edge to the last cell).
    pub fn cell_of(&self, v: f64) -> Option<usize> {
        if !(v >= self.v_min && v <= self.v_max) {
            return None;
        }
        let k = ((v - self.v_min) / self.dv()).floor() as usize;
        Some(k.min(self.n_v - 1))
    }

    pub fn zero_cell(&self) -> usize {
        self.cell_of(0.0).expect("0 lies inside every velocity grid")
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        lo >= self.v_min && hi <= self.v_max
    }

    pub(crate) fn ensure_covers(&self, lo: f64, hi: f64) -> Result<()> {
        if self.covers(lo, hi) {
            Ok(())
        } else {
            Err(Error::VelocityCoverage {
                v_min: self.v_min,
                v_max: self.v_max,
                lo,
                hi,
            })
        }
    }
}

/// `χ(u, v) = 1_{v<u} − 1_{v<0}`.
#[inline]
pub fn chi_value(u: f64, v: f64) -> i8 {
    (v < u) as i8 - (v < 0.0) as i8
}

/// `χ(u(x), v_k)` at cell centres, row-major `[node][cell]`.
#[derive(Clone, Debug, PartialEq)]
pub struct KineticField {
    grid: Grid,
    vgrid: VGrid,
    values: Vec<i8>,
}

impl KineticField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn vgrid(&self) -> &VGrid {
        &self.vgrid
    }
    pub fn values(&self) -> &[i8] {
        &self.values
    }
    pub fn at(&self, node: usize, cell: usize) -> i8 {
        self.values[node * self.vgrid.n_v + cell]
    }
    pub fn row(&self, node: usize) -> &[i8] {
        let n = self.vgrid.n_v;
        &self.values[node * n..(node + 1) * n]
    }

    /// `Σ |f| dv h^d`.
    pub fn l1_norm(&self) -> f64 {
        let c: i64 = self.values.iter().map(|&v| v.unsigned_abs() as i64).sum();
        c as f64 * self.vgrid.dv() * self.grid.cell_volume()
    }
}

pub fn chi(u: &Field, vgrid: &VGrid) -> Result<KineticField> {
    vgrid.ensure_covers(u.min(), u.max())?;
    let nv = vgrid.n_v;
    let mut values = Vec::with_capacity(u.values().len() * nv);
    for &ux in u.values() {
        values.extend((0..nv).map(|k| chi_value(ux, vgrid.center(k))));
    }
    Ok(KineticField {
        grid: *u.grid(),
        vgrid: *vgrid,
        values,
    })
}

/// `χ(u, v_k^+) − χ(u, v_k^−)` across each cell's edges: `−1` on the cell
/// containing `u`, `+1` on the cell containing 0, both cancelling when
/// they coincide.
pub fn chi_edge_difference(u: f64, vgrid: &VGrid) -> Vec<i8> {
    (0..vgrid.n_v)
        .map(|k| {
            let lo = vgrid.lower_edge(k);
            chi_value(u, lo + vgrid.dv()) - chi_value(u, lo)
        })
        .collect()
}

/// Midpoint rule for `∫ f(x, v) φ(v) dv` at every node.
pub fn velocity_average(f: &KineticField, phi: impl Fn(f64) -> f64) -> Result<Field> {
    let vg = f.vgrid;
    let w: Vec<f64> = (0..vg.n_v).map(|k| phi(vg.center(k)) * vg.dv()).collect();
    let out = (0..f.grid.len())
        .map(|i| f.row(i).iter().zip(&w).map(|(&c, &wk)| c as f64 * wk).sum())
        .collect();
    Field::new(f.grid, out)
}
