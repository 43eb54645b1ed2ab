//! Distributional residual of the kinetic equation
//! `∂_t f − (m|v|^{m−1} + ε) Δf = ∂_v q + S δ_{v=u}` against a fixed
//! basket of tensor-product test functions `Ψ = a(t) b(x) c(v)`.
//!
//! Pairing with `Ψ` gives
//!
//! ```text
//! R = [∫∫ f Ψ]_0^T − ∫∫∫ f ∂_tΨ − ∫∫∫ f (m|v|^{m−1}+ε) ΔΨ + ∫∫∫ q ∂_vΨ − ∫∫ S Ψ(t,x,u)
//! ```
//!
//! which vanishes for the continuous equation. The basket is
//! `a ∈ {1, t/T}`, `b ∈ {cos kx, sin kx, cos 2kx}` with `k = 2π/L` (along the
//! diagonal in 2D), and `c` the unit mollifier bump centred at
//! `0.25 U` or `0.6 U` with radius `0.45 U`, `U = max|u|`.

use serde::{Deserialize, Serialize};

use super::dissipation::DissipationMeasure;
use crate::dyadic::mollifier;
use crate::error::{invalid, Result};
use crate::solvers::{Forcing, Trajectory};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `|R| / Σ|terms|` per test function, in basket order.
    pub relative: Vec<f64>,
    pub absolute: Vec<f64>,
    pub max_relative: f64,
}

struct VTable {
    lo: f64,
    dv: f64,
    /// `∫_0^v c`, `∫_0^v c·a(v)` on a fine lattice.
    c0: Vec<f64>,
    c1: Vec<f64>,
}

impl VTable {
    fn new(c: &dyn Fn(f64) -> f64, diff: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> VTable {
        let dv = (hi - lo) / n as f64;
        let mut c0 = vec![0.0; n + 1];
        let mut c1 = vec![0.0; n + 1];
        // Simpson on each lattice interval
        for i in 0..n {
            let a = lo + i as f64 * dv;
            let (m, b) = (a + 0.5 * dv, a + dv);
            let f0 = |v: f64| c(v);
            let f1 = |v: f64| c(v) * diff(v);
            c0[i + 1] = c0[i] + dv / 6.0 * (f0(a) + 4.0 * f0(m) + f0(b));
            c1[i + 1] = c1[i] + dv / 6.0 * (f1(a) + 4.0 * f1(m) + f1(b));
        }
        let mut t = VTable { lo, dv, c0, c1 };
        let (z0, z1) = (t.raw(0.0, 0), t.raw(0.0, 1));
        t.c0.iter_mut().for_each(|v| *v -= z0);
        t.c1.iter_mut().for_each(|v| *v -= z1);
        t
    }

    fn raw(&self, v: f64, which: usize) -> f64 {
        let tab = if which == 0 { &self.c0 } else { &self.c1 };
        let x = ((v - self.lo) / self.dv).clamp(0.0, (tab.len() - 1) as f64);
        let i = (x.floor() as usize).min(tab.len() - 2);
        let w = x - i as f64;
        tab[i] * (1.0 - w) + tab[i + 1] * w
    }

    /// `(∫ χ(u,v) c dv, ∫ χ(u,v) c a dv) = (C0(u) − C0(0), …)`.
    fn pair(&self, u: f64) -> (f64, f64) {
        (self.raw(u, 0), self.raw(u, 1))
    }
}

/// Number of test functions in the basket.
pub const BASKET_SIZE: usize = 12;

pub fn kinetic_residual(
    traj: &Trajectory,
    q: &DissipationMeasure,
    m: f64,
    eps: f64,
    force: &Forcing,
) -> Result<ResidualReport> {
    let grid = *traj.grid();
    if !grid.is_periodic() {
        return invalid("kinetic residual is implemented for periodic runs");
    }
    let umax = traj.max_abs();
    if umax == 0.0 {
        return Ok(ResidualReport {
            relative: vec![0.0; BASKET_SIZE],
            absolute: vec![0.0; BASKET_SIZE],
            max_relative: 0.0,
        });
    }
    let t_end = traj.t_end();
    let t0 = traj.times()[0];
    let span = t_end - t0;
    let weights = traj.trapezoid_weights();
    let dim = grid.dim();
    let k = 2.0 * std::f64::consts::PI / grid.length();
    let diff = move |v: f64| m * v.abs().powf(m - 1.0) + eps;
    let radius = 0.45 * umax;
    let forces: Vec<Vec<f64>> = if force.is_zero() {
        Vec::new()
    } else {
        traj.times()
            .iter()
            .map(|&t| force.eval(&grid, t).map(|f| f.into_values()))
            .collect::<Result<_>>()?
    };

    let mut absolute = Vec::with_capacity(BASKET_SIZE);
    let mut relative = Vec::with_capacity(BASKET_SIZE);
    for ai in 0..2 {
        let a = |t: f64| if ai == 0 { 1.0 } else { (t - t0) / span };
        let da = if ai == 0 { 0.0 } else { 1.0 / span };
        for bi in 0..3 {
            // b(x) = trig(freq · (x + y)); the five-point Laplacian maps it to
            // lap_factor · b exactly.
            let freq = if bi == 2 { 2.0 * k } else { k };
            let b = move |p: [f64; 2]| {
                let s = freq * (p[0] + if dim == 2 { p[1] } else { 0.0 });
                if bi == 1 { s.sin() } else { s.cos() }
            };
            let h = grid.spacing();
            let lap_factor = -(dim as f64) * 4.0 / (h * h) * (0.5 * freq * h).sin().powi(2);
            for &centre in &[0.25, 0.6] {
                let c0 = centre * umax;
                let c = move |v: f64| mollifier((v - c0) / radius);
                let table = VTable::new(&c, &diff, -umax * 1.01, umax * 1.01, 4000);

                let mut terms = [0.0f64; 5];
                let tx = |snap: &[f64]| -> (f64, f64) {
                    let mut p0 = 0.0;
                    let mut p1 = 0.0;
                    for (i, &u) in snap.iter().enumerate() {
                        let bx = b(grid.point(i));
                        let (f0, f1) = table.pair(u);
                        p0 += bx * f0;
                        p1 += bx * f1;
                    }
                    (p0 * grid.cell_volume(), p1 * grid.cell_volume())
                };
                let first = tx(traj.first().values());
                let last = tx(traj.last().values());
                terms[0] = a(t_end) * last.0 - a(t0) * first.0;
                for (kk, (snap, &w)) in traj.snapshots().iter().zip(&weights).enumerate() {
                    let t = traj.times()[kk];
                    let (p0, p1) = tx(snap.values());
                    terms[1] -= w * da * p0;
                    terms[2] -= w * a(t) * lap_factor * p1;
                    if !forces.is_empty() {
                        let s: f64 = forces[kk]
                            .iter()
                            .zip(snap.values())
                            .enumerate()
                            .map(|(i, (&sv, &u))| sv * b(grid.point(i)) * c(u))
                            .sum();
                        terms[4] -= w * a(t) * s * grid.cell_volume();
                    }
                }
                // cell average of c' over each velocity cell
                let vg = *q.vgrid();
                let dv = vg.dv();
                let dc: Vec<f64> = (0..vg.n_v())
                    .map(|j| (c(vg.lower_edge(j) + dv) - c(vg.lower_edge(j))) / dv)
                    .collect();
                for cell in q.cells() {
                    let t = q.times()[cell.snapshot as usize];
                    terms[3] += cell.weight() * a(t) * b(q.position(cell)) * dc[cell.cell as usize];
                }
                let r: f64 = terms.iter().sum();
                let scale: f64 = terms.iter().map(|x| x.abs()).sum();
                absolute.push(r.abs());
                relative.push(if scale > 0.0 { r.abs() / scale } else { 0.0 });
            }
        }
    }
    let max_relative = relative.iter().cloned().fold(0.0, f64::max);
    Ok(ResidualReport {
        relative,
        absolute,
        max_relative,
    })
}
