//! Explicit conservative stepping shared by all solvers.
//!
//! One step is
//!
//! ```text
//! u_i ← u_i + dt Σ_axes [ (Φ(u_{i+e}) − 2Φ(u_i) + Φ(u_{i−e})) / h²
//!                        − (F(u_i) − F(u_{i−e})) / h ]
//!           + dt S_i + dt V_i u_i
//! ```
//!
//! with `Φ(u) = u^{[m_a]} + εu` and the upwind flux for `F(u) = u^{[n_a]}`
//! (`F' ≥ 0`, so Engquist–Osher reduces to upwinding from the left). The
//! scheme is monotone when
//! `dt · (Σ_a 2Φ'_a(U)/h² + F'_a(U)/h + max|V|) ≤ 1`, `U = max|u|`; the CFL
//! rule enforces this with the safety factor, and additionally
//! `dt · max|V| ≤ 1/2`.

use super::forcing::ForceSampler;
use super::trajectory::{SchemeInfo, SchemeKind, Trajectory};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::nonlinear::signed_power;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Axis {
    pub m: f64,
    pub flux: Option<f64>,
}

pub(crate) struct Engine<'a> {
    pub grid: Grid,
    pub axes: Vec<Axis>,
    pub eps: f64,
    pub cfl: f64,
    pub potential: Option<&'a [f64]>,
}

/// When to record snapshots.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnapshotStride {
    /// Every `k` steps (plus the final state).
    Steps(usize),
    /// At multiples of the given time interval; steps are shortened to land
    /// on them exactly.
    Every(f64),
}

impl<'a> Engine<'a> {
    fn max_potential(&self) -> f64 {
        self.potential
            .map(|v| v.iter().fold(0.0f64, |a, x| a.max(x.abs())))
            .unwrap_or(0.0)
    }

    /// Largest admissible step for state amplitude `umax`; infinite when the
    /// operator is identically zero at this amplitude.
    pub fn stable_dt(&self, umax: f64, vmax: f64) -> f64 {
        let h = self.grid.spacing();
        let mut rate = 0.0;
        for a in &self.axes {
            let dphi = if umax == 0.0 { 0.0 } else { a.m * umax.powf(a.m - 1.0) } + self.eps;
            rate += 2.0 * dphi / (h * h);
            if let Some(n) = a.flux {
                let df = if umax == 0.0 { if n == 1.0 { 1.0 } else { 0.0 } } else { n * umax.powf(n - 1.0) };
                rate += df / h;
            }
        }
        let mut dt = if rate + vmax > 0.0 {
            self.cfl / (rate + vmax)
        } else {
            f64::INFINITY
        };
        if vmax > 0.0 {
            dt = dt.min(0.5 / vmax);
        }
        dt
    }

    /// CFL step for the current state, capped by `max_dt` and the forcing
    /// time scale, and shortened until it is also admissible for the
    /// amplitude the source can produce within the step.
    pub fn choose_dt(
        &self,
        umax: f64,
        vmax: f64,
        smax: f64,
        t_end: f64,
        max_dt: Option<f64>,
        time_scale: Option<f64>,
    ) -> f64 {
        let mut dt = self.stable_dt(umax, vmax);
        if !dt.is_finite() {
            dt = t_end / IDLE_STEPS;
        }
        if let Some(cap) = max_dt {
            dt = dt.min(cap);
        }
        if let Some(tau) = time_scale {
            dt = dt.min(tau / SOURCE_RESOLUTION);
        }
        while smax > 0.0 && dt > self.stable_dt(umax + dt * smax, vmax) {
            dt *= 0.5;
        }
        dt
    }

    pub fn step(&self, u: &[f64], s: Option<&[f64]>, dt: f64, out: &mut [f64], phi: &mut Vec<f64>) {
        let n = self.grid.n();
        let h = self.grid.spacing();
        let lam = dt / (h * h);
        let mu = dt / h;
        out.copy_from_slice(u);
        if self.grid.dim() == 1 {
            let a = self.axes[0];
            phi.clear();
            phi.extend(u.iter().map(|&v| signed_power(v, a.m) + self.eps * v));
            if self.grid.is_periodic() {
                for i in 0..n {
                    let l = if i == 0 { n - 1 } else { i - 1 };
                    let r = if i == n - 1 { 0 } else { i + 1 };
                    out[i] += lam * (phi[l] - 2.0 * phi[i] + phi[r]);
                }
                if let Some(nf) = a.flux {
                    for i in 0..n {
                        let l = if i == 0 { n - 1 } else { i - 1 };
                        out[i] -= mu * (signed_power(u[i], nf) - signed_power(u[l], nf));
                    }
                }
            } else {
                // node 0 is the wall, node n the (implicit) opposite wall
                for i in 1..n {
                    let r = if i == n - 1 { 0.0 } else { phi[i + 1] };
                    out[i] += lam * (phi[i - 1] - 2.0 * phi[i] + r);
                }
                out[0] = 0.0;
            }
        } else {
            for (ax, a) in self.axes.iter().enumerate() {
                phi.clear();
                phi.extend(u.iter().map(|&v| signed_power(v, a.m) + self.eps * v));
                for r in 0..n {
                    for c in 0..n {
                        let i = r * n + c;
                        let (im, ip) = if ax == 0 {
                            (((r + n - 1) % n) * n + c, ((r + 1) % n) * n + c)
                        } else {
                            (r * n + (c + n - 1) % n, r * n + (c + 1) % n)
                        };
                        out[i] += lam * (phi[im] - 2.0 * phi[i] + phi[ip]);
                        if let Some(nf) = a.flux {
                            out[i] -= mu * (signed_power(u[i], nf) - signed_power(u[im], nf));
                        }
                    }
                }
            }
        }
        if let Some(s) = s {
            for (o, sv) in out.iter_mut().zip(s) {
                *o += dt * sv;
            }
        }
        if let Some(v) = self.potential {
            for ((o, &ui), &vi) in out.iter_mut().zip(u).zip(v) {
                *o += dt * vi * ui;
            }
        }
        if !self.grid.is_periodic() {
            out[0] = 0.0;
        }
    }
}

/// `max|u|`, or `+∞` if any entry is not finite.
pub(crate) fn checked_max_abs(u: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for &v in u {
        if !v.is_finite() {
            return f64::INFINITY;
        }
        m = m.max(v.abs());
    }
    m
}

pub(crate) struct RunControl {
    pub t_end: f64,
    pub stride: SnapshotStride,
    pub max_dt: Option<f64>,
    pub blowup_cap: f64,
    pub kind: SchemeKind,
}

/// Fallback step when the operator vanishes (e.g. zero data with a source).
const IDLE_STEPS: f64 = 1000.0;

/// Minimum number of steps across the shortest forcing pulse.
const SOURCE_RESOLUTION: f64 = 50.0;

pub(crate) fn run(
    engine: &Engine,
    u0: &Field,
    force: &ForceSampler,
    ctl: &RunControl,
) -> Result<Trajectory> {
    let grid = engine.grid;
    let len = grid.len();
    let mut u = u0.values().to_vec();
    let mut next = vec![0.0; len];
    let mut s = vec![0.0; len];
    let mut phi = Vec::with_capacity(len);
    let vmax = engine.max_potential();

    let mut traj = Trajectory::new(
        grid,
        SchemeInfo {
            kind: ctl.kind,
            viscosity: engine.eps,
            cfl_safety: engine.cfl,
            steps: 0,
            dt_history: Vec::new(),
        },
    );
    traj.push(0.0, 0.0, u0.clone());

    let (step_every, interval) = match ctl.stride {
        SnapshotStride::Steps(k) => (k.max(1), f64::INFINITY),
        SnapshotStride::Every(dt) => (usize::MAX, dt),
    };
    let mut next_snap_idx = 1usize;
    let mut t = 0.0;
    let mut step = 0usize;
    let t_end = ctl.t_end;
    let tiny = 1e-12 * t_end;

    while t < t_end {
        let src = if force.is_zero() {
            None
        } else {
            force.fill(t, &mut s);
            Some(&s[..])
        };
        let smax = src.map_or(0.0, checked_max_abs);
        let umax = checked_max_abs(&u);
        let mut dt = engine.choose_dt(umax, vmax, smax, t_end, ctl.max_dt, force.time_scale());
        let mut t_new = t + dt;
        let mut snap = false;
        if interval.is_finite() {
            let ts = next_snap_idx as f64 * interval;
            if ts < t_end - tiny && t_new >= ts - tiny {
                t_new = ts;
                dt = ts - t;
                snap = true;
            }
        }
        let last = t_new >= t_end - tiny;
        if last {
            t_new = t_end;
            dt = t_end - t;
            snap = true;
        }

        engine.step(&u, src, dt, &mut next, &mut phi);
        std::mem::swap(&mut u, &mut next);
        step += 1;
        t = t_new;
        traj.scheme.dt_history.push(dt);

        let umax = checked_max_abs(&u);
        if umax > ctl.blowup_cap {
            return Err(Error::BlowUp {
                time: t,
                step,
                max_abs: umax,
                cap: ctl.blowup_cap,
            });
        }
        if snap || step % step_every == 0 {
            if interval.is_finite() && !last {
                next_snap_idx += 1;
            }
            traj.push(t, dt, Field::new(grid, u.clone())?);
        }
    }
    traj.scheme.steps = step;
    Ok(traj)
}
