//! Symbol cutoffs `ψ(𝓛(∂_t, ∇_x, v)/(δ2^k))` as space-time Fourier
//! multipliers and the micro-local split of kinetic data.
//!
//! Data live on a periodic space-time grid: `nt` times over one period and
//! a 1-D periodic spatial grid, one real slice per velocity. Trajectories
//! are made periodic in time by a C∞ window vanishing at both ends.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::besov::{time_integrated_profile, BesovProfile};
use super::symbol::{symbol_eval, SymbolDescriptor};
use crate::dyadic::{make_partition, phi0, phi1, smooth_step};
use crate::error::{invalid, Error, Result};
use crate::fourier::{fft2, wave_index};
use crate::grid::{Field, Grid};
use crate::kinetic::{chi_value, VGrid};
use crate::solvers::Trajectory;

/// Real data `f(t_k, x_i, v_l)`; `data[l][k * n + i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeSlices {
    pub grid: Grid,
    pub nt: usize,
    pub period: f64,
    pub v: Vec<f64>,
    pub data: Vec<Vec<f64>>,
}

impl SpaceTimeSlices {
    pub fn new(grid: Grid, nt: usize, period: f64, v: Vec<f64>, data: Vec<Vec<f64>>) -> Result<Self> {
        if grid.dim() != 1 || !grid.is_periodic() {
            return invalid("space-time slices need a periodic 1-D spatial grid");
        }
        if nt < 2 || !(period > 0.0) {
            return invalid("need nt >= 2 and a positive period");
        }
        if v.len() != data.len() || data.iter().any(|d| d.len() != nt * grid.len()) {
            return Err(Error::GridMismatch("slice sizes do not match nt x n".into()));
        }
        Ok(SpaceTimeSlices {
            grid,
            nt,
            period,
            v,
            data,
        })
    }

    pub fn zeros_like(&self) -> Self {
        SpaceTimeSlices {
            data: vec![vec![0.0; self.data[0].len()]; self.v.len()],
            ..self.clone()
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    /// `max |self − other|`.
    pub fn max_diff(&self, other: &SpaceTimeSlices) -> f64 {
        self.data
            .iter()
            .flatten()
            .zip(other.data.iter().flatten())
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
    }

    /// `∫ f dv` (midpoint weights `dv_l`) at each time.
    pub fn velocity_average(&self, dv: &[f64]) -> Result<Vec<Field>> {
        let n = self.grid.len();
        (0..self.nt)
            .map(|k| {
                let mut acc = vec![0.0; n];
                for (slice, w) in self.data.iter().zip(dv) {
                    for (a, x) in acc.iter_mut().zip(&slice[k * n..(k + 1) * n]) {
                        *a += w * x;
                    }
                }
                Field::new(self.grid, acc)
            })
            .collect()
    }
}

/// `smooth_step(4s) · smooth_step(4(1 − s))` for `s = (t − t0)/T`: C∞,
/// zero at both ends, one on the middle half.
pub fn time_window(s: f64) -> f64 {
    smooth_step(4.0 * s) * smooth_step(4.0 * (1.0 - s))
}

/// Windowed `χ(u(t_k, x), v_l)` at `nt` equally spaced snapshot times
/// `t0 + kT/nt`, `k < nt`; velocity slices at the cell centres of `vg`.
pub fn kinetic_space_time(traj: &Trajectory, vg: &VGrid, nt: usize) -> Result<SpaceTimeSlices> {
    let grid = *traj.grid();
    let t0 = traj.times()[0];
    let span = traj.t_end() - t0;
    if traj.len() < nt + 1 {
        return invalid(format!("need {} snapshots, trajectory has {}", nt + 1, traj.len()));
    }
    let stride = (traj.len() - 1) / nt;
    if stride * nt != traj.len() - 1 {
        return invalid("snapshot count must be a multiple of nt plus one");
    }
    let dt = span / nt as f64;
    let n = grid.len();
    let v: Vec<f64> = (0..vg.n_v()).map(|l| vg.center(l)).collect();
    let mut data = vec![vec![0.0; nt * n]; v.len()];
    for k in 0..nt {
        let idx = k * stride;
        let t = traj.times()[idx];
        if (t - (t0 + k as f64 * dt)).abs() > 1e-9 * span {
            return invalid("snapshots are not equally spaced");
        }
        let w = time_window((t - t0) / span);
        let u = traj.snapshots()[idx].values();
        for (l, &vl) in v.iter().enumerate() {
            for i in 0..n {
                data[l][k * n + i] = w * f64::from(chi_value(u[i], vl));
            }
        }
    }
    SpaceTimeSlices::new(grid, nt, span, v, data)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cutoff {
    /// `ψ₀(|z|)`, one on the unit ball.
    Ball,
    /// `ψ₁(|z|)`, supported in `1/2 ≤ |z| ≤ 2`.
    Annulus,
    /// `ψ₀(|z|)/z`.
    DividedBall,
    /// `ψ₁(|z|)/z`.
    DividedAnnulus,
}

impl Cutoff {
    /// Multiplier at `z`; `None` where the divided forms hit `z = 0`.
    fn eval(self, z: Complex64) -> Option<Complex64> {
        let r = z.norm();
        match self {
            Cutoff::Ball => Some(phi0(r).into()),
            Cutoff::Annulus => Some(phi1(r).into()),
            Cutoff::DividedBall | Cutoff::DividedAnnulus => {
                let psi = if self == Cutoff::DividedBall { phi0(r) } else { phi1(r) };
                if psi == 0.0 {
                    Some(Complex64::new(0.0, 0.0))
                } else if r == 0.0 {
                    None
                } else {
                    Some(psi / z)
                }
            }
        }
    }
}

/// Physical frequencies `(τ, ξ)` of FFT slot `(kt, kx)`.
fn frequencies(s: &SpaceTimeSlices) -> (Vec<f64>, Vec<f64>) {
    let n = s.grid.n();
    let tp = 2.0 * std::f64::consts::PI;
    let taus = (0..s.nt).map(|k| tp * wave_index(k, s.nt) as f64 / s.period).collect();
    let xis = (0..n).map(|k| tp * wave_index(k, n) as f64 / s.grid.length()).collect();
    (taus, xis)
}

/// Applies the multipliers `ms[i](z)`, `z = 𝓛(iτ, iξ, v)/scale`, to every
/// slice and returns one output per multiplier plus the number of
/// skipped frequency cells.
fn apply_multipliers(
    input: &SpaceTimeSlices,
    desc: &SymbolDescriptor,
    scale: f64,
    ms: &[&dyn Fn(Complex64) -> Option<Complex64>],
) -> Result<(Vec<SpaceTimeSlices>, usize)> {
    if desc.dim() != 1 {
        return invalid("space-time multipliers are implemented for 1-D symbols");
    }
    let (taus, xis) = frequencies(input);
    let n = input.grid.n();
    let nt = input.nt;
    let norm = 1.0 / (n * nt) as f64;
    let mut outs: Vec<SpaceTimeSlices> = ms.iter().map(|_| input.zeros_like()).collect();
    let mut skipped = 0;
    for (l, slice) in input.data.iter().enumerate() {
        let v = input.v[l];
        let mut spec: Vec<Complex64> = slice.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft2(&mut spec, nt, n, false);
        for (mi, m) in ms.iter().enumerate() {
            let mut work = spec.clone();
            for kt in 0..nt {
                for kx in 0..n {
                    let z = symbol_eval(desc, taus[kt], &[xis[kx]], v) / scale;
                    let c = &mut work[kt * n + kx];
                    match m(z) {
                        Some(w) => *c *= w,
                        None => {
                            *c = Complex64::new(0.0, 0.0);
                            skipped += 1;
                        }
                    }
                }
            }
            fft2(&mut work, nt, n, true);
            outs[mi].data[l] = work.iter().map(|c| c.re * norm).collect();
        }
    }
    Ok((outs, skipped))
}

fn check_scale(delta: f64) -> Result<()> {
    if !(delta > 0.0) {
        return invalid(format!("threshold delta must be positive, got {delta}"));
    }
    Ok(())
}

/// `ψ(𝓛/(δ2^k))` applied slice by slice. The second output counts the
/// frequency cells a divided cutoff skipped because `𝓛 = 0` there.
pub fn truncation_multiplier(
    data: &SpaceTimeSlices,
    desc: &SymbolDescriptor,
    cutoff: Cutoff,
    delta: f64,
    k: u32,
) -> Result<(SpaceTimeSlices, usize)> {
    desc.validate()?;
    check_scale(delta)?;
    let m = move |z: Complex64| cutoff.eval(z);
    let (mut outs, skipped) = apply_multipliers(data, desc, delta * 2f64.powi(k as i32), &[&m])?;
    Ok((outs.remove(0), skipped))
}

#[derive(Clone, Debug)]
pub struct MicrolocalDecomposition {
    pub delta: f64,
    /// `ψ₀(𝓛/δ) f`.
    pub f0: SpaceTimeSlices,
    /// `ψ₁(𝓛/(δ2^k)) f`, `k = 1..=kmax`.
    pub shells: Vec<SpaceTimeSlices>,
    /// `(1 − ψ₀(𝓛/(δ2^kmax))) f`.
    pub tail: SpaceTimeSlices,
    /// `max |f − f⁰ − Σ shells − tail|`.
    pub reconstruction_error: f64,
    /// `max|tail| / max|f|`.
    pub tail_fraction: f64,
    /// Set when the tail carries more than half of `max|f|`.
    pub tail_dominates: bool,
    /// Time-integrated `L²` block profiles of `∫ piece dv`: `f⁰`, then the
    /// shells, then the tail.
    pub profiles: Vec<BesovProfile>,
}

/// Threshold for [`MicrolocalDecomposition::tail_dominates`].
const TAIL_FLAG: f64 = 0.5;

/// `f = f⁰ + Σ_{k ≤ kmax} shell_k + tail` on the Fourier side, using the
/// dyadic partition on `|𝓛|/δ`. `dv` are the velocity weights for the
/// per-piece velocity averages.
pub fn microlocal_decompose(
    f: &SpaceTimeSlices,
    desc: &SymbolDescriptor,
    delta: f64,
    kmax: usize,
    dv: &[f64],
) -> Result<MicrolocalDecomposition> {
    desc.validate()?;
    check_scale(delta)?;
    if dv.len() != f.v.len() {
        return invalid("one velocity weight per slice required");
    }
    let part = make_partition(kmax.max(2))?;
    let mut ms: Vec<Box<dyn Fn(Complex64) -> Option<Complex64>>> = Vec::new();
    for k in 0..=kmax {
        ms.push(Box::new(move |z: Complex64| Some(part.weight(k, z.norm()).into())));
    }
    let top = 2f64.powi(kmax as i32);
    ms.push(Box::new(move |z: Complex64| Some((1.0 - phi0(z.norm() / top)).into())));
    let refs: Vec<&dyn Fn(Complex64) -> Option<Complex64>> = ms.iter().map(|b| b.as_ref()).collect();
    let (mut pieces, _) = apply_multipliers(f, desc, delta, &refs)?;
    let tail = pieces.pop().expect("tail piece");
    let f0 = pieces.remove(0);
    let shells = pieces;

    let mut sum = f0.clone();
    for p in shells.iter().chain(std::iter::once(&tail)) {
        for (a, b) in sum.data.iter_mut().zip(&p.data) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }
    let reconstruction_error = sum.max_diff(f);
    let fmax = f.max_abs();
    let tail_fraction = if fmax > 0.0 { tail.max_abs() / fmax } else { 0.0 };

    let w = vec![f.period / f.nt as f64; f.nt];
    let mut profiles = Vec::new();
    for p in std::iter::once(&f0).chain(&shells).chain(std::iter::once(&tail)) {
        profiles.push(time_integrated_profile(&p.velocity_average(dv)?, &w, 2.0)?);
    }
    Ok(MicrolocalDecomposition {
        delta,
        f0,
        shells,
        tail,
        reconstruction_error,
        tail_fraction,
        tail_dominates: tail_fraction > TAIL_FLAG,
        profiles,
    })
}
