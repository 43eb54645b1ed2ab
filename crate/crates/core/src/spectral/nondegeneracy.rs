//! Non-degeneracy measure `ω(J; δ)` of a symbol and the companion bound on
//! `|∂_v 𝓛||v|^γ`, with power-law fits over `(J, δ)` grids.
//!
//! Both are suprema over a finite sample of `(τ, ξ)`:
//!
//! * `|ξ|` on a geometric grid over `[J/2, 2J]` (both signs in 1-D, evenly
//!   spaced directions in 2-D);
//! * `τ = 0`, `±` a geometric grid up to `τ_max = (2J)² max b + 2J max|a|`,
//!   and the cancellation values `τ = −a(v_k)·ξ` for scan points `v_k`.
//!
//! For each sample the set `{v ∈ I : |𝓛| ≤ δ}` is found by a uniform scan
//! (which always contains `v = 0`) with bisection on every sign change.

use serde::{Deserialize, Serialize};

use super::symbol::{symbol_dv, symbol_eval, SymbolDescriptor};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VInterval {
    pub lo: f64,
    pub hi: f64,
}

impl VInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return invalid(format!("velocity interval [{lo}, {hi}] is empty or unbounded"));
        }
        Ok(VInterval { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Uniform scan points over the interval.
    pub n_v: usize,
    /// Geometric `τ` samples per sign.
    pub n_tau: usize,
    /// Cancellation points `τ = −a(v_k)·ξ`.
    pub n_cancel: usize,
    pub n_radii: usize,
    /// Directions on the unit circle (2-D only).
    pub n_angles: usize,
    pub bisection_steps: usize,
    /// Puncture radius around `v = 0` for the `∂_v` bound, relative to `|I|`.
    pub puncture: f64,
    /// Evaluation points inside each set component for the `∂_v` bound.
    pub n_interior: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            n_v: 401,
            n_tau: 12,
            n_cancel: 16,
            n_radii: 5,
            n_angles: 8,
            bisection_steps: 60,
            puncture: 1e-6,
            n_interior: 32,
        }
    }
}

fn check(desc: &SymbolDescriptor, j: f64, delta: f64, opts: &ScanOptions) -> Result<()> {
    desc.validate()?;
    if !(j > 0.0 && j.is_finite()) {
        return invalid(format!("frequency J must be positive, got {j}"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return invalid(format!("delta must be positive, got {delta}"));
    }
    if opts.n_v < 3 || opts.n_radii < 1 || opts.n_angles < 1 {
        return invalid("scan resolution too small");
    }
    Ok(())
}

fn scan_points(iv: &VInterval, n: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..n)
        .map(|i| iv.lo + iv.len() * i as f64 / (n - 1) as f64)
        .collect();
    if iv.lo < 0.0 && iv.hi > 0.0 && !pts.contains(&0.0) {
        pts.push(0.0);
        pts.sort_by(|a, b| a.total_cmp(b));
    }
    pts
}

/// Components of `{v ∈ I : |𝓛(iτ, iξ, v)| ≤ δ}` seen by the scan.
pub fn omega_set(
    desc: &SymbolDescriptor,
    tau: f64,
    xi: &[f64],
    delta: f64,
    iv: &VInterval,
    opts: &ScanOptions,
) -> Vec<(f64, f64)> {
    let g = |v: f64| symbol_eval(desc, tau, xi, v).norm() <= delta;
    let pts = scan_points(iv, opts.n_v);
    let inside: Vec<bool> = pts.iter().map(|&v| g(v)).collect();
    let edge = |mut a: f64, mut b: f64| {
        // a outside or inside, b the opposite; returns the crossing
        let ga = g(a);
        for _ in 0..opts.bisection_steps {
            let mid = 0.5 * (a + b);
            if g(mid) == ga {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };
    let mut out = Vec::new();
    let last = pts.len() - 1;
    let mut start = 0.0;
    for i in 0..pts.len() {
        if !inside[i] {
            continue;
        }
        if i == 0 || !inside[i - 1] {
            start = if i == 0 { pts[0] } else { edge(pts[i - 1], pts[i]) };
        }
        if i == last || !inside[i + 1] {
            let end = if i == last { pts[last] } else { edge(pts[i], pts[i + 1]) };
            out.push((start, end));
        }
    }
    out
}

/// `|Ω(τ, ξ; δ)|` for one `(τ, ξ)`.
pub fn omega_slice(
    desc: &SymbolDescriptor,
    tau: f64,
    xi: &[f64],
    delta: f64,
    iv: &VInterval,
    opts: &ScanOptions,
) -> f64 {
    omega_set(desc, tau, xi, delta, iv, opts)
        .iter()
        .map(|(a, b)| b - a)
        .sum()
}

/// The sampled `(τ, ξ)` pairs at frequency scale `J`.
fn samples(desc: &SymbolDescriptor, j: f64, iv: &VInterval, opts: &ScanOptions) -> Vec<(f64, [f64; 2])> {
    let radii: Vec<f64> = (0..opts.n_radii)
        .map(|i| {
            if opts.n_radii == 1 {
                j
            } else {
                0.5 * j * 4f64.powf(i as f64 / (opts.n_radii - 1) as f64)
            }
        })
        .collect();
    let mut dirs: Vec<[f64; 2]> = Vec::new();
    if desc.dim() == 1 {
        dirs.push([1.0, 0.0]);
        dirs.push([-1.0, 0.0]);
    } else {
        for k in 0..opts.n_angles {
            let th = 2.0 * std::f64::consts::PI * k as f64 / opts.n_angles as f64;
            dirs.push([th.cos(), th.sin()]);
        }
    }
    let tau_max = (2.0 * j).powi(2) * desc.max_diffusion(iv.lo, iv.hi) + 2.0 * j * desc.max_flux(iv.lo, iv.hi);
    let has_flux = desc.max_flux(iv.lo, iv.hi) > 0.0;
    let pts = scan_points(iv, opts.n_v);
    let cancel_stride = (pts.len() / opts.n_cancel.max(1)).max(1);
    let mut out = Vec::new();
    for r in &radii {
        for d in &dirs {
            let xi = [r * d[0], r * d[1]];
            out.push((0.0, xi));
            if tau_max > 0.0 {
                for i in 0..opts.n_tau {
                    let t = tau_max * 10f64.powf(-3.0 * (1.0 - i as f64 / (opts.n_tau.max(2) - 1) as f64));
                    out.push((t, xi));
                    out.push((-t, xi));
                }
            }
            if has_flux {
                for &v in pts.iter().step_by(cancel_stride) {
                    let a = desc.flux(v);
                    out.push((-(a[0] * xi[0] + a[1] * xi[1]), xi));
                }
            }
        }
    }
    out
}

/// `ω(J; δ) = sup_{τ, |ξ| ∈ [J/2, 2J]} |Ω(τ, ξ; δ)|`.
pub fn nondegeneracy_measure(
    desc: &SymbolDescriptor,
    j: f64,
    delta: f64,
    iv: &VInterval,
    opts: &ScanOptions,
) -> Result<f64> {
    check(desc, j, delta, opts)?;
    Ok(samples(desc, j, iv, opts)
        .iter()
        .map(|(t, xi)| omega_slice(desc, *t, xi, delta, iv, opts))
        .fold(0.0, f64::max))
}

/// `sup_{τ, |ξ| ∈ [J/2, 2J]} sup_{v ∈ Ω \ puncture} |∂_v 𝓛| |v|^γ`.
pub fn dv_symbol_bound(
    desc: &SymbolDescriptor,
    j: f64,
    delta: f64,
    gamma: f64,
    iv: &VInterval,
    opts: &ScanOptions,
) -> Result<f64> {
    check(desc, j, delta, opts)?;
    if !(gamma >= 0.0) {
        return invalid("gamma must be >= 0");
    }
    let rho = opts.puncture * iv.len();
    let h = |xi: &[f64], v: f64| symbol_dv(desc, xi, v).norm() * v.abs().powf(gamma);
    let mut best: f64 = 0.0;
    for (t, xi) in samples(desc, j, iv, opts) {
        for (a, b) in omega_set(desc, t, &xi, delta, iv, opts) {
            let mut pieces = Vec::with_capacity(2);
            if a < -rho {
                pieces.push((a, b.min(-rho)));
            }
            if b > rho {
                pieces.push((a.max(rho), b));
            }
            for (lo, hi) in pieces {
                if hi < lo {
                    continue;
                }
                let k = opts.n_interior + 1;
                for i in 0..=k {
                    let v = lo + (hi - lo) * i as f64 / k as f64;
                    best = best.max(h(&xi, v));
                }
            }
        }
    }
    Ok(best)
}

/// `log y ≈ e_δ log δ + e_J log J + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub delta_exp: f64,
    pub j_exp: f64,
    pub log_const: f64,
    /// Root-mean-square residual in `ln`.
    pub rms: f64,
}

/// Least-squares fit over samples `(δ, J, y)` with `y > 0`.
pub fn fit_power_law(samples: &[(f64, f64, f64)]) -> Result<PowerLawFit> {
    if samples.len() < 4 || samples.iter().any(|s| !(s.2 > 0.0)) {
        return invalid("power-law fit needs at least 4 positive samples");
    }
    let rows: Vec<[f64; 3]> = samples.iter().map(|s| [s.0.ln(), s.1.ln(), 1.0]).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.2.ln()).collect();
    let mut a = [[0.0f64; 3]; 3];
    let mut r = [0.0f64; 3];
    for (row, y) in rows.iter().zip(&ys) {
        for i in 0..3 {
            r[i] += row[i] * y;
            for k in 0..3 {
                a[i][k] += row[i] * row[k];
            }
        }
    }
    let x = solve3(a, r).ok_or_else(|| {
        crate::error::Error::InvalidArgument("power-law fit is degenerate (need varied δ and J)".into())
    })?;
    let ss: f64 = rows
        .iter()
        .zip(&ys)
        .map(|(row, y)| (y - (x[0] * row[0] + x[1] * row[1] + x[2])).powi(2))
        .sum();
    Ok(PowerLawFit {
        delta_exp: x[0],
        j_exp: x[1],
        log_const: x[2],
        rms: (ss / rows.len() as f64).sqrt(),
    })
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &k| a[i][c].abs().total_cmp(&a[k][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..3 {
            let f = a[r][c] / a[c][c];
            for k in c..3 {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for c in (0..3).rev() {
        let s: f64 = (c + 1..3).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyRow {
    pub j: f64,
    pub delta: f64,
    pub omega: f64,
    pub dv_bound: f64,
}

/// Fitted exponents of `ω ≲ (δ/J^β)^α` and `sup|∂_v𝓛||v|^γ ≲ J^λ δ^μ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyFit {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub mu: f64,
    pub gamma: f64,
    pub rows: Vec<NondegeneracyRow>,
}

pub fn nondegeneracy_fit(
    desc: &SymbolDescriptor,
    js: &[f64],
    deltas: &[f64],
    gamma: f64,
    iv: &VInterval,
    opts: &ScanOptions,
) -> Result<NondegeneracyFit> {
    let mut rows = Vec::new();
    for &j in js {
        for &d in deltas {
            rows.push(NondegeneracyRow {
                j,
                delta: d,
                omega: nondegeneracy_measure(desc, j, d, iv, opts)?,
                dv_bound: dv_symbol_bound(desc, j, d, gamma, iv, opts)?,
            });
        }
    }
    let om = fit_power_law(&rows.iter().map(|r| (r.delta, r.j, r.omega)).collect::<Vec<_>>())?;
    let dv = fit_power_law(&rows.iter().map(|r| (r.delta, r.j, r.dv_bound)).collect::<Vec<_>>())?;
    Ok(NondegeneracyFit {
        alpha: om.delta_exp,
        beta: -om.j_exp / om.delta_exp,
        lambda: dv.j_exp,
        mu: dv.delta_exp,
        gamma,
        rows,
    })
}
