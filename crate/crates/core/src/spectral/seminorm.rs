//! Increment-based fractional seminorms.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::{Boundary, Field};
use crate::solvers::Trajectory;

fn check(s: f64, p: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return invalid(format!("smoothness s must lie in (0,1), got {s}"));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return invalid(format!("integrability p must be finite and >= 1, got {p}"));
    }
    Ok(())
}

/// Largest number of sample points per axis used by the 2-D double sum.
const SUBSAMPLE_2D: usize = 64;

/// `∬ |u(x) − u(y)|^p / |x − y|^{d+sp} dx dy` over the periodic box
/// (minimum-image distance, diagonal excluded), i.e. the Slobodeckij
/// seminorm to the power `p`.
///
/// 2-D fields are subsampled to at most 64 points per axis first.
pub fn slobodeckij_seminorm(u: &Field, s: f64, p: f64) -> Result<f64> {
    check(s, p)?;
    let g = u.grid();
    if !g.is_periodic() {
        return Err(Error::NotPeriodic);
    }
    let n = g.n();
    let v = u.values();
    if g.dim() == 1 {
        let h = g.spacing();
        let mut total = 0.0;
        for k in 1..n {
            let d = k.min(n - k) as f64 * h;
            let inc: f64 = (0..n).map(|i| (v[(i + k) % n] - v[i]).abs().powf(p)).sum();
            total += inc / d.powf(1.0 + s * p);
        }
        return Ok(total * h * h);
    }
    let stride = (n / SUBSAMPLE_2D).max(1);
    let nc = n / stride;
    let h = g.spacing() * stride as f64;
    let c: Vec<f64> = (0..nc * nc)
        .map(|i| v[(i / nc) * stride * n + (i % nc) * stride])
        .collect();
    let mut total = 0.0;
    for k1 in 0..nc {
        for k2 in 0..nc {
            if k1 == 0 && k2 == 0 {
                continue;
            }
            let d1 = k1.min(nc - k1) as f64 * h;
            let d2 = k2.min(nc - k2) as f64 * h;
            let d = d1.hypot(d2);
            let mut inc = 0.0;
            for r in 0..nc {
                for q in 0..nc {
                    let a = c[r * nc + q];
                    let b = c[((r + k1) % nc) * nc + (q + k2) % nc];
                    inc += (b - a).abs().powf(p);
                }
            }
            total += inc / d.powf(2.0 + s * p);
        }
    }
    Ok(total * h.powi(4))
}

/// Value and maximising shift of the Nikolskii seminorm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NikolskiiValue {
    /// `sup_z ‖u(·+z) − u‖_p^p / |z|^{sp}`.
    pub value: f64,
    /// The shift `z > 0` attaining it (0 for identically constant data).
    pub shift: f64,
}

/// `sup_z ‖u(·+z) − u‖_p^p / |z|^{sp}` over all grid shifts of a 1-D field.
///
/// Periodic fields shift cyclically (`z = kh`, `1 ≤ k ≤ n/2`); Dirichlet
/// fields are extended by zero outside the interval (`1 ≤ k ≤ n`).
pub fn nikolskii_seminorm(u: &Field, s: f64, p: f64) -> Result<NikolskiiValue> {
    check(s, p)?;
    let g = u.grid();
    if g.dim() != 1 {
        return invalid("nikolskii seminorm is implemented in 1-D");
    }
    let n = g.n();
    let h = g.spacing();
    let v = u.values();
    let mut best = NikolskiiValue { value: 0.0, shift: 0.0 };
    let kmax = match g.boundary() {
        Boundary::Periodic => n / 2,
        Boundary::DirichletZero => n,
    };
    let ext = |i: isize| -> f64 {
        if i >= 0 && (i as usize) < n {
            v[i as usize]
        } else {
            0.0
        }
    };
    for k in 1..=kmax {
        let inc: f64 = match g.boundary() {
            Boundary::Periodic => (0..n).map(|i| (v[(i + k) % n] - v[i]).abs().powf(p)).sum(),
            Boundary::DirichletZero => {
                let k = k as isize;
                (-k..n as isize).map(|i| (ext(i + k) - ext(i)).abs().powf(p)).sum()
            }
        };
        let z = k as f64 * h;
        let val = inc * h / z.powf(s * p);
        if val > best.value {
            best = NikolskiiValue { value: val, shift: z };
        }
    }
    Ok(best)
}

/// `Σ_k w_k |u(t_k)|_{N^{s,p}}^p` with trapezoid weights over snapshots.
pub fn nikolskii_time_integral(traj: &Trajectory, s: f64, p: f64) -> Result<f64> {
    let w = traj.trapezoid_weights();
    let mut acc = 0.0;
    for (snap, wk) in traj.snapshots().iter().zip(w) {
        acc += wk * nikolskii_seminorm(snap, s, p)?.value;
    }
    Ok(acc)
}
