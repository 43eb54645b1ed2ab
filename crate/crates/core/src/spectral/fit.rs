//! Critical-exponent estimation from block-norm decay.
//!
//! Convention: `s_hat := −slope` of the least-squares line through
//! `(j, log₂ ‖Δ_j u‖_p)` over the fit window. For a profile with a
//! `|x − x₀|^β` singularity the blocks decay like `2^{−j(β + 1/p)}`, so
//! `s_hat` estimates the critical exponent of `W^{s,p}` / `B^s_{p,∞}`.
//! Decay faster than half the resolved band is reported as capped.

use serde::{Deserialize, Serialize};

use super::besov::BesovProfile;
use crate::error::{Error, Result};

/// Inclusive range of block indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub lo: usize,
    pub hi: usize,
}

impl FitWindow {
    /// `[jmax/3, 2 jmax/3]`.
    pub fn default_for(jmax: usize) -> Self {
        FitWindow {
            lo: jmax / 3,
            hi: 2 * jmax / 3,
        }
    }

    pub fn len(&self) -> usize {
        self.hi + 1 - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub s_hat: f64,
    pub slope_stderr: f64,
    pub window: FitWindow,
    /// True when decay reached the cap (or hit round-off); `s_hat` is then a
    /// lower bound equal to `cap`.
    pub capped: bool,
    pub cap: f64,
}

/// Blocks below this fraction of the largest block are round-off.
const FLOOR: f64 = 1e-13;

pub fn critical_exponent_estimate(
    profile: &BesovProfile,
    window: Option<FitWindow>,
) -> Result<ExponentFit> {
    let jmax = profile.jmax();
    let window = window.unwrap_or_else(|| FitWindow::default_for(jmax));
    if window.is_empty() || window.len() < 4 {
        return Err(Error::DegenerateWindow(format!(
            "window [{}, {}] has fewer than 4 blocks",
            window.lo, window.hi
        )));
    }
    if window.hi > jmax {
        return Err(Error::DegenerateWindow(format!(
            "window [{}, {}] exceeds resolved band (jmax = {jmax})",
            window.lo, window.hi
        )));
    }
    let cap = 0.5 * jmax as f64;
    let peak = profile.entries.iter().fold(0.0f64, |a, e| a.max(e.1));
    if peak == 0.0 {
        return Err(Error::DegenerateWindow("profile vanishes identically".into()));
    }
    let pts: Vec<(f64, f64)> = profile
        .entries
        .iter()
        .filter(|e| e.0 >= window.lo && e.0 <= window.hi)
        .map(|e| (e.0 as f64, e.1))
        .collect();
    if pts.iter().any(|p| p.1 <= FLOOR * peak) {
        return Ok(ExponentFit {
            s_hat: cap,
            slope_stderr: 0.0,
            window,
            capped: true,
            cap,
        });
    }
    let (slope, stderr) = least_squares_slope(
        &pts.iter().map(|p| (p.0, p.1.log2())).collect::<Vec<_>>(),
    );
    let s = -slope;
    Ok(if s > cap {
        ExponentFit {
            s_hat: cap,
            slope_stderr: stderr,
            window,
            capped: true,
            cap,
        }
    } else {
        ExponentFit {
            s_hat: s,
            slope_stderr: stderr,
            window,
            capped: false,
            cap,
        }
    })
}

/// Ordinary least squares slope and its standard error.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> (f64, f64) {
    let (slope, _, stderr) = least_squares(pts);
    (slope, stderr)
}

/// `(slope, intercept, slope stderr)`.
pub fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum();
    let stderr = if pts.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, icpt, stderr)
}
