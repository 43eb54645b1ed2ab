//! Dyadic block norms.

use serde::{Deserialize, Serialize};

use crate::dyadic::{lp_blocks, DyadicPartition};
use crate::error::{invalid, Error, Result};
use crate::fourier::odd_extension;
use crate::grid::{lp_norm_pow, Field};

/// `(j, ‖Δ_j u‖_p)` for `j = 0..=jmax`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovProfile {
    pub p: f64,
    pub entries: Vec<(usize, f64)>,
}

impl BesovProfile {
    pub fn jmax(&self) -> usize {
        self.entries.last().map(|e| e.0).unwrap_or(0)
    }

    pub fn norm(&self, j: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.0 == j).map(|e| e.1)
    }

    /// `Σ_j 2^{jsp} ‖Δ_j u‖_p^p`, the profile-based `B^s_{p,p}` norm to the `p`.
    pub fn besov_norm_pow(&self, s: f64) -> f64 {
        self.entries
            .iter()
            .map(|&(j, b)| 2f64.powf(j as f64 * s * self.p) * b.powf(self.p))
            .sum()
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return invalid(format!("integrability p must be >= 1, got {p}"));
    }
    Ok(())
}

fn block_norm(block: &Field, p: f64) -> f64 {
    if p.is_infinite() {
        block.max_abs()
    } else {
        (lp_norm_pow(block.values(), p) * block.grid().cell_volume()).powf(1.0 / p)
    }
}

/// `blocknorm_j = (Σ |Δ_j u|^p h^d)^{1/p}`; `p = ∞` takes the max.
pub fn besov_profile(u: &Field, p: f64, partition: &DyadicPartition) -> Result<BesovProfile> {
    check_p(p)?;
    if !u.grid().is_periodic() {
        return Err(Error::NotPeriodic);
    }
    let blocks = lp_blocks(u, partition)?;
    Ok(BesovProfile {
        p,
        entries: blocks
            .iter()
            .enumerate()
            .map(|(j, b)| (j, block_norm(b, p)))
            .collect(),
    })
}

/// Profile of a field of either boundary type; Dirichlet fields are seen
/// through their odd extension (and the partition fitted to that grid).
pub fn besov_profile_auto(u: &Field, p: f64) -> Result<BesovProfile> {
    if u.grid().is_periodic() {
        besov_profile(u, p, &DyadicPartition::for_grid(u.grid()))
    } else {
        let e = odd_extension(u)?;
        besov_profile(&e, p, &DyadicPartition::for_grid(e.grid()))
    }
}

/// Time-integrated profile `(Σ_k w_k ‖Δ_j u(t_k)‖_p^p)^{1/p}` for quadrature
/// weights `w_k` over snapshots.
pub fn time_integrated_profile(snapshots: &[Field], weights: &[f64], p: f64) -> Result<BesovProfile> {
    check_p(p)?;
    if p.is_infinite() {
        return invalid("time integration needs finite p");
    }
    if snapshots.is_empty() || snapshots.len() != weights.len() {
        return invalid("need one weight per snapshot");
    }
    let mut acc: Vec<f64> = Vec::new();
    for (u, &w) in snapshots.iter().zip(weights) {
        let prof = besov_profile_auto(u, p)?;
        if acc.is_empty() {
            acc = vec![0.0; prof.entries.len()];
        }
        for (a, &(_, b)) in acc.iter_mut().zip(&prof.entries) {
            *a += w * b.powf(p);
        }
    }
    Ok(BesovProfile {
        p,
        entries: acc.into_iter().enumerate().map(|(j, a)| (j, a.powf(1.0 / p))).collect(),
    })
}
