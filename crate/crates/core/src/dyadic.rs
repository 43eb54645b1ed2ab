//! Smooth dyadic (Littlewood–Paley) partitions over integer wave numbers.
//!
//! The cutoff `θ` equals 1 on `[0, 1]` and 0 on `[2, ∞)`; its transition is
//! built from the mollifier `ρ(t) = exp(-1/(1-t²))` as
//! `S(t) = ρ(t-1) / (ρ(t-1) + ρ(t))` on `[0, 1]`. Then
//!
//! * `φ₀ = θ`, supported in the ball of radius 2,
//! * `φ₁(r) = θ(r) − θ(2r)`, supported in `[1/2, 2]`,
//!
//! and `φ₀ + Σ_{j=1..J} φ₁(2^{-j}·) = θ(2^{-J}·)` telescopes to 1 on
//! `|k| ≤ 2^J`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{forward_values, inverse_values, wave_norm};
use crate::grid::{Field, Grid};

/// The standard compactly supported mollifier on `(-1, 1)` (unnormalised).
pub fn mollifier(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// C∞ step from 0 (at `t ≤ 0`) to 1 (at `t ≥ 1`).
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = mollifier(t - 1.0);
        a / (a + mollifier(t))
    }
}

/// Radial plateau: 1 for `r ≤ 1`, 0 for `r ≥ 2`.
pub fn plateau(r: f64) -> f64 {
    smooth_step(2.0 - r)
}

pub fn phi0(r: f64) -> f64 {
    plateau(r)
}

pub fn phi1(r: f64) -> f64 {
    plateau(r) - plateau(2.0 * r)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicPartition {
    jmax: usize,
}

impl DyadicPartition {
    pub fn jmax(&self) -> usize {
        self.jmax
    }

    /// Smallest partition whose blocks cover every wave number of `grid`.
    pub fn for_grid(grid: &Grid) -> Self {
        let kmax = grid.max_wave_norm();
        let jmax = kmax.log2().ceil().max(2.0) as usize;
        DyadicPartition { jmax }
    }

    /// Weight of block `j` at wave norm `r`.
    pub fn weight(&self, j: usize, r: f64) -> f64 {
        if j == 0 {
            phi0(r)
        } else {
            phi1(r / (1u64 << j) as f64)
        }
    }

    /// Sum of all block weights at `r` (1 whenever `r ≤ 2^jmax`).
    pub fn total(&self, r: f64) -> f64 {
        (0..=self.jmax).map(|j| self.weight(j, r)).sum()
    }

    /// Blocks whose weight can be nonzero at wave norm `r`.
    pub fn blocks_touching(&self, r: f64) -> Vec<usize> {
        (0..=self.jmax).filter(|&j| self.weight(j, r) != 0.0).collect()
    }

    fn covers(&self, grid: &Grid) -> bool {
        grid.max_wave_norm() <= (1u64 << self.jmax) as f64
    }
}

pub fn make_partition(jmax: usize) -> Result<DyadicPartition> {
    if jmax < 2 {
        return Err(Error::InvalidArgument(format!("jmax must be >= 2, got {jmax}")));
    }
    if jmax > 60 {
        return Err(Error::InvalidArgument(format!("jmax {jmax} is absurdly large")));
    }
    Ok(DyadicPartition { jmax })
}

/// The block `Δ_j u`.
pub fn lp_project(field: &Field, j: usize, partition: &DyadicPartition) -> Result<Field> {
    if j > partition.jmax {
        return Err(Error::BlockOutOfRange {
            j,
            jmax: partition.jmax,
        });
    }
    let grid = *field.grid();
    if !grid.is_periodic() {
        return Err(Error::NotPeriodic);
    }
    let spec = forward_values(&grid, field.values());
    project_spectrum(&grid, &spec, j, partition)
}

/// All blocks `Δ_0 u, …, Δ_jmax u` from a single forward transform.
///
/// When the partition does not reach the grid's highest wave numbers those
/// modes fall outside every block; `lp_blocks` then no longer sums to `u`.
pub fn lp_blocks(field: &Field, partition: &DyadicPartition) -> Result<Vec<Field>> {
    let grid = *field.grid();
    if !grid.is_periodic() {
        return Err(Error::NotPeriodic);
    }
    let spec = forward_values(&grid, field.values());
    (0..=partition.jmax)
        .map(|j| project_spectrum(&grid, &spec, j, partition))
        .collect()
}

/// Whether the sum of all blocks reproduces any field on `grid`.
pub fn partition_covers(partition: &DyadicPartition, grid: &Grid) -> bool {
    partition.covers(grid)
}

fn project_spectrum(
    grid: &Grid,
    spec: &[Complex64],
    j: usize,
    partition: &DyadicPartition,
) -> Result<Field> {
    let masked: Vec<Complex64> = spec
        .iter()
        .enumerate()
        .map(|(i, c)| c * partition.weight(j, wave_norm(grid, i)))
        .collect();
    Field::new(*grid, inverse_values(grid, &masked))
}
