//! Spatial white noise and its dyadic mollification.

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::dyadic::plateau;
use crate::error::{invalid, Result};
use crate::fourier::{forward_values, inverse_values, wave_norm};
use crate::grid::{Field, Grid};

/// The periodic grid on which noise for `grid` lives: `grid` itself when
/// periodic; for a Dirichlet interval the same nodes read periodically.
pub fn noise_grid(grid: &Grid) -> Result<Grid> {
    Grid::periodic(grid.dim(), grid.n(), grid.length())
}

/// Independent `N(0, 1/h)` values per node of [`noise_grid`]`(grid)`.
pub fn sample_white_noise(grid: &Grid, seed: u64) -> Result<Field> {
    if grid.dim() != 1 {
        return invalid("white noise is sampled in 1D only");
    }
    let g = noise_grid(grid)?;
    let sd = g.spacing().powf(-0.5);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let values = (0..g.len())
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sd * z
        })
        .collect();
    Field::new(g, values)
}

/// Keeps the Littlewood–Paley blocks `j` whose physical frequency
/// `2π 2^j / L` is at most `1/level`; block 0 always survives. `level = 0`
/// returns the input unchanged.
///
/// Since the blocks telescope, the kept sum is the single multiplier
/// `θ(|k| / 2^J)` with `J` the last kept block.
pub fn mollify_noise(noise: &Field, level: f64) -> Result<Field> {
    if !(level >= 0.0 && level.is_finite()) {
        return invalid(format!("mollification level must be >= 0, got {level}"));
    }
    if level == 0.0 {
        return Ok(noise.clone());
    }
    let g = *noise.grid();
    if !g.is_periodic() {
        return Err(crate::Error::NotPeriodic);
    }
    let base = 2.0 * std::f64::consts::PI / g.length();
    let mut top = 0i32;
    while base * 2f64.powi(top + 1) <= 1.0 / level && top < 60 {
        top += 1;
    }
    let scale = 2f64.powi(top);
    let mut spec = forward_values(&g, noise.values());
    for (i, c) in spec.iter_mut().enumerate() {
        *c *= plateau(wave_norm(&g, i) / scale);
    }
    Field::new(g, inverse_values(&g, &spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_field() {
        let g = Grid::dirichlet(128, 1.0).unwrap();
        let a = sample_white_noise(&g, 7).unwrap();
        let b = sample_white_noise(&g, 7).unwrap();
        let c = sample_white_noise(&g, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn coarse_level_keeps_only_block_zero() {
        let g = Grid::periodic(1, 256, 2.0).unwrap();
        let w = sample_white_noise(&g, 1).unwrap();
        let s = mollify_noise(&w, 1.0).unwrap();
        let spec = forward_values(&g, s.values());
        for (i, c) in spec.iter().enumerate() {
            if wave_norm(&g, i) >= 2.0 {
                assert!(c.norm() < 1e-9, "mode {i} survived");
            }
        }
        assert_eq!(mollify_noise(&w, 0.0).unwrap(), w);
    }
}
