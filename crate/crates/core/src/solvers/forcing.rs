//! Source terms `S(t, x)`.

use serde::{Deserialize, Serialize};

use crate::dyadic::mollifier;
use crate::error::{invalid, Result};
use crate::grid::{Field, Grid};

/// `∫_{-1}^{1} exp(-1/(1-t²)) dt`.
const MOLLIFIER_MASS: f64 = 0.443_993_816_168_079_5;

/// One space-time spike: a normalised Gaussian in space of width `width`
/// times a smooth unit-mass bump in time on `[t_on, t_on + duration]`.
/// Its L¹ mass is `|mass|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spike {
    pub center: [f64; 2],
    pub width: f64,
    pub mass: f64,
    pub t_on: f64,
    pub duration: f64,
}

impl Spike {
    fn temporal(&self, t: f64) -> f64 {
        let half = 0.5 * self.duration;
        let s = (t - self.t_on - half) / half;
        mollifier(s) / (MOLLIFIER_MASS * half)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpikeTrain {
    pub spikes: Vec<Spike>,
}

impl SpikeTrain {
    /// `count` spikes at deterministic pseudo-random positions and times
    /// drawn from `seed`, all with the given width, duration and mass.
    pub fn random(
        grid: &Grid,
        count: usize,
        width: f64,
        duration: f64,
        mass: f64,
        t_end: f64,
        seed: u64,
    ) -> Result<SpikeTrain> {
        use rand::{Rng, SeedableRng};
        if !(width > 0.0 && duration > 0.0 && duration <= t_end) {
            return invalid("spike width and duration must be positive, duration <= t_end");
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let l = grid.length();
        let spikes = (0..count)
            .map(|_| {
                let cx = rng.gen_range(-0.3..0.3) * l;
                let cy = if grid.dim() == 2 { rng.gen_range(-0.3..0.3) * l } else { 0.0 };
                Spike {
                    center: [cx, cy],
                    width,
                    mass,
                    t_on: rng.gen_range(0.0..(t_end - duration).max(f64::MIN_POSITIVE)),
                    duration,
                }
            })
            .collect();
        Ok(SpikeTrain { spikes })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Forcing {
    Zero,
    /// Time-independent source.
    Steady(Field),
    Spikes(SpikeTrain),
}

impl Forcing {
    pub fn is_zero(&self) -> bool {
        matches!(self, Forcing::Zero)
    }

    pub(crate) fn sampler(&self, grid: &Grid) -> Result<ForceSampler> {
        Ok(match self {
            Forcing::Zero => ForceSampler::Zero,
            Forcing::Steady(f) => {
                grid.ensure_same(f.grid(), "steady force")?;
                ForceSampler::Steady(f.values().to_vec())
            }
            Forcing::Spikes(train) => {
                let mut profiles = Vec::with_capacity(train.spikes.len());
                for s in &train.spikes {
                    profiles.push((*s, spike_profile(grid, s)));
                }
                ForceSampler::Spikes(profiles)
            }
        })
    }

    /// `S(t, ·)` sampled on `grid`.
    pub fn eval(&self, grid: &Grid, t: f64) -> Result<Field> {
        let mut out = vec![0.0; grid.len()];
        self.sampler(grid)?.fill(t, &mut out);
        Field::new(*grid, out)
    }

    /// `∫_0^T Σ |S|^p h^d dt` by the composite midpoint rule on `samples`
    /// intervals.
    pub fn spacetime_norm_pow(&self, grid: &Grid, t_end: f64, p: f64, samples: usize) -> Result<f64> {
        let sampler = self.sampler(grid)?;
        if let ForceSampler::Zero = sampler {
            return Ok(0.0);
        }
        let mut buf = vec![0.0; grid.len()];
        let dt = t_end / samples as f64;
        let mut acc = 0.0;
        for k in 0..samples {
            sampler.fill((k as f64 + 0.5) * dt, &mut buf);
            acc += crate::grid::lp_norm_pow(&buf, p) * dt;
        }
        Ok(acc * grid.cell_volume())
    }
}

/// Sparse spatial profile of a spike: `(node, weight)` pairs.
fn spike_profile(grid: &Grid, s: &Spike) -> Vec<(usize, f64)> {
    let d = grid.dim() as i32;
    let l = grid.length();
    let norm = (2.0 * std::f64::consts::PI * s.width * s.width).powf(0.5 * d as f64);
    let reach = 8.0 * s.width;
    let mut out = Vec::new();
    for i in 0..grid.len() {
        let p = grid.point(i);
        let mut r2 = 0.0;
        for a in 0..grid.dim() {
            let mut dx = p[a] - s.center[a];
            if grid.is_periodic() {
                dx -= l * (dx / l).round();
            }
            r2 += dx * dx;
        }
        if r2.sqrt() <= reach {
            out.push((i, s.mass * (-0.5 * r2 / (s.width * s.width)).exp() / norm));
        }
    }
    // Renormalise the discrete mass so that Σ S h^d equals the spike mass
    // exactly; keeps the mass-balance bookkeeping sharp on coarse grids.
    let total: f64 = out.iter().map(|e| e.1).sum::<f64>() * grid.cell_volume();
    if total != 0.0 {
        let c = s.mass / total;
        for e in &mut out {
            e.1 *= c;
        }
    }
    out
}

pub(crate) enum ForceSampler {
    Zero,
    Steady(Vec<f64>),
    Spikes(Vec<(Spike, Vec<(usize, f64)>)>),
}

impl ForceSampler {
    pub(crate) fn is_zero(&self) -> bool {
        matches!(self, ForceSampler::Zero)
    }

    /// Shortest time scale on which the source switches on and off.
    pub(crate) fn time_scale(&self) -> Option<f64> {
        match self {
            ForceSampler::Spikes(list) => list.iter().map(|(s, _)| s.duration).reduce(f64::min),
            _ => None,
        }
    }

    /// Overwrites `out` with `S(t, ·)`.
    pub(crate) fn fill(&self, t: f64, out: &mut [f64]) {
        match self {
            ForceSampler::Zero => out.iter_mut().for_each(|v| *v = 0.0),
            ForceSampler::Steady(v) => out.copy_from_slice(v),
            ForceSampler::Spikes(list) => {
                out.iter_mut().for_each(|v| *v = 0.0);
                for (s, prof) in list {
                    let a = s.temporal(t);
                    if a == 0.0 {
                        continue;
                    }
                    for &(i, w) in prof {
                        out[i] += a * w;
                    }
                }
            }
        }
    }
}
