//! Discrete Fourier transforms on periodic grids (backed by `rustfft`).
//!
//! Convention: the forward transform is unnormalised,
//! `û_k = Σ_x u_x e^{-2πi k·x/n}`, and the inverse divides by `n^d`, so
//! `Σ|u|² = n^{-d} Σ|û|²`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if !grid.is_periodic() {
            return Err(Error::NotPeriodic);
        }
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Spectrum { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// `n^{-d} Σ |û_k|²`, equal to `Σ |u_x|²` by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.grid.len() as f64
    }

    /// Euclidean norm of the integer wave vector at flat index `idx`.
    pub fn wave_norm(&self, idx: usize) -> f64 {
        wave_norm(&self.grid, idx)
    }
}

/// Signed wave number of FFT slot `i` on an axis of length `n`; the Nyquist
/// slot maps to `+n/2`.
pub fn wave_index(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

pub fn wave_norm(grid: &Grid, idx: usize) -> f64 {
    let n = grid.n();
    if grid.dim() == 1 {
        wave_index(idx, n).unsigned_abs() as f64
    } else {
        let k1 = wave_index(idx / n, n) as f64;
        let k2 = wave_index(idx % n, n) as f64;
        k1.hypot(k2)
    }
}

/// Reusable plan for transforms of rows of one length.
pub(crate) struct Plan {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Plan {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Plan {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    /// In-place transform of every contiguous row of length `n`.
    pub(crate) fn rows(&self, data: &mut [Complex64], inverse: bool) {
        debug_assert_eq!(data.len() % self.n, 0);
        if inverse {
            self.inv.process(data)
        } else {
            self.fwd.process(data)
        }
    }
}

/// Unnormalised 2-D transform of a row-major `rows × cols` array.
pub(crate) fn fft2(data: &mut [Complex64], rows: usize, cols: usize, inverse: bool) {
    let pc = Plan::new(cols);
    pc.rows(data, inverse);
    let mut t = transpose(data, rows, cols);
    let pr = Plan::new(rows);
    pr.rows(&mut t, inverse);
    let back = transpose(&t, cols, rows);
    data.copy_from_slice(&back);
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

pub(crate) fn forward_values(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let n = grid.n();
    if grid.dim() == 1 {
        Plan::new(n).rows(&mut data, false);
    } else {
        fft2(&mut data, n, n, false);
    }
    data
}

pub(crate) fn inverse_values(grid: &Grid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    let n = grid.n();
    if grid.dim() == 1 {
        Plan::new(n).rows(&mut data, true);
    } else {
        fft2(&mut data, n, n, true);
    }
    let scale = 1.0 / grid.len() as f64;
    data.iter().map(|c| c.re * scale).collect()
}

pub fn dft_forward(field: &Field) -> Result<Spectrum> {
    if !field.grid().is_periodic() {
        return Err(Error::NotPeriodic);
    }
    Ok(Spectrum {
        grid: *field.grid(),
        coeffs: forward_values(field.grid(), field.values()),
    })
}

/// Real part of the inverse transform.
pub fn dft_inverse(spectrum: &Spectrum) -> Result<Field> {
    Field::new(spectrum.grid, inverse_values(&spectrum.grid, &spectrum.coeffs))
}

/// Odd reflection of a Dirichlet field onto the periodic grid of twice the
/// length: `[u_0, …, u_{n-1}, 0, -u_{n-1}, …, -u_1]`.
///
/// This is how spectral tools see Dirichlet data. It is exact for sine
/// series and an approximation otherwise (the extension is only as smooth
/// as `u` is at the walls).
pub fn odd_extension(field: &Field) -> Result<Field> {
    let g = field.grid();
    if g.is_periodic() {
        return Err(Error::InvalidArgument("odd_extension expects a dirichlet field".into()));
    }
    let n = g.n();
    let u = field.values();
    let mut out = Vec::with_capacity(2 * n);
    out.extend_from_slice(u);
    out.push(0.0);
    for i in (1..n).rev() {
        out.push(-u[i]);
    }
    Field::new(Grid::periodic(1, 2 * n, 2.0 * g.length())?, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn delta_has_flat_spectrum() {
        let g = Grid::periodic(1, 32, 1.0).unwrap();
        let mut v = vec![0.0; 32];
        v[0] = 1.0;
        let s = dft_forward(&Field::new(g, v).unwrap()).unwrap();
        for c in s.coeffs() {
            assert!((c.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sine_mode_two_coefficients() {
        let g = Grid::periodic(1, 64, 2.0).unwrap();
        let k = 5.0;
        let u = Field::from_fn(g, |p| (2.0 * PI * k * p[0] / 2.0).sin()).unwrap();
        let s = dft_forward(&u).unwrap();
        for (i, c) in s.coeffs().iter().enumerate() {
            let kk = wave_index(i, 64).abs();
            if kk == 5 {
                assert!((c.norm() - 32.0).abs() < 1e-10);
            } else {
                assert!(c.norm() < 1e-10, "slot {i}: {c}");
            }
        }
    }

    #[test]
    fn roundtrip_2d() {
        let g = Grid::periodic(2, 16, 1.0).unwrap();
        let u = Field::from_fn(g, |p| (3.0 * p[0]).sin() + p[1] * p[1]).unwrap();
        let back = dft_inverse(&dft_forward(&u).unwrap()).unwrap();
        for (a, b) in u.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_dirichlet() {
        let g = Grid::dirichlet(16, 1.0).unwrap();
        assert!(matches!(dft_forward(&Field::zeros(g)), Err(Error::NotPeriodic)));
    }

    #[test]
    fn odd_extension_layout() {
        let g = Grid::dirichlet(8, 1.0).unwrap();
        let u = Field::from_fn(g, |p| p[0]).unwrap();
        let e = odd_extension(&u).unwrap();
        assert_eq!(e.grid().n(), 16);
        let v = e.values();
        assert_eq!(v[8], 0.0);
        for i in 1..8 {
            assert_eq!(v[16 - i], -v[i]);
        }
    }
}
