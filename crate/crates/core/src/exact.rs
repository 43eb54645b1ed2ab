//! Closed-form reference solutions and calibration profiles.

use crate::error::{invalid, Result};
use crate::grid::{Boundary, Field, Grid};
use crate::nonlinear::signed_power;

/// Similarity exponent `k = d / (d(m−1) + 2)` of the Barenblatt family.
///
/// This is the unique choice for which `∫ u dx` is constant in time.
pub fn similarity_exponent(m: f64, d: usize) -> f64 {
    let d = d as f64;
    d / (d * (m - 1.0) + 2.0)
}

/// `u(t,x) = (t+γ)^{-k} (a² − κ|x|²/(t+γ)^{2k/d})₊^{1/(m−1)}` with
/// `κ = k(m−1)/(2dm)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarenblattParams {
    m: f64,
    d: usize,
    a: f64,
    gamma_shift: f64,
    k: f64,
}

impl BarenblattParams {
    pub fn new(m: f64, d: usize, a: f64, gamma_shift: f64) -> Result<Self> {
        if !(m > 1.0 && m.is_finite()) {
            return invalid(format!("Barenblatt needs m > 1, got {m}"));
        }
        if d != 1 && d != 2 {
            return invalid(format!("dimension must be 1 or 2, got {d}"));
        }
        if !(a > 0.0 && a.is_finite()) {
            return invalid(format!("amplitude a must be positive, got {a}"));
        }
        if !(gamma_shift > 0.0 && gamma_shift.is_finite()) {
            return invalid(format!("time shift must be positive, got {gamma_shift}"));
        }
        Ok(BarenblattParams {
            m,
            d,
            a,
            gamma_shift,
            k: similarity_exponent(m, d),
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn gamma_shift(&self) -> f64 {
        self.gamma_shift
    }
    pub fn k(&self) -> f64 {
        self.k
    }

    fn kappa(&self) -> f64 {
        self.k * (self.m - 1.0) / (2.0 * self.d as f64 * self.m)
    }

    fn tau(&self, t: f64) -> f64 {
        let tau = t + self.gamma_shift;
        assert!(tau > 0.0, "Barenblatt evaluated at t + γ <= 0");
        tau
    }

    /// Radius of the support at time `t`.
    pub fn support_radius(&self, t: f64) -> f64 {
        let tau = self.tau(t);
        let d = self.d as f64;
        self.a * (tau.powf(2.0 * self.k / d) * 2.0 * d * self.m / (self.k * (self.m - 1.0))).sqrt()
    }

    /// Value at squared radius `r2 = |x|²`.
    pub fn value_r2(&self, t: f64, r2: f64) -> f64 {
        let tau = self.tau(t);
        let w = self.a * self.a - self.kappa() * r2 / tau.powf(2.0 * self.k / self.d as f64);
        if w <= 0.0 {
            0.0
        } else {
            tau.powf(-self.k) * w.powf(1.0 / (self.m - 1.0))
        }
    }

    /// Exact `∂_t u` at squared radius `r2` (zero outside the support).
    pub fn time_derivative_r2(&self, t: f64, r2: f64) -> f64 {
        let tau = self.tau(t);
        let d = self.d as f64;
        let q = 2.0 * self.k / d;
        let w = self.a * self.a - self.kappa() * r2 / tau.powf(q);
        if w <= 0.0 {
            return 0.0;
        }
        let e = 1.0 / (self.m - 1.0);
        let dw = self.kappa() * r2 * q * tau.powf(-q - 1.0);
        -self.k * tau.powf(-self.k - 1.0) * w.powf(e) + tau.powf(-self.k) * e * w.powf(e - 1.0) * dw
    }

    /// Total mass `∫ u dx` (closed form for d = 1, 2).
    pub fn mass(&self) -> f64 {
        let e = 1.0 / (self.m - 1.0);
        // ∫ (a² − κ|y|²)₊^e dy with the time scaling absorbed by k.
        let kappa = self.kappa();
        let a2 = self.a * self.a;
        match self.d {
            1 => {
                // ∫_{-A}^{A} (a² − κ y²)^e dy = a^{2e} (a/√κ) B(1/2, e+1)
                let beta = beta_fn(0.5, e + 1.0);
                a2.powf(e) * (self.a / kappa.sqrt()) * beta
            }
            _ => {
                // 2π ∫_0^A (a² − κ r²)^e r dr = π a^{2e+2} / (κ (e+1))
                std::f64::consts::PI * a2.powf(e + 1.0) / (kappa * (e + 1.0))
            }
        }
    }
}

fn beta_fn(x: f64, y: f64) -> f64 {
    (ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y)).exp()
}

// Lanczos approximation, g = 7, n = 9; relative error ~1e-15 for x > 0.
fn ln_gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + 7.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn barenblatt_eval(params: &BarenblattParams, t: f64, x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|c| c * c).sum();
    params.value_r2(t, r2)
}

/// Geometric centre of the box: the origin for periodic grids, `L/2` for
/// Dirichlet intervals. Both are grid nodes.
pub fn box_center(grid: &Grid) -> [f64; 2] {
    match grid.boundary() {
        Boundary::Periodic => [0.0, 0.0],
        Boundary::DirichletZero => [0.5 * grid.length(), 0.0],
    }
}

fn r2_from_center(grid: &Grid, p: [f64; 2]) -> f64 {
    let c = box_center(grid);
    let dx = p[0] - c[0];
    let dy = if grid.dim() == 2 { p[1] - c[1] } else { 0.0 };
    dx * dx + dy * dy
}

/// Barenblatt profile at time `t`, centred in the box.
pub fn barenblatt_field(params: &BarenblattParams, grid: &Grid, t: f64) -> Result<Field> {
    if params.d != grid.dim() {
        return invalid("Barenblatt dimension differs from grid dimension");
    }
    Field::from_fn(*grid, |p| params.value_r2(t, r2_from_center(grid, p)))
}

/// Max-norm of `∂_t u − Δ_h u^{[m]}` over the nodes selected by `region`,
/// with `dudt` supplied exactly.
///
/// Δ_h is the standard 3- (5-) point Laplacian; periodic grids wrap, Dirichlet
/// grids read zero beyond the walls.
pub fn pme_residual(
    u: &Field,
    dudt: &[f64],
    m: f64,
    region: impl Fn([f64; 2]) -> bool,
) -> Result<f64> {
    let g = *u.grid();
    if dudt.len() != g.len() {
        return invalid("time derivative has the wrong length");
    }
    let phi: Vec<f64> = u.values().iter().map(|&v| signed_power(v, m)).collect();
    let lap = laplacian(&g, &phi);
    let mut worst: f64 = 0.0;
    for i in 0..g.len() {
        if region(g.point(i)) {
            worst = worst.max((dudt[i] - lap[i]).abs());
        }
    }
    Ok(worst)
}

pub(crate) fn laplacian(g: &Grid, phi: &[f64]) -> Vec<f64> {
    let n = g.n();
    let h2 = g.spacing() * g.spacing();
    let periodic = g.is_periodic();
    let at = |i: isize| -> f64 {
        if periodic {
            phi[i.rem_euclid(n as isize) as usize]
        } else if i < 0 || i >= n as isize {
            0.0
        } else {
            phi[i as usize]
        }
    };
    if g.dim() == 1 {
        (0..n as isize)
            .map(|i| (at(i - 1) - 2.0 * at(i) + at(i + 1)) / h2)
            .collect()
    } else {
        let mut out = vec![0.0; g.len()];
        for r in 0..n {
            for c in 0..n {
                let rm = (r + n - 1) % n;
                let rp = (r + 1) % n;
                let cm = (c + n - 1) % n;
                let cp = (c + 1) % n;
                out[r * n + c] = (phi[rm * n + c] + phi[rp * n + c] + phi[r * n + cm] + phi[r * n + cp]
                    - 4.0 * phi[r * n + c])
                    / h2;
            }
        }
        out
    }
}

/// Discrete PDE residual of the Barenblatt solution at time `t`, measured on
/// `|x| ≤ R(t)/2`, well inside the free boundary.
pub fn barenblatt_residual(params: &BarenblattParams, grid: &Grid, t: f64) -> Result<f64> {
    let u = barenblatt_field(params, grid, t)?;
    let dudt: Vec<f64> = (0..grid.len())
        .map(|i| params.time_derivative_r2(t, r2_from_center(grid, grid.point(i))))
        .collect();
    let r_half = 0.5 * params.support_radius(t);
    pme_residual(&u, &dudt, params.m, |p| r2_from_center(grid, p) <= r_half * r_half)
}

/// `s_c = 1/(m−1) + 1/p`: the Barenblatt profile, which behaves like
/// `dist^{1/(m−1)}` at its free boundary, lies in `W^{s,p}_loc` exactly for
/// `s < s_c`.
pub fn barenblatt_critical_exponent(m: f64, p: f64) -> Result<f64> {
    if !(m > 1.0) {
        return invalid(format!("critical exponent needs m > 1, got {m}"));
    }
    if !(p >= 1.0) {
        return invalid(format!("critical exponent needs p >= 1, got {p}"));
    }
    Ok(1.0 / (m - 1.0) + 1.0 / p)
}

/// Singular point and Gaussian window width, as fractions of the box length.
const PROFILE_ORIGIN: f64 = -0.25;
const PROFILE_WIDTH: f64 = 0.1;

/// `(x − x₀)₊^β · exp(−(x − x₀)²/(2σ²))` on a periodic 1-D box with
/// `x₀ = −L/4`, `σ = L/10`.
///
/// The Gaussian window is analytic, so the only singularity is at `x₀`
/// (critical exponent `β + 1/p`). At the periodic seam, `3L/4` away, it is
/// below `1e-12`. Compactly supported C∞ windows were tried first: their
/// spectra decay too slowly and pollute the default fit window.
pub fn power_profile(beta: f64, grid: &Grid) -> Result<Field> {
    if !(beta > 0.0) {
        return invalid(format!("power profile needs beta > 0, got {beta}"));
    }
    if grid.dim() != 1 || !grid.is_periodic() {
        return invalid("power profile lives on a periodic 1-D grid");
    }
    let l = grid.length();
    let x0 = PROFILE_ORIGIN * l;
    let sigma = PROFILE_WIDTH * l;
    Field::from_fn(*grid, |p| {
        let y = p[0] - x0;
        if y <= 0.0 {
            0.0
        } else {
            y.powf(beta) * (-0.5 * (y / sigma).powi(2)).exp()
        }
    })
}

/// Location `x₀` of the singular point of [`power_profile`].
pub fn power_profile_origin(grid: &Grid) -> f64 {
    PROFILE_ORIGIN * grid.length()
}
