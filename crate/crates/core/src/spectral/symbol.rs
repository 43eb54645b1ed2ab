//! Symbols `𝓛(iτ, iξ, v) = iτ + i a(v)·ξ + (ξ, b(v) ξ)` of the kinetic
//! operators. All supported diffusion matrices are diagonal.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::nonlinear::signed_power;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SymbolDescriptor {
    /// `a = 0`, `b = m|v|^{m−1} Id`.
    Pme { m: f64, dim: usize },
    /// `a_j = n_j|v|^{n_j−1}` (flux `u^{[n_j]}`), `b = diag(m_j|v|^{m_j−1})`.
    Anisotropic { m: Vec<f64>, n: Vec<f64> },
    /// `a = 0`, `b ≡ κ Id`.
    Heat { dim: usize, kappa: f64 },
}

/// `k|v|^{k−1}`, with the `k = 1` case constant.
fn deriv_power(k: f64, v: f64) -> f64 {
    if k == 1.0 {
        1.0
    } else {
        k * v.abs().powf(k - 1.0)
    }
}

/// `d/dv (k|v|^{k−1}) = k(k−1) v^{[k−2]}`, evaluated as 0 at `v = 0`.
fn second_deriv_power(k: f64, v: f64) -> f64 {
    if k == 1.0 || v == 0.0 {
        0.0
    } else if k == 2.0 {
        2.0 * v.signum()
    } else {
        k * (k - 1.0) * signed_power(v, k - 2.0)
    }
}

impl SymbolDescriptor {
    pub fn validate(&self) -> Result<()> {
        match self {
            SymbolDescriptor::Pme { m, dim } => {
                if !(*m > 1.0) {
                    return invalid(format!("pme symbol needs m > 1, got {m}"));
                }
                check_dim(*dim)
            }
            SymbolDescriptor::Anisotropic { m, n } => {
                if m.len() != n.len() {
                    return invalid("m and n lists must have equal length");
                }
                check_dim(m.len())?;
                if m.iter().chain(n).any(|&x| !(x >= 1.0)) {
                    return invalid("anisotropic exponents must be >= 1");
                }
                Ok(())
            }
            SymbolDescriptor::Heat { dim, kappa } => {
                if !(*kappa >= 0.0) {
                    return invalid("heat symbol needs kappa >= 0");
                }
                check_dim(*dim)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SymbolDescriptor::Pme { dim, .. } | SymbolDescriptor::Heat { dim, .. } => *dim,
            SymbolDescriptor::Anisotropic { m, .. } => m.len(),
        }
    }

    /// Flux derivative `a(v)`.
    pub fn flux(&self, v: f64) -> [f64; 2] {
        match self {
            SymbolDescriptor::Anisotropic { n, .. } => {
                let mut a = [0.0; 2];
                for (j, &nj) in n.iter().enumerate() {
                    a[j] = deriv_power(nj, v);
                }
                a
            }
            _ => [0.0; 2],
        }
    }

    /// Diagonal of `b(v)`.
    pub fn diffusion(&self, v: f64) -> [f64; 2] {
        match self {
            SymbolDescriptor::Pme { m, dim } => {
                let b = deriv_power(*m, v);
                diag(*dim, |_| b)
            }
            SymbolDescriptor::Anisotropic { m, .. } => diag(m.len(), |j| deriv_power(m[j], v)),
            SymbolDescriptor::Heat { dim, kappa } => diag(*dim, |_| *kappa),
        }
    }

    pub fn flux_dv(&self, v: f64) -> [f64; 2] {
        match self {
            SymbolDescriptor::Anisotropic { n, .. } => diag(n.len(), |j| second_deriv_power(n[j], v)),
            _ => [0.0; 2],
        }
    }

    pub fn diffusion_dv(&self, v: f64) -> [f64; 2] {
        match self {
            SymbolDescriptor::Pme { m, dim } => {
                let d = second_deriv_power(*m, v);
                diag(*dim, |_| d)
            }
            SymbolDescriptor::Anisotropic { m, .. } => diag(m.len(), |j| second_deriv_power(m[j], v)),
            SymbolDescriptor::Heat { .. } => [0.0; 2],
        }
    }

    /// `σ = b^{1/2}` (diagonal).
    pub fn sigma(&self, v: f64) -> [f64; 2] {
        let b = self.diffusion(v);
        [b[0].sqrt(), b[1].sqrt()]
    }

    /// Antiderivative `β` of `σ` with `β(0) = 0` (diagonal).
    pub fn beta(&self, v: f64) -> [f64; 2] {
        let prim = |k: f64| {
            let e = 0.5 * (k + 1.0);
            k.sqrt() / e * signed_power(v, e)
        };
        match self {
            SymbolDescriptor::Pme { m, dim } => {
                let b = prim(*m);
                diag(*dim, |_| b)
            }
            SymbolDescriptor::Anisotropic { m, .. } => diag(m.len(), |j| prim(m[j])),
            SymbolDescriptor::Heat { dim, kappa } => diag(*dim, |_| kappa.sqrt() * v),
        }
    }

    /// `max_{v ∈ [lo, hi]}` of the largest diagonal entry of `b`.
    pub fn max_diffusion(&self, lo: f64, hi: f64) -> f64 {
        // every entry is even in v and nondecreasing in |v|
        let r = lo.abs().max(hi.abs());
        self.diffusion(r).iter().cloned().fold(0.0, f64::max)
    }

    /// `max_{v ∈ [lo, hi]} |a(v)|`.
    pub fn max_flux(&self, lo: f64, hi: f64) -> f64 {
        let r = lo.abs().max(hi.abs());
        let a = self.flux(r);
        a[0].hypot(a[1])
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 1 || d == 2 {
        Ok(())
    } else {
        invalid(format!("dimension must be 1 or 2, got {d}"))
    }
}

fn diag(dim: usize, f: impl Fn(usize) -> f64) -> [f64; 2] {
    let mut out = [0.0; 2];
    for (j, o) in out.iter_mut().enumerate().take(dim) {
        *o = f(j);
    }
    out
}

fn xi2(xi: &[f64]) -> [f64; 2] {
    [xi.first().copied().unwrap_or(0.0), xi.get(1).copied().unwrap_or(0.0)]
}

/// `iτ + i a(v)·ξ + (ξ, b(v) ξ)`.
pub fn symbol_eval(desc: &SymbolDescriptor, tau: f64, xi: &[f64], v: f64) -> Complex64 {
    let x = xi2(xi);
    let a = desc.flux(v);
    let b = desc.diffusion(v);
    Complex64::new(
        b[0] * x[0] * x[0] + b[1] * x[1] * x[1],
        tau + a[0] * x[0] + a[1] * x[1],
    )
}

/// `∂_v 𝓛(iτ, iξ, v)`.
pub fn symbol_dv(desc: &SymbolDescriptor, xi: &[f64], v: f64) -> Complex64 {
    let x = xi2(xi);
    let a = desc.flux_dv(v);
    let b = desc.diffusion_dv(v);
    Complex64::new(b[0] * x[0] * x[0] + b[1] * x[1] * x[1], a[0] * x[0] + a[1] * x[1])
}
