//! Closed-form exponent algebra of the averaging lemma and its
//! specialisations.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Hölder conjugate; `1 ↦ ∞`, `∞ ↦ 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Inputs of the averaging lemma. `p` and `r` may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentInputs {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub mu: f64,
    pub gamma: f64,
    pub eta: f64,
    pub q: f64,
    pub p: f64,
    pub r: f64,
}

impl ExponentInputs {
    /// `α = 1/(m−1)`, `β = 2`, `q = 1`, `λ = η = 0`, `r = 1`, `p = ∞`.
    pub fn pme_limit(m: f64) -> Result<Self> {
        if !(m > 1.0) {
            return invalid(format!("m must exceed 1, got {m}"));
        }
        Ok(ExponentInputs {
            alpha: 1.0 / (m - 1.0),
            beta: 2.0,
            lambda: 0.0,
            mu: 1.0,
            gamma: 1.0,
            eta: 0.0,
            q: 1.0,
            p: f64::INFINITY,
            r: 1.0,
        })
    }

    /// The PME limit with the extra half-derivative loss `η = 1/2` of the
    /// white-noise potential.
    pub fn anderson(m: f64) -> Result<Self> {
        Ok(ExponentInputs {
            eta: 0.5,
            ..Self::pme_limit(m)?
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            return invalid("alpha and beta must be positive");
        }
        if !(self.lambda >= 0.0 && self.eta >= 0.0 && self.gamma >= 0.0) {
            return invalid("lambda, eta and gamma must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return invalid("mu must lie in [0,1]");
        }
        if !(self.q >= 1.0 && self.q <= self.p) {
            return invalid("need 1 <= q <= p");
        }
        if !(self.r >= 1.0 && self.r <= conjugate(self.p)) {
            return invalid("need 1 <= r <= p'");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragingExponents {
    pub theta: f64,
    pub s_star: f64,
    pub p_star: f64,
}

/// `θ = (α/r) / (α(1/r − 1/q′) + 1)`,
/// `s* = (1−θ) αβ/r + θ(αβ/q′ − λ − η)`,
/// `1/p* = (1−θ)/p + θ/q`.
pub fn averaging_exponents(inp: &ExponentInputs) -> Result<AveragingExponents> {
    inp.validate()?;
    let ExponentInputs {
        alpha,
        beta,
        lambda,
        eta,
        q,
        p,
        r,
        ..
    } = *inp;
    let inv_qc = 1.0 / conjugate(q);
    let inv_r = 1.0 / r;
    let theta = alpha * inv_r / (alpha * (inv_r - inv_qc) + 1.0);
    let s_star = (1.0 - theta) * alpha * beta * inv_r + theta * (alpha * beta * inv_qc - lambda - eta);
    let p_star = 1.0 / ((1.0 - theta) / p + theta / q);
    Ok(AveragingExponents { theta, s_star, p_star })
}

/// `(2α+2)/(2α+1)`, the integrability reached in the parabolic case.
pub fn parabolic_integrability(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return invalid("alpha must be positive");
    }
    Ok((2.0 * alpha + 2.0) / (2.0 * alpha + 1.0))
}

/// `s* = (2/m̄)(min(m̲, n̲) − 1)/(m̄ − 1)` and `p* = 2m̄/(1 + m̄)`.
pub fn aniso_exponents(m_list: &[f64], n_list: &[f64]) -> Result<(f64, f64)> {
    if m_list.is_empty() || m_list.len() != n_list.len() {
        return invalid("m and n lists must be nonempty and of equal length");
    }
    if m_list.iter().chain(n_list).any(|&x| !(x >= 1.0)) {
        return invalid("all exponents must be >= 1");
    }
    let max_m = m_list.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max_m > 1.0) {
        return invalid("largest diffusion exponent must exceed 1");
    }
    let min_m = m_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_n = n_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let s = 2.0 / max_m * (min_m.min(min_n) - 1.0) / (max_m - 1.0);
    Ok((s, 2.0 * max_m / (1.0 + max_m)))
}

/// The λ exponent of the `∂_v` bound for the anisotropic symbol:
/// `2 − 2(min(m̲, n̲) − 2 + γ)/(m̄ − 1)`.
pub fn aniso_lambda(m_list: &[f64], n_list: &[f64], gamma: f64) -> Result<f64> {
    aniso_exponents(m_list, n_list)?;
    let max_m = m_list.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let low = m_list.iter().chain(n_list).cloned().fold(f64::INFINITY, f64::min);
    Ok(2.0 - 2.0 * (low - 2.0 + gamma) / (max_m - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub m: f64,
    /// `2/m`.
    pub s_star: f64,
    /// `m`.
    pub p_star: f64,
    /// `2/(m+1)`, the regularity of the classical energy method.
    pub s_energy: f64,
}

/// One row per `m`, from the PME-limit exponents.
pub fn exponent_table(ms: &[f64]) -> Result<Vec<ExponentRow>> {
    ms.iter()
        .map(|&m| {
            let e = averaging_exponents(&ExponentInputs::pme_limit(m)?)?;
            Ok(ExponentRow {
                m,
                s_star: e.s_star,
                p_star: e.p_star,
                s_energy: 2.0 / (m + 1.0),
            })
        })
        .collect()
}
