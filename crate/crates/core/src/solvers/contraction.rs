//! Two runs from different data, stepped together.

use serde::{Deserialize, Serialize};

use super::engine::checked_max_abs;
use super::pme::PmeProblem;
use crate::error::{Error, Result};
use crate::grid::Field;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    /// `‖u0_a − u0_b‖_{L¹}`.
    pub initial_distance: f64,
    /// `sup_t ‖u_a(t) − u_b(t)‖_{L¹}` over all steps.
    pub sup_distance: f64,
    /// `max(0, sup_distance − initial_distance)`.
    pub slack: f64,
    /// `Some(ok)` when the data are ordered (`u0_a ≥ u0_b`): whether the
    /// order survived every step.
    pub order_preserved: Option<bool>,
    pub steps: usize,
}

/// Runs `problem` from `u0_a` and `u0_b` with one shared step sequence (the
/// smaller of the two CFL steps), so the distance is a property of the
/// scheme and not of mismatched time grids. `problem.u0` is ignored except
/// for its grid.
pub fn l1_contraction_check(problem: &PmeProblem, u0_a: &Field, u0_b: &Field) -> Result<ContractionReport> {
    problem.validate()?;
    let g = *problem.u0.grid();
    g.ensure_same(u0_a.grid(), "u0_a")?;
    g.ensure_same(u0_b.grid(), "u0_b")?;
    let engine = problem.engine();
    let sampler = problem.force.sampler(&g)?;
    let cap = problem
        .blowup_cap
        .unwrap_or_else(|| super::default_blowup_cap(u0_a.max_abs().max(u0_b.max_abs())));
    let h = g.cell_volume();
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * h;
    let ordered = u0_a.values().iter().zip(u0_b.values()).all(|(a, b)| a >= b);

    let mut a = u0_a.values().to_vec();
    let mut b = u0_b.values().to_vec();
    let (mut na, mut nb) = (vec![0.0; a.len()], vec![0.0; a.len()]);
    let mut s = vec![0.0; a.len()];
    let mut phi = Vec::new();
    let initial = dist(&a, &b);
    let mut sup = initial;
    let mut order_ok = ordered;
    let mut t = 0.0;
    let mut steps = 0;
    let t_end = problem.t_end;
    while t < t_end {
        let umax = checked_max_abs(&a).max(checked_max_abs(&b));
        if umax > cap {
            return Err(Error::BlowUp {
                time: t,
                step: steps,
                max_abs: umax,
                cap,
            });
        }
        let src = if sampler.is_zero() {
            None
        } else {
            sampler.fill(t, &mut s);
            Some(&s[..])
        };
        let smax = src.map_or(0.0, checked_max_abs);
        let mut dt = engine.choose_dt(umax, 0.0, smax, t_end, problem.max_dt, sampler.time_scale());
        let last = t + dt >= t_end * (1.0 - 1e-12);
        if last {
            dt = t_end - t;
        }
        engine.step(&a, src, dt, &mut na, &mut phi);
        engine.step(&b, src, dt, &mut nb, &mut phi);
        std::mem::swap(&mut a, &mut na);
        std::mem::swap(&mut b, &mut nb);
        sup = sup.max(dist(&a, &b));
        if order_ok && a.iter().zip(&b).any(|(x, y)| x < y) {
            order_ok = false;
        }
        steps += 1;
        t = if last { t_end } else { t + dt };
    }
    Ok(ContractionReport {
        initial_distance: initial,
        sup_distance: sup,
        slack: (sup - initial).max(0.0),
        order_preserved: ordered.then_some(order_ok),
        steps,
    })
}
