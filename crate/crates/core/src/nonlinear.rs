//! Elementary nonlinear maps.

/// `u^{[m]} = |u|^{m-1} u`, written as `sign(u)|u|^m` so that exponents
/// below one stay finite at the origin.
#[inline]
pub fn signed_power(x: f64, m: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if m == 1.0 {
        x
    } else if m == 2.0 {
        x * x.abs()
    } else {
        x.signum() * x.abs().powf(m)
    }
}

/// Smallest `c` with `|r − s|^m ≤ c |r^{[m/2]} − s^{[m/2]}|²` for all real
/// `r, s`, `m ≥ 2`.
///
/// Both sides are homogeneous of degree `m`, so it suffices to scan
/// `s = t r` with `t ∈ [−1, 1)`. The scan includes `t = −1`; away from it the
/// ratio is smooth, so a uniform lattice of `samples` points is enough.
pub fn increment_power_constant(m: f64, samples: usize) -> f64 {
    assert!(m >= 2.0, "inequality needs m >= 2");
    let half = 0.5 * m;
    let ratio = |t: f64| (1.0 - t).powf(m) / (1.0 - signed_power(t, half)).powi(2);
    // t → 1 limit: (m/2)^{-2} at m = 2, zero above.
    let mut c: f64 = if m == 2.0 { 1.0 } else { 0.0 };
    for i in 0..samples {
        let t = -1.0 + 2.0 * i as f64 / samples as f64;
        c = c.max(ratio(t));
    }
    c
}
