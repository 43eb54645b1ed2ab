use std::f64::consts::PI;

use pmelab_core::exact::{barenblatt_eval, barenblatt_field, power_profile, BarenblattParams};
use pmelab_core::kinetic::VGrid;
use pmelab_core::solvers::{solve_pme, PmeProblem, SnapshotStride};
use pmelab_core::spectral::*;
use pmelab_core::{DyadicPartition, Field, Grid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sine(n: usize, l: f64, k: f64) -> Field {
    Field::from_fn(Grid::periodic(1, n, l).unwrap(), |p| (2.0 * PI * k * p[0] / l).sin()).unwrap()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

// ---------------------------------------------------------------- profiles

#[test]
fn profile_examples() {
    let g = Grid::periodic(1, 256, 2.0 * PI).unwrap();
    let part = DyadicPartition::for_grid(&g);
    let z = besov_profile(&Field::zeros(g), 2.0, &part).unwrap();
    assert!(z.entries.iter().all(|e| e.1 == 0.0));

    let u = sine(256, 2.0 * PI, 16.0);
    let prof = besov_profile(&u, 2.0, &part).unwrap();
    for &(j, b) in &prof.entries {
        if !(3..=5).contains(&j) {
            assert!(b < 1e-12, "block {j} = {b}");
        }
    }

    let gauss = Field::from_fn(Grid::periodic(1, 1024, 2.0 * PI).unwrap(), |p| (-8.0 * p[0] * p[0]).exp()).unwrap();
    let prof = besov_profile_auto(&gauss, 2.0).unwrap();
    // beyond the resolved band, consecutive blocks drop by more than 2^10
    let mut checked = 0;
    for w in prof.entries.windows(2) {
        if w[0].0 >= 4 && w[1].1 > 1e-12 {
            assert!(w[1].1 < w[0].1 * 2f64.powi(-10), "{w:?}");
            checked += 1;
        }
    }
    assert!(checked >= 1, "{:?}", prof.entries);
}

#[test]
fn power_profile_calibration() {
    let g = Grid::periodic(1, 1 << 14, 1.0).unwrap();
    let u = power_profile(0.5, &g).unwrap();
    let fit = critical_exponent_estimate(&besov_profile_auto(&u, 2.0).unwrap(), None).unwrap();
    assert!((fit.s_hat - 1.0).abs() <= 0.1, "{fit:?}");
    assert!(!fit.capped);
}

#[test]
fn smooth_data_hits_the_cap() {
    let g = Grid::periodic(1, 1 << 12, 2.0 * PI).unwrap();
    let u = Field::from_fn(g, |p| (-2.0 * p[0] * p[0]).exp()).unwrap();
    let fit = critical_exponent_estimate(&besov_profile_auto(&u, 2.0).unwrap(), None).unwrap();
    assert!(fit.capped);
    assert_eq!(fit.s_hat, fit.cap);
}

#[test]
fn barenblatt_regularity() {
    let p = BarenblattParams::new(2.0, 1, 1.0, 1.0).unwrap();
    let g = Grid::periodic(1, 1 << 14, 16.0).unwrap();
    let u = barenblatt_field(&p, &g, 0.0).unwrap();
    let fit = critical_exponent_estimate(&besov_profile_auto(&u, 3.0).unwrap(), None).unwrap();
    assert!((fit.s_hat - 4.0 / 3.0).abs() <= 0.1, "{fit:?}");
}

#[test]
fn degenerate_windows_are_rejected() {
    let prof = besov_profile_auto(&sine(64, 1.0, 3.0), 2.0).unwrap();
    assert!(critical_exponent_estimate(&prof, Some(FitWindow { lo: 1, hi: 3 })).is_err());
    assert!(critical_exponent_estimate(&prof, Some(FitWindow { lo: 2, hi: 40 })).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn exponent_fit_is_scale_invariant(c in 1e-3f64..1e3) {
        let g = Grid::periodic(1, 1 << 11, 1.0).unwrap();
        let u = power_profile(0.75, &g).unwrap();
        let a = critical_exponent_estimate(&besov_profile_auto(&u, 2.0).unwrap(), None).unwrap();
        let b = critical_exponent_estimate(&besov_profile_auto(&u.scale(c).unwrap(), 2.0).unwrap(), None).unwrap();
        prop_assert!((a.s_hat - b.s_hat).abs() < 1e-9);
    }
}

// --------------------------------------------------------------- seminorms

#[test]
fn constants_have_zero_seminorms() {
    let c = Field::constant(Grid::periodic(1, 64, 1.0).unwrap(), 3.0).unwrap();
    assert_eq!(slobodeckij_seminorm(&c, 0.5, 2.0).unwrap(), 0.0);
    assert_eq!(nikolskii_seminorm(&c, 0.5, 2.0).unwrap().value, 0.0);
    let c2 = Field::constant(Grid::periodic(2, 16, 1.0).unwrap(), -1.0).unwrap();
    assert_eq!(slobodeckij_seminorm(&c2, 0.3, 1.5).unwrap(), 0.0);
    assert!(slobodeckij_seminorm(&c, 1.0, 2.0).is_err());
    assert!(nikolskii_seminorm(&c, 0.0, 2.0).is_err());
}

#[test]
fn slobodeckij_of_a_sine_matches_quadrature() {
    let l = 2.0 * PI;
    let k = 3.0;
    for s in [0.3, 0.6] {
        // 2L ∫_0^{L/2} (1 − cos kz) z^{−1−2s} dz, small-z piece by its Taylor term
        let eps: f64 = 1e-4;
        let head = k * k * eps.powf(2.0 - 2.0 * s) / (2.0 * (2.0 - 2.0 * s));
        let tail = simpson(|z| (1.0 - (k * z).cos()) * z.powf(-1.0 - 2.0 * s), eps, 0.5 * l, 200_000);
        let oracle = 2.0 * l * (head + tail);
        let got = slobodeckij_seminorm(&sine(1024, l, k), s, 2.0).unwrap();
        assert!((got / oracle - 1.0).abs() < 0.1, "s = {s}: {got} vs {oracle}");
    }
}

#[test]
fn slobodeckij_blows_up_at_the_critical_exponent() {
    let u = power_profile(0.5, &Grid::periodic(1, 1 << 12, 1.0).unwrap()).unwrap();
    let ss = [0.2, 0.4, 0.6, 0.8, 0.9, 0.95, 0.99];
    let vals: Vec<f64> = ss.iter().map(|&s| slobodeckij_seminorm(&u, s, 2.0).unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] > w[0]), "{vals:?}");
    assert!(vals[vals.len() - 1] > 10.0 * vals[0], "{vals:?}");
}

/// `∫ |u(x+z) − u(x)|² dx` for the tent `max(0, 1 − |x|)`, integrating the
/// piecewise quadratic integrand exactly between breakpoints.
fn tent_increment(z: f64) -> f64 {
    let tent = |x: f64| (1.0 - x.abs()).max(0.0);
    let mut bp = [-1.0, 0.0, 1.0, -1.0 - z, -z, 1.0 - z];
    bp.sort_by(|a, b| a.total_cmp(b));
    bp.windows(2)
        .map(|w| simpson(|x| (tent(x + z) - tent(x)).powi(2), w[0], w[1], 2))
        .sum()
}

#[test]
fn nikolskii_of_a_tent_matches_closed_form() {
    let n = 1024;
    let g = Grid::periodic(1, n, 8.0).unwrap();
    let u = Field::from_fn(g, |p| (1.0 - p[0].abs()).max(0.0)).unwrap();
    let got = nikolskii_seminorm(&u, 0.5, 2.0).unwrap();
    let h = g.spacing();
    let oracle = (1..=n / 2)
        .map(|k| tent_increment(k as f64 * h) / (k as f64 * h))
        .fold(0.0, f64::max);
    assert!((got.value / oracle - 1.0).abs() < 0.05, "{got:?} vs {oracle}");
    assert!(got.shift > 0.0);
}

#[test]
fn nikolskii_scaling_identity() {
    let (m, p, s, eta): (f64, f64, f64, f64) = (2.0, 2.0, 0.5, 2.0);
    let bb = BarenblattParams::new(m, 1, 1.0, 1.0).unwrap();
    let g = Grid::periodic(1, 1 << 10, 16.0).unwrap();
    let u = barenblatt_field(&bb, &g, 0.0).unwrap();
    let gf = Grid::periodic(1, 1 << 11, 16.0).unwrap();
    let ut = Field::from_fn(gf, |x| eta.powf(-2.0 / m) * barenblatt_eval(&bb, 0.0, &[eta * x[0]])).unwrap();
    let a = nikolskii_seminorm(&u, s, p).unwrap().value;
    let b = nikolskii_seminorm(&ut, s, p).unwrap().value;
    let measured = (b / a).ln() / eta.ln();
    let want = -2.0 * p / m + s * p - 1.0;
    assert!((measured / want - 1.0).abs() < 0.01, "{measured} vs {want}");
}

#[test]
fn dirichlet_nikolskii_uses_zero_extension() {
    let g = Grid::dirichlet(64, 1.0).unwrap();
    let u = Field::from_fn(g, |p| (PI * p[0]).sin()).unwrap();
    let v = nikolskii_seminorm(&u, 0.5, 2.0).unwrap();
    assert!(v.value.is_finite() && v.value > 0.0);
}

/// A 20-function corpus of periodic data on `[−π, π)`.
fn corpus(n: usize) -> Vec<Field> {
    let g = Grid::periodic(1, n, 2.0 * PI).unwrap();
    let mut out = Vec::new();
    for k in [1.0, 3.0, 7.0, 15.0, 31.0] {
        out.push(Field::from_fn(g, |p| (k * p[0]).sin()).unwrap());
    }
    for w in [0.2, 0.4, 0.8] {
        out.push(Field::from_fn(g, |p| (-(p[0] / w).powi(2)).exp()).unwrap());
    }
    for beta in [0.6, 0.8, 1.2, 1.6, 2.5] {
        out.push(power_profile(beta, &g).unwrap());
    }
    for m in [2.0, 3.0] {
        let bb = BarenblattParams::new(m, 1, 1.0, 0.2).unwrap();
        out.push(barenblatt_field(&bb, &g, 0.0).unwrap());
    }
    out.push(Field::from_fn(g, |p| (1.0 - p[0].abs()).max(0.0)).unwrap());
    out.push(Field::from_fn(g, |p| (1.0 - (p[0] / 2.0).powi(2)).max(0.0)).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..3 {
        let c: Vec<(f64, f64)> = (0..6).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        out.push(
            Field::from_fn(g, |p| {
                c.iter()
                    .enumerate()
                    .map(|(k, (a, b))| (a * ((k + 1) as f64 * p[0]).cos() + b * ((k + 1) as f64 * p[0]).sin()) / (k + 1) as f64)
                    .sum()
            })
            .unwrap(),
        );
    }
    out
}

#[test]
fn besov_and_slobodeckij_norms_are_equivalent_on_a_corpus() {
    let fields = corpus(512);
    assert_eq!(fields.len(), 20);
    for s in [0.3, 0.6] {
        let ratios: Vec<f64> = fields
            .iter()
            .map(|u| {
                let slob = u.lp_norm_pow(2.0) + slobodeckij_seminorm(u, s, 2.0).unwrap();
                slob / besov_profile_auto(u, 2.0).unwrap().besov_norm_pow(s)
            })
            .collect();
        let gm = (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp();
        for (i, r) in ratios.iter().enumerate() {
            assert!(r / gm >= 0.25 && r / gm <= 4.0, "s = {s}, field {i}: {r} (centre {gm}) {ratios:?}");
        }
    }
}

// ---------------------------------------------------------------- symbols

#[test]
fn symbol_examples() {
    let pme = SymbolDescriptor::Pme { m: 2.0, dim: 1 };
    assert_eq!(symbol_eval(&pme, 0.0, &[0.0], 0.7).norm(), 0.0);
    let z = symbol_eval(&pme, 3.0, &[2.0], 1.0);
    assert!((z.re - 8.0).abs() < 1e-14 && (z.im - 3.0).abs() < 1e-14);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let m: f64 = rng.gen_range(1.1..4.0);
        let d = SymbolDescriptor::Pme { m, dim: 2 };
        let (t, x, y, v): (f64, f64, f64, f64) = (
            rng.gen_range(-50.0..50.0),
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-3.0..3.0),
        );
        let z = symbol_eval(&d, t, &[x, y], v);
        let par = m * v.abs().powf(m - 1.0) * (x * x + y * y);
        assert!(z.re >= 0.0);
        assert!(z.norm() >= par * (1.0 - 1e-14));
    }

    let an = SymbolDescriptor::Anisotropic { m: vec![2.0, 3.0], n: vec![2.0, 3.0] };
    let z = symbol_eval(&an, 1.0, &[1.0, 2.0], 0.5);
    // iτ + i(2·0.5·1 + 3·0.25·2) + (2·0.5·1 + 3·0.25·4)
    assert!((z.im - (1.0 + 1.0 + 1.5)).abs() < 1e-14);
    assert!((z.re - (1.0 + 3.0)).abs() < 1e-14);
    assert!(SymbolDescriptor::Pme { m: 1.0, dim: 1 }.validate().is_err());
    assert!(SymbolDescriptor::Heat { dim: 3, kappa: 1.0 }.validate().is_err());
}

#[test]
fn beta_is_an_antiderivative_of_sigma() {
    let d = SymbolDescriptor::Pme { m: 2.5, dim: 1 };
    for i in 1..20 {
        let v = -2.0 + 0.2 * i as f64;
        let e = 1e-6;
        let num = (d.beta(v + e)[0] - d.beta(v - e)[0]) / (2.0 * e);
        // at v = 0 the difference quotient only sees e^{(m−1)/2}
        let tol = if v.abs() < 1e-9 { 1e-3 } else { 1e-6 };
        assert!((num - d.sigma(v)[0]).abs() < tol, "v = {v}");
    }
}

fn iv() -> VInterval {
    VInterval::new(-1.0, 1.0).unwrap()
}

#[test]
fn omega_closed_form_at_tau_zero() {
    let o = ScanOptions::default();
    for m in [1.5, 2.0, 3.0] {
        let d = SymbolDescriptor::Pme { m, dim: 1 };
        for (j, delta) in [(4.0, 1.0), (8.0, 2.0), (16.0, 4.0)] {
            let want = 2.0 * (delta / (m * j * j)).powf(1.0 / (m - 1.0));
            let got = omega_slice(&d, 0.0, &[j], delta, &iv(), &o);
            assert!((got / want - 1.0).abs() < 0.01, "m = {m}: {got} vs {want}");
        }
    }
}

#[test]
fn omega_saturates() {
    let o = ScanOptions::default();
    let m = 2.0;
    let j: f64 = 4.0;
    let d = SymbolDescriptor::Pme { m, dim: 1 };
    let delta = 1.01 * m * (2.0 * j).powi(2);
    let w = nondegeneracy_measure(&d, j, delta, &iv(), &o).unwrap();
    assert!((w - 2.0).abs() < 1e-12, "{w}");
}

#[test]
fn omega_monotone_in_delta_and_j() {
    let o = ScanOptions::default();
    let d = SymbolDescriptor::Pme { m: 2.0, dim: 1 };
    let mut prev_row: Option<Vec<f64>> = None;
    for j in [2.0, 4.0, 8.0, 16.0] {
        let row: Vec<f64> = [0.5, 1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&dl| nondegeneracy_measure(&d, j, dl, &iv(), &o).unwrap())
            .collect();
        assert!(row.windows(2).all(|w| w[1] >= w[0]));
        if let Some(p) = prev_row {
            assert!(row.iter().zip(&p).all(|(a, b)| a <= b));
        }
        prev_row = Some(row);
    }
}

#[test]
fn nondegeneracy_exponents_for_pme() {
    let o = ScanOptions::default();
    let js = [4.0, 4.0 * 2f64.sqrt(), 8.0];
    let ds = [1.0, 2.0, 4.0];
    for m in [1.5, 2.0, 3.0] {
        let d = SymbolDescriptor::Pme { m, dim: 1 };
        let f = nondegeneracy_fit(&d, &js, &ds, 0.9, &iv(), &o).unwrap();
        assert!((f.alpha * (m - 1.0) - 1.0).abs() < 0.05, "m = {m}: {f:?}");
        assert!((f.beta / 2.0 - 1.0).abs() < 0.05, "m = {m}: {f:?}");
        let lam = aniso_lambda(&[m], &[m], 0.9).unwrap();
        assert!((f.lambda / lam - 1.0).abs() < 0.1, "m = {m}: {} vs {lam}", f.lambda);
    }
}

#[test]
fn dv_bound_examples() {
    let o = ScanOptions::default();
    let d = SymbolDescriptor::Pme { m: 2.0, dim: 1 };
    for delta in [1.0, 2.0, 4.0] {
        let b = dv_symbol_bound(&d, 8.0, delta, 1.0, &iv(), &o).unwrap();
        // |∂_v 𝓛||v| = 2|v||ξ|² = Re 𝓛 ≤ δ
        assert!((b / delta - 1.0).abs() < 1e-6, "{b} vs {delta}");
    }
    let heat = SymbolDescriptor::Heat { dim: 1, kappa: 1.0 };
    assert_eq!(dv_symbol_bound(&heat, 8.0, 1.0, 0.5, &iv(), &o).unwrap(), 0.0);
}

#[test]
fn anisotropic_dv_exponent_respects_the_bound() {
    let o = ScanOptions {
        n_v: 201,
        n_tau: 6,
        n_cancel: 8,
        n_radii: 3,
        n_angles: 8,
        ..ScanOptions::default()
    };
    let d = SymbolDescriptor::Anisotropic { m: vec![2.0, 3.0], n: vec![2.0, 3.0] };
    let f = nondegeneracy_fit(&d, &[4.0, 8.0], &[1.0, 2.0, 4.0], 0.9, &iv(), &o).unwrap();
    assert!((f.alpha - 0.5).abs() < 0.05, "{f:?}");
    assert!((f.beta - 2.0).abs() < 0.1, "{f:?}");
    // the closed-form λ is an upper bound, not attained by the sampled sup
    let lam = aniso_lambda(&[2.0, 3.0], &[2.0, 3.0], 0.9).unwrap();
    assert!((lam - 1.1).abs() < 1e-12);
    assert!(f.lambda <= lam, "{f:?}");
}

// ---------------------------------------------------------------- exponents

#[test]
fn exponent_algebra() {
    for m in [1.25, 1.5, 2.0, 3.0] {
        let e = averaging_exponents(&ExponentInputs::pme_limit(m).unwrap()).unwrap();
        assert!((e.theta - 1.0 / m).abs() < 1e-12);
        assert!((e.s_star - 2.0 / m).abs() < 1e-12);
        assert!((e.p_star - m).abs() < 1e-12);
    }
    let e = averaging_exponents(&ExponentInputs::pme_limit(1.5).unwrap()).unwrap();
    assert!((e.theta - 2.0 / 3.0).abs() < 1e-12 && (e.s_star - 4.0 / 3.0).abs() < 1e-12);
    let a = averaging_exponents(&ExponentInputs::anderson(1.5).unwrap()).unwrap();
    assert!((a.s_star - 1.0).abs() < 1e-12);

    let p = parabolic_integrability(1.0 / (3.0 - 1.0)).unwrap();
    assert!((p - 1.5).abs() < 1e-12);
    let m = 2.0;
    assert!((parabolic_integrability(1.0 / (m - 1.0)).unwrap() - 2.0 * m / (m + 1.0)).abs() < 1e-12);

    let (s, p) = aniso_exponents(&[2.0, 3.0], &[2.0, 3.0]).unwrap();
    assert!((s - 1.0 / 3.0).abs() < 1e-12 && (p - 1.5).abs() < 1e-12);
    for m0 in [1.5, 2.0, 4.0] {
        let (s, p) = aniso_exponents(&[m0, m0], &[m0, m0]).unwrap();
        assert!((s - 2.0 / m0).abs() < 1e-12 && (p - 2.0 * m0 / (m0 + 1.0)).abs() < 1e-12);
    }
    let (s, _) = aniso_exponents(&[2.0, 2.0], &[5.0, 5.0]).unwrap();
    assert!((s - 1.0).abs() < 1e-12);
    assert!(aniso_exponents(&[1.0, 1.0], &[1.0, 1.0]).is_err());

    let mut bad = ExponentInputs::pme_limit(2.0).unwrap();
    bad.mu = 1.5;
    assert!(averaging_exponents(&bad).is_err());
    let mut bad = ExponentInputs::pme_limit(2.0).unwrap();
    bad.q = 2.0;
    bad.p = 1.5;
    assert!(averaging_exponents(&bad).is_err());

    let t = exponent_table(&[1.25, 1.5, 2.0, 3.0]).unwrap();
    for r in &t {
        assert!((r.s_star - 2.0 / r.m).abs() < 1e-12 && (r.p_star - r.m).abs() < 1e-12);
        assert_eq!(r.s_energy, 2.0 / (r.m + 1.0));
    }
}

proptest! {
    #[test]
    fn exponent_monotonicity(m in 1.1f64..4.0, l1 in 0.0f64..2.0, dl in 0.0f64..2.0, e1 in 0.0f64..1.0, de in 0.0f64..1.0,
                             q in 1.0f64..2.0, p1 in 2.0f64..10.0, dp in 0.0f64..10.0) {
        let base = ExponentInputs { q, p: p1, r: 1.0, ..ExponentInputs::pme_limit(m).unwrap() };
        // the interpolation is only meaningful for θ ≤ 1
        prop_assume!(averaging_exponents(&base).unwrap().theta <= 1.0);
        let a = averaging_exponents(&ExponentInputs { lambda: l1, eta: e1, ..base }).unwrap();
        let b = averaging_exponents(&ExponentInputs { lambda: l1 + dl, eta: e1, ..base }).unwrap();
        let c = averaging_exponents(&ExponentInputs { lambda: l1, eta: e1 + de, ..base }).unwrap();
        prop_assert!(b.s_star <= a.s_star + 1e-12);
        prop_assert!(c.s_star <= a.s_star + 1e-12);
        let d = averaging_exponents(&ExponentInputs { p: p1 + dp, ..base }).unwrap();
        let e = averaging_exponents(&ExponentInputs { p: p1, ..base }).unwrap();
        prop_assert!(d.p_star >= e.p_star - 1e-12);
    }
}

// ------------------------------------------------------- micro-local tools

fn x_constant_slices(nt: usize, period: f64, modes: &[i64]) -> SpaceTimeSlices {
    let g = Grid::periodic(1, 8, 1.0).unwrap();
    let mut data = vec![0.0; nt * 8];
    for k in 0..nt {
        let t = period * k as f64 / nt as f64;
        let s: f64 = modes.iter().map(|&q| (2.0 * PI * q as f64 * t / period).cos()).sum();
        for i in 0..8 {
            data[k * 8 + i] = s;
        }
    }
    SpaceTimeSlices::new(g, nt, period, vec![0.5], vec![data]).unwrap()
}

#[test]
fn huge_threshold_is_the_identity() {
    let f = x_constant_slices(32, 1.0, &[1, 3, 7]);
    let d = SymbolDescriptor::Pme { m: 2.0, dim: 1 };
    let (out, skipped) = truncation_multiplier(&f, &d, Cutoff::Ball, 1e12, 0).unwrap();
    assert_eq!(skipped, 0);
    assert!(out.max_diff(&f) < 1e-12);
    let dec = microlocal_decompose(&f, &d, 1e12, 3, &[1.0]).unwrap();
    assert!(dec.f0.max_diff(&f) < 1e-12);
    assert!(dec.shells.iter().all(|s| s.max_abs() < 1e-12));
}

#[test]
fn time_content_band_without_diffusion() {
    // b ≡ 0: 𝓛 = iτ, so ψ₀(𝓛/δ) keeps |τ| ≤ δ and removes |τ| ≥ 2δ
    let period = 1.0;
    let d = SymbolDescriptor::Heat { dim: 1, kappa: 0.0 };
    let delta = 2.0 * PI * 4.0;
    let f = x_constant_slices(64, period, &[2, 12]);
    let (out, _) = truncation_multiplier(&f, &d, Cutoff::Ball, delta, 0).unwrap();
    let want = x_constant_slices(64, period, &[2]);
    assert!(out.max_diff(&want) < 1e-12);
}

#[test]
fn applying_the_ball_twice_differs_only_on_the_transition() {
    let d = SymbolDescriptor::Heat { dim: 1, kappa: 0.0 };
    let delta = 2.0 * PI * 4.0;
    // modes inside (|τ| ≤ δ), outside (≥ 2δ) and on the transition band
    for (mode, changes) in [(2, false), (12, false), (6, true)] {
        let f = x_constant_slices(64, 1.0, &[mode]);
        let (once, _) = truncation_multiplier(&f, &d, Cutoff::Ball, delta, 0).unwrap();
        let (twice, _) = truncation_multiplier(&once, &d, Cutoff::Ball, delta, 0).unwrap();
        assert_eq!(once.max_diff(&twice) > 1e-12, changes, "mode {mode}");
    }
}

#[test]
fn divided_cutoff_skips_the_zero_symbol() {
    let d = SymbolDescriptor::Heat { dim: 1, kappa: 0.0 };
    let f = x_constant_slices(16, 1.0, &[0, 1]);
    let (_, skipped) = truncation_multiplier(&f, &d, Cutoff::DividedBall, 10.0, 0).unwrap();
    // τ = 0 with any ξ: 𝓛 = 0 at every spatial frequency
    assert_eq!(skipped, 8);
    let (_, none) = truncation_multiplier(&f, &d, Cutoff::DividedAnnulus, 10.0, 0).unwrap();
    assert_eq!(none, 0);
}

#[test]
fn single_mode_band_membership() {
    // heat symbol on cos(τt + ξx): |𝓛| = |iτ + ξ²| is known by hand
    let g = Grid::periodic(1, 16, 2.0 * PI).unwrap();
    let nt = 16;
    let period = 2.0 * PI;
    let (kt, kx): (f64, f64) = (3.0, 2.0);
    let mut data = vec![0.0; nt * 16];
    for k in 0..nt {
        let t = period * k as f64 / nt as f64;
        for i in 0..16 {
            data[k * 16 + i] = (kt * t + kx * g.coord(i)).cos();
        }
    }
    let f = SpaceTimeSlices::new(g, nt, period, vec![0.0], vec![data]).unwrap();
    let d = SymbolDescriptor::Heat { dim: 1, kappa: 1.0 };
    let modulus = (kt * kt + kx.powi(4)).sqrt(); // 5
    let delta = 1.0;
    let dec = microlocal_decompose(&f, &d, delta, 4, &[1.0]).unwrap();
    let part = DyadicPartition::for_grid(&Grid::periodic(1, 64, 1.0).unwrap());
    let pieces: Vec<&SpaceTimeSlices> = std::iter::once(&dec.f0).chain(&dec.shells).collect();
    for (k, piece) in pieces.iter().enumerate() {
        let w = part.weight(k, modulus / delta);
        assert!((piece.max_abs() - w).abs() < 1e-12, "piece {k}: {} vs {w}", piece.max_abs());
    }
    // |𝓛|/δ = 5 lies in the blocks around 2² and 2³
    assert!(dec.shells[1].max_abs() > 0.0 && dec.shells[2].max_abs() > 0.0);
    assert!(dec.f0.max_abs() < 1e-15 && dec.shells[0].max_abs() < 1e-15);
    assert!(dec.reconstruction_error < 1e-12);
    assert!(dec.tail.max_abs() < 1e-12);
}

#[test]
fn barenblatt_kinetic_data_reconstructs() {
    let bb = BarenblattParams::new(2.0, 1, 1.0, 1.0).unwrap();
    let g = Grid::periodic(1, 1 << 8, 16.0).unwrap();
    let u0 = barenblatt_field(&bb, &g, 0.0).unwrap();
    let nt = 1 << 7;
    let t_end = 0.5;
    let tr = solve_pme(&PmeProblem::new(2.0, u0, t_end), SnapshotStride::Every(t_end / nt as f64)).unwrap();
    let vg = VGrid::covering(tr.max_abs(), 33, 0.05).unwrap();
    let f = kinetic_space_time(&tr, &vg, nt).unwrap();
    let d = SymbolDescriptor::Pme { m: 2.0, dim: 1 };
    let dv = vec![vg.dv(); vg.n_v()];
    let dec = microlocal_decompose(&f, &d, 1.0, 12, &dv).unwrap();
    assert!(dec.reconstruction_error < 1e-8, "{}", dec.reconstruction_error);
    assert_eq!(dec.profiles.len(), 14);
    assert!(!dec.tail_dominates, "{}", dec.tail_fraction);
    let short = microlocal_decompose(&f, &d, 1.0, 2, &dv).unwrap();
    assert!(short.reconstruction_error < 1e-8);
    assert!(short.tail_dominates, "{}", short.tail_fraction);
}
