use pmelab_core::exact::{barenblatt_field, BarenblattParams};
use pmelab_core::solvers::*;
use pmelab_core::spectral::{besov_profile, fit::least_squares_slope};
use pmelab_core::{make_partition, Error, Field, Grid};

fn l1(a: &Field, b: &Field) -> f64 {
    a.sub(b).unwrap().lp_norm(1.0)
}

#[test]
fn constants_are_steady() {
    let g = Grid::periodic(1, 64, 1.0).unwrap();
    let u0 = Field::constant(g, 0.7).unwrap();
    let tr = solve_pme(&PmeProblem::new(2.0, u0.clone(), 0.3), SnapshotStride::Steps(50)).unwrap();
    for s in tr.snapshots() {
        assert_eq!(s, &u0);
    }
    assert_eq!(tr.t_end(), 0.3);
}

#[test]
fn steady_source_mass_balance() {
    let g = Grid::periodic(1, 256, 4.0).unwrap();
    let u0 = Field::from_fn(g, |p| (-(p[0] * p[0])).exp()).unwrap();
    let s = Field::from_fn(g, |p| 0.3 * (3.0 * p[0]).cos().powi(2)).unwrap();
    let t_end = 0.5;
    let pb = PmeProblem::new(2.0, u0.clone(), t_end)
        .with_force(Forcing::Steady(s.clone()))
        .with_viscosity(1e-3);
    let tr = solve_pme(&pb, SnapshotStride::Every(0.1)).unwrap();
    let gained = tr.last().integral() - u0.integral();
    assert!((gained - t_end * s.integral()).abs() < 1e-10, "{gained}");
    assert_eq!(tr.times().len(), 6);
    assert!((tr.times()[2] - 0.2).abs() < 1e-15);
}

#[test]
fn spike_forcing_mass_balance() {
    let g = Grid::periodic(1, 256, 4.0).unwrap();
    let u0 = Field::zeros(g);
    let train = SpikeTrain::random(&g, 3, 0.1, 0.2, 0.5, 1.0, 9).unwrap();
    let force = Forcing::Spikes(train);
    let pb = PmeProblem::new(2.0, u0, 1.0).with_force(force.clone());
    let tr = solve_pme(&pb, SnapshotStride::Steps(1)).unwrap();
    // left-endpoint sampling makes the discrete balance exact
    let mut expected = 0.0;
    for (k, w) in tr.times().windows(2).enumerate() {
        let s = force.eval(&g, w[0]).unwrap();
        expected += (w[1] - w[0]) * s.integral();
        let got = tr.snapshots()[k + 1].integral();
        assert!((got - expected).abs() < 1e-12);
    }
    assert!((expected - 1.5).abs() < 5e-3, "{expected}");
}

fn barenblatt_error(n: usize) -> f64 {
    let p = BarenblattParams::new(2.0, 1, 1.0, 1.0).unwrap();
    let g = Grid::periodic(1, n, 16.0).unwrap();
    let u0 = barenblatt_field(&p, &g, 0.0).unwrap();
    let t_end = 0.5;
    let tr = solve_pme(&PmeProblem::new(2.0, u0, t_end), SnapshotStride::Every(t_end)).unwrap();
    l1(tr.last(), &barenblatt_field(&p, &g, t_end).unwrap())
}

#[test]
fn barenblatt_convergence() {
    let coarse = barenblatt_error(1 << 10);
    let fine = barenblatt_error(1 << 12);
    assert!(fine <= 1e-2, "{fine}");
    assert!(fine < coarse, "{coarse} -> {fine}");
}

#[test]
fn aniso_without_flux_is_pme() {
    let g = Grid::periodic(1, 128, 8.0).unwrap();
    let u0 = Field::from_fn(g, |p| (1.0 - p[0] * p[0]).max(0.0)).unwrap();
    let a = solve_pme(&PmeProblem::new(2.5, u0.clone(), 0.2), SnapshotStride::Steps(10)).unwrap();
    let b = solve_aniso(&AnisoProblem::new(vec![2.5], None, u0, 0.2), SnapshotStride::Steps(10)).unwrap();
    assert_eq!(a.times(), b.times());
    for (x, y) in a.snapshots().iter().zip(b.snapshots()) {
        assert!(x.sub(y).unwrap().max_abs() <= 1e-12);
    }

    let g2 = Grid::periodic(2, 32, 4.0).unwrap();
    let v0 = Field::from_fn(g2, |p| (1.0 - p[0] * p[0] - p[1] * p[1]).max(0.0)).unwrap();
    let a = solve_pme(&PmeProblem::new(2.0, v0.clone(), 0.1), SnapshotStride::Every(0.1)).unwrap();
    let b = solve_aniso(&AnisoProblem::new(vec![2.0, 2.0], None, v0, 0.1), SnapshotStride::Every(0.1)).unwrap();
    assert!(a.last().sub(b.last()).unwrap().max_abs() <= 1e-12);
}

fn extent(f: &Field, axis: usize) -> f64 {
    let g = f.grid();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, &v) in f.values().iter().enumerate() {
        if v > 1e-8 {
            let x = g.point(i)[axis];
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    hi - lo
}

#[test]
fn anisotropic_spread() {
    let g = Grid::periodic(2, 64, 6.0).unwrap();
    let u0 = Field::from_fn(g, |p| (0.5 - p[0] * p[0] - p[1] * p[1]).max(0.0)).unwrap();
    let pb = AnisoProblem::new(vec![2.0, 3.0], None, u0.clone(), 1.0);
    let tr = solve_aniso(&pb, SnapshotStride::Every(0.25)).unwrap();
    assert!((extent(&u0, 0) - extent(&u0, 1)).abs() < 1e-12);
    for s in &tr.snapshots()[1..] {
        assert!(extent(s, 0) >= extent(s, 1));
    }
    assert!(extent(tr.last(), 0) > extent(tr.last(), 1));
}

#[test]
fn aniso_flux_mass_balance() {
    let g = Grid::periodic(2, 32, 4.0).unwrap();
    let u0 = Field::from_fn(g, |p| (-(p[0] * p[0] + p[1] * p[1])).exp() - 0.2).unwrap();
    let s = Field::from_fn(g, |p| 0.1 * p[0].sin()).unwrap();
    let mut pb = AnisoProblem::new(vec![2.0, 1.5], Some(vec![2.0, 1.0]), u0.clone(), 0.4);
    pb.force = Forcing::Steady(s.clone());
    let tr = solve_aniso(&pb, SnapshotStride::Steps(100)).unwrap();
    let gained = tr.last().integral() - u0.integral();
    assert!((gained - 0.4 * s.integral()).abs() < 1e-12);
    assert!(s.integral().abs() > 1e-3);
}

#[test]
fn anderson_without_noise_matches_dirichlet_pme() {
    let g = Grid::dirichlet(512, 16.0).unwrap();
    let p = BarenblattParams::new(1.5, 1, 1.0, 1.0).unwrap();
    let u0 = barenblatt_field(&p, &g, 0.0).unwrap();
    let noise = Field::zeros(noise_grid(&g).unwrap());
    let t_end = 0.2;
    let run = solve_anderson(&AndersonProblem::new(1.5, u0.clone(), noise, 0.1, t_end), SnapshotStride::Every(0.1)).unwrap();
    let pme = solve_pme(&PmeProblem::new(1.5, u0, t_end), SnapshotStride::Every(0.1)).unwrap();
    assert!(p.support_radius(t_end) < 8.0);
    assert!(run.trajectory.last().sub(pme.last()).unwrap().max_abs() <= 1e-8);
    assert_eq!(run.trajectory.last().values()[0], 0.0);
}

#[test]
fn anderson_zero_data_stays_zero() {
    let g = Grid::dirichlet(128, 2.0).unwrap();
    let noise = sample_white_noise(&g, 3).unwrap();
    let run = solve_anderson(&AndersonProblem::new(1.5, Field::zeros(g), noise, 0.05, 0.1), SnapshotStride::Steps(20)).unwrap();
    for s in run.trajectory.snapshots() {
        assert_eq!(s.max_abs(), 0.0);
    }
    assert!(run.potential_sup > 0.0 && run.potential_besov > 0.0);
}

#[test]
fn anderson_rejects_bad_inputs() {
    let g = Grid::dirichlet(64, 1.0).unwrap();
    let noise = sample_white_noise(&g, 3).unwrap();
    let u0 = Field::from_fn(g, |p| (p[0] * (1.0 - p[0])).max(0.0)).unwrap();
    let bad_m = AndersonProblem::new(2.5, u0.clone(), noise.clone(), 0.1, 1.0);
    assert!(matches!(solve_anderson(&bad_m, SnapshotStride::Steps(1)), Err(Error::InvalidArgument(_))));
    let neg = AndersonProblem::new(1.5, u0.scale(-1.0).unwrap(), noise, 0.1, 1.0);
    assert!(solve_anderson(&neg, SnapshotStride::Steps(1)).is_err());
}

#[test]
fn contraction_and_comparison() {
    let g = Grid::periodic(1, 256, 8.0).unwrap();
    let u0 = Field::from_fn(g, |p| (1.0 - p[0] * p[0]).max(0.0)).unwrap();
    let pb = PmeProblem::new(2.0, u0.clone(), 0.5);
    let same = l1_contraction_check(&pb, &u0, &u0).unwrap();
    assert_eq!(same.sup_distance, 0.0);

    let lower = Field::from_fn(g, |p| 0.8 * (1.0 - p[0] * p[0]).max(0.0)).unwrap();
    let rep = l1_contraction_check(&pb, &u0, &lower).unwrap();
    assert_eq!(rep.order_preserved, Some(true));
    assert!(rep.sup_distance <= rep.initial_distance * (1.0 + 1e-12));
}

#[test]
fn contraction_under_random_perturbation() {
    use rand::{Rng, SeedableRng};
    let n = 1 << 12;
    let g = Grid::periodic(1, n, 8.0).unwrap();
    let u0 = Field::from_fn(g, |p| (1.0 - p[0] * p[0]).max(0.0)).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let pert: Vec<f64> = u0.values().iter().map(|v| v + 1e-3 * rng.gen_range(-1.0..1.0)).collect();
    let ub = Field::new(g, pert).unwrap();
    let pb = PmeProblem::new(2.0, u0.clone(), 0.02);
    let rep = l1_contraction_check(&pb, &u0, &ub).unwrap();
    let delta = rep.initial_distance;
    assert!(rep.sup_distance <= delta * (1.0 + 1e-2), "{rep:?}");
}

#[test]
fn vanishing_viscosity_ladder() {
    let g = Grid::periodic(1, 256, 8.0).unwrap();
    let u0 = Field::from_fn(g, |p| (1.0 - p[0] * p[0]).max(0.0)).unwrap();
    let run = |eps: f64| {
        let pb = PmeProblem::new(2.0, u0.clone(), 0.5).with_viscosity(eps);
        solve_pme(&pb, SnapshotStride::Every(0.5)).unwrap().last().clone()
    };
    let base = run(0.0);
    let d2 = l1(&run(1e-2), &base);
    let d3 = l1(&run(1e-3), &base);
    assert!(d3 < d2 && d2 > 0.0, "{d2} {d3}");
}

#[test]
fn blow_up_is_reported() {
    let g = Grid::periodic(1, 32, 1.0).unwrap();
    let u0 = Field::constant(g, 1.0).unwrap();
    let mut pb = PmeProblem::new(2.0, u0, 1.0).with_force(Forcing::Steady(Field::constant(g, 10.0).unwrap()));
    pb.blowup_cap = Some(5.0);
    match solve_pme(&pb, SnapshotStride::Steps(1)) {
        Err(Error::BlowUp { max_abs, cap, .. }) => assert!(max_abs > cap),
        other => panic!("expected blow-up, got {other:?}"),
    }
}

#[test]
fn invalid_problems_rejected() {
    let g = Grid::periodic(1, 32, 1.0).unwrap();
    let u0 = Field::constant(g, 1.0).unwrap();
    assert!(solve_pme(&PmeProblem::new(1.0, u0.clone(), 1.0), SnapshotStride::Steps(1)).is_err());
    assert!(solve_pme(&PmeProblem::new(2.0, u0.clone(), -1.0), SnapshotStride::Steps(1)).is_err());
    assert!(solve_pme(&PmeProblem::new(2.0, u0.clone(), 1.0).with_viscosity(-1.0), SnapshotStride::Steps(1)).is_err());
    let mut pb = PmeProblem::new(2.0, u0.clone(), 1.0);
    pb.cfl_safety = 1.0;
    assert!(solve_pme(&pb, SnapshotStride::Steps(1)).is_err());
    assert!(solve_aniso(&AnisoProblem::new(vec![1.0], None, u0, 1.0), SnapshotStride::Steps(1)).is_err());
}

#[test]
fn trajectory_roundtrip() {
    let g = Grid::periodic(1, 64, 2.0).unwrap();
    let u0 = Field::from_fn(g, |p| p[0].cos() + 1.5).unwrap();
    let tr = solve_pme(&PmeProblem::new(2.0, u0, 0.1), SnapshotStride::Every(0.05)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    tr.save(dir.path()).unwrap();
    let back = Trajectory::load(dir.path()).unwrap();
    assert_eq!(back.times(), tr.times());
    assert_eq!(back.snapshots(), tr.snapshots());
    assert_eq!(back.scheme.steps, tr.scheme.steps);
    assert_eq!(back.scheme.kind, SchemeKind::Pme);
}

#[test]
fn deterministic_runs() {
    let g = Grid::dirichlet(128, 2.0).unwrap();
    let make = || {
        let noise = sample_white_noise(&g, 42).unwrap();
        let u0 = Field::from_fn(g, |p| (p[0] * (2.0 - p[0])).max(0.0)).unwrap();
        solve_anderson(&AndersonProblem::new(1.5, u0, noise, 0.05, 0.05), SnapshotStride::Steps(10)).unwrap()
    };
    let (a, b) = (make(), make());
    assert_eq!(a.trajectory.snapshots(), b.trajectory.snapshots());
    assert_eq!(a.trajectory.scheme.dt_history, b.trajectory.scheme.dt_history);
}

#[test]
fn white_noise_pairing_variance() {
    let g = Grid::periodic(1, 128, 2.0).unwrap();
    let h = g.spacing();
    let test: Vec<f64> = (0..g.n()).map(|i| (-(g.coord(i) * 3.0).powi(2)).exp()).collect();
    let norm2: f64 = test.iter().map(|v| v * v).sum::<f64>() * h;
    let seeds = 10_000;
    let mut acc = Vec::with_capacity(seeds);
    for seed in 0..seeds as u64 {
        let w = sample_white_noise(&g, seed).unwrap();
        acc.push(w.values().iter().zip(&test).map(|(a, b)| a * b).sum::<f64>() * h);
    }
    let mean = acc.iter().sum::<f64>() / seeds as f64;
    let var = acc.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (seeds - 1) as f64;
    assert!((var / norm2 - 1.0).abs() < 0.05, "{var} vs {norm2}");
}

#[test]
fn white_noise_node_mean() {
    let g = Grid::periodic(1, 4096, 1.0).unwrap();
    let w = sample_white_noise(&g, 5).unwrap();
    let n = g.n() as f64;
    // node values have standard deviation h^{-1/2}
    let se = g.spacing().powf(-0.5) / n.sqrt();
    let mean = w.values().iter().sum::<f64>() / n;
    assert!(mean.abs() <= 3.0 * se, "{mean} > 3·{se}");
}

#[test]
fn mollified_noise_block_growth() {
    let g = Grid::periodic(1, 1 << 12, 1.0).unwrap();
    let part = make_partition(12).unwrap();
    let level = 0.99 / (2.0 * std::f64::consts::PI * 2f64.powi(10));
    let samples = 40;
    let mut mean = [0.0; 13];
    for seed in 0..samples {
        let s = mollify_noise(&sample_white_noise(&g, seed).unwrap(), level).unwrap();
        let prof = besov_profile(&s, f64::INFINITY, &part).unwrap();
        for (j, b) in prof.entries {
            mean[j] += b.log2() / samples as f64;
        }
    }
    let pts: Vec<(f64, f64)> = (3..=9).map(|j| (j as f64, mean[j])).collect();
    let (slope, _) = least_squares_slope(&pts);
    assert!((slope - 0.5).abs() <= 0.15, "slope {slope}");
    assert!(mean[12] < -20.0, "blocks above the cut must vanish");
}
