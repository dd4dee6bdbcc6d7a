use fredkin_core::correction::{fit_series, p_ec_closed, p_noec_closed, SERIES_GRID};
use fredkin_core::machine::{run, DephasingBackend, MachineConfig, NoiseModel};
use fredkin_core::sweep::{sweep, Grid, Strategy, SweepParameter};

#[test]
fn outcome_distribution_sums_to_one() {
    let configs = [
        MachineConfig::ideal(0),
        MachineConfig::lossy(0, 0.4),
        MachineConfig::lossy(1, 0.4),
        MachineConfig::balanced(1, 0.4),
        MachineConfig::dephased(0, 0.4),
        MachineConfig::dephased(1, 0.4),
    ];
    for cfg in &configs {
        let r = run(cfg).unwrap();
        let total: f64 = r.outcome_distribution.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-10, "{:?}", cfg.noise_model);
        assert!((0.0..=1.0).contains(&r.p_error));
        assert!(r.p_accept > 0.0 && r.p_accept <= 1.0);
        assert!(r.output_state.diagnostics().is_valid());
    }
}

#[test]
fn uncorrected_error_is_monotone() {
    let grid = Grid::default().points().unwrap();
    for (template, param) in [
        (MachineConfig::lossy(1, 0.0), SweepParameter::Gamma),
        (MachineConfig::dephased(1, 0.0), SweepParameter::Lambda),
    ] {
        let recs = sweep(&template, param, &grid, &[Strategy::Plain]).unwrap();
        for w in recs.windows(2) {
            assert!(w[1].outcomes[0].p_error >= w[0].outcomes[0].p_error - 1e-15, "{param} at {}", w[1].value);
        }
    }
}

#[test]
fn loss_sweep_on_default_grid() {
    let grid = Grid::default().points().unwrap();
    let recs = sweep(&MachineConfig::lossy(1, 0.0), SweepParameter::Gamma, &grid, &[Strategy::Plain, Strategy::DualRail]).unwrap();
    for r in recs {
        assert!((r.outcomes[0].p_error - p_noec_closed(r.value)).abs() <= 1e-10);
        assert!((r.outcomes[1].p_error - p_ec_closed(r.value)).abs() <= 1e-10);
    }
}

#[test]
fn uncorrected_dephasing_series() {
    let pts: Vec<_> = SERIES_GRID
        .iter()
        .map(|&l| (l, run(&MachineConfig::dephased(1, l)).unwrap().p_error))
        .collect();
    let fit = fit_series(&pts).unwrap();
    assert!(fit.trusted);
    assert!((fit.c1 - 1.0).abs() < 0.02 && (fit.c2 + 1.0).abs() < 0.05, "{fit:?}");
}

#[test]
fn projective_series_matches_exact_small_lambda_slope() {
    // The slope at the origin of the corrected error is 17/18 under the
    // Gaussian phase model; the grid fit absorbs some curvature.
    let tiny = [1e-5, 2e-5, 3e-5, 4e-5];
    let pts: Vec<_> = tiny
        .iter()
        .map(|&l| (l, run(&MachineConfig { projective_ec: true, ..MachineConfig::dephased(1, l) }).unwrap().p_error))
        .collect();
    let fit = fit_series(&pts).unwrap();
    assert!((fit.c1 - 17.0 / 18.0).abs() < 1e-3, "{fit:?}");
}

#[test]
fn monte_carlo_pipeline_agrees_with_exact() {
    let n = 100_000;
    for k1 in [0, 1] {
        for lambda in [0.05, 0.3] {
            let exact = run(&MachineConfig::dephased(k1, lambda)).unwrap();
            let mc_cfg = MachineConfig {
                dephasing_backend: DephasingBackend::MonteCarlo { samples: n, seed: 77 },
                ..MachineConfig::dephased(k1, lambda)
            };
            let mc = run(&mc_cfg).unwrap();
            let tol = 5.0 / (n as f64).sqrt();
            assert!((mc.p_error - exact.p_error).abs() < tol, "k1={k1} lambda={lambda}");
            for (occ, p) in &exact.outcome_distribution {
                assert!((mc.probability_of(&occ.to_string()) - p).abs() < tol);
            }
            let ec = run(&MachineConfig { projective_ec: true, ..mc_cfg.clone() }).unwrap();
            let ec_exact = run(&MachineConfig { projective_ec: true, ..MachineConfig::dephased(k1, lambda) }).unwrap();
            assert!((ec.p_error - ec_exact.p_error).abs() < tol);
        }
    }
}

#[test]
fn monte_carlo_pipeline_is_reproducible() {
    let cfg = MachineConfig {
        dephasing_backend: DephasingBackend::MonteCarlo { samples: 10_000, seed: 3 },
        ..MachineConfig::dephased(1, 0.2)
    };
    assert_eq!(run(&cfg).unwrap(), run(&cfg).unwrap());
}

#[test]
fn balanced_loss_postselected_across_range() {
    for i in 0..=20 {
        let gamma = 0.1 * i as f64;
        let cfg = MachineConfig { dualrail_postselect: true, ..MachineConfig::balanced(1, gamma) };
        assert!(run(&cfg).unwrap().p_error <= 1e-12, "gamma {gamma}");
    }
}

#[test]
fn loss_in_both_gates_still_corrected_by_balanced_dualrail() {
    let mut cfg = MachineConfig { dualrail_postselect: true, ..MachineConfig::balanced(1, 0.5) };
    cfg.noisy_gates.first = true;
    let r = run(&cfg).unwrap();
    assert_eq!(cfg.noise_model, NoiseModel::BalancedLoss);
    assert!(r.p_error <= 1e-12 && r.p_accept < 1.0);
}
