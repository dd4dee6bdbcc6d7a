use std::f64::consts::PI;

use fredkin_core::channels::{
    dephased_fredkin_mc, lambda_from_physical, lossy_fredkin_channel, to_db, Channel, DephasedFredkin,
};
use fredkin_core::correction::{fit_series, p_ec_closed, p_noec_closed, SERIES_GRID};
use fredkin_core::gates::{beamsplitter_unitary, fredkin_unitary, kerr_unitary};
use fredkin_core::linalg::max_abs_diff;
use fredkin_core::machine::{DephasingBackend, MachineConfig};
use fredkin_core::sweep::{sweep, Grid, Strategy, SweepParameter};
use fredkin_core::{DensityOperator, FockSpace, FredkinModes, LossPlacement};

use crate::table::{Cell, Table};
use crate::{Failure, Report};

pub const DEFAULT_SEED: u64 = 1;

const TRUTH_INPUTS: [&str; 5] = ["000", "100", "010", "101", "011"];

fn gate_space() -> FockSpace {
    FockSpace::new(3, 1).expect("three modes")
}

fn abc() -> FredkinModes {
    FredkinModes::new(0, 1, 2)
}

pub fn truthtable() -> Result<Report, Failure> {
    let s = gate_space();
    let f = fredkin_unitary(&s, abc())?;
    let b = beamsplitter_unitary(&s, 0, 1)?;
    let k = kerr_unitary(&s, 1, 2, PI)?;
    let direct = b.matrix().adjoint() * k.matrix() * b.matrix();
    let expected = [("000", "000"), ("100", "100"), ("010", "010"), ("101", "011"), ("011", "101")];

    let mut report = Report::new(Table::new(&["input", "output", "amplitude_re", "amplitude_im", "matches"]));
    report.check("composition", max_abs_diff(f.matrix(), &direct) <= 1e-12);
    for j in 0..s.dim() {
        let col = f.matrix().column(j);
        let (i, amp) = col
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
            .map(|(i, z)| (i, *z))
            .expect("nonempty column");
        let input = s.occupation_of(j)?.to_string();
        let output = s.occupation_of(i)?.to_string();
        let single = (amp.norm() - 1.0).abs() <= 1e-12
            && col.iter().enumerate().all(|(r, z)| r == i || z.norm() <= 1e-12);
        let listed = match expected.iter().find(|(x, _)| *x == input) {
            Some((_, y)) => *y == output && (amp.re - 1.0).abs() <= 1e-12 && amp.im.abs() <= 1e-12,
            None => true,
        };
        let ok = single && listed;
        report.check(format!("row {input}"), ok);
        report.table.push(vec![
            Cell::from(input),
            Cell::from(output),
            Cell::from(amp.re),
            Cell::from(amp.im),
            Cell::from(ok),
        ]);
    }
    Ok(report)
}

pub fn lossy_gate(gamma: f64, placement: LossPlacement, input: &str) -> Result<Report, Failure> {
    let s = gate_space();
    let ch = lossy_fredkin_channel(&s, abc(), gamma, placement)?;
    let out = ch.apply(&DensityOperator::from_label(s, input)?)?;
    let mut report = Report::new(Table::new(&["row", "col", "re", "im"]));
    let m = out.matrix();
    for i in 0..s.dim() {
        for j in 0..s.dim() {
            if m[(i, j)].norm() > 1e-15 {
                report.table.push(vec![
                    Cell::from(s.occupation_of(i)?.to_string()),
                    Cell::from(s.occupation_of(j)?.to_string()),
                    Cell::from(m[(i, j)].re),
                    Cell::from(m[(i, j)].im),
                ]);
            }
        }
    }
    report.check("trace preserving", ch.trace_preservation_defect() <= 1e-10);
    report.check("unit trace", (out.trace() - 1.0).abs() <= 1e-12);
    report.check("valid state", out.diagnostics().is_valid());
    Ok(report)
}

pub fn sweep_loss(grid: &Grid, placement: LossPlacement) -> Result<Report, Failure> {
    let points = grid.points()?;
    let lossy = MachineConfig { loss_placement: placement, ..MachineConfig::lossy(1, 0.0) };
    let balanced = MachineConfig { loss_placement: placement, ..MachineConfig::balanced(1, 0.0) };
    let main = sweep(&lossy, SweepParameter::Gamma, &points, &[Strategy::Plain, Strategy::DualRail])?;
    let bal = sweep(&balanced, SweepParameter::Gamma, &points, &[Strategy::DualRail])?;

    let mut report = Report::new(Table::new(&[
        "gamma",
        "loss_db",
        "p_noec_sim",
        "p_noec_closed",
        "p_ec_sim",
        "p_ec_closed",
        "p_balanced_ec",
    ]));
    let (mut worst_noec, mut worst_ec, mut worst_bal) = (0.0f64, 0.0f64, 0.0f64);
    for (r, b) in main.iter().zip(&bal) {
        let g = r.value;
        let noec = r.outcomes[0].p_error;
        let ec = r.outcomes[1].p_error;
        let pb = b.outcomes[0].p_error;
        worst_noec = worst_noec.max((noec - p_noec_closed(g)).abs());
        worst_ec = worst_ec.max((ec - p_ec_closed(g)).abs());
        worst_bal = worst_bal.max(pb);
        report.table.push(vec![
            Cell::from(g),
            Cell::from(to_db(g)),
            Cell::from(noec),
            Cell::from(p_noec_closed(g)),
            Cell::from(ec),
            Cell::from(p_ec_closed(g)),
            Cell::from(pb),
        ]);
    }
    report.note(format!("max |p_noec_sim - p_noec_closed| = {worst_noec:.3e}"));
    report.note(format!("max |p_ec_sim - p_ec_closed| = {worst_ec:.3e}"));
    report.note(format!("max p_balanced_ec = {worst_bal:.3e}"));
    report.check("no-correction error matches closed form", worst_noec <= 1e-10);
    report.check("dual-rail error matches closed form", worst_ec <= 1e-10);
    report.check("balanced post-selected error vanishes", worst_bal <= 1e-12);
    Ok(report)
}

pub fn sweep_dephasing(grid: &Grid, samples: Option<usize>, seed: u64, ec_after_both: bool) -> Result<Report, Failure> {
    let points = grid.points()?;
    let backend = match samples {
        Some(samples) => DephasingBackend::MonteCarlo { samples, seed },
        None => DephasingBackend::Analytic,
    };
    let template = MachineConfig { dephasing_backend: backend, ..MachineConfig::dephased(1, 0.0) };
    let projective = if ec_after_both { Strategy::ProjectiveTwice } else { Strategy::Projective };
    let recs = sweep(&template, SweepParameter::Lambda, &points, &[Strategy::Plain, projective])?;

    let mut report = Report::new(Table::new(&["lambda", "damping_db", "p_plain", "p_projective", "p_accept_projective"]));
    let mut worst_plain = 0.0f64;
    let mut not_below_small = Vec::new();
    let mut not_below = Vec::new();
    for r in &recs {
        let l = r.value;
        let (plain, proj) = (&r.outcomes[0], &r.outcomes[1]);
        worst_plain = worst_plain.max((plain.p_error - (1.0 - (-2.0 * l).exp()) / 2.0).abs());
        if l > 0.0 && proj.p_error >= plain.p_error {
            if l <= 0.1 {
                not_below_small.push(l);
            }
            if l <= 0.5 {
                not_below.push(l);
            }
        }
        report.table.push(vec![
            Cell::from(l),
            Cell::from(to_db(l)),
            Cell::from(plain.p_error),
            Cell::from(proj.p_error),
            Cell::from(proj.p_accept),
        ]);
    }
    if samples.is_none() {
        report.note(format!("max |p_plain - (1 - e^(-2 lambda))/2| = {worst_plain:.3e}"));
        report.check("uncorrected error matches closed form", worst_plain <= 1e-10);
    }
    if !not_below.is_empty() {
        report.note(format!("projective not below plain at lambda <= 0.5: {not_below:?}"));
    }
    report.check("projective below plain for lambda <= 0.1", not_below_small.is_empty());

    let series = sweep(
        &MachineConfig::dephased(1, 0.0),
        SweepParameter::Lambda,
        &SERIES_GRID,
        &[Strategy::Plain, projective],
    )?;
    for (k, name, target) in [(0, "plain", (1.0, -1.0)), (1, "projective", (11.0 / 18.0, -47.0 / 162.0))] {
        let pts: Vec<_> = series.iter().map(|r| (r.value, r.outcomes[k].p_error)).collect();
        let fit = fit_series(&pts)?;
        report.note(format!(
            "series {name}: c1 = {:.6} (reference {:.6}), c2 = {:.6} (reference {:.6}), relative residual {:.2e}",
            fit.c1, target.0, fit.c2, target.1, fit.relative_residual
        ));
    }
    Ok(report)
}

/// Largest Monte-Carlo error over the truth-table inputs at each of
/// `n`, `2n`, `4n` samples.
pub fn mc_validate(lambda: f64, samples: usize, seed: u64) -> Result<Report, Failure> {
    let s = gate_space();
    let exact = DephasedFredkin::analytic(&s, abc(), lambda)?;
    let mut report = Report::new(Table::new(&["samples", "input", "max_abs_error", "bound", "pass"]));
    let mut worst = Vec::new();
    for n in [samples, 2 * samples, 4 * samples] {
        let mc = dephased_fredkin_mc(&s, abc(), lambda, n, seed)?;
        let bound = 5.0 / (n as f64).sqrt();
        let mut w = 0.0f64;
        for l in TRUTH_INPUTS {
            let rho = DensityOperator::from_label(s, l)?;
            let err = max_abs_diff(mc.apply(&rho)?.matrix(), exact.apply(&rho)?.matrix());
            w = w.max(err);
            report.check(format!("{l} at n={n}"), err <= bound);
            report.table.push(vec![Cell::from(n), Cell::from(l), Cell::from(err), Cell::from(bound), Cell::from(err <= bound)]);
        }
        worst.push((n, w));
    }
    for pair in worst.windows(2) {
        let ratio = if pair[1].1 > 0.0 { pair[0].1 / pair[1].1 } else { f64::INFINITY };
        report.note(format!("n {} -> {}: error ratio {ratio:.3} (sqrt 2 = 1.414)", pair[0].0, pair[1].0));
    }
    Ok(report)
}

pub fn lambda_physical(omega: f64, intensity: f64) -> Result<Report, Failure> {
    let lambda = lambda_from_physical(omega, intensity)?;
    let mut report = Report::new(Table::new(&["omega", "intensity", "lambda", "damping_db"]));
    report.table.push(vec![Cell::from(omega), Cell::from(intensity), Cell::from(lambda), Cell::from(to_db(lambda))]);
    Ok(report)
}
