//! One function per verb; each fills a `Report`.

use std::f64::consts::PI;

use deadcore::balance::{absorption_exponents, balanced_pair, gradient_exponents, select_profile};
use deadcore::barrier::{ode_residual, residual_table, supersolution_check, RadialBarrier};
use deadcore::csv::Table;
use deadcore::error::{Error, Result};
use deadcore::grid::{lipschitz_estimate, rotation_invariance_check, solve, DiscGrid, GridConfig};
use deadcore::liouville::{
    classify, consistency_table, deadcore_consistency, exp_counterexample_point, exp_counterexample_residual,
    ladder_table, osc_criterion, plateau_fraction, threshold, SampleKind, ThresholdCase,
};
use deadcore::model::{validate_admissible, HamiltonianKind, ModelSpec, NonlinearityKind};
use deadcore::radial::{lem_frozen_weight, measure_deadcore_with, ShootOptions, WeightMode};

use crate::config::RunOptions;
use crate::report::Report;

/// Thickness `T` with no radius constraint.
fn free_thickness(spec: &ModelSpec) -> Result<f64> {
    Ok(select_profile(spec, f64::MAX)?.thickness)
}

fn radius(spec: &ModelSpec, opts: &RunOptions) -> Result<f64> {
    match opts.radius {
        Some(r) => Ok(r),
        None => Ok(2.0 * free_thickness(spec)?),
    }
}

pub fn admit(report: &mut Report) {
    let ok = report.admissible == Some(true);
    report.insert("violation_count", report.violations.len());
    report.line(if ok {
        "every structural constraint of the model row holds"
    } else {
        "the spec violates at least one structural constraint"
    });
}

pub fn balance(spec: &ModelSpec, opts: &RunOptions, report: &mut Report) -> Result<()> {
    let (pair, dominant) = balanced_pair(spec)?;
    let r = radius(spec, opts)?;
    let profile = select_profile(spec, r)?;
    report.insert("profile", profile);
    report.insert("dominant", dominant);
    report.insert("source", pair.source);
    report.scalar("p", profile.p);
    report.scalar("tau", profile.tau);
    report.scalar("T", profile.thickness);
    report.scalar("rho", profile.rho);
    report.scalar("R", r);
    let absorption = absorption_exponents(spec)?;
    report.scalar("p2", absorption.p);
    report.scalar("tau2", absorption.tau);
    if spec.hamiltonian != HamiltonianKind::None {
        let gradient = gradient_exponents(spec)?;
        report.scalar("p1", gradient.p);
        report.scalar("tau1", gradient.tau);
    }
    report.line(format!("dominant term: {dominant:?}"));
    Ok(())
}

pub fn barrier(spec: &ModelSpec, opts: &RunOptions, report: &mut Report) -> Result<()> {
    let r = radius(spec, opts)?;
    let profile = select_profile(spec, r)?;
    let b = RadialBarrier::at_origin(profile, 1)?;
    let n = opts.samples;
    let t = profile.thickness;
    let s: Vec<f64> = (1..=n).map(|i| t * i as f64 / n as f64).collect();
    let records = ode_residual(spec, &b, &s)?;
    let worst = records
        .iter()
        .map(|rec| rec.residual.abs() / rec.lhs.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let check = supersolution_check(spec, &b, t, n)?;
    report.insert("profile", profile);
    report.insert("supersolution", check);
    report.scalar("max_rel_residual", worst);
    report.scalar("worst_margin", check.worst_margin);
    report.line(format!("supersolution holds: {}", check.holds));
    report.add_table("residuals.csv", &residual_table(&records));
    let mut table = Table::new(&["r", "u"]);
    for i in 0..=n {
        let x = r * i as f64 / n as f64;
        table.push(vec![x, b.eval_barrier(&[x])]);
    }
    report.add_table("profile.csv", &table);
    Ok(())
}

pub fn radial(spec: &ModelSpec, opts: &RunOptions, report: &mut Report) -> Result<()> {
    let r = radius(spec, opts)?;
    let weight = if opts.frozen_weight {
        lem_frozen_weight(spec, r)?
    } else {
        WeightMode::Pointwise
    };
    let shoot = ShootOptions {
        weight,
        ..ShootOptions::default()
    };
    let m = measure_deadcore_with(spec, r, spec.d, &shoot, opts.samples)?;
    report.insert("weight", weight);
    report.scalar("R", r);
    report.scalar("t_measured", m.t_measured);
    report.scalar("t_predicted", m.t_predicted);
    report.scalar("rho_measured", m.rho_measured);
    report.scalar("rho_predicted", m.rho_predicted);
    report.scalar("max_rel_deviation", m.max_rel_deviation);
    report.scalar("max_excess", m.max_excess);
    report.scalar("plateau_max", m.plateau_max);
    if let Some(e) = m.solution.error_estimate {
        report.scalar("error_estimate", e);
    }
    report.add_csv("radial.csv", m.solution.to_csv());
    Ok(())
}

/// Returns whether the sweep converged; artifacts are recorded either way.
pub fn grid(spec: &ModelSpec, opts: &RunOptions, report: &mut Report) -> Result<bool> {
    let r = radius(spec, opts)?;
    let width = opts.stencil_dirs / 8;
    let grid = match opts.epsilon {
        Some(eps) => DiscGrid::new([0.0, 0.0], r, eps, width)?,
        None => DiscGrid::with_nodes([0.0, 0.0], r, opts.nodes, width)?,
    };
    let cfg = GridConfig {
        tolerance: opts.tolerance,
        max_iters: opts.max_iters,
        damping: opts.damping,
        mode: opts.mode,
        ..GridConfig::default()
    };
    let d = spec.d;
    let sol = solve(spec, grid, &|_| d, 0.0, &cfg)?;
    let active = sol.grid.active_nodes();
    let min_u = active.iter().map(|&i| sol.grid.values[i]).fold(f64::INFINITY, f64::min);
    let lip = lipschitz_estimate(&sol, 1.0);
    let eps = sol.grid.spacing;
    report.insert("converged", sol.converged);
    report.insert("iterations", sol.iterations);
    report.insert("mode", opts.mode);
    report.insert("stencil_dirs", 8 * sol.grid.stencil_width);
    report.insert("nodes_per_side", sol.grid.side);
    report.scalar("R", r);
    report.scalar("epsilon", eps);
    report.scalar("residual_inf", sol.residual_inf);
    report.scalar("max_u", sol.max_value());
    report.scalar("min_u", min_u);
    report.scalar("lipschitz", lip);
    report.scalar("rotation_gap", rotation_invariance_check(&sol, &[PI / 6.0, PI / 4.0]));
    report.scalar("rotation_bound", 2.0 * eps * lip);
    if let Ok(profile) = select_profile(spec, r) {
        let b = RadialBarrier::at_origin(profile, 2)?;
        let excess = active
            .iter()
            .map(|&i| sol.grid.values[i] - b.eval_barrier(&sol.grid.position(i)))
            .fold(f64::NEG_INFINITY, f64::max);
        report.scalar("max_u_minus_barrier", excess);
    }
    report.line(format!("converged: {} after {} sweeps", sol.converged, sol.iterations));
    report.add_csv("grid.csv", sol.grid.to_csv());
    Ok(sol.converged)
}

pub fn liouville(spec: &ModelSpec, opts: &RunOptions, report: &mut Report) -> Result<()> {
    let th = threshold(spec)?;
    report.insert("threshold", th);
    report.scalar("exponent", th.exponent);
    report.scalar("theta", th.theta);
    let witness: Vec<(f64, f64)> = opts
        .ladder
        .iter()
        .map(|&r| (r, opts.witness_scale * th.theta * th.denominator(r)))
        .collect();
    let verdict = classify(spec, &witness, SampleKind::Analytic)?;
    report.line(format!(
        "witness scaled by {}: {:?}",
        opts.witness_scale, verdict.classification
    ));
    report.insert("witness", verdict);
    report.add_table("ladder.csv", &ladder_table(&witness, &th));
    if let Some(samples) = &opts.growth_samples {
        let samples: Vec<(f64, f64)> = samples.iter().map(|s| (s[0], s[1])).collect();
        let verdict = classify(spec, &samples, SampleKind::Numerical)?;
        report.line(format!("measured samples: {:?}", verdict.classification));
        report.insert("measured", verdict);
        report.add_table("measured_ladder.csv", &ladder_table(&samples, &th));
    }
    if th.case == ThresholdCase::Absorption && !opts.consistency_ladder.is_empty() {
        let rows = deadcore_consistency(spec, opts.phi, &opts.consistency_ladder)?;
        let target = plateau_fraction(opts.phi, th.exponent);
        let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
        report.scalar("plateau_fraction", target);
        report.scalar("plateau_fraction_max_rel_error", worst);
        report.insert("consistency", &rows);
        report.add_table("consistency.csv", &consistency_table(&rows));
    }
    Ok(())
}

pub fn counterexample(spec: &ModelSpec, opts: &RunOptions, report: &mut Report) -> Result<()> {
    if spec.nonlinearity != NonlinearityKind::Exponential {
        return Err(Error::Unsupported(
            "the counterexample verb needs nonlinearity = exponential".into(),
        ));
    }
    let n = opts.samples;
    let radii: Vec<f64> = (0..n).map(|i| opts.r_max * i as f64 / (n - 1) as f64).collect();
    let (beta, m, alpha, lambda, gamma) = (spec.beta, spec.m, spec.alpha, spec.lambda, spec.gamma);
    let worst = exp_counterexample_residual(beta, m, alpha, lambda, gamma, &radii)?;
    let mut table = Table::new(&["r", "residual"]);
    for &r in &radii {
        table.push(vec![r, exp_counterexample_point(beta, m, alpha, lambda, gamma, r)]);
    }
    report.scalar("max_residual", worst);
    report.insert("supersolution", worst <= 0.0);
    report.line(format!("1 − e^(−|x|²) is a supersolution: {}", worst <= 0.0));
    report.add_table("counterexample.csv", &table);
    let u = |r: f64| 1.0 - (-r * r).exp();
    let ladder: Vec<(f64, f64, f64)> = opts.osc_ladder.iter().map(|&r| (r, u(r), 0.0)).collect();
    let osc = osc_criterion(&ladder, opts.osc_tolerance)?;
    let mut osc_table = Table::new(&["R", "osc_over_R"]);
    for &(r, l) in &osc.values {
        osc_table.push(vec![r, l]);
    }
    report.line(format!("oscillation tail decreasing: {}", osc.tail_decreasing));
    report.insert("oscillation", osc);
    report.add_table("osc.csv", &osc_table);
    Ok(())
}

fn row_index(kind: NonlinearityKind) -> f64 {
    match kind {
        NonlinearityKind::HardyHenon => 1.0,
        NonlinearityKind::LaneEmdenMatukuma => 2.0,
        NonlinearityKind::Exponential => 3.0,
    }
}

/// One row per model and parameter tuple; undefined entries are `nan`.
fn table1_row(spec: &ModelSpec) -> Vec<f64> {
    let admissible = validate_admissible(spec).map(|r| r.is_admissible()).unwrap_or(false);
    let mut row = vec![
        row_index(spec.nonlinearity),
        spec.beta,
        spec.m,
        spec.q,
        spec.gamma,
        spec.alpha,
        if admissible { 1.0 } else { 0.0 },
    ];
    let nan2 = [f64::NAN, f64::NAN];
    let power = spec.nonlinearity != NonlinearityKind::Exponential && admissible;
    let grad = if power && spec.hamiltonian != HamiltonianKind::None {
        gradient_exponents(spec).map_or(nan2, |g| [g.p, g.tau])
    } else {
        nan2
    };
    let abs = if power {
        absorption_exponents(spec).map_or(nan2, |a| [a.p, a.tau])
    } else {
        nan2
    };
    let prof = if power {
        select_profile(spec, f64::MAX).map_or([f64::NAN; 3], |p| [p.p, p.tau, p.thickness])
    } else {
        [f64::NAN; 3]
    };
    row.extend(grad);
    row.extend(abs);
    row.extend(prof);
    row
}

pub fn table1(spec: &ModelSpec, opts: &RunOptions, report: &mut Report) -> Result<()> {
    let pick = |sweep: &Option<Vec<f64>>, base: f64| sweep.clone().unwrap_or_else(|| vec![base]);
    let mut table = Table::new(&[
        "row", "beta", "m", "q", "gamma", "alpha", "admissible", "p1", "tau1", "p2", "tau2", "p", "tau", "T",
    ]);
    for kind in [
        NonlinearityKind::HardyHenon,
        NonlinearityKind::LaneEmdenMatukuma,
        NonlinearityKind::Exponential,
    ] {
        for &beta in &pick(&opts.sweep_beta, spec.beta) {
            for &m in &pick(&opts.sweep_m, spec.m) {
                for &gamma in &pick(&opts.sweep_gamma, spec.gamma) {
                    for &alpha in &pick(&opts.sweep_alpha, spec.alpha) {
                        let s = ModelSpec {
                            beta,
                            m,
                            gamma,
                            alpha,
                            nonlinearity: kind,
                            ..*spec
                        };
                        table.push(table1_row(&s));
                    }
                }
            }
        }
    }
    let admissible = table.rows.iter().filter(|r| r[6] == 1.0).count();
    report.insert("rows", table.rows.len());
    report.insert("admissible_rows", admissible);
    report.line(format!("{} rows, {admissible} admissible", table.rows.len()));
    report.add_table("table1.csv", &table);
    Ok(())
}
