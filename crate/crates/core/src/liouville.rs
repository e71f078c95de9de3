//! Growth thresholds for trivial entire solutions, their numerical witnesses
//! and the oscillation test for the exponential model.
//!
//! A nonnegative entire solution whose growth ratio
//! `limsup u(x)/D(|x|)` stays below `θ` vanishes identically. `D(R) = R^p`
//! for the Hardy–Hénon forms and `R^{p*}(1+R²)^{−α/(3−β−γ)}` for the
//! Lane–Emden–Matukuma form. Finite ladders of radii can only estimate the
//! limsup, so every verdict is an estimate.

use serde::{Deserialize, Serialize};

use crate::balance::{balanced_pair, select_profile, BalanceSource};
use crate::csv::Table;
use crate::error::{Error, Result};
use crate::model::{HamiltonianKind, ModelSpec, NonlinearityKind};
use crate::radial::measure_deadcore;

/// Relative width of the `AtThreshold` band for closed-form samples.
pub const ANALYTIC_TOLERANCE: f64 = 1e-6;
/// Relative width of the `AtThreshold` band for computed samples.
pub const NUMERICAL_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Subcritical,
    AtThreshold,
    AboveThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Analytic,
    Numerical,
}

impl SampleKind {
    pub fn tolerance(self) -> f64 {
        match self {
            SampleKind::Analytic => ANALYTIC_TOLERANCE,
            SampleKind::Numerical => NUMERICAL_TOLERANCE,
        }
    }
}

/// Which growth theorem supplies the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdCase {
    /// Pure absorption with the Hardy–Hénon weight.
    Absorption,
    /// Hardy–Hénon absorption with a gradient Hamiltonian.
    WithHamiltonian,
    /// Lane–Emden–Matukuma weight, composite denominator.
    LaneEmdenMatukuma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub exponent: f64,
    pub theta: f64,
    pub case: ThresholdCase,
    /// `α/(3−β−γ)` in the composite denominator, if any.
    pub lem_factor: Option<f64>,
    pub source: BalanceSource,
}

impl Threshold {
    /// `D(R)`.
    pub fn denominator(&self, radius: f64) -> f64 {
        growth_denominator(radius, self.exponent, self.lem_factor)
    }
}

fn growth_denominator(radius: f64, exponent: f64, lem_factor: Option<f64>) -> f64 {
    let base = radius.powf(exponent);
    match lem_factor {
        Some(k) => base * (1.0 + radius * radius).powf(-k),
        None => base,
    }
}

/// Exponent and threshold constant for `spec`.
pub fn threshold(spec: &ModelSpec) -> Result<Threshold> {
    spec.ensure_finite()?;
    if spec.nonlinearity == NonlinearityKind::Exponential {
        return Err(Error::Unsupported(
            "the exponential nonlinearity has no growth threshold; use the oscillation criterion".into(),
        ));
    }
    let (pair, _) = balanced_pair(spec)?;
    let (case, lem_factor) = match (spec.nonlinearity, spec.hamiltonian) {
        (NonlinearityKind::LaneEmdenMatukuma, _) => (
            ThresholdCase::LaneEmdenMatukuma,
            Some(spec.alpha / spec.absorption_index()),
        ),
        (_, HamiltonianKind::None) => (ThresholdCase::Absorption, None),
        _ => (ThresholdCase::WithHamiltonian, None),
    };
    Ok(Threshold {
        exponent: pair.p,
        theta: pair.tau,
        case,
        lem_factor,
        source: pair.source,
    })
}

/// Estimated `limsup sup_{|x|=R} u / D(R)`: the largest ratio over the tail
/// half of the ladder.
pub fn growth_ratio(samples: &[(f64, f64)], exponent: f64, lem_factor: Option<f64>) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "growth ratio needs at least 3 radii, got {}",
            samples.len()
        )));
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::InvalidInput(format!(
                "radii must increase strictly, got {} then {}",
                w[0].0, w[1].0
            )));
        }
    }
    if let Some(&(r, s)) = samples.iter().find(|&&(r, s)| !(r > 0.0) || !(s >= 0.0) || !s.is_finite()) {
        return Err(Error::InvalidInput(format!("bad sample (R = {r}, sup = {s})")));
    }
    let tail = &samples[samples.len() / 2..];
    Ok(tail
        .iter()
        .map(|&(r, s)| s / growth_denominator(r, exponent, lem_factor))
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleVerdict {
    pub threshold: f64,
    pub growth_exponent: f64,
    pub lem_factor: Option<f64>,
    pub measured_ratio: f64,
    pub classification: Classification,
    pub tolerance: f64,
    pub note: String,
}

/// Places `ratio` against `θ` with relative band `tol`.
pub fn classify_ratio(ratio: f64, theta: f64, tol: f64) -> Classification {
    if (ratio - theta).abs() <= tol * theta {
        Classification::AtThreshold
    } else if ratio < theta {
        Classification::Subcritical
    } else {
        Classification::AboveThreshold
    }
}

/// Verdict for a ladder of `(R, sup_{|x|=R} u)` samples.
pub fn classify(spec: &ModelSpec, samples: &[(f64, f64)], kind: SampleKind) -> Result<LiouvilleVerdict> {
    let th = threshold(spec)?;
    let ratio = growth_ratio(samples, th.exponent, th.lem_factor)?;
    let tol = kind.tolerance();
    let classification = classify_ratio(ratio, th.theta, tol);
    let note = match classification {
        Classification::Subcritical => {
            "estimate: growth below threshold; a genuine nonnegative solution must vanish identically"
        }
        Classification::AtThreshold => "estimate: growth at threshold; the Liouville bound does not apply",
        Classification::AboveThreshold => "estimate: growth above threshold; no conclusion",
    };
    let note = if th.case == ThresholdCase::LaneEmdenMatukuma && spec.alpha != 0.0 {
        format!("{note}; threshold is τ* without the barrier factor χ")
    } else {
        note.to_string()
    };
    Ok(LiouvilleVerdict {
        threshold: th.theta,
        growth_exponent: th.exponent,
        lem_factor: th.lem_factor,
        measured_ratio: ratio,
        classification,
        tolerance: tol,
        note,
    })
}

/// `(R, sup, denominator, ratio)` rows for a ladder.
pub fn ladder_table(samples: &[(f64, f64)], th: &Threshold) -> Table {
    let mut t = Table::new(&["R", "sup", "denominator", "ratio"]);
    for &(r, s) in samples {
        let den = th.denominator(r);
        t.push(vec![r, s, den, s / den]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub radius: f64,
    pub datum: f64,
    pub plateau_predicted: f64,
    pub plateau_measured: f64,
    pub fraction_predicted: f64,
    pub fraction_measured: f64,
    /// `|measured − predicted| / predicted` on the fraction.
    pub rel_error: f64,
}

/// For each `R`, takes the datum `d(R) = Φ·θ·D(R)`, predicts the plateau from
/// the barrier and measures it with the radial shooting solver.
pub fn deadcore_consistency(spec: &ModelSpec, phi: f64, ladder: &[f64]) -> Result<Vec<ConsistencyRow>> {
    if !(phi > 0.0 && phi < 1.0) {
        return Err(Error::InvalidInput(format!("Φ = {phi} must lie in (0, 1)")));
    }
    let th = threshold(spec)?;
    ladder
        .iter()
        .map(|&r| {
            let d = phi * th.theta * th.denominator(r);
            let profile = select_profile(&spec.with_datum(d), r)?;
            let m = measure_deadcore(spec, r, d)?;
            let (fp, fm) = (profile.rho / r, m.rho_measured / r);
            Ok(ConsistencyRow {
                radius: r,
                datum: d,
                plateau_predicted: profile.rho,
                plateau_measured: m.rho_measured,
                fraction_predicted: fp,
                fraction_measured: fm,
                rel_error: (fm - fp).abs() / fp,
            })
        })
        .collect()
}

/// `1 − Φ^{1/p}`, the plateau fraction of a pure power barrier.
pub fn plateau_fraction(phi: f64, p: f64) -> f64 {
    1.0 - phi.powf(1.0 / p)
}

pub fn consistency_table(rows: &[ConsistencyRow]) -> Table {
    let mut t = Table::new(&[
        "R",
        "d",
        "plateau_predicted",
        "plateau_measured",
        "fraction_predicted",
        "fraction_measured",
        "rel_error",
    ]);
    for r in rows {
        t.push(vec![
            r.radius,
            r.datum,
            r.plateau_predicted,
            r.plateau_measured,
            r.fraction_predicted,
            r.fraction_measured,
            r.rel_error,
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscReport {
    /// `(R, osc_{B_R} u / R)`.
    pub values: Vec<(f64, f64)>,
    /// The tail half of the ladder is non-increasing.
    pub tail_decreasing: bool,
    /// Non-increasing tail ending below the tolerance.
    pub consistent: bool,
}

/// `L_R = (sup − inf)/R` on a ladder of `(R, sup_{B_R} u, inf_{B_R} u)`.
pub fn osc_criterion(samples: &[(f64, f64, f64)], tol: f64) -> Result<OscReport> {
    if samples.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "oscillation test needs at least 3 radii, got {}",
            samples.len()
        )));
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::InvalidInput(format!(
                "radii must increase strictly, got {} then {}",
                w[0].0, w[1].0
            )));
        }
    }
    if let Some(&(r, sup, inf)) = samples.iter().find(|&&(r, sup, inf)| !(r > 0.0) || !(sup >= inf)) {
        return Err(Error::InvalidInput(format!("bad sample (R = {r}, sup = {sup}, inf = {inf})")));
    }
    let values: Vec<(f64, f64)> = samples.iter().map(|&(r, sup, inf)| (r, (sup - inf) / r)).collect();
    let tail = &values[values.len() / 2..];
    let tail_decreasing = tail.windows(2).all(|w| w[1].1 <= w[0].1);
    let last = values[values.len() - 1].1;
    Ok(OscReport {
        values,
        tail_decreasing,
        consistent: tail_decreasing && last < tol,
    })
}

/// `Δ∞^β u − a(r+1)^α|∇u|^m − λ|u|^γ e^u` for `u = 1 − e^{−r²}`.
pub fn exp_counterexample_point(beta: f64, m: f64, alpha: f64, lambda: f64, gamma: f64, r: f64) -> f64 {
    let a = 2f64.powf(3.0 - beta - m - alpha);
    let r2 = r * r;
    let op = 2f64.powf(3.0 - beta) * r.powf(2.0 - beta) * ((beta - 3.0) * r2).exp() * (1.0 - 2.0 * r2);
    let grad = 2.0 * r * (-r2).exp();
    let u = 1.0 - (-r2).exp();
    op - a * (r + 1.0).powf(alpha) * grad.powf(m) - lambda * u.abs().powf(gamma) * u.exp()
}

/// Largest residual over `radii`; `≤ 0` means `1 − e^{−|x|²}` is a
/// supersolution of the exponential model.
pub fn exp_counterexample_residual(
    beta: f64,
    m: f64,
    alpha: f64,
    lambda: f64,
    gamma: f64,
    radii: &[f64],
) -> Result<f64> {
    if !(0.0..2.0).contains(&beta) {
        return Err(Error::InvalidInput(format!("β = {beta} must lie in [0, 2)")));
    }
    if !(m > 0.0 && m <= 2.0 - beta) {
        return Err(Error::InvalidInput(format!("m = {m} must lie in (0, 2−β]")));
    }
    if !(alpha > -1.0 && alpha <= 0.0) {
        return Err(Error::InvalidInput(format!("α = {alpha} must lie in (−1, 0]")));
    }
    if !(lambda >= 0.0 && gamma >= 0.0) {
        return Err(Error::InvalidInput("λ and γ must be nonnegative".into()));
    }
    if radii.is_empty() || radii.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(Error::InvalidInput("radii must be finite and nonnegative".into()));
    }
    Ok(radii
        .iter()
        .map(|&r| exp_counterexample_point(beta, m, alpha, lambda, gamma, r))
        .fold(f64::NEG_INFINITY, f64::max))
}
