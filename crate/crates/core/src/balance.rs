//! Power-law balancing for the radial equation `(h′)^{2−β} h″ = cH + λf`.
//!
//! Substituting `h = τ s^p` makes the left side `τ^{3−β} p^{3−β}(p−1) s^{p(3−β)−4+β}`.
//! Each right-hand term is a single power of `s`, so equating exponents and
//! coefficients against one term at a time yields a `(p, τ)` pair. The smaller
//! exponent wins near the plateau edge; the other term is lower order there.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HamiltonianKind, ModelSpec, NonlinearityKind};

/// Relative gap under which `p₁` and `p₂` count as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BalanceSource {
    Absorption,
    Gradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalancePair {
    pub p: f64,
    pub tau: f64,
    pub source: BalanceSource,
}

/// Which right-hand term the profile balances exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominant {
    /// Absorption balanced; a gradient term is present but lower order.
    Absorption,
    /// Gradient balanced; absorption is lower order.
    Gradient,
    /// Single-term equation (no Hamiltonian).
    ExactBalance,
}

impl Dominant {
    pub fn source(self) -> BalanceSource {
        match self {
            Dominant::Gradient => BalanceSource::Gradient,
            Dominant::Absorption | Dominant::ExactBalance => BalanceSource::Absorption,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierProfile {
    pub p: f64,
    pub tau: f64,
    /// Dead-core thickness: the profile climbs from 0 to `d` over `[0, T]`.
    #[serde(rename = "T")]
    pub thickness: f64,
    /// Plateau radius `R − T`.
    pub rho: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub chi: f64,
    pub dominant: Dominant,
}

impl BarrierProfile {
    /// `Λ = χτ`, the effective coefficient of `s^p`.
    pub fn lambda_eff(&self) -> f64 {
        self.chi * self.tau
    }
}

/// `x^{1/k}` for `x > 0`.
fn root(x: f64, index: f64) -> f64 {
    (x.ln() / index).exp()
}

fn require_power_nonlinearity(spec: &ModelSpec) -> Result<()> {
    if spec.nonlinearity == NonlinearityKind::Exponential {
        return Err(Error::Unsupported(
            "the exponential nonlinearity has no power-law balance".into(),
        ));
    }
    Ok(())
}

/// `(p₂, τ₂)` for Hardy–Hénon, `(p₂*, τ₂**)` for Lane–Emden–Matukuma.
///
/// Hardy–Hénon: `p₂ = (4−β+α)/k`, `τ₂^k = λ k^{4−β} / ((4−β+α)^{3−β}(1+α+γ))`
/// with `k = 3−β−γ`. The LEM pair is the same with `α = 0`, the weight being
/// handled separately through `χ`.
pub fn absorption_exponents(spec: &ModelSpec) -> Result<BalancePair> {
    spec.ensure_finite()?;
    require_power_nonlinearity(spec)?;
    let beta = spec.beta;
    let k = spec.absorption_index();
    if k <= 0.0 {
        return Err(Error::DegenerateBalance(format!(
            "root index 3−β−γ = {k} ≤ 0"
        )));
    }
    if spec.lambda <= 0.0 {
        return Err(Error::SignError(format!("λ = {} must be positive", spec.lambda)));
    }
    let alpha = match spec.nonlinearity {
        NonlinearityKind::HardyHenon => spec.alpha,
        _ => 0.0,
    };
    let numerator = 4.0 - beta + alpha;
    let excess = 1.0 + alpha + spec.gamma;
    if numerator <= 0.0 || excess <= 0.0 {
        return Err(Error::DegenerateBalance(format!(
            "4−β+α = {numerator} and 1+α+γ = {excess} must both be positive"
        )));
    }
    let p = numerator / k;
    let tau_k = spec.lambda * k.powf(4.0 - beta) / (numerator.powf(3.0 - beta) * excess);
    Ok(BalancePair {
        p,
        tau: root(tau_k, k),
        source: BalanceSource::Absorption,
    })
}

/// `(p₁, τ₁)` for the Hamiltonian term.
///
/// With `k₁ = 3−β−m−q` (`q = 0` for the plain gradient power) and `c̃ = |c|`:
/// `p₁ = (4−β−m)/k₁`, `τ₁^{k₁} = c̃ k₁^{4−β−m} / ((1+q)(4−β−m)^{3−β−m})`.
pub fn gradient_exponents(spec: &ModelSpec) -> Result<BalancePair> {
    spec.ensure_finite()?;
    let (q, c_eff) = match spec.hamiltonian {
        HamiltonianKind::None => {
            return Err(Error::Unsupported("no Hamiltonian term to balance".into()))
        }
        HamiltonianKind::GradientPower => (0.0, spec.c),
        HamiltonianKind::PositiveMixed => (spec.q, spec.c),
        HamiltonianKind::NegativeMixed => (spec.q, -spec.c),
    };
    let beta = spec.beta;
    let m = spec.m;
    let k1 = 3.0 - beta - m - q;
    if k1 <= 0.0 {
        return Err(Error::DegenerateBalance(format!(
            "root index 3−β−m−q = {k1} ≤ 0"
        )));
    }
    if c_eff <= 0.0 {
        return Err(Error::SignError(format!(
            "c = {} has the wrong sign for {:?}",
            spec.c, spec.hamiltonian
        )));
    }
    let numerator = 4.0 - beta - m;
    let p = numerator / k1;
    let tau_k = c_eff * k1.powf(numerator) / ((1.0 + q) * numerator.powf(3.0 - beta - m));
    Ok(BalancePair {
        p,
        tau: root(tau_k, k1),
        source: BalanceSource::Gradient,
    })
}

/// The `(p, τ)` pair that governs the profile near the plateau edge, with the
/// term it balances. `p = min(p₁, p₂)`; an exact tie is rejected.
pub fn balanced_pair(spec: &ModelSpec) -> Result<(BalancePair, Dominant)> {
    let absorption = absorption_exponents(spec)?;
    if spec.hamiltonian == HamiltonianKind::None {
        return Ok((absorption, Dominant::ExactBalance));
    }
    let gradient = gradient_exponents(spec)?;
    let (p1, p2) = (gradient.p, absorption.p);
    if (p1 - p2).abs() <= TIE_TOLERANCE * p1.abs().max(p2.abs()) {
        return Err(Error::TieUnresolved(p1));
    }
    if p1 > p2 {
        Ok((absorption, Dominant::Absorption))
    } else {
        Ok((gradient, Dominant::Gradient))
    }
}

/// Whether the Lane–Emden–Matukuma weight is frozen into the profile.
pub fn uses_lem_weight(spec: &ModelSpec, dominant: Dominant) -> bool {
    spec.nonlinearity == NonlinearityKind::LaneEmdenMatukuma
        && dominant != Dominant::Gradient
        && spec.alpha != 0.0
}

/// `χ(T) = (1+T²)^{−α/(3−β−γ)}`.
pub fn lem_chi(spec: &ModelSpec, thickness: f64) -> f64 {
    (1.0 + thickness * thickness).powf(-spec.alpha / spec.absorption_index())
}

/// Solves `τ T^p χ(T) = d` for the LEM thickness by bracketed bisection.
pub fn lem_thickness(spec: &ModelSpec, p: f64, tau: f64, d: f64) -> Result<f64> {
    let g = |t: f64| tau * t.powf(p) * lem_chi(spec, t) - d;
    let mut lo = 0.0;
    let mut hi = root(d / tau, p);
    let mut expansions = 0;
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 200 || !hi.is_finite() {
            return Err(Error::BracketError {
                lo,
                hi,
                reason: "τ T^p χ(T) never reaches d; α is too large for a unique root".into(),
            });
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Barrier profile for a ball of radius `R` with boundary datum `spec.d`.
pub fn select_profile(spec: &ModelSpec, radius: f64) -> Result<BarrierProfile> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("R = {radius} must be positive")));
    }
    if !(spec.d > 0.0) {
        return Err(Error::InvalidInput(format!("d = {} must be positive", spec.d)));
    }
    let (pair, dominant) = balanced_pair(spec)?;
    let (p, tau, d) = (pair.p, pair.tau, spec.d);
    let (thickness, chi) = if uses_lem_weight(spec, dominant) {
        let t = lem_thickness(spec, p, tau, d)?;
        (t, lem_chi(spec, t))
    } else {
        (root(d / tau, p), 1.0)
    };
    if radius <= thickness {
        return Err(Error::NoDeadCore { radius, thickness });
    }
    Ok(BarrierProfile {
        p,
        tau,
        thickness,
        rho: radius - thickness,
        radius,
        chi,
        dominant,
    })
}
