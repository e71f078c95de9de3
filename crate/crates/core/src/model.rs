//! Parameter space of `Δ∞^β u = cH(u, ∇u) + λ f(|x|, u)`.
//!
//! The Hamiltonian comes in three model forms (plus "absent") and the
//! zeroth-order term in three: Hardy–Hénon `|x|^α (u⁺)^γ`, Lane–Emden–Matukuma
//! `(1+|x|²)^{-α} u^γ` and exponential `|u|^γ e^u`. [`validate_admissible`]
//! checks the structural inequalities each (Hamiltonian, nonlinearity) pairing
//! needs before any barrier constant is meaningful.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// First-order term. `c` carries the sign so that `cH >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    /// `cH = 0`.
    None,
    /// `cH = c|∇u|^m`, `c > 0`.
    GradientPower,
    /// `cH = c·(-u^q|∇u|^m)`, `c < 0`.
    NegativeMixed,
    /// `cH = c·u^q|∇u|^m`, `c > 0`.
    PositiveMixed,
}

impl HamiltonianKind {
    pub fn is_mixed(self) -> bool {
        matches!(self, Self::NegativeMixed | Self::PositiveMixed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityKind {
    /// `|x|^α (u⁺)^γ`
    HardyHenon,
    /// `(1+|x|²)^{-α} u^γ`
    LaneEmdenMatukuma,
    /// `|u|^γ e^u`, paired with a gradient term `a(x)(|x|+1)^α |∇u|^m`.
    Exponential,
}

/// The full parameter tuple. Serializes as a flat JSON object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub beta: f64,
    pub m: f64,
    pub q: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub c: f64,
    /// Boundary datum `u = d` on the outer sphere.
    pub d: f64,
    pub hamiltonian: HamiltonianKind,
    pub nonlinearity: NonlinearityKind,
}

impl ModelSpec {
    /// Pure absorption `Δ∞^β u = λ|x|^α (u⁺)^γ` with `d = 1`.
    pub fn hardy_henon(beta: f64, gamma: f64, alpha: f64, lambda: f64) -> Self {
        Self {
            beta,
            m: 1.0,
            q: 0.0,
            gamma,
            alpha,
            lambda,
            c: 0.0,
            d: 1.0,
            hamiltonian: HamiltonianKind::None,
            nonlinearity: NonlinearityKind::HardyHenon,
        }
    }

    /// Pure absorption with the Lane–Emden–Matukuma weight, `d = 1`.
    pub fn lane_emden_matukuma(beta: f64, gamma: f64, alpha: f64, lambda: f64) -> Self {
        Self {
            nonlinearity: NonlinearityKind::LaneEmdenMatukuma,
            ..Self::hardy_henon(beta, gamma, alpha, lambda)
        }
    }

    pub fn with_hamiltonian(self, kind: HamiltonianKind, c: f64, m: f64, q: f64) -> Self {
        Self {
            hamiltonian: kind,
            c,
            m,
            q,
            ..self
        }
    }

    pub fn with_datum(self, d: f64) -> Self {
        Self { d, ..self }
    }

    /// Mixed Hamiltonians with `q = 0` are the plain gradient power; fold them.
    pub fn normalized(self) -> Self {
        if self.hamiltonian.is_mixed() && self.q == 0.0 {
            let c = match self.hamiltonian {
                HamiltonianKind::NegativeMixed => -self.c,
                _ => self.c,
            };
            Self {
                hamiltonian: HamiltonianKind::GradientPower,
                c,
                ..self
            }
        } else {
            self
        }
    }

    /// Parses the flat JSON document and normalizes it.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(spec.normalized())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("ModelSpec is plain data")
    }

    /// `3 - β - γ`, the root index of every absorption constant.
    pub fn absorption_index(&self) -> f64 {
        3.0 - self.beta - self.gamma
    }

    fn numeric_fields(&self) -> [(&'static str, f64); 8] {
        [
            ("beta", self.beta),
            ("m", self.m),
            ("q", self.q),
            ("gamma", self.gamma),
            ("alpha", self.alpha),
            ("lambda", self.lambda),
            ("c", self.c),
            ("d", self.d),
        ]
    }

    pub(crate) fn ensure_finite(&self) -> Result<()> {
        for (name, value) in self.numeric_fields() {
            if !value.is_finite() {
                return Err(Error::InvalidInput(format!("{name} = {value} is not finite")));
            }
        }
        Ok(())
    }
}

/// One violated structural inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// The inequality that must hold, e.g. `m < 3−β`.
    pub constraint: String,
    /// The offending value (left-hand side).
    pub value: f64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }

    fn lt(&mut self, constraint: &str, lhs: f64, rhs: f64) {
        if !(lhs < rhs) {
            self.push(constraint, lhs, format!("{constraint} fails: {lhs} ≮ {rhs}"));
        }
    }

    fn le(&mut self, constraint: &str, lhs: f64, rhs: f64) {
        if !(lhs <= rhs) {
            self.push(constraint, lhs, format!("{constraint} fails: {lhs} > {rhs}"));
        }
    }

    fn push(&mut self, constraint: &str, value: f64, message: String) {
        self.violations.push(Violation {
            constraint: constraint.to_string(),
            value,
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "admissible");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", v.message)?;
        }
        Ok(())
    }
}

/// Upper bound on α for the Lane–Emden–Matukuma row. With a Hamiltonian it is
/// `(4−β−m)(3−β−γ) / (2(3−β−m))`; for pure absorption the same growth argument
/// against `p₂* = (4−β)/(3−β−γ)` gives `(4−β)/2`.
pub fn lem_alpha_bound(spec: &ModelSpec) -> f64 {
    let beta = spec.beta;
    if spec.hamiltonian == HamiltonianKind::None {
        (4.0 - beta) / 2.0
    } else {
        (4.0 - beta - spec.m) * (3.0 - beta - spec.gamma) / (2.0 * (3.0 - beta - spec.m))
    }
}

/// Every violated structural inequality; empty means admissible.
pub fn validate_admissible(spec: &ModelSpec) -> Result<ValidationReport> {
    spec.ensure_finite()?;
    let mut r = ValidationReport::default();
    let ModelSpec {
        beta,
        m,
        q,
        gamma,
        alpha,
        lambda,
        c,
        d,
        hamiltonian,
        nonlinearity,
    } = *spec;

    r.le("0 ≤ β", 0.0, beta);
    r.le("β ≤ 2", beta, 2.0);
    r.lt("λ > 0", 0.0, lambda);
    r.lt("d > 0", 0.0, d);
    r.le("γ ≥ 0", 0.0, gamma);
    r.le("q ≥ 0", 0.0, q);

    match hamiltonian {
        HamiltonianKind::None => {}
        HamiltonianKind::GradientPower | HamiltonianKind::PositiveMixed => {
            r.lt("m > 0", 0.0, m);
            r.lt("c > 0", 0.0, c);
        }
        HamiltonianKind::NegativeMixed => {
            r.lt("m > 0", 0.0, m);
            r.lt("c < 0", c, 0.0);
        }
    }

    match nonlinearity {
        NonlinearityKind::HardyHenon | NonlinearityKind::LaneEmdenMatukuma => {
            if hamiltonian != HamiltonianKind::None {
                r.lt("m < 3−β", m, 3.0 - beta);
            }
            if hamiltonian.is_mixed() {
                r.lt("m+q+β < 3", m + q + beta, 3.0);
            }
            r.lt("γ < 3−β", gamma, 3.0 - beta);
            if nonlinearity == NonlinearityKind::HardyHenon {
                r.lt("α > −1−γ", -1.0 - gamma, alpha);
            } else {
                r.le("α ≥ 0", 0.0, alpha);
                let bound = lem_alpha_bound(spec);
                let label = if hamiltonian == HamiltonianKind::None {
                    "α < (4−β)/2"
                } else {
                    "α < (4−β−m)(3−β−γ)/(2(3−β−m))"
                };
                r.lt(label, alpha, bound);
            }
        }
        NonlinearityKind::Exponential => {
            if hamiltonian != HamiltonianKind::GradientPower {
                r.push(
                    "exponential requires gradient_power",
                    f64::NAN,
                    format!(
                        "exponential nonlinearity requires the gradient_power Hamiltonian, got {hamiltonian:?}"
                    ),
                );
            }
            r.lt("m > 0", 0.0, m);
            r.le("m ≤ 2−β", m, 2.0 - beta);
            r.lt("α > −1", -1.0, alpha);
            r.le("α ≤ 0", alpha, 0.0);
        }
    }
    Ok(r)
}

/// `cH(u, ∇u)` with `grad_norm = |∇u|`.
pub fn eval_hamiltonian(spec: &ModelSpec, u_val: f64, grad_norm: f64) -> Result<f64> {
    if !(grad_norm >= 0.0) || !u_val.is_finite() || !grad_norm.is_finite() {
        return Err(Error::InvalidInput(format!(
            "hamiltonian needs finite u and |∇u| ≥ 0, got u = {u_val}, |∇u| = {grad_norm}"
        )));
    }
    let grad_term = grad_norm.powf(spec.m);
    let value = match spec.hamiltonian {
        HamiltonianKind::None => 0.0,
        HamiltonianKind::GradientPower => spec.c * grad_term,
        HamiltonianKind::NegativeMixed => -spec.c * mixed_power(u_val, spec.q)? * grad_term,
        HamiltonianKind::PositiveMixed => spec.c * mixed_power(u_val, spec.q)? * grad_term,
    };
    Ok(value)
}

fn mixed_power(u: f64, q: f64) -> Result<f64> {
    if u >= 0.0 {
        Ok(u.powf(q))
    } else if q.fract() == 0.0 && q.abs() <= i32::MAX as f64 {
        Ok(u.powi(q as i32))
    } else {
        Err(Error::DomainError(format!(
            "u^q with u = {u} < 0 and non-integer q = {q}"
        )))
    }
}

/// `λ f(s, u)`; `s` is the (possibly shifted) radius, clamped at 0.
///
/// The positive part `(u⁺)^γ` is 0 for every `u ≤ 0`, including `γ = 0`, so
/// that a plateau `u ≡ 0` has a vanishing right-hand side.
pub fn eval_nonlinearity(spec: &ModelSpec, radius_shift: f64, u_val: f64) -> Result<f64> {
    if !radius_shift.is_finite() || !u_val.is_finite() {
        return Err(Error::InvalidInput(format!(
            "nonlinearity needs finite arguments, got s = {radius_shift}, u = {u_val}"
        )));
    }
    let s = radius_shift.max(0.0);
    let positive_part = |u: f64| if u > 0.0 { u.powf(spec.gamma) } else { 0.0 };
    let value = match spec.nonlinearity {
        NonlinearityKind::HardyHenon => {
            if spec.alpha < 0.0 && s == 0.0 {
                return Err(Error::SingularPoint(format!(
                    "|x|^α with α = {} < 0 at radius 0",
                    spec.alpha
                )));
            }
            let weight = if spec.alpha == 0.0 { 1.0 } else { s.powf(spec.alpha) };
            spec.lambda * weight * positive_part(u_val)
        }
        NonlinearityKind::LaneEmdenMatukuma => {
            spec.lambda * lem_weight(spec.alpha, s) * positive_part(u_val)
        }
        NonlinearityKind::Exponential => {
            spec.lambda * u_val.abs().powf(spec.gamma) * u_val.exp()
        }
    };
    Ok(value)
}

/// `φ(s) = (1+s²)^{-α}`.
pub fn lem_weight(alpha: f64, s: f64) -> f64 {
    (1.0 + s * s).powf(-alpha)
}
