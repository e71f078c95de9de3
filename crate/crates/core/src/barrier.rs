//! Radial dead-core barriers `u(x) = Λ[|x−x₀| − ρ]₊^p` and their checks.

use serde::{Deserialize, Serialize};

use crate::balance::{BarrierProfile, Dominant};
use crate::csv::Table;
use crate::error::{Error, Result};
use crate::model::{eval_hamiltonian, eval_nonlinearity, lem_weight, ModelSpec, NonlinearityKind};

/// Relative slack allowed when comparing `lhs` and `rhs` in floating point.
pub const SUPERSOLUTION_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialBarrier {
    pub profile: BarrierProfile,
    pub center: Vec<f64>,
}

impl RadialBarrier {
    pub fn new(profile: BarrierProfile, center: Vec<f64>) -> Result<Self> {
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "center must be a finite point of dimension ≥ 1".into(),
            ));
        }
        Ok(Self { profile, center })
    }

    /// Barrier centred at the origin of `ℝⁿ`.
    pub fn at_origin(profile: BarrierProfile, dimension: usize) -> Result<Self> {
        Self::new(profile, vec![0.0; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    /// `h(s) = χτ s^p`, and 0 for `s ≤ 0`.
    pub fn eval_profile(&self, s: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else {
            self.profile.lambda_eff() * s.powf(self.profile.p)
        }
    }

    /// `h′(s)`.
    pub fn profile_derivative(&self, s: f64) -> f64 {
        let p = self.profile.p;
        if s <= 0.0 {
            0.0
        } else {
            self.profile.lambda_eff() * p * s.powf(p - 1.0)
        }
    }

    /// `h″(s)`.
    pub fn profile_second_derivative(&self, s: f64) -> f64 {
        let p = self.profile.p;
        if s <= 0.0 {
            0.0
        } else {
            self.profile.lambda_eff() * p * (p - 1.0) * s.powf(p - 2.0)
        }
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dimension(), "point dimension mismatch");
        x.iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn eval_barrier(&self, x: &[f64]) -> f64 {
        self.eval_profile(self.distance(x) - self.profile.rho)
    }

    /// Value and whether `x` lies outside the ball `B_R(x₀)`.
    pub fn eval_barrier_flagged(&self, x: &[f64]) -> (f64, bool) {
        let r = self.distance(x);
        (self.eval_profile(r - self.profile.rho), r > self.profile.radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub s: f64,
    /// `(h′)^{2−β} h″`.
    pub lhs: f64,
    pub balanced_rhs: f64,
    pub other_rhs: f64,
    /// `lhs − balanced_rhs`.
    pub residual: f64,
    /// `other_rhs / |lhs|`.
    pub ratio: f64,
}

/// `(h′)^{2−β} h″` for the barrier profile.
pub fn radial_operator(beta: f64, hp: f64, hpp: f64) -> f64 {
    if beta == 2.0 {
        hpp
    } else {
        hp.powf(2.0 - beta) * hpp
    }
}

/// Absorption term `λ f(s, h)`, with the LEM weight frozen at `s = T` when the
/// barrier was built against that worst case.
fn absorption_term(spec: &ModelSpec, b: &RadialBarrier, s: f64, h: f64, frozen: bool) -> Result<f64> {
    if spec.nonlinearity == NonlinearityKind::LaneEmdenMatukuma && frozen {
        let unweighted = eval_nonlinearity(spec, 0.0, h)?;
        Ok(unweighted * lem_weight(spec.alpha, b.profile.thickness))
    } else {
        eval_nonlinearity(spec, s, h)
    }
}

/// Pointwise residual of the radial ODE along the barrier profile.
pub fn ode_residual(spec: &ModelSpec, b: &RadialBarrier, s_samples: &[f64]) -> Result<Vec<ResidualRecord>> {
    let beta = spec.beta;
    let mut out = Vec::with_capacity(s_samples.len());
    for &s in s_samples {
        if s == 0.0 {
            return Err(Error::SingularPoint("the radial ODE is singular at s = 0".into()));
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidInput(format!("sample s = {s} must be positive")));
        }
        let h = b.eval_profile(s);
        let hp = b.profile_derivative(s);
        let lhs = radial_operator(beta, hp, b.profile_second_derivative(s));
        let gradient = eval_hamiltonian(spec, h, hp)?;
        let (balanced, other) = match b.profile.dominant {
            Dominant::Gradient => (gradient, absorption_term(spec, b, s, h, false)?),
            Dominant::Absorption | Dominant::ExactBalance => {
                (absorption_term(spec, b, s, h, true)?, gradient)
            }
        };
        out.push(ResidualRecord {
            s,
            lhs,
            balanced_rhs: balanced,
            other_rhs: other,
            residual: lhs - balanced,
            ratio: other / lhs.abs(),
        });
    }
    Ok(out)
}

pub fn residual_table(records: &[ResidualRecord]) -> Table {
    let mut t = Table::new(&["s", "lhs", "balanced_rhs", "other_rhs", "residual", "ratio_other_over_lhs"]);
    for r in records {
        t.push(vec![r.s, r.lhs, r.balanced_rhs, r.other_rhs, r.residual, r.ratio]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionReport {
    pub holds: bool,
    /// `min_i (rhs − lhs)`.
    pub worst_margin: f64,
}

/// Checks `(h′)^{2−β}h″ ≤ cH + λf` at `s_i = s_max·i/n`, `i = 1..n`, with the
/// true pointwise weights.
pub fn supersolution_check(spec: &ModelSpec, b: &RadialBarrier, s_max: f64, samples: usize) -> Result<SupersolutionReport> {
    if samples < 2 || !(s_max > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need s_max > 0 and at least 2 samples, got s_max = {s_max}, samples = {samples}"
        )));
    }
    let mut holds = true;
    let mut worst = f64::INFINITY;
    for i in 1..=samples {
        let s = s_max * i as f64 / samples as f64;
        let h = b.eval_profile(s);
        let hp = b.profile_derivative(s);
        let lhs = radial_operator(spec.beta, hp, b.profile_second_derivative(s));
        let rhs = eval_hamiltonian(spec, h, hp)? + eval_nonlinearity(spec, s, h)?;
        let margin = rhs - lhs;
        worst = worst.min(margin);
        if margin < -SUPERSOLUTION_RTOL * lhs.abs().max(rhs.abs()) {
            holds = false;
        }
    }
    Ok(SupersolutionReport {
        holds,
        worst_margin: worst,
    })
}

/// `N_k < Λ R_k^p` for each `(R_k, N_k)`; any `true` makes `x₀` a plateau point.
pub fn plateau_test(samples: &[(f64, f64)], profile: &BarrierProfile) -> Vec<bool> {
    samples
        .iter()
        .map(|&(r, n)| n < profile.lambda_eff() * r.powf(profile.p))
        .collect()
}

/// The exterior-ball barrier `χ(x) = |x|^a − r₁^a` with `a = m/(2(m+q))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryBarrier {
    pub beta: f64,
    pub m: f64,
    pub q: f64,
    pub c: f64,
    pub r1: f64,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryBarrierEval {
    pub chi: f64,
    /// `Δ∞^β χ = a^{3−β}|x|^{(3−β)a−4+β}(a−1)`.
    pub drift: f64,
    /// Drift combined with `−c|∇χ|^m`, `+cχ^q|∇χ|^m`, `−cχ^q|∇χ|^m`.
    pub expressions: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativityReport {
    pub holds: bool,
    /// Width of the shell `[r₁, r₁+ψ]` that was accepted (or last tried).
    pub psi: f64,
    pub halvings: usize,
}

impl BoundaryBarrier {
    pub fn new(beta: f64, m: f64, q: f64, c: f64, r1: f64) -> Result<Self> {
        if !(r1 > 0.0) || !r1.is_finite() {
            return Err(Error::InvalidInput(format!("r1 = {r1} must be positive")));
        }
        if !(m > 0.0) || !(q >= 0.0) {
            return Err(Error::InvalidInput(format!("need m > 0 and q ≥ 0, got m = {m}, q = {q}")));
        }
        Ok(Self {
            beta,
            m,
            q,
            c,
            r1,
            a: m / (2.0 * (m + q)),
        })
    }

    pub fn eval_radius(&self, r: f64) -> BoundaryBarrierEval {
        let a = self.a;
        let chi = r.powf(a) - self.r1.powf(a);
        let drift = a.powf(3.0 - self.beta) * r.powf((3.0 - self.beta) * a - 4.0 + self.beta) * (a - 1.0);
        let grad_m = a.powf(self.m) * r.powf((a - 1.0) * self.m);
        let chi_q = chi.max(0.0).powf(self.q);
        BoundaryBarrierEval {
            chi,
            drift,
            expressions: [
                drift - self.c * grad_m,
                drift + self.c * chi_q * grad_m,
                drift - self.c * chi_q * grad_m,
            ],
        }
    }

    pub fn eval(&self, x: &[f64]) -> BoundaryBarrierEval {
        self.eval_radius(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Searches `ψ = 0.1·r₁, 0.05·r₁, …` (at most 10 halvings) for a shell
    /// `[r₁, r₁+ψ]` on which all three expressions are `≤ 0`.
    pub fn negativity_region(&self, samples: usize) -> NegativityReport {
        let samples = samples.max(2);
        let mut psi = 0.1 * self.r1;
        for halvings in 0..=10 {
            let ok = (0..=samples).all(|i| {
                let r = self.r1 + psi * i as f64 / samples as f64;
                self.eval_radius(r).expressions.iter().all(|&e| e <= 0.0)
            });
            if ok {
                return NegativityReport {
                    holds: true,
                    psi,
                    halvings,
                };
            }
            if halvings < 10 {
                psi *= 0.5;
            }
        }
        NegativityReport {
            holds: false,
            psi,
            halvings: 10,
        }
    }
}

/// Formats residual records as CSV text.
pub fn residual_csv(records: &[ResidualRecord]) -> String {
    residual_table(records).to_csv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::select_profile;
    use crate::model::HamiltonianKind;

    fn exact() -> (ModelSpec, RadialBarrier) {
        let spec = ModelSpec::hardy_henon(0.0, 0.0, 0.0, 1.0);
        let prof = select_profile(&spec, 2.0).unwrap();
        (spec, RadialBarrier::at_origin(prof, 2).unwrap())
    }

    #[test]
    fn profile_values() {
        let (_, b) = exact();
        assert_eq!(b.eval_profile(0.0), 0.0);
        assert!((b.eval_profile(b.profile.thickness) - 1.0).abs() < 1e-12);
        let half = b.eval_profile(b.profile.thickness / 2.0);
        assert!((half - 2f64.powf(-4.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn barrier_is_zero_on_plateau_and_d_on_boundary() {
        let (_, b) = exact();
        assert_eq!(b.eval_barrier(&[0.0, 0.0]), 0.0);
        assert_eq!(b.eval_barrier(&[b.profile.rho * 0.999, 0.0]), 0.0);
        assert!((b.eval_barrier(&[0.0, 2.0]) - 1.0).abs() < 1e-12);
        let (_, outside) = b.eval_barrier_flagged(&[2.5, 0.0]);
        assert!(outside);
    }

    #[test]
    fn normalized_case_residual_vanishes() {
        let spec = ModelSpec::hardy_henon(2.0, 0.0, 0.0, 1.0);
        let prof = select_profile(&spec, 3.0).unwrap();
        let b = RadialBarrier::at_origin(prof, 1).unwrap();
        let rec = ode_residual(&spec, &b, &[0.3, 1.0]).unwrap();
        for r in rec {
            assert!((r.lhs - 1.0).abs() < 1e-14);
            assert!(r.residual.abs() < 1e-14);
        }
    }

    #[test]
    fn gradient_balanced_residual_vanishes() {
        // γ = 2.5 makes the absorption exponent 8, so the gradient wins.
        let spec = ModelSpec::hardy_henon(0.0, 2.5, 0.0, 1.0)
            .with_hamiltonian(HamiltonianKind::GradientPower, 1.0, 1.0, 0.0);
        let prof = select_profile(&spec, 5.0).unwrap();
        assert_eq!(prof.dominant, Dominant::Gradient);
        let b = RadialBarrier::at_origin(prof, 2).unwrap();
        for r in ode_residual(&spec, &b, &[0.01, 0.2, 0.9]).unwrap() {
            assert!(r.residual.abs() <= 1e-10 * r.lhs.abs());
            assert!((r.lhs - b.profile_derivative(r.s)).abs() <= 1e-10 * r.lhs);
        }
    }

    #[test]
    fn lower_order_ratio_decreases() {
        let spec = ModelSpec::hardy_henon(0.0, 0.0, 0.0, 1.0)
            .with_hamiltonian(HamiltonianKind::GradientPower, 1.0, 1.0, 0.0);
        let prof = select_profile(&spec, 2.0).unwrap();
        let b = RadialBarrier::at_origin(prof, 2).unwrap();
        let rec = ode_residual(&spec, &b, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(rec[0].ratio > rec[1].ratio && rec[1].ratio > rec[2].ratio);
        // ratio ∝ s^{(p−1)m − (p−2) − 2(p−1)} = s^{1/3}
        assert!((rec[0].ratio / rec[1].ratio - 10f64.powf(1.0 / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn singular_sample_rejected() {
        let (spec, b) = exact();
        assert!(matches!(ode_residual(&spec, &b, &[0.0]), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn supersolution_directions() {
        let (spec, b) = exact();
        let r = supersolution_check(&spec, &b, b.profile.thickness, 50).unwrap();
        assert!(r.holds);
        assert!(r.worst_margin.abs() < 1e-12);

        let with_gradient = spec.with_hamiltonian(HamiltonianKind::GradientPower, 1.0, 1.0, 0.0);
        let r = supersolution_check(&with_gradient, &b, b.profile.thickness, 50).unwrap();
        assert!(r.holds && r.worst_margin > 0.0);

        let mut corrupted = b.clone();
        corrupted.profile.tau *= 1.5;
        let r = supersolution_check(&spec, &corrupted, b.profile.thickness, 50).unwrap();
        assert!(!r.holds && r.worst_margin < 0.0);
    }

    #[test]
    fn plateau_criterion_is_strict() {
        let (_, b) = exact();
        let lam = b.profile.lambda_eff();
        let p = b.profile.p;
        let res = plateau_test(&[(3.0, 0.0), (2.0, lam * 2f64.powf(p)), (1.0, 1.0)], &b.profile);
        assert_eq!(res, vec![true, false, true]);
    }

    #[test]
    fn boundary_barrier_values() {
        let bb = BoundaryBarrier::new(0.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(bb.a, 0.25);
        let e = bb.eval(&[1.0, 0.0]);
        assert_eq!(e.chi, 0.0);
        assert!((e.drift - 0.25f64.powi(3) * -0.75).abs() < 1e-15);
        assert!(e.drift < 0.0);
        assert!(bb.negativity_region(64).holds);
        assert!(matches!(
            BoundaryBarrier::new(0.0, 1.0, 1.0, 1.0, 0.0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn gradient_vanishes_at_plateau_edge() {
        let (_, b) = exact();
        let rho = b.profile.rho;
        let p = b.profile.p;
        for eps in [1e-2, 1e-4, 1e-6] {
            let q = (b.eval_barrier(&[rho + eps, 0.0]) - b.eval_barrier(&[rho, 0.0])) / eps;
            assert!(q <= 2.0 * b.profile.lambda_eff() * eps.powf(p - 1.0));
        }
    }

    #[test]
    fn residual_csv_header() {
        let (spec, b) = exact();
        let rec = ode_residual(&spec, &b, &[0.5]).unwrap();
        let text = residual_csv(&rec);
        assert!(text.starts_with("s,lhs,balanced_rhs,other_rhs,residual,ratio_other_over_lhs\n"));
    }
}
