//! Radial ODE `(h′)^{2−β} h″ = cH(h, h′) + λ f(s, h)` and dead-core shooting.
//!
//! From the degenerate seed `(0, 0)` the solution leaves the dead core along
//! `h ≈ Λ s^p`. That branch is integrated in Emden–Fowler variables, where the
//! singular start becomes a fixed point approached as `ln s → −∞`; the window
//! below its lower end is filled with the leading power law. Regular seeds
//! are integrated on `(h, (h′)^{3−β})` over a uniform grid.

use serde::{Deserialize, Serialize};

use crate::balance::{balanced_pair, select_profile, uses_lem_weight, Dominant};
use crate::barrier::{radial_operator, RadialBarrier};
use crate::csv::Table;
use crate::error::{Error, Result};
use crate::model::{eval_hamiltonian, eval_nonlinearity, lem_weight, HamiltonianKind, ModelSpec, NonlinearityKind};

pub const DEFAULT_STEPS: usize = 2000;
pub const OVERFLOW_LIMIT: f64 = 1e12;
/// Shooting stops once `|h(T) − d| ≤ SHOOT_RTOL·d`.
pub const SHOOT_RTOL: f64 = 1e-8;

/// Radius at which the zeroth-order weight is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// `f(s, h)` at the current `s`.
    #[default]
    Pointwise,
    /// Weight frozen at a fixed radius (the worst case `s = T` for LEM).
    FrozenAt(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvpOptions {
    pub weight: WeightMode,
    /// Also integrate with half the steps and report `|Δh|/15`.
    pub richardson: bool,
}

impl Default for IvpOptions {
    fn default() -> Self {
        Self {
            weight: WeightMode::Pointwise,
            richardson: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub s_grid: Vec<f64>,
    pub h_vals: Vec<f64>,
    pub hp_vals: Vec<f64>,
    /// `(h′)^{2−β}h″ − cH − λf` at interior nodes, with `h″` from a
    /// three-point difference of `h′`; 0 at the end points.
    pub residuals: Vec<f64>,
    /// First `s` with `h(s) = d`, if reached.
    pub measured_t: Option<f64>,
    pub error_estimate: Option<f64>,
    pub spec: ModelSpec,
}

impl RadialSolution {
    pub fn s_end(&self) -> f64 {
        *self.s_grid.last().expect("non-empty grid")
    }

    /// Cubic Hermite interpolant of `h`; 0 for `s ≤ 0`, clamped at the end.
    pub fn value_at(&self, s: f64) -> f64 {
        if s <= self.s_grid[0] {
            return self.h_vals[0];
        }
        let n = self.s_grid.len();
        if s >= self.s_grid[n - 1] {
            return self.h_vals[n - 1];
        }
        let i = self.s_grid.partition_point(|&x| x <= s) - 1;
        let (s0, s1) = (self.s_grid[i], self.s_grid[i + 1]);
        let dx = s1 - s0;
        let t = (s - s0) / dx;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.h_vals[i]
            + (t3 - 2.0 * t2 + t) * dx * self.hp_vals[i]
            + (-2.0 * t3 + 3.0 * t2) * self.h_vals[i + 1]
            + (t3 - t2) * dx * self.hp_vals[i + 1]
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, r| a.max(r.abs()))
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["s", "h", "hp", "residual"]);
        for i in 0..self.s_grid.len() {
            t.push(vec![self.s_grid[i], self.h_vals[i], self.hp_vals[i], self.residuals[i]]);
        }
        t
    }

    pub fn to_csv(&self) -> String {
        self.to_table().to_csv()
    }
}

/// `cH(h, h′) + λ f(s, h)` with the chosen weight radius.
fn forcing(spec: &ModelSpec, weight: WeightMode, s: f64, h: f64, hp: f64) -> Result<f64> {
    let radius = match weight {
        WeightMode::Pointwise => s,
        WeightMode::FrozenAt(r) => r,
    };
    Ok(eval_hamiltonian(spec, h, hp)? + eval_nonlinearity(spec, radius, h)?)
}

/// Leading-order branch `h ≈ Λ s^p` leaving the dead core, with the exponent
/// of each right-hand term relative to the left side along it.
struct Branch {
    coeff: f64,
    p: f64,
    dominant: Dominant,
    /// `(p−1)(3−β) − 1`: the power of `s` in `(h′)^{2−β}h″` for `h = s^p`.
    lhs_exp: f64,
    /// Smallest positive gap between the two right-hand exponents.
    gap: f64,
}

fn branch(spec: &ModelSpec, weight: WeightMode) -> Result<Branch> {
    let (pair, dominant) = balanced_pair(spec)?;
    let mut coeff = pair.tau;
    if uses_lem_weight(spec, dominant) {
        let w0 = match weight {
            WeightMode::Pointwise => 1.0,
            WeightMode::FrozenAt(r) => lem_weight(spec.alpha, r),
        };
        coeff *= w0.powf(1.0 / spec.absorption_index());
    }
    let p = pair.p;
    let lhs_exp = (p - 1.0) * (3.0 - spec.beta) - 1.0;
    let mut gap = match dominant {
        Dominant::ExactBalance => f64::INFINITY,
        Dominant::Absorption => gradient_exp(spec, p) - lhs_exp,
        Dominant::Gradient => absorption_exp(spec, p) - lhs_exp,
    };
    if spec.nonlinearity == NonlinearityKind::LaneEmdenMatukuma
        && spec.alpha != 0.0
        && weight == WeightMode::Pointwise
    {
        // (1+s²)^{−α} = 1 − αs² + …
        gap = gap.min(2.0);
    }
    Ok(Branch {
        coeff,
        p,
        dominant,
        lhs_exp,
        gap,
    })
}

fn gradient_exp(spec: &ModelSpec, p: f64) -> f64 {
    let q = if spec.hamiltonian.is_mixed() { spec.q } else { 0.0 };
    (p - 1.0) * spec.m + p * q
}

fn absorption_exp(spec: &ModelSpec, p: f64) -> f64 {
    let alpha = match spec.nonlinearity {
        NonlinearityKind::HardyHenon => spec.alpha,
        _ => 0.0,
    };
    alpha + p * spec.gamma
}

struct Raw {
    s: Vec<f64>,
    h: Vec<f64>,
    hp: Vec<f64>,
}

/// Length in `ln s` of the integration window below `s_end`.
fn log_window(gap: f64) -> f64 {
    (36.0 / gap).clamp(30.0, 690.0)
}

/// Dead-core branch in Emden–Fowler variables: `s = e^t`, `h = s^p H`,
/// `h′ = s^{p−1} P`. The ODE becomes
/// `H′ = P − pH`, `P′ = P^{β−2} G(t, H, P) − (p−1)P`, where `G` is the right
/// side scaled by `s^{−lhs_exp}`. The balanced term in `G` carries no power of
/// `s`, the other term decays like `e^{gap·t}`, so the system is smooth on
/// `(−∞, ln s_end]` with `(H, P) → (Λ, pΛ)` as `t → −∞`.
fn integrate_branch(spec: &ModelSpec, s_end: f64, steps: usize, weight: WeightMode) -> Result<Raw> {
    let br = branch(spec, weight)?;
    let (p, e) = (br.p, br.lhs_exp);
    let t_end = s_end.ln();
    let t0 = t_end - log_window(br.gap);
    let dt = (t_end - t0) / steps as f64;
    let beta = spec.beta;

    let positive_pow = |x: f64, k: f64| if x > 0.0 { x.powf(k) } else { 0.0 };
    let g_term = |t: f64, hh: f64, pp: f64| -> Result<f64> {
        let grad = match spec.hamiltonian {
            HamiltonianKind::None => 0.0,
            HamiltonianKind::GradientPower => spec.c * positive_pow(pp, spec.m),
            HamiltonianKind::PositiveMixed => {
                spec.c * positive_pow(hh, spec.q) * positive_pow(pp, spec.m)
            }
            HamiltonianKind::NegativeMixed => {
                -spec.c * positive_pow(hh, spec.q) * positive_pow(pp, spec.m)
            }
        };
        let grad_scale = match br.dominant {
            Dominant::Gradient => 1.0,
            _ => ((gradient_exp(spec, p) - e) * t).exp(),
        };
        let weight_factor = match spec.nonlinearity {
            NonlinearityKind::HardyHenon => 1.0,
            NonlinearityKind::LaneEmdenMatukuma => match weight {
                WeightMode::Pointwise => lem_weight(spec.alpha, t.exp()),
                WeightMode::FrozenAt(r) => lem_weight(spec.alpha, r),
            },
            NonlinearityKind::Exponential => {
                return Err(Error::Unsupported("exponential nonlinearity has no dead-core branch".into()))
            }
        };
        let abs_scale = match br.dominant {
            Dominant::Gradient => ((absorption_exp(spec, p) - e) * t).exp(),
            _ => 1.0,
        };
        let absorption = spec.lambda * weight_factor * positive_pow(hh, spec.gamma);
        Ok(grad * grad_scale + absorption * abs_scale)
    };
    let deriv = |t: f64, hh: f64, pp: f64| -> Result<(f64, f64)> {
        if !(pp > 0.0) {
            return Err(Error::DegenerateGradient(t.exp()));
        }
        let g = g_term(t, hh, pp)?;
        let drive = if beta == 2.0 { g } else { g * pp.powf(beta - 2.0) };
        Ok((pp - p * hh, drive - (p - 1.0) * pp))
    };

    let n = steps + 2;
    let (mut s, mut h, mut hp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut hh, mut pp) = (br.coeff, p * br.coeff);
    for j in 0..=steps {
        let t = if j == steps { t_end } else { t0 + dt * j as f64 };
        if j > 0 {
            let tp = t0 + dt * (j - 1) as f64;
            let k1 = deriv(tp, hh, pp)?;
            let k2 = deriv(tp + 0.5 * dt, hh + 0.5 * dt * k1.0, pp + 0.5 * dt * k1.1)?;
            let k3 = deriv(tp + 0.5 * dt, hh + 0.5 * dt * k2.0, pp + 0.5 * dt * k2.1)?;
            let k4 = deriv(tp + dt, hh + dt * k3.0, pp + dt * k3.1)?;
            hh += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            pp += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        let sj = if j == steps { s_end } else { t.exp() };
        let (hj, hpj) = (sj.powf(p) * hh, sj.powf(p - 1.0) * pp);
        if !hj.is_finite() || hj > OVERFLOW_LIMIT {
            return Err(Error::Overflow(sj));
        }
        s[j + 1] = sj;
        h[j + 1] = hj;
        hp[j + 1] = hpj;
    }
    Ok(Raw { s, h, hp })
}

/// RK4 on `(h, w = (h′)^{3−β})` over a uniform grid from a regular seed.
fn integrate_seeded(spec: &ModelSpec, s_end: f64, steps: usize, seed: (f64, f64), weight: WeightMode) -> Result<Raw> {
    let kappa = 3.0 - spec.beta;
    let ds = s_end / steps as f64;
    let s: Vec<f64> = (0..=steps).map(|i| if i == steps { s_end } else { ds * i as f64 }).collect();
    let mut h = vec![0.0; steps + 1];
    let mut w = vec![0.0; steps + 1];
    h[0] = seed.0;
    w[0] = seed.1.powf(kappa);

    let deriv = |s: f64, h: f64, w: f64| -> Result<(f64, f64)> {
        let hp = w.max(0.0).powf(1.0 / kappa);
        Ok((hp, kappa * forcing(spec, weight, s, h, hp)?))
    };

    for i in 0..steps {
        let (si, dt) = (s[i], s[i + 1] - s[i]);
        let (hi, wi) = (h[i], w[i]);
        let k1 = deriv(si, hi, wi)?;
        let k2 = deriv(si + 0.5 * dt, hi + 0.5 * dt * k1.0, wi + 0.5 * dt * k1.1)?;
        let k3 = deriv(si + 0.5 * dt, hi + 0.5 * dt * k2.0, wi + 0.5 * dt * k2.1)?;
        let k4 = deriv(si + dt, hi + dt * k3.0, wi + dt * k3.1)?;
        h[i + 1] = hi + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        w[i + 1] = wi + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if !h[i + 1].is_finite() || h[i + 1] > OVERFLOW_LIMIT {
            return Err(Error::Overflow(s[i + 1]));
        }
        if w[i + 1] < 0.0 || (w[i + 1] == 0.0 && wi > 0.0 && spec.beta < 2.0) {
            return Err(Error::DegenerateGradient(s[i + 1]));
        }
    }
    let hp = w.iter().map(|&w| w.max(0.0).powf(1.0 / kappa)).collect();
    Ok(Raw { s, h, hp })
}

fn integrate_raw(spec: &ModelSpec, s_end: f64, steps: usize, seed: (f64, f64), weight: WeightMode) -> Result<Raw> {
    if seed == (0.0, 0.0) {
        integrate_branch(spec, s_end, steps, weight)
    } else {
        integrate_seeded(spec, s_end, steps, seed, weight)
    }
}

fn is_trivial(spec: &ModelSpec, seed: (f64, f64)) -> bool {
    seed == (0.0, 0.0) && spec.lambda == 0.0 && spec.hamiltonian == HamiltonianKind::None
}

/// First crossing of `d` by the Hermite interpolant, if any.
fn first_crossing(sol: &RadialSolution, d: f64) -> Option<f64> {
    let idx = sol.h_vals.iter().position(|&h| h >= d)?;
    if idx == 0 {
        return Some(sol.s_grid[0]);
    }
    let (mut lo, mut hi) = (sol.s_grid[idx - 1], sol.s_grid[idx]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sol.value_at(mid) < d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn residuals(spec: &ModelSpec, weight: WeightMode, s: &[f64], h: &[f64], hp: &[f64]) -> Result<Vec<f64>> {
    let n = s.len();
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let (a, b) = (s[i] - s[i - 1], s[i + 1] - s[i]);
        if a <= 0.0 || b <= 0.0 {
            continue;
        }
        let hpp = -b / (a * (a + b)) * hp[i - 1] + (b - a) / (a * b) * hp[i] + a / (b * (a + b)) * hp[i + 1];
        out[i] = radial_operator(spec.beta, hp[i], hpp) - forcing(spec, weight, s[i], h[i], hp[i])?;
    }
    Ok(out)
}

/// RK4 integration of the radial ODE from `s = 0` to `s_end`.
pub fn integrate_ivp(spec: &ModelSpec, s_end: f64, steps: usize, seed: (f64, f64)) -> Result<RadialSolution> {
    integrate_ivp_with(spec, s_end, steps, seed, &IvpOptions::default())
}

pub fn integrate_ivp_with(
    spec: &ModelSpec,
    s_end: f64,
    steps: usize,
    seed: (f64, f64),
    opts: &IvpOptions,
) -> Result<RadialSolution> {
    spec.ensure_finite()?;
    if steps < 16 {
        return Err(Error::InvalidInput(format!("steps = {steps} < 16")));
    }
    if !(s_end > 0.0) || !s_end.is_finite() {
        return Err(Error::InvalidInput(format!("s_end = {s_end} must be positive")));
    }
    if !(seed.0 >= 0.0 && seed.1 >= 0.0) || !seed.0.is_finite() || !seed.1.is_finite() {
        return Err(Error::InvalidInput(format!("seed {seed:?} must be non-negative")));
    }
    if is_trivial(spec, seed) {
        let s: Vec<f64> = (0..=steps).map(|i| s_end * i as f64 / steps as f64).collect();
        let zeros = vec![0.0; steps + 1];
        return Ok(RadialSolution {
            s_grid: s,
            h_vals: zeros.clone(),
            hp_vals: zeros.clone(),
            residuals: zeros,
            measured_t: None,
            error_estimate: Some(0.0),
            spec: *spec,
        });
    }

    let raw = integrate_raw(spec, s_end, steps, seed, opts.weight)?;
    let error_estimate = if opts.richardson && steps.is_multiple_of(2) && steps >= 32 {
        let coarse = integrate_raw(spec, s_end, steps / 2, seed, opts.weight)?;
        // The dead-core branch prepends the origin, shifting node indices by one.
        let fine_index = |j: usize| if seed == (0.0, 0.0) && j > 0 { 2 * j - 1 } else { 2 * j };
        let diff = coarse
            .h
            .iter()
            .enumerate()
            .fold(0.0f64, |acc, (j, &hc)| acc.max((raw.h[fine_index(j)] - hc).abs()));
        Some(diff / 15.0)
    } else {
        None
    };
    let res = residuals(spec, opts.weight, &raw.s, &raw.h, &raw.hp)?;
    let mut sol = RadialSolution {
        s_grid: raw.s,
        h_vals: raw.h,
        hp_vals: raw.hp,
        residuals: res,
        measured_t: None,
        error_estimate,
        spec: *spec,
    };
    sol.measured_t = first_crossing(&sol, spec.d);
    Ok(sol)
}

/// Shooting configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootOptions {
    pub steps: usize,
    pub weight: WeightMode,
    pub max_iterations: usize,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            weight: WeightMode::Pointwise,
            max_iterations: 200,
        }
    }
}

/// `h_L(L) − d` for the solution integrated over `[0, L]`; overflow counts as
/// overshooting.
fn end_gap(spec: &ModelSpec, d: f64, length: f64, opts: &ShootOptions) -> Result<(f64, Option<RadialSolution>)> {
    let ivp = IvpOptions {
        weight: opts.weight,
        richardson: false,
    };
    match integrate_ivp_with(spec, length, opts.steps, (0.0, 0.0), &ivp) {
        Ok(sol) => Ok((sol.h_vals[sol.h_vals.len() - 1] - d, Some(sol))),
        Err(Error::Overflow(_)) => Ok((f64::INFINITY, None)),
        Err(e) => Err(e),
    }
}

/// Finds `T` with `h(0) = h′(0) = 0`, `h(T) = d` by bisection on the length.
pub fn shoot_bvp(spec: &ModelSpec, d: f64, bracket: (f64, f64)) -> Result<(f64, RadialSolution)> {
    shoot_bvp_with(spec, d, bracket, &ShootOptions::default())
}

pub fn shoot_bvp_with(
    spec: &ModelSpec,
    d: f64,
    bracket: (f64, f64),
    opts: &ShootOptions,
) -> Result<(f64, RadialSolution)> {
    let (mut lo, mut hi) = bracket;
    if !(d > 0.0) {
        return Err(Error::InvalidInput(format!("d = {d} must be positive")));
    }
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::BracketError {
            lo,
            hi,
            reason: "need 0 < lo < hi".into(),
        });
    }
    let (g_lo, _) = end_gap(spec, d, lo, opts)?;
    let (g_hi, _) = end_gap(spec, d, hi, opts)?;
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(Error::BracketError {
            lo,
            hi,
            reason: format!("h(lo) − d = {g_lo:e} and h(hi) − d = {g_hi:e} do not straddle 0"),
        });
    }
    for _ in 0..opts.max_iterations {
        let mid = 0.5 * (lo + hi);
        let (g, sol) = end_gap(spec, d, mid, opts)?;
        if let Some(sol) = sol {
            if g.abs() <= SHOOT_RTOL * d {
                return Ok((mid, sol));
            }
        }
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    let (g, sol) = end_gap(spec, d, mid, opts)?;
    match sol {
        Some(sol) if g.abs() <= SHOOT_RTOL * d => Ok((mid, sol)),
        _ => Err(Error::NotConverged {
            iterations: opts.max_iterations,
            residual: g.abs() / d,
        }),
    }
}

/// Comparison of the shot dead-core solution with the closed-form barrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeadCoreMeasurement {
    pub rho_measured: f64,
    pub t_measured: f64,
    pub rho_predicted: f64,
    pub t_predicted: f64,
    /// `max |u − barrier| / d` over the annulus.
    pub max_rel_deviation: f64,
    /// `max (u − barrier) / d`; `≤ 0` when the barrier lies above.
    pub max_excess: f64,
    /// `max |u|` over sampled points with `|x − x₀| < ρ_measured`.
    pub plateau_max: f64,
    pub solution: RadialSolution,
}

fn expand_bracket(spec: &ModelSpec, d: f64, guess: f64, opts: &ShootOptions) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (0.5 * guess, 2.0 * guess);
    for _ in 0..60 {
        if end_gap(spec, d, lo, opts)?.0 < 0.0 {
            break;
        }
        lo *= 0.5;
    }
    for _ in 0..60 {
        if end_gap(spec, d, hi, opts)?.0 > 0.0 {
            break;
        }
        hi *= 2.0;
    }
    Ok((lo, hi))
}

/// Shoots the dead-core solution for a ball of radius `R` with datum `d` and
/// compares `u(x) = h(|x−x₀| − ρ)` with the barrier on `samples` radii.
pub fn measure_deadcore(spec: &ModelSpec, radius: f64, d: f64) -> Result<DeadCoreMeasurement> {
    measure_deadcore_with(spec, radius, d, &ShootOptions::default(), 400)
}

pub fn measure_deadcore_with(
    spec: &ModelSpec,
    radius: f64,
    d: f64,
    opts: &ShootOptions,
    samples: usize,
) -> Result<DeadCoreMeasurement> {
    let spec_d = spec.with_datum(d);
    let profile = select_profile(&spec_d, radius)?;
    let barrier = RadialBarrier::at_origin(profile, 1)?;
    let (lo, hi) = expand_bracket(&spec_d, d, profile.thickness, opts)?;
    let (t_found, solution) = shoot_bvp_with(&spec_d, d, (lo, hi), opts)?;
    if t_found >= radius {
        return Err(Error::NoDeadCore {
            radius,
            thickness: t_found,
        });
    }
    let rho_m = radius - t_found;
    let samples = samples.max(2);
    let (mut dev, mut excess, mut plateau) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    for i in 0..=samples {
        let r = radius * i as f64 / samples as f64;
        let s = r - rho_m;
        let u = if s <= 0.0 { 0.0 } else { solution.value_at(s) };
        let v = barrier.eval_barrier(&[r]);
        if r < rho_m {
            plateau = plateau.max(u.abs());
        } else {
            dev = dev.max((u - v).abs() / d);
            excess = excess.max((u - v) / d);
        }
    }
    Ok(DeadCoreMeasurement {
        rho_measured: rho_m,
        t_measured: t_found,
        rho_predicted: profile.rho,
        t_predicted: profile.thickness,
        max_rel_deviation: dev,
        max_excess: excess,
        plateau_max: plateau,
        solution,
    })
}

/// Worst-case LEM weight `φ(T)` for the implicit thickness of `spec`.
pub fn lem_frozen_weight(spec: &ModelSpec, radius: f64) -> Result<WeightMode> {
    let prof = select_profile(spec, radius)?;
    if spec.nonlinearity == NonlinearityKind::LaneEmdenMatukuma && prof.dominant != Dominant::Gradient {
        Ok(WeightMode::FrozenAt(prof.thickness))
    } else {
        Ok(WeightMode::Pointwise)
    }
}
