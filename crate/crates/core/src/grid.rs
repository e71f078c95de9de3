//! Monotone wide-stencil scheme for `Δ∞^β u = cH + λf + h` on a 2-D disc.
//!
//! Each interior node looks along the lattice offsets `o` with
//! `max(|o₁|, |o₂|) = W`, sorted by angle; offsets leaving the disc are cut
//! at the circle and read the Dirichlet data there. For an up arm `j` and a
//! down arm `k` with slopes `a = (v_j − u)/ℓ_j`, `b = (u − v_k)/ℓ_k`,
//!
//! ```text
//! S_jk = Γ^{2−β} · 2(a − b)/(ℓ_j + ℓ_k),   Γ = (1−θ)·max(a,b) + θ·min(a,b)⁺,
//! S    = max_j min_{k ∈ K(j)} S_jk,
//! ```
//!
//! where `K(j)` is the antipode of `j` with its two angular neighbours and
//! `θ = min(1/2, 1/(3−β))`. Every `S_jk` is continuous, non-decreasing in the
//! neighbours and non-increasing in `u`, and so is `S`. For `β < 2` a
//! vanishing `Γ` gives `S = 0`. The Hamiltonian reads the upwind slope
//! `max_k (u − v_k)/ℓ_k`, which keeps the nodal map monotone.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csv::Table;
use crate::error::{Error, Result};
use crate::model::{eval_nonlinearity, HamiltonianKind, ModelSpec, NonlinearityKind};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITERS: usize = 50_000;
pub const DEFAULT_DAMPING: f64 = 0.5;
pub const DEFAULT_STENCIL_WIDTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    GaussSeidel,
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub tolerance: f64,
    pub max_iters: usize,
    pub damping: f64,
    pub mode: SweepMode,
    /// Radius subtracted from `|x − x₀|` before evaluating the weight of `f`.
    pub radius_offset: f64,
    /// Starting value at interior nodes.
    pub initial: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_iters: DEFAULT_MAX_ITERS,
            damping: DEFAULT_DAMPING,
            mode: SweepMode::GaussSeidel,
            radius_offset: 0.0,
            initial: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Interior,
    Boundary,
    Outside,
}

/// One stencil arm: a lattice neighbour or a point on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    pub node: Option<usize>,
    pub len: f64,
    pub point: [f64; 2],
    /// Dirichlet value for circle arms.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscGrid {
    pub center: [f64; 2],
    pub radius: f64,
    pub spacing: f64,
    /// Nodes per side, `2n + 1` with `n = ⌈R/ε⌉`.
    pub side: usize,
    pub stencil_width: usize,
    pub kinds: Vec<NodeKind>,
    pub values: Vec<f64>,
    arm_start: Vec<usize>,
    arms: Vec<Arm>,
}

fn lattice_ring(width: usize) -> Vec<(i64, i64)> {
    let w = width as i64;
    let mut out = Vec::with_capacity(8 * width);
    for i in -w..=w {
        for j in -w..=w {
            if i.abs().max(j.abs()) == w {
                out.push((i, j));
            }
        }
    }
    out.sort_by(|p, q| {
        let angle = |o: &(i64, i64)| (o.1 as f64).atan2(o.0 as f64);
        angle(p).total_cmp(&angle(q))
    });
    out
}

impl DiscGrid {
    /// Square lattice of spacing `ε` covering `B_R(center)`.
    pub fn new(center: [f64; 2], radius: f64, spacing: f64, stencil_width: usize) -> Result<Self> {
        if !(radius > 0.0 && spacing > 0.0) || !radius.is_finite() || !spacing.is_finite() {
            return Err(Error::InvalidInput(format!(
                "need R > 0 and ε > 0, got R = {radius}, ε = {spacing}"
            )));
        }
        if stencil_width == 0 {
            return Err(Error::InvalidInput("stencil width must be ≥ 1".into()));
        }
        let n = (radius / spacing - 1e-9).ceil() as usize;
        let side = 2 * n + 1;
        let tol = 1e-10 * radius;
        let mut kinds = vec![NodeKind::Outside; side * side];
        for row in 0..side {
            for col in 0..side {
                let (dx, dy) = ((col as f64 - n as f64) * spacing, (row as f64 - n as f64) * spacing);
                let r = dx.hypot(dy);
                kinds[row * side + col] = if r < radius - tol {
                    NodeKind::Interior
                } else if r <= radius + tol {
                    NodeKind::Boundary
                } else {
                    NodeKind::Outside
                };
            }
        }
        let ring = lattice_ring(stencil_width);
        let mut arm_start = vec![0; side * side + 1];
        let mut arms = Vec::new();
        for idx in 0..side * side {
            arm_start[idx] = arms.len();
            if kinds[idx] != NodeKind::Interior {
                continue;
            }
            let (row, col) = ((idx / side) as i64, (idx % side) as i64);
            let (x, y) = ((col - n as i64) as f64 * spacing, (row - n as i64) as f64 * spacing);
            for &(di, dj) in &ring {
                let (r2, c2) = (row + dj, col + di);
                let full = (di as f64 * spacing, dj as f64 * spacing);
                let full_len = full.0.hypot(full.1);
                let inside = r2 >= 0
                    && c2 >= 0
                    && (r2 as usize) < side
                    && (c2 as usize) < side
                    && kinds[r2 as usize * side + c2 as usize] != NodeKind::Outside;
                if inside {
                    arms.push(Arm {
                        node: Some(r2 as usize * side + c2 as usize),
                        len: full_len,
                        point: [center[0] + x + full.0, center[1] + y + full.1],
                        value: 0.0,
                    });
                } else {
                    // |x + t·o| = R on t ∈ (0, 1)
                    let a = full.0 * full.0 + full.1 * full.1;
                    let b = 2.0 * (x * full.0 + y * full.1);
                    let c = x * x + y * y - radius * radius;
                    let t = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
                    let (px, py) = (x + t * full.0, y + t * full.1);
                    arms.push(Arm {
                        node: None,
                        len: t * full_len,
                        point: [center[0] + px, center[1] + py],
                        value: 0.0,
                    });
                }
            }
        }
        arm_start[side * side] = arms.len();
        Ok(Self {
            center,
            radius,
            spacing,
            side,
            stencil_width,
            kinds,
            values: vec![0.0; side * side],
            arm_start,
            arms,
        })
    }

    /// Grid with `nodes_per_side` nodes across the diameter (odd).
    pub fn with_nodes(center: [f64; 2], radius: f64, nodes_per_side: usize, stencil_width: usize) -> Result<Self> {
        if nodes_per_side < 3 || nodes_per_side.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "nodes per side must be odd and ≥ 3, got {nodes_per_side}"
            )));
        }
        let n = (nodes_per_side - 1) / 2;
        Self::new(center, radius, radius / n as f64, stencil_width)
    }

    pub fn half_width(&self) -> usize {
        (self.side - 1) / 2
    }

    pub fn position(&self, idx: usize) -> [f64; 2] {
        let n = self.half_width() as f64;
        let (row, col) = ((idx / self.side) as f64, (idx % self.side) as f64);
        [
            self.center[0] + (col - n) * self.spacing,
            self.center[1] + (row - n) * self.spacing,
        ]
    }

    pub fn distance_to_center(&self, idx: usize) -> f64 {
        let p = self.position(idx);
        (p[0] - self.center[0]).hypot(p[1] - self.center[1])
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.kinds.len()).filter(|&i| self.kinds[i] == NodeKind::Interior).collect()
    }

    pub fn active_nodes(&self) -> Vec<usize> {
        (0..self.kinds.len()).filter(|&i| self.kinds[i] != NodeKind::Outside).collect()
    }

    pub fn arms(&self, idx: usize) -> &[Arm] {
        &self.arms[self.arm_start[idx]..self.arm_start[idx + 1]]
    }

    /// Writes `g` at boundary nodes and at the circle ends of truncated arms.
    pub fn apply_boundary(&mut self, g: &dyn Fn([f64; 2]) -> f64) {
        for idx in 0..self.kinds.len() {
            if self.kinds[idx] == NodeKind::Boundary {
                self.values[idx] = g(self.position(idx));
            }
        }
        for arm in &mut self.arms {
            if arm.node.is_none() {
                arm.value = g(arm.point);
            }
        }
    }

    fn arm_value(&self, arm: &Arm, values: &[f64]) -> f64 {
        match arm.node {
            Some(j) => values[j],
            None => arm.value,
        }
    }

    /// Bilinear interpolation of nodal values; `None` if a corner is outside.
    pub fn sample(&self, p: [f64; 2]) -> Option<f64> {
        let n = self.half_width() as f64;
        let fx = (p[0] - self.center[0]) / self.spacing + n;
        let fy = (p[1] - self.center[1]) / self.spacing + n;
        let max = (self.side - 1) as f64;
        if !(fx >= 0.0 && fy >= 0.0 && fx <= max && fy <= max) {
            return None;
        }
        let (c0, r0) = ((fx.floor() as usize).min(self.side - 2), (fy.floor() as usize).min(self.side - 2));
        let (tx, ty) = (fx - c0 as f64, fy - r0 as f64);
        let idx = |r: usize, c: usize| r * self.side + c;
        let corners = [idx(r0, c0), idx(r0, c0 + 1), idx(r0 + 1, c0), idx(r0 + 1, c0 + 1)];
        if corners.iter().any(|&i| self.kinds[i] == NodeKind::Outside) {
            return None;
        }
        let v = |i: usize| self.values[corners[i]];
        Some((1.0 - ty) * ((1.0 - tx) * v(0) + tx * v(1)) + ty * ((1.0 - tx) * v(2) + tx * v(3)))
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["x", "y", "u", "interior_flag"]);
        for idx in self.active_nodes() {
            let p = self.position(idx);
            let flag = if self.kinds[idx] == NodeKind::Interior { 1.0 } else { 0.0 };
            t.push(vec![p[0], p[1], self.values[idx], flag]);
        }
        t
    }

    pub fn to_csv(&self) -> String {
        self.to_table().to_csv()
    }
}

/// Weight of the opposite slope in the pair gradient; `1/(3−β)` is the
/// largest value keeping the pair term monotone.
pub fn pair_theta(beta: f64) -> f64 {
    (1.0 / (3.0 - beta)).min(0.5)
}

fn gradient_power(g: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        g * g
    } else if beta == 1.0 {
        g
    } else {
        g.powf(2.0 - beta)
    }
}

/// Pair term `Γ^{2−β}·2(a − b)/(ℓ_a + ℓ_b)` for the up slope `a` and the down
/// slope `b`. `Γ` leans on the larger slope and is clamped at 0.
pub fn pair_operator(beta: f64, a: f64, b: f64, len_a: f64, len_b: f64) -> f64 {
    let second = 2.0 * (a - b) / (len_a + len_b);
    if beta == 2.0 {
        return second;
    }
    let theta = pair_theta(beta);
    let g = if a >= b {
        (1.0 - theta) * a + theta * b.max(0.0)
    } else {
        (1.0 - theta) * b + theta * a.max(0.0)
    };
    if g <= 0.0 {
        0.0
    } else {
        gradient_power(g, beta) * second
    }
}

/// `max_j min_k` of pair terms, `k` running over the antipode of `j` and its
/// two angular neighbours. `arm(j)` yields `(v_j, ℓ_j)` in angular order.
fn ring_value(beta: f64, u: f64, n: usize, arm: impl Fn(usize) -> (f64, f64)) -> f64 {
    let half = n / 2;
    let mut best = f64::NEG_INFINITY;
    for j in 0..n {
        let (vj, lj) = arm(j);
        let a = (vj - u) / lj;
        let mut worst = f64::INFINITY;
        for k in [(j + half + n - 1) % n, (j + half) % n, (j + half + 1) % n] {
            let (vk, lk) = arm(k);
            worst = worst.min(pair_operator(beta, a, (u - vk) / lk, lj, lk));
            if worst <= best {
                break;
            }
        }
        best = best.max(worst);
    }
    best
}

/// Discrete `Δ∞^β` for centre value `u` and arms `(v_j, ℓ_j)` listed by angle.
pub fn ring_operator(beta: f64, u: f64, arms: &[(f64, f64)]) -> f64 {
    assert!(arms.len() >= 4 && arms.len().is_multiple_of(2), "ring needs an even number of arms");
    ring_value(beta, u, arms.len(), |j| arms[j])
}

/// Largest downhill slope `max_k (u − v_k)/ℓ_k`, clamped at 0.
pub fn upwind_slope(u: f64, arms: &[(f64, f64)]) -> f64 {
    arms.iter().fold(0.0f64, |acc, &(v, l)| acc.max((u - v) / l))
}

/// `cH` evaluated at the upwind slope.
fn upwind_hamiltonian(spec: &ModelSpec, u: f64, g: f64) -> f64 {
    match spec.hamiltonian {
        HamiltonianKind::None => 0.0,
        HamiltonianKind::GradientPower => spec.c * g.powf(spec.m),
        HamiltonianKind::PositiveMixed => spec.c * u.max(0.0).powf(spec.q) * g.powf(spec.m),
        HamiltonianKind::NegativeMixed => -spec.c * u.max(0.0).powf(spec.q) * g.powf(spec.m),
    }
}

/// Discrete `Δ∞^β` at an interior node with the grid's current values.
pub fn scheme_value(grid: &DiscGrid, beta: f64, node: usize) -> f64 {
    let arms = grid.arms(node);
    ring_value(beta, grid.values[node], arms.len(), |j| {
        (grid.arm_value(&arms[j], &grid.values), arms[j].len)
    })
}

struct Problem<'a> {
    spec: &'a ModelSpec,
    grid: &'a DiscGrid,
    shift: f64,
    radius_offset: f64,
}

impl Problem<'_> {
    /// `S − cH − λf − h` at `node` with trial value `u`; decreasing in `u`.
    /// With `upper`, a jump of `f` at `u = 0` is read from above.
    fn branch(&self, node: usize, u: f64, values: &[f64], upper: bool) -> Result<f64> {
        let g = self.grid;
        let arms = g.arms(node);
        let value = |j: usize| (g.arm_value(&arms[j], values), arms[j].len);
        let op = ring_value(self.spec.beta, u, arms.len(), value);
        let hamiltonian = match self.spec.hamiltonian {
            HamiltonianKind::None => 0.0,
            _ => {
                let slope = (0..arms.len()).fold(0.0f64, |acc, j| {
                    let (v, l) = value(j);
                    acc.max((u - v) / l)
                });
                upwind_hamiltonian(self.spec, u, slope)
            }
        };
        let r = (g.distance_to_center(node) - self.radius_offset).max(0.0);
        let f_arg = if upper && u == 0.0 { f64::MIN_POSITIVE } else { u };
        let f = eval_nonlinearity(self.spec, r, f_arg)?;
        Ok(op - hamiltonian - f - self.shift)
    }

    fn residual(&self, node: usize, u: f64, values: &[f64]) -> Result<f64> {
        self.branch(node, u, values, false)
    }

    /// `(u⁺)⁰` jumps at 0; the nodal equation then holds in the set-valued sense.
    fn has_jump(&self) -> bool {
        self.spec.gamma == 0.0 && self.spec.nonlinearity != NonlinearityKind::Exponential
    }

    /// Distance of 0 from the residual range at `u`.
    fn residual_abs(&self, node: usize, u: f64, values: &[f64]) -> Result<f64> {
        let below = self.branch(node, u, values, false)?;
        if u == 0.0 && self.has_jump() {
            let above = self.branch(node, u, values, true)?;
            return Ok(above.max(-below).max(0.0));
        }
        Ok(below.abs())
    }

    /// Root of the nodal equation by a bracketed Illinois iteration.
    fn solve_node(&self, node: usize, values: &[f64]) -> Result<f64> {
        let g = self.grid;
        let (mut lo, mut hi) = g.arms(node).iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), arm| {
            let v = g.arm_value(arm, values);
            (a.min(v), b.max(v))
        });
        let width0 = (hi - lo).max(1e-3 * (lo.abs() + hi.abs()).max(1e-6));
        let mut flo = self.residual(node, lo, values)?;
        let mut width = width0;
        let mut tries = 0;
        while flo < 0.0 {
            hi = lo;
            lo -= width;
            width *= 2.0;
            flo = self.residual(node, lo, values)?;
            tries += 1;
            if tries > 200 {
                return Err(Error::BracketError { lo, hi, reason: "nodal residual never positive".into() });
            }
        }
        if self.has_jump() && lo <= 0.0 && hi >= 0.0 {
            let below = self.branch(node, 0.0, values, false)?;
            let above = self.branch(node, 0.0, values, true)?;
            if below >= 0.0 && above <= 0.0 {
                return Ok(0.0);
            }
            if below < 0.0 {
                hi = 0.0;
            } else {
                lo = 0.0;
                flo = above;
            }
        }
        let mut fhi = self.residual(node, hi, values)?;
        width = width0;
        tries = 0;
        while fhi > 0.0 {
            lo = hi;
            flo = fhi;
            hi += width;
            width *= 2.0;
            fhi = self.residual(node, hi, values)?;
            tries += 1;
            if tries > 200 {
                return Err(Error::BracketError { lo, hi, reason: "nodal residual never negative".into() });
            }
        }
        if flo == 0.0 {
            return Ok(lo);
        }
        if fhi == 0.0 {
            return Ok(hi);
        }
        let mut side = 0i32;
        for _ in 0..200 {
            let mut x = (lo * fhi - hi * flo) / (fhi - flo);
            if !(x > lo && x < hi) {
                x = 0.5 * (lo + hi);
            }
            let fx = self.residual(node, x, values)?;
            if fx == 0.0 {
                return Ok(x);
            }
            if fx > 0.0 {
                lo = x;
                flo = fx;
                if side == 1 {
                    fhi *= 0.5;
                }
                side = 1;
            } else {
                hi = x;
                fhi = fx;
                if side == -1 {
                    flo *= 0.5;
                }
                side = -1;
            }
            if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1e-300) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn residual_inf(&self, nodes: &[usize], values: &[f64]) -> Result<f64> {
        nodes
            .par_iter()
            .map(|&i| self.residual_abs(i, values[i], values))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSolution {
    pub grid: DiscGrid,
    pub iterations: usize,
    pub residual_inf: f64,
    pub converged: bool,
}

impl GridSolution {
    /// `NotConverged` unless the residual reached the tolerance.
    pub fn ensure_converged(&self) -> Result<&Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                residual: self.residual_inf,
            })
        }
    }

    pub fn max_value(&self) -> f64 {
        self.grid
            .active_nodes()
            .iter()
            .fold(f64::NEG_INFINITY, |a, &i| a.max(self.grid.values[i]))
    }
}

/// Damped nonlinear Gauss–Seidel (row-major) or Jacobi sweeps on the nodal
/// equations until `max |S − cH − λf − h| ≤ tolerance`.
pub fn solve(
    spec: &ModelSpec,
    mut grid: DiscGrid,
    g: &dyn Fn([f64; 2]) -> f64,
    source_shift: f64,
    cfg: &GridConfig,
) -> Result<GridSolution> {
    spec.ensure_finite()?;
    if !(cfg.damping > 0.0 && cfg.damping <= 1.0) {
        return Err(Error::InvalidInput(format!("damping {} not in (0, 1]", cfg.damping)));
    }
    grid.apply_boundary(g);
    let interior = grid.interior_nodes();
    for &i in &interior {
        grid.values[i] = cfg.initial;
    }
    let mut values = grid.values.clone();
    let (residual, iterations) = {
        let problem = Problem {
            spec,
            grid: &grid,
            shift: source_shift,
            radius_offset: cfg.radius_offset,
        };
        let mut iterations = 0;
        let mut residual = problem.residual_inf(&interior, &values)?;
        while residual > cfg.tolerance && iterations < cfg.max_iters {
            match cfg.mode {
                SweepMode::GaussSeidel => {
                    for &i in &interior {
                        let target = problem.solve_node(i, &values)?;
                        values[i] += cfg.damping * (target - values[i]);
                    }
                }
                SweepMode::Jacobi => {
                    let targets: Vec<f64> = interior
                        .par_iter()
                        .map(|&i| problem.solve_node(i, &values))
                        .collect::<Result<_>>()?;
                    for (&i, t) in interior.iter().zip(targets) {
                        values[i] += cfg.damping * (t - values[i]);
                    }
                }
            }
            iterations += 1;
            residual = problem.residual_inf(&interior, &values)?;
        }
        (residual, iterations)
    };
    grid.values = values;
    Ok(GridSolution {
        grid,
        iterations,
        residual_inf: residual,
        converged: residual <= cfg.tolerance,
    })
}

/// `max |u(x) − u(O_θ x)|` over active nodes whose rotated image can be
/// sampled bilinearly.
pub fn rotation_invariance_check(sol: &GridSolution, angles: &[f64]) -> f64 {
    let grid = &sol.grid;
    let mut worst = 0.0f64;
    for &theta in angles {
        let (sn, cs) = theta.sin_cos();
        for idx in grid.active_nodes() {
            let p = grid.position(idx);
            let (dx, dy) = (p[0] - grid.center[0], p[1] - grid.center[1]);
            let q = [grid.center[0] + cs * dx - sn * dy, grid.center[1] + sn * dx + cs * dy];
            if let Some(v) = grid.sample(q) {
                worst = worst.max((grid.values[idx] - v).abs());
            }
        }
    }
    worst
}

/// Largest difference quotient over node pairs inside `B_{fraction·R}`.
pub fn lipschitz_estimate(sol: &GridSolution, fraction: f64) -> f64 {
    let grid = &sol.grid;
    let limit = fraction * grid.radius;
    let nodes: Vec<(usize, [f64; 2])> = grid
        .active_nodes()
        .into_iter()
        .filter(|&i| grid.distance_to_center(i) <= limit)
        .map(|i| (i, grid.position(i)))
        .collect();
    nodes
        .par_iter()
        .enumerate()
        .map(|(k, &(i, p))| {
            nodes[k + 1..].iter().fold(0.0f64, |acc, &(j, q)| {
                let dist = (p[0] - q[0]).hypot(p[1] - q[1]);
                acc.max((grid.values[i] - grid.values[j]).abs() / dist)
            })
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_abs() -> ModelSpec {
        ModelSpec::hardy_henon(0.0, 1.0, 0.0, 1.0)
    }

    #[test]
    fn lattice_ring_sizes() {
        assert_eq!(lattice_ring(1).len(), 8);
        assert_eq!(lattice_ring(2).len(), 16);
    }

    #[test]
    fn grid_layout() {
        let g = DiscGrid::with_nodes([0.0, 0.0], 1.0, 65, 2).unwrap();
        assert_eq!(g.side, 65);
        assert_eq!(g.half_width(), 32);
        let on_circle = g.kinds.iter().filter(|k| **k == NodeKind::Boundary).count();
        assert!(on_circle >= 4);
        for i in g.interior_nodes() {
            assert_eq!(g.arms(i).len(), 16);
            for a in g.arms(i) {
                assert!(a.len > 0.0 && a.len <= 2.0 * 2f64.sqrt() * g.spacing + 1e-12);
            }
        }
    }

    #[test]
    fn affine_and_constant_give_zero() {
        let mut g = DiscGrid::with_nodes([0.0, 0.0], 1.0, 17, 2).unwrap();
        g.apply_boundary(&|p| 0.3 * p[0] - 0.7 * p[1] + 2.0);
        for i in g.active_nodes() {
            let p = g.position(i);
            g.values[i] = 0.3 * p[0] - 0.7 * p[1] + 2.0;
        }
        for i in g.interior_nodes() {
            assert!(scheme_value(&g, 0.0, i).abs() < 1e-12);
            assert!(scheme_value(&g, 2.0, i).abs() < 1e-12);
        }
        for v in g.values.iter_mut() {
            *v = 5.0;
        }
        g.apply_boundary(&|_| 5.0);
        for i in g.interior_nodes() {
            assert_eq!(scheme_value(&g, 1.0, i), 0.0);
        }
    }

    #[test]
    fn normalized_quadratic_along_axis() {
        // u = x₁²/2 away from x₁ = 0: the gradient direction is a lattice axis.
        let mut g = DiscGrid::with_nodes([0.0, 0.0], 1.0, 33, 2).unwrap();
        g.apply_boundary(&|p| 0.5 * p[0] * p[0]);
        for i in g.active_nodes() {
            let p = g.position(i);
            g.values[i] = 0.5 * p[0] * p[0];
        }
        let n = g.half_width();
        let node = n * g.side + n + 8;
        assert!((scheme_value(&g, 2.0, node) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let g = DiscGrid::with_nodes([0.0, 0.0], 1.0, 17, 2).unwrap();
        let sol = solve(&spec_abs(), g, &|_| 0.0, 0.0, &GridConfig::default()).unwrap();
        assert_eq!(sol.iterations, 0);
        assert!(sol.converged);
        assert!(sol.grid.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn larger_source_lowers_solution() {
        let spec = spec_abs();
        let cfg = GridConfig::default();
        let a = solve(&spec, DiscGrid::with_nodes([0.0, 0.0], 2.0, 17, 2).unwrap(), &|_| 1.0, 0.0, &cfg).unwrap();
        let b = solve(&spec, DiscGrid::with_nodes([0.0, 0.0], 2.0, 17, 2).unwrap(), &|_| 1.0, 0.05, &cfg).unwrap();
        assert!(a.converged && b.converged);
        for i in a.grid.interior_nodes() {
            assert!(b.grid.values[i] <= a.grid.values[i] + 1e-12);
        }
    }

    #[test]
    fn constant_solution_is_rotation_invariant() {
        let mut spec = spec_abs();
        spec.gamma = 1.0;
        let g = DiscGrid::with_nodes([0.0, 0.0], 1.0, 17, 2).unwrap();
        let sol = solve(&spec, g, &|_| 0.0, 0.0, &GridConfig::default()).unwrap();
        assert_eq!(rotation_invariance_check(&sol, &[0.3, 1.0]), 0.0);
        assert_eq!(lipschitz_estimate(&sol, 0.8), 0.0);
    }

    #[test]
    fn csv_lists_active_nodes() {
        let g = DiscGrid::with_nodes([0.0, 0.0], 1.0, 9, 1).unwrap();
        let n_active = g.active_nodes().len();
        let text = g.to_csv();
        assert!(text.starts_with("x,y,u,interior_flag\n"));
        assert_eq!(text.lines().count(), n_active + 1);
    }

    fn exact_balance_deviation(nodes: usize) -> (f64, f64) {
        use crate::balance::select_profile;
        use crate::barrier::RadialBarrier;
        let spec = ModelSpec::hardy_henon(0.0, 0.0, 0.0, 1.0);
        let b = RadialBarrier::at_origin(select_profile(&spec, 1.8).unwrap(), 2).unwrap();
        let g = DiscGrid::with_nodes([0.0, 0.0], 1.8, nodes, 2).unwrap();
        let sol = solve(&spec, g, &|_| 1.0, 0.0, &GridConfig::default()).unwrap();
        assert!(sol.converged);
        let dev = sol
            .grid
            .active_nodes()
            .iter()
            .map(|&i| (sol.grid.values[i] - b.eval_barrier(&sol.grid.position(i))).abs())
            .fold(0.0, f64::max);
        (dev, sol.grid.spacing)
    }

    #[test]
    fn exact_balance_solution_approaches_barrier() {
        let (coarse, eps_coarse) = exact_balance_deviation(17);
        let (fine, eps_fine) = exact_balance_deviation(33);
        assert!(fine < coarse, "{fine} !< {coarse}");
        assert!(fine < 0.5 * eps_fine && coarse < 0.5 * eps_coarse);
    }

    #[test]
    fn jacobi_matches_gauss_seidel() {
        let spec = ModelSpec::hardy_henon(1.0, 0.5, 0.0, 1.0);
        let run = |mode| {
            let g = DiscGrid::with_nodes([0.0, 0.0], 1.5, 17, 2).unwrap();
            solve(&spec, g, &|p| 1.0 + 0.2 * p[0], 0.0, &GridConfig { mode, ..Default::default() }).unwrap()
        };
        let (a, b) = (run(SweepMode::GaussSeidel), run(SweepMode::Jacobi));
        assert!(a.converged && b.converged);
        let gap = a.grid.values.iter().zip(&b.grid.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-6, "gap {gap}");
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let g = DiscGrid::with_nodes([0.0, 0.0], 1.0, 17, 2).unwrap();
        let cfg = GridConfig { max_iters: 2, ..Default::default() };
        let sol = solve(&spec_abs(), g, &|_| 1.0, 0.0, &cfg).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iterations, 2);
        assert!(matches!(sol.ensure_converged(), Err(Error::NotConverged { iterations: 2, .. })));
    }

    #[test]
    fn bad_damping_rejected() {
        let g = DiscGrid::with_nodes([0.0, 0.0], 1.0, 9, 1).unwrap();
        let cfg = GridConfig { damping: 0.0, ..Default::default() };
        assert!(solve(&spec_abs(), g, &|_| 1.0, 0.0, &cfg).is_err());
    }

    #[test]
    fn rings_are_angularly_sorted_and_symmetric() {
        for w in 1..=3 {
            let ring = lattice_ring(w);
            let n = ring.len();
            for j in 0..n {
                let (a, b) = (ring[j], ring[(j + n / 2) % n]);
                assert_eq!((a.0 + b.0, a.1 + b.1), (0, 0));
            }
        }
    }
}
