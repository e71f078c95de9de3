#![allow(dead_code)]

use deadcore::balance::balanced_pair;
use deadcore::model::{validate_admissible, HamiltonianKind, ModelSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn admissible(spec: &ModelSpec) -> bool {
    validate_admissible(spec).map(|r| r.is_admissible()).unwrap_or(false) && balanced_pair(spec).is_ok()
}

/// Pure-absorption Hardy–Hénon spec; `beta_two` pins β = 2.
pub fn hardy_henon(rng: &mut ChaCha8Rng, beta_two: bool) -> ModelSpec {
    loop {
        let beta = if beta_two { 2.0 } else { rng.gen_range(0.0..2.0) };
        let gamma = rng.gen_range(0.0..0.95 * (3.0 - beta));
        let alpha = rng.gen_range(-0.9 * (1.0 + gamma)..3.0);
        let lambda = rng.gen_range(0.1..5.0);
        let spec = ModelSpec::hardy_henon(beta, gamma, alpha, lambda);
        if admissible(&spec) {
            return spec;
        }
    }
}

/// Hardy–Hénon spec with one of the three Hamiltonians.
pub fn with_gradient(rng: &mut ChaCha8Rng) -> ModelSpec {
    loop {
        let base = hardy_henon(rng, false);
        let beta = base.beta;
        let m = rng.gen_range(0.05..0.95) * (3.0 - beta);
        let kind = match rng.gen_range(0..3) {
            0 => HamiltonianKind::GradientPower,
            1 => HamiltonianKind::PositiveMixed,
            _ => HamiltonianKind::NegativeMixed,
        };
        let q = if kind == HamiltonianKind::GradientPower {
            0.0
        } else {
            rng.gen_range(0.05..0.95) * (3.0 - beta - m)
        };
        let c = rng.gen_range(0.1..4.0);
        let c = if kind == HamiltonianKind::NegativeMixed { -c } else { c };
        let spec = base.with_hamiltonian(kind, c, m, q);
        if admissible(&spec) {
            return spec;
        }
    }
}
