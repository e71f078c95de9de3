//! Dead-core barriers and Liouville thresholds for
//! `Δ∞^β u = cH(u, ∇u) + λ f(|x|, u)`, where `Δ∞^β u = |∇u|^{−β}⟨D²u ∇u, ∇u⟩`.
//!
//! - [`model`]: parameter tuple, model terms, admissibility.
//! - [`balance`]: closed-form `(p, τ)` pairs and the dead-core thickness.
//! - [`barrier`]: radial barriers and their pointwise verification.
//! - [`radial`]: RK4 integration and shooting for the radial ODE.
//! - [`grid`]: monotone wide-stencil scheme on a 2-D disc.
//! - [`liouville`]: growth thresholds, classification, oscillation test.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balance;
pub mod barrier;
pub mod csv;
pub mod error;
pub mod grid;
pub mod liouville;
pub mod model;
pub mod radial;

pub use error::{Error, Result};
