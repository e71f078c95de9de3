//! Spec file loading, `--set` overrides and per-run options.

use std::path::Path;

use deadcore::grid::{SweepMode, DEFAULT_DAMPING, DEFAULT_MAX_ITERS, DEFAULT_TOLERANCE};
use deadcore::model::ModelSpec;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::CliError;

/// Keys that belong to the model itself; everything else is a run option.
const SPEC_KEYS: [&str; 10] = [
    "beta",
    "m",
    "q",
    "gamma",
    "alpha",
    "lambda",
    "c",
    "d",
    "hamiltonian",
    "nonlinearity",
];

/// Knobs that are not part of the model. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunOptions {
    /// Ball radius; defaults to twice the dead-core thickness.
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    /// Sample count for residual, profile and counterexample tables.
    pub samples: usize,
    /// Grid spacing; overrides `nodes` when set.
    pub epsilon: Option<f64>,
    /// Nodes per side of the grid box (odd).
    pub nodes: usize,
    /// Stencil directions, a multiple of 8.
    pub stencil_dirs: usize,
    pub max_iters: usize,
    pub damping: f64,
    pub tolerance: f64,
    pub mode: SweepMode,
    /// Freeze the LEM weight at `T` when shooting.
    pub frozen_weight: bool,
    /// Radii of the witness ladder.
    pub ladder: Vec<f64>,
    /// Multiplier on the witness `θ·D(R)`.
    pub witness_scale: f64,
    /// Measured `(R, sup_{|x|=R} u)` pairs to classify.
    pub growth_samples: Option<Vec<[f64; 2]>>,
    /// Datum fraction `Φ` for the plateau-fraction check.
    pub phi: f64,
    pub consistency_ladder: Vec<f64>,
    /// Upper end of the counterexample radii.
    pub r_max: f64,
    /// Radii for the oscillation ladder.
    pub osc_ladder: Vec<f64>,
    pub osc_tolerance: f64,
    pub sweep_beta: Option<Vec<f64>>,
    pub sweep_gamma: Option<Vec<f64>>,
    pub sweep_alpha: Option<Vec<f64>>,
    pub sweep_m: Option<Vec<f64>>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            radius: None,
            samples: 300,
            epsilon: None,
            nodes: 65,
            stencil_dirs: 16,
            max_iters: DEFAULT_MAX_ITERS,
            damping: DEFAULT_DAMPING,
            tolerance: DEFAULT_TOLERANCE,
            mode: SweepMode::GaussSeidel,
            frozen_weight: true,
            ladder: vec![1.0, 2.0, 4.0, 8.0],
            witness_scale: 1.0,
            growth_samples: None,
            phi: 0.5,
            consistency_ladder: vec![2.0, 4.0, 8.0],
            r_max: 5.0,
            osc_ladder: (1..=10).map(f64::from).collect(),
            osc_tolerance: 0.2,
            sweep_beta: None,
            sweep_gamma: None,
            sweep_alpha: None,
            sweep_m: None,
        }
    }
}

impl RunOptions {
    fn check(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("R = {r} must be positive"));
            }
        }
        if self.samples < 2 {
            return bad(format!("samples = {} must be at least 2", self.samples));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("epsilon = {e} must be positive"));
            }
        }
        if self.nodes < 5 || self.nodes.is_multiple_of(2) {
            return bad(format!("nodes = {} must be odd and at least 5", self.nodes));
        }
        if self.stencil_dirs < 8 || !self.stencil_dirs.is_multiple_of(8) {
            return bad(format!("stencil_dirs = {} must be a positive multiple of 8", self.stencil_dirs));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad(format!("damping = {} must lie in (0, 1]", self.damping));
        }
        if !(self.tolerance > 0.0) {
            return bad(format!("tolerance = {} must be positive", self.tolerance));
        }
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return bad(format!("phi = {} must lie in (0, 1)", self.phi));
        }
        if !(self.witness_scale > 0.0) {
            return bad(format!("witness_scale = {} must be positive", self.witness_scale));
        }
        if !(self.r_max > 0.0) {
            return bad(format!("r_max = {} must be positive", self.r_max));
        }
        Ok(())
    }
}

/// `key=value`; the value is read as JSON when it parses, else as a string.
fn apply_override(map: &mut Map<String, Value>, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{item}` is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::Config(format!("override `{item}` has an empty key")));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    map.insert(key.to_string(), value);
    Ok(())
}

/// Reads the JSON spec, applies overrides and splits model keys from run options.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<(ModelSpec, RunOptions), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{} is not valid JSON: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return Err(CliError::Config(format!("{} must hold a JSON object", path.display())));
    };
    for item in overrides {
        apply_override(&mut map, item)?;
    }
    let (spec_map, run_map): (Map<String, Value>, Map<String, Value>) =
        map.into_iter().partition(|(k, _)| SPEC_KEYS.contains(&k.as_str()));
    let spec: ModelSpec = serde_json::from_value(Value::Object(spec_map))
        .map_err(|e| CliError::Config(format!("model spec: {e}")))?;
    let opts: RunOptions = serde_json::from_value(Value::Object(run_map))
        .map_err(|e| CliError::Config(format!("run options: {e}")))?;
    opts.check()?;
    Ok((spec.normalized(), opts))
}
