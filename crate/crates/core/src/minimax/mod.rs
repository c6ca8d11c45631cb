//! Numerical estimates of the constants `C_{k,m}` (independent factors) and
//! `C̄_{k,m}` (identical factors) on `{0,…,m}`.
//!
//! Both are infima of `max_i (w_1 ∗ … ∗ w_k)_i` over probability vectors of
//! length `m + 1`. The solvers return upper estimates from seeded multistart
//! local refinement; [`grid_oracle`] brackets the constant exactly from a
//! rational grid; [`intersection_restricted_solve`] reproduces the `m = 1`
//! value exactly from the shared-mode point.

mod local;
mod objective;
mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Number, Rational};

pub use objective::{conv, conv_power, FactorMode, Shape};
pub use oracle::{grid_oracle, intersection_restricted_solve, GridBracket, DEFAULT_GRID_BUDGET};

/// Indices within this distance of the maximum count as shared modes.
pub const SHARED_MODE_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinimaxConfig {
    pub multistarts: usize,
    /// Convergence tolerance on the objective.
    pub tolerance: f64,
    /// Iteration cap per start.
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for MinimaxConfig {
    fn default() -> Self {
        MinimaxConfig { multistarts: 64, tolerance: 1e-9, max_iterations: 100_000, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Multistart trust-region LP with exact block steps.
    MultistartSlp,
    /// Exact evaluation at the diagonal shared-mode point.
    IntersectionRestricted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaxResult {
    pub k: usize,
    pub m: usize,
    pub mode: FactorMode,
    pub value: f64,
    /// Exact value, when the method produces one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact_value: Option<Number>,
    /// One probability vector per factor (a single one in diagonal mode).
    pub argument: Vec<Vec<f64>>,
    pub shared_modes: Vec<usize>,
    /// Some weight of the argument is zero.
    pub on_boundary: bool,
    pub method: Method,
    pub converged: bool,
    /// Iterations used by the winning start.
    pub iterations: usize,
    pub best_start: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub config: MinimaxConfig,
}

fn check_km(k: usize, m: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::invalid(format!("need k >= 2, got {k}")));
    }
    if m < 1 {
        return Err(Error::invalid(format!("need m >= 1, got {m}")));
    }
    Ok(())
}

fn check_config(cfg: &MinimaxConfig) -> Result<()> {
    if cfg.multistarts == 0 {
        return Err(Error::invalid("multistarts must be positive"));
    }
    if !(cfg.tolerance > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if cfg.max_iterations == 0 {
        return Err(Error::invalid("max_iterations must be positive"));
    }
    Ok(())
}

fn dirichlet(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Start `0` is the uniform point; the rest are Dirichlet(1) draws from a
/// per-start ChaCha stream of the root seed.
fn start_point(shape: &Shape, seed: u64, index: usize) -> Vec<f64> {
    if index == 0 {
        return vec![1.0 / shape.width() as f64; shape.nvars()];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..shape.factors()).flat_map(|_| dirichlet(&mut rng, shape.width())).collect()
}

/// Lifts a result argument to `shape`: pads each factor with zeros and, in
/// general mode, repeats a single diagonal factor `k` times.
fn lift(shape: &Shape, argument: &[Vec<f64>]) -> Option<Vec<f64>> {
    let padded: Vec<Vec<f64>> = argument
        .iter()
        .map(|f| {
            let mut f = f.clone();
            f.resize(shape.width(), 0.0);
            f
        })
        .collect();
    if padded.iter().any(|f| f.len() != shape.width()) {
        return None;
    }
    match (padded.len(), shape.factors()) {
        (a, b) if a == b => Some(padded.concat()),
        (1, b) => Some(padded[0].repeat(b)),
        _ => None,
    }
}

pub(crate) fn certify(shape: &Shape, x: &[f64]) -> (f64, Vec<usize>) {
    let values = shape.values(x);
    let value = objective::max_of(&values);
    let shared = (0..values.len()).filter(|&i| values[i] >= value - SHARED_MODE_TOL).collect();
    (value, shared)
}

/// Runs every start (plus any warm starts, which come first) and keeps the
/// lowest value, breaking ties by start index.
pub fn solve(shape: Shape, cfg: &MinimaxConfig, warm_starts: &[Vec<Vec<f64>>]) -> Result<MinimaxResult> {
    check_km(shape.k, shape.m)?;
    check_config(cfg)?;
    let mut starts: Vec<Vec<f64>> = warm_starts.iter().filter_map(|w| lift(&shape, w)).collect();
    starts.extend((0..cfg.multistarts).map(|s| start_point(&shape, cfg.seed, s)));

    let outcomes: Vec<local::LocalOutcome> = starts
        .par_iter()
        .map(|x0| local::refine(&shape, x0, cfg.max_iterations, cfg.tolerance))
        .collect();
    let (best_start, best) = outcomes
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, &local::LocalOutcome)>, (i, o)| match acc {
            Some((_, b)) if b.value <= o.value || o.value.is_nan() => acc,
            _ => Some((i, o)),
        })
        .ok_or_else(|| Error::Solver("no starting points".into()))?;

    let mut x = best.x.clone();
    shape.normalize(&mut x);
    let (value, shared_modes) = certify(&shape, &x);
    Ok(MinimaxResult {
        k: shape.k,
        m: shape.m,
        mode: shape.mode,
        value,
        exact_value: None,
        on_boundary: x.contains(&0.0),
        argument: shape.split(&x),
        shared_modes,
        method: Method::MultistartSlp,
        converged: best.converged,
        iterations: best.iterations,
        best_start,
        tolerance: cfg.tolerance,
        seed: cfg.seed,
        config: cfg.clone(),
    })
}

/// Upper estimate of `C̄_{k,m}`.
pub fn diagonal_constant(k: usize, m: usize, cfg: &MinimaxConfig) -> Result<MinimaxResult> {
    solve(Shape { k, m, mode: FactorMode::Diagonal }, cfg, &[])
}

/// Upper estimate of `C_{k,m}`. The diagonal optimum is used as an extra
/// start, so the result never exceeds [`diagonal_constant`] for the same
/// configuration.
pub fn general_constant(k: usize, m: usize, cfg: &MinimaxConfig) -> Result<MinimaxResult> {
    let diag = diagonal_constant(k, m, cfg)?;
    solve(Shape { k, m, mode: FactorMode::General }, cfg, &[diag.argument])
}

/// Exact rational weights rendered as floats, for the exact solvers.
pub(crate) fn to_floats(v: &[Rational]) -> Vec<f64> {
    v.iter().map(crate::scalar::Scalar::to_f64).collect()
}
