//! Local refinement from one starting point.
//!
//! The objective is a maximum of smooth pieces, so the main step is a
//! trust-region sequential linear program: linearise every piece that can
//! become active within the trust region, minimise the linearised maximum
//! over the region intersected with the simplex constraints, and accept or
//! shrink by comparing predicted with actual decrease.
//!
//! In general mode each factor also gets an exact block step: with the other
//! factors frozen the convolution is linear in that factor, so the block
//! problem is a small LP. For two-point factors it is a one-dimensional
//! minimax of `k + 1` lines, solved by enumerating their crossings.

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};

use super::objective::{conv, max_of, FactorMode, Shape};

const INITIAL_RADIUS: f64 = 0.25;
const MIN_RADIUS: f64 = 1e-13;
const ACCEPT: f64 = 1e-3;
const GOOD: f64 = 0.75;
const POOR: f64 = 0.25;

#[derive(Clone, Debug)]
pub struct LocalOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Step {
    u: Vec<f64>,
    predicted: f64,
}

/// One trust-region LP. Variables are scaled so the step is `radius · u`
/// with `u ∈ [−1, 1]` and the model value is `f + radius · s`.
fn slp_step(shape: &Shape, x: &[f64], radius: f64) -> Option<Step> {
    let (values, jac) = shape.jacobian(x);
    let f = max_of(&values);
    let n = x.len();
    let w = shape.width();

    let row_norm = |row: &[f64]| row.iter().map(|v| v.abs()).sum::<f64>();
    let top = values.iter().position(|&v| v == f)?;
    let floor = f - radius * row_norm(&jac[top]);

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let s = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    let u: Vec<_> = (0..n).map(|v| lp.add_var(0.0, ((-x[v] / radius).max(-1.0), 1.0))).collect();
    for (i, row) in jac.iter().enumerate() {
        if values[i] + radius * row_norm(row) < floor {
            continue;
        }
        let mut expr: LinearExpr = row
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(v, c)| (u[v], *c))
            .collect();
        expr.add(s, -1.0);
        lp.add_constraint(expr, ComparisonOp::Le, (f - values[i]) / radius);
    }
    for j in 0..shape.factors() {
        let expr: LinearExpr = (j * w..(j + 1) * w).map(|v| (u[v], 1.0)).collect();
        lp.add_constraint(expr, ComparisonOp::Eq, 0.0);
    }
    let sol = lp.solve().ok()?.into_solution().ok()?;
    Some(Step { u: u.iter().map(|&v| sol.var_value(v)).collect(), predicted: -radius * sol.var_value(s) })
}

/// Exact minimisation of `max_i (1−p) a_i + p a_{i−1}` over `p ∈ [0, 1]`.
fn best_two_point(rest: &[f64]) -> (f64, f64) {
    let k = rest.len();
    let at = |i: isize| if i < 0 || i as usize >= k { 0.0 } else { rest[i as usize] };
    let lines: Vec<(f64, f64)> = (0..=k as isize).map(|i| (at(i), at(i - 1) - at(i))).collect();
    let envelope = |p: f64| lines.iter().map(|(a, b)| a + b * p).fold(f64::NEG_INFINITY, f64::max);
    let mut candidates = vec![0.0, 1.0];
    for (i, (a1, b1)) in lines.iter().enumerate() {
        for (a2, b2) in &lines[i + 1..] {
            if b1 != b2 {
                let p = (a2 - a1) / (b1 - b2);
                if (0.0..=1.0).contains(&p) {
                    candidates.push(p);
                }
            }
        }
    }
    candidates
        .into_iter()
        .map(|p| (envelope(p), p))
        .fold((f64::INFINITY, 0.0), |best, c| if c.0 < best.0 { c } else { best })
}

/// Exact block LP: `min t` subject to `(R ∗ w)_i ≤ t`, `Σ w = 1`, `w ≥ 0`.
fn best_factor(rest: &[f64], width: usize) -> Option<Vec<f64>> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let t = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    let w: Vec<_> = (0..width).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    for i in 0..rest.len() + width - 1 {
        let mut expr: LinearExpr = (0..width.min(i + 1))
            .filter_map(|s| rest.get(i - s).filter(|r| **r != 0.0).map(|r| (w[s], *r)))
            .collect();
        expr.add(t, -1.0);
        lp.add_constraint(expr, ComparisonOp::Le, 0.0);
    }
    lp.add_constraint(w.iter().map(|&v| (v, 1.0)), ComparisonOp::Eq, 1.0);
    let sol = lp.solve().ok()?.into_solution().ok()?;
    Some(w.iter().map(|&v| sol.var_value(v).max(0.0)).collect())
}

/// One pass of exact block steps over the factors; returns the new value.
fn block_sweep(shape: &Shape, x: &mut [f64], mut value: f64) -> f64 {
    if shape.mode != FactorMode::General {
        return value;
    }
    let w = shape.width();
    for j in 0..shape.k {
        let mut rest = vec![1.0];
        for l in (0..shape.k).filter(|&l| l != j) {
            rest = conv(&rest, shape.factor(x, l));
        }
        let candidate = if shape.m == 1 {
            let (_, p) = best_two_point(&rest);
            Some(vec![1.0 - p, p])
        } else {
            best_factor(&rest, w)
        };
        if let Some(c) = candidate {
            let mut trial = x.to_vec();
            trial[j * w..(j + 1) * w].copy_from_slice(&c);
            shape.normalize(&mut trial);
            let v = shape.objective(&trial);
            if v < value {
                x.copy_from_slice(&trial);
                value = v;
            }
        }
    }
    value
}

pub fn refine(shape: &Shape, start: &[f64], max_iterations: usize, tolerance: f64) -> LocalOutcome {
    let mut x = start.to_vec();
    shape.normalize(&mut x);
    let mut value = shape.objective(&x);
    let mut radius = INITIAL_RADIUS;
    let stop_radius = (tolerance * 1e-3).max(MIN_RADIUS);
    let sweep_every = if shape.m == 1 { 1 } else { 8 };
    let mut failures = 0;

    for it in 0..max_iterations {
        if it % sweep_every == 0 {
            value = block_sweep(shape, &mut x, value);
        }
        let Some(step) = slp_step(shape, &x, radius) else {
            failures += 1;
            radius *= 0.5;
            if failures > 20 || radius < stop_radius {
                return LocalOutcome { x, value, iterations: it + 1, converged: radius < stop_radius };
            }
            continue;
        };
        failures = 0;
        if step.predicted <= f64::EPSILON * value {
            return LocalOutcome { x, value, iterations: it + 1, converged: true };
        }
        let mut trial: Vec<f64> = x.iter().zip(&step.u).map(|(a, b)| a + radius * b).collect();
        shape.normalize(&mut trial);
        let trial_value = shape.objective(&trial);
        let rho = (value - trial_value) / step.predicted;
        if rho > ACCEPT && trial_value < value {
            x = trial;
            value = trial_value;
            if rho > GOOD {
                radius = (radius * 2.0).min(1.0);
            } else if rho < POOR {
                radius *= 0.5;
            }
        } else {
            radius *= 0.25;
        }
        if radius < stop_radius {
            return LocalOutcome { x, value, iterations: it + 1, converged: true };
        }
    }
    LocalOutcome { x, value, iterations: max_iterations, converged: false }
}
