//! Exact solvers: the rational grid sweep and the shared-mode point.

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::{FactorMode, Shape};
use super::{certify, check_km, to_floats, Method, MinimaxConfig, MinimaxResult};
use crate::error::{Error, Result};
use crate::poisson_binomial::{intersection_point, pmf_of};
use crate::scalar::{Number, Rational, Scalar};

/// Default cap on the number of grid evaluations.
pub const DEFAULT_GRID_BUDGET: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridBracket {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub mode: FactorMode,
    /// Minimum of the objective over the grid: an upper bound for the constant.
    pub upper: Number,
    /// `max(upper − k(m+1)/n, 1/(km+1))`: a rigorous lower bound, since every
    /// simplex point is within `ℓ¹` distance `(m+1)/n` of the grid and the
    /// objective is 1-Lipschitz in each factor for that norm.
    pub lower: Number,
    /// Minimising grid point, one vector per factor (one in diagonal mode).
    pub argmin: Vec<Vec<Number>>,
    pub evaluated: u64,
}

/// All compositions of `n` into `parts` nonnegative parts, lexicographic.
fn compositions(n: usize, parts: usize) -> Vec<Vec<u128>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<u128>, out: &mut Vec<Vec<u128>>) {
        if parts == 1 {
            cur.push(left as u128);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in 0..=left {
            cur.push(a as u128);
            rec(left - a, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

fn conv_int(a: &[u128], b: &[u128]) -> Vec<u128> {
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn binom_u128(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Lexicographically first multiset `first ≤ i_2 ≤ … ≤ i_k` minimising the
/// maximum of the integer convolution.
fn sweep_from(points: &[Vec<u128>], k: usize, first: usize) -> (u128, Vec<usize>, u64) {
    fn rec(
        points: &[Vec<u128>],
        depth: usize,
        k: usize,
        from: usize,
        prefix: &[u128],
        chosen: &mut Vec<usize>,
        best: &mut (u128, Vec<usize>, u64),
    ) {
        if depth == k {
            best.2 += 1;
            let v = prefix.iter().copied().max().unwrap_or(0);
            if v < best.0 {
                best.0 = v;
                best.1 = chosen.clone();
            }
            return;
        }
        for idx in from..points.len() {
            let next = conv_int(prefix, &points[idx]);
            chosen.push(idx);
            rec(points, depth + 1, k, idx, &next, chosen, best);
            chosen.pop();
        }
    }
    let mut best = (u128::MAX, Vec::new(), 0);
    let mut chosen = vec![first];
    rec(points, 1, k, first, &points[first], &mut chosen, &mut best);
    best
}

/// Exhaustive exact minimisation over simplex points with denominator `n`.
///
/// General mode enumerates multisets of `k` grid points (the objective is
/// symmetric in the factors); diagonal mode enumerates single grid points.
/// Fails with [`Error::BudgetExceeded`] when the number of evaluations would
/// exceed `budget`.
pub fn grid_oracle(k: usize, m: usize, n: usize, mode: FactorMode, budget: u64) -> Result<GridBracket> {
    check_km(k, m)?;
    if n == 0 {
        return Err(Error::invalid("grid resolution n must be positive"));
    }
    let too_big = || Error::BudgetExceeded(format!("grid k={k}, m={m}, n={n} exceeds {budget} evaluations"));
    let npoints = binom_u128((n + m) as u128, m as u128).ok_or_else(too_big)?;
    let evaluations = match mode {
        FactorMode::Diagonal => npoints,
        FactorMode::General => binom_u128(npoints + k as u128 - 1, k as u128).ok_or_else(too_big)?,
    };
    if evaluations > budget as u128 {
        return Err(too_big());
    }
    let scale = (n as u128).checked_pow(k as u32).ok_or_else(too_big)?;

    let points = compositions(n, m + 1);
    let (numerator, argmin, evaluated): (u128, Vec<usize>, u64) = match mode {
        FactorMode::Diagonal => {
            let values: Vec<u128> = points
                .par_iter()
                .map(|w| (1..k).fold(w.clone(), |acc, _| conv_int(&acc, w)).into_iter().max().unwrap_or(0))
                .collect();
            let (idx, v) = values
                .iter()
                .enumerate()
                .fold((0, u128::MAX), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
            (v, vec![idx], values.len() as u64)
        }
        FactorMode::General => {
            let parts: Vec<(u128, Vec<usize>, u64)> =
                (0..points.len()).into_par_iter().map(|first| sweep_from(&points, k, first)).collect();
            let evaluated = parts.iter().map(|p| p.2).sum();
            let best = parts
                .into_iter()
                .fold(None, |acc: Option<(u128, Vec<usize>)>, (v, idx, _)| match acc {
                    Some((b, _)) if b <= v => acc,
                    _ => Some((v, idx)),
                })
                .ok_or_else(|| Error::Solver("empty grid".into()))?;
            (best.0, best.1, evaluated)
        }
    };

    let denom = BigInt::from(scale);
    let upper = Rational::new(BigInt::from(numerator), denom);
    let slack = Rational::from_ratio((k * (m + 1)) as i64, n as i64);
    let trivial = Rational::from_ratio(1, (k * m + 1) as i64);
    let lower = std::cmp::max(upper.clone() - slack, trivial);
    let nn = BigInt::from(n);
    let argmin = argmin
        .iter()
        .map(|&i| {
            points[i]
                .iter()
                .map(|&a| Number::Exact(Rational::new(BigInt::from(a), nn.clone())))
                .collect()
        })
        .collect();
    Ok(GridBracket { k, m, n, mode, upper: Number::Exact(upper), lower: Number::Exact(lower), argmin, evaluated })
}

/// The `m = 1` constant from identical factors at a shared-mode point.
///
/// For each `i`, the point where entries `i − 1` and `i` of the binomial pmf
/// tie is `x = i/(k+1)`; it is confirmed as the fixed point of
/// [`intersection_point`] with the other `k − 1` parameters equal to `x`.
/// The smallest pmf maximum over these points is returned exactly, with the
/// smallest such `x` on ties.
pub fn intersection_restricted_solve(k: usize) -> Result<MinimaxResult> {
    check_km(k, 1)?;
    let mut best: Option<(Rational, Rational)> = None;
    for i in 1..=k {
        let x = Rational::from_ratio(i as i64, (k + 1) as i64);
        let rest = vec![x.clone(); k - 1];
        if intersection_point(&rest, i).as_ref() != Some(&x) {
            return Err(Error::Solver(format!("shared-mode point {x} is not a fixed point at i = {i}")));
        }
        let pmf = pmf_of(&vec![x.clone(); k]);
        let value = pmf.into_iter().max().unwrap_or_default();
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, x));
        }
    }
    let (value, x) = best.ok_or_else(|| Error::Solver("no shared-mode point".into()))?;
    let argument = vec![to_floats(&[Rational::one() - x.clone(), x])];
    let shape = Shape { k, m: 1, mode: FactorMode::Diagonal };
    let (_, shared_modes) = certify(&shape, &argument[0]);
    Ok(MinimaxResult {
        k,
        m: 1,
        mode: FactorMode::Diagonal,
        value: value.to_f64(),
        exact_value: Some(Number::Exact(value)),
        argument,
        shared_modes,
        on_boundary: false,
        method: Method::IntersectionRestricted,
        converged: true,
        iterations: k,
        best_start: 0,
        tolerance: 0.0,
        seed: 0,
        config: MinimaxConfig::default(),
    })
}
