//! Upper bounds for the continuous constant
//! `C_k = inf ‖f^{∗k}‖_∞ / ‖f‖_1^k` over nonnegative `f` supported in
//! `(−1/(2k), 1/(2k))`.
//!
//! A step function with `m + 1` equal cells on that interval turns the
//! continuous problem into the discrete diagonal one, so
//! `C_k ≤ k(m+1) C̄_{k,m}` for every `m`. Any upper estimate of `C̄_{k,m}`
//! therefore gives a valid upper bound for `C_k`.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::constants::optimal_constant;
use crate::error::{Error, Result};
use crate::minimax::{intersection_restricted_solve, solve, FactorMode, MinimaxConfig, MinimaxResult, Shape};
use crate::scalar::{rational_str, Number, Rational, Scalar};

/// Published lower bound `1.28 < C_2`, used as a validity floor for `k = 2`.
pub const KNOWN_LOWER_K2: f64 = 1.28;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub m: usize,
    /// Estimate of `C̄_{k,m}`; exact for `m = 1`.
    pub cbar: Number,
    /// `k(m+1)·cbar`.
    pub upper_bound: Number,
    pub converged: bool,
    pub solver: MinimaxResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundTable {
    pub k: usize,
    pub rows: Vec<BoundRow>,
    /// Smallest upper bound over converged rows.
    pub best_bound: Number,
    /// Imported lower bound for `C_k`, when one is known.
    pub known_lower: Option<f64>,
    /// Rows whose bound falls below `known_lower`; nonempty means a bug.
    pub floor_violations: Vec<usize>,
}

fn row_bound(k: usize, m: usize, cbar: &Number) -> Number {
    let factor = (k * (m + 1)) as i64;
    match cbar {
        Number::Exact(r) => Number::Exact(r.clone() * Rational::from_int(factor)),
        Number::Float(x) => Number::Float(x * factor as f64),
    }
}

/// Rows `m = 1, …, m_max`. The first row uses the closed form; later rows run
/// the diagonal solver, warm-started from the previous row's argument padded
/// with a zero weight.
pub fn upper_bound_sequence(k: usize, m_max: usize, cfg: &MinimaxConfig) -> Result<BoundTable> {
    if k < 2 {
        return Err(Error::invalid("need k >= 2"));
    }
    if m_max < 1 {
        return Err(Error::invalid("need m_max >= 1"));
    }
    let first = intersection_restricted_solve(k)?;
    let cbar = Number::Exact(optimal_constant(k)?);
    let mut rows = vec![BoundRow { m: 1, upper_bound: row_bound(k, 1, &cbar), cbar, converged: true, solver: first }];
    for m in 2..=m_max {
        let warm = rows.last().map(|r| r.solver.argument.clone()).unwrap_or_default();
        let res = solve(Shape { k, m, mode: FactorMode::Diagonal }, cfg, &[warm])?;
        let cbar = Number::Float(res.value);
        rows.push(BoundRow { m, upper_bound: row_bound(k, m, &cbar), cbar, converged: res.converged, solver: res });
    }
    let best_bound = rows
        .iter()
        .filter(|r| r.converged)
        .map(|r| r.upper_bound.clone())
        .fold(None, |acc: Option<Number>, b| match acc {
            Some(a) if a.to_f64() <= b.to_f64() => Some(a),
            _ => Some(b),
        })
        .unwrap_or(Number::Float(f64::NAN));
    let known_lower = (k == 2).then_some(KNOWN_LOWER_K2);
    let floor_violations = known_lower
        .map(|lo| rows.iter().filter(|r| r.upper_bound.to_f64() < lo).map(|r| r.m).collect())
        .unwrap_or_default();
    Ok(BoundTable { k, rows, best_bound, known_lower, floor_violations })
}

impl BoundTable {
    /// Columns `m,cbar,bound,converged`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,cbar,bound,converged\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.m, csv_number(&r.cbar), csv_number(&r.upper_bound), r.converged);
        }
        out
    }
}

fn csv_number(n: &Number) -> String {
    match n {
        Number::Exact(r) => format!("{r}"),
        Number::Float(x) => format!("{x:.15}"),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(with = "rational_str")]
    pub lo: Rational,
    #[serde(with = "rational_str")]
    pub hi: Rational,
    #[serde(with = "rational_str")]
    pub height: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pub k: usize,
    pub cells: Vec<Cell>,
}

/// The step function on `(−1/(2k), 1/(2k))` with `m + 1` equal cells of
/// width `1/(k(m+1))` whose heights are the given weights.
pub fn step_function_export(weights: &[Rational], k: usize) -> Result<StepFunction> {
    if k == 0 {
        return Err(Error::invalid("need k >= 1"));
    }
    if weights.is_empty() {
        return Err(Error::Empty("weights"));
    }
    if let Some(index) = weights.iter().position(|w| w.is_negative()) {
        return Err(Error::NegativeValue { index });
    }
    let cells_n = weights.len() as i64;
    let k = k as i64;
    let left = Rational::from_ratio(-1, 2 * k);
    let width = Rational::from_ratio(1, k * cells_n);
    let cells = weights
        .iter()
        .enumerate()
        .map(|(j, w)| Cell {
            lo: left.clone() + width.clone() * Rational::from_int(j as i64),
            hi: left.clone() + width.clone() * Rational::from_int(j as i64 + 1),
            height: w.clone(),
        })
        .collect();
    Ok(StepFunction { k: k as usize, cells })
}

impl StepFunction {
    pub fn integral(&self) -> Rational {
        self.cells.iter().fold(Rational::zero(), |acc, c| acc + (c.hi.clone() - c.lo.clone()) * c.height.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::continuous_upper_bound_m1;
    use crate::scalar::rational;

    fn quick() -> MinimaxConfig {
        MinimaxConfig { multistarts: 8, ..MinimaxConfig::default() }
    }

    #[test]
    fn m1_rows_are_exact() {
        let t = upper_bound_sequence(2, 1, &quick()).unwrap();
        assert_eq!(t.rows[0].upper_bound, Number::Exact(rational(16, 9)));
        assert_eq!(t.best_bound, Number::Exact(rational(16, 9)));
        let t = upper_bound_sequence(3, 1, &quick()).unwrap();
        assert_eq!(t.rows[0].upper_bound, Number::Exact(rational(9, 4)));
        assert_eq!(t.rows[0].upper_bound, Number::Exact(continuous_upper_bound_m1(3).unwrap()));
    }

    #[test]
    fn k2_rows_bracketed() {
        let t = upper_bound_sequence(2, 3, &quick()).unwrap();
        assert!(t.floor_violations.is_empty());
        for r in &t.rows {
            let b = r.upper_bound.to_f64();
            assert!((1.28..=16.0 / 9.0 + 1e-9).contains(&b), "m={} bound={b}", r.m);
        }
        assert!(t.rows.windows(2).all(|w| w[1].cbar.to_f64() <= w[0].cbar.to_f64() + 1e-12));
        assert!(t.to_csv().starts_with("m,cbar,bound,converged\n1,4/9,16/9,true\n"));
    }

    #[test]
    fn step_examples() {
        let s = step_function_export(&[rational(2, 1), rational(1, 1)], 2).unwrap();
        assert_eq!(s.cells.len(), 2);
        assert_eq!((s.cells[0].lo.clone(), s.cells[0].hi.clone()), (rational(-1, 4), rational(0, 1)));
        assert_eq!(s.cells[1].hi, rational(1, 4));
        let s = step_function_export(&[rational(1, 1)], 3).unwrap();
        assert_eq!((s.cells[0].lo.clone(), s.cells[0].hi.clone()), (rational(-1, 6), rational(1, 6)));
        assert_eq!(s.integral(), rational(1, 3));
        assert!(step_function_export(&[rational(-1, 1)], 2).is_err());
    }
}
