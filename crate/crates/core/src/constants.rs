//! Closed-form optimal constants for products of two-point functions.
//!
//! For nonnegative `f_1,…,f_k` on `{0,1}^d`,
//! `‖f_1 ∗ … ∗ f_k‖_∞ ≥ C_k^d Π ‖f_i‖_1` with
//!
//! * `C_k = binom(k, ⌊k/2⌋) / 2^k` for odd `k`,
//! * `C_k = binom(k, ⌊k/2⌋) / 2^k · (1 − 1/(k+1)²)^(k/2)` for even `k`,
//!
//! and the bound is attained by a product function. For odd `k` this holds
//! in every dimension. For even `k` the power `C_k^d` is attained but is not a
//! lower bound once `d ≥ 2`: the factors `(2,3,4,0)` and `(6,3,0,7)` on
//! `{0,1}^2` give ratio `7/36 < (4/9)^2`, and five points of `{0,1}^3` with
//! distinct pairwise sums give `2/25 < (4/9)^3` with identical factors.
//! Everything here is exact.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ratio, GridFn, MAX_ENTRIES};
use crate::scalar::{binomial, binomial_in, rational_str, rational_vec, Rational, Scalar};

/// Largest order accepted by [`verify_sharpness`].
pub const SHARPNESS_MAX_K: usize = 64;

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("order k must be at least 1"));
    }
    Ok(())
}

/// `C_{k,1}`, the best constant on `{0,1}`.
pub fn optimal_constant(k: usize) -> Result<Rational> {
    check_k(k)?;
    let central = Rational::new(binomial(k as u64, (k / 2) as u64), BigInt::one() << k);
    if k % 2 == 1 {
        return Ok(central);
    }
    let k1 = (k + 1) as i64;
    let factor = Rational::one() - Rational::from_ratio(1, k1 * k1);
    Ok(central * factor.powi((k / 2) as u32))
}

/// `C_{k,1}^d`, the best constant on `{0,1}^d`.
pub fn optimal_constant_d(k: usize, d: usize) -> Result<Rational> {
    if d == 0 {
        return Err(Error::invalid("dimension d must be at least 1"));
    }
    Ok(optimal_constant(k)?.powi(d as u32))
}

/// The extremiser `f(x) = (k − ⌊k/2⌋)^{|x|} (⌊k/2⌋ + 1)^{d − |x|}` on `{0,1}^d`.
pub fn extremal_function(k: usize, d: usize) -> Result<GridFn<Rational>> {
    check_k(k)?;
    let one_weight = Rational::from_int((k - k / 2) as i64);
    let zero_weight = Rational::from_int((k / 2 + 1) as i64);
    GridFn::from_fn(d, 1, |x| {
        let ones = x.iter().sum::<usize>() as u32;
        one_weight.powi(ones) * zero_weight.powi(d as u32 - ones)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessCertificate {
    pub k: usize,
    pub d: usize,
    /// Ratio of `k` copies of the extremal function.
    #[serde(with = "rational_str")]
    pub ratio: Rational,
    #[serde(with = "rational_str")]
    pub constant: Rational,
    pub pass: bool,
}

/// Evaluates the ratio functional on `k` copies of [`extremal_function`] and
/// compares it with [`optimal_constant_d`] exactly.
pub fn verify_sharpness(k: usize, d: usize) -> Result<SharpnessCertificate> {
    check_k(k)?;
    if k > SHARPNESS_MAX_K {
        return Err(Error::BudgetExceeded(format!("k = {k} exceeds {SHARPNESS_MAX_K}")));
    }
    let out_entries = (k as u128 + 1).checked_pow(d as u32).unwrap_or(u128::MAX);
    if out_entries > MAX_ENTRIES as u128 {
        return Err(Error::MemoryCap { entries: out_entries, cap: MAX_ENTRIES });
    }
    let f = extremal_function(k, d)?;
    let fs = vec![f; k];
    let value = ratio(&fs)?;
    let constant = optimal_constant_d(k, d)?;
    Ok(SharpnessCertificate { k, d, pass: value == constant, ratio: value, constant })
}

/// `x ↦ max_i binom(k,i) x^{k−i} (1−x)^i`, the objective restricted to equal
/// factors `(x, 1−x)`.
pub fn diagonal_envelope<T: Scalar>(k: usize, x: &T) -> T {
    let mut best = T::zero();
    let y = T::one() - x.clone();
    for i in 0..=k {
        let v = binomial_in::<T>(k, i) * x.powi((k - i) as u32) * y.powi(i as u32);
        if v > best {
            best = v;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePiece {
    #[serde(with = "rational_str")]
    pub lo: Rational,
    #[serde(with = "rational_str")]
    pub hi: Rational,
    /// Index `i` of the dominant term `binom(k,i) x^{k−i} (1−x)^i` on `[lo, hi]`.
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalProfile {
    pub k: usize,
    /// `(k−i)/(k+1)` for `i = k, k−1, …, 0`, increasing.
    #[serde(with = "rational_vec")]
    pub breakpoints: Vec<Rational>,
    /// Pieces in increasing `x`; the dominant index drops by one each step.
    pub pieces: Vec<EnvelopePiece>,
    #[serde(with = "rational_str")]
    pub envelope_min_value: Rational,
    #[serde(with = "rational_vec")]
    pub envelope_min_locations: Vec<Rational>,
}

/// `binom(k,i) g_{k,i}(x)` with `g_{k,i}(x) = x^{k−i}(1−x)^i`.
fn term(k: usize, i: usize, x: &Rational) -> Rational {
    let c = Rational::from_integer(binomial(k as u64, i as u64));
    c * x.powi((k - i) as u32) * (Rational::one() - x).powi(i as u32)
}

/// Exact piecewise description of [`diagonal_envelope`] and its minimum.
///
/// On `[(k−i)/(k+1), (k+1−i)/(k+1)]` the envelope is the `i`-th term, which
/// rises and then falls there, so the minimum over the interval sits at an
/// endpoint. Adjacent terms agree at the shared endpoints and the left
/// endpoint is the smaller one for `i ≤ k/2`.
pub fn diagonal_profile(k: usize) -> Result<DiagonalProfile> {
    check_k(k)?;
    let k1 = (k + 1) as i64;
    let breakpoints: Vec<Rational> = (0..=k).rev().map(|i| Rational::from_ratio((k - i) as i64, k1)).collect();
    let pieces = (0..=k)
        .rev()
        .map(|i| EnvelopePiece {
            lo: Rational::from_ratio((k - i) as i64, k1),
            hi: Rational::from_ratio((k + 1 - i) as i64, k1),
            index: i,
        })
        .collect();
    let envelope_min_value = (0..=k / 2)
        .map(|i| term(k, i, &Rational::from_ratio((k - i) as i64, k1)))
        .min()
        .unwrap_or_else(Rational::zero);
    let left = Rational::from_ratio((k - k / 2) as i64, k1);
    let mut envelope_min_locations = vec![left.clone()];
    if k.is_multiple_of(2) {
        envelope_min_locations.push(Rational::one() - left);
        envelope_min_locations.sort();
    }
    Ok(DiagonalProfile { k, breakpoints, pieces, envelope_min_value, envelope_min_locations })
}

/// `C_k ≤ 2k·C_{k,1}` for the continuous autoconvolution constant.
pub fn continuous_upper_bound_m1(k: usize) -> Result<Rational> {
    if k < 2 {
        return Err(Error::invalid("continuous bound needs k >= 2"));
    }
    Ok(Rational::from_int(2 * k as i64) * optimal_constant(k)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    #[test]
    fn closed_form_table() {
        assert_eq!(optimal_constant(1).unwrap(), rational(1, 2));
        assert_eq!(optimal_constant(2).unwrap(), rational(4, 9));
        assert_eq!(optimal_constant(3).unwrap(), rational(3, 8));
        assert_eq!(optimal_constant(4).unwrap(), rational(216, 625));
        assert_eq!(optimal_constant(5).unwrap(), rational(5, 16));
        assert!(optimal_constant(0).is_err());
    }

    #[test]
    fn d_powers() {
        assert_eq!(optimal_constant_d(2, 2).unwrap(), rational(16, 81));
        assert_eq!(optimal_constant_d(3, 1).unwrap(), rational(3, 8));
        assert!(optimal_constant_d(3, 0).is_err());
        assert!(optimal_constant_d(0, 1).is_err());
    }

    #[test]
    fn extremal_examples() {
        let q = |v: i64| rational(v, 1);
        assert_eq!(extremal_function(2, 1).unwrap().values(), &[q(2), q(1)]);
        assert_eq!(extremal_function(3, 1).unwrap().values(), &[q(2), q(2)]);
        assert_eq!(extremal_function(4, 2).unwrap().values(), &[q(9), q(6), q(6), q(4)]);
        // odd k: constant ((k+1)/2)^d
        assert!(extremal_function(5, 3).unwrap().values().iter().all(|v| *v == q(27)));
    }

    #[test]
    fn sharpness_examples() {
        for (k, d, v) in [(2, 1, rational(4, 9)), (4, 1, rational(216, 625)), (3, 2, rational(9, 64))] {
            let c = verify_sharpness(k, d).unwrap();
            assert!(c.pass);
            assert_eq!(c.ratio, v);
            assert_eq!(c.constant, v);
        }
        assert!(matches!(verify_sharpness(65, 1), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn profile_examples() {
        let p = diagonal_profile(2).unwrap();
        let mid = p.pieces.iter().find(|s| s.lo == rational(1, 3)).unwrap();
        assert_eq!((mid.hi.clone(), mid.index), (rational(2, 3), 1));
        assert_eq!(p.envelope_min_value, rational(4, 9));
        assert_eq!(p.envelope_min_locations, vec![rational(1, 3), rational(2, 3)]);

        let p = diagonal_profile(3).unwrap();
        assert_eq!(p.envelope_min_value, rational(3, 8));
        assert_eq!(p.envelope_min_locations, vec![rational(1, 2)]);

        let p = diagonal_profile(1).unwrap();
        assert_eq!(p.envelope_min_value, rational(1, 2));
        assert_eq!(p.envelope_min_locations, vec![rational(1, 2)]);
    }

    #[test]
    fn profile_structure() {
        for k in 1..=12 {
            let p = diagonal_profile(k).unwrap();
            assert!(p.breakpoints.windows(2).all(|w| w[0] < w[1]));
            assert!(p.pieces.windows(2).all(|w| w[0].index == w[1].index + 1 && w[0].hi == w[1].lo));
            assert_eq!(p.envelope_min_value, optimal_constant(k).unwrap());
            for x in &p.envelope_min_locations {
                assert_eq!(diagonal_envelope(k, x), p.envelope_min_value);
            }
            // dominant index really dominates at interval midpoints
            for piece in &p.pieces {
                let mid = (piece.lo.clone() + piece.hi.clone()) / rational(2, 1);
                assert_eq!(diagonal_envelope(k, &mid), term(k, piece.index, &mid));
            }
        }
    }

    #[test]
    fn continuous_m1() {
        assert_eq!(continuous_upper_bound_m1(2).unwrap(), rational(16, 9));
        assert_eq!(continuous_upper_bound_m1(3).unwrap(), rational(9, 4));
        assert_eq!(continuous_upper_bound_m1(5).unwrap(), rational(25, 8));
        assert!(continuous_upper_bound_m1(1).is_err());
    }

    #[test]
    fn beats_trivial_bound_and_decreases() {
        let mut prev = optimal_constant(2).unwrap();
        for k in 1..=40 {
            let c = optimal_constant(k).unwrap();
            assert!(c.clone() * rational(k as i64 + 1, 1) >= rational(1, 1));
            if k % 2 == 0 {
                let k1 = (k + 1) as i64;
                assert!(rational(k1 * k1 - 1, k1 * k1) < rational(1, 1));
            }
            if k > 2 {
                assert!(c < prev, "not decreasing at k = {k}");
                prev = c;
            }
        }
    }
}
