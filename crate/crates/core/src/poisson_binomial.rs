//! Poisson-binomial distributions.
//!
//! With two-point factors `f_j = (1 − p_j, p_j)`, the convolution
//! `f_1 ∗ … ∗ f_k` is the pmf of the number of successes among independent
//! Bernoulli trials. This module builds that pmf by folding one parameter at
//! a time and checks the structural facts the minimax reduction relies on:
//! unimodality, ultra-log-concavity, monotone likelihood ratios, the unique
//! crossing point of adjacent entries, Newton's inequalities for successive
//! differences, and the Lagrange stationarity condition.
//!
//! Coordinates `j` are 0-based. Out-of-range pmf entries are zero, so
//! `f_{k,-1} = f_{k,k+1} = 0` and `D_{k,j} = f_{k,j} − f_{k,j−1}` is defined
//! for every integer `j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Number, Scalar};

/// Absolute tolerance for pmf-level identities in float mode.
pub const FLOAT_ABS_TOL: f64 = 1e-9;
/// Relative tolerance for detecting a shared mode in float mode.
pub const MODE_REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct PBParams<T> {
    p: Vec<T>,
}

impl<T: Scalar> PBParams<T> {
    pub fn new(p: Vec<T>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Empty("success probabilities"));
        }
        let (zero, one) = (T::zero(), T::one());
        if let Some(j) = p.iter().position(|x| !(*x >= zero && *x <= one)) {
            return Err(Error::invalid(format!("p[{j}] = {} is outside [0,1]", p[j].to_f64())));
        }
        Ok(PBParams { p })
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    pub fn probs(&self) -> &[T] {
        &self.p
    }

    /// `p'_j`: the vector with coordinate `j` removed (may be empty).
    pub fn without(&self, j: usize) -> Vec<T> {
        let mut rest = self.p.clone();
        rest.remove(j);
        rest
    }

    fn require_interior(&self) -> Result<()> {
        let (zero, one) = (T::zero(), T::one());
        match self.p.iter().position(|x| *x == zero || *x == one) {
            Some(coordinate) => Err(Error::BoundaryParameter { coordinate }),
            None => Ok(()),
        }
    }
}

/// Pmf of the success count, by the one-parameter-at-a-time recursion
/// `f_{k,i} = (1 − p_j) f_{k−1,i} + p_j f_{k−1,i−1}`. Empty input gives `(1)`.
pub fn pmf_of<T: Scalar>(p: &[T]) -> Vec<T> {
    let mut f = Vec::with_capacity(p.len() + 1);
    f.push(T::one());
    for pj in p {
        let qj = T::one() - pj.clone();
        f.push(T::zero());
        for i in (0..f.len()).rev() {
            let stay = f[i].clone() * qj.clone();
            let moved = if i > 0 { f[i - 1].clone() * pj.clone() } else { T::zero() };
            f[i] = stay + moved;
        }
    }
    f
}

fn at<T: Scalar>(f: &[T], i: isize) -> T {
    if i < 0 || i as usize >= f.len() {
        T::zero()
    } else {
        f[i as usize].clone()
    }
}

fn diff_at<T: Scalar>(f: &[T], j: isize) -> T {
    at(f, j) - at(f, j - 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PBDist<T> {
    pmf: Vec<T>,
    params: PBParams<T>,
}

impl<T: Scalar> PBDist<T> {
    pub fn k(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn pmf(&self) -> &[T] {
        &self.pmf
    }

    pub fn params(&self) -> &PBParams<T> {
        &self.params
    }

    /// `f_{k,i}`, zero outside `0..=k`.
    pub fn entry(&self, i: isize) -> T {
        at(&self.pmf, i)
    }

    /// `D_{k,j} = f_{k,j} − f_{k,j−1}` for any integer `j`.
    pub fn diff(&self, j: isize) -> T {
        diff_at(&self.pmf, j)
    }

    pub fn total(&self) -> T {
        self.pmf.iter().cloned().fold(T::zero(), |a, b| a + b)
    }
}

pub fn pb_pmf<T: Scalar>(p: &PBParams<T>) -> PBDist<T> {
    PBDist { pmf: pmf_of(&p.p), params: p.clone() }
}

fn tied<T: Scalar>(a: &T, b: &T) -> bool {
    if T::EXACT {
        a == b
    } else {
        let (a, b) = (a.to_f64(), b.to_f64());
        (a - b).abs() <= MODE_REL_TOL * a.abs().max(b.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    /// The mode; for a shared pair this is the larger index.
    pub index: usize,
    /// `f_{k,index−1}` ties with `f_{k,index}`.
    pub shared: bool,
}

/// Locates the mode and checks the whole unimodality chain
/// `f_0 < … < f_{i−1} ≤ f_i > f_{i+1} > … > f_k`.
///
/// Entries outside the support (parameters equal to 0 or 1) are zero; the
/// chain is strict on the support. In float mode the chain tolerates
/// [`FLOAT_ABS_TOL`] and ties are detected with [`MODE_REL_TOL`].
pub fn pb_mode<T: Scalar>(dist: &PBDist<T>) -> Result<Mode> {
    let f = &dist.pmf;
    let zero = T::zero();
    let max = f.iter().fold(zero.clone(), |a, v| if *v > a { v.clone() } else { a });
    let index = (0..f.len()).rev().find(|&i| tied(&f[i], &max)).unwrap_or(0);
    let shared = index > 0 && tied(&f[index - 1], &f[index]);
    let lo = f.iter().position(|v| *v > zero).unwrap_or(0);
    let hi = f.iter().rposition(|v| *v > zero).unwrap_or(0);

    let slack = if T::EXACT { zero.clone() } else { T::from_ratio(1, 1_000_000_000) };
    let rising = |a: &T, b: &T| if T::EXACT { b > a } else { b.clone() + slack.clone() > a.clone() };
    if f[lo..=hi].iter().any(|v| v.is_zero()) {
        return Err(Error::UnimodalityViolation { index: lo });
    }
    let rise_end = if shared { index - 1 } else { index };
    for i in lo + 1..=rise_end {
        if !rising(&f[i - 1], &f[i]) {
            return Err(Error::UnimodalityViolation { index: i });
        }
    }
    for i in index + 1..=hi {
        if !rising(&f[i], &f[i - 1]) {
            return Err(Error::UnimodalityViolation { index: i });
        }
    }
    Ok(Mode { index, shared })
}

/// `r_{k,i}(p) = f_{k,i}(p) / f_{k,i−1}(p)` for `1 ≤ i ≤ k`.
pub fn likelihood_ratio<T: Scalar>(p: &PBParams<T>, i: usize) -> Result<T> {
    p.require_interior()?;
    if i == 0 || i > p.k() {
        return Err(Error::invalid(format!("ratio index {i} outside 1..={}", p.k())));
    }
    let f = pmf_of(&p.p);
    let den = f[i - 1].clone();
    if den.is_zero() {
        return Err(Error::ZeroDenominator { coordinate: None });
    }
    Ok(f[i].clone() / den)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffSeq<T> {
    pub k: usize,
    /// `D_{k,1}, …, D_{k,k}`.
    pub diffs: Vec<T>,
}

pub fn differences<T: Scalar>(dist: &PBDist<T>) -> DiffSeq<T> {
    let k = dist.k();
    DiffSeq { k, diffs: (1..=k as isize).map(|j| dist.diff(j)).collect() }
}

/// Coefficients `D_{k,0}, …, D_{k,k+1}` of `Q(z) = (1 − z) Σ f_{k,j} z^j`.
pub fn difference_polynomial<T: Scalar>(dist: &PBDist<T>) -> Vec<T> {
    (0..=dist.k() as isize + 1).map(|j| dist.diff(j)).collect()
}

/// The value `p*` of a new coordinate at which `f_{k,i} = f_{k,i−1}`, given
/// the other `k − 1` parameters:
/// `p* = (f_{k−1,i−1} − f_{k−1,i}) / (2f_{k−1,i−1} − f_{k−1,i} − f_{k−1,i−2})`.
/// `None` when the denominator vanishes or `p* ∉ [0,1]`.
pub fn intersection_point<T: Scalar>(p_rest: &[T], i: usize) -> Option<T> {
    let k = p_rest.len() + 1;
    if i == 0 || i > k {
        return None;
    }
    let f = pmf_of(p_rest);
    let i = i as isize;
    let num = at(&f, i - 1) - at(&f, i);
    let den = at(&f, i - 1) * T::from_int(2) - at(&f, i) - at(&f, i - 2);
    if den.is_zero() {
        return None;
    }
    let x = num / den;
    (x >= T::zero() && x <= T::one()).then_some(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub index: usize,
    pub margin: Number,
}

fn worst<T: Scalar>(margins: &[(usize, T)]) -> Option<(usize, T)> {
    margins
        .iter()
        .cloned()
        .fold(None, |acc: Option<(usize, T)>, (i, m)| match acc {
            Some((_, ref best)) if *best <= m => acc,
            _ => Some((i, m)),
        })
}

fn passes<T: Scalar>(m: &T, scale: f64) -> bool {
    if T::EXACT {
        *m >= T::zero()
    } else {
        m.to_f64() >= -1e-12 * scale.max(f64::MIN_POSITIVE)
    }
}

fn to_margins<T: Scalar>(v: &[(usize, T)]) -> Vec<Margin> {
    v.iter().map(|(index, m)| Margin { index: *index, margin: m.to_number() }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    /// `f_i² − ((i+1)/i)((k−i+1)/(k−i)) f_{i−1} f_{i+1}` for `1 ≤ i ≤ k−1`.
    pub ultra_margins: Vec<Margin>,
    /// `f_i² − f_{i−1} f_{i+1}` for `1 ≤ i ≤ k`.
    pub log_margins: Vec<Margin>,
    pub worst_ultra: Option<Margin>,
    pub ultra_log_concave: bool,
    pub log_concave: bool,
    /// Every ultra margin is strictly positive.
    pub strict: bool,
}

pub fn check_ultra_log_concave<T: Scalar>(dist: &PBDist<T>) -> ConcavityReport {
    let k = dist.k();
    let f = |i: usize| dist.entry(i as isize);
    let ultra: Vec<(usize, T)> = (1..k)
        .map(|i| {
            let c = T::from_ratio((i + 1) as i64, i as i64) * T::from_ratio((k - i + 1) as i64, (k - i) as i64);
            (i, f(i) * f(i) - c * f(i - 1) * f(i + 1))
        })
        .collect();
    let log: Vec<(usize, T)> = (1..=k).map(|i| (i, f(i) * f(i) - f(i - 1) * f(i + 1))).collect();
    let scale = dist.pmf.iter().map(|v| v.to_f64()).fold(0.0, f64::max).powi(2);
    ConcavityReport {
        worst_ultra: worst(&ultra).map(|(index, m)| Margin { index, margin: m.to_number() }),
        ultra_log_concave: ultra.iter().all(|(_, m)| passes(m, scale)),
        log_concave: log.iter().all(|(_, m)| passes(m, scale)),
        strict: ultra.iter().all(|(_, m)| *m > T::zero()),
        ultra_margins: to_margins(&ultra),
        log_margins: to_margins(&log),
    }
}

/// Which normalisation of Newton's inequalities to apply to the differences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewtonForm {
    /// Newton's inequalities for the degree-`(k+1)` real-rooted polynomial
    /// `Q(z) = (1 − z) P(z)`: for `1 ≤ i ≤ k`,
    /// `D_i² ≥ ((i+1)/i)((k+2−i)/(k+1−i)) D_{i−1} D_{i+1}` over `D_0, …, D_{k+1}`.
    Degree,
    /// The same shape with the degree-`k` constant
    /// `((i+1)/i)((k−i+1)/(k−i))`, over `D_1, …, D_k` and `2 ≤ i ≤ k−1`.
    /// This overstates the constant and fails for some pmfs, e.g. the
    /// binomial `(6, 1/3)` at `i = 5`; kept as a diagnostic.
    DegreeK,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonReport {
    pub form: NewtonForm,
    pub margins: Vec<Margin>,
    pub worst: Option<Margin>,
    pub violations: usize,
    pub pass: bool,
}

pub fn check_newton_differences<T: Scalar>(dist: &PBDist<T>, form: NewtonForm) -> Result<NewtonReport> {
    let k = dist.k();
    if k < 3 {
        return Err(Error::invalid(format!("Newton check needs k >= 3, got k = {k}")));
    }
    let d = |j: usize| dist.diff(j as isize);
    let (range, n) = match form {
        NewtonForm::Degree => (1..=k, k + 1),
        NewtonForm::DegreeK => (2..=k - 1, k),
    };
    let margins: Vec<(usize, T)> = range
        .map(|i| {
            let c = T::from_ratio((i + 1) as i64, i as i64) * T::from_ratio((n - i + 1) as i64, (n - i) as i64);
            (i, d(i) * d(i) - c * d(i - 1) * d(i + 1))
        })
        .collect();
    let scale = dist.pmf.iter().map(|v| v.to_f64()).fold(0.0, f64::max).powi(2);
    let violations = margins.iter().filter(|(_, m)| !passes(m, scale)).count();
    Ok(NewtonReport {
        form,
        worst: worst(&margins).map(|(index, m)| Margin { index, margin: m.to_number() }),
        margins: to_margins(&margins),
        violations,
        pass: violations == 0,
    })
}

/// `∂f_{k,i}/∂p_j = f_{k−1,i−1}(p'_j) − f_{k−1,i}(p'_j) = −D_{k−1,i}(p'_j)`.
pub fn partial_derivative<T: Scalar>(p: &PBParams<T>, i: usize, j: usize) -> Result<T> {
    if j >= p.k() {
        return Err(Error::invalid(format!("coordinate {j} outside 0..{}", p.k())));
    }
    if i > p.k() {
        return Err(Error::invalid(format!("entry index {i} outside 0..={}", p.k())));
    }
    let rest = pmf_of(&p.without(j));
    Ok(-diff_at(&rest, i as isize))
}

/// Per-coordinate ratios `D_{k−1,i−1}(p'_j) / D_{k−1,i}(p'_j)`.
///
/// A Lagrange multiplier for minimising `f_{k,i}` on `{f_{k,i} = f_{k,i−1}}`
/// exists only if these all coincide.
pub fn lagrange_ratios<T: Scalar>(p: &PBParams<T>, i: usize) -> Result<Vec<T>> {
    p.require_interior()?;
    if i == 0 || i > p.k() {
        return Err(Error::invalid(format!("index {i} outside 1..={}", p.k())));
    }
    (0..p.k())
        .map(|j| {
            let rest = pmf_of(&p.without(j));
            let den = diff_at(&rest, i as isize);
            if den.is_zero() {
                return Err(Error::ZeroDenominator { coordinate: Some(j) });
            }
            Ok(diff_at(&rest, i as isize - 1) / den)
        })
        .collect()
}

/// Spread `max_j − min_j` of [`lagrange_ratios`]; zero exactly when a single
/// multiplier serves every coordinate.
pub fn lagrange_residual<T: Scalar>(p: &PBParams<T>, i: usize) -> Result<T> {
    let ratios = lagrange_ratios(p, i)?;
    let mut lo = ratios[0].clone();
    let mut hi = ratios[0].clone();
    for r in &ratios[1..] {
        if *r < lo {
            lo = r.clone();
        }
        if *r > hi {
            hi = r.clone();
        }
    }
    Ok(hi - lo)
}

/// Coefficients `(a, b, c, d)` of `Λ(y) = (a y + b) / (c y + d)` built from
/// the differences of the `k − 2` remaining parameters:
/// `a = D_{i−2} − D_{i−1}`, `b = D_{i−1}`, `c = D_{i−1} − D_i`, `d = D_i`.
pub fn mobius_coefficients<T: Scalar>(p_rest2: &[T], i: usize) -> [T; 4] {
    let f = pmf_of(p_rest2);
    let i = i as isize;
    let (dm2, dm1, d0) = (diff_at(&f, i - 2), diff_at(&f, i - 1), diff_at(&f, i));
    [dm2 - dm1.clone(), dm1.clone(), dm1 - d0.clone(), d0]
}

/// `ad − bc = D_{i−2} D_i − D_{i−1}²`; nonzero means `Λ` is injective.
pub fn mobius_determinant<T: Scalar>(p_rest2: &[T], i: usize) -> T {
    let [a, b, c, d] = mobius_coefficients(p_rest2, i);
    a * d - b * c
}

/// `Λ(y)`: the Lagrange ratio of a vector `(y, p_rest2…)` of length `k − 1`
/// as a function of its free coordinate `y`.
pub fn mobius_ratio<T: Scalar>(p_rest2: &[T], i: usize, y: &T) -> Result<T> {
    let [a, b, c, d] = mobius_coefficients(p_rest2, i);
    let den = c * y.clone() + d;
    if den.is_zero() {
        return Err(Error::ZeroDenominator { coordinate: None });
    }
    Ok((a * y.clone() + b) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};

    fn params(v: &[(i64, i64)]) -> PBParams<Rational> {
        PBParams::new(v.iter().map(|&(a, b)| rational(a, b)).collect()).unwrap()
    }

    fn qs(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(a, b)| rational(a, b)).collect()
    }

    #[test]
    fn pmf_examples() {
        assert_eq!(pb_pmf(&params(&[(1, 2), (1, 2)])).pmf(), qs(&[(1, 4), (1, 2), (1, 4)]));
        assert_eq!(pb_pmf(&params(&[(1, 1), (1, 1), (1, 1)])).pmf(), qs(&[(0, 1), (0, 1), (0, 1), (1, 1)]));
        assert_eq!(pb_pmf(&params(&[(1, 3), (1, 3)])).pmf(), qs(&[(4, 9), (4, 9), (1, 9)]));
    }

    #[test]
    fn params_validation() {
        assert!(PBParams::<f64>::new(vec![]).is_err());
        assert!(PBParams::new(vec![0.5, 1.5]).is_err());
        assert!(PBParams::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn mode_examples() {
        let m = pb_mode(&pb_pmf(&params(&[(1, 3), (1, 3)]))).unwrap();
        assert_eq!(m, Mode { index: 1, shared: true });
        let m = pb_mode(&pb_pmf(&params(&[(1, 2), (1, 2)]))).unwrap();
        assert_eq!(m, Mode { index: 1, shared: false });
        let m = pb_mode(&pb_pmf(&params(&[(1, 1), (1, 1), (1, 1)]))).unwrap();
        assert_eq!(m, Mode { index: 3, shared: false });
        let m = pb_mode(&pb_pmf(&PBParams::new(vec![1.0 / 3.0, 1.0 / 3.0]).unwrap())).unwrap();
        assert_eq!(m, Mode { index: 1, shared: true });
    }

    #[test]
    fn mode_rejects_broken_chain() {
        let fake = PBDist { pmf: qs(&[(1, 2), (1, 8), (3, 8)]), params: params(&[(1, 2), (1, 2)]) };
        assert!(matches!(pb_mode(&fake), Err(Error::UnimodalityViolation { .. })));
        let triple = PBDist { pmf: qs(&[(1, 3), (1, 3), (1, 3)]), params: params(&[(1, 2), (1, 2)]) };
        assert!(pb_mode(&triple).is_err());
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(likelihood_ratio(&params(&[(1, 2), (1, 2)]), 1).unwrap(), rational(2, 1));
        assert_eq!(likelihood_ratio(&params(&[(1, 3), (1, 3)]), 1).unwrap(), rational(1, 1));
        assert_eq!(likelihood_ratio(&params(&[(1, 3), (1, 3)]), 2).unwrap(), rational(1, 4));
        assert_eq!(
            likelihood_ratio(&params(&[(1, 3), (1, 1)]), 1),
            Err(Error::BoundaryParameter { coordinate: 1 })
        );
        assert!(likelihood_ratio(&params(&[(1, 3), (1, 3)]), 0).is_err());
    }

    #[test]
    fn differences_examples() {
        let d = differences(&pb_pmf(&params(&[(1, 2), (1, 2)])));
        assert_eq!(d.diffs, qs(&[(1, 4), (-1, 4)]));
        let d = differences(&pb_pmf(&params(&[(1, 3), (1, 3)])));
        assert_eq!(d.diffs, qs(&[(0, 1), (-1, 3)]));
        let d = differences(&pb_pmf(&params(&[(1, 1)])));
        assert_eq!(d.diffs, qs(&[(1, 1)]));
        // telescoping
        let dist = pb_pmf(&params(&[(1, 5), (2, 7), (5, 6), (1, 2)]));
        let sum = differences(&dist).diffs.into_iter().fold(rational(0, 1), |a, b| a + b);
        assert_eq!(sum, dist.entry(4) - dist.entry(0));
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(intersection_point(&qs(&[(1, 3)]), 1), Some(rational(1, 3)));
        assert_eq!(intersection_point(&qs(&[(1, 5)]), 2), None);
        assert_eq!(intersection_point(&qs(&[(1, 2)]), 1), Some(rational(0, 1)));
        assert_eq!(intersection_point(&qs(&[(1, 2)]), 2), Some(rational(1, 1)));
    }

    #[test]
    fn intersection_equalises_adjacent_entries() {
        let rest = qs(&[(1, 4), (3, 5), (2, 3)]);
        for i in 1..=4 {
            if let Some(x) = intersection_point(&rest, i) {
                let mut p = rest.clone();
                p.push(x);
                let f = pmf_of(&p);
                assert_eq!(f[i], f[i - 1]);
            }
        }
    }

    #[test]
    fn ultra_log_concave_examples() {
        let r = check_ultra_log_concave(&pb_pmf(&params(&[(1, 2), (1, 2)])));
        assert_eq!(r.ultra_margins[0].margin, Number::Exact(rational(0, 1)));
        assert!(r.ultra_log_concave && !r.strict);
        let r = check_ultra_log_concave(&pb_pmf(&params(&[(1, 3), (1, 3)])));
        assert_eq!(r.ultra_margins[0].margin, Number::Exact(rational(0, 1)));
        let r = check_ultra_log_concave(&pb_pmf(&params(&[(1, 7), (2, 5), (4, 5)])));
        assert!(r.ultra_log_concave && r.strict && r.log_concave);
    }

    #[test]
    fn newton_examples() {
        let dist = pb_pmf(&params(&[(1, 2), (1, 2), (1, 2)]));
        assert_eq!(differences(&dist).diffs, qs(&[(1, 4), (0, 1), (-1, 4)]));
        for form in [NewtonForm::Degree, NewtonForm::DegreeK] {
            assert!(check_newton_differences(&dist, form).unwrap().pass);
        }
        let dist = pb_pmf(&params(&[(1, 3), (1, 3), (1, 3)]));
        assert_eq!(differences(&dist).diffs, qs(&[(4, 27), (-6, 27), (-5, 27)]));
        let lit = check_newton_differences(&dist, NewtonForm::DegreeK).unwrap();
        // 36/729 − 3·(4/27)(−5/27) = 96/729
        assert_eq!(lit.margins[0].margin, Number::Exact(rational(96, 729)));
        assert!(check_newton_differences(&pb_pmf(&params(&[(1, 2), (1, 3)])), NewtonForm::Degree).is_err());
    }

    #[test]
    fn newton_degree_k_constant_is_too_strong() {
        let dist = pb_pmf(&PBParams::new(vec![rational(1, 3); 6]).unwrap());
        let lit = check_newton_differences(&dist, NewtonForm::DegreeK).unwrap();
        assert!(!lit.pass);
        assert_eq!(lit.worst.as_ref().unwrap().index, 5);
        assert!(check_newton_differences(&dist, NewtonForm::Degree).unwrap().pass);
    }

    #[test]
    fn derivative_examples() {
        let p = params(&[(1, 3), (1, 3)]);
        assert_eq!(partial_derivative(&p, 1, 0).unwrap(), rational(1, 3));
        let p = params(&[(2, 7), (3, 11)]);
        assert_eq!(partial_derivative(&p, 2, 0).unwrap(), rational(3, 11));
        // i = 0 uses f_{k−1,−1} = 0
        assert_eq!(partial_derivative(&p, 0, 0).unwrap(), -rational(8, 11));
        assert!(partial_derivative(&p, 0, 2).is_err());
        assert!(partial_derivative(&p, 3, 0).is_err());
    }

    #[test]
    fn lagrange_examples() {
        let p = PBParams::new(vec![rational(2, 7); 4]).unwrap();
        for i in 1..=4 {
            if let Ok(r) = lagrange_residual(&p, i) {
                assert_eq!(r, rational(0, 1));
            }
        }
        let r = lagrange_residual(&params(&[(1, 4), (1, 2), (3, 4)]), 2).unwrap();
        assert!(r > rational(0, 1));
        let r = lagrange_residual(&params(&[(1, 3), (2, 3)]), 1).unwrap();
        assert_eq!(r, rational(3, 1));
        // ratio at coordinate 0 of (1/2, 1/2): D_{1,1}(1/2) = 0
        assert_eq!(
            lagrange_residual(&params(&[(1, 2), (1, 2)]), 1),
            Err(Error::ZeroDenominator { coordinate: Some(0) })
        );
    }

    #[test]
    fn mobius_examples() {
        let rest = qs(&[(1, 2)]);
        let a = mobius_ratio(&rest, 2, &rational(1, 2)).unwrap();
        let b = mobius_ratio(&rest, 2, &rational(1, 4)).unwrap();
        assert_ne!(a, b);
        assert_ne!(mobius_determinant(&rest, 2), rational(0, 1));
    }

    #[test]
    fn mobius_matches_lagrange_ratios() {
        let p = params(&[(1, 5), (3, 7), (2, 3), (1, 2)]);
        let rest2 = p.probs()[2..].to_vec();
        for i in 1..=4 {
            if let Ok(ratios) = lagrange_ratios(&p, i) {
                // removing coordinate 0 leaves (p_1, rest2); removing 1 leaves (p_0, rest2)
                assert_eq!(mobius_ratio(&rest2, i, &p.probs()[1]).unwrap(), ratios[0]);
                assert_eq!(mobius_ratio(&rest2, i, &p.probs()[0]).unwrap(), ratios[1]);
            }
        }
    }
}
