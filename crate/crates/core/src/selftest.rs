//! Built-in verification suite, runnable from the command line.
//!
//! Each criterion draws its random inputs from its own ChaCha stream of the
//! root seed, and details contain no timings, so a report is a pure function
//! of the seed.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{optimal_constant, optimal_constant_d, verify_sharpness};
use crate::continuous::{upper_bound_sequence, KNOWN_LOWER_K2};
use crate::error::Result;
use crate::grid::{convolve_many, ratio, GridFn};
use crate::minimax::{diagonal_constant, general_constant, grid_oracle, FactorMode, MinimaxConfig, DEFAULT_GRID_BUDGET};
use crate::poisson_binomial::{
    check_newton_differences, check_ultra_log_concave, lagrange_residual, likelihood_ratio, partial_derivative,
    pb_mode, pb_pmf, NewtonForm, PBParams,
};
use crate::scalar::{Number, Rational, Scalar};
use crate::sidon::{enumerate_verify, CubeSet, SampleConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfTestReport {
    pub seed: u64,
    pub criteria: Vec<CriterionOutcome>,
}

impl SelfTestReport {
    pub fn passed(&self) -> usize {
        self.criteria.iter().filter(|c| c.pass).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.criteria.len()
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A rational in the open interval `(0, 1)` with denominator at most 97.
fn random_interior(rng: &mut ChaCha8Rng) -> Rational {
    let den: i64 = rng.gen_range(2..=97);
    Rational::from_ratio(rng.gen_range(1..den), den)
}

fn outcome(id: u32, name: &str, pass: bool, detail: String) -> CriterionOutcome {
    CriterionOutcome { id, name: name.to_string(), pass, detail }
}

fn closed_forms() -> Result<CriterionOutcome> {
    let mut bad = Vec::new();
    for (k, n) in [(2usize, 3usize), (3, 2), (4, 5), (5, 2)] {
        let c = optimal_constant(k)?;
        let grid = grid_oracle(k, 1, n, FactorMode::General, DEFAULT_GRID_BUDGET)?;
        if grid.upper != Number::Exact(c.clone()) {
            bad.push(format!("k={k}: {c} vs grid {}", grid.upper));
        }
    }
    let expected = [(2, 4, 9), (3, 3, 8), (4, 216, 625), (5, 5, 16)];
    for (k, a, b) in expected {
        if optimal_constant(k)? != Rational::from_ratio(a, b) {
            bad.push(format!("k={k} differs from {a}/{b}"));
        }
    }
    Ok(outcome(1, "closed-form table", bad.is_empty(), if bad.is_empty() { "4/9, 3/8, 216/625, 5/16".into() } else { bad.join("; ") }))
}

fn sharpness() -> Result<CriterionOutcome> {
    let mut bad = Vec::new();
    for k in 2..=8 {
        for d in 1..=3 {
            if !verify_sharpness(k, d)?.pass {
                bad.push(format!("(k={k}, d={d})"));
            }
        }
    }
    Ok(outcome(2, "sharpness", bad.is_empty(), format!("21 cases, {} failures {}", bad.len(), bad.join(" "))))
}

fn solver_agreement(seed: u64) -> Result<CriterionOutcome> {
    let cfg = MinimaxConfig { seed, ..MinimaxConfig::default() };
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for k in 2..=6 {
        let c = optimal_constant(k)?.to_f64();
        for r in [general_constant(k, 1, &cfg)?, diagonal_constant(k, 1, &cfg)?] {
            let err = (r.value - c).abs();
            worst = worst.max(err);
            if err > 1e-6 || r.shared_modes.len() < 2 {
                bad.push(format!("k={k} {}: err {err:.3e}, modes {:?}", r.mode.as_str(), r.shared_modes));
            }
        }
    }
    Ok(outcome(3, "solver agreement at m = 1", bad.is_empty(), format!("max error {worst:.3e} {}", bad.join("; "))))
}

fn pb_suite(seed: u64) -> Result<CriterionOutcome> {
    let mut rng = rng_for(seed, 4);
    let mut failures: Vec<String> = Vec::new();
    let mut literal_violations = 0usize;
    let mut fail = |what: String| {
        if failures.len() < 8 {
            failures.push(what);
        }
    };
    for trial in 0..1000 {
        let k = rng.gen_range(1..=10);
        let p: Vec<Rational> = (0..k).map(|_| random_interior(&mut rng)).collect();
        let params = PBParams::new(p.clone())?;
        let dist = pb_pmf(&params);
        if dist.total() != Rational::one() {
            fail(format!("#{trial} normalization"));
        }
        if pb_mode(&dist).is_err() {
            fail(format!("#{trial} unimodality"));
        }
        let c = check_ultra_log_concave(&dist);
        if !c.ultra_log_concave || !c.log_concave {
            fail(format!("#{trial} log-concavity"));
        }
        if k >= 3 {
            if !check_newton_differences(&dist, NewtonForm::Degree)?.pass {
                fail(format!("#{trial} newton"));
            }
            literal_violations += usize::from(!check_newton_differences(&dist, NewtonForm::DegreeK)?.pass);
        }
        let ratios: Vec<Rational> = (1..=k).map(|i| likelihood_ratio(&params, i)).collect::<Result<_>>()?;
        if ratios.windows(2).any(|w| w[1] >= w[0]) {
            fail(format!("#{trial} ratios not decreasing in i"));
        }
        let j = rng.gen_range(0..k);
        let i = rng.gen_range(1..=k);
        let mut prev: Option<Rational> = None;
        for step in 1..10 {
            let mut q = p.clone();
            q[j] = Rational::from_ratio(step, 10);
            let r = likelihood_ratio(&PBParams::new(q)?, i)?;
            if prev.as_ref().is_some_and(|pr| r <= *pr) {
                fail(format!("#{trial} ratio not increasing in p_{j}"));
            }
            prev = Some(r);
        }
        let pf: Vec<f64> = p.iter().map(Scalar::to_f64).collect();
        let i = rng.gen_range(0..=k);
        let analytic = partial_derivative(&PBParams::new(pf.clone())?, i, j)?;
        let h = 1e-5;
        let eval = |x: f64| {
            let mut q = pf.clone();
            q[j] = x;
            crate::poisson_binomial::pmf_of(&q)[i]
        };
        let numeric = (eval(pf[j] + h) - eval(pf[j] - h)) / (2.0 * h);
        if (analytic - numeric).abs() > 1e-8 {
            fail(format!("#{trial} derivative {analytic} vs {numeric}"));
        }
    }
    for _ in 0..100 {
        let k = rng.gen_range(1..=10);
        let x = random_interior(&mut rng);
        let params = PBParams::new(vec![x; k])?;
        for i in 1..=k {
            if let Ok(r) = lagrange_residual(&params, i) {
                if !r.is_zero() {
                    fail(format!("lagrange residual {r} at k={k}, i={i}"));
                }
            }
        }
    }
    let pass = failures.is_empty();
    Ok(outcome(
        4,
        "poisson-binomial properties",
        pass,
        format!(
            "1000 vectors + 100 diagonal, failures: [{}]; degree-k Newton form violated on {literal_violations} vectors (informational)",
            failures.join("; ")
        ),
    ))
}

fn cross_module(seed: u64) -> Result<CriterionOutcome> {
    let mut rng = rng_for(seed, 5);
    let mut discrepancies = 0;
    for _ in 0..200 {
        let k = rng.gen_range(1..=8);
        let p: Vec<Rational> = (0..k).map(|_| random_interior(&mut rng)).collect();
        let pmf = pb_pmf(&PBParams::new(p.clone())?);
        let factors: Vec<GridFn<Rational>> = p
            .iter()
            .map(|x| GridFn::from_slice(&[Rational::one() - x.clone(), x.clone()]))
            .collect::<Result<_>>()?;
        if convolve_many(&factors)?.values() != pmf.pmf() {
            discrepancies += 1;
        }
    }
    Ok(outcome(5, "pmf equals convolution", discrepancies == 0, format!("200 vectors, {discrepancies} discrepancies")))
}

fn sidon_sweep() -> Result<CriterionOutcome> {
    let mut bad = Vec::new();
    let mut checked = 0;
    for d in 1..=3 {
        for k in [2, 3] {
            let s = enumerate_verify(d, k, &SampleConfig::default())?;
            checked += s.subsets_checked;
            if s.failures > 0 {
                bad.push(format!("d={d} k={k}: {} failures", s.failures));
            }
            if k == 3 {
                let full = CubeSet::full(d)?;
                if s.equality_cases != vec![full.clone()] {
                    bad.push(format!("d={d}: equality cases {:?}", s.equality_cases));
                }
                let count = crate::sidon::verify_bound(&full, 3)?.max_count;
                if count != 3u64.pow(d as u32) {
                    bad.push(format!("d={d}: full cube count {count}"));
                }
            }
        }
    }
    Ok(outcome(6, "sidon exhaustive", bad.is_empty(), format!("{checked} subsets {}", bad.join("; "))))
}

fn continuous_bounds(seed: u64) -> Result<CriterionOutcome> {
    let cfg = MinimaxConfig { seed, ..MinimaxConfig::default() };
    let t = upper_bound_sequence(2, 6, &cfg)?;
    let first = t.rows[0].upper_bound == Number::Exact(Rational::from_ratio(16, 9));
    let hi = 16.0 / 9.0 + 1e-9;
    let in_range = t.rows.iter().all(|r| (KNOWN_LOWER_K2..=hi).contains(&r.upper_bound.to_f64()));
    let bounds: Vec<String> = t.rows.iter().map(|r| format!("{:.6}", r.upper_bound.to_f64())).collect();
    Ok(outcome(7, "continuous upper bounds", first && in_range, format!("k=2 bounds [{}]", bounds.join(", "))))
}

fn trivial_bounds(seed: u64) -> Result<CriterionOutcome> {
    let mut rng = rng_for(seed, 8);
    let mut failures = 0;
    for k in [2usize, 3] {
        for d in [1usize, 2] {
            let c = optimal_constant_d(k, d)?;
            let avg = Rational::new(BigInt::one(), BigInt::from(k + 1).pow(d as u32));
            for _ in 0..1000 {
                let fs: Vec<GridFn<Rational>> = (0..k)
                    .map(|_| loop {
                        let vals: Vec<Rational> = (0..1 << d).map(|_| Rational::from_int(rng.gen_range(0..10))).collect();
                        if vals.iter().any(|v| !v.is_zero()) {
                            break GridFn::new(d, 1, vals);
                        }
                    })
                    .collect::<Result<_>>()?;
                let r = ratio(&fs)?;
                if r < avg || r < c {
                    failures += 1;
                }
            }
        }
    }
    Ok(outcome(8, "trivial-bound fuzz", failures == 0, format!("4000 tuples, {failures} failures")))
}

/// Runs criteria 1 to 8.
pub fn run_selftest(seed: u64) -> Result<SelfTestReport> {
    let criteria = vec![
        closed_forms()?,
        sharpness()?,
        solver_agreement(seed)?,
        pb_suite(seed)?,
        cross_module(seed)?,
        sidon_sweep()?,
        continuous_bounds(seed)?,
        trivial_bounds(seed)?,
    ];
    Ok(SelfTestReport { seed, criteria })
}
