//! Representation counts of `k`-fold sums over subsets of `{0,1}^d`.
//!
//! Points are `d`-bit masks with the first coordinate as the most
//! significant bit, matching the flat index of an `m = 1` [`GridFn`].
//! For nonempty `A ⊆ {0,1}^d` the convolution bound with `f_i = χ_A` gives
//! `max_x r_{kA}(x) ≥ C_{k,1}^d |A|^k`, where `r_{kA}(x)` counts ordered
//! `k`-tuples of `A` summing to `x`. The maximum count is the smallest `g`
//! for which `A` is `g`-Sidon of order `k`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::optimal_constant_d;
use crate::error::{Error, Result};
use crate::grid::{convolve_many, GridFn};
use crate::scalar::{Number, Rational};

/// Largest dimension accepted for exhaustive subset enumeration.
pub const EXHAUSTIVE_MAX_D: usize = 4;
/// Largest dimension accepted for cube sets.
pub const MAX_D: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CubeSet {
    d: usize,
    members: Vec<u32>,
}

impl CubeSet {
    /// Sorts and deduplicates `members`; rejects masks `≥ 2^d`.
    pub fn new(d: usize, mut members: Vec<u32>) -> Result<Self> {
        if d == 0 || d > MAX_D {
            return Err(Error::invalid(format!("dimension must be in 1..={MAX_D}, got {d}")));
        }
        if let Some(bad) = members.iter().find(|&&x| x >= 1 << d) {
            return Err(Error::invalid(format!("mask {bad} is not a point of {{0,1}}^{d}")));
        }
        members.sort_unstable();
        members.dedup();
        Ok(CubeSet { d, members })
    }

    pub fn full(d: usize) -> Result<Self> {
        if d == 0 || d > MAX_D {
            return Err(Error::invalid(format!("dimension must be in 1..={MAX_D}, got {d}")));
        }
        CubeSet::new(d, (0..1u32 << d).collect())
    }

    /// The set whose members are the set bits of `subset` (bit `x` ↦ point `x`).
    pub fn from_subset_mask(d: usize, subset: u64) -> Result<Self> {
        CubeSet::new(d, (0..1u32 << d).filter(|&x| subset >> x & 1 == 1).collect())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// Coordinates of a member, most significant bit first.
    pub fn point(&self, mask: u32) -> Vec<usize> {
        (0..self.d).map(|t| (mask >> (self.d - 1 - t) & 1) as usize).collect()
    }

    /// Applies `x ↦ σ(x)` where output coordinate `t` is input coordinate `perm[t]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.d];
        if perm.len() != self.d || perm.iter().any(|&p| p >= self.d || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::invalid("not a permutation of the coordinates"));
        }
        let members = self
            .members
            .iter()
            .map(|&x| {
                let pt = self.point(x);
                perm.iter().fold(0u32, |acc, &p| acc << 1 | pt[p] as u32)
            })
            .collect();
        CubeSet::new(self.d, members)
    }

    /// Flips every bit of every member.
    pub fn complement_bits(&self) -> Self {
        let all = (1u32 << self.d) - 1;
        CubeSet::new(self.d, self.members.iter().map(|x| x ^ all).collect()).expect("same dimension")
    }

    pub fn indicator(&self) -> Result<GridFn<u64>> {
        let mut values = vec![0u64; 1 << self.d];
        for &x in &self.members {
            values[x as usize] = 1;
        }
        GridFn::new(self.d, 1, values)
    }

    /// One point per line as `d` binary digits, most significant first.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for &x in &self.members {
            let _ = writeln!(out, "{:0width$b}", x, width = self.d);
        }
        out
    }

    /// Parses [`CubeSet::to_text`] output; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut d = None;
        let mut members = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse { line: lineno + 1, message };
            if !line.chars().all(|c| c == '0' || c == '1') {
                return Err(err(format!("`{line}` is not a 0/1 string")));
            }
            match d {
                None => d = Some(line.len()),
                Some(d) if d != line.len() => {
                    return Err(err(format!("expected {d} digits, got {}", line.len())));
                }
                _ => {}
            }
            if line.len() > MAX_D {
                return Err(err(format!("dimension {} exceeds {MAX_D}", line.len())));
            }
            members.push(u32::from_str_radix(line, 2).map_err(|e| err(e.to_string()))?);
        }
        let d = d.ok_or(Error::Empty("set file"))?;
        CubeSet::new(d, members)
    }
}

fn check_counts(a: &CubeSet, k: usize) -> Result<()> {
    if a.is_empty() {
        return Err(Error::Empty("cube set"));
    }
    if k == 0 {
        return Err(Error::invalid("order k must be at least 1"));
    }
    // counts are at most |A|^k ≤ 2^{dk}
    if a.d * k > 63 {
        return Err(Error::invalid(format!("counts for d={}, k={k} may overflow u64", a.d)));
    }
    Ok(())
}

/// `r_{kA}` on `{0,…,k}^d`, the `k`-fold convolution of the indicator of `A`.
pub fn representation_counts(a: &CubeSet, k: usize) -> Result<GridFn<u64>> {
    check_counts(a, k)?;
    let chi = a.indicator()?;
    convolve_many(&vec![chi; k])
}

/// Nonzero entries of [`representation_counts`] as `(point, count)`, in
/// flat-index order.
pub fn representation_list(a: &CubeSet, k: usize) -> Result<Vec<(Vec<usize>, u64)>> {
    let counts = representation_counts(a, k)?;
    Ok(counts
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (counts.point_of(i), c))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SidonReport {
    pub set: CubeSet,
    pub k: usize,
    pub size: usize,
    pub max_count: u64,
    pub argmax_points: Vec<Vec<usize>>,
    /// `C_{k,1}^d |A|^k`.
    pub bound: Number,
    /// Smallest `g` such that the set is `g`-Sidon of order `k`.
    pub g_class: u64,
    /// `max_count − bound`.
    pub slack: Number,
    pub pass: bool,
    pub equality: bool,
}

pub fn verify_bound(a: &CubeSet, k: usize) -> Result<SidonReport> {
    let counts = representation_counts(a, k)?;
    let max_count = counts.sup_norm();
    let argmax_points = counts.argmax().into_iter().map(|i| counts.point_of(i)).collect();
    let bound = optimal_constant_d(k, a.d)? * Rational::from_integer(BigInt::from(a.len()).pow(k as u32));
    let slack = Rational::from_integer(BigInt::from(max_count)) - bound.clone();
    let zero = Rational::from_integer(BigInt::from(0));
    Ok(SidonReport {
        set: a.clone(),
        k,
        size: a.len(),
        max_count,
        argmax_points,
        g_class: max_count,
        pass: slack >= zero,
        equality: slack == zero,
        bound: Number::Exact(bound),
        slack: Number::Exact(slack),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    /// Number of random subsets when enumeration is not exhaustive.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { samples: 4096, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationSummary {
    pub d: usize,
    pub k: usize,
    pub exhaustive: bool,
    pub subsets_checked: u64,
    pub failures: u64,
    pub failing_sets: Vec<CubeSet>,
    pub min_slack: Number,
    /// Sets attaining the minimum slack, in enumeration order (at most [`KEEP`]).
    pub min_slack_sets: Vec<CubeSet>,
    pub equality_cases: Vec<CubeSet>,
}

/// Cap on the number of sets stored per summary list.
pub const KEEP: usize = 32;

struct Partial {
    checked: u64,
    failing: Vec<CubeSet>,
    failures: u64,
    min_slack: Option<Rational>,
    min_sets: Vec<CubeSet>,
    equal: Vec<CubeSet>,
}

impl Partial {
    fn empty() -> Self {
        Partial { checked: 0, failing: vec![], failures: 0, min_slack: None, min_sets: vec![], equal: vec![] }
    }

    fn add(&mut self, r: SidonReport) {
        self.checked += 1;
        if !r.pass {
            self.failures += 1;
            push_capped(&mut self.failing, r.set.clone());
        }
        if r.equality {
            push_capped(&mut self.equal, r.set.clone());
        }
        let slack = r.slack.exact().cloned().expect("exact slack");
        match &self.min_slack {
            Some(s) if *s < slack => {}
            Some(s) if *s == slack => push_capped(&mut self.min_sets, r.set),
            _ => {
                self.min_slack = Some(slack);
                self.min_sets = vec![r.set];
            }
        }
    }

    /// Appends `later`, which covers subsets after those of `self`.
    fn merge(mut self, later: Partial) -> Partial {
        self.checked += later.checked;
        self.failures += later.failures;
        later.failing.into_iter().for_each(|s| push_capped(&mut self.failing, s));
        later.equal.into_iter().for_each(|s| push_capped(&mut self.equal, s));
        match (&self.min_slack, later.min_slack) {
            (_, None) => {}
            (None, Some(s)) => {
                self.min_slack = Some(s);
                self.min_sets = later.min_sets;
            }
            (Some(a), Some(b)) => {
                if b < *a {
                    self.min_slack = Some(b);
                    self.min_sets = later.min_sets;
                } else if b == *a {
                    later.min_sets.into_iter().for_each(|s| push_capped(&mut self.min_sets, s));
                }
            }
        }
        self
    }
}

fn push_capped(v: &mut Vec<CubeSet>, s: CubeSet) {
    if v.len() < KEEP {
        v.push(s);
    }
}

fn random_subset(d: usize, seed: u64, stream: u64) -> Result<CubeSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    loop {
        let members: Vec<u32> = (0..1u32 << d).filter(|_| rng.gen_bool(0.5)).collect();
        if !members.is_empty() {
            return CubeSet::new(d, members);
        }
    }
}

/// Runs [`verify_bound`] on every nonempty subset of `{0,1}^d` for
/// `d ≤ EXHAUSTIVE_MAX_D`, in numeric order of the subset masks, or on
/// `cfg.samples` seeded random subsets otherwise. Parallel over contiguous
/// ranges; the merged summary does not depend on the schedule.
pub fn enumerate_verify(d: usize, k: usize, cfg: &SampleConfig) -> Result<EnumerationSummary> {
    if d == 0 || d > MAX_D {
        return Err(Error::invalid(format!("dimension must be in 1..={MAX_D}, got {d}")));
    }
    let exhaustive = d <= EXHAUSTIVE_MAX_D;
    let total: u64 = if exhaustive { (1u64 << (1u32 << d)) - 1 } else { cfg.samples as u64 };
    let chunk = 256u64;
    let chunks: Vec<(u64, u64)> = (0..total.div_ceil(chunk)).map(|c| (c * chunk, ((c + 1) * chunk).min(total))).collect();
    let partials: Vec<Result<Partial>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut p = Partial::empty();
            for i in lo..hi {
                let set = if exhaustive { CubeSet::from_subset_mask(d, i + 1)? } else { random_subset(d, cfg.seed, i)? };
                p.add(verify_bound(&set, k)?);
            }
            Ok(p)
        })
        .collect();
    let merged = partials.into_iter().try_fold(Partial::empty(), |acc, p| p.map(|p| acc.merge(p)))?;
    Ok(EnumerationSummary {
        d,
        k,
        exhaustive,
        subsets_checked: merged.checked,
        failures: merged.failures,
        failing_sets: merged.failing,
        min_slack: Number::Exact(merged.min_slack.unwrap_or_default()),
        min_slack_sets: merged.min_sets,
        equality_cases: merged.equal,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapKind {
    /// `⌊(g 2^{kd} / binom(k,⌊k/2⌋)^d)^{1/k}⌋`, the odd-`k` closed form.
    OddClosedForm,
    /// `⌊(g / C_{k,1}^d)^{1/k}⌋` from the count bound with the even-`k`
    /// constant. Not a true ceiling for `d ≥ 3`; exceeding it is reported as a
    /// violation.
    GeneralBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Greedy restarts when the search is not exhaustive.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { restarts: 64, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SidonSearchResult {
    pub d: usize,
    pub k: usize,
    pub g: u64,
    pub best: CubeSet,
    pub size: usize,
    pub g_class: u64,
    pub cap: u64,
    pub cap_kind: CapKind,
    pub exhaustive: bool,
}

/// Largest `a` with `a^k · C_{k,1}^d ≤ g`.
pub fn size_cap(d: usize, k: usize, g: u64) -> Result<u64> {
    let c = optimal_constant_d(k, d)?;
    let g = Rational::from_integer(BigInt::from(g));
    let fits = |a: u64| Rational::from_integer(BigInt::from(a).pow(k as u32)) * c.clone() <= g;
    let (mut lo, mut hi) = (0u64, 1u64);
    while fits(hi) {
        lo = hi;
        hi = hi.checked_mul(2).ok_or_else(|| Error::invalid("cap overflow"))?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn g_class(a: &CubeSet, k: usize) -> Result<u64> {
    Ok(representation_counts(a, k)?.sup_norm())
}

/// Largest `A ⊆ {0,1}^d` found with every `k`-fold sum represented at most
/// `g` times. Exhaustive for `d ≤ EXHAUSTIVE_MAX_D` (ties go to the smallest
/// subset mask); otherwise a seeded randomized greedy, which is a heuristic.
pub fn max_size_g_sidon(d: usize, k: usize, g: u64, cfg: &SearchConfig) -> Result<SidonSearchResult> {
    if g == 0 {
        return Err(Error::invalid("g must be at least 1"));
    }
    if d == 0 || d > MAX_D {
        return Err(Error::invalid(format!("dimension must be in 1..={MAX_D}, got {d}")));
    }
    let cap = size_cap(d, k, g)?;
    let cap_kind = if k % 2 == 1 { CapKind::OddClosedForm } else { CapKind::GeneralBound };
    let exhaustive = d <= EXHAUSTIVE_MAX_D;
    let best = if exhaustive {
        let total = 1u64 << (1u32 << d);
        let found: Vec<Result<Option<(usize, u64)>>> = (1..total)
            .collect::<Vec<_>>()
            .par_chunks(256)
            .map(|chunk| {
                let mut best: Option<(usize, u64)> = None;
                for &mask in chunk {
                    let size = mask.count_ones() as usize;
                    if best.is_some_and(|(s, _)| s >= size) {
                        continue;
                    }
                    if g_class(&CubeSet::from_subset_mask(d, mask)?, k)? <= g {
                        best = Some((size, mask));
                    }
                }
                Ok(best)
            })
            .collect();
        let mut best: Option<(usize, u64)> = None;
        for f in found {
            if let Some((s, mask)) = f? {
                if best.is_none_or(|(b, _)| s > b) {
                    best = Some((s, mask));
                }
            }
        }
        let (_, mask) = best.ok_or_else(|| Error::Solver("no admissible set".into()))?;
        CubeSet::from_subset_mask(d, mask)?
    } else {
        let runs: Vec<Result<CubeSet>> = (0..cfg.restarts.max(1))
            .into_par_iter()
            .map(|r| greedy(d, k, g, cfg.seed, r as u64))
            .collect();
        let mut best: Option<CubeSet> = None;
        for run in runs {
            let run = run?;
            if best.as_ref().is_none_or(|b| run.len() > b.len()) {
                best = Some(run);
            }
        }
        best.ok_or_else(|| Error::Solver("no admissible set".into()))?
    };
    let size = best.len();
    Ok(SidonSearchResult { d, k, g, g_class: g_class(&best, k)?, size, best, cap, cap_kind, exhaustive })
}

fn greedy(d: usize, k: usize, g: u64, seed: u64, stream: u64) -> Result<CubeSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut order: Vec<u32> = (0..1u32 << d).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut members = vec![order[0]];
    for &x in &order[1..] {
        members.push(x);
        if g_class(&CubeSet::new(d, members.clone())?, k)? > g {
            members.pop();
        }
    }
    CubeSet::new(d, members)
}

/// `binom(k, ⌊k/2⌋)^d`, the count at the centre of `k{0,1}^d`.
pub fn full_cube_count(k: usize, d: usize) -> Option<u64> {
    crate::scalar::binomial(k as u64, (k / 2) as u64).pow(d as u32).to_u64()
}
