//! Machine-readable reports.
//!
//! Every result type implements [`Exportable`]; [`export_report`] renders it
//! as JSON (wrapped with a `schema` tag), CSV, plain text, or plot data.
//! Rationals appear as `"p/q"` strings alongside decimal approximations.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::constants::{diagonal_envelope, DiagonalProfile, SharpnessCertificate};
use crate::continuous::{BoundTable, StepFunction};
use crate::error::{Error, Result};
use crate::minimax::{GridBracket, MinimaxResult};
use crate::poisson_binomial::{
    check_newton_differences, check_ultra_log_concave, differences, lagrange_residual, likelihood_ratio, pb_mode,
    pb_pmf, ConcavityReport, Mode, NewtonForm, NewtonReport, PBParams,
};
use crate::scalar::{Number, Rational, Scalar};
use crate::selftest::SelfTestReport;
use crate::sidon::{EnumerationSummary, SidonReport, SidonSearchResult};

/// Version tag embedded in every JSON report.
pub const SCHEMA: &str = "convmax.report/1";

/// Number of samples in envelope plot data.
pub const PLOT_SAMPLES: usize = 1001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
    Plotdata,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            "plotdata" => Ok(Format::Plotdata),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
            Format::Plotdata => "plotdata",
        }
    }
}

pub trait Exportable: Serialize {
    fn kind(&self) -> &'static str;

    fn text(&self) -> String;

    fn csv(&self) -> Option<String> {
        None
    }

    fn plot_data(&self) -> Option<String> {
        None
    }

    /// Number of violated mathematical invariants recorded in the result.
    fn violations(&self) -> usize {
        0
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    kind: &'static str,
    data: &'a T,
}

/// JSON value of `{schema, kind, data}`.
pub fn to_json_value<T: Exportable>(result: &T) -> Result<Value> {
    serde_json::to_value(Envelope { schema: SCHEMA, kind: result.kind(), data: result })
        .map_err(|e| Error::invalid(e.to_string()))
}

pub fn export_report<T: Exportable>(result: &T, format: Format) -> Result<Vec<u8>> {
    let unsupported = || Error::UnsupportedFormat(format!("{} for {}", format.as_str(), result.kind()));
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Envelope { schema: SCHEMA, kind: result.kind(), data: result })
                .map_err(|e| Error::invalid(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => result.csv().ok_or_else(unsupported)?,
        Format::Text => result.text(),
        Format::Plotdata => result.plot_data().ok_or_else(unsupported)?,
    };
    Ok(text.into_bytes())
}

/// A persisted run: the command, its configuration and outputs, and a
/// separate `meta` block holding everything that may differ between replays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub version: String,
    pub command: Vec<String>,
    pub config: Value,
    pub seed: Option<u64>,
    pub outputs: Value,
    pub meta: RunMeta,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

pub fn unix_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

impl RunRecord {
    pub fn new(command: Vec<String>, config: Value, seed: Option<u64>, outputs: Value, started_unix_ms: u128) -> Self {
        RunRecord {
            schema: SCHEMA.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            config,
            seed,
            outputs,
            meta: RunMeta { started_unix_ms, finished_unix_ms: unix_ms() },
        }
    }

    /// Everything except `meta`, as compact JSON.
    pub fn payload(&self) -> String {
        let mut v = serde_json::to_value(self).unwrap_or(Value::Null);
        if let Value::Object(map) = &mut v {
            map.remove("meta");
        }
        v.to_string()
    }
}

fn envelope_samples(k: usize) -> String {
    let mut out = String::from("# x envelope\n");
    for s in 0..PLOT_SAMPLES {
        let x = s as f64 / (PLOT_SAMPLES - 1) as f64;
        let _ = writeln!(out, "{x:.6} {:.12}", diagonal_envelope::<f64>(k, &x));
    }
    out
}

impl Exportable for SharpnessCertificate {
    fn kind(&self) -> &'static str {
        "sharpness"
    }

    fn text(&self) -> String {
        format!(
            "k = {}, d = {}\nratio    = {}\nconstant = {}\nequal: {}\n",
            self.k,
            self.d,
            Number::Exact(self.ratio.clone()),
            Number::Exact(self.constant.clone()),
            self.pass
        )
    }

    fn violations(&self) -> usize {
        usize::from(!self.pass)
    }
}

impl Exportable for DiagonalProfile {
    fn kind(&self) -> &'static str {
        "diagonal_profile"
    }

    fn text(&self) -> String {
        let mut out = format!("k = {}\n", self.k);
        for p in &self.pieces {
            let _ = writeln!(out, "[{}, {}]  dominant term i = {}", p.lo, p.hi, p.index);
        }
        let locs: Vec<String> = self.envelope_min_locations.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(out, "minimum {} at x = {}", Number::Exact(self.envelope_min_value.clone()), locs.join(", "));
        out
    }

    fn csv(&self) -> Option<String> {
        let mut out = String::from("lo,hi,index\n");
        for p in &self.pieces {
            let _ = writeln!(out, "{},{},{}", p.lo, p.hi, p.index);
        }
        Some(out)
    }

    fn plot_data(&self) -> Option<String> {
        Some(envelope_samples(self.k))
    }
}

impl Exportable for MinimaxResult {
    fn kind(&self) -> &'static str {
        "minimax"
    }

    fn text(&self) -> String {
        let mut out = format!("k = {}, m = {}, mode = {}\n", self.k, self.m, self.mode.as_str());
        match &self.exact_value {
            Some(v) => {
                let _ = writeln!(out, "value = {v}");
            }
            None => {
                let _ = writeln!(out, "value = {:.12}", self.value);
            }
        }
        for (j, f) in self.argument.iter().enumerate() {
            let w: Vec<String> = f.iter().map(|v| format!("{v:.9}")).collect();
            let _ = writeln!(out, "factor {j}: ({})", w.join(", "));
        }
        let _ = writeln!(out, "shared modes: {:?}", self.shared_modes);
        let _ = writeln!(
            out,
            "method: {:?}, converged: {}, iterations: {}, seed: {}",
            self.method, self.converged, self.iterations, self.seed
        );
        out
    }

    fn csv(&self) -> Option<String> {
        let mut out = String::from("factor,index,weight\n");
        for (j, f) in self.argument.iter().enumerate() {
            for (t, w) in f.iter().enumerate() {
                let _ = writeln!(out, "{j},{t},{w:.17}");
            }
        }
        Some(out)
    }

    fn plot_data(&self) -> Option<String> {
        let shape = crate::minimax::Shape { k: self.k, m: self.m, mode: self.mode };
        let values = shape.values(&self.argument.concat());
        let mut out = String::from("# index value\n");
        for (i, v) in values.iter().enumerate() {
            let _ = writeln!(out, "{i} {v:.15}");
        }
        Some(out)
    }

    fn violations(&self) -> usize {
        usize::from(self.shared_modes.len() < 2 && !self.on_boundary)
    }
}

impl Exportable for GridBracket {
    fn kind(&self) -> &'static str {
        "grid_bracket"
    }

    fn text(&self) -> String {
        let mut out = format!("k = {}, m = {}, n = {}, mode = {}\n", self.k, self.m, self.n, self.mode.as_str());
        let _ = writeln!(out, "lower = {}\nupper = {}\nevaluated = {}", self.lower, self.upper, self.evaluated);
        for (j, f) in self.argmin.iter().enumerate() {
            let w: Vec<String> = f.iter().map(|v| v.exact().map_or(v.to_string(), |r| r.to_string())).collect();
            let _ = writeln!(out, "factor {j}: ({})", w.join(", "));
        }
        out
    }
}

impl Exportable for SidonReport {
    fn kind(&self) -> &'static str {
        "sidon_report"
    }

    fn text(&self) -> String {
        format!(
            "d = {}, k = {}, |A| = {}\nmax count = {} (g-Sidon class)\nbound     = {}\nslack     = {}\npass: {}, equality: {}\n",
            self.set.dim(),
            self.k,
            self.size,
            self.max_count,
            self.bound,
            self.slack,
            self.pass,
            self.equality
        )
    }

    fn csv(&self) -> Option<String> {
        let mut out = String::from("point,count\n");
        for p in &self.argmax_points {
            let s: String = p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            let _ = writeln!(out, "{s},{}", self.max_count);
        }
        Some(out)
    }

    fn violations(&self) -> usize {
        usize::from(!self.pass)
    }
}

impl Exportable for EnumerationSummary {
    fn kind(&self) -> &'static str {
        "sidon_enumeration"
    }

    fn text(&self) -> String {
        let mut out = format!(
            "d = {}, k = {}, {} subsets ({}), {} failures\nminimum slack = {}\n",
            self.d,
            self.k,
            self.subsets_checked,
            if self.exhaustive { "exhaustive" } else { "sampled" },
            self.failures,
            self.min_slack
        );
        for s in &self.equality_cases {
            let pts: Vec<String> = s.to_text().lines().map(str::to_string).collect();
            let _ = writeln!(out, "equality: {{{}}}", pts.join(", "));
        }
        out
    }

    fn violations(&self) -> usize {
        self.failures as usize
    }
}

impl Exportable for SidonSearchResult {
    fn kind(&self) -> &'static str {
        "sidon_search"
    }

    fn text(&self) -> String {
        let pts: Vec<String> = self.best.to_text().lines().map(str::to_string).collect();
        format!(
            "d = {}, k = {}, g = {}\nbest size = {} ({}), class = {}\ncap = {} ({:?})\nset: {{{}}}\n",
            self.d,
            self.k,
            self.g,
            self.size,
            if self.exhaustive { "exhaustive" } else { "heuristic" },
            self.g_class,
            self.cap,
            self.cap_kind,
            pts.join(", ")
        )
    }

    fn violations(&self) -> usize {
        usize::from(self.size as u64 > self.cap || self.g_class > self.g)
    }
}

impl Exportable for BoundTable {
    fn kind(&self) -> &'static str {
        "bound_table"
    }

    fn text(&self) -> String {
        let mut out = format!("k = {}\n   m  cbar              bound             converged\n", self.k);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>4}  {:<16.12}  {:<16.12}  {}",
                r.m,
                r.cbar.to_f64(),
                r.upper_bound.to_f64(),
                r.converged
            );
        }
        let _ = writeln!(out, "best upper bound: {}", self.best_bound);
        if let Some(lo) = self.known_lower {
            let _ = writeln!(out, "known lower bound: {lo}");
        }
        out
    }

    fn csv(&self) -> Option<String> {
        Some(self.to_csv())
    }

    fn plot_data(&self) -> Option<String> {
        let mut out = String::from("# m bound\n");
        for r in &self.rows {
            let _ = writeln!(out, "{} {:.15}", r.m, r.upper_bound.to_f64());
        }
        Some(out)
    }

    fn violations(&self) -> usize {
        self.floor_violations.len()
    }
}

impl Exportable for StepFunction {
    fn kind(&self) -> &'static str {
        "step_function"
    }

    fn text(&self) -> String {
        let mut out = format!("k = {}\n", self.k);
        for c in &self.cells {
            let _ = writeln!(out, "[{}, {})  height {}", c.lo, c.hi, c.height);
        }
        out
    }

    fn plot_data(&self) -> Option<String> {
        let mut out = String::from("# x height\n");
        for c in &self.cells {
            let _ = writeln!(out, "{:.12} {:.12}", c.lo.to_f64(), c.height.to_f64());
            let _ = writeln!(out, "{:.12} {:.12}", c.hi.to_f64(), c.height.to_f64());
        }
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PbCheck {
    Unimodal,
    Ulc,
    Newton,
    Ratios,
    Lagrange,
}

impl std::str::FromStr for PbCheck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "unimodal" => Ok(PbCheck::Unimodal),
            "ulc" => Ok(PbCheck::Ulc),
            "newton" => Ok(PbCheck::Newton),
            "ratios" => Ok(PbCheck::Ratios),
            "lagrange" => Ok(PbCheck::Lagrange),
            other => Err(Error::invalid(format!("unknown check `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PbReport {
    pub p: Vec<Number>,
    pub pmf: Vec<Number>,
    pub differences: Vec<Number>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unimodal_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concavity: Option<ConcavityReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub newton: Vec<NewtonReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ratios: Vec<Option<Number>>,
    /// `r_{k,1} > r_{k,2} > …` on the defined entries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratios_decreasing: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lagrange_residuals: Vec<Option<Number>>,
    /// Names of failed invariant checks. The degree-`k` Newton form is
    /// informational and never listed.
    pub failed: Vec<String>,
}

/// Runs the requested checks on `p` in exact arithmetic.
pub fn pb_report(p: &PBParams<Rational>, checks: &[PbCheck]) -> Result<PbReport> {
    let dist = pb_pmf(p);
    let mut rep = PbReport {
        p: p.probs().iter().map(Scalar::to_number).collect(),
        pmf: dist.pmf().iter().map(Scalar::to_number).collect(),
        differences: differences(&dist).diffs.iter().map(Scalar::to_number).collect(),
        mode: None,
        unimodal_error: None,
        concavity: None,
        newton: vec![],
        ratios: vec![],
        ratios_decreasing: None,
        lagrange_residuals: vec![],
        failed: vec![],
    };
    let k = p.k();
    for check in checks {
        match check {
            PbCheck::Unimodal => match pb_mode(&dist) {
                Ok(m) => rep.mode = Some(m),
                Err(e) => {
                    rep.unimodal_error = Some(e.to_string());
                    rep.failed.push("unimodal".into());
                }
            },
            PbCheck::Ulc => {
                let c = check_ultra_log_concave(&dist);
                if !c.ultra_log_concave {
                    rep.failed.push("ultra_log_concave".into());
                }
                if !c.log_concave {
                    rep.failed.push("log_concave".into());
                }
                rep.concavity = Some(c);
            }
            PbCheck::Newton => {
                if k >= 3 {
                    let degree = check_newton_differences(&dist, NewtonForm::Degree)?;
                    if !degree.pass {
                        rep.failed.push("newton".into());
                    }
                    rep.newton = vec![degree, check_newton_differences(&dist, NewtonForm::DegreeK)?];
                }
            }
            PbCheck::Ratios => {
                let ratios: Vec<Option<Rational>> = (1..=k).map(|i| likelihood_ratio(p, i).ok()).collect();
                let defined: Vec<&Rational> = ratios.iter().flatten().collect();
                let decreasing = defined.windows(2).all(|w| w[1] < w[0]);
                if !decreasing {
                    rep.failed.push("ratios_decreasing".into());
                }
                rep.ratios_decreasing = Some(decreasing);
                rep.ratios = ratios.into_iter().map(|r| r.map(Number::Exact)).collect();
            }
            PbCheck::Lagrange => {
                rep.lagrange_residuals =
                    (1..=k).map(|i| lagrange_residual(p, i).ok().map(Number::Exact)).collect();
            }
        }
    }
    Ok(rep)
}

impl Exportable for PbReport {
    fn kind(&self) -> &'static str {
        "poisson_binomial"
    }

    fn text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[Number]| v.iter().map(|n| n.exact().map_or(n.to_string(), |r| r.to_string())).collect::<Vec<_>>();
        let _ = writeln!(out, "p    = ({})", join(&self.p).join(", "));
        let _ = writeln!(out, "pmf  = ({})", join(&self.pmf).join(", "));
        let _ = writeln!(out, "diff = ({})", join(&self.differences).join(", "));
        if let Some(m) = &self.mode {
            let _ = writeln!(out, "mode = {}{}", m.index, if m.shared { " (shared with previous)" } else { "" });
        }
        if let Some(c) = &self.concavity {
            let _ = writeln!(out, "ultra-log-concave: {} (strict: {}), log-concave: {}", c.ultra_log_concave, c.strict, c.log_concave);
        }
        for n in &self.newton {
            let _ = writeln!(out, "newton {:?}: pass {} ({} violations)", n.form, n.pass, n.violations);
        }
        if let Some(d) = self.ratios_decreasing {
            let _ = writeln!(out, "likelihood ratios strictly decreasing: {d}");
        }
        for (i, r) in self.lagrange_residuals.iter().enumerate() {
            let _ = writeln!(out, "lagrange residual i={}: {}", i + 1, r.as_ref().map_or("undefined".into(), |r| r.to_string()));
        }
        let _ = writeln!(out, "failed: {:?}", self.failed);
        out
    }

    fn csv(&self) -> Option<String> {
        let mut out = String::from("i,pmf,diff\n");
        for (i, f) in self.pmf.iter().enumerate() {
            let d = if i == 0 { String::new() } else { self.differences[i - 1].exact().map_or(String::new(), |r| r.to_string()) };
            let _ = writeln!(out, "{i},{},{d}", f.exact().map_or(f.to_string(), |r| r.to_string()));
        }
        Some(out)
    }

    fn violations(&self) -> usize {
        self.failed.len()
    }
}

impl Exportable for SelfTestReport {
    fn kind(&self) -> &'static str {
        "selftest"
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            let _ = writeln!(out, "[{}] {:>2} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.name, c.detail);
        }
        let _ = writeln!(out, "seed {}: {} of {} criteria passed", self.seed, self.passed(), self.criteria.len());
        out
    }

    fn violations(&self) -> usize {
        self.criteria.len() - self.passed()
    }
}
