use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use convmax::constants::{diagonal_profile, optimal_constant_d, verify_sharpness, DiagonalProfile, SharpnessCertificate};
use convmax::continuous::{step_function_export, upper_bound_sequence};
use convmax::minimax::{
    diagonal_constant, general_constant, grid_oracle, intersection_restricted_solve, FactorMode, MinimaxConfig,
    DEFAULT_GRID_BUDGET,
};
use convmax::poisson_binomial::PBParams;
use convmax::report::{export_report, pb_report, to_json_value, unix_ms, Exportable, Format, PbCheck, RunRecord};
use convmax::scalar::{parse_rational, Number};
use convmax::selftest::run_selftest;
use convmax::sidon::{enumerate_verify, max_size_g_sidon, verify_bound, CubeSet, SampleConfig, SearchConfig};
use convmax::Error;

#[derive(Parser)]
#[command(name = "convmax", version, about = "Extremal constants for suprema of k-fold convolutions")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "CONVMAX_THREADS", default_value_t = 0)]
    threads: usize,

    /// Also write a JSON run record (command, config, outputs, timestamps).
    #[arg(long, global = true)]
    record: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Text,
    Plotdata,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
            OutFormat::Text => Format::Text,
            OutFormat::Plotdata => Format::Plotdata,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form constants, envelope profiles and sharpness certificates.
    Constant(ConstantArgs),
    /// Numerical minimax estimates and the grid oracle.
    Solve(SolveArgs),
    /// Poisson-binomial pmf and structural checks.
    Pb(PbArgs),
    /// Sum-set representation counts on the binary cube.
    #[command(subcommand)]
    Sidon(SidonCommand),
    /// Upper bounds for the continuous constant.
    Continuous(ContinuousArgs),
    /// Runs the built-in verification suite.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct ConstantArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Print the exact rational value as well as the decimal.
    #[arg(long)]
    exact: bool,
    /// Include the piecewise envelope description.
    #[arg(long)]
    profile: bool,
    /// Include the sharpness certificate for the extremal function.
    #[arg(long)]
    sharpness: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Diagonal,
    General,
    /// Exact evaluation at the shared-mode point (m = 1).
    Intersection,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Diagonal)]
    mode: ModeArg,
    /// Run the exact grid oracle with this denominator instead of the solver.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_GRID_BUDGET)]
    grid_budget: u64,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    multistarts: Option<usize>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON solver configuration; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct PbArgs {
    /// Comma-separated success probabilities (p/q, integers or decimals).
    #[arg(long)]
    p: String,
    #[arg(long, default_value = "unimodal,ulc,newton,ratios,lagrange")]
    checks: String,
}

#[derive(Subcommand)]
enum SidonCommand {
    /// Checks the count bound on every nonempty subset (or a seeded sample).
    Verify {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reports the counts and Sidon class of one set.
    Classify {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Searches for a largest set with every sum represented at most g times.
    Search {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        g: u64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ContinuousArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 6)]
    m_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    multistarts: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Emit the step function of the given comma-separated weights instead.
    #[arg(long)]
    step: Option<String>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Serialize)]
struct ConstantReport {
    k: usize,
    d: usize,
    value: Number,
    #[serde(skip)]
    exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<DiagonalProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sharpness: Option<SharpnessCertificate>,
}

impl Exportable for ConstantReport {
    fn kind(&self) -> &'static str {
        "constant"
    }

    fn text(&self) -> String {
        let mut out = match (&self.value, self.exact) {
            (Number::Exact(r), true) => format!("C_{{{},1}}^{} = {} ≈ {:.12}\n", self.k, self.d, r, self.value.to_f64()),
            _ => format!("C_{{{},1}}^{} ≈ {:.12}\n", self.k, self.d, self.value.to_f64()),
        };
        if let Some(p) = &self.profile {
            out.push_str(&p.text());
        }
        if let Some(s) = &self.sharpness {
            out.push_str(&s.text());
        }
        out
    }

    fn plot_data(&self) -> Option<String> {
        diagonal_profile(self.k).ok().and_then(|p| p.plot_data())
    }

    fn violations(&self) -> usize {
        self.sharpness.as_ref().map_or(0, |s| s.violations())
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Solver(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

struct Emitted {
    bytes: Vec<u8>,
    json: Value,
    violations: usize,
    config: Value,
    seed: Option<u64>,
}

fn emit<T: Exportable>(result: &T, format: Format, config: Value, seed: Option<u64>) -> Result<Emitted, Failure> {
    Ok(Emitted {
        bytes: export_report(result, format)?,
        json: to_json_value(result)?,
        violations: result.violations(),
        config,
        seed,
    })
}

fn solver_config(args: &SolveArgs) -> Result<MinimaxConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => MinimaxConfig::default(),
    };
    if let Some(t) = args.tol {
        cfg.tolerance = t;
    }
    if let Some(n) = args.multistarts {
        cfg.multistarts = n;
    }
    if let Some(n) = args.max_iterations {
        cfg.max_iterations = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn parse_list(text: &str) -> Result<Vec<convmax::Rational>, Failure> {
    text.split(',').map(|s| parse_rational(s).map_err(Failure::from)).collect()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn execute(cli: &Cli) -> Result<Emitted, Failure> {
    let format = Format::from(cli.format);
    match &cli.command {
        Command::Constant(a) => {
            let report = ConstantReport {
                k: a.k,
                d: a.d,
                value: Number::Exact(optimal_constant_d(a.k, a.d)?),
                exact: a.exact,
                profile: if a.profile { Some(diagonal_profile(a.k)?) } else { None },
                sharpness: if a.sharpness { Some(verify_sharpness(a.k, a.d)?) } else { None },
            };
            emit(&report, format, Value::Null, None)
        }
        Command::Solve(a) => {
            let mode = match a.mode {
                ModeArg::Diagonal => FactorMode::Diagonal,
                ModeArg::General => FactorMode::General,
                ModeArg::Intersection => {
                    if a.m != 1 {
                        return Err(Failure::Usage("intersection mode needs --m 1".into()));
                    }
                    return emit(&intersection_restricted_solve(a.k)?, format, Value::Null, None);
                }
            };
            if let Some(n) = a.grid {
                let b = grid_oracle(a.k, a.m, n, mode, a.grid_budget)?;
                return emit(&b, format, serde_json::json!({ "n": n, "budget": a.grid_budget }), None);
            }
            let cfg = solver_config(a)?;
            let r = match mode {
                FactorMode::Diagonal => diagonal_constant(a.k, a.m, &cfg)?,
                FactorMode::General => general_constant(a.k, a.m, &cfg)?,
            };
            emit(&r, format, to_value(&cfg), Some(cfg.seed))
        }
        Command::Pb(a) => {
            let p = PBParams::new(parse_list(&a.p)?)?;
            let checks: Vec<PbCheck> =
                a.checks.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<_, _>>()?;
            emit(&pb_report(&p, &checks)?, format, Value::Null, None)
        }
        Command::Sidon(SidonCommand::Verify { d, k, samples, seed }) => {
            let cfg = SampleConfig { samples: *samples, seed: *seed };
            emit(&enumerate_verify(*d, *k, &cfg)?, format, to_value(&cfg), Some(*seed))
        }
        Command::Sidon(SidonCommand::Classify { set, k }) => {
            let text = fs::read_to_string(set).map_err(|e| Failure::Usage(format!("{}: {e}", set.display())))?;
            emit(&verify_bound(&CubeSet::parse(&text)?, *k)?, format, Value::Null, None)
        }
        Command::Sidon(SidonCommand::Search { d, k, g, restarts, seed }) => {
            let cfg = SearchConfig { restarts: *restarts, seed: *seed };
            emit(&max_size_g_sidon(*d, *k, *g, &cfg)?, format, to_value(&cfg), Some(*seed))
        }
        Command::Continuous(a) => {
            if let Some(w) = &a.step {
                return emit(&step_function_export(&parse_list(w)?, a.k)?, format, Value::Null, None);
            }
            let mut cfg = MinimaxConfig { seed: a.seed, ..MinimaxConfig::default() };
            if let Some(n) = a.multistarts {
                cfg.multistarts = n;
            }
            if let Some(t) = a.tol {
                cfg.tolerance = t;
            }
            emit(&upper_bound_sequence(a.k, a.m_max, &cfg)?, format, to_value(&cfg), Some(cfg.seed))
        }
        Command::Selftest(a) => emit(&run_selftest(a.seed)?, format, Value::Null, Some(a.seed)),
    }
}

fn write_to(path: &Option<PathBuf>, bytes: &[u8]) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

fn run(argv: Vec<OsString>) -> u8 {
    let started = unix_ms();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return 2;
        }
    }
    let emitted = match execute(&cli) {
        Ok(e) => e,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    if let Err(e) = write_to(&cli.out, &emitted.bytes) {
        eprintln!("error: {e}");
        return 2;
    }
    if let Some(path) = &cli.record {
        let command = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
        let record = RunRecord::new(command, emitted.config, emitted.seed, emitted.json, started);
        let text = serde_json::to_string_pretty(&record).unwrap_or_default() + "\n";
        if let Err(e) = fs::write(path, text) {
            eprintln!("error: {}: {e}", path.display());
            return 2;
        }
    }
    if emitted.violations > 0 {
        eprintln!("invariant violations: {}", emitted.violations);
        return 1;
    }
    0
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os().collect()))
}
