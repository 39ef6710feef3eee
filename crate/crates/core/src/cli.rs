//! Command-line front end. The `inspag` binary only parses arguments and
//! forwards to [`run`].

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::agm::{run_agm, certified_gap_bounds, AgmConfig, InexactnessSchedule, QuadraticModel};
use crate::error::{Error, Result};
use crate::hyperfast::testfns::{QuadraticFn, QuarticNorm, StronglyConvexQuartic};
use crate::hyperfast::{
    restart_strongly_convex, restart_uniformly_convex, HyperfastConfig, LogisticOracle,
    RestartOutcome, RestartScheduleStrong, RestartScheduleUniform, SmoothOracle,
};
use crate::inspag::{default_radius, run_inspag_with, InspagConfig};
use crate::linalg::norm_sq;
use crate::metrics::{
    write_restart_csv, write_round_csv, write_round_jsonl, RestartRow, RoundRecord, RunSummary,
    SummaryContext,
};
use crate::problem::{
    check_oracles, generate_synthetic, libsvm, FdCheckConfig, LogRegProblem, SparseDataset,
};
use crate::reference::logistic_reference;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_CERTIFIED: i32 = 2;
pub const EXIT_ORACLE_MISMATCH: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "inspag", version, about = "Statistically preconditioned accelerated gradient experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distributed InSPAG run on a LIBSVM file or synthetic data.
    RunInspag(InspagArgs),
    /// Restarted Hyperfast subsolver on a single objective.
    RunHyperfast(HyperfastArgs),
    /// Adaptive accelerated method on a random quadratic with exact projections.
    RunAgm(AgmArgs),
    /// Finite-difference checks of the logistic oracles.
    CheckOracles(CheckArgs),
    /// Writes a synthetic dataset in LIBSVM format.
    GenSynthetic(CommonArgs),
}

/// Flags shared by every subcommand. Anything left unset falls back to the
/// `--config` file and then to the built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// `key = value` file; flags take precedence over its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// LIBSVM dataset.
    #[arg(long, conflicts_with = "synthetic")]
    pub data: Option<PathBuf>,
    /// Synthetic dataset as `N,d,density`.
    #[arg(long)]
    pub synthetic: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub n_precond: Option<usize>,
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub lambda2: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub m0: Option<f64>,
    #[arg(long)]
    pub c_rate: Option<f64>,
    /// Maximum number of outer iterations.
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct InspagArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Solve to high accuracy first and report the final gap.
    #[arg(long)]
    pub reference: bool,
    /// Also write the round records as JSON lines.
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
    /// Record `wall_ms = 0` so repeated runs produce identical files.
    #[arg(long)]
    pub no_wall_clock: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Objective {
    Logistic,
    Quartic,
}

#[derive(Debug, Clone, Args)]
pub struct HyperfastArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "logistic")]
    pub objective: Objective,
    /// Degree of uniform convexity of the built-in test function (2 or 4).
    #[arg(long, default_value_t = 4.0)]
    pub q: f64,
    #[arg(long)]
    pub sigma_q: Option<f64>,
    /// Dimension of the built-in test function.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub reference: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AgmArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 20)]
    pub dim: usize,
    /// Constant inexactness `δ` of a noisy model (0 for the exact model).
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[arg(long, hide = true)]
    pub corrupt_gradient: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Path(PathBuf),
    Synthetic { n: usize, d: usize, density: f64 },
}

impl DataSource {
    pub fn load(&self, seed: u64) -> Result<SparseDataset> {
        match self {
            DataSource::Path(p) => libsvm::read_path(p, None).map_err(|e| match e {
                Error::Io(io) => Error::Input(format!("cannot read {}: {io}", p.display())),
                other => other,
            }),
            DataSource::Synthetic { n, d, density } => generate_synthetic(seed, *n, *d, *density),
        }
    }
}

impl FromStr for DataSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::Input(format!("synthetic dataset must be given as N,d,density (got `{s}`)"));
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(DataSource::Synthetic {
            n: parts[0].parse().map_err(|_| bad())?,
            d: parts[1].parse().map_err(|_| bad())?,
            density: parts[2].parse().map_err(|_| bad())?,
        })
    }
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data: DataSource,
    pub workers: usize,
    pub n_precond: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub sigma: f64,
    pub radius: Option<f64>,
    pub m0: f64,
    pub c_rate: f64,
    pub rounds: usize,
    pub target: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: DataSource::Synthetic {
                n: 2000,
                d: 20,
                density: 0.5,
            },
            workers: 4,
            n_precond: 500,
            lambda1: 1e-3,
            lambda2: 1e-3,
            sigma: 1e-3,
            radius: None,
            m0: 1.0,
            c_rate: 48.0,
            rounds: 100,
            target: 1e-6,
            seed: 0,
            out: None,
        }
    }
}

const CONFIG_KEYS: [&str; 14] = [
    "data", "synthetic", "workers", "n-precond", "lambda1", "lambda2", "sigma", "radius", "m0",
    "c-rate", "rounds", "target", "seed", "out",
];

/// Parses `key = value` lines; `#` starts a comment, `_` and `-` are interchangeable in keys.
pub fn parse_config_file(text: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    let mut issues = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            issues.push(format!("line {}: expected key = value", i + 1));
            continue;
        };
        let key = k.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            issues.push(format!("line {}: unknown key `{}`", i + 1, k.trim()));
            continue;
        }
        map.insert(key, v.trim().to_string());
    }
    if issues.is_empty() {
        Ok(map)
    } else {
        Err(Error::Input(format!("config file: {}", issues.join("; "))))
    }
}

impl RunConfig {
    /// Merges flags over the config file over defaults, then validates.
    /// Every problem found is reported in one error.
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => parse_config_file(&std::fs::read_to_string(p).map_err(|e| {
                Error::Input(format!("cannot read config {}: {e}", p.display()))
            })?)?,
            None => HashMap::new(),
        };
        let mut issues = Vec::new();
        let pick = |flag: Option<String>, key: &str| -> Option<String> {
            flag.or_else(|| file.get(key).cloned())
        };
        fn parse<T: FromStr>(raw: Option<String>, key: &str, issues: &mut Vec<String>) -> Option<T> {
            let raw = raw?;
            match raw.parse() {
                Ok(v) => Some(v),
                Err(_) => {
                    issues.push(format!("{key}: cannot parse `{raw}`"));
                    None
                }
            }
        }
        fn s<T: ToString>(v: &Option<T>) -> Option<String> {
            v.as_ref().map(ToString::to_string)
        }
        let d = RunConfig::default();

        let data_path = pick(args.data.as_ref().map(|p| p.display().to_string()), "data");
        let synthetic = pick(args.synthetic.clone(), "synthetic");
        let workers = pick(s(&args.workers), "workers");
        let n_precond = pick(s(&args.n_precond), "n-precond");
        let lambda1 = pick(s(&args.lambda1), "lambda1");
        let lambda2 = pick(s(&args.lambda2), "lambda2");
        let sigma = pick(s(&args.sigma), "sigma");
        let radius = pick(s(&args.radius), "radius");
        let m0 = pick(s(&args.m0), "m0");
        let c_rate = pick(s(&args.c_rate), "c-rate");
        let rounds = pick(s(&args.rounds), "rounds");
        let target = pick(s(&args.target), "target");
        let seed = pick(s(&args.seed), "seed");
        let out = pick(args.out.as_ref().map(|p| p.display().to_string()), "out");

        let data = match (data_path, synthetic) {
            (Some(p), None) => DataSource::Path(PathBuf::from(p)),
            (None, Some(text)) => text.parse().unwrap_or_else(|e: Error| {
                issues.push(e.to_string());
                d.data.clone()
            }),
            (None, None) => d.data.clone(),
            (Some(_), Some(_)) => {
                issues.push("give either data or synthetic, not both".into());
                d.data.clone()
            }
        };
        let cfg = RunConfig {
            data,
            workers: parse(workers, "workers", &mut issues).unwrap_or(d.workers),
            n_precond: parse(n_precond, "n-precond", &mut issues).unwrap_or(d.n_precond),
            lambda1: parse(lambda1, "lambda1", &mut issues).unwrap_or(d.lambda1),
            lambda2: parse(lambda2, "lambda2", &mut issues).unwrap_or(d.lambda2),
            sigma: parse(sigma, "sigma", &mut issues).unwrap_or(d.sigma),
            radius: parse(radius, "radius", &mut issues),
            m0: parse(m0, "m0", &mut issues).unwrap_or(d.m0),
            c_rate: parse(c_rate, "c-rate", &mut issues).unwrap_or(d.c_rate),
            rounds: parse(rounds, "rounds", &mut issues).unwrap_or(d.rounds),
            target: parse(target, "target", &mut issues).unwrap_or(d.target),
            seed: parse(seed, "seed", &mut issues).unwrap_or(d.seed),
            out: out.map(PathBuf::from),
        };
        issues.extend(cfg.issues());
        if issues.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Input(issues.join("; ")))
        }
    }

    fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let DataSource::Synthetic { n, d, density } = self.data {
            if n == 0 || d == 0 {
                out.push(format!("synthetic data needs N > 0 and d > 0 (got N={n}, d={d})"));
            }
            if !(density > 0.0 && density <= 1.0) {
                out.push(format!("density must lie in (0, 1] (got {density})"));
            }
        }
        if self.workers == 0 {
            out.push("workers must be >= 1".into());
        }
        if self.n_precond == 0 {
            out.push("n-precond must be >= 1".into());
        }
        if !(self.lambda1 > 0.0 && self.lambda2 > 0.0) {
            out.push("lambda1 and lambda2 must be positive".into());
        }
        if !(self.sigma >= 0.0) {
            out.push("sigma must be >= 0".into());
        }
        if self.radius.is_some_and(|r| !(r > 0.0)) {
            out.push("radius must be positive".into());
        }
        if !(self.m0 > 0.0) {
            out.push("m0 must be positive".into());
        }
        if !(self.c_rate > 0.0) {
            out.push("c-rate must be positive".into());
        }
        if !(self.target >= 0.0) {
            out.push("target must be >= 0".into());
        }
        out
    }

    pub fn problem(&self) -> Result<LogRegProblem> {
        LogRegProblem::new(self.data.load(self.seed)?, self.lambda1, self.lambda2)
    }

    pub fn inspag_config(&self) -> InspagConfig {
        InspagConfig {
            radius: self.radius,
            m0: self.m0,
            n_precond: self.n_precond,
            sigma: self.sigma,
            k_max: self.rounds,
            target: self.target,
            c_rate: self.c_rate,
            seed: self.seed,
            workers: self.workers,
            ..InspagConfig::default()
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::RunInspag(a) => cmd_run_inspag(&a),
        Command::RunHyperfast(a) => cmd_run_hyperfast(&a),
        Command::RunAgm(a) => cmd_run_agm(&a),
        Command::CheckOracles(a) => cmd_check_oracles(&a),
        Command::GenSynthetic(a) => cmd_gen_synthetic(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn write_all(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes)
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn out_or(cfg: &RunConfig, default: &str) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

pub fn cmd_run_inspag(args: &InspagArgs) -> Result<i32> {
    let cfg = RunConfig::resolve(&args.common)?;
    let problem = cfg.problem()?;
    let started = Instant::now();
    let run = run_inspag_with(&problem, &cfg.inspag_config(), !args.no_wall_clock)?;
    let wall_seconds = if args.no_wall_clock {
        0.0
    } else {
        started.elapsed().as_secs_f64()
    };
    let reference = if args.reference {
        Some(logistic_reference(&problem)?.value)
    } else {
        None
    };
    let records = RoundRecord::from_trials(&run.trials);
    let summary = RunSummary::from_run(
        &run,
        &SummaryContext {
            seed: cfg.seed,
            samples: problem.data().len(),
            dim: problem.dim(),
            lambda1: cfg.lambda1,
            lambda2: cfg.lambda2,
            sigma: cfg.sigma,
            reference_value: reference,
            wall_seconds,
        },
    );
    let mut csv_bytes = Vec::new();
    write_round_csv(&mut csv_bytes, &records)?;
    let mut json = serde_json::to_vec_pretty(&summary).map_err(|e| Error::Internal(e.to_string()))?;
    json.push(b'\n');
    let mut jsonl = Vec::new();
    write_round_jsonl(&mut jsonl, &records)?;

    let csv_path = out_or(&cfg, "inspag_rounds.csv");
    write_all(&csv_path, &csv_bytes)?;
    write_all(&csv_path.with_extension("json"), &json)?;
    if let Some(p) = &args.jsonl {
        write_all(p, &jsonl)?;
    }

    println!(
        "iterations {}  rounds {}  bytes {}  inner iterations {}",
        summary.iterations, summary.rounds, summary.bytes, summary.total_inner_iters
    );
    if let Some(f) = summary.final_value {
        println!("final objective {f:.12e}");
    }
    if let Some(c) = summary.final_certificate {
        println!("certificate {c:.3e} (target {:.3e})", cfg.target);
    }
    if let Some(g) = summary.final_gap {
        println!("gap to reference {g:.3e}");
    }
    Ok(if run.certificate_met {
        EXIT_OK
    } else {
        EXIT_NOT_CERTIFIED
    })
}

fn restart_rows<O: SmoothOracle + ?Sized>(
    f: &O,
    out: &RestartOutcome,
    f_star: Option<f64>,
) -> Vec<RestartRow> {
    out.restarts
        .iter()
        .map(|r| {
            let measured = f_star.map(|fs| f.value(&r.point) - fs);
            RestartRow {
                t: r.index,
                scale: r.scale,
                steps: r.steps,
                certified_gap: r.certified_gap,
                measured_gap: measured,
                certificate_holds: measured.map(|g| g <= r.certified_gap),
            }
        })
        .collect()
}

pub fn cmd_run_hyperfast(args: &HyperfastArgs) -> Result<i32> {
    let cfg = RunConfig::resolve(&args.common)?;
    let hf = HyperfastConfig::default();
    let rows = match args.objective {
        Objective::Quartic => {
            if args.dim == 0 {
                return Err(Error::Input("dim must be >= 1".into()));
            }
            let z0 = vec![1.0; args.dim];
            let center = vec![0.0; args.dim];
            let (f, sigma_q): (Box<dyn SmoothOracle>, f64) = if args.q == 4.0 {
                let s = args.sigma_q.unwrap_or(QuarticNorm::SIGMA_4);
                (Box::new(QuarticNorm::new(center)), s)
            } else if args.q == 2.0 {
                let mu = args.sigma_q.unwrap_or(1.0);
                (Box::new(StronglyConvexQuartic::new(center, mu)), mu)
            } else {
                return Err(Error::Input(format!(
                    "the built-in test function supports q = 2 or q = 4 (got {})",
                    args.q
                )));
            };
            let mut sched = RestartScheduleUniform::new(args.q, sigma_q, f.value(&z0));
            sched.c_hat = cfg.c_rate;
            let out = restart_uniformly_convex(&*f, &sched, &z0, cfg.target, &hf)?;
            restart_rows(&*f, &out, Some(0.0))
        }
        Objective::Logistic => {
            let problem = cfg.problem()?;
            let oracle = LogisticOracle::new(&problem)?;
            let mu = problem.smoothness_constants()?.mu_strong;
            let radius = match cfg.radius {
                Some(r) => r,
                None => default_radius(&problem)?,
            };
            let mut sched = RestartScheduleStrong::new(radius, mu);
            sched.c = cfg.c_rate;
            let z0 = vec![0.0; problem.dim()];
            let out = restart_strongly_convex(&oracle, &z0, &sched, cfg.target, &hf)?;
            let f_star = if args.reference {
                Some(logistic_reference(&problem)?.value)
            } else {
                None
            };
            restart_rows(&oracle, &out, f_star)
        }
    };
    let mut bytes = Vec::new();
    write_restart_csv(&mut bytes, &rows)?;
    write_all(&out_or(&cfg, "hyperfast_restarts.csv"), &bytes)?;
    println!("restarts {}", rows.len());
    if rows.iter().any(|r| r.certificate_holds == Some(false)) {
        println!("certified gap violated at some restart");
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct AgmRow {
    k: usize,
    #[serde(rename = "A_k")]
    a_k: f64,
    #[serde(rename = "M_k")]
    m_k: f64,
    alpha_k: f64,
    f_value: f64,
    gap: f64,
    bound: f64,
}

pub fn cmd_run_agm(args: &AgmArgs) -> Result<i32> {
    let cfg = RunConfig::resolve(&args.common)?;
    if args.dim == 0 {
        return Err(Error::Input("dim must be >= 1".into()));
    }
    if cfg.rounds == 0 {
        return Err(Error::Input("run-agm needs rounds >= 1".into()));
    }
    let f = QuadraticFn::random(cfg.seed, args.dim, 1e-2, 1.0);
    let x_star = f.minimizer();
    let f_star = f.min_value();
    let mut model = QuadraticModel::euclidean(f.clone())?;
    let schedule = if args.delta > 0.0 {
        model = model.with_noise();
        InexactnessSchedule::constant(args.delta, 0.0)
    } else {
        InexactnessSchedule::exact()
    };
    let x0 = vec![0.0; args.dim];
    let agm_cfg = AgmConfig {
        m0: cfg.m0,
        ..AgmConfig::default()
    };
    let run = run_agm(&x0, &mut model, &schedule, cfg.rounds, &agm_cfg)?;
    let bounds = certified_gap_bounds(0.5 * norm_sq(&x_star), &run.records);
    let rows: Vec<AgmRow> = run
        .records
        .iter()
        .zip(&bounds)
        .map(|(r, &bound)| AgmRow {
            k: r.k,
            a_k: r.a,
            m_k: r.m,
            alpha_k: r.alpha,
            f_value: f.value(&r.x),
            gap: f.value(&r.x) - f_star,
            bound,
        })
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).map_err(|e| Error::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    write_all(&out_or(&cfg, "agm_steps.csv"), &bytes)?;
    let violated = rows.iter().filter(|r| r.gap > r.bound).count();
    println!(
        "iterations {}  final gap {:.3e}  bound violations {violated}",
        rows.len(),
        rows.last().map_or(f64::NAN, |r| r.gap)
    );
    Ok(EXIT_OK)
}

pub fn cmd_check_oracles(args: &CheckArgs) -> Result<i32> {
    let cfg = RunConfig::resolve(&args.common)?;
    let problem = cfg.problem()?;
    let rep = check_oracles(
        &problem,
        &FdCheckConfig {
            points: args.points,
            seed: cfg.seed,
            gradient_perturbation: if args.corrupt_gradient { 1e-3 } else { 0.0 },
            ..FdCheckConfig::default()
        },
    )?;
    println!("gradient     max rel err {:.3e}", rep.gradient);
    println!("hessian_vec  max rel err {:.3e}", rep.hessian_vec);
    println!("third_order  max rel err {:.3e}", rep.third_order);
    let failed = rep.failures();
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("oracle mismatch: {}", failed.join(", "));
        Ok(EXIT_ORACLE_MISMATCH)
    }
}

pub fn cmd_gen_synthetic(args: &CommonArgs) -> Result<i32> {
    let cfg = RunConfig::resolve(args)?;
    if matches!(cfg.data, DataSource::Path(_)) {
        return Err(Error::Input("gen-synthetic takes --synthetic, not --data".into()));
    }
    let data = cfg.data.load(cfg.seed)?;
    let mut bytes = Vec::new();
    libsvm::write(&data, &mut bytes)?;
    match &cfg.out {
        Some(p) => write_all(p, &bytes)?,
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_spec_parses() {
        assert_eq!(
            "100, 5,0.25".parse::<DataSource>().unwrap(),
            DataSource::Synthetic {
                n: 100,
                d: 5,
                density: 0.25
            }
        );
        assert!("100,5".parse::<DataSource>().is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# sweep\nworkers = 8\nn_precond=100\nsigma = 0.5\n").unwrap();
        let args = CommonArgs {
            config: Some(path),
            workers: Some(2),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&args).unwrap();
        assert_eq!((cfg.workers, cfg.n_precond, cfg.sigma), (2, 100, 0.5));
    }

    #[test]
    fn errors_are_aggregated() {
        let args = CommonArgs {
            workers: Some(0),
            lambda1: Some(-1.0),
            synthetic: Some("10,0,0.5".into()),
            ..Default::default()
        };
        let msg = RunConfig::resolve(&args).unwrap_err().to_string();
        assert!(msg.contains("workers") && msg.contains("lambda1") && msg.contains("d > 0"), "{msg}");
    }

    #[test]
    fn unknown_config_key() {
        assert!(parse_config_file("speed = 3\n").is_err());
        assert!(parse_config_file("workers 3\n").is_err());
    }
}
