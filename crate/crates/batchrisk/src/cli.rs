//! `batchrisk` command line.
//!
//! Every flag can also be set through an environment variable named
//! `BATCHRISK_<FLAG>` (upper case, dashes as underscores); flags win.
//! Exit status: 0 success, 1 computation error, 2 invalid invocation or
//! input, 3 failed verification.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use batchrisk_core::complexity::{
    corollary4_bound, k_rademacher_exact, k_rademacher_mc, ln_shatter_all_labelings,
    theorem3_bound, vc_bound, BoundReport, Constants, Regime, EXACT_RADEMACHER_MAX_COLUMNS,
};
use batchrisk_core::hypotheses::{SyntheticConfig, Task, Variant};
use batchrisk_core::losses::loss_constants;
use batchrisk_core::risk::{risk_curve, Estimator};
use batchrisk_core::rng::{DEFAULT_SEED, RNG_ID};
use batchrisk_core::{EvalSet, LossKind, Method, RiskEstimate};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::counterexample::find_bce_counterexample;
use crate::error::{Error, Result};
use crate::io;
use crate::sweep::{run_sweep, SweepConfig};
use crate::verify::{run_verification, Budget};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "batchrisk", version, about = "k-risk of batched predictors: estimates, bounds, verification and sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Empirical k-risk of a prediction CSV at one batch size.
    Risk(RiskArgs),
    /// Empirical k-risk at several batch sizes.
    Curve(CurveArgs),
    /// Generalization bound (theorem3, corollary4 or vc regime).
    Bound(BoundArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Gap-versus-k experiment on synthetic data.
    Sweep(SweepArgs),
    /// Search for a set whose BCE k-risk increases with k.
    Counterexample(CounterexampleArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CommonArgs {
    /// JSON report path (standard output when absent).
    #[arg(long, env = "BATCHRISK_OUTPUT")]
    pub output: Option<PathBuf>,
    /// Flat CSV companion path.
    #[arg(long, env = "BATCHRISK_CSV")]
    pub csv: Option<PathBuf>,
    #[arg(long, env = "BATCHRISK_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads (0: one per core). Results do not depend on it.
    #[arg(long, env = "BATCHRISK_THREADS", default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct RiskArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Prediction CSV with header `prediction,label`.
    #[arg(long, env = "BATCHRISK_INPUT")]
    pub input: PathBuf,
    #[arg(long, env = "BATCHRISK_KIND", default_value_t = LossKind::Mse)]
    pub kind: LossKind,
    #[arg(long, env = "BATCHRISK_K")]
    pub k: usize,
    /// exact, closed or mc.
    #[arg(long, env = "BATCHRISK_METHOD", default_value_t = Method::ClosedForm)]
    pub method: Method,
    /// Monte-Carlo subset draws.
    #[arg(long, env = "BATCHRISK_DRAWS", default_value_t = 10_000)]
    pub draws: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct CurveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[arg(long, env = "BATCHRISK_INPUT")]
    pub input: PathBuf,
    #[arg(long, env = "BATCHRISK_KIND", default_value_t = LossKind::Mse)]
    pub kind: LossKind,
    /// Batch sizes: comma separated values or ranges `a..b`, or `all`.
    #[arg(long, env = "BATCHRISK_KS", default_value = "all")]
    pub ks: String,
    #[arg(long, env = "BATCHRISK_METHOD", default_value_t = Method::ClosedForm)]
    pub method: Method,
    #[arg(long, env = "BATCHRISK_DRAWS", default_value_t = 10_000)]
    pub draws: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[arg(long, env = "BATCHRISK_REGIME", default_value_t = Regime::Corollary4)]
    pub regime: Regime,
    /// Loss for the Lipschitz regime and for strict constants.
    #[arg(long, env = "BATCHRISK_KIND", default_value_t = LossKind::ZeroOne)]
    pub kind: LossKind,
    /// Empirical k-risk; computed from `--input` when absent.
    #[arg(long, env = "BATCHRISK_EMPIRICAL_RISK")]
    pub empirical_risk: Option<f64>,
    /// Prediction CSV giving the empirical risk and n.
    #[arg(long, env = "BATCHRISK_INPUT")]
    pub input: Option<PathBuf>,
    #[arg(long, env = "BATCHRISK_METHOD", default_value_t = Method::ClosedForm)]
    pub method: Method,
    /// k-Rademacher complexity of the loss class (theorem3).
    #[arg(long, env = "BATCHRISK_RADEMACHER")]
    pub rademacher: Option<f64>,
    /// Loss table CSV whose complexity is computed (theorem3).
    #[arg(long, env = "BATCHRISK_TABLE")]
    pub table: Option<PathBuf>,
    /// Sidecar of `--table` (default: the table path with `.json` appended).
    #[arg(long, env = "BATCHRISK_SIDECAR")]
    pub sidecar: Option<PathBuf>,
    /// Sign draws when the table is too wide for exact evaluation.
    #[arg(long, env = "BATCHRISK_DRAWS", default_value_t = 10_000)]
    pub draws: u64,
    /// Natural log of the shattering coefficient (corollary4).
    #[arg(long, env = "BATCHRISK_LN_SHATTER")]
    pub ln_shatter: Option<f64>,
    /// Use `S = 2^n` (corollary4).
    #[arg(long, env = "BATCHRISK_ALL_LABELINGS")]
    pub all_labelings: bool,
    /// VC dimension (vc).
    #[arg(long, env = "BATCHRISK_VC_DIMENSION")]
    pub vc_dimension: Option<u32>,
    #[arg(long, env = "BATCHRISK_N")]
    pub n: Option<usize>,
    #[arg(long, env = "BATCHRISK_K")]
    pub k: Option<usize>,
    #[arg(long, env = "BATCHRISK_DELTA", default_value_t = 0.05)]
    pub delta: f64,
    /// Apply the `2 beta xi + c psi` constants of `--kind`.
    #[arg(long, env = "BATCHRISK_STRICT_CONSTANTS")]
    pub strict_constants: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Instances for every check (default: per-check defaults).
    #[arg(long, env = "BATCHRISK_BUDGET")]
    pub budget: Option<u64>,
    /// Samples per distribution in the unbiasedness check.
    #[arg(long, env = "BATCHRISK_UNBIASEDNESS_DRAWS")]
    pub unbiasedness_draws: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[arg(long, env = "BATCHRISK_N_TRAIN", default_value_t = 200)]
    pub n_train: usize,
    #[arg(long, env = "BATCHRISK_N_TEST", default_value_t = 200)]
    pub n_test: usize,
    #[arg(long, env = "BATCHRISK_TASK", default_value_t = Task::ClassificationSign)]
    pub task: Task,
    /// Label-flip probability or regression noise scale.
    #[arg(long, env = "BATCHRISK_NOISE", default_value_t = 0.1)]
    pub noise: f64,
    #[arg(long, env = "BATCHRISK_FEATURE_DIM", default_value_t = 4)]
    pub feature_dim: usize,
    #[arg(long, env = "BATCHRISK_KS", default_value = "1..8")]
    pub ks: String,
    /// Comma separated loss kinds.
    #[arg(long, env = "BATCHRISK_KINDS", default_value = "zero_one")]
    pub kinds: String,
    /// Comma separated hypothesis variants, or `all`.
    #[arg(long, env = "BATCHRISK_VARIANTS", default_value = "all")]
    pub variants: String,
    #[arg(long, env = "BATCHRISK_REPETITIONS", default_value_t = 9)]
    pub repetitions: usize,
    /// Monte-Carlo draws for losses without a closed form on large sets.
    #[arg(long, env = "BATCHRISK_DRAWS", default_value_t = 20_000)]
    pub draws: u64,
    /// Evaluate on the training split.
    #[arg(long, env = "BATCHRISK_TEST_ON_TRAIN")]
    pub test_on_train: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CounterexampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Candidate sets to examine.
    #[arg(long, env = "BATCHRISK_BUDGET", default_value_t = 100_000)]
    pub budget: u64,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Risk(_) => "risk",
            Command::Curve(_) => "curve",
            Command::Bound(_) => "bound",
            Command::Verify(_) => "verify",
            Command::Sweep(_) => "sweep",
            Command::Counterexample(_) => "counterexample",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Risk(a) => &a.common,
            Command::Curve(a) => &a.common,
            Command::Bound(a) => &a.common,
            Command::Verify(a) => &a.common,
            Command::Sweep(a) => &a.common,
            Command::Counterexample(a) => &a.common,
        }
    }

    fn flags(&self) -> Result<Value> {
        Ok(match self {
            Command::Risk(a) => serde_json::to_value(a)?,
            Command::Curve(a) => serde_json::to_value(a)?,
            Command::Bound(a) => serde_json::to_value(a)?,
            Command::Verify(a) => serde_json::to_value(a)?,
            Command::Sweep(a) => serde_json::to_value(a)?,
            Command::Counterexample(a) => serde_json::to_value(a)?,
        })
    }
}

/// Parses a batch-size list: `all`, or comma separated `k` / `a..b`
/// (inclusive) items.
pub fn parse_ks(spec: &str, n: Option<usize>) -> Result<Vec<usize>> {
    let spec = spec.trim();
    if spec == "all" {
        return match n {
            Some(n) => Ok((1..=n).collect()),
            None => Err(Error::Config("'all' needs a known set size".into())),
        };
    }
    let bad = |item: &str| Error::Config(format!("invalid batch size '{item}' in --ks"));
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim) {
        if let Some((a, b)) = item.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad(item))?;
            let b: usize = b.trim().parse().map_err(|_| bad(item))?;
            if a > b {
                return Err(bad(item));
            }
            out.extend(a..=b);
        } else {
            out.push(item.parse().map_err(|_| bad(item))?);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("--ks is empty".into()));
    }
    Ok(out)
}

fn parse_list<T: std::str::FromStr>(spec: &str, flag: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let out = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| Error::Config(format!("--{flag}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        return Err(Error::Config(format!("--{flag} is empty")));
    }
    Ok(out)
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Config(format!(
            "batch size k = {k} is outside [1, {n}] for an input of {n} rows"
        )));
    }
    Ok(())
}

fn estimator(method: Method, kind: LossKind, draws: u64, seed: u64) -> Result<Estimator> {
    match method {
        Method::Exact => Ok(Estimator::Exact),
        Method::ClosedForm => {
            if !kind.closed_form_eligible() {
                return Err(Error::Config(format!(
                    "{kind} has no closed form; use --method exact or mc"
                )));
            }
            Ok(Estimator::ClosedForm)
        }
        Method::MonteCarlo => {
            if draws < 2 {
                return Err(Error::Config(format!("--draws must be at least 2, got {draws}")));
            }
            Ok(Estimator::MonteCarlo { draws, seed })
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("--delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// Report documents and the exit status they map to.
struct Output {
    body: Value,
    csv: String,
    exit: i32,
}

fn estimate_csv(results: &[RiskEstimate]) -> String {
    let mut s = String::from("k,kind,method,value,std_error,subsets_evaluated\n");
    for r in results {
        let se = r.std_error.map(|v| v.to_string()).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.k, r.kind, r.method, r.value, se, r.subsets_evaluated
        ));
    }
    s
}

fn cmd_risk(a: &RiskArgs) -> Result<Output> {
    let est = estimator(a.method, a.kind, a.draws, a.common.seed)?;
    let set = io::parse_eval_csv(&a.input, Some(a.kind))?;
    check_k(a.k, set.n())?;
    let r = est.estimate(&set, a.k, a.kind)?;
    Ok(Output {
        csv: estimate_csv(std::slice::from_ref(&r)),
        body: json!({ "n": set.n(), "result": r }),
        exit: EXIT_OK,
    })
}

fn cmd_curve(a: &CurveArgs) -> Result<Output> {
    let est = estimator(a.method, a.kind, a.draws, a.common.seed)?;
    if a.ks.trim() != "all" {
        parse_ks(&a.ks, None)?;
    }
    let set = io::parse_eval_csv(&a.input, Some(a.kind))?;
    let ks = parse_ks(&a.ks, Some(set.n()))?;
    for &k in &ks {
        check_k(k, set.n())?;
    }
    let results = risk_curve(&set, &ks, a.kind, &est)?;
    Ok(Output {
        csv: estimate_csv(&results),
        body: json!({ "n": set.n(), "results": results }),
        exit: EXIT_OK,
    })
}

fn load_set_for_bound(a: &BoundArgs) -> Result<Option<EvalSet>> {
    a.input
        .as_ref()
        .map(|p| io::parse_eval_csv(p, Some(a.kind)))
        .transpose()
}

fn sidecar_path(table: &Path) -> PathBuf {
    let mut s = table.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn cmd_bound(a: &BoundArgs) -> Result<Output> {
    check_delta(a.delta)?;
    let constants = if a.strict_constants {
        loss_constants(a.kind).map_err(|e| Error::Config(format!("--strict-constants: {e}")))?;
        Constants::Strict(a.kind)
    } else {
        Constants::Stated
    };
    if a.regime == Regime::Theorem3 {
        loss_constants(a.kind).map_err(|e| Error::Config(format!("theorem3 regime: {e}")))?;
        if a.rademacher.is_some() == a.table.is_some() {
            return Err(Error::Config("theorem3 needs exactly one of --rademacher or --table".into()));
        }
    }
    if a.empirical_risk.is_some() && a.input.is_some() {
        return Err(Error::Config("give --empirical-risk or --input, not both".into()));
    }
    if a.input.is_some() && a.k.is_none() {
        return Err(Error::Config("--input needs --k for the empirical risk".into()));
    }

    let set = load_set_for_bound(a)?;
    let table = match &a.table {
        Some(path) => {
            let side_path = a.sidecar.clone().unwrap_or_else(|| sidecar_path(path));
            let sidecar: io::LossTableSidecar = io::read_json(&side_path)?;
            let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
            Some(io::read_loss_table(file, &path.display().to_string(), &sidecar)?)
        }
        None => None,
    };
    let n = match (a.n, &set, &table) {
        (Some(n), _, _) => n,
        (None, Some(s), _) => s.n(),
        (None, None, Some(t)) => t.n(),
        _ => return Err(Error::Config("the sample size is unknown; give --n".into())),
    };
    if let Some(s) = &set {
        if s.n() != n {
            return Err(Error::Config(format!("--n = {n} but the input has {} rows", s.n())));
        }
    }
    if let Some(k) = a.k {
        check_k(k, n)?;
    }
    let k_required = || {
        a.k.ok_or_else(|| Error::Config(format!("the {} regime needs --k", a.regime)))
    };
    let empirical = match (&set, a.empirical_risk) {
        (Some(s), _) => {
            let est = estimator(a.method, a.kind, a.draws, a.common.seed)?;
            est.estimate(s, k_required()?, a.kind)?.value
        }
        (None, Some(r)) => r,
        (None, None) => 0.0,
    };

    let mut complexity = Value::Null;
    let report: BoundReport = match a.regime {
        Regime::Theorem3 => {
            let rad = match (&table, a.rademacher) {
                (Some(t), _) => {
                    if t.cols() <= EXACT_RADEMACHER_MAX_COLUMNS {
                        let r = k_rademacher_exact(t)?;
                        complexity = json!({ "method": "exact", "value": r });
                        r
                    } else {
                        let (r, se) = k_rademacher_mc(t, a.draws, a.common.seed)?;
                        complexity = json!({ "method": "monte_carlo", "value": r,
                                             "std_error": se, "draws": a.draws });
                        r
                    }
                }
                (None, Some(r)) => r,
                (None, None) => unreachable!("checked above"),
            };
            theorem3_bound(empirical, rad, a.kind, n, a.delta)?
        }
        Regime::Corollary4 => {
            let ln_s = match (a.ln_shatter, a.all_labelings) {
                (Some(v), false) => v,
                (None, true) => ln_shatter_all_labelings(n),
                _ => {
                    return Err(Error::Config(
                        "corollary4 needs exactly one of --ln-shatter or --all-labelings".into(),
                    ))
                }
            };
            corollary4_bound(empirical, ln_s, n, k_required()?, a.delta, constants)?
        }
        Regime::Vc => {
            let v = a
                .vc_dimension
                .ok_or_else(|| Error::Config("the vc regime needs --vc-dimension".into()))?;
            vc_bound(empirical, v, n, k_required()?, a.delta, constants)?
        }
    };
    let k = report.k.map(|k| k.to_string()).unwrap_or_default();
    let csv = format!(
        "regime,empirical_risk,rademacher_term,xi,psi,c,beta,delta,n,k,total,vacuous,strict_constants\n\
         {},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        report.regime,
        report.empirical_risk,
        report.rademacher_term,
        report.xi,
        report.psi,
        report.c,
        report.beta,
        report.delta,
        report.n,
        k,
        report.total,
        report.vacuous,
        report.strict_constants
    );
    Ok(Output {
        body: json!({ "report": report, "complexity": complexity }),
        csv,
        exit: EXIT_OK,
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<Output> {
    let mut budget = match a.budget {
        Some(b) => Budget::uniform(b),
        None => Budget::default(),
    };
    if let Some(d) = a.unbiasedness_draws {
        if d < 2 {
            return Err(Error::Config("--unbiasedness-draws must be at least 2".into()));
        }
        budget.unbiasedness_draws = d;
    }
    let report = run_verification(a.common.seed, &budget);
    let mut csv = String::from("name,instances_run,max_violation,passed,skipped,mutant_flagged\n");
    for c in &report.checks {
        let flagged = c.mutant.as_ref().map(|m| m.flagged.to_string()).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.name.as_str(),
            c.instances_run,
            c.max_violation,
            c.passed,
            c.skipped,
            flagged
        ));
    }
    let exit = if report.passed { EXIT_OK } else { EXIT_VERIFICATION_FAILED };
    Ok(Output {
        body: json!({ "report": report }),
        csv,
        exit,
    })
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig> {
    let variants = if a.variants.trim() == "all" {
        Variant::ALL.to_vec()
    } else {
        parse_list(&a.variants, "variants")?
    };
    let config = SweepConfig {
        data: SyntheticConfig {
            n_train: a.n_train,
            n_test: a.n_test,
            task: a.task,
            noise: a.noise,
            feature_dim: a.feature_dim,
            seed: a.common.seed,
        },
        ks: parse_ks(&a.ks, None)?,
        kinds: parse_list(&a.kinds, "kinds")?,
        variants,
        repetitions: a.repetitions,
        mc_draws: a.draws,
        test_on_train: a.test_on_train,
    };
    config.validate().map_err(|e| match e {
        Error::Core(c) => Error::Config(c.to_string()),
        e => e,
    })?;
    if config.variants.contains(&Variant::Threshold) && config.data.task != Task::ClassificationSign {
        return Err(Error::Config(format!(
            "the threshold hypothesis needs task classification_sign, not {}",
            config.data.task
        )));
    }
    for &kind in &config.kinds {
        if config.data.task == Task::RegressionUnit && kind != LossKind::Mse {
            return Err(Error::Config(format!("task regression_unit supports only mse, not {kind}")));
        }
    }
    Ok(config)
}

fn cmd_sweep(a: &SweepArgs) -> Result<Output> {
    let config = sweep_config(a)?;
    let report = run_sweep(&config)?;
    Ok(Output {
        csv: report.csv(),
        body: json!({ "report": report }),
        exit: EXIT_OK,
    })
}

fn cmd_counterexample(a: &CounterexampleArgs) -> Result<Output> {
    if a.budget == 0 {
        return Err(Error::Config("--budget must be at least 1".into()));
    }
    let report = find_bce_counterexample(a.common.seed, a.budget)?;
    let csv = report
        .witness
        .as_ref()
        .map(|w| io::eval_csv_string(&w.set))
        .unwrap_or_else(|| "prediction,label\n".into());
    Ok(Output {
        body: json!({ "report": report }),
        csv,
        exit: EXIT_OK,
    })
}

fn dispatch(command: &Command) -> Result<Output> {
    match command {
        Command::Risk(a) => cmd_risk(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Counterexample(a) => cmd_counterexample(a),
    }
}

/// Runs a parsed command and writes its outputs; returns the exit status.
pub fn execute(cli: &Cli) -> Result<i32> {
    let common = cli.command.common();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build()
        .map_err(|e| Error::Config(format!("--threads: {e}")))?;
    let out = pool.install(|| dispatch(&cli.command))?;
    let mut body = json!({
        "metadata": {
            "tool": "batchrisk",
            "version": crate::VERSION,
            "command": cli.command.name(),
            "rng": RNG_ID,
            "flags": cli.command.flags()?,
        }
    });
    if let (Value::Object(doc), Value::Object(rest)) = (&mut body, out.body) {
        doc.extend(rest);
    }
    let text = io::to_json(&body)?;
    match &common.output {
        Some(path) => io::write_file(path, &text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &common.csv {
        io::write_file(path, &out.csv)?;
    }
    Ok(out.exit)
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_lists() {
        assert_eq!(parse_ks("1,2,99", None).unwrap(), vec![1, 2, 99]);
        assert_eq!(parse_ks("1..4", None).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_ks("2, 5..6", None).unwrap(), vec![2, 5, 6]);
        assert_eq!(parse_ks("all", Some(3)).unwrap(), vec![1, 2, 3]);
        assert!(parse_ks("4..2", None).is_err());
        assert!(parse_ks("x", None).is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
