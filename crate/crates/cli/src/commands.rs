use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ksubknap::exact::{brute_force_opt_with_cap, DEFAULT_EXACT_CAP};
use ksubknap::generate::{gen_coverage, gen_expensive_coverage, gen_signed_coverage, gen_table, BudgetRule, CoverageParams, SignedParams};
use ksubknap::proofcheck::run_proofcheck;
use ksubknap::solver::DEFAULT_SEED_CAP;
use ksubknap::verify::DEFAULT_VERIFY_CAP;
use ksubknap::{solve, Instance, Monotonicity, Rational, Scalar, SolverConfig, Verifier, VerifyMode};

use crate::error::{CliError, Result};
use crate::experiment::{self, ExperimentConfig, RunOptions};
use crate::instance_file::{load, InstanceFile};

/// Overrides every enumeration cap when set.
pub const CAP_ENV: &str = "KSUBKNAP_ENUM_CAP";

#[derive(Debug, Parser)]
#[command(name = "ksubknap", version, about = "k-submodular maximization under a knapsack constraint")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the partial-enumeration greedy.
    Solve(SolveArgs),
    /// Brute-force optimum.
    Exact(ExactArgs),
    /// Check k-submodularity and monotonicity.
    Verify(VerifyArgs),
    /// Re-run the analysis constructions against the brute-force optimum.
    Proofcheck(ProofcheckArgs),
    /// Write a generated instance.
    Gen(GenArgs),
    /// Solve a grid of generated instances and write CSV.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScalarKind {
    F64,
    F32,
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Monotone,
    NonMonotone,
    Auto,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Enumeration depth; defaults to 4 (monotone) or 7 (non-monotone).
    #[arg(long)]
    pub w: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    pub mode: ModeArg,
    /// Score only size w-1 orthants in the first phase.
    #[arg(long)]
    pub strict_paper: bool,
    /// Keep the best intermediate greedy state of each seed.
    #[arg(long)]
    pub best_prefix: bool,
    /// Skip elements that cannot fit next to the seed.
    #[arg(long)]
    pub prefilter: bool,
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
    #[arg(long, value_enum, default_value = "f64")]
    pub scalar: ScalarKind,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Only orthants with exactly this many assigned elements.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, value_enum, default_value = "f64")]
    pub scalar: ScalarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyModeArg {
    Exhaustive,
    Sample,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub mode: VerifyModeArg,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also fail when the function is not monotone.
    #[arg(long)]
    pub require_monotone: bool,
    #[arg(long, value_enum, default_value = "f64")]
    pub scalar: ScalarKind,
}

#[derive(Debug, Args)]
pub struct ProofcheckArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub w: usize,
    #[arg(long, value_enum, default_value = "f64")]
    pub scalar: ScalarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Coverage,
    CoverageSigned,
    Expensive,
    Table,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Universe size; defaults to 2n.
    #[arg(long)]
    pub universe: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub cost_min: u64,
    #[arg(long, default_value_t = 5)]
    pub cost_max: u64,
    /// `half-total`, `fraction:X` or `fixed:L`.
    #[arg(long, default_value = "half-total", value_parser = parse_budget)]
    pub budget: BudgetRule,
    /// Bonus scale for coverage-signed.
    #[arg(long, default_value_t = 2.0)]
    pub bonus: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// CSV path; overrides `out` in the config, stdout when neither is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
    /// Write 0 in the wall_ms column so output is byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
}

fn parse_budget(s: &str) -> std::result::Result<BudgetRule, String> {
    match s.split_once(':') {
        None if s == "half-total" => Ok(BudgetRule::HalfTotal),
        Some(("fraction", x)) => x.parse().map(BudgetRule::Fraction).map_err(|e| format!("fraction: {e}")),
        Some(("fixed", x)) => x.parse().map(BudgetRule::Fixed).map_err(|e| format!("fixed: {e}")),
        _ => Err(format!("expected half-total, fraction:X or fixed:L, got {s:?}")),
    }
}

/// Outcome of a successfully executed command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    PropertyFailed,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::PropertyFailed => 1,
        }
    }
}

/// Enumeration cap: the environment override if present, else `default`.
pub fn cap(default: u128) -> Result<u128> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Config(format!("{CAP_ENV}={v:?} is not an integer"))),
        Err(_) => Ok(default),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::Io { path: "stdout".into(), source: e })
}

macro_rules! with_scalar {
    ($kind:expr, $f:ident($($arg:expr),*)) => {
        match $kind {
            ScalarKind::F64 => $f::<f64>($($arg),*),
            ScalarKind::F32 => $f::<f32>($($arg),*),
            ScalarKind::Rational => $f::<Rational>($($arg),*),
        }
    };
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    match &cli.command {
        Command::Solve(a) => with_scalar!(a.scalar, solve_cmd(a, out, err)),
        Command::Exact(a) => with_scalar!(a.scalar, exact_cmd(a, out)),
        Command::Verify(a) => with_scalar!(a.scalar, verify_cmd(a, out)),
        Command::Proofcheck(a) => with_scalar!(a.scalar, proofcheck_cmd(a, out)),
        Command::Gen(a) => gen_cmd(a, out),
        Command::Experiment(a) => experiment_cmd(a, out, err),
    }
}

fn solve_cmd<T: Scalar>(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let inst: Instance<T> = load(&a.instance)?;
    let monotonicity = match a.mode {
        ModeArg::Monotone => Monotonicity::Monotone,
        ModeArg::NonMonotone => Monotonicity::NonMonotone,
        ModeArg::Auto => Monotonicity::Auto,
    };
    let mut config = SolverConfig::new(monotonicity)
        .strict_paper(a.strict_paper)
        .best_prefix(a.best_prefix)
        .prefilter(a.prefilter)
        .threads(a.parallel)
        .with_cap(cap(DEFAULT_SEED_CAP)?);
    config.w = a.w;
    config.verify_cap = cap(DEFAULT_VERIFY_CAP)?;
    let report = solve(&inst, &config)?;
    write_out(out, &report.render(&inst))?;
    let _ = writeln!(err, "wall time: {:.3} ms", report.wall_time.as_secs_f64() * 1e3);
    Ok(Outcome::Pass)
}

fn exact_cmd<T: Scalar>(a: &ExactArgs, out: &mut dyn Write) -> Result<Outcome> {
    let inst: Instance<T> = load(&a.instance)?;
    match brute_force_opt_with_cap(&inst, a.size, cap(DEFAULT_EXACT_CAP)?)? {
        Some(r) => write_out(
            out,
            &format!(
                "value: {}\nsolution: {}\ncost: {}\nbudget: {}\nfeasible: {}\n",
                r.value,
                inst.describe(&r.orthant),
                inst.costs().cost(&r.orthant),
                inst.budget(),
                r.feasible
            ),
        )?,
        None => write_out(out, &format!("no feasible orthant of size {}\n", a.size.unwrap_or(0)))?,
    }
    Ok(Outcome::Pass)
}

fn verify_cmd<T: Scalar>(a: &VerifyArgs, out: &mut dyn Write) -> Result<Outcome> {
    let inst: Instance<T> = load(&a.instance)?;
    let mode = match a.mode {
        VerifyModeArg::Exhaustive => VerifyMode::Exhaustive,
        VerifyModeArg::Sample => VerifyMode::Sampled { count: a.samples, seed: a.seed },
    };
    let report = Verifier::new(mode).with_cap(cap(DEFAULT_VERIFY_CAP)?).verify(inst.function())?;
    write_out(out, &format!("{report}\n"))?;
    let failed = !report.is_k_submodular() || (a.require_monotone && !report.is_monotone());
    Ok(if failed { Outcome::PropertyFailed } else { Outcome::Pass })
}

fn proofcheck_cmd<T: Scalar>(a: &ProofcheckArgs, out: &mut dyn Write) -> Result<Outcome> {
    let inst: Instance<T> = load(&a.instance)?;
    let report = Verifier::exhaustive().with_cap(cap(DEFAULT_VERIFY_CAP)?).verify(inst.function())?;
    if !report.is_k_submodular() {
        write_out(out, &format!("function is not k-submodular\n{report}\n"))?;
        return Ok(Outcome::PropertyFailed);
    }
    let opt = brute_force_opt_with_cap(&inst, None, cap(DEFAULT_EXACT_CAP)?)?.expect("empty orthant is feasible");
    let summary = run_proofcheck(&inst, &opt.orthant, a.w, &report)?;
    write_out(
        out,
        &format!(
            "optimum: {} (value {})\nmonotone: {}\nrejection: {}\n{summary}",
            inst.describe(&opt.orthant),
            opt.value,
            report.is_monotone(),
            if summary.rejection { "yes" } else { "no" }
        ),
    )?;
    Ok(if summary.passed() { Outcome::Pass } else { Outcome::PropertyFailed })
}

fn gen_cmd(a: &GenArgs, out: &mut dyn Write) -> Result<Outcome> {
    let params = CoverageParams::new(a.n, a.k, a.universe.unwrap_or(2 * a.n))
        .cost_range(a.cost_min, a.cost_max)
        .budget(a.budget);
    let inst: Instance<f64> = match a.family {
        FamilyArg::Coverage => gen_coverage(&params, a.seed)?,
        FamilyArg::CoverageSigned => {
            let mut p = SignedParams::new(params, a.bonus);
            p.cap = cap(p.cap)?;
            gen_signed_coverage(&p, a.seed)?
        }
        FamilyArg::Expensive => gen_expensive_coverage(a.n, a.k, a.seed)?,
        FamilyArg::Table => gen_table(&gen_coverage(&params, a.seed)?, cap(DEFAULT_VERIFY_CAP)?)?,
    };
    let doc = InstanceFile::from_instance(&inst)?;
    match &a.out {
        Some(path) => doc.write(path)?,
        None => write_out(out, &doc.to_json())?,
    }
    Ok(Outcome::Pass)
}

fn experiment_cmd(a: &ExperimentArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let config = ExperimentConfig::read(&a.config)?;
    let opts = RunOptions {
        threads: a.parallel,
        timing: !a.no_timing,
        exact_cap: cap(DEFAULT_EXACT_CAP)?,
        solver_cap: cap(DEFAULT_SEED_CAP)?,
    };
    let rows = experiment::run(&config, &opts)?;
    match a.out.as_ref().or(config.out.as_ref()) {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
            experiment::write_csv(&rows, std::io::BufWriter::new(file))?;
        }
        None => experiment::write_csv(&rows, &mut *out)?,
    }
    let violations: Vec<_> = rows.iter().filter(|r| r.violates_guarantee()).collect();
    let min = rows.iter().map(|r| r.ratio_value).fold(f64::INFINITY, f64::min);
    let _ = writeln!(err, "{} rows, min ratio {min:.6}, {} below guarantee", rows.len(), violations.len());
    for r in &violations {
        let _ = writeln!(err, "below guarantee: instance {} w={} mode={} ratio={}", r.instance_id, r.w, r.mode, r.ratio);
    }
    Ok(if violations.is_empty() { Outcome::Pass } else { Outcome::PropertyFailed })
}
