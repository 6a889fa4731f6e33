//! Batch experiments: a grid of generated instances, each solved by every
//! configured solver and compared against the brute-force optimum.
//!
//! ```toml
//! family = "coverage"          # or "coverage-signed", "expensive"
//! instances = 10
//! seed = 1
//! n = [5, 6]
//! k = [2, 3]
//! universe_size = [8]
//! cost_range = [1, 5]
//! budget = "half-total"        # or { fraction = 0.4 }, { fixed = 7 }
//!
//! [[solver]]
//! w = 4
//! mode = "monotone"
//! ```
//!
//! Instance `j` uses grid point `j mod |grid|` and seed `seed + j`.

use std::io::Write;
use std::path::{Path, PathBuf};

use ksubknap::exact::brute_force_opt_with_cap;
use ksubknap::generate::{gen_coverage, gen_expensive_coverage, gen_signed_coverage, BudgetRule, CoverageParams, SignedParams};
use ksubknap::orthant::orthant_count;
use ksubknap::solver::{monotone_ratio, non_monotone_ratio};
use ksubknap::{solve, Instance, Monotonicity, SolverConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Coverage,
    CoverageSigned,
    Expensive,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Coverage => "coverage",
            Family::CoverageSigned => "coverage-signed",
            Family::Expensive => "expensive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetSpec {
    HalfTotal,
    Fraction(f64),
    Fixed(u64),
}

impl From<BudgetSpec> for BudgetRule {
    fn from(b: BudgetSpec) -> Self {
        match b {
            BudgetSpec::HalfTotal => BudgetRule::HalfTotal,
            BudgetSpec::Fraction(f) => BudgetRule::Fraction(f),
            BudgetSpec::Fixed(l) => BudgetRule::Fixed(l),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Monotone,
    NonMonotone,
    Auto,
}

impl From<Mode> for Monotonicity {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Monotone => Monotonicity::Monotone,
            Mode::NonMonotone => Monotonicity::NonMonotone,
            Mode::Auto => Monotonicity::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverEntry {
    pub w: Option<usize>,
    pub mode: Mode,
    #[serde(default)]
    pub strict_paper: bool,
    #[serde(default)]
    pub best_prefix: bool,
}

impl SolverEntry {
    fn config(&self) -> SolverConfig {
        let mut c = SolverConfig::new(self.mode.into()).strict_paper(self.strict_paper).best_prefix(self.best_prefix);
        c.w = self.w;
        c
    }
}

fn default_cost_range() -> [u64; 2] {
    [1, 5]
}

fn default_budget() -> BudgetSpec {
    BudgetSpec::HalfTotal
}

fn default_bonus() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    pub instances: usize,
    pub seed: u64,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    #[serde(default)]
    pub universe_size: Vec<usize>,
    #[serde(default = "default_cost_range")]
    pub cost_range: [u64; 2],
    #[serde(default = "default_budget")]
    pub budget: BudgetSpec,
    #[serde(default = "default_bonus")]
    pub bonus_magnitude: f64,
    #[serde(rename = "solver")]
    pub solvers: Vec<SolverEntry>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPoint {
    pub n: usize,
    pub k: usize,
    /// `0` means `2n`.
    pub universe_size: usize,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, what: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Toml { what: what.into(), source: e })?;
        Ok(config)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    pub fn grid(&self) -> Vec<GridPoint> {
        let universe = if self.universe_size.is_empty() { vec![0] } else { self.universe_size.clone() };
        let mut points = Vec::new();
        for &n in &self.n {
            for &k in &self.k {
                for &universe_size in &universe {
                    points.push(GridPoint { n, k, universe_size });
                }
            }
        }
        points
    }

    /// Checks every grid point against the brute-force cap.
    pub fn validate(&self, exact_cap: u128) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.solvers.is_empty() {
            return bad("at least one [[solver]] entry is required".into());
        }
        if self.n.is_empty() || self.k.is_empty() {
            return bad("n and k grids must be nonempty".into());
        }
        for p in self.grid() {
            let required = orthant_count(p.n, p.k).unwrap_or(u128::MAX);
            if required > exact_cap {
                return bad(format!("grid point n={}, k={} needs {required} orthants for brute force (cap {exact_cap})", p.n, p.k));
            }
            if self.family == Family::Expensive && p.n < 3 {
                return bad(format!("family expensive needs n >= 3, got n={}", p.n));
            }
        }
        Ok(())
    }

    pub fn instance(&self, j: usize) -> Result<(GridPoint, u64, Instance<f64>)> {
        let grid = self.grid();
        let p = grid[j % grid.len()];
        let seed = self.seed + j as u64;
        let universe = if p.universe_size == 0 { 2 * p.n } else { p.universe_size };
        let params = CoverageParams::new(p.n, p.k, universe)
            .cost_range(self.cost_range[0], self.cost_range[1])
            .budget(self.budget.into());
        let inst = match self.family {
            Family::Coverage => gen_coverage(&params, seed)?,
            Family::CoverageSigned => gen_signed_coverage(&SignedParams::new(params, self.bonus_magnitude), seed)?,
            Family::Expensive => gen_expensive_coverage(p.n, p.k, seed)?,
        };
        Ok((p, seed, inst))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub instance_id: usize,
    pub family: &'static str,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "L")]
    pub budget: u64,
    pub w: usize,
    pub mode: String,
    pub greedy_value: f64,
    pub opt_value: f64,
    pub ratio: String,
    pub oracle_calls: u64,
    pub wall_ms: String,
    pub seed: u64,
    #[serde(skip)]
    pub ratio_value: f64,
}

impl Row {
    /// Whether the row is covered by a proven guarantee (default depth for
    /// its monotonicity) and falls short of it.
    pub fn violates_guarantee(&self) -> bool {
        let threshold = match self.mode.as_str() {
            "monotone" if self.w == ksubknap::solver::MONOTONE_DEPTH => monotone_ratio(),
            "non-monotone" if self.w == ksubknap::solver::NON_MONOTONE_DEPTH => non_monotone_ratio(),
            _ => return false,
        };
        self.greedy_value < threshold * self.opt_value - 1e-9
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub threads: usize,
    pub timing: bool,
    pub exact_cap: u128,
    pub solver_cap: u128,
}

fn rows_for(config: &ExperimentConfig, j: usize, opts: &RunOptions) -> Result<Vec<Row>> {
    let (p, seed, inst) = config.instance(j)?;
    let opt = brute_force_opt_with_cap(&inst, None, opts.exact_cap)?.expect("empty orthant is feasible");
    config
        .solvers
        .iter()
        .map(|entry| {
            let report = solve(&inst, &entry.config().with_cap(opts.solver_cap))?;
            let ratio = if opt.value > 0.0 { report.value / opt.value } else { 1.0 };
            Ok(Row {
                instance_id: j,
                family: config.family.name(),
                n: p.n,
                k: p.k,
                budget: inst.budget(),
                w: report.w,
                mode: report.monotonicity.to_string(),
                greedy_value: report.value,
                opt_value: opt.value,
                ratio: format!("{ratio:.12}"),
                oracle_calls: report.oracle_calls,
                wall_ms: if opts.timing { format!("{:.3}", report.wall_time.as_secs_f64() * 1e3) } else { "0".into() },
                seed,
                ratio_value: ratio,
            })
        })
        .collect()
}

/// Runs every instance, in parallel when `opts.threads > 1`. Rows come back
/// in instance order, then solver order.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<Row>> {
    config.validate(opts.exact_cap)?;
    let ids: Vec<usize> = (0..config.instances).collect();
    let nested: Vec<Vec<Row>> = if opts.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        pool.install(|| ids.par_iter().map(|&j| rows_for(config, j, opts)).collect::<Result<_>>())?
    } else {
        ids.iter().map(|&j| rows_for(config, j, opts)).collect::<Result<_>>()?
    };
    Ok(nested.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| CliError::Io { path: "csv output".into(), source: e })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONFIG: &str = r#"
        family = "coverage"
        instances = 4
        seed = 3
        n = [3, 4]
        k = [2]
        budget = { fraction = 0.5 }

        [[solver]]
        w = 4
        mode = "monotone"

        [[solver]]
        w = 1
        mode = "monotone"
        strict_paper = true
    "#;

    fn opts(threads: usize) -> RunOptions {
        RunOptions { threads, timing: false, exact_cap: 1 << 22, solver_cap: 1 << 26 }
    }

    #[test]
    fn grid_cycles_and_rows_are_ordered() {
        let config = ExperimentConfig::from_toml(CONFIG, "test").unwrap();
        assert_eq!(config.grid().len(), 2);
        let rows = run(&config, &opts(1)).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), [3, 3, 4, 4, 3, 3, 4, 4]);
        assert_eq!(rows[5].seed, 5);
        assert!(rows.iter().all(|r| !r.violates_guarantee()));
    }

    #[test]
    fn csv_bytes_do_not_depend_on_threads() {
        let config = ExperimentConfig::from_toml(CONFIG, "test").unwrap();
        let mut a = Vec::new();
        write_csv(&run(&config, &opts(1)).unwrap(), &mut a).unwrap();
        let mut b = Vec::new();
        write_csv(&run(&config, &opts(4)).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let header = String::from_utf8(a).unwrap().lines().next().unwrap().to_string();
        assert_eq!(header, "instance_id,family,n,k,L,w,mode,greedy_value,opt_value,ratio,oracle_calls,wall_ms,seed");
    }

    #[test]
    fn oversized_grid_is_refused() {
        let config = ExperimentConfig::from_toml(&CONFIG.replace("n = [3, 4]", "n = [30]"), "test").unwrap();
        let err = run(&config, &opts(1)).unwrap_err().to_string();
        assert!(err.contains("n=30"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_toml(&format!("{CONFIG}\nbogus = 1"), "test").is_err());
    }
}
