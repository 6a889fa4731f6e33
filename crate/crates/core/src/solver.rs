//! Partial enumeration plus marginal-density greedy.
//!
//! The solver first scores every affordable orthant with fewer than `w`
//! assigned elements. Then, for every affordable seed with exactly `w`
//! assigned elements, it repeatedly picks the unassigned `(element,
//! coordinate)` pair of largest `Δ f / cost`, keeps it if the budget still
//! allows, and drops the element from the candidate set either way. The
//! best orthant seen overall is returned.
//!
//! With `w = 4` on monotone functions the result is at least
//! `(1 - e^-2) / 2` of the optimum; with `w = 7` on arbitrary nonnegative
//! k-submodular functions it is at least `(1 - e^-3) / 3`.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::{FunctionSpec, KFunction};
use crate::instance::Instance;
use crate::oracle::Oracle;
use crate::orthant::{CostVector, Orthant};
use crate::scalar::Scalar;
use crate::verify::{Verifier, VerifyMode, DEFAULT_VERIFY_CAP};

/// Enumeration depth for monotone functions.
pub const MONOTONE_DEPTH: usize = 4;
/// Enumeration depth for non-monotone functions.
pub const NON_MONOTONE_DEPTH: usize = 7;
/// Default bound on the number of enumerated candidates and seeds.
pub const DEFAULT_SEED_CAP: u128 = 50_000_000;

/// `(1 - e^-2) / 2`, the guarantee for monotone functions at depth 4.
pub fn monotone_ratio() -> f64 {
    0.5 * (1.0 - (-2.0f64).exp())
}

/// `(1 - e^-3) / 3`, the guarantee for non-monotone functions at depth 7.
pub fn non_monotone_ratio() -> f64 {
    (1.0 - (-3.0f64).exp()) / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Monotone,
    NonMonotone,
    /// Verify the function first and pick the depth from the verdict.
    Auto,
}

impl Monotonicity {
    pub fn default_depth(self) -> Option<usize> {
        match self {
            Monotonicity::Monotone => Some(MONOTONE_DEPTH),
            Monotonicity::NonMonotone => Some(NON_MONOTONE_DEPTH),
            Monotonicity::Auto => None,
        }
    }
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monotonicity::Monotone => "monotone",
            Monotonicity::NonMonotone => "non-monotone",
            Monotonicity::Auto => "auto",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Enumeration depth; `None` uses the default for the monotonicity.
    pub w: Option<usize>,
    pub monotonicity: Monotonicity,
    /// Score only orthants with exactly `w - 1` assigned elements in the
    /// first phase instead of every size below `w`.
    pub strict_paper: bool,
    /// Also consider every intermediate greedy state, not only the final one.
    pub best_prefix: bool,
    /// Drop elements that can never fit before the greedy starts. Does not
    /// change the result, only the number of oracle calls.
    pub prefilter: bool,
    /// Worker threads for seed evaluation; `0` or `1` runs sequentially.
    pub threads: usize,
    pub cap: u128,
    /// Bound on `(k+1)^n` when `Auto` verifies exhaustively.
    pub verify_cap: u128,
}

impl SolverConfig {
    pub fn new(monotonicity: Monotonicity) -> Self {
        Self {
            w: None,
            monotonicity,
            strict_paper: false,
            best_prefix: false,
            prefilter: false,
            threads: 1,
            cap: DEFAULT_SEED_CAP,
            verify_cap: DEFAULT_VERIFY_CAP,
        }
    }

    pub fn monotone() -> Self {
        Self::new(Monotonicity::Monotone)
    }

    pub fn non_monotone() -> Self {
        Self::new(Monotonicity::NonMonotone)
    }

    pub fn auto() -> Self {
        Self::new(Monotonicity::Auto)
    }

    pub fn with_w(mut self, w: usize) -> Self {
        self.w = Some(w);
        self
    }

    pub fn strict_paper(mut self, on: bool) -> Self {
        self.strict_paper = on;
        self
    }

    pub fn best_prefix(mut self, on: bool) -> Self {
        self.best_prefix = on;
        self
    }

    pub fn prefilter(mut self, on: bool) -> Self {
        self.prefilter = on;
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::auto()
    }
}

/// Best `(element, coordinate)` of one greedy round.
#[derive(Debug, Clone, PartialEq)]
pub struct Choice<T> {
    pub element: usize,
    pub coord: usize,
    pub gain: T,
    pub density: T,
    /// `f(x ⊔ I[element, coord])`.
    pub value_after: T,
}

/// Picks `argmax Δ_{e,i} f(x) / c_e` over `remaining × [k]`, ties to the
/// lowest element, then lowest coordinate. `fx` must equal `f(x)`.
///
/// Densities are compared by cross-multiplication, `Δ·c' > Δ'·c`, with
/// [`Scalar::tie_slack`] as the margin for a strict improvement.
pub fn best_density_pair_from<F: KFunction + ?Sized>(
    oracle: &Oracle<'_, F>,
    x: &Orthant,
    fx: F::Value,
    remaining: &[usize],
    costs: &CostVector,
) -> Result<Option<Choice<F::Value>>> {
    let slack = F::Value::tie_slack();
    let mut best: Option<(Choice<F::Value>, F::Value)> = None;
    let mut sorted = remaining.to_vec();
    sorted.sort_unstable();
    for e in sorted {
        let c = F::Value::from_cost(costs.of(e));
        for i in 1..=x.k() {
            let after = oracle.evaluate(&x.with(e, i)?)?;
            let gain = after - fx;
            let better = match &best {
                None => true,
                Some((b, bc)) => gain * *bc - b.gain * c > slack * c * *bc,
            };
            if better {
                best = Some((Choice { element: e, coord: i, gain, density: gain / c, value_after: after }, c));
            }
        }
    }
    Ok(best.map(|(choice, _)| choice))
}

/// [`best_density_pair_from`] that evaluates `f(x)` itself.
pub fn best_density_pair<F: KFunction + ?Sized>(
    oracle: &Oracle<'_, F>,
    x: &Orthant,
    remaining: &[usize],
    costs: &CostVector,
) -> Result<Option<Choice<F::Value>>> {
    if remaining.is_empty() {
        return Ok(None);
    }
    let fx = oracle.evaluate(x)?;
    best_density_pair_from(oracle, x, fx, remaining, costs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyStep<T> {
    pub element: usize,
    pub coord: usize,
    pub gain: T,
    pub density: T,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyRun<T> {
    pub start: Orthant,
    pub start_value: T,
    pub result: Orthant,
    pub value: T,
    pub steps: Vec<GreedyStep<T>>,
    /// Best state over all prefixes `s^0, s^1, ...`, earliest on ties.
    pub best_prefix: (Orthant, T),
}

/// Greedy extension of `start` over an explicit candidate set.
pub fn greedy_extend_over<F: KFunction + ?Sized>(
    costs: &CostVector,
    oracle: &Oracle<'_, F>,
    start: &Orthant,
    candidates: &[usize],
) -> Result<GreedyRun<F::Value>> {
    oracle.check_shape(start)?;
    let spent = costs.cost(start);
    if spent > costs.budget() {
        return Err(Error::InfeasibleSeed { cost: spent, budget: costs.budget() });
    }
    if let Some(&e) = candidates.iter().find(|&&e| e >= start.n() || start.is_assigned(e)) {
        return Err(Error::Precondition(format!("candidate {e} is assigned or unknown")));
    }
    let mut remaining = candidates.to_vec();
    let mut current = start.clone();
    let mut spent = spent;
    let start_value = oracle.evaluate(start)?;
    let mut value = start_value;
    let mut best_prefix = (current.clone(), value);
    let mut steps = Vec::new();
    while let Some(choice) = best_density_pair_from(oracle, &current, value, &remaining, costs)? {
        let cost = costs.of(choice.element);
        let accepted = spent + cost <= costs.budget();
        if accepted {
            current = current.with(choice.element, choice.coord)?;
            spent += cost;
            value = choice.value_after;
            if value > best_prefix.1 {
                best_prefix = (current.clone(), value);
            }
        }
        remaining.retain(|&e| e != choice.element);
        steps.push(GreedyStep {
            element: choice.element,
            coord: choice.coord,
            gain: choice.gain,
            density: choice.density,
            accepted,
        });
    }
    Ok(GreedyRun { start: start.clone(), start_value, result: current, value, steps, best_prefix })
}

/// Greedy extension of `start` over every element it leaves unassigned.
pub fn greedy_extend<T: Scalar>(
    instance: &Instance<T>,
    oracle: &Oracle<'_, FunctionSpec<T>>,
    start: &Orthant,
) -> Result<GreedyRun<T>> {
    let candidates: Vec<usize> = (0..instance.n()).filter(|&e| !start.is_assigned(e)).collect();
    greedy_extend_over(instance.costs(), oracle, start, &candidates)
}

/// All affordable orthants with exactly `size` assigned elements.
///
/// Order: lexicographic on the sorted `(element, coordinate)` list, i.e.
/// depth-first over the first element, its coordinate, the next element, ...
pub fn enumerate_seeds(costs: &CostVector, k: usize, size: usize) -> Seeds<'_> {
    Seeds::new(costs, k, size)
}

pub struct Seeds<'a> {
    costs: &'a CostVector,
    n: usize,
    k: usize,
    elements: Vec<usize>,
    coords: Vec<usize>,
    done: bool,
}

impl<'a> Seeds<'a> {
    fn new(costs: &'a CostVector, k: usize, size: usize) -> Self {
        let n = costs.len();
        Self {
            costs,
            n,
            k,
            elements: (0..size).collect(),
            coords: vec![1; size],
            done: size > n || k == 0,
        }
    }

    fn advance(&mut self) {
        let m = self.elements.len();
        for p in (0..m).rev() {
            let progressed = if self.coords[p] < self.k {
                self.coords[p] += 1;
                true
            } else if self.elements[p] + (m - p) < self.n {
                self.elements[p] += 1;
                self.coords[p] = 1;
                true
            } else {
                false
            };
            if progressed {
                for q in (p + 1)..m {
                    self.elements[q] = self.elements[q - 1] + 1;
                    self.coords[q] = 1;
                }
                return;
            }
        }
        self.done = true;
    }

    fn current(&self) -> Orthant {
        let mut coords = vec![0u8; self.n];
        for (&e, &i) in self.elements.iter().zip(&self.coords) {
            coords[e] = i as u8;
        }
        Orthant::from_coords(self.k, coords).expect("coordinates in range")
    }
}

impl Iterator for Seeds<'_> {
    type Item = Orthant;

    fn next(&mut self) -> Option<Orthant> {
        while !self.done {
            let cost: u64 = self.elements.iter().map(|&e| self.costs.of(e)).sum();
            let candidate = (cost <= self.costs.budget()).then(|| self.current());
            self.advance();
            if candidate.is_some() {
                return candidate;
            }
        }
        None
    }
}

/// `C(n, m) · k^m`, saturating.
pub fn orthants_of_size(n: usize, k: usize, m: usize) -> u128 {
    if m > n {
        return 0;
    }
    let mut binom: u128 = 1;
    for j in 0..m {
        binom = binom.saturating_mul((n - j) as u128) / (j as u128 + 1);
    }
    binom.saturating_mul((k as u128).saturating_pow(m as u32))
}

/// Upper bound on oracle calls for a solve at depth `w`:
/// `(Σ_{m≤w} C(n,m) k^m + C(n,w) k^w) · (n+1) · (n k + 2)`.
pub fn oracle_call_bound(n: usize, k: usize, w: usize) -> u128 {
    let enumerated: u128 = (0..=w).map(|m| orthants_of_size(n, k, m)).fold(0u128, |a, b| a.saturating_add(b));
    let seeds = orthants_of_size(n, k, w);
    enumerated
        .saturating_add(seeds)
        .saturating_mul(n as u128 + 1)
        .saturating_mul((n * k) as u128 + 2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    /// Found while scoring small orthants before the greedy phase.
    Enumeration,
    /// Greedy extension of this seed.
    Seed(Orthant),
    /// Nothing was enumerated; the empty orthant.
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<T> {
    pub solution: Orthant,
    pub value: T,
    pub oracle_calls: u64,
    pub origin: Origin,
    pub w: usize,
    /// Monotonicity the depth was chosen for (never `Auto`).
    pub monotonicity: Monotonicity,
    pub enumerated: usize,
    pub seeds: usize,
    pub wall_time: Duration,
}

impl<T: Scalar> SolveReport<T> {
    /// Report text with element ids. Excludes wall time so that reruns
    /// produce identical bytes.
    pub fn render(&self, instance: &Instance<T>) -> String {
        let origin = match &self.origin {
            Origin::Enumeration => "enumeration".to_string(),
            Origin::Seed(s) => format!("seed {}", instance.describe(s)),
            Origin::Empty => "empty".to_string(),
        };
        format!(
            "value: {}\nsolution: {}\ncost: {}\nbudget: {}\noracle_calls: {}\norigin: {}\nw: {}\nmode: {}\nenumerated: {}\nseeds: {}\n",
            self.value,
            instance.describe(&self.solution),
            instance.costs().cost(&self.solution),
            instance.budget(),
            self.oracle_calls,
            origin,
            self.w,
            self.monotonicity,
            self.enumerated,
            self.seeds,
        )
    }
}

fn resolve_monotonicity<T: Scalar>(instance: &Instance<T>, config: &SolverConfig) -> Result<Monotonicity> {
    if config.monotonicity != Monotonicity::Auto {
        return Ok(config.monotonicity);
    }
    let exhaustive = Verifier::exhaustive().with_cap(config.verify_cap).without_definition();
    let report = match exhaustive.verify(instance.function()) {
        Ok(r) => r,
        Err(Error::CapExceeded { .. }) => Verifier::new(VerifyMode::Sampled { count: 20_000, seed: 0 })
            .without_definition()
            .verify(instance.function())?,
        Err(e) => return Err(e),
    };
    Ok(if report.is_monotone() { Monotonicity::Monotone } else { Monotonicity::NonMonotone })
}

/// Runs the partial-enumeration greedy on `instance`.
///
/// Ties between candidates of equal value go to the one found first:
/// enumerated orthants before seeds, seeds in [`enumerate_seeds`] order.
/// The report is independent of `config.threads`.
pub fn solve<T: Scalar>(instance: &Instance<T>, config: &SolverConfig) -> Result<SolveReport<T>> {
    let started = Instant::now();
    let monotonicity = resolve_monotonicity(instance, config)?;
    let w = config.w.or(monotonicity.default_depth()).expect("resolved monotonicity has a depth");
    let (n, k) = (instance.n(), instance.k());
    let costs = instance.costs();

    let small_sizes: Vec<usize> = match (w, config.strict_paper) {
        (0, _) => vec![],
        (w, true) => vec![w - 1],
        (w, false) => (0..w).collect(),
    };
    let required = small_sizes
        .iter()
        .map(|&m| orthants_of_size(n, k, m))
        .fold(orthants_of_size(n, k, w), |a, b| a.saturating_add(b));
    if required > config.cap {
        return Err(Error::CapExceeded { what: "enumerated orthants and seeds", required, cap: config.cap });
    }

    let oracle = Oracle::new(instance.function());
    let mut best: Option<(Orthant, T, Origin)> = None;
    let mut enumerated = 0usize;
    for &m in &small_sizes {
        for x in enumerate_seeds(costs, k, m) {
            enumerated += 1;
            let v = oracle.evaluate(&x)?;
            if best.as_ref().is_none_or(|(_, bv, _)| v > *bv) {
                best = Some((x, v, Origin::Enumeration));
            }
        }
    }

    let seeds: Vec<Orthant> = enumerate_seeds(costs, k, w).collect();
    let run_seed = |seed: &Orthant| -> Result<(Orthant, T, u64)> {
        let local = Oracle::new(instance.function());
        let candidates: Vec<usize> = (0..n)
            .filter(|&e| !seed.is_assigned(e))
            .filter(|&e| !config.prefilter || costs.cost(seed) + costs.of(e) <= costs.budget())
            .collect();
        let run = greedy_extend_over(costs, &local, seed, &candidates)?;
        let (x, v) = if config.best_prefix { run.best_prefix } else { (run.result, run.value) };
        Ok((x, v, local.calls()))
    };
    let results: Vec<(Orthant, T, u64)> = if config.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
        pool.install(|| seeds.par_iter().map(run_seed).collect::<Result<Vec<_>>>())?
    } else {
        seeds.iter().map(run_seed).collect::<Result<Vec<_>>>()?
    };

    let mut calls = oracle.calls();
    for (seed, (x, v, c)) in seeds.iter().zip(results) {
        calls += c;
        if best.as_ref().is_none_or(|(_, bv, _)| v > *bv) {
            best = Some((x, v, Origin::Seed(seed.clone())));
        }
    }

    let (solution, _, origin) = best.unwrap_or_else(|| (instance.empty(), T::zero(), Origin::Empty));
    let value = oracle.evaluate(&solution)?;
    calls += 1;
    Ok(SolveReport {
        solution,
        value,
        oracle_calls: calls,
        origin,
        w,
        monotonicity,
        enumerated,
        seeds: seeds.len(),
        wall_time: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Table;

    #[test]
    fn ratio_constants_round_to_three_decimals() {
        assert_eq!(format!("{:.3}", monotone_ratio()), "0.432");
        assert_eq!(format!("{:.3}", non_monotone_ratio()), "0.317");
    }

    #[test]
    fn seed_order_is_pair_lexicographic() {
        let costs = CostVector::new(vec![1, 1, 1], 10).unwrap();
        let seeds: Vec<String> = enumerate_seeds(&costs, 2, 2).map(|x| x.key()).collect();
        assert_eq!(
            seeds,
            [
                "1,1,0", "1,2,0", "1,0,1", "1,0,2", "2,1,0", "2,2,0", "2,0,1", "2,0,2", "0,1,1", "0,1,2", "0,2,1",
                "0,2,2"
            ]
        );
        assert_eq!(enumerate_seeds(&costs, 2, 4).count(), 0);
        assert_eq!(enumerate_seeds(&costs, 2, 3).count(), 8);
    }

    #[test]
    fn counting_helpers() {
        assert_eq!(orthants_of_size(8, 2, 7), 8 * 128);
        assert_eq!(orthants_of_size(3, 2, 4), 0);
        assert_eq!(orthants_of_size(5, 3, 0), 1);
        assert_eq!(oracle_call_bound(1, 1, 0), (1 + 1) * 2 * 3);
    }

    #[test]
    fn single_element_picks_best_coordinate() {
        let t = Table::new(1, 2, vec![0.0, 3.0, 1.0]).unwrap();
        let inst = Instance::with_default_ids(CostVector::new(vec![1], 1).unwrap(), FunctionSpec::Table(t)).unwrap();
        let r = solve(&inst, &SolverConfig::monotone().with_w(0)).unwrap();
        assert_eq!(r.value, 3.0);
        assert_eq!(r.solution.coord(0), 1);
    }

    #[test]
    fn cap_guard() {
        let t = Table::new(1, 2, vec![0.0, 3.0, 1.0]).unwrap();
        let inst = Instance::with_default_ids(CostVector::new(vec![1], 1).unwrap(), FunctionSpec::Table(t)).unwrap();
        let err = solve(&inst, &SolverConfig::monotone().with_w(1).with_cap(2)).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { required: 3, .. }));
    }

    #[test]
    fn strict_mode_without_candidates_falls_back_to_empty() {
        let t = Table::new(1, 2, vec![0.5, 3.0, 1.0]).unwrap();
        let inst = Instance::with_default_ids(CostVector::new(vec![1], 1).unwrap(), FunctionSpec::Table(t)).unwrap();
        let r = solve(&inst, &SolverConfig::monotone().with_w(5).strict_paper(true)).unwrap();
        assert_eq!(r.origin, Origin::Empty);
        assert_eq!(r.value, 0.5);
        let r = solve(&inst, &SolverConfig::monotone().with_w(5)).unwrap();
        assert_eq!(r.origin, Origin::Enumeration);
        assert_eq!(r.value, 3.0);
    }
}
