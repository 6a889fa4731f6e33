//! Seeded instance generators.
//!
//! All weights and bonuses are integer multiples of 1/100, so generated
//! instances are exact in every [`Scalar`] type, including [`crate::Rational`].

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::function::{Coverage, FunctionSpec, KFunction, SignedCoverage, Table, UniverseItem};
use crate::instance::Instance;
use crate::orthant::{orthant_count, CostVector, Orthant};
use crate::scalar::Scalar;
use crate::verify::{Verifier, DEFAULT_VERIFY_CAP};

const HUNDREDTHS: i64 = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetRule {
    /// `⌈total cost / 2⌉`.
    HalfTotal,
    /// `⌈fraction · total cost⌉`.
    Fraction(f64),
    Fixed(u64),
}

impl BudgetRule {
    pub fn budget(&self, total_cost: u64) -> u64 {
        match *self {
            BudgetRule::HalfTotal => total_cost.div_ceil(2),
            BudgetRule::Fraction(f) => (f * total_cost as f64).ceil() as u64,
            BudgetRule::Fixed(b) => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageParams {
    pub n: usize,
    pub k: usize,
    pub universe_size: usize,
    /// Inclusive integer cost range; the lower end must be at least 1.
    pub cost_range: (u64, u64),
    pub budget: BudgetRule,
}

impl CoverageParams {
    pub fn new(n: usize, k: usize, universe_size: usize) -> Self {
        Self { n, k, universe_size, cost_range: (1, 5), budget: BudgetRule::HalfTotal }
    }

    pub fn cost_range(mut self, lo: u64, hi: u64) -> Self {
        self.cost_range = (lo, hi);
        self
    }

    pub fn budget(mut self, rule: BudgetRule) -> Self {
        self.budget = rule;
        self
    }

    fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| Err(Error::InvalidParameter { name, reason: reason.to_string() });
        if self.n == 0 {
            return bad("n", "must be at least 1");
        }
        if self.k == 0 || self.k > crate::orthant::MAX_K {
            return bad("k", "must be in 1..=255");
        }
        if self.universe_size == 0 {
            return bad("universe_size", "must be at least 1");
        }
        let (lo, hi) = self.cost_range;
        if lo == 0 || lo > hi {
            return bad("cost_range", "must satisfy 1 <= lo <= hi");
        }
        if let BudgetRule::Fraction(f) = self.budget {
            if !(f.is_finite() && f >= 0.0) {
                return bad("budget", "fraction must be finite and nonnegative");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignedParams {
    pub coverage: CoverageParams,
    /// Largest magnitude of a negative bonus, and spread of positive ones.
    pub bonus_magnitude: f64,
    pub max_attempts: usize,
    /// Bound on `(k+1)^n` for the brute-force nonnegativity check.
    pub cap: u128,
}

impl SignedParams {
    pub fn new(coverage: CoverageParams, bonus_magnitude: f64) -> Self {
        Self { coverage, bonus_magnitude, max_attempts: 200, cap: DEFAULT_VERIFY_CAP }
    }
}

fn weights<T: Scalar>(hundredths: &[i64]) -> Vec<UniverseItem<T>> {
    hundredths
        .iter()
        .enumerate()
        .map(|(u, &w)| UniverseItem { id: format!("u{}", u + 1), weight: T::ratio(w, HUNDREDTHS) })
        .collect()
}

struct RawCoverage {
    weights: Vec<i64>,
    covers: Vec<Vec<Vec<usize>>>,
    costs: Vec<u64>,
}

impl RawCoverage {
    fn covered_hundredths(&self, e: usize, i: usize) -> i64 {
        self.covers[e][i - 1].iter().map(|&u| self.weights[u]).sum()
    }

    fn build<T: Scalar>(&self, k: usize) -> Result<Coverage<T>> {
        Coverage::new(weights(&self.weights), k, self.covers.clone())
    }
}

fn raw_coverage(p: &CoverageParams, rng: &mut ChaCha8Rng) -> RawCoverage {
    let u = p.universe_size;
    let weights = (0..u).map(|_| rng.random_range(10..=1000)).collect();
    let max_size = u.div_ceil(2).max(1);
    let covers = (0..p.n)
        .map(|_| {
            (0..p.k)
                .map(|_| {
                    let size = rng.random_range(1..=max_size);
                    let mut items = sample(rng, u, size).into_vec();
                    items.sort_unstable();
                    items
                })
                .collect()
        })
        .collect();
    let costs = (0..p.n).map(|_| rng.random_range(p.cost_range.0..=p.cost_range.1)).collect();
    RawCoverage { weights, covers, costs }
}

/// Random weighted coverage instance. Monotone and k-submodular.
pub fn gen_coverage<T: Scalar>(params: &CoverageParams, seed: u64) -> Result<Instance<T>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = raw_coverage(params, &mut rng);
    let total: u64 = raw.costs.iter().sum();
    let costs = CostVector::new(raw.costs.clone(), params.budget.budget(total))?;
    Instance::with_default_ids(costs, FunctionSpec::Coverage(raw.build(params.k)?))
}

/// Coverage plus per-(element, coordinate) bonuses giving a nonnegative,
/// non-monotone k-submodular function.
///
/// Each element gets one negative bonus `-a` with `a` at most the weight its
/// coordinate covers; the other coordinates get bonuses of at least `a`, so
/// every pair of bonuses sums to a nonnegative value. Bonuses are resampled
/// until brute force confirms `min f >= 0` and a negative marginal exists.
pub fn gen_signed_coverage<T: Scalar>(params: &SignedParams, seed: u64) -> Result<Instance<T>> {
    let p = &params.coverage;
    p.validate()?;
    if !(params.bonus_magnitude.is_finite() && params.bonus_magnitude > 0.0) {
        return Err(Error::InvalidParameter { name: "bonus_magnitude", reason: "must be positive".into() });
    }
    let required = orthant_count(p.n, p.k).unwrap_or(u128::MAX);
    if required > params.cap {
        return Err(Error::CapExceeded { what: "orthants for the nonnegativity check", required, cap: params.cap });
    }
    let magnitude = ((params.bonus_magnitude * HUNDREDTHS as f64).round() as i64).max(1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = raw_coverage(p, &mut rng);
    let base: Coverage<T> = raw.build(p.k)?;
    let total: u64 = raw.costs.iter().sum();
    let costs = CostVector::new(raw.costs.clone(), p.budget.budget(total))?;

    for _ in 0..params.max_attempts {
        let bonus: Vec<Vec<T>> = (0..p.n)
            .map(|e| {
                let negative = rng.random_range(1..=p.k);
                let cap = raw.covered_hundredths(e, negative).min(magnitude).max(1);
                let a = rng.random_range(1..=cap);
                (1..=p.k)
                    .map(|i| {
                        if i == negative {
                            T::ratio(-a, HUNDREDTHS)
                        } else {
                            T::ratio(a + rng.random_range(0..=magnitude), HUNDREDTHS)
                        }
                    })
                    .collect()
            })
            .collect();
        let f = SignedCoverage::new(base.clone(), bonus)?;
        let nonnegative = Orthant::all(p.n, p.k).all(|x| f.value(&x) >= T::zero());
        if !nonnegative {
            continue;
        }
        let report = Verifier::exhaustive().with_cap(params.cap).without_definition().verify(&f)?;
        if report.monotone.fails() {
            return Instance::with_default_ids(costs, FunctionSpec::SignedCoverage(f));
        }
    }
    Err(Error::AttemptsExhausted {
        attempts: params.max_attempts,
        reason: "no bonus draw was both nonnegative and non-monotone".into(),
    })
}

/// Replaces the instance's function by its full table.
pub fn gen_table<T: Scalar>(instance: &Instance<T>, cap: u128) -> Result<Instance<T>> {
    let table = Table::tabulate(instance.function(), cap)?;
    instance.with_function(FunctionSpec::Table(table))
}

/// Coverage instance built so that partial-enumeration greedy seeded with
/// the single most valuable element runs out of budget before it can add a
/// second, expensive element of the optimum.
///
/// Layout: an "anchor" element (cost 1) covering a heavy block, an
/// "expensive" element covering a lighter but still large block at a cost
/// that makes its density low, and `n - 2` cheap elements (cost 1) with high
/// density on a shared pool. The budget is exactly anchor + expensive.
/// Element order is shuffled by the seed.
pub fn gen_expensive_coverage<T: Scalar>(n: usize, k: usize, seed: u64) -> Result<Instance<T>> {
    if n < 3 {
        return Err(Error::InvalidParameter { name: "n", reason: "crafted instances need at least 3 elements".into() });
    }
    if k == 0 || k > crate::orthant::MAX_K {
        return Err(Error::InvalidK(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cheap = n - 2;
    // Universe: [0, 2) anchor block, [2, 4) expensive block, then a pool of
    // 2 * cheap items.
    let pool = 2 * cheap;
    let mut w = Vec::with_capacity(4 + pool);
    let pool_weights: Vec<i64> = (0..pool).map(|_| rng.random_range(75..=150)).collect();
    let cheap_max: i64 = pool_weights.iter().sum();
    let expensive_total = cheap_max + rng.random_range(100..=300);
    let anchor_total = expensive_total + rng.random_range(100..=300);
    w.push(anchor_total / 2);
    w.push(anchor_total - anchor_total / 2);
    w.push(expensive_total / 2);
    w.push(expensive_total - expensive_total / 2);
    w.extend(pool_weights);

    // Expensive density stays below 1 unit per cost, cheap density is at least 1.5.
    let expensive_cost = (expensive_total / HUNDREDTHS + 1) as u64;
    let mut covers: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n);
    let mut costs = Vec::with_capacity(n);
    covers.push(vec![vec![0, 1]; k]);
    costs.push(1);
    covers.push(vec![vec![2, 3]; k]);
    costs.push(expensive_cost);
    for c in 0..cheap {
        let per_coord = (0..k)
            .map(|_| {
                let a = 4 + 2 * c;
                let b = 4 + rng.random_range(0..pool);
                let mut v = vec![a, a + 1, b];
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        covers.push(per_coord);
        costs.push(1);
    }

    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let covers = order.iter().map(|&e| covers[e].clone()).collect();
    let costs: Vec<u64> = order.iter().map(|&e| costs[e]).collect();
    let budget = 1 + expensive_cost;
    let f = Coverage::new(weights(&w), k, covers)?;
    Instance::with_default_ids(CostVector::new(costs, budget)?, FunctionSpec::Coverage(f))
}
