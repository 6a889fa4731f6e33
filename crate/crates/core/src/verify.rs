//! Property verifier for k-submodularity and monotonicity.
//!
//! Four properties are checked independently:
//!
//! * orthant submodularity: `Δ_{e,i} f(x) >= Δ_{e,i} f(y)` for `x ⪯ y`, `e ∉ P(y)`;
//! * pairwise monotonicity: `Δ_{e,i} f(x) + Δ_{e,j} f(x) >= 0` for `i != j`;
//! * the defining inequality `f(x) + f(y) >= f(x ⊔ y) + f(x ⊓ y)`;
//! * monotonicity: `Δ_{e,i} f(x) >= 0` everywhere (equivalent to `f(x) <= f(y)`
//!   for all `x ⪯ y`, by chaining single-element steps).
//!
//! The first two together characterize k-submodularity, so in exhaustive
//! mode the verdict for the defining inequality must agree with their
//! conjunction. Checking both routes is what makes the verifier useful as
//! a test oracle.

use std::fmt;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::function::KFunction;
use crate::orthant::{orthant_count, Orthant};
use crate::scalar::Scalar;

/// Default bound on `(k+1)^n` for exhaustive verification.
pub const DEFAULT_VERIFY_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyMode::Exhaustive => write!(f, "exhaustive"),
            VerifyMode::Sampled { count, seed } => write!(f, "sampled(count={count}, seed={seed})"),
        }
    }
}

/// A concrete counterexample. `lhs >= rhs` is the inequality that failed.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness<T> {
    OrthantSubmodular { x: Orthant, y: Orthant, element: usize, coord: usize, lhs: T, rhs: T },
    PairwiseMonotone { x: Orthant, element: usize, coords: (usize, usize), lhs: T, rhs: T },
    Definition { x: Orthant, y: Orthant, lhs: T, rhs: T },
    Monotone { x: Orthant, element: usize, coord: usize, lhs: T, rhs: T },
}

impl<T: Scalar> fmt::Display for Witness<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::OrthantSubmodular { x, y, element, coord, lhs, rhs } => write!(
                f,
                "x={x} ⪯ y={y}, e={element}, i={coord}: Δ f(x) = {lhs} < Δ f(y) = {rhs}"
            ),
            Witness::PairwiseMonotone { x, element, coords: (i, j), lhs, rhs } => write!(
                f,
                "x={x}, e={element}, i={i}, j={j}: Δ_i f(x) + Δ_j f(x) = {lhs} < {rhs}"
            ),
            Witness::Definition { x, y, lhs, rhs } => {
                write!(f, "x={x}, y={y}: f(x) + f(y) = {lhs} < f(x ⊔ y) + f(x ⊓ y) = {rhs}")
            }
            Witness::Monotone { x, element, coord, lhs, rhs } => write!(
                f,
                "x={x}, e={element}, i={coord}: f(x ⊔ I[e,i]) = {lhs} < f(x) = {rhs}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<T> {
    Holds,
    Fails(Witness<T>),
    NotChecked,
}

impl<T> Verdict<T> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }

    pub fn witness(&self) -> Option<&Witness<T>> {
        match self {
            Verdict::Fails(w) => Some(w),
            _ => None,
        }
    }
}

impl<T: Scalar> fmt::Display for Verdict<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => write!(f, "holds"),
            Verdict::NotChecked => write!(f, "not-checked"),
            Verdict::Fails(w) => write!(f, "fails: {w}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<T> {
    pub mode: VerifyMode,
    pub orthant_submodular: Verdict<T>,
    pub pairwise_monotone: Verdict<T>,
    pub k_submodular: Verdict<T>,
    pub monotone: Verdict<T>,
}

impl<T: Scalar> VerificationReport<T> {
    /// k-submodular by the definition, or by the characterization when the
    /// definition was not checked.
    pub fn is_k_submodular(&self) -> bool {
        match &self.k_submodular {
            Verdict::Holds => true,
            Verdict::Fails(_) => false,
            Verdict::NotChecked => self.orthant_submodular.holds() && self.pairwise_monotone.holds(),
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone.holds()
    }

    /// Whether the definitional verdict agrees with
    /// `orthant_submodular ∧ pairwise_monotone`. Vacuously true when either
    /// side was not checked.
    pub fn characterization_consistent(&self) -> bool {
        let parts = [&self.orthant_submodular, &self.pairwise_monotone, &self.k_submodular];
        if parts.iter().any(|v| matches!(v, Verdict::NotChecked)) {
            return true;
        }
        self.k_submodular.holds() == (self.orthant_submodular.holds() && self.pairwise_monotone.holds())
    }

    /// Properties that failed, among those required for k-submodularity.
    pub fn k_submodular_failures(&self) -> impl Iterator<Item = (&'static str, &Witness<T>)> {
        [
            ("orthant-submodular", &self.orthant_submodular),
            ("pairwise-monotone", &self.pairwise_monotone),
            ("k-submodular", &self.k_submodular),
        ]
        .into_iter()
        .filter_map(|(name, v)| v.witness().map(|w| (name, w)))
    }
}

impl<T: Scalar> fmt::Display for VerificationReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode: {}", self.mode)?;
        writeln!(f, "orthant-submodular: {}", self.orthant_submodular)?;
        writeln!(f, "pairwise-monotone: {}", self.pairwise_monotone)?;
        writeln!(f, "k-submodular: {}", self.k_submodular)?;
        write!(f, "monotone: {}", self.monotone)
    }
}

#[derive(Debug, Clone)]
pub struct Verifier {
    mode: VerifyMode,
    cap: u128,
    check_definition: bool,
}

impl Verifier {
    pub fn new(mode: VerifyMode) -> Self {
        Self { mode, cap: DEFAULT_VERIFY_CAP, check_definition: true }
    }

    pub fn exhaustive() -> Self {
        Self::new(VerifyMode::Exhaustive)
    }

    pub fn sampled(count: usize, seed: u64) -> Self {
        Self::new(VerifyMode::Sampled { count, seed })
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }

    /// Skips the defining inequality, which is quadratic in the number of
    /// orthants when exhaustive. Its verdict becomes `NotChecked`.
    pub fn without_definition(mut self) -> Self {
        self.check_definition = false;
        self
    }

    pub fn verify<F: KFunction + ?Sized>(&self, f: &F) -> Result<VerificationReport<F::Value>> {
        match self.mode {
            VerifyMode::Exhaustive => {
                let required = orthant_count(f.ground_size(), f.k()).unwrap_or(u128::MAX);
                if required > self.cap {
                    return Err(Error::CapExceeded { what: "orthants for exhaustive verification", required, cap: self.cap });
                }
                Ok(Exhaustive::new(f).run(self.check_definition))
            }
            VerifyMode::Sampled { count, seed } => Ok(sampled(f, count, seed, self.check_definition)),
        }
    }
}

/// Shorthand for `Verifier::new(mode).verify(f)`.
pub fn verify<F: KFunction + ?Sized>(f: &F, mode: VerifyMode) -> Result<VerificationReport<F::Value>> {
    Verifier::new(mode).verify(f)
}

struct Exhaustive<T> {
    n: usize,
    k: usize,
    /// `place[e]` = index offset of coordinate 1 at element `e`.
    place: Vec<u64>,
    values: Vec<T>,
    orthants: Vec<Orthant>,
}

impl<T: Scalar> Exhaustive<T> {
    fn new<F: KFunction<Value = T> + ?Sized>(f: &F) -> Self {
        let (n, k) = (f.ground_size(), f.k());
        let base = k as u64 + 1;
        let place = (0..n).map(|e| base.pow((n - 1 - e) as u32)).collect();
        let orthants: Vec<Orthant> = Orthant::all(n, k).collect();
        let values = orthants.iter().map(|x| f.value(x)).collect();
        Self { n, k, place, values, orthants }
    }

    fn run(&self, check_definition: bool) -> VerificationReport<T> {
        VerificationReport {
            mode: VerifyMode::Exhaustive,
            orthant_submodular: self.orthant_submodular(),
            pairwise_monotone: self.pairwise_monotone(),
            k_submodular: if check_definition { self.definition() } else { Verdict::NotChecked },
            monotone: self.monotone(),
        }
    }

    fn gain(&self, x: usize, e: usize, i: usize) -> T {
        self.values[x + i * self.place[e] as usize] - self.values[x]
    }

    fn orthant_submodular(&self) -> Verdict<T> {
        let tol = T::tolerance();
        for (yi, y) in self.orthants.iter().enumerate() {
            let support: Vec<usize> = y.support().collect();
            let free: Vec<usize> = (0..self.n).filter(|&e| !y.is_assigned(e)).collect();
            if free.is_empty() {
                continue;
            }
            let gains_y: Vec<(usize, usize, T)> = free
                .iter()
                .flat_map(|&e| (1..=self.k).map(move |i| (e, i)))
                .map(|(e, i)| (e, i, self.gain(yi, e, i)))
                .collect();
            for mask in 0u64..(1u64 << support.len()) {
                let xi: usize = support
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &e)| y.coord(e) * self.place[e] as usize)
                    .sum();
                for &(e, i, gy) in &gains_y {
                    let gx = self.gain(xi, e, i);
                    if gx < gy - tol {
                        return Verdict::Fails(Witness::OrthantSubmodular {
                            x: self.orthants[xi].clone(),
                            y: y.clone(),
                            element: e,
                            coord: i,
                            lhs: gx,
                            rhs: gy,
                        });
                    }
                }
            }
        }
        Verdict::Holds
    }

    fn pairwise_monotone(&self) -> Verdict<T> {
        let tol = T::tolerance();
        for (xi, x) in self.orthants.iter().enumerate() {
            for e in (0..self.n).filter(|&e| !x.is_assigned(e)) {
                for i in 1..=self.k {
                    for j in (i + 1)..=self.k {
                        let sum = self.gain(xi, e, i) + self.gain(xi, e, j);
                        if sum < -tol {
                            return Verdict::Fails(Witness::PairwiseMonotone {
                                x: x.clone(),
                                element: e,
                                coords: (i, j),
                                lhs: sum,
                                rhs: T::zero(),
                            });
                        }
                    }
                }
            }
        }
        Verdict::Holds
    }

    fn definition(&self) -> Verdict<T> {
        let tol = T::tolerance();
        for (xi, x) in self.orthants.iter().enumerate() {
            for (yi, y) in self.orthants.iter().enumerate().skip(xi) {
                let (mut join, mut meet) = (0usize, 0usize);
                for (e, (&a, &b)) in x.coords().iter().zip(y.coords()).enumerate() {
                    let p = self.place[e] as usize;
                    let j = match (a, b) {
                        (0, b) => b,
                        (a, 0) => a,
                        (a, b) if a == b => a,
                        _ => 0,
                    };
                    join += j as usize * p;
                    if a == b {
                        meet += a as usize * p;
                    }
                }
                let lhs = self.values[xi] + self.values[yi];
                let rhs = self.values[join] + self.values[meet];
                if lhs < rhs - tol {
                    return Verdict::Fails(Witness::Definition { x: x.clone(), y: y.clone(), lhs, rhs });
                }
            }
        }
        Verdict::Holds
    }

    fn monotone(&self) -> Verdict<T> {
        let tol = T::tolerance();
        for (xi, x) in self.orthants.iter().enumerate() {
            for e in (0..self.n).filter(|&e| !x.is_assigned(e)) {
                for i in 1..=self.k {
                    let after = self.values[xi + i * self.place[e] as usize];
                    if after < self.values[xi] - tol {
                        return Verdict::Fails(Witness::Monotone {
                            x: x.clone(),
                            element: e,
                            coord: i,
                            lhs: after,
                            rhs: self.values[xi],
                        });
                    }
                }
            }
        }
        Verdict::Holds
    }
}

/// Random orthant where each element is unassigned with probability 1/2.
fn sparse_orthant(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Orthant {
    let coords = (0..n)
        .map(|_| if rng.random_bool(0.5) { 0 } else { rng.random_range(1..=k) as u8 })
        .collect();
    Orthant::from_coords(k, coords).expect("coordinates in range")
}

/// Random orthant with at least one unassigned element, and that element.
fn orthant_with_free(rng: &mut ChaCha8Rng, n: usize, k: usize) -> (Orthant, usize) {
    let x = sparse_orthant(rng, n, k);
    let free: Vec<usize> = (0..n).filter(|&e| !x.is_assigned(e)).collect();
    if free.is_empty() {
        let e = rng.random_range(0..n);
        return (x.without(e), e);
    }
    let e = free[rng.random_range(0..free.len())];
    (x, e)
}

fn sampled<F: KFunction + ?Sized>(f: &F, count: usize, seed: u64, check_definition: bool) -> VerificationReport<F::Value> {
    let (n, k) = (f.ground_size(), f.k());
    let tol = F::Value::tolerance();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gain = |x: &Orthant, e: usize, i: usize| f.value(&x.with(e, i).expect("free element")) - f.value(x);
    let mode = VerifyMode::Sampled { count, seed };
    if n == 0 {
        return VerificationReport {
            mode,
            orthant_submodular: Verdict::Holds,
            pairwise_monotone: Verdict::Holds,
            k_submodular: if check_definition { Verdict::Holds } else { Verdict::NotChecked },
            monotone: Verdict::Holds,
        };
    }

    let mut orthant_submodular = Verdict::Holds;
    for _ in 0..count {
        let (y, e) = orthant_with_free(&mut rng, n, k);
        let i = rng.random_range(1..=k);
        let keep: Vec<(usize, usize)> = y
            .support()
            .filter(|_| rng.random_bool(0.5))
            .map(|el| (el, y.coord(el)))
            .collect();
        let x = Orthant::from_pairs(n, k, &keep).expect("sub-orthant");
        let (gx, gy) = (gain(&x, e, i), gain(&y, e, i));
        if gx < gy - tol {
            orthant_submodular = Verdict::Fails(Witness::OrthantSubmodular { x, y, element: e, coord: i, lhs: gx, rhs: gy });
            break;
        }
    }

    let mut pairwise_monotone = Verdict::Holds;
    if k >= 2 {
        for _ in 0..count {
            let (x, e) = orthant_with_free(&mut rng, n, k);
            let i = rng.random_range(1..=k);
            let mut j = rng.random_range(1..k);
            if j >= i {
                j += 1;
            }
            let (i, j) = (i.min(j), i.max(j));
            let sum = gain(&x, e, i) + gain(&x, e, j);
            if sum < -tol {
                pairwise_monotone = Verdict::Fails(Witness::PairwiseMonotone {
                    x,
                    element: e,
                    coords: (i, j),
                    lhs: sum,
                    rhs: F::Value::zero(),
                });
                break;
            }
        }
    }

    let mut k_submodular = if check_definition { Verdict::Holds } else { Verdict::NotChecked };
    if check_definition {
        for _ in 0..count {
            let x = sparse_orthant(&mut rng, n, k);
            let y = sparse_orthant(&mut rng, n, k);
            let lhs = f.value(&x) + f.value(&y);
            let rhs = f.value(&x.join(&y).expect("same shape")) + f.value(&x.meet(&y).expect("same shape"));
            if lhs < rhs - tol {
                k_submodular = Verdict::Fails(Witness::Definition { x, y, lhs, rhs });
                break;
            }
        }
    }

    let mut monotone = Verdict::Holds;
    for _ in 0..count {
        let (x, e) = orthant_with_free(&mut rng, n, k);
        let i = rng.random_range(1..=k);
        let (before, after) = (f.value(&x), f.value(&x.with(e, i).expect("free element")));
        if after < before - tol {
            monotone = Verdict::Fails(Witness::Monotone { x, element: e, coord: i, lhs: after, rhs: before });
            break;
        }
    }

    VerificationReport { mode, orthant_submodular, pairwise_monotone, k_submodular, monotone }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Table;

    fn set_table(values: [f64; 4]) -> Table<f64> {
        // n=2 (a, b), k=1; index = 2*a + b
        Table::new(2, 1, values.to_vec()).unwrap()
    }

    #[test]
    fn supermodular_table_fails_orthant_submodularity() {
        // f(∅)=0, f({b})=1, f({a})=1, f({a,b})=3
        let t = set_table([0.0, 1.0, 1.0, 3.0]);
        let report = verify(&t, VerifyMode::Exhaustive).unwrap();
        match report.orthant_submodular {
            Verdict::Fails(Witness::OrthantSubmodular { lhs, rhs, .. }) => {
                assert_eq!(lhs, 1.0);
                assert_eq!(rhs, 2.0);
            }
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(report.k_submodular.fails());
        assert!(report.pairwise_monotone.holds());
        assert!(report.characterization_consistent());
    }

    #[test]
    fn cap_is_enforced() {
        let t = set_table([0.0, 1.0, 1.0, 1.5]);
        let err = Verifier::exhaustive().with_cap(3).verify(&t).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { required: 4, cap: 3, .. }));
    }

    #[test]
    fn without_definition_reports_not_checked() {
        let t = set_table([0.0, 1.0, 1.0, 1.5]);
        let report = Verifier::exhaustive().without_definition().verify(&t).unwrap();
        assert_eq!(report.k_submodular, Verdict::NotChecked);
        assert!(report.is_k_submodular());
        assert!(report.is_monotone());
    }

    #[test]
    fn sampled_mode_finds_blatant_violation_and_is_reproducible() {
        let t = set_table([0.0, 1.0, 1.0, 3.0]);
        let a = verify(&t, VerifyMode::Sampled { count: 200, seed: 3 }).unwrap();
        let b = verify(&t, VerifyMode::Sampled { count: 200, seed: 3 }).unwrap();
        assert_eq!(a, b);
        assert!(a.orthant_submodular.fails());
    }

    #[test]
    fn non_monotone_witness() {
        // f({a}) = 1 > f({a,b}) = 0.5
        let t = set_table([0.0, 1.0, 1.0, 0.5]);
        let report = verify(&t, VerifyMode::Exhaustive).unwrap();
        let w = report.monotone.witness().expect("witness");
        match w {
            Witness::Monotone { lhs, rhs, .. } => assert!(lhs < rhs),
            _ => unreachable!(),
        }
        assert!(report.is_k_submodular());
    }
}
