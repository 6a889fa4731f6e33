#![allow(dead_code)]

use ksubknap::{CostVector, Coverage, FunctionSpec, Instance, Scalar, SignedCoverage, Table, UniverseItem};

fn universe<T: Scalar>(n: usize) -> Vec<UniverseItem<T>> {
    (1..=n).map(|i| UniverseItem { id: format!("u{i}"), weight: T::one() }).collect()
}

/// Two elements, k = 2, three unit-weight items.
/// e1: {u1,u2} / {u1}; e2: {u3} / {u2,u3}.
pub fn f1_coverage<T: Scalar>() -> Coverage<T> {
    Coverage::new(universe(3), 2, vec![vec![vec![0, 1], vec![0]], vec![vec![2], vec![1, 2]]]).unwrap()
}

pub fn f1<T: Scalar>(budget: u64) -> Instance<T> {
    let costs = CostVector::new(vec![1, 2], budget).unwrap();
    Instance::with_default_ids(costs, FunctionSpec::Coverage(f1_coverage())).unwrap()
}

/// `f1` plus bonuses (-1.5, +1.5) on e1 and (0, 0) on e2.
pub fn f2<T: Scalar>(budget: u64) -> Instance<T> {
    let bonus = vec![vec![T::ratio(-3, 2), T::ratio(3, 2)], vec![T::zero(), T::zero()]];
    let f = SignedCoverage::new(f1_coverage(), bonus).unwrap();
    let costs = CostVector::new(vec![1, 2], budget).unwrap();
    Instance::with_default_ids(costs, FunctionSpec::SignedCoverage(f)).unwrap()
}

/// k = 1 table over {a, b} with f({a,b}) = 3 > f({a}) + f({b}).
pub fn supermodular_table() -> Table<f64> {
    // index order: ∅, {b}, {a}, {a,b}
    Table::new(2, 1, vec![0.0, 1.0, 1.0, 3.0]).unwrap()
}
