//! Exhaustive search for the optimal feasible orthant.
//!
//! Refuses instances beyond its cap instead of approximating: this is the
//! ground truth the other modules are checked against.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracle::Oracle;
use crate::orthant::{orthant_count, Orthant};
use crate::scalar::Scalar;

/// Default bound on `(k+1)^n`.
pub const DEFAULT_EXACT_CAP: u128 = 1 << 22;

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult<T> {
    pub orthant: Orthant,
    pub value: T,
    /// Feasible orthants scored (after the size restriction).
    pub feasible: u64,
    /// Required support size, if any.
    pub size: Option<usize>,
}

/// Optimum over all feasible orthants, optionally restricted to support
/// size exactly `size`. Ties go to the orthant with the smallest index.
/// Returns `None` only when `size` admits no feasible orthant.
pub fn brute_force_opt_with_cap<T: Scalar>(instance: &Instance<T>, size: Option<usize>, cap: u128) -> Result<Option<OptResult<T>>> {
    let (n, k) = (instance.n(), instance.k());
    let required = orthant_count(n, k).unwrap_or(u128::MAX);
    if required > cap {
        return Err(Error::CapExceeded { what: "orthants for brute force", required, cap });
    }
    let oracle = Oracle::new(instance.function());
    let mut best: Option<(Orthant, T)> = None;
    let mut feasible = 0u64;
    for x in Orthant::all(n, k) {
        if size.is_some_and(|m| x.support_len() != m) || !instance.is_feasible(&x) {
            continue;
        }
        feasible += 1;
        let v = oracle.evaluate(&x)?;
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((x, v));
        }
    }
    Ok(best.map(|(orthant, value)| OptResult { orthant, value, feasible, size }))
}

/// [`brute_force_opt_with_cap`] with [`DEFAULT_EXACT_CAP`] and no size
/// restriction. The empty orthant is always feasible, so this always
/// returns an optimum.
pub fn brute_force_opt<T: Scalar>(instance: &Instance<T>) -> Result<OptResult<T>> {
    Ok(brute_force_opt_with_cap(instance, None, DEFAULT_EXACT_CAP)?.expect("empty orthant is feasible"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{FunctionSpec, Table};
    use crate::orthant::CostVector;

    #[test]
    fn cap_refuses() {
        let t = Table::new(2, 1, vec![0.0, 1.0, 1.0, 1.0]).unwrap();
        let inst = Instance::with_default_ids(CostVector::new(vec![1, 1], 2).unwrap(), FunctionSpec::Table(t)).unwrap();
        assert!(matches!(brute_force_opt_with_cap(&inst, None, 3), Err(Error::CapExceeded { .. })));
        // ties resolve to the smallest index: {b} (index 1) before {a} (index 2)
        let r = brute_force_opt_with_cap(&inst, None, 4).unwrap().unwrap();
        assert_eq!(r.orthant.key(), "0,1");
        assert_eq!(r.feasible, 4);
        assert!(brute_force_opt_with_cap(&inst, Some(3), 4).unwrap().is_none());
    }
}
