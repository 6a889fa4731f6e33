//! Call-counting evaluation wrapper.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::function::KFunction;
use crate::orthant::Orthant;

/// Evaluates a [`KFunction`] and counts every evaluation performed.
///
/// The counter is atomic, so one oracle may be shared across threads.
/// Parallel solvers give each worker its own oracle and sum the counts.
pub struct Oracle<'a, F: KFunction + ?Sized> {
    f: &'a F,
    calls: AtomicU64,
}

impl<'a, F: KFunction + ?Sized> Oracle<'a, F> {
    pub fn new(f: &'a F) -> Self {
        Self { f, calls: AtomicU64::new(0) }
    }

    pub fn function(&self) -> &'a F {
        self.f
    }

    pub fn ground_size(&self) -> usize {
        self.f.ground_size()
    }

    pub fn k(&self) -> usize {
        self.f.k()
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn empty(&self) -> Orthant {
        Orthant::empty(self.f.ground_size(), self.f.k())
    }

    pub fn check_shape(&self, x: &Orthant) -> Result<()> {
        if x.n() != self.f.ground_size() || x.k() != self.f.k() {
            return Err(Error::ShapeMismatch {
                n_left: x.n(),
                k_left: x.k(),
                n_right: self.f.ground_size(),
                k_right: self.f.k(),
            });
        }
        Ok(())
    }

    /// `f(x)`. Increments the counter by one.
    pub fn evaluate(&self, x: &Orthant) -> Result<F::Value> {
        self.check_shape(x)?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        Ok(self.f.value(x))
    }

    /// `Δ_{e,i} f(x) = f(x ⊔ I[e,i]) - f(x)`, using two evaluations.
    pub fn marginal_gain(&self, x: &Orthant, element: usize, coord: usize) -> Result<F::Value> {
        let extended = x.with(element, coord)?;
        let base = self.evaluate(x)?;
        Ok(self.evaluate(&extended)? - base)
    }

    /// Same as [`Self::marginal_gain`] with `f(x)` supplied by the caller;
    /// costs a single evaluation.
    pub fn marginal_gain_from(&self, x: &Orthant, fx: F::Value, element: usize, coord: usize) -> Result<F::Value> {
        let extended = x.with(element, coord)?;
        Ok(self.evaluate(&extended)? - fx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Table;

    #[test]
    fn counter_counts_evaluations() {
        let t = Table::new(1, 2, vec![0.0, 3.0, 1.0]).unwrap();
        let oracle = Oracle::new(&t);
        let empty = oracle.empty();
        assert_eq!(oracle.evaluate(&empty).unwrap(), 0.0);
        assert_eq!(oracle.marginal_gain(&empty, 0, 1).unwrap(), 3.0);
        assert_eq!(oracle.marginal_gain_from(&empty, 0.0, 0, 2).unwrap(), 1.0);
        assert_eq!(oracle.calls(), 4);
    }

    #[test]
    fn gain_of_assigned_element_is_an_error() {
        let t = Table::new(1, 2, vec![0.0, 3.0, 1.0]).unwrap();
        let oracle = Oracle::new(&t);
        let x = Orthant::singleton(1, 2, 0, 1).unwrap();
        assert!(matches!(oracle.marginal_gain(&x, 0, 2), Err(Error::AlreadyAssigned { .. })));
        assert_eq!(oracle.calls(), 0);
        assert!(oracle.evaluate(&Orthant::empty(2, 2)).is_err());
    }
}
