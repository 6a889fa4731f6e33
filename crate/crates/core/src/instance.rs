use crate::error::{Error, Result};
use crate::function::{FunctionSpec, KFunction};
use crate::orthant::{CostVector, Orthant};
use crate::scalar::Scalar;

/// A knapsack-constrained k-submodular maximization problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    element_ids: Vec<String>,
    costs: CostVector,
    function: FunctionSpec<T>,
}

impl<T: Scalar> Instance<T> {
    pub fn new(element_ids: Vec<String>, costs: CostVector, function: FunctionSpec<T>) -> Result<Self> {
        let n = function.ground_size();
        if element_ids.len() != n || costs.len() != n {
            return Err(Error::InvalidFunction(format!(
                "function is over {n} elements but {} ids and {} costs were given",
                element_ids.len(),
                costs.len()
            )));
        }
        for (i, id) in element_ids.iter().enumerate() {
            if element_ids[..i].contains(id) {
                return Err(Error::InvalidFunction(format!("duplicate element id `{id}`")));
            }
        }
        Ok(Self { element_ids, costs, function })
    }

    /// Instance with ids `e1, e2, ...`.
    pub fn with_default_ids(costs: CostVector, function: FunctionSpec<T>) -> Result<Self> {
        let ids = (1..=function.ground_size()).map(|i| format!("e{i}")).collect();
        Self::new(ids, costs, function)
    }

    pub fn n(&self) -> usize {
        self.function.ground_size()
    }

    pub fn k(&self) -> usize {
        self.function.k()
    }

    pub fn budget(&self) -> u64 {
        self.costs.budget()
    }

    pub fn costs(&self) -> &CostVector {
        &self.costs
    }

    pub fn function(&self) -> &FunctionSpec<T> {
        &self.function
    }

    pub fn element_ids(&self) -> &[String] {
        &self.element_ids
    }

    pub fn empty(&self) -> Orthant {
        Orthant::empty(self.n(), self.k())
    }

    pub fn is_feasible(&self, x: &Orthant) -> bool {
        self.costs.fits(x)
    }

    /// Same problem with a different budget.
    pub fn with_budget(&self, budget: u64) -> Self {
        let costs = CostVector::new(self.costs.costs().to_vec(), budget).expect("costs already validated");
        Self { element_ids: self.element_ids.clone(), costs, function: self.function.clone() }
    }

    /// Same problem with the function replaced (shape must match).
    pub fn with_function(&self, function: FunctionSpec<T>) -> Result<Self> {
        Self::new(self.element_ids.clone(), self.costs.clone(), function)
    }

    /// Renders `x` with element ids, e.g. `({e1}, {e2, e3})`.
    pub fn describe(&self, x: &Orthant) -> String {
        let parts: Vec<String> = (1..=x.k())
            .map(|i| {
                let ids: Vec<&str> = x.subset(i).map(|e| self.element_ids[e].as_str()).collect();
                format!("{{{}}}", ids.join(", "))
            })
            .collect();
        format!("({})", parts.join(", "))
    }
}
