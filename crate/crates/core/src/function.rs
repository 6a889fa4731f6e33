//! Evaluable k-submodular function families.
//!
//! * [`Coverage`]: each (element, coordinate) pair covers a weighted subset
//!   of a universe; the value is the weight of everything covered. Monotone
//!   and k-submodular.
//! * [`SignedCoverage`]: coverage plus a per-(element, coordinate) bonus
//!   with `b[e][i] + b[e][j] >= 0` for `i != j`. Adding a constant per
//!   assigned pair keeps marginals diminishing, and the pairwise bound keeps
//!   the sum of any two coordinates' marginals nonnegative, so the family
//!   stays k-submodular while negative bonuses break monotonicity.
//! * [`Table`]: explicit values for all `(k+1)^n` orthants.

use crate::error::{Error, Result};
use crate::orthant::{orthant_count, Orthant, MAX_K};
use crate::scalar::Scalar;

/// A set function over orthants of a fixed ground set.
///
/// `value` assumes `x` has this function's shape; [`crate::Oracle`] checks
/// shapes and counts calls.
pub trait KFunction: Send + Sync {
    type Value: Scalar;

    fn ground_size(&self) -> usize;

    fn k(&self) -> usize;

    fn value(&self, x: &Orthant) -> Self::Value;
}

impl<F: KFunction + ?Sized> KFunction for &F {
    type Value = F::Value;

    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }

    fn k(&self) -> usize {
        (**self).k()
    }

    fn value(&self, x: &Orthant) -> Self::Value {
        (**self).value(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniverseItem<T> {
    pub id: String,
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coverage<T> {
    universe: Vec<UniverseItem<T>>,
    k: usize,
    /// `covers[e][i - 1]`: universe indices covered by element `e` in subset `i`.
    covers: Vec<Vec<Vec<usize>>>,
}

impl<T: Scalar> Coverage<T> {
    pub fn new(universe: Vec<UniverseItem<T>>, k: usize, covers: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if k == 0 || k > MAX_K {
            return Err(Error::InvalidK(k));
        }
        for item in &universe {
            if !(item.weight >= T::zero()) {
                return Err(Error::InvalidFunction(format!(
                    "universe item {} has negative weight {}",
                    item.id, item.weight
                )));
            }
        }
        for (e, per_coord) in covers.iter().enumerate() {
            if per_coord.len() != k {
                return Err(Error::InvalidFunction(format!(
                    "element {e} lists {} coordinates, expected {k}",
                    per_coord.len()
                )));
            }
            for list in per_coord {
                if let Some(&u) = list.iter().find(|&&u| u >= universe.len()) {
                    return Err(Error::InvalidFunction(format!(
                        "element {e} covers universe index {u}, universe has {} items",
                        universe.len()
                    )));
                }
            }
        }
        let covers = covers
            .into_iter()
            .map(|per| {
                per.into_iter()
                    .map(|mut l| {
                        l.sort_unstable();
                        l.dedup();
                        l
                    })
                    .collect()
            })
            .collect();
        Ok(Self { universe, k, covers })
    }

    pub fn universe(&self) -> &[UniverseItem<T>] {
        &self.universe
    }

    /// Universe indices covered by `element` placed in subset `coord`.
    pub fn covered_by(&self, element: usize, coord: usize) -> &[usize] {
        &self.covers[element][coord - 1]
    }

    pub fn covered_weight(&self, element: usize, coord: usize) -> T {
        self.covered_by(element, coord).iter().map(|&u| self.universe[u].weight).sum()
    }
}

impl<T: Scalar> KFunction for Coverage<T> {
    type Value = T;

    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn k(&self) -> usize {
        self.k
    }

    fn value(&self, x: &Orthant) -> T {
        let mut covered = vec![false; self.universe.len()];
        for e in x.support() {
            for &u in &self.covers[e][x.coord(e) - 1] {
                covered[u] = true;
            }
        }
        self.universe
            .iter()
            .zip(&covered)
            .filter(|(_, &c)| c)
            .map(|(item, _)| item.weight)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignedCoverage<T> {
    base: Coverage<T>,
    /// `bonus[e][i - 1]`.
    bonus: Vec<Vec<T>>,
}

impl<T: Scalar> SignedCoverage<T> {
    pub fn new(base: Coverage<T>, bonus: Vec<Vec<T>>) -> Result<Self> {
        if bonus.len() != base.ground_size() {
            return Err(Error::InvalidFunction(format!(
                "bonus lists {} elements, coverage has {}",
                bonus.len(),
                base.ground_size()
            )));
        }
        for (e, b) in bonus.iter().enumerate() {
            if b.len() != base.k {
                return Err(Error::InvalidFunction(format!(
                    "element {e} has {} bonuses, expected {}",
                    b.len(),
                    base.k
                )));
            }
            for i in 0..b.len() {
                for j in (i + 1)..b.len() {
                    if b[i] + b[j] < T::zero() {
                        return Err(Error::InvalidFunction(format!(
                            "element {e}: bonuses {} (coordinate {}) and {} (coordinate {}) sum below zero",
                            b[i],
                            i + 1,
                            b[j],
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(Self { base, bonus })
    }

    pub fn base(&self) -> &Coverage<T> {
        &self.base
    }

    pub fn bonus(&self, element: usize, coord: usize) -> T {
        self.bonus[element][coord - 1]
    }

    pub fn bonuses(&self) -> &[Vec<T>] {
        &self.bonus
    }
}

impl<T: Scalar> KFunction for SignedCoverage<T> {
    type Value = T;

    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn k(&self) -> usize {
        self.base.k
    }

    fn value(&self, x: &Orthant) -> T {
        let shift: T = x.support().map(|e| self.bonus[e][x.coord(e) - 1]).sum();
        self.base.value(x) + shift
    }
}

/// Dense table indexed by [`Orthant::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct Table<T> {
    n: usize,
    k: usize,
    values: Vec<T>,
}

impl<T: Scalar> Table<T> {
    pub fn new(n: usize, k: usize, values: Vec<T>) -> Result<Self> {
        if k == 0 || k > MAX_K {
            return Err(Error::InvalidK(k));
        }
        let expected = orthant_count(n, k).filter(|&c| c <= usize::MAX as u128).ok_or(Error::CapExceeded {
            what: "table entries",
            required: u128::MAX,
            cap: usize::MAX as u128,
        })? as usize;
        if values.len() != expected {
            return Err(Error::InvalidFunction(format!("expected {expected} values, got {}", values.len())));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= T::zero())) {
            return Err(Error::InvalidFunction(format!("table entry {i} has negative value {v}")));
        }
        Ok(Self { n, k, values })
    }

    /// Tabulates `f` over every orthant. Fails if `(k+1)^n` exceeds `cap`.
    pub fn tabulate<F>(f: &F, cap: u128) -> Result<Self>
    where
        F: KFunction<Value = T> + ?Sized,
    {
        let (n, k) = (f.ground_size(), f.k());
        let count = orthant_count(n, k).unwrap_or(u128::MAX);
        if count > cap {
            return Err(Error::CapExceeded { what: "table entries", required: count, cap });
        }
        let values = Orthant::all(n, k).map(|x| f.value(&x)).collect();
        Self::new(n, k, values)
    }

    pub fn get(&self, x: &Orthant) -> T {
        self.values[x.index() as usize]
    }

    pub fn set(&mut self, x: &Orthant, value: T) -> Result<()> {
        if !(value >= T::zero()) {
            return Err(Error::InvalidFunction(format!("negative table value {value}")));
        }
        self.values[x.index() as usize] = value;
        Ok(())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

impl<T: Scalar> KFunction for Table<T> {
    type Value = T;

    fn ground_size(&self) -> usize {
        self.n
    }

    fn k(&self) -> usize {
        self.k
    }

    fn value(&self, x: &Orthant) -> T {
        self.get(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec<T> {
    Table(Table<T>),
    Coverage(Coverage<T>),
    SignedCoverage(SignedCoverage<T>),
}

impl<T: Scalar> FunctionSpec<T> {
    pub fn family(&self) -> &'static str {
        match self {
            FunctionSpec::Table(_) => "table",
            FunctionSpec::Coverage(_) => "coverage",
            FunctionSpec::SignedCoverage(_) => "coverage-signed",
        }
    }
}

impl<T: Scalar> KFunction for FunctionSpec<T> {
    type Value = T;

    fn ground_size(&self) -> usize {
        match self {
            FunctionSpec::Table(t) => t.ground_size(),
            FunctionSpec::Coverage(c) => c.ground_size(),
            FunctionSpec::SignedCoverage(s) => s.ground_size(),
        }
    }

    fn k(&self) -> usize {
        match self {
            FunctionSpec::Table(t) => t.k(),
            FunctionSpec::Coverage(c) => c.k(),
            FunctionSpec::SignedCoverage(s) => s.k(),
        }
    }

    fn value(&self, x: &Orthant) -> T {
        match self {
            FunctionSpec::Table(t) => t.value(x),
            FunctionSpec::Coverage(c) => c.value(x),
            FunctionSpec::SignedCoverage(s) => s.value(x),
        }
    }
}

/// `g(x) = f(x ⊔ anchor) - f(anchor)` on the elements outside `P(anchor)`.
///
/// Element `j` of the contracted ground set is the `j`-th unassigned
/// element of `anchor` in increasing order.
pub struct Contraction<'a, F: KFunction + ?Sized> {
    f: &'a F,
    anchor: Orthant,
    anchor_value: F::Value,
    free: Vec<usize>,
}

impl<'a, F: KFunction + ?Sized> Contraction<'a, F> {
    pub fn new(f: &'a F, anchor: Orthant) -> Result<Self> {
        anchor.same_shape(&Orthant::empty(f.ground_size(), f.k()))?;
        let free = (0..anchor.n()).filter(|&e| !anchor.is_assigned(e)).collect();
        let anchor_value = f.value(&anchor);
        Ok(Self { f, anchor, anchor_value, free })
    }

    /// Maps a full-ground-set orthant onto the contracted ground set,
    /// dropping anchored elements.
    pub fn restrict(&self, x: &Orthant) -> Orthant {
        let coords = self.free.iter().map(|&e| x.coords()[e]).collect();
        Orthant::from_coords(x.k(), coords).expect("coordinates already validated")
    }

    /// Inverse of [`Self::restrict`] joined with the anchor.
    pub fn lift(&self, y: &Orthant) -> Orthant {
        let mut coords = self.anchor.coords().to_vec();
        for (j, &e) in self.free.iter().enumerate() {
            coords[e] = y.coords()[j];
        }
        Orthant::from_coords(y.k(), coords).expect("coordinates already validated")
    }
}

impl<F: KFunction + ?Sized> KFunction for Contraction<'_, F> {
    type Value = F::Value;

    fn ground_size(&self) -> usize {
        self.free.len()
    }

    fn k(&self) -> usize {
        self.f.k()
    }

    fn value(&self, y: &Orthant) -> F::Value {
        self.f.value(&self.lift(y)) - self.anchor_value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn items(weights: &[f64]) -> Vec<UniverseItem<f64>> {
        weights
            .iter()
            .enumerate()
            .map(|(i, &w)| UniverseItem { id: format!("u{}", i + 1), weight: w })
            .collect()
    }

    #[test]
    fn coverage_rejects_bad_indices() {
        let err = Coverage::new(items(&[1.0]), 1, vec![vec![vec![3]]]).unwrap_err();
        assert!(matches!(err, Error::InvalidFunction(_)));
        assert!(Coverage::new(items(&[-1.0]), 1, vec![vec![vec![0]]]).is_err());
        assert!(Coverage::new(items(&[1.0]), 2, vec![vec![vec![0]]]).is_err());
    }

    #[test]
    fn signed_coverage_pairwise_constraint() {
        let base = Coverage::new(items(&[1.0]), 2, vec![vec![vec![0], vec![0]]]).unwrap();
        assert!(SignedCoverage::new(base.clone(), vec![vec![-2.0, 1.0]]).is_err());
        assert!(SignedCoverage::new(base.clone(), vec![vec![-1.0, 1.0]]).is_ok());
        assert!(SignedCoverage::new(base, vec![vec![0.0]]).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(Table::new(2, 2, vec![0.0; 8]).unwrap_err().to_string().contains("expected 9 values"));
        assert!(Table::new(1, 1, vec![0.0, -1.0]).is_err());
        let mut t = Table::new(1, 1, vec![0.0, 1.0]).unwrap();
        assert!(t.set(&Orthant::empty(1, 1), -0.5).is_err());
        t.set(&Orthant::empty(1, 1), 0.5).unwrap();
        assert_eq!(t.value(&Orthant::empty(1, 1)), 0.5);
    }

    #[test]
    fn contraction_round_trip() {
        let t = Table::new(2, 1, vec![0.0, 1.0, 2.0, 4.0]).unwrap();
        let anchor = Orthant::from_coords(1, vec![1, 0]).unwrap();
        let g = Contraction::new(&t, anchor).unwrap();
        assert_eq!(g.ground_size(), 1);
        // g({b}) = f({a,b}) - f({a}) = 4 - 2
        assert_eq!(g.value(&Orthant::from_coords(1, vec![1]).unwrap()), 2.0);
        assert_eq!(g.value(&Orthant::empty(1, 1)), 0.0);
        let y = Orthant::from_coords(1, vec![1]).unwrap();
        assert_eq!(g.restrict(&g.lift(&y)), y);
    }
}
