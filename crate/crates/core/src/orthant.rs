//! k-tuples of pairwise disjoint subsets of an ordered ground set.
//!
//! An [`Orthant`] stores one coordinate per element: `0` means unassigned,
//! `i` in `1..=k` means the element lies in the `i`-th subset. Disjointness
//! of the subsets therefore holds by construction.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported number of coordinates.
pub const MAX_K: usize = u8::MAX as usize;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orthant {
    k: u8,
    coords: Vec<u8>,
}

fn check_k(k: usize) -> Result<u8> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidK(k));
    }
    Ok(k as u8)
}

impl Orthant {
    /// The orthant with every element unassigned.
    ///
    /// Panics if `k` is outside `1..=255`.
    pub fn empty(n: usize, k: usize) -> Self {
        let k = check_k(k).expect("valid k");
        Self { k, coords: vec![0; n] }
    }

    /// The orthant `I[e, i]`: element `e` in subset `i`, all else unassigned.
    pub fn singleton(n: usize, k: usize, element: usize, coord: usize) -> Result<Self> {
        let mut x = Self { k: check_k(k)?, coords: vec![0; n] };
        x.check_element(element)?;
        x.check_coord(coord)?;
        x.coords[element] = coord as u8;
        Ok(x)
    }

    pub fn from_coords(k: usize, coords: Vec<u8>) -> Result<Self> {
        let k = check_k(k)?;
        if let Some(&c) = coords.iter().find(|&&c| c > k) {
            return Err(Error::CoordinateOutOfRange { coord: c as usize, k: k as usize });
        }
        Ok(Self { k, coords })
    }

    /// Builds an orthant from `(element, coordinate)` pairs.
    pub fn from_pairs(n: usize, k: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut x = Self { k: check_k(k)?, coords: vec![0; n] };
        for &(e, i) in pairs {
            x.check_element(e)?;
            x.check_coord(i)?;
            if x.coords[e] != 0 {
                return Err(Error::AlreadyAssigned { element: e, coord: x.coords[e] as usize });
            }
            x.coords[e] = i as u8;
        }
        Ok(x)
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    /// Coordinate of `element` (0 if unassigned). Panics on an unknown element.
    pub fn coord(&self, element: usize) -> usize {
        self.coords[element] as usize
    }

    pub fn coords(&self) -> &[u8] {
        &self.coords
    }

    pub fn is_assigned(&self, element: usize) -> bool {
        self.coords[element] != 0
    }

    pub fn is_empty(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Elements with a nonzero coordinate, in increasing order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coords.iter().enumerate().filter(|(_, &c)| c != 0).map(|(e, _)| e)
    }

    pub fn support_len(&self) -> usize {
        self.coords.iter().filter(|&&c| c != 0).count()
    }

    /// Elements assigned in `self` and in subset `coord`.
    pub fn subset(&self, coord: usize) -> impl Iterator<Item = usize> + '_ {
        self.coords
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c as usize == coord)
            .map(|(e, _)| e)
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.k != other.k || self.n() != other.n() {
            return Err(Error::ShapeMismatch {
                n_left: self.n(),
                k_left: self.k(),
                n_right: other.n(),
                k_right: other.k(),
            });
        }
        Ok(())
    }

    /// `x ⊔ y`: an element keeps a nonzero coordinate unless `x` and `y`
    /// assign it two different nonzero coordinates.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| match (a, b) {
                (0, b) => b,
                (a, 0) => a,
                (a, b) if a == b => a,
                _ => 0,
            })
            .collect();
        Ok(Self { k: self.k, coords })
    }

    /// `x ⊓ y`: coordinatewise intersection.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| if a == b { a } else { 0 })
            .collect();
        Ok(Self { k: self.k, coords })
    }

    /// `x ⪯ y`: every assigned element of `x` has the same coordinate in `y`.
    pub fn precedes(&self, other: &Self) -> Result<bool> {
        self.same_shape(other)?;
        Ok(self.precedes_unchecked(other))
    }

    pub(crate) fn precedes_unchecked(&self, other: &Self) -> bool {
        self.coords.iter().zip(&other.coords).all(|(&a, &b)| a == 0 || a == b)
    }

    /// `(x ⊔ q) ⊔ q`: conflicts resolve to `q`'s coordinate, everything else
    /// is the union of both assignments.
    pub fn override_with(&self, q: &Self) -> Result<Self> {
        self.join(q)?.join(q)
    }

    /// `x ⊔ I[e, i]`.
    pub fn join_singleton(&self, element: usize, coord: usize) -> Result<Self> {
        self.check_element(element)?;
        self.check_coord(coord)?;
        let mut out = self.clone();
        out.coords[element] = match self.coords[element] {
            0 => coord as u8,
            c if c as usize == coord => c,
            _ => 0,
        };
        Ok(out)
    }

    /// Copy of `self` with `element` placed at `coord`. `element` must be
    /// unassigned.
    pub fn with(&self, element: usize, coord: usize) -> Result<Self> {
        self.check_element(element)?;
        self.check_coord(coord)?;
        if self.coords[element] != 0 {
            return Err(Error::AlreadyAssigned { element, coord: self.coords[element] as usize });
        }
        let mut out = self.clone();
        out.coords[element] = coord as u8;
        Ok(out)
    }

    /// Copy of `self` with `element` unassigned.
    pub fn without(&self, element: usize) -> Self {
        let mut out = self.clone();
        out.coords[element] = 0;
        out
    }

    /// Position in the mixed-radix (base `k+1`) enumeration with element 0
    /// as the most significant digit. Index order equals lexicographic
    /// order on the coordinate vector.
    pub fn index(&self) -> u64 {
        let base = self.k as u64 + 1;
        self.coords.iter().fold(0u64, |acc, &c| acc * base + c as u64)
    }

    pub fn from_index(n: usize, k: usize, mut index: u64) -> Result<Self> {
        let kk = check_k(k)?;
        let base = k as u64 + 1;
        let mut coords = vec![0u8; n];
        for slot in coords.iter_mut().rev() {
            *slot = (index % base) as u8;
            index /= base;
        }
        if index != 0 {
            return Err(Error::InvalidParameter {
                name: "index",
                reason: format!("out of range for n={n}, k={k}"),
            });
        }
        Ok(Self { k: kk, coords })
    }

    /// Comma-joined coordinate digits in element order, e.g. `"1,0,2"`.
    pub fn key(&self) -> String {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        parts.join(",")
    }

    /// Iterates over all `(k+1)^n` orthants in index order.
    pub fn all(n: usize, k: usize) -> AllOrthants {
        AllOrthants { next: Some(Orthant::empty(n, k)) }
    }

    fn check_element(&self, element: usize) -> Result<()> {
        if element >= self.n() {
            return Err(Error::UnknownElement { element, n: self.n() });
        }
        Ok(())
    }

    fn check_coord(&self, coord: usize) -> Result<()> {
        if coord == 0 || coord > self.k() {
            return Err(Error::CoordinateOutOfRange { coord, k: self.k() });
        }
        Ok(())
    }
}

/// Number of orthants over `n` elements with `k` coordinates, or `None` on
/// overflow.
pub fn orthant_count(n: usize, k: usize) -> Option<u128> {
    (k as u128 + 1).checked_pow(n as u32)
}

/// Mixed-radix odometer over every orthant.
pub struct AllOrthants {
    next: Option<Orthant>,
}

impl Iterator for AllOrthants {
    type Item = Orthant;

    fn next(&mut self) -> Option<Orthant> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let k = succ.k;
        let mut carried_out = true;
        for slot in succ.coords.iter_mut().rev() {
            if *slot < k {
                *slot += 1;
                carried_out = false;
                break;
            }
            *slot = 0;
        }
        if !carried_out {
            self.next = Some(succ);
        }
        Some(current)
    }
}

impl fmt::Debug for Orthant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Orthant[{}]", self.key())
    }
}

/// Tuple-of-sets notation over element indices, e.g. `({0}, {1, 2})`.
impl fmt::Display for Orthant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 1..=self.k() {
            if i > 1 {
                write!(f, ", ")?;
            }
            let members: Vec<String> = self.subset(i).map(|e| e.to_string()).collect();
            write!(f, "{{{}}}", members.join(", "))?;
        }
        write!(f, ")")
    }
}

/// Integer element costs together with the knapsack budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostVector {
    costs: Vec<u64>,
    budget: u64,
}

impl CostVector {
    /// Zero costs are rejected: the greedy divides marginal gains by cost.
    pub fn new(costs: Vec<u64>, budget: u64) -> Result<Self> {
        if let Some(e) = costs.iter().position(|&c| c == 0) {
            return Err(Error::ZeroCost { element: e });
        }
        Ok(Self { costs, budget })
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn costs(&self) -> &[u64] {
        &self.costs
    }

    pub fn of(&self, element: usize) -> u64 {
        self.costs[element]
    }

    pub fn total(&self) -> u64 {
        self.costs.iter().sum()
    }

    /// `c(P(x))`.
    pub fn cost(&self, x: &Orthant) -> u64 {
        x.support().map(|e| self.costs[e]).sum()
    }

    pub fn fits(&self, x: &Orthant) -> bool {
        self.cost(x) <= self.budget
    }
}
