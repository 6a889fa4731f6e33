//! JSON instance documents.
//!
//! ```json
//! {
//!   "k": 2,
//!   "budget": 2,
//!   "elements": [{"id": "e1", "cost": 1}, {"id": "e2", "cost": 2}],
//!   "function": {"coverage": {
//!     "universe": [{"id": "u1", "weight": 1}],
//!     "covers": {"e1": {"1": ["u1"], "2": []}}
//!   }}
//! }
//! ```
//!
//! `function` is one of `coverage`, `coverage_signed` (coverage fields plus
//! `bonus: {element id: [k numbers]}`) or `table` (`values` keyed by
//! comma-joined coordinates in element order, e.g. `"1,0"`). Missing cover
//! entries mean "covers nothing".

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use ksubknap::orthant::{orthant_count, CostVector};
use ksubknap::{Coverage, FunctionSpec, Instance, Orthant, Scalar, SignedCoverage, Table, UniverseItem};
use serde::{Deserialize, Serialize};
use serde_json::Number;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub k: usize,
    pub budget: u64,
    pub elements: Vec<ElementEntry>,
    pub function: FunctionEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementEntry {
    pub id: String,
    pub cost: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionEntry {
    Coverage(CoverageEntry),
    CoverageSigned(SignedEntry),
    Table(TableEntry),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniverseEntry {
    pub id: String,
    pub weight: Number,
}

pub type Covers = BTreeMap<String, BTreeMap<String, Vec<String>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageEntry {
    pub universe: Vec<UniverseEntry>,
    #[serde(default)]
    pub covers: Covers,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignedEntry {
    pub universe: Vec<UniverseEntry>,
    #[serde(default)]
    pub covers: Covers,
    pub bonus: BTreeMap<String, Vec<Number>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub values: BTreeMap<String, Number>,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

/// Parses a JSON number into `T`. Exact scalar types read plain decimals
/// as `digits / 10^d`; everything else goes through `f64`.
pub fn number<T: Scalar>(n: &Number, field: &str) -> Result<T> {
    if T::is_exact() {
        if let Some(v) = decimal(&n.to_string()) {
            return Ok(v);
        }
    }
    n.as_f64()
        .and_then(T::from_f64)
        .ok_or_else(|| schema(format!("{field}: {n} is not representable")))
}

fn decimal<T: Scalar>(text: &str) -> Option<T> {
    if text.contains(['e', 'E']) {
        return None;
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    let digits = frac.len() as u32;
    let mantissa: i64 = format!("{int}{frac}").parse().ok()?;
    let den = 10i64.checked_pow(digits)?;
    Some(T::ratio(mantissa, den))
}

fn to_number<T: Scalar>(v: T) -> Result<Number> {
    let f = v.to_f64_lossy();
    if f.fract() == 0.0 && f.abs() < 1e15 {
        return Ok(Number::from(f as i64));
    }
    Number::from_f64(f).ok_or_else(|| schema(format!("value {v} is not a finite number")))
}

fn parse_coverage<T: Scalar>(
    universe: &[UniverseEntry],
    covers: &Covers,
    ids: &HashMap<&str, usize>,
    n: usize,
    k: usize,
) -> Result<Coverage<T>> {
    let mut items = Vec::with_capacity(universe.len());
    let mut index = HashMap::new();
    for (u, entry) in universe.iter().enumerate() {
        if index.insert(entry.id.as_str(), u).is_some() {
            return Err(schema(format!("function.universe[{u}]: duplicate id {:?}", entry.id)));
        }
        let weight = number(&entry.weight, &format!("function.universe[{u}].weight"))?;
        items.push(UniverseItem { id: entry.id.clone(), weight });
    }
    let mut sets = vec![vec![Vec::new(); k]; n];
    for (element, per_coord) in covers {
        let &e = ids
            .get(element.as_str())
            .ok_or_else(|| schema(format!("function.covers: unknown element {element:?}")))?;
        for (coord, list) in per_coord {
            let field = format!("function.covers.{element}.{coord}");
            let i: usize = coord
                .parse()
                .ok()
                .filter(|i| (1..=k).contains(i))
                .ok_or_else(|| schema(format!("{field}: coordinate must be in 1..={k}")))?;
            for id in list {
                let &u = index
                    .get(id.as_str())
                    .ok_or_else(|| schema(format!("{field}: unknown universe id {id:?}")))?;
                sets[e][i - 1].push(u);
            }
        }
    }
    Ok(Coverage::new(items, k, sets)?)
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Json { what: "instance".into(), source: e })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Json { what: path.display().to_string(), source: e })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance documents always serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }

    /// Validates the document and builds the instance.
    pub fn to_instance<T: Scalar>(&self) -> Result<Instance<T>> {
        let (n, k) = (self.elements.len(), self.k);
        if n == 0 {
            return Err(schema("elements: at least one element is required"));
        }
        if k == 0 || k > ksubknap::orthant::MAX_K {
            return Err(schema(format!("k: must be in 1..={}, got {k}", ksubknap::orthant::MAX_K)));
        }
        let mut ids = HashMap::new();
        for (e, el) in self.elements.iter().enumerate() {
            if el.cost == 0 {
                return Err(schema(format!("elements[{e}] ({:?}): cost must be at least 1", el.id)));
            }
            if ids.insert(el.id.as_str(), e).is_some() {
                return Err(schema(format!("elements[{e}]: duplicate id {:?}", el.id)));
            }
        }
        let costs = CostVector::new(self.elements.iter().map(|e| e.cost).collect(), self.budget)?;
        let function = match &self.function {
            FunctionEntry::Coverage(c) => FunctionSpec::Coverage(parse_coverage(&c.universe, &c.covers, &ids, n, k)?),
            FunctionEntry::CoverageSigned(s) => {
                let base = parse_coverage(&s.universe, &s.covers, &ids, n, k)?;
                let mut bonus = vec![vec![T::zero(); k]; n];
                for (element, values) in &s.bonus {
                    let &e = ids
                        .get(element.as_str())
                        .ok_or_else(|| schema(format!("function.bonus: unknown element {element:?}")))?;
                    if values.len() != k {
                        return Err(schema(format!("function.bonus.{element}: expected {k} values, got {}", values.len())));
                    }
                    for (i, v) in values.iter().enumerate() {
                        bonus[e][i] = number(v, &format!("function.bonus.{element}[{i}]"))?;
                    }
                }
                FunctionSpec::SignedCoverage(SignedCoverage::new(base, bonus)?)
            }
            FunctionEntry::Table(t) => {
                let expected = orthant_count(n, k)
                    .filter(|&c| c <= 1 << 24)
                    .ok_or_else(|| schema(format!("function.table: (k+1)^n too large for n={n}, k={k}")))?
                    as usize;
                if t.values.len() != expected {
                    return Err(schema(format!("function.table: expected {expected} values, got {}", t.values.len())));
                }
                let mut values = vec![T::zero(); expected];
                for (key, v) in &t.values {
                    let x = parse_key(key, n, k).ok_or_else(|| schema(format!("function.table: bad key {key:?}")))?;
                    values[x.index() as usize] = number(v, &format!("function.table[{key:?}]"))?;
                }
                FunctionSpec::Table(Table::new(n, k, values)?)
            }
        };
        Ok(Instance::new(self.elements.iter().map(|e| e.id.clone()).collect(), costs, function)?)
    }

    pub fn from_instance<T: Scalar>(instance: &Instance<T>) -> Result<Self> {
        let ids = instance.element_ids();
        let k = instance.k();
        let elements = ids
            .iter()
            .zip(instance.costs().costs())
            .map(|(id, &cost)| ElementEntry { id: id.clone(), cost })
            .collect();
        let coverage_parts = |c: &Coverage<T>| -> Result<(Vec<UniverseEntry>, Covers)> {
            let universe = c
                .universe()
                .iter()
                .map(|u| Ok(UniverseEntry { id: u.id.clone(), weight: to_number(u.weight)? }))
                .collect::<Result<_>>()?;
            let covers = ids
                .iter()
                .enumerate()
                .map(|(e, id)| {
                    let per = (1..=k)
                        .map(|i| (i.to_string(), c.covered_by(e, i).iter().map(|&u| c.universe()[u].id.clone()).collect()))
                        .collect();
                    (id.clone(), per)
                })
                .collect();
            Ok((universe, covers))
        };
        let function = match instance.function() {
            FunctionSpec::Coverage(c) => {
                let (universe, covers) = coverage_parts(c)?;
                FunctionEntry::Coverage(CoverageEntry { universe, covers })
            }
            FunctionSpec::SignedCoverage(s) => {
                let (universe, covers) = coverage_parts(s.base())?;
                let bonus = ids
                    .iter()
                    .zip(s.bonuses())
                    .map(|(id, b)| Ok((id.clone(), b.iter().map(|&v| to_number(v)).collect::<Result<_>>()?)))
                    .collect::<Result<_>>()?;
                FunctionEntry::CoverageSigned(SignedEntry { universe, covers, bonus })
            }
            FunctionSpec::Table(t) => {
                let values = Orthant::all(instance.n(), k)
                    .map(|x| Ok((x.key(), to_number(t.get(&x))?)))
                    .collect::<Result<_>>()?;
                FunctionEntry::Table(TableEntry { values })
            }
        };
        Ok(Self { k, budget: instance.budget(), elements, function })
    }
}

fn parse_key(key: &str, n: usize, k: usize) -> Option<Orthant> {
    let coords: Vec<u8> = key.split(',').map(|d| d.trim().parse().ok()).collect::<Option<_>>()?;
    (coords.len() == n).then_some(())?;
    Orthant::from_coords(k, coords).ok()
}

/// Reads and validates an instance file.
pub fn load<T: Scalar>(path: &Path) -> Result<Instance<T>> {
    InstanceFile::read(path)?.to_instance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ksubknap::{KFunction, Rational};

    const F1: &str = r#"{
        "k": 2, "budget": 2,
        "elements": [{"id": "e1", "cost": 1}, {"id": "e2", "cost": 2}],
        "function": {"coverage": {
            "universe": [{"id": "u1", "weight": 1}, {"id": "u2", "weight": 1}, {"id": "u3", "weight": 1}],
            "covers": {"e1": {"1": ["u1", "u2"], "2": ["u1"]}, "e2": {"1": ["u3"], "2": ["u2", "u3"]}}
        }}
    }"#;

    #[test]
    fn parses_fixture() {
        let inst: Instance<f64> = InstanceFile::from_json(F1).unwrap().to_instance().unwrap();
        let x = Orthant::from_pairs(2, 2, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(inst.function().value(&x), 3.0);
        assert_eq!(inst.budget(), 2);
    }

    #[test]
    fn zero_cost_names_the_element() {
        let doc = F1.replace(r#""cost": 2"#, r#""cost": 0"#);
        let err = InstanceFile::from_json(&doc).unwrap().to_instance::<f64>().unwrap_err().to_string();
        assert!(err.contains("\"e2\"") && err.contains("cost"), "{err}");
    }

    #[test]
    fn dangling_universe_id() {
        let doc = F1.replace(r#"["u2", "u3"]"#, r#"["u2", "u9"]"#);
        let err = InstanceFile::from_json(&doc).unwrap().to_instance::<f64>().unwrap_err().to_string();
        assert!(err.contains("u9"), "{err}");
    }

    #[test]
    fn table_key_count() {
        let mut values = String::new();
        for (j, x) in Orthant::all(2, 2).enumerate().take(8) {
            values += &format!("{}\"{}\": {j}", if j > 0 { "," } else { "" }, x.key());
        }
        let doc = format!(r#"{{"k": 2, "budget": 1, "elements": [{{"id": "a", "cost": 1}}, {{"id": "b", "cost": 1}}], "function": {{"table": {{"values": {{{values}}}}}}}}}"#);
        let err = InstanceFile::from_json(&doc).unwrap().to_instance::<f64>().unwrap_err().to_string();
        assert!(err.contains("expected 9 values"), "{err}");
    }

    #[test]
    fn decimals_are_exact_for_rationals() {
        let n: Number = serde_json::from_str("-1.25").unwrap();
        assert_eq!(number::<Rational>(&n, "x").unwrap(), Rational::new(-5, 4));
        let n: Number = serde_json::from_str("0.1").unwrap();
        assert_eq!(number::<f64>(&n, "x").unwrap(), 0.1);
        let n: Number = serde_json::from_str("1e-3").unwrap();
        assert_eq!(number::<f64>(&n, "x").unwrap(), 0.001);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let doc = F1.replace(r#""budget": 2"#, r#""budget": 2, "extra": 1"#);
        let err = InstanceFile::from_json(&doc).unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn write_then_parse_round_trips() {
        let file = InstanceFile::from_json(F1).unwrap();
        let inst: Instance<f64> = file.to_instance().unwrap();
        let again = InstanceFile::from_instance(&inst).unwrap();
        let reparsed = InstanceFile::from_json(&again.to_json()).unwrap();
        assert_eq!(again, reparsed);
        assert_eq!(reparsed.to_instance::<f64>().unwrap(), inst);
    }
}
