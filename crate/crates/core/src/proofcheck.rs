//! Executable versions of the constructions used to analyse the greedy.
//!
//! Given an optimum `o` (from [`crate::exact`]), this module rebuilds
//!
//! * the q-sequence: `o`'s elements re-added one at a time, each at the
//!   `(element, coordinate)` of largest value;
//! * the ō-sequence: `o` with coordinates progressively realigned to `q^j`;
//! * the greedy trace from `s^0 = q^w`: partial solutions `s^j`, the
//!   companions `o^{j-1/2} = o^{j-1} ⊔ I[e^j, i^j]` and
//!   `o^j = (o^{j-1} ⊔ I[e^j, i^j]) ⊔ I[e^j, i^j]`, and the first rejected
//!   element of `P(o)`;
//!
//! and checks the inequalities the approximation guarantee is built from.
//! Every check reports slacks (`rhs - lhs`), so a negative value beyond
//! [`Scalar::tolerance`] is a violation.

use std::fmt;

use num_traits::{FromPrimitive, One, Zero};

use crate::error::{Error, Result};
use crate::function::{Contraction, FunctionSpec, KFunction};
use crate::instance::Instance;
use crate::oracle::Oracle;
use crate::orthant::{orthant_count, CostVector, Orthant};
use crate::scalar::Scalar;
use crate::solver::greedy_extend_over;
use crate::verify::{VerificationReport, Verifier};

#[derive(Debug, Clone, PartialEq)]
pub struct QSequence<T> {
    /// `q^0 = ∅, q^1, ..., q^r`.
    pub orthants: Vec<Orthant>,
    pub values: Vec<T>,
}

impl<T> QSequence<T> {
    pub fn len(&self) -> usize {
        self.orthants.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Orders `P(o)` greedily: `q^j = q^{j-1} ⊔ I[e, i]` maximizing
/// `f(q^{j-1} ⊔ I[e, i])` over `e ∈ P(o) \ P(q^{j-1})`, `i ∈ [k]`. Ties go
/// to the lowest element, then the lowest coordinate.
pub fn build_q_sequence<F: KFunction + ?Sized>(oracle: &Oracle<'_, F>, o: &Orthant) -> Result<QSequence<F::Value>> {
    oracle.check_shape(o)?;
    let slack = F::Value::tie_slack();
    let mut current = oracle.empty();
    let mut orthants = vec![current.clone()];
    let mut values = vec![oracle.evaluate(&current)?];
    let mut left: Vec<usize> = o.support().collect();
    while !left.is_empty() {
        let mut best: Option<(usize, usize, F::Value)> = None;
        for &e in &left {
            for i in 1..=o.k() {
                let v = oracle.evaluate(&current.with(e, i)?)?;
                if best.as_ref().is_none_or(|(_, _, bv)| v > *bv + slack) {
                    best = Some((e, i, v));
                }
            }
        }
        let (e, i, v) = best.expect("nonempty candidate set");
        current = current.with(e, i)?;
        left.retain(|&x| x != e);
        orthants.push(current.clone());
        values.push(v);
    }
    Ok(QSequence { orthants, values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObarSequence<T> {
    /// `ō^0 = o, ..., ō^r`.
    pub orthants: Vec<Orthant>,
    pub values: Vec<T>,
}

/// `ō^j = (ō^{j-1} ⊔ q^j) ⊔ q^j`.
pub fn build_obar_sequence<F: KFunction + ?Sized>(
    oracle: &Oracle<'_, F>,
    o: &Orthant,
    q: &QSequence<F::Value>,
) -> Result<ObarSequence<F::Value>> {
    let last = q.orthants.last().expect("q^0 always present");
    let same_support = last.n() == o.n() && (0..o.n()).all(|e| last.is_assigned(e) == o.is_assigned(e));
    if !same_support {
        return Err(Error::Precondition("q-sequence was not built from this orthant".into()));
    }
    let mut orthants = vec![o.clone()];
    for qj in &q.orthants[1..] {
        let next = orthants.last().expect("nonempty").override_with(qj)?;
        orthants.push(next);
    }
    let values = orthants.iter().map(|x| oracle.evaluate(x)).collect::<Result<_>>()?;
    Ok(ObarSequence { orthants, values })
}

/// Slacks of one family of inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck<T> {
    pub name: &'static str,
    pub slacks: Vec<T>,
}

impl<T: Scalar> InequalityCheck<T> {
    fn new(name: &'static str) -> Self {
        Self { name, slacks: Vec::new() }
    }

    pub fn min_slack(&self) -> Option<T> {
        self.slacks.iter().copied().reduce(|a, b| a.min_of(b))
    }

    /// True when every slack is at least `-tolerance` (vacuously for no slacks).
    pub fn holds(&self) -> bool {
        self.min_slack().is_none_or(|s| s >= -T::tolerance())
    }
}

fn require_class<T: Scalar>(report: &VerificationReport<T>, monotone: bool) -> Result<()> {
    if !report.is_k_submodular() {
        return Err(Error::Precondition("function is not verified k-submodular".into()));
    }
    if monotone && !report.is_monotone() {
        return Err(Error::Precondition("monotone analysis requested for a non-monotone function".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnconstrainedCheck<T> {
    /// `c·[f(q^j) - f(q^{j-1})] - [f(ō^{j-1}) - f(ō^j)]` for `j = 1..r`.
    pub per_step: InequalityCheck<T>,
    /// `f(ō^w) - [f(o) - c·f(q^w)]` for `w = 0..r`.
    pub summed: InequalityCheck<T>,
}

impl<T: Scalar> UnconstrainedCheck<T> {
    pub fn holds(&self) -> bool {
        self.per_step.holds() && self.summed.holds()
    }
}

/// Checks `f(ō^{j-1}) - f(ō^j) <= c·[f(q^j) - f(q^{j-1})]` and its prefix
/// sums, with `c = 1` for monotone and `c = 2` for non-monotone `f`.
pub fn check_unconstrained_inequalities<F: KFunction + ?Sized>(
    oracle: &Oracle<'_, F>,
    o: &Orthant,
    monotone: bool,
    report: &VerificationReport<F::Value>,
) -> Result<UnconstrainedCheck<F::Value>> {
    require_class(report, monotone)?;
    let q = build_q_sequence(oracle, o)?;
    let obar = build_obar_sequence(oracle, o, &q)?;
    let c = if monotone { F::Value::one() } else { F::Value::one() + F::Value::one() };
    let mut per_step = InequalityCheck::new("unconstrained per-step");
    for j in 1..q.orthants.len() {
        let lhs = obar.values[j - 1] - obar.values[j];
        let rhs = c * (q.values[j] - q.values[j - 1]);
        per_step.slacks.push(rhs - lhs);
    }
    let mut summed = InequalityCheck::new("unconstrained summed");
    let fo = obar.values[0];
    for w in 0..q.orthants.len() {
        summed.slacks.push(obar.values[w] - (fo - c * q.values[w]));
    }
    Ok(UnconstrainedCheck { per_step, summed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rejection {
    pub element: usize,
    /// Coordinate of the element in `ō^w`.
    pub coord: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyTrace<T> {
    pub w: usize,
    pub optimum: Orthant,
    pub q: QSequence<T>,
    pub obar: ObarSequence<T>,
    /// Candidate elements after dropping rejected elements outside `P(o)`.
    pub candidates: Vec<usize>,
    /// `(e^j, i^j)` for `j = 1..p`.
    pub picks: Vec<(usize, usize)>,
    /// Best density `θ_j` of rounds `1..p`, plus `θ_{p+1}` when a rejection exists.
    pub thetas: Vec<T>,
    /// `s^0..s^p`.
    pub s: Vec<Orthant>,
    /// `o^0..o^p`.
    pub o: Vec<Orthant>,
    /// `o^{1/2}..o^{p-1/2}`.
    pub o_half: Vec<Orthant>,
    pub rejection: Option<Rejection>,
}

impl<T: Scalar> GreedyTrace<T> {
    /// Number of accepted rounds before the first rejection.
    pub fn p(&self) -> usize {
        self.picks.len()
    }

    /// Verifies `s^{j-1} ⪯ o^{j-1/2}`, `s^{j-1} ⪯ o^{j-1}` and
    /// `P(o^0) \ P(s^t) = P(o^t) \ P(s^t)`. Returns the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for j in 1..=self.p() {
            if !self.s[j - 1].precedes_unchecked(&self.o_half[j - 1]) {
                return Err(format!("s^{} is not below o^{}-1/2", j - 1, j));
            }
            if !self.s[j - 1].precedes_unchecked(&self.o[j - 1]) {
                return Err(format!("s^{} is not below o^{}", j - 1, j - 1));
            }
        }
        for t in 0..=self.p() {
            let st = &self.s[t];
            let differs = (0..st.n())
                .filter(|&e| !st.is_assigned(e))
                .any(|e| self.o[0].is_assigned(e) != self.o[t].is_assigned(e));
            if differs {
                return Err(format!("support identity fails at t={t}"));
            }
        }
        Ok(())
    }

    /// `L' = c(P(s^p) \ P(s^0))` and `L'' = c(P(o^0) \ P(s^0))`.
    pub fn budget_exchange(&self, costs: &CostVector) -> (u64, u64) {
        let s0 = &self.s[0];
        let outside = |x: &Orthant| -> u64 { x.support().filter(|&e| !s0.is_assigned(e)).map(|e| costs.of(e)).sum() };
        (outside(&self.s[self.p()]), outside(&self.o[0]))
    }
}

/// Runs the greedy from `s^0 = q^w` and materializes the analysis
/// sequences. `None` when `|P(o)| < w`, or when the rejected element has no
/// coordinate in `ō^w`.
pub fn build_greedy_trace<T: Scalar>(
    instance: &Instance<T>,
    oracle: &Oracle<'_, FunctionSpec<T>>,
    optimum: &Orthant,
    w: usize,
) -> Result<Option<GreedyTrace<T>>> {
    let r = optimum.support_len();
    if r < w {
        return Ok(None);
    }
    let costs = instance.costs();
    let q = build_q_sequence(oracle, optimum)?;
    let obar = build_obar_sequence(oracle, optimum, &q)?;
    let s0 = q.orthants[w].clone();

    // Elements the greedy looks at but cannot place, and which are not part
    // of the optimum, never influence the partial solutions; drop them and
    // rerun until the first rejection (if any) is an element of P(o).
    let mut candidates: Vec<usize> = (0..instance.n()).filter(|&e| !s0.is_assigned(e)).collect();
    let run = loop {
        let run = greedy_extend_over(costs, oracle, &s0, &candidates)?;
        let first_rejection = run.steps.iter().find(|s| !s.accepted);
        match first_rejection {
            Some(step) if !optimum.is_assigned(step.element) => {
                let drop: Vec<usize> = run
                    .steps
                    .iter()
                    .filter(|s| !s.accepted && !optimum.is_assigned(s.element))
                    .map(|s| s.element)
                    .collect();
                candidates.retain(|e| !drop.contains(e));
            }
            _ => break run,
        }
    };

    let accepted_prefix: Vec<_> = run.steps.iter().take_while(|s| s.accepted).collect();
    let picks: Vec<(usize, usize)> = accepted_prefix.iter().map(|s| (s.element, s.coord)).collect();
    let mut thetas: Vec<T> = accepted_prefix.iter().map(|s| s.density).collect();
    let obar_w = &obar.orthants[w];
    let rejection = match run.steps.get(picks.len()) {
        Some(step) => {
            let coord = obar_w.coord(step.element);
            if coord == 0 {
                return Ok(None);
            }
            thetas.push(step.density);
            Some(Rejection { element: step.element, coord })
        }
        None => None,
    };

    let o0 = match rejection {
        Some(rej) => obar_w.without(rej.element),
        None => obar_w.clone(),
    };
    let mut s = vec![s0];
    let mut o = vec![o0];
    let mut o_half = Vec::with_capacity(picks.len());
    for &(e, i) in &picks {
        let half = o.last().expect("nonempty").join_singleton(e, i)?;
        let next = half.join_singleton(e, i)?;
        s.push(s.last().expect("nonempty").with(e, i)?);
        o_half.push(half);
        o.push(next);
    }
    let trace = GreedyTrace {
        w,
        optimum: optimum.clone(),
        q,
        obar,
        candidates,
        picks,
        thetas,
        s,
        o,
        o_half,
        rejection,
    };
    Ok(Some(trace))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck<T> {
    /// `f(s^0)/w - Δ_{e^{p+1}, j} f(o^0)` for `j ∈ [k]`; empty when `w = 0`.
    pub order_bound: InequalityCheck<T>,
    /// `a·f(s^t) - b·f(s^0) + Σ_{e ∈ P(o^0)\P(s^t)} Δ_{e, o^0_e} f(s^t) - f(o^0)`
    /// for `t = 0..p`, with `(a, b) = (2, 1)` monotone or `(3, 2)` otherwise.
    pub iteration_bound: InequalityCheck<T>,
}

impl<T: Scalar> LemmaCheck<T> {
    pub fn holds(&self) -> bool {
        self.order_bound.holds() && self.iteration_bound.holds()
    }
}

pub fn check_lemma_bounds<F: KFunction + ?Sized>(
    oracle: &Oracle<'_, F>,
    trace: &GreedyTrace<F::Value>,
    monotone: bool,
    report: &VerificationReport<F::Value>,
) -> Result<LemmaCheck<F::Value>> {
    require_class(report, monotone)?;
    let rejection = trace.rejection.ok_or_else(|| Error::Precondition("trace lacks a rejection index".into()))?;
    let one = F::Value::one();
    let o0 = &trace.o[0];
    let f_o0 = oracle.evaluate(o0)?;
    let f_s0 = oracle.evaluate(&trace.s[0])?;

    let mut order_bound = InequalityCheck::new("order bound");
    if trace.w >= 1 {
        let w = F::Value::from_usize(trace.w).expect("small integer");
        for j in 1..=o0.k() {
            let gain = oracle.marginal_gain_from(o0, f_o0, rejection.element, j)?;
            order_bound.slacks.push(f_s0 / w - gain);
        }
    }

    let (a, b) = if monotone { (one + one, one) } else { (one + one + one, one + one) };
    let mut iteration_bound = InequalityCheck::new("iteration bound");
    for st in &trace.s {
        let f_st = oracle.evaluate(st)?;
        let mut tail = F::Value::zero();
        for e in o0.support().filter(|&e| !st.is_assigned(e)) {
            tail = tail + oracle.marginal_gain_from(st, f_st, e, o0.coord(e))?;
        }
        iteration_bound.slacks.push(a * f_st - b * f_s0 + tail - f_o0);
    }
    Ok(LemmaCheck { order_bound, iteration_bound })
}

/// Residuals of the θ/ρ bookkeeping: with `ρ` repeating `θ_j` for
/// `c_{e^j}` unit slots, `Σ_{l ≤ L_t} ρ_l` must equal `f(s^t) - f(s^0)` and
/// `g(s^t \ s^0)` for `g(x) = f(x ⊔ s^0) - f(s^0)`. Slacks are
/// `-|difference|`, one per `t = 1..p` and route.
pub fn check_theta_rho<T: Scalar>(
    instance: &Instance<T>,
    oracle: &Oracle<'_, FunctionSpec<T>>,
    trace: &GreedyTrace<T>,
) -> Result<InequalityCheck<T>> {
    let costs = instance.costs();
    let g = Contraction::new(instance.function(), trace.s[0].clone())?;
    let f_s0 = oracle.evaluate(&trace.s[0])?;
    let mut rho = Vec::new();
    let mut check = InequalityCheck::new("theta/rho bookkeeping");
    for (t, &(e, _)) in trace.picks.iter().enumerate() {
        rho.extend(std::iter::repeat_n(trace.thetas[t], costs.of(e) as usize));
        let prefix: T = rho.iter().copied().sum();
        let st = &trace.s[t + 1];
        let direct = oracle.evaluate(st)? - f_s0;
        let through_g = g.value(&g.restrict(st));
        check.slacks.push(-(prefix - direct).abs());
        check.slacks.push(-(prefix - through_g).abs());
    }
    Ok(check)
}

/// Result of the ratio inequality
/// `Σρ / min_s (Σ_{i<s} ρ_i + B ρ_s) >= 1 - (1 - 1/B)^A >= 1 - e^{-A/B}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBound {
    pub lhs: f64,
    pub bound1: f64,
    pub bound2: f64,
}

impl RatioBound {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs >= self.bound1 - tol && self.bound1 >= self.bound2 - tol
    }
}

pub fn ratio_lower_bound(rhos: &[f64], b: u32) -> Result<RatioBound> {
    let first = *rhos
        .first()
        .ok_or(Error::InvalidParameter { name: "rhos", reason: "must be nonempty".into() })?;
    if !(first > 0.0) {
        return Err(Error::InvalidParameter { name: "rhos", reason: "first entry must be positive".into() });
    }
    if rhos.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(Error::InvalidParameter { name: "rhos", reason: "entries must be finite and nonnegative".into() });
    }
    if b < 1 {
        return Err(Error::InvalidParameter { name: "B", reason: "must be at least 1".into() });
    }
    let bf = b as f64;
    let mut prefix = 0.0;
    let mut denom = f64::INFINITY;
    for &r in rhos {
        denom = denom.min(prefix + bf * r);
        prefix += r;
    }
    let a = rhos.len() as f64;
    Ok(RatioBound { lhs: prefix / denom, bound1: 1.0 - (1.0 - 1.0 / bf).powf(a), bound2: 1.0 - (-a / bf).exp() })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Held { min_slack: f64 },
    Violated { min_slack: f64, detail: String },
    NotExercised(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub status: Status,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.status {
            Status::Held { min_slack } => write!(f, "PASS {} (min slack {min_slack:.3e})", self.name),
            Status::Violated { min_slack, detail } => {
                write!(f, "FAIL {} (min slack {min_slack:.3e}) {detail}", self.name)
            }
            Status::NotExercised(why) => write!(f, "SKIP {} ({why})", self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofcheckSummary {
    pub lines: Vec<CheckLine>,
    /// Whether the greedy trace had a rejection (`p` defined).
    pub rejection: bool,
}

impl ProofcheckSummary {
    pub fn passed(&self) -> bool {
        !self.lines.iter().any(|l| matches!(l.status, Status::Violated { .. }))
    }
}

impl fmt::Display for ProofcheckSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn line<T: Scalar>(check: &InequalityCheck<T>) -> CheckLine {
    let min = check.min_slack().map(|s| s.to_f64_lossy()).unwrap_or(0.0);
    let status = if check.holds() {
        Status::Held { min_slack: min }
    } else {
        Status::Violated { min_slack: min, detail: String::new() }
    };
    CheckLine { name: check.name.to_string(), status }
}

/// Runs every check against the brute-force optimum `optimum` with
/// enumeration depth `w`. `report` must come from exhaustive verification.
pub fn run_proofcheck<T: Scalar>(
    instance: &Instance<T>,
    optimum: &Orthant,
    w: usize,
    report: &VerificationReport<T>,
) -> Result<ProofcheckSummary> {
    let oracle = Oracle::new(instance.function());
    let monotone = report.is_monotone();
    let mut lines = Vec::new();

    let unconstrained = check_unconstrained_inequalities(&oracle, optimum, monotone, report)?;
    lines.push(line(&unconstrained.per_step));
    lines.push(line(&unconstrained.summed));

    let Some(trace) = build_greedy_trace(instance, &oracle, optimum, w)? else {
        let why = format!("optimum has {} elements, fewer than w={w}", optimum.support_len());
        for name in ["trace invariants", "theta/rho bookkeeping", "budget exchange", "order bound", "iteration bound", "contraction k-submodular"] {
            lines.push(CheckLine { name: name.into(), status: Status::NotExercised(why.clone()) });
        }
        return Ok(ProofcheckSummary { lines, rejection: false });
    };
    lines.push(CheckLine {
        name: "trace invariants".into(),
        status: match trace.check_invariants() {
            Ok(()) => Status::Held { min_slack: 0.0 },
            Err(detail) => Status::Violated { min_slack: -1.0, detail },
        },
    });
    lines.push(line(&check_theta_rho(instance, &oracle, &trace)?));

    let (l_prime, l_double) = trace.budget_exchange(instance.costs());
    lines.push(match trace.rejection {
        None => CheckLine { name: "budget exchange".into(), status: Status::NotExercised("no rejection".into()) },
        Some(_) if l_prime >= l_double => CheckLine {
            name: "budget exchange".into(),
            status: Status::Held { min_slack: (l_prime - l_double) as f64 },
        },
        Some(_) => CheckLine {
            name: "budget exchange".into(),
            status: Status::Violated {
                min_slack: l_prime as f64 - l_double as f64,
                detail: format!("L'={l_prime} < L''={l_double}"),
            },
        },
    });

    if trace.rejection.is_some() {
        let lemma = check_lemma_bounds(&oracle, &trace, monotone, report)?;
        if trace.w == 0 {
            lines.push(CheckLine { name: "order bound".into(), status: Status::NotExercised("w = 0".into()) });
        } else {
            lines.push(line(&lemma.order_bound));
        }
        lines.push(line(&lemma.iteration_bound));
    } else {
        for name in ["order bound", "iteration bound"] {
            lines.push(CheckLine { name: name.into(), status: Status::NotExercised("no rejection".into()) });
        }
    }

    let g = Contraction::new(instance.function(), trace.s[0].clone())?;
    let contraction_line = match orthant_count(g.ground_size(), g.k()) {
        Some(c) if c <= 1 << 12 => {
            let g_report = Verifier::exhaustive().verify(&g)?;
            let status = if g_report.is_k_submodular() || !report.is_k_submodular() {
                Status::Held { min_slack: 0.0 }
            } else {
                Status::Violated { min_slack: -1.0, detail: g_report.to_string().replace('\n', "; ") }
            };
            CheckLine { name: "contraction k-submodular".into(), status }
        }
        _ => CheckLine { name: "contraction k-submodular".into(), status: Status::NotExercised("too large to tabulate".into()) },
    };
    lines.push(contraction_line);

    Ok(ProofcheckSummary { lines, rejection: trace.rejection.is_some() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_bound_examples() {
        let r = ratio_lower_bound(&[1.0], 1).unwrap();
        assert_eq!((r.lhs, r.bound1), (1.0, 1.0));
        assert!(r.holds(1e-12));
        let r = ratio_lower_bound(&[1.0, 1.0], 2).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert_eq!(r.bound1, 0.75);
        assert!((r.bound2 - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn ratio_bound_rejects_bad_input() {
        assert!(ratio_lower_bound(&[], 1).is_err());
        assert!(ratio_lower_bound(&[0.0, 1.0], 1).is_err());
        assert!(ratio_lower_bound(&[1.0, -1.0], 1).is_err());
        assert!(ratio_lower_bound(&[1.0], 0).is_err());
    }

    #[test]
    fn empty_check_holds_vacuously() {
        let c: InequalityCheck<f64> = InequalityCheck::new("x");
        assert!(c.holds());
        assert_eq!(c.min_slack(), None);
    }
}
