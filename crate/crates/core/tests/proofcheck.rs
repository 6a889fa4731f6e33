mod common;

use common::{f1, f2};
use ksubknap::generate::{gen_coverage, gen_expensive_coverage, gen_signed_coverage, CoverageParams, SignedParams};
use ksubknap::proofcheck::{
    build_greedy_trace, build_obar_sequence, build_q_sequence, check_lemma_bounds, check_unconstrained_inequalities,
    ratio_lower_bound, run_proofcheck, Status,
};
use ksubknap::{brute_force_opt, verify, Contraction, KFunction, Oracle, Orthant, Rational, VerifyMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn o(pairs: &[(usize, usize)]) -> Orthant {
    Orthant::from_pairs(2, 2, pairs).unwrap()
}

#[test]
fn q_sequence_examples() {
    let inst = f1::<f64>(3);
    let oracle = Oracle::new(inst.function());
    let q = build_q_sequence(&oracle, &o(&[])).unwrap();
    assert_eq!(q.orthants, vec![o(&[])]);

    let q = build_q_sequence(&oracle, &o(&[(0, 1)])).unwrap();
    assert_eq!(q.orthants, vec![o(&[]), o(&[(0, 1)])]);
    assert_eq!(q.values, vec![0.0, 2.0]);

    // (e1,1) and (e2,2) both reach 2 at ∅; the lower element wins. Then e2
    // gains 1 at either coordinate and takes coordinate 1.
    let q = build_q_sequence(&oracle, &o(&[(0, 1), (1, 2)])).unwrap();
    assert_eq!(q.orthants, vec![o(&[]), o(&[(0, 1)]), o(&[(0, 1), (1, 1)])]);
    assert_eq!(q.values, vec![0.0, 2.0, 3.0]);
}

#[test]
fn obar_sequence_examples() {
    let inst = f1::<f64>(3);
    let oracle = Oracle::new(inst.function());
    let opt = o(&[(0, 1)]);
    let q = build_q_sequence(&oracle, &opt).unwrap();
    let obar = build_obar_sequence(&oracle, &opt, &q).unwrap();
    assert!(obar.orthants.iter().all(|x| *x == opt));

    // o = (∅, {e1}) with q¹ forced to ({e1}, ∅)
    let conflict = o(&[(0, 2)]);
    let q = build_q_sequence(&oracle, &conflict).unwrap();
    assert_eq!(q.orthants[1], o(&[(0, 1)]));
    let obar = build_obar_sequence(&oracle, &conflict, &q).unwrap();
    assert_eq!(obar.orthants[1], o(&[(0, 1)]));

    assert!(build_obar_sequence(&oracle, &o(&[(1, 1)]), &q).is_err());
}

#[test]
fn obar_keeps_support_and_aligns_with_q() {
    for seed in 0..50 {
        let inst = gen_coverage::<f64>(&CoverageParams::new(4, 3, 6), seed).unwrap();
        let oracle = Oracle::new(inst.function());
        for x in Orthant::all(4, 3).step_by(7) {
            let q = build_q_sequence(&oracle, &x).unwrap();
            let obar = build_obar_sequence(&oracle, &x, &q).unwrap();
            for (qj, oj) in q.orthants.iter().zip(&obar.orthants) {
                assert_eq!(oj.support().collect::<Vec<_>>(), x.support().collect::<Vec<_>>());
                assert!(qj.support().all(|e| qj.coord(e) == oj.coord(e)));
            }
        }
    }
}

#[test]
fn unconstrained_inequalities_on_fixtures() {
    let inst = f1::<f64>(2);
    let oracle = Oracle::new(inst.function());
    let report = verify(inst.function(), VerifyMode::Exhaustive).unwrap();
    let opt = brute_force_opt(&inst).unwrap().orthant;
    let check = check_unconstrained_inequalities(&oracle, &opt, true, &report).unwrap();
    assert!(check.holds(), "{check:?}");

    let inst = f2::<Rational>(3);
    let oracle = Oracle::new(inst.function());
    let report = verify(inst.function(), VerifyMode::Exhaustive).unwrap();
    let opt = brute_force_opt(&inst).unwrap().orthant;
    assert!(check_unconstrained_inequalities(&oracle, &opt, false, &report).unwrap().holds());
    assert!(check_unconstrained_inequalities(&oracle, &opt, true, &report).is_err());

    let empty = check_unconstrained_inequalities(&oracle, &o(&[]), false, &report).unwrap();
    assert!(empty.per_step.slacks.is_empty());
}

#[test]
fn f1_trace_rejects_e2() {
    let inst = f1::<f64>(2);
    let oracle = Oracle::new(inst.function());
    // ties among value-2 optima go to the smallest index: (∅, {e2})
    let opt = brute_force_opt(&inst).unwrap().orthant;
    assert_eq!(opt, o(&[(1, 2)]));
    let trace = build_greedy_trace(&inst, &oracle, &opt, 0).unwrap().unwrap();
    assert_eq!(trace.picks, vec![(0, 1)]);
    let rej = trace.rejection.unwrap();
    assert_eq!((rej.element, rej.coord), (1, 2));
    assert!(trace.o[0].is_empty());
    trace.check_invariants().unwrap();
    let (l1, l2) = trace.budget_exchange(inst.costs());
    assert!(l1 >= l2);

    assert!(build_greedy_trace(&inst, &oracle, &opt, 2).unwrap().is_none());
}

#[test]
fn crafted_instances_exercise_rejections() {
    let mut rejections = 0;
    for seed in 0..60 {
        let inst = gen_expensive_coverage::<f64>(4, 2, seed).unwrap();
        let report = verify(inst.function(), VerifyMode::Exhaustive).unwrap();
        let opt = brute_force_opt(&inst).unwrap().orthant;
        let summary = run_proofcheck(&inst, &opt, 1, &report).unwrap();
        assert!(summary.passed(), "seed {seed}:\n{summary}");
        if summary.rejection {
            rejections += 1;
            let oracle = Oracle::new(inst.function());
            let trace = build_greedy_trace(&inst, &oracle, &opt, 1).unwrap().unwrap();
            assert!(trace.p() >= 1);
            assert!(check_lemma_bounds(&oracle, &trace, true, &report).unwrap().holds());
        }
    }
    assert!(rejections >= 30, "only {rejections} of 60 crafted instances rejected");
}

#[test]
fn lemma_bounds_refuse_traces_without_rejection() {
    let inst = f1::<f64>(3);
    let oracle = Oracle::new(inst.function());
    let report = verify(inst.function(), VerifyMode::Exhaustive).unwrap();
    let opt = brute_force_opt(&inst).unwrap().orthant;
    let trace = build_greedy_trace(&inst, &oracle, &opt, 0).unwrap().unwrap();
    assert!(trace.rejection.is_none());
    assert!(check_lemma_bounds(&oracle, &trace, true, &report).is_err());
}

#[test]
fn random_instances_pass_every_check() {
    for seed in 0..40 {
        let (n, k) = (3 + (seed as usize % 3), 1 + (seed as usize % 3));
        let inst = gen_coverage::<f64>(&CoverageParams::new(n, k, 6), seed).unwrap();
        let report = verify(inst.function(), VerifyMode::Exhaustive).unwrap();
        let opt = brute_force_opt(&inst).unwrap().orthant;
        for w in 0..=2 {
            let summary = run_proofcheck(&inst, &opt, w, &report).unwrap();
            assert!(summary.passed(), "seed {seed} w {w}:\n{summary}");
        }
    }
    for seed in 0..20 {
        let p = SignedParams::new(CoverageParams::new(4, 2, 6), 2.0);
        let inst = gen_signed_coverage::<Rational>(&p, seed).unwrap();
        let report = verify(inst.function(), VerifyMode::Exhaustive).unwrap();
        assert!(!report.is_monotone());
        let opt = brute_force_opt(&inst).unwrap().orthant;
        for w in 0..=2 {
            let summary = run_proofcheck(&inst, &opt, w, &report).unwrap();
            assert!(summary.passed(), "seed {seed} w {w}:\n{summary}");
            let exercised = summary.lines.iter().filter(|l| !matches!(l.status, Status::NotExercised(_))).count();
            assert!(exercised >= 2);
        }
    }
}

#[test]
fn contraction_stays_k_submodular() {
    for seed in 0..20 {
        let p = SignedParams::new(CoverageParams::new(4, 2, 6), 1.5);
        let inst = gen_signed_coverage::<f64>(&p, seed).unwrap();
        for anchor in Orthant::all(4, 2).step_by(5) {
            let g = Contraction::new(inst.function(), anchor.clone()).unwrap();
            let r = verify(&g, VerifyMode::Exhaustive).unwrap();
            assert!(r.is_k_submodular(), "anchor {anchor}: {r}");
            assert_eq!(g.value(&g.restrict(&anchor)), 0.0);
        }
    }
}

#[test]
fn ratio_bound_examples_and_random_inputs() {
    let r = ratio_lower_bound(&[1.0], 1).unwrap();
    assert_eq!((r.lhs, r.bound1), (1.0, 1.0));
    let r = ratio_lower_bound(&[1.0, 1.0], 2).unwrap();
    assert_eq!((r.lhs, r.bound1), (1.0, 0.75));
    assert!((r.bound2 - 0.632_120_558_828_557_7).abs() < 1e-15);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let a = rng.random_range(1..=20);
        let b = rng.random_range(1..=20u32);
        let mut rhos: Vec<f64> = (0..a).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..10.0) }).collect();
        rhos[0] = rng.random_range(0.01..10.0);
        let r = ratio_lower_bound(&rhos, b).unwrap();
        assert!(r.holds(1e-12), "{rhos:?} B={b}: {r:?}");
        assert!(r.bound1 >= r.bound2 - 1e-12);
    }
}
