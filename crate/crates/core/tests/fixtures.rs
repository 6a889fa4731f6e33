mod common;

use common::{f1, f2, supermodular_table};
use ksubknap::exact::brute_force_opt_with_cap;
use ksubknap::solver::{best_density_pair, enumerate_seeds, greedy_extend};
use ksubknap::{
    brute_force_opt, solve, verify, FunctionSpec, Instance, Oracle, Orthant, Rational, SolverConfig, Table,
    VerifyMode, Witness,
};

fn o(pairs: &[(usize, usize)]) -> Orthant {
    Orthant::from_pairs(2, 2, pairs).unwrap()
}

#[test]
fn singleton_and_join() {
    assert_eq!(Orthant::singleton(2, 2, 0, 1).unwrap(), o(&[(0, 1)]));
    assert_eq!(Orthant::singleton(2, 2, 0, 2).unwrap(), o(&[(0, 2)]));
    assert!(Orthant::singleton(2, 2, 0, 3).is_err());
    assert_eq!(o(&[(0, 1)]).join(&o(&[(0, 2)])).unwrap(), o(&[]));
    assert_eq!(o(&[(0, 1)]).join(&o(&[(1, 2)])).unwrap(), o(&[(0, 1), (1, 2)]));
    let x = o(&[(0, 1), (1, 2)]);
    assert_eq!(x.join(&x).unwrap(), x);
}

#[test]
fn f1_values_and_gains() {
    let inst = f1::<f64>(2);
    let oracle = Oracle::new(inst.function());
    assert_eq!(oracle.evaluate(&o(&[])).unwrap(), 0.0);
    assert_eq!(oracle.evaluate(&o(&[(0, 1), (1, 2)])).unwrap(), 3.0);
    assert_eq!(oracle.marginal_gain(&o(&[(0, 1)]), 1, 2).unwrap(), 1.0);
    assert_eq!(oracle.marginal_gain(&o(&[]), 0, 1).unwrap(), 2.0);
    assert_eq!(oracle.calls(), 2 + 2 + 2);
}

#[test]
fn f2_values_and_gains() {
    let inst = f2::<Rational>(2);
    let oracle = Oracle::new(inst.function());
    assert_eq!(oracle.evaluate(&o(&[(0, 1)])).unwrap(), Rational::new(1, 2));
    assert_eq!(oracle.marginal_gain(&o(&[(1, 2)]), 0, 1).unwrap(), Rational::new(-1, 2));
}

#[test]
fn verifier_on_fixtures() {
    let r = verify(f1::<f64>(2).function(), VerifyMode::Exhaustive).unwrap();
    assert!(r.orthant_submodular.holds() && r.pairwise_monotone.holds());
    assert!(r.k_submodular.holds() && r.monotone.holds());

    let r = verify(f2::<Rational>(2).function(), VerifyMode::Exhaustive).unwrap();
    assert!(r.k_submodular.holds() && r.characterization_consistent());
    match r.monotone.witness() {
        Some(Witness::Monotone { x, element, coord, .. }) => {
            assert_eq!((x.clone(), *element, *coord), (o(&[(1, 2)]), 0, 1));
        }
        other => panic!("expected monotonicity witness, got {other:?}"),
    }

    let r = verify(&supermodular_table(), VerifyMode::Exhaustive).unwrap();
    match r.orthant_submodular.witness() {
        Some(Witness::OrthantSubmodular { lhs, rhs, .. }) => assert!(lhs < rhs),
        other => panic!("expected orthant-submodularity witness, got {other:?}"),
    }
    assert!(r.k_submodular.fails() && r.characterization_consistent());
}

#[test]
fn zero_bonuses_reduce_to_coverage() {
    let base = common::f1_coverage::<f64>();
    let signed = ksubknap::SignedCoverage::new(base.clone(), vec![vec![0.0; 2]; 2]).unwrap();
    for x in Orthant::all(2, 2) {
        assert_eq!(ksubknap::KFunction::value(&signed, &x), ksubknap::KFunction::value(&base, &x));
    }
    assert!(ksubknap::SignedCoverage::new(base, vec![vec![-2.0, 1.0], vec![0.0, 0.0]]).is_err());
}

#[test]
fn density_pair_tie_break() {
    let inst = f1::<f64>(2);
    let oracle = Oracle::new(inst.function());
    let c = best_density_pair(&oracle, &o(&[]), &[0, 1], inst.costs()).unwrap().unwrap();
    assert_eq!((c.element, c.coord, c.density), (0, 1, 2.0));
    // both coordinates of e2 gain 1 at cost 2; the lower coordinate wins
    let c = best_density_pair(&oracle, &o(&[(0, 1)]), &[1], inst.costs()).unwrap().unwrap();
    assert_eq!((c.element, c.coord, c.density), (1, 1, 0.5));
    assert!(best_density_pair(&oracle, &o(&[]), &[], inst.costs()).unwrap().is_none());
}

#[test]
fn greedy_extension() {
    let inst = f1::<f64>(2);
    let oracle = Oracle::new(inst.function());
    let run = greedy_extend(&inst, &oracle, &o(&[])).unwrap();
    assert_eq!(run.result, o(&[(0, 1)]));
    assert_eq!(run.value, 2.0);
    assert_eq!(run.steps.len(), 2);
    assert!(run.steps[0].accepted && run.steps[0].gain == 2.0);
    assert!(!run.steps[1].accepted && run.steps[1].element == 1);

    let inst3 = f1::<f64>(3);
    let oracle3 = Oracle::new(inst3.function());
    assert_eq!(greedy_extend(&inst3, &oracle3, &o(&[])).unwrap().value, 3.0);

    let inst1 = f1::<f64>(1);
    let oracle1 = Oracle::new(inst1.function());
    assert!(greedy_extend(&inst1, &oracle1, &o(&[(1, 1)])).is_err());
}

#[test]
fn seed_enumeration() {
    let inst = f1::<f64>(2);
    let zero: Vec<_> = enumerate_seeds(inst.costs(), 2, 0).collect();
    assert_eq!(zero, vec![o(&[])]);
    let one: Vec<_> = enumerate_seeds(inst.costs(), 2, 1).collect();
    assert_eq!(one, vec![o(&[(0, 1)]), o(&[(0, 2)]), o(&[(1, 1)]), o(&[(1, 2)])]);
    assert_eq!(enumerate_seeds(inst.costs(), 2, 2).count(), 0);
}

#[test]
fn solve_examples() {
    let inst = f1::<f64>(2);
    let r = solve(&inst, &SolverConfig::monotone().with_w(0)).unwrap();
    assert_eq!(r.value, 2.0);
    let r = solve(&inst, &SolverConfig::monotone().with_w(4)).unwrap();
    assert_eq!(r.value, 2.0);
    assert_eq!(r.value, brute_force_opt(&inst).unwrap().value);

    let t = Table::new(1, 2, vec![0.0, 3.0, 1.0]).unwrap();
    let single = Instance::with_default_ids(ksubknap::CostVector::new(vec![1], 1).unwrap(), FunctionSpec::Table(t)).unwrap();
    let r = solve(&single, &SolverConfig::monotone().with_w(0)).unwrap();
    assert_eq!(r.value, 3.0);
    assert_eq!(r.solution, Orthant::from_pairs(1, 2, &[(0, 1)]).unwrap());
}

#[test]
fn brute_force_examples() {
    assert_eq!(brute_force_opt(&f1::<f64>(2)).unwrap().value, 2.0);
    let zero = brute_force_opt(&f1::<f64>(0)).unwrap();
    assert_eq!((zero.value, zero.orthant.is_empty()), (0.0, true));
    let full = brute_force_opt_with_cap(&f1::<f64>(3), Some(2), 1 << 10).unwrap().unwrap();
    assert_eq!(full.value, 3.0);
    assert_eq!(full.feasible, 4);
}

#[test]
fn table_round_trip_and_mutation() {
    let inst = f1::<f64>(2);
    let tab = ksubknap::generate::gen_table(&inst, 1 << 10).unwrap();
    let FunctionSpec::Table(t) = tab.function() else { panic!("not a table") };
    assert_eq!(t.values().len(), 9);
    for x in Orthant::all(2, 2) {
        assert_eq!(t.get(&x), ksubknap::KFunction::value(inst.function(), &x));
    }
    assert_eq!(ksubknap::generate::gen_table(&tab, 1 << 10).unwrap(), tab);

    // raise f((e1→1, e2→1)) until the verifier objects
    let target = o(&[(0, 1), (1, 1)]);
    let mut mutated = t.clone();
    let mut bump = 0.0;
    let report = loop {
        bump += 0.5;
        mutated.set(&target, t.get(&target) + bump).unwrap();
        let r = verify(&mutated, VerifyMode::Exhaustive).unwrap();
        if r.k_submodular.fails() {
            break r;
        }
        assert!(bump < 10.0, "mutation never broke k-submodularity");
    };
    assert!(report.k_submodular_failures().count() > 0);
    assert!(report.characterization_consistent());
}
