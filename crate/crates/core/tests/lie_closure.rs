use qwl_core::liealg::{
    conjugation_invariance_residual, example_closure, generators, lie_closure, member_residual,
    DEFAULT_TOL,
};
use qwl_core::limits::{
    effective_hamiltonian, evencyc_protocol, strauch_protocol, Protocol, ProtocolStep,
};
use qwl_core::numerics::{c, commutator, CMatrix};
use qwl_core::random::{random_skew_hermitian, rng};
use qwl_core::walks::{cycle_walk, example_walk, lattice_walk};
use rand::seq::SliceRandom;
use rand::Rng;

#[test]
fn closure_is_idempotent() {
    for w in [
        example_walk(),
        cycle_walk(4).unwrap(),
        cycle_walk(6).unwrap(),
    ] {
        let basis = lie_closure(&generators(&w), DEFAULT_TOL).unwrap();
        let again = lie_closure(basis.elements(), DEFAULT_TOL).unwrap();
        assert_eq!(again.dimension(), basis.dimension());
    }
}

#[test]
fn closure_ignores_generator_order() {
    let mut r = rng(5);
    for w in [example_walk(), cycle_walk(4).unwrap()] {
        let mut gens = generators(&w);
        let want = lie_closure(&gens, DEFAULT_TOL).unwrap().dimension();
        for _ in 0..5 {
            gens.shuffle(&mut r);
            assert_eq!(lie_closure(&gens, DEFAULT_TOL).unwrap().dimension(), want);
        }
    }
}

#[test]
fn brackets_stay_inside() {
    let basis = example_closure();
    let els = basis.elements();
    let mut r = rng(9);
    for _ in 0..50 {
        let (i, j) = (r.gen_range(0..els.len()), r.gen_range(0..els.len()));
        let bracket = commutator(&els[i], &els[j]).unwrap();
        assert!(member_residual(&basis, &bracket).unwrap() <= 1e-7);
    }
}

#[test]
fn generators_are_contained() {
    for w in [
        example_walk(),
        cycle_walk(5).unwrap(),
        cycle_walk(8).unwrap(),
    ] {
        let gens = generators(&w);
        let basis = lie_closure(&gens, DEFAULT_TOL).unwrap();
        for g in &gens {
            assert!(member_residual(&basis, g).unwrap() <= 1e-9);
        }
    }
}

#[test]
fn dimensions_are_stable_across_tolerances() {
    for (w, want) in [
        (example_walk(), 33),
        (cycle_walk(4).unwrap(), 7),
        (cycle_walk(8).unwrap(), 13),
    ] {
        for tol in [1e-10, 1e-9, 1e-8] {
            assert_eq!(lie_closure(&generators(&w), tol).unwrap().dimension(), want);
        }
    }
}

#[test]
fn effective_hamiltonians_are_simulable() {
    let minus_i = c(0.0, -1.0);
    for n in [4, 6, 8] {
        let basis = lie_closure(&generators(&cycle_walk(n).unwrap()), DEFAULT_TOL).unwrap();
        for p in [strauch_protocol(n).unwrap(), evencyc_protocol(n).unwrap()] {
            let x = effective_hamiltonian(&p).scale(minus_i);
            assert!(member_residual(&basis, &x).unwrap() <= 1e-7);
        }
    }
    let basis = example_closure();
    let mut r = rng(77);
    for _ in 0..10 {
        let steps = (0..2)
            .map(|_| {
                ProtocolStep::new(CMatrix::identity(3), random_skew_hermitian(&mut r, 3), 1.0)
                    .unwrap()
            })
            .collect();
        let p = Protocol::atom(example_walk(), steps).unwrap();
        let x = effective_hamiltonian(&p).scale(minus_i);
        assert!(member_residual(&basis, &x).unwrap() <= 1e-7);
    }
}

#[test]
fn closures_are_conjugation_invariant() {
    let walks = [
        example_walk(),
        cycle_walk(3).unwrap(),
        cycle_walk(8).unwrap(),
        lattice_walk(3, 2).unwrap(),
    ];
    for w in walks {
        let basis = lie_closure(&generators(&w), DEFAULT_TOL).unwrap();
        assert!(conjugation_invariance_residual(&basis, &w).unwrap() <= 1e-8);
    }
}
