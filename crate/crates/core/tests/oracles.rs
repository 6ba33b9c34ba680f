//! Cross-checks between the symbolic engines and dense linear algebra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fermroute::circuit::{Circuit, Gate};
use fermroute::oracle::{self, DenseOperator};
use fermroute::pauli::{jw_majoranas, Pauli, PauliString, Phase};
use fermroute::random::scrambled_tree;
use fermroute::routing::{compress_contiguous_fanouts, staircase_circuit, StaircasePermutation};
use fermroute::trotter::{clifford_part, emit_trotter_circuit, plan_layers, HamiltonianTerm};
use fermroute::{synthesize_permutation, Hamiltonian, Permutation, StandardKind, TernaryTree};

const TOL: f64 = 1e-10;

fn close(a: &DenseOperator, b: &DenseOperator) -> bool {
    oracle::max_abs_diff(a, b) < TOL
}

fn random_clifford(n: usize, len: usize, rng: &mut impl Rng) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let q = rng.random_range(0..n);
        let mut r = rng.random_range(0..n - 1);
        if r >= q {
            r += 1;
        }
        c.push(match rng.random_range(0..8) {
            0 => Gate::H(q),
            1 => Gate::S(q),
            2 => Gate::Sdg(q),
            3 => Gate::X(q),
            4 => Gate::Z(q),
            5 => Gate::Cnot(q, r),
            6 => Gate::Cz(q, r),
            _ => Gate::Swap(q, r),
        });
    }
    c
}

fn random_pauli(n: usize, rng: &mut impl Rng) -> PauliString {
    let letters = (0..n)
        .map(|_| Pauli::from_bits(rng.random(), rng.random()))
        .collect();
    PauliString::new(Phase::from_power(rng.random_range(0..4)), letters)
}

#[test]
fn conjugation_matches_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..200 {
        let n = rng.random_range(2..=4);
        let c = random_clifford(n, 12, &mut rng);
        let p = random_pauli(n, &mut rng);
        let u = oracle::circuit_unitary(&c).unwrap();
        let want = &u * oracle::pauli_matrix(&p) * u.adjoint();
        let got = oracle::pauli_matrix(&p.conjugate_through(&c).unwrap());
        assert!(close(&got, &want), "{c}\n{p}");
    }
}

#[test]
fn jordan_wigner_majoranas_build_fermion_operators() {
    let n = 4;
    let ops = oracle::fermion_ops(n).unwrap();
    let gammas = jw_majoranas(n);
    let half = Complex64::new(0.5, 0.0);
    let i = Complex64::new(0.0, 1.0);
    for (k, (a, _)) in ops.iter().enumerate() {
        let built = (oracle::pauli_matrix(&gammas[2 * k]) + oracle::pauli_matrix(&gammas[2 * k + 1]) * i) * half;
        assert!(close(&built, a), "mode {k}");
    }
}

#[test]
fn canonical_anticommutation() {
    let n = 3;
    let ops = oracle::fermion_ops(n).unwrap();
    let dim = 1 << n;
    let id: DenseOperator = DMatrix::identity(dim, dim);
    for (j, (aj, adj)) in ops.iter().enumerate() {
        for (k, (ak, _)) in ops.iter().enumerate() {
            let anti = aj * ak + ak * aj;
            assert!(anti.norm() < TOL);
            let mixed = ak * adj + adj * ak;
            let want = if j == k { id.clone() } else { DMatrix::zeros(dim, dim) };
            assert!(close(&mixed, &want), "({j},{k})");
        }
    }
}

#[test]
fn permutation_unitary_conjugates_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let n = 4;
    let ops = oracle::fermion_ops(n).unwrap();
    for _ in 0..20 {
        let sigma = Permutation::random(n, &mut rng);
        let u = oracle::permutation_unitary(&sigma).unwrap();
        for k in 0..n {
            let moved = &u * &ops[k].0 * u.adjoint();
            assert!(close(&moved, &ops[sigma.apply(k)].0));
        }
        assert!((u[(0, 0)].re - 1.0).abs() < TOL);
    }
}

#[test]
fn fanout_expansion_is_product_of_cz() {
    let fan = Circuit::from_gates(
        4,
        vec![Gate::CzFanout {
            control: 0,
            targets: vec![1, 2, 3],
        }],
    )
    .unwrap();
    let cz = Circuit::from_gates(4, vec![Gate::Cz(0, 1), Gate::Cz(0, 2), Gate::Cz(0, 3)]).unwrap();
    assert!(close(
        &oracle::circuit_unitary(&fan.expand_macros()).unwrap(),
        &oracle::circuit_unitary(&cz).unwrap()
    ));
}

#[test]
fn compressed_fanouts_match_their_product() {
    // three fanouts with overlapping contiguous ranges on eight qubits
    let fanouts = vec![
        Gate::CzFanout { control: 0, targets: vec![2, 3, 4] },
        Gate::CzFanout { control: 1, targets: vec![3, 4, 5, 6] },
        Gate::CzFanout { control: 7, targets: vec![4, 5] },
    ];
    let naive = Circuit::from_gates(8, fanouts.clone()).unwrap().expand_macros();
    let compressed = compress_contiguous_fanouts(&fanouts, 8).unwrap().expand_macros();
    assert!(close(
        &oracle::circuit_unitary(&compressed).unwrap(),
        &oracle::circuit_unitary(&naive).unwrap()
    ));
}

#[test]
fn staircase_equals_product_of_fswaps() {
    let n = 8;
    let s = StaircasePermutation::new(vec![(0, 4), (2, 6), (3, 7)]).unwrap();
    let mut want = DMatrix::identity(1 << n, 1 << n);
    for &(i, j) in s.pairs() {
        want = oracle::fswap_matrix(i, j, n).unwrap() * want;
    }
    let got = oracle::circuit_unitary(&staircase_circuit(&s, n).unwrap()).unwrap();
    assert!(close(&got, &want));
}

#[test]
fn random_permutations_at_seven_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..30 {
        let sigma = Permutation::random(7, &mut rng);
        let got = oracle::circuit_unitary(&synthesize_permutation(&sigma)).unwrap();
        assert!(close(&got, &oracle::permutation_unitary(&sigma).unwrap()));
    }
}

#[test]
fn standard_and_scrambled_trees_preserve_products() {
    for kind in [StandardKind::JordanWigner, StandardKind::Parity, StandardKind::BravyiKitaev] {
        for n in 1..=6 {
            let t = TernaryTree::standard(kind, n).unwrap();
            assert!(t.is_product_preserving(8).unwrap(), "{kind:?} {n}");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..20 {
        let t = scrambled_tree(5, 30, &mut rng);
        assert!(t.is_product_preserving(8).unwrap());
    }
}

#[test]
fn encoder_maps_jordan_wigner_to_tree_strings() {
    // U φ_JW(γ) U† = φ_tree(γ)
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let t = scrambled_tree(4, 25, &mut rng);
    let u = oracle::encoder_unitary(&t).unwrap();
    let jw = jw_majoranas(4);
    for (g, s) in t.majorana_strings().iter().take(8).enumerate() {
        let moved = &u * oracle::pauli_matrix(&jw[g]) * u.adjoint();
        assert!(close(&moved, &oracle::pauli_matrix(s)), "Majorana {g}");
    }
}

#[test]
fn trotter_routing_merges_to_identity() {
    let h = Hamiltonian {
        num_modes: 6,
        terms: vec![
            HamiltonianTerm::Hopping { i: 0, j: 4, coeff: 1.0 },
            HamiltonianTerm::Hopping { i: 1, j: 5, coeff: 1.0 },
            HamiltonianTerm::Density { i: 0, j: 2, coeff: 0.5 },
            HamiltonianTerm::Quartic { i: 1, j: 3, k: 4, m: 5, coeff: 0.2 },
        ],
    };
    let plan = plan_layers(&h).unwrap();
    assert!(plan.adjacency_holds(&h));
    let c = emit_trotter_circuit(&plan, &h, 0.3);
    let clifford = oracle::circuit_unitary(&clifford_part(&c)).unwrap();
    assert!(close(&clifford, &DMatrix::identity(64, 64)));
    // each merged step routes exactly its own permutation
    let mut acc = Permutation::identity(6);
    for (l, step) in plan.merged_routing.iter().enumerate() {
        let u = oracle::circuit_unitary(&step.circuit).unwrap();
        assert!(close(&u, &oracle::permutation_unitary(&step.permutation).unwrap()));
        acc = acc.then(&step.permutation);
        if let Some(layer) = plan.layers.get(l) {
            assert_eq!(acc, layer.sigma);
        }
    }
    assert!(acc.is_identity());
}
