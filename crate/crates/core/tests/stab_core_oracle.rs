mod common;

use common::*;
use magicsim::dense_oracle::{equatorial_vector, DenseVec};
use magicsim::stab_core::{EquatorialMatrix, Gate, StabState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_clifford_circuits_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let mut st = StabState::zero(n).unwrap();
        let mut dv = DenseVec::basis(n, 0).unwrap();
        for g in random_circuit(n, 50, &mut rng) {
            st = st.apply_gate(g).unwrap();
            dv.apply_gate(g).unwrap();
            let err = dense(&st).max_abs_diff(&dv);
            assert!(err < 1e-10, "gate {g}: error {err}");
        }
    }
}

#[test]
fn projections_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let n = rng.gen_range(1..=5);
        let st = random_state(n, &mut rng);
        let p = random_pauli(n, &mut rng);
        let sign = if rng.gen() { 1 } else { -1 };
        let (out, norm) = st.project_pauli(&p, sign).unwrap();
        let dv = dense(&st).project_pauli(&p, sign).unwrap();
        assert!(dense(&out).max_abs_diff(&dv) < 1e-10);
        assert!((norm - dv.norm_sqr().sqrt()).abs() < 1e-10);
        assert_eq!(out.is_null(), norm == 0.0);
    }
}

#[test]
fn inner_products_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..300 {
        let n = rng.gen_range(1..=4);
        let a = random_state(n, &mut rng);
        let b = random_state(n, &mut rng);
        let ip = a.inner_product(&b).unwrap();
        let expected = dense(&a).dot(&dense(&b));
        assert!((ip - expected).norm() < 1e-10, "{ip} vs {expected}");
    }
}

#[test]
fn equatorial_overlaps_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let n = rng.gen_range(1..=3);
        let st = random_state(n, &mut rng);
        let a = EquatorialMatrix::random(n, &mut rng);
        let ov = st.equatorial_overlap(&a).unwrap();
        let expected = equatorial_vector(&a).unwrap().dot(&dense(&st));
        assert!((ov - expected).norm() < 1e-10);
    }
}

#[test]
fn tensor_product_matches_kron() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..50 {
        let a = random_state(2, &mut rng);
        let b = random_state(3, &mut rng);
        let t = a.tensor(&b).unwrap();
        let expected = dense(&a).kron(&dense(&b)).unwrap();
        assert!(dense(&t).max_abs_diff(&expected) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_inner_products(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_state(n, &mut rng);
        let b = random_state(n, &mut rng);
        let g = random_gate(n, &mut rng);
        let before = a.inner_product(&b).unwrap();
        let after = a.apply_gate(g).unwrap().inner_product(&b.apply_gate(g).unwrap()).unwrap();
        prop_assert!((before - after).norm() < 1e-10);
        prop_assert!((a.apply_gate(g).unwrap().norm() - a.norm()).abs() < 1e-12);
    }

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random_state(n, &mut rng);
        let p = random_pauli(n, &mut rng);
        let (once, _) = st.project_pauli(&p, 1).unwrap();
        let (twice, norm2) = once.project_pauli(&p, 1).unwrap();
        if !once.is_null() {
            prop_assert_eq!(norm2, 1.0);
            prop_assert!(dense(&once).max_abs_diff(&dense(&twice)) < 1e-12);
        }
    }

    #[test]
    fn projection_norms_are_complete(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random_state(n, &mut rng);
        let p = random_pauli(n, &mut rng);
        let (_, plus) = st.project_pauli(&p, 1).unwrap();
        let (_, minus) = st.project_pauli(&p, -1).unwrap();
        prop_assert!((plus * plus + minus * minus - 1.0).abs() < 1e-10);
    }

    #[test]
    fn projection_never_increases_amplitude(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random_state(n, &mut rng).apply_gate(Gate::H(0)).unwrap();
        let p = random_pauli(n, &mut rng);
        let (out, _) = st.project_pauli(&p, -1).unwrap();
        prop_assert!(out.norm() <= st.norm() + 1e-15);
    }
}
