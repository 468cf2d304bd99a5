mod common;

use common::*;
use magicsim::channels::{dyadic_decompose_1q, dyadic_decompose_product};
use magicsim::dense_oracle::{completeness_violation, expand, product_density, DenseOp};
use magicsim::dyadic_sim::{estimate_born, run_samples, sample_count};
use magicsim::monotones::{lambda_plus_1q, product_monotone, BlochState};
use magicsim::parallel::sample_rng;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn reconstruct(states: &[BlochState<f64>]) -> DenseOp {
    let d = dyadic_decompose_product(states).unwrap();
    let mut sum = DenseOp::zeros(states.len()).unwrap();
    for (a, dy) in d.expand_terms(1 << 16).unwrap() {
        sum = sum.add(&expand(&dy.left).unwrap().outer(&expand(&dy.right).unwrap()).scale(a));
    }
    sum
}

fn bloch() -> impl Strategy<Value = BlochState<f64>> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, any::<bool>()).prop_filter_map("inside the ball", |(x, y, z, pure)| {
        let r = (x * x + y * y + z * z).sqrt();
        if r > 1.0 || r < 1e-6 {
            return None;
        }
        let s = if pure { 1.0 / r } else { 1.0 };
        BlochState::new(x * s, y * s, z * s).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_decomposition_reproduces_density(states in prop::collection::vec(bloch(), 1..=3)) {
        let arrs: Vec<[f64; 3]> = states.iter().map(|s| s.to_array()).collect();
        let err = reconstruct(&states).max_abs_diff(&product_density(&arrs).unwrap());
        prop_assert!(err < 1e-10, "error {err}");
    }

    #[test]
    fn decomposition_weight_is_the_product_monotone(states in prop::collection::vec(bloch(), 1..=4)) {
        let d = dyadic_decompose_product(&states).unwrap();
        let want = product_monotone(&states);
        prop_assert!((d.l1() - want).abs() < 1e-9 * want, "{} vs {}", d.l1(), want);
    }

    #[test]
    fn single_qubit_weight_matches_generalized_robustness(s in bloch()) {
        let b = dyadic_decompose_1q(&s).unwrap();
        prop_assert!((b.l1() - lambda_plus_1q(&s).0).abs() < 1e-9);
    }
}

#[test]
fn library_channels_are_trace_preserving() {
    let mut rng = sample_rng(21, 0);
    for _ in 0..200 {
        let n = rng.gen_range(1..=3);
        let ch = random_channel(n, &mut rng);
        assert!(completeness_violation(&ch).unwrap() < 1e-10);
    }
}

#[test]
fn single_samples_are_unbiased() {
    // 4σ from the empirical spread; the run is deterministic, so this is a regression check too.
    for f in 0..12u64 {
        let fx = random_fixture(&mut sample_rng(500, f));
        let m = 40_000;
        let st = run_samples(&fx.decomp, &fx.circuit, &fx.obs, m, f, None).unwrap();
        let mean = st.mean();
        let var = st.sum_sq / m as f64 - mean * mean;
        let sigma = (var / m as f64).sqrt();
        assert!((mean - fx.exact).abs() <= 4.0 * sigma + 1e-12, "fixture {f}: {mean} vs {} (σ {sigma})", fx.exact);
        assert!(st.max_abs <= fx.decomp.l1() * (1.0 + 1e-12));
    }
}

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let fx = random_fixture(&mut sample_rng(77, 3));
    let a = estimate_born(&fx.decomp, &fx.circuit, &fx.obs, 0.1, 0.05, 5, Some(1)).unwrap();
    let b = estimate_born(&fx.decomp, &fx.circuit, &fx.obs, 0.1, 0.05, 5, Some(4)).unwrap();
    assert_eq!(a.mu_hat.to_bits(), b.mu_hat.to_bits());
    assert_eq!(a.zero_samples, b.zero_samples);
}

#[test]
fn sample_count_formula() {
    let m = sample_count(1.5, 0.02, 0.05).unwrap();
    assert_eq!(m, (2.0 * 2.25 / 0.0004 * 40f64.ln()).ceil() as u64);
    assert!(sample_count(1.0, 0.0, 0.05).is_err());
    assert!(sample_count(1.0, 0.1, 1.0).is_err());
}

#[test]
fn complex_weights_appear_off_the_xz_plane() {
    let b = dyadic_decompose_1q(&BlochState::t_state()).unwrap();
    assert!(b.terms().iter().any(|(a, _)| a.im.abs() > 1e-6));
    let sum: Complex64 = b.terms().iter().map(|(a, d)| a * d.trace()).sum();
    assert!((sum - 1.0).norm() < 1e-12);
}
