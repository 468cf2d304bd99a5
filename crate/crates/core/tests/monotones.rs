mod common;

use common::*;
use magicsim::dense_oracle::product_density;
use magicsim::monotones::{
    equimagical_decompose, extent_pure_1q, lambda_plus_1q, monotone_ladder_check, robustness_1q, robustness_lp,
    special_states, stab_norm_1q, BlochState,
};
use magicsim::parallel::sample_rng;
use proptest::prelude::*;

fn py_state() -> impl Strategy<Value = BlochState<f64>> {
    (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.3f64..=1.0).prop_filter_map("non-stabilizer P_Y state", |(x, y, z, r)| {
        let y = y * x.min(z);
        let n = (x * x + y * y + z * z).sqrt();
        if n < 1e-3 {
            return None;
        }
        let s = BlochState::new(x / n * r, y / n * r, z / n * r).ok()?;
        (s.l1() > 1.0 + 1e-6).then_some(s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn equimagical_parts_share_the_extent(s in py_state()) {
        let dec = equimagical_decompose(&s).unwrap();
        let lp = lambda_plus_1q(&s).0;
        prop_assert!((dec.common_extent - lp).abs() < 1e-8);
        let r = dec.reconstruct();
        prop_assert!((r.bx - s.bx).abs() < 1e-9 && (r.by - s.by).abs() < 1e-9 && (r.bz - s.bz).abs() < 1e-9);
        let total: f64 = dec.parts.iter().map(|p| p.0).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let special = special_states(s.f()).unwrap();
        let is_special = |b: &BlochState<f64>| {
            special.iter().any(|t| (t.bx - b.bx).abs() + (t.by - b.by).abs() + (t.bz - b.bz).abs() < 1e-9)
        };
        for (_, part) in &dec.parts {
            prop_assert!(part.is_pure(1e-9));
            // Outside the special-state triangle the parts are the pair Φ±, which stay in P_Y.
            prop_assert!(is_special(part) || part.in_py(1e-9), "part {part:?} leaves P_Y");
            let xi = extent_pure_1q(part).unwrap().xi;
            prop_assert!((xi - dec.common_extent).abs() < 1e-7, "{xi} vs {}", dec.common_extent);
        }
    }

    #[test]
    fn single_qubit_ladder(s in py_state()) {
        let lp = lambda_plus_1q(&s).0;
        let r = robustness_1q(&s);
        prop_assert!(lp >= 1.0 && lp <= stab_norm_1q(&s).max(lp));
        prop_assert!(r >= 2.0 * lp - 1.0 - 1e-9);
        prop_assert!(r >= (1.0 + 2f64.sqrt()) * lp - 2f64.sqrt() - 1e-9);
    }
}

#[test]
fn lp_brackets_two_h_states() {
    let h = BlochState::<f64>::h_state();
    let lp = robustness_lp(&product_density(&[h.to_array(); 2]).unwrap()).unwrap();
    let d2 = stab_norm_1q(&h).powi(2);
    assert!(lp.value >= d2 - 1e-7 && lp.value <= 2.0 + 1e-7, "R = {}", lp.value);
    assert!(lp.gap.abs() <= 1e-7);
    assert!(lp.witness_max <= 1.0 + 1e-7);
}

#[test]
fn lp_matches_closed_form_on_one_qubit() {
    let mut rng = sample_rng(50, 0);
    for _ in 0..30 {
        let s = random_bloch(false, &mut rng);
        let lp = robustness_lp(&product_density(&[s.to_array()]).unwrap()).unwrap();
        assert!((lp.value - robustness_1q(&s)).abs() < 1e-7);
    }
}

#[test]
fn ladder_on_random_products() {
    let mut rng = sample_rng(51, 0);
    for i in 0..60 {
        let n = 1 + i % 2;
        let states: Vec<BlochState<f64>> = (0..n).map(|_| random_bloch(false, &mut rng)).collect();
        let rep = monotone_ladder_check(&states).unwrap();
        assert!(rep.holds(1e-9), "{rep:?}");
    }
}
