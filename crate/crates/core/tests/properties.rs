//! Property tests driven by proptest over seeds and dimensions. Matrix
//! arithmetic is compared against naive loops.

use num_complex::Complex64;
use proptest::prelude::*;
use qme::ensembles::{ginibre_square, random_effect, random_observable, random_state, RngSeed};
use qme::interchange::{parse_observable, parse_state, to_json};
use qme::{
    coarse_grain, effect_entropy, effect_entropy_bounds, luders_operation, observable_entropy,
    sequential_product_effect, von_neumann_entropy, CoarseGraining, ComplexMatrix, Effect, TraceOut,
};

fn naive_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| a.get(i, k) * b.get(k, j)).sum())
}

fn naive_kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = (a.dim(), b.dim());
    ComplexMatrix::from_fn(m * n, |r, c| a.get(r / n, c / n) * b.get(r % n, c % n))
}

fn seed_and_dim() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 2usize..=5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_match_naive_loops((seed, d) in seed_and_dim()) {
        let mut rng = RngSeed(seed).rng();
        let a = ginibre_square(d, &mut rng);
        let b = ginibre_square(d, &mut rng);
        prop_assert!((&a * &b).max_abs_diff(&naive_mul(&a, &b)) < 1e-12);
        let c = ginibre_square(2, &mut rng);
        prop_assert!(a.kron(&c).max_abs_diff(&naive_kron(&a, &c)) < 1e-15);
    }

    #[test]
    fn partial_traces_of_products((seed, d) in seed_and_dim()) {
        let mut rng = RngSeed(seed).rng();
        let a = ginibre_square(d, &mut rng);
        let b = ginibre_square(3, &mut rng);
        let ab = a.kron(&b);
        let left = ab.partial_trace(d, 3, TraceOut::Left).unwrap();
        let right = ab.partial_trace(d, 3, TraceOut::Right).unwrap();
        prop_assert!(left.max_abs_diff(&b.scale_complex(a.trace())) < 1e-11);
        prop_assert!(right.max_abs_diff(&a.scale_complex(b.trace())) < 1e-11);
    }

    #[test]
    fn square_root_squares_back((seed, d) in seed_and_dim()) {
        let mut rng = RngSeed(seed).rng();
        let a = random_effect(d, &mut rng).unwrap();
        let r = a.matrix().psd_sqrt().unwrap();
        prop_assert!((&r * &r).max_abs_diff(a.matrix()) < 1e-10);
        prop_assert!(r.hermitian_deviation() < 1e-12);
    }

    #[test]
    fn effect_entropy_within_bounds((seed, d) in seed_and_dim(), rank in 1usize..=5) {
        let mut rng = RngSeed(seed).rng();
        let rho = random_state(d, rank.min(d), &mut rng).unwrap();
        let a = random_effect(d, &mut rng).unwrap();
        let s = effect_entropy(&a, &rho).unwrap().nats();
        let b = effect_entropy_bounds(&a, &rho).unwrap();
        prop_assert!(b.lower <= s + 1e-9 && s <= b.upper + 1e-9, "{} ≤ {} ≤ {}", b.lower, s, b.upper);
        prop_assert!(s >= -1e-12);
    }

    #[test]
    fn observable_entropy_between_state_entropy_and_ln_n((seed, d) in seed_and_dim(), k in 2usize..=6) {
        let mut rng = RngSeed(seed).rng();
        let rho = random_state(d, d, &mut rng).unwrap();
        let obs = random_observable(d, k, &mut rng).unwrap();
        let sa = observable_entropy(&obs, &rho).unwrap().nats();
        prop_assert!(von_neumann_entropy(&rho).nats() <= sa + 1e-9);
        prop_assert!(sa <= (d as f64).ln() + 1e-9);
    }

    #[test]
    fn luders_product_matches_explicit_form((seed, d) in seed_and_dim()) {
        let mut rng = RngSeed(seed).rng();
        let a = random_effect(d, &mut rng).unwrap();
        let b = random_effect(d, &mut rng).unwrap();
        let prod = sequential_product_effect(&luders_operation(&a).unwrap(), &b).unwrap();
        let r = a.matrix().psd_sqrt().unwrap();
        let explicit = naive_mul(&naive_mul(&r, b.matrix()), &r);
        prop_assert!(prod.matrix().max_abs_diff(&explicit) < 1e-10);
    }

    #[test]
    fn merging_everything_gives_the_unit_observable((seed, d) in seed_and_dim(), k in 2usize..=5) {
        let mut rng = RngSeed(seed).rng();
        let obs = random_observable(d, k, &mut rng).unwrap();
        let all = CoarseGraining::from_pairs(obs.labels().map(|l| (l.to_string(), "all".to_string())));
        let merged = coarse_grain(&obs, &all).unwrap();
        prop_assert_eq!(merged.len(), 1);
        prop_assert!(merged.get("all").unwrap().matrix().max_abs_diff(&ComplexMatrix::identity(d)) < 1e-12);
        let rho = random_state(d, d, &mut rng).unwrap();
        let s = observable_entropy(&merged, &rho).unwrap().nats();
        prop_assert!((s - (d as f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip_is_exact((seed, d) in seed_and_dim(), k in 2usize..=4) {
        let mut rng = RngSeed(seed).rng();
        let rho = random_state(d, d, &mut rng).unwrap();
        prop_assert_eq!(parse_state(&to_json(&rho)).unwrap(), rho);
        let obs = random_observable(d, k, &mut rng).unwrap();
        prop_assert_eq!(parse_observable(&to_json(&obs)).unwrap(), obs);
    }

    #[test]
    fn scaled_identity_entropy(lambda in 0.001f64..=1.0, (seed, d) in seed_and_dim()) {
        let mut rng = RngSeed(seed).rng();
        let rho = random_state(d, d, &mut rng).unwrap();
        let a = Effect::new(ComplexMatrix::identity(d).scale(lambda)).unwrap();
        let s = effect_entropy(&a, &rho).unwrap().nats();
        prop_assert!((s - lambda * (d as f64).ln()).abs() < 1e-12);
    }
}

#[test]
fn naive_oracles_agree_on_a_known_case() {
    let i = Complex64::new(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    // σ_y σ_y = I.
    let y = ComplexMatrix::new(2, vec![zero, -i, i, zero]).unwrap();
    assert!(naive_mul(&y, &y).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    let k = naive_kron(&ComplexMatrix::identity(2), &y);
    assert_eq!(k.get(2, 3), -i);
    assert_eq!(k.get(0, 0), zero);
    assert_eq!(k.get(3, 3), zero);
    assert_eq!(naive_kron(&ComplexMatrix::identity(1), &y).get(1, 0), i);
}
