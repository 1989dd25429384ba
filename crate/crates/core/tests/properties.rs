mod common;

use chsh_core::probability::EnumerationOptions;
use chsh_core::{
    analytic_violation_probability, erfc, estimate_violation_probability,
    exact_violation_probability, exact_violation_probability_with, walk_pmf, Dyadic,
    ExperimentConfig, Parallelism, Threshold,
};
use common::{binomial, brute_force_probability, erfc_series};
use proptest::prelude::*;

const BOTH: [Threshold; 2] = [Threshold::Strict, Threshold::NonStrict];

fn exact(rounds: [u32; 4], threshold: Threshold) -> Dyadic {
    let config = ExperimentConfig::new(rounds).unwrap();
    exact_violation_probability(&config, threshold)
        .unwrap()
        .value
        .as_exact()
        .unwrap()
        .clone()
}

fn analytic(rounds: [u32; 4]) -> f64 {
    analytic_violation_probability(&ExperimentConfig::new(rounds).unwrap())
        .unwrap()
        .value
        .to_f64()
}

#[test]
fn exact_matches_brute_force_for_every_config_up_to_ten_rounds() {
    let mut checked = 0;
    for a in 1..=7u32 {
        for b in 1..=7 {
            for c in 1..=7 {
                for d in 1..=7 {
                    if a + b + c + d > 10 {
                        continue;
                    }
                    for t in BOTH {
                        let rounds = [a, b, c, d];
                        assert_eq!(
                            exact(rounds, t),
                            brute_force_probability(rounds, t),
                            "{rounds:?} {t}"
                        );
                    }
                    checked += 1;
                }
            }
        }
    }
    assert_eq!(checked, 210);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_matches_brute_force_up_to_sixteen_rounds(
        rounds in prop::array::uniform4(1u32..=8).prop_filter("N ≤ 16", |r| r.iter().sum::<u32>() <= 16),
    ) {
        for t in BOTH {
            prop_assert_eq!(exact(rounds, t), brute_force_probability(rounds, t));
        }
    }

    #[test]
    fn permutations_do_not_change_probabilities(
        rounds in prop::array::uniform4(1u32..=12),
        rot in 0usize..4,
    ) {
        let mut permuted = rounds;
        permuted.rotate_left(rot);
        permuted.swap(1, 2);
        for t in BOTH {
            prop_assert_eq!(exact(rounds, t), exact(permuted, t));
        }
        let (p, q) = (analytic(rounds), analytic(permuted));
        prop_assert!((p - q).abs() <= 1e-13 * p);
    }

    #[test]
    fn non_strict_dominates_strict(rounds in prop::array::uniform4(1u32..=15)) {
        let s = exact(rounds, Threshold::Strict);
        let ns = exact(rounds, Threshold::NonStrict);
        prop_assert!(s <= ns);
        prop_assert!(ns <= Dyadic::one());
    }

    #[test]
    fn analytic_decreases_when_every_channel_grows(
        rounds in prop::array::uniform4(1u32..=400),
        bump in prop::array::uniform4(1u32..=50),
    ) {
        let larger: [u32; 4] = std::array::from_fn(|k| rounds[k] + bump[k]);
        let (p, q) = (analytic(rounds), analytic(larger));
        prop_assert!(q < p || p == 0.0, "{:?} -> {:?}: {} vs {}", rounds, larger, p, q);
    }
}

#[test]
fn toy_model_anchor() {
    assert_eq!(exact([1; 4], Threshold::Strict).to_string(), "1/8");
    assert_eq!(exact([1; 4], Threshold::NonStrict).to_string(), "5/8");
}

#[test]
fn two_round_channels_have_denominator_two_to_the_eight() {
    let p = exact([2; 4], Threshold::Strict);
    assert_eq!(
        p.numer_over(8),
        brute_force_probability([2; 4], Threshold::Strict).numer_over(8)
    );
    assert!(p.denom_exp() <= 8);
}

#[test]
fn exact_brackets_analytic_at_small_n() {
    for n in 1..=5u32 {
        let strict = exact([n; 4], Threshold::Strict).to_f64();
        let nonstrict = exact([n; 4], Threshold::NonStrict).to_f64();
        let p = analytic([n; 4]);
        assert!(
            strict <= p && p <= nonstrict,
            "N={}: {strict} ≤ {p} ≤ {nonstrict}",
            4 * n
        );
    }
}

#[test]
fn sequential_and_parallel_enumeration_agree_bit_for_bit() {
    for rounds in [[17, 23, 9, 40], [60, 60, 60, 60], [1, 200, 3, 150]] {
        let config = ExperimentConfig::new(rounds).unwrap();
        let run = |par| {
            let opts = EnumerationOptions {
                parallelism: par,
                ..Default::default()
            };
            exact_violation_probability_with(&config, Threshold::Strict, &opts).unwrap()
        };
        let seq = run(Parallelism::Sequential);
        assert_eq!(run(Parallelism::Threads(8)), seq);
        assert_eq!(run(Parallelism::Auto), seq);
    }
}

#[test]
fn bracket_holds_through_ninety_six_rounds_then_breaks() {
    // the binomial tail is lighter than the Gaussian far from the mean; from
    // N = 100 on, the analytic value overshoots the non-strict probability
    for n in 1..=25u32 {
        let s = exact([n; 4], Threshold::Strict).to_f64();
        let ns = exact([n; 4], Threshold::NonStrict).to_f64();
        let p = analytic([n; 4]);
        let inside = s <= p && p <= ns;
        assert_eq!(inside, n < 25, "N={}: {s} {p} {ns}", 4 * n);
        assert!(s <= p, "analytic below strict at N={}", 4 * n);
    }
}

#[test]
fn walk_pmf_matches_binomial_oracle() {
    for n in [100u32, 257, 1024] {
        let pmf = walk_pmf(n).unwrap();
        for k in (0..=n).step_by(7) {
            let m = 2 * i64::from(k) - i64::from(n);
            assert_eq!(
                pmf.numerator(m).unwrap(),
                &binomial(u64::from(n), u64::from(k))
            );
        }
    }
}

#[test]
fn erfc_matches_series_oracle_off_grid() {
    for x in [
        1e-8, 0.01, 0.3, 0.84375, 1.25, 1.999, 2.0, 2.001, 3.7, 4.99, 7.5, 9.9,
    ] {
        let oracle = erfc_series(x);
        assert!(
            oracle.error_bound < 1e-30 * oracle.value,
            "x={x}: bound {}",
            oracle.error_bound
        );
        let got = erfc(x).unwrap();
        assert!(
            (got - oracle.value).abs() <= 1e-12 * oracle.value,
            "erfc({x}) = {got}, oracle {}",
            oracle.value
        );
    }
}

#[test]
fn monte_carlo_agrees_with_exact_for_small_configs() {
    for (rounds, seed) in [([2, 2, 2, 2], 1u64), ([1, 3, 2, 4], 2), ([3, 3, 4, 4], 3)] {
        let config = ExperimentConfig::new(rounds).unwrap();
        for t in BOTH {
            let p = exact(rounds, t).to_f64();
            let est = estimate_violation_probability(&config, 1_000_000, seed, t).unwrap();
            let se = (p * (1.0 - p) / 1e6).sqrt();
            assert!(
                (est.estimate - p).abs() <= 4.0 * se,
                "{rounds:?} {t}: {} vs {p}",
                est.estimate
            );
            assert!(est.ci_low <= est.estimate && est.estimate <= est.ci_high);
        }
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let config = ExperimentConfig::new([2, 1, 1, 3]).unwrap();
    let a = estimate_violation_probability(&config, 123_457, 77, Threshold::NonStrict).unwrap();
    let b = estimate_violation_probability(&config, 123_457, 77, Threshold::NonStrict).unwrap();
    assert_eq!(a, b);
    let c = estimate_violation_probability(&config, 123_457, 78, Threshold::NonStrict).unwrap();
    assert_ne!(a.hits, c.hits);
}
