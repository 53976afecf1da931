use std::f64::consts::{PI, SQRT_2};

use monowave::directions::generate_uniform_directions;
use monowave::field::{CoefficientSet, FnField, MonochromaticWave};
use monowave::gaussian::SpectralMeasure;
use monowave::growth::{characteristic_function, doubling_factor, doubling_index, small_value_fraction};
use monowave::rng::child_seed;
use monowave::stats::{ball_volume, energy_distance, kac_rice_density, ks_distance_normal, unit_ball_volume};
use proptest::prelude::*;

fn wave(n: usize, seed: u64) -> MonochromaticWave {
    let dirs = generate_uniform_directions(2, n, seed).unwrap();
    MonochromaticWave::new(dirs, CoefficientSet::random_phase(n, child_seed(seed, 1))).unwrap()
}

#[test]
fn doubling_index_of_an_exponential_ramp() {
    // sup over B(x, r) of e^{a x₁} is e^{a(x₁ + r)}, so the index is a(ϰ − 1)W + 1
    let a = 1.3;
    let f = FnField::new(2, move |x: &[f64]| (a * x[0]).exp());
    let w = 1.5;
    let got = doubling_index(&f, &[0.4, -0.2], w, 40.0).unwrap();
    let want = a * (doubling_factor(2) - 1.0) * w + 1.0;
    assert!((got - want).abs() < 0.02 * want, "{got} vs {want}");
}

#[test]
fn doubling_index_of_a_cosine_is_one() {
    let f = FnField::new(2, |x: &[f64]| SQRT_2 * (2.0 * PI * x[0]).cos());
    let got = doubling_index(&f, &[0.3, 0.7], 1.0, 40.0).unwrap();
    assert!((got - 1.0).abs() < 1e-2, "{got}");
}

#[test]
fn characteristic_function_starts_at_one() {
    let r = characteristic_function(&wave(16, 4), 30.0, 1.0, 11, 2000, 8).unwrap();
    assert_eq!(r.empirical[0].re, 1.0);
    assert_eq!(r.empirical[0].im, 0.0);
    assert!(r.empirical.iter().all(|z| z.norm() <= 1.0 + 1e-12));
    assert!((r.predicted[0] - 1.0).abs() < 1e-15);
}

#[test]
fn ks_distance_of_simple_samples() {
    // one point at 0: the empirical CDF jumps from 0 to 1 where Φ = 1/2
    assert!((ks_distance_normal(&[0.0]) - 0.5).abs() < 1e-12);
    // midpoint normal quantiles: distance 1/(2n)
    let n = 400;
    let normal = statrs::distribution::Normal::new(0.0, 1.0).unwrap();
    let q: Vec<f64> = (0..n)
        .map(|i| statrs::distribution::ContinuousCDF::inverse_cdf(&normal, (i as f64 + 0.5) / n as f64))
        .collect();
    assert!((ks_distance_normal(&q) - 0.5 / n as f64).abs() < 1e-9);
}

#[test]
fn energy_distance_of_identical_and_separated_clouds() {
    let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i * i) as f64 * 0.1]).collect();
    let n = x.len() as f64;
    let s: f64 = (0..x.len())
        .flat_map(|i| (i + 1..x.len()).map(move |j| (i, j)))
        .map(|(i, j)| ((x[i][0] - x[j][0]).powi(2) + (x[i][1] - x[j][1]).powi(2)).sqrt())
        .sum();
    // unbiased within-cloud means: identical clouds give 4S(1/n² − 1/(n(n−1)))
    let (stat, _) = energy_distance(&x, &x, 20, 3).unwrap();
    let want = 4.0 * s * (1.0 / (n * n) - 1.0 / (n * (n - 1.0)));
    assert!((stat - want).abs() < 1e-9 * s, "{stat} vs {want}");
    let y: Vec<Vec<f64>> = x.iter().map(|v| vec![v[0] + 50.0, v[1]]).collect();
    let (far, threshold) = energy_distance(&x, &y, 50, 3).unwrap();
    assert!(far > threshold, "{far} {threshold}");
}

#[test]
fn ball_volumes() {
    assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
    assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
    assert!((ball_volume(3, 2.0) - 32.0 * PI / 3.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn doubling_index_is_at_least_one(seed in 0u64..1000, x in -20.0f64..20.0, y in -20.0f64..20.0) {
        let d = doubling_index(&wave(8, seed), &[x, y], 1.0, 20.0).unwrap();
        prop_assert!(d >= 1.0);
    }

    #[test]
    fn small_value_fraction_grows_with_beta(seed in 0u64..1000, b in 0.0f64..1.0, extra in 0.0f64..1.0) {
        let w = wave(12, seed);
        let lo = small_value_fraction(&w, 20.0, b, 500, seed).unwrap();
        let hi = small_value_fraction(&w, 20.0, b + extra, 500, seed).unwrap();
        prop_assert!(lo.fraction <= hi.fraction);
        prop_assert!(lo.gaussian_limit <= hi.gaussian_limit);
    }

    #[test]
    fn kac_rice_density_is_rotation_invariant(angle in 0.0f64..PI) {
        let atoms = |phi: f64| -> Vec<(Vec<f64>, f64)> {
            [(0.0, 3.0), (1.1, 1.0), (2.0, 2.0)]
                .iter()
                .map(|&(a, w)| (vec![(a + phi).cos(), (a + phi).sin()], w))
                .collect()
        };
        let a = kac_rice_density(&SpectralMeasure::symmetric_atomic(2, atoms(0.0)).unwrap()).unwrap();
        let b = kac_rice_density(&SpectralMeasure::symmetric_atomic(2, atoms(angle)).unwrap()).unwrap();
        prop_assert!((a.value - b.value).abs() < 5.0 * (a.stderr + b.stderr), "{} {}", a.value, b.value);
    }
}
