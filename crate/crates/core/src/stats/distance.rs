use rand::seq::SliceRandom;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{sample_centers, ComparisonReport, ComparisonRow, RunMetadata};
use crate::error::{invalid, Result};
use crate::field::{Field, MonochromaticWave};
use crate::gaussian::FieldSampler;
use crate::rng::{child_seed, rng_from_seed};

/// Asymptotic 95% critical value of √n · D for the one-sample KS test.
const KS_CRITICAL_95: f64 = 1.358;
/// Stream tag separating Gaussian draws from window centers.
const GAUSSIAN_STREAM: u64 = 0x6a09_e667_f3bc_c908;
const PERMUTATION_STREAM: u64 = 0xbb67_ae85_84ca_a73b;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushforwardOptions {
    /// Points per cloud used by the energy statistic.
    pub energy_points: usize,
    /// Permutations calibrating the energy statistic; 19 gives a 5% test.
    pub permutations: usize,
}

impl Default for PushforwardOptions {
    fn default() -> Self {
        Self {
            energy_points: 2000,
            permutations: 19,
        }
    }
}

/// sup_v |F_n(v) − Φ(v)| for the empirical CDF F_n of `values`.
pub fn ks_distance_normal(values: &[f64]) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = normal.cdf(x);
            (c - i as f64 / n).max((i + 1) as f64 / n - c)
        })
        .fold(0.0, f64::max)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Energy statistic 2E|X−Y| − E|X−X'| − E|Y−Y'| over a pooled cloud split
/// by `in_first`; within-group means exclude the diagonal.
fn split_energy(pooled: &[Vec<f64>], in_first: &[bool]) -> f64 {
    let sums: Vec<[f64; 3]> = (0..pooled.len())
        .into_par_iter()
        .map(|i| {
            let mut s = [0.0; 3];
            for j in i + 1..pooled.len() {
                let d = dist(&pooled[i], &pooled[j]);
                match (in_first[i], in_first[j]) {
                    (true, true) => s[0] += d,
                    (false, false) => s[1] += d,
                    _ => s[2] += d,
                }
            }
            s
        })
        .collect();
    let mut total = [0.0; 3];
    for s in sums {
        for k in 0..3 {
            total[k] += s[k];
        }
    }
    let nx = in_first.iter().filter(|&&b| b).count() as f64;
    let ny = in_first.len() as f64 - nx;
    2.0 * total[2] / (nx * ny) - 2.0 * total[0] / (nx * (nx - 1.0)) - 2.0 * total[1] / (ny * (ny - 1.0))
}

/// Energy distance between two clouds and the largest value over
/// `permutations` random relabelings of the pooled cloud.
pub fn energy_distance(x: &[Vec<f64>], y: &[Vec<f64>], permutations: usize, seed: u64) -> Result<(f64, f64)> {
    if x.len() < 2 || y.len() < 2 {
        return Err(invalid("n_samples", "energy distance needs two points per cloud"));
    }
    let pooled: Vec<Vec<f64>> = x.iter().chain(y).cloned().collect();
    let mut labels: Vec<bool> = (0..pooled.len()).map(|i| i < x.len()).collect();
    let observed = split_energy(&pooled, &labels);
    let mut rng = rng_from_seed(seed);
    let mut threshold = f64::NEG_INFINITY;
    for _ in 0..permutations {
        labels.shuffle(&mut rng);
        threshold = threshold.max(split_energy(&pooled, &labels));
    }
    Ok((observed, threshold))
}

/// Kolmogorov–Smirnov distance of each F_x(y_i) marginal to N(0, 1), and
/// the energy distance between the joint window cloud and draws of the
/// Gaussian field at the same points.
#[allow(clippy::too_many_arguments)]
pub fn pushforward_distance<S: FieldSampler>(
    wave: &MonochromaticWave,
    radius: f64,
    window: f64,
    sampler: &S,
    y_points: &[Vec<f64>],
    n_samples: usize,
    seed: u64,
    options: PushforwardOptions,
) -> Result<ComparisonReport> {
    if y_points.is_empty() || y_points.len() > 5 {
        return Err(invalid("y_points", "need between 1 and 5 points"));
    }
    if n_samples < 2 {
        return Err(invalid("n_samples", "need at least two samples"));
    }
    if sampler.dim() != wave.dim() {
        return Err(crate::error::Error::DimensionMismatch {
            expected: wave.dim(),
            got: sampler.dim(),
        });
    }
    for y in y_points {
        let n = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        if y.len() != wave.dim() || n > window {
            return Err(invalid("y_points", format!("point outside B(W = {window})")));
        }
    }
    let centers = sample_centers(wave.dim(), radius, n_samples, seed);
    let window_cloud: Vec<Vec<f64>> = centers
        .par_iter()
        .map(|x| {
            y_points
                .iter()
                .map(|y| {
                    let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
                    wave.value(&p)
                })
                .collect()
        })
        .collect();
    let gaussian_cloud: Vec<Vec<f64>> = (0..options.energy_points.min(n_samples) as u64)
        .into_par_iter()
        .map(|j| {
            let f = sampler.sample(child_seed(seed ^ GAUSSIAN_STREAM, j));
            y_points.iter().map(|y| f.value(y)).collect()
        })
        .collect();

    let mut report = ComparisonReport::new(
        "pushforward",
        RunMetadata {
            seed: Some(seed),
            n_samples: Some(n_samples),
            h: None,
            window: Some(window),
            radius: Some(radius),
            n_terms: Some(wave.count()),
            dim: Some(wave.dim()),
        },
    );
    for i in 0..y_points.len() {
        let marginal: Vec<f64> = window_cloud.iter().map(|v| v[i]).collect();
        let d = ks_distance_normal(&marginal);
        report.rows.push(ComparisonRow::new(
            format!("ks y{i}"),
            d,
            0.0,
            "standard-normal",
            0.0,
            n_samples,
            KS_CRITICAL_95 / (n_samples as f64).sqrt(),
        ));
    }
    let k = gaussian_cloud.len();
    let (e, threshold) = energy_distance(
        &window_cloud[..k],
        &gaussian_cloud,
        options.permutations,
        seed ^ PERMUTATION_STREAM,
    )?;
    report
        .rows
        .push(ComparisonRow::new("energy", e, 0.0, "gaussian-field", 0.0, k, threshold));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{child_rng, standard_normal};

    fn normal_cloud(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        (0..n as u64)
            .map(|j| {
                let mut r = child_rng(seed, j);
                (0..dim).map(|_| standard_normal(&mut r)).collect()
            })
            .collect()
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let n = 1000;
        let v: Vec<f64> = (0..n).map(|i| normal.inverse_cdf((i as f64 + 0.5) / n as f64)).collect();
        assert!((ks_distance_normal(&v) - 0.5 / n as f64).abs() < 1e-9);
    }

    #[test]
    fn ks_detects_a_shift() {
        let v: Vec<f64> = normal_cloud(2000, 1, 1).into_iter().map(|p| p[0] + 0.5).collect();
        assert!(ks_distance_normal(&v) > 0.15);
    }

    #[test]
    fn energy_distance_separates_shifted_clouds() {
        let x = normal_cloud(300, 2, 2);
        let y: Vec<Vec<f64>> = normal_cloud(300, 2, 3).into_iter().map(|p| vec![p[0] + 1.0, p[1]]).collect();
        let (e, t) = energy_distance(&x, &y, 19, 4).unwrap();
        assert!(e > t);
        let (e0, t0) = energy_distance(&x, &normal_cloud(300, 2, 5), 19, 4).unwrap();
        assert!(e0 <= t0, "{e0} > {t0}");
        assert!(e0.abs() < e);
    }
}
