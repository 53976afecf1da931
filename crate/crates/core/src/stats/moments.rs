use num_complex::Complex64;
use rayon::prelude::*;

use super::{sample_centers, ComparisonReport, ComparisonRow, RunMetadata};
use crate::directions::empirical_measure;
use crate::error::{invalid, Result};
use crate::field::{covariance_kernel, eval_bk, Field, KernelSpec, MonochromaticWave};
use crate::partition::SpherePartition;

/// Largest moment order accepted by [`window_moment_report`].
pub const MAX_MOMENT_ORDER: u32 = 6;

/// E[Z^p] for a standard normal Z: 0 for odd p, (p − 1)!! for even p.
pub fn gaussian_moment(p: u32) -> f64 {
    if p % 2 == 1 {
        0.0
    } else {
        (1..p).step_by(2).map(|k| k as f64).product()
    }
}

fn shifted(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn check_in_window(y: &[f64], window: f64, m: usize) -> Result<()> {
    if y.len() != m {
        return Err(crate::error::Error::DimensionMismatch { expected: m, got: y.len() });
    }
    let n = y.iter().map(|c| c * c).sum::<f64>().sqrt();
    if n > window {
        return Err(invalid("y", format!("point with |y| = {n} lies outside B(W = {window})")));
    }
    Ok(())
}

fn metadata(wave: &MonochromaticWave, seed: u64, n: usize, window: Option<f64>, radius: f64) -> RunMetadata {
    RunMetadata {
        seed: Some(seed),
        n_samples: Some(n),
        h: None,
        window,
        radius: Some(radius),
        n_terms: Some(wave.count()),
        dim: Some(wave.dim()),
    }
}

/// Means over uniform x ∈ B(R) of F_x(y)^p for each y and p = 1..=p_max,
/// against the standard normal moments.
pub fn window_moment_report(
    wave: &MonochromaticWave,
    radius: f64,
    window: f64,
    y_points: &[Vec<f64>],
    p_max: u32,
    n_samples: usize,
    seed: u64,
) -> Result<ComparisonReport> {
    if p_max == 0 || p_max > MAX_MOMENT_ORDER {
        return Err(invalid("p_max", format!("need 1 <= p_max <= {MAX_MOMENT_ORDER}, got {p_max}")));
    }
    if n_samples < 2 {
        return Err(invalid("n_samples", "need at least two samples"));
    }
    for y in y_points {
        check_in_window(y, window, wave.dim())?;
    }
    let centers = sample_centers(wave.dim(), radius, n_samples, seed);
    let mut report = ComparisonReport::new("window-moments", metadata(wave, seed, n_samples, Some(window), radius));
    for (iy, y) in y_points.iter().enumerate() {
        let values: Vec<f64> = centers.par_iter().map(|x| wave.value(&shifted(x, y))).collect();
        for p in 1..=p_max {
            let powers: Vec<f64> = values.iter().map(|v| v.powi(p as i32)).collect();
            let (mean, se) = super::mean_stderr(&powers);
            report.rows.push(ComparisonRow::new(
                format!("y{iy} p{p}"),
                mean,
                gaussian_moment(p),
                "gaussian-moment",
                se,
                n_samples,
                4.0 * se,
            ));
        }
    }
    Ok(report)
}

/// Factor b_k^s · conj(b_k)^t of a mixed wave-packet moment; `cell` is a
/// partition cell index from the selected set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BkIndex {
    pub cell: usize,
    pub s: u32,
    pub t: u32,
}

/// Means over uniform x ∈ B(R) of Π b_k^{s_k} conj(b_k)^{t_k} against
/// Π δ_{s_k t_k} s_k!, real and imaginary parts as separate rows.
pub fn bk_moment_report(
    wave: &MonochromaticWave,
    partition: &SpherePartition,
    radius: f64,
    tuples: &[Vec<BkIndex>],
    n_samples: usize,
    seed: u64,
) -> Result<ComparisonReport> {
    if n_samples < 2 {
        return Err(invalid("n_samples", "need at least two samples"));
    }
    let selected = partition.selected();
    let mut positions = Vec::with_capacity(tuples.len());
    for tuple in tuples {
        let order: u32 = tuple.iter().map(|i| i.s + i.t).sum();
        if order > 6 {
            return Err(invalid("indices", format!("total order {order} exceeds 6")));
        }
        let mut pos = Vec::with_capacity(tuple.len());
        for (a, ia) in tuple.iter().enumerate() {
            let p = selected
                .iter()
                .position(|&k| k == ia.cell)
                .ok_or_else(|| invalid("indices", format!("cell {} is not selected", ia.cell)))?;
            for ib in &tuple[..a] {
                if ib.cell == ia.cell || partition.antipodal_cell(ib.cell) == ia.cell {
                    return Err(invalid(
                        "indices",
                        format!("cells {} and {} coincide up to sign", ib.cell, ia.cell),
                    ));
                }
            }
            pos.push(p);
        }
        positions.push(pos);
    }
    let centers = sample_centers(wave.dim(), radius, n_samples, seed);
    let bks: Vec<Vec<Complex64>> = centers
        .par_iter()
        .map(|x| eval_bk(wave, partition, x))
        .collect::<Result<_>>()?;
    let mut report = ComparisonReport::new("bk-moments", metadata(wave, seed, n_samples, None, radius));
    for (tuple, pos) in tuples.iter().zip(&positions) {
        let products: Vec<Complex64> = bks
            .iter()
            .map(|b| {
                tuple.iter().zip(pos).fold(Complex64::new(1.0, 0.0), |acc, (i, &p)| {
                    acc * b[p].powu(i.s) * b[p].conj().powu(i.t)
                })
            })
            .collect();
        let prediction: f64 = tuple
            .iter()
            .map(|i| if i.s == i.t { (1..=i.s).map(f64::from).product() } else { 0.0 })
            .product();
        let label: Vec<String> = tuple.iter().map(|i| format!("k{}^{}c{}", i.cell, i.s, i.t)).collect();
        let label = label.join("*");
        let re: Vec<f64> = products.iter().map(|z| z.re).collect();
        let im: Vec<f64> = products.iter().map(|z| z.im).collect();
        let (mre, sre) = super::mean_stderr(&re);
        let (mim, sim) = super::mean_stderr(&im);
        report.rows.push(ComparisonRow::new(
            format!("{label} re"),
            mre,
            prediction,
            "complex-gaussian-moment",
            sre,
            n_samples,
            4.0 * sre,
        ));
        report.rows.push(ComparisonRow::new(
            format!("{label} im"),
            mim,
            0.0,
            "complex-gaussian-moment",
            sim,
            n_samples,
            4.0 * sim,
        ));
    }
    Ok(report)
}

/// Means over uniform x ∈ B(R) of F_x(τ/2) F_x(−τ/2) against the covariance
/// kernel of the wave's empirical direction measure.
pub fn covariance_compare(
    wave: &MonochromaticWave,
    radius: f64,
    window: f64,
    lags: &[Vec<f64>],
    n_samples: usize,
    seed: u64,
) -> Result<ComparisonReport> {
    if n_samples < 2 {
        return Err(invalid("n_samples", "need at least two samples"));
    }
    for tau in lags {
        check_in_window(tau, 2.0 * window, wave.dim())?;
    }
    let spec = KernelSpec::new(empirical_measure(wave.directions()))?;
    let centers = sample_centers(wave.dim(), radius, n_samples, seed);
    let mut report = ComparisonReport::new("covariance", metadata(wave, seed, n_samples, Some(window), radius));
    for (i, tau) in lags.iter().enumerate() {
        let y: Vec<f64> = tau.iter().map(|c| 0.5 * c).collect();
        let yn: Vec<f64> = tau.iter().map(|c| -0.5 * c).collect();
        let prods: Vec<f64> = centers
            .par_iter()
            .map(|x| wave.value(&shifted(x, &y)) * wave.value(&shifted(x, &yn)))
            .collect();
        let (mean, se) = super::mean_stderr(&prods);
        report.rows.push(ComparisonRow::new(
            format!("lag{i}"),
            mean,
            covariance_kernel(&spec, tau),
            "covariance-kernel",
            se,
            n_samples,
            4.0 * se,
        ));
    }
    Ok(report)
}
