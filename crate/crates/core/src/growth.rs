//! Doubling indices, small-value fractions and the characteristic function
//! of a wave's value distribution.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Error, Result};
use crate::field::{bessel_j, Field, MonochromaticWave};
use crate::rng::{child_rng, point_in_ball};

/// Minimum probe density (points per unit length along each axis).
pub const MIN_PROBE_DENSITY: f64 = 20.0;

/// Radius factor between the two balls of the doubling index.
pub fn doubling_factor(m: usize) -> f64 {
    2.0 * (m as f64).sqrt()
}

/// log(sup_{B(x, ϰW)} |f| / sup_{B(x, W)} |f|) + 1 with ϰ = 2√m, suprema
/// taken over a lattice of spacing 1 / `density`.
pub fn doubling_index<F: Field + ?Sized>(field: &F, x: &[f64], window: f64, density: f64) -> Result<f64> {
    let m = field.dim();
    if x.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: x.len() });
    }
    if !(window >= 1.0) {
        return Err(invalid("W", format!("window must be >= 1, got {window}")));
    }
    if !(density >= MIN_PROBE_DENSITY) {
        return Err(invalid("density", format!("need at least {MIN_PROBE_DENSITY} probes per unit")));
    }
    let h = 1.0 / density;
    let outer = doubling_factor(m) * window;
    let n = (outer / h).floor() as usize;
    let shape = vec![2 * n + 1; m];
    let origin: Vec<f64> = x.iter().map(|c| c - n as f64 * h).collect();
    let values = field.fill_lattice(&origin, h, &shape);
    let (mut sup_in, mut sup_out) = (0.0f64, 0.0f64);
    let mut idx = vec![0usize; m];
    for v in values {
        let r2: f64 = idx.iter().map(|&i| ((i as f64 - n as f64) * h).powi(2)).sum();
        let a = v.abs();
        if r2 <= outer * outer {
            sup_out = sup_out.max(a);
            if r2 <= window * window {
                sup_in = sup_in.max(a);
            }
        }
        for k in (0..m).rev() {
            idx[k] += 1;
            if idx[k] < shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    if sup_in < 1e-300 {
        return Err(Error::DegenerateSample(format!("field vanishes on the probe set of B(x, {window})")));
    }
    Ok((sup_out / sup_in).ln() + 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingStats {
    pub window: f64,
    pub kappa: f64,
    pub samples: Vec<f64>,
}

impl DoublingStats {
    /// Fraction of samples with index above `q`.
    pub fn tail(&self, q: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().filter(|&&s| s > q).count() as f64 / self.samples.len() as f64
    }

    /// Reference shape min(1, Q^{-D} + Q^{2D} e^{-Q}).
    pub fn reference(q: f64, d: f64) -> f64 {
        (q.powf(-d) + q.powf(2.0 * d) * (-q).exp()).min(1.0)
    }

    pub fn write_csv<W: Write>(&self, qs: &[f64], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["Q", "tail"])?;
        for &q in qs {
            w.write_record([format!("{q}"), format!("{:.12e}", self.tail(q))])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Doubling indices at `n_samples` uniform centers in B(R).
pub fn doubling_tail<F: Field + ?Sized>(
    field: &F,
    radius: f64,
    window: f64,
    n_samples: usize,
    seed: u64,
) -> Result<DoublingStats> {
    if !(radius >= 10.0 * window) {
        return Err(invalid("R", format!("need R >= 10 W, got R = {radius}, W = {window}")));
    }
    let m = field.dim();
    let origin = vec![0.0; m];
    let samples = (0..n_samples as u64)
        .into_par_iter()
        .map(|j| {
            let x = point_in_ball(&mut child_rng(seed, j), &origin, radius);
            doubling_index(field, &x, window, MIN_PROBE_DENSITY)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DoublingStats {
        window,
        kappa: doubling_factor(m),
        samples,
    })
}

fn sample_values<F: Field + ?Sized>(field: &F, radius: f64, n_samples: usize, seed: u64) -> Vec<f64> {
    let origin = vec![0.0; field.dim()];
    (0..n_samples as u64)
        .into_par_iter()
        .map(|j| field.value(&point_in_ball(&mut child_rng(seed, j), &origin, radius)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallValueReport {
    pub beta: f64,
    pub fraction: f64,
    pub stderr: f64,
    /// P(|Z| <= β) for a standard normal Z.
    pub gaussian_limit: f64,
    pub n_samples: usize,
}

/// Fraction of B(R) where |f| <= β, by uniform sampling.
pub fn small_value_fraction<F: Field + ?Sized>(
    field: &F,
    radius: f64,
    beta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SmallValueReport> {
    if !(beta >= 0.0) {
        return Err(invalid("beta", format!("need beta >= 0, got {beta}")));
    }
    if !(radius > 0.0) || n_samples == 0 {
        return Err(invalid("n_samples", "need R > 0 and at least one sample"));
    }
    let values = sample_values(field, radius, n_samples, seed);
    let p = values.iter().filter(|v| v.abs() <= beta).count() as f64 / n_samples as f64;
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(SmallValueReport {
        beta,
        fraction: p,
        stderr: (p * (1.0 - p) / n_samples as f64).sqrt(),
        gaussian_limit: 2.0 * normal.cdf(beta) - 1.0,
        n_samples,
    })
}

/// J_0(√2·2πt/√N)^N: characteristic function of an N-term wave value.
pub fn predicted_characteristic(t: f64, n: usize) -> f64 {
    let z = 2f64.sqrt() * 2.0 * PI * t.abs() / (n as f64).sqrt();
    bessel_j(0.0, z).expect("order 0, z >= 0").powi(n as i32)
}

/// e^{-2π²t²}: characteristic function of a standard normal at 2πt.
pub fn gaussian_characteristic(t: f64) -> f64 {
    (-2.0 * PI * PI * t * t).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharFnReport {
    pub t: Vec<f64>,
    pub empirical: Vec<Complex64>,
    pub predicted: Vec<f64>,
    pub stderr: Vec<f64>,
    pub sup_error: f64,
    pub n_samples: usize,
}

impl CharFnReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "re", "im", "predicted", "stderr"])?;
        for i in 0..self.t.len() {
            w.write_record([
                format!("{}", self.t[i]),
                format!("{:.12e}", self.empirical[i].re),
                format!("{:.12e}", self.empirical[i].im),
                format!("{:.12e}", self.predicted[i]),
                format!("{:.12e}", self.stderr[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Empirical mean of e(t f(x)) over uniform x in B(R) on `n_t` equally
/// spaced t in [0, t_max], against the N-term prediction.
pub fn characteristic_function(
    wave: &MonochromaticWave,
    radius: f64,
    t_max: f64,
    n_t: usize,
    n_samples: usize,
    seed: u64,
) -> Result<CharFnReport> {
    if !(t_max > 0.0 && t_max <= 10.0) {
        return Err(invalid("t_max", format!("need 0 < t_max <= 10, got {t_max}")));
    }
    if n_t < 2 || n_samples < 2 {
        return Err(invalid("n_t", "need at least two t values and two samples"));
    }
    let values = sample_values(wave, radius, n_samples, seed);
    let nf = n_samples as f64;
    let mut report = CharFnReport {
        t: Vec::with_capacity(n_t),
        empirical: Vec::with_capacity(n_t),
        predicted: Vec::with_capacity(n_t),
        stderr: Vec::with_capacity(n_t),
        sup_error: 0.0,
        n_samples,
    };
    for i in 0..n_t {
        let t = t_max * i as f64 / (n_t - 1) as f64;
        let (mut c, mut s, mut c2, mut s2) = (0.0, 0.0, 0.0, 0.0);
        for v in &values {
            let (si, co) = (2.0 * PI * t * v).sin_cos();
            c += co;
            s += si;
            c2 += co * co;
            s2 += si * si;
        }
        let psi = Complex64::new(c / nf, s / nf);
        let var = (c2 / nf - psi.re * psi.re) + (s2 / nf - psi.im * psi.im);
        let pred = predicted_characteristic(t, wave.count());
        report.sup_error = report.sup_error.max((psi - pred).norm());
        report.t.push(t);
        report.empirical.push(psi);
        report.predicted.push(pred);
        report.stderr.push((var.max(0.0) / (nf - 1.0)).sqrt());
    }
    Ok(report)
}
