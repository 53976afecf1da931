use std::f64::consts::PI;

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::gaussian::SpectralMeasure;
use crate::linalg::cholesky;
use crate::rng::{child_rng, standard_normal};

/// Gaussian draws used for atomic measures.
pub const KAC_RICE_SAMPLES: usize = 1_000_000;
const CHUNKS: usize = 64;
const KAC_RICE_SEED: u64 = 0x4b61_6352_6963_6531;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KacRiceDensity {
    /// Expected zero-set volume per unit volume.
    pub value: f64,
    /// Zero for closed forms.
    pub stderr: f64,
    pub samples: usize,
}

/// E‖∇F(0)‖ / √(2π) for the unit-variance field with spectral measure ν;
/// ∇F(0) is centered Gaussian with covariance 4π² ∫ λλᵀ dν.
pub fn kac_rice_density(measure: &SpectralMeasure) -> Result<KacRiceDensity> {
    if !measure.hyperplane_ok() {
        return Err(Error::DegenerateMeasure(
            "support lies in a hyperplane, so the gradient covariance is singular".into(),
        ));
    }
    let m = measure.dim();
    if let SpectralMeasure::UniformSphere { .. } = measure {
        // isotropic: E‖∇F‖ = σ √2 Γ((m+1)/2) / Γ(m/2), σ² = 4π²/m
        let sigma = 2.0 * PI / (m as f64).sqrt();
        let mean_norm = sigma * 2f64.sqrt() * (ln_gamma((m as f64 + 1.0) / 2.0) - ln_gamma(m as f64 / 2.0)).exp();
        return Ok(KacRiceDensity {
            value: mean_norm / (2.0 * PI).sqrt(),
            stderr: 0.0,
            samples: 0,
        });
    }
    let cov: Vec<f64> = measure.second_moment().iter().map(|c| 4.0 * PI * PI * c).collect();
    let l = cholesky(&cov, m).ok_or_else(|| Error::DegenerateMeasure("gradient covariance is not positive definite".into()))?;
    let per_chunk = KAC_RICE_SAMPLES / CHUNKS;
    let sums: Vec<(f64, f64)> = (0..CHUNKS as u64)
        .into_par_iter()
        .map(|c| {
            let mut rng = child_rng(KAC_RICE_SEED, c);
            let mut z = vec![0.0; m];
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..per_chunk {
                for zi in z.iter_mut() {
                    *zi = standard_normal(&mut rng);
                }
                let mut norm2 = 0.0;
                for i in 0..m {
                    let g: f64 = (0..=i).map(|j| l[i * m + j] * z[j]).sum();
                    norm2 += g * g;
                }
                let n = norm2.sqrt();
                s += n;
                s2 += n * n;
            }
            (s, s2)
        })
        .collect();
    let (mut s, mut s2) = (0.0, 0.0);
    for (a, b) in sums {
        s += a;
        s2 += b;
    }
    let n = (per_chunk * CHUNKS) as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean) * n / (n - 1.0);
    let scale = (2.0 * PI).sqrt();
    Ok(KacRiceDensity {
        value: mean / scale,
        stderr: (var / n).sqrt() / scale,
        samples: per_chunk * CHUNKS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::{empirical_measure, generate_uniform_directions};

    #[test]
    fn uniform_closed_forms() {
        let c2 = kac_rice_density(&SpectralMeasure::uniform(2).unwrap()).unwrap();
        assert!((c2.value - PI / 2f64.sqrt()).abs() < 1e-12);
        let c3 = kac_rice_density(&SpectralMeasure::uniform(3).unwrap()).unwrap();
        assert!((c3.value - 4.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn isotropic_atomic_measure_matches_closed_form() {
        // four equally spaced directions have an isotropic second moment
        let mu = SpectralMeasure::symmetric_atomic(
            2,
            vec![
                (vec![1.0, 0.0], 1.0),
                (vec![0.0, 1.0], 1.0),
                (vec![0.5f64.sqrt(), 0.5f64.sqrt()], 1.0),
                (vec![-(0.5f64.sqrt()), 0.5f64.sqrt()], 1.0),
            ],
        )
        .unwrap();
        let c = kac_rice_density(&mu).unwrap();
        assert!((c.value - PI / 2f64.sqrt()).abs() < 4.0 * c.stderr, "{c:?}");
        assert_eq!(c.samples, KAC_RICE_SAMPLES);
    }

    #[test]
    fn anisotropic_measure_against_quadrature() {
        // diagonal gradient covariance diag(s1², s2²)
        let mu = SpectralMeasure::symmetric_atomic(2, vec![(vec![1.0, 0.0], 3.0), (vec![0.0, 1.0], 1.0)]).unwrap();
        let c = kac_rice_density(&mu).unwrap();
        let (s1, s2) = (2.0 * PI * 0.75f64.sqrt(), 2.0 * PI * 0.25f64.sqrt());
        let n = 200_000;
        let integral: f64 = (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) / n as f64 * 2.0 * PI;
                (s1 * s1 * t.cos().powi(2) + s2 * s2 * t.sin().powi(2)).sqrt()
            })
            .sum::<f64>()
            / n as f64;
        // for z ~ N(0, I_2), ‖z‖ is Rayleigh with mean √(π/2), independent of the angle
        let exact = (PI / 2.0).sqrt() * integral / (2.0 * PI).sqrt();
        assert!((c.value - exact).abs() < 4.0 * c.stderr + 1e-9, "{} vs {}", c.value, exact);
    }

    #[test]
    fn scale_of_weights_does_not_matter() {
        let dirs = generate_uniform_directions(2, 7, 1).unwrap();
        let a = kac_rice_density(&empirical_measure(&dirs)).unwrap();
        let atoms: Vec<(Vec<f64>, f64)> = dirs.vectors().iter().map(|v| (v.clone(), 12.5)).collect();
        let b = kac_rice_density(&SpectralMeasure::symmetric_atomic(2, atoms).unwrap()).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn hyperplane_measure_is_rejected() {
        let line = SpectralMeasure::symmetric_atomic(2, vec![(vec![1.0, 0.0], 1.0)]).unwrap();
        assert!(matches!(kac_rice_density(&line), Err(Error::DegenerateMeasure(_))));
    }
}
