use std::f64::consts::TAU;

use super::bessel::{bessel_j_over_power, gamma_integer_or_half, MAX_ORDER};
use crate::error::{invalid, Result};
use crate::gaussian::SpectralMeasure;
use crate::linalg::{dot, norm};

/// Covariance kernel of the Gaussian field with a given spectral measure.
///
/// For the uniform measure on S^{m-1} the kernel is
/// `C_m J_Λ(2π|τ|) / (2π|τ|)^Λ` with `Λ = (m-2)/2` and `C_m = 2^Λ Γ(Λ+1)`,
/// which makes the value at the origin 1.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    measure: SpectralMeasure,
    lambda_index: f64,
    normalization: f64,
}

impl KernelSpec {
    pub fn new(measure: SpectralMeasure) -> Result<Self> {
        let m = measure.dim();
        let lambda_index = (m as f64 - 2.0) / 2.0;
        if lambda_index > MAX_ORDER {
            return Err(invalid("m", format!("dimension {m} exceeds the supported Bessel orders")));
        }
        let normalization = 2f64.powf(lambda_index) * gamma_integer_or_half(lambda_index + 1.0);
        Ok(Self {
            measure,
            lambda_index,
            normalization,
        })
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }

    pub fn lambda_index(&self) -> f64 {
        self.lambda_index
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }
}

pub fn covariance_kernel(spec: &KernelSpec, tau: &[f64]) -> f64 {
    match &spec.measure {
        SpectralMeasure::Atomic(a) => a
            .pairs()
            .iter()
            .map(|(v, w)| 2.0 * w * (TAU * dot(v, tau)).cos())
            .sum(),
        SpectralMeasure::UniformSphere { .. } => {
            let z = TAU * norm(tau);
            spec.normalization
                * bessel_j_over_power(spec.lambda_index, z).expect("order validated in KernelSpec::new")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::{empirical_measure, generate_uniform_directions};

    #[test]
    fn value_at_origin_is_one() {
        for m in 2..=6 {
            let k = KernelSpec::new(SpectralMeasure::uniform(m).unwrap()).unwrap();
            assert!((covariance_kernel(&k, &vec![0.0; m]) - 1.0).abs() < 1e-10);
        }
        let d = generate_uniform_directions(3, 40, 1).unwrap();
        let k = KernelSpec::new(empirical_measure(&d)).unwrap();
        assert!((covariance_kernel(&k, &[0.0; 3]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn planar_uniform_kernel_matches_trapezoid_quadrature() {
        // ∫_{S^1} e(⟨τ, λ⟩) dσ(λ) with 10^6 trapezoid nodes, |τ| = 1.
        let n = 1_000_000;
        let mut acc = 0.0;
        for i in 0..n {
            let a = TAU * i as f64 / n as f64;
            acc += (TAU * a.cos()).cos();
        }
        let quad = acc / n as f64;
        let k = KernelSpec::new(SpectralMeasure::uniform(2).unwrap()).unwrap();
        let v = covariance_kernel(&k, &[0.6, 0.8]);
        assert!((v - quad).abs() < 1e-9);
        assert!((v - 0.220_05).abs() < 1e-3);
    }

    #[test]
    fn three_dimensional_uniform_kernel_is_sinc() {
        let k = KernelSpec::new(SpectralMeasure::uniform(3).unwrap()).unwrap();
        for r in [0.1, 0.7, 2.3, 9.0] {
            let z = TAU * r;
            assert!((covariance_kernel(&k, &[0.0, r, 0.0]) - z.sin() / z).abs() < 1e-10);
        }
    }

    #[test]
    fn kernel_is_even_and_bounded() {
        let d = generate_uniform_directions(2, 17, 2).unwrap();
        for spec in [
            KernelSpec::new(empirical_measure(&d)).unwrap(),
            KernelSpec::new(SpectralMeasure::uniform(2).unwrap()).unwrap(),
        ] {
            for t in [[0.3, 0.1], [2.0, -1.0], [5.5, 3.3]] {
                let a = covariance_kernel(&spec, &t);
                let b = covariance_kernel(&spec, &[-t[0], -t[1]]);
                assert!((a - b).abs() < 1e-14);
                assert!(a.abs() <= 1.0 + 1e-12);
            }
        }
    }
}
