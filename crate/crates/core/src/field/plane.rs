use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{lattice_point, Field};

/// e(t) = exp(2πi t).
#[inline]
pub(crate) fn e(t: f64) -> Complex64 {
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// F(x) = Σ_j Re(c_j e(⟨k_j, x⟩)).
///
/// Every field in this crate (deterministic waves, atomic and uniform
/// Gaussian realizations) is of this form.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveSum {
    dim: usize,
    /// Flat `terms × dim` wavevectors.
    wavevectors: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl PlaneWaveSum {
    pub fn new(dim: usize, wavevectors: Vec<f64>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(wavevectors.len(), dim * coeffs.len());
        Self {
            dim,
            wavevectors,
            coeffs,
        }
    }

    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn wavevector(&self, j: usize) -> &[f64] {
        &self.wavevectors[j * self.dim..(j + 1) * self.dim]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    fn phase(&self, j: usize, x: &[f64]) -> f64 {
        self.wavevector(j).iter().zip(x).map(|(k, c)| k * c).sum()
    }

    /// Same field with every coefficient multiplied by e(⟨k_j, shift⟩),
    /// so that `shifted(s).value(y) == value(s + y)`.
    pub fn shifted(&self, shift: &[f64]) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * e(self.phase(j, shift)))
            .collect();
        Self {
            dim: self.dim,
            wavevectors: self.wavevectors.clone(),
            coeffs,
        }
    }

    /// Wavevectors multiplied by `factor`: G(x) = F(factor · x).
    pub fn rescaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            wavevectors: self.wavevectors.iter().map(|k| k * factor).collect(),
            coeffs: self.coeffs.clone(),
        }
    }

    /// Value and gradient together.
    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut v = 0.0;
        let mut g = vec![0.0; self.dim];
        for (j, c) in self.coeffs.iter().enumerate() {
            let z = c * e(self.phase(j, x));
            v += z.re;
            for (gi, k) in g.iter_mut().zip(self.wavevector(j)) {
                *gi -= TAU * k * z.im;
            }
        }
        (v, g)
    }
}

impl Field for PlaneWaveSum {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| (c * e(self.phase(j, x))).re)
            .sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.value_and_gradient(x).1
    }

    fn fill_lattice(&self, origin: &[f64], h: f64, shape: &[usize]) -> Vec<f64> {
        let total: usize = shape.iter().product();
        let row = *shape.last().expect("non-empty shape");
        let last = self.dim - 1;
        let steps: Vec<Complex64> = (0..self.terms())
            .map(|j| e(self.wavevector(j)[last] * h))
            .collect();
        let mut out = vec![0.0; total];
        out.par_chunks_mut(row).enumerate().for_each_init(
            || vec![Complex64::new(0.0, 0.0); self.terms()],
            |starts, (r, chunk)| {
                let p = lattice_point(origin, h, shape, r * row);
                for (j, s) in starts.iter_mut().enumerate() {
                    *s = self.coeffs[j] * e(self.phase(j, &p));
                }
                accumulate_row(chunk, starts, &steps);
            },
        );
        out
    }
}

/// chunk[i] = Σ_j Re(start_j · step_j^i), four terms at a time.
fn accumulate_row(chunk: &mut [f64], starts: &[Complex64], steps: &[Complex64]) {
    let n = starts.len();
    let mut j = 0;
    while j + 4 <= n {
        let (mut z0, mut z1, mut z2, mut z3) = (starts[j], starts[j + 1], starts[j + 2], starts[j + 3]);
        let (s0, s1, s2, s3) = (steps[j], steps[j + 1], steps[j + 2], steps[j + 3]);
        for v in chunk.iter_mut() {
            *v += (z0.re + z1.re) + (z2.re + z3.re);
            z0 *= s0;
            z1 *= s1;
            z2 *= s2;
            z3 *= s3;
        }
        j += 4;
    }
    for jj in j..n {
        let mut z = starts[jj];
        let s = steps[jj];
        for v in chunk.iter_mut() {
            *v += z.re;
            z *= s;
        }
    }
}

/// A field given by closures; gradients fall back to central differences.
#[derive(Clone)]
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Field for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}
