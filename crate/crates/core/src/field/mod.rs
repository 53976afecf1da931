//! Deterministic monochromatic waves, their windows, the cell-averaged
//! approximation φ_x, wave packets b_k, Bessel functions and covariance
//! kernels.

pub mod bessel;
mod kernel;
mod plane;
mod wave;

pub use bessel::{bessel_j, bessel_j_over_power, bessel_zero_table};
pub use kernel::{covariance_kernel, KernelSpec};
pub use plane::{FnField, PlaneWaveSum};
pub use wave::{
    eval_bk, eval_f, eval_grad_f, eval_phi, eval_phi_complex, eval_window, CoefficientSet,
    MonochromaticWave, ObservationWindow, WindowedWave,
};

/// A real scalar field on R^m.
///
/// `fill_lattice` has a generic point-by-point default; sums of plane waves
/// override it with a separable phase recurrence.
pub trait Field: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Gradient; the default is a central difference with step 1e-6.
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let step = 1e-6;
        let mut p = x.to_vec();
        (0..x.len())
            .map(|i| {
                p[i] = x[i] + step;
                let a = self.value(&p);
                p[i] = x[i] - step;
                let b = self.value(&p);
                p[i] = x[i];
                (a - b) / (2.0 * step)
            })
            .collect()
    }

    /// Values at `origin + h * index` over a row-major lattice of `shape`
    /// (last axis fastest).
    fn fill_lattice(&self, origin: &[f64], h: f64, shape: &[usize]) -> Vec<f64> {
        use rayon::prelude::*;
        let total: usize = shape.iter().product();
        let row = *shape.last().expect("non-empty shape");
        let mut out = vec![0.0; total];
        out.par_chunks_mut(row).enumerate().for_each(|(r, chunk)| {
            let mut p = lattice_point(origin, h, shape, r * row);
            let last = p.len() - 1;
            for (i, v) in chunk.iter_mut().enumerate() {
                p[last] = origin[last] + h * i as f64;
                *v = self.value(&p);
            }
        });
        out
    }
}

/// Coordinates of the flat lattice index `flat`.
pub fn lattice_point(origin: &[f64], h: f64, shape: &[usize], mut flat: usize) -> Vec<f64> {
    let mut p = vec![0.0; shape.len()];
    for a in (0..shape.len()).rev() {
        let i = flat % shape[a];
        flat /= shape[a];
        p[a] = origin[a] + h * i as f64;
    }
    p
}

impl<F: Field + ?Sized> Field for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
    fn fill_lattice(&self, origin: &[f64], h: f64, shape: &[usize]) -> Vec<f64> {
        (**self).fill_lattice(origin, h, shape)
    }
}
