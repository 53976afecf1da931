//! Spectral measures and the Gaussian comparison fields they define.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::field::{Field, PlaneWaveSum};
use crate::grid::{finite_diff_gradient, ScalarGrid};
use crate::linalg::{dot, norm, numerical_rank};
use crate::partition::{is_positive_representative, SpherePartition};
use crate::rng;

/// Default number of plane waves used to approximate the isotropic field.
pub const DEFAULT_PLANE_WAVES: usize = 1024;
/// Default nondegeneracy threshold.
pub const DEFAULT_NONDEGENERACY_THRESHOLD: f64 = 1e-3;

/// Symmetric atomic measure stored as positive representatives `v`, each
/// carrying the weight of one of the two atoms `±v`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    dim: usize,
    pairs: Vec<(Vec<f64>, f64)>,
}

impl AtomicMeasure {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(v, w)`: atoms at `v` and `-v`, each of weight `w`.
    pub fn pairs(&self) -> &[(Vec<f64>, f64)] {
        &self.pairs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralMeasure {
    Atomic(AtomicMeasure),
    UniformSphere { dim: usize },
}

impl SpectralMeasure {
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("m", format!("dimension must be >= 2, got {dim}")));
        }
        Ok(Self::UniformSphere { dim })
    }

    /// Symmetrized, normalized atomic measure from `(direction, mass)` pairs.
    ///
    /// Each direction contributes `mass / 2` to itself and to its antipode;
    /// directions that coincide up to sign (within 1e-9) are merged. Masses
    /// are rescaled to total 1.
    pub fn symmetric_atomic(dim: usize, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("m", format!("dimension must be >= 2, got {dim}")));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if atoms.is_empty() || !(total > 0.0) {
            return Err(invalid("atoms", "measure needs positive total mass"));
        }
        let mut pairs: Vec<(Vec<f64>, f64)> = Vec::new();
        for (v, mass) in atoms {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if mass < 0.0 {
                return Err(invalid("atoms", "negative mass"));
            }
            let n = norm(&v);
            if (n - 1.0).abs() > 1e-9 {
                return Err(invalid("atoms", format!("atom of norm {n} is not on the sphere")));
            }
            let mut rep: Vec<f64> = v.iter().map(|c| c / n).collect();
            if !is_positive_representative(&rep) {
                rep.iter_mut().for_each(|c| *c = -*c);
            }
            let w = 0.5 * mass / total;
            match pairs
                .iter_mut()
                .find(|(p, _)| p.iter().zip(&rep).all(|(a, b)| (a - b).abs() <= 1e-9))
            {
                Some(slot) => slot.1 += w,
                None => pairs.push((rep, w)),
            }
        }
        Ok(Self::Atomic(AtomicMeasure { dim, pairs }))
    }

    /// Pairs `(v, mass)` taken as given; atoms ±v each get `mass / 2`.
    pub(crate) fn symmetric_atomic_unchecked(dim: usize, atoms: Vec<(Vec<f64>, f64)>) -> Self {
        Self::Atomic(AtomicMeasure {
            dim,
            pairs: atoms.into_iter().map(|(v, m)| (v, 0.5 * m)).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Atomic(a) => a.dim,
            Self::UniformSphere { dim } => *dim,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Self::Atomic(_))
    }

    /// Full atom list `(direction, weight)`, both signs; `None` for the uniform measure.
    pub fn atoms(&self) -> Option<Vec<(Vec<f64>, f64)>> {
        match self {
            Self::Atomic(a) => Some(
                a.pairs
                    .iter()
                    .flat_map(|(v, w)| [(v.clone(), *w), (v.iter().map(|c| -c).collect(), *w)])
                    .collect(),
            ),
            Self::UniformSphere { .. } => None,
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            Self::Atomic(a) => a.pairs.iter().map(|p| 2.0 * p.1).sum(),
            Self::UniformSphere { .. } => 1.0,
        }
    }

    /// Mean vector, summed pair by pair (exactly zero for atomic measures).
    pub fn mean(&self) -> Vec<f64> {
        let m = self.dim();
        let mut out = vec![0.0; m];
        if let Self::Atomic(a) = self {
            for (v, w) in &a.pairs {
                for i in 0..m {
                    out[i] += w * v[i] + w * (-v[i]);
                }
            }
        }
        out
    }

    /// Every atom at `v` has a partner at `-v` with equal weight.
    pub fn is_symmetric(&self) -> bool {
        match self.atoms() {
            None => true,
            Some(atoms) => atoms.iter().all(|(v, w)| {
                atoms.iter().any(|(u, x)| {
                    x == w && u.iter().zip(v).all(|(a, b)| (a + b).abs() <= 1e-12)
                })
            }),
        }
    }

    /// True when the support is not contained in a hyperplane.
    pub fn hyperplane_ok(&self) -> bool {
        match self {
            Self::UniformSphere { .. } => true,
            Self::Atomic(a) => {
                let rows: Vec<Vec<f64>> = a.pairs.iter().filter(|p| p.1 > 0.0).map(|p| p.0.clone()).collect();
                numerical_rank(&rows, a.dim, 1e-10) == a.dim
            }
        }
    }

    /// ∫ λ λᵀ dμ(λ), row-major m × m.
    pub fn second_moment(&self) -> Vec<f64> {
        let m = self.dim();
        let mut out = vec![0.0; m * m];
        match self {
            Self::UniformSphere { .. } => {
                for i in 0..m {
                    out[i * m + i] = 1.0 / m as f64;
                }
            }
            Self::Atomic(a) => {
                for (v, w) in &a.pairs {
                    for i in 0..m {
                        for j in 0..m {
                            out[i * m + j] += 2.0 * w * v[i] * v[j];
                        }
                    }
                }
            }
        }
        out
    }
}

/// μ_K: atoms at ζ^k (k ∈ 𝒦) with weights μ_r(I_k) / Σ_{k∈𝒦} μ_r(I_k), symmetrized.
pub fn measure_from_partition(partition: &SpherePartition) -> Result<SpectralMeasure> {
    if partition.selected().is_empty() {
        return Err(Error::DegeneratePartition("no cell exceeds the mass threshold".into()));
    }
    let atoms = partition
        .selected()
        .iter()
        .map(|&k| (partition.center(k).to_vec(), partition.mass(k)))
        .collect();
    SpectralMeasure::symmetric_atomic(partition.dim(), atoms)
}

/// One sampled Gaussian field; evaluation is a pure function of the point.
#[derive(Debug, Clone)]
pub struct GaussianRealization {
    seed: u64,
    field: PlaneWaveSum,
}

impl GaussianRealization {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn plane_waves(&self) -> &PlaneWaveSum {
        &self.field
    }
}

impl Field for GaussianRealization {
    fn dim(&self) -> usize {
        self.field.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.field.value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.field.gradient(x)
    }
    fn fill_lattice(&self, origin: &[f64], h: f64, shape: &[usize]) -> Vec<f64> {
        self.field.fill_lattice(origin, h, shape)
    }
}

/// F(y) = Σ_{pairs} √(2w) [g cos 2π⟨ζ,y⟩ + h sin 2π⟨ζ,y⟩], g, h i.i.d. N(0,1).
pub fn sample_atomic(measure: &SpectralMeasure, seed: u64) -> Result<GaussianRealization> {
    let SpectralMeasure::Atomic(a) = measure else {
        return Err(invalid("measure", "atomic sampling needs an atomic measure"));
    };
    let mut r = rng::rng_from_seed(seed);
    let mut k = Vec::with_capacity(a.pairs.len() * a.dim);
    let mut c = Vec::with_capacity(a.pairs.len());
    for (v, w) in &a.pairs {
        let s = (2.0 * w).sqrt();
        let g = rng::standard_normal(&mut r);
        let h = rng::standard_normal(&mut r);
        k.extend_from_slice(v);
        c.push(Complex64::new(s * g, -s * h));
    }
    Ok(GaussianRealization {
        seed,
        field: PlaneWaveSum::new(a.dim, k, c),
    })
}

/// F(y) = √(2/M) Σ_j cos(2π⟨ξ_j, y⟩ + φ_j), ξ_j uniform on the sphere, φ_j uniform.
pub fn sample_uniform(m: usize, plane_waves: usize, seed: u64) -> Result<GaussianRealization> {
    if m < 2 {
        return Err(invalid("m", format!("dimension must be >= 2, got {m}")));
    }
    if plane_waves < 16 {
        return Err(invalid(
            "M",
            format!("{plane_waves} plane waves is too degenerate; need at least 16"),
        ));
    }
    let mut r = rng::rng_from_seed(seed);
    let amp = (2.0 / plane_waves as f64).sqrt();
    let mut k = Vec::with_capacity(plane_waves * m);
    let mut c = Vec::with_capacity(plane_waves);
    for _ in 0..plane_waves {
        k.extend(rng::unit_vector(&mut r, m));
        let phi = TAU * r.gen::<f64>();
        c.push(Complex64::from_polar(amp, phi));
    }
    Ok(GaussianRealization {
        seed,
        field: PlaneWaveSum::new(m, k, c),
    })
}

/// Anything that produces a field per trial seed.
pub trait FieldSampler: Sync {
    type Output: Field + Send;

    fn dim(&self) -> usize;

    fn sample(&self, seed: u64) -> Self::Output;
}

/// Gaussian field F_μ; uniform measures use `plane_waves` random plane waves.
#[derive(Debug, Clone)]
pub struct GaussianEnsemble {
    measure: SpectralMeasure,
    plane_waves: usize,
}

impl GaussianEnsemble {
    pub fn new(measure: SpectralMeasure) -> Self {
        Self {
            measure,
            plane_waves: DEFAULT_PLANE_WAVES,
        }
    }

    pub fn with_plane_waves(mut self, plane_waves: usize) -> Result<Self> {
        if plane_waves < 16 {
            return Err(invalid("M", "need at least 16 plane waves"));
        }
        self.plane_waves = plane_waves;
        Ok(self)
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }
}

impl FieldSampler for GaussianEnsemble {
    type Output = GaussianRealization;

    fn dim(&self) -> usize {
        self.measure.dim()
    }

    fn sample(&self, seed: u64) -> GaussianRealization {
        match &self.measure {
            SpectralMeasure::Atomic(_) => sample_atomic(&self.measure, seed),
            SpectralMeasure::UniformSphere { dim } => sample_uniform(*dim, self.plane_waves, seed),
        }
        .expect("ensemble parameters validated at construction")
    }
}

/// Always returns the same field.
#[derive(Debug, Clone)]
pub struct FixedSampler<F>(pub F);

impl<F: Field + Clone + Send> FieldSampler for FixedSampler<F> {
    type Output = F;

    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn sample(&self, _seed: u64) -> F {
        self.0.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondegeneracyReport {
    /// min of |g| + |∇g| over the grid in B(W+1).
    pub min_value_gradient: f64,
    /// min of |g| + |tangential ∇g| over the mesh on ∂B(W).
    pub min_spherical: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn spherical_mesh(m: usize, radius: f64, h: f64) -> Vec<Vec<f64>> {
    let steps = ((TAU * radius / h).ceil() as usize).max(8);
    match m {
        2 => (0..steps)
            .map(|i| {
                let a = TAU * i as f64 / steps as f64;
                vec![radius * a.cos(), radius * a.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci points with roughly one point per h^2 of area (m = 3);
            // higher dimensions fall back to Gaussian-normalized quasi-random points.
            if m == 3 {
                let count = ((4.0 * std::f64::consts::PI * radius * radius / (h * h)).ceil() as usize).max(16);
                let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
                (0..count)
                    .map(|i| {
                        let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                        let rho = (1.0 - z * z).sqrt();
                        let a = golden * i as f64;
                        vec![radius * rho * a.cos(), radius * rho * a.sin(), radius * z]
                    })
                    .collect()
            } else {
                let mut r = rng::rng_from_seed(0x5eed);
                (0..steps * steps)
                    .map(|_| rng::unit_vector(&mut r, m).into_iter().map(|c| c * radius).collect())
                    .collect()
            }
        }
    }
}

fn spherical_functional(x: &[f64], value: f64, grad: &[f64]) -> f64 {
    let r2 = dot(x, x);
    let radial = dot(x, grad) / r2;
    let tangential: f64 = grad
        .iter()
        .zip(x)
        .map(|(g, c)| (g - radial * c).powi(2))
        .sum::<f64>()
        .sqrt();
    value.abs() + tangential
}

/// Samples Ψ_g = |g| + |∇g| on a lattice over B(W+1) and the spherical
/// functional on ∂B(W), both through point evaluations of `field`.
pub fn check_nondegenerate<F: Field + ?Sized>(
    field: &F,
    window: f64,
    h: f64,
    threshold: f64,
) -> Result<NondegeneracyReport> {
    if !(h > 0.0 && h <= 0.1) {
        return Err(invalid("h", format!("need 0 < h <= 0.1, got {h}")));
    }
    if !(threshold > 0.0) {
        return Err(invalid("tau0", "threshold must be positive"));
    }
    let m = field.dim();
    let outer = window + 1.0;
    let n = (outer / h).ceil() as usize;
    let side = 2 * n + 1;
    let origin = vec![-(n as f64) * h; m];
    let shape = vec![side; m];
    let total: usize = shape.iter().product();
    let min_vg = (0..total)
        .into_par_iter()
        .map(|i| {
            let p = crate::field::lattice_point(&origin, h, &shape, i);
            if norm(&p) > outer {
                return f64::INFINITY;
            }
            field.value(&p).abs() + norm(&field.gradient(&p))
        })
        .reduce(|| f64::INFINITY, f64::min);
    let min_sph = spherical_mesh(m, window, h)
        .par_iter()
        .map(|x| spherical_functional(x, field.value(x), &field.gradient(x)))
        .reduce(|| f64::INFINITY, f64::min);
    Ok(NondegeneracyReport {
        min_value_gradient: min_vg,
        min_spherical: min_sph,
        threshold,
        pass: min_vg > threshold && min_sph > threshold,
    })
}

/// Grid-based variant of [`check_nondegenerate`]: gradients by finite
/// differences, spherical values by multilinear interpolation. The grid must
/// cover B(center, W+1).
pub fn check_nondegenerate_grid(grid: &ScalarGrid, window: f64, threshold: f64) -> Result<NondegeneracyReport> {
    let grad = finite_diff_gradient(grid)?;
    let m = grid.dim();
    let center = grid.center();
    let mut min_vg = f64::INFINITY;
    for i in 0..grid.len() {
        let p = grid.point(i);
        let d: Vec<f64> = p.iter().zip(&center).map(|(a, b)| a - b).collect();
        if norm(&d) > window + 1.0 {
            continue;
        }
        let g = &grad[i * m..(i + 1) * m];
        min_vg = min_vg.min(grid.values()[i].abs() + norm(g));
    }
    let mut min_sph = f64::INFINITY;
    for rel in spherical_mesh(m, window, grid.spacing()) {
        let x: Vec<f64> = rel.iter().zip(&center).map(|(a, b)| a + b).collect();
        let (v, g) = grid.interpolate_with(&x, &grad);
        min_sph = min_sph.min(spherical_functional(&rel, v, &g));
    }
    Ok(NondegeneracyReport {
        min_value_gradient: min_vg,
        min_spherical: min_sph,
        threshold,
        pass: min_vg > threshold && min_sph > threshold,
    })
}
