use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::Rng;

use super::plane::{e, PlaneWaveSum};
use super::Field;
use crate::directions::DirectionSet;
use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, norm};
use crate::partition::SpherePartition;
use crate::rng;

/// Unit-modulus coefficients a_1..a_N; a_{-n} = conj(a_n) is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    values: Vec<Complex64>,
}

impl CoefficientSet {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("N", "at least one coefficient is required"));
        }
        if let Some((i, a)) = values
            .iter()
            .enumerate()
            .find(|(_, a)| (a.norm() - 1.0).abs() > 1e-12)
        {
            return Err(invalid("coeffs", format!("|a_{i}| = {} is not 1", a.norm())));
        }
        Ok(Self { values })
    }

    /// a_n = e(θ_n) with θ_n uniform on [0, 1).
    pub fn random_phase(count: usize, seed: u64) -> Self {
        let mut r = rng::rng_from_seed(seed);
        let values = (0..count).map(|_| e(r.gen::<f64>())).collect();
        Self { values }
    }

    pub fn all_ones(count: usize) -> Self {
        Self {
            values: vec![Complex64::new(1.0, 0.0); count],
        }
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// f(x) = (2N)^{-1/2} Σ_{|n|≤N} a_n e(⟨r_n, x⟩), a real solution of Δf = -4π² f.
#[derive(Debug, Clone)]
pub struct MonochromaticWave {
    dirs: DirectionSet,
    coeffs: CoefficientSet,
    sum: PlaneWaveSum,
}

impl MonochromaticWave {
    pub fn new(dirs: DirectionSet, coeffs: CoefficientSet) -> Result<Self> {
        if dirs.count() != coeffs.count() {
            return Err(invalid(
                "coeffs",
                format!("{} coefficients for {} directions", coeffs.count(), dirs.count()),
            ));
        }
        let scale = 2.0 / (2.0 * dirs.count() as f64).sqrt();
        let wavevectors = dirs.vectors().iter().flatten().copied().collect();
        let c = coeffs.values().iter().map(|a| a * scale).collect();
        let sum = PlaneWaveSum::new(dirs.dim(), wavevectors, c);
        Ok(Self { dirs, coeffs, sum })
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.dirs
    }

    pub fn coefficients(&self) -> &CoefficientSet {
        &self.coeffs
    }

    pub fn count(&self) -> usize {
        self.dirs.count()
    }

    pub fn plane_waves(&self) -> &PlaneWaveSum {
        &self.sum
    }

    /// Writes `m N` then one line per term: the m components of r_n
    /// followed by Re a_n and Im a_n.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.dirs.dim(), self.count())?;
        for (r, a) in self.dirs.vectors().iter().zip(self.coeffs.values()) {
            let mut line = String::new();
            for c in r.iter().chain([&a.re, &a.im]) {
                if !line.is_empty() {
                    line.push(' ');
                }
                write!(line, "{c:.16e}").expect("write to string");
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input
            .lines()
            .map(|l| l.map_err(Error::from))
            .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()));
        let header = lines.next().ok_or_else(|| Error::Parse("missing header line".into()))??;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|s| s.parse().map_err(|e| Error::Parse(format!("bad header: {e}"))))
            .collect::<Result<_>>()?;
        let [dim, count] = head[..] else {
            return Err(Error::Parse(format!("header needs `m N`, got `{header}`")));
        };
        let mut vectors = Vec::with_capacity(count);
        let mut coeffs = Vec::with_capacity(count);
        for i in 0..count {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing term line {i}")))??;
            let v = line
                .split_whitespace()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", i + 2))))
                .collect::<Result<Vec<_>>>()?;
            if v.len() != dim + 2 {
                return Err(Error::Parse(format!("line {}: expected {} numbers, got {}", i + 2, dim + 2, v.len())));
            }
            coeffs.push(Complex64::new(v[dim], v[dim + 1]));
            vectors.push(v[..dim].to_vec());
        }
        Self::new(DirectionSet::new(dim, vectors)?, CoefficientSet::new(coeffs)?)
    }

    /// a_n e(⟨r_n, x⟩) for every n.
    fn phases_at(&self, x: &[f64]) -> Vec<Complex64> {
        self.dirs
            .vectors()
            .iter()
            .zip(self.coeffs.values())
            .map(|(r, a)| a * e(dot(r, x)))
            .collect()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dirs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dirs.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

impl Field for MonochromaticWave {
    fn dim(&self) -> usize {
        self.dirs.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.sum.value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.sum.gradient(x)
    }
    fn fill_lattice(&self, origin: &[f64], h: f64, shape: &[usize]) -> Vec<f64> {
        self.sum.fill_lattice(origin, h, shape)
    }
}

pub fn eval_f(wave: &MonochromaticWave, x: &[f64]) -> Result<f64> {
    wave.check_dim(x)?;
    let scale = 2.0 / (2.0 * wave.count() as f64).sqrt();
    let s: f64 = wave
        .dirs
        .vectors()
        .iter()
        .zip(wave.coeffs.values())
        .map(|(r, a)| {
            let (sn, cs) = (std::f64::consts::TAU * dot(r, x)).sin_cos();
            a.re * cs - a.im * sn
        })
        .sum();
    Ok(scale * s)
}

pub fn eval_grad_f(wave: &MonochromaticWave, x: &[f64]) -> Result<Vec<f64>> {
    wave.check_dim(x)?;
    Ok(wave.sum.gradient(x))
}

/// Center x, window radius W, ambient radius R and smoothness order s.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationWindow {
    pub center: Vec<f64>,
    pub radius: f64,
    pub ambient_radius: f64,
    pub smoothness: u32,
}

impl ObservationWindow {
    pub fn new(center: Vec<f64>, radius: f64, ambient_radius: f64) -> Result<Self> {
        if !(radius >= 1.0) {
            return Err(invalid("W", format!("window radius must be >= 1, got {radius}")));
        }
        if !(ambient_radius > radius) {
            return Err(invalid("R", format!("need R > W, got R = {ambient_radius}, W = {radius}")));
        }
        if norm(&center) > ambient_radius {
            return Err(invalid("x", "window center lies outside B(R)"));
        }
        Ok(Self {
            center,
            radius,
            ambient_radius,
            smoothness: 0,
        })
    }

    pub fn with_smoothness(mut self, s: u32) -> Self {
        self.smoothness = s;
        self
    }

    fn check(&self, y: &[f64]) -> Result<()> {
        let n = norm(y);
        if n > self.radius {
            return Err(Error::OutOfWindow {
                norm: n,
                radius: self.radius,
            });
        }
        Ok(())
    }
}

/// F_x(y) = f(x + y) with the phases e(⟨r_n, x⟩) folded into the coefficients.
#[derive(Debug, Clone)]
pub struct WindowedWave {
    window: ObservationWindow,
    shifted: PlaneWaveSum,
}

impl WindowedWave {
    pub fn new(wave: &MonochromaticWave, window: ObservationWindow) -> Result<Self> {
        wave.check_dim(&window.center)?;
        let shifted = wave.sum.shifted(&window.center);
        Ok(Self { window, shifted })
    }

    pub fn window(&self) -> &ObservationWindow {
        &self.window
    }

    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        self.window.check(y)?;
        Ok(self.shifted.value(y))
    }

    /// The unrestricted translate y ↦ f(x + y).
    pub fn as_field(&self) -> &PlaneWaveSum {
        &self.shifted
    }
}

pub fn eval_window(wave: &MonochromaticWave, window: &ObservationWindow, y: &[f64]) -> Result<f64> {
    WindowedWave::new(wave, window.clone())?.eval(y)
}

/// b_k(x) = (2N μ_r(I_k))^{-1/2} Σ_{r_n ∈ I_k} a_n e(⟨r_n, x⟩) for k ∈ 𝒦,
/// in the order of [`SpherePartition::selected`].
pub fn eval_bk(wave: &MonochromaticWave, partition: &SpherePartition, x: &[f64]) -> Result<Vec<Complex64>> {
    wave.check_dim(x)?;
    check_partition(wave, partition)?;
    let u = wave.phases_at(x);
    Ok(bk_from_phases(partition, &u))
}

pub(crate) fn bk_from_phases(partition: &SpherePartition, u: &[Complex64]) -> Vec<Complex64> {
    partition
        .selected()
        .iter()
        .map(|&k| {
            let members = partition.members(k);
            debug_assert!(!members.is_empty());
            let s: Complex64 = members
                .iter()
                .map(|&(n, sign)| if sign > 0.0 { u[n] } else { u[n].conj() })
                .sum();
            s / (members.len() as f64).sqrt()
        })
        .collect()
}

fn check_partition(wave: &MonochromaticWave, partition: &SpherePartition) -> Result<()> {
    if partition.dim() != wave.dirs.dim() || partition.direction_count() != wave.count() {
        return Err(invalid("partition", "partition was not built from this wave's directions"));
    }
    if partition.selected().is_empty() {
        return Err(Error::DegeneratePartition("no cell exceeds the mass threshold".into()));
    }
    Ok(())
}

/// Σ_{k∈𝒦} μ_r(I_k)^{1/2} b_k(x) e(⟨ζ^k, y⟩) as a complex number.
pub fn eval_phi_complex(
    wave: &MonochromaticWave,
    partition: &SpherePartition,
    window: &ObservationWindow,
    y: &[f64],
) -> Result<Complex64> {
    window.check(y)?;
    let b = eval_bk(wave, partition, &window.center)?;
    Ok(partition
        .selected()
        .iter()
        .zip(&b)
        .map(|(&k, bk)| bk * partition.mass(k).sqrt() * e(dot(partition.center(k), y)))
        .sum())
}

/// φ_x(y) = Σ_{k∈𝒦} μ_r(I_k)^{1/2} Re(b_k(x) e(⟨ζ^k, y⟩)).
///
/// When the selected cells pair up antipodally the complex sum is already
/// real and this is that value.
pub fn eval_phi(
    wave: &MonochromaticWave,
    partition: &SpherePartition,
    window: &ObservationWindow,
    y: &[f64],
) -> Result<f64> {
    Ok(eval_phi_complex(wave, partition, window, y)?.re)
}
