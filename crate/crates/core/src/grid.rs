//! Regular sampling of fields on boxes, optionally masked to a ball.
//!
//! Values are stored row-major with the last axis fastest: the flat index of
//! `(i_0, ..., i_{m-1})` is `((i_0 * n_1 + i_1) * n_2 + ...) + i_{m-1}`.
//! Labeling and meshing share this addressing.

use std::io::{BufRead, Write};

use crate::error::{invalid, Error, Result};
use crate::field::{lattice_point, Field};

/// Default spacing: 20 samples per unit wavelength.
pub const DEFAULT_SPACING: f64 = 0.05;
/// Coarsest spacing accepted for unit-wavelength fields.
pub const MAX_SPACING: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct BallMask {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    origin: Vec<f64>,
    spacing: f64,
    shape: Vec<usize>,
    values: Vec<f64>,
    mask: Option<BallMask>,
}

impl ScalarGrid {
    pub fn new(origin: Vec<f64>, spacing: f64, shape: Vec<usize>, values: Vec<f64>, mask: Option<BallMask>) -> Result<Self> {
        let m = origin.len();
        if !(2..=3).contains(&m) {
            return Err(Error::UnsupportedDimension(m));
        }
        if shape.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: shape.len(),
            });
        }
        if !(spacing > 0.0) {
            return Err(invalid("h", "spacing must be positive"));
        }
        if shape.iter().product::<usize>() != values.len() {
            return Err(invalid("values", "value count does not match the shape"));
        }
        if let Some(mask) = &mask {
            let half = shape
                .iter()
                .map(|&n| 0.5 * (n.saturating_sub(1)) as f64 * spacing)
                .fold(f64::INFINITY, f64::min);
            if mask.radius > half + 1e-9 {
                return Err(invalid("mask", "mask radius exceeds half the box extent"));
            }
        }
        Ok(Self {
            origin,
            spacing,
            shape,
            values,
            mask,
        })
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> Option<&BallMask> {
        self.mask.as_ref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mask center, or the box center when unmasked.
    pub fn center(&self) -> Vec<f64> {
        match &self.mask {
            Some(m) => m.center.clone(),
            None => self
                .origin
                .iter()
                .zip(&self.shape)
                .map(|(o, &n)| o + 0.5 * (n - 1) as f64 * self.spacing)
                .collect(),
        }
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        lattice_point(&self.origin, self.spacing, &self.shape, flat)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Flat stride of each axis.
    pub fn strides(&self) -> Vec<usize> {
        let m = self.dim();
        let mut s = vec![1; m];
        for a in (0..m - 1).rev() {
            s[a] = s[a + 1] * self.shape[a + 1];
        }
        s
    }

    /// Whether the vertex lies inside the mask (always true when unmasked).
    pub fn in_mask(&self, flat: usize) -> bool {
        match &self.mask {
            None => true,
            Some(mask) => {
                let p = self.point(flat);
                dist(&p, &mask.center) <= mask.radius
            }
        }
    }

    /// Mask membership of every vertex.
    pub fn mask_flags(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.in_mask(i)).collect()
    }

    /// Whether a vertex is in the outer shell: within one spacing of the mask
    /// sphere, or on a box face when unmasked.
    pub fn on_boundary(&self, flat: usize) -> bool {
        match &self.mask {
            Some(mask) => {
                let p = self.point(flat);
                let d = dist(&p, &mask.center);
                d <= mask.radius && mask.radius - d < self.spacing
            }
            None => self
                .multi_index(flat)
                .iter()
                .zip(&self.shape)
                .any(|(&i, &n)| i == 0 || i + 1 == n),
        }
    }

    /// Copy of the grid with a different mask.
    pub fn with_mask(&self, mask: Option<BallMask>) -> Result<Self> {
        Self::new(self.origin.clone(), self.spacing, self.shape.clone(), self.values.clone(), mask)
    }

    /// Multilinear interpolation of the values and of a companion
    /// vector-valued grid (`m` components per vertex) at `x`.
    pub fn interpolate_with(&self, x: &[f64], vector: &[f64]) -> (f64, Vec<f64>) {
        let m = self.dim();
        let mut base = vec![0usize; m];
        let mut frac = vec![0.0; m];
        for a in 0..m {
            let t = (x[a] - self.origin[a]) / self.spacing;
            let i = (t.floor().max(0.0) as usize).min(self.shape[a] - 2);
            base[a] = i;
            frac[a] = (t - i as f64).clamp(0.0, 1.0);
        }
        let mut v = 0.0;
        let mut g = vec![0.0; m];
        for corner in 0..(1usize << m) {
            let mut w = 1.0;
            let mut idx = base.clone();
            for a in 0..m {
                if corner >> a & 1 == 1 {
                    idx[a] += 1;
                    w *= frac[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            let f = self.flat_index(&idx);
            v += w * self.values[f];
            for a in 0..m {
                g[a] += w * vector[f * m + a];
            }
        }
        (v, g)
    }

    /// Writes the header line `m h n_0 .. n_{m-1} o_0 .. o_{m-1}` followed by
    /// the values as little-endian f64.
    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = format!("{} {}", self.dim(), self.spacing);
        for n in &self.shape {
            header.push_str(&format!(" {n}"));
        }
        for o in &self.origin {
            header.push_str(&format!(" {o}"));
        }
        writeln!(out, "{header}")?;
        for v in &self.values {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a dump written by [`ScalarGrid::write_dump`]; the result is unmasked.
    pub fn read_dump<R: BufRead>(mut input: R) -> Result<Self> {
        let mut header = String::new();
        input.read_line(&mut header)?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let bad = |what: &str| Error::Parse(format!("grid header: {what}"));
        let m: usize = fields.first().ok_or_else(|| bad("missing m"))?.parse().map_err(|_| bad("m"))?;
        if fields.len() != 2 + 2 * m {
            return Err(bad("wrong field count"));
        }
        let h: f64 = fields[1].parse().map_err(|_| bad("h"))?;
        let shape = fields[2..2 + m]
            .iter()
            .map(|s| s.parse::<usize>().map_err(|_| bad("shape")))
            .collect::<Result<Vec<_>>>()?;
        let origin = fields[2 + m..]
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| bad("origin")))
            .collect::<Result<Vec<_>>>()?;
        let total: usize = shape.iter().product();
        let mut bytes = vec![0u8; total * 8];
        input.read_exact(&mut bytes)?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Self::new(origin, h, shape, values, None)
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn check_spacing(h: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(invalid("h", "spacing must be positive"));
    }
    if h > MAX_SPACING {
        return Err(Error::Undersampled { h });
    }
    Ok(())
}

/// Samples `field` on the box circumscribing B(center, radius), masked to the ball.
pub fn sample_on_grid<F: Field + ?Sized>(field: &F, center: &[f64], radius: f64, h: f64) -> Result<ScalarGrid> {
    sample_ball_with_margin(field, center, radius, radius, h)
}

/// Box circumscribing B(center, box_radius), mask B(center, mask_radius).
pub fn sample_ball_with_margin<F: Field + ?Sized>(
    field: &F,
    center: &[f64],
    mask_radius: f64,
    box_radius: f64,
    h: f64,
) -> Result<ScalarGrid> {
    let m = field.dim();
    if !(2..=3).contains(&m) {
        return Err(Error::UnsupportedDimension(m));
    }
    if center.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: center.len(),
        });
    }
    check_spacing(h)?;
    if !(mask_radius >= h) || box_radius < mask_radius {
        return Err(invalid("radius", format!("need h <= radius <= box radius, got {mask_radius}")));
    }
    let n = (box_radius / h - 1e-9).ceil() as usize;
    let shape = vec![2 * n + 1; m];
    let origin: Vec<f64> = center.iter().map(|c| c - n as f64 * h).collect();
    let values = field.fill_lattice(&origin, h, &shape);
    ScalarGrid::new(
        origin,
        h,
        shape,
        values,
        Some(BallMask {
            center: center.to_vec(),
            radius: mask_radius,
        }),
    )
}

/// Samples `field` on the unmasked box [lower, upper].
pub fn sample_box<F: Field + ?Sized>(field: &F, lower: &[f64], upper: &[f64], h: f64) -> Result<ScalarGrid> {
    let m = field.dim();
    if !(2..=3).contains(&m) {
        return Err(Error::UnsupportedDimension(m));
    }
    check_spacing(h)?;
    let shape: Vec<usize> = lower
        .iter()
        .zip(upper)
        .map(|(l, u)| ((u - l) / h + 1e-9).floor() as usize + 1)
        .collect();
    if shape.iter().any(|&n| n < 2) {
        return Err(invalid("box", "box must span at least one cell per axis"));
    }
    let values = field.fill_lattice(lower, h, &shape);
    ScalarGrid::new(lower.to_vec(), h, shape, values, None)
}

/// Gradient by central differences inside and second-order one-sided
/// differences on box faces; `m` components per vertex.
pub fn finite_diff_gradient(grid: &ScalarGrid) -> Result<Vec<f64>> {
    if grid.shape().iter().any(|&n| n < 3) {
        return Err(invalid("shape", "finite differences need at least 3 samples per axis"));
    }
    let m = grid.dim();
    let strides = grid.strides();
    let v = grid.values();
    let h = grid.spacing();
    let mut out = vec![0.0; v.len() * m];
    for i in 0..v.len() {
        let idx = grid.multi_index(i);
        for a in 0..m {
            let s = strides[a];
            let n = grid.shape()[a];
            out[i * m + a] = if idx[a] == 0 {
                (-3.0 * v[i] + 4.0 * v[i + s] - v[i + 2 * s]) / (2.0 * h)
            } else if idx[a] + 1 == n {
                (3.0 * v[i] - 4.0 * v[i - s] + v[i - 2 * s]) / (2.0 * h)
            } else {
                (v[i + s] - v[i - s]) / (2.0 * h)
            };
        }
    }
    Ok(out)
}
