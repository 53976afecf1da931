//! Hyperspherical-cube partition of S^{m-1}.
//!
//! The cube `[0,1]^{m-1}` is split into `K^{m-1}` boxes and pushed onto the
//! sphere by the angle map [`hyperspherical_map`]. Each signed direction ±r_n
//! is assigned to exactly one box; boxes whose mass exceeds `delta` are
//! selected.

use std::f64::consts::PI;

use crate::directions::DirectionSet;
use crate::error::{invalid, Error, Result};

/// Upper bound on the number of cells a partition may allocate.
pub const MAX_CELLS: usize = 1 << 24;

/// Tolerance for treating a center coordinate as zero in the sign rule.
const SIGN_TOL: f64 = 1e-12;

/// The angle map G: [0,1]^{m-1} -> S^{m-1}.
pub fn hyperspherical_map(theta: &[f64], m: usize) -> Vec<f64> {
    assert!(m >= 2 && theta.len() == m - 1, "theta must have m - 1 coordinates");
    let mut out = vec![0.0; m];
    let mut sin_prod = 1.0;
    for i in 0..m - 2 {
        let a = PI * theta[i];
        out[i] = sin_prod * a.cos();
        sin_prod *= a.sin();
    }
    let a = 2.0 * PI * theta[m - 2];
    out[m - 2] = sin_prod * a.cos();
    out[m - 1] = sin_prod * a.sin();
    out
}

/// Angle coordinates of a unit vector, each clamped into `[0, 1)`.
pub fn inverse_hyperspherical_map(v: &[f64]) -> Vec<f64> {
    let m = v.len();
    let mut theta = vec![0.0; m - 1];
    let mut tail_sq: f64 = v.iter().map(|c| c * c).sum();
    for i in 0..m - 2 {
        let rem = tail_sq.max(0.0).sqrt();
        theta[i] = if rem > 0.0 {
            (v[i] / rem).clamp(-1.0, 1.0).acos() / PI
        } else {
            0.0
        };
        tail_sq -= v[i] * v[i];
    }
    let mut last = v[m - 1].atan2(v[m - 2]) / (2.0 * PI);
    if last < 0.0 {
        last += 1.0;
    }
    theta[m - 2] = last;
    for t in &mut theta {
        *t = t.clamp(0.0, 1.0 - f64::EPSILON);
    }
    theta
}

/// Lipschitz constant used for the cell-radius tolerance, `2π√(m-1)`.
pub fn lipschitz_constant(m: usize) -> f64 {
    2.0 * PI * ((m - 1) as f64).sqrt()
}

/// True iff the last non-zero coordinate is positive.
pub fn is_positive_representative(v: &[f64]) -> bool {
    v.iter()
        .rev()
        .find(|c| c.abs() > SIGN_TOL)
        .is_some_and(|c| *c > 0.0)
}

#[derive(Debug, Clone)]
pub struct SpherePartition {
    dim: usize,
    resolution: usize,
    delta: f64,
    direction_count: usize,
    centers: Vec<Vec<f64>>,
    masses: Vec<f64>,
    /// Signed atoms per cell as `(n, sign)`.
    members: Vec<Vec<(usize, f64)>>,
    selected: Vec<usize>,
    selected_positive: Vec<usize>,
}

impl SpherePartition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn direction_count(&self) -> usize {
        self.direction_count
    }

    pub fn cell_count(&self) -> usize {
        self.centers.len()
    }

    pub fn center(&self, k: usize) -> &[f64] {
        &self.centers[k]
    }

    pub fn mass(&self, k: usize) -> f64 {
        self.masses[k]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn members(&self, k: usize) -> &[(usize, f64)] {
        &self.members[k]
    }

    /// Selected cells 𝒦 (mass above `delta`), in increasing order.
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    /// Selected cells whose center passes the positive sign rule.
    pub fn selected_positive(&self) -> &[usize] {
        &self.selected_positive
    }

    /// Σ_{k∈𝒦} μ_r(I_k).
    pub fn selected_mass(&self) -> f64 {
        self.selected.iter().map(|&k| self.masses[k]).sum()
    }

    /// Cell containing the unit vector `v`.
    pub fn cell_of(&self, v: &[f64]) -> usize {
        cell_index(&inverse_hyperspherical_map(v), self.resolution)
    }

    /// Bound on |r_n - ζ^k| for directions assigned to cell k.
    pub fn assignment_radius(&self) -> f64 {
        lipschitz_constant(self.dim) * ((self.dim - 1) as f64).sqrt() / self.resolution as f64
    }

    /// Cell whose center is closest to `-ζ^k`.
    pub fn antipodal_cell(&self, k: usize) -> usize {
        let neg: Vec<f64> = self.centers[k].iter().map(|c| -c).collect();
        self.cell_of(&neg)
    }
}

/// Row-major flat index of the box containing angle coordinates `theta`.
/// Points on a box face go to the lower-index box.
fn cell_index(theta: &[f64], k: usize) -> usize {
    theta.iter().fold(0usize, |acc, &t| {
        let scaled = t * k as f64;
        let i = (scaled.ceil() as isize - 1).clamp(0, k as isize - 1) as usize;
        acc * k + i
    })
}

fn cell_center_theta(mut flat: usize, k: usize, axes: usize) -> Vec<f64> {
    let mut theta = vec![0.0; axes];
    for a in (0..axes).rev() {
        let i = flat % k;
        flat /= k;
        theta[a] = (i as f64 + 0.5) / k as f64;
    }
    theta
}

/// Builds the partition from the signed atoms ±r_n of `dirs`.
pub fn build_partition(dirs: &DirectionSet, resolution: usize, delta: f64) -> Result<SpherePartition> {
    if resolution < 1 {
        return Err(invalid("K", "resolution must be >= 1"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("need 0 < delta < 1, got {delta}")));
    }
    let m = dirs.dim();
    let axes = m - 1;
    let cells = (0..axes).try_fold(1usize, |acc, _| acc.checked_mul(resolution));
    let cells = match cells {
        Some(c) if c <= MAX_CELLS => c,
        _ => {
            return Err(Error::Resource(format!(
                "K^(m-1) = {resolution}^{axes} cells exceeds {MAX_CELLS}"
            )))
        }
    };
    let centers: Vec<Vec<f64>> = (0..cells)
        .map(|c| hyperspherical_map(&cell_center_theta(c, resolution, axes), m))
        .collect();
    let mut members = vec![Vec::new(); cells];
    for (n, sign, v) in dirs.signed() {
        let signed: Vec<f64> = v.iter().map(|c| sign * c).collect();
        let k = cell_index(&inverse_hyperspherical_map(&signed), resolution);
        members[k].push((n, sign));
    }
    let total = 2.0 * dirs.count() as f64;
    let masses: Vec<f64> = members.iter().map(|m| m.len() as f64 / total).collect();
    let selected: Vec<usize> = (0..cells).filter(|&k| masses[k] > delta).collect();
    let selected_positive = selected
        .iter()
        .copied()
        .filter(|&k| is_positive_representative(&centers[k]))
        .collect();
    Ok(SpherePartition {
        dim: m,
        resolution,
        delta,
        direction_count: dirs.count(),
        centers,
        masses,
        members,
        selected,
        selected_positive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::generate_uniform_directions;
    use crate::linalg::{norm, sub};

    #[test]
    fn map_examples() {
        assert_eq!(hyperspherical_map(&[0.0, 0.0, 0.0], 4), vec![1.0, 0.0, 0.0, 0.0]);
        let q = hyperspherical_map(&[0.25], 2);
        assert!(q[0].abs() < 1e-15 && (q[1] - 1.0).abs() < 1e-15);
        let v = hyperspherical_map(&[0.5, 0.125], 3);
        assert!((norm(&v) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_map_round_trips_inside_the_cube() {
        for theta in [[0.3, 0.7], [0.9, 0.05], [0.5, 0.5]] {
            let v = hyperspherical_map(&theta, 3);
            let back = inverse_hyperspherical_map(&v);
            assert!((back[0] - theta[0]).abs() < 1e-12);
            assert!((back[1] - theta[1]).abs() < 1e-12);
        }
        let v = hyperspherical_map(&[0.2, 0.6, 0.3], 4);
        let back = inverse_hyperspherical_map(&v);
        for (a, b) in back.iter().zip([0.2, 0.6, 0.3]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_ties_go_to_lower_cell() {
        assert_eq!(cell_index(&[0.25], 4), 0);
        assert_eq!(cell_index(&[0.0], 4), 0);
        assert_eq!(cell_index(&[0.2500001], 4), 1);
        assert_eq!(cell_index(&[0.999], 4), 3);
    }

    #[test]
    fn single_cell_partition() {
        let d = generate_uniform_directions(2, 1, 0).unwrap();
        let p = build_partition(&d, 1, 0.1).unwrap();
        assert_eq!(p.cell_count(), 1);
        assert_eq!(p.mass(0), 1.0);
        assert_eq!(p.selected(), &[0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        let d = generate_uniform_directions(2, 4, 0).unwrap();
        assert!(build_partition(&d, 0, 0.1).is_err());
        assert!(build_partition(&d, 4, 1.0).is_err());
        assert!(build_partition(&d, 4, 0.0).is_err());
        let d6 = generate_uniform_directions(6, 8, 0).unwrap();
        assert!(matches!(build_partition(&d6, 1 << 10, 0.1), Err(Error::Resource(_))));
    }

    #[test]
    fn selected_mass_and_cell_radius_bounds() {
        let d = generate_uniform_directions(2, 512, 2).unwrap();
        let delta = 1.0 / 256.0;
        let p = build_partition(&d, 8, delta).unwrap();
        let total: f64 = p.masses().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(p.selected_mass() >= 1.0 - delta * 8.0);
        let mut worst: f64 = 0.0;
        for k in 0..p.cell_count() {
            for &(n, s) in p.members(k) {
                let v: Vec<f64> = d.vector(n).iter().map(|c| s * c).collect();
                worst = worst.max(norm(&sub(&v, p.center(k))));
            }
        }
        assert!(worst <= PI / 8.0 + 1e-9);
        assert!(worst <= p.assignment_radius());
    }

    #[test]
    fn every_atom_lands_in_exactly_one_cell() {
        let d = generate_uniform_directions(3, 200, 8).unwrap();
        let p = build_partition(&d, 6, 1e-3).unwrap();
        let assigned: usize = (0..p.cell_count()).map(|k| p.members(k).len()).sum();
        assert_eq!(assigned, 400);
        for k in 0..p.cell_count() {
            for &(n, s) in p.members(k) {
                let v: Vec<f64> = d.vector(n).iter().map(|c| s * c).collect();
                assert_eq!(p.cell_of(&v), k);
            }
        }
    }

    #[test]
    fn positive_cells_pair_with_antipodes_in_the_plane() {
        let d = generate_uniform_directions(2, 256, 4).unwrap();
        let p = build_partition(&d, 8, 1.0 / 64.0).unwrap();
        let mut paired: Vec<usize> = p
            .selected_positive()
            .iter()
            .flat_map(|&k| [k, p.antipodal_cell(k)])
            .collect();
        paired.sort_unstable();
        assert_eq!(paired, p.selected());
        for k in 0..p.cell_count() {
            assert_eq!(p.members(k).len(), p.members(p.antipodal_cell(k)).len());
        }
    }
}
