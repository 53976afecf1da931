use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::{ball_volume, mean_stderr, ConstantEstimate, RunMetadata};
use crate::error::{invalid, Error, Result};
use crate::field::Field;
use crate::gaussian::{check_nondegenerate_grid, FieldSampler, DEFAULT_NONDEGENERACY_THRESHOLD};
use crate::grid::{sample_ball_with_margin, sample_on_grid, BallMask, ScalarGrid};
use crate::nodal::{analyze, label_domains, nodal_volume, TopologyClass};
use crate::rng::child_seed;

/// Largest tolerated share of degenerate trials.
pub const MAX_DEGENERATE_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensityKind {
    /// Interior sign components.
    NodalCount,
    /// Zero-set length or area.
    NodalVolume,
    /// Interior zero components of one topology class.
    Class(TopologyClass),
    /// Interior sign components whose subtree has this canonical code.
    Tree(String),
}

impl fmt::Display for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityKind::NodalCount => write!(f, "nodal-count"),
            DensityKind::NodalVolume => write!(f, "nodal-volume"),
            DensityKind::Class(c) => write!(f, "class:{c}"),
            DensityKind::Tree(code) => write!(f, "tree:{code}"),
        }
    }
}

/// Nodal statistics of one nondegenerate trial in B(W).
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub seed: u64,
    pub interior_count: usize,
    pub boundary_count: usize,
    pub volume: f64,
    pub classes: BTreeMap<TopologyClass, usize>,
    pub trees: BTreeMap<String, usize>,
}

impl TrialStats {
    fn value(&self, kind: &DensityKind) -> f64 {
        match kind {
            DensityKind::NodalCount => self.interior_count as f64,
            DensityKind::NodalVolume => self.volume,
            DensityKind::Class(c) => self.classes.get(c).copied().unwrap_or(0) as f64,
            DensityKind::Tree(code) => self.trees.get(code).copied().unwrap_or(0) as f64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleSurvey {
    pub window: f64,
    pub h: f64,
    pub dim: usize,
    pub seed: u64,
    pub requested: usize,
    pub excluded: usize,
    pub trials: Vec<TrialStats>,
}

impl EnsembleSurvey {
    /// Per-trial densities per unit volume.
    pub fn densities(&self, kind: &DensityKind) -> Vec<f64> {
        let vol = ball_volume(self.dim, self.window);
        self.trials.iter().map(|t| t.value(kind) / vol).collect()
    }

    pub fn estimate(&self, kind: DensityKind) -> ConstantEstimate {
        let (mean, stderr) = mean_stderr(&self.densities(&kind));
        ConstantEstimate {
            kind,
            window: self.window,
            trials: self.requested,
            excluded: self.excluded,
            mean,
            stderr,
            metadata: self.metadata(),
        }
    }

    fn metadata(&self) -> RunMetadata {
        RunMetadata {
            seed: Some(self.seed),
            n_samples: Some(self.requested),
            h: Some(self.h),
            window: Some(self.window),
            radius: None,
            n_terms: None,
            dim: Some(self.dim),
        }
    }
}

/// Samples `trials` fields on B(W) (box over B(W+1)), drops those failing the
/// nondegeneracy check or producing a cyclic adjacency, and records nodal
/// counts, volume, topology classes and subtree codes of the rest.
pub fn survey_ensemble<S: FieldSampler>(
    sampler: &S,
    window: f64,
    trials: usize,
    seed: u64,
    h: f64,
) -> Result<EnsembleSurvey> {
    if !(window > 0.0) || trials == 0 {
        return Err(invalid("trials", "need W > 0 and at least one trial"));
    }
    let m = sampler.dim();
    let origin = vec![0.0; m];
    let outcomes: Vec<Option<TrialStats>> = (0..trials as u64)
        .into_par_iter()
        .map(|j| -> Result<Option<TrialStats>> {
            let s = child_seed(seed, j);
            let field = sampler.sample(s);
            let grid = sample_ball_with_margin(&field, &origin, window, window + 1.0, h)?;
            let report = check_nondegenerate_grid(&grid, window, DEFAULT_NONDEGENERACY_THRESHOLD)?;
            if !report.pass {
                return Ok(None);
            }
            let analysis = match analyze(&grid) {
                Ok(a) => a,
                Err(Error::DegenerateSample(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let mut trees = BTreeMap::new();
            for c in analysis.decomposition.components() {
                if !c.touches_boundary {
                    *trees.entry(analysis.tree.subtree_code(c.id).to_string()).or_insert(0) += 1;
                }
            }
            Ok(Some(TrialStats {
                seed: s,
                interior_count: analysis.decomposition.interior_count(),
                boundary_count: analysis.decomposition.boundary_count(),
                volume: analysis.geometry.total(),
                classes: analysis.topology.histogram().clone(),
                trees,
            }))
        })
        .collect::<Result<_>>()?;
    let excluded = outcomes.iter().filter(|o| o.is_none()).count();
    if excluded as f64 > MAX_DEGENERATE_FRACTION * trials as f64 {
        return Err(Error::Resolution { excluded, trials });
    }
    Ok(EnsembleSurvey {
        window,
        h,
        dim: m,
        seed,
        requested: trials,
        excluded,
        trials: outcomes.into_iter().flatten().collect(),
    })
}

/// Nazarov–Sodin density: mean interior nodal-domain count per unit volume in B(W).
pub fn ns_constant_estimate<S: FieldSampler>(
    sampler: &S,
    window: f64,
    trials: usize,
    seed: u64,
    h: f64,
) -> Result<ConstantEstimate> {
    if window < 4.0 {
        return Err(invalid("W", format!("need W >= 4, got {window}")));
    }
    if trials < 50 {
        return Err(invalid("trials", format!("need at least 50 trials, got {trials}")));
    }
    Ok(survey_ensemble(sampler, window, trials, seed, h)?.estimate(DensityKind::NodalCount))
}

/// Mean zero-set volume per unit volume in B(W), meshing only.
pub fn volume_density_estimate<S: FieldSampler>(
    sampler: &S,
    window: f64,
    trials: usize,
    seed: u64,
    h: f64,
) -> Result<ConstantEstimate> {
    if trials < 2 {
        return Err(invalid("trials", "need at least two trials"));
    }
    let m = sampler.dim();
    let origin = vec![0.0; m];
    let vol = ball_volume(m, window);
    let densities = (0..trials as u64)
        .into_par_iter()
        .map(|j| {
            let field = sampler.sample(child_seed(seed, j));
            let grid = sample_on_grid(&field, &origin, window, h)?;
            Ok(nodal_volume(&grid)?.total() / vol)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, stderr) = mean_stderr(&densities);
    Ok(ConstantEstimate {
        kind: DensityKind::NodalVolume,
        window,
        trials,
        excluded: 0,
        mean,
        stderr,
        metadata: RunMetadata {
            seed: Some(seed),
            n_samples: Some(trials),
            h: Some(h),
            window: Some(window),
            radius: None,
            n_terms: None,
            dim: Some(m),
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyEstimate {
    pub window: f64,
    pub trials: usize,
    pub excluded: usize,
    /// Mean of |density − mean density| over trials.
    pub mean: f64,
    pub stderr: f64,
}

/// Mean absolute deviation of per-trial nodal-count densities at window W.
pub fn discrepancy_estimate<S: FieldSampler>(
    sampler: &S,
    window: f64,
    trials: usize,
    seed: u64,
    h: f64,
) -> Result<DiscrepancyEstimate> {
    if trials < 50 {
        return Err(invalid("trials", format!("need at least 50 trials, got {trials}")));
    }
    let survey = survey_ensemble(sampler, window, trials, seed, h)?;
    let d = survey.densities(&DensityKind::NodalCount);
    let (center, _) = mean_stderr(&d);
    let dev: Vec<f64> = d.iter().map(|v| (v - center).abs()).collect();
    let (mean, stderr) = mean_stderr(&dev);
    Ok(DiscrepancyEstimate {
        window,
        trials,
        excluded: survey.excluded,
        mean,
        stderr,
    })
}

/// Counts over windows B(x, W) of one field, x on a lattice inside B(R − W).
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSurvey {
    pub radius: f64,
    pub window: f64,
    pub h: f64,
    pub dim: usize,
    /// Interior domains of the whole ball B(R).
    pub global_interior: usize,
    /// Zero-set volume inside B(R).
    pub global_volume: f64,
    pub centers: Vec<Vec<f64>>,
    pub interior: Vec<usize>,
    pub boundary: Vec<usize>,
}

impl WindowSurvey {
    pub fn global_density(&self) -> f64 {
        self.global_interior as f64 / ball_volume(self.dim, self.radius)
    }

    pub fn global_volume_density(&self) -> f64 {
        self.global_volume / ball_volume(self.dim, self.radius)
    }

    /// Per-window interior densities.
    pub fn window_densities(&self) -> Vec<f64> {
        let vol = ball_volume(self.dim, self.window);
        self.interior.iter().map(|&c| c as f64 / vol).collect()
    }

    pub fn boundary_densities(&self) -> Vec<f64> {
        let vol = ball_volume(self.dim, self.window);
        self.boundary.iter().map(|&c| c as f64 / vol).collect()
    }
}

/// Labels `field` on B(R) and on every window B(x, W) with x on a lattice of
/// step `spacing` (rounded to a multiple of h) and |x| <= R − W − h.
pub fn survey_windows<F: Field + ?Sized>(
    field: &F,
    radius: f64,
    window: f64,
    h: f64,
    spacing: f64,
) -> Result<WindowSurvey> {
    if !(window > 0.0 && radius > window + h) {
        return Err(invalid("W", format!("need 0 < W < R - h, got W = {window}, R = {radius}")));
    }
    if !(spacing >= h) {
        return Err(invalid("spacing", "center spacing must be at least h"));
    }
    let m = field.dim();
    let origin = vec![0.0; m];
    let grid = sample_on_grid(field, &origin, radius, h)?;
    let global = label_domains(&grid)?;
    let global_volume = nodal_volume(&grid)?.total();

    let n = (grid.shape()[0] - 1) / 2;
    let step = (spacing / h).round() as usize;
    let nw = (window / h - 1e-9).ceil() as usize;
    let limit = radius - window - h;
    let k_max = (n / step) as i64;
    let side = (2 * k_max + 1) as usize;
    let mut centers_idx: Vec<Vec<usize>> = Vec::new();
    for t in 0..side.pow(m as u32) {
        let mut rest = t;
        let mut offs = vec![0i64; m];
        for a in (0..m).rev() {
            offs[a] = (rest % side) as i64 - k_max;
            rest /= side;
        }
        let r = offs.iter().map(|&o| (o as f64 * step as f64 * h).powi(2)).sum::<f64>().sqrt();
        if r <= limit {
            centers_idx.push(offs.iter().map(|&o| (n as i64 + o * step as i64) as usize).collect());
        }
    }

    let counts: Vec<(Vec<f64>, usize, usize)> = centers_idx
        .par_iter()
        .map(|c| {
            let sub = window_grid(&grid, c, nw, window)?;
            let dec = label_domains(&sub)?;
            let center = grid.point(grid.flat_index(c));
            Ok((center, dec.interior_count(), dec.boundary_count()))
        })
        .collect::<Result<_>>()?;
    let mut survey = WindowSurvey {
        radius,
        window,
        h,
        dim: m,
        global_interior: global.interior_count(),
        global_volume,
        centers: Vec::with_capacity(counts.len()),
        interior: Vec::with_capacity(counts.len()),
        boundary: Vec::with_capacity(counts.len()),
    };
    for (x, i, b) in counts {
        survey.centers.push(x);
        survey.interior.push(i);
        survey.boundary.push(b);
    }
    Ok(survey)
}

/// Copy of the box of half-width `nw` vertices around `center`, masked to B(x, W).
fn window_grid(grid: &ScalarGrid, center: &[usize], nw: usize, window: f64) -> Result<ScalarGrid> {
    let m = grid.dim();
    let side = 2 * nw + 1;
    let lo: Vec<usize> = center.iter().map(|&c| c - nw).collect();
    let strides = grid.strides();
    let shape = vec![side; m];
    let mut values = Vec::with_capacity(side.pow(m as u32));
    let mut idx = vec![0usize; m];
    for _ in 0..side.pow(m as u32) {
        let flat: usize = (0..m).map(|a| (lo[a] + idx[a]) * strides[a]).sum();
        values.push(grid.values()[flat]);
        crate::nodal::advance_index(&mut idx, &shape);
    }
    let origin = grid.point(grid.flat_index(&lo));
    let x = grid.point(grid.flat_index(center));
    ScalarGrid::new(
        origin,
        grid.spacing(),
        shape,
        values,
        Some(BallMask { center: x, radius: window }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::gaussian::{FixedSampler, GaussianEnsemble, SpectralMeasure};
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn single_pair_measure_has_no_interior_domains() {
        let mu = SpectralMeasure::symmetric_atomic(2, vec![(vec![1.0, 0.0], 1.0)]).unwrap();
        let s = survey_ensemble(&GaussianEnsemble::new(mu), 4.0, 10, 3, 0.05).unwrap();
        assert!(s.trials.iter().all(|t| t.interior_count == 0));
        assert_eq!(s.estimate(DensityKind::NodalCount).mean, 0.0);
    }

    #[test]
    fn fixed_sampler_has_zero_discrepancy() {
        let f = FnField::new(2, |x: &[f64]| (2.0 * PI * x[0]).sin() + (2.0 * PI * x[1]).cos() * 0.7);
        let d = discrepancy_estimate(&FixedSampler(f), 4.0, 50, 1, 0.05).unwrap();
        assert_eq!(d.mean, 0.0);
    }

    #[test]
    fn estimates_validate_inputs() {
        let ens = GaussianEnsemble::new(SpectralMeasure::uniform(2).unwrap());
        assert!(ns_constant_estimate(&ens, 3.0, 50, 1, 0.05).is_err());
        assert!(ns_constant_estimate(&ens, 4.0, 10, 1, 0.05).is_err());
    }

    #[test]
    fn flat_field_fails_resolution() {
        let f = FnField::new(2, |_: &[f64]| 0.0);
        assert!(matches!(
            survey_ensemble(&FixedSampler(f), 4.0, 5, 1, 0.05),
            Err(Error::Resolution { excluded: 5, trials: 5 })
        ));
    }

    #[test]
    fn cosine_windows_have_no_interior_domains() {
        let f = FnField::new(2, |x: &[f64]| SQRT_2 * (2.0 * PI * x[0]).cos());
        let s = survey_windows(&f, 12.0, 3.0, 0.05, 2.0).unwrap();
        assert_eq!(s.global_interior, 0);
        assert!(s.interior.iter().all(|&c| c == 0));
        assert!(!s.centers.is_empty());
        assert!(s.centers.iter().all(|x| x.iter().map(|c| c * c).sum::<f64>().sqrt() <= 12.0 - 3.0));
    }

    #[test]
    fn window_counts_match_direct_labeling() {
        let f = FnField::new(2, |x: &[f64]| (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1] + 0.3).sin() + 0.2);
        let s = survey_windows(&f, 6.0, 2.0, 0.05, 1.0).unwrap();
        for (x, &count) in s.centers.iter().zip(&s.interior).take(5) {
            let g = sample_on_grid(&f, x, 2.0, 0.05).unwrap();
            assert_eq!(label_domains(&g).unwrap().interior_count(), count);
        }
    }
}
