use rayon::prelude::*;

use super::{ball_volume, ComparisonReport, ComparisonRow, RunMetadata};
use crate::error::{invalid, Result};
use crate::field::Field;
use crate::grid::ScalarGrid;
use crate::nodal::nodal_volume;

use super::density::survey_windows;

/// Constant in front of the 1/W allowance of the semi-local count check,
/// relative to the global density.
pub const SEMILOCAL_ALLOWANCE: f64 = 5.0;

/// Relative quadrature tolerance of the volume sandwich.
const SANDWICH_TOLERANCE: f64 = 0.02;

/// Checks 𝒱(R − r) ≤ (1/vol B(r)) ∫_{B(R)} 𝒱(x, r) dx ≤ 𝒱(R + r) on a grid
/// covering B(R + r) around its center. The middle integral is vol B(R)
/// times the mean of 𝒱(x, r) over lattice centers of spacing r/8 in B(R).
pub fn volume_sandwich_check(grid: &ScalarGrid, radius: f64, r: f64) -> Result<ComparisonReport> {
    if !(r > 0.0 && r < radius) {
        return Err(invalid("r", format!("need 0 < r < R, got r = {r}, R = {radius}")));
    }
    let m = grid.dim();
    let center = grid.center();
    let h = grid.spacing();
    for a in 0..m {
        let lo = grid.origin()[a];
        let hi = lo + (grid.shape()[a] - 1) as f64 * h;
        if center[a] - lo < radius + r - 1e-9 || hi - center[a] < radius + r - 1e-9 {
            return Err(invalid("grid", format!("grid does not cover B(R + r) = B({})", radius + r)));
        }
    }
    let geom = nodal_volume(grid)?;
    let pieces: Vec<(Vec<f64>, f64)> = (0..geom.simplex_count())
        .map(|s| {
            let ids = geom.simplex(s);
            let mut c = vec![0.0; m];
            for &p in ids {
                for (ca, pa) in c.iter_mut().zip(geom.point(p as usize)) {
                    *ca += pa / ids.len() as f64;
                }
            }
            (c, geom.simplex_measure(s))
        })
        .collect();
    let in_ball = |x: &[f64], rho: f64| -> f64 {
        let r2 = rho * rho;
        pieces
            .iter()
            .filter(|(c, _)| c.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>() <= r2)
            .map(|p| p.1)
            .sum()
    };
    let inner = in_ball(&center, radius - r);
    let outer = in_ball(&center, radius + r);

    let step = r / 8.0;
    let k = (radius / step).floor() as i64;
    let side = (2 * k + 1) as usize;
    let centers: Vec<Vec<f64>> = (0..side.pow(m as u32))
        .filter_map(|t| {
            let mut rest = t;
            let mut x = vec![0.0; m];
            for a in (0..m).rev() {
                x[a] = ((rest % side) as i64 - k) as f64 * step;
                rest /= side;
            }
            (x.iter().map(|c| c * c).sum::<f64>() <= radius * radius).then(|| x.iter().zip(&center).map(|(d, c)| c + d).collect())
        })
        .collect();
    let local: Vec<f64> = centers.par_iter().map(|x| in_ball(x, r)).collect();
    let mean = local.iter().sum::<f64>() / local.len() as f64;
    let middle = ball_volume(m, radius) * mean / ball_volume(m, r);

    let tol = SANDWICH_TOLERANCE * outer;
    let mut report = ComparisonReport::new(
        "volume-sandwich",
        RunMetadata {
            h: Some(h),
            window: Some(r),
            radius: Some(radius),
            dim: Some(m),
            n_samples: Some(centers.len()),
            ..Default::default()
        },
    );
    report.rows.push(ComparisonRow::info("inner", inner, 0.0, 1));
    report.rows.push(ComparisonRow::info("middle", middle, 0.0, centers.len()));
    report.rows.push(ComparisonRow::info("outer", outer, 0.0, 1));
    report
        .rows
        .push(ComparisonRow::new("lower-gap", (inner - middle).max(0.0), 0.0, "sandwich", 0.0, centers.len(), tol));
    report
        .rows
        .push(ComparisonRow::new("upper-gap", (middle - outer).max(0.0), 0.0, "sandwich", 0.0, centers.len(), tol));
    Ok(report)
}

/// Compares the domain density of B(R) with the average density of windows
/// B(x, W); the gap must stay below the mean boundary-domain density plus
/// SEMILOCAL_ALLOWANCE · (global density) / W.
pub fn semilocal_count_check<F: Field + ?Sized>(
    field: &F,
    radius: f64,
    window: f64,
    h: f64,
    spacing: f64,
) -> Result<ComparisonReport> {
    if !(window > 0.0 && radius >= 10.0 * window) {
        return Err(invalid("R", format!("need R >= 10 W, got R = {radius}, W = {window}")));
    }
    let survey = survey_windows(field, radius, window, h, spacing)?;
    let n = survey.centers.len();
    let global = survey.global_density();
    let windows = survey.window_densities();
    let local = windows.iter().sum::<f64>() / n as f64;
    let local_se = if n > 1 {
        (windows.iter().map(|d| (d - local).powi(2)).sum::<f64>() / (n - 1) as f64 / n as f64).sqrt()
    } else {
        0.0
    };
    let correction = survey.boundary_densities().iter().sum::<f64>() / n as f64;
    let allowance = SEMILOCAL_ALLOWANCE * global / window;

    let mut report = ComparisonReport::new(
        "semilocal-count",
        RunMetadata {
            h: Some(h),
            window: Some(window),
            radius: Some(radius),
            dim: Some(survey.dim),
            n_samples: Some(n),
            ..Default::default()
        },
    );
    report.rows.push(ComparisonRow::info("global-density", global, 0.0, 1));
    report.rows.push(ComparisonRow::info("window-density", local, local_se, n));
    report.rows.push(ComparisonRow::info("boundary-correction", correction, 0.0, n));
    report.rows.push(ComparisonRow::new(
        "gap",
        (global - local).abs(),
        0.0,
        "boundary-correction+allowance",
        local_se,
        n,
        correction + allowance,
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::grid::sample_on_grid;
    use std::f64::consts::{PI, SQRT_2};

    /// Length of the lines x₁ = k/2 + 1/4 inside B(c, ρ).
    fn strip_length(c0: f64, rho: f64) -> f64 {
        (-100..100)
            .map(|k| {
                let d = k as f64 / 2.0 + 0.25 - c0;
                if d.abs() < rho {
                    2.0 * (rho * rho - d * d).sqrt()
                } else {
                    0.0
                }
            })
            .sum()
    }

    #[test]
    fn constant_sign_field_is_all_zero() {
        let f = FnField::new(2, |x: &[f64]| 2.0 + x[0] * 0.0);
        let g = sample_on_grid(&f, &[0.0, 0.0], 4.0, 0.05).unwrap();
        let rep = volume_sandwich_check(&g, 3.0, 1.0).unwrap();
        assert!(rep.pass());
        for label in ["inner", "middle", "outer"] {
            assert_eq!(rep.row(label).unwrap().estimate, 0.0);
        }
    }

    #[test]
    fn cosine_strips_match_closed_form() {
        let f = FnField::new(2, |x: &[f64]| SQRT_2 * (2.0 * PI * x[0]).cos());
        let g = sample_on_grid(&f, &[0.0, 0.0], 4.0, 0.02).unwrap();
        let rep = volume_sandwich_check(&g, 3.0, 1.0).unwrap();
        assert!(rep.pass(), "{rep:?}");
        let inner = strip_length(0.0, 2.0);
        let outer = strip_length(0.0, 4.0);
        assert!((rep.row("inner").unwrap().estimate - inner).abs() < 0.01 * inner);
        assert!((rep.row("outer").unwrap().estimate - outer).abs() < 0.01 * outer);
        // middle by direct quadrature of the strip lengths over B(3)
        let n = 600;
        let mut acc = 0.0;
        for i in 0..n {
            let x = -3.0 + (i as f64 + 0.5) * 6.0 / n as f64;
            let half = (9.0 - x * x).sqrt();
            acc += 2.0 * half * strip_length(x, 1.0) * 6.0 / n as f64;
        }
        let middle = acc / PI;
        let got = rep.row("middle").unwrap().estimate;
        assert!((got - middle).abs() < 0.02 * middle, "{got} vs {middle}");
    }

    #[test]
    fn sandwich_validates_inputs() {
        let f = FnField::new(2, |x: &[f64]| x[0]);
        let g = sample_on_grid(&f, &[0.0, 0.0], 3.0, 0.1).unwrap();
        assert!(volume_sandwich_check(&g, 1.0, 1.0).is_err());
        assert!(volume_sandwich_check(&g, 2.5, 1.0).is_err());
    }

    #[test]
    fn single_cosine_has_no_interior_domains() {
        let f = FnField::new(2, |x: &[f64]| (2.0 * PI * x[0]).cos());
        let rep = semilocal_count_check(&f, 20.0, 2.0, 0.1, 2.0).unwrap();
        assert_eq!(rep.row("global-density").unwrap().estimate, 0.0);
        assert_eq!(rep.row("window-density").unwrap().estimate, 0.0);
        assert!(rep.pass());
    }

    #[test]
    fn semilocal_requires_large_radius() {
        let f = FnField::new(2, |x: &[f64]| x[0]);
        assert!(semilocal_count_check(&f, 20.0, 4.0, 0.1, 2.0).is_err());
    }
}
