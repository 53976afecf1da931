//! Estimator-versus-prediction comparisons.
//!
//! Every report carries the run parameters and serializes to CSV with a
//! fixed header.

mod density;
mod distance;
mod kac_rice;
mod moments;
mod sandwich;

use std::io::Write;

pub use density::{
    discrepancy_estimate, ns_constant_estimate, survey_ensemble, survey_windows, volume_density_estimate, DensityKind, DiscrepancyEstimate,
    EnsembleSurvey, TrialStats, WindowSurvey, MAX_DEGENERATE_FRACTION,
};
pub use distance::{energy_distance, ks_distance_normal, pushforward_distance, PushforwardOptions};
pub use kac_rice::{kac_rice_density, KacRiceDensity, KAC_RICE_SAMPLES};
pub use moments::{bk_moment_report, covariance_compare, gaussian_moment, window_moment_report, BkIndex};
pub use sandwich::{semilocal_count_check, volume_sandwich_check, SEMILOCAL_ALLOWANCE};

use crate::error::Result;
use crate::rng::{child_rng, point_in_ball};

/// Run parameters attached to every report; unset entries serialize empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunMetadata {
    pub seed: Option<u64>,
    pub n_samples: Option<usize>,
    pub h: Option<f64>,
    pub window: Option<f64>,
    pub radius: Option<f64>,
    pub n_terms: Option<usize>,
    pub dim: Option<usize>,
}

const METADATA_HEADER: [&str; 7] = ["seed", "n_samples", "h", "W", "R", "N", "m"];

impl RunMetadata {
    fn fields(&self) -> [String; 7] {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        [
            opt(self.seed),
            opt(self.n_samples),
            opt(self.h),
            opt(self.window),
            opt(self.radius),
            opt(self.n_terms),
            opt(self.dim),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub estimate: f64,
    pub prediction: f64,
    /// Where the prediction comes from, e.g. "gaussian-moment".
    pub source: String,
    pub stderr: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl ComparisonRow {
    pub fn new(
        label: impl Into<String>,
        estimate: f64,
        prediction: f64,
        source: impl Into<String>,
        stderr: f64,
        samples: usize,
        tolerance: f64,
    ) -> Self {
        Self {
            label: label.into(),
            estimate,
            prediction,
            source: source.into(),
            stderr: stderr.max(0.0),
            samples,
            tolerance,
            pass: (estimate - prediction).abs() <= tolerance,
        }
    }

    /// A row recorded for information only; it always passes.
    pub fn info(label: impl Into<String>, estimate: f64, stderr: f64, samples: usize) -> Self {
        Self::new(label, estimate, estimate, "measured", stderr, samples, f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub statistic: String,
    pub metadata: RunMetadata,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn new(statistic: impl Into<String>, metadata: RunMetadata) -> Self {
        Self {
            statistic: statistic.into(),
            metadata,
            rows: Vec::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, label: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Largest |estimate − prediction| over the rows.
    pub fn max_abs_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.estimate - r.prediction).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = METADATA_HEADER.to_vec();
        header.extend([
            "statistic",
            "label",
            "estimate",
            "prediction",
            "source",
            "stderr",
            "samples",
            "tolerance",
            "pass",
        ]);
        w.write_record(&header)?;
        let meta = self.metadata.fields();
        for r in &self.rows {
            let mut rec: Vec<String> = meta.to_vec();
            rec.extend([
                self.statistic.clone(),
                r.label.clone(),
                format!("{:.12e}", r.estimate),
                format!("{:.12e}", r.prediction),
                r.source.clone(),
                format!("{:.6e}", r.stderr),
                r.samples.to_string(),
                format!("{:.6e}", r.tolerance),
                r.pass.to_string(),
            ]);
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantEstimate {
    pub kind: DensityKind,
    pub window: f64,
    /// Trials requested.
    pub trials: usize,
    /// Trials excluded as degenerate.
    pub excluded: usize,
    /// Mean per unit volume.
    pub mean: f64,
    pub stderr: f64,
    pub metadata: RunMetadata,
}

impl ConstantEstimate {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = METADATA_HEADER.to_vec();
        header.extend(["kind", "trials", "excluded", "mean", "stderr"]);
        w.write_record(&header)?;
        let mut rec: Vec<String> = self.metadata.fields().to_vec();
        rec.extend([
            self.kind.to_string(),
            self.trials.to_string(),
            self.excluded.to_string(),
            format!("{:.12e}", self.mean),
            format!("{:.12e}", self.stderr),
        ]);
        w.write_record(&rec)?;
        w.flush()?;
        Ok(())
    }
}

/// Volume of the unit ball in R^m.
pub fn unit_ball_volume(m: usize) -> f64 {
    use std::f64::consts::PI;
    match m {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / m as f64 * unit_ball_volume(m - 2),
    }
}

pub fn ball_volume(m: usize, radius: f64) -> f64 {
    unit_ball_volume(m) * radius.powi(m as i32)
}

/// Uniform centers in B(0, R), one child stream per index.
pub(crate) fn sample_centers(m: usize, radius: f64, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let origin = vec![0.0; m];
    (0..n as u64)
        .map(|j| point_in_ball(&mut child_rng(seed, j), &origin, radius))
        .collect()
}

/// Sample mean and standard error of the mean.
pub(crate) fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
