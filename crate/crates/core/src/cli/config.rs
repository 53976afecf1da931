//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use super::CliError;

/// How directions are produced when no wave file is given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    Uniform,
    LogRational,
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientMode {
    RandomPhase,
    AllOnes,
}

/// Field sampled by the geometry commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldChoice {
    Wave,
    /// √2 cos 2πx₁.
    Cosine,
    /// J_Λ(2π|x|) / |x|^Λ with Λ = (m − 2)/2.
    Radial,
}

/// Spectral measure of the comparison ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureChoice {
    Uniform,
    /// Atoms at the wave's directions.
    Empirical,
    /// Cell-averaged measure of the wave's directions at resolution K.
    Partition,
}

/// Every recognized key; anything else is rejected.
pub const KEYS: &[&str] = &[
    "m",
    "N",
    "K",
    "delta",
    "W",
    "R",
    "r",
    "h",
    "seed",
    "samples",
    "trials",
    "t_max",
    "t_count",
    "p_max",
    "beta",
    "spacing",
    "generator",
    "directions",
    "wave",
    "coefficients",
    "field",
    "measure",
    "plane_waves",
    "wavenumber",
    "counts",
    "extent",
    "y",
    "lags",
    "cells",
    "Q",
    "out",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub window: Option<f64>,
    pub radius: Option<f64>,
    pub inner_radius: f64,
    pub h: f64,
    pub seed: u64,
    pub samples: usize,
    pub trials: usize,
    pub t_max: f64,
    pub t_count: usize,
    pub p_max: u32,
    pub beta: f64,
    pub spacing: Option<f64>,
    pub generator: Generator,
    pub wave: Option<PathBuf>,
    pub coefficients: CoefficientMode,
    pub field: FieldChoice,
    pub measure: MeasureChoice,
    pub plane_waves: Option<usize>,
    pub wavenumber: Option<f64>,
    pub counts: Vec<usize>,
    pub extent: f64,
    pub y: Vec<Vec<f64>>,
    pub lags: Vec<Vec<f64>>,
    pub cells: Vec<usize>,
    pub q: Vec<f64>,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            m: 2,
            n: 64,
            k: 8,
            delta: 1.0 / 256.0,
            window: None,
            radius: None,
            inner_radius: 2.0,
            h: 0.05,
            seed: 0,
            samples: 10_000,
            trials: 100,
            t_max: 2.0,
            t_count: 41,
            p_max: 4,
            beta: 0.1,
            spacing: None,
            generator: Generator::Uniform,
            wave: None,
            coefficients: CoefficientMode::RandomPhase,
            field: FieldChoice::Wave,
            measure: MeasureChoice::Uniform,
            plane_waves: None,
            wavenumber: None,
            counts: vec![25, 100],
            extent: 20.0,
            y: Vec::new(),
            lags: Vec::new(),
            cells: Vec::new(),
            q: vec![1.0, 2.0, 4.0, 8.0],
            out: None,
        }
    }
}

/// Splits config text into ordered `(key, value)` pairs; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Syntax(format!("line {}: expected `key = value`, got `{line}`", i + 1)))?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| CliError::BadValue {
        key: key.to_string(),
        reason: format!("`{value}`: {e}"),
    })
}

fn parse_list<T: FromStr>(key: &str, value: &str, sep: char) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .split(sep)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

/// Points written as `x1,x2;y1,y2;...`.
fn parse_points(key: &str, value: &str) -> Result<Vec<Vec<f64>>, CliError> {
    value
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|p| parse_list(key, p, ','))
        .collect()
}

fn bad(key: &str, reason: impl Into<String>) -> CliError {
    CliError::BadValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(key, format!("must be a positive number, got {v}")))
    }
}

impl ExperimentConfig {
    /// Applies pairs in order; a key may appear once per source.
    pub fn apply(&mut self, pairs: &[(String, String)]) -> Result<(), CliError> {
        let mut seen = BTreeMap::new();
        for (key, value) in pairs {
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::UnknownKey(key.clone()));
            }
            if seen.insert(key.clone(), ()).is_some() {
                return Err(bad(key, "given more than once"));
            }
            self.set(key, value)?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "m" => {
                self.m = parse(key, value)?;
                if self.m < 2 {
                    return Err(bad(key, "dimension must be at least 2"));
                }
            }
            "N" => {
                self.n = parse(key, value)?;
                if self.n == 0 {
                    return Err(bad(key, "at least one direction is required"));
                }
            }
            "K" => self.k = parse(key, value)?,
            "delta" => self.delta = positive(key, parse(key, value)?)?,
            "W" => self.window = Some(positive(key, parse(key, value)?)?),
            "R" => self.radius = Some(positive(key, parse(key, value)?)?),
            "r" => self.inner_radius = positive(key, parse(key, value)?)?,
            "h" => self.h = positive(key, parse(key, value)?)?,
            "seed" => self.seed = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            "trials" => self.trials = parse(key, value)?,
            "t_max" => self.t_max = positive(key, parse(key, value)?)?,
            "t_count" => self.t_count = parse(key, value)?,
            "p_max" => self.p_max = parse(key, value)?,
            "beta" => self.beta = parse(key, value)?,
            "spacing" => self.spacing = Some(positive(key, parse(key, value)?)?),
            "generator" => {
                self.generator = match value {
                    "uniform" => Generator::Uniform,
                    "log-rational" => Generator::LogRational,
                    "file" => match &self.generator {
                        Generator::File(p) => Generator::File(p.clone()),
                        _ => Generator::File(PathBuf::new()),
                    },
                    _ => return Err(bad(key, format!("expected uniform, log-rational or file, got `{value}`"))),
                }
            }
            "directions" => self.generator = Generator::File(PathBuf::from(value)),
            "wave" => self.wave = Some(PathBuf::from(value)),
            "coefficients" => {
                self.coefficients = match value {
                    "random-phase" => CoefficientMode::RandomPhase,
                    "all-ones" => CoefficientMode::AllOnes,
                    _ => return Err(bad(key, format!("expected random-phase or all-ones, got `{value}`"))),
                }
            }
            "field" => {
                self.field = match value {
                    "wave" => FieldChoice::Wave,
                    "cosine" => FieldChoice::Cosine,
                    "radial" => FieldChoice::Radial,
                    _ => return Err(bad(key, format!("expected wave, cosine or radial, got `{value}`"))),
                }
            }
            "measure" => {
                self.measure = match value {
                    "uniform" => MeasureChoice::Uniform,
                    "empirical" => MeasureChoice::Empirical,
                    "partition" => MeasureChoice::Partition,
                    _ => return Err(bad(key, format!("expected uniform, empirical or partition, got `{value}`"))),
                }
            }
            "plane_waves" => self.plane_waves = Some(parse(key, value)?),
            "wavenumber" => self.wavenumber = Some(positive(key, parse(key, value)?)?),
            "counts" => {
                self.counts = parse_list(key, value, ',')?;
                if self.counts.is_empty() || self.counts.contains(&0) {
                    return Err(bad(key, "need a non-empty list of positive counts"));
                }
            }
            "extent" => self.extent = positive(key, parse(key, value)?)?,
            "y" => self.y = parse_points(key, value)?,
            "lags" => self.lags = parse_points(key, value)?,
            "cells" => self.cells = parse_list(key, value, ',')?,
            "Q" => self.q = parse_list(key, value, ',')?,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(CliError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn require_window(&self) -> Result<f64, CliError> {
        self.window.ok_or_else(|| CliError::MissingKey("W".into()))
    }

    pub fn require_radius(&self) -> Result<f64, CliError> {
        self.radius.ok_or_else(|| CliError::MissingKey("R".into()))
    }

    /// Checks that list-valued keys have points of dimension m and that a
    /// file generator names its file.
    pub fn validate(&self) -> Result<(), CliError> {
        for (key, pts) in [("y", &self.y), ("lags", &self.lags)] {
            if let Some(p) = pts.iter().find(|p| p.len() != self.m) {
                return Err(bad(key, format!("point {p:?} does not have {} coordinates", self.m)));
            }
        }
        if self.generator == Generator::File(PathBuf::new()) {
            return Err(CliError::MissingKey("directions".into()));
        }
        if !(self.beta >= 0.0) {
            return Err(bad("beta", "must be non-negative"));
        }
        Ok(())
    }
}
