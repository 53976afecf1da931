use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{CoefficientMode, ExperimentConfig, FieldChoice, Generator, MeasureChoice};
use super::svg::write_zero_set_svg;
use super::{CliError, Command};
use crate::directions::{empirical_measure, generate_uniform_directions, log_rational_directions, DirectionSet};
use crate::error::Error;
use crate::field::{bessel_j, bessel_j_over_power, bessel_zero_table, lattice_point, CoefficientSet, Field, MonochromaticWave};
use crate::gaussian::{measure_from_partition, GaussianEnsemble, SpectralMeasure};
use crate::grid::{sample_box, sample_on_grid};
use crate::growth::{characteristic_function, doubling_tail, small_value_fraction};
use crate::nodal::{analyze, label_domains, nodal_volume, write_components_csv};
use crate::partition::build_partition;
use crate::rng::child_seed;
use crate::stats::{
    bk_moment_report, covariance_compare, discrepancy_estimate, kac_rice_density, ns_constant_estimate,
    pushforward_distance, semilocal_count_check, volume_sandwich_check, window_moment_report, BkIndex,
    PushforwardOptions,
};

type CmdResult = Result<Vec<PathBuf>, CliError>;

pub(super) fn dispatch(command: Command, config: &ExperimentConfig, out: &Path) -> CmdResult {
    match command {
        Command::GenWave => gen_wave(config, out),
        Command::NodalStats => nodal_stats(config, out),
        Command::Moments => moments(config, out),
        Command::BkMoments => bk_moments(config, out),
        Command::Charfn => charfn(config, out),
        Command::Doubling => doubling(config, out),
        Command::Smallvalues => smallvalues(config, out),
        Command::Compare => compare(config, out),
        Command::Kacrice => kacrice(config, out),
        Command::NsEstimate => ns_estimate(config, out),
        Command::Sandwich => sandwich(config, out),
        Command::Semilocal => semilocal(config, out),
        Command::Discrepancy => discrepancy(config, out),
        Command::Fig1 => fig1(config, out),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

fn sci(x: f64) -> String {
    format!("{x:.12e}")
}

/// The configured wave: a wave file, or directions from the generator with
/// the configured coefficients.
pub(super) fn build_wave(config: &ExperimentConfig) -> Result<MonochromaticWave, CliError> {
    if let Some(path) = &config.wave {
        let wave = MonochromaticWave::read_text(open(path)?)?;
        if wave.dim() != config.m {
            return Err(CliError::BadValue {
                key: "wave".into(),
                reason: format!("file has m = {}, config has m = {}", wave.dim(), config.m),
            });
        }
        return Ok(wave);
    }
    let dirs = match &config.generator {
        Generator::Uniform => generate_uniform_directions(config.m, config.n, config.seed)?,
        Generator::LogRational => {
            if config.m != 2 {
                return Err(CliError::BadValue {
                    key: "generator".into(),
                    reason: "log-rational directions are planar (m = 2)".into(),
                });
            }
            log_rational_directions(config.n)?
        }
        Generator::File(path) => {
            let dirs = DirectionSet::read_text(open(path)?)?;
            if dirs.dim() != config.m {
                return Err(CliError::BadValue {
                    key: "directions".into(),
                    reason: format!("file has m = {}, config has m = {}", dirs.dim(), config.m),
                });
            }
            dirs
        }
    };
    let coeffs = match config.coefficients {
        CoefficientMode::RandomPhase => CoefficientSet::random_phase(dirs.count(), child_seed(config.seed, 1)),
        CoefficientMode::AllOnes => CoefficientSet::all_ones(dirs.count()),
    };
    Ok(MonochromaticWave::new(dirs, coeffs)?)
}

enum Shape {
    Wave(MonochromaticWave),
    Cosine,
    Radial,
}

/// A field in user coordinates: `amplitude · shape(scale · x)`, where
/// `scale = wavenumber / 2π` turns the unit-frequency shapes into waves of
/// the requested wavenumber.
pub(super) struct CliField {
    dim: usize,
    scale: f64,
    amplitude: f64,
    shape: Shape,
}

impl CliField {
    fn new(config: &ExperimentConfig, default_wavenumber: f64) -> Result<Self, CliError> {
        let shape = match config.field {
            FieldChoice::Wave => Shape::Wave(build_wave(config)?),
            FieldChoice::Cosine => Shape::Cosine,
            FieldChoice::Radial => Shape::Radial,
        };
        Ok(Self {
            dim: config.m,
            scale: config.wavenumber.unwrap_or(default_wavenumber) / (2.0 * PI),
            amplitude: 1.0,
            shape,
        })
    }

    fn shape_value(&self, y: &[f64]) -> f64 {
        match &self.shape {
            Shape::Wave(w) => w.value(y),
            Shape::Cosine => 2f64.sqrt() * (2.0 * PI * y[0]).cos(),
            Shape::Radial => {
                let r = y.iter().map(|c| c * c).sum::<f64>().sqrt();
                bessel_j_over_power((self.dim as f64 - 2.0) / 2.0, 2.0 * PI * r).expect("order is a half-integer >= 0")
            }
        }
    }
}

impl Field for CliField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x.iter().map(|c| c * self.scale).collect();
        self.amplitude * self.shape_value(&y)
    }

    fn fill_lattice(&self, origin: &[f64], h: f64, shape: &[usize]) -> Vec<f64> {
        if let Shape::Wave(w) = &self.shape {
            let o: Vec<f64> = origin.iter().map(|c| c * self.scale).collect();
            let mut v = w.fill_lattice(&o, h * self.scale, shape);
            v.iter_mut().for_each(|x| *x *= self.amplitude);
            return v;
        }
        let total: usize = shape.iter().product();
        (0..total)
            .into_par_iter()
            .map(|i| self.value(&lattice_point(origin, h, shape, i)))
            .collect()
    }
}

fn ensemble(config: &ExperimentConfig) -> Result<GaussianEnsemble, CliError> {
    let measure = match config.measure {
        MeasureChoice::Uniform => SpectralMeasure::uniform(config.m)?,
        MeasureChoice::Empirical => empirical_measure(build_wave(config)?.directions()),
        MeasureChoice::Partition => {
            let wave = build_wave(config)?;
            measure_from_partition(&build_partition(wave.directions(), config.k, config.delta)?)?
        }
    };
    let ens = GaussianEnsemble::new(measure);
    Ok(match config.plane_waves {
        Some(p) => ens.with_plane_waves(p)?,
        None => ens,
    })
}

fn origin_points(config: &ExperimentConfig) -> Vec<Vec<f64>> {
    if config.y.is_empty() {
        vec![vec![0.0; config.m]]
    } else {
        config.y.clone()
    }
}

fn gen_wave(config: &ExperimentConfig, out: &Path) -> CmdResult {
    let wave = build_wave(config)?;
    let path = out.join("wave.txt");
    let mut w = create(&path)?;
    wave.write_text(&mut w)?;
    w.flush()?;
    Ok(vec![path])
}

fn nodal_stats(config: &ExperimentConfig, out: &Path) -> CmdResult {
    let radius = config.require_radius()?;
    let field = CliField::new(config, 2.0 * PI)?;
    let origin = vec![0.0; config.m];
    let grid = sample_on_grid(&field, &origin, radius, config.h)?;
    let analysis = analyze(&grid)?;

    let components = out.join("components.csv");
    let mut w = create(&components)?;
    write_components_csv(&analysis, &mut w)?;
    w.flush()?;

    let summary = out.join("nodal_summary.csv");
    let dec = &analysis.decomposition;
    let mut w = csv::Writer::from_writer(create(&summary)?);
    w.write_record(["seed", "h", "R", "m", "N", "interior", "boundary", "total", "zero_components", "volume", "tree"])?;
    w.write_record([
        config.seed.to_string(),
        config.h.to_string(),
        radius.to_string(),
        config.m.to_string(),
        config.n.to_string(),
        dec.interior_count().to_string(),
        dec.boundary_count().to_string(),
        dec.total_count().to_string(),
        analysis.geometry.components().len().to_string(),
        sci(analysis.geometry.total()),
        analysis.tree.code().to_string(),
    ])?;
    w.flush()?;

    let mut paths = vec![components, summary];
    if config.m == 2 {
        let svg = out.join("nodal.svg");
        let mut w = create(&svg)?;
        write_zero_set_svg(&analysis.geometry, [-radius, -radius], [radius, radius], &[], &mut w)?;
        w.flush()?;
        paths.push(svg);
    }
    Ok(paths)
}

fn moments(config: &ExperimentConfig, out: &Path) -> CmdResult {
    let wave = build_wave(config)?;
    let report = window_moment_report(
        &wave,
        config.require_radius()?,
        config.require_window()?,
        &origin_points(config),
        config.p_max,
        config.samples,
        config.seed,
    )?;
    let path = out.join("moments.csv");
    report.write_csv(create(&path)?)?;
    Ok(vec![path])
}

fn bk_moments(config: &ExperimentConfig, out: &Path) -> CmdResult {
    let wave = build_wave(config)?;
    let partition = build_partition(wave.directions(), config.k, config.delta)?;
    let cells: Vec<usize> = if config.cells.is_empty() {
        partition.selected_positive().iter().take(3).copied().collect()
    } else {
        config.cells.clone()
    };
    if cells.is_empty() {
        return Err(Error::DegeneratePartition("no cell exceeds the mass threshold".into()).into());
    }
    let mut tuples: Vec<Vec<BkIndex>> = Vec::new();
    for &cell in &cells {
        tuples.push(vec![BkIndex { cell, s: 1, t: 1 }]);
        tuples.push(vec![BkIndex { cell, s: 2, t: 0 }]);
    }
    if cells.len() >= 2 {
        tuples.push(vec![
            BkIndex { cell: cells[0], s: 1, t: 0 },
            BkIndex { cell: cells[1], s: 0, t: 1 },
        ]);
    }
    let report = bk_moment_report(&wave, &partition, config.require_radius()?, &tuples, config.samples, config.seed)?;
    let path = out.join("bk_moments.csv");
    report.write_csv(create(&path)?)?;
    Ok(vec![path])
}

fn charfn(config: &ExperimentConfig, out: &Path) -> CmdResult {
    let wave = build_wave(config)?;
    let report = characteristic_function(
        &wave,
        config.require_radius()?,
        config.t_max,
        config.t_count,
        config.samples,
        config.seed,
    )?;
    let path = out.join("charfn.csv");
    report.write_csv(create(&path)?)?;
    Ok(vec![path])
}

fn doubling(config: &ExperimentConfig, out: &Path) -> CmdResult {
    let field = CliField::new(config, 2.0 * PI)?;
    let stats = doubling_tail(&field, config.require_radius()?, config.require_window()?, config.samples, config.seed)?;
    let path = out.join("doubling.csv");
    stats.write_csv(&config.q, create(&path)?)?;
    Ok(vec![path])
}

fn smallvalues(config: &ExperimentConfig, out: &Path) -> CmdResult {
    let field = CliField::new(config, 2.0 * PI)?;
    let radius = config.require_radius()?;
    let r = small_value_fraction(&field, radius, config.beta, config.samples, config.seed)?;
    let path = out.join("smallvalues.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record(["seed", "n_samples", "R", "m", "N", "beta", "fraction", "stderr", "gaussian_limit"])?;
    w.write_record([
        config.seed.to_string(),
        r.n_samples.to_string(),
        radius.to_string(),
        config.m.to_string(),
        config.n.to_string(),
        r.beta.to_string(),
        sci(r.fraction),
        sci(r.stderr),
        sci(r.gaussian_limit),
    ])?;
    w.flush()?;
    Ok(vec![path])
}

fn compare(config: &ExperimentConfig, out: &Path) -> CmdResult {
    let wave = build_wave(config)?;
    let radius = config.require_radius()?;
    let window = config.require_window()?;
    let sampler = ensemble(config)?;
    let push = pushforward_distance(
        &wave,
        radius,
        window,
        &sampler,
        &origin_points(config),
        config.samples,
        config.seed,
        PushforwardOptions::default(),
    )?;
    let lags = if config.lags.is_empty() {
        [0.25f64, 0.5, 1.0]
            .iter()
            .map(|&d| {
                let mut v = vec![0.0; config.m];
                v[0] = d.min(window);
                v
            })
            .collect()
    } else {
        config.lags.clone()
    };
    let cov = covariance_compare(&wave, radius, window, &lags, config.samples, config.seed)?;
    let p1 = out.join("pushforward.csv");
    push.write_csv(create(&p1)?)?;
    let p2 = out.join("covariance.csv");
    cov.write_csv(create(&p2)?)?;
    Ok(vec![p1, p2])
}

fn kacrice(config: &ExperimentConfig, out: &Path) -> CmdResult {
    let measure = ensemble(config)?.measure().clone();
    let c = kac_rice_density(&measure)?;
    let path = out.join("kacrice.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record(["m", "measure", "density", "stderr", "samples"])?;
    let kind = match config.measure {
        MeasureChoice::Uniform => "uniform",
        MeasureChoice::Empirical => "empirical",
        MeasureChoice::Partition => "partition",
    };
    w.write_record([config.m.to_string(), kind.to_string(), sci(c.value), sci(c.stderr), c.samples.to_string()])?;
    w.flush()?;
    Ok(vec![path])
}

fn ns_estimate(config: &ExperimentConfig, out: &Path) -> CmdResult {
    let sampler = ensemble(config)?;
    let est = ns_constant_estimate(&sampler, config.require_window()?, config.trials, config.seed, config.h)?;
    let path = out.join("ns_estimate.csv");
    est.write_csv(create(&path)?)?;
    Ok(vec![path])
}

fn sandwich(config: &ExperimentConfig, out: &Path) -> CmdResult {
    let field = CliField::new(config, 2.0 * PI)?;
    let radius = config.require_radius()?;
    let r = config.inner_radius;
    let grid = sample_on_grid(&field, &vec![0.0; config.m], radius + r, config.h)?;
    let mut report = volume_sandwich_check(&grid, radius, r)?;
    report.metadata.seed = Some(config.seed);
    let path = out.join("sandwich.csv");
    report.write_csv(create(&path)?)?;
    Ok(vec![path])
}

fn semilocal(config: &ExperimentConfig, out: &Path) -> CmdResult {
    let field = CliField::new(config, 2.0 * PI)?;
    let window = config.require_window()?;
    let mut report = semilocal_count_check(
        &field,
        config.require_radius()?,
        window,
        config.h,
        config.spacing.unwrap_or(window),
    )?;
    report.metadata.seed = Some(config.seed);
    let path = out.join("semilocal.csv");
    report.write_csv(create(&path)?)?;
    Ok(vec![path])
}

fn discrepancy(config: &ExperimentConfig, out: &Path) -> CmdResult {
    let sampler = ensemble(config)?;
    let window = config.require_window()?;
    let d = discrepancy_estimate(&sampler, window, config.trials, config.seed, config.h)?;
    let path = out.join("discrepancy.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record(["seed", "h", "W", "m", "trials", "excluded", "mean", "stderr"])?;
    w.write_record([
        config.seed.to_string(),
        config.h.to_string(),
        window.to_string(),
        config.m.to_string(),
        d.trials.to_string(),
        d.excluded.to_string(),
        sci(d.mean),
        sci(d.stderr),
    ])?;
    w.flush()?;
    Ok(vec![path])
}

/// Largest |g(x) − J_0(|x|)| over a polar grid of the disk of radius 10.
pub(super) fn bessel_profile_deviation<F: Field + ?Sized>(g: &F) -> f64 {
    let angles = 16;
    (0..=200)
        .into_par_iter()
        .map(|i| {
            let rho = i as f64 * 0.05;
            let j0 = bessel_j(0.0, rho).expect("order 0");
            (0..angles)
                .map(|a| {
                    let t = 2.0 * PI * a as f64 / angles as f64;
                    (g.value(&[rho * t.cos(), rho * t.sin()]) - j0).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// g_N(x, y) = (1/N) Σ cos(x cos θ_n + y sin θ_n) with seeded uniform angles,
/// as a field in the coordinates of the plot.
pub(super) fn fig1_field(config: &ExperimentConfig, n: usize) -> Result<CliField, CliError> {
    let dirs = generate_uniform_directions(2, n, child_seed(config.seed, n as u64))?;
    let wave = MonochromaticWave::new(dirs, CoefficientSet::all_ones(n))?;
    Ok(CliField {
        dim: 2,
        scale: config.wavenumber.unwrap_or(1.0) / (2.0 * PI),
        // the wave is √(2/N) Σ cos(2π⟨r_n, x⟩)
        amplitude: 1.0 / (2.0 * n as f64).sqrt(),
        shape: Shape::Wave(wave),
    })
}

fn fig1(config: &ExperimentConfig, out: &Path) -> CmdResult {
    if config.m != 2 {
        return Err(CliError::BadValue {
            key: "m".into(),
            reason: "fig1 is planar (m = 2)".into(),
        });
    }
    let e = config.extent;
    if e > 60.0 {
        return Err(CliError::BadValue {
            key: "extent".into(),
            reason: format!("the J_0 zero table covers radii up to 60, got {e}"),
        });
    }
    let zeros = bessel_zero_table(20);
    let circles: Vec<f64> = zeros.iter().copied().filter(|&z| z <= e * 2f64.sqrt()).collect();
    let mut paths = Vec::new();
    let profile = out.join("fig1_profile.csv");
    let mut pw = csv::Writer::from_writer(create(&profile)?);
    pw.write_record(["seed", "N", "h", "max_deviation", "zero_components", "length"])?;
    for &n in &config.counts {
        let g = fig1_field(config, n)?;
        let grid = sample_box(&g, &[-e, -e], &[e, e], config.h)?;
        let geom = nodal_volume(&grid)?;
        let svg = out.join(format!("fig1_N{n}.svg"));
        let mut w = create(&svg)?;
        write_zero_set_svg(&geom, [-e, -e], [e, e], &circles, &mut w)?;
        w.flush()?;
        paths.push(svg);
        pw.write_record([
            config.seed.to_string(),
            n.to_string(),
            config.h.to_string(),
            sci(bessel_profile_deviation(&g)),
            geom.components().len().to_string(),
            sci(geom.total()),
        ])?;
    }
    pw.flush()?;
    paths.push(profile);

    let radial = out.join("fig1_radial.csv");
    let mut rw = csv::Writer::from_writer(create(&radial)?);
    rw.write_record(["rho", "domains", "zeros_below", "linear"])?;
    let j0 = crate::field::FnField::new(2, |x: &[f64]| {
        bessel_j(0.0, (x[0] * x[0] + x[1] * x[1]).sqrt()).expect("order 0")
    });
    // radii midway between consecutive zeros keep the mask boundary away
    // from the nodal circles
    for pair in zeros.windows(2) {
        let rho = 0.5 * (pair[0] + pair[1]);
        if rho > e {
            break;
        }
        let grid = sample_on_grid(&j0, &[0.0, 0.0], rho, config.h)?;
        let domains = label_domains(&grid)?.total_count();
        let below = zeros.iter().filter(|&&z| z < rho).count();
        rw.write_record([sci(rho), domains.to_string(), below.to_string(), sci(rho / PI)])?;
    }
    rw.flush()?;
    paths.push(radial);
    Ok(paths)
}
