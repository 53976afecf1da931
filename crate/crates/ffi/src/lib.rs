//! C ABI for monowave.
//!
//! Waves and Gaussian fields are opaque handles created by `*_new_*`
//! functions and released by the matching `*_free`. Every fallible call
//! returns an [`MwStatus`]; on failure the message is kept per thread and
//! read with [`mw_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use monowave::directions::{empirical_measure, generate_uniform_directions, DirectionSet};
use monowave::field::{bessel_j, CoefficientSet, Field, MonochromaticWave};
use monowave::gaussian::{sample_atomic, sample_uniform, GaussianRealization, SpectralMeasure};
use monowave::grid::sample_on_grid;
use monowave::nodal::{label_domains, nodal_volume};
use monowave::rng::child_seed;
use monowave::stats::kac_rice_density;
use monowave::Error;
use num_complex::Complex64;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Degenerate = 3,
    Io = 4,
    Panic = 5,
}

/// A deterministic monochromatic wave.
pub struct MwWave(MonochromaticWave);

/// One realization of a Gaussian comparison field.
pub struct MwGaussian(GaussianRealization);

/// Nodal statistics of a field sampled on B(center, radius).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MwNodalCounts {
    /// Sign components not touching the boundary shell.
    pub interior: usize,
    /// Sign components touching the boundary shell.
    pub boundary: usize,
    /// Connected components of the extracted zero set.
    pub zero_components: usize,
    /// Length (m = 2) or area (m = 3) of the zero set inside the ball.
    pub volume: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MwStatus {
    match e {
        Error::DegenerateSample(_)
        | Error::Resolution { .. }
        | Error::DegenerateMeasure(_)
        | Error::DegeneratePartition(_) => MwStatus::Degenerate,
        Error::Io(_) | Error::Csv(_) => MwStatus::Io,
        _ => MwStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and panics in the last-error slot.
fn guard<F: FnOnce() -> Result<(), (MwStatus, String)>>(f: F) -> MwStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MwStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {message}"));
            MwStatus::Panic
        }
    }
}

fn lib<T>(r: monowave::Result<T>) -> Result<T, (MwStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (MwStatus, String) {
    (MwStatus::NullPointer, format!("`{what}` is null"))
}

/// # Safety
/// `p` must be null or point to `len` readable f64 values.
unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], (MwStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn check_dim(expected: usize, got: usize) -> Result<(), (MwStatus, String)> {
    if expected != got {
        return Err((
            MwStatus::InvalidArgument,
            Error::DimensionMismatch { expected, got }.to_string(),
        ));
    }
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn mw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Wave with `n` seeded uniform directions in R^m; random-phase coefficients
/// unless `all_ones` is non-zero.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn mw_wave_new_uniform(m: usize, n: usize, seed: u64, all_ones: i32, out: *mut *mut MwWave) -> MwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let dirs = lib(generate_uniform_directions(m, n, seed))?;
        let coeffs = if all_ones != 0 {
            CoefficientSet::all_ones(n)
        } else {
            CoefficientSet::random_phase(n, child_seed(seed, 1))
        };
        let wave = lib(MonochromaticWave::new(dirs, coeffs))?;
        *out = Box::into_raw(Box::new(MwWave(wave)));
        Ok(())
    })
}

/// Wave from explicit terms: `directions` holds n unit vectors of length m
/// (row-major), `coeff_re` / `coeff_im` the n unit-modulus coefficients.
///
/// # Safety
/// The arrays must hold `n * m`, `n` and `n` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mw_wave_new_from_terms(
    m: usize,
    n: usize,
    directions: *const f64,
    coeff_re: *const f64,
    coeff_im: *const f64,
    out: *mut *mut MwWave,
) -> MwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d = slice(directions, n * m, "directions")?;
        let re = slice(coeff_re, n, "coeff_re")?;
        let im = slice(coeff_im, n, "coeff_im")?;
        let vectors = if m == 0 { Vec::new() } else { d.chunks(m).map(<[f64]>::to_vec).collect() };
        let dirs = lib(DirectionSet::new(m, vectors))?;
        let coeffs = lib(CoefficientSet::new(
            re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect(),
        ))?;
        let wave = lib(MonochromaticWave::new(dirs, coeffs))?;
        *out = Box::into_raw(Box::new(MwWave(wave)));
        Ok(())
    })
}

/// # Safety
/// `wave` must be null or a handle from `mw_wave_new_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mw_wave_free(wave: *mut MwWave) {
    if !wave.is_null() {
        drop(Box::from_raw(wave));
    }
}

/// Dimension m, or 0 for a null handle.
///
/// # Safety
/// `wave` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mw_wave_dim(wave: *const MwWave) -> usize {
    wave.as_ref().map_or(0, |w| w.0.dim())
}

/// Number of directions N, or 0 for a null handle.
///
/// # Safety
/// `wave` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mw_wave_count(wave: *const MwWave) -> usize {
    wave.as_ref().map_or(0, |w| w.0.count())
}

/// f(x) for a point of length `len` (must equal m).
///
/// # Safety
/// `wave` live, `x` holds `len` values, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mw_wave_eval(wave: *const MwWave, x: *const f64, len: usize, out: *mut f64) -> MwStatus {
    guard(|| {
        let w = wave.as_ref().ok_or_else(|| null("wave"))?;
        let x = slice(x, len, "x")?;
        if out.is_null() {
            return Err(null("out"));
        }
        check_dim(w.0.dim(), len)?;
        *out = w.0.value(x);
        Ok(())
    })
}

/// ∇f(x) written to `grad` (length m).
///
/// # Safety
/// `wave` live, `x` and `grad` hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn mw_wave_eval_gradient(wave: *const MwWave, x: *const f64, len: usize, grad: *mut f64) -> MwStatus {
    guard(|| {
        let w = wave.as_ref().ok_or_else(|| null("wave"))?;
        let x = slice(x, len, "x")?;
        if grad.is_null() {
            return Err(null("grad"));
        }
        check_dim(w.0.dim(), len)?;
        let g = w.0.gradient(x);
        std::slice::from_raw_parts_mut(grad, len).copy_from_slice(&g);
        Ok(())
    })
}

/// Gaussian field with the uniform spectral measure on S^{m-1}, built from
/// `plane_waves` random plane waves.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mw_gaussian_new_uniform(m: usize, plane_waves: usize, seed: u64, out: *mut *mut MwGaussian) -> MwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = lib(sample_uniform(m, plane_waves, seed))?;
        *out = Box::into_raw(Box::new(MwGaussian(g)));
        Ok(())
    })
}

/// Gaussian field whose spectral measure has atoms at the wave's directions.
///
/// # Safety
/// `wave` live, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mw_gaussian_new_empirical(wave: *const MwWave, seed: u64, out: *mut *mut MwGaussian) -> MwStatus {
    guard(|| {
        let w = wave.as_ref().ok_or_else(|| null("wave"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let g = lib(sample_atomic(&empirical_measure(w.0.directions()), seed))?;
        *out = Box::into_raw(Box::new(MwGaussian(g)));
        Ok(())
    })
}

/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mw_gaussian_free(field: *mut MwGaussian) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// F(x) for a point of length `len`.
///
/// # Safety
/// `field` live, `x` holds `len` values, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mw_gaussian_eval(field: *const MwGaussian, x: *const f64, len: usize, out: *mut f64) -> MwStatus {
    guard(|| {
        let g = field.as_ref().ok_or_else(|| null("field"))?;
        let x = slice(x, len, "x")?;
        if out.is_null() {
            return Err(null("out"));
        }
        check_dim(g.0.dim(), len)?;
        *out = g.0.value(x);
        Ok(())
    })
}

unsafe fn nodal_counts<F: Field>(
    field: &F,
    center: *const f64,
    len: usize,
    radius: f64,
    h: f64,
    out: *mut MwNodalCounts,
) -> Result<(), (MwStatus, String)> {
    let c = slice(center, len, "center")?;
    if out.is_null() {
        return Err(null("out"));
    }
    check_dim(field.dim(), len)?;
    let grid = lib(sample_on_grid(field, c, radius, h))?;
    let dec = lib(label_domains(&grid))?;
    let geom = lib(nodal_volume(&grid))?;
    *out = MwNodalCounts {
        interior: dec.interior_count(),
        boundary: dec.boundary_count(),
        zero_components: geom.components().len(),
        volume: geom.total(),
    };
    Ok(())
}

/// Samples the wave on B(center, radius) with spacing `h` and labels it.
///
/// # Safety
/// `wave` live, `center` holds `len` values, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mw_wave_nodal_counts(
    wave: *const MwWave,
    center: *const f64,
    len: usize,
    radius: f64,
    h: f64,
    out: *mut MwNodalCounts,
) -> MwStatus {
    guard(|| {
        let w = wave.as_ref().ok_or_else(|| null("wave"))?;
        nodal_counts(&w.0, center, len, radius, h, out)
    })
}

/// As [`mw_wave_nodal_counts`] for a Gaussian field.
///
/// # Safety
/// `field` live, `center` holds `len` values, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mw_gaussian_nodal_counts(
    field: *const MwGaussian,
    center: *const f64,
    len: usize,
    radius: f64,
    h: f64,
    out: *mut MwNodalCounts,
) -> MwStatus {
    guard(|| {
        let g = field.as_ref().ok_or_else(|| null("field"))?;
        nodal_counts(&g.0, center, len, radius, h, out)
    })
}

/// Kac–Rice zero-set density of the uniform measure on S^{m-1}.
///
/// # Safety
/// `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mw_kac_rice_uniform(m: usize, out: *mut f64) -> MwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let measure = lib(SpectralMeasure::uniform(m))?;
        *out = lib(kac_rice_density(&measure))?.value;
        Ok(())
    })
}

/// Kac–Rice density of the wave's empirical direction measure, with the
/// Monte Carlo standard error.
///
/// # Safety
/// `wave` live; `out_value` valid; `out_stderr` null or valid.
#[no_mangle]
pub unsafe extern "C" fn mw_kac_rice_wave(wave: *const MwWave, out_value: *mut f64, out_stderr: *mut f64) -> MwStatus {
    guard(|| {
        let w = wave.as_ref().ok_or_else(|| null("wave"))?;
        if out_value.is_null() {
            return Err(null("out_value"));
        }
        let c = lib(kac_rice_density(&empirical_measure(w.0.directions())))?;
        *out_value = c.value;
        if !out_stderr.is_null() {
            *out_stderr = c.stderr;
        }
        Ok(())
    })
}

/// Bessel function J_ν(z) for ν ≥ 0 integer or half-integer and z ≥ 0.
///
/// # Safety
/// `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mw_bessel_j(nu: f64, z: f64, out: *mut f64) -> MwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lib(bessel_j(nu, z))?;
        Ok(())
    })
}
