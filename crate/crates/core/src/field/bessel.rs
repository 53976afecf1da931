//! Bessel functions of the first kind for integer and half-integer orders.
//!
//! Small arguments use the defining power series. Larger arguments use
//! Miller's backward recurrence (integer orders) or the closed forms of the
//! spherical Bessel functions with upward recurrence (half-integer orders);
//! both stay at full double precision where a truncated asymptotic
//! expansion would not.

use crate::error::{invalid, Result};

/// Largest supported order.
pub const MAX_ORDER: f64 = 10.0;
/// Arguments up to this value are summed from the power series.
const SERIES_LIMIT: f64 = 12.0;

fn check_order(nu: f64) -> Result<()> {
    let twice = 2.0 * nu;
    if !(0.0..=MAX_ORDER).contains(&nu) || (twice - twice.round()).abs() > 1e-12 {
        return Err(invalid(
            "nu",
            format!("order must be an integer or half-integer in [0, {MAX_ORDER}], got {nu}"),
        ));
    }
    Ok(())
}

/// J_ν(z) for ν ∈ {0, 1/2, 1, ..., 10} and z ≥ 0.
pub fn bessel_j(nu: f64, z: f64) -> Result<f64> {
    check_order(nu)?;
    if !(z >= 0.0) {
        return Err(invalid("z", format!("argument must be >= 0, got {z}")));
    }
    Ok(bessel_j_unchecked(nu, z))
}

pub(crate) fn bessel_j_unchecked(nu: f64, z: f64) -> f64 {
    if z == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if z <= SERIES_LIMIT {
        return z.powf(nu) * scaled_series(nu, z);
    }
    let twice = (2.0 * nu).round() as usize;
    if twice.is_multiple_of(2) {
        miller(twice / 2, z)
    } else {
        let n = twice / 2;
        (2.0 * z / std::f64::consts::PI).sqrt() * spherical_j(n, z)
    }
}

/// J_ν(z) / z^ν, finite at z = 0 where it equals 1 / (2^ν Γ(ν+1)).
pub fn bessel_j_over_power(nu: f64, z: f64) -> Result<f64> {
    check_order(nu)?;
    if !(z >= 0.0) {
        return Err(invalid("z", format!("argument must be >= 0, got {z}")));
    }
    Ok(if z <= SERIES_LIMIT {
        scaled_series(nu, z)
    } else {
        bessel_j_unchecked(nu, z) / z.powf(nu)
    })
}

/// Σ_k (-1)^k (z/2)^{2k} / (2^ν k! Γ(k+ν+1)).
fn scaled_series(nu: f64, z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0 / (2f64.powf(nu) * gamma_integer_or_half(nu + 1.0));
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && k > q.sqrt() {
            break;
        }
        if k > 500.0 {
            break;
        }
    }
    sum
}

/// Γ(x) for positive integers and half-integers.
pub(crate) fn gamma_integer_or_half(x: f64) -> f64 {
    let twice = (2.0 * x).round() as i64;
    if twice % 2 == 0 {
        (1..(twice / 2)).map(|i| i as f64).product()
    } else {
        // Γ(n + 1/2) = (2n)! √π / (4^n n!) = √π Π_{i=1..n} (i - 1/2)
        let n = (twice - 1) / 2;
        (1..=n).map(|i| i as f64 - 0.5).product::<f64>() * std::f64::consts::PI.sqrt()
    }
}

/// J_n(z) by downward recurrence normalized with J_0 + 2 Σ J_{2k} = 1.
fn miller(n: usize, z: f64) -> f64 {
    let top = (n as f64).max(z);
    let mut start = (top + 15.0 + (40.0 * top).sqrt()) as usize;
    start += start % 2;
    let mut next = 0.0;
    let mut cur = 1e-30;
    let mut norm = 0.0;
    let mut result = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / z * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
        // `cur` now holds J_{k-1} (unnormalized)
        if k - 1 == n {
            result = cur;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * cur;
        }
    }
    norm += cur;
    result / norm
}

/// Spherical Bessel j_n(z) by upward recurrence; stable for n < z.
fn spherical_j(n: usize, z: f64) -> f64 {
    let (s, c) = z.sin_cos();
    let j0 = s / z;
    if n == 0 {
        return j0;
    }
    let mut prev = j0;
    let mut cur = s / (z * z) - c / z;
    for k in 1..n {
        let nxt = (2 * k + 1) as f64 / z * cur - prev;
        prev = cur;
        cur = nxt;
    }
    cur
}

/// The first `count` positive zeros of J_0, each to about 1e-12.
pub fn bessel_zero_table(count: usize) -> Vec<f64> {
    let mut zeros = Vec::with_capacity(count);
    let step = 0.1;
    let mut a = step;
    let mut fa = bessel_j_unchecked(0.0, a);
    while zeros.len() < count {
        let b = a + step;
        let fb = bessel_j_unchecked(0.0, b);
        if fa == 0.0 {
            zeros.push(a);
        } else if fa * fb < 0.0 {
            zeros.push(bisect(|x| bessel_j_unchecked(0.0, x), a, b, 1e-13));
        }
        a = b;
        fa = fb;
    }
    zeros
}

pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
