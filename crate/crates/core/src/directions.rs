//! Direction sequences on the unit sphere and their finite sum-gap diagnostics.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{invalid, Error, Result};
use crate::gaussian::SpectralMeasure;
use crate::linalg::{dot, norm, numerical_rank};
use crate::rng;

/// Unit-norm tolerance for stored directions.
pub const UNIT_TOL: f64 = 1e-12;
/// Two directions closer than this (up to sign) count as a collision.
pub const COLLISION_TOL: f64 = 1e-9;
/// Minimal accepted sum gap for t <= 3 when certifying a set.
pub const GAP_FLOOR: f64 = 1e-6;
/// Largest order accepted by [`min_sum_gap`].
pub const MAX_GAP_ORDER: usize = 4;

/// The positive half {r_1, ..., r_N} of a symmetric direction set; r_{-n} = -r_n is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    dim: usize,
    vectors: Vec<Vec<f64>>,
    gaps: BTreeMap<usize, f64>,
}

impl DirectionSet {
    /// Validates unit norms and pairwise distinctness up to sign.
    pub fn new(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("m", format!("dimension must be >= 2, got {dim}")));
        }
        if vectors.is_empty() {
            return Err(invalid("N", "at least one direction is required"));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            let n = norm(v);
            if (n - 1.0).abs() > UNIT_TOL {
                return Err(invalid("vectors", format!("direction {i} has norm {n}")));
            }
        }
        if let Some((i, j)) = first_collision(&vectors) {
            return Err(invalid(
                "vectors",
                format!("directions {i} and {j} coincide or are antipodal"),
            ));
        }
        Ok(Self {
            dim,
            vectors,
            gaps: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn vector(&self, n: usize) -> &[f64] {
        &self.vectors[n]
    }

    /// Signed atom `±r_n`: index `2n` is `+r_n`, `2n + 1` is `-r_n`.
    pub fn signed(&self) -> impl Iterator<Item = (usize, f64, &[f64])> + '_ {
        self.vectors
            .iter()
            .enumerate()
            .flat_map(|(n, v)| [(n, 1.0, v.as_slice()), (n, -1.0, v.as_slice())])
    }

    /// True when the directions are not all contained in a hyperplane.
    pub fn spans(&self) -> bool {
        numerical_rank(&self.vectors, self.dim, 1e-10) == self.dim
    }

    /// Cached gaps computed by [`DirectionSet::certified`].
    pub fn gap_cache(&self) -> &BTreeMap<usize, f64> {
        &self.gaps
    }

    /// Computes sum gaps up to `t_max` and rejects the set if any gap with
    /// t <= 3 falls below [`GAP_FLOOR`].
    pub fn certified(mut self, t_max: usize) -> Result<Self> {
        let gaps = min_sum_gap(&self, t_max)?;
        for (&t, &g) in &gaps {
            if t <= 3 && g <= GAP_FLOOR {
                return Err(invalid(
                    "directions",
                    format!("sum gap for t = {t} is {g:e}, below {GAP_FLOOR:e}"),
                ));
            }
        }
        self.gaps = gaps;
        Ok(self)
    }

    /// Writes the plain text format: `m N` then one direction per line.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.dim, self.count())?;
        for v in &self.vectors {
            let mut line = String::new();
            for (i, c) in v.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                write!(line, "{c:.16e}").expect("write to string");
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("write to vec");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input
            .lines()
            .map(|l| l.map_err(Error::from))
            .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header line".into()))??;
        let mut it = header.split_whitespace();
        let parse_usize = |s: Option<&str>, what: &str| -> Result<usize> {
            s.ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
        };
        let dim = parse_usize(it.next(), "m")?;
        let count = parse_usize(it.next(), "N")?;
        let mut vectors = Vec::with_capacity(count);
        for i in 0..count {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing direction line {i}")))??;
            let v = line
                .split_whitespace()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))
                })
                .collect::<Result<Vec<_>>>()?;
            vectors.push(v);
        }
        Self::new(dim, vectors)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::read_text(text.as_bytes())
    }
}

fn first_collision(vectors: &[Vec<f64>]) -> Option<(usize, usize)> {
    for i in 0..vectors.len() {
        for j in 0..i {
            if is_collision(&vectors[i], &vectors[j]) {
                return Some((j, i));
            }
        }
    }
    None
}

fn is_collision(a: &[f64], b: &[f64]) -> bool {
    // |a - b|^2 = 2 - 2 a.b for unit vectors.
    let d = dot(a, b);
    let dist = (2.0 - 2.0 * d.abs()).max(0.0).sqrt();
    dist <= COLLISION_TOL
}

/// `N` independent uniform directions on S^{m-1}.
///
/// Near-antipodal collisions are resampled; when `N >= m` the draw is
/// repeated until the directions span R^m.
pub fn generate_uniform_directions(m: usize, count: usize, seed: u64) -> Result<DirectionSet> {
    if m < 2 {
        return Err(invalid("m", format!("dimension must be >= 2, got {m}")));
    }
    if count < 1 {
        return Err(invalid("N", "at least one direction is required"));
    }
    let mut rng = rng::rng_from_seed(seed);
    loop {
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
        while vectors.len() < count {
            let v = rng::unit_vector(&mut rng, m);
            if vectors.iter().any(|w| is_collision(&v, w)) {
                continue;
            }
            vectors.push(v);
        }
        if count < m || numerical_rank(&vectors, m, 1e-10) == m {
            return DirectionSet::new(m, vectors);
        }
    }
}

/// Planar directions at angles `log b_n` (in turns), `b_n = 1 + n/(N+1)`.
pub fn log_rational_directions(count: usize) -> Result<DirectionSet> {
    if count < 1 {
        return Err(invalid("N", "at least one direction is required"));
    }
    let vectors = log_rational_angles(count)
        .into_iter()
        .map(|theta| {
            let a = 2.0 * std::f64::consts::PI * theta;
            vec![a.cos(), a.sin()]
        })
        .collect();
    DirectionSet::new(2, vectors)
}

/// Angles (in turns) used by [`log_rational_directions`].
pub fn log_rational_angles(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|n| (n as f64 / (count as f64 + 1.0)).ln_1p())
        .collect()
}

/// Minimum of |r_{n_1} + ... + r_{n_t}| over signed index tuples, for each
/// t in 2..=t_max, excluding tuples that cancel exactly in pairs.
pub fn min_sum_gap(dirs: &DirectionSet, t_max: usize) -> Result<BTreeMap<usize, f64>> {
    if t_max < 2 {
        return Err(invalid("T", format!("order must be >= 2, got {t_max}")));
    }
    if t_max > MAX_GAP_ORDER {
        return Err(Error::Cost(format!(
            "order {t_max} needs ~(2N)^{t_max} sums; at most {MAX_GAP_ORDER} is supported"
        )));
    }
    let m = dirs.dim();
    let atoms: Vec<Vec<f64>> = dirs
        .signed()
        .map(|(_, s, v)| v.iter().map(|c| s * c).collect())
        .collect();
    let mut out = BTreeMap::new();
    for t in 2..=t_max {
        let mut best = f64::INFINITY;
        let mut idx = vec![0usize; t];
        // Multisets of size t: non-decreasing index tuples.
        enumerate_multisets(atoms.len(), t, 0, 0, &mut idx, &mut |idx| {
            if t % 2 == 0 && cancels_in_pairs(idx) {
                return;
            }
            let mut sum = vec![0.0; m];
            for &a in idx.iter() {
                for (s, c) in sum.iter_mut().zip(&atoms[a]) {
                    *s += c;
                }
            }
            let n = norm(&sum);
            if n < best {
                best = n;
            }
        });
        out.insert(t, best);
    }
    Ok(out)
}

fn enumerate_multisets(
    n_atoms: usize,
    t: usize,
    depth: usize,
    start: usize,
    idx: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == t {
        visit(idx);
        return;
    }
    for a in start..n_atoms {
        idx[depth] = a;
        enumerate_multisets(n_atoms, t, depth + 1, a, idx, visit);
    }
}

/// Signed atom `2n` is `+r_n` and `2n + 1` is `-r_n`; a tuple cancels when
/// each direction appears equally often with both signs.
fn cancels_in_pairs(idx: &[usize]) -> bool {
    let mut balance: BTreeMap<usize, i32> = BTreeMap::new();
    for &a in idx {
        *balance.entry(a / 2).or_default() += if a % 2 == 0 { 1 } else { -1 };
    }
    balance.values().all(|&b| b == 0)
}

/// Atoms at ±r_n, each of weight 1/(2N).
pub fn empirical_measure(dirs: &DirectionSet) -> SpectralMeasure {
    let w = 1.0 / dirs.count() as f64;
    SpectralMeasure::symmetric_atomic_unchecked(
        dirs.dim(),
        dirs.vectors().iter().map(|v| (v.clone(), w)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_uniform_direction_is_unit() {
        let d = generate_uniform_directions(2, 1, 0).unwrap();
        assert_eq!(d.count(), 1);
        assert!((norm(d.vector(0)) - 1.0).abs() <= 1e-12);
        assert!(!d.spans());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(matches!(
            generate_uniform_directions(1, 4, 0),
            Err(Error::InvalidParameter { name: "m", .. })
        ));
        assert!(generate_uniform_directions(3, 0, 0).is_err());
        assert!(log_rational_directions(0).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_uniform_directions(3, 20, 11).unwrap();
        let b = generate_uniform_directions(3, 20, 11).unwrap();
        let c = generate_uniform_directions(3, 20, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn log_rational_first_angle() {
        let d = log_rational_directions(1).unwrap();
        // ln(3/2) to 20 digits: 0.40546510810816438198
        let theta = 0.405_465_108_108_164_38_f64;
        let a = 2.0 * std::f64::consts::PI * theta;
        assert!((d.vector(0)[0] - a.cos()).abs() < 1e-14);
        assert!((d.vector(0)[1] - a.sin()).abs() < 1e-14);
    }

    #[test]
    fn log_rational_angles_are_in_unit_interval_and_distinct() {
        let two = log_rational_angles(2);
        assert!(two.iter().all(|&t| t > 0.0 && t < 1.0));
        assert_ne!(two[0], two[1]);
        let sixteen = log_rational_angles(16);
        for i in 0..16 {
            for j in 0..i {
                assert!((sixteen[i] - sixteen[j]).abs() > 1e-9);
            }
        }
        assert!(log_rational_directions(16).is_ok());
    }

    #[test]
    fn duplicated_or_antipodal_vectors_are_rejected() {
        let v = vec![0.6, 0.8];
        assert!(DirectionSet::new(2, vec![v.clone(), v.clone()]).is_err());
        assert!(DirectionSet::new(2, vec![v.clone(), vec![-0.6, -0.8]]).is_err());
        assert!(DirectionSet::new(2, vec![vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn gap_orders_are_bounded() {
        let d = generate_uniform_directions(2, 4, 1).unwrap();
        assert!(matches!(min_sum_gap(&d, 5), Err(Error::Cost(_))));
        assert!(matches!(min_sum_gap(&d, 1), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn order_two_gap_is_min_pairwise_distance_up_to_sign() {
        let d = generate_uniform_directions(3, 12, 5).unwrap();
        let gap = min_sum_gap(&d, 2).unwrap()[&2];
        let mut scan = f64::INFINITY;
        for i in 0..d.count() {
            for j in 0..i {
                let a = d.vector(i);
                let b = d.vector(j);
                let plus: f64 = a.iter().zip(b).map(|(x, y)| (x + y).powi(2)).sum::<f64>().sqrt();
                let minus: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                scan = scan.min(plus).min(minus);
            }
        }
        assert!((gap - scan).abs() < 1e-15);
    }

    #[test]
    fn order_three_gap_matches_brute_force() {
        // Brute force over ordered triples of signed atoms.
        let d = generate_uniform_directions(2, 8, 3).unwrap();
        let gap = min_sum_gap(&d, 3).unwrap()[&3];
        let mut brute = f64::INFINITY;
        let atoms: Vec<[f64; 2]> = d
            .vectors()
            .iter()
            .flat_map(|v| [[v[0], v[1]], [-v[0], -v[1]]])
            .collect();
        for a in &atoms {
            for b in &atoms {
                for c in &atoms {
                    let s = [a[0] + b[0] + c[0], a[1] + b[1] + c[1]];
                    brute = brute.min((s[0] * s[0] + s[1] * s[1]).sqrt());
                }
            }
        }
        assert!(gap > 0.0);
        assert!((gap - brute).abs() < 1e-14);
    }

    #[test]
    fn even_orders_skip_exact_cancellation() {
        let d = generate_uniform_directions(2, 3, 9).unwrap();
        let gaps = min_sum_gap(&d, 4).unwrap();
        assert!(gaps[&2] > 0.0);
        assert!(gaps[&4] > 0.0);
        let certified = d.certified(3).unwrap();
        assert_eq!(certified.gap_cache().len(), 2);
    }

    #[test]
    fn empirical_measure_is_symmetric_probability() {
        let d = generate_uniform_directions(3, 64, 2).unwrap();
        let mu = empirical_measure(&d);
        let atoms = mu.atoms().unwrap();
        assert_eq!(atoms.len(), 128);
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(mu.mean().iter().all(|c| *c == 0.0));
        assert!(mu.is_symmetric());

        let single = empirical_measure(&generate_uniform_directions(2, 1, 0).unwrap());
        let atoms = single.atoms().unwrap();
        assert_eq!(atoms.len(), 2);
        assert!(atoms.iter().all(|a| a.1 == 0.5));
    }

    #[test]
    fn text_format_round_trips() {
        let d = generate_uniform_directions(3, 5, 4).unwrap();
        let text = d.to_text();
        assert!(text.starts_with("3 5\n"));
        let back = DirectionSet::from_text(&text).unwrap();
        assert_eq!(back, d);
        assert!(DirectionSet::from_text("2 2\n1 0\n").is_err());
    }
}
