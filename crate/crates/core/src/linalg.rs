//! Small dense helpers; nothing here is performance critical.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Rank of the row set via Gaussian elimination with full pivoting.
/// Pivots below `rel_tol` times the largest entry are treated as zero.
pub fn numerical_rank(rows: &[Vec<f64>], cols: usize, rel_tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let n = a.len();
    let mut col_used = vec![false; cols];
    let mut rank = 0;
    for _ in 0..cols.min(n) {
        let mut best = (0.0, 0, 0);
        for (i, row) in a.iter().enumerate().skip(rank) {
            for (j, &v) in row.iter().enumerate() {
                if !col_used[j] && v.abs() > best.0 {
                    best = (v.abs(), i, j);
                }
            }
        }
        if best.0 <= rel_tol * scale {
            break;
        }
        let (_, pi, pj) = best;
        a.swap(rank, pi);
        col_used[pj] = true;
        let pivot_row = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[pj] / pivot_row[pj];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Cholesky factor `L` (row-major, lower) of a symmetric positive definite matrix.
pub fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_simple_sets() {
        assert_eq!(numerical_rank(&[vec![1.0, 0.0], vec![2.0, 0.0]], 2, 1e-12), 1);
        assert_eq!(numerical_rank(&[vec![1.0, 0.0], vec![0.5, 0.5]], 2, 1e-12), 2);
        assert_eq!(numerical_rank(&[vec![0.0, 0.0]], 2, 1e-12), 0);
        let rows = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 1.0, 1.0]];
        assert_eq!(numerical_rank(&rows, 3, 1e-12), 2);
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = [4.0, 2.0, 2.0, 3.0];
        let l = cholesky(&a, 2).unwrap();
        let rec = [
            l[0] * l[0],
            l[2] * l[0],
            l[2] * l[0],
            l[2] * l[2] + l[3] * l[3],
        ];
        for (x, y) in rec.iter().zip(&a) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(cholesky(&[1.0, 2.0, 2.0, 1.0], 2).is_none());
    }
}
