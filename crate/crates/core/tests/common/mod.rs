//! Shared oracles for the integration tests.
#![allow(dead_code)]

use monowave::grid::{BallMask, ScalarGrid};
use monowave::nodal::{label_domains, Sign, UNLABELED};

/// Sign, vertex count, touches the boundary.
pub type OracleComponent = (bool, usize, bool);

/// Stack-based flood fill: positives join their 8 neighbours, negatives
/// their 4 axis neighbours. Returns per-vertex component ids and per-component
/// (sign, size, boundary).
pub fn flood_fill(grid: &ScalarGrid) -> (Vec<Option<usize>>, Vec<OracleComponent>) {
    let (rows, cols) = (grid.shape()[0] as i64, grid.shape()[1] as i64);
    let h = grid.spacing();
    let inside = |i: i64, j: i64| -> bool {
        match grid.mask() {
            None => true,
            Some(mask) => {
                let x = grid.origin()[0] + i as f64 * h - mask.center[0];
                let y = grid.origin()[1] + j as f64 * h - mask.center[1];
                (x * x + y * y).sqrt() <= mask.radius
            }
        }
    };
    let shell = |i: i64, j: i64| -> bool {
        match grid.mask() {
            None => i == 0 || j == 0 || i == rows - 1 || j == cols - 1,
            Some(mask) => {
                let x = grid.origin()[0] + i as f64 * h - mask.center[0];
                let y = grid.origin()[1] + j as f64 * h - mask.center[1];
                mask.radius - (x * x + y * y).sqrt() < h
            }
        }
    };
    let positive = |i: i64, j: i64| grid.values()[(i * cols + j) as usize] > -1e-13;
    let mut id = vec![None; (rows * cols) as usize];
    let mut comps = Vec::new();
    for i0 in 0..rows {
        for j0 in 0..cols {
            if !inside(i0, j0) || id[(i0 * cols + j0) as usize].is_some() {
                continue;
            }
            let c = comps.len();
            let sign = positive(i0, j0);
            let (mut size, mut boundary) = (0, false);
            let mut stack = vec![(i0, j0)];
            id[(i0 * cols + j0) as usize] = Some(c);
            while let Some((i, j)) = stack.pop() {
                size += 1;
                boundary |= shell(i, j);
                for di in -1..=1i64 {
                    for dj in -1..=1i64 {
                        if (di == 0 && dj == 0) || (!sign && di != 0 && dj != 0) {
                            continue;
                        }
                        let (a, b) = (i + di, j + dj);
                        if a < 0 || b < 0 || a >= rows || b >= cols || !inside(a, b) {
                            continue;
                        }
                        let k = (a * cols + b) as usize;
                        if id[k].is_none() && positive(a, b) == sign {
                            id[k] = Some(c);
                            stack.push((a, b));
                        }
                    }
                }
            }
            comps.push((sign, size, boundary));
        }
    }
    (id, comps)
}

/// First disagreement between the library labeling and the flood fill:
/// vertex partition, sign, size or boundary flag.
pub fn oracle_mismatch(grid: &ScalarGrid) -> Option<String> {
    let dec = label_domains(grid).ok()?;
    let (ids, comps) = flood_fill(grid);
    if dec.total_count() != comps.len() {
        return Some(format!("{} components, oracle {}", dec.total_count(), comps.len()));
    }
    let mut map = vec![None; comps.len()];
    for (v, oracle) in ids.iter().enumerate() {
        let label = dec.labels()[v];
        match oracle {
            None if label != UNLABELED => return Some(format!("vertex {v} labeled outside the mask")),
            None => {}
            Some(o) => match map[*o] {
                None => map[*o] = Some(label),
                Some(l) if l != label => return Some(format!("vertex {v} split from its component")),
                Some(_) => {}
            },
        }
    }
    for (o, &(pos, size, boundary)) in comps.iter().enumerate() {
        let c = dec.component(map[o]?);
        if (c.sign == Sign::Positive) != pos || c.size != size || c.touches_boundary != boundary {
            return Some(format!("component {o} differs: {:?} vs ({pos}, {size}, {boundary})", c));
        }
    }
    None
}

/// A ±1 grid of spacing 0.1, optionally masked by its inscribed disk.
pub fn sign_grid(rows: usize, cols: usize, signs: &[bool], masked: bool) -> ScalarGrid {
    let values: Vec<f64> = signs[..rows * cols].iter().map(|&s| if s { 1.0 } else { -1.0 }).collect();
    let h = 0.1;
    let mask = masked.then(|| BallMask {
        center: vec![0.5 * (rows - 1) as f64 * h, 0.5 * (cols - 1) as f64 * h],
        radius: 0.5 * ((rows.min(cols) - 1) as f64) * h,
    });
    ScalarGrid::new(vec![0.0, 0.0], h, vec![rows, cols], values, mask).unwrap()
}
