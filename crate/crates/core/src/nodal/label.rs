use std::collections::BTreeMap;

use super::union_find::UnionFind;
use crate::error::{Error, Result};
use crate::grid::ScalarGrid;

/// Values with magnitude below this are treated as positive.
pub const ZERO_TIE: f64 = 1e-13;

/// Label of vertices outside the mask.
pub const UNLABELED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn of(value: f64) -> Sign {
        if value > -ZERO_TIE {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignComponent {
    pub id: u32,
    pub sign: Sign,
    pub size: usize,
    pub touches_boundary: bool,
    pub bbox_min: Vec<usize>,
    pub bbox_max: Vec<usize>,
}

/// Two opposite-sign components meeting across at least one grid edge.
/// `edge` is the smallest grid edge id (`vertex * m + axis`) where they meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Adjacency {
    pub positive: u32,
    pub negative: u32,
    pub edge: usize,
}

#[derive(Debug, Clone)]
pub struct NodalDecomposition {
    dim: usize,
    shape: Vec<usize>,
    spacing: f64,
    labels: Vec<u32>,
    components: Vec<SignComponent>,
    adjacency: Vec<Adjacency>,
}

impl NodalDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Component label per grid vertex, [`UNLABELED`] outside the mask.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn components(&self) -> &[SignComponent] {
        &self.components
    }

    pub fn component(&self, id: u32) -> &SignComponent {
        &self.components[id as usize]
    }

    pub fn adjacency(&self) -> &[Adjacency] {
        &self.adjacency
    }

    pub fn total_count(&self) -> usize {
        self.components.len()
    }

    /// Components not touching the boundary shell.
    pub fn interior_count(&self) -> usize {
        self.components.iter().filter(|c| !c.touches_boundary).count()
    }

    pub fn boundary_count(&self) -> usize {
        self.components.iter().filter(|c| c.touches_boundary).count()
    }

    /// Endpoint labels of a grid edge, or `None` if either lies outside the mask.
    pub fn edge_labels(&self, edge: usize) -> Option<(u32, u32)> {
        let (v, axis) = (edge / self.dim, edge % self.dim);
        let stride: usize = self.shape[axis + 1..].iter().product();
        let w = v + stride;
        let (a, b) = (self.labels[v], *self.labels.get(w)?);
        (a != UNLABELED && b != UNLABELED).then_some((a, b))
    }
}

/// Forward neighbor offsets as (axis deltas): every axis, plus the face
/// diagonals used by positive vertices.
pub(crate) fn forward_offsets(m: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut axes = Vec::new();
    for a in 0..m {
        let mut d = vec![0; m];
        d[a] = 1;
        axes.push(d);
    }
    let mut diagonals = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            for s in [1, -1] {
                let mut d = vec![0; m];
                d[a] = 1;
                d[b] = s;
                diagonals.push(d);
            }
        }
    }
    (axes, diagonals)
}

/// Labels sign components of the masked vertices.
///
/// Negative vertices join along grid axes only. Positive vertices also join
/// across face diagonals, matching the marching-squares/cubes rule that
/// zero segments on an ambiguous face cut off the negative corners.
pub fn label_domains(grid: &ScalarGrid) -> Result<NodalDecomposition> {
    let m = grid.dim();
    if !(2..=3).contains(&m) {
        return Err(Error::UnsupportedDimension(m));
    }
    let n = grid.len();
    let shape = grid.shape().to_vec();
    let strides = grid.strides();
    let in_mask = grid.mask_flags();
    if !in_mask.iter().any(|&b| b) {
        return Err(Error::EmptyMask);
    }
    let signs: Vec<Sign> = grid.values().iter().map(|&v| Sign::of(v)).collect();
    let (axes, diagonals) = forward_offsets(m);

    let mut uf = UnionFind::new(n);
    let mut idx = vec![0usize; m];
    for i in 0..n {
        if in_mask[i] {
            let offsets = axes
                .iter()
                .chain(if signs[i] == Sign::Positive { diagonals.iter() } else { [].iter() });
            for d in offsets {
                if let Some(j) = neighbor(i, &idx, d, &shape, &strides) {
                    if in_mask[j] && signs[j] == signs[i] {
                        uf.union(i as u32, j as u32);
                    }
                }
            }
        }
        advance(&mut idx, &shape);
    }

    let mut labels = vec![UNLABELED; n];
    let mut root_label: Vec<u32> = vec![UNLABELED; n];
    let mut components: Vec<SignComponent> = Vec::new();
    let mut idx = vec![0usize; m];
    for i in 0..n {
        if in_mask[i] {
            let r = uf.find(i as u32) as usize;
            if root_label[r] == UNLABELED {
                root_label[r] = components.len() as u32;
                components.push(SignComponent {
                    id: components.len() as u32,
                    sign: signs[i],
                    size: 0,
                    touches_boundary: false,
                    bbox_min: idx.clone(),
                    bbox_max: idx.clone(),
                });
            }
            let l = root_label[r];
            labels[i] = l;
            let c = &mut components[l as usize];
            c.size += 1;
            if !c.touches_boundary && grid.on_boundary(i) {
                c.touches_boundary = true;
            }
            for a in 0..m {
                c.bbox_min[a] = c.bbox_min[a].min(idx[a]);
                c.bbox_max[a] = c.bbox_max[a].max(idx[a]);
            }
        }
        advance(&mut idx, &shape);
    }

    let mut pairs: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    let mut idx = vec![0usize; m];
    for i in 0..n {
        if in_mask[i] {
            for (a, d) in axes.iter().enumerate() {
                if let Some(j) = neighbor(i, &idx, d, &shape, &strides) {
                    if in_mask[j] && signs[j] != signs[i] {
                        let key = if signs[i] == Sign::Positive {
                            (labels[i], labels[j])
                        } else {
                            (labels[j], labels[i])
                        };
                        pairs.entry(key).or_insert(i * m + a);
                    }
                }
            }
        }
        advance(&mut idx, &shape);
    }
    let adjacency = pairs
        .into_iter()
        .map(|((positive, negative), edge)| Adjacency {
            positive,
            negative,
            edge,
        })
        .collect();

    Ok(NodalDecomposition {
        dim: m,
        shape,
        spacing: grid.spacing(),
        labels,
        components,
        adjacency,
    })
}

fn neighbor(i: usize, idx: &[usize], d: &[i64], shape: &[usize], strides: &[usize]) -> Option<usize> {
    let mut j = i as i64;
    for a in 0..idx.len() {
        let k = idx[a] as i64 + d[a];
        if k < 0 || k >= shape[a] as i64 {
            return None;
        }
        j += d[a] * strides[a] as i64;
    }
    Some(j as usize)
}

/// Row-major increment of a multi-index (last axis fastest).
pub(crate) fn advance(idx: &mut [usize], shape: &[usize]) {
    for a in (0..idx.len()).rev() {
        idx[a] += 1;
        if idx[a] < shape[a] {
            return;
        }
        idx[a] = 0;
    }
}
