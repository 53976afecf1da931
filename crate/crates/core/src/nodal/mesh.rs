use std::sync::OnceLock;

use super::label::Sign;
use super::union_find::UnionFind;
use crate::error::{Error, Result};
use crate::grid::ScalarGrid;

const NO_POINT: u32 = u32::MAX;

/// Segments on one square face, as pairs of face-edge indices. Corners are
/// given in cyclic order and face edge `k` joins corners `k` and `k + 1`.
/// When the signs alternate, each segment cuts off a negative corner.
pub(crate) fn face_segments(positive: [bool; 4]) -> Vec<(usize, usize)> {
    let crossing: Vec<usize> = (0..4).filter(|&k| positive[k] != positive[(k + 1) % 4]).collect();
    match crossing.len() {
        2 => vec![(crossing[0], crossing[1])],
        4 => (0..4)
            .filter(|&k| !positive[k])
            .map(|k| ((k + 3) % 4, k))
            .collect(),
        _ => Vec::new(),
    }
}

struct CubeTable {
    /// (corner, axis) of each of the 12 cube edges.
    edges: Vec<(usize, usize)>,
    /// Closed loops of crossed cube edges for each of the 256 sign patterns.
    loops: Vec<Vec<Vec<u8>>>,
}

fn cube_table() -> &'static CubeTable {
    static TABLE: OnceLock<CubeTable> = OnceLock::new();
    TABLE.get_or_init(build_cube_table)
}

fn build_cube_table() -> CubeTable {
    let mut edges = Vec::new();
    for c in 0..8 {
        for a in 0..3 {
            if c >> a & 1 == 0 {
                edges.push((c, a));
            }
        }
    }
    let edge_index = |p: usize, q: usize| -> usize {
        let (lo, hi) = (p.min(q), p.max(q));
        let axis = (hi ^ lo).trailing_zeros() as usize;
        edges.iter().position(|&e| e == (lo, axis)).expect("cube edge")
    };
    let mut faces: Vec<[usize; 4]> = Vec::new();
    for a in 0..3 {
        let (b, c) = match a {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for s in 0..2 {
            let corner = |x: usize, y: usize| s << a | x << b | y << c;
            faces.push([corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)]);
        }
    }
    let mut loops = Vec::with_capacity(256);
    for config in 0..256usize {
        let mut links: Vec<Vec<usize>> = vec![Vec::new(); 12];
        for face in &faces {
            let pos = face.map(|c| config >> c & 1 == 1);
            for (i, j) in face_segments(pos) {
                let ei = edge_index(face[i], face[(i + 1) % 4]);
                let ej = edge_index(face[j], face[(j + 1) % 4]);
                links[ei].push(ej);
                links[ej].push(ei);
            }
        }
        let mut seen = [false; 12];
        let mut config_loops = Vec::new();
        for start in 0..12 {
            if seen[start] || links[start].is_empty() {
                continue;
            }
            debug_assert_eq!(links[start].len(), 2);
            let mut lp = vec![start as u8];
            seen[start] = true;
            let (mut prev, mut cur) = (start, links[start][0]);
            while cur != start {
                seen[cur] = true;
                lp.push(cur as u8);
                let next = if links[cur][0] == prev { links[cur][1] } else { links[cur][0] };
                prev = cur;
                cur = next;
            }
            config_loops.push(lp);
        }
        loops.push(config_loops);
    }
    CubeTable { edges, loops }
}

/// One connected piece of the zero set.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroComponent {
    pub id: u32,
    /// Length (2D) or area (3D) inside the mask.
    pub measure: f64,
    pub point_count: usize,
    pub simplex_count: usize,
}

/// Piecewise-linear zero set: segments in 2D, triangles in 3D.
#[derive(Debug, Clone)]
pub struct NodalGeometry {
    dim: usize,
    points: Vec<f64>,
    point_edges: Vec<usize>,
    point_component: Vec<u32>,
    simplices: Vec<u32>,
    simplex_component: Vec<u32>,
    simplex_measure: Vec<f64>,
    simplex_inside: Vec<bool>,
    components: Vec<ZeroComponent>,
    total: f64,
}

impl NodalGeometry {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total length or area of the zero set inside the mask.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn components(&self) -> &[ZeroComponent] {
        &self.components
    }

    pub fn point_count(&self) -> usize {
        self.point_edges.len()
    }

    pub fn point(&self, p: usize) -> &[f64] {
        &self.points[p * self.dim..(p + 1) * self.dim]
    }

    /// Grid edge carrying the point, or `None` for fan centers.
    pub fn point_edge(&self, p: usize) -> Option<usize> {
        let e = self.point_edges[p];
        (e != usize::MAX).then_some(e)
    }

    pub fn point_component(&self, p: usize) -> u32 {
        self.point_component[p]
    }

    pub fn simplex_count(&self) -> usize {
        self.simplex_component.len()
    }

    /// Point indices of a segment (2D) or triangle (3D).
    pub fn simplex(&self, s: usize) -> &[u32] {
        &self.simplices[s * self.dim..(s + 1) * self.dim]
    }

    pub fn simplex_component(&self, s: usize) -> u32 {
        self.simplex_component[s]
    }

    pub fn simplex_measure(&self, s: usize) -> f64 {
        self.simplex_measure[s]
    }

    pub fn simplex_inside(&self, s: usize) -> bool {
        self.simplex_inside[s]
    }

    /// Measure of the pieces whose midpoint or centroid lies in B(center, radius).
    pub fn measure_in_ball(&self, center: &[f64], radius: f64) -> f64 {
        let m = self.dim;
        let r2 = radius * radius;
        let mut total = 0.0;
        for s in 0..self.simplex_count() {
            let mut d2 = 0.0;
            for a in 0..m {
                let c: f64 = self.simplex(s).iter().map(|&p| self.points[p as usize * m + a]).sum::<f64>() / m as f64;
                d2 += (c - center[a]).powi(2);
            }
            if d2 <= r2 {
                total += self.simplex_measure[s];
            }
        }
        total
    }
}

struct MeshBuilder<'a> {
    grid: &'a ScalarGrid,
    strides: Vec<usize>,
    edge_point: Vec<u32>,
    points: Vec<f64>,
    point_edges: Vec<usize>,
    simplices: Vec<u32>,
}

impl MeshBuilder<'_> {
    fn edge_point(&mut self, vertex: usize, axis: usize) -> u32 {
        let m = self.grid.dim();
        let e = vertex * m + axis;
        if self.edge_point[e] != NO_POINT {
            return self.edge_point[e];
        }
        let v = self.grid.values();
        let (a, b) = (v[vertex], v[vertex + self.strides[axis]]);
        let t = if a == b { 0.5 } else { (a / (a - b)).clamp(0.0, 1.0) };
        let mut p = self.grid.point(vertex);
        p[axis] += t * self.grid.spacing();
        let id = self.point_edges.len() as u32;
        self.points.extend_from_slice(&p);
        self.point_edges.push(e);
        self.edge_point[e] = id;
        id
    }

    fn centroid(&mut self, ids: &[u32]) -> u32 {
        let m = self.grid.dim();
        let mut c = vec![0.0; m];
        for &i in ids {
            for a in 0..m {
                c[a] += self.points[i as usize * m + a];
            }
        }
        for x in &mut c {
            *x /= ids.len() as f64;
        }
        let id = self.point_edges.len() as u32;
        self.points.extend_from_slice(&c);
        self.point_edges.push(usize::MAX);
        id
    }
}

/// Extracts the zero set by marching squares (2D) or marching cubes (3D)
/// with linear interpolation along grid edges.
///
/// Every box cell is meshed; only pieces whose midpoint or centroid lies in
/// the mask count towards the measures.
pub fn nodal_volume(grid: &ScalarGrid) -> Result<NodalGeometry> {
    let m = grid.dim();
    if !(2..=3).contains(&m) {
        return Err(Error::UnsupportedDimension(m));
    }
    let shape = grid.shape().to_vec();
    let strides = grid.strides();
    let positive: Vec<bool> = grid.values().iter().map(|&v| Sign::of(v) == Sign::Positive).collect();
    let mut b = MeshBuilder {
        grid,
        strides: strides.clone(),
        edge_point: vec![NO_POINT; grid.len() * m],
        points: Vec::new(),
        point_edges: Vec::new(),
        simplices: Vec::new(),
    };
    let cell_shape: Vec<usize> = shape.iter().map(|&n| n.saturating_sub(1)).collect();
    let cells: usize = cell_shape.iter().product();
    let mut idx = vec![0usize; m];
    let corner_offset = |c: usize| -> usize { (0..m).filter(|&a| c >> a & 1 == 1).map(|a| strides[a]).sum() };
    let offsets: Vec<usize> = (0..1usize << m).map(corner_offset).collect();

    for _ in 0..cells {
        let base: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
        let mut config = 0usize;
        for (c, off) in offsets.iter().enumerate() {
            if positive[base + off] {
                config |= 1 << c;
            }
        }
        if config != 0 && config != (1 << (1 << m)) - 1 {
            if m == 2 {
                // cyclic corners (0,0), (1,0), (1,1), (0,1) in (axis 0, axis 1)
                let ring = [0usize, 1, 3, 2];
                let pos = ring.map(|c| config >> c & 1 == 1);
                for (i, j) in face_segments(pos) {
                    let pi = square_edge_point(&mut b, base, &offsets, &ring, i);
                    let pj = square_edge_point(&mut b, base, &offsets, &ring, j);
                    b.simplices.extend_from_slice(&[pi, pj]);
                }
            } else {
                let table = cube_table();
                for lp in &table.loops[config] {
                    let ids: Vec<u32> = lp
                        .iter()
                        .map(|&e| {
                            let (corner, axis) = table.edges[e as usize];
                            b.edge_point(base + offsets[corner], axis)
                        })
                        .collect();
                    if ids.len() == 3 {
                        b.simplices.extend_from_slice(&ids);
                    } else {
                        let c = b.centroid(&ids);
                        for k in 0..ids.len() {
                            b.simplices.extend_from_slice(&[ids[k], ids[(k + 1) % ids.len()], c]);
                        }
                    }
                }
            }
        }
        super::label::advance(&mut idx, &cell_shape);
    }

    let MeshBuilder {
        points,
        point_edges,
        simplices,
        ..
    } = b;
    let n_points = point_edges.len();
    let n_simplices = simplices.len() / m;
    let mut uf = UnionFind::new(n_points);
    for s in simplices.chunks_exact(m) {
        for k in 1..m {
            uf.union(s[0], s[k]);
        }
    }
    let mut point_component = vec![NO_POINT; n_points];
    let mut root_id = vec![NO_POINT; n_points];
    let mut components: Vec<ZeroComponent> = Vec::new();
    for p in 0..n_points {
        let r = uf.find(p as u32) as usize;
        if root_id[r] == NO_POINT {
            root_id[r] = components.len() as u32;
            components.push(ZeroComponent {
                id: components.len() as u32,
                measure: 0.0,
                point_count: 0,
                simplex_count: 0,
            });
        }
        point_component[p] = root_id[r];
        components[root_id[r] as usize].point_count += 1;
    }

    let mask = grid.mask();
    let mut simplex_component = Vec::with_capacity(n_simplices);
    let mut simplex_measure = Vec::with_capacity(n_simplices);
    let mut simplex_inside = Vec::with_capacity(n_simplices);
    let mut total = 0.0;
    let pt = |i: u32| &points[i as usize * m..(i as usize + 1) * m];
    for s in simplices.chunks_exact(m) {
        let measure = if m == 2 {
            dist(pt(s[0]), pt(s[1]))
        } else {
            triangle_area(pt(s[0]), pt(s[1]), pt(s[2]))
        };
        let inside = match mask {
            None => true,
            Some(mask) => {
                let mut c = vec![0.0; m];
                for &i in s {
                    for a in 0..m {
                        c[a] += pt(i)[a] / m as f64;
                    }
                }
                dist(&c, &mask.center) <= mask.radius
            }
        };
        let comp = point_component[s[0] as usize];
        components[comp as usize].simplex_count += 1;
        if inside {
            components[comp as usize].measure += measure;
            total += measure;
        }
        simplex_component.push(comp);
        simplex_measure.push(measure);
        simplex_inside.push(inside);
    }

    Ok(NodalGeometry {
        dim: m,
        points,
        point_edges,
        point_component,
        simplices,
        simplex_component,
        simplex_measure,
        simplex_inside,
        components,
        total,
    })
}

fn square_edge_point(b: &mut MeshBuilder, base: usize, offsets: &[usize], ring: &[usize; 4], k: usize) -> u32 {
    let (p, q) = (ring[k], ring[(k + 1) % 4]);
    let (lo, hi) = (p.min(q), p.max(q));
    let axis = (hi ^ lo).trailing_zeros() as usize;
    b.edge_point(base + offsets[lo], axis)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn triangle_area(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let w = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    0.5 * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::grid::{sample_box, sample_on_grid};
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn ambiguous_face_cuts_off_negative_corners() {
        let segs = face_segments([true, false, true, false]);
        assert_eq!(segs, vec![(0, 1), (2, 3)]);
        let segs = face_segments([false, true, false, true]);
        assert_eq!(segs, vec![(3, 0), (1, 2)]);
        assert!(face_segments([true; 4]).is_empty());
    }

    #[test]
    fn cube_table_loops_are_closed_and_cover_crossings() {
        let t = cube_table();
        assert_eq!(t.edges.len(), 12);
        for config in 0..256usize {
            let crossed = t
                .edges
                .iter()
                .filter(|&&(c, a)| (config >> c & 1) != (config >> (c | 1 << a) & 1))
                .count();
            let covered: usize = t.loops[config].iter().map(|l| l.len()).sum();
            assert_eq!(crossed, covered, "config {config}");
            assert!(t.loops[config].iter().all(|l| l.len() >= 3));
        }
        // single positive corner: one triangle
        assert_eq!(t.loops[1].len(), 1);
        assert_eq!(t.loops[1][0].len(), 3);
        // complementary single negative corner: one triangle too
        assert_eq!(t.loops[254].len(), 1);
    }

    #[test]
    fn cosine_lines_on_unit_square() {
        let f = FnField::new(2, |x: &[f64]| SQRT_2 * (2.0 * PI * x[0]).cos());
        let g = sample_box(&f, &[0.0, 0.0], &[1.0, 1.0], 0.02).unwrap();
        let geo = nodal_volume(&g).unwrap();
        assert!((geo.total() - 2.0).abs() < 1e-6, "{}", geo.total());
        assert_eq!(geo.components().len(), 2);
    }

    #[test]
    fn circle_length() {
        let f = FnField::new(2, |x: &[f64]| x[0] * x[0] + x[1] * x[1] - 1.0);
        let g = sample_on_grid(&f, &[0.0, 0.0], 1.5, 0.01).unwrap();
        let geo = nodal_volume(&g).unwrap();
        assert!((geo.total() / (2.0 * PI) - 1.0).abs() < 0.005, "{}", geo.total());
        assert_eq!(geo.components().len(), 1);
    }

    #[test]
    fn sphere_area() {
        let f = FnField::new(3, |x: &[f64]| x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0);
        let g = sample_on_grid(&f, &[0.0; 3], 1.2, 0.02).unwrap();
        let geo = nodal_volume(&g).unwrap();
        assert!((geo.total() / (4.0 * PI) - 1.0).abs() < 0.01, "{}", geo.total());
        assert_eq!(geo.components().len(), 1);
    }

    #[test]
    fn parts_sum_to_total() {
        let f = FnField::new(2, |x: &[f64]| (3.0 * x[0]).sin() * (2.0 * x[1]).cos() + 0.1);
        let g = sample_on_grid(&f, &[0.0, 0.0], 3.0, 0.05).unwrap();
        let geo = nodal_volume(&g).unwrap();
        let sum: f64 = geo.components().iter().map(|c| c.measure).sum();
        assert!((sum - geo.total()).abs() < 1e-9);
        assert!(geo.components().iter().all(|c| c.measure >= 0.0));
    }
}
