use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::label::{NodalDecomposition, Sign};
use super::mesh::NodalGeometry;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TopologyClass {
    /// Closed curve in the plane.
    Circle,
    /// Closed orientable surface of the given genus.
    Genus(u32),
}

impl fmt::Display for TopologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyClass::Circle => write!(f, "circle"),
            TopologyClass::Genus(g) => write!(f, "genus-{g}"),
        }
    }
}

/// A zero-set component with the sign components on either side.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroRecord {
    pub zero: u32,
    pub positive: Option<u32>,
    pub negative: Option<u32>,
    /// Lies inside the mask and bounds an interior sign component.
    pub interior: bool,
    pub class: Option<TopologyClass>,
    pub euler_characteristic: Option<i64>,
}

#[derive(Debug, Clone)]
pub struct TopologySummary {
    records: Vec<ZeroRecord>,
    histogram: BTreeMap<TopologyClass, usize>,
}

impl TopologySummary {
    pub fn records(&self) -> &[ZeroRecord] {
        &self.records
    }

    pub fn record(&self, zero: u32) -> &ZeroRecord {
        &self.records[zero as usize]
    }

    /// Class counts over interior zero components.
    pub fn histogram(&self) -> &BTreeMap<TopologyClass, usize> {
        &self.histogram
    }

    pub fn interior_count(&self) -> usize {
        self.records.iter().filter(|r| r.interior).count()
    }

    /// Interior zero components whose class is in `classes`.
    pub fn count(&self, classes: &[TopologyClass]) -> usize {
        classes.iter().filter_map(|c| self.histogram.get(c)).sum()
    }
}

/// Classifies each interior zero component: a circle in 2D, a genus from
/// the Euler characteristic of its mesh in 3D.
pub fn classify_topology(dec: &NodalDecomposition, geom: &NodalGeometry) -> Result<TopologySummary> {
    let m = dec.dim();
    if geom.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: geom.dim(),
        });
    }
    let nz = geom.components().len();
    let mut masked = vec![true; nz];
    let mut pairs: Vec<BTreeSet<(u32, u32)>> = vec![BTreeSet::new(); nz];
    for p in 0..geom.point_count() {
        let Some(edge) = geom.point_edge(p) else { continue };
        let z = geom.point_component(p) as usize;
        match dec.edge_labels(edge) {
            None => masked[z] = false,
            Some((a, b)) => {
                let pair = if dec.component(a).sign == Sign::Positive { (a, b) } else { (b, a) };
                pairs[z].insert(pair);
            }
        }
    }

    let mut records = Vec::with_capacity(nz);
    for z in 0..nz {
        let mut rec = ZeroRecord {
            zero: z as u32,
            positive: None,
            negative: None,
            interior: false,
            class: None,
            euler_characteristic: None,
        };
        if pairs[z].len() == 1 {
            let &(p, n) = pairs[z].iter().next().expect("one pair");
            rec.positive = Some(p);
            rec.negative = Some(n);
        }
        let bounds_interior = pairs[z]
            .iter()
            .any(|&(p, n)| !dec.component(p).touches_boundary || !dec.component(n).touches_boundary);
        if masked[z] && bounds_interior {
            if pairs[z].len() != 1 {
                return Err(Error::DegenerateSample(format!(
                    "zero component {z} separates {} component pairs",
                    pairs[z].len()
                )));
            }
            rec.interior = true;
        }
        records.push(rec);
    }

    let mut simplices: Vec<Vec<usize>> = vec![Vec::new(); nz];
    for s in 0..geom.simplex_count() {
        let z = geom.simplex_component(s) as usize;
        if records[z].interior {
            simplices[z].push(s);
        }
    }
    let mut histogram = BTreeMap::new();
    for z in 0..nz {
        if !records[z].interior {
            continue;
        }
        let (class, chi) = if m == 2 {
            (closed_curve(geom, z, &simplices[z])?, 0)
        } else {
            let chi = euler_characteristic(geom, z, &simplices[z])?;
            if chi % 2 != 0 || chi > 2 {
                return Err(Error::DegenerateSample(format!(
                    "zero component {z} has Euler characteristic {chi}"
                )));
            }
            (TopologyClass::Genus(((2 - chi) / 2) as u32), chi)
        };
        records[z].class = Some(class);
        records[z].euler_characteristic = Some(chi);
        *histogram.entry(class).or_insert(0) += 1;
    }
    Ok(TopologySummary { records, histogram })
}

fn closed_curve(geom: &NodalGeometry, z: usize, simplices: &[usize]) -> Result<TopologyClass> {
    let mut degree: HashMap<u32, u32> = HashMap::new();
    for &s in simplices {
        for &p in geom.simplex(s) {
            *degree.entry(p).or_insert(0) += 1;
        }
    }
    if degree.values().any(|&d| d != 2) {
        return Err(Error::DegenerateSample(format!("zero component {z} is not a closed curve")));
    }
    Ok(TopologyClass::Circle)
}

/// χ = V − E + F, requiring every edge to bound exactly two triangles.
fn euler_characteristic(geom: &NodalGeometry, z: usize, simplices: &[usize]) -> Result<i64> {
    let mut edges: HashMap<(u32, u32), u32> = HashMap::new();
    let mut vertices: BTreeSet<u32> = BTreeSet::new();
    for &s in simplices {
        let t = geom.simplex(s);
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            vertices.insert(a);
        }
    }
    if edges.values().any(|&c| c != 2) {
        return Err(Error::DegenerateSample(format!("zero component {z} mesh is not a closed manifold")));
    }
    Ok(vertices.len() as i64 - edges.len() as i64 + simplices.len() as i64)
}
