//! Nodal decompositions: sign components, zero-set geometry, nesting trees
//! and topology classes of sampled fields.

mod label;
mod mesh;
mod topology;
mod tree;
mod union_find;

use std::io::Write;

pub use label::{label_domains, Adjacency, NodalDecomposition, Sign, SignComponent, UNLABELED, ZERO_TIE};
pub use mesh::{nodal_volume, NodalGeometry, ZeroComponent};
pub use topology::{classify_topology, TopologyClass, TopologySummary, ZeroRecord};
pub use tree::{build_nesting_tree, NestingTree, TreeRoot};

pub(crate) use label::advance as advance_index;

use crate::error::Result;
use crate::grid::ScalarGrid;

/// Everything extracted from one grid.
#[derive(Debug, Clone)]
pub struct NodalAnalysis {
    pub decomposition: NodalDecomposition,
    pub geometry: NodalGeometry,
    pub tree: NestingTree,
    pub topology: TopologySummary,
}

impl NodalAnalysis {
    /// Interior sign components whose descendant subtree has canonical code `code`.
    pub fn count_tree(&self, code: &str) -> usize {
        let interior: Vec<u32> = self
            .decomposition
            .components()
            .iter()
            .filter(|c| !c.touches_boundary)
            .map(|c| c.id)
            .collect();
        self.tree.count_matching(&interior, code)
    }
}

pub fn analyze(grid: &ScalarGrid) -> Result<NodalAnalysis> {
    let decomposition = label_domains(grid)?;
    let geometry = nodal_volume(grid)?;
    let tree = build_nesting_tree(&decomposition)?;
    let topology = classify_topology(&decomposition, &geometry)?;
    Ok(NodalAnalysis {
        decomposition,
        geometry,
        tree,
        topology,
    })
}

/// One row per sign component (`s<id>`) and per zero component (`z<id>`).
///
/// For sign components `measure` is the covered area or volume and `class`
/// the canonical code of the descendant subtree; for zero components they
/// are the length or area inside the mask and the topology class.
pub fn write_components_csv<W: Write>(analysis: &NodalAnalysis, out: W) -> Result<()> {
    let dec = &analysis.decomposition;
    let cell = dec.spacing().powi(dec.dim() as i32);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "sign", "size", "boundary", "measure", "class"])?;
    for c in dec.components() {
        let class = if c.touches_boundary {
            String::new()
        } else {
            analysis.tree.subtree_code(c.id).to_string()
        };
        w.write_record([
            format!("s{}", c.id),
            c.sign.symbol().to_string(),
            c.size.to_string(),
            c.touches_boundary.to_string(),
            format!("{:.12e}", c.size as f64 * cell),
            class,
        ])?;
    }
    for z in analysis.geometry.components() {
        let rec = analysis.topology.record(z.id);
        w.write_record([
            format!("z{}", z.id),
            "0".to_string(),
            z.point_count.to_string(),
            (!rec.interior).to_string(),
            format!("{:.12e}", z.measure),
            rec.class.map(|c| c.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
