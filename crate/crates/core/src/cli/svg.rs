//! Self-contained SVG plots of planar zero sets.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::nodal::NodalGeometry;

/// Pixels per unit length.
pub const PX_PER_UNIT: f64 = 10.0;

/// Writes the segments of a planar zero set over the box `[lower, upper]`
/// in black, with red circles of the given radii centered at the origin.
pub fn write_zero_set_svg<W: Write>(
    geometry: &NodalGeometry,
    lower: [f64; 2],
    upper: [f64; 2],
    circles: &[f64],
    mut out: W,
) -> Result<()> {
    let width = (upper[0] - lower[0]) * PX_PER_UNIT;
    let height = (upper[1] - lower[1]) * PX_PER_UNIT;
    let px = |p: &[f64]| ((p[0] - lower[0]) * PX_PER_UNIT, (upper[1] - p[1]) * PX_PER_UNIT);
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    )?;
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    let mut d = String::new();
    for s in 0..geometry.simplex_count() {
        let ids = geometry.simplex(s);
        let (x0, y0) = px(geometry.point(ids[0] as usize));
        let (x1, y1) = px(geometry.point(ids[1] as usize));
        write!(d, "M{x0:.2} {y0:.2}L{x1:.2} {y1:.2}").expect("write to string");
    }
    writeln!(out, r#"<path d="{d}" stroke="black" stroke-width="1" fill="none"/>"#)?;
    let (cx, cy) = px(&[0.0, 0.0]);
    for r in circles {
        writeln!(
            out,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" stroke="red" stroke-width="1" fill="none"/>"#,
            r * PX_PER_UNIT
        )?;
    }
    writeln!(out, "</svg>")?;
    Ok(())
}
