//! SVG rendering of instances and colorings: one horizontal band per layer,
//! spheres drawn at their true in-layer positions, fills keyed by base color,
//! labels showing demand and received color count.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use cannonball::lattice::{self, GridVertex, StackingSequence};
use cannonball::multicolor::ColorAssignment;

use crate::files::{ColoringFile, InstanceFile};

/// Fills for base colors 0..=3.
const FILLS: [&str; 4] = ["#4e79a7", "#f28e2b", "#59a14d", "#e15759"];

const SCALE: f64 = 42.0;
const MARGIN: f64 = 30.0;
const BAND_GAP: f64 = 26.0;

struct Placed {
    vertex: GridVertex,
    x: f64,
    y: f64,
    base_color: u8,
    demand: u32,
    granted: usize,
}

/// Renders an instance (and optionally its coloring) to an SVG document.
/// Output is deterministic: vertices are drawn in canonical order.
pub fn render_svg(instance: &InstanceFile, coloring: Option<&ColoringFile>) -> String {
    let stacking = &instance.stacking;
    let assignment: Option<ColorAssignment> = coloring.map(|c| c.to_assignment());
    let mut memo = BTreeMap::new();

    // Cartesian in-layer position from the scaled integer coordinates:
    // p = (1, 0), q = (1/2, sqrt(3)/2), coordinates divided back by 3.
    let place = |v: GridVertex, s: &StackingSequence| -> (f64, f64) {
        let sp = lattice::scaled_position(v, s).expect("vertex layer inside stacking");
        let x = (sp.x as f64 + sp.y as f64 * 0.5) / 3.0;
        let y = (sp.y as f64 * 3f64.sqrt() / 2.0) / 3.0;
        (x, y)
    };

    let mut per_layer: BTreeMap<i32, Vec<Placed>> = BTreeMap::new();
    for &(v, d) in &instance.vertices {
        let (x, y) = place(v, stacking);
        let base_color = lattice::base_color_memo(v, stacking, &mut memo).unwrap_or(0);
        let granted = assignment
            .as_ref()
            .map_or(0, |f| f.colors(v).map_or(0, |s| s.len()));
        per_layer.entry(v.layer).or_default().push(Placed {
            vertex: v,
            x,
            y,
            base_color,
            demand: d,
            granted,
        });
    }

    // Common extents so every band shares one horizontal scale.
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (0.0f64, 1.0f64, 0.0f64, 1.0f64);
    for placed in per_layer.values().flatten() {
        min_x = min_x.min(placed.x);
        max_x = max_x.max(placed.x);
        min_y = min_y.min(placed.y);
        max_y = max_y.max(placed.y);
    }
    let band_w = (max_x - min_x + 1.0) * SCALE;
    let band_h = (max_y - min_y + 1.0) * SCALE;
    let bands = stacking.len();
    let total_w = band_w + 2.0 * MARGIN;
    let total_h = MARGIN + bands as f64 * (band_h + BAND_GAP) + MARGIN;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        total_w, total_h, total_w, total_h
    );
    let _ = writeln!(svg, r#"  <rect width="100%" height="100%" fill="white"/>"#);

    for layer in 0..bands as i32 {
        let band_top = MARGIN + layer as f64 * (band_h + BAND_GAP);
        let letter = stacking.letter(layer).map(|l| l.as_char()).unwrap_or('?');
        let _ = writeln!(
            svg,
            r#"  <g class="layer" data-layer="{layer}">"#
        );
        let _ = writeln!(
            svg,
            r##"    <text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" fill="#444">layer {layer} ({letter})</text>"##,
            MARGIN * 0.4,
            band_top - 6.0
        );
        let _ = writeln!(
            svg,
            r##"    <rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#ccc"/>"##,
            MARGIN * 0.75,
            band_top,
            band_w + MARGIN * 0.5,
            band_h
        );
        if let Some(placed) = per_layer.get(&layer) {
            for p in placed {
                let cx = MARGIN + (p.x - min_x + 0.5) * SCALE;
                // Flip y so larger v appears higher in the band.
                let cy = band_top + (max_y - p.y + 0.5) * SCALE;
                let fill = FILLS[p.base_color as usize % 4];
                let opacity = if p.demand == 0 { 0.25 } else { 1.0 };
                let _ = writeln!(
                    svg,
                    r##"    <circle cx="{cx:.1}" cy="{cy:.1}" r="{:.1}" fill="{fill}" fill-opacity="{opacity}" stroke="#333" stroke-width="0.8"><title>{} d={} got={}</title></circle>"##,
                    SCALE * 0.48,
                    p.vertex,
                    p.demand,
                    p.granted
                );
                let _ = writeln!(
                    svg,
                    r#"    <text x="{cx:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="10" fill="white">{}/{}</text>"#,
                    cy + 3.5,
                    p.demand,
                    p.granted
                );
            }
        }
        let _ = writeln!(svg, "  </g>");
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use cannonball::lattice::StackingSequence;

    #[test]
    fn empty_instance_yields_valid_scaffold() {
        let inst = InstanceFile::new(StackingSequence::parse("AB").unwrap(), vec![]);
        let svg = render_svg(&inst, None);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<g class=\"layer\"").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 0);
    }

    #[test]
    fn two_layer_instance_draws_every_window_vertex() {
        let mut vertices = Vec::new();
        for layer in 0..2 {
            for u in 0..3 {
                for v in 0..3 {
                    vertices.push((GridVertex::new(layer, u, v), (u + v) as u32));
                }
            }
        }
        let inst = InstanceFile::new(StackingSequence::parse("AB").unwrap(), vertices);
        let svg = render_svg(&inst, None);
        assert_eq!(svg.matches("<g class=\"layer\"").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 18);
    }

    #[test]
    fn layer_zero_checkerboard_uses_four_fills() {
        let mut vertices = Vec::new();
        for u in 0..4 {
            for v in 0..4 {
                vertices.push((GridVertex::new(0, u, v), 1));
            }
        }
        let inst = InstanceFile::new(StackingSequence::fcc(1), vertices);
        let svg = render_svg(&inst, None);
        for fill in FILLS {
            assert_eq!(
                svg.matches(fill).count(),
                4,
                "each base color covers a quarter of the 4x4 window"
            );
        }
    }

    #[test]
    fn deterministic_output() {
        let inst = InstanceFile::new(
            StackingSequence::fcc(2),
            vec![
                (GridVertex::new(0, 0, 0), 3),
                (GridVertex::new(1, 1, 1), 2),
            ],
        );
        assert_eq!(render_svg(&inst, None), render_svg(&inst, None));
    }
}
