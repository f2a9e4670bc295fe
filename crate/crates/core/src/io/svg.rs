//! SVG rendering of a placed design.

use std::fmt::Write as _;

use crate::geom::Rect;
use crate::wsr::PlacedDesign;

const PALETTE: [&str; 6] = ["#d7301f", "#fc8d59", "#fdcc8a", "#b3cde3", "#8c96c6", "#88419d"];

/// Chip frame, room outlines, modules filled by voltage level and shifters
/// as dark squares. The y axis points up as in the floorplan.
pub fn render_svg(design: &PlacedDesign) -> String {
    let chip = design.chip;
    let margin = 2.0;
    let (w, h) = (chip.width() + 2.0 * margin, chip.height() + 2.0 * margin);
    let flip = |r: &Rect| (r.x0 - chip.x0 + margin, chip.y1 - r.y1 + margin, r.width(), r.height());
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let mut rect = |r: &Rect, style: &str| {
        let (x, y, rw, rh) = flip(r);
        let _ = writeln!(s, r#"  <rect x="{x}" y="{y}" width="{rw}" height="{rh}" {style}/>"#);
    };
    rect(&chip, r#"fill="white" stroke="black" stroke-width="0.6""#);
    for room in &design.rooms {
        rect(room, r##"fill="none" stroke="#999999" stroke-width="0.3" stroke-dasharray="1,1""##);
    }
    for (i, m) in design.modules.iter().enumerate() {
        let fill = PALETTE[(design.levels[i].max(1) - 1) % PALETTE.len()];
        rect(m, &format!(r#"fill="{fill}" stroke="black" stroke-width="0.3""#));
    }
    for l in &design.shifters {
        rect(&l.rect, r##"fill="#202020""##);
    }
    s.push_str("</svg>\n");
    s
}
