use super::{center, Board, Position, COLUMNS, ROWS};
use std::fmt::Write;

const SIZE: f64 = 20.0;
const MARGIN: f64 = 4.0;
const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Renders the board as a standalone SVG document, one `<polygon>` per tile.
///
/// Output is byte-identical for equal boards.
pub fn render_svg(board: &Board) -> String {
    let width = SIZE * (1.5 * (COLUMNS as f64 - 1.0) + 2.0) + 2.0 * MARGIN;
    let height = SIZE * SQRT_3 * (ROWS as f64 + 0.5) + 2.0 * MARGIN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
    );
    for (position, color) in board.tiles() {
        let (cx, cy) = pixel_center(position);
        let points: Vec<String> = (0..6)
            .map(|i| {
                let angle = std::f64::consts::PI / 3.0 * i as f64;
                format!("{:.2},{:.2}", cx + SIZE * angle.cos(), cy + SIZE * angle.sin())
            })
            .collect();
        let _ = writeln!(
            out,
            r##"  <polygon data-column="{}" data-row="{}" points="{}" fill="{}" stroke="#9e9e9e" stroke-width="1"/>"##,
            position.column(),
            position.row(),
            points.join(" "),
            color.hex_rgb()
        );
    }
    out.push_str("</svg>\n");
    out
}

fn pixel_center(position: Position) -> (f64, f64) {
    let (x, y) = center(position);
    (MARGIN + SIZE + SIZE * x, MARGIN + SIZE * SQRT_3 / 2.0 + SIZE * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hexboard::Color;

    #[test]
    fn deterministic_with_one_polygon_per_tile() {
        let blank = Board::new();
        let doc = render_svg(&blank);
        assert_eq!(doc, render_svg(&blank));
        assert_eq!(doc.matches("<polygon").count(), 180);
        let painted = blank.paint(Position::new(2, 2).unwrap(), Color::Red);
        assert_ne!(render_svg(&painted), doc);
        assert!(render_svg(&painted).contains(r##"data-column="2" data-row="2" points"##));
    }
}
