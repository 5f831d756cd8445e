//! ASCII and SVG drawings of a layout file.

use std::collections::BTreeMap;
use std::fmt::Write;

use parity_forge_core::format::{GroupDoc, KindDoc, LayoutDoc};
use parity_forge_core::{Position, Shape};

fn label(term: &[u32]) -> String {
    let sep = if term.iter().all(|&q| q < 10) { "" } else { "." };
    term.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(sep)
}

fn qubit_labels(doc: &LayoutDoc) -> BTreeMap<Position, String> {
    doc.qubits
        .iter()
        .map(|q| {
            let text = match (q.kind, &q.term) {
                (KindDoc::Parity, Some(t)) => label(t),
                (KindDoc::Fixed, _) => "+".to_string(),
                _ => "·".to_string(),
            };
            (Position::new(q.col, q.row), text)
        })
        .collect()
}

fn glyph(shape: Option<Shape>) -> char {
    match shape {
        Some(Shape::Square) => '□',
        Some(Shape::TriMissingUL) => '◢',
        Some(Shape::TriMissingLR) => '◤',
        Some(Shape::TriMissingLL) => '◥',
        None => '?',
    }
}

fn centered(text: &str, width: usize) -> String {
    let len = text.chars().count();
    let left = (width.saturating_sub(len)) / 2;
    let right = width.saturating_sub(len + left);
    format!("{}{text}{}", " ".repeat(left), " ".repeat(right))
}

/// One text line per lattice row, top row first, with a line of plaquette
/// glyphs between neighbouring qubit rows.
pub fn ascii(doc: &LayoutDoc) -> String {
    let labels = qubit_labels(doc);
    let Some(max_row) = labels.keys().map(|p| p.row).max() else {
        return String::new();
    };
    let max_col = labels.keys().map(|p| p.col).max().unwrap_or(0);
    let width = labels.values().map(|l| l.chars().count()).max().unwrap_or(1).max(3);
    let cells: BTreeMap<Position, char> = doc
        .plaquettes
        .iter()
        .map(|p| (p.cell(), glyph(p.shape().ok())))
        .collect();
    let mut out = String::new();
    for row in (0..=max_row).rev() {
        if row < max_row {
            let mut line = String::new();
            for col in 0..max_col {
                line.push_str(&" ".repeat(width));
                let g = cells.get(&Position::new(col, row)).map(|c| c.to_string()).unwrap_or_default();
                line.push_str(&centered(&g, width));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        let mut line = String::new();
        for col in 0..=max_col {
            let text = labels.get(&Position::new(col, row)).map(String::as_str).unwrap_or("");
            line.push_str(&centered(text, width));
            if col < max_col {
                line.push_str(&" ".repeat(width));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

const PALETTE: [&str; 8] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
];
const FILLER: &str = "#d9d9d9";
const UNIT: i64 = 60;
const MARGIN: i64 = 30;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One polygon per plaquette, colored by group, and one labeled circle per
/// qubit.
pub fn svg(doc: &LayoutDoc) -> String {
    let max_row = doc.qubits.iter().map(|q| q.row).max().unwrap_or(0);
    let max_col = doc.qubits.iter().map(|q| q.col).max().unwrap_or(0);
    let x = |col: i64| MARGIN + col * UNIT;
    let y = |row: i64| MARGIN + (max_row - row) * UNIT;
    let (w, h) = (2 * MARGIN + max_col * UNIT, 2 * MARGIN + max_row * UNIT);
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    for p in &doc.plaquettes {
        let fill = match p.group {
            GroupDoc::Id(g) => PALETTE[g % PALETTE.len()],
            GroupDoc::Name(_) => FILLER,
        };
        let Ok(shape) = p.shape() else { continue };
        // Corners in drawing order around the cell.
        let cell = p.cell();
        let ring = [
            Position::new(cell.col, cell.row),
            Position::new(cell.col + 1, cell.row),
            Position::new(cell.col + 1, cell.row + 1),
            Position::new(cell.col, cell.row + 1),
        ];
        let present: Vec<Position> = shape.corner_positions(cell).collect();
        let points: Vec<String> = ring
            .iter()
            .filter(|c| present.contains(c))
            .map(|c| format!("{},{}", x(c.col), y(c.row)))
            .collect();
        writeln!(
            out,
            r##"  <polygon points="{}" fill="{fill}" stroke="#333333" stroke-width="1"/>"##,
            points.join(" ")
        )
        .unwrap();
    }
    for (pos, text) in qubit_labels(doc) {
        let (cx, cy) = (x(pos.col), y(pos.row));
        writeln!(out, r##"  <circle cx="{cx}" cy="{cy}" r="14" fill="white" stroke="#333333"/>"##).unwrap();
        writeln!(
            out,
            r#"  <text x="{cx}" y="{cy}" font-family="monospace" font-size="11" text-anchor="middle" dominant-baseline="central">{}</text>"#,
            escape(&text)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
