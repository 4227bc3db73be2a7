use std::fmt::Write;

use super::{basic_components, enumerate_basic, GeometryError};
use crate::carpet::Carpet;

const PALETTE: [&str; 10] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
    "#bcbd22", "#7f7f7f",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOptions {
    /// Pixels per rank-1 grid cell along each axis.
    pub cell_px: u32,
    /// Draw the rank-1 `n x m` grid.
    pub show_grid: bool,
    /// Fill each connected component with its own colour.
    pub color_components: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            cell_px: 24,
            show_grid: true,
            color_components: false,
        }
    }
}

/// SVG 1.1 drawing of the rank-`k` approximation: one filled rectangle per
/// basic rectangle. Rank 0 gives only the unit-square outline.
pub fn render_svg(
    carpet: &Carpet,
    k: u64,
    options: &RenderOptions,
    budget: u64,
) -> Result<String, GeometryError> {
    let m = carpet.spec().m();
    let mk = (m as u128).checked_pow(k as u32);
    let nk = (carpet.spec().n() as u128).checked_pow(k as u32);
    let (Some(nk), Some(mk)) = (nk, mk) else {
        return Err(GeometryError::CoordinateOverflow { rank: k });
    };
    let mut rects = Vec::new();
    if k > 0 {
        if options.color_components {
            let (pieces, partition) = basic_components(carpet, k, budget)?;
            let labels = partition.labels();
            for (r, label) in pieces.iter().zip(labels) {
                let (x, y) = r.cell().ok_or(GeometryError::CoordinateOverflow { rank: k })?;
                rects.push((x, y, Some(label)));
            }
        } else {
            for r in enumerate_basic(carpet, k, budget)? {
                let (x, y) = r.cell().ok_or(GeometryError::CoordinateOverflow { rank: k })?;
                rects.push((x, y, None));
            }
        }
    }
    Ok(render_pieces(carpet, &rects, (nk, mk), k, options))
}

/// Draws cells `(x, y, component)` of a `cols x rows` grid over the unit
/// square.
pub fn render_pieces(
    carpet: &Carpet,
    cells: &[(u128, u128, Option<usize>)],
    (cols, rows): (u128, u128),
    rank: u64,
    options: &RenderOptions,
) -> String {
    let n = carpet.spec().n();
    let m = carpet.spec().m();
    let width = (n * options.cell_px) as f64;
    let height = (m * options.cell_px) as f64;
    let cw = width / cols as f64;
    let ch = height / rows as f64;

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = fmt_px(width),
        h = fmt_px(height)
    );
    let _ = writeln!(
        svg,
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\" stroke=\"none\"/>",
        fmt_px(width),
        fmt_px(height)
    );
    if !cells.is_empty() {
        let stroke = if rank == 1 {
            " stroke=\"black\" stroke-width=\"0.5\""
        } else {
            ""
        };
        let _ = writeln!(svg, "<g{stroke}>");
        for &(x, y, label) in cells {
            let fill = label.map_or("#c0392b", |l| PALETTE[l % PALETTE.len()]);
            // SVG y grows downwards; carpet rows grow upwards.
            let top = height - (y + 1) as f64 * ch;
            let _ = writeln!(
                svg,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"/>",
                fmt_px(x as f64 * cw),
                fmt_px(top),
                fmt_px(cw),
                fmt_px(ch)
            );
        }
        svg.push_str("</g>\n");
    }
    if options.show_grid && rank > 0 {
        let mut d = String::new();
        for i in 1..n {
            let x = fmt_px((i * options.cell_px) as f64);
            let _ = write!(d, "M{x} 0V{} ", fmt_px(height));
        }
        for j in 1..m {
            let y = fmt_px((j * options.cell_px) as f64);
            let _ = write!(d, "M0 {y}H{} ", fmt_px(width));
        }
        let _ = writeln!(
            svg,
            "<path d=\"{}\" fill=\"none\" stroke=\"#888888\" stroke-width=\"0.5\"/>",
            d.trim_end()
        );
    }
    let _ = writeln!(
        svg,
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>",
        fmt_px(width),
        fmt_px(height)
    );
    svg.push_str("</svg>\n");
    svg
}

fn fmt_px(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}
