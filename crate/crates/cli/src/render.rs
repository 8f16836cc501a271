use std::fmt::Write as _;

use lozenge_core::tilings::{pattern_to_lozenges, to_cartesian, BeadArray, Tile, TileKind};
use serde_json::{json, Value};

use crate::args::RenderArgs;
use crate::{read_pattern, write_json, write_output, CliResult, Outcome};

const SCALE: f64 = 24.0;

pub fn fill(kind: TileKind) -> &'static str {
    match kind {
        TileKind::LeftLeaning => "#e3a33b",
        TileKind::RightLeaning => "#3b7fc4",
        TileKind::Vertical => "#b8433a",
    }
}

pub fn class(kind: TileKind) -> &'static str {
    match kind {
        TileKind::LeftLeaning => "left-leaning",
        TileKind::RightLeaning => "right-leaning",
        TileKind::Vertical => "vertical",
    }
}

/// Corners of a tile in SVG user units (y grows downwards).
pub fn tile_polygon(t: &Tile) -> [(f64, f64); 4] {
    t.vertices().map(|(u, v)| {
        let (x, y) = to_cartesian(u as f64, v as f64);
        (x * SCALE, -y * SCALE)
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The tiling of `p` as an SVG document; `config` is embedded in `<desc>`.
pub fn svg(p: &BeadArray, config: &Value) -> String {
    let tiles = pattern_to_lozenges(p);
    let polygons: Vec<(TileKind, [(f64, f64); 4])> = tiles.iter().map(|t| (t.kind, tile_polygon(t))).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for (_, poly) in &polygons {
        for &(x, y) in poly {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
    }
    let pad = SCALE / 2.0;
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.3} {:.3} {w:.3} {h:.3}" width="{w:.0}" height="{h:.0}">"#,
        x0 - pad,
        y0 - pad
    );
    let _ = writeln!(out, "<desc>{}</desc>", escape(&config.to_string()));
    let _ = writeln!(out, r##"<g stroke="#222" stroke-width="0.8" stroke-linejoin="round">"##);
    for (kind, poly) in &polygons {
        let points: Vec<String> = poly.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
        let _ = writeln!(
            out,
            r#"<polygon class="{}" fill="{}" points="{}"/>"#,
            class(*kind),
            fill(*kind),
            points.join(" ")
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

pub fn run(args: &RenderArgs) -> CliResult<Outcome> {
    let p = read_pattern(&args.pattern)?;
    let config = json!({
        "command": "render",
        "version": env!("CARGO_PKG_VERSION"),
        "pattern": args.pattern,
        "N": p.n(),
        "units": "lattice basis (1, 0), (cos 120, sin 120); 24 px per unit",
    });
    write_output(args.out.as_deref(), svg(&p, &config).as_bytes())?;
    if let Some(path) = &args.tiles {
        let doc = json!({"config": config, "tiles": pattern_to_lozenges(&p)});
        write_json(Some(path), &doc)?;
    }
    Ok(Outcome::Pass)
}
