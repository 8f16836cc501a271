//! Conversion of bead arrays to lozenge tilings.
//!
//! Lattice points are `(u, v)` in the basis `e1 = (1, 0)`,
//! `e2 = (cos 120°, sin 120°)`. Between heights `k` and `k + 1` the unit
//! triangles are `D_j` with vertices `(j,k), (j,k+1), (j+1,k+1)` and `U_j`
//! with vertices `(j,k), (j+1,k), (j+1,k+1)`, ordered left to right as
//! `D_lo, U_lo, D_lo+1, ..., U_hi, D_hi+1`.
//!
//! A bead at `u` on thread `k` is the vertical lozenge `D_u` (strip `k-1`)
//! over `U_u` (strip `k`). The triangles left in each strip pair up with
//! their neighbours into left-leaning `(D_j, U_j)` and right-leaning
//! `(U_j, D_j+1)` lozenges.

use serde::{Deserialize, Serialize};

use super::BeadArray;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TileKind {
    LeftLeaning,
    RightLeaning,
    Vertical,
}

/// A lozenge anchored at lattice point `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tile {
    #[serde(rename = "type")]
    pub kind: TileKind,
    pub u: i64,
    pub v: i64,
}

/// Unit triangle `D_j` (`up = false`) or `U_j` (`up = true`) in strip `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangle {
    pub up: bool,
    pub j: i64,
    pub k: i64,
}

impl Tile {
    /// Corners in lattice coordinates, counterclockwise.
    pub fn vertices(&self) -> [(i64, i64); 4] {
        let (u, v) = (self.u, self.v);
        match self.kind {
            TileKind::LeftLeaning => [(u, v), (u + 1, v), (u + 1, v + 1), (u, v + 1)],
            TileKind::RightLeaning => [(u, v), (u + 1, v), (u + 2, v + 1), (u + 1, v + 1)],
            TileKind::Vertical => [(u, v), (u + 1, v + 1), (u + 1, v + 2), (u, v + 1)],
        }
    }

    /// The two unit triangles covered by the tile.
    pub fn triangles(&self) -> [Triangle; 2] {
        let (u, v) = (self.u, self.v);
        match self.kind {
            TileKind::LeftLeaning => [Triangle { up: false, j: u, k: v }, Triangle { up: true, j: u, k: v }],
            TileKind::RightLeaning => [Triangle { up: true, j: u, k: v }, Triangle { up: false, j: u + 1, k: v }],
            TileKind::Vertical => [Triangle { up: false, j: u, k: v }, Triangle { up: true, j: u, k: v + 1 }],
        }
    }
}

/// Horizontal extent `(lo, hi)`: strips hold `U_lo..=U_hi` and `D_lo..=D_hi+1`.
pub fn window(p: &BeadArray) -> (i64, i64) {
    let top = p.top();
    (top[top.len() - 1] - 1, top[0] + 1)
}

/// Every unit triangle of the domain: all strips `0..N` over the window,
/// plus the `N` notches `U_b` at height `N`.
pub fn domain_triangles(p: &BeadArray) -> Vec<Triangle> {
    let (lo, hi) = window(p);
    let n = p.n() as i64;
    let mut out = Vec::new();
    for k in 0..n {
        for j in lo..=hi {
            out.push(Triangle { up: false, j, k });
            out.push(Triangle { up: true, j, k });
        }
        out.push(Triangle { up: false, j: hi + 1, k });
    }
    out.extend(p.top().iter().map(|&b| Triangle { up: true, j: b, k: n }));
    out
}

/// The tiling encoded by `p`: `k` vertical tiles on thread `k`, and a forced
/// left/right fill of each strip.
pub fn pattern_to_lozenges(p: &BeadArray) -> Vec<Tile> {
    let (lo, hi) = window(p);
    let n = p.n();
    let mut tiles = Vec::new();
    for k in 1..=n {
        for &u in p.row(k) {
            tiles.push(Tile {
                kind: TileKind::Vertical,
                u,
                v: k as i64 - 1,
            });
        }
    }
    for k in 0..n {
        let below: &[i64] = if k == 0 { &[] } else { p.row(k) };
        let above = p.row(k + 1);
        let mut free = Vec::new();
        for j in lo..=hi + 1 {
            if !above.contains(&j) {
                free.push(Triangle { up: false, j, k: k as i64 });
            }
            if j <= hi && !below.contains(&j) {
                free.push(Triangle { up: true, j, k: k as i64 });
            }
        }
        for pair in free.chunks(2) {
            let (a, b) = (pair[0], pair[1]);
            let tile = match (a.up, b.up) {
                (false, true) if a.j == b.j => TileKind::LeftLeaning,
                (true, false) if b.j == a.j + 1 => TileKind::RightLeaning,
                _ => unreachable!("interlacing leaves an unpairable strip at height {k}"),
            };
            tiles.push(Tile {
                kind: tile,
                u: a.j,
                v: k as i64,
            });
        }
    }
    tiles
}

/// Cartesian image of lattice point `(u, v)`.
pub fn to_cartesian(u: f64, v: f64) -> (f64, f64) {
    (u - 0.5 * v, v * 3f64.sqrt() / 2.0)
}
