//! Triangulated view of a polygon gluing, used by tracing and development.

use crate::geometry::{in_triangle, orient, Vec2};

/// Triangle of the derived triangulation, counter-clockwise in its cell chart.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub cell: usize,
    /// Polygon vertex indices of the corners within `cell`.
    pub corner_index: [usize; 3],
    pub v: [Vec2; 3],
    /// Vertex class of each corner.
    pub class: [usize; 3],
    /// Neighbour across edge `j` (from `v[j]` to `v[j+1]`): triangle, its edge, and whether
    /// the gluing is a half-turn.
    pub nbr: [(usize, u8, bool); 3],
}

impl Triangle {
    #[inline]
    pub fn edge(&self, j: usize) -> Vec2 {
        self.v[(j + 1) % 3] - self.v[j]
    }
}

/// One corner in the cyclic order around a vertex; `sign` relates its chart to the
/// chart of the first corner in the cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Corner {
    pub tri: usize,
    pub corner: u8,
    pub sign: i8,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub tris: Vec<Triangle>,
    /// Corners around each vertex class, counter-clockwise.
    pub corners: Vec<Vec<Corner>>,
    /// Canonical undirected edge id of every `(tri, edge)` slot.
    pub edge_id: Vec<[usize; 3]>,
    /// For each undirected edge: its two sides; `sides[e][0]` is the key side.
    pub sides: Vec<[(usize, u8); 2]>,
}

impl Mesh {
    /// Parameter along edge `e` measured on the key side, given a parameter on side `(t, j)`.
    #[inline]
    pub fn is_key_side(&self, t: usize, j: usize) -> bool {
        let e = self.edge_id[t][j];
        self.sides[e][0] == (t, j as u8)
    }

    pub fn num_edges(&self) -> usize {
        self.sides.len()
    }
}

/// Ear-clipping triangulation of a simple counter-clockwise polygon. Straight-angle
/// vertices are allowed; they are never clipped as ears.
pub fn triangulate_polygon(pts: &[Vec2]) -> Result<Vec<[usize; 3]>, String> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut out = Vec::with_capacity(pts.len().saturating_sub(2));
    while idx.len() > 3 {
        let n = idx.len();
        let mut clipped = false;
        for i in 0..n {
            let (a, b, c) = (idx[(i + n - 1) % n], idx[i], idx[(i + 1) % n]);
            if orient(&pts[a], &pts[b], &pts[c]) <= 0 {
                continue;
            }
            let blocked = idx
                .iter()
                .filter(|&&k| k != a && k != b && k != c)
                .any(|&k| in_triangle(&pts[k], &pts[a], &pts[b], &pts[c]));
            if blocked {
                continue;
            }
            out.push([a, b, c]);
            idx.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            return Err("no ear found; polygon is not simple".into());
        }
    }
    if orient(&pts[idx[0]], &pts[idx[1]], &pts[idx[2]]) <= 0 {
        return Err("final triangle is degenerate".into());
    }
    out.push([idx[0], idx[1], idx[2]]);
    Ok(out)
}

/// Builds the mesh from triangulated cells. `partner[c][k]` gives the glued edge of
/// polygon edge `k` of cell `c` and whether the gluing is a half-turn; `class[c][k]` is
/// the vertex class of polygon corner `k`.
pub fn build_mesh(
    cells: &[Vec<Vec2>],
    cell_tris: &[Vec<[usize; 3]>],
    partner: &[Vec<(usize, usize, bool)>],
    class: &[Vec<usize>],
    num_classes: usize,
) -> Mesh {
    let mut tris = Vec::new();
    // polygon edge -> (triangle, local edge)
    let mut poly_edge_slot: Vec<Vec<(usize, u8)>> =
        cells.iter().map(|c| vec![(usize::MAX, 0); c.len()]).collect();
    for (c, tl) in cell_tris.iter().enumerate() {
        let n = cells[c].len();
        let first = tris.len();
        for t in tl {
            tris.push(Triangle {
                cell: c,
                corner_index: *t,
                v: [cells[c][t[0]], cells[c][t[1]], cells[c][t[2]]],
                class: [class[c][t[0]], class[c][t[1]], class[c][t[2]]],
                nbr: [(usize::MAX, 0, false); 3],
            });
        }
        // diagonals inside the cell, and polygon edges
        for ti in first..tris.len() {
            for j in 0..3 {
                let (a, b) = (tris[ti].corner_index[j], tris[ti].corner_index[(j + 1) % 3]);
                if (a + 1) % n == b {
                    poly_edge_slot[c][a] = (ti, j as u8);
                    continue;
                }
                for tj in first..tris.len() {
                    if tj == ti {
                        continue;
                    }
                    for m in 0..3 {
                        let (p, q) =
                            (tris[tj].corner_index[m], tris[tj].corner_index[(m + 1) % 3]);
                        if p == b && q == a {
                            tris[ti].nbr[j] = (tj, m as u8, false);
                        }
                    }
                }
            }
        }
    }
    for c in 0..cells.len() {
        for k in 0..cells[c].len() {
            let (ti, j) = poly_edge_slot[c][k];
            let (pc, pk, rot) = partner[c][k];
            let (tj, m) = poly_edge_slot[pc][pk];
            tris[ti].nbr[j as usize] = (tj, m, rot);
        }
    }

    let mut edge_id = vec![[usize::MAX; 3]; tris.len()];
    let mut sides = Vec::new();
    for t in 0..tris.len() {
        for j in 0..3 {
            if edge_id[t][j] != usize::MAX {
                continue;
            }
            let (u, m, _) = tris[t].nbr[j];
            let e = sides.len();
            sides.push([(t, j as u8), (u, m)]);
            edge_id[t][j] = e;
            edge_id[u][m as usize] = e;
        }
    }

    let mut corners = vec![Vec::new(); num_classes];
    let mut seen = vec![[false; 3]; tris.len()];
    for t in 0..tris.len() {
        for c in 0..3 {
            if seen[t][c] {
                continue;
            }
            let cls = tris[t].class[c];
            let mut cyc = Vec::new();
            let (mut ct, mut cc, mut sign) = (t, c, 1i8);
            loop {
                seen[ct][cc] = true;
                cyc.push(Corner { tri: ct, corner: cc as u8, sign });
                // rotate counter-clockwise: cross the edge ending at this corner
                let (nt, nj, rot) = tris[ct].nbr[(cc + 2) % 3];
                ct = nt;
                cc = nj as usize;
                if rot {
                    sign = -sign;
                }
                if ct == t && cc == c {
                    break;
                }
            }
            corners[cls] = cyc;
        }
    }

    Mesh { tris, corners, edge_id, sides }
}
