//! Saddle connections by developing the triangulation inside wedges.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::Vec2;
use crate::mesh::Mesh;
use crate::scalar::Scalar;
use crate::surface::FlatSurface;
use crate::trace::{Segment, Start, Tracer};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SaddleConnection {
    /// Holonomy with the sign fixed by [`Vec2::canonical_sign`].
    pub holonomy: Vec2,
    pub length2: Scalar,
    pub start: usize,
    pub end: usize,
    /// Triangle and corner the connection leaves from, and its direction in that chart.
    pub start_corner: (usize, u8),
    pub start_dir: Vec2,
}

impl SaddleConnection {
    /// The straight segments inside each triangle, in order.
    pub fn developed_path(&self, surface: &FlatSurface) -> Vec<Segment> {
        let pass = vec![false; surface.num_vertices()];
        let tracer = Tracer { mesh: surface.mesh(), pass: &pass };
        let mut out = Vec::new();
        let start = Start::Corner {
            tri: self.start_corner.0,
            corner: self.start_corner.1 as usize,
            dir: self.start_dir,
        };
        tracer.run(start, &(self.length2 + Scalar::one()), &mut |seg| out.push(seg.clone()));
        out
    }

    fn sort_key(&self) -> (Scalar, (u8, Scalar), usize, usize, (usize, u8), (u8, Scalar)) {
        (
            self.length2,
            self.holonomy.direction_key(),
            self.start.min(self.end),
            self.start.max(self.end),
            self.start_corner,
            self.start_dir.direction_key(),
        )
    }
}

pub(crate) fn canonical_order(a: &SaddleConnection, b: &SaddleConnection) -> Ordering {
    a.sort_key().cmp(&b.sort_key())
}

/// Position of a direction inside a corner: `cross(e1,d) / cross(d,e2)`, in `(0, ∞)`.
fn germ(mesh: &Mesh, tri: usize, corner: usize, d: &Vec2) -> (usize, usize, Scalar) {
    let t = &mesh.tris[tri];
    let e1 = t.edge(corner);
    let e2 = t.v[(corner + 2) % 3] - t.v[corner];
    (tri, corner, e1.cross(d) / d.cross(&e2))
}

/// Whether the segment `xy` meets the closed disk of squared radius `b2` about the origin.
fn segment_meets_disk(x: &Vec2, y: &Vec2, b2: &Scalar) -> bool {
    if x.norm2() <= *b2 || y.norm2() <= *b2 {
        return true;
    }
    let w = *y - *x;
    let p = x.dot(&w);
    let ww = w.norm2();
    if p.signum() >= 0 || (p + ww).signum() <= 0 {
        return false;
    }
    let c = x.cross(&w);
    c * c <= *b2 * ww
}

struct Frame {
    tri: usize,
    edge: usize,
    x: Vec2,
    y: Vec2,
    sign: i8,
    r: Vec2,
    l: Vec2,
}

fn develop_corner(mesh: &Mesh, tri: usize, corner: usize, b2: &Scalar, out: &mut Vec<SaddleConnection>) {
    let t0 = &mesh.tris[tri];
    let start_class = t0.class[corner];
    let e1 = t0.edge(corner);
    let e2 = t0.v[(corner + 2) % 3] - t0.v[corner];
    let mut stack = Vec::new();
    let push = |stack: &mut Vec<Frame>, t: usize, k: usize, x: Vec2, y: Vec2, sign: i8, r: Vec2, l: Vec2| {
        if !segment_meets_disk(&x, &y, b2) {
            return;
        }
        let (u, m, rot) = mesh.tris[t].nbr[k];
        let sign = if rot { -sign } else { sign };
        stack.push(Frame { tri: u, edge: m as usize, x, y, sign, r, l });
    };
    push(&mut stack, tri, (corner + 1) % 3, e1, e2, 1, e1, e2);
    while let Some(f) = stack.pop() {
        let t = &mesh.tris[f.tri];
        let m = f.edge;
        let s = Scalar::int(f.sign as i128);
        let c = f.x + (t.v[(m + 2) % 3] - t.v[(m + 1) % 3]).scale(s);
        let right_of_l = c.cross(&f.l).signum() > 0;
        let left_of_r = f.r.cross(&c).signum() > 0;
        if left_of_r && right_of_l {
            if c.norm2() <= *b2 {
                let start = germ(mesh, tri, corner, &c);
                let end = germ(mesh, f.tri, (m + 2) % 3, &(-c).scale(s));
                if start < end {
                    out.push(SaddleConnection {
                        holonomy: c.canonical_sign(),
                        length2: c.norm2(),
                        start: start_class,
                        end: t.class[(m + 2) % 3],
                        start_corner: (tri, corner as u8),
                        start_dir: c,
                    });
                }
            }
            push(&mut stack, f.tri, (m + 1) % 3, f.x, c, f.sign, f.r, c);
            push(&mut stack, f.tri, (m + 2) % 3, c, f.y, f.sign, c, f.l);
        } else if !left_of_r {
            push(&mut stack, f.tri, (m + 2) % 3, c, f.y, f.sign, f.r, f.l);
        } else {
            push(&mut stack, f.tri, (m + 1) % 3, f.x, c, f.sign, f.r, f.l);
        }
    }
}

/// All saddle connections with squared length at most `bound2`, each once up to
/// orientation, in canonical order (squared length, direction, endpoints, start germ).
///
/// Every vertex of the triangulation is an endpoint, including regular vertices.
pub fn saddle_connections_sq(surface: &FlatSurface, bound2: &Scalar) -> Vec<SaddleConnection> {
    let mesh = surface.mesh();
    let corners: Vec<(usize, usize)> =
        (0..mesh.tris.len()).flat_map(|t| (0..3).map(move |c| (t, c))).collect();
    let mut out: Vec<SaddleConnection> = corners
        .par_iter()
        .flat_map_iter(|&(t, c)| {
            let mut v = Vec::new();
            develop_corner(mesh, t, c, bound2, &mut v);
            v
        })
        .collect();
    for &[(t, j), _] in &mesh.sides {
        let tri = &mesh.tris[t];
        let j = j as usize;
        let w = tri.edge(j);
        if w.norm2() <= *bound2 {
            out.push(SaddleConnection {
                holonomy: w.canonical_sign(),
                length2: w.norm2(),
                start: tri.class[j],
                end: tri.class[(j + 1) % 3],
                start_corner: (t, j as u8),
                start_dir: w,
            });
        }
    }
    out.par_sort_unstable_by(canonical_order);
    out
}

/// Saddle connections of length at most `bound`.
pub fn saddle_connections(surface: &FlatSurface, bound: &Scalar) -> Vec<SaddleConnection> {
    saddle_connections_sq(surface, &(*bound * *bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates;

    #[test]
    fn torus_bound_two() {
        let t = templates::torus();
        let sc = saddle_connections(&t, &Scalar::int(2));
        let dirs: Vec<Vec2> = sc.iter().map(|s| s.holonomy).collect();
        assert_eq!(dirs, vec![Vec2::int(1, 0), Vec2::int(0, 1), Vec2::int(1, -1), Vec2::int(1, 1)]);
    }

    #[test]
    fn developed_path_sums_to_holonomy() {
        let s = templates::q_template(1).unwrap();
        for sc in saddle_connections(&s, &Scalar::int(6)) {
            let path = sc.developed_path(&s);
            let total = path.iter().fold(Vec2::zero(), |acc, seg| {
                let d = seg.to - seg.from;
                // pieces are in their own charts; align each with the start direction
                if d.dot(&sc.start_dir).signum() > 0 { acc + d } else { acc - d }
            });
            assert_eq!(total, sc.start_dir);
            assert!(path.last().unwrap().crossing.is_none());
        }
    }
}
