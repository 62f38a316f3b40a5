//! Straight-line flow on the triangulation.

use crate::geometry::Vec2;
use crate::mesh::Mesh;
use crate::scalar::Scalar;

/// Whether direction `d` lies in the half-open sector `[e1, e2)` of a corner narrower than π.
#[inline]
pub fn in_sector(e1: &Vec2, e2: &Vec2, d: &Vec2) -> bool {
    let c1 = e1.cross(d).signum();
    (c1 == 0 && e1.dot(d).signum() > 0) || (c1 > 0 && d.cross(e2).signum() > 0)
}

#[derive(Clone, Debug)]
pub enum Start {
    /// Leave the vertex at corner `corner` of `tri` in direction `dir` (triangle chart).
    Corner { tri: usize, corner: usize, dir: Vec2 },
    /// Enter `tri` through its edge `edge` at local parameter `u`.
    Edge { tri: usize, edge: usize, u: Scalar, dir: Vec2 },
}

/// A piece of the trajectory inside one triangle.
#[derive(Clone, Debug)]
pub struct Segment {
    pub tri: usize,
    pub from: Vec2,
    pub to: Vec2,
    /// Undirected edge crossed at `to` and its key-side parameter, or `None` at a vertex.
    pub crossing: Option<(usize, Scalar)>,
    /// Flow time at `to`, in units of `|dir|`.
    pub s: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum End {
    /// Stopped at a vertex where flow does not continue.
    Vertex { class: usize, tri: usize, corner: usize, s: Scalar },
    /// Exceeded the length budget.
    Budget,
}

pub struct Tracer<'a> {
    pub mesh: &'a Mesh,
    /// Per vertex class: whether the flow passes straight through.
    pub pass: &'a [bool],
}

impl<'a> Tracer<'a> {
    /// Follows the leaf from `start` until it reaches a stopping vertex or its length
    /// exceeds `sqrt(budget2)`. Every piece is handed to `sink`.
    pub fn run(&self, start: Start, budget2: &Scalar, sink: &mut impl FnMut(&Segment)) -> End {
        let mesh = self.mesh;
        let (mut tri, mut pos, mut dir, mut entered): (usize, Vec2, Vec2, Option<usize>);
        let mut corner_start: Option<usize>;
        match start {
            Start::Corner { tri: t, corner, dir: d } => {
                tri = t;
                pos = mesh.tris[t].v[corner];
                dir = d;
                entered = None;
                corner_start = Some(corner);
            }
            Start::Edge { tri: t, edge, u, dir: d } => {
                let tr = &mesh.tris[t];
                tri = t;
                pos = tr.v[edge] + tr.edge(edge).scale(u);
                dir = d;
                entered = Some(edge);
                corner_start = None;
            }
        }
        let d2 = dir.norm2();
        let over = |s: &Scalar| (*s * *s * d2) > *budget2;
        let mut s = Scalar::zero();
        loop {
            let t = &mesh.tris[tri];
            // where the leaf leaves this triangle: through an edge or a vertex
            let (exit_edge, hit_vertex) = match (corner_start, entered) {
                (Some(c), _) => {
                    let e1 = t.edge(c);
                    if e1.cross(&dir).signum() == 0 {
                        (None, Some((c + 1) % 3))
                    } else {
                        (Some((c + 1) % 3), None)
                    }
                }
                (None, Some(j)) => {
                    let o = t.v[(j + 2) % 3];
                    match dir.cross(&(o - pos)).signum() {
                        0 => (None, Some((j + 2) % 3)),
                        x if x > 0 => (Some((j + 1) % 3), None),
                        _ => (Some((j + 2) % 3), None),
                    }
                }
                (None, None) => unreachable!(),
            };
            if let Some(k) = hit_vertex {
                let to = t.v[k];
                s += (to - pos).dot(&dir) / d2;
                if over(&s) {
                    return End::Budget;
                }
                sink(&Segment { tri, from: pos, to, crossing: None, s });
                let class = t.class[k];
                if !self.pass[class] {
                    return End::Vertex { class, tri, corner: k, s };
                }
                let (nt, nc, nd) = self.continue_through(tri, k, &dir);
                tri = nt;
                pos = mesh.tris[nt].v[nc];
                dir = nd;
                corner_start = Some(nc);
                entered = None;
                continue;
            }
            let k = exit_edge.expect("exit edge");
            let (a, w) = (t.v[k], t.edge(k));
            let tau = dir.cross(&(pos - a)) / dir.cross(&w);
            let to = a + w.scale(tau);
            s += (to - pos).dot(&dir) / d2;
            if over(&s) {
                return End::Budget;
            }
            let e = mesh.edge_id[tri][k];
            let key_t = if mesh.is_key_side(tri, k) { tau } else { Scalar::one() - tau };
            sink(&Segment { tri, from: pos, to, crossing: Some((e, key_t)), s });
            let (nt, m, rot) = t.nbr[k];
            let u = Scalar::one() - tau;
            let nt_ref = &mesh.tris[nt];
            pos = nt_ref.v[m as usize] + nt_ref.edge(m as usize).scale(u);
            if rot {
                dir = -dir;
            }
            tri = nt;
            entered = Some(m as usize);
            corner_start = None;
        }
    }

    /// Outgoing corner and direction that continue a leaf straight through a regular vertex
    /// reached at corner `k` of `tri` with direction `dir`.
    pub fn continue_through(&self, tri: usize, k: usize, dir: &Vec2) -> (usize, usize, Vec2) {
        let mesh = self.mesh;
        let class = mesh.tris[tri].class[k];
        let cyc = &mesh.corners[class];
        let here = cyc
            .iter()
            .find(|c| c.tri == tri && c.corner as usize == k)
            .expect("corner in its cycle");
        for c in cyc {
            let d = if c.sign == here.sign { *dir } else { -*dir };
            let t = &mesh.tris[c.tri];
            let ci = c.corner as usize;
            if in_sector(&t.edge(ci), &(t.v[(ci + 2) % 3] - t.v[ci]), &d) {
                return (c.tri, ci, d);
            }
        }
        panic!("no outgoing sector at a regular vertex");
    }
}

/// Outgoing leaves in direction `±v` at every corner of vertex class `class`.
pub fn separatrix_starts(mesh: &Mesh, class: usize, v: &Vec2) -> Vec<Start> {
    let mut out = Vec::new();
    for c in &mesh.corners[class] {
        let t = &mesh.tris[c.tri];
        let ci = c.corner as usize;
        let (e1, e2) = (t.edge(ci), t.v[(ci + 2) % 3] - t.v[ci]);
        for d in [*v, -*v] {
            if in_sector(&e1, &e2, &d) {
                out.push(Start::Corner { tri: c.tri, corner: ci, dir: d });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates;

    #[test]
    fn separatrix_counts_match_cone_angles() {
        let s = templates::lab(Scalar::ratio(1, 2), Scalar::ratio(1, 2)).unwrap();
        let v = Vec2::int(2, 1);
        for cone in s.cones() {
            let n = separatrix_starts(s.mesh(), cone.class, &v).len() as i64;
            assert_eq!(n, cone.angle_pi);
        }
        let q = templates::q_template(1).unwrap();
        for cone in q.cones() {
            assert_eq!(separatrix_starts(q.mesh(), cone.class, &v).len() as i64, cone.angle_pi);
        }
    }

    #[test]
    fn horizontal_leaf_on_torus_closes_after_one_turn() {
        let t = templates::torus();
        let pass = vec![false];
        let tracer = Tracer { mesh: t.mesh(), pass: &pass };
        let start = separatrix_starts(t.mesh(), 0, &Vec2::int(1, 0));
        assert_eq!(start.len(), 2);
        for st in start {
            let end = tracer.run(st, &Scalar::int(100), &mut |_| {});
            assert!(matches!(end, End::Vertex { class: 0, ref s, .. } if *s == Scalar::one()));
        }
        let st = separatrix_starts(t.mesh(), 0, &Vec2::int(3, 2)).remove(0);
        let mut crossings = 0;
        let end = tracer.run(st, &Scalar::int(13), &mut |seg| crossings += seg.crossing.is_some() as usize);
        assert!(matches!(end, End::Vertex { ref s, .. } if *s == Scalar::one()));
        assert!(crossings > 0);
        let st = separatrix_starts(t.mesh(), 0, &Vec2::int(3, 2)).remove(0);
        assert_eq!(tracer.run(st, &Scalar::int(12), &mut |_| {}), End::Budget);
    }
}
