//! Cylinders in a fixed direction from the return map of the flow on edge intervals.
//!
//! Separatrices cut every edge transverse to the direction into intervals. An interval
//! either flows onto exactly one interval of the next edge or is broken. Cycles of this
//! map are bands of closed leaves; bands that meet along a regular leaf (one through an
//! unmarked regular vertex) are merged into one maximal cylinder.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::geometry::{in_triangle, Vec2};
use crate::scalar::Scalar;
use crate::surface::{FlatSurface, Location};
use crate::trace::{separatrix_starts, End, Tracer};

/// Point on a band side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum SidePoint {
    Vertex(usize),
    Mark(usize, Scalar),
}

#[derive(Clone, Debug, Serialize)]
pub struct Cylinder {
    /// Direction of the core (canonical sign).
    pub direction: Vec2,
    pub circumference2: Scalar,
    pub circumference: f64,
    /// Height times `|direction|`; the height is this divided by `|direction|`.
    pub height_scaled: Scalar,
    pub height2: Scalar,
    pub area: Scalar,
    /// Vertex classes met along each boundary component, in flow order (cyclic).
    pub boundary: [Vec<usize>; 2],
    /// Poles on boundary components made only of poles (and regular points).
    pub pole_set: BTreeSet<usize>,
    /// Both boundary components are pole-only.
    pub double_pole_boundary: bool,
    /// Names of marked points and unmarked regular vertices on the core curve.
    pub core_points: BTreeSet<String>,
    /// A point inside the cylinder: cell and chart coordinates.
    pub sample: (usize, Vec2),
    #[serde(skip)]
    pub(crate) bands: Vec<usize>,
}

impl Cylinder {
    /// Boundary saddle connections as pairs of consecutive vertices on each component.
    pub fn boundary_connections(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for side in &self.boundary {
            let n = side.len();
            for i in 0..n {
                out.push((side[i], side[(i + 1) % n]));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Band {
    /// States `(edge, interval, side)` in flow order.
    pub states: Vec<(usize, usize, u8)>,
    /// Triangle and exit edge of each step.
    pub steps: Vec<(usize, usize)>,
    pub s_total: Scalar,
    pub hv: Scalar,
    sides: [Vec<SidePoint>; 2],
    hard: [bool; 2],
    /// Global frame `g = off + sigma·f`.
    off: Scalar,
    sigma: i8,
    cylinder: usize,
}

/// All cylinders in one direction, with the data needed to locate points in them.
pub struct DirectionDecomposition {
    pub direction: Vec2,
    pub cylinders: Vec<Cylinder>,
    pub(crate) bands: Vec<Band>,
    breaks: Vec<Vec<(Scalar, bool)>>,
    band_of: HashMap<(usize, usize), (usize, u8)>,
    soft_points: HashMap<SidePoint, Vec<(usize, u8)>>,
    pass: Vec<bool>,
}

struct Ctx<'a> {
    surface: &'a FlatSurface,
    v: Vec2,
    v2: Scalar,
    breaks: &'a [Vec<(Scalar, bool)>],
}

#[derive(Clone)]
struct Step {
    next: Option<(usize, usize, u8)>,
    tri: usize,
    exit: usize,
    ds: Scalar,
    left: SidePoint,
    right: SidePoint,
}

impl<'a> Ctx<'a> {
    fn local(&self, side: u8, t: &Scalar) -> Scalar {
        if side == 0 {
            *t
        } else {
            Scalar::one() - *t
        }
    }

    fn point(&self, e: usize, t: &Scalar, tri: usize, corner_if: Option<usize>) -> SidePoint {
        match corner_if {
            Some(c) => SidePoint::Vertex(self.surface.mesh().tris[tri].class[c]),
            None => SidePoint::Mark(e, *t),
        }
    }

    fn step(&self, e: usize, i: usize, side: u8) -> Step {
        let mesh = self.surface.mesh();
        let (tri, j) = mesh.sides[e][side as usize];
        let j = j as usize;
        let t = &mesh.tris[tri];
        let wj = t.edge(j);
        let d = if wj.cross(&self.v).signum() > 0 { self.v } else { -self.v };
        let br = &self.breaks[e];
        let (ta, tb) = (br[i].0, br[i + 1].0);
        let (mut u0, mut u1) = (self.local(side, &ta), self.local(side, &tb));
        let (mut t0, mut t1) = (ta, tb);
        if u0 > u1 {
            std::mem::swap(&mut u0, &mut u1);
            std::mem::swap(&mut t0, &mut t1);
        }
        let left = self.point(e, &t0, tri, if u0.is_zero() { Some(j) } else { None });
        let right = self.point(e, &t1, tri, if u1 == Scalar::one() { Some((j + 1) % 3) } else { None });
        let o = t.v[(j + 2) % 3];
        let den = d.cross(&wj);
        let uo = d.cross(&(o - t.v[j])) / den;
        let broken = Step { next: None, tri, exit: 0, ds: Scalar::zero(), left: left.clone(), right: right.clone() };
        if u0 < uo && uo < u1 {
            return broken;
        }
        let k = if u0 >= uo { (j + 1) % 3 } else { (j + 2) % 3 };
        let (a, wk) = (t.v[k], t.edge(k));
        let dk = d.cross(&wk);
        let p = |u: &Scalar| d.cross(&(t.v[j] + wj.scale(*u) - a)) / dk;
        let (p0, p1) = (p(&u0), p(&u1));
        let e2 = mesh.edge_id[tri][k];
        let key = mesh.is_key_side(tri, k);
        let (mut a2, mut b2) = if key { (p0, p1) } else { (Scalar::one() - p0, Scalar::one() - p1) };
        if a2 > b2 {
            std::mem::swap(&mut a2, &mut b2);
        }
        let br2 = &self.breaks[e2];
        let Ok(i2) = br2.binary_search_by(|x| x.0.cmp(&a2)) else {
            return broken;
        };
        if i2 + 1 >= br2.len() || br2[i2 + 1].0 != b2 {
            return broken;
        }
        let (nt, nm, _) = t.nbr[k];
        let side2 = if mesh.sides[e2][0] == (nt, nm) { 0 } else { 1 };
        let half = Scalar::ratio(1, 2);
        let um = (u0 + u1) * half;
        let pm = (p0 + p1) * half;
        let from = t.v[j] + wj.scale(um);
        let to = a + wk.scale(pm);
        let ds = (to - from).dot(&d) / self.v2;
        Step { next: Some((e2, i2, side2)), tri, exit: k, ds, left, right }
    }
}

/// Decomposes the surface in direction `v`. Separatrices are followed for length
/// `sqrt(budget2)`; every cylinder of circumference at most that length is found, and any
/// longer cylinder reported is also genuine.
pub fn cylinders_in_direction(surface: &FlatSurface, v: &Vec2, budget2: &Scalar) -> DirectionDecomposition {
    let mesh = surface.mesh();
    let cones = surface.cones();
    let any_singular = cones.iter().any(|c| c.is_singular());
    let pass: Vec<bool> = cones.iter().map(|c| any_singular && !c.is_singular()).collect();
    let tracer = Tracer { mesh, pass: &pass };
    let ne = mesh.num_edges();
    let transversal: Vec<bool> = (0..ne)
        .map(|e| {
            let (t, j) = mesh.sides[e][0];
            !mesh.tris[t].edge(j as usize).cross(v).is_zero()
        })
        .collect();

    let mut marks: Vec<BTreeMap<Scalar, bool>> = vec![BTreeMap::new(); ne];
    for cone in cones {
        let starts = separatrix_starts(mesh, cone.class, v);
        if !pass[cone.class] {
            for st in starts {
                tracer.run(st, budget2, &mut |seg| {
                    if let Some((e, t)) = &seg.crossing {
                        marks[*e].insert(*t, true);
                    }
                });
            }
        } else {
            // both halves of the leaf through a regular vertex; hard if either half ends
            let mut found = Vec::new();
            let mut hard = false;
            for st in starts {
                let end = tracer.run(st, budget2, &mut |seg| {
                    if let Some((e, t)) = &seg.crossing {
                        found.push((*e, *t));
                    }
                });
                hard |= matches!(end, End::Vertex { .. });
            }
            for (e, t) in found {
                let m = marks[e].entry(t).or_insert(false);
                *m |= hard;
            }
        }
    }
    let breaks: Vec<Vec<(Scalar, bool)>> = (0..ne)
        .map(|e| {
            if !transversal[e] {
                return Vec::new();
            }
            let mut b = vec![(Scalar::zero(), true)];
            b.extend(marks[e].iter().map(|(t, h)| (*t, *h)));
            b.push((Scalar::one(), true));
            b
        })
        .collect();

    let ctx = Ctx { surface, v: *v, v2: v.norm2(), breaks: &breaks };
    // state index: offset[e] + 2*i + side
    let mut offset = vec![0usize; ne + 1];
    for e in 0..ne {
        offset[e + 1] = offset[e] + 2 * breaks[e].len().saturating_sub(1);
    }
    let n_states = offset[ne];
    let decode = |s: usize| -> (usize, usize, u8) {
        let e = offset.partition_point(|&o| o <= s) - 1;
        let r = s - offset[e];
        (e, r / 2, (r % 2) as u8)
    };
    let encode = |(e, i, side): (usize, usize, u8)| offset[e] + 2 * i + side as usize;
    let steps: Vec<Step> = (0..n_states)
        .map(|s| {
            let (e, i, side) = decode(s);
            ctx.step(e, i, side)
        })
        .collect();

    // cycles of the successor map
    let mut color = vec![0u8; n_states];
    let mut bands: Vec<Band> = Vec::new();
    let mut band_of: HashMap<(usize, usize), (usize, u8)> = HashMap::new();
    for s0 in 0..n_states {
        if color[s0] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut s = s0;
        loop {
            if color[s] != 0 {
                break;
            }
            color[s] = 1;
            path.push(s);
            match steps[s].next {
                Some(n) => s = encode(n),
                None => break,
            }
        }
        let cycle_start = if color[s] == 1 && steps[*path.last().unwrap()].next.is_some() {
            path.iter().position(|&x| x == s)
        } else {
            None
        };
        for &p in &path {
            color[p] = 2;
        }
        let Some(pos) = cycle_start else { continue };
        let cyc = &path[pos..];
        let key = cyc.iter().map(|&x| {
            let (e, i, _) = decode(x);
            (e, i)
        });
        let min = key.clone().min().unwrap();
        if !cyc.contains(&encode((min.0, min.1, 0))) {
            continue;
        }
        // rotate so that the canonical state comes first
        let first = cyc.iter().position(|&x| x == encode((min.0, min.1, 0))).unwrap();
        let ordered: Vec<usize> = cyc[first..].iter().chain(&cyc[..first]).copied().collect();
        let b = bands.len();
        let states: Vec<(usize, usize, u8)> = ordered.iter().map(|&x| decode(x)).collect();
        for &(e, i, side) in &states {
            band_of.insert((e, i), (b, side));
        }
        let s_total: Scalar = ordered.iter().map(|&x| steps[x].ds).sum();
        let (e, i, _) = states[0];
        let (t, j) = mesh.sides[e][0];
        let wk = mesh.tris[t].edge(j as usize);
        let hv = ((breaks[e][i + 1].0 - breaks[e][i].0) * v.cross(&wk)).abs();
        let sides = [
            ordered.iter().map(|&x| steps[x].left.clone()).collect::<Vec<_>>(),
            ordered.iter().map(|&x| steps[x].right.clone()).collect::<Vec<_>>(),
        ];
        let is_hard = |pts: &[SidePoint]| {
            pts.iter().any(|p| match p {
                SidePoint::Vertex(c) => !pass[*c],
                SidePoint::Mark(e, t) => breaks[*e].iter().any(|(x, h)| x == t && *h),
            })
        };
        let hard = [is_hard(&sides[0]), is_hard(&sides[1])];
        bands.push(Band {
            states,
            steps: ordered.iter().map(|&x| (steps[x].tri, steps[x].exit)).collect(),
            s_total,
            hv,
            sides,
            hard,
            off: Scalar::zero(),
            sigma: 1,
            cylinder: usize::MAX,
        });
    }

    // merge bands across soft sides
    let mut soft_points: HashMap<SidePoint, Vec<(usize, u8)>> = HashMap::new();
    for (b, band) in bands.iter().enumerate() {
        for side in 0..2u8 {
            if band.hard[side as usize] {
                continue;
            }
            let mut seen = BTreeSet::new();
            for p in &band.sides[side as usize] {
                if seen.insert(p.clone()) {
                    soft_points.entry(p.clone()).or_default().push((b, side));
                }
            }
        }
    }
    let mut adj: Vec<Vec<(u8, usize, u8, SidePoint)>> = vec![Vec::new(); bands.len()];
    let mut soft_keys: Vec<&SidePoint> = soft_points.keys().collect();
    soft_keys.sort();
    for p in soft_keys {
        let list = &soft_points[p];
        for x in 0..list.len() {
            for y in 0..list.len() {
                if list[x].0 != list[y].0 {
                    adj[list[x].0].push((list[x].1, list[y].0, list[y].1, p.clone()));
                }
            }
        }
    }
    let mut cylinders = Vec::new();
    for b0 in 0..bands.len() {
        if bands[b0].cylinder != usize::MAX {
            continue;
        }
        let cid = cylinders.len();
        bands[b0].cylinder = cid;
        let mut members = vec![b0];
        let mut queue = std::collections::VecDeque::from([b0]);
        while let Some(a) = queue.pop_front() {
            for &(sa, bb, sb, _) in &adj[a].clone() {
                if bands[bb].cylinder != usize::MAX {
                    continue;
                }
                let ba = &bands[a];
                let fa = if sa == 0 { Scalar::zero() } else { ba.hv };
                let ga = ba.off + Scalar::int(ba.sigma as i128) * fa;
                let top = ba.off.max(ba.off + Scalar::int(ba.sigma as i128) * ba.hv);
                let hb = bands[bb].hv;
                let fb = if sb == 0 { Scalar::zero() } else { hb };
                let sigma_b: i8 = if ga == top {
                    if sb == 0 { 1 } else { -1 }
                } else if sb == 1 {
                    1
                } else {
                    -1
                };
                bands[bb].sigma = sigma_b;
                bands[bb].off = ga - Scalar::int(sigma_b as i128) * fb;
                bands[bb].cylinder = cid;
                members.push(bb);
                queue.push_back(bb);
            }
        }
        members.sort_unstable();
        cylinders.push(members);
    }

    let mut dec = DirectionDecomposition {
        direction: v.canonical_sign(),
        cylinders: Vec::new(),
        bands,
        breaks,
        band_of,
        soft_points,
        pass,
    };
    dec.cylinders = cylinders.iter().map(|m| dec.assemble(surface, m)).collect();
    dec
}

impl DirectionDecomposition {
    fn range(&self, b: usize) -> (Scalar, Scalar) {
        let band = &self.bands[b];
        let other = band.off + Scalar::int(band.sigma as i128) * band.hv;
        (band.off.min(other), band.off.max(other))
    }

    fn side_g(&self, b: usize, side: u8) -> Scalar {
        let band = &self.bands[b];
        let f = if side == 0 { Scalar::zero() } else { band.hv };
        band.off + Scalar::int(band.sigma as i128) * f
    }

    fn assemble(&self, surface: &FlatSurface, members: &[usize]) -> Cylinder {
        let mesh = surface.mesh();
        let first = &self.bands[members[0]];
        let v2 = self.direction.norm2();
        let s = first.s_total;
        let hv: Scalar = members.iter().map(|&b| self.bands[b].hv).sum();
        let area: Scalar = members.iter().map(|&b| self.bands[b].s_total * self.bands[b].hv).sum();
        let (mut gmin, mut gmax) = self.range(members[0]);
        for &b in members {
            let (lo, hi) = self.range(b);
            gmin = gmin.min(lo);
            gmax = gmax.max(hi);
        }
        let mut boundary: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for &b in members {
            for side in 0..2u8 {
                if !self.bands[b].hard[side as usize] {
                    continue;
                }
                let g = self.side_g(b, side);
                let slot = if g == gmin && boundary[0].is_empty() { 0 } else { 1 };
                let mut seq: Vec<usize> = self.bands[b].sides[side as usize]
                    .iter()
                    .filter_map(|p| match p {
                        SidePoint::Vertex(c) => Some(*c),
                        SidePoint::Mark(..) => None,
                    })
                    .collect();
                seq.dedup();
                if seq.len() > 1 && seq.first() == seq.last() {
                    seq.pop();
                }
                boundary[slot] = seq;
            }
        }
        let cones = surface.cones();
        let mut pole_set = BTreeSet::new();
        let mut pole_sides = 0;
        for side in &boundary {
            let singular: Vec<usize> =
                side.iter().copied().filter(|&c| !cones[c].is_regular()).collect();
            if !singular.is_empty() && singular.iter().all(|&c| cones[c].is_pole()) {
                pole_sides += 1;
                pole_set.extend(singular);
            }
        }
        let (e, i, side) = first.states[0];
        let (tri, j) = mesh.sides[e][side as usize];
        let t = &mesh.tris[tri];
        let br = &self.breaks[e];
        let mid = (br[i].0 + br[i + 1].0) * Scalar::ratio(1, 2);
        let u = if side == 0 { mid } else { Scalar::one() - mid };
        let sample = (t.cell, t.v[j as usize] + t.edge(j as usize).scale(u));
        let circumference2 = s * s * v2;
        let mut cyl = Cylinder {
            direction: self.direction,
            circumference2,
            circumference: circumference2.to_f64().sqrt(),
            height_scaled: hv,
            height2: hv * hv / v2,
            area,
            boundary,
            pole_set,
            double_pole_boundary: pole_sides == 2,
            core_points: BTreeSet::new(),
            sample,
            bands: members.to_vec(),
        };
        let mid2 = gmin + gmax;
        for m in surface.markings().iter().filter(|m| !m.puncture) {
            if let Some((c, g)) = self.locate_in(surface, m.cell, &m.pos) {
                if self.bands[members[0]].cylinder == c && g * Scalar::int(2) == mid2 {
                    cyl.core_points.insert(m.name.clone());
                }
            }
        }
        for cone in cones.iter().filter(|c| self.pass[c.class]) {
            if let Some((c, g)) = self.locate_vertex(cone.class) {
                if self.bands[members[0]].cylinder == c && g * Scalar::int(2) == mid2 {
                    cyl.core_points.insert(cone.name.clone());
                }
            }
        }
        cyl
    }

    fn locate_vertex(&self, class: usize) -> Option<(usize, Scalar)> {
        let (b, side) = *self.soft_points.get(&SidePoint::Vertex(class))?.first()?;
        Some((self.bands[b].cylinder, self.side_g(b, side)))
    }

    /// Cylinder containing the point and its transverse coordinate in the cylinder frame.
    fn locate_in(&self, surface: &FlatSurface, cell: usize, pos: &Vec2) -> Option<(usize, Scalar)> {
        if let Some(Location::Vertex(c)) = surface.locate(cell, pos) {
            return if self.pass[c] { self.locate_vertex(c) } else { None };
        }
        let mesh = surface.mesh();
        let v = self.direction;
        let tri = mesh
            .tris
            .iter()
            .position(|t| t.cell == cell && in_triangle(pos, &t.v[0], &t.v[1], &t.v[2]))?;
        let t = &mesh.tris[tri];
        for j in 0..3 {
            let w = t.edge(j);
            let den = v.cross(&w);
            if den.is_zero() {
                continue;
            }
            let u = v.cross(&(*pos - t.v[j])) / den;
            if u.signum() < 0 || u > Scalar::one() {
                continue;
            }
            let e = mesh.edge_id[tri][j];
            let key_t = if mesh.is_key_side(tri, j) { u } else { Scalar::one() - u };
            if key_t.is_zero() || key_t == Scalar::one() {
                let c = if u.is_zero() { t.class[j] } else { t.class[(j + 1) % 3] };
                return if self.pass[c] { self.locate_vertex(c) } else { None };
            }
            let br = &self.breaks[e];
            return match br.binary_search_by(|x| x.0.cmp(&key_t)) {
                Ok(k) => {
                    if br[k].1 {
                        return None;
                    }
                    let (b, side) = *self.soft_points.get(&SidePoint::Mark(e, key_t))?.first()?;
                    Some((self.bands[b].cylinder, self.side_g(b, side)))
                }
                Err(k) => {
                    let i = k - 1;
                    let &(b, side) = self.band_of.get(&(e, i))?;
                    let band = &self.bands[b];
                    let loc = |x: &Scalar| if side == 0 { *x } else { Scalar::one() - *x };
                    let (mut u0, mut u1) = (loc(&br[i].0), loc(&br[i + 1].0));
                    if u0 > u1 {
                        std::mem::swap(&mut u0, &mut u1);
                    }
                    let ul = loc(&key_t);
                    let f = (ul - u0) / (u1 - u0) * band.hv;
                    Some((band.cylinder, band.off + Scalar::int(band.sigma as i128) * f))
                }
            };
        }
        None
    }

    /// Cylinder containing a surface point, if any.
    pub fn cylinder_at(&self, surface: &FlatSurface, cell: usize, pos: &Vec2) -> Option<usize> {
        self.locate_in(surface, cell, pos).map(|(c, _)| c)
    }

    /// Triangles and exit edges of one closed leaf of cylinder `c`.
    pub fn core_steps(&self, c: usize) -> &[(usize, usize)] {
        &self.bands[self.cylinders[c].bands[0]].steps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates;

    fn all(s: &FlatSurface, v: Vec2) -> Vec<Cylinder> {
        cylinders_in_direction(s, &v, &Scalar::int(10_000)).cylinders
    }

    #[test]
    fn torus_has_one_cylinder_per_direction() {
        let t = templates::torus();
        for v in [Vec2::int(1, 0), Vec2::int(0, 1), Vec2::int(2, 3)] {
            let c = all(&t, v);
            assert_eq!(c.len(), 1);
            assert_eq!(c[0].area, Scalar::one());
            assert_eq!(c[0].circumference2, v.norm2());
            assert_eq!(c[0].boundary, [vec![0], vec![0]]);
        }
    }

    #[test]
    fn lab_horizontal_decomposition() {
        let s = templates::lab(Scalar::ratio(1, 2), Scalar::ratio(1, 2)).unwrap();
        let mut c = all(&s, Vec2::int(1, 0));
        c.sort_by_key(|a| a.circumference2);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].circumference2, Scalar::ratio(1, 4));
        assert_eq!(c[1].circumference2, Scalar::one());
        let total: Scalar = c.iter().map(|x| x.area).sum();
        assert_eq!(total, Scalar::ratio(3, 4));
        assert!(c[1].core_points.contains("w1") && c[1].core_points.contains("w2"));
        assert!(c[0].core_points.contains("w4") && c[0].core_points.contains("w5"));
    }

    #[test]
    fn orientation_cover_merges_across_weierstrass_points() {
        let x = crate::coverings::orientation_double_cover(&templates::q_template(1).unwrap()).unwrap();
        let total_area = x.total.area();
        for v in [Vec2::int(1, 0), Vec2::int(0, 1), Vec2::int(1, 1), Vec2::int(1, 2)] {
            let c = all(&x.total, v);
            let a: Scalar = c.iter().map(|c| c.area).sum();
            assert_eq!(a, total_area, "direction {v:?}");
            for cyl in &c {
                assert_eq!(cyl.core_points.len(), 2, "direction {v:?}");
            }
        }
    }
}
