//! Degree-two covers built from two copies of the base triangulation, deck involutions
//! and Weierstrass points.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::geometry::{in_triangle, Vec2};
use crate::io::surface_hash;
use crate::scalar::Scalar;
use crate::surface::{CoverInfo, FlatSurface, Gluing, Involution, Kind, Location, Marking, PointKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverType {
    /// Canonical cover on which a quadratic differential becomes a square.
    Orientation,
    /// Slit cover branched over two points.
    Ramified,
}

/// A degree-two cover. Cell `s·T + t` of the total space is sheet `s` over base triangle `t`.
#[derive(Clone, Debug)]
pub struct CoveringMap {
    pub cover_type: CoverType,
    pub base: FlatSurface,
    pub total: FlatSurface,
    /// Base vertex classes over which the cover branches.
    pub ramification: Vec<usize>,
    /// `swap[e]`: crossing base mesh edge `e` changes sheet.
    pub swap: Vec<bool>,
    /// Base vertex class under each total vertex class.
    pub vertex_base: Vec<usize>,
    pub deck: Involution,
}

impl CoveringMap {
    pub fn num_base_tris(&self) -> usize {
        self.base.mesh().tris.len()
    }

    /// Base triangle and sheet of a total-space triangle.
    pub fn sheet_of(&self, total_tri: usize) -> (usize, u8) {
        let t = self.num_base_tris();
        (total_tri % t, (total_tri / t) as u8)
    }

    /// Whether crossing edge `j` of base triangle `t` swaps sheets.
    pub fn swaps(&self, t: usize, j: usize) -> bool {
        self.swap[self.base.mesh().edge_id[t][j]]
    }

    /// Chart of `sheet` relative to the base chart: `-1` for the negated sheet of an
    /// orientation cover.
    pub fn sheet_sign(&self, sheet: u8) -> i8 {
        if self.cover_type == CoverType::Orientation && sheet == 1 {
            -1
        } else {
            1
        }
    }

    /// Names of the ramification points.
    pub fn ramification_names(&self) -> Vec<String> {
        self.ramification.iter().map(|&v| self.base.cones()[v].name.clone()).collect()
    }

    /// Total-space vertex classes over base vertex `v`.
    pub fn preimages(&self, v: usize) -> Vec<usize> {
        (0..self.vertex_base.len()).filter(|&w| self.vertex_base[w] == v).collect()
    }
}

/// Parity of ramification points in the pole set of a cylinder boundary: `0` means the
/// core lifts to two closed curves, `1` to a single one of twice the length.
pub fn loop_monodromy(cover: &CoveringMap, boundary_pole_set: &BTreeSet<usize>) -> Result<u8> {
    if boundary_pole_set.len() != 2 {
        return Err(Error::PoleSetSize(boundary_pole_set.len()));
    }
    let r = boundary_pole_set.iter().filter(|v| cover.ramification.contains(v)).count();
    Ok((r % 2) as u8)
}

pub const PRIME: &str = "\u{2032}";
pub const DOUBLE_PRIME: &str = "\u{2033}";

/// Spells ASCII primes (`'`, `''`) as the typographic primes used in lifted names.
pub fn normalize_name(name: &str) -> String {
    name.replace("''", DOUBLE_PRIME).replace('\'', PRIME)
}

/// Vertex class named `name`: a cone point name or a marking sitting at a vertex.
pub fn resolve_vertex(s: &FlatSurface, name: &str) -> Result<usize> {
    let name = &normalize_name(name);
    if let Some(c) = s.cone_by_name(name) {
        return Ok(c.class);
    }
    if let Some(m) = s.marking(name) {
        if let Some(Location::Vertex(v)) = s.locate(m.cell, &m.pos) {
            return Ok(v);
        }
    }
    Err(Error::UnknownPoint(name.into()))
}

fn negate_if(v: Vec2, neg: bool) -> Vec2 {
    if neg {
        -v
    } else {
        v
    }
}

fn assemble(base: &FlatSurface, cover_type: CoverType, swap: Vec<bool>) -> Result<CoveringMap> {
    let mesh = base.mesh();
    let nt = mesh.tris.len();
    let neg = |s: usize| cover_type == CoverType::Orientation && s == 1;
    let mut cells = Vec::with_capacity(2 * nt);
    for s in 0..2 {
        for t in &mesh.tris {
            cells.push(t.v.iter().map(|&p| negate_if(p, neg(s))).collect::<Vec<_>>());
        }
    }
    let mut gluings = Vec::new();
    for s in 0..2 {
        for (t, tri) in mesh.tris.iter().enumerate() {
            for j in 0..3 {
                let (u, m, _) = tri.nbr[j];
                let s2 = s ^ swap[mesh.edge_id[t][j]] as usize;
                let (a, b) = (s * nt + t, s2 * nt + u);
                if (a, j) < (b, m as usize) {
                    gluings.push(Gluing::new(a, j, b, m as usize));
                }
            }
        }
    }
    // connectivity of the two sheets
    let mut seen = vec![false; 2 * nt];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(c) = queue.pop_front() {
        let (t, s) = (c % nt, c / nt);
        for j in 0..3 {
            let u = mesh.tris[t].nbr[j].0;
            let d = (s ^ swap[mesh.edge_id[t][j]] as usize) * nt + u;
            if !seen[d] {
                seen[d] = true;
                queue.push_back(d);
            }
        }
    }
    if seen.iter().any(|&x| !x) {
        return Err(Error::DisconnectedCover);
    }

    let kind = match cover_type {
        CoverType::Orientation => Kind::Abelian,
        CoverType::Ramified => base.kind(),
    };
    let mut markings = Vec::new();
    for m in base.markings().iter().filter(|m| !m.puncture) {
        let tri = mesh
            .tris
            .iter()
            .position(|t| t.cell == m.cell && in_triangle(&m.pos, &t.v[0], &t.v[1], &t.v[2]))
            .ok_or_else(|| Error::Marking(m.name.clone()))?;
        for s in 0..2 {
            let name = format!("{}{}", m.name, if s == 0 { PRIME } else { DOUBLE_PRIME });
            markings.push(Marking {
                name,
                cell: s * nt + tri,
                pos: negate_if(m.pos, neg(s)),
                puncture: false,
            });
        }
    }
    let mut total = FlatSurface::build(cells, &gluings, kind, markings)?;

    // base vertex of every total vertex class, and names
    let tm = total.mesh().clone();
    let mut vertex_base = vec![usize::MAX; total.num_vertices()];
    for (ct, tri) in tm.tris.iter().enumerate() {
        let bt = ct % nt;
        for c in 0..3 {
            vertex_base[tri.class[c]] = mesh.tris[bt].class[c];
        }
    }
    let mut ramification = Vec::new();
    for v in 0..base.num_vertices() {
        let pre: Vec<usize> = (0..vertex_base.len()).filter(|&w| vertex_base[w] == v).collect();
        let name = base.cones()[v].name.clone();
        let marked = base.cones()[v].marked;
        if pre.len() == 1 {
            ramification.push(v);
            total.set_cone_name(pre[0], name);
            // a branch point over a pole of a slit cover stays a named puncture
            let branch_pole = cover_type == CoverType::Ramified && base.cones()[v].is_pole();
            if marked || branch_pole {
                total.add_puncture(pre[0]);
            }
        } else {
            let first = mesh.corners[v][0];
            let w0 = tm.tris[first.tri].class[first.corner as usize];
            for &w in &pre {
                let suffix = if w == w0 { PRIME } else { DOUBLE_PRIME };
                total.set_cone_name(w, format!("{name}{suffix}"));
                if marked {
                    total.add_puncture(w);
                }
            }
        }
    }
    let deck = Involution {
        cell_map: (0..2 * nt).map(|c| (c + nt) % (2 * nt)).collect(),
        offset: vec![Vec2::zero(); 2 * nt],
        linear: if cover_type == CoverType::Orientation { -1 } else { 1 },
    };
    let info = CoverInfo {
        base_hash: surface_hash(base),
        ramification: ramification.iter().map(|&v| base.cones()[v].name.clone()).collect(),
        sheet_map: (0..2 * nt).map(|c| (c % nt, (c / nt) as u8)).collect(),
    };
    total.set_cover_info(info);
    if cover_type == CoverType::Orientation {
        total.set_involution(deck.clone());
    }
    Ok(CoveringMap { cover_type, base: base.clone(), total, ramification, swap, vertex_base, deck })
}

/// Orientation double cover of a quadratic surface; half-turn gluings cross sheets.
pub fn orientation_double_cover(surface: &FlatSurface) -> Result<CoveringMap> {
    if surface.kind() != Kind::Quadratic {
        return Err(Error::WrongKind("orientation double cover needs a quadratic surface".into()));
    }
    let mesh = surface.mesh();
    let swap: Vec<bool> = mesh.sides.iter().map(|&[(t, j), _]| mesh.tris[t].nbr[j as usize].2).collect();
    assemble(surface, CoverType::Orientation, swap)
}

/// Undirected mesh edges forming a shortest (fewest edges) path between two vertex
/// classes, ties broken by edge id.
pub fn shortest_cut_path(surface: &FlatSurface, a: usize, b: usize) -> Result<Vec<usize>> {
    let mesh = surface.mesh();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); surface.num_vertices()];
    for (e, &[(t, j), _]) in mesh.sides.iter().enumerate() {
        let tri = &mesh.tris[t];
        let (u, v) = (tri.class[j as usize], tri.class[(j as usize + 1) % 3]);
        if u != v {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
    }
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; surface.num_vertices()];
    let mut seen = vec![false; surface.num_vertices()];
    seen[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        if u == b {
            break;
        }
        for &(v, e) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                prev[v] = Some((u, e));
                queue.push_back(v);
            }
        }
    }
    if !seen[b] {
        return Err(Error::CutPath("points are not connected by edges".into()));
    }
    let mut path = Vec::new();
    let mut v = b;
    while let Some((u, e)) = prev[v] {
        path.push(e);
        v = u;
    }
    path.reverse();
    Ok(path)
}

fn check_cut_path(surface: &FlatSurface, a: usize, b: usize, path: &[usize]) -> Result<()> {
    let mesh = surface.mesh();
    if path.is_empty() {
        return Err(Error::CutPath("empty path".into()));
    }
    let mut at = a;
    let mut visited = BTreeSet::from([a]);
    for &e in path {
        let &[(t, j), _] = mesh.sides.get(e).ok_or_else(|| Error::CutPath(format!("no edge {e}")))?;
        let tri = &mesh.tris[t];
        let (u, v) = (tri.class[j as usize], tri.class[(j as usize + 1) % 3]);
        let next = if u == at {
            v
        } else if v == at {
            u
        } else {
            return Err(Error::CutPath(format!("edge {e} does not continue the path")));
        };
        if !visited.insert(next) {
            return Err(Error::CutPath("path is not simple".into()));
        }
        at = next;
    }
    if at != b {
        return Err(Error::CutPath("path does not end at the second point".into()));
    }
    Ok(())
}

/// Slit double cover branched over the points named `point_a` and `point_b`: two copies of
/// the base are cut along `cut_path` (mesh edge ids; default: shortest) and re-glued
/// crosswise.
pub fn ramified_double_cover(
    surface: &FlatSurface,
    point_a: &str,
    point_b: &str,
    cut_path: Option<&[usize]>,
) -> Result<CoveringMap> {
    let a = resolve_vertex(surface, point_a)?;
    let b = resolve_vertex(surface, point_b)?;
    if a == b {
        return Err(Error::CoincidentRamification);
    }
    let path = match cut_path {
        Some(p) => p.to_vec(),
        None => shortest_cut_path(surface, a, b)?,
    };
    check_cut_path(surface, a, b, &path)?;
    let mut swap = vec![false; surface.mesh().num_edges()];
    for &e in &path {
        swap[e] = true;
    }
    let cover = assemble(surface, CoverType::Ramified, swap)?;
    let mut r = cover.ramification.clone();
    r.sort_unstable();
    let mut want = vec![a, b];
    want.sort_unstable();
    if r != want {
        return Err(Error::CutPath("cover does not branch exactly over the two points".into()));
    }
    Ok(cover)
}

/// The hyperelliptic involution of a surface that carries one (orientation covers of
/// genus-zero bases, and the `L(a,b)` template).
pub fn hyperelliptic_involution(surface: &FlatSurface) -> Result<Involution> {
    let inv = surface.involution().ok_or(Error::NoCovering)?;
    if inv.linear != -1 {
        return Err(Error::NoCovering);
    }
    Ok(inv.clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPoint {
    pub cell: usize,
    pub pos: Vec2,
    pub key: PointKey,
    /// Vertex class when the fixed point is a vertex.
    pub vertex: Option<usize>,
}

/// Isolated fixed points of an involution, one per surface point, in a canonical order.
pub fn fixed_points(surface: &FlatSurface, inv: &Involution) -> Result<Vec<FixedPoint>> {
    let mut out: BTreeMap<String, FixedPoint> = BTreeMap::new();
    let mut push = |cell: usize, pos: Vec2| -> Result<()> {
        let key = surface
            .point_key(cell, &pos)
            .ok_or_else(|| Error::Domain("fixed point outside its cell".into()))?;
        let vertex = match key {
            PointKey::Vertex(v) => Some(v),
            _ => None,
        };
        out.entry(format!("{key:?}")).or_insert(FixedPoint { cell, pos, key, vertex });
        Ok(())
    };
    let half = Scalar::ratio(1, 2);
    for (c, pts) in surface.cells().iter().enumerate() {
        let n = pts.len();
        if inv.cell_map[c] == c {
            if inv.linear == 1 {
                if !inv.offset[c].is_zero() {
                    return Err(Error::Domain("translation maps a cell to itself".into()));
                }
                return Err(Error::Domain("involution fixes a whole cell".into()));
            }
            push(c, inv.offset[c].scale(half))?;
        }
        let img = &surface.cells()[inv.cell_map[c]];
        let image_corner = |k: usize| -> Option<usize> {
            let (_, q) = inv.apply(c, &pts[k]);
            img.iter().position(|p| *p == q)
        };
        for k in 0..n {
            let (pc, pk, _) = surface.partner(c, k);
            if pc != inv.cell_map[c] {
                continue;
            }
            let m = img.len();
            if image_corner(k) == Some(pk) && image_corner((k + 1) % n) == Some((pk + 1) % m) {
                push(c, (pts[k] + pts[(k + 1) % n]).scale(half))?;
            }
        }
        for k in 0..n {
            if let Some(j) = image_corner(k) {
                if surface.vertex_class(inv.cell_map[c], j) == surface.vertex_class(c, k) {
                    push(c, pts[k])?;
                }
            }
        }
    }
    Ok(out.into_values().collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassPoint {
    pub point: FixedPoint,
    pub regular: bool,
    /// Name of a marking or cone point at this position, if any.
    pub name: Option<String>,
}

/// Fixed points of the hyperelliptic involution, classified as regular or singular.
pub fn weierstrass_points(surface: &FlatSurface) -> Result<Vec<WeierstrassPoint>> {
    let inv = hyperelliptic_involution(surface)?;
    let pts = fixed_points(surface, &inv)?;
    Ok(pts
        .into_iter()
        .map(|p| {
            let (regular, name) = match p.vertex {
                Some(v) => (surface.cones()[v].is_regular(), Some(surface.cones()[v].name.clone())),
                None => {
                    let name = surface
                        .markings()
                        .iter()
                        .find(|m| surface.point_key(m.cell, &m.pos).as_ref() == Some(&p.key))
                        .map(|m| m.name.clone());
                    (true, name)
                }
            };
            WeierstrassPoint { point: p, regular, name }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::StratumSignature;
    use crate::templates;

    fn quad(orders: &[i64]) -> StratumSignature {
        StratumSignature::quadratic(orders.to_vec())
    }

    #[test]
    fn orientation_covers_of_templates() {
        let y1 = templates::q_template(1).unwrap();
        let x1 = orientation_double_cover(&y1).unwrap();
        assert_eq!(x1.total.stratum_signature().to_string(), "H(2)");
        assert_eq!(x1.total.area(), y1.area() * Scalar::int(2));
        let y2 = templates::q_template(2).unwrap();
        let x2 = orientation_double_cover(&y2).unwrap();
        assert_eq!(x2.total.stratum_signature().to_string(), "H(1,1)");
        let p = templates::pillowcase();
        let t = orientation_double_cover(&p).unwrap();
        assert_eq!(t.total.stratum_signature().to_string(), "H(0)");
        assert_eq!(t.total.genus(), 1);
        let mut named: Vec<_> = t.total.cones().iter().map(|c| c.name.clone()).collect();
        named.sort();
        assert_eq!(named, ["p1", "p2", "p3", "p4"]);
    }

    #[test]
    fn abelian_input_is_rejected() {
        assert!(matches!(orientation_double_cover(&templates::torus()), Err(Error::WrongKind(_))));
    }

    #[test]
    fn ramified_covers_of_q1() {
        let y = templates::q_template(1).unwrap();
        let y01 = ramified_double_cover(&y, "z1", "p1", None).unwrap();
        assert!(y01.total.stratum_signature().same_stratum(&quad(&[4, -1, -1, -1, -1, -1, -1, -1, -1])));
        let y11 = ramified_double_cover(&y, "p1", "p2", None).unwrap();
        assert!(y11.total.stratum_signature().same_stratum(&quad(&[1, 1, -1, -1, -1, -1, -1, -1])));
        assert_eq!(y11.total.genus(), 0);
        assert_eq!(y11.total.area(), y.area() * Scalar::int(2));
        assert!(y11.total.cone_by_name("z1\u{2032}").is_some());
        assert!(y11.total.cone_by_name("p3\u{2033}").is_some());
        assert_eq!(resolve_vertex(&y11.total, "p3''").unwrap(), resolve_vertex(&y11.total, "p3\u{2033}").unwrap());
        let p1 = y11.total.cone_by_name("p1").unwrap();
        assert!(p1.is_regular() && p1.marked);
        assert!(matches!(ramified_double_cover(&y, "p1", "p1", None), Err(Error::CoincidentRamification)));
        assert!(matches!(ramified_double_cover(&y, "p1", "q", None), Err(Error::UnknownPoint(_))));
    }

    #[test]
    fn monodromy_counts_ramified_poles() {
        let y = templates::q_template(1).unwrap();
        let c = ramified_double_cover(&y, "p1", "p2", None).unwrap();
        let id = |n: &str| resolve_vertex(&y, n).unwrap();
        assert_eq!(loop_monodromy(&c, &BTreeSet::from([id("p3"), id("p4")])).unwrap(), 0);
        assert_eq!(loop_monodromy(&c, &BTreeSet::from([id("p1"), id("p4")])).unwrap(), 1);
        assert_eq!(loop_monodromy(&c, &BTreeSet::from([id("p1"), id("p2")])).unwrap(), 0);
        assert!(matches!(loop_monodromy(&c, &BTreeSet::from([id("p1")])), Err(Error::PoleSetSize(1))));
    }

    #[test]
    fn weierstrass_points_of_lab() {
        let s = templates::lab(Scalar::ratio(1, 2), Scalar::ratio(1, 2)).unwrap();
        let w = weierstrass_points(&s).unwrap();
        assert_eq!(w.len(), 6);
        assert_eq!(w.iter().filter(|p| p.regular).count(), 5);
        let mut names: Vec<_> = w.iter().filter(|p| p.regular).filter_map(|p| p.name.clone()).collect();
        names.sort();
        assert_eq!(names, ["w1", "w2", "w3", "w4", "w5"]);
    }

    #[test]
    fn weierstrass_points_of_orientation_covers() {
        let t = orientation_double_cover(&templates::pillowcase()).unwrap();
        assert_eq!(weierstrass_points(&t.total).unwrap().len(), 4);
        let x = orientation_double_cover(&templates::q_template(2).unwrap()).unwrap();
        let w = weierstrass_points(&x.total).unwrap();
        assert_eq!(w.len(), 6);
        assert!(w.iter().all(|p| p.regular));
        let x1 = orientation_double_cover(&templates::q_template(1).unwrap()).unwrap();
        let w1 = weierstrass_points(&x1.total).unwrap();
        assert_eq!((w1.len(), w1.iter().filter(|p| p.regular).count()), (6, 5));
        // regular ones sit over the poles
        for p in w1.iter().filter(|p| p.regular) {
            let v = p.point.vertex.unwrap();
            assert!(x1.base.cones()[x1.vertex_base[v]].is_pole());
        }
    }

    #[test]
    fn deck_involution_is_an_involution() {
        let x = orientation_double_cover(&templates::q_template(1).unwrap()).unwrap();
        for (c, cell) in x.total.cells().iter().enumerate() {
            for p in cell {
                let (c1, q) = x.deck.apply(c, p);
                assert_eq!(x.deck.apply(c1, &q), (c, *p));
                assert!(x.total.cells()[c1].contains(&q));
            }
        }
    }
}
