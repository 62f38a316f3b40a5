//! Flat surfaces as polygon gluings, with cone-point and stratum analysis.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{in_triangle, on_segment, orient, signed_area2, Vec2};
use crate::mesh::{build_mesh, triangulate_polygon, Mesh};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Abelian,
    Quadratic,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Abelian => "abelian",
            Kind::Quadratic => "quadratic",
        }
    }
}

/// Identification of polygon edge `(cell, edge)` with `(other_cell, other_edge)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gluing {
    pub cell: usize,
    pub edge: usize,
    pub other_cell: usize,
    pub other_edge: usize,
}

impl Gluing {
    pub fn new(cell: usize, edge: usize, other_cell: usize, other_edge: usize) -> Gluing {
        Gluing { cell, edge, other_cell, other_edge }
    }
}

/// A named point on the surface, given in the chart of one cell.
///
/// A `puncture` must sit at a polygon vertex; it turns that vertex into a marked point
/// that bounds cylinders even when its cone angle is 2π.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Marking {
    pub name: String,
    pub cell: usize,
    pub pos: Vec2,
    pub puncture: bool,
}

impl Marking {
    pub fn new(name: impl Into<String>, cell: usize, pos: Vec2) -> Marking {
        Marking { name: name.into(), cell, pos, puncture: false }
    }

    pub fn puncture(name: impl Into<String>, cell: usize, pos: Vec2) -> Marking {
        Marking { name: name.into(), cell, pos, puncture: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConePoint {
    pub class: usize,
    pub name: String,
    /// Total cone angle divided by π.
    pub angle_pi: i64,
    /// Order `d` (quadratic) or degree `n` (abelian).
    pub order: i64,
    pub marked: bool,
}

impl ConePoint {
    pub fn is_pole(&self) -> bool {
        self.angle_pi == 1
    }

    pub fn is_regular(&self) -> bool {
        self.angle_pi == 2
    }

    /// Whether straight-line flow must stop here.
    pub fn is_singular(&self) -> bool {
        !self.is_regular() || self.marked
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumSignature {
    pub kind: Kind,
    /// Orders (quadratic) or degrees (abelian) of the non-regular cone points, descending.
    pub orders: Vec<i64>,
    /// Number of marked regular points.
    pub marked_points: usize,
    pub genus: i64,
}

impl StratumSignature {
    pub fn quadratic(mut orders: Vec<i64>) -> StratumSignature {
        orders.sort_unstable_by(|a, b| b.cmp(a));
        let genus = (orders.iter().sum::<i64>() + 4) / 4;
        StratumSignature { kind: Kind::Quadratic, orders, marked_points: 0, genus }
    }

    pub fn abelian(mut orders: Vec<i64>) -> StratumSignature {
        orders.sort_unstable_by(|a, b| b.cmp(a));
        let genus = (orders.iter().sum::<i64>() + 2) / 2;
        StratumSignature { kind: Kind::Abelian, orders, marked_points: 0, genus }
    }

    /// Same stratum, ignoring marked regular points.
    pub fn same_stratum(&self, other: &StratumSignature) -> bool {
        self.kind == other.kind && self.orders == other.orders && self.genus == other.genus
    }
}

impl fmt::Display for StratumSignature {
    /// `H(2)`, `Q(1,1,-1^6)`, `Q(-1^4)`: runs of poles use exponent notation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.kind {
            Kind::Abelian => 'H',
            Kind::Quadratic => 'Q',
        };
        let mut parts: Vec<String> =
            self.orders.iter().filter(|&&d| d != -1).map(|d| d.to_string()).collect();
        let poles = self.orders.iter().filter(|&&d| d == -1).count();
        match poles {
            0 => {}
            1 => parts.push("-1".into()),
            k => parts.push(format!("-1^{k}")),
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}({})", letter, parts.join(","))
    }
}

/// Deck-type involution acting cell-wise as `x ↦ linear·x + offset[c]` into `cell_map[c]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    pub cell_map: Vec<usize>,
    pub offset: Vec<Vec2>,
    /// `-1` for the hyperelliptic (−identity) type, `+1` for a translation deck map.
    pub linear: i8,
}

impl Involution {
    pub fn apply(&self, cell: usize, p: &Vec2) -> (usize, Vec2) {
        let q = if self.linear < 0 { -*p } else { *p };
        (self.cell_map[cell], q + self.offset[cell])
    }
}

/// Position of a point relative to the triangulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Vertex(usize),
    /// On triangle edge `(tri, edge)` at parameter `t` in `(0,1)`.
    Edge { tri: usize, edge: usize, t: Scalar },
    Interior { tri: usize },
}

/// Provenance of a surface built as a double cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverInfo {
    pub base_hash: String,
    pub ramification: Vec<String>,
    /// For each total-space cell: base cell and sheet.
    pub sheet_map: Vec<(usize, u8)>,
}

#[derive(Clone, Debug)]
pub struct FlatSurface {
    kind: Kind,
    field: Field,
    cells: Vec<Vec<Vec2>>,
    /// `partner[c][k] = (cell, edge, half_turn)`.
    partner: Vec<Vec<(usize, usize, bool)>>,
    markings: Vec<Marking>,
    class_of: Vec<Vec<usize>>,
    cones: Vec<ConePoint>,
    mesh: Mesh,
    involution: Option<Involution>,
    cover: Option<CoverInfo>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn check_polygon(cell: usize, pts: &[Vec2]) -> Result<()> {
    let bad = |reason: &str| Error::DegeneratePolygon { cell, reason: reason.into() };
    let n = pts.len();
    if n < 3 {
        return Err(bad("fewer than three vertices"));
    }
    for i in 0..n {
        for j in i + 1..n {
            if pts[i] == pts[j] {
                return Err(bad("repeated vertex"));
            }
        }
    }
    let a2 = signed_area2(pts);
    if a2.signum() == 0 {
        return Err(bad("zero area"));
    }
    if a2.signum() < 0 {
        return Err(bad("vertices must be listed counter-clockwise"));
    }
    // simple: non-adjacent edges do not meet
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in i + 1..n {
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            if segments_meet(&a, &b, &c, &d) {
                return Err(bad("self-intersecting boundary"));
            }
        }
    }
    Ok(())
}

fn segments_meet(a: &Vec2, b: &Vec2, c: &Vec2, d: &Vec2) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d)
}

/// Closed membership of `p` in a simple counter-clockwise polygon.
fn point_in_polygon(p: &Vec2, pts: &[Vec2]) -> bool {
    let n = pts.len();
    if (0..n).any(|i| on_segment(p, &pts[i], &pts[(i + 1) % n])) {
        return true;
    }
    // crossing number with a horizontal ray
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) {
            // x coordinate of the crossing compared with p.x, without division sign issues
            let lhs = (p.x - a.x) * (b.y - a.y);
            let rhs = (b.x - a.x) * (p.y - a.y);
            let left = if (b.y - a.y).signum() > 0 { lhs < rhs } else { lhs > rhs };
            if left {
                inside = !inside;
            }
        }
    }
    inside
}

impl FlatSurface {
    /// Validates and builds a surface from cells, gluings and markings.
    pub fn build(
        cells: Vec<Vec<Vec2>>,
        gluings: &[Gluing],
        kind: Kind,
        markings: Vec<Marking>,
    ) -> Result<FlatSurface> {
        let mut field = Field::Rational;
        let all_scalars = cells
            .iter()
            .flatten()
            .chain(markings.iter().map(|m| &m.pos))
            .flat_map(|v| [v.x, v.y]);
        for s in all_scalars {
            field = field.join(s.field()).ok_or(Error::MixedFields)?;
        }
        for (c, pts) in cells.iter().enumerate() {
            check_polygon(c, pts)?;
        }

        let mut partner: Vec<Vec<Option<(usize, usize, bool)>>> =
            cells.iter().map(|c| vec![None; c.len()]).collect();
        for g in gluings {
            for &(c, k) in &[(g.cell, g.edge), (g.other_cell, g.other_edge)] {
                if c >= cells.len() || k >= cells[c].len() {
                    return Err(Error::Matching(format!("edge ({c},{k}) does not exist")));
                }
            }
            if (g.cell, g.edge) == (g.other_cell, g.other_edge) {
                return Err(Error::Matching(format!("edge ({},{}) glued to itself", g.cell, g.edge)));
            }
            let w = edge_vec(&cells, g.cell, g.edge);
            let w2 = edge_vec(&cells, g.other_cell, g.other_edge);
            let half_turn = if w2 == -w {
                false
            } else if w2 == w {
                if kind == Kind::Abelian {
                    return Err(Error::GluingDirection { cell: g.cell, edge: g.edge, kind: kind.name() });
                }
                true
            } else if w.norm2() != w2.norm2() {
                return Err(Error::EdgeLengthMismatch { cell: g.cell, edge: g.edge });
            } else {
                return Err(Error::GluingDirection { cell: g.cell, edge: g.edge, kind: kind.name() });
            };
            for (c, k, oc, ok) in [
                (g.cell, g.edge, g.other_cell, g.other_edge),
                (g.other_cell, g.other_edge, g.cell, g.edge),
            ] {
                if partner[c][k].is_some() {
                    return Err(Error::Matching(format!("edge ({c},{k}) glued twice")));
                }
                partner[c][k] = Some((oc, ok, half_turn));
            }
        }
        let partner: Vec<Vec<(usize, usize, bool)>> = partner
            .into_iter()
            .enumerate()
            .map(|(c, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(k, p)| p.ok_or_else(|| Error::Matching(format!("edge ({c},{k}) is unglued"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        // vertex classes
        let offsets: Vec<usize> = cells
            .iter()
            .scan(0, |acc, c| {
                let o = *acc;
                *acc += c.len();
                Some(o)
            })
            .collect();
        let total: usize = cells.iter().map(|c| c.len()).sum();
        let mut uf = UnionFind((0..total).collect());
        for (c, row) in partner.iter().enumerate() {
            let n = cells[c].len();
            for (k, &(oc, ok, _)) in row.iter().enumerate() {
                let m = cells[oc].len();
                uf.union(offsets[c] + k, offsets[oc] + (ok + 1) % m);
                uf.union(offsets[c] + (k + 1) % n, offsets[oc] + ok);
            }
        }
        let mut root_to_class = BTreeMap::new();
        let mut class_of: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
        for (c, pts) in cells.iter().enumerate() {
            let mut row = Vec::with_capacity(pts.len());
            for k in 0..pts.len() {
                let r = uf.find(offsets[c] + k);
                let next = root_to_class.len();
                row.push(*root_to_class.entry(r).or_insert(next));
            }
            class_of.push(row);
        }
        let num_classes = root_to_class.len();

        let mut cell_tris = Vec::with_capacity(cells.len());
        for (c, pts) in cells.iter().enumerate() {
            cell_tris.push(
                triangulate_polygon(pts)
                    .map_err(|reason| Error::DegeneratePolygon { cell: c, reason })?,
            );
        }
        let mesh = build_mesh(&cells, &cell_tris, &partner, &class_of, num_classes);

        let mut cones = Vec::with_capacity(num_classes);
        for cls in 0..num_classes {
            let k = cone_angle_multiple(&mesh, cls);
            let order = match kind {
                Kind::Quadratic => k - 2,
                Kind::Abelian => {
                    if k % 2 != 0 {
                        return Err(Error::ConeAngle { class: cls, multiple: k, kind: kind.name() });
                    }
                    k / 2 - 1
                }
            };
            if k < 1 {
                return Err(Error::ConeAngle { class: cls, multiple: k, kind: kind.name() });
            }
            cones.push(ConePoint { class: cls, name: String::new(), angle_pi: k, order, marked: false });
        }

        let mut surface = FlatSurface {
            kind,
            field,
            cells,
            partner,
            markings: Vec::new(),
            class_of,
            cones,
            mesh,
            involution: None,
            cover: None,
        };
        for m in &markings {
            if m.cell >= surface.cells.len() || !point_in_polygon(&m.pos, &surface.cells[m.cell]) {
                return Err(Error::Marking(m.name.clone()));
            }
            if m.puncture {
                match surface.locate(m.cell, &m.pos) {
                    Some(Location::Vertex(v)) => surface.cones[v].marked = true,
                    _ => return Err(Error::Marking(m.name.clone())),
                }
            }
        }
        surface.markings = markings;
        surface.assign_default_names();
        surface.check_gauss_bonnet()?;
        Ok(surface)
    }

    fn assign_default_names(&mut self) {
        let (mut z, mut p, mut r) = (0, 0, 0);
        let punct: BTreeMap<usize, String> = self
            .markings
            .iter()
            .filter(|m| m.puncture)
            .filter_map(|m| match self.locate(m.cell, &m.pos) {
                Some(Location::Vertex(v)) => Some((v, m.name.clone())),
                _ => None,
            })
            .collect();
        for c in &mut self.cones {
            c.name = if let Some(n) = punct.get(&c.class) {
                n.clone()
            } else if c.is_pole() {
                p += 1;
                format!("p{p}")
            } else if c.is_regular() {
                r += 1;
                format!("r{r}")
            } else {
                z += 1;
                format!("z{z}")
            };
        }
    }

    fn check_gauss_bonnet(&self) -> Result<()> {
        let chi = self.euler_characteristic();
        let sum: i64 = self.cones.iter().map(|c| c.order).sum();
        let expected = match self.kind {
            Kind::Quadratic => -2 * chi,
            Kind::Abelian => -chi,
        };
        if sum != expected {
            return Err(Error::Matching(format!(
                "Gauss-Bonnet fails: orders sum to {sum}, Euler characteristic {chi}"
            )));
        }
        Ok(())
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn cells(&self) -> &[Vec<Vec2>] {
        &self.cells
    }

    pub fn markings(&self) -> &[Marking] {
        &self.markings
    }

    pub fn cones(&self) -> &[ConePoint] {
        &self.cones
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn involution(&self) -> Option<&Involution> {
        self.involution.as_ref()
    }

    pub fn cover_info(&self) -> Option<&CoverInfo> {
        self.cover.as_ref()
    }

    pub(crate) fn set_involution(&mut self, inv: Involution) {
        self.involution = Some(inv);
    }

    pub(crate) fn set_cover_info(&mut self, info: CoverInfo) {
        self.cover = Some(info);
    }

    pub(crate) fn set_cone_name(&mut self, class: usize, name: String) {
        self.cones[class].name = name;
    }

    /// Marks vertex `class` as a puncture named after its cone point.
    pub(crate) fn add_puncture(&mut self, class: usize) {
        if self.cones[class].marked {
            return;
        }
        let (cell, k) = self
            .class_of
            .iter()
            .enumerate()
            .find_map(|(c, row)| row.iter().position(|&v| v == class).map(|k| (c, k)))
            .expect("every class has a corner");
        let pos = self.cells[cell][k];
        self.markings.push(Marking::puncture(self.cones[class].name.clone(), cell, pos));
        self.cones[class].marked = true;
    }

    /// Drops the puncture at the vertex named `name`, so that flow passes through it.
    pub fn forget_puncture(&mut self, name: &str) -> Result<()> {
        let class = self.cone_by_name(name).ok_or_else(|| Error::UnknownPoint(name.into()))?.class;
        let keep: Vec<Marking> = self
            .markings
            .iter()
            .filter(|m| {
                !(m.puncture && matches!(self.locate(m.cell, &m.pos), Some(Location::Vertex(v)) if v == class))
            })
            .cloned()
            .collect();
        self.markings = keep;
        self.cones[class].marked = false;
        Ok(())
    }

    /// Glued partner of polygon edge `(cell, edge)` and whether the gluing is a half-turn.
    pub fn partner(&self, cell: usize, edge: usize) -> (usize, usize, bool) {
        self.partner[cell][edge]
    }

    pub fn vertex_class(&self, cell: usize, corner: usize) -> usize {
        self.class_of[cell][corner]
    }

    pub fn num_vertices(&self) -> usize {
        self.cones.len()
    }

    pub fn cone_by_name(&self, name: &str) -> Option<&ConePoint> {
        self.cones.iter().find(|c| c.name == name)
    }

    pub fn marking(&self, name: &str) -> Option<&Marking> {
        self.markings.iter().find(|m| m.name == name)
    }

    /// Gluing list with each pair listed once, smaller slot first.
    pub fn gluings(&self) -> Vec<Gluing> {
        let mut out = Vec::new();
        for (c, row) in self.partner.iter().enumerate() {
            for (k, &(oc, ok, _)) in row.iter().enumerate() {
                if (c, k) < (oc, ok) {
                    out.push(Gluing::new(c, k, oc, ok));
                }
            }
        }
        out
    }

    pub fn area(&self) -> Scalar {
        let twice: Scalar = self.cells.iter().map(|c| signed_area2(c)).sum();
        twice * Scalar::ratio(1, 2)
    }

    /// `V - E + F` of the polygon complex.
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.cones.len() as i64;
        let e = self.partner.iter().map(|r| r.len()).sum::<usize>() as i64 / 2;
        let f = self.cells.len() as i64;
        v - e + f
    }

    pub fn genus(&self) -> i64 {
        1 - self.euler_characteristic() / 2
    }

    pub fn stratum_signature(&self) -> StratumSignature {
        let mut orders: Vec<i64> =
            self.cones.iter().filter(|c| !c.is_regular()).map(|c| c.order).collect();
        orders.sort_unstable_by(|a, b| b.cmp(a));
        StratumSignature {
            kind: self.kind,
            orders,
            marked_points: self.cones.iter().filter(|c| c.is_regular() && c.marked).count(),
            genus: self.genus(),
        }
    }

    /// Locates a point of cell `cell` in the triangulation.
    pub fn locate(&self, cell: usize, p: &Vec2) -> Option<Location> {
        for (ti, t) in self.mesh.tris.iter().enumerate() {
            if t.cell != cell || !in_triangle(p, &t.v[0], &t.v[1], &t.v[2]) {
                continue;
            }
            for j in 0..3 {
                if t.v[j] == *p {
                    return Some(Location::Vertex(t.class[j]));
                }
            }
            for j in 0..3 {
                if orient(&t.v[j], &t.v[(j + 1) % 3], p) == 0 {
                    let w = t.edge(j);
                    let tt = (*p - t.v[j]).dot(&w) / w.norm2();
                    return Some(Location::Edge { tri: ti, edge: j, t: tt });
                }
            }
            return Some(Location::Interior { tri: ti });
        }
        None
    }

    /// Identity of a surface point as a canonical key (vertex class, or key-side edge
    /// parameter, or triangle plus coordinates).
    pub fn point_key(&self, cell: usize, p: &Vec2) -> Option<PointKey> {
        Some(match self.locate(cell, p)? {
            Location::Vertex(v) => PointKey::Vertex(v),
            Location::Edge { tri, edge, t } => {
                let e = self.mesh.edge_id[tri][edge];
                let t = if self.mesh.is_key_side(tri, edge) { t } else { Scalar::one() - t };
                PointKey::Edge(e, t)
            }
            Location::Interior { tri } => PointKey::Interior(tri, *p),
        })
    }

    /// Sets whole-surface provenance when rebuilding from JSON.
    pub(crate) fn restore(&mut self, names: Option<Vec<String>>, cover: Option<CoverInfo>) {
        if let Some(names) = names {
            for (c, n) in self.cones.iter_mut().zip(names) {
                c.name = n;
            }
        }
        self.cover = cover;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PointKey {
    Vertex(usize),
    Edge(usize, Scalar),
    Interior(usize, Vec2),
}

fn edge_vec(cells: &[Vec<Vec2>], c: usize, k: usize) -> Vec2 {
    let n = cells[c].len();
    cells[c][(k + 1) % n] - cells[c][k]
}

/// Cone angle of a vertex class in units of π, by counting how often the line through
/// a reference direction is swept while turning once around the vertex.
fn cone_angle_multiple(mesh: &Mesh, class: usize) -> i64 {
    let cyc = &mesh.corners[class];
    let first = cyc[0];
    let t0 = &mesh.tris[first.tri];
    let c0 = first.corner as usize;
    let r = t0.v[(c0 + 1) % 3] - t0.v[c0];
    let mut count = 0;
    for corner in cyc {
        let t = &mesh.tris[corner.tri];
        let c = corner.corner as usize;
        let s = Scalar::int(corner.sign as i128);
        let e1 = (t.v[(c + 1) % 3] - t.v[c]).scale(s);
        let e2 = (t.v[(c + 2) % 3] - t.v[c]).scale(s);
        for u in [r, -r] {
            let strictly = e1.cross(&u).signum() > 0 && u.cross(&e2).signum() > 0;
            let at_end = u.cross(&e2).signum() == 0 && u.dot(&e2).signum() > 0;
            if strictly || at_end {
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{from_json, to_json};
    use crate::templates;

    fn pts(v: &[(i128, i128)]) -> Vec<Vec2> {
        v.iter().map(|&(x, y)| Vec2::int(x, y)).collect()
    }

    fn l_polygon(a: Scalar, b: Scalar) -> FlatSurface {
        let (o, one) = (Scalar::zero(), Scalar::one());
        let (x, y) = (one - a, one - b);
        let v = Vec2::new;
        let cell = vec![v(o, o), v(x, o), v(one, o), v(one, y), v(x, y), v(x, one), v(o, one), v(o, y)];
        let gluings =
            [Gluing::new(0, 0, 0, 5), Gluing::new(0, 1, 0, 3), Gluing::new(0, 2, 0, 7), Gluing::new(0, 4, 0, 6)];
        FlatSurface::build(vec![cell], &gluings, Kind::Abelian, vec![]).unwrap()
    }

    #[test]
    fn single_l_polygon_has_one_six_pi_point() {
        let s = l_polygon(Scalar::ratio(1, 2), Scalar::ratio(1, 2));
        let singular: Vec<_> = s.cones().iter().filter(|c| !c.is_regular()).collect();
        assert_eq!(singular.len(), 1);
        assert_eq!(singular[0].angle_pi, 6);
        assert_eq!(s.stratum_signature().to_string(), "H(2)");
        assert_eq!(s.area(), Scalar::ratio(3, 4));
    }

    #[test]
    fn rejects_bad_gluings() {
        let sq = pts(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let half_turn = [Gluing::new(0, 0, 0, 1), Gluing::new(0, 2, 0, 3)];
        assert!(matches!(
            FlatSurface::build(vec![sq.clone()], &half_turn, Kind::Abelian, vec![]),
            Err(Error::GluingDirection { .. })
        ));
        let rect = pts(&[(0, 0), (2, 0), (2, 1), (0, 1)]);
        assert!(matches!(
            FlatSurface::build(vec![rect], &half_turn, Kind::Abelian, vec![]),
            Err(Error::EdgeLengthMismatch { .. })
        ));
        assert!(matches!(
            FlatSurface::build(vec![sq.clone()], &[Gluing::new(0, 0, 0, 2)], Kind::Abelian, vec![]),
            Err(Error::Matching(_))
        ));
        let mixed = vec![Vec2::new(Scalar::zero(), Scalar::zero()), Vec2::new("√2".parse().unwrap(), Scalar::zero()), Vec2::new(Scalar::zero(), "√3".parse().unwrap())];
        assert!(matches!(
            FlatSurface::build(vec![mixed], &[], Kind::Abelian, vec![]),
            Err(Error::MixedFields)
        ));
        let flat = pts(&[(0, 0), (1, 0), (2, 0)]);
        assert!(matches!(
            FlatSurface::build(vec![flat], &[], Kind::Abelian, vec![]),
            Err(Error::DegeneratePolygon { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        for s in [
            templates::torus(),
            templates::pillowcase(),
            templates::q_template(2).unwrap(),
            templates::golden_lab(),
        ] {
            let text = to_json(&s);
            let back = from_json(&text).unwrap();
            assert_eq!(to_json(&back), text);
            assert_eq!(back.gluings(), s.gluings());
        }
    }

    #[test]
    fn locates_vertices_edges_and_interiors() {
        let t = templates::torus();
        assert!(matches!(t.locate(0, &Vec2::int(1, 1)), Some(Location::Vertex(0))));
        let mid = Vec2::new(Scalar::ratio(1, 2), Scalar::zero());
        let top = Vec2::new(Scalar::ratio(1, 2), Scalar::one());
        assert_eq!(t.point_key(0, &mid), t.point_key(0, &top));
        assert!(matches!(t.point_key(0, &mid), Some(PointKey::Edge(..))));
    }
}
