//! Cylinders up to a length bound, filters, weighted counts and lifts through covers.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use super::cylinders::{cylinders_in_direction, Cylinder, DirectionDecomposition};
use super::saddle::saddle_connections_sq;
use crate::coverings::{loop_monodromy, resolve_vertex, CoverType, CoveringMap};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::scalar::Scalar;
use crate::surface::FlatSurface;

/// Shortest saddle-connection holonomy of every direction carrying a connection of squared
/// length at most `bound2`, keyed by direction.
fn directions(surface: &FlatSurface, bound2: &Scalar) -> Vec<Vec2> {
    let mut dirs: BTreeMap<(u8, Scalar), Vec2> = BTreeMap::new();
    for sc in saddle_connections_sq(surface, bound2) {
        dirs.entry(sc.holonomy.direction_key()).or_insert(sc.holonomy);
    }
    dirs.into_values().collect()
}

fn cylinder_key(c: &Cylinder) -> (Scalar, (u8, Scalar), Scalar, Scalar, usize, Scalar, Scalar) {
    (
        c.circumference2,
        c.direction.direction_key(),
        c.area,
        c.height_scaled,
        c.sample.0,
        c.sample.1.x,
        c.sample.1.y,
    )
}

/// Sorts cylinders by circumference, direction, area, height and sample point.
pub fn sort_cylinders(cylinders: &mut [Cylinder]) {
    cylinders.sort_by_cached_key(cylinder_key);
}

/// Every maximal cylinder with squared circumference at most `bound2`, in canonical order.
pub fn cylinders_up_to_sq(surface: &FlatSurface, bound2: &Scalar) -> Vec<Cylinder> {
    cylinders_in_directions(surface, &directions(surface, bound2), bound2)
}

/// Cylinders of squared circumference at most `bound2` in the given directions, in
/// canonical order.
pub fn cylinders_in_directions(surface: &FlatSurface, dirs: &[Vec2], bound2: &Scalar) -> Vec<Cylinder> {
    let mut out: Vec<Cylinder> = dirs
        .par_iter()
        .flat_map_iter(|v| {
            cylinders_in_direction(surface, v, bound2)
                .cylinders
                .into_iter()
                .filter(|c| c.circumference2 <= *bound2)
        })
        .collect();
    sort_cylinders(&mut out);
    out
}

/// Every maximal cylinder of circumference at most `bound`, in canonical order.
pub fn cylinders_up_to(surface: &FlatSurface, bound: &Scalar) -> Vec<Cylinder> {
    cylinders_up_to_sq(surface, &(*bound * *bound))
}

/// Whether the chosen poles `p1`, `p2` lie on the pole boundary of a cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Profile(pub u8, pub u8);

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

fn check_pole(surface: &FlatSurface, p: usize) -> Result<()> {
    match surface.cones().get(p) {
        Some(c) if c.is_pole() => Ok(()),
        Some(c) => Err(Error::UnknownPoint(format!("{} is not a pole", c.name))),
        None => Err(Error::UnknownPoint(format!("vertex {p}"))),
    }
}

/// Profile of `cylinder` with respect to the distinct poles `p1`, `p2` (vertex classes).
pub fn profile_of(surface: &FlatSurface, cylinder: &Cylinder, p1: usize, p2: usize) -> Result<Profile> {
    check_pole(surface, p1)?;
    check_pole(surface, p2)?;
    if p1 == p2 {
        return Err(Error::CoincidentRamification);
    }
    let has = |p| cylinder.pole_set.contains(&p) as u8;
    Ok(Profile(has(p1), has(p2)))
}

/// Marked points and unmarked regular vertices on the core curve of `cylinder`.
pub fn core_marked_points(cylinder: &Cylinder) -> BTreeSet<String> {
    cylinder.core_points.clone()
}

/// Predicate selecting the cylinders that enter a weighted count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Filter {
    All,
    /// Profile with respect to two poles, given by vertex class.
    Profile { p1: usize, p2: usize, profile: Profile },
    /// Both named points lie on the core curve.
    CorePair(String, String),
}

impl Filter {
    /// Parses `all`, `weierstrass-pair` (`w1`,`w2`), `pair:A,B` or `profile:P1,P2,pq`
    /// against the names of `surface`.
    pub fn parse(surface: &FlatSurface, spec: &str) -> Result<Filter> {
        let spec = spec.trim();
        if spec == "all" {
            return Ok(Filter::All);
        }
        if spec == "weierstrass-pair" {
            return Filter::core_pair(surface, "w1", "w2");
        }
        if let Some(rest) = spec.strip_prefix("pair:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if let [a, b] = parts[..] {
                return Filter::core_pair(surface, a, b);
            }
        }
        if let Some(rest) = spec.strip_prefix("profile:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if let [a, b, pq] = parts[..] {
                let p1 = resolve_vertex(surface, a)?;
                let p2 = resolve_vertex(surface, b)?;
                check_pole(surface, p1)?;
                check_pole(surface, p2)?;
                let profile = match pq {
                    "00" => Profile(0, 0),
                    "01" => Profile(0, 1),
                    "10" => Profile(1, 0),
                    "11" => Profile(1, 1),
                    _ => return Err(Error::Parse(format!("profile '{pq}' is not one of 00, 01, 10, 11"))),
                };
                return Ok(Filter::Profile { p1, p2, profile });
            }
        }
        Err(Error::Parse(format!("unknown filter '{spec}'")))
    }

    fn core_pair(surface: &FlatSurface, a: &str, b: &str) -> Result<Filter> {
        let a = crate::coverings::normalize_name(a);
        let b = crate::coverings::normalize_name(b);
        for n in [&a, &b] {
            let known = surface.markings().iter().any(|m| &m.name == n && !m.puncture)
                || surface.cone_by_name(n).is_some_and(|c| c.is_regular() && !c.marked);
            if !known {
                return Err(Error::UnknownPoint(n.clone()));
            }
        }
        if a == b {
            return Err(Error::UnknownPoint(format!("{a} given twice")));
        }
        Ok(Filter::CorePair(a, b))
    }

    pub fn matches(&self, c: &Cylinder) -> bool {
        match self {
            Filter::All => true,
            Filter::Profile { p1, p2, profile } => {
                Profile(c.pole_set.contains(p1) as u8, c.pole_set.contains(p2) as u8) == *profile
            }
            Filter::CorePair(a, b) => c.core_points.contains(a) && c.core_points.contains(b),
        }
    }
}

/// `N(X,L)`: total area of the cylinders in `cylinders` of circumference at most `bound`
/// that pass `filter`, divided by the area of the surface.
pub fn weighted_count_of(surface: &FlatSurface, cylinders: &[Cylinder], bound: &Scalar, filter: &Filter) -> Scalar {
    let b2 = *bound * *bound;
    let total: Scalar =
        cylinders.iter().filter(|c| c.circumference2 <= b2 && filter.matches(c)).map(|c| c.area).sum();
    total / surface.area()
}

/// `N(X,L)` for the cylinders passing `filter`.
pub fn weighted_count(surface: &FlatSurface, bound: &Scalar, filter: &Filter) -> Scalar {
    weighted_count_of(surface, &cylinders_up_to(surface, bound), bound, filter)
}

/// `N(X,L)·Area(X)/(πL²)`, the finite-length estimate of the Siegel–Veech constant of the
/// area-normalized surface.
pub fn normalized_estimate(surface: &FlatSurface, count: &Scalar, bound: &Scalar) -> f64 {
    let l = bound.to_f64();
    count.to_f64() * surface.area().to_f64() / (std::f64::consts::PI * l * l)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub length: Scalar,
    pub count: Scalar,
    pub estimate: f64,
}

/// Weighted counts at each of `lengths`, from cylinders enumerated up to the largest.
pub fn convergence(surface: &FlatSurface, cylinders: &[Cylinder], lengths: &[Scalar], filter: &Filter) -> Vec<ConvergenceRow> {
    lengths
        .iter()
        .map(|l| {
            let count = weighted_count_of(surface, cylinders, l, filter);
            ConvergenceRow { length: *l, estimate: normalized_estimate(surface, &count, l), count }
        })
        .collect()
}

/// The convergence table as CSV with header `L,N,N/(piL^2)`.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("L,N,N/(piL^2)\n");
    for r in rows {
        s.push_str(&format!("{},{},{:.9}\n", r.length, r.count, r.estimate));
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactFloat {
    pub exact: String,
    pub float: f64,
}

impl ExactFloat {
    fn of(x: &Scalar) -> ExactFloat {
        ExactFloat { exact: x.to_string(), float: x.to_f64() }
    }

    fn sqrt_of(x2: &Scalar) -> ExactFloat {
        let exact = match x2.as_rational() {
            Some(q) => {
                let (n, d) = (*q.numer(), *q.denom());
                match (isqrt(n), isqrt(d)) {
                    (Some(a), Some(1)) => a.to_string(),
                    (Some(a), Some(b)) => format!("{a}/{b}"),
                    _ => format!("sqrt({x2})"),
                }
            }
            None => format!("sqrt({x2})"),
        };
        ExactFloat { exact, float: x2.to_f64().sqrt() }
    }
}

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt() as i128;
    (r.saturating_sub(1)..=r + 1).find(|x| x * x == n)
}

/// One line of the enumeration report.
#[derive(Clone, Debug, Serialize)]
pub struct CylinderRecord {
    pub direction: [String; 2],
    pub circumference: ExactFloat,
    pub height: ExactFloat,
    pub area: ExactFloat,
    pub poles: Vec<String>,
    pub profile: Option<Profile>,
    pub core_markings: Vec<String>,
    /// Both boundary components consist of poles only.
    pub double_pole_boundary: bool,
}

impl CylinderRecord {
    /// Report record; the profile is taken with respect to the poles named `p1` and `p2`
    /// when the surface has them.
    pub fn new(surface: &FlatSurface, c: &Cylinder) -> CylinderRecord {
        let cones = surface.cones();
        let pole = |n: &str| surface.cone_by_name(n).filter(|c| c.is_pole()).map(|c| c.class);
        let profile = match (pole("p1"), pole("p2")) {
            (Some(a), Some(b)) => profile_of(surface, c, a, b).ok(),
            _ => None,
        };
        CylinderRecord {
            direction: [c.direction.x.to_string(), c.direction.y.to_string()],
            circumference: ExactFloat::sqrt_of(&c.circumference2),
            height: ExactFloat::sqrt_of(&c.height2),
            area: ExactFloat::of(&c.area),
            poles: c.pole_set.iter().map(|&p| cones[p].name.clone()).collect(),
            profile,
            core_markings: c.core_points.iter().cloned().collect(),
            double_pole_boundary: c.double_pole_boundary,
        }
    }
}

/// JSON lines, one record per cylinder.
pub fn report_json_lines(surface: &FlatSurface, cylinders: &[Cylinder]) -> String {
    let mut s = String::new();
    for c in cylinders {
        s.push_str(&serde_json::to_string(&CylinderRecord::new(surface, c)).expect("record serializes"));
        s.push('\n');
    }
    s
}

/// A cylinder of the total space predicted from a base cylinder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CylinderLift {
    /// Index of the base cylinder in the input list.
    pub base: usize,
    /// `0`: the core lifts to two closed curves; `1`: to one of twice the length.
    pub monodromy: u8,
    pub circumference2: Scalar,
    pub area: Scalar,
}

/// Groups cylinder indices by direction.
fn by_direction(cylinders: &[Cylinder]) -> Vec<(Vec2, Vec<usize>)> {
    let mut groups: BTreeMap<(u8, Scalar), (Vec2, Vec<usize>)> = BTreeMap::new();
    for (i, c) in cylinders.iter().enumerate() {
        groups.entry(c.direction.direction_key()).or_insert_with(|| (c.direction, Vec::new())).1.push(i);
    }
    groups.into_values().collect()
}

/// Index of the cylinder of `dec` that is `c`, or an error when `c` is not a cylinder of
/// the decomposed surface.
fn match_cylinder(surface: &FlatSurface, dec: &DirectionDecomposition, c: &Cylinder) -> Result<usize> {
    let k = dec.cylinder_at(surface, c.sample.0, &c.sample.1).ok_or(Error::ForeignCylinder)?;
    let d = &dec.cylinders[k];
    if d.circumference2 != c.circumference2 || d.area != c.area {
        return Err(Error::ForeignCylinder);
    }
    Ok(k)
}

/// Parity of sheet changes along the core curve of cylinder `k` of `dec`.
fn core_parity(cover: &CoveringMap, dec: &DirectionDecomposition, k: usize) -> u8 {
    let n = dec.core_steps(k).iter().filter(|&&(t, j)| cover.swaps(t, j)).count();
    (n % 2) as u8
}

/// Lifts of base cylinders to the total space of a ramified cover: two copies when the
/// core has trivial monodromy, one cylinder of twice the circumference otherwise. The
/// monodromy is read off the sheet changes along the core and checked against the parity
/// of ramification points on the pole boundary.
pub fn lift_cylinders(cover: &CoveringMap, cylinders: &[Cylinder]) -> Result<Vec<CylinderLift>> {
    if cover.cover_type != CoverType::Ramified {
        return Err(Error::WrongKind("cylinder lifts are defined for ramified covers".into()));
    }
    let base = &cover.base;
    let groups = by_direction(cylinders);
    let per_group: Vec<Result<Vec<CylinderLift>>> = groups
        .par_iter()
        .map(|(v, idx)| {
            let budget = idx.iter().map(|&i| cylinders[i].circumference2).max().expect("nonempty group");
            let dec = cylinders_in_direction(base, v, &budget);
            let mut out = Vec::new();
            for &i in idx {
                let c = &cylinders[i];
                let k = match_cylinder(base, &dec, c)?;
                let monodromy = core_parity(cover, &dec, k);
                if c.pole_set.len() == 2 && !c.double_pole_boundary {
                    debug_assert_eq!(loop_monodromy(cover, &c.pole_set)?, monodromy);
                }
                if monodromy == 0 {
                    for _ in 0..2 {
                        out.push(CylinderLift { base: i, monodromy, circumference2: c.circumference2, area: c.area });
                    }
                } else {
                    out.push(CylinderLift {
                        base: i,
                        monodromy,
                        circumference2: c.circumference2 * Scalar::int(4),
                        area: c.area * Scalar::int(2),
                    });
                }
            }
            Ok(out)
        })
        .collect();
    let mut out = Vec::new();
    for g in per_group {
        out.extend(g?);
    }
    out.sort_by(|a, b| (a.base, &a.circumference2).cmp(&(b.base, &b.circumference2)));
    Ok(out)
}

/// Point of the base surface under a point of the total space.
pub fn project_point(cover: &CoveringMap, cell: usize, pos: &Vec2) -> (usize, Vec2) {
    let (t, sheet) = cover.sheet_of(cell);
    let p = if cover.sheet_sign(sheet) < 0 { -*pos } else { *pos };
    (cover.base.mesh().tris[t].cell, p)
}

/// For every cylinder of the total space, the index of the base cylinder below it among
/// `base_cylinders`, or `None` when that cylinder is not in the list.
pub fn lineage(cover: &CoveringMap, base_cylinders: &[Cylinder], total_cylinders: &[Cylinder]) -> Result<Vec<Option<usize>>> {
    let base = &cover.base;
    let mut all: Vec<Cylinder> = base_cylinders.to_vec();
    all.extend(total_cylinders.iter().cloned());
    let nb = base_cylinders.len();
    let groups = by_direction(&all);
    let per_group: Vec<Result<Vec<(usize, Option<usize>)>>> = groups
        .par_iter()
        .map(|(v, idx)| {
            let budget = idx.iter().map(|&i| all[i].circumference2).max().expect("nonempty group");
            let dec = cylinders_in_direction(base, v, &budget);
            let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
            for &i in idx.iter().filter(|&&i| i < nb) {
                owner.insert(match_cylinder(base, &dec, &all[i])?, i);
            }
            let mut out = Vec::new();
            for &i in idx.iter().filter(|&&i| i >= nb) {
                let (cell, p) = project_point(cover, all[i].sample.0, &all[i].sample.1);
                let k = dec.cylinder_at(base, cell, &p).ok_or(Error::ForeignCylinder)?;
                out.push((i - nb, owner.get(&k).copied()));
            }
            Ok(out)
        })
        .collect();
    let mut res = vec![None; total_cylinders.len()];
    for g in per_group {
        for (i, o) in g? {
            res[i] = o;
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates;

    #[test]
    fn torus_bound_one() {
        let t = templates::torus();
        let c = cylinders_up_to(&t, &Scalar::one());
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|c| c.area == Scalar::one() && c.height2 == Scalar::one()));
        assert_eq!(weighted_count(&t, &Scalar::one(), &Filter::All), Scalar::int(2));
    }

    #[test]
    fn lab_horizontal_area() {
        let s = templates::lab(Scalar::ratio(1, 2), Scalar::ratio(1, 2)).unwrap();
        let c = cylinders_up_to(&s, &Scalar::int(1));
        let horiz: Scalar = c.iter().filter(|c| c.direction.y.is_zero()).map(|c| c.area).sum();
        assert_eq!(horiz, Scalar::ratio(3, 4));
    }

    #[test]
    fn profiles() {
        let s = templates::q_template(1).unwrap();
        let p = |n: &str| s.cone_by_name(n).unwrap().class;
        let c = cylinders_up_to(&s, &Scalar::int(4));
        assert!(!c.is_empty());
        for cyl in &c {
            let pr = profile_of(&s, cyl, p("p1"), p("p2")).unwrap();
            assert_eq!(pr.0 == 1, cyl.pole_set.contains(&p("p1")));
            assert_eq!(pr.1 == 1, cyl.pole_set.contains(&p("p2")));
        }
        assert!(profile_of(&s, &c[0], p("z1"), p("p2")).is_err());
        let f = Filter::parse(&s, "profile:p1,p2,11").unwrap();
        let direct: Scalar = c
            .iter()
            .filter(|x| x.pole_set == BTreeSet::from([p("p1"), p("p2")]))
            .map(|x| x.area)
            .sum();
        assert_eq!(weighted_count_of(&s, &c, &Scalar::int(4), &f), direct / s.area());
    }

    #[test]
    fn filter_parsing() {
        let s = templates::lab(Scalar::ratio(1, 2), Scalar::ratio(1, 2)).unwrap();
        assert_eq!(Filter::parse(&s, "weierstrass-pair").unwrap(), Filter::CorePair("w1".into(), "w2".into()));
        assert!(Filter::parse(&s, "pair:w1,w9").is_err());
        assert!(Filter::parse(&s, "pair:w1,w1").is_err());
        assert!(Filter::parse(&s, "bogus").is_err());
    }

    #[test]
    fn exact_square_roots_in_reports() {
        assert_eq!(ExactFloat::sqrt_of(&Scalar::ratio(9, 4)).exact, "3/2");
        assert_eq!(ExactFloat::sqrt_of(&Scalar::int(5)).exact, "sqrt(5)");
    }
}
