//! Wind-tree billiards: `Z²`-periodic rectangular obstacles, the surface `L(a,b)`, and
//! counts of cylinders whose core passes through two regular Weierstrass points.
//!
//! The fundamental cell is the unit torus with the obstacle `[1-a,1]×[1-b,1]` removed. Its
//! free part is the L-shaped region of the `L(a,b)` template; gluing opposite sides of the
//! obstacle gives the surface itself.

use serde::Serialize;

use crate::coverings::{normalize_name, weierstrass_points};
use crate::enumerate::{cylinders_up_to, normalized_estimate, weighted_count_of, Cylinder, Filter};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::scalar::Scalar;
use crate::surface::FlatSurface;
use crate::svconst::{relative_deviation, SVConstant};
use crate::templates;

/// The limit constant `1/(3π²)` shared by every `L(a,b)` and every pair.
pub fn target_constant() -> SVConstant {
    SVConstant::new(1, 3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindTreeModel {
    pub a: Scalar,
    pub b: Scalar,
}

impl WindTreeModel {
    pub fn new(a: Scalar, b: Scalar) -> Result<WindTreeModel> {
        for (n, v) in [("a", a), ("b", b)] {
            if v.signum() <= 0 || v >= Scalar::one() {
                return Err(Error::Domain(format!("{n} = {v} is outside (0,1)")));
            }
        }
        if a.field().join(b.field()).is_none() {
            return Err(Error::MixedFields);
        }
        Ok(WindTreeModel { a, b })
    }

    /// Free area of the fundamental cell, `1 - ab`.
    pub fn free_area(&self) -> Scalar {
        Scalar::one() - self.a * self.b
    }

    /// Whether `p` (taken mod `Z²`) lies in the open obstacle.
    pub fn in_obstacle(&self, p: &Vec2) -> bool {
        let (x, y) = (frac(p.x), frac(p.y));
        x > Scalar::one() - self.a && y > Scalar::one() - self.b
    }
}

fn frac(t: Scalar) -> Scalar {
    match t.floor_rational() {
        Some(f) => t - Scalar::int(f),
        None => {
            let f = t.to_f64().floor() as i128;
            let mut r = t - Scalar::int(f);
            while r.signum() < 0 {
                r += Scalar::one();
            }
            while r >= Scalar::one() {
                r -= Scalar::one();
            }
            r
        }
    }
}

/// `L(a,b)` with its five regular Weierstrass points marked `w1..w5`, checked against the
/// fixed points of the hyperelliptic involution.
pub fn build_lab_surface(a: Scalar, b: Scalar) -> Result<FlatSurface> {
    WindTreeModel::new(a, b)?;
    let s = templates::lab(a, b)?;
    let wp = weierstrass_points(&s)?;
    let regular: Vec<_> = wp.iter().filter(|w| w.regular).collect();
    if wp.len() != 6 || regular.len() != 5 {
        return Err(Error::Domain(format!("expected 6 Weierstrass points, 5 regular; found {} and {}", wp.len(), regular.len())));
    }
    for k in 1..=5 {
        let name = format!("w{k}");
        if !regular.iter().any(|w| w.name.as_deref() == Some(name.as_str())) {
            return Err(Error::Domain(format!("marking {name} is not a regular Weierstrass point")));
        }
    }
    Ok(s)
}

/// Checks that both names are distinct regular Weierstrass points of `surface`.
pub fn check_pair(surface: &FlatSurface, pair: (&str, &str)) -> Result<(String, String)> {
    let (a, b) = (normalize_name(pair.0), normalize_name(pair.1));
    if a == b {
        return Err(Error::UnknownPoint(format!("{a} given twice")));
    }
    let wp = weierstrass_points(surface)?;
    for n in [&a, &b] {
        if !wp.iter().any(|w| w.regular && w.name.as_deref() == Some(n.as_str())) {
            return Err(Error::UnknownPoint(format!("{n} is not a regular Weierstrass point")));
        }
    }
    Ok((a, b))
}

/// Default pair: the two regular Weierstrass points on the horizontal mid-line of the
/// bottom cylinder.
pub const DEFAULT_PAIR: (&str, &str) = ("w1", "w2");

/// `N(L(a,b), L)` restricted to cylinders whose core passes through both points of `pair`.
pub fn windtree_count(model: &WindTreeModel, bound: &Scalar, pair: (&str, &str)) -> Result<Scalar> {
    let s = build_lab_surface(model.a, model.b)?;
    let (p, q) = check_pair(&s, pair)?;
    let cyl = cylinders_up_to(&s, bound);
    Ok(weighted_count_of(&s, &cyl, bound, &Filter::CorePair(p, q)))
}

/// One row of the wind-tree report.
#[derive(Clone, Debug, Serialize)]
pub struct WindtreeRow {
    pub a: String,
    pub b: String,
    pub pair: String,
    pub length: Scalar,
    pub raw: Scalar,
    /// `N·(1-ab)/(πL²)`.
    pub estimate: f64,
    pub target: f64,
    pub relative_error: f64,
}

/// Report rows at each of `lengths` from cylinders enumerated up to the largest length.
pub fn windtree_rows(
    model: &WindTreeModel,
    surface: &FlatSurface,
    cylinders: &[Cylinder],
    lengths: &[Scalar],
    pair: (&str, &str),
) -> Result<Vec<WindtreeRow>> {
    let (p, q) = check_pair(surface, pair)?;
    let filter = Filter::CorePair(p.clone(), q.clone());
    let target = target_constant();
    Ok(lengths
        .iter()
        .map(|l| {
            let raw = weighted_count_of(surface, cylinders, l, &filter);
            let estimate = normalized_estimate(surface, &raw, l);
            WindtreeRow {
                a: model.a.to_string(),
                b: model.b.to_string(),
                pair: format!("{p}-{q}"),
                length: *l,
                raw,
                estimate,
                target: target.to_f64(),
                relative_error: relative_deviation(estimate, &target),
            }
        })
        .collect())
}

pub fn windtree_csv(rows: &[WindtreeRow]) -> String {
    let mut s = String::from("a,b,pair,L,raw,estimate,target,relative_error\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{:.9},{:.9},{:.6}\n",
            r.a, r.b, r.pair, r.length, r.raw, r.estimate, r.target, r.relative_error
        ));
    }
    s
}

/// A straight piece of a billiard path inside the fundamental cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BilliardSegment {
    pub from: Vec2,
    pub to: Vec2,
    pub dir: Vec2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum BilliardEnd {
    /// The state recurred after flow time `period` (in units of the direction's length).
    Periodic { period: Scalar },
    /// The path hit an obstacle corner.
    Corner { point: Vec2 },
    /// `max_length` was reached first.
    Budget,
}

#[derive(Clone, Debug, Serialize)]
pub struct BilliardTrajectory {
    pub start: Vec2,
    pub direction: Vec2,
    pub segments: Vec<BilliardSegment>,
    pub reflections: usize,
    pub end: BilliardEnd,
}

impl BilliardTrajectory {
    pub fn is_periodic(&self) -> bool {
        matches!(self.end, BilliardEnd::Periodic { .. })
    }

    /// Period length as a float, when periodic.
    pub fn period_length(&self) -> Option<f64> {
        match &self.end {
            BilliardEnd::Periodic { period } => Some(period.to_f64() * self.direction.norm2().to_f64().sqrt()),
            _ => None,
        }
    }

    /// The path unfolded across every reflection: its total displacement.
    pub fn unfolded_displacement(&self) -> Vec2 {
        let d0 = self.direction;
        self.segments.iter().fold(Vec2::zero(), |acc, seg| {
            let w = seg.to - seg.from;
            let sx = if (seg.dir.x.signum() == d0.x.signum()) || d0.x.is_zero() { Scalar::one() } else { -Scalar::one() };
            let sy = if (seg.dir.y.signum() == d0.y.signum()) || d0.y.is_zero() { Scalar::one() } else { -Scalar::one() };
            acc + Vec2::new(w.x * sx, w.y * sy)
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Bottom,
    Right,
    ObstacleBottom,
    ObstacleLeft,
    Top,
    Left,
}

/// Follows a billiard path from `start` in direction `dir` with exact reflections, until
/// the state (point of the cell, direction) recurs, an obstacle corner is hit, or the path
/// is longer than `max_length`.
pub fn billiard_trace(model: &WindTreeModel, start: Vec2, dir: Vec2, max_length: &Scalar) -> Result<BilliardTrajectory> {
    if dir.x.is_zero() && dir.y.is_zero() {
        return Err(Error::Domain("direction is zero".into()));
    }
    if model.in_obstacle(&start) {
        return Err(Error::Domain("start point lies inside the obstacle".into()));
    }
    let (zero, one) = (Scalar::zero(), Scalar::one());
    let (x0, y0) = (one - model.a, one - model.b);
    let p0 = Vec2::new(frac(start.x), frac(start.y));
    let corners = [
        Vec2::new(zero, zero),
        Vec2::new(one, zero),
        Vec2::new(x0, zero),
        Vec2::new(one, y0),
        Vec2::new(x0, y0),
        Vec2::new(x0, one),
        Vec2::new(zero, one),
        Vec2::new(zero, y0),
        Vec2::new(one, one),
    ];
    if corners.contains(&p0) {
        return Ok(BilliardTrajectory { start, direction: dir, segments: vec![], reflections: 0, end: BilliardEnd::Corner { point: p0 } });
    }
    let d2 = dir.norm2();
    let budget2 = *max_length * *max_length;
    let (mut p, mut d) = (p0, dir);
    let mut time = zero;
    let mut segments = Vec::new();
    let mut reflections = 0;
    loop {
        // earliest exit through a side the ray is leaving by
        let mut best: Option<(Scalar, Side)> = None;
        let mut consider = |t: Scalar, side: Side, ok: bool| {
            if ok && t.signum() > 0 && best.as_ref().is_none_or(|(b, _)| t < *b) {
                best = Some((t, side));
            }
        };
        if d.y.signum() < 0 {
            let t = -p.y / d.y;
            let x = p.x + d.x * t;
            consider(t, Side::Bottom, x.signum() >= 0 && x <= one);
        }
        if d.y.signum() > 0 {
            let t = (one - p.y) / d.y;
            let x = p.x + d.x * t;
            consider(t, Side::Top, x.signum() >= 0 && x <= x0);
            let t = (y0 - p.y) / d.y;
            let x = p.x + d.x * t;
            consider(t, Side::ObstacleBottom, x >= x0 && x <= one && p.y < y0);
        }
        if d.x.signum() > 0 {
            let t = (one - p.x) / d.x;
            let y = p.y + d.y * t;
            consider(t, Side::Right, y.signum() >= 0 && y <= y0);
            let t = (x0 - p.x) / d.x;
            let y = p.y + d.y * t;
            consider(t, Side::ObstacleLeft, y >= y0 && y <= one && p.x < x0);
        }
        if d.x.signum() < 0 {
            let t = -p.x / d.x;
            let y = p.y + d.y * t;
            consider(t, Side::Left, y.signum() >= 0 && y <= one);
        }
        let (t, side) = best.ok_or_else(|| Error::Domain("billiard path left the free region".into()))?;
        let q = p + d.scale(t);
        // recurrence: the start state lies on this piece
        if d == dir && time.signum() > 0 {
            let w = p0 - p;
            if w.cross(&d).is_zero() {
                let s = w.dot(&d) / d2;
                if s.signum() >= 0 && s <= t {
                    segments.push(BilliardSegment { from: p, to: p0, dir: d });
                    return Ok(BilliardTrajectory {
                        start,
                        direction: dir,
                        segments,
                        reflections,
                        end: BilliardEnd::Periodic { period: time + s },
                    });
                }
            }
        }
        time += t;
        if time * time * d2 > budget2 {
            return Ok(BilliardTrajectory { start, direction: dir, segments, reflections, end: BilliardEnd::Budget });
        }
        segments.push(BilliardSegment { from: p, to: q, dir: d });
        if corners.contains(&q) {
            return Ok(BilliardTrajectory { start, direction: dir, segments, reflections, end: BilliardEnd::Corner { point: q } });
        }
        match side {
            Side::Bottom if q.x > x0 => {
                d = Vec2::new(d.x, -d.y);
                p = q;
                reflections += 1;
            }
            Side::Bottom => p = Vec2::new(q.x, one),
            Side::Top => p = Vec2::new(q.x, zero),
            Side::Left if q.y > y0 => {
                d = Vec2::new(-d.x, d.y);
                p = q;
                reflections += 1;
            }
            Side::Left => p = Vec2::new(one, q.y),
            Side::Right => p = Vec2::new(zero, q.y),
            Side::ObstacleBottom => {
                d = Vec2::new(d.x, -d.y);
                p = q;
                reflections += 1;
            }
            Side::ObstacleLeft => {
                d = Vec2::new(-d.x, d.y);
                p = q;
                reflections += 1;
            }
        }
        // a start on the cell boundary is met again in its wrapped form
        if d == dir && p == p0 {
            return Ok(BilliardTrajectory { start, direction: dir, segments, reflections, end: BilliardEnd::Periodic { period: time } });
        }
    }
}

/// Outcome of replaying a marked cylinder as a billiard path.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyCheck {
    pub direction: Vec2,
    pub start: Vec2,
    pub periodic: bool,
    pub corner: bool,
    /// Squared ratio of the billiard period to the cylinder circumference.
    pub length_factor2: Option<Scalar>,
}

/// Launches a billiard path from a point of `cylinder` in its direction and reports
/// whether it closes up, together with the ratio of its period to the circumference.
pub fn cross_validate_family(
    model: &WindTreeModel,
    surface: &FlatSurface,
    cylinder: &Cylinder,
    pair: (&str, &str),
) -> Result<FamilyCheck> {
    let (p, q) = check_pair(surface, pair)?;
    if !Filter::CorePair(p, q).matches(cylinder) {
        return Err(Error::Domain("cylinder does not pass the marked-pair filter".into()));
    }
    let v = cylinder.direction;
    let (zero, one) = (Scalar::zero(), Scalar::one());
    let (x0, y0) = (one - model.a, one - model.b);
    let mut start = cylinder.sample.1;
    // obstacle sides are glued to the opposite sides of the square in L(a,b)
    if start.y == y0 && start.x > x0 && v.y.signum() > 0 {
        start = Vec2::new(start.x, zero);
    }
    if start.x == x0 && start.y > y0 && v.x.signum() > 0 {
        start = Vec2::new(zero, start.y);
    }
    let s2 = cylinder.circumference2 / v.norm2();
    let budget = Scalar::int(16) * (cylinder.circumference2.to_f64().sqrt().ceil() as i128 + 1).into();
    let tr = billiard_trace(model, start, v, &budget)?;
    let length_factor2 = match &tr.end {
        BilliardEnd::Periodic { period } => Some(*period * *period / s2),
        _ => None,
    };
    Ok(FamilyCheck {
        direction: v,
        start,
        periodic: tr.is_periodic(),
        corner: matches!(tr.end, BilliardEnd::Corner { .. }),
        length_factor2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Scalar {
        Scalar::ratio(1, 2)
    }

    #[test]
    fn lab_surface_has_marked_weierstrass_points() {
        let s = build_lab_surface(half(), half()).unwrap();
        assert_eq!(s.area(), Scalar::ratio(3, 4));
        assert!(build_lab_surface(Scalar::ratio(1, 3), Scalar::ratio(1, 5)).is_ok());
        assert!(build_lab_surface(Scalar::one(), half()).is_err());
        assert!(check_pair(&s, ("w1", "w9")).is_err());
        assert!(check_pair(&s, ("w1", "w3")).is_ok());
    }

    #[test]
    fn horizontal_shot_between_rows_has_period_one() {
        let m = WindTreeModel::new(half(), half()).unwrap();
        let t = billiard_trace(&m, Vec2::new(Scalar::ratio(1, 5), Scalar::ratio(1, 4)), Vec2::int(1, 0), &Scalar::int(10)).unwrap();
        assert_eq!(t.end, BilliardEnd::Periodic { period: Scalar::one() });
        assert_eq!(t.reflections, 0);
    }

    #[test]
    fn corner_hit_terminates() {
        let m = WindTreeModel::new(half(), half()).unwrap();
        // aims at the obstacle corner (1/2, 1/2)
        let t = billiard_trace(&m, Vec2::new(Scalar::ratio(1, 4), Scalar::ratio(1, 4)), Vec2::int(1, 1), &Scalar::int(10)).unwrap();
        assert!(matches!(t.end, BilliardEnd::Corner { .. }));
        assert!(!t.is_periodic());
        assert!(billiard_trace(&m, Vec2::new(Scalar::ratio(3, 4), Scalar::ratio(3, 4)), Vec2::int(1, 0), &Scalar::one()).is_err());
    }

    #[test]
    fn marked_cylinders_close_up_as_billiard_paths() {
        let m = WindTreeModel::new(half(), half()).unwrap();
        let s = build_lab_surface(m.a, m.b).unwrap();
        let filter = Filter::CorePair("w1".into(), "w2".into());
        let cyl: Vec<_> = cylinders_up_to(&s, &Scalar::int(10)).into_iter().filter(|c| filter.matches(c)).collect();
        assert!(cyl.len() > 10);
        for c in &cyl {
            let r = cross_validate_family(&m, &s, c, DEFAULT_PAIR).unwrap();
            assert!(r.periodic, "{:?}", c.direction);
        }
        let other = cylinders_up_to(&s, &Scalar::int(3)).into_iter().find(|c| !filter.matches(c)).unwrap();
        assert!(cross_validate_family(&m, &s, &other, DEFAULT_PAIR).is_err());
    }

    #[test]
    fn reflections_unfold_to_a_straight_segment() {
        let m = WindTreeModel::new(Scalar::ratio(1, 3), Scalar::ratio(1, 5)).unwrap();
        let dir = Vec2::int(3, 7);
        let t = billiard_trace(&m, Vec2::new(Scalar::ratio(1, 7), Scalar::ratio(1, 11)), dir, &Scalar::int(40)).unwrap();
        assert!(t.reflections > 0);
        let disp = t.unfolded_displacement();
        assert!(disp.cross(&dir).is_zero());
        let total: Scalar = t.segments.iter().map(|s| (s.to - s.from).dot(&s.dir) / s.dir.norm2()).sum();
        assert_eq!(disp, dir.scale(total));
    }
}
