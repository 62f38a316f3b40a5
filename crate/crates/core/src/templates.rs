//! Builtin surfaces with fixed polygon gluings.

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::scalar::Scalar;
use crate::surface::{FlatSurface, Gluing, Involution, Kind, Marking};

fn pts(v: &[(i128, i128)]) -> Vec<Vec2> {
    v.iter().map(|&(x, y)| Vec2::int(x, y)).collect()
}

/// Unit square with opposite sides identified and its corner marked as `o`.
pub fn torus() -> FlatSurface {
    let cells = vec![pts(&[(0, 0), (1, 0), (1, 1), (0, 1)])];
    let gluings = [Gluing::new(0, 0, 0, 2), Gluing::new(0, 1, 0, 3)];
    let marks = vec![Marking::puncture("o", 0, Vec2::zero())];
    FlatSurface::build(cells, &gluings, Kind::Abelian, marks).expect("torus template")
}

/// Front and back unit squares glued along the boundary: horizontal sides by half-turns,
/// vertical sides by translations. The four corners are poles.
pub fn pillowcase() -> FlatSurface {
    let sq = pts(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
    let cells = vec![sq.clone(), sq];
    let gluings =
        [Gluing::new(0, 0, 1, 0), Gluing::new(0, 1, 1, 3), Gluing::new(0, 2, 1, 2), Gluing::new(0, 3, 1, 1)];
    FlatSurface::build(cells, &gluings, Kind::Quadratic, vec![]).expect("pillowcase template")
}

/// Convex lattice polygon with `n` vertices used by [`q_template`].
fn q_polygon(d: usize) -> Vec<Vec2> {
    match d {
        1 => pts(&[(0, 0), (2, 0), (2, 1), (1, 2), (0, 1)]),
        2 => pts(&[(0, 0), (2, 0), (3, 1), (2, 2), (0, 2), (-1, 1)]),
        _ => {
            let n = d as i128 + 4;
            (0..n).map(|i| Vec2::int(i, i * i)).collect()
        }
    }
}

/// A surface in `Q(d, -1^{d+4})`: a convex `(d+4)`-gon with every side folded onto itself
/// by a half-turn about its midpoint. The corners form the zero `z1`; the midpoint of side
/// `k` is the pole `p{k+1}`.
pub fn q_template(d: usize) -> Result<FlatSurface> {
    if d < 1 {
        return Err(Error::Domain(format!("q-template needs d >= 1, got {d}")));
    }
    let poly = q_polygon(d);
    let n = poly.len();
    let half = Scalar::ratio(1, 2);
    let mut cell = Vec::with_capacity(2 * n);
    for k in 0..n {
        let (a, b) = (poly[k], poly[(k + 1) % n]);
        cell.push(a);
        cell.push((a + b).scale(half));
    }
    let gluings: Vec<Gluing> = (0..n).map(|k| Gluing::new(0, 2 * k, 0, 2 * k + 1)).collect();
    FlatSurface::build(vec![cell], &gluings, Kind::Quadratic, vec![])
}

fn check_unit_interval(name: &str, v: Scalar) -> Result<()> {
    if v.signum() <= 0 || (v - Scalar::one()).signum() >= 0 {
        return Err(Error::Domain(format!("{name} = {v} is outside (0,1)")));
    }
    Ok(())
}

/// `L(a,b)`: the unit square minus its top-right `a×b` block, opposite sides identified.
///
/// Cells are the bottom-left rectangle, the bottom-right rectangle and the top-left
/// rectangle, so that the hyperelliptic involution is the half-turn of each cell about its
/// centre. The five regular Weierstrass points are marked `w1..w5`; `w1`, `w2` lie on the
/// core of the bottom horizontal cylinder.
pub fn lab(a: Scalar, b: Scalar) -> Result<FlatSurface> {
    check_unit_interval("a", a)?;
    check_unit_interval("b", b)?;
    let (o, one) = (Scalar::zero(), Scalar::one());
    let (x, y) = (one - a, one - b);
    let v = Vec2::new;
    let cells = vec![
        vec![v(o, o), v(x, o), v(x, y), v(o, y)],
        vec![v(x, o), v(one, o), v(one, y), v(x, y)],
        vec![v(o, y), v(x, y), v(x, one), v(o, one)],
    ];
    let gluings = [
        Gluing::new(0, 1, 1, 3),
        Gluing::new(0, 3, 1, 1),
        Gluing::new(0, 2, 2, 0),
        Gluing::new(0, 0, 2, 2),
        Gluing::new(1, 0, 1, 2),
        Gluing::new(2, 1, 2, 3),
    ];
    let half = Scalar::ratio(1, 2);
    let markings = vec![
        Marking::new("w1", 0, v(x * half, y * half)),
        Marking::new("w2", 1, v(one - a * half, y * half)),
        Marking::new("w3", 1, v(one - a * half, o)),
        Marking::new("w4", 2, v(x * half, one - b * half)),
        Marking::new("w5", 2, v(o, one - b * half)),
    ];
    let mut s = FlatSurface::build(cells.clone(), &gluings, Kind::Abelian, markings)?;
    let offset = cells
        .iter()
        .map(|c| c[0] + c[2])
        .collect();
    s.set_involution(Involution { cell_map: vec![0, 1, 2], offset, linear: -1 });
    Ok(s)
}

/// `L(a,b)` with `a = b = (3-√5)/2`, so `1/(1-a) = 1/(1-b) = 1/2 + √5/2`.
pub fn golden_lab() -> FlatSurface {
    let a: Scalar = "3/2-1/2√5".parse().expect("golden parameter");
    lab(a, a).expect("golden L")
}

/// Named builtin templates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Template {
    Torus,
    Pillowcase,
    Lab(Scalar, Scalar),
    Q(usize),
}

impl Template {
    pub fn build(&self) -> Result<FlatSurface> {
        match self {
            Template::Torus => Ok(torus()),
            Template::Pillowcase => Ok(pillowcase()),
            Template::Lab(a, b) => lab(*a, *b),
            Template::Q(d) => q_template(*d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::StratumSignature;

    #[test]
    fn torus_is_flat_with_one_marked_point() {
        let t = torus();
        let sig = t.stratum_signature();
        assert_eq!(sig.to_string(), "H(0)");
        assert_eq!(sig.genus, 1);
        assert_eq!(sig.marked_points, 1);
        assert_eq!(t.area(), Scalar::one());
    }

    #[test]
    fn pillowcase_has_four_poles() {
        let p = pillowcase();
        assert_eq!(p.stratum_signature().to_string(), "Q(-1^4)");
        assert_eq!(p.genus(), 0);
        assert!(p.cones().iter().all(|c| c.angle_pi == 1));
    }

    #[test]
    fn q_templates_have_expected_strata() {
        for d in 1..=6 {
            let s = q_template(d).unwrap();
            let mut orders = vec![d as i64];
            orders.extend(std::iter::repeat_n(-1, d + 4));
            assert!(s.stratum_signature().same_stratum(&StratumSignature::quadratic(orders)), "d={d}");
        }
        assert_eq!(q_template(1).unwrap().stratum_signature().to_string(), "Q(1,-1^5)");
        let names: Vec<_> = q_template(1).unwrap().cones().iter().map(|c| c.name.clone()).collect();
        assert_eq!(names, ["z1", "p1", "p2", "p3", "p4", "p5"]);
    }

    #[test]
    fn lab_is_h2() {
        let s = lab(Scalar::ratio(1, 2), Scalar::ratio(1, 2)).unwrap();
        assert_eq!(s.stratum_signature().to_string(), "H(2)");
        assert_eq!(s.genus(), 2);
        assert_eq!(s.area(), Scalar::ratio(3, 4));
        let z: Vec<_> = s.cones().iter().filter(|c| !c.is_regular()).collect();
        assert_eq!(z.len(), 1);
        assert_eq!(z[0].angle_pi, 6);
        assert!(lab(Scalar::ratio(1, 3), Scalar::ratio(1, 5)).is_ok());
        assert!(lab(Scalar::one(), Scalar::ratio(1, 2)).is_err());
    }

    #[test]
    fn golden_lab_lives_in_q_sqrt5() {
        let s = golden_lab();
        assert_eq!(s.field(), crate::scalar::Field::Quadratic(5));
        assert_eq!(s.stratum_signature().to_string(), "H(2)");
        let a: Scalar = "3/2-1/2√5".parse().unwrap();
        assert_eq!((Scalar::one() - a).inv(), "1/2+1/2√5".parse().unwrap());
        assert_eq!(s.area(), Scalar::one() - a * a);
    }
}
