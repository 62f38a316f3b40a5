//! Verification suites shared by the command line and the acceptance tests.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::coverings::{orientation_double_cover, ramified_double_cover, CoveringMap};
use crate::enumerate::{
    cylinders_in_directions, cylinders_up_to, lift_cylinders, lineage, normalized_estimate, saddle_connections,
    weighted_count_of, Filter,
};
use crate::error::Result;
use crate::geometry::Vec2;
use crate::scalar::{Scalar, Q};
use crate::surface::{FlatSurface, StratumSignature};
use crate::svconst::{
    aez_generic_constant, c11_closed_form, configuration_solve, counterexample_averages, cover_constants,
    ekz_constant, Level, SVConstant,
};
use crate::templates;
use crate::windtree::{self, WindTreeModel, WindtreeRow, DEFAULT_PAIR};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    fn timed(name: &str, f: impl FnOnce() -> (bool, String)) -> Check {
        let t = Instant::now();
        let (passed, detail) = f();
        Check { name: name.into(), passed, detail, seconds: t.elapsed().as_secs_f64() }
    }

    fn from_result(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
        Check::timed(name, || f().unwrap_or_else(|e| (false, format!("error: {e}"))))
    }
}

fn quad(zeros: &[i64], poles: usize) -> StratumSignature {
    let mut v = zeros.to_vec();
    v.extend(std::iter::repeat_n(-1, poles));
    StratumSignature::quadratic(v)
}

/// `c11` from the four genus-zero constants equals the closed form for `d = 1..=max_d`, the
/// configurations add up to `c(Y)`, and the lift matches `1/(2g-1)` or `1/(2g)`.
pub fn constants_pipeline(max_d: i64) -> Check {
    Check::from_result("constants pipeline", || {
        let t = Instant::now();
        for d in 1..=max_d {
            let [cy, cy01, cy10, cy11] = cover_constants(d)?;
            let conf = configuration_solve(cy, cy01, cy10, cy11);
            let closed = c11_closed_form(d)?;
            if conf.c11 != closed.sphere || conf.total() != cy {
                return Ok((false, format!("d={d}: c11 = {}, closed form {}", conf.c11, closed.sphere)));
            }
            let g = closed.genus as i128;
            let expect = if d % 2 == 1 { SVConstant::new(1, 2 * g - 1) } else { SVConstant::new(1, 2 * g) };
            if conf.c11.scale(Q::from_integer(2)) != expect {
                return Ok((false, format!("d={d}: lifted {} vs {expect}", conf.c11.scale(Q::from_integer(2)))));
            }
        }
        let secs = t.elapsed().as_secs_f64();
        Ok((secs < 1.0, format!("d=1..{max_d} exact, {secs:.4}s")))
    })
}

/// Spot values of the genus-zero formula.
pub fn ekz_spot_values() -> Check {
    Check::from_result("EKZ spot values", || {
        let cases = [
            (quad(&[1], 5), Level::Base, SVConstant::new(5, 3)),
            (quad(&[1], 5), Level::Cover, SVConstant::new(10, 3)),
            (quad(&[4], 8), Level::Base, SVConstant::new(7, 3)),
            (quad(&[1, 1], 6), Level::Base, SVConstant::new(11, 6)),
        ];
        let mut detail = Vec::new();
        let mut ok = true;
        for (sig, level, want) in cases {
            let got = ekz_constant(&sig, level)?;
            ok &= got == want;
            detail.push(format!("{sig}: {got}"));
        }
        Ok((ok, detail.join("; ")))
    })
}

/// Pole-pair averages on `Y11` and the generic value for `d = 1..=max_d`.
pub fn pole_pair_averages(max_d: i64) -> Check {
    Check::from_result("pole-pair averages", || {
        for d in 1..=max_d {
            let a = counterexample_averages(d)?;
            let di = d as i128;
            let ok = a.family_a == SVConstant::new(1, 2 * (di + 2))
                && a.family_b == SVConstant::new(1, 4 * (di + 2))
                && a.whole == SVConstant::new(1, 2 * (2 * di + 3))
                && a.whole == aez_generic_constant(2 * d + 6)?;
            let pairs = Q::from_integer((2 * di + 4) * (2 * di + 3) / 2);
            let recombined = (Q::from_integer(di + 2) * a.family_a + Q::from_integer(2 * (di + 2) * (di + 1)) * a.family_b)
                .scale(pairs.recip());
            if !ok || recombined != a.whole || a.family_a == a.family_b || a.family_b == a.whole {
                return Ok((false, format!("d={d}: {a:?}")));
            }
        }
        Ok((true, format!("d=1..{max_d} exact")))
    })
}

pub fn constants_suite() -> Vec<Check> {
    vec![constants_pipeline(25), ekz_spot_values(), pole_pair_averages(10)]
}

/// The three covers of `Q(1,-1^5)` branched over `{z1,p2}`, `{z1,p1}` and `{p1,p2}`.
pub fn d1_covers() -> Result<(FlatSurface, [CoveringMap; 3])> {
    let y = templates::q_template(1)?;
    let c01 = ramified_double_cover(&y, "z1", "p2", None)?;
    let c10 = ramified_double_cover(&y, "z1", "p1", None)?;
    let c11 = ramified_double_cover(&y, "p1", "p2", None)?;
    Ok((y, [c01, c10, c11]))
}

/// Predicted lifts and the total-space cylinders above base cylinders of circumference at
/// most `bound`, as sorted `(circumference², area)` lists.
pub fn lift_identity(cover: &CoveringMap, bound: i128) -> Result<(Vec<(Scalar, Scalar)>, Vec<(Scalar, Scalar)>)> {
    let base = cylinders_up_to(&cover.base, &Scalar::int(bound));
    let mut predicted: Vec<(Scalar, Scalar)> =
        lift_cylinders(cover, &base)?.into_iter().map(|l| (l.circumference2, l.area)).collect();
    let mut dirs: Vec<Vec2> = base.iter().map(|c| c.direction).collect();
    dirs.sort_by_key(|v| v.direction_key());
    dirs.dedup_by_key(|v| v.direction_key());
    let total = cylinders_in_directions(&cover.total, &dirs, &Scalar::int(4 * bound * bound));
    let owners = lineage(cover, &base, &total)?;
    let mut actual: Vec<(Scalar, Scalar)> =
        total.iter().zip(&owners).filter(|(_, o)| o.is_some()).map(|(c, _)| (c.circumference2, c.area)).collect();
    predicted.sort();
    actual.sort();
    Ok((predicted, actual))
}

pub fn covers_suite(max_bound: i128) -> Vec<Check> {
    let mut out = vec![Check::from_result("cover strata", || {
        let (y, covers) = d1_covers()?;
        let want = [quad(&[4], 8), quad(&[4], 8), quad(&[1, 1], 6)];
        let mut detail = Vec::new();
        let mut ok = true;
        for (c, w) in covers.iter().zip(&want) {
            let sig = c.total.stratum_signature();
            // Riemann–Hurwitz for a double cover with two branch points
            let chi = 2 * y.euler_characteristic() - 2;
            ok &= sig.same_stratum(w) && c.total.area() == y.area() * Scalar::int(2) && c.total.euler_characteristic() == chi;
            detail.push(format!("{sig} genus {} area {}", sig.genus, c.total.area()));
        }
        let x = orientation_double_cover(&y)?;
        ok &= x.total.stratum_signature().same_stratum(&StratumSignature::abelian(vec![2]));
        detail.push(format!("orientation cover {}", x.total.stratum_signature()));
        Ok((ok, detail.join("; ")))
    })];
    out.push(Check::from_result("lift identity", || {
        let (_, covers) = d1_covers()?;
        let names = ["Y01", "Y10", "Y11"];
        let mut detail = Vec::new();
        for bound in [5, 10, max_bound] {
            for (c, n) in covers.iter().zip(names) {
                let (p, a) = lift_identity(c, bound)?;
                if p != a {
                    return Ok((false, format!("{n} bound {bound}: {} predicted, {} found", p.len(), a.len())));
                }
                if bound == max_bound {
                    detail.push(format!("{n}: {} lifts", p.len()));
                }
            }
        }
        Ok((true, format!("bounds 5, 10, {max_bound}: {}", detail.join(", "))))
    }));
    out
}

/// `Ŷ`, the double cover of `Y11 ∈ Q(d,d,-1^{2d+4})` branched over its two zeros, where
/// `Y11` is itself branched over `p1`, `p2` of the `Q(d,-1^{d+4})` template.
pub fn counterexample_covers(d: usize) -> Result<(CoveringMap, CoveringMap)> {
    let y = templates::q_template(d)?;
    let y11 = ramified_double_cover(&y, "p1", "p2", None)?;
    let mut base = y11.total.clone();
    base.forget_puncture("p1")?;
    base.forget_puncture("p2")?;
    let hat = ramified_double_cover(&base, "z1′", "z1″", None)?;
    Ok((y11, hat))
}

/// Pairs of distinct poles of the total space over the same base pole.
fn is_twin_pair(cover: &CoveringMap, a: usize, b: usize) -> bool {
    a != b && cover.vertex_base[a] == cover.vertex_base[b] && cover.total.cones()[a].is_pole()
}

fn is_pole_pair(cover: &CoveringMap, a: usize, b: usize) -> bool {
    let cones = cover.total.cones();
    a != b && cones[a].is_pole() && cones[b].is_pole()
}

/// Cylinders of circumference at most `bound` with a boundary saddle connection whose
/// endpoints satisfy `pair`: matching saddle connections found, cylinders found.
pub fn pole_pair_cylinders(
    cover: &CoveringMap,
    bound: i128,
    pair: impl Fn(&CoveringMap, usize, usize) -> bool,
) -> (usize, usize) {
    let s = &cover.total;
    let mut dirs: BTreeMap<(u8, Scalar), Vec2> = BTreeMap::new();
    let mut found = 0;
    for sc in saddle_connections(s, &Scalar::int(bound)) {
        if pair(cover, sc.start, sc.end) {
            found += 1;
            dirs.entry(sc.holonomy.direction_key()).or_insert(sc.holonomy);
        }
    }
    // such a cylinder contains the connection, so it lies in one of these directions
    let dirs: Vec<Vec2> = dirs.into_values().collect();
    let cyl = cylinders_in_directions(s, &dirs, &Scalar::int(bound * bound));
    let hits = cyl.iter().filter(|c| c.boundary_connections().iter().any(|&(a, b)| pair(cover, a, b))).count();
    (found, hits)
}

/// Cylinders bounded by a connection joining the two preimages of one pole.
pub fn twin_pole_cylinders(cover: &CoveringMap, bound: i128) -> (usize, usize) {
    pole_pair_cylinders(cover, bound, is_twin_pair)
}

pub fn counterexample_suite(bound: i128) -> Vec<Check> {
    vec![
        Check::from_result("no cylinder on Ŷ bounded by a twin-pole connection", || {
            let (_, hat) = counterexample_covers(1)?;
            let (twins, bad) = twin_pole_cylinders(&hat, bound);
            Ok((bad == 0, format!("{} bound {bound}: {twins} twin-pole connections, {bad} cylinders", hat.total.stratum_signature())))
        }),
        Check::from_result("pole-to-pole cylinders on Ŷ are detected", || {
            let (_, hat) = counterexample_covers(1)?;
            let (conn, found) = pole_pair_cylinders(&hat, 10, is_pole_pair);
            Ok((found > 0, format!("bound 10: {conn} connections between distinct poles, {found} cylinders")))
        }),
    ]
}

/// Lengths used by the wind-tree suite.
#[derive(Clone, Debug)]
pub struct WindtreeSettings {
    pub torus_length: i128,
    pub torus_tolerance: f64,
    pub tolerance: f64,
    /// `(name, a, b, L)` per surface.
    pub surfaces: Vec<(String, Scalar, Scalar, i128)>,
}

impl Default for WindtreeSettings {
    fn default() -> Self {
        let golden: Scalar = "3/2-1/2√5".parse().expect("golden parameter");
        WindtreeSettings {
            torus_length: 100,
            torus_tolerance: 0.02,
            tolerance: 0.15,
            surfaces: vec![
                ("L(1/2,1/2)".into(), Scalar::ratio(1, 2), Scalar::ratio(1, 2), 40),
                ("L(1/3,1/5)".into(), Scalar::ratio(1, 3), Scalar::ratio(1, 5), 30),
                ("golden L".into(), golden, golden, 24),
            ],
        }
    }
}

/// Torus baseline: `N/(πL²)` against `3/π²`.
pub fn torus_estimate(length: i128) -> f64 {
    let t = templates::torus();
    let l = Scalar::int(length);
    let cyl = cylinders_up_to(&t, &l);
    normalized_estimate(&t, &weighted_count_of(&t, &cyl, &l, &Filter::All), &l)
}

/// Estimate of the pair constant on one `L(a,b)` and its report rows.
pub fn windtree_estimate(a: Scalar, b: Scalar, length: i128, steps: i128) -> Result<(f64, Vec<WindtreeRow>)> {
    let model = WindTreeModel::new(a, b)?;
    let s = windtree::build_lab_surface(a, b)?;
    let l = Scalar::int(length);
    let cyl = cylinders_up_to(&s, &l);
    let lengths: Vec<Scalar> = (1..=steps).map(|k| Scalar::ratio(length * k, steps)).collect();
    let rows = windtree::windtree_rows(&model, &s, &cyl, &lengths, DEFAULT_PAIR)?;
    Ok((rows.last().map(|r| r.estimate).unwrap_or(0.0), rows))
}

pub fn windtree_suite(settings: &WindtreeSettings) -> (Vec<Check>, Vec<WindtreeRow>) {
    let mut checks = Vec::new();
    let three_over_pi2 = 3.0 / (std::f64::consts::PI * std::f64::consts::PI);
    checks.push(Check::timed("torus baseline", || {
        let e = torus_estimate(settings.torus_length);
        let dev = (e - three_over_pi2).abs() / three_over_pi2;
        (dev < settings.torus_tolerance, format!("L={}: {e:.6} vs 3/π² = {three_over_pi2:.6} ({:.2}%)", settings.torus_length, 100.0 * dev))
    }));
    let target = windtree::target_constant().to_f64();
    let mut rows = Vec::new();
    let mut estimates = Vec::new();
    for (name, a, b, l) in &settings.surfaces {
        checks.push(Check::from_result(&format!("pair estimate {name}"), || {
            let (e, r) = windtree_estimate(*a, *b, *l, 10)?;
            rows.extend(r);
            estimates.push(e);
            let dev = (e - target).abs() / target;
            Ok((dev < settings.tolerance, format!("L={l}: {e:.6} vs 1/(3π²) = {target:.6} ({:.2}%)", 100.0 * dev)))
        }));
    }
    checks.push(Check::timed("pairwise spread", || {
        let (lo, hi) = estimates.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &e| (lo.min(e), hi.max(e)));
        let spread = if estimates.len() == settings.surfaces.len() && lo > 0.0 { (hi - lo) / lo } else { f64::INFINITY };
        (spread < settings.tolerance, format!("max/min - 1 = {:.2}%", 100.0 * spread))
    }));
    checks.push(Check::from_result("billiard families", || {
        let (a, b) = (Scalar::ratio(1, 2), Scalar::ratio(1, 2));
        let model = WindTreeModel::new(a, b)?;
        let s = windtree::build_lab_surface(a, b)?;
        let filter = Filter::parse(&s, "weierstrass-pair")?;
        let mut factors = BTreeMap::new();
        let mut n = 0;
        for c in cylinders_up_to(&s, &Scalar::int(10)).iter().filter(|c| filter.matches(c)) {
            let r = windtree::cross_validate_family(&model, &s, c, DEFAULT_PAIR)?;
            if !r.periodic {
                return Ok((false, format!("direction {:?} does not close up", c.direction)));
            }
            *factors.entry(r.length_factor2.map(|f| f.to_string()).unwrap_or_default()).or_insert(0) += 1;
            n += 1;
        }
        let f: Vec<String> = factors.iter().map(|(k, v)| format!("{v}× factor² {k}")).collect();
        Ok((n > 0, format!("{n} cylinders up to 10 periodic; {}", f.join(", "))))
    }));
    (checks, rows)
}
