use flatcount::checks::windtree_estimate;
use flatcount::coverings::{orientation_double_cover, weierstrass_points};
use flatcount::enumerate::cylinders_up_to;
use flatcount::windtree::target_constant;
use flatcount::{templates, FlatSurface, Scalar};

fn is_pole(s: &FlatSurface, v: usize) -> bool {
    s.cones()[v].order == -1
}

/// A boundary component that is a single pole-to-pole connection, traversed twice.
fn has_pole_side(s: &FlatSurface, bound: i128) -> bool {
    cylinders_up_to(s, &Scalar::int(bound)).iter().any(|c| {
        c.boundary.iter().any(|side| side.len() == 2 && side[0] != side[1] && side.iter().all(|&v| is_pole(s, v)))
    })
}

#[test]
fn folded_polygons_have_pole_sided_cylinders() {
    for d in 1..=2 {
        let y = templates::q_template(d).unwrap();
        assert!(has_pole_side(&y, 10), "q_template({d})");
    }
}

/// The hyperelliptic involution of a genus-2 surface turns each cylinder by a half-turn,
/// fixing exactly two points on its core. In H(2) both are regular.
#[test]
fn genus_two_cores_meet_two_weierstrass_points() {
    let y = templates::q_template(1).unwrap();
    let cover = orientation_double_cover(&y).unwrap();
    let x = &cover.total;
    assert_eq!(x.stratum_signature().to_string(), "H(2)");
    let regular: Vec<String> =
        weierstrass_points(x).unwrap().into_iter().filter(|w| w.regular).filter_map(|w| w.name).collect();
    assert_eq!(regular.len(), 5);
    let cyl = cylinders_up_to(x, &Scalar::int(10));
    assert!(!cyl.is_empty());
    for c in &cyl {
        let on_core = regular.iter().filter(|n| c.core_points.contains(*n)).count();
        assert_eq!(on_core, 2, "cylinder {:?} core {:?}", c.direction, c.core_points);
    }
}

fn grid_estimates(values: &[Scalar], length: i128) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for &a in values {
        for &b in values {
            let (e, _) = windtree_estimate(a, b, length, 1).unwrap();
            out.push((format!("L({a},{b})"), e));
        }
    }
    out
}

/// Each estimate within `tolerance` of the target and max/min - 1 below `spread`.
fn assert_non_varying(est: &[(String, f64)], tolerance: f64, spread: f64) {
    let target = target_constant().to_f64();
    for (name, e) in est {
        assert!((e / target - 1.0).abs() < tolerance, "{name}: {e} vs {target}");
    }
    let lo = est.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    let hi = est.iter().map(|x| x.1).fold(0.0, f64::max);
    assert!(hi / lo < 1.0 + spread, "spread {lo}..{hi}");
}

#[test]
fn pair_counts_agree_across_obstacle_grid() {
    let values = [Scalar::ratio(1, 3), Scalar::ratio(1, 2), Scalar::ratio(2, 3)];
    assert_non_varying(&grid_estimates(&values, 20), 0.15, 0.2);
}

/// Slow: about ten minutes in release.
#[test]
#[ignore]
fn pair_counts_agree_across_fine_grid() {
    let values: Vec<Scalar> = (1..=4).map(|k| Scalar::ratio(k, 5)).chain([Scalar::ratio(1, 2)]).collect();
    assert_non_varying(&grid_estimates(&values, 20), 0.2, 0.25);
}
