use flatcount::coverings::{loop_monodromy, ramified_double_cover};
use flatcount::enumerate::{cylinders_in_directions, cylinders_up_to, lift_cylinders, lineage};
use flatcount::Vec2;
use flatcount::{templates, Scalar};

fn check_lift_identity(a: &str, b: &str, bound: i128) {
    let y = templates::q_template(1).unwrap();
    let cover = ramified_double_cover(&y, a, b, None).unwrap();
    let base = cylinders_up_to(&y, &Scalar::int(bound));
    let mut predicted: Vec<(Scalar, Scalar)> =
        lift_cylinders(&cover, &base).unwrap().into_iter().map(|l| (l.circumference2, l.area)).collect();
    // a lift lies in the direction of the cylinder below it
    let mut dirs: Vec<Vec2> = base.iter().map(|c| c.direction).collect();
    dirs.sort_by_key(|v| v.direction_key());
    dirs.dedup_by_key(|v| v.direction_key());
    let total = cylinders_in_directions(&cover.total, &dirs, &Scalar::int(4 * bound * bound));
    let owners = lineage(&cover, &base, &total).unwrap();
    let mut actual: Vec<(Scalar, Scalar)> = total
        .iter()
        .zip(&owners)
        .filter(|(_, o)| o.is_some())
        .map(|(c, _)| (c.circumference2, c.area))
        .collect();
    predicted.sort();
    actual.sort();
    assert_eq!(predicted, actual, "cover over {a},{b} at bound {bound}");
    for l in lift_cylinders(&cover, &base).unwrap() {
        let c = &base[l.base];
        if c.pole_set.len() == 2 {
            assert_eq!(loop_monodromy(&cover, &c.pole_set).unwrap(), l.monodromy);
        }
    }
}

#[test]
fn lifts_through_cover_branched_at_zero_and_first_pole() {
    for b in [5, 12, 20] {
        check_lift_identity("z1", "p1", b);
    }
}

#[test]
fn lifts_through_cover_branched_at_zero_and_second_pole() {
    for b in [5, 12, 20] {
        check_lift_identity("z1", "p2", b);
    }
}

#[test]
fn lifts_through_cover_branched_at_two_poles() {
    for b in [5, 12, 20] {
        check_lift_identity("p1", "p2", b);
    }
}
