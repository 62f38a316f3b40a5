use proptest::prelude::*;

use flatcount::coverings::ramified_double_cover;
use flatcount::enumerate::cylinders_in_direction;
use flatcount::{io, templates, FlatSurface, Scalar, StratumSignature, Vec2};

fn rational() -> impl Strategy<Value = Scalar> {
    (-1000i128..=1000, 1i128..=60).prop_map(|(n, d)| Scalar::ratio(n, d))
}

fn in_field(d: u32) -> impl Strategy<Value = Scalar> {
    (rational(), rational()).prop_map(move |(a, b)| {
        Scalar::quadratic(a.as_rational().unwrap(), b.as_rational().unwrap(), d).unwrap()
    })
}

fn scalar() -> impl Strategy<Value = Scalar> {
    prop_oneof![rational(), in_field(2), in_field(5)]
}

/// Three elements of one field.
fn triple() -> impl Strategy<Value = (Scalar, Scalar, Scalar)> {
    prop_oneof![(rational(), rational(), rational()), (in_field(5), in_field(5), in_field(5)), (in_field(3), in_field(3), rational())]
}

fn isqrt(n: u128) -> u128 {
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Sign of `p/q + (r/s)√d` from bracketing `√d·10^k` between consecutive integers.
fn sign_oracle(p: i128, q: i128, r: i128, s: i128, d: u32) -> i32 {
    for k in [6u32, 10, 14, 17] {
        let scale = 10u128.pow(k);
        let lo = isqrt(d as u128 * scale * scale) as i128;
        let a = p * s * scale as i128;
        let (b_lo, b_hi) = if r * q >= 0 { (r * q * lo, r * q * (lo + 1)) } else { (r * q * (lo + 1), r * q * lo) };
        if a + b_lo > 0 {
            return 1;
        }
        if a + b_hi < 0 {
            return -1;
        }
        if p == 0 && r == 0 {
            return 0;
        }
    }
    panic!("undecided at 10^17 for {p}/{q} + {r}/{s}·√{d}");
}

/// Values `x - y√d` with `x` the integer nearest to `y√d`: tiny, with either sign.
fn near_cancellation() -> impl Strategy<Value = (i128, i128, i128, i128, u32)> {
    (prop::sample::select(vec![2u32, 3, 5, 6, 7, 10, 13, 29]), 1i128..2_000_000, -2i128..=2, 1i128..50).prop_map(
        |(d, y, off, q)| {
            let x = ((y as f64) * (d as f64).sqrt()).round() as i128 + off;
            (x * q, q, -y, 1, d)
        },
    )
}

fn generic_pair() -> impl Strategy<Value = (i128, i128, i128, i128, u32)> {
    (-10i128.pow(6)..10i128.pow(6), 1i128..1000, -10i128.pow(6)..10i128.pow(6), 1i128..1000, prop::sample::select(vec![2u32, 3, 5, 7, 11]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn field_laws((a, b, c) in triple()) {
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a - a, Scalar::zero());
        if !b.is_zero() {
            prop_assert_eq!(a / b * b, a);
            prop_assert_eq!(b * b.inv(), Scalar::one());
        }
    }

    #[test]
    fn order_is_compatible_with_arithmetic((a, b, c) in triple()) {
        prop_assert_eq!(a < b, (b - a).signum() > 0);
        if a <= b {
            prop_assert!(a + c <= b + c);
        }
        prop_assert_eq!((a * b).signum(), a.signum() * b.signum());
        let (fa, fb) = (a.to_f64(), b.to_f64());
        if (fa - fb).abs() > 1e-9 * (1.0 + fa.abs() + fb.abs()) {
            prop_assert_eq!(a < b, fa < fb);
        }
    }

    #[test]
    fn display_parses_back(a in scalar()) {
        let s = a.to_string();
        prop_assert_eq!(s.parse::<Scalar>().unwrap(), a);
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Scalar>(&json).unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5000))]

    #[test]
    fn sign_matches_bracketing_near_cancellation((p, q, r, s, d) in near_cancellation()) {
        let x = Scalar::quadratic(num_rational::Ratio::new(p, q), num_rational::Ratio::new(r, s), d).unwrap();
        prop_assert_eq!(x.signum(), sign_oracle(p, q, r, s, d));
    }

    #[test]
    fn sign_matches_bracketing_generic((p, q, r, s, d) in generic_pair()) {
        let x = Scalar::quadratic(num_rational::Ratio::new(p, q), num_rational::Ratio::new(r, s), d).unwrap();
        prop_assert_eq!(x.signum(), sign_oracle(p, q, r, s, d));
    }
}

fn unit_parameter() -> impl Strategy<Value = Scalar> {
    prop_oneof![
        (1i128..30, 2i128..31).prop_filter_map("in (0,1)", |(n, d)| (n < d).then(|| Scalar::ratio(n, d))),
        // (3-√5)/2 scaled into (0,1) by a rational factor
        (1i128..10).prop_map(|k| "3/2-1/2√5".parse::<Scalar>().unwrap() * Scalar::ratio(k, 10)),
    ]
}

fn json_round_trip(s: &FlatSurface) -> Result<(), TestCaseError> {
    let text = io::to_json(s);
    let back = io::from_json(&text).unwrap();
    prop_assert_eq!(io::to_json(&back), text);
    prop_assert_eq!(back.stratum_signature(), s.stratum_signature());
    prop_assert_eq!(back.area(), s.area());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lab_json_is_bit_exact(a in unit_parameter(), b in unit_parameter()) {
        json_round_trip(&templates::lab(a, b).unwrap())?;
    }

    #[test]
    fn cover_json_is_bit_exact(d in 1usize..=3, i in 0usize..6, j in 0usize..6) {
        let y = templates::q_template(d).unwrap();
        let names: Vec<String> = y.cones().iter().map(|c| c.name.clone()).collect();
        let (i, j) = (i % names.len(), j % names.len());
        prop_assume!(i != j);
        let c = ramified_double_cover(&y, &names[i], &names[j], None).unwrap();
        json_round_trip(&c.total)?;
    }

    /// Square-tiled surfaces are completely periodic in every rational direction.
    #[test]
    fn rational_directions_fill_square_tiled_lab(a in 1i128..4, b in 1i128..4, x in 0i128..7, y in -6i128..7) {
        prop_assume!(x != 0 || y != 0);
        let s = templates::lab(Scalar::ratio(a, 4), Scalar::ratio(b, 4)).unwrap();
        let v = Vec2::int(x, y);
        let dec = cylinders_in_direction(&s, &v, &(v.norm2() * Scalar::int(400)));
        let covered: Scalar = dec.cylinders.iter().map(|c| c.area).sum();
        prop_assert_eq!(covered, s.area());
    }
}

fn predicted_cover_signature(y: &FlatSurface, a: &str, b: &str) -> StratumSignature {
    let mut orders = Vec::new();
    for c in y.cones() {
        if c.name == a || c.name == b {
            // angle π(d+2) becomes 2π(d+2): order 2d+2
            orders.push(2 * c.order + 2);
        } else {
            orders.extend([c.order, c.order]);
        }
    }
    orders.retain(|&d| d != 0);
    StratumSignature::quadratic(orders)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_ramified_covers(t in 0usize..4, i in 0usize..8, j in 0usize..8) {
        let y = match t {
            0 => templates::pillowcase(),
            k => templates::q_template(k).unwrap(),
        };
        let names: Vec<String> = y.cones().iter().map(|c| c.name.clone()).collect();
        let (i, j) = (i % names.len(), j % names.len());
        prop_assume!(i != j);
        let c = ramified_double_cover(&y, &names[i], &names[j], None).unwrap();
        prop_assert_eq!(c.total.area(), y.area() * Scalar::int(2));
        prop_assert_eq!(c.total.euler_characteristic(), 2 * y.euler_characteristic() - 2);
        let want = predicted_cover_signature(&y, &names[i], &names[j]);
        prop_assert!(c.total.stratum_signature().same_stratum(&want), "{} vs {}", c.total.stratum_signature(), want);
        // deck involution swaps sheets over every base vertex that is not a branch point
        for v in 0..y.num_vertices() {
            let pre = c.preimages(v);
            let branched = names[v] == names[i] || names[v] == names[j];
            prop_assert_eq!(pre.len(), if branched { 1 } else { 2 });
        }
    }
}
