//! Siegel–Veech constants as exact rational multiples of `π^{-2}`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_integer::binomial;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Q;
use crate::surface::{Kind, StratumSignature};

/// The constant `coefficient · π^{-2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SVConstant {
    pub coefficient: Q,
}

impl SVConstant {
    pub fn new(num: i128, den: i128) -> SVConstant {
        SVConstant { coefficient: Q::new(num, den) }
    }

    pub fn from_q(coefficient: Q) -> SVConstant {
        SVConstant { coefficient }
    }

    pub fn zero() -> SVConstant {
        SVConstant::new(0, 1)
    }

    /// Value as a float, `π^{-2}` included.
    pub fn to_f64(&self) -> f64 {
        let c = *self.coefficient.numer() as f64 / *self.coefficient.denom() as f64;
        c / (std::f64::consts::PI * std::f64::consts::PI)
    }

    /// The coefficient as `p/q` (or `p` when integral).
    pub fn rational_string(&self) -> String {
        let c = self.coefficient;
        if c.is_integer() {
            c.numer().to_string()
        } else {
            format!("{}/{}", c.numer(), c.denom())
        }
    }

    pub fn scale(&self, q: Q) -> SVConstant {
        SVConstant::from_q(self.coefficient * q)
    }
}

impl fmt::Display for SVConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·π^-2", self.rational_string())
    }
}

impl Add for SVConstant {
    type Output = SVConstant;
    fn add(self, rhs: SVConstant) -> SVConstant {
        SVConstant::from_q(self.coefficient + rhs.coefficient)
    }
}

impl Sub for SVConstant {
    type Output = SVConstant;
    fn sub(self, rhs: SVConstant) -> SVConstant {
        SVConstant::from_q(self.coefficient - rhs.coefficient)
    }
}

impl Mul<SVConstant> for Q {
    type Output = SVConstant;
    fn mul(self, rhs: SVConstant) -> SVConstant {
        rhs.scale(self)
    }
}

/// Which surface of a genus-zero pair the Eskin–Kontsevich–Zorich constant refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    /// The orientation double cover `X`.
    Cover,
    /// The quadratic differential `Y` itself: half the cover constant.
    Base,
}

/// Cylinder Siegel–Veech constant of a genus-zero stratum of quadratic differentials:
/// `c(X) = -¼ Σ d_j (d_j+4)/(d_j+2)` on the orientation cover, and `c(Y) = c(X)/2`.
pub fn ekz_constant(signature: &StratumSignature, level: Level) -> Result<SVConstant> {
    if signature.kind != Kind::Quadratic {
        return Err(Error::WrongKind("constant needs a quadratic stratum".into()));
    }
    let total: i64 = signature.orders.iter().sum();
    if total != -4 {
        return Err(Error::Domain(format!("orders sum to {total}, not -4: the stratum is not genus zero")));
    }
    let mut sum = Q::from_integer(0);
    for &d in &signature.orders {
        if d == -2 {
            return Err(Error::Domain("order -2 is not allowed".into()));
        }
        let d = d as i128;
        sum += Q::new(d * (d + 4), d + 2);
    }
    let cover = -sum / Q::from_integer(4);
    Ok(SVConstant::from_q(match level {
        Level::Cover => cover,
        Level::Base => cover / Q::from_integer(2),
    }))
}

/// Constants of the four profile configurations on `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConfigurationConstants {
    pub c00: SVConstant,
    pub c01: SVConstant,
    pub c10: SVConstant,
    pub c11: SVConstant,
}

impl ConfigurationConstants {
    pub fn total(&self) -> SVConstant {
        self.c00 + self.c01 + self.c10 + self.c11
    }
}

/// How `c(Y)`, `c(Y01)`, `c(Y10)`, `c(Y11)` decompose over `(c00, c01, c10, c11)`: a
/// configuration contributes twice its constant to a cover when it lifts with trivial
/// monodromy and half of it otherwise.
pub fn configuration_matrix() -> [[Q; 4]; 4] {
    let (one, two, half) = (Q::from_integer(1), Q::from_integer(2), Q::new(1, 2));
    [
        [one, one, one, one],
        [two, two, half, half],
        [two, half, two, half],
        [two, half, half, two],
    ]
}

/// Inverse of [`configuration_matrix`].
pub fn configuration_inverse() -> [[Q; 4]; 4] {
    let r = |v: [i128; 4]| v.map(|x| Q::new(x, 3));
    [r([-3, 1, 1, 1]), r([2, 1, -1, -1]), r([2, -1, 1, -1]), r([2, -1, -1, 1])]
}

/// Recovers the configuration constants from the constants of `Y` and its three covers.
pub fn configuration_solve(cy: SVConstant, cy01: SVConstant, cy10: SVConstant, cy11: SVConstant) -> ConfigurationConstants {
    let inv = configuration_inverse();
    let rhs = [cy, cy01, cy10, cy11];
    let row = |i: usize| {
        (0..4).fold(SVConstant::zero(), |acc, j| acc + inv[i][j] * rhs[j])
    };
    ConfigurationConstants { c00: row(0), c01: row(1), c10: row(2), c11: row(3) }
}

/// Signatures of `Y ∈ Q(d,-1^{d+4})` and of its covers branched over `{z,p2}`, `{z,p1}`
/// and `{p1,p2}`.
pub fn cover_signatures(d: i64) -> Result<[StratumSignature; 4]> {
    if d < 1 {
        return Err(Error::Domain(format!("d = {d} must be at least 1")));
    }
    let q = |zeros: &[i64], poles: i64| {
        let mut v = zeros.to_vec();
        v.extend(std::iter::repeat_n(-1, poles as usize));
        StratumSignature::quadratic(v)
    };
    Ok([q(&[d], d + 4), q(&[2 * d + 2], 2 * d + 6), q(&[2 * d + 2], 2 * d + 6), q(&[d, d], 2 * d + 4)])
}

/// The constants of [`cover_signatures`], each on its own surface.
pub fn cover_constants(d: i64) -> Result<[SVConstant; 4]> {
    let sigs = cover_signatures(d)?;
    let mut out = [SVConstant::zero(); 4];
    for (o, s) in out.iter_mut().zip(&sigs) {
        *o = ekz_constant(s, Level::Base)?;
    }
    Ok(out)
}

/// `c11` on `Y ∈ Q(d,-1^{d+4})` and its lift to the hyperelliptic component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct C11 {
    /// `1/(2(d+2))`.
    pub sphere: SVConstant,
    /// Twice the sphere value, `1/(d+2)`.
    pub lifted: SVConstant,
    /// Genus of the orientation cover.
    pub genus: i64,
    /// The cover lies in `H(2g-2)` (odd `d`) rather than `H(g-1,g-1)`.
    pub single_zero: bool,
}

pub fn c11_closed_form(d: i64) -> Result<C11> {
    if d < 1 {
        return Err(Error::Domain(format!("d = {d} must be at least 1")));
    }
    let d = d as i128;
    let (genus, single_zero) = if d % 2 == 1 { ((d + 3) / 2, true) } else { ((d + 2) / 2, false) };
    Ok(C11 {
        sphere: SVConstant::new(1, 2 * (d + 2)),
        lifted: SVConstant::new(1, d + 2),
        genus: genus as i64,
        single_zero,
    })
}

/// Generic constant for cylinders bounded by a saddle connection joining two given poles
/// in a stratum with `k` singularities: `1/(2(k-3))`.
pub fn aez_generic_constant(k: i64) -> Result<SVConstant> {
    if k < 4 {
        return Err(Error::Domain(format!("k = {k} must be at least 4")));
    }
    Ok(SVConstant::new(1, 2 * (k as i128 - 3)))
}

/// Averages over pole pairs of `Y11 ∈ Q(d,d,-1^{2d+4})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoleAverages {
    /// The `d+2` pairs of preimages of one pole.
    pub family_a: SVConstant,
    /// The `2(d+2)(d+1)` remaining pairs.
    pub family_b: SVConstant,
    /// All `C(2d+4, 2)` pairs.
    pub whole: SVConstant,
}

/// Pole-pair averages on `Y11` computed from the configuration constants of `Y`.
pub fn counterexample_averages(d: i64) -> Result<PoleAverages> {
    let [cy, cy01, cy10, cy11] = cover_constants(d)?;
    let conf = configuration_solve(cy, cy01, cy10, cy11);
    let d = d as i128;
    let half = Q::new(1, 2);
    let a_pairs = Q::from_integer(d + 2);
    let b_pairs = Q::from_integer(2 * (d + 2) * (d + 1));
    let all_pairs = Q::from_integer(binomial(2 * d + 4, 2));
    let joined_a = half * conf.c01 + half * conf.c10;
    let joined_b = Q::from_integer(2) * conf.c00;
    Ok(PoleAverages {
        family_a: joined_a.scale(a_pairs.recip()),
        family_b: joined_b.scale(b_pairs.recip()),
        whole: (joined_a + joined_b).scale(all_pairs.recip()),
    })
}

/// Relative deviation `|estimate - c|/c` of a finite-length estimate of `N/(πL²)` from `c`.
pub fn relative_deviation(estimate: f64, constant: &SVConstant) -> f64 {
    let c = constant.to_f64();
    (estimate - c).abs() / c
}

/// One entry of the constants report.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantRecord {
    pub name: String,
    pub rational: String,
    pub float: f64,
    pub units: &'static str,
    pub provenance: &'static str,
}

impl ConstantRecord {
    pub fn new(name: impl Into<String>, c: &SVConstant, provenance: &'static str) -> ConstantRecord {
        ConstantRecord {
            name: name.into(),
            rational: c.rational_string(),
            float: c.to_f64(),
            units: "pi^-2",
            provenance,
        }
    }
}

/// Every constant of the pipeline for `d`, in a fixed order.
pub fn constants_report(d: i64) -> Result<Vec<ConstantRecord>> {
    let sigs = cover_signatures(d)?;
    let [cy, cy01, cy10, cy11] = cover_constants(d)?;
    let conf = configuration_solve(cy, cy01, cy10, cy11);
    let closed = c11_closed_form(d)?;
    let avg = counterexample_averages(d)?;
    let k = 2 * d + 6;
    fn r(name: impl Into<String>, c: &SVConstant, p: &'static str) -> ConstantRecord {
        ConstantRecord::new(name, c, p)
    }
    Ok(vec![
        r(format!("c(X) over {}", sigs[0]), &ekz_constant(&sigs[0], Level::Cover)?, "ekz-formula"),
        r(format!("c(Y) in {}", sigs[0]), &cy, "ekz-formula"),
        r(format!("c(Y01) in {}", sigs[1]), &cy01, "ekz-formula"),
        r(format!("c(Y10) in {}", sigs[2]), &cy10, "ekz-formula"),
        r(format!("c(Y11) in {}", sigs[3]), &cy11, "ekz-formula"),
        r("c00", &conf.c00, "configuration-inverse"),
        r("c01", &conf.c01, "configuration-inverse"),
        r("c10", &conf.c10, "configuration-inverse"),
        r("c11", &conf.c11, "configuration-inverse"),
        r("c11 sphere", &closed.sphere, "closed-form"),
        r(format!("c11 lifted genus {}", closed.genus), &closed.lifted, "closed-form"),
        r("pole pairs family A", &avg.family_a, "pole-pair-average"),
        r("pole pairs family B", &avg.family_b, "pole-pair-average"),
        r("pole pairs whole", &avg.whole, "pole-pair-average"),
        r(format!("generic k={k}"), &aez_generic_constant(k)?, "aez-generic"),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(v: &[i64]) -> StratumSignature {
        StratumSignature::quadratic(v.to_vec())
    }

    #[test]
    fn ekz_spot_values() {
        let y = quad(&[1, -1, -1, -1, -1, -1]);
        assert_eq!(ekz_constant(&y, Level::Base).unwrap(), SVConstant::new(5, 3));
        assert_eq!(ekz_constant(&y, Level::Cover).unwrap(), SVConstant::new(10, 3));
        let mut v = vec![4];
        v.extend([-1; 8]);
        assert_eq!(ekz_constant(&quad(&v), Level::Base).unwrap(), SVConstant::new(7, 3));
        let mut v = vec![1, 1];
        v.extend([-1; 6]);
        assert_eq!(ekz_constant(&quad(&v), Level::Base).unwrap(), SVConstant::new(11, 6));
    }

    #[test]
    fn ekz_rejects_positive_genus() {
        assert!(ekz_constant(&quad(&[1, 1, -1, -1]), Level::Base).is_err());
        assert!(ekz_constant(&StratumSignature::abelian(vec![2]), Level::Base).is_err());
    }

    #[test]
    fn matrix_times_inverse_is_identity() {
        let (m, inv) = (configuration_matrix(), configuration_inverse());
        for i in 0..4 {
            for j in 0..4 {
                let e: Q = (0..4).map(|k| m[i][k] * inv[k][j]).sum();
                assert_eq!(e, Q::from_integer((i == j) as i128));
            }
        }
    }

    #[test]
    fn solve_at_d_one() {
        let c = configuration_solve(
            SVConstant::new(5, 3),
            SVConstant::new(7, 3),
            SVConstant::new(7, 3),
            SVConstant::new(11, 6),
        );
        assert_eq!(c.c11, SVConstant::new(1, 6));
        assert_eq!(c.c01, SVConstant::new(1, 2));
        assert_eq!(c.c10, SVConstant::new(1, 2));
        assert_eq!(c.c00, SVConstant::new(1, 2));
        assert_eq!(c.total(), SVConstant::new(5, 3));
    }

    #[test]
    fn closed_forms() {
        let c = c11_closed_form(1).unwrap();
        assert_eq!((c.sphere, c.lifted, c.genus), (SVConstant::new(1, 6), SVConstant::new(1, 3), 2));
        let c = c11_closed_form(2).unwrap();
        assert_eq!((c.sphere, c.lifted, c.genus), (SVConstant::new(1, 8), SVConstant::new(1, 4), 2));
        assert!(c11_closed_form(0).is_err());
        assert_eq!(aez_generic_constant(4).unwrap(), SVConstant::new(1, 2));
        assert!(aez_generic_constant(3).is_err());
    }

    #[test]
    fn averages_at_d_one() {
        let a = counterexample_averages(1).unwrap();
        assert_eq!(a.family_a, SVConstant::new(1, 6));
        assert_eq!(a.family_b, SVConstant::new(1, 12));
        assert_eq!(a.whole, SVConstant::new(1, 10));
    }

    #[test]
    fn report_has_units() {
        let r = constants_report(1).unwrap();
        assert!(r.iter().all(|x| x.units == "pi^-2"));
        let c11 = r.iter().find(|x| x.name == "c11").unwrap();
        assert_eq!(c11.rational, "1/6");
    }
}
