//! Planar vectors over exact scalars.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: Scalar,
    pub y: Scalar,
}

impl Vec2 {
    pub const fn new(x: Scalar, y: Scalar) -> Vec2 {
        Vec2 { x, y }
    }

    pub fn int(x: i128, y: i128) -> Vec2 {
        Vec2::new(Scalar::int(x), Scalar::int(y))
    }

    pub fn zero() -> Vec2 {
        Vec2::new(Scalar::zero(), Scalar::zero())
    }

    #[inline]
    pub fn dot(&self, o: &Vec2) -> Scalar {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the planar cross product.
    #[inline]
    pub fn cross(&self, o: &Vec2) -> Scalar {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm2(&self) -> Scalar {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn scale(&self, s: Scalar) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }

    /// Representative of `±self` with `x > 0`, or `x == 0` and `y > 0`.
    pub fn canonical_sign(&self) -> Vec2 {
        let sx = self.x.signum();
        if sx < 0 || (sx == 0 && self.y.signum() < 0) {
            -*self
        } else {
            *self
        }
    }

    /// Slope key identifying the unoriented direction: `(0, y/x)` or `(1, 0)` for vertical.
    pub fn direction_key(&self) -> (u8, Scalar) {
        if self.x.is_zero() {
            (1, Scalar::zero())
        } else {
            (0, self.y / self.x)
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<Scalar> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: Scalar) -> Vec2 {
        self.scale(s)
    }
}

/// Twice the signed area of a polygon (shoelace).
pub fn signed_area2(pts: &[Vec2]) -> Scalar {
    let n = pts.len();
    (0..n).map(|i| pts[i].cross(&pts[(i + 1) % n])).sum()
}

/// Orientation of the triple: +1 counter-clockwise, -1 clockwise, 0 collinear.
pub fn orient(a: &Vec2, b: &Vec2, c: &Vec2) -> i32 {
    (*b - *a).cross(&(*c - *a)).signum()
}

/// Closed-triangle membership for a counter-clockwise triangle.
pub fn in_triangle(p: &Vec2, a: &Vec2, b: &Vec2, c: &Vec2) -> bool {
    orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0
}

/// Whether `p` lies on the closed segment `ab`.
pub fn on_segment(p: &Vec2, a: &Vec2, b: &Vec2) -> bool {
    if orient(a, b, p) != 0 {
        return false;
    }
    let d = *b - *a;
    let t = (*p - *a).dot(&d);
    t.signum() >= 0 && t <= d.norm2()
}
