//! Linear fractional transformations on the extended complex plane.
//!
//! A [`MoebiusMap`] is stored as its four coefficients `(a, b; c, d)` and acts
//! as `z -> (az + b) / (cz + d)`. The point at infinity is an explicit
//! [`Point::Infinity`] value instead of an IEEE infinity, so that
//! anti-conformal maps (which conjugate their argument) stay well defined.
//!
//! Circle inversions `T(z) = center + r^2 / conj(z - center)` live on
//! [`Circle`]. Both kinds of map implement [`PlaneMap`], which is what the
//! circle-image routine works with.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

pub type Complex = Complex64;

/// Tolerance used for classification boundaries, degenerate coefficients and
/// pole-on-circle detection.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoebiusError {
    #[error("degenerate coefficients: ad - bc = 0")]
    Degenerate,
    #[error("coefficients must be finite")]
    NonFinite,
    #[error("map has c = 0, so it has no isometric circle")]
    NoIsometricCircle,
    #[error("circle passes through the pole of the map; its image is a line")]
    PoleOnCircle,
    #[error("circle radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
}

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Finite(Complex),
    Infinity,
}

impl Point {
    pub fn new(re: f64, im: f64) -> Self {
        Point::Finite(Complex::new(re, im))
    }

    pub fn finite(self) -> Option<Complex> {
        match self {
            Point::Finite(z) => Some(z),
            Point::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, Point::Infinity)
    }
}

impl From<Complex> for Point {
    fn from(z: Complex) -> Self {
        Point::Finite(z)
    }
}

/// Anything that acts on the extended plane and sends circles to circles.
pub trait PlaneMap {
    fn map_point(&self, p: Point) -> Point;

    /// The point sent to infinity, or `Point::Infinity` when infinity is fixed.
    fn pole(&self) -> Point;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
    Loxodromic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixedPoints {
    TwoDistinct(Complex, Complex),
    /// Parabolic case; the point is `Infinity` for a pure translation.
    Double(Point),
    OneFiniteOneInfinite(Complex),
    /// Identity map.
    AllPoints,
}

impl FixedPoints {
    pub fn finite_points(&self) -> Vec<Complex> {
        match *self {
            FixedPoints::TwoDistinct(p, q) => vec![p, q],
            FixedPoints::Double(Point::Finite(p)) => vec![p],
            FixedPoints::Double(Point::Infinity) => vec![],
            FixedPoints::OneFiniteOneInfinite(p) => vec![p],
            FixedPoints::AllPoints => vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: Complex,
    b: Complex,
    c: Complex,
    d: Complex,
}

impl MoebiusMap {
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self, MoebiusError> {
        if ![a, b, c, d].iter().all(|z| z.is_finite()) {
            return Err(MoebiusError::NonFinite);
        }
        let scale = [a, b, c, d].iter().map(|z| z.norm()).fold(0.0, f64::max);
        let det = a * d - b * c;
        if scale == 0.0 || det.norm() <= 1e-12 * scale * scale {
            return Err(MoebiusError::Degenerate);
        }
        Ok(MoebiusMap { a, b, c, d })
    }

    /// Real-coefficient shorthand.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MoebiusError> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: Complex::new(1.0, 0.0),
            b: Complex::new(0.0, 0.0),
            c: Complex::new(0.0, 0.0),
            d: Complex::new(1.0, 0.0),
        }
    }

    pub fn a(&self) -> Complex {
        self.a
    }
    pub fn b(&self) -> Complex {
        self.b
    }
    pub fn c(&self) -> Complex {
        self.c
    }
    pub fn d(&self) -> Complex {
        self.d
    }

    pub fn coefficients(&self) -> [Complex; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, p: Point) -> Point {
        match p {
            Point::Infinity => {
                if self.c == Complex::new(0.0, 0.0) {
                    Point::Infinity
                } else {
                    Point::Finite(self.a / self.c)
                }
            }
            Point::Finite(z) => {
                let cz = self.c * z;
                let den = cz + self.d;
                let num = self.a * z + self.b;
                if den.norm() <= 4.0 * f64::EPSILON * cz.norm().max(self.d.norm()) {
                    Point::Infinity
                } else {
                    Point::Finite(num / den)
                }
            }
        }
    }

    /// Composition `self ∘ other` as the 2x2 matrix product.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let (a1, b1, c1, d1) = (self.a, self.b, self.c, self.d);
        let (a2, b2, c2, d2) = (other.a, other.b, other.c, other.d);
        MoebiusMap {
            a: a1 * a2 + b1 * c2,
            b: a1 * b2 + b1 * d2,
            c: a2 * c1 + c2 * d1,
            d: b2 * c1 + d1 * d2,
        }
    }

    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Rescales the coefficients so that `ad - bc = 1`.
    pub fn normalize(&self) -> MoebiusMap {
        let k = self.determinant().sqrt().inv();
        MoebiusMap {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
            d: self.d * k,
        }
    }

    pub fn trace(&self) -> Complex {
        self.a + self.d
    }

    /// `tr^2` of the normalized map, i.e. `(a + d)^2 / (ad - bc)`.
    pub fn normalized_trace_squared(&self) -> Complex {
        let t = self.trace();
        t * t / self.determinant()
    }

    pub fn classify(&self) -> MapClass {
        let t2 = self.normalized_trace_squared();
        if t2.im.abs() > EPS {
            return MapClass::Loxodromic;
        }
        let r = t2.re;
        if (r - 4.0).abs() <= EPS {
            MapClass::Parabolic
        } else if r > 4.0 {
            MapClass::Hyperbolic
        } else if r >= -EPS {
            MapClass::Elliptic
        } else {
            MapClass::Loxodromic
        }
    }

    /// Roots of `c z^2 + (d - a) z - b = 0`.
    pub fn fixed_points(&self) -> FixedPoints {
        let g = self.normalize();
        let (a, b, c, d) = (g.a, g.b, g.c, g.d);
        if c.norm() <= EPS {
            if (a - d).norm() <= EPS {
                return if b.norm() <= EPS {
                    FixedPoints::AllPoints
                } else {
                    FixedPoints::Double(Point::Infinity)
                };
            }
            return FixedPoints::OneFiniteOneInfinite(b / (d - a));
        }
        let amd = a - d;
        let disc = (d - a) * (d - a) + 4.0 * b * c;
        if disc.norm() <= EPS {
            return FixedPoints::Double(Point::Finite(amd / (2.0 * c)));
        }
        let mut s = disc.sqrt();
        if (amd + s).norm() < (amd - s).norm() {
            s = -s;
        }
        let q = amd + s;
        let z1 = q / (2.0 * c);
        let z2 = -2.0 * b / q;
        let polish = |z: Complex| {
            let f = c * z * z + (d - a) * z - b;
            let df = 2.0 * c * z + (d - a);
            if df.norm() > 0.0 {
                z - f / df
            } else {
                z
            }
        };
        FixedPoints::TwoDistinct(polish(z1), polish(z2))
    }

    /// The circle `|cz + d| = 1` of the normalized map: center `-d/c`,
    /// radius `1/|c|`.
    pub fn isometric_circle(&self) -> Result<Circle, MoebiusError> {
        let g = self.normalize();
        if g.c.norm() <= EPS {
            return Err(MoebiusError::NoIsometricCircle);
        }
        Circle::new(-g.d / g.c, 1.0 / g.c.norm())
    }

    pub fn image_of_circle(&self, circle: &Circle) -> Result<Circle, MoebiusError> {
        image_of_circle(self, circle)
    }
}

impl PlaneMap for MoebiusMap {
    fn map_point(&self, p: Point) -> Point {
        self.apply(p)
    }

    fn pole(&self) -> Point {
        if self.c == Complex::new(0.0, 0.0) {
            Point::Infinity
        } else {
            Point::Finite(-self.d / self.c)
        }
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.a, self.b, self.c, self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    center: Complex,
    radius: f64,
}

impl Circle {
    pub fn new(center: Complex, radius: f64) -> Result<Self, MoebiusError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(MoebiusError::InvalidRadius(radius));
        }
        if !center.is_finite() {
            return Err(MoebiusError::NonFinite);
        }
        Ok(Circle { center, radius })
    }

    pub fn center(&self) -> Complex {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn point_at(&self, angle: f64) -> Complex {
        self.center + Complex::from_polar(self.radius, angle)
    }

    /// Signed distance from `z` to the circle boundary (negative inside).
    pub fn boundary_distance(&self, z: Complex) -> f64 {
        (z - self.center).norm() - self.radius
    }

    /// Reflection in the circle. The center and infinity swap.
    pub fn invert_point(&self, p: Point) -> Point {
        match p {
            Point::Infinity => Point::Finite(self.center),
            Point::Finite(z) => {
                let w = z - self.center;
                if w.norm() == 0.0 {
                    Point::Infinity
                } else {
                    Point::Finite(self.center + self.radius * self.radius / w.conj())
                }
            }
        }
    }

    /// Image of `other` under reflection in `self`.
    pub fn inversion_image_of_circle(&self, other: &Circle) -> Result<Circle, MoebiusError> {
        image_of_circle(self, other)
    }
}

impl PlaneMap for Circle {
    fn map_point(&self, p: Point) -> Point {
        self.invert_point(p)
    }

    fn pole(&self) -> Point {
        Point::Finite(self.center)
    }
}

/// Image of a circle under a circle-preserving map, obtained by mapping three
/// boundary points and taking their circumcircle.
pub fn image_of_circle<M: PlaneMap + ?Sized>(map: &M, circle: &Circle) -> Result<Circle, MoebiusError> {
    if let Point::Finite(pole) = map.pole() {
        if ((pole - circle.center).norm() - circle.radius).abs() <= EPS * circle.radius.max(1.0) {
            return Err(MoebiusError::PoleOnCircle);
        }
    }
    let mut images = [Complex::new(0.0, 0.0); 3];
    for (k, slot) in images.iter_mut().enumerate() {
        let p = circle.point_at(2.0 * PI * k as f64 / 3.0);
        *slot = map
            .map_point(Point::Finite(p))
            .finite()
            .ok_or(MoebiusError::PoleOnCircle)?;
    }
    circumcircle(images[0], images[1], images[2]).ok_or(MoebiusError::PoleOnCircle)
}

/// Circle through three points; `None` when they are (numerically) collinear.
pub fn circumcircle(p: Complex, q: Complex, r: Complex) -> Option<Circle> {
    let b = q - p;
    let c = r - p;
    let det = 2.0 * (b.re * c.im - b.im * c.re);
    let b2 = b.norm_sqr();
    let c2 = c.norm_sqr();
    if det.abs() <= 1e-14 * b2.max(c2) {
        return None;
    }
    let ux = (c.im * b2 - b.im * c2) / det;
    let uy = (b.re * c2 - c.re * b2) / det;
    let offset = Complex::new(ux, uy);
    Circle::new(p + offset, offset.norm()).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn close(p: Point, q: Complex, tol: f64) -> bool {
        matches!(p, Point::Finite(z) if (z - q).norm() <= tol)
    }

    #[test]
    fn apply_examples() {
        let id = MoebiusMap::identity();
        assert!(close(id.apply(c(3.0, 4.0).into()), c(3.0, 4.0), 0.0));
        let recip = MoebiusMap::real(0.0, 1.0, 1.0, 0.0).unwrap();
        assert!(close(recip.apply(c(2.0, 0.0).into()), c(0.5, 0.0), 1e-15));
        let shift = MoebiusMap::real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(close(shift.apply(c(0.0, 1.0).into()), c(1.0, 1.0), 1e-15));
    }

    #[test]
    fn apply_handles_infinity() {
        let g = MoebiusMap::real(2.0, 1.0, 1.0, 3.0).unwrap();
        assert_eq!(g.apply(Point::new(-3.0, 0.0)), Point::Infinity);
        assert!(close(g.apply(Point::Infinity), c(2.0, 0.0), 1e-15));
        let shift = MoebiusMap::real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(shift.apply(Point::Infinity), Point::Infinity);
    }

    #[test]
    fn degenerate_rejected() {
        assert_eq!(MoebiusMap::real(1.0, 2.0, 2.0, 4.0), Err(MoebiusError::Degenerate));
        assert_eq!(MoebiusMap::real(0.0, 0.0, 0.0, 0.0), Err(MoebiusError::Degenerate));
        assert_eq!(
            MoebiusMap::real(f64::NAN, 0.0, 0.0, 1.0),
            Err(MoebiusError::NonFinite)
        );
    }

    #[test]
    fn compose_by_hand() {
        let g = MoebiusMap::real(1.0, 1.0, 0.0, 1.0).unwrap();
        let h = MoebiusMap::real(1.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(g.compose(&h), MoebiusMap::real(2.0, 1.0, 1.0, 1.0).unwrap());
        assert_eq!(g.compose(&MoebiusMap::identity()), g);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(MoebiusMap::identity().inverse(), MoebiusMap::identity());
        let g = MoebiusMap::real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(g.inverse(), MoebiusMap::real(1.0, -1.0, 0.0, 1.0).unwrap());
        let g = MoebiusMap::new(c(0.3, -1.2), c(2.0, 0.5), c(-0.7, 0.4), c(1.1, 0.9)).unwrap();
        let z = c(0.3, 0.7);
        let back = g.inverse().apply(g.apply(z.into()));
        assert!(close(back, z, 1e-12));
        let prod = g.compose(&g.inverse());
        for w in [c(0.0, 0.0), c(1.0, -2.0), c(-3.5, 0.25), c(0.1, 0.1), c(7.0, 3.0)] {
            assert!(close(prod.apply(w.into()), w, 1e-12));
        }
    }

    #[test]
    fn fixed_point_examples() {
        let recip = MoebiusMap::real(0.0, 1.0, 1.0, 0.0).unwrap();
        match recip.fixed_points() {
            FixedPoints::TwoDistinct(p, q) => {
                let mut re = [p.re, q.re];
                re.sort_by(f64::total_cmp);
                assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12);
                assert!(p.im.abs() < 1e-12 && q.im.abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        let shift = MoebiusMap::real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(shift.fixed_points(), FixedPoints::Double(Point::Infinity));
        // z = z / (z + 1)  <=>  z^2 = 0
        let g = MoebiusMap::real(1.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(g.fixed_points(), FixedPoints::Double(Point::new(0.0, 0.0)));
        assert_eq!(MoebiusMap::identity().fixed_points(), FixedPoints::AllPoints);
        let dilate = MoebiusMap::real(2.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(
            dilate.fixed_points(),
            FixedPoints::OneFiniteOneInfinite(c(-1.0, 0.0))
        );
    }

    #[test]
    fn classification() {
        assert_eq!(MoebiusMap::identity().classify(), MapClass::Parabolic);
        assert_eq!(MoebiusMap::real(0.0, 1.0, -1.0, 0.0).unwrap().classify(), MapClass::Elliptic);
        assert_eq!(MoebiusMap::real(2.0, 0.0, 0.0, 0.5).unwrap().classify(), MapClass::Hyperbolic);
        let lox = MoebiusMap::new(c(2.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 1.0).inv()).unwrap();
        assert_eq!(lox.classify(), MapClass::Loxodromic);
        // scaling by 3 leaves the class unchanged
        let g = MoebiusMap::real(6.0, 0.0, 0.0, 1.5).unwrap();
        assert_eq!(g.classify(), MapClass::Hyperbolic);
    }

    #[test]
    fn isometric_circle_examples() {
        let recip = MoebiusMap::real(0.0, 1.0, 1.0, 0.0).unwrap();
        let iso = recip.isometric_circle().unwrap();
        assert!(iso.center().norm() < 1e-15 && (iso.radius() - 1.0).abs() < 1e-15);
        let g = MoebiusMap::real(1.0, 0.0, 2.0, 1.0).unwrap();
        let iso = g.isometric_circle().unwrap();
        assert!((iso.center() - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((iso.radius() - 0.5).abs() < 1e-15);
        let shift = MoebiusMap::real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(shift.isometric_circle(), Err(MoebiusError::NoIsometricCircle));
    }

    #[test]
    fn inversion_examples() {
        let unit = Circle::new(c(0.0, 0.0), 1.0).unwrap();
        assert!(close(unit.invert_point(Point::new(2.0, 0.0)), c(0.5, 0.0), 1e-15));
        let circ = Circle::new(c(1.0, -2.0), 1.5).unwrap();
        for k in 0..8 {
            let z = circ.point_at(k as f64 * 0.7);
            assert!(close(circ.invert_point(z.into()), z, 1e-12));
        }
        let z = Point::new(0.3, 4.0);
        let twice = circ.invert_point(circ.invert_point(z));
        assert!(close(twice, c(0.3, 4.0), 1e-12));
        assert_eq!(circ.invert_point(Point::Finite(circ.center())), Point::Infinity);
        assert_eq!(circ.invert_point(Point::Infinity), Point::Finite(circ.center()));
    }

    #[test]
    fn invalid_radius() {
        assert_eq!(Circle::new(c(0.0, 0.0), 0.0), Err(MoebiusError::InvalidRadius(0.0)));
        assert!(Circle::new(c(0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn circle_images() {
        let circ = Circle::new(c(0.5, 0.25), 2.0).unwrap();
        let same = MoebiusMap::identity().image_of_circle(&circ).unwrap();
        assert!((same.center() - circ.center()).norm() < 1e-12);
        assert!((same.radius() - circ.radius()).abs() < 1e-12);

        // oracle: 8 boundary points of Circle(3, 1) through z -> 1/conj(z)
        // land on the circle of center 3/8, radius 1/8
        let unit = Circle::new(c(0.0, 0.0), 1.0).unwrap();
        let target = Circle::new(c(3.0, 0.0), 1.0).unwrap();
        let img = unit.inversion_image_of_circle(&target).unwrap();
        assert!((img.center() - c(0.375, 0.0)).norm() < 1e-12);
        assert!((img.radius() - 0.125).abs() < 1e-12);

        let shift = MoebiusMap::real(1.0, 1.0, 0.0, 1.0).unwrap();
        let img = shift.image_of_circle(&Circle::new(c(0.0, 0.0), 1.0).unwrap()).unwrap();
        assert!((img.center() - c(1.0, 0.0)).norm() < 1e-12);
        assert!((img.radius() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pole_on_circle_rejected() {
        let recip = MoebiusMap::real(0.0, 1.0, 1.0, 0.0).unwrap();
        let through_zero = Circle::new(c(1.0, 0.0), 1.0).unwrap();
        assert_eq!(recip.image_of_circle(&through_zero), Err(MoebiusError::PoleOnCircle));
        let unit = Circle::new(c(0.0, 0.0), 1.0).unwrap();
        let through_center = Circle::new(c(0.0, 2.0), 2.0).unwrap();
        assert_eq!(
            unit.inversion_image_of_circle(&through_center),
            Err(MoebiusError::PoleOnCircle)
        );
    }
}
