//! Exact rational geometry primitives and the floating-point point type used
//! for morph frames.
//!
//! Predicates on [`Point`] are exact. Each point caches an `f64` approximation
//! that is only used as a conservative filter; whenever the filter cannot
//! certify a sign the predicate falls back to rational arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::GeomError;

pub type Rational = BigRational;

/// Exact point with rational coordinates.
#[derive(Clone)]
pub struct Point {
    x: Rational,
    y: Rational,
    fx: f64,
    fy: f64,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        let fx = x.to_f64().unwrap_or(f64::NAN);
        let fy = y.to_f64().unwrap_or(f64::NAN);
        Point { x, y, fx, fy }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(Rational::from_integer(x.into()), Rational::from_integer(y.into()))
    }

    /// Exact conversion of a finite float pair; every finite `f64` is a dyadic rational.
    pub fn from_f64(x: f64, y: f64) -> Result<Self, GeomError> {
        let rx = Rational::from_float(x).ok_or(GeomError::NonFinite)?;
        let ry = Rational::from_float(y).ok_or(GeomError::NonFinite)?;
        Ok(Point { x: rx, y: ry, fx: x, fy: y })
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn approx(&self) -> ApproxPoint {
        ApproxPoint::new(self.fx, self.fy)
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        let two = Rational::from_integer(2.into());
        Point::new((&self.x + &other.x) / &two, (&self.y + &other.y) / &two)
    }

    /// `self + (other - self) * t`
    pub fn lerp(&self, other: &Point, t: &Rational) -> Point {
        Point::new(
            &self.x + (&other.x - &self.x) * t,
            &self.y + (&other.y - &self.y) * t,
        )
    }

    pub fn dist2(&self, other: &Point) -> Rational {
        let dx = &other.x - &self.x;
        let dy = &other.y - &self.y;
        &dx * &dx + &dy * &dy
    }

    /// Lexicographic (x, then y) order.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        self.x.cmp(&other.x).then_with(|| self.y.cmp(&other.y))
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x && self.y == other.y
    }
}

impl Eq for Point {}

impl Hash for Point {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.x.hash(state);
        self.y.hash(state);
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_cmp(other)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Floating point position used for morph frames.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ApproxPoint {
    pub x: f64,
    pub y: f64,
}

impl ApproxPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        ApproxPoint { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, o: &ApproxPoint) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }

    pub fn lerp(&self, o: &ApproxPoint, t: f64) -> ApproxPoint {
        ApproxPoint::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    pub fn to_exact(&self) -> Result<Point, GeomError> {
        Point::from_f64(self.x, self.y)
    }
}

/// Straight-line segment between two distinct points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self, GeomError> {
        if a == b {
            return Err(GeomError::DegenerateSegment);
        }
        Ok(Segment { a, b })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

impl Orientation {
    pub fn as_i8(self) -> i8 {
        match self {
            Orientation::Clockwise => -1,
            Orientation::Collinear => 0,
            Orientation::CounterClockwise => 1,
        }
    }

    fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => Orientation::Clockwise,
            Ordering::Equal => Orientation::Collinear,
            Ordering::Greater => Orientation::CounterClockwise,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::Collinear => Orientation::Collinear,
            Orientation::CounterClockwise => Orientation::Clockwise,
        }
    }
}

fn rational_sign(r: &Rational) -> Ordering {
    if r.is_zero() {
        Ordering::Equal
    } else if r.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Sign of `(b - a) x (c - a)`; exact.
pub fn orient(a: &Point, b: &Point, c: &Point) -> Orientation {
    let bx = b.fx - a.fx;
    let by = b.fy - a.fy;
    let cx = c.fx - a.fx;
    let cy = c.fy - a.fy;
    let l = bx * cy;
    let r = by * cx;
    let det = l - r;
    let perm = (a.fx.abs() + b.fx.abs()) * (a.fy.abs() + c.fy.abs())
        + (a.fy.abs() + b.fy.abs()) * (a.fx.abs() + c.fx.abs());
    if det.is_finite() && perm.is_finite() && perm > 1e-200 && det.abs() > 1e-12 * perm {
        return Orientation::from_ordering(det.partial_cmp(&0.0).unwrap());
    }
    Orientation::from_ordering(rational_sign(&cross3(a, b, c)))
}

/// `(b - a) x (c - a)` exactly.
pub fn cross3(a: &Point, b: &Point, c: &Point) -> Rational {
    (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)
}

fn cross_dirs(d1: (&Rational, &Rational), d2: (&Rational, &Rational)) -> Rational {
    d1.0 * d2.1 - d1.1 * d2.0
}

fn dot_dirs(d1: (&Rational, &Rational), d2: (&Rational, &Rational)) -> Rational {
    d1.0 * d2.0 + d1.1 * d2.1
}

/// Exact direction vector `to - from`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Direction {
    pub dx: Rational,
    pub dy: Rational,
}

impl Direction {
    pub fn between(from: &Point, to: &Point) -> Self {
        Direction { dx: &to.x - &from.x, dy: &to.y - &from.y }
    }

    fn pair(&self) -> (&Rational, &Rational) {
        (&self.dx, &self.dy)
    }

    /// Half index: 0 for angles in `[0, pi)`, 1 for `[pi, 2pi)`.
    fn half(&self) -> u8 {
        if self.dy.is_positive() || (self.dy.is_zero() && self.dx.is_positive()) {
            0
        } else {
            1
        }
    }

    /// Compare by polar angle in `[0, 2pi)` measured from the positive x axis.
    pub fn angle_cmp(&self, other: &Direction) -> Ordering {
        let (h1, h2) = (self.half(), other.half());
        if h1 != h2 {
            return h1.cmp(&h2);
        }
        // same half: self before other iff cross(self, other) > 0
        rational_sign(&cross_dirs(other.pair(), self.pair()))
    }

    pub fn same_ray(&self, other: &Direction) -> bool {
        cross_dirs(self.pair(), other.pair()).is_zero()
            && dot_dirs(self.pair(), other.pair()).is_positive()
    }

    /// Compare `a` and `b` by counterclockwise angle measured from `self`,
    /// in `[0, 2pi)`.
    pub fn ccw_from_cmp(&self, a: &Direction, b: &Direction) -> Ordering {
        let ka = self.rel_half(a);
        let kb = self.rel_half(b);
        if ka != kb {
            return ka.cmp(&kb);
        }
        rational_sign(&cross_dirs(b.pair(), a.pair()))
    }

    fn rel_half(&self, d: &Direction) -> u8 {
        let c = cross_dirs(self.pair(), d.pair());
        if c.is_positive() || (c.is_zero() && dot_dirs(self.pair(), d.pair()).is_positive()) {
            0
        } else {
            1
        }
    }

    /// True iff `d` lies strictly inside the counterclockwise sweep from
    /// `self` to `end`. When `end` is the same ray as `self` the sweep is the
    /// full turn minus that ray.
    pub fn strictly_within_ccw(&self, end: &Direction, d: &Direction) -> bool {
        if d.same_ray(self) {
            return false;
        }
        if end.same_ray(self) {
            return true;
        }
        self.ccw_from_cmp(d, end) == Ordering::Less
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrossKind {
    Disjoint,
    ProperCross(Point),
    SharedEndpoint,
    /// Overlap or an endpoint touching the interior of the other segment.
    Degenerate,
}

fn bbox_disjoint(s1: &Segment, s2: &Segment) -> bool {
    let (a, b, c, d) = (&s1.a, &s1.b, &s2.a, &s2.b);
    let vals = [a.fx, a.fy, b.fx, b.fy, c.fx, c.fy, d.fx, d.fy];
    if vals.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let slack = 1e-9 * scale;
    let (x1lo, x1hi) = (a.fx.min(b.fx), a.fx.max(b.fx));
    let (y1lo, y1hi) = (a.fy.min(b.fy), a.fy.max(b.fy));
    let (x2lo, x2hi) = (c.fx.min(d.fx), c.fx.max(d.fx));
    let (y2lo, y2hi) = (c.fy.min(d.fy), c.fy.max(d.fy));
    x1hi + slack < x2lo || x2hi + slack < x1lo || y1hi + slack < y2lo || y2hi + slack < y1lo
}

/// Is `p` on the closed segment `[a, b]`, given that `a, b, p` are collinear?
fn on_closed_collinear(a: &Point, b: &Point, p: &Point) -> bool {
    let (xlo, xhi) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (ylo, yhi) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    &p.x >= xlo && &p.x <= xhi && &p.y >= ylo && &p.y <= yhi
}

/// True iff `p` lies on the open segment `(a, b)`.
pub fn point_on_open_segment(a: &Point, b: &Point, p: &Point) -> bool {
    p != a && p != b && orient(a, b, p) == Orientation::Collinear && on_closed_collinear(a, b, p)
}

/// Exact intersection point of the lines through `s1` and `s2`; `None` if parallel.
pub fn line_intersection(a: &Point, b: &Point, c: &Point, d: &Point) -> Option<Point> {
    let r = Direction::between(a, b);
    let s = Direction::between(c, d);
    let denom = cross_dirs(r.pair(), s.pair());
    if denom.is_zero() {
        return None;
    }
    let ac = Direction::between(a, c);
    let t = cross_dirs(ac.pair(), s.pair()) / denom;
    Some(a.lerp(b, &t))
}

/// Classify how two segments meet.
pub fn segments_cross(s1: &Segment, s2: &Segment) -> CrossKind {
    if bbox_disjoint(s1, s2) {
        return CrossKind::Disjoint;
    }
    let (a, b, c, d) = (&s1.a, &s1.b, &s2.a, &s2.b);
    let shared = [(a, c), (a, d), (b, c), (b, d)]
        .iter()
        .filter(|(p, q)| p == q)
        .count();
    if shared >= 2 {
        return CrossKind::Degenerate;
    }
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if shared == 1 {
        // the non-shared endpoints must not lie on the other segment
        let bad = (o1 == Orientation::Collinear && c != a && c != b && on_closed_collinear(a, b, c))
            || (o2 == Orientation::Collinear && d != a && d != b && on_closed_collinear(a, b, d))
            || (o3 == Orientation::Collinear && a != c && a != d && on_closed_collinear(c, d, a))
            || (o4 == Orientation::Collinear && b != c && b != d && on_closed_collinear(c, d, b));
        return if bad { CrossKind::Degenerate } else { CrossKind::SharedEndpoint };
    }
    use Orientation::Collinear;
    if o1 != Collinear && o2 != Collinear && o3 != Collinear && o4 != Collinear {
        if o1 != o2 && o3 != o4 {
            let p = line_intersection(a, b, c, d).expect("non-parallel by orientation");
            return CrossKind::ProperCross(p);
        }
        return CrossKind::Disjoint;
    }
    let touches = (o1 == Collinear && on_closed_collinear(a, b, c))
        || (o2 == Collinear && on_closed_collinear(a, b, d))
        || (o3 == Collinear && on_closed_collinear(c, d, a))
        || (o4 == Collinear && on_closed_collinear(c, d, b));
    if touches {
        CrossKind::Degenerate
    } else {
        CrossKind::Disjoint
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    OnBoundary,
    Outside,
}

/// Checks that a closed polygon is simple: no repeated vertices, and
/// non-adjacent edges do not meet.
pub fn is_simple_polygon(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if poly[i] == poly[j] {
                return false;
            }
        }
    }
    let seg = |i: usize| Segment { a: poly[i].clone(), b: poly[(i + 1) % n].clone() };
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let kind = segments_cross(&seg(i), &seg(j));
            match kind {
                CrossKind::Disjoint => {}
                CrossKind::SharedEndpoint if adjacent => {}
                _ => return false,
            }
        }
    }
    true
}

/// Exact point location in a simple polygon.
pub fn point_in_polygon(p: &Point, poly: &[Point]) -> Result<Location, GeomError> {
    if !is_simple_polygon(poly) {
        return Err(GeomError::SelfIntersecting);
    }
    Ok(locate_unchecked(p, poly))
}

/// Point location by winding number; valid for simple polygons and for
/// closed walks whose winding number is 0 or 1.
pub fn locate_unchecked(p: &Point, poly: &[Point]) -> Location {
    let n = poly.len();
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        if a == p || point_on_open_segment(a, b, p) {
            return Location::OnBoundary;
        }
    }
    if winding_number(p, poly) != 0 {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// Winding number of the closed walk `poly` around `p` (p must not lie on it).
pub fn winding_number(p: &Point, poly: &[Point]) -> i64 {
    let n = poly.len();
    let mut wn = 0i64;
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        if a.y <= p.y {
            if b.y > p.y && orient(a, b, p) == Orientation::CounterClockwise {
                wn += 1;
            }
        } else if b.y <= p.y && orient(a, b, p) == Orientation::Clockwise {
            wn -= 1;
        }
    }
    wn
}

/// Twice the signed area of a closed walk.
pub fn signed_area2(poly: &[Point]) -> Rational {
    let n = poly.len();
    let mut acc = Rational::zero();
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        acc += &a.x * &b.y - &b.x * &a.y;
    }
    acc
}

/// All consecutive triples turn the same way (no collinear triple) and the
/// boundary winds exactly once.
pub fn is_strictly_convex(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let turn = orient(&poly[n - 1], &poly[0], &poly[1]);
    if turn == Orientation::Collinear {
        return false;
    }
    for i in 0..n {
        let o = orient(&poly[i], &poly[(i + 1) % n], &poly[(i + 2) % n]);
        if o != turn {
            return false;
        }
    }
    // count passes of the edge direction through the reference ray (1, 0)
    let reference = Direction { dx: Rational::from_integer(1.into()), dy: Rational::zero() };
    let dirs: Vec<Direction> =
        (0..n).map(|i| Direction::between(&poly[i], &poly[(i + 1) % n])).collect();
    let mut passes = 0;
    for i in 0..n {
        let (from, to) = if turn == Orientation::CounterClockwise {
            (&dirs[i], &dirs[(i + 1) % n])
        } else {
            (&dirs[(i + 1) % n], &dirs[i])
        };
        // reference in the half-open ccw sweep (from, to]
        if reference.same_ray(to) || from.strictly_within_ccw(to, &reference) {
            passes += 1;
        }
    }
    passes == 1
}

/// Barycentric coordinates of `p` with respect to the non-degenerate
/// triangle `(a, b, c)`.
pub fn barycentric(p: &Point, a: &Point, b: &Point, c: &Point) -> [Rational; 3] {
    let total = cross3(a, b, c);
    let la = cross3(p, b, c) / &total;
    let lb = cross3(a, p, c) / &total;
    let lc = Rational::one() - &la - &lb;
    [la, lb, lc]
}

/// `sum w_i * p_i` with exact weights.
pub fn combine(weights: &[Rational], points: &[&Point]) -> Point {
    let mut x = Rational::zero();
    let mut y = Rational::zero();
    for (w, p) in weights.iter().zip(points) {
        x += w * &p.x;
        y += w * &p.y;
    }
    Point::new(x, y)
}

/// Squared distance from `p` to the closed segment `[a, b]`.
pub fn dist2_point_segment(p: &Point, a: &Point, b: &Point) -> Rational {
    let ab = Direction::between(a, b);
    let ap = Direction::between(a, p);
    let len2 = dot_dirs(ab.pair(), ab.pair());
    let t = dot_dirs(ap.pair(), ab.pair());
    if !t.is_positive() {
        return p.dist2(a);
    }
    if t >= len2 {
        return p.dist2(b);
    }
    let c = cross_dirs(ab.pair(), ap.pair());
    &c * &c / len2
}

/// Exact squared radius of the largest half-disk centred at the midpoint of
/// `(u, v)`, on the apex side, contained in the triangle `(u, v, apex)`.
pub fn half_disk_fit_radius2(u: &Point, v: &Point, apex: &Point) -> Result<Rational, GeomError> {
    if orient(u, v, apex) == Orientation::Collinear {
        return Err(GeomError::DegenerateTriangle);
    }
    let w = u.midpoint(v);
    let du = dist2_point_segment(&w, u, apex);
    let dv = dist2_point_segment(&w, v, apex);
    Ok(if du < dv { du } else { dv })
}

/// Largest fitting half-disk radius as a certified lower bound in `f64`.
pub fn half_disk_fit_radius(u: &Point, v: &Point, apex: &Point) -> Result<f64, GeomError> {
    let r2 = half_disk_fit_radius2(u, v, apex)?;
    Ok(sqrt_lower_bound(&r2))
}

/// Largest `f64` whose square does not exceed `r2`.
pub fn sqrt_lower_bound(r2: &Rational) -> f64 {
    let approx = r2.to_f64().unwrap_or(0.0).max(0.0).sqrt();
    let mut s = approx;
    loop {
        let rs = match Rational::from_float(s) {
            Some(v) => v,
            None => return 0.0,
        };
        if &(&rs * &rs) <= r2 {
            return s;
        }
        s = next_down(s);
        if s <= 0.0 {
            return 0.0;
        }
    }
}

fn next_down(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    f64::from_bits(x.to_bits() - 1)
}

/// Parse an exact decimal (`-12.5`, `3e-2`) or fraction (`7/3`) literal.
pub fn parse_rational(s: &str) -> Result<Rational, GeomError> {
    let s = s.trim();
    let bad = || GeomError::BadNumber(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    if scale.unsigned_abs() > 4096 {
        return Err(bad());
    }
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Format a rational as a terminating decimal when possible, else `p/q`.
pub fn format_rational(r: &Rational) -> String {
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if den != BigInt::from(1) {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives);
    if places == 0 {
        return r.numer().to_string();
    }
    let scaled = r * Rational::from_integer(num_traits::pow(BigInt::from(10), places));
    let n = scaled.to_integer();
    let neg = n.is_negative();
    let digits = n.abs().to_string();
    let digits = if digits.len() <= places {
        format!("{}{}", "0".repeat(places - digits.len() + 1), digits)
    } else {
        digits
    };
    let (ip, fp) = digits.split_at(digits.len() - places);
    let fp = fp.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if fp.is_empty() {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{fp}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn seg(a: (i64, i64), b: (i64, i64)) -> Segment {
        Segment::new(p(a.0, a.1), p(b.0, b.1)).unwrap()
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient(&p(0, 0), &p(1, 0), &p(0, 1)).as_i8(), 1);
        assert_eq!(orient(&p(0, 0), &p(1, 1), &p(2, 2)).as_i8(), 0);
        assert_eq!(orient(&p(0, 0), &p(0, 1), &p(1, 0)).as_i8(), -1);
    }

    #[test]
    fn orient_near_degenerate_uses_exact_path() {
        let a = Point::from_f64(0.5, 0.5).unwrap();
        let b = Point::from_f64(12.0, 12.0).unwrap();
        let c = Point::from_f64(24.0, 24.0).unwrap();
        assert_eq!(orient(&a, &b, &c), Orientation::Collinear);
        let c2 = Point::from_f64(24.0, 24.0 + f64::EPSILON * 16.0).unwrap();
        assert_eq!(orient(&a, &b, &c2), Orientation::CounterClockwise);
    }

    #[test]
    fn segments_cross_examples() {
        assert_eq!(
            segments_cross(&seg((0, 0), (2, 2)), &seg((0, 2), (2, 0))),
            CrossKind::ProperCross(p(1, 1))
        );
        assert_eq!(segments_cross(&seg((0, 0), (1, 0)), &seg((1, 0), (2, 0))), CrossKind::SharedEndpoint);
        assert_eq!(segments_cross(&seg((0, 0), (1, 0)), &seg((0, 1), (1, 1))), CrossKind::Disjoint);
    }

    #[test]
    fn segments_cross_degenerate_cases() {
        // overlap along a sub-segment
        assert_eq!(segments_cross(&seg((0, 0), (4, 0)), &seg((1, 0), (6, 0))), CrossKind::Degenerate);
        // endpoint touching the interior
        assert_eq!(segments_cross(&seg((0, 0), (4, 0)), &seg((2, 0), (2, 5))), CrossKind::Degenerate);
        // shared endpoint plus overlap
        assert_eq!(segments_cross(&seg((0, 0), (4, 0)), &seg((0, 0), (2, 0))), CrossKind::Degenerate);
        // identical
        assert_eq!(segments_cross(&seg((0, 0), (4, 0)), &seg((4, 0), (0, 0))), CrossKind::Degenerate);
        // collinear but apart
        assert_eq!(segments_cross(&seg((0, 0), (1, 0)), &seg((2, 0), (3, 0))), CrossKind::Disjoint);
    }

    #[test]
    fn point_in_polygon_examples() {
        let sq = vec![p(0, 0), p(3, 0), p(3, 3), p(0, 3)];
        assert_eq!(point_in_polygon(&p(1, 1), &sq).unwrap(), Location::Inside);
        assert_eq!(point_in_polygon(&p(0, 0), &sq).unwrap(), Location::OnBoundary);
        assert_eq!(point_in_polygon(&p(5, 5), &sq).unwrap(), Location::Outside);
        let bowtie = vec![p(0, 0), p(2, 2), p(2, 0), p(0, 2)];
        assert_eq!(point_in_polygon(&p(1, 1), &bowtie), Err(GeomError::SelfIntersecting));
    }

    #[test]
    fn strict_convexity_examples() {
        let sq = vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)];
        assert!(is_strictly_convex(&sq));
        let with_mid = vec![p(0, 0), p(1, 0), p(2, 0), p(2, 2), p(0, 2)];
        assert!(!is_strictly_convex(&with_mid));
        let arrow = vec![p(0, 0), p(4, 0), p(2, 1), p(2, 4)];
        assert!(!is_strictly_convex(&arrow));
        // pentagram: every turn has the same sign but it winds twice
        let star = vec![p(0, 10), p(6, -8), p(-10, 3), p(10, 3), p(-6, -8)];
        assert!(!is_strictly_convex(&star));
    }

    #[test]
    fn arrowhead_brute_force_triples() {
        // independent check: a polygon is strictly convex iff for every edge all other
        // vertices lie strictly on the same side
        let arrow = [p(0, 0), p(4, 0), p(2, 1), p(2, 4)];
        let n = arrow.len();
        let mut convex = true;
        for i in 0..n {
            let (a, b) = (&arrow[i], &arrow[(i + 1) % n]);
            let signs: Vec<i8> =
                (0..n).filter(|&k| k != i && k != (i + 1) % n).map(|k| orient(a, b, &arrow[k]).as_i8()).collect();
            if signs.iter().any(|&s| s == 0) || signs.iter().any(|&s| s != signs[0]) {
                convex = false;
            }
        }
        assert!(!convex);
        assert_eq!(is_strictly_convex(&arrow), convex);
    }

    /// Dense sampling oracle: distance from `w` to a segment by scanning points along it.
    fn sampled_distance(w: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
        let steps = 200_000;
        (0..=steps)
            .map(|i| {
                let t = i as f64 / steps as f64;
                let x = a.0 + (b.0 - a.0) * t;
                let y = a.1 + (b.1 - a.1) * t;
                ((x - w.0).powi(2) + (y - w.1).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn half_disk_radius_examples() {
        let r = half_disk_fit_radius(&p(0, 0), &p(2, 0), &p(1, 2)).unwrap();
        let oracle = sampled_distance((1.0, 0.0), (0.0, 0.0), (1.0, 2.0))
            .min(sampled_distance((1.0, 0.0), (2.0, 0.0), (1.0, 2.0)));
        assert!((r - 2.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!((r - oracle).abs() < 1e-5);

        let h = Rational::from_float(3f64.sqrt()).unwrap();
        let apex = Point::new(Rational::from_integer(1.into()), h);
        let r = half_disk_fit_radius(&p(0, 0), &p(2, 0), &apex).unwrap();
        assert!((r - 3f64.sqrt() / 2.0).abs() < 1e-12);

        let thin = Point::new(Rational::from_integer(1.into()), Rational::from_float(1e-6).unwrap());
        let r = half_disk_fit_radius(&p(0, 0), &p(2, 0), &thin).unwrap();
        assert!(r > 0.0 && r < 1e-5);

        assert_eq!(half_disk_fit_radius(&p(0, 0), &p(2, 0), &p(5, 0)), Err(GeomError::DegenerateTriangle));
    }

    #[test]
    fn sqrt_lower_bound_is_certified() {
        for k in [2i64, 3, 5, 7, 1_000_003] {
            let r2 = Rational::from_integer(k.into());
            let s = sqrt_lower_bound(&r2);
            let rs = Rational::from_float(s).unwrap();
            assert!(&rs * &rs <= r2);
            assert!((s - (k as f64).sqrt()).abs() < 1e-9 * (k as f64).sqrt());
        }
    }

    #[test]
    fn decimal_round_trip() {
        for s in ["0", "-1.5", "12.25", "0.001", "-0.125", "1/3", "-22/7", "100"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
        assert_eq!(parse_rational("1e3").unwrap(), Rational::from_integer(1000.into()));
        assert_eq!(format_rational(&parse_rational("2.50").unwrap()), "2.5");
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn ccw_wedge_membership() {
        let o = p(0, 0);
        let east = Direction::between(&o, &p(1, 0));
        let north = Direction::between(&o, &p(0, 1));
        let ne = Direction::between(&o, &p(1, 1));
        let sw = Direction::between(&o, &p(-1, -1));
        assert!(east.strictly_within_ccw(&north, &ne));
        assert!(!east.strictly_within_ccw(&north, &sw));
        assert!(north.strictly_within_ccw(&east, &sw));
        assert!(east.strictly_within_ccw(&east, &sw));
        assert!(!east.strictly_within_ccw(&east, &east));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn pt() -> impl Strategy<Value = Point> {
            (-20i64..20, -20i64..20).prop_map(|(x, y)| Point::from_ints(x, y))
        }

        proptest! {
            #[test]
            fn orient_antisymmetric(a in pt(), b in pt(), c in pt()) {
                let o = orient(&a, &b, &c);
                prop_assert_eq!(orient(&b, &a, &c), o.reversed());
                prop_assert_eq!(orient(&a, &c, &b), o.reversed());
                prop_assert_eq!(orient(&c, &b, &a), o.reversed());
            }

            #[test]
            fn segments_cross_symmetric(a in pt(), b in pt(), c in pt(), d in pt()) {
                prop_assume!(a != b && c != d);
                let s1 = Segment::new(a.clone(), b.clone()).unwrap();
                let s2 = Segment::new(c.clone(), d.clone()).unwrap();
                let k = segments_cross(&s1, &s2);
                prop_assert_eq!(&k, &segments_cross(&s2, &s1));
                if let CrossKind::ProperCross(x) = k {
                    // strictly interior to both: parameter in (0,1) along each
                    for (p0, p1) in [(&a, &b), (&c, &d)] {
                        prop_assert!(point_on_open_segment(p0, p1, &x));
                    }
                }
            }

            #[test]
            fn strict_convexity_reverse_invariant(pts in proptest::collection::vec(pt(), 3..8)) {
                let mut rev = pts.clone();
                rev.reverse();
                prop_assert_eq!(is_strictly_convex(&pts), is_strictly_convex(&rev));
            }

            #[test]
            fn half_disk_samples_inside(u in pt(), v in pt(), apex in pt()) {
                prop_assume!(orient(&u, &v, &apex) != Orientation::Collinear);
                let r = half_disk_fit_radius(&u, &v, &apex).unwrap();
                let (ua, va, aa) = (u.approx(), v.approx(), apex.approx());
                let w = ApproxPoint::new((ua.x + va.x) / 2.0, (ua.y + va.y) / 2.0);
                let len = ua.dist(&va);
                let e1 = ((va.x - ua.x) / len, (va.y - ua.y) / len);
                let side = if orient(&u, &v, &apex) == Orientation::CounterClockwise { 1.0 } else { -1.0 };
                let e2 = (-e1.1 * side, e1.0 * side);
                let tri = vec![u.clone(), v.clone(), apex.clone()];
                prop_assert!(aa.is_finite());
                let samples = 500;
                // shrink by a relative 1e-9 and lift off the base by 1e-10 to absorb
                // the float rounding of the sample coordinates
                let rr = r * (1.0 - 1e-9);
                let lift = 1e-10 * r;
                for i in 0..samples {
                    let th = std::f64::consts::PI * i as f64 / (samples - 1) as f64;
                    let x = w.x + rr * (th.cos() * e1.0 + th.sin() * e2.0) + lift * e2.0;
                    let y = w.y + rr * (th.cos() * e1.1 + th.sin() * e2.1) + lift * e2.1;
                    let q = Point::from_f64(x, y).unwrap();
                    prop_assert_ne!(locate_unchecked(&q, &tri), Location::Outside);
                }
            }
        }
    }
}
