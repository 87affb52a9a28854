//! Short Weierstrass curves y^2 = x^3 + a4 x + b over F_q, characteristic >= 5.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::budget::{self, Budget};
use crate::error::{Error, Result};
use crate::finite_field::{Embedding, Field, FieldElement, QuadraticExtension};

/// A rational point. `Infinity` sorts before every affine point and affine
/// points sort lexicographically by (x, y); this is the coordinate order of
/// every code built from a curve.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Infinity,
    Affine { x: FieldElement, y: FieldElement },
}

impl Point {
    pub fn affine(x: FieldElement, y: FieldElement) -> Point {
        Point::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&FieldElement> {
        match self {
            Point::Infinity => None,
            Point::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&FieldElement> {
        match self {
            Point::Infinity => None,
            Point::Affine { y, .. } => Some(y),
        }
    }

    /// Parses `inf` or `(x;y)` with field-element encodings.
    pub fn parse(field: &Field, s: &str) -> Result<Point> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Point::Infinity);
        }
        let inner = s
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("bad point {s:?}")))?;
        let (x, y) = inner
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("bad point {s:?}")))?;
        Ok(Point::affine(field.parse_element(x)?, field.parse_element(y)?))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => f.write_str("inf"),
            Point::Affine { x, y } => write!(f, "({x};{y})"),
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Invariant factors of E(F_q) ≅ Z_{n1} ⊕ Z_{n2}, n1 | n2; n1 = 1 when cyclic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStructure {
    pub n1: u64,
    pub n2: u64,
}

impl GroupStructure {
    pub fn order(&self) -> u64 {
        self.n1 * self.n2
    }

    pub fn is_cyclic(&self) -> bool {
        self.n1 == 1
    }
}

impl fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n1 == 1 {
            write!(f, "{}", self.n2)
        } else {
            write!(f, "{}x{}", self.n1, self.n2)
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Curve {
    field: Field,
    a4: FieldElement,
    b: FieldElement,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Curve({})", self.encode())
    }
}

impl Curve {
    pub fn new(a4: FieldElement, b: FieldElement) -> Result<Curve> {
        if a4.field() != b.field() {
            return Err(Error::FieldMismatch);
        }
        let field = a4.field().clone();
        let disc = &(&field.from_int(4) * &a4.pow(3)) + &(&field.from_int(27) * &b.square());
        if disc.is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(Curve { field, a4, b })
    }

    /// Convenience constructor with integer coefficients.
    pub fn from_ints(field: &Field, a4: i64, b: i64) -> Result<Curve> {
        Curve::new(field.from_int(a4), field.from_int(b))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn a4(&self) -> &FieldElement {
        &self.a4
    }

    pub fn b(&self) -> &FieldElement {
        &self.b
    }

    /// `q=<p>^<t>;a4=<enc>;b=<enc>`.
    pub fn encode(&self) -> String {
        format!(
            "q={}^{};a4={};b={}",
            self.field.characteristic(),
            self.field.degree(),
            self.a4,
            self.b
        )
    }

    /// Parses [`Curve::encode`] output against a field of matching order.
    pub fn parse(field: &Field, s: &str) -> Result<Curve> {
        let mut a4 = None;
        let mut b = None;
        let mut q = None;
        for part in s.split(';') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad curve field {part:?}")))?;
            match key.trim() {
                "q" => q = Some(value.trim().to_string()),
                "a4" => a4 = Some(field.parse_element(value)?),
                "b" => b = Some(field.parse_element(value)?),
                other => return Err(Error::Parse(format!("unknown curve key {other:?}"))),
            }
        }
        let expected = format!("{}^{}", field.characteristic(), field.degree());
        if q.as_deref() != Some(expected.as_str()) {
            return Err(Error::Parse(format!("curve field {q:?} does not match {expected}")));
        }
        match (a4, b) {
            (Some(a4), Some(b)) => Curve::new(a4, b),
            _ => Err(Error::Parse("curve needs a4 and b".into())),
        }
    }

    /// x^3 + a4 x + b.
    pub fn rhs(&self, x: &FieldElement) -> FieldElement {
        &(&(&x.square() + &self.a4) * x) + &self.b
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { x, y } => {
                x.field() == &self.field && y.field() == &self.field && y.square() == self.rhs(x)
            }
        }
    }

    fn ensure(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointNotOnCurve)
        }
    }

    /// Validated affine point.
    pub fn point(&self, x: FieldElement, y: FieldElement) -> Result<Point> {
        let p = Point::affine(x, y);
        self.ensure(&p)?;
        Ok(p)
    }

    pub fn neg(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::affine(x.clone(), -y),
        }
    }

    /// Chord-tangent addition.
    pub fn add(&self, p: &Point, q: &Point) -> Result<Point> {
        self.ensure(p)?;
        self.ensure(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub(crate) fn add_unchecked(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let slope = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return Point::Infinity;
            }
            // tangent: (3x^2 + a4) / 2y
            let num = &(&self.field.from_int(3) * &x1.square()) + &self.a4;
            let den = y1 + y1;
            &num * &den.inverse().expect("2y != 0 off the 2-torsion")
        } else {
            &(y2 - y1) * &(x2 - x1).inverse().expect("x1 != x2")
        };
        let x3 = &(&slope.square() - x1) - x2;
        let y3 = &(&slope * &(x1 - &x3)) - y1;
        Point::affine(x3, y3)
    }

    /// [n]P by double-and-add; negative n goes through the negation.
    pub fn scalar_mul(&self, n: i64, p: &Point) -> Result<Point> {
        self.ensure(p)?;
        let base = if n < 0 { self.neg(p) } else { p.clone() };
        Ok(self.mul_unchecked(n.unsigned_abs(), &base))
    }

    pub(crate) fn mul_unchecked(&self, mut n: u64, p: &Point) -> Point {
        let mut acc = Point::Infinity;
        let mut base = p.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.add_unchecked(&base, &base);
            }
        }
        acc
    }

    /// All rational points: infinity first, then affine points sorted by (x, y).
    pub fn points(&self, budget: &Budget) -> Result<Vec<Point>> {
        budget::check("affine candidates", Some(self.field.order()), budget.field_points)?;
        let mut out = vec![Point::Infinity];
        for x in self.field.elements() {
            let f = self.rhs(&x);
            if f.is_zero() {
                out.push(Point::affine(x, f));
            } else if f.is_square() {
                let r = f.sqrt()?;
                let s = -&r;
                let (lo, hi) = if r < s { (r, s) } else { (s, r) };
                out.push(Point::affine(x.clone(), lo));
                out.push(Point::affine(x, hi));
            }
        }
        Ok(out)
    }

    /// #E(F_q) from the quadratic character, without materializing points.
    pub fn count_points(&self, budget: &Budget) -> Result<u64> {
        budget::check("affine candidates", Some(self.field.order()), budget.field_points)?;
        let mut n = 1u64;
        for x in self.field.elements() {
            let f = self.rhs(&x);
            if f.is_zero() {
                n += 1;
            } else if f.is_square() {
                n += 2;
            }
        }
        Ok(n)
    }

    /// Order of a point in a group of known order `group_order`.
    pub fn point_order(&self, p: &Point, group_order: u64) -> u64 {
        let mut ord = group_order;
        for (r, _) in arith::factorize(group_order) {
            while ord % r == 0 && self.mul_unchecked(ord / r, p).is_infinity() {
                ord /= r;
            }
        }
        ord
    }

    pub fn group_structure(&self, budget: &Budget) -> Result<GroupStructure> {
        let points = self.points(budget)?;
        Ok(self.group_structure_of(&points))
    }

    /// Largest n1 with n1^2 | N, n1 | gcd(N, q - 1) and #E[n1] = n1^2.
    pub fn group_structure_of(&self, points: &[Point]) -> GroupStructure {
        let n = points.len() as u64;
        let g = arith::gcd(n, self.field.order() - 1);
        let n1 = arith::divisors(g)
            .into_iter()
            .rev()
            .filter(|&d| n % (d * d) == 0)
            .find(|&d| {
                d == 1
                    || points
                        .iter()
                        .filter(|p| self.mul_unchecked(d, p).is_infinity())
                        .count() as u64
                        == d * d
            })
            .unwrap_or(1);
        GroupStructure { n1, n2: n / n1 }
    }

    /// Coordinate-wise q-power map.
    pub fn frobenius(&self, p: &Point, q: u64) -> Result<Point> {
        self.ensure(p)?;
        Ok(match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::affine(x.frobenius(q)?, y.frobenius(q)?),
        })
    }

    /// The same equation over a larger field.
    pub fn base_change(&self, embedding: &Embedding) -> Result<Curve> {
        Curve::new(embedding.apply(&self.a4)?, embedding.apply(&self.b)?)
    }

    /// The canonically first x in F_q with x^3 + a4 x + b a non-square, lifted
    /// to Q = (x, sqrt(f(x))) over F_{q^2}. Then y_Q is outside F_q, so
    /// Frob(Q) = (x, -y_Q) = -Q.
    pub fn find_trace_zero_point(&self, ext: &QuadraticExtension) -> Result<TraceZeroPoint> {
        if ext.base != self.field {
            return Err(Error::NoEmbedding);
        }
        let curve = self.base_change(&ext.embedding)?;
        for x in self.field.elements() {
            let f = self.rhs(&x);
            if f.is_square() {
                continue;
            }
            let x_ext = ext.embed(&x)?;
            let y = ext.embed(&f)?.sqrt()?;
            let q = curve.point(x_ext, y)?;
            let conjugate = curve.frobenius(&q, ext.q())?;
            if !curve.add_unchecked(&q, &conjugate).is_infinity() {
                return Err(Error::Internal("Q + Frob(Q) != O".into()));
            }
            return Ok(TraceZeroPoint {
                curve,
                x_base: x,
                point: q,
                conjugate,
            });
        }
        // Q + Frob(Q) = O with Q not rational forces x_Q in F_q and f(x_Q) a non-square
        Err(Error::NotFound(format!(
            "x^3 + a4 x + b is a square for every x in F_{}, so no trace-zero point lies outside E(F_q)",
            self.field.order()
        )))
    }
}

/// A point Q of E(F_{q^2}) \ E(F_q) with Q + Frob(Q) = O.
#[derive(Debug, Clone)]
pub struct TraceZeroPoint {
    /// The curve base-changed to F_{q^2}.
    pub curve: Curve,
    /// x_Q as an element of F_q.
    pub x_base: FieldElement,
    pub point: Point,
    pub conjugate: Point,
}
