//! Exact arithmetic in F_p and F_{p^m} = F_p[x]/(f).
//!
//! Elements are dense little-endian coefficient vectors (constant term first)
//! reduced modulo the monic irreducible `f`. The canonical order on elements is
//! lexicographic on that vector, so the constant term is the most significant
//! digit; enumeration helpers and "smallest" choices all follow this order.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Deref, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::arith;
use crate::error::{Error, Result};

type Coeffs = SmallVec<[u64; 4]>;

/// Description of F_{p^m}: characteristic, degree and the monic modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    characteristic: u64,
    degree: usize,
    /// m + 1 coefficients, constant term first, leading coefficient 1.
    modulus: Vec<u64>,
    order: u64,
}

impl FieldSpec {
    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// p^m.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_prime_field(&self) -> bool {
        self.degree == 1
    }

    /// Modulus rendered as a polynomial in x, e.g. `x^2+4`.
    pub fn modulus_string(&self) -> String {
        poly_to_string(&self.modulus)
    }
}

/// Shared handle to a [`FieldSpec`].
#[derive(Clone)]
pub struct Field(Arc<FieldSpec>);

impl Deref for Field {
    type Target = FieldSpec;
    fn deref(&self) -> &FieldSpec {
        &self.0
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 1 {
            write!(f, "F_{}", self.characteristic)
        } else {
            write!(f, "F_{}^{}[{}]", self.characteristic, self.degree, self.modulus_string())
        }
    }
}

impl Field {
    /// The prime field F_p, p >= 5.
    pub fn prime(p: u64) -> Result<Field> {
        Field::new(p, vec![0, 1])
    }

    /// F_p[x]/(modulus). The modulus must be monic and irreducible.
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Field> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p < 5 {
            return Err(Error::UnsupportedCharacteristic(p));
        }
        let modulus: Vec<u64> = modulus.into_iter().map(|c| c % p).collect();
        if modulus.len() < 2 {
            return Err(Error::InvalidModulus("degree must be at least 1".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidModulus(format!(
                "{} is not monic",
                poly_to_string(&modulus)
            )));
        }
        let degree = modulus.len() - 1;
        let order = (p as u128).checked_pow(degree as u32).filter(|&o| o <= 1u128 << 32);
        let Some(order) = order else {
            return Err(Error::FieldTooLarge);
        };
        if !poly::is_irreducible(&modulus, p) {
            return Err(Error::InvalidModulus(format!(
                "{} is reducible over F_{}",
                poly_to_string(&modulus),
                p
            )));
        }
        Ok(Field(Arc::new(FieldSpec {
            characteristic: p,
            degree,
            modulus,
            order: order as u64,
        })))
    }

    /// F_{p^m} with the conventional modulus: `x` for m = 1, `x^2 - n` with `n`
    /// the smallest non-square >= 2 for m = 2, otherwise the canonically
    /// smallest monic irreducible of degree m.
    pub fn with_default_modulus(p: u64, m: usize) -> Result<Field> {
        if m == 0 {
            return Err(Error::InvalidModulus("degree must be at least 1".into()));
        }
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p < 5 {
            return Err(Error::UnsupportedCharacteristic(p));
        }
        match m {
            1 => Field::prime(p),
            2 => {
                let n = (2..p)
                    .find(|&n| arith::pow_mod(n, (p - 1) / 2, p) == p - 1)
                    .expect("odd prime has a non-square");
                Field::new(p, vec![p - n, 0, 1])
            }
            _ => {
                if (p as u128).checked_pow(m as u32).is_none_or(|o| o > 1u128 << 32) {
                    return Err(Error::FieldTooLarge);
                }
                let modulus = poly::smallest_irreducible(p, m);
                Field::new(p, modulus)
            }
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            coeffs: SmallVec::from_elem(0, self.degree),
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// Image of an integer under Z -> F_p -> F_{p^m}.
    pub fn from_int(&self, v: i64) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = v.rem_euclid(self.characteristic as i64) as u64;
        e
    }

    /// The class of x in F_p[x]/(f); a field generator when m > 1.
    pub fn generator(&self) -> FieldElement {
        if self.degree == 1 {
            // x ≡ -f_0 when f = x + f_0
            return self.from_coeffs(&[(self.characteristic - self.modulus[0]) % self.characteristic]);
        }
        let mut e = self.zero();
        e.coeffs[1] = 1;
        e
    }

    /// Element from up to m coefficients (constant first); entries are reduced mod p.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        assert!(coeffs.len() <= self.degree, "too many coefficients");
        let mut e = self.zero();
        for (slot, &c) in e.coeffs.iter_mut().zip(coeffs) {
            *slot = c % self.characteristic;
        }
        e
    }

    /// The element at position `index` of the canonical enumeration.
    pub fn element_at(&self, mut index: u64) -> FieldElement {
        debug_assert!(index < self.order);
        let p = self.characteristic;
        let mut e = self.zero();
        for slot in e.coeffs.iter_mut().rev() {
            *slot = index % p;
            index /= p;
        }
        e
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(move |i| self.element_at(i))
    }

    /// Parses the comma-separated coefficient encoding (`"0,6"` is 6α).
    /// Fewer than m entries are zero-padded; values are reduced mod p.
    pub fn parse_element(&self, s: &str) -> Result<FieldElement> {
        let parts: Vec<&str> = s.trim().split(',').map(str::trim).collect();
        if parts.is_empty() || parts.len() > self.degree || parts.iter().any(|p| p.is_empty()) {
            return Err(Error::Parse(format!(
                "expected 1..={} comma-separated coefficients, got {s:?}",
                self.degree
            )));
        }
        let p = self.characteristic as i64;
        let mut e = self.zero();
        for (slot, part) in e.coeffs.iter_mut().zip(&parts) {
            let v: i64 = part
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {part:?}")))?;
            *slot = v.rem_euclid(p) as u64;
        }
        Ok(e)
    }
}

/// An element of F_{p^m} in canonical (fully reduced) form.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    coeffs: Coeffs,
}

/// The four operations of [`FieldElement::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// True when the element lies in the prime subfield.
    pub fn is_prime_subfield(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Position in the canonical enumeration.
    pub fn index(&self) -> u64 {
        let p = self.field.characteristic;
        self.coeffs.iter().fold(0, |acc, &c| acc * p + c)
    }

    /// Checked arithmetic: fails on mismatched fields and division by zero.
    pub fn apply(&self, op: ArithOp, rhs: &FieldElement) -> Result<FieldElement> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch);
        }
        Ok(match op {
            ArithOp::Add => self.add_unchecked(rhs),
            ArithOp::Sub => self.sub_unchecked(rhs),
            ArithOp::Mul => self.mul_unchecked(rhs),
            ArithOp::Div => self.mul_unchecked(&rhs.inverse()?),
        })
    }

    pub fn checked_div(&self, rhs: &FieldElement) -> Result<FieldElement> {
        self.apply(ArithOp::Div, rhs)
    }

    fn add_unchecked(&self, rhs: &FieldElement) -> FieldElement {
        let p = self.field.characteristic;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(&a, &b)| {
                let s = a + b;
                if s >= p {
                    s - p
                } else {
                    s
                }
            })
            .collect();
        FieldElement { field: self.field.clone(), coeffs }
    }

    fn sub_unchecked(&self, rhs: &FieldElement) -> FieldElement {
        let p = self.field.characteristic;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(&a, &b)| if a >= b { a - b } else { a + p - b })
            .collect();
        FieldElement { field: self.field.clone(), coeffs }
    }

    fn mul_unchecked(&self, rhs: &FieldElement) -> FieldElement {
        let p = self.field.characteristic;
        let m = self.field.degree;
        if m == 1 {
            let mut coeffs = Coeffs::new();
            coeffs.push(self.coeffs[0] * rhs.coeffs[0] % p);
            return FieldElement { field: self.field.clone(), coeffs };
        }
        let mut prod: SmallVec<[u64; 8]> = SmallVec::from_elem(0, 2 * m - 1);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % p;
            }
        }
        let modulus = &self.field.modulus;
        for top in (m..2 * m - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for j in 0..m {
                let idx = top - m + j;
                prod[idx] = (prod[idx] + (p - c) * modulus[j]) % p;
            }
        }
        FieldElement {
            field: self.field.clone(),
            coeffs: prod[..m].iter().copied().collect(),
        }
    }

    pub fn square(&self) -> FieldElement {
        self.mul_unchecked(self)
    }

    pub fn pow(&self, mut exp: u64) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm on polynomials.
    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.field.characteristic;
        let inv = poly::inverse_mod(&self.coeffs, &self.field.modulus, p);
        let mut out = self.field.zero();
        for (slot, c) in out.coeffs.iter_mut().zip(inv) {
            *slot = c;
        }
        Ok(out)
    }

    /// Euler's criterion: 0 or a^((p^m - 1)/2) = 1.
    pub fn is_square(&self) -> bool {
        self.is_zero() || self.pow((self.field.order - 1) / 2).is_one()
    }

    /// A square root; of the two roots the canonically smaller one is returned.
    pub fn sqrt(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        if !self.is_square() {
            return Err(Error::NotASquare);
        }
        let order = self.field.order;
        let root = if order % 4 == 3 {
            self.pow((order + 1) / 4)
        } else {
            self.tonelli_shanks()
        };
        debug_assert!(&root.square() == self);
        let other = -&root;
        Ok(if other < root { other } else { root })
    }

    fn tonelli_shanks(&self) -> FieldElement {
        let field = &self.field;
        let s = (field.order - 1).trailing_zeros();
        let t = (field.order - 1) >> s;
        let z = field
            .elements()
            .find(|e| !e.is_square())
            .expect("odd-order field has a non-square");
        let mut m = s;
        let mut c = z.pow(t);
        let mut r = self.pow(t.div_ceil(2));
        let mut u = self.pow(t);
        while !u.is_one() {
            let mut i = 0;
            let mut probe = u.clone();
            while !probe.is_one() {
                probe = probe.square();
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = b.square();
            }
            r = r.mul_unchecked(&b);
            c = b.square();
            u = u.mul_unchecked(&c);
            m = i;
        }
        r
    }

    /// a^q, where q must be a positive power of the characteristic.
    pub fn frobenius(&self, q: u64) -> Result<FieldElement> {
        let p = self.field.characteristic;
        match arith::prime_power(q) {
            Some((base, _)) if base == p => Ok(self.pow(q)),
            _ => Err(Error::NotPowerOfCharacteristic { q, p }),
        }
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field == other.field
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            /// Panics when the operands come from different fields.
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                assert!(self.field == rhs.field, "field mismatch");
                self.$inner(rhs)
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, add_unchecked);
binop!(Sub, sub, sub_unchecked);
binop!(Mul, mul, mul_unchecked);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field.zero().sub_unchecked(self)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// A ring embedding F_q -> F_{q^r} fixing F_p, determined by the image of the
/// generator of the source field.
#[derive(Debug, Clone)]
pub struct Embedding {
    source: Field,
    target: Field,
    generator_image: FieldElement,
}

impl Embedding {
    /// Builds the embedding whose generator image is the canonically smallest
    /// root of the source modulus in the target field.
    pub fn new(source: &Field, target: &Field) -> Result<Embedding> {
        if source.characteristic != target.characteristic || target.degree % source.degree != 0 {
            return Err(Error::NoEmbedding);
        }
        let generator_image = if source.degree == 1 {
            target.from_int(source.generator().coeffs[0] as i64)
        } else {
            target
                .elements()
                .find(|e| poly_eval(&source.modulus, e).is_zero())
                .ok_or(Error::NoEmbedding)?
        };
        Ok(Embedding {
            source: source.clone(),
            target: target.clone(),
            generator_image,
        })
    }

    pub fn source(&self) -> &Field {
        &self.source
    }

    pub fn target(&self) -> &Field {
        &self.target
    }

    /// Image of `a` (an element of the source field).
    pub fn apply(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.field != self.source {
            return Err(Error::NoEmbedding);
        }
        if self.source.degree == 1 {
            return Ok(self.target.from_int(a.coeffs[0] as i64));
        }
        let mut acc = self.target.zero();
        for &c in a.coeffs.iter().rev() {
            acc = &(&acc * &self.generator_image) + &self.target.from_int(c as i64);
        }
        Ok(acc)
    }

    /// Whether `b` lies in the image of the source field.
    pub fn contains(&self, b: &FieldElement) -> bool {
        b.field == self.target && b.pow(self.source.order) == *b
    }

    /// Inverse image of `b`, if it lies in the embedded copy.
    pub fn preimage(&self, b: &FieldElement) -> Option<FieldElement> {
        if !self.contains(b) {
            return None;
        }
        if self.source.degree == 1 {
            return Some(self.source.from_int(b.coeffs[0] as i64));
        }
        self.source
            .elements()
            .find(|a| self.apply(a).as_ref() == Ok(b))
    }
}

/// A base field F_q together with F_{q^2} and the embedding between them.
#[derive(Debug, Clone)]
pub struct QuadraticExtension {
    pub base: Field,
    pub ext: Field,
    pub embedding: Embedding,
}

impl QuadraticExtension {
    /// Uses the default modulus of degree 2m over F_p.
    pub fn new(base: &Field) -> Result<QuadraticExtension> {
        let ext = Field::with_default_modulus(base.characteristic, 2 * base.degree)?;
        Self::from_fields(base, ext)
    }

    /// Uses an explicit monic modulus of degree 2m over F_p (e.g. `[4, 0, 1]` for x^2+4).
    pub fn with_modulus(base: &Field, modulus: Vec<u64>) -> Result<QuadraticExtension> {
        if modulus.len() != 2 * base.degree + 1 {
            return Err(Error::InvalidModulus(format!(
                "extension modulus must have degree {}",
                2 * base.degree
            )));
        }
        let ext = Field::new(base.characteristic, modulus)?;
        Self::from_fields(base, ext)
    }

    fn from_fields(base: &Field, ext: Field) -> Result<QuadraticExtension> {
        let embedding = Embedding::new(base, &ext)?;
        Ok(QuadraticExtension {
            base: base.clone(),
            ext,
            embedding,
        })
    }

    pub fn embed(&self, a: &FieldElement) -> Result<FieldElement> {
        self.embedding.apply(a)
    }

    /// The q of F_q.
    pub fn q(&self) -> u64 {
        self.base.order
    }
}

fn poly_eval(coeffs: &[u64], at: &FieldElement) -> FieldElement {
    let field = at.field();
    coeffs.iter().rev().fold(field.zero(), |acc, &c| {
        &(&acc * at) + &field.from_int(c as i64)
    })
}

fn poly_to_string(coeffs: &[u64]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
        terms.push(match i {
            0 => coef,
            1 => format!("{coef}x"),
            _ => format!("{coef}x^{i}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// Parses a modulus over F_p, either as comma-separated coefficients with the
/// constant term first (`11,0,1`) or as text (`x^2+11`, `x^2-3`, `x^3+2x+1`).
pub fn parse_modulus(s: &str, p: u64) -> Result<Vec<u64>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad modulus {s:?}"));
    let mut coeffs: Vec<i64> = Vec::new();
    if s.contains('x') {
        let mut add = |deg: usize, c: i64| {
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, 0);
            }
            coeffs[deg] += c;
        };
        let mut term = String::new();
        let mut terms = Vec::new();
        for ch in s.chars() {
            if (ch == '+' || ch == '-') && !term.is_empty() && !term.ends_with('^') {
                terms.push(std::mem::take(&mut term));
            }
            term.push(ch);
        }
        terms.push(term);
        for t in terms {
            let (sign, body) = match t.strip_prefix('-') {
                Some(b) => (-1, b),
                None => (1, t.strip_prefix('+').unwrap_or(&t)),
            };
            match body.split_once('x') {
                None => add(0, sign * body.parse::<i64>().map_err(|_| bad())?),
                Some((c, e)) => {
                    let c = c.trim_end_matches('*');
                    let c = if c.is_empty() { 1 } else { c.parse::<i64>().map_err(|_| bad())? };
                    let e = match e.strip_prefix('^') {
                        Some(e) => e.parse::<usize>().map_err(|_| bad())?,
                        None if e.is_empty() => 1,
                        None => return Err(bad()),
                    };
                    add(e, sign * c);
                }
            }
        }
    } else {
        for part in s.split(',') {
            coeffs.push(part.parse::<i64>().map_err(|_| bad())?);
        }
    }
    Ok(coeffs.into_iter().map(|c| c.rem_euclid(p as i64) as u64).collect())
}

impl FromStr for ArithOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "add" => Ok(ArithOp::Add),
            "sub" => Ok(ArithOp::Sub),
            "mul" => Ok(ArithOp::Mul),
            "div" => Ok(ArithOp::Div),
            other => Err(Error::Parse(format!("unknown operation {other:?}"))),
        }
    }
}

/// Dense polynomials over F_p, used for modulus checks and inversion.
mod poly {
    fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    fn inv_mod_p(a: u64, p: u64) -> u64 {
        crate::arith::pow_mod(a, p - 2, p)
    }

    /// (quotient, remainder) of a / b; b nonzero.
    fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let mut b = b.to_vec();
        trim(&mut b);
        let db = b.len() - 1;
        let lead_inv = inv_mod_p(b[db], p);
        if r.len() < b.len() {
            return (vec![], r);
        }
        let mut q = vec![0u64; r.len() - db];
        while r.len() > db && !r.is_empty() {
            let shift = r.len() - 1 - db;
            let c = r[r.len() - 1] * lead_inv % p;
            q[shift] = c;
            for (j, &bj) in b.iter().enumerate() {
                let idx = shift + j;
                r[idx] = (r[idx] + (p - c) * bj % p) % p;
            }
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    fn mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        divrem(&mul(a, b, p), f, p).1
    }

    fn powmod(base: &[u64], mut exp: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = divrem(base, f, p).1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mulmod(&acc, &b, f, p);
            }
            b = mulmod(&b, &b, f, p);
            exp >>= 1;
        }
        acc
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = divrem(&a, &b, p).1;
            a = b;
            b = r;
        }
        a
    }

    /// Rabin-style test: no roots (for small degree) and gcd(f, x^{p^i} - x) = 1
    /// for every i <= deg/2.
    pub(super) fn is_irreducible(f: &[u64], p: u64) -> bool {
        let deg = f.len() - 1;
        if deg == 1 {
            return true;
        }
        if deg <= 3 {
            let has_root = (0..p).any(|x| {
                f.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p) == 0
            });
            return !has_root;
        }
        let x = vec![0u64, 1];
        let mut h = x.clone();
        for _ in 1..=deg / 2 {
            h = powmod(&h, p, f, p);
            let g = gcd(f, &sub(&h, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }

    /// Canonically smallest monic irreducible of degree m (lexicographic on
    /// the non-leading coefficients, constant term first).
    pub(super) fn smallest_irreducible(p: u64, m: usize) -> Vec<u64> {
        let total = p.pow(m as u32);
        for idx in 0..total {
            let mut f = vec![0u64; m + 1];
            let mut rest = idx;
            for slot in f[..m].iter_mut().rev() {
                *slot = rest % p;
                rest /= p;
            }
            f[m] = 1;
            if f[0] != 0 && is_irreducible(&f, p) {
                return f;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// a^{-1} mod f by the extended Euclidean algorithm; a nonzero mod f.
    pub(super) fn inverse_mod(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        let (mut r0, mut r1) = (f.to_vec(), a.to_vec());
        trim(&mut r1);
        let (mut s0, mut s1) = (vec![], vec![1u64]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s = sub(&s0, &mul(&q, &s1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r0 is a nonzero constant c; s0 * a ≡ c.
        let c_inv = inv_mod_p(r0[0], p);
        let mut out: Vec<u64> = s0.iter().map(|&v| v * c_inv % p).collect();
        out.resize(f.len() - 1, 0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_forms() {
        assert_eq!(parse_modulus("11,0,1", 13).unwrap(), vec![11, 0, 1]);
        assert_eq!(parse_modulus("x^2+11", 13).unwrap(), vec![11, 0, 1]);
        assert_eq!(parse_modulus("x^2 - 3", 7).unwrap(), vec![4, 0, 1]);
        assert_eq!(parse_modulus("x^3+2x+1", 5).unwrap(), vec![1, 2, 0, 1]);
        assert_eq!(parse_modulus("-1,0,1", 7).unwrap(), vec![6, 0, 1]);
        assert!(parse_modulus("x^2+y", 7).is_err());
    }

    fn f7() -> Field {
        Field::prime(7).unwrap()
    }

    fn f49() -> Field {
        Field::new(7, vec![4, 0, 1]).unwrap()
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = f7();
        assert_eq!(&f.from_int(3) * &f.from_int(5), f.from_int(1));
        assert_eq!(f.from_int(6).inverse().unwrap(), f.from_int(6));
        assert_eq!(
            f.from_int(1).apply(ArithOp::Div, &f.zero()),
            Err(Error::DivisionByZero)
        );
        let other = Field::prime(11).unwrap();
        assert_eq!(
            f.from_int(1).apply(ArithOp::Add, &other.one()),
            Err(Error::FieldMismatch)
        );
    }

    #[test]
    fn alpha_squared_in_f49() {
        let f = f49();
        let alpha = f.generator();
        assert_eq!(&alpha * &alpha, f.from_int(3));
    }

    #[test]
    fn construction_rejects_bad_inputs() {
        assert_eq!(Field::prime(9).unwrap_err(), Error::NotPrime(9));
        assert_eq!(Field::prime(3).unwrap_err(), Error::UnsupportedCharacteristic(3));
        // x^2 + 11 over F_31 splits: -11 = 20 = 12^2
        assert!(matches!(Field::new(31, vec![11, 0, 1]), Err(Error::InvalidModulus(_))));
        assert!(matches!(Field::new(7, vec![4, 0, 2]), Err(Error::InvalidModulus(_))));
        assert!(Field::new(13, vec![11, 0, 1]).is_ok());
        assert_eq!(Field::with_default_modulus(1_000_003, 2).unwrap_err(), Error::FieldTooLarge);
    }

    #[test]
    fn default_quadratic_moduli() {
        // smallest non-square n >= 2, modulus x^2 - n
        assert_eq!(Field::with_default_modulus(7, 2).unwrap().modulus(), &[4, 0, 1]);
        assert_eq!(Field::with_default_modulus(13, 2).unwrap().modulus(), &[11, 0, 1]);
        assert_eq!(Field::with_default_modulus(31, 2).unwrap().modulus(), &[28, 0, 1]);
        assert_eq!(Field::with_default_modulus(43, 2).unwrap().modulus(), &[41, 0, 1]);
    }

    #[test]
    fn squares_in_f7() {
        let f = f7();
        assert!(!f.from_int(3).is_square());
        assert!(f.zero().is_square());
        assert!(f.from_int(2).is_square());
        assert_eq!(f.from_int(2).sqrt().unwrap(), f.from_int(3));
        assert_eq!(f.zero().sqrt().unwrap(), f.zero());
        assert_eq!(f.from_int(3).sqrt(), Err(Error::NotASquare));
    }

    #[test]
    fn sqrt_of_lifted_nonsquare() {
        let f = f49();
        let r = f.from_int(3).sqrt().unwrap();
        // roots are ±α = (0,1), (0,6); the smaller vector wins
        assert_eq!(r.coeffs(), &[0, 1]);
        let six_alpha = f.from_coeffs(&[0, 6]);
        assert_eq!(six_alpha.square(), f.from_int(3));
    }

    #[test]
    fn tonelli_shanks_path() {
        // 13 ≡ 1 mod 4 and 169 ≡ 1 mod 4 force the generic algorithm
        for field in [Field::prime(13).unwrap(), Field::with_default_modulus(13, 2).unwrap()] {
            let squares = field.elements().filter(|e| e.is_square()).count() as u64;
            assert_eq!(squares, (field.order() - 1) / 2 + 1);
            for e in field.elements() {
                let s = e.square();
                let r = s.sqrt().unwrap();
                assert_eq!(r.square(), s);
                assert!(r <= -&r);
            }
        }
    }

    #[test]
    fn frobenius_in_f49() {
        let f = f49();
        let six_alpha = f.from_coeffs(&[0, 6]);
        assert_eq!(six_alpha.frobenius(7).unwrap(), f.generator());
        assert_eq!(f.from_int(5).frobenius(7).unwrap(), f.from_int(5));
        assert_eq!(
            six_alpha.frobenius(6),
            Err(Error::NotPowerOfCharacteristic { q: 6, p: 7 })
        );
        for e in f.elements() {
            assert_eq!(e.frobenius(7).unwrap().frobenius(7).unwrap(), e);
        }
    }

    #[test]
    fn embeddings_fix_prime_field() {
        let ext = QuadraticExtension::with_modulus(&f7(), vec![4, 0, 1]).unwrap();
        assert_eq!(ext.embed(&f7().from_int(5)).unwrap().coeffs(), &[5, 0]);
        assert_eq!(ext.embed(&f7().zero()).unwrap().coeffs(), &[0, 0]);
        let f13 = Field::prime(13).unwrap();
        let ext13 = QuadraticExtension::with_modulus(&f13, vec![11, 0, 1]).unwrap();
        assert_eq!(ext13.embed(&f13.from_int(2)).unwrap(), ext13.ext.from_int(2));
        // wrong source
        assert_eq!(ext.embed(&f13.one()), Err(Error::NoEmbedding));
    }

    #[test]
    fn prime_power_embedding_is_a_homomorphism() {
        let f343 = Field::with_default_modulus(7, 3).unwrap();
        let ext = QuadraticExtension::new(&f343).unwrap();
        assert_eq!(ext.ext.degree(), 6);
        let elems: Vec<FieldElement> = f343.elements().step_by(17).collect();
        for a in &elems {
            let ea = ext.embed(a).unwrap();
            assert!(ext.embedding.contains(&ea));
            assert_eq!(ext.embedding.preimage(&ea).as_ref(), Some(a));
            for b in elems.iter().take(5) {
                let eb = ext.embed(b).unwrap();
                assert_eq!(ext.embed(&(a + b)).unwrap(), &ea + &eb);
                assert_eq!(ext.embed(&(a * b)).unwrap(), &ea * &eb);
            }
        }
    }

    #[test]
    fn element_encoding() {
        let f = f49();
        let e = f.parse_element("0,6").unwrap();
        assert_eq!(e, f.from_coeffs(&[0, 6]));
        assert_eq!(e.to_string(), "0,6");
        assert_eq!(f.parse_element("6").unwrap().to_string(), "6,0");
        assert_eq!(f.parse_element("-1,8").unwrap().to_string(), "6,1");
        assert!(f.parse_element("1,2,3").is_err());
        assert!(f.parse_element("a").is_err());
    }

    #[test]
    fn canonical_enumeration() {
        let f = f49();
        let all: Vec<FieldElement> = f.elements().collect();
        assert_eq!(all.len(), 49);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for (i, e) in all.iter().enumerate() {
            assert_eq!(e.index(), i as u64);
        }
    }

    #[test]
    fn modulus_rendering() {
        assert_eq!(f49().modulus_string(), "x^2+4");
        assert_eq!(Field::new(13, vec![11, 0, 1]).unwrap().modulus_string(), "x^2+11");
    }
}
