//! Parameter triples (q, p, t) admitting a curve with E(F_q) = Z_p + Z_p,
//! curve search, and the full construction pipeline as one catalog record.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::budget::Budget;
use crate::code_analysis::{certify_two_design, codeword_with_zeros, DesignMode};
use crate::code_builder::{build_code, classify_mds_nmds, CodeClass, Classification, DivisorSpec, LinearCode};
use crate::elliptic_curve::{Curve, GroupStructure, TraceZeroPoint};
use crate::error::{Error, Result};
use crate::finite_field::{Field, QuadraticExtension};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParameterTriple {
    pub q: u64,
    pub p: u64,
    /// p^2 - q - 1, the Frobenius trace of the curve.
    pub t: i64,
}

/// The checks behind [`search_parameters`], applied to one pair.
pub fn check_triple(q: u64, p: u64, require_positive_t: bool) -> Option<ParameterTriple> {
    if p < 3 || !arith::is_prime(p) || q < 7 || arith::prime_power(q).is_none() {
        return None;
    }
    let t = (p * p) as i64 - q as i64 - 1;
    let hasse = (t as i128) * (t as i128) <= 4 * q as i128;
    let coprime = arith::gcd(t.unsigned_abs(), q) == 1;
    let divides = (q - 1) % p == 0;
    (hasse && coprime && divides && (!require_positive_t || t >= 1)).then_some(ParameterTriple { q, p, t })
}

/// All triples with p <= p_max, sorted by q.
///
/// (p^2 - 1 - q)^2 <= 4q forces (p - 1)^2 <= q <= (p + 1)^2, and only
/// q = 1 mod p in that window are tried.
pub fn search_parameters(p_max: u64, require_positive_t: bool) -> Vec<ParameterTriple> {
    let primes: Vec<u64> = (3..=p_max).filter(|&p| arith::is_prime(p)).collect();
    let mut out: Vec<ParameterTriple> = primes
        .par_iter()
        .flat_map_iter(|&p| {
            let lo = (p - 1) * (p - 1);
            let hi = (p + 1) * (p + 1);
            let first = lo + (p + 1 - lo % p) % p;
            (first..=hi)
                .step_by(p as usize)
                .filter_map(move |q| check_triple(q, p, require_positive_t))
        })
        .collect();
    out.sort();
    out
}

/// Evidence that a found curve has the required group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveCertificate {
    pub points: u64,
    pub group: GroupStructure,
    /// [p]P = O checked for every rational point.
    pub torsion_verified: bool,
    /// `j0` for y^2 = x^3 + b, `general` for the fallback family.
    pub family: String,
}

/// F_q with its default modulus.
pub fn field_of_order(q: u64) -> Result<Field> {
    let (r, e) = arith::prime_power(q)
        .ok_or_else(|| Error::InvalidArgument(format!("{q} is not a prime power")))?;
    Field::with_default_modulus(r, e as usize)
}

/// Full check that `c` has exactly p^2 points, all p-torsion.
pub fn certify_curve(c: &Curve, p: u64, family: &str, budget: &Budget) -> Result<Option<CurveCertificate>> {
    if c.count_points(budget)? != p * p {
        return Ok(None);
    }
    let points = c.points(budget)?;
    for pt in &points {
        if !c.scalar_mul(p as i64, pt)?.is_infinity() {
            return Ok(None);
        }
    }
    Ok(Some(CurveCertificate {
        points: points.len() as u64,
        group: c.group_structure_of(&points),
        torsion_verified: true,
        family: family.into(),
    }))
}

/// First curve with E(F_q) = Z_p + Z_p: y^2 = x^3 + b over b != 0 in canonical
/// order, then y^2 = x^3 + a x + b over a != 0.
pub fn find_curve(q: u64, p: u64, budget: &Budget) -> Result<(Curve, CurveCertificate)> {
    let field = field_of_order(q)?;
    for b in field.elements().skip(1) {
        let c = Curve::new(field.zero(), b)?;
        if let Some(cert) = certify_curve(&c, p, "j0", budget)? {
            return Ok((c, cert));
        }
    }
    for a in field.elements().skip(1) {
        for b in field.elements() {
            let c = match Curve::new(a.clone(), b) {
                Ok(c) => c,
                Err(Error::SingularCurve) => continue,
                Err(e) => return Err(e),
            };
            if let Some(cert) = certify_curve(&c, p, "general", budget)? {
                return Ok((c, cert));
            }
        }
    }
    Err(Error::NotFound(format!("no curve over F_{q} with group Z_{p} + Z_{p}")))
}

/// `y^2 = x^3 + a x + b` with zero terms dropped.
pub fn curve_equation(c: &Curve) -> String {
    let mut s = String::from("y^2=x^3");
    if !c.a4().is_zero() {
        if c.a4().is_one() {
            s.push_str("+x");
        } else {
            s.push_str(&format!("+{}x", c.a4()));
        }
    }
    if !c.b().is_zero() {
        s.push_str(&format!("+{}", c.b()));
    }
    s
}

/// Overrides for [`build_pipeline`].
#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    /// Use y^2 = x^3 + b instead of searching.
    pub curve_b: Option<i64>,
    /// Monic modulus of F_{q^2}, constant term first.
    pub ext_modulus: Option<Vec<u64>>,
}

/// Everything the construction produces for one (q, p, k).
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub q: u64,
    pub p: u64,
    pub k: usize,
    pub curve: Curve,
    pub certificate: CurveCertificate,
    pub extension: QuadraticExtension,
    pub trace_zero: TraceZeroPoint,
    pub divisor: DivisorSpec,
    pub code: LinearCode,
    pub classification: Classification,
}

pub fn check_k(p: u64, k: u64) -> Result<()> {
    if p == 0 || k % p != 0 {
        return Err(Error::Hypothesis(format!("k must be divisible by p (p = {p}, k = {k})")));
    }
    if k == 0 || 2 * k >= p * p {
        return Err(Error::Hypothesis(format!("need 0 < k < p^2/2, got k = {k}, p = {p}")));
    }
    Ok(())
}

/// Curve, trace-zero point, divisor, code and MDS/NMDS class.
pub fn build_pipeline(q: u64, p: u64, k: u64, opts: &PipelineOptions, budget: &Budget) -> Result<Pipeline> {
    check_k(p, k)?;
    let (curve, certificate) = match opts.curve_b {
        Some(b) => {
            let field = field_of_order(q)?;
            let c = Curve::from_ints(&field, 0, b)?;
            let cert = certify_curve(&c, p, "j0", budget)?.ok_or_else(|| {
                Error::Hypothesis(format!("{} does not have group Z_{p} + Z_{p}", curve_equation(&c)))
            })?;
            (c, cert)
        }
        None => find_curve(q, p, budget)?,
    };
    let extension = match &opts.ext_modulus {
        Some(m) => QuadraticExtension::with_modulus(curve.field(), m.clone())?,
        None => QuadraticExtension::new(curve.field())?,
    };
    let trace_zero = curve.find_trace_zero_point(&extension)?;
    let divisor = DivisorSpec::new(&trace_zero, k as usize)?;
    let code = build_code(&curve, &divisor, budget)?;
    let classification = classify_mds_nmds(&curve, &divisor, budget)?;
    Ok(Pipeline {
        q,
        p,
        k: k as usize,
        curve,
        certificate,
        extension,
        trace_zero,
        divisor,
        code,
        classification,
    })
}

impl Pipeline {
    /// Minimum distance: n - 2k for NMDS (confirmed by a codeword of that
    /// weight), n - 2k + 1 for MDS.
    pub fn min_distance(&self) -> Result<usize> {
        let n = self.code.len();
        let two_k = 2 * self.k;
        if self.classification.class == CodeClass::Mds {
            return Ok(n - two_k + 1);
        }
        // 2k/p full cosets of one cyclic factor sum to zero; with the labeling
        // index a*p + b these are exactly the labels below 2k.
        let labels = &self.classification.labeling.labels;
        let zeros: Vec<usize> = (0..n).filter(|&i| (labels[i] as usize) < two_k).collect();
        let cw = codeword_with_zeros(&self.code, &zeros)?
            .ok_or_else(|| Error::CertificationMismatch("no codeword vanishes on a zero-sum subset".into()))?;
        let w = cw.iter().filter(|c| !c.is_zero()).count();
        if w != n - two_k {
            return Err(Error::CertificationMismatch(format!(
                "witness codeword has weight {w}, expected {}",
                n - two_k
            )));
        }
        Ok(w)
    }
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignSummary {
    pub t: u32,
    #[serde(with = "decimal")]
    pub lambda: BigUint,
    pub mode: DesignMode,
}

/// One line of the catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub q: u64,
    pub p: u64,
    pub t: i64,
    pub curve: String,
    pub group: String,
    pub ext_modulus: String,
    #[serde(rename = "xQ")]
    pub x_q: String,
    pub k: u64,
    pub n: u64,
    pub dim: u64,
    pub dmin: u64,
    pub nmds: bool,
    pub design: DesignSummary,
}

impl Pipeline {
    pub fn record(&self, budget: &Budget) -> Result<CatalogRecord> {
        let cert = certify_two_design(&self.curve, &self.divisor, budget)?;
        Ok(CatalogRecord {
            q: self.q,
            p: self.p,
            t: (self.p * self.p) as i64 - self.q as i64 - 1,
            curve: curve_equation(&self.curve),
            group: self.certificate.group.to_string(),
            ext_modulus: self.extension.ext.modulus_string(),
            x_q: self.trace_zero.x_base.to_string(),
            k: self.k as u64,
            n: self.code.len() as u64,
            dim: self.code.dim() as u64,
            dmin: self.min_distance()? as u64,
            nmds: self.classification.class == CodeClass::Nmds,
            design: DesignSummary {
                t: 2,
                lambda: cert.lambda,
                mode: cert.mode,
            },
        })
    }
}

/// [`build_pipeline`] followed by certification, as a catalog record.
pub fn build_table_row(q: u64, p: u64, k: u64, opts: &PipelineOptions, budget: &Budget) -> Result<CatalogRecord> {
    build_pipeline(q, p, k, opts, budget)?.record(budget)
}

/// The (q, p) pairs of the published curve table, smallest first.
pub const CURVE_TABLE: [(u64, u64); 9] = [
    (7, 3),
    (13, 3),
    (31, 5),
    (43, 7),
    (157, 13),
    (307, 17),
    (3541, 59),
    (4423, 67),
    (5113, 71),
];
