use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::sweep;
use crate::arith;
use crate::budget::Budget;
use crate::code_builder::{label_points, DivisorSpec, LinearCode};
use crate::elliptic_curve::Curve;
use crate::error::{Error, Result};
use crate::finite_field::FieldElement;
use crate::group_designs::{
    label_sum, labeled_subsets_with_sum, verify_design, DesignCheckReport, DesignInstance,
};
use crate::linalg;

/// Supports of the weight-w codewords, one block per scalar class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportFamily {
    pub weight: usize,
    pub blocks: Vec<Vec<usize>>,
    /// Blocks are taken once per class of nonzero multiples.
    pub divided: bool,
}

/// Supports of the minimum-weight codewords of the curve code: complements
/// of the point subsets of size 2k whose group sum is the divisor's point
/// sum (the identity). The smaller side of the complement pair is enumerated.
pub fn min_weight_supports(c: &Curve, d: &DivisorSpec, budget: &Budget) -> Result<SupportFamily> {
    if !d.sum_point()?.is_infinity() {
        return Err(Error::Hypothesis("divisor point sum is not the identity".into()));
    }
    let points = c.points(budget)?;
    let n = points.len();
    let two_k = d.degree();
    if two_k >= n {
        return Err(Error::InvalidArgument(format!("2k = {two_k} must be below n = {n}")));
    }
    let labeling = label_points(c, &points)?;
    let g = &labeling.group;
    let labels = &labeling.labels;
    let all: Vec<usize> = (0..n).collect();
    let total = label_sum(g, labels, &all);
    let complement = |s: &[usize]| -> Vec<usize> { (0..n).filter(|i| s.binary_search(i).is_err()).collect() };
    let mut blocks = if two_k <= n - two_k {
        labeled_subsets_with_sum(g, labels, two_k, 0, budget)?
            .iter()
            .map(|s| complement(s))
            .collect::<Vec<_>>()
    } else {
        labeled_subsets_with_sum(g, labels, n - two_k, total, budget)?
    };
    blocks.sort();
    Ok(SupportFamily {
        weight: n - two_k,
        blocks,
        divided: true,
    })
}

/// A nonzero codeword vanishing on `zeros`, if one exists.
pub fn codeword_with_zeros(code: &LinearCode, zeros: &[usize]) -> Result<Option<Vec<FieldElement>>> {
    if zeros.iter().any(|&z| z >= code.len()) {
        return Err(Error::InvalidArgument("zero position out of range".into()));
    }
    let gen = code.generator();
    // messages m with (m G)_z = 0 for z in zeros: kernel of the transposed column block
    let block_t: linalg::Matrix = zeros
        .iter()
        .map(|&z| gen.iter().map(|row| row[z].clone()).collect())
        .collect();
    let kernel = if block_t.is_empty() {
        (0..code.dim())
            .map(|i| {
                let mut v = vec![code.field().zero(); code.dim()];
                v[i] = code.field().one();
                v
            })
            .collect()
    } else {
        linalg::null_space(code.field(), &block_t, code.dim())
    };
    match kernel.first() {
        Some(m) => Ok(Some(code.encode(m)?)),
        None => Ok(None),
    }
}

/// Supports per weight (index = weight) from an exhaustive sweep, one block per
/// scalar class. Lengths above 64 are refused.
pub fn supports_by_weight_bruteforce(code: &LinearCode, budget: &Budget) -> Result<Vec<Vec<Vec<usize>>>> {
    sweep::normalized_supports(code, budget)
}

/// 2-design check of every nonempty support family with weight >= 2.
pub fn per_weight_designs(code: &LinearCode, budget: &Budget) -> Result<Vec<(usize, DesignCheckReport)>> {
    let families = supports_by_weight_bruteforce(code, budget)?;
    let mut out = Vec::new();
    for (w, blocks) in families.into_iter().enumerate() {
        if w < 2 || blocks.is_empty() {
            continue;
        }
        let inst = DesignInstance::new(code.len(), w, blocks)?;
        out.push((w, verify_design(&inst, 2, budget)?));
    }
    Ok(out)
}

/// For each primal block the index of the unique dual block disjoint from
/// it; `None` when there is no such block or more than one.
pub fn disjoint_support_pairing(primal: &[Vec<usize>], dual: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mask = |b: &Vec<usize>| b.iter().fold(0u128, |m, &i| m | 1 << i);
    let dual_masks: Vec<u128> = dual.iter().map(mask).collect();
    primal
        .iter()
        .map(|b| {
            let m = mask(b);
            let mut hits = dual_masks.iter().enumerate().filter(|(_, &d)| d & m == 0);
            match (hits.next(), hits.next()) {
                (Some((i, _)), None) => Some(i),
                _ => None,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignMode {
    /// Coverage counted over enumerated blocks.
    Measured,
    /// Enumeration out of budget; only the closed forms are reported.
    TheoryImplied,
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

/// 2-(p^2, p^2 - 2k, lambda) design on the minimum-weight supports and the
/// complementary 2-(p^2, 2k, lambda_dual) design of the dual code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoDesignCertificate {
    pub q: u64,
    pub p: u64,
    pub k: u64,
    pub n: u64,
    pub block_size: u64,
    pub dual_block_size: u64,
    #[serde(with = "decimal")]
    pub a_min: BigUint,
    #[serde(with = "decimal")]
    pub blocks: BigUint,
    #[serde(with = "decimal")]
    pub lambda: BigUint,
    #[serde(with = "decimal")]
    pub lambda_dual: BigUint,
    pub mode: DesignMode,
    pub primal: Option<DesignCheckReport>,
    pub dual: Option<DesignCheckReport>,
}

fn integral(r: BigRational, what: &str) -> Result<BigUint> {
    if !r.is_integer() || r < BigRational::zero() {
        return Err(Error::CertificationMismatch(format!("{what} = {r} is not a nonnegative integer")));
    }
    Ok(r.to_integer().magnitude().clone())
}

/// Closed-form (A_min, b, lambda, lambda_dual) for given p, q, k.
pub fn closed_forms(p: u64, q: u64, k: u64) -> Result<(BigUint, BigUint, BigUint, BigUint)> {
    let a_min = super::min_weight_count_formula(p, q, k)?;
    let n = p * p;
    let bracket = BigInt::from(arith::binomial(n, 2 * k) + BigUint::from(n - 1) * arith::binomial(p, 2 * k / p));
    let c2 = BigInt::from(arith::binomial(n - 2 * k, 2));
    let p4 = BigInt::from(p).pow(4);
    let lambda = integral(
        BigRational::new(BigInt::from(2) * &c2 * &bracket, &p4 * BigInt::from(n - 1)),
        "lambda",
    )?;
    let lambda_dual = integral(
        BigRational::new(
            BigInt::from(4 * k * (2 * k - 1)) * &c2 * &bracket,
            &p4 * BigInt::from(n - 1) * BigInt::from(n - 2 * k) * BigInt::from(n - 2 * k - 1),
        ),
        "lambda_dual",
    )?;
    let blocks = integral(BigRational::new(bracket, BigInt::from(n)), "block count")?;
    Ok((a_min, blocks, lambda, lambda_dual))
}

/// Checks the closed forms and, when the blocks are enumerable within
/// budget, measures both designs by coverage counting.
pub fn certify_two_design(c: &Curve, d: &DivisorSpec, budget: &Budget) -> Result<TwoDesignCertificate> {
    let structure = c.group_structure(budget)?;
    let p = structure.n1;
    if structure.n2 != p || p < 3 || !arith::is_prime(p) {
        return Err(Error::Hypothesis(format!(
            "point group {structure} is not Z_p + Z_p for an odd prime p"
        )));
    }
    let k = d.k as u64;
    let q = c.field().order();
    let (a_min, blocks, lambda, lambda_dual) = closed_forms(p, q, k)?;
    let n = p * p;
    let mut cert = TwoDesignCertificate {
        q,
        p,
        k,
        n,
        block_size: n - 2 * k,
        dual_block_size: 2 * k,
        a_min,
        blocks,
        lambda,
        lambda_dual,
        mode: DesignMode::TheoryImplied,
        primal: None,
        dual: None,
    };
    let family = match min_weight_supports(c, d, budget) {
        Ok(f) => f,
        Err(Error::BudgetExceeded { .. }) => return Ok(cert),
        Err(e) => return Err(e),
    };
    if BigUint::from(family.blocks.len()) != cert.blocks {
        return Err(Error::CertificationMismatch(format!(
            "{} blocks enumerated, closed form gives {}",
            family.blocks.len(),
            cert.blocks
        )));
    }
    let primal_inst = DesignInstance::new(n as usize, family.weight, family.blocks)?;
    let dual_inst = primal_inst.complement();
    let (primal, dual) = match (verify_design(&primal_inst, 2, budget), verify_design(&dual_inst, 2, budget)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(Error::BudgetExceeded { .. }), _) | (_, Err(Error::BudgetExceeded { .. })) => return Ok(cert),
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let check = |r: &DesignCheckReport, want: &BigUint, what: &str| -> Result<()> {
        match r.lambda {
            Some(l) if BigUint::from(l) == *want => Ok(()),
            other => Err(Error::CertificationMismatch(format!(
                "{what}: measured {other:?}, closed form {want}"
            ))),
        }
    };
    check(&primal, &cert.lambda, "lambda")?;
    check(&dual, &cert.lambda_dual, "lambda_dual")?;
    cert.mode = DesignMode::Measured;
    cert.primal = Some(primal);
    cert.dual = Some(dual);
    Ok(cert)
}
