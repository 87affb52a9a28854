//! Weight distributions, minimum-weight supports and the designs they hold.

mod supports;
mod sweep;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::budget::Budget;
use crate::code_builder::LinearCode;
use crate::error::{Error, Result};
use crate::group_designs::{verify_design, DesignInstance};

pub use supports::{
    certify_two_design, closed_forms, codeword_with_zeros, disjoint_support_pairing, min_weight_supports,
    per_weight_designs, supports_by_weight_bruteforce, DesignMode, SupportFamily,
    TwoDesignCertificate,
};

/// A_0..A_n. Serialized as an array of decimal strings so that counts beyond
/// 64 bits survive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightDistribution {
    pub counts: Vec<BigUint>,
}

impl Serialize for WeightDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightDistribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let counts = v
            .iter()
            .map(|s| s.parse::<BigUint>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<_, _>>()?;
        Ok(WeightDistribution { counts })
    }
}

impl WeightDistribution {
    pub fn from_u64(counts: &[u64]) -> WeightDistribution {
        WeightDistribution {
            counts: counts.iter().map(|&c| BigUint::from(c)).collect(),
        }
    }

    /// Code length n.
    pub fn len(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, w: usize) -> BigUint {
        self.counts.get(w).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Smallest nonzero weight; `None` for the zero code.
    pub fn min_distance(&self) -> Option<usize> {
        (1..self.counts.len()).find(|&w| !self.counts[w].is_zero())
    }

    pub fn nonzero_weights(&self) -> Vec<usize> {
        (1..self.counts.len()).filter(|&w| !self.counts[w].is_zero()).collect()
    }
}

impl fmt::Display for WeightDistribution {
    /// Enumerator polynomial, e.g. `1 + 72z^3 + 324z^4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(w, c)| match w {
                0 => c.to_string(),
                1 => format!("{c}z"),
                _ => format!("{c}z^{w}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// Exact enumeration over all q^dim messages.
pub fn weight_distribution_bruteforce(code: &LinearCode, budget: &Budget) -> Result<WeightDistribution> {
    Ok(WeightDistribution::from_u64(&sweep::weight_counts(code, budget)?))
}

/// (q - 1) [C(p^2, 2k) + (p^2 - 1) C(p, 2k/p)] / p^2, the number of
/// minimum-weight codewords of the [p^2, 2k, p^2 - 2k] construction.
pub fn min_weight_count_formula(p: u64, q: u64, k: u64) -> Result<BigUint> {
    if p == 0 || k % p != 0 || k == 0 || 2 * k >= p * p {
        return Err(Error::Hypothesis(format!(
            "need p | k and 0 < k < p^2/2, got p = {p}, k = {k}"
        )));
    }
    let n = p * p;
    let bracket = arith::binomial(n, 2 * k) + BigUint::from(n - 1) * arith::binomial(p, 2 * k / p);
    let num = bracket * (q - 1);
    let (quot, rem) = num.div_rem(&BigUint::from(n));
    if !rem.is_zero() {
        return Err(Error::NonExactDivision(format!("{num} / {n}")));
    }
    Ok(quot)
}

fn q_pow_minus_one(q: u64, e: usize) -> BigInt {
    BigInt::from(q).pow(e as u32) - 1
}

fn signed(j: usize) -> BigInt {
    if j % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

fn to_unsigned(v: BigInt, what: &str) -> Result<BigUint> {
    if v.is_negative() {
        return Err(Error::Hypothesis(format!("{what} is negative ({v}); the given minimum-weight count is impossible")));
    }
    Ok(v.magnitude().clone())
}

/// Full distributions of an [n, k, n-k] NMDS code and its dual from the
/// shared minimum-weight count A_{n-k} = A^perp_k.
pub fn nmds_weight_distribution(
    n: usize,
    k: usize,
    q: u64,
    a_min: &BigUint,
) -> Result<(WeightDistribution, WeightDistribution)> {
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!("need 0 < k < n, got k = {k}, n = {n}")));
    }
    let a_min = BigInt::from(a_min.clone());
    let b = |a: usize, c: usize| BigInt::from(arith::binomial(a as u64, c as u64));

    let mut primal = vec![BigUint::zero(); n + 1];
    primal[0] = BigUint::one();
    primal[n - k] = a_min.magnitude().clone();
    for s in 1..=k {
        let sum: BigInt = (0..s)
            .map(|j| signed(j) * b(n - k + s, j) * q_pow_minus_one(q, s - j))
            .sum();
        let v = b(n, k - s) * sum + signed(s) * b(k, s) * &a_min;
        primal[n - k + s] = to_unsigned(v, &format!("A_{}", n - k + s))?;
    }

    let mut dual = vec![BigUint::zero(); n + 1];
    dual[0] = BigUint::one();
    dual[k] = a_min.magnitude().clone();
    for s in 1..=n - k {
        let sum: BigInt = (0..s)
            .map(|j| signed(j) * b(k + s, j) * q_pow_minus_one(q, s - j))
            .sum();
        let v = b(n, k + s) * sum + signed(s) * b(n - k, s) * &a_min;
        dual[k + s] = to_unsigned(v, &format!("dual A_{}", k + s))?;
    }
    Ok((
        WeightDistribution { counts: primal },
        WeightDistribution { counts: dual },
    ))
}

/// Dual distribution via Krawtchouk polynomials:
/// A^perp_j = (1/|C|) sum_i A_i K_j(i).
pub fn macwilliams_transform(dist: &WeightDistribution, q: u64) -> Result<WeightDistribution> {
    let n = dist.len();
    let size = BigInt::from(dist.total());
    if size.is_zero() {
        return Err(Error::InvalidArgument("empty distribution".into()));
    }
    let b = |a: usize, c: usize| BigInt::from(arith::binomial(a as u64, c as u64));
    let qm1 = BigInt::from(q - 1);
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut acc = BigInt::zero();
        for (i, a) in dist.counts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let kraw: BigInt = (0..=j.min(i))
                .map(|s| signed(s) * qm1.pow((j - s) as u32) * b(i, s) * b(n - i, j - s))
                .sum();
            acc += BigInt::from(a.clone()) * kraw;
        }
        let (quot, rem) = acc.div_rem(&size);
        if !rem.is_zero() || quot.is_negative() {
            return Err(Error::NonExactDivision(format!("MacWilliams coefficient {j}")));
        }
        out.push(quot.magnitude().clone());
    }
    Ok(WeightDistribution { counts: out })
}

/// Largest h <= n with h - floor((h + q - 2)/(q - 1)) < d. Weights in
/// [d, h] carry no repeated support blocks.
pub fn simplicity_bound_h(n: u64, d: u64, q: u64) -> u64 {
    (0..=n)
        .rev()
        .find(|&h| h - (h + q - 2) / (q - 1) < d)
        .unwrap_or(0)
}

/// Whether A_w > 0 for every lo <= w <= n.
pub fn all_weights_nonzero_check(dist: &WeightDistribution, lo: usize) -> bool {
    (lo..dist.counts.len()).all(|w| !dist.counts[w].is_zero())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmVerdict {
    AmSatisfied,
    GamOnly,
    Neither,
}

impl fmt::Display for AmVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AmVerdict::AmSatisfied => "AM-satisfied",
            AmVerdict::GamOnly => "GAM-only",
            AmVerdict::Neither => "neither",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmReport {
    pub verdict: AmVerdict,
    pub t: usize,
    pub d: usize,
    pub d_dual: usize,
    /// Nonzero weights of the code in 1..=n-t.
    pub weights_in_range: usize,
    /// d_dual - t, the number of weights the classical hypothesis allows.
    pub allowed: i64,
    /// Whether the NMDS route (min(k, n-k) >= 3 with a 2-design at the
    /// minimum weight) applies.
    pub nmds_route: bool,
}

/// Decides the verdict from the two distributions. `min_weight_two_design`
/// is consulted only when the classical hypothesis fails and the code has
/// NMDS parameters.
pub fn am_verdict(
    dist: &WeightDistribution,
    dual: &WeightDistribution,
    dim: usize,
    t: usize,
    min_weight_two_design: impl FnOnce() -> Result<bool>,
) -> Result<AmReport> {
    let n = dist.len();
    let d = dist.min_distance().unwrap_or(n + 1);
    let d_dual = dual.min_distance().unwrap_or(n + 1);
    let weights_in_range = dist
        .nonzero_weights()
        .into_iter()
        .filter(|&w| w + t <= n)
        .count();
    let allowed = d_dual as i64 - t as i64;
    let classical = t >= 1 && t < d.min(d_dual) && weights_in_range as i64 <= allowed;
    let nmds_shape = dim > 0 && d == n - dim && d_dual == dim && dim.min(n - dim) >= 3;
    let mut report = AmReport {
        verdict: AmVerdict::Neither,
        t,
        d,
        d_dual,
        weights_in_range,
        allowed,
        nmds_route: false,
    };
    if classical {
        report.verdict = AmVerdict::AmSatisfied;
    } else if nmds_shape && t <= 2 && min_weight_two_design()? {
        report.nmds_route = true;
        report.verdict = AmVerdict::GamOnly;
    }
    Ok(report)
}

/// Classical and NMDS-route design hypotheses for a code small enough to
/// sweep exhaustively.
pub fn am_hypothesis_check(code: &LinearCode, t: usize, budget: &Budget) -> Result<AmReport> {
    let dist = weight_distribution_bruteforce(code, budget)?;
    let dual = macwilliams_transform(&dist, code.field().order())?;
    am_verdict(&dist, &dual, code.dim(), t, || {
        let w = dist.min_distance().unwrap_or(0);
        let blocks = supports::supports_by_weight_bruteforce(code, budget)?
            .into_iter()
            .nth(w)
            .unwrap_or_default();
        let inst = DesignInstance::new(code.len(), w, blocks)?;
        if w < 2 {
            return Ok(false);
        }
        Ok(verify_design(&inst, 2, budget)?.is_design)
    })
}
