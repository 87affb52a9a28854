//! t-design verification by exhaustive t-subset coverage counting, the
//! standard parameter identities, and the design predicates for subset-sum
//! block families.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::group::{AbelianGroup, GroupElement};
use super::subset_sum;
use crate::arith;
use crate::budget::{self, Budget};
use crate::error::{Error, Result};

/// Blocks over the point set `0..v`. Repeated blocks are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignInstance {
    v: usize,
    block_size: usize,
    blocks: Vec<Vec<usize>>,
}

impl DesignInstance {
    /// Blocks are sorted on entry; every block must have `block_size`
    /// distinct points below `v`.
    pub fn new(v: usize, block_size: usize, blocks: Vec<Vec<usize>>) -> Result<DesignInstance> {
        let mut blocks = blocks;
        for b in &mut blocks {
            b.sort_unstable();
            if b.len() != block_size {
                return Err(Error::InvalidArgument(format!(
                    "block {b:?} has size {} instead of {block_size}",
                    b.len()
                )));
            }
            if b.windows(2).any(|w| w[0] == w[1]) || b.last().is_some_and(|&p| p >= v) {
                return Err(Error::InvalidArgument(format!("block {b:?} is not a subset of 0..{v}")));
            }
        }
        Ok(DesignInstance { v, block_size, blocks })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn is_simple(&self) -> bool {
        let mut sorted: Vec<&Vec<usize>> = self.blocks.iter().collect();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Blocks replaced by their complements in `0..v`.
    pub fn complement(&self) -> DesignInstance {
        let blocks = self
            .blocks
            .iter()
            .map(|b| (0..self.v).filter(|p| b.binary_search(p).is_err()).collect())
            .collect();
        DesignInstance {
            v: self.v,
            block_size: self.v - self.block_size,
            blocks,
        }
    }
}

/// Two t-subsets with unequal coverage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageWitness {
    pub first: Vec<usize>,
    pub first_count: u64,
    pub second: Vec<usize>,
    pub second_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignCheckReport {
    pub is_design: bool,
    pub t: usize,
    pub v: usize,
    #[serde(rename = "k")]
    pub block_size: usize,
    /// Common coverage count; absent when the blocks do not form a design.
    pub lambda: Option<u64>,
    pub b: u64,
    pub simple: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<CoverageWitness>,
}

/// C(n, j) for n <= v, j <= t.
struct BinomTable {
    rows: Vec<Vec<u64>>,
}

impl BinomTable {
    fn new(v: usize, t: usize) -> Option<BinomTable> {
        let mut rows = vec![vec![0u64; t + 1]; v + 1];
        for n in 0..=v {
            rows[n][0] = 1;
            for j in 1..=t.min(n) {
                rows[n][j] = rows[n - 1][j - 1].checked_add(if j < n { rows[n - 1][j] } else { 0 })?;
            }
        }
        Some(BinomTable { rows })
    }

    fn get(&self, n: usize, j: usize) -> u64 {
        self.rows[n][j]
    }

    /// Colex rank of a sorted subset.
    fn rank(&self, subset: &[usize]) -> usize {
        subset.iter().enumerate().map(|(i, &c)| self.get(c, i + 1)).sum::<u64>() as usize
    }

    fn unrank(&self, mut r: u64, t: usize, v: usize) -> Vec<usize> {
        let mut out = vec![0usize; t];
        let mut hi = v;
        for j in (1..=t).rev() {
            let mut c = j - 1;
            while c + 1 < hi && self.get(c + 1, j) <= r {
                c += 1;
            }
            r -= self.get(c, j);
            out[j - 1] = c;
            hi = c;
        }
        out
    }
}

fn add_block_coverage(block: &[usize], t: usize, table: &BinomTable, counts: &mut [u64]) {
    fn rec(block: &[usize], start: usize, left: usize, depth: usize, acc: usize, table: &BinomTable, counts: &mut [u64]) {
        if left == 0 {
            counts[acc] += 1;
            return;
        }
        for i in start..=block.len() - left {
            rec(block, i + 1, left - 1, depth + 1, acc + table.get(block[i], depth + 1) as usize, table, counts);
        }
    }
    rec(block, 0, t, 0, 0, table, counts);
}

/// Counts how often each t-subset of `0..v` is covered by the blocks.
pub fn verify_design(d: &DesignInstance, t: usize, budget: &Budget) -> Result<DesignCheckReport> {
    if t == 0 || t > d.block_size || d.block_size > d.v {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= t <= block size <= v, got t={t}, k={}, v={}",
            d.block_size, d.v
        )));
    }
    let simple = d.is_simple();
    let b = d.blocks.len() as u64;
    if d.blocks.is_empty() {
        return Ok(DesignCheckReport {
            is_design: false,
            t,
            v: d.v,
            block_size: d.block_size,
            lambda: None,
            b: 0,
            simple,
            witness: None,
        });
    }
    let total = arith::binomial_u64(d.v as u64, t as u64);
    budget::check("coverage", total, budget.coverage)?;
    let total = total.unwrap_or(0) as usize;
    let table = BinomTable::new(d.v, t)
        .ok_or_else(|| Error::Internal("binomial table overflow".into()))?;

    let counts = if total <= 1 << 20 && d.blocks.len() > 4096 {
        d.blocks
            .par_chunks(1024)
            .map(|chunk| {
                let mut c = vec![0u64; total];
                for blk in chunk {
                    add_block_coverage(blk, t, &table, &mut c);
                }
                c
            })
            .reduce(
                || vec![0u64; total],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    } else {
        let mut c = vec![0u64; total];
        for blk in &d.blocks {
            add_block_coverage(blk, t, &table, &mut c);
        }
        c
    };

    let lambda = counts[0];
    let witness = counts.iter().position(|&c| c != lambda).map(|i| CoverageWitness {
        first: table.unrank(0, t, d.v),
        first_count: lambda,
        second: table.unrank(i as u64, t, d.v),
        second_count: counts[i],
    });
    let is_design = witness.is_none();
    if is_design {
        let lhs = arith::binomial(d.v as u64, t as u64) * lambda;
        let rhs = arith::binomial(d.block_size as u64, t as u64) * b;
        if lhs != rhs {
            return Err(Error::Internal(format!("double counting fails: {lhs} != {rhs}")));
        }
    }
    debug_assert_eq!(table.rank(&table.unrank(0, t, d.v)), 0);
    Ok(DesignCheckReport {
        is_design,
        t,
        v: d.v,
        block_size: d.block_size,
        lambda: is_design.then_some(lambda),
        b,
        simple,
        witness,
    })
}

/// λ_i for i = 0..=t (λ_0 = b), the complementary λ and the block count of a
/// t-(v, k, λ_t) design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignParameters {
    pub lambdas: Vec<BigRational>,
    pub lambda_complement: BigRational,
    pub b: BigRational,
    /// All values are integers.
    pub integral: bool,
}

fn binom_q(n: u64, k: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(arith::binomial(n, k)))
}

pub fn design_parameters(v: u64, k: u64, t: u64, lambda_t: u64) -> Result<DesignParameters> {
    if t > k || k > v {
        return Err(Error::InvalidArgument(format!(
            "need t <= k <= v, got t={t}, k={k}, v={v}"
        )));
    }
    let lam = BigRational::from_integer(BigInt::from(lambda_t));
    let lambdas: Vec<BigRational> = (0..=t)
        .map(|i| &lam * binom_q(v - i, t - i) / binom_q(k - i, t - i))
        .collect();
    let b = lambdas[0].clone();
    let denom = binom_q(v - t, k - t);
    let lambda_complement = if denom.is_zero() {
        BigRational::zero()
    } else {
        &lam * binom_q(v - t, k) / denom
    };
    let integral = lambdas.iter().chain([&lambda_complement]).all(|x| x.is_integer());
    Ok(DesignParameters {
        lambdas,
        lambda_complement,
        b,
        integral,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictMethod {
    ClosedForm,
    Enumerated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSumDesignVerdict {
    pub is_design: bool,
    pub method: VerdictMethod,
}

/// p-adic valuation of a residue in Z_{p^e}; `None` for the zero residue.
fn residue_valuation(p: u64, x: u64, modulus: u64) -> Option<u32> {
    if x % modulus == 0 {
        None
    } else {
        arith::valuation(p, x)
    }
}

/// Closed-form 1-design test for a non-elementary odd p-group.
fn p_group_one_design(g: &AbelianGroup, p: u64, k: u64, x: &GroupElement) -> bool {
    if k % p != 0 {
        return false;
    }
    if k % g.exponent() == 0 {
        return true;
    }
    let res = x.residues();
    if res.iter().any(|&r| r % p != 0) {
        return true;
    }
    let vk = arith::valuation(p, k).unwrap_or(u32::MAX) as i64;
    res.iter().zip(g.factors()).any(|(&r, &n)| match residue_valuation(p, r, n) {
        Some(v) => vk - v as i64 >= 1,
        None => false,
    })
}

fn closed_form(g: &AbelianGroup, k: u64, x: &GroupElement, t: usize) -> Result<Option<bool>> {
    let n = g.order();
    let p = match g.p_group_prime() {
        Some(p) if p % 2 == 1 => p,
        _ => return Ok(None),
    };
    if k == 0 || k >= n {
        return Ok(None);
    }
    if g.is_elementary() {
        return match t {
            1 => Ok(Some(k % p == 0)),
            2 => Ok(Some(k % p == 0 && x.is_zero())),
            _ => Err(Error::InvalidArgument(format!(
                "no closed form for t = {t} on subset-sum families"
            ))),
        };
    }
    match t {
        1 => Ok(Some(p_group_one_design(g, p, k, x))),
        2 => Ok(None),
        _ => Err(Error::InvalidArgument(format!(
            "no closed form for t = {t} on subset-sum families"
        ))),
    }
}

/// Whether the k-subsets of G summing to x form a t-design on G. Uses the
/// p-group closed forms when they apply, otherwise enumerates the blocks.
pub fn is_design_subset_sums(
    g: &AbelianGroup,
    k: u64,
    x: &GroupElement,
    t: usize,
    budget: &Budget,
) -> Result<SubsetSumDesignVerdict> {
    if let Some(is_design) = closed_form(g, k, x, t)? {
        return Ok(SubsetSumDesignVerdict {
            is_design,
            method: VerdictMethod::ClosedForm,
        });
    }
    Ok(SubsetSumDesignVerdict {
        is_design: enumerated_verdict(g, k, x, t, budget)?,
        method: VerdictMethod::Enumerated,
    })
}

/// Builds B_k^x literally and checks it.
pub fn enumerated_verdict(
    g: &AbelianGroup,
    k: u64,
    x: &GroupElement,
    t: usize,
    budget: &Budget,
) -> Result<bool> {
    let blocks = subset_sum::subsets_with_sum(g, k, x, false, budget)?;
    let d = DesignInstance::new(g.order() as usize, k as usize, blocks)?;
    Ok(verify_design(&d, t, budget)?.is_design)
}

impl DesignParameters {
    /// λ_t as the last entry of `lambdas`.
    pub fn lambda_t(&self) -> &BigRational {
        self.lambdas.last().expect("lambdas holds λ_0..=λ_t")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn all_k_subsets(v: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(v: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..v {
                cur.push(i);
                rec(v, k, i + 1, cur, out);
                cur.pop();
            }
        }
        rec(v, k, 0, &mut cur, &mut out);
        out
    }

    #[test]
    fn steiner_triple_system_on_z3_squared() {
        let g = AbelianGroup::new(vec![3, 3]).unwrap();
        let budget = Budget::default();
        let blocks = subset_sum::subsets_with_sum(&g, 3, &g.zero(), false, &budget).unwrap();
        assert_eq!(blocks.len(), 12);
        let d = DesignInstance::new(9, 3, blocks).unwrap();
        let r = verify_design(&d, 2, &budget).unwrap();
        assert!(r.is_design && r.simple);
        assert_eq!((r.lambda, r.b), (Some(1), 12));
        let c = verify_design(&d.complement(), 2, &budget).unwrap();
        assert_eq!(c.lambda, Some(5));
    }

    #[test]
    fn complete_designs() {
        let budget = Budget::default();
        let d = DesignInstance::new(7, 4, all_k_subsets(7, 4)).unwrap();
        for t in 1..=4 {
            let r = verify_design(&d, t, &budget).unwrap();
            let want = arith::binomial_u64(7 - t as u64, 4 - t as u64).unwrap();
            assert_eq!(r.lambda, Some(want), "t={t}");
        }
    }

    #[test]
    fn non_design_witness() {
        let d = DesignInstance::new(3, 2, vec![vec![0, 1], vec![0, 2]]).unwrap();
        let r = verify_design(&d, 2, &Budget::default()).unwrap();
        assert!(!r.is_design);
        let w = r.witness.unwrap();
        assert_eq!((w.second, w.second_count), (vec![1, 2], 0));
        assert_eq!(w.first_count, 1);
    }

    #[test]
    fn empty_and_repeated_blocks() {
        let empty = DesignInstance::new(4, 2, vec![]).unwrap();
        let r = verify_design(&empty, 1, &Budget::default()).unwrap();
        assert!(!r.is_design && r.b == 0);
        let twice = DesignInstance::new(3, 2, vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![1, 0]])
            .unwrap();
        assert!(!twice.is_simple());
        assert!(DesignInstance::new(3, 2, vec![vec![0, 3]]).is_err());
        assert!(DesignInstance::new(3, 2, vec![vec![1, 1]]).is_err());
    }

    #[test]
    fn report_json_shape() {
        let d = DesignInstance::new(3, 2, all_k_subsets(3, 2)).unwrap();
        let r = verify_design(&d, 2, &Budget::default()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["v", "k", "t", "lambda", "b", "simple", "is_design"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn parameter_identities() {
        let p = design_parameters(9, 3, 2, 1).unwrap();
        assert_eq!(p.b, int(12));
        assert_eq!(p.lambdas[1], int(4));
        assert_eq!(p.lambda_complement, int(5));
        assert!(p.integral);
        let complete = design_parameters(8, 3, 3, 1).unwrap();
        assert_eq!(complete.b, int(56));
        assert!(!design_parameters(10, 4, 2, 1).unwrap().integral);
    }

    #[test]
    fn closed_form_examples() {
        let g = AbelianGroup::new(vec![3, 3]).unwrap();
        let budget = Budget::default();
        let v = is_design_subset_sums(&g, 6, &g.zero(), 2, &budget).unwrap();
        assert_eq!(v, SubsetSumDesignVerdict { is_design: true, method: VerdictMethod::ClosedForm });
        let x = g.element(&[1, 0]).unwrap();
        assert!(!is_design_subset_sums(&g, 6, &x, 2, &budget).unwrap().is_design);
        let z9 = AbelianGroup::new(vec![9]).unwrap();
        let three = z9.element(&[3]).unwrap();
        assert!(!is_design_subset_sums(&z9, 3, &three, 1, &budget).unwrap().is_design);
        assert!(!enumerated_verdict(&z9, 3, &three, 1, &budget).unwrap());
        assert!(is_design_subset_sums(&g, 3, &g.zero(), 3, &budget).is_err());
    }

    /// coverage[k][x] of one fixed t-subset T, by dynamic programming over
    /// the points outside T: #(k-t)-subsets of G \ T summing to x - sum(T).
    fn coverage_by_dp(g: &AbelianGroup, subset: &[usize]) -> Vec<Vec<u64>> {
        let n = g.order() as usize;
        let elems: Vec<GroupElement> = g.elements().collect();
        let mut tab = vec![vec![0u64; n]; n + 1];
        tab[0][0] = 1;
        for (j, e) in elems.iter().enumerate() {
            if subset.contains(&j) {
                continue;
            }
            for s in (0..n).rev() {
                for a in 0..n {
                    let c = tab[s][a];
                    if c > 0 {
                        tab[s + 1][g.index_of(&g.add(&elems[a], e))] += c;
                    }
                }
            }
        }
        let shift = subset.iter().fold(g.zero(), |acc, &i| g.add(&acc, &elems[i]));
        let t = subset.len();
        (0..=n)
            .map(|k| {
                elems
                    .iter()
                    .map(|x| {
                        if k < t {
                            0
                        } else {
                            tab[k - t][g.index_of(&g.add(x, &g.neg(&shift)))]
                        }
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn closed_form_matches_coverage_oracle_on_p_groups() {
        let budget = Budget::default();
        for order in [3u64, 5, 7, 9, 25, 27] {
            for g in AbelianGroup::all_of_order(order) {
                let n = order as usize;
                for t in 1..=2usize {
                    let subsets = all_k_subsets(n, t);
                    let cov: Vec<Vec<Vec<u64>>> =
                        subsets.iter().map(|s| coverage_by_dp(&g, s)).collect();
                    for k in t..n {
                        for (xi, x) in g.elements().enumerate() {
                            let first = cov[0][k][xi];
                            let oracle = first > 0 && cov.iter().all(|c| c[k][xi] == first);
                            let enumerates = t == 2 && !g.is_elementary();
                            if enumerates && arith::binomial_u64(order, k as u64).unwrap() > 20_000 {
                                continue;
                            }
                            let fast = is_design_subset_sums(&g, k as u64, &x, t, &budget).unwrap();
                            assert_eq!(fast.is_design, oracle, "G={g} k={k} x={x} t={t}");
                        }
                    }
                }
            }
        }
    }
}
