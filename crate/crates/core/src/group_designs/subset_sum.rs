//! Counting k-subsets of a finite abelian group with a prescribed sum:
//! closed forms via Möbius inversion over divisors of the exponent, and a
//! literal enumeration used as an oracle and for extracting blocks.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use super::group::{AbelianGroup, GroupElement};
use crate::arith;
use crate::budget::{self, Budget};
use crate::error::{Error, Result};

fn inner_mobius_sum(g: &AbelianGroup, e_x: u64, s: u64) -> BigInt {
    arith::divisors(arith::gcd(e_x, s))
        .into_iter()
        .map(|d| BigInt::from(arith::mobius(s / d)) * BigInt::from(g.torsion_count(d)))
        .sum()
}

fn exact_div(total: BigInt, n: u64, what: &str) -> Result<BigUint> {
    let (q, r) = total.div_rem(&BigInt::from(n));
    if !r.is_zero() || q.sign() == Sign::Minus {
        return Err(Error::NonExactDivision(format!(
            "{what}: sum {total} is not a nonnegative multiple of {n}"
        )));
    }
    Ok(q.magnitude().clone())
}

fn sign(exp: u64) -> BigInt {
    if exp % 2 == 0 {
        BigInt::from(1)
    } else {
        BigInt::from(-1)
    }
}

/// Number of k-subsets of G summing to x, for 1 <= k <= |G|.
pub fn count_subsets_full(g: &AbelianGroup, k: u64, x: &GroupElement) -> Result<BigUint> {
    let n = g.order();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} outside [1, {n}]")));
    }
    let e_x = g.e_of(x);
    let mut total = BigInt::zero();
    for s in arith::divisors(arith::gcd(g.exponent(), k)) {
        let term = sign(k + k / s)
            * BigInt::from(arith::binomial(n / s, k / s))
            * inner_mobius_sum(g, e_x, s);
        total += term;
    }
    exact_div(total, n, "full subset count")
}

/// Number of k-subsets of G \ {0} summing to x, for 1 <= k <= |G| - 1.
pub fn count_subsets_nonzero(g: &AbelianGroup, k: u64, x: &GroupElement) -> Result<BigUint> {
    let n = g.order();
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!("k = {k} outside [1, {}]", n.saturating_sub(1))));
    }
    let e_x = g.e_of(x);
    let mut total = BigInt::zero();
    for s in arith::divisors(g.exponent()) {
        let term = sign(k + k / s)
            * BigInt::from(arith::binomial(n / s - 1, k / s))
            * inner_mobius_sum(g, e_x, s);
        total += term;
    }
    exact_div(total, n, "nonzero subset count")
}

/// Group addition on canonical indices, table-driven for small groups.
pub(crate) struct IndexedGroup {
    factors: Vec<u64>,
    order: usize,
    table: Option<Vec<u32>>,
}

impl IndexedGroup {
    const TABLE_LIMIT: usize = 4096;

    pub(crate) fn new(g: &AbelianGroup) -> IndexedGroup {
        let mut ig = IndexedGroup {
            factors: g.factors().to_vec(),
            order: g.order() as usize,
            table: None,
        };
        if ig.order <= Self::TABLE_LIMIT {
            let n = ig.order;
            let mut t = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = ig.add_slow(a as u32, b as u32);
                }
            }
            ig.table = Some(t);
        }
        ig
    }

    fn add_slow(&self, mut a: u32, mut b: u32) -> u32 {
        let mut out = 0u64;
        let mut stride = 1u64;
        for &n in self.factors.iter().rev() {
            let r = (a as u64 % n + b as u64 % n) % n;
            out += r * stride;
            stride *= n;
            a = (a as u64 / n) as u32;
            b = (b as u64 / n) as u32;
        }
        out as u32
    }

    #[inline]
    pub(crate) fn add(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.order + b as usize],
            None => self.add_slow(a, b),
        }
    }
}

/// Depth-first walk over the k-subsets of positions `start..labels.len()`,
/// handing each completed subset and its label sum to `visit`.
fn walk<F: FnMut(&[usize], u32)>(
    grp: &IndexedGroup,
    labels: &[u32],
    start: usize,
    remaining: usize,
    sum: u32,
    chosen: &mut Vec<usize>,
    visit: &mut F,
) {
    if remaining == 0 {
        visit(chosen, sum);
        return;
    }
    let m = labels.len();
    for pos in start..=m - remaining {
        chosen.push(pos);
        walk(grp, labels, pos + 1, remaining - 1, grp.add(sum, labels[pos]), chosen, visit);
        chosen.pop();
    }
}

/// Walk sharded on the first chosen position; shard results come back in
/// position order so downstream output is deterministic.
fn sharded<T, F>(grp: &IndexedGroup, labels: &[u32], k: usize, visit: F) -> Vec<T>
where
    T: Default + Send,
    F: Fn(&mut T, &[usize], u32) + Sync,
{
    if k == 0 {
        let mut acc = T::default();
        visit(&mut acc, &[], 0);
        return vec![acc];
    }
    if k > labels.len() {
        return vec![];
    }
    (0..=labels.len() - k)
        .into_par_iter()
        .map(|first| {
            let mut acc = T::default();
            let mut chosen = vec![first];
            walk(grp, labels, first + 1, k - 1, labels[first], &mut chosen, &mut |c, s| {
                visit(&mut acc, c, s)
            });
            acc
        })
        .collect()
}

fn check_subset_budget(m: usize, k: usize, budget: &Budget) -> Result<()> {
    budget::check("subsets", arith::binomial_u64(m as u64, k as u64), budget.subsets)
}

fn point_labels(g: &AbelianGroup, exclude_zero: bool) -> Vec<u32> {
    let start = usize::from(exclude_zero);
    (start..g.order() as usize).map(|i| i as u32).collect()
}

/// Literal count of k-subsets of G (or G \ {0}) summing to x.
pub fn brute_force_counts(
    g: &AbelianGroup,
    k: u64,
    x: &GroupElement,
    exclude_zero: bool,
    budget: &Budget,
) -> Result<u64> {
    let target = g.index_of(x) as u32;
    let labels = point_labels(g, exclude_zero);
    count_labeled_subsets_with_sum(g, &labels, k as usize, target, budget)
}

/// Counts of k-subsets of G (or G \ {0}) per sum, indexed by canonical element index.
pub fn brute_force_tally(
    g: &AbelianGroup,
    k: u64,
    exclude_zero: bool,
    budget: &Budget,
) -> Result<Vec<u64>> {
    let labels = point_labels(g, exclude_zero);
    check_subset_budget(labels.len(), k as usize, budget)?;
    let grp = IndexedGroup::new(g);
    let n = g.order() as usize;
    let shards: Vec<Vec<u64>> = sharded(&grp, &labels, k as usize, |acc: &mut Vec<u64>, _, s| {
        if acc.is_empty() {
            acc.resize(n, 0);
        }
        acc[s as usize] += 1;
    });
    let mut tally = vec![0u64; n];
    for shard in shards {
        for (t, c) in tally.iter_mut().zip(shard) {
            *t += c;
        }
    }
    Ok(tally)
}

/// k-subsets of G (as sorted canonical element indices) summing to x.
pub fn subsets_with_sum(
    g: &AbelianGroup,
    k: u64,
    x: &GroupElement,
    exclude_zero: bool,
    budget: &Budget,
) -> Result<Vec<Vec<usize>>> {
    let labels = point_labels(g, exclude_zero);
    let offset = usize::from(exclude_zero);
    let mut blocks =
        labeled_subsets_with_sum(g, &labels, k as usize, g.index_of(x) as u32, budget)?;
    for b in &mut blocks {
        for i in b.iter_mut() {
            *i += offset;
        }
    }
    Ok(blocks)
}

/// Positions `S` (sorted, lexicographic order of subsets) with |S| = k and
/// sum of `labels[i]` over S equal to `target`. Labels are canonical element indices.
pub fn labeled_subsets_with_sum(
    g: &AbelianGroup,
    labels: &[u32],
    k: usize,
    target: u32,
    budget: &Budget,
) -> Result<Vec<Vec<usize>>> {
    check_subset_budget(labels.len(), k, budget)?;
    let grp = IndexedGroup::new(g);
    let shards: Vec<Vec<Vec<usize>>> = sharded(&grp, labels, k, |acc: &mut Vec<Vec<usize>>, c, s| {
        if s == target {
            acc.push(c.to_vec());
        }
    });
    Ok(shards.into_iter().flatten().collect())
}

/// As [`labeled_subsets_with_sum`] but only counting.
pub fn count_labeled_subsets_with_sum(
    g: &AbelianGroup,
    labels: &[u32],
    k: usize,
    target: u32,
    budget: &Budget,
) -> Result<u64> {
    check_subset_budget(labels.len(), k, budget)?;
    let grp = IndexedGroup::new(g);
    let shards: Vec<u64> = sharded(&grp, labels, k, |acc: &mut u64, _, s| {
        if s == target {
            *acc += 1;
        }
    });
    Ok(shards.into_iter().sum())
}

/// Sum of the labels of a position set, as a canonical element index.
pub fn label_sum(g: &AbelianGroup, labels: &[u32], positions: &[usize]) -> u32 {
    let grp = IndexedGroup::new(g);
    positions.iter().fold(0, |s, &i| grp.add(s, labels[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn full_counts_on_z3_squared() {
        let g = AbelianGroup::new(vec![3, 3]).unwrap();
        let budget = Budget::default();
        // oracle: literal enumeration of C(9,6) = 84 subsets
        let oracle = brute_force_counts(&g, 6, &g.zero(), false, &budget).unwrap();
        assert_eq!(oracle, 12);
        assert_eq!(count_subsets_full(&g, 6, &g.zero()).unwrap(), b(oracle));
        let x = g.element(&[2, 1]).unwrap();
        assert_eq!(count_subsets_full(&g, 1, &x).unwrap(), b(1));
        assert_eq!(count_subsets_full(&g, 9, &x).unwrap(), b(0));
        assert_eq!(count_subsets_full(&g, 9, &g.zero()).unwrap(), b(1));
    }

    #[test]
    fn nonzero_counts() {
        let g = AbelianGroup::new(vec![3, 3]).unwrap();
        assert_eq!(count_subsets_nonzero(&g, 1, &g.zero()).unwrap(), b(0));
        assert_eq!(count_subsets_nonzero(&g, 7, &g.zero()).unwrap(), b(0));
        let z5 = AbelianGroup::new(vec![5]).unwrap();
        let one = z5.element(&[1]).unwrap();
        // pairs of {1,2,3,4} summing to 1 mod 5: only {2,4}
        let oracle = brute_force_counts(&z5, 2, &one, true, &Budget::default()).unwrap();
        assert_eq!(oracle, 1);
        assert_eq!(count_subsets_nonzero(&z5, 2, &one).unwrap(), b(1));
    }

    #[test]
    fn small_literal_counts() {
        let z2 = AbelianGroup::new(vec![2]).unwrap();
        let one = z2.element(&[1]).unwrap();
        assert_eq!(brute_force_counts(&z2, 1, &one, false, &Budget::default()).unwrap(), 1);
    }

    #[test]
    fn range_errors() {
        let g = AbelianGroup::new(vec![5]).unwrap();
        assert!(count_subsets_full(&g, 0, &g.zero()).is_err());
        assert!(count_subsets_full(&g, 6, &g.zero()).is_err());
        assert!(count_subsets_nonzero(&g, 5, &g.zero()).is_err());
    }

    #[test]
    fn formulas_match_enumeration_up_to_order_16() {
        let budget = Budget::default();
        for n in 1..=16u64 {
            for g in AbelianGroup::all_of_order(n) {
                for k in 1..=n {
                    let full = brute_force_tally(&g, k, false, &budget).unwrap();
                    let nonzero = (k < n).then(|| brute_force_tally(&g, k, true, &budget).unwrap());
                    for (i, x) in g.elements().enumerate() {
                        assert_eq!(
                            count_subsets_full(&g, k, &x).unwrap(),
                            b(full[i]),
                            "full G={g} k={k} x={x}"
                        );
                        if let Some(nz) = &nonzero {
                            assert_eq!(
                                count_subsets_nonzero(&g, k, &x).unwrap(),
                                b(nz[i]),
                                "nonzero G={g} k={k} x={x}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn budget_refusal() {
        let g = AbelianGroup::new(vec![5, 5]).unwrap();
        let err = brute_force_counts(&g, 10, &g.zero(), false, &Budget::uniform(1000)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn indexed_arithmetic_matches_group() {
        let g = AbelianGroup::new(vec![2, 6]).unwrap();
        let ig = IndexedGroup::new(&g);
        let big = IndexedGroup { table: None, ..IndexedGroup::new(&g) };
        for a in g.elements() {
            for c in g.elements() {
                let want = g.index_of(&g.add(&a, &c)) as u32;
                let (ia, ic) = (g.index_of(&a) as u32, g.index_of(&c) as u32);
                assert_eq!(ig.add(ia, ic), want);
                assert_eq!(big.add(ia, ic), want);
            }
        }
    }
}
