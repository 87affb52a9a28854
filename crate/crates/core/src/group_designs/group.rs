use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Z_{n1} ⊕ ... ⊕ Z_{nm} in invariant-factor form, n_i | n_{i+1}, n_i >= 2.
/// The empty factor list is the trivial group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

/// Residue vector of an element; `residues[i]` lies in `[0, n_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(Vec<u64>);

impl GroupElement {
    pub fn residues(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&r| r == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// exp(G), e(x) and the torsion counts #G[d] for d | exp(G).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupInvariants {
    pub exponent: u64,
    pub e_x: u64,
    pub torsion: BTreeMap<u64, u64>,
}

impl AbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<AbelianGroup> {
        if factors.iter().any(|&n| n < 2) {
            return Err(Error::InvalidArgument(format!(
                "invariant factors must be >= 2, got {factors:?}"
            )));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidArgument(format!(
                "invariant factors must form a divisibility chain, got {factors:?}"
            )));
        }
        if factors.iter().try_fold(1u64, |acc, &n| acc.checked_mul(n)).is_none() {
            return Err(Error::InvalidArgument("group order overflows".into()));
        }
        Ok(AbelianGroup { factors })
    }

    pub fn trivial() -> AbelianGroup {
        AbelianGroup { factors: vec![] }
    }

    /// Normalizes an arbitrary list of cyclic orders (e.g. `[2, 3]`) into
    /// invariant factors (`[6]`).
    pub fn from_cyclic_orders(orders: &[u64]) -> Result<AbelianGroup> {
        if orders.contains(&0) {
            return Err(Error::InvalidArgument("cyclic order 0".into()));
        }
        let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &n in orders {
            for (p, e) in arith::factorize(n) {
                by_prime.entry(p).or_default().push(p.pow(e));
            }
        }
        Ok(Self::from_elementary_divisors(by_prime))
    }

    fn from_elementary_divisors(mut by_prime: BTreeMap<u64, Vec<u64>>) -> AbelianGroup {
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for powers in by_prime.values_mut() {
            powers.sort_unstable();
            // largest powers go to the last (largest) invariant factor
            for (slot, &pk) in factors.iter_mut().rev().zip(powers.iter().rev()) {
                *slot *= pk;
            }
        }
        AbelianGroup { factors }
    }

    /// Every abelian group of order `n`, one per invariant-factor decomposition.
    pub fn all_of_order(n: u64) -> Vec<AbelianGroup> {
        fn partitions(e: u32, max: u32) -> Vec<Vec<u32>> {
            if e == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in (1..=e.min(max)).rev() {
                for mut rest in partitions(e - first, first) {
                    rest.insert(0, first);
                    out.push(rest);
                }
            }
            out
        }
        let mut combos: Vec<BTreeMap<u64, Vec<u64>>> = vec![BTreeMap::new()];
        for (p, e) in arith::factorize(n) {
            let mut next = Vec::new();
            for combo in &combos {
                for part in partitions(e, e) {
                    let mut c = combo.clone();
                    c.insert(p, part.iter().map(|&a| p.pow(a)).collect());
                    next.push(c);
                }
            }
            combos = next;
        }
        combos.into_iter().map(Self::from_elementary_divisors).collect()
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    /// exp(G) = n_m (1 for the trivial group).
    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// `Some(p)` when the order is a power of the prime p.
    pub fn p_group_prime(&self) -> Option<u64> {
        arith::prime_power(self.order()).map(|(p, _)| p)
    }

    /// Z_p^m for a prime p.
    pub fn is_elementary(&self) -> bool {
        match self.p_group_prime() {
            Some(p) => self.factors.iter().all(|&n| n == p),
            None => false,
        }
    }

    pub fn element(&self, residues: &[u64]) -> Result<GroupElement> {
        if residues.len() != self.factors.len() {
            return Err(Error::InvalidArgument(format!(
                "group {self} needs {} residues, got {}",
                self.factors.len(),
                residues.len()
            )));
        }
        if residues.iter().zip(&self.factors).any(|(&r, &n)| r >= n) {
            return Err(Error::InvalidArgument(format!(
                "residues {residues:?} not reduced for {self}"
            )));
        }
        Ok(GroupElement(residues.to_vec()))
    }

    /// Element from arbitrary integers, reduced componentwise.
    pub fn element_reduced(&self, values: &[i64]) -> Result<GroupElement> {
        if values.len() != self.factors.len() {
            return Err(Error::InvalidArgument(format!(
                "group {self} needs {} residues, got {}",
                self.factors.len(),
                values.len()
            )));
        }
        Ok(GroupElement(
            values
                .iter()
                .zip(&self.factors)
                .map(|(&v, &n)| v.rem_euclid(n as i64) as u64)
                .collect(),
        ))
    }

    /// Parses the comma-separated residue encoding.
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let values: Vec<i64> = if s.trim().is_empty() {
            vec![]
        } else {
            s.split(',')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad residue {v:?}")))
                })
                .collect::<Result<_>>()?
        };
        self.element_reduced(&values)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.factors.len()])
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((&x, &y), &n)| (x + y) % n)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &n)| (n - x) % n)
                .collect(),
        )
    }

    /// Mixed-radix position, first component most significant.
    pub fn index_of(&self, a: &GroupElement) -> usize {
        a.0.iter()
            .zip(&self.factors)
            .fold(0u64, |acc, (&r, &n)| acc * n + r) as usize
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut res = vec![0u64; self.factors.len()];
        for (slot, &n) in res.iter_mut().zip(&self.factors).rev() {
            *slot = index as u64 % n;
            index /= n as usize;
        }
        GroupElement(res)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(|i| self.element_at(i))
    }

    /// #G[d] = prod gcd(d, n_i).
    pub fn torsion_count(&self, d: u64) -> u64 {
        self.factors.iter().map(|&n| arith::gcd(d, n)).product()
    }

    /// x ∈ dG, tested componentwise: gcd(d, n_i) | x_i.
    pub fn in_multiple_subgroup(&self, x: &GroupElement, d: u64) -> bool {
        x.0.iter()
            .zip(&self.factors)
            .all(|(&r, &n)| r % arith::gcd(d, n) == 0)
    }

    /// e(x) = max { d : d | exp(G), x ∈ dG }.
    pub fn e_of(&self, x: &GroupElement) -> u64 {
        arith::divisors(self.exponent())
            .into_iter()
            .rev()
            .find(|&d| self.in_multiple_subgroup(x, d))
            .unwrap_or(1)
    }

    pub fn invariants(&self, x: &GroupElement) -> GroupInvariants {
        let exponent = self.exponent();
        GroupInvariants {
            exponent,
            e_x: self.e_of(x),
            torsion: arith::divisors(exponent)
                .into_iter()
                .map(|d| (d, self.torsion_count(d)))
                .collect(),
        }
    }

    /// Encoding `n1xn2x...`; the trivial group is `1`.
    pub fn parse(s: &str) -> Result<AbelianGroup> {
        let orders: Vec<u64> = s
            .trim()
            .split(['x', 'X'])
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad group encoding {s:?}")))
            })
            .collect::<Result<_>>()?;
        if orders == [1] {
            return Ok(AbelianGroup::trivial());
        }
        AbelianGroup::new(orders)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.factors.iter().map(u64::to_string).collect();
        f.write_str(&parts.join("x"))
    }
}

impl TryFrom<String> for AbelianGroup {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        AbelianGroup::parse(&s)
    }
}

impl From<AbelianGroup> for String {
    fn from(g: AbelianGroup) -> String {
        g.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(AbelianGroup::new(vec![3, 3]).is_ok());
        assert!(AbelianGroup::new(vec![2, 3]).is_err());
        assert!(AbelianGroup::new(vec![1, 3]).is_err());
        assert_eq!(AbelianGroup::from_cyclic_orders(&[2, 3]).unwrap().factors(), &[6]);
        assert_eq!(AbelianGroup::from_cyclic_orders(&[4, 6]).unwrap().factors(), &[2, 12]);
    }

    #[test]
    fn invariants_of_small_groups() {
        let g = AbelianGroup::new(vec![3, 3]).unwrap();
        let inv = g.invariants(&g.zero());
        assert_eq!((inv.exponent, inv.e_x, inv.torsion[&3]), (3, 3, 9));
        assert_eq!(g.e_of(&g.element(&[1, 0]).unwrap()), 1);
        let h = AbelianGroup::new(vec![2, 4]).unwrap();
        let direct = h
            .elements()
            .filter(|e| h.add(e, e).is_zero())
            .count();
        assert_eq!(direct, 4);
        assert_eq!(h.torsion_count(2), 4);
        // 2 ∈ 2·Z_4 but not in 4·Z_4
        let z4 = AbelianGroup::new(vec![4]).unwrap();
        assert_eq!(z4.e_of(&z4.element(&[2]).unwrap()), 2);
    }

    #[test]
    fn groups_of_each_order() {
        let counts: Vec<usize> = (1..=16).map(|n| AbelianGroup::all_of_order(n).len()).collect();
        // number of abelian groups of order n (OEIS A000688)
        assert_eq!(counts, vec![1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5]);
        for n in 1..=16 {
            for g in AbelianGroup::all_of_order(n) {
                assert_eq!(g.order(), n);
                assert!(AbelianGroup::new(g.factors().to_vec()).is_ok());
            }
        }
    }

    #[test]
    fn indexing_round_trip() {
        let g = AbelianGroup::new(vec![2, 6]).unwrap();
        for (i, e) in g.elements().enumerate() {
            assert_eq!(g.index_of(&e), i);
        }
    }

    #[test]
    fn encodings() {
        let g = AbelianGroup::parse("3x3").unwrap();
        assert_eq!(g.to_string(), "3x3");
        assert_eq!(g.parse_element("1,-1").unwrap().residues(), &[1, 2]);
        assert!(g.parse_element("1").is_err());
        assert_eq!(AbelianGroup::parse("1").unwrap(), AbelianGroup::trivial());
        assert!(AbelianGroup::parse("3xa").is_err());
    }
}
