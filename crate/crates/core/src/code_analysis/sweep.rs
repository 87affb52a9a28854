//! Exhaustive codeword sweeps. A code over F_{p^m} is walked as an F_p-space
//! spanned by the rows alpha^j * G_i; an odometer over F_p digits adds exactly
//! one basis row per digit step, so each codeword costs O(n) work.

use rayon::prelude::*;

use crate::budget::{self, Budget};
use crate::code_builder::LinearCode;
use crate::error::{Error, Result};

struct FpBasis {
    p: u32,
    m: usize,
    n: usize,
    /// Flattened rows of length n*m with residues mod p.
    rows: Vec<Vec<u32>>,
    /// Coordinates where each row is nonzero.
    support: Vec<Vec<usize>>,
}

impl FpBasis {
    fn new(code: &LinearCode) -> FpBasis {
        let field = code.field();
        let p = field.characteristic() as u32;
        let m = field.degree();
        let n = code.len();
        let alpha = field.generator();
        let mut rows = Vec::new();
        for g in code.generator() {
            let mut scale = field.one();
            for _ in 0..m {
                let row: Vec<u32> = g
                    .iter()
                    .flat_map(|x| {
                        let v = &scale * x;
                        v.coeffs().iter().map(|&c| c as u32).collect::<Vec<_>>()
                    })
                    .collect();
                rows.push(row);
                scale = &scale * &alpha;
            }
        }
        let support = rows
            .iter()
            .map(|r| (0..n).filter(|&c| r[c * m..(c + 1) * m].iter().any(|&v| v != 0)).collect())
            .collect();
        FpBasis {
            p,
            m,
            n,
            rows,
            support,
        }
    }

    fn position_nonzero(&self, cw: &[u32], c: usize) -> bool {
        cw[c * self.m..(c + 1) * self.m].iter().any(|&v| v != 0)
    }

    fn weight(&self, cw: &[u32]) -> usize {
        (0..self.n).filter(|&c| self.position_nonzero(cw, c)).count()
    }

    fn add_row_raw(&self, cw: &mut [u32], row: usize) {
        for (v, &r) in cw.iter_mut().zip(&self.rows[row]) {
            *v = (*v + r) % self.p;
        }
    }

    /// cw += row; returns the new weight.
    #[inline]
    fn add_row(&self, cw: &mut [u32], row: usize, mut weight: usize) -> usize {
        let r = &self.rows[row];
        let p = self.p;
        if self.m == 1 {
            for &c in &self.support[row] {
                let old = cw[c];
                let mut new = old + r[c];
                if new >= p {
                    new -= p;
                }
                cw[c] = new;
                weight = weight + usize::from(new != 0) - usize::from(old != 0);
            }
        } else {
            let m = self.m;
            for &c in &self.support[row] {
                let before = self.position_nonzero(cw, c);
                for i in c * m..(c + 1) * m {
                    let mut v = cw[i] + r[i];
                    if v >= p {
                        v -= p;
                    }
                    cw[i] = v;
                }
                let after = self.position_nonzero(cw, c);
                weight = weight + usize::from(after) - usize::from(before);
            }
        }
        weight
    }
}

/// Number of codewords, if it fits in u64.
pub(crate) fn code_size(code: &LinearCode) -> Option<u64> {
    code.field().order().checked_pow(code.dim() as u32)
}

/// Visits every codeword (flattened F_p coordinates, weight). Shards are
/// processed in parallel and their accumulators returned in shard order.
fn sweep<T, F>(code: &LinearCode, budget: &Budget, visit: F) -> Result<Vec<T>>
where
    T: Default + Send,
    F: Fn(&mut T, &[u32], usize) + Sync,
{
    budget::check("codewords", code_size(code), budget.codewords)?;
    let basis = FpBasis::new(code);
    let total_digits = basis.rows.len();
    let p = basis.p as u64;
    // enough shards to keep every worker busy
    let mut top = 0;
    while top < total_digits && p.pow(top as u32) < 256 {
        top += 1;
    }
    let low = total_digits - top;
    let shards = p.pow(top as u32);
    Ok((0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut acc = T::default();
            let mut cw = vec![0u32; basis.n * basis.m];
            let mut s = shard;
            for d in 0..top {
                let times = s % p;
                s /= p;
                for _ in 0..times {
                    basis.add_row_raw(&mut cw, low + d);
                }
            }
            let mut weight = basis.weight(&cw);
            visit(&mut acc, &cw, weight);
            let mut digits = vec![0u32; low];
            'outer: loop {
                let mut i = 0;
                loop {
                    if i == low {
                        break 'outer;
                    }
                    weight = basis.add_row(&mut cw, i, weight);
                    digits[i] += 1;
                    if digits[i] == basis.p {
                        digits[i] = 0;
                        i += 1;
                    } else {
                        break;
                    }
                }
                visit(&mut acc, &cw, weight);
            }
            acc
        })
        .collect())
}

/// A_0..A_n by exhaustive enumeration.
pub(crate) fn weight_counts(code: &LinearCode, budget: &Budget) -> Result<Vec<u64>> {
    let n = code.len();
    let shards: Vec<Vec<u64>> = sweep(code, budget, |acc: &mut Vec<u64>, _, w| {
        if acc.is_empty() {
            acc.resize(n + 1, 0);
        }
        acc[w] += 1;
    })?;
    let mut counts = vec![0u64; n + 1];
    for s in shards {
        for (a, b) in counts.iter_mut().zip(s) {
            *a += b;
        }
    }
    Ok(counts)
}

/// Supports of the codewords whose first nonzero entry is 1 (one per
/// scalar class), grouped by weight, each list sorted.
pub(crate) fn normalized_supports(code: &LinearCode, budget: &Budget) -> Result<Vec<Vec<Vec<usize>>>> {
    let n = code.len();
    if n > 64 {
        return Err(Error::InvalidArgument(format!(
            "support sweep handles length <= 64, got {n}"
        )));
    }
    let m = code.field().degree();
    let shards: Vec<Vec<Vec<u64>>> = sweep(code, budget, |acc: &mut Vec<Vec<u64>>, cw, w| {
        if w == 0 {
            return;
        }
        let first = (0..n).find(|&c| cw[c * m..(c + 1) * m].iter().any(|&v| v != 0)).unwrap();
        let lead = &cw[first * m..(first + 1) * m];
        if lead[0] != 1 || lead[1..].iter().any(|&v| v != 0) {
            return;
        }
        if acc.is_empty() {
            acc.resize(n + 1, Vec::new());
        }
        let mask = (0..n)
            .filter(|&c| cw[c * m..(c + 1) * m].iter().any(|&v| v != 0))
            .fold(0u64, |b, c| b | 1 << c);
        acc[w].push(mask);
    })?;
    let mut by_weight: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
    for s in shards {
        for (w, masks) in s.into_iter().enumerate() {
            by_weight[w].extend(masks);
        }
    }
    Ok(by_weight
        .into_iter()
        .map(|masks| {
            let mut blocks: Vec<Vec<usize>> = masks
                .into_iter()
                .map(|b| (0..n).filter(|&c| b >> c & 1 == 1).collect())
                .collect();
            blocks.sort();
            blocks
        })
        .collect())
}
