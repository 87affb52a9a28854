//! Evaluation codes from the Riemann-Roch space L(k(Q + Frob(Q))) on an
//! elliptic curve, evaluated at every rational point.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::budget::{self, Budget};
use crate::elliptic_curve::{Curve, Point, TraceZeroPoint};
use crate::error::{Error, Result};
use crate::finite_field::{Field, FieldElement};
use crate::group_designs::{count_subsets_full, AbelianGroup};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RRKind {
    Constant,
    /// (x - x_Q)^-i
    InvPow(u32),
    /// y (x - x_Q)^-j
    YInvPow(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RRFunction {
    pub kind: RRKind,
    pub x_pole: FieldElement,
}

impl fmt::Display for RRFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = |e: u32| {
            if e == 1 {
                format!("(x-{})", self.x_pole)
            } else {
                format!("(x-{})^{e}", self.x_pole)
            }
        };
        match self.kind {
            RRKind::Constant => f.write_str("1"),
            RRKind::InvPow(i) => write!(f, "1/{}", den(i)),
            RRKind::YInvPow(j) => write!(f, "y/{}", den(j)),
        }
    }
}

/// D = k(Q + Frob(Q)) for a trace-zero point Q.
#[derive(Debug, Clone)]
pub struct DivisorSpec {
    pub k: usize,
    pub x_q: FieldElement,
    pub q_point: Point,
    pub phi_q: Point,
    ext_curve: Curve,
}

impl DivisorSpec {
    pub fn new(tz: &TraceZeroPoint, k: usize) -> Result<DivisorSpec> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        if !tz.curve.add(&tz.point, &tz.conjugate)?.is_infinity() {
            return Err(Error::InvalidArgument("Q + Frob(Q) is not the identity".into()));
        }
        Ok(DivisorSpec {
            k,
            x_q: tz.x_base.clone(),
            q_point: tz.point.clone(),
            phi_q: tz.conjugate.clone(),
            ext_curve: tz.curve.clone(),
        })
    }

    pub fn degree(&self) -> usize {
        2 * self.k
    }

    /// The point sum k*Q + k*Frob(Q) on the curve over F_{q^2}.
    pub fn sum_point(&self) -> Result<Point> {
        let k = self.k as i64;
        let a = self.ext_curve.scalar_mul(k, &self.q_point)?;
        let b = self.ext_curve.scalar_mul(k, &self.phi_q)?;
        self.ext_curve.add(&a, &b)
    }
}

/// {1} ∪ {(x - x_Q)^-i : 1 <= i <= k} ∪ {y (x - x_Q)^-j : 2 <= j <= k}.
pub fn rr_basis(c: &Curve, d: &DivisorSpec) -> Result<Vec<RRFunction>> {
    if d.x_q.field() != c.field() {
        return Err(Error::FieldMismatch);
    }
    if c.rhs(&d.x_q).is_square() {
        return Err(Error::InvalidArgument(format!(
            "x_Q = {} has a rational point above it",
            d.x_q
        )));
    }
    let mk = |kind| RRFunction {
        kind,
        x_pole: d.x_q.clone(),
    };
    let mut out = vec![mk(RRKind::Constant)];
    out.extend((1..=d.k as u32).map(|i| mk(RRKind::InvPow(i))));
    out.extend((2..=d.k as u32).map(|j| mk(RRKind::YInvPow(j))));
    Ok(out)
}

pub fn evaluate_rr(f: &RRFunction, p: &Point) -> Result<FieldElement> {
    let field = f.x_pole.field();
    match p {
        Point::Infinity => Ok(match f.kind {
            RRKind::Constant => field.one(),
            _ => field.zero(),
        }),
        Point::Affine { x, y } => {
            if f.kind == RRKind::Constant {
                return Ok(field.one());
            }
            let inv = x.apply(crate::finite_field::ArithOp::Sub, &f.x_pole)?.inverse()?;
            Ok(match f.kind {
                RRKind::Constant => unreachable!(),
                RRKind::InvPow(i) => inv.pow(i as u64),
                RRKind::YInvPow(j) => y * &inv.pow(j as u64),
            })
        }
    }
}

/// A linear code given by a full-rank generator matrix. `eval_points` labels
/// the coordinates when the code comes from a curve and is empty otherwise.
#[derive(Debug, Clone)]
pub struct LinearCode {
    field: Field,
    n: usize,
    gen: Matrix,
    eval_points: Vec<Point>,
}

impl LinearCode {
    pub fn new(field: &Field, n: usize, gen: Matrix, eval_points: Vec<Point>) -> Result<LinearCode> {
        if gen.iter().any(|r| r.len() != n || r.iter().any(|x| x.field() != field)) {
            return Err(Error::InvalidArgument("generator rows must be length-n vectors over the code field".into()));
        }
        if !eval_points.is_empty() && eval_points.len() != n {
            return Err(Error::InvalidArgument("one evaluation point per coordinate".into()));
        }
        let rank = linalg::rank(&gen);
        if rank != gen.len() {
            return Err(Error::RankDeficient {
                rank,
                expected: gen.len(),
            });
        }
        Ok(LinearCode {
            field: field.clone(),
            n,
            gen,
            eval_points,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.gen.len()
    }

    pub fn generator(&self) -> &Matrix {
        &self.gen
    }

    pub fn eval_points(&self) -> &[Point] {
        &self.eval_points
    }

    pub fn encode(&self, message: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if self.gen.is_empty() {
            return Ok(vec![self.field.zero(); self.n]);
        }
        linalg::vec_mul(&self.field, message, &self.gen)
    }

    pub fn same_row_space(&self, other: &LinearCode) -> bool {
        self.n == other.n && self.field == other.field && linalg::rref(&self.gen).0 == linalg::rref(&other.gen).0
    }

    /// Every generator entry in its text encoding.
    pub fn matrix_strings(&self) -> Vec<Vec<String>> {
        self.gen
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect()
    }

    /// One matrix row per line, entries separated by spaces.
    pub fn matrix_grid(&self) -> String {
        let rows = self.matrix_strings();
        let width = rows.iter().flatten().map(String::len).max().unwrap_or(1);
        rows.iter()
            .map(|r| {
                r.iter()
                    .map(|e| format!("{e:>width$}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// G[r][c] = basis_r(P_c) over all rational points in canonical order.
pub fn build_code(c: &Curve, d: &DivisorSpec, budget: &Budget) -> Result<LinearCode> {
    let points = c.points(budget)?;
    if 2 * d.k >= points.len() {
        return Err(Error::InvalidArgument(format!(
            "need 0 < 2k < n, got k = {} with n = {}",
            d.k,
            points.len()
        )));
    }
    let basis = rr_basis(c, d)?;
    let columns: Vec<Vec<FieldElement>> = points
        .par_iter()
        .map(|p| basis.iter().map(|f| evaluate_rr(f, p)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let gen = linalg::transpose(&columns);
    LinearCode::new(c.field(), points.len(), gen, points)
}

/// Generator matrix of the orthogonal complement.
pub fn dual_code(code: &LinearCode) -> LinearCode {
    let gen = linalg::null_space(&code.field, &code.gen, code.n);
    LinearCode {
        field: code.field.clone(),
        n: code.n,
        gen,
        eval_points: code.eval_points.clone(),
    }
}

/// An isomorphism from the rational points onto Z_{n1} ⊕ Z_{n2} (or Z_N).
#[derive(Debug, Clone)]
pub struct PointLabeling {
    pub group: AbelianGroup,
    /// Canonical group index of each point, aligned with the point list.
    pub labels: Vec<u32>,
    pub generators: Vec<Point>,
}

/// Finds generators g1 (order n1) and g2 (order n2) with trivially
/// intersecting cyclic subgroups and tabulates [a]g1 + [b]g2 -> (a, b).
pub fn label_points(c: &Curve, points: &[Point]) -> Result<PointLabeling> {
    let n = points.len() as u64;
    let structure = c.group_structure_of(points);
    let (n1, n2) = (structure.n1, structure.n2);
    let group = if n == 1 {
        AbelianGroup::trivial()
    } else if n1 == 1 {
        AbelianGroup::new(vec![n2])?
    } else {
        AbelianGroup::new(vec![n1, n2])?
    };
    let g2 = points
        .iter()
        .find(|p| c.point_order(p, n) == n2)
        .cloned()
        .ok_or_else(|| Error::Internal(format!("no point of order {n2}")))?;
    let mut span2 = std::collections::HashSet::new();
    let mut cur = Point::Infinity;
    for _ in 0..n2 {
        span2.insert(cur.clone());
        cur = c.add(&cur, &g2)?;
    }
    let g1 = if n1 == 1 {
        Point::Infinity
    } else {
        points
            .iter()
            .filter(|p| c.point_order(p, n) == n1)
            .find(|p| {
                let mut m = (*p).clone();
                (1..n1).all(|_| {
                    let fresh = !span2.contains(&m);
                    m = c.add(&m, p).expect("point on curve");
                    fresh
                })
            })
            .cloned()
            .ok_or_else(|| Error::Internal(format!("no complement of order {n1}")))?
    };
    let table: Vec<(Point, u32)> = (0..n1)
        .into_par_iter()
        .map(|a| -> Result<Vec<(Point, u32)>> {
            let mut p = c.scalar_mul(a as i64, &g1)?;
            let mut out = Vec::with_capacity(n2 as usize);
            for b in 0..n2 {
                out.push((p.clone(), (a * n2 + b) as u32));
                p = c.add(&p, &g2)?;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let map: HashMap<Point, u32> = table.into_iter().collect();
    if map.len() as u64 != n {
        return Err(Error::Internal("generators do not span the point group".into()));
    }
    let labels = points
        .iter()
        .map(|p| {
            map.get(p)
                .copied()
                .ok_or_else(|| Error::Internal(format!("point {p} missing from the labeling")))
        })
        .collect::<Result<_>>()?;
    let generators = if n1 == 1 { vec![g2] } else { vec![g1, g2] };
    Ok(PointLabeling {
        group,
        labels,
        generators,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CodeClass {
    Mds,
    Nmds,
}

impl fmt::Display for CodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeClass::Mds => "MDS",
            CodeClass::Nmds => "NMDS",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub class: CodeClass,
    /// Number of (dimension)-subsets of points summing to the divisor's point sum.
    pub zero_sum_subsets: BigUint,
    pub labeling: PointLabeling,
}

/// An evaluation code of dimension `size` at all points of a group G is NMDS
/// exactly when some `size`-subset of G sums to `target`, MDS otherwise.
pub fn class_from_subset_sums(
    g: &AbelianGroup,
    size: u64,
    target: &crate::group_designs::GroupElement,
) -> Result<(CodeClass, BigUint)> {
    let count = count_subsets_full(g, size, target)?;
    let class = if count.is_zero() {
        CodeClass::Mds
    } else {
        CodeClass::Nmds
    };
    Ok((class, count))
}

pub fn classify_mds_nmds(c: &Curve, d: &DivisorSpec, budget: &Budget) -> Result<Classification> {
    if !d.sum_point()?.is_infinity() {
        return Err(Error::Hypothesis("divisor point sum is not the identity".into()));
    }
    let points = c.points(budget)?;
    let labeling = label_points(c, &points)?;
    let (class, zero_sum_subsets) =
        class_from_subset_sums(&labeling.group, d.degree() as u64, &labeling.group.zero())?;
    Ok(Classification {
        class,
        zero_sum_subsets,
        labeling,
    })
}

/// For a k x n generator matrix: every k-1 columns independent, some k
/// columns dependent, and every k+1 columns of rank k.
pub fn nmds_structural_check(gen: &Matrix, budget: &Budget) -> Result<bool> {
    let k = gen.len();
    let n = gen.first().map_or(0, Vec::len);
    if k == 0 || k > n {
        return Ok(false);
    }
    let needed = [k - 1, k, k + 1]
        .iter()
        .try_fold(0u64, |acc, &r| acc.checked_add(arith::binomial_u64(n as u64, r as u64)?));
    budget::check("column subsets", needed, budget.column_subsets)?;
    let independent = arith::for_each_combination(n, k - 1, |cols| {
        linalg::column_rank(gen, cols) == k - 1
    });
    if !independent {
        return Ok(false);
    }
    let all_full = arith::for_each_combination(n, k, |cols| linalg::column_rank(gen, cols) == k);
    if all_full {
        return Ok(false);
    }
    Ok(k == n || arith::for_each_combination(n, k + 1, |cols| linalg::column_rank(gen, cols) == k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::QuadraticExtension;

    fn example() -> (Curve, DivisorSpec) {
        let f = Field::prime(7).unwrap();
        let c = Curve::from_ints(&f, 0, 2).unwrap();
        let ext = QuadraticExtension::new(&f).unwrap();
        let tz = c.find_trace_zero_point(&ext).unwrap();
        let d = DivisorSpec::new(&tz, 3).unwrap();
        (c, d)
    }

    #[test]
    fn basis_shape() {
        let (c, d) = example();
        let basis = rr_basis(&c, &d).unwrap();
        let shown: Vec<String> = basis.iter().map(|f| f.to_string()).collect();
        assert_eq!(
            shown,
            ["1", "1/(x-1)", "1/(x-1)^2", "1/(x-1)^3", "y/(x-1)^2", "y/(x-1)^3"]
        );
        let d1 = DivisorSpec { k: 1, ..d.clone() };
        assert_eq!(rr_basis(&c, &d1).unwrap().len(), 2);
        for k in 1..=4 {
            let dk = DivisorSpec { k, ..d.clone() };
            assert_eq!(rr_basis(&c, &dk).unwrap().len(), 2 * k);
        }
        let bad = DivisorSpec { x_q: c.field().from_int(3), ..d };
        // 3^3 + 2 = 29 = 1 is a square mod 7
        assert!(rr_basis(&c, &bad).is_err());
    }

    #[test]
    fn evaluation() {
        let (c, d) = example();
        let basis = rr_basis(&c, &d).unwrap();
        let f = c.field();
        assert!(evaluate_rr(&basis[0], &Point::Infinity).unwrap().is_one());
        assert!(evaluate_rr(&basis[4], &Point::Infinity).unwrap().is_zero());
        let p = c.point(f.from_int(0), f.from_int(3)).unwrap();
        assert_eq!(evaluate_rr(&basis[1], &p).unwrap(), f.from_int(6));
    }

    #[test]
    fn example_code_shape() {
        let (c, d) = example();
        let code = build_code(&c, &d, &Budget::default()).unwrap();
        assert_eq!((code.len(), code.dim()), (9, 6));
        assert!(code.generator()[0].iter().all(FieldElement::is_one));
        let col0: Vec<bool> = code.generator().iter().map(|r| r[0].is_one()).collect();
        assert_eq!(col0, [true, false, false, false, false, false]);
        let dual = dual_code(&code);
        assert_eq!(dual.dim(), 3);
        for g in code.generator() {
            for h in dual.generator() {
                let dot = g.iter().zip(h).fold(c.field().zero(), |acc, (a, b)| acc + a * b);
                assert!(dot.is_zero());
            }
        }
        assert!(dual_code(&dual).same_row_space(&code));
        assert!(nmds_structural_check(code.generator(), &Budget::default()).unwrap());
        assert_eq!(code.matrix_grid().lines().next().unwrap(), "1 1 1 1 1 1 1 1 1");
    }

    #[test]
    fn example_is_nmds() {
        let (c, d) = example();
        let cls = classify_mds_nmds(&c, &d, &Budget::default()).unwrap();
        assert_eq!(cls.class, CodeClass::Nmds);
        assert_eq!(cls.zero_sum_subsets, BigUint::from(12u32));
        assert_eq!(cls.labeling.group.to_string(), "3x3");
        // labels form a homomorphism
        let pts = c.points(&Budget::default()).unwrap();
        let g = &cls.labeling.group;
        for (i, p) in pts.iter().enumerate() {
            for (j, q) in pts.iter().enumerate() {
                let s = c.add(p, q).unwrap();
                let k = pts.iter().position(|r| *r == s).unwrap();
                let want = g.add(
                    &g.element_at(cls.labeling.labels[i] as usize),
                    &g.element_at(cls.labeling.labels[j] as usize),
                );
                assert_eq!(g.index_of(&want), cls.labeling.labels[k] as usize);
            }
        }
    }

    #[test]
    fn subset_sum_classifier() {
        let g = AbelianGroup::new(vec![3, 3]).unwrap();
        let x = g.element(&[1, 0]).unwrap();
        assert_eq!(class_from_subset_sums(&g, 9, &x).unwrap().0, CodeClass::Mds);
        assert_eq!(class_from_subset_sums(&g, 6, &g.zero()).unwrap().0, CodeClass::Nmds);
    }

    #[test]
    fn structural_check_rejects_mds_and_deficient() {
        let f = Field::prime(7).unwrap();
        // Reed-Solomon [6,3] over F_7: every 3 columns independent
        let rs: Matrix = (0..3u64)
            .map(|i| (1..7i64).map(|a| f.from_int(a).pow(i)).collect())
            .collect();
        assert!(!nmds_structural_check(&rs, &Budget::default()).unwrap());
        let deficient: Matrix = vec![
            vec![f.from_int(1), f.from_int(0), f.from_int(1)],
            vec![f.from_int(0), f.from_int(0), f.from_int(0)],
        ];
        assert!(!nmds_structural_check(&deficient, &Budget::default()).unwrap());
        assert!(LinearCode::new(&f, 3, deficient, vec![]).is_err());
    }
}
