use num_bigint::BigUint;
use proptest::prelude::*;

use nmds_core::arith;
use nmds_core::code_analysis::{
    macwilliams_transform, min_weight_supports, nmds_weight_distribution,
    weight_distribution_bruteforce, WeightDistribution,
};
use nmds_core::code_builder::{build_code, classify_mds_nmds, dual_code, CodeClass, DivisorSpec};
use nmds_core::elliptic_curve::{Curve, Point};
use nmds_core::finite_field::{Field, QuadraticExtension};
use nmds_core::group_designs::{count_subsets_full, count_subsets_nonzero, AbelianGroup};
use nmds_core::param_search::{find_curve, search_parameters};
use nmds_core::Budget;

const PRIMES: [u64; 8] = [5, 7, 11, 13, 17, 31, 43, 101];

fn field_strategy() -> impl Strategy<Value = Field> {
    (prop::sample::select(PRIMES.to_vec()), 1usize..=3).prop_filter_map("order too large", |(p, m)| {
        if p.pow(m as u32) > 1 << 20 {
            None
        } else {
            Field::with_default_modulus(p, m).ok()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(f in field_strategy(), i in any::<u64>(), j in any::<u64>(), k in any::<u64>()) {
        let q = f.order();
        let (a, b, c) = (f.element_at(i % q), f.element_at(j % q), f.element_at(k % q));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inverse().unwrap()).is_one());
        }
    }

    #[test]
    fn sqrt_of_squares(f in field_strategy(), i in any::<u64>()) {
        let a = f.element_at(i % f.order());
        let sq = a.square();
        prop_assert!(sq.is_square());
        prop_assert_eq!(sq.sqrt().unwrap().square(), sq);
    }

    /// a + a^q and a a^q have no alpha component in F_q[alpha]/(alpha^2 - n).
    #[test]
    fn trace_and_norm_in_base_field(p in prop::sample::select(PRIMES.to_vec()), i in any::<u64>()) {
        let base = Field::prime(p).unwrap();
        let ext = QuadraticExtension::new(&base).unwrap();
        let a = ext.ext.element_at(i % ext.ext.order());
        let conj = a.frobenius(p).unwrap();
        for v in [&a + &conj, &a * &conj] {
            prop_assert_eq!(v.coeffs()[1], 0);
            prop_assert!(ext.embedding.preimage(&v).is_some());
        }
    }

    #[test]
    fn curve_group_law(p in prop::sample::select(vec![5u64, 7, 11, 13]), a in 0i64..13, b in 0i64..13,
                       i in any::<usize>(), j in any::<usize>(), k in any::<usize>()) {
        let f = Field::prime(p).unwrap();
        let Ok(c) = Curve::from_ints(&f, a, b) else { return Ok(()) };
        let pts = c.points(&Budget::default()).unwrap();
        let n = pts.len() as i64;
        prop_assert!((n - p as i64 - 1).pow(2) <= 4 * p as i64);
        let (x, y, z) = (&pts[i % pts.len()], &pts[j % pts.len()], &pts[k % pts.len()]);
        let add = |u: &Point, v: &Point| c.add(u, v).unwrap();
        prop_assert_eq!(add(&add(x, y), z), add(x, &add(y, z)));
        prop_assert_eq!(add(x, y), add(y, x));
        prop_assert_eq!(add(x, &Point::Infinity), x.clone());
        prop_assert!(add(x, &c.neg(x)).is_infinity());
        prop_assert!(c.scalar_mul(n, x).unwrap().is_infinity());
    }

    #[test]
    fn trace_zero_point_frobenius(p in prop::sample::select(vec![5u64, 7, 11, 13, 31]), b in 1i64..31) {
        let f = Field::prime(p).unwrap();
        let Ok(c) = Curve::from_ints(&f, 0, b) else { return Ok(()) };
        let tz = match c.find_trace_zero_point(&QuadraticExtension::new(&f).unwrap()) {
            Ok(tz) => tz,
            Err(nmds_core::Error::NotFound(_)) => {
                prop_assert!(f.elements().all(|x| c.rhs(&x).is_square()));
                return Ok(());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let (x, y) = (tz.point.x().unwrap(), tz.point.y().unwrap());
        prop_assert_eq!(&x.frobenius(p).unwrap(), x);
        prop_assert_ne!(&y.frobenius(p).unwrap(), y);
        prop_assert_eq!(tz.conjugate.y().unwrap(), &-y);
    }

    #[test]
    fn subset_sums_partition_binomial(order in 1u64..=40, pick in any::<usize>(), k in any::<u64>()) {
        let groups = AbelianGroup::all_of_order(order);
        let g = &groups[pick % groups.len()];
        let k = 1 + k % order;
        let total: BigUint = g.elements().map(|x| count_subsets_full(g, k, &x).unwrap()).sum();
        prop_assert_eq!(total, arith::binomial(order, k));
        if k < order {
            let total: BigUint = g.elements().map(|x| count_subsets_nonzero(g, k, &x).unwrap()).sum();
            prop_assert_eq!(total, arith::binomial(order - 1, k));
        }
    }

    #[test]
    fn distribution_json_round_trip(counts in prop::collection::vec(any::<u64>(), 1..12)) {
        let w = WeightDistribution::from_u64(&counts);
        let s = serde_json::to_string(&w).unwrap();
        prop_assert_eq!(serde_json::from_str::<WeightDistribution>(&s).unwrap(), w);
    }

    /// Emitted triples re-checked from the definitions.
    #[test]
    fn emitted_triples_satisfy_conditions(p_max in 3u64..400, positive in any::<bool>()) {
        for r in search_parameters(p_max, positive) {
            prop_assert!(arith::is_prime(r.p) && r.p % 2 == 1 && r.p <= p_max);
            prop_assert_eq!(arith::factorize(r.q).len(), 1);
            prop_assert_eq!(r.t, (r.p * r.p) as i64 - r.q as i64 - 1);
            prop_assert!(r.t * r.t <= 4 * r.q as i64);
            prop_assert_eq!(arith::gcd(r.t.unsigned_abs(), r.q), 1);
            prop_assert_eq!((r.q - 1) % r.p, 0);
            prop_assert!(!positive || r.t >= 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// No nonzero codeword has more than 2k zeros, the distance is n - 2k exactly
    /// when the code is NMDS, and the dual pair is consistent.
    #[test]
    fn curve_code_bounds(p in prop::sample::select(vec![5u64, 7, 11, 13]), a in 0i64..13, b in 0i64..13, k in 1usize..4) {
        let budget = Budget::default();
        let f = Field::prime(p).unwrap();
        let Ok(c) = Curve::from_ints(&f, a, b) else { return Ok(()) };
        let n = c.count_points(&budget).unwrap() as usize;
        if 2 * k >= n || (p as f64).powi(2 * k as i32) > 1e6 {
            return Ok(());
        }
        let Ok(tz) = c.find_trace_zero_point(&QuadraticExtension::new(&f).unwrap()) else { return Ok(()) };
        let d = DivisorSpec::new(&tz, k).unwrap();
        let code = build_code(&c, &d, &budget).unwrap();
        prop_assert_eq!((code.len(), code.dim()), (n, 2 * k));
        // evaluation at infinity picks the constant function
        let col: Vec<bool> = code.generator().iter().map(|r| r[0].is_one()).collect();
        prop_assert!(col[0] && code.generator().iter().skip(1).all(|r| r[0].is_zero()));

        let dist = weight_distribution_bruteforce(&code, &budget).unwrap();
        let dmin = dist.min_distance().unwrap();
        prop_assert!(dmin >= n - 2 * k);
        let class = classify_mds_nmds(&c, &d, &budget).unwrap();
        prop_assert_eq!(class.class == CodeClass::Nmds, dmin == n - 2 * k);

        let dual = dual_code(&code);
        prop_assert!(dual_code(&dual).same_row_space(&code));
        let dual_dist = if (p as f64).powi((n - 2 * k) as i32) <= 1e6 {
            weight_distribution_bruteforce(&dual, &budget).unwrap()
        } else {
            macwilliams_transform(&dist, p).unwrap()
        };
        prop_assert_eq!(macwilliams_transform(&dist, p).unwrap(), dual_dist.clone());
        if class.class == CodeClass::Nmds {
            prop_assert_eq!(dist.get(n - 2 * k), dual_dist.get(2 * k));
            let (primal, dual_formula) =
                nmds_weight_distribution(n, 2 * k, p, &dist.get(n - 2 * k)).unwrap();
            prop_assert_eq!(primal, dist.clone());
            prop_assert_eq!(dual_formula, dual_dist);
            let fam = min_weight_supports(&c, &d, &budget).unwrap();
            prop_assert_eq!(BigUint::from(fam.blocks.len()) * (p - 1), dist.get(n - 2 * k));
        }
    }
}

#[test]
fn found_curves_have_full_p_torsion() {
    let budget = Budget::default();
    for r in search_parameters(20, false) {
        let (c, cert) = find_curve(r.q, r.p, &budget).unwrap();
        assert_eq!(cert.points, r.p * r.p);
        let pts = c.points(&budget).unwrap();
        assert_eq!(pts.len() as u64, r.p * r.p);
        assert!(pts.iter().all(|pt| c.scalar_mul(r.p as i64, pt).unwrap().is_infinity()));
        let q = c.field().order() as i64;
        assert!((pts.len() as i64 - q - 1).pow(2) <= 4 * q);
    }
}

#[test]
fn nonsquare_counts() {
    for q in [7u64, 13, 31, 43] {
        let f = Field::prime(q).unwrap();
        let non = f.elements().skip(1).filter(|a| !a.is_square()).count() as u64;
        assert_eq!(non, (q - 1) / 2);
    }
}

#[test]
fn positivity_on_elementary_groups() {
    for name in ["3x3", "5x5", "3", "5", "3x3x3"] {
        let g = AbelianGroup::parse(name).unwrap();
        let n = g.order();
        for k in 1..=n {
            for x in g.elements() {
                let full = count_subsets_full(&g, k, &x).unwrap();
                assert_eq!(full > BigUint::from(0u32), !(k == n && !x.is_zero()), "{name} k={k} x={x}");
                if k < n {
                    let nz = count_subsets_nonzero(&g, k, &x).unwrap();
                    let trivial = (x.is_zero() && (k == 1 || k == n - 2)) || (k == n - 1 && !x.is_zero());
                    assert_eq!(nz > BigUint::from(0u32), !trivial, "{name} k={k} x={x} nonzero");
                }
            }
        }
    }
}
