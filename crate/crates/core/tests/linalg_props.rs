use hnntree::linalg::{
    classify_matrix, cyclotomic_polynomial, factor_over_rationals, hnf, sturm_count, Lattice, LatticeIndex, MatrixOrder,
    Poly, RationalMatrix,
};
use hnntree::{zvec, BigInt, BigRational, ZVec};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn columns(cols: &[Vec<i64>]) -> Vec<ZVec> {
    cols.iter().map(|c| zvec(c)).collect()
}

/// Random nonsingular integer matrix, as columns.
fn nonsingular(n: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-bound..=bound, n), n).prop_filter("nonsingular", move |cols| {
        let m = RationalMatrix::from_columns(&columns(cols)).unwrap();
        !m.determinant().is_zero()
    })
}

/// Products of elementary column operations: always unimodular.
fn unimodular(n: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec((0..n, 0..n, -3i64..=3, any::<bool>()), 0..8).prop_map(move |ops| {
        let mut m = RationalMatrix::identity(n);
        for (i, j, k, swap) in ops {
            let mut e: Vec<Vec<i64>> = (0..n).map(|r| (0..n).map(|c| (r == c) as i64).collect()).collect();
            if swap {
                e.swap(i, j);
            } else if i != j {
                e[i][j] = k;
            }
            let rows: Vec<&[i64]> = e.iter().map(|r| r.as_slice()).collect();
            m = m.mul(&RationalMatrix::from_i64(&rows, 1).unwrap());
        }
        m
    })
}

fn matrix_columns(m: &RationalMatrix) -> Vec<ZVec> {
    let n = m.dim();
    (0..n).map(|j| (0..n).map(|i| m.entry(i, j).to_integer()).collect()).collect()
}

fn box_points(n: usize, half: i64) -> Vec<ZVec> {
    let side = 2 * half + 1;
    (0..side.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let v = code % side - half;
                    code /= side;
                    BigInt::from(v)
                })
                .collect()
        })
        .collect()
}

/// Membership oracle: `x` lies in the span of `cols` over Z iff `B^-1 x` is integral.
fn member_by_inverse(cols: &[ZVec], x: &[BigInt]) -> bool {
    let inv = RationalMatrix::from_columns(cols).unwrap().inverse().unwrap();
    inv.apply_integral(x).is_some()
}

fn check_hermite_shape(lat: &Lattice) {
    let n = lat.ambient_dim();
    for (j, col) in lat.basis().iter().enumerate() {
        let p = lat.pivot_rows()[j];
        assert!(col[p].is_positive());
        assert!(col[..p].iter().all(Zero::is_zero), "entries above the pivot vanish");
        for (k, later) in lat.basis().iter().enumerate().skip(j + 1) {
            let pk = lat.pivot_rows()[k];
            assert!(pk > p && pk < n);
            assert!(!col[pk].is_negative() && col[pk] < later[pk], "reduced against later pivot");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hnf_membership_matches_inverse(cols in nonsingular(2, 6)) {
        let gens = columns(&cols);
        let lat = hnf(2, &gens);
        check_hermite_shape(&lat);
        let det = RationalMatrix::from_columns(&gens).unwrap().determinant().abs().to_integer();
        prop_assert_eq!(lat.covolume(), det);
        for x in box_points(2, 4) {
            prop_assert_eq!(lat.contains(&x), member_by_inverse(&gens, &x));
        }
    }

    #[test]
    fn hnf_is_basis_independent(cols in nonsingular(3, 4), u in unimodular(3)) {
        let gens = columns(&cols);
        let b = RationalMatrix::from_columns(&gens).unwrap();
        let lat = hnf(3, &gens);
        prop_assert_eq!(&hnf(3, &matrix_columns(&b.mul(&u))), &lat);
        prop_assert_eq!(&hnf(3, lat.basis()), &lat);
    }

    #[test]
    fn index_times_covolume(cols in nonsingular(2, 5), m in nonsingular(2, 3)) {
        let sup_gens = columns(&cols);
        let b = RationalMatrix::from_columns(&sup_gens).unwrap();
        let mm = RationalMatrix::from_columns(&columns(&m)).unwrap();
        let sup = hnf(2, &sup_gens);
        let sub = hnf(2, &matrix_columns(&b.mul(&mm)));
        let LatticeIndex::Finite(idx) = sub.index_in(&sup) else { panic!("nested full rank") };
        prop_assert_eq!(idx * sup.covolume(), sub.covolume());
        prop_assert_eq!(sup.index_in(&sub) == LatticeIndex::NotContained, sub != sup);
    }

    #[test]
    fn intersection_membership(a in nonsingular(2, 4), b in nonsingular(2, 4)) {
        let (la, lb) = (hnf(2, &columns(&a)), hnf(2, &columns(&b)));
        let meet = la.intersect(&lb);
        prop_assert!(meet.is_subset_of(&la) && meet.is_subset_of(&lb));
        for x in box_points(2, 4) {
            prop_assert_eq!(meet.contains(&x), la.contains(&x) && lb.contains(&x));
        }
    }

    #[test]
    fn intersection_membership_3d(a in nonsingular(3, 2), b in nonsingular(3, 2)) {
        let (la, lb) = (hnf(3, &columns(&a)), hnf(3, &columns(&b)));
        let meet = la.intersect(&lb);
        for x in box_points(3, 4) {
            prop_assert_eq!(meet.contains(&x), la.contains(&x) && lb.contains(&x));
        }
    }

    #[test]
    fn residues_partition(cols in nonsingular(2, 4)) {
        let lat = hnf(2, &columns(&cols));
        let side: i64 = (0..2).map(|j| i64::try_from(lat.pivot(j)).unwrap()).product();
        let mut seen = std::collections::BTreeSet::new();
        for x in 0..side {
            for y in 0..side {
                let v = zvec(&[x, y]);
                let r = lat.residue(&v);
                let diff: ZVec = v.iter().zip(&r).map(|(a, b)| a - b).collect();
                prop_assert!(lat.contains(&diff));
                seen.insert(r);
            }
        }
        prop_assert_eq!(BigInt::from(seen.len()), lat.covolume());
        prop_assert_eq!(lat.residues().len(), seen.len());
    }

    #[test]
    fn classification_is_conjugation_invariant(which in 0usize..FIXTURES.len(), p in unimodular(2)) {
        let a = fixture(which);
        let conj = p.mul(&a).mul(&p.inverse().unwrap());
        prop_assert_eq!(classify_matrix(&conj).unwrap(), classify_matrix(&a).unwrap());
    }

    #[test]
    fn classification_of_inverse(which in 0usize..FIXTURES.len()) {
        let a = fixture(which);
        let c = classify_matrix(&a).unwrap();
        let ci = classify_matrix(&a.inverse().unwrap()).unwrap();
        prop_assert_eq!(c.orthogonal_conjugate, ci.orthogonal_conjugate);
        prop_assert_eq!(c.order, ci.order);
    }

    #[test]
    fn sturm_counts_planted_roots(
        roots in prop::collection::btree_set(-12i64..=12, 0..5),
        quad in prop::collection::vec(1i64..6, 0..2),
        lo in -14i64..=10,
        width in 1i64..=12,
    ) {
        // roots r/2, plus x^2 + c factors with no real roots
        let mut p = Poly::one();
        for r in &roots {
            p = &p * &Poly::linear_root(BigRational::new(BigInt::from(*r), BigInt::from(2)));
        }
        for c in &quad {
            p = &p * &Poly::from_i64(&[*c, 0, 1]);
        }
        let (lo, hi) = (q(lo), q(lo + width));
        let expected = roots
            .iter()
            .filter(|r| {
                let x = BigRational::new(BigInt::from(**r), BigInt::from(2));
                x > lo && x < hi
            })
            .count();
        prop_assert_eq!(sturm_count(&p, &lo, &hi).unwrap(), expected);
    }

    #[test]
    fn sturm_matches_bisection(coeffs in prop::collection::vec(-6i64..=6, 2..7), lo in -4i64..=1, width in 1i64..=5) {
        let p = Poly::from_i64(&coeffs);
        prop_assume!(p.degree().unwrap_or(0) >= 1);
        let (lo, hi) = (q(lo), q(lo + width));
        prop_assert_eq!(sturm_count(&p, &lo, &hi).unwrap(), bisection_count(&p, &lo, &hi));
    }
}

const FIXTURES: &[(&[&[i64]], i64)] = &[
    (&[&[3, -4], &[4, 3]], 5),
    (&[&[0, -1], &[1, 0]], 1),
    (&[&[2, 1], &[1, 1]], 1),
    (&[&[1, 1], &[0, 1]], 1),
    (&[&[0, -1], &[1, 1]], 1),
    (&[&[4, 0], &[0, 1]], 2),
    (&[&[-1, 0], &[0, 1]], 1),
    (&[&[1, -1], &[1, 1]], 1),
];

fn fixture(i: usize) -> RationalMatrix {
    let (rows, d) = FIXTURES[i];
    RationalMatrix::from_i64(rows, d).unwrap()
}

/// Real roots in `(lo, hi)` by Descartes' rule of signs on bisected
/// intervals, applied to the squarefree part.
fn bisection_count(p: &Poly, lo: &BigRational, hi: &BigRational) -> usize {
    let sq = p.div_rem(&p.gcd(&p.derivative())).0;
    isolate(&sq, lo, hi, 0)
}

fn isolate(p: &Poly, a: &BigRational, b: &BigRational, depth: u32) -> usize {
    assert!(depth < 200, "bisection failed to separate roots");
    match descartes_bound(p, a, b) {
        0 => 0,
        1 => 1,
        _ => {
            let mid = (a + b) / q(2);
            let at_mid = usize::from(p.eval(&mid).is_zero());
            isolate(p, a, &mid, depth + 1) + at_mid + isolate(p, &mid, b, depth + 1)
        }
    }
}

/// Sign variations of `(1 + x)^d p((a + b x) / (1 + x))`, an upper bound on
/// roots in `(a, b)` that is exact when it is 0 or 1.
fn descartes_bound(p: &Poly, a: &BigRational, b: &BigRational) -> usize {
    let d = p.degree().unwrap();
    let num = Poly::new(vec![a.clone(), b.clone()]);
    let den = Poly::from_i64(&[1, 1]);
    let mut t = Poly::zero();
    for (i, c) in p.coeffs().iter().enumerate() {
        let term = &num.pow(i) * &den.pow(d - i);
        t = &t + &term.scale(c);
    }
    let signs: Vec<bool> = t.coeffs().iter().filter(|c| !c.is_zero()).map(|c| c.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

#[test]
fn finite_orders_are_exact() {
    for i in 0..FIXTURES.len() {
        let a = fixture(i);
        if let MatrixOrder::Finite(m) = classify_matrix(&a).unwrap().order {
            assert!(a.pow(m).is_identity());
            for d in (1..m).filter(|d| m % d == 0) {
                assert!(!a.pow(d).is_identity(), "fixture {i}: order {m} but A^{d} = I");
            }
        }
    }
    let six = RationalMatrix::from_i64(&[&[0, -1, 0], &[1, 1, 0], &[0, 0, -1]], 1).unwrap();
    assert_eq!(classify_matrix(&six).unwrap().order, MatrixOrder::Finite(6));
}

#[test]
fn rank_one_rationals() {
    for p in 1..=10i64 {
        for qq in 1..=10i64 {
            for sign in [1, -1] {
                let a = RationalMatrix::from_i64(&[&[sign * qq]], p).unwrap();
                let c = classify_matrix(&a).unwrap();
                assert_eq!(c.orthogonal_conjugate, p == qq, "{}/{p}", sign * qq);
            }
        }
    }
}

#[test]
fn factorization_multiplies_back() {
    let samples = [
        vec![-1, 0, 0, 0, 0, 0, 1],
        vec![4, 0, -5, 0, 1],
        vec![1, 2, 3, 4, 5],
        vec![6, -11, 6, -1],
        vec![0, 0, 1, 1],
    ];
    for c in samples {
        let f = Poly::from_i64(&c);
        let factors = factor_over_rationals(&f);
        let mut prod = Poly::one();
        for (g, k) in &factors {
            prod = &prod * &g.pow(*k);
            assert!(g.gcd(&g.derivative()).degree() == Some(0));
        }
        assert_eq!(prod, f.monic());
    }
    // x^6 - 1 = Φ1 Φ2 Φ3 Φ6
    let f = Poly::from_i64(&[-1, 0, 0, 0, 0, 0, 1]);
    let mut got: Vec<Poly> = factor_over_rationals(&f).into_iter().map(|(g, _)| g).collect();
    let mut want: Vec<Poly> = [1, 2, 3, 6].iter().map(|&d| cyclotomic_polynomial(d)).collect();
    got.sort_by_key(|p| format!("{p}"));
    want.sort_by_key(|p| format!("{p}"));
    assert_eq!(got, want);
}

#[test]
fn cyclotomic_products() {
    // x^n - 1 is the product of Φ_d over d | n
    for n in 1..=24u64 {
        let mut prod = Poly::one();
        for d in (1..=n).filter(|d| n % d == 0) {
            prod = &prod * &cyclotomic_polynomial(d);
        }
        let mut c = vec![0i64; n as usize + 1];
        c[0] = -1;
        c[n as usize] = 1;
        assert_eq!(prod, Poly::from_i64(&c));
    }
    assert!(cyclotomic_polynomial(12).leading().unwrap().is_one());
}
