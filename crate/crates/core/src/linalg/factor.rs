//! Factorization of rational polynomials of small degree.
//!
//! Squarefree parts come from Yun's algorithm; each part is split by
//! stripping rational roots and then by Kronecker's interpolation search for
//! factors of degree `2..=deg/2`. This is exponential in the worst case and
//! only meant for the degrees that arise as minimal polynomials of small
//! matrices.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Poly;

pub fn euler_phi(mut d: u64) -> u64 {
    let mut result = d;
    let mut p = 2;
    while p * p <= d {
        if d % p == 0 {
            while d % p == 0 {
                d /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if d > 1 {
        result -= result / d;
    }
    result
}

/// The `d`-th cyclotomic polynomial `Φ_d`.
pub fn cyclotomic_polynomial(d: u64) -> Poly {
    assert!(d >= 1, "cyclotomic index must be positive");
    let mut p = &Poly::monomial(d as usize) - &Poly::one();
    for e in 1..d {
        if d % e == 0 {
            p = p.div_rem(&cyclotomic_polynomial(e)).0;
        }
    }
    p
}

/// Monic irreducible factors of `f` with multiplicities, sorted by degree
/// and then coefficients. Constant input yields no factors.
pub fn factor_over_rationals(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    for (part, mult) in squarefree_decomposition(&f.monic()) {
        for g in irreducible_factors(&part) {
            out.push((g, mult));
        }
    }
    out.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.coeffs().cmp(b.0.coeffs())));
    out
}

fn squarefree_decomposition(f: &Poly) -> Vec<(Poly, usize)> {
    let fp = f.derivative();
    let a0 = f.gcd(&fp);
    let mut b = f.div_rem(&a0).0;
    let c = fp.div_rem(&a0).0;
    let mut d = &c - &b.derivative();
    let mut out = Vec::new();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.monic(), i));
        }
        b = b.div_rem(&a).0;
        let c = d.div_rem(&a).0;
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

fn irreducible_factors(f: &Poly) -> Vec<Poly> {
    let deg = f.degree().unwrap_or(0);
    if deg <= 1 {
        return vec![f.monic()];
    }
    if let Some(r) = rational_root(f) {
        let lin = Poly::linear_root(r);
        let mut out = vec![lin.clone()];
        out.extend(irreducible_factors(&f.div_rem(&lin).0));
        return out;
    }
    for d in 2..=deg / 2 {
        if let Some(g) = kronecker_factor(f, d) {
            let mut out = irreducible_factors(&g);
            out.extend(irreducible_factors(&f.div_rem(&g).0));
            return out;
        }
    }
    vec![f.monic()]
}

fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= n {
        if (&n % &i).is_zero() {
            let j = &n / &i;
            if j != i {
                large.push(j);
            }
            small.push(i.clone());
        }
        i += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

fn rational_root(f: &Poly) -> Option<BigRational> {
    let ints = f.primitive_integer();
    if ints[0].is_zero() {
        return Some(BigRational::zero());
    }
    let lead = ints.last().unwrap();
    for p in positive_divisors(&ints[0]) {
        for q in positive_divisors(lead) {
            if !p.gcd(&q).is_one() {
                continue;
            }
            for cand in [BigRational::new(p.clone(), q.clone()), BigRational::new(-p.clone(), q.clone())] {
                if f.eval(&cand).is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

/// Searches for a monic factor of exact degree `d` of a polynomial without
/// rational roots.
fn kronecker_factor(f: &Poly, d: usize) -> Option<Poly> {
    let fi = Poly::from_integers(&f.primitive_integer());
    let points: Vec<BigRational> = (0..=d)
        .map(|i| {
            let k = ((i + 1) / 2) as i64;
            BigRational::from_integer(BigInt::from(if i % 2 == 1 { k } else { -k }))
        })
        .collect();
    let values: Vec<BigInt> = points.iter().map(|x| fi.eval(x).to_integer()).collect();
    debug_assert!(values.iter().all(|v| !v.is_zero()));
    // Lagrange basis through the sample points
    let basis: Vec<Poly> = (0..points.len())
        .map(|i| {
            let mut l = Poly::one();
            for (j, xj) in points.iter().enumerate() {
                if i != j {
                    let denom = &points[i] - xj;
                    l = (&l * &Poly::linear_root(xj.clone())).scale(&(BigRational::one() / denom));
                }
            }
            l
        })
        .collect();
    let choices: Vec<Vec<BigInt>> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let pos = positive_divisors(v);
            if i == 0 {
                pos
            } else {
                pos.iter().flat_map(|p| [p.clone(), -p.clone()]).collect()
            }
        })
        .collect();
    let mut idx = vec![0usize; choices.len()];
    loop {
        let mut g = Poly::zero();
        for (i, b) in basis.iter().enumerate() {
            g = &g + &b.scale(&BigRational::from_integer(choices[i][idx[i]].clone()));
        }
        if g.degree() == Some(d) && g.is_integral() && g.divides(&fi) {
            return Some(g.monic());
        }
        // odometer
        let mut k = 0;
        loop {
            if k == idx.len() {
                return None;
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        let phis: Vec<u64> = (1..=12).map(euler_phi).collect();
        assert_eq!(phis, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_polynomial(1), Poly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), Poly::from_i64(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(4), Poly::from_i64(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), Poly::from_i64(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), Poly::from_i64(&[1, 0, -1, 0, 1]));
        for d in 1..40 {
            assert_eq!(cyclotomic_polynomial(d).degree(), Some(euler_phi(d) as usize));
        }
    }

    #[test]
    fn factors_products_of_known_irreducibles() {
        let a = Poly::from_i64(&[1, 0, 1]);
        let b = Poly::from_i64(&[-2, 0, 1]);
        let c = Poly::from_i64(&[3, -1]).monic();
        let f = &(&(&a * &b) * &b) * &c;
        let got = factor_over_rationals(&f);
        assert_eq!(got, vec![(c, 1), (b, 2), (a, 1)]);
    }

    #[test]
    fn quartic_splits_into_quadratics() {
        // (x^2 + x + 1)(x^2 - 3) has no rational roots
        let f = &Poly::from_i64(&[1, 1, 1]) * &Poly::from_i64(&[-3, 0, 1]);
        let got = factor_over_rationals(&f);
        assert_eq!(got.len(), 2);
        assert!(got.iter().all(|(p, m)| p.degree() == Some(2) && *m == 1));
        let irreducible = Poly::from_i64(&[1, 0, 0, 0, 1]);
        assert_eq!(factor_over_rationals(&irreducible), vec![(irreducible, 1)]);
    }
}
