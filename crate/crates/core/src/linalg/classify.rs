use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::factor::{cyclotomic_polynomial, euler_phi, factor_over_rationals};
use super::{sturm_count, LinalgError, Poly, RationalMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatrixOrder {
    Finite(u64),
    Infinite,
}

/// Verdicts for one irreducible factor of the minimal polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorVerdict {
    pub factor: Poly,
    pub multiplicity: usize,
    /// All complex roots have modulus 1.
    pub unit_circle: bool,
    /// `Some(d)` when the factor is the cyclotomic polynomial `Φ_d`.
    pub cyclotomic_index: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixClassification {
    /// Conjugate in `GL(n, R)` to an orthogonal matrix.
    pub orthogonal_conjugate: bool,
    pub order: MatrixOrder,
    pub minimal_polynomial: Poly,
    pub squarefree: bool,
    pub factors: Vec<FactorVerdict>,
}

/// Monic polynomial of least degree annihilating `a`, found by detecting the
/// first linear dependency among `I, A, A^2, ...`.
pub fn minimal_polynomial(a: &RationalMatrix) -> Poly {
    let n = a.dim();
    let flatten = |m: &RationalMatrix| -> Vec<BigRational> { m.rows().iter().flatten().cloned().collect() };
    let mut powers = vec![flatten(&RationalMatrix::identity(n))];
    let mut cur = RationalMatrix::identity(n);
    for k in 1..=n.max(1) {
        cur = cur.mul(a);
        let target = flatten(&cur);
        if let Some(c) = solve_combination(&powers, &target) {
            let mut coeffs: Vec<BigRational> = c.into_iter().map(|x| -x).collect();
            coeffs.push(BigRational::one());
            return Poly::new(coeffs);
        }
        powers.push(target);
        debug_assert!(k < n, "Cayley-Hamilton bound exceeded");
    }
    unreachable!("minimal polynomial degree exceeds dimension")
}

/// Coefficients `c` with `sum c_i vectors[i] = target`, if any.
fn solve_combination(vectors: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = vectors.len();
    let rows = target.len();
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = vectors.iter().map(|v| v[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut prow = 0;
    for col in 0..k {
        let Some(p) = (prow..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(p, prow);
        let pivot = m[prow][col].clone();
        for c in col..=k {
            m[prow][c] = &m[prow][c] / &pivot;
        }
        for r in 0..rows {
            if r != prow && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=k {
                    let delta = &factor * &m[prow][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivot_cols.push(col);
        prow += 1;
    }
    if m[prow..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); k];
    for (r, &c) in pivot_cols.iter().enumerate() {
        sol[c] = m[r][k].clone();
    }
    Some(sol)
}

/// Exact test that every complex root of `f` has modulus 1.
///
/// Roots `±1` are divided out first; what remains must be palindromic of even
/// degree `2k`, and `g(y)` with `f(x) = x^k g(x + 1/x)` must have `k` distinct
/// real roots in `(-2, 2)`.
fn roots_on_unit_circle(f: &Poly) -> bool {
    let mut f = f.clone();
    for r in [1i64, -1] {
        let lin = Poly::linear_root(BigRational::from_integer(r.into()));
        while f.degree().unwrap_or(0) > 0 && lin.divides(&f) {
            f = f.div_rem(&lin).0;
        }
    }
    if f.degree().unwrap_or(0) == 0 {
        return true;
    }
    if !f.is_self_reciprocal() {
        return false;
    }
    let Some(g) = f.monic().trace_substitute() else {
        return false;
    };
    let two = BigRational::from_integer(2.into());
    let k = g.degree().unwrap_or(0);
    sturm_count(&g, &-two.clone(), &two).is_ok_and(|c| c == k)
}

fn cyclotomic_index(f: &Poly) -> Option<u64> {
    if !f.is_integral() {
        return None;
    }
    let m = f.degree()? as u64;
    // φ(d) >= sqrt(d/2) bounds the search
    (1..=2 * m * m + 2).find(|&d| euler_phi(d) == m && cyclotomic_polynomial(d) == *f)
}

/// Decides whether `a` is conjugate in `GL(n, R)` to an orthogonal matrix and
/// whether it has finite order, from the factored minimal polynomial.
pub fn classify_matrix(a: &RationalMatrix) -> Result<MatrixClassification, LinalgError> {
    if a.dim() == 0 || a.determinant().is_zero() {
        return Err(LinalgError::Singular);
    }
    let minimal_polynomial = minimal_polynomial(a);
    let squarefree = minimal_polynomial.is_squarefree();
    let factors: Vec<FactorVerdict> = factor_over_rationals(&minimal_polynomial)
        .into_iter()
        .map(|(factor, multiplicity)| FactorVerdict {
            unit_circle: roots_on_unit_circle(&factor),
            cyclotomic_index: cyclotomic_index(&factor),
            factor,
            multiplicity,
        })
        .collect();
    let orthogonal_conjugate = squarefree && factors.iter().all(|f| f.unit_circle);
    let order = if squarefree && factors.iter().all(|f| f.cyclotomic_index.is_some()) {
        let m = factors.iter().fold(1u64, |acc, f| acc.lcm(&f.cyclotomic_index.unwrap()));
        MatrixOrder::Finite(m)
    } else {
        MatrixOrder::Infinite
    };
    Ok(MatrixClassification { orthogonal_conjugate, order, minimal_polynomial, squarefree, factors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classify(rows: &[&[i64]], den: i64) -> MatrixClassification {
        classify_matrix(&RationalMatrix::from_i64(rows, den).unwrap()).unwrap()
    }

    #[test]
    fn flagship_rotation_has_infinite_order() {
        let c = classify(&[&[3, -4], &[4, 3]], 5);
        assert!(c.orthogonal_conjugate);
        assert_eq!(c.order, MatrixOrder::Infinite);
        assert_eq!(c.factors.len(), 1);
        assert_eq!(c.factors[0].cyclotomic_index, None);
    }

    #[test]
    fn quarter_turn_identity_and_dilation() {
        let c = classify(&[&[0, -1], &[1, 0]], 1);
        assert!(c.orthogonal_conjugate);
        assert_eq!(c.order, MatrixOrder::Finite(4));
        let c = classify(&[&[2]], 1);
        assert!(!c.orthogonal_conjugate);
        assert_eq!(c.order, MatrixOrder::Infinite);
        let c = classify(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], 1);
        assert!(c.orthogonal_conjugate);
        assert_eq!(c.order, MatrixOrder::Finite(1));
        assert_eq!(c.minimal_polynomial, Poly::from_i64(&[-1, 1]));
    }

    #[test]
    fn non_semisimple_is_rejected() {
        // a unipotent Jordan block has all eigenvalues on the circle but is not diagonalizable
        let c = classify(&[&[1, 1], &[0, 1]], 1);
        assert!(!c.squarefree);
        assert!(!c.orthogonal_conjugate);
        assert_eq!(c.order, MatrixOrder::Infinite);
    }

    #[test]
    fn mixed_finite_order_block() {
        // diag(-1, rotation by 2π/3): order lcm(2, 3) = 6
        let c = classify(&[&[-1, 0, 0], &[0, 0, -1], &[0, 1, -1]], 1);
        assert!(c.orthogonal_conjugate);
        assert_eq!(c.order, MatrixOrder::Finite(6));
    }

    #[test]
    fn reciprocal_pair_off_circle() {
        // roots 2 and 1/2: palindromic up to scale, yet off the circle
        let c = classify(&[&[2, 0], &[0, 1]], 2);
        assert!(!c.orthogonal_conjugate);
        let c = classify(&[&[4, 0], &[0, 1]], 2);
        assert!(!c.orthogonal_conjugate);
    }

    #[test]
    fn singular_rejected() {
        let a = RationalMatrix::from_i64(&[&[1, 2], &[2, 4]], 1).unwrap();
        assert_eq!(classify_matrix(&a), Err(LinalgError::Singular));
    }
}
