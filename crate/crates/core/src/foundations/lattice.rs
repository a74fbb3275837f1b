use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense integer matrix with arbitrary-precision entries, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                what: "matrix row",
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<i64>]) -> Result<Self> {
        Ok(Self::from_rows(columns)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.cols.max(1)).map(<[BigInt]>::to_vec).collect()
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).to_i64()).collect())
            .collect()
    }

    pub fn column_i64(&self, c: usize) -> Option<Vec<i64>> {
        (0..self.rows).map(|r| self.get(r, c).to_i64()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                what: "matrix product",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let s = (0..self.cols).map(|k| self.get(r, k) * other.get(k, c)).sum();
                out.set(r, c, s);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<BigInt> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * BigInt::from(v[c])).sum())
            .collect()
    }

    fn require_square(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                what: "square matrix",
                expected: self.rows,
                found: self.cols,
            });
        }
        Ok(())
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        self.require_square()?;
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// Diagonal of the Smith normal form: the nonzero invariant factors,
    /// nonnegative and each dividing the next.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.to_rows();
        let mut diag = Vec::new();
        for t in 0..m.min(n) {
            loop {
                let pivot = (t..m)
                    .flat_map(|i| (t..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| !a[i][j].is_zero())
                    .min_by(|&(i1, j1), &(i2, j2)| a[i1][j1].abs().cmp(&a[i2][j2].abs()));
                let Some((pi, pj)) = pivot else {
                    return diag;
                };
                a.swap(t, pi);
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
                let p = a[t][t].clone();
                let mut clean = true;
                for i in t + 1..m {
                    let q = a[i][t].div_floor(&p);
                    if !q.is_zero() {
                        for j in t..n {
                            let v = &a[t][j] * &q;
                            a[i][j] -= v;
                        }
                    }
                    clean &= a[i][t].is_zero();
                }
                for j in t + 1..n {
                    let q = a[t][j].div_floor(&p);
                    if !q.is_zero() {
                        for row in a.iter_mut().skip(t) {
                            let v = &row[t] * &q;
                            row[j] -= v;
                        }
                    }
                    clean &= a[t][j].is_zero();
                }
                if !clean {
                    continue;
                }
                let offender = (t + 1..m)
                    .find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&p)));
                match offender {
                    Some(i) => {
                        for j in t..n {
                            let v = a[i][j].clone();
                            a[t][j] += v;
                        }
                    }
                    None => break,
                }
            }
            diag.push(a[t][t].abs());
        }
        diag
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }

    /// gcd of all `rows x rows` minors (zero when the rank is deficient).
    pub fn maximal_minor_gcd(&self) -> BigInt {
        let factors = self.invariant_factors();
        if factors.len() < self.rows.min(self.cols) {
            return BigInt::zero();
        }
        factors.iter().product()
    }

    /// Matrix of cofactors transposed, so `A adj(A) = det(A) I`.
    pub fn adjugate(&self) -> Result<IntMatrix> {
        self.require_square()?;
        let n = self.rows;
        let mut adj = Self::zeros(n, n);
        if n == 1 {
            adj.set(0, 0, BigInt::one());
            return Ok(adj);
        }
        for r in 0..n {
            for c in 0..n {
                let mut minor = Self::zeros(n - 1, n - 1);
                for (mi, i) in (0..n).filter(|&i| i != r).enumerate() {
                    for (mj, j) in (0..n).filter(|&j| j != c).enumerate() {
                        minor.set(mi, mj, self.get(i, j).clone());
                    }
                }
                let mut cof = minor.det()?;
                if (r + c) % 2 == 1 {
                    cof = -cof;
                }
                adj.set(c, r, cof);
            }
        }
        Ok(adj)
    }

    /// Exact inverse if it has integer entries (i.e. the matrix is unimodular).
    pub fn integer_inverse(&self) -> Result<Option<IntMatrix>> {
        self.require_square()?;
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                (0..2 * n)
                    .map(|c| {
                        if c < n {
                            BigRational::from_integer(self.get(r, c).clone())
                        } else if c - n == r {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(None);
            };
            a.swap(k, p);
            let inv = a[k][k].recip();
            for v in a[k].iter_mut() {
                *v = &*v * &inv;
            }
            for i in 0..n {
                if i != k && !a[i][k].is_zero() {
                    let f = a[i][k].clone();
                    for j in 0..2 * n {
                        let v = &a[k][j] * &f;
                        a[i][j] -= v;
                    }
                }
            }
        }
        let mut out = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let v = &a[r][n + c];
                if !v.is_integer() {
                    return Ok(None);
                }
                out.set(r, c, v.to_integer());
            }
        }
        Ok(Some(out))
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_i64_rows().expect("matrix entries exceed i64")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Whether `n` integer vectors of length `n` form a basis of Z^n.
pub fn is_z_basis(vectors: &[Vec<i64>]) -> Result<bool> {
    let n = vectors.len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            what: "basis vector",
            expected: n,
            found: bad.len(),
        });
    }
    if n == 0 {
        return Err(Error::DimensionMismatch {
            what: "basis size",
            expected: 1,
            found: 0,
        });
    }
    Ok(IntMatrix::from_columns(vectors)?.det()?.abs().is_one())
}

/// `min_k |l1 - l2 + m k|`, the distance in Z / mZ.
pub fn cyclic_distance(l1: i64, l2: i64, m: u64) -> u64 {
    assert!(m >= 1, "cyclic distance needs a positive modulus");
    let m = m as i128;
    let r = (l1 as i128 - l2 as i128).rem_euclid(m);
    r.min(m - r) as u64
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// Determinant by cofactor expansion, for cross-checking.
    fn leibniz(a: &[Vec<i64>]) -> i128 {
        fn go(a: &[Vec<i64>], row: usize, used: &mut [bool]) -> i128 {
            if row == a.len() {
                return 1;
            }
            let mut total = 0;
            let mut pos = 0;
            for c in 0..a.len() {
                if used[c] {
                    continue;
                }
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                pos += 1;
                used[c] = true;
                total += sign * a[row][c] as i128 * go(a, row + 1, used);
                used[c] = false;
            }
            total
        }
        go(a, 0, &mut vec![false; a.len()])
    }

    #[test]
    fn z_basis_examples() {
        assert!(is_z_basis(&[vec![1, 0], vec![0, 1]]).unwrap());
        assert!(is_z_basis(&[vec![1, 1], vec![1, 0]]).unwrap());
        assert!(!is_z_basis(&[vec![1, 1], vec![1, -1]]).unwrap());
        assert!(is_z_basis(&[vec![1, 0, 0], vec![0, 1]]).is_err());
    }

    #[test]
    fn cyclic_distance_examples() {
        assert_eq!(cyclic_distance(1, 4, 4), 1);
        assert_eq!(cyclic_distance(2, 2, 6), 0);
        for n in 1..8u64 {
            for k in -3..10 {
                assert_eq!(cyclic_distance(k, k + 1, 2 * n), 1);
            }
        }
    }

    #[test]
    fn cyclic_distance_triangle_inequality() {
        for m in 1..=12u64 {
            let mi = m as i64;
            for a in 0..mi {
                for b in 0..mi {
                    assert_eq!(cyclic_distance(a, b, m), cyclic_distance(b, a, m));
                    for c in 0..mi {
                        assert!(
                            cyclic_distance(a, c, m)
                                <= cyclic_distance(a, b, m) + cyclic_distance(b, c, m)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn smith_examples() {
        assert_eq!(m(&[&[2]]).maximal_minor_gcd(), BigInt::from(2));
        assert_eq!(m(&[&[1, 1, 0, 1, 0], &[1, 0, 1, 0, 1]]).maximal_minor_gcd(), BigInt::one());
        let f = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]).invariant_factors();
        assert_eq!(f, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        assert_eq!(m(&[&[1, -1, 0], &[-1, 1, 0]]).rank(), 1);
        assert_eq!(IntMatrix::zeros(2, 3).rank(), 0);
    }

    #[test]
    fn inverse_and_adjugate() {
        let g = m(&[&[-1, -1], &[0, 1]]);
        let inv = g.integer_inverse().unwrap().unwrap();
        assert_eq!(g.mul(&inv).unwrap(), IntMatrix::identity(2));
        assert!(m(&[&[2, 0], &[0, 1]]).integer_inverse().unwrap().is_none());
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let d = a.det().unwrap();
        let prod = a.mul(&a.adjugate().unwrap()).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { d.clone() } else { BigInt::zero() };
                assert_eq!(prod.get(r, c), &want);
            }
        }
    }

    fn arb_square() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..5).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-4i64..5, n), n))
    }

    proptest! {
        #[test]
        fn det_matches_leibniz(a in arb_square()) {
            let det = IntMatrix::from_rows(&a).unwrap().det().unwrap();
            prop_assert_eq!(det, BigInt::from(leibniz(&a)));
        }

        #[test]
        fn smith_product_is_abs_det(a in arb_square()) {
            let mat = IntMatrix::from_rows(&a).unwrap();
            let det = mat.det().unwrap().abs();
            let f = mat.invariant_factors();
            if det.is_zero() {
                prop_assert!(f.len() < a.len());
            } else {
                prop_assert_eq!(f.len(), a.len());
                prop_assert_eq!(f.iter().product::<BigInt>(), det);
                for w in f.windows(2) {
                    prop_assert!(w[1].is_multiple_of(&w[0]));
                }
            }
        }

        #[test]
        fn z_basis_invariant_under_permutation_and_sign(a in arb_square(), flip in 0usize..4, swap in 0usize..4) {
            let base = is_z_basis(&a).unwrap();
            let mut b = a.clone();
            let n = b.len();
            for x in b[flip % n].iter_mut() { *x = -*x; }
            b.swap(0, swap % n);
            prop_assert_eq!(is_z_basis(&b).unwrap(), base);
        }
    }
}
