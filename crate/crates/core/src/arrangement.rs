//! Toric hyper-Kahler data `(u, lambda)` as an arrangement of codimension-3
//! flats `H_k = { y : <y, u_k> + lambda_k = 0 }` in ImH (x) (t^n)^*.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foundations::{is_z_basis, Direction, FlatVector, ImVector, IntMatrix, Tolerance};

/// Default bound on the number of subsets `check_smooth` is willing to visit.
pub const SUBSET_LIMIT: u128 = 10_000_000;

/// The surjection `u : Z^d -> Z^n`, stored by its columns `u_1, ..., u_d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusDatum {
    n: usize,
    columns: Vec<Vec<i64>>,
}

impl TorusDatum {
    pub fn new(n: usize, columns: Vec<Vec<i64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch {
                what: "torus rank",
                expected: 1,
                found: 0,
            });
        }
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch {
                what: "column of u",
                expected: n,
                found: bad.len(),
            });
        }
        if columns.len() < n {
            return Err(Error::TooFewHyperplanes {
                n,
                d: columns.len(),
            });
        }
        let gcd = IntMatrix::from_columns(&columns)?.maximal_minor_gcd();
        if !gcd.is_one() {
            return Err(Error::NonSurjective {
                gcd: gcd.to_string(),
            });
        }
        Ok(TorusDatum { n, columns })
    }

    /// Builds the datum from the `n x d` matrix given row by row.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let m = IntMatrix::from_rows(rows)?;
        let columns = (0..m.cols())
            .map(|c| m.column_i64(c).expect("entries came from i64"))
            .collect();
        Self::new(rows.len(), columns)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, k: usize) -> &[i64] {
        &self.columns[k]
    }

    pub fn columns(&self) -> &[Vec<i64>] {
        &self.columns
    }

    /// Rows of the `n x d` matrix.
    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|r| self.columns.iter().map(|c| c[r]).collect())
            .collect()
    }

    /// The datum `psi u` for `psi` in GL_n(Z).
    pub fn transformed(&self, psi: &IntMatrix) -> Result<Self> {
        let columns = self
            .columns
            .iter()
            .map(|c| {
                psi.mul_vec(c)
                    .iter()
                    .map(|x| i64::try_from(x).map_err(|_| Error::MalformedPolytope("overflow".into())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.n, columns)
    }
}

/// Torus datum together with the levels `lambda_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arrangement {
    torus: TorusDatum,
    lambda: Vec<ImVector>,
}

impl Arrangement {
    pub fn new(torus: TorusDatum, lambda: Vec<ImVector>) -> Result<Self> {
        if lambda.len() != torus.d() {
            return Err(Error::DimensionMismatch {
                what: "lambda",
                expected: torus.d(),
                found: lambda.len(),
            });
        }
        Ok(Arrangement { torus, lambda })
    }

    pub fn torus(&self) -> &TorusDatum {
        &self.torus
    }

    pub fn n(&self) -> usize {
        self.torus.n()
    }

    pub fn d(&self) -> usize {
        self.torus.d()
    }

    pub fn lambda(&self) -> &[ImVector] {
        &self.lambda
    }

    /// Whether `y` lies on `H_k` within tolerance.
    pub fn contains(&self, k: usize, y: &FlatVector, tol: &Tolerance) -> bool {
        let v = y.pair(self.torus.column(k)) + self.lambda[k];
        v.norm() <= tol.abs(y.max_norm().max(self.lambda[k].norm()))
    }

    /// Same arrangement with hyperplanes listed in the order `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let columns = perm.iter().map(|&k| self.torus.columns[k].clone()).collect();
        let lambda = perm.iter().map(|&k| self.lambda[k]).collect();
        Arrangement::new(TorusDatum::new(self.n(), columns)?, lambda)
    }
}

/// Result of intersecting a set of flats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntersectionSet {
    Empty { residual: f64 },
    Affine {
        point: FlatVector,
        dim: usize,
        residual: f64,
    },
}

impl IntersectionSet {
    pub fn is_empty(&self) -> bool {
        matches!(self, IntersectionSet::Empty { .. })
    }

    pub fn residual(&self) -> f64 {
        match self {
            IntersectionSet::Empty { residual } | IntersectionSet::Affine { residual, .. } => {
                *residual
            }
        }
    }
}

/// Intersection of the flats `H_k`, `k` in `tau`, solving each ImH component separately.
pub fn common_intersection(
    arr: &Arrangement,
    tau: &[usize],
    tol: &Tolerance,
) -> Result<IntersectionSet> {
    let n = arr.n();
    if tau.is_empty() {
        return Err(Error::DimensionMismatch {
            what: "subset size",
            expected: 1,
            found: 0,
        });
    }
    if let Some(&k) = tau.iter().find(|&&k| k >= arr.d()) {
        return Err(Error::DimensionMismatch {
            what: "hyperplane index",
            expected: arr.d(),
            found: k,
        });
    }
    let cols: Vec<Vec<i64>> = tau.iter().map(|&k| arr.torus.column(k).to_vec()).collect();
    let rank = IntMatrix::from_rows(&cols)?.rank();
    let m = DMatrix::from_fn(tau.len(), n, |r, c| cols[r][c] as f64);
    let svd = m.clone().svd(true, true);
    let cutoff = 1e-10 * svd.singular_values.max().max(1.0);
    let mut point = FlatVector::zeros(n);
    let mut residual: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for c in 0..3 {
        let b = DVector::from_fn(tau.len(), |r, _| -arr.lambda[tau[r]][c]);
        scale = scale.max(b.amax());
        let y = svd
            .solve(&b, cutoff)
            .map_err(|e| Error::DegenerateSubspace(e.to_string()))?;
        residual = residual.max((&m * &y - &b).amax());
        for (alpha, v) in y.iter().enumerate() {
            point.0[alpha].0[c] = *v;
        }
    }
    if residual > tol.abs(scale) {
        Ok(IntersectionSet::Empty { residual })
    } else {
        Ok(IntersectionSet::Affine {
            point,
            dim: 3 * (n - rank),
            residual,
        })
    }
}

/// Which smoothness condition a subset violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothCondition {
    /// `n + 1` flats with a common point.
    NPlusOneEmpty,
    /// `n` flats whose intersection disagrees with the Z-basis test.
    BasisIff,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothViolation {
    pub condition: SmoothCondition,
    pub tau: Vec<usize>,
    pub nonempty: bool,
    pub z_basis: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SmoothVerdict {
    Smooth { subsets_checked: usize },
    Violation(SmoothViolation),
}

impl SmoothVerdict {
    pub fn is_smooth(&self) -> bool {
        matches!(self, SmoothVerdict::Smooth { .. })
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Decides smoothness of the quotient: every `n + 1` flats have empty
/// intersection, and `n` flats meet iff their normals form a Z-basis.
/// The lexicographically first violating subset is reported.
pub fn check_smooth(arr: &Arrangement, force: bool, tol: &Tolerance) -> Result<SmoothVerdict> {
    let (n, d) = (arr.n(), arr.d());
    let count = binomial(d, n + 1);
    if count > SUBSET_LIMIT && !force {
        return Err(Error::CombinatorialBlowup {
            d,
            count,
            limit: SUBSET_LIMIT,
        });
    }
    let mut checked = 0;
    for tau in (0..d).combinations(n + 1) {
        checked += 1;
        let set = common_intersection(arr, &tau, tol)?;
        if !set.is_empty() {
            return Ok(SmoothVerdict::Violation(SmoothViolation {
                condition: SmoothCondition::NPlusOneEmpty,
                z_basis: false,
                nonempty: true,
                residual: set.residual(),
                tau,
            }));
        }
    }
    for tau in (0..d).combinations(n) {
        checked += 1;
        let cols: Vec<Vec<i64>> = tau.iter().map(|&k| arr.torus.column(k).to_vec()).collect();
        let basis = is_z_basis(&cols)?;
        let set = common_intersection(arr, &tau, tol)?;
        if basis == set.is_empty() {
            return Ok(SmoothVerdict::Violation(SmoothViolation {
                condition: SmoothCondition::BasisIff,
                z_basis: basis,
                nonempty: !set.is_empty(),
                residual: set.residual(),
                tau,
            }));
        }
    }
    Ok(SmoothVerdict::Smooth {
        subsets_checked: checked,
    })
}

/// Restriction of `H_k` to the slice `q + sigma (x) t^*`, in the slice coordinate `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SliceTrace {
    Empty,
    /// `{ x : normal . x = offset }`; a zero normal with zero offset is the whole slice.
    Boundary { normal: Vec<i64>, offset: f64 },
}

pub fn slice_trace(
    arr: &Arrangement,
    k: usize,
    q: &FlatVector,
    sigma: &Direction,
    tol: &Tolerance,
) -> SliceTrace {
    let u = arr.torus.column(k);
    let v = q.pair(u) + arr.lambda[k];
    let scale = q.max_norm() * u.iter().map(|x| x.unsigned_abs() as f64).sum::<f64>()
        + arr.lambda[k].norm();
    if v.reject(sigma).norm() > tol.abs(scale) {
        return SliceTrace::Empty;
    }
    SliceTrace::Boundary {
        normal: u.to_vec(),
        offset: -v.dot(&sigma.vector()),
    }
}
