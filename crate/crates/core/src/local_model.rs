//! Flat model H^n = C^{2n} (coordinates `z_1..z_n, w_1..w_n`) at a torus
//! fixed point: standard forms, Hopf map, invariant Lagrangian subspaces
//! and characterizing angles between transverse Lagrangian planes.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foundations::{
    quaternion_moment, AngleClass, Direction, FlatVector, ImVector, Quaternion, Tolerance,
};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `|| U* U - I ||_F`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let m = u.nrows();
    (u.adjoint() * u - CMatrix::identity(m, m)).norm()
}

/// Hopf map `h(a, b) = (|a|^2 - |b|^2, 2 Im(ab), -2 Re(ab))` on the unit sphere of C^2.
pub fn hopf(alpha: Complex64, beta: Complex64, tol: &Tolerance) -> Result<ImVector> {
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    if (norm - 1.0).abs() > tol.geom {
        return Err(Error::NonUnit { norm });
    }
    let ab = alpha * beta;
    Ok(ImVector::new(
        alpha.norm_sqr() - beta.norm_sqr(),
        2.0 * ab.im,
        -2.0 * ab.re,
    ))
}

/// A point `(a, b)` of the unit sphere with `h(a, b) = y`.
pub fn hopf_preimage(y: &Direction) -> (Complex64, Complex64) {
    let y = y.vector();
    let c = Complex64::new(-y[2], y[1]) * 0.5;
    if y[0] >= 0.0 {
        let a = ((1.0 + y[0]) / 2.0).sqrt();
        (Complex64::new(a, 0.0), c / a)
    } else {
        let b = ((1.0 - y[0]) / 2.0).sqrt();
        (c / b, Complex64::new(b, 0.0))
    }
}

/// The three standard Kahler forms `(omega_1, omega_2, omega_3)` on C^{2n}:
/// `omega_1 = Im <p, q>` and `omega_2 + i omega_3 = sum dz_i ^ dw_i`.
pub fn standard_forms(p: &CVector, q: &CVector) -> [f64; 3] {
    let n = p.len() / 2;
    let w1 = p.dotc(q).im;
    let hol: Complex64 = (0..n).map(|i| p[i] * q[n + i] - p[n + i] * q[i]).sum();
    [w1, hol.re, hol.im]
}

/// `omega^c = c_1 omega_1 + c_2 omega_2 + c_3 omega_3`.
pub fn form_along(c: &ImVector, p: &CVector, q: &CVector) -> f64 {
    let w = standard_forms(p, q);
    c[0] * w[0] + c[1] * w[1] + c[2] * w[2]
}

/// Moment map of the torus action: one ImH vector per quaternionic factor `z_i + w_i j`.
pub fn moment(v: &CVector) -> FlatVector {
    let n = v.len() / 2;
    FlatVector(
        (0..n)
            .map(|i| quaternion_moment(Quaternion::from_complex_pair(v[i], v[n + i])))
            .collect(),
    )
}

fn real_embedding(basis: &CMatrix) -> DMatrix<f64> {
    let (r, c) = basis.shape();
    DMatrix::from_fn(2 * r, c, |i, j| {
        if i < r {
            basis[(i, j)].re
        } else {
            basis[(i - r, j)].im
        }
    })
}

/// Real orthonormalization (for the inner product `Re <p, q>`) of the columns.
fn orthonormalize(vectors: &[CVector], tol: f64) -> Option<Vec<CVector>> {
    let mut out: Vec<CVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &out {
                let c = e.dotc(&w).re;
                w -= e * Complex64::new(c, 0.0);
            }
        }
        let norm = w.norm();
        if norm <= tol * v.norm().max(1.0) {
            return None;
        }
        out.push(w / Complex64::new(norm, 0.0));
    }
    Some(out)
}

/// A real `2n`-dimensional subspace of C^{2n}, stored with a real-orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatSubspace {
    n: usize,
    basis: Vec<CVector>,
}

impl FlatSubspace {
    pub fn new(n: usize, vectors: Vec<CVector>) -> Result<Self> {
        if vectors.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                what: "subspace basis size",
                expected: 2 * n,
                found: vectors.len(),
            });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != 2 * n) {
            return Err(Error::DimensionMismatch {
                what: "ambient coordinates",
                expected: 2 * n,
                found: v.len(),
            });
        }
        let basis = orthonormalize(&vectors, 1e-10)
            .ok_or_else(|| Error::DegenerateSubspace("basis is linearly dependent".into()))?;
        Ok(FlatSubspace { n, basis })
    }

    /// Direct sum of subspaces sitting in complementary coordinates.
    pub fn direct_sum(n: usize, parts: &[Vec<CVector>]) -> Result<Self> {
        Self::new(n, parts.iter().flatten().cloned().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[CVector] {
        &self.basis
    }

    /// Orthogonal projector onto the subspace, acting on R^{4n}.
    pub fn projector(&self) -> DMatrix<f64> {
        let m = CMatrix::from_columns(&self.basis);
        let e = real_embedding(&m);
        &e * e.transpose()
    }

    /// Frobenius distance between orthogonal projectors.
    pub fn distance(&self, other: &FlatSubspace) -> f64 {
        (self.projector() - other.projector()).norm()
    }

    /// Matrix `omega^c(b_j, b_k)` over the stored basis.
    pub fn form_matrix(&self, c: &ImVector) -> DMatrix<f64> {
        let m = self.basis.len();
        DMatrix::from_fn(m, m, |j, k| form_along(c, &self.basis[j], &self.basis[k]))
    }

    /// `sum_j t_j b_j`.
    pub fn combination(&self, coeffs: &[f64]) -> CVector {
        self.basis
            .iter()
            .zip(coeffs)
            .fold(CVector::zeros(2 * self.n), |acc, (b, &t)| acc + b * Complex64::new(t, 0.0))
    }
}

/// Spanning vectors of `V_i(y) = { (a z, b conj(z)) }` inside `Z_i + W_i`.
pub fn v_basis(i: usize, y: &Direction, n: usize) -> Vec<CVector> {
    let (a, b) = hopf_preimage(y);
    let mut e1 = CVector::zeros(2 * n);
    let mut e2 = CVector::zeros(2 * n);
    e1[i] = a;
    e1[n + i] = b;
    e2[i] = I * a;
    e2[n + i] = -I * b;
    vec![e1, e2]
}

/// `V_i(y)` as a real 2-plane inside `Z_i + W_i` of C^{2n}; it does not depend
/// on the chosen Hopf preimage of `y`.
pub fn v_subspace(i: usize, y: &Direction, n: usize) -> Result<FlatPlane> {
    if i >= n {
        return Err(Error::DimensionMismatch {
            what: "factor index",
            expected: n,
            found: i,
        });
    }
    plane_from(i, n, &v_basis(i, y, n))
}

fn plane_from(factor: usize, n: usize, span: &[CVector]) -> Result<FlatPlane> {
    let basis = orthonormalize(span, 1e-12)
        .ok_or_else(|| Error::DegenerateSubspace(format!("plane in factor {factor} is degenerate")))?;
    Ok(FlatPlane { factor, n, basis })
}

/// A real 2-plane inside one factor `Z_i + W_i` of C^{2n}.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatPlane {
    pub factor: usize,
    pub n: usize,
    basis: Vec<CVector>,
}

impl FlatPlane {
    pub fn basis(&self) -> &[CVector] {
        &self.basis
    }

    pub fn projector(&self) -> DMatrix<f64> {
        let e = real_embedding(&CMatrix::from_columns(&self.basis));
        &e * e.transpose()
    }

    pub fn distance(&self, other: &FlatPlane) -> f64 {
        (self.projector() - other.projector()).norm()
    }
}

/// `V_1(e_1 sigma) + ... + V_n(e_n sigma)`.
pub fn signed_sum(sigma: &Direction, signs: &[i8]) -> Result<FlatSubspace> {
    let n = signs.len();
    let parts: Vec<Vec<CVector>> = signs
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let y = if s < 0 { sigma.flipped() } else { *sigma };
            v_basis(i, &y, n)
        })
        .collect();
    FlatSubspace::direct_sum(n, &parts)
}

/// Largest `|omega^{sigma'}|` and `|omega^{sigma''}|` over pairs of basis vectors
/// of `v`, where `(sigma, sigma', sigma'')` is a positive orthonormal frame.
pub fn standard_form_restriction(v: &FlatSubspace, sigma: &Direction) -> (f64, f64) {
    let (s1, s2) = sigma.complete_frame();
    (v.form_matrix(&s1).amax(), v.form_matrix(&s2).amax())
}

/// Weyl sequence coefficients used for deterministic sampling.
fn sample_coefficients(count: usize, dim: usize) -> impl Iterator<Item = Vec<f64>> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    (0..count).map(move |s| {
        (0..dim)
            .map(|j| {
                let t = ((s * dim + j + 1) as f64 * golden).fract();
                2.0 * t - 1.0
            })
            .collect()
    })
}

/// Signs `e_i` with `v = V_1(e_1 sigma) + ... + V_n(e_n sigma)`.
pub fn decompose_invariant(v: &FlatSubspace, sigma: &Direction, tol: &Tolerance) -> Result<Vec<i8>> {
    let n = v.n();
    let (r1, r2) = standard_form_restriction(v, sigma);
    if r1 > tol.geom || r2 > tol.geom {
        return Err(Error::NotHolomorphicLagrangian {
            first: r1,
            second: r2,
        });
    }
    let mut signs = Vec::with_capacity(n);
    for i in 0..n {
        let proj = DMatrix::from_fn(4, v.basis.len(), |r, c| {
            let z = v.basis[c][if r % 2 == 0 { i } else { n + i }];
            if r < 2 {
                z.re
            } else {
                z.im
            }
        });
        let svd = proj.svd(true, false);
        let u = svd.u.as_ref().expect("left singular vectors requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let rank = order
            .iter()
            .filter(|&&k| svd.singular_values[k] > 1e-8)
            .count();
        if rank != 2 {
            return Err(Error::NotInvariant(format!(
                "projection onto factor {i} has rank {rank}"
            )));
        }
        let lead = u.column(order[0]);
        let a = Complex64::new(lead[0], lead[2]);
        let b = Complex64::new(lead[1], lead[3]);
        let scale = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let y = hopf(a / scale, b / scale, tol)?;
        let y = Direction::normalize(y)?;
        let span: Vec<CVector> = order[..2]
            .iter()
            .map(|&k| {
                let col = u.column(k);
                let mut e = CVector::zeros(2 * n);
                e[i] = Complex64::new(col[0], col[2]);
                e[n + i] = Complex64::new(col[1], col[3]);
                e
            })
            .collect();
        let plane = plane_from(i, n, &span)?;
        if plane.distance(&v_subspace(i, &y, n)?) > 1e-7 {
            return Err(Error::NotInvariant(format!(
                "projection onto factor {i} is not of the form V_i(y)"
            )));
        }
        let s = sigma.vector();
        let sign = if (y.vector() - s).norm() < 1e-6 {
            1
        } else if (y.vector() + s).norm() < 1e-6 {
            -1
        } else {
            return Err(Error::ProjectionMismatch { factor: i });
        };
        signs.push(sign);
    }
    for coeffs in sample_coefficients(32, v.basis.len()) {
        let mu = moment(&v.combination(&coeffs));
        for (i, m) in mu.0.iter().enumerate() {
            let ray = if signs[i] > 0 { *sigma } else { sigma.flipped() };
            let along = m.dot(&ray.vector());
            let off = m.reject(&ray).norm();
            if along < -tol.abs(m.norm()) || off > tol.abs(m.norm()) * 10.0 {
                return Err(Error::ProjectionMismatch { factor: i });
            }
        }
    }
    Ok(signs)
}

/// Unitary `g` with `g V = R^{2n}`, built from the orthonormal basis of a Lagrangian `V`.
pub fn lagrangian_frame(v: &FlatSubspace, tol: &Tolerance) -> Result<CMatrix> {
    let u = CMatrix::from_columns(v.basis());
    let g = u.adjoint();
    let dev = unitarity_deviation(&g);
    if dev > tol.geom * 10.0 * g.nrows() as f64 {
        return Err(Error::NonUnitary { deviation: dev });
    }
    Ok(g)
}

/// Characterizing angles `0 < phi_1 <= ... <= phi_m < pi` and the orientation
/// sign of the second plane relative to the standard one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterizingAngles {
    pub angles: Vec<f64>,
    pub orientation: i8,
}

impl CharacterizingAngles {
    pub fn dimension(&self) -> usize {
        self.angles.len()
    }

    pub fn sum_over_pi(&self) -> f64 {
        self.angles.iter().sum::<f64>() / PI
    }

    /// Angles for the planes taken in the opposite order.
    pub fn reversed(&self) -> CharacterizingAngles {
        let m = self.angles.len();
        CharacterizingAngles {
            angles: self.angles.iter().rev().map(|a| PI - a).collect(),
            orientation: if m % 2 == 0 {
                self.orientation
            } else {
                -self.orientation
            },
        }
    }

    pub fn max_deviation(&self, other: &CharacterizingAngles) -> f64 {
        if self.angles.len() != other.angles.len() {
            return f64::INFINITY;
        }
        self.angles
            .iter()
            .zip(&other.angles)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Orthogonal `Q` with `Q^T S Q` diagonal for a complex symmetric unitary `S`.
fn diagonalize_symmetric_unitary(s: &CMatrix) -> Result<(DMatrix<f64>, Vec<Complex64>)> {
    let m = s.nrows();
    let x = s.map(|z| z.re);
    let y = s.map(|z| z.im);
    let x = (&x + x.transpose()) * 0.5;
    let y = (&y + y.transpose()) * 0.5;
    let eig = SymmetricEigen::new(x);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut q = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
    let vals: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && vals[end] - vals[end - 1] < 1e-8 {
            end += 1;
        }
        if end - start > 1 {
            let block = q.columns(start, end - start).into_owned();
            let restricted = block.transpose() * &y * &block;
            let restricted = (&restricted + restricted.transpose()) * 0.5;
            let inner = SymmetricEigen::new(restricted);
            let rotated = &block * &inner.eigenvectors;
            q.columns_mut(start, end - start).copy_from(&rotated);
        }
        start = end;
    }
    let qc = q.map(|v| Complex64::new(v, 0.0));
    let d = qc.transpose() * s * &qc;
    let mut residual: f64 = 0.0;
    for r in 0..m {
        for c in 0..m {
            if r != c {
                residual = residual.max(d[(r, c)].norm());
            }
        }
    }
    if residual > 1e-6 {
        return Err(Error::Diagonalization { residual });
    }
    Ok((q, (0..m).map(|k| d[(k, k)]).collect()))
}

/// Characterizing angles between `g_+^{-1} R^m` and `g_-^{-1} R^m`: half the
/// arguments of the eigenvalues of `P^T P`, `P = g_+ g_-^{-1}`. The orientation
/// sign is `det Q det R` for `R = P Q diag(e^{-i theta / 2})`, assuming `g_-`
/// carries the orientation of its plane to the standard one of R^m.
pub fn characterizing_angles(
    g_plus: &CMatrix,
    g_minus: &CMatrix,
    tol: &Tolerance,
) -> Result<CharacterizingAngles> {
    let m = g_plus.nrows();
    for g in [g_plus, g_minus] {
        if !g.is_square() || g.nrows() != m {
            return Err(Error::DimensionMismatch {
                what: "frame size",
                expected: m,
                found: g.ncols(),
            });
        }
        let deviation = unitarity_deviation(g);
        if deviation > tol.geom * m as f64 {
            return Err(Error::NonUnitary { deviation });
        }
    }
    let p = g_plus * g_minus.adjoint();
    let s = p.transpose() * &p;
    let (q, eigen) = diagonalize_symmetric_unitary(&s)?;
    let mut thetas: Vec<(f64, usize)> = eigen
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let mut t = z.im.atan2(z.re);
            if t < 0.0 {
                t += TAU;
            }
            if t > TAU - tol.angle {
                t = 0.0;
            }
            (t, k)
        })
        .collect();
    if let Some(&(t, _)) = thetas.iter().find(|(t, _)| *t < 2.0 * tol.angle) {
        return Err(Error::NonTransverse { argument: t });
    }
    thetas.sort_by(|a, b| a.0.total_cmp(&b.0));
    let q = DMatrix::from_fn(m, m, |r, c| q[(r, thetas[c].1)]);
    let half = DMatrix::from_fn(m, m, |r, c| {
        if r == c {
            Complex64::from_polar(1.0, -thetas[r].0 / 2.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let r = &p * q.map(|v| Complex64::new(v, 0.0)) * half;
    let det_r = r.map(|z| z.re).determinant();
    let det_q = q.determinant();
    let orientation = if det_q * det_r >= 0.0 { 1 } else { -1 };
    Ok(CharacterizingAngles {
        angles: thetas.iter().map(|(t, _)| t / 2.0).collect(),
        orientation,
    })
}

/// `A(theta)`, the unitary 2x2 block sending `V(sigma(theta))` to R^2.
pub fn a_matrix(theta: f64) -> CMatrix {
    let e = Complex64::from_polar(1.0, -theta);
    CMatrix::from_row_slice(2, 2, &[-I, e, Complex64::new(-1.0, 0.0), I * e]) * Complex64::new(FRAC_1_SQRT_2, 0.0)
}

/// Block frame on C^{2n} (ambient order `z_1..z_n, w_1..w_n`) built from `A(theta)`,
/// with output coordinates ordered factor by factor.
pub fn hk_frame(theta: f64, n: usize) -> CMatrix {
    let a = a_matrix(theta);
    let mut g = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            g[(2 * i + r, if c == 0 { i } else { n + i })] = a[(r, c)];
        }
    }
    g
}

/// Exact and numeric characterizing angles between `V(sigma(theta_+))` and
/// `V(sigma(theta_-))` (sums over all factors).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HkAngles {
    pub angle: AngleClass,
    pub multiplicity: usize,
    pub numeric: CharacterizingAngles,
}

pub fn hk_angles(
    theta_plus: AngleClass,
    theta_minus: AngleClass,
    n: usize,
    tol: &Tolerance,
) -> Result<HkAngles> {
    let diff = theta_minus - theta_plus;
    if diff.is_zero() {
        return Err(Error::NonTransverse { argument: 0.0 });
    }
    let angle = diff.half();
    let numeric = characterizing_angles(
        &hk_frame(theta_plus.radians(), n),
        &hk_frame(theta_minus.radians(), n),
        tol,
    )?;
    let deviation = numeric
        .angles
        .iter()
        .map(|a| (a - angle.radians()).abs())
        .fold(0.0, f64::max);
    if numeric.angles.len() != 2 * n || deviation > 1e-9 {
        return Err(Error::AngleMismatch { deviation });
    }
    Ok(HkAngles {
        angle,
        multiplicity: 2 * n,
        numeric,
    })
}

/// The integer `k` with `phi_1 + ... + phi_m = k pi`, required to lie in `[1, m-1]`.
pub fn intersection_type(angles: &CharacterizingAngles, m: usize, tol: &Tolerance) -> Result<usize> {
    if angles.dimension() != m {
        return Err(Error::DimensionMismatch {
            what: "angle count",
            expected: m,
            found: angles.dimension(),
        });
    }
    let sum = angles.sum_over_pi();
    let k = sum.round();
    if (sum - k).abs() > tol.angle || k < 1.0 || k > (m as f64) - 1.0 {
        return Err(Error::NonIntegerType { sum_over_pi: sum });
    }
    Ok(k as usize)
}
